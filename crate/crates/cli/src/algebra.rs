use std::collections::BTreeMap;

use clap::{Args, ValueEnum};
use serde::Deserialize;
use serde_json::json;
use wrapfloer::homalg::{self, models, ChainMap, FilteredZ2Complex};
use wrapfloer::verify::{self, AxiomConfig, VerifyConfig};

use crate::io::{parse_input, CliResult, Output, Table};
use crate::Ctx;

fn dims_table(dims: &BTreeMap<i64, usize>) -> Table {
    let mut t = Table::new(&["degree", "dim"]);
    for (d, n) in dims {
        t.push(vec![d.to_string(), n.to_string()]);
    }
    t
}

fn complex_input(ctx: &Ctx) -> CliResult<FilteredZ2Complex> {
    parse_input(ctx.input(), "a filtered complex {\"generators\", \"differential\"}")
}

pub fn complex_validate(ctx: &Ctx) -> CliResult<Output> {
    let rep = homalg::validate_complex(&complex_input(ctx)?);
    let mut t = Table::new(&["kind", "x_minus", "x_plus"]);
    for v in &rep.violations {
        let kind = serde_json::to_value(v.kind).ok().and_then(|k| k.as_str().map(String::from)).unwrap_or_default();
        t.push(vec![kind, v.x_minus.clone(), v.x_plus.clone()]);
    }
    let pass = rep.pass;
    Ok(Output::new(rep)?.with_table(t).with_pass(pass))
}

pub fn homology(ctx: &Ctx) -> CliResult<Output> {
    let c = complex_input(ctx)?;
    let rep = homalg::validate_complex(&c);
    if !rep.pass {
        return Ok(Output::new(json!({"pass": false, "violations": rep.violations}))?.with_pass(false));
    }
    let dims = homalg::homology(&c);
    let total = homalg::total_dim(&dims);
    Ok(Output::new(json!({"dims": dims, "total": total}))?.with_table(dims_table(&dims)))
}

#[derive(Debug, Clone, Args)]
pub struct SubquotientArgs {
    /// Lower action bound (excluded)
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    /// Upper action bound (included) [default: infinity]
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
}

pub fn subquotient(args: &SubquotientArgs, ctx: &Ctx) -> CliResult<Output> {
    let c = complex_input(ctx)?;
    let sub = homalg::filtration_subquotient(&c, args.a, args.b.unwrap_or(f64::INFINITY))?;
    let dims = homalg::homology(&sub);
    Ok(Output::new(json!({"complex": sub, "dims": dims}))?.with_table(dims_table(&dims)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemModel {
    /// Z2 in degree 0 with identity maps
    IdentityZ2,
    /// Z2 in degree 0 with zero maps
    ZeroZ2,
    /// HF(R^n; H_k), one generator in degree nk per stage
    Hf,
}

#[derive(Debug, Clone, Args)]
pub struct DirectLimitArgs {
    /// Built-in system; without it the input is a directed system {"stages", "transitions", "extra"}
    #[arg(long, value_enum)]
    pub system: Option<SystemModel>,
    #[arg(long, default_value_t = 10)]
    pub len: usize,
    /// Half-dimension for the hf system
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Trailing stages that must agree for a degree to count as stable
    #[arg(long, default_value_t = homalg::DEFAULT_WINDOW)]
    pub window: usize,
}

pub fn direct_limit(args: &DirectLimitArgs, ctx: &Ctx) -> CliResult<Output> {
    let sys = match args.system {
        Some(SystemModel::IdentityZ2) => models::identity_system(args.len),
        Some(SystemModel::ZeroZ2) => models::zero_system(args.len),
        Some(SystemModel::Hf) => models::hf_system(args.n, args.len),
        None => parse_input(ctx.input(), "a directed system")?,
    };
    let rep = homalg::direct_limit(&sys, args.window)?;
    let mut t = Table::new(&["degree", "finite", "stable", "dim"]);
    for (d, n) in &rep.dims {
        let finite = rep.finite.get(d).copied().unwrap_or(0);
        let stable = rep.stable.get(d).copied().flatten().map_or(String::new(), |s| s.to_string());
        t.push(vec![d.to_string(), finite.to_string(), stable, n.to_string()]);
    }
    Ok(Output::new(rep)?.with_table(t))
}

#[derive(Deserialize)]
struct Square {
    psi_i: ChainMap,
    psi_next: ChainMap,
    phi_m: ChainMap,
    phi_handle: ChainMap,
}

pub fn diagram_check(ctx: &Ctx) -> CliResult<Output> {
    let s: Square = parse_input(ctx.input(), "{\"psi_i\", \"psi_next\", \"phi_m\", \"phi_handle\"}")?;
    let maps = BTreeMap::from([
        ("psi_i", s.psi_i.validate()),
        ("psi_next", s.psi_next.validate()),
        ("phi_m", s.phi_m.validate()),
        ("phi_handle", s.phi_handle.validate()),
    ]);
    let square = homalg::check_square(&s.psi_i, &s.psi_next, &s.phi_m, &s.phi_handle)?;
    let pass = square.commutes && maps.values().all(|m| m.pass);
    Ok(Output::new(json!({"pass": pass, "commutes": square.commutes, "defect": square.defect, "maps": maps}))?
        .with_pass(pass))
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Smaller randomized samples, for smoke testing
    #[arg(long)]
    pub quick: bool,
}

pub fn verify_all(args: &VerifyArgs, ctx: &Ctx) -> CliResult<Output> {
    let cfg = if args.quick {
        VerifyConfig {
            axioms: AxiomConfig { samples: 10, loops: 5, ..AxiomConfig::default() },
            handle_points: 100,
            certificate_resolution: 12,
            mutated_complexes: 10,
        }
    } else {
        VerifyConfig::default()
    };
    let rep = verify::verify_all(ctx.seed, &cfg);
    let mut t = Table::new(&["suite", "check", "pass", "detail"]);
    for s in &rep.suites {
        for c in &s.checks {
            t.push(vec![s.suite.clone(), c.name.clone(), c.pass.to_string(), c.detail.clone()]);
        }
    }
    let pass = rep.pass;
    Ok(Output::new(rep)?.with_table(t).with_pass(pass))
}
