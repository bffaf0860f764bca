mod algebra;
mod geometry;
mod io;
mod profiles;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use io::{CliResult, Format, Output};

#[derive(Parser)]
#[command(
    name = "wrapfloer",
    version,
    about = "Maslov indices, Weinstein handle models, radial Hamiltonian profiles and Z2 filtered complexes",
    after_help = "Exit status: 0 on success, 1 when a verification fails, 2 on bad input or usage."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON input: a file path, `-` for stdin, or an inline document
    #[arg(long, global = true, value_name = "PATH|JSON")]
    input: Option<String>,

    /// Inline JSON input
    #[arg(long, global = true, value_name = "JSON", conflicts_with = "input")]
    json: Option<String>,

    /// Write the result here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Seed for randomized suites
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads [default: number of processors]
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Robbin-Salamon index of a pair of Lagrangian paths; input {"l0": path, "l1": path}
    #[command(after_help = "CSV columns: time,intersection_dim,signature,contribution_halves,boundary")]
    RsIndex,

    /// Winding number of det^2 along a loop of Lagrangians; input is a path
    Det2Winding,

    /// Maslov index of a chord, mu_RS(flow, reference) - n/2
    #[command(after_help = "Without --model the input is {\"flow_path\": path, \"reference\": path, \"n\": int}.")]
    ChordMaslov(geometry::ChordMaslovArgs),

    /// Grid certificate that the Liouville field is transverse to the handle boundary
    HandleCertify(geometry::HandleCertifyArgs),

    /// Liouville flow (or the quadratic model flow) of a point
    #[command(after_help = "CSV columns: t,c1..c2n[,phi,psi_delta]")]
    HandleFlow(geometry::HandleFlowArgs),

    /// Chord families of slope a on {x = y = 0}
    #[command(
        after_help = "Input (optional): a C_z profile {\"cx\", \"cy\", \"cz_table\": [[z, c], ..]}.\nCSV columns: z_level,m,is_constant"
    )]
    ChordLevels(geometry::ChordLevelsArgs),

    /// Closed-form Robbin-Salamon index of a handle chord
    HandleIndex(geometry::HandleIndexArgs),

    /// Index intervals of the two clusters a perturbation splits a chord family into
    #[command(after_help = "CSV columns: cluster,lo_halves,hi_halves")]
    ClusterBounds(geometry::HandleIndexArgs),

    /// One stage of the cofinal radial profile family
    #[command(after_help = "CSV columns: r,h,dh,action (samples of the profile)")]
    ProfileBuild(profiles::ProfileBuildArgs),

    /// Action-sign and monotonicity checks for a profile family
    #[command(
        after_help = "Input (optional): {\"profiles\": [..], \"spectrum\": [..], \"boundary\": [..]}.\nCSV columns: check,stage,item,pass,margin"
    )]
    ProfileVerify(profiles::ProfileVerifyArgs),

    /// Interpolating cutoff beta near the boundary and its derivative envelope
    #[command(after_help = "CSV columns: r,u,beta,dbeta_du")]
    BetaBuild(profiles::BetaArgs),

    /// Check d^2 = 0, degree and action filtration of a complex
    #[command(after_help = "CSV columns: kind,x_minus,x_plus")]
    ComplexValidate,

    /// Z2 homology of a complex, per degree
    #[command(after_help = "CSV columns: degree,dim")]
    Homology,

    /// Subquotient of the action filtration in the window (a, b]
    #[command(after_help = "CSV columns: degree,dim (homology of the subquotient)")]
    Subquotient(algebra::SubquotientArgs),

    /// Direct limit of a directed system of graded Z2 spaces
    #[command(after_help = "CSV columns: degree,finite,stable,dim")]
    DirectLimit(algebra::DirectLimitArgs),

    /// Commutativity of a square of chain maps
    #[command(
        after_help = "Input: {\"psi_i\", \"psi_next\", \"phi_m\", \"phi_handle\"}, each a chain map.\nCSV columns: field,value"
    )]
    DiagramCheck,

    /// Every verification suite for the given seed
    #[command(after_help = "CSV columns: suite,check,pass,detail")]
    VerifyAll(algebra::VerifyArgs),
}

pub struct Ctx {
    input: Option<String>,
    seed: u64,
}

impl Ctx {
    pub fn input(&self) -> Option<&str> {
        self.input.as_deref()
    }
}

fn dispatch(command: &Command, ctx: &Ctx) -> CliResult<Output> {
    match command {
        Command::RsIndex => geometry::rs_index(ctx),
        Command::Det2Winding => geometry::det2_winding(ctx),
        Command::ChordMaslov(a) => geometry::chord_maslov(a, ctx),
        Command::HandleCertify(a) => geometry::handle_certify(a),
        Command::HandleFlow(a) => geometry::handle_flow(a, ctx),
        Command::ChordLevels(a) => geometry::chord_levels(a, ctx),
        Command::HandleIndex(a) => geometry::handle_index(a),
        Command::ClusterBounds(a) => geometry::cluster_bounds(a),
        Command::ProfileBuild(a) => profiles::profile_build(a),
        Command::ProfileVerify(a) => profiles::profile_verify(a, ctx),
        Command::BetaBuild(a) => profiles::beta_build(a),
        Command::ComplexValidate => algebra::complex_validate(ctx),
        Command::Homology => algebra::homology(ctx),
        Command::Subquotient(a) => algebra::subquotient(a, ctx),
        Command::DirectLimit(a) => algebra::direct_limit(a, ctx),
        Command::DiagramCheck => algebra::diagram_check(ctx),
        Command::VerifyAll(a) => algebra::verify_all(a, ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("wrapfloer: cannot start {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let ctx = Ctx { input: cli.input.or(cli.json), seed: cli.seed };
    let result = dispatch(&cli.command, &ctx).and_then(|out| {
        let pass = out.pass;
        io::emit(out, cli.format, cli.out.as_deref()).map(|_| pass)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("wrapfloer: {e}");
            ExitCode::from(2)
        }
    }
}
