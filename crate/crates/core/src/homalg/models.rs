use std::collections::BTreeMap;

use super::complex::{FilteredZ2Complex, Generator};
use super::limit::DirectedSystem;
use super::z2::Z2Matrix;

/// `Z2` in degree 0 with identity maps.
pub fn identity_system(len: usize) -> DirectedSystem {
    constant_system(len, Z2Matrix::identity(1))
}

/// `Z2` in degree 0 with zero maps.
pub fn zero_system(len: usize) -> DirectedSystem {
    constant_system(len, Z2Matrix::zeros(1, 1))
}

fn constant_system(len: usize, h: Z2Matrix) -> DirectedSystem {
    let stages = vec![BTreeMap::from([(0, 1)]); len];
    let transitions = vec![BTreeMap::from([(0, h)]); len.saturating_sub(1)];
    DirectedSystem::new(stages, transitions).expect("consistent shapes")
}

/// The complex of the quadratic Hamiltonian `H_k` on `R^n`: one generator of degree `nk`.
pub fn hf_complex(n: usize, k: usize) -> FilteredZ2Complex {
    FilteredZ2Complex::new(vec![Generator::new(format!("x{k}"), (n * k) as i64, 0.0)], Z2Matrix::zeros(1, 1))
        .expect("single generator")
}

/// Stages `HF(R^n; H_k)` for `k = 0..stages`; degree-preserving maps between different degrees are zero.
pub fn hf_system(n: usize, stages: usize) -> DirectedSystem {
    let dims = (0..stages).map(|k| BTreeMap::from([((n * k) as i64, 1)])).collect();
    DirectedSystem::new(dims, vec![BTreeMap::new(); stages.saturating_sub(1)]).expect("zero maps")
}
