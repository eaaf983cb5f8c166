//! Shared fixtures for the unit tests: the single-level benchmark junction,
//! deterministic random junction generation, and a dense Kronecker-product
//! Lyapunov solve used as a miniature oracle.

use crate::model::{make_proportional_right, BiasSpec, JunctionModel, Reservoir, ReservoirMode};
use crate::{CMatrix, CVector, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Real-valued complex vector.
pub(crate) fn cvec(values: &[f64]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0)))
}

/// Largest entry magnitude.
pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// The single-level benchmark junction: ε = 0, one mode per side at ω₀ = 0
/// with γ = 0.2 and v = 0.1, proportional with λ = 1.
pub(crate) fn benchmark_junction() -> JunctionModel {
    let left = Reservoir::new(vec![ReservoirMode::new(0.0, 0.2, cvec(&[0.1])).unwrap()]);
    let right = make_proportional_right(&left, 1.0).unwrap();
    JunctionModel::new(CMatrix::zeros(1, 1), left, right).unwrap()
}

/// The benchmark bias: μ = ±0.5 at zero temperature.
pub(crate) fn benchmark_bias() -> BiasSpec {
    BiasSpec::new(0.5, -0.5, 0.0, 0.0).unwrap()
}

/// Random Hermitian system Hamiltonian with entries of order one.
pub(crate) fn random_h_system(rng: &mut ChaCha8Rng, n_sites: usize) -> CMatrix {
    let mut h = CMatrix::zeros(n_sites, n_sites);
    for i in 0..n_sites {
        h[(i, i)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..n_sites {
            let v = C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            h[(i, j)] = v;
            h[(j, i)] = v.conj();
        }
    }
    h
}

/// Random reservoir with complex couplings to every site.
pub(crate) fn random_reservoir(rng: &mut ChaCha8Rng, n_sites: usize, n_modes: usize) -> Reservoir {
    Reservoir::new(
        (0..n_modes)
            .map(|_| {
                let coupling = CVector::from_iterator(
                    n_sites,
                    (0..n_sites)
                        .map(|_| C64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3))),
                );
                ReservoirMode::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.05..0.8), coupling)
                    .unwrap()
            })
            .collect(),
    )
}

/// Deterministic random junction with independent reservoirs.
pub(crate) fn random_junction(
    rng: &mut ChaCha8Rng,
    n_sites: usize,
    n_modes: usize,
) -> JunctionModel {
    let h = random_h_system(rng, n_sites);
    let left = random_reservoir(rng, n_sites, n_modes);
    let right = random_reservoir(rng, n_sites, n_modes);
    JunctionModel::new(h, left, right).unwrap()
}

/// Dense Kronecker-product solve of `A X + X A† + Q = 0`; feasible only for
/// small dimensions but completely independent of the structured routes.
pub(crate) fn lyapunov_kronecker(a: &CMatrix, q: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut m = CMatrix::zeros(n * n, n * n);
    // vec(A X) = (I ⊗ A) vec X ; vec(X A†) = (conj A ⊗ I) vec X.
    for col in 0..n {
        for row in 0..n {
            for k in 0..n {
                m[(col * n + row, col * n + k)] += a[(row, k)];
                m[(col * n + row, k * n + row)] += a[(col, k)].conj();
            }
        }
    }
    let rhs = nalgebra::DVector::from_iterator(n * n, q.iter().map(|v| -v));
    let sol = m
        .lu()
        .solve(&rhs)
        .expect("Kronecker system is nonsingular for Hurwitz A");
    CMatrix::from_iterator(n, n, sol.iter().copied())
}
