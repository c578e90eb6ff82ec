use nalgebra::DMatrix;

use super::ring::{BiasController, Parameter, SpinRingSpec};
use crate::error::{ensure, Result};

/// Single-excitation Hamiltonian `H + D` of the controlled ring.
///
/// Couplings fill the first off-diagonals and the two corners closing the
/// ring; bias fields fill the diagonal. For Heisenberg rings the ZZ term adds
/// `-(J_{k-1,k} + J_{k,k+1})` to diagonal entry `k` (up to a multiple of the
/// identity, which does not affect transfer probabilities).
pub fn build_single_excitation_hamiltonian(
    ring: &SpinRingSpec,
    ctrl: &BiasController,
) -> Result<DMatrix<f64>> {
    ensure!(
        ctrl.bias.len() == ring.spins(),
        "bias vector has {} entries for a ring of {} spins",
        ctrl.bias.len(),
        ring.spins()
    );
    let m = ring.spins();
    let mut h = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&ctrl.bias));
    let eps = ring.coupling().epsilon();
    for (a, &j) in ring.couplings().iter().enumerate() {
        let b = ring.partner(a);
        h[(a, b)] += j;
        h[(b, a)] += j;
        if eps != 0.0 {
            h[(a, a)] -= eps * j;
            h[(b, b)] -= eps * j;
        }
    }
    debug_assert_eq!(h.nrows(), m);
    Ok(h)
}

/// `dH/dθ` for a coupling or bias parameter.
pub fn parameter_derivative(ring: &SpinRingSpec, param: Parameter) -> Result<DMatrix<f64>> {
    let m = ring.spins();
    let mut g = DMatrix::zeros(m, m);
    match param {
        Parameter::Bias(k) => {
            ensure!(k < m, "bias index {k} out of range for {m} spins");
            g[(k, k)] = 1.0;
        }
        Parameter::Coupling(k) => {
            ensure!(k < m, "coupling index {k} out of range for {m} spins");
            let b = ring.partner(k);
            g[(k, b)] = 1.0;
            g[(b, k)] = 1.0;
            let eps = ring.coupling().epsilon();
            if eps != 0.0 {
                g[(k, k)] -= eps;
                g[(b, b)] -= eps;
            }
        }
    }
    Ok(g)
}
