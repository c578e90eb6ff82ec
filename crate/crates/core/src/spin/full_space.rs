//! Brute-force Pauli-tensor model of the ring on the full `2^M` Hilbert space.
//!
//! Used only as an oracle for the single-excitation reduction, so it favours
//! a literal construction over speed and refuses rings larger than 8 spins.

use nalgebra::{Complex, DMatrix, DVector};

use super::ring::{BiasController, SpinRingSpec, Site};
use crate::error::{ensure, Result};

type C64 = Complex<f64>;

pub const MAX_ORACLE_SPINS: usize = 8;

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

fn pauli_x() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

fn pauli_y() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

fn pauli_z() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// `I ⊗ .. ⊗ s_a ⊗ .. ⊗ s_b ⊗ .. ⊗ I` with the given single-spin operators
/// placed at their sites; spin 0 is the leftmost factor.
fn pauli_string(spins: usize, ops: &[(usize, &DMatrix<C64>)]) -> DMatrix<C64> {
    let id = DMatrix::<C64>::identity(2, 2);
    let mut acc = DMatrix::<C64>::identity(1, 1);
    for site in 0..spins {
        let factor = ops
            .iter()
            .filter(|(s, _)| *s == site)
            .fold(id.clone(), |f, (_, op)| f * *op);
        acc = acc.kronecker(&factor);
    }
    acc
}

/// The full ring Hamiltonian together with the single-excitation projector.
#[derive(Debug, Clone)]
pub struct FullSpaceModel {
    spins: usize,
    pub hamiltonian: DMatrix<C64>,
    /// Orthogonal projector onto the eigenspace of `½ Σ (I + Z_m)` with eigenvalue 1.
    pub projector: DMatrix<C64>,
    /// Full-space basis index of the state whose single excited spin is site `k` (0-based).
    site_states: Vec<usize>,
}

/// Builds `½ [Σ J_m (X_m X_{m+1} + Y_m Y_{m+1} + ε Z_m Z_{m+1}) + Σ D_m Z_m]`.
///
/// The overall factor ½ makes the single-excitation block equal to the reduced
/// `H + D` up to a multiple of the identity; without it, hopping amplitudes are
/// `2J` and time runs twice as fast.
pub fn full_hamiltonian_oracle(ring: &SpinRingSpec, ctrl: &BiasController) -> Result<FullSpaceModel> {
    let m = ring.spins();
    ensure!(
        m <= MAX_ORACLE_SPINS,
        "full-space oracle refuses {m} spins (limit {MAX_ORACLE_SPINS})"
    );
    ensure!(
        ctrl.bias.len() == m,
        "bias vector has {} entries for a ring of {m} spins",
        ctrl.bias.len()
    );
    let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
    let eps = ring.coupling().epsilon();
    let dim = 1usize << m;
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for (a, &j) in ring.couplings().iter().enumerate() {
        let b = ring.partner(a);
        let mut term = pauli_string(m, &[(a, &x), (b, &x)]) + pauli_string(m, &[(a, &y), (b, &y)]);
        if eps != 0.0 {
            term += pauli_string(m, &[(a, &z), (b, &z)]) * c(eps, 0.);
        }
        h += term * c(j, 0.);
    }
    for (a, &d) in ctrl.bias.iter().enumerate() {
        h += pauli_string(m, &[(a, &z)]) * c(d, 0.);
    }
    h *= c(0.5, 0.);

    let id = DMatrix::<C64>::identity(dim, dim);
    let mut count = DMatrix::<C64>::zeros(dim, dim);
    for a in 0..m {
        count += (&id + pauli_string(m, &[(a, &z)])) * c(0.5, 0.);
    }
    // `count` is diagonal, so its unit eigenspace is spanned by basis states.
    let mut projector = DMatrix::<C64>::zeros(dim, dim);
    let mut site_states = vec![usize::MAX; m];
    for s in 0..dim {
        if (count[(s, s)].re - 1.0).abs() < 1e-12 {
            projector[(s, s)] = c(1., 0.);
            // the excited spin is the one where Z_k = +1
            let k = (0..m)
                .find(|&k| pauli_string(m, &[(k, &z)])[(s, s)].re > 0.0)
                .expect("single-excitation state has one excited spin");
            site_states[k] = s;
        }
    }
    Ok(FullSpaceModel {
        spins: m,
        hamiltonian: h,
        projector,
        site_states,
    })
}

impl FullSpaceModel {
    pub fn spins(&self) -> usize {
        self.spins
    }

    /// Basis state index for an excitation on `site`.
    pub fn site_state(&self, site: Site) -> usize {
        self.site_states[site.index()]
    }

    /// `P H P` restricted to the single-excitation subspace, in site order.
    pub fn projected_block(&self) -> DMatrix<C64> {
        let php = &self.projector * &self.hamiltonian * &self.projector;
        DMatrix::from_fn(self.spins, self.spins, |r, col| {
            php[(self.site_states[r], self.site_states[col])]
        })
    }

    /// `|<out| exp(-i H t) |in>|^2` by propagation in the full space.
    pub fn transfer_probability(&self, from: Site, to: Site, t: f64) -> f64 {
        self.transfer_probabilities(from, to, &[t])[0]
    }

    pub fn transfer_probabilities(&self, from: Site, to: Site, times: &[f64]) -> Vec<f64> {
        let eig = self.hamiltonian.clone().symmetric_eigen();
        let dim = self.hamiltonian.nrows();
        let mut psi0 = DVector::<C64>::zeros(dim);
        psi0[self.site_state(from)] = c(1., 0.);
        let coeffs = eig.eigenvectors.adjoint() * psi0;
        let out_row = eig.eigenvectors.row(self.site_state(to)).into_owned();
        times
            .iter()
            .map(|&t| {
                let amp: C64 = (0..dim)
                    .map(|k| {
                        out_row[k] * coeffs[k] * Complex::from_polar(1.0, -eig.eigenvalues[k] * t)
                    })
                    .sum();
                amp.norm_sqr()
            })
            .collect()
    }
}
