use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{ensure, Result};

pub type C64 = Complex<f64>;

const NORM_TOLERANCE: f64 = 1e-10;
const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// A normalised state in the single-excitation basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: DVector<C64>,
}

impl QuantumState {
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm();
        ensure!(
            (norm - 1.0).abs() <= NORM_TOLERANCE,
            "state norm is {norm}, expected 1"
        );
        Ok(Self { amplitudes })
    }

    /// Excitation localised on basis position `index` (0-based).
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = DVector::zeros(dim);
        amplitudes[index] = Complex::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

/// Eigendecomposition `H = V Λ Vᵀ` of a real symmetric Hamiltonian.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn new(h: &DMatrix<f64>) -> Result<Self> {
        ensure!(h.is_square(), "Hamiltonian must be square");
        let scale = h.amax().max(1.0);
        let asym = (h - h.transpose()).amax();
        ensure!(
            asym <= HERMITIAN_TOLERANCE * scale,
            "Hamiltonian is not symmetric (max asymmetry {asym:e})"
        );
        ensure!(h.iter().all(|v| v.is_finite()), "Hamiltonian has non-finite entries");
        let eig = h.clone().symmetric_eigen();
        Ok(Self {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Largest eigenvalue magnitude, i.e. the spectral norm.
    pub fn norm(&self) -> f64 {
        self.values.amax()
    }

    /// `exp(-i H t) ψ0 = V diag(exp(-i λ_k t)) Vᵀ ψ0`.
    pub fn evolve(&self, t: f64, psi0: &QuantumState) -> Result<QuantumState> {
        ensure!(
            psi0.dim() == self.dim(),
            "state has dimension {}, Hamiltonian {}",
            psi0.dim(),
            self.dim()
        );
        let v = self.vectors.map(|x| Complex::new(x, 0.0));
        let mut coeffs = v.transpose() * psi0.amplitudes();
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c *= Complex::from_polar(1.0, -self.values[k] * t);
        }
        Ok(QuantumState {
            amplitudes: v * coeffs,
        })
    }
}

/// Propagates `psi0` under `H` for time `t`.
pub fn evolve(h: &DMatrix<f64>, t: f64, psi0: &QuantumState) -> Result<QuantumState> {
    ensure!(t.is_finite() && t >= 0.0, "evolution time must be >= 0, got {t}");
    Spectrum::new(h)?.evolve(t, psi0)
}
