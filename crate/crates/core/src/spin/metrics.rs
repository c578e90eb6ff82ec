use nalgebra::{Complex, DMatrix};

use super::evolution::{Spectrum, C64};
use super::hamiltonian::build_single_excitation_hamiltonian;
use super::ring::{BiasController, Parameter, SpinRingSpec, Site};
use crate::error::{ensure, Result};

/// Records with `1 - prob` below this are excluded from log-sensitivity statistics.
pub const PROB_CLAMP: f64 = 1e-12;

/// Eigenvalue pairs closer than this fraction of `‖H‖` are treated as degenerate.
pub const DEGENERACY_RTOL: f64 = 1e-9;

pub const DEFAULT_WINDOW_NODES: usize = 33;

/// Transfer figures of merit for one controller at its readout time.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMetrics {
    /// `|<out|Ψ(t_f)>|^2`.
    pub prob: f64,
    /// `sqrt(1 - |<out|Ψ(t_f)>|)`.
    pub err: f64,
    /// `-arg <out|Ψ(t_f)>`.
    pub phase: f64,
    /// `∂prob/∂J_{m,m+1}` for every coupling.
    pub dprob_dj: Vec<f64>,
    /// `½ log Σ_m |∂prob/∂J_m / (1 - prob)|^2`; NaN when clamped, `-inf` when
    /// every derivative vanishes.
    pub logsens: f64,
}

impl TransferMetrics {
    /// The statistical error variable `1 - prob`.
    pub fn x(&self) -> f64 {
        1.0 - self.prob
    }

    /// `‖∂prob/∂J‖₂`, the unnormalised sensitivity.
    pub fn sens_norm(&self) -> f64 {
        self.dprob_dj.iter().map(|g| g * g).sum::<f64>().sqrt()
    }

    /// True when the log-sensitivity is unusable (clamped or `-inf`).
    pub fn is_degenerate(&self) -> bool {
        !self.logsens.is_finite()
    }
}

/// `y = ½ log Σ_m |dprob_dJ[m] / (1 - prob)|^2`, or NaN if `1 - prob` is below [`PROB_CLAMP`].
pub fn log_sensitivity(metrics: &TransferMetrics) -> f64 {
    log_sensitivity_of(metrics.prob, &metrics.dprob_dj)
}

fn log_sensitivity_of(prob: f64, dprob_dj: &[f64]) -> f64 {
    let gap = 1.0 - prob;
    if gap < PROB_CLAMP {
        return f64::NAN;
    }
    let sum: f64 = dprob_dj.iter().map(|g| (g / gap).powi(2)).sum();
    0.5 * sum.ln()
}

/// Spectral data for one `(ring, controller, in, out)` transfer, from which
/// the amplitude `<out|exp(-i(H+D)t)|in>` and its parameter derivatives are
/// evaluated at any time.
#[derive(Debug, Clone)]
pub struct TransferKernel {
    ring: SpinRingSpec,
    spectrum: Spectrum,
    /// `V[out, k]`
    out_row: Vec<f64>,
    /// `V[in, k]`
    in_row: Vec<f64>,
    degeneracy_tol: f64,
}

impl TransferKernel {
    pub fn new(ring: &SpinRingSpec, ctrl: &BiasController, from: Site, to: Site) -> Result<Self> {
        from.check(ring)?;
        to.check(ring)?;
        ctrl.validate(ring)?;
        let h = build_single_excitation_hamiltonian(ring, ctrl)?;
        let spectrum = Spectrum::new(&h)?;
        let out_row = spectrum.vectors.row(to.index()).iter().copied().collect();
        let in_row = spectrum.vectors.row(from.index()).iter().copied().collect();
        let degeneracy_tol = DEGENERACY_RTOL * spectrum.norm();
        Ok(Self {
            ring: ring.clone(),
            spectrum,
            out_row,
            in_row,
            degeneracy_tol,
        })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn ring(&self) -> &SpinRingSpec {
        &self.ring
    }

    /// `<out| exp(-i(H+D)t) |in>`.
    pub fn amplitude(&self, t: f64) -> C64 {
        self.spectrum
            .values
            .iter()
            .enumerate()
            .map(|(k, &l)| Complex::from_polar(self.out_row[k] * self.in_row[k], -l * t))
            .sum()
    }

    /// `d/dt <out| exp(-i(H+D)t) |in>`.
    pub fn amplitude_rate(&self, t: f64) -> C64 {
        self.spectrum
            .values
            .iter()
            .enumerate()
            .map(|(k, &l)| {
                Complex::new(0.0, -l) * Complex::from_polar(self.out_row[k] * self.in_row[k], -l * t)
            })
            .sum()
    }

    /// Divided differences of `λ ↦ exp(-iλt)` over the spectrum:
    /// `Γ_kl = -i t exp(-i t (λ_k+λ_l)/2) sinc(t (λ_k-λ_l)/2)`, which is
    /// `(e^{-iλ_k t} - e^{-iλ_l t}) / (λ_k - λ_l)` off the diagonal and
    /// `-i t e^{-iλ_k t}` on it (and for degenerate pairs).
    pub fn divided_differences(&self, t: f64) -> DMatrix<C64> {
        let n = self.spectrum.dim();
        let lam = &self.spectrum.values;
        DMatrix::from_fn(n, n, |k, l| {
            let mut gap = lam[k] - lam[l];
            if gap.abs() < self.degeneracy_tol {
                gap = 0.0;
            }
            let mean = 0.5 * (lam[k] + lam[l]);
            let half = 0.5 * gap * t;
            let sinc = if half == 0.0 { 1.0 } else { half.sin() / half };
            Complex::new(0.0, -t) * Complex::from_polar(sinc, -mean * t)
        })
    }

    /// `u_k (Vᵀ ∂H/∂θ V)_kl w_l` with `u = V[out, ·]` and `w = V[in, ·]`, so that
    /// `∂amplitude/∂θ = Σ_kl weights_kl Γ_kl(t)`.
    pub fn derivative_weights(&self, param: Parameter) -> Result<DMatrix<f64>> {
        let m = self.ring.spins();
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(4);
        match param {
            Parameter::Bias(a) => {
                ensure!(a < m, "bias index {a} out of range");
                entries.push((a, a, 1.0));
            }
            Parameter::Coupling(a) => {
                ensure!(a < m, "coupling index {a} out of range");
                let b = self.ring.partner(a);
                entries.push((a, b, 1.0));
                entries.push((b, a, 1.0));
                let eps = self.ring.coupling().epsilon();
                if eps != 0.0 {
                    entries.push((a, a, -eps));
                    entries.push((b, b, -eps));
                }
            }
        }
        let v = &self.spectrum.vectors;
        Ok(DMatrix::from_fn(m, m, |k, l| {
            let a_kl: f64 = entries.iter().map(|&(r, c, g)| g * v[(r, k)] * v[(c, l)]).sum();
            self.out_row[k] * a_kl * self.in_row[l]
        }))
    }

    /// `∂prob/∂θ` at time `t` for each weight matrix from [`Self::derivative_weights`].
    pub fn prob_gradient(&self, t: f64, weights: &[DMatrix<f64>]) -> Vec<f64> {
        let amp = self.amplitude(t);
        let gamma = self.divided_differences(t);
        weights
            .iter()
            .map(|w| {
                let da: C64 = w.iter().zip(gamma.iter()).map(|(&b, &g)| g * b).sum();
                2.0 * (amp.conj() * da).re
            })
            .collect()
    }

    /// `∂|amplitude|/∂θ` at time `t`; zero where the amplitude vanishes.
    pub fn modulus_gradient(&self, t: f64, weights: &[DMatrix<f64>]) -> (f64, Vec<f64>) {
        let amp = self.amplitude(t);
        let modulus = amp.norm();
        let gamma = self.divided_differences(t);
        let grads = weights
            .iter()
            .map(|w| {
                if modulus < 1e-300 {
                    return 0.0;
                }
                let da: C64 = w.iter().zip(gamma.iter()).map(|(&b, &g)| g * b).sum();
                (amp.conj() * da).re / modulus
            })
            .collect();
        (modulus, grads)
    }

    pub fn coupling_weights(&self) -> Vec<DMatrix<f64>> {
        (0..self.ring.spins())
            .map(|m| self.derivative_weights(Parameter::Coupling(m)).expect("index in range"))
            .collect()
    }

    pub fn bias_weights(&self) -> Vec<DMatrix<f64>> {
        (0..self.ring.spins())
            .map(|m| self.derivative_weights(Parameter::Bias(m)).expect("index in range"))
            .collect()
    }
}

/// Probability, projective error, phase, coupling sensitivities and
/// log-sensitivity of the transfer `from → to` at the controller's readout time.
pub fn transfer_metrics(
    ring: &SpinRingSpec,
    ctrl: &BiasController,
    from: Site,
    to: Site,
) -> Result<TransferMetrics> {
    let kernel = TransferKernel::new(ring, ctrl, from, to)?;
    Ok(metrics_from_kernel(&kernel, ctrl.t_f))
}

pub(crate) fn metrics_from_kernel(kernel: &TransferKernel, t_f: f64) -> TransferMetrics {
    let amp = kernel.amplitude(t_f);
    let prob = amp.norm_sqr().clamp(0.0, 1.0);
    let err = (1.0 - prob.sqrt()).max(0.0).sqrt();
    let phase = -amp.arg();
    let dprob_dj = kernel.prob_gradient(t_f, &kernel.coupling_weights());
    let logsens = log_sensitivity_of(prob, &dprob_dj);
    TransferMetrics {
        prob,
        err,
        phase,
        dprob_dj,
        logsens,
    }
}

/// `∂prob/∂θ` at the controller's readout time.
pub fn analytic_gradient(
    ring: &SpinRingSpec,
    ctrl: &BiasController,
    from: Site,
    to: Site,
    param: Parameter,
) -> Result<f64> {
    let kernel = TransferKernel::new(ring, ctrl, from, to)?;
    let w = kernel.derivative_weights(param)?;
    Ok(kernel.prob_gradient(ctrl.t_f, &[w])[0])
}

/// Node offsets (relative to `t_f`) and weights of the composite Simpson rule
/// for `(1/δt) ∫ f dt` over `[t_f - δt/2, t_f + δt/2]`.
pub fn simpson_rule(width: f64, nodes: usize) -> Result<Vec<(f64, f64)>> {
    ensure!(
        nodes >= 3 && nodes % 2 == 1,
        "Simpson quadrature needs an odd node count >= 3, got {nodes}"
    );
    let h = width / (nodes - 1) as f64;
    Ok((0..nodes)
        .map(|i| {
            let coeff = if i == 0 || i == nodes - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            (-0.5 * width + i as f64 * h, coeff * h / 3.0 / width)
        })
        .collect())
}

/// Window-averaged fidelity `(1/δt) ∫ |<out|Ψ(t)>| dt` around `t_f`.
pub fn windowed_fidelity(
    ring: &SpinRingSpec,
    ctrl: &BiasController,
    from: Site,
    to: Site,
) -> Result<f64> {
    windowed_fidelity_with_nodes(ring, ctrl, from, to, DEFAULT_WINDOW_NODES)
}

pub fn windowed_fidelity_with_nodes(
    ring: &SpinRingSpec,
    ctrl: &BiasController,
    from: Site,
    to: Site,
    nodes: usize,
) -> Result<f64> {
    let width = ctrl
        .window
        .ok_or_else(|| crate::Error::contract("windowed fidelity needs a window width"))?;
    let kernel = TransferKernel::new(ring, ctrl, from, to)?;
    let rule = simpson_rule(width, nodes)?;
    Ok(rule
        .iter()
        .map(|&(dt, w)| w * kernel.amplitude(ctrl.t_f + dt).norm())
        .sum())
}
