#![allow(dead_code)]

use landscape_core::spin::{BiasController, Coupling, QuantumState, Site, SpinRingSpec};
use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C64 = Complex<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct Instance {
    pub ring: SpinRingSpec,
    pub ctrl: BiasController,
    pub from: Site,
    pub to: Site,
}

/// Random ring of `spins` spins with couplings in [0.5, 1.5], biases in
/// [0, d_max] and readout time in [t_lo, t_hi].
pub fn instance(r: &mut ChaCha8Rng, spins: usize, d_max: f64, t: (f64, f64)) -> Instance {
    let coupling = if r.random_bool(0.5) { Coupling::Xx } else { Coupling::Heisenberg };
    let j = (0..spins).map(|_| r.random_range(0.5..1.5)).collect();
    let ring = SpinRingSpec::new(j, coupling).unwrap();
    let bias = (0..spins).map(|_| r.random_range(0.0..=d_max)).collect();
    let ctrl = BiasController::new(bias, r.random_range(t.0..=t.1));
    let from = Site::new(r.random_range(1..=spins)).unwrap();
    let to = Site::new(r.random_range(1..=spins)).unwrap();
    Instance { ring, ctrl, from, to }
}

/// `exp(-i H t)` by nalgebra's Padé scaling-and-squaring, independent of
/// the eigendecomposition used by the crate.
pub fn propagator(h: &DMatrix<f64>, t: f64) -> DMatrix<C64> {
    let a = h.map(|v| Complex::new(0.0, -v * t));
    a.exp()
}

pub fn evolve_pade(h: &DMatrix<f64>, t: f64, from: Site) -> Vec<C64> {
    let u = propagator(h, t);
    u.column(from.index()).iter().copied().collect()
}

pub fn basis(dim: usize, site: Site) -> QuantumState {
    QuantumState::basis(dim, site.index())
}

/// Kendall tau-a by counting all pairs.
pub fn brute_kendall(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            let a = (x[j] - x[i]).partial_cmp(&0.0).unwrap() as i64;
            let b = (y[j] - y[i]).partial_cmp(&0.0).unwrap() as i64;
            s += a * b;
        }
    }
    s as f64 / (n * (n - 1) / 2) as f64
}

/// Jonckheere-Terpstra U by exhaustive cross-group pair counting, ties ½.
pub fn brute_jt(groups: &[Vec<f64>]) -> f64 {
    let mut u = 0.0;
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            for a in &groups[i] {
                for b in &groups[j] {
                    if a < b {
                        u += 1.0;
                    } else if a == b {
                        u += 0.5;
                    }
                }
            }
        }
    }
    u
}
