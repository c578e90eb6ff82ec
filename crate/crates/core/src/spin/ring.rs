use std::fmt;

use crate::error::{ensure, Result};

/// Nearest-neighbour coupling type of the ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Coupling {
    /// XX coupling (no ZZ term).
    #[default]
    Xx,
    /// Heisenberg coupling (XX plus an equal ZZ term).
    Heisenberg,
}

impl Coupling {
    /// Weight of the ZZ term: 0 for XX, 1 for Heisenberg.
    pub fn epsilon(self) -> f64 {
        match self {
            Coupling::Xx => 0.0,
            Coupling::Heisenberg => 1.0,
        }
    }

    pub fn from_epsilon(epsilon: f64) -> Result<Self> {
        if epsilon == 0.0 {
            Ok(Coupling::Xx)
        } else if epsilon == 1.0 {
            Ok(Coupling::Heisenberg)
        } else {
            Err(crate::Error::contract(format!(
                "epsilon must be 0 or 1, got {epsilon}"
            )))
        }
    }
}

/// A ring of `M >= 3` spins. `couplings[m]` couples spin `m` to spin `m + 1`
/// (0-based), with the last entry closing the ring back onto spin 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinRingSpec {
    couplings: Vec<f64>,
    coupling: Coupling,
}

impl SpinRingSpec {
    pub fn new(couplings: Vec<f64>, coupling: Coupling) -> Result<Self> {
        ensure!(
            couplings.len() >= 3,
            "a ring needs at least 3 spins, got {}",
            couplings.len()
        );
        ensure!(
            couplings.iter().all(|j| j.is_finite()),
            "couplings must be finite"
        );
        Ok(Self {
            couplings,
            coupling,
        })
    }

    /// Ring of `spins` spins with every coupling equal to 1.
    pub fn uniform(spins: usize, coupling: Coupling) -> Result<Self> {
        Self::new(vec![1.0; spins], coupling)
    }

    pub fn spins(&self) -> usize {
        self.couplings.len()
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    /// Spin index on the other side of coupling `m`.
    pub fn partner(&self, m: usize) -> usize {
        (m + 1) % self.spins()
    }

    /// Copy of the ring with coupling `m` replaced.
    pub fn with_coupling(&self, m: usize, value: f64) -> Self {
        let mut ring = self.clone();
        ring.couplings[m] = value;
        ring
    }

    /// Largest admissible target site, `ceil(M / 2)`, for transfers out of site 1.
    pub fn max_target(&self) -> usize {
        self.spins().div_ceil(2)
    }
}

/// A spin site, 1-based as in the usual `|1>, ..., |M>` labelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site(usize);

impl Site {
    pub fn new(label: usize) -> Result<Self> {
        ensure!(label >= 1, "site labels start at 1");
        Ok(Site(label))
    }

    pub fn label(self) -> usize {
        self.0
    }

    /// 0-based position in the single-excitation basis.
    pub fn index(self) -> usize {
        self.0 - 1
    }

    pub(crate) fn check(self, ring: &SpinRingSpec) -> Result<()> {
        ensure!(
            self.0 <= ring.spins(),
            "site {} outside a ring of {} spins",
            self.0,
            ring.spins()
        );
        Ok(())
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Time-invariant diagonal bias fields plus the readout time.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasController {
    pub bias: Vec<f64>,
    pub t_f: f64,
    /// Averaging window width around `t_f`, if the windowed fidelity is used.
    pub window: Option<f64>,
}

impl BiasController {
    pub fn new(bias: Vec<f64>, t_f: f64) -> Self {
        Self {
            bias,
            t_f,
            window: None,
        }
    }

    pub fn with_window(mut self, width: f64) -> Self {
        self.window = Some(width);
        self
    }

    pub fn validate(&self, ring: &SpinRingSpec) -> Result<()> {
        ensure!(
            self.bias.len() == ring.spins(),
            "bias vector has {} entries for a ring of {} spins",
            self.bias.len(),
            ring.spins()
        );
        ensure!(
            self.bias.iter().all(|d| d.is_finite()),
            "bias fields must be finite"
        );
        ensure!(
            self.t_f.is_finite() && self.t_f >= 0.0,
            "readout time must be finite and non-negative, got {}",
            self.t_f
        );
        if let Some(w) = self.window {
            ensure!(w > 0.0 && w.is_finite(), "window width must be positive");
            ensure!(
                self.t_f - w / 2.0 >= 0.0,
                "window [{}, {}] starts before t = 0",
                self.t_f - w / 2.0,
                self.t_f + w / 2.0
            );
        }
        Ok(())
    }
}

/// A Hamiltonian parameter that transfer probability can be differentiated by.
/// Indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parameter {
    /// `J_{m,m+1}`.
    Coupling(usize),
    /// `D_m`.
    Bias(usize),
}
