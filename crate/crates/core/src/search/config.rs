use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{ensure, Error, Result};

/// What the local search maximises.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Objective {
    /// `prob = |<out|Ψ(t_f)>|²`.
    #[default]
    Instantaneous,
    /// Mean of `|<out|Ψ(t)>|` over `[t_f - δt/2, t_f + δt/2]`.
    Windowed { width: f64 },
}

impl Objective {
    pub const DEFAULT_WINDOW: f64 = 0.1;

    pub fn window(self) -> Option<f64> {
        match self {
            Objective::Instantaneous => None,
            Objective::Windowed { width } => Some(width),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Instantaneous => f.write_str("inst"),
            Objective::Windowed { width } => write!(f, "window:{width}"),
        }
    }
}

/// `inst`, `window` (default width) or `window:<δt>`.
impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "inst" || s == "instantaneous" => Ok(Objective::Instantaneous),
            None if s == "window" || s == "windowed" => Ok(Objective::Windowed {
                width: Self::DEFAULT_WINDOW,
            }),
            Some(("window" | "windowed", w)) => {
                let width: f64 = w
                    .parse()
                    .map_err(|_| Error::contract(format!("bad window width '{w}'")))?;
                ensure!(width > 0.0 && width.is_finite(), "window width must be positive");
                Ok(Objective::Windowed { width })
            }
            _ => Err(Error::contract(format!(
                "unknown objective '{s}' (expected inst or window:<width>)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub n_tasks: usize,
    /// Box for every bias field `D_m`.
    pub d_bounds: (f64, f64),
    /// Box for `t_f`; `None` means `[0, 5M]`.
    pub t_bounds: Option<(f64, f64)>,
    pub error_cutoff: f64,
    pub seed: u64,
    pub objective: Objective,
    pub max_iterations: usize,
    /// Stop once the projected gradient's max-norm falls below this.
    pub gradient_tolerance: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            n_tasks: 2000,
            d_bounds: (0.0, 10.0),
            t_bounds: None,
            error_cutoff: 0.1,
            seed: 0,
            objective: Objective::Instantaneous,
            max_iterations: 200,
            gradient_tolerance: 1e-8,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.n_tasks >= 1, "need at least one task");
        check_interval("bias", self.d_bounds)?;
        if let Some(t) = self.t_bounds {
            check_interval("time", t)?;
            ensure!(t.0 >= 0.0, "time bounds must be non-negative");
        }
        ensure!(
            self.error_cutoff > 0.0 && self.error_cutoff < 1.0,
            "error cutoff must lie in (0, 1), got {}",
            self.error_cutoff
        );
        ensure!(self.max_iterations >= 1, "need at least one iteration");
        ensure!(
            self.gradient_tolerance > 0.0 && self.gradient_tolerance.is_finite(),
            "gradient tolerance must be positive"
        );
        if let Objective::Windowed { width } = self.objective {
            ensure!(width > 0.0 && width.is_finite(), "window width must be positive");
        }
        Ok(())
    }

    /// Time box actually searched on an `spins`-ring. A windowed objective
    /// needs `t_f ≥ δt/2`, so the lower end is raised accordingly.
    pub fn time_bounds(&self, spins: usize) -> Result<(f64, f64)> {
        let (lo, hi) = self.t_bounds.unwrap_or((0.0, 5.0 * spins as f64));
        let lo = match self.objective.window() {
            Some(w) => lo.max(w / 2.0),
            None => lo,
        };
        ensure!(lo <= hi, "time box [{lo}, {hi}] is empty once the window is accounted for");
        Ok((lo, hi))
    }

    /// Stable `key=value` lines describing every field, used for archives and hashing.
    pub fn canonical(&self) -> Vec<(&'static str, String)> {
        let t = match self.t_bounds {
            Some((lo, hi)) => format!("{lo:?}:{hi:?}"),
            None => "auto".to_string(),
        };
        vec![
            ("tasks", self.n_tasks.to_string()),
            ("d_bounds", format!("{:?}:{:?}", self.d_bounds.0, self.d_bounds.1)),
            ("t_bounds", t),
            ("cutoff", format!("{:?}", self.error_cutoff)),
            ("seed", self.seed.to_string()),
            ("objective", self.objective.to_string()),
            ("max_iterations", self.max_iterations.to_string()),
            ("gradient_tolerance", format!("{:?}", self.gradient_tolerance)),
        ]
    }

    /// Hex SHA-256 of [`Self::canonical`].
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.canonical() {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Inverse of [`Self::canonical`]; unknown keys are an error.
    pub fn from_canonical<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut cfg = SearchConfig::default();
        for (k, v) in pairs {
            let bad = || Error::contract(format!("bad value '{v}' for config key '{k}'"));
            match k {
                "tasks" => cfg.n_tasks = v.parse().map_err(|_| bad())?,
                "d_bounds" => cfg.d_bounds = parse_interval(v).ok_or_else(bad)?,
                "t_bounds" if v == "auto" => cfg.t_bounds = None,
                "t_bounds" => cfg.t_bounds = Some(parse_interval(v).ok_or_else(bad)?),
                "cutoff" => cfg.error_cutoff = v.parse().map_err(|_| bad())?,
                "seed" => cfg.seed = v.parse().map_err(|_| bad())?,
                "objective" => cfg.objective = v.parse()?,
                "max_iterations" => cfg.max_iterations = v.parse().map_err(|_| bad())?,
                "gradient_tolerance" => cfg.gradient_tolerance = v.parse().map_err(|_| bad())?,
                _ => return Err(Error::contract(format!("unknown config key '{k}'"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `lo:hi` or `lo,hi`.
pub fn parse_interval(s: &str) -> Option<(f64, f64)> {
    let (a, b) = s.split_once(':').or_else(|| s.split_once(','))?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

fn check_interval(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    ensure!(
        lo.is_finite() && hi.is_finite() && lo <= hi,
        "{name} bounds [{lo}, {hi}] are empty or not finite"
    );
    Ok(())
}
