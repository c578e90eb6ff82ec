use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Objective, SearchConfig};
use super::optimizer::{self, minimize, Options};
use crate::error::{ensure, Error, Result};
use crate::spin::metrics::{metrics_from_kernel, simpson_rule, TransferKernel, DEFAULT_WINDOW_NODES};
use crate::spin::{BiasController, Site, SpinRingSpec, TransferMetrics};

/// One retained controller of a case study.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerRecord {
    /// 1-based position after sorting by error.
    pub n: usize,
    /// Task that produced it; with the config seed this fixes its start point.
    pub task_index: usize,
    pub controller: BiasController,
    pub metrics: TransferMetrics,
    /// Error `1 - prob`.
    pub x: f64,
    /// Log-sensitivity.
    pub y: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Generated(SearchConfig),
    /// Imported table; controllers and sensitivities are placeholders.
    External { path: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub source: Source,
    pub tasks: usize,
    pub failed: usize,
    /// Converged but above the cutoff or with a degenerate log-sensitivity.
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseStudy {
    pub ring: SpinRingSpec,
    pub input: Site,
    pub output: Site,
    /// Sorted by nondecreasing `x`, with `n = 1..N`.
    pub records: Vec<ControllerRecord>,
    pub provenance: Provenance,
}

impl CaseStudy {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn is_external(&self) -> bool {
        matches!(self.provenance.source, Source::External { .. })
    }

    pub fn config(&self) -> Option<&SearchConfig> {
        match &self.provenance.source {
            Source::Generated(c) => Some(c),
            Source::External { .. } => None,
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.x).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.y).collect()
    }
}

/// Sort by `x` (task index breaks ties) and renumber `n = 1..N`.
pub fn sort_records(records: &mut [ControllerRecord]) {
    records.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.task_index.cmp(&b.task_index)));
    for (i, r) in records.iter_mut().enumerate() {
        r.n = i + 1;
    }
}

/// Outcome of one optimisation task, reported to progress hooks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskStatus {
    Retained,
    AboveCutoff,
    /// Log-sensitivity is not finite (error below the clamp, or all
    /// coupling derivatives zero).
    Degenerate,
    /// The objective became non-finite.
    Failed,
}

/// Uniform start point for task `task_index`, drawn from its own ChaCha
/// stream of `config.seed`.
pub fn sample_initial(config: &SearchConfig, spins: usize, task_index: usize) -> Result<BiasController> {
    ensure!(
        task_index < config.n_tasks,
        "task index {task_index} out of range for {} tasks",
        config.n_tasks
    );
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(task_index as u64);
    let (dlo, dhi) = config.d_bounds;
    let (tlo, thi) = config.time_bounds(spins)?;
    let bias = (0..spins).map(|_| rng.random_range(dlo..=dhi)).collect();
    let t_f = rng.random_range(tlo..=thi);
    let ctrl = BiasController::new(bias, t_f);
    Ok(match config.objective.window() {
        Some(w) => ctrl.with_window(w),
        None => ctrl,
    })
}

/// `(1 - objective, gradient)` over `(D_1..D_M, t_f)`.
struct TransferObjective<'a> {
    ring: &'a SpinRingSpec,
    from: Site,
    to: Site,
    window: Option<Vec<(f64, f64)>>,
}

impl TransferObjective<'_> {
    fn controller(&self, z: &[f64]) -> BiasController {
        let m = self.ring.spins();
        BiasController::new(z[..m].to_vec(), z[m])
    }
}

impl optimizer::Objective for TransferObjective<'_> {
    fn evaluate(&mut self, z: &[f64]) -> (f64, Vec<f64>) {
        let ctrl = self.controller(z);
        let Ok(kernel) = TransferKernel::new(self.ring, &ctrl, self.from, self.to) else {
            return (f64::NAN, vec![f64::NAN; z.len()]);
        };
        let weights = kernel.bias_weights();
        let t = ctrl.t_f;
        match &self.window {
            None => {
                let a = kernel.amplitude(t);
                let mut g: Vec<f64> = kernel.prob_gradient(t, &weights).iter().map(|v| -v).collect();
                g.push(-2.0 * (a.conj() * kernel.amplitude_rate(t)).re);
                (1.0 - a.norm_sqr(), g)
            }
            Some(rule) => {
                let mut value = 1.0;
                let mut g = vec![0.0; z.len()];
                for &(dt, w) in rule {
                    let (modulus, grads) = kernel.modulus_gradient(t + dt, &weights);
                    value -= w * modulus;
                    for (gi, d) in g.iter_mut().zip(&grads) {
                        *gi -= w * d;
                    }
                    if modulus > 1e-300 {
                        let a = kernel.amplitude(t + dt);
                        g[z.len() - 1] -= w * (a.conj() * kernel.amplitude_rate(t + dt)).re / modulus;
                    }
                }
                (value, g)
            }
        }
    }
}

/// Terminal point of one local search plus its transfer metrics at `t_f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimized {
    pub controller: BiasController,
    pub metrics: TransferMetrics,
    /// Final value of the minimised objective.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Bounded quasi-Newton descent of `1 - prob` (or `1 - windowed fidelity`)
/// over `(D, t_f)` from `initial`.
pub fn optimize_controller(
    ring: &SpinRingSpec,
    from: Site,
    to: Site,
    initial: &BiasController,
    config: &SearchConfig,
) -> Result<Optimized> {
    config.validate()?;
    initial.validate(ring)?;
    let m = ring.spins();
    let (dlo, dhi) = config.d_bounds;
    let (tlo, thi) = config.time_bounds(m)?;
    let inside = initial.bias.iter().all(|d| (dlo..=dhi).contains(d)) && (tlo..=thi).contains(&initial.t_f);
    ensure!(inside, "initial controller lies outside the search box");

    let window = match config.objective {
        Objective::Instantaneous => None,
        Objective::Windowed { width } => Some(simpson_rule(width, DEFAULT_WINDOW_NODES)?),
    };
    let objective = TransferObjective {
        ring,
        from,
        to,
        window,
    };
    let mut lower = vec![dlo; m];
    let mut upper = vec![dhi; m];
    lower.push(tlo);
    upper.push(thi);
    let mut z0 = initial.bias.clone();
    z0.push(initial.t_f);
    let opts = Options {
        max_iterations: config.max_iterations,
        gradient_tolerance: config.gradient_tolerance,
        ..Options::default()
    };
    let min = minimize(objective, &z0, &lower, &upper, opts)
        .map_err(|_| Error::Numeric("objective became non-finite during the search".into()))?;

    let mut controller = BiasController::new(min.x[..m].to_vec(), min.x[m]);
    if let Some(w) = config.objective.window() {
        controller = controller.with_window(w);
    }
    let kernel = TransferKernel::new(ring, &controller, from, to)?;
    let metrics = metrics_from_kernel(&kernel, controller.t_f);
    ensure_finite(&metrics)?;
    Ok(Optimized {
        controller,
        metrics,
        objective: min.value,
        iterations: min.iterations,
        converged: min.converged,
    })
}

fn ensure_finite(m: &TransferMetrics) -> Result<()> {
    if !m.prob.is_finite() || m.dprob_dj.iter().any(|g| !g.is_finite()) {
        return Err(Error::Numeric("non-finite transfer metrics".into()));
    }
    Ok(())
}

/// `(task_index, status)` after each task; may be called from several threads.
pub type Progress<'a> = &'a (dyn Fn(usize, TaskStatus) + Sync);

fn run_task(
    ring: &SpinRingSpec,
    from: Site,
    to: Site,
    config: &SearchConfig,
    task_index: usize,
) -> (TaskStatus, Option<ControllerRecord>) {
    let result = sample_initial(config, ring.spins(), task_index)
        .and_then(|init| optimize_controller(ring, from, to, &init, config));
    let opt = match result {
        Ok(o) => o,
        Err(e) => {
            log::debug!("task {task_index} failed: {e}");
            return (TaskStatus::Failed, None);
        }
    };
    if opt.metrics.is_degenerate() {
        return (TaskStatus::Degenerate, None);
    }
    let x = opt.metrics.x();
    if x > config.error_cutoff {
        return (TaskStatus::AboveCutoff, None);
    }
    let record = ControllerRecord {
        n: 0,
        task_index,
        y: opt.metrics.logsens,
        x,
        controller: opt.controller,
        metrics: opt.metrics,
        converged: opt.converged,
    };
    (TaskStatus::Retained, Some(record))
}

/// Runs `config.n_tasks` independent searches for the transfer `1 → out`,
/// keeps converged-or-not terminal points with error at most the cutoff and
/// a finite log-sensitivity, and sorts them by error.
///
/// The result depends only on `(ring, out, config)`, not on thread count or
/// completion order.
pub fn generate_case_study(
    ring: &SpinRingSpec,
    out: Site,
    config: &SearchConfig,
    progress: Option<Progress<'_>>,
) -> Result<CaseStudy> {
    config.validate()?;
    let from = Site::new(1)?;
    out.check(ring)?;
    ensure!(
        out.label() <= ring.max_target(),
        "out spin {} exceeds ceil(M/2) = {} for M = {}",
        out.label(),
        ring.max_target(),
        ring.spins()
    );
    config.time_bounds(ring.spins())?;

    let task = |k: usize| {
        let (status, record) = run_task(ring, from, out, config, k);
        if let Some(p) = progress {
            p(k, status);
        }
        (status, record)
    };
    #[cfg(feature = "parallel")]
    let outcomes: Vec<_> = {
        use rayon::prelude::*;
        (0..config.n_tasks).into_par_iter().map(task).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<_> = (0..config.n_tasks).map(task).collect();

    let failed = outcomes.iter().filter(|(s, _)| *s == TaskStatus::Failed).count();
    let mut records: Vec<ControllerRecord> = outcomes.into_iter().filter_map(|(_, r)| r).collect();
    let rejected = config.n_tasks - failed - records.len();
    if records.is_empty() {
        return Err(Error::EmptyStudy {
            tasks: config.n_tasks,
            failed,
            rejected,
        });
    }
    sort_records(&mut records);
    warn_duplicates(&records);
    Ok(CaseStudy {
        ring: ring.clone(),
        input: from,
        output: out,
        records,
        provenance: Provenance {
            source: Source::Generated(config.clone()),
            tasks: config.n_tasks,
            failed,
            rejected,
        },
    })
}

/// Logs controllers found by more than one task. Legal, but worth knowing.
fn warn_duplicates(records: &[ControllerRecord]) {
    let same = |a: &BiasController, b: &BiasController| {
        (a.t_f - b.t_f).abs() < 1e-6 && a.bias.iter().zip(&b.bias).all(|(p, q)| (p - q).abs() < 1e-6)
    };
    let mut dups = 0;
    for (i, a) in records.iter().enumerate() {
        for b in records[i + 1..].iter().take_while(|b| b.x - a.x <= 1e-10) {
            if same(&a.controller, &b.controller) {
                dups += 1;
                log::warn!(
                    "tasks {} and {} converged to the same controller",
                    a.task_index,
                    b.task_index
                );
            }
        }
    }
    if dups > 0 {
        log::warn!("{dups} duplicate controller pair(s) in study");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::Coupling;

    fn small_config(tasks: usize) -> SearchConfig {
        SearchConfig {
            n_tasks: tasks,
            seed: 11,
            ..Default::default()
        }
    }

    #[test]
    fn sampling_is_deterministic_and_in_bounds() {
        let cfg = small_config(50);
        for k in 0..50 {
            let a = sample_initial(&cfg, 4, k).unwrap();
            assert_eq!(a, sample_initial(&cfg, 4, k).unwrap());
            assert!(a.bias.iter().all(|d| (0.0..=10.0).contains(d)));
            assert!((0.0..=20.0).contains(&a.t_f));
        }
        assert!(sample_initial(&cfg, 4, 50).is_err());
    }

    #[test]
    fn sampled_bias_mean() {
        let cfg = small_config(10_000);
        let mean = (0..10_000)
            .map(|k| sample_initial(&cfg, 3, k).unwrap().bias[0])
            .sum::<f64>()
            / 10_000.0;
        assert!((4.8..=5.2).contains(&mean), "{mean}");
    }

    #[test]
    fn distinct_tasks_distinct_controllers() {
        let cfg = small_config(1000);
        let mut seen: Vec<Vec<u64>> = (0..1000)
            .map(|k| {
                let c = sample_initial(&cfg, 3, k).unwrap();
                c.bias.iter().chain([&c.t_f]).map(|v| v.to_bits()).collect()
            })
            .collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 1000);
    }

    #[test]
    fn windowed_sampling_respects_half_window() {
        let cfg = SearchConfig {
            objective: Objective::Windowed { width: 2.0 },
            t_bounds: Some((0.0, 1.5)),
            ..small_config(200)
        };
        for k in 0..200 {
            let c = sample_initial(&cfg, 3, k).unwrap();
            assert!(c.t_f >= 1.0);
            assert_eq!(c.window, Some(2.0));
        }
    }

    #[test]
    fn three_ring_transfer_reaches_low_error() {
        let ring = SpinRingSpec::uniform(3, Coupling::Xx).unwrap();
        let cfg = small_config(50);
        let (from, to) = (Site::new(1).unwrap(), Site::new(2).unwrap());
        let best = (0..50)
            .map(|k| {
                let init = sample_initial(&cfg, 3, k).unwrap();
                let o = optimize_controller(&ring, from, to, &init, &cfg).unwrap();
                let start = 1.0 - crate::spin::transfer_metrics(&ring, &init, from, to).unwrap().prob;
                assert!(o.objective <= start);
                o.metrics.x()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(best < 0.05, "{best}");
    }

    #[test]
    fn windowed_search_descends() {
        let ring = SpinRingSpec::uniform(4, Coupling::Xx).unwrap();
        let cfg = SearchConfig {
            objective: Objective::Windowed { width: 0.1 },
            ..small_config(5)
        };
        let (from, to) = (Site::new(1).unwrap(), Site::new(2).unwrap());
        for k in 0..5 {
            let init = sample_initial(&cfg, 4, k).unwrap();
            let f0 = 1.0 - crate::spin::windowed_fidelity(&ring, &init, from, to).unwrap();
            let o = optimize_controller(&ring, from, to, &init, &cfg).unwrap();
            assert!(o.objective <= f0);
            let f1 = 1.0 - crate::spin::windowed_fidelity(&ring, &o.controller, from, to).unwrap();
            assert!((f1 - o.objective).abs() < 1e-12);
        }
    }

    #[test]
    fn out_beyond_half_ring_is_refused() {
        let ring = SpinRingSpec::uniform(5, Coupling::Xx).unwrap();
        let r = generate_case_study(&ring, Site::new(4).unwrap(), &small_config(3), None);
        assert!(matches!(r, Err(Error::Contract(_))));
    }

    #[test]
    fn impossible_cutoff_gives_empty_study() {
        let ring = SpinRingSpec::uniform(5, Coupling::Xx).unwrap();
        let cfg = SearchConfig {
            error_cutoff: 1e-300,
            max_iterations: 3,
            ..small_config(4)
        };
        let r = generate_case_study(&ring, Site::new(3).unwrap(), &cfg, None);
        assert!(matches!(r, Err(Error::EmptyStudy { tasks: 4, .. })), "{r:?}");
    }
}
