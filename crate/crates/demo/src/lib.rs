//! WebAssembly bindings for the static page in `www/`.
//!
//! Three entry points: a transfer-probability curve for a biased ring, the
//! power curve of the right-tailed trend test, and a Kendall/JT trend test on
//! pasted data. Errors become JS exceptions carrying the core error message.

use landscape_core::spin::{transfer_metrics, BiasController, Coupling, Site, SpinRingSpec};
use landscape_core::stats::{jt_test, kendall_tau, partition_uniform, power_curve as core_power_curve, RankedSample, Tail};
use wasm_bindgen::prelude::*;

fn js(e: landscape_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn coupling(heisenberg: bool) -> Coupling {
    if heisenberg {
        Coupling::Heisenberg
    } else {
        Coupling::Xx
    }
}

/// `prob(t)` for `|1> -> |out>` on a uniform ring at `steps + 1` times in `[0, t_max]`.
#[wasm_bindgen]
pub fn transfer_curve(bias: Vec<f64>, out: usize, heisenberg: bool, t_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    let ring = SpinRingSpec::uniform(bias.len(), coupling(heisenberg)).map_err(js)?;
    let (from, to) = (Site::new(1).map_err(js)?, Site::new(out).map_err(js)?);
    let steps = steps.max(1);
    (0..=steps)
        .map(|i| {
            let ctrl = BiasController::new(bias.clone(), t_max * i as f64 / steps as f64);
            transfer_metrics(&ring, &ctrl, from, to).map(|m| m.prob).map_err(js)
        })
        .collect()
}

/// Power at `steps + 1` equally spaced shifts in `[0, mu_max]`.
#[wasm_bindgen]
pub fn power_curve(alpha: f64, mu_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    Ok(core_power_curve(alpha, mu_max, steps).map_err(js)?.into_iter().map(|p| p.power).collect())
}

/// `[tau, tau_p, jt_z, jt_p]` for the right-tailed tests; pairs need not be sorted.
#[wasm_bindgen]
pub fn trend_test(x: Vec<f64>, y: Vec<f64>, bins: usize) -> Result<Vec<f64>, JsError> {
    if x.len() != y.len() {
        return Err(JsError::new("x and y differ in length"));
    }
    let sample = RankedSample::from_unsorted(x.into_iter().zip(y).collect()).map_err(js)?;
    let tau = kendall_tau(&sample, Tail::Right, 0.05).map_err(js)?;
    let groups = partition_uniform(&sample, bins).map_err(js)?;
    let jt = jt_test(&groups, Tail::Right, 0.05).map_err(js)?;
    Ok(vec![tau.statistic, tau.p, jt.z, jt.p])
}
