mod common;

use common::*;
use landscape_core::spin::{
    analytic_gradient, build_single_excitation_hamiltonian, evolve, full_hamiltonian_oracle,
    transfer_metrics, windowed_fidelity, BiasController, Coupling, Parameter, Site, SpinRingSpec,
};
use nalgebra::Complex;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn evolution_matches_pade_exponential() {
    let mut r = rng(1);
    for _ in 0..200 {
        let m = r.random_range(3..=9);
        let inst = instance(&mut r, m, 10.0, (0.0, 20.0));
        let h = build_single_excitation_hamiltonian(&inst.ring, &inst.ctrl).unwrap();
        let psi = evolve(&h, inst.ctrl.t_f, &basis(m, inst.from)).unwrap();
        let oracle = evolve_pade(&h, inst.ctrl.t_f, inst.from);
        for (a, b) in psi.amplitudes().iter().zip(&oracle) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }
}

#[test]
fn phase_minimises_projective_distance() {
    let mut r = rng(2);
    for _ in 0..100 {
        let m = r.random_range(3..=7);
        let inst = instance(&mut r, m, 5.0, (0.1, 10.0));
        let h = build_single_excitation_hamiltonian(&inst.ring, &inst.ctrl).unwrap();
        let psi = evolve_pade(&h, inst.ctrl.t_f, inst.from);
        let met = transfer_metrics(&inst.ring, &inst.ctrl, inst.from, inst.to).unwrap();
        let dist2 = |phi: f64| {
            let rot = Complex::from_polar(1.0, phi);
            (0..m)
                .map(|k| {
                    let e = if k == inst.to.index() { 1.0 } else { 0.0 };
                    (Complex::new(e, 0.0) - rot * psi[k]).norm_sqr()
                })
                .sum::<f64>()
        };
        let at_phase = dist2(met.phase);
        let grid_min = (0..3600)
            .map(|i| dist2(i as f64 * std::f64::consts::TAU / 3600.0))
            .fold(f64::INFINITY, f64::min);
        assert!(at_phase <= grid_min + 1e-12);
        assert!((at_phase - 2.0 * met.err * met.err).abs() < 1e-12);
    }
}

fn central_difference(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = 1e-5 * x.abs().max(1.0);
    (f(x + h) - f(x - h)) / (2.0 * h)
}

#[test]
fn gradients_match_finite_differences() {
    let mut r = rng(3);
    for _ in 0..60 {
        let m = r.random_range(3..=8);
        let inst = instance(&mut r, m, 5.0, (0.1, 5.0));
        let prob = |ring: &SpinRingSpec, ctrl: &BiasController| {
            transfer_metrics(ring, ctrl, inst.from, inst.to).unwrap().prob
        };
        for k in 0..m {
            let fd = central_difference(
                |v| prob(&inst.ring.with_coupling(k, v), &inst.ctrl),
                inst.ring.couplings()[k],
            );
            let an = analytic_gradient(&inst.ring, &inst.ctrl, inst.from, inst.to, Parameter::Coupling(k)).unwrap();
            assert!((an - fd).abs() <= 1e-6 * fd.abs() + 1e-9, "J_{k}: {an} vs {fd}");

            let fd = central_difference(
                |v| {
                    let mut c = inst.ctrl.clone();
                    c.bias[k] = v;
                    prob(&inst.ring, &c)
                },
                inst.ctrl.bias[k],
            );
            let an = analytic_gradient(&inst.ring, &inst.ctrl, inst.from, inst.to, Parameter::Bias(k)).unwrap();
            assert!((an - fd).abs() <= 1e-6 * fd.abs() + 1e-9, "D_{k}: {an} vs {fd}");
        }
    }
}

#[test]
fn degenerate_spectrum_gradient() {
    // uniform unbiased rings have doubly degenerate levels
    let ring = SpinRingSpec::uniform(6, Coupling::Xx).unwrap();
    let ctrl = BiasController::new(vec![0.0; 6], 1.3);
    let (a, b) = (Site::new(1).unwrap(), Site::new(3).unwrap());
    for k in 0..6 {
        let an = analytic_gradient(&ring, &ctrl, a, b, Parameter::Coupling(k)).unwrap();
        let fd = central_difference(
            |v| transfer_metrics(&ring.with_coupling(k, v), &ctrl, a, b).unwrap().prob,
            1.0,
        );
        assert!((an - fd).abs() <= 1e-6 * fd.abs() + 1e-9, "{an} vs {fd}");
    }
}

#[test]
fn reduced_model_matches_full_space() {
    let mut r = rng(4);
    for m in 3..=5 {
        for coupling in [Coupling::Xx, Coupling::Heisenberg] {
            let j = (0..m).map(|_| r.random_range(0.5..1.5)).collect();
            let ring = SpinRingSpec::new(j, coupling).unwrap();
            let ctrl = BiasController::new((0..m).map(|_| r.random_range(0.0..5.0)).collect(), 0.0);
            let full = full_hamiltonian_oracle(&ring, &ctrl).unwrap();
            let from = Site::new(1).unwrap();
            for out in 1..=m {
                let to = Site::new(out).unwrap();
                let times: Vec<f64> = (0..50).map(|_| r.random_range(0.0..20.0)).collect();
                let full_p = full.transfer_probabilities(from, to, &times);
                for (&t, fp) in times.iter().zip(full_p) {
                    let c = BiasController { t_f: t, ..ctrl.clone() };
                    let p = transfer_metrics(&ring, &c, from, to).unwrap().prob;
                    assert!((p - fp).abs() < 1e-10, "M={m} {coupling:?} out={out} t={t}: {p} vs {fp}");
                }
            }
        }
    }
}

#[test]
fn windowed_fidelity_against_fine_trapezoid() {
    let mut r = rng(5);
    for _ in 0..20 {
        let inst = instance(&mut r, 5, 5.0, (1.0, 10.0));
        let ctrl = inst.ctrl.clone().with_window(0.1);
        let h = build_single_excitation_hamiltonian(&inst.ring, &ctrl).unwrap();
        let n = 4000;
        let w = 0.1;
        let f = |t: f64| evolve_pade(&h, t, inst.from)[inst.to.index()].norm();
        let mut sum = 0.5 * (f(ctrl.t_f - w / 2.0) + f(ctrl.t_f + w / 2.0));
        for i in 1..n {
            sum += f(ctrl.t_f - w / 2.0 + w * i as f64 / n as f64);
        }
        let oracle = sum / n as f64;
        let got = windowed_fidelity(&inst.ring, &ctrl, inst.from, inst.to).unwrap();
        assert!((got - oracle).abs() < 1e-7, "{got} vs {oracle}");
    }
}

fn ring_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64, bool, usize)> {
    (3usize..=8).prop_flat_map(|m| {
        (
            prop::collection::vec(0.3f64..2.0, m),
            prop::collection::vec(0.0f64..10.0, m),
            0.0f64..15.0,
            any::<bool>(),
            1..=m,
        )
    })
}

fn build(j: Vec<f64>, d: Vec<f64>, t: f64, heis: bool) -> (SpinRingSpec, BiasController) {
    let c = if heis { Coupling::Heisenberg } else { Coupling::Xx };
    (SpinRingSpec::new(j, c).unwrap(), BiasController::new(d, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn evolution_preserves_norm((j, d, t, heis, _) in ring_strategy()) {
        let (ring, ctrl) = build(j, d, t, heis);
        let h = build_single_excitation_hamiltonian(&ring, &ctrl).unwrap();
        let psi = evolve(&h, t, &basis(ring.spins(), Site::new(1).unwrap())).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one((j, d, t, heis, _) in ring_strategy()) {
        let (ring, ctrl) = build(j, d, t, heis);
        let from = Site::new(1).unwrap();
        let total: f64 = (1..=ring.spins())
            .map(|k| transfer_metrics(&ring, &ctrl, from, Site::new(k).unwrap()).unwrap().prob)
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ring_reflection_symmetry((j, d, t, heis, out) in ring_strategy()) {
        let m = j.len();
        // k -> -k mod M fixes site 1 and maps coupling k to M-1-k
        let j_ref: Vec<f64> = (0..m).map(|k| j[(m - 1 - k) % m]).collect();
        let d_ref: Vec<f64> = (0..m).map(|k| d[(m - k) % m]).collect();
        let (ring, ctrl) = build(j, d, t, heis);
        let (ring_r, ctrl_r) = build(j_ref, d_ref, t, heis);
        let from = Site::new(1).unwrap();
        let out_r = Site::new((m - (out - 1)) % m + 1).unwrap();
        let p = transfer_metrics(&ring, &ctrl, from, Site::new(out).unwrap()).unwrap().prob;
        let q = transfer_metrics(&ring_r, &ctrl_r, from, out_r).unwrap().prob;
        prop_assert!((p - q).abs() < 1e-10);
    }

    #[test]
    fn energy_time_scaling((j, d, t, heis, out) in ring_strategy(), lambda in 0.2f64..5.0) {
        let (ring, ctrl) = build(j.clone(), d.clone(), t, heis);
        let (ring_s, ctrl_s) = build(
            j.iter().map(|v| v * lambda).collect(),
            d.iter().map(|v| v * lambda).collect(),
            t / lambda,
            heis,
        );
        let (from, to) = (Site::new(1).unwrap(), Site::new(out).unwrap());
        let p = transfer_metrics(&ring, &ctrl, from, to).unwrap().prob;
        let q = transfer_metrics(&ring_s, &ctrl_s, from, to).unwrap().prob;
        prop_assert!((p - q).abs() < 1e-9);
    }

    #[test]
    fn err_identity_holds((j, d, t, heis, out) in ring_strategy()) {
        let (ring, ctrl) = build(j, d, t, heis);
        let m = transfer_metrics(&ring, &ctrl, Site::new(1).unwrap(), Site::new(out).unwrap()).unwrap();
        prop_assert!((0.0..=1.0).contains(&m.prob));
        prop_assert!((m.err.powi(2) - (1.0 - m.prob.sqrt())).abs() < 1e-15);
        prop_assert!(m.x() >= 0.0);
    }

    #[test]
    fn global_bias_shift_is_a_phase((j, d, t, heis, out) in ring_strategy(), shift in -5.0f64..5.0) {
        let (ring, ctrl) = build(j, d.clone(), t, heis);
        let shifted = BiasController::new(d.iter().map(|v| v + shift).collect(), t);
        let (from, to) = (Site::new(1).unwrap(), Site::new(out).unwrap());
        let p = transfer_metrics(&ring, &ctrl, from, to).unwrap().prob;
        let q = transfer_metrics(&ring, &shifted, from, to).unwrap().prob;
        prop_assert!((p - q).abs() < 1e-10);
    }
}
