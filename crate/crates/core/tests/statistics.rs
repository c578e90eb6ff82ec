mod common;

use common::*;
use landscape_core::stats::*;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

fn random_sample(r: &mut impl Rng, n: usize, ties: bool) -> (Vec<f64>, Vec<f64>) {
    let draw = |r: &mut dyn rand::RngCore| -> f64 {
        if ties {
            r.random_range(0..8) as f64
        } else {
            StandardNormal.sample(r)
        }
    };
    let mut x: Vec<f64> = (0..n).map(|_| draw(r)).collect();
    x.sort_by(f64::total_cmp);
    let y = (0..n).map(|_| draw(r)).collect();
    (x, y)
}

#[test]
fn kendall_matches_pair_count() {
    let mut r = rng(10);
    for case in 0..100 {
        let n = r.random_range(2..=500);
        let (x, y) = random_sample(&mut r, n, case % 2 == 0);
        let got = kendall_tau(&RankedSample::new(x.clone(), y.clone()).unwrap(), Tail::Right, 0.05).unwrap();
        assert_eq!(got.statistic, brute_kendall(&x, &y), "case {case}");
    }
}

#[test]
fn jt_matches_cross_pair_count() {
    let mut r = rng(11);
    for case in 0..100 {
        let k = r.random_range(2..=8);
        let groups: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let n = r.random_range(1..=25);
                (0..n)
                    .map(|_| {
                        if case % 2 == 0 {
                            r.random_range(0..6) as f64 * 0.5
                        } else {
                            r.random::<f64>()
                        }
                    })
                    .collect()
            })
            .collect();
        assert_eq!(jt_statistic(&groups, JtVariant::Plain), brute_jt(&groups), "case {case}");
    }
}

#[test]
fn weighted_variants_match_definitions() {
    let mut r = rng(12);
    for _ in 0..50 {
        let k = r.random_range(2..=5);
        let groups: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..r.random_range(1..=10)).map(|_| r.random_range(0..12) as f64).collect())
            .collect();
        let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
        let rank = |v: f64| {
            let less = pooled.iter().filter(|&&p| p < v).count() as f64;
            let eq = pooled.iter().filter(|&&p| p == v).count() as f64;
            less + (eq + 1.0) / 2.0
        };
        let (mut spacing, mut ranked) = (0.0, 0.0);
        for i in 0..k {
            for j in i + 1..k {
                for &a in &groups[i] {
                    for &b in &groups[j] {
                        let w = (j - i) as f64;
                        if a < b {
                            spacing += w;
                            ranked += rank(b) - rank(a);
                        } else if a == b {
                            spacing += 0.5 * w;
                        }
                    }
                }
            }
        }
        let sp = jt_statistic(&groups, JtVariant::SpacingWeighted);
        let rk = jt_statistic(&groups, JtVariant::RankWeighted);
        assert!((sp - spacing).abs() < 1e-9, "{sp} vs {spacing}");
        assert!((rk - ranked).abs() < 1e-9, "{rk} vs {ranked}");
    }
}

/// Every assignment of 1..N to groups of the given sizes, by recursion.
fn enumerate(sizes: &[usize]) -> Vec<f64> {
    fn rec(remaining: &[f64], sizes: &[usize], cur: &mut Vec<Vec<f64>>, out: &mut Vec<f64>) {
        let Some((&first, rest)) = sizes.split_first() else {
            out.push(brute_jt(cur));
            return;
        };
        let n = remaining.len();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != first {
                continue;
            }
            let (pick, keep): (Vec<_>, Vec<_>) =
                (0..n).partition(|&i| mask & (1 << i) != 0);
            let rem: Vec<f64> = keep.iter().map(|&i| remaining[i]).collect();
            cur.push(pick.iter().map(|&i| remaining[i]).collect());
            rec(&rem, rest, cur, out);
            cur.pop();
        }
    }
    let n: usize = sizes.iter().sum();
    let mut out = Vec::new();
    rec(&(1..=n).map(|v| v as f64).collect::<Vec<_>>(), sizes, &mut Vec::new(), &mut out);
    out
}

#[test]
fn closed_form_moments_match_exact_null() {
    for sizes in [vec![2, 2, 2], vec![1, 3, 2], vec![3, 4], vec![2, 1, 1, 3]] {
        let all = enumerate(&sizes);
        let n = all.len() as f64;
        let mean = all.iter().sum::<f64>() / n;
        let var = all.iter().map(|u| (u - mean).powi(2)).sum::<f64>() / n;
        let (m, v) = jt_moments(&sizes);
        assert!((m - mean).abs() < 1e-9 && (v - var).abs() < 1e-9, "{sizes:?}: {m},{v} vs {mean},{var}");
    }
}

#[test]
fn power_threshold_from_quantiles() {
    // z_0.95 + z_0.80
    let expected = 1.6448536269514722 + 0.8416212335729143;
    assert!((power_threshold(0.05, 0.8).unwrap() - expected).abs() < 1e-9);
    assert!((power_threshold(0.05, 0.8).unwrap() - 2.487).abs() <= 1e-3);
    assert!((power_threshold(0.5, 0.8).unwrap() - 0.842).abs() <= 1e-3);
    assert_eq!(power(0.05, 0.0).unwrap().power, 0.05);
}

#[test]
fn von_neumann_null_mean() {
    let mut r = rng(13);
    let n = 100;
    let (mut vn, mut rvn, mut alarms) = (0.0, 0.0, 0);
    let trials = 2000;
    for _ in 0..trials {
        let y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
        vn += von_neumann(&y).unwrap();
        let rv = rank_von_neumann(&y, false).unwrap();
        rvn += rv;
        alarms += usize::from(rv < RVN_RANDOMNESS_THRESHOLD);
    }
    let expected = 2.0 * n as f64 / (n - 1) as f64;
    assert!((vn / trials as f64 - expected).abs() < 0.02 * expected);
    assert!((1.96..=2.06).contains(&(rvn / trials as f64)));
    assert!((alarms as f64 / trials as f64) <= 0.07);
}

#[test]
fn combination_examples() {
    let c = combine(&[1.0; 4], &[], CombineMethod::Stouffer).unwrap();
    assert!((c.statistic - 2.0).abs() < 1e-15);
    let l = combine(&[1.0; 4], &[], CombineMethod::Liptak).unwrap();
    assert_eq!(l.statistic, 1.0);
    assert!((l.p - c.p).abs() < 1e-15);
    // one experiment: every method returns its p
    let f = combine(&[], &[0.03], CombineMethod::Fisher).unwrap();
    assert!((f.p - 0.03).abs() < 1e-12);
}

fn grouped_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-5i32..5, 1..12), 2..7)
        .prop_map(|gs| gs.into_iter().map(|g| g.into_iter().map(f64::from).collect()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn tails_are_dual(groups in grouped_strategy()) {
        let g = GroupedSample::new(groups).unwrap();
        let r = jt_test(&g, Tail::Right, 0.05).unwrap();
        let l = jt_test(&g, Tail::Left, 0.05).unwrap();
        prop_assert!((r.p + l.p - 1.0).abs() < 1e-12);
        prop_assert_eq!(r.z, l.z);
    }

    #[test]
    fn reversing_groups_reflects_u(groups in grouped_strategy()) {
        let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
        let pairs: usize = (0..sizes.len())
            .flat_map(|i| (i + 1..sizes.len()).map(move |j| (i, j)))
            .map(|(i, j)| sizes[i] * sizes[j])
            .sum();
        let rev: Vec<Vec<f64>> = groups.iter().rev().cloned().collect();
        let u = jt_statistic(&groups, JtVariant::Plain);
        let ur = jt_statistic(&rev, JtVariant::Plain);
        prop_assert_eq!(u + ur, pairs as f64);
    }

    #[test]
    fn u_is_bounded_and_half_integral(groups in grouped_strategy()) {
        let (mean, _) = jt_moments(&groups.iter().map(Vec::len).collect::<Vec<_>>());
        let u = jt_statistic(&groups, JtVariant::Plain);
        prop_assert!(u >= 0.0 && u <= 4.0 * mean);
        prop_assert_eq!((2.0 * u).fract(), 0.0);
    }

    #[test]
    fn kendall_antisymmetry(ys in prop::collection::vec(-100i32..100, 2..80)) {
        let n = ys.len();
        let x: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let y: Vec<f64> = ys.iter().map(|&v| f64::from(v)).collect();
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let a = kendall_tau(&RankedSample::new(x.clone(), y).unwrap(), Tail::Right, 0.05).unwrap();
        let b = kendall_tau(&RankedSample::new(x, neg).unwrap(), Tail::Right, 0.05).unwrap();
        prop_assert_eq!(a.statistic, -b.statistic);
        prop_assert!((-1.0..=1.0).contains(&a.statistic));
    }

    #[test]
    fn statistics_invariant_under_monotone_transform(ys in prop::collection::vec(-3.0f64..3.0, 10..60)) {
        let n = ys.len();
        let x: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let t: Vec<f64> = ys.iter().map(|v| v.exp() * 3.0 + 1.0).collect();
        let a = RankedSample::new(x.clone(), ys).unwrap();
        let b = RankedSample::new(x, t).unwrap();
        prop_assert_eq!(
            kendall_tau(&a, Tail::Right, 0.05).unwrap().statistic,
            kendall_tau(&b, Tail::Right, 0.05).unwrap().statistic
        );
        let ga = partition_uniform(&a, 3).unwrap();
        let gb = partition_uniform(&b, 3).unwrap();
        prop_assert_eq!(jt_test(&ga, Tail::Right, 0.05).unwrap().z, jt_test(&gb, Tail::Right, 0.05).unwrap().z);
    }

    #[test]
    fn partition_covers_sample(n in 2usize..300, bins in 1usize..50) {
        prop_assume!(bins <= n);
        let s = RankedSample::new((0..n).map(|i| i as f64).collect(), vec![0.0; n]).unwrap();
        let g = partition_uniform(&s, bins).unwrap();
        prop_assert_eq!(g.total(), n);
        prop_assert_eq!(g.group_count(), bins);
        let sizes = g.sizes();
        prop_assert!(sizes[..bins - 1].iter().all(|&k| k == n / bins));
    }

    #[test]
    fn decision_follows_p(p in 0.0f64..1.0, alpha in 0.001f64..0.5) {
        prop_assert_eq!(Decision::at(p, alpha).is_reject(), p < alpha);
    }

    #[test]
    fn power_is_monotone(alpha in 0.001f64..0.5, a in 0.0f64..6.0, b in 0.0f64..6.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(power(alpha, lo).unwrap().power <= power(alpha, hi).unwrap().power);
    }
}
