//! Per-scheme structural properties: row-sum validity, coverage, measured
//! path costs against the closed-form bound expressions, and the dyadic
//! split's guarantees.

mod common;

use rand::Rng;

use switchmix_core::engine::{run_mixture, Scheme};
use switchmix_core::learner::{LearnerKind, RegretBoundModel};
use switchmix_core::loss::LossFamily;
use switchmix_core::path::{path_loss, path_mixture_cost, PathSpec};
use switchmix_core::real::binomial;
use switchmix_core::scheme::exp::{self, ExpScheme, ExpWeighting};
use switchmix_core::scheme::log::{self, dyadic_split, LogScheme, LogWeighting};
use switchmix_core::scheme::quad::{self, QuadScheme, QuadWeighting};

/// Random segment starts: `segments` starts over `1..=horizon`.
fn random_starts(horizon: usize, segments: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut starts = vec![1usize];
    while starts.len() < segments {
        let c = rng.gen_range(2..=horizon);
        if !starts.contains(&c) {
            starts.push(c);
        }
    }
    starts.sort_unstable();
    starts
}

fn lengths_of(starts: &[usize], horizon: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(starts.len());
    for (i, &s) in starts.iter().enumerate() {
        let next = starts.get(i + 1).copied().unwrap_or(horizon + 1);
        out.push(next - s);
    }
    out
}

#[test]
fn quad_validity_margins_nonnegative() {
    for horizon in [64usize, 512] {
        for w in QuadWeighting::ALL {
            for t in 1..=horizon {
                let m: f64 = quad::validity_margin(w, t, horizon);
                assert!(m >= -1e-12, "{} t = {t}, T = {horizon}: {m}", w.name());
            }
        }
    }
}

#[test]
fn log_validity_margins_nonnegative_with_spot_checks() {
    for u in 1..=(1usize << 14) {
        for w in LogWeighting::ALL {
            let m: f64 = log::validity_margin(w, u);
            assert!(m >= -1e-12, "{} at u = {u}: {m}", w.name());
        }
    }
    // Spot checks high up, including boundaries around large powers of two.
    for u in [
        (1usize << 20) - 1,
        1usize << 20,
        (1usize << 20) + 1,
        (1usize << 19) + 12345,
    ] {
        for w in LogWeighting::ALL {
            let m: f64 = log::validity_margin(w, u);
            assert!(m >= -1e-12, "{} at u = {u}: {m}", w.name());
        }
    }
}

#[test]
fn exp_measured_cost_identities() {
    // Constant paths cost exactly the negative log prior; the bound
    // expressions relate to that cost by closed-form remainders.
    let horizon = 12usize;
    let t = horizon as f64;
    let mut r = common::rng(31);
    for segments in [1usize, 2, 4, 7] {
        let starts = random_starts(horizon, segments, &mut r);
        let s = segments as f64;

        let naive = ExpScheme::new(ExpWeighting::Naive, horizon).unwrap();
        let path = <ExpScheme as Scheme<f64>>::canonical_path(&naive, &starts, horizon).unwrap();
        let w: f64 = path_mixture_cost(&naive, &PathSpec::new(path)).unwrap();
        let bound: f64 = exp::mixture_regret_bound(ExpWeighting::Naive, segments, t);
        assert!((w - bound).abs() < 1e-9, "naive: {w} vs {bound}");

        let better = ExpScheme::new(ExpWeighting::Better, horizon).unwrap();
        let path = <ExpScheme as Scheme<f64>>::canonical_path(&better, &starts, horizon).unwrap();
        let w: f64 = path_mixture_cost(&better, &PathSpec::new(path)).unwrap();
        let exact = t.ln() + (binomial(horizon as u64, segments as u64) as f64).ln();
        assert!((w - exact).abs() < 1e-9, "better: {w} vs {exact}");
        // ln C(T,S) <= S ln(T/S) + S, so the measured cost trails the
        // stated expression by at most the +S from the e factor.
        let bound: f64 = exp::mixture_regret_bound(ExpWeighting::Better, segments, t);
        assert!(w <= bound + s + 1e-9, "better: {w} vs {bound} + {s}");
        // The binomial form is the tighter of the two for every tested S.
        assert!(exact <= bound + s + 1e-9);

        let optimal = ExpScheme::new(ExpWeighting::Optimal, horizon).unwrap();
        let path = <ExpScheme as Scheme<f64>>::canonical_path(&optimal, &starts, horizon).unwrap();
        let w: f64 = path_mixture_cost(&optimal, &PathSpec::new(path)).unwrap();
        let bound: f64 = exp::mixture_regret_bound(ExpWeighting::Optimal, segments, t);
        let remainder = s * (1.0 + std::f64::consts::LN_2);
        assert!((w - (bound + remainder)).abs() < 1e-9, "optimal: {w}");
    }
}

#[test]
fn quad_canonical_costs_match_closed_forms() {
    let horizon = 64usize;
    let mut r = common::rng(41);
    for segments in [1usize, 2, 4, 8] {
        let starts = random_starts(horizon, segments, &mut r);
        let lens = lengths_of(&starts, horizon);

        // Telescoping weighting: exactly sum of ln(t_s) + ln(t_s + 1).
        let scheme = QuadScheme::new(QuadWeighting::Better, horizon).unwrap();
        let path = <QuadScheme as Scheme<f64>>::canonical_path(&scheme, &starts, horizon).unwrap();
        let w: f64 = path_mixture_cost(&scheme, &PathSpec::new(path)).unwrap();
        let exact: f64 = lens
            .iter()
            .map(|&l| (l as f64).ln() + (l as f64 + 1.0).ln())
            .sum();
        let rel = (w - exact).abs() / exact.max(1.0);
        assert!(rel < 1e-12, "better: {w} vs {exact}");

        // Uniform weighting: S ln T on the nose.
        let scheme = QuadScheme::new(QuadWeighting::Naive, horizon).unwrap();
        let path = <QuadScheme as Scheme<f64>>::canonical_path(&scheme, &starts, horizon).unwrap();
        let w: f64 = path_mixture_cost(&scheme, &PathSpec::new(path)).unwrap();
        let exact = segments as f64 * (horizon as f64).ln();
        assert!((w - exact).abs() < 1e-9, "naive: {w} vs {exact}");

        // Length-penalised weighting: sum of ln(2 t_s) + 2 ln(1 + ln t_s).
        let scheme = QuadScheme::new(QuadWeighting::Optimal, horizon).unwrap();
        let path = <QuadScheme as Scheme<f64>>::canonical_path(&scheme, &starts, horizon).unwrap();
        let w: f64 = path_mixture_cost(&scheme, &PathSpec::new(path)).unwrap();
        let exact: f64 = lens
            .iter()
            .map(|&l| (2.0 * l as f64).ln() + 2.0 * (1.0 + (l as f64).ln()).ln())
            .sum();
        assert!((w - exact).abs() < 1e-9, "optimal: {w} vs {exact}");
        let bound: f64 =
            quad::mixture_regret_bound(QuadWeighting::Optimal, segments, horizon as f64);
        assert!(w <= bound + 1e-9);
    }
}

#[test]
fn quad_coverage_every_variant_is_feasible() {
    let horizon = 48usize;
    let mut r = common::rng(51);
    for segments in [1usize, 3, 6, 12] {
        let starts = random_starts(horizon, segments, &mut r);
        for w in QuadWeighting::ALL {
            let scheme = QuadScheme::new(w, horizon).unwrap();
            let path =
                <QuadScheme as Scheme<f64>>::canonical_path(&scheme, &starts, horizon).unwrap();
            let cost: f64 = path_mixture_cost(&scheme, &PathSpec::new(path)).unwrap();
            assert!(cost.is_finite() && cost > 0.0);
        }
    }
}

#[test]
fn dyadic_split_count_bound_random_change_sets() {
    let mut r = common::rng(61);
    for _ in 0..200 {
        let horizon = r.gen_range(2usize..=2048);
        let segments = r.gen_range(1usize..=horizon.min(24));
        let starts = random_starts(horizon, segments, &mut r);
        let pieces = dyadic_split(horizon, &starts).unwrap();
        let s = segments as f64;
        let bound = s * (8.0 * horizon as f64 / s).log2();
        assert!(
            pieces.len() as f64 <= bound,
            "T = {horizon}, S = {segments}: {} pieces > {bound}",
            pieces.len()
        );
        // Pieces are aligned, disjoint, exhaustive, and respect changes.
        let mut at = 1usize;
        for p in &pieces {
            assert_eq!(p.start, at);
            assert_eq!(p.start as u64 % p.period, 0);
            assert!(p.len as u64 <= p.period);
            assert!(starts.iter().all(|&c| !(p.start < c && c <= p.end())));
            at += p.len;
        }
        assert_eq!(at, horizon + 1);
    }
}

#[test]
fn dyadic_path_cost_respects_the_switch_accounting() {
    // Measured cost of the split path under the boundary-limited optimal
    // design stays below S log2(8T/S) ln 4, segment by segment family.
    let mut r = common::rng(71);
    let scheme = LogScheme::new(LogWeighting::Optimal);
    for _ in 0..60 {
        let horizon = r.gen_range(8usize..=1024);
        let segments = r.gen_range(1usize..=8.min(horizon));
        let starts = random_starts(horizon, segments, &mut r);
        let path = <LogScheme as Scheme<f64>>::canonical_path(&scheme, &starts, horizon).unwrap();
        let w: f64 = path_mixture_cost(&scheme, &PathSpec::new(path)).unwrap();
        let s = segments as f64;
        let bound = s * (8.0 * horizon as f64 / s).log2() * 4.0f64.ln();
        assert!(
            w <= bound + 1e-9,
            "T = {horizon}, S = {segments}: {w} > {bound}"
        );
    }
}

#[test]
fn dyadic_path_expert_regret_within_doubling_budget() {
    // The split path runs the base learner on power-of-two segments; its
    // regret against per-segment optima stays within the doubling-oracle
    // budget for the calibrated logarithmic model.
    let fam = LossFamily::<f64>::square();
    let model = RegretBoundModel::new(4.0f64, 4.0);
    let scheme = LogScheme::new(LogWeighting::Optimal);
    for seed in 0..10u64 {
        let horizon = 256usize;
        let segments = 4usize;
        let (data, starts) = common::piecewise_data(horizon, segments, 0.1, 900 + seed);
        let path = PathSpec::new(
            <LogScheme as Scheme<f64>>::canonical_path(&scheme, &starts, horizon).unwrap(),
        );
        let ploss = path_loss(&scheme, &fam, LearnerKind::FollowTheLeader, &path, &data).unwrap();
        // Per-segment optimum from the generating segmentation.
        let mut boundaries: Vec<usize> = starts.iter().map(|&s| s - 1).collect();
        boundaries.push(horizon);
        let mut oracle_loss = 0.0;
        for w in boundaries.windows(2) {
            let (_, l) = switchmix_core::oracle::best_fixed(&data[w[0]..w[1]], &fam).unwrap();
            oracle_loss += l;
        }
        let expert_regret = ploss - oracle_loss;
        let budget = log::doubling_oracle_bound(segments, horizon, &model).unwrap();
        assert!(
            expert_regret <= budget * 1.05,
            "seed {seed}: {expert_regret} vs {budget}"
        );
    }
}

#[test]
fn log_pool_size_is_exactly_log2_floor_plus_one() {
    let (data, _) = common::piecewise_data(64, 2, 0.2, 12);
    let trace = run_mixture(
        LogScheme::new(LogWeighting::Smarter),
        LossFamily::<f64>::square(),
        LearnerKind::FollowTheLeader,
        &data,
    )
    .unwrap();
    for row in &trace.rows {
        let expect = (row.t as f64).log2().floor() as usize + 1;
        assert_eq!(row.pool_size, expect, "t = {}", row.t);
        assert!((row.pool_size as f64) <= (2.0 * row.t as f64).log2());
    }
}

#[test]
fn exp_pool_size_is_two_to_horizon_minus_one() {
    let (data, _) = common::piecewise_data(10, 2, 0.2, 13);
    let trace = run_mixture(
        ExpScheme::new(ExpWeighting::Naive, 10).unwrap(),
        LossFamily::<f64>::square(),
        LearnerKind::FollowTheLeader,
        &data,
    )
    .unwrap();
    for row in &trace.rows {
        assert_eq!(row.pool_size, 512);
    }
}

#[test]
fn appendix_sum_stays_below_one_at_ten_thousand() {
    // Direct finite sum of the length-penalised weights over 10^4 runtimes.
    let total: f64 = (1..=10_000usize)
        .map(|l| quad::redistribution_weight::<f64>(QuadWeighting::Optimal, 10_000, l))
        .sum();
    assert!(total < 1.0, "sum = {total}");
}

#[test]
fn quad_bounds_hold_for_adversarial_segmentations() {
    // Equal-length and one-long-many-short competitions, S <= 8, T <= 1024.
    for &horizon in &[64usize, 256, 1024] {
        for &segments in &[1usize, 2, 4, 8] {
            let equal: Vec<usize> = (0..segments)
                .map(|s| s * horizon / segments + 1)
                .collect();
            // Unit segments 1..S-1 followed by one long tail segment.
            let one_long: Vec<usize> = (1..=segments).collect();
            for starts in [equal, one_long] {
                for w in QuadWeighting::ALL {
                    let scheme = QuadScheme::new(w, horizon).unwrap();
                    let path = PathSpec::new(
                        <QuadScheme as Scheme<f64>>::canonical_path(&scheme, &starts, horizon)
                            .unwrap(),
                    );
                    let measured: f64 = path_mixture_cost(&scheme, &path).unwrap();
                    let bound: f64 =
                        quad::mixture_regret_bound(w, starts.len(), horizon as f64);
                    assert!(
                        measured <= bound + 1e-9,
                        "{} T={horizon} starts={starts:?}: {measured} > {bound}",
                        w.name()
                    );
                }
            }
        }
    }
}
