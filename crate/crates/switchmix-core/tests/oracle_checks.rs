//! Hindsight-oracle verification: the segmentation DP against brute-force
//! enumeration, learner calibration envelopes, the two segment oracles
//! against their bound models, and full regret decompositions.

mod common;

use rand::Rng;

use switchmix_core::engine::run_mixture;
use switchmix_core::learner::{BaseLearner, LearnerKind, RegretBoundModel};
use switchmix_core::loss::{Estimate, LossFamily, Observation};
use switchmix_core::oracle::{
    best_fixed, best_switching, decompose_regret, doubling_oracle, segment_known_oracle,
    RegretReport, SegmentSpec,
};
use switchmix_core::scheme::exp::{ExpScheme, ExpWeighting};
use switchmix_core::scheme::log::{doubling_oracle_bound, LogScheme, LogWeighting};
use switchmix_core::scheme::quad::{QuadScheme, QuadWeighting};

/// Brute-force switching oracle: enumerate every boundary combination in
/// lexicographic order, computing each segment's cost by direct summation.
fn brute_force_switching(data: &[Observation<f64>], segments: usize) -> (Vec<usize>, f64) {
    let fam = LossFamily::<f64>::square();
    let horizon = data.len();
    let mut best_bounds = Vec::new();
    let mut best_loss = f64::INFINITY;
    let mut combo: Vec<usize> = (1..segments).collect();
    loop {
        let mut boundaries = vec![0usize];
        boundaries.extend(combo.iter().copied());
        boundaries.push(horizon);
        let mut loss = 0.0;
        for w in boundaries.windows(2) {
            let (theta, _) = best_fixed(&data[w[0]..w[1]], &fam).unwrap();
            for &x in &data[w[0]..w[1]] {
                loss += fam.evaluate(theta, x).unwrap();
            }
        }
        if loss < best_loss {
            best_loss = loss;
            best_bounds = boundaries.clone();
        }
        // Next combination of boundaries in lexicographic order.
        let k = combo.len();
        if k == 0 {
            break;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return (best_bounds, best_loss);
            }
            i -= 1;
            if combo[i] < horizon - (k - i) {
                combo[i] += 1;
                for j in i + 1..k {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
    (best_bounds, best_loss)
}

#[test]
fn switching_dp_matches_brute_force() {
    let fam = LossFamily::<f64>::square();
    let mut r = common::rng(101);
    for trial in 0..60 {
        let horizon = r.gen_range(2usize..=12);
        let segments = r.gen_range(1usize..=4.min(horizon));
        let data: Vec<Observation<f64>> = (0..horizon)
            .map(|_| Observation(r.gen_range(-1.0..=1.0)))
            .collect();
        let spec = best_switching(&data, &fam, segments).unwrap();
        let dp_loss = spec.loss_on(&data, &fam).unwrap();
        let (bf_bounds, bf_loss) = brute_force_switching(&data, segments);
        assert!(
            (dp_loss - bf_loss).abs() < 1e-10,
            "trial {trial}: dp {dp_loss} vs brute {bf_loss}"
        );
        assert_eq!(spec.boundaries(), &bf_bounds[..], "trial {trial}");
    }
}

#[test]
fn switching_dp_tie_breaks_match_brute_force_on_constant_data() {
    let fam = LossFamily::<f64>::square();
    for segments in 1..=4usize {
        let data: Vec<Observation<f64>> = vec![Observation(0.25); 9];
        let spec = best_switching(&data, &fam, segments).unwrap();
        let (bf_bounds, _) = brute_force_switching(&data, segments);
        assert_eq!(spec.boundaries(), &bf_bounds[..], "S = {segments}");
    }
}

#[test]
fn ftl_square_loss_regret_envelope() {
    // Calibration constant used by the oracle comparisons: FTL's measured
    // regret stays within 4 (1 + ln(T+1)) on every tested sequence.
    let fam = LossFamily::<f64>::square();
    for (seed, horizon) in [(1u64, 64usize), (2, 256), (3, 1024), (4, 2048)] {
        for sigma in [0.0, 0.3, 1.0] {
            let (data, _) = common::piecewise_data(horizon, 1, sigma, seed);
            let mut learner = BaseLearner::new(LearnerKind::FollowTheLeader, fam.clone());
            let mut loss = 0.0;
            for &x in &data {
                loss += fam.evaluate(learner.predict(), x).unwrap();
                learner.update(x).unwrap();
            }
            let (_, best) = best_fixed(&data, &fam).unwrap();
            let envelope = 4.0 * (1.0 + (horizon as f64 + 1.0).ln());
            assert!(
                loss - best <= envelope,
                "T = {horizon}, sigma = {sigma}: regret {} > {envelope}",
                loss - best
            );
        }
    }
}

#[test]
fn segment_known_oracle_within_concave_budget() {
    let fam = LossFamily::<f64>::square();
    let model = RegretBoundModel::new(4.0f64, 4.0);
    let horizon = 256usize;
    for segments in [1usize, 2, 4] {
        for seed in 0..50u64 {
            let (data, starts) = common::piecewise_data(horizon, segments, 0.2, 300 + seed);
            let mut boundaries: Vec<usize> = starts.iter().map(|&s| s - 1).collect();
            boundaries.push(horizon);
            let mut estimates = Vec::new();
            for w in boundaries.windows(2) {
                estimates.push(best_fixed(&data[w[0]..w[1]], &fam).unwrap().0);
            }
            let spec = SegmentSpec::new(boundaries, estimates).unwrap();
            let run =
                segment_known_oracle(&data, &spec, &fam, LearnerKind::FollowTheLeader).unwrap();
            let budget = segments as f64 * model.eval(horizon as f64 / segments as f64).unwrap();
            assert!(
                run.regret <= budget,
                "S = {segments}, seed {seed}: {} > {budget}",
                run.regret
            );
        }
    }
}

#[test]
fn doubling_oracle_within_its_bound_for_constant_model() {
    let fam = LossFamily::<f64>::square();
    let horizon = 512usize;
    let mut r = common::rng(400);
    for trial in 0..20 {
        let segments = r.gen_range(1usize..=8);
        let seed = 500 + trial;
        let (data, starts) = common::piecewise_data(horizon, segments, 0.1, seed);
        let mut boundaries: Vec<usize> = starts.iter().map(|&s| s - 1).collect();
        boundaries.push(horizon);
        let mut estimates = Vec::new();
        for w in boundaries.windows(2) {
            estimates.push(best_fixed(&data[w[0]..w[1]], &fam).unwrap().0);
        }
        let spec = SegmentSpec::new(boundaries, estimates).unwrap();
        let run = doubling_oracle(&data, &spec, &fam, LearnerKind::FollowTheLeader).unwrap();
        let c = run
            .run_regrets
            .iter()
            .cloned()
            .fold(0.0f64, f64::max)
            .max(1e-9);
        let bound =
            doubling_oracle_bound(segments, horizon, &RegretBoundModel::constant(c)).unwrap();
        if segments < horizon {
            assert!(
                run.regret <= bound,
                "trial {trial}, S = {segments}: {} > {bound}",
                run.regret
            );
        }
    }
}

#[test]
fn decompose_exhaustive_random_specs() {
    let fam = LossFamily::<f64>::square();
    let horizon = 6usize;
    let mut r = common::rng(170);
    let (data, _) = common::piecewise_data(horizon, 2, 0.3, 171);
    for w in ExpWeighting::ALL {
        let scheme = ExpScheme::new(w, horizon).unwrap();
        let trace = run_mixture(scheme, fam.clone(), LearnerKind::FollowTheLeader, &data).unwrap();
        for _ in 0..10 {
            let segments = r.gen_range(1usize..=3);
            let spec = best_switching(&data, &fam, segments).unwrap();
            let report =
                decompose_regret(&scheme, &fam, LearnerKind::FollowTheLeader, &trace, &spec)
                    .unwrap();
            assert!(report.corollary_holds(1e-8), "{}: {:?}", w.name(), report);
            assert_eq!(report.s_e, 1, "constant path through one reset pattern");
        }
    }
}

#[test]
fn decompose_interval_single_segment() {
    let fam = LossFamily::<f64>::square();
    let horizon = 32usize;
    let (data, _) = common::piecewise_data(horizon, 1, 0.2, 180);
    let scheme = QuadScheme::new(QuadWeighting::Optimal, horizon).unwrap();
    let trace = run_mixture(scheme, fam.clone(), LearnerKind::FollowTheLeader, &data).unwrap();
    let spec = best_switching(&data, &fam, 1).unwrap();
    let report =
        decompose_regret(&scheme, &fam, LearnerKind::FollowTheLeader, &trace, &spec).unwrap();
    assert_eq!(report.s_e, 1);
    assert!(report.corollary_holds(1e-8));
    assert!(report.w_measured >= 0.0);
}

#[test]
fn decompose_dyadic_unbroken_eight_has_four_path_segments() {
    let fam = LossFamily::<f64>::square();
    let (data, _) = common::piecewise_data(8, 1, 0.1, 190);
    let scheme = LogScheme::new(LogWeighting::Optimal);
    let trace = run_mixture(scheme, fam.clone(), LearnerKind::FollowTheLeader, &data).unwrap();
    let spec = best_switching(&data, &fam, 1).unwrap();
    let report =
        decompose_regret(&scheme, &fam, LearnerKind::FollowTheLeader, &trace, &spec).unwrap();
    assert_eq!(report.s_e, 4);
    assert!((report.s_e as f64) <= (64.0f64).log2());
    assert!(report.corollary_holds(1e-8));
}

#[test]
fn regret_report_csv_layout() {
    let fam = LossFamily::<f64>::square();
    let (data, _) = common::piecewise_data(16, 2, 0.2, 200);
    let scheme = QuadScheme::new(QuadWeighting::Better, 16).unwrap();
    let trace = run_mixture(scheme, fam.clone(), LearnerKind::FollowTheLeader, &data).unwrap();
    let spec = best_switching(&data, &fam, 2).unwrap();
    let report =
        decompose_regret(&scheme, &fam, LearnerKind::FollowTheLeader, &trace, &spec).unwrap();
    assert_eq!(
        RegretReport::<f64>::CSV_HEADER,
        "scheme,weighting,T,S,mix_loss,oracle_loss,regret,path_E,W_measured,W_bound,SE"
    );
    let row = report.csv_row();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields.len(), 11);
    assert_eq!(fields[0], "quad");
    assert_eq!(fields[1], "better");
    assert_eq!(fields[2], "16");
    assert_eq!(fields[3], "2");
    // Total regret equals mixture loss minus oracle loss by construction.
    assert!((report.regret - (report.mix_loss - report.oracle_loss)).abs() < 1e-12);
    let _ = Estimate(0.0f64);
}

#[test]
fn single_segment_oracle_is_one_run() {
    let fam = LossFamily::<f64>::square();
    let (data, _) = common::piecewise_data(20, 1, 0.2, 210);
    let (theta, _) = best_fixed(&data, &fam).unwrap();
    let spec = SegmentSpec::new(vec![0, 20], vec![theta]).unwrap();
    let run = segment_known_oracle(&data, &spec, &fam, LearnerKind::FollowTheLeader).unwrap();
    assert_eq!(run.run_spans, vec![(1, 20)]);
    assert!(run.regret >= -1e-12);
}

#[test]
fn doubling_oracle_within_concave_model_budget() {
    // The same replay against the calibrated logarithmic model.
    let fam = LossFamily::<f64>::square();
    let model = RegretBoundModel::new(4.0f64, 4.0);
    let horizon = 512usize;
    let mut r = common::rng(440);
    for trial in 0..50u64 {
        let segments = r.gen_range(1usize..horizon.min(9));
        let (data, starts) = common::piecewise_data(horizon, segments, 0.1, 600 + trial);
        let mut boundaries: Vec<usize> = starts.iter().map(|&s| s - 1).collect();
        boundaries.push(horizon);
        let mut estimates = Vec::new();
        for w in boundaries.windows(2) {
            estimates.push(best_fixed(&data[w[0]..w[1]], &fam).unwrap().0);
        }
        let spec = SegmentSpec::new(boundaries, estimates).unwrap();
        let run = doubling_oracle(&data, &spec, &fam, LearnerKind::FollowTheLeader).unwrap();
        let budget = doubling_oracle_bound(segments, horizon, &model).unwrap();
        assert!(
            run.regret <= budget,
            "trial {trial}, S = {segments}: {} > {budget}",
            run.regret
        );
    }
}
