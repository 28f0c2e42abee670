//! Hindsight competitors and the regret decomposition.
//!
//! The mixture competes against oracles that see the whole sequence:
//!
//! * [`best_fixed`] — one estimate for the whole horizon;
//! * [`best_switching`] — the optimal `S`-segment piecewise-constant
//!   competitor, found by dynamic programming over segment boundaries;
//! * [`segment_known_oracle`] — a fresh base-learner run per given segment
//!   (regret at most `S * R_B(T/S)` for a concave bound `R_B`);
//! * [`doubling_oracle`] — like the above but restarting with run lengths
//!   `1, 2, 4, ...` inside each segment, the fair competitor when segment
//!   ends are only discovered on arrival.
//!
//! [`decompose_regret`] splits a run's measured regret against a segment
//! spec into the canonical competing path's expert regret plus the path's
//! mixture cost over alpha, and records the scheme's bound expression next
//! to the measured cost.

use std::fmt::Write as _;

use crate::engine::{RunTrace, Scheme};
use crate::error::{Error, Result};
use crate::learner::{BaseLearner, LearnerKind};
use crate::loss::{Estimate, LossFamily, LossKind, Observation};
use crate::path::{path_loss, path_mixture_cost, PathSpec};
use crate::real::{clamp, real_usize, Real};
use crate::scheme::log::doubling_run_lengths;

/// Grid pitch for loss families without a closed-form segment minimiser.
const SCAN_STEP: f64 = 1e-4;

/// A hindsight competition: segment boundaries `0 = T_0 < ... < T_S = T`
/// and one estimate per segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSpec<F> {
    boundaries: Vec<usize>,
    estimates: Vec<Estimate<F>>,
}

impl<F: Real> SegmentSpec<F> {
    pub fn new(boundaries: Vec<usize>, estimates: Vec<Estimate<F>>) -> Result<Self> {
        if boundaries.len() < 2 || boundaries[0] != 0 {
            return Err(Error::InvalidInput(
                "boundaries must start at zero and contain at least one segment".into(),
            ));
        }
        if !boundaries.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(
                "boundaries must be strictly increasing".into(),
            ));
        }
        if estimates.len() != boundaries.len() - 1 {
            return Err(Error::InvalidInput(format!(
                "{} estimates for {} segments",
                estimates.len(),
                boundaries.len() - 1
            )));
        }
        Ok(Self {
            boundaries,
            estimates,
        })
    }

    pub fn segment_count(&self) -> usize {
        self.estimates.len()
    }

    pub fn horizon(&self) -> usize {
        *self.boundaries.last().unwrap()
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    pub fn estimates(&self) -> &[Estimate<F>] {
        &self.estimates
    }

    /// Segment lengths `t_s`; they sum to the horizon.
    pub fn lengths(&self) -> Vec<usize> {
        self.boundaries.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// First step of each segment (`T_{s-1} + 1`).
    pub fn starts(&self) -> Vec<usize> {
        self.boundaries[..self.boundaries.len() - 1]
            .iter()
            .map(|&b| b + 1)
            .collect()
    }

    /// Zero-based data index range of segment `s`.
    pub fn segment_range(&self, s: usize) -> std::ops::Range<usize> {
        self.boundaries[s]..self.boundaries[s + 1]
    }

    /// Total loss of playing the spec's estimates against the data.
    pub fn loss_on(&self, data: &[Observation<F>], family: &LossFamily<F>) -> Result<F> {
        if data.len() != self.horizon() {
            return Err(Error::InvalidInput(format!(
                "spec horizon {} vs data length {}",
                self.horizon(),
                data.len()
            )));
        }
        let mut total = F::zero();
        for s in 0..self.segment_count() {
            for i in self.segment_range(s) {
                total += family.evaluate(self.estimates[s], data[i])?;
            }
        }
        Ok(total)
    }
}

/// Best single estimate in hindsight and its total loss.
pub fn best_fixed<F: Real>(
    data: &[Observation<F>],
    family: &LossFamily<F>,
) -> Result<(Estimate<F>, F)> {
    if data.is_empty() {
        return Err(Error::InvalidInput("empty data".into()));
    }
    let theta = match family.kind() {
        LossKind::Square => {
            let sum: F = data.iter().map(|o| o.0).sum();
            Estimate(clamp(
                sum / real_usize::<F>(data.len()),
                -F::one(),
                F::one(),
            ))
        }
        LossKind::ExpConcaveMean { .. } => grid_scan_minimum(data, family)?,
    };
    let mut loss = F::zero();
    for &x in data {
        loss += family.evaluate(theta, x)?;
    }
    Ok((theta, loss))
}

fn grid_scan_minimum<F: Real>(
    data: &[Observation<F>],
    family: &LossFamily<F>,
) -> Result<Estimate<F>> {
    let steps = (2.0 / SCAN_STEP) as usize;
    let mut best = (Estimate(-F::one()), F::infinity());
    for i in 0..=steps {
        let theta = Estimate(clamp(
            -F::one() + real_usize::<F>(2 * i) / real_usize::<F>(steps),
            -F::one(),
            F::one(),
        ));
        let mut loss = F::zero();
        for &x in data {
            loss += family.evaluate(theta, x)?;
        }
        if loss < best.1 {
            best = (theta, loss);
        }
    }
    Ok(best.0)
}

/// Per-segment cost of the best fixed estimate on `data[i..j]`, O(1) for the
/// square loss via prefix sums.
struct SegmentCost<F> {
    prefix_sum: Vec<F>,
    prefix_sq: Vec<F>,
}

impl<F: Real> SegmentCost<F> {
    fn new(data: &[Observation<F>]) -> Self {
        let mut prefix_sum = Vec::with_capacity(data.len() + 1);
        let mut prefix_sq = Vec::with_capacity(data.len() + 1);
        prefix_sum.push(F::zero());
        prefix_sq.push(F::zero());
        for o in data {
            prefix_sum.push(*prefix_sum.last().unwrap() + o.0);
            prefix_sq.push(*prefix_sq.last().unwrap() + o.0 * o.0);
        }
        Self {
            prefix_sum,
            prefix_sq,
        }
    }

    fn cost(&self, i: usize, j: usize) -> F {
        let n = real_usize::<F>(j - i);
        let sum = self.prefix_sum[j] - self.prefix_sum[i];
        let sq = self.prefix_sq[j] - self.prefix_sq[i];
        let theta = clamp(sum / n, -F::one(), F::one());
        sq - real_usize::<F>(2) * theta * sum + n * theta * theta
    }
}

/// Optimal `segments`-piece switching competitor by dynamic programming,
/// `O(T^2 S)` time. Boundary ties break toward the earliest boundaries.
#[allow(clippy::needless_range_loop)] // b is the candidate boundary position
pub fn best_switching<F: Real>(
    data: &[Observation<F>],
    family: &LossFamily<F>,
    segments: usize,
) -> Result<SegmentSpec<F>> {
    let horizon = data.len();
    if horizon == 0 {
        return Err(Error::InvalidInput("empty data".into()));
    }
    if segments < 1 || segments > horizon {
        return Err(Error::InvalidInput(format!(
            "segment count {segments} outside 1..={horizon}"
        )));
    }
    let square = matches!(family.kind(), LossKind::Square);
    let table = square.then(|| SegmentCost::new(data));
    let cost = |i: usize, j: usize| -> Result<F> {
        match &table {
            Some(t) => Ok(t.cost(i, j)),
            None => best_fixed(&data[i..j], family).map(|(_, l)| l),
        }
    };

    // prev[j] = best cost covering data[..j] with k-1 segments.
    let mut prev: Vec<F> = Vec::with_capacity(horizon + 1);
    prev.push(F::zero());
    for j in 1..=horizon {
        prev.push(cost(0, j)?);
    }
    // split[k][j] = items covered before the last segment at that state.
    let mut split: Vec<Vec<usize>> = vec![vec![0; horizon + 1]];
    for k in 2..=segments {
        let mut cur = vec![F::infinity(); horizon + 1];
        let mut arg = vec![0usize; horizon + 1];
        for j in k..=horizon {
            let mut best = F::infinity();
            let mut best_b = 0usize;
            for b in (k - 1)..j {
                let candidate = prev[b] + cost(b, j)?;
                if candidate < best {
                    best = candidate;
                    best_b = b;
                }
            }
            cur[j] = best;
            arg[j] = best_b;
        }
        prev = cur;
        split.push(arg);
    }

    let mut boundaries = vec![horizon];
    let mut j = horizon;
    for k in (2..=segments).rev() {
        j = split[k - 1][j];
        boundaries.push(j);
    }
    boundaries.push(0);
    boundaries.reverse();

    let mut estimates = Vec::with_capacity(segments);
    for w in boundaries.windows(2) {
        let (theta, _) = best_fixed(&data[w[0]..w[1]], family)?;
        estimates.push(theta);
    }
    SegmentSpec::new(boundaries, estimates)
}

/// Result of replaying an oracle's base-learner runs.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRun<F> {
    /// Total loss of the oracle's predictions.
    pub loss: F,
    /// Loss excess over the spec's per-segment estimates.
    pub regret: F,
    /// Per-run regret against each run's own best fixed estimate.
    pub run_regrets: Vec<F>,
    /// (start step, length) of each base-learner run.
    pub run_spans: Vec<(usize, usize)>,
}

fn replay_runs<F: Real>(
    data: &[Observation<F>],
    spec: &SegmentSpec<F>,
    family: &LossFamily<F>,
    learner: LearnerKind,
    runs_of_segment: impl Fn(usize) -> Vec<usize>,
) -> Result<OracleRun<F>> {
    if data.len() != spec.horizon() {
        return Err(Error::InvalidInput(format!(
            "spec horizon {} vs data length {}",
            spec.horizon(),
            data.len()
        )));
    }
    let prototype = BaseLearner::new(learner, family.clone());
    let mut loss = F::zero();
    let mut regret = F::zero();
    let mut run_regrets = Vec::new();
    let mut run_spans = Vec::new();
    for s in 0..spec.segment_count() {
        let range = spec.segment_range(s);
        let seg_len = range.end - range.start;
        let mut offset = range.start;
        for run_len in runs_of_segment(seg_len) {
            let mut model = prototype.fresh();
            let mut run_loss = F::zero();
            for &x in &data[offset..offset + run_len] {
                let p = model.predict();
                let l = family.evaluate(p, x)?;
                loss += l;
                run_loss += l;
                regret += l - family.evaluate(spec.estimates()[s], x)?;
                model.update(x)?;
            }
            let (_, run_best) = best_fixed(&data[offset..offset + run_len], family)?;
            run_regrets.push(run_loss - run_best);
            run_spans.push((offset + 1, run_len));
            offset += run_len;
        }
    }
    Ok(OracleRun {
        loss,
        regret,
        run_regrets,
        run_spans,
    })
}

/// One fresh base-learner run per segment of the spec.
pub fn segment_known_oracle<F: Real>(
    data: &[Observation<F>],
    spec: &SegmentSpec<F>,
    family: &LossFamily<F>,
    learner: LearnerKind,
) -> Result<OracleRun<F>> {
    replay_runs(data, spec, family, learner, |len| vec![len])
}

/// Doubling restarts inside each segment: run lengths `1, 2, 4, ...` with
/// the last run truncated at the segment end.
pub fn doubling_oracle<F: Real>(
    data: &[Observation<F>],
    spec: &SegmentSpec<F>,
    family: &LossFamily<F>,
    learner: LearnerKind,
) -> Result<OracleRun<F>> {
    replay_runs(data, spec, family, learner, doubling_run_lengths)
}

/// A run's regret split against one segment spec.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretReport<F> {
    pub scheme: &'static str,
    pub weighting: &'static str,
    pub horizon: usize,
    pub segments: usize,
    pub mix_loss: F,
    pub oracle_loss: F,
    /// `mix_loss - oracle_loss`.
    pub regret: F,
    /// Canonical path loss minus oracle loss (realised expert regret).
    pub path_e: F,
    /// Mixture cost of the canonical competing path.
    pub w_measured: F,
    /// The weighting's bound expression at (segments, horizon).
    pub w_bound: F,
    /// Number of expert switches plus one along the canonical path.
    pub s_e: usize,
    /// `path_e + w_measured/alpha - regret`; nonnegative up to float error.
    pub corollary_slack: F,
}

impl<F: Real> RegretReport<F> {
    pub const CSV_HEADER: &'static str =
        "scheme,weighting,T,S,mix_loss,oracle_loss,regret,path_E,W_measured,W_bound,SE";

    pub fn csv_row(&self) -> String {
        let mut row = String::new();
        let _ = write!(
            row,
            "{},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            self.scheme,
            self.weighting,
            self.horizon,
            self.segments,
            self.mix_loss,
            self.oracle_loss,
            self.regret,
            self.path_e,
            self.w_measured,
            self.w_bound,
            self.s_e
        );
        row
    }

    /// Regret at most expert regret plus `W / alpha`, with headroom.
    pub fn corollary_holds(&self, tolerance: F) -> bool {
        self.corollary_slack >= -tolerance
    }
}

/// Split a run's regret against `spec` into the canonical path's expert
/// regret and mixture cost.
pub fn decompose_regret<S, F>(
    scheme: &S,
    family: &LossFamily<F>,
    learner: LearnerKind,
    trace: &RunTrace<F>,
    spec: &SegmentSpec<F>,
) -> Result<RegretReport<F>>
where
    S: Scheme<F>,
    F: Real,
{
    let horizon = trace.horizon();
    if spec.horizon() != horizon {
        return Err(Error::InvalidInput(format!(
            "spec horizon {} vs trace horizon {horizon}",
            spec.horizon()
        )));
    }
    let data = trace.observations();
    let oracle_loss = spec.loss_on(&data, family)?;
    let mix_loss = trace.cumulative_loss();
    let regret = mix_loss - oracle_loss;

    let path = PathSpec::new(scheme.canonical_path(&spec.starts(), horizon)?);
    let w_measured = path_mixture_cost(scheme, &path)?;
    let ploss = path_loss(scheme, family, learner, &path, &data)?;
    let path_e = ploss - oracle_loss;
    let w_bound = scheme.mixture_regret_bound(spec.segment_count(), real_usize(horizon));
    let corollary_slack = path_e + w_measured / family.alpha() - regret;

    Ok(RegretReport {
        scheme: scheme.scheme_name(),
        weighting: scheme.weighting_name(),
        horizon,
        segments: spec.segment_count(),
        mix_loss,
        oracle_loss,
        regret,
        path_e,
        w_measured,
        w_bound,
        s_e: path.segment_count(),
        corollary_slack,
    })
}
