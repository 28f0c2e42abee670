//! Dyadic scheme: one expert per power-of-two restart period.
//!
//! Expert `k` (a power of two) is born at step `k` and restarts its base
//! learner every `k` steps: its segments are `[k, 2k-1], [2k, 3k-1], ...`,
//! so its round counter at step `t >= k` is `z = ((t - k) mod k) + 1` and a
//! new segment starts exactly at the multiples of `k`. Only
//! `floor(log2 t) + 1` experts are alive at step `t`, which is what makes
//! the scheme practical.
//!
//! Transitions are indexed by the step they arrive at. At arrival `u`, the
//! experts opening a new segment are exactly the powers of two dividing
//! `u` — a downward-closed set, so the restart of period `k` implies the
//! restart of every smaller period. Four designs are provided:
//!
//! * `Naive` — a classic `1/t`-style switching probability toward any
//!   alive expert.
//! * `Better` — switching probability decays with the source's own round
//!   rather than global time.
//! * `Smarter` — switching only at segment boundaries, uniform
//!   `1 / log2(2u)` over the restarting experts.
//! * `Optimal` — switching only at boundaries with weight `k / (2g)` toward
//!   period `k`, where `g` is the largest restarting period; rows sum to
//!   `(2g-1)/(2g)` by the downward closure, and a switch into period `k`
//!   costs `ln(2g/k)`.

use std::collections::BTreeSet;

use crate::engine::{BoundaryPlan, ExpertSchedule, Flow, Scheme};
use crate::error::{Error, Result};
use crate::learner::RegretBoundModel;
use crate::real::{real_f64, real_usize, Real};
use crate::scheme::validate_starts;

/// Transition design for the dyadic scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogWeighting {
    Naive,
    Better,
    Smarter,
    Optimal,
}

impl LogWeighting {
    pub const ALL: [LogWeighting; 4] = [
        LogWeighting::Naive,
        LogWeighting::Better,
        LogWeighting::Smarter,
        LogWeighting::Optimal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LogWeighting::Naive => "naive",
            LogWeighting::Better => "better",
            LogWeighting::Smarter => "smarter",
            LogWeighting::Optimal => "optimal",
        }
    }
}

/// One dyadic expert, identified by its restart period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicExpertParams {
    period: u64,
}

impl DyadicExpertParams {
    pub fn new(period: u64) -> Result<Self> {
        if period == 0 || !period.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "restart period must be a power of two, got {period}"
            )));
        }
        Ok(Self { period })
    }

    pub fn period(&self) -> u64 {
        self.period
    }
}

impl ExpertSchedule for DyadicExpertParams {
    fn alive_at(&self, t: usize) -> bool {
        t as u64 >= self.period
    }

    fn starts_segment_at(&self, t: usize) -> bool {
        self.alive_at(t) && (t as u64).is_multiple_of(self.period)
    }

    fn label(&self) -> String {
        format!("k={}", self.period)
    }
}

/// Experts alive at step `t`: periods `1, 2, 4, ... <= t`.
pub fn active_experts(t: usize) -> Vec<DyadicExpertParams> {
    let mut out = Vec::new();
    let mut k = 1u64;
    while k <= t as u64 {
        out.push(DyadicExpertParams { period: k });
        k *= 2;
    }
    out
}

/// Round counter of period `k` at step `t >= k`: one at every multiple of
/// `k`, counting up to `k` in between.
pub fn round_index(period: u64, t: usize) -> u64 {
    debug_assert!(t as u64 >= period);
    (t as u64 - period) % period + 1
}

/// Boundary state at an arrival step: who opens a new segment, and the
/// largest period doing so.
#[derive(Debug, Clone)]
pub struct BoundaryContext {
    arrival: usize,
    restarting: Vec<DyadicExpertParams>,
    peak: u64,
}

impl BoundaryContext {
    pub fn at(arrival: usize) -> Self {
        let mut restarting = Vec::new();
        let mut k = 1u64;
        while k <= arrival as u64 {
            if (arrival as u64).is_multiple_of(k) {
                restarting.push(DyadicExpertParams { period: k });
            }
            k *= 2;
        }
        let peak = restarting.last().map(|p| p.period).unwrap_or(1);
        Self {
            arrival,
            restarting,
            peak,
        }
    }

    pub fn arrival(&self) -> usize {
        self.arrival
    }

    /// Experts whose new segment starts at the arrival step. Downward
    /// closed: with period `k` restarting, so does every `k / 2^n >= 1`.
    pub fn restarting(&self) -> &[DyadicExpertParams] {
        &self.restarting
    }

    /// Largest restarting period (the `g` of the optimal design).
    pub fn peak(&self) -> u64 {
        self.peak
    }

    fn restarts(&self, p: &DyadicExpertParams) -> bool {
        (self.arrival as u64).is_multiple_of(p.period)
    }
}

/// `log2(2u)` as a scalar.
fn log2_2u<F: Real>(u: usize) -> F {
    (real_usize::<F>(2) * real_usize::<F>(u)).log2()
}

/// Transition weight `tau_u(from, to)` in linear scale at the context's
/// arrival step. Zero off-pattern, one for a mid-segment self-transition of
/// the boundary-limited designs.
pub fn transition_weight<F: Real>(
    weighting: LogWeighting,
    from: &DyadicExpertParams,
    to: &DyadicExpertParams,
    ctx: &BoundaryContext,
) -> F {
    let u = ctx.arrival;
    if u < 2 || !from.alive_at(u - 1) || !to.alive_at(u) {
        return F::zero();
    }
    match weighting {
        LogWeighting::Naive => {
            if from == to {
                real_usize::<F>(u - 1) / real_usize::<F>(u)
            } else {
                (real_usize::<F>(u) * log2_2u::<F>(u)).recip()
            }
        }
        LogWeighting::Better => {
            let z = real_usize::<F>(round_index(from.period, u) as usize);
            if from == to {
                if ctx.restarts(from) {
                    log2_2u::<F>(u).recip()
                } else {
                    (z - F::one()) / z
                }
            } else {
                (z * log2_2u::<F>(u)).recip()
            }
        }
        LogWeighting::Smarter => {
            if ctx.restarts(from) && ctx.restarts(to) {
                log2_2u::<F>(u).recip()
            } else if from == to {
                F::one()
            } else {
                F::zero()
            }
        }
        LogWeighting::Optimal => {
            if ctx.restarts(from) && ctx.restarts(to) {
                real_usize::<F>(to.period as usize)
                    / (real_usize::<F>(2) * real_usize::<F>(ctx.peak as usize))
            } else if from == to {
                F::one()
            } else {
                F::zero()
            }
        }
    }
}

/// Sum of the transition row of `from` over every expert alive at the
/// arrival step.
pub fn transition_row_sum<F: Real>(
    weighting: LogWeighting,
    from: &DyadicExpertParams,
    ctx: &BoundaryContext,
) -> F {
    let mut sum = F::zero();
    for to in active_experts(ctx.arrival) {
        sum += transition_weight::<F>(weighting, from, &to, ctx);
    }
    sum
}

/// `1 -` the largest switching-row sum at the boundary arriving at `t`.
///
/// For the boundary-limited designs the rows of mid-segment experts sum to
/// exactly one (pure self-carry) and carry no information; the margin
/// reports the binding rows, those of experts opening a new segment. At
/// `t = 1` all mass sits on the period-one expert and the margin is zero.
pub fn validity_margin<F: Real>(weighting: LogWeighting, t: usize) -> F {
    if t < 2 {
        return F::zero();
    }
    let ctx = BoundaryContext::at(t);
    let mut worst = F::zero();
    for from in active_experts(t - 1) {
        let binding = match weighting {
            LogWeighting::Naive | LogWeighting::Better => true,
            LogWeighting::Smarter | LogWeighting::Optimal => ctx.restarts(&from),
        };
        if !binding {
            continue;
        }
        let row = transition_row_sum::<F>(weighting, &from, &ctx);
        if row > worst {
            worst = row;
        }
    }
    F::one() - worst
}

/// One aligned expert-segment piece of a horizon cover.
///
/// The piece occupies the prefix of the period-`period` expert's segment
/// starting at `start`; `len` is the number of steps realised inside the
/// horizon. The two differ only for the final piece, whose segment may
/// outlive the data — the competing path simply stays on that expert
/// mid-segment until the run ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicSegment {
    pub start: usize,
    pub period: u64,
    pub len: usize,
}

impl DyadicSegment {
    /// Last realised step of the piece.
    pub fn end(&self) -> usize {
        self.start + self.len - 1
    }

    /// The expert whose segment this piece is.
    pub fn expert(&self) -> DyadicExpertParams {
        DyadicExpertParams {
            period: self.period,
        }
    }
}

/// Cover `1..=horizon` with expert segments none of which contains a
/// competition change in its interior.
///
/// Walks left to right taking the largest period that divides the current
/// position and straddles no change inside the data; the final piece may
/// overhang the horizon. The piece count stays within `S * log2(8T/S)` for
/// `S` segment starts.
pub fn dyadic_split(horizon: usize, starts: &[usize]) -> Result<Vec<DyadicSegment>> {
    validate_starts(starts, horizon)?;
    let changes: BTreeSet<usize> = starts.iter().copied().collect();
    let mut pieces = Vec::new();
    let mut at = 1usize;
    while at <= horizon {
        let mut period = 1usize << at.trailing_zeros().min(62);
        while period > 1 {
            let probe_end = (at + period - 1).min(horizon);
            if probe_end <= at || changes.range(at + 1..=probe_end).next().is_none() {
                break;
            }
            period /= 2;
        }
        let len = period.min(horizon - at + 1);
        pieces.push(DyadicSegment {
            start: at,
            period: period as u64,
            len,
        });
        at += len;
    }
    Ok(pieces)
}

/// Run lengths of the doubling restart schedule inside a segment: powers of
/// two `1, 2, 4, ...` with the final run truncated to the remaining steps.
pub fn doubling_run_lengths(segment_len: usize) -> Vec<usize> {
    let mut runs = Vec::new();
    let mut remaining = segment_len;
    let mut next = 1usize;
    while remaining > 0 {
        let run = next.min(remaining);
        runs.push(run);
        remaining -= run;
        next = next.saturating_mul(2);
    }
    runs
}

/// Mixture-regret expressions, natural log outside and `log2` inside:
///
/// * `Naive   -> 2 S log2(T/S) ln T`
/// * `Better  -> S log2(T/S) ln(T log2(T) / (S log2(T/S)))`
/// * `Smarter -> S log2(T/S) ln(log2 T)`
/// * `Optimal -> S log2(8T/S) ln 4` (the pre-asymptotic switch accounting).
pub fn mixture_regret_bound<F: Real>(weighting: LogWeighting, segments: usize, horizon: F) -> F {
    let s = real_usize::<F>(segments);
    let two = real_usize::<F>(2);
    let lg_ratio = (horizon / s).log2();
    match weighting {
        LogWeighting::Naive => two * s * lg_ratio * horizon.ln(),
        LogWeighting::Better => s * lg_ratio * (horizon * horizon.log2() / (s * lg_ratio)).ln(),
        LogWeighting::Smarter => s * lg_ratio * horizon.log2().ln(),
        LogWeighting::Optimal => {
            s * (real_usize::<F>(8) * horizon / s).log2() * real_f64::<F>(4.0f64.ln())
        }
    }
}

/// Regret bound of the doubling-trick oracle:
/// `S log2(T/S) * R_B(2T / (S log2(T/S)))`. Zero in the degenerate
/// all-unit-segment case `S = T`.
pub fn doubling_oracle_bound<F: Real>(
    segments: usize,
    horizon: usize,
    model: &RegretBoundModel<F>,
) -> Result<F> {
    if segments < 1 || segments > horizon {
        return Err(Error::InvalidInput(format!(
            "segments {segments} outside 1..={horizon}"
        )));
    }
    if segments == horizon {
        return Ok(F::zero());
    }
    let s = real_usize::<F>(segments);
    let t = real_usize::<F>(horizon);
    let effective = s * (t / s).log2();
    Ok(effective * model.eval(real_usize::<F>(2) * t / effective)?)
}

/// The dyadic scheme bound to a weighting; horizon-free.
#[derive(Debug, Clone, Copy)]
pub struct LogScheme {
    weighting: LogWeighting,
}

impl LogScheme {
    pub fn new(weighting: LogWeighting) -> Self {
        Self { weighting }
    }

    pub fn weighting(&self) -> LogWeighting {
        self.weighting
    }
}

impl<F: Real> Scheme<F> for LogScheme {
    type Params = DyadicExpertParams;

    fn scheme_name(&self) -> &'static str {
        "log"
    }

    fn weighting_name(&self) -> &'static str {
        self.weighting.name()
    }

    fn horizon(&self) -> Option<usize> {
        None
    }

    fn initial_pool(&self) -> Vec<(DyadicExpertParams, F)> {
        vec![(DyadicExpertParams { period: 1 }, F::zero())]
    }

    fn boundary_plan(
        &self,
        arrival: usize,
        pool: &[DyadicExpertParams],
    ) -> Option<BoundaryPlan<DyadicExpertParams, F>> {
        let ctx = BoundaryContext::at(arrival);
        let newborn =
            (arrival >= 2 && (arrival as u64).is_power_of_two()).then_some(DyadicExpertParams {
                period: arrival as u64,
            });
        let mut plan = BoundaryPlan::new();
        plan.spawns.extend(newborn);

        match self.weighting {
            LogWeighting::Naive | LogWeighting::Better => {
                let targets: Vec<DyadicExpertParams> = active_experts(arrival);
                for from in pool {
                    let row: Vec<(DyadicExpertParams, F)> = targets
                        .iter()
                        .map(|to| (*to, transition_weight(self.weighting, from, to, &ctx)))
                        .filter(|(_, w)| *w > F::zero())
                        .collect();
                    plan.flows.push(Flow {
                        sources: vec![*from],
                        targets: row,
                    });
                }
            }
            LogWeighting::Smarter | LogWeighting::Optimal => {
                let sources: Vec<DyadicExpertParams> =
                    pool.iter().filter(|p| ctx.restarts(p)).copied().collect();
                if !sources.is_empty() {
                    let from = sources[0];
                    let targets: Vec<(DyadicExpertParams, F)> = ctx
                        .restarting()
                        .iter()
                        .map(|to| (*to, transition_weight(self.weighting, &from, to, &ctx)))
                        .collect();
                    plan.flows.push(Flow { sources, targets });
                }
            }
        }
        Some(plan)
    }

    fn log_initial_prior(&self, expert: &DyadicExpertParams) -> Option<F> {
        (expert.period == 1).then(F::zero)
    }

    fn log_transition(
        &self,
        arrival: usize,
        from: &DyadicExpertParams,
        to: &DyadicExpertParams,
    ) -> Option<F> {
        let ctx = BoundaryContext::at(arrival);
        let w: F = transition_weight(self.weighting, from, to, &ctx);
        (w > F::zero()).then(|| w.ln())
    }

    fn canonical_path(&self, starts: &[usize], horizon: usize) -> Result<Vec<DyadicExpertParams>> {
        let pieces = dyadic_split(horizon, starts)?;
        let mut path = Vec::with_capacity(horizon);
        for piece in pieces {
            for _ in 0..piece.len {
                path.push(piece.expert());
            }
        }
        Ok(path)
    }

    fn mixture_regret_bound(&self, segments: usize, horizon: F) -> F {
        mixture_regret_bound(self.weighting, segments, horizon)
    }
}
