//! Interval scheme: one expert per (start, finish) pair.
//!
//! Expert `(s, f)` runs the base learner on steps `s..=f-1` (runtime
//! `l = f - s`) and then hands its mass to the experts born at `f`. Since a
//! length-`T` run only admits `O(T^2)` distinct intervals, this scheme keeps
//! the full modelling power of the exhaustive one at polynomial cost: any
//! segmentation is realised by chaining the experts that cover its segments
//! exactly.
//!
//! Redistribution weights depend only on the newborn's runtime `l`:
//!
//! * `Naive` — `1/T` (needs the horizon; at most `T` experts are born per
//!   step, so rows stay substochastic).
//! * `Better` — `1/l - 1/(l+1)`; telescopes below one over any newborn set
//!   because runtimes at a given birth step are distinct.
//! * `Optimal` — `(2l)^(-1) / (1 + ln l)^2`; substochastic because the
//!   summand is decreasing in `l` and its tail integral stays below one.
//!
//! The step-one priors reuse the same weights through a virtual expert that
//! "finishes" at step one with unit mass, seeding every `(1, f)` newborn.

use crate::engine::{BoundaryPlan, ExpertSchedule, Flow, Scheme};
use crate::error::{Error, Result};
use crate::real::{real_usize, Real};
use crate::scheme::validate_starts;

/// Redistribution design for the interval scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuadWeighting {
    Naive,
    Better,
    Optimal,
}

impl QuadWeighting {
    pub const ALL: [QuadWeighting; 3] = [
        QuadWeighting::Naive,
        QuadWeighting::Better,
        QuadWeighting::Optimal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QuadWeighting::Naive => "naive",
            QuadWeighting::Better => "better",
            QuadWeighting::Optimal => "optimal",
        }
    }
}

/// One interval expert: alive on `start..=finish-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntervalExpertParams {
    pub start: usize,
    pub finish: usize,
}

impl IntervalExpertParams {
    pub fn new(start: usize, finish: usize) -> Result<Self> {
        if start < 1 || finish <= start {
            return Err(Error::InvalidInput(format!(
                "interval expert needs 1 <= start < finish, got ({start}, {finish})"
            )));
        }
        Ok(Self { start, finish })
    }

    /// Number of steps the base learner runs: `finish - start`.
    pub fn runtime(&self) -> usize {
        self.finish - self.start
    }
}

impl ExpertSchedule for IntervalExpertParams {
    fn alive_at(&self, t: usize) -> bool {
        t >= self.start && t < self.finish
    }

    fn starts_segment_at(&self, t: usize) -> bool {
        t == self.start
    }

    fn label(&self) -> String {
        format!("[{},{})", self.start, self.finish)
    }
}

/// All experts born at step `t`: finishes `t+1..=horizon+1`.
pub fn spawn_schedule(horizon: usize, t: usize) -> Vec<IntervalExpertParams> {
    (t + 1..=horizon + 1)
        .map(|f| IntervalExpertParams {
            start: t,
            finish: f,
        })
        .collect()
}

/// Weight handed to a newborn of the given runtime.
pub fn redistribution_weight<F: Real>(
    weighting: QuadWeighting,
    horizon: usize,
    runtime: usize,
) -> F {
    let l = real_usize::<F>(runtime);
    match weighting {
        QuadWeighting::Naive => F::one() / real_usize::<F>(horizon),
        QuadWeighting::Better => F::one() / l - F::one() / (l + F::one()),
        // ln(e*l) written as 1 + ln(l): exact at runtime one.
        QuadWeighting::Optimal => {
            let log_term = F::one() + l.ln();
            (real_usize::<F>(2) * l * log_term * log_term).recip()
        }
    }
}

/// Full transition weight `tau_t(dying, born)` in linear scale: `1` for an
/// expert staying alive, the redistribution weight when `t` matches the
/// death of `dying` and the birth of `born`, and `0` off the pattern.
pub fn transition_weight<F: Real>(
    weighting: QuadWeighting,
    horizon: usize,
    dying: &IntervalExpertParams,
    born: &IntervalExpertParams,
    t: usize,
) -> F {
    if dying == born && t < dying.finish && t > dying.start {
        return F::one();
    }
    if t == dying.finish && t == born.start {
        return redistribution_weight(weighting, horizon, born.runtime());
    }
    F::zero()
}

/// `1 -` the total weight handed to the newborns of step `t`. Nonnegative
/// for every variant.
pub fn validity_margin<F: Real>(weighting: QuadWeighting, t: usize, horizon: usize) -> F {
    let newborn_count = horizon + 1 - t;
    match weighting {
        // Exactly (T - count)/T; zero at t = 1 where count = T.
        QuadWeighting::Naive => real_usize::<F>(horizon - newborn_count) / real_usize::<F>(horizon),
        // The sum telescopes to 1 - 1/(count + 1).
        QuadWeighting::Better => (real_usize::<F>(newborn_count) + F::one()).recip(),
        QuadWeighting::Optimal => {
            let mut sum = F::zero();
            for l in 1..=newborn_count {
                sum += redistribution_weight::<F>(weighting, horizon, l);
            }
            F::one() - sum
        }
    }
}

/// Mixture-regret expressions: `Naive -> S ln T`,
/// `Better -> S ln(T/S) + S ln(T/S + 1)`,
/// `Optimal -> S ln(2T/S) + 2S ln(ln(T/S) + 1)`.
pub fn mixture_regret_bound<F: Real>(weighting: QuadWeighting, segments: usize, horizon: F) -> F {
    let s = real_usize::<F>(segments);
    let two = real_usize::<F>(2);
    let ratio = horizon / s;
    match weighting {
        QuadWeighting::Naive => s * horizon.ln(),
        QuadWeighting::Better => s * ratio.ln() + s * (ratio + F::one()).ln(),
        QuadWeighting::Optimal => s * (two * ratio).ln() + two * s * (ratio.ln() + F::one()).ln(),
    }
}

/// The interval scheme bound to a weighting and working horizon.
///
/// Only the naive weighting actually uses the horizon in its weights; the
/// other two enumerate newborn finish times up to it but would keep every
/// existing weight unchanged if it were extended.
#[derive(Debug, Clone, Copy)]
pub struct QuadScheme {
    weighting: QuadWeighting,
    horizon: usize,
}

impl QuadScheme {
    pub fn new(weighting: QuadWeighting, horizon: usize) -> Result<Self> {
        if horizon < 1 {
            return Err(Error::InvalidInput("horizon must be at least 1".into()));
        }
        Ok(Self { weighting, horizon })
    }

    pub fn weighting(&self) -> QuadWeighting {
        self.weighting
    }

    fn valid_params(&self, p: &IntervalExpertParams) -> bool {
        p.start >= 1 && p.start < p.finish && p.finish <= self.horizon + 1
    }
}

impl<F: Real> Scheme<F> for QuadScheme {
    type Params = IntervalExpertParams;

    fn scheme_name(&self) -> &'static str {
        "quad"
    }

    fn weighting_name(&self) -> &'static str {
        self.weighting.name()
    }

    fn horizon(&self) -> Option<usize> {
        Some(self.horizon)
    }

    fn initial_pool(&self) -> Vec<(IntervalExpertParams, F)> {
        spawn_schedule(self.horizon, 1)
            .into_iter()
            .map(|p| {
                let w: F = redistribution_weight(self.weighting, self.horizon, p.runtime());
                (p, w.ln())
            })
            .collect()
    }

    fn boundary_plan(
        &self,
        arrival: usize,
        pool: &[IntervalExpertParams],
    ) -> Option<BoundaryPlan<IntervalExpertParams, F>> {
        let dying: Vec<IntervalExpertParams> = pool
            .iter()
            .filter(|p| p.finish == arrival)
            .copied()
            .collect();
        let newborn = spawn_schedule(self.horizon, arrival);
        if dying.is_empty() && newborn.is_empty() {
            return None;
        }
        let targets = newborn
            .iter()
            .map(|p| {
                let w: F = redistribution_weight(self.weighting, self.horizon, p.runtime());
                (*p, w)
            })
            .collect();
        Some(BoundaryPlan {
            spawns: newborn,
            flows: vec![Flow {
                sources: dying.clone(),
                targets,
            }],
            retire: dying,
        })
    }

    fn log_initial_prior(&self, expert: &IntervalExpertParams) -> Option<F> {
        if !self.valid_params(expert) || expert.start != 1 {
            return None;
        }
        let w: F = redistribution_weight(self.weighting, self.horizon, expert.runtime());
        Some(w.ln())
    }

    fn log_transition(
        &self,
        arrival: usize,
        from: &IntervalExpertParams,
        to: &IntervalExpertParams,
    ) -> Option<F> {
        if arrival < 2
            || arrival > self.horizon
            || !self.valid_params(from)
            || !self.valid_params(to)
        {
            return None;
        }
        if from == to && from.alive_at(arrival - 1) && from.alive_at(arrival) {
            return Some(F::zero());
        }
        if from.finish == arrival && to.start == arrival {
            let w: F = redistribution_weight(self.weighting, self.horizon, to.runtime());
            return Some(w.ln());
        }
        None
    }

    fn canonical_path(
        &self,
        starts: &[usize],
        horizon: usize,
    ) -> Result<Vec<IntervalExpertParams>> {
        if horizon != self.horizon {
            return Err(Error::InvalidInput(format!(
                "path horizon {horizon} does not match scheme horizon {}",
                self.horizon
            )));
        }
        validate_starts(starts, horizon)?;
        let mut path = Vec::with_capacity(horizon);
        for (i, &start) in starts.iter().enumerate() {
            let finish = starts.get(i + 1).copied().unwrap_or(horizon + 1);
            let expert = IntervalExpertParams::new(start, finish)?;
            for _ in start..finish {
                path.push(expert);
            }
        }
        Ok(path)
    }

    fn mixture_regret_bound(&self, segments: usize, horizon: F) -> F {
        mixture_regret_bound(self.weighting, segments, horizon)
    }
}
