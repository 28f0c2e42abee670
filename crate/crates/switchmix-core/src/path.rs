//! Expert paths: feasibility, mixture cost, and the loss-bound check.
//!
//! A path assigns one pool expert to every step. Its mixture cost is the
//! negative log of the product of transition weights along it, with the
//! first factor being the initial prior mass of the first expert. The run's
//! cumulative loss never exceeds any feasible path's loss plus `1/alpha`
//! times that cost; [`theorem1_bound_check`] measures the slack.

use std::collections::HashMap;

use crate::engine::{ExpertSchedule, RunTrace, Scheme};
use crate::error::{Error, Result};
use crate::learner::{BaseLearner, LearnerKind};
use crate::loss::{Estimate, LossFamily, Observation};
use crate::real::Real;

/// An expert index sequence `{I_t}`, one pool expert per step.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec<P> {
    pub experts: Vec<P>,
}

impl<P: Clone + PartialEq> PathSpec<P> {
    pub fn new(experts: Vec<P>) -> Self {
        Self { experts }
    }

    pub fn horizon(&self) -> usize {
        self.experts.len()
    }

    /// `1 +` the number of expert switches.
    pub fn segment_count(&self) -> usize {
        if self.experts.is_empty() {
            return 0;
        }
        1 + self.experts.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// `W(path) = -ln[tau_1(I_0, I_1) * prod_{t=2}^{T} tau_t(I_{t-1}, I_t)]`.
///
/// Fails with [`Error::InfeasiblePath`] on any zero-weight step.
pub fn path_mixture_cost<S, F>(scheme: &S, path: &PathSpec<S::Params>) -> Result<F>
where
    S: Scheme<F>,
    F: Real,
{
    if path.experts.is_empty() {
        return Err(Error::InvalidInput("empty path".into()));
    }
    let mut log_prob = scheme
        .log_initial_prior(&path.experts[0])
        .ok_or(Error::InfeasiblePath { t: 1 })?;
    for (idx, pair) in path.experts.windows(2).enumerate() {
        let arrival = idx + 2;
        let step = scheme
            .log_transition(arrival, &pair[0], &pair[1])
            .ok_or(Error::InfeasiblePath { t: arrival })?;
        log_prob += step;
    }
    Ok(-log_prob)
}

/// Replay one expert's base-learner run over the data: the prediction it
/// would contribute at each step, `None` while it is not alive.
///
/// The replay applies the same reset schedule the engine applies, so the
/// values agree bit-for-bit with the expert's in-pool predictions.
pub fn expert_predictions<P, F>(
    params: &P,
    family: &LossFamily<F>,
    learner: LearnerKind,
    data: &[Observation<F>],
) -> Result<Vec<Option<Estimate<F>>>>
where
    P: ExpertSchedule,
    F: Real,
{
    let mut out = Vec::with_capacity(data.len());
    let mut model = BaseLearner::new(learner, family.clone());
    for (idx, &obs) in data.iter().enumerate() {
        let t = idx + 1;
        if params.starts_segment_at(t) {
            model.reset();
        }
        if params.alive_at(t) {
            out.push(Some(model.predict()));
            model.update(obs)?;
        } else {
            out.push(None);
        }
    }
    Ok(out)
}

/// Cumulative loss of the path's per-step expert predictions.
pub fn path_loss<S, F>(
    scheme: &S,
    family: &LossFamily<F>,
    learner: LearnerKind,
    path: &PathSpec<S::Params>,
    data: &[Observation<F>],
) -> Result<F>
where
    S: Scheme<F>,
    F: Real,
{
    let _ = scheme;
    if path.experts.len() != data.len() {
        return Err(Error::InvalidInput(format!(
            "path length {} does not match data length {}",
            path.experts.len(),
            data.len()
        )));
    }
    let mut cache: HashMap<&S::Params, Vec<Option<Estimate<F>>>> = HashMap::new();
    let mut total = F::zero();
    for (idx, params) in path.experts.iter().enumerate() {
        let t = idx + 1;
        if !cache.contains_key(params) {
            cache.insert(params, expert_predictions(params, family, learner, data)?);
        }
        let series = &cache[params];
        let estimate = series[idx].ok_or(Error::InfeasiblePath { t })?;
        total += family.evaluate(estimate, data[idx])?;
    }
    Ok(total)
}

/// Slack of the run's path bound:
///
/// ```text
///     [path loss + W(path)/alpha] - mixture loss.
/// ```
///
/// Contract: at least `-1e-8` for every feasible path of the scheme the
/// trace was produced with. Infeasible paths are reported as
/// [`Error::InfeasiblePath`]; for those the bound holds vacuously (its
/// right-hand side is infinite).
pub fn theorem1_bound_check<S, F>(
    scheme: &S,
    family: &LossFamily<F>,
    learner: LearnerKind,
    trace: &RunTrace<F>,
    path: &PathSpec<S::Params>,
) -> Result<F>
where
    S: Scheme<F>,
    F: Real,
{
    let data = trace.observations();
    let cost: F = path_mixture_cost(scheme, path)?;
    let ploss = path_loss(scheme, family, learner, path, &data)?;
    Ok(ploss + cost / family.alpha() - trace.cumulative_loss())
}
