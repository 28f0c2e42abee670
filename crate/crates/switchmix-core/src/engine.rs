//! The generic aggregation engine.
//!
//! A pool of hyper-experts runs in parallel; at step `t` the engine combines
//! their estimates through the loss family's mixing rule,
//!
//! ```text
//!     theta_hat_t = F({theta_{i,t}, P_{i,t}}),      P_{i,t} ∝ w_{i,t},
//! ```
//!
//! observes `x_t`, charges every expert its own loss, and pushes mass along
//! the scheme's transition weights:
//!
//! ```text
//!     w_{j,t+1} = sum_i w_{i,t} * exp(-alpha * l_t(theta_{i,t})) * tau_{t+1}(i, j).
//! ```
//!
//! The transition kernel is never materialised as a matrix. A scheme
//! describes each boundary as sparse events — spawned experts, retired
//! experts, and mass flows whose per-target weights do not depend on the
//! source — and the engine applies them in the log domain. Experts not
//! named by any flow carry their mass unchanged (self-transition one).
//!
//! Because every per-step mixing inequality holds and the transition rows
//! sum to at most one, the run satisfies, for every feasible expert path
//! `{I_t}`:
//!
//! ```text
//!     sum_t l_t(theta_hat_t) <= sum_t l_t(theta_{I_t,t})
//!                               + (1/alpha) * W(path),
//!     W(path) = -ln prod_t tau_t(I_{t-1}, I_t),
//! ```
//!
//! which is checked empirically by [`crate::path::theorem1_bound_check`].

use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::learner::{BaseLearner, LearnerKind};
use crate::loss::{LossFamily, Observation, WeightedEstimates};
use crate::real::{log_sum_exp, Real};

/// Per-expert run schedule: when it exists and when its base learner is
/// reset to a fresh segment.
pub trait ExpertSchedule {
    /// Does this expert participate at step `t` (1-based)?
    fn alive_at(&self, t: usize) -> bool;
    /// Does a new base-learner segment start at step `t`? Birth counts.
    fn starts_segment_at(&self, t: usize) -> bool;
    /// Short human-readable identifier used in diagnostics.
    fn label(&self) -> String;
}

/// One pooled mass flow at a boundary.
///
/// The post-loss mass of all `sources` is summed and every target `j`
/// receives `tau_j` times that total. This is exact whenever the transition
/// weight into `j` is the same for every source, which holds for all
/// schemes in this crate; source-dependent rows are expressed as one flow
/// per source.
#[derive(Debug, Clone)]
pub struct Flow<P, F> {
    pub sources: Vec<P>,
    pub targets: Vec<(P, F)>,
}

/// Sparse description of the boundary between steps `t` and `t + 1`.
#[derive(Debug, Clone, Default)]
pub struct BoundaryPlan<P, F> {
    /// Experts entering the pool at the arrival step, with fresh learners.
    pub spawns: Vec<P>,
    /// Mass flows; experts named as a source send exactly what their flow
    /// says and nothing else.
    pub flows: Vec<Flow<P, F>>,
    /// Experts leaving the pool once flows are applied.
    pub retire: Vec<P>,
}

impl<P, F> BoundaryPlan<P, F> {
    pub fn new() -> Self {
        Self {
            spawns: Vec::new(),
            flows: Vec::new(),
            retire: Vec::new(),
        }
    }
}

/// A hyper-expert scheme plus transition weighting, as seen by the engine.
pub trait Scheme<F: Real> {
    /// Scheme-specific expert parameters.
    type Params: ExpertSchedule + Clone + PartialEq + Eq + Hash + std::fmt::Debug;

    /// Short name used in reports ("exp", "quad", "log").
    fn scheme_name(&self) -> &'static str;
    /// Weighting variant name used in reports.
    fn weighting_name(&self) -> &'static str;
    /// Known horizon, if the scheme requires one.
    fn horizon(&self) -> Option<usize>;

    /// Experts present at step one with their natural-log prior weights.
    /// Priors must sum to at most one.
    fn initial_pool(&self) -> Vec<(Self::Params, F)>;

    /// Sparse events for the boundary arriving at step `arrival >= 2`.
    /// `None` means the identity transition.
    fn boundary_plan(
        &self,
        arrival: usize,
        pool: &[Self::Params],
    ) -> Option<BoundaryPlan<Self::Params, F>>;

    /// `ln tau_1(I_0, expert)` — the log prior mass placed on the expert at
    /// step one, or `None` if the expert starts with zero mass.
    fn log_initial_prior(&self, expert: &Self::Params) -> Option<F>;

    /// `ln tau_arrival(from, to)` for one path step, or `None` when the
    /// transition weight is zero.
    fn log_transition(&self, arrival: usize, from: &Self::Params, to: &Self::Params) -> Option<F>;

    /// The expert path competing with a segmentation whose segments start
    /// at the given steps (first entry is always 1). Returns the expert for
    /// each step `1..=horizon`.
    fn canonical_path(&self, starts: &[usize], horizon: usize) -> Result<Vec<Self::Params>>;

    /// The weighting's mixture-regret bound expression for `segments`
    /// competition segments over `horizon` steps.
    fn mixture_regret_bound(&self, segments: usize, horizon: F) -> F;
}

/// One expert in the pool.
#[derive(Debug, Clone)]
pub struct ExpertRecord<P, F> {
    pub params: P,
    pub learner: BaseLearner<F>,
    /// Natural-log of the unnormalised performance weight.
    pub log_weight: F,
}

/// One step of a recorded run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow<F> {
    pub t: usize,
    pub theta_hat: F,
    pub x: F,
    pub loss: F,
    /// Number of experts that produced an estimate at this step.
    pub pool_size: usize,
    /// `ln sum_i w_{i,t} exp(-alpha l_t(theta_{i,t}))` — total mass after
    /// charging this step's losses, before the boundary transition.
    pub log_total_weight: F,
}

/// Full record of a run; the unit of persistence and analysis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace<F> {
    pub rows: Vec<TraceRow<F>>,
}

impl<F: Real> RunTrace<F> {
    pub fn horizon(&self) -> usize {
        self.rows.len()
    }

    pub fn cumulative_loss(&self) -> F {
        self.rows.iter().map(|r| r.loss).sum()
    }

    pub fn observations(&self) -> Vec<Observation<F>> {
        self.rows.iter().map(|r| Observation(r.x)).collect()
    }

    /// End-of-run mass bound: `-(1/alpha) * ln(total post-loss weight)` at
    /// the final step upper-bounds the cumulative mixture loss.
    pub fn final_log_total_weight(&self) -> F {
        self.rows
            .last()
            .map(|r| r.log_total_weight)
            .unwrap_or_else(F::zero)
    }

    /// CSV serialisation: `t,theta_hat,x,loss,pool_size,log_total_weight`
    /// with 17-significant-digit floats.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,theta_hat,x,loss,pool_size,log_total_weight\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{},{:.16e}",
                r.t, r.theta_hat, r.x, r.loss, r.pool_size, r.log_total_weight
            );
        }
        out
    }
}

/// The live expert pool for one run.
#[derive(Debug, Clone)]
pub struct ExpertPool<S, F>
where
    S: Scheme<F>,
    F: Real,
{
    scheme: S,
    family: LossFamily<F>,
    prototype: BaseLearner<F>,
    time: usize,
    experts: Vec<ExpertRecord<S::Params, F>>,
    index: HashMap<S::Params, usize>,
}

impl<S, F> ExpertPool<S, F>
where
    S: Scheme<F>,
    F: Real,
{
    pub fn new(scheme: S, family: LossFamily<F>, learner: LearnerKind) -> Self {
        let prototype = BaseLearner::new(learner, family.clone());
        let initial = scheme.initial_pool();
        let mut experts = Vec::with_capacity(initial.len());
        let mut index = HashMap::with_capacity(initial.len());
        for (params, log_prior) in initial {
            index.insert(params.clone(), experts.len());
            experts.push(ExpertRecord {
                params,
                learner: prototype.fresh(),
                log_weight: log_prior,
            });
        }
        Self {
            scheme,
            family,
            prototype,
            time: 1,
            experts,
            index,
        }
    }

    pub fn scheme(&self) -> &S {
        &self.scheme
    }

    /// The step the pool will execute next (1-based).
    pub fn time(&self) -> usize {
        self.time
    }

    pub fn experts(&self) -> &[ExpertRecord<S::Params, F>] {
        &self.experts
    }

    /// Execute one round: predict, observe, charge losses, move mass.
    pub fn step(&mut self, obs: Observation<F>) -> Result<TraceRow<F>> {
        let t = self.time;
        if let Some(h) = self.scheme.horizon() {
            if t > h {
                return Err(Error::RunComplete(h));
            }
        }

        // Combined estimate from the current pool.
        let estimates: Vec<_> = self.experts.iter().map(|e| e.learner.predict()).collect();
        let log_weights: Vec<F> = self.experts.iter().map(|e| e.log_weight).collect();
        let weighted = WeightedEstimates::normalized(estimates.clone(), log_weights)?;
        let theta_hat = self.family.mix(&weighted)?;
        let mix_loss = self.family.evaluate(theta_hat, obs)?;

        // Charge each expert its own loss.
        let alpha = self.family.alpha();
        for (expert, est) in self.experts.iter_mut().zip(estimates.iter()) {
            let l = self.family.evaluate(*est, obs)?;
            expert.log_weight -= alpha * l;
        }
        let post_loss: Vec<F> = self.experts.iter().map(|e| e.log_weight).collect();
        let row = TraceRow {
            t,
            theta_hat: theta_hat.0,
            x: obs.0,
            loss: mix_loss,
            pool_size: self.experts.len(),
            log_total_weight: log_sum_exp(&post_loss),
        };

        // Feed the observation to every live learner.
        for expert in &mut self.experts {
            expert.learner.update(obs)?;
        }

        // Boundary into t + 1, unless the run just ended.
        let arrival = t + 1;
        let within = self.scheme.horizon().is_none_or(|h| arrival <= h);
        if within {
            let pool_params: Vec<S::Params> =
                self.experts.iter().map(|e| e.params.clone()).collect();
            if let Some(plan) = self.scheme.boundary_plan(arrival, &pool_params) {
                self.apply_boundary(plan)?;
            }
            for expert in &mut self.experts {
                if expert.params.starts_segment_at(arrival) {
                    expert.learner.reset();
                }
            }
        }
        self.time = arrival;
        Ok(row)
    }

    fn apply_boundary(&mut self, plan: BoundaryPlan<S::Params, F>) -> Result<()> {
        // Spawns first so flows may target them uniformly.
        for params in plan.spawns {
            if self.index.contains_key(&params) {
                return Err(Error::InvalidInput(format!(
                    "scheme spawned an expert already in the pool: {}",
                    params.label()
                )));
            }
            self.index.insert(params.clone(), self.experts.len());
            self.experts.push(ExpertRecord {
                params,
                learner: self.prototype.fresh(),
                log_weight: F::neg_infinity(),
            });
        }

        if !plan.flows.is_empty() {
            let mut is_source = vec![false; self.experts.len()];
            let mut contributions: Vec<Vec<F>> = vec![Vec::new(); self.experts.len()];
            for flow in &plan.flows {
                let mut source_masses = Vec::with_capacity(flow.sources.len());
                for src in &flow.sources {
                    let &i = self.index.get(src).ok_or_else(|| {
                        Error::InvalidInput(format!("flow source not in pool: {}", src.label()))
                    })?;
                    is_source[i] = true;
                    source_masses.push(self.experts[i].log_weight);
                }
                let pooled = log_sum_exp(&source_masses);
                for (target, tau) in &flow.targets {
                    let &j = self.index.get(target).ok_or_else(|| {
                        Error::InvalidInput(format!("flow target not in pool: {}", target.label()))
                    })?;
                    contributions[j].push(pooled + tau.ln());
                }
            }
            for (i, expert) in self.experts.iter_mut().enumerate() {
                let mut terms = std::mem::take(&mut contributions[i]);
                if !is_source[i] {
                    terms.push(expert.log_weight);
                }
                expert.log_weight = log_sum_exp(&terms);
            }
        }

        for params in &plan.retire {
            let Some(i) = self.index.remove(params) else {
                return Err(Error::InvalidInput(format!(
                    "cannot retire unknown expert: {}",
                    params.label()
                )));
            };
            self.experts.swap_remove(i);
            if i < self.experts.len() {
                self.index.insert(self.experts[i].params.clone(), i);
            }
        }
        Ok(())
    }
}

/// Run the mixture over a full observation sequence and record the trace.
pub fn run_mixture<S, F>(
    scheme: S,
    family: LossFamily<F>,
    learner: LearnerKind,
    data: &[Observation<F>],
) -> Result<RunTrace<F>>
where
    S: Scheme<F>,
    F: Real,
{
    if data.is_empty() {
        return Err(Error::InvalidInput("empty observation sequence".into()));
    }
    if let Some(h) = scheme.horizon() {
        if data.len() != h {
            return Err(Error::InvalidInput(format!(
                "scheme horizon {h} does not match data length {}",
                data.len()
            )));
        }
    }
    let mut pool = ExpertPool::new(scheme, family, learner);
    let mut rows = Vec::with_capacity(data.len());
    for &obs in data {
        rows.push(pool.step(obs)?);
    }
    Ok(RunTrace { rows })
}
