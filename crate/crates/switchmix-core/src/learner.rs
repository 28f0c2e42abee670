//! Resettable base learners competing against the best fixed estimate.
//!
//! The mixture machinery is agnostic to what runs inside each expert; it
//! only needs an online learner that can be reset to a cold state and whose
//! regret against the best fixed estimate admits a concave, nondecreasing
//! bound `R_B(t)`. Two learners are provided for the square loss:
//!
//! * [`LearnerKind::FollowTheLeader`] — predicts the clamped running mean,
//!   which is the exact loss minimiser over the history; parameter-free and
//!   logarithmic-regret for the square loss.
//! * [`LearnerKind::GridAggregation`] — exponential-weights aggregation over
//!   a uniform grid on `[-1, 1]`, combined with the family's own mixing
//!   rule; its cumulative loss trails the best grid point by at most
//!   `ln(N) / alpha`.
//!
//! Cold-start prediction is `0` (the domain midpoint) for both.

use crate::error::{Error, Result};
use crate::loss::{Estimate, LossFamily, Observation, WeightedEstimates};
use crate::real::{clamp, real_usize, Real};

/// Default grid resolution for [`LearnerKind::GridAggregation`].
pub const DEFAULT_GRID_POINTS: usize = 65;

/// Which base learner to instantiate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LearnerKind {
    FollowTheLeader,
    GridAggregation { points: usize },
}

#[derive(Debug, Clone)]
enum LearnerState<F> {
    Ftl { count: u64, sum: F },
    Grid { grid: Vec<F>, log_weights: Vec<F> },
}

/// A resettable online learner bound to a loss family.
#[derive(Debug, Clone)]
pub struct BaseLearner<F> {
    kind: LearnerKind,
    family: LossFamily<F>,
    state: LearnerState<F>,
}

impl<F: Real> BaseLearner<F> {
    pub fn new(kind: LearnerKind, family: LossFamily<F>) -> Self {
        let state = Self::initial_state(kind);
        Self {
            kind,
            family,
            state,
        }
    }

    fn initial_state(kind: LearnerKind) -> LearnerState<F> {
        match kind {
            LearnerKind::FollowTheLeader => LearnerState::Ftl {
                count: 0,
                sum: F::zero(),
            },
            LearnerKind::GridAggregation { points } => {
                let n = points.max(1);
                let grid = if n == 1 {
                    vec![F::zero()]
                } else {
                    (0..n)
                        .map(|i| -F::one() + real_usize::<F>(2 * i) / real_usize::<F>(n - 1))
                        .collect()
                };
                LearnerState::Grid {
                    grid,
                    log_weights: vec![F::zero(); n],
                }
            }
        }
    }

    pub fn kind(&self) -> LearnerKind {
        self.kind
    }

    /// Restore the initial state; subsequent behaviour is independent of any
    /// pre-reset history. Idempotent.
    pub fn reset(&mut self) {
        self.state = Self::initial_state(self.kind);
    }

    /// A cold copy of this learner (same kind and family, initial state).
    pub fn fresh(&self) -> Self {
        Self::new(self.kind, self.family.clone())
    }

    /// Current prediction. Never fails; cold start returns `0`.
    pub fn predict(&self) -> Estimate<F> {
        match &self.state {
            LearnerState::Ftl { count, sum } => {
                if *count == 0 {
                    Estimate(F::zero())
                } else {
                    let mean = *sum / F::from_u64(*count).expect("count fits");
                    Estimate(clamp(mean, -F::one(), F::one()))
                }
            }
            LearnerState::Grid { grid, log_weights } => {
                let ests: Vec<Estimate<F>> = grid.iter().map(|&g| Estimate(g)).collect();
                let w = WeightedEstimates::normalized(ests, log_weights.clone())
                    .expect("grid weights stay finite");
                self.family.mix(&w).expect("grid estimates in domain")
            }
        }
    }

    /// Incorporate one observation.
    pub fn update(&mut self, obs: Observation<F>) -> Result<()> {
        // Surfaces domain violations before touching state.
        let alpha = self.family.alpha();
        match &mut self.state {
            LearnerState::Ftl { count, sum } => {
                self.family.evaluate(Estimate(F::zero()), obs)?;
                *count += 1;
                *sum += obs.0;
            }
            LearnerState::Grid { grid, log_weights } => {
                let losses: Result<Vec<F>> = grid
                    .iter()
                    .map(|&g| self.family.evaluate(Estimate(g), obs))
                    .collect();
                for (lw, l) in log_weights.iter_mut().zip(losses?) {
                    *lw -= alpha * l;
                }
            }
        }
        Ok(())
    }

    /// For tests: the FTL running statistics, if applicable.
    pub fn ftl_state(&self) -> Option<(u64, F)> {
        match &self.state {
            LearnerState::Ftl { count, sum } => Some((*count, *sum)),
            _ => None,
        }
    }

    /// For tests: grid log-weights, if applicable.
    pub fn grid_log_weights(&self) -> Option<&[F]> {
        match &self.state {
            LearnerState::Grid { log_weights, .. } => Some(log_weights),
            _ => None,
        }
    }
}

/// A concave, nondecreasing regret-bound descriptor
/// `R_B(t) = c * ln(t + 1) + d` for the base learner.
///
/// The constants are calibration choices, not derived quantities; the
/// descriptor only has to dominate the learner's measured regret so the
/// segment-oracle comparisons are meaningful.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretBoundModel<F> {
    pub log_coeff: F,
    pub offset: F,
}

impl<F: Real> RegretBoundModel<F> {
    pub fn new(log_coeff: F, offset: F) -> Self {
        Self { log_coeff, offset }
    }

    /// A constant bound `R_B(t) = d`, the regime where the doubling-oracle
    /// bound is tight.
    pub fn constant(offset: F) -> Self {
        Self::new(F::zero(), offset)
    }

    /// `R_B(t) = c * ln(t + 1)`.
    pub fn logarithmic(log_coeff: F) -> Self {
        Self::new(log_coeff, F::zero())
    }

    /// Evaluate the bound at a (possibly fractional) horizon `t >= 1`.
    pub fn eval(&self, t: F) -> Result<F> {
        if t < F::one() || t.is_nan() {
            return Err(Error::InvalidInput(format!(
                "regret bound evaluated at t = {t} < 1"
            )));
        }
        Ok(self.log_coeff * (t + F::one()).ln() + self.offset)
    }
}
