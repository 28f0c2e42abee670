//! Mixable loss families and their substitution (mixing) rules.
//!
//! A loss `l(theta, x)` is alpha-mixable when a surrogate rule `F` exists
//! mapping weighted estimates to a single estimate `theta_hat` with
//!
//! ```text
//!     exp(-alpha * l(theta_hat, x)) >= sum_i P_i exp(-alpha * l(theta_i, x))
//! ```
//!
//! for every admissible observation `x`. Two families are provided:
//!
//! * the square loss `(theta - x)^2` on `[-1, 1]`, mixable with
//!   `alpha = 1/2`, whose substitution rule is
//!   `theta_hat = 1/2 * [ln sum_i P_i e^{-(theta_i-1)^2/2}
//!                     - ln sum_i P_i e^{-(theta_i+1)^2/2}]`
//!   (the `q = 0` term of the textbook three-term sum vanishes because it is
//!   multiplied by `q`); and
//! * a generic lambda-exp-concave family whose surrogate is the weighted
//!   mean of the estimates.
//!
//! All weights are handled in the natural-log domain; mixtures renormalise
//! internally, so adding a common constant to every log-weight never changes
//! the combined estimate.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::real::{clamp, log_sum_exp, real_f64, real_usize, Real};

/// An observation `x_t` (scalar; the square-loss family requires `[-1, 1]`).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Observation<F>(pub F);

/// An estimate `theta` (scalar; the square-loss family requires `[-1, 1]`).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Estimate<F>(pub F);

/// Loss callback used by the exp-concave family: `(theta, x) -> loss`.
pub type LossFn<F> = Arc<dyn Fn(F, F) -> F + Send + Sync>;

/// Which concrete loss the family evaluates.
#[derive(Clone)]
pub enum LossKind<F> {
    /// `(theta - x)^2` on `[-1, 1]`.
    Square,
    /// A lambda-exp-concave loss mixed by taking the weighted mean.
    ExpConcaveMean { lambda: F, loss: LossFn<F> },
}

impl<F> fmt::Debug for LossKind<F>
where
    F: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossKind::Square => write!(f, "Square"),
            LossKind::ExpConcaveMean { lambda, .. } => {
                write!(f, "ExpConcaveMean(lambda = {lambda:?})")
            }
        }
    }
}

/// An alpha-mixable loss family together with its substitution rule.
#[derive(Clone, Debug)]
pub struct LossFamily<F> {
    alpha: F,
    kind: LossKind<F>,
}

impl<F: Real> LossFamily<F> {
    /// The square loss; mixable with `alpha = 1/2` exactly.
    pub fn square() -> Self {
        Self {
            alpha: real_f64(0.5),
            kind: LossKind::Square,
        }
    }

    /// A lambda-exp-concave loss; the surrogate is the weighted mean and the
    /// mixability constant equals `lambda`.
    pub fn exp_concave_mean(lambda: F, loss: LossFn<F>) -> Result<Self> {
        if lambda <= F::zero() {
            return Err(Error::InvalidInput(
                "exp-concavity constant must be positive".into(),
            ));
        }
        Ok(Self {
            alpha: lambda,
            kind: LossKind::ExpConcaveMean { lambda, loss },
        })
    }

    /// The mixability constant alpha.
    pub fn alpha(&self) -> F {
        self.alpha
    }

    pub fn kind(&self) -> &LossKind<F> {
        &self.kind
    }

    fn check_domain(&self, what: &'static str, value: F) -> Result<()> {
        match self.kind {
            LossKind::Square => {
                if !(value >= -F::one() && value <= F::one()) {
                    return Err(Error::DomainViolation {
                        what,
                        value: value.to_f64().unwrap_or(f64::NAN),
                        lo: -1.0,
                        hi: 1.0,
                    });
                }
                Ok(())
            }
            LossKind::ExpConcaveMean { .. } => Ok(()),
        }
    }

    /// Evaluate `l(theta, x)`.
    pub fn evaluate(&self, estimate: Estimate<F>, obs: Observation<F>) -> Result<F> {
        self.check_domain("estimate", estimate.0)?;
        self.check_domain("observation", obs.0)?;
        match &self.kind {
            LossKind::Square => {
                let d = estimate.0 - obs.0;
                Ok(d * d)
            }
            LossKind::ExpConcaveMean { loss, .. } => Ok(loss(estimate.0, obs.0)),
        }
    }

    /// Apply the substitution rule to a weighted estimate list.
    ///
    /// Weights are renormalised to a probability distribution first, so the
    /// result depends only on weight ratios. The square-loss output is
    /// clamped to `[-1, 1]`; the closed form is already in range for
    /// in-range inputs, the clamp only absorbs floating-point drift.
    pub fn mix(&self, weighted: &WeightedEstimates<F>) -> Result<Estimate<F>> {
        let log_probs = weighted.normalized_log_weights();
        match &self.kind {
            LossKind::Square => {
                let half = real_f64::<F>(0.5);
                let mut plus = Vec::with_capacity(weighted.len());
                let mut minus = Vec::with_capacity(weighted.len());
                for (est, lp) in weighted.estimates().iter().zip(log_probs.iter()) {
                    self.check_domain("estimate", est.0)?;
                    let dp = est.0 - F::one();
                    let dm = est.0 + F::one();
                    plus.push(*lp - half * dp * dp);
                    minus.push(*lp - half * dm * dm);
                }
                let theta = half * (log_sum_exp(&plus) - log_sum_exp(&minus));
                Ok(Estimate(clamp(theta, -F::one(), F::one())))
            }
            LossKind::ExpConcaveMean { .. } => {
                let mut mean = F::zero();
                for (est, lp) in weighted.estimates().iter().zip(log_probs.iter()) {
                    mean += lp.exp() * est.0;
                }
                Ok(Estimate(mean))
            }
        }
    }

    /// Slack of the mixability inequality at a given observation:
    ///
    /// ```text
    ///     exp(-alpha l(theta_hat, x)) - sum_i P_i exp(-alpha l(theta_i, x))
    /// ```
    ///
    /// Nonnegative (up to float error) whenever `theta_hat` came from
    /// [`LossFamily::mix`] on the same weighted estimates.
    pub fn mixability_deficit(
        &self,
        weighted: &WeightedEstimates<F>,
        theta_hat: Estimate<F>,
        obs: Observation<F>,
    ) -> Result<F> {
        let lhs = (-self.alpha * self.evaluate(theta_hat, obs)?).exp();
        let log_probs = weighted.normalized_log_weights();
        let mut rhs = F::zero();
        for (est, lp) in weighted.estimates().iter().zip(log_probs.iter()) {
            rhs += lp.exp() * (-self.alpha * self.evaluate(*est, obs)?).exp();
        }
        Ok(lhs - rhs)
    }
}

/// Estimates paired with natural-log weights, possibly sub-stochastic.
///
/// Invariants checked at construction: equal nonzero lengths, no NaN, and
/// `log_sum_exp(log_weights) <= 1e-12` (total mass at most one, with float
/// headroom).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedEstimates<F> {
    estimates: Vec<Estimate<F>>,
    log_weights: Vec<F>,
}

/// Headroom allowed on the total-mass invariant.
pub const WEIGHT_SUM_SLACK: f64 = 1e-12;

impl<F: Real> WeightedEstimates<F> {
    pub fn new(estimates: Vec<Estimate<F>>, log_weights: Vec<F>) -> Result<Self> {
        if estimates.is_empty() {
            return Err(Error::EmptyEstimates);
        }
        if estimates.len() != log_weights.len() {
            return Err(Error::InvalidWeights(format!(
                "{} estimates vs {} log-weights",
                estimates.len(),
                log_weights.len()
            )));
        }
        if estimates.iter().any(|e| e.0.is_nan()) {
            return Err(Error::InvalidWeights("NaN estimate".into()));
        }
        if log_weights.iter().any(|w| w.is_nan()) {
            return Err(Error::InvalidWeights("NaN log-weight".into()));
        }
        let total = log_sum_exp(&log_weights);
        if total > real_f64(WEIGHT_SUM_SLACK) {
            return Err(Error::InvalidWeights(format!(
                "total mass exp({total}) exceeds one"
            )));
        }
        Ok(Self {
            estimates,
            log_weights,
        })
    }

    /// Uniform weights over the given estimates.
    pub fn uniform(estimates: Vec<Estimate<F>>) -> Result<Self> {
        let n = estimates.len();
        if n == 0 {
            return Err(Error::EmptyEstimates);
        }
        let lw = -real_usize::<F>(n).ln();
        Self::new(estimates, vec![lw; n])
    }

    /// Normalise arbitrary finite log-weights before construction.
    ///
    /// Useful when weights come from a running product that has decayed far
    /// below one; the invariant is about mass at most one, and normalising
    /// first keeps callers honest.
    pub fn normalized(estimates: Vec<Estimate<F>>, log_weights: Vec<F>) -> Result<Self> {
        if log_weights.is_empty() {
            return Err(Error::EmptyEstimates);
        }
        let total = log_sum_exp(&log_weights);
        if !total.is_finite() {
            return Err(Error::InvalidWeights(
                "cannot normalise weights with non-finite total".into(),
            ));
        }
        let shifted = log_weights.iter().map(|&w| w - total).collect();
        Self::new(estimates, shifted)
    }

    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }

    pub fn estimates(&self) -> &[Estimate<F>] {
        &self.estimates
    }

    pub fn log_weights(&self) -> &[F] {
        &self.log_weights
    }

    /// Log-weights shifted so they sum (in probability) to exactly one.
    pub fn normalized_log_weights(&self) -> Vec<F> {
        let total = log_sum_exp(&self.log_weights);
        self.log_weights.iter().map(|&w| w - total).collect()
    }
}
