//! Exhaustive scheme: one expert per binary reset sequence.
//!
//! For a known horizon `T`, every length-`T` bit vector with a leading one
//! defines an expert that restarts the base learner wherever a bit is set,
//! giving `2^(T-1)` experts. All mass is placed at step one and the
//! transition kernel is the identity afterwards. Intractable beyond small
//! `T`, which is the point: it is the gold-standard reference the
//! polynomial schemes are compared against.
//!
//! Three priors are provided, named by the redundancy they buy:
//!
//! * `Naive` — uniform `2^(-T)`; cost `T ln 2` regardless of the
//!   competition.
//! * `Better` — uniform over segment counts, then uniform over experts with
//!   that count: `(1/T) * C(T, S)^(-1)`.
//! * `Optimal` — `(2eT/S)^(-S)`, substochastic by the binomial bound
//!   `C(T,S) <= (eT/S)^S` together with `sum_S 2^(-S) < 1`.

use crate::engine::{BoundaryPlan, ExpertSchedule, Scheme};
use crate::error::{Error, Result};
use crate::real::{binomial, real_f64, real_usize, Real};

/// Largest horizon accepted without an explicit override.
pub const DEFAULT_HORIZON_CAP: usize = 16;

/// Prior design for the exhaustive scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExpWeighting {
    Naive,
    Better,
    Optimal,
}

impl ExpWeighting {
    pub const ALL: [ExpWeighting; 3] = [
        ExpWeighting::Naive,
        ExpWeighting::Better,
        ExpWeighting::Optimal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExpWeighting::Naive => "naive",
            ExpWeighting::Better => "better",
            ExpWeighting::Optimal => "optimal",
        }
    }
}

/// A reset pattern: `bits[t-1]` is true when a segment starts at step `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryExpertParams {
    bits: Vec<bool>,
}

impl BinaryExpertParams {
    /// Construct from the raw bit pattern; the first bit must be set.
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.first() != Some(&true) {
            return Err(Error::InvalidInput(
                "reset pattern must start a segment at step one".into(),
            ));
        }
        Ok(Self { bits })
    }

    /// The expert whose segments start exactly at the given steps.
    pub fn from_starts(starts: &[usize], horizon: usize) -> Result<Self> {
        let mut bits = vec![false; horizon];
        for &s in starts {
            if s < 1 || s > horizon {
                return Err(Error::InvalidInput(format!(
                    "segment start {s} outside 1..={horizon}"
                )));
            }
            bits[s - 1] = true;
        }
        Self::new(bits)
    }

    pub fn horizon(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of segments: the number of set bits.
    pub fn segment_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl ExpertSchedule for BinaryExpertParams {
    fn alive_at(&self, t: usize) -> bool {
        t >= 1 && t <= self.bits.len()
    }

    fn starts_segment_at(&self, t: usize) -> bool {
        t >= 1 && t <= self.bits.len() && self.bits[t - 1]
    }

    fn label(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

/// All `2^(horizon-1)` experts, in ascending counter order (lower ids first).
pub fn enumerate_experts(horizon: usize, cap: usize) -> Result<Vec<BinaryExpertParams>> {
    if horizon < 1 {
        return Err(Error::InvalidInput("horizon must be at least 1".into()));
    }
    if horizon > cap {
        return Err(Error::HorizonTooLarge {
            given: horizon,
            cap,
        });
    }
    let count: u64 = 1 << (horizon - 1);
    let mut out = Vec::with_capacity(count as usize);
    for mask in 0..count {
        let mut bits = vec![true];
        for pos in 1..horizon {
            bits.push((mask >> (pos - 1)) & 1 == 1);
        }
        out.push(BinaryExpertParams { bits });
    }
    Ok(out)
}

/// The step-one prior `tau_1(I_0, expert)` of a weighting, in linear scale.
pub fn initial_prior<F: Real>(
    weighting: ExpWeighting,
    horizon: usize,
    expert: &BinaryExpertParams,
) -> F {
    let s_count = expert.segment_count();
    match weighting {
        // 2^(-T) as an exact dyadic value.
        ExpWeighting::Naive => real_f64::<F>(0.5).powi(horizon as i32),
        ExpWeighting::Better => {
            let binom = real_f64::<F>(binomial(horizon as u64, s_count as u64) as f64);
            (real_usize::<F>(horizon) * binom).recip()
        }
        ExpWeighting::Optimal => {
            let s = real_usize::<F>(s_count);
            let base = s
                / (real_usize::<F>(2)
                    * real_f64::<F>(std::f64::consts::E)
                    * real_usize::<F>(horizon));
            base.powi(s_count as i32)
        }
    }
}

/// Natural log of [`initial_prior`].
pub fn log_initial_prior<F: Real>(
    weighting: ExpWeighting,
    horizon: usize,
    expert: &BinaryExpertParams,
) -> F {
    let t = real_usize::<F>(horizon);
    let s_count = expert.segment_count();
    let s = real_usize::<F>(s_count);
    match weighting {
        ExpWeighting::Naive => -t * real_f64::<F>(std::f64::consts::LN_2),
        ExpWeighting::Better => {
            let binom = binomial(horizon as u64, s_count as u64) as f64;
            -(t.ln() + real_f64::<F>(binom.ln()))
        }
        // (2eT/S)^(-S): ln = -S (ln 2 + 1 + ln T - ln S).
        ExpWeighting::Optimal => {
            -s * (real_f64::<F>(std::f64::consts::LN_2) + F::one() + t.ln() - s.ln())
        }
    }
}

/// The weighting's mixture-regret expression for `segments` segments over a
/// (possibly fractional) horizon.
pub fn mixture_regret_bound<F: Real>(weighting: ExpWeighting, segments: usize, horizon: F) -> F {
    let s = real_usize::<F>(segments);
    let ln2 = real_f64::<F>(std::f64::consts::LN_2);
    match weighting {
        ExpWeighting::Naive => horizon * ln2,
        ExpWeighting::Better => horizon.ln() + s * (horizon / s).ln(),
        ExpWeighting::Optimal => s * (horizon / s).ln(),
    }
}

/// The exhaustive scheme bound to a weighting and a (capped) horizon.
#[derive(Debug, Clone, Copy)]
pub struct ExpScheme {
    weighting: ExpWeighting,
    horizon: usize,
    cap: usize,
}

impl ExpScheme {
    pub fn new(weighting: ExpWeighting, horizon: usize) -> Result<Self> {
        Self::with_cap(weighting, horizon, DEFAULT_HORIZON_CAP)
    }

    /// Override the horizon cap; the pool still has `2^(horizon-1)` experts.
    pub fn with_cap(weighting: ExpWeighting, horizon: usize, cap: usize) -> Result<Self> {
        if horizon < 1 {
            return Err(Error::InvalidInput("horizon must be at least 1".into()));
        }
        if horizon > cap {
            return Err(Error::HorizonTooLarge {
                given: horizon,
                cap,
            });
        }
        Ok(Self {
            weighting,
            horizon,
            cap,
        })
    }

    pub fn weighting(&self) -> ExpWeighting {
        self.weighting
    }
}

impl<F: Real> Scheme<F> for ExpScheme {
    type Params = BinaryExpertParams;

    fn scheme_name(&self) -> &'static str {
        "exp"
    }

    fn weighting_name(&self) -> &'static str {
        self.weighting.name()
    }

    fn horizon(&self) -> Option<usize> {
        Some(self.horizon)
    }

    fn initial_pool(&self) -> Vec<(BinaryExpertParams, F)> {
        enumerate_experts(self.horizon, self.cap)
            .expect("horizon validated at construction")
            .into_iter()
            .map(|p| {
                let lw = log_initial_prior::<F>(self.weighting, self.horizon, &p);
                (p, lw)
            })
            .collect()
    }

    fn boundary_plan(
        &self,
        _arrival: usize,
        _pool: &[BinaryExpertParams],
    ) -> Option<BoundaryPlan<BinaryExpertParams, F>> {
        None
    }

    fn log_initial_prior(&self, expert: &BinaryExpertParams) -> Option<F> {
        if expert.horizon() != self.horizon {
            return None;
        }
        Some(log_initial_prior::<F>(self.weighting, self.horizon, expert))
    }

    fn log_transition(
        &self,
        arrival: usize,
        from: &BinaryExpertParams,
        to: &BinaryExpertParams,
    ) -> Option<F> {
        if arrival < 2 || arrival > self.horizon || from.horizon() != self.horizon {
            return None;
        }
        (from == to).then(F::zero)
    }

    fn canonical_path(&self, starts: &[usize], horizon: usize) -> Result<Vec<BinaryExpertParams>> {
        if horizon != self.horizon {
            return Err(Error::InvalidInput(format!(
                "path horizon {horizon} does not match scheme horizon {}",
                self.horizon
            )));
        }
        let expert = BinaryExpertParams::from_starts(starts, horizon)?;
        Ok(vec![expert; horizon])
    }

    fn mixture_regret_bound(&self, segments: usize, horizon: F) -> F {
        mixture_regret_bound(self.weighting, segments, horizon)
    }
}
