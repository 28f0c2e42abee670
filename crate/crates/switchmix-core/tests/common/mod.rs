//! Shared helpers for the integration tests: seeded data and a dense
//! reference implementation of the weight recursion.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use switchmix_core::engine::{ExpertPool, Scheme};
use switchmix_core::learner::LearnerKind;
use switchmix_core::loss::{LossFamily, Observation};
use switchmix_core::path::expert_predictions;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform observations on [-1, 1].
pub fn uniform_data(horizon: usize, seed: u64) -> Vec<Observation<f64>> {
    let mut r = rng(seed);
    (0..horizon)
        .map(|_| Observation(r.gen_range(-1.0..=1.0)))
        .collect()
}

/// Piecewise-constant means plus uniform noise, clamped into [-1, 1].
/// Returns the data and the segment start steps.
pub fn piecewise_data(
    horizon: usize,
    segments: usize,
    sigma: f64,
    seed: u64,
) -> (Vec<Observation<f64>>, Vec<usize>) {
    let mut r = rng(seed);
    let mut starts = vec![1usize];
    if segments > 1 {
        let mut cuts: Vec<usize> = Vec::new();
        while cuts.len() < segments - 1 {
            let c = r.gen_range(2..=horizon);
            if !cuts.contains(&c) {
                cuts.push(c);
            }
        }
        cuts.sort_unstable();
        starts.extend(cuts);
    }
    let mut data = Vec::with_capacity(horizon);
    let mut mean = 0.0;
    let mut next_seg = 0usize;
    for t in 1..=horizon {
        if next_seg < starts.len() && starts[next_seg] == t {
            mean = r.gen_range(-1.0..=1.0);
            next_seg += 1;
        }
        let x: f64 = mean + r.gen_range(-sigma..=sigma);
        data.push(Observation(x.clamp(-1.0, 1.0)));
    }
    (data, starts)
}

/// Reference run: the full transition kernel evaluated pointwise over a
/// parameter universe, in linear arithmetic. Returns the combined estimate
/// and the (pre-loss) weight vector at every step.
pub fn dense_reference<S>(
    scheme: &S,
    universe: &[S::Params],
    family: &LossFamily<f64>,
    learner: LearnerKind,
    data: &[Observation<f64>],
) -> (Vec<f64>, Vec<Vec<f64>>)
where
    S: Scheme<f64>,
{
    use switchmix_core::loss::WeightedEstimates;

    let preds: Vec<_> = universe
        .iter()
        .map(|p| expert_predictions(p, family, learner, data).unwrap())
        .collect();
    let alpha = family.alpha();
    let mut weights: Vec<f64> = universe
        .iter()
        .map(|p| {
            scheme
                .log_initial_prior(p)
                .map(|l: f64| l.exp())
                .unwrap_or(0.0)
        })
        .collect();
    let mut thetas = Vec::with_capacity(data.len());
    let mut history = Vec::with_capacity(data.len());

    for step in 1..=data.len() {
        history.push(weights.clone());
        let mut ests = Vec::new();
        let mut lws = Vec::new();
        for (i, &w) in weights.iter().enumerate() {
            if w > 0.0 {
                ests.push(preds[i][step - 1].expect("massive expert must be alive"));
                lws.push(w.ln());
            }
        }
        let we = WeightedEstimates::normalized(ests, lws).unwrap();
        thetas.push(family.mix(&we).unwrap().0);

        let mut post = vec![0.0; universe.len()];
        for (i, &w) in weights.iter().enumerate() {
            if w > 0.0 {
                let l = family
                    .evaluate(preds[i][step - 1].unwrap(), data[step - 1])
                    .unwrap();
                post[i] = w * (-alpha * l).exp();
            }
        }
        if step == data.len() {
            break;
        }
        let arrival = step + 1;
        let mut next = vec![0.0; universe.len()];
        for (i, &m) in post.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for (j, q) in universe.iter().enumerate() {
                if let Some(lt) = scheme.log_transition(arrival, &universe[i], q) {
                    next[j] += m * lt.exp();
                }
            }
        }
        weights = next;
    }
    (thetas, history)
}

/// Drive the engine step by step, checking its pool weights and combined
/// estimates against the dense reference at every step.
pub fn assert_engine_matches_dense<S>(
    scheme: S,
    universe: &[S::Params],
    data: &[Observation<f64>],
    tol: f64,
) where
    S: Scheme<f64> + Clone,
{
    let family = LossFamily::<f64>::square();
    let learner = LearnerKind::FollowTheLeader;
    let (thetas, history) = dense_reference(&scheme, universe, &family, learner, data);

    let mut pool = ExpertPool::new(scheme, family, learner);
    for (step, &obs) in data.iter().enumerate() {
        let dense_w = &history[step];
        for record in pool.experts() {
            let idx = universe
                .iter()
                .position(|p| p == &record.params)
                .unwrap_or_else(|| panic!("expert {:?} missing from universe", record.params));
            let engine_w = record.log_weight.exp();
            let diff = (engine_w - dense_w[idx]).abs();
            let scale = dense_w[idx].abs().max(1e-300);
            assert!(
                diff <= tol * scale.max(1e-12),
                "step {}: expert {:?} weight {} vs dense {}",
                step + 1,
                record.params,
                engine_w,
                dense_w[idx]
            );
        }
        let row = pool.step(obs).unwrap();
        assert!(
            (row.theta_hat - thetas[step]).abs() <= tol,
            "step {}: estimate {} vs dense {}",
            step + 1,
            row.theta_hat,
            thetas[step]
        );
    }
}
