//! Synthetic observation sequences: piecewise-constant means plus uniform
//! noise, with the generating segmentation returned for reporting.

use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use switchmix_core::loss::{Estimate, Observation};
use switchmix_core::oracle::SegmentSpec;

use crate::config::{MeansSpec, Placement};

/// Generator parameters; realised deterministically from a seed.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub segments: usize,
    pub means: MeansSpec,
    pub sigma: f64,
    pub placement: Placement,
}

/// Segment boundaries `T_0 = 0 < ... < T_S = horizon` for a placement rule.
pub fn segment_boundaries(
    placement: Placement,
    horizon: usize,
    segments: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>> {
    if segments < 1 || segments > horizon {
        bail!("segments {segments} outside 1..={horizon}");
    }
    let mut boundaries = match placement {
        Placement::Equal => (0..=segments).map(|s| s * horizon / segments).collect(),
        Placement::Random => {
            let mut cuts: Vec<usize> = Vec::new();
            while cuts.len() < segments - 1 {
                let c = rng.gen_range(1..horizon);
                if !cuts.contains(&c) {
                    cuts.push(c);
                }
            }
            cuts.sort_unstable();
            let mut b = vec![0];
            b.extend(cuts);
            b.push(horizon);
            b
        }
        Placement::Geometric => {
            // Lengths proportional to 2^s, each at least one step.
            let total: f64 = (0..segments).map(|s| (2.0f64).powi(s as i32)).sum();
            let mut lens: Vec<usize> = (0..segments)
                .map(|s| (((2.0f64).powi(s as i32) / total) * horizon as f64).round() as usize)
                .map(|l| l.max(1))
                .collect();
            loop {
                let sum: usize = lens.iter().sum();
                if sum == horizon {
                    break;
                }
                let idx = lens
                    .iter()
                    .enumerate()
                    .max_by_key(|(_, &l)| l)
                    .map(|(i, _)| i)
                    .unwrap();
                if sum > horizon {
                    if lens[idx] == 1 {
                        bail!("horizon {horizon} too short for {segments} geometric segments");
                    }
                    lens[idx] -= 1;
                } else {
                    lens[idx] += 1;
                }
            }
            let mut b = vec![0usize];
            for l in lens {
                b.push(b.last().unwrap() + l);
            }
            b
        }
    };
    boundaries.dedup();
    if boundaries.len() != segments + 1 {
        bail!("horizon {horizon} too short for {segments} {placement:?} segments");
    }
    Ok(boundaries)
}

/// Segment start steps (`T_{s-1} + 1`) for a placement rule.
pub fn segment_starts(
    placement: Placement,
    horizon: usize,
    segments: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>> {
    let boundaries = segment_boundaries(placement, horizon, segments, rng)?;
    Ok(boundaries[..segments].iter().map(|&b| b + 1).collect())
}

/// Generate observations and the ground-truth segmentation that produced
/// them. Deterministic per seed; outputs are clamped into [-1, 1].
pub fn generate(
    spec: &GeneratorSpec,
    horizon: usize,
    seed: u64,
) -> Result<(Vec<Observation<f64>>, SegmentSpec<f64>)> {
    if !(0.0..=1.0).contains(&spec.sigma) {
        bail!("sigma must lie in [0, 1]");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let boundaries = segment_boundaries(spec.placement, horizon, spec.segments, &mut rng)?;
    let means: Vec<f64> = match &spec.means {
        MeansSpec::Random => (0..spec.segments)
            .map(|_| rng.gen_range(-1.0..=1.0))
            .collect(),
        MeansSpec::Fixed(ms) => {
            if ms.len() != spec.segments {
                bail!("{} means for {} segments", ms.len(), spec.segments);
            }
            ms.clone()
        }
    };

    let mut data = Vec::with_capacity(horizon);
    for s in 0..spec.segments {
        for _ in boundaries[s]..boundaries[s + 1] {
            let noise = if spec.sigma > 0.0 {
                rng.gen_range(-spec.sigma..=spec.sigma)
            } else {
                0.0
            };
            data.push(Observation((means[s] + noise).clamp(-1.0, 1.0)));
        }
    }
    let estimates = means.into_iter().map(Estimate).collect();
    let truth = SegmentSpec::new(boundaries, estimates)
        .map_err(|e| anyhow::anyhow!("generator produced an invalid spec: {e}"))?;
    Ok((data, truth))
}

/// Load observations from a text file: one value per line, `#` comments.
pub fn load_observations(path: &Path) -> Result<Vec<Observation<f64>>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading observations {}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let value: f64 = line
            .parse()
            .with_context(|| format!("line {}: '{raw}'", lineno + 1))?;
        out.push(Observation(value));
    }
    if out.is_empty() {
        bail!("no observations in {}", path.display());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_segment_without_noise() {
        let spec = GeneratorSpec {
            segments: 1,
            means: MeansSpec::Fixed(vec![0.5]),
            sigma: 0.0,
            placement: Placement::Equal,
        };
        let (data, truth) = generate(&spec, 12, 1).unwrap();
        assert!(data.iter().all(|o| o.0 == 0.5));
        assert_eq!(truth.segment_count(), 1);
    }

    #[test]
    fn same_seed_reproduces_exactly() {
        let spec = GeneratorSpec {
            segments: 3,
            means: MeansSpec::Random,
            sigma: 0.2,
            placement: Placement::Random,
        };
        let a = generate(&spec, 100, 9).unwrap();
        let b = generate(&spec, 100, 9).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn equal_placement_boundary() {
        let spec = GeneratorSpec {
            segments: 2,
            means: MeansSpec::Fixed(vec![0.9, -0.9]),
            sigma: 0.0,
            placement: Placement::Equal,
        };
        let (data, truth) = generate(&spec, 10, 5).unwrap();
        assert_eq!(truth.boundaries(), &[0, 5, 10]);
        assert_eq!(data[4].0, 0.9);
        assert_eq!(data[5].0, -0.9);
    }

    #[test]
    fn geometric_lengths_double() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let b = segment_boundaries(Placement::Geometric, 28, 3, &mut rng).unwrap();
        assert_eq!(b, vec![0, 4, 12, 28]);
    }

    #[test]
    fn outputs_stay_in_domain() {
        let spec = GeneratorSpec {
            segments: 2,
            means: MeansSpec::Fixed(vec![0.95, -1.0]),
            sigma: 0.5,
            placement: Placement::Equal,
        };
        let (data, _) = generate(&spec, 200, 3).unwrap();
        assert!(data.iter().all(|o| (-1.0..=1.0).contains(&o.0)));
    }
}
