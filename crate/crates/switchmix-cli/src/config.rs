//! Run configuration: a flat key=value file plus command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};

use switchmix_core::scheme::exp::{ExpWeighting, DEFAULT_HORIZON_CAP};
use switchmix_core::scheme::log::LogWeighting;
use switchmix_core::scheme::quad::QuadWeighting;

/// Environment variable overriding the exhaustive-scheme horizon cap.
pub const EXP_CAP_ENV: &str = "SWITCHMIX_EXP_CAP";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeChoice {
    Exp(ExpWeighting),
    Quad(QuadWeighting),
    Log(LogWeighting),
}

impl SchemeChoice {
    pub fn scheme_name(&self) -> &'static str {
        match self {
            SchemeChoice::Exp(_) => "exp",
            SchemeChoice::Quad(_) => "quad",
            SchemeChoice::Log(_) => "log",
        }
    }

    pub fn weighting_name(&self) -> &'static str {
        match self {
            SchemeChoice::Exp(w) => w.name(),
            SchemeChoice::Quad(w) => w.name(),
            SchemeChoice::Log(w) => w.name(),
        }
    }

    pub fn parse(scheme: &str, weighting: &str) -> Result<Self> {
        match scheme {
            "exp" => Ok(SchemeChoice::Exp(match weighting {
                "naive" => ExpWeighting::Naive,
                "better" => ExpWeighting::Better,
                "optimal" => ExpWeighting::Optimal,
                other => bail!("weighting '{other}' is not valid for the exp scheme"),
            })),
            "quad" => Ok(SchemeChoice::Quad(match weighting {
                "naive" => QuadWeighting::Naive,
                "better" => QuadWeighting::Better,
                "optimal" => QuadWeighting::Optimal,
                other => bail!("weighting '{other}' is not valid for the quad scheme"),
            })),
            "log" => Ok(SchemeChoice::Log(match weighting {
                "naive" => LogWeighting::Naive,
                "better" => LogWeighting::Better,
                "smarter" => LogWeighting::Smarter,
                "optimal" => LogWeighting::Optimal,
                other => bail!("weighting '{other}' is not valid for the log scheme"),
            })),
            other => bail!("unknown scheme '{other}' (expected exp, quad, or log)"),
        }
    }
}

/// Where observations come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataSource {
    Synthetic,
    File(PathBuf),
}

/// Segment-mean specification for the generator.
#[derive(Debug, Clone, PartialEq)]
pub enum MeansSpec {
    Random,
    Fixed(Vec<f64>),
}

/// Boundary placement for the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Equal,
    Random,
    Geometric,
}

impl Placement {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "equal" => Ok(Placement::Equal),
            "random" => Ok(Placement::Random),
            "geometric" => Ok(Placement::Geometric),
            other => bail!("unknown placement '{other}'"),
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scheme: SchemeChoice,
    pub horizon: usize,
    pub segments: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub data: DataSource,
    pub sigma: f64,
    pub means: MeansSpec,
    pub placement: Placement,
    pub exp_cap: usize,
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scheme: Option<String>,
    pub weighting: Option<String>,
    pub horizon: Option<usize>,
    pub segments: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key=value, got '{raw}'", lineno + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

impl RunConfig {
    /// Read a config file and apply overrides.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_text(&text, overrides)
    }

    pub fn from_text(text: &str, overrides: &Overrides) -> Result<Self> {
        let map = parse_key_values(text)?;
        let get = |key: &str| map.get(key).map(String::as_str);

        if let Some(loss) = get("loss") {
            if loss != "square" {
                bail!("only the square loss is configurable; got '{loss}'");
            }
        }

        let scheme_name = overrides
            .scheme
            .clone()
            .or_else(|| get("scheme").map(str::to_string))
            .ok_or_else(|| anyhow!("missing 'scheme'"))?;
        let weighting_name = overrides
            .weighting
            .clone()
            .or_else(|| get("weighting").map(str::to_string))
            .ok_or_else(|| anyhow!("missing 'weighting'"))?;
        let scheme = SchemeChoice::parse(&scheme_name, &weighting_name)?;

        let horizon = match overrides.horizon {
            Some(h) => h,
            None => get("horizon")
                .ok_or_else(|| anyhow!("missing 'horizon'"))?
                .parse()
                .context("parsing horizon")?,
        };
        let segments = match overrides.segments {
            Some(s) => s,
            None => get("segments")
                .map_or(Ok(1), str::parse)
                .context("parsing segments")?,
        };
        let seed = match overrides.seed {
            Some(s) => s,
            None => get("seed")
                .map_or(Ok(0), str::parse)
                .context("parsing seed")?,
        };
        let out = overrides
            .out
            .clone()
            .or_else(|| get("out").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));

        let data = match get("data").unwrap_or("synthetic") {
            "synthetic" => DataSource::Synthetic,
            other => match other.strip_prefix("file:") {
                Some(p) => DataSource::File(PathBuf::from(p.trim())),
                None => bail!("data must be 'synthetic' or 'file:<path>', got '{other}'"),
            },
        };
        let sigma: f64 = get("sigma")
            .map_or(Ok(0.1), str::parse)
            .context("parsing sigma")?;
        let means = match get("means").unwrap_or("random") {
            "random" => MeansSpec::Random,
            list => {
                let vals: std::result::Result<Vec<f64>, _> =
                    list.split(',').map(|v| v.trim().parse()).collect();
                MeansSpec::Fixed(vals.context("parsing means")?)
            }
        };
        let placement = Placement::parse(get("placement").unwrap_or("equal"))?;

        let exp_cap = match std::env::var(EXP_CAP_ENV) {
            Ok(v) => v
                .parse()
                .with_context(|| format!("parsing {EXP_CAP_ENV}={v}"))?,
            Err(_) => DEFAULT_HORIZON_CAP,
        };

        let config = Self {
            scheme,
            horizon,
            segments,
            seed,
            out,
            data,
            sigma,
            means,
            placement,
            exp_cap,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            bail!("horizon must be at least 1");
        }
        if self.segments < 1 || self.segments > self.horizon {
            bail!("segments {} outside 1..={}", self.segments, self.horizon);
        }
        if let SchemeChoice::Exp(_) = self.scheme {
            if self.horizon > self.exp_cap {
                bail!(
                    "exp scheme horizon {} exceeds cap {} (override with {EXP_CAP_ENV})",
                    self.horizon,
                    self.exp_cap
                );
            }
        }
        if !(0.0..=1.0).contains(&self.sigma) {
            bail!("sigma must lie in [0, 1], got {}", self.sigma);
        }
        if let MeansSpec::Fixed(means) = &self.means {
            if means.len() != self.segments {
                bail!("{} means given for {} segments", means.len(), self.segments);
            }
            if means.iter().any(|m| !(-1.0..=1.0).contains(m)) {
                bail!("segment means must lie in [-1, 1]");
            }
        }
        Ok(())
    }
}
