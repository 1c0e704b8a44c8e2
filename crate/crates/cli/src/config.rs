use std::fs;
use std::path::{Path, PathBuf};

use newton_lab::oracle::{LaurentCoeffVector, DEFAULT_GUARD};
use newton_lab::polygons::IntervalShape;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

/// The only supported sampling PRNG, also the default.
pub const DEFAULT_PRNG: &str = "chacha8";

/// Share of cache hits recomputed by default.
pub const DEFAULT_SPOT_CHECK: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engines {
    Oracle,
    Dwork,
    Both,
}

impl Engines {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Engines::Oracle),
            "dwork" => Ok(Engines::Dwork),
            "both" => Ok(Engines::Both),
            _ => Err(CliError::Validation(format!(
                "unknown engines {s:?} (oracle | dwork | both)"
            ))),
        }
    }

    pub fn uses_oracle(self) -> bool {
        self != Engines::Dwork
    }

    pub fn uses_dwork(self) -> bool {
        self != Engines::Oracle
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sample { count: usize, seed: u64 },
    Single { a: Value },
}

/// A validated campaign configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub p: u64,
    pub b: usize,
    pub shape: IntervalShape,
    pub mode: Mode,
    pub engines: Engines,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub guard: u64,
    pub prng: String,
    /// Fraction of cache hits that are recomputed and compared.
    pub spot_check: f64,
}

impl ExperimentConfig {
    pub fn single(&self) -> Result<LaurentCoeffVector> {
        match &self.mode {
            Mode::Single { a } => Ok(LaurentCoeffVector::from_json(
                self.p, self.b, self.shape, a,
            )?),
            _ => Err(CliError::Validation(
                "mode single needs a coefficient vector".into(),
            )),
        }
    }

    /// The parameters that determine a report's content.
    pub fn summary(&self) -> Value {
        let mut v = serde_json::json!({
            "p": self.p,
            "b": self.b,
            "d": self.shape.d(),
            "e": self.shape.e(),
            "engines": self.engines,
            "prng": self.prng,
        });
        if let (Value::Object(map), Ok(Value::Object(mode))) =
            (&mut v, serde_json::to_value(&self.mode))
        {
            map.extend(mode);
        }
        v
    }
}

/// Raw settings from a JSON file or command-line flags; every field optional.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub p: Option<u64>,
    pub b: Option<usize>,
    pub d: Option<u32>,
    pub e: Option<u32>,
    pub mode: Option<String>,
    pub count: Option<usize>,
    pub seed: Option<u64>,
    pub a: Option<Value>,
    pub engines: Option<String>,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub guard: Option<u64>,
    pub prng: Option<String>,
    pub spot_check: Option<f64>,
}

impl ConfigOverrides {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(CliError::io(path))?;
        serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.into(),
            source,
        })
    }

    /// `self` overridden by every field set in `flags`.
    pub fn merged_with(self, flags: ConfigOverrides) -> Self {
        ConfigOverrides {
            p: flags.p.or(self.p),
            b: flags.b.or(self.b),
            d: flags.d.or(self.d),
            e: flags.e.or(self.e),
            mode: flags.mode.or(self.mode),
            count: flags.count.or(self.count),
            seed: flags.seed.or(self.seed),
            a: flags.a.or(self.a),
            engines: flags.engines.or(self.engines),
            out: flags.out.or(self.out),
            cache: flags.cache.or(self.cache),
            guard: flags.guard.or(self.guard),
            prng: flags.prng.or(self.prng),
            spot_check: flags.spot_check.or(self.spot_check),
        }
    }

    pub fn resolve(self) -> Result<ExperimentConfig> {
        let missing = |name: &str| CliError::Validation(format!("--{name} is required"));
        let p = self.p.ok_or_else(|| missing("p"))?;
        let d = self.d.ok_or_else(|| missing("d"))?;
        let e = self.e.unwrap_or(0);
        let b = self.b.unwrap_or(1);
        if b == 0 {
            return Err(CliError::Validation("b must be positive".into()));
        }
        let shape = IntervalShape::for_prime(d, e, p)?;
        let mode = match self.mode.as_deref() {
            None if self.a.is_some() => "single",
            None => "exhaustive",
            Some(m) => m,
        };
        let mode = match mode {
            "exhaustive" => Mode::Exhaustive,
            "sample" => Mode::Sample {
                count: self.count.ok_or_else(|| missing("count"))?,
                seed: self.seed.ok_or_else(|| {
                    CliError::Validation("sample mode needs --seed for reproducibility".into())
                })?,
            },
            "single" => Mode::Single {
                a: self.a.ok_or_else(|| missing("a"))?,
            },
            other => {
                return Err(CliError::Validation(format!(
                    "unknown mode {other:?} (exhaustive | sample | single)"
                )))
            }
        };
        let engines = Engines::parse(self.engines.as_deref().unwrap_or("oracle"))?;
        if engines.uses_dwork() && (b != 1 || e == 0) {
            return Err(CliError::Validation(
                "the dwork engine needs b = 1 and e > 0".into(),
            ));
        }
        let prng = self.prng.unwrap_or_else(|| DEFAULT_PRNG.into());
        if prng != DEFAULT_PRNG {
            return Err(CliError::Validation(format!(
                "unsupported prng {prng:?} (only {DEFAULT_PRNG})"
            )));
        }
        let spot_check = self.spot_check.unwrap_or(DEFAULT_SPOT_CHECK);
        if !(0.0..=1.0).contains(&spot_check) {
            return Err(CliError::Validation("spot_check must lie in [0, 1]".into()));
        }
        let config = ExperimentConfig {
            p,
            b,
            shape,
            mode,
            engines,
            out: self.out,
            cache: self.cache,
            guard: self.guard.unwrap_or(DEFAULT_GUARD),
            prng,
            spot_check,
        };
        if matches!(config.mode, Mode::Single { .. }) {
            config.single()?;
        }
        Ok(config)
    }
}
