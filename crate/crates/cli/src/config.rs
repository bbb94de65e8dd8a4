//! Experiment configuration files.
//!
//! A config is a TOML document. Unknown keys anywhere are errors, and every
//! parse error carries the line and column of the offending token.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

pub const DEFAULT_SEED: u64 = 0x5EED;
pub const DEFAULT_RESOLUTION: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: PathBuf,
    /// 1-based position, when the error points into the file.
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: &Path, message: impl Into<String>) -> Self {
        Self {
            path: path.to_path_buf(),
            line: None,
            column: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "{}:{l}:{c}: {}", self.path.display(), self.message),
            _ => write!(f, "{}: {}", self.path.display(), self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Solve,
    Response,
    Spectrum,
    HoelderScan,
    TaylorCheck,
    PressureCheck,
    ExampleComposition,
    ExampleAffine,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Solve => "solve",
            Kind::Response => "response",
            Kind::Spectrum => "spectrum",
            Kind::HoelderScan => "hoelder-scan",
            Kind::TaylorCheck => "taylor-check",
            Kind::PressureCheck => "pressure-check",
            Kind::ExampleComposition => "example-composition",
            Kind::ExampleAffine => "example-affine",
        }
    }

    /// Assertions this kind can evaluate.
    pub fn assertions(self) -> &'static [&'static str] {
        match self {
            Kind::Solve => &["converged", "power-agreement"],
            Kind::Spectrum => &["lambda", "analytic", "positivity", "decay"],
            Kind::Response => &[
                "fd-agreement",
                "route-equivalence",
                "lambda-derivative",
                "lambda-expected",
            ],
            Kind::HoelderScan => &["exponent", "forced-exponent"],
            Kind::TaylorCheck => &["order"],
            Kind::PressureCheck => &["identity"],
            Kind::ExampleComposition => {
                &["fixed-point-oracles", "constraints", "second-derivative"]
            }
            Kind::ExampleAffine => &[
                "series-oracle",
                "contraction",
                "holder-slope",
                "lipschitz-slope",
                "second-derivative",
            ],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Circle-map family.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
#[derive(Default)]
pub enum MapSpec {
    /// `2x + u·sin(2πx)/(2π)`.
    #[default]
    PerturbedDoubling,
    /// `d·x` with `params` parameter slots that do not move the map.
    Linear {
        #[serde(default = "two")]
        degree: usize,
        #[serde(default)]
        params: usize,
    },
    /// `2x + |u|^exponent·amplitude·sin(2πx)/(2π)`.
    Kink { exponent: f64, amplitude: f64 },
}

fn two() -> usize {
    2
}


#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum WeightKind {
    /// `1/|T'|`.
    #[default]
    Geometric,
    Constant,
    /// `a0 + Σ cos_k cos(2πkx) + sin_k sin(2πkx)`.
    Trig,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct WeightSpec {
    #[serde(default)]
    pub kind: WeightKind,
    pub value: Option<f64>,
    pub a0: Option<f64>,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
    /// `g_u = g·exp(Σ κ_i u_i)`.
    #[serde(default)]
    pub log_scale: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Tolerances {
    /// Relative change stopping the power iteration.
    pub power: f64,
    /// Fixed-point residual.
    pub solve: f64,
    /// Relative C⁰ error of the response against finite differences.
    pub response: f64,
    /// Node-wise gap between the two derivative routes.
    pub route: f64,
    /// Relative error of the eigenvalue derivative.
    pub lambda: f64,
    /// Pressure identity, relative to `max(1, |m(A)|)`.
    pub pressure: f64,
    /// Slack subtracted from the expected exponent or order.
    pub slack: f64,
    /// Absolute tolerance of analytic identities.
    pub analytic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            power: 1e-13,
            solve: 1e-12,
            response: 1e-4,
            route: 1e-9,
            lambda: 1e-5,
            pressure: 1e-6,
            slack: 0.1,
            analytic: 1e-9,
        }
    }
}

impl Tolerances {
    fn check(&self) -> Result<(), String> {
        let named = [
            ("power", self.power),
            ("solve", self.solve),
            ("response", self.response),
            ("route", self.route),
            ("lambda", self.lambda),
            ("pressure", self.pressure),
            ("slack", self.slack),
            ("analytic", self.analytic),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("tolerances.{name} must be positive, got {v}"));
            }
        }
        Ok(())
    }
}

/// Taylor-check target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TaylorTarget {
    /// Normalized transfer-operator map.
    #[default]
    Transfer,
    /// Composition example, `u₀ = 0.05cos(t)`, `h = t/2`.
    Composition,
}

/// Experiment parameters; each kind reads the ones it needs.
#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Params {
    pub u0: Option<Vec<f64>>,
    pub h: Option<Vec<f64>>,
    pub fd_step: Option<f64>,
    pub deltas: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub steps: Option<usize>,
    pub observables: Option<usize>,
    pub samples: Option<usize>,
    pub target: Option<TaylorTarget>,
    pub expected_lambda: Option<f64>,
    pub expected_lambda_derivative: Option<f64>,
    pub expected_exponent: Option<f64>,
    pub min_order: Option<f64>,
    pub r: Option<f64>,
    pub r_prime: Option<f64>,
    pub m: Option<usize>,
    pub epsilon: Option<f64>,
    pub amplitude: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub map: MapSpec,
    #[serde(default)]
    pub weight: WeightSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub params: Params,
    /// Assertions to evaluate; all applicable ones when absent.
    pub assertions: Option<Vec<String>>,
}

fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl ExperimentConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let (line, column) = match e.span() {
                Some(span) => {
                    let (l, c) = line_column(text, span.start);
                    (Some(l), Some(c))
                }
                None => (None, None),
            };
            ConfigError {
                path: path.to_path_buf(),
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        cfg.validate().map_err(|m| ConfigError::new(path, m))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            anyhow::Error::new(e).context(format!("reading config {}", path.display()))
        })?;
        Ok(Self::parse(&text, path)?)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.resolution < 8 || !self.resolution.is_multiple_of(2) {
            return Err(format!(
                "resolution must be even and >= 8, got {}",
                self.resolution
            ));
        }
        self.tolerances.check()?;
        if let Some(list) = &self.assertions {
            let known = self.kind.assertions();
            for (i, a) in list.iter().enumerate() {
                if !known.contains(&a.as_str()) {
                    return Err(format!(
                        "unknown assertion '{a}' for kind {} (known: {known:?})",
                        self.kind
                    ));
                }
                if list[..i].contains(a) {
                    return Err(format!("assertion '{a}' listed twice"));
                }
            }
        }
        match self.weight.kind {
            WeightKind::Constant if self.weight.value.is_none() => {
                return Err("weight.kind = \"constant\" needs weight.value".into())
            }
            WeightKind::Trig if self.weight.a0.is_none() => {
                return Err("weight.kind = \"trig\" needs weight.a0".into())
            }
            _ => {}
        }
        Ok(())
    }

    /// Requested assertions, in config order. Without an explicit list,
    /// every assertion of the kind whose inputs are configured.
    pub fn requested_assertions(&self) -> Vec<String> {
        if let Some(list) = &self.assertions {
            return list.clone();
        }
        self.kind
            .assertions()
            .iter()
            .filter(|a| match **a {
                "lambda" => self.params.expected_lambda.is_some(),
                "lambda-expected" => self.params.expected_lambda_derivative.is_some(),
                "forced-exponent" => self.params.expected_exponent.is_some(),
                "analytic" => false,
                _ => true,
            })
            .map(|a| a.to_string())
            .collect()
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rfind('\n')
        .map_or(before.len(), |i| before.len() - i - 1)
        + 1;
    (line, column)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<ExperimentConfig, ConfigError> {
        ExperimentConfig::parse(s, Path::new("test.toml"))
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse("kind = \"spectrum\"\n").unwrap();
        assert_eq!(c.resolution, 64);
        assert_eq!(c.seed, 0x5EED);
        assert_eq!(c.map, MapSpec::PerturbedDoubling);
        assert_eq!(c.requested_assertions(), vec!["positivity", "decay"]);
    }

    #[test]
    fn unknown_key_reports_position() {
        let e = parse("kind = \"spectrum\"\n[tolerances]\npowr = 1e-3\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert_eq!(e.column, Some(1));
        assert!(e.message.contains("powr"), "{e}");
    }

    #[test]
    fn unknown_map_field_is_fatal() {
        assert!(parse("kind = \"spectrum\"\n[map]\nfamily = \"kink\"\nexponent = 0.5\namplitude = 0.1\nextra = 1\n").is_err());
    }

    #[test]
    fn bad_values_rejected() {
        assert!(parse("kind = \"spectrum\"\nresolution = 7\n").is_err());
        assert!(parse("kind = \"spectrum\"\n[tolerances]\npower = 0.0\n").is_err());
        assert!(parse("kind = \"nope\"\n").is_err());
        assert!(parse("kind = \"solve\"\nassertions = [\"decay\"]\n").is_err());
        assert!(parse("kind = \"solve\"\nassertions = [\"converged\", \"converged\"]\n").is_err());
        assert!(parse("kind = \"spectrum\"\n[weight]\nkind = \"constant\"\n").is_err());
    }

    #[test]
    fn hex_seed_and_map_variants() {
        let c = parse("kind = \"spectrum\"\nseed = 0x10\n[map]\nfamily = \"linear\"\nparams = 1\n")
            .unwrap();
        assert_eq!(c.seed, 16);
        assert_eq!(
            c.map,
            MapSpec::Linear {
                degree: 2,
                params: 1
            }
        );
    }
}
