//! Experiment configuration files.
//!
//! One experiment per TOML file, flat sections, unknown keys rejected:
//!
//! ```toml
//! [experiment]
//! kind = "simulate"
//! seed = 1
//!
//! [hamiltonian]
//! f = "logcosh"
//! g = "logcosh"
//! p0 = [1.0]
//! q0 = [1.0]
//!
//! [run]
//! eta = 0.05
//! steps = 1000
//! orders = [0, 1, 2, 3]
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use modham::{Matrix, Scheme, SeparableHamiltonian, SmoothScalarFamily};
use serde::Deserialize;
use sha2::{Digest, Sha256};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Simulate,
    OrderSweep,
    Regret,
    ExamplesFig,
    QuadMh,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::OrderSweep => "order-sweep",
            Self::Regret => "regret",
            Self::ExamplesFig => "examples-fig",
            Self::QuadMh => "quad-mh",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub hamiltonian: Option<HamiltonianSection>,
    pub run: Option<RunSection>,
    pub game: Option<GameSection>,
    pub figure: Option<FigureSection>,
    pub quad: Option<QuadSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: ExperimentKind,
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    Quadratic,
    Logcosh,
    Log,
    Power,
}

/// `F` and `G` are picked by name; numeric parameters are optional per kind:
/// `*_coeff` (quadratic `a·x²`), `*_shift` (`log(shift + x)`),
/// `*_exponent` and `*_scale` (`scale·|x|^exponent`).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSection {
    pub f: FamilyName,
    pub g: FamilyName,
    pub f_coeff: Option<f64>,
    pub g_coeff: Option<f64>,
    pub f_shift: Option<f64>,
    pub g_shift: Option<f64>,
    pub f_exponent: Option<f64>,
    pub g_exponent: Option<f64>,
    pub f_scale: Option<f64>,
    pub g_scale: Option<f64>,
    pub p0: Vec<f64>,
    pub q0: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    Symplectic,
    Forward,
    Backward,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub scheme: Option<SchemeName>,
    pub eta: Option<f64>,
    pub etas: Option<Vec<f64>>,
    #[serde(default)]
    pub steps: usize,
    #[serde(default)]
    pub orders: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegularizerName {
    /// Negative entropy on the probability simplex; the only constrained built-in.
    Entropy,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSection {
    /// Row-major payoff; when absent a random `dim × dim` payoff is drawn from the seed.
    pub payoff: Option<Vec<Vec<f64>>>,
    pub dim: Option<usize>,
    pub regularizer: RegularizerName,
    pub a0: Option<Vec<f64>>,
    pub b0: Option<Vec<f64>>,
    pub ks: Vec<usize>,
    /// Step size `η = c·K^(−1/(order+2))`.
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "default_order")]
    pub order: usize,
    /// Fails the run when the fitted log-log slope of the average gap exceeds this.
    pub max_gap_slope: Option<f64>,
    #[serde(default = "yes")]
    pub write_trajectories: bool,
}

fn one() -> f64 {
    1.0
}

fn default_order() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureSection {
    pub exponents: Vec<f64>,
    pub starts: Vec<[f64; 2]>,
    pub eta: f64,
    pub steps: usize,
    /// Orbits must stay inside `[-bound, bound]²`.
    pub bound: f64,
    /// Power families use `|x|^e / e` unless this is false.
    #[serde(default = "yes")]
    pub normalized: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadSection {
    pub pairs: Vec<[f64; 2]>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    200
}

/// A parsed config together with the hash of its source text.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: ExperimentConfig,
    pub path: PathBuf,
    pub hash: String,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

pub fn parse(text: &str, path: &Path) -> Result<ExperimentConfig, ConfigError> {
    toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(1);
        ConfigError(format!("{}:{line}: {}", path.display(), e.message()))
    })
}

/// Reads and validates a config. The hash covers the file bytes and any seed
/// override from the command line.
pub fn load(path: &Path, seed_override: Option<u64>) -> Result<Loaded, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let mut config = parse(&text, path)?;
    let mut bytes = text.into_bytes();
    if let Some(seed) = seed_override {
        config.experiment.seed = seed;
        bytes.extend_from_slice(format!("\nseed-override={seed}").as_bytes());
    }
    Ok(Loaded { config, path: path.to_path_buf(), hash: short_hash(&bytes) })
}

/// First 16 hex digits of SHA-256.
pub fn short_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    hex::encode(&digest[..8])
}

impl Loaded {
    fn err(&self, section: &str, msg: impl fmt::Display) -> ConfigError {
        ConfigError(format!("{}: [{section}] {msg}", self.path.display()))
    }

    pub fn expect_kind(&self, kind: ExperimentKind) -> Result<(), ConfigError> {
        let got = self.config.experiment.kind;
        if got == kind {
            Ok(())
        } else {
            Err(self.err("experiment", format!("kind is \"{}\", this command runs \"{}\"", got.name(), kind.name())))
        }
    }

    pub fn hamiltonian(&self) -> Result<&HamiltonianSection, ConfigError> {
        self.config.hamiltonian.as_ref().ok_or_else(|| self.err("hamiltonian", "section is required"))
    }

    pub fn run(&self) -> Result<&RunSection, ConfigError> {
        self.config.run.as_ref().ok_or_else(|| self.err("run", "section is required"))
    }

    pub fn game(&self) -> Result<&GameSection, ConfigError> {
        self.config.game.as_ref().ok_or_else(|| self.err("game", "section is required"))
    }

    pub fn eta(&self) -> Result<f64, ConfigError> {
        let eta = self.run()?.eta.ok_or_else(|| self.err("run", "eta is required"))?;
        if eta > 0.0 && eta.is_finite() {
            Ok(eta)
        } else {
            Err(self.err("run", format!("eta must be positive, got {eta}")))
        }
    }

    pub fn build_hamiltonian(&self) -> Result<(SeparableHamiltonian<f64>, Vec<f64>, Vec<f64>), ConfigError> {
        let h = self.hamiltonian()?;
        let d = h.p0.len();
        if d == 0 || h.q0.len() != d {
            return Err(self.err("hamiltonian", "p0 and q0 must be nonempty and of equal length"));
        }
        let f = family(h.f, h.f_coeff, h.f_shift, h.f_exponent, h.f_scale, d).map_err(|m| self.err("hamiltonian", format!("f: {m}")))?;
        let g = family(h.g, h.g_coeff, h.g_shift, h.g_exponent, h.g_scale, d).map_err(|m| self.err("hamiltonian", format!("g: {m}")))?;
        let ham = SeparableHamiltonian::new(f, g, d).map_err(|e| self.err("hamiltonian", e))?;
        Ok((ham, h.p0.clone(), h.q0.clone()))
    }

    pub fn scheme(&self) -> Result<Scheme, ConfigError> {
        Ok(match self.run()?.scheme.unwrap_or(SchemeName::Symplectic) {
            SchemeName::Symplectic => Scheme::Symplectic,
            SchemeName::Forward => Scheme::Forward,
            SchemeName::Backward => Scheme::Backward,
        })
    }

    /// Quadratic coefficients `(a, b)` when both families are one-dimensional quadratics.
    pub fn quadratic_1d(&self) -> Option<(f64, f64)> {
        let h = self.config.hamiltonian.as_ref()?;
        (h.f == FamilyName::Quadratic && h.g == FamilyName::Quadratic && h.p0.len() == 1)
            .then(|| (h.f_coeff.unwrap_or(1.0), h.g_coeff.unwrap_or(1.0)))
    }

    pub fn section_error(&self, section: &str, msg: impl fmt::Display) -> ConfigError {
        self.err(section, msg)
    }
}

fn family(
    name: FamilyName,
    coeff: Option<f64>,
    shift: Option<f64>,
    exponent: Option<f64>,
    scale: Option<f64>,
    d: usize,
) -> Result<SmoothScalarFamily<f64>, String> {
    let unused = |what: &str, v: Option<f64>| match v {
        Some(_) => Err(format!("{what} does not apply to {name:?}")),
        None => Ok(()),
    };
    match name {
        FamilyName::Quadratic => {
            unused("shift", shift)?;
            unused("exponent", exponent)?;
            unused("scale", scale)?;
            let a = coeff.unwrap_or(1.0);
            Ok(SmoothScalarFamily::quadratic(Matrix::identity(d).scale(a)))
        }
        FamilyName::Logcosh => {
            unused("coeff", coeff)?;
            unused("shift", shift)?;
            unused("exponent", exponent)?;
            unused("scale", scale)?;
            Ok(SmoothScalarFamily::log_cosh())
        }
        FamilyName::Log => {
            unused("coeff", coeff)?;
            unused("exponent", exponent)?;
            unused("scale", scale)?;
            Ok(SmoothScalarFamily::log(shift.unwrap_or(0.0)))
        }
        FamilyName::Power => {
            unused("coeff", coeff)?;
            unused("shift", shift)?;
            let e = exponent.ok_or("power needs an exponent")?;
            if !(e > 1.0) {
                return Err(format!("exponent must exceed 1, got {e}"));
            }
            Ok(SmoothScalarFamily::scaled_power(e, scale.unwrap_or(1.0)))
        }
    }
}
