//! Run configuration document.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::bath::BathSpec;
use crate::numerics::{PureState, C64};
use crate::protocol::{BathModel, Model, Scheme};

pub const DEFAULT_CUTOFF: usize = 64;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_algebraic")]
    pub algebraic: f64,
    #[serde(default = "default_oracle")]
    pub oracle: f64,
}

fn default_algebraic() -> f64 {
    1e-10
}

fn default_oracle() -> f64 {
    1e-6
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebraic: default_algebraic(),
            oracle: default_oracle(),
        }
    }
}

/// `{"modes": [...]}` for a shared bath, or a list of those, one per qubit.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum BathConfig {
    Shared(BathSpec),
    PerQubit(Vec<BathSpec>),
}

/// Either `{"family": "phi(0.6)"}` or `{"amplitudes": [[re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub family: Option<String>,
    pub amplitudes: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_model")]
    pub model: Model,
    #[serde(default = "default_qubits")]
    pub n_qubits: usize,
    pub scheme: Option<Scheme>,
    pub bath: Option<BathConfig>,
    #[serde(default)]
    pub times: Vec<f64>,
    pub state: Option<StateConfig>,
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
    #[serde(default = "default_cutoff_m")]
    pub cutoff_m: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    /// Coherence factors to decompose directly, bypassing the bath.
    pub gammas: Option<Vec<f64>>,
}

fn default_model() -> Model {
    Model::CommonBath
}

fn default_qubits() -> usize {
    2
}

fn default_cutoff() -> usize {
    DEFAULT_CUTOFF
}

fn default_cutoff_m() -> usize {
    crate::focksim::DEFAULT_CUTOFF_M
}

/// Schema violation or semantically invalid configuration.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config error: {0}")]
pub struct ConfigError(pub String);

type Res<T> = std::result::Result<T, ConfigError>;

fn bad<T>(msg: impl Into<String>) -> Res<T> {
    Err(ConfigError(msg.into()))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Res<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Res<()> {
        if self.n_qubits == 0 || self.n_qubits > 10 {
            return bad(format!("n_qubits must be in 1..=10, got {}", self.n_qubits));
        }
        if self.times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return bad("times must be finite and >= 0");
        }
        if self.times.windows(2).any(|w| w[1] < w[0]) {
            return bad("times must be ascending");
        }
        if self.cutoff < 2 {
            return bad("cutoff must be >= 2");
        }
        if self.cutoff_m == 0 || self.cutoff_m > self.cutoff {
            return bad("cutoff_m must be in 1..=cutoff");
        }
        let t = &self.tolerances;
        if !(t.algebraic > 0.0 && t.oracle > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.shots == Some(0) {
            return bad("shots must be >= 1");
        }
        if let Some(g) = &self.gammas {
            if g.iter().any(|x| !(*x > 0.0 && *x <= 1.0)) {
                return bad("gammas must lie in (0, 1]");
            }
        }
        if let Some(BathConfig::PerQubit(list)) = &self.bath {
            if list.is_empty() {
                return bad("bath list is empty");
            }
        }
        if let Some(s) = &self.state {
            if s.family.is_some() == s.amplitudes.is_some() {
                return bad("state needs exactly one of family or amplitudes");
            }
        }
        Ok(())
    }

    pub fn require_times(&self) -> Res<&[f64]> {
        if self.times.is_empty() {
            return bad("times must not be empty");
        }
        Ok(&self.times)
    }

    /// Bath in the form the protocol expects for the configured model.
    pub fn bath_model(&self) -> Res<BathModel> {
        match (&self.bath, self.model) {
            (None, _) => bad("bath is required"),
            (Some(BathConfig::Shared(b)), _) => Ok(BathModel::Shared(b.clone())),
            (Some(BathConfig::PerQubit(_)), Model::CommonBath) => {
                bad("common_bath takes a single {modes} object")
            }
            (Some(BathConfig::PerQubit(list)), Model::IndividualBaths) => {
                if list.len() != self.n_qubits {
                    return bad(format!(
                        "expected {} baths, got {}",
                        self.n_qubits,
                        list.len()
                    ));
                }
                Ok(BathModel::PerQubit(list.clone()))
            }
        }
    }

    pub fn shared_bath(&self) -> Res<&BathSpec> {
        match &self.bath {
            Some(BathConfig::Shared(b)) => Ok(b),
            Some(BathConfig::PerQubit(_)) => bad("this command takes a single {modes} object"),
            None => bad("bath is required"),
        }
    }

    pub fn scheme_or_default(&self) -> Scheme {
        self.scheme.unwrap_or(match self.model {
            Model::CommonBath => Scheme::NonRuParity,
            Model::IndividualBaths => Scheme::TensorParity,
        })
    }

    pub fn initial_state(&self) -> Res<PureState> {
        let Some(s) = &self.state else {
            return bad("state is required");
        };
        let dim = 1usize << self.n_qubits;
        if let Some(a) = &s.amplitudes {
            if a.len() != dim {
                return bad(format!("expected {dim} amplitudes, got {}", a.len()));
            }
            let v = a.iter().map(|[re, im]| C64::new(*re, *im)).collect();
            return PureState::normalized(v).map_err(|e| ConfigError(e.to_string()));
        }
        parse_family(s.family.as_deref().unwrap_or_default(), self.n_qubits)
    }
}

/// `phi(alpha)`, `psi(alpha)` (two qubits) or `haar(seed)`.
pub fn parse_family(text: &str, n_qubits: usize) -> Res<PureState> {
    let text = text.trim();
    let (name, arg) = text
        .strip_suffix(')')
        .and_then(|s| s.split_once('('))
        .ok_or_else(|| ConfigError(format!("cannot parse state family {text:?}")))?;
    let arg = arg.trim();
    let zero = C64::new(0.0, 0.0);
    match name.trim() {
        "phi" | "psi" => {
            if n_qubits != 2 {
                return bad(format!("{name} is a two-qubit family"));
            }
            let alpha: f64 = arg
                .parse()
                .map_err(|_| ConfigError(format!("bad alpha {arg:?}")))?;
            if alpha.is_nan() || alpha.abs() > 1.0 {
                return bad(format!("alpha must satisfy |alpha| <= 1, got {alpha}"));
            }
            let a = C64::new(alpha, 0.0);
            let b = C64::new((1.0 - alpha * alpha).max(0.0).sqrt(), 0.0);
            let v = if name.trim() == "phi" {
                vec![a, zero, zero, b]
            } else {
                vec![zero, a, b, zero]
            };
            PureState::normalized(v).map_err(|e| ConfigError(e.to_string()))
        }
        "haar" => {
            let seed: u64 = arg
                .parse()
                .map_err(|_| ConfigError(format!("bad seed {arg:?}")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(PureState::haar(1 << n_qubits, &mut rng))
        }
        other => bad(format!("unknown state family {other:?}")),
    }
}
