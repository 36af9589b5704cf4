use serde::{Deserialize, Serialize};

use crate::error::{MocError, Result};
use crate::sampler::{pairs_per_layer, BasisMode, CircuitSampler};

/// Default cap on the `2 N^2 / M2` depth.
pub const DEPTH_CAP: usize = 200_000;

/// One ensemble: circuit family, schedule and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_qubits: usize,
    /// Range exponent; `f64::INFINITY` means nearest neighbour only.
    #[serde(with = "alpha_serde")]
    pub alpha: f64,
    /// `M2 / N`; `0` selects one pair per layer.
    pub density: f64,
    pub basis: BasisKind,
    /// `ZZ` weight for [`BasisKind::Xxz`].
    pub p: Option<f64>,
    /// Layer count; `None` means `2 N^2 / M2` capped at [`DEPTH_CAP`].
    pub depth: Option<usize>,
    pub n_checkpoints: usize,
    pub n_trajectories: usize,
    pub seed: u64,
    /// Steady-state window in checkpoints.
    pub window: usize,
    /// Seed an ancilla and track its entropy.
    pub purification: bool,
    /// Record the Bell census at the final checkpoint.
    pub census: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Random,
    Single,
    Xxz,
}

impl BasisKind {
    pub fn label(self) -> &'static str {
        match self {
            BasisKind::Random => "random",
            BasisKind::Single => "single",
            BasisKind::Xxz => "xxz",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "random" => Some(BasisKind::Random),
            "single" => Some(BasisKind::Single),
            "xxz" => Some(BasisKind::Xxz),
            _ => None,
        }
    }
}

mod alpha_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(a: &f64, s: S) -> Result<S::Ok, S::Error> {
        if a.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*a)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad alpha {s}"))),
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_qubits: 16,
            alpha: 0.0,
            density: 0.5,
            basis: BasisKind::Random,
            p: None,
            depth: None,
            n_checkpoints: 100,
            n_trajectories: 100,
            seed: 0,
            window: 20,
            purification: false,
            census: false,
        }
    }
}

impl ExperimentConfig {
    pub fn new(n_qubits: usize, alpha: f64, density: f64, basis: BasisKind) -> Self {
        Self { n_qubits, alpha, density, basis, ..Self::default() }
    }

    pub fn basis_mode(&self) -> Result<BasisMode> {
        match (self.basis, self.p) {
            (BasisKind::Random, _) => Ok(BasisMode::Random),
            (BasisKind::Single, _) => Ok(BasisMode::Single),
            (BasisKind::Xxz, Some(p)) => Ok(BasisMode::Xxz { p }),
            (BasisKind::Xxz, None) => Err(MocError::InvalidArgument("xxz basis needs p".into())),
        }
    }

    pub fn m2(&self) -> Result<usize> {
        pairs_per_layer(self.n_qubits, self.density)
    }

    pub fn is_sparse(&self) -> bool {
        self.density == 0.0
    }

    pub fn depth(&self) -> Result<usize> {
        match self.depth {
            Some(d) => Ok(d),
            None => {
                let n = self.n_qubits;
                Ok((2 * n * n / self.m2()?).min(DEPTH_CAP))
            }
        }
    }

    /// Requested checkpoints, clamped so short runs record every layer.
    pub fn checkpoint_count(&self) -> Result<usize> {
        Ok(self.n_checkpoints.min(self.depth()?))
    }

    /// Layers `floor(k D / n)` for `k = 1..=n`.
    pub fn checkpoints(&self) -> Result<Vec<usize>> {
        checkpoint_schedule(self.depth()?, self.checkpoint_count()?)
    }

    pub fn sampler(&self) -> Result<CircuitSampler> {
        CircuitSampler::new(self.n_qubits, self.alpha, self.m2()?, self.basis_mode()?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 4 {
            return Err(MocError::InvalidArgument(format!("N = {} is below the 4-qubit minimum", self.n_qubits)));
        }
        if self.n_checkpoints == 0 {
            return Err(MocError::InvalidArgument("need at least one checkpoint".into()));
        }
        if self.depth()? == 0 {
            return Err(MocError::InvalidArgument("depth must be positive".into()));
        }
        let n_cp = self.checkpoint_count()?;
        if self.window == 0 || self.window > n_cp {
            return Err(MocError::InvalidArgument(format!("window {} must lie in 1..={n_cp}", self.window)));
        }
        if self.basis != BasisKind::Xxz && self.p.is_some() {
            return Err(MocError::InvalidArgument("p only applies to the xxz basis".into()));
        }
        self.sampler().map(|_| ())
    }
}

pub fn checkpoint_schedule(depth: usize, n: usize) -> Result<Vec<usize>> {
    if n == 0 || depth < n {
        return Err(MocError::InvalidArgument(format!("{n} checkpoints do not fit in depth {depth}")));
    }
    Ok((1..=n).map(|k| k * depth / n).collect())
}
