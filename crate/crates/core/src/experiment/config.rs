//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comment
//! grid.n_theta = 128
//! grid.n_v = 128
//! grid.v_max = 8
//! casimir = "power:2"
//! constraints.m1 = 5.92
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::casimir::CasimirSpec;
use crate::error::{HmfError, Result};
use crate::grid::PhaseGrid;
use crate::steady_states::{ConstraintSet, SolverOptions, VelocityQuadrature};
use crate::vlasov::{Interpolation, SolverConfig};

use super::perturb::{Perturbation, PerturbationKind};

const KNOWN_KEYS: &[&str] = &[
    "grid.n_theta",
    "grid.n_v",
    "grid.v_max",
    "casimir",
    "constraints.m1",
    "constraints.mj",
    "solver.damping",
    "solver.tol",
    "solver.max_iter",
    "solver.quadrature",
    "seed.amplitude",
    "perturbation.kind",
    "perturbation.amplitude",
    "perturbation.renormalize",
    "perturbation.seed",
    "evolve.dt",
    "evolve.t_end",
    "evolve.interpolation",
    "evolve.record_every",
    "evolve.snapshot_every",
    "output.dir",
];

/// Ordered key/value pairs as read from a config file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| HmfError::InvalidArgument(format!("line {}: expected `key = value`", n + 1)))?;
            let key = k.trim().to_string();
            let value = v.trim().trim_matches('"').to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(HmfError::InvalidArgument(format!("line {}: unknown key `{key}`", n + 1)));
            }
            if entries.insert(key.clone(), value).is_some() {
                return Err(HmfError::InvalidArgument(format!("line {}: duplicate key `{key}`", n + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(HmfError::InvalidArgument(format!("unknown key `{key}`")));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Canonical text: one `key = value` line per entry in key order.
    pub fn canonical(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// First 12 hex digits of the SHA-256 of [`RawConfig::canonical`].
    pub fn hash_prefix(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        hex::encode(digest)[..12].to_string()
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<T>()
                .map(Some)
                .map_err(|_| HmfError::InvalidArgument(format!("key `{key}`: cannot parse {s:?}"))),
        }
    }
}

fn missing(key: &str) -> HmfError {
    HmfError::InvalidArgument(format!("missing required key `{key}`"))
}

/// Typed view of a [`RawConfig`]. Sections a command does not need may be
/// absent; the accessors report the first missing key.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub raw: RawConfig,
    grid: Option<PhaseGrid>,
    casimir: Option<CasimirSpec>,
    m1: Option<f64>,
    pub mj: Option<f64>,
    pub solver: SolverOptions,
    pub seed_amplitude: f64,
    pub perturbation: Perturbation,
    pub evolve: SolverConfig,
    pub snapshot_every: usize,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        let grid = match (
            raw.parsed::<usize>("grid.n_theta")?,
            raw.parsed::<usize>("grid.n_v")?,
            raw.parsed::<f64>("grid.v_max")?,
        ) {
            (None, None, None) => None,
            (Some(a), Some(b), Some(c)) => Some(PhaseGrid::new(a, b, c)?),
            (a, b, _) => {
                let key = if a.is_none() {
                    "grid.n_theta"
                } else if b.is_none() {
                    "grid.n_v"
                } else {
                    "grid.v_max"
                };
                return Err(missing(key));
            }
        };
        let casimir = raw.parsed::<CasimirSpec>("casimir")?;
        let defaults = SolverOptions::default();
        let solver = SolverOptions {
            damping: raw.parsed("solver.damping")?.unwrap_or(defaults.damping),
            tol: raw.parsed("solver.tol")?.unwrap_or(defaults.tol),
            max_iter: raw.parsed("solver.max_iter")?.unwrap_or(defaults.max_iter),
            quadrature: raw.parsed::<VelocityQuadrature>("solver.quadrature")?.unwrap_or_default(),
        };
        let amplitude: f64 = raw.parsed("perturbation.amplitude")?.unwrap_or(0.0);
        if !(amplitude >= 0.0) {
            return Err(HmfError::InvalidArgument("perturbation.amplitude must be nonnegative".into()));
        }
        let perturbation = Perturbation {
            kind: raw.parsed::<PerturbationKind>("perturbation.kind")?.unwrap_or(PerturbationKind::DensityBump),
            amplitude,
            renormalize: raw.parsed("perturbation.renormalize")?.unwrap_or(false),
            seed: raw.parsed("perturbation.seed")?.unwrap_or(0),
        };
        let evolve = SolverConfig {
            dt: raw.parsed("evolve.dt")?.unwrap_or(0.05),
            t_end: raw.parsed("evolve.t_end")?.unwrap_or(0.0),
            interpolation: raw.parsed::<Interpolation>("evolve.interpolation")?.unwrap_or_default(),
            record_every: raw.parsed("evolve.record_every")?.unwrap_or(1),
        };
        evolve.validate()?;
        let output_dir = PathBuf::from(raw.get("output.dir").ok_or_else(|| missing("output.dir"))?);
        Ok(Self {
            grid,
            casimir,
            m1: raw.parsed("constraints.m1")?,
            mj: raw.parsed("constraints.mj")?,
            solver,
            seed_amplitude: raw.parsed("seed.amplitude")?.unwrap_or(0.0),
            perturbation,
            evolve,
            snapshot_every: raw.parsed("evolve.snapshot_every")?.unwrap_or(0),
            output_dir,
            raw,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_raw(RawConfig::parse(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_raw(RawConfig::load(path)?)
    }

    pub fn grid(&self) -> Result<PhaseGrid> {
        self.grid.ok_or_else(|| missing("grid.n_theta"))
    }

    pub fn casimir(&self) -> Result<CasimirSpec> {
        self.casimir.ok_or_else(|| missing("casimir"))
    }

    pub fn constraints(&self) -> Result<ConstraintSet> {
        ConstraintSet::new(self.m1.ok_or_else(|| missing("constraints.m1"))?, self.mj)
    }

    /// `<output.dir>/<command>-<config hash prefix>`.
    pub fn run_dir(&self, command: &str) -> PathBuf {
        self.output_dir.join(format!("{command}-{}", self.raw.hash_prefix()))
    }
}

/// Expands `key=v1,v2,...` into one config per value.
pub fn sweep_variants(raw: &RawConfig, sweep: &str) -> Result<Vec<RawConfig>> {
    let (key, values) = sweep
        .split_once('=')
        .ok_or_else(|| HmfError::InvalidArgument(format!("sweep must look like key=v1,v2, got {sweep:?}")))?;
    let key = key.trim();
    values
        .split(',')
        .map(|v| {
            let mut r = raw.clone();
            r.set(key, v.trim())?;
            Ok(r)
        })
        .collect()
}
