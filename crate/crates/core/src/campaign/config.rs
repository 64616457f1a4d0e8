// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bist::Fault;
use crate::bumpmap::{
    build_test_map, AdjacencyGraph, BumpMap, Lattice, LatticeKind, DEFAULT_SHORT_RADIUS_FACTOR,
};
use crate::{Error, Result};

pub const CONFIG_VERSION: u32 = 1;

fn default_radius_factor() -> f64 {
    DEFAULT_SHORT_RADIUS_FACTOR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub kind: LatticeKind,
    pub rows: usize,
    pub cols: usize,
    pub pitch_um: f64,
    /// Short radius in units of pitch.
    #[serde(default = "default_radius_factor")]
    pub short_radius_factor: f64,
}

impl MapSpec {
    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.kind, self.rows, self.cols, self.pitch_um)
    }
}

/// Relative weights of the three fault categories.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KindMix {
    #[serde(default)]
    pub sa: f64,
    /// Bridges between graph neighbors in the same block.
    #[serde(default)]
    pub bridge: f64,
    /// Bridges between graph neighbors in different blocks.
    #[serde(default)]
    pub inter_block: f64,
}

impl KindMix {
    pub fn weights(&self) -> [f64; 3] {
        [self.sa, self.bridge, self.inter_block]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorMix {
    #[serde(default)]
    pub wired_and: f64,
    #[serde(default)]
    pub wired_or: f64,
}

impl Default for BehaviorMix {
    fn default() -> Self {
        BehaviorMix {
            wired_and: 1.0,
            wired_or: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    pub n_faults: usize,
    pub mix: KindMix,
    #[serde(default)]
    pub behavior_mix: BehaviorMix,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub version: u32,
    pub map: MapSpec,
    pub block_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faults: Option<Vec<Fault>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

fn check_weights(name: &str, weights: &[f64]) -> Result<()> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(invalid(format!("{name} weights must be finite and non-negative")));
    }
    if weights.iter().sum::<f64>() <= 0.0 {
        return Err(invalid(format!("{name} weights must not all be zero")));
    }
    Ok(())
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: CampaignConfig =
            serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Checks everything that does not need the built map.
    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(invalid(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        self.map.lattice().map_err(|e| invalid(e.to_string()))?;
        let f = self.map.short_radius_factor;
        if !(f.is_finite() && f > 0.0) {
            return Err(invalid(format!("short_radius_factor must be positive, got {f}")));
        }
        if self.block_count == 0 || self.block_count > self.map.cols {
            return Err(invalid(format!(
                "block_count must be in 1..={}, got {}",
                self.map.cols, self.block_count
            )));
        }
        match (&self.faults, &self.sampler) {
            (Some(_), Some(_)) => Err(invalid("give either `faults` or `sampler`, not both")),
            (None, None) => Err(invalid("one of `faults` or `sampler` is required")),
            (None, Some(s)) => {
                if s.n_faults > 0 {
                    check_weights("mix", &s.mix.weights())?;
                    if s.mix.bridge + s.mix.inter_block > 0.0 {
                        check_weights(
                            "behavior_mix",
                            &[s.behavior_mix.wired_and, s.behavior_mix.wired_or],
                        )?;
                    }
                }
                Ok(())
            }
            (Some(_), None) => Ok(()),
        }
    }

    /// Replaces the sampler seed.
    pub fn override_seed(&mut self, seed: u64) -> Result<()> {
        match &mut self.sampler {
            Some(s) => {
                s.seed = seed;
                Ok(())
            }
            None => Err(invalid("--seed needs a config with a `sampler`")),
        }
    }

    /// Builds the colored, blocked map. Explicit faults are checked against it.
    pub fn build_map(&self) -> Result<(BumpMap, AdjacencyGraph)> {
        let lattice = self.map.lattice()?;
        let (map, graph) = build_test_map(lattice, self.map.short_radius_factor * self.map.pitch_um, self.block_count)?;
        if let Some(faults) = &self.faults {
            for (i, f) in faults.iter().enumerate() {
                f.validate(&map)
                    .map_err(|e| invalid(format!("faults[{i}]: {e}")))?;
            }
        }
        Ok((map, graph))
    }
}
