//! Sweep configuration: a JSON preset plus command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use pdcnot_core::quadrature::{DEFAULT_NODES, MIN_NODES};
use pdcnot_core::{CavityEmitterParams, NodeConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Single,
    #[default]
    Parallel,
    ScParallel,
}

/// Either an explicit list of values or `steps` evenly spaced points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Range {
    Value(f64),
    Values(Vec<f64>),
    Linspace { start: f64, stop: f64, steps: usize },
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Range::Value(v) => vec![*v],
            Range::Values(v) => v.clone(),
            Range::Linspace { start, stop, steps } => match steps {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n)
                    .map(|i| start + (stop - start) * i as f64 / (*n - 1) as f64)
                    .collect(),
            },
        }
    }
}

/// Detuning ranges for one node, in units of the emitter linewidth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetuningRanges {
    pub delta_up: Range,
    pub delta_down: Range,
    pub delta_cavity: Range,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub variant: Variant,
    pub c_a: Range,
    pub c_b: Range,
    pub node_a: DetuningRanges,
    pub node_b: DetuningRanges,
    pub nodes: usize,
    pub out: Option<PathBuf>,
    /// Seed for the randomized property suites; the sweeps themselves are deterministic.
    pub seed: u64,
    pub ideal: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let b = NodeConfig::benchmark();
        let det = |p: CavityEmitterParams| DetuningRanges {
            delta_up: Range::Value(p.delta_up),
            delta_down: Range::Value(p.delta_down),
            delta_cavity: Range::Value(p.delta_cavity),
        };
        Self {
            variant: Variant::default(),
            c_a: Range::Value(b.params_a.cooperativity),
            c_b: Range::Value(b.params_b.cooperativity),
            node_a: det(b.params_a),
            node_b: det(b.params_b),
            nodes: DEFAULT_NODES,
            out: None,
            seed: 0,
            ideal: false,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub ideal: bool,
    pub nodes: Option<usize>,
    pub out: Option<PathBuf>,
    pub variant: Option<Variant>,
}

/// One grid point in CSV column order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub c_a: f64,
    pub c_b: f64,
    pub delta_up_a: f64,
    pub delta_down_a: f64,
    pub delta_c_a: f64,
    pub delta_up_b: f64,
    pub delta_down_b: f64,
    pub delta_c_b: f64,
}

impl GridPoint {
    pub fn as_array(&self) -> [f64; 8] {
        [
            self.c_a,
            self.c_b,
            self.delta_up_a,
            self.delta_down_a,
            self.delta_c_a,
            self.delta_up_b,
            self.delta_down_b,
            self.delta_c_b,
        ]
    }

    pub fn node_config(&self, ideal: bool) -> Result<NodeConfig, CliError> {
        let a = CavityEmitterParams::new(self.delta_up_a, self.delta_down_a, self.delta_c_a, self.c_a)?;
        let b = CavityEmitterParams::new(self.delta_up_b, self.delta_down_b, self.delta_c_b, self.c_b)?;
        let mut cfg = NodeConfig::new(a, b)?;
        cfg.ideal = ideal;
        Ok(cfg)
    }
}

impl SweepConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// File (or defaults) first, then flags.
    pub fn resolve(path: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match path {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        cfg.ideal |= overrides.ideal;
        if let Some(n) = overrides.nodes {
            cfg.nodes = n;
        }
        if let Some(out) = &overrides.out {
            cfg.out = Some(out.clone());
        }
        if let Some(v) = overrides.variant {
            cfg.variant = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.nodes < MIN_NODES {
            return Err(CliError::Config(format!(
                "nodes must be at least {MIN_NODES}, got {}",
                self.nodes
            )));
        }
        for (name, r) in self.ranges() {
            let v = r.values();
            if v.is_empty() {
                return Err(CliError::Config(format!("range `{name}` is empty")));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(CliError::Config(format!("range `{name}` has non-finite values")));
            }
        }
        for (name, r) in [("c_a", &self.c_a), ("c_b", &self.c_b)] {
            if r.values().iter().any(|&c| c < 0.0) {
                return Err(CliError::Config(format!("range `{name}` has negative cooperativities")));
            }
        }
        Ok(())
    }

    fn ranges(&self) -> [(&'static str, &Range); 8] {
        [
            ("c_a", &self.c_a),
            ("c_b", &self.c_b),
            ("node_a.delta_up", &self.node_a.delta_up),
            ("node_a.delta_down", &self.node_a.delta_down),
            ("node_a.delta_cavity", &self.node_a.delta_cavity),
            ("node_b.delta_up", &self.node_b.delta_up),
            ("node_b.delta_down", &self.node_b.delta_down),
            ("node_b.delta_cavity", &self.node_b.delta_cavity),
        ]
    }

    /// Cartesian product in CSV column order, last column varying fastest.
    pub fn grid(&self) -> Vec<GridPoint> {
        let axes: Vec<Vec<f64>> = self.ranges().iter().map(|(_, r)| r.values()).collect();
        let total: usize = axes.iter().map(Vec::len).product();
        let mut out = Vec::with_capacity(total);
        let mut idx = [0usize; 8];
        for _ in 0..total {
            let v: [f64; 8] = std::array::from_fn(|k| axes[k][idx[k]]);
            out.push(GridPoint {
                c_a: v[0],
                c_b: v[1],
                delta_up_a: v[2],
                delta_down_a: v[3],
                delta_c_a: v[4],
                delta_up_b: v[5],
                delta_down_b: v[6],
                delta_c_b: v[7],
            });
            for k in (0..8).rev() {
                idx[k] += 1;
                if idx[k] < axes[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
        out
    }

    /// First grid point, used by the single-point commands.
    pub fn first_point(&self) -> GridPoint {
        self.grid()[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_expand() {
        assert_eq!(Range::Value(2.0).values(), [2.0]);
        assert_eq!(Range::Linspace { start: 0.0, stop: 1.0, steps: 3 }.values(), [0.0, 0.5, 1.0]);
        assert!(Range::Values(vec![]).values().is_empty());
    }

    #[test]
    fn json_forms() {
        let cfg: SweepConfig = serde_json::from_str(
            r#"{"variant": "sc-parallel", "c_a": [10, 150], "c_b": {"start": 5, "stop": 50, "steps": 2}, "nodes": 16}"#,
        )
        .unwrap();
        assert_eq!(cfg.variant, Variant::ScParallel);
        assert_eq!(cfg.grid().len(), 4);
        assert_eq!(cfg.grid()[1].c_b, 50.0);
        assert_eq!(cfg.grid()[0].delta_c_b, 0.5);
        assert!(serde_json::from_str::<SweepConfig>(r#"{"typo": 1}"#).is_err());
    }

    #[test]
    fn flags_win() {
        let over = Overrides {
            nodes: Some(12),
            variant: Some(Variant::Single),
            ideal: true,
            ..Overrides::default()
        };
        let cfg = SweepConfig::resolve(None, &over).unwrap();
        assert_eq!((cfg.nodes, cfg.variant, cfg.ideal), (12, Variant::Single, true));
    }

    #[test]
    fn invalid_configs() {
        let bad_nodes = Overrides { nodes: Some(4), ..Overrides::default() };
        assert!(matches!(SweepConfig::resolve(None, &bad_nodes), Err(CliError::Config(_))));
        let cfg = SweepConfig { c_a: Range::Values(vec![]), ..SweepConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = SweepConfig { c_b: Range::Value(-1.0), ..SweepConfig::default() };
        assert!(cfg.validate().is_err());
    }
}
