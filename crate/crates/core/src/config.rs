//! TOML run configuration. Every table rejects unknown keys; omitted keys take defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eqf::{FilterConfig, OutputModel, Propagation};
use crate::metrics::{SweepAxis, SweepSpec};
use crate::sim::{NoiseSpec, TrajectorySpec};
use crate::symmetry::SymmetryKind;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Filter switches shared by every kind in a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterToggles {
    /// Tangent-group `b_ν = 0` pseudo-measurement after each position fix.
    pub virtual_bias_update: bool,
    pub output: OutputModel,
    pub propagation: Propagation,
}

impl Default for FilterToggles {
    fn default() -> Self {
        let d = FilterConfig::default();
        Self { virtual_bias_update: d.virtual_bias_update, output: d.output, propagation: d.propagation }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub enabled: bool,
    /// Kind pairs `[A, B]`; each panel reports `L_A - L_B`.
    pub pairs: Vec<[SymmetryKind; 2]>,
    pub axes: Vec<SweepAxis>,
    pub grid: SweepSpec,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            pairs: vec![[SymmetryKind::Dp, SymmetryKind::Sd], [SymmetryKind::Tg, SymmetryKind::Sd]],
            axes: SweepAxis::ALL.to_vec(),
            grid: SweepSpec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Master seed; overrides `trajectory.seed`.
    pub seed: u64,
    /// Monte-Carlo runs for `compare`.
    pub runs: usize,
    pub kinds: Vec<SymmetryKind>,
    /// Left out of the echoed config so artifacts do not depend on where they are written.
    #[serde(skip_serializing)]
    pub output: PathBuf,
    pub trajectory: TrajectorySpec,
    pub noise: NoiseSpec,
    pub filter: FilterToggles,
    pub sweep: SweepConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            runs: 50,
            kinds: SymmetryKind::ALL.to_vec(),
            output: PathBuf::from("out"),
            trajectory: TrajectorySpec::default(),
            noise: NoiseSpec::default(),
            filter: FilterToggles::default(),
            sweep: SweepConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
        Ok(cfg.normalized())
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        Self::from_toml(&text, path)
    }

    /// Propagates the master seed into the trajectory.
    pub fn normalized(mut self) -> Self {
        self.trajectory.seed = self.seed;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        self.trajectory.validate().map_err(|e| ConfigError::Invalid(format!("trajectory: {e}")))?;
        self.noise.validate().map_err(|e| ConfigError::Invalid(format!("noise: {e}")))?;
        if self.kinds.is_empty() {
            return bad("kinds: at least one kind is required".into());
        }
        if self.runs == 0 {
            return bad("runs: must be at least 1".into());
        }
        let g = &self.sweep.grid;
        if g.cells == 0 {
            return bad("sweep.grid.cells: must be at least 1".into());
        }
        let ranges = [(g.attitude_min, g.attitude_max, "attitude"), (g.axis_min, g.axis_max, "axis")];
        for (lo, hi, name) in ranges {
            if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                return bad(format!("sweep.grid.{name}_min/{name}_max: need 0 < min <= max"));
            }
        }
        if self.sweep.enabled && (self.sweep.pairs.is_empty() || self.sweep.axes.is_empty()) {
            return bad("sweep: enabled with no pairs or axes".into());
        }
        Ok(())
    }

    pub fn filter_config(&self) -> FilterConfig {
        FilterConfig {
            propagation: self.filter.propagation,
            output: self.filter.output,
            virtual_bias_update: self.filter.virtual_bias_update,
            ..FilterConfig::default()
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        RunConfig::from_toml(text, Path::new("test.toml"))
    }

    #[test]
    fn empty_file_is_the_default() {
        assert_eq!(parse("").unwrap(), RunConfig::default().normalized());
    }

    #[test]
    fn echo_reparses_identically() {
        let mut c = RunConfig { seed: 42, runs: 3, kinds: vec![SymmetryKind::Tg, SymmetryKind::So3R12], ..Default::default() };
        c.filter.output = OutputModel::Linear;
        c.sweep.enabled = true;
        let c = c.normalized();
        assert_eq!(parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_are_named() {
        let e = parse("[noise]\ngyro_nosie = 1.0\n").unwrap_err().to_string();
        assert!(e.contains("gyro_nosie"), "{e}");
        let e = parse("runz = 3\n").unwrap_err().to_string();
        assert!(e.contains("runz"), "{e}");
    }

    #[test]
    fn unknown_kinds_list_the_valid_ones() {
        let e = parse("kinds = [\"tg\", \"ekf\"]\n").unwrap_err().to_string();
        assert!(e.contains("mekf, iekf, tfg, tg, dp, sd"), "{e}");
    }

    #[test]
    fn seed_reaches_the_trajectory() {
        assert_eq!(parse("seed = 9\n").unwrap().trajectory.seed, 9);
    }

    #[test]
    fn validation_names_the_field() {
        let c = parse("[trajectory]\nimu_rate = 200.0\ngnss_rate = 30.0\n").unwrap();
        assert!(c.validate().unwrap_err().to_string().contains("gnss_rate"));
        let c = parse("kinds = []\n").unwrap();
        assert!(c.validate().unwrap_err().to_string().contains("kinds"));
        let c = parse("[noise]\nposition = -1.0\n").unwrap();
        assert!(c.validate().unwrap_err().to_string().contains("position"));
    }
}
