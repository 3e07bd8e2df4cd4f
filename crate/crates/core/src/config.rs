//! Experiment configuration files.
//!
//! The format is a flat TOML subset: one `key = value` per line, `#` comments,
//! `[section]` headers. Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispersion::ModelParams;
use crate::states::{PacketShape, ShapeKind, Yardstick};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "FIG1")]
    Fig1,
    #[serde(rename = "FIG2")]
    Fig2,
    #[serde(rename = "FIG3")]
    Fig3,
    #[serde(rename = "EVOLVE")]
    Evolve,
    #[serde(rename = "BOOST")]
    Boost,
    #[serde(rename = "KERNELS")]
    Kernels,
}

impl Scenario {
    pub const ALL: [Scenario; 6] =
        [Scenario::Fig1, Scenario::Fig2, Scenario::Fig3, Scenario::Evolve, Scenario::Boost, Scenario::Kernels];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig1 => "FIG1",
            Scenario::Fig2 => "FIG2",
            Scenario::Fig3 => "FIG3",
            Scenario::Evolve => "EVOLVE",
            Scenario::Boost => "BOOST",
            Scenario::Kernels => "KERNELS",
        }
    }

    fn default_grid(self) -> GridSection {
        let (n_points, half) = match self {
            Scenario::Fig1 | Scenario::Fig2 => (16384, 0.16),
            Scenario::Fig3 | Scenario::Evolve | Scenario::Boost => (4096, 0.16),
            Scenario::Kernels => (1024, 0.05),
        };
        GridSection { n_points, z_min: -half, z_max: half }
    }

    fn default_shape(self) -> Option<ShapeSection> {
        match self {
            Scenario::Fig1 => Some(ShapeSection { kind: ShapeName::Box, w: 0.005, center: 0.0 }),
            Scenario::Fig3 => Some(ShapeSection { kind: ShapeName::Box, w: 7.3e-3, center: 0.0 }),
            _ => None,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n_points: usize,
    pub z_min: f64,
    pub z_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub m: f64,
    pub c: f64,
    pub lambda: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        let d = ModelParams::default();
        ModelSection { m: d.m, c: d.c, lambda: d.lambda }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeName {
    Box,
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSection {
    pub kind: ShapeName,
    pub w: f64,
    #[serde(default)]
    pub center: f64,
}

impl ShapeSection {
    pub fn shape(&self) -> PacketShape {
        match self.kind {
            ShapeName::Box => PacketShape::boxed(self.w, self.center),
            ShapeName::Gaussian => PacketShape::gaussian(self.w, self.center),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum YardstickName {
    #[serde(rename = "NW")]
    NewtonWigner,
    #[serde(rename = "FIELD")]
    Field,
}

impl From<YardstickName> for Yardstick {
    fn from(y: YardstickName) -> Self {
        match y {
            YardstickName::NewtonWigner => Yardstick::NewtonWigner,
            YardstickName::Field => Yardstick::Field,
        }
    }
}

/// Scenario-specific settings. Keys that do not apply to the chosen scenario
/// are rejected at load.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// FIG1 final time.
    #[serde(rename = "T")]
    pub t_final: Option<f64>,
    /// EVOLVE sample times.
    pub times: Option<Vec<f64>>,
    /// FIG3 / BOOST velocities.
    pub velocities: Option<Vec<f64>>,
    /// BOOST rapidities, used instead of velocities.
    pub rapidities: Option<Vec<f64>>,
    /// FIG2 packet widths.
    pub widths: Option<Vec<f64>>,
    /// FIG2 packet centers `[x, y]`.
    pub centers: Option<Vec<f64>>,
    /// FIG2 evaluation time for the short-time density.
    pub t: Option<f64>,
    pub yardstick: Option<YardstickName>,
    pub normalize: Option<bool>,
    /// Half-width of the window evaluated by the field-yardstick boost.
    pub field_window: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub output_dir: Option<PathBuf>,
    pub grid: Option<GridSection>,
    #[serde(default)]
    pub model: ModelSection,
    pub shape: Option<ShapeSection>,
    #[serde(default)]
    pub run: RunSection,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1).unwrap_or(1);
            ConfigError::Syntax { line, msg: e.message().to_string() }
        })?;
        cfg.check_keys()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        ExperimentConfig::parse(&text)
    }

    pub fn grid(&self) -> GridSection {
        self.grid.unwrap_or_else(|| self.scenario.default_grid())
    }

    pub fn params(&self) -> ModelParams {
        ModelParams { m: self.model.m, c: self.model.c, lambda: self.model.lambda }
    }

    pub fn shape(&self) -> Option<ShapeSection> {
        self.shape.or_else(|| self.scenario.default_shape())
    }

    pub fn t_final(&self) -> f64 {
        self.run.t_final.unwrap_or(7.5e-5)
    }

    pub fn widths(&self) -> Vec<f64> {
        self.run.widths.clone().unwrap_or_else(|| vec![0.0025, 0.005])
    }

    pub fn centers(&self) -> (f64, f64) {
        match self.run.centers.as_deref() {
            Some([x, y]) => (*x, *y),
            _ => (-0.02, 0.02),
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.run.times.clone().unwrap_or_else(|| vec![0.0])
    }

    pub fn velocities(&self) -> Vec<f64> {
        self.run.velocities.clone().unwrap_or_else(|| vec![100.0])
    }

    pub fn yardstick(&self) -> Yardstick {
        self.run.yardstick.map(Yardstick::from).unwrap_or(Yardstick::NewtonWigner)
    }

    pub fn normalize(&self) -> bool {
        self.run.normalize.unwrap_or(true)
    }

    pub fn field_window(&self) -> f64 {
        self.run.field_window.unwrap_or(0.08)
    }

    /// Output directory, with `env_override` (when set) taking precedence.
    pub fn output_dir(&self, env_override: Option<PathBuf>) -> PathBuf {
        env_override
            .or_else(|| self.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from(format!("out/{}", self.scenario.name().to_lowercase())))
    }

    fn check_keys(&self) -> Result<(), ConfigError> {
        let r = &self.run;
        let present = [
            ("T", r.t_final.is_some()),
            ("times", r.times.is_some()),
            ("velocities", r.velocities.is_some()),
            ("rapidities", r.rapidities.is_some()),
            ("widths", r.widths.is_some()),
            ("centers", r.centers.is_some()),
            ("t", r.t.is_some()),
            ("yardstick", r.yardstick.is_some()),
            ("normalize", r.normalize.is_some()),
            ("field_window", r.field_window.is_some()),
        ];
        let allowed: &[&str] = match self.scenario {
            Scenario::Fig1 => &["T"],
            Scenario::Fig2 => &["widths", "centers", "t"],
            Scenario::Fig3 => &["velocities", "field_window"],
            Scenario::Evolve => &["times", "yardstick", "normalize"],
            Scenario::Boost => &["velocities", "rapidities", "yardstick", "field_window"],
            Scenario::Kernels => &[],
        };
        for (key, set) in present {
            if set && !allowed.contains(&key) {
                return Err(ConfigError::Invalid(format!("run.{key} does not apply to scenario {}", self.scenario)));
            }
        }
        if r.velocities.is_some() && r.rapidities.is_some() {
            return Err(ConfigError::Invalid("give run.velocities or run.rapidities, not both".into()));
        }
        if let Some(c) = &r.centers {
            if c.len() != 2 {
                return Err(ConfigError::Invalid(format!("run.centers needs two entries, got {}", c.len())));
            }
        }
        if matches!(self.scenario, Scenario::Fig2 | Scenario::Kernels) && self.shape.is_some() {
            return Err(ConfigError::Invalid(format!("scenario {} takes no [shape] section", self.scenario)));
        }
        if matches!(self.scenario, Scenario::Evolve | Scenario::Boost) && self.shape.is_none() {
            return Err(ConfigError::Invalid(format!("scenario {} needs a [shape] section", self.scenario)));
        }
        for list in [&r.times, &r.velocities, &r.rapidities, &r.widths] {
            if list.as_ref().is_some_and(|v| v.is_empty()) {
                return Err(ConfigError::Invalid("run lists must not be empty".into()));
            }
        }
        Ok(())
    }

    /// `key = value` lines echoing the effective configuration.
    pub fn echo(&self) -> Vec<(String, String)> {
        let g = self.grid();
        let mut out = vec![
            ("config.scenario".to_string(), self.scenario.name().to_string()),
            ("config.grid.n_points".into(), g.n_points.to_string()),
            ("config.grid.z_min".into(), g.z_min.to_string()),
            ("config.grid.z_max".into(), g.z_max.to_string()),
            ("config.model.m".into(), self.model.m.to_string()),
            ("config.model.c".into(), self.model.c.to_string()),
            ("config.model.lambda".into(), self.model.lambda.to_string()),
        ];
        if let Some(s) = self.shape() {
            let kind = match s.shape().kind {
                ShapeKind::Box => "box",
                ShapeKind::Gaussian => "gaussian",
            };
            out.push(("config.shape.kind".into(), kind.into()));
            out.push(("config.shape.w".into(), s.w.to_string()));
            out.push(("config.shape.center".into(), s.center.to_string()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_fig1() {
        let c = ExperimentConfig::parse("scenario = \"FIG1\"\n").unwrap();
        assert_eq!(c.scenario, Scenario::Fig1);
        assert_eq!(c.grid().n_points, 16384);
        assert_eq!(c.shape().unwrap().w, 0.005);
        assert_eq!(c.t_final(), 7.5e-5);
        assert_eq!(c.params(), ModelParams::default());
    }

    #[test]
    fn full_boost() {
        let text = "# boost\nscenario = \"BOOST\"\noutput_dir = \"x\"\n\n[grid]\nn_points = 256\nz_min = -1.0\nz_max = 1.0\n\n[model]\nc = 10.0\n\n[shape]\nkind = \"gaussian\"\nw = 0.1\n\n[run]\nrapidities = [0.1, 0.2]\nyardstick = \"FIELD\"\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.params().c, 10.0);
        assert_eq!(c.params().m, 1.0);
        assert_eq!(c.yardstick(), Yardstick::Field);
        assert_eq!(c.run.rapidities, Some(vec![0.1, 0.2]));
        assert_eq!(c.output_dir(None), PathBuf::from("x"));
        assert_eq!(c.output_dir(Some("y".into())), PathBuf::from("y"));
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = ExperimentConfig::parse("scenario = \"FIG1\"\n[run]\nT = = 3\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 3, .. }), "{err}");
        let err = ExperimentConfig::parse("scenario = \"FIG1\"\n\n[grid]\nn_points = 64\nz_min = 0.0\nz_max = 1.0\nspacing = 2\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 7, .. }), "{err}");
        assert!(err.to_string().contains("spacing"));
    }

    #[test]
    fn inapplicable_keys_rejected() {
        assert!(ExperimentConfig::parse("scenario = \"FIG1\"\n[run]\nwidths = [0.1]\n").is_err());
        assert!(ExperimentConfig::parse("scenario = \"EVOLVE\"\n").is_err());
        assert!(ExperimentConfig::parse("scenario = \"FIG2\"\n[run]\ncenters = [0.1]\n").is_err());
        assert!(ExperimentConfig::parse("scenario = \"FIG9\"\n").is_err());
    }
}
