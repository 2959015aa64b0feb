use std::fs;
use std::path::{Path, PathBuf};

use crate::integrator::ButcherTableau;
use crate::lie::{Formulation, Vec3};
use crate::models::ModelKind;

use super::BenchError;

/// Settings of one benchmark run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub formulation: Formulation,
    /// s
    pub dt: f64,
    /// s
    pub t_end: f64,
    pub tableau: ButcherTableau,
    /// Replaces the model's default gravity when set.
    pub gravity: Option<Vec3>,
    pub output_stride: usize,
    /// Output directory.
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelKind::HeavyTop,
            formulation: Formulation::Se3,
            dt: 1e-3,
            t_end: 5.0,
            tableau: ButcherTableau::rk4(),
            gravity: None,
            output_stride: 1,
            output: PathBuf::from("."),
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, BenchError> {
    value
        .parse::<f64>()
        .map_err(|_| BenchError::Config(format!("{key}: `{value}` is not a number")))
}

fn parse_gravity(value: &str) -> Result<Option<Vec3>, BenchError> {
    if matches!(value, "default" | "none" | "") {
        return Ok(None);
    }
    let parts: Vec<&str> = value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    match parts.as_slice() {
        [g] => Ok(Some(Vec3::new(0.0, 0.0, -parse_f64("gravity", g)?))),
        [x, y, z] => Ok(Some(Vec3::new(
            parse_f64("gravity", x)?,
            parse_f64("gravity", y)?,
            parse_f64("gravity", z)?,
        ))),
        _ => Err(BenchError::Config(format!(
            "gravity: expected `g` or `gx, gy, gz`, got `{value}`"
        ))),
    }
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), BenchError> {
        let (key, value) = (key.trim(), value.trim());
        match key {
            "model" => self.model = value.parse().map_err(BenchError::Config)?,
            "formulation" => self.formulation = value.parse().map_err(BenchError::Config)?,
            "dt" => self.dt = parse_f64(key, value)?,
            "t_end" => self.t_end = parse_f64(key, value)?,
            "tableau" => self.tableau = value.parse().map_err(BenchError::Config)?,
            "gravity" => self.gravity = parse_gravity(value)?,
            "output_stride" => {
                self.output_stride = value
                    .parse()
                    .map_err(|_| BenchError::Config(format!("output_stride: `{value}` is not a count")))?
            }
            "output" => self.output = PathBuf::from(value),
            _ => return Err(BenchError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a `key=value` override as given on the command line.
    pub fn set_pair(&mut self, pair: &str) -> Result<(), BenchError> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| BenchError::Config(format!("expected key=value, got `{pair}`")))?;
        self.set(k, v)
    }

    /// Parses flat `key = value` lines; `#` starts a comment.
    pub fn apply_str(&mut self, text: &str) -> Result<(), BenchError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| BenchError::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(k, v)
                .map_err(|e| BenchError::Config(format!("line {}: {}", n + 1, e.message())))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), BenchError> {
        let text = fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", path.display())))?;
        self.apply_str(&text)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(BenchError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(BenchError::Config(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if self.output_stride == 0 {
            return Err(BenchError::Config("output_stride must be at least 1".into()));
        }
        if let Some(g) = self.gravity {
            if !g.iter().all(|x| x.is_finite()) {
                return Err(BenchError::Config("gravity must be finite".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_with_comments() {
        let mut c = RunConfig::default();
        c.apply_str(
            "# heavy top, hybrid\nmodel = double_pendulum\nformulation=so3xr3 # trailing\n\n dt = 2e-3\nt_end = 1\ntableau = heun\ngravity = 0, 0, -1.62\noutput_stride = 10\noutput = out\n",
        )
        .unwrap();
        assert_eq!(c.model, ModelKind::DoublePendulum);
        assert_eq!(c.formulation, Formulation::DirectProduct);
        assert_eq!(c.dt, 2e-3);
        assert_eq!(c.t_end, 1.0);
        assert_eq!(c.tableau.name, "heun");
        assert_eq!(c.gravity, Some(Vec3::new(0.0, 0.0, -1.62)));
        assert_eq!(c.output_stride, 10);
        assert_eq!(c.output, PathBuf::from("out"));
        c.validate().unwrap();
    }

    #[test]
    fn scalar_gravity_points_down() {
        let mut c = RunConfig::default();
        c.set_pair("gravity=9.81").unwrap();
        assert_eq!(c.gravity, Some(Vec3::new(0.0, 0.0, -9.81)));
        c.set_pair("gravity=default").unwrap();
        assert_eq!(c.gravity, None);
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = RunConfig::default();
        assert!(c.set_pair("dt").is_err());
        assert!(c.set_pair("colour=red").is_err());
        assert!(c.set_pair("model=pendulum").is_err());
        assert!(c.set_pair("dt=fast").is_err());
        assert!(c.set_pair("gravity=1,2").is_err());
        let err = c.apply_str("model = heavy_top\nnonsense\n").unwrap_err();
        assert!(err.message().contains("line 2"), "{}", err.message());
        c.set_pair("dt=-1").unwrap();
        assert!(c.validate().is_err());
    }
}
