//! Run configuration read from TOML.
//!
//! ```toml
//! model = "II"
//! k = 3
//! lambda0 = 1e-6
//! sigma1 = 1.0        # or lambda_max
//! mu0 = 100.0
//! sigma2 = 0.5        # or mu_min
//! n_outer = 27
//! n_inner = 20
//! tol = 1e-6
//! seed = 0
//! starts = 10
//! ```
//!
//! Missing keys take the defaults of [`RunConfig::default`]. Each of the
//! pairs `lambda_max`/`sigma1` and `mu_min`/`sigma2` accepts at most one key.

use std::path::Path;

use serde::Deserialize;

use crate::continuation::{ModelKind, Schedule, SolveOptions};
use crate::error::{Error, Result};
use crate::init::StartSpec;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    pub k: usize,
    pub lambda0: f64,
    pub lambda_max: Option<f64>,
    pub sigma1: Option<f64>,
    pub mu0: f64,
    pub mu_min: Option<f64>,
    pub sigma2: Option<f64>,
    pub n_outer: usize,
    pub n_inner: usize,
    pub tol: f64,
    pub seed: u64,
    /// Number of random starts, seeded `seed, seed + 1, …`.
    pub starts: usize,
    pub gamma: Option<f64>,
    pub r0: f64,
    pub n_probes: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelKind::One,
            k: 3,
            lambda0: 1e-6,
            lambda_max: None,
            sigma1: None,
            mu0: 100.0,
            mu_min: None,
            sigma2: None,
            n_outer: 27,
            n_inner: 20,
            tol: 1e-6,
            seed: 0,
            starts: 1,
            gamma: None,
            r0: 0.1,
            n_probes: 10,
        }
    }
}

fn factor(start: f64, end: Option<f64>, sigma: Option<f64>, default: f64, n: usize, names: (&str, &str)) -> Result<f64> {
    match (end, sigma) {
        (Some(_), Some(_)) => Err(Error::Config(format!("give either {} or {}, not both", names.0, names.1))),
        (Some(end), None) => {
            if !(end > 0.0 && start > 0.0) || n == 0 {
                return Err(Error::Config(format!("{} and its start value must be positive", names.0)));
            }
            Ok((end / start).powf(1.0 / n as f64))
        }
        (None, Some(s)) => Ok(s),
        (None, None) => Ok(default),
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&crate::dataio::read_text(path)?)
    }

    pub fn schedule(&self) -> Result<Schedule> {
        let s1 = factor(self.lambda0, self.lambda_max, self.sigma1, 1.0, self.n_outer, ("lambda_max", "sigma1"))?;
        let s2 = factor(self.mu0, self.mu_min, self.sigma2, 0.5, self.n_outer, ("mu_min", "sigma2"))?;
        let mut schedule = Schedule::direct(self.lambda0, s1, self.mu0, s2, self.n_outer, self.n_inner)
            .map_err(|e| Error::Config(e.to_string()))?;
        if let Some(l) = self.lambda_max {
            schedule.lambda_max = l;
        }
        if let Some(m) = self.mu_min {
            schedule.mu_min = m;
        }
        Ok(schedule)
    }

    pub fn start_spec(&self) -> StartSpec {
        StartSpec {
            gamma: self.gamma,
            r0: self.r0,
            n_probes: self.n_probes,
            seed: self.seed,
        }
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.starts as u64).map(|i| self.seed.wrapping_add(i)).collect()
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.tol,
            timing: false,
        }
    }

    /// Checks everything that does not depend on the data.
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Config(format!("k must be at least 2, got {}", self.k)));
        }
        if self.starts == 0 {
            return Err(Error::Config("starts must be at least 1".into()));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::Config(format!("tol must be non-negative, got {}", self.tol)));
        }
        self.start_spec().validate().map_err(|e| Error::Config(e.to_string()))?;
        self.schedule().map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let c = RunConfig::from_toml_str("").unwrap();
        assert_eq!(c, RunConfig::default());
        let s = c.schedule().unwrap();
        assert_eq!((s.lambda0, s.sigma1, s.mu0, s.sigma2), (1e-6, 1.0, 100.0, 0.5));
        let c = RunConfig::from_toml_str("model = \"II\"\nk = 6\nstarts = 3\nseed = 10").unwrap();
        assert_eq!(c.model, ModelKind::Two);
        assert_eq!(c.seeds(), vec![10, 11, 12]);
    }

    #[test]
    fn sigma_and_target_forms_agree() {
        let direct = RunConfig::from_toml_str("sigma1 = 2.0\nsigma2 = 0.5\nn_outer = 10").unwrap();
        let targets = RunConfig::from_toml_str(
            "lambda_max = 1.024e-3\nmu_min = 0.09765625\nn_outer = 10",
        )
        .unwrap();
        let (a, b) = (direct.schedule().unwrap(), targets.schedule().unwrap());
        assert!((a.sigma1 - b.sigma1).abs() < 1e-12);
        assert!((a.sigma2 - b.sigma2).abs() < 1e-12);
    }

    #[test]
    fn bad_configs() {
        assert!(RunConfig::from_toml_str("sigma1 = 2.0\nlambda_max = 3.0").unwrap().schedule().is_err());
        assert!(matches!(RunConfig::from_toml_str("colour = 1"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::from_toml_str("model = \"V\""), Err(Error::Config(_))));
        assert!(RunConfig::from_toml_str("k = 1").unwrap().validate().is_err());
        assert!(RunConfig::from_toml_str("sigma2 = 2.0").unwrap().validate().is_err());
    }
}
