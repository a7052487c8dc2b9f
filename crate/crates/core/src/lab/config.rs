use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exponents::PhysParams;
use crate::scattering::{MapKind, MapSettings};
use crate::spectral::Profile;

/// One `(ε, σ)` point of a sweep along `ε = σ^{-j}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub eps: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    /// Two-column `σ quotient` file for plotting.
    pub plot: Option<PathBuf>,
}

/// Sweep description, read from TOML:
///
/// ```toml
/// j = 9.0
/// sigmas = [2.0, 4.0, 8.0, 16.0]
/// s = 4.5
/// beta = 3.0
/// map = "scattering"
///
/// [params]
/// d = 1
/// p = 3.0
///
/// [profile]
/// name = "gaussian"
/// width = 4.0
///
/// [settings]
/// tol = 1e-12
///
/// [output]
/// csv = "sweep.csv"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub params: PhysParams,
    #[serde(default)]
    pub profile: Profile,
    pub j: f64,
    pub sigmas: Vec<f64>,
    /// Hölder order of the Σ-quotient.
    pub s: f64,
    /// Exponent of the L²-quotient `‖T(φ)-φ‖₂ / ‖φ‖₂^{1+β}`.
    pub beta: f64,
    #[serde(default = "default_map")]
    pub map: MapKind,
    #[serde(default)]
    pub settings: MapSettings,
    #[serde(default)]
    pub output: OutputPaths,
}

fn default_map() -> MapKind {
    MapKind::Scattering
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SweepConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Rejects configs whose points leave the regime `ε < 1 < σ`, `εσ < 1`.
    pub fn validate(&self) -> Result<()> {
        PhysParams::new(self.params.d, self.params.p)?;
        self.profile.validate()?;
        if !(self.j.is_finite() && self.j > 1.0) {
            return Err(invalid(format!("scaling link j must exceed 1, got {}", self.j)));
        }
        if self.sigmas.is_empty() {
            return Err(invalid("sweep needs at least one σ"));
        }
        if let Some(s) = self.sigmas.iter().find(|s| !(s.is_finite() && **s > 1.0)) {
            return Err(invalid(format!("σ values must exceed 1, got {s}")));
        }
        if self.sigmas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("σ values must be strictly increasing"));
        }
        for pt in self.points() {
            if !(pt.eps > 0.0 && pt.eps < 1.0 && pt.eps * pt.sigma < 1.0) {
                return Err(invalid(format!(
                    "point (ε, σ) = ({:e}, {}) leaves the regime ε < 1, εσ < 1",
                    pt.eps, pt.sigma
                )));
            }
        }
        if !(self.s.is_finite() && self.s > 0.0 && self.beta.is_finite() && self.beta > 0.0) {
            return Err(invalid(format!("need s, β > 0, got s = {}, β = {}", self.s, self.beta)));
        }
        if !(self.settings.tol > 0.0 && self.settings.max_iter > 0) {
            return Err(invalid("Picard tolerance and iteration cap must be positive"));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<SweepPoint> {
        self.sigmas.iter().map(|&sigma| SweepPoint { eps: sigma.powf(-self.j), sigma }).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = r#"
j = 9.0
sigmas = [2.0, 4.0, 8.0, 16.0]
s = 4.5
beta = 3.0

[params]
d = 1
p = 3.0

[profile]
name = "gaussian"
width = 4.0
"#;

    #[test]
    fn parses_reference() {
        let cfg = SweepConfig::from_toml(REFERENCE).unwrap();
        assert_eq!(cfg.map, MapKind::Scattering);
        assert_eq!(cfg.points()[1].eps, 4f64.powi(-9));
        assert_eq!(SweepConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn rejects_regime_violations() {
        let bad = [
            REFERENCE.replace("j = 9.0", "j = 1.0"),
            REFERENCE.replace("[2.0, 4.0", "[1.0, 4.0"),
            REFERENCE.replace("[2.0, 4.0, 8.0", "[4.0, 2.0, 8.0"),
            REFERENCE.replace("s = 4.5", "s = -1.0"),
        ];
        for text in bad {
            assert!(matches!(SweepConfig::from_toml(&text), Err(Error::InvalidParameter(_))));
        }
        assert!(matches!(SweepConfig::from_toml("j = "), Err(Error::Config(_))));
        let unknown = format!("foo = 1\n{REFERENCE}");
        assert!(matches!(SweepConfig::from_toml(&unknown), Err(Error::Config(_))));
    }
}
