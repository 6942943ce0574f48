//! Experiment configuration: a single TOML document with every knob
//! materialized, echoed verbatim into the report for provenance.

use hyperharm::boundary::BoundaryFunction;
use hyperharm::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seed for sampled audits (support boxes, cutoff sampling).
    pub seed: u64,
    pub model: ModelConfig,
    pub spectral: SpectralConfig,
    /// Boundary data paired linearly.
    pub data: DataConfig,
    /// Boundary data paired conjugate-linearly.
    pub data_prime: DataConfig,
    pub symbol: SymbolConfig,
    pub quadrature: QuadratureConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// "plane" or "cylinder".
    pub kind: String,
    /// Generator translation length (cylinder only).
    pub ell: Option<f64>,
    /// Orbit-sum truncation (cylinder only).
    pub truncation: Option<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralConfig {
    pub q: f64,
    pub q_prime: f64,
    /// Strictly increasing list of asymptotic parameters.
    pub r_list: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    /// "constant", "fourier", "vonmises" or "window".
    pub form: String,
    pub amplitude_re: f64,
    pub amplitude_im: f64,
    /// Center angle for peaked forms.
    pub center: Option<f64>,
    /// Concentration of the periodic bump.
    pub concentration: Option<f64>,
    /// Angular halfwidth of the hard window.
    pub halfwidth: Option<f64>,
    /// Interleaved re/im coefficient list c_{-M}..c_{M} for "fourier".
    pub coefficients: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolConfig {
    pub base_re: f64,
    pub base_im: f64,
    /// Hyperbolic radius of the base bump.
    pub base_radius: f64,
    pub direction_center: f64,
    pub direction_halfwidth: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Boundary-pair nodes per axis; 0 selects automatically from r.
    pub pair_nodes: usize,
    /// "phase-factored" or "grid".
    pub pair_scheme: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            model: ModelConfig { kind: "plane".into(), ell: None, truncation: None },
            spectral: SpectralConfig {
                q: 0.45,
                q_prime: 0.15,
                // geometric grid, six points per decade over 1.5 decades
                r_list: (0..10).map(|k| 20.0 * 10f64.powf(k as f64 / 6.0)).collect(),
            },
            data: DataConfig {
                form: "window".into(),
                amplitude_re: 1.0,
                amplitude_im: 0.25,
                center: Some(2.2),
                concentration: None,
                halfwidth: Some(0.75),
                coefficients: None,
            },
            data_prime: DataConfig {
                form: "window".into(),
                amplitude_re: 0.9,
                amplitude_im: -0.4,
                center: Some(2.2 + std::f64::consts::PI),
                concentration: None,
                halfwidth: Some(1.1),
                coefficients: None,
            },
            symbol: SymbolConfig {
                base_re: 0.12,
                base_im: 0.07,
                base_radius: 0.75,
                direction_center: 2.2,
                direction_halfwidth: 0.3,
            },
            quadrature: QuadratureConfig {
                rel_tol: 1e-7,
                abs_tol: 1e-13,
                pair_nodes: 0,
                pair_scheme: "phase-factored".into(),
            },
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Domain(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        match self.model.kind.as_str() {
            "plane" => {}
            "cylinder" => {
                if self.model.ell.is_none() || self.model.truncation.is_none() {
                    return Err(Error::Domain(
                        "cylinder model needs ell and truncation".into(),
                    ));
                }
            }
            other => return Err(Error::Domain(format!("unknown model kind '{other}'"))),
        }
        for w in self.spectral.r_list.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Domain("r_list must be strictly increasing".into()));
            }
        }
        for r in &self.spectral.r_list {
            if !(*r > 0.0) {
                return Err(Error::Domain("r values must be positive".into()));
            }
        }
        for q in [self.spectral.q, self.spectral.q_prime] {
            if !(-hyperharm::boundary::SpectralPair::STRIP_BOUND..=0.5).contains(&q) {
                return Err(Error::Domain(format!("q = {q} outside the strip")));
            }
        }
        self.data.build()?;
        self.data_prime.build()?;
        match self.quadrature.pair_scheme.as_str() {
            "phase-factored" | "grid" => {}
            other => return Err(Error::Domain(format!("unknown pair scheme '{other}'"))),
        }
        Ok(())
    }

    /// Spans at least one decade, required for a meaningful slope fit.
    pub fn spans_decade(&self) -> bool {
        match (self.spectral.r_list.first(), self.spectral.r_list.last()) {
            (Some(a), Some(b)) => b / a >= 10.0,
            _ => false,
        }
    }
}

impl DataConfig {
    pub fn build(&self) -> Result<BoundaryFunction> {
        let amp = Complex64::new(self.amplitude_re, self.amplitude_im);
        match self.form.as_str() {
            "constant" => Ok(BoundaryFunction::constant(amp)),
            "vonmises" => {
                let c = self.center.ok_or_else(|| miss("center"))?;
                let k = self.concentration.ok_or_else(|| miss("concentration"))?;
                Ok(BoundaryFunction::vonmises_bump(c, k, amp))
            }
            "window" => {
                let c = self.center.ok_or_else(|| miss("center"))?;
                let w = self.halfwidth.ok_or_else(|| miss("halfwidth"))?;
                Ok(BoundaryFunction::window_bump(c, w, amp))
            }
            "fourier" => {
                let raw = self.coefficients.clone().ok_or_else(|| miss("coefficients"))?;
                if raw.len() % 4 != 2 {
                    return Err(Error::Domain(
                        "fourier coefficients must be 2(2M+1) interleaved re/im values".into(),
                    ));
                }
                let coeffs: Vec<Complex64> = raw
                    .chunks(2)
                    .map(|c| amp * Complex64::new(c[0], c[1]))
                    .collect();
                Ok(BoundaryFunction::fourier(coeffs))
            }
            other => Err(Error::Domain(format!("unknown data form '{other}'"))),
        }
    }
}

fn miss(field: &str) -> Error {
    Error::Domain(format!("missing data field '{field}'"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_and_validates() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        assert!(cfg.spans_decade());
        let text = cfg.to_toml();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(back.spectral.r_list.len(), cfg.spectral.r_list.len());
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = ExperimentConfig::default();
        cfg.spectral.r_list = vec![10.0, 5.0];
        assert!(cfg.validate().is_err());

        let mut cfg = ExperimentConfig::default();
        cfg.model.kind = "torus".into();
        assert!(cfg.validate().is_err());

        let mut cfg = ExperimentConfig::default();
        cfg.data.form = "window".into();
        cfg.data.halfwidth = None;
        assert!(cfg.validate().is_err());

        assert!(ExperimentConfig::from_toml("nonsense = ").is_err());
    }
}
