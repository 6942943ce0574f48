//! The asymptotic sweep: evaluates both pairings over the r-grid, forms
//! the leading-order ratio, and fits the remainder decay rate.

use crate::config::ExperimentConfig;
use hyperharm::boundary::SpectralPair;
use hyperharm::cylinder::{make_cutoff, quotient_symbol, CylinderModel};
use hyperharm::error::{Error, Result};
use hyperharm::pairings::{leading_order_ratio, ps_radon, wigner, PairScheme, PhaseSpaceTest};
use hyperharm::transforms::{make_endpoint_cutoff, CompactGFunction, TransformOptions};
use num_complex::Complex64;

/// One sweep point: both pairings, the leading-order ratio and its
/// uncertainty.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub r: f64,
    pub wigner: Complex64,
    pub wigner_estimate: f64,
    pub ps: Complex64,
    pub ps_estimate: f64,
    pub ratio: Complex64,
    pub ratio_deviation: f64,
    pub ratio_uncertainty: f64,
    pub nodes: usize,
}

/// Node count per pair axis: enough cells for the data windows plus the
/// residual phase curvature, which grows like sqrt(r).
pub fn auto_pair_nodes(r: f64) -> usize {
    let base = 48.0_f64;
    let osc = 2.2 * r.sqrt();
    (base.max(osc).ceil() as usize + 1) & !1usize
}

/// Runs the sweep described by the config; rows come out in r order.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let t = config.data.build()?;
    let tp = config.data_prime.build()?;
    let u = PhaseSpaceTest::new(
        Complex64::new(config.symbol.base_re, config.symbol.base_im),
        config.symbol.base_radius,
        config.symbol.direction_center,
        config.symbol.direction_halfwidth,
    )?;
    let symbol: CompactGFunction = match config.model.kind.as_str() {
        "plane" => u.as_compact().clone(),
        "cylinder" => {
            let model = CylinderModel::new(
                config.model.ell.expect("validated"),
                config.model.truncation.expect("validated"),
            )?;
            let chi = make_cutoff(&model, 0.0, 0.4 * model.ell.min(1.5), 1.2, 1.9)?;
            quotient_symbol(u.as_compact(), &chi, &model)
        }
        _ => unreachable!("validated"),
    };
    let beta = make_endpoint_cutoff(symbol.support(), 8)?;
    let opts = TransformOptions {
        rel_tol: config.quadrature.rel_tol,
        abs_tol: config.quadrature.abs_tol,
        ..Default::default()
    };

    let mut rows = Vec::with_capacity(config.spectral.r_list.len());
    for &r in &config.spectral.r_list {
        let sp = SpectralPair::new(config.spectral.q, config.spectral.q_prime, r)?;
        let n = if config.quadrature.pair_nodes > 0 {
            config.quadrature.pair_nodes
        } else {
            auto_pair_nodes(r)
        };
        let scheme = match config.quadrature.pair_scheme.as_str() {
            "grid" => PairScheme::Grid { n },
            _ => PairScheme::PhaseFactored { n },
        };
        let w = wigner(&t, &tp, &sp, &symbol, &beta, scheme, &opts)?;
        let ps = ps_radon(&t, &tp, &sp, &symbol, scheme, &opts)?;
        if w.value.norm() == 0.0 || ps.value.norm() == 0.0 {
            rows.push(SweepRow {
                r,
                wigner: w.value,
                wigner_estimate: w.error_estimate,
                ps: ps.value,
                ps_estimate: ps.error_estimate,
                ratio: Complex64::new(f64::NAN, f64::NAN),
                ratio_deviation: f64::NAN,
                ratio_uncertainty: f64::NAN,
                nodes: w.nodes,
            });
            continue;
        }
        let (rho, unc) = leading_order_ratio(&w, &ps, r);
        rows.push(SweepRow {
            r,
            wigner: w.value,
            wigner_estimate: w.error_estimate,
            ps: ps.value,
            ps_estimate: ps.error_estimate,
            ratio: rho,
            ratio_deviation: (rho - Complex64::new(1.0, 0.0)).norm(),
            ratio_uncertainty: unc,
            nodes: w.nodes,
        });
    }
    Ok(rows)
}

/// Outcome of the remainder fit.
#[derive(Debug, Clone)]
pub enum FitOutcome {
    Fitted {
        slope: f64,
        intercept: f64,
        /// Root-mean-square residual of the weighted log-log fit.
        residual: f64,
        points_used: usize,
        /// Slope lies in the accepted decay window.
        pass: bool,
    },
    /// All deviations sat below the noise floor; vacuous pass.
    NoiseFloor { floor: f64 },
    /// Too few usable points; reported, not fitted.
    Insufficient { usable: usize },
}

/// Accepted window for the log-log decay slope of |rho - 1|.
pub const SLOPE_WINDOW: (f64, f64) = (-1.3, -0.7);

/// Weighted least-squares fit of log |rho(r) - 1| against log r. Points
/// with deviation below 3x their propagated uncertainty are excluded as
/// noise.
pub fn fit_remainder(rows: &[SweepRow]) -> Result<FitOutcome> {
    let mut pts = Vec::new();
    let mut floor: f64 = 0.0;
    for row in rows {
        if !row.ratio_deviation.is_finite() {
            continue;
        }
        let noise = 3.0 * row.ratio_uncertainty;
        floor = floor.max(noise);
        if row.ratio_deviation > noise && row.ratio_deviation > 0.0 {
            let sigma_log = (row.ratio_uncertainty / row.ratio_deviation).max(1e-12);
            pts.push((row.r.ln(), row.ratio_deviation.ln(), 1.0 / (sigma_log * sigma_log)));
        }
    }
    if pts.is_empty() {
        return Ok(FitOutcome::NoiseFloor { floor });
    }
    if pts.len() < 4 {
        return Ok(FitOutcome::Insufficient { usable: pts.len() });
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let sx: f64 = pts.iter().map(|p| p.2 * p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.2 * p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.2 * p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * p.0 * p.1).sum();
    let det = sw * sxx - sx * sx;
    if det.abs() < 1e-30 {
        return Err(Error::FitFailure("degenerate abscissae".into()));
    }
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    let mut ss = 0.0;
    for (x, y, _) in &pts {
        let m = slope * x + intercept;
        ss += (y - m) * (y - m);
    }
    let residual = (ss / pts.len() as f64).sqrt();
    Ok(FitOutcome::Fitted {
        slope,
        intercept,
        residual,
        points_used: pts.len(),
        pass: (SLOPE_WINDOW.0..=SLOPE_WINDOW.1).contains(&slope),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic_rows(exponent: f64) -> Vec<SweepRow> {
        (0..8)
            .map(|k| {
                let r = 20.0 * 2f64.powi(k);
                let dev = r.powf(exponent);
                SweepRow {
                    r,
                    wigner: Complex64::new(1.0, 0.0),
                    wigner_estimate: 0.0,
                    ps: Complex64::new(1.0, 0.0),
                    ps_estimate: 0.0,
                    ratio: Complex64::new(1.0 + dev, 0.0),
                    ratio_deviation: dev,
                    ratio_uncertainty: 1e-12 * dev,
                    nodes: 0,
                }
            })
            .collect()
    }

    #[test]
    fn exact_inverse_law_fits_slope_minus_one() {
        match fit_remainder(&synthetic_rows(-1.0)).unwrap() {
            FitOutcome::Fitted { slope, pass, .. } => {
                assert!((slope + 1.0).abs() <= 1e-12, "slope {slope}");
                assert!(pass);
            }
            other => panic!("expected fit, got {other:?}"),
        }
    }

    #[test]
    fn half_power_law_fails_the_window() {
        match fit_remainder(&synthetic_rows(-0.5)).unwrap() {
            FitOutcome::Fitted { slope, pass, .. } => {
                assert!((slope + 0.5).abs() <= 1e-12);
                assert!(!pass, "slope -0.5 must fail the decay window");
            }
            other => panic!("expected fit, got {other:?}"),
        }
    }

    #[test]
    fn noise_floor_is_vacuous_pass() {
        let mut rows = synthetic_rows(-1.0);
        for row in &mut rows {
            row.ratio_uncertainty = 10.0 * row.ratio_deviation;
        }
        assert!(matches!(
            fit_remainder(&rows).unwrap(),
            FitOutcome::NoiseFloor { .. }
        ));
    }

    #[test]
    fn too_few_points_reported_not_fitted() {
        let rows = synthetic_rows(-1.0);
        assert!(matches!(
            fit_remainder(&rows[..3]).unwrap(),
            FitOutcome::Insufficient { usable: 3 }
        ));
    }

    #[test]
    fn empty_sweep_is_empty() {
        let mut cfg = ExperimentConfig::default();
        cfg.spectral.r_list.clear();
        let rows = run_sweep(&cfg).unwrap();
        assert!(rows.is_empty());
    }
}
