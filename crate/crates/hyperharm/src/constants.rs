//! Normalization constants shared by every module, plus the calibration
//! pass that measures them instead of trusting the closed forms.
//!
//! Measure conventions, all frozen here:
//! - boundary circle: d psi on [0, 2 pi), total mass 2 pi;
//! - diagonal subgroup: (2 pi)^{-1/2} d t in the coordinate exp(t X);
//! - unipotent subgroup: pi^{-1} d x in the coordinate n(x), which is
//!   (sqrt(2) pi)^{-1} times Lebesgue in the unit-length coordinate;
//! - plane measure: the product normalization that factorizes through the
//!   AN chart, i.e. (2 pi)^{-1/2} pi^{-1} times the curvature -1 area;
//! - group (sphere-bundle) measure: d a d n d k in the ANK order,
//!   equivalently e^{t} dk da dn in the KAN order.

use crate::error::Result;
use crate::lie::{BoundaryPoint, GroupElement, KernelModel};
use crate::quad::panel_nodes;
use num_complex::Complex64;
use std::f64::consts::{E, FRAC_PI_4, PI, TAU};

/// Total mass of the boundary circle.
pub const BOUNDARY_MASS: f64 = TAU;

/// Density of the diagonal-subgroup measure in the exp(t X) coordinate.
pub fn a_density() -> f64 {
    1.0 / TAU.sqrt()
}

/// Density of the unipotent-subgroup measure in the n(x) coordinate.
pub fn n_density() -> f64 {
    1.0 / PI
}

/// Density of the plane measure against the curvature -1 Riemannian area.
pub fn area_density() -> f64 {
    a_density() * n_density()
}

/// Exponent of the disk-model kernel relative to the horocycle bracket.
pub const DISK_KERNEL_EXPONENT: f64 = 2.0;

/// KAN-coordinate density of the group measure: weight(t) dtheta dt dx.
pub fn haar_kan_density(t_a: f64) -> f64 {
    2.0 * a_density() * n_density() * t_a.exp()
}

/// Invariant endpoint-pair density constant: in geodesic coordinates the
/// group measure reads C / chord(b,b')^2 dpsi dpsi' dt.
pub fn hopf_density_constant() -> f64 {
    2.0 / (PI * TAU.sqrt())
}

/// Constant converting the A-orbit pair transform back to a group
/// integral: (A-density) / (Hopf constant) = pi / 2.
pub fn pair_weight_constant() -> f64 {
    a_density() / hopf_density_constant()
}

/// Leading constant of the unipotent-average asymptotics,
/// sqrt(2/pi) e^{-i pi/4}.
pub fn leading_constant() -> Complex64 {
    Complex64::from_polar((2.0 / PI).sqrt(), -FRAC_PI_4)
}

/// C-infinity bump profile, 1 at the center, supported on |u| < 1.
pub fn smooth_bump(u: f64) -> f64 {
    if u.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - u * u)).exp() * E
    } else {
        0.0
    }
}

/// C-infinity monotone step, 0 for u <= 0 and 1 for u >= 1.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / u).exp();
        let b = (-1.0 / (1.0 - u)).exp();
        a / (a + b)
    }
}

/// Calibration record: measured values of every convention-bearing
/// constant together with the residuals of the identities that pin them.
#[derive(Debug, Clone)]
pub struct CalibrationRecord {
    /// Measured exponent relating the disk kernel to the bracket kernel.
    pub kernel_exponent: f64,
    /// Spread of that exponent over the sample set.
    pub kernel_exponent_spread: f64,
    /// Measured coefficient c in the KAN density weight e^{c t}.
    pub haar_exponent: f64,
    /// Measured constant of the KAN density at t = 0.
    pub haar_constant: f64,
    /// Two-sided residuals of the plane-measure factorization on test bumps.
    pub factorization_residuals: Vec<f64>,
    /// Residual of the geodesic-coordinate (Hopf) form of the group measure.
    pub hopf_residual: f64,
}

/// Measures the kernel-relation exponent over a deterministic sample grid.
pub fn measure_kernel_exponent() -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..24 {
        for j in 0..24 {
            let rho = 0.08 + 0.78 * (i as f64 + 0.5) / 24.0;
            let phi = TAU * (j as f64 + 0.5) / 24.0;
            let z = Complex64::from_polar(rho, phi);
            let g = crate::lie::from_disk_point(z)?;
            let b = BoundaryPoint::from_angle(1.234 + 0.37 * i as f64);
            let disk = crate::lie::poisson_kernel(&g, &b, KernelModel::Disk)?;
            let bracket = crate::lie::poisson_kernel(&g, &b, KernelModel::Bracket)?;
            if bracket.ln().abs() > 1e-2 {
                let e = disk.ln() / bracket.ln();
                lo = lo.min(e);
                hi = hi.max(e);
            }
        }
    }
    Ok((0.5 * (lo + hi), hi - lo))
}

/// Two-sided check of the plane-measure factorization on a test bump:
/// the disk-chart integral against the AN-chart integral.
pub fn factorization_residual(center: Complex64, width: f64) -> Result<f64> {
    let f = move |z: Complex64| {
        let d = crate::lie::disk_distance(z, center);
        smooth_bump(d / width)
    };

    // A hyperbolic ball is a euclidean disk; bound it along the radial ray.
    let d0 = 2.0 * center.norm().atanh();
    let t_far = ((d0 + width) / 2.0).tanh();
    let t_near = ((d0 - width) / 2.0).tanh();
    let dir = if center.norm() > 0.0 {
        center / center.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let euc_center = dir * 0.5 * (t_far + t_near);
    let euc_radius = 0.5 * (t_far - t_near) + 0.02;
    let lo_x = (euc_center.re - euc_radius).max(-0.999);
    let hi_x = (euc_center.re + euc_radius).min(0.999);
    let lo_y = (euc_center.im - euc_radius).max(-0.999);
    let hi_y = (euc_center.im + euc_radius).min(0.999);

    // Route 1: disk chart, density area_density * 4/(1-|z|^2)^2.
    let nx = panel_nodes(lo_x, hi_x, 14);
    let ny = panel_nodes(lo_y, hi_y, 14);
    let mut disk_val = 0.0;
    for &(x, wx) in &nx {
        for &(y, wy) in &ny {
            let z = Complex64::new(x, y);
            let r2 = z.norm_sqr();
            if r2 < 0.9999 {
                let v = f(z);
                if v != 0.0 {
                    disk_val += v * 4.0 / ((1.0 - r2) * (1.0 - r2)) * wx * wy;
                }
            }
        }
    }
    disk_val *= area_density();

    // Route 2: AN chart, f(a n . o) with the subgroup densities.
    let nt = panel_nodes(-2.5, 2.5, 40);
    let nxn = panel_nodes(-8.0, 8.0, 64);
    let mut an_val = 0.0;
    for &(t, wt) in &nt {
        let et = t.exp();
        for &(x, wx) in &nxn {
            // a n . o = e^t (x + i) in the half-plane
            let z = Complex64::new(et * x, et);
            let w = crate::lie::cayley(z)?;
            let v = f(w);
            if v != 0.0 {
                an_val += v * wt * wx;
            }
        }
    }
    an_val *= a_density() * n_density();

    Ok((disk_val - an_val).abs() / disk_val.abs().max(1e-300))
}

/// Measures the KAN Haar density weight K0 e^{c t} against the defining
/// ANK factorization, using two probes with different A-profiles.
pub fn measure_haar_density() -> Result<(f64, f64)> {
    let p = |theta: f64| smooth_bump((theta - 0.9) / 0.7);
    let w = |x: f64| smooth_bump((x + 0.2) / 0.9);
    let q1 = |t: f64| smooth_bump((t - 0.4) / 1.1);
    let q2 = |t: f64| smooth_bump((t + 0.3) / 0.8);

    // ANK-order integral of F_i(g) = p(theta(g)) q_i(t_a(g)) w(x_n(g))
    // with plain product measure da dn dk (dk = 2 dtheta on [0, pi)).
    let ank_integral = |q: &dyn Fn(f64) -> f64| -> f64 {
        let nt = panel_nodes(-2.2, 2.2, 16);
        let nx = panel_nodes(-4.5, 4.5, 18);
        let nth = panel_nodes(0.0, PI, 12);
        let mut acc = 0.0;
        for &(t, wt) in &nt {
            let a = GroupElement::diagonal_flow(t);
            for &(x, wx) in &nx {
                let an = a.compose(&GroupElement::unipotent_upper(x));
                for &(th, wth) in &nth {
                    let g = an.compose(&GroupElement::rotation(th));
                    let co = g.iwasawa();
                    let mut gth = co.theta;
                    if gth < 0.0 {
                        gth += PI;
                    }
                    let v = p(gth) * q(co.t_a) * w(co.x_n);
                    if v != 0.0 {
                        acc += v * wt * wx * (2.0 * wth);
                    }
                }
            }
        }
        acc * a_density() * n_density()
    };

    // KAN-order moments factorize into 1D integrals; the model density is
    // K0 e^{c t} per dtheta dt dx, so the K-factor integrates plain p.
    let one_d = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| -> f64 {
        panel_nodes(a, b, 24).iter().map(|&(x, w)| f(x) * w).sum()
    };
    let ptheta = one_d(&|th| p(th), 0.0, PI);
    let wx_int = one_d(&w, -1.2, 0.8);
    let qmom = |q: &dyn Fn(f64) -> f64, c: f64| -> f64 {
        one_d(&|t| q(t) * (c * t).exp(), -2.2, 2.2)
    };

    let ank1 = ank_integral(&q1);
    let ank2 = ank_integral(&q2);

    // Solve ank1 / ank2 = qmom(q1, c) / qmom(q2, c) for c by bisection.
    let ratio_target = ank1 / ank2;
    let mut lo = 0.0;
    let mut hi = 2.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let r = qmom(&q1, mid) / qmom(&q2, mid);
        // the ratio is monotone in c for these window placements
        if (r - ratio_target) * (qmom(&q1, lo) / qmom(&q2, lo) - ratio_target) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    let k0 = ank1 / (ptheta * qmom(&q1, c) * wx_int);
    Ok((c, k0))
}

/// Residual of the geodesic-coordinate (Hopf) expression of the group
/// measure against the KAN expression, on a compact bump.
pub fn hopf_residual() -> Result<f64> {
    let bump = |g: &GroupElement| {
        let co = g.iwasawa();
        let mut th = co.theta;
        if th < 0.0 {
            th += PI;
        }
        smooth_bump((th - 0.8) / 0.5)
            * smooth_bump((co.t_a - 0.2) / 0.8)
            * smooth_bump((co.x_n - 0.1) / 0.7)
    };

    // KAN route.
    let nth = panel_nodes(0.3, 1.3, 12);
    let nt = panel_nodes(-0.6, 1.0, 12);
    let nx = panel_nodes(-0.6, 0.8, 12);
    let mut kan = 0.0;
    for &(th, wth) in &nth {
        let k = GroupElement::rotation(th);
        for &(t, wt) in &nt {
            let ka = k.compose(&GroupElement::diagonal_flow(t));
            for &(x, wx) in &nx {
                let g = ka.compose(&GroupElement::unipotent_upper(x));
                let v = bump(&g);
                if v != 0.0 {
                    kan += v * haar_kan_density(t) * wth * wt * wx;
                }
            }
        }
    }

    // Hopf route: (psi, psi', s) with density C / chord^2; periodic
    // trapezoid in the two angles, panels in the flow time.
    let mp = 720;
    let hpsi = TAU / mp as f64;
    let ns = panel_nodes(-2.2, 2.2, 14);
    let mut hopf = 0.0;
    for i in 0..mp {
        let psi = (i as f64 + 0.5) * hpsi;
        let b = BoundaryPoint::from_angle(psi);
        for j in 0..mp {
            let psi2 = (j as f64 + 0.5) * hpsi;
            let bp = BoundaryPoint::from_angle(psi2);
            if b.distance_to(&bp) < 0.2 {
                continue;
            }
            let g0 = match crate::lie::psi_inverse(&b, &bp) {
                Ok(g) => g,
                Err(_) => continue,
            };
            // prefilter: the K-angle along the orbit is constant
            let mut th = g0.iwasawa().theta;
            if th < 0.0 {
                th += PI;
            }
            if !(0.3..=1.3).contains(&th) {
                continue;
            }
            let chord2 = b.chord_to(&bp).powi(2);
            let mut line = 0.0;
            for &(s, ws) in &ns {
                let g = g0.geodesic_flow(s);
                let v = bump(&g);
                if v != 0.0 {
                    line += v * ws;
                }
            }
            hopf += line / chord2 * hpsi * hpsi;
        }
    }
    hopf *= hopf_density_constant();

    Ok((kan - hopf).abs() / kan.abs().max(1e-300))
}

/// Runs the full calibration pass.
pub fn calibrate() -> Result<CalibrationRecord> {
    let (kernel_exponent, kernel_exponent_spread) = measure_kernel_exponent()?;
    let (haar_exponent, haar_constant) = measure_haar_density()?;
    let mut factorization_residuals = Vec::new();
    for (c, w) in [
        (Complex64::new(0.0, 0.0), 0.8),
        (Complex64::new(0.3, 0.1), 0.6),
        (Complex64::new(-0.2, 0.25), 0.7),
    ] {
        factorization_residuals.push(factorization_residual(c, w)?);
    }
    let hopf_residual = hopf_residual()?;
    Ok(CalibrationRecord {
        kernel_exponent,
        kernel_exponent_spread,
        haar_exponent,
        haar_constant,
        factorization_residuals,
        hopf_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_exponent_is_two() {
        let (e, spread) = measure_kernel_exponent().unwrap();
        assert!((e - 2.0).abs() <= 1e-10, "exponent {e}");
        assert!(spread <= 1e-10, "spread {spread:.3e}");
    }

    #[test]
    fn leading_constant_value() {
        let c = leading_constant();
        assert!((c.norm() - 0.7978845608028654).abs() < 1e-15);
        assert!((c.arg() + FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn pair_weight_is_half_pi() {
        assert!((pair_weight_constant() - 0.5 * PI).abs() < 1e-14);
    }

    #[test]
    fn plane_measure_factorizes() {
        let r = factorization_residual(Complex64::new(0.1, -0.2), 0.7).unwrap();
        assert!(r <= 1e-8, "factorization residual {r:.3e}");
    }

    #[test]
    fn haar_density_matches_closed_form() {
        let (c, k0) = measure_haar_density().unwrap();
        assert!((c - 1.0).abs() <= 1e-6, "exponent {c}");
        let expected = haar_kan_density(0.0);
        assert!((k0 - expected).abs() <= 1e-6 * expected, "constant {k0} vs {expected}");
    }

    #[test]
    fn hopf_form_of_haar() {
        let r = hopf_residual().unwrap();
        assert!(r <= 1e-6, "hopf residual {r:.3e}");
    }

    #[test]
    fn step_profile_shape() {
        assert_eq!(smooth_step(-0.5), 0.0);
        assert_eq!(smooth_step(1.5), 1.0);
        let v = smooth_step(0.5);
        assert!((v - 0.5).abs() < 1e-15);
        assert!(smooth_step(0.2) < smooth_step(0.4));
    }
}
