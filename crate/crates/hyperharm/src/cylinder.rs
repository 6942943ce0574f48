//! The hyperbolic-cylinder quotient: a cyclic group generated by one
//! diagonal translation, with smooth fundamental-domain cutoffs, orbit
//! averaging of boundary data, and the cutoff-independence check for the
//! pairings.
//!
//! The generator acts on the half-plane by z -> e^L z; the fundamental
//! annulus is 1 <= |z| < e^L. Boundary data is averaged with the weight
//! |d gamma^n|^{1 - s/2}, the exponent for which the half-root-weighted
//! pairings of [`crate::pairings`] become orbit-invariant; the bracket
//! Poisson image of averaged data is then periodic up to the truncation
//! tail.

use crate::boundary::BoundaryFunction;
use crate::constants::smooth_step;
use crate::error::{Error, Result};
use crate::lie::{circular_distance, from_halfplane_point, BoundaryPoint, GroupElement};
use crate::transforms::{CompactGFunction, SupportBox};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Cyclic quotient model: generator translation length and orbit-sum
/// truncation.
#[derive(Debug, Clone, Copy)]
pub struct CylinderModel {
    /// Translation length of the generator.
    pub ell: f64,
    /// Orbit sums run over |n| <= truncation.
    pub truncation: i64,
}

impl CylinderModel {
    pub fn new(ell: f64, truncation: i64) -> Result<Self> {
        if !(ell > 0.0) {
            return Err(Error::Domain(format!("translation length {ell} must be positive")));
        }
        if truncation < 0 {
            return Err(Error::Domain("truncation must be non-negative".into()));
        }
        Ok(Self { ell, truncation })
    }

    /// n-th power of the generator, diag(e^{nL/2}, e^{-nL/2}) exactly.
    pub fn generator_power(&self, n: i64) -> GroupElement {
        GroupElement::diagonal_flow(self.ell * n as f64)
    }

    /// Boundary fixed points of the generator: the attracting and
    /// repelling endpoints of its axis.
    pub fn fixed_points(&self) -> (BoundaryPoint, BoundaryPoint) {
        (BoundaryPoint::from_angle(0.0), BoundaryPoint::from_angle(PI))
    }

    /// Logarithmic radial coordinate of a base point, shifted by L per
    /// deck transformation.
    pub fn log_radius(&self, g: &GroupElement) -> f64 {
        g.base_point_halfplane().norm().ln()
    }

    /// Hyperbolic distance of a base point from the generator axis.
    pub fn axis_distance(&self, g: &GroupElement) -> f64 {
        let z = g.base_point_halfplane();
        let s = (z.im / z.norm()).clamp(1e-300, 1.0);
        (1.0 / s).acosh()
    }
}

/// Smooth fundamental-domain cutoff chi with its construction data:
/// chi(g) = a(g) f(g) / sum_n f(gamma^n g), where a is an orbit-invariant
/// plateau in the axis distance and f a plateau in the log-radius window.
#[derive(Clone)]
pub struct FundamentalCutoff {
    model: CylinderModel,
    /// Start of the log-radius plateau (one period long).
    shift: f64,
    /// Rise width of the radial plateau.
    rise: f64,
    /// Axis-distance where the invariant plateau starts to fall.
    tau_plateau: f64,
    /// Axis-distance where the invariant plateau reaches zero.
    tau_max: f64,
    support: SupportBox,
}

impl std::fmt::Debug for FundamentalCutoff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FundamentalCutoff")
            .field("shift", &self.shift)
            .field("rise", &self.rise)
            .field("tau_plateau", &self.tau_plateau)
            .field("tau_max", &self.tau_max)
            .finish()
    }
}

impl FundamentalCutoff {
    fn radial_plateau(&self, s: f64) -> f64 {
        let lo = self.shift;
        let hi = self.shift + self.model.ell;
        smooth_step((s - lo + self.rise) / self.rise)
            * smooth_step((hi + self.rise - s) / self.rise)
    }

    fn invariant_plateau(&self, tau: f64) -> f64 {
        1.0 - smooth_step((tau - self.tau_plateau) / (self.tau_max - self.tau_plateau))
    }

    /// Orbit sum of the radial factor; finite because at most a few
    /// translates of the window overlap any point.
    fn orbit_sum(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for n in -self.model.truncation..=self.model.truncation {
            acc += self.radial_plateau(s + self.model.ell * n as f64);
        }
        acc
    }

    pub fn eval(&self, g: &GroupElement) -> f64 {
        if !self.support.contains(&g.iwasawa()) {
            return 0.0;
        }
        let s = self.model.log_radius(g);
        let f = self.radial_plateau(s);
        if f == 0.0 {
            return 0.0;
        }
        let a = self.invariant_plateau(self.model.axis_distance(g));
        if a == 0.0 {
            return 0.0;
        }
        a * f / self.orbit_sum(s)
    }

    pub fn support(&self) -> &SupportBox {
        &self.support
    }

    /// Partition-of-unity residual |sum_n chi(gamma^n g) - 1| at a point of
    /// the lifted target set.
    pub fn partition_residual(&self, g: &GroupElement) -> f64 {
        let mut acc = 0.0;
        for n in -self.model.truncation..=self.model.truncation {
            acc += self.eval(&self.model.generator_power(n).compose(g));
        }
        (acc - 1.0).abs()
    }
}

/// Builds a fundamental-domain cutoff from the radial window shift, the
/// rise width, and the axis-distance plateau. The orbit sum must stabilize
/// within the model truncation, otherwise the construction reports
/// truncation leakage.
pub fn make_cutoff(
    model: &CylinderModel,
    shift: f64,
    rise: f64,
    tau_plateau: f64,
    tau_max: f64,
) -> Result<FundamentalCutoff> {
    if !(rise > 0.0 && rise <= 0.5 * model.ell) {
        return Err(Error::Domain(format!(
            "rise width {rise} must lie in (0, ell/2]"
        )));
    }
    if !(0.0 < tau_plateau && tau_plateau < tau_max) {
        return Err(Error::Domain("need 0 < tau_plateau < tau_max".into()));
    }
    // The radial window spans one period plus the rises; the orbit sum
    // needs translates covering it.
    let needed = (2.0 + 2.0 * rise / model.ell).ceil() as i64;
    if model.truncation < needed {
        return Err(Error::TruncationTooSmall {
            residual: f64::INFINITY,
            tolerance: 1e-12,
            n: model.truncation,
        });
    }

    // Support box: sample the base region (log-radius window x axis
    // distance) times the full fiber.
    let n = 21;
    let mut samples = Vec::new();
    let phi_min = (1.0 / tau_max.cosh()).asin();
    for i in 0..n {
        let s = (shift - rise) + (model.ell + 2.0 * rise) * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let phi = phi_min + (PI - 2.0 * phi_min) * j as f64 / (n - 1) as f64;
            let z = Complex64::from_polar(s.exp(), phi);
            let gz = from_halfplane_point(z)?;
            for l in 0..n {
                let th = PI * l as f64 / n as f64;
                samples.push(gz.compose(&GroupElement::rotation(th)).iwasawa());
            }
        }
    }
    let mut support = SupportBox::from_samples(samples, 0.05)?;
    // the fiber makes the K-window a full period
    support.theta_center = 0.0;
    support.theta_halfwidth = PI / 2.0;

    let cutoff = FundamentalCutoff {
        model: *model,
        shift,
        rise,
        tau_plateau,
        tau_max,
        support,
    };

    // leakage audit: growing the truncation must not change the orbit sum
    let probe = [shift + 0.1, shift + 0.5 * model.ell, shift + model.ell - 0.1];
    for &s in &probe {
        let full = cutoff.orbit_sum(s);
        let mut wider = 0.0;
        for n in -(model.truncation + 2)..=(model.truncation + 2) {
            wider += cutoff.radial_plateau(s + model.ell * n as f64);
        }
        let leak = (full - wider).abs();
        if leak > 1e-12 {
            return Err(Error::TruncationTooSmall {
                residual: leak,
                tolerance: 1e-12,
                n: model.truncation,
            });
        }
    }
    Ok(cutoff)
}

/// The quotient symbol chi * (orbit sum of u): multiplies the cutoff by
/// the deck-transformation average of a compactly supported symbol.
pub fn quotient_symbol(
    u: &CompactGFunction,
    chi: &FundamentalCutoff,
    model: &CylinderModel,
) -> CompactGFunction {
    let u = u.clone();
    let chi = chi.clone();
    let model = *model;
    let support = *chi.support();
    CompactGFunction::new(
        move |g: &GroupElement, _co: &crate::lie::IwasawaCoords| {
            let c = chi.eval(g);
            if c == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for n in -model.truncation..=model.truncation {
                acc += u.eval(&model.generator_power(n).compose(g));
            }
            c * acc
        },
        support,
    )
}

/// Orbit-averaged boundary data together with its truncation tail bound.
#[derive(Debug, Clone)]
pub struct AveragedData {
    pub data: BoundaryFunction,
    /// Geometric bound on the dropped |n| > truncation terms, sup over the
    /// circle.
    pub tail_bound: f64,
}

/// Averages boundary data over the deck group with the derivative weight
/// |d gamma^n|^{1 - s/2}. The data must vanish near both boundary fixed
/// points of the generator; the weighted sum then converges geometrically
/// and the truncation tail is reported.
pub fn gamma_average(
    data: &BoundaryFunction,
    s: Complex64,
    model: &CylinderModel,
    fixed_point_clearance: f64,
) -> Result<AveragedData> {
    // support condition at the fixed points
    let (fp_att, fp_rep) = model.fixed_points();
    let mut mass: f64 = 0.0;
    let mut sup: f64 = 0.0;
    for k in 0..720 {
        let psi = 2.0 * PI * k as f64 / 720.0;
        let v = data.eval(psi).norm();
        sup = sup.max(v);
        let near = circular_distance(psi, fp_att.angle()) < fixed_point_clearance
            || circular_distance(psi, fp_rep.angle()) < fixed_point_clearance;
        if near {
            mass = mass.max(v);
        }
    }
    if mass > 1e-9 * sup.max(1e-300) {
        return Err(Error::FixedPointSupport { mass });
    }

    let weight_exp = Complex64::new(1.0, 0.0) - 0.5 * s;
    let model_c = *model;
    let inner = data.clone();
    let averaged = BoundaryFunction::from_closure(move |psi: f64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for n in -model_c.truncation..=model_c.truncation {
            let gamma_n = model_c.generator_power(n);
            let pulled = inner.eval(gamma_n.boundary_action(psi));
            if pulled.norm_sqr() == 0.0 {
                continue;
            }
            let jac = gamma_n.boundary_jacobian(psi);
            acc += (weight_exp * jac.ln()).exp() * pulled;
        }
        acc
    });

    // L1 tail: the dropped term of index n has mass
    // int |d gamma^{-n}(w)|^{Re s / 2} |T(w)| dw over the original window,
    // which decays like e^{-|n| ell Re(s)/2}; sum the geometric series.
    let l1_term = |n: i64| -> f64 {
        let gaminv = model.generator_power(-n);
        let mut acc = 0.0;
        let m = 256;
        for k in 0..m {
            let w = 2.0 * PI * k as f64 / m as f64;
            let v = data.eval(w).norm();
            if v > 0.0 {
                acc += gaminv.boundary_jacobian(w).powf(0.5 * s.re) * v;
            }
        }
        acc * 2.0 * PI / m as f64
    };
    let decay = (-model.ell * 0.5 * s.re).exp();
    let np1 = model.truncation + 1;
    let tail_bound = if s.re > 0.0 && decay < 1.0 {
        (l1_term(np1) + l1_term(-np1)) / (1.0 - decay)
    } else {
        f64::INFINITY
    };

    Ok(AveragedData { data: averaged, tail_bound })
}

/// Boundary transform of orbit-averaged window data, computed as the deck
/// sum of smooth window integrals. Evaluating the averaged function on a
/// plain circle grid fails once the translate windows squeeze against the
/// fixed points; pulling each term back to the original window avoids
/// that entirely:
///   phi(z) = sum_n int_W exp(s <z, gamma^{-n} w>) |d gamma^{-n}(w)|^{s/2}
///            T(w) dw.
pub fn averaged_bracket_transform(
    data: &BoundaryFunction,
    s: Complex64,
    model: &CylinderModel,
    z: Complex64,
    panels: usize,
) -> Result<Complex64> {
    let (center, halfwidth) = data
        .support()
        .ok_or_else(|| Error::EmptySupport("averaged transform needs window data".into()))?;
    let nodes = crate::quad::panel_nodes(center - halfwidth, center + halfwidth, panels);
    let half_s = 0.5 * s;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in -model.truncation..=model.truncation {
        let gaminv = model.generator_power(-n);
        for &(w, wt) in &nodes {
            let v = data.eval(w);
            if v.norm_sqr() == 0.0 {
                continue;
            }
            let b = BoundaryPoint::from_angle(gaminv.boundary_action(w));
            let br = crate::lie::horocycle_bracket_disk(z, &b)?;
            let jac = gaminv.boundary_jacobian(w);
            acc += (s * br + half_s * jac.ln()).exp() * v * wt;
        }
    }
    Ok(acc)
}

/// Residual of the deck-periodicity of the bracket-kernel boundary
/// transform of averaged window data, sampled at disk points: compares
/// the transform at z and at gamma.z, both by the deck-sum route.
pub fn invariance_residual(
    window_data: &BoundaryFunction,
    s: Complex64,
    model: &CylinderModel,
    samples: &[Complex64],
    panels: usize,
) -> Result<f64> {
    let gamma = model.generator_power(1);
    let mut worst: f64 = 0.0;
    for &z in samples {
        let phi = averaged_bracket_transform(window_data, s, model, z, panels)?;
        let gz = gamma.compose(&crate::lie::from_disk_point(z)?).base_point_disk();
        let phi_g = averaged_bracket_transform(window_data, s, model, gz, panels)?;
        worst = worst.max((phi - phi_g).norm() / phi.norm().max(1e-300));
    }
    Ok(worst)
}

/// Boundary transform with the bracket kernel at the pairing parameter:
/// the integral of exp(s <z, b>) against the data. This is the
/// eigenfunction factor entering the phase-space pairings.
pub fn bracket_transform(
    data: &BoundaryFunction,
    s: Complex64,
    z: Complex64,
    quad: &crate::boundary::QuadratureOptions,
) -> Result<Complex64> {
    crate::boundary::boundary_quadrature_fn(
        |psi| {
            let b = BoundaryPoint::from_angle(psi);
            let br = crate::lie::horocycle_bracket_disk(z, &b).expect("interior point");
            (s * br).exp() * data.eval(psi)
        },
        None,
        quad,
    )
}

/// A compactly supported symbol with its base bump centered on the
/// generator axis at the given log-radius position, for quotient
/// experiments. Placing it across a cutoff transition zone makes the two
/// cutoffs carve it differently.
pub fn fundamental_domain_symbol(
    model: &CylinderModel,
    log_radius: f64,
    direction_center: f64,
    direction_halfwidth: f64,
    radius: f64,
) -> Result<crate::pairings::PhaseSpaceTest> {
    let _ = model;
    let z = Complex64::new(0.0, log_radius.exp());
    let center = crate::lie::cayley(z)?;
    crate::pairings::PhaseSpaceTest::new(center, radius, direction_center, direction_halfwidth)
}

/// Quotient pairing by deck decomposition.
///
/// The orbit average of window data develops translate windows squeezed
/// exponentially against the generator's fixed points, which a plain
/// circle grid cannot resolve. Instead, each (n, m) translate term is
/// pulled back to the original windows, where it is smooth: the term reads
///   int T(w) conj(T'(w')) |dg^-n(w)|^{s0/2} |dg^-m(w')|^{conj(s0')/2}
///       K(g^-n w, g^-m w') dw dw',
/// summed over |n|, |m| <= truncation.
pub fn quotient_pair_integral<K>(
    t: &BoundaryFunction,
    t_prime: &BoundaryFunction,
    sp: &crate::boundary::SpectralPair,
    model: &CylinderModel,
    n_nodes: usize,
    kernel: K,
) -> Result<crate::transforms::PairIntegral>
where
    K: Fn(&BoundaryPoint, &BoundaryPoint) -> Result<Complex64> + Sync,
{
    use crate::transforms::{pair_integral, PairWindow};
    let wb = PairWindow::for_data(t);
    let wbp = PairWindow::for_data(t_prime);
    let half_s0 = 0.5 * sp.s0();
    let half_s0p_conj = 0.5 * sp.s0_prime().conj();
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0_f64;
    let mut nodes = 0usize;
    let mut edge_ring = 0.0_f64;
    for n in -model.truncation..=model.truncation {
        let gn = model.generator_power(-n);
        for m in -model.truncation..=model.truncation {
            let gm = model.generator_power(-m);
            let term = pair_integral(t, t_prime, &wb, &wbp, n_nodes, |b, bp| {
                let tb = BoundaryPoint::from_angle(gn.boundary_action(b.angle()));
                let tbp = BoundaryPoint::from_angle(gm.boundary_action(bp.angle()));
                let k = kernel(&tb, &tbp)?;
                if k.norm_sqr() == 0.0 {
                    return Ok(k);
                }
                let jn = gn.boundary_jacobian(b.angle());
                let jm = gm.boundary_jacobian(bp.angle());
                Ok((half_s0 * jn.ln() + half_s0p_conj * jm.ln()).exp() * k)
            })?;
            value += term.value;
            error += term.error;
            nodes += term.nodes;
            if n.abs() == model.truncation || m.abs() == model.truncation {
                edge_ring += term.value.norm();
            }
        }
    }
    // truncation tail estimated from the outermost ring of computed terms,
    // extrapolated geometrically at the weight decay rate
    let ratio = (-model.ell * 0.5 * sp.q.min(sp.q_prime)).exp();
    let tail = if ratio < 1.0 {
        edge_ring * ratio / (1.0 - ratio)
    } else {
        f64::INFINITY
    };
    Ok(crate::transforms::PairIntegral {
        value,
        coarse: value,
        error: error + tail,
        nodes,
    })
}

/// Gap between the pairings computed with two independent fundamental
/// cutoffs, together with the summed quadrature estimates; the pairing is
/// the quotient orbit transform of the cutoff symbol against (already
/// averaging-consistent) window data.
pub struct CutoffIndependence {
    pub gap: f64,
    pub estimate: f64,
    pub values: (Complex64, Complex64),
}

pub fn cutoff_independence<K1, K2>(
    t: &BoundaryFunction,
    t_prime: &BoundaryFunction,
    sp: &crate::boundary::SpectralPair,
    model: &CylinderModel,
    n_nodes: usize,
    kernel_one: K1,
    kernel_two: K2,
) -> Result<CutoffIndependence>
where
    K1: Fn(&BoundaryPoint, &BoundaryPoint) -> Result<Complex64> + Sync,
    K2: Fn(&BoundaryPoint, &BoundaryPoint) -> Result<Complex64> + Sync,
{
    let one = quotient_pair_integral(t, t_prime, sp, model, n_nodes, kernel_one)?;
    let two = quotient_pair_integral(t, t_prime, sp, model, n_nodes, kernel_two)?;
    Ok(CutoffIndependence {
        gap: (one.value - two.value).norm(),
        estimate: one.error + two.error,
        values: (one.value, two.value),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> CylinderModel {
        CylinderModel::new(1.5, 12).unwrap()
    }

    #[test]
    fn cutoff_independence_and_negative_control() {
        use crate::boundary::SpectralPair;
        use crate::transforms::{pair_integral, weighted_radon, PairWindow, TransformOptions};

        let m = CylinderModel::new(2.4, 4).unwrap();
        let sp = SpectralPair::new(0.5, 0.5, 6.0).unwrap();
        let opts = TransformOptions::default();
        // the symbol straddles the rise zone of the second cutoff
        let u = fundamental_domain_symbol(&m, 0.55, 2.0, 0.3, 0.5).unwrap();
        let chi1 = make_cutoff(&m, 0.0, 0.7, 1.2, 1.9).unwrap();
        let chi2 = make_cutoff(&m, 0.8, 0.5, 1.3, 2.0).unwrap();
        let sym1 = quotient_symbol(u.as_compact(), &chi1, &m);
        let sym2 = quotient_symbol(u.as_compact(), &chi2, &m);
        let t = BoundaryFunction::window_bump(2.0, 0.55, Complex64::new(1.0, 0.2));
        let tp = BoundaryFunction::window_bump(2.0 + PI, 0.8, Complex64::new(0.9, -0.3));

        let out = cutoff_independence(
            &t,
            &tp,
            &sp,
            &m,
            28,
            |b, bp| weighted_radon(&sym1, &sp, (b, bp), &opts).map(|(v, _)| v),
            |b, bp| weighted_radon(&sym2, &sp, (b, bp), &opts).map(|(v, _)| v),
        )
        .unwrap();
        let scale = out.values.0.norm().max(out.values.1.norm());
        assert!(scale > 0.0, "pairings must be nonzero");
        assert!(
            out.gap <= out.estimate,
            "invariant-data gap {:.3e} above estimate {:.3e} (scale {scale:.3e})",
            out.gap,
            out.estimate
        );

        // negative control: the plain (un-averaged) pairing of the two
        // cutoff symbols differs by far more than the estimates
        let wb = PairWindow::for_data(&t);
        let wbp = PairWindow::for_data(&tp);
        let p1 = pair_integral(&t, &tp, &wb, &wbp, 28, |b, bp| {
            weighted_radon(&sym1, &sp, (b, bp), &opts).map(|(v, _)| v)
        })
        .unwrap();
        let p2 = pair_integral(&t, &tp, &wb, &wbp, 28, |b, bp| {
            weighted_radon(&sym2, &sp, (b, bp), &opts).map(|(v, _)| v)
        })
        .unwrap();
        let control_gap = (p1.value - p2.value).norm();
        assert!(
            control_gap >= 10.0 * (p1.error + p2.error).max(1e-300),
            "negative control gap {control_gap:.3e} vs estimates {:.3e}",
            p1.error + p2.error
        );
        assert!(
            control_gap >= 10.0 * out.gap.max(1e-300),
            "control gap {control_gap:.3e} should dwarf the invariant gap {:.3e}",
            out.gap
        );
    }

    #[test]
    fn generator_powers_are_exact() {
        let m = model();
        for n in [-3_i64, -1, 0, 1, 2, 5] {
            let g = m.generator_power(n);
            let (a, b, c, d) = g.entries();
            assert_eq!(b, 0.0);
            assert_eq!(c, 0.0);
            assert_eq!(a, (0.5 * m.ell * n as f64).exp());
            assert_eq!(d, (-0.5 * m.ell * n as f64).exp());
        }
    }

    #[test]
    fn cutoff_partition_of_unity() {
        let m = model();
        let chi = make_cutoff(&m, 0.0, 0.6, 1.0, 1.6).unwrap();
        // sample the lifted target set: axis distance below the plateau
        let mut worst: f64 = 0.0;
        for i in 0..10 {
            let s = -2.0 + 4.5 * i as f64 / 9.0;
            for j in 0..6 {
                // place the point at axis distance tau on one side
                let tau = 0.9 * j as f64 / 5.0;
                let phi = (1.0 / tau.cosh()).asin().max(0.05);
                let z = Complex64::from_polar(s.exp(), phi);
                let g = from_halfplane_point(z).unwrap();
                for l in 0..5 {
                    let v = g.compose(&GroupElement::rotation(0.6 * l as f64));
                    worst = worst.max(chi.partition_residual(&v));
                }
            }
        }
        assert!(worst <= 1e-10, "partition residual {worst:.3e}");
    }

    #[test]
    fn cutoff_nonnegative_and_box_gated() {
        let m = model();
        let chi = make_cutoff(&m, 0.0, 0.6, 1.0, 1.6).unwrap();
        for i in 0..200 {
            let s = -3.0 + 6.0 * i as f64 / 199.0;
            let z = Complex64::from_polar(s.exp(), 0.9);
            let g = from_halfplane_point(z).unwrap();
            assert!(chi.eval(&g) >= 0.0);
        }
        // far outside the radial window
        let far = from_halfplane_point(Complex64::new(0.0, (8.0f64).exp())).unwrap();
        assert_eq!(chi.eval(&far), 0.0);
    }

    #[test]
    fn cutoff_rejects_small_truncation() {
        let m = CylinderModel::new(1.5, 1).unwrap();
        let r = make_cutoff(&m, 0.0, 0.6, 1.0, 1.6);
        assert!(matches!(r, Err(Error::TruncationTooSmall { .. })));
    }

    #[test]
    fn average_identity_at_zero_truncation() {
        let m = CylinderModel::new(1.5, 0).unwrap();
        let t = BoundaryFunction::window_bump(2.0, 0.5, Complex64::new(1.0, -0.3));
        let avg = gamma_average(&t, Complex64::new(0.3, 5.0), &m, 0.3).unwrap();
        for k in 0..40 {
            let psi = 2.0 * PI * k as f64 / 40.0;
            assert!((avg.data.eval(psi) - t.eval(psi)).norm() <= 1e-13);
        }
    }

    #[test]
    fn average_rejects_fixed_point_support() {
        let m = model();
        let bad = BoundaryFunction::window_bump(0.1, 0.5, Complex64::new(1.0, 0.0));
        let r = gamma_average(&bad, Complex64::new(0.3, 5.0), &m, 0.3);
        assert!(matches!(r, Err(Error::FixedPointSupport { .. })));
    }

    #[test]
    fn averaged_transform_is_periodic() {
        let m = CylinderModel::new(2.4, 8).unwrap();
        let s = Complex64::new(0.5, 5.0);
        let t = BoundaryFunction::window_bump(2.0, 0.6, Complex64::new(1.0, 0.2));
        let avg = gamma_average(&t, s, &m, 0.4).unwrap();
        let samples = [
            Complex64::new(0.2, 0.45),
            Complex64::new(-0.1, 0.55),
            Complex64::new(0.05, 0.35),
        ];
        let res = invariance_residual(&t, s, &m, &samples, 24).unwrap();
        // the defect is the dropped edge terms; compare against the
        // reported L1 tail relative to the transform size
        let scale = averaged_bracket_transform(&t, s, &m, samples[0], 24)
            .unwrap()
            .norm();
        assert!(
            res <= (10.0 * avg.tail_bound / scale).max(1e-8),
            "periodicity residual {res:.3e} vs tail {:.3e} (scale {scale:.3e})",
            avg.tail_bound
        );
    }

    #[test]
    fn doubling_truncation_shrinks_residual() {
        let s = Complex64::new(0.5, 4.0);
        let t = BoundaryFunction::window_bump(2.0, 0.6, Complex64::new(1.0, 0.0));
        let samples = [Complex64::new(0.15, 0.5)];
        let mut prev = f64::INFINITY;
        // decay rate per truncation step is e^{-ell Re(s)/2} = e^{-0.65}
        for nt in [2_i64, 4, 8] {
            let m = CylinderModel::new(2.6, nt).unwrap();
            let res = invariance_residual(&t, s, &m, &samples, 24).unwrap();
            assert!(
                res <= 0.55 * prev || res < 1e-10,
                "residual {res:.3e} after {prev:.3e} at truncation {nt}"
            );
            prev = res;
        }
    }
}
