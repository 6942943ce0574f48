//! The integral transforms acting on compactly supported phase-space
//! functions: the unipotent-direction intertwining operator, the weighted
//! transform along geodesic orbits, their composition into the pair kernel,
//! and the endpoint cutoff that compactifies it.
//!
//! Exponent convention: all weights here use the half-root functional
//! rho(A(g)) = log sqrt(a^2 + c^2) of the Iwasawa A-part, matching the
//! horocycle bracket of [`crate::lie`]. The closed-form unipotent weight is
//! (1 + x^2)^{-conj(s0')/2}.

use crate::boundary::{BoundaryFunction, SpectralPair};
use crate::constants::{a_density, area_density, leading_constant, n_density, smooth_step};
use crate::error::{Error, Result};
use crate::lie::{
    horocycle_bracket_disk, psi_inverse, unit_tangent_toward, BoundaryPoint, GroupElement,
    IwasawaCoords,
};
use crate::quad::quad_adaptive;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

/// Axis-aligned box in Iwasawa coordinates (theta, t, x); theta is
/// circular with period pi.
#[derive(Debug, Clone, Copy)]
pub struct SupportBox {
    pub theta_center: f64,
    pub theta_halfwidth: f64,
    pub t_center: f64,
    pub t_halfwidth: f64,
    pub x_center: f64,
    pub x_halfwidth: f64,
}

pub(crate) fn theta_distance(a: f64, b: f64) -> f64 {
    let mut d = (a - b) % PI;
    if d < 0.0 {
        d += PI;
    }
    d.min(PI - d)
}

impl SupportBox {
    pub fn contains(&self, co: &IwasawaCoords) -> bool {
        theta_distance(co.theta, self.theta_center) <= self.theta_halfwidth
            && (co.t_a - self.t_center).abs() <= self.t_halfwidth
            && (co.x_n - self.x_center).abs() <= self.x_halfwidth
    }

    /// Smallest box around a sample cloud, inflated by the given margin.
    pub fn from_samples<I>(samples: I, margin: f64) -> Result<Self>
    where
        I: IntoIterator<Item = IwasawaCoords>,
    {
        let mut it = samples.into_iter();
        let first = it
            .next()
            .ok_or_else(|| Error::EmptySupport("no support samples".into()))?;
        let theta_ref = first.theta;
        let (mut th_lo, mut th_hi) = (0.0_f64, 0.0_f64);
        let (mut t_lo, mut t_hi) = (first.t_a, first.t_a);
        let (mut x_lo, mut x_hi) = (first.x_n, first.x_n);
        for co in it {
            // unwrap theta around the reference to keep the window connected
            let mut d = (co.theta - theta_ref) % PI;
            if d > PI / 2.0 {
                d -= PI;
            }
            if d < -PI / 2.0 {
                d += PI;
            }
            th_lo = th_lo.min(d);
            th_hi = th_hi.max(d);
            t_lo = t_lo.min(co.t_a);
            t_hi = t_hi.max(co.t_a);
            x_lo = x_lo.min(co.x_n);
            x_hi = x_hi.max(co.x_n);
        }
        Ok(Self {
            theta_center: theta_ref + 0.5 * (th_lo + th_hi),
            theta_halfwidth: 0.5 * (th_hi - th_lo) + margin,
            t_center: 0.5 * (t_lo + t_hi),
            t_halfwidth: 0.5 * (t_hi - t_lo) + margin,
            x_center: 0.5 * (x_lo + x_hi),
            x_halfwidth: 0.5 * (x_hi - x_lo) + margin,
        })
    }

    /// Euclidean bounding box of the disk-model base points of the box.
    pub fn disk_bounds(&self, samples_per_axis: usize) -> (f64, f64, f64, f64) {
        let n = samples_per_axis.max(4);
        let (mut xlo, mut xhi) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut ylo, mut yhi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let th = self.theta_center
                + self.theta_halfwidth * (2.0 * i as f64 / (n - 1) as f64 - 1.0);
            for j in 0..n {
                let t =
                    self.t_center + self.t_halfwidth * (2.0 * j as f64 / (n - 1) as f64 - 1.0);
                for l in 0..n {
                    let x = self.x_center
                        + self.x_halfwidth * (2.0 * l as f64 / (n - 1) as f64 - 1.0);
                    let g = IwasawaCoords { theta: th, t_a: t, x_n: x }.reconstruct();
                    let z = g.base_point_disk();
                    xlo = xlo.min(z.re);
                    xhi = xhi.max(z.re);
                    ylo = ylo.min(z.im);
                    yhi = yhi.max(z.im);
                }
            }
        }
        // pad must exceed the sampling gap of the image boundary, so that
        // the box provably contains the support and integrands vanish
        // identically at its edges
        let pad = 0.04;
        (
            (xlo - pad).max(-0.9999),
            (xhi + pad).min(0.9999),
            (ylo - pad).max(-0.9999),
            (yhi + pad).min(0.9999),
        )
    }
}

type GFn = Arc<dyn Fn(&GroupElement, &IwasawaCoords) -> Complex64 + Send + Sync>;

/// Smooth compactly supported function on the group, with an explicit
/// Iwasawa-box support descriptor. Evaluations outside the box are exactly
/// zero.
#[derive(Clone)]
pub struct CompactGFunction {
    f: GFn,
    support: SupportBox,
}

impl std::fmt::Debug for CompactGFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CompactGFunction")
            .field("support", &self.support)
            .finish()
    }
}

impl CompactGFunction {
    pub fn new<F>(f: F, support: SupportBox) -> Self
    where
        F: Fn(&GroupElement, &IwasawaCoords) -> Complex64 + Send + Sync + 'static,
    {
        Self { f: Arc::new(f), support }
    }

    pub fn support(&self) -> &SupportBox {
        &self.support
    }

    pub fn eval(&self, g: &GroupElement) -> Complex64 {
        let co = g.iwasawa();
        if self.support.contains(&co) {
            (self.f)(g, &co)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Pointwise product with a scalar field, keeping this support box.
    pub fn weighted<W>(&self, w: W) -> CompactGFunction
    where
        W: Fn(&GroupElement) -> Complex64 + Send + Sync + 'static,
    {
        let inner = self.clone();
        CompactGFunction::new(move |g, co| (inner.f)(g, co) * w(g), self.support)
    }
}

/// Quadrature control for the transform integrals.
#[derive(Debug, Clone, Copy)]
pub struct TransformOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Forced initial refinement of adaptive integrals.
    pub min_panels: usize,
    /// Initial refinement of the direct plane quadrature, whose slice
    /// supports can be thin relative to the bounding box.
    pub direct_min_panels: usize,
    pub max_panels: usize,
    /// Padding of the geodesic-orbit integration interval.
    pub orbit_pad: f64,
}

impl Default for TransformOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-13,
            min_panels: 8,
            direct_min_panels: 40,
            max_panels: 6000,
            orbit_pad: 2.0,
        }
    }
}

/// Unipotent-direction averaging operator with spectral weight
/// (1 + x^2)^{-conj(s0')/2}: integrates f(g n(x)) over the upper
/// unipotent orbit. Returns the value and an error estimate.
///
/// The orbit translates only the Iwasawa x-coordinate, so the support
/// interval is exact and the truncation tail vanishes identically.
pub fn intertwine(
    f: &CompactGFunction,
    s0_prime: Complex64,
    g: &GroupElement,
    opts: &TransformOptions,
) -> Result<(Complex64, f64)> {
    let co = g.iwasawa();
    let boxy = f.support();
    if theta_distance(co.theta, boxy.theta_center) > boxy.theta_halfwidth
        || (co.t_a - boxy.t_center).abs() > boxy.t_halfwidth
    {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let lo = boxy.x_center - boxy.x_halfwidth - co.x_n;
    let hi = boxy.x_center + boxy.x_halfwidth - co.x_n;
    let weight_exp = -0.5 * s0_prime.conj();
    let mut integrand = |x: f64| -> Complex64 {
        let w = (weight_exp * (1.0 + x * x).ln()).exp();
        w * f.eval(&g.horocycle_flow(x, true))
    };
    let (v, e) = quad_adaptive(&mut integrand, lo, hi, opts.rel_tol, opts.abs_tol, opts.min_panels, opts.max_panels)?;
    Ok((v * n_density(), e * n_density()))
}

/// Leading term of the unipotent average for large r:
/// sqrt(2/pi) e^{-i pi/4} r^{-1/2} f(g).
pub fn intertwine_leading(f: &CompactGFunction, r: f64, g: &GroupElement) -> Complex64 {
    leading_constant() * r.powf(-0.5) * f.eval(g)
}

/// Exponential weight of the geodesic-orbit transform at h = g a:
/// exp(s0 rho(A(h)) + conj(s0') rho(A(h w0))), from the matrix columns.
fn orbit_weight(h: &GroupElement, s0: Complex64, s0_prime_conj: Complex64) -> Complex64 {
    let (a, b, c, d) = h.entries();
    let rho_plus = 0.5 * (a * a + c * c).ln();
    let rho_minus = 0.5 * (b * b + d * d).ln();
    (s0 * rho_plus + s0_prime_conj * rho_minus).exp()
}

/// Weighted transform along the geodesic orbit determined by an endpoint
/// pair. Returns exact zero on (near-)diagonal pairs.
pub fn weighted_radon(
    f: &CompactGFunction,
    sp: &SpectralPair,
    pair: (&BoundaryPoint, &BoundaryPoint),
    opts: &TransformOptions,
) -> Result<(Complex64, f64)> {
    let (b, bp) = pair;
    if b.distance_to(bp) < crate::lie::DEGENERATE_PAIR_EPSILON {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let g0 = psi_inverse(b, bp)?;
    weighted_radon_along(f, sp, &g0, opts)
}

/// Same transform with an explicit orbit representative; the value is
/// invariant under the representative choice.
pub fn weighted_radon_along(
    f: &CompactGFunction,
    sp: &SpectralPair,
    g0: &GroupElement,
    opts: &TransformOptions,
) -> Result<(Complex64, f64)> {
    let boxy = f.support();
    let co0 = g0.iwasawa();
    if theta_distance(co0.theta, boxy.theta_center) > boxy.theta_halfwidth {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let lo = boxy.t_center - boxy.t_halfwidth - co0.t_a - opts.orbit_pad;
    let hi = boxy.t_center + boxy.t_halfwidth - co0.t_a + opts.orbit_pad;
    let s0 = sp.s0();
    let s0p_conj = sp.s0_prime().conj();
    let mut integrand = |t: f64| -> Complex64 {
        let h = g0.geodesic_flow(t);
        let v = f.eval(&h);
        if v == Complex64::new(0.0, 0.0) {
            return v;
        }
        orbit_weight(&h, s0, s0p_conj) * v
    };
    let (v, e) = quad_adaptive(&mut integrand, lo, hi, opts.rel_tol, opts.abs_tol, opts.min_panels, opts.max_panels)?;
    Ok((v * a_density(), e * a_density()))
}

/// Smooth cutoff on endpoint pairs: 1 on every pair realized by a geodesic
/// meeting a given compact set, 0 near the diagonal.
#[derive(Debug, Clone)]
pub struct EndpointCutoff {
    /// Pairs closer than half of this are mapped to 0; pairs farther than
    /// this are mapped to 1.
    pub delta_min: f64,
}

impl EndpointCutoff {
    pub fn eval(&self, b: &BoundaryPoint, b_prime: &BoundaryPoint) -> f64 {
        let d = b.distance_to(b_prime);
        smooth_step((d - 0.5 * self.delta_min) / (0.5 * self.delta_min))
    }

    /// Orbit-invariant lift to the group.
    pub fn lift(&self, g: &GroupElement) -> f64 {
        let (b, bp) = g.boundary_maps();
        self.eval(&b, &bp)
    }
}

/// Builds the endpoint cutoff for a support box by sampling endpoint pairs
/// of geodesics through the box and halving the minimal separation seen.
pub fn make_endpoint_cutoff(
    support: &SupportBox,
    samples_per_axis: usize,
) -> Result<EndpointCutoff> {
    let n = samples_per_axis.max(4);
    let mut min_sep = f64::INFINITY;
    for i in 0..n {
        let th = support.theta_center
            + support.theta_halfwidth * (2.0 * i as f64 / (n - 1) as f64 - 1.0);
        for j in 0..n {
            let t = support.t_center
                + support.t_halfwidth * (2.0 * j as f64 / (n - 1) as f64 - 1.0);
            for l in 0..n {
                let x = support.x_center
                    + support.x_halfwidth * (2.0 * l as f64 / (n - 1) as f64 - 1.0);
                let g = IwasawaCoords { theta: th, t_a: t, x_n: x }.reconstruct();
                // every direction in the fiber over this base point
                for m in 0..n {
                    let k = GroupElement::rotation(PI * m as f64 / n as f64);
                    let (b, bp) = g.compose(&k).boundary_maps();
                    min_sep = min_sep.min(b.distance_to(&bp));
                }
            }
        }
    }
    if !min_sep.is_finite() || min_sep == 0.0 {
        return Err(Error::EmptySupport("endpoint sampling produced no pairs".into()));
    }
    Ok(EndpointCutoff { delta_min: 0.5 * min_sep })
}

/// Pair kernel by composition: endpoint cutoff times the geodesic-orbit
/// transform of the unipotent average.
pub fn j_kernel_factorized(
    u: &CompactGFunction,
    sp: &SpectralPair,
    pair: (&BoundaryPoint, &BoundaryPoint),
    beta: &EndpointCutoff,
    opts: &TransformOptions,
) -> Result<(Complex64, f64)> {
    let (b, bp) = pair;
    let cut = beta.eval(b, bp);
    if cut == 0.0 || b.distance_to(bp) < crate::lie::DEGENERATE_PAIR_EPSILON {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let g0 = psi_inverse(b, bp)?;
    let co0 = g0.iwasawa();
    let boxy = u.support();
    if theta_distance(co0.theta, boxy.theta_center) > boxy.theta_halfwidth {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let lo = boxy.t_center - boxy.t_halfwidth - co0.t_a - opts.orbit_pad;
    let hi = boxy.t_center + boxy.t_halfwidth - co0.t_a + opts.orbit_pad;
    let s0 = sp.s0();
    let s0p = sp.s0_prime();
    let s0p_conj = s0p.conj();
    let inner_opts = *opts;
    let mut inner_err_max: f64 = 0.0;
    let mut failed = false;
    let mut integrand = |t: f64| -> Complex64 {
        let h = g0.geodesic_flow(t);
        match intertwine(u, s0p, &h, &inner_opts) {
            Ok((inner, ie)) => {
                inner_err_max = inner_err_max.max(ie);
                if inner == Complex64::new(0.0, 0.0) {
                    inner
                } else {
                    orbit_weight(&h, s0, s0p_conj) * inner
                }
            }
            Err(_) => {
                failed = true;
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let (v, e) = quad_adaptive(&mut integrand, lo, hi, opts.rel_tol, opts.abs_tol, opts.min_panels, opts.max_panels)?;
    if failed {
        return Err(Error::NonConvergence {
            partial_re: v.re,
            partial_im: v.im,
            estimate: f64::NAN,
            evaluations: 0,
        });
    }
    let scale = a_density() * cut;
    // inner estimates propagate through the outer quadrature
    let err = (e * e + (inner_err_max * (hi - lo)).powi(2)).sqrt() * a_density();
    Ok((v * scale, err))
}

/// Pair kernel by direct plane quadrature: integrates the symbol slice
/// against exp(s0 <x,b> + conj(s0') <x,b'>) over the base-point support,
/// with the factorization-normalized plane measure. Oracle route; cost
/// grows with r.
pub fn j_kernel_direct(
    u: &CompactGFunction,
    sp: &SpectralPair,
    pair: (&BoundaryPoint, &BoundaryPoint),
    opts: &TransformOptions,
) -> Result<(Complex64, f64)> {
    j_kernel_direct_raw(u, sp.s0(), sp.s0_prime().conj(), pair, opts)
}

/// Direct pair kernel with raw exponents: integrates the b-slice of the
/// symbol against exp(w1 <x,b> + w2 <x,b'>).
pub fn j_kernel_direct_raw(
    u: &CompactGFunction,
    w1: Complex64,
    w2: Complex64,
    pair: (&BoundaryPoint, &BoundaryPoint),
    opts: &TransformOptions,
) -> Result<(Complex64, f64)> {
    let (b, bp) = pair;
    if b.distance_to(bp) < crate::lie::DEGENERATE_PAIR_EPSILON {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let s0 = w1;
    let s0p_conj = w2;
    let (xlo, xhi, ylo, yhi) = u.support().disk_bounds(25);
    let inner_opts = *opts;
    let mut inner_err: f64 = 0.0;
    let mut failed = false;
    let mut outer = |y: f64| -> Complex64 {
        let mut integrand = |x: f64| -> Complex64 {
            let z = Complex64::new(x, y);
            let r2 = z.norm_sqr();
            if r2 >= 0.999999 {
                return Complex64::new(0.0, 0.0);
            }
            let xg = match crate::lie::from_disk_point(z) {
                Ok(g) => g,
                Err(_) => return Complex64::new(0.0, 0.0),
            };
            let slice = u.eval(&unit_tangent_toward(&xg, b));
            if slice == Complex64::new(0.0, 0.0) {
                return slice;
            }
            let br1 = horocycle_bracket_disk(z, b).unwrap();
            let br2 = horocycle_bracket_disk(z, bp).unwrap();
            let weight = (s0 * br1 + s0p_conj * br2).exp();
            let area = 4.0 / ((1.0 - r2) * (1.0 - r2));
            slice * weight * area
        };
        match quad_adaptive(
            &mut integrand,
            xlo,
            xhi,
            inner_opts.rel_tol,
            inner_opts.abs_tol,
            inner_opts.direct_min_panels,
            inner_opts.max_panels,
        ) {
            Ok((v, e)) => {
                inner_err = inner_err.max(e);
                v
            }
            Err(_) => {
                failed = true;
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let (v, e) = quad_adaptive(&mut outer, ylo, yhi, opts.rel_tol, opts.abs_tol, opts.direct_min_panels, opts.max_panels)?;
    if failed {
        return Err(Error::NonConvergence {
            partial_re: v.re,
            partial_im: v.im,
            estimate: e,
            evaluations: 0,
        });
    }
    let scale = area_density();
    let err = (e * e + (inner_err * (yhi - ylo)).powi(2)).sqrt() * scale;
    Ok((v * scale, err))
}

/// Boundary window used by the tensor pair integrals.
#[derive(Debug, Clone, Copy)]
pub struct PairWindow {
    pub center: f64,
    pub halfwidth: f64,
}

impl PairWindow {
    pub fn full_circle() -> Self {
        Self { center: PI, halfwidth: PI }
    }

    /// Angular window of the boundary data: its hard support when it
    /// carries one, otherwise the full circle.
    pub fn for_data(data: &BoundaryFunction) -> Self {
        if let Some((c, w)) = data.support() {
            Self { center: c, halfwidth: w }
        } else {
            Self::full_circle()
        }
    }

    pub fn nodes(&self, n: usize) -> Vec<f64> {
        // midpoint grid: periodic-trapezoid quality on the full circle,
        // and the data vanishes smoothly at hard window edges
        let h = 2.0 * self.halfwidth / n as f64;
        (0..n)
            .map(|j| self.center - self.halfwidth + (j as f64 + 0.5) * h)
            .collect()
    }

    pub fn step(&self, n: usize) -> f64 {
        2.0 * self.halfwidth / n as f64
    }
}

/// Value with a coarse/fine error estimate, as produced by the tensor pair
/// integrals. The half-resolution value is kept so that derived ratios can
/// propagate correlated errors.
#[derive(Debug, Clone, Copy)]
pub struct PairIntegral {
    pub value: Complex64,
    pub coarse: Complex64,
    pub error: f64,
    pub nodes: usize,
}

/// Tensor integral over boundary pairs of data x conj(data') x kernel on
/// midpoint grids, with the half-resolution subgrid as error estimate.
pub fn pair_integral<K>(
    t: &BoundaryFunction,
    t_prime: &BoundaryFunction,
    wb: &PairWindow,
    wbp: &PairWindow,
    n: usize,
    kernel: K,
) -> Result<PairIntegral>
where
    K: Fn(&BoundaryPoint, &BoundaryPoint) -> Result<Complex64> + Sync,
{
    use rayon::prelude::*;
    let n = (n.max(8) + 1) & !1usize; // even
    let psis = wb.nodes(n);
    let psips = wbp.nodes(n);
    let tv: Vec<Complex64> = psis.iter().map(|&p| t.eval(p)).collect();
    let tpv: Vec<Complex64> = psips.iter().map(|&p| t_prime.eval(p).conj()).collect();

    let rows: Vec<Result<Vec<Complex64>>> = psis
        .par_iter()
        .enumerate()
        .map(|(i, &psi)| {
            let b = BoundaryPoint::from_angle(psi);
            let mut row = Vec::with_capacity(n);
            for (j, &psip) in psips.iter().enumerate() {
                if tv[i].norm_sqr() == 0.0 || tpv[j].norm_sqr() == 0.0 {
                    row.push(Complex64::new(0.0, 0.0));
                    continue;
                }
                let bp = BoundaryPoint::from_angle(psip);
                row.push(kernel(&b, &bp)?);
            }
            Ok(row)
        })
        .collect();

    let mut fine = Complex64::new(0.0, 0.0);
    let mut coarse = Complex64::new(0.0, 0.0);
    for (i, row) in rows.into_iter().enumerate() {
        let row = row?;
        for (j, v) in row.into_iter().enumerate() {
            let term = tv[i] * tpv[j] * v;
            fine += term;
            if i % 2 == 0 && j % 2 == 0 {
                coarse += term;
            }
        }
    }
    let hb = wb.step(n);
    let hbp = wbp.step(n);
    let fine_val = fine * hb * hbp;
    let coarse_val = coarse * (2.0 * hb) * (2.0 * hbp);
    Ok(PairIntegral {
        value: fine_val,
        coarse: coarse_val,
        error: (fine_val - coarse_val).norm(),
        nodes: n * n,
    })
}

/// Dual pairing of boundary data against the geodesic-orbit transform of a
/// compact function.
pub fn radon_pair(
    t: &BoundaryFunction,
    t_prime: &BoundaryFunction,
    sp: &SpectralPair,
    f: &CompactGFunction,
    n: usize,
    opts: &TransformOptions,
) -> Result<PairIntegral> {
    let wb = PairWindow::for_data(t);
    let wbp = PairWindow::for_data(t_prime);
    pair_integral(t, t_prime, &wb, &wbp, n, |b, bp| {
        weighted_radon(f, sp, (b, bp), opts).map(|(v, _)| v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::trapezoid_oracle;

    pub(crate) fn test_symbol() -> CompactGFunction {
        // product bump in the three Iwasawa coordinates
        let boxy = SupportBox {
            theta_center: 1.1,
            theta_halfwidth: 0.4,
            t_center: 0.2,
            t_halfwidth: 0.9,
            x_center: 0.1,
            x_halfwidth: 0.8,
        };
        let b = boxy;
        CompactGFunction::new(
            move |_g: &GroupElement, co: &IwasawaCoords| {
                let u1 = theta_distance(co.theta, b.theta_center) / b.theta_halfwidth;
                let u2 = (co.t_a - b.t_center) / b.t_halfwidth;
                let u3 = (co.x_n - b.x_center) / b.x_halfwidth;
                Complex64::new(
                    crate::constants::smooth_bump(u1)
                        * crate::constants::smooth_bump(u2)
                        * crate::constants::smooth_bump(u3),
                    0.0,
                )
            },
            boxy,
        )
    }

    #[test]
    fn intertwine_empty_support_is_zero() {
        let u = test_symbol();
        let opts = TransformOptions::default();
        let g = GroupElement::rotation(2.6);
        let (v, e) = intertwine(&u, Complex64::new(0.1, -5.0), &g, &opts).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
        assert_eq!(e, 0.0);
    }

    #[test]
    fn intertwine_matches_brute_force() {
        let u = test_symbol();
        let opts = TransformOptions::default();
        let g = IwasawaCoords { theta: 1.1, t_a: 0.2, x_n: 0.0 }.reconstruct();
        let r = 100.0;
        let s0p = Complex64::new(0.1, -r);
        let (v, _) = intertwine(&u, s0p, &g, &opts).unwrap();
        let weight_exp = -0.5 * s0p.conj();
        let lo = u.support().x_center - u.support().x_halfwidth - g.iwasawa().x_n;
        let hi = u.support().x_center + u.support().x_halfwidth - g.iwasawa().x_n;
        let oracle = trapezoid_oracle(
            &|x| (weight_exp * (1.0 + x * x).ln()).exp() * u.eval(&g.horocycle_flow(x, true)),
            lo,
            hi,
            (1 << 22) + 1,
        ) * n_density();
        assert!((v - oracle).norm() <= 1e-8, "intertwine {v} vs oracle {oracle}");
    }

    #[test]
    fn intertwine_leading_constant() {
        let u = test_symbol();
        let g = IwasawaCoords { theta: 1.1, t_a: 0.2, x_n: 0.1 }.reconstruct();
        let lead = intertwine_leading(&u, 1.0, &g);
        let expected = leading_constant() * u.eval(&g);
        assert!((lead - expected).norm() < 1e-15);
        let zero_g = GroupElement::rotation(2.8);
        assert_eq!(intertwine_leading(&u, 5.0, &zero_g), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn intertwine_asymptotic_slope() {
        let u = test_symbol();
        let opts = TransformOptions::default();
        let g = IwasawaCoords { theta: 1.15, t_a: 0.35, x_n: 0.2 }.reconstruct();
        let mut pts = Vec::new();
        for k in 0..6 {
            let r = 20.0 * 2f64.powi(k);
            let s0p = Complex64::new(0.15, -r);
            let (v, _) = intertwine(&u, s0p, &g, &opts).unwrap();
            let lead = intertwine_leading(&u, r, &g);
            let dev = ((v - lead) / lead).norm();
            pts.push((r.ln(), dev.ln()));
        }
        let nn = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
        assert!(
            (-1.3..=-0.7).contains(&slope),
            "leading-term deviation slope {slope:.3}"
        );
    }

    #[test]
    fn radon_diagonal_and_missed_orbits_vanish() {
        let u = test_symbol();
        let sp = SpectralPair::new(0.3, 0.1, 10.0).unwrap();
        let opts = TransformOptions::default();
        let b = BoundaryPoint::from_angle(1.0);
        let (v, _) = weighted_radon(&u, &sp, (&b, &b), &opts).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));

        // a pair whose orbit K-angle misses the support window
        let b1 = BoundaryPoint::from_angle(5.9);
        let b2 = BoundaryPoint::from_angle(3.3);
        let (v2, _) = weighted_radon(&u, &sp, (&b1, &b2), &opts).unwrap();
        assert_eq!(v2, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn radon_representative_independence() {
        let u = test_symbol();
        let sp = SpectralPair::new(0.3, 0.1, 7.0).unwrap();
        let opts = TransformOptions::default();
        let g = IwasawaCoords { theta: 1.1, t_a: 0.1, x_n: 0.05 }.reconstruct();
        let (v1, _) = weighted_radon_along(&u, &sp, &g, &opts).unwrap();
        let (v2, _) = weighted_radon_along(&u, &sp, &g.geodesic_flow(1.0), &opts).unwrap();
        assert!(v1.norm() > 1e-6, "orbit must meet the support");
        assert!((v1 - v2).norm() <= 1e-9 * v1.norm().max(1.0), "{v1} vs {v2}");
    }

    #[test]
    fn endpoint_cutoff_audit() {
        let u = test_symbol();
        let beta = make_endpoint_cutoff(u.support(), 8).unwrap();
        assert!(beta.delta_min > 0.0);
        let b = BoundaryPoint::from_angle(0.3);
        assert_eq!(beta.eval(&b, &b), 0.0);
        // pairs realized by orbits through the support evaluate to 1
        let n = 10;
        let s = *u.support();
        for i in 0..n {
            let th = s.theta_center + s.theta_halfwidth * (2.0 * i as f64 / (n - 1) as f64 - 1.0);
            for j in 0..n {
                let t = s.t_center + s.t_halfwidth * (2.0 * j as f64 / (n - 1) as f64 - 1.0);
                for l in 0..n {
                    let x = s.x_center + s.x_halfwidth * (2.0 * l as f64 / (n - 1) as f64 - 1.0);
                    let g = IwasawaCoords { theta: th, t_a: t, x_n: x }.reconstruct();
                    for m in 0..n {
                        let k = GroupElement::rotation(PI * m as f64 / n as f64);
                        let (b, bp) = g.compose(&k).boundary_maps();
                        assert_eq!(beta.eval(&b, &bp), 1.0, "realized pair must get cutoff 1");
                    }
                }
            }
        }
    }

    #[test]
    fn j_kernel_routes_agree_smoke() {
        let u = test_symbol();
        let beta = make_endpoint_cutoff(u.support(), 6).unwrap();
        let opts = TransformOptions::default();
        let sp = SpectralPair::new(0.25, -0.05, 10.0).unwrap();
        let g = IwasawaCoords { theta: 1.1, t_a: 0.2, x_n: 0.1 }.reconstruct();
        let (b, bp) = g.boundary_maps();
        let (fac, ef) = j_kernel_factorized(&u, &sp, (&b, &bp), &beta, &opts).unwrap();
        let (dir, ed) = j_kernel_direct(&u, &sp, (&b, &bp), &opts).unwrap();
        let rel = (fac - dir).norm() / dir.norm();
        assert!(
            rel <= 1e-5,
            "factorized {fac} vs direct {dir}, rel {rel:.2e}, est ({ef:.1e}, {ed:.1e})"
        );
    }

    #[test]
    fn j_kernel_vanishes_outside_cutoff() {
        let u = test_symbol();
        let beta = make_endpoint_cutoff(u.support(), 6).unwrap();
        let opts = TransformOptions::default();
        let sp = SpectralPair::new(0.25, -0.05, 10.0).unwrap();
        let b = BoundaryPoint::from_angle(1.0);
        let bp = BoundaryPoint::from_angle(1.0 + 0.4 * beta.delta_min);
        let (v, _) = j_kernel_factorized(&u, &sp, (&b, &bp), &beta, &opts).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn j_direct_conjugation_symmetry() {
        // for a real symbol, conjugating both exponents conjugates the value
        let u = test_symbol();
        let opts = TransformOptions::default();
        let sp = SpectralPair::new(0.0, 0.0, 6.0).unwrap();
        let g = IwasawaCoords { theta: 1.05, t_a: 0.3, x_n: 0.0 }.reconstruct();
        let (b, bp) = g.boundary_maps();
        let w1 = sp.s0();
        let w2 = sp.s0_prime().conj();
        let (v, _) = j_kernel_direct_raw(&u, w1, w2, (&b, &bp), &opts).unwrap();
        let (w, _) = j_kernel_direct_raw(&u, w1.conj(), w2.conj(), (&b, &bp), &opts).unwrap();
        assert!(
            (v - w.conj()).norm() <= 1e-7 * v.norm().max(1e-12),
            "conjugation symmetry {v} vs {w}"
        );
    }

    #[test]
    fn radon_pair_zero_cases() {
        let u = test_symbol();
        let sp = SpectralPair::new(0.3, 0.1, 8.0).unwrap();
        let opts = TransformOptions::default();
        let zero = BoundaryFunction::constant(Complex64::new(0.0, 0.0));
        let t = BoundaryFunction::window_bump(1.9, 0.6, Complex64::new(1.0, 0.0));
        let out = radon_pair(&zero, &t, &sp, &u, 32, &opts).unwrap();
        assert_eq!(out.value, Complex64::new(0.0, 0.0));
    }
}
