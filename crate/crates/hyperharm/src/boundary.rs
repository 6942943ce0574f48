//! Boundary-circle function calculus and the Poisson transform.
//!
//! Boundary data stands in for the generalized boundary values paired by
//! the phase-space functionals; everything here is smooth, so all
//! transforms are honest integrals. The Poisson transform uses the
//! disk-model kernel (the square of the bracket kernel); that power is the
//! one selected by the eigenfunction-residual calibration, see
//! [`eigen_residual`] and the calibration notes in [`crate::constants`].

use crate::constants::{smooth_bump, DISK_KERNEL_EXPONENT};
use crate::error::{Error, Result};
use crate::lie::{circular_distance, horocycle_bracket_disk, BoundaryPoint, GroupElement};
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::sync::Arc;

type BoundaryFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Smooth complex function on the boundary circle, the primal datum of all
/// pairings.
#[derive(Clone)]
pub struct BoundaryFunction {
    eval: BoundaryFn,
    /// Band limit when the function is a trigonometric polynomial.
    band_limit: Option<usize>,
    /// Angular support window (center, halfwidth) when compactly supported.
    support: Option<(f64, f64)>,
}

impl std::fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundaryFunction")
            .field("band_limit", &self.band_limit)
            .field("support", &self.support)
            .finish()
    }
}

impl BoundaryFunction {
    pub fn from_closure<F>(f: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            band_limit: None,
            support: None,
        }
    }

    /// The constant function.
    pub fn constant(c: Complex64) -> Self {
        let mut out = Self::from_closure(move |_| c);
        out.band_limit = Some(0);
        out
    }

    /// Trigonometric polynomial from coefficients c_{-M}, ..., c_{M}.
    pub fn fourier(coeffs: Vec<Complex64>) -> Self {
        assert!(coeffs.len() % 2 == 1, "coefficient list must have odd length");
        let m = (coeffs.len() - 1) / 2;
        let cs = coeffs.clone();
        let mut out = Self::from_closure(move |psi| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (idx, c) in cs.iter().enumerate() {
                let k = idx as f64 - m as f64;
                acc += c * Complex64::from_polar(1.0, k * psi);
            }
            acc
        });
        out.band_limit = Some(m);
        out
    }

    /// Periodic concentration bump exp(kappa (cos(psi - center) - 1)),
    /// with a complex amplitude.
    pub fn vonmises_bump(center: f64, concentration: f64, amplitude: Complex64) -> Self {
        Self::from_closure(move |psi| {
            amplitude * (concentration * ((psi - center).cos() - 1.0)).exp()
        })
    }

    /// Compactly supported angular bump on (center - halfwidth, center + halfwidth).
    pub fn window_bump(center: f64, halfwidth: f64, amplitude: Complex64) -> Self {
        let mut out = Self::from_closure(move |psi| {
            amplitude * smooth_bump(circular_distance(psi, center) / halfwidth)
        });
        out.support = Some((center, halfwidth));
        out
    }

    pub fn eval(&self, psi: f64) -> Complex64 {
        (self.eval)(psi)
    }

    pub fn band_limit(&self) -> Option<usize> {
        self.band_limit
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        self.support
    }

    /// Pointwise linear combination a * self + b * other.
    pub fn linear_combination(&self, a: Complex64, other: &BoundaryFunction, b: Complex64) -> Self {
        let f = self.clone();
        let g = other.clone();
        let band_limit = match (f.band_limit, g.band_limit) {
            (Some(x), Some(y)) => Some(x.max(y)),
            _ => None,
        };
        let support = match (f.support, g.support) {
            (Some((c1, w1)), Some((c2, w2))) => {
                // smallest window containing both supports
                let mut d = (c2 - c1) % TAU;
                if d > std::f64::consts::PI {
                    d -= TAU;
                }
                if d < -std::f64::consts::PI {
                    d += TAU;
                }
                let lo = (-w1).min(d - w2);
                let hi = w1.max(d + w2);
                let hw = 0.5 * (hi - lo);
                if hw >= std::f64::consts::PI {
                    None
                } else {
                    Some((c1 + 0.5 * (lo + hi), hw))
                }
            }
            _ => None,
        };
        let mut out = Self::from_closure(move |psi| a * f.eval(psi) + b * g.eval(psi));
        out.band_limit = band_limit;
        out.support = support;
        out
    }

    /// Projection onto the trigonometric polynomials of degree m, by
    /// periodic-trapezoid coefficients.
    pub fn to_fourier(&self, m: usize) -> Self {
        let n = (8 * m + 64).next_power_of_two();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * m + 1];
        for (idx, c) in coeffs.iter_mut().enumerate() {
            let k = idx as f64 - m as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let psi = TAU * j as f64 / n as f64;
                acc += self.eval(psi) * Complex64::from_polar(1.0, -k * psi);
            }
            *c = acc / n as f64;
        }
        Self::fourier(coeffs)
    }
}

/// Spectral parameters (s0, s0') = (q + i r, q' - i r) with asymptotic
/// parameter r > 0 and real parts in the resonance strip.
#[derive(Debug, Clone, Copy)]
pub struct SpectralPair {
    pub q: f64,
    pub q_prime: f64,
    pub r: f64,
}

impl SpectralPair {
    /// Strip half-width: real parts must lie in (-STRIP_BOUND, 1/2].
    pub const STRIP_BOUND: f64 = 16.0;

    pub fn new(q: f64, q_prime: f64, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!(
                "asymptotic parameter r = {r} must be positive"
            )));
        }
        for (name, v) in [("q", q), ("q'", q_prime)] {
            if !(-Self::STRIP_BOUND..=0.5).contains(&v) {
                return Err(Error::Domain(format!(
                    "{name} = {v} outside the strip (-{}, 1/2]",
                    Self::STRIP_BOUND
                )));
            }
        }
        Ok(Self { q, q_prime, r })
    }

    /// s0 = q + i r.
    pub fn s0(&self) -> Complex64 {
        Complex64::new(self.q, self.r)
    }

    /// s0' = q' - i r.
    pub fn s0_prime(&self) -> Complex64 {
        Complex64::new(self.q_prime, -self.r)
    }
}

/// Tolerance parameters of the boundary quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub max_doublings: usize,
    pub initial_nodes: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_doublings: 14,
            initial_nodes: 32,
        }
    }
}

/// Periodic-trapezoid integral over the boundary circle with node doubling
/// until the relative change drops below tolerance. Spectrally accurate
/// for smooth integrands; the measure has total mass 2 pi.
pub fn boundary_quadrature_fn<F>(
    f: F,
    band_limit: Option<usize>,
    opts: &QuadratureOptions,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let mut n = opts.initial_nodes.max(8);
    if let Some(m) = band_limit {
        n = n.max(4 * m + 16);
    }
    let eval_n = |n: usize| -> Complex64 {
        let h = TAU / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            acc += f(h * j as f64);
        }
        acc * h
    };
    let mut prev = eval_n(n);
    if band_limit.is_some() {
        // the rule is exact once the node count exceeds the bandwidth
        return Ok(prev);
    }
    for _ in 0..opts.max_doublings {
        n *= 2;
        let next = eval_n(n);
        if (next - prev).norm() <= opts.rel_tol * next.norm().max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NonConvergence {
        partial_re: prev.re,
        partial_im: prev.im,
        estimate: f64::NAN,
        evaluations: n,
    })
}

/// Integral of a boundary function against the boundary measure.
pub fn boundary_quadrature(f: &BoundaryFunction, opts: &QuadratureOptions) -> Result<Complex64> {
    boundary_quadrature_fn(|psi| f.eval(psi), f.band_limit(), opts)
}

fn check_admissible(lambda: Complex64) -> Result<()> {
    let tol = 1e-6;
    if lambda.im.abs() < tol && lambda.re < -0.5 {
        let nearest = lambda.re.round();
        if nearest <= -1.0 && (lambda.re - nearest).abs() < tol {
            return Err(Error::ForbiddenParameter {
                re: lambda.re,
                im: lambda.im,
                tol,
            });
        }
    }
    Ok(())
}

/// Poisson transform with an explicit kernel exponent multiplier: the
/// kernel is exp(m (1 + lambda) <x, b>). The calibrated transform uses
/// m = 2 (the disk-model kernel); m = 1 is kept for the calibration
/// discriminator.
pub fn poisson_transform_with_exponent(
    data: &BoundaryFunction,
    lambda: Complex64,
    x: Complex64,
    exponent: f64,
    opts: &QuadratureOptions,
) -> Result<Complex64> {
    check_admissible(lambda)?;
    if !(x.norm_sqr() < 1.0) {
        return Err(Error::Domain(format!("point {x} not in the open unit disk")));
    }
    let power = (lambda + 1.0) * exponent;
    boundary_quadrature_fn(
        |psi| {
            let b = BoundaryPoint::from_angle(psi);
            let bracket = horocycle_bracket_disk(x, &b).expect("interior point");
            (power * bracket).exp() * data.eval(psi)
        },
        None,
        opts,
    )
}

/// Poisson transform at parameter lambda, evaluated at a disk point.
///
/// The image satisfies Delta phi = -lambda (1 + lambda) phi for the
/// non-negative hyperbolic Laplacian; with lambda = s0 - 1 this is the
/// eigenvalue s0 (1 - s0).
pub fn poisson_transform(
    data: &BoundaryFunction,
    lambda: Complex64,
    x: Complex64,
    opts: &QuadratureOptions,
) -> Result<Complex64> {
    poisson_transform_with_exponent(data, lambda, x, DISK_KERNEL_EXPONENT, opts)
}

/// Five-point finite-difference hyperbolic Laplacian in disk coordinates
/// (non-negative convention), with one Richardson halving.
pub fn fd_laplacian<F>(phi: F, z: Complex64, h: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let five_point = |h: f64| -> Result<Complex64> {
        let c = phi(z)?;
        let xp = phi(z + Complex64::new(h, 0.0))?;
        let xm = phi(z - Complex64::new(h, 0.0))?;
        let yp = phi(z + Complex64::new(0.0, h))?;
        let ym = phi(z - Complex64::new(0.0, h))?;
        let euclidean = (xp + xm + yp + ym - 4.0 * c) / (h * h);
        let conformal = (1.0 - z.norm_sqr()).powi(2) / 4.0;
        Ok(-conformal * euclidean)
    };
    let coarse = five_point(h)?;
    let fine = five_point(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Default finite-difference step of the eigen residual.
pub const FD_STEP: f64 = 1e-3;

/// Relative residual of the eigenfunction equation Delta phi = s0 (1 - s0) phi
/// for phi the Poisson image of the data at lambda = s0 - 1, maximized over
/// the sample points.
pub fn eigen_residual(
    data: &BoundaryFunction,
    s0: Complex64,
    samples: &[Complex64],
    opts: &QuadratureOptions,
) -> Result<f64> {
    eigen_residual_with_exponent(data, s0, samples, DISK_KERNEL_EXPONENT, opts)
}

/// Same residual with an explicit kernel exponent, used by the calibration
/// pass to discriminate between the two kernel conventions.
pub fn eigen_residual_with_exponent(
    data: &BoundaryFunction,
    s0: Complex64,
    samples: &[Complex64],
    exponent: f64,
    opts: &QuadratureOptions,
) -> Result<f64> {
    let lambda = s0 - 1.0;
    let mu = s0 * (1.0 - s0);
    let phi = |z: Complex64| poisson_transform_with_exponent(data, lambda, z, exponent, opts);
    let mut worst: f64 = 0.0;
    for &z in samples {
        let lap = fd_laplacian(phi, z, FD_STEP)?;
        let val = phi(z)?;
        let res = (lap - mu * val).norm() / val.norm().max(1.0);
        worst = worst.max(res);
    }
    Ok(worst)
}

/// Sup over sample points of the equivariance defect of the Poisson
/// transform: comparing the pulled-back image with the image of the
/// Jacobian-weighted pulled-back data.
pub fn equivariance_residual(
    g: &GroupElement,
    data: &BoundaryFunction,
    lambda: Complex64,
    samples: &[Complex64],
    opts: &QuadratureOptions,
) -> Result<f64> {
    check_admissible(lambda)?;
    let mut worst: f64 = 0.0;
    for &z in samples {
        // left side: phi(g . x)
        let gz = g.compose(&crate::lie::from_disk_point(z)?).base_point_disk();
        let lhs = poisson_transform(data, lambda, gz, opts)?;
        // right side: transform of |det dg|^{-lambda} (data o g), with the
        // Jacobian differentiated numerically from the angle map
        let weighted = {
            let g = *g;
            let data = data.clone();
            move |psi: f64| -> Complex64 {
                // step balances 4th-order truncation against rounding noise
                let jac = g.boundary_jacobian_numeric(psi, 1e-3);
                let pulled = data.eval(g.boundary_action(psi));
                (-lambda * jac.ln()).exp() * pulled
            }
        };
        let rhs = poisson_transform(
            &BoundaryFunction::from_closure(weighted),
            lambda,
            z,
            opts,
        )?;
        worst = worst.max((lhs - rhs).norm() / lhs.norm().max(1.0));
    }
    Ok(worst)
}
