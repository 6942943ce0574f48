//! Exact linear-algebra layer for PSL(2,R).
//!
//! Group elements are stored as one representative of {±Q} with unit
//! determinant. The Iwasawa factorization g = k(theta) exp(t X) n(x) uses
//! the rotation matrices (cos t, sin t; -sin t, cos t), the diagonal
//! one-parameter group exp(t X) = diag(e^{t/2}, e^{-t/2}) and the upper
//! unipotent group n(x) = (1, x; 0, 1). On the boundary circle we use the
//! angle psi = 2 theta, so that the K-angle of period pi covers a full
//! circle; the disk-model boundary point is e^{i psi}.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

/// Projective 2x2 real unit-determinant matrix, the universal coordinate for
/// the unit sphere bundle of the hyperbolic plane.
#[derive(Debug, Clone, Copy)]
pub struct GroupElement {
    /// Row-major entries (a, b, c, d).
    m: [f64; 4],
}

/// Element of sl(2,R) in the orthonormal basis {X, V, X_perp}.
///
/// X = diag(1/2, -1/2), V = (0, 1/2; -1/2, 0), X_perp = (0, 1/2; 1/2, 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LieVector {
    pub x: f64,
    pub v: f64,
    pub perp: f64,
}

/// Iwasawa coordinates of a group element: K-angle, A-coordinate and
/// N-coordinate with g = k(theta) exp(t_a X) n(x_n).
#[derive(Debug, Clone, Copy)]
pub struct IwasawaCoords {
    /// Rotation angle of the compact factor, taken mod pi.
    pub theta: f64,
    /// A-coordinate in the convention exp(t_a X) = diag(e^{t_a/2}, e^{-t_a/2}).
    pub t_a: f64,
    /// Upper entry of the unipotent factor.
    pub x_n: f64,
}

/// Point of the boundary circle, stored as the disk-model angle in [0, 2pi).
#[derive(Debug, Clone, Copy)]
pub struct BoundaryPoint {
    angle: f64,
}

fn wrap_tau(a: f64) -> f64 {
    let mut x = a % TAU;
    if x < 0.0 {
        x += TAU;
    }
    x
}

/// Circular distance on the boundary circle (period 2 pi).
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = wrap_tau(a - b);
    d.min(TAU - d)
}

impl BoundaryPoint {
    pub fn from_angle(angle: f64) -> Self {
        Self { angle: wrap_tau(angle) }
    }

    /// Boundary point represented by the rotation k(theta).
    pub fn from_k_angle(theta: f64) -> Self {
        Self::from_angle(2.0 * theta)
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// K-angle of the representing rotation, in [0, pi).
    pub fn k_angle(&self) -> f64 {
        0.5 * self.angle
    }

    /// Disk-model point on the unit circle.
    pub fn disk_point(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }

    /// Representing rotation in K.
    pub fn rotation(&self) -> GroupElement {
        GroupElement::rotation(self.k_angle())
    }

    pub fn distance_to(&self, other: &BoundaryPoint) -> f64 {
        circular_distance(self.angle, other.angle)
    }

    /// Chord length |b - b'| between the two disk-model points.
    pub fn chord_to(&self, other: &BoundaryPoint) -> f64 {
        2.0 * (0.5 * (self.angle - other.angle)).sin().abs()
    }
}

impl GroupElement {
    pub fn from_entries(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.is_finite() && det > 0.0) {
            return Err(Error::Domain(format!(
                "matrix determinant {det} is not positive and finite"
            )));
        }
        let s = det.sqrt();
        Ok(Self {
            m: [a / s, b / s, c / s, d / s],
        })
    }

    pub fn identity() -> Self {
        Self { m: [1.0, 0.0, 0.0, 1.0] }
    }

    /// Rotation k(theta) = (cos, sin; -sin, cos).
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { m: [c, s, -s, c] }
    }

    /// exp(t X) = diag(e^{t/2}, e^{-t/2}).
    pub fn diagonal_flow(t: f64) -> Self {
        Self {
            m: [(0.5 * t).exp(), 0.0, 0.0, (-0.5 * t).exp()],
        }
    }

    /// Upper unipotent n(x) = (1, x; 0, 1).
    pub fn unipotent_upper(x: f64) -> Self {
        Self { m: [1.0, x, 0.0, 1.0] }
    }

    /// Lower unipotent (1, 0; x, 1).
    pub fn unipotent_lower(x: f64) -> Self {
        Self { m: [1.0, 0.0, x, 1.0] }
    }

    /// The Weyl element (0, 1; -1, 0) normalizing the diagonal subgroup.
    pub fn weyl() -> Self {
        Self { m: [0.0, 1.0, -1.0, 0.0] }
    }

    pub fn entries(&self) -> (f64, f64, f64, f64) {
        (self.m[0], self.m[1], self.m[2], self.m[3])
    }

    pub fn determinant(&self) -> f64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    /// Matrix product with determinant renormalization and canonical sign.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = other.m;
        let mut m = [
            a * e + b * g,
            a * f + b * h,
            c * e + d * g,
            c * f + d * h,
        ];
        let det = m[0] * m[3] - m[1] * m[2];
        let s = det.sqrt();
        for v in &mut m {
            *v /= s;
        }
        let mut out = Self { m };
        out.canonicalize();
        out
    }

    pub fn inverse(&self) -> GroupElement {
        let [a, b, c, d] = self.m;
        let mut out = Self { m: [d, -b, -c, a] };
        out.canonicalize();
        out
    }

    /// Picks the representative with a > 0, or a = 0 and c > 0.
    fn canonicalize(&mut self) {
        let flip = if self.m[0] != 0.0 {
            self.m[0] < 0.0
        } else {
            self.m[2] < 0.0
        };
        if flip {
            for v in &mut self.m {
                *v = -*v;
            }
        }
    }

    /// Projective equality: g and -g represent the same element.
    pub fn approx_eq(&self, other: &GroupElement, tol: f64) -> bool {
        self.distance_to(other) <= tol
    }

    /// Projective sup-norm distance min(|P - Q|, |P + Q|).
    pub fn distance_to(&self, other: &GroupElement) -> f64 {
        let mut dm: f64 = 0.0;
        let mut dp: f64 = 0.0;
        for i in 0..4 {
            dm = dm.max((self.m[i] - other.m[i]).abs());
            dp = dp.max((self.m[i] + other.m[i]).abs());
        }
        dm.min(dp)
    }

    /// Iwasawa factorization g = k(theta) exp(t_a X) n(x_n).
    pub fn iwasawa(&self) -> IwasawaCoords {
        let (a, b, c, d) = self.entries();
        let r2 = a * a + c * c;
        IwasawaCoords {
            theta: (-c).atan2(a),
            t_a: r2.ln(),
            x_n: (a * b + c * d) / r2,
        }
    }

    /// Root functional applied to the A-part: alpha(A(g)) = log(a^2 + c^2).
    pub fn alpha_a(&self) -> f64 {
        let (a, _, c, _) = self.entries();
        (a * a + c * c).ln()
    }

    /// Half-root functional applied to the A-part, rho(A(g)) = alpha(A(g))/2.
    pub fn rho_a(&self) -> f64 {
        0.5 * self.alpha_a()
    }

    /// Adjoint action Ad(g) Y = Q Y Q^{-1}.
    pub fn adjoint(&self, y: &LieVector) -> LieVector {
        let [a, b, c, d] = self.m;
        let [[m00, m01], [m10, m11]] = y.matrix();
        // Q * Y
        let p00 = a * m00 + b * m10;
        let p01 = a * m01 + b * m11;
        let p10 = c * m00 + d * m10;
        let p11 = c * m01 + d * m11;
        // (Q * Y) * Q^{-1}, Q^{-1} = (d, -b; -c, a)
        let q00 = p00 * d + p01 * (-c);
        let q01 = p00 * (-b) + p01 * a;
        let q10 = p10 * d + p11 * (-c);
        let q11 = p10 * (-b) + p11 * a;
        LieVector::from_matrix([[q00, q01], [q10, q11]])
    }

    /// Right translation by exp(t X), the geodesic flow on the sphere bundle.
    pub fn geodesic_flow(&self, t: f64) -> GroupElement {
        self.compose(&GroupElement::diagonal_flow(t))
    }

    /// Right translation by exp(t U_+) or exp(t U_-).
    pub fn horocycle_flow(&self, t: f64, positive: bool) -> GroupElement {
        if positive {
            self.compose(&GroupElement::unipotent_upper(t))
        } else {
            self.compose(&GroupElement::unipotent_lower(t))
        }
    }

    /// Forward geodesic endpoint B_+(g), the boundary point of kappa(g).
    pub fn boundary_plus(&self) -> BoundaryPoint {
        BoundaryPoint::from_k_angle(self.iwasawa().theta)
    }

    /// Backward geodesic endpoint B_-(g) = B_+(g w0).
    pub fn boundary_minus(&self) -> BoundaryPoint {
        self.compose(&GroupElement::weyl()).boundary_plus()
    }

    /// Both geodesic endpoints (B_+, B_-).
    pub fn boundary_maps(&self) -> (BoundaryPoint, BoundaryPoint) {
        (self.boundary_plus(), self.boundary_minus())
    }

    /// Action on the boundary circle, psi -> angle of kappa(g k(psi/2)).
    pub fn boundary_action(&self, psi: f64) -> f64 {
        // Only the first column of g * k(psi/2) enters kappa.
        let [a, b, c, d] = self.m;
        let (s, co) = (0.5 * psi).sin_cos();
        let a1 = a * co - b * s;
        let c1 = c * co - d * s;
        wrap_tau(2.0 * (-c1).atan2(a1))
    }

    /// Jacobian of the boundary action at angle psi, by 4th order differences.
    pub fn boundary_jacobian_numeric(&self, psi: f64, h: f64) -> f64 {
        let f = |p: f64| {
            // unwrap the angle increment near psi to keep differences smooth
            let q = self.boundary_action(p);
            q
        };
        // Work with increments relative to the center value to avoid wrap jumps.
        let c0 = f(psi);
        let unwrap = |q: f64| {
            let mut d = q - c0;
            while d > PI {
                d -= TAU;
            }
            while d < -PI {
                d += TAU;
            }
            d
        };
        let fm2 = unwrap(f(psi - 2.0 * h));
        let fm1 = unwrap(f(psi - h));
        let fp1 = unwrap(f(psi + h));
        let fp2 = unwrap(f(psi + 2.0 * h));
        ((fm2 - fp2) + 8.0 * (fp1 - fm1)) / (12.0 * h)
    }

    /// Jacobian of the boundary action in closed form, as the squared-kernel
    /// value at the pulled-back base point.
    pub fn boundary_jacobian(&self, psi: f64) -> f64 {
        let z0 = self.inverse().base_point_disk();
        let b = Complex64::from_polar(1.0, psi);
        (1.0 - z0.norm_sqr()) / (b - z0).norm_sqr()
    }

    /// Base point of the coset gK in the half-plane model, the Moebius image of i.
    pub fn base_point_halfplane(&self) -> Complex64 {
        let [a, b, c, d] = self.m;
        let num = Complex64::new(b, a);
        let den = Complex64::new(d, c);
        num / den
    }

    /// Base point of the coset gK in the disk model.
    pub fn base_point_disk(&self) -> Complex64 {
        cayley(self.base_point_halfplane()).expect("group orbit stays in the half-plane")
    }
}

/// Returns a group element whose coset is the given half-plane point,
/// the unique AN-representative.
pub fn from_halfplane_point(z: Complex64) -> Result<GroupElement> {
    if !(z.im > 0.0) {
        return Err(Error::Domain(format!("point {z} not in the upper half-plane")));
    }
    let sy = z.im.sqrt();
    GroupElement::from_entries(sy, z.re / sy, 0.0, 1.0 / sy)
}

/// Returns a group element whose coset is the given disk point.
pub fn from_disk_point(w: Complex64) -> Result<GroupElement> {
    from_halfplane_point(inverse_cayley(w)?)
}

/// Cayley transform from the half-plane to the disk, z -> (z - i)/(z + i).
pub fn cayley(z: Complex64) -> Result<Complex64> {
    if !(z.im > 0.0) {
        return Err(Error::Domain(format!("point {z} not in the upper half-plane")));
    }
    let i = Complex64::new(0.0, 1.0);
    Ok((z - i) / (z + i))
}

/// Inverse Cayley transform, w -> i (1 + w)/(1 - w).
pub fn inverse_cayley(w: Complex64) -> Result<Complex64> {
    if !(w.norm_sqr() < 1.0) {
        return Err(Error::Domain(format!("point {w} not in the open unit disk")));
    }
    let i = Complex64::new(0.0, 1.0);
    Ok(i * (1.0 + w) / (1.0 - w))
}

/// Hyperbolic distance between two disk points.
pub fn disk_distance(z: Complex64, w: Complex64) -> f64 {
    let q = (z - w) / (Complex64::new(1.0, 0.0) - w.conj() * z);
    2.0 * q.norm().atanh()
}

impl LieVector {
    pub fn new(x: f64, v: f64, perp: f64) -> Self {
        Self { x, v, perp }
    }

    pub fn x() -> Self {
        Self::new(1.0, 0.0, 0.0)
    }

    pub fn v() -> Self {
        Self::new(0.0, 1.0, 0.0)
    }

    pub fn x_perp() -> Self {
        Self::new(0.0, 0.0, 1.0)
    }

    /// Nilpotent generator U_+ = (0, 1; 0, 0) = X_perp + V.
    pub fn u_plus() -> Self {
        Self::new(0.0, 1.0, 1.0)
    }

    /// Nilpotent generator U_- = (0, 0; 1, 0) = X_perp - V.
    pub fn u_minus() -> Self {
        Self::new(0.0, -1.0, 1.0)
    }

    /// Coefficients over the Bruhat basis {X, U_+, U_-}.
    pub fn bruhat_coefficients(&self) -> (f64, f64, f64) {
        (self.x, 0.5 * (self.v + self.perp), 0.5 * (self.perp - self.v))
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [
            [0.5 * self.x, 0.5 * (self.v + self.perp)],
            [0.5 * (self.perp - self.v), -0.5 * self.x],
        ]
    }

    pub fn from_matrix(m: [[f64; 2]; 2]) -> Self {
        // trace part is zero for inputs from the adjoint action
        Self {
            x: m[0][0] - m[1][1],
            v: m[0][1] - m[1][0],
            perp: m[0][1] + m[1][0],
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.v * self.v + self.perp * self.perp
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(s * self.x, s * self.v, s * self.perp)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.x + o.x, self.v + o.v, self.perp + o.perp)
    }

    /// Matrix exponential, exact for sl(2) via the Cayley-Hamilton closed form.
    pub fn exp(&self) -> GroupElement {
        let m = self.matrix();
        // M^2 = delta * I with delta = -det M
        let delta = m[0][0] * m[0][0] + m[0][1] * m[1][0];
        let (ch, sh) = if delta > 1e-30 {
            let s = delta.sqrt();
            (s.cosh(), s.sinh() / s)
        } else if delta < -1e-30 {
            let s = (-delta).sqrt();
            (s.cos(), s.sin() / s)
        } else {
            (1.0, 1.0)
        };
        GroupElement::from_entries(
            ch + sh * m[0][0],
            sh * m[0][1],
            sh * m[1][0],
            ch + sh * m[1][1],
        )
        .expect("exponential of a traceless matrix has determinant one")
    }
}

impl IwasawaCoords {
    /// Multiplies the three factors back together.
    pub fn reconstruct(&self) -> GroupElement {
        GroupElement::rotation(self.theta)
            .compose(&GroupElement::diagonal_flow(self.t_a))
            .compose(&GroupElement::unipotent_upper(self.x_n))
    }
}

/// The unit tangent vector at the coset point of `x` whose forward
/// geodesic endpoint is `b`; inverts the (base point, forward endpoint)
/// trivialization of the sphere bundle.
pub fn unit_tangent_toward(x: &GroupElement, b: &BoundaryPoint) -> GroupElement {
    let pulled = x.inverse().boundary_action(b.angle());
    x.compose(&GroupElement::rotation(0.5 * pulled))
}

/// Horocycle bracket of an interior point x = gK and a boundary point b,
/// -rho(A(g^{-1} k_b)).
pub fn horocycle_bracket(x: &GroupElement, b: &BoundaryPoint) -> f64 {
    -x.inverse().compose(&b.rotation()).rho_a()
}

/// Horocycle bracket from the disk-model closed form, half the log of the
/// squared-distance kernel. Agrees with `horocycle_bracket` to roundoff.
pub fn horocycle_bracket_disk(z: Complex64, b: &BoundaryPoint) -> Result<f64> {
    let d2 = (z - b.disk_point()).norm_sqr();
    if d2 < 1e-28 {
        return Err(Error::BoundaryProximity { distance: d2.sqrt() });
    }
    Ok(0.5 * ((1.0 - z.norm_sqr()) / d2).ln())
}

/// Which closed form of the Poisson kernel to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelModel {
    /// e^{<x,b>} with the horocycle bracket.
    Bracket,
    /// (1 - |x|^2)/|x - b|^2 in the disk model.
    Disk,
}

/// Poisson kernel in either model. The disk value is the square of the
/// bracket value; the relation is measured by the calibration pass.
pub fn poisson_kernel(x: &GroupElement, b: &BoundaryPoint, model: KernelModel) -> Result<f64> {
    match model {
        KernelModel::Bracket => Ok(horocycle_bracket(x, b).exp()),
        KernelModel::Disk => {
            let z = x.base_point_disk();
            let d2 = (z - b.disk_point()).norm_sqr();
            if d2 < 1e-28 {
                return Err(Error::BoundaryProximity { distance: d2.sqrt() });
            }
            Ok((1.0 - z.norm_sqr()) / d2)
        }
    }
}

/// Default angular separation below which a boundary pair is degenerate.
pub const DEGENERATE_PAIR_EPSILON: f64 = 1e-8;

/// One group element g with B_+(g) = b and B_-(g) = b', a section of the
/// geodesic chart on off-diagonal boundary pairs.
pub fn psi_inverse(b: &BoundaryPoint, b_prime: &BoundaryPoint) -> Result<GroupElement> {
    psi_inverse_with_epsilon(b, b_prime, DEGENERATE_PAIR_EPSILON)
}

pub fn psi_inverse_with_epsilon(
    b: &BoundaryPoint,
    b_prime: &BoundaryPoint,
    epsilon: f64,
) -> Result<GroupElement> {
    let sep = b.distance_to(b_prime);
    if sep < epsilon {
        return Err(Error::DegeneratePair { separation: sep, epsilon });
    }
    // Rotate the base pair (0, pi) onto (b, b') after moving the antipode
    // with a unipotent element fixing the base forward endpoint.
    let delta = wrap_tau(b_prime.angle() - b.angle());
    let x = -(0.5 * delta).tan().recip();
    let n = if x.is_finite() {
        GroupElement::unipotent_upper(x)
    } else {
        GroupElement::identity()
    };
    Ok(b.rotation().compose(&n))
}

/// Gradient data for the pair phase function at interior points.
#[derive(Debug, Clone)]
pub struct StationaryReport {
    /// Hyperbolic gradient norms at the on-geodesic samples.
    pub on_geodesic: Vec<f64>,
    /// Hyperbolic gradient norms at the off-geodesic samples.
    pub off_geodesic: Vec<f64>,
    /// Max minus min of the phase along the geodesic samples.
    pub along_variation: f64,
}

/// Pair phase Psi(x) = <x,b> + <x,b'>; stationary exactly on the geodesic
/// joining the endpoints, where it is constant.
pub fn pair_phase(z: Complex64, b: &BoundaryPoint, b_prime: &BoundaryPoint) -> Result<f64> {
    Ok(horocycle_bracket_disk(z, b)? + horocycle_bracket_disk(z, b_prime)?)
}

/// Samples the gradient of the pair phase on and off the connecting geodesic.
pub fn stationary_points_report(
    b: &BoundaryPoint,
    b_prime: &BoundaryPoint,
    flow_samples: &[f64],
    off_distance: f64,
    fd_step: f64,
) -> Result<StationaryReport> {
    let g = psi_inverse(b, b_prime)?;
    let grad_norm = |z: Complex64| -> Result<f64> {
        let h = fd_step;
        let dx = (pair_phase(z + Complex64::new(h, 0.0), b, b_prime)?
            - pair_phase(z - Complex64::new(h, 0.0), b, b_prime)?)
            / (2.0 * h);
        let dy = (pair_phase(z + Complex64::new(0.0, h), b, b_prime)?
            - pair_phase(z - Complex64::new(0.0, h), b, b_prime)?)
            / (2.0 * h);
        // hyperbolic norm of the differential in the disk model
        let conformal = 0.5 * (1.0 - z.norm_sqr());
        Ok(conformal * (dx * dx + dy * dy).sqrt())
    };
    let mut on = Vec::new();
    let mut values = Vec::new();
    for &t in flow_samples {
        let z = g.geodesic_flow(t).base_point_disk();
        on.push(grad_norm(z)?);
        values.push(pair_phase(z, b, b_prime)?);
    }
    let mut off = Vec::new();
    for &t in flow_samples {
        // push off the geodesic with the perpendicular direction X_perp
        let moved = g
            .geodesic_flow(t)
            .compose(&LieVector::x_perp().scale(off_distance).exp());
        off.push(grad_norm(moved.base_point_disk())?);
    }
    let vmax = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let vmin = values.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(StationaryReport {
        on_geodesic: on,
        off_geodesic: off,
        along_variation: vmax - vmin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_element(rng: &mut ChaCha8Rng) -> GroupElement {
        loop {
            let a = rng.gen_range(-2.0..2.0);
            let b = rng.gen_range(-2.0..2.0);
            let c = rng.gen_range(-2.0..2.0);
            let d = rng.gen_range(-2.0..2.0);
            if (a * d - b * c) > 0.05 {
                return GroupElement::from_entries(a, b, c, d).unwrap();
            }
        }
    }

    #[test]
    fn compose_identity_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = GroupElement::identity();
        for _ in 0..100 {
            let g = random_element(&mut rng);
            assert!(e.compose(&g).approx_eq(&g, 1e-14));
            assert!(g.compose(&g.inverse()).approx_eq(&e, 1e-13));
        }
        let w = GroupElement::weyl();
        assert!(w.compose(&w).approx_eq(&e, 1e-15), "w0^2 = -I is the identity projectively");
    }

    #[test]
    fn iwasawa_trivial_cases() {
        let e = GroupElement::identity().iwasawa();
        assert!(e.theta.abs() < 1e-15 && e.t_a.abs() < 1e-15 && e.x_n.abs() < 1e-15);

        let n = GroupElement::unipotent_upper(1.0).iwasawa();
        assert!(n.theta.abs() < 1e-15 && n.t_a.abs() < 1e-15);
        assert!((n.x_n - 1.0).abs() < 1e-15);

        let w = GroupElement::weyl().iwasawa();
        assert!(w.t_a.abs() < 1e-15 && w.x_n.abs() < 1e-15);
        assert!(GroupElement::rotation(w.theta).approx_eq(&GroupElement::weyl(), 1e-15));
    }

    #[test]
    fn iwasawa_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let g = random_element(&mut rng);
            let co = g.iwasawa();
            worst = worst.max(co.reconstruct().distance_to(&g));
        }
        assert!(worst <= 1e-12, "worst reconstruction error {worst:.3e}");
    }

    #[test]
    fn alpha_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(GroupElement::identity().alpha_a().abs() < 1e-15);
        let t = 0.73;
        let a = GroupElement::diagonal_flow(t);
        assert!((a.alpha_a() - t).abs() < 1e-14);
        for _ in 0..1000 {
            let g = random_element(&mut rng);
            let co = g.iwasawa();
            assert!((g.alpha_a() - co.t_a).abs() <= 1e-12);
        }
    }

    #[test]
    fn adjoint_root_scaling() {
        let e = GroupElement::identity();
        let y = LieVector::new(0.3, -0.7, 1.1);
        let ad = e.adjoint(&y);
        assert!((ad.x - y.x).abs() < 1e-15 && (ad.v - y.v).abs() < 1e-15);

        let mut t = -10.0;
        while t <= 10.0 {
            let g = GroupElement::diagonal_flow(-t);
            let up = g.adjoint(&LieVector::u_plus());
            let um = g.adjoint(&LieVector::u_minus());
            let (_, p1, m1) = up.bruhat_coefficients();
            let (_, p2, m2) = um.bruhat_coefficients();
            let rel1 = (p1 - (-t).exp()).abs() / (-t).exp();
            let rel2 = (m2 - t.exp()).abs() / t.exp();
            assert!(rel1 <= 1e-12 && m1.abs() <= 1e-12 * p1.abs().max(1.0), "t={t}");
            assert!(rel2 <= 1e-12 && p2.abs() <= 1e-12 * m2.abs().max(1.0), "t={t}");
            t += 0.5;
        }
    }

    #[test]
    fn flow_law_and_endpoint_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let g = random_element(&mut rng);
            let s = rng.gen_range(-2.0..2.0);
            let t = rng.gen_range(-2.0..2.0);
            let one = g.geodesic_flow(s).geodesic_flow(t);
            let two = g.geodesic_flow(s + t);
            assert!(one.approx_eq(&two, 1e-12));
            let b0 = g.boundary_plus();
            let b1 = g.geodesic_flow(t).boundary_plus();
            assert!(b0.distance_to(&b1) <= 1e-12);
            let m0 = g.boundary_minus();
            let m1 = g.geodesic_flow(t).boundary_minus();
            assert!(m0.distance_to(&m1) <= 1e-12);
        }
        let t = 1.3;
        let d = GroupElement::diagonal_flow(t);
        assert!(d.approx_eq(
            &GroupElement::from_entries((t / 2.0).exp(), 0.0, 0.0, (-t / 2.0).exp()).unwrap(),
            1e-15
        ));
    }

    #[test]
    fn horocycle_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let e = GroupElement::identity();
        assert!(e
            .horocycle_flow(1.0, true)
            .approx_eq(&GroupElement::unipotent_upper(1.0), 1e-15));
        for _ in 0..100 {
            let s = rng.gen_range(-2.0..2.0);
            let t = rng.gen_range(-2.0..2.0);
            let lhs = GroupElement::diagonal_flow(-s)
                .compose(&GroupElement::unipotent_upper(t))
                .compose(&GroupElement::diagonal_flow(s));
            let rhs = GroupElement::unipotent_upper(t * (-s).exp());
            assert!(lhs.approx_eq(&rhs, 1e-12));
        }
    }

    #[test]
    fn boundary_maps_basics() {
        let (bp, bm) = GroupElement::identity().boundary_maps();
        assert!(bp.angle().abs() < 1e-15);
        assert!((bm.angle() - PI).abs() < 1e-12);
        assert!(bp.distance_to(&bm) > 1.0, "endpoints always distinct");

        // A-invariance
        let (bp2, bm2) = GroupElement::diagonal_flow(2.2).boundary_maps();
        assert!(bp.distance_to(&bp2) < 1e-13 && bm.distance_to(&bm2) < 1e-13);

        // K-equivariance under the boundary action
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let g = random_element(&mut rng);
            let k = GroupElement::rotation(rng.gen_range(0.0..PI));
            let (p, m) = g.boundary_maps();
            let (kp, km) = k.compose(&g).boundary_maps();
            assert!(circular_distance(kp.angle(), k.boundary_action(p.angle())) < 1e-12);
            assert!(circular_distance(km.angle(), k.boundary_action(m.angle())) < 1e-12);
        }
    }

    #[test]
    fn psi_inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (b0, b1) = GroupElement::identity().boundary_maps();
        let g = psi_inverse(&b0, &b1).unwrap();
        let (p, m) = g.boundary_maps();
        assert!(p.distance_to(&b0) < 1e-12 && m.distance_to(&b1) < 1e-12);

        for _ in 0..500 {
            let g = random_element(&mut rng);
            let (b, bp) = g.boundary_maps();
            let h = psi_inverse(&b, &bp).unwrap();
            let (hb, hbp) = h.boundary_maps();
            assert!(hb.distance_to(&b) <= 1e-10 && hbp.distance_to(&bp) <= 1e-10);
        }

        let b = BoundaryPoint::from_angle(0.4);
        assert!(matches!(
            psi_inverse(&b, &b),
            Err(Error::DegeneratePair { .. })
        ));
    }

    #[test]
    fn bracket_basics_and_representative_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let o = GroupElement::identity();
        for _ in 0..50 {
            let b = BoundaryPoint::from_angle(rng.gen_range(0.0..TAU));
            assert!(horocycle_bracket(&o, &b).abs() < 1e-14);
        }
        let t = 0.9;
        let x = GroupElement::diagonal_flow(t);
        let b = GroupElement::identity().boundary_plus();
        assert!((horocycle_bracket(&x, &b) - 0.5 * t).abs() < 1e-14);

        for _ in 0..200 {
            let g = random_element(&mut rng);
            let k = GroupElement::rotation(rng.gen_range(0.0..PI));
            let b = BoundaryPoint::from_angle(rng.gen_range(0.0..TAU));
            let v1 = horocycle_bracket(&g, &b);
            let v2 = horocycle_bracket(&g.compose(&k), &b);
            assert!((v1 - v2).abs() <= 1e-12);
        }
    }

    #[test]
    fn bracket_reduction_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let g = random_element(&mut rng);
            let t = rng.gen_range(-1.5..1.5);
            let x = rng.gen_range(-1.5..1.5);
            let a = GroupElement::diagonal_flow(t);
            let n = GroupElement::unipotent_upper(x);
            let gan = g.compose(&a).compose(&n);
            let (b, bp) = g.boundary_maps();

            let lhs = horocycle_bracket(&gan, &b);
            let rhs = g.compose(&a).rho_a();
            assert!((lhs - rhs).abs() <= 1e-10, "forward reduction {lhs} vs {rhs}");

            let lhs2 = horocycle_bracket(&gan, &bp);
            let w = GroupElement::weyl();
            let rhs2 = -n.inverse().compose(&w).rho_a() + g.compose(&a).compose(&w).rho_a();
            assert!((lhs2 - rhs2).abs() <= 1e-10, "backward reduction {lhs2} vs {rhs2}");

            // closed form for the unipotent weight
            let closed = 0.5 * (1.0 + x * x).ln();
            assert!((n.inverse().compose(&w).rho_a() - closed).abs() <= 1e-12);
        }
        // closed form over a wide range
        for &x in &[-1e3, -10.0, -0.1, 0.0, 0.1, 10.0, 1e3] {
            let n = GroupElement::unipotent_upper(x);
            let w = GroupElement::weyl();
            let generic = n.inverse().compose(&w).rho_a();
            let closed = 0.5 * (1.0 + x * x).ln();
            assert!((generic - closed).abs() <= 1e-12 * closed.abs().max(1.0));
        }
    }

    #[test]
    fn poisson_kernel_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let o = GroupElement::identity();
        let b = BoundaryPoint::from_angle(1.1);
        assert!((poisson_kernel(&o, &b, KernelModel::Disk).unwrap() - 1.0).abs() < 1e-14);
        assert!((poisson_kernel(&o, &b, KernelModel::Bracket).unwrap() - 1.0).abs() < 1e-14);

        // radial value toward the endpoint
        let t = 1.7;
        let x = GroupElement::diagonal_flow(t);
        let bp = GroupElement::identity().boundary_plus();
        let disk = poisson_kernel(&x, &bp, KernelModel::Disk).unwrap();
        assert!((disk - t.exp()).abs() <= 1e-12 * t.exp());

        // measured relation between the two models: disk = bracket^2
        for _ in 0..200 {
            let g = random_element(&mut rng);
            let b = BoundaryPoint::from_angle(rng.gen_range(0.0..TAU));
            let disk = poisson_kernel(&g, &b, KernelModel::Disk).unwrap();
            let br = poisson_kernel(&g, &b, KernelModel::Bracket).unwrap();
            let exponent = disk.ln() / br.ln();
            if br.ln().abs() > 1e-3 {
                assert!((exponent - 2.0).abs() <= 1e-10, "exponent {exponent}");
            }
        }
    }

    #[test]
    fn cayley_round_trip_and_radial_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let i = Complex64::new(0.0, 1.0);
        assert!(cayley(i).unwrap().norm() < 1e-15);
        assert!((inverse_cayley(Complex64::new(0.0, 0.0)).unwrap() - i).norm() < 1e-15);
        for _ in 0..500 {
            let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..4.0));
            let back = inverse_cayley(cayley(z).unwrap()).unwrap();
            assert!((back - z).norm() <= 1e-14 * z.norm().max(1.0));
        }
        let t = 0.8_f64;
        let w = cayley(Complex64::new(0.0, t.exp())).unwrap();
        assert!((w.re - (t / 2.0).tanh()).abs() < 1e-14 && w.im.abs() < 1e-15);
        assert!(matches!(cayley(Complex64::new(0.0, -1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn bracket_disk_closed_form_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..500 {
            let g = random_element(&mut rng);
            let b = BoundaryPoint::from_angle(rng.gen_range(0.0..TAU));
            let generic = horocycle_bracket(&g, &b);
            let closed = horocycle_bracket_disk(g.base_point_disk(), &b).unwrap();
            assert!((generic - closed).abs() <= 1e-11 * generic.abs().max(1.0));
        }
    }

    #[test]
    fn boundary_jacobian_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let g = random_element(&mut rng);
            let psi = rng.gen_range(0.0..TAU);
            let numeric = g.boundary_jacobian_numeric(psi, 1e-4);
            let closed = g.boundary_jacobian(psi);
            assert!(
                (numeric - closed).abs() <= 1e-7 * closed.abs().max(1.0),
                "jacobian mismatch {numeric} vs {closed}"
            );
        }
    }

    #[test]
    fn lie_vector_norm_matches_trace_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..200 {
            let y = LieVector::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let m = y.matrix();
            let trace_form = 2.0
                * (m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1]);
            assert!((y.norm_sq() - trace_form).abs() <= 1e-12 * trace_form.max(1.0));
            assert!((m[0][0] + m[1][1]).abs() == 0.0);
        }
    }

    #[test]
    fn unit_tangent_inverts_the_trivialization() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..300 {
            let g = random_element(&mut rng);
            let b = BoundaryPoint::from_angle(rng.gen_range(0.0..TAU));
            let v = unit_tangent_toward(&g, &b);
            // same base point, requested forward endpoint
            assert!((v.base_point_disk() - g.base_point_disk()).norm() <= 1e-12);
            assert!(v.boundary_plus().distance_to(&b) <= 1e-10);
        }
    }

    #[test]
    fn stationary_phase_characterization() {
        let b = BoundaryPoint::from_angle(0.7);
        let bp = BoundaryPoint::from_angle(3.6);
        let ts: Vec<f64> = (-5..=5).map(|k| 0.3 * k as f64).collect();
        let report = stationary_points_report(&b, &bp, &ts, 1.0, 1e-6).unwrap();
        for v in &report.on_geodesic {
            assert!(*v <= 1e-6, "gradient on geodesic {v:.3e}");
        }
        for v in &report.off_geodesic {
            assert!(*v >= 0.1, "gradient off geodesic {v:.3e}");
        }
        assert!(report.along_variation <= 1e-8);
    }
}
