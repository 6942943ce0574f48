//! Programmatic invariant suites: the same checks as the library's test
//! batteries, packaged for the command line with one PASS/FAIL line each.

use hyperharm::boundary::{
    eigen_residual, eigen_residual_with_exponent, equivariance_residual, BoundaryFunction,
    QuadratureOptions, SpectralPair,
};
use hyperharm::constants;
use hyperharm::error::Result;
use hyperharm::lie::{
    psi_inverse, stationary_points_report, BoundaryPoint, GroupElement, IwasawaCoords,
};
use hyperharm::pairings::{
    ps_product, ps_radon, wigner, wigner_via_op, OpRouteOptions, PairScheme, PhaseSpaceTest,
};
use hyperharm::transforms::{
    intertwine, intertwine_leading, j_kernel_direct, j_kernel_factorized, make_endpoint_cutoff,
    TransformOptions,
};
use num_complex::Complex64;
use std::f64::consts::PI;

pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

/// Deterministic low-discrepancy stream for sampled audits.
struct Halton {
    index: u64,
}

impl Halton {
    fn new(seed: u64) -> Self {
        Self { index: seed.max(1) }
    }

    fn next_base(&mut self, base: u64) -> f64 {
        let mut f = 1.0;
        let mut r = 0.0;
        let mut i = self.index;
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    }

    fn next4(&mut self) -> [f64; 4] {
        let out = [
            self.next_base(2),
            self.next_base(3),
            self.next_base(5),
            self.next_base(7),
        ];
        self.index += 1;
        out
    }
}

fn random_element(h: &mut Halton) -> GroupElement {
    loop {
        let [a, b, c, d] = h.next4();
        let (a, b, c, d) = (4.0 * a - 2.0, 4.0 * b - 2.0, 4.0 * c - 2.0, 4.0 * d - 2.0);
        if a * d - b * c > 0.05 {
            return GroupElement::from_entries(a, b, c, d).unwrap();
        }
    }
}

/// Structure-layer invariants: factorization, closed forms, flows.
pub fn structure_checks(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    let mut h = Halton::new(seed);

    let mut worst_recon: f64 = 0.0;
    let mut worst_alpha: f64 = 0.0;
    for _ in 0..10_000 {
        let g = random_element(&mut h);
        let co = g.iwasawa();
        worst_recon = worst_recon.max(co.reconstruct().distance_to(&g));
        worst_alpha = worst_alpha.max((g.alpha_a() - co.t_a).abs());
    }
    out.push(check(
        "iwasawa reconstruction (1e4 samples)",
        worst_recon <= 1e-12,
        format!("max error {worst_recon:.3e}"),
    ));
    out.push(check(
        "root functional consistency",
        worst_alpha <= 1e-12,
        format!("max error {worst_alpha:.3e}"),
    ));

    let mut worst_hyp: f64 = 0.0;
    let mut t = -10.0;
    while t <= 10.0 {
        let g = GroupElement::diagonal_flow(-t);
        let up = g.adjoint(&hyperharm::lie::LieVector::u_plus());
        let (_, p, m) = up.bruhat_coefficients();
        let rel = ((p - (-t).exp()) / (-t).exp()).abs().max(m.abs() / (-t).exp());
        worst_hyp = worst_hyp.max(rel);
        t += 0.25;
    }
    out.push(check(
        "flow hyperbolicity scaling, t in [-10, 10]",
        worst_hyp <= 1e-12,
        format!("max relative error {worst_hyp:.3e}"),
    ));

    let mut worst_round: f64 = 0.0;
    let mut worst_bracket: f64 = 0.0;
    for _ in 0..500 {
        let g = random_element(&mut h);
        let (b, bp) = g.boundary_maps();
        let back = psi_inverse(&b, &bp).unwrap();
        let (b2, bp2) = back.boundary_maps();
        worst_round = worst_round.max(b.distance_to(&b2).max(bp.distance_to(&bp2)));

        let [t1, t2, _, _] = h.next4();
        let a = GroupElement::diagonal_flow(3.0 * t1 - 1.5);
        let n = GroupElement::unipotent_upper(3.0 * t2 - 1.5);
        let gan = g.compose(&a).compose(&n);
        let lhs = hyperharm::lie::horocycle_bracket(&gan, &b);
        let rhs = g.compose(&a).rho_a();
        worst_bracket = worst_bracket.max((lhs - rhs).abs());
        let w = GroupElement::weyl();
        let lhs2 = hyperharm::lie::horocycle_bracket(&gan, &bp);
        let rhs2 = -n.inverse().compose(&w).rho_a() + g.compose(&a).compose(&w).rho_a();
        worst_bracket = worst_bracket.max((lhs2 - rhs2).abs());
    }
    out.push(check(
        "geodesic chart round trip",
        worst_round <= 1e-10,
        format!("max endpoint drift {worst_round:.3e}"),
    ));
    out.push(check(
        "orbit bracket reductions",
        worst_bracket <= 1e-10,
        format!("max defect {worst_bracket:.3e}"),
    ));
    out
}

/// Measure-layer invariants: the calibration identities.
pub fn measure_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let record = constants::calibrate()?;
    out.push(check(
        "kernel relation exponent = 2",
        (record.kernel_exponent - 2.0).abs() <= 1e-10 && record.kernel_exponent_spread <= 1e-10,
        format!(
            "measured {:.12} (spread {:.2e})",
            record.kernel_exponent, record.kernel_exponent_spread
        ),
    ));
    out.push(check(
        "group-measure density weight e^t",
        (record.haar_exponent - 1.0).abs() <= 1e-6,
        format!("measured coefficient {:.9}", record.haar_exponent),
    ));
    let worst_fact = record
        .factorization_residuals
        .iter()
        .cloned()
        .fold(0.0_f64, f64::max);
    out.push(check(
        "plane-measure factorization (3 bumps)",
        worst_fact <= 1e-8,
        format!("max two-sided residual {worst_fact:.3e}"),
    ));
    out.push(check(
        "geodesic-chart form of the group measure",
        record.hopf_residual <= 1e-6,
        format!("residual {:.3e}", record.hopf_residual),
    ));
    Ok(out)
}

/// Boundary-transform invariants: eigen equation, convention selection,
/// equivariance.
pub fn boundary_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let opts = QuadratureOptions::default();
    let samples = [
        Complex64::new(0.3, 0.2),
        Complex64::new(-0.2, 0.4),
        Complex64::new(0.1, -0.45),
        Complex64::new(-0.35, -0.15),
    ];
    let data = [
        BoundaryFunction::vonmises_bump(1.1, 5.0, Complex64::new(1.0, 0.3)),
        BoundaryFunction::vonmises_bump(2.7, 3.0, Complex64::new(0.6, -0.8)),
        BoundaryFunction::window_bump(4.0, 0.9, Complex64::new(1.0, 0.1)),
    ];
    let params = [
        Complex64::new(0.5, 5.0),
        Complex64::new(0.1, 3.0),
        Complex64::new(-0.3, 2.0),
    ];
    let mut worst_good: f64 = 0.0;
    let mut best_bad: f64 = f64::INFINITY;
    for t in &data {
        for &s0 in &params {
            worst_good = worst_good.max(eigen_residual(t, s0, &samples, &opts)?);
            best_bad = best_bad.min(eigen_residual_with_exponent(t, s0, &samples, 1.0, &opts)?);
        }
    }
    out.push(check(
        "eigen equation of the boundary transform (3 data x 3 parameters)",
        worst_good <= 1e-5,
        format!("max residual {worst_good:.3e}"),
    ));
    out.push(check(
        "kernel convention discriminator",
        worst_good <= 1e-5 && best_bad >= 1e-2,
        format!("selected {worst_good:.3e} vs rejected {best_bad:.3e}"),
    ));

    let mut h = Halton::new(7);
    let lam = Complex64::new(0.3, 4.0);
    let t = &data[0];
    let mut worst_eq: f64 = 0.0;
    for _ in 0..5 {
        let [a, b, c, d] = h.next4();
        let g = GroupElement::from_entries(
            1.0 + 0.6 * (a - 0.5),
            0.8 * (b - 0.5),
            0.8 * (c - 0.5),
            1.0 + 0.6 * (d - 0.5),
        )
        .unwrap();
        worst_eq = worst_eq.max(equivariance_residual(
            &g,
            t,
            lam,
            &samples[..2],
            &opts,
        )?);
    }
    out.push(check(
        "boundary-transform equivariance",
        worst_eq <= 1e-6,
        format!("max residual {worst_eq:.3e}"),
    ));
    Ok(out)
}

fn oracle_setup() -> Result<(PhaseSpaceTest, BoundaryFunction, BoundaryFunction)> {
    let u = PhaseSpaceTest::new(Complex64::new(0.08, 0.04), 0.55, 2.2, 0.3)?;
    let t = BoundaryFunction::window_bump(2.2, 0.65, Complex64::new(1.0, 0.25));
    let tp = BoundaryFunction::window_bump(2.2 + PI, 0.85, Complex64::new(0.8, -0.4));
    Ok((u, t, tp))
}

/// Small-r cross-checks between the independent routes.
pub fn oracle_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let (u, t, tp) = oracle_setup()?;
    let beta = make_endpoint_cutoff(u.as_compact().support(), 6)?;
    let opts = TransformOptions { rel_tol: 1e-10, ..Default::default() };

    // unipotent average against its brute-force oracle at r = 100
    let g = IwasawaCoords { theta: 2.2 / 2.0, t_a: 0.0, x_n: 0.0 }.reconstruct();
    let g = hyperharm::lie::unit_tangent_toward(&g, &BoundaryPoint::from_angle(2.2));
    let r = 100.0;
    let s0p = Complex64::new(0.15, -r);
    let (val, _) = intertwine(u.as_compact(), s0p, &g, &opts)?;
    let oracle = {
        let boxy = u.as_compact().support();
        let co = g.iwasawa();
        let lo = boxy.x_center - boxy.x_halfwidth - co.x_n;
        let hi = boxy.x_center + boxy.x_halfwidth - co.x_n;
        let weight = -0.5 * s0p.conj();
        hyperharm::quad::trapezoid_oracle(
            &|x| (weight * (1.0 + x * x).ln()).exp() * u.as_compact().eval(&g.horocycle_flow(x, true)),
            lo,
            hi,
            (1 << 22) + 1,
        ) * hyperharm::constants::n_density()
    };
    out.push(check(
        "unipotent average vs 2^22-node oracle at r = 100",
        (val - oracle).norm() <= 1e-8,
        format!("difference {:.3e}", (val - oracle).norm()),
    ));

    // leading-term deviation slope over a decade and a half
    let mut pts = Vec::new();
    for k in 0..6 {
        let rr = 20.0 * 2f64.powi(k);
        let s = Complex64::new(0.15, -rr);
        let (v, _) = intertwine(u.as_compact(), s, &g, &opts)?;
        let lead = intertwine_leading(u.as_compact(), rr, &g);
        pts.push((rr.ln(), ((v - lead) / lead).norm().ln()));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    out.push(check(
        "unipotent-average remainder decay slope",
        (-1.3..=-0.7).contains(&slope),
        format!("slope {slope:.3}"),
    ));

    // pair-kernel factorization against the direct plane integral
    for rr in [10.0, 30.0] {
        let sp = SpectralPair::new(0.25, -0.05, rr)?;
        let gq = IwasawaCoords { theta: 1.1, t_a: 0.2, x_n: 0.1 }.reconstruct();
        let (b, bp) = gq.boundary_maps();
        let (fac, _) = j_kernel_factorized(u.as_compact(), &sp, (&b, &bp), &beta, &opts)?;
        let (dir, _) = j_kernel_direct(u.as_compact(), &sp, (&b, &bp), &opts)?;
        let rel = (fac - dir).norm() / dir.norm();
        out.push(check(
            if rr < 20.0 {
                "pair-kernel factorization at r = 10"
            } else {
                "pair-kernel factorization at r = 30"
            },
            rel <= 1e-5,
            format!("relative difference {rel:.3e}"),
        ));
    }

    // the two quantization routes
    for rr in [4.0, 8.0] {
        let sp = SpectralPair::new(0.3, -0.05, rr)?;
        let w1 = wigner(&t, &tp, &sp, u.as_compact(), &beta, PairScheme::Grid { n: 96 }, &opts)?;
        let w2 = wigner_via_op(&t, &tp, &sp, u.as_compact(), &OpRouteOptions::default())?;
        let rel = (w1.value - w2.value).norm() / w1.value.norm();
        out.push(check(
            if rr < 6.0 {
                "quantization route agreement at r = 4"
            } else {
                "quantization route agreement at r = 8"
            },
            rel <= 1e-6,
            format!("relative difference {rel:.3e}"),
        ));
    }

    // the two orbit-pairing routes
    for rr in [6.0, 10.0] {
        let sp = SpectralPair::new(0.3, -0.05, rr)?;
        let p1 = ps_radon(&t, &tp, &sp, u.as_compact(), PairScheme::Grid { n: 128 }, &opts)?;
        let p2 = ps_product(&t, &tp, &sp, u.as_compact(), 14)?;
        let rel = (p1.value - p2.value).norm() / p1.value.norm();
        out.push(check(
            if rr < 8.0 {
                "orbit-pairing route agreement at r = 6"
            } else {
                "orbit-pairing route agreement at r = 10"
            },
            rel <= 1e-6,
            format!("relative difference {rel:.3e}"),
        ));
    }

    // stationary set of the pair phase
    let b = BoundaryPoint::from_angle(0.7);
    let bp = BoundaryPoint::from_angle(3.6);
    let ts: Vec<f64> = (-5..=5).map(|k| 0.3 * k as f64).collect();
    let rep = stationary_points_report(&b, &bp, &ts, 1.0, 1e-6)?;
    let on = rep.on_geodesic.iter().cloned().fold(0.0_f64, f64::max);
    let off = rep.off_geodesic.iter().cloned().fold(f64::INFINITY, f64::min);
    out.push(check(
        "pair-phase stationary set",
        on <= 1e-6 && off >= 0.1 && rep.along_variation <= 1e-8,
        format!(
            "on-orbit gradient {on:.2e}, off-orbit {off:.2e}, variation {:.2e}",
            rep.along_variation
        ),
    ));
    Ok(out)
}

/// Everything, in a fixed order.
pub fn all_checks(seed: u64) -> Result<Vec<Check>> {
    let mut out = structure_checks(seed);
    out.extend(measure_checks()?);
    out.extend(boundary_checks()?);
    out.extend(oracle_checks()?);
    Ok(out)
}
