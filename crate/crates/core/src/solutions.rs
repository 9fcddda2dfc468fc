//! Reference solutions with exact partial derivatives.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{Family, FamilySpec, Point};
use crate::group::Mat2;
use crate::multiplier::{guarded_exp, inverse_quadratic_multiplier};
use crate::scalar::{re, Scalar, C64};
use crate::smooth::{Domain, ExpPoly, ExpTerm, SmoothFn};

const I: C64 = C64::new(0.0, 1.0);

fn need(spec: &FamilySpec, family: Family) -> Result<()> {
    if spec.family != family {
        return Err(Error::Parameter(format!(
            "expected the {} family, got {}",
            family.name(),
            spec.family.name()
        )));
    }
    spec.validate()
}

/// Heat kernel `(4πk(t + t₀))^{−1/2} exp{−x²/(4k(t + t₀))}`.
pub fn gaussian_free(k: C64, t0: f64) -> Result<SmoothFn> {
    if k == re(0.0) {
        return Err(Error::ZeroK);
    }
    let f = move |t: &crate::jet::Jet, x: &[crate::jet::Jet]| {
        let tau = t.clone() + re(t0);
        let e = x[0].square() / tau.clone() * (-1.0 / (4.0 * k));
        Ok((tau * (4.0 * PI * k)).sqrt().recip() * guarded_exp(e)?)
    };
    Ok(SmoothFn::new(
        format!("gaussian(t0={t0})"),
        1,
        Domain::t_above(-t0),
        f,
    ))
}

/// Static solution `x^s` of the inverse-square equation with `α = s(s − 1)`.
pub fn power_static(s: f64, alpha: f64) -> Result<SmoothFn> {
    if (s * (s - 1.0) - alpha).abs() > 1e-12 * (1.0 + alpha.abs()) {
        return Err(Error::Parameter(format!(
            "s(s-1) = {} differs from alpha = {alpha}",
            s * (s - 1.0)
        )));
    }
    Ok(SmoothFn::new(
        format!("x^{s}"),
        1,
        Domain::x_positive(),
        move |_, x| Ok(x[0].powc(re(s))),
    ))
}

/// `k` for which the theta series solves the free equation.
pub fn theta_k() -> C64 {
    C64::new(0.0, -1.0 / (4.0 * PI))
}

/// Truncated `θ₁(x|t) = i Σ (−1)ⁿ exp{iπ(n − ½)²t + iπ(2n − 1)x}` over
/// `n = −N+1, …, N`; solves `4πi ∂ₜθ₁ = ∂ₓ²θ₁` on `Im t > 0`.
pub fn theta1(trunc: usize) -> Result<SmoothFn> {
    if trunc < 10 {
        return Err(Error::Parameter(format!(
            "theta truncation {trunc} is below 10"
        )));
    }
    let n_max = trunc as i64;
    let f = move |t: &crate::jet::Jet, x: &[crate::jet::Jet]| {
        let (tv, xv) = (t.value(), x[0].value());
        let m = n_max as f64 + 0.5;
        let tail = 2.0 * (-PI * m * m * tv.im + PI * 2.0 * m * xv.im.abs()).exp();
        if !(tail <= 1e-12) {
            return Err(Error::Convergence(tail));
        }
        let mut acc = t.lift(re(0.0));
        for n in (1 - n_max)..=n_max {
            let h = n as f64 - 0.5;
            let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let e = t.clone() * (I * PI * h * h) + x[0].clone() * (I * PI * (2 * n - 1) as f64);
            acc = acc + e.exp() * (I * sign);
        }
        Ok(acc)
    };
    Ok(SmoothFn::new(
        format!("theta1(N={trunc})"),
        1,
        Domain::upper_half_plane(),
        f,
    ))
}

/// `ε = K(Z|M) θ₁(MZ)/θ₁(Z)` for an integer unimodular `M`; `ε⁸ = 1`.
pub fn theta_modular_phase(m: &Mat2, z: &Point, trunc: usize) -> Result<C64> {
    if !m.is_real(0.0) || [m.a, m.b, m.c, m.d].iter().any(|v| v.re.fract() != 0.0) {
        return Err(Error::Parameter(
            "modular matrix must have integer entries".into(),
        ));
    }
    let theta = theta1(trunc)?;
    let zp = crate::action::act_inverse_quadratic(m, z)?;
    let kfac = inverse_quadratic_multiplier(m, theta_k(), &z.t, &z.x)?;
    Ok(kfac * theta.value(&zp)? / theta.value(z)?)
}

/// The pair `f₁`, `f₂` of linear-family solutions.
pub fn f_pair(spec: &FamilySpec) -> Result<(SmoothFn, SmoothFn)> {
    need(spec, Family::Linear)?;
    let (k, a, b) = (spec.k, spec.alpha, spec.beta);
    let k3b2 = k * k * k * b * b;
    let f1 = ExpPoly::new(vec![
        ExpTerm::new(-k * a, 1, 0),
        ExpTerm::new(-k * b, 1, 1),
        ExpTerm::new(k3b2 / 3.0, 3, 0),
    ]);
    let f2 = ExpPoly::new(vec![
        ExpTerm::new(-k * a, 1, 0),
        ExpTerm::new(-k * b / 2.0, 1, 1),
        ExpTerm::new(k3b2 / 12.0, 3, 0),
        ExpTerm::new(-1.0 / (4.0 * k), -1, 2),
    ])
    .with_prefactor(-0.5);
    Ok((
        f1.into_smooth("f1", Domain::everywhere()),
        f2.into_smooth("f2", Domain::t_positive()),
    ))
}

/// The pair `φ₁`, `φ₂` carrying linear-family solutions back to free ones.
/// Both `t³` coefficients carry `k³β²`.
pub fn phi_pair(spec: &FamilySpec) -> Result<(SmoothFn, SmoothFn)> {
    need(spec, Family::Linear)?;
    let (k, a, b) = (spec.k, spec.alpha, spec.beta);
    let k3b2 = k * k * k * b * b;
    let phi1 = ExpPoly::new(vec![
        ExpTerm::new(k * a, 1, 0),
        ExpTerm::new(k * b, 1, 1),
        ExpTerm::new(k3b2 * (2.0 / 3.0), 3, 0),
    ]);
    let phi2 = ExpPoly::new(vec![
        ExpTerm::new(-k * a, -1, 0),
        ExpTerm::new(-k3b2 * (2.0 / 3.0), -3, 0),
        ExpTerm::new(-k * b, -2, 1),
        ExpTerm::new(-1.0 / (4.0 * k), -1, 2),
    ])
    .with_prefactor(-0.5);
    let nonzero = Domain::new("t != 0", |z| z.t.norm() > 0.0);
    Ok((
        phi1.into_smooth("phi1", Domain::everywhere()),
        phi2.into_smooth("phi2", nonzero),
    ))
}

/// `g₁`, `g₂` and the coherent state `g₃(γ)` of the quadratic family.
///
/// `g₃ = exp{−k(α + ω)t − ωx²/2 + γx/√u − γ²/(4ωu)}` with `u = e^{4kωt}`,
/// so that `T₂g₃ = γg₃` and `g₃|_{γ=0} = g₂`.
pub fn g_functions(spec: &FamilySpec, gamma: C64) -> Result<(SmoothFn, SmoothFn, SmoothFn)> {
    need(spec, Family::Quadratic)?;
    let (k, a, w) = (spec.k, spec.alpha, spec.omega);
    let kw = k * w;
    let g1 = ExpPoly::new(vec![
        ExpTerm::new(k * (w - a), 1, 0),
        ExpTerm::new(w / 2.0, 0, 2),
    ]);
    let g2 = ExpPoly::new(vec![
        ExpTerm::new(-k * (w + a), 1, 0),
        ExpTerm::new(-w / 2.0, 0, 2),
    ]);
    let g3 = ExpPoly::new(vec![
        ExpTerm::new(-k * (w + a), 1, 0),
        ExpTerm::new(-w / 2.0, 0, 2),
        ExpTerm::with_rate(gamma, 1, -2.0 * kw),
        ExpTerm::with_rate(-gamma * gamma / (4.0 * w), 0, -4.0 * kw),
    ]);
    Ok((
        g1.into_smooth("g1", Domain::everywhere()),
        g2.into_smooth("g2", Domain::everywhere()),
        g3.into_smooth(format!("g3(gamma={gamma})"), Domain::everywhere()),
    ))
}

/// Product solution `Π f₁(t, x_j) · Π_{i<j} (x_i − x_j)^s` of the n-body
/// linear family with uniform pair coupling `a = s(s − 1)`.
pub fn pair_product_solution(spec: &FamilySpec) -> Result<SmoothFn> {
    need(spec, Family::NdimLinear)?;
    let n = spec.n;
    let a = if n > 1 { spec.ajk(0, 1) } else { 0.0 };
    for j in 0..n {
        for i in 0..n {
            if i != j && spec.ajk(i, j) != a {
                return Err(Error::Parameter(
                    "pair product solution needs uniform a_jk".into(),
                ));
            }
        }
    }
    if 1.0 + 4.0 * a < 0.0 {
        return Err(Error::Parameter(format!("a = {a} admits no real exponent")));
    }
    let s = (1.0 + (1.0 + 4.0 * a).sqrt()) / 2.0;
    let lin = FamilySpec::linear(spec.k, spec.alpha, spec.beta);
    let (f1, _) = f_pair(&lin)?;
    let f = move |t: &crate::jet::Jet, x: &[crate::jet::Jet]| {
        let mut acc = t.lift(re(1.0));
        for xj in x {
            acc = acc * f1.eval_jets(t, std::slice::from_ref(xj))?;
        }
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                acc = acc * (x[i].clone() - x[j].clone()).powc(re(s));
            }
        }
        Ok(acc)
    };
    Ok(SmoothFn::new(
        format!("pair-product(s={s})"),
        n,
        Domain::ordered(),
        f,
    ))
}

/// Plane wave `A exp{ip·x + k(λA² − |p|²)t}` of the two-dimensional
/// nonlinear equation.
pub fn plane_wave_nls(amplitude: f64, p: [f64; 2], spec: &FamilySpec) -> Result<SmoothFn> {
    need(spec, Family::Nls2d)?;
    if spec.k.re.abs() > 1e-14 * spec.k.norm() {
        return Err(Error::Parameter(
            "nonlinear symmetry needs purely imaginary k".into(),
        ));
    }
    let rate = spec.k * (spec.nls_lambda * amplitude * amplitude - p[0] * p[0] - p[1] * p[1]);
    let f = move |t: &crate::jet::Jet, x: &[crate::jet::Jet]| {
        let e = x[0].clone() * (I * p[0]) + x[1].clone() * (I * p[1]) + t.clone() * rate;
        Ok(guarded_exp(e)? * re(amplitude))
    };
    Ok(SmoothFn::new(
        format!("plane-wave(A={amplitude})"),
        2,
        Domain::everywhere(),
        f,
    ))
}

/// Quadrature set-up for the linear-potential bound state
/// `u(x) = ∫ exp{iz(t + iδ) + iβ²(t + iδ)³/3} dt`, `z = α + βx`.
///
/// The line `Im τ = δ` can be moved freely for `δ > 0`; on it the integrand
/// decays like `exp(−β²δt²)`, so the trapezoid rule on `[−T, T]` converges
/// geometrically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AirySpec {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub half_width: f64,
    pub step: f64,
}

impl AirySpec {
    pub fn new(alpha: f64, beta: f64) -> Self {
        let delta = 1.0;
        let half_width = (45.0 / (beta * beta * delta)).sqrt();
        AirySpec {
            alpha,
            beta,
            delta,
            half_width,
            step: 0.01,
        }
    }

    /// Eigenvalue `E = −α` of `−u″ + βxu = Eu`.
    pub fn energy(&self) -> f64 {
        -self.alpha
    }

    pub fn with_energy(mut self, e: f64) -> Self {
        self.alpha = -e;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self.half_width = (45.0 / (self.beta * self.beta * delta)).sqrt();
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(Error::Parameter("beta must be positive".into()));
        }
        if !(self.delta > 0.0 && self.step > 0.0 && self.half_width > 0.0) {
            return Err(Error::Parameter(
                "quadrature parameters must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Trapezoid rule for `∫ exp{izτ + iβ²τ³/3} dt`, `τ = t + iδ`, generic in `z`.
pub fn airy_integral<S: Scalar>(spec: &AirySpec, z: &S) -> Result<S> {
    spec.validate()?;
    let b2 = spec.beta * spec.beta;
    let phase = |tau: C64| I * b2 * tau * tau * tau / 3.0;
    let edge = C64::new(spec.half_width, spec.delta);
    let tail_mag = (I * z.value() * edge + phase(edge)).exp().norm()
        / (2.0 * b2 * spec.delta * spec.half_width);
    let tail = 2.0 * tail_mag;
    if !(tail <= 1e-8) {
        return Err(Error::Quadrature(tail));
    }
    let n = (spec.half_width / spec.step).ceil() as i64;
    let h = spec.half_width / n as f64;
    let mut acc = z.lift(re(0.0));
    for j in -n..=n {
        let tau = C64::new(j as f64 * h, spec.delta);
        let w = if j.abs() == n { 0.5 * h } else { h };
        acc = acc + (z.clone() * (I * tau) + phase(tau)).exp() * re(w);
    }
    Ok(acc)
}

/// `u(x)` as a function of `(t, x)` that ignores `t`.
pub fn airy_u(spec: AirySpec) -> Result<SmoothFn> {
    spec.validate()?;
    let f = move |_: &crate::jet::Jet, x: &[crate::jet::Jet]| {
        let z = x[0].clone() * re(spec.beta) + re(spec.alpha);
        airy_integral(&spec, &z)
    };
    Ok(SmoothFn::new(
        format!("airy(E={})", spec.energy()),
        1,
        Domain::everywhere(),
        f,
    ))
}

/// `−u″ + βxu − Eu` at `x`.
pub fn airy_residual(spec: &AirySpec, x: f64) -> Result<C64> {
    let u = airy_u(*spec)?;
    let jet = u.jet(&Point::tx(0.0, x), 2)?;
    Ok(-jet.partial(&[0, 2]) + (spec.beta * x - spec.energy()) * jet.value())
}

/// `u(0)` as a function of `E`.
pub fn airy_boundary(spec: &AirySpec, e: f64) -> Result<f64> {
    Ok(airy_integral(&spec.with_energy(e), &re(-e))?.re)
}

/// Roots of `u(0; E) = 0` in `[lo, hi]` by bracketing on a uniform scan
/// followed by bisection.
pub fn eigenvalue_scan(spec: &AirySpec, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(hi > lo) {
        return Err(Error::Parameter(format!("empty energy range [{lo}, {hi}]")));
    }
    let cells = ((hi - lo) / 0.05).ceil().max(1.0) as usize;
    let de = (hi - lo) / cells as f64;
    let mut roots = Vec::new();
    let mut e0 = lo;
    let mut g0 = airy_boundary(spec, e0)?;
    for i in 1..=cells {
        let e1 = lo + i as f64 * de;
        let g1 = airy_boundary(spec, e1)?;
        if g0 == 0.0 {
            roots.push(e0);
        } else if g0 * g1 < 0.0 {
            let (mut a, mut b, mut ga) = (e0, e1, g0);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                let gm = airy_boundary(spec, m)?;
                if ga * gm <= 0.0 {
                    b = m;
                } else {
                    a = m;
                    ga = gm;
                }
                if b - a < 1e-13 {
                    break;
                }
            }
            roots.push(0.5 * (a + b));
        }
        e0 = e1;
        g0 = g1;
    }
    if roots.is_empty() {
        return Err(Error::NoRoot { lo, hi });
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heat_residual(f: &SmoothFn, k: C64, z: &Point) -> C64 {
        let j = f.jet(z, 2).unwrap();
        j.partial(&[1, 0]) - k * j.partial(&[0, 2])
    }

    #[test]
    fn gaussian_solves_heat_and_schroedinger() {
        let g = gaussian_free(re(1.0), 0.0).unwrap();
        assert!(heat_residual(&g, re(1.0), &Point::tx(1.0, 0.5)).norm() < 1e-12);
        assert_eq!(
            g.value(&Point::tx(1.0, 0.5)).unwrap(),
            g.value(&Point::tx(1.0, -0.5)).unwrap()
        );
        let k = C64::new(0.0, -0.5);
        let g = gaussian_free(k, 0.0).unwrap();
        assert!(heat_residual(&g, k, &Point::tx(0.7, 0.3)).norm() < 1e-12);
    }

    #[test]
    fn static_powers() {
        let z = Point::tx(0.0, 1.7);
        for (s, a) in [(1.0, 0.0), (2.0, 2.0)] {
            let f = power_static(s, a).unwrap();
            let j = f.jet(&z, 2).unwrap();
            let r = -j.partial(&[0, 2]) + a / (1.7 * 1.7) * j.value();
            assert!(r.norm() < 1e-12);
        }
        assert!(power_static(2.0, 1.0).is_err());
        assert!(power_static(2.0, 2.0)
            .unwrap()
            .value(&Point::tx(0.0, -1.0))
            .is_err());
    }

    #[test]
    fn theta_series() {
        let th = theta1(20).unwrap();
        let z = Point::new(I, vec![re(0.3)]);
        let r = heat_residual(&th, theta_k(), &z);
        assert!(r.norm() < 1e-10, "residual {r}");
        let minus = Point::new(I, vec![re(-0.3)]);
        assert!((th.value(&z).unwrap() + th.value(&minus).unwrap()).norm() < 1e-14);
        let s = Mat2::real(0.0, -1.0, 1.0, 0.0);
        let eps =
            theta_modular_phase(&s, &Point::new(C64::new(0.2, 1.1), vec![re(0.3)]), 40).unwrap();
        assert!((eps.powi(8) - 1.0).norm() < 1e-8, "eps {eps}");
        assert!(theta1(5).is_err());
        let shallow = Point::new(C64::new(0.0, 1e-3), vec![re(0.1)]);
        assert!(matches!(th.value(&shallow), Err(Error::Convergence(_))));
    }

    #[test]
    fn f_pair_membership_and_limits() {
        let spec = FamilySpec::linear(re(1.0), 0.0, 1.0);
        let (f1, f2) = f_pair(&spec).unwrap();
        let z = Point::tx(1.0, 0.7);
        for f in [&f1, &f2] {
            let j = f.jet(&z, 2).unwrap();
            let r = j.partial(&[1, 0]) - j.partial(&[0, 2]) + 0.7 * j.value();
            assert!(r.norm() < 1e-12);
        }
        let flat = FamilySpec::linear(re(1.0), 0.4, 0.0);
        let (f1, _) = f_pair(&flat).unwrap();
        assert!((f1.value(&Point::tx(2.0, 5.0)).unwrap() - (-0.8f64).exp()).norm() < 1e-15);
        let (phi1, _) = phi_pair(&flat).unwrap();
        let z = Point::tx(1.3, -0.2);
        assert!((phi1.value(&z).unwrap() * f1.value(&z).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn g_functions_solve_quadratic_family() {
        let spec = FamilySpec::quadratic(re(1.0), 0.0, re(1.0));
        let (g1, g2, g3) = g_functions(&spec, C64::new(0.4, -0.2)).unwrap();
        let z = Point::tx(0.2, 0.4);
        for g in [&g1, &g2, &g3] {
            let j = g.jet(&z, 2).unwrap();
            let r = j.partial(&[1, 0]) - j.partial(&[0, 2]) + 0.16 * j.value();
            assert!(r.norm() < 1e-12, "{}: {r}", g.name());
        }
        let (_, g2, g30) = g_functions(&spec, re(0.0)).unwrap();
        assert_eq!(g2.value(&z).unwrap(), g30.value(&z).unwrap());
    }

    #[test]
    fn plane_wave_amplitude_zero() {
        let spec = FamilySpec::nls2d(C64::new(0.0, 1.0), 2.0);
        let f = plane_wave_nls(0.0, [0.3, 0.1], &spec).unwrap();
        assert_eq!(f.value(&Point::real(0.4, &[1.0, 2.0])).unwrap(), re(0.0));
        assert!(plane_wave_nls(1.0, [0.0, 0.0], &FamilySpec::nls2d(re(1.0), 1.0)).is_err());
    }

    #[test]
    fn airy_ode_and_decay() {
        let spec = AirySpec::new(-1.0, 1.0);
        assert!(airy_residual(&spec, 1.0).unwrap().norm() < 1e-6);
        let u = airy_u(spec).unwrap();
        let far = u.value(&Point::tx(0.0, 10.0)).unwrap().norm();
        let near = u.value(&Point::tx(0.0, 0.0)).unwrap().norm();
        assert!(far < 1e-3 * near);
    }

    #[test]
    fn airy_contour_independence() {
        let a = AirySpec::new(0.2, 1.3);
        let z = re(0.2 + 1.3 * 0.5);
        let u1 = airy_integral(&a, &z).unwrap();
        let u2 = airy_integral(&a.with_delta(0.6), &z).unwrap();
        assert!((u1 - u2).norm() < 1e-10);
        assert!(u1.im.abs() < 1e-10);
    }

    #[test]
    fn eigenvalue_brackets() {
        let spec = AirySpec::new(0.0, 1.0);
        let r = eigenvalue_scan(&spec, 1.0, 3.0).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 2.338107410459767).abs() < 1e-6);
        assert!(matches!(
            eigenvalue_scan(&spec, 0.0, 2.0),
            Err(Error::NoRoot { .. })
        ));
    }
}
