//! Multiplier functions `K(t, x|Λ)` for every family, the harmonic
//! intertwiner `K₀`, and an RK4 oracle for the structure equations of the
//! exponent coefficients.

use serde::{Deserialize, Serialize};

use crate::action::{nonsingular, quadratic_frame};
use crate::error::{Error, Result};
use crate::family::{Family, FamilySpec, Point};
use crate::group::{
    cocycle_linear, cocycle_quadratic, compose, GroupElement, Mat2, QuadraticCocycle,
};
use crate::scalar::{re, Scalar, C64};

/// Largest real part of an exponent before [`Error::Range`] is raised.
pub const EXP_LIMIT: f64 = 700.0;

pub(crate) fn guarded_exp<S: Scalar>(e: S) -> Result<S> {
    let v = e.value();
    if v.re > EXP_LIMIT || !v.re.is_finite() {
        return Err(Error::Range(v.re));
    }
    Ok(e.exp())
}

/// `K = prefactor · exp(A + Bx + Cx²)` together with the affine coordinate
/// data `x′ = ξx + f` and `φ̇ = ξ²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierParts<S> {
    pub a: S,
    pub b: S,
    pub c: S,
    pub xi: S,
    pub f: S,
    pub phidot: S,
    /// `1/√(at+b)` (linear) or `√ξ` (quadratic).
    pub prefactor: S,
}

impl<S: Scalar> MultiplierParts<S> {
    /// `K` at coordinate `x`.
    pub fn eval(&self, x: &S) -> Result<S> {
        let e = self.a.clone() + self.b.clone() * x.clone() + self.c.clone() * x.square();
        Ok(self.prefactor.clone() * guarded_exp(e)?)
    }

    /// `A` with the prefactor folded in: `ln K = A_total + Bx + Cx²`.
    pub fn total_a(&self) -> S {
        self.a.clone() + self.prefactor.ln()
    }
}

/// Exponent parts of the linear-potential multiplier at time `t`.
pub fn linear_parts<S: Scalar>(
    l: &GroupElement,
    k: C64,
    alpha: f64,
    beta: f64,
    t: &S,
) -> Result<MultiplierParts<S>> {
    if k == re(0.0) {
        return Err(Error::ZeroK);
    }
    let (a, b, mu, nu) = (l.a(), l.b(), l.mu, l.nu);
    let p = t.clone() * a + l.b();
    nonsingular("at+b", p.value())?;
    let q = t.clone() * l.c() + l.d();
    let pinv = p.recip();
    let w = q * pinv.clone(); // q/p
    let t2 = t.square();
    let t3 = t2.clone() * t.clone();

    let c_part = pinv.clone() * (-a / (4.0 * k));
    let b_part = pinv.clone() * (-nu / (2.0 * k))
        + (w.clone() * pinv.clone() * re(2.0) - t.clone() - t.clone() * pinv.clone() * b)
            * (k * beta / 2.0);
    let a_part = (w.clone() - t.clone()) * (alpha * k)
        + w.clone() * (nu * nu / (4.0 * k))
        + (w.clone() * mu - (w.square() - t2.clone() * pinv.clone() * re(0.5)) * nu) * (k * beta)
        + (w.powi(3) * re(2.0 / 3.0) + t3.clone() * re(1.0 / 12.0) + t3 * pinv.clone() * (b / 4.0)
            - t2.clone() * w.clone() * pinv.clone())
            * (k * k * k * beta * beta)
        + (-mu * nu / (4.0 * k));
    let xi = pinv.clone();
    let f = w.clone() * (-nu) + (w.square() - t2 * pinv.clone()) * (k * k * beta) + mu;
    Ok(MultiplierParts {
        a: a_part,
        b: b_part,
        c: c_part,
        phidot: xi.square(),
        xi,
        f,
        prefactor: p.sqrt().recip(),
    })
}

/// Exponent parts of the quadratic-potential multiplier at time `t`.
pub fn quadratic_parts<S: Scalar>(
    l: &GroupElement,
    spec: &FamilySpec,
    t: &S,
) -> Result<MultiplierParts<S>> {
    let fr = quadratic_frame(l, spec, t)?;
    let w = spec.omega;
    let (mu, nu) = (l.mu, l.nu);
    let q_over_p = fr.q.clone() / fr.p.clone();
    let p_over_q = q_over_p.recip();
    let a_part = fr.log_ratio.clone() * re(spec.alpha) / (4.0 * w)
        + (q_over_p * (nu * nu) - p_over_q * (mu * mu)) * (w / 2.0);
    let b_part = (fr.s.clone() / fr.p.clone() * nu + fr.s.clone() / fr.q.clone() * mu) * w;
    let c_part = (fr.p.recip() * l.b() + fr.q.recip() * l.d() - re(1.0)) * (w / 2.0);
    Ok(MultiplierParts {
        a: a_part,
        b: b_part,
        c: c_part,
        phidot: fr.xi.square(),
        prefactor: fr.xi.sqrt(),
        xi: fr.xi,
        f: fr.f,
    })
}

/// `(at + b)^{−n/2} exp{−a|x|²/(4k(at + b))}` on generic scalars.
pub fn inverse_quadratic_multiplier<S: Scalar>(m: &Mat2, k: C64, t: &S, x: &[S]) -> Result<S> {
    if k == re(0.0) {
        return Err(Error::ZeroK);
    }
    let p = t.clone() * m.a + m.b;
    nonsingular("at+b", p.value())?;
    let r2 = x.iter().fold(t.lift(re(0.0)), |acc, xj| acc + xj.square());
    let e = r2 * p.recip() * (-m.a / (4.0 * k));
    Ok(p.powc(re(-(x.len() as f64) / 2.0)) * guarded_exp(e)?)
}

/// Product of one-dimensional linear multipliers over all coordinates.
fn product_linear<S: Scalar>(
    l: &GroupElement,
    k: C64,
    alpha: f64,
    beta: f64,
    t: &S,
    x: &[S],
) -> Result<S> {
    let parts = linear_parts(l, k, alpha, beta, t)?;
    let mut acc = t.lift(re(1.0));
    for xj in x {
        acc = acc * parts.eval(xj)?;
    }
    Ok(acc)
}

/// Family dispatch of `K(t, x|Λ)` on generic scalars.
pub fn family_multiplier<S: Scalar>(
    l: &GroupElement,
    spec: &FamilySpec,
    t: &S,
    x: &[S],
) -> Result<S> {
    match spec.family {
        Family::InverseQuadratic => {
            if l.mu != re(0.0) || l.nu != re(0.0) {
                return Err(Error::Domain(
                    "inverse-quadratic family admits no translations".into(),
                ));
            }
            inverse_quadratic_multiplier(&l.m, spec.k, t, x)
        }
        Family::Free | Family::Nls2d => product_linear(l, spec.k, 0.0, 0.0, t, x),
        Family::Linear | Family::NdimLinear => {
            product_linear(l, spec.k, spec.alpha, spec.beta, t, x)
        }
        Family::Quadratic => quadratic_parts(l, spec, t)?.eval(&x[0]),
    }
}

pub fn k_inverse_quadratic(m: &Mat2, z: &Point, k: C64) -> Result<C64> {
    inverse_quadratic_multiplier(m, k, &z.t, &z.x)
}

pub fn k_linear(l: &GroupElement, z: &Point, spec: &FamilySpec) -> Result<C64> {
    linear_parts(l, spec.k, spec.alpha, spec.beta, &z.t)?.eval(&z.x[0])
}

pub fn k_quadratic(l: &GroupElement, z: &Point, spec: &FamilySpec) -> Result<C64> {
    quadratic_parts(l, spec, &z.t)?.eval(&z.x[0])
}

pub fn k_ndim(l: &GroupElement, z: &Point, spec: &FamilySpec) -> Result<C64> {
    let (alpha, beta) = match spec.family {
        Family::Nls2d | Family::Free => (0.0, 0.0),
        _ => (spec.alpha, spec.beta),
    };
    product_linear(l, spec.k, alpha, beta, &z.t, &z.x)
}

/// Cocycle `ω(Λ, Λ′)` appropriate to the family (zero where the
/// representation is a true one).
pub fn family_cocycle(
    l1: &GroupElement,
    l2: &GroupElement,
    spec: &FamilySpec,
    variant: QuadraticCocycle,
) -> Result<C64> {
    Ok(match spec.family {
        Family::InverseQuadratic => re(0.0),
        Family::Quadratic => cocycle_quadratic(l1, l2, spec.omega, variant)?.value(),
        Family::Linear => cocycle_linear(l1, l2, spec.k)?.value(),
        Family::Free | Family::NdimLinear | Family::Nls2d => {
            cocycle_linear(l1, l2, spec.k)?.value() * spec.n as f64
        }
    })
}

/// Relative defect of `K(Z|Λ′)K(Λ′Z|Λ) = exp{ω(Λ, Λ′)} K(Z|ΛΛ′)`.
pub fn cocycle_product_defect(
    l1: &GroupElement,
    l2: &GroupElement,
    z: &Point,
    spec: &FamilySpec,
    variant: QuadraticCocycle,
) -> Result<f64> {
    let inner = family_multiplier(l2, spec, &z.t, &z.x)?;
    let z2 = crate::action::act(l2, z, spec)?;
    let outer = family_multiplier(l1, spec, &z2.t, &z2.x)?;
    let direct = family_multiplier(&compose(l1, l2), spec, &z.t, &z.x)?;
    let w = family_cocycle(l1, l2, spec, variant)?;
    let lhs = inner * outer;
    let rhs = w.exp() * direct;
    Ok((lhs - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE))
}

/// Picks the quadratic cocycle variant whose multiplier product check has
/// the smaller worst-case defect over the given samples.
pub fn select_quadratic_cocycle(
    samples: &[(GroupElement, GroupElement, Point)],
    spec: &FamilySpec,
) -> Result<(QuadraticCocycle, f64, f64)> {
    let worst = |variant| -> Result<f64> {
        samples.iter().try_fold(0.0f64, |acc, (l1, l2, z)| {
            Ok(acc.max(cocycle_product_defect(l1, l2, z, spec, variant)?))
        })
    };
    let printed = worst(QuadraticCocycle::Printed)?;
    let corrected = worst(QuadraticCocycle::Corrected)?;
    let pick = if corrected <= printed {
        QuadraticCocycle::Corrected
    } else {
        QuadraticCocycle::Printed
    };
    Ok((pick, printed, corrected))
}

/// `σ, τ, λ` of the free-to-harmonic intertwiner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntertwinerParams {
    pub sigma: C64,
    pub tau: C64,
    pub lam: C64,
}

impl Default for IntertwinerParams {
    fn default() -> Self {
        IntertwinerParams {
            sigma: re(1.0),
            tau: re(0.0),
            lam: re(0.0),
        }
    }
}

/// Coordinates `(t′, x′)` and `K₀` of the free-to-harmonic intertwiner on
/// generic scalars.
pub fn intertwiner_map<S: Scalar>(
    p: &IntertwinerParams,
    spec: &FamilySpec,
    t: &S,
    x: &S,
) -> Result<(S, S, S)> {
    if p.sigma == re(0.0) {
        return Err(Error::Parameter("sigma must be nonzero".into()));
    }
    let kw = spec.k_omega();
    if kw == re(0.0) {
        return Err(Error::ZeroOmega);
    }
    let w = spec.omega;
    let quarter = (t.clone() * kw).exp(); // u^{1/4}
    let s = quarter.square(); // √u
    let u = s.square();
    let den = u.clone() + p.lam;
    nonsingular("u+lambda", den.value())?;
    let inv = den.recip();
    let tp = inv.clone() * (-p.sigma * p.sigma / (4.0 * kw));
    let xp =
        s.clone() * x.clone() * inv.clone() * p.sigma - inv.clone() * (p.sigma * p.tau / (2.0 * w));
    let a0 = inv.clone() * (-p.tau * p.tau / (4.0 * w)) - t.clone() * (spec.k * spec.alpha);
    let b0 = s * inv.clone() * p.tau;
    let c0 = (-u.clone() + p.lam) * inv.clone() * (w / 2.0);
    let e = a0 + b0 * x.clone() + c0 * x.square();
    let k0 = quarter * den.sqrt().recip() * guarded_exp(e)?;
    Ok((tp, xp, k0))
}

pub fn k0_intertwiner(p: &IntertwinerParams, z: &Point, spec: &FamilySpec) -> Result<(Point, C64)> {
    let (t, x, k0) = intertwiner_map(p, spec, &z.t, &z.x[0])?;
    Ok((Point { t, x: vec![x] }, k0))
}

/// RK4 step used by the oracle.
pub const ORACLE_STEP: f64 = 1e-4;

/// Integrates the structure equations for `(A_total, B, C)` from the first
/// grid time, seeded by the closed forms, and returns the integrated parts at
/// every grid time (`ξ`, `f`, `φ̇`, prefactor from the closed forms; `a` is
/// the total log coefficient).
pub fn ode_oracle_coefficients(
    l: &GroupElement,
    spec: &FamilySpec,
    t_grid: &[f64],
) -> Result<Vec<MultiplierParts<C64>>> {
    if t_grid.is_empty() {
        return Ok(Vec::new());
    }
    let k = spec.k;
    let alpha = spec.alpha;
    let closed = |t: f64| -> Result<MultiplierParts<C64>> {
        match spec.family {
            Family::Linear => linear_parts(l, k, alpha, spec.beta, &re(t)),
            Family::Quadratic => quadratic_parts(l, spec, &re(t)),
            other => Err(Error::Parameter(format!(
                "no structure equations for {} family",
                other.name()
            ))),
        }
    };
    let rhs = |t: f64, y: [C64; 3]| -> Result<[C64; 3]> {
        let parts = closed(t)?;
        let (xi, f) = (parts.xi, parts.f);
        let [_, b, c] = y;
        let da = k * (b * b + 2.0 * c) + k * alpha * (xi * xi - 1.0);
        Ok(match spec.family {
            Family::Linear => {
                let beta = spec.beta;
                [
                    da + k * beta * xi * xi * f,
                    4.0 * k * b * c + k * beta * (xi * xi * xi - 1.0),
                    4.0 * k * c * c,
                ]
            }
            _ => {
                let w2 = spec.omega * spec.omega;
                [
                    da + k * w2 * xi * xi * f * f,
                    4.0 * k * b * c + 2.0 * k * w2 * xi * xi * xi * f,
                    4.0 * k * c * c + k * w2 * (xi.powi(4) - 1.0),
                ]
            }
        })
    };

    let first = closed(t_grid[0])?;
    let mut y = [first.total_a(), first.b, first.c];
    let mut t = t_grid[0];
    let mut out = Vec::with_capacity(t_grid.len());
    for &target in t_grid {
        let span = target - t;
        let steps = (span.abs() / ORACLE_STEP).ceil() as usize;
        if steps > 0 {
            let h = span / steps as f64;
            for _ in 0..steps {
                let k1 = rhs(t, y)?;
                let k2 = rhs(t + h / 2.0, add(y, k1, h / 2.0))?;
                let k3 = rhs(t + h / 2.0, add(y, k2, h / 2.0))?;
                let k4 = rhs(t + h, add(y, k3, h))?;
                for i in 0..3 {
                    y[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
                }
                t += h;
                if y.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                    return Err(Error::Integration(format!("non-finite state at t = {t}")));
                }
            }
        }
        t = target;
        let c = closed(target)?;
        out.push(MultiplierParts {
            a: y[0],
            b: y[1],
            c: y[2],
            ..c
        });
    }
    Ok(out)
}

fn add(y: [C64; 3], k: [C64; 3], h: f64) -> [C64; 3] {
    [y[0] + k[0] * h, y[1] + k[1] * h, y[2] + k[2] * h]
}
