//! Coordinate actions `Λ·Z = {t′, x′}` for each potential family.
//!
//! Each action exists in a generic form over [`Scalar`] (used when building
//! transformed functions on jets) and a plain form over [`Point`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{Family, FamilySpec, Point};
use crate::group::{is_disk_shaped, GroupElement, Mat2};
use crate::scalar::{re, Scalar, C64};

/// Threshold below which `|at + b|` (or `|au + b|`) counts as singular.
pub const SINGULAR_TOL: f64 = 1e-14;

pub(crate) fn nonsingular(what: &'static str, z: C64) -> Result<()> {
    let modulus = z.norm();
    if modulus < SINGULAR_TOL || !modulus.is_finite() {
        return Err(Error::SingularTime { what, modulus });
    }
    Ok(())
}

/// `t′ = (ct + d)/(at + b)`, `x′ = x/(at + b)`.
pub fn inverse_quadratic_map<S: Scalar>(m: &Mat2, t: &S, x: &[S]) -> Result<(S, Vec<S>)> {
    let p = t.clone() * m.a + m.b;
    nonsingular("at+b", p.value())?;
    let q = t.clone() * m.c + m.d;
    let inv = p.recip();
    let xs = x.iter().map(|xj| xj.clone() * inv.clone()).collect();
    Ok((q * inv, xs))
}

pub fn act_inverse_quadratic(m: &Mat2, z: &Point) -> Result<Point> {
    let (t, x) = inverse_quadratic_map(m, &z.t, &z.x)?;
    Ok(Point { t, x })
}

/// Linear-potential action, applied to every coordinate:
/// `x′ = x/p + μ − νq/p + k²β(q²/p² − t²/p)` with `p = at + b`, `q = ct + d`.
pub fn linear_map<S: Scalar>(
    l: &GroupElement,
    k: C64,
    beta: f64,
    t: &S,
    x: &[S],
) -> Result<(S, Vec<S>)> {
    let p = t.clone() * l.a() + l.b();
    nonsingular("at+b", p.value())?;
    let q = t.clone() * l.c() + l.d();
    let pinv = p.recip();
    let tp = q * pinv.clone();
    let shift =
        tp.clone() * (-l.nu) + (tp.square() - t.square() * pinv.clone()) * (k * k * beta) + l.mu;
    let xs = x
        .iter()
        .map(|xj| xj.clone() * pinv.clone() + shift.clone())
        .collect();
    Ok((tp, xs))
}

pub fn act_linear(l: &GroupElement, z: &Point, spec: &FamilySpec) -> Result<Point> {
    match spec.family {
        Family::Linear | Family::NdimLinear | Family::Nls2d | Family::Free => {}
        other => {
            return Err(Error::Parameter(format!(
                "linear action on {} family",
                other.name()
            )))
        }
    }
    let beta = if matches!(spec.family, Family::Nls2d | Family::Free) {
        0.0
    } else {
        spec.beta
    };
    let (t, x) = linear_map(l, spec.k, beta, &z.t, &z.x)?;
    Ok(Point { t, x })
}

/// Intermediate quantities of the quadratic-potential action at one time.
#[derive(Debug, Clone)]
pub struct QuadraticFrame<S> {
    /// `u = exp(4kωt)`.
    pub u: S,
    /// `s = exp(2kωt) = √u`.
    pub s: S,
    /// `au + b`.
    pub p: S,
    /// `cu + d`.
    pub q: S,
    /// `s √(q/(up))`, equal to `s` at the identity.
    pub r: S,
    /// `ξ = s/(pr)`.
    pub xi: S,
    /// `f = νr − μ/r`.
    pub f: S,
    /// Principal `ln(q/(pu))`, so that `t′ = t + ln(q/(pu))/4kω`.
    pub log_ratio: S,
}

fn is_real_element(l: &GroupElement) -> bool {
    l.m.is_real(1e-14) && l.mu.im.abs() <= 1e-14 && l.nu.im.abs() <= 1e-14
}

pub fn quadratic_frame<S: Scalar>(
    l: &GroupElement,
    spec: &FamilySpec,
    t: &S,
) -> Result<QuadraticFrame<S>> {
    let kw = spec.k_omega();
    if kw == re(0.0) {
        return Err(if spec.k == re(0.0) {
            Error::ZeroK
        } else {
            Error::ZeroOmega
        });
    }
    let s = (t.clone() * (2.0 * kw)).exp();
    let u = s.square();
    let p = u.clone() * l.a() + l.b();
    let q = u.clone() * l.c() + l.d();
    nonsingular("au+b", p.value())?;
    nonsingular("cu+d", q.value())?;
    if kw.im.abs() <= 1e-14 * kw.norm() && t.value().im == 0.0 && is_real_element(l) {
        let pq = p.value() * q.value();
        if pq.re <= 0.0 {
            return Err(Error::Branch(format!(
                "(au+b)(cu+d) = {:.6e} is not positive for real k*omega",
                pq.re
            )));
        }
    }
    let ratio = q.clone() / (p.clone() * u.clone());
    let r = s.clone() * ratio.sqrt();
    let xi = s.clone() / (p.clone() * r.clone());
    let f = r.clone() * l.nu - r.recip() * l.mu;
    let log_ratio = ratio.ln();
    Ok(QuadraticFrame {
        u,
        s,
        p,
        q,
        r,
        xi,
        f,
        log_ratio,
    })
}

pub fn quadratic_map<S: Scalar>(
    l: &GroupElement,
    spec: &FamilySpec,
    t: &S,
    x: &[S],
) -> Result<(S, Vec<S>)> {
    let fr = quadratic_frame(l, spec, t)?;
    let tp = t.clone() + fr.log_ratio.clone() / (4.0 * spec.k_omega());
    let xs = x
        .iter()
        .map(|xj| xj.clone() * fr.xi.clone() + fr.f.clone())
        .collect();
    Ok((tp, xs))
}

pub fn act_quadratic(l: &GroupElement, z: &Point, spec: &FamilySpec) -> Result<Point> {
    if spec.family != Family::Quadratic {
        return Err(Error::Parameter(format!(
            "quadratic action on {} family",
            spec.family.name()
        )));
    }
    let (t, x) = quadratic_map(l, spec, &z.t, &z.x)?;
    Ok(Point { t, x })
}

/// Family dispatch of the action on generic scalars.
pub fn family_map<S: Scalar>(
    l: &GroupElement,
    spec: &FamilySpec,
    t: &S,
    x: &[S],
) -> Result<(S, Vec<S>)> {
    match spec.family {
        Family::InverseQuadratic => {
            if l.mu != re(0.0) || l.nu != re(0.0) {
                return Err(Error::Domain(
                    "inverse-quadratic family admits no translations".into(),
                ));
            }
            inverse_quadratic_map(&l.m, t, x)
        }
        Family::Free | Family::Nls2d => linear_map(l, spec.k, 0.0, t, x),
        Family::Linear | Family::NdimLinear => linear_map(l, spec.k, spec.beta, t, x),
        Family::Quadratic => quadratic_map(l, spec, t, x),
    }
}

pub fn act(l: &GroupElement, z: &Point, spec: &FamilySpec) -> Result<Point> {
    let (t, x) = family_map(l, spec, &z.t, &z.x)?;
    Ok(Point { t, x })
}

/// Galilean data `x′ = x + σ + vt`, `t′ = t + λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GalileanData {
    pub sigma: C64,
    pub v: C64,
    pub lambda_shift: C64,
}

/// `σ = μ − νλ + k²βλ²`, `v = 2k²βλ − ν` for `M = [[1, λ], [0, 1]]`.
pub fn galilean_params(l: &GroupElement, spec: &FamilySpec) -> Result<GalileanData> {
    let m = &l.m;
    let tol = 1e-14;
    if (m.c - 1.0).norm() > tol || m.a.norm() > tol || (m.b - 1.0).norm() > tol {
        return Err(Error::Shape);
    }
    let lam = m.d;
    let k2b = spec.k * spec.k * spec.beta;
    Ok(GalileanData {
        sigma: l.mu - l.nu * lam + k2b * lam * lam,
        v: 2.0 * k2b * lam - l.nu,
        lambda_shift: lam,
    })
}

/// `|x′ − k²βt′² − (x − k²βt²)/(at + b)|`; zero whenever `μ = ν = 0`.
pub fn parabolic_frame_residual(l: &GroupElement, z: &Point, spec: &FamilySpec) -> Result<f64> {
    let (tp, xp) = linear_map(l, spec.k, spec.beta, &z.t, &z.x)?;
    let k2b = spec.k * spec.k * spec.beta;
    let p = l.a() * z.t + l.b();
    let lhs = xp[0] - k2b * tp * tp;
    let rhs = (z.x[0] - k2b * z.t * z.t) / p;
    Ok((lhs - rhs).norm())
}

/// Whether the quadratic action of `l` keeps `t′`, `x′` real at time `t`.
pub fn reality_domain_check(l: &GroupElement, t: f64, spec: &FamilySpec) -> bool {
    let kw = spec.k_omega();
    let tol = 1e-12;
    if kw.im.abs() <= tol * kw.norm() {
        if !is_real_element(l) {
            return false;
        }
        let u = (4.0 * kw.re * t).exp();
        let p = l.a().re * u + l.b().re;
        let q = l.c().re * u + l.d().re;
        p * q > 0.0
    } else if kw.re.abs() <= tol * kw.norm() {
        is_disk_shaped(&l.m, tol) && (l.mu.conj() + l.nu).norm() <= tol * (1.0 + l.mu.norm())
    } else {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{compose, disk_parametrize, make_element, DiskParams};

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn inverse_quadratic_examples() {
        let z = Point::tx(0.7, 1.3);
        assert_eq!(act_inverse_quadratic(&Mat2::identity(), &z).unwrap(), z);
        let shifted = act_inverse_quadratic(&Mat2::time_translation(0.5), &z).unwrap();
        assert!(close(shifted.t, re(1.2), 1e-15) && close(shifted.x[0], re(1.3), 1e-15));
        let dil = act_inverse_quadratic(&Mat2::dilatation(2.0), &z).unwrap();
        assert!(close(dil.t, re(2.8), 1e-15) && close(dil.x[0], re(2.6), 1e-15));
        let sing = act_inverse_quadratic(&Mat2::real(1.0, 0.0, 1.0, 1.0), &Point::tx(-1.0, 0.0));
        assert!(matches!(sing, Err(Error::SingularTime { .. })));
    }

    #[test]
    fn linear_translation_without_slope() {
        let spec = FamilySpec::linear(re(1.0), 0.3, 0.0);
        let l = GroupElement::translation(re(0.4), re(0.9));
        let z = Point::tx(0.7, 1.3);
        let zp = act_linear(&l, &z, &spec).unwrap();
        assert!(close(zp.x[0], re(1.3 + 0.4 - 0.9 * 0.7), 1e-15));
        assert!(close(zp.t, re(0.7), 1e-15));
        let spec = FamilySpec::linear(re(1.0), 0.3, 0.6);
        let id = act_linear(&GroupElement::identity(), &z, &spec).unwrap();
        assert!(close(id.x[0], z.x[0], 1e-15) && close(id.t, z.t, 1e-15));
    }

    #[test]
    fn ndim_differences_scale() {
        let spec = FamilySpec::ndim_linear_uniform(re(1.0), 0.2, 0.6, 2, 0.0);
        let l = make_element(
            Mat2::real(1.1, 0.3, 0.4, 1.0 / 1.1 + 0.3 * 0.4 / 1.1),
            re(0.2),
            re(-0.5),
        )
        .unwrap();
        let z = Point::real(0.8, &[1.5, -0.25]);
        let zp = act_linear(&l, &z, &spec).unwrap();
        let p = l.a() * z.t + l.b();
        assert!(close(zp.x[0] - zp.x[1], (z.x[0] - z.x[1]) / p, 1e-14));
    }

    #[test]
    fn galilean_reduction() {
        let spec = FamilySpec::linear(re(1.0), 0.3, 0.7);
        let g = galilean_params(&GroupElement::identity(), &spec).unwrap();
        assert_eq!((g.sigma, g.v), (re(0.0), re(0.0)));
        let lam = 0.6;
        let l0 = make_element(Mat2::time_translation(lam), re(0.25), re(0.0)).unwrap();
        let g = galilean_params(&l0, &spec).unwrap();
        assert!(close(g.sigma, re(0.25 + 0.7 * lam * lam), 1e-15));
        assert!(close(g.v, re(2.0 * 0.7 * lam), 1e-15));
        let l = make_element(Mat2::time_translation(lam), re(0.25), re(-0.4)).unwrap();
        let g = galilean_params(&l, &spec).unwrap();
        let z = Point::tx(1.1, -0.3);
        let zp = act_linear(&l, &z, &spec).unwrap();
        assert!(close(zp.x[0], z.x[0] + g.sigma + g.v * z.t, 1e-14));
        assert!(close(zp.t, z.t + lam, 1e-15));
        let bad = GroupElement::from_matrix(Mat2::dilatation(2.0)).unwrap();
        assert_eq!(galilean_params(&bad, &spec), Err(Error::Shape));
    }

    #[test]
    fn parabolic_frame() {
        let spec = FamilySpec::linear(re(1.0), 0.3, 0.7);
        let z = Point::tx(0.4, 0.9);
        assert!(parabolic_frame_residual(&GroupElement::identity(), &z, &spec).unwrap() < 1e-15);
        let m = GroupElement::from_matrix(Mat2::real(1.0, 0.5, 0.3, 1.15)).unwrap();
        assert!(parabolic_frame_residual(&m, &z, &spec).unwrap() < 1e-12);
        let shifted = GroupElement { mu: re(0.3), ..m };
        assert!(parabolic_frame_residual(&shifted, &z, &spec).unwrap() > 1e-3);
    }

    #[test]
    fn quadratic_identity_and_composition() {
        let spec = FamilySpec::quadratic(re(1.0), 0.3, re(0.8));
        let z = Point::tx(0.2, 0.6);
        let id = act_quadratic(&GroupElement::identity(), &z, &spec).unwrap();
        assert!(close(id.t, z.t, 1e-15) && close(id.x[0], z.x[0], 1e-15));
        let l1 = make_element(Mat2::real(1.0, 0.5, 0.4, 1.2), re(0.3), re(-0.2)).unwrap();
        let l2 = make_element(Mat2::real(2.0, 1.0, 1.0, 1.0), re(-0.1), re(0.5)).unwrap();
        let a = act_quadratic(&l1, &act_quadratic(&l2, &z, &spec).unwrap(), &spec).unwrap();
        let b = act_quadratic(&compose(&l1, &l2), &z, &spec).unwrap();
        assert!(close(a.t, b.t, 1e-12) && close(a.x[0], b.x[0], 1e-12));
        assert!(a.is_real(1e-14));
    }

    #[test]
    fn quadratic_disk_xi_is_inverse_modulus() {
        let spec = FamilySpec::quadratic(C64::new(0.0, 1.0), 0.3, re(0.8));
        let g = disk_parametrize(DiskParams {
            theta: 0.2,
            lam: C64::new(0.3, 0.1),
        })
        .unwrap();
        let l = GroupElement {
            mu: C64::new(0.2, 0.1),
            nu: C64::new(-0.2, 0.1),
            ..g
        };
        assert!(reality_domain_check(&l, 0.4, &spec));
        let t = re(0.4);
        let fr = quadratic_frame(&l, &spec, &t).unwrap();
        assert!(close(fr.xi, re(1.0 / fr.p.norm()), 1e-13));
        let zp = act_quadratic(&l, &Point::tx(0.4, 0.5), &spec).unwrap();
        assert!(zp.is_real(1e-13));
    }

    #[test]
    fn reality_domain() {
        let spec = FamilySpec::quadratic(re(1.0), 0.3, re(0.8));
        assert!(reality_domain_check(&GroupElement::identity(), 3.0, &spec));
        let semi = GroupElement::from_matrix(Mat2::real(1.0, 0.5, 0.4, 1.2)).unwrap();
        assert!(reality_domain_check(&semi, -2.0, &spec));
        let neg = GroupElement::from_matrix(Mat2::real(1.0, 0.0, -1.0, 1.0)).unwrap();
        assert!(!reality_domain_check(&neg, 2.0, &spec));
        let err = act_quadratic(&neg, &Point::tx(2.0, 0.1), &spec);
        assert!(matches!(err, Err(Error::Branch(_))));
    }
}
