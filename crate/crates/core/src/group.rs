//! SL(2) matrices, their semidirect products with two-dimensional
//! translations, and the associated cocycles.
//!
//! Matrices use the layout `M = [[c, d], [a, b]]` with `det M = cb - ad = 1`,
//! so that `t -> (ct + d)/(at + b)`. Accessors always name the entries by
//! letter; there are no row/column indices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{re, C64};

/// Determinant tolerance for validated construction.
pub const DET_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub c: C64,
    pub d: C64,
    pub a: C64,
    pub b: C64,
}

impl Mat2 {
    /// Unchecked constructor; see [`Mat2::checked`].
    pub const fn new(c: C64, d: C64, a: C64, b: C64) -> Self {
        Mat2 { c, d, a, b }
    }

    pub fn real(c: f64, d: f64, a: f64, b: f64) -> Self {
        Mat2::new(re(c), re(d), re(a), re(b))
    }

    pub fn checked(c: C64, d: C64, a: C64, b: C64) -> Result<Self> {
        let m = Mat2::new(c, d, a, b);
        let det = m.det();
        if (det - 1.0).norm() > DET_TOL {
            return Err(Error::Determinant { det });
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Mat2::real(1.0, 0.0, 0.0, 1.0)
    }

    /// `t -> t + lambda`.
    pub fn time_translation(lambda: f64) -> Self {
        Mat2::real(1.0, lambda, 0.0, 1.0)
    }

    /// `t -> c² t`, `x -> c x`.
    pub fn dilatation(c: f64) -> Self {
        Mat2::real(c, 0.0, 0.0, 1.0 / c)
    }

    pub fn det(&self) -> C64 {
        self.c * self.b - self.a * self.d
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            c: self.c * o.c + self.d * o.a,
            d: self.c * o.d + self.d * o.b,
            a: self.a * o.c + self.b * o.a,
            b: self.a * o.d + self.b * o.b,
        }
    }

    /// Inverse of a unimodular matrix: `[[b, -d], [-a, c]]`.
    pub fn inverse(&self) -> Mat2 {
        Mat2 {
            c: self.b,
            d: -self.d,
            a: -self.a,
            b: self.c,
        }
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2 {
            c: self.c,
            d: self.a,
            a: self.d,
            b: self.b,
        }
    }

    /// Action on a column vector `(mu, nu)`.
    pub fn apply(&self, mu: C64, nu: C64) -> (C64, C64) {
        (self.c * mu + self.d * nu, self.a * mu + self.b * nu)
    }

    /// The symplectic form `J = [[0, 1], [-1, 0]]`.
    pub fn symplectic() -> Mat2 {
        Mat2::real(0.0, 1.0, -1.0, 0.0)
    }

    pub fn max_abs_diff(&self, o: &Mat2) -> f64 {
        [self.c - o.c, self.d - o.d, self.a - o.a, self.b - o.b]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        [self.a, self.b, self.c, self.d]
            .iter()
            .all(|z| z.im.abs() <= tol)
    }
}

/// An element `{M, (mu, nu)}` of `SL(2) ⋉ T₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub m: Mat2,
    pub mu: C64,
    pub nu: C64,
}

pub fn make_element(m: Mat2, mu: C64, nu: C64) -> Result<GroupElement> {
    let det = m.det();
    if (det - 1.0).norm() > DET_TOL {
        return Err(Error::Determinant { det });
    }
    Ok(GroupElement { m, mu, nu })
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement {
            m: Mat2::identity(),
            mu: re(0.0),
            nu: re(0.0),
        }
    }

    pub fn from_matrix(m: Mat2) -> Result<Self> {
        make_element(m, re(0.0), re(0.0))
    }

    pub fn translation(mu: C64, nu: C64) -> Self {
        GroupElement {
            m: Mat2::identity(),
            mu,
            nu,
        }
    }

    pub fn a(&self) -> C64 {
        self.m.a
    }
    pub fn b(&self) -> C64 {
        self.m.b
    }
    pub fn c(&self) -> C64 {
        self.m.c
    }
    pub fn d(&self) -> C64 {
        self.m.d
    }

    pub fn max_abs_diff(&self, o: &GroupElement) -> f64 {
        self.m
            .max_abs_diff(&o.m)
            .max((self.mu - o.mu).norm())
            .max((self.nu - o.nu).norm())
    }
}

/// `{M M′, (μ, ν) + M (μ′, ν′)}`.
pub fn compose(l1: &GroupElement, l2: &GroupElement) -> GroupElement {
    let (tmu, tnu) = l1.m.apply(l2.mu, l2.nu);
    GroupElement {
        m: l1.m.mul(&l2.m),
        mu: l1.mu + tmu,
        nu: l1.nu + tnu,
    }
}

/// `{M⁻¹, -M⁻¹ (μ, ν)}`.
pub fn inverse(l: &GroupElement) -> GroupElement {
    let inv = l.m.inverse();
    let (mu, nu) = inv.apply(l.mu, l.nu);
    GroupElement {
        m: inv,
        mu: -mu,
        nu: -nu,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CocycleValue(pub C64);

impl CocycleValue {
    pub fn value(&self) -> C64 {
        self.0
    }
}

/// Cocycle of the linear-potential multiplier:
/// `ω(Λ, Λ′) = {(μa − νc)μ′ + (μb − νd)ν′} / 4k`.
pub fn cocycle_linear(l1: &GroupElement, l2: &GroupElement, k: C64) -> Result<CocycleValue> {
    if k == re(0.0) {
        return Err(Error::ZeroK);
    }
    let GroupElement { m, mu, nu } = *l1;
    let v = (mu * m.a - nu * m.c) * l2.mu + (mu * m.b - nu * m.d) * l2.nu;
    Ok(CocycleValue(v / (4.0 * k)))
}

/// Same cocycle through the bilinear form `(μ, ν)ᵀ J M (μ′, ν′) / 4k`.
pub fn cocycle_linear_matrix_form(
    l1: &GroupElement,
    l2: &GroupElement,
    k: C64,
) -> Result<CocycleValue> {
    if k == re(0.0) {
        return Err(Error::ZeroK);
    }
    let jm = Mat2::symplectic().mul(&l1.m);
    let (p, q) = jm.apply(l2.mu, l2.nu);
    Ok(CocycleValue((l1.mu * p + l1.nu * q) / (4.0 * k)))
}

/// Which transcription of the quadratic-potential cocycle to use.
///
/// `Printed` carries `(μb − νa)ν′` in the second term; `Corrected` uses
/// `(μb − νd)ν′`, the structural analogue of the linear cocycle. The
/// multiplier product check ([`crate::multiplier::select_quadratic_cocycle`])
/// picks `Corrected`; `Printed` is kept for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum QuadraticCocycle {
    Printed,
    #[default]
    Corrected,
}

/// Cocycle of the quadratic-potential multiplier:
/// `ω̃(Λ, Λ′) = ω {(μa − νc)μ′ + (μb − ν·x)ν′}` with `x = d` or `a` by variant.
pub fn cocycle_quadratic(
    l1: &GroupElement,
    l2: &GroupElement,
    omega: C64,
    variant: QuadraticCocycle,
) -> Result<CocycleValue> {
    if omega == re(0.0) {
        return Err(Error::ZeroOmega);
    }
    let GroupElement { m, mu, nu } = *l1;
    let second = match variant {
        QuadraticCocycle::Printed => m.a,
        QuadraticCocycle::Corrected => m.d,
    };
    let v = (mu * m.a - nu * m.c) * l2.mu + (mu * m.b - nu * second) * l2.nu;
    Ok(CocycleValue(omega * v))
}

/// Angle/disk parameters of the unit-circle-preserving subgroup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskParams {
    pub theta: f64,
    pub lam: C64,
}

/// `u -> e^{2iθ} (u − λ)/(1 − λ* u)` written as a unimodular matrix.
pub fn disk_parametrize(p: DiskParams) -> Result<GroupElement> {
    let r2 = p.lam.norm_sqr();
    if r2 >= 1.0 {
        return Err(Error::Domain(format!(
            "|lambda| = {} must be < 1",
            r2.sqrt()
        )));
    }
    let scale = 1.0 / (1.0 - r2).sqrt();
    let e = Complex64::from_polar(1.0, p.theta);
    let a = -p.lam.conj() * e * scale;
    let b = e.conj() * scale;
    let m = Mat2::new(b.conj(), a.conj(), a, b);
    GroupElement::from_matrix(m)
}

/// Whether `m` has the disk shape `c = b*`, `d = a*`.
pub fn is_disk_shaped(m: &Mat2, tol: f64) -> bool {
    (m.c - m.b.conj()).norm() <= tol && (m.d - m.a.conj()).norm() <= tol
}

/// Real element with all of `a, b, c, d ≥ 0`; such elements keep `t′`, `x′`
/// real for every `u > 0` when `kω` is real.
pub fn is_semigroup_admissible(l: &GroupElement) -> bool {
    let m = &l.m;
    m.is_real(1e-14)
        && [m.a, m.b, m.c, m.d].iter().all(|z| z.re >= 0.0)
        && l.mu.im.abs() <= 1e-14
        && l.nu.im.abs() <= 1e-14
}

/// Largest entry of `MᵀJM − J` and `MJMᵀ − J`.
pub fn symplectic_defect(m: &Mat2) -> f64 {
    let j = Mat2::symplectic();
    let left = m.transpose().mul(&j).mul(m);
    let right = m.mul(&j).mul(&m.transpose());
    left.max_abs_diff(&j).max(right.max_abs_diff(&j))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_element_validates_determinant() {
        assert!(make_element(Mat2::identity(), re(0.0), re(0.0)).is_ok());
        assert!(make_element(Mat2::time_translation(0.7), re(0.0), re(0.0)).is_ok());
        assert!(make_element(Mat2::real(2.0, 0.0, 0.0, 0.5), re(0.0), re(0.0)).is_ok());
        let err = make_element(Mat2::real(2.0, 0.0, 0.0, 1.0), re(0.0), re(0.0));
        assert!(matches!(err, Err(Error::Determinant { .. })));
    }

    #[test]
    fn time_translations_add() {
        let l1 = GroupElement::from_matrix(Mat2::time_translation(0.3)).unwrap();
        let l2 = GroupElement::from_matrix(Mat2::time_translation(-1.1)).unwrap();
        let l = compose(&l1, &l2);
        assert!(
            l.max_abs_diff(&GroupElement::from_matrix(Mat2::time_translation(-0.8)).unwrap())
                < 1e-15
        );
    }

    #[test]
    fn identity_and_inverse() {
        let l = make_element(Mat2::real(1.2, 0.4, 0.5, 1.0), re(0.3), re(-0.7)).unwrap();
        let id = GroupElement::identity();
        assert_eq!(compose(&l, &id), l);
        assert!(compose(&l, &inverse(&l)).max_abs_diff(&id) < 1e-15);
        assert_eq!(inverse(&id), id);
        let tr = GroupElement::translation(re(1.5), re(-2.0));
        assert_eq!(inverse(&tr), GroupElement::translation(re(-1.5), re(2.0)));
    }

    #[test]
    fn linear_cocycle_values() {
        let l1 = GroupElement::translation(re(1.0), re(0.0));
        let l2 = GroupElement::translation(re(0.0), re(1.0));
        let w = cocycle_linear(&l1, &l2, re(1.0)).unwrap();
        assert!((w.value() - 0.25).norm() < 1e-15);
        let pure = GroupElement::from_matrix(Mat2::real(1.2, 0.4, 0.5, 1.0)).unwrap();
        assert_eq!(
            cocycle_linear(&l1, &pure, re(1.0)).unwrap().value(),
            re(0.0)
        );
        assert!(matches!(
            cocycle_linear(&l1, &l2, re(0.0)),
            Err(Error::ZeroK)
        ));
        let mf = cocycle_linear_matrix_form(&l1, &l2, re(1.0)).unwrap();
        assert!((mf.value() - w.value()).norm() < 1e-15);
    }

    #[test]
    fn quadratic_cocycle_variants_differ_only_through_d_versus_a() {
        let l1 = make_element(Mat2::real(1.2, 0.4, 0.5, 1.0), re(0.3), re(-0.7)).unwrap();
        let l2 = GroupElement::translation(re(0.0), re(1.0));
        let p = cocycle_quadratic(&l1, &l2, re(1.0), QuadraticCocycle::Printed).unwrap();
        let c = cocycle_quadratic(&l1, &l2, re(1.0), QuadraticCocycle::Corrected).unwrap();
        // second term -ν(a − d)ν′
        assert!((p.value() - c.value() - (-(-0.7) * (0.5 - 0.4))).norm() < 1e-15);
        let flat = GroupElement::from_matrix(Mat2::identity()).unwrap();
        assert_eq!(
            cocycle_quadratic(&l1, &flat, re(1.0), QuadraticCocycle::Corrected)
                .unwrap()
                .value(),
            re(0.0)
        );
        assert!(matches!(
            cocycle_quadratic(&l1, &l2, re(0.0), QuadraticCocycle::Corrected),
            Err(Error::ZeroOmega)
        ));
    }

    #[test]
    fn disk_parametrization() {
        let id = disk_parametrize(DiskParams {
            theta: 0.0,
            lam: re(0.0),
        })
        .unwrap();
        assert!(id.m.max_abs_diff(&Mat2::identity()) < 1e-15);
        let rot = disk_parametrize(DiskParams {
            theta: std::f64::consts::FRAC_PI_2,
            lam: re(0.0),
        })
        .unwrap();
        // u' = (c u + d)/(a u + b) = e^{iπ} u = -u
        let u = Complex64::from_polar(1.0, 0.3);
        let up = (rot.m.c * u + rot.m.d) / (rot.m.a * u + rot.m.b);
        assert!((up + u).norm() < 1e-15);
        let g = disk_parametrize(DiskParams {
            theta: 0.4,
            lam: C64::new(0.3, -0.2),
        })
        .unwrap();
        assert!((g.m.det() - 1.0).norm() < 1e-14);
        assert!(is_disk_shaped(&g.m, 1e-15));
        assert!(disk_parametrize(DiskParams {
            theta: 0.0,
            lam: re(1.0)
        })
        .is_err());
    }

    #[test]
    fn semigroup_admissibility() {
        assert!(is_semigroup_admissible(&GroupElement::identity()));
        let neg = GroupElement::from_matrix(Mat2::real(1.0, 0.0, -1.0, 1.0)).unwrap();
        assert!(!is_semigroup_admissible(&neg));
        let p = GroupElement::from_matrix(Mat2::real(1.0, 0.5, 0.4, 1.2)).unwrap();
        let q = GroupElement::from_matrix(Mat2::real(2.0, 1.0, 1.0, 1.0)).unwrap();
        assert!(is_semigroup_admissible(&compose(&p, &q)));
        assert!(!is_semigroup_admissible(&inverse(&q)));
    }

    #[test]
    fn symplectic_invariance_on_fixed_matrix() {
        let m = Mat2::new(C64::new(1.0, 0.2), re(0.5), C64::new(0.3, -0.1), re(0.0));
        // fix b so det = 1
        let b = (re(1.0) + m.a * m.d) / m.c;
        let m = Mat2::new(m.c, m.d, m.a, b);
        assert!(symplectic_defect(&m) < 1e-14);
    }
}
