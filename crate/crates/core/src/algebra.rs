//! Differential operators with Laurent-polynomial coefficients in two
//! variables, and the generator sets of the linear and quadratic families.
//!
//! The first variable is `t` for the linear family and `s = √u = e^{2kωt}`
//! for the quadratic one; the second is always `x`. Operators are kept in
//! canonical form (derivatives to the right, like terms merged, coefficients
//! below [`PRUNE`] dropped), so equality is a coefficient comparison.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::Point;
use crate::jet::Jet;
use crate::scalar::{re, Scalar, C64};
use crate::smooth::SmoothFn;

/// Coefficients smaller than this are removed after every operation.
pub const PRUNE: f64 = 1e-15;

/// Default tolerance for coefficient-wise operator equality.
pub const OP_TOL: f64 = 1e-13;

/// `Σ c_{ij} v^i x^j` with `i ∈ ℤ`, `j ≥ 0`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LaurentPoly2 {
    terms: BTreeMap<(i32, i32), C64>,
}

impl LaurentPoly2 {
    pub fn zero() -> Self {
        LaurentPoly2::default()
    }

    pub fn constant(c: C64) -> Self {
        LaurentPoly2::monomial(c, 0, 0)
    }

    pub fn one() -> Self {
        LaurentPoly2::constant(re(1.0))
    }

    pub fn monomial(c: C64, i: i32, j: i32) -> Self {
        assert!(
            j >= 0,
            "negative powers are only allowed in the first variable"
        );
        let mut p = LaurentPoly2::zero();
        p.push(c, i, j);
        p
    }

    /// Sum of `(c, i, j)` monomials.
    pub fn from_terms(terms: &[(C64, i32, i32)]) -> Self {
        let mut p = LaurentPoly2::zero();
        for &(c, i, j) in terms {
            p.push(c, i, j);
        }
        p
    }

    fn push(&mut self, c: C64, i: i32, j: i32) {
        let e = self.terms.entry((i, j)).or_insert(re(0.0));
        *e += c;
        if e.norm() < PRUNE {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, i32), &C64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: i32, j: i32) -> C64 {
        self.terms.get(&(i, j)).copied().unwrap_or(re(0.0))
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut p = LaurentPoly2::zero();
        for (&(i, j), &v) in &self.terms {
            p.push(v * c, i, j);
        }
        p
    }

    /// Partial derivative in variable `var` (0 = first, 1 = x).
    pub fn derive(&self, var: usize) -> Self {
        let mut p = LaurentPoly2::zero();
        for (&(i, j), &v) in &self.terms {
            match var {
                0 if i != 0 => p.push(v * i as f64, i - 1, j),
                1 if j != 0 => p.push(v * j as f64, i, j - 1),
                _ => {}
            }
        }
        p
    }

    pub fn derive_n(&self, var: usize, n: u32) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derive(var))
    }

    pub fn eval(&self, v: C64, x: C64) -> C64 {
        self.terms
            .iter()
            .map(|(&(i, j), &c)| c * v.powi(i) * x.powi(j))
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn powi(&self, n: u32) -> Self {
        (0..n).fold(LaurentPoly2::one(), |acc, _| &acc * self)
    }
}

impl Add for &LaurentPoly2 {
    type Output = LaurentPoly2;
    fn add(self, o: &LaurentPoly2) -> LaurentPoly2 {
        let mut p = self.clone();
        for (&(i, j), &v) in &o.terms {
            p.push(v, i, j);
        }
        p
    }
}

impl Sub for &LaurentPoly2 {
    type Output = LaurentPoly2;
    fn sub(self, o: &LaurentPoly2) -> LaurentPoly2 {
        let mut p = self.clone();
        for (&(i, j), &v) in &o.terms {
            p.push(-v, i, j);
        }
        p
    }
}

impl Mul for &LaurentPoly2 {
    type Output = LaurentPoly2;
    fn mul(self, o: &LaurentPoly2) -> LaurentPoly2 {
        let mut acc: BTreeMap<(i32, i32), C64> = BTreeMap::new();
        for (&(i1, j1), &a) in &self.terms {
            for (&(i2, j2), &b) in &o.terms {
                *acc.entry((i1 + i2, j1 + j2)).or_insert(re(0.0)) += a * b;
            }
        }
        acc.retain(|_, v| v.norm() >= PRUNE);
        LaurentPoly2 { terms: acc }
    }
}

impl Neg for &LaurentPoly2 {
    type Output = LaurentPoly2;
    fn neg(self) -> LaurentPoly2 {
        self.scale(re(-1.0))
    }
}

impl fmt::Display for LaurentPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(i, j), c)| format!("({c})v^{i}x^{j}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Which variable the first coefficient slot means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OpFamily {
    /// Variables `(t, x)`.
    Linear,
    /// Variables `(s, x)` with `s = e^{rate · t}`.
    Quadratic { rate: C64 },
}

/// `Σ p_{mn}(v, x) ∂_v^m ∂_x^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffOp {
    family: OpFamily,
    terms: BTreeMap<(u32, u32), LaurentPoly2>,
}

impl DiffOp {
    pub fn zero(family: OpFamily) -> Self {
        DiffOp {
            family,
            terms: BTreeMap::new(),
        }
    }

    /// Multiplication by `p`.
    pub fn mult(family: OpFamily, p: LaurentPoly2) -> Self {
        DiffOp::term(family, p, 0, 0)
    }

    pub fn identity(family: OpFamily) -> Self {
        DiffOp::mult(family, LaurentPoly2::one())
    }

    pub fn constant(family: OpFamily, c: C64) -> Self {
        DiffOp::mult(family, LaurentPoly2::constant(c))
    }

    /// `p ∂_v^m ∂_x^n`.
    pub fn term(family: OpFamily, p: LaurentPoly2, m: u32, n: u32) -> Self {
        let mut op = DiffOp::zero(family);
        op.push(p, m, n);
        op
    }

    fn push(&mut self, p: LaurentPoly2, m: u32, n: u32) {
        if p.is_zero() {
            return;
        }
        let sum = match self.terms.get(&(m, n)) {
            Some(q) => q + &p,
            None => p,
        };
        if sum.is_zero() {
            self.terms.remove(&(m, n));
        } else {
            self.terms.insert((m, n), sum);
        }
    }

    pub fn family(&self) -> OpFamily {
        self.family
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn order(&self) -> usize {
        self.terms
            .keys()
            .map(|&(m, n)| (m + n) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn coefficient(&self, m: u32, n: u32) -> LaurentPoly2 {
        self.terms.get(&(m, n)).cloned().unwrap_or_default()
    }

    fn same_family(&self, o: &DiffOp) -> Result<()> {
        if self.family != o.family {
            return Err(Error::FamilyMismatch);
        }
        Ok(())
    }

    pub fn add(&self, o: &DiffOp) -> Result<DiffOp> {
        self.same_family(o)?;
        let mut r = self.clone();
        for (&(m, n), p) in &o.terms {
            r.push(p.clone(), m, n);
        }
        Ok(r)
    }

    pub fn sub(&self, o: &DiffOp) -> Result<DiffOp> {
        self.add(&o.scale(re(-1.0)))
    }

    pub fn scale(&self, c: C64) -> DiffOp {
        let mut r = DiffOp::zero(self.family);
        for (&(m, n), p) in &self.terms {
            r.push(p.scale(c), m, n);
        }
        r
    }

    /// Left multiplication by a coefficient function.
    pub fn premul(&self, q: &LaurentPoly2) -> DiffOp {
        let mut r = DiffOp::zero(self.family);
        for (&(m, n), p) in &self.terms {
            r.push(q * p, m, n);
        }
        r
    }

    /// Operator product `self ∘ o` through the Leibniz rule.
    pub fn compose(&self, o: &DiffOp) -> Result<DiffOp> {
        self.same_family(o)?;
        let mut r = DiffOp::zero(self.family);
        for (&(m1, n1), a) in &self.terms {
            for (&(m2, n2), b) in &o.terms {
                for g1 in 0..=m1 {
                    let b1 = b.derive_n(0, g1);
                    if b1.is_zero() {
                        continue;
                    }
                    for g2 in 0..=n1 {
                        let db = b1.derive_n(1, g2);
                        if db.is_zero() {
                            continue;
                        }
                        let c = binomial(m1, g1) * binomial(n1, g2);
                        r.push((a * &db).scale(re(c)), m1 - g1 + m2, n1 - g2 + n2);
                    }
                }
            }
        }
        Ok(r)
    }

    pub fn commutator(&self, o: &DiffOp) -> Result<DiffOp> {
        self.compose(o)?.sub(&o.compose(self)?)
    }

    /// Largest coefficient difference.
    pub fn distance(&self, o: &DiffOp) -> Result<f64> {
        Ok(self
            .sub(o)?
            .terms
            .values()
            .map(|p| p.max_abs())
            .fold(0.0, f64::max))
    }

    pub fn approx_eq(&self, o: &DiffOp, tol: f64) -> bool {
        self.distance(o).map(|d| d <= tol).unwrap_or(false)
    }

    /// Numeric action on `f` at `z = (t, x)`. Quadratic-family operators
    /// differentiate in `s = e^{rate·t}`.
    pub fn apply(&self, f: &SmoothFn, z: &Point) -> Result<C64> {
        let order = self.order();
        if order > crate::jet::MAX_ORDER {
            return Err(Error::Order {
                needed: order,
                available: crate::jet::MAX_ORDER,
            });
        }
        if z.dim() != 1 || f.dim() != 1 {
            return Err(Error::Parameter(
                "operators act on functions of (t, x)".into(),
            ));
        }
        let (v0, jet) = match self.family {
            OpFamily::Linear => (z.t, f.jet(z, order)?),
            OpFamily::Quadratic { rate } => {
                if !f.domain().contains(z) {
                    return Err(Error::Domain(format!(
                        "{} is outside the domain of {}",
                        z.t,
                        f.name()
                    )));
                }
                let s0 = (rate * z.t).exp();
                let seeds = Jet::seed(&[s0, z.x[0]], order);
                let t = (seeds[0].clone() / s0).ln() / rate + z.t;
                (s0, f.eval_jets(&t, &seeds[1..])?)
            }
        };
        Ok(self
            .terms
            .iter()
            .map(|(&(m, n), p)| p.eval(v0, z.x[0]) * jet.partial(&[m as u8, n as u8]))
            .sum())
    }

    /// Perturbs one coefficient; used as a falsification control.
    pub fn perturbed(&self, eps: C64) -> DiffOp {
        let mut r = self.clone();
        r.push(LaurentPoly2::monomial(eps, 1, 1), 0, 0);
        r
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// The generators `L₃, L±, T₁, T₂, 1`, their tilde partners, the defining
/// operator `K` and the time derivative `D` of one family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub family: OpFamily,
    pub k: C64,
    pub alpha: f64,
    /// `β` for the linear family, `ω` for the quadratic one.
    pub coupling: C64,
    pub l3: DiffOp,
    pub lplus: DiffOp,
    pub lminus: DiffOp,
    pub t1: DiffOp,
    pub t2: DiffOp,
    pub unit: DiffOp,
    pub l3_tilde: DiffOp,
    pub lplus_tilde: DiffOp,
    pub lminus_tilde: DiffOp,
    pub t1_tilde: DiffOp,
    pub t2_tilde: DiffOp,
    /// `K₁` (linear) or `K₂` (quadratic).
    pub kop: DiffOp,
    pub d: DiffOp,
}

fn poly(terms: &[(C64, i32, i32)]) -> LaurentPoly2 {
    LaurentPoly2::from_terms(terms)
}

pub fn generators_linear(k: C64, alpha: f64, beta: f64) -> Result<GeneratorSet> {
    if k == re(0.0) {
        return Err(Error::ZeroK);
    }
    let fam = OpFamily::Linear;
    let term = |p, m, n| DiffOp::term(fam, p, m, n);
    let sum = |ops: Vec<DiffOp>| {
        ops.into_iter()
            .try_fold(DiffOp::zero(fam), |a, b| a.add(&b))
    };
    let (a, b) = (re(alpha), re(beta));
    let k2b = k * k * b;
    let k3b2 = k * k * k * b * b;

    let l3 = sum(vec![
        term(poly(&[(re(-1.0), 1, 0)]), 1, 0),
        term(poly(&[(re(-0.5), 0, 1), (-1.5 * k2b, 2, 0)]), 0, 1),
        term(
            poly(&[
                (-k * a, 1, 0),
                (-1.5 * k * b, 1, 1),
                (-0.5 * k3b2, 3, 0),
                (re(-0.25), 0, 0),
            ]),
            0,
            0,
        ),
    ])?;
    let lplus = sum(vec![
        term(LaurentPoly2::one(), 1, 0),
        term(poly(&[(2.0 * k2b, 1, 0)]), 0, 1),
        term(poly(&[(k * a, 0, 0), (k * b, 0, 1), (k3b2, 2, 0)]), 0, 0),
    ])?;
    let lminus = sum(vec![
        term(poly(&[(re(1.0), 2, 0)]), 1, 0),
        term(poly(&[(re(1.0), 1, 1), (k2b, 3, 0)]), 0, 1),
        term(
            poly(&[
                (re(0.5), 1, 0),
                (k * a, 2, 0),
                (0.25 * k3b2, 4, 0),
                (1.5 * k * b, 2, 1),
                (1.0 / (4.0 * k), 0, 2),
            ]),
            0,
            0,
        ),
    ])?;
    let t1 = sum(vec![
        term(LaurentPoly2::one(), 0, 1),
        term(poly(&[(k * b, 1, 0)]), 0, 0),
    ])?;
    let t2 = sum(vec![
        term(poly(&[(re(1.0), 1, 0)]), 0, 1),
        term(poly(&[(1.0 / (2.0 * k), 0, 1), (0.5 * k * b, 2, 0)]), 0, 0),
    ])?;
    let kop = sum(vec![
        term(LaurentPoly2::one(), 1, 0),
        term(LaurentPoly2::constant(-k), 0, 2),
        term(poly(&[(k * a, 0, 0), (k * b, 0, 1)]), 0, 0),
    ])?;
    let unit = DiffOp::identity(fam);
    Ok(GeneratorSet {
        family: fam,
        k,
        alpha,
        coupling: b,
        l3_tilde: l3.sub(&unit)?,
        lplus_tilde: lplus.clone(),
        lminus_tilde: lminus.add(&DiffOp::mult(fam, poly(&[(re(2.0), 1, 0)])))?,
        t1_tilde: t1.clone(),
        t2_tilde: t2.clone(),
        d: term(LaurentPoly2::one(), 1, 0),
        l3,
        lplus,
        lminus,
        t1,
        t2,
        unit,
        kop,
    })
}

pub fn generators_quadratic(k: C64, alpha: f64, omega: C64) -> Result<GeneratorSet> {
    if k == re(0.0) {
        return Err(Error::ZeroK);
    }
    if omega == re(0.0) {
        return Err(Error::ZeroOmega);
    }
    let kw = k * omega;
    let fam = OpFamily::Quadratic { rate: 2.0 * kw };
    let term = |p, m, n| DiffOp::term(fam, p, m, n);
    let sum = |ops: Vec<DiffOp>| {
        ops.into_iter()
            .try_fold(DiffOp::zero(fam), |a, b| a.add(&b))
    };
    let w = omega;
    let a4w = alpha / (4.0 * w);

    let l3 = sum(vec![
        term(poly(&[(re(-0.5), 1, 0)]), 1, 0),
        DiffOp::constant(fam, -a4w),
    ])?;
    let lplus = sum(vec![
        term(poly(&[(re(0.5), -1, 0)]), 1, 0),
        term(poly(&[(re(-0.5), -2, 1)]), 0, 1),
        term(poly(&[(a4w - 0.25, -2, 0), (w / 2.0, -2, 2)]), 0, 0),
    ])?;
    let lminus = sum(vec![
        term(poly(&[(re(0.5), 3, 0)]), 1, 0),
        term(poly(&[(re(0.5), 2, 1)]), 0, 1),
        term(poly(&[(a4w + 0.25, 2, 0), (w / 2.0, 2, 2)]), 0, 0),
    ])?;
    let t1 = sum(vec![
        term(poly(&[(re(1.0), -1, 0)]), 0, 1),
        term(poly(&[(-w, -1, 1)]), 0, 0),
    ])?;
    let t2 = sum(vec![
        term(poly(&[(re(1.0), 1, 0)]), 0, 1),
        term(poly(&[(w, 1, 1)]), 0, 0),
    ])?;
    let d = term(poly(&[(2.0 * kw, 1, 0)]), 1, 0);
    let kop = sum(vec![
        d.clone(),
        term(LaurentPoly2::constant(-k), 0, 2),
        term(poly(&[(k * alpha, 0, 0), (k * w * w, 0, 2)]), 0, 0),
    ])?;
    let unit = DiffOp::identity(fam);
    Ok(GeneratorSet {
        family: fam,
        k,
        alpha,
        coupling: w,
        l3_tilde: l3.clone(),
        lplus_tilde: lplus.sub(&DiffOp::mult(fam, poly(&[(re(1.0), -2, 0)])))?,
        lminus_tilde: lminus.add(&DiffOp::mult(fam, poly(&[(re(1.0), 2, 0)])))?,
        t1_tilde: t1.clone(),
        t2_tilde: t2.clone(),
        l3,
        lplus,
        lminus,
        t1,
        t2,
        unit,
        kop,
        d,
    })
}

impl GeneratorSet {
    pub fn is_quadratic(&self) -> bool {
        matches!(self.family, OpFamily::Quadratic { .. })
    }

    /// `[T₁, T₂]`: `1/2k` (linear) or `2ω` (quadratic).
    pub fn translation_bracket(&self) -> C64 {
        if self.is_quadratic() {
            2.0 * self.coupling
        } else {
            1.0 / (2.0 * self.k)
        }
    }

    /// `(name, lhs, rhs)` for every commutator of the table.
    pub fn commutation_table(&self) -> Result<Vec<(&'static str, DiffOp, DiffOp)>> {
        let c = |a: &DiffOp, b: &DiffOp| a.commutator(b);
        let half = re(0.5);
        Ok(vec![
            (
                "[L3,L+] = L+",
                c(&self.l3, &self.lplus)?,
                self.lplus.clone(),
            ),
            (
                "[L3,L-] = -L-",
                c(&self.l3, &self.lminus)?,
                self.lminus.scale(re(-1.0)),
            ),
            (
                "[L+,L-] = -2L3",
                c(&self.lplus, &self.lminus)?,
                self.l3.scale(re(-2.0)),
            ),
            (
                "[L3,T1] = T1/2",
                c(&self.l3, &self.t1)?,
                self.t1.scale(half),
            ),
            (
                "[L3,T2] = -T2/2",
                c(&self.l3, &self.t2)?,
                self.t2.scale(-half),
            ),
            (
                "[L+,T1] = 0",
                c(&self.lplus, &self.t1)?,
                DiffOp::zero(self.family),
            ),
            (
                "[L-,T2] = 0",
                c(&self.lminus, &self.t2)?,
                DiffOp::zero(self.family),
            ),
            ("[L+,T2] = T1", c(&self.lplus, &self.t2)?, self.t1.clone()),
            (
                "[L-,T1] = -T2",
                c(&self.lminus, &self.t1)?,
                self.t2.scale(re(-1.0)),
            ),
            (
                "[T1,T2] = const",
                c(&self.t1, &self.t2)?,
                self.unit.scale(self.translation_bracket()),
            ),
            (
                "[L3,1] = 0",
                c(&self.l3, &self.unit)?,
                DiffOp::zero(self.family),
            ),
        ])
    }

    /// `T₁T₂ + T₂T₁`.
    pub fn t_anticommutator(&self) -> Result<DiffOp> {
        self.t1.compose(&self.t2)?.add(&self.t2.compose(&self.t1)?)
    }

    /// Operator identities specific to the family, as `(name, lhs, rhs)`.
    pub fn identities(&self) -> Result<Vec<(&'static str, DiffOp, DiffOp)>> {
        let k = self.k;
        let mut out = Vec::new();
        if self.is_quadratic() {
            let kw = k * self.coupling;
            let l3w = self.l3.scale(-4.0 * kw);
            out.push((
                "K2 = -4kwL3 - (k/2){T1,T2}",
                self.kop.clone(),
                l3w.sub(&self.t_anticommutator()?.scale(k / 2.0))?,
            ));
            out.push((
                "D = -4kwL3 - k alpha",
                self.d.clone(),
                l3w.sub(&self.unit.scale(k * self.alpha))?,
            ));
            let x2 = LaurentPoly2::monomial(1.0 / (4.0 * k), 0, 2);
            out.push((
                "I2 = 3/16 + x^2 K2/4k",
                casimir_i2(self)?,
                self.unit.scale(re(3.0 / 16.0)).add(&self.kop.premul(&x2))?,
            ));
        } else {
            let k2b = k * k * self.coupling;
            out.push((
                "K1 = L+ - kT1^2",
                self.kop.clone(),
                self.lplus.sub(&self.t1.compose(&self.t1)?.scale(k))?,
            ));
            out.push((
                "D = L+ - 2k^2 beta T2 - k alpha",
                self.d.clone(),
                self.lplus
                    .sub(&self.t2.scale(2.0 * k2b))?
                    .sub(&self.unit.scale(k * self.alpha))?,
            ));
            let shifted = LaurentPoly2::from_terms(&[(re(1.0), 0, 1), (-k2b, 2, 0)])
                .powi(2)
                .scale(1.0 / (4.0 * k));
            out.push((
                "I2 = 3/16 + (x - k^2 beta t^2)^2 K1/4k",
                casimir_i2(self)?,
                self.unit
                    .scale(re(3.0 / 16.0))
                    .add(&self.kop.premul(&shifted))?,
            ));
        }
        out.push((
            "I3 = 3/16",
            casimir_i3(self)?,
            self.unit.scale(re(3.0 / 16.0)),
        ));
        out.push((
            "[I2,L3] = 0",
            casimir_i2(self)?.commutator(&self.l3)?,
            DiffOp::zero(self.family),
        ));
        Ok(out)
    }
}

/// `I₂ = L₊L₋ − L₃² + L₃`.
pub fn casimir_i2(g: &GeneratorSet) -> Result<DiffOp> {
    g.lplus
        .compose(&g.lminus)?
        .sub(&g.l3.compose(&g.l3)?)?
        .add(&g.l3)
}

/// `I₃ = −I₂ + c{L₃(T₁T₂ + T₂T₁) + L₊T₂² + L₋T₁²}` with `c = k` (linear)
/// or `c = 1/4ω` (quadratic).
pub fn casimir_i3(g: &GeneratorSet) -> Result<DiffOp> {
    let weight = if g.is_quadratic() {
        1.0 / (4.0 * g.coupling)
    } else {
        g.k
    };
    let inner =
        g.l3.compose(&g.t_anticommutator()?)?
            .add(&g.lplus.compose(&g.t2.compose(&g.t2)?)?)?
            .add(&g.lminus.compose(&g.t1.compose(&g.t1)?)?)?;
    inner.scale(weight).sub(&casimir_i2(g)?)
}

/// Largest coefficient defect of `g̃ᵢ K − K gᵢ` over the five generators.
pub fn intertwine_defect(g: &GeneratorSet, kop: &DiffOp) -> Result<f64> {
    let pairs = [
        (&g.l3_tilde, &g.l3),
        (&g.lplus_tilde, &g.lplus),
        (&g.lminus_tilde, &g.lminus),
        (&g.t1_tilde, &g.t1),
        (&g.t2_tilde, &g.t2),
    ];
    pairs.iter().try_fold(0.0f64, |acc, (gt, gi)| {
        Ok(acc.max(gt.compose(kop)?.distance(&kop.compose(gi)?)?))
    })
}

/// Whether `g̃ᵢ K = K gᵢ` holds coefficient-wise for all five generators.
pub fn intertwine_check(g: &GeneratorSet, kop: &DiffOp) -> Result<bool> {
    Ok(intertwine_defect(g, kop)? <= OP_TOL)
}
