//! Truncated multivariate Taylor polynomials ("jets") over `Complex64`.
//!
//! A jet in `nvars` variables of order `N` stores the Taylor coefficients
//! `c_α` of `f(z₀ + h) = Σ_{|α| ≤ N} c_α h^α`. Arithmetic and elementary
//! functions act on the truncated series, so any formula evaluated on jets
//! seeded with [`Jet::variable`] yields exact partial derivatives
//! `∂^α f(z₀) = α! c_α`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use crate::scalar::{Scalar, C64};

/// Highest derivative order any jet may carry.
pub const MAX_ORDER: usize = 6;

/// Monomial layout and product table for one `(nvars, order)` pair.
#[derive(Debug)]
pub struct JetSpace {
    nvars: usize,
    order: usize,
    monomials: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    /// `(i, j, k)` with `monomials[i] + monomials[j] == monomials[k]`.
    products: Vec<(u32, u32, u32)>,
    /// `α!` for each monomial.
    factorials: Vec<f64>,
}

impl JetSpace {
    fn build(nvars: usize, order: usize) -> Self {
        let mut monomials = Vec::new();
        for degree in 0..=order {
            let mut current = vec![0u8; nvars];
            enumerate(&mut monomials, &mut current, 0, degree);
        }
        let index: HashMap<Vec<u8>, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let mut products = Vec::new();
        for (i, mi) in monomials.iter().enumerate() {
            for (j, mj) in monomials.iter().enumerate() {
                let sum: Vec<u8> = mi.iter().zip(mj).map(|(a, b)| a + b).collect();
                if let Some(&k) = index.get(&sum) {
                    products.push((i as u32, j as u32, k as u32));
                }
            }
        }
        let factorials = monomials
            .iter()
            .map(|m| m.iter().map(|&e| factorial(e as usize)).product())
            .collect();
        JetSpace {
            nvars,
            order,
            monomials,
            index,
            products,
            factorials,
        }
    }

    /// Shared, cached space for the given shape.
    pub fn get(nvars: usize, order: usize) -> Arc<JetSpace> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetSpace>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("jet space cache poisoned");
        guard
            .entry((nvars, order))
            .or_insert_with(|| Arc::new(JetSpace::build(nvars, order)))
            .clone()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

fn enumerate(out: &mut Vec<Vec<u8>>, current: &mut Vec<u8>, pos: usize, remaining: usize) {
    if pos + 1 == current.len() {
        current[pos] = remaining as u8;
        out.push(current.clone());
        current[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e as u8;
        enumerate(out, current, pos + 1, remaining - e);
    }
    current[pos] = 0;
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    coeffs: Vec<C64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("nvars", &self.space.nvars)
            .field("order", &self.space.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, c: C64) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); space.len()];
        coeffs[0] = c;
        Jet {
            space: space.clone(),
            coeffs,
        }
    }

    /// The coordinate function `z_var` expanded at `value`.
    pub fn variable(space: &Arc<JetSpace>, var: usize, value: C64) -> Self {
        assert!(var < space.nvars, "variable index out of range");
        let mut jet = Jet::constant(space, value);
        if space.order >= 1 {
            let mut mono = vec![0u8; space.nvars];
            mono[var] = 1;
            jet.coeffs[space.index[&mono]] = C64::new(1.0, 0.0);
        }
        jet
    }

    /// One jet per coordinate, expanded at `point`.
    pub fn seed(point: &[C64], order: usize) -> Vec<Jet> {
        let space = JetSpace::get(point.len(), order);
        point
            .iter()
            .enumerate()
            .map(|(i, &v)| Jet::variable(&space, i, v))
            .collect()
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.space.order
    }

    pub fn nvars(&self) -> usize {
        self.space.nvars
    }

    /// Taylor coefficient for multi-index `alpha` (zero beyond the order).
    pub fn coeff(&self, alpha: &[u8]) -> C64 {
        self.space
            .index
            .get(alpha)
            .map(|&i| self.coeffs[i])
            .unwrap_or(C64::new(0.0, 0.0))
    }

    /// Partial derivative `∂^alpha f` at the expansion point.
    pub fn partial(&self, alpha: &[u8]) -> C64 {
        match self.space.index.get(alpha) {
            Some(&i) => self.coeffs[i] * self.space.factorials[i],
            None => C64::new(0.0, 0.0),
        }
    }

    fn zeros_like(&self) -> Self {
        Jet {
            space: self.space.clone(),
            coeffs: vec![C64::new(0.0, 0.0); self.coeffs.len()],
        }
    }

    fn same_space(&self, other: &Jet) {
        debug_assert!(
            Arc::ptr_eq(&self.space, &other.space)
                || (self.space.nvars == other.space.nvars && self.space.order == other.space.order),
            "jets from different spaces"
        );
    }

    fn mul_ref(&self, other: &Jet) -> Jet {
        self.same_space(other);
        let mut out = self.zeros_like();
        for &(i, j, k) in &self.space.products {
            out.coeffs[k as usize] += self.coeffs[i as usize] * other.coeffs[j as usize];
        }
        out
    }

    /// `g(c₀ + h) = Σ_m taylor[m] h^m` where `h` is the non-constant part.
    fn compose(&self, taylor: &[C64]) -> Jet {
        let mut h = self.clone();
        h.coeffs[0] = C64::new(0.0, 0.0);
        let top = taylor.len() - 1;
        let mut acc = Jet::constant(&self.space, taylor[top]);
        for m in (0..top).rev() {
            acc = acc.mul_ref(&h);
            acc.coeffs[0] += taylor[m];
        }
        acc
    }

    fn order_range(&self) -> usize {
        self.space.order
    }
}

impl Scalar for Jet {
    fn value(&self) -> C64 {
        self.coeffs[0]
    }

    fn lift(&self, c: C64) -> Self {
        Jet::constant(&self.space, c)
    }

    fn exp(&self) -> Self {
        let e0 = self.coeffs[0].exp();
        let mut taylor = Vec::with_capacity(self.order_range() + 1);
        let mut term = e0;
        for m in 0..=self.order_range() {
            if m > 0 {
                term /= m as f64;
            }
            taylor.push(term);
        }
        self.compose(&taylor)
    }

    fn ln(&self) -> Self {
        let c0 = self.coeffs[0];
        let mut taylor = vec![c0.ln()];
        let inv = C64::new(1.0, 0.0) / c0;
        let mut pow = inv;
        for m in 1..=self.order_range() {
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            taylor.push(pow * (sign / m as f64));
            pow *= inv;
        }
        self.compose(&taylor)
    }

    fn sqrt(&self) -> Self {
        let c0 = self.coeffs[0];
        self.power_series(c0.sqrt(), C64::new(0.5, 0.0))
    }

    fn powc(&self, p: C64) -> Self {
        let c0 = self.coeffs[0];
        let head = if c0 == C64::new(0.0, 0.0) {
            C64::new(0.0, 0.0)
        } else {
            c0.powc(p)
        };
        self.power_series(head, p)
    }

    fn recip(&self) -> Self {
        let inv = C64::new(1.0, 0.0) / self.coeffs[0];
        let mut taylor = Vec::with_capacity(self.order_range() + 1);
        let mut term = inv;
        for _ in 0..=self.order_range() {
            taylor.push(term);
            term *= -inv;
        }
        self.compose(&taylor)
    }

    fn powi(&self, n: i32) -> Self {
        match n {
            0 => self.lift(C64::new(1.0, 0.0)),
            1 => self.clone(),
            n if n < 0 => self.powi(-n).recip(),
            n => {
                let half = self.powi(n / 2);
                let sq = half.mul_ref(&half);
                if n % 2 == 1 {
                    sq.mul_ref(self)
                } else {
                    sq
                }
            }
        }
    }
}

impl Jet {
    /// Binomial series of `x^p` around `c₀` given the principal `c₀^p`.
    fn power_series(&self, head: C64, p: C64) -> Jet {
        let c0 = self.coeffs[0];
        let mut taylor = Vec::with_capacity(self.order_range() + 1);
        let mut term = head;
        taylor.push(term);
        for m in 1..=self.order_range() {
            term = term * (p - (m - 1) as f64) / (c0 * m as f64);
            taylor.push(term);
        }
        self.compose(&taylor)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        self.same_space(&rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        self.same_space(&rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.mul_ref(&rhs)
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        self.mul_ref(&rhs.recip())
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for a in self.coeffs.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Add<C64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: C64) -> Jet {
        self.coeffs[0] += rhs;
        self
    }
}

impl Sub<C64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: C64) -> Jet {
        self.coeffs[0] -= rhs;
        self
    }
}

impl Mul<C64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: C64) -> Jet {
        for a in self.coeffs.iter_mut() {
            *a *= rhs;
        }
        self
    }
}

impl Div<C64> for Jet {
    type Output = Jet;
    fn div(mut self, rhs: C64) -> Jet {
        let inv = C64::new(1.0, 0.0) / rhs;
        for a in self.coeffs.iter_mut() {
            *a *= inv;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::re;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn monomial_count_matches_binomial() {
        assert_eq!(JetSpace::get(2, 3).len(), 10);
        assert_eq!(JetSpace::get(3, 2).len(), 10);
        assert_eq!(JetSpace::get(1, 4).len(), 5);
    }

    #[test]
    fn product_rule_on_polynomial() {
        // f = t^2 x^3 at (t, x) = (1.5, -0.5)
        let v = Jet::seed(&[re(1.5), re(-0.5)], 3);
        let f = v[0].powi(2) * v[1].powi(3);
        assert!(close(f.partial(&[1, 0]), re(2.0 * 1.5 * (-0.125)), 1e-14));
        assert!(close(f.partial(&[1, 2]), re(2.0 * 1.5 * 6.0 * -0.5), 1e-14));
        assert!(close(f.partial(&[0, 3]), re(1.5 * 1.5 * 6.0), 1e-14));
    }

    #[test]
    fn exp_log_sqrt_derivatives() {
        let v = Jet::seed(&[re(0.7)], 4);
        let e = v[0].exp();
        for m in 0..=4u8 {
            assert!(close(e.partial(&[m]), re(0.7f64.exp()), 1e-14));
        }
        let l = v[0].ln();
        assert!(close(l.partial(&[3]), re(2.0 / 0.7f64.powi(3)), 1e-13));
        let s = v[0].sqrt();
        assert!(close(s.partial(&[2]), re(-0.25 * 0.7f64.powf(-1.5)), 1e-13));
        let r = v[0].recip();
        assert!(close(r.partial(&[2]), re(2.0 / 0.7f64.powi(3)), 1e-13));
    }

    #[test]
    fn complex_power_matches_principal_branch() {
        let z = C64::new(-0.3, 0.8);
        let p = C64::new(0.25, -0.5);
        let v = Jet::seed(&[z], 2);
        let w = v[0].powc(p);
        assert!(close(w.value(), z.powc(p), 1e-14));
        assert!(close(w.partial(&[1]), p * z.powc(p - 1.0), 1e-13));
        assert!(close(
            w.partial(&[2]),
            p * (p - 1.0) * z.powc(p - 2.0),
            1e-13
        ));
    }

    #[test]
    fn division_and_chain_rule() {
        // g = exp(x / (1 + t x)) against a hand-computed derivative.
        let (t0, x0) = (0.4, 0.9);
        let v = Jet::seed(&[re(t0), re(x0)], 2);
        let g = (v[1].clone() / (v[0].clone() * v[1].clone() + re(1.0))).exp();
        let q = x0 / (1.0 + t0 * x0);
        let dq_dt = -x0 * x0 / (1.0 + t0 * x0).powi(2);
        assert!(close(g.partial(&[1, 0]), re(dq_dt * q.exp()), 1e-13));
    }
}
