//! Functions of `(t, x)` that can be sampled with exact partial derivatives.
//!
//! A [`SmoothFn`] wraps an evaluator over [`Jet`]s. Calling it on seeded
//! coordinate jets yields the value and every partial up to the jet order;
//! calling it on composed jets (as the transformation builders do) applies
//! the chain rule automatically.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::Point;
use crate::jet::{Jet, MAX_ORDER};
use crate::scalar::{re, Scalar, C64};

pub type Evaluator = Arc<dyn Fn(&Jet, &[Jet]) -> Result<Jet> + Send + Sync>;
type Predicate = Arc<dyn Fn(&Point) -> bool + Send + Sync>;

/// Where a function may be sampled.
#[derive(Clone)]
pub struct Domain {
    description: String,
    contains: Predicate,
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Domain({})", self.description)
    }
}

impl Domain {
    pub fn new(
        description: impl Into<String>,
        contains: impl Fn(&Point) -> bool + Send + Sync + 'static,
    ) -> Self {
        Domain {
            description: description.into(),
            contains: Arc::new(contains),
        }
    }

    pub fn everywhere() -> Self {
        Domain::new("all (t, x)", |_| true)
    }

    pub fn t_above(t0: f64) -> Self {
        Domain::new(format!("t > {t0}"), move |z| z.t.re > t0)
    }

    pub fn t_positive() -> Self {
        Domain::t_above(0.0)
    }

    pub fn x_positive() -> Self {
        Domain::new("x > 0", |z| z.x.iter().all(|v| v.re > 0.0))
    }

    pub fn upper_half_plane() -> Self {
        Domain::new("Im t > 0", |z| z.t.im > 0.0)
    }

    /// `x₁ > x₂ > … > xₙ`.
    pub fn ordered() -> Self {
        Domain::new("x1 > x2 > ... > xn", |z| {
            z.x.windows(2).all(|w| w[0].re > w[1].re)
        })
    }

    pub fn and(self, other: Domain) -> Self {
        let (a, b) = (self.contains, other.contains);
        Domain {
            description: format!("{} and {}", self.description, other.description),
            contains: Arc::new(move |z| a(z) && b(z)),
        }
    }

    pub fn contains(&self, z: &Point) -> bool {
        (self.contains)(z)
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

#[derive(Clone)]
pub struct SmoothFn {
    name: String,
    dim: usize,
    domain: Domain,
    eval: Evaluator,
}

impl fmt::Debug for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFn")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .finish()
    }
}

impl SmoothFn {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        domain: Domain,
        eval: impl Fn(&Jet, &[Jet]) -> Result<Jet> + Send + Sync + 'static,
    ) -> Self {
        SmoothFn {
            name: name.into(),
            dim,
            domain,
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Evaluates on arbitrary jets without a domain check.
    pub fn eval_jets(&self, t: &Jet, x: &[Jet]) -> Result<Jet> {
        if x.len() != self.dim {
            return Err(Error::Parameter(format!(
                "{} expects {} space coordinates, got {}",
                self.name,
                self.dim,
                x.len()
            )));
        }
        (self.eval)(t, x)
    }

    fn check(&self, z: &Point) -> Result<()> {
        if z.dim() != self.dim {
            return Err(Error::Parameter(format!(
                "{} expects {} space coordinates, got {}",
                self.name,
                self.dim,
                z.dim()
            )));
        }
        if !self.domain.contains(z) {
            return Err(Error::Domain(format!(
                "{} at t = {}, x = {:?} is outside {}",
                self.name, z.t, z.x, self.domain.description
            )));
        }
        Ok(())
    }

    /// Taylor jet at `z` in the variables `(t, x₁, …, xₙ)`.
    pub fn jet(&self, z: &Point, order: usize) -> Result<Jet> {
        if order > MAX_ORDER {
            return Err(Error::Order {
                needed: order,
                available: MAX_ORDER,
            });
        }
        self.check(z)?;
        let mut seeds = Jet::seed(&z.coords(), order);
        let x = seeds.split_off(1);
        (self.eval)(&seeds[0], &x)
    }

    pub fn value(&self, z: &Point) -> Result<C64> {
        Ok(self.jet(z, 0)?.value())
    }

    /// Partial derivative `∂^α` with `α = (α_t, α_x₁, …)`.
    pub fn partial(&self, z: &Point, alpha: &[u8]) -> Result<C64> {
        let order = alpha.iter().map(|&a| a as usize).sum();
        Ok(self.jet(z, order)?.partial(alpha))
    }

    pub fn scale(&self, c: C64) -> SmoothFn {
        let inner = self.eval.clone();
        SmoothFn {
            name: format!("{c}*{}", self.name),
            dim: self.dim,
            domain: self.domain.clone(),
            eval: Arc::new(move |t, x| Ok(inner(t, x)? * c)),
        }
    }

    pub fn add(&self, other: &SmoothFn) -> SmoothFn {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        SmoothFn {
            name: format!("({} + {})", self.name, other.name),
            dim: self.dim,
            domain: self.domain.clone().and(other.domain.clone()),
            eval: Arc::new(move |t, x| Ok(f(t, x)? + g(t, x)?)),
        }
    }

    pub fn mul(&self, other: &SmoothFn) -> SmoothFn {
        let (f, g) = (self.eval.clone(), other.eval.clone());
        SmoothFn {
            name: format!("{} * {}", self.name, other.name),
            dim: self.dim,
            domain: self.domain.clone().and(other.domain.clone()),
            eval: Arc::new(move |t, x| Ok(f(t, x)? * g(t, x)?)),
        }
    }

    pub fn constant(c: C64, dim: usize) -> SmoothFn {
        SmoothFn::new(format!("{c}"), dim, Domain::everywhere(), move |t, _| {
            Ok(t.lift(c))
        })
    }

    /// Largest relative gap between each mixed partial `∂ⱼ∂ᵢf` of the jet
    /// and a Richardson-extrapolated central difference in `j` of the first
    /// partial `∂ᵢf`, with the step scaled to the coordinate.
    pub fn mixed_partial_asymmetry(&self, z: &Point) -> Result<f64> {
        let jet = self.jet(z, 2)?;
        let n = self.dim + 1;
        let coords = z.coords();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let mut alpha = vec![0u8; n];
                alpha[i] += 1;
                alpha[j] += 1;
                let exact = jet.partial(&alpha);
                let mut di = vec![0u8; n];
                di[i] = 1;
                let shifted = |s: f64| -> Result<C64> {
                    let mut c = z.coords();
                    c[j] += s;
                    let p = Point {
                        t: c[0],
                        x: c[1..].to_vec(),
                    };
                    Ok(self.jet(&p, 1)?.partial(&di))
                };
                let h = 1e-3 * coords[j].norm().clamp(0.1, 1.0);
                let central =
                    |s: f64| -> Result<C64> { Ok((shifted(s)? - shifted(-s)?) / (2.0 * s)) };
                let fd = (4.0 * central(h / 2.0)? - central(h)?) / 3.0;
                worst = worst.max((exact - fd).norm() / (1.0 + exact.norm()));
            }
        }
        Ok(worst)
    }
}

/// One term `c · tᵖ · xᵠ · e^{rt}` of an [`ExpPoly`] exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpTerm {
    pub coeff: C64,
    pub t_pow: i32,
    pub x_pow: u32,
    pub rate: C64,
}

impl ExpTerm {
    pub fn new(coeff: C64, t_pow: i32, x_pow: u32) -> Self {
        ExpTerm {
            coeff,
            t_pow,
            x_pow,
            rate: re(0.0),
        }
    }

    pub fn with_rate(coeff: C64, x_pow: u32, rate: C64) -> Self {
        ExpTerm {
            coeff,
            t_pow: 0,
            x_pow,
            rate,
        }
    }
}

/// `t^r · exp(Σ c tᵖ xᵠ e^{ρt})`, the shape shared by every closed-form
/// reference solution in one space dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpPoly {
    pub terms: Vec<ExpTerm>,
    /// Exponent `r` of the `t^r` prefactor (principal branch).
    pub t_prefactor: f64,
}

impl ExpPoly {
    pub fn new(terms: Vec<ExpTerm>) -> Self {
        ExpPoly {
            terms,
            t_prefactor: 0.0,
        }
    }

    pub fn with_prefactor(mut self, r: f64) -> Self {
        self.t_prefactor = r;
        self
    }

    pub fn exponent<S: Scalar>(&self, t: &S, x: &S) -> S {
        self.terms.iter().fold(t.lift(re(0.0)), |acc, term| {
            let mut v = t.powi(term.t_pow) * x.powi(term.x_pow as i32) * term.coeff;
            if term.rate != re(0.0) {
                v = v * (t.clone() * term.rate).exp();
            }
            acc + v
        })
    }

    pub fn eval<S: Scalar>(&self, t: &S, x: &S) -> Result<S> {
        let e = crate::multiplier::guarded_exp(self.exponent(t, x))?;
        if self.t_prefactor == 0.0 {
            Ok(e)
        } else {
            Ok(t.powc(re(self.t_prefactor)) * e)
        }
    }

    pub fn into_smooth(self, name: impl Into<String>, domain: Domain) -> SmoothFn {
        SmoothFn::new(name, 1, domain, move |t, x| self.eval(t, &x[0]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SmoothFn {
        ExpPoly::new(vec![
            ExpTerm::new(re(0.3), 1, 1),
            ExpTerm::new(re(-0.25), -1, 2),
            ExpTerm::with_rate(re(0.5), 1, re(-0.7)),
        ])
        .with_prefactor(-0.5)
        .into_smooth("sample", Domain::t_positive())
    }

    #[test]
    fn exppoly_matches_direct_formula() {
        let f = sample();
        let (t, x): (f64, f64) = (0.8, 0.6);
        let direct =
            t.powf(-0.5) * (0.3 * t * x - 0.25 * x * x / t + 0.5 * x * (-0.7 * t).exp()).exp();
        assert!((f.value(&Point::tx(t, x)).unwrap() - direct).norm() < 1e-14);
    }

    #[test]
    fn partials_agree_with_finite_differences() {
        let f = sample();
        let z = Point::tx(0.8, 0.6);
        let h = 1e-5;
        let dt = (f.value(&Point::tx(0.8 + h, 0.6)).unwrap()
            - f.value(&Point::tx(0.8 - h, 0.6)).unwrap())
            / (2.0 * h);
        assert!((f.partial(&z, &[1, 0]).unwrap() - dt).norm() < 1e-8);
        let dxx = (f.value(&Point::tx(0.8, 0.6 + h)).unwrap() - 2.0 * f.value(&z).unwrap()
            + f.value(&Point::tx(0.8, 0.6 - h)).unwrap())
            / (h * h);
        assert!((f.partial(&z, &[0, 2]).unwrap() - dxx).norm() < 1e-4);
        assert!(f.mixed_partial_asymmetry(&z).unwrap() < 1e-8);
    }

    #[test]
    fn domain_and_order_errors() {
        let f = sample();
        assert!(matches!(
            f.value(&Point::tx(-1.0, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            f.jet(&Point::tx(1.0, 0.0), MAX_ORDER + 1),
            Err(Error::Order { .. })
        ));
        assert!(f.value(&Point::real(1.0, &[0.0, 1.0])).is_err());
    }

    #[test]
    fn algebra_of_functions() {
        let f = sample();
        let z = Point::tx(0.9, -0.2);
        let v = f.value(&z).unwrap();
        assert!((f.scale(re(2.0)).add(&f).value(&z).unwrap() - 3.0 * v).norm() < 1e-14);
        assert!(
            (f.mul(&SmoothFn::constant(re(0.5), 1)).value(&z).unwrap() - 0.5 * v).norm() < 1e-14
        );
    }
}
