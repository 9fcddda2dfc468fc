//! Potential families, their parameters, and space-time points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{is_real_or_imaginary, re, Scalar, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `V = 0`.
    Free,
    /// `V = α Σ 1/x_j²`.
    InverseQuadratic,
    /// `V = α + βx`, one dimension.
    Linear,
    /// `V = α + ω²x²`, one dimension.
    Quadratic,
    /// `V = Σ (α + βx_j) + Σ_{j,k} a_jk / (x_j − x_k)²`.
    NdimLinear,
    /// Two-dimensional cubic nonlinear equation `∂ₜψ = k(Δ + λ|ψ|²)ψ`.
    Nls2d,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Free => "free",
            Family::InverseQuadratic => "inverse-quadratic",
            Family::Linear => "linear",
            Family::Quadratic => "quadratic",
            Family::NdimLinear => "ndim-linear",
            Family::Nls2d => "nls2d",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "free" => Family::Free,
            "inverse-quadratic" | "invq" => Family::InverseQuadratic,
            "linear" => Family::Linear,
            "quadratic" => Family::Quadratic,
            "ndim-linear" | "ndim" => Family::NdimLinear,
            "nls2d" | "nls" => Family::Nls2d,
            other => return Err(Error::Parameter(format!("unknown family '{other}'"))),
        })
    }
}

/// Family tag plus every parameter any family needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub k: C64,
    pub alpha: f64,
    pub beta: f64,
    pub omega: C64,
    pub n: usize,
    /// Row-major `n × n` pair couplings (`NdimLinear` only).
    pub ajk: Vec<f64>,
    /// Nonlinear coupling (`Nls2d` only).
    pub nls_lambda: f64,
}

impl FamilySpec {
    fn base(family: Family, k: C64, n: usize) -> Self {
        FamilySpec {
            family,
            k,
            alpha: 0.0,
            beta: 0.0,
            omega: re(0.0),
            n,
            ajk: vec![0.0; n * n],
            nls_lambda: 0.0,
        }
    }

    pub fn free(k: C64, n: usize) -> Self {
        FamilySpec::base(Family::Free, k, n)
    }

    pub fn inverse_quadratic(k: C64, alpha: f64, n: usize) -> Self {
        FamilySpec {
            alpha,
            ..FamilySpec::base(Family::InverseQuadratic, k, n)
        }
    }

    pub fn linear(k: C64, alpha: f64, beta: f64) -> Self {
        FamilySpec {
            alpha,
            beta,
            ..FamilySpec::base(Family::Linear, k, 1)
        }
    }

    pub fn quadratic(k: C64, alpha: f64, omega: C64) -> Self {
        FamilySpec {
            alpha,
            omega,
            ..FamilySpec::base(Family::Quadratic, k, 1)
        }
    }

    pub fn ndim_linear(k: C64, alpha: f64, beta: f64, n: usize, ajk: Vec<f64>) -> Self {
        FamilySpec {
            alpha,
            beta,
            ajk,
            ..FamilySpec::base(Family::NdimLinear, k, n)
        }
    }

    /// Uniform coupling `a_jk = a` for `j ≠ k`.
    pub fn ndim_linear_uniform(k: C64, alpha: f64, beta: f64, n: usize, a: f64) -> Self {
        let ajk = (0..n * n)
            .map(|i| if i / n == i % n { 0.0 } else { a })
            .collect();
        FamilySpec::ndim_linear(k, alpha, beta, n, ajk)
    }

    pub fn nls2d(k: C64, lambda: f64) -> Self {
        FamilySpec {
            nls_lambda: lambda,
            ..FamilySpec::base(Family::Nls2d, k, 2)
        }
    }

    pub fn ajk(&self, j: usize, k: usize) -> f64 {
        self.ajk[j * self.n + k]
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == re(0.0) {
            return Err(Error::ZeroK);
        }
        if !is_real_or_imaginary(self.k, 1e-14) {
            return Err(Error::Parameter(format!(
                "k = {} must be real or purely imaginary",
                self.k
            )));
        }
        if self.n == 0 {
            return Err(Error::Parameter("dimension n must be at least 1".into()));
        }
        match self.family {
            Family::Linear | Family::Quadratic if self.n != 1 => {
                return Err(Error::Parameter(format!(
                    "{} family is one-dimensional",
                    self.family.name()
                )));
            }
            Family::Nls2d if self.n != 2 => {
                return Err(Error::Parameter("nls2d family needs n = 2".into()));
            }
            Family::Quadratic => {
                if self.omega == re(0.0) {
                    return Err(Error::ZeroOmega);
                }
                if !is_real_or_imaginary(self.omega, 1e-14) {
                    return Err(Error::Parameter(
                        "omega must be real or purely imaginary".into(),
                    ));
                }
            }
            Family::NdimLinear => {
                if self.ajk.len() != self.n * self.n {
                    return Err(Error::Parameter("a_jk must be n x n".into()));
                }
                for j in 0..self.n {
                    if self.ajk(j, j) != 0.0 {
                        return Err(Error::Parameter("a_jj must vanish".into()));
                    }
                    for k in 0..j {
                        if self.ajk(j, k) != self.ajk(k, j) {
                            return Err(Error::Parameter("a_jk must be symmetric".into()));
                        }
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// `kω`, the rate in `u = exp(4kωt)`.
    pub fn k_omega(&self) -> C64 {
        self.k * self.omega
    }

    /// Potential `V(t, x)`; zero for `Nls2d`, whose nonlinear term lives in
    /// the residual.
    pub fn potential<S: Scalar>(&self, x: &[S]) -> S {
        let zero = x[0].lift(re(0.0));
        match self.family {
            Family::Free | Family::Nls2d => zero,
            Family::InverseQuadratic => x
                .iter()
                .fold(zero, |acc, xj| acc + xj.square().recip() * re(self.alpha)),
            Family::Linear => x[0].clone() * re(self.beta) + re(self.alpha),
            Family::Quadratic => x[0].square() * self.omega * self.omega + re(self.alpha),
            Family::NdimLinear => {
                let mut v = zero;
                for xj in x {
                    v = v + xj.clone() * re(self.beta) + re(self.alpha);
                }
                for j in 0..self.n {
                    for k in 0..self.n {
                        let a = self.ajk(j, k);
                        if a != 0.0 {
                            let d = x[j].clone() - x[k].clone();
                            v = v + d.square().recip() * re(a);
                        }
                    }
                }
                v
            }
        }
    }
}

/// A space-time point `Z = {t, x}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub t: C64,
    pub x: Vec<C64>,
}

impl Point {
    pub fn new(t: C64, x: Vec<C64>) -> Self {
        Point { t, x }
    }

    /// Real one-dimensional point.
    pub fn tx(t: f64, x: f64) -> Self {
        Point {
            t: re(t),
            x: vec![re(x)],
        }
    }

    pub fn real(t: f64, x: &[f64]) -> Self {
        Point {
            t: re(t),
            x: x.iter().map(|&v| re(v)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Coordinates `(t, x₁, …, xₙ)` as one slice-friendly vector.
    pub fn coords(&self) -> Vec<C64> {
        std::iter::once(self.t)
            .chain(self.x.iter().copied())
            .collect()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.t.im.abs() <= tol && self.x.iter().all(|v| v.im.abs() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(FamilySpec::linear(re(1.0), 0.3, 0.7).validate().is_ok());
        assert_eq!(
            FamilySpec::linear(re(0.0), 0.3, 0.7).validate(),
            Err(Error::ZeroK)
        );
        assert!(FamilySpec::linear(C64::new(1.0, 1.0), 0.0, 0.0)
            .validate()
            .is_err());
        assert_eq!(
            FamilySpec::quadratic(re(1.0), 0.0, re(0.0)).validate(),
            Err(Error::ZeroOmega)
        );
        let mut bad = FamilySpec::ndim_linear_uniform(re(1.0), 0.0, 0.0, 3, 0.5);
        assert!(bad.validate().is_ok());
        bad.ajk[0] = 1.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn potentials() {
        let x = [re(2.0)];
        assert_eq!(FamilySpec::linear(re(1.0), 0.3, 0.5).potential(&x), re(1.3));
        assert_eq!(
            FamilySpec::quadratic(re(1.0), 0.3, re(0.5)).potential(&x),
            re(1.3)
        );
        assert_eq!(
            FamilySpec::inverse_quadratic(re(1.0), 2.0, 1).potential(&x),
            re(0.5)
        );
        let nd = FamilySpec::ndim_linear_uniform(re(1.0), 0.0, 0.0, 2, 1.0);
        // both ordered pairs contribute
        assert_eq!(nd.potential(&[re(1.0), re(0.0)]), re(2.0));
    }

    #[test]
    fn family_names_parse() {
        for f in [
            Family::Free,
            Family::InverseQuadratic,
            Family::Linear,
            Family::Quadratic,
            Family::NdimLinear,
            Family::Nls2d,
        ] {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("cubic".parse::<Family>().is_err());
    }
}
