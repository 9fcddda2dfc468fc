//! Scalar abstraction shared by plain complex numbers and Taylor jets.
//!
//! Every closed-form formula in the crate (actions, multipliers, reference
//! solutions) is written once against [`Scalar`]. Evaluating it with
//! `Complex64` gives values; evaluating it with [`crate::jet::Jet`] gives
//! exact partial derivatives through forward-mode differentiation.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

pub type C64 = Complex64;

/// Shorthand for a real number lifted to `Complex64`.
#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<C64, Output = Self>
    + Sub<C64, Output = Self>
    + Mul<C64, Output = Self>
    + Div<C64, Output = Self>
{
    /// Constant part (the value at the expansion point).
    fn value(&self) -> C64;

    /// A constant living in the same space as `self`.
    fn lift(&self, c: C64) -> Self;

    fn exp(&self) -> Self;

    /// Principal logarithm.
    fn ln(&self) -> Self;

    /// Principal square root.
    fn sqrt(&self) -> Self;

    /// Principal power `exp(p ln self)`.
    fn powc(&self, p: C64) -> Self;

    fn recip(&self) -> Self;

    fn powi(&self, n: i32) -> Self {
        match n {
            0 => self.lift(C64::new(1.0, 0.0)),
            n if n < 0 => self.powi(-n).recip(),
            n => {
                let mut acc = self.clone();
                for _ in 1..n {
                    acc = acc * self.clone();
                }
                acc
            }
        }
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl Scalar for C64 {
    #[inline]
    fn value(&self) -> C64 {
        *self
    }
    #[inline]
    fn lift(&self, c: C64) -> Self {
        c
    }
    #[inline]
    fn exp(&self) -> Self {
        Complex64::exp(*self)
    }
    #[inline]
    fn ln(&self) -> Self {
        Complex64::ln(*self)
    }
    #[inline]
    fn sqrt(&self) -> Self {
        Complex64::sqrt(*self)
    }
    #[inline]
    fn powc(&self, p: C64) -> Self {
        Complex64::powc(*self, p)
    }
    #[inline]
    fn recip(&self) -> Self {
        C64::new(1.0, 0.0) / *self
    }
    fn powi(&self, n: i32) -> Self {
        Complex64::powi(self, n)
    }
}

/// True when `z` has no imaginary part beyond `tol` relative to its size.
pub fn is_real(z: C64, tol: f64) -> bool {
    z.im.abs() <= tol * (1.0 + z.re.abs())
}

/// True when `z` is real or purely imaginary (within `tol`).
pub fn is_real_or_imaginary(z: C64, tol: f64) -> bool {
    let scale = 1.0 + z.norm();
    z.im.abs() <= tol * scale || z.re.abs() <= tol * scale
}
