//! Coefficient rings for multivectors.
//!
//! Three rings are used: [`Rational`] for every exact identity check,
//! [`ExactScalar`] for exact sphere and ball integrals (finite Laurent sums in
//! the sphere area `ω_m`), and `f64` for numeric kernels and quadrature.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary precision rational number.
pub type Rational = BigRational;

/// `n/d` as a [`Rational`]. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // ratio of huge integers: scale both down
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Parse `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Surface area of the unit sphere `S^{m-1}` in `R^m`.
pub fn omega(m: usize) -> f64 {
    // ω_1 = 2, ω_2 = 2π, ω_{m+2} = 2π ω_m / m
    let mut w = if m % 2 == 1 { 2.0 } else { 2.0 * std::f64::consts::PI };
    let mut d = if m % 2 == 1 { 1 } else { 2 };
    while d < m {
        w *= 2.0 * std::f64::consts::PI / d as f64;
        d += 2;
    }
    w
}

/// Ring operations shared by all coefficient types.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_i64(v: i64) -> Self;

    /// Equality with one: exact for exact rings, 1e-12 relative for floats.
    fn is_one_approx(&self) -> bool;

    /// Zero test relative to a magnitude: exact for exact rings.
    fn is_negligible(&self, scale: f64) -> bool;

    /// Rough magnitude used to scale float tolerances.
    fn magnitude(&self) -> f64;
}

impl Scalar for Rational {
    fn from_i64(v: i64) -> Self {
        int(v)
    }
    fn is_one_approx(&self) -> bool {
        self.is_one()
    }
    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
    fn magnitude(&self) -> f64 {
        rat_to_f64(&self.abs())
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn is_one_approx(&self) -> bool {
        (self - 1.0).abs() <= 1e-12
    }
    fn is_negligible(&self, scale: f64) -> bool {
        self.abs() <= 1e-12 * scale.max(1.0)
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

/// Finite sum `Σ_p q_p ω_m^p` with rational `q_p`.
///
/// Zero coefficients are never stored, so equality is coefficient-wise.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct ExactScalar {
    terms: BTreeMap<i32, Rational>,
}

impl ExactScalar {
    pub fn rational(q: Rational) -> Self {
        Self::omega_pow(0, q)
    }

    /// `q · ω^p`.
    pub fn omega_pow(p: i32, q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(p, q);
        }
        Self { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rational)> {
        self.terms.iter().map(|(p, q)| (*p, q))
    }

    pub fn coefficient(&self, p: i32) -> Rational {
        self.terms.get(&p).cloned().unwrap_or_else(Rational::zero)
    }

    /// The single power present, if the value is a pure monomial in ω.
    pub fn as_monomial(&self) -> Option<(i32, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(p, q)| (*p, q))
        } else {
            None
        }
    }

    pub fn to_f64(&self, m: usize) -> f64 {
        let w = omega(m);
        self.terms
            .iter()
            .map(|(p, q)| rat_to_f64(q) * w.powi(*p))
            .sum()
    }

    fn insert_add(&mut self, p: i32, q: Rational) {
        let entry = self.terms.entry(p).or_insert_with(Rational::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.remove(&p);
        }
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(p, q)| format!("{q}*w^{p}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for ExactScalar {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (p, q) in rhs.terms {
            self.insert_add(p, q);
        }
        self
    }
}

impl AddAssign for ExactScalar {
    fn add_assign(&mut self, rhs: Self) {
        for (p, q) in rhs.terms {
            self.insert_add(p, q);
        }
    }
}

impl Neg for ExactScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            terms: self.terms.into_iter().map(|(p, q)| (p, -q)).collect(),
        }
    }
}

impl Sub for ExactScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for ExactScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = ExactScalar::default();
        for (p, a) in &self.terms {
            for (r, b) in &rhs.terms {
                out.insert_add(p + r, a * b);
            }
        }
        out
    }
}

impl Zero for ExactScalar {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for ExactScalar {
    fn one() -> Self {
        Self::rational(Rational::one())
    }
}

impl Scalar for ExactScalar {
    fn from_i64(v: i64) -> Self {
        Self::rational(int(v))
    }
    fn is_one_approx(&self) -> bool {
        self.is_one()
    }
    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
    fn magnitude(&self) -> f64 {
        self.terms.values().map(|q| rat_to_f64(&q.abs())).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_values() {
        assert!((omega(2) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((omega(3) - 4.0 * std::f64::consts::PI).abs() < 1e-13);
        // ω_5 = 8π²/3
        let pi = std::f64::consts::PI;
        assert!((omega(5) - 8.0 * pi * pi / 3.0).abs() < 1e-12);
        assert!((omega(4) - 2.0 * pi * pi).abs() < 1e-12);
    }

    #[test]
    fn exact_scalar_ring() {
        let a = ExactScalar::omega_pow(1, rat(1, 3));
        let b = ExactScalar::omega_pow(1, rat(2, 3));
        assert_eq!(a.clone() + b.clone(), ExactScalar::omega_pow(1, int(1)));
        assert_eq!(a.clone() * b, ExactScalar::omega_pow(2, rat(2, 9)));
        assert!((a.clone() - a).is_zero());
        let inv = ExactScalar::omega_pow(-1, int(2));
        assert_eq!(
            inv * ExactScalar::omega_pow(1, rat(1, 2)),
            ExactScalar::one()
        );
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("3/2"), Some(rat(3, 2)));
        assert_eq!(parse_rational("-4"), Some(int(-4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
