//! The real Clifford algebra `Cl_m` with negative definite signature.
//!
//! Basis elements `e_A` are indexed by strictly increasing index sets
//! `A ⊆ {1..m}`, stored as bitmasks. The generators satisfy
//! `e_i e_j + e_j e_i = -2 δ_ij`; products of basis blades are reduced to
//! canonical order by counting transpositions.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational, Scalar};

/// Largest supported ambient dimension (2^m coefficients per multivector).
pub const MAX_DIM: usize = 8;

pub fn check_dim(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Config("dimension must be positive".into()));
    }
    if m > MAX_DIM {
        return Err(Error::DimensionTooLarge(m, MAX_DIM));
    }
    Ok(())
}

/// A basis blade `e_A`, bit `i-1` set when `i ∈ A`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Blade(u32);

impl Blade {
    pub const SCALAR: Blade = Blade(0);

    pub fn from_bits(bits: u32) -> Self {
        Blade(bits)
    }

    /// Generator `e_j` for a 1-based index.
    pub fn generator(j: usize) -> Self {
        Blade(1 << (j - 1))
    }

    /// Build from 1-based strictly increasing indices within `1..=m`.
    pub fn from_indices(indices: &[usize], m: usize) -> Result<Self> {
        let mut bits = 0u32;
        let mut last = 0usize;
        for &i in indices {
            if i <= last || i > m {
                return Err(Error::InvalidBlade(indices.to_vec()));
            }
            bits |= 1 << (i - 1);
            last = i;
        }
        Ok(Blade(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|b| self.0 & (1 << b) != 0).map(|b| b + 1).collect()
    }

    /// `(-1)^{|A|(|A|-1)/2}`
    pub fn reversion_sign(self) -> i8 {
        let g = self.grade();
        if (g * (g.saturating_sub(1)) / 2) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Sign of the Clifford conjugate, `(-1)^{|A|(|A|+1)/2}`.
    pub fn conjugation_sign(self) -> i8 {
        let g = self.grade();
        if (g * (g + 1) / 2) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `e_A e_B = sign · e_{A Δ B}`.
    pub fn product(self, other: Blade) -> (i8, Blade) {
        let mut swaps = 0u32;
        let mut a = self.0 >> 1;
        while a != 0 {
            swaps += (a & other.0).count_ones();
            a >>= 1;
        }
        // each shared generator squares to -1
        swaps += (self.0 & other.0).count_ones();
        let sign = if swaps % 2 == 0 { 1 } else { -1 };
        (sign, Blade(self.0 ^ other.0))
    }

    fn display_key(self) -> (usize, Vec<usize>) {
        (self.grade(), self.indices())
    }
}

impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices().iter().map(|i| i.to_string()).collect();
        write!(f, "e{{{}}}", idx.join(","))
    }
}

/// An element of `Cl_m` over the scalar ring `S`.
#[derive(Clone, PartialEq)]
pub struct Multivector<S = Rational> {
    dim: usize,
    coeffs: BTreeMap<Blade, S>,
}

fn signed<S: Scalar>(sign: i8, v: S) -> S {
    if sign < 0 {
        -v
    } else {
        v
    }
}

impl<S: Scalar> Multivector<S> {
    /// Zero element of `Cl_m`. Panics if `m` exceeds [`MAX_DIM`].
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        Self {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn scalar(dim: usize, s: S) -> Self {
        Self::blade(dim, Blade::SCALAR, s)
    }

    pub fn one(dim: usize) -> Self {
        Self::scalar(dim, S::one())
    }

    pub fn blade(dim: usize, blade: Blade, s: S) -> Self {
        let mut mv = Self::zero(dim);
        mv.add_term(blade, s);
        mv
    }

    /// Basis element `e_A` from 1-based indices.
    pub fn basis(dim: usize, indices: &[usize]) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::blade(dim, Blade::from_indices(indices, dim)?, S::one()))
    }

    /// Generator `e_j`.
    pub fn e(dim: usize, j: usize) -> Self {
        assert!(j >= 1 && j <= dim);
        Self::blade(dim, Blade::generator(j), S::one())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, blade: Blade) -> S {
        self.coeffs.get(&blade).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &S)> {
        self.coeffs.iter().map(|(b, s)| (*b, s))
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Blade, S)> {
        self.coeffs.into_iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, blade: Blade, s: S) {
        if s.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&blade) {
            Some(c) => {
                let v = std::mem::replace(c, S::zero());
                *c = v + s;
                if c.is_zero() {
                    self.coeffs.remove(&blade);
                }
            }
            None => {
                self.coeffs.insert(blade, s);
            }
        }
    }

    /// Insert a coefficient without normalising; zeros may be stored.
    pub fn set_raw(&mut self, blade: Blade, s: S) {
        self.coeffs.insert(blade, s);
    }

    /// Remove stored zero coefficients.
    pub fn normalize(&mut self) {
        self.coeffs.retain(|_, s| !s.is_zero());
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|s| s.is_zero())
    }

    pub fn scalar_part(&self) -> S {
        self.coeff(Blade::SCALAR)
    }

    pub fn grade_part(&self, grade: usize) -> Self {
        Self {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(b, _)| b.grade() == grade)
                .map(|(b, s)| (*b, s.clone()))
                .collect(),
        }
    }

    pub fn is_scalar(&self) -> bool {
        self.coeffs
            .iter()
            .all(|(b, s)| *b == Blade::SCALAR || s.is_zero())
    }

    pub fn geometric_product(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = Self::zero(self.dim);
        for (a, x) in &self.coeffs {
            for (b, y) in &other.coeffs {
                let (sign, c) = a.product(*b);
                out.add_term(c, signed(sign, x.clone() * y.clone()));
            }
        }
        Ok(out)
    }

    fn map_signs(&self, sign: impl Fn(Blade) -> i8) -> Self {
        Self {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .map(|(b, s)| (*b, signed(sign(*b), s.clone())))
                .collect(),
        }
    }

    /// `ã`: reverses the order of generators in every blade.
    pub fn reversion(&self) -> Self {
        self.map_signs(Blade::reversion_sign)
    }

    /// Clifford conjugate `ā`; `Sc(ā b) = Σ_A a_A b_A`.
    pub fn conjugate(&self) -> Self {
        self.map_signs(Blade::conjugation_sign)
    }

    pub fn grade_involution(&self) -> Self {
        self.map_signs(|b| if b.grade() % 2 == 0 { 1 } else { -1 })
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.dim);
        for (b, x) in &self.coeffs {
            out.add_term(*b, x.clone() * s.clone());
        }
        out
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Multivector<T> {
        let mut out = Multivector::zero(self.dim);
        for (b, x) in &self.coeffs {
            out.add_term(*b, f(x));
        }
        out
    }

    /// The 1-vector part as components, if nothing else is present.
    pub fn to_vector(&self) -> Option<VectorM<S>> {
        if self.coeffs.iter().any(|(b, s)| b.grade() != 1 && !s.is_zero()) {
            return None;
        }
        Some(VectorM(
            (1..=self.dim)
                .map(|j| self.coeff(Blade::generator(j)))
                .collect(),
        ))
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .values()
            .map(|s| s.magnitude())
            .fold(0.0, f64::max)
    }
}

impl Multivector<Rational> {
    /// Parse the text form `coef*e{i,j,...}` joined by `+`.
    ///
    /// `3/2*e{} + -1*e{1,2}`; a bare `0` denotes zero.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let mut out = Self::zero(dim);
        let text = text.trim();
        if text == "0" || text.is_empty() {
            return Ok(out);
        }
        for raw in text.split('+') {
            let term = raw.trim();
            let (coef, blade) = term
                .split_once('*')
                .ok_or_else(|| Error::Parse(format!("term `{term}` lacks `*`")))?;
            let coef = parse_rational(coef)
                .ok_or_else(|| Error::Parse(format!("bad coefficient `{coef}`")))?;
            let blade = blade.trim();
            let inner = blade
                .strip_prefix("e{")
                .and_then(|b| b.strip_suffix('}'))
                .ok_or_else(|| Error::Parse(format!("bad blade `{blade}`")))?;
            let indices = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner
                    .split(',')
                    .map(|i| {
                        i.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad index `{i}`")))
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            out.add_term(Blade::from_indices(&indices, dim)?, coef);
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> Multivector<f64> {
        self.map(crate::scalar::rat_to_f64)
    }
}

impl<S: Scalar + fmt::Display> fmt::Display for Multivector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(Blade, &S)> = self
            .coeffs
            .iter()
            .filter(|(_, s)| !s.is_zero())
            .map(|(b, s)| (*b, s))
            .collect();
        if terms.is_empty() {
            return write!(f, "0");
        }
        terms.sort_by_key(|(b, _)| b.display_key());
        let parts: Vec<String> = terms.iter().map(|(b, s)| format!("{s}*{b}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<S: Scalar + fmt::Debug> fmt::Debug for Multivector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.coeffs.iter().collect();
        terms.sort_by_key(|(b, _)| b.display_key());
        write!(f, "Multivector[m={}](", self.dim)?;
        for (i, (b, s)) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{s:?}*{b}")?;
        }
        write!(f, ")")
    }
}

impl<S: Scalar> AddAssign<&Multivector<S>> for Multivector<S> {
    fn add_assign(&mut self, rhs: &Multivector<S>) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (b, s) in &rhs.coeffs {
            self.add_term(*b, s.clone());
        }
    }
}

impl<S: Scalar> AddAssign for Multivector<S> {
    fn add_assign(&mut self, rhs: Multivector<S>) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (b, s) in rhs.coeffs {
            self.add_term(b, s);
        }
    }
}

impl<S: Scalar> Add for &Multivector<S> {
    type Output = Multivector<S>;
    fn add(self, rhs: &Multivector<S>) -> Multivector<S> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<S: Scalar> Add for Multivector<S> {
    type Output = Multivector<S>;
    fn add(mut self, rhs: Multivector<S>) -> Multivector<S> {
        self += rhs;
        self
    }
}

impl<S: Scalar> Neg for &Multivector<S> {
    type Output = Multivector<S>;
    fn neg(self) -> Multivector<S> {
        self.map_signs(|_| -1)
    }
}

impl<S: Scalar> Neg for Multivector<S> {
    type Output = Multivector<S>;
    fn neg(self) -> Multivector<S> {
        -&self
    }
}

impl<S: Scalar> Sub for &Multivector<S> {
    type Output = Multivector<S>;
    fn sub(self, rhs: &Multivector<S>) -> Multivector<S> {
        self + &(-rhs)
    }
}

impl<S: Scalar> Sub for Multivector<S> {
    type Output = Multivector<S>;
    fn sub(self, rhs: Multivector<S>) -> Multivector<S> {
        &self - &rhs
    }
}

/// Geometric product; panics on dimension mismatch (use
/// [`Multivector::geometric_product`] for a checked variant).
impl<S: Scalar> Mul for &Multivector<S> {
    type Output = Multivector<S>;
    fn mul(self, rhs: &Multivector<S>) -> Multivector<S> {
        self.geometric_product(rhs).expect("dimension mismatch")
    }
}

impl<S: Scalar> Mul for Multivector<S> {
    type Output = Multivector<S>;
    fn mul(self, rhs: Multivector<S>) -> Multivector<S> {
        &self * &rhs
    }
}

/// A vector of `R^m`, embedded in `Cl_m` as `Σ x_j e_j`.
#[derive(Clone, PartialEq, Debug)]
pub struct VectorM<S = Rational>(pub Vec<S>);

impl<S: Scalar> VectorM<S> {
    pub fn new(components: Vec<S>) -> Self {
        Self(components)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[S] {
        &self.0
    }

    pub fn embed(&self) -> Multivector<S> {
        embed_vector(self)
    }

    pub fn norm_sq(&self) -> S {
        self.0
            .iter()
            .fold(S::zero(), |acc, x| acc + x.clone() * x.clone())
    }
}

/// `(x_1,…,x_m) ↦ Σ x_j e_j`.
pub fn embed_vector<S: Scalar>(x: &VectorM<S>) -> Multivector<S> {
    let mut mv = Multivector::zero(x.dim());
    for (j, c) in x.0.iter().enumerate() {
        mv.add_term(Blade::generator(j + 1), c.clone());
    }
    mv
}

/// Reflection `a x a` of `x` along the unit vector `a`.
pub fn reflect<S: Scalar>(a: &VectorM<S>, x: &VectorM<S>) -> Result<VectorM<S>> {
    if a.dim() != x.dim() {
        return Err(Error::DimensionMismatch(a.dim(), x.dim()));
    }
    if !a.norm_sq().is_one_approx() {
        return Err(Error::NotUnit);
    }
    let am = a.embed();
    let prod = &(&am * &x.embed()) * &am;
    let scale = x.norm_sq().magnitude().sqrt();
    let mut out = Vec::with_capacity(x.dim());
    for (b, s) in prod.terms() {
        if b.grade() != 1 && !s.is_negligible(scale) {
            return Err(Error::Internal(format!(
                "reflection produced a grade-{} component",
                b.grade()
            )));
        }
    }
    for j in 1..=x.dim() {
        out.push(prod.coeff(Blade::generator(j)));
    }
    Ok(VectorM(out))
}

pub fn scalar_part<S: Scalar>(a: &Multivector<S>) -> S {
    a.scalar_part()
}

pub fn reversion<S: Scalar>(a: &Multivector<S>) -> Multivector<S> {
    a.reversion()
}

pub fn geometric_product<S: Scalar>(a: &Multivector<S>, b: &Multivector<S>) -> Result<Multivector<S>> {
    a.geometric_product(b)
}

/// Every basis blade of `Cl_m` in grade-then-lexicographic order.
pub fn all_blades(m: usize) -> Vec<Blade> {
    let mut blades: Vec<Blade> = (0..(1u32 << m)).map(Blade).collect();
    blades.sort_by_key(|b| b.display_key());
    blades
}

impl<S: Scalar> Multivector<S> {
    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.scalar_part().is_one()
    }
}
