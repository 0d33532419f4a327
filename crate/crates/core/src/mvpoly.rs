//! Polynomials `f(x, u)` in two vector variables with Clifford coefficients,
//! and the first order operators built from them.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::clifford::{check_dim, Blade, Multivector, MAX_DIM};
use crate::error::{Error, Result};
use crate::scalar::{int, rat_to_f64, Rational};

/// Exponent multi-index; entries beyond the ambient dimension stay zero.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Debug)]
pub struct Mono([u8; MAX_DIM]);

impl Mono {
    pub const ONE: Mono = Mono([0; MAX_DIM]);

    /// `v_j` for a 1-based index.
    pub fn var(j: usize) -> Self {
        let mut e = [0; MAX_DIM];
        e[j - 1] = 1;
        Mono(e)
    }

    pub fn from_exponents(exps: &[u32]) -> Result<Self> {
        if exps.len() > MAX_DIM {
            return Err(Error::DimensionTooLarge(exps.len(), MAX_DIM));
        }
        let mut e = [0; MAX_DIM];
        for (slot, &x) in e.iter_mut().zip(exps) {
            *slot = u8::try_from(x).map_err(|_| Error::Parse(format!("exponent {x} too large")))?;
        }
        Ok(Mono(e))
    }

    pub fn exponent(&self, j: usize) -> u32 {
        self.0[j - 1] as u32
    }

    pub fn exponents(&self, dim: usize) -> Vec<u32> {
        self.0[..dim].iter().map(|&e| e as u32).collect()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        Mono(e)
    }

    /// `∂_j` of the monomial: (multiplier, result) or `None` when it vanishes.
    pub fn derive(&self, j: usize) -> Option<(u32, Mono)> {
        let e = self.0[j - 1];
        if e == 0 {
            return None;
        }
        let mut out = self.0;
        out[j - 1] -= 1;
        Some((e as u32, Mono(out)))
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        let mut v = 1.0;
        for (x, &e) in point.iter().zip(self.0.iter()) {
            if e > 0 {
                v *= x.powi(e as i32);
            }
        }
        v
    }

    /// All monomials of total degree `d` in `m` variables, in a fixed order.
    pub fn all_of_degree(m: usize, d: u32) -> Vec<Mono> {
        let mut out = Vec::new();
        let mut cur = [0u8; MAX_DIM];
        fn rec(m: usize, pos: usize, left: u32, cur: &mut [u8; MAX_DIM], out: &mut Vec<Mono>) {
            if pos + 1 == m {
                cur[pos] = left as u8;
                out.push(Mono(*cur));
                cur[pos] = 0;
                return;
            }
            for e in (0..=left).rev() {
                cur[pos] = e as u8;
                rec(m, pos + 1, left - e, cur, out);
            }
            cur[pos] = 0;
        }
        if m == 0 {
            return out;
        }
        rec(m, 0, d, &mut cur, &mut out);
        out
    }

    pub fn all_up_to_degree(m: usize, d: u32) -> Vec<Mono> {
        (0..=d).flat_map(|k| Mono::all_of_degree(m, k)).collect()
    }
}

/// Which vector variable an operator acts on.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Slot {
    X,
    U,
}

/// Key of a term: `(x-exponents, u-exponents)`.
pub type TermKey = (Mono, Mono);

/// `Σ c_{α,β} x^α u^β` with `c_{α,β} ∈ Cl_m` over the rationals.
#[derive(Clone, PartialEq)]
pub struct CPoly {
    dim: usize,
    terms: BTreeMap<TermKey, Multivector>,
}

impl CPoly {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_DIM && dim > 0, "unsupported dimension {dim}");
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Multivector) -> Self {
        let mut p = Self::zero(c.dim());
        p.add_term((Mono::ONE, Mono::ONE), c);
        p
    }

    pub fn scalar(dim: usize, q: Rational) -> Self {
        Self::constant(Multivector::scalar(dim, q))
    }

    pub fn one(dim: usize) -> Self {
        Self::scalar(dim, Rational::one())
    }

    pub fn term(x: Mono, u: Mono, c: Multivector) -> Self {
        let mut p = Self::zero(c.dim());
        p.add_term((x, u), c);
        p
    }

    /// Scalar monomial `x^α u^β` with coefficient 1.
    pub fn monomial(dim: usize, x: Mono, u: Mono) -> Self {
        Self::term(x, u, Multivector::one(dim))
    }

    /// The coordinate `x_j` or `u_j`.
    pub fn var(dim: usize, slot: Slot, j: usize) -> Self {
        match slot {
            Slot::X => Self::monomial(dim, Mono::var(j), Mono::ONE),
            Slot::U => Self::monomial(dim, Mono::ONE, Mono::var(j)),
        }
    }

    /// The 1-vector `Σ_j x_j e_j` (or the same in `u`).
    pub fn vector_var(dim: usize, slot: Slot) -> Self {
        let mut p = Self::zero(dim);
        for j in 1..=dim {
            let key = match slot {
                Slot::X => (Mono::var(j), Mono::ONE),
                Slot::U => (Mono::ONE, Mono::var(j)),
            };
            p.add_term(key, Multivector::e(dim, j));
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Multivector)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, key: &TermKey) -> Multivector {
        self.terms
            .get(key)
            .cloned()
            .unwrap_or_else(|| Multivector::zero(self.dim))
    }

    pub fn add_term(&mut self, key: TermKey, c: Multivector) {
        debug_assert_eq!(c.dim(), self.dim);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    fn add_scaled_term(&mut self, key: TermKey, c: &Multivector, factor: &Rational) {
        if factor.is_zero() {
            return;
        }
        let mv = if factor.is_one() { c.clone() } else { c.scale(factor) };
        self.add_term(key, mv);
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_same(&self, other: &CPoly) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn add(&self, other: &CPoly) -> CPoly {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &CPoly) -> CPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CPoly {
        CPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn scale(&self, q: &Rational) -> CPoly {
        let mut out = CPoly::zero(self.dim);
        for (k, c) in &self.terms {
            out.add_scaled_term(*k, c, q);
        }
        out
    }

    /// `c · p` with the constant multivector on the left.
    pub fn mul_left(&self, c: &Multivector) -> CPoly {
        let mut out = CPoly::zero(self.dim);
        for (k, t) in &self.terms {
            out.add_term(*k, c * t);
        }
        out
    }

    /// `p · c` with the constant multivector on the right.
    pub fn mul_right(&self, c: &Multivector) -> CPoly {
        let mut out = CPoly::zero(self.dim);
        for (k, t) in &self.terms {
            out.add_term(*k, t * c);
        }
        out
    }

    /// Product `self · other`, Clifford coefficients multiplied in that order.
    pub fn mul(&self, other: &CPoly) -> CPoly {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut out = CPoly::zero(self.dim);
        for ((xa, ua), ca) in &self.terms {
            for ((xb, ub), cb) in &other.terms {
                out.add_term((xa.mul(xb), ua.mul(ub)), ca * cb);
            }
        }
        out
    }

    pub fn try_mul(&self, other: &CPoly) -> Result<CPoly> {
        self.check_same(other)?;
        Ok(self.mul(other))
    }

    /// Formal partial derivative in `x_j` or `u_j`.
    pub fn partial(&self, j: usize, slot: Slot) -> Result<CPoly> {
        if j == 0 || j > self.dim {
            return Err(Error::IndexOutOfRange { index: j, dim: self.dim });
        }
        Ok(self.partial_unchecked(j, slot))
    }

    fn partial_unchecked(&self, j: usize, slot: Slot) -> CPoly {
        let mut out = CPoly::zero(self.dim);
        for ((x, u), c) in &self.terms {
            let d = match slot {
                Slot::X => x.derive(j).map(|(n, x2)| (n, (x2, *u))),
                Slot::U => u.derive(j).map(|(n, u2)| (n, (*x, u2))),
            };
            if let Some((n, key)) = d {
                out.add_scaled_term(key, c, &int(n as i64));
            }
        }
        out
    }

    /// `D p = Σ_j e_j ∂_j p` (generators multiply from the left).
    pub fn dirac_left(&self, slot: Slot) -> CPoly {
        let mut out = CPoly::zero(self.dim);
        for j in 1..=self.dim {
            let ej = Multivector::e(self.dim, j);
            for ((x, u), c) in &self.terms {
                let d = match slot {
                    Slot::X => x.derive(j).map(|(n, x2)| (n, (x2, *u))),
                    Slot::U => u.derive(j).map(|(n, u2)| (n, (*x, u2))),
                };
                if let Some((n, key)) = d {
                    out.add_scaled_term(key, &(&ej * c), &int(n as i64));
                }
            }
        }
        out
    }

    /// `p D = Σ_j (∂_j p) e_j` (generators multiply from the right).
    pub fn dirac_right(&self, slot: Slot) -> CPoly {
        let mut out = CPoly::zero(self.dim);
        for j in 1..=self.dim {
            let ej = Multivector::e(self.dim, j);
            for ((x, u), c) in &self.terms {
                let d = match slot {
                    Slot::X => x.derive(j).map(|(n, x2)| (n, (x2, *u))),
                    Slot::U => u.derive(j).map(|(n, u2)| (n, (*x, u2))),
                };
                if let Some((n, key)) = d {
                    out.add_scaled_term(key, &(c * &ej), &int(n as i64));
                }
            }
        }
        out
    }

    pub fn laplacian(&self, slot: Slot) -> CPoly {
        let mut out = CPoly::zero(self.dim);
        for j in 1..=self.dim {
            out = out.add(&self.partial_unchecked(j, slot).partial_unchecked(j, slot));
        }
        out
    }

    /// `⟨u, D_x⟩ p = Σ_j u_j ∂_{x_j} p`.
    pub fn pairing_u_dx(&self) -> CPoly {
        let mut out = CPoly::zero(self.dim);
        for j in 1..=self.dim {
            for ((x, u), c) in &self.terms {
                if let Some((n, x2)) = x.derive(j) {
                    out.add_scaled_term((x2, u.mul(&Mono::var(j))), c, &int(n as i64));
                }
            }
        }
        out
    }

    /// `⟨u, n⟩ p` with `n = x` (the outward normal of the unit sphere).
    pub fn pairing_u_x(&self) -> CPoly {
        let mut out = CPoly::zero(self.dim);
        for j in 1..=self.dim {
            for ((x, u), c) in &self.terms {
                out.add_term((x.mul(&Mono::var(j)), u.mul(&Mono::var(j))), c.clone());
            }
        }
        out
    }

    /// `⟨D_u, D_x⟩ p = Σ_j ∂_{u_j} ∂_{x_j} p`.
    pub fn pairing_du_dx(&self) -> CPoly {
        let mut out = CPoly::zero(self.dim);
        for j in 1..=self.dim {
            for ((x, u), c) in &self.terms {
                if let (Some((a, x2)), Some((b, u2))) = (x.derive(j), u.derive(j)) {
                    out.add_scaled_term((x2, u2), c, &int((a * b) as i64));
                }
            }
        }
        out
    }

    /// Multiply by `|u|^2 = Σ u_j^2`.
    pub fn mul_norm_u_sq(&self) -> CPoly {
        self.mul_norm_sq(Slot::U)
    }

    pub fn mul_norm_sq(&self, slot: Slot) -> CPoly {
        let mut out = CPoly::zero(self.dim);
        for j in 1..=self.dim {
            let sq = Mono::var(j).mul(&Mono::var(j));
            for ((x, u), c) in &self.terms {
                let key = match slot {
                    Slot::X => (x.mul(&sq), *u),
                    Slot::U => (*x, u.mul(&sq)),
                };
                out.add_term(key, c.clone());
            }
        }
        out
    }

    /// Euler operator `Σ_j x_j ∂_{x_j}`: the normal derivative on the unit sphere.
    pub fn euler(&self, slot: Slot) -> CPoly {
        let mut out = CPoly::zero(self.dim);
        for ((x, u), c) in &self.terms {
            let d = match slot {
                Slot::X => x.degree(),
                Slot::U => u.degree(),
            };
            out.add_scaled_term((*x, *u), c, &int(d as i64));
        }
        out
    }

    /// `v · p` where `v` is the vector variable of `slot`, multiplied on the left.
    pub fn mul_vector_left(&self, slot: Slot) -> CPoly {
        CPoly::vector_var(self.dim, slot).mul(self)
    }

    /// `p · v`, vector variable multiplied on the right.
    pub fn mul_vector_right(&self, slot: Slot) -> CPoly {
        self.mul(&CPoly::vector_var(self.dim, slot))
    }

    pub fn reversion(&self) -> CPoly {
        CPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(k, c)| (*k, c.reversion())).collect(),
        }
    }

    pub fn conjugate(&self) -> CPoly {
        CPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(k, c)| (*k, c.conjugate())).collect(),
        }
    }

    /// Scalar part of every coefficient.
    pub fn scalar_part(&self) -> CPoly {
        let mut out = CPoly::zero(self.dim);
        for (k, c) in &self.terms {
            out.add_term(*k, Multivector::scalar(self.dim, c.scalar_part()));
        }
        out
    }

    pub fn is_scalar_valued(&self) -> bool {
        self.terms.values().all(|c| c.is_scalar())
    }

    pub fn is_free_of(&self, slot: Slot) -> bool {
        self.terms.keys().all(|(x, u)| match slot {
            Slot::X => x.degree() == 0,
            Slot::U => u.degree() == 0,
        })
    }

    /// The common degree in the chosen variable, `None` for mixed degrees.
    /// The zero polynomial reports `Some(0)`.
    pub fn homogeneous_degree(&self, slot: Slot) -> Option<u32> {
        let mut deg = None;
        for (x, u) in self.terms.keys() {
            let d = match slot {
                Slot::X => x.degree(),
                Slot::U => u.degree(),
            };
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        Some(deg.unwrap_or(0))
    }

    pub fn max_degree(&self, slot: Slot) -> u32 {
        self.terms
            .keys()
            .map(|(x, u)| match slot {
                Slot::X => x.degree(),
                Slot::U => u.degree(),
            })
            .max()
            .unwrap_or(0)
    }

    /// Assert u-homogeneity of degree `k`; homogeneity tags are checks, not coercions.
    pub fn tagged_u_homogeneous(self, k: usize) -> Result<CPoly> {
        self.check_u_homogeneous(k)?;
        Ok(self)
    }

    pub fn check_u_homogeneous(&self, k: usize) -> Result<()> {
        if self.is_zero() {
            return Ok(());
        }
        match self.homogeneous_degree(Slot::U) {
            Some(d) if d as usize == k => Ok(()),
            _ => Err(Error::NotHomogeneous { expected: k }),
        }
    }

    /// Swap the roles of `x` and `u`.
    pub fn swap_slots(&self) -> CPoly {
        CPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|((x, u), c)| ((*u, *x), c.clone())).collect(),
        }
    }

    /// Substitute `v ↦ L v` in one slot, `L` a rational `m×m` matrix (row-major):
    /// the new polynomial is `p(..., L v, ...)`.
    pub fn substitute_linear(&self, slot: Slot, l: &[Vec<Rational>]) -> CPoly {
        let m = self.dim;
        // images of each coordinate as linear polynomials in the slot variable
        let images: Vec<CPoly> = (0..m)
            .map(|j| {
                let mut p = CPoly::zero(m);
                for (k, q) in l[j].iter().enumerate() {
                    if !q.is_zero() {
                        p = p.add(&CPoly::var(m, slot, k + 1).scale(q));
                    }
                }
                p
            })
            .collect();
        let mut out = CPoly::zero(m);
        let mut pow_cache: BTreeMap<(usize, u32), CPoly> = BTreeMap::new();
        for ((x, u), c) in &self.terms {
            let (sub, keep) = match slot {
                Slot::X => (x, (Mono::ONE, *u)),
                Slot::U => (u, (*x, Mono::ONE)),
            };
            let mut acc = CPoly::term(keep.0, keep.1, c.clone());
            for j in 1..=m {
                let e = sub.exponent(j);
                if e == 0 {
                    continue;
                }
                let pw = pow_cache
                    .entry((j, e))
                    .or_insert_with(|| {
                        let mut r = CPoly::one(m);
                        for _ in 0..e {
                            r = r.mul(&images[j - 1]);
                        }
                        r
                    })
                    .clone();
                acc = acc.mul(&pw);
            }
            out = out.add(&acc);
        }
        out
    }

    /// Numeric evaluation at `(x, u)`.
    pub fn eval(&self, x: &[f64], u: &[f64]) -> Multivector<f64> {
        let mut out = Multivector::zero(self.dim);
        for ((xa, ua), c) in &self.terms {
            let w = xa.eval(x) * ua.eval(u);
            for (b, q) in c.terms() {
                out.add_term(b, w * rat_to_f64(q));
            }
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn eval_exact(&self, x: &[Rational], u: &[Rational]) -> Multivector {
        let pw = |m: &Mono, p: &[Rational]| {
            let mut v = Rational::one();
            for (j, q) in p.iter().enumerate() {
                for _ in 0..m.exponent(j + 1) {
                    v *= q;
                }
            }
            v
        };
        let mut out = Multivector::zero(self.dim);
        for ((xa, ua), c) in &self.terms {
            out += c.scale(&(pw(xa, x) * pw(ua, u)));
        }
        out
    }

    /// Keep only the terms accepted by the predicate.
    pub fn filter_terms(&self, keep: impl Fn(&TermKey) -> bool) -> CPoly {
        CPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Flatten into `(x, u, blade) -> coefficient` entries.
    pub fn flat_entries(&self) -> impl Iterator<Item = ((Mono, Mono, Blade), &Rational)> {
        self.terms
            .iter()
            .flat_map(|((x, u), c)| c.terms().map(move |(b, q)| ((*x, *u, b), q)))
    }

    pub fn to_json(&self) -> CPolyJson {
        CPolyJson {
            m: self.dim,
            terms: self
                .terms
                .iter()
                .map(|((x, u), c)| TermJson {
                    x: x.exponents(self.dim),
                    u: u.exponents(self.dim),
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &CPolyJson) -> Result<CPoly> {
        check_dim(json.m)?;
        let mut p = CPoly::zero(json.m);
        for t in &json.terms {
            if t.x.len() != json.m || t.u.len() != json.m {
                return Err(Error::Parse("multi-index length must equal m".into()));
            }
            let c = Multivector::parse(&t.coeff, json.m)?;
            p.add_term((Mono::from_exponents(&t.x)?, Mono::from_exponents(&t.u)?), c);
        }
        Ok(p)
    }
}

/// Float copy of a [`CPoly`] for repeated numeric evaluation.
#[derive(Clone, Debug)]
pub struct FloatPoly {
    dim: usize,
    terms: Vec<(Mono, Mono, Blade, f64)>,
}

impl FloatPoly {
    pub fn new(p: &CPoly) -> Self {
        Self {
            dim: p.dim,
            terms: p.flat_entries().map(|((x, u, b), q)| (x, u, b, rat_to_f64(q))).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64], u: &[f64]) -> Multivector<f64> {
        let mut out = Multivector::zero(self.dim);
        for (xa, ua, b, c) in &self.terms {
            out.add_term(*b, c * xa.eval(x) * ua.eval(u));
        }
        out
    }

    /// Coefficient of `e_∅` only.
    pub fn eval_scalar(&self, x: &[f64], u: &[f64]) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.2 == Blade::SCALAR)
            .map(|(xa, ua, _, c)| c * xa.eval(x) * ua.eval(u))
            .sum()
    }
}

impl fmt::Debug for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CPoly[m={}]{{", self.dim)?;
        for (i, ((x, u), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(
                f,
                "({c})x{:?}u{:?}",
                x.exponents(self.dim),
                u.exponents(self.dim)
            )?;
        }
        write!(f, "}}")
    }
}

/// Wire form: `{"m":3,"terms":[{"x":[2,0,0],"u":[0,1,0],"coeff":"3/2*e{}"}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CPolyJson {
    pub m: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub x: Vec<u32>,
    pub u: Vec<u32>,
    pub coeff: String,
}

pub fn partial(p: &CPoly, j: usize, slot: Slot) -> Result<CPoly> {
    p.partial(j, slot)
}

pub fn dirac_left(p: &CPoly, slot: Slot) -> CPoly {
    p.dirac_left(slot)
}

pub fn dirac_right(p: &CPoly, slot: Slot) -> CPoly {
    p.dirac_right(slot)
}

pub fn pairing_u_dx(p: &CPoly) -> CPoly {
    p.pairing_u_dx()
}

pub fn pairing_du_dx(p: &CPoly) -> CPoly {
    p.pairing_du_dx()
}

pub fn mul_norm_u_sq(p: &CPoly) -> CPoly {
    p.mul_norm_u_sq()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn x(m: usize, j: usize) -> CPoly {
        CPoly::var(m, Slot::X, j)
    }
    fn u(m: usize, j: usize) -> CPoly {
        CPoly::var(m, Slot::U, j)
    }

    #[test]
    fn partial_examples() {
        let p = x(3, 1).mul(&x(3, 1));
        assert_eq!(p.partial(1, Slot::X).unwrap(), x(3, 1).scale(&int(2)));
        let e1 = Multivector::e(3, 1);
        let q = x(3, 1).mul(&u(3, 2)).mul_right(&e1);
        assert_eq!(q.partial(2, Slot::U).unwrap(), x(3, 1).mul_right(&e1));
        assert!(q.partial(4, Slot::U).is_err());
        assert!(q.partial(0, Slot::X).is_err());
    }

    #[test]
    fn dirac_of_vector_variable() {
        let xv = CPoly::vector_var(3, Slot::X);
        assert_eq!(xv.dirac_left(Slot::X), CPoly::scalar(3, int(-3)));
        assert_eq!(xv.dirac_right(Slot::X), CPoly::scalar(3, int(-3)));
    }

    #[test]
    fn pairings() {
        assert_eq!(x(3, 1).pairing_u_dx(), u(3, 1));
        let p = x(3, 1).mul(&x(3, 2));
        assert_eq!(p.pairing_u_dx(), u(3, 1).mul(&x(3, 2)).add(&u(3, 2).mul(&x(3, 1))));
        assert_eq!(u(3, 1).mul(&x(3, 1)).pairing_du_dx(), CPoly::one(3));
        assert!(u(3, 1).mul(&x(3, 2)).pairing_du_dx().is_zero());
    }

    #[test]
    fn norm_u_sq() {
        let s = CPoly::one(3).mul_norm_u_sq();
        let want = (1..=3).fold(CPoly::zero(3), |acc, j| acc.add(&u(3, j).mul(&u(3, j))));
        assert_eq!(s, want);
        assert_eq!(u(3, 1).mul_norm_u_sq(), want.mul(&u(3, 1)));
    }

    #[test]
    fn json_round_trip() {
        let p = x(3, 1)
            .mul(&x(3, 1))
            .mul(&u(3, 2))
            .mul_left(&Multivector::parse("3/2*e{} + -1*e{1,2}", 3).unwrap());
        let j = serde_json::to_string(&p.to_json()).unwrap();
        assert!(j.starts_with("{\"m\":3,\"terms\":[{\"x\":[2,0,0],\"u\":[0,1,0]"));
        let back: CPolyJson = serde_json::from_str(&j).unwrap();
        assert_eq!(CPoly::from_json(&back).unwrap(), p);
    }

    #[test]
    fn homogeneity_tag() {
        let p = u(3, 1).mul(&u(3, 2)).add(&x(3, 1).mul(&u(3, 3)).mul(&u(3, 3)));
        assert!(p.clone().tagged_u_homogeneous(2).is_ok());
        assert!(p.add(&u(3, 1)).tagged_u_homogeneous(2).is_err());
    }

    #[test]
    fn linear_substitution() {
        // swap u1 and u2
        let l = vec![
            vec![int(0), int(1), int(0)],
            vec![int(1), int(0), int(0)],
            vec![int(0), int(0), int(1)],
        ];
        let p = u(3, 1).mul(&u(3, 1)).add(&u(3, 3).scale(&rat(1, 2)));
        let q = p.substitute_linear(Slot::U, &l);
        assert_eq!(q, u(3, 2).mul(&u(3, 2)).add(&u(3, 3).scale(&rat(1, 2))));
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(Mono::all_of_degree(3, 2).len(), 6);
        assert_eq!(Mono::all_of_degree(5, 3).len(), 35);
        assert_eq!(Mono::all_up_to_degree(3, 2).len(), 10);
    }
}
