//! Higher spin operators on `H_k`-valued polynomials: the Rarita–Schwinger
//! family `R_k, T_k, T_k^*, Q_k`, the factors `A_k, B_k`, the bosonic
//! Laplacian `D_k` in its expanded and factored forms, the Maxwell operator,
//! and the boundary operator of the scalar Green formula.

use std::collections::HashMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::mvpoly::{CPoly, Mono, Slot};
use crate::scalar::{int, Rational};
use crate::spaces::{self, harmonic_basis};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OpName {
    Rk,
    Tk,
    Tkstar,
    Qk,
    Ak,
    Bk,
    Dk,
    DkAlt,
    Maxwell,
    BoundaryA,
}

impl fmt::Display for OpName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OpName::Rk => "RK",
            OpName::Tk => "TK",
            OpName::Tkstar => "TKSTAR",
            OpName::Qk => "QK",
            OpName::Ak => "AK",
            OpName::Bk => "BK",
            OpName::Dk => "DK",
            OpName::DkAlt => "DK_ALT",
            OpName::Maxwell => "MAXWELL",
            OpName::BoundaryA => "BOUNDARY_A",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Side {
    Left,
    Right,
}

/// The spaces operators read from and write to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Space {
    /// `M_k`-valued (right-monogenic for right-acting operators)
    Mk,
    /// `u·M_{k-1}`-valued (or `M_{k-1}·u` on the right)
    UMk,
    Hk,
    /// boundary traces: no structural check
    Any,
}

/// An admissible `(name, m, k, side)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HigherSpinOp {
    name: OpName,
    m: usize,
    k: usize,
    side: Side,
}

fn sym(m: usize, k: usize) -> i64 {
    m as i64 + 2 * k as i64
}

impl HigherSpinOp {
    pub fn new(name: OpName, m: usize, k: usize, side: Side) -> Result<Self> {
        crate::clifford::check_dim(m)?;
        if m < 2 {
            return Err(Error::Config(format!("m must be at least 2, got {m}")));
        }
        if sym(m, k) - 2 == 0 {
            return Err(Error::Degenerate { m, k, what: "m+2k-2" });
        }
        let needs_c = match name {
            OpName::Ak | OpName::Bk | OpName::DkAlt => true,
            OpName::Dk => k >= 1,
            _ => false,
        };
        if needs_c && sym(m, k) - 4 == 0 {
            return Err(Error::Degenerate { m, k, what: "m+2k-4" });
        }
        if name == OpName::Maxwell && k != 1 {
            return Err(Error::Config("the Maxwell operator acts on H_1-valued functions".into()));
        }
        if matches!(name, OpName::Tk | OpName::Qk) && k == 0 {
            return Err(Error::Config(format!("{name} needs k ≥ 1")));
        }
        Ok(Self { name, m, k, side })
    }

    pub fn name(&self) -> OpName {
        self.name
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn side(&self) -> Side {
        self.side
    }

    fn domain(&self) -> Space {
        match self.name {
            OpName::Rk | OpName::Tkstar => Space::Mk,
            OpName::Tk | OpName::Qk => Space::UMk,
            OpName::BoundaryA => Space::Hk,
            _ => Space::Hk,
        }
    }

    fn codomain(&self) -> Space {
        match self.name {
            OpName::Rk | OpName::Tk | OpName::Ak => Space::Mk,
            OpName::Tkstar | OpName::Qk | OpName::Bk => Space::UMk,
            OpName::BoundaryA => Space::Any,
            _ => Space::Hk,
        }
    }

    /// Apply with domain and codomain membership checks.
    pub fn apply(&self, f: &CPoly) -> Result<CPoly> {
        if f.dim() != self.m {
            return Err(Error::DimensionMismatch(f.dim(), self.m));
        }
        let ctx = Ctx::new(self.m, self.k, self.side);
        ctx.check(self.domain(), f, &self.name.to_string(), "input")?;
        let out = self.apply_unchecked(f)?;
        ctx.check(self.codomain(), &out, &self.name.to_string(), "output")
            .map_err(|e| Error::Internal(format!("codomain check failed: {e}")))?;
        Ok(out)
    }

    /// Apply without membership checks (inputs are trusted).
    pub fn apply_unchecked(&self, f: &CPoly) -> Result<CPoly> {
        let ctx = Ctx::new(self.m, self.k, self.side);
        Ok(match self.name {
            OpName::Rk | OpName::Tk => ctx.plus(&ctx.dx(f)),
            OpName::Tkstar | OpName::Qk => ctx.minus(&ctx.dx(f)),
            OpName::Ak => ctx.a_k(f),
            OpName::Bk => ctx.b_k(f),
            OpName::Dk => ctx.d_k(f),
            OpName::DkAlt => ctx.d_k_alt(f),
            OpName::Maxwell => maxwell(f),
            OpName::BoundaryA => boundary_a(f, self.k)?,
        })
    }
}

/// Shared building blocks for one `(m, k, side)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Ctx {
    m: usize,
    k: usize,
    side: Side,
}

impl Ctx {
    pub(crate) fn new(m: usize, k: usize, side: Side) -> Self {
        Self { m, k, side }
    }

    fn d2(&self) -> Rational {
        int(sym(self.m, self.k) - 2)
    }

    fn c(&self) -> Rational {
        int(sym(self.m, self.k) - 4)
    }

    pub(crate) fn dx(&self, f: &CPoly) -> CPoly {
        match self.side {
            Side::Left => f.dirac_left(Slot::X),
            Side::Right => f.dirac_right(Slot::X),
        }
    }

    fn du(&self, f: &CPoly) -> CPoly {
        match self.side {
            Side::Left => f.dirac_left(Slot::U),
            Side::Right => f.dirac_right(Slot::U),
        }
    }

    fn times_u(&self, f: &CPoly) -> CPoly {
        match self.side {
            Side::Left => f.mul_vector_left(Slot::U),
            Side::Right => f.mul_vector_right(Slot::U),
        }
    }

    /// `u D_u f / (m+2k-2)` on the chosen side.
    fn corr(&self, f: &CPoly) -> CPoly {
        self.times_u(&self.du(f)).scale(&self.d2().recip())
    }

    pub(crate) fn plus(&self, f: &CPoly) -> CPoly {
        f.add(&self.corr(f))
    }

    pub(crate) fn minus(&self, f: &CPoly) -> CPoly {
        self.corr(f).neg()
    }

    /// `R_k` and `T_k` share the formula `P^+ D_x`; only the domain differs.
    pub(crate) fn r(&self, f: &CPoly) -> CPoly {
        self.plus(&self.dx(f))
    }

    /// `T_k^*` and `Q_k` share `P^- D_x`.
    pub(crate) fn q(&self, f: &CPoly) -> CPoly {
        self.minus(&self.dx(f))
    }

    pub(crate) fn a_k(&self, f: &CPoly) -> CPoly {
        let c = self.c();
        let a = self.r(&self.plus(f)).neg();
        let b = self.r(&self.minus(f)).scale(&(int(2) / &c));
        a.add(&b)
    }

    pub(crate) fn b_k(&self, f: &CPoly) -> CPoly {
        let c = self.c();
        let a = self.q(&self.plus(f)).scale(&(int(-2) / &c));
        let b = self.q(&self.minus(f)).scale(&(-int(sym(self.m, self.k)) / &c));
        a.add(&b)
    }

    /// `R A_k f + Q B_k f`: the factored first expression.
    pub(crate) fn d_k_factored(&self, f: &CPoly) -> CPoly {
        self.r(&self.a_k(f)).add(&self.q(&self.b_k(f)))
    }

    /// `Δ_x - 4⟨u,D_x⟩⟨D_u,D_x⟩/(m+2k-2) + 4|u|²⟨D_u,D_x⟩²/((m+2k-2)(m+2k-4))`.
    pub(crate) fn d_k(&self, f: &CPoly) -> CPoly {
        let lap = f.laplacian(Slot::X);
        if self.k == 0 {
            return lap;
        }
        let d2 = self.d2();
        let mixed = f.pairing_du_dx();
        let second = mixed.pairing_u_dx().scale(&(int(-4) / &d2));
        let mut out = lap.add(&second);
        if self.k >= 2 {
            let third = mixed
                .pairing_du_dx()
                .mul_norm_u_sq()
                .scale(&(int(4) / (d2 * self.c())));
            out = out.add(&third);
        }
        out
    }

    /// `-R²P^+ + 2T^*RP^+/c - 2TQP^-/c - (m+2k)Q²P^-/c`.
    pub(crate) fn d_k_alt(&self, f: &CPoly) -> CPoly {
        let c = self.c();
        let fp = self.plus(f);
        let fm = self.minus(f);
        let rp = self.r(&fp);
        let qm = self.q(&fm);
        let t1 = self.r(&rp).neg();
        let t2 = self.q(&rp).scale(&(int(2) / &c));
        let t3 = self.r(&qm).scale(&(int(-2) / &c));
        let t4 = self.q(&qm).scale(&(-int(sym(self.m, self.k)) / &c));
        t1.add(&t2).add(&t3).add(&t4)
    }

    fn check(&self, space: Space, f: &CPoly, op: &str, what: &str) -> Result<()> {
        let fail = |test: &str| Error::Domain {
            op: op.to_string(),
            test: format!("{what}: {test}"),
        };
        if f.is_zero() || space == Space::Any {
            return Ok(());
        }
        f.check_u_homogeneous(self.k)
            .map_err(|_| fail(&format!("not homogeneous of degree {} in u", self.k)))?;
        match space {
            Space::Mk => {
                if !self.minus(f).is_zero() {
                    return Err(fail("P_k^- f = 0 violated"));
                }
            }
            Space::UMk => {
                if !self.plus(f).is_zero() {
                    return Err(fail("P_k^+ f = 0 violated"));
                }
                if !f.laplacian(Slot::U).is_zero() {
                    return Err(fail("Δ_u f = 0 violated"));
                }
            }
            Space::Hk => {
                if !f.laplacian(Slot::U).is_zero() {
                    return Err(fail("Δ_u f = 0 violated"));
                }
            }
            Space::Any => {}
        }
        Ok(())
    }
}

/// `Δ_x - (4/m)⟨u,D_x⟩⟨D_u,D_x⟩`.
pub fn maxwell(f: &CPoly) -> CPoly {
    let m = f.dim() as i64;
    f.laplacian(Slot::X)
        .add(&f.pairing_du_dx().pairing_u_dx().scale(&(int(-4) / int(m))))
}

/// `A f = ∂f/∂n - 4⟨u,n⟩⟨D_u,D_x⟩f/(m+2k-2)` with `n = x` on the unit sphere.
///
/// The output is a polynomial whose restriction to `|x| = 1` is `A f`.
pub fn boundary_a(f: &CPoly, k: usize) -> Result<CPoly> {
    let d2 = spaces::projection_denominator(f.dim(), k)?;
    let normal = f.euler(Slot::X);
    let tangential = f.pairing_du_dx().pairing_u_x().scale(&(int(-4) / d2));
    Ok(normal.add(&tangential))
}

pub fn apply(op: &HigherSpinOp, f: &CPoly) -> Result<CPoly> {
    op.apply(f)
}

/// `D_k f - (R_k A_k f + Q_k B_k f)`; identically zero.
pub fn verify_connection(m: usize, k: usize, f: &CPoly) -> Result<CPoly> {
    let dk = HigherSpinOp::new(OpName::Dk, m, k, Side::Left)?;
    let ak = HigherSpinOp::new(OpName::Ak, m, k, Side::Left)?;
    let bk = HigherSpinOp::new(OpName::Bk, m, k, Side::Left)?;
    let rk = HigherSpinOp::new(OpName::Rk, m, k, Side::Left)?;
    let lhs = dk.apply(f)?;
    let r_part = rk.apply(&ak.apply(f)?)?;
    let q_part = if k == 0 {
        CPoly::zero(m)
    } else {
        HigherSpinOp::new(OpName::Qk, m, k, Side::Left)?.apply(&bk.apply(f)?)?
    };
    Ok(lhs.sub(&r_part.add(&q_part)))
}

/// Basis of scalar-valued `{f : x-degree ≤ deg, H_k-valued, D_k f = 0}`.
///
/// `D_k` commutes with right multiplication by constants, so the
/// Clifford-valued null space is the real span of `{f e_A}`.
pub fn bosonic_null_basis(m: usize, k: usize, deg: usize) -> Result<Vec<CPoly>> {
    let dk = HigherSpinOp::new(OpName::Dk, m, k, Side::Left)?;
    let hs = harmonic_basis(m, k)?;
    let mut ansatz = Vec::new();
    for alpha in Mono::all_up_to_degree(m, deg as u32) {
        for h in &hs.elements {
            ansatz.push(h.mul(&CPoly::monomial(m, alpha, Mono::ONE)));
        }
    }
    let images: Vec<CPoly> = ansatz.iter().map(|f| dk.apply_unchecked(f)).collect::<Result<_>>()?;
    let mut rows: HashMap<(Mono, Mono), usize> = HashMap::new();
    for img in &images {
        for (key, _) in img.terms() {
            let n = rows.len();
            rows.entry(*key).or_insert(n);
        }
    }
    let mut a = linalg::zeros(rows.len(), ansatz.len());
    for (j, img) in images.iter().enumerate() {
        for (key, c) in img.terms() {
            a[rows[key]][j] = c.scalar_part();
        }
    }
    Ok(linalg::nullspace(&a, ansatz.len())
        .into_iter()
        .map(|v| {
            v.iter()
                .zip(&ansatz)
                .filter(|(q, _)| !q.is_zero())
                .fold(CPoly::zero(m), |acc, (q, f)| acc.add(&f.scale(q)))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Multivector;
    use crate::spaces::monogenic_basis;

    fn x(m: usize, j: usize) -> CPoly {
        CPoly::var(m, Slot::X, j)
    }

    fn harmonic_input(m: usize, k: usize) -> CPoly {
        let hs = harmonic_basis(m, k).unwrap();
        let c = Multivector::parse("1*e{} + -2*e{1,2} + 1/2*e{2}", m).unwrap();
        hs.elements[0]
            .mul(&x(m, 1).mul(&x(m, 2)))
            .mul_right(&c)
            .add(&hs.elements[hs.len() - 1].mul(&x(m, 3).mul(&x(m, 3)).mul(&x(m, 1))))
    }

    #[test]
    fn rk_kills_x_constants() {
        let p = monogenic_basis(3, 2).unwrap().elements[1].clone();
        let rk = HigherSpinOp::new(OpName::Rk, 3, 2, Side::Left).unwrap();
        assert!(rk.apply(&p).unwrap().is_zero());
    }

    #[test]
    fn domain_violation_is_reported() {
        let rk = HigherSpinOp::new(OpName::Rk, 3, 1, Side::Left).unwrap();
        let f = CPoly::var(3, Slot::U, 1).mul(&x(3, 1));
        match rk.apply(&f) {
            Err(Error::Domain { test, .. }) => assert!(test.contains("P_k^-")),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_pairs_rejected() {
        assert!(HigherSpinOp::new(OpName::Dk, 2, 1, Side::Left).is_err());
        assert!(HigherSpinOp::new(OpName::Ak, 4, 0, Side::Left).is_err());
        assert!(HigherSpinOp::new(OpName::Dk, 4, 0, Side::Left).is_ok());
    }

    #[test]
    fn maxwell_matches_dk() {
        let f = harmonic_input(3, 1);
        let dk = HigherSpinOp::new(OpName::Dk, 3, 1, Side::Left).unwrap();
        assert_eq!(dk.apply(&f).unwrap(), maxwell(&f));
    }

    #[test]
    fn two_expressions_agree() {
        let f = harmonic_input(3, 2);
        let ctx = Ctx::new(3, 2, Side::Left);
        assert_eq!(ctx.d_k(&f), ctx.d_k_alt(&f));
        assert_eq!(ctx.d_k(&f), ctx.d_k_factored(&f));
    }

    #[test]
    fn connection_examples() {
        let hs = harmonic_basis(3, 2).unwrap();
        let f = hs.elements[2].mul(&x(3, 1).mul(&x(3, 1)));
        assert!(verify_connection(3, 2, &f).unwrap().is_zero());
        assert!(verify_connection(3, 2, &CPoly::zero(3)).unwrap().is_zero());
    }

    #[test]
    fn right_side_is_reversion_dual() {
        let f = harmonic_input(4, 2);
        for name in [OpName::Ak, OpName::Bk, OpName::DkAlt] {
            let l = HigherSpinOp::new(name, 4, 2, Side::Left).unwrap();
            let r = HigherSpinOp::new(name, 4, 2, Side::Right).unwrap();
            let lhs = r.apply(&f).unwrap();
            let rhs = l.apply(&f.reversion()).unwrap().reversion();
            assert_eq!(lhs, rhs, "{name}");
        }
    }

    #[test]
    fn boundary_operator_examples() {
        // x-free and u-constant: both terms vanish
        assert!(boundary_a(&CPoly::one(3), 0).unwrap().is_zero());
        // k = 0 reduces to the normal derivative
        let f = x(3, 1).mul(&x(3, 2));
        assert_eq!(boundary_a(&f, 0).unwrap(), f.scale(&int(2)));
        // f = x1 u1, m = 3, k = 1: A f = x1 u1 - (4/3)(u·x)
        let u1 = CPoly::var(3, Slot::U, 1);
        let g = x(3, 1).mul(&u1);
        let ux = (1..=3).fold(CPoly::zero(3), |acc, j| {
            acc.add(&x(3, j).mul(&CPoly::var(3, Slot::U, j)))
        });
        assert_eq!(
            boundary_a(&g, 1).unwrap(),
            g.sub(&ux.scale(&crate::scalar::rat(4, 3)))
        );
    }

    #[test]
    fn null_basis_dimensions() {
        assert_eq!(bosonic_null_basis(3, 1, 0).unwrap().len(), spaces::dim_harmonic(3, 1));
        // k = 0: harmonic polynomials in x of degree ≤ 2 in R^3 (1 + 3 + 5)
        assert_eq!(bosonic_null_basis(3, 0, 2).unwrap().len(), 9);
        let nb = bosonic_null_basis(3, 1, 2).unwrap();
        let dk = HigherSpinOp::new(OpName::Dk, 3, 1, Side::Left).unwrap();
        assert!(nb.iter().all(|f| dk.apply(f).unwrap().is_zero()));
    }
}
