//! Exact checks of the Green formulas for `D_k` on the unit ball, the
//! self-adjointness of `D_k`, and the Stokes identity for `R_k`.
//!
//! Every integrand here is a polynomial, so both sides are exact rational
//! combinations of powers of `ω_m` and are compared with zero tolerance.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::clifford::{all_blades, Blade, Multivector};
use crate::error::{Error, Result};
use crate::integrate::{boundary_double_integral, volume_double_integral, BoundaryMode};
use crate::mvpoly::{CPoly, Mono, Slot};
use crate::operators::{boundary_a, Ctx, HigherSpinOp, OpName, Side};
use crate::scalar::{int, rat, ExactScalar, Rational};
use crate::spaces::{harmonic_basis, monogenic_basis};

pub type ExactValue = Multivector<ExactScalar>;

/// Value recorded for one side of a case.
#[derive(Clone, Debug, PartialEq)]
pub enum CaseValue {
    Exact(ExactValue),
    Poly(CPoly),
    Float(f64),
}

impl CaseValue {
    pub fn is_zero(&self) -> bool {
        match self {
            CaseValue::Exact(v) => v.is_zero(),
            CaseValue::Poly(p) => p.is_zero(),
            CaseValue::Float(v) => *v == 0.0,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CaseValue::Exact(v) => exact_to_json(v),
            CaseValue::Poly(p) => serde_json::to_value(p.to_json()).unwrap_or(Value::Null),
            CaseValue::Float(v) => json!(v),
        }
    }
}

/// `[{"blade":"e{1}","omega_pow":2,"rational":"1/3"}, ...]`
pub fn exact_to_json(v: &ExactValue) -> Value {
    let mut terms = Vec::new();
    for (b, s) in v.terms() {
        for (p, q) in s.terms() {
            terms.push(json!({"blade": b.to_string(), "omega_pow": p, "rational": q.to_string()}));
        }
    }
    Value::Array(terms)
}

#[derive(Clone, Debug)]
pub struct GreenCase {
    pub label: String,
    pub lhs: CaseValue,
    pub rhs: CaseValue,
    pub residual: CaseValue,
    pub pass: bool,
}

impl GreenCase {
    pub fn exact(label: impl Into<String>, lhs: ExactValue, rhs: ExactValue) -> Self {
        let residual = &lhs - &rhs;
        let pass = residual.is_zero();
        Self {
            label: label.into(),
            lhs: CaseValue::Exact(lhs),
            rhs: CaseValue::Exact(rhs),
            residual: CaseValue::Exact(residual),
            pass,
        }
    }

    pub fn poly(label: impl Into<String>, lhs: CPoly, rhs: CPoly) -> Self {
        let residual = lhs.sub(&rhs);
        let pass = residual.is_zero();
        Self {
            label: label.into(),
            lhs: CaseValue::Poly(lhs),
            rhs: CaseValue::Poly(rhs),
            residual: CaseValue::Poly(residual),
            pass,
        }
    }

    pub fn float(label: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let r = (lhs - rhs).abs();
        Self {
            label: label.into(),
            lhs: CaseValue::Float(lhs),
            rhs: CaseValue::Float(rhs),
            residual: CaseValue::Float(r),
            pass: r <= tol,
        }
    }

    /// Mark a case whose residual is expected to be nonzero.
    pub fn expect_nonzero(mut self) -> Self {
        self.pass = !self.residual.is_zero();
        self.label.push_str(" [expects nonzero residual]");
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "label": self.label,
            "lhs": self.lhs.to_json(),
            "rhs": self.rhs.to_json(),
            "residual": self.residual.to_json(),
            "pass": self.pass,
        })
    }
}

#[derive(Clone, Debug)]
pub struct GreenReport {
    pub suite: String,
    pub m: usize,
    pub k: usize,
    pub seed: u64,
    pub exact: bool,
    pub cases: Vec<GreenCase>,
}

impl GreenReport {
    pub fn new(suite: &str, m: usize, k: usize, seed: u64, exact: bool) -> Self {
        Self {
            suite: suite.to_string(),
            m,
            k,
            seed,
            exact,
            cases: Vec::new(),
        }
    }

    pub fn single(suite: &str, m: usize, k: usize, case: GreenCase) -> Self {
        let mut r = Self::new(suite, m, k, 0, true);
        r.cases.push(case);
        r
    }

    pub fn pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "m": self.m,
            "k": self.k,
            "seed": self.seed,
            "exact": self.exact,
            "pass": self.pass(),
            "cases": self.cases.iter().map(GreenCase::to_json).collect::<Vec<_>>(),
        })
    }
}

fn require_scalar(f: &CPoly) -> Result<()> {
    if f.is_scalar_valued() {
        Ok(())
    } else {
        Err(Error::NonScalar)
    }
}

/// `∫_B∫_S [(D_k f) g - f (D_k g)]` against `∫_∂B∫_S [(Af) g - f (Ag)]`.
pub fn greens_scalar(m: usize, k: usize, f: &CPoly, g: &CPoly) -> Result<GreenReport> {
    let case = greens_scalar_case(m, k, f, g)?;
    Ok(GreenReport::single("green-scalar", m, k, case))
}

pub fn greens_scalar_case(m: usize, k: usize, f: &CPoly, g: &CPoly) -> Result<GreenCase> {
    require_scalar(f)?;
    require_scalar(g)?;
    let dk = HigherSpinOp::new(OpName::Dk, m, k, Side::Left)?;
    let lhs = volume_double_integral(&dk.apply(f)?.mul(g).sub(&f.mul(&dk.apply(g)?)));
    let integrand = boundary_a(f, k)?.mul(g).sub(&f.mul(&boundary_a(g, k)?));
    let rhs = boundary_double_integral(&integrand, &CPoly::one(m), BoundaryMode::ScalarDs);
    Ok(GreenCase::exact(format!("f={f:?}; g={g:?}"), lhs, rhs))
}

/// `(1 - |x|^2)^2`, vanishing with its first derivatives on the unit sphere.
pub fn cutoff(m: usize) -> CPoly {
    let s = CPoly::one(m).sub(&CPoly::one(m).mul_norm_sq(Slot::X));
    s.mul(&s)
}

/// `⟨D_k f | g⟩ = ⟨f | D_k g⟩` for `f, g` carrying the cutoff factor.
pub fn self_adjoint_check(m: usize, k: usize, f0: &CPoly, g0: &CPoly) -> Result<GreenReport> {
    require_scalar(f0)?;
    require_scalar(g0)?;
    let c = cutoff(m);
    let f = c.mul(f0);
    let g = c.mul(g0);
    let dk = HigherSpinOp::new(OpName::Dk, m, k, Side::Left)?;
    let lhs = volume_double_integral(&dk.apply(&f)?.mul(&g));
    let rhs = volume_double_integral(&f.mul(&dk.apply(&g)?));
    let mut r = GreenReport::new("self-adjoint", m, k, 0, true);
    r.cases.push(GreenCase::exact("<D_k f|g> = <f|D_k g>", lhs, rhs));
    let integrand = boundary_a(&f, k)?.mul(&g).sub(&f.mul(&boundary_a(&g, k)?));
    let boundary = boundary_double_integral(&integrand, &CPoly::one(m), BoundaryMode::ScalarDs);
    r.cases.push(GreenCase::exact("boundary terms", boundary, ExactValue::zero(m)));
    Ok(r)
}

/// `∫_S (⟨D_u,D_x⟩² f) g dS = 0` for `H_k`-valued `f, g`, as a polynomial in `x`.
pub fn orthogonality_check(m: usize, f: &CPoly, g: &CPoly) -> GreenCase {
    let p = f.pairing_du_dx().pairing_du_dx().mul(g);
    let inner = crate::integrate::integrate_slot(&p, Slot::U, crate::integrate::Region::Sphere);
    GreenCase::poly("orthogonality of H_{k-2} and H_k", inner, CPoly::zero(m))
}

/// Variant of the Clifford Green formula to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CliffordVariant {
    /// Boundary terms re-derived from the Stokes identities for `R_k`, `T_k`.
    Corrected,
    /// Boundary terms with the signs as displayed in the source statement.
    Printed,
    /// Left-acting operators on `f` throughout (volume and boundary terms).
    WrongSide,
}

fn bilinear(f: &CPoly, g: &CPoly) -> ExactValue {
    boundary_double_integral(f, g, BoundaryMode::CliffordDsigma)
}

/// Volume and boundary sides of the Clifford-valued Green formula.
pub fn greens_clifford_sides(
    m: usize,
    k: usize,
    f: &CPoly,
    g: &CPoly,
    variant: CliffordVariant,
) -> Result<(ExactValue, ExactValue)> {
    // admissibility and H_k membership
    let dk = HigherSpinOp::new(OpName::DkAlt, m, k, Side::Left)?;
    let right_dk = HigherSpinOp::new(OpName::DkAlt, m, k, Side::Right)?;
    right_dk.apply(f)?;
    let dkg = dk.apply(g)?;

    let fside = match variant {
        CliffordVariant::WrongSide => Side::Left,
        _ => Side::Right,
    };
    let l = Ctx::new(m, k, Side::Left);
    let r = Ctx::new(m, k, fside);
    let c = int(m as i64 + 2 * k as i64 - 4);
    let two_c = int(2) / &c;
    let mk_c = int(m as i64 + 2 * k as i64) / &c;

    let f_dk = r.d_k_factored(f);
    let lhs = volume_double_integral(&f_dk.mul(g));
    let volume = volume_double_integral(&f.mul(&dkg));

    let (gp, gm) = (l.plus(g), l.minus(g));
    let (fp, fm) = (r.plus(f), r.minus(f));
    let rg = l.r(&gp);
    let qg = l.q(&gm);

    let sign_r = match variant {
        CliffordVariant::Printed => int(-1),
        _ => int(1),
    };
    let b1 = bilinear(&fp, &rg.scale(&sign_r).add(&qg.scale(&two_c)));
    let b2 = bilinear(&fm, &rg.scale(&(-two_c.clone())).add(&qg.scale(&mk_c)));
    let f3 = r.r(&fp).scale(&(-sign_r)).add(&r.r(&fm).scale(&two_c));
    let b3 = bilinear(&f3, &gp);
    let f4 = r.q(&fp).scale(&(-two_c)).sub(&r.q(&fm).scale(&mk_c));
    let b4 = bilinear(&f4, &gm);

    let rhs = volume + b1 + b2 + b3 + b4;
    Ok((lhs, rhs))
}

pub fn greens_clifford_case(
    m: usize,
    k: usize,
    f: &CPoly,
    g: &CPoly,
    variant: CliffordVariant,
) -> Result<GreenCase> {
    let (lhs, rhs) = greens_clifford_sides(m, k, f, g, variant)?;
    Ok(GreenCase::exact(
        format!("{variant:?}: f={f:?}; g={g:?}"),
        lhs,
        rhs,
    ))
}

/// Clifford Green formula with the boundary terms of the corrected form.
pub fn greens_clifford(m: usize, k: usize, f: &CPoly, g: &CPoly) -> Result<GreenReport> {
    let case = greens_clifford_case(m, k, f, g, CliffordVariant::Corrected)?;
    Ok(GreenReport::single("green-clifford", m, k, case))
}

/// `∫∫ (f P^+_r R_r) g + f (R_k P^+ g) = ∫_∂∫ (f P^+_r) x (P^+ g)`.
///
/// With `project = false` the projections next to the surface element are
/// dropped, which breaks the identity for general `H_k` inputs.
pub fn stokes_rs_sides(
    m: usize,
    k: usize,
    f: &CPoly,
    g: &CPoly,
    project: bool,
) -> Result<(ExactValue, ExactValue)> {
    HigherSpinOp::new(OpName::Rk, m, k, Side::Left)?;
    let l = Ctx::new(m, k, Side::Left);
    let r = Ctx::new(m, k, Side::Right);
    let (fp, gp) = (r.plus(f), l.plus(g));
    let lhs = volume_double_integral(&r.r(&fp).mul(&gp).add(&fp.mul(&l.r(&gp))));
    let rhs = if project {
        bilinear(&fp, &gp)
    } else {
        bilinear(f, g)
    };
    Ok((lhs, rhs))
}

pub fn stokes_rs_check(m: usize, k: usize, f: &CPoly, g: &CPoly) -> Result<GreenReport> {
    let (lhs, rhs) = stokes_rs_sides(m, k, f, g, true)?;
    Ok(GreenReport::single(
        "stokes",
        m,
        k,
        GreenCase::exact(format!("f={f:?}; g={g:?}"), lhs, rhs),
    ))
}

/// Named groups of seeded cases, as run from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    GreenScalar,
    GreenClifford,
    SelfAdjoint,
    Stokes,
    Connection,
    Maxwell,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::GreenScalar,
        Suite::GreenClifford,
        Suite::SelfAdjoint,
        Suite::Stokes,
        Suite::Connection,
        Suite::Maxwell,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::GreenScalar => "green-scalar",
            Suite::GreenClifford => "green-clifford",
            Suite::SelfAdjoint => "self-adjoint",
            Suite::Stokes => "stokes",
            Suite::Connection => "connection",
            Suite::Maxwell => "maxwell",
        }
    }

    pub fn parse(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Default number of seeded cases.
    pub fn default_cases(self) -> usize {
        match self {
            Suite::GreenClifford => 2,
            Suite::GreenScalar | Suite::Connection | Suite::Maxwell => 5,
            Suite::SelfAdjoint | Suite::Stokes => 3,
        }
    }
}

/// Run `cases` seeded cases of one suite.
///
/// The Maxwell suite always runs at `k = 1`; the Clifford suite appends one
/// wrong-side control that must produce a nonzero residual.
pub fn run_suite(suite: Suite, m: usize, k: usize, seed: u64, cases: usize) -> Result<GreenReport> {
    let mut rng = gen::rng(seed);
    let kk = if suite == Suite::Maxwell { 1 } else { k };
    let mut report = GreenReport::new(suite.name(), m, kk, seed, true);
    for _ in 0..cases {
        match suite {
            Suite::GreenScalar => {
                let f = gen::harmonic(m, k, 3, 3, false, &mut rng)?;
                let g = gen::harmonic(m, k, 3, 3, false, &mut rng)?;
                report.cases.push(greens_scalar_case(m, k, &f, &g)?);
            }
            Suite::SelfAdjoint => {
                let f = gen::harmonic(m, k, 2, 2, false, &mut rng)?;
                let g = gen::harmonic(m, k, 2, 2, false, &mut rng)?;
                report.cases.extend(self_adjoint_check(m, k, &f, &g)?.cases);
            }
            Suite::GreenClifford => {
                let f = gen::harmonic(m, k, 2, 2, true, &mut rng)?;
                let g = gen::harmonic(m, k, 2, 2, true, &mut rng)?;
                report
                    .cases
                    .push(greens_clifford_case(m, k, &f, &g, CliffordVariant::Corrected)?);
            }
            Suite::Stokes => {
                let f = gen::monogenic(m, k, 2, 2, &mut rng)?;
                let g = gen::monogenic(m, k, 2, 2, &mut rng)?;
                let (lhs, rhs) = stokes_rs_sides(m, k, &f, &g, true)?;
                report
                    .cases
                    .push(GreenCase::exact(format!("f={f:?}; g={g:?}"), lhs, rhs));
            }
            Suite::Connection => {
                let f = gen::harmonic(m, k, 3, 3, true, &mut rng)?;
                let res = crate::operators::verify_connection(m, k, &f)?;
                report
                    .cases
                    .push(GreenCase::poly(format!("D_k - R_kA_k - Q_kB_k on {f:?}"), res, CPoly::zero(m)));
                let a = HigherSpinOp::new(OpName::Dk, m, k, Side::Left)?.apply(&f)?;
                let b = HigherSpinOp::new(OpName::DkAlt, m, k, Side::Left)?.apply(&f)?;
                report.cases.push(GreenCase::poly(format!("DK vs DK_ALT on {f:?}"), a, b));
            }
            Suite::Maxwell => {
                let f = gen::harmonic(m, 1, 3, 3, true, &mut rng)?;
                let a = HigherSpinOp::new(OpName::Dk, m, 1, Side::Left)?.apply(&f)?;
                report
                    .cases
                    .push(GreenCase::poly(format!("D_1 vs Maxwell on {f:?}"), a, crate::operators::maxwell(&f)));
            }
        }
    }
    if suite == Suite::GreenClifford {
        // x-constant inputs make every term vanish, so the control carries x_1, x_2
        let f = CPoly::var(m, Slot::X, 1).mul(&gen::harmonic(m, k, 1, 2, true, &mut rng)?);
        let g = CPoly::var(m, Slot::X, 2).mul(&gen::harmonic(m, k, 1, 2, true, &mut rng)?);
        report
            .cases
            .push(greens_clifford_case(m, k, &f, &g, CliffordVariant::WrongSide)?.expect_nonzero());
    }
    Ok(report)
}

/// Seeded generators for rational test functions, coefficients in `{-3..3}/{1,2}`.
pub mod gen {
    use super::*;
    use rand::SeedableRng;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn rational(rng: &mut ChaCha8Rng) -> Rational {
        loop {
            let n: i64 = rng.gen_range(-3..=3);
            if n != 0 {
                return rat(n, rng.gen_range(1..=2));
            }
        }
    }

    /// Random multivector with 1 to `max_terms` nonzero blades.
    pub fn multivector(m: usize, max_terms: usize, rng: &mut ChaCha8Rng) -> Multivector {
        let blades = all_blades(m);
        let n = rng.gen_range(1..=max_terms.max(1));
        let mut out = Multivector::zero(m);
        for _ in 0..n {
            let b = blades[rng.gen_range(0..blades.len())];
            out.add_term(b, rational(rng));
        }
        if out.is_zero() {
            out.add_term(Blade::SCALAR, int(1));
        }
        out
    }

    fn x_mono(m: usize, max_deg: usize, rng: &mut ChaCha8Rng) -> Mono {
        let d = rng.gen_range(0..=max_deg) as u32;
        let all = Mono::all_of_degree(m, d);
        all[rng.gen_range(0..all.len())]
    }

    /// `Σ_t x^{α_t} e_t(u) c_t` over basis elements `e_t` of the given space.
    fn combine(
        m: usize,
        basis: &[CPoly],
        x_deg: usize,
        terms: usize,
        clifford: bool,
        rng: &mut ChaCha8Rng,
    ) -> CPoly {
        loop {
            let mut f = CPoly::zero(m);
            for _ in 0..terms {
                let e = &basis[rng.gen_range(0..basis.len())];
                let x = CPoly::monomial(m, x_mono(m, x_deg, rng), Mono::ONE);
                let c = if clifford {
                    multivector(m, 3, rng)
                } else {
                    Multivector::scalar(m, rational(rng))
                };
                f = f.add(&x.mul(e).mul_right(&c));
            }
            if !f.is_zero() {
                return f;
            }
        }
    }

    /// Random `H_k`-valued polynomial with x-degree ≤ `x_deg`.
    pub fn harmonic(
        m: usize,
        k: usize,
        x_deg: usize,
        terms: usize,
        clifford: bool,
        rng: &mut ChaCha8Rng,
    ) -> Result<CPoly> {
        let b = harmonic_basis(m, k)?;
        Ok(combine(m, &b.elements, x_deg, terms, clifford, rng))
    }

    /// Random `M_k`-valued polynomial.
    pub fn monogenic(m: usize, k: usize, x_deg: usize, terms: usize, rng: &mut ChaCha8Rng) -> Result<CPoly> {
        let b = monogenic_basis(m, k)?;
        Ok(combine(m, &b.elements, x_deg, terms, true, rng))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(m: usize, j: usize) -> CPoly {
        CPoly::var(m, Slot::X, j)
    }
    fn u(m: usize, j: usize) -> CPoly {
        CPoly::var(m, Slot::U, j)
    }

    #[test]
    fn scalar_green_examples() {
        let f = x(3, 1).mul(&u(3, 1));
        let r = greens_scalar(3, 1, &f, &f).unwrap();
        assert!(r.pass());
        // D_1 kills both x1 u1 and u1, and the boundary integrand is odd in x
        let r = greens_scalar(3, 1, &f, &u(3, 1)).unwrap();
        assert!(r.pass());
        assert!(r.cases[0].lhs.is_zero());
        // D_1(x1² u1) = 2u1 - (4/3)·2u1 = -(2/3)u1, so the volume side is
        // -(2/3)·(ω/3)·(ω/3) = -(2/27)ω²
        let f2 = x(3, 1).mul(&x(3, 1)).mul(&u(3, 1));
        let r = greens_scalar(3, 1, &f2, &u(3, 1)).unwrap();
        assert!(r.pass());
        for side in [&r.cases[0].lhs, &r.cases[0].rhs] {
            match side {
                CaseValue::Exact(v) => {
                    assert_eq!(v.scalar_part(), ExactScalar::omega_pow(2, rat(-2, 27)));
                }
                other => panic!("{other:?}"),
            }
        }
        assert_eq!(
            greens_scalar(3, 1, &f.mul_right(&Multivector::e(3, 1)), &f).unwrap_err(),
            Error::NonScalar
        );
    }

    #[test]
    fn scalar_green_random() {
        let mut rng = gen::rng(3);
        for _ in 0..3 {
            let f = gen::harmonic(3, 2, 3, 3, false, &mut rng).unwrap();
            let g = gen::harmonic(3, 2, 3, 3, false, &mut rng).unwrap();
            assert!(greens_scalar(3, 2, &f, &g).unwrap().pass());
            assert!(orthogonality_check(3, &f, &g).pass);
        }
    }

    #[test]
    fn self_adjoint_example() {
        let r = self_adjoint_check(3, 1, &u(3, 1), &x(3, 1).mul(&u(3, 1))).unwrap();
        assert!(r.pass(), "{:?}", r.cases);
    }

    #[test]
    fn clifford_green_x_constant() {
        let b = monogenic_basis(3, 2).unwrap();
        let f = b.elements[0].clone();
        let g = b.elements[1].clone();
        assert!(greens_clifford(3, 2, &f, &g).unwrap().pass());
    }

    #[test]
    fn clifford_green_example() {
        let b = monogenic_basis(3, 2).unwrap();
        let f = x(3, 1).mul(&b.elements[0]);
        let g = x(3, 2).mul(&b.elements[1]);
        let r = greens_clifford(3, 2, &f, &g).unwrap();
        assert!(r.pass(), "{:?}", r.cases[0].residual);
    }

    #[test]
    fn clifford_green_random() {
        let mut rng = gen::rng(11);
        let mut printed_fails = false;
        for _ in 0..3 {
            let f = gen::harmonic(3, 2, 2, 3, true, &mut rng).unwrap();
            let g = gen::harmonic(3, 2, 2, 3, true, &mut rng).unwrap();
            let c = greens_clifford_case(3, 2, &f, &g, CliffordVariant::Corrected).unwrap();
            assert!(c.pass, "{:?}", c.residual);
            printed_fails |= !greens_clifford_case(3, 2, &f, &g, CliffordVariant::Printed).unwrap().pass;
            assert!(!greens_clifford_case(3, 2, &f, &g, CliffordVariant::WrongSide).unwrap().pass);
        }
        assert!(printed_fails);
    }

    #[test]
    fn stokes_examples() {
        let b = monogenic_basis(3, 1).unwrap();
        let f = x(3, 2).mul(&b.elements[0]).reversion();
        let g = x(3, 1).mul(&b.elements[1]);
        assert!(stokes_rs_check(3, 1, &f, &g).unwrap().pass());
        assert!(stokes_rs_check(3, 1, &b.elements[0], &b.elements[1]).unwrap().pass());
    }

    #[test]
    fn clifford_suite_control_fails_across_seeds() {
        for seed in 0..12 {
            let r = run_suite(Suite::GreenClifford, 3, 2, seed, 1).unwrap();
            assert!(r.pass(), "seed {seed}: {:?}", r.cases.iter().map(|c| c.pass).collect::<Vec<_>>());
        }
    }

    #[test]
    fn stokes_mutation_detected() {
        let mut rng = gen::rng(5);
        let f = gen::harmonic(3, 1, 1, 3, true, &mut rng).unwrap();
        let g = gen::harmonic(3, 1, 1, 3, true, &mut rng).unwrap();
        let (l, r) = stokes_rs_sides(3, 1, &f, &g, true).unwrap();
        assert_eq!(l, r);
        let (l, r) = stokes_rs_sides(3, 1, &f, &g, false).unwrap();
        assert_ne!(l, r);
    }
}
