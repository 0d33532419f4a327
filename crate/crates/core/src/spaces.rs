//! Bases of the harmonic and monogenic polynomial spaces `H_k`, `M_k`, and
//! the Almansi–Fischer projections `P_k^±` acting from either side.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_integer::binomial;
use num_traits::Zero;
use serde::Serialize;

use crate::clifford::{all_blades, Multivector};
use crate::error::{Error, Result};
use crate::integrate::{integrate_slot, Region};
use crate::linalg::{self, Echelon, SparseVec};
use crate::mvpoly::{CPoly, Mono, Slot};
use crate::scalar::{int, ExactScalar, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SpaceKind {
    HarmonicScalar,
    HarmonicClifford,
    Monogenic,
}

/// Ordered basis of `H_k` or `M_k` (polynomials in `u` only).
///
/// For the Clifford kinds this is a right-module basis; the real span is
/// `{e_i · e_A}`. The Gram matrix holds `∫ e_i e_j dS` for harmonic kinds
/// and `Sc ∫ conj(e_i) e_j dS` for the monogenic kind.
#[derive(Clone, Debug)]
pub struct SpaceBasis {
    pub m: usize,
    pub k: usize,
    pub kind: SpaceKind,
    pub elements: Vec<CPoly>,
    pub gram: Vec<Vec<ExactScalar>>,
}

impl SpaceBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Gram entries divided by `ω_m` (every entry is a rational multiple of `ω_m`).
    pub fn gram_rational(&self) -> linalg::Matrix {
        self.gram
            .iter()
            .map(|row| row.iter().map(|s| s.coefficient(1)).collect())
            .collect()
    }

    /// Real span `{e_i · e_A}` of a Clifford basis.
    pub fn real_span(&self) -> Vec<CPoly> {
        let blades = all_blades(self.m);
        self.elements
            .iter()
            .flat_map(|e| {
                blades
                    .iter()
                    .map(move |b| e.mul_right(&Multivector::blade(self.m, *b, int(1))))
            })
            .collect()
    }
}

pub fn dim_harmonic(m: usize, k: usize) -> usize {
    let a = binomial(k + m - 1, m - 1);
    let b = if k >= 2 { binomial(k + m - 3, m - 1) } else { 0 };
    a - b
}

/// Module rank of `M_k(Cl_m)`.
pub fn rank_monogenic(m: usize, k: usize) -> usize {
    binomial(k + m - 2, m - 2)
}

fn check_params(m: usize) -> Result<()> {
    crate::clifford::check_dim(m)?;
    if m < 2 {
        return Err(Error::Config(format!("m must be at least 2, got {m}")));
    }
    Ok(())
}

fn sphere_coeff(p: &CPoly) -> Multivector {
    integrate_slot(p, Slot::U, Region::Sphere).coeff(&(Mono::ONE, Mono::ONE))
}

fn harmonic_gram(elements: &[CPoly]) -> Vec<Vec<ExactScalar>> {
    elements
        .iter()
        .map(|a| {
            elements
                .iter()
                .map(|b| ExactScalar::omega_pow(1, sphere_coeff(&a.mul(b)).scalar_part()))
                .collect()
        })
        .collect()
}

fn monogenic_gram(elements: &[CPoly]) -> Vec<Vec<ExactScalar>> {
    elements
        .iter()
        .map(|a| {
            let ac = a.conjugate();
            elements
                .iter()
                .map(|b| ExactScalar::omega_pow(1, sphere_coeff(&ac.mul(b)).scalar_part()))
                .collect()
        })
        .collect()
}

fn build_harmonic(m: usize, k: usize) -> Vec<CPoly> {
    let monos = Mono::all_of_degree(m, k as u32);
    if k < 2 {
        return monos.iter().map(|a| CPoly::monomial(m, Mono::ONE, *a)).collect();
    }
    let targets = Mono::all_of_degree(m, k as u32 - 2);
    let index: HashMap<Mono, usize> = targets.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let mut a = linalg::zeros(targets.len(), monos.len());
    for (c, mono) in monos.iter().enumerate() {
        let lap = CPoly::monomial(m, Mono::ONE, *mono).laplacian(Slot::U);
        for ((_, u), coeff) in lap.terms() {
            a[index[u]][c] += coeff.scalar_part();
        }
    }
    linalg::nullspace(&a, monos.len())
        .into_iter()
        .map(|v| {
            let mut p = CPoly::zero(m);
            for (q, mono) in v.iter().zip(&monos) {
                if !q.is_zero() {
                    p.add_term((Mono::ONE, *mono), Multivector::scalar(m, q.clone()));
                }
            }
            p
        })
        .collect()
}

/// Flatten a `u`-polynomial into a sparse real coordinate vector.
fn flatten(p: &CPoly, index: &HashMap<Mono, usize>, blades: usize) -> SparseVec {
    let mut v = SparseVec::new();
    for ((_, u, b), q) in p.flat_entries() {
        v.insert(index[&u] * blades + b.bits() as usize, q.clone());
    }
    v
}

fn build_monogenic(m: usize, k: usize) -> Result<Vec<CPoly>> {
    if k == 0 {
        return Ok(vec![CPoly::one(m)]);
    }
    let target = rank_monogenic(m, k);
    let monos = Mono::all_of_degree(m, k as u32);
    let index: HashMap<Mono, usize> = monos.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let blades = all_blades(m);
    let mut ech = Echelon::new();
    let mut chosen = Vec::new();
    for h in harmonic_basis(m, k)?.elements.iter() {
        let q = project_plus(h, k)?;
        if q.is_zero() {
            continue;
        }
        let mut trial = ech.clone();
        let independent = blades.iter().all(|b| {
            let qb = q.mul_right(&Multivector::blade(m, *b, int(1)));
            trial.insert(&flatten(&qb, &index, blades.len()))
        });
        if independent {
            ech = trial;
            chosen.push(q);
            if chosen.len() == target {
                break;
            }
        }
    }
    if chosen.len() != target {
        return Err(Error::Internal(format!(
            "greedy selection found module rank {} for M_{k}, expected {target}",
            chosen.len()
        )));
    }
    Ok(chosen)
}

type CacheKey = (usize, usize, SpaceKind);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<SpaceBasis>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<SpaceBasis>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cached(key: CacheKey, build: impl FnOnce() -> Result<SpaceBasis>) -> Result<Arc<SpaceBasis>> {
    if let Some(b) = cache().read().expect("basis cache poisoned").get(&key) {
        return Ok(b.clone());
    }
    let basis = Arc::new(build()?);
    cache()
        .write()
        .expect("basis cache poisoned")
        .entry(key)
        .or_insert(basis.clone());
    Ok(basis)
}

/// Real scalar-valued harmonics of degree `k`: nullspace of `Δ_u` on monomials.
pub fn harmonic_basis(m: usize, k: usize) -> Result<Arc<SpaceBasis>> {
    check_params(m)?;
    cached((m, k, SpaceKind::HarmonicScalar), || {
        let elements = build_harmonic(m, k);
        let gram = harmonic_gram(&elements);
        Ok(SpaceBasis {
            m,
            k,
            kind: SpaceKind::HarmonicScalar,
            elements,
            gram,
        })
    })
}

/// Right-module basis of `H_k(Cl_m)`; same elements as the scalar basis.
pub fn harmonic_clifford_basis(m: usize, k: usize) -> Result<Arc<SpaceBasis>> {
    check_params(m)?;
    cached((m, k, SpaceKind::HarmonicClifford), || {
        let s = harmonic_basis(m, k)?;
        Ok(SpaceBasis {
            kind: SpaceKind::HarmonicClifford,
            ..(*s).clone()
        })
    })
}

/// Right-module basis of `M_k(Cl_m)` from projected harmonics.
pub fn monogenic_basis(m: usize, k: usize) -> Result<Arc<SpaceBasis>> {
    check_params(m)?;
    cached((m, k, SpaceKind::Monogenic), || {
        let elements = build_monogenic(m, k)?;
        for e in &elements {
            if !e.dirac_left(Slot::U).is_zero() {
                return Err(Error::Internal("monogenic basis element with D_u e ≠ 0".into()));
            }
        }
        let gram = monogenic_gram(&elements);
        Ok(SpaceBasis {
            m,
            k,
            kind: SpaceKind::Monogenic,
            elements,
            gram,
        })
    })
}

/// `m + 2k - 2` as a rational, rejecting zero.
pub fn projection_denominator(m: usize, k: usize) -> Result<Rational> {
    let d = m as i64 + 2 * k as i64 - 2;
    if d == 0 {
        return Err(Error::Degenerate { m, k, what: "m+2k-2" });
    }
    Ok(int(d))
}

/// `P_k^+ h = h + u·(D_u h)/(m+2k-2)`.
pub fn project_plus(h: &CPoly, k: usize) -> Result<CPoly> {
    h.check_u_homogeneous(k)?;
    let d = projection_denominator(h.dim(), k)?;
    let corr = h.dirac_left(Slot::U).mul_vector_left(Slot::U).scale(&d.recip());
    Ok(h.add(&corr))
}

/// `P_k^- h = -u·(D_u h)/(m+2k-2)`.
pub fn project_minus(h: &CPoly, k: usize) -> Result<CPoly> {
    h.check_u_homogeneous(k)?;
    let d = projection_denominator(h.dim(), k)?;
    Ok(h.dirac_left(Slot::U).mul_vector_left(Slot::U).scale(&(-d.recip())))
}

/// `h P_{k,r}^+ = h + ((h D_u)·u)/(m+2k-2)`.
pub fn project_plus_right(h: &CPoly, k: usize) -> Result<CPoly> {
    h.check_u_homogeneous(k)?;
    let d = projection_denominator(h.dim(), k)?;
    let corr = h.dirac_right(Slot::U).mul_vector_right(Slot::U).scale(&d.recip());
    Ok(h.add(&corr))
}

pub fn project_minus_right(h: &CPoly, k: usize) -> Result<CPoly> {
    h.check_u_homogeneous(k)?;
    let d = projection_denominator(h.dim(), k)?;
    Ok(h.dirac_right(Slot::U).mul_vector_right(Slot::U).scale(&(-d.recip())))
}

pub fn is_harmonic_u(h: &CPoly) -> bool {
    h.laplacian(Slot::U).is_zero()
}

/// Write `g = u·q` with `q` monogenic of degree `k-1`, if possible.
///
/// On `u·M_{k-1}` one has `D_u(u q) = -(m+2k-2) q`, which gives the
/// candidate; membership holds iff it reproduces `g` and is monogenic.
pub fn factor_u(g: &CPoly, k: usize) -> Option<CPoly> {
    if g.is_zero() {
        return Some(CPoly::zero(g.dim()));
    }
    if k == 0 || g.check_u_homogeneous(k).is_err() {
        return None;
    }
    let d = projection_denominator(g.dim(), k).ok()?;
    let q = g.dirac_left(Slot::U).scale(&(-d.recip()));
    if q.mul_vector_left(Slot::U) == *g && q.dirac_left(Slot::U).is_zero() {
        Some(q)
    } else {
        None
    }
}

/// `h = p_k + u·p_{k-1}` with `p_k ∈ M_k`, `p_{k-1} ∈ M_{k-1}`.
pub fn almansi_split(h: &CPoly, k: usize) -> Result<(CPoly, CPoly)> {
    h.check_u_homogeneous(k)?;
    if !is_harmonic_u(h) {
        return Err(Error::NotHarmonic);
    }
    let pk = project_plus(h, k)?;
    let minus = h.sub(&pk);
    let pkm1 = factor_u(&minus, k)
        .ok_or_else(|| Error::Internal("P_k^- h is not of the form u·M_{k-1}".into()))?;
    Ok((pk, pkm1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Dims {
    #[serde(rename = "dim_Hk")]
    pub dim_hk: usize,
    #[serde(rename = "rank_Mk")]
    pub rank_mk: usize,
    #[serde(rename = "rank_Mk_minus_1")]
    pub rank_mkm1: usize,
}

/// Dimensions computed from the constructed bases.
pub fn dims(m: usize, k: usize) -> Result<Dims> {
    let h = harmonic_basis(m, k)?.len();
    let mk = monogenic_basis(m, k)?.len();
    let mkm1 = if k == 0 { 0 } else { monogenic_basis(m, k - 1)?.len() };
    Ok(Dims {
        dim_hk: h,
        rank_mk: mk,
        rank_mkm1: mkm1,
    })
}
