//! Reproducing kernels of `H_k` and `M_k`, the fundamental solutions
//! `E_k`, `F_k`, `H_k`, and the normalizing constant of `H_k`.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::clifford::{all_blades, Blade, Multivector, VectorM};
use crate::error::{Error, Result};
use crate::integrate::{integrate_slot, Region};
use crate::linalg;
use crate::mvpoly::{CPoly, CPolyJson, FloatPoly, Mono, Slot};
use crate::scalar::{int, omega, Rational};
use crate::spaces::{harmonic_basis, monogenic_basis};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum KernelKind {
    Zonal,
    Monogenic,
}

/// `ω_m^{omega_pow} · P(u, v)` with rational `P`.
///
/// In `poly` the `U` slot carries `u` and the `X` slot carries `v`.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub m: usize,
    pub k: usize,
    pub kind: KernelKind,
    pub omega_pow: i32,
    pub poly: CPoly,
    compiled: FloatPoly,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelJson {
    pub m: usize,
    pub k: usize,
    pub kind: KernelKind,
    pub omega_pow: i32,
    /// Names of the variables held in the `x` and `u` exponent slots.
    pub slots: [String; 2],
    pub poly: CPolyJson,
}

impl Kernel {
    fn new(m: usize, k: usize, kind: KernelKind, omega_pow: i32, poly: CPoly) -> Self {
        let compiled = FloatPoly::new(&poly);
        Self {
            m,
            k,
            kind,
            omega_pow,
            poly,
            compiled,
        }
    }

    /// Numeric value at `(u, v)`.
    pub fn eval(&self, u: &[f64], v: &[f64]) -> Multivector<f64> {
        let s = omega(self.m).powi(self.omega_pow);
        self.compiled.eval(v, u).scale(&s)
    }

    pub fn eval_scalar(&self, u: &[f64], v: &[f64]) -> f64 {
        omega(self.m).powi(self.omega_pow) * self.compiled.eval_scalar(v, u)
    }

    /// `∫ K(u, v) f(u) dS(u)` for `f` in `u` only, as a polynomial in `v`
    /// (returned in the `U` slot) times `ω^p`.
    pub fn reproduce(&self, f: &CPoly) -> Result<(i32, CPoly)> {
        if !f.is_free_of(Slot::X) {
            return Err(Error::WrongVariables("u"));
        }
        let inner = integrate_slot(&self.poly.mul(f), Slot::U, Region::Sphere);
        Ok((self.omega_pow + 1, inner.swap_slots()))
    }

    pub fn to_json(&self) -> KernelJson {
        KernelJson {
            m: self.m,
            k: self.k,
            kind: self.kind,
            omega_pow: self.omega_pow,
            slots: ["v".into(), "u".into()],
            poly: self.poly.to_json(),
        }
    }
}

type KernelCache = RwLock<HashMap<(usize, usize, KernelKind), Arc<Kernel>>>;

fn cache() -> &'static KernelCache {
    static CACHE: OnceLock<KernelCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cached(key: (usize, usize, KernelKind), build: impl FnOnce() -> Result<Kernel>) -> Result<Arc<Kernel>> {
    if let Some(k) = cache().read().expect("kernel cache poisoned").get(&key) {
        return Ok(k.clone());
    }
    let kernel = Arc::new(build()?);
    cache()
        .write()
        .expect("kernel cache poisoned")
        .entry(key)
        .or_insert(kernel.clone());
    Ok(kernel)
}

fn check_m(m: usize) -> Result<()> {
    crate::clifford::check_dim(m)?;
    if m < 3 {
        return Err(Error::Config(format!("kernels need m ≥ 3, got {m}")));
    }
    Ok(())
}

/// `Z_k(u, v) = Σ (G^{-1})_{ij} Y_i(u) Y_j(v)` over the harmonic basis.
pub fn zonal_harmonic(m: usize, k: usize) -> Result<Arc<Kernel>> {
    check_m(m)?;
    cached((m, k, KernelKind::Zonal), || {
        let b = harmonic_basis(m, k)?;
        let ginv = linalg::inverse(&b.gram_rational())?;
        let vs: Vec<CPoly> = b.elements.iter().map(CPoly::swap_slots).collect();
        let mut poly = CPoly::zero(m);
        for (i, yi) in b.elements.iter().enumerate() {
            for (j, yj) in vs.iter().enumerate() {
                if !ginv[i][j].is_zero() {
                    poly = poly.add(&yi.mul(yj).scale(&ginv[i][j]));
                }
            }
        }
        Ok(Kernel::new(m, k, KernelKind::Zonal, -1, poly))
    })
}

/// `Z_k^1(u, v) = Σ q_i(v) A_il conj(q_l)(u)` with `Σ_l A_il ∫ conj(q_l) q_j dS = δ_ij`.
///
/// The kernel is left monogenic in `v` and right monogenic in `u`, and
/// reproduces `M_k` from the left: `∫ Z_k^1(u, v) f(u) dS(u) = f(v)`.
pub fn monogenic_kernel(m: usize, k: usize) -> Result<Arc<Kernel>> {
    check_m(m)?;
    cached((m, k, KernelKind::Monogenic), || {
        let b = monogenic_basis(m, k)?;
        let n = b.len();
        let blades = all_blades(m);
        let nb = blades.len();
        let conj: Vec<CPoly> = b.elements.iter().map(CPoly::conjugate).collect();
        // moment matrix M_lj / ω
        let moments: Vec<Vec<Multivector>> = conj
            .iter()
            .map(|ql| {
                b.elements
                    .iter()
                    .map(|qj| integrate_slot(&ql.mul(qj), Slot::U, Region::Sphere).coeff(&(Mono::ONE, Mono::ONE)))
                    .collect()
            })
            .collect();
        // real matrix of (X_1..X_n) ↦ (Σ_l X_l M_lj)_j
        let mut a = linalg::zeros(n * nb, n * nb);
        for l in 0..n {
            for (bi, bl) in blades.iter().enumerate() {
                let e = Multivector::blade(m, *bl, int(1));
                for j in 0..n {
                    let prod = &e * &moments[l][j];
                    for (c, q) in prod.terms() {
                        a[j * nb + c.bits() as usize][l * nb + bi] = q.clone();
                    }
                }
            }
        }
        let inv = linalg::inverse(&a)
            .map_err(|_| Error::Inconsistent("monogenic reproducing system is singular".into()))?;
        let mut poly = CPoly::zero(m);
        for (i, qi) in b.elements.iter().enumerate() {
            let qv = qi.swap_slots();
            // right-hand side: output i is 1, all others 0
            let col = i * nb + Blade::SCALAR.bits() as usize;
            for (l, ql) in conj.iter().enumerate() {
                let mut ail = Multivector::zero(m);
                for (bi, bl) in blades.iter().enumerate() {
                    ail.add_term(*bl, inv[l * nb + bi][col].clone());
                }
                if !ail.is_zero() {
                    poly = poly.add(&qv.mul_right(&ail).mul(ql));
                }
            }
        }
        Ok(Kernel::new(m, k, KernelKind::Monogenic, -1, poly))
    })
}

fn diff(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(x.len(), y.len()));
    }
    let w: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
    if w.iter().all(|c| *c == 0.0) {
        return Err(Error::Singular);
    }
    Ok(w)
}

fn norm(w: &[f64]) -> f64 {
    w.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// `w u w / |w|^2`: the reflection of `u` in the hyperplane orthogonal to `w`.
pub fn reflection_argument(w: &[f64], u: &[f64]) -> Result<Vec<f64>> {
    let r = norm(w);
    let unit = VectorM::new(w.iter().map(|c| c / r).collect());
    Ok(crate::clifford::reflect(&unit, &VectorM::new(u.to_vec()))?.0)
}

/// `u - 2⟨u,w⟩w/|w|²`, equal to [`reflection_argument`] without the
/// Clifford products; used in quadrature loops.
pub fn reflect_along(w: &[f64], u: &[f64]) -> Vec<f64> {
    let ww: f64 = w.iter().map(|c| c * c).sum();
    let uw: f64 = u.iter().zip(w).map(|(a, b)| a * b).sum();
    let t = 2.0 * uw / ww;
    u.iter().zip(w).map(|(a, b)| a - t * b).collect()
}

fn as_vector(v: &[f64]) -> Multivector<f64> {
    VectorM::new(v.to_vec()).embed()
}

/// `E_k = (m+2k-2)/((m-2)ω_m) · (y-x)/|y-x|^m · Z_k^1(ρu, v)`.
pub fn eval_e_k(m: usize, k: usize, x: &[f64], y: &[f64], u: &[f64], v: &[f64]) -> Result<Multivector<f64>> {
    let z = monogenic_kernel(m, k)?;
    let w = diff(x, y)?;
    let r = norm(&w);
    let pre = (m + 2 * k - 2) as f64 / ((m as f64 - 2.0) * omega(m));
    let dir: Vec<f64> = w.iter().map(|c| c / r.powi(m as i32)).collect();
    let zv = z.eval(&reflection_argument(&w, u)?, v);
    Ok((&as_vector(&dir) * &zv).scale(&pre))
}

/// `F_k = (m+2k-2)/((2-m)ω_m) · u · (y-x)/|y-x|^m · Z_{k-1}^1(ρu, v) · v`.
pub fn eval_f_k(m: usize, k: usize, x: &[f64], y: &[f64], u: &[f64], v: &[f64]) -> Result<Multivector<f64>> {
    if k == 0 {
        return Err(Error::Config("F_k needs k ≥ 1".into()));
    }
    let z = monogenic_kernel(m, k - 1)?;
    let w = diff(x, y)?;
    let r = norm(&w);
    let pre = (m + 2 * k - 2) as f64 / ((2.0 - m as f64) * omega(m));
    let dir: Vec<f64> = w.iter().map(|c| c / r.powi(m as i32)).collect();
    let zv = z.eval(&reflection_argument(&w, u)?, v);
    let out = &(&(&as_vector(u) * &as_vector(&dir)) * &zv) * &as_vector(v);
    Ok(out.scale(&pre))
}

/// `H_k = c_{m,k} |y-x|^{2-m} Z_k(ρu, v)`.
pub fn eval_h_k(m: usize, k: usize, c: f64, x: &[f64], y: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
    let z = zonal_harmonic(m, k)?;
    let w = diff(x, y)?;
    let r = norm(&w);
    Ok(c * r.powi(2 - m as i32) * z.eval_scalar(&reflection_argument(&w, u)?, v))
}

/// Closed form of the constant for `k = 0`: `1/((2-m)ω_m)`, as `(rational, ω power)`.
pub fn newtonian_constant(m: usize) -> (Rational, i32) {
    (Rational::one() / int(2 - m as i64), -1)
}

/// `(m+2k-4)/((2-m)(m-4)ω_m)`, which every calibration run so far reproduces
/// (m ≠ 4). For `k = 0` it reduces to the Newtonian constant; for `m = 4`,
/// `k ≥ 1` the potential is annihilated by `D_k` and there is no constant.
pub fn fitted_constant(m: usize, k: usize) -> Option<(Rational, i32)> {
    if k == 0 {
        return Some(newtonian_constant(m));
    }
    if m == 4 {
        return None;
    }
    let (m, k) = (m as i64, k as i64);
    Some((int(m + 2 * k - 4) / (int(2 - m) * int(m - 4)), -1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEntry {
    pub c: f64,
    /// Exact value when known, rendered as `p/q*w^e`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    /// Relative spread of the per-point ratios.
    pub spread: f64,
    pub points: usize,
}

/// Calibrated constants keyed by `"m,k"`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CalibrationStore {
    #[serde(flatten)]
    pub entries: BTreeMap<String, CalibrationEntry>,
}

impl CalibrationStore {
    pub fn key(m: usize, k: usize) -> String {
        format!("{m},{k}")
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Ok(Self::default());
        }
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::cli::write_atomic(path, &serde_json::to_string_pretty(self)?)
    }

    pub fn insert(&mut self, m: usize, k: usize, entry: CalibrationEntry) {
        self.entries.insert(Self::key(m, k), entry);
    }

    /// The constant for `(m, k)`; `k = 0` always has its closed form.
    pub fn get(&self, m: usize, k: usize) -> Result<f64> {
        if let Some(e) = self.entries.get(&Self::key(m, k)) {
            return Ok(e.c);
        }
        if k == 0 {
            return Ok(1.0 / ((2.0 - m as f64) * omega(m)));
        }
        Err(Error::Uncalibrated { m, k })
    }
}

/// Calibrate `c_{m,k}` so that the Poisson potential satisfies `D_kΦ = f`.
///
/// Uses the default bump and five interior check points; fails when the
/// per-point ratios spread by more than 1%.
pub fn calibrate_c(m: usize, k: usize) -> Result<CalibrationEntry> {
    let cal = crate::poisson::calibrate(m, k, &crate::poisson::CalibrationSetup::default_for(m, k))?;
    let exact = (k == 0).then(|| {
        let (q, p) = newtonian_constant(m);
        format!("{q}*w^{p}")
    });
    Ok(CalibrationEntry {
        c: cal.c,
        exact,
        spread: cal.spread,
        points: cal.ratios.len(),
    })
}
