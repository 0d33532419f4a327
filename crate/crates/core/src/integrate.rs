//! Exact sphere and ball integrals of polynomials, carrying `ω_m`
//! symbolically, and numeric cubature rules for everything else.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{Blade, Multivector};
use crate::error::{Error, Result};
use crate::mvpoly::{CPoly, Mono, Slot};
use crate::scalar::{int, omega, rat_to_f64, ExactScalar, Rational};

/// Default cap on the exactness degree of generated sphere rules.
pub const DEFAULT_MAX_DEGREE: usize = 20;

/// `∫_{S^{m-1}} u^α dS / ω_m`, zero when some exponent is odd.
pub fn sphere_moment(m: usize, alpha: &Mono) -> Rational {
    let mut num = Rational::one();
    let mut half = 0u32;
    for j in 1..=m {
        let a = alpha.exponent(j);
        if a % 2 == 1 {
            return Rational::zero();
        }
        // (a-1)!!
        let mut t = a as i64 - 1;
        while t > 1 {
            num *= int(t);
            t -= 2;
        }
        half += a / 2;
    }
    let mut den = Rational::one();
    for j in 0..half {
        den *= int(m as i64 + 2 * j as i64);
    }
    num / den
}

/// `∫_{|x|<1} x^α dx / ω_m`.
pub fn ball_moment(m: usize, alpha: &Mono) -> Rational {
    sphere_moment(m, alpha) / int(alpha.degree() as i64 + m as i64)
}

/// Which set a variable is integrated over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Sphere,
    Ball,
}

/// Integrate out one variable; the result lives in the other variable and
/// carries an implicit factor `ω_m`.
pub fn integrate_slot(p: &CPoly, slot: Slot, region: Region) -> CPoly {
    let m = p.dim();
    let mut out = CPoly::zero(m);
    for ((x, u), c) in p.terms() {
        let (alpha, key) = match slot {
            Slot::X => (x, (Mono::ONE, *u)),
            Slot::U => (u, (*x, Mono::ONE)),
        };
        let w = match region {
            Region::Sphere => sphere_moment(m, alpha),
            Region::Ball => ball_moment(m, alpha),
        };
        if !w.is_zero() {
            out.add_term(key, c.scale(&w));
        }
    }
    out
}

/// `ω^p · c` as a multivector over [`ExactScalar`].
pub fn with_omega(c: &Multivector, p: i32) -> Multivector<ExactScalar> {
    c.map(|q| ExactScalar::omega_pow(p, q.clone()))
}

fn constant_of(p: &CPoly) -> Multivector {
    p.coeff(&(Mono::ONE, Mono::ONE))
}

/// `∫_{S^{m-1}} p(u) dS(u)` for a polynomial in `u` only.
pub fn sphere_integral_exact(p: &CPoly) -> Result<Multivector<ExactScalar>> {
    if !p.is_free_of(Slot::X) {
        return Err(Error::WrongVariables("u"));
    }
    Ok(with_omega(&constant_of(&integrate_slot(p, Slot::U, Region::Sphere)), 1))
}

/// `∫_{|x|<1} p(x) dx` for a polynomial in `x` only.
pub fn ball_integral_exact(p: &CPoly) -> Result<Multivector<ExactScalar>> {
    if !p.is_free_of(Slot::U) {
        return Err(Error::WrongVariables("x"));
    }
    Ok(with_omega(&constant_of(&integrate_slot(p, Slot::X, Region::Ball)), 1))
}

/// Surface measure used on the boundary of the unit ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundaryMode {
    /// `f g dσ(x)`
    ScalarDs,
    /// `f · n_x · g dσ(x)` with `n_x = x`
    CliffordDsigma,
}

fn boundary_integrand(f: &CPoly, g: &CPoly, mode: BoundaryMode) -> CPoly {
    match mode {
        BoundaryMode::ScalarDs => f.mul(g),
        BoundaryMode::CliffordDsigma => f.mul_vector_right(Slot::X).mul(g),
    }
}

/// `∫_{|x|=1} f·g dσ` or `∫_{|x|=1} f·x·g dσ` for polynomials in `x` only.
pub fn boundary_integral_exact(
    f: &CPoly,
    g: &CPoly,
    mode: BoundaryMode,
) -> Result<Multivector<ExactScalar>> {
    let p = boundary_integrand(f, g, mode);
    if !p.is_free_of(Slot::U) {
        return Err(Error::WrongVariables("x"));
    }
    Ok(with_omega(&constant_of(&integrate_slot(&p, Slot::X, Region::Sphere)), 1))
}

/// `∫_{|x|<1} ∫_{S^{m-1}} p dS(u) dx`.
pub fn volume_double_integral(p: &CPoly) -> Multivector<ExactScalar> {
    let inner = integrate_slot(p, Slot::U, Region::Sphere);
    with_omega(&constant_of(&integrate_slot(&inner, Slot::X, Region::Ball)), 2)
}

/// `∫_{|x|=1} ∫_{S^{m-1}} f·g dS(u) dσ(x)` (or with `x` inserted between).
pub fn boundary_double_integral(f: &CPoly, g: &CPoly, mode: BoundaryMode) -> Multivector<ExactScalar> {
    let p = boundary_integrand(f, g, mode);
    let inner = integrate_slot(&p, Slot::U, Region::Sphere);
    with_omega(&constant_of(&integrate_slot(&inner, Slot::X, Region::Sphere)), 2)
}

/// Sum in a fixed pairwise tree, independent of thread scheduling.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n if n <= 8 => v.iter().sum(),
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Domain {
    Sphere,
    Ball,
    RadialShell,
}

/// Nodes and weights; `exact_degree` is the verified polynomial exactness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub domain: Domain,
    pub m: usize,
    pub exact_degree: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64 + Sync) -> f64 {
        let vals: Vec<f64> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(x, w)| w * f(x))
            .collect();
        pairwise_sum(&vals)
    }

    /// Integrate a vector of values at once (component-wise, fixed order).
    pub fn integrate_vec(&self, len: usize, f: impl Fn(&[f64]) -> Vec<f64> + Sync) -> Vec<f64> {
        let vals: Vec<Vec<f64>> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(x, w)| f(x).into_iter().map(|v| v * w).collect())
            .collect();
        (0..len)
            .map(|i| pairwise_sum(&vals.iter().map(|v| v[i]).collect::<Vec<_>>()))
            .collect()
    }

    pub fn weight_sum(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Largest relative moment error over all monomials of degree ≤ `degree`.
    pub fn moment_error(&self, degree: usize) -> f64 {
        let m = self.m;
        let w = omega(m);
        let scale = match self.domain {
            Domain::Sphere => w,
            _ => w / m as f64,
        };
        let mut worst: f64 = 0.0;
        for alpha in Mono::all_up_to_degree(m, degree as u32) {
            let exact = match self.domain {
                Domain::Sphere => rat_to_f64(&sphere_moment(m, &alpha)) * w,
                _ => rat_to_f64(&ball_moment(m, &alpha)) * w,
            };
            let got = self.integrate(|x| alpha.eval(x));
            worst = worst.max((got - exact).abs() / scale.max(exact.abs()));
        }
        worst
    }
}

/// Gauss rule for the weight `(1-t^2)^a` on `[-1,1]` with `n` nodes
/// (Golub–Welsch on the symmetric Jacobi matrix).
pub fn gauss_gegenbauer(n: usize, a: f64) -> (Vec<f64>, Vec<f64>) {
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    // μ0 = ∫(1-t²)^a dt via I(a) = I(a-1)·2a/(2a+1), I(0)=2, I(1/2)=π/2
    let mut mu0 = if (a.fract()).abs() < 1e-12 { 2.0 } else { std::f64::consts::FRAC_PI_2 };
    let mut s = if (a.fract()).abs() < 1e-12 { 0.0 } else { 0.5 };
    while s + 0.5 < a + 1e-12 {
        s += 1.0;
        mu0 *= 2.0 * s / (2.0 * s + 1.0);
    }
    let mut jac = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let beta = kf * (kf + 2.0 * a) / ((2.0 * kf + 2.0 * a + 1.0) * (2.0 * kf + 2.0 * a - 1.0));
        let b = beta.sqrt();
        jac[(k, k - 1)] = b;
        jac[(k - 1, k)] = b;
    }
    let eig = nalgebra::SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    // symmetrize to kill rounding asymmetry
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let t = 0.5 * (pairs[j].0 - pairs[i].0);
        let w = 0.5 * (pairs[i].1 + pairs[j].1);
        pairs[i] = (-t, w);
        pairs[j] = (t, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    pairs.into_iter().unzip()
}

/// Gauss–Legendre nodes and weights on `[lo, hi]`.
pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let (t, w) = gauss_gegenbauer(n, 0.0);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    (
        t.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|w| w * half).collect(),
    )
}

fn product_sphere(m: usize, degree: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    match m {
        1 => (vec![vec![1.0], vec![-1.0]], vec![1.0, 1.0]),
        2 => {
            let n = degree + 1;
            let w = 2.0 * std::f64::consts::PI / n as f64;
            let nodes = (0..n)
                .map(|i| {
                    let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
                    vec![th.cos(), th.sin()]
                })
                .collect();
            (nodes, vec![w; n])
        }
        _ => {
            let (sub_nodes, sub_w) = product_sphere(m - 1, degree);
            let (ts, tw) = gauss_gegenbauer(degree / 2 + 1, (m as f64 - 3.0) / 2.0);
            let mut nodes = Vec::with_capacity(ts.len() * sub_w.len());
            let mut weights = Vec::with_capacity(ts.len() * sub_w.len());
            for (t, wt) in ts.iter().zip(&tw) {
                let s = (1.0 - t * t).max(0.0).sqrt();
                for (p, wp) in sub_nodes.iter().zip(&sub_w) {
                    let mut x = Vec::with_capacity(m);
                    x.push(*t);
                    x.extend(p.iter().map(|c| c * s));
                    nodes.push(x);
                    weights.push(wt * wp);
                }
            }
            (nodes, weights)
        }
    }
}

/// A rule on `S^{m-1}` exact for all polynomials of degree ≤ `degree`.
///
/// Degrees ≤ 3 use the `2m` axis points with equal weights; higher degrees
/// use a product Gauss rule. Every rule is checked against exact moments.
pub fn build_sphere_rule(m: usize, degree: usize) -> Result<QuadratureRule> {
    build_sphere_rule_capped(m, degree, DEFAULT_MAX_DEGREE)
}

pub fn build_sphere_rule_capped(m: usize, degree: usize, max_degree: usize) -> Result<QuadratureRule> {
    crate::clifford::check_dim(m)?;
    if m < 2 {
        return Err(Error::Quadrature {
            degree,
            reason: "sphere rules need m ≥ 2".into(),
        });
    }
    if degree > max_degree {
        return Err(Error::Quadrature {
            degree,
            reason: format!("exceeds configured maximum {max_degree}; raise the node budget"),
        });
    }
    let (nodes, weights) = if degree <= 3 {
        let w = omega(m) / (2 * m) as f64;
        let mut nodes = Vec::new();
        for j in 0..m {
            for s in [1.0, -1.0] {
                let mut x = vec![0.0; m];
                x[j] = s;
                nodes.push(x);
            }
        }
        (nodes, vec![w; 2 * m])
    } else {
        product_sphere(m, degree)
    };
    let rule = QuadratureRule {
        domain: Domain::Sphere,
        m,
        exact_degree: degree,
        nodes,
        weights,
    };
    let err = rule.moment_error(degree);
    if err > 1e-12 {
        return Err(Error::Quadrature {
            degree,
            reason: format!("moment residual {err:e} above 1e-12"),
        });
    }
    Ok(rule)
}

/// Product Gauss rule of any degree, checked only through its weight sum
/// and second moments (a full moment check is too costly at high degree).
pub fn product_sphere_rule(m: usize, degree: usize) -> Result<QuadratureRule> {
    crate::clifford::check_dim(m)?;
    if m < 2 {
        return Err(Error::Quadrature {
            degree,
            reason: "sphere rules need m ≥ 2".into(),
        });
    }
    let (nodes, weights) = product_sphere(m, degree.max(2));
    let rule = QuadratureRule {
        domain: Domain::Sphere,
        m,
        exact_degree: degree,
        nodes,
        weights,
    };
    let err = rule.moment_error(2);
    if err > 1e-12 {
        return Err(Error::Quadrature {
            degree,
            reason: format!("moment residual {err:e} above 1e-12"),
        });
    }
    Ok(rule)
}

/// Radial node layout for polar rules.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RadialSpec {
    /// One Gauss–Legendre rule on `(0, R]`.
    Gauss(usize),
    /// `panels` equal sub-intervals with `per_panel` Gauss nodes each.
    Panels { panels: usize, per_panel: usize },
}

impl RadialSpec {
    /// Nodes and weights in `r` on `(0, radius]`, without the Jacobian.
    pub fn nodes(&self, radius: f64) -> (Vec<f64>, Vec<f64>) {
        match *self {
            RadialSpec::Gauss(n) => gauss_legendre(n, 0.0, radius),
            RadialSpec::Panels { panels, per_panel } => {
                let h = radius / panels.max(1) as f64;
                let mut r = Vec::new();
                let mut w = Vec::new();
                for p in 0..panels.max(1) {
                    let (a, b) = gauss_legendre(per_panel, p as f64 * h, (p + 1) as f64 * h);
                    r.extend(a);
                    w.extend(b);
                }
                (r, w)
            }
        }
    }
}

/// Polar rule about `center` on the ball of radius `radius`: Gauss in `r`
/// times a sphere rule in direction, Jacobian `r^{m-1}` folded into weights.
pub fn singular_ball_rule(
    center: &[f64],
    radius: f64,
    radial: RadialSpec,
    sphere: &QuadratureRule,
) -> Result<QuadratureRule> {
    let m = center.len();
    if sphere.m != m || sphere.domain != Domain::Sphere {
        return Err(Error::DimensionMismatch(sphere.m, m));
    }
    let (rs, rw) = radial.nodes(radius);
    let mut nodes = Vec::with_capacity(rs.len() * sphere.len());
    let mut weights = Vec::with_capacity(rs.len() * sphere.len());
    for (r, wr) in rs.iter().zip(&rw) {
        let jac = r.powi(m as i32 - 1);
        for (d, wd) in sphere.nodes.iter().zip(&sphere.weights) {
            nodes.push(center.iter().zip(d).map(|(c, t)| c + r * t).collect());
            weights.push(wr * wd * jac);
        }
    }
    let radial_deg = match radial {
        RadialSpec::Gauss(n) => 2 * n - 1,
        RadialSpec::Panels { per_panel, .. } => 2 * per_panel - 1,
    };
    Ok(QuadratureRule {
        domain: Domain::Ball,
        m,
        exact_degree: sphere.exact_degree.min((radial_deg + 1).saturating_sub(m)),
        nodes,
        weights,
    })
}

/// Coefficient-wise exact value of an `ExactScalar` multivector, as floats.
pub fn exact_to_f64(v: &Multivector<ExactScalar>, m: usize) -> Multivector<f64> {
    let mut out = Multivector::zero(v.dim());
    for (b, s) in v.terms() {
        out.add_term(b, s.to_f64(m));
    }
    out
}

/// The scalar coefficient of `e_∅` of an exact multivector.
pub fn exact_scalar_part(v: &Multivector<ExactScalar>) -> ExactScalar {
    v.coeff(Blade::SCALAR)
}
