//! Integral solution of `D_kΦ = f` for compactly supported bump sources,
//! comparison of solutions, and boundary reconstruction of null solutions.
//!
//! With `w = y - x = rθ` the potential is
//! `Φ(y,v) = c ∫ r b(y - rθ) dr dθ · h(ρ_θ v)` after the `u`-integral is
//! removed by the reproducing property, so every direction `θ` contributes
//! a fixed element of `H_k` (the coordinates of `v ↦ h(ρ_θ v)`) weighted by
//! a one-dimensional radial moment of the bump profile.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{
    build_sphere_rule, gauss_legendre, integrate_slot, pairwise_sum, product_sphere_rule, singular_ball_rule,
    QuadratureRule, RadialSpec, Region,
};
use crate::kernels::{reflect_along, zonal_harmonic};
use crate::linalg;
use crate::mvpoly::{CPoly, CPolyJson, FloatPoly, Mono, Slot};
use crate::operators::{boundary_a, HigherSpinOp, OpName, Side};
use crate::scalar::{omega, rat_to_f64, Rational};
use crate::spaces::{harmonic_basis, SpaceBasis};

/// Point evaluation and coordinate recovery on `H_k(R)`.
#[derive(Clone, Debug)]
pub struct HarmonicSampler {
    pub m: usize,
    pub k: usize,
    basis: Arc<SpaceBasis>,
    ginv: linalg::Matrix,
    compiled: Vec<FloatPoly>,
    pub samples: Vec<Vec<f64>>,
    project: Vec<Vec<f64>>,
}

impl HarmonicSampler {
    pub fn new(m: usize, k: usize) -> Result<Self> {
        let basis = harmonic_basis(m, k)?;
        let rule = build_sphere_rule(m, 2 * k)?;
        let ginv = linalg::inverse(&basis.gram_rational())?;
        let compiled: Vec<FloatPoly> = basis.elements.iter().map(FloatPoly::new).collect();
        let n = compiled.len();
        let w = omega(m);
        let vals: Vec<Vec<f64>> = rule
            .nodes
            .iter()
            .map(|v| compiled.iter().map(|y| y.eval_scalar(&[], v)).collect())
            .collect();
        let project = (0..n)
            .map(|i| {
                (0..rule.len())
                    .map(|s| {
                        (0..n)
                            .map(|j| rat_to_f64(&ginv[i][j]) * vals[s][j])
                            .sum::<f64>()
                            * rule.weights[s]
                            / w
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            m,
            k,
            basis,
            ginv,
            compiled,
            samples: rule.nodes,
            project,
        })
    }

    pub fn len(&self) -> usize {
        self.compiled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.compiled.is_empty()
    }

    pub fn basis(&self) -> &SpaceBasis {
        &self.basis
    }

    pub fn basis_values(&self, v: &[f64]) -> Vec<f64> {
        self.compiled.iter().map(|y| y.eval_scalar(&[], v)).collect()
    }

    pub fn eval(&self, coords: &[f64], v: &[f64]) -> f64 {
        self.basis_values(v).iter().zip(coords).map(|(a, b)| a * b).sum()
    }

    /// Values at the sample directions.
    pub fn values(&self, coords: &[f64]) -> Vec<f64> {
        self.samples.iter().map(|v| self.eval(coords, v)).collect()
    }

    /// Coordinates of the element of `H_k` taking `values` at the samples.
    pub fn coords_of(&self, values: &[f64]) -> Vec<f64> {
        self.project
            .iter()
            .map(|row| row.iter().zip(values).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Exact coordinates of a scalar harmonic polynomial in `u`.
    pub fn exact_coords(&self, p: &CPoly) -> Result<Vec<Rational>> {
        if !p.is_free_of(Slot::X) {
            return Err(Error::WrongVariables("u"));
        }
        if !p.is_scalar_valued() {
            return Err(Error::NonScalar);
        }
        let rhs: Vec<Rational> = self
            .basis
            .elements
            .iter()
            .map(|y| {
                integrate_slot(&y.mul(p), Slot::U, Region::Sphere)
                    .coeff(&(Mono::ONE, Mono::ONE))
                    .scalar_part()
            })
            .collect();
        Ok(linalg::mat_vec(&self.ginv, &rhs))
    }

    /// Largest `|Σ c_i Y_i|` over the sample directions.
    pub fn sup_estimate(&self, coords: &[f64]) -> f64 {
        self.values(coords).iter().fold(0.0, |a, b| a.max(b.abs()))
    }
}

/// `f(x,u) = (1 - |x-center|²/radius²)^s · Σ c_i Y_i(u)` inside the ball, 0 outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpSource {
    pub m: usize,
    pub k: usize,
    pub center: Vec<f64>,
    pub radius: f64,
    pub smoothness: u32,
    /// Coordinates over the harmonic basis of degree `k`.
    pub upart: Vec<f64>,
}

impl BumpSource {
    pub fn new(m: usize, k: usize, center: Vec<f64>, radius: f64, smoothness: u32, upart: Vec<f64>) -> Result<Self> {
        crate::clifford::check_dim(m)?;
        if center.len() != m {
            return Err(Error::DimensionMismatch(center.len(), m));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!("bump radius must be positive, got {radius}")));
        }
        if smoothness < 3 {
            return Err(Error::Config(format!("bump smoothness must be at least 3, got {smoothness}")));
        }
        let n = harmonic_basis(m, k)?.len();
        if upart.len() != n {
            return Err(Error::DimensionMismatch(upart.len(), n));
        }
        Ok(Self {
            m,
            k,
            center,
            radius,
            smoothness,
            upart,
        })
    }

    /// Parse `"c1,...,cm;R;s"` and `"i:c,i:c,..."` (unlisted coordinates are 0).
    pub fn parse(m: usize, k: usize, bump: &str, upart: &str) -> Result<Self> {
        let parts: Vec<&str> = bump.split(';').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("bump must be 'center;radius;s', got {bump:?}")));
        }
        let center = parts[0]
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("center {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let radius = parts[1]
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("radius {:?}: {e}", parts[1])))?;
        let s = parts[2]
            .parse::<u32>()
            .map_err(|e| Error::Parse(format!("smoothness {:?}: {e}", parts[2])))?;
        let n = harmonic_basis(m, k)?.len();
        let mut coords = vec![0.0; n];
        for item in upart.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (i, c) = item
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("u-part entry {item:?} is not 'index:value'")))?;
            let i: usize = i.trim().parse().map_err(|e| Error::Parse(format!("index {i:?}: {e}")))?;
            let c: f64 = c.trim().parse().map_err(|e| Error::Parse(format!("value {c:?}: {e}")))?;
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, dim: n });
            }
            coords[i] = c;
        }
        Self::new(m, k, center, radius, s, coords)
    }

    fn q(&self, x: &[f64]) -> f64 {
        let d2: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        1.0 - d2 / (self.radius * self.radius)
    }

    pub fn profile(&self, x: &[f64]) -> f64 {
        let q = self.q(x);
        if q > 0.0 {
            q.powi(self.smoothness as i32)
        } else {
            0.0
        }
    }

    /// Row-major `m × m` Hessian of the profile.
    pub fn profile_hessian(&self, x: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut out = vec![0.0; m * m];
        let q = self.q(x);
        if q <= 0.0 {
            return out;
        }
        let s = self.smoothness as f64;
        let r2 = self.radius * self.radius;
        let grad: Vec<f64> = x.iter().zip(&self.center).map(|(a, c)| -2.0 * (a - c) / r2).collect();
        let a = s * (s - 1.0) * q.powi(self.smoothness as i32 - 2);
        let b = s * q.powi(self.smoothness as i32 - 1);
        for j in 0..m {
            for l in 0..m {
                out[j * m + l] = a * grad[j] * grad[l];
            }
            out[j * m + j] += b * (-2.0 / r2);
        }
        out
    }

    pub fn coords_at(&self, x: &[f64]) -> Vec<f64> {
        let b = self.profile(x);
        self.upart.iter().map(|c| c * b).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.upart.iter().all(|c| *c == 0.0)
    }

    pub fn distance_to_center(&self, y: &[f64]) -> f64 {
        y.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt()
    }

    /// Distance from `y` to the sphere where the source loses smoothness.
    pub fn seam_distance(&self, y: &[f64]) -> f64 {
        (self.radius - self.distance_to_center(y)).abs()
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        self.distance_to_center(y) < self.radius
    }

    /// `{r ≥ 0 : y - rθ in the support}` as an interval.
    pub fn chord(&self, y: &[f64], dir: &[f64]) -> Option<(f64, f64)> {
        let d: Vec<f64> = y.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        let dt: f64 = d.iter().zip(dir).map(|(a, b)| a * b).sum();
        let dd: f64 = d.iter().map(|a| a * a).sum();
        let disc = dt * dt - dd + self.radius * self.radius;
        if disc <= 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        let (lo, hi) = ((dt - sq).max(0.0), dt + sq);
        (hi > lo).then_some((lo, hi))
    }
}

/// How the radial integral along each direction is computed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialMode {
    /// Gauss–Legendre on the exact chord through the support (exact in `r`).
    Chord,
    /// Equal panels on `[0, |y-center| + radius]` without clipping.
    Panels { panels: usize, per_panel: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    /// Polynomial degree of the direction rule for points inside the support.
    pub direction_degree: usize,
    pub radial: RadialMode,
    /// Radial nodes of the regular rule used outside the support.
    pub outer_radial: usize,
    pub outer_direction_degree: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            direction_degree: 24,
            radial: RadialMode::Chord,
            outer_radial: 24,
            outer_direction_degree: 24,
        }
    }
}

fn sum_columns(rows: Vec<Vec<f64>>, len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| pairwise_sum(&rows.iter().map(|r| r[i]).collect::<Vec<_>>()))
        .collect()
}

/// Coordinates `S_{ijl}` of the symmetrized `D_k`-image of `x_j x_l Y_i`,
/// flattened as `[(i*m + j)*m + l][p]`.
fn dk_tensor(sampler: &HarmonicSampler) -> Result<Vec<Vec<f64>>> {
    let (m, k) = (sampler.m, sampler.k);
    let op = if k == 0 {
        None
    } else {
        Some(HigherSpinOp::new(OpName::Dk, m, k, Side::Left)?)
    };
    let n = sampler.len();
    let mut out = vec![vec![0.0; n]; n * m * m];
    for (i, y) in sampler.basis().elements.iter().enumerate() {
        for j in 0..m {
            for l in j..m {
                let xx = CPoly::var(m, Slot::X, j + 1).mul(&CPoly::var(m, Slot::X, l + 1)).mul(y);
                let img = match &op {
                    Some(op) => op.apply_unchecked(&xx)?,
                    None => xx.laplacian(Slot::X),
                };
                let coords: Vec<f64> = sampler
                    .exact_coords(&img.scale(&Rational::new(1.into(), 2.into())))?
                    .iter()
                    .map(rat_to_f64)
                    .collect();
                out[(i * m + j) * m + l] = coords.clone();
                out[(i * m + l) * m + j] = coords;
            }
        }
    }
    Ok(out)
}

fn apply_tensor(tensor: &[Vec<f64>], hessian: &[Vec<f64>], n: usize, m: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for i in 0..n {
        for jl in 0..m * m {
            let h = hessian[i][jl];
            if h != 0.0 {
                for (o, t) in out.iter_mut().zip(&tensor[i * m * m + jl]) {
                    *o += h * t;
                }
            }
        }
    }
    out
}

/// Potential of one bump source with a fixed constant and quadrature.
#[derive(Clone, Debug)]
pub struct PoissonSolver {
    pub source: BumpSource,
    pub c: f64,
    pub quad: QuadSpec,
    sampler: HarmonicSampler,
    source_poly: FloatPoly,
    dirs: QuadratureRule,
    dir_coords: Vec<Vec<f64>>,
    outer: QuadratureRule,
    tensor: Vec<Vec<f64>>,
}

impl PoissonSolver {
    /// Build the solver and check the reduced `u`-integral against direct
    /// double quadrature at three points.
    pub fn new(source: BumpSource, c: f64, quad: QuadSpec) -> Result<Self> {
        let solver = Self::new_unchecked(source, c, quad)?;
        solver.check_reduction(1e-6)?;
        Ok(solver)
    }

    pub fn new_unchecked(source: BumpSource, c: f64, quad: QuadSpec) -> Result<Self> {
        let (m, k) = (source.m, source.k);
        if m + 2 * k <= 4 {
            return Err(Error::Config(format!("the Poisson solver needs m + 2k > 4, got m={m}, k={k}")));
        }
        let sampler = HarmonicSampler::new(m, k)?;
        let source_poly = upart_poly(&sampler, &source.upart);
        let dirs = product_sphere_rule(m, quad.direction_degree)?;
        let dir_coords = direction_coords(&sampler, &source_poly, &dirs.nodes)?;
        let outer_dirs = product_sphere_rule(m, quad.outer_direction_degree)?;
        let outer = singular_ball_rule(&source.center, source.radius, RadialSpec::Gauss(quad.outer_radial), &outer_dirs)?;
        let tensor = dk_tensor(&sampler)?;
        Ok(Self {
            source,
            c,
            quad,
            sampler,
            source_poly,
            dirs,
            dir_coords,
            outer,
            tensor,
        })
    }

    pub fn sampler(&self) -> &HarmonicSampler {
        &self.sampler
    }

    pub fn with_constant(&self, c: f64) -> Self {
        Self { c, ..self.clone() }
    }

    fn radial_nodes(&self, y: &[f64], dir: &[f64], extra: usize) -> Vec<(f64, f64)> {
        match self.quad.radial {
            RadialMode::Chord => match self.source.chord(y, dir) {
                Some((lo, hi)) => {
                    let (r, w) = gauss_legendre(self.source.smoothness as usize + 1 + extra, lo, hi);
                    r.into_iter().zip(w).collect()
                }
                None => Vec::new(),
            },
            RadialMode::Panels { panels, per_panel } => {
                let reach = self.source.distance_to_center(y) + self.source.radius;
                let (r, w) = RadialSpec::Panels { panels, per_panel }.nodes(reach);
                r.into_iter().zip(w).collect()
            }
        }
    }

    /// Coordinates of `Φ(y, ·)`.
    pub fn potential(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.source.m {
            return Err(Error::DimensionMismatch(y.len(), self.source.m));
        }
        let n = self.sampler.len();
        if self.source.is_zero() {
            return Ok(vec![0.0; n]);
        }
        if !self.source.contains(y) {
            return self.potential_outside(y);
        }
        let rows: Vec<Vec<f64>> = self
            .dirs
            .nodes
            .par_iter()
            .zip(self.dirs.weights.par_iter())
            .zip(self.dir_coords.par_iter())
            .map(|((dir, wd), dc)| {
                let moment: f64 = self
                    .radial_nodes(y, dir, 1)
                    .iter()
                    .map(|(r, wr)| {
                        let x: Vec<f64> = y.iter().zip(dir).map(|(a, t)| a - r * t).collect();
                        wr * r * self.source.profile(&x)
                    })
                    .sum();
                dc.iter().map(|c| c * moment * wd * self.c).collect()
            })
            .collect();
        Ok(sum_columns(rows, n))
    }

    fn potential_outside(&self, y: &[f64]) -> Result<Vec<f64>> {
        let m = self.source.m;
        let s = self.sampler.samples.len();
        let rows: Vec<Vec<f64>> = self
            .outer
            .nodes
            .par_iter()
            .zip(self.outer.weights.par_iter())
            .map(|(x, wx)| {
                let b = self.source.profile(x);
                if b == 0.0 {
                    return Ok(vec![0.0; s]);
                }
                let w: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
                let r = w.iter().map(|c| c * c).sum::<f64>().sqrt();
                let scale = self.c * wx * b * r.powi(2 - m as i32);
                self.sampler
                    .samples
                    .iter()
                    .map(|v| Ok(scale * self.source_poly.eval_scalar(&[], &reflect_along(&w, v))))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        Ok(self.sampler.coords_of(&sum_columns(rows, s)))
    }

    /// Values `Φ(y, v)` at the given `v`, with the `u`-integral done by an
    /// explicit sphere rule against the zonal kernel instead of the
    /// reproducing shortcut.
    pub fn potential_direct(&self, y: &[f64], dirs: &QuadratureRule, vs: &[Vec<f64>]) -> Result<Vec<f64>> {
        let (m, k) = (self.source.m, self.source.k);
        let z = zonal_harmonic(m, k)?;
        let urule = build_sphere_rule(m, 2 * k)?;
        let hu: Vec<f64> = urule.nodes.iter().map(|u| self.source_poly.eval_scalar(&[], u)).collect();
        let inner = |w: &[f64]| -> Vec<f64> {
            let rotated: Vec<Vec<f64>> = urule.nodes.iter().map(|u| reflect_along(w, u)).collect();
            vs.iter()
                .map(|v| {
                    let acc: Vec<f64> = rotated
                        .iter()
                        .zip(&urule.weights)
                        .zip(&hu)
                        .map(|((ru, wu), h)| wu * h * z.eval_scalar(ru, v))
                        .collect();
                    pairwise_sum(&acc)
                })
                .collect()
        };
        let rows: Vec<Vec<f64>> = if self.source.contains(y) {
            dirs.nodes
                .par_iter()
                .zip(dirs.weights.par_iter())
                .map(|(dir, wd)| {
                    let moment: f64 = self
                        .radial_nodes(y, dir, 1)
                        .iter()
                        .map(|(r, wr)| {
                            let x: Vec<f64> = y.iter().zip(dir).map(|(a, t)| a - r * t).collect();
                            wr * r * self.source.profile(&x)
                        })
                        .sum();
                    inner(dir).into_iter().map(|v| v * moment * wd * self.c).collect()
                })
                .collect()
        } else {
            self.outer
                .nodes
                .par_iter()
                .zip(self.outer.weights.par_iter())
                .map(|(x, wx)| {
                    let b = self.source.profile(x);
                    if b == 0.0 {
                        return vec![0.0; vs.len()];
                    }
                    let w: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
                    let r = w.iter().map(|c| c * c).sum::<f64>().sqrt();
                    let scale = self.c * wx * b * r.powi(2 - m as i32);
                    inner(&w).into_iter().map(|v| v * scale).collect()
                })
                .collect()
        };
        Ok(sum_columns(rows, vs.len()))
    }

    /// Three check points (center, an interior point and an exterior point)
    /// and three directions `v`: reduced against direct evaluation under a
    /// shared, coarser rule in `x`.
    pub fn check_reduction(&self, tol: f64) -> Result<f64> {
        let m = self.source.m;
        let mut pts = vec![self.source.center.clone(); 3];
        pts[1][0] += 0.3 * self.source.radius;
        pts[2][1 % m] += 1.5 * self.source.radius;
        let vs: Vec<Vec<f64>> = (0..3)
            .map(|i| {
                let v: Vec<f64> = (0..m).map(|j| ((i + 2 * j) as f64 * 0.7).sin() + 0.1).collect();
                let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                v.iter().map(|c| c / n).collect()
            })
            .collect();
        let small = product_sphere_rule(m, 8)?;
        let check = Self {
            outer: singular_ball_rule(&self.source.center, self.source.radius, RadialSpec::Gauss(6), &small)?,
            dir_coords: direction_coords(&self.sampler, &self.source_poly, &small.nodes)?,
            dirs: small,
            ..self.clone()
        };
        let mut worst: f64 = 0.0;
        for y in &pts {
            let coords = check.potential(y)?;
            let a: Vec<f64> = vs.iter().map(|v| check.sampler.eval(&coords, v)).collect();
            let b = check.potential_direct(y, &check.dirs, &vs)?;
            let scale = b.iter().fold(0.0_f64, |s, v| s.max(v.abs()));
            if scale == 0.0 {
                continue;
            }
            let err = a.iter().zip(&b).fold(0.0_f64, |s, (p, q)| s.max((p - q).abs())) / scale;
            worst = worst.max(err);
        }
        if worst > tol {
            return Err(Error::QuadratureCheck(format!(
                "reduced and direct potentials differ by {worst:e} (tolerance {tol:e})"
            )));
        }
        Ok(worst)
    }

    /// Hessian in `y` of each coordinate of `Φ(y,·)`, from the analytic
    /// Hessian of the profile: `[i][j*m + l]`.
    pub fn hessian(&self, y: &[f64]) -> Result<Vec<Vec<f64>>> {
        let m = self.source.m;
        let n = self.sampler.len();
        if !self.source.contains(y) {
            return Err(Error::Config("the analytic Hessian needs y inside the support".into()));
        }
        let rows: Vec<Vec<f64>> = self
            .dirs
            .nodes
            .par_iter()
            .zip(self.dirs.weights.par_iter())
            .zip(self.dir_coords.par_iter())
            .map(|((dir, wd), dc)| {
                let mut moment = vec![0.0; m * m];
                for (r, wr) in self.radial_nodes(y, dir, 0) {
                    let x: Vec<f64> = y.iter().zip(dir).map(|(a, t)| a - r * t).collect();
                    for (acc, h) in moment.iter_mut().zip(self.source.profile_hessian(&x)) {
                        *acc += wr * r * h;
                    }
                }
                let mut row = Vec::with_capacity(n * m * m);
                for c in dc {
                    row.extend(moment.iter().map(|h| c * h * wd * self.c));
                }
                row
            })
            .collect();
        let flat = sum_columns(rows, n * m * m);
        Ok(flat.chunks(m * m).map(<[f64]>::to_vec).collect())
    }

    /// Coordinates of `D_kΦ(y,·)` through the analytic Hessian.
    pub fn dk_potential(&self, y: &[f64]) -> Result<Vec<f64>> {
        let h = self.hessian(y)?;
        Ok(apply_tensor(&self.tensor, &h, self.sampler.len(), self.source.m))
    }

    pub fn dk_from_hessian(&self, hessian: &[Vec<f64>]) -> Vec<f64> {
        apply_tensor(&self.tensor, hessian, self.sampler.len(), self.source.m)
    }
}

fn upart_poly(sampler: &HarmonicSampler, coords: &[f64]) -> FloatPoly {
    // float combination of the basis, kept as a FloatPoly via exact rationals
    let m = sampler.m;
    let mut p = CPoly::zero(m);
    for (y, c) in sampler.basis().elements.iter().zip(coords) {
        if *c != 0.0 {
            let q = Rational::from_float(*c).unwrap_or_default();
            p = p.add(&y.scale(&q));
        }
    }
    FloatPoly::new(&p)
}

fn direction_coords(sampler: &HarmonicSampler, h: &FloatPoly, dirs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    dirs.par_iter()
        .map(|d| {
            let vals = sampler
                .samples
                .iter()
                .map(|v| Ok(h.eval_scalar(&[], &reflect_along(d, v))))
                .collect::<Result<Vec<f64>>>()?;
            Ok(sampler.coords_of(&vals))
        })
        .collect()
}

/// Central-difference layout around check points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stencil {
    pub centers: Vec<Vec<f64>>,
    pub h: f64,
}

impl Stencil {
    fn offsets(m: usize) -> Vec<Vec<(usize, f64)>> {
        let mut out = vec![vec![]];
        for j in 0..m {
            out.push(vec![(j, 1.0)]);
            out.push(vec![(j, -1.0)]);
        }
        for j in 0..m {
            for l in j + 1..m {
                for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    out.push(vec![(j, a), (l, b)]);
                }
            }
        }
        out
    }

    pub fn points_per_center(m: usize) -> usize {
        1 + 2 * m + 2 * m * (m - 1)
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for c in &self.centers {
            for off in Self::offsets(c.len()) {
                let mut p = c.clone();
                for (j, s) in off {
                    p[j] += s * self.h;
                }
                out.push(p);
            }
        }
        out
    }

    /// Hessian `[j*m + l]` of one scalar sampled on a center block.
    fn hessian(values: &[f64], m: usize, h: f64) -> Vec<f64> {
        let mut out = vec![0.0; m * m];
        let c = values[0];
        for j in 0..m {
            out[j * m + j] = (values[1 + 2 * j] - 2.0 * c + values[2 + 2 * j]) / (h * h);
        }
        let mut idx = 1 + 2 * m;
        for j in 0..m {
            for l in j + 1..m {
                let v = &values[idx..idx + 4];
                let d = (v[0] - v[1] - v[2] + v[3]) / (4.0 * h * h);
                out[j * m + l] = d;
                out[l * m + j] = d;
                idx += 4;
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_abs: f64,
    pub max_f: f64,
    pub relative: f64,
    pub per_point: Vec<f64>,
}

/// Sampled potential: coordinates of `Φ(y,·)` over the harmonic basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialField {
    pub m: usize,
    pub k: usize,
    pub basis: Vec<CPolyJson>,
    pub points: Vec<Vec<f64>>,
    pub coords: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stencil: Option<Stencil>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<ResidualReport>,
}

impl PotentialField {
    pub fn new(m: usize, k: usize, points: Vec<Vec<f64>>, coords: Vec<Vec<f64>>) -> Result<Self> {
        let basis = harmonic_basis(m, k)?.elements.iter().map(CPoly::to_json).collect();
        Ok(Self {
            m,
            k,
            basis,
            points,
            coords,
            stencil: None,
            residual: None,
        })
    }

    /// Add the same element of `H_k` at every point.
    pub fn shifted(&self, h: &[f64]) -> Self {
        let mut out = self.clone();
        for c in &mut out.coords {
            for (a, b) in c.iter_mut().zip(h) {
                *a += b;
            }
        }
        out
    }
}

/// Evaluate the potential at each point.
pub fn solve_poisson(solver: &PoissonSolver, points: &[Vec<f64>]) -> Result<PotentialField> {
    let coords = points.iter().map(|y| solver.potential(y)).collect::<Result<Vec<_>>>()?;
    PotentialField::new(solver.source.m, solver.source.k, points.to_vec(), coords)
}

/// Evaluate the potential on a central-difference stencil.
pub fn solve_on_stencil(solver: &PoissonSolver, stencil: &Stencil) -> Result<PotentialField> {
    let mut field = solve_poisson(solver, &stencil.points())?;
    field.stencil = Some(stencil.clone());
    Ok(field)
}

/// `max |D_kΦ - f|` over the stencil centers, with second-order central
/// differences in `y` and exact operations in `v`.
pub fn residual_dk(field: &PotentialField, f: &BumpSource, h_step: f64) -> Result<ResidualReport> {
    let stencil = field
        .stencil
        .as_ref()
        .ok_or_else(|| Error::Stencil("field was not sampled on a stencil".into()))?;
    if (stencil.h - h_step).abs() > 1e-12 * h_step.abs().max(1.0) {
        return Err(Error::Stencil(format!("field step {} differs from requested {h_step}", stencil.h)));
    }
    let m = field.m;
    if f.m != m || f.k != field.k {
        return Err(Error::DimensionMismatch(f.m, m));
    }
    let per = Stencil::points_per_center(m);
    if field.coords.len() != per * stencil.centers.len() {
        return Err(Error::Stencil("coordinate count does not match the stencil".into()));
    }
    let reach = h_step * 2f64.sqrt();
    for c in &stencil.centers {
        if f.seam_distance(c) <= 2.0 * reach {
            return Err(Error::Stencil(format!(
                "stencil at {c:?} reaches within {reach} of the source boundary"
            )));
        }
    }
    let sampler = HarmonicSampler::new(m, field.k)?;
    let tensor = dk_tensor(&sampler)?;
    let n = sampler.len();
    let max_f = sampler.sup_estimate(&f.upart)
        * stencil.centers.iter().map(|c| f.profile(c)).fold(0.0, f64::max).max(f.profile(&f.center));
    let mut per_point = Vec::new();
    for (b, c) in stencil.centers.iter().enumerate() {
        let block = &field.coords[b * per..(b + 1) * per];
        let hess: Vec<Vec<f64>> = (0..n)
            .map(|i| Stencil::hessian(&block.iter().map(|v| v[i]).collect::<Vec<_>>(), m, h_step))
            .collect();
        let dk = apply_tensor(&tensor, &hess, n, m);
        let diff: Vec<f64> = dk.iter().zip(f.coords_at(c)).map(|(a, b)| a - b).collect();
        per_point.push(sampler.sup_estimate(&diff));
    }
    let max_abs = per_point.iter().cloned().fold(0.0, f64::max);
    Ok(ResidualReport {
        max_abs,
        max_f,
        relative: if max_f > 0.0 { max_abs / max_f } else { max_abs },
        per_point,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub y_independent: bool,
    /// Mean of `b - a` over the points.
    pub h: Vec<f64>,
    pub spread: f64,
    pub scale: f64,
}

/// Whether `b - a` is the same element of `H_k` at every point, to `tol` relative.
pub fn compare_solutions(a: &PotentialField, b: &PotentialField, tol: f64) -> Result<Comparison> {
    if a.m != b.m || a.k != b.k || a.points != b.points {
        return Err(Error::Config("fields are sampled on different grids".into()));
    }
    let n = a.basis.len();
    let count = a.points.len().max(1) as f64;
    let diffs: Vec<Vec<f64>> = a
        .coords
        .iter()
        .zip(&b.coords)
        .map(|(p, q)| q.iter().zip(p).map(|(x, y)| x - y).collect())
        .collect();
    let h: Vec<f64> = (0..n).map(|i| diffs.iter().map(|d| d[i]).sum::<f64>() / count).collect();
    let spread = diffs
        .iter()
        .flat_map(|d| d.iter().zip(&h).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    let scale = a
        .coords
        .iter()
        .chain(&b.coords)
        .flatten()
        .fold(0.0_f64, |s, v| s.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    Ok(Comparison {
        y_independent: spread <= tol * scale,
        h,
        spread,
        scale,
    })
}

/// Norms of `Φ` at increasing distances along a ray from the source center,
/// and whether they decrease strictly.
pub fn decay_along_ray(solver: &PoissonSolver, dir: &[f64], radii: &[f64]) -> Result<(Vec<f64>, bool)> {
    let norm: f64 = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
    let mut out = Vec::new();
    for r in radii {
        let y: Vec<f64> = solver
            .source
            .center
            .iter()
            .zip(dir)
            .map(|(c, d)| c + r * d / norm)
            .collect();
        out.push(solver.sampler.sup_estimate(&solver.potential(&y)?));
    }
    let decreasing = out.windows(2).all(|w| w[1] < w[0]);
    Ok((out, decreasing))
}

/// Fixed source and check points for calibrating the kernel constant.
#[derive(Clone, Debug)]
pub struct CalibrationSetup {
    pub source: BumpSource,
    /// `(y, v)` pairs with `y` well inside the support.
    pub points: Vec<(Vec<f64>, Vec<f64>)>,
    pub quad: QuadSpec,
}

impl CalibrationSetup {
    pub fn default_for(m: usize, k: usize) -> Self {
        Self::with_bump(m, k, vec![0.0; m], 1.0, 6)
    }

    pub fn with_bump(m: usize, k: usize, center: Vec<f64>, radius: f64, smoothness: u32) -> Self {
        let n = crate::spaces::dim_harmonic(m, k);
        let upart: Vec<f64> = (0..n).map(|i| (-0.5f64).powi(i as i32)).collect();
        let offsets = [
            vec![(0, 0.0)],
            vec![(0, 0.3)],
            vec![(1, -0.25)],
            vec![(0, 0.2), (m - 1, 0.2)],
            vec![(m - 1, -0.35), (1, 0.1)],
        ];
        let dirs = [
            vec![(0, 1.0)],
            vec![(0, 0.6), (1, 0.8)],
            vec![(1, 1.0), (2, 1.0)],
            vec![(0, 1.0), (1, -1.0), (m - 1, 1.0)],
            vec![(m - 1, 1.0), (0, 0.5)],
        ];
        let points = offsets
            .iter()
            .zip(&dirs)
            .map(|(off, d)| {
                let mut y = center.clone();
                for (j, s) in off {
                    y[*j] += s * radius;
                }
                let mut v = vec![0.0; m];
                for (j, s) in d {
                    v[*j] += s;
                }
                let nv = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                (y, v.iter().map(|c| c / nv).collect())
            })
            .collect();
        Self {
            source: BumpSource {
                m,
                k,
                center,
                radius,
                smoothness,
                upart,
            },
            points,
            quad: QuadSpec {
                direction_degree: 30,
                ..QuadSpec::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub c: f64,
    pub ratios: Vec<f64>,
    pub spread: f64,
}

/// Ratios `f(y,v) / (D_kΦ_1)(y,v)` with `Φ_1` the potential for constant 1;
/// their mean is the constant, and their spread must stay below 1%.
pub fn calibrate(m: usize, k: usize, setup: &CalibrationSetup) -> Result<CalibrationResult> {
    if setup.source.m != m || setup.source.k != k {
        return Err(Error::Config("calibration source has the wrong (m, k)".into()));
    }
    let source = BumpSource::new(
        m,
        k,
        setup.source.center.clone(),
        setup.source.radius,
        setup.source.smoothness,
        setup.source.upart.clone(),
    )?;
    let solver = PoissonSolver::new(source, 1.0, setup.quad)?;
    let mut ratios = Vec::new();
    for (y, v) in &setup.points {
        let dk = solver.sampler.eval(&solver.dk_potential(y)?, v);
        let f = solver.source.profile(y) * solver.sampler.eval(&solver.source.upart, v);
        if f.abs() < 1e-12 {
            return Err(Error::Calibration(format!("source vanishes at check point y={y:?}, v={v:?}")));
        }
        if dk.abs() <= 1e-9 * f.abs() {
            return Err(Error::Calibration(format!(
                "D_k annihilates the potential at y={y:?} (|D_kΦ_1| = {:e}): no finite constant",
                dk.abs()
            )));
        }
        ratios.push(f / dk);
    }
    let c = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = (hi - lo) / c.abs();
    if spread > 0.01 {
        return Err(Error::Calibration(format!("ratios {ratios:?} spread by {spread:e}")));
    }
    Ok(CalibrationResult { c, ratios, spread })
}

/// Newtonian potential `c ∫ |y-x|^{2-m} b(x) dx` of the radial profile,
/// by the shell theorem and one-dimensional Gauss–Legendre.
pub fn newtonian_radial(m: usize, c: f64, radius: f64, smoothness: u32, rho: f64) -> f64 {
    let n = smoothness as usize + m + 2;
    let prof = |t: f64| (1.0 - t * t / (radius * radius)).powi(smoothness as i32);
    let inner_hi = rho.min(radius);
    let (ti, wi) = gauss_legendre(n, 0.0, inner_hi);
    let inner: f64 = ti.iter().zip(&wi).map(|(t, w)| w * t.powi(m as i32 - 1) * prof(*t)).sum();
    let outer = if rho < radius {
        let (to, wo) = gauss_legendre(n, rho, radius);
        to.iter().zip(&wo).map(|(t, w)| w * t * prof(*t)).sum()
    } else {
        0.0
    };
    let near = if rho > 0.0 { rho.powi(2 - m as i32) * inner } else { 0.0 };
    c * omega(m) * (near + outer)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    /// Coordinates of the boundary integral as a function of `v`.
    pub coords: Vec<f64>,
    /// Coordinates of `f(y, ·)` evaluated directly.
    pub expected: Vec<f64>,
    pub max_error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// `∫_{|x|=1}∫_S [f(AH_k) - (Af)H_k] dS(u) dσ(x)` as an element of `H_k` in `v`.
///
/// `f` must be scalar-valued, of degree `k` in `u`, and `D_k`-null; `A` is
/// the boundary operator; derivatives of `H_k` in `x` are central
/// differences with step `1e-4`.
pub fn greens_reconstruct(f: &CPoly, k: usize, c: f64, y: &[f64], x_degree: usize) -> Result<Reconstruction> {
    let m = f.dim();
    if y.len() != m {
        return Err(Error::DimensionMismatch(y.len(), m));
    }
    if !f.is_scalar_valued() {
        return Err(Error::NonScalar);
    }
    f.check_u_homogeneous(k)?;
    let ynorm = y.iter().map(|c| c * c).sum::<f64>().sqrt();
    if ynorm >= 1.0 {
        return Err(Error::Config("y must lie inside the unit ball".into()));
    }
    let warning = (1.0 - ynorm < 0.1)
        .then(|| format!("y is {:.3} from the boundary: quadrature degradation", 1.0 - ynorm));
    let sampler = HarmonicSampler::new(m, k)?;
    let z = zonal_harmonic(m, k)?;
    let zf = FloatPoly::new(&z.poly);
    let grad: Vec<FloatPoly> = (1..=m)
        .map(|j| z.poly.partial(j, Slot::U).map(|p| FloatPoly::new(&p)))
        .collect::<Result<_>>()?;
    let inv_omega = 1.0 / omega(m);
    let ff = FloatPoly::new(f);
    let af = FloatPoly::new(&boundary_a(f, k)?);
    let xrule = product_sphere_rule(m, x_degree)?;
    let urule = build_sphere_rule(m, 2 * k + 2)?;
    let d2 = (m + 2 * k - 2) as f64;
    let delta = 1e-4;

    // value and u-gradient of H_k at (x, u, v)
    let kernel = |x: &[f64], u: &[f64], v: &[f64]| -> Result<(f64, Vec<f64>)> {
        let w: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
        let r = w.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r == 0.0 {
            return Err(Error::Singular);
        }
        let radial = c * inv_omega * r.powi(2 - m as i32);
        let ru = reflect_along(&w, u);
        let val = radial * zf.eval_scalar(v, &ru);
        let g: Vec<f64> = grad.iter().map(|p| radial * p.eval_scalar(v, &ru)).collect();
        Ok((val, reflect_along(&w, &g)))
    };

    let s = sampler.samples.len();
    let rows: Vec<Vec<f64>> = xrule
        .nodes
        .par_iter()
        .zip(xrule.weights.par_iter())
        .map(|(x, wx)| {
            let mut row = vec![0.0; s];
            for (u, wu) in urule.nodes.iter().zip(&urule.weights) {
                let fu = ff.eval_scalar(x, u);
                let afu = af.eval_scalar(x, u);
                let ux: f64 = u.iter().zip(x).map(|(a, b)| a * b).sum();
                for (si, v) in sampler.samples.iter().enumerate() {
                    let (h, _) = kernel(x, u, v)?;
                    let mut normal = 0.0;
                    let mut mixed = 0.0;
                    for j in 0..m {
                        let mut xp = x.clone();
                        let mut xm = x.clone();
                        xp[j] += delta;
                        xm[j] -= delta;
                        let (hp, gp) = kernel(&xp, u, v)?;
                        let (hm, gm) = kernel(&xm, u, v)?;
                        normal += x[j] * (hp - hm) / (2.0 * delta);
                        mixed += (gp[j] - gm[j]) / (2.0 * delta);
                    }
                    let ah = normal - 4.0 / d2 * ux * mixed;
                    row[si] += wx * wu * (fu * ah - afu * h);
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let coords = sampler.coords_of(&sum_columns(rows, s));
    let expected_vals: Vec<f64> = sampler.samples.iter().map(|v| ff.eval_scalar(y, v)).collect();
    let expected = sampler.coords_of(&expected_vals);
    let max_error = coords
        .iter()
        .zip(&expected)
        .fold(0.0_f64, |a, (p, q)| a.max((p - q).abs()));
    Ok(Reconstruction {
        coords,
        expected,
        max_error,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::newtonian_constant;
    use crate::operators::bosonic_null_basis;

    fn c_newton(m: usize) -> f64 {
        let (q, p) = newtonian_constant(m);
        rat_to_f64(&q) * omega(m).powi(p)
    }

    fn radial_source(m: usize, s: u32) -> BumpSource {
        BumpSource::new(m, 0, vec![0.0; m], 1.0, s, vec![1.0]).unwrap()
    }

    #[test]
    fn sampler_round_trip() {
        let sp = HarmonicSampler::new(4, 2).unwrap();
        let coords: Vec<f64> = (0..sp.len()).map(|i| i as f64 - 1.5).collect();
        let back = sp.coords_of(&sp.values(&coords));
        for (a, b) in coords.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn parse_bump() {
        let b = BumpSource::parse(3, 1, "0.1,0,0;0.8;4", "0:1,2:-0.5").unwrap();
        assert_eq!(b.center, vec![0.1, 0.0, 0.0]);
        assert_eq!(b.radius, 0.8);
        assert_eq!(b.smoothness, 4);
        assert_eq!(b.upart, vec![1.0, 0.0, -0.5]);
        assert!(BumpSource::parse(3, 1, "0,0,0;1;2", "").is_err());
        assert!(BumpSource::parse(3, 1, "0,0,0;1;3", "7:1").is_err());
    }

    #[test]
    fn profile_hessian_matches_differences() {
        let b = BumpSource::new(3, 0, vec![0.1, 0.0, -0.2], 1.1, 4, vec![1.0]).unwrap();
        let x = [0.3, -0.2, 0.1];
        let h = 1e-4;
        let an = b.profile_hessian(&x);
        for j in 0..3 {
            for l in 0..3 {
                let at = |sj: f64, sl: f64| {
                    let mut p = x.to_vec();
                    p[j] += sj * h;
                    p[l] += sl * h;
                    b.profile(&p)
                };
                let fd = (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * h * h);
                assert!((fd - an[j * 3 + l]).abs() < 1e-5, "{j}{l}: {fd} vs {}", an[j * 3 + l]);
            }
        }
    }

    #[test]
    fn zero_source_gives_zero() {
        let src = BumpSource::new(5, 1, vec![0.0; 5], 1.0, 3, vec![0.0; 5]).unwrap();
        let solver = PoissonSolver::new(src, 1.0, QuadSpec::default()).unwrap();
        assert!(solver.potential(&[0.1, 0.0, 0.0, 0.0, 0.0]).unwrap().iter().all(|c| *c == 0.0));
    }

    #[test]
    fn newtonian_potential_matches_shell_oracle() {
        let m = 5;
        let c = c_newton(m);
        let solver = PoissonSolver::new(radial_source(m, 3), c, QuadSpec::default()).unwrap();
        for y in [
            vec![0.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.3, -0.2, 0.0, 0.1, 0.0],
            vec![0.0, 0.0, 0.7, 0.0, 0.0],
            vec![1.6, 0.0, 0.0, 0.0, 0.0],
        ] {
            let rho = y.iter().map(|a| a * a).sum::<f64>().sqrt();
            let want = newtonian_radial(m, c, 1.0, 3, rho);
            // Y_0 = 1 for k = 0
            let got = solver.potential(&y).unwrap()[0];
            assert!((got - want).abs() <= 1e-6 * want.abs(), "rho={rho}: {got} vs {want}");
        }
    }

    #[test]
    fn reduction_agrees_with_direct() {
        let src = BumpSource::new(5, 1, vec![0.0; 5], 1.0, 3, vec![1.0, -0.5, 0.25, 0.0, 2.0]).unwrap();
        let solver = PoissonSolver::new_unchecked(src, 1.0, QuadSpec::default()).unwrap();
        assert!(solver.check_reduction(1e-6).unwrap() < 1e-10);
    }

    #[test]
    fn dk_tensor_matches_operator_on_polynomials() {
        let (m, k) = (4, 1);
        let sp = HarmonicSampler::new(m, k).unwrap();
        let t = dk_tensor(&sp).unwrap();
        let op = HigherSpinOp::new(OpName::Dk, m, k, Side::Left).unwrap();
        // φ_i(x) quadratic with known Hessian
        let y = &sp.basis().elements;
        let quad = |i: usize, j: usize, l: usize| CPoly::var(m, Slot::X, j).mul(&CPoly::var(m, Slot::X, l)).mul(&y[i]);
        let f = quad(0, 1, 2).add(&quad(1, 3, 3)).add(&quad(2, 2, 4).scale(&Rational::from_integer(3.into())));
        let img = op.apply(&f).unwrap();
        let want: Vec<f64> = sp.exact_coords(&img).unwrap().iter().map(rat_to_f64).collect();
        let n = sp.len();
        let mut hess = vec![vec![0.0; m * m]; n];
        hess[0][1] = 1.0;
        hess[0][m] = 1.0;
        hess[1][2 * m + 2] = 2.0;
        hess[2][m + 3] = 3.0;
        hess[2][3 * m + 1] = 3.0;
        let got = apply_tensor(&t, &hess, n, m);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn newtonian_calibration_is_exact() {
        let cal = calibrate(5, 0, &CalibrationSetup::default_for(5, 0)).unwrap();
        let want = c_newton(5);
        assert!(((cal.c - want) / want).abs() < 1e-6, "{} vs {want}", cal.c);
    }

    #[test]
    fn calibration_matches_fitted_constant() {
        for (m, k) in [(3, 1), (3, 2)] {
            let cal = calibrate(m, k, &CalibrationSetup::default_for(m, k)).unwrap();
            let (q, p) = crate::kernels::fitted_constant(m, k).unwrap();
            let want = rat_to_f64(&q) * omega(m).powi(p);
            assert!(((cal.c - want) / want).abs() < 1e-8, "{m},{k}: {} vs {want}", cal.c);
            assert!(cal.spread < 1e-8);
        }
    }

    #[test]
    fn calibration_fails_where_the_kernel_is_annihilated() {
        let err = calibrate(4, 1, &CalibrationSetup::default_for(4, 1)).unwrap_err();
        assert!(matches!(err, Error::Calibration(_)), "{err}");
    }

    #[test]
    fn stencil_hessian_of_quadratic() {
        let st = Stencil {
            centers: vec![vec![0.1, 0.2, 0.3]],
            h: 0.05,
        };
        let vals: Vec<f64> = st.points().iter().map(|p| p[0] * p[0] + 3.0 * p[1] * p[2] - p[2] * p[2]).collect();
        let h = Stencil::hessian(&vals, 3, 0.05);
        let want = [2.0, 0.0, 0.0, 0.0, 0.0, 3.0, 0.0, 3.0, -2.0];
        for (a, b) in h.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn residual_rejects_bad_stencils() {
        let src = radial_source(5, 3);
        let field = PotentialField::new(5, 0, vec![vec![0.0; 5]], vec![vec![0.0]]).unwrap();
        assert!(matches!(residual_dk(&field, &src, 0.05), Err(Error::Stencil(_))));
        let st = Stencil {
            centers: vec![vec![0.95, 0.0, 0.0, 0.0, 0.0]],
            h: 0.05,
        };
        let mut field = PotentialField::new(5, 0, st.points(), vec![vec![0.0]; st.points().len()]).unwrap();
        field.stencil = Some(st);
        assert!(matches!(residual_dk(&field, &src, 0.05), Err(Error::Stencil(_))));
        assert!(matches!(residual_dk(&field, &src, 0.1), Err(Error::Stencil(_))));
    }

    #[test]
    fn compare_detects_constant_shift() {
        let pts = vec![vec![0.0; 3], vec![0.5, 0.0, 0.0], vec![0.0, 2.0, 0.0]];
        let a = PotentialField::new(3, 1, pts.clone(), vec![vec![1.0, 2.0, 3.0], vec![0.5, 0.1, 0.0], vec![0.0, 0.0, 7.0]])
            .unwrap();
        let h = [0.25, -1.0, 0.5];
        let cmp = compare_solutions(&a, &a.shifted(&h), 1e-6).unwrap();
        assert!(cmp.y_independent);
        for (x, y) in cmp.h.iter().zip(&h) {
            assert!((x - y).abs() < 1e-15);
        }
        let mut b = a.shifted(&h);
        for (c, p) in b.coords.iter_mut().zip(&pts) {
            c[1] += p[0];
        }
        assert!(!compare_solutions(&a, &b, 1e-6).unwrap().y_independent);
    }

    #[test]
    fn potential_decays_outside_support() {
        let src = BumpSource::new(5, 1, vec![0.0; 5], 1.0, 3, vec![1.0, 0.0, 0.5, 0.0, 0.0]).unwrap();
        let solver = PoissonSolver::new(src, 1.0, QuadSpec::default()).unwrap();
        let (norms, dec) = decay_along_ray(&solver, &[1.0, 1.0, 0.0, 0.0, 0.0], &[1.5, 2.5, 4.0]).unwrap();
        assert!(dec, "{norms:?}");
    }

    #[test]
    fn reconstruct_constant() {
        let f = CPoly::one(3);
        let r = greens_reconstruct(&f, 0, c_newton(3), &[0.0, 0.0, 0.0], 16).unwrap();
        assert!((r.coords[0] - 1.0).abs() < 1e-4, "{:?}", r.coords);
        assert!(r.warning.is_none());
    }

    #[test]
    fn reconstruct_warns_near_boundary() {
        let f = CPoly::one(3);
        let r = greens_reconstruct(&f, 0, c_newton(3), &[0.95, 0.0, 0.0], 8).unwrap();
        assert!(r.warning.is_some());
    }

    #[test]
    fn reconstruct_is_linear() {
        let basis = bosonic_null_basis(3, 1, 1).unwrap();
        let (f1, f2) = (&basis[0], &basis[basis.len() - 1]);
        let y = [0.1, -0.2, 0.05];
        let r1 = greens_reconstruct(f1, 1, 1.0, &y, 10).unwrap();
        let r2 = greens_reconstruct(f2, 1, 1.0, &y, 10).unwrap();
        let r12 = greens_reconstruct(&f1.add(f2), 1, 1.0, &y, 10).unwrap();
        for i in 0..r12.coords.len() {
            assert!((r12.coords[i] - r1.coords[i] - r2.coords[i]).abs() < 1e-10);
        }
    }
}
