use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::hermitian::{HermitianForm, C64};
use super::GenfunError;

/// A 2-homogeneous S¹-invariant function with its gradient for the real inner
/// product `⟨x, y⟩ = Re Σ conj(x_j) y_j`.
pub trait ElementaryOracle: Send + Sync {
    fn value(&self, w: &[C64]) -> f64;
    fn gradient(&self, w: &[C64]) -> Vec<C64>;
}

/// One elementary generating function on `C^{d+1}`.
#[derive(Clone)]
pub enum Elementary {
    Quadratic(HermitianForm),
    Oracle(Arc<dyn ElementaryOracle>),
}

impl fmt::Debug for Elementary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elementary::Quadratic(h) => f.debug_tuple("Quadratic").field(h.matrix()).finish(),
            Elementary::Oracle(_) => f.write_str("Oracle(..)"),
        }
    }
}

impl Elementary {
    pub fn value(&self, w: &[C64]) -> f64 {
        match self {
            Elementary::Quadratic(h) => h.eval(w),
            Elementary::Oracle(o) => o.value(w),
        }
    }

    pub fn gradient(&self, w: &[C64]) -> Vec<C64> {
        match self {
            Elementary::Quadratic(h) => h.gradient(w),
            Elementary::Oracle(o) => o.gradient(w),
        }
    }

    pub fn as_quadratic(&self) -> Option<&HermitianForm> {
        match self {
            Elementary::Quadratic(h) => Some(h),
            Elementary::Oracle(_) => None,
        }
    }

    pub fn negated(&self) -> Elementary {
        match self {
            Elementary::Quadratic(h) => Elementary::Quadratic(h.negated()),
            Elementary::Oracle(o) => Elementary::Oracle(Arc::new(Negated(o.clone()))),
        }
    }

    /// The map generated by this function: `z = x − (i/2)∇f(x)` is solved for
    /// `x` by damped Newton with a finite-difference Jacobian, then `σ(z) = 2x − z`.
    pub fn step(&self, z: &[C64]) -> Result<Vec<C64>, GenfunError> {
        if let Elementary::Quadratic(h) = self {
            return Ok(cayley(h).apply(z));
        }
        let n = z.len();
        let scale = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
        let residual = |x: &[C64]| -> Vec<f64> {
            let g = self.gradient(x);
            x.iter()
                .zip(z)
                .zip(&g)
                .flat_map(|((xj, zj), gj)| {
                    let r = xj - C64::new(0.0, 0.5) * gj - zj;
                    [r.re, r.im]
                })
                .collect()
        };
        let norm = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut x = z.to_vec();
        let mut r = residual(&x);
        for _ in 0..100 {
            if norm(&r) <= 1e-14 * scale {
                return Ok(x.iter().zip(z).map(|(xj, zj)| 2.0 * xj - zj).collect());
            }
            let h = 1e-7 * scale;
            let mut jac = DMatrix::<f64>::zeros(2 * n, 2 * n);
            for c in 0..2 * n {
                let dir = if c % 2 == 0 { C64::new(h, 0.0) } else { C64::new(0.0, h) };
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[c / 2] += dir;
                xm[c / 2] -= dir;
                let (rp, rm) = (residual(&xp), residual(&xm));
                for row in 0..2 * n {
                    jac[(row, c)] = (rp[row] - rm[row]) / (2.0 * h);
                }
            }
            let step = jac
                .lu()
                .solve(&DVector::from_column_slice(&r))
                .ok_or(GenfunError::StepNonConvergence)?;
            let current = norm(&r);
            let mut t = 1.0;
            loop {
                let trial: Vec<C64> =
                    (0..n).map(|j| x[j] - t * C64::new(step[2 * j], step[2 * j + 1])).collect();
                let rt = residual(&trial);
                if norm(&rt) < current || t < 1e-6 {
                    x = trial;
                    r = rt;
                    break;
                }
                t *= 0.5;
            }
        }
        Err(GenfunError::StepNonConvergence)
    }
}

struct Negated(Arc<dyn ElementaryOracle>);

impl ElementaryOracle for Negated {
    fn value(&self, w: &[C64]) -> f64 {
        -self.0.value(w)
    }
    fn gradient(&self, w: &[C64]) -> Vec<C64> {
        self.0.gradient(w).into_iter().map(|g| -g).collect()
    }
}

/// Linear map generated by `w ↦ w*Hw`: `Φ = (H + iI)^{-1}(iI − H)`.
pub fn cayley(h: &HermitianForm) -> LinearMap {
    let n = h.dim();
    let i = DMatrix::from_diagonal_element(n, n, C64::i());
    let lhs = h.matrix() + &i;
    let rhs = &i - h.matrix();
    let phi = lhs.lu().solve(&rhs).expect("H + iI is invertible for Hermitian H");
    LinearMap { matrix: phi }
}

/// A complex-linear map of `C^M`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    pub matrix: DMatrix<C64>,
}

impl LinearMap {
    pub fn identity(n: usize) -> Self {
        LinearMap {
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn apply(&self, z: &[C64]) -> Vec<C64> {
        let v = DVector::from_column_slice(z);
        (&self.matrix * v).iter().copied().collect()
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &LinearMap) -> LinearMap {
        LinearMap {
            matrix: &self.matrix * &inner.matrix,
        }
    }
}

/// `w ↦ w*Hw + ε |w_0|²|w_1|² / ‖w‖²`: a non-quadratic S¹-invariant
/// 2-homogeneous perturbation of a quadratic form. Needs `d ≥ 1`.
#[derive(Debug, Clone)]
pub struct PerturbedQuadratic {
    pub base: HermitianForm,
    pub epsilon: f64,
}

impl ElementaryOracle for PerturbedQuadratic {
    fn value(&self, w: &[C64]) -> f64 {
        let n2: f64 = w.iter().map(|c| c.norm_sqr()).sum();
        let extra = if n2 == 0.0 {
            0.0
        } else {
            w[0].norm_sqr() * w[1].norm_sqr() / n2
        };
        self.base.eval(w) + self.epsilon * extra
    }

    fn gradient(&self, w: &[C64]) -> Vec<C64> {
        let mut g = self.base.gradient(w);
        let n2: f64 = w.iter().map(|c| c.norm_sqr()).sum();
        if n2 == 0.0 {
            return g;
        }
        let (a, b) = (w[0].norm_sqr(), w[1].norm_sqr());
        let prod = a * b / (n2 * n2);
        for (j, gj) in g.iter_mut().enumerate() {
            *gj -= self.epsilon * 2.0 * prod * w[j];
        }
        g[0] += self.epsilon * 2.0 * b / n2 * w[0];
        g[1] += self.epsilon * 2.0 * a / n2 * w[1];
        g
    }
}

/// A tuple `σ = (σ_1, …, σ_n)` of maps of `C^{d+1}` given by their
/// elementary generating functions. It generates `σ_n ∘ ⋯ ∘ σ_1`.
#[derive(Debug, Clone)]
pub struct GFTuple {
    d: usize,
    entries: Vec<Elementary>,
}

impl GFTuple {
    pub fn new(d: usize, entries: Vec<Elementary>) -> Result<Self, GenfunError> {
        for e in &entries {
            if let Elementary::Quadratic(h) = e {
                if h.dim() != d + 1 {
                    return Err(GenfunError::DimensionMismatch {
                        expected: d + 1,
                        found: h.dim(),
                    });
                }
            }
        }
        Ok(GFTuple { d, entries })
    }

    /// `ε^n`: `n` copies of the identity.
    pub fn identity(d: usize, n: usize) -> Self {
        GFTuple {
            d,
            entries: vec![Elementary::Quadratic(HermitianForm::zero(d + 1)); n],
        }
    }

    /// `n` equal steps of the rotation `z ↦ (e^{2iπ a_j} z_j)_j`.
    pub fn rotation(angles: &[f64], n: usize) -> Result<Self, GenfunError> {
        let per_step: Vec<f64> = angles.iter().map(|a| a / n as f64).collect();
        for &s in &per_step {
            if s.abs() >= 0.5 {
                return Err(GenfunError::OutOfRange(format!(
                    "per-step angle {s} outside (-1/2, 1/2)"
                )));
            }
        }
        let coeffs: Vec<f64> = per_step.iter().map(|s| (PI * s).tan()).collect();
        let step = Elementary::Quadratic(HermitianForm::diagonal(&coeffs));
        Ok(GFTuple {
            d: angles.len() - 1,
            entries: vec![step; n],
        })
    }

    /// Random Hermitian entries with coefficients in `[−scale, scale]`.
    pub fn random_quadratic<R: Rng>(d: usize, n: usize, scale: f64, rng: &mut R) -> Self {
        let entries = (0..n)
            .map(|_| Elementary::Quadratic(random_hermitian(d + 1, scale, rng)))
            .collect();
        GFTuple { d, entries }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Elementary] {
        &self.entries
    }

    pub fn is_quadratic(&self) -> bool {
        self.entries.iter().all(|e| e.as_quadratic().is_some())
    }

    /// `(σ, τ)`.
    pub fn concat(&self, other: &GFTuple) -> Result<GFTuple, GenfunError> {
        if self.d != other.d {
            return Err(GenfunError::DimensionMismatch {
                expected: self.d + 1,
                found: other.d + 1,
            });
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(GFTuple { d: self.d, entries })
    }

    /// `σ^p = (σ, …, σ)`.
    pub fn repeat(&self, p: usize) -> GFTuple {
        let mut entries = Vec::with_capacity(self.len() * p);
        for _ in 0..p {
            entries.extend(self.entries.iter().cloned());
        }
        GFTuple { d: self.d, entries }
    }

    /// `σ^{-1}`, with entries `(−f_n, …, −f_1)`.
    pub fn inverse(&self) -> GFTuple {
        GFTuple {
            d: self.d,
            entries: self.entries.iter().rev().map(Elementary::negated).collect(),
        }
    }

    pub fn push(&mut self, e: Elementary) {
        self.entries.push(e);
    }

    /// `σ_n ∘ ⋯ ∘ σ_1` applied to `z`, with all intermediate points.
    pub fn orbit(&self, z: &[C64]) -> Result<Vec<Vec<C64>>, GenfunError> {
        let mut out = Vec::with_capacity(self.len() + 1);
        out.push(z.to_vec());
        for e in &self.entries {
            let next = e.step(out.last().expect("nonempty"))?;
            out.push(next);
        }
        Ok(out)
    }

    /// The composed linear map of a quadratic tuple.
    pub fn composed_map(&self) -> Result<LinearMap, GenfunError> {
        let mut phi = LinearMap::identity(self.d + 1);
        for e in &self.entries {
            let h = e.as_quadratic().ok_or(GenfunError::NotQuadratic)?;
            phi = cayley(h).after(&phi);
        }
        Ok(phi)
    }

    pub fn to_json(&self) -> Result<String, GenfunError> {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let h = e.as_quadratic().ok_or(GenfunError::NotQuadratic)?;
                let m = h.matrix();
                Ok(EntryDoc {
                    kind: "quadratic".into(),
                    matrix: (0..m.nrows())
                        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                        .collect(),
                })
            })
            .collect::<Result<Vec<_>, GenfunError>>()?;
        Ok(serde_json::to_string(&TupleDoc { d: self.d, entries }).expect("plain data"))
    }

    pub fn from_json(text: &str) -> Result<Self, GenfunError> {
        let doc: TupleDoc =
            serde_json::from_str(text).map_err(|e| GenfunError::Json(e.to_string()))?;
        let entries = doc
            .entries
            .into_iter()
            .map(|e| {
                if e.kind != "quadratic" {
                    return Err(GenfunError::Json(format!("unsupported entry kind `{}`", e.kind)));
                }
                let n = e.matrix.len();
                if e.matrix.iter().any(|row| row.len() != n) {
                    return Err(GenfunError::Json("matrix is not square".into()));
                }
                let m = DMatrix::from_fn(n, n, |i, j| C64::new(e.matrix[i][j][0], e.matrix[i][j][1]));
                Ok(Elementary::Quadratic(HermitianForm::new(m)?))
            })
            .collect::<Result<Vec<_>, GenfunError>>()?;
        GFTuple::new(doc.d, entries)
    }
}

#[derive(Serialize, Deserialize)]
struct TupleDoc {
    d: usize,
    entries: Vec<EntryDoc>,
}

#[derive(Serialize, Deserialize)]
struct EntryDoc {
    kind: String,
    matrix: Vec<Vec<[f64; 2]>>,
}

pub fn random_hermitian<R: Rng>(dim: usize, scale: f64, rng: &mut R) -> HermitianForm {
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = C64::new(rng.random_range(-scale..=scale), 0.0);
        for j in i + 1..dim {
            let c = C64::new(rng.random_range(-scale..=scale), rng.random_range(-scale..=scale));
            m[(i, j)] = c;
            m[(j, i)] = c.conj();
        }
    }
    HermitianForm::new(m).expect("built Hermitian")
}

pub fn random_vector<R: Rng>(dim: usize, rng: &mut R) -> Vec<C64> {
    (0..dim)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}
