use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::forms::{eval_f, eval_f_w};
use super::hermitian::C64;
use super::tuple::{random_vector, GFTuple};
use super::GenfunError;

/// `B̃_{n,m}(w, w') = (w, Σ_k (−1)^{k+1} w'_k, w')` with `k` counted from 1.
pub fn b_tilde(w: &[C64], w2: &[C64], dim: usize) -> Vec<C64> {
    let mut mid = vec![C64::new(0.0, 0.0); dim];
    for (k, block) in w2.chunks(dim).enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for (m, x) in mid.iter_mut().zip(block) {
            *m += sign * x;
        }
    }
    let mut out = w.to_vec();
    out.extend(mid);
    out.extend_from_slice(w2);
    out
}

/// `(v_1, v_n, v_{n−1}, …, v_2)`.
fn reflect(v: &[C64], dim: usize) -> Vec<C64> {
    let bs: Vec<&[C64]> = v.chunks(dim).collect();
    let mut out = bs[0].to_vec();
    for b in bs[1..].iter().rev() {
        out.extend_from_slice(b);
    }
    out
}

/// Largest absolute residual of each identity; `None` when sizes exclude it.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub bmn: Option<f64>,
    pub finverse: f64,
    pub fcyclic: f64,
    pub antisymmetry: f64,
}

impl IdentityReport {
    pub fn max(&self) -> f64 {
        [self.bmn.unwrap_or(0.0), self.finverse, self.fcyclic, self.antisymmetry]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn identity_suite(
    sigma: &GFTuple,
    sigma2: &GFTuple,
    samples: usize,
    seed: u64,
) -> Result<IdentityReport, GenfunError> {
    if sigma.d() != sigma2.d() {
        return Err(GenfunError::DimensionMismatch {
            expected: sigma.d() + 1,
            found: sigma2.d() + 1,
        });
    }
    let dim = sigma.d() + 1;
    let (n, m) = (sigma.len(), sigma2.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps = GFTuple::identity(sigma.d(), 1);
    let joined = sigma.concat(&eps)?.concat(sigma2)?;
    let forward = sigma.concat(sigma2)?;
    let backward = sigma2.concat(sigma)?;
    let inv = sigma.inverse();
    let qn = GFTuple::identity(sigma.d(), n);
    let odd = n % 2 == 1 && m % 2 == 1;

    let mut report = IdentityReport {
        bmn: odd.then_some(0.0),
        finverse: 0.0,
        fcyclic: 0.0,
        antisymmetry: 0.0,
    };
    for _ in 0..samples {
        if odd {
            let w = random_vector(n * dim, &mut rng);
            let w2 = random_vector(m * dim, &mut rng);
            let lhs = eval_f_w(&joined, &b_tilde(&w, &w2, dim))?;
            let rhs = eval_f_w(sigma, &w)? + eval_f_w(sigma2, &w2)?;
            report.bmn = report.bmn.map(|r| r.max((lhs - rhs).abs()));
        }
        let v = random_vector(n * dim, &mut rng);
        let r = eval_f(&inv, &v) + eval_f(sigma, &reflect(&v, dim));
        report.finverse = report.finverse.max(r.abs());

        let v2 = random_vector(m * dim, &mut rng);
        let mut vv = v.clone();
        vv.extend_from_slice(&v2);
        let mut swapped = v2.clone();
        swapped.extend_from_slice(&v);
        let r = eval_f(&forward, &vv) - eval_f(&backward, &swapped);
        report.fcyclic = report.fcyclic.max(r.abs());

        let r = eval_f(&qn, &v) + eval_f(&qn, &reflect(&v, dim));
        report.antisymmetry = report.antisymmetry.max(r.abs());
    }
    Ok(report)
}
