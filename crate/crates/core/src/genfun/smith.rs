use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::forms::{build_sigma_mt, eval_f, eval_f_w};
use super::hermitian::{inner, norm_sqr, C64};
use super::tuple::{random_vector, GFTuple};
use super::GenfunError;
use crate::field::is_prime;

/// Named residuals, each a maximum over random samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SmithLocusReport {
    pub residuals: Vec<(&'static str, f64)>,
}

impl SmithLocusReport {
    pub fn max(&self) -> f64 {
        self.residuals.iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }
}

fn alternating_sum(w: &[C64], dim: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); dim];
    for (k, block) in w.chunks(dim).enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for (o, x) in out.iter_mut().zip(block) {
            *o += sign * x;
        }
    }
    out
}

/// The involution of `(σ, ε, σ)` in `w`-variables:
/// `(w¹, w², w³) ↦ (w³, −w² + Σ_k (−1)^{k+1}(w¹_k + w³_k), w¹)`.
pub fn involution_p2(w: &[C64], n: usize, dim: usize) -> Vec<C64> {
    let (w1, rest) = w.split_at(n * dim);
    let (w2, w3) = rest.split_at(dim);
    let s1 = alternating_sum(w1, dim);
    let s3 = alternating_sum(w3, dim);
    let mut out = w3.to_vec();
    out.extend((0..dim).map(|j| -w2[j] + s1[j] + s3[j]));
    out.extend_from_slice(w1);
    out
}

/// Residuals of the fixed-locus identities of the `Z/p`-symmetric generating
/// function of the `p`-th iterate of `σ_{m,t}`.
#[allow(clippy::too_many_arguments)]
pub fn smith_fixed_locus_check(
    sigma: &GFTuple,
    m: usize,
    t: f64,
    n0: usize,
    p: u32,
    q: i64,
    samples: usize,
    seed: u64,
) -> Result<SmithLocusReport, GenfunError> {
    if !is_prime(p as u64) {
        return Err(GenfunError::NotPrime(p));
    }
    let half = (p as i64 - 1) / 2;
    let admissible = if p == 2 { (0..=1).contains(&q) } else { (-half..=half).contains(&q) };
    if !admissible {
        return Err(GenfunError::BadResidue { p, q });
    }
    let smt = build_sigma_mt(sigma, m, t, n0)?;
    let dim = smt.d() + 1;
    let n = smt.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if p == 2 {
        if n % 2 == 0 {
            return Err(GenfunError::EvenTuple(n));
        }
        let triple = smt.concat(&GFTuple::identity(smt.d(), 1))?.concat(&smt)?;
        let (mut p0, mut p1, mut inv) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..samples {
            let w = random_vector(n * dim, &mut rng);
            let f_w = eval_f_w(&smt, &w)?;

            let mut on_p0 = w.clone();
            on_p0.extend(alternating_sum(&w, dim));
            on_p0.extend_from_slice(&w);
            p0 = p0.max((eval_f_w(&triple, &on_p0)? - 2.0 * f_w).abs());

            let w2 = random_vector(dim, &mut rng);
            let mut on_p1 = w.clone();
            on_p1.extend_from_slice(&w2);
            on_p1.extend(w.iter().map(|x| -x));
            let iw2: Vec<C64> = w2.iter().map(|x| C64::i() * x).collect();
            let rhs = f_w + 2.0 * inner(&alternating_sum(&w, dim), &iw2);
            p1 = p1.max((0.5 * eval_f_w(&triple, &on_p1)? - rhs).abs());

            let big = random_vector((2 * n + 1) * dim, &mut rng);
            let moved = involution_p2(&big, n, dim);
            inv = inv.max((eval_f_w(&triple, &moved)? - eval_f_w(&triple, &big)?).abs());
        }
        return Ok(SmithLocusReport {
            residuals: vec![("p0-restriction", p0), ("p1-restriction", p1), ("involution", inv)],
        });
    }

    let big = smt.repeat(p as usize);
    let zeta_q = C64::from_polar(1.0, 2.0 * PI * q as f64 / p as f64);
    let c = (C64::new(1.0, 0.0) - zeta_q) * 0.5;
    let tan = (q as f64 * PI / p as f64).tan();
    let (mut restriction, mut cyclic) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let v = random_vector(n * dim, &mut rng);
        let mut stacked = Vec::with_capacity(p as usize * v.len());
        let mut phase = C64::new(1.0, 0.0);
        for _ in 0..p {
            stacked.extend(v.iter().map(|x| phase * x));
            phase *= zeta_q;
        }
        let lhs = eval_f(&big, &stacked);
        // u_k = v_k + (−1)^k (1 − ζ^q)/2 · v_1, k counted from 1.
        let u: Vec<C64> = v
            .chunks(dim)
            .enumerate()
            .flat_map(|(k, block)| {
                let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
                block
                    .iter()
                    .zip(&v[..dim])
                    .map(|(x, v1)| x + sign * c * v1)
                    .collect::<Vec<_>>()
            })
            .collect();
        let rhs = p as f64 * (eval_f(&smt, &u) - tan * norm_sqr(&u[..dim]));
        restriction = restriction.max((lhs - rhs).abs());

        let x = random_vector(p as usize * n * dim, &mut rng);
        let shift = n * dim;
        let mut rotated = x[x.len() - shift..].to_vec();
        rotated.extend_from_slice(&x[..x.len() - shift]);
        cyclic = cyclic.max((eval_f(&big, &rotated) - eval_f(&big, &x)).abs());
    }
    Ok(SmithLocusReport {
        residuals: vec![("restriction", restriction), ("cyclic-invariance", cyclic)],
    })
}
