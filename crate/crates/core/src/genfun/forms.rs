use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::hermitian::{inner, HermitianForm, C64};
use super::tuple::{Elementary, GFTuple};
use super::GenfunError;

pub const DEFAULT_N0: usize = 4;

/// Splits a flat vector into `n` blocks of `C^{d+1}`.
pub fn blocks(v: &[C64], dim: usize) -> Vec<&[C64]> {
    v.chunks(dim).collect()
}

fn midpoint(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| (x + y) * 0.5).collect()
}

/// `F_σ(v) = Σ_k f_k((v_k + v_{k+1})/2) + ½⟨v_k, i v_{k+1}⟩`, indices mod n.
pub fn eval_f(sigma: &GFTuple, v: &[C64]) -> f64 {
    let dim = sigma.d() + 1;
    let vs = blocks(v, dim);
    let n = sigma.len();
    let mut total = 0.0;
    for k in 0..n {
        let (a, b) = (vs[k], vs[(k + 1) % n]);
        total += sigma.entries()[k].value(&midpoint(a, b));
        let ib: Vec<C64> = b.iter().map(|x| C64::i() * x).collect();
        total += 0.5 * inner(a, &ib);
    }
    total
}

/// Gradient of [`eval_f`] for the real inner product.
pub fn grad_f(sigma: &GFTuple, v: &[C64]) -> Vec<C64> {
    let dim = sigma.d() + 1;
    let n = sigma.len();
    let vs = blocks(v, dim);
    let mut g = vec![C64::new(0.0, 0.0); v.len()];
    for k in 0..n {
        let k1 = (k + 1) % n;
        let gk = sigma.entries()[k].gradient(&midpoint(vs[k], vs[k1]));
        for j in 0..dim {
            g[k * dim + j] += 0.5 * gk[j];
            g[k1 * dim + j] += 0.5 * gk[j];
            // ½⟨v_k, i v_{k+1}⟩ has gradient ½ i v_{k+1} in v_k and −½ i v_k in v_{k+1}.
            g[k * dim + j] += 0.5 * C64::i() * vs[k1][j];
            g[k1 * dim + j] -= 0.5 * C64::i() * vs[k][j];
        }
    }
    g
}

/// `Q_n = F_{ε^n}` on `(C^{d+1})^n`, defined for odd `n`.
pub fn build_qn(n: usize, d: usize) -> Result<HermitianForm, GenfunError> {
    if n.is_multiple_of(2) {
        return Err(GenfunError::EvenTuple(n));
    }
    assemble_f(&GFTuple::identity(d, n))
}

/// Matrix of `F_σ` for a quadratic tuple; even sizes are accepted for raw
/// evaluation.
pub fn assemble_f(sigma: &GFTuple) -> Result<HermitianForm, GenfunError> {
    let dim = sigma.d() + 1;
    let n = sigma.len();
    let size = n * dim;
    let mut m = DMatrix::<C64>::zeros(size, size);
    let quarter_i = C64::new(0.0, 0.25);
    for (k, e) in sigma.entries().iter().enumerate() {
        let h = e.as_quadratic().ok_or(GenfunError::NotQuadratic)?;
        let k1 = (k + 1) % n;
        for a in [k, k1] {
            for b in [k, k1] {
                for i in 0..dim {
                    for j in 0..dim {
                        m[(a * dim + i, b * dim + j)] += h.matrix()[(i, j)] * 0.25;
                    }
                }
            }
        }
        for i in 0..dim {
            m[(k * dim + i, k1 * dim + i)] += quarter_i;
            m[(k1 * dim + i, k * dim + i)] -= quarter_i;
        }
    }
    Ok(HermitianForm::from_sum(m))
}

/// `A_n v = w` with `w_k = (v_k + v_{k+1})/2`.
pub fn a_n(v: &[C64], dim: usize) -> Vec<C64> {
    let vs = blocks(v, dim);
    let n = vs.len();
    (0..n).flat_map(|k| midpoint(vs[k], vs[(k + 1) % n])).collect()
}

/// Solves `A_n v = w`: `v_k = Σ_j (−1)^j w_{k+j}`. `A_n` is singular for even `n`.
pub fn a_n_solve(w: &[C64], dim: usize) -> Result<Vec<C64>, GenfunError> {
    let ws = blocks(w, dim);
    let n = ws.len();
    if n.is_multiple_of(2) {
        return Err(GenfunError::SingularChange(n));
    }
    let mut v = vec![C64::new(0.0, 0.0); w.len()];
    for k in 0..n {
        for j in 0..n {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            for c in 0..dim {
                v[k * dim + c] += sign * ws[(k + j) % n][c];
            }
        }
    }
    Ok(v)
}

/// `Q_n` in `w`-variables: `2 Σ_{l<k} (−1)^{k+l} ⟨w_k, i w_l⟩`.
pub fn qn_w(w: &[C64], dim: usize) -> f64 {
    let ws = blocks(w, dim);
    let mut total = 0.0;
    for k in 0..ws.len() {
        for l in 0..k {
            let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
            let il: Vec<C64> = ws[l].iter().map(|x| C64::i() * x).collect();
            total += 2.0 * sign * inner(ws[k], &il);
        }
    }
    total
}

/// `F_σ ∘ A_n^{-1}`, computed through the `v`-variables.
pub fn eval_f_w(sigma: &GFTuple, w: &[C64]) -> Result<f64, GenfunError> {
    Ok(eval_f(sigma, &a_n_solve(w, sigma.d() + 1)?))
}

/// `Σ f_k(w_k) + Q_n(w)`, the same function written directly in `w`.
pub fn eval_f_w_split(sigma: &GFTuple, w: &[C64]) -> f64 {
    let dim = sigma.d() + 1;
    let direct: f64 = blocks(w, dim)
        .iter()
        .zip(sigma.entries())
        .map(|(wk, f)| f.value(wk))
        .sum();
    direct + qn_w(w, dim)
}

/// Odd nondecreasing clamp: identity on `|t| ≤ m + 1/4`, slope ½ up to
/// `m + 3/4`, then constant `±(m + 1/2)`.
pub fn chi(m: usize, t: f64) -> f64 {
    let m = m as f64;
    let a = t.abs();
    let r = if a <= m + 0.25 {
        a
    } else if a >= m + 0.75 {
        m + 0.5
    } else {
        m + 0.25 + 0.5 * (a - (m + 0.25))
    };
    r.copysign(t)
}

/// Rotation angles of `δ^{(m)}_t`, `m·n0` of them.
pub fn delta_angles(m: usize, t: f64, n0: usize) -> Vec<f64> {
    if m == 1 {
        return vec![t / n0 as f64; n0];
    }
    let c = chi(m - 1, t);
    let mut out = delta_angles(m - 1, c, n0);
    out.extend(std::iter::repeat_n((t - c) / n0 as f64, n0));
    out
}

/// Elementary function of `z ↦ e^{−2iπs} z`.
pub fn delta_form(dim: usize, s: f64) -> HermitianForm {
    HermitianForm::scalar(dim, -(PI * s).tan())
}

/// `σ_{m,t} = (σ, δ^{(m)}_t)`.
pub fn build_sigma_mt(sigma: &GFTuple, m: usize, t: f64, n0: usize) -> Result<GFTuple, GenfunError> {
    if m == 0 {
        return Err(GenfunError::OutOfRange("m must be at least 1".into()));
    }
    if n0 < 4 || !n0.is_multiple_of(2) {
        return Err(GenfunError::BadN0(n0));
    }
    if !t.is_finite() || t.abs() > m as f64 {
        return Err(GenfunError::OutOfRange(format!("t = {t} outside [-{m}, {m}]")));
    }
    let dim = sigma.d() + 1;
    let mut out = sigma.clone();
    for s in delta_angles(m, t, n0) {
        out.push(Elementary::Quadratic(delta_form(dim, s)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::hermitian::{index_signature, DEFAULT_TOL};
    use super::super::tuple::random_vector;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn qn_examples() {
        let q1 = build_qn(1, 0).unwrap();
        assert!(q1.matrix().norm() < 1e-15);
        let s = index_signature(&q1, DEFAULT_TOL).unwrap();
        assert_eq!((s.minus, s.zero, s.plus), (0, 1, 0));
        let s = index_signature(&build_qn(3, 1).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!((s.minus, s.zero, s.plus), (2, 2, 2));
        let s = index_signature(&build_qn(5, 2).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!((s.minus, s.zero, s.plus), (6, 3, 6));
        assert!(matches!(build_qn(4, 1), Err(GenfunError::EvenTuple(4))));
    }

    #[test]
    fn qn_spectrum_is_the_circulant_one() {
        // Q_n is the circulant with symbol ½ Re(i e^{iθ}) at θ = 2πj/n.
        for n in [3usize, 5, 7] {
            let ev = build_qn(n, 0).unwrap().eigenvalues();
            let mut expected: Vec<f64> = (0..n)
                .map(|j| -0.5 * (2.0 * PI * j as f64 / n as f64).sin())
                .collect();
            expected.sort_by(f64::total_cmp);
            for (a, b) in ev.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matrix_and_formula_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (d, n) in [(0, 1), (1, 3), (2, 5), (1, 2)] {
            let sigma = GFTuple::random_quadratic(d, n, 0.5, &mut rng);
            let h = assemble_f(&sigma).unwrap();
            let v = random_vector(n * (d + 1), &mut rng);
            assert!((h.eval(&v) - eval_f(&sigma, &v)).abs() < 1e-12);
            let g1 = h.gradient(&v);
            let g2 = grad_f(&sigma, &v);
            for (a, b) in g1.iter().zip(&g2) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_tuple_gives_qn() {
        let a = assemble_f(&GFTuple::identity(1, 5)).unwrap();
        assert_eq!(a, build_qn(5, 1).unwrap());
    }

    #[test]
    fn w_variable_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for (d, n) in [(0, 1), (1, 3), (2, 5), (1, 7)] {
            let sigma = GFTuple::random_quadratic(d, n, 0.5, &mut rng);
            let v = random_vector(n * (d + 1), &mut rng);
            let w = a_n(&v, d + 1);
            let back = a_n_solve(&w, d + 1).unwrap();
            for (a, b) in v.iter().zip(&back) {
                assert!((a - b).norm() < 1e-12);
            }
            assert!((eval_f(&sigma, &v) - eval_f_w_split(&sigma, &w)).abs() < 1e-9);
        }
        let w = random_vector(4, &mut rng);
        assert!(matches!(a_n_solve(&w, 2), Err(GenfunError::SingularChange(2))));
    }

    #[test]
    fn a2_is_singular() {
        // (v, −v) is in the kernel of A_2.
        let v = [C64::new(1.0, 2.0), C64::new(-1.0, -2.0)];
        assert!(a_n(&v, 1).iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn clamp_shape() {
        assert_eq!(chi(1, 0.3), 0.3);
        assert_eq!(chi(1, 1.25), 1.25);
        assert_eq!(chi(1, 5.0), 1.5);
        assert_eq!(chi(1, -5.0), -1.5);
        assert!((chi(1, 1.5) - 1.375).abs() < 1e-15);
        let mut prev = f64::NEG_INFINITY;
        for i in -400..=400 {
            let c = chi(2, i as f64 / 50.0);
            assert!(c >= prev);
            assert_eq!(chi(2, -(i as f64) / 50.0), -c);
            prev = c;
        }
    }

    #[test]
    fn delta_angles_sum_and_branch() {
        for m in 1..=4usize {
            for i in -100..=100 {
                let t = m as f64 * i as f64 / 100.0;
                let angles = delta_angles(m, t, DEFAULT_N0);
                assert_eq!(angles.len(), m * DEFAULT_N0);
                let total: f64 = angles.iter().sum();
                assert!((total - t).abs() < 1e-12);
                assert!(angles.iter().all(|s| s.abs() < 0.5));
            }
        }
    }

    #[test]
    fn sigma_mt_at_zero_is_qn() {
        let sigma = GFTuple::identity(1, 1);
        let s = build_sigma_mt(&sigma, 2, 0.0, 4).unwrap();
        assert_eq!(s.len(), 9);
        let f = assemble_f(&s).unwrap();
        assert!((f.matrix() - build_qn(9, 1).unwrap().matrix()).norm() < 1e-15);
        assert!(build_sigma_mt(&sigma, 2, 2.5, 4).is_err());
        assert!(build_sigma_mt(&sigma, 2, 0.5, 3).is_err());
    }

    #[test]
    fn sigma_mt_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let sigma = GFTuple::random_quadratic(1, 3, 0.2, &mut rng);
        let ts = [-2.0, -1.3, -0.2, 0.0, 0.7, 1.26, 1.9, 2.0];
        let forms: Vec<_> = ts
            .iter()
            .map(|&t| assemble_f(&build_sigma_mt(&sigma, 2, t, 4).unwrap()).unwrap())
            .collect();
        for _ in 0..200 {
            let v = random_vector(forms[0].dim(), &mut rng);
            for w in forms.windows(2) {
                assert!(w[0].eval(&v) >= w[1].eval(&v) - 1e-12);
            }
        }
    }
}
