use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::forms::{assemble_f, build_sigma_mt};
use super::hermitian::{HermitianForm, C64};
use super::relation::generating_relation_check;
use super::spectrum::{SpectrumPoint, SpectrumSample};
use super::tuple::GFTuple;
use super::GenfunError;
use crate::field::{rational_from_f64, FieldSpec, Rational};
use crate::periodic::PeriodicBarcode;

/// Complex dimension of the non-positive eigenspace of `F_{σ_{m,t}}`.
pub fn kappa(sigma: &GFTuple, m: usize, t: f64, n0: usize, tol: f64) -> Result<usize, GenfunError> {
    let f = assemble_f(&build_sigma_mt(sigma, m, t, n0)?)?;
    Ok(f.eigenvalues().iter().filter(|&&e| e <= tol).count())
}

/// A jump of `κ` located to bisection precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub t: f64,
    pub size: usize,
}

const BISECTION_WIDTH: f64 = 1e-12;

/// Sweeps `t` over `[−m, m]` on `grid` equal steps, bisects every change of
/// `κ` and places each jump at the zero of the crossing eigenvalue.
/// A jump exactly at `−m` is not seen.
pub fn sweep_jumps(
    sigma: &GFTuple,
    m: usize,
    n0: usize,
    grid: usize,
    tol: f64,
) -> Result<Vec<Jump>, GenfunError> {
    let grid = grid.max(2);
    let lo = -(m as f64);
    let step = 2.0 * m as f64 / grid as f64;
    let ts: Vec<f64> = (0..=grid).map(|i| if i == grid { m as f64 } else { lo + i as f64 * step }).collect();
    let ks = ts
        .iter()
        .map(|&t| kappa(sigma, m, t, n0, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let mut jumps = Vec::new();
    for i in 0..grid {
        if ks[i + 1] < ks[i] {
            return Err(GenfunError::OutOfRange(format!(
                "κ decreases between {} and {}",
                ts[i],
                ts[i + 1]
            )));
        }
        if ks[i + 1] > ks[i] {
            let mut found = Vec::new();
            bisect(sigma, m, n0, tol, (ts[i], ks[i]), (ts[i + 1], ks[i + 1]), &mut found)?;
            let mut below = ks[i];
            for j in found {
                let t = zero_crossing(sigma, m, n0, j.t, below + j.size - 1, ts[i + 1])?;
                jumps.push(Jump { t, size: j.size });
                below += j.size;
            }
        }
    }
    Ok(jumps)
}

/// The threshold `tol` trips slightly before the eigenvalue reaches zero;
/// bisect the sign of the `index`-th eigenvalue past `t` up to `limit`.
fn zero_crossing(sigma: &GFTuple, m: usize, n0: usize, t: f64, index: usize, limit: f64) -> Result<f64, GenfunError> {
    let value = |s: f64| -> Result<f64, GenfunError> {
        Ok(assemble_f(&build_sigma_mt(sigma, m, s, n0)?)?.eigenvalues()[index])
    };
    if value(t)? <= 0.0 {
        return Ok(t);
    }
    let (mut lo, mut width) = (t, 1e-9);
    let mut hi = loop {
        let probe = (t + width).min(limit);
        if probe >= limit || value(probe)? <= 0.0 {
            break probe;
        }
        lo = probe;
        width *= 4.0;
    };
    while hi - lo > BISECTION_WIDTH * 1e-2 {
        let mid = 0.5 * (lo + hi);
        if value(mid)? <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi = 0.5 * (lo + hi);
    Ok(hi)
}

fn bisect(
    sigma: &GFTuple,
    m: usize,
    n0: usize,
    tol: f64,
    left: (f64, usize),
    right: (f64, usize),
    out: &mut Vec<Jump>,
) -> Result<(), GenfunError> {
    if right.0 - left.0 <= BISECTION_WIDTH {
        out.push(Jump {
            t: right.0,
            size: right.1 - left.1,
        });
        return Ok(());
    }
    let mid = 0.5 * (left.0 + right.0);
    let km = kappa(sigma, m, mid, n0, tol)?;
    if km > left.1 {
        bisect(sigma, m, n0, tol, left, (mid, km), out)?;
    }
    if right.1 > km {
        bisect(sigma, m, n0, tol, (mid, km), right, out)?;
    }
    Ok(())
}

/// Distance between two reals mod 1.
pub(crate) fn circle_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(1.0);
    d.min(1.0 - d)
}

#[derive(Debug, Clone)]
pub struct RotationResult {
    pub barcode: PeriodicBarcode,
    pub spectrum: SpectrumSample,
    pub jumps: Vec<Jump>,
    /// Sorted jump positions mod 1, as floats.
    pub representatives: Vec<f64>,
    /// Largest distance mod 1 from a representative to the nearest `a_j`.
    pub max_action_deviation: f64,
}

/// Barcode of the rotation `[z] ↦ [e^{2iπ a_j} z_j]` on `CP^d`, `d + 1 = a.len()`,
/// from the jumps of `κ` for the tuple of `n` equal steps.
pub fn rotation_barcode(
    a: &[f64],
    m: usize,
    n: usize,
    n0: usize,
    grid: usize,
    tol: f64,
) -> Result<RotationResult, GenfunError> {
    if a.is_empty() {
        return Err(GenfunError::OutOfRange("no rotation coefficients".into()));
    }
    if n.is_multiple_of(2) {
        return Err(GenfunError::EvenTuple(n));
    }
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if circle_distance(a[i], a[j]) < 1e-9 {
                return Err(GenfunError::DegenerateRotation(i, j));
            }
        }
    }
    let sigma = GFTuple::rotation(a, n)?;
    let dim = a.len();
    let step: Vec<C64> = a.iter().map(|x| C64::from_polar(1.0, 2.0 * PI * x / n as f64)).collect();
    let step_map = |z: &[C64]| z.iter().zip(&step).map(|(zj, s)| zj * s).collect::<Vec<_>>();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let residual = generating_relation_check(&sigma.entries()[0], &step_map, dim, 32, &mut rng);
    if residual >= 1e-8 {
        return Err(GenfunError::ConventionMismatch(residual));
    }

    let jumps = sweep_jumps(&sigma, m, n0, grid, tol)?;
    let mut points = Vec::new();
    for j in &jumps {
        if j.size != 1 {
            return Err(GenfunError::DegenerateSpectrum(j.t));
        }
        points.push(kernel_point(&sigma, m, j.t, n0, dim, tol)?);
    }

    let mut reps: Vec<f64> = Vec::new();
    for j in &jumps {
        let mut r = j.t.rem_euclid(1.0);
        if 1.0 - r < BISECTION_WIDTH {
            r = 0.0;
        }
        if !reps.iter().any(|&x| circle_distance(x, r) < 1e-7) {
            reps.push(r);
        }
    }
    reps.sort_by(f64::total_cmp);
    if reps.len() != dim {
        return Err(GenfunError::OutOfRange(format!(
            "found {} action classes, expected {dim}; refine the grid or raise m",
            reps.len()
        )));
    }
    let max_action_deviation = reps
        .iter()
        .map(|r| a.iter().map(|x| circle_distance(*r, *x)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let spectral: Vec<Rational> = reps
        .iter()
        .map(|&r| rational_from_f64(r).expect("finite"))
        .collect();
    let barcode = PeriodicBarcode::new(dim as u32 - 1, FieldSpec::Rationals, vec![], spectral)
        .expect("sorted representatives in [0, 1)");
    Ok(RotationResult {
        barcode,
        spectrum: SpectrumSample {
            points,
            non_converged: vec![],
        },
        jumps,
        representatives: reps,
        max_action_deviation,
    })
}

/// The critical line at a jump: the kernel vector of `F_{σ_{m,t}}`, its first
/// block as a representative, and the real index of the form.
pub(crate) fn kernel_point(
    sigma: &GFTuple,
    m: usize,
    t: f64,
    n0: usize,
    dim: usize,
    tol: f64,
) -> Result<SpectrumPoint, GenfunError> {
    let f: HermitianForm = assemble_f(&build_sigma_mt(sigma, m, t, n0)?)?;
    let (_, v) = f.kernel_vector();
    let line = normalize_line(&v[..dim]);
    let minus = f.eigenvalues().iter().filter(|&&e| e < -tol).count();
    Ok(SpectrumPoint {
        t,
        line,
        morse_index: Some(2 * minus),
    })
}

/// Unit vector with its largest coordinate real and positive.
pub(crate) fn normalize_line(z: &[C64]) -> Vec<C64> {
    let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let pivot = z
        .iter()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .copied()
        .unwrap_or(C64::new(1.0, 0.0));
    let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { C64::new(1.0, 0.0) };
    z.iter().map(|c| c * phase / norm.max(1e-300)).collect()
}

#[cfg(test)]
mod tests {
    use super::super::hermitian::DEFAULT_TOL;
    use super::*;
    use crate::periodic::{betamax_validate, beta_stats, homological_count, periodic_window_dimension};
    use crate::field::rat;

    #[test]
    fn two_coefficient_rotation() {
        let a = [0.0, std::f64::consts::FRAC_1_SQRT_2];
        let r = rotation_barcode(&a, 2, 3, 4, 256, DEFAULT_TOL).unwrap();
        assert!(r.max_action_deviation < 1e-6);
        assert!((r.representatives[1] - a[1]).abs() < 1e-6);
        assert_eq!(beta_stats(&r.barcode).k, 0);
        assert_eq!(homological_count(&r.barcode), 2);
        assert!(betamax_validate(&r.barcode).holds);
        assert!(r.spectrum.points.iter().all(|p| p.morse_index.is_some()));
    }

    #[test]
    fn repeated_coefficients_are_degenerate() {
        assert!(matches!(
            rotation_barcode(&[0.0, 0.0], 2, 3, 4, 64, DEFAULT_TOL),
            Err(GenfunError::DegenerateRotation(0, 1))
        ));
        assert!(matches!(
            rotation_barcode(&[0.2, 1.2], 2, 3, 4, 64, DEFAULT_TOL),
            Err(GenfunError::DegenerateRotation(0, 1))
        ));
    }

    #[test]
    fn point_rotation_reproduces_the_identity_barcode() {
        let r = rotation_barcode(&[0.0], 2, 1, 4, 64, DEFAULT_TOL).unwrap();
        assert_eq!(r.barcode.spectral(), &[rat(0, 1)]);
        // One birth per integer: (d+1)(⌊b⌋ − ⌊a⌋) generators in the window (a, b).
        for (a, b) in [(rat(-3, 2), rat(1, 2)), (rat(1, 3), rat(17, 4)), (rat(-1, 5), rat(4, 5))] {
            let expected = (b.floor() - a.floor()).to_integer();
            let dim = periodic_window_dimension(&r.barcode, &a, &b).unwrap();
            assert_eq!(num_bigint::BigInt::from(dim), expected);
        }
    }

    #[test]
    fn kappa_is_nondecreasing() {
        let sigma = GFTuple::rotation(&[0.1, 0.45, -0.3], 3).unwrap();
        let mut prev = 0;
        for i in 0..=80 {
            let t = -2.0 + i as f64 / 20.0;
            let k = kappa(&sigma, 2, t, 4, DEFAULT_TOL).unwrap();
            assert!(k >= prev);
            prev = k;
        }
    }
}
