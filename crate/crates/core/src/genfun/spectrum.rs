use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::forms::{build_sigma_mt, grad_f};
use super::hermitian::C64;
use super::rotation::{kernel_point, normalize_line, sweep_jumps};
use super::tuple::GFTuple;
use super::GenfunError;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPoint {
    pub t: f64,
    /// Unit representative of the fixed C-line in `C^{d+1}`.
    pub line: Vec<C64>,
    /// Real Morse index of the critical line of `F_{σ_{m,t}}`.
    pub morse_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectrumSample {
    pub points: Vec<SpectrumPoint>,
    /// Seeds whose Newton iteration failed.
    pub non_converged: Vec<usize>,
}

/// Largest seed count the oracle search accepts.
pub const SEED_BUDGET: usize = 100_000;

/// Action values in `(−m, m]` of the fixed C-lines of the map generated by `σ`.
///
/// Quadratic tuples: jumps of `κ` on a `grid`-step sweep, bisected.
/// Oracle tuples: Newton for `Φz = λz` in affine charts of `CP^d` from a
/// `grid^{2d}` seed lattice per chart, action `arg λ / 2π`, index from a
/// finite-difference Hessian of `F_{σ_{m,t}}` transverse to the line.
pub fn critical_spectrum(
    sigma: &GFTuple,
    m: usize,
    grid: usize,
    n0: usize,
    tol: f64,
) -> Result<SpectrumSample, GenfunError> {
    let dim = sigma.d() + 1;
    if sigma.is_quadratic() {
        let mut points = Vec::new();
        for j in sweep_jumps(sigma, m, n0, grid, tol)? {
            if j.size != 1 {
                return Err(GenfunError::DegenerateSpectrum(j.t));
            }
            points.push(kernel_point(sigma, m, j.t, n0, dim, tol)?);
        }
        return Ok(SpectrumSample {
            points,
            non_converged: vec![],
        });
    }

    let d = sigma.d();
    let per_chart = grid.checked_pow(2 * d as u32).unwrap_or(usize::MAX);
    if dim > 3 || per_chart.saturating_mul(dim) > SEED_BUDGET {
        return Err(GenfunError::Budget(format!(
            "{dim} coordinates with grid {grid}: at most 3 coordinates and {SEED_BUDGET} seeds"
        )));
    }
    let lattice: Vec<f64> = (0..grid)
        .map(|i| if grid == 1 { 0.0 } else { -1.0 + 2.0 * i as f64 / (grid - 1) as f64 })
        .collect();

    let mut lines: Vec<(Vec<C64>, C64)> = Vec::new();
    let mut non_converged = Vec::new();
    let mut seed_id = 0;
    for pivot in 0..dim {
        for idx in 0..per_chart {
            let mut y = Vec::with_capacity(d);
            let mut rest = idx;
            for _ in 0..d {
                let re = lattice[rest % grid];
                rest /= grid;
                let im = lattice[rest % grid];
                rest /= grid;
                y.push(C64::new(re, im));
            }
            match newton_eigenline(sigma, pivot, &y) {
                Some((z, lambda)) => {
                    let z = normalize_line(&z);
                    let known = lines.iter().any(|(w, _)| {
                        let overlap: C64 = w.iter().zip(&z).map(|(a, b)| a.conj() * b).sum();
                        overlap.norm() > 1.0 - 1e-8
                    });
                    if !known {
                        lines.push((z, lambda));
                    }
                }
                None => non_converged.push(seed_id),
            }
            seed_id += 1;
        }
    }

    let mut points = Vec::new();
    for (z, lambda) in &lines {
        let t0 = (lambda.arg() / (2.0 * PI)).rem_euclid(1.0);
        let mut t = t0 - (m as f64 + 1.0).floor();
        while t <= m as f64 + 1e-12 {
            if t > -(m as f64) + 1e-12 {
                let index = transverse_index(sigma, m, t, n0, z)?;
                points.push(SpectrumPoint {
                    t,
                    line: z.clone(),
                    morse_index: Some(index),
                });
            }
            t += 1.0;
        }
    }
    points.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(SpectrumSample {
        points,
        non_converged,
    })
}

fn chart_point(pivot: usize, y: &[C64]) -> Vec<C64> {
    let mut z = Vec::with_capacity(y.len() + 1);
    z.extend_from_slice(&y[..pivot]);
    z.push(C64::new(1.0, 0.0));
    z.extend_from_slice(&y[pivot..]);
    z
}

/// Residual `Φz − λz` as a real vector.
fn eigen_residual(sigma: &GFTuple, pivot: usize, x: &[f64]) -> Option<Vec<f64>> {
    let d = sigma.d();
    let y: Vec<C64> = (0..d).map(|j| C64::new(x[2 * j], x[2 * j + 1])).collect();
    let lambda = C64::new(x[2 * d], x[2 * d + 1]);
    let z = chart_point(pivot, &y);
    let phi = sigma.orbit(&z).ok()?.pop()?;
    Some(
        phi.iter()
            .zip(&z)
            .flat_map(|(p, zj)| {
                let r = p - lambda * zj;
                [r.re, r.im]
            })
            .collect(),
    )
}

fn newton_eigenline(sigma: &GFTuple, pivot: usize, y0: &[C64]) -> Option<(Vec<C64>, C64)> {
    let d = sigma.d();
    let z0 = chart_point(pivot, y0);
    let phi0 = sigma.orbit(&z0).ok()?.pop()?;
    let rayleigh: C64 = z0.iter().zip(&phi0).map(|(a, b)| a.conj() * b).sum::<C64>()
        / z0.iter().map(|a| a.norm_sqr()).sum::<f64>();
    let mut x: Vec<f64> = y0.iter().flat_map(|c| [c.re, c.im]).collect();
    x.push(rayleigh.re);
    x.push(rayleigh.im);
    let size = x.len();
    let norm = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut r = eigen_residual(sigma, pivot, &x)?;
    for _ in 0..80 {
        if norm(&r) < 1e-13 {
            let y: Vec<C64> = (0..d).map(|j| C64::new(x[2 * j], x[2 * j + 1])).collect();
            return Some((chart_point(pivot, &y), C64::new(x[2 * d], x[2 * d + 1])));
        }
        let h = 1e-7;
        let mut jac = DMatrix::<f64>::zeros(size, size);
        for c in 0..size {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[c] += h;
            xm[c] -= h;
            let rp = eigen_residual(sigma, pivot, &xp)?;
            let rm = eigen_residual(sigma, pivot, &xm)?;
            for row in 0..size {
                jac[(row, c)] = (rp[row] - rm[row]) / (2.0 * h);
            }
        }
        let step = jac.lu().solve(&DVector::from_column_slice(&r))?;
        let mut scale = 1.0;
        let current = norm(&r);
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - scale * s).collect();
            if let Some(rt) = eigen_residual(sigma, pivot, &trial) {
                if norm(&rt) < current {
                    x = trial;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !accepted || x.iter().any(|v| v.abs() > 1e6) {
            return None;
        }
    }
    None
}

fn to_real(v: &[C64]) -> Vec<f64> {
    v.iter().flat_map(|c| [c.re, c.im]).collect()
}

fn from_real(x: &[f64]) -> Vec<C64> {
    x.chunks(2).map(|p| C64::new(p[0], p[1])).collect()
}

/// Index of the Hessian of `F_{σ_{m,t}}` on the real complement of the
/// critical line through the orbit of `z`.
fn transverse_index(sigma: &GFTuple, m: usize, t: f64, n0: usize, z: &[C64]) -> Result<usize, GenfunError> {
    let smt = build_sigma_mt(sigma, m, t, n0)?;
    let mut orbit = smt.orbit(z)?;
    orbit.pop();
    let v: Vec<C64> = orbit.into_iter().flatten().collect();
    let size = 2 * v.len();
    let scale = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let grad = to_real(&grad_f(&smt, &v));
    if grad.iter().map(|g| g * g).sum::<f64>().sqrt() > 1e-6 * scale {
        return Err(GenfunError::DegenerateSpectrum(t));
    }
    let h = 1e-5 * scale;
    let x0 = to_real(&v);
    let mut hess = DMatrix::<f64>::zeros(size, size);
    for c in 0..size {
        let mut xp = x0.clone();
        let mut xm = x0.clone();
        xp[c] += h;
        xm[c] -= h;
        let gp = to_real(&grad_f(&smt, &from_real(&xp)));
        let gm = to_real(&grad_f(&smt, &from_real(&xm)));
        for row in 0..size {
            hess[(row, c)] = (gp[row] - gm[row]) / (2.0 * h);
        }
    }
    let hess = (&hess + hess.transpose()) * 0.5;

    let u = DVector::from_column_slice(&x0) / scale;
    let iu = DVector::from_column_slice(&to_real(&v.iter().map(|c| C64::i() * c).collect::<Vec<_>>())) / scale;
    let mut spanning = DMatrix::<f64>::zeros(size, size + 2);
    spanning.set_column(0, &u);
    spanning.set_column(1, &iu);
    for c in 0..size {
        spanning[(c, c + 2)] = 1.0;
    }
    let q = spanning.qr().q();
    let complement = q.columns(2, size - 2).into_owned();
    let restricted = complement.transpose() * &hess * &complement;
    let eig = restricted.symmetric_eigen().eigenvalues;
    let largest = eig.iter().map(|e| e.abs()).fold(0.0, f64::max).max(1.0);
    if eig.iter().any(|e| e.abs() < 1e-6 * largest) {
        return Err(GenfunError::DegenerateSpectrum(t));
    }
    Ok(eig.iter().filter(|&&e| e < 0.0).count())
}
