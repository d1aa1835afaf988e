use nalgebra::DMatrix;
use num_complex::Complex64;

use super::GenfunError;

pub type C64 = Complex64;

pub const DEFAULT_TOL: f64 = 1e-9;
const HERMITIAN_TOL: f64 = 1e-12;

/// `⟨x, y⟩ = Re Σ conj(x_j) y_j`.
pub fn inner(x: &[C64], y: &[C64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a.conj() * b).re).sum()
}

pub fn norm_sqr(x: &[C64]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum()
}

/// Quadratic form `v ↦ v* A v` with `A` Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForm {
    matrix: DMatrix<C64>,
}

/// Eigenvalue counts `(n_−, n_0, n_+)`, complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub minus: usize,
    pub zero: usize,
    pub plus: usize,
}

impl Signature {
    /// Counts over the underlying real vector space.
    pub fn real(self) -> Signature {
        Signature {
            minus: 2 * self.minus,
            zero: 2 * self.zero,
            plus: 2 * self.plus,
        }
    }
}

impl HermitianForm {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self, GenfunError> {
        if !matrix.is_square() {
            return Err(GenfunError::NotHermitian);
        }
        let n = matrix.nrows();
        for i in 0..n {
            for j in i..n {
                if (matrix[(i, j)] - matrix[(j, i)].conj()).norm() > HERMITIAN_TOL {
                    return Err(GenfunError::NotHermitian);
                }
            }
        }
        Ok(HermitianForm { matrix })
    }

    /// Symmetrizes the input, for matrices assembled from floating-point sums.
    pub(crate) fn from_sum(matrix: DMatrix<C64>) -> Self {
        let sym = (&matrix + matrix.adjoint()) * C64::new(0.5, 0.0);
        HermitianForm { matrix: sym }
    }

    pub fn zero(dim: usize) -> Self {
        HermitianForm {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn scalar(dim: usize, c: f64) -> Self {
        HermitianForm {
            matrix: DMatrix::from_diagonal_element(dim, dim, C64::new(c, 0.0)),
        }
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(e, 0.0);
        }
        HermitianForm { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.matrix[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn eval(&self, v: &[C64]) -> f64 {
        inner(v, &self.apply(v))
    }

    /// Gradient for the real inner product: `2Av`.
    pub fn gradient(&self, v: &[C64]) -> Vec<C64> {
        self.apply(v).into_iter().map(|x| 2.0 * x).collect()
    }

    pub fn negated(&self) -> Self {
        HermitianForm {
            matrix: -self.matrix.clone(),
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Eigenvector for the eigenvalue closest to zero.
    pub fn kernel_vector(&self) -> (f64, Vec<C64>) {
        let eig = self.matrix.clone().symmetric_eigen();
        let (i, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .expect("nonempty form");
        (
            eig.eigenvalues[i],
            eig.eigenvectors.column(i).iter().copied().collect(),
        )
    }
}

/// Complex eigenvalue counts below `−tol`, within `[−tol, tol]`, above `tol`.
/// Any eigenvalue within a factor ten outside the band is refused.
pub fn index_signature(h: &HermitianForm, tol: f64) -> Result<Signature, GenfunError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(GenfunError::BadTolerance(tol));
    }
    let mut sig = Signature {
        minus: 0,
        zero: 0,
        plus: 0,
    };
    for e in h.eigenvalues() {
        let a = e.abs();
        if a > tol && a < 10.0 * tol {
            return Err(GenfunError::BorderlineEigenvalue { value: e, tol });
        }
        if e < -tol {
            sig.minus += 1;
        } else if e > tol {
            sig.plus += 1;
        } else {
            sig.zero += 1;
        }
    }
    Ok(sig)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signature_examples() {
        let s = index_signature(&HermitianForm::scalar(4, 1.0), DEFAULT_TOL).unwrap();
        assert_eq!((s.minus, s.zero, s.plus), (0, 0, 4));
        let s = index_signature(&HermitianForm::diagonal(&[-1.0, 0.0, 2.0]), DEFAULT_TOL).unwrap();
        assert_eq!((s.minus, s.zero, s.plus), (1, 1, 1));
        assert_eq!(s.real().zero, 2);
    }

    #[test]
    fn guard_band() {
        let h = HermitianForm::diagonal(&[5e-9, 1.0]);
        assert!(matches!(
            index_signature(&h, 1e-9),
            Err(GenfunError::BorderlineEigenvalue { .. })
        ));
        assert!(index_signature(&h, 2e-9).is_err());
        assert!(index_signature(&h, 1e-10).is_ok());
        assert!(index_signature(&h, 0.0).is_err());
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(0.0, 1.0);
        m[(1, 0)] = C64::new(0.0, 1.0);
        assert!(HermitianForm::new(m.clone()).is_err());
        m[(1, 0)] = C64::new(0.0, -1.0);
        let h = HermitianForm::new(m).unwrap();
        let v = [C64::new(0.3, -1.0), C64::new(2.0, 0.5)];
        let direct = (v[0].conj() * C64::i() * v[1] - v[1].conj() * C64::i() * v[0]).re;
        assert!((h.eval(&v) - direct).abs() < 1e-14);
    }
}
