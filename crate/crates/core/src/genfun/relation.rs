use rand::Rng;

use super::hermitian::{inner, C64};
use super::tuple::{random_vector, Elementary, LinearMap};

/// `max_z |∇f((z + Φz)/2) − i(z − Φz)| / |z|` over random samples.
pub fn generating_relation_check<R: Rng>(
    f: &Elementary,
    phi: &dyn Fn(&[C64]) -> Vec<C64>,
    dim: usize,
    samples: usize,
    rng: &mut R,
) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let z = random_vector(dim, rng);
        let pz = phi(&z);
        let x: Vec<C64> = z.iter().zip(&pz).map(|(a, b)| (a + b) * 0.5).collect();
        let g = f.gradient(&x);
        let scale = inner(&z, &z).sqrt().max(1e-300);
        let r = g
            .iter()
            .zip(z.iter().zip(&pz))
            .map(|(gj, (zj, pj))| (gj - C64::i() * (zj - pj)).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r / scale);
    }
    worst
}

/// `max |ω(Φx, Φy) − ω(x, y)|` with `ω(x, y) = ⟨ix, y⟩`, over random unit-ish pairs.
pub fn symplectic_defect<R: Rng>(phi: &LinearMap, samples: usize, rng: &mut R) -> f64 {
    let dim = phi.matrix.nrows();
    let omega = |x: &[C64], y: &[C64]| {
        let ix: Vec<C64> = x.iter().map(|a| C64::i() * a).collect();
        inner(&ix, y)
    };
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = random_vector(dim, rng);
        let y = random_vector(dim, rng);
        let d = omega(&phi.apply(&x), &phi.apply(&y)) - omega(&x, &y);
        worst = worst.max(d.abs());
    }
    worst
}
