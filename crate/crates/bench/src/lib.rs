//! Fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbar_core::field::rat;
use sbar_core::{
    Bar, Barcode, ComplexBuilder, Extended, FieldSpec, FilteredChainComplex, FiniteOrbit, PeriodicBarcode,
    Rational,
};

/// Lower-star filtration of the triangulated `n × n` vertex grid with random
/// integer heights scaled to `[0, 1]`.
pub fn grid_complex(n: usize, field: FieldSpec, seed: u64) -> FilteredChainComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let height: Vec<i64> = (0..n * n).map(|_| rng.random_range(0..=1000)).collect();
    let v = |i: usize, j: usize| i * n + j;
    let level = |vs: &[usize]| rat(vs.iter().map(|&x| height[x]).max().unwrap(), 1000);
    let mut b = ComplexBuilder::new(field);
    for x in 0..n * n {
        b = b.generator(&format!("v{x}"), 0, level(&[x]));
    }
    let edge = |b: ComplexBuilder, x: usize, y: usize| {
        let id = format!("e{x}_{y}");
        b.generator(&id, 1, level(&[x, y]))
            .boundary(&id, &[(1, &format!("v{y}")), (-1, &format!("v{x}"))])
    };
    for i in 0..n {
        for j in 0..n {
            if j + 1 < n {
                b = edge(b, v(i, j), v(i, j + 1));
            }
            if i + 1 < n {
                b = edge(b, v(i, j), v(i + 1, j));
            }
            if i + 1 < n && j + 1 < n {
                b = edge(b, v(i, j), v(i + 1, j + 1));
            }
        }
    }
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let (a, c) = (v(i, j), v(i + 1, j + 1));
            for (k, w) in [v(i, j + 1), v(i + 1, j)].into_iter().enumerate() {
                let mut t = [a, w, c];
                t.sort();
                let id = format!("t{i}_{j}_{k}");
                let faces = [
                    (1, format!("e{}_{}", t[1], t[2])),
                    (-1, format!("e{}_{}", t[0], t[2])),
                    (1, format!("e{}_{}", t[0], t[1])),
                ];
                let faces: Vec<(i64, &str)> = faces.iter().map(|(c, f)| (*c, f.as_str())).collect();
                b = b.generator(&id, 2, level(&t)).boundary(&id, &faces);
            }
        }
    }
    b.build().expect("grid complex is valid")
}

/// One essential class in degree 0 plus random finite bars in degrees 0 and 1
/// with endpoints in `k/64`, so two fixtures are always at finite distance.
pub fn random_barcode(bars: usize, seed: u64) -> Barcode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut list = vec![Bar::new(0, rat(0, 1), Extended::Infinite)];
    list.extend((1..bars).map(|_| {
        let birth = rng.random_range(0..64);
        let death = Extended::Finite(rat(birth + rng.random_range(1..32), 64));
        Bar::new(rng.random_range(0..2), rat(birth, 64), death)
    }));
    Barcode::new(FieldSpec::Rationals, list).expect("valid bars")
}

/// A periodic barcode on `CP^d` with `orbits` finite orbits.
pub fn random_periodic(d: u32, orbits: usize, seed: u64) -> PeriodicBarcode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spectral: Vec<Rational> = (0..=d).map(|_| rat(rng.random_range(0..97), 97)).collect();
    spectral.sort();
    let finite = (0..orbits)
        .map(|_| {
            let b = rng.random_range(0..97);
            FiniteOrbit {
                birth: rat(b, 97),
                death: rat(b + rng.random_range(1..60), 97),
                degree: rng.random_range(0..=2 * d as i64 + 1),
            }
        })
        .collect();
    PeriodicBarcode::new(d, FieldSpec::Rationals, finite, spectral).expect("valid periodic barcode")
}
