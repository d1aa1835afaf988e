//! Brute-force oracles and random instance generators shared by the
//! integration tests and the acceptance runner.
#![allow(dead_code)]

use rand::Rng;
use sbar_core::complex::CyclicAction;
use sbar_core::field::rat;
use sbar_core::periodic::{FiniteOrbit, PeriodicBarcode};
use sbar_core::{
    Bar, Barcode, ComplexBuilder, Extended, FieldSpec, FilteredChainComplex, Rational, Scalar,
};

// ---------- linear algebra over a field ----------

/// Row echelon form in place; returns the pivot columns.
fn echelon(rows: &mut Vec<Vec<Scalar>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv().unwrap();
        rows[r] = rows[r].iter().map(|x| x.mul(&inv).unwrap()).collect();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x = x.sub(&f.mul(y).unwrap()).unwrap();
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank(vectors: &[Vec<Scalar>]) -> usize {
    let mut rows = vectors.to_vec();
    echelon(&mut rows).len()
}

/// Basis of `{x : M x = 0}` for `M` given by its columns.
pub fn kernel(columns: &[Vec<Scalar>], nrows: usize, field: FieldSpec) -> Vec<Vec<Scalar>> {
    let ncols = columns.len();
    let mut rows: Vec<Vec<Scalar>> = (0..nrows)
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect();
    let pivots = if nrows == 0 { vec![] } else { echelon(&mut rows) };
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![field.zero(); ncols];
        v[free] = field.one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = rows[r][free].neg();
        }
        basis.push(v);
    }
    basis
}

fn dense_boundary(c: &FilteredChainComplex, g: usize, rows: &[usize]) -> Vec<Scalar> {
    let field = c.field();
    let mut v = vec![field.zero(); rows.len()];
    for (r, x) in c.boundary_of(g) {
        let pos = rows.iter().position(|q| q == r).expect("face of the right degree");
        v[pos] = x.clone();
    }
    v
}

// ---------- barcode oracle ----------

/// Barcode from ranks of the maps `H_k(C^{≤s}) → H_k(C^{≤t})` between all
/// pairs of critical values.
pub fn brute_barcode(c: &FilteredChainComplex) -> Barcode {
    let field = c.field();
    let gens = c.generators();
    let mut values: Vec<Rational> = gens.iter().map(|g| g.filtration.clone()).collect();
    values.sort();
    values.dedup();
    let mut bars = Vec::new();
    if gens.is_empty() {
        return Barcode::empty(field);
    }
    let lo = gens.iter().map(|g| g.degree).min().unwrap();
    let hi = gens.iter().map(|g| g.degree).max().unwrap();
    let nv = values.len();
    for k in lo..=hi {
        let in_deg = |deg: i64| -> Vec<usize> { (0..gens.len()).filter(|&i| gens[i].degree == deg).collect() };
        let ck = in_deg(k);
        let below = in_deg(k - 1);
        let above = in_deg(k + 1);
        if ck.is_empty() {
            continue;
        }
        let cycles_at = |s: &Rational| -> Vec<Vec<Scalar>> {
            let cols: Vec<usize> = ck.iter().copied().filter(|&g| &gens[g].filtration <= s).collect();
            let mats: Vec<Vec<Scalar>> = cols.iter().map(|&g| dense_boundary(c, g, &below)).collect();
            kernel(&mats, below.len(), field)
                .into_iter()
                .map(|kv| {
                    let mut full = vec![field.zero(); ck.len()];
                    for (x, &g) in kv.into_iter().zip(&cols) {
                        full[ck.iter().position(|&q| q == g).unwrap()] = x;
                    }
                    full
                })
                .collect()
        };
        let boundaries_at = |t: &Rational| -> Vec<Vec<Scalar>> {
            above
                .iter()
                .filter(|&&g| &gens[g].filtration <= t)
                .map(|&g| dense_boundary(c, g, &ck))
                .collect()
        };
        // r[i][j] = rank of H_k at values[i] into H_k at values[j], i ≤ j.
        let mut r = vec![vec![0i64; nv]; nv];
        for i in 0..nv {
            let z = cycles_at(&values[i]);
            for j in i..nv {
                let b = boundaries_at(&values[j]);
                let mut both = z.clone();
                both.extend(b.iter().cloned());
                r[i][j] = (rank(&both) - rank(&b)) as i64;
            }
        }
        let at = |i: isize, j: usize| if i < 0 { 0 } else { r[i as usize][j] };
        for i in 0..nv {
            for j in i + 1..nv {
                let mu = at(i as isize, j - 1) - at(i as isize, j) - at(i as isize - 1, j - 1) + at(i as isize - 1, j);
                assert!(mu >= 0, "negative multiplicity");
                for _ in 0..mu {
                    bars.push(Bar::new(k, values[i].clone(), Extended::Finite(values[j].clone())));
                }
            }
            let mu = at(i as isize, nv - 1) - at(i as isize - 1, nv - 1);
            for _ in 0..mu {
                bars.push(Bar::new(k, values[i].clone(), Extended::Infinite));
            }
        }
    }
    Barcode::new(field, bars).expect("valid bars")
}

// ---------- bottleneck oracle ----------

fn abs(q: Rational) -> Rational {
    if q < Rational::from_integer(0.into()) { -q } else { q }
}

fn half_length(b: &Bar) -> Extended {
    match &b.death {
        Extended::Finite(d) => Extended::Finite((d - &b.birth) / Rational::from_integer(2.into())),
        Extended::Infinite => Extended::Infinite,
    }
}

fn pair_cost(x: &Bar, y: &Bar) -> Extended {
    if x.degree != y.degree {
        return Extended::Infinite;
    }
    let births = abs(&x.birth - &y.birth);
    match (&x.death, &y.death) {
        (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(births.max(abs(a - b))),
        (Extended::Infinite, Extended::Infinite) => Extended::Finite(births),
        _ => Extended::Infinite,
    }
}

/// Minimum over all partial matchings of the largest cost.
pub fn brute_bottleneck(a: &Barcode, b: &Barcode) -> Extended {
    let xs = a.expanded();
    let ys = b.expanded();
    let mut used = vec![false; ys.len()];
    let mut best = Extended::Infinite;
    let mut first = true;
    fn go(
        i: usize,
        xs: &[Bar],
        ys: &[Bar],
        used: &mut Vec<bool>,
        current: Extended,
        best: &mut Extended,
        first: &mut bool,
    ) {
        if !*first && current >= *best {
            return;
        }
        if i == xs.len() {
            let mut cost = current;
            for (y, u) in ys.iter().zip(used.iter()) {
                if !u {
                    cost = cost.max(half_length(y));
                }
            }
            if *first || cost < *best {
                *best = cost;
                *first = false;
            }
            return;
        }
        go(i + 1, xs, ys, used, current.clone().max(half_length(&xs[i])), best, first);
        for j in 0..ys.len() {
            if !used[j] {
                used[j] = true;
                go(i + 1, xs, ys, used, current.clone().max(pair_cost(&xs[i], &ys[j])), best, first);
                used[j] = false;
            }
        }
    }
    go(0, &xs, &ys, &mut used, Extended::Finite(rat(0, 1)), &mut best, &mut first);
    best
}

// ---------- random instances ----------

/// A valid complex with `1..=max_gens` generators in degrees 0..=2.
pub fn random_complex<R: Rng>(rng: &mut R, field: FieldSpec, max_gens: usize) -> FilteredChainComplex {
    let n = rng.random_range(1..=max_gens);
    let mut builder = ComplexBuilder::new(field);
    let mut gens: Vec<(String, i64, Rational)> = Vec::new();
    let mut bnd: Vec<Vec<Scalar>> = Vec::new();
    for idx in 0..n {
        let degree = rng.random_range(0..=2i64);
        let filt = rat(rng.random_range(0..=4), 2);
        let id = format!("g{idx}");
        let faces: Vec<usize> = (0..gens.len())
            .filter(|&j| gens[j].1 == degree - 1 && gens[j].2 <= filt)
            .collect();
        let mut coeffs = vec![field.zero(); gens.len()];
        if degree == 1 {
            for &j in &faces {
                coeffs[j] = field.from_int(rng.random_range(-2..=2));
            }
        } else if degree == 2 && !faces.is_empty() {
            let rows: Vec<usize> = (0..gens.len()).filter(|&j| gens[j].1 == 0).collect();
            let cols: Vec<Vec<Scalar>> = faces
                .iter()
                .map(|&g| rows.iter().map(|&r| bnd[g][r].clone()).collect())
                .collect();
            for kv in kernel(&cols, rows.len(), field) {
                let c = field.from_int(rng.random_range(-1..=1));
                for (x, &g) in kv.iter().zip(&faces) {
                    coeffs[g] = coeffs[g].add(&x.mul(&c).unwrap()).unwrap();
                }
            }
        }
        let terms: Vec<(Scalar, String)> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(j, x)| (x.clone(), gens[j].0.clone()))
            .collect();
        builder = builder.generator(&id, degree, filt.clone());
        if !terms.is_empty() {
            builder = builder.boundary_scalars(&id, terms);
        }
        coeffs.resize(n, field.zero());
        for row in bnd.iter_mut() {
            row.resize(n, field.zero());
        }
        bnd.push(coeffs);
        gens.push((id, degree, filt));
    }
    builder.build().expect("generated complex is valid")
}

pub fn random_barcode<R: Rng>(rng: &mut R, max_bars: usize) -> Barcode {
    let n = rng.random_range(0..=max_bars);
    let bars = (0..n)
        .map(|_| {
            let degree = rng.random_range(0..=1);
            let birth = rat(rng.random_range(0..8), 2);
            let death = if rng.random_bool(0.15) {
                Extended::Infinite
            } else {
                Extended::Finite(&birth + rat(rng.random_range(1..6), 2))
            };
            Bar::new(degree, birth, death)
        })
        .collect();
    Barcode::new(FieldSpec::Rationals, bars).unwrap()
}

pub fn random_rational_unit<R: Rng>(rng: &mut R) -> Rational {
    let den = rng.random_range(1..=12);
    rat(rng.random_range(0..den), den)
}

/// `d ≤ 3`, at most `max_orbits` finite orbits of length in `(0, 1]`.
pub fn random_periodic<R: Rng>(rng: &mut R, max_orbits: usize) -> PeriodicBarcode {
    let d = rng.random_range(0..=3u32);
    let k = rng.random_range(0..=max_orbits);
    let orbits = (0..k)
        .map(|_| {
            let birth = random_rational_unit(rng) + rat(rng.random_range(-2..=2), 1);
            let den = rng.random_range(1..=12);
            let length = rat(rng.random_range(1..=den), den);
            FiniteOrbit {
                death: &birth + length,
                birth,
                degree: rng.random_range(-3..=6),
            }
        })
        .collect();
    let mut spectral: Vec<Rational> = (0..=d).map(|_| random_rational_unit(rng)).collect();
    spectral.sort();
    PeriodicBarcode::new(d, FieldSpec::Rationals, orbits, spectral).unwrap()
}

// ---------- equivariant complexes ----------

/// Cellular models with a `Z/p` action permuting cells, over `F_p`.
pub fn smith_models(p: u32) -> Vec<(String, FilteredChainComplex, CyclicAction)> {
    let field = FieldSpec::prime(p as u64).unwrap();
    let one = field.one();
    let z = rat(0, 1);
    let mut out = Vec::new();
    let cyc = |base: &str, i: u32| format!("{base}{}", i % p);
    let perm_of = |bases: &[&str]| -> Vec<(String, String, Scalar)> {
        bases
            .iter()
            .flat_map(|b| (0..p).map(|i| (cyc(b, i), cyc(b, i + 1), one.clone())).collect::<Vec<_>>())
            .collect()
    };

    // p free points.
    let mut b = ComplexBuilder::new(field);
    for i in 0..p {
        b = b.generator(&cyc("x", i), 0, z.clone());
    }
    let c = b.build().unwrap();
    let a = CyclicAction::new(&c, p, &perm_of(&["x"])).unwrap();
    out.push((format!("free orbit p={p}"), c, a));

    // A cone on a free orbit: fixed apex.
    let mut b = ComplexBuilder::new(field).generator("c", 0, z.clone());
    for i in 0..p {
        b = b
            .generator(&cyc("x", i), 0, z.clone())
            .generator(&cyc("e", i), 1, rat(1, 1))
            .boundary(&cyc("e", i), &[(1, &cyc("x", i)), (-1, "c")]);
    }
    let c = b.build().unwrap();
    let a = CyclicAction::new(&c, p, &perm_of(&["x", "e"])).unwrap();
    out.push((format!("cone p={p}"), c, a));

    // A circle rotated by 1/p.
    let mut b = ComplexBuilder::new(field);
    for i in 0..p {
        b = b.generator(&cyc("x", i), 0, z.clone());
    }
    for i in 0..p {
        b = b
            .generator(&cyc("e", i), 1, rat(1, 1))
            .boundary(&cyc("e", i), &[(1, &cyc("x", i + 1)), (-1, &cyc("x", i))]);
    }
    let c = b.build().unwrap();
    let a = CyclicAction::new(&c, p, &perm_of(&["x", "e"])).unwrap();
    out.push((format!("rotated circle p={p}"), c, a));

    // Suspension of a free orbit: fixed poles.
    let mut b = ComplexBuilder::new(field)
        .generator("N", 0, z.clone())
        .generator("S", 0, z.clone());
    for i in 0..p {
        b = b
            .generator(&cyc("x", i), 0, z.clone())
            .generator(&cyc("n", i), 1, rat(1, 1))
            .generator(&cyc("s", i), 1, rat(1, 1))
            .boundary(&cyc("n", i), &[(1, &cyc("x", i)), (-1, "N")])
            .boundary(&cyc("s", i), &[(1, "S"), (-1, &cyc("x", i))]);
    }
    let c = b.build().unwrap();
    let a = CyclicAction::new(&c, p, &perm_of(&["x", "n", "s"])).unwrap();
    out.push((format!("suspended orbit p={p}"), c, a));

    // The sphere with a rotation about the poles: p meridians, p lunes.
    let mut b = ComplexBuilder::new(field)
        .generator("N", 0, z.clone())
        .generator("S", 0, z.clone());
    for i in 0..p {
        b = b
            .generator(&cyc("m", i), 1, rat(1, 1))
            .boundary(&cyc("m", i), &[(1, "S"), (-1, "N")]);
    }
    for i in 0..p {
        b = b
            .generator(&cyc("D", i), 2, rat(2, 1))
            .boundary(&cyc("D", i), &[(1, &cyc("m", i)), (-1, &cyc("m", i + 1))]);
    }
    let c = b.build().unwrap();
    let a = CyclicAction::new(&c, p, &perm_of(&["m", "D"])).unwrap();
    out.push((format!("rotated sphere p={p}"), c.clone(), a));

    // The same sphere with the trivial action.
    let a = CyclicAction::trivial(&c, p).unwrap();
    out.push((format!("sphere, trivial action p={p}"), c, a));

    // A fixed circle beside a free orbit of points.
    let mut b = ComplexBuilder::new(field)
        .generator("v", 0, z.clone())
        .generator("l", 1, rat(1, 1));
    for i in 0..p {
        b = b.generator(&cyc("x", i), 0, rat(1, 2));
    }
    let c = b.build().unwrap();
    let a = CyclicAction::new(&c, p, &perm_of(&["x"])).unwrap();
    out.push((format!("fixed loop plus orbit p={p}"), c, a));
    out
}

// ---------- filtration edits ----------

/// Rebuilds `c` with generators listed in `order` and ids renamed.
pub fn relabel(c: &FilteredChainComplex, order: &[usize], filt: &dyn Fn(usize) -> Rational) -> FilteredChainComplex {
    let name = |i: usize| format!("h{}", order.iter().position(|&o| o == i).unwrap());
    let mut b = ComplexBuilder::new(c.field());
    for &i in order {
        let g = &c.generators()[i];
        b = b.generator(&name(i), g.degree, filt(i));
    }
    for &i in order {
        let col = c.boundary_of(i);
        if !col.is_empty() {
            let terms: Vec<(Scalar, String)> = col.iter().map(|(r, x)| (x.clone(), name(*r))).collect();
            b = b.boundary_scalars(&name(i), terms);
        }
    }
    b.build().unwrap()
}

/// Each value moves by at most `eps`, then is raised to dominate its faces.
pub fn perturb<R: Rng>(c: &FilteredChainComplex, eps: &Rational, r: &mut R) -> FilteredChainComplex {
    let mut filt: Vec<Rational> = c
        .generators()
        .iter()
        .map(|g| &g.filtration + eps * rat(r.random_range(-4..=4), 4))
        .collect();
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by_key(|&i| c.generators()[i].degree);
    for &i in &order {
        for (face, _) in c.boundary_of(i) {
            if filt[*face] > filt[i] {
                filt[i] = filt[*face].clone();
            }
        }
    }
    relabel(c, &(0..c.len()).collect::<Vec<_>>(), &|i| filt[i].clone())
}

