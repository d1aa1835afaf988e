//! Barcodes of filtered complexes by column reduction, window dimensions and
//! the bottleneck distance.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::FilteredChainComplex;
use crate::field::{format_rational, parse_rational, FieldSpec, Rational, Scalar};

/// A rational or `+∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Extended {
    Finite(Rational),
    Infinite,
}

impl Extended {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Extended::Finite(q) => Some(q),
            Extended::Infinite => None,
        }
    }

    pub fn parse(s: &str) -> Option<Extended> {
        match s.trim() {
            "inf" | "+inf" | "∞" => Some(Extended::Infinite),
            other => parse_rational(other).ok().map(Extended::Finite),
        }
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
            (Extended::Finite(_), Extended::Infinite) => Ordering::Less,
            (Extended::Infinite, Extended::Finite(_)) => Ordering::Greater,
            (Extended::Infinite, Extended::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(q) => f.write_str(&format_rational(q)),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

impl From<Rational> for Extended {
    fn from(q: Rational) -> Self {
        Extended::Finite(q)
    }
}

/// The half-open interval `[birth, death)` in a fixed degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bar {
    pub degree: i64,
    pub birth: Rational,
    pub death: Extended,
    pub multiplicity: u32,
}

impl Bar {
    pub fn new(degree: i64, birth: Rational, death: Extended) -> Self {
        Bar {
            degree,
            birth,
            death,
            multiplicity: 1,
        }
    }

    pub fn contains(&self, t: &Rational) -> bool {
        &self.birth <= t
            && match &self.death {
                Extended::Finite(d) => t < d,
                Extended::Infinite => true,
            }
    }

    pub fn length(&self) -> Extended {
        match &self.death {
            Extended::Finite(d) => Extended::Finite(d - &self.birth),
            Extended::Infinite => Extended::Infinite,
        }
    }

    fn key(&self) -> (i64, &Rational, &Extended) {
        (self.degree, &self.birth, &self.death)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PersistenceError {
    #[error("window endpoint {0} is a bar endpoint")]
    EndpointCollision(String),
    #[error("window ({0}, {1}) is empty")]
    EmptyWindow(String, String),
    #[error("bar [{birth}, {death}) in degree {degree} is empty")]
    EmptyBar {
        degree: i64,
        birth: String,
        death: String,
    },
    #[error("barcode json: {0}")]
    Json(String),
}

/// A finite multiset of bars in canonical `(degree, birth, death)` order with
/// equal bars merged into multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Barcode {
    field: FieldSpec,
    bars: Vec<Bar>,
}

impl Barcode {
    pub fn new(field: FieldSpec, bars: Vec<Bar>) -> Result<Self, PersistenceError> {
        for b in &bars {
            if Extended::Finite(b.birth.clone()) >= b.death {
                return Err(PersistenceError::EmptyBar {
                    degree: b.degree,
                    birth: format_rational(&b.birth),
                    death: b.death.to_string(),
                });
            }
        }
        Ok(Barcode::normalized(field, bars))
    }

    fn normalized(field: FieldSpec, mut bars: Vec<Bar>) -> Self {
        bars.retain(|b| b.multiplicity > 0);
        bars.sort_by(|x, y| x.key().cmp(&y.key()));
        let mut merged: Vec<Bar> = Vec::with_capacity(bars.len());
        for b in bars {
            match merged.last_mut() {
                Some(last) if last.key() == b.key() => last.multiplicity += b.multiplicity,
                _ => merged.push(b),
            }
        }
        Barcode {
            field,
            bars: merged,
        }
    }

    pub fn empty(field: FieldSpec) -> Self {
        Barcode {
            field,
            bars: Vec::new(),
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    /// Number of bars counted with multiplicity.
    pub fn total(&self) -> usize {
        self.bars.iter().map(|b| b.multiplicity as usize).sum()
    }

    pub fn degrees(&self) -> Vec<i64> {
        let mut ds: Vec<i64> = self.bars.iter().map(|b| b.degree).collect();
        ds.dedup();
        ds
    }

    pub fn in_degree(&self, k: i64) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(move |b| b.degree == k)
    }

    /// Bars expanded one per unit of multiplicity.
    pub fn expanded(&self) -> Vec<Bar> {
        self.bars
            .iter()
            .flat_map(|b| {
                std::iter::repeat_n(
                    Bar {
                        multiplicity: 1,
                        ..b.clone()
                    },
                    b.multiplicity as usize,
                )
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let doc = BarcodeDoc {
            field: self.field.to_string(),
            bars: self
                .bars
                .iter()
                .map(|b| BarDoc {
                    degree: b.degree,
                    birth: format_rational(&b.birth),
                    death: b.death.to_string(),
                    mult: b.multiplicity,
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Self, PersistenceError> {
        let doc: BarcodeDoc =
            serde_json::from_str(text).map_err(|e| PersistenceError::Json(e.to_string()))?;
        let field: FieldSpec = doc
            .field
            .parse()
            .map_err(|e: crate::field::FieldError| PersistenceError::Json(e.to_string()))?;
        let bars = doc
            .bars
            .into_iter()
            .map(|b| {
                let birth = parse_rational(&b.birth)
                    .map_err(|_| PersistenceError::Json(format!("bad birth `{}`", b.birth)))?;
                let death = Extended::parse(&b.death)
                    .ok_or_else(|| PersistenceError::Json(format!("bad death `{}`", b.death)))?;
                Ok(Bar {
                    degree: b.degree,
                    birth,
                    death,
                    multiplicity: b.mult,
                })
            })
            .collect::<Result<Vec<_>, PersistenceError>>()?;
        Barcode::new(field, bars)
    }
}

impl fmt::Display for Barcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.bars.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "deg{} [{},{})", b.degree, format_rational(&b.birth), b.death)?;
            if b.multiplicity > 1 {
                write!(f, "x{}", b.multiplicity)?;
            }
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct BarcodeDoc {
    field: String,
    bars: Vec<BarDoc>,
}

#[derive(Serialize, Deserialize)]
struct BarDoc {
    degree: i64,
    birth: String,
    death: String,
    #[serde(default = "one")]
    mult: u32,
}

fn one() -> u32 {
    1
}

/// Sparse column over positions in the filtration order, sorted ascending.
type Column = Vec<(usize, Scalar)>;

/// `a - factor·b` on sparse columns.
fn axpy(a: &Column, factor: &Scalar, b: &Column) -> Column {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, factor.mul(&b[j].1).expect("same field").neg()));
            j += 1;
        } else {
            let v = a[i]
                .1
                .sub(&factor.mul(&b[j].1).expect("same field"))
                .expect("same field");
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Barcode of `t ↦ H_*({filtration ≤ t})`. Generators are processed in
/// `(filtration, degree, input index)` order.
pub fn compute_barcode(c: &FilteredChainComplex) -> Barcode {
    let gens = c.generators();
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&x, &y| {
        (&gens[x].filtration, gens[x].degree, x).cmp(&(&gens[y].filtration, gens[y].degree, y))
    });
    let mut pos = vec![0; c.len()];
    for (p, &g) in order.iter().enumerate() {
        pos[g] = p;
    }

    let mut columns: Vec<Column> = order
        .iter()
        .map(|&g| {
            let mut col: Column = c
                .boundary_of(g)
                .iter()
                .map(|(r, v)| (pos[*r], v.clone()))
                .collect();
            col.sort_by_key(|(p, _)| *p);
            col
        })
        .collect();

    let mut pivot_of: HashMap<usize, usize> = HashMap::new();
    for j in 0..columns.len() {
        while let Some((low, coef)) = columns[j].last().cloned() {
            match pivot_of.get(&low) {
                Some(&k) => {
                    let lead = &columns[k].last().expect("pivot column").1;
                    let factor = coef.div(lead).expect("nonzero pivot");
                    columns[j] = axpy(&columns[j], &factor, &columns[k]);
                }
                None => {
                    pivot_of.insert(low, j);
                    break;
                }
            }
        }
    }

    let mut bars = Vec::new();
    let mut killed = vec![false; columns.len()];
    for (&low, &j) in &pivot_of {
        killed[low] = true;
        let birth = &gens[order[low]].filtration;
        let death = &gens[order[j]].filtration;
        if birth < death {
            bars.push(Bar::new(
                gens[order[low]].degree,
                birth.clone(),
                Extended::Finite(death.clone()),
            ));
        }
    }
    for p in 0..columns.len() {
        if columns[p].is_empty() && !killed[p] {
            let g = &gens[order[p]];
            bars.push(Bar::new(g.degree, g.filtration.clone(), Extended::Infinite));
        }
    }
    Barcode::normalized(c.field(), bars)
}

/// Bars (with multiplicity) containing exactly one of `a`, `t`.
pub fn window_dimension(b: &Barcode, a: &Rational, t: &Rational) -> Result<u64, PersistenceError> {
    if a >= t {
        return Err(PersistenceError::EmptyWindow(
            format_rational(a),
            format_rational(t),
        ));
    }
    let mut count = 0u64;
    for bar in b.bars() {
        for x in [a, t] {
            if &bar.birth == x || bar.death.finite() == Some(x) {
                return Err(PersistenceError::EndpointCollision(format_rational(x)));
            }
        }
        if bar.contains(a) != bar.contains(t) {
            count += bar.multiplicity as u64;
        }
    }
    Ok(count)
}

/// `ℓ∞` cost of matching two bars; `None` when exactly one is infinite.
fn match_cost(x: &Bar, y: &Bar) -> Option<Rational> {
    let db = (&x.birth - &y.birth).abs();
    match (&x.death, &y.death) {
        (Extended::Finite(a), Extended::Finite(b)) => Some(db.max((a - b).abs())),
        (Extended::Infinite, Extended::Infinite) => Some(db),
        _ => None,
    }
}

/// Cost of leaving a bar unmatched: half its length.
fn diagonal_cost(x: &Bar) -> Option<Rational> {
    x.death
        .finite()
        .map(|d| (d - &x.birth) / Rational::from_integer(2.into()))
}

/// Perfect matching on the doubled graph where each bar can pair with a bar
/// of the other side or its own diagonal copy.
fn feasible(xs: &[Bar], ys: &[Bar], delta: &Rational) -> bool {
    let (n, m) = (xs.len(), ys.len());
    let size = n + m;
    // Left: xs then diagonal copies of ys. Right: ys then diagonal copies of xs.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); size];
    let within = |c: Option<Rational>| c.is_some_and(|c| &c <= delta);
    for i in 0..n {
        for (j, y) in ys.iter().enumerate() {
            if within(match_cost(&xs[i], y)) {
                adj[i].push(j);
            }
        }
        if within(diagonal_cost(&xs[i])) {
            adj[i].push(m + i);
        }
    }
    for j in 0..m {
        if within(diagonal_cost(&ys[j])) {
            adj[n + j].push(j);
        }
        for i in 0..n {
            adj[n + j].push(m + i);
        }
    }
    maximum_matching(&adj, size) == size
}

/// Kuhn's augmenting-path bipartite matching.
fn maximum_matching(adj: &[Vec<usize>], right: usize) -> usize {
    fn augment(
        u: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v].is_none_or(|w| augment(w, adj, seen, owner)) {
                owner[v] = Some(u);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; right];
    let mut size = 0;
    for u in 0..adj.len() {
        let mut seen = vec![false; right];
        if augment(u, adj, &mut seen, &mut owner) {
            size += 1;
        }
    }
    size
}

fn bottleneck_single_degree(xs: &[Bar], ys: &[Bar]) -> Extended {
    let inf_x = xs.iter().filter(|b| b.death.is_infinite()).count();
    let inf_y = ys.iter().filter(|b| b.death.is_infinite()).count();
    if inf_x != inf_y {
        return Extended::Infinite;
    }
    let mut candidates: Vec<Rational> = vec![Rational::zero()];
    for x in xs {
        candidates.extend(diagonal_cost(x));
        for y in ys {
            candidates.extend(match_cost(x, y));
        }
    }
    candidates.extend(ys.iter().filter_map(diagonal_cost));
    candidates.sort();
    candidates.dedup();
    // The largest candidate is always feasible once infinite counts agree.
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(xs, ys, &candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Extended::Finite(candidates[lo].clone())
}

/// Bottleneck distance, degrees matched independently.
pub fn bottleneck_distance(b1: &Barcode, b2: &Barcode) -> Extended {
    let mut by_degree: BTreeMap<i64, (Vec<Bar>, Vec<Bar>)> = BTreeMap::new();
    for b in b1.expanded() {
        by_degree.entry(b.degree).or_default().0.push(b);
    }
    for b in b2.expanded() {
        by_degree.entry(b.degree).or_default().1.push(b);
    }
    by_degree
        .values()
        .map(|(xs, ys)| bottleneck_single_degree(xs, ys))
        .max()
        .unwrap_or(Extended::Finite(Rational::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::parse_complex;
    use crate::field::rat;

    fn fin(n: i64, d: i64) -> Extended {
        Extended::Finite(rat(n, d))
    }

    fn bar(degree: i64, birth: i64, death: Option<i64>) -> Bar {
        Bar::new(
            degree,
            rat(birth, 1),
            death.map_or(Extended::Infinite, |d| fin(d, 1)),
        )
    }

    #[test]
    fn single_generator() {
        let c = parse_complex("gen x 0 0").unwrap();
        let b = compute_barcode(&c);
        assert_eq!(b.bars(), &[bar(0, 0, None)]);
    }

    #[test]
    fn torsion_complex_over_q_and_f2() {
        let text = "gen x 0 0\ngen y 1 1\ngen z 2 2\nbnd z 2 y\n";
        let q = compute_barcode(&parse_complex(text).unwrap());
        assert_eq!(q.bars(), &[bar(0, 0, None), bar(1, 1, Some(2))]);
        let f2 = compute_barcode(&parse_complex(&format!("field f2\n{text}")).unwrap());
        assert_eq!(
            f2.bars(),
            &[bar(0, 0, None), bar(1, 1, None), bar(2, 2, None)]
        );
    }

    #[test]
    fn two_points_joined_by_an_edge() {
        let c = parse_complex("gen a 0 0\ngen b 0 0\ngen e 1 1\nbnd e 1 b -1 a\n").unwrap();
        let b = compute_barcode(&c);
        assert_eq!(b.bars(), &[bar(0, 0, Some(1)), bar(0, 0, None)]);
    }

    #[test]
    fn zero_length_pairs_are_dropped() {
        let c = parse_complex("gen a 0 0\ngen b 0 1\ngen e 1 1\nbnd e 1 b -1 a\n").unwrap();
        assert_eq!(compute_barcode(&c).bars(), &[bar(0, 0, None)]);
    }

    #[test]
    fn window_examples() {
        let b = Barcode::new(
            FieldSpec::Rationals,
            vec![bar(0, 0, Some(1)), bar(0, 2, None)],
        )
        .unwrap();
        assert_eq!(window_dimension(&b, &rat(1, 2), &rat(3, 2)).unwrap(), 1);
        assert_eq!(window_dimension(&b, &rat(-1, 1), &rat(3, 1)).unwrap(), 1);
        assert_eq!(
            window_dimension(&Barcode::empty(FieldSpec::Rationals), &rat(0, 1), &rat(1, 1))
                .unwrap(),
            0
        );
        assert!(matches!(
            window_dimension(&b, &rat(1, 1), &rat(3, 1)),
            Err(PersistenceError::EndpointCollision(_))
        ));
        assert!(matches!(
            window_dimension(&b, &rat(3, 1), &rat(1, 2)),
            Err(PersistenceError::EmptyWindow(..))
        ));
    }

    #[test]
    fn bottleneck_examples() {
        let q = FieldSpec::Rationals;
        let b = Barcode::new(q, vec![bar(0, 0, Some(2))]).unwrap();
        let shifted = Barcode::new(q, vec![bar(0, 1, Some(3))]).unwrap();
        assert_eq!(bottleneck_distance(&b, &b), fin(0, 1));
        assert_eq!(bottleneck_distance(&b, &Barcode::empty(q)), fin(1, 1));
        assert_eq!(bottleneck_distance(&b, &shifted), fin(1, 1));

        let inf = Barcode::new(q, vec![bar(0, 0, None)]).unwrap();
        assert_eq!(bottleneck_distance(&inf, &Barcode::empty(q)), Extended::Infinite);
        let inf1 = Barcode::new(q, vec![bar(1, 0, None)]).unwrap();
        assert_eq!(bottleneck_distance(&inf, &inf1), Extended::Infinite);
        let inf_late = Barcode::new(q, vec![bar(0, 3, None)]).unwrap();
        assert_eq!(bottleneck_distance(&inf, &inf_late), fin(3, 1));
    }

    #[test]
    fn json_round_trip() {
        let b = Barcode::new(
            FieldSpec::Rationals,
            vec![
                Bar::new(0, rat(0, 1), fin(1, 1)),
                Bar::new(0, rat(0, 1), Extended::Infinite),
                Bar::new(1, rat(1, 3), fin(5, 2)),
            ],
        )
        .unwrap();
        let text = b.to_json();
        assert!(text.starts_with(r#"{"field":"q","bars":[{"degree":0,"birth":"0","death":"1","mult":1}"#));
        assert_eq!(Barcode::from_json(&text).unwrap(), b);
        let spec = r#"{"field":"q","bars":[{"degree":0,"birth":"0","death":"1","mult":1},{"degree":0,"birth":"0","death":"inf","mult":1}]}"#;
        assert_eq!(Barcode::from_json(spec).unwrap().total(), 2);
        assert!(Barcode::from_json(r#"{"field":"q","bars":[{"degree":0,"birth":"1","death":"1"}]}"#).is_err());
    }

    #[test]
    fn multiplicities_merge() {
        let b = Barcode::new(
            FieldSpec::Prime(2),
            vec![bar(0, 0, Some(1)), bar(0, 0, Some(1))],
        )
        .unwrap();
        assert_eq!(b.bars().len(), 1);
        assert_eq!(b.bars()[0].multiplicity, 2);
        assert_eq!(b.total(), 2);
    }
}
