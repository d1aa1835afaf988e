//! Projective-join algebra on the cohomology of `CP^m × CP^n` and the
//! homology basis `[CP^0], …, [CP^N]`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PjoinError {
    #[error("k must be at least 1")]
    ZeroPower,
    #[error("length must be at least 1")]
    ZeroLength,
    #[error("[CP^{index}] does not live in CP^{ambient}")]
    OutOfAmbient { index: u32, ambient: u32 },
    #[error("[CP^{index}] exceeds the join ambient CP^{ambient}")]
    AmbientOverflow { index: u32, ambient: u32 },
    #[error("truncation degrees must be at least k = {k}")]
    TruncationTooSmall { k: u32 },
}

/// An element of `Z[u1, u2]/(u1^{m+1}, u2^{n+1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedPoly {
    m: u32,
    n: u32,
    coeffs: BTreeMap<(u32, u32), i64>,
}

impl TruncatedPoly {
    pub fn zero(m: u32, n: u32) -> Self {
        TruncatedPoly {
            m,
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(m: u32, n: u32, c: i64) -> Self {
        Self::monomial(m, n, 0, 0, c)
    }

    /// `c · u1^i u2^j`, zero outside the box.
    pub fn monomial(m: u32, n: u32, i: u32, j: u32, c: i64) -> Self {
        let mut p = Self::zero(m, n);
        p.add_term(i, j, c);
        p
    }

    pub fn u1(m: u32, n: u32) -> Self {
        Self::monomial(m, n, 1, 0, 1)
    }

    pub fn u2(m: u32, n: u32) -> Self {
        Self::monomial(m, n, 0, 1, 1)
    }

    /// Builds from arbitrary terms, dropping those outside the box.
    pub fn from_terms(m: u32, n: u32, terms: &[((u32, u32), i64)]) -> Self {
        let mut p = Self::zero(m, n);
        for &((i, j), c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    fn add_term(&mut self, i: u32, j: u32, c: i64) {
        if i > self.m || j > self.n || c == 0 {
            return;
        }
        let e = self.coeffs.entry((i, j)).or_insert(0);
        *e += c;
        if *e == 0 {
            self.coeffs.remove(&(i, j));
        }
    }

    pub fn truncation(&self) -> (u32, u32) {
        (self.m, self.n)
    }

    pub fn coefficient(&self, i: u32, j: u32) -> i64 {
        self.coeffs.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), i64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Re-truncates into a smaller box.
    pub fn truncate(&self, m: u32, n: u32) -> Self {
        let mut p = Self::zero(m, n);
        for ((i, j), c) in self.terms() {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn scale(&self, c: i64) -> Self {
        let mut p = Self::zero(self.m, self.n);
        for ((i, j), x) in self.terms() {
            p.add_term(i, j, c * x);
        }
        p
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(self.m, self.n, 1);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    fn check(&self, other: &Self) {
        assert_eq!(
            (self.m, self.n),
            (other.m, other.n),
            "truncated polynomials from different rings"
        );
    }
}

impl Add for &TruncatedPoly {
    type Output = TruncatedPoly;
    fn add(self, rhs: &TruncatedPoly) -> TruncatedPoly {
        self.check(rhs);
        let mut p = self.clone();
        for ((i, j), c) in rhs.terms() {
            p.add_term(i, j, c);
        }
        p
    }
}

impl Sub for &TruncatedPoly {
    type Output = TruncatedPoly;
    fn sub(self, rhs: &TruncatedPoly) -> TruncatedPoly {
        self + &rhs.scale(-1)
    }
}

impl Neg for &TruncatedPoly {
    type Output = TruncatedPoly;
    fn neg(self) -> TruncatedPoly {
        self.scale(-1)
    }
}

impl Mul for &TruncatedPoly {
    type Output = TruncatedPoly;
    fn mul(self, rhs: &TruncatedPoly) -> TruncatedPoly {
        self.check(rhs);
        let mut p = TruncatedPoly::zero(self.m, self.n);
        for ((i, j), a) in self.terms() {
            for ((k, l), b) in rhs.terms() {
                p.add_term(i + k, j + l, a * b);
            }
        }
        p
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, var: &str, e: u32) -> fmt::Result {
    match e {
        0 => Ok(()),
        1 => write!(f, "{var}"),
        _ => write!(f, "{var}^{e}"),
    }
}

/// Terms by descending total degree, then descending power of `u1`:
/// `u1^2 + u1u2 + u2^2`.
impl fmt::Display for TruncatedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by_key(|&((i, j), _)| std::cmp::Reverse((i + j, i)));
        for (idx, ((i, j), c)) in terms.into_iter().enumerate() {
            let mag = c.unsigned_abs();
            match (idx, c < 0) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if mag != 1 || (i == 0 && j == 0) {
                write!(f, "{mag}")?;
            }
            write_monomial(f, "u1", i)?;
            write_monomial(f, "u2", j)?;
        }
        Ok(())
    }
}

/// An integral homology class `Σ c_i [CP^i]` in `CP^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjClass {
    ambient: u32,
    coeffs: BTreeMap<u32, i64>,
}

impl ProjClass {
    pub fn zero(ambient: u32) -> Self {
        ProjClass {
            ambient,
            coeffs: BTreeMap::new(),
        }
    }

    /// `[CP^i]` in `CP^ambient`.
    pub fn basis(ambient: u32, i: u32) -> Result<Self, PjoinError> {
        Self::from_terms(ambient, &[(i, 1)])
    }

    pub fn from_terms(ambient: u32, terms: &[(u32, i64)]) -> Result<Self, PjoinError> {
        let mut c = Self::zero(ambient);
        for &(i, x) in terms {
            if i > ambient {
                return Err(PjoinError::OutOfAmbient { index: i, ambient });
            }
            c.add_term(i, x);
        }
        Ok(c)
    }

    fn add_term(&mut self, i: u32, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.coeffs.entry(i).or_insert(0);
        *e += c;
        if *e == 0 {
            self.coeffs.remove(&i);
        }
    }

    pub fn ambient(&self) -> u32 {
        self.ambient
    }

    pub fn coefficient(&self, i: u32) -> i64 {
        self.coeffs.get(&i).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, i64)> + '_ {
        self.coeffs.iter().map(|(&i, &c)| (i, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Homological degrees present, `2i` for each `[CP^i]`.
    pub fn degrees(&self) -> Vec<u32> {
        self.coeffs.keys().map(|i| 2 * i).collect()
    }
}

impl fmt::Display for ProjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (i, c)) in self.terms().enumerate() {
            let mag = c.unsigned_abs();
            match (idx, c < 0) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if mag != 1 {
                write!(f, "{mag}")?;
            }
            write!(f, "[CP^{i}]")?;
        }
        Ok(())
    }
}

/// `pj^* u^k = Σ_{i+j=k−1} u1^i u2^j` in `H^*(CP^m × CP^n)`.
pub fn pj_pullback(k: u32, m: u32, n: u32) -> Result<TruncatedPoly, PjoinError> {
    if k == 0 {
        return Err(PjoinError::ZeroPower);
    }
    let terms: Vec<_> = (0..k).map(|i| ((i, k - 1 - i), 1)).collect();
    Ok(TruncatedPoly::from_terms(m, n, &terms))
}

/// Bilinear extension of `[CP^i] × [CP^j] ↦ [CP^{i+j+1}]` into `CP^{m+n+1}`.
pub fn pj_pushforward(a: &ProjClass, b: &ProjClass) -> Result<ProjClass, PjoinError> {
    let ambient = a.ambient + b.ambient + 1;
    let mut out = ProjClass::zero(ambient);
    for (i, x) in a.terms() {
        for (j, y) in b.terms() {
            let index = i + j + 1;
            if index > ambient {
                return Err(PjoinError::AmbientOverflow { index, ambient });
            }
            out.add_term(index, x * y);
        }
    }
    Ok(out)
}

/// Both bracketings of the join of `[CP^i] ⊂ CP^l`, `[CP^j] ⊂ CP^m`, `[CP^k] ⊂ CP^n`.
pub fn associate(
    (i, j, k): (u32, u32, u32),
    (l, m, n): (u32, u32, u32),
) -> Result<(ProjClass, ProjClass), PjoinError> {
    let a = ProjClass::basis(l, i)?;
    let b = ProjClass::basis(m, j)?;
    let c = ProjClass::basis(n, k)?;
    let left = pj_pushforward(&pj_pushforward(&a, &b)?, &c)?;
    let right = pj_pushforward(&a, &pj_pushforward(&b, &c)?)?;
    Ok((left, right))
}

pub fn associativity_check(indices: (u32, u32, u32), ambients: (u32, u32, u32)) -> Result<bool, PjoinError> {
    let (left, right) = associate(indices, ambients)?;
    Ok(left == right)
}

/// Triples `i, j, k ≤ max` in ambients `CP^max`, with the failures listed.
pub fn associativity_sweep(max: u32) -> Result<Vec<(u32, u32, u32)>, PjoinError> {
    let mut failures = Vec::new();
    for i in 0..=max {
        for j in 0..=max {
            for k in 0..=max {
                if !associativity_check((i, j, k), (max, max, max))? {
                    failures.push((i, j, k));
                }
            }
        }
    }
    Ok(failures)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinLength {
    pub length: u32,
    /// Image of `[CP^{lA−1}] × [CP^{lB−1}]`.
    pub witness: ProjClass,
    pub verified: bool,
}

/// Homological length of `A * B` from those of `A` and `B`.
pub fn homological_length_join(la: u32, lb: u32) -> Result<JoinLength, PjoinError> {
    if la == 0 || lb == 0 {
        return Err(PjoinError::ZeroLength);
    }
    let a = ProjClass::basis(la - 1, la - 1)?;
    let b = ProjClass::basis(lb - 1, lb - 1)?;
    let witness = pj_pushforward(&a, &b)?;
    let expected = ProjClass::basis(la + lb - 1, la + lb - 1)?;
    Ok(JoinLength {
        length: la + lb,
        verified: witness == expected,
        witness,
    })
}

fn binomial(k: u32, i: u32) -> i64 {
    (0..i).fold(1i64, |acc, r| acc * (k - r) as i64 / (r + 1) as i64)
}

/// `Σ_{i+j=k, i≥1} C(k,i)(u1−u2)^{i−1} u2^j` against `Σ_{i+j=k−1} u1^i u2^j`.
pub fn binomial_identity_check(k: u32, m: u32, n: u32) -> Result<bool, PjoinError> {
    if k == 0 {
        return Err(PjoinError::ZeroPower);
    }
    if m < k || n < k {
        return Err(PjoinError::TruncationTooSmall { k });
    }
    let diff = &TruncatedPoly::u1(m, n) - &TruncatedPoly::u2(m, n);
    let u2 = TruncatedPoly::u2(m, n);
    let mut lhs = TruncatedPoly::zero(m, n);
    for i in 1..=k {
        let term = (&diff.pow(i - 1) * &u2.pow(k - i)).scale(binomial(k, i));
        lhs = &lhs + &term;
    }
    Ok(lhs == pj_pullback(k, m, n)?)
}

/// `⟨u^k, c⟩`: the coefficient of `[CP^k]`.
pub fn evaluate_power(k: u32, c: &ProjClass) -> i64 {
    c.coefficient(k)
}
