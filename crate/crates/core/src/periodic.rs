//! Z-periodic barcodes on CP^d.
//!
//! A periodic barcode is stored through one representative per Z-orbit: the
//! finite orbits with birth in `[0, 1)` and the spectral values `c_0..c_d`.
//! The generator of Z sends `[a, b)` in degree `k` to `[a+1, b+1)` in degree
//! `k + 2(d+1)`, and `c_{k+d+1} = c_k + 1`.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{format_rational, frac, is_prime, parse_rational, FieldSpec, Rational};
use crate::persistence::{window_dimension, Bar, Barcode, Extended, PersistenceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PeriodicError {
    #[error("finite orbit [{birth}, {death}) has non-positive length")]
    EmptyOrbit { birth: String, death: String },
    #[error("expected {expected} spectral values, found {found}")]
    SpectralCount { expected: usize, found: usize },
    #[error("spectral values must be nondecreasing within [c_0, c_0 + 1)")]
    SpectralOrder,
    #[error("N from local data is {local}, N from the barcode is {barcode}")]
    ConsistencyViolation { local: u64, barcode: u64 },
    #[error("endpoint classes mod 1 do not match the local action classes")]
    EndpointMismatch,
    #[error("d differs: {0} vs {1}")]
    DimensionMismatch(u32, u32),
    #[error("barcode is over {found}, expected F_{p}")]
    WrongField { p: u32, found: FieldSpec },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("window ({0}, {1}) is empty")]
    EmptyWindow(String, String),
    #[error("n must be at least 1")]
    ZeroPeriods,
    #[error("certificate is vacuous: the total bar length over Q is not positive")]
    VacuousCertificate,
    #[error(transparent)]
    Persistence(#[from] PersistenceError),
    #[error("periodic barcode json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteOrbit {
    pub birth: Rational,
    pub death: Rational,
    pub degree: i64,
}

impl FiniteOrbit {
    pub fn length(&self) -> Rational {
        &self.death - &self.birth
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicBarcode {
    d: u32,
    field: FieldSpec,
    finite_orbits: Vec<FiniteOrbit>,
    spectral: Vec<Rational>,
}

fn floor(q: &Rational) -> i64 {
    q.floor().to_integer().to_i64().expect("window within i64")
}

impl PeriodicBarcode {
    /// Finite orbits are moved to the representative with birth in `[0, 1)`.
    pub fn new(
        d: u32,
        field: FieldSpec,
        finite_orbits: Vec<FiniteOrbit>,
        spectral: Vec<Rational>,
    ) -> Result<Self, PeriodicError> {
        let period = 2 * (d as i64 + 1);
        let mut orbits = Vec::with_capacity(finite_orbits.len());
        for o in finite_orbits {
            if o.death <= o.birth {
                return Err(PeriodicError::EmptyOrbit {
                    birth: format_rational(&o.birth),
                    death: format_rational(&o.death),
                });
            }
            let shift = floor(&o.birth);
            let s = Rational::from_integer(shift.into());
            orbits.push(FiniteOrbit {
                birth: &o.birth - &s,
                death: &o.death - &s,
                degree: o.degree - shift * period,
            });
        }
        orbits.sort_by(|x, y| (&x.birth, &x.death, x.degree).cmp(&(&y.birth, &y.death, y.degree)));
        if spectral.len() != d as usize + 1 {
            return Err(PeriodicError::SpectralCount {
                expected: d as usize + 1,
                found: spectral.len(),
            });
        }
        let top = &spectral[0] + Rational::one();
        if spectral.windows(2).any(|w| w[0] > w[1]) || spectral[d as usize] >= top {
            return Err(PeriodicError::SpectralOrder);
        }
        Ok(PeriodicBarcode {
            d,
            field,
            finite_orbits: orbits,
            spectral,
        })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn finite_orbits(&self) -> &[FiniteOrbit] {
        &self.finite_orbits
    }

    pub fn spectral(&self) -> &[Rational] {
        &self.spectral
    }

    /// `c_k` for any integer `k`.
    pub fn spectral_value(&self, k: i64) -> Rational {
        let (q, r) = k.div_mod_floor(&(self.d as i64 + 1));
        &self.spectral[r as usize] + Rational::from_integer(q.into())
    }

    /// Degree shift of one Z-step.
    pub fn period_degree(&self) -> i64 {
        2 * (self.d as i64 + 1)
    }

    /// Every endpoint of the orbit representatives, with repetition.
    pub fn representative_endpoints(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.spectral.clone();
        for o in &self.finite_orbits {
            out.push(o.birth.clone());
            out.push(o.death.clone());
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = PeriodicDoc {
            d: self.d,
            field: self.field.to_string(),
            finite_orbits: self
                .finite_orbits
                .iter()
                .map(|o| OrbitDoc {
                    birth: format_rational(&o.birth),
                    death: format_rational(&o.death),
                    degree: o.degree,
                })
                .collect(),
            spectral: self.spectral.iter().map(format_rational).collect(),
        };
        serde_json::to_string(&doc).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Self, PeriodicError> {
        let doc: PeriodicDoc =
            serde_json::from_str(text).map_err(|e| PeriodicError::Json(e.to_string()))?;
        let field: FieldSpec = doc
            .field
            .parse()
            .map_err(|e: crate::field::FieldError| PeriodicError::Json(e.to_string()))?;
        let q = |s: &str| parse_rational(s).map_err(|_| PeriodicError::Json(format!("bad rational `{s}`")));
        let orbits = doc
            .finite_orbits
            .iter()
            .map(|o| {
                Ok(FiniteOrbit {
                    birth: q(&o.birth)?,
                    death: q(&o.death)?,
                    degree: o.degree,
                })
            })
            .collect::<Result<Vec<_>, PeriodicError>>()?;
        let spectral = doc.spectral.iter().map(|s| q(s)).collect::<Result<Vec<_>, _>>()?;
        PeriodicBarcode::new(doc.d, field, orbits, spectral)
    }
}

#[derive(Serialize, Deserialize)]
struct PeriodicDoc {
    d: u32,
    field: String,
    #[serde(default)]
    finite_orbits: Vec<OrbitDoc>,
    spectral: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct OrbitDoc {
    birth: String,
    death: String,
    degree: i64,
}

/// Translates meeting `[a, t]`. Infinite bars born before `a` are left out:
/// they contain both ends of every window inside `[a, t]`.
pub fn expand_window(pb: &PeriodicBarcode, a: &Rational, t: &Rational) -> Result<Barcode, PeriodicError> {
    if a >= t {
        return Err(PeriodicError::EmptyWindow(format_rational(a), format_rational(t)));
    }
    let period = pb.period_degree();
    let mut bars = Vec::new();
    for o in &pb.finite_orbits {
        // [b+j, e+j) meets [a, t] iff b + j ≤ t and e + j > a.
        let lo = floor(&(a - &o.death)) + 1;
        let hi = floor(&(t - &o.birth));
        for j in lo..=hi {
            let s = Rational::from_integer(j.into());
            bars.push(Bar::new(
                o.degree + j * period,
                &o.birth + &s,
                Extended::Finite(&o.death + &s),
            ));
        }
    }
    let m = pb.d as i64 + 1;
    let mut k = floor(&(a - &pb.spectral[m as usize - 1])) * m;
    loop {
        let c = pb.spectral_value(k);
        if &c > t {
            break;
        }
        if &c >= a {
            bars.push(Bar::new(2 * k, c, Extended::Infinite));
        }
        k += 1;
    }
    Ok(Barcode::new(pb.field, bars)?)
}

/// Bars of the expanded barcode containing exactly one of `a`, `t`.
pub fn periodic_window_dimension(
    pb: &PeriodicBarcode,
    a: &Rational,
    t: &Rational,
) -> Result<u64, PeriodicError> {
    let b = expand_window(pb, a, t)?;
    Ok(window_dimension(&b, a, t)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaStats {
    pub betas: Vec<Rational>,
    pub beta_max: Rational,
    pub beta_tot: Rational,
    pub k: usize,
}

pub fn beta_stats(pb: &PeriodicBarcode) -> BetaStats {
    let mut betas: Vec<Rational> = pb.finite_orbits.iter().map(FiniteOrbit::length).collect();
    betas.sort();
    let beta_max = betas.last().cloned().unwrap_or_else(Rational::zero);
    let beta_tot = betas.iter().fold(Rational::zero(), |acc, b| acc + b);
    BetaStats {
        k: betas.len(),
        betas,
        beta_max,
        beta_tot,
    }
}

/// `N = d + 1 + 2K`.
pub fn homological_count(pb: &PeriodicBarcode) -> u64 {
    pb.d as u64 + 1 + 2 * pb.finite_orbits.len() as u64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDatum {
    pub fixed_point_id: String,
    /// Action value mod 1, in `[0, 1)`.
    pub action_class: Rational,
    pub loc_dims: BTreeMap<i64, u64>,
}

impl LocalDatum {
    pub fn nondegenerate(id: &str, action_class: Rational, degree: i64) -> Self {
        LocalDatum {
            fixed_point_id: id.to_string(),
            action_class: frac(&action_class),
            loc_dims: BTreeMap::from([(degree, 1)]),
        }
    }

    pub fn total(&self) -> u64 {
        self.loc_dims.values().sum()
    }
}

/// `N` as a sum of local homology dimensions. When a barcode is supplied the
/// count and the endpoint classes mod 1 must agree with it.
pub fn assemble_n(
    pb: Option<&PeriodicBarcode>,
    data: &[LocalDatum],
) -> Result<u64, PeriodicError> {
    let local: u64 = data.iter().map(LocalDatum::total).sum();
    if let Some(pb) = pb {
        let barcode = homological_count(pb);
        if local != barcode {
            return Err(PeriodicError::ConsistencyViolation { local, barcode });
        }
        let mut from_bars: BTreeMap<Rational, u64> = BTreeMap::new();
        for e in pb.representative_endpoints() {
            *from_bars.entry(frac(&e)).or_default() += 1;
        }
        let mut from_data: BTreeMap<Rational, u64> = BTreeMap::new();
        for x in data {
            if x.total() > 0 {
                *from_data.entry(frac(&x.action_class)).or_default() += x.total();
            }
        }
        if from_bars != from_data {
            return Err(PeriodicError::EndpointMismatch);
        }
    }
    Ok(local)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetamaxReport {
    pub beta_max: Rational,
    pub bound_1: bool,
    /// `c_{d+k} − c_k` for `k = 0..=d`.
    pub refined_bounds: Vec<Rational>,
    pub holds: bool,
}

pub fn betamax_validate(pb: &PeriodicBarcode) -> BetamaxReport {
    let beta_max = beta_stats(pb).beta_max;
    let d = pb.d as i64;
    let refined_bounds: Vec<Rational> = (0..=d)
        .map(|k| pb.spectral_value(d + k) - pb.spectral_value(k))
        .collect();
    let bound_1 = beta_max <= Rational::one();
    let refined_ok = refined_bounds.iter().all(|b| &beta_max <= b);
    BetamaxReport {
        holds: bound_1 && refined_ok,
        beta_max,
        bound_1,
        refined_bounds,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaTotIntegral {
    /// `∫_0^1 dim G^{(a+s, a+s+n)} ds`.
    pub integral: Rational,
    /// `(integral − n(d+1)) / 2`.
    pub beta_tot: Rational,
}

/// Exact piecewise-constant integration of the window count over one period.
pub fn betatot_integral(pb: &PeriodicBarcode, a: &Rational, n: u32) -> Result<BetaTotIntegral, PeriodicError> {
    if n == 0 {
        return Err(PeriodicError::ZeroPeriods);
    }
    let nq = Rational::from_integer(n.into());
    let mut cuts: Vec<Rational> = pb
        .representative_endpoints()
        .iter()
        .map(|e| frac(&(e - a)))
        .collect();
    cuts.push(Rational::zero());
    cuts.push(Rational::one());
    cuts.sort();
    cuts.dedup();
    let two = Rational::from_integer(2.into());
    let mut integral = Rational::zero();
    for w in cuts.windows(2) {
        let mid = (&w[0] + &w[1]) / &two;
        let lo = a + &mid;
        let hi = &lo + &nq;
        let dim = periodic_window_dimension(pb, &lo, &hi)?;
        integral += (&w[1] - &w[0]) * Rational::from_integer(dim.into());
    }
    let base = &nq * Rational::from_integer((pb.d as u64 + 1).into());
    let beta_tot = (&integral - base) / two;
    Ok(BetaTotIntegral { integral, beta_tot })
}

/// Shift set of the Smith window inequality: `q/p` for `|q| ≤ (p−1)/2`, and
/// `{0, 1/2}` for `p = 2`.
pub fn smith_shifts(p: u32) -> Vec<Rational> {
    if p == 2 {
        return vec![Rational::zero(), Rational::new(1.into(), 2.into())];
    }
    let h = (p as i64 - 1) / 2;
    (-h..=h)
        .map(|q| Rational::new(q.into(), (p as i64).into()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithWindow {
    pub a: Rational,
    pub b: Rational,
    /// `dim G^{(pa, pb)}` of the iterate.
    pub lhs: u64,
    /// Sum of the shifted window dimensions of the base barcode.
    pub rhs: u64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithBarcodeReport {
    pub beta_tot: Rational,
    pub beta_tot_p: Rational,
    pub total_holds: bool,
    pub windows: Vec<SmithWindow>,
    pub holds: bool,
}

/// `β_tot(σ^p) ≥ p·β_tot(σ)` and the window inequalities, both over F_p.
pub fn smith_barcode_check(
    pb: &PeriodicBarcode,
    pb_p: &PeriodicBarcode,
    p: u32,
    windows: &[(Rational, Rational)],
) -> Result<SmithBarcodeReport, PeriodicError> {
    if !is_prime(p as u64) {
        return Err(PeriodicError::NotPrime(p as u64));
    }
    if pb.d != pb_p.d {
        return Err(PeriodicError::DimensionMismatch(pb.d, pb_p.d));
    }
    for x in [pb, pb_p] {
        if x.field != FieldSpec::Prime(p) {
            return Err(PeriodicError::WrongField { p, found: x.field });
        }
    }
    let pq = Rational::from_integer(p.into());
    let beta_tot = beta_stats(pb).beta_tot;
    let beta_tot_p = beta_stats(pb_p).beta_tot;
    let total_holds = beta_tot_p >= &pq * &beta_tot;
    let shifts = smith_shifts(p);
    let windows = windows
        .iter()
        .map(|(a, b)| {
            let lhs = periodic_window_dimension(pb_p, &(&pq * a), &(&pq * b))?;
            let rhs = shifts.iter().try_fold(0u64, |acc, s| {
                periodic_window_dimension(pb, &(a + s), &(b + s)).map(|v| acc + v)
            })?;
            Ok(SmithWindow {
                a: a.clone(),
                b: b.clone(),
                lhs,
                rhs,
                holds: lhs >= rhs,
            })
        })
        .collect::<Result<Vec<_>, PeriodicError>>()?;
    let holds = total_holds && windows.iter().all(|w| w.holds);
    Ok(SmithBarcodeReport {
        beta_tot,
        beta_tot_p,
        total_holds,
        windows,
        holds,
    })
}

/// Evenly spaced windows `(a, a + len)` for `a = offset + j/samples`, nudged so
/// no window end hits an endpoint of either barcode or its shifts.
pub fn smith_sample_windows(
    pb: &PeriodicBarcode,
    pb_p: &PeriodicBarcode,
    p: u32,
    samples: u32,
    len: &Rational,
) -> Vec<(Rational, Rational)> {
    let pq = Rational::from_integer(p.into());
    let shifts = smith_shifts(p);
    let base: Vec<Rational> = pb.representative_endpoints().iter().map(frac).collect();
    let iter: Vec<Rational> = pb_p.representative_endpoints().iter().map(frac).collect();
    let clean = |a: &Rational, b: &Rational| {
        let ends = [a, b];
        ends.iter().all(|x| {
            shifts
                .iter()
                .all(|s| !base.contains(&frac(&(*x + s))))
                && !iter.contains(&frac(&(&pq * *x)))
        })
    };
    let mut out = Vec::new();
    let denom = 7919i64 * samples.max(1) as i64;
    for j in 0..samples as i64 {
        let mut a = Rational::new((j * 7919 + 1).into(), denom.into());
        let mut nudge = 1i64;
        while !clean(&a, &(&a + len)) {
            a += Rational::new(1.into(), (denom * 1000 + nudge).into());
            nudge += 1;
        }
        out.push((a.clone(), &a + len));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeBound {
    pub p: u32,
    /// `p·β_tot(Q)`, a lower bound for the number of finite orbits of the iterate.
    pub k_lower: Rational,
    /// `d + 1 + 2·k_lower`.
    pub n_lower: Rational,
    /// `n_lower > n·B`.
    pub exceeds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HzCertificate {
    pub threshold: Rational,
    pub min_prime_a: Option<u32>,
    pub per_prime: Vec<PrimeBound>,
}

/// Smallest listed prime `p` for which the periodic-point count forced on the
/// `p`-th iterate exceeds what `n` fixed points of local dimension at most `B`
/// can account for.
pub fn hz_certificate(
    d: u32,
    betatot_q: &Rational,
    n_fixed: u64,
    loc_bound: &Rational,
    primes: &[u32],
) -> Result<HzCertificate, PeriodicError> {
    if !betatot_q.is_positive() {
        return Err(PeriodicError::VacuousCertificate);
    }
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let threshold = Rational::from_integer(n_fixed.into()) * loc_bound;
    let base = Rational::from_integer((d as u64 + 1).into());
    let two = Rational::from_integer(2.into());
    let per_prime = sorted
        .iter()
        .map(|&p| {
            if !is_prime(p as u64) {
                return Err(PeriodicError::NotPrime(p as u64));
            }
            let k_lower = Rational::from_integer(p.into()) * betatot_q;
            let n_lower = &base + &two * &k_lower;
            Ok(PrimeBound {
                p,
                exceeds: n_lower > threshold,
                k_lower,
                n_lower,
            })
        })
        .collect::<Result<Vec<_>, PeriodicError>>()?;
    let min_prime_a = per_prime.iter().find(|b| b.exceeds).map(|b| b.p);
    Ok(HzCertificate {
        threshold,
        min_prime_a,
        per_prime,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldComparison {
    pub same_betas: bool,
    pub same_spectral: bool,
    pub beta_tot_difference: Rational,
}

/// Compares the statistics of one barcode computed over two fields.
pub fn compare_fields(x: &PeriodicBarcode, y: &PeriodicBarcode) -> Result<FieldComparison, PeriodicError> {
    if x.d != y.d {
        return Err(PeriodicError::DimensionMismatch(x.d, y.d));
    }
    let (sx, sy) = (beta_stats(x), beta_stats(y));
    Ok(FieldComparison {
        same_betas: sx.betas == sy.betas,
        same_spectral: x.spectral == y.spectral,
        beta_tot_difference: sx.beta_tot - sy.beta_tot,
    })
}
