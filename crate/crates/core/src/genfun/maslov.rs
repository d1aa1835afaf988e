use super::forms::{assemble_f, build_sigma_mt};
use super::hermitian::{index_signature, Signature};
use super::tuple::GFTuple;
use super::GenfunError;

/// Index data of `T_{m,t} = F_{(ε, δ^{(m)}_t)}` against `T_{m,0}`, real counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaslovReport {
    pub at_t: Signature,
    pub at_zero: Signature,
    /// `2(d+1)⌊t⌋`.
    pub expected: i64,
    /// `(ind + null)(t) − (ind + null)(0)`: the sublevel set `{T ≤ 0}` count.
    pub kappa_difference: i64,
    /// `ind T_{m,t} − ind T_{m,0}` with strict negativity.
    pub strict_difference: i64,
    pub nullity_ok: bool,
    pub holds: bool,
}

pub fn maslov_index_check(d: usize, m: usize, t: f64, n0: usize, tol: f64) -> Result<MaslovReport, GenfunError> {
    if t.fract() == 0.0 {
        return Err(GenfunError::IntegerTime(t));
    }
    let eps = GFTuple::identity(d, 1);
    let sig = |s: f64| -> Result<Signature, GenfunError> {
        Ok(index_signature(&assemble_f(&build_sigma_mt(&eps, m, s, n0)?)?, tol)?.real())
    };
    let at_t = sig(t)?;
    let at_zero = sig(0.0)?;
    let expected = 2 * (d as i64 + 1) * t.floor() as i64;
    let kappa = |s: &Signature| (s.minus + s.zero) as i64;
    let kappa_difference = kappa(&at_t) - kappa(&at_zero);
    let strict_difference = at_t.minus as i64 - at_zero.minus as i64;
    let nullity_ok = at_zero.zero == 2 * (d + 1) && at_t.zero == 0;
    Ok(MaslovReport {
        holds: nullity_ok && kappa_difference == expected,
        at_t,
        at_zero,
        expected,
        kappa_difference,
        strict_difference,
        nullity_ok,
    })
}
