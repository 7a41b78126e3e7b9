use std::collections::{HashMap, HashSet};

use crate::arith;
use crate::digitmap::{exponent, DigitVector};
use crate::error::{Error, FailureKind, Result};
use crate::ffield::{dlog_raw, FieldCtx};
use crate::schur::ModuleSpec;

/// A primitive `ω` whose model spectrum matches the observed one, and the
/// bijection it induces: `labeling[label index] = eigenvalue index`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaCandidate {
    pub omega: u64,
    pub labeling: Vec<usize>,
}

/// Up to this many Frobenius orbits of valid `ω` are collected.
const MAX_ORBITS: usize = 8;

/// The pattern whose exponent shares the smallest factor with `q^d - 1`,
/// so that few roots have to be tried per eigenvalue.
fn pivot_pattern(patterns: &[DigitVector], q: u64, n: u64) -> (usize, u64) {
    patterns
        .iter()
        .enumerate()
        .map(|(i, c)| (i, exponent(&c.0, q, n)))
        .min_by_key(|&(i, e)| (arith::gcd(e, n), i))
        .expect("at least one pattern")
}

/// Checks `{ω^{E(c)}}` against the observed eigenvalues.
fn match_model(
    omega: u64,
    patterns: &[DigitVector],
    index: &HashMap<u64, usize>,
    ctx: &FieldCtx,
) -> Option<Vec<usize>> {
    let n = ctx.big_size() - 1;
    let mut used = vec![false; index.len()];
    let mut labeling = Vec::with_capacity(patterns.len());
    for c in patterns {
        let v = ctx.ext().pow(omega, exponent(&c.0, ctx.q(), n));
        let &i = index.get(&v)?;
        if used[i] {
            return None;
        }
        used[i] = true;
        labeling.push(i);
    }
    Some(labeling)
}

/// All valid `ω` up to Frobenius conjugacy, found by one discrete log per
/// eigenvalue tried as the image of the pivot pattern.
pub fn omega_candidates(
    eigenvalues: &[u64],
    spec: &ModuleSpec,
    ctx: &FieldCtx,
    dlog_calls: &mut u64,
) -> Result<Vec<OmegaCandidate>> {
    let patterns = spec.patterns()?;
    if eigenvalues.len() != patterns.len() {
        return Err(Error::Failure(FailureKind::NotSingerSpectrum));
    }
    let index: HashMap<u64, usize> =
        eigenvalues.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    if index.len() != eigenvalues.len() || index.contains_key(&0) {
        return Err(Error::Failure(FailureKind::NotSingerSpectrum));
    }
    let ext = ctx.ext();
    let n = ctx.big_size() - 1;
    let g = ext.generator();
    let (_, e_star) = pivot_pattern(&patterns, ctx.q(), n);
    let g0 = arith::gcd(e_star, n);
    let m = n / g0;
    let e_inv = if m == 1 { 0 } else { arith::inv_mod((e_star / g0) % m, m).expect("coprime") };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for &lambda in eigenvalues {
        *dlog_calls += 1;
        let l = dlog_raw(ext, lambda, g)?;
        if l % g0 != 0 {
            continue;
        }
        let r0 = arith::mul_mod((l / g0) % m.max(1), e_inv, m.max(1));
        for j in 0..g0 {
            let r = r0 + j * m;
            if arith::gcd(r, n) != 1 {
                continue;
            }
            let omega = ext.pow(g, r);
            if seen.contains(&omega) {
                continue;
            }
            if let Some(labeling) = match_model(omega, &patterns, &index, ctx) {
                for t in 0..ctx.d() as i64 {
                    seen.insert(ctx.frobenius(omega, t));
                }
                out.push(OmegaCandidate { omega, labeling });
                if out.len() >= MAX_ORBITS {
                    return Ok(out);
                }
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Failure(FailureKind::NotSingerSpectrum));
    }
    Ok(out)
}

/// First valid `ω` with its labeling.
pub fn recover_omega(
    eigenvalues: &[u64],
    spec: &ModuleSpec,
    ctx: &FieldCtx,
) -> Result<OmegaCandidate> {
    let mut calls = 0;
    Ok(omega_candidates(eigenvalues, spec, ctx, &mut calls)?.remove(0))
}
