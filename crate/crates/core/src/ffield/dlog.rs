//! Discrete logarithms by Pohlig-Hellman reduction and baby-step giant-step.

use std::collections::HashMap;

use super::field::{Field, FieldElement};
use crate::arith;
use crate::error::{Error, Result};

/// Fields larger than this refuse discrete logs.
pub const DLOG_FIELD_LIMIT: u64 = 1 << 48;

pub fn element_order(x: &FieldElement) -> Result<u64> {
    if x.is_zero() {
        return Err(Error::InvalidInput("zero has no multiplicative order".into()));
    }
    Ok(x.field().order(x.value()))
}

/// Smallest `E ≥ 0` with `base^E = target`.
pub fn discrete_log(target: &FieldElement, base: &FieldElement) -> Result<u64> {
    if target.field() != base.field() {
        return Err(Error::FieldMismatch);
    }
    if base.is_zero() {
        return Err(Error::InvalidInput("base must be nonzero".into()));
    }
    if target.is_zero() {
        return Err(Error::NotInSubgroup);
    }
    dlog_raw(base.field(), target.value(), base.value())
}

pub(crate) fn dlog_raw(field: &Field, target: u64, base: u64) -> Result<u64> {
    if field.size() > DLOG_FIELD_LIMIT {
        return Err(Error::CapacityExceeded(format!(
            "discrete log in a field of size {} (limit 2^48)",
            field.size()
        )));
    }
    let ord = field.order(base);
    if let (Some(lt), Some(lb)) = (field.table_log(target), field.table_log(base)) {
        // Solve lb * E ≡ lt (mod n) for E modulo ord(base).
        let n = field.size() - 1;
        let g = arith::gcd(lb, n);
        if lt % g != 0 {
            return Err(Error::NotInSubgroup);
        }
        let m = n / g;
        debug_assert_eq!(m, ord);
        let inv = arith::inv_mod((lb / g) % m, m).expect("coprime");
        return Ok(arith::mul_mod((lt / g) % m, inv, m));
    }
    pohlig_hellman(field, target, base, ord)
}

/// Pohlig-Hellman over the factorization of `ord = ord(base)`.
pub(crate) fn pohlig_hellman(field: &Field, target: u64, base: u64, ord: u64) -> Result<u64> {
    if field.pow(target, ord) != 1 {
        return Err(Error::NotInSubgroup);
    }
    let mut residues = Vec::new();
    for (r, e) in arith::factorize(ord) {
        let re = r.pow(e);
        let cof = ord / re;
        let g = field.pow(base, cof);
        let h = field.pow(target, cof);
        // gamma has order r
        let gamma = field.pow(g, re / r);
        let g_inv = field.inv(g).expect("nonzero");
        let mut x = 0u64;
        let mut rk = 1u64;
        for k in 0..e {
            let shifted = field.mul(h, field.pow(g_inv, x));
            let hk = field.pow(shifted, re / (rk * r));
            let dk = bsgs(field, gamma, hk, r).ok_or(Error::NotInSubgroup)?;
            x += dk * rk;
            if k + 1 < e {
                rk *= r;
            }
        }
        residues.push((x % re, re));
    }
    let x = arith::crt(&residues) % ord.max(1);
    if field.pow(base, x) != target {
        return Err(Error::NotInSubgroup);
    }
    Ok(x)
}

/// Solves `g^x = h` with `x < order` using a baby-step table of size ⌈√order⌉.
fn bsgs(field: &Field, g: u64, h: u64, order: u64) -> Option<u64> {
    let m = (order as f64).sqrt().ceil() as u64 + 1;
    let mut table = HashMap::with_capacity(m as usize);
    let mut cur = 1u64;
    for j in 0..m {
        table.entry(cur).or_insert(j);
        cur = field.mul(cur, g);
    }
    let giant = field.inv(field.pow(g, m)).expect("nonzero");
    let mut gamma = h;
    for i in 0..m {
        if let Some(&j) = table.get(&gamma) {
            let x = i * m + j;
            if x < order {
                return Some(x);
            }
        }
        gamma = field.mul(gamma, giant);
    }
    None
}
