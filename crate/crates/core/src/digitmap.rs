//! Base-q digit vectors and the exponent map `E(c) = Σ c_i q^(i-1) mod (q^d - 1)`.
//!
//! Everything here is integer arithmetic: the field `F_{q^d}` is only
//! touched by [`model_eigenvalues`] and [`exponent_and_digits`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::ffield::{dlog_raw, FieldCtx, FieldElement};
use crate::schur::ModuleSpec;

/// Residue sets larger than this are refused.
pub const RESIDUE_BUDGET: u64 = 10_000_000;

/// `(c_1, …, c_d)`; `c_1` is the least significant base-q digit.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DigitVector(pub Vec<u64>);

impl DigitVector {
    pub fn zeros(d: usize) -> Self {
        DigitVector(vec![0; d])
    }

    pub fn unit(d: usize, i: usize) -> Self {
        let mut v = vec![0; d];
        v[i] = 1;
        DigitVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn digits(&self) -> &[u64] {
        &self.0
    }

    /// Digit `i` moves to position `i + e (mod d)`: the effect of raising to
    /// the `q^e`-th power.
    pub fn shifted(&self, e: i64) -> Self {
        let d = self.0.len() as i64;
        let mut out = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            out[(i as i64 + e).rem_euclid(d) as usize] = v;
        }
        DigitVector(out)
    }
}

impl fmt::Debug for DigitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for DigitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl From<Vec<u64>> for DigitVector {
    fn from(v: Vec<u64>) -> Self {
        DigitVector(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Injectivity {
    Injective { count: u64 },
    Collision { first: DigitVector, second: DigitVector, residue: String },
}

impl Injectivity {
    pub fn is_injective(&self) -> bool {
        matches!(self, Injectivity::Injective { .. })
    }
}

/// `q^d - 1` as a big integer.
pub fn group_order(q: u64, d: usize) -> BigUint {
    BigUint::from(q).pow(d as u32) - BigUint::one()
}

pub fn base_q_expansion(e: &BigUint, q: u64, d: usize) -> Result<DigitVector> {
    if q < 2 {
        return Err(Error::InvalidInput("base must be at least 2".into()));
    }
    if *e >= BigUint::from(q).pow(d as u32) {
        return Err(Error::InvalidInput(format!("{e} does not fit in {d} base-{q} digits")));
    }
    let mut rest = e.clone();
    let bq = BigUint::from(q);
    let digits = (0..d)
        .map(|_| {
            let r = (&rest % &bq).to_u64().expect("digit below q");
            rest /= &bq;
            r
        })
        .collect();
    Ok(DigitVector(digits))
}

/// Machine-word version of [`base_q_expansion`].
pub fn base_q_digits(mut e: u64, q: u64, d: usize) -> DigitVector {
    DigitVector(
        (0..d)
            .map(|_| {
                let r = e % q;
                e /= q;
                r
            })
            .collect(),
    )
}

/// `Φ(b) = Σ b_i q^(i-1) mod (q^d - 1)`.
pub fn phi(b: &DigitVector, q: u64) -> BigUint {
    let d = b.len();
    let modulus = group_order(q, d);
    let bq = BigUint::from(q);
    let mut acc = BigUint::zero();
    for &c in b.0.iter().rev() {
        acc = acc * &bq + BigUint::from(c);
    }
    if modulus.is_zero() {
        acc
    } else {
        acc % modulus
    }
}

/// `Φ(b) mod n` where `n = q^d - 1` fits a machine word.
pub fn exponent(b: &[u64], q: u64, n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let qm = q % n;
    b.iter().rev().fold(0u64, |acc, &c| (arith::mul_mod(acc, qm, n) + c % n) % n)
}

/// Exponent evaluator choosing a `u128` path when `q^d - 1` allows it.
#[derive(Clone, Debug)]
pub struct ExponentMap {
    q: u64,
    d: usize,
    small: Option<u128>,
    big: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Residue {
    Small(u128),
    Big(BigUint),
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Residue::Small(v) => write!(f, "{v}"),
            Residue::Big(v) => write!(f, "{v}"),
        }
    }
}

impl ExponentMap {
    pub fn new(q: u64, d: usize) -> Self {
        let big = group_order(q, d);
        // (n-1) * q + digit must stay below 2^128 in Horner steps
        let small = big
            .to_u128()
            .filter(|&n| n.checked_mul(q as u128).and_then(|v| v.checked_add(q as u128)).is_some());
        ExponentMap { q, d, small, big }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.big
    }

    fn residue(&self, b: &[u64]) -> Residue {
        match self.small {
            Some(n) if n > 0 => Residue::Small(
                b.iter()
                    .rev()
                    .fold(0u128, |acc, &c| (acc * self.q as u128 + c as u128 % n) % n),
            ),
            Some(_) => Residue::Small(0),
            None => Residue::Big(phi(&DigitVector(b.to_vec()), self.q)),
        }
    }

    pub fn eval(&self, b: &DigitVector) -> BigUint {
        assert_eq!(b.len(), self.d, "digit vector length");
        match self.residue(&b.0) {
            Residue::Small(v) => BigUint::from(v),
            Residue::Big(v) => v,
        }
    }
}

/// Streaming, lexicographically ascending compositions of `K` into `d`
/// non-negative parts, from `(0,…,0,K)` to `(K,0,…,0)`.
#[derive(Clone, Debug)]
pub struct Compositions {
    current: Option<Vec<u64>>,
}

impl Iterator for Compositions {
    type Item = DigitVector;

    fn next(&mut self) -> Option<DigitVector> {
        let cur = self.current.take()?;
        let out = DigitVector(cur.clone());
        let mut next = cur;
        let d = next.len();
        let mut suffix = 0u64;
        let mut advanced = false;
        for i in (0..d.saturating_sub(1)).rev() {
            suffix += next[i + 1];
            if suffix > 0 {
                next[i] += 1;
                for v in &mut next[i + 1..] {
                    *v = 0;
                }
                next[d - 1] = suffix - 1;
                advanced = true;
                break;
            }
        }
        if advanced {
            self.current = Some(next);
        }
        Some(out)
    }
}

pub fn enumerate_patterns(d: usize, k: u64) -> Compositions {
    if d == 0 {
        return Compositions { current: (k == 0).then(Vec::new) };
    }
    let mut start = vec![0; d];
    start[d - 1] = k;
    Compositions { current: Some(start) }
}

/// `binom(d + K - 1, K)`, saturating.
pub fn pattern_count(d: usize, k: u64) -> u128 {
    if d == 0 {
        return u128::from(k == 0);
    }
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc.saturating_mul(d as u128 - 1 + i) / i;
    }
    acc
}

fn first_collision<I, K, F>(items: I, key: F) -> Result<Injectivity>
where
    I: Iterator<Item = DigitVector>,
    K: Hash + Eq + fmt::Display,
    F: Fn(&DigitVector) -> K,
{
    let mut seen: HashMap<K, DigitVector> = HashMap::new();
    let mut count = 0u64;
    for b in items {
        count += 1;
        if count > RESIDUE_BUDGET {
            return Err(Error::CapacityExceeded(format!(
                "more than {RESIDUE_BUDGET} digit vectors"
            )));
        }
        let r = key(&b);
        if let Some(prev) = seen.get(&r) {
            return Ok(Injectivity::Collision {
                first: prev.clone(),
                second: b,
                residue: r.to_string(),
            });
        }
        seen.insert(r, b);
    }
    Ok(Injectivity::Injective { count })
}

/// All of `{0,…,C}^d` in lexicographic order (first digit most significant).
fn box_vectors(d: usize, c: u64) -> impl Iterator<Item = DigitVector> {
    let mut cur = Some(vec![0u64; d]);
    std::iter::from_fn(move || {
        let v = cur.take()?;
        let mut next = v.clone();
        for i in (0..d).rev() {
            if next[i] < c {
                next[i] += 1;
                cur = Some(next);
                break;
            }
            next[i] = 0;
        }
        Some(DigitVector(v))
    })
}

/// Exhaustive check of `Φ` on `B_C = {0,…,C}^d`.
pub fn check_injectivity(q: u64, d: usize, c: u64) -> Result<Injectivity> {
    if q < 2 || d == 0 {
        return Err(Error::InvalidInput("need q >= 2 and d >= 1".into()));
    }
    let size = (c as u128 + 1).checked_pow(d as u32);
    if size.is_none_or(|s| s > RESIDUE_BUDGET as u128) {
        return Err(Error::CapacityExceeded(format!(
            "(C+1)^d = {}^{d} exceeds the budget of {RESIDUE_BUDGET}",
            c + 1
        )));
    }
    let map = ExponentMap::new(q, d);
    first_collision(box_vectors(d, c), |b| map.residue(&b.0))
}

/// Exhaustive check of `Φ` on digit vectors with `Σ c_i = K`.
#[allow(non_snake_case)]
pub fn check_injectivity_sumK(q: u64, d: usize, k: u64) -> Result<Injectivity> {
    if q < 2 || d == 0 {
        return Err(Error::InvalidInput("need q >= 2 and d >= 1".into()));
    }
    if pattern_count(d, k) > RESIDUE_BUDGET as u128 {
        return Err(Error::CapacityExceeded(format!(
            "binom(d+K-1, K) exceeds the budget of {RESIDUE_BUDGET}"
        )));
    }
    let map = ExponentMap::new(q, d);
    first_collision(enumerate_patterns(d, k), |b| map.residue(&b.0))
}

/// `c_j = Σ_t b_t[j - e_t mod d]`.
pub fn twisted_aggregate(parts: &[(DigitVector, i64)], d: usize) -> Result<DigitVector> {
    let mut out = vec![0u64; d];
    for (b, e) in parts {
        if b.len() != d {
            return Err(Error::InvalidInput(format!(
                "digit vector of length {} where {d} was expected",
                b.len()
            )));
        }
        for (i, &v) in b.0.iter().enumerate() {
            out[(i as i64 + e).rem_euclid(d as i64) as usize] += v;
        }
    }
    Ok(DigitVector(out))
}

/// `ω^{E(c)}` for every aggregated pattern `c` of the module.
pub fn model_eigenvalues(
    ctx: &FieldCtx,
    spec: &ModuleSpec,
    omega: &FieldElement,
) -> Result<BTreeMap<DigitVector, FieldElement>> {
    if omega.field() != ctx.ext() {
        return Err(Error::FieldMismatch);
    }
    if !ctx.ext().is_primitive(omega.value()) {
        return Err(Error::NotPrimitive);
    }
    let n = ctx.big_size() - 1;
    let mut out = BTreeMap::new();
    for label in spec.basis_labels()? {
        let e = exponent(&label.digits.0, ctx.q(), n);
        out.insert(label.digits, omega.pow(e));
    }
    Ok(out)
}

/// Discrete log of `λ` to base `ω` and its base-q digits.
pub fn exponent_and_digits(
    lambda: &FieldElement,
    omega: &FieldElement,
    ctx: &FieldCtx,
) -> Result<(u64, DigitVector)> {
    if lambda.field() != ctx.ext() || omega.field() != ctx.ext() {
        return Err(Error::FieldMismatch);
    }
    if !ctx.ext().is_primitive(omega.value()) {
        return Err(Error::NotPrimitive);
    }
    if lambda.is_zero() {
        return Err(Error::InvalidInput("zero has no exponent".into()));
    }
    let e = dlog_raw(ctx.ext(), lambda.value(), omega.value())?;
    Ok((e, base_q_digits(e, ctx.q(), ctx.d() as usize)))
}
