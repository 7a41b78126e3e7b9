//! Tensor products of twisted natural, symmetric and exterior powers.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith;
use crate::digitmap::{twisted_aggregate, DigitVector};
use crate::error::{Error, Result};
use crate::ffield::Field;
use crate::matfq::Matrix;

/// Modules larger than this are rejected by [`ModuleSpec::check_constraints`].
pub const MAX_MODULE_DIM: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FactorKind {
    Natural,
    Sym(u32),
    Ext(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FactorSpec {
    pub kind: FactorKind,
    pub twist: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModuleSpec {
    pub d: usize,
    pub q: u64,
    pub factors: Vec<FactorSpec>,
}

/// A basis vector of W: one label per factor (0-based indices) and the
/// twisted aggregate digit vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisLabel {
    pub parts: Vec<Vec<usize>>,
    pub digits: DigitVector,
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, part) in self.parts.iter().enumerate() {
            if t > 0 {
                write!(f, "⊗")?;
            }
            write!(f, "{{")?;
            for (i, v) in part.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", v + 1)?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum MultiplicityCheck {
    MultiplicityFree,
    Repeated { pattern: DigitVector, count: usize },
}

impl MultiplicityCheck {
    pub fn is_free(&self) -> bool {
        matches!(self, MultiplicityCheck::MultiplicityFree)
    }
}

impl FactorSpec {
    pub fn new(kind: FactorKind, twist: u32) -> Self {
        FactorSpec { kind, twist }
    }

    pub fn nat(twist: u32) -> Self {
        Self::new(FactorKind::Natural, twist)
    }

    pub fn sym(k: u32, twist: u32) -> Self {
        Self::new(FactorKind::Sym(k), twist)
    }

    pub fn ext(k: u32, twist: u32) -> Self {
        Self::new(FactorKind::Ext(k), twist)
    }

    /// Polynomial degree.
    pub fn degree(&self) -> u64 {
        match self.kind {
            FactorKind::Natural => 1,
            FactorKind::Sym(k) | FactorKind::Ext(k) => k as u64,
        }
    }

    pub fn dim(&self, d: usize) -> u64 {
        match self.kind {
            FactorKind::Natural => d as u64,
            FactorKind::Sym(k) => binom(d as u64 + k as u64 - 1, k as u64),
            FactorKind::Ext(k) => binom(d as u64, k as u64),
        }
    }

    /// Labels in lexicographic order: `[i]`, non-decreasing multisets, or
    /// increasing subsets of `0..d`.
    pub fn labels(&self, d: usize) -> Vec<Vec<usize>> {
        match self.kind {
            FactorKind::Natural => (0..d).map(|i| vec![i]).collect(),
            FactorKind::Sym(k) => multisets(d, k as usize),
            FactorKind::Ext(k) => subsets(d, k as usize),
        }
    }

    /// Untwisted digit vector of a label: index counts.
    pub fn label_digits(label: &[usize], d: usize) -> DigitVector {
        let mut c = vec![0u64; d];
        for &i in label {
            c[i] += 1;
        }
        DigitVector(c)
    }

    /// Matrix of `A` on this factor, twist included.
    pub fn induced(&self, a: &Matrix, q: u64) -> Result<Matrix> {
        let d = a.rows();
        if !a.is_square() {
            return Err(Error::ShapeMismatch("induced matrix needs a square input".into()));
        }
        let m = match self.kind {
            FactorKind::Natural => a.clone(),
            FactorKind::Sym(k) => {
                if k as u64 >= a.field().p() {
                    return Err(Error::UnsupportedFactor(format!(
                        "sym({k}) needs k < p = {}",
                        a.field().p()
                    )));
                }
                sym_power(a, k as usize)
            }
            FactorKind::Ext(k) => {
                if k as usize > d {
                    return Err(Error::UnsupportedFactor(format!("ext({k}) needs k <= d = {d}")));
                }
                compound(a, k as usize)
            }
        };
        Ok(twist_entries(&m, q, self.twist))
    }
}

/// Entrywise `x ↦ x^(q^e)` in whatever field holds the entries.
pub fn twist_entries(m: &Matrix, q: u64, e: u32) -> Matrix {
    if e == 0 {
        return m.clone();
    }
    let field = m.field().clone();
    let f = field_degree_of(q, field.p());
    m.map(|x| field.frobenius_p(x, f as i64 * e as i64))
}

fn field_degree_of(q: u64, p: u64) -> u32 {
    let mut f = 0;
    let mut v = 1u64;
    while v < q {
        v = v.saturating_mul(p);
        f += 1;
    }
    f
}

pub(crate) fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc * (n as u128 - k as u128 + i) / i;
    }
    acc.min(u64::MAX as u128) as u64
}

pub(crate) fn multisets(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(i, d, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, k, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(i + 1, d, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, k, &mut Vec::new(), &mut out);
    out
}

/// Monomial-basis matrix of `Sym^k(A)`: the column of multiset `M` holds
/// the coefficients of `Π_{j∈M} (A e_j)`.
pub(crate) fn sym_power(a: &Matrix, k: usize) -> Matrix {
    let f = a.field().clone();
    let d = a.rows();
    let levels: Vec<Vec<Vec<usize>>> = (0..=k).map(|t| multisets(d, t)).collect();
    let index: Vec<HashMap<Vec<usize>, usize>> = levels
        .iter()
        .map(|ls| ls.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect())
        .collect();
    // up[t][m][i] = index of m ∪ {i} in level t+1
    let up: Vec<Vec<Vec<usize>>> = (0..k)
        .map(|t| {
            levels[t]
                .iter()
                .map(|m| {
                    (0..d)
                        .map(|i| {
                            let mut n = m.clone();
                            let pos = n.partition_point(|&x| x <= i);
                            n.insert(pos, i);
                            index[t + 1][&n]
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let labels = &levels[k];
    let n = labels.len();
    let mut out = Matrix::zeros(&f, n, n);
    for (c, label) in labels.iter().enumerate() {
        let mut poly = vec![1u64];
        for (t, &j) in label.iter().enumerate() {
            let mut next = vec![0u64; levels[t + 1].len()];
            for (m, &coef) in poly.iter().enumerate() {
                if coef == 0 {
                    continue;
                }
                for i in 0..d {
                    let aij = a.get(i, j);
                    if aij != 0 {
                        let slot = &mut next[up[t][m][i]];
                        *slot = f.add(*slot, f.mul(coef, aij));
                    }
                }
            }
            poly = next;
        }
        for (r, v) in poly.into_iter().enumerate() {
            out.set(r, c, v);
        }
    }
    out
}

/// k-th compound matrix: entry `(R, C)` is the minor `det A[R, C]`.
fn compound(a: &Matrix, k: usize) -> Matrix {
    let f = a.field().clone();
    let labels = subsets(a.rows(), k);
    let n = labels.len();
    let mut out = Matrix::zeros(&f, n, n);
    for (r, rs) in labels.iter().enumerate() {
        for (c, cs) in labels.iter().enumerate() {
            out.set(r, c, minor(a, rs, cs));
        }
    }
    out
}

pub(crate) fn minor(a: &Matrix, rows: &[usize], cols: &[usize]) -> u64 {
    let k = rows.len();
    if k == 0 {
        return 1;
    }
    let data: Vec<u64> = rows.iter().flat_map(|&r| cols.iter().map(move |&c| a.get(r, c))).collect();
    Matrix::from_vec(a.field(), k, k, data)
        .expect("square minor")
        .det()
        .expect("square minor")
}

impl ModuleSpec {
    pub fn new(d: usize, q: u64, factors: Vec<FactorSpec>) -> Self {
        ModuleSpec { d, q, factors }
    }

    pub fn p(&self) -> Option<u64> {
        arith::prime_power(self.q).map(|(p, _)| p)
    }

    pub fn total_degree(&self) -> u64 {
        self.factors.iter().map(FactorSpec::degree).sum()
    }

    pub fn dim(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, f| acc.saturating_mul(f.dim(self.d)))
    }

    pub fn factor_dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim(self.d) as usize).collect()
    }

    /// Labels in Kronecker order: factor-major, lexicographic within factors.
    pub fn basis_labels(&self) -> Result<Vec<BasisLabel>> {
        self.validate_shape()?;
        let per_factor: Vec<Vec<Vec<usize>>> =
            self.factors.iter().map(|f| f.labels(self.d)).collect();
        let mut out = vec![BasisLabel { parts: Vec::new(), digits: DigitVector::zeros(self.d) }];
        for (fac, labels) in self.factors.iter().zip(&per_factor) {
            let mut next = Vec::with_capacity(out.len() * labels.len());
            for prefix in &out {
                for l in labels {
                    let b = FactorSpec::label_digits(l, self.d);
                    let digits = twisted_aggregate(
                        &[(prefix.digits.clone(), 0), (b, fac.twist as i64)],
                        self.d,
                    )?;
                    let mut parts = prefix.parts.clone();
                    parts.push(l.clone());
                    next.push(BasisLabel { parts, digits });
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Aggregated digit vectors in label order.
    pub fn patterns(&self) -> Result<Vec<DigitVector>> {
        Ok(self.basis_labels()?.into_iter().map(|l| l.digits).collect())
    }

    fn validate_shape(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidInput("d must be at least 1".into()));
        }
        for f in &self.factors {
            match f.kind {
                FactorKind::Sym(0) | FactorKind::Ext(0) => {
                    return Err(Error::UnsupportedFactor("power 0".into()))
                }
                FactorKind::Ext(k) if k as usize > self.d => {
                    return Err(Error::UnsupportedFactor(format!(
                        "ext({k}) needs k <= d = {}",
                        self.d
                    )))
                }
                _ => {}
            }
        }
        if self.dim() > MAX_MODULE_DIM {
            return Err(Error::CapacityExceeded(format!(
                "dim W = {} exceeds {MAX_MODULE_DIM}",
                self.dim()
            )));
        }
        Ok(())
    }

    /// `M_W(A)`: Kronecker product of the factor matrices.
    pub fn induced_matrix(&self, a: &Matrix) -> Result<Matrix> {
        if a.rows() != self.d || a.cols() != self.d {
            return Err(Error::ShapeMismatch(format!(
                "expected a {d}x{d} matrix, got {}x{}",
                a.rows(),
                a.cols(),
                d = self.d
            )));
        }
        self.validate_shape()?;
        let mut out = Matrix::identity(a.field(), 1);
        for f in &self.factors {
            out = out.kron(&f.induced(a, self.q)?)?;
        }
        Ok(out)
    }

    pub fn check_constraints(&self) -> Vec<String> {
        let mut v = Vec::new();
        let p = match self.p() {
            Some(p) => p,
            None => {
                v.push(format!("q = {} is not a prime power", self.q));
                return v;
            }
        };
        if self.d == 0 {
            v.push("d must be at least 1".into());
        }
        let k = self.total_degree();
        if k + 1 >= self.q {
            v.push(format!("total degree K = {k} violates K < q - 1 = {}", self.q.saturating_sub(1)));
        }
        for f in &self.factors {
            match f.kind {
                FactorKind::Sym(k) if k as u64 >= p => {
                    v.push(format!("sym({k}) needs k < p = {p}"))
                }
                FactorKind::Sym(0) | FactorKind::Ext(0) => v.push("power 0 is not allowed".into()),
                FactorKind::Ext(k) if k as usize > self.d => {
                    v.push(format!("ext({k}) needs k <= d = {}", self.d))
                }
                _ => {}
            }
        }
        if self.dim() > MAX_MODULE_DIM {
            v.push(format!("dim W = {} exceeds {MAX_MODULE_DIM}", self.dim()));
        }
        v
    }

    /// Errors with the violation list unless the spec is usable.
    pub fn require_valid(&self) -> Result<()> {
        let v = self.check_constraints();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::ConstraintViolation(v))
        }
    }

    /// Compares twisted aggregate digit vectors across all labels.
    pub fn check_multiplicity_free(&self) -> Result<MultiplicityCheck> {
        let pats = self.patterns()?;
        let mut counts: HashMap<&DigitVector, usize> = HashMap::new();
        for p in &pats {
            *counts.entry(p).or_default() += 1;
        }
        Ok(pats
            .iter()
            .find(|p| counts[p] > 1)
            .map_or(MultiplicityCheck::MultiplicityFree, |p| MultiplicityCheck::Repeated {
                pattern: p.clone(),
                count: counts[p],
            }))
    }

    /// Index of the first factor of dimension > 1, if any.
    pub fn main_factor(&self) -> Option<usize> {
        self.factors.iter().position(|f| f.dim(self.d) > 1)
    }

    pub fn factors_string(&self) -> String {
        self.factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// Ordered factor lists of length `1..=max_factors` drawn from `nat`,
/// `sym(k)` (`2 <= k < p`) and `ext(k)` (`2 <= k <= d`) with every twist
/// `0..d`, keeping those that pass [`ModuleSpec::check_constraints`] and have
/// `dim W <= max_dim`. Multiplicity-freeness is not filtered.
pub fn enumerate_specs(d: usize, q: u64, max_factors: usize, max_dim: u64) -> Vec<ModuleSpec> {
    let Some((p, _)) = arith::prime_power(q) else { return Vec::new() };
    let mut kinds = vec![FactorKind::Natural];
    kinds.extend((2..p.min(q.saturating_sub(1))).map(|k| FactorKind::Sym(k as u32)));
    kinds.extend((2..=d).map(|k| FactorKind::Ext(k as u32)));
    let choices: Vec<FactorSpec> = kinds
        .iter()
        .flat_map(|&k| (0..d as u32).map(move |t| FactorSpec::new(k, t)))
        .collect();
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<FactorSpec>> = vec![Vec::new()];
    for _ in 0..max_factors {
        let mut next = Vec::new();
        for prefix in &frontier {
            for c in &choices {
                let mut f = prefix.clone();
                f.push(*c);
                let spec = ModuleSpec::new(d, q, f.clone());
                // K and dim only grow, so failing prefixes are dropped
                if spec.total_degree() + 1 >= q || spec.dim() > max_dim {
                    continue;
                }
                if spec.check_constraints().is_empty() {
                    out.push(spec);
                }
                next.push(f);
            }
        }
        frontier = next;
    }
    out
}

pub fn dim(spec: &ModuleSpec) -> u64 {
    spec.dim()
}

pub fn basis_labels(spec: &ModuleSpec) -> Result<Vec<BasisLabel>> {
    spec.basis_labels()
}

pub fn induced_matrix(spec: &ModuleSpec, a: &Matrix) -> Result<Matrix> {
    spec.induced_matrix(a)
}

pub fn total_degree(spec: &ModuleSpec) -> u64 {
    spec.total_degree()
}

pub fn check_constraints(spec: &ModuleSpec) -> Vec<String> {
    spec.check_constraints()
}

pub fn check_multiplicity_free(spec: &ModuleSpec) -> Result<MultiplicityCheck> {
    spec.check_multiplicity_free()
}

/// Diagonal entries of `M_W(diag t)` predicted by the digit vectors; only
/// valid when the twists act trivially on `t` (entries in `F_q`).
pub fn torus_character(labels: &[BasisLabel], field: &Field, t: &[u64]) -> Vec<u64> {
    labels
        .iter()
        .map(|l| {
            l.digits
                .0
                .iter()
                .zip(t)
                .fold(1u64, |acc, (&c, &ti)| field.mul(acc, field.pow(ti, c)))
        })
        .collect()
}

impl fmt::Display for FactorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FactorKind::Natural => write!(f, "nat")?,
            FactorKind::Sym(k) => write!(f, "sym({k})")?,
            FactorKind::Ext(k) => write!(f, "ext({k})")?,
        }
        write!(f, "@{}", self.twist)
    }
}

impl FromStr for FactorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, twist) = match s.split_once('@') {
            Some((b, t)) => (
                b.trim(),
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad twist in '{s}'")))?,
            ),
            None => (s, 0),
        };
        let power = |prefix: &str| -> Result<u32> {
            let inner = body
                .strip_prefix(prefix)
                .and_then(|r| r.strip_prefix('('))
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("expected {prefix}(k) in '{s}'")))?;
            inner
                .trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad power in '{s}'")))
        };
        let kind = match body {
            "nat" | "natural" => FactorKind::Natural,
            b if b.starts_with("sym") => FactorKind::Sym(power("sym")?),
            b if b.starts_with("ext") => FactorKind::Ext(power("ext")?),
            _ => return Err(Error::Parse(format!("unknown factor '{s}'"))),
        };
        Ok(FactorSpec { kind, twist })
    }
}

/// Parses `nat@0,sym(2)@1`, optionally wrapped in brackets.
pub fn parse_factors(s: &str) -> Result<Vec<FactorSpec>> {
    let s = s.trim();
    let s = s.strip_prefix('[').unwrap_or(s);
    let s = s.strip_suffix(']').unwrap_or(s);
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(str::parse).collect()
}

impl fmt::Display for ModuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} q={} factors=[{}]", self.d, self.q, self.factors_string())
    }
}

impl FromStr for ModuleSpec {
    type Err = Error;

    /// `d=3 q=7 factors=[sym(2)@0]`
    fn from_str(s: &str) -> Result<Self> {
        let (mut d, mut q, mut factors) = (None, None, None);
        let mut rest = s.trim();
        while !rest.is_empty() {
            let (key, after) = rest
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in '{rest}'")))?;
            let key = key.trim();
            let after = after.trim_start();
            let (value, tail) = if after.starts_with('[') {
                let end = after
                    .find(']')
                    .ok_or_else(|| Error::Parse("unclosed '[' in factor list".into()))?;
                (&after[..=end], &after[end + 1..])
            } else {
                after.split_at(after.find(char::is_whitespace).unwrap_or(after.len()))
            };
            match key {
                "d" => d = Some(value.parse::<usize>().map_err(|_| Error::Parse(format!("bad d '{value}'")))?),
                "q" => q = Some(value.parse::<u64>().map_err(|_| Error::Parse(format!("bad q '{value}'")))?),
                "factors" => factors = Some(parse_factors(value)?),
                other => return Err(Error::Parse(format!("unknown key '{other}'"))),
            }
            rest = tail.trim_start();
        }
        Ok(ModuleSpec {
            d: d.ok_or_else(|| Error::Parse("missing d=".into()))?,
            q: q.ok_or_else(|| Error::Parse("missing q=".into()))?,
            factors: factors.ok_or_else(|| Error::Parse("missing factors=".into()))?,
        })
    }
}

impl Serialize for ModuleSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ModuleSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
