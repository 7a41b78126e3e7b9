use std::fmt;
use std::sync::Arc;

use crate::arith;
use crate::error::{Error, Result};

/// Fields at most this large get log/antilog/Zech tables.
const TABLE_LIMIT: u64 = 1 << 18;
/// Hard cap on field sizes so encodings and sums stay inside `u64`.
pub const MAX_FIELD_SIZE: u64 = 1 << 62;
const NO_LOG: u32 = u32::MAX;

struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `zech[k] = log(1 + g^k)`, or `NO_LOG` when `1 + g^k = 0`.
    zech: Vec<u32>,
}

struct Inner {
    p: u64,
    degree: u32,
    size: u64,
    /// Monic defining polynomial over F_p, lowest degree first.
    modulus: Vec<u64>,
    tables: Option<Tables>,
    generator: u64,
    order_factors: Vec<(u64, u32)>,
}

/// A finite field `F_{p^m}` presented as `F_p[x]/(g)`.
///
/// Elements are plain `u64` encodings `Σ c_i p^i` of their coefficient
/// vectors in the basis `1, x, …, x^{m-1}`; the field handle does the
/// arithmetic. [`FieldElement`] bundles the two for checked use.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 1 {
            write!(f, "GF({})", self.p())
        } else {
            write!(f, "GF({}^{})", self.p(), self.degree())
        }
    }
}

impl Field {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Field> {
        if !arith::is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if p > MAX_FIELD_SIZE {
            return Err(Error::CapacityExceeded(format!("prime {p} too large")));
        }
        Ok(Self::build(p, vec![0, 1]))
    }

    /// `F_p[x]/(modulus)`; `modulus` must be monic and irreducible over F_p.
    pub fn extension(p: u64, modulus: &[u64]) -> Result<Field> {
        let base = Field::prime(p)?;
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidInput("modulus must be monic of degree >= 1".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidInput("modulus coefficient out of range".into()));
        }
        let degree = (modulus.len() - 1) as u32;
        match arith::checked_pow(p, degree) {
            Some(s) if s <= MAX_FIELD_SIZE => {}
            _ => {
                return Err(Error::CapacityExceeded(format!(
                    "field of size {p}^{degree} exceeds 2^62"
                )))
            }
        }
        if degree == 1 && modulus[0] == 0 {
            return Ok(base);
        }
        let poly = super::DensePoly::new(&base, modulus.to_vec());
        if !super::factor::is_irreducible(&poly) {
            return Err(Error::InvalidInput("modulus is not irreducible".into()));
        }
        Ok(Self::build(p, modulus.to_vec()))
    }

    fn build(p: u64, modulus: Vec<u64>) -> Field {
        let degree = (modulus.len() - 1) as u32;
        let size = p.pow(degree);
        let order_factors = arith::factorize(size - 1);
        let mut inner = Inner {
            p,
            degree,
            size,
            modulus,
            tables: None,
            generator: 1,
            order_factors,
        };
        inner.generator = find_generator(&inner);
        if degree > 1 && size <= TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        Field(Arc::new(inner))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.0.degree
    }

    pub fn size(&self) -> u64 {
        self.0.size
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    /// A fixed generator of the multiplicative group (smallest encoding).
    pub fn generator(&self) -> u64 {
        self.0.generator
    }

    /// Factorization of `size - 1`.
    pub fn order_factors(&self) -> &[(u64, u32)] {
        &self.0.order_factors
    }

    pub fn zero(&self) -> u64 {
        0
    }

    pub fn one(&self) -> u64 {
        1
    }

    pub fn contains(&self, a: u64) -> bool {
        a < self.0.size
    }

    pub fn element(&self, value: u64) -> Result<FieldElement> {
        if !self.contains(value) {
            return Err(Error::InvalidInput(format!("{value} is not an element of {self:?}")));
        }
        Ok(FieldElement { field: self.clone(), value })
    }

    /// Coefficients over F_p, lowest first, length `degree`.
    pub fn digits(&self, mut a: u64) -> Vec<u64> {
        let p = self.0.p;
        (0..self.0.degree)
            .map(|_| {
                let c = a % p;
                a /= p;
                c
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u64]) -> u64 {
        digits.iter().rev().fold(0u64, |acc, &c| acc * self.0.p + c % self.0.p)
    }

    /// Log of a nonzero element with respect to [`Field::generator`], when tables exist.
    pub(crate) fn table_log(&self, a: u64) -> Option<u64> {
        self.0.tables.as_ref().map(|t| t.log[a as usize] as u64)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let inner = &*self.0;
        if inner.degree == 1 {
            let s = a + b;
            return if s >= inner.p { s - inner.p } else { s };
        }
        if let Some(t) = &inner.tables {
            if a == 0 {
                return b;
            }
            if b == 0 {
                return a;
            }
            let n = (inner.size - 1) as u32;
            let la = t.log[a as usize];
            let lb = t.log[b as usize];
            let k = if lb >= la { lb - la } else { lb + n - la };
            let z = t.zech[k as usize];
            if z == NO_LOG {
                return 0;
            }
            let e = la as u64 + z as u64;
            return t.exp[(e % n as u64) as usize] as u64;
        }
        digitwise(inner, a, b, |x, y, p| (x + y) % p)
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        let inner = &*self.0;
        if a == 0 {
            return 0;
        }
        if inner.degree == 1 {
            return inner.p - a;
        }
        if inner.p == 2 {
            return a;
        }
        if let Some(t) = &inner.tables {
            let n = inner.size - 1;
            let e = (t.log[a as usize] as u64 + n / 2) % n;
            return t.exp[e as usize] as u64;
        }
        digitwise(inner, 0, a, |_, y, p| (p - y) % p)
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let inner = &*self.0;
        if a == 0 || b == 0 {
            return 0;
        }
        if inner.degree == 1 {
            return arith::mul_mod(a, b, inner.p);
        }
        if let Some(t) = &inner.tables {
            let n = inner.size - 1;
            let e = t.log[a as usize] as u64 + t.log[b as usize] as u64;
            let e = if e >= n { e - n } else { e };
            return t.exp[e as usize] as u64;
        }
        slow_mul(inner, a, b)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        let inner = &*self.0;
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        if inner.degree == 1 {
            return arith::pow_mod(a, e, inner.p);
        }
        if let Some(t) = &inner.tables {
            let n = inner.size - 1;
            let k = arith::mul_mod(t.log[a as usize] as u64, e % n, n);
            return t.exp[k as usize] as u64;
        }
        let mut base = a;
        let mut exp = e;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = slow_mul(inner, acc, base);
            }
            base = slow_mul(inner, base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        let inner = &*self.0;
        if let Some(t) = &inner.tables {
            let n = inner.size - 1;
            let l = t.log[a as usize] as u64;
            return Some(t.exp[((n - l) % n) as usize] as u64);
        }
        if inner.degree == 1 {
            return arith::inv_mod(a, inner.p);
        }
        Some(self.pow(a, inner.size - 2))
    }

    pub fn div(&self, a: u64, b: u64) -> Option<u64> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// `a^(p^k)`, with `k` reduced modulo the degree.
    pub fn frobenius_p(&self, a: u64, k: i64) -> u64 {
        let m = self.0.degree as i64;
        let k = k.rem_euclid(m);
        let mut x = a;
        for _ in 0..k {
            x = self.pow(x, self.0.p);
        }
        x
    }

    /// Embeds an element of F_p (an integer mod p) into this field.
    pub fn from_prime(&self, c: u64) -> u64 {
        c % self.0.p
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: u64) -> u64 {
        assert!(a != 0, "order of zero");
        let mut ord = self.0.size - 1;
        for &(r, e) in self.order_factors() {
            for _ in 0..e {
                if self.pow(a, ord / r) == 1 {
                    ord /= r;
                } else {
                    break;
                }
            }
        }
        ord
    }

    pub fn is_primitive(&self, a: u64) -> bool {
        a != 0 && self.order(a) == self.0.size - 1
    }

    /// Compares two elements by coefficient vector, constant term first.
    pub fn lex_cmp(&self, a: u64, b: u64) -> std::cmp::Ordering {
        self.digits(a).cmp(&self.digits(b))
    }
}

fn digitwise(inner: &Inner, a: u64, b: u64, op: impl Fn(u64, u64, u64) -> u64) -> u64 {
    let p = inner.p;
    let (mut x, mut y) = (a, b);
    let mut out = 0u64;
    let mut scale = 1u64;
    for i in 0..inner.degree {
        let c = op(x % p, y % p, p);
        x /= p;
        y /= p;
        out += c * scale;
        if i + 1 < inner.degree {
            scale *= p;
        }
    }
    out
}

fn slow_mul(inner: &Inner, a: u64, b: u64) -> u64 {
    let p = inner.p;
    let m = inner.degree as usize;
    let da = digits_of(inner, a);
    let db = digits_of(inner, b);
    let mut prod = vec![0u64; 2 * m - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + arith::mul_mod(x, y, p)) % p;
        }
    }
    for k in (m..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for i in 0..m {
            let sub = arith::mul_mod(c, inner.modulus[i], p);
            prod[k - m + i] = (prod[k - m + i] + p - sub) % p;
        }
    }
    prod[..m].iter().rev().fold(0u64, |acc, &c| acc * p + c)
}

fn digits_of(inner: &Inner, mut a: u64) -> Vec<u64> {
    (0..inner.degree)
        .map(|_| {
            let c = a % inner.p;
            a /= inner.p;
            c
        })
        .collect()
}

fn slow_pow(inner: &Inner, a: u64, mut e: u64) -> u64 {
    let mut base = a;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = if inner.degree == 1 {
                arith::mul_mod(acc, base, inner.p)
            } else {
                slow_mul(inner, acc, base)
            };
        }
        base = if inner.degree == 1 {
            arith::mul_mod(base, base, inner.p)
        } else {
            slow_mul(inner, base, base)
        };
        e >>= 1;
    }
    acc
}

fn find_generator(inner: &Inner) -> u64 {
    let n = inner.size - 1;
    if n == 1 {
        return 1;
    }
    (2..inner.size)
        .find(|&g| {
            inner
                .order_factors
                .iter()
                .all(|&(r, _)| slow_pow(inner, g, n / r) != 1)
        })
        .expect("multiplicative group is cyclic")
}

fn build_tables(inner: &Inner) -> Tables {
    let n = (inner.size - 1) as usize;
    let mut exp = vec![0u32; n];
    let mut log = vec![NO_LOG; inner.size as usize];
    let mut x = 1u64;
    for (k, slot) in exp.iter_mut().enumerate() {
        *slot = x as u32;
        log[x as usize] = k as u32;
        x = slow_mul(inner, x, inner.generator);
    }
    let p = inner.p;
    let zech = exp
        .iter()
        .map(|&v| {
            let v = v as u64;
            // 1 + v only touches the constant digit.
            let one_plus = if v % p == p - 1 { v - (p - 1) } else { v + 1 };
            if one_plus == 0 {
                NO_LOG
            } else {
                log[one_plus as usize]
            }
        })
        .collect();
    Tables { exp, log, zech }
}

/// An element tagged with its field, for checked arithmetic.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    value: u64,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{:?}", self.value, self.field)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElement {
    pub fn new(field: &Field, value: u64) -> Result<Self> {
        field.element(value)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    fn wrap(&self, value: u64) -> Self {
        FieldElement { field: self.field.clone(), value }
    }

    pub fn apply(&self, op: FieldOp, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let f = &self.field;
        let v = match op {
            FieldOp::Add => f.add(self.value, other.value),
            FieldOp::Sub => f.sub(self.value, other.value),
            FieldOp::Mul => f.mul(self.value, other.value),
            FieldOp::Div => f.div(self.value, other.value).ok_or(Error::DivisionByZero)?,
        };
        Ok(self.wrap(v))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.apply(FieldOp::Add, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.apply(FieldOp::Sub, other)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.apply(FieldOp::Mul, other)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.apply(FieldOp::Div, other)
    }

    pub fn neg(&self) -> Self {
        self.wrap(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<Self> {
        self.field
            .inv(self.value)
            .map(|v| self.wrap(v))
            .ok_or(Error::DivisionByZero)
    }

    pub fn pow(&self, e: u64) -> Self {
        self.wrap(self.field.pow(self.value, e))
    }
}
