use super::factor::{equal_degree, find_irreducible, factor_poly};
use super::field::{Field, FieldElement};
use super::poly::DensePoly;
use crate::arith;
use crate::error::{Error, Result};

/// The tower `F_p ⊂ F_q ⊂ F_{q^d}` with an explicit embedding of `F_q`.
///
/// Both defining polynomials are the lexicographically smallest monic
/// irreducibles of their degree over F_p. The embedding sends the class of
/// `x` in `F_q` to the root of `defining_poly_q` in `F_{q^d}` with the
/// smallest coefficient vector.
#[derive(Clone, Debug)]
pub struct FieldCtx {
    p: u64,
    f: u32,
    d: u32,
    q: u64,
    prime: Field,
    base: Field,
    ext: Field,
    defining_poly_q: DensePoly,
    defining_poly_qd: DensePoly,
    embed_root: u64,
    /// Images of `x^i`, `i < f`.
    root_powers: Vec<u64>,
    /// Image of every element of `F_q`, when `q` is small.
    embed_table: Option<Vec<u64>>,
}

impl FieldCtx {
    pub fn new(p: u64, f: u32, d: u32) -> Result<Self> {
        if f == 0 || d == 0 {
            return Err(Error::InvalidInput("extension degrees must be >= 1".into()));
        }
        let prime = Field::prime(p)?;
        let q = arith::checked_pow(p, f)
            .ok_or_else(|| Error::CapacityExceeded("q overflows".into()))?;
        let big = f
            .checked_mul(d)
            .and_then(|m| arith::checked_pow(p, m))
            .ok_or_else(|| Error::CapacityExceeded("q^d overflows 64 bits".into()))?;
        if big > super::field::MAX_FIELD_SIZE {
            return Err(Error::CapacityExceeded(format!("q^d = {big} exceeds 2^62")));
        }
        let defining_poly_q = find_irreducible(p, f as usize)?;
        let defining_poly_qd = find_irreducible(p, (f * d) as usize)?;
        let base = Field::extension(p, defining_poly_q.coeffs())?;
        let ext = Field::extension(p, defining_poly_qd.coeffs())?;
        let embed_root = if f == 1 {
            0
        } else {
            let lifted = defining_poly_q.map_field(&ext, |c| c);
            let mut roots: Vec<u64> = equal_degree(&lifted, 1)
                .into_iter()
                .map(|lin| ext.neg(lin.coeff(0)))
                .collect();
            roots.sort_by(|&a, &b| ext.lex_cmp(a, b));
            roots[0]
        };
        let mut root_powers = Vec::with_capacity(f as usize);
        let mut acc = 1u64;
        for _ in 0..f {
            root_powers.push(acc);
            acc = ext.mul(acc, embed_root);
        }
        let mut ctx = FieldCtx {
            p,
            f,
            d,
            q,
            prime,
            base,
            ext,
            defining_poly_q,
            defining_poly_qd,
            embed_root,
            root_powers,
            embed_table: None,
        };
        if f > 1 && q <= 1 << 16 {
            ctx.embed_table = Some((0..q).map(|x| ctx.embed_slow(x)).collect());
        }
        Ok(ctx)
    }

    /// Context for a prime power `q` and degree `d`.
    pub fn for_q(q: u64, d: u32) -> Result<Self> {
        let (p, f) = arith::prime_power(q)
            .ok_or_else(|| Error::InvalidInput(format!("{q} is not a prime power")))?;
        Self::new(p, f, d)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `q^d`.
    pub fn big_size(&self) -> u64 {
        self.ext.size()
    }

    pub fn prime_field(&self) -> &Field {
        &self.prime
    }

    /// `F_q`.
    pub fn base(&self) -> &Field {
        &self.base
    }

    /// `F_{q^d}`.
    pub fn ext(&self) -> &Field {
        &self.ext
    }

    pub fn defining_poly_q(&self) -> &DensePoly {
        &self.defining_poly_q
    }

    pub fn defining_poly_qd(&self) -> &DensePoly {
        &self.defining_poly_qd
    }

    pub fn embed_root(&self) -> u64 {
        self.embed_root
    }

    fn embed_slow(&self, x: u64) -> u64 {
        if self.f == 1 {
            return x;
        }
        let digits = self.base.digits(x);
        digits
            .iter()
            .zip(&self.root_powers)
            .fold(0u64, |acc, (&c, &r)| self.ext.add(acc, self.ext.mul(c, r)))
    }

    /// Image of an element of `F_q` in `F_{q^d}`.
    #[inline]
    pub fn embed(&self, x: u64) -> u64 {
        match &self.embed_table {
            Some(t) => t[x as usize],
            None => self.embed_slow(x),
        }
    }

    pub fn embed_element(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.field() != &self.base {
            return Err(Error::FieldMismatch);
        }
        self.ext.element(self.embed(x.value()))
    }

    /// Inverse of [`FieldCtx::embed`] on its image; `None` outside `F_q`.
    pub fn restrict(&self, y: u64) -> Option<u64> {
        if self.f == 1 {
            return (y < self.p).then_some(y);
        }
        if let Some(t) = &self.embed_table {
            return t.iter().position(|&v| v == y).map(|i| i as u64);
        }
        // Solve Σ b_i r^i = y over F_p by elimination on coefficient vectors.
        let p = self.p;
        let m = (self.f * self.d) as usize;
        let f = self.f as usize;
        let cols: Vec<Vec<u64>> = self.root_powers.iter().map(|&r| self.ext.digits(r)).collect();
        let target = self.ext.digits(y);
        let mut rows: Vec<Vec<u64>> = (0..m)
            .map(|i| {
                let mut row: Vec<u64> = cols.iter().map(|c| c[i]).collect();
                row.push(target[i]);
                row
            })
            .collect();
        let mut pivot_row = 0;
        let mut pivots = Vec::new();
        for col in 0..f {
            let Some(r) = (pivot_row..m).find(|&r| rows[r][col] != 0) else { continue };
            rows.swap(pivot_row, r);
            let inv = arith::inv_mod(rows[pivot_row][col], p)?;
            for v in rows[pivot_row].iter_mut() {
                *v = arith::mul_mod(*v, inv, p);
            }
            for r2 in 0..m {
                if r2 != pivot_row && rows[r2][col] != 0 {
                    let factor = rows[r2][col];
                    for c in 0..=f {
                        let sub = arith::mul_mod(factor, rows[pivot_row][c], p);
                        rows[r2][c] = (rows[r2][c] + p - sub) % p;
                    }
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        if rows[pivot_row..].iter().any(|row| row[f] != 0) {
            return None;
        }
        let mut b = vec![0u64; f];
        for (i, &col) in pivots.iter().enumerate() {
            b[col] = rows[i][f];
        }
        Some(self.base.from_digits(&b))
    }

    /// `x^(q^e)` on `F_{q^d}`, `e` reduced mod `d` (negative allowed).
    pub fn frobenius(&self, x: u64, e: i64) -> u64 {
        frobenius_q(&self.ext, self.f, x, e)
    }

    pub fn frobenius_element(&self, x: &FieldElement, e: i64) -> Result<FieldElement> {
        if x.field() != &self.ext {
            return Err(Error::FieldMismatch);
        }
        self.ext.element(self.frobenius(x.value(), e))
    }

    /// Roots in `F_{q^d}` of a polynomial over `F_q`, with multiplicities.
    ///
    /// Factors over `F_q` first; an irreducible factor of degree `e`
    /// contributes its `e` roots exactly when `e | d`.
    pub fn roots_in_extension(&self, g: &DensePoly) -> Result<Vec<(u64, u32)>> {
        if g.field() != &self.base {
            return Err(Error::FieldMismatch);
        }
        let mut out = Vec::new();
        for (factor, mult) in factor_poly(g)? {
            let e = factor.degree().unwrap_or(0);
            if e == 0 || !(self.d as usize).is_multiple_of(e) {
                continue;
            }
            let lifted = factor.map_field(&self.ext, |c| self.embed(c));
            for lin in equal_degree(&lifted, 1) {
                out.push((self.ext.neg(lin.coeff(0)), mult));
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}

/// `x^(q^e)` in `field`, where `q = p^f` and `e` may be negative.
pub fn frobenius_q(field: &Field, f: u32, x: u64, e: i64) -> u64 {
    field.frobenius_p(x, e * f as i64)
}
