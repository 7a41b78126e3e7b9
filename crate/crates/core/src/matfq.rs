//! Dense matrices over a single finite field.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ffield::{DensePoly, Field, FieldCtx, FieldElement};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatOp {
    Mul,
    Add,
    Inv,
    Det,
    Transpose,
    TensorProduct,
}

/// Outcome of [`mat_arith`]: most operations give a matrix, `det` a scalar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatValue {
    Matrix(Matrix),
    Scalar(FieldElement),
}

/// One distinct eigenvalue with a normalized eigenvector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenPair {
    pub value: u64,
    /// First nonzero coordinate equal to 1.
    pub vector: Vec<u64>,
    pub multiplicity: u32,
    /// Dimension of the eigenspace.
    pub geometric: usize,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_vec(field: &Field, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|&&v| !field.contains(v)) {
            return Err(Error::InvalidInput(format!("entry {bad} outside {field:?}")));
        }
        Ok(Matrix { field: field.clone(), rows, cols, data })
    }

    pub fn from_rows(field: &Field, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Self::from_vec(field, rows.len(), cols, rows.concat())
    }

    pub fn diagonal(field: &Field, diag: &[u64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(field, n, n);
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    /// Companion matrix of a monic polynomial: ones on the subdiagonal and
    /// `-c_0, …, -c_{n-1}` down the last column.
    pub fn companion(poly: &DensePoly) -> Result<Self> {
        let n = poly.degree().filter(|&n| n > 0).ok_or_else(|| {
            Error::InvalidInput("companion matrix needs a polynomial of positive degree".into())
        })?;
        if !poly.is_monic() {
            return Err(Error::InvalidInput("companion matrix needs a monic polynomial".into()));
        }
        let f = poly.field();
        let mut m = Self::zeros(f, n, n);
        for i in 1..n {
            m.data[i * n + i - 1] = 1;
        }
        for i in 0..n {
            m.data[i * n + n - 1] = f.neg(poly.coeff(i));
        }
        Ok(m)
    }

    pub fn random<R: Rng + ?Sized>(field: &Field, rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| rng.gen_range(0..field.size())).collect();
        Matrix { field: field.clone(), rows, cols, data }
    }

    pub fn random_invertible<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Self {
        loop {
            let m = Self::random(field, n, n, rng);
            if m.det().is_ok_and(|d| d != 0) {
                return m;
            }
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn entry(&self, r: usize, c: usize) -> FieldElement {
        FieldElement::new(&self.field, self.get(r, c)).expect("entries are canonical")
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    fn require_square(&self) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(self.rows)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    if b != 0 {
                        *o = f.add(*o, f.mul(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch("vector length".into()));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeMismatch("addition of different shapes".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.field.add(a, b)).collect();
        Ok(Matrix { data, ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeMismatch("subtraction of different shapes".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.field.sub(a, b)).collect();
        Ok(Matrix { data, ..self.clone() })
    }

    pub fn scale(&self, c: u64) -> Self {
        self.map(|v| self.field.mul(v, c))
    }

    pub fn map(&self, f: impl Fn(u64) -> u64) -> Self {
        Matrix { data: self.data.iter().map(|&v| f(v)).collect(), ..self.clone() }
    }

    /// Same entries read in another field (e.g. through an embedding).
    pub fn map_field(&self, target: &Field, f: impl Fn(u64) -> u64) -> Self {
        Matrix {
            field: target.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Embeds a matrix over `F_q` into `F_{q^d}`.
    pub fn lift(&self, ctx: &FieldCtx) -> Result<Self> {
        if &self.field == ctx.ext() {
            return Ok(self.clone());
        }
        if &self.field != ctx.base() {
            return Err(Error::FieldMismatch);
        }
        Ok(self.map_field(ctx.ext(), |v| ctx.embed(v)))
    }

    /// Entrywise `x ↦ x^(q^e)` for a matrix over `F_{q^d}`.
    pub fn frobenius(&self, ctx: &FieldCtx, e: i64) -> Self {
        if e.rem_euclid(ctx.d() as i64) == 0 {
            return self.clone();
        }
        self.map(|v| ctx.frobenius(v, e))
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    /// Kronecker product; entry `((i, k), (j, l))` sits at
    /// `(i * B.rows + k, j * B.cols + l)`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let f = &self.field;
        let (rows, cols) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = Self::zeros(f, rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == 0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.data[(i * other.rows + k) * cols + j * other.cols + l] =
                            f.mul(a, other.get(k, l));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        let n = self.require_square()?;
        let mut base = self.clone();
        let mut acc = Self::identity(&self.field, n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|r| (0..self.cols).all(|c| self.get(r, c) == u64::from(r == c)))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self.get(r, c) == 0))
    }

    /// Reduced row echelon form in place; returns pivot columns and the
    /// determinant factor accumulated from swaps and scalings.
    fn rref_in_place(&mut self, ncols: usize) -> (Vec<usize>, u64) {
        let f = self.field.clone();
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut det_factor = 1u64;
        let mut r = 0;
        for c in 0..ncols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
                det_factor = f.neg(det_factor);
            }
            let pv = self.data[r * cols + c];
            det_factor = f.mul(det_factor, pv);
            let inv = f.inv(pv).expect("nonzero pivot");
            for j in c..cols {
                let v = self.data[r * cols + j];
                self.data[r * cols + j] = f.mul(v, inv);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.data[i * cols + c];
                if factor == 0 {
                    continue;
                }
                for j in c..cols {
                    let sub = f.mul(factor, self.data[r * cols + j]);
                    if sub != 0 {
                        self.data[i * cols + j] = f.sub(self.data[i * cols + j], sub);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (pivots, det_factor)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place(self.cols).0.len()
    }

    pub fn det(&self) -> Result<u64> {
        let n = self.require_square()?;
        let f = &self.field;
        let mut m = self.clone();
        let mut det = 1u64;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| m.data[i * n + c] != 0) else {
                return Ok(0);
            };
            if pr != c {
                for j in 0..n {
                    m.data.swap(pr * n + j, c * n + j);
                }
                det = f.neg(det);
            }
            let pv = m.data[c * n + c];
            det = f.mul(det, pv);
            let inv = f.inv(pv).expect("nonzero pivot");
            for i in c + 1..n {
                let factor = f.mul(m.data[i * n + c], inv);
                if factor == 0 {
                    continue;
                }
                for j in c..n {
                    let sub = f.mul(factor, m.data[c * n + j]);
                    m.data[i * n + j] = f.sub(m.data[i * n + j], sub);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.require_square()?;
        let mut aug = Self::zeros(&self.field, n, 2 * n);
        for r in 0..n {
            aug.data[r * 2 * n..r * 2 * n + n].copy_from_slice(self.row(r));
            aug.data[r * 2 * n + n + r] = 1;
        }
        let (pivots, _) = aug.rref_in_place(n);
        if pivots.len() < n {
            return Err(Error::SingularMatrix);
        }
        let mut out = Self::zeros(&self.field, n, n);
        for r in 0..n {
            out.data[r * n..(r + 1) * n].copy_from_slice(&aug.data[r * 2 * n + n..(r + 1) * 2 * n]);
        }
        Ok(out)
    }

    /// Basis of the right null space, one vector per free column, with a 1
    /// in that column.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let mut m = self.clone();
        let (pivots, _) = m.rref_in_place(self.cols);
        let f = &self.field;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0u64; self.cols];
                v[free] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(m.get(r, free));
                }
                v
            })
            .collect()
    }

    /// Characteristic polynomial `det(xI - A)` by reduction to upper
    /// Hessenberg form. Uses only field divisions.
    pub fn char_poly(&self) -> Result<DensePoly> {
        let n = self.require_square()?;
        let f = self.field.clone();
        let mut h = self.clone();
        for m in 0..n.saturating_sub(2) {
            let Some(i) = (m + 1..n).find(|&i| h.get(i, m) != 0) else { continue };
            if i != m + 1 {
                for j in 0..n {
                    h.data.swap(i * n + j, (m + 1) * n + j);
                }
                for r in 0..n {
                    h.data.swap(r * n + i, r * n + m + 1);
                }
            }
            let inv = f.inv(h.get(m + 1, m)).expect("nonzero pivot");
            for i in m + 2..n {
                let u = f.mul(h.get(i, m), inv);
                if u == 0 {
                    continue;
                }
                for j in 0..n {
                    let sub = f.mul(u, h.get(m + 1, j));
                    h.data[i * n + j] = f.sub(h.data[i * n + j], sub);
                }
                for r in 0..n {
                    let add = f.mul(u, h.get(r, i));
                    h.data[r * n + m + 1] = f.add(h.data[r * n + m + 1], add);
                }
            }
        }
        // p_m = (x - h_mm) p_{m-1} - Σ_i (Π sub-diagonal) h_{i,m} p_{i-1}
        let mut polys: Vec<DensePoly> = vec![DensePoly::one(&f)];
        for m in 1..=n {
            let mut pm = polys[m - 1].mul(&DensePoly::linear(&f, h.get(m - 1, m - 1)));
            let mut t = 1u64;
            for i in 1..m {
                t = f.mul(t, h.get(m - i, m - i - 1));
                let c = f.mul(t, h.get(m - i - 1, m - 1));
                if c != 0 {
                    pm = pm.sub(&polys[m - i - 1].scale(c));
                }
            }
            polys.push(pm);
        }
        Ok(polys.pop().expect("n + 1 polynomials"))
    }

    /// `Some(μ)` with `self = μ · other` for a single nonzero `μ`.
    pub fn proportional_to(&self, other: &Self) -> Option<u64> {
        if self.field != other.field || (self.rows, self.cols) != (other.rows, other.cols) {
            return None;
        }
        let f = &self.field;
        let i = other.data.iter().position(|&v| v != 0)?;
        let mu = f.div(self.data[i], other.data[i])?;
        if mu == 0 {
            return None;
        }
        self.data
            .iter()
            .zip(&other.data)
            .all(|(&a, &b)| a == f.mul(mu, b))
            .then_some(mu)
    }

    /// First entry where `self != μ · other`, for reporting.
    pub fn first_mismatch(&self, other: &Self, mu: u64) -> Option<(usize, usize)> {
        let f = &self.field;
        (0..self.data.len())
            .find(|&i| self.data[i] != f.mul(mu, other.data[i]))
            .map(|i| (i / self.cols, i % self.cols))
    }

    /// Scales so that the first nonzero entry (row-major) is 1.
    pub fn normalized(&self) -> Self {
        match self.data.iter().find(|&&v| v != 0) {
            Some(&lead) => self.scale(self.field.inv(lead).expect("nonzero")),
            None => self.clone(),
        }
    }

    /// Multiplicative order of an invertible matrix dividing `bound`, given
    /// the factorization of `bound`.
    pub fn order_dividing(&self, bound: u64, factors: &[(u64, u32)]) -> Result<Option<u64>> {
        if !self.pow(bound)?.is_identity() {
            return Ok(None);
        }
        let mut ord = bound;
        for &(r, _) in factors {
            while ord.is_multiple_of(r) && self.pow(ord / r)?.is_identity() {
                ord /= r;
            }
        }
        Ok(Some(ord))
    }
}

pub fn mat_arith(a: &Matrix, b: Option<&Matrix>, op: MatOp) -> Result<MatValue> {
    let need_b = || b.ok_or_else(|| Error::InvalidInput(format!("{op:?} needs two operands")));
    Ok(match op {
        MatOp::Mul => MatValue::Matrix(a.mul(need_b()?)?),
        MatOp::Add => MatValue::Matrix(a.add(need_b()?)?),
        MatOp::TensorProduct => MatValue::Matrix(a.kron(need_b()?)?),
        MatOp::Inv => MatValue::Matrix(a.inverse()?),
        MatOp::Transpose => MatValue::Matrix(a.transpose()),
        MatOp::Det => MatValue::Scalar(a.field().element(a.det()?)?),
    })
}

pub fn kernel_basis(a: &Matrix) -> Vec<Vec<u64>> {
    a.kernel_basis()
}

pub fn char_poly(a: &Matrix) -> Result<DensePoly> {
    a.char_poly()
}

fn normalize_vec(field: &Field, v: &mut [u64]) {
    if let Some(&lead) = v.iter().find(|&&x| x != 0) {
        let inv = field.inv(lead).expect("nonzero");
        for x in v.iter_mut() {
            *x = field.mul(*x, inv);
        }
    }
}

/// Eigenvalues of `a` (over `F_q` or `F_{q^d}`) that lie in `F_{q^d}`, each
/// with a normalized eigenvector; sorted by eigenvalue encoding.
pub fn eigenpairs_over_extension(a: &Matrix, ctx: &FieldCtx) -> Result<Vec<EigenPair>> {
    let n = a.require_square()?;
    let lifted = a.lift(ctx)?;
    let roots = if a.field() == ctx.base() {
        ctx.roots_in_extension(&a.char_poly()?)?
    } else {
        crate::ffield::factor::roots(&lifted.char_poly()?)?
    };
    let ext = ctx.ext();
    let mut out = Vec::with_capacity(roots.len());
    for (lambda, mult) in roots {
        let mut shifted = lifted.clone();
        for i in 0..n {
            let v = shifted.get(i, i);
            shifted.set(i, i, ext.sub(v, lambda));
        }
        let basis = shifted.kernel_basis();
        let mut vector = basis.first().cloned().unwrap_or_default();
        normalize_vec(ext, &mut vector);
        out.push(EigenPair { value: lambda, vector, multiplicity: mult, geometric: basis.len() });
    }
    Ok(out)
}
