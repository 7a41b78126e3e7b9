//! Recovering `A` (up to a scalar) from `κ · M_W(A)` in weight coordinates.

use super::gauge::MainFactor;
use crate::error::{Error, FailureKind, Result};
use crate::ffield::{Field, FieldCtx};
use crate::matfq::Matrix;
use crate::schur::{minor, subsets, sym_power, FactorKind, ModuleSpec};

fn degenerate() -> Error {
    Error::Failure(FailureKind::DegenerateEntries)
}

/// Returns `A` normalized to have first nonzero entry 1, given
/// `mhat = κ · induced_matrix(spec, A)` over `F_{q^d}`. The first factor of
/// dimension > 1 is read; other factors are one-dimensional and only
/// contribute to `κ`.
pub fn reconstruct_generator(mhat: &Matrix, spec: &ModuleSpec, ctx: &FieldCtx) -> Result<Matrix> {
    let ext = ctx.ext();
    if mhat.field() != ext {
        return Err(Error::FieldMismatch);
    }
    let dim = spec.dim() as usize;
    if mhat.rows() != dim || mhat.cols() != dim {
        return Err(Error::ShapeMismatch(format!("expected a {dim}x{dim} matrix")));
    }
    let Some(main) = MainFactor::of(spec) else {
        if spec.d == 1 {
            return Ok(Matrix::identity(ext, 1));
        }
        return Err(Error::ConstraintViolation(vec![
            "W is one-dimensional; the natural module cannot be recovered".into(),
        ]));
    };
    let raw = match main.kind {
        FactorKind::Natural => mhat.clone(),
        FactorKind::Sym(k) => extract_sym(mhat, &main, spec.d, k as usize, ext)?,
        FactorKind::Ext(k) => extract_ext(mhat, &main, spec.d, k as usize, ext)?,
    };
    if raw.det()? == 0 {
        return Err(degenerate());
    }
    Ok(raw.frobenius(ctx, -(main.twist as i64)).normalized())
}

fn extract_sym(m: &Matrix, main: &MainFactor, d: usize, k: usize, f: &Field) -> Result<Matrix> {
    let pure = |i: usize| main.index[&vec![i; k]];
    let mixed = |i: usize, j: usize| {
        let mut l = vec![i; k - 1];
        l.push(j);
        l.sort_unstable();
        main.index[&l]
    };
    let kf = f.from_prime(k as u64 % f.p());
    // column j up to scale, normalized at a row u_j with a_{u_j j} != 0
    let mut cols = Vec::with_capacity(d);
    for j in 0..d {
        let cj = pure(j);
        let u = (0..d).find(|&u| m.get(pure(u), cj) != 0).ok_or_else(degenerate)?;
        let denom = f.mul(kf, m.get(pure(u), cj));
        let col: Vec<u64> = (0..d)
            .map(|v| {
                if v == u {
                    1
                } else {
                    f.div(m.get(mixed(u, v), cj), denom).expect("nonzero")
                }
            })
            .collect();
        cols.push(col);
    }
    // A = B diag(s) with B the columns above, so column L of m is
    // κ s^{c(L)} times column L of Sym^k(B): s_j / s_0 is the column ratio
    // at {0^(k-1), j} over the one at {0^k}.
    let mut b = Matrix::zeros(f, d, d);
    for (j, col) in cols.iter().enumerate() {
        for (v, &x) in col.iter().enumerate() {
            b.set(v, j, x);
        }
    }
    let sb = sym_power(&b, k);
    let ratio = |l: usize| -> Result<u64> {
        let r = (0..sb.rows()).find(|&r| sb.get(r, l) != 0).ok_or_else(degenerate)?;
        f.div(m.get(r, l), sb.get(r, l)).filter(|&v| v != 0).ok_or_else(degenerate)
    };
    let base = ratio(pure(0))?;
    let mut a = b;
    for j in 1..d {
        let s = f.div(ratio(mixed(0, j))?, base).expect("nonzero");
        for v in 0..d {
            a.set(v, j, f.mul(s, a.get(v, j)));
        }
    }
    Ok(a)
}

fn extract_ext(m: &Matrix, main: &MainFactor, d: usize, k: usize, f: &Field) -> Result<Matrix> {
    let uppers = subsets(d, k + 1);
    // column j spans the intersection of the k-spaces with Plücker
    // vectors m[·][T] for T ∋ j: v ∧ p_T = 0.
    let mut cols = Vec::with_capacity(d);
    for j in 0..d {
        let mut rows = Vec::new();
        for (t, label) in main.labels.iter().enumerate() {
            if !label.contains(&j) {
                continue;
            }
            for u in &uppers {
                let mut row = vec![0u64; d];
                for (pos, &x) in u.iter().enumerate() {
                    let rest: Vec<usize> = u.iter().copied().filter(|&y| y != x).collect();
                    let p = m.get(main.index[&rest], t);
                    row[x] = if pos % 2 == 0 { p } else { f.neg(p) };
                }
                if row.iter().any(|&v| v != 0) {
                    rows.push(row);
                }
            }
        }
        if rows.is_empty() {
            return Err(degenerate());
        }
        let ker = Matrix::from_rows(f, &rows)?.kernel_basis();
        if ker.len() != 1 {
            return Err(degenerate());
        }
        cols.push(ker.into_iter().next().expect("one vector"));
    }
    let mut b = Matrix::zeros(f, d, d);
    for (j, col) in cols.iter().enumerate() {
        for (v, &x) in col.iter().enumerate() {
            b.set(v, j, x);
        }
    }
    // ρ_T = m[S][T] / det B[S,T] = κ Π_{t∈T} c_t for any S with nonzero minor.
    let rho = |t: &[usize]| -> Result<u64> {
        let ti = main.index[t];
        for (si, s) in main.labels.iter().enumerate() {
            let det = minor(&b, s, t);
            if det != 0 {
                let v = f.div(m.get(si, ti), det).expect("nonzero");
                return if v == 0 { Err(degenerate()) } else { Ok(v) };
            }
        }
        Err(degenerate())
    };
    let mut c = vec![1u64; d];
    for j in 1..d {
        // T ∋ 0, T ∌ j; T' = T - 0 + j gives c_j / c_0
        let t: Vec<usize> = (0..d).filter(|&x| x != j).take(k).collect();
        let mut tp: Vec<usize> = t.iter().copied().filter(|&x| x != 0).collect();
        tp.push(j);
        tp.sort_unstable();
        c[j] = f.div(rho(&tp)?, rho(&t)?).expect("nonzero");
    }
    let mut a = Matrix::zeros(f, d, d);
    for j in 0..d {
        for v in 0..d {
            a.set(v, j, f.mul(c[j], b.get(v, j)));
        }
    }
    Ok(a)
}
