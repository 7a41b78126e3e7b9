//! Eigenbasis construction and the choice of row scalings.
//!
//! Eigenvectors are only defined up to scaling. For the reconstruction step
//! the scaling must come from a torus element of `GL_d`, so that
//! `C M_W(x) C^{-1}` is again the functor applied to a d×d matrix. Pure
//! vectors (images of a pure eigenvector under group elements) pin the
//! scaling down: pure powers for symmetric powers, Plücker relations for
//! exterior powers. The natural module needs nothing.

use std::collections::HashMap;

use crate::error::{Error, FailureKind, Result};
use crate::ffield::{Field, FieldCtx};
use crate::matfq::Matrix;
use crate::schur::{multisets, subsets, FactorKind, ModuleSpec};

/// Rows of `c` are left eigenvectors of the Singer element in label order;
/// `c_inv` holds the matching right eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Eigenbasis {
    pub c: Matrix,
    pub c_inv: Matrix,
    /// Eigenvalue of each row.
    pub eigenvalues: Vec<u64>,
}

impl Eigenbasis {
    /// `C · X · C^{-1}` for a matrix `X` on W over `F_q` or `F_{q^d}`.
    pub fn conjugate(&self, x: &Matrix, ctx: &FieldCtx) -> Result<Matrix> {
        self.c.mul(&x.lift(ctx)?)?.mul(&self.c_inv)
    }

    fn rescale_rows(&mut self, d: &[u64]) {
        let f = self.c.field().clone();
        for (r, &dr) in d.iter().enumerate() {
            let inv = f.inv(dr).expect("nonzero gauge");
            for col in 0..self.c.cols() {
                let v = self.c.get(r, col);
                self.c.set(r, col, f.mul(v, inv));
            }
            for row in 0..self.c_inv.rows() {
                let v = self.c_inv.get(row, r);
                self.c_inv.set(row, r, f.mul(v, dr));
            }
        }
    }
}

/// Kind and twist of the first factor of dimension > 1, with its labels.
#[derive(Clone, Debug)]
pub(crate) struct MainFactor {
    pub kind: FactorKind,
    pub twist: u32,
    pub labels: Vec<Vec<usize>>,
    pub index: HashMap<Vec<usize>, usize>,
}

impl MainFactor {
    pub fn of(spec: &ModuleSpec) -> Option<Self> {
        let f = spec.factors[spec.main_factor()?];
        let kind = match f.kind {
            FactorKind::Sym(1) | FactorKind::Ext(1) => FactorKind::Natural,
            k => k,
        };
        let labels = match kind {
            FactorKind::Natural => (0..spec.d).map(|i| vec![i]).collect(),
            FactorKind::Sym(k) => multisets(spec.d, k as usize),
            FactorKind::Ext(k) => subsets(spec.d, k as usize),
        };
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        Some(MainFactor { kind, twist: f.twist, labels, index })
    }
}

/// Left eigenvectors of `s_w` for the given eigenvalues, in that order,
/// each normalized to have first nonzero coordinate 1.
pub fn eigenbasis_unscaled(s_w: &Matrix, eigenvalues: &[u64], ctx: &FieldCtx) -> Result<Eigenbasis> {
    let t = s_w.lift(ctx)?.transpose();
    let ext = ctx.ext();
    let n = t.rows();
    let mut rows = Vec::with_capacity(n);
    for &lambda in eigenvalues {
        let mut shifted = t.clone();
        for i in 0..n {
            let v = shifted.get(i, i);
            shifted.set(i, i, ext.sub(v, lambda));
        }
        let mut k = shifted.kernel_basis();
        if k.len() != 1 {
            return Err(Error::Failure(FailureKind::NotSingerSpectrum));
        }
        let mut v = k.pop().expect("one vector");
        let lead = *v.iter().find(|&&x| x != 0).expect("nonzero eigenvector");
        let inv = ext.inv(lead).expect("nonzero");
        for x in v.iter_mut() {
            *x = ext.mul(*x, inv);
        }
        rows.push(v);
    }
    let c = Matrix::from_rows(ext, &rows)?;
    let c_inv = c.inverse()?;
    Ok(Eigenbasis { c, c_inv, eigenvalues: eigenvalues.to_vec() })
}

/// Attempts allowed to find a pure vector with no zero coordinate, and the
/// number of pure vectors used for Plücker ratios.
const SYM_TRIES: usize = 12;
const EXT_SAMPLES: usize = 8;

/// `k! / Π b_i!` for the multiset `label`, in the prime field.
fn multinomial(field: &Field, label: &[usize]) -> u64 {
    let p = field.p();
    let mut num = 1u64;
    for i in 1..=label.len() as u64 {
        num = field.mul(num, field.from_prime(i % p));
    }
    let mut i = 0;
    while i < label.len() {
        let mut j = i;
        while j < label.len() && label[j] == label[i] {
            j += 1;
        }
        for t in 1..=(j - i) as u64 {
            num = field.div(num, field.from_prime(t % p)).expect("k < p");
        }
        i = j;
    }
    num
}

/// Sign of the permutation sorting `seq` (distinct entries).
fn sort_sign(seq: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

/// Label `R ∪ {a, b}` with the sign of `p_{R a b}` against the sorted label.
fn plucker_term(r: &[usize], a: usize, b: usize) -> (Vec<usize>, bool) {
    let mut seq = r.to_vec();
    seq.push(a);
    seq.push(b);
    let sign = sort_sign(&seq);
    seq.sort_unstable();
    (seq, sign)
}

/// `D_{l0} D_{l1} = factor · D_{r0} D_{r1}`.
struct PairEquation {
    lhs: [usize; 2],
    rhs: [usize; 2],
    factor: u64,
}

/// Rescales the rows of `basis` so that it differs from the true
/// weight basis by a torus element. `pure_source` yields public group
/// elements (over `F_q`) used to move a pure eigenvector around.
pub fn fix_gauge(
    basis: &mut Eigenbasis,
    spec: &ModuleSpec,
    ctx: &FieldCtx,
    pure_source: &mut dyn FnMut() -> Matrix,
) -> Result<()> {
    let Some(main) = MainFactor::of(spec) else { return Ok(()) };
    match main.kind {
        FactorKind::Natural => Ok(()),
        FactorKind::Sym(k) => fix_sym(basis, &main, k as usize, ctx, pure_source),
        FactorKind::Ext(k) => {
            if main.labels.len() == spec.d {
                // ext(d-1): every torus of labels is torus-like already
                return Ok(());
            }
            fix_ext(basis, &main, spec.d, k as usize, ctx, pure_source)
        }
    }
}

fn pure_image(basis: &Eigenbasis, w_star: &[u64], x: &Matrix, ctx: &FieldCtx) -> Result<Vec<u64>> {
    let w = x.lift(ctx)?.mul_vec(w_star)?;
    basis.c.mul_vec(&w)
}

fn fix_sym(
    basis: &mut Eigenbasis,
    main: &MainFactor,
    k: usize,
    ctx: &FieldCtx,
    pure_source: &mut dyn FnMut() -> Matrix,
) -> Result<()> {
    let ext = ctx.ext().clone();
    let star = main.index[&vec![0usize; k]];
    let w_star = basis.c_inv.col(star);
    for _ in 0..SYM_TRIES {
        let u = pure_image(basis, &w_star, &pure_source(), ctx)?;
        if u.contains(&0) {
            continue;
        }
        let d: Vec<u64> = u
            .iter()
            .zip(&main.labels)
            .map(|(&v, l)| ext.div(v, multinomial(&ext, l)).expect("nonzero multinomial"))
            .collect();
        basis.rescale_rows(&d);
        return Ok(());
    }
    Err(Error::Failure(FailureKind::DegenerateEntries))
}

fn fix_ext(
    basis: &mut Eigenbasis,
    main: &MainFactor,
    d: usize,
    k: usize,
    ctx: &FieldCtx,
    pure_source: &mut dyn FnMut() -> Matrix,
) -> Result<()> {
    let ext = ctx.ext().clone();
    let w_star = basis.c_inv.col(0);
    let samples: Vec<Vec<u64>> = (0..EXT_SAMPLES)
        .map(|_| pure_image(basis, &w_star, &pure_source(), ctx))
        .collect::<Result<_>>()?;

    let mut equations = Vec::new();
    for r in subsets(d, k - 2) {
        let rest: Vec<usize> = (0..d).filter(|i| !r.contains(i)).collect();
        for quad in subsets(rest.len(), 4) {
            let [i, j, l, m] = [rest[quad[0]], rest[quad[1]], rest[quad[2]], rest[quad[3]]];
            let terms = [
                (plucker_term(&r, i, j), plucker_term(&r, l, m), true),
                (plucker_term(&r, i, l), plucker_term(&r, j, m), false),
                (plucker_term(&r, i, m), plucker_term(&r, j, l), true),
            ];
            let idx: Vec<[usize; 2]> = terms
                .iter()
                .map(|((a, _), (b, _), _)| [main.index[a], main.index[b]])
                .collect();
            let mut rows = Vec::with_capacity(samples.len());
            for u in &samples {
                let row: Vec<u64> = terms
                    .iter()
                    .zip(&idx)
                    .map(|(((_, sa), (_, sb), plus), ix)| {
                        let v = ext.mul(u[ix[0]], u[ix[1]]);
                        if (sa == sb) == *plus {
                            v
                        } else {
                            ext.neg(v)
                        }
                    })
                    .collect();
                rows.push(row);
            }
            let ker = Matrix::from_rows(&ext, &rows)?.kernel_basis();
            match ker.len() {
                0 => return Err(Error::Failure(FailureKind::DegenerateEntries)),
                1 => {
                    let y = &ker[0];
                    if y.contains(&0) {
                        return Err(Error::Failure(FailureKind::DegenerateEntries));
                    }
                    // D_A D_B Y1 = D_C D_D Y2 = D_E D_F Y3
                    for t in 1..3 {
                        equations.push(PairEquation {
                            lhs: idx[0],
                            rhs: idx[t],
                            factor: ext.div(y[t], y[0]).expect("nonzero"),
                        });
                    }
                }
                _ => {}
            }
        }
    }

    let mut gauge: Vec<Option<u64>> = vec![None; main.labels.len()];
    let s0: Vec<usize> = (0..k).collect();
    let mut seeds = vec![s0.clone()];
    for j in k..d {
        let mut s = s0[..k - 1].to_vec();
        s.push(j);
        seeds.push(s);
    }
    for i in 0..k - 1 {
        let mut s: Vec<usize> = s0.iter().copied().filter(|&x| x != i).collect();
        s.push(k);
        s.sort_unstable();
        seeds.push(s);
    }
    for s in seeds {
        gauge[main.index[&s]] = Some(1);
    }
    loop {
        let mut progress = false;
        for eq in &equations {
            let vals = [eq.lhs[0], eq.lhs[1], eq.rhs[0], eq.rhs[1]].map(|i| gauge[i]);
            let unknown: Vec<usize> = (0..4).filter(|&t| vals[t].is_none()).collect();
            if unknown.len() != 1 {
                continue;
            }
            let t = unknown[0];
            let v = |s: usize| vals[s].expect("known");
            // lhs0 * lhs1 = factor * rhs0 * rhs1
            let solved = match t {
                0 => ext.div(ext.mul(eq.factor, ext.mul(v(2), v(3))), v(1)),
                1 => ext.div(ext.mul(eq.factor, ext.mul(v(2), v(3))), v(0)),
                2 => ext.div(ext.mul(v(0), v(1)), ext.mul(eq.factor, v(3))),
                _ => ext.div(ext.mul(v(0), v(1)), ext.mul(eq.factor, v(2))),
            };
            let idx = [eq.lhs[0], eq.lhs[1], eq.rhs[0], eq.rhs[1]][t];
            gauge[idx] = Some(solved.ok_or(Error::Failure(FailureKind::DegenerateEntries))?);
            progress = true;
        }
        if !progress {
            break;
        }
    }
    let d_vals: Vec<u64> = gauge
        .into_iter()
        .collect::<Option<_>>()
        .ok_or(Error::Failure(FailureKind::DegenerateEntries))?;
    basis.rescale_rows(&d_vals);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multinomials_mod_p() {
        let f = Field::prime(7).unwrap();
        assert_eq!(multinomial(&f, &[0, 0, 1]), 3);
        assert_eq!(multinomial(&f, &[0, 1, 2]), 6);
        assert_eq!(multinomial(&f, &[2, 2, 2]), 1);
    }

    #[test]
    fn plucker_signs() {
        assert_eq!(plucker_term(&[], 0, 1), (vec![0, 1], true));
        assert_eq!(plucker_term(&[2], 0, 1), (vec![0, 1, 2], true));
        assert_eq!(plucker_term(&[1], 0, 2), (vec![0, 1, 2], false));
    }
}
