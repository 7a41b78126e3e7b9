//! Factorization over finite fields: squarefree decomposition, distinct-degree
//! splitting and Cantor-Zassenhaus equal-degree splitting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::Field;
use super::poly::DensePoly;
use crate::arith;
use crate::error::{Error, Result};

/// `x^(Q^k) mod f` where `Q` is the size of `f`'s field.
fn frobenius_power_of_x(f: &DensePoly, k: usize) -> DensePoly {
    let q = f.field().size();
    let mut h = DensePoly::x(f.field()).rem(f).expect("nonzero");
    for _ in 0..k {
        h = h.powmod(q, f);
    }
    h
}

/// Rabin's test.
pub fn is_irreducible(f: &DensePoly) -> bool {
    let n = match f.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let f = f.monic();
    let x = DensePoly::x(f.field());
    if frobenius_power_of_x(&f, n).sub(&x).rem(&f).map(|r| !r.is_zero()).unwrap_or(true) {
        return false;
    }
    arith::factorize(n as u64).iter().all(|&(r, _)| {
        let h = frobenius_power_of_x(&f, n / r as usize).sub(&x);
        h.gcd(&f).is_one()
    })
}

/// Lexicographically smallest monic irreducible polynomial of degree `n`
/// over F_p, comparing coefficients from the constant term upward.
pub fn find_irreducible(p: u64, n: usize) -> Result<DensePoly> {
    if n == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    let fp = Field::prime(p)?;
    if n == 1 {
        return Ok(DensePoly::x(&fp));
    }
    // Odometer over (c_0, …, c_{n-1}) with c_0 most significant.
    let mut c = vec![0u64; n];
    loop {
        if c[0] != 0 {
            let mut coeffs = c.clone();
            coeffs.push(1);
            let cand = DensePoly::new(&fp, coeffs);
            if is_irreducible(&cand) {
                return Ok(cand);
            }
        }
        let mut i = n - 1;
        loop {
            c[i] += 1;
            if c[i] < p {
                break;
            }
            c[i] = 0;
            if i == 0 {
                unreachable!("irreducible polynomials exist in every degree");
            }
            i -= 1;
        }
    }
}

/// `g^(1/p)` for a polynomial whose exponents are all multiples of `p`.
fn pth_root(g: &DensePoly) -> DensePoly {
    let f = g.field();
    let p = f.p() as usize;
    let coeffs = g
        .coeffs()
        .iter()
        .step_by(p)
        .map(|&c| f.frobenius_p(c, -1))
        .collect();
    DensePoly::new(f, coeffs)
}

/// Squarefree decomposition of a monic polynomial: `(factor, multiplicity)`
/// pairs with pairwise coprime squarefree factors.
pub fn squarefree_decomposition(g: &DensePoly) -> Vec<(DensePoly, u32)> {
    let mut out = Vec::new();
    squarefree_into(&g.monic(), 1, &mut out);
    out
}

fn squarefree_into(g: &DensePoly, mult: u32, out: &mut Vec<(DensePoly, u32)>) {
    if g.degree().unwrap_or(0) == 0 {
        return;
    }
    let p = g.field().p() as u32;
    let dg = g.derivative();
    if dg.is_zero() {
        squarefree_into(&pth_root(g), mult * p, out);
        return;
    }
    let mut c = g.gcd(&dg);
    let mut w = g.exact_div(&c);
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.exact_div(&y);
        if !z.is_one() {
            out.push((z, i * mult));
        }
        i += 1;
        w = y;
        c = c.exact_div(&w);
    }
    if !c.is_one() {
        squarefree_into(&pth_root(&c), mult * p, out);
    }
}

/// Distinct-degree factorization of a squarefree monic polynomial:
/// `(product of all irreducible factors of degree e, e)`.
pub fn distinct_degree(g: &DensePoly) -> Vec<(DensePoly, usize)> {
    let field = g.field();
    let q = field.size();
    let x = DensePoly::x(field);
    let mut rest = g.monic();
    let mut h = x.rem(&rest).expect("nonzero");
    let mut out = Vec::new();
    let mut e = 1usize;
    while rest.degree().unwrap_or(0) >= 2 * e {
        h = h.powmod(q, &rest);
        let gcd = h.sub(&x).gcd(&rest);
        if !gcd.is_one() {
            rest = rest.exact_div(&gcd);
            h = h.rem(&rest).expect("nonzero");
            out.push((gcd, e));
        }
        e += 1;
    }
    if let Some(dr) = rest.degree() {
        if dr > 0 {
            out.push((rest, dr));
        }
    }
    out
}

fn seed_from(g: &DensePoly) -> u64 {
    // FNV-1a over the coefficient encodings.
    let mut h: u64 = 0xcbf29ce484222325;
    for &c in g.coeffs() {
        for b in c.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

fn random_poly(field: &Field, below: usize, rng: &mut ChaCha8Rng) -> DensePoly {
    let coeffs = (0..below).map(|_| rng.gen_range(0..field.size())).collect();
    DensePoly::new(field, coeffs)
}

/// Splitting polynomial for one Cantor-Zassenhaus round.
fn splitter(a: &DensePoly, g: &DensePoly, e: usize) -> DensePoly {
    let field = g.field();
    let q = field.size();
    if field.p() == 2 {
        // Absolute trace to F_2 of a in F_{q^e}[x]/(g) factors.
        let bits = field.degree() as usize * e;
        let mut t = a.rem(g).expect("nonzero");
        let mut acc = t.clone();
        for _ in 1..bits {
            t = t.mulmod(&t, g);
            acc = acc.add(&t);
        }
        acc
    } else {
        // a^((q^e - 1)/2) = (a^(1 + q + … + q^(e-1)))^((q-1)/2)
        let mut t = a.rem(g).expect("nonzero");
        let mut acc = t.clone();
        for _ in 1..e {
            t = t.powmod(q, g);
            acc = acc.mulmod(&t, g);
        }
        acc.powmod((q - 1) / 2, g).sub(&DensePoly::one(field))
    }
}

/// Splits a squarefree monic product of degree-`e` irreducibles.
pub fn equal_degree(g: &DensePoly, e: usize) -> Vec<DensePoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed_from(g));
    let mut out = Vec::new();
    equal_degree_into(g.monic(), e, &mut rng, &mut out);
    out
}

fn equal_degree_into(g: DensePoly, e: usize, rng: &mut ChaCha8Rng, out: &mut Vec<DensePoly>) {
    let n = g.degree().unwrap_or(0);
    if n == 0 {
        return;
    }
    if n == e {
        out.push(g);
        return;
    }
    loop {
        let a = random_poly(g.field(), n, rng);
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let d = splitter(&a, &g, e).gcd(&g);
        let dd = d.degree().unwrap_or(0);
        if dd > 0 && dd < n {
            let other = g.exact_div(&d);
            equal_degree_into(d, e, rng, out);
            equal_degree_into(other, e, rng, out);
            return;
        }
    }
}

fn sort_factors(v: &mut [(DensePoly, u32)]) {
    v.sort_by(|(a, _), (b, _)| a.degree().cmp(&b.degree()).then_with(|| a.lex_key().cmp(&b.lex_key())));
}

/// Complete factorization into monic irreducibles with multiplicities,
/// ordered by degree then coefficient vector.
pub fn factor_poly(g: &DensePoly) -> Result<Vec<(DensePoly, u32)>> {
    if g.is_zero() {
        return Err(Error::InvalidInput("cannot factor the zero polynomial".into()));
    }
    let mut out = Vec::new();
    for (sqf, mult) in squarefree_decomposition(g) {
        for (part, e) in distinct_degree(&sqf) {
            for irr in equal_degree(&part, e) {
                out.push((irr, mult));
            }
        }
    }
    sort_factors(&mut out);
    Ok(out)
}

/// Roots of `g` in its own coefficient field, with multiplicities, sorted by encoding.
pub fn roots(g: &DensePoly) -> Result<Vec<(u64, u32)>> {
    if g.is_zero() {
        return Err(Error::InvalidInput("zero polynomial has no finite root set".into()));
    }
    let field = g.field();
    let x = DensePoly::x(field);
    let mut out = Vec::new();
    for (sqf, mult) in squarefree_decomposition(g) {
        let split = x.rem(&sqf).expect("nonzero").powmod(field.size(), &sqf).sub(&x).gcd(&sqf);
        if split.degree().unwrap_or(0) == 0 {
            continue;
        }
        for lin in equal_degree(&split, 1) {
            out.push((field.neg(lin.coeff(0)), mult));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// True iff `g` divides `x^Q - x` for `Q` the size of `target`, i.e. `g` is
/// squarefree and splits over the field of size `Q` containing its coefficients.
pub fn splits_squarefree(g: &DensePoly, target_size: u64) -> bool {
    if g.degree().unwrap_or(0) == 0 {
        return true;
    }
    let x = DensePoly::x(g.field());
    let q = g.field().size();
    // x^(q^k) with q^k = target_size
    let mut h = x.rem(g).expect("nonzero");
    let mut reached = 1u64;
    while reached < target_size {
        h = h.powmod(q, g);
        reached = reached.saturating_mul(q);
    }
    reached == target_size && h.sub(&x).rem(g).map(|r| r.is_zero()).unwrap_or(false)
}
