//! Singer cycles and the spectral checks on modules built from them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::digitmap::exponent;
use crate::error::{Error, Result};
use crate::ffield::{factor::is_irreducible, DensePoly, FieldCtx, FieldElement};
use crate::matfq::{eigenpairs_over_extension, Matrix};
use crate::schur::ModuleSpec;

/// A companion matrix over `F_q` of an irreducible degree-d polynomial,
/// together with a primitive root `ω` of that polynomial in `F_{q^d}`.
#[derive(Clone, Debug)]
pub struct SingerElement {
    pub s: Matrix,
    pub omega: u64,
    pub ctx: FieldCtx,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ModelMatch {
    Match,
    Mismatch { details: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SpectrumCheck {
    Simple,
    Repeated { eigenvalue: u64, multiplicity: u32 },
}

/// Minimal polynomial of `x ∈ F_{q^d}` over `F_q`, as a polynomial over
/// `F_q`. Its degree is the size of the Frobenius orbit of `x`.
pub fn minimal_polynomial(ctx: &FieldCtx, x: u64) -> DensePoly {
    let ext = ctx.ext();
    let mut orbit = vec![x];
    let mut y = ctx.frobenius(x, 1);
    while y != x {
        orbit.push(y);
        y = ctx.frobenius(y, 1);
    }
    let lifted = DensePoly::product(
        ext,
        orbit.iter().map(|&r| DensePoly::linear(ext, r)).collect::<Vec<_>>().iter(),
    );
    let coeffs = lifted
        .coeffs()
        .iter()
        .map(|&c| ctx.restrict(c).expect("Frobenius-stable coefficients lie in F_q"))
        .collect();
    DensePoly::new(ctx.base(), coeffs)
}

impl SingerElement {
    /// Checks the invariants on a given matrix and eigenvalue.
    pub fn new(ctx: &FieldCtx, s: Matrix, omega: u64) -> Result<Self> {
        let d = ctx.d() as usize;
        if s.field() != ctx.base() {
            return Err(Error::FieldMismatch);
        }
        if s.rows() != d || s.cols() != d {
            return Err(Error::ShapeMismatch(format!("Singer cycle must be {d}x{d}")));
        }
        let cp = s.char_poly()?;
        if !is_irreducible(&cp) {
            return Err(Error::InvalidInput("characteristic polynomial is reducible".into()));
        }
        if cp.map_field(ctx.ext(), |c| ctx.embed(c)).eval(omega) != 0 {
            return Err(Error::InvalidInput("omega is not an eigenvalue".into()));
        }
        if !ctx.ext().is_primitive(omega) {
            return Err(Error::NotPrimitive);
        }
        Ok(SingerElement { s, omega, ctx: ctx.clone() })
    }

    /// Companion matrix of an irreducible polynomial; `ω` is its smallest
    /// primitive root.
    pub fn from_polynomial(ctx: &FieldCtx, poly: &DensePoly) -> Result<Self> {
        let roots = ctx.roots_in_extension(poly)?;
        let omega = roots
            .iter()
            .map(|r| r.0)
            .find(|&r| ctx.ext().is_primitive(r))
            .ok_or(Error::NotPrimitive)?;
        Self::new(ctx, Matrix::companion(poly)?, omega)
    }

    pub fn omega_element(&self) -> FieldElement {
        self.ctx.ext().element(self.omega).expect("omega in field")
    }

    /// `ℓ_i = ω^(q^(i-1))`, `i = 1..d`.
    pub fn conjugates(&self) -> Vec<u64> {
        (0..self.ctx.d() as i64).map(|i| self.ctx.frobenius(self.omega, i)).collect()
    }
}

/// Seeded search for a primitive `ω`, returning the companion matrix of its
/// minimal polynomial over `F_q`.
pub fn make_singer(ctx: &FieldCtx, seed: u64) -> Result<SingerElement> {
    let ext = ctx.ext();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let w = rng.gen_range(1..ext.size());
        if !ext.is_primitive(w) {
            continue;
        }
        let mp = minimal_polynomial(ctx, w);
        if mp.degree() != Some(ctx.d() as usize) {
            continue;
        }
        return SingerElement::new(ctx, Matrix::companion(&mp)?, w);
    }
}

/// Eigenvalues of `M_W(S)` in `F_{q^d}` with algebraic multiplicities.
pub fn spectrum_on_module(s: &SingerElement, spec: &ModuleSpec) -> Result<Vec<(u64, u32)>> {
    let m = spec.induced_matrix(&s.s)?;
    s.ctx.roots_in_extension(&m.char_poly()?)
}

/// Sorted multiset `{ω^{E(c)}}` over all labels of the module.
pub fn model_multiset(s: &SingerElement, spec: &ModuleSpec) -> Result<Vec<u64>> {
    let n = s.ctx.big_size() - 1;
    let mut v: Vec<u64> = spec
        .patterns()?
        .iter()
        .map(|c| s.ctx.ext().pow(s.omega, exponent(&c.0, s.ctx.q(), n)))
        .collect();
    v.sort_unstable();
    Ok(v)
}

pub fn verify_model_match(s: &SingerElement, spec: &ModuleSpec) -> Result<ModelMatch> {
    let mut observed: Vec<u64> = spectrum_on_module(s, spec)?
        .into_iter()
        .flat_map(|(v, m)| std::iter::repeat_n(v, m as usize))
        .collect();
    observed.sort_unstable();
    let model = model_multiset(s, spec)?;
    if observed == model {
        return Ok(ModelMatch::Match);
    }
    let details = if observed.len() != model.len() {
        format!("{} eigenvalues in F_q^d, model has {}", observed.len(), model.len())
    } else {
        let i = observed.iter().zip(&model).position(|(a, b)| a != b).unwrap_or(0);
        format!("sorted multisets differ at position {i}: {} vs {}", observed[i], model[i])
    };
    Ok(ModelMatch::Mismatch { details })
}

/// `Simple` iff every eigenvalue has algebraic multiplicity 1 and the
/// spectrum accounts for all of `W`. A simple root has a one-dimensional
/// eigenspace, so kernels are only computed for the witness.
pub fn verify_simple_spectrum(s: &SingerElement, spec: &ModuleSpec) -> Result<SpectrumCheck> {
    let spec_dim = spec.dim();
    let spectrum = spectrum_on_module(s, spec)?;
    let total: u64 = spectrum.iter().map(|r| r.1 as u64).sum();
    if let Some(&(v, m)) = spectrum.iter().find(|r| r.1 > 1) {
        return Ok(SpectrumCheck::Repeated { eigenvalue: v, multiplicity: m });
    }
    if total != spec_dim {
        return Err(Error::InvalidInput(format!(
            "spectrum of size {total} does not split over F_q^d (dim W = {spec_dim})"
        )));
    }
    Ok(SpectrumCheck::Simple)
}

/// Eigenspace dimensions of `M_W(S)`, by explicit kernels.
pub fn eigenspace_dims(s: &SingerElement, spec: &ModuleSpec) -> Result<Vec<(u64, u32, usize)>> {
    let m = spec.induced_matrix(&s.s)?;
    Ok(eigenpairs_over_extension(&m, &s.ctx)?
        .into_iter()
        .map(|p| (p.value, p.multiplicity, p.geometric))
        .collect())
}

/// Primes dividing `q^d - 1` but no `q^i - 1` with `i < d`.
pub fn primitive_prime_divisors(q: u64, d: u32) -> Vec<u64> {
    let Some(n) = arith::checked_pow(q, d).map(|v| v - 1) else { return Vec::new() };
    arith::factorize(n)
        .into_iter()
        .map(|(r, _)| r)
        .filter(|&r| (1..d).all(|i| arith::pow_mod(q % r, i as u64, r) != 1))
        .collect()
}

/// The weaker acceptance test: some ppd of `q^d - 1` divides the order of `x`.
pub fn has_ppd_order(ctx: &FieldCtx, x: &FieldElement) -> Result<bool> {
    let ord = crate::ffield::element_order(x)?;
    Ok(primitive_prime_divisors(ctx.q(), ctx.d()).iter().any(|r| ord % r == 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schur::FactorSpec;

    fn reference_singer() -> SingerElement {
        let ctx = FieldCtx::new(7, 1, 3).unwrap();
        let poly = DensePoly::new(ctx.base(), vec![4, 0, 6, 1]);
        SingerElement::from_polynomial(&ctx, &poly).unwrap()
    }

    #[test]
    fn reference_companion_is_a_singer_cycle() {
        let s = reference_singer();
        assert_eq!(s.s.to_rows(), vec![vec![0, 0, 3], vec![1, 0, 0], vec![0, 1, 1]]);
        let f = arith::factorize(342);
        assert_eq!(s.s.order_dividing(342, &f).unwrap(), Some(342));
    }

    #[test]
    fn make_singer_invariants() {
        for (p, f, d) in [(7, 1, 3), (5, 1, 2), (3, 2, 2), (7, 1, 1)] {
            let ctx = FieldCtx::new(p, f, d).unwrap();
            let s = make_singer(&ctx, 1).unwrap();
            let n = ctx.big_size() - 1;
            assert_eq!(s.s.order_dividing(n, &arith::factorize(n)).unwrap(), Some(n));
            let mut conj = s.conjugates();
            conj.sort_unstable();
            let mut eig: Vec<u64> =
                ctx.roots_in_extension(&s.s.char_poly().unwrap()).unwrap().iter().map(|r| r.0).collect();
            eig.sort_unstable();
            assert_eq!(conj, eig);
        }
    }

    #[test]
    fn sym_spectra() {
        let s = reference_singer();
        for (k, n) in [(2, 6), (3, 10)] {
            let spec = ModuleSpec::new(3, 7, vec![FactorSpec::sym(k, 0)]);
            let sp = spectrum_on_module(&s, &spec).unwrap();
            assert_eq!(sp.len(), n);
            assert!(sp.iter().all(|r| r.1 == 1));
            assert_eq!(verify_model_match(&s, &spec).unwrap(), ModelMatch::Match);
            assert_eq!(verify_simple_spectrum(&s, &spec).unwrap(), SpectrumCheck::Simple);
        }
    }

    #[test]
    fn tensor_square_repeats() {
        let s = reference_singer();
        let spec = ModuleSpec::new(3, 7, vec![FactorSpec::nat(0), FactorSpec::nat(0)]);
        assert!(matches!(
            verify_simple_spectrum(&s, &spec).unwrap(),
            SpectrumCheck::Repeated { multiplicity: 2, .. }
        ));
        let trivial = ModuleSpec::new(3, 7, vec![]);
        assert_eq!(verify_simple_spectrum(&s, &trivial).unwrap(), SpectrumCheck::Simple);
    }

    #[test]
    fn ppd_examples() {
        // 7^3 - 1 = 2 * 3^2 * 19; 19 is the only ppd
        assert_eq!(primitive_prime_divisors(7, 3), vec![19]);
        let s = reference_singer();
        assert!(has_ppd_order(&s.ctx, &s.omega_element()).unwrap());
    }
}
