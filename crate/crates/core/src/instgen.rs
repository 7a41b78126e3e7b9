//! Planted instances: a known natural representation pushed through the
//! functor and hidden behind a random change of basis on W.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{factor::roots, DensePoly, Field, FieldCtx};
use crate::matfq::Matrix;
use crate::rewrite::RewriteResult;
use crate::schur::{ModuleSpec, MultiplicityCheck};
use crate::singer::make_singer;

/// The oracle side of an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hidden {
    pub a: Vec<Matrix>,
    pub t: Matrix,
    /// `ω` of the planted Singer cycle `a[0]`, when one was planted.
    pub singer_omega: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlantedInstance {
    pub spec: ModuleSpec,
    pub public_generators: Vec<Matrix>,
    pub hidden: Option<Hidden>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OracleVerdict {
    Consistent,
    Inconsistent { witness: String },
}

impl OracleVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, OracleVerdict::Consistent)
    }
}

/// Cap on the number of determinant-root combinations tried.
const MAX_SCALAR_COMBINATIONS: usize = 4096;

pub fn gen_instance(
    spec: &ModuleSpec,
    n_generators: usize,
    plant_singer: bool,
    seed: u64,
) -> Result<PlantedInstance> {
    spec.require_valid()?;
    if let MultiplicityCheck::Repeated { pattern, count } = spec.check_multiplicity_free()? {
        return Err(Error::ConstraintViolation(vec![format!(
            "W is not multiplicity-free: weight {pattern} occurs {count} times"
        )]));
    }
    gen_instance_unchecked(spec, n_generators, plant_singer, seed)
}

/// Same as [`gen_instance`] without the module checks, for negative tests.
pub fn gen_instance_unchecked(
    spec: &ModuleSpec,
    n_generators: usize,
    plant_singer: bool,
    seed: u64,
) -> Result<PlantedInstance> {
    if n_generators == 0 {
        return Err(Error::ConstraintViolation(vec!["need at least one generator".into()]));
    }
    let ctx = FieldCtx::for_q(spec.q, spec.d as u32)?;
    let base = ctx.base();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = Vec::with_capacity(n_generators);
    let mut singer_omega = None;
    if plant_singer {
        let s = make_singer(&ctx, rng.gen())?;
        singer_omega = Some(s.omega);
        a.push(s.s);
    }
    while a.len() < n_generators {
        a.push(Matrix::random_invertible(base, spec.d, &mut rng));
    }
    let t = Matrix::random_invertible(base, spec.dim() as usize, &mut rng);
    let t_inv = t.inverse()?;
    let public_generators = a
        .iter()
        .map(|ax| t.mul(&spec.induced_matrix(ax)?)?.mul(&t_inv))
        .collect::<Result<_>>()?;
    Ok(PlantedInstance {
        spec: spec.clone(),
        public_generators,
        hidden: Some(Hidden { a, t, singer_omega }),
        seed,
    })
}

/// d-th roots of `delta` in `F_{q^d}`.
fn dth_roots(ctx: &FieldCtx, delta: u64) -> Result<Vec<u64>> {
    let ext = ctx.ext();
    let d = ctx.d() as usize;
    let mut coeffs = vec![0u64; d + 1];
    coeffs[0] = ext.neg(delta);
    coeffs[d] = 1;
    Ok(roots(&DensePoly::new(ext, coeffs))?.into_iter().map(|r| r.0).collect())
}

/// Kernel of `phi_x B - ν_x B A_x = 0` over all generators, in `B`.
fn intertwiners(phi: &[Matrix], a: &[Matrix], nu: &[u64], ctx: &FieldCtx) -> Result<Vec<Vec<u64>>> {
    let ext = ctx.ext();
    let d = ctx.d() as usize;
    let mut sys = Matrix::zeros(ext, phi.len() * d * d, d * d);
    for (x, (p, ax)) in phi.iter().zip(a).enumerate() {
        let ax = ax.lift(ctx)?;
        for i in 0..d {
            for j in 0..d {
                let row = x * d * d + i * d + j;
                for k in 0..d {
                    // (phi B)_{ij} = Σ_k phi_ik B_kj
                    let c = k * d + j;
                    sys.set(row, c, ext.add(sys.get(row, c), p.get(i, k)));
                    // (B A)_{ij} = Σ_k B_ik A_kj
                    let c = i * d + k;
                    let v = ext.mul(nu[x], ax.get(k, j));
                    sys.set(row, c, ext.sub(sys.get(row, c), v));
                }
            }
        }
    }
    Ok(sys.kernel_basis())
}

/// Random combinations tried when the intertwiner space has dimension > 1.
const INTERTWINER_SAMPLES: usize = 32;

/// Whether the span of `ker` (vectors of `d x d` matrices) contains an
/// invertible matrix. With several basis vectors (an abelian or otherwise
/// non-absolutely-irreducible hidden group) random combinations are tried.
fn has_invertible(ker: &[Vec<u64>], d: usize, f: &Field, rng: &mut ChaCha8Rng) -> Result<bool> {
    match ker.len() {
        0 => Ok(false),
        1 => Ok(Matrix::from_vec(f, d, d, ker[0].clone())?.det()? != 0),
        _ => {
            for _ in 0..INTERTWINER_SAMPLES {
                let mut v = vec![0u64; d * d];
                for k in ker {
                    let c = rng.gen_range(0..f.size());
                    for (x, &y) in v.iter_mut().zip(k) {
                        *x = f.add(*x, f.mul(c, y));
                    }
                }
                if Matrix::from_vec(f, d, d, v)?.det()? != 0 {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// Is there one `B` with `phi(x) = ν_x · B A_x B^{-1}` for every generator?
pub fn oracle_check(result: &RewriteResult, instance: &PlantedInstance) -> Result<OracleVerdict> {
    let hidden = instance
        .hidden
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("instance carries no oracle block".into()))?;
    let spec = &instance.spec;
    if result.phi.len() != hidden.a.len() {
        return Ok(OracleVerdict::Inconsistent {
            witness: format!("{} images for {} generators", result.phi.len(), hidden.a.len()),
        });
    }
    if spec.d == 1 {
        return Ok(OracleVerdict::Consistent);
    }
    let ctx = FieldCtx::for_q(spec.q, spec.d as u32)?;
    let ext = ctx.ext();
    let mut choices = Vec::with_capacity(hidden.a.len());
    for (x, (p, ax)) in result.phi.iter().zip(&hidden.a).enumerate() {
        if p.field() != ext || p.rows() != spec.d || p.cols() != spec.d {
            return Ok(OracleVerdict::Inconsistent {
                witness: format!("generator {x}: image has the wrong shape or field"),
            });
        }
        let delta = ext.div(p.det()?, ctx.embed(ax.det()?)).unwrap_or(0);
        let r = if delta == 0 { Vec::new() } else { dth_roots(&ctx, delta)? };
        if r.is_empty() {
            return Ok(OracleVerdict::Inconsistent {
                witness: format!("generator {x}: det ratio has no d-th root"),
            });
        }
        choices.push(r);
    }
    let total: usize = choices.iter().map(Vec::len).product();
    if total > MAX_SCALAR_COMBINATIONS {
        return Err(Error::CapacityExceeded(format!("{total} scalar combinations")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(instance.seed);
    let mut idx = vec![0usize; choices.len()];
    for _ in 0..total {
        let nu: Vec<u64> = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
        let ker = intertwiners(&result.phi, &hidden.a, &nu, &ctx)?;
        if has_invertible(&ker, spec.d, ext, &mut rng)? {
            return Ok(OracleVerdict::Consistent);
        }
        for (i, c) in idx.iter_mut().zip(&choices) {
            *i += 1;
            if *i < c.len() {
                break;
            }
            *i = 0;
        }
    }
    Ok(OracleVerdict::Inconsistent {
        witness: "no invertible intertwiner for any choice of scalars".into(),
    })
}
