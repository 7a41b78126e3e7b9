use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::extract::reconstruct_generator;
use super::gauge::Eigenbasis;
use super::random::{evaluate_word, random_word};
use super::RewriteConfig;
use crate::error::{Error, FailureKind, Result};
use crate::ffield::FieldCtx;
use crate::matfq::Matrix;
use crate::schur::ModuleSpec;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ProjectiveVerdict {
    /// `induced(phi(x)) = μ_x · C M_W(x) C^{-1}` for every generator.
    Verified { scalars: Vec<u64> },
    Rejected { witness: String },
}

impl ProjectiveVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, ProjectiveVerdict::Verified { .. })
    }
}

/// Offset mixed into the seed so word checks do not replay the sampler.
const WORD_SEED_SALT: u64 = 0x5ee_d0f7_09d5;

pub(crate) fn verify_with_basis(
    phi: &[Matrix],
    generators: &[Matrix],
    basis: &Eigenbasis,
    spec: &ModuleSpec,
    ctx: &FieldCtx,
    cfg: &RewriteConfig,
) -> Result<ProjectiveVerdict> {
    if phi.len() != generators.len() {
        return Ok(ProjectiveVerdict::Rejected {
            witness: format!("{} images for {} generators", phi.len(), generators.len()),
        });
    }
    let mut scalars = Vec::with_capacity(phi.len());
    for (x, (p, g)) in phi.iter().zip(generators).enumerate() {
        if p.field() != ctx.ext() || p.rows() != spec.d || p.cols() != spec.d {
            return Ok(ProjectiveVerdict::Rejected {
                witness: format!("generator {x}: image is not a {}x{} matrix over F_q^d", spec.d, spec.d),
            });
        }
        if p.det()? == 0 {
            return Ok(ProjectiveVerdict::Rejected {
                witness: format!("generator {x}: image is singular"),
            });
        }
        let mhat = basis.conjugate(g, ctx)?;
        let ind = spec.induced_matrix(p)?;
        match ind.proportional_to(&mhat) {
            Some(mu) => scalars.push(mu),
            None => {
                let entry = mhat
                    .data()
                    .iter()
                    .position(|&v| v != 0)
                    .and_then(|i| ctx.ext().div(ind.data()[i], mhat.data()[i]))
                    .and_then(|mu| ind.first_mismatch(&mhat, mu));
                let witness = match entry {
                    Some((r, c)) => format!("generator {x}: entry ({r}, {c}) breaks proportionality"),
                    None => format!("generator {x}: not proportional"),
                };
                return Ok(ProjectiveVerdict::Rejected { witness });
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed ^ WORD_SEED_SALT);
    for _ in 0..cfg.verification_words {
        let word = random_word(generators.len(), cfg.word_length_range, &mut rng);
        let mhat = basis.conjugate(&evaluate_word(&word, generators)?, ctx)?;
        let product = evaluate_word(&word, phi)?;
        let agrees = match reconstruct_generator(&mhat, spec, ctx) {
            Ok(direct) => direct.proportional_to(&product).is_some(),
            Err(Error::Failure(FailureKind::DegenerateEntries)) => {
                spec.induced_matrix(&product)?.proportional_to(&mhat).is_some()
            }
            Err(e) => return Err(e),
        };
        if !agrees {
            return Ok(ProjectiveVerdict::Rejected {
                witness: format!("word {word:?} is not mapped to the product of images"),
            });
        }
    }
    Ok(ProjectiveVerdict::Verified { scalars })
}

/// Replays the certificate from an eigenbasis matrix `c` (rows in label order).
pub fn verify_projective(
    phi: &[Matrix],
    generators: &[Matrix],
    c: &Matrix,
    spec: &ModuleSpec,
    cfg: &RewriteConfig,
) -> Result<ProjectiveVerdict> {
    let ctx = FieldCtx::for_q(spec.q, spec.d as u32)?;
    let c_inv = match c.inverse() {
        Ok(m) => m,
        Err(Error::SingularMatrix) => {
            return Ok(ProjectiveVerdict::Rejected { witness: "eigenbasis is singular".into() })
        }
        Err(e) => return Err(e),
    };
    let basis = Eigenbasis { c: c.clone(), c_inv, eigenvalues: Vec::new() };
    verify_with_basis(phi, generators, &basis, spec, &ctx, cfg)
}
