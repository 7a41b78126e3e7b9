//! Las Vegas rewriting: from generators acting on W back to `PGL_d`.
//!
//! Steps: find an element with a Singer-type spectrum on W, label its
//! eigenvalues through a recovered primitive `ω`, build a weight basis with
//! torus-compatible scaling, read each generator off its matrix in that
//! basis, and certify the answer before returning it.

mod extract;
mod gauge;
mod omega;
mod random;
mod verify;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use extract::reconstruct_generator;
pub use gauge::{eigenbasis_unscaled, fix_gauge, Eigenbasis};
pub use omega::{omega_candidates, recover_omega, OmegaCandidate};
pub use random::{evaluate_word, random_element, random_word, ProductReplacement};
pub use verify::{verify_projective, ProjectiveVerdict};

use crate::error::{Error, FailureKind, Result};
use crate::ffield::{factor::splits_squarefree, FieldCtx};
use crate::matfq::Matrix;
use crate::schur::{BasisLabel, ModuleSpec, MultiplicityCheck};

/// Attempts at the two-step reconstruction `phi(x) = phi(xy) phi(y)^{-1}`.
pub const PIVOT_RETRIES: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct RewriteConfig {
    pub epsilon: f64,
    pub max_element_trials: u32,
    pub rng_seed: u64,
    pub word_length_range: (usize, usize),
    pub verification_words: usize,
}

impl RewriteConfig {
    pub const DEFAULT_EPSILON: f64 = 1.0 / 1024.0;

    pub fn new(seed: u64) -> Self {
        Self::with_epsilon(seed, Self::DEFAULT_EPSILON).expect("default epsilon is valid")
    }

    /// `max_element_trials = ceil(log2(1/ε)) · 8`.
    pub fn with_epsilon(seed: u64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidInput(format!("epsilon {epsilon} not in (0, 1)")));
        }
        let trials = ((1.0 / epsilon).log2().ceil() as u32).max(1) * 8;
        Ok(RewriteConfig {
            epsilon,
            max_element_trials: trials,
            rng_seed: seed,
            word_length_range: (2, 16),
            verification_words: 20,
        })
    }
}

impl Default for RewriteConfig {
    fn default() -> Self {
        Self::new(0)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteStats {
    pub elements_sampled: u64,
    /// Not tracked.
    pub field_ops: Option<u64>,
    pub dlog_calls: u64,
    pub retries: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Clone, Debug)]
pub struct RewriteResult {
    /// Image of each input generator, over `F_{q^d}`, first nonzero entry 1.
    pub phi: Vec<Matrix>,
    /// Rows are the (rescaled) eigenvectors in label order.
    pub eigenbasis: Matrix,
    pub labels: Vec<BasisLabel>,
    /// Eigenvalue of the accepted element on each row.
    pub eigenvalues: Vec<u64>,
    pub omega: u64,
    pub scalars: Vec<u64>,
    pub stats: RewriteStats,
}

fn check_inputs(generators: &[Matrix], spec: &ModuleSpec, ctx: &FieldCtx) -> Result<()> {
    spec.require_valid()?;
    if let MultiplicityCheck::Repeated { pattern, count } = spec.check_multiplicity_free()? {
        return Err(Error::ConstraintViolation(vec![format!(
            "W is not multiplicity-free: weight {pattern} occurs {count} times"
        )]));
    }
    if spec.d > 1 && spec.main_factor().is_none() {
        return Err(Error::ConstraintViolation(vec![
            "W is one-dimensional; the natural module cannot be recovered".into(),
        ]));
    }
    if generators.is_empty() {
        return Err(Error::InvalidInput("no generators".into()));
    }
    let dim = spec.dim() as usize;
    for (i, g) in generators.iter().enumerate() {
        if g.field() != ctx.base() {
            return Err(Error::FieldMismatch);
        }
        if g.rows() != dim || g.cols() != dim {
            return Err(Error::ShapeMismatch(format!("generator {i} is not {dim}x{dim}")));
        }
        if g.det()? == 0 {
            return Err(Error::InvalidInput(format!("generator {i} is singular")));
        }
    }
    Ok(())
}

struct Run<'a> {
    generators: &'a [Matrix],
    spec: &'a ModuleSpec,
    ctx: FieldCtx,
    cfg: &'a RewriteConfig,
    rng: ChaCha8Rng,
    sampler: ProductReplacement,
    stats: RewriteStats,
}

impl Run<'_> {
    fn sample(&mut self) -> Matrix {
        self.sampler.next_element(&mut self.rng)
    }

    /// `phi(x)` from `C M_W(x) C^{-1}`, falling back to `x·y` for sampled `y`
    /// when an entry needed for extraction vanishes.
    fn reconstruct(&mut self, basis: &Eigenbasis, x: &Matrix) -> Result<Matrix> {
        let mhat = basis.conjugate(x, &self.ctx)?;
        match reconstruct_generator(&mhat, self.spec, &self.ctx) {
            Err(Error::Failure(FailureKind::DegenerateEntries)) => {}
            other => return other,
        }
        for _ in 0..PIVOT_RETRIES {
            let y = self.sample();
            let my = basis.conjugate(&y, &self.ctx)?;
            let Ok(phi_y) = reconstruct_generator(&my, self.spec, &self.ctx) else { continue };
            let Ok(phi_xy) = reconstruct_generator(&mhat.mul(&my)?, self.spec, &self.ctx) else {
                continue;
            };
            return Ok(phi_xy.mul(&phi_y.inverse()?)?.normalized());
        }
        Err(Error::Failure(FailureKind::DegenerateEntries))
    }

    fn attempt(&mut self, s_w: &Matrix) -> Result<RewriteResult> {
        let cp = s_w.char_poly()?;
        if !splits_squarefree(&cp, self.ctx.big_size()) {
            return Err(Error::Failure(FailureKind::NotSingerSpectrum));
        }
        let roots: Vec<u64> =
            self.ctx.roots_in_extension(&cp)?.into_iter().map(|r| r.0).collect();
        let candidates =
            omega_candidates(&roots, self.spec, &self.ctx, &mut self.stats.dlog_calls)?;
        let labels = self.spec.basis_labels()?;
        let mut last = Error::Failure(FailureKind::NotSingerSpectrum);
        for cand in candidates {
            let eigenvalues: Vec<u64> = cand.labeling.iter().map(|&i| roots[i]).collect();
            let mut basis = eigenbasis_unscaled(s_w, &eigenvalues, &self.ctx)?;
            let gauge = {
                let (sampler, rng) = (&mut self.sampler, &mut self.rng);
                fix_gauge(&mut basis, self.spec, &self.ctx, &mut || sampler.next_element(rng))
            };
            if let Err(e) = gauge {
                last = e;
                continue;
            }
            let mut phi = Vec::with_capacity(self.generators.len());
            let mut failed = None;
            for g in self.generators {
                match self.reconstruct(&basis, g) {
                    Ok(p) => phi.push(p),
                    Err(e) => {
                        failed = Some(e);
                        break;
                    }
                }
            }
            if let Some(e) = failed {
                last = e;
                continue;
            }
            match verify::verify_with_basis(
                &phi,
                self.generators,
                &basis,
                self.spec,
                &self.ctx,
                self.cfg,
            )? {
                ProjectiveVerdict::Verified { scalars } => {
                    return Ok(RewriteResult {
                        phi,
                        eigenbasis: basis.c,
                        labels,
                        eigenvalues,
                        omega: cand.omega,
                        scalars,
                        stats: self.stats.clone(),
                    });
                }
                ProjectiveVerdict::Rejected { .. } => {
                    last = Error::Failure(FailureKind::NotSingerSpectrum);
                }
            }
        }
        Err(last)
    }
}

fn trivial_result(generators: &[Matrix], spec: &ModuleSpec, ctx: &FieldCtx) -> Result<RewriteResult> {
    let ext = ctx.ext();
    let labels = spec.basis_labels()?;
    let eigenbasis = Matrix::identity(ext, 1);
    let phi = vec![Matrix::identity(ext, 1); generators.len()];
    let scalars = generators
        .iter()
        .map(|g| ext.inv(ctx.embed(g.get(0, 0))).expect("invertible generator"))
        .collect();
    Ok(RewriteResult {
        phi,
        eigenbasis,
        labels,
        eigenvalues: vec![1],
        omega: ext.generator(),
        scalars,
        stats: RewriteStats::default(),
    })
}

/// Runs the pipeline until a verified answer is found or the element
/// budget is spent. Never returns an unverified result.
pub fn rewrite(generators: &[Matrix], spec: &ModuleSpec, cfg: &RewriteConfig) -> Result<RewriteResult> {
    let start = Instant::now();
    let ctx = FieldCtx::for_q(spec.q, spec.d as u32)?;
    check_inputs(generators, spec, &ctx)?;
    if spec.d == 1 {
        let mut r = trivial_result(generators, spec, &ctx)?;
        r.stats.wall_time = start.elapsed();
        return Ok(r);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let sampler = ProductReplacement::new(generators, &mut rng)?;
    let mut run = Run {
        generators,
        spec,
        ctx,
        cfg,
        rng,
        sampler,
        stats: RewriteStats::default(),
    };
    for trial in 0..cfg.max_element_trials as usize {
        // the generators themselves are tried before random elements
        let s_w = if trial < generators.len() { generators[trial].clone() } else { run.sample() };
        run.stats.elements_sampled += 1;
        match run.attempt(&s_w) {
            Ok(mut r) => {
                r.stats.wall_time = start.elapsed();
                return Ok(r);
            }
            Err(Error::Failure(_)) | Err(Error::SingularMatrix) => run.stats.retries += 1,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Failure(FailureKind::BudgetExhausted))
}
