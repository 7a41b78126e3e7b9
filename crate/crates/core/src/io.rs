//! JSON forms of instances and rewrite results. Field elements are the
//! integers `Σ c_i p^i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{Field, FieldCtx};
use crate::instgen::{Hidden, PlantedInstance};
use crate::matfq::Matrix;
use crate::rewrite::{RewriteResult, RewriteStats};
use crate::schur::{BasisLabel, ModuleSpec};

pub type RawMatrix = Vec<Vec<u64>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleFile {
    #[serde(rename = "A")]
    pub a: Vec<RawMatrix>,
    #[serde(rename = "T")]
    pub t: RawMatrix,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub singer_omega: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub p: u64,
    pub f: u32,
    pub d: usize,
    pub spec: ModuleSpec,
    pub generators: Vec<RawMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultFile {
    pub spec: ModuleSpec,
    pub omega: u64,
    pub phi: Vec<RawMatrix>,
    pub eigenbasis: RawMatrix,
    pub labels: Vec<BasisLabel>,
    pub eigenvalues: Vec<u64>,
    pub scalars: Vec<u64>,
    pub stats: RewriteStats,
}

fn raw(m: &Matrix) -> RawMatrix {
    m.to_rows()
}

fn parse_matrix(field: &Field, rows: &RawMatrix, what: &str) -> Result<Matrix> {
    Matrix::from_rows(field, rows).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

impl InstanceFile {
    pub fn from_instance(inst: &PlantedInstance) -> Result<Self> {
        let ctx = FieldCtx::for_q(inst.spec.q, inst.spec.d as u32)?;
        Ok(InstanceFile {
            p: ctx.p(),
            f: ctx.f(),
            d: inst.spec.d,
            spec: inst.spec.clone(),
            generators: inst.public_generators.iter().map(raw).collect(),
            oracle: inst.hidden.as_ref().map(|h| OracleFile {
                a: h.a.iter().map(raw).collect(),
                t: raw(&h.t),
                seed: inst.seed,
                singer_omega: h.singer_omega,
            }),
        })
    }

    pub fn to_instance(&self) -> Result<PlantedInstance> {
        let ctx = FieldCtx::new(self.p, self.f, self.d as u32)?;
        if ctx.q() != self.spec.q || self.d != self.spec.d {
            return Err(Error::Parse(format!(
                "header p={} f={} d={} disagrees with spec '{}'",
                self.p, self.f, self.d, self.spec
            )));
        }
        let base = ctx.base();
        let public_generators = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| parse_matrix(base, g, &format!("generators[{i}]")))
            .collect::<Result<_>>()?;
        let hidden = self
            .oracle
            .as_ref()
            .map(|o| -> Result<Hidden> {
                Ok(Hidden {
                    a: o.a
                        .iter()
                        .enumerate()
                        .map(|(i, a)| parse_matrix(base, a, &format!("oracle.A[{i}]")))
                        .collect::<Result<_>>()?,
                    t: parse_matrix(base, &o.t, "oracle.T")?,
                    singer_omega: o.singer_omega,
                })
            })
            .transpose()?;
        Ok(PlantedInstance {
            spec: self.spec.clone(),
            public_generators,
            hidden,
            seed: self.oracle.as_ref().map_or(0, |o| o.seed),
        })
    }

    /// Drops the oracle block.
    pub fn public(&self) -> Self {
        InstanceFile { oracle: None, ..self.clone() }
    }
}

impl ResultFile {
    pub fn from_result(spec: &ModuleSpec, r: &RewriteResult) -> Self {
        ResultFile {
            spec: spec.clone(),
            omega: r.omega,
            phi: r.phi.iter().map(raw).collect(),
            eigenbasis: raw(&r.eigenbasis),
            labels: r.labels.clone(),
            eigenvalues: r.eigenvalues.clone(),
            scalars: r.scalars.clone(),
            stats: r.stats.clone(),
        }
    }

    pub fn to_result(&self) -> Result<RewriteResult> {
        let ctx = FieldCtx::for_q(self.spec.q, self.spec.d as u32)?;
        let ext = ctx.ext();
        Ok(RewriteResult {
            phi: self
                .phi
                .iter()
                .enumerate()
                .map(|(i, m)| parse_matrix(ext, m, &format!("phi[{i}]")))
                .collect::<Result<_>>()?,
            eigenbasis: parse_matrix(ext, &self.eigenbasis, "eigenbasis")?,
            labels: self.labels.clone(),
            eigenvalues: self.eigenvalues.clone(),
            omega: self.omega,
            scalars: self.scalars.clone(),
            stats: self.stats.clone(),
        })
    }
}
