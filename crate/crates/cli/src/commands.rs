use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_bigint::BigUint;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use singer_core::digitmap::{
    base_q_expansion, check_injectivity as check_box, check_injectivity_sumK, enumerate_patterns,
    exponent_and_digits, group_order, pattern_count, DigitVector, ExponentMap, Injectivity,
};
use singer_core::instgen::{self, oracle_check};
use singer_core::io::{InstanceFile, ResultFile};
use singer_core::rewrite::{self as rw, recover_omega, verify_projective, RewriteConfig};
use singer_core::schur::{parse_factors, MultiplicityCheck};
use singer_core::singer::{
    eigenspace_dims, make_singer, model_multiset, spectrum_on_module, verify_model_match,
    verify_simple_spectrum, ModelMatch, SpectrumCheck,
};
use singer_core::ffield::MAX_FIELD_SIZE;
use singer_core::{Error, FailureKind, FieldCtx, ModuleSpec};

pub struct Report {
    pub text: String,
    pub json: Value,
    pub code: u8,
    /// Extra lines for `--verbose`, on stderr.
    pub notes: Vec<String>,
}

#[derive(Debug)]
pub struct CmdError {
    pub message: String,
    pub code: u8,
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Failure(FailureKind::BudgetExhausted) => 3,
            _ => 1,
        };
        CmdError { message: e.to_string(), code }
    }
}

fn usage(message: impl Into<String>) -> CmdError {
    CmdError { message: message.into(), code: 1 }
}

fn tuple(v: &[u64]) -> String {
    let parts: Vec<String> = v.iter().map(u64::to_string).collect();
    format!("({})", parts.join(", "))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CmdError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CmdError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

pub fn check_injectivity(q: u64, d: usize, c: u64, sum_k: bool) -> Result<Report, CmdError> {
    let result = if sum_k { check_injectivity_sumK(q, d, c)? } else { check_box(q, d, c)? };
    let (domain, triple) = if sum_k {
        (format!("patterns with sum(c) = {c}"), format!("(q,d,K) = ({q},{d},{c})"))
    } else {
        (format!("B_{c}"), format!("(q,d,C) = ({q},{d},{c})"))
    };
    let mut text = String::new();
    let code = match &result {
        Injectivity::Injective { count } => {
            writeln!(text, "Phi is injective on {domain} for {triple}.").unwrap();
            writeln!(text, "Checked {count} vectors.").unwrap();
            0
        }
        Injectivity::Collision { first, second, residue } => {
            writeln!(text, "Phi is NOT injective on {domain} for {triple}.").unwrap();
            writeln!(
                text,
                "Collision: {} and {} both map to {residue} mod q^d - 1.",
                tuple(&first.0),
                tuple(&second.0)
            )
            .unwrap();
            2
        }
    };
    let json = json!({
        "command": "check-injectivity",
        "q": q,
        "d": d,
        "bound": c,
        "mode": if sum_k { "sum" } else { "box" },
        "result": result,
    });
    Ok(Report { text, json, code, notes: Vec::new() })
}

/// Rows are only listed up to this many patterns.
const MAX_PATTERNS: u128 = 1_000_000;

pub fn model_spectrum(q: u64, d: usize, k: u64, omega: &str) -> Result<Report, CmdError> {
    if d == 0 {
        return Err(usage("d must be at least 1"));
    }
    let count = pattern_count(d, k);
    if count > MAX_PATTERNS {
        return Err(usage(format!("{count} patterns exceed the listing limit {MAX_PATTERNS}")));
    }
    let map = ExponentMap::new(q, d);
    let patterns: Vec<DigitVector> = enumerate_patterns(d, k).collect();
    let exps: Vec<BigUint> = patterns.iter().map(|c| map.eval(c)).collect();

    let mut notes = Vec::new();
    let order = group_order(q, d);
    let ctx = match u64::try_from(&order) {
        Ok(n) if n < MAX_FIELD_SIZE => Some(FieldCtx::for_q(q, d as u32)?),
        _ => {
            notes.push(format!("F_{{{q}^{d}}} is too large to materialize; listing exponents only"));
            None
        }
    };
    let omega_value = match (&ctx, omega) {
        (None, _) => None,
        (Some(ctx), "auto") => Some(ctx.ext().generator()),
        (Some(ctx), s) => {
            let w: u64 = s.parse().map_err(|_| usage(format!("--omega: '{s}' is not 'auto' or an integer")))?;
            if !ctx.ext().contains(w) || !ctx.ext().is_primitive(w) {
                return Err(usage(format!("--omega {w} is not a primitive element of F_{{{q}^{d}}}")));
            }
            Some(w)
        }
    };
    let eigenvalues: Option<Vec<u64>> = ctx.as_ref().zip(omega_value).map(|(ctx, w)| {
        exps.iter()
            .map(|e| ctx.ext().pow(w, u64::try_from(e).expect("fits the field")))
            .collect()
    });

    // first repeated value, by eigenvalue when materialized, by exponent otherwise
    let keys: Vec<String> = match &eigenvalues {
        Some(ev) => ev.iter().map(u64::to_string).collect(),
        None => exps.iter().map(BigUint::to_string).collect(),
    };
    let mut seen = std::collections::HashMap::new();
    let mut collision = None;
    for (i, key) in keys.iter().enumerate() {
        if let Some(&j) = seen.get(key) {
            collision = Some((j, i));
            break;
        }
        seen.insert(key.clone(), i);
    }

    let mut text = String::new();
    writeln!(text, "Number of weight patterns c with sum(c) = {k}: {}", patterns.len()).unwrap();
    if eigenvalues.is_none() {
        writeln!(text, "Field too large for eigenvalues; exponent-only mode.").unwrap();
    }
    let width = patterns.first().map_or(0, |c| tuple(&c.0).len()) + 2;
    match &eigenvalues {
        Some(_) => writeln!(text, "{:<width$}{:<14}eigenvalue", "c", "E").unwrap(),
        None => writeln!(text, "{:<width$}E", "c").unwrap(),
    }
    for (i, c) in patterns.iter().enumerate() {
        match &eigenvalues {
            Some(ev) => writeln!(text, "{:<width$}{:<14}{}", tuple(&c.0), exps[i].to_string(), ev[i]).unwrap(),
            None => writeln!(text, "{:<width$}{}", tuple(&c.0), exps[i]).unwrap(),
        }
    }
    let what = if eigenvalues.is_some() { "eigenvalues" } else { "exponents" };
    match collision {
        None if k + 1 < q => {
            writeln!(text, "Distinct weight patterns c give distinct {what} (as expected).").unwrap()
        }
        None => writeln!(text, "Distinct weight patterns c give distinct {what}.").unwrap(),
        Some((a, b)) => writeln!(
            text,
            "Weight patterns {} and {} give the same {}.",
            tuple(&patterns[a].0),
            tuple(&patterns[b].0),
            &what[..what.len() - 1]
        )
        .unwrap(),
    }
    // c = (0,…,0,K) is the first pattern
    let example = patterns.first().map(|c| {
        let digits = base_q_expansion(&exps[0], q, d).expect("E < q^d - 1");
        (c.clone(), exps[0].clone(), digits)
    });
    if let Some((c, e, digits)) = &example {
        writeln!(text, "Example weight pattern c = {},", tuple(&c.0)).unwrap();
        writeln!(text, "Exponent E = {e},    Base-q digits = {:?}.", digits.0).unwrap();
    }

    let rows: Vec<Value> = patterns
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut row = json!({ "c": c.0, "E": exps[i].to_string() });
            if let Some(ev) = &eigenvalues {
                row["eigenvalue"] = json!(ev[i]);
            }
            row
        })
        .collect();
    let json = json!({
        "command": "model-spectrum",
        "q": q,
        "d": d,
        "K": k,
        "mode": what,
        "omega": omega_value,
        "count": patterns.len(),
        "distinct": collision.is_none(),
        "collision": collision.map(|(a, b)| json!([patterns[a].0, patterns[b].0])),
        "rows": rows,
        "example": example.map(|(c, e, digits)| json!({ "c": c.0, "E": e.to_string(), "digits": digits.0 })),
    });
    Ok(Report { text, json, code: if collision.is_some() { 2 } else { 0 }, notes })
}

/// `--spec` accepts a bare factor list or a full module string.
fn demo_spec(q: u64, d: usize, spec: &str) -> Result<ModuleSpec, CmdError> {
    if spec.contains("factors=") {
        let m: ModuleSpec = spec.parse()?;
        if m.q != q || m.d != d {
            return Err(usage(format!("--spec '{spec}' disagrees with --q {q} --d {d}")));
        }
        return Ok(m);
    }
    let f = spec.trim().trim_start_matches('[').trim_end_matches(']');
    Ok(ModuleSpec::new(d, q, parse_factors(f)?))
}

/// Eigenspaces are computed explicitly up to this module dimension.
const MAX_KERNEL_DIM: u64 = 64;

pub fn singer_demo(q: u64, d: usize, spec: &str, seed: u64) -> Result<Report, CmdError> {
    let spec = demo_spec(q, d, spec)?;
    spec.require_valid()?;
    let ctx = FieldCtx::for_q(q, d as u32)?;
    let s = make_singer(&ctx, seed)?;
    let labels = spec.basis_labels()?;
    let spectrum = spectrum_on_module(&s, &spec)?;
    let with_mult: u64 = spectrum.iter().map(|r| r.1 as u64).sum();
    let mult_free = spec.check_multiplicity_free()?;
    let simple = verify_simple_spectrum(&s, &spec)?;
    let model_match = verify_model_match(&s, &spec)?;
    let model = model_multiset(&s, &spec)?;
    let model_distinct = {
        let mut m = model.clone();
        m.dedup();
        m.len()
    };
    let eigenspaces_one = if spec.dim() <= MAX_KERNEL_DIM {
        Some(eigenspace_dims(&s, &spec)?.iter().all(|e| e.2 == 1))
    } else {
        None
    };

    let mut text = String::new();
    writeln!(text, "Singer matrix S in GL_{d}({q}):").unwrap();
    for r in s.s.to_rows() {
        writeln!(text, "  {r:?}").unwrap();
    }
    writeln!(text, "omega = {} (primitive in F_{{{q}^{d}}})", s.omega).unwrap();
    writeln!(text, "Module W = {}, dim W = {}", spec.factors_string(), spec.dim()).unwrap();
    let shown: Vec<String> = labels.iter().take(20).map(|l| format!("{:?}", l.parts)).collect();
    let more = if labels.len() > 20 { ", ..." } else { "" };
    writeln!(text, "Basis labels: {}{more}", shown.join(" ")).unwrap();
    writeln!(text, "Number of eigenvalues returned (with multiplicity): {with_mult}").unwrap();
    writeln!(text, "Number of distinct eigenvalues: {}", spectrum.len()).unwrap();
    match &mult_free {
        MultiplicityCheck::MultiplicityFree => {
            writeln!(text, "W is multiplicity-free for the diagonal torus.").unwrap()
        }
        MultiplicityCheck::Repeated { pattern, count } => writeln!(
            text,
            "W is not multiplicity-free: weight {} occurs {count} times.",
            tuple(&pattern.0)
        )
        .unwrap(),
    }
    match &simple {
        SpectrumCheck::Simple => {
            writeln!(text, "All eigenvalues have multiplicity 1 (simple spectrum).").unwrap()
        }
        SpectrumCheck::Repeated { eigenvalue, multiplicity } => writeln!(
            text,
            "Eigenvalue {eigenvalue} has multiplicity {multiplicity} (spectrum not simple)."
        )
        .unwrap(),
    }
    if let Some(one) = eigenspaces_one {
        let s = if one { "all 1" } else { "not all 1" };
        writeln!(text, "Eigenspace dimensions: {s}").unwrap();
    }
    writeln!(text, "Size of set of eigenvalues (real)   : {}", spectrum.len()).unwrap();
    writeln!(text, "Size of set of eigenvalues (model)  : {model_distinct}").unwrap();
    match &model_match {
        ModelMatch::Match => {
            writeln!(text, "SUCCESS: Eigenvalues on W match the digit-vector model.").unwrap()
        }
        ModelMatch::Mismatch { details } => {
            writeln!(text, "FAILURE: Eigenvalues on W do not match the model: {details}").unwrap()
        }
    }

    // label the spectrum through a recovered ω and read one exponent back
    let mut example = Value::Null;
    if matches!(simple, SpectrumCheck::Simple) && spec.dim() > 1 {
        let eigs: Vec<u64> = spectrum.iter().map(|r| r.0).collect();
        if let Ok(cand) = recover_omega(&eigs, &spec, &ctx) {
            let target = {
                let mut t = vec![0; d];
                t[d - 1] = spec.total_degree();
                DigitVector(t)
            };
            let li = labels.iter().position(|l| l.digits == target).unwrap_or(labels.len() - 1);
            let lambda = eigs[cand.labeling[li]];
            let (e, digits) = exponent_and_digits(
                &ctx.ext().element(lambda)?,
                &ctx.ext().element(cand.omega)?,
                &ctx,
            )?;
            writeln!(text, "Recovered omega = {} from the spectrum.", cand.omega).unwrap();
            writeln!(
                text,
                "Example weight pattern c = {}, eigenvalue lambda = omega^{e},",
                tuple(&labels[li].digits.0)
            )
            .unwrap();
            writeln!(text, "Exponent E = {e},    Base-q digits = {:?}.", digits.0).unwrap();
            example = json!({
                "omega": cand.omega,
                "c": labels[li].digits.0,
                "eigenvalue": lambda,
                "E": e,
                "digits": digits.0,
            });
        }
    }

    let unexpected = !matches!(model_match, ModelMatch::Match)
        || (mult_free.is_free() && !matches!(simple, SpectrumCheck::Simple));
    let json = json!({
        "command": "singer-demo",
        "q": q,
        "d": d,
        "spec": spec,
        "singer": s.s.to_rows(),
        "omega": s.omega,
        "dim": spec.dim(),
        "eigenvalues_with_multiplicity": with_mult,
        "distinct_eigenvalues": spectrum.len(),
        "multiplicity_free": mult_free.is_free(),
        "spectrum": simple,
        "eigenspaces_one_dimensional": eigenspaces_one,
        "model_distinct": model_distinct,
        "model_match": model_match,
        "example": example,
    });
    Ok(Report { text, json, code: if unexpected { 2 } else { 0 }, notes: Vec::new() })
}

pub fn gen_instance(
    spec: &str,
    gens: usize,
    plant_singer: bool,
    public: bool,
    out: &Path,
    seed: u64,
) -> Result<Report, CmdError> {
    let spec: ModuleSpec = spec.parse()?;
    let inst = instgen::gen_instance(&spec, gens, plant_singer, seed)?;
    let mut file = InstanceFile::from_instance(&inst)?;
    if public {
        file = file.public();
    }
    write_json(out, &file)?;
    let text = format!(
        "Wrote instance {spec} with {gens} generators (dim W = {}) to {}.\n",
        spec.dim(),
        out.display()
    );
    let json = json!({
        "command": "gen-instance",
        "spec": spec,
        "generators": gens,
        "dim": spec.dim(),
        "plant_singer": plant_singer,
        "oracle": !public,
        "seed": seed,
        "out": out.display().to_string(),
    });
    Ok(Report { text, json, code: 0, notes: Vec::new() })
}

fn load_instance(path: &Path) -> Result<instgen::PlantedInstance, CmdError> {
    let file: InstanceFile = read_json(path)?;
    file.to_instance().map_err(|e| usage(format!("{}: {e}", path.display())))
}

pub fn rewrite(input: &Path, eps: Option<f64>, out: Option<&Path>, seed: u64) -> Result<Report, CmdError> {
    let inst = load_instance(input)?;
    let spec = &inst.spec;
    let cfg = match eps {
        Some(e) => RewriteConfig::with_epsilon(seed, e)?,
        None => RewriteConfig::new(seed),
    };
    match rw::rewrite(&inst.public_generators, spec, &cfg) {
        Ok(r) => {
            let file = ResultFile::from_result(spec, &r);
            if let Some(out) = out {
                write_json(out, &file)?;
            }
            let mut text = String::new();
            writeln!(text, "Verified: {} generators rewritten for {spec}.", r.phi.len()).unwrap();
            writeln!(text, "omega = {}", r.omega).unwrap();
            for (i, p) in r.phi.iter().enumerate() {
                writeln!(text, "phi(x{i}) = {:?}  (scalar {})", p.to_rows(), r.scalars[i]).unwrap();
            }
            writeln!(
                text,
                "elements sampled: {}, discrete logs: {}, retries: {}",
                r.stats.elements_sampled, r.stats.dlog_calls, r.stats.retries
            )
            .unwrap();
            if let Some(out) = out {
                writeln!(text, "Result written to {}.", out.display()).unwrap();
            }
            let mut json = serde_json::to_value(&file).expect("serializable");
            json["command"] = json!("rewrite");
            json["verdict"] = json!("verified");
            let notes = vec![format!("wall time: {:?}", r.stats.wall_time)];
            Ok(Report { text, json, code: 0, notes })
        }
        Err(Error::Failure(FailureKind::BudgetExhausted)) => Ok(Report {
            text: format!(
                "Failure: budget of {} elements exhausted without a verified answer.\n",
                cfg.max_element_trials
            ),
            json: json!({
                "command": "rewrite",
                "verdict": "failure",
                "reason": "budget_exhausted",
                "max_element_trials": cfg.max_element_trials,
            }),
            code: 3,
            notes: Vec::new(),
        }),
        Err(e) => Err(e.into()),
    }
}

pub fn verify(input: &Path, result: &Path, seed: u64) -> Result<Report, CmdError> {
    let inst = load_instance(input)?;
    let file: ResultFile = read_json(result)?;
    if file.spec != inst.spec {
        return Err(usage(format!(
            "{}: spec '{}' does not match the instance spec '{}'",
            result.display(),
            file.spec,
            inst.spec
        )));
    }
    let r = file.to_result().map_err(|e| usage(format!("{}: {e}", result.display())))?;
    let cfg = RewriteConfig::new(seed);
    let verdict = verify_projective(&r.phi, &inst.public_generators, &r.eigenbasis, &inst.spec, &cfg)
        .map_err(|e| usage(format!("{}: {e}", result.display())))?;
    let oracle = if inst.hidden.is_some() { Some(oracle_check(&r, &inst)?) } else { None };

    let mut text = String::new();
    match &verdict {
        rw::ProjectiveVerdict::Verified { .. } => writeln!(text, "Certificate: Verified").unwrap(),
        rw::ProjectiveVerdict::Rejected { witness } => {
            writeln!(text, "Certificate: Rejected ({witness})").unwrap()
        }
    }
    match &oracle {
        None => writeln!(text, "Oracle: no oracle block in the instance").unwrap(),
        Some(instgen::OracleVerdict::Consistent) => writeln!(text, "Oracle: Consistent").unwrap(),
        Some(instgen::OracleVerdict::Inconsistent { witness }) => {
            writeln!(text, "Oracle: Inconsistent ({witness})").unwrap()
        }
    }
    let ok = verdict.is_verified() && oracle.as_ref().is_none_or(|o| o.is_consistent());
    let json = json!({
        "command": "verify",
        "certificate": verdict,
        "oracle": oracle,
    });
    Ok(Report { text, json, code: if ok { 0 } else { 2 }, notes: Vec::new() })
}
