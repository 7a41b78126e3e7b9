//! One line per acceptance criterion; exits nonzero when any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use singer_core::digitmap::{
    check_injectivity, check_injectivity_sumK, enumerate_patterns, exponent_and_digits, Injectivity,
};
use singer_core::instgen::{gen_instance, gen_instance_unchecked, oracle_check};
use singer_core::rewrite::{omega_candidates, reconstruct_generator, rewrite, verify_projective, RewriteConfig};
use singer_core::schur::{enumerate_specs, MultiplicityCheck};
use singer_core::singer::{
    eigenspace_dims, make_singer, spectrum_on_module, verify_model_match, verify_simple_spectrum, ModelMatch, SpectrumCheck,
};
use singer_core::{FactorSpec, FieldCtx, FieldElement, Matrix, ModuleSpec};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn secs(t: Duration) -> String {
    format!("{:.2}s", t.as_secs_f64())
}

fn c1_injectivity_reproduction() -> Outcome {
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_singer"))
        .args(["--format", "json", "check-injectivity", "--q", "7", "--d", "3", "--C", "3"])
        .output()
        .expect("spawn singer");
    let el = t.elapsed();
    let v: Value = match serde_json::from_slice(&out.stdout) {
        Ok(v) => v,
        Err(e) => return outcome(false, format!("unparsable output: {e}")),
    };
    let ok = out.status.success()
        && v["result"]["verdict"] == "injective"
        && v["result"]["count"] == 64
        && el < Duration::from_secs(1);
    outcome(ok, format!("verdict {} count {} in {}", v["result"]["verdict"], v["result"]["count"], secs(el)))
}

fn c2_injectivity_grid() -> Outcome {
    let t = Instant::now();
    let mut checked = 0;
    let mut bad = Vec::new();
    for q in 3..=9u64 {
        for d in 1..=4usize {
            for c in 0..q - 1 {
                checked += 1;
                match check_injectivity(q, d, c) {
                    Ok(r) if r.is_injective() => {}
                    other => bad.push(format!("(q={q},d={d},C={c}): {other:?}")),
                }
            }
        }
    }
    let witness = check_injectivity(3, 2, 2);
    let witness_ok = matches!(
        &witness,
        Ok(Injectivity::Collision { first, second, .. })
            if first.0 == [0, 0] && second.0 == [2, 2]
    );
    let el = t.elapsed();
    let ok = bad.is_empty() && witness_ok && el < Duration::from_secs(30);
    outcome(
        ok,
        format!("{checked} triples, {} failures, witness {witness:?}, {}", bad.len(), secs(el)),
    )
}

fn c3_pattern_counts() -> Outcome {
    let got: Vec<usize> = [(3, 3), (10, 2), (10, 3), (10, 4)]
        .iter()
        .map(|&(d, k)| enumerate_patterns(d, k).count())
        .collect();
    outcome(got == [10, 55, 220, 715], format!("{got:?}"))
}

fn c4_large_field_model() -> Outcome {
    let t = Instant::now();
    let r = check_injectivity_sumK(1 << 16, 10, 4);
    let el = t.elapsed();
    let ok = matches!(r, Ok(Injectivity::Injective { count: 715 })) && el <= Duration::from_secs(5);
    outcome(ok, format!("{r:?} in {}", secs(el)))
}

fn sym_spec(k: u32) -> ModuleSpec {
    ModuleSpec::new(3, 7, vec![FactorSpec::sym(k, 0)])
}

fn c5_singer_spectrum() -> Outcome {
    let t = Instant::now();
    let run = || -> singer_core::Result<(bool, String)> {
        let ctx = FieldCtx::for_q(7, 3)?;
        let s = make_singer(&ctx, 0)?;
        let mut ok = true;
        let mut parts = Vec::new();
        for (k, want) in [(2, 6usize), (3, 10)] {
            let spec = sym_spec(k);
            let dims = eigenspace_dims(&s, &spec)?;
            let simple = dims.iter().all(|&(_, m, g)| m == 1 && g == 1);
            let model = verify_model_match(&s, &spec)?;
            ok &= dims.len() == want && simple && model == ModelMatch::Match;
            parts.push(format!("Sym{k}: {} distinct, simple {simple}, {model:?}", dims.len()));
        }
        Ok((ok, parts.join("; ")))
    };
    match run() {
        Ok((ok, detail)) => {
            let el = t.elapsed();
            outcome(ok && el < Duration::from_secs(10), format!("{detail} in {}", secs(el)))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c6_exponent_example() -> Outcome {
    let run = || -> singer_core::Result<Option<(u64, u64)>> {
        let ctx = FieldCtx::for_q(7, 3)?;
        let s = make_singer(&ctx, 0)?;
        let spec = sym_spec(3);
        let eig: Vec<u64> = spectrum_on_module(&s, &spec)?.into_iter().map(|r| r.0).collect();
        let mut calls = 0;
        for cand in omega_candidates(&eig, &spec, &ctx, &mut calls)? {
            let omega = FieldElement::new(ctx.ext(), cand.omega)?;
            for &lambda in &eig {
                let (e, digits) = exponent_and_digits(&FieldElement::new(ctx.ext(), lambda)?, &omega, &ctx)?;
                if e == 147 && digits.0 == [0, 0, 3] {
                    return Ok(Some((cand.omega, lambda)));
                }
            }
        }
        Ok(None)
    };
    match run() {
        Ok(Some((omega, lambda))) => {
            outcome(true, format!("eigenvalue {lambda} = omega^147, digits (0,0,3), omega = {omega}"))
        }
        Ok(None) => outcome(false, "no eigenvalue with exponent 147 for any recovered omega"),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c7_sym2_toy() -> Outcome {
    let run = || -> singer_core::Result<(bool, String)> {
        let ctx = FieldCtx::for_q(7, 2)?;
        let spec = ModuleSpec::new(2, 7, vec![FactorSpec::sym(2, 0)]);
        let recover = |a: &Matrix| -> singer_core::Result<Matrix> {
            reconstruct_generator(&spec.induced_matrix(&a.lift(&ctx)?)?, &spec, &ctx)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut good = 0;
        for _ in 0..25 {
            let a = Matrix::random_invertible(ctx.base(), 2, &mut rng);
            if recover(&a)?.proportional_to(&a.lift(&ctx)?).is_some() {
                good += 1;
            }
        }
        let a = Matrix::from_rows(ctx.base(), &[vec![6, 2], vec![2, 4]])?;
        let a2 = Matrix::from_rows(ctx.base(), &[vec![1, 5], vec![5, 3]])?;
        let lambda = a2.proportional_to(&a);
        let recovered = recover(&a)?;
        let same = recovered == a2.lift(&ctx)?;
        Ok((
            good == 25 && lambda == Some(6) && same,
            format!("{good}/25 scalar multiples; A' = {lambda:?}·A; reconstruction equals A': {same}"),
        ))
    };
    match run() {
        Ok((ok, d)) => outcome(ok, d),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c8_property_grid() -> Outcome {
    let t = Instant::now();
    let mut checked = 0;
    let mut bad = Vec::new();
    for (q, d) in [(5u64, 2usize), (5, 3), (7, 2), (7, 3), (7, 4), (9, 3)] {
        let ctx = FieldCtx::for_q(q, d as u32).expect("field");
        let s = make_singer(&ctx, 1).expect("singer");
        let mut seen = std::collections::HashSet::new();
        for spec in enumerate_specs(d, q, 3, 300) {
            if !matches!(spec.check_multiplicity_free(), Ok(MultiplicityCheck::MultiplicityFree)) {
                continue;
            }
            // factor order does not change the module
            let mut key = spec.factors.clone();
            key.sort_by_key(|f| format!("{f}"));
            if !seen.insert(key) {
                continue;
            }
            checked += 1;
            let m = verify_model_match(&s, &spec);
            let sp = verify_simple_spectrum(&s, &spec);
            if !matches!((&m, &sp), (Ok(ModelMatch::Match), Ok(SpectrumCheck::Simple))) {
                bad.push(format!("{spec}: {m:?} {sp:?}"));
            }
        }
    }
    let ctx = FieldCtx::for_q(7, 3).expect("field");
    let s = make_singer(&ctx, 1).expect("singer");
    let vv = ModuleSpec::new(3, 7, vec![FactorSpec::nat(0), FactorSpec::nat(0)]);
    let control = verify_simple_spectrum(&s, &vv);
    let control_ok = matches!(control, Ok(SpectrumCheck::Repeated { .. }));
    let el = t.elapsed();
    let ok = checked > 0 && bad.is_empty() && control_ok && el < Duration::from_secs(300);
    let mut detail = format!("{checked} specs, {} failures, V⊗V control {control:?}, {}", bad.len(), secs(el));
    if let Some(b) = bad.first() {
        detail.push_str(&format!("; first failure {b}"));
    }
    outcome(ok, detail)
}

const ROUND_TRIP_SPECS: [&str; 5] = [
    "d=3 q=7 factors=[sym(2)@0]",
    "d=3 q=7 factors=[sym(3)@0]",
    "d=4 q=7 factors=[ext(2)@0]",
    "d=3 q=5 factors=[nat@0,nat@1]",
    "d=4 q=7 factors=[nat@0,ext(2)@1]",
];

fn c9_round_trip() -> Outcome {
    let t = Instant::now();
    let mut runs = 0;
    let mut ok_runs = 0;
    let mut false_accepts = 0;
    let mut notes = Vec::new();
    for s in ROUND_TRIP_SPECS {
        let spec: ModuleSpec = s.parse().expect("spec");
        let mut spec_ok = 0;
        let mut first_err = None;
        for seed in 0..20u64 {
            runs += 1;
            // a refused spec still goes through rewrite, so that anything it
            // returns faces the false-accept check
            let inst = match gen_instance(&spec, 2, true, seed) {
                Ok(i) => i,
                Err(e) => {
                    first_err.get_or_insert(format!("gen_instance: {e}"));
                    gen_instance_unchecked(&spec, 2, true, seed).expect("unchecked instance")
                }
            };
            let cfg = RewriteConfig::new(seed);
            let r = match rewrite(&inst.public_generators, &spec, &cfg) {
                Ok(r) => r,
                Err(e) => {
                    first_err.get_or_insert(format!("rewrite: {e}"));
                    continue;
                }
            };
            let verified = verify_projective(&r.phi, &inst.public_generators, &r.eigenbasis, &spec, &cfg)
                .map(|v| v.is_verified())
                .unwrap_or(false);
            let consistent = oracle_check(&r, &inst).map(|v| v.is_consistent()).unwrap_or(false);
            if verified && consistent {
                spec_ok += 1;
            } else {
                false_accepts += 1;
            }
        }
        ok_runs += spec_ok;
        let mut note = format!("{s}: {spec_ok}/20");
        if let Some(e) = first_err {
            note.push_str(&format!(" (first error: {e})"));
        }
        notes.push(note);
    }

    // tampered negatives from the multiplicity-free specs
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut negatives = 0;
    let valid: Vec<ModuleSpec> = ROUND_TRIP_SPECS
        .iter()
        .map(|s| s.parse::<ModuleSpec>().expect("spec"))
        .filter(|s| matches!(s.check_multiplicity_free(), Ok(MultiplicityCheck::MultiplicityFree)))
        .collect();
    for i in 0..50u64 {
        let spec = &valid[i as usize % valid.len()];
        let Ok(mut inst) = gen_instance(spec, 2, true, 100 + i) else { continue };
        let base = FieldCtx::for_q(spec.q, 1).expect("field").base().clone();
        inst.public_generators[1] = Matrix::random_invertible(&base, spec.dim() as usize, &mut rng);
        negatives += 1;
        let cfg = RewriteConfig::new(i);
        if let Ok(r) = rewrite(&inst.public_generators, spec, &cfg) {
            let verified = verify_projective(&r.phi, &inst.public_generators, &r.eigenbasis, spec, &cfg)
                .map(|v| v.is_verified())
                .unwrap_or(false);
            let consistent = oracle_check(&r, &inst).map(|v| v.is_consistent()).unwrap_or(false);
            if verified || consistent {
                false_accepts += 1;
            }
        }
    }
    let el = t.elapsed();
    let rate = ok_runs as f64 / runs as f64;
    let ok = rate >= 0.95 && false_accepts == 0 && negatives == 50 && el < Duration::from_secs(600);
    outcome(
        ok,
        format!(
            "{ok_runs}/{runs} round trips ({:.0}%), {false_accepts} false accepts, {negatives} tampered negatives, {}; {}",
            rate * 100.0,
            secs(el),
            notes.join("; ")
        ),
    )
}

fn c10_functoriality() -> Outcome {
    let t = Instant::now();
    let mut specs = 0;
    let mut bad = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for (q, d) in [(3u64, 2usize), (4, 2), (5, 2), (7, 2), (9, 2), (4, 3), (5, 3), (7, 3), (8, 3), (5, 4), (7, 4)] {
        let ctx = FieldCtx::for_q(q, d as u32).expect("field");
        for spec in enumerate_specs(d, q, 2, 64) {
            specs += 1;
            // 50 pairs in GL_d(q), and 10 more over F_{q^d}
            for (field, pairs) in [(ctx.base(), 50), (ctx.ext(), 10)] {
                for _ in 0..pairs {
                    let a = Matrix::random_invertible(field, d, &mut rng);
                    let b = Matrix::random_invertible(field, d, &mut rng);
                    let lhs = spec.induced_matrix(&a.mul(&b).expect("square"));
                    let rhs = spec
                        .induced_matrix(&a)
                        .and_then(|ma| spec.induced_matrix(&b).and_then(|mb| ma.mul(&mb)));
                    match (lhs, rhs) {
                        (Ok(l), Ok(r)) if l == r => {}
                        (l, r) => {
                            bad.push(format!("{spec}: {:?}", l.err().or(r.err())));
                            break;
                        }
                    }
                }
            }
        }
    }
    let el = t.elapsed();
    outcome(
        specs > 0 && bad.is_empty(),
        format!("{specs} specs x (50 + 10) pairs, {} failures, {}", bad.len(), secs(el)),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 injectivity reproduction", c1_injectivity_reproduction),
        ("2 injectivity grid", c2_injectivity_grid),
        ("3 pattern counts", c3_pattern_counts),
        ("4 large-field exponent model", c4_large_field_model),
        ("5 Singer spectrum at (7,3)", c5_singer_spectrum),
        ("6 exponent 147 example", c6_exponent_example),
        ("7 Sym2 reconstruction toy", c7_sym2_toy),
        ("8 multiplicity-free property grid", c8_property_grid),
        ("9 Las Vegas round trip", c9_round_trip),
        ("10 functoriality", c10_functoriality),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
