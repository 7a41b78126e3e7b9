use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use singer_core::digitmap::{
    base_q_expansion, check_injectivity, enumerate_patterns, phi, twisted_aggregate,
    DigitVector, Injectivity,
};
use singer_core::ffield::{discrete_log, element_order, factor_poly};
use singer_core::instgen::{gen_instance, oracle_check};
use singer_core::io::InstanceFile;
use singer_core::matfq::eigenpairs_over_extension;
use singer_core::rewrite::{rewrite, verify_projective, RewriteConfig};
use singer_core::schur::{enumerate_specs, torus_character, MultiplicityCheck};
use singer_core::singer::{make_singer, spectrum_on_module, SingerElement};
use singer_core::{DensePoly, FactorSpec, Field, FieldCtx, Matrix, ModuleSpec};

fn cfg(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x51_6e_67),
        failure_persistence: None,
        ..Config::default()
    }
}

fn field_for(q: u64) -> Field {
    FieldCtx::for_q(q, 1).unwrap().base().clone()
}

fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

// ---- ffield ----

proptest! {
    #![proptest_config(cfg(100))]

    #[test]
    fn inverse_and_fermat(q in prop::sample::select(vec![2u64, 3, 4, 7, 9, 25, 49, 128, 343, 3125]), seed: u64) {
        let f = field_for(q);
        let x = ChaCha8Rng::seed_from_u64(seed).gen_range(1..q);
        prop_assert_eq!(f.mul(f.inv(x).unwrap(), x), 1);
        prop_assert_eq!(f.pow(x, q - 1), 1);
    }

    #[test]
    fn embedding_is_a_homomorphism(
        (q, d) in prop::sample::select(vec![(3u64, 2u32), (4, 3), (9, 2), (25, 3), (7, 4)]),
        seed: u64,
    ) {
        let ctx = FieldCtx::for_q(q, d).unwrap();
        let (b, e) = (ctx.base(), ctx.ext());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (rng.gen_range(0..q), rng.gen_range(0..q));
        prop_assert_eq!(ctx.embed(b.mul(x, y)), e.mul(ctx.embed(x), ctx.embed(y)));
        prop_assert_eq!(ctx.embed(b.add(x, y)), e.add(ctx.embed(x), ctx.embed(y)));
        prop_assert_eq!(ctx.restrict(ctx.embed(x)), Some(x));
    }

    #[test]
    fn factors_multiply_back(q in prop::sample::select(vec![3u64, 5, 7, 9]), seed: u64) {
        let f = field_for(q);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let deg = rng.gen_range(1..=12);
        let mut c: Vec<u64> = (0..deg).map(|_| rng.gen_range(0..q)).collect();
        c.push(rng.gen_range(1..q));
        let g = DensePoly::new(&f, c);
        let mut prod = DensePoly::constant(&f, g.lead());
        for (h, m) in factor_poly(&g).unwrap() {
            prop_assert!(h.is_monic());
            for _ in 0..m {
                prod = prod.mul(&h);
            }
        }
        prop_assert_eq!(prod, g);
    }
}

proptest! {
    #![proptest_config(cfg(50))]

    #[test]
    fn discrete_log_inverts_pow(q in prop::sample::select(vec![7u64, 49, 343, 2401, 1 << 20, 3u64.pow(13)]), seed: u64) {
        let f = field_for(q);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = f.element(rng.gen_range(1..q)).unwrap();
        let ord = element_order(&base).unwrap();
        let k = rng.gen_range(0..q);
        prop_assert_eq!(discrete_log(&base.pow(k), &base).unwrap(), k % ord);
    }
}

#[test]
fn frobenius_fixes_the_base_field() {
    for (q, d) in [(3, 3), (4, 2), (5, 2), (7, 3), (8, 2), (9, 2), (25, 2), (27, 2), (49, 2)] {
        let ctx = FieldCtx::for_q(q, d).unwrap();
        for x in 0..q {
            assert_eq!(ctx.frobenius(ctx.embed(x), 1), ctx.embed(x), "q={q} x={x}");
        }
    }
}

// ---- matfq ----

proptest! {
    #![proptest_config(cfg(100))]

    #[test]
    fn inverse_is_two_sided(q in prop::sample::select(vec![3u64, 5, 7, 25]), n in 1usize..=8, seed: u64) {
        let f = field_for(q);
        let a = Matrix::random_invertible(&f, n, &mut ChaCha8Rng::seed_from_u64(seed));
        let ai = a.inverse().unwrap();
        prop_assert!(a.mul(&ai).unwrap().is_identity());
        prop_assert!(ai.mul(&a).unwrap().is_identity());
    }
}

proptest! {
    #![proptest_config(cfg(50))]

    #[test]
    fn char_poly_is_a_similarity_invariant(q in prop::sample::select(vec![3u64, 5, 7, 25]), n in 1usize..=8, seed: u64) {
        let f = field_for(q);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Matrix::random(&f, n, n, &mut rng);
        let t = Matrix::random_invertible(&f, n, &mut rng);
        let b = t.mul(&a).unwrap().mul(&t.inverse().unwrap()).unwrap();
        prop_assert_eq!(b.char_poly().unwrap(), a.char_poly().unwrap());
    }

    #[test]
    fn eigenpairs_are_exact(q in prop::sample::select(vec![3u64, 5, 7]), n in 1usize..=6, d in 1u32..=3, seed: u64) {
        let ctx = FieldCtx::for_q(q, d).unwrap();
        let a = Matrix::random(ctx.base(), n, n, &mut ChaCha8Rng::seed_from_u64(seed));
        let al = a.lift(&ctx).unwrap();
        let pairs = eigenpairs_over_extension(&a, &ctx).unwrap();
        let e = ctx.ext();
        for p in &pairs {
            let av = al.mul_vec(&p.vector).unwrap();
            let lv: Vec<u64> = p.vector.iter().map(|&x| e.mul(p.value, x)).collect();
            prop_assert_eq!(av, lv);
            prop_assert!(p.geometric >= 1 && p.geometric <= p.multiplicity as usize);
        }
        let total: u32 = pairs.iter().map(|p| p.multiplicity).sum();
        prop_assert!(total as usize <= n);
        let splits = ctx.roots_in_extension(&a.char_poly().unwrap()).unwrap()
            .iter().map(|r| r.1).sum::<u32>() as usize == n;
        prop_assert_eq!(total as usize == n, splits);
    }
}

// ---- digitmap ----

#[test]
fn injectivity_below_the_bound() {
    for q in [3u64, 4, 5, 7, 8, 9] {
        for d in 1..=4 {
            for c in 0..q - 1 {
                let r = check_injectivity(q, d, c).unwrap();
                assert!(r.is_injective(), "q={q} d={d} C={c}: {r:?}");
            }
        }
    }
}

#[test]
fn injectivity_bound_is_sharp() {
    for q in [3u64, 5, 7] {
        let hit = (1..=3).any(|d| !check_injectivity(q, d, q - 1).unwrap().is_injective());
        assert!(hit, "q={q}");
    }
    match check_injectivity(3, 2, 2).unwrap() {
        Injectivity::Collision { first, second, .. } => {
            assert_eq!((first.0, second.0), (vec![0, 0], vec![2, 2]));
        }
        other => panic!("{other:?}"),
    }
}

proptest! {
    #![proptest_config(cfg(500))]

    #[test]
    fn expansion_inverts_phi((q, d) in prop::sample::select(vec![(7u64, 3usize), (2, 10), (65536, 4), (3, 20)]), seed: u64) {
        let n = num_bigint::BigUint::from(q).pow(d as u32) - 1u32;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bytes: Vec<u8> = (0..16).map(|_| rng.gen()).collect();
        let e = num_bigint::BigUint::from_bytes_le(&bytes) % &n;
        let b = base_q_expansion(&e, q, d).unwrap();
        prop_assert_eq!(phi(&b, q), e);
    }
}

#[test]
fn pattern_counts_are_binomial() {
    for d in 1..=12usize {
        for k in 0..=6u64 {
            let pats: Vec<DigitVector> = enumerate_patterns(d, k).collect();
            assert_eq!(pats.len() as u64, binom(d as u64 + k - 1, k), "d={d} K={k}");
            assert!(pats.iter().all(|p| p.sum() == k && p.len() == d));
            assert!(pats.windows(2).all(|w| w[0] < w[1]));
        }
    }
}

proptest! {
    #![proptest_config(cfg(100))]

    #[test]
    fn untwisted_aggregate_is_a_sum(d in 1usize..8, parts in prop::collection::vec(prop::collection::vec(0u64..5, 8), 1..5)) {
        let vs: Vec<(DigitVector, i64)> = parts.iter().map(|p| (DigitVector(p[..d].to_vec()), 0)).collect();
        let sum: Vec<u64> = (0..d).map(|i| parts.iter().map(|p| p[i]).sum()).collect();
        prop_assert_eq!(twisted_aggregate(&vs, d).unwrap().0, sum);
    }
}

#[test]
fn model_eigenvalues_are_distinct_below_the_bound() {
    for (q, d) in [(5u64, 2u32), (5, 3), (7, 3), (9, 2), (8, 3)] {
        let ctx = FieldCtx::for_q(q, d).unwrap();
        let omega = ctx.ext().element(ctx.ext().generator()).unwrap();
        for spec in enumerate_specs(d as usize, q, 2, 400) {
            let model = singer_core::digitmap::model_eigenvalues(&ctx, &spec, &omega).unwrap();
            let vals: std::collections::HashSet<u64> = model.values().map(|v| v.value()).collect();
            assert_eq!(vals.len(), model.len(), "{spec}");
        }
    }
}

// ---- schur ----

fn small_specs() -> Vec<ModuleSpec> {
    let mut v = Vec::new();
    for (q, d) in [(7u64, 2usize), (7, 3), (8, 4), (9, 3), (11, 2), (13, 4)] {
        v.extend(enumerate_specs(d, q, 2, 300).into_iter().filter(|s| s.total_degree() <= 5));
    }
    v
}

#[test]
fn dimension_matches_labels_and_digits_sum_to_k() {
    let mut n = 0;
    for (q, d) in [(7u64, 5usize), (8, 6), (11, 3)] {
        for spec in enumerate_specs(d, q, 2, 4096).into_iter().filter(|s| s.total_degree() <= 5) {
            let labels = spec.basis_labels().unwrap();
            assert_eq!(labels.len() as u64, spec.dim(), "{spec}");
            assert!(labels.iter().all(|l| l.digits.sum() == spec.total_degree()), "{spec}");
            n += 1;
        }
    }
    assert!(n > 100);
}

#[test]
fn induced_matrix_is_a_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for spec in small_specs() {
        let f = field_for(spec.q);
        for _ in 0..3 {
            let a = Matrix::random_invertible(&f, spec.d, &mut rng);
            let b = Matrix::random(&f, spec.d, spec.d, &mut rng);
            let ab = spec.induced_matrix(&a.mul(&b).unwrap()).unwrap();
            let prod = spec.induced_matrix(&a).unwrap().mul(&spec.induced_matrix(&b).unwrap()).unwrap();
            assert_eq!(ab, prod, "{spec}");
            let ia = spec.induced_matrix(&a).unwrap();
            assert_eq!(spec.induced_matrix(&a.inverse().unwrap()).unwrap(), ia.inverse().unwrap(), "{spec}");
        }
        assert!(spec.induced_matrix(&Matrix::identity(&f, spec.d)).unwrap().is_identity());
    }
}

fn weights(labels: &[singer_core::BasisLabel], f: &Field, t: &[u64]) -> Vec<u64> {
    labels
        .iter()
        .map(|l| l.digits.0.iter().zip(t).fold(1, |acc, (&c, &ti)| f.mul(acc, f.pow(ti, c))))
        .collect()
}

#[test]
fn torus_acts_by_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for spec in small_specs() {
        let labels = spec.basis_labels().unwrap();
        if spec.factors.iter().all(|f| f.twist == 0) {
            let f = field_for(spec.q);
            let t: Vec<u64> = (0..spec.d).map(|_| rng.gen_range(1..spec.q)).collect();
            let m = spec.induced_matrix(&Matrix::diagonal(&f, &t)).unwrap();
            assert!(m.is_diagonal(), "{spec}");
            let got: Vec<u64> = (0..labels.len()).map(|i| m.get(i, i)).collect();
            assert_eq!(got, weights(&labels, &f, &t), "{spec}");
            assert_eq!(torus_character(&labels, &f, &t), got, "{spec}");
        }
        // twists shift digits on the torus t_{i+1} = t_i^q, the one a Singer
        // cycle diagonalizes into
        let ctx = FieldCtx::for_q(spec.q, spec.d as u32).unwrap();
        let e = ctx.ext();
        let x = rng.gen_range(1..e.size());
        let t: Vec<u64> = (0..spec.d as i64).map(|i| ctx.frobenius(x, i)).collect();
        let m = spec.induced_matrix(&Matrix::diagonal(e, &t)).unwrap();
        assert!(m.is_diagonal(), "{spec}");
        let got: Vec<u64> = (0..labels.len()).map(|i| m.get(i, i)).collect();
        assert_eq!(got, weights(&labels, e, &t), "{spec}");
    }
}

// ---- singer ----

#[test]
fn singer_eigenvalues_form_one_frobenius_orbit() {
    for (q, d) in [(2u64, 5u32), (5, 2), (7, 3), (9, 3), (4, 4)] {
        let ctx = FieldCtx::for_q(q, d).unwrap();
        let s = make_singer(&ctx, 3).unwrap();
        let pairs = eigenpairs_over_extension(&s.s, &ctx).unwrap();
        let mut vals: Vec<u64> = pairs.iter().map(|p| p.value).collect();
        vals.sort_unstable();
        let mut orbit: Vec<u64> = (0..d as i64).map(|e| ctx.frobenius(s.omega, e)).collect();
        orbit.sort_unstable();
        assert_eq!(vals, orbit, "q={q} d={d}");
        assert!(pairs.iter().all(|p| p.geometric == 1));
    }
}

proptest! {
    #![proptest_config(cfg(50))]

    #[test]
    fn module_spectrum_is_conjugation_invariant(seed: u64) {
        let ctx = FieldCtx::for_q(7, 3).unwrap();
        let s = make_singer(&ctx, 1).unwrap();
        let t = Matrix::random_invertible(ctx.base(), 3, &mut ChaCha8Rng::seed_from_u64(seed));
        let conj = t.mul(&s.s).unwrap().mul(&t.inverse().unwrap()).unwrap();
        let s2 = SingerElement::new(&ctx, conj, s.omega).unwrap();
        let spec: ModuleSpec = "d=3 q=7 factors=[sym(2)@1]".parse().unwrap();
        prop_assert_eq!(spectrum_on_module(&s2, &spec).unwrap(), spectrum_on_module(&s, &spec).unwrap());
    }
}

// ---- rewrite / instgen ----

fn planted(spec: &str, seed: u64) -> (ModuleSpec, singer_core::instgen::PlantedInstance) {
    let spec: ModuleSpec = spec.parse().unwrap();
    let inst = gen_instance(&spec, 2, seed.is_multiple_of(2), seed).unwrap();
    (spec, inst)
}

const SOUNDNESS_SPECS: [&str; 5] = [
    "d=3 q=7 factors=[sym(2)@0]",
    "d=3 q=7 factors=[sym(2)@2,ext(3)@1]",
    "d=4 q=5 factors=[ext(2)@1]",
    "d=2 q=8 factors=[ext(2)@1,nat@1]",
    "d=3 q=4 factors=[nat@2]",
];

#[test]
fn las_vegas_soundness() {
    // 200 runs; every returned result passes the certificate and the oracle.
    // Odd seeds plant no Singer cycle, and two random matrices over a small
    // field can generate a subgroup without one, so only even seeds must
    // succeed.
    let mut returned = 0;
    for seed in 0..40u64 {
        for s in SOUNDNESS_SPECS {
            let (spec, inst) = planted(s, seed);
            let cfg = RewriteConfig::new(seed);
            let r = match rewrite(&inst.public_generators, &spec, &cfg) {
                Ok(r) => r,
                Err(e) => {
                    assert!(seed % 2 == 1, "{s} seed {seed}: {e}");
                    continue;
                }
            };
            returned += 1;
            let v = verify_projective(&r.phi, &inst.public_generators, &r.eigenbasis, &spec, &cfg).unwrap();
            assert!(v.is_verified(), "{s} seed {seed}: {v:?}");
            assert!(oracle_check(&r, &inst).unwrap().is_consistent(), "{s} seed {seed}");

            // labeling is a bijection onto the labels
            assert_eq!(r.labels, spec.basis_labels().unwrap());
            let mut ev = r.eigenvalues.clone();
            ev.sort_unstable();
            ev.dedup();
            assert_eq!(ev.len(), r.labels.len());

            // μ_x^{dim W} = det(induced(phi(x))) / det(C M(x) C^-1)
            let ctx = FieldCtx::for_q(spec.q, spec.d as u32).unwrap();
            let e = ctx.ext();
            let c_inv = r.eigenbasis.inverse().unwrap();
            for ((p, g), &mu) in r.phi.iter().zip(&inst.public_generators).zip(&r.scalars) {
                let mhat = r.eigenbasis.mul(&g.lift(&ctx).unwrap()).unwrap().mul(&c_inv).unwrap();
                let ratio = e.div(spec.induced_matrix(p).unwrap().det().unwrap(), mhat.det().unwrap()).unwrap();
                assert_eq!(e.pow(mu, spec.dim()), ratio, "{s} seed {seed}");
            }
            assert!(r.stats.elements_sampled >= 1);
            assert!(r.stats.dlog_calls >= 1);
            assert!(r.stats.retries < r.stats.elements_sampled);
        }
    }
    assert!(returned >= 100, "{returned} of 200 runs returned");
}

#[test]
fn tampered_instances_never_verify() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for seed in 0..10u64 {
        // with dim W = d every matrix is an image, so tampering changes nothing
        for s in SOUNDNESS_SPECS.iter().filter(|s| !s.contains("nat")) {
            let (spec, mut inst) = planted(s, seed);
            let f = field_for(spec.q);
            let n = spec.dim() as usize;
            inst.public_generators[1] = Matrix::random_invertible(&f, n, &mut rng);
            let cfg = RewriteConfig::new(seed);
            if let Ok(r) = rewrite(&inst.public_generators, &spec, &cfg) {
                let v = verify_projective(&r.phi, &inst.public_generators, &r.eigenbasis, &spec, &cfg).unwrap();
                panic!("{s} seed {seed}: tampered instance returned a result ({v:?})");
            }
        }
    }
}

#[test]
fn tampered_results_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for s in SOUNDNESS_SPECS {
        let (spec, inst) = planted(s, 1);
        let cfg = RewriteConfig::new(1);
        let mut r = rewrite(&inst.public_generators, &spec, &cfg).unwrap();
        let ctx = FieldCtx::for_q(spec.q, spec.d as u32).unwrap();
        r.phi[0] = Matrix::random_invertible(ctx.ext(), spec.d, &mut rng);
        let v = verify_projective(&r.phi, &inst.public_generators, &r.eigenbasis, &spec, &cfg).unwrap();
        assert!(!v.is_verified(), "{s}");
        assert!(!oracle_check(&r, &inst).unwrap().is_consistent(), "{s}");
    }
}

#[test]
fn scrambling_is_invisible_to_the_spectrum() {
    for seed in 0..10u64 {
        for s in SOUNDNESS_SPECS {
            let (spec, inst) = planted(s, seed);
            let h = inst.hidden.as_ref().unwrap();
            for (g, a) in inst.public_generators.iter().zip(&h.a) {
                assert_eq!(g.char_poly().unwrap(), spec.induced_matrix(a).unwrap().char_poly().unwrap());
            }
        }
    }
}

#[test]
fn identity_instance_is_identity() {
    let spec: ModuleSpec = "d=3 q=7 factors=[sym(2)@1]".parse().unwrap();
    let f = field_for(7);
    assert!(spec.induced_matrix(&Matrix::identity(&f, 3)).unwrap().is_identity());
}

proptest! {
    #![proptest_config(cfg(20))]

    #[test]
    fn instance_files_round_trip(idx in 0usize..SOUNDNESS_SPECS.len(), seed: u64) {
        let (_, inst) = planted(SOUNDNESS_SPECS[idx], seed);
        let file = InstanceFile::from_instance(&inst).unwrap();
        let text = serde_json::to_string_pretty(&file).unwrap();
        let back: InstanceFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
        prop_assert_eq!(back.to_instance().unwrap(), inst);
    }
}

#[test]
fn multiplicity_free_specs_in_the_grid() {
    // one factor of dim > 1 plus determinant factors
    for spec in enumerate_specs(3, 7, 2, 300) {
        let free = spec.check_multiplicity_free().unwrap().is_free();
        let big = spec.factors.iter().filter(|f| f.dim(3) > 1).count();
        assert_eq!(free, big <= 1, "{spec}");
    }
    let vv = ModuleSpec::new(3, 7, vec![FactorSpec::nat(0), FactorSpec::nat(1)]);
    assert!(matches!(vv.check_multiplicity_free().unwrap(), MultiplicityCheck::Repeated { .. }));
}
