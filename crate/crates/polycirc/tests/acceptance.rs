//! End-to-end acceptance checks, one test per shipped guarantee.
//!
//! Each test prints a single `ACCEPTANCE n (...): PASS` line on success; run
//! with `cargo test --test acceptance -- --nocapture` to see them.

use std::time::Instant;

use polycirc::circuit::{Circuit, Generator, Node};
use polycirc::eval::{extensionally_equal, function_table, tuples, FunctionTable};
use polycirc::learn::{
    default_error_map, train, wrap_around_demo, Dataset, Model, ParamInit, TrainConfig,
};
use polycirc::polynormal::{to_poly, JacobianTranspose};
use polycirc::random::{random_circuit, random_circuit_with_arity, SamplerConfig};
use polycirc::rdiff::reverse;
use polycirc::semiring::Semiring;
use polycirc::synth::{delta_circuit, fermat_compare, synth_from_table};
use polycirc::verify::{
    broken_square_extension, check_extension, check_preservation, check_presentation,
    check_rdc_axioms, compare_extension, negate_extension, Status,
};
use polycirc::{dsl, eval::eval};

fn s(id: &str) -> Semiring {
    id.parse().unwrap()
}

const SHIPPED_FINITE: [&str; 6] = ["zmod:2", "zmod:3", "zmod:5", "sat:2", "sat:3", "sat:4"];

#[test]
fn acceptance_01_reversal_matches_the_polynomial_oracle() {
    let start = Instant::now();
    let cfg = SamplerConfig::default(); // arity <= 3, <= 20 nodes, no comparator
    let mut circuits = 0u64;
    let mut cases = 0u64;
    for id in ["zmod:2", "zmod:3", "zmod:5", "sat:4"] {
        let d = s(id);
        let size = d.size().unwrap();
        let mut rng = rand::SeedableRng::seed_from_u64(0xacc1);
        let rng: &mut rand_chacha::ChaCha8Rng = &mut rng;
        for _ in 0..1000 {
            let c = random_circuit(&d, &cfg, rng);
            let rc = reverse(&c);
            let pm = to_poly(&d, &c).unwrap();
            let jt = JacobianTranspose::new(&d, &pm).unwrap();
            let m = c.arity();
            for t in tuples(size, m + c.coarity()) {
                let got = eval(&d, &rc, &t).unwrap();
                let want = jt.apply(&d, &t[..m], &t[m..]).unwrap();
                assert_eq!(got, want, "{id}: `{}` disagrees at {t:?}", dsl::render(&c));
                cases += 1;
            }
            circuits += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 300.0, "oracle sweep took {secs:.1}s, over the five-minute budget");
    println!(
        "ACCEPTANCE 1 (reversal matches the polynomial oracle): PASS — \
         {circuits} circuits, {cases} input/change cases, zero mismatches, {secs:.1}s"
    );
}

#[test]
fn acceptance_02_derivative_axioms_hold() {
    let mut generators = 0u64;
    let mut sampled = 0u64;
    for id in ["zmod:2", "zmod:3", "sat:2", "sat:3"] {
        let d = s(id);
        let mut gens = vec![
            Generator::Identity,
            Generator::Twist,
            Generator::Copy,
            Generator::Discard,
            Generator::Add,
            Generator::Mul,
            Generator::Zero,
            Generator::One,
            Generator::Compare,
        ];
        if d.has_neg() {
            gens.push(Generator::Negate);
        }
        for k in 0..d.size().unwrap() {
            gens.push(Generator::Const(k));
        }
        for g in gens {
            let report = check_rdc_axioms(&d, &Circuit::gen(g)).unwrap();
            assert!(report.passed, "{id}: generator {g:?} fails: {report:?}");
            for check in &report.checks {
                assert_eq!(check.status, Status::Pass, "{id}/{g:?}/{}", check.axiom);
                assert_eq!(check.seed, None, "{id}/{g:?}/{} was not exhaustive", check.axiom);
            }
            generators += 1;
        }

        let cfg = SamplerConfig {
            max_arity: 2,
            allow_compare: true,
            allow_negate: true,
            ..Default::default()
        };
        let mut rng: rand_chacha::ChaCha8Rng = rand::SeedableRng::seed_from_u64(0xacc2);
        for _ in 0..200 {
            let c = random_circuit(&d, &cfg, &mut rng);
            let report = check_rdc_axioms(&d, &c).unwrap();
            assert!(report.passed, "{id}: `{}` fails: {report:?}", dsl::render(&c));
            sampled += 1;
        }
    }
    println!(
        "ACCEPTANCE 2 (derivative axioms hold): PASS — \
         {generators} generators exhaustively, {sampled} random circuits, zero failures"
    );
}

#[test]
fn acceptance_03_extension_recipe_accepts_and_rejects() {
    for id in ["zmod:2", "zmod:3", "zmod:5"] {
        let d = s(id);
        let report = check_extension(&d, &negate_extension()).unwrap();
        assert!(report.passed, "negation extension fails over {id}: {report:?}");
    }
    for id in SHIPPED_FINITE {
        let d = s(id);
        let ext = compare_extension(&d).unwrap();
        let report = check_extension(&d, &ext).unwrap();
        assert!(report.passed, "comparator extension fails over {id}: {report:?}");
    }

    let d = s("zmod:3");
    let report = check_extension(&d, &broken_square_extension()).unwrap();
    assert!(!report.passed);
    let additivity = report.check("additivity-of-change").unwrap();
    assert_eq!(additivity.status, Status::Fail);
    let cex = additivity.counterexample.as_ref().unwrap();
    let change = |name: &str| {
        &cex.blocks.iter().find(|b| b.name == name).unwrap().values
    };
    assert_eq!(change("change-1"), &vec![1]);
    assert_eq!(change("change-2"), &vec![1]);
    assert_eq!((cex.left.clone(), cex.right.clone()), (vec![1], vec![2]));
    println!(
        "ACCEPTANCE 3 (extension recipe): PASS — negation and comparator rules accepted, \
         squared-change rule rejected over zmod:3 with both changes 1 (left 1, right 2)"
    );
}

#[test]
fn acceptance_04_composition_preserves_the_axioms() {
    let start = Instant::now();
    let d = s("zmod:2");
    let cfg = SamplerConfig { max_nodes: 12, max_arity: 2, ..Default::default() };
    let mut rng: rand_chacha::ChaCha8Rng = rand::SeedableRng::seed_from_u64(0xbead);
    let pairs = 500;
    for i in 0..pairs {
        let f = random_circuit(&d, &cfg, &mut rng);
        let g = random_circuit_with_arity(&d, &cfg, f.coarity(), &mut rng);
        let report = check_preservation(&d, &f, &g).unwrap();
        assert!(report.passed, "pair {i} fails: {report:?}");
        for check in &report.checks {
            assert_ne!(
                check.status,
                Status::Skipped,
                "pair {i}: `{}` skipped on a composable pair",
                check.axiom
            );
        }
    }
    let secs = start.elapsed().as_secs_f64();
    println!(
        "ACCEPTANCE 4 (composition preserves the axioms): PASS — \
         {pairs} composable pairs over zmod:2, sequential and parallel composites, {secs:.1}s"
    );
}

#[test]
fn acceptance_05_function_tables_synthesize_exactly() {
    let d2 = s("zmod:2");
    for bits in 0u8..16 {
        let t = FunctionTable {
            semiring: d2.id().to_string(),
            carrier_size: 2,
            arity: 2,
            coarity: 1,
            rows: (0..4).map(|r| vec![u64::from(bits >> r) & 1]).collect(),
        };
        let c = synth_from_table(&d2, &t).unwrap();
        assert_eq!(function_table(&d2, &c).unwrap(), t, "two-input function {bits:#06b}");
    }

    let d3 = s("zmod:3");
    let mut rng: rand_chacha::ChaCha8Rng = rand::SeedableRng::seed_from_u64(0xacc5);
    for i in 0..100 {
        let t = FunctionTable {
            semiring: d3.id().to_string(),
            carrier_size: 3,
            arity: 2,
            coarity: 1,
            rows: (0..9).map(|_| vec![rand::Rng::gen_range(&mut rng, 0..3)]).collect(),
        };
        let c = synth_from_table(&d3, &t).unwrap();
        assert_eq!(function_table(&d3, &c).unwrap(), t, "random table {i}");
    }
    println!(
        "ACCEPTANCE 5 (function tables synthesize exactly): PASS — \
         all 16 two-input tables over zmod:2 and 100 random tables over zmod:3, bit-exact"
    );
}

#[test]
fn acceptance_06_polynomial_comparator_matches() {
    fn uses_compare(c: &Circuit) -> bool {
        let mut stack = vec![c.clone()];
        while let Some(t) = stack.pop() {
            match t.node() {
                Node::Gen(Generator::Compare) => return true,
                Node::Gen(_) => {}
                Node::Seq(f, g) | Node::Par(f, g) => {
                    stack.push(f.clone());
                    stack.push(g.clone());
                }
            }
        }
        false
    }

    for p in [2u64, 3, 5] {
        let d = s(&format!("zp:{p}"));
        let c = fermat_compare(p).unwrap();
        assert!(!uses_compare(&c), "p = {p}: comparator generator leaked in");
        let eq = extensionally_equal(&d, &c, &Circuit::gen(Generator::Compare)).unwrap();
        assert!(eq.is_equal(), "p = {p}: {eq:?}");
    }
    println!(
        "ACCEPTANCE 6 (polynomial comparator matches): PASS — \
         comparator-free construction equals the comparator generator over zp:2, zp:3, zp:5"
    );
}

#[test]
fn acceptance_07_presented_equations_hold() {
    let mut rows = 0u64;
    for n in 2u64..=6 {
        let d = s(&format!("zmod:{n}"));
        let report = check_presentation(&d).unwrap();
        assert!(report.passed, "zmod:{n}: {report:?}");
        let characteristic = report.check("characteristic").unwrap();
        assert_eq!(characteristic.status, Status::Pass, "zmod:{n}: n-fold sum is not zero");
        for check in &report.checks {
            assert_eq!(check.seed, None, "zmod:{n}/{} was not exhaustive", check.axiom);
        }
        rows += report.checks.len() as u64;
    }

    let d5 = s("zmod:5");
    let report = check_presentation(&d5).unwrap();
    for family in ["constant-sums", "constant-products"] {
        let check = report.check(family).unwrap();
        assert_eq!(check.status, Status::Pass);
        assert_eq!(check.cases, 25, "zmod:5/{family} must cover all constant pairs");
    }
    assert_eq!(report.check("comparator-constants").unwrap().status, Status::Pass);

    for n in 2u64..=8 {
        let d = s(&format!("sat:{n}"));
        let report = check_presentation(&d).unwrap();
        assert!(report.passed, "sat:{n}: {report:?}");
        assert_eq!(report.check("distributivity").unwrap().status, Status::Pass);
        assert_eq!(report.check("annihilation").unwrap().status, Status::Pass);
        for check in &report.checks {
            assert_eq!(check.seed, None, "sat:{n}/{} was not exhaustive", check.axiom);
        }
        rows += report.checks.len() as u64;
    }
    println!(
        "ACCEPTANCE 7 (presented equations hold): PASS — \
         {rows} equation rows exhaustively over zmod:2..6 and sat:2..8, \
         including all 25 constant pairs over zmod:5"
    );
}

#[test]
fn acceptance_08_spike_differentiates_like_the_identity() {
    for id in ["zmod:2", "zmod:3", "sat:3"] {
        let d = s(id);
        let spike = reverse(&delta_circuit());
        let identity = reverse(&Circuit::gen(Generator::Identity));
        let eq = extensionally_equal(&d, &spike, &identity).unwrap();
        assert!(eq.is_equal(), "{id}: {eq:?}");
    }
    println!(
        "ACCEPTANCE 8 (spike differentiates like the identity): PASS — \
         reverse of the zero-test equals the second projection over zmod:2, zmod:3, sat:3"
    );
}

#[test]
fn acceptance_09_weight_tied_gradients_follow_the_carrier() {
    let wrapped = wrap_around_demo(&s("zmod:2"));
    assert_eq!(wrapped.sub_gradients, vec![1, 1]);
    assert_eq!(wrapped.param_update, 0, "unit gradients must wrap to 0 modulo 2");

    let saturated = wrap_around_demo(&s("sat:2"));
    assert_eq!(saturated.sub_gradients, vec![1, 1]);
    assert_eq!(saturated.param_update, 1, "unit gradients must saturate at 1");
    println!(
        "ACCEPTANCE 9 (weight-tied gradients follow the carrier): PASS — \
         shared-parameter update is 0 over zmod:2 and 1 over sat:2"
    );
}

#[test]
fn acceptance_10_training_is_exact_and_deterministic() {
    let d = s("zmod:2");
    let model = Model::new(Circuit::gen(Generator::Add), 1, 1).unwrap();
    let data = Dataset {
        input_arity: 1,
        output_arity: 1,
        samples: vec![(vec![0], vec![1]), (vec![1], vec![0])],
    };
    let cfg = TrainConfig {
        epochs: 1,
        seed: 7,
        error_map: default_error_map(1),
        init: ParamInit::Explicit(vec![0]),
    };
    let run = train(&d, &model, &data, &cfg).unwrap();
    assert_eq!(run.epochs[0].accuracy, 1.0, "offset task must be solved within one epoch");
    assert_eq!(run.params, vec![1]);
    let again = train(&d, &model, &data, &cfg).unwrap();
    assert_eq!(again, run, "training must be bit-deterministic");
    println!(
        "ACCEPTANCE 10 (training is exact and deterministic): PASS — \
         offset task reaches accuracy 1.0 in one epoch with final parameters (1), \
         identical across repeated runs"
    );
}
