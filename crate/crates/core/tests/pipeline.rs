use typestate_learn::dot::export_dot;
use typestate_learn::equivalence::{Bounds, DistOracle};
use typestate_learn::error::Error;
use typestate_learn::interface::InterfaceAutomaton;
use typestate_learn::learner::{lstar, LStarConfig};
use typestate_learn::minimize::minimize;
use typestate_learn::models;
use typestate_learn::oracle::MealyOracle;
use typestate_learn::pipeline::{run_compare, run_learn, CompareOptions, LearnOptions, OracleKind, Verification};
use typestate_learn::random::combination_lock;
use typestate_learn::spec::{parse_model, LoadedModel};
use typestate_learn::sul::QueryCache;

fn bundled(name: &str) -> LoadedModel {
    parse_model(models::bundled(name).unwrap()).unwrap()
}

#[test]
fn every_bundled_model_loads() {
    for (file, text) in models::ALL {
        if file.ends_with(".purpose.json") {
            assert!(typestate_learn::spec::parse_purpose(text).is_ok(), "{file}");
        } else {
            assert!(parse_model(text).is_ok(), "{file}");
        }
    }
}

#[test]
fn async_task_is_learned_up_to_isomorphism() {
    let r = run_learn(&bundled("async_task"), &LearnOptions::default()).unwrap();
    assert!(r.verified());
    let learned = r.automaton.unwrap();
    assert!(learned.is_isomorphic(&models::async_task()));
    assert_eq!(learned.state_count(), 5);
    assert_eq!(learned.transition_count(), 9);
}

#[test]
fn every_oracle_learns_the_door_lock() {
    let model = bundled("door_lock");
    for oracle in [OracleKind::Dist, OracleKind::StateBound, OracleKind::Perfect] {
        let opts = LearnOptions {
            oracle,
            bounds: Bounds {
                b_dist: Some(2),
                b_state: Some(4),
            },
            ..LearnOptions::default()
        };
        let r = run_learn(&model, &opts).unwrap();
        assert!(r.verified(), "{oracle:?}");
        assert!(r.automaton.unwrap().trace_equivalent(&models::door_lock()));
        let m = &r.metrics;
        assert!(m.mq_executed <= m.mq_asked);
        assert!(m.eq >= 1);
        if let (Some(used), Some(needed)) = (m.b_dist_used, m.b_dist_needed) {
            assert!(needed <= used);
        }
    }
}

#[test]
fn golden_runs_are_stable() {
    let model = bundled("media_player");
    let a = run_learn(&model, &LearnOptions::default()).unwrap();
    let b = run_learn(&model, &LearnOptions::default()).unwrap();
    let strip = |mut m: typestate_learn::pipeline::Metrics| {
        m.time_ms = 0;
        serde_json::to_string(&m).unwrap()
    };
    assert_eq!(strip(a.metrics.clone()), strip(b.metrics.clone()));
    assert_eq!(
        export_dot(a.automaton.as_ref().unwrap()),
        export_dot(b.automaton.as_ref().unwrap())
    );
}

#[test]
fn refinement_is_required_for_sqlite() {
    let model = bundled("sqlite_open_helper");
    let err = run_learn(&model, &LearnOptions::default()).unwrap_err();
    assert!(matches!(err, Error::NonDeterminism(_)));
    let r = run_learn(
        &model,
        &LearnOptions {
            refine: true,
            ..LearnOptions::default()
        },
    )
    .unwrap();
    assert!(r.verified());
    assert_eq!(r.metrics.b_dist_needed, Some(2));
    assert!(r.automaton.unwrap().trace_equivalent(&models::sqlite_open_helper()));
}

#[test]
fn output_merge_fixes_the_speech_recognizer() {
    let model = bundled("speech_recognizer");
    assert!(matches!(
        run_learn(&model, &LearnOptions::default()),
        Err(Error::NonDeterminism(_))
    ));
    let r = run_learn(
        &model,
        &LearnOptions {
            refine: true,
            ..LearnOptions::default()
        },
    )
    .unwrap();
    assert!(r.verified());
}

#[test]
fn too_small_bound_is_caught_by_the_check() {
    // A 5-state lock needs bound 4; bound 1 stops at a smaller hypothesis.
    let target = combination_lock(5);
    let mut mq = QueryCache::new(MealyOracle::new(target.clone()));
    let mut eq = DistOracle::new(1);
    let r = lstar(&mut mq, &mut eq, &LStarConfig::default()).unwrap();
    let learned = minimize(&r.machine);
    assert!(learned.state_count() < 5);
    assert!(!learned.traces_equal(&target).unwrap().is_correct());
}

#[test]
fn perfect_oracle_needs_ground_truth() {
    let opts = LearnOptions {
        oracle: OracleKind::Perfect,
        ..LearnOptions::default()
    };
    assert!(matches!(run_learn(&bundled("coin_flip"), &opts), Err(Error::Model(_))));
}

#[test]
fn purpose_makes_the_counter_learnable() {
    let model = bundled("request_response");
    let opts = LearnOptions {
        purpose: Some(models::one_pending_purpose()),
        ..LearnOptions::default()
    };
    let r = run_learn(&model, &opts).unwrap();
    assert_eq!(r.verification, Verification::Verified);
    let a = r.automaton.unwrap();
    let after_get = a.step(a.initial(), "getSuggestion").unwrap();
    assert_eq!(a.step(after_get, "onGetSuggestions"), Some(a.initial()));
}

#[test]
fn compare_on_a_tiny_model_runs_both_oracles() {
    let r = run_compare(&bundled("door_lock"), &CompareOptions::default()).unwrap();
    assert!(r.state_bound.ran);
    assert_eq!(r.state_bound.verified, Some(r.dist.verified));
    assert!(u128::from(r.state_bound.mq_executed.unwrap()) <= r.state_bound.theoretical_words);
    let per_call = DistOracle::budget(r.mealy_states, r.inputs, r.dist.b_dist);
    assert_eq!(r.dist.theoretical_per_eq, per_call);
}

#[test]
fn dot_golden_for_a_single_state() {
    let a = InterfaceAutomaton::new::<&str>(&[], &[], &["S"], "S", &[]).unwrap();
    let expected =
        "digraph typestate {\n  rankdir=LR;\n  node [shape=circle];\n  s0 [label=\"S\", peripheries=2];\n}\n";
    assert_eq!(export_dot(&a), expected);
    assert_eq!(export_dot(&a), export_dot(&a));
}

#[test]
fn counters_never_invert() {
    let r = run_learn(&bundled("media_player"), &LearnOptions::default()).unwrap();
    assert!(r.metrics.mq_executed < r.metrics.mq_asked);
    assert!(r.dist_calls.iter().all(|c| u128::from(c.executed) <= c.budget));
}
