//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::{HashMap, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, Output as ProcessOutput};
use std::time::Instant;

use typestate_learn::alphabet::{Input, Output, Word};
use typestate_learn::equivalence::{
    dist_equivalence, perfect_equivalence, state_bound_equivalence, theoretical_words, DistOptions, DistOracle,
    PerfectOracle,
};
use typestate_learn::learner::{lstar, LStarConfig};
use typestate_learn::mealy::MealyMachine;
use typestate_learn::minimize::{distinguisher_bound, minimize};
use typestate_learn::models;
use typestate_learn::oracle::MealyOracle;
use typestate_learn::pipeline::{run_compare, run_learn, CompareOptions, LearnOptions};
use typestate_learn::random::{combination_lock, random_minimal_mealy};
use typestate_learn::spec::{parse_model, AutomatonSpec, LoadedModel};
use typestate_learn::sul::QueryCache;
use typestate_learn::sweep::{sweep_cases, SweepCase};

type Outcome = Result<String, String>;

const SWEEP_SEED: u64 = 2024;
const SWEEP_SIZE: usize = 200;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

// ---- independent oracles -------------------------------------------------

/// First word on which two machines over the same alphabet differ, found by
/// BFS over the state product.
fn product_difference(a: &MealyMachine, b: &MealyMachine) -> Option<Word> {
    let mut seen: HashMap<(usize, usize), Word> = HashMap::from([((a.initial(), b.initial()), Vec::new())]);
    let mut queue = VecDeque::from([(a.initial(), b.initial())]);
    while let Some((p, q)) = queue.pop_front() {
        let w = seen[&(p, q)].clone();
        for i in a.alphabet().input_ids() {
            let mut w2 = w.clone();
            w2.push(i);
            if a.output(p, i) != b.output(q, i) {
                return Some(w2);
            }
            let next = (a.next(p, i), b.next(q, i));
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(next) {
                e.insert(w2);
                queue.push_back(next);
            }
        }
    }
    None
}

/// Longest shortest separating word over all state pairs of `m`.
fn pairwise_bound(m: &MealyMachine) -> usize {
    let mut best = 0;
    for p in 0..m.state_count() {
        for q in p + 1..m.state_count() {
            let mut seen = HashMap::from([((p, q), 0usize)]);
            let mut queue = VecDeque::from([(p, q)]);
            let mut found = None;
            'bfs: while let Some((x, y)) = queue.pop_front() {
                let d = seen[&(x, y)];
                for i in m.alphabet().input_ids() {
                    if m.output(x, i) != m.output(y, i) {
                        found = Some(d + 1);
                        break 'bfs;
                    }
                    let next = (m.next(x, i), m.next(y, i));
                    if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(next) {
                        e.insert(d + 1);
                        queue.push_back(next);
                    }
                }
            }
            best = best.max(found.expect("states of a minimal machine are separable"));
        }
    }
    best
}

fn pow(base: usize, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

fn replay(m: &MealyMachine, w: &[Input]) -> Vec<Output> {
    let mut q = m.initial();
    w.iter()
        .map(|&i| {
            let (next, o) = m.step(q, i);
            q = next;
            o
        })
        .collect()
}

// ---- helpers -------------------------------------------------------------

fn sweep_targets() -> Vec<(SweepCase, MealyMachine)> {
    sweep_cases(SWEEP_SIZE, SWEEP_SEED)
        .into_iter()
        .map(|c| (c, random_minimal_mealy(c.states, c.inputs, c.outputs, c.seed).unwrap()))
        .collect()
}

fn bundled(name: &str) -> LoadedModel {
    parse_model(models::bundled(name).unwrap()).unwrap()
}

fn cli(args: &[&str]) -> ProcessOutput {
    Command::new(env!("CARGO_BIN_EXE_typestate"))
        .args(args)
        .output()
        .expect("run the typestate binary")
}

fn code(out: &ProcessOutput) -> i32 {
    out.status.code().unwrap_or(-1)
}

// ---- criteria ------------------------------------------------------------

fn c1_perfect_soundness() -> Outcome {
    let start = Instant::now();
    for (case, target) in sweep_targets() {
        let mut mq = QueryCache::new(MealyOracle::new(target.clone()));
        let mut eq = PerfectOracle::new(&target);
        let r = lstar(&mut mq, &mut eq, &LStarConfig::default()).map_err(|e| format!("{case:?}: {e}"))?;
        ensure!(
            product_difference(&r.machine, &target).is_none(),
            "{case:?}: learned machine differs"
        );
        ensure!(
            r.machine.traces_equal(&target).unwrap().is_correct(),
            "{case:?}: traces_equal disagrees"
        );
        ensure!(
            r.machine.state_count() == target.state_count(),
            "{case:?}: {} states learned, {} expected",
            r.machine.state_count(),
            target.state_count()
        );
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 30.0, "took {secs:.1}s");
    Ok(format!("{SWEEP_SIZE} machines exact, {secs:.2}s"))
}

/// Criteria 2 and 3 share the same runs.
struct DistRuns {
    calls: usize,
    max_ratio: f64,
    max_asked_ratio: f64,
}

fn dist_runs() -> Result<DistRuns, String> {
    let mut calls = 0;
    let mut max_ratio: f64 = 0.0;
    let mut max_asked_ratio: f64 = 0.0;
    for (case, target) in sweep_targets() {
        let b = pairwise_bound(&target);
        ensure!(distinguisher_bound(&target).unwrap() == b, "{case:?}: bound mismatch");
        let mut mq = QueryCache::new(MealyOracle::new(target.clone()));
        let mut eq = DistOracle::new(b);
        let r = lstar(&mut mq, &mut eq, &LStarConfig::default()).map_err(|e| format!("{case:?}: {e}"))?;
        ensure!(
            product_difference(&r.machine, &target).is_none(),
            "{case:?}: not equivalent"
        );
        let sigma = target.alphabet().input_count();
        for call in &eq.calls {
            let budget = call.hypothesis_states as u128 * pow(sigma, b + 1);
            ensure!(
                u128::from(call.executed) <= budget,
                "{case:?}: {} executed > {budget}",
                call.executed
            );
            max_ratio = max_ratio.max(call.executed as f64 / budget as f64);
            calls += 1;
        }
        let n = target.state_count() as u128;
        let s = sigma as u128;
        let m = r.stats.max_cex_len.max(1) as u128;
        let theorem = s * s * n + s * n * n * m;
        // Queries issued by L* itself; the oracle's own queries are metered
        // per call under criterion 2.
        let asked = u128::from(r.stats.learner_queries);
        ensure!(asked <= theorem, "{case:?}: {asked} learner queries > {theorem}");
        ensure!(r.stats.eq_count() <= target.state_count(), "{case:?}: too many EQs");
        max_asked_ratio = max_asked_ratio.max(asked as f64 / theorem as f64);
    }
    Ok(DistRuns {
        calls,
        max_ratio,
        max_asked_ratio,
    })
}

fn c2_dist_completeness(runs: &Result<DistRuns, String>) -> Outcome {
    let r = runs.as_ref().map_err(Clone::clone)?;
    Ok(format!(
        "{SWEEP_SIZE} machines exact, {} calls within |Q||S|^(B+1) (max {:.0}% of the bound)",
        r.calls,
        100.0 * r.max_ratio
    ))
}

fn c3_query_budget(runs: &Result<DistRuns, String>) -> Outcome {
    let r = runs.as_ref().map_err(Clone::clone)?;
    Ok(format!(
        "learner queries and EQ count within bounds (max {:.0}% of the query bound)",
        100.0 * r.max_asked_ratio
    ))
}

fn c4_distinguisher_bound() -> Outcome {
    let mut worst = 0usize;
    for (case, target) in sweep_targets() {
        let b = distinguisher_bound(&target).unwrap();
        ensure!(b == pairwise_bound(&target), "{case:?}: bound mismatch");
        ensure!(b < target.state_count().max(1), "{case:?}: bound {b} too large");
        worst = worst.max(b);
    }
    for k in 1..=12 {
        let lock = combination_lock(k);
        ensure!(minimize(&lock).state_count() == k, "lock {k} is not minimal");
        let b = distinguisher_bound(&lock).unwrap();
        ensure!(b == k - 1 && pairwise_bound(&lock) == k - 1, "lock {k}: bound {b}");
    }
    Ok(format!(
        "all {SWEEP_SIZE} within n-1 (max {worst}), combination locks 1..=12 hit k-1"
    ))
}

fn c5_benchmarks() -> Outcome {
    let mut notes = Vec::new();

    let t = Instant::now();
    let r = run_learn(&bundled("async_task"), &LearnOptions::default()).map_err(|e| e.to_string())?;
    let a = r.automaton.ok_or("AsyncTask: no automaton")?;
    ensure!(a.is_isomorphic(&models::async_task()), "AsyncTask: not isomorphic");
    ensure!(a.state_count() == 5, "AsyncTask: {} states", a.state_count());
    notes.push(format!("AsyncTask 5 states {:.2}s", t.elapsed().as_secs_f64()));

    let t = Instant::now();
    let r = run_learn(&bundled("media_player"), &LearnOptions::default()).map_err(|e| e.to_string())?;
    let a = r.automaton.as_ref().ok_or("MediaPlayer: no automaton")?;
    ensure!(
        a.trace_equivalent(&models::media_player()),
        "MediaPlayer: traces differ"
    );
    ensure!(a.state_count() == 10, "MediaPlayer: {} states", a.state_count());
    ensure!(
        r.metrics.b_dist_needed == Some(1),
        "MediaPlayer: needed {:?}",
        r.metrics.b_dist_needed
    );
    let m = &r.metrics;
    ensure!(
        m.mq_executed < m.mq_asked,
        "MediaPlayer: executed {} vs asked {}",
        m.mq_executed,
        m.mq_asked
    );
    ensure!(m.mq_executed < 100_000, "MediaPlayer: executed {}", m.mq_executed);
    notes.push(format!(
        "MediaPlayer 10 states, B needed 1, MQ {} ({}) {:.2}s",
        m.mq_asked,
        m.mq_executed,
        t.elapsed().as_secs_f64()
    ));

    let t = Instant::now();
    let out = cli(&[
        "learn",
        "--model",
        "sqlite_open_helper",
        "--out-dir",
        &tmp_dir("sqlite"),
    ]);
    ensure!(
        code(&out) == 2,
        "SQLiteOpenHelper without refinement: exit {}",
        code(&out)
    );
    let r = run_learn(
        &bundled("sqlite_open_helper"),
        &LearnOptions {
            refine: true,
            ..LearnOptions::default()
        },
    )
    .map_err(|e| e.to_string())?;
    ensure!(r.verified(), "SQLiteOpenHelper refined: not verified");
    ensure!(
        r.metrics.b_dist_needed == Some(2),
        "SQLiteOpenHelper: needed {:?}",
        r.metrics.b_dist_needed
    );
    let a = r.automaton.ok_or("SQLiteOpenHelper: no automaton")?;
    ensure!(
        a.is_isomorphic(&models::sqlite_open_helper()),
        "SQLiteOpenHelper: not isomorphic"
    );
    notes.push(format!(
        "SQLiteOpenHelper B needed 2, nondet exit 2 {:.2}s",
        t.elapsed().as_secs_f64()
    ));
    Ok(notes.join("; "))
}

fn c6_query_blowup() -> Outcome {
    let r = run_compare(&bundled("media_player"), &CompareOptions::default()).map_err(|e| e.to_string())?;
    let expected = theoretical_words(r.inputs, r.mealy_states, r.state_bound.b_state);
    ensure!(
        r.state_bound.theoretical_words == expected
            && expected == pow(r.inputs, r.mealy_states + r.state_bound.b_state - 1),
        "theoretical count {} inconsistent",
        r.state_bound.theoretical_words
    );
    ensure!(
        r.state_bound.theoretical_words > 100_000_000,
        "state-bound count too small"
    );
    ensure!(!r.state_bound.ran, "state-bound run should be skipped");
    ensure!(r.dist.mq_executed < 100_000, "dist executed {}", r.dist.mq_executed);
    ensure!(r.ratio > 1000.0, "ratio {}", r.ratio);
    Ok(format!(
        "state-bound 10^{:.1} words vs {} executed, ratio {:.1e}",
        r.state_bound.theoretical_log10, r.dist.mq_executed, r.ratio
    ))
}

fn trace_pairs(stderr: &str, tag: &str) -> Option<Vec<(String, String)>> {
    let line = stderr.lines().find(|l| l.trim_start().starts_with(tag))?;
    line.trim_start()[tag.len()..]
        .split_whitespace()
        .map(|tok| tok.split_once('/').map(|(i, o)| (i.to_string(), o.to_string())))
        .collect()
}

fn c7_nondeterminism() -> Outcome {
    let dir = tmp_dir("coin");
    let out = cli(&["learn", "--model", "coin_flip", "--seed", "7", "--out-dir", &dir]);
    ensure!(code(&out) == 2, "coin flip: exit {}", code(&out));
    let stderr = String::from_utf8_lossy(&out.stderr);
    let seen = trace_pairs(&stderr, "seen:").ok_or("no first trace in the report")?;
    let now = trace_pairs(&stderr, "now:").ok_or("no second trace in the report")?;
    let inputs = |t: &[(String, String)]| t.iter().map(|p| p.0.clone()).collect::<Vec<_>>();
    let outputs = |t: &[(String, String)]| t.iter().map(|p| p.1.clone()).collect::<Vec<_>>();
    ensure!(inputs(&seen) == inputs(&now), "input projections differ");
    ensure!(outputs(&seen) != outputs(&now), "outputs agree");
    let out = cli(&[
        "learn",
        "--model",
        "coin_flip",
        "--seed",
        "7",
        "--refine",
        "--out-dir",
        &dir,
    ]);
    ensure!(code(&out) == 0, "refined coin flip: exit {}", code(&out));
    Ok(format!("exit 2 on {}, refined run exits 0", inputs(&seen).join(" ")))
}

fn c8_learning_purpose() -> Outcome {
    let dir = tmp_dir("purpose");
    let out = cli(&[
        "learn",
        "--model",
        "request_response",
        "--purpose",
        "one_pending.purpose",
        "--out-dir",
        &dir,
    ]);
    ensure!(code(&out) == 0, "with purpose: exit {}", code(&out));
    let learned = std::fs::read_to_string(Path::new(&dir).join("SuggestionProvider.learned.json"))
        .map_err(|e| format!("learned JSON: {e}"))?;
    let spec: AutomatonSpec = serde_json::from_str(&learned).map_err(|e| e.to_string())?;
    let a = spec.to_model().map_err(|e| e.to_string())?.automaton().clone();
    let mid = a.step(a.initial(), "getSuggestion").ok_or("no getSuggestion edge")?;
    ensure!(
        a.step(mid, "onGetSuggestions") == Some(a.initial()),
        "no cycle back to the initial state"
    );
    let out = cli(&[
        "learn",
        "--model",
        "request_response",
        "--oracle",
        "perfect",
        "--out-dir",
        &dir,
    ]);
    ensure!(code(&out) == 3, "without purpose: exit {}", code(&out));
    ensure!(
        String::from_utf8_lossy(&out.stderr).contains("cap"),
        "without purpose: no EQ cap message"
    );
    Ok("purpose run learns getSuggestion/onGetSuggestions cycle; unrestricted run exits 3 at the EQ cap".into())
}

fn corrupt(target: &MealyMachine, pick: u64) -> MealyMachine {
    let n = target.state_count();
    let sigma = target.alphabet().input_count();
    let q = (pick % n as u64) as usize;
    let i = Input(((pick / 7) % sigma as u64) as u16);
    if n > 1 && pick.is_multiple_of(2) {
        let t = (target.next(q, i) + 1 + (pick / 13) as usize % (n - 1)) % n;
        target.with_target(q, i, t)
    } else {
        let outs = target.alphabet().output_count();
        let o = Output(((target.output(q, i).0 as usize + 1) % outs) as u16);
        target.with_output(q, i, o)
    }
}

fn c9_differential() -> Outcome {
    let mut state_bound_runs = 0;
    let mut cexs = 0;
    for (k, (case, target)) in sweep_targets().into_iter().take(100).enumerate() {
        // Minimizing drops states the corruption made unreachable.
        let h = minimize(&corrupt(&target, case.seed.rotate_left(k as u32)));
        let truth = product_difference(&h, &target).is_none();
        let perfect = perfect_equivalence(&h, &target).unwrap();
        let b = distinguisher_bound(&target).unwrap();
        let mut mq = MealyOracle::new(target.clone());
        let dist = dist_equivalence(&h, b, &mut mq, DistOptions::default()).unwrap();
        ensure!(perfect.is_correct() == truth, "{case:?}: perfect oracle wrong");
        ensure!(dist.is_correct() == truth, "{case:?}: dist oracle disagrees");
        let mut verdicts = vec![
            perfect.counterexample().cloned(),
            dist.verdict().counterexample().cloned(),
        ];
        let sigma = target.alphabet().input_count();
        let b_state = target.state_count();
        if theoretical_words(sigma, h.state_count(), b_state) <= 200_000 {
            let sb = state_bound_equivalence(&h, b_state, &mut mq, 200_000).unwrap();
            ensure!(sb.is_correct() == truth, "{case:?}: state-bound oracle disagrees");
            verdicts.push(sb.verdict().counterexample().cloned());
            state_bound_runs += 1;
        }
        for w in verdicts.into_iter().flatten() {
            ensure!(
                replay(&h, &w) != replay(&target, &w),
                "{case:?}: spurious counterexample"
            );
            cexs += 1;
        }
    }
    Ok(format!(
        "100 pairs agree ({state_bound_runs} with state-bound), {cexs} counterexamples replayed"
    ))
}

fn tmp_dir(tag: &str) -> String {
    let dir = std::env::temp_dir().join(format!("typestate-acceptance-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.to_string_lossy().into_owned()
}

fn run(n: usize, title: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    let secs = start.elapsed().as_secs_f64();
    match &outcome {
        Ok(detail) => println!("criterion {n}: PASS {title} ({secs:.2}s): {detail}"),
        Err(why) => println!("criterion {n}: FAIL {title} ({secs:.2}s): {why}"),
    }
    outcome.is_ok()
}

fn main() {
    // Cargo passes libtest flags to harness-less targets; only listing is honored.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let runs = dist_runs();
    let results = [
        run(1, "exact learning with the perfect oracle", c1_perfect_soundness),
        run(2, "distinguisher oracle completeness", || c2_dist_completeness(&runs)),
        run(3, "learner query and EQ budget", || c3_query_budget(&runs)),
        run(4, "distinguisher bound at most n-1, tight", c4_distinguisher_bound),
        run(5, "benchmark structure", c5_benchmarks),
        run(6, "state-bound query blow-up", c6_query_blowup),
        run(7, "non-determinism detection", c7_nondeterminism),
        run(8, "learning purpose", c8_learning_purpose),
        run(9, "differential oracle agreement", c9_differential),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
