//! Acceptance suite: one PASS/FAIL line per criterion, exact arithmetic
//! throughout. Runs without the libtest harness so the lines always print.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use disprop_core::baseline::sliding_knife_equal;
use disprop_core::conjecture::{search_witness, witness_residuals, SearchOptions, SearchOutcome};
use disprop_core::division::read_instance;
use disprop_core::instances::{
    count_support_cuts, lower_bound_instance, oracle_min_cuts, random_instance, BestCuts, LowerBoundParams,
};
use disprop_core::pair::circle_lemma;
use disprop_core::rational::q;
use disprop_core::solver::{check_trace, solve, PieceTrace, Solution, TraceNode};
use disprop_core::{cut_count_bound, verify, Instance, Measure, Rational};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn core_data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name)
}

/// The fixed corpus of criterion 1: seeds 0..1000, n cycling through 2..=8.
fn bound_corpus() -> Vec<Instance> {
    (0..1000u64)
        .map(|seed| random_instance(2 + (seed % 7) as usize, 6, 0x7e0_0000 + seed).unwrap())
        .collect()
}

fn criterion_1(corpus: &[Instance], solutions: &[Solution], elapsed: Duration) -> Check {
    for (k, (inst, sol)) in corpus.iter().zip(solutions).enumerate() {
        let report = verify(inst, &sol.division).map_err(|e| format!("instance {k}: {e}"))?;
        ensure(report.valid, || format!("instance {k}: invalid division, surplus {:?}", report.surplus))?;
        let bound = cut_count_bound(inst.n()).unwrap();
        ensure(sol.division.cut_count() <= bound, || {
            format!("instance {k}: {} cuts > 3n − 4 = {bound}", sol.division.cut_count())
        })?;
    }
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    let worst = corpus
        .iter()
        .zip(solutions)
        .filter(|(i, s)| s.division.cut_count() == cut_count_bound(i.n()).unwrap())
        .count();
    Ok(format!(
        "1000 instances valid within 3n − 4 cuts ({worst} meet the bound), solved in {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn criterion_2() -> Check {
    let mut nontrivial = 0;
    for seed in 0..500u64 {
        let a = random_instance(2, 6, 0x1e33_0000 + seed).unwrap();
        let b = random_instance(3, 6, 0x2e33_0000 + seed).unwrap();
        let (m_eq, m_ge) = (&a.measures[0], &a.measures[1]);
        let alpha = match seed % 50 {
            0 => Rational::zero(),
            1 => Rational::one(),
            _ => b.demands[0].clone(),
        };
        let lemma = circle_lemma(m_eq, m_ge, &alpha).map_err(|e| format!("triple {seed}: {e}"))?;
        ensure(m_eq.arc_mass(&lemma.arc) == alpha, || format!("triple {seed}: μ(X) ≠ α"))?;
        ensure(m_ge.arc_mass(&lemma.arc) >= alpha, || format!("triple {seed}: μ′(X) < α"))?;
        ensure(lemma.candidate_mass_sum == Rational::from_bigint(lemma.p.clone()), || {
            format!("triple {seed}: certificate {} ≠ p = {}", lemma.candidate_mass_sum, lemma.p)
        })?;
        if !lemma.is_trivial() {
            nontrivial += 1;
        }
    }
    Ok(format!("500 triples exact, {nontrivial} with 0 < α < 1"))
}

fn f(n: usize) -> usize {
    cut_count_bound(n.max(1)).unwrap()
}

/// Independent walk of the recurrence bookkeeping:
/// `cuts ≤ (#pieces − 1) + Σ f(child) ≤ f(n)` with child sizes `k`, `n + 1 − k`.
fn recurrence_ok(node: &TraceNode) -> Result<usize, String> {
    let n = node.active.len();
    let mut rhs = node.pieces.len() - 1;
    let mut sizes = Vec::new();
    for piece in &node.pieces {
        if let PieceTrace::Child { node: child, agents, .. } = piece {
            recurrence_ok(child)?;
            sizes.push(agents.len());
            rhs += f(agents.len());
        }
    }
    ensure(node.cuts <= rhs && rhs <= f(n), || {
        format!("{}: cuts {} ≤ {rhs} ≤ f({n}) = {} fails", node.step.tag(), node.cuts, f(n))
    })?;
    if sizes.len() == 2 {
        ensure(sizes[0] + sizes[1] <= n + 1 && sizes.iter().all(|&k| k < n), || {
            format!("child sizes {sizes:?} for n = {n}")
        })?;
    }
    Ok(n)
}

fn criterion_3(corpus: &[Instance], solutions: &[Solution]) -> Check {
    let mut nodes = 0;
    for (k, (inst, sol)) in corpus.iter().zip(solutions).enumerate() {
        check_trace(inst, &sol.trace).map_err(|e| format!("instance {k}: {e}"))?;
        recurrence_ok(&sol.trace.root).map_err(|e| format!("instance {k}: {e}"))?;
        sol.trace.root.walk(&mut |_| nodes += 1);
    }
    Ok(format!("1000 traces replayed, {nodes} nodes satisfy the recurrence"))
}

fn criterion_4() -> Check {
    let mut equal = 0;
    for n in 1..=8usize {
        for seed in 0..25u64 {
            let base = random_instance(n, 6, 0x4e00_0000 + 100 * n as u64 + seed).unwrap();
            let inst = Instance::new_strict(base.measures, vec![q(1, n as i64); n]).unwrap();
            let div = sliding_knife_equal(&inst).map_err(|e| e.to_string())?;
            ensure(div.cut_count() == n - 1, || format!("n = {n}, seed {seed}: {} cuts", div.cut_count()))?;
            ensure(verify(&inst, &div).unwrap().valid, || format!("n = {n}, seed {seed}: invalid"))?;
            equal += 1;
        }
    }
    for seed in 0..300u64 {
        let inst = random_instance(2, 6, 0x4f00_0000 + seed).unwrap();
        let sol = solve(&inst).unwrap();
        ensure(sol.division.cut_count() <= 2, || format!("pair seed {seed}: {} cuts", sol.division.cut_count()))?;
        ensure(verify(&inst, &sol.division).unwrap().valid, || format!("pair seed {seed}: invalid"))?;
    }
    Ok(format!("{equal} equal-demand knives with n − 1 cuts, 300 pairs within 2 cuts"))
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let p2 = LowerBoundParams::new(2, q(1, 100), q(1, 1_000_000)).unwrap();
    let inst2 = lower_bound_instance(&p2).unwrap();
    let one = oracle_min_cuts(&inst2, 1, 2).map_err(|e| e.to_string())?;
    ensure(one.best_cuts == BestCuts::InfeasibleOnGrid && one.evidence_only, || {
        format!("max_cuts = 1 gave {:?}", one.best_cuts)
    })?;
    let two = oracle_min_cuts(&inst2, 2, 2).map_err(|e| e.to_string())?;
    ensure(two.best_cuts == BestCuts::Cuts(2), || format!("max_cuts = 2 gave {:?}", two.best_cuts))?;
    let w = two.witness.as_ref().ok_or("no witness")?;
    ensure(verify(&inst2, w).unwrap().valid, || "oracle witness fails verify".into())?;
    let (a, b) = p2.support(1);
    ensure(w.cuts.iter().all(|c| *c >= a && *c <= b), || format!("witness cuts {:?} leave the support", w.cuts))?;
    let oracle_time = start.elapsed();
    ensure(oracle_time < Duration::from_secs(120), || format!("oracle took {oracle_time:?}"))?;

    let p3 = LowerBoundParams::practical(3).unwrap();
    let inst3 = lower_bound_instance(&p3).unwrap();
    let sol = solve(&inst3).unwrap();
    ensure(verify(&inst3, &sol.division).unwrap().valid, || "n = 3 solver output invalid".into())?;
    let cuts = sol.division.cut_count();
    ensure((4..=5).contains(&cuts), || format!("n = 3 solver used {cuts} cuts"))?;
    let counts = count_support_cuts(&p3, &sol.division);
    ensure(counts.iter().all(|&c| c >= 2), || format!("support counts {counts:?}"))?;
    Ok(format!(
        "n = 2: no 1-cut division on the grid, 2-cut witness in the support; n = 3: {cuts} cuts, support counts {counts:?}; oracle {:.2}s",
        oracle_time.as_secs_f64()
    ))
}

fn criterion_6() -> Check {
    let opts = |refine| SearchOptions { refine, ..Default::default() };
    for seed in 0..200u64 {
        let inst = random_instance(2, 6, 0x6e00_0000 + seed).unwrap();
        let res = search_witness(&inst, &opts(1)).map_err(|e| format!("seed {seed}: {e}"))?;
        let w = res.outcome.witness().ok_or_else(|| format!("seed {seed}: CERTIFIED_NONE on two agents"))?;
        let r = witness_residuals(&inst, &w.p, &w.arc).unwrap();
        ensure(r[0].is_zero() && r[1].is_zero(), || format!("seed {seed}: residuals {r:?}"))?;
    }

    let golden = read_instance(&std::fs::read_to_string(core_data("random_3_4_7.json")).unwrap(), true).unwrap();
    let thirds = Instance::new_strict(vec![Measure::uniform(); 3], vec![q(1, 3); 3]).unwrap();
    let mut outcomes = Vec::new();
    for inst in [&golden, &thirds] {
        let base = search_witness(inst, &opts(1)).map_err(|e| e.to_string())?;
        for refine in [2, 3] {
            let finer = search_witness(inst, &opts(refine)).map_err(|e| e.to_string())?;
            ensure(finer.outcome == base.outcome, || format!("refine {refine} changed the outcome"))?;
        }
        if let SearchOutcome::Witness { witness } = &base.outcome {
            for rho in [q(2, 7), q(1, 3)] {
                let rotated = Instance::new_strict(
                    inst.measures.iter().map(|m| m.rotate(&rho)).collect(),
                    inst.demands.clone(),
                )
                .unwrap();
                let r = witness_residuals(&rotated, &witness.p, &witness.arc.rotate(&rho)).unwrap();
                ensure(r[0].is_zero() && r[1].is_zero(), || format!("rotation by {rho} broke the witness"))?;
                let again = search_witness(&rotated, &opts(1)).map_err(|e| e.to_string())?;
                ensure(again.outcome.witness().is_some(), || format!("rotated by {rho}: no witness"))?;
            }
        }
        outcomes.push(match base.outcome {
            SearchOutcome::Witness { .. } => "witness",
            SearchOutcome::CertifiedNone => "CERTIFIED_NONE",
        });
    }
    Ok(format!(
        "200/200 two-agent witnesses with zero residuals; n = 3 golden outcomes {outcomes:?} stable under refinement and rotation"
    ))
}

fn disprop(dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_disprop"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(0), || {
        format!("{args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(out.stdout)
}

fn criterion_7() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let golden = core_data("random_3_4_7.json");
    std::fs::copy(&golden, d.join("golden.json")).map_err(|e| e.to_string())?;
    let pair = random_instance(2, 5, 77).unwrap();
    std::fs::write(d.join("pair.json"), disprop_core::division::write_instance(&pair)).unwrap();
    let base = random_instance(4, 5, 78).unwrap();
    let equal = Instance::new_strict(base.measures, vec![q(1, 4); 4]).unwrap();
    std::fs::write(d.join("equal.json"), disprop_core::division::write_instance(&equal)).unwrap();

    let runs: &[(&str, &[&str], &[&str])] = &[
        ("generate lowerbound", &["generate", "--family", "lowerbound", "--n", "3", "--out", "{}lb.json"], &["lb.json"]),
        ("generate random", &["generate", "--family", "random", "--n", "5", "--seed", "9", "--out", "{}r.json"], &["r.json"]),
        ("solve", &["solve", "--in", "golden.json", "--out", "{}div.json", "--trace", "{}trace.json", "--check"], &["div.json", "trace.json"]),
        ("verify", &["verify", "--in", "golden.json", "--div", "{}div.json", "--out", "{}report.json"], &["report.json"]),
        ("pair", &["pair", "--in", "pair.json", "--explain", "--out", "{}pair_out.json"], &["pair_out.json"]),
        ("baseline sliding", &["baseline", "--in", "equal.json", "--method", "sliding", "--out", "{}sk.json"], &["sk.json"]),
        ("baseline denominator", &["baseline", "--in", "equal.json", "--method", "denominator", "--out", "{}cd.json"], &["cd.json"]),
        ("oracle", &["oracle", "--in", "{}lb.json", "--max-cuts", "3", "--out", "{}oracle.json"], &["oracle.json"]),
        ("conjecture search", &["conjecture", "search", "--in", "golden.json", "--refine", "2", "--out", "{}cs.json"], &["cs.json"]),
        ("conjecture campaign", &["conjecture", "campaign", "--n", "3", "--count", "6", "--seed", "5", "--out", "{}camp.jsonl", "--counterexamples", "{}cx"], &["camp.jsonl"]),
    ];
    for (name, args, outputs) in runs {
        let mut artifacts: Vec<Vec<Vec<u8>>> = Vec::new();
        for round in ["a_", "b_"] {
            let args: Vec<String> = args.iter().map(|a| a.replace("{}", round)).collect();
            // inputs produced by an earlier step always come from round a
            let args: Vec<String> = args
                .iter()
                .enumerate()
                .map(|(k, a)| {
                    let is_input = k > 0 && matches!(args[k - 1].as_str(), "--in" | "--div");
                    if is_input { a.replace("b_", "a_") } else { a.clone() }
                })
                .collect();
            let refs: Vec<&str> = args.iter().map(String::as_str).collect();
            let stdout = disprop(d, &refs).map_err(|e| format!("{name}: {e}"))?;
            let mut files = vec![stdout];
            for o in outputs.iter() {
                files.push(std::fs::read(d.join(format!("{round}{o}"))).map_err(|e| format!("{name}: {e}"))?);
            }
            artifacts.push(files);
        }
        ensure(artifacts[0] == artifacts[1], || format!("{name}: artifacts differ between runs"))?;
    }
    let one = disprop(d, &["conjecture", "campaign", "--n", "3", "--count", "6", "--seed", "5", "--out", "j1.jsonl"])?;
    let three = disprop(d, &["conjecture", "campaign", "--n", "3", "--count", "6", "--seed", "5", "--jobs", "3", "--out", "j3.jsonl"])?;
    ensure(one == three && std::fs::read(d.join("j1.jsonl")).unwrap() == std::fs::read(d.join("j3.jsonl")).unwrap(), || {
        "campaign output depends on --jobs".into()
    })?;
    Ok(format!("{} subcommand runs byte-identical on rerun, campaign independent of --jobs", runs.len()))
}

fn report(number: usize, title: &str, check: impl FnOnce() -> Check) -> bool {
    let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    match result {
        Ok(detail) => {
            println!("criterion {number} PASS  {title}: {detail}");
            true
        }
        Err(why) => {
            println!("criterion {number} FAIL  {title}: {why}");
            false
        }
    }
}

fn main() -> ExitCode {
    let corpus = bound_corpus();
    let start = Instant::now();
    let solutions: Result<Vec<Solution>, String> = corpus
        .iter()
        .enumerate()
        .map(|(k, inst)| solve(inst).map_err(|e| format!("instance {k}: {e}")))
        .collect();
    let elapsed = start.elapsed();

    let mut ok = true;
    match &solutions {
        Ok(sols) => {
            ok &= report(1, "3n − 4 bound on random instances", || criterion_1(&corpus, sols, elapsed));
            ok &= report(2, "two-agent circle lemma", criterion_2);
            ok &= report(3, "trace replay and recurrence accounting", || criterion_3(&corpus, sols));
        }
        Err(e) => {
            for (k, title) in [(1, "3n − 4 bound on random instances"), (3, "trace replay and recurrence accounting")] {
                ok &= report(k, title, || Err(e.clone()));
            }
            ok &= report(2, "two-agent circle lemma", criterion_2);
        }
    }
    ok &= report(4, "base-case cut counts", criterion_4);
    ok &= report(5, "lower-bound family at desk scale", criterion_5);
    ok &= report(6, "circle partition search", criterion_6);
    ok &= report(7, "determinism of every subcommand", criterion_7);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
