//! Subcommand implementations.

use std::fmt::Write;
use std::path::Path;

use mutseq::explorer::{
    enumerate_mgs, find_mgs, find_reddening, load_store, save_store, verify_total_mutability,
    EdgeColor, ExchangeGraphStore, MutabilityOptions, MutabilityVerdict, ReddeningPath,
    SearchBudget, SearchOptions, SearchOutcome, SearchReport,
};
use mutseq::seqcalc::{
    classify, classify_trace, conjugate, conjugation_difference, red_count_from,
    restrict_to_submatrix, rotate, run_sequence,
};
use mutseq::suite::{run_rank2_suite, run_suite, Suite, SuiteConfig, SuiteResult};
use mutseq::{Matrix, MutationSequence, PatternContext, SequenceTrace, SequenceVerdict};
use serde_json::{json, Value};

use crate::render;
use crate::{BudgetArgs, Cli, CliError, Command, MatrixArg, Output, SeqArg, Status, StoreCommand};

type Result<T> = std::result::Result<T, CliError>;

fn context(m: &MatrixArg) -> Result<PatternContext> {
    Ok(PatternContext::new(crate::input::matrix(&m.matrix)?)?)
}

fn seq_of(s: &SeqArg, n: usize) -> Result<MutationSequence> {
    crate::input::sequence_arg(s.seq.as_deref(), s.seq_file.as_deref(), n)
}

fn budget(b: &BudgetArgs) -> Result<SearchBudget> {
    if b.max_depth == 0 || b.max_nodes == 0 {
        return Err(CliError::Usage(
            "--max-depth and --max-nodes must be positive".into(),
        ));
    }
    Ok(SearchBudget {
        max_depth: b.max_depth,
        max_nodes: b.max_nodes,
    })
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("value serializes")
}

pub fn run(cli: Cli) -> Result<Output> {
    let seed = cli.seed;
    match cli.command {
        Command::Mutate { matrix, seq } => mutate(&matrix, &seq),
        Command::SeedTrace { matrix, seq } => seed_trace(&matrix, &seq),
        Command::Classify { matrix, seq } => classify_cmd(&matrix, &seq),
        Command::Conjugate { matrix, seq, dir } => conjugate_cmd(&matrix, &seq, dir),
        Command::Rotate { matrix, seq, times } => rotate_cmd(&matrix, &seq, times),
        Command::ConjDiff {
            matrix,
            path,
            reddening,
            check,
        } => conj_diff(&matrix, &path, reddening.as_deref(), check.as_deref()),
        Command::Restrict {
            matrix,
            seq,
            indices,
        } => restrict(&matrix, &seq, &indices),
        Command::SearchMgs {
            matrix,
            budget: b,
            heavy_pruning,
            prefix,
            magnitude_bits,
            prune_on_magnitude,
        } => {
            let opts = SearchOptions {
                heavy_pruning,
                magnitude_bits,
                prune_on_magnitude,
                ..search_options(&b)
            };
            search(&matrix, opts, prefix.as_deref(), true)
        }
        Command::SearchReddening {
            matrix,
            budget: b,
            prefix,
            magnitude_bits,
            prune_on_magnitude,
        } => {
            let opts = SearchOptions {
                magnitude_bits,
                prune_on_magnitude,
                ..search_options(&b)
            };
            search(&matrix, opts, prefix.as_deref(), false)
        }
        Command::EnumerateMgs {
            matrix,
            max_len,
            heavy_pruning,
        } => enumerate(&matrix, max_len, heavy_pruning),
        Command::ExchangeGraph {
            matrix,
            budget: b,
            workers,
            out,
            reddening_path,
        } => {
            let b0 = crate::input::matrix(&matrix.matrix)?;
            let store = ExchangeGraphStore::build(b0, budget(&b)?, workers.max(1))?;
            if let Some(path) = &out {
                save_store(&store, path)?;
            }
            graph_summary(&store, out.as_deref(), reddening_path)
        }
        Command::Verify {
            matrix,
            suite,
            paths,
            max_len,
            corrupt,
            total_mutability,
        } => {
            let cfg = SuiteConfig {
                seed,
                paths,
                max_len,
                corrupt,
                ..SuiteConfig::default()
            };
            verify(matrix.as_deref(), &suite, &cfg, total_mutability)
        }
        Command::Store { command } => store(command),
    }
}

fn search_options(b: &BudgetArgs) -> SearchOptions {
    SearchOptions {
        budget: SearchBudget {
            max_depth: b.max_depth,
            max_nodes: b.max_nodes,
        },
        ..SearchOptions::default()
    }
}

fn mutate(m: &MatrixArg, s: &SeqArg) -> Result<Output> {
    let b = crate::input::matrix(&m.matrix)?;
    let seq = seq_of(s, b.n())?;
    let mut cur = b;
    for &k in &seq.dirs {
        cur = cur.mutate(k)?;
    }
    let ssk = cur.is_sign_skew_symmetric();
    let mut text = format!("μ_{seq}(B) =\n{}", render::indented(&cur));
    if !ssk {
        text.push_str("warning: the result is not sign-skew-symmetric\n");
    }
    Ok(Output::ok(
        json!({ "seq": seq.dirs, "matrix": to_json(&cur), "sign_skew_symmetric": ssk }),
        text,
    ))
}

fn steps_json(trace: &SequenceTrace) -> Value {
    let steps: Vec<Value> = trace
        .dirs
        .iter()
        .zip(&trace.cvecs)
        .enumerate()
        .map(|(s, (dir, cvec))| {
            json!({
                "step": s + 1,
                "dir": dir,
                "cvec": to_json(cvec),
                "color": if trace.is_red(s) { "red" } else { "green" },
            })
        })
        .collect();
    Value::Array(steps)
}

fn seed_trace(m: &MatrixArg, s: &SeqArg) -> Result<Output> {
    let ctx = context(m)?;
    let seq = seq_of(s, ctx.n())?;
    let trace = run_sequence(&ctx, &seq)?;
    let last = trace.last();
    let mut text = render::trace_table(&trace);
    let _ = write!(
        text,
        "B =\n{}C (columns marked + green, - red) =\n{}G =\n{}",
        render::indented(&last.seed.b),
        render::colored_c(&last.seed.c),
        render::indented(&last.seed.g)
    );
    let json = json!({ "seq": seq.dirs, "steps": steps_json(&trace), "seed": to_json(last) });
    Ok(Output::ok(json, text))
}

fn verdict_json(seq: &MutationSequence, v: &SequenceVerdict) -> Value {
    let mut obj = to_json(v);
    obj["seq"] = to_json(&seq.dirs);
    obj
}

fn classify_cmd(m: &MatrixArg, s: &SeqArg) -> Result<Output> {
    let ctx = context(m)?;
    let seq = seq_of(s, ctx.n())?;
    let trace = run_sequence(&ctx, &seq)?;
    let v = classify_trace(&trace)?;
    let text = format!(
        "{}final C =\n{}{}\n",
        render::trace_table(&trace),
        render::colored_c(&trace.last().seed.c),
        render::verdict(&v)
    );
    let mut json = verdict_json(&seq, &v);
    json["steps"] = steps_json(&trace);
    Ok(Output::ok(json, text))
}

/// Checks a predicted verdict on its matrix.
fn check_prediction(
    matrix: &Matrix,
    seq: &MutationSequence,
    expected: &SequenceVerdict,
) -> Result<(SequenceVerdict, bool)> {
    let actual = classify(&PatternContext::new(matrix.clone())?, seq)?;
    let ok = &actual == expected;
    Ok((actual, ok))
}

fn conjugate_cmd(m: &MatrixArg, s: &SeqArg, j: usize) -> Result<Output> {
    let ctx = context(m)?;
    let seq = seq_of(s, ctx.n())?;
    crate::input::validated(MutationSequence::new(vec![j]), ctx.n())?;
    let t = conjugate(&ctx, &seq, j)?;
    let (actual, ok) = check_prediction(&t.matrix, &t.seq, &t.expected)?;
    let text = format!(
        "conjugate of {seq} in direction {j}: {}\non μ_{j}(B) =\n{}expected: {}\nactual:   {}\n{}\n",
        t.seq,
        render::indented(&t.matrix),
        render::verdict(&t.expected),
        render::verdict(&actual),
        if ok { "prediction holds" } else { "PREDICTION FAILS" }
    );
    let json = json!({
        "seq": t.seq.dirs,
        "matrix": to_json(&t.matrix),
        "expected": to_json(&t.expected),
        "actual": to_json(&actual),
        "holds": ok,
    });
    let out = Output::ok(json, text);
    Ok(if ok {
        out
    } else {
        out.with_status(Status::Failed)
    })
}

fn rotate_cmd(m: &MatrixArg, s: &SeqArg, times: usize) -> Result<Output> {
    let mut ctx = context(m)?;
    let mut seq = seq_of(s, ctx.n())?;
    let mut text = String::new();
    let mut rounds = Vec::new();
    let mut all_ok = true;
    for round in 1..=times {
        let t = rotate(&ctx, &seq)?;
        let (actual, ok) = check_prediction(&t.matrix, &t.seq, &t.expected)?;
        all_ok &= ok;
        let _ = write!(
            text,
            "rotation {round}: {} on\n{}  expected {}\n  actual   {}\n",
            t.seq,
            render::indented(&t.matrix),
            render::verdict(&t.expected),
            render::verdict(&actual)
        );
        rounds.push(json!({
            "seq": t.seq.dirs,
            "matrix": to_json(&t.matrix),
            "expected": to_json(&t.expected),
            "actual": to_json(&actual),
            "holds": ok,
        }));
        ctx = PatternContext::new(t.matrix)?;
        seq = t.seq;
    }
    text.push_str(if all_ok {
        "prediction holds\n"
    } else {
        "PREDICTION FAILS\n"
    });
    let out = Output::ok(json!({ "rotations": rounds, "holds": all_ok }), text);
    Ok(if all_ok {
        out
    } else {
        out.with_status(Status::Failed)
    })
}

fn conj_diff(
    m: &MatrixArg,
    path: &str,
    reddening: Option<&str>,
    check: Option<&str>,
) -> Result<Output> {
    let ctx = context(m)?;
    let n = ctx.n();
    let path = crate::input::validated(crate::input::sequence(path)?, n)?;
    let red = match reddening {
        Some(r) => crate::input::validated(crate::input::sequence(r)?, n)?,
        None => {
            let report = find_reddening(ctx.b0(), &SearchOptions::default())?;
            match report.found() {
                Some(s) => s.clone(),
                None => {
                    return Err(CliError::Domain(
                        "no reddening sequence of the initial matrix found; pass --reddening"
                            .into(),
                    ))
                }
            }
        }
    };
    let d = conjugation_difference(&ctx, &path, &red)?;
    let vertex = ctx.walk(&ctx.initial_seed(), &path.dirs)?;
    let mut text = format!(
        "vertex t = μ_{path}(t0), B_t =\n{}t0⁻ from {red}, σ = {}\nred steps from t back to t0:   {}\nred steps from t⁻ back to t0⁻: {}\nconjugation difference φ = {}\n",
        render::indented(&vertex.seed.b),
        render::perm(&Some(d.perm.clone())),
        d.path_red,
        d.shadow_red,
        d.phi
    );
    let mut json = json!({
        "path": path.dirs,
        "reddening": red.dirs,
        "phi": d.phi,
        "path_red": d.path_red,
        "shadow_red": d.shadow_red,
        "perm": to_json(&d.perm),
        "vertex_matrix": to_json(&vertex.seed.b),
    });
    let mut status = Status::Ok;
    if let Some(c) = check {
        let seq = crate::input::validated(crate::input::sequence(c)?, n)?;
        let local = classify(&PatternContext::new(vertex.seed.b.clone())?, &seq)?;
        if !local.is_reddening() {
            return Err(CliError::Domain(format!(
                "{seq} is not a reddening sequence of B_t ({local})"
            )));
        }
        let global = red_count_from(&ctx, &vertex, &seq.dirs)?;
        let holds = global as i64 == local.r as i64 + d.phi && d.phi <= global as i64;
        if !holds {
            status = Status::Failed;
        }
        let _ = writeln!(
            text,
            "{seq}: {} red steps for B_t, {global} in the initial pattern; {} + φ = {} ({})",
            local.r,
            local.r,
            local.r as i64 + d.phi,
            if holds { "holds" } else { "FAILS" }
        );
        json["check"] =
            json!({ "seq": seq.dirs, "local_red": local.r, "initial_red": global, "holds": holds });
    }
    Ok(Output::ok(json, text).with_status(status))
}

fn restrict(m: &MatrixArg, s: &SeqArg, indices: &str) -> Result<Output> {
    let ctx = context(m)?;
    let seq = seq_of(s, ctx.n())?;
    let v = crate::input::indices(indices, ctx.n())?;
    let r = restrict_to_submatrix(&ctx, &seq, &v)?;
    let verdict = classify(&PatternContext::new(r.matrix.clone())?, &r.seq)?;
    let text = format!(
        "B^V for V = {:?} =\n{}induced sequence: {}\n{}\n",
        r.indices,
        render::indented(&r.matrix),
        r.seq,
        render::verdict(&verdict)
    );
    let json = json!({
        "indices": r.indices,
        "matrix": to_json(&r.matrix),
        "seq": r.seq.dirs,
        "verdict": to_json(&verdict),
    });
    Ok(Output::ok(json, text))
}

fn search(
    m: &MatrixArg,
    mut opts: SearchOptions,
    prefix: Option<&str>,
    mgs: bool,
) -> Result<Output> {
    let b0 = crate::input::matrix(&m.matrix)?;
    let n = b0.n();
    opts.budget = budget(&BudgetArgs {
        max_depth: opts.budget.max_depth,
        max_nodes: opts.budget.max_nodes,
    })?;
    if let Some(p) = prefix {
        opts.forced_prefix = crate::input::validated(crate::input::sequence(p)?, n)?.dirs;
    }
    let report: SearchReport = if mgs {
        find_mgs(&b0, &opts)?
    } else {
        find_reddening(&b0, &opts)?
    };
    let what = if mgs {
        "maximal green sequence"
    } else {
        "reddening sequence"
    };
    let mut json = to_json(&report);
    let (text, status) = match &report.outcome {
        SearchOutcome::Found { seq } => {
            let v = classify(&PatternContext::new(b0.clone())?, seq)?;
            json["verdict"] = to_json(&v);
            (format!("found {what} {seq} of length {}\n{}\n", seq.len(), render::verdict(&v)), Status::Ok)
        }
        SearchOutcome::Exhausted => (format!("no {what} exists with the given prefix\n"), Status::Failed),
        SearchOutcome::CertifiedNone { certificate } => (
            format!(
                "no {what} starts with {}: green c-vectors grow without bound (witness at step {})\n",
                certificate.first, certificate.witness_step
            ),
            Status::Failed,
        ),
        SearchOutcome::BudgetExhausted => {
            let msg = if mgs {
                format!("budget exhausted (MGS length ≥ n = {n})")
            } else {
                "budget exhausted".to_string()
            };
            json["message"] = Value::String(msg.clone());
            (format!("{msg}\n"), Status::BudgetExhausted)
        }
    };
    let text = format!("{text}states: {}, depth: {}\n", report.nodes, report.depth);
    Ok(Output { json, text, status })
}

fn enumerate(m: &MatrixArg, max_len: usize, heavy_pruning: bool) -> Result<Output> {
    let b0 = crate::input::matrix(&m.matrix)?;
    let all = enumerate_mgs(&b0, max_len, heavy_pruning)?;
    let mut text = String::new();
    for s in &all {
        let _ = writeln!(text, "{s}");
    }
    let _ = writeln!(
        text,
        "{} maximal green sequences of length ≤ {max_len}",
        all.len()
    );
    let seqs: Vec<&Vec<usize>> = all.iter().map(|s| &s.dirs).collect();
    Ok(Output::ok(
        json!({ "max_len": max_len, "count": all.len(), "sequences": seqs }),
        text,
    ))
}

fn path_json(p: &ReddeningPath) -> Value {
    json!({ "seq": p.seq.dirs, "red": p.red, "target": p.target })
}

fn graph_summary(
    store: &ExchangeGraphStore,
    saved: Option<&Path>,
    reddening_path: bool,
) -> Result<Output> {
    let green = store
        .edges()
        .iter()
        .filter(|e| e.color == EdgeColor::Green)
        .count();
    let red = store.edges().len() - green;
    let depth = store.nodes().iter().map(|n| n.depth).max().unwrap_or(0);
    let truncated = store.is_truncated();
    let mut text = format!(
        "nodes: {}\nedges: {} ({green} green, {red} red)\ndepth reached: {depth}\ntruncated: {truncated}\n",
        store.nodes().len(),
        store.edges().len()
    );
    let mut json = json!({
        "nodes": store.nodes().len(),
        "edges": store.edges().len(),
        "green_edges": green,
        "red_edges": red,
        "depth": depth,
        "truncated": truncated,
    });
    if let Some(p) = saved {
        let _ = writeln!(text, "saved to {}", p.display());
        json["store"] = Value::String(p.display().to_string());
    }
    if reddening_path {
        match store.reddening_path() {
            Some(p) => {
                let _ = writeln!(
                    text,
                    "reddening path {} with {} red arrows to node {}",
                    p.seq, p.red, p.target
                );
                json["reddening_path"] = path_json(&p);
            }
            None => {
                text.push_str("no all-red vertex explored\n");
                json["reddening_path"] = Value::Null;
            }
        }
    }
    let status = if truncated {
        let msg = format!(
            "budget exhausted (exploration truncated at {} nodes)",
            store.nodes().len()
        );
        let _ = writeln!(text, "{msg}");
        json["message"] = Value::String(msg);
        Status::BudgetExhausted
    } else {
        Status::Ok
    };
    Ok(Output { json, text, status })
}

fn suite_line(r: &SuiteResult) -> String {
    let mut s = match (&r.skipped, r.passed()) {
        (Some(why), _) => format!("{:<12} SKIP  ({why})\n", r.suite.name()),
        (None, true) => format!("{:<12} PASS  ({} checks)\n", r.suite.name(), r.checked),
        (None, false) => format!(
            "{:<12} FAIL  ({} of {} checks failed)\n",
            r.suite.name(),
            r.violations.len(),
            r.checked
        ),
    };
    for v in &r.violations {
        let _ = writeln!(s, "  counterexample: {}", v.replace('\n', "\n    "));
    }
    s
}

fn verify(
    matrix: Option<&str>,
    suite: &str,
    cfg: &SuiteConfig,
    total_mutability: Option<usize>,
) -> Result<Output> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        suite
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<Suite>()
                    .map_err(|e| CliError::Usage(e.to_string()))
            })
            .collect::<Result<_>>()?
    };
    let b = matrix.map(crate::input::matrix).transpose()?;
    if let Some(b) = &b {
        b.require_sign_skew_symmetric()?;
    }
    let mut results = Vec::new();
    for s in suites {
        let r = match (&b, s) {
            (Some(b), _) => run_suite(b, s, cfg)?,
            (None, Suite::Rank2) => run_rank2_suite(None, cfg)?,
            (None, _) => return Err(CliError::Usage(format!("suite {s} needs --matrix"))),
        };
        results.push(r);
    }
    let mut text: String = results.iter().map(suite_line).collect();
    let mut passed = results.iter().all(SuiteResult::passed);
    let mut json = json!({ "seed": cfg.seed, "passed": passed, "suites": to_json(&results) });
    if let Some(depth) = total_mutability {
        let b = b
            .as_ref()
            .ok_or_else(|| CliError::Usage("--total-mutability needs --matrix".into()))?;
        let verdict = verify_total_mutability(
            b,
            MutabilityOptions {
                depth,
                ..MutabilityOptions::default()
            },
        )?;
        let line = match &verdict {
            MutabilityVerdict::AcyclicShortcut => "verified (acyclic)".to_string(),
            MutabilityVerdict::SkewSymmetrizableShortcut => {
                "verified (skew-symmetrizable)".to_string()
            }
            MutabilityVerdict::VerifiedToDepth {
                depth,
                matrices,
                complete,
            } => format!(
                "verified to depth {depth} ({matrices} matrices{})",
                if *complete {
                    ", mutation class exhausted"
                } else {
                    ""
                }
            ),
            MutabilityVerdict::Refuted { path } => {
                passed = false;
                format!("refuted: mutating along {path:?} leaves the sign-skew-symmetric class")
            }
        };
        let _ = writeln!(text, "{:<12} {line}", "mutability");
        json["total_mutability"] = to_json(&verdict);
        json["passed"] = Value::Bool(passed);
    }
    let out = Output::ok(json, text);
    Ok(if passed {
        out
    } else {
        out.with_status(Status::Failed)
    })
}

fn store(cmd: StoreCommand) -> Result<Output> {
    match cmd {
        StoreCommand::Info { file } => {
            let store = load_store(&file)?;
            let mut out = graph_summary(&store, None, false)?;
            out.json["b0"] = to_json(store.b0());
            out.json["budget"] = to_json(&store.budget());
            out.text = format!("B0 =\n{}{}", render::indented(store.b0()), out.text);
            // a truncated store is a normal thing to inspect
            Ok(out.with_status(Status::Ok))
        }
        StoreCommand::Check { file } => {
            let store = load_store(&file)?;
            let text = format!(
                "ok: {} nodes, {} edges\n",
                store.nodes().len(),
                store.edges().len()
            );
            Ok(Output::ok(
                json!({ "ok": true, "nodes": store.nodes().len(), "edges": store.edges().len() }),
                text,
            ))
        }
        StoreCommand::Path {
            file,
            to,
            reddening,
        } => {
            let store = load_store(&file)?;
            let path = if reddening {
                store.reddening_path()
            } else {
                let id = to.expect("clap requires --to or --reddening");
                if id >= store.nodes().len() {
                    return Err(CliError::Usage(format!(
                        "no node {id} (store has {})",
                        store.nodes().len()
                    )));
                }
                store.path_to(id)
            };
            match path {
                Some(p) => {
                    let text =
                        format!("{} with {} red arrows to node {}\n", p.seq, p.red, p.target);
                    Ok(Output::ok(path_json(&p), text))
                }
                None => Err(CliError::Domain(
                    "no such path in the explored graph".into(),
                )),
            }
        }
        StoreCommand::Expand {
            file,
            budget: b,
            workers,
            out,
        } => {
            let mut store = load_store(&file)?;
            store.expand(budget(&b)?, workers.max(1))?;
            let target = out.unwrap_or(file);
            save_store(&store, &target)?;
            graph_summary(&store, Some(&target), false)
        }
    }
}
