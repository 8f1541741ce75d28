//! Acceptance criteria 1-8. Each criterion prints one line:
//! `criterion N PASS|FAIL <detail>`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use scjc::ast::*;
use scjc::checker::check_program;
use scjc::diag::Diagnostic;
use scjc::frameworks::{self, FrameworkKind};
use scjc::parser::parse_program;
use scjc::pretty;
use scjc::refine::{apply_law1, apply_law2, check_actions, recognize};
use scjc::sim::{Model, Policy, Sim, Verdict};
use scjc::translate::{monolithic, translate_program};

use common::*;

const C1_LIMIT: Duration = Duration::from_secs(1);
const C3_LIMIT: Duration = Duration::from_secs(10);
const C4_LIMIT: Duration = Duration::from_secs(30);
const C4_SEEDS: u64 = 20;
const C4_CYCLES: u64 = 5;
const C6_LIMIT: Duration = Duration::from_secs(60);
const C6_DEPTH: usize = 5;
const C6_SOUND: usize = 200;
const C6_UNSOUND: usize = 100;
const C7_PROGRAMS: u64 = 50;
const C8_DEPTH: usize = 8;
const C2_DEPTH: usize = 6;

/// Criteria known not to be met by the faithful model; they are still run
/// and reported.
const EXPECTED_FAIL: &[u32] = &[4];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn framework_program(extra: &str) -> Program {
    let mut text = String::new();
    for d in frameworks::channel_decls() {
        text.push_str(&pretty::circus_paragraph(&CircusParagraph::Channel(d)));
        text.push('\n');
    }
    for k in FrameworkKind::ALL {
        text.push_str(&pretty::circus_paragraph(&CircusParagraph::Process(k.decl())));
        text.push('\n');
    }
    text.push_str(extra);
    parse_program(&text).unwrap_or_else(|e| panic!("{e:?}"))
}

fn c1() -> Outcome {
    let now = Instant::now();
    let p = match parse_program(S_ANCHOR) {
        Ok(p) => p,
        Err(d) => return outcome(false, format!("parse failed: {d:?}")),
    };
    let diags = check_program(&p);
    if !diags.is_empty() {
        return outcome(false, format!("diagnostics: {diags:?}"));
    }
    let t = match translate_program(&p) {
        Ok(t) => t,
        Err(e) => return outcome(false, e.to_string()),
    };
    let text = t.text();
    let elapsed = now.elapsed();
    let names: Vec<String> = t
        .paragraphs
        .iter()
        .filter_map(|x| match x {
            Paragraph::Circus(CircusParagraph::Process(d)) => Some(d.name.clone()),
            _ => None,
        })
        .collect();
    let apps = names.iter().filter(|n| n.ends_with("_App")).count();
    let composed = ["Safelet", "Sequencer", "Mission", "PeriodicHandler", "AperiodicHandler"]
        .iter()
        .filter(|n| names.iter().filter(|m| m == n).count() == 1)
        .count();
    let application = names.iter().filter(|n| *n == "Application").count();
    let golden = include_str!("golden/s_anchor.circus");
    let matches = text == golden;
    outcome(
        apps == 5 && composed == 5 && application == 1 && matches && elapsed < C1_LIMIT,
        format!(
            "{apps} App, {composed} composed, {application} Application; golden {}; {elapsed:?}",
            if matches { "match" } else { "MISMATCH" }
        ),
    )
}

fn c2() -> Outcome {
    let p = framework_program("ids S, Q\nprocess T = SafeletFW(S)");
    let sim = Sim::new(Model::new(&p, &BTreeMap::new()).unwrap(), "T").unwrap();
    let got = sim.untimed_traces(C2_DEPTH);
    // Control paths: initialise, ask for the sequencer, then either run the
    // returned sequencer or finish when it is null.
    let head = ["safeletInitializeCall.S.S", "safeletInitializeRet.S.S", "getSequencerCall.S.S"];
    let mut maximal: Vec<Vec<String>> = Vec::new();
    let mut null_path: Vec<String> = head.iter().map(|s| s.to_string()).collect();
    null_path.extend(["getSequencerRet.S.S.null".to_string(), "end_safelet_app".to_string()]);
    maximal.push(null_path);
    for v in ["S", "Q"] {
        let mut t: Vec<String> = head.iter().map(|s| s.to_string()).collect();
        t.push(format!("getSequencerRet.S.S.{v}"));
        t.push(format!("start_sequencer.{v}"));
        t.push(format!("done_sequencer.{v}"));
        maximal.push(t);
    }
    let oracle: BTreeSet<Vec<String>> =
        maximal.iter().flat_map(|t| (0..=t.len()).map(move |i| t[..i].to_vec())).collect();
    let equal = got.traces == oracle && !got.partial;
    outcome(equal, format!("{} traces, oracle {}, null and non-null branches", got.traces.len(), oracle.len()))
}

fn c3() -> Outcome {
    let now = Instant::now();
    let mut bad = Vec::new();
    for start in 0..=2u64 {
        for period in 1..=5u64 {
            let p = framework_program(&format!(
                "ids H, O\nprocess Env = begin @ start_peh!O!H!{start}!{period} -> \
                 (mu X @ handleAsyncEventCall?x!H -> handleAsyncEventRet!x!H -> X) end\n\
                 process Main = PEHFW(H) [| {{| start_peh, handleAsyncEventCall, handleAsyncEventRet, done_handler |}} |] Env"
            ));
            let s = Sim::new(Model::new(&p, &BTreeMap::new()).unwrap(), "Main").unwrap();
            let r = s.run(&Policy::Random(start * 10 + period), start + 4 * period + 1);
            let calls: Vec<u64> =
                r.trace.iter().filter(|(_, e)| e.chan == "handleAsyncEventCall").map(|(t, _)| *t).collect();
            let want: Vec<u64> = (0..=4).map(|i| start + i * period).collect();
            if calls.len() < 5 || calls[..5] != want[..] {
                bad.push(format!("start={start} period={period} calls={calls:?}"));
            }
        }
    }
    let elapsed = now.elapsed();
    outcome(bad.is_empty() && elapsed < C3_LIMIT, format!("15 combinations, {} wrong {bad:?}; {elapsed:?}", bad.len()))
}

fn s_anchor_network() -> Program {
    let p = parse_program(S_ANCHOR).unwrap();
    let mut t = translate_program(&p).unwrap().program();
    t.paragraphs.extend(monolithic(&p));
    t
}

fn c4() -> Outcome {
    let net = s_anchor_network();
    let now = Instant::now();
    let sim = Sim::new(Model::new(&net, &consts(6)).unwrap(), "System").unwrap();
    let mut failures = Vec::new();
    for seed in 0..C4_SEEDS {
        let r = sim.run(&Policy::Random(seed), C4_CYCLES * 10);
        if !r.verdict.is_ok() {
            failures.push(format!("seed {seed}: {}", r.verdict));
        }
    }
    let a_time = now.elapsed();
    let a_pass = failures.is_empty() && a_time < C4_LIMIT;

    let now = Instant::now();
    let sim8 = Sim::new(Model::new(&net, &consts(8)).unwrap(), "System").unwrap();
    let found = sim8.search_violation(C4_CYCLES * 10).unwrap();
    let b_time = now.elapsed();
    let b_detail = match &found {
        Some(r) => r.verdict.to_string(),
        None => "none found".into(),
    };
    let b_pass = matches!(found.as_ref().map(|r| &r.verdict), Some(Verdict::DeadlineViolation { .. })) && b_time < C4_LIMIT;
    outcome(
        a_pass && b_pass,
        format!(
            "PD=6: {}/{C4_SEEDS} seeds ok over {C4_CYCLES} cycles ({a_time:?}){}; PD=8 search: {b_detail} ({b_time:?})",
            C4_SEEDS as usize - failures.len(),
            failures.first().map(|f| format!(", first failure {f}")).unwrap_or_default(),
        ),
    )
}

fn c5() -> Outcome {
    // (paragraph, allocation keyword, accepted) written out from the policy table.
    let table = [
        ("safelet", "newI", true),
        ("safelet", "newM", false),
        ("safelet", "newPR", false),
        ("safelet", "newPM", false),
        ("sequencer", "newI", true),
        ("sequencer", "newM", true),
        ("sequencer", "newPR", false),
        ("sequencer", "newPM", false),
        ("mission", "newI", true),
        ("mission", "newM", true),
        ("mission", "newPR", false),
        ("mission", "newPM", false),
        ("handler", "newI", true),
        ("handler", "newM", true),
        ("handler", "newPR", true),
        ("handler", "newPM", true),
    ];
    let mut wrong = Vec::new();
    for (kind, new, accepted) in table {
        let src = match kind {
            "safelet" => format!("safelet S = begin initialize = b := {new} Buf() getSequencer = ret := null end"),
            "sequencer" => format!("sequencer Q = begin getNextMission = b := {new} Buf() ; ret := null end"),
            "mission" => format!("mission M = begin initialize = b := {new} Buf() handlers end"),
            _ => format!("aperiodic handler H = begin handleAsyncEvent = b := {new} Buf() end"),
        };
        let p = parse_program(&src).unwrap();
        let d: Vec<Diagnostic> = check_program(&p);
        let codes: Vec<&str> = d.iter().map(|d| d.code.as_str()).collect();
        let ok = if accepted { codes.is_empty() } else { codes == ["E-ALLOC"] };
        if !ok {
            wrong.push(format!("{kind}x{new}: {codes:?}"));
        }
    }
    let accepted = table.iter().filter(|t| t.2).count();
    outcome(
        wrong.is_empty(),
        format!("{} cases, {accepted} accepted, {} rejected, wrong {wrong:?}", table.len(), table.len() - accepted),
    )
}

fn c6() -> Outcome {
    let now = Instant::now();
    let decls = law_decls();
    let none = BTreeMap::new();
    let consts = BTreeSet::new();
    let mut r = rng(6);
    let mut unsound = Vec::new();
    let mut errors = Vec::new();
    for i in 0..C6_SOUND {
        let (orig, new) = if i % 2 == 0 {
            let c = law1_ok(&mut r);
            match apply_law1(&c.context, &c.filler, c.c1, c.c2, &consts) {
                Ok(n) => (substitute(&c.context, &c.filler).unwrap(), n),
                Err(e) => {
                    errors.push(format!("law1 #{i}: {e}"));
                    continue;
                }
            }
        } else {
            let c = law2_ok(&mut r);
            match apply_law2(&c.target, c.b, &c.branch) {
                Ok(n) => (c.target, n),
                Err(e) => {
                    errors.push(format!("law2 #{i}: {e}"));
                    continue;
                }
            }
        };
        let res = check_actions(&decls, &with_vars(orig.clone()), &with_vars(new.clone()), C6_DEPTH, &none).unwrap();
        if !res.holds || res.partial {
            unsound.push(format!("#{i} {} => {} : {:?}", pretty::action(&orig), pretty::action(&new), res.counterexample));
        }
    }
    let mut accepted = Vec::new();
    for i in 0..C6_UNSOUND {
        let rejected = if i % 2 == 0 {
            let c = law1_bad(&mut r);
            apply_law1(&c.context, &c.filler, c.c1, c.c2, &consts).is_err()
        } else {
            let c = law2_bad(&mut r);
            apply_law2(&c.target, c.b, &c.branch).is_err()
        };
        if !rejected {
            accepted.push(i);
        }
    }
    let elapsed = now.elapsed();
    outcome(
        unsound.is_empty() && errors.is_empty() && accepted.is_empty() && elapsed < C6_LIMIT,
        format!(
            "{}/{C6_SOUND} sound instances refine, {}/{C6_UNSOUND} violating rejected; {elapsed:?}{}",
            C6_SOUND - unsound.len() - errors.len(),
            C6_UNSOUND - accepted.len(),
            unsound.first().or(errors.first()).map(|s| format!("; first problem {s}")).unwrap_or_default()
        ),
    )
}

fn c7() -> Outcome {
    let mut bad = Vec::new();
    let anchor = parse_program(S_ANCHOR).unwrap();
    let mut programs = vec![("s_anchor".to_string(), anchor)];
    let mut r = rng(7);
    for i in 0..C7_PROGRAMS {
        programs.push((format!("generated #{i}"), scj_program(&mut r)));
    }
    for (name, p) in &programs {
        let d = check_program(p);
        if !d.is_empty() {
            bad.push(format!("{name} not well formed: {d:?}"));
            continue;
        }
        let t = translate_program(p).unwrap();
        match recognize(&t.program()) {
            Ok(back) if &back == p => {}
            Ok(_) => bad.push(format!("{name}: round trip differs")),
            Err(e) => bad.push(format!("{name}: {e}")),
        }
    }
    outcome(bad.is_empty(), format!("{} programs, {} failed {:?}", programs.len(), bad.len(), bad.first()))
}

fn c8() -> Outcome {
    let net = s_anchor_network();
    let now = Instant::now();
    let per = Sim::new(Model::new(&net, &consts(6)).unwrap(), "Application").unwrap().traces(C8_DEPTH);
    let mono = Sim::new(Model::new(&net, &consts(6)).unwrap(), "Monolithic").unwrap().traces(C8_DEPTH);
    let extra: Vec<&Vec<String>> = per.traces.difference(&mono.traces).collect();
    outcome(
        extra.is_empty() && !per.partial && !mono.partial,
        format!(
            "{} per-element traces, {} monolithic, {} not contained; {:?}",
            per.traces.len(),
            mono.traces.len(),
            extra.len(),
            now.elapsed()
        ),
    )
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 8] = [(1, c1), (2, c2), (3, c3), (4, c4), (5, c5), (6, c6), (7, c7), (8, c8)];
    let mut unexpected = Vec::new();
    for (n, f) in criteria {
        let o = f();
        println!("criterion {n} {} {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if o.pass == EXPECTED_FAIL.contains(&n) {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("criteria with unexpected outcome: {unexpected:?}");
        std::process::exit(1);
    }
}
