use std::collections::BTreeMap;

use scjc::ast::*;
use scjc::frameworks::{self, FrameworkKind};
use scjc::parser::parse_program;
use scjc::pretty;
use scjc::sim::{Model, Policy, Sim, Verdict};

fn with_frameworks(extra: &str) -> Program {
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

fn sim(src: &str, main: &str) -> Sim {
    let p = parse_program(src).unwrap();
    Sim::new(Model::new(&p, &BTreeMap::new()).unwrap(), main).unwrap()
}

#[test]
fn skip_runs_to_termination() {
    let s = sim("process P = begin @ Skip end", "P");
    let r = s.run(&Policy::Random(1), 10);
    assert!(r.trace.is_empty());
    assert_eq!(r.verdict, Verdict::Ok { clock: 0, terminated: true });
    assert_eq!(s.traces(5).traces.len(), 1);
}

#[test]
fn choice_traces() {
    let s = sim("channel a, b\nprocess P = begin @ a -> Skip [] b -> Skip end", "P");
    let t = s.traces(1);
    let got: Vec<String> = t.traces.iter().map(|t| t.join(" ")).collect();
    assert_eq!(got, vec!["", "a", "b", "tock"]);
}

#[test]
fn hidden_event_is_urgent() {
    let s = sim("channel c\nprocess P = begin @ (c -> Skip) \\ {| c |} end", "P");
    let c = s.initial();
    assert_eq!(s.internal(&c).len(), 1);
    assert!(s.tick(&c).is_none());
}

#[test]
fn wait_zero_is_immediate() {
    let s = sim("process P = begin @ wait 0 end", "P");
    assert_eq!(s.run(&Policy::Random(0), 5).verdict, Verdict::Ok { clock: 0, terminated: true });
}

#[test]
fn endby_expiry_is_a_violation() {
    let s = sim("process P = begin @ wait 3 endby 2 end", "P");
    match s.run(&Policy::Random(0), 10).verdict {
        Verdict::DeadlineViolation { component, operator, clock } => {
            assert_eq!((component.as_str(), operator.as_str(), clock), ("P", "endby", 2));
        }
        v => panic!("{v}"),
    }
}

#[test]
fn peh_periodicity() {
    for start in 0..3u64 {
        for period in 1..6u64 {
            let p = with_frameworks(&format!(
                "ids H, O\nprocess Env = begin @ start_peh!O!H!{start}!{period} -> \
                 (mu X @ handleAsyncEventCall?x!H -> handleAsyncEventRet!x!H -> X) end\n\
                 process Main = PEHFW(H) [| {{| start_peh, handleAsyncEventCall, handleAsyncEventRet, done_handler |}} |] Env"
            ));
            let s = Sim::new(Model::new(&p, &BTreeMap::new()).unwrap(), "Main").unwrap();
            let r = s.run(&Policy::Random(7), start + 5 * period + 1);
            let calls: Vec<u64> =
                r.trace.iter().filter(|(_, e)| e.chan == "handleAsyncEventCall").map(|(t, _)| *t).collect();
            let want: Vec<u64> = (0..5).map(|i| start + i * period).collect();
            assert!(calls.len() >= 5, "{:?}", r.lines());
            assert_eq!(&calls[..5], &want[..], "start {start} period {period}: {:?}", r.lines());
        }
    }
}

#[test]
fn s_anchor_parses() {
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/programs/s_anchor.scjc")).unwrap();
    let p = parse_program(&src).unwrap_or_else(|e| panic!("{}", e[0]));
    println!("{}", pretty::program(&p));
    for d in scjc::checker::check_program(&p) { println!("{d}"); }
}
