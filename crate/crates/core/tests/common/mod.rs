//! Seeded generators shared by the acceptance suite and the property tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scjc::ast::*;
use scjc::parser::{parse_action, parse_program};

pub const S_ANCHOR: &str = include_str!("../../programs/s_anchor.scjc");

pub fn consts(pd: u64) -> BTreeMap<String, u64> {
    [("P", 10), ("ID", 2), ("PTB", 3), ("PD", pd), ("AD", 4), ("ATB", 1), ("OD", 2)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn act(s: &str) -> Action {
    parse_action(s).unwrap_or_else(|e| panic!("{s}: {e:?}"))
}

pub const LAW_DECLS: &str = "channel a, b, c, d, e, c1, c2, t\nchannel n : Nat";

pub fn law_decls() -> Vec<Paragraph> {
    parse_program(LAW_DECLS).unwrap().paragraphs
}

/// Small action over `chans`, optionally assigning `var`.
pub fn small_action(r: &mut ChaCha8Rng, chans: &[&str], var: Option<&str>, depth: u32) -> Action {
    let c = *chans.choose(r).unwrap();
    let pick = if depth == 0 { r.gen_range(0..4) } else { r.gen_range(0..8) };
    match pick {
        0 => Action::Skip,
        1 => Action::event(c, Action::Skip),
        2 => Action::Wait(TimeExpr::Lit(r.gen_range(0..2))),
        3 => match var {
            Some(v) => Action::assign(v, Expr::Nat(r.gen_range(0..2))),
            None => Action::event(c, Action::Skip),
        },
        4 => Action::event(c, small_action(r, chans, var, depth - 1)),
        5 => Action::seq(small_action(r, chans, var, depth - 1), small_action(r, chans, var, depth - 1)),
        6 => Action::ext(
            Action::event(c, small_action(r, chans, var, depth - 1)),
            Action::event(chans.choose(r).unwrap(), Action::Skip),
        ),
        _ => match var {
            Some(v) => Action::seq(
                Action::assign(v, Expr::Nat(1)),
                Action::Prefix(Comm::new("n", vec![CommItem::Out(Expr::name(v))]), Box::new(Action::Skip)),
            ),
            None => Action::Wait(TimeExpr::Lit(1)),
        },
    }
}

/// Context with exactly one hole, using `var` and `chans`.
pub fn context(r: &mut ChaCha8Rng, chans: &[&str], var: &str, depth: u32) -> Action {
    if depth == 0 {
        return Action::Hole;
    }
    let inner = context(r, chans, var, depth - 1);
    let other = small_action(r, chans, Some(var), 1);
    match r.gen_range(0..6) {
        0 => inner,
        1 => Action::event(chans.choose(r).unwrap(), inner),
        2 => Action::seq(inner, other),
        3 => Action::seq(other, inner),
        4 => Action::seq(Action::assign(var, Expr::Nat(r.gen_range(0..2))), inner),
        _ => Action::seq(Action::Wait(TimeExpr::Lit(1)), inner),
    }
}

/// Variables `x` and `y` scoped over a law instance.
pub fn with_vars(a: Action) -> Action {
    Action::VarBlock(vec![VarDecl::new("x", Sort::Nat), VarDecl::new("y", Sort::Nat)], Box::new(a))
}

pub struct Law1Case {
    pub context: Action,
    pub filler: Action,
    pub c1: &'static str,
    pub c2: &'static str,
}

/// Law 1 instance whose provisos hold.
pub fn law1_ok(r: &mut ChaCha8Rng) -> Law1Case {
    let depth = r.gen_range(1..4);
    let context = context(r, &["a", "b"], "x", depth);
    let filler = small_action(r, &["c", "d"], Some("y"), 2);
    Law1Case { context, filler, c1: "c1", c2: "c2" }
}

/// Law 1 instance breaking exactly one proviso.
pub fn law1_bad(r: &mut ChaCha8Rng) -> Law1Case {
    let mut case = law1_ok(r);
    match r.gen_range(0..4) {
        0 => {
            case.context = Action::seq(Action::assign("x", Expr::Nat(0)), case.context);
            case.filler = Action::seq(Action::assign("x", Expr::Nat(1)), case.filler);
        }
        1 => case.filler = Action::event("c1", case.filler),
        2 => case.c2 = "c1",
        _ => {
            case.context = Action::Prefix(Comm::new("n", vec![CommItem::In("v".into())]), Box::new(case.context));
            case.filler = Action::Prefix(Comm::new("n", vec![CommItem::Out(Expr::name("v"))]), Box::new(case.filler));
        }
    }
    case
}

pub struct Law2Case {
    pub target: Action,
    pub b: &'static str,
    pub branch: Action,
}

fn law2_target(r: &mut ChaCha8Rng, cs: ChanSet) -> Action {
    let left = Action::event("a", small_action(r, &["a", "b", "c"], Some("x"), 2));
    let right = Action::event("a", small_action(r, &["a", "d", "e"], Some("y"), 2));
    Action::par(left, vec!["x".into()], cs, vec!["y".into()], right)
}

pub fn law2_ok(r: &mut ChaCha8Rng) -> Law2Case {
    let mut cs = chanset(["a"]);
    if r.gen_bool(0.5) {
        cs.push(ChanItem::chan("b"));
    }
    let target = law2_target(r, cs);
    Law2Case { target, b: "t", branch: small_action(r, &["c", "e"], None, 2) }
}

pub fn law2_bad(r: &mut ChaCha8Rng) -> Law2Case {
    match r.gen_range(0..3) {
        0 => Law2Case { target: law2_target(r, chanset(["b"])), b: "t", branch: Action::Skip },
        1 => {
            let mut case = law2_ok(r);
            let Action::Par { left, .. } = &mut case.target else { unreachable!() };
            let Action::Prefix(_, k) = &mut **left else { unreachable!() };
            **k = Action::seq((**k).clone(), Action::event("t", Action::Skip));
            case
        }
        _ => {
            let mut case = law2_ok(r);
            case.b = "a";
            case
        }
    }
}

fn body(r: &mut ChaCha8Rng, chans: &[&str], depth: u32) -> Action {
    small_action(r, chans, None, depth)
}

/// A well-formed SCJ-Circus program with one safelet, sequencer and
/// mission and one to three handlers.
pub fn scj_program(r: &mut ChaCha8Rng) -> Program {
    let chans = ["c0", "c1", "c2"];
    let periodic = r.gen_range(1..3usize);
    let aperiodic = r.gen_range(0..2usize);
    let mut paras = parse_program("channel c0, c1, c2\nchannel v : Nat\nconst K : Nat").unwrap().paragraphs;
    let methods = |r: &mut ChaCha8Rng, tag: &str| -> Vec<Method> {
        (0..r.gen_range(0..2)).map(|i| Method { name: format!("{tag}m{i}"), body: body(r, &chans, 1) }).collect()
    };
    paras.push(Paragraph::Safelet(SafeletDecl {
        name: "S".into(),
        state: Vec::new(),
        methods: methods(r, "s"),
        initialize: body(r, &chans, 2),
        get_sequencer: act("ret := Q"),
    }));
    paras.push(Paragraph::Sequencer(SequencerDecl {
        name: "Q".into(),
        state: vec![VarDecl::new("done", Sort::Bool)],
        initial: r.gen_bool(0.5).then(|| Initial { params: Vec::new(), body: act("done := false") }),
        methods: methods(r, "q"),
        get_next_mission: act("if not done then done := true ; ret := M [] done then ret := null fi"),
    }));
    let mut handlers = Vec::new();
    let mut decls = Vec::new();
    let target = (aperiodic == 1).then(|| "A0".to_string());
    for i in 0..periodic {
        let name = format!("H{i}");
        let with_param = r.gen_bool(0.5);
        handlers.push(HandlerRef {
            name: name.clone(),
            args: if with_param { vec![Expr::Nat(r.gen_range(0..3))] } else { Vec::new() },
        });
        let mut handle = body(r, &chans, 2);
        if target.is_some() && r.gen_bool(0.7) {
            handle = Action::seq(handle, Action::event("release", Action::Skip));
        }
        let start = if r.gen_bool(0.3) { TimeExpr::name("K") } else { TimeExpr::Lit(r.gen_range(0..3)) };
        decls.push(Paragraph::Periodic(PeriodicHandlerDecl {
            name: name.clone(),
            start,
            period: TimeExpr::Lit(r.gen_range(1..6)),
            state: vec![VarDecl::new("k", Sort::Nat)],
            initial: with_param.then(|| Initial {
                params: vec![VarDecl::new("p", Sort::Nat)],
                body: Action::Assign { this: true, var: "k".into(), value: Expr::name("p") },
            }),
            methods: methods(r, &format!("h{i}")),
            handle,
        }));
    }
    for i in 0..aperiodic {
        let name = format!("A{i}");
        handlers.push(HandlerRef { name: name.clone(), args: Vec::new() });
        decls.push(Paragraph::Aperiodic(AperiodicHandlerDecl {
            name,
            state: Vec::new(),
            initial: None,
            methods: Vec::new(),
            handle: body(r, &chans, 2),
        }));
    }
    handlers.shuffle(r);
    paras.push(Paragraph::Mission(MissionDecl {
        name: "M".into(),
        state: Vec::new(),
        initial: None,
        methods: methods(r, "m"),
        initialize: body(r, &chans, 1),
        handlers,
        cleanup: body(r, &chans, 1),
    }));
    decls.shuffle(r);
    paras.extend(decls);
    Program::new(paras)
}
