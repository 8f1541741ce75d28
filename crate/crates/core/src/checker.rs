//! Well-formedness rules for SCJ-Circus programs.
//!
//! Diagnostics are located at the span of the offending paragraph.

use std::collections::{BTreeMap, BTreeSet};

use crate::ast::*;
use crate::diag::{Diagnostic, Pos, SourceSpan};
use crate::frameworks;
use crate::parser::Located;
use crate::pretty;

/// Allocation keywords each paragraph kind may use.
pub fn alloc_policy(kind: ParagraphKind) -> &'static [NewKind] {
    match kind {
        ParagraphKind::Safelet => &[NewKind::NewI],
        ParagraphKind::Sequencer | ParagraphKind::Mission => &[NewKind::NewI, NewKind::NewM],
        ParagraphKind::Handler => &NewKind::ALL,
    }
}

/// Name of the generated process composing every SCJ component.
pub const APPLICATION: &str = "Application";

/// Name of the release channel aimed at aperiodic handlers.
pub const RELEASE: &str = "release";

/// `<m>Call` and `<m>Ret` channels generated for an auxiliary method.
pub fn method_channels(m: &str) -> [String; 2] {
    [format!("{m}Call"), format!("{m}Ret")]
}

struct Ctx<'a> {
    program: &'a Program,
    spans: Vec<SourceSpan>,
    out: Vec<Diagnostic>,
    channels: BTreeMap<String, usize>,
}

impl Ctx<'_> {
    fn error(&mut self, at: usize, code: &str, msg: String) {
        self.out.push(Diagnostic::error(code, msg, self.spans[at].clone()));
    }
}

/// Check a parsed program; spans default to 1:1 when absent.
pub fn check_program(p: &Program) -> Vec<Diagnostic> {
    let spans = vec![SourceSpan::point("<input>", Pos::new(1, 1)); p.paragraphs.len()];
    check(p, spans)
}

pub fn check_located(l: &Located) -> Vec<Diagnostic> {
    check(&l.program, l.spans.clone())
}

fn check(p: &Program, spans: Vec<SourceSpan>) -> Vec<Diagnostic> {
    let mut channels: BTreeMap<String, usize> = BTreeMap::new();
    for d in frameworks::channel_decls() {
        for n in d.names {
            channels.insert(n, d.sorts.len());
        }
    }
    for par in &p.paragraphs {
        let methods: &[Method] = match par {
            Paragraph::Safelet(s) => &s.methods,
            Paragraph::Sequencer(s) => &s.methods,
            Paragraph::Mission(s) => &s.methods,
            Paragraph::Periodic(s) => &s.methods,
            Paragraph::Aperiodic(s) => &s.methods,
            Paragraph::Circus(_) => &[],
        };
        for m in methods {
            for c in method_channels(&m.name) {
                channels.insert(c, 2);
            }
        }
    }
    let mut cx = Ctx { program: p, spans, out: Vec::new(), channels };
    declarations(&mut cx);
    for (i, par) in p.paragraphs.iter().enumerate() {
        paragraph(&mut cx, i, par);
    }
    let mut out = cx.out;
    out.sort_by(|a, b| (&a.span, &a.code, &a.message).cmp(&(&b.span, &b.code, &b.message)));
    out.dedup();
    out
}

fn declarations(cx: &mut Ctx) {
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut seen_chan: BTreeSet<String> = BTreeSet::new();
    for (i, par) in cx.program.paragraphs.iter().enumerate() {
        if let Some(n) = par.name() {
            if !seen.insert(n.to_string()) {
                cx.error(i, "E-DUP", format!("duplicate paragraph name `{n}`"));
            }
        }
        if let Paragraph::Circus(CircusParagraph::Channel(d)) = par {
            for n in &d.names {
                if !seen_chan.insert(n.clone()) {
                    cx.error(i, "E-DUP", format!("channel `{n}` declared twice"));
                } else {
                    cx.channels.insert(n.clone(), d.sorts.len());
                }
            }
        }
    }
}

fn paragraph(cx: &mut Ctx, i: usize, par: &Paragraph) {
    if let Some(kind) = par.kind() {
        let allowed = alloc_policy(kind);
        for (what, body) in par.bodies() {
            let mut bad = Vec::new();
            visit_exprs(body, &mut |e| {
                e.visit_allocs(&mut |k, class| {
                    if !allowed.contains(&k) {
                        bad.push((k, class.to_string()));
                    }
                })
            });
            for (k, class) in bad {
                cx.error(
                    i,
                    "E-ALLOC",
                    format!("`{} {class}` in `{what}` is not permitted in a {kind:?} paragraph", k.keyword()),
                );
            }
            if body.hole_count() > 0 {
                cx.error(i, "E-METH", format!("`{what}` has no body"));
            }
            action(cx, i, body, &mut Vec::new(), true);
        }
    }
    match par {
        Paragraph::Safelet(s) => returns(cx, i, &s.get_sequencer, "getSequencer", &s.state, |p| {
            matches!(p, Paragraph::Sequencer(_))
        }),
        Paragraph::Sequencer(s) => {
            returns(cx, i, &s.get_next_mission, "getNextMission", &s.state, |p| matches!(p, Paragraph::Mission(_)))
        }
        Paragraph::Mission(m) => {
            for h in &m.handlers {
                match cx.program.find(&h.name) {
                    Some(Paragraph::Periodic(d)) => ctor_arity(cx, i, &h.name, d.initial.as_ref(), h.args.len()),
                    Some(Paragraph::Aperiodic(d)) => ctor_arity(cx, i, &h.name, d.initial.as_ref(), h.args.len()),
                    _ => cx.error(i, "E-REF", format!("mission `{}` lists undeclared handler `{}`", m.name, h.name)),
                }
            }
        }
        Paragraph::Periodic(h) => {
            for t in [&h.start, &h.period] {
                time(cx, i, t);
            }
        }
        Paragraph::Circus(CircusParagraph::Process(d)) => process(cx, i, &d.body),
        _ => {}
    }
}

fn ctor_arity(cx: &mut Ctx, i: usize, name: &str, init: Option<&Initial>, given: usize) {
    let want = init.map_or(0, |x| x.params.len());
    if want != given {
        cx.error(i, "E-REF", format!("handler `{name}` takes {want} constructor arguments, {given} given"));
    }
}

/// `ret := N` in a selector must name a paragraph accepted by `ok`.
fn returns(cx: &mut Ctx, i: usize, body: &Action, what: &str, state: &[VarDecl], ok: fn(&Paragraph) -> bool) {
    let mut bad = Vec::new();
    visit_actions(body, &mut |a| {
        if let Action::Assign { var, value: Expr::Name(n), .. } = a {
            if var == "ret" && !state.iter().any(|d| &d.name == n) {
                match cx.program.find(n) {
                    Some(p) if ok(p) => {}
                    _ => bad.push(n.clone()),
                }
            }
        }
    });
    for n in bad {
        cx.error(i, "E-REF", format!("`{what}` returns undeclared component `{n}`"));
    }
}

fn process(cx: &mut Ctx, i: usize, p: &Process) {
    match p {
        Process::Basic(b) => {
            let mut scope: Vec<String> = b.actions.iter().map(|(n, _)| n.clone()).collect();
            for (_, a) in &b.actions {
                action(cx, i, a, &mut scope, false);
            }
            action(cx, i, &b.main, &mut scope, false);
        }
        Process::Par(l, cs, r) => {
            process(cx, i, l);
            chanset(cx, i, cs);
            process(cx, i, r);
        }
        Process::Interleave(l, r) => {
            process(cx, i, l);
            process(cx, i, r);
        }
        Process::Hide(q, cs) => {
            process(cx, i, q);
            chanset(cx, i, cs);
        }
        // generated by translation
        Process::Inst(n, args) if n == APPLICATION && args.is_empty() && cx.program.paragraphs.iter().any(Paragraph::is_scj) => {}
        Process::Inst(n, args) => match cx.program.process(n) {
            Some(d) if d.params.len() == args.len() => {}
            Some(d) => cx.error(i, "E-REF", format!("process `{n}` takes {} arguments", d.params.len())),
            None => cx.error(i, "E-REF", format!("undeclared process `{n}`")),
        },
    }
}

fn chanset(cx: &mut Ctx, i: usize, cs: &ChanSet) {
    for it in cs {
        match cx.channels.get(&it.chan) {
            None => cx.error(i, "E-CHAN", format!("undeclared channel `{}`", it.chan)),
            Some(n) if it.prefix.len() > *n => {
                cx.error(i, "E-CHAN", format!("channel `{}` carries {n} values", it.chan))
            }
            _ => {}
        }
    }
}

fn comm(cx: &mut Ctx, i: usize, c: &Comm, scj: bool) {
    match cx.channels.get(&c.chan) {
        None => cx.error(i, "E-CHAN", format!("undeclared channel `{}`", c.chan)),
        // a bare release is aimed at the mission's aperiodic handler
        Some(_) if scj && c.chan == RELEASE && c.items.is_empty() => {}
        Some(n) if *n != c.items.len() => cx.error(
            i,
            "E-CHAN",
            format!("`{}` uses {} values but the channel carries {n}", pretty::comm(c), c.items.len()),
        ),
        _ => {}
    }
}

fn time(cx: &mut Ctx, i: usize, t: &TimeExpr) {
    let consts: BTreeMap<String, u64> = cx
        .program
        .paragraphs
        .iter()
        .filter_map(|p| match p {
            Paragraph::Circus(CircusParagraph::Const { name, value: Some(Expr::Nat(v)), .. }) => Some((name.clone(), *v)),
            _ => None,
        })
        .collect();
    if let TimeExpr::Range(..) = t {
        if let Ok((lo, hi)) = t.eval_bounds(&|n| consts.get(n).copied()) {
            if lo > hi {
                cx.error(i, "E-TIME", format!("empty time range `{}` ({lo} > {hi})", pretty::time(t)));
            }
        }
    }
}

fn action(cx: &mut Ctx, i: usize, a: &Action, scope: &mut Vec<String>, scj: bool) {
    match a {
        Action::Prefix(c, _) => comm(cx, i, c, scj),
        Action::Interrupt { trigger, .. } => comm(cx, i, trigger, scj),
        Action::Par { ns1, cs, ns2, .. } => {
            chanset(cx, i, cs);
            let overlap: Vec<&String> = ns1.iter().filter(|n| ns2.contains(n)).collect();
            if !overlap.is_empty() {
                let names: Vec<&str> = overlap.iter().map(|s| s.as_str()).collect();
                cx.error(i, "E-PART", format!("name sets of a parallel action overlap on {{{}}}", names.join(", ")));
            }
        }
        Action::Hide(_, cs) => chanset(cx, i, cs),
        Action::Call(x) if !scope.contains(x) => cx.error(i, "E-BIND", format!("unbound action variable `{x}`")),
        Action::Wait(t) | Action::EndBy(_, t) | Action::StartBy(_, t) => time(cx, i, t),
        Action::Mu(x, body) => {
            scope.push(x.clone());
            action(cx, i, body, scope, scj);
            scope.pop();
            return;
        }
        _ => {}
    }
    for c in a.children() {
        action(cx, i, c, scope, scj);
    }
}

fn visit_actions(a: &Action, f: &mut dyn FnMut(&Action)) {
    f(a);
    for c in a.children() {
        visit_actions(c, f);
    }
}

fn visit_exprs(a: &Action, f: &mut dyn FnMut(&Expr)) {
    visit_actions(a, &mut |a| match a {
        Action::Prefix(c, _) | Action::Interrupt { trigger: c, .. } => {
            for it in &c.items {
                if let CommItem::Out(e) | CommItem::Dot(e) = it {
                    f(e);
                }
            }
        }
        Action::Assign { value, .. } => f(value),
        Action::Guarded(alts) => alts.iter().for_each(|(g, _)| f(g)),
        _ => {}
    });
}

// -- timing conditions ------------------------------------------------------

/// The aperiodic handler a periodic handler's `release` reaches within
/// mission `m`, if any.
pub fn release_target<'p>(p: &'p Program, m: &MissionDecl, handle: &Action) -> Vec<&'p str> {
    let aperiodics: Vec<&str> = m
        .handlers
        .iter()
        .filter_map(|h| match p.find(&h.name) {
            Some(Paragraph::Aperiodic(a)) => Some(a.name.as_str()),
            _ => None,
        })
        .collect();
    let mut out = Vec::new();
    visit_actions(handle, &mut |a| {
        if let Action::Prefix(c, _) = a {
            if c.chan == RELEASE {
                match c.items.first() {
                    None if aperiodics.len() == 1 => out.push(aperiodics[0]),
                    Some(CommItem::Out(Expr::Name(n)) | CommItem::Dot(Expr::Name(n))) => {
                        if let Some(t) = aperiodics.iter().find(|a| *a == n) {
                            out.push(*t)
                        }
                    }
                    _ => {}
                }
            }
        }
    });
    out.sort();
    out.dedup();
    out
}

fn upper(t: &TimeExpr) -> &TimeExpr {
    match t {
        TimeExpr::Range(_, hi) => hi,
        t => t,
    }
}

fn first_startby(a: &Action) -> Option<&TimeExpr> {
    if let Action::StartBy(_, t) = a {
        return Some(t);
    }
    a.children().into_iter().find_map(first_startby)
}

fn last_wait(a: &Action) -> Option<&TimeExpr> {
    if let Action::Wait(t) = a {
        return Some(upper(t));
    }
    a.children().into_iter().rev().find_map(last_wait)
}

fn deadline(a: &Action) -> Option<&TimeExpr> {
    match a {
        Action::EndBy(_, t) => Some(t),
        _ => None,
    }
}

/// Check `PTB + ID <= PD` and `PD + AD <= P` for every periodic handler and
/// the aperiodic handlers it releases in the same mission.
pub fn check_timing_conditions(p: &Program, bindings: &BTreeMap<String, u64>) -> Vec<Diagnostic> {
    check_timing_in(p, bindings, &vec![SourceSpan::point("<input>", Pos::new(1, 1)); p.paragraphs.len()])
}

pub fn check_timing_located(l: &Located, bindings: &BTreeMap<String, u64>) -> Vec<Diagnostic> {
    check_timing_in(&l.program, bindings, &l.spans)
}

fn check_timing_in(p: &Program, bindings: &BTreeMap<String, u64>, spans: &[SourceSpan]) -> Vec<Diagnostic> {
    let mut env = bindings.clone();
    for par in &p.paragraphs {
        if let Paragraph::Circus(CircusParagraph::Const { name, value: Some(Expr::Nat(v)), .. }) = par {
            env.entry(name.clone()).or_insert(*v);
        }
    }
    let index = |n: &str| p.paragraphs.iter().position(|x| x.name() == Some(n)).unwrap_or(0);
    let mut out = Vec::new();
    let mut unbound: BTreeSet<(usize, String)> = BTreeSet::new();
    let mut eval = |t: &TimeExpr, at: usize| -> Option<u64> {
        let mut names = BTreeSet::new();
        t.names(&mut names);
        for n in names.iter().filter(|n| !env.contains_key(*n)) {
            unbound.insert((at, n.clone()));
        }
        upper(t).eval_bounds(&|n| env.get(n).copied()).ok().map(|b| b.1)
    };
    let mut pairs = Vec::new();
    for par in &p.paragraphs {
        let Paragraph::Mission(m) = par else { continue };
        for h in &m.handlers {
            if let Some(Paragraph::Periodic(ph)) = p.find(&h.name) {
                for a in release_target(p, m, &ph.handle) {
                    if let Some(Paragraph::Aperiodic(ah)) = p.find(a) {
                        pairs.push((ph, ah));
                    }
                }
            }
        }
    }
    pairs.sort_by(|a, b| (&a.0.name, &a.1.name).cmp(&(&b.0.name, &b.1.name)));
    pairs.dedup_by(|a, b| a.0.name == b.0.name && a.1.name == b.1.name);
    for (ph, ah) in pairs {
        let at = index(&ph.name);
        let pd = deadline(&ph.handle);
        let id = first_startby(&ph.handle);
        let ptb = last_wait(&ph.handle);
        let ad = deadline(&ah.handle);
        if let (Some(pd), Some(id), Some(ptb)) = (pd, id, ptb) {
            if let (Some(vptb), Some(vid), Some(vpd)) = (eval(ptb, at), eval(id, at), eval(pd, at)) {
                if vptb + vid > vpd {
                    out.push(Diagnostic::warning(
                        "W-TIMING",
                        format!(
                            "`{}`: {} + {} <= {} fails ({vptb} + {vid} > {vpd})",
                            ph.name,
                            pretty::time(ptb),
                            pretty::time(id),
                            pretty::time(pd)
                        ),
                        spans[at].clone(),
                    ));
                }
            }
        }
        if let (Some(pd), Some(ad)) = (pd, ad) {
            let per = &ph.period;
            if let (Some(vpd), Some(vad), Some(vp)) = (eval(pd, at), eval(ad, at), eval(per, at)) {
                if vpd + vad > vp {
                    out.push(Diagnostic::warning(
                        "W-TIMING",
                        format!(
                            "`{}`/`{}`: {} + {} <= {} fails ({vpd} + {vad} > {vp})",
                            ph.name,
                            ah.name,
                            pretty::time(pd),
                            pretty::time(ad),
                            pretty::time(per)
                        ),
                        spans[at].clone(),
                    ));
                }
            }
        }
    }
    for (at, n) in unbound {
        out.push(Diagnostic::error("E-UNBOUND", format!("time constant `{n}` has no binding"), spans[at].clone()));
    }
    out.sort_by(|a, b| (&a.span, &a.code, &a.message).cmp(&(&b.span, &b.code, &b.message)));
    out
}
