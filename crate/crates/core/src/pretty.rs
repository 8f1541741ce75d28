//! Pretty-printer emitting the concrete syntax accepted by [`crate::parser`].

use std::fmt::Write;

use crate::ast::*;

// Binding levels of action operators; larger binds tighter.
const L_BINDER: u8 = 0;
const L_PAR: u8 = 1;
const L_CHOICE: u8 = 2;
const L_INTERRUPT: u8 = 3;
const L_SEQ: u8 = 4;
const L_DEADLINE: u8 = 5;
const L_HIDE: u8 = 6;
const L_PREFIX: u8 = 7;
const L_ATOM: u8 = 8;

fn level(a: &Action) -> u8 {
    match a {
        Action::Mu(..) | Action::VarBlock(..) => L_BINDER,
        Action::Par { .. } | Action::Interleave(..) => L_PAR,
        Action::ExtChoice(..) | Action::IntChoice(..) => L_CHOICE,
        Action::Interrupt { .. } => L_INTERRUPT,
        Action::Seq(..) => L_SEQ,
        Action::EndBy(..) | Action::StartBy(..) => L_DEADLINE,
        Action::Hide(..) => L_HIDE,
        Action::Prefix(..) => L_PREFIX,
        _ => L_ATOM,
    }
}

pub fn action(a: &Action) -> String {
    let mut s = String::new();
    write_action(&mut s, a, L_BINDER);
    s
}

fn write_at(out: &mut String, a: &Action, min: u8) {
    if level(a) < min {
        out.push('(');
        write_action(out, a, L_BINDER);
        out.push(')');
    } else {
        write_action(out, a, min);
    }
}

fn write_action(out: &mut String, a: &Action, _ctx: u8) {
    match a {
        Action::Skip => out.push_str("Skip"),
        Action::Stop => out.push_str("Stop"),
        Action::Hole => out.push_str("HOLE"),
        Action::Call(x) => out.push_str(x),
        Action::Prefix(c, k) => {
            out.push_str(&comm(c));
            out.push_str(" -> ");
            write_at(out, k, L_PREFIX);
        }
        Action::ExtChoice(l, r) | Action::IntChoice(l, r) => {
            write_at(out, l, L_CHOICE);
            out.push_str(if matches!(a, Action::ExtChoice(..)) { " [] " } else { " |~| " });
            write_at(out, r, L_INTERRUPT);
        }
        Action::Seq(l, r) => {
            write_at(out, l, L_SEQ);
            out.push_str(" ; ");
            write_at(out, r, L_DEADLINE);
        }
        Action::Par { left, ns1, cs, ns2, right } => {
            write_at(out, left, L_PAR);
            let _ = write!(out, " [| {} | {} | {} |] ", nameset(ns1), chanset(cs), nameset(ns2));
            write_at(out, right, L_CHOICE);
        }
        Action::Interleave(l, r) => {
            write_at(out, l, L_PAR);
            out.push_str(" ||| ");
            write_at(out, r, L_CHOICE);
        }
        Action::Hide(k, cs) => {
            write_at(out, k, L_HIDE);
            out.push_str(" \\ ");
            out.push_str(&chanset(cs));
        }
        Action::Mu(x, body) => {
            let _ = write!(out, "mu {x} @ ");
            write_action(out, body, L_BINDER);
        }
        Action::VarBlock(ds, body) => {
            let _ = write!(out, "var {} @ ", decls(ds));
            write_action(out, body, L_BINDER);
        }
        Action::Wait(t) => {
            out.push_str("wait ");
            out.push_str(&time(t));
        }
        Action::EndBy(k, t) | Action::StartBy(k, t) => {
            // a bare prefix here reads as if the deadline bound only its continuation
            let min = if matches!(**k, Action::Prefix(..)) { L_ATOM } else { L_DEADLINE };
            write_at(out, k, min);
            out.push_str(if matches!(a, Action::EndBy(..)) { " endby " } else { " startby " });
            out.push_str(&time(t));
        }
        Action::Interrupt { left, trigger, right } => {
            write_at(out, left, L_INTERRUPT);
            out.push_str(" /\\ ");
            out.push_str(&comm(trigger));
            out.push_str(" -> ");
            write_at(out, right, L_PREFIX);
        }
        Action::Assign { this, var, value } => {
            if *this {
                out.push_str("this.");
            }
            let _ = write!(out, "{var} := {}", expr(value));
        }
        Action::Guarded(alts) => {
            out.push_str("if ");
            for (i, (g, k)) in alts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" [] ");
                }
                let _ = write!(out, "{} then ", expr(g));
                write_at(out, k, L_INTERRUPT);
            }
            out.push_str(" fi");
        }
    }
}

pub fn comm(c: &Comm) -> String {
    let mut s = c.chan.clone();
    for i in &c.items {
        match i {
            CommItem::Out(e) => {
                s.push('!');
                s.push_str(&expr_atom(e));
            }
            CommItem::In(x) => {
                s.push('?');
                s.push_str(x);
            }
            CommItem::Dot(e) => {
                s.push('.');
                s.push_str(&expr_atom(e));
            }
        }
    }
    s
}

pub fn chanset(cs: &ChanSet) -> String {
    if cs.is_empty() {
        return "{| |}".into();
    }
    let items: Vec<String> = cs
        .iter()
        .map(|i| {
            let mut s = i.chan.clone();
            for e in &i.prefix {
                s.push('.');
                s.push_str(&expr_atom(e));
            }
            s
        })
        .collect();
    format!("{{| {} |}}", items.join(", "))
}

fn nameset(ns: &[String]) -> String {
    format!("{{{}}}", ns.join(", "))
}

pub fn sort(s: &Sort) -> String {
    match s {
        Sort::Nat => "Nat".into(),
        Sort::Bool => "Bool".into(),
        Sort::Id => "ID".into(),
        Sort::SeqNat => "seq Nat".into(),
        Sort::Unit => "Unit".into(),
        Sort::Named(n) => n.clone(),
    }
}

fn decls(ds: &[VarDecl]) -> String {
    ds.iter().map(|d| format!("{}: {}", d.name, sort(&d.sort))).collect::<Vec<_>>().join(", ")
}

pub fn time(t: &TimeExpr) -> String {
    match t {
        TimeExpr::Lit(n) => n.to_string(),
        TimeExpr::Name(n) => n.clone(),
        TimeExpr::Sum(a, b) => {
            let r = if matches!(**b, TimeExpr::Sum(..)) { format!("({})", time(b)) } else { time(b) };
            format!("{} + {}", time(a), r)
        }
        TimeExpr::Range(a, b) => format!("{}..{}", time(a), time(b)),
    }
}

fn expr_level(e: &Expr) -> u8 {
    match e {
        Expr::Bin(op, ..) => op.level(),
        Expr::Not(_) => 3,
        _ => 9,
    }
}

pub fn expr(e: &Expr) -> String {
    expr_min(e, 0)
}

fn expr_atom(e: &Expr) -> String {
    expr_min(e, 9)
}

fn expr_min(e: &Expr, min: u8) -> String {
    let s = match e {
        Expr::Nat(n) => n.to_string(),
        Expr::Bool(b) => b.to_string(),
        Expr::Null => "null".into(),
        Expr::Name(n) => n.clone(),
        Expr::Field(n) => format!("this.{n}"),
        Expr::SeqLit(xs) => format!("<{}>", xs.iter().map(|x| expr_min(x, 5)).collect::<Vec<_>>().join(", ")),
        Expr::Bin(op, l, r) => {
            let lv = op.level();
            // comparisons are non-associative, others left-associative
            let lmin = if lv == 4 { 5 } else { lv };
            format!("{} {} {}", expr_min(l, lmin), op.symbol(), expr_min(r, lv + 1))
        }
        Expr::Not(x) => format!("not {}", expr_min(x, 9)),
        Expr::New { kind, class, args } => format!(
            "{} {}({})",
            kind.keyword(),
            class,
            args.iter().map(expr).collect::<Vec<_>>().join(", ")
        ),
    };
    if expr_level(e) < min {
        format!("({s})")
    } else {
        s
    }
}

pub fn process(p: &Process) -> String {
    process_min(p, 0)
}

fn process_level(p: &Process) -> u8 {
    match p {
        Process::Par(..) | Process::Interleave(..) => 1,
        Process::Hide(..) => 2,
        _ => 3,
    }
}

fn process_min(p: &Process, min: u8) -> String {
    let s = match p {
        Process::Basic(b) => {
            let mut s = String::from("begin\n");
            if !b.state.is_empty() {
                let _ = writeln!(s, "  state [{}]", decls(&b.state));
            }
            for (n, a) in &b.actions {
                let _ = writeln!(s, "  {n} = {}", action(a));
            }
            let _ = write!(s, "  @ {}\nend", action(&b.main));
            s
        }
        Process::Par(l, cs, r) => format!("{} [| {} |] {}", process_min(l, 1), chanset(cs), process_min(r, 2)),
        Process::Interleave(l, r) => format!("{} ||| {}", process_min(l, 1), process_min(r, 2)),
        Process::Hide(q, cs) => format!("{} \\ {}", process_min(q, 2), chanset(cs)),
        Process::Inst(n, args) if args.is_empty() => n.clone(),
        Process::Inst(n, args) => format!("{n}({})", args.iter().map(expr).collect::<Vec<_>>().join(", ")),
    };
    if process_level(p) < min {
        format!("({s})")
    } else {
        s
    }
}

fn initial(i: &Initial) -> String {
    if i.params.is_empty() {
        format!("initial = {}", action(&i.body))
    } else {
        format!("initial = {} @ {}", decls(&i.params), action(&i.body))
    }
}

fn common(s: &mut String, state: &[VarDecl], init: &Option<Initial>) {
    if !state.is_empty() {
        let _ = writeln!(s, "  state [{}]", decls(state));
    }
    if let Some(i) = init {
        let _ = writeln!(s, "  {}", initial(i));
    }
}

fn methods(s: &mut String, ms: &[Method]) {
    for m in ms {
        let _ = writeln!(s, "  method {} = {}", m.name, action(&m.body));
    }
}

pub fn paragraph(p: &Paragraph) -> String {
    let mut s = String::new();
    match p {
        Paragraph::Safelet(d) => {
            let _ = writeln!(s, "safelet {} = begin", d.name);
            common(&mut s, &d.state, &None);
            let _ = writeln!(s, "  initialize = {}", action(&d.initialize));
            let _ = writeln!(s, "  getSequencer = {}", action(&d.get_sequencer));
            methods(&mut s, &d.methods);
            s.push_str("end");
        }
        Paragraph::Sequencer(d) => {
            let _ = writeln!(s, "sequencer {} = begin", d.name);
            common(&mut s, &d.state, &d.initial);
            let _ = writeln!(s, "  getNextMission = {}", action(&d.get_next_mission));
            methods(&mut s, &d.methods);
            s.push_str("end");
        }
        Paragraph::Mission(d) => {
            let _ = writeln!(s, "mission {} = begin", d.name);
            common(&mut s, &d.state, &d.initial);
            let _ = writeln!(s, "  initialize = {}", action(&d.initialize));
            if !d.handlers.is_empty() {
                let hs: Vec<String> = d
                    .handlers
                    .iter()
                    .map(|h| {
                        if h.args.is_empty() {
                            h.name.clone()
                        } else {
                            format!("{}({})", h.name, h.args.iter().map(expr).collect::<Vec<_>>().join(", "))
                        }
                    })
                    .collect();
                let _ = writeln!(s, "  handlers {}", hs.join(", "));
            }
            let _ = writeln!(s, "  cleanup = {}", action(&d.cleanup));
            methods(&mut s, &d.methods);
            s.push_str("end");
        }
        Paragraph::Periodic(d) => {
            let _ = writeln!(s, "periodic handler {} = begin", d.name);
            let _ = writeln!(s, "  start {} period {}", time(&d.start), time(&d.period));
            common(&mut s, &d.state, &d.initial);
            let _ = writeln!(s, "  handleAsyncEvent = {}", action(&d.handle));
            methods(&mut s, &d.methods);
            s.push_str("end");
        }
        Paragraph::Aperiodic(d) => {
            let _ = writeln!(s, "aperiodic handler {} = begin", d.name);
            common(&mut s, &d.state, &d.initial);
            let _ = writeln!(s, "  handleAsyncEvent = {}", action(&d.handle));
            methods(&mut s, &d.methods);
            s.push_str("end");
        }
        Paragraph::Circus(c) => s.push_str(&circus_paragraph(c)),
    }
    s
}

pub fn circus_paragraph(c: &CircusParagraph) -> String {
    match c {
        CircusParagraph::Channel(d) => {
            if d.sorts.is_empty() {
                format!("channel {}", d.names.join(", "))
            } else {
                format!(
                    "channel {} : {}",
                    d.names.join(", "),
                    d.sorts.iter().map(sort).collect::<Vec<_>>().join(".")
                )
            }
        }
        CircusParagraph::Const { name, sort: so, value } => match value {
            Some(v) => format!("const {name} : {} = {}", sort(so), expr(v)),
            None => format!("const {name} : {}", sort(so)),
        },
        CircusParagraph::Ids(ns) => format!("ids {}", ns.join(", ")),
        CircusParagraph::Process(d) => {
            if d.params.is_empty() {
                format!("process {} = {}", d.name, process(&d.body))
            } else {
                format!("process {} = {} @ {}", d.name, decls(&d.params), process(&d.body))
            }
        }
    }
}

pub fn program(p: &Program) -> String {
    let mut s = String::new();
    for par in &p.paragraphs {
        s.push_str(&paragraph(par));
        s.push_str("\n\n");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_action;

    #[test]
    fn skip_and_endby() {
        assert_eq!(action(&Action::Skip), "Skip");
        let a = Action::endby(
            Action::prefix(Comm::new("input", vec![CommItem::In("x".into())]), Action::Skip),
            TimeExpr::name("ID"),
        );
        assert_eq!(action(&a), "(input?x -> Skip) endby ID");
        assert_eq!(parse_action(&action(&a)).unwrap(), a);
    }

    #[test]
    fn nested_binders_are_parenthesised() {
        let a = Action::seq(Action::mu("X", Action::event("c", Action::call("X"))), Action::Skip);
        assert_eq!(action(&a), "(mu X @ c -> X) ; Skip");
        assert_eq!(parse_action(&action(&a)).unwrap(), a);
    }

    #[test]
    fn right_nested_sequence_round_trips() {
        let a = Action::seq(Action::Skip, Action::seq(Action::Stop, Action::Skip));
        assert_eq!(action(&a), "Skip ; (Stop ; Skip)");
        assert_eq!(parse_action(&action(&a)).unwrap(), a);
    }
}
