//! Runtime terms and their one-step transitions.
//!
//! Every term carries the store its thread of control sees. Assignments and
//! guard evaluation are folded into `start`, so the only internal steps left
//! are internal choices, `wait` ranges and hidden communications.

use std::collections::BTreeMap;
use std::rc::Rc;

use crate::ast::{CommItem, VarDecl};

use super::model::{Model, Node, NodeId, PNode};
use super::value::{store_with, Event, Offer, Pat, Store, Value};

const MAX_UNFOLD: u32 = 2_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum T {
    Done(Store),
    Stopped,
    /// Evaluation error; behaves as `Stop` but is reported.
    Fault(Rc<str>),
    Prefix { offer: Offer, node: NodeId, store: Store },
    Seq(Box<T>, NodeId),
    Ext(Box<T>, Box<T>),
    /// Internal choice among the listed continuations.
    Choice(Rc<[NodeId]>, Store),
    Par { l: Box<T>, r: Box<T>, cs: Rc<[Pat]>, ns1: Rc<[String]>, ns2: Rc<[String]>, base: Store },
    Hide(Box<T>, Rc<[Pat]>),
    Wait(u64, Store),
    WaitChoice(u64, u64, Store),
    EndBy(Box<T>, u64, Rc<str>),
    StartBy(Box<T>, u64, Rc<str>),
    Interrupt { l: Box<T>, trigger: Offer, node: NodeId, store: Store },
    /// `var` block; remembers the shadowed values to restore on exit.
    Block(Box<T>, Rc<[(String, Option<Value>)]>),
}

/// A pending deadline that currently forbids time from passing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obligation {
    pub component: String,
    pub operator: &'static str,
}

fn fault(msg: impl Into<String>) -> T {
    T::Fault(Rc::from(msg.into()))
}

// -- starting actions ------------------------------------------------------

pub fn start(m: &Model, id: NodeId, store: Store) -> T {
    start_d(m, id, store, 0)
}

fn start_d(m: &Model, id: NodeId, store: Store, depth: u32) -> T {
    if depth > MAX_UNFOLD {
        return fault("unguarded recursion");
    }
    match m.node(id) {
        Node::Skip => T::Done(store),
        Node::Stop => T::Stopped,
        Node::Prefix(c, _) => {
            let mut vals = Vec::with_capacity(c.items.len());
            for it in &c.items {
                match it {
                    CommItem::Out(e) | CommItem::Dot(e) => match m.eval(e, &store) {
                        Ok(v) => vals.push(Some(v)),
                        Err(msg) => return fault(msg),
                    },
                    CommItem::In(_) => vals.push(None),
                }
            }
            T::Prefix { offer: Offer { chan: c.chan.clone(), vals }, node: id, store }
        }
        Node::Ext(a, b) => {
            let (a, b) = (*a, *b);
            let l = start_d(m, a, store.clone(), depth + 1);
            let r = start_d(m, b, store, depth + 1);
            ext(l, r)
        }
        Node::Int(a, b) => T::Choice(Rc::from(vec![*a, *b]), store),
        Node::Seq(a, k) => {
            let k = *k;
            let l = start_d(m, *a, store, depth + 1);
            match l {
                T::Done(s) => start_d(m, k, s, depth + 1),
                l => T::Seq(Box::new(l), k),
            }
        }
        Node::Par { l, r, ns1, cs, ns2 } => {
            let cs = match m.eval_chanset(cs, &store) {
                Ok(c) => c,
                Err(msg) => return fault(msg),
            };
            let lt = start_d(m, *l, store.clone(), depth + 1);
            let rt = start_d(m, *r, store.clone(), depth + 1);
            par(lt, rt, cs, ns1.clone(), ns2.clone(), store)
        }
        Node::Hide(k, cs) => {
            let cs = match m.eval_chanset(cs, &store) {
                Ok(c) => c,
                Err(msg) => return fault(msg),
            };
            hide(start_d(m, *k, store, depth + 1), cs)
        }
        Node::Jump(t) => start_d(m, *t, store, depth + 1),
        Node::Wait(te) => match m.eval_time(te, &store) {
            Ok((lo, hi)) if lo == hi => wait(lo, store),
            Ok((lo, hi)) if lo < hi => T::WaitChoice(lo, hi, store),
            Ok((lo, hi)) => fault(format!("empty wait range {lo}..{hi}")),
            Err(msg) => fault(msg),
        },
        Node::EndBy(k, te, label) | Node::StartBy(k, te, label) => {
            let is_end = matches!(m.node(id), Node::EndBy(..));
            let d = match m.eval_time(te, &store) {
                Ok((_, hi)) => hi,
                Err(msg) => return fault(msg),
            };
            let label = label.clone();
            let body = start_d(m, *k, store, depth + 1);
            if is_end {
                endby(body, d, label)
            } else {
                startby(body, d, label)
            }
        }
        Node::Interrupt { l, trigger, .. } => {
            let mut vals = Vec::new();
            for it in &trigger.items {
                match it {
                    CommItem::Out(e) | CommItem::Dot(e) => match m.eval(e, &store) {
                        Ok(v) => vals.push(Some(v)),
                        Err(msg) => return fault(msg),
                    },
                    CommItem::In(_) => vals.push(None),
                }
            }
            let offer = Offer { chan: trigger.chan.clone(), vals };
            let lt = start_d(m, *l, store.clone(), depth + 1);
            interrupt(lt, offer, id, store)
        }
        Node::Assign(x, e) => match m.eval(e, &store) {
            Ok(v) => T::Done(store_with(&store, x, v)),
            Err(msg) => fault(msg),
        },
        Node::Block(ds, k) => {
            let saved: Vec<(String, Option<Value>)> = ds.iter().map(|d| (d.name.clone(), store.get(&d.name).cloned())).collect();
            let mut s = (*store).clone();
            for VarDecl { name, sort } in ds {
                s.insert(name.clone(), Value::default_for(sort));
            }
            block(start_d(m, *k, Rc::new(s), depth + 1), Rc::from(saved))
        }
        Node::Guarded(alts) => {
            let mut open = Vec::new();
            for (g, k) in alts {
                match m.eval(g, &store).and_then(|v| v.as_bool()) {
                    Ok(true) => open.push(*k),
                    Ok(false) => {}
                    Err(msg) => return fault(msg),
                }
            }
            match open.len() {
                0 => T::Stopped,
                1 => start_d(m, open[0], store, depth + 1),
                _ => T::Choice(Rc::from(open), store),
            }
        }
    }
}

/// Start a process term under the parameter bindings in `env`.
pub fn start_process(m: &Model, p: &PNode, env: Store) -> T {
    start_process_d(m, p, env, 0)
}

fn start_process_d(m: &Model, p: &PNode, env: Store, depth: u32) -> T {
    if depth > 64 {
        return fault("process instantiation too deep");
    }
    let empty: Store = Rc::new(BTreeMap::new());
    match p {
        PNode::Basic { state, main } => {
            let mut s = (*env).clone();
            for d in state {
                s.entry(d.name.clone()).or_insert_with(|| Value::default_for(&d.sort));
            }
            start(m, *main, Rc::new(s))
        }
        PNode::Par(l, cs, r) => match m.eval_chanset(cs, &env) {
            Ok(cs) => par(
                start_process_d(m, l, env.clone(), depth + 1),
                start_process_d(m, r, env, depth + 1),
                cs,
                Rc::from(Vec::new()),
                Rc::from(Vec::new()),
                empty,
            ),
            Err(msg) => fault(msg),
        },
        PNode::Interleave(l, r) => par(
            start_process_d(m, l, env.clone(), depth + 1),
            start_process_d(m, r, env, depth + 1),
            Rc::from(Vec::new()),
            Rc::from(Vec::new()),
            Rc::from(Vec::new()),
            empty,
        ),
        PNode::Hide(q, cs) => match m.eval_chanset(cs, &env) {
            Ok(cs) => hide(start_process_d(m, q, env, depth + 1), cs),
            Err(msg) => fault(msg),
        },
        PNode::Inst(name, args) => {
            let Some((params, body)) = m.proc_def(name) else {
                return fault(format!("unknown process `{name}`"));
            };
            if params.len() != args.len() {
                return fault(format!("process `{name}` expects {} arguments", params.len()));
            }
            let mut s = BTreeMap::new();
            for (d, a) in params.iter().zip(args) {
                match m.eval(a, &env) {
                    Ok(v) => {
                        s.insert(d.name.clone(), v);
                    }
                    Err(msg) => return fault(msg),
                }
            }
            start_process_d(m, body, Rc::new(s), depth + 1)
        }
    }
}

// -- normalising constructors ---------------------------------------------

fn wait(n: u64, store: Store) -> T {
    if n == 0 {
        T::Done(store)
    } else {
        T::Wait(n, store)
    }
}

fn ext(l: T, r: T) -> T {
    match (l, r) {
        (T::Done(s), _) | (_, T::Done(s)) => T::Done(s),
        (l, r) => T::Ext(Box::new(l), Box::new(r)),
    }
}

fn seq(m: &Model, l: T, k: NodeId) -> T {
    match l {
        T::Done(s) => start(m, k, s),
        l => T::Seq(Box::new(l), k),
    }
}

fn par(l: T, r: T, cs: Rc<[Pat]>, ns1: Rc<[String]>, ns2: Rc<[String]>, base: Store) -> T {
    match (l, r) {
        (T::Done(sl), T::Done(sr)) => {
            let mut s = (*base).clone();
            for n in ns1.iter() {
                if let Some(v) = sl.get(n) {
                    s.insert(n.clone(), v.clone());
                }
            }
            for n in ns2.iter() {
                if let Some(v) = sr.get(n) {
                    s.insert(n.clone(), v.clone());
                }
            }
            T::Done(Rc::new(s))
        }
        (l, r) => T::Par { l: Box::new(l), r: Box::new(r), cs, ns1, ns2, base },
    }
}

fn hide(t: T, cs: Rc<[Pat]>) -> T {
    match t {
        T::Done(s) => T::Done(s),
        t => T::Hide(Box::new(t), cs),
    }
}

fn endby(t: T, d: u64, label: Rc<str>) -> T {
    match t {
        T::Done(s) => T::Done(s),
        t => T::EndBy(Box::new(t), d, label),
    }
}

fn startby(t: T, d: u64, label: Rc<str>) -> T {
    match t {
        T::Done(s) => T::Done(s),
        t => T::StartBy(Box::new(t), d, label),
    }
}

fn interrupt(l: T, trigger: Offer, node: NodeId, store: Store) -> T {
    match l {
        T::Done(s) => T::Done(s),
        l => T::Interrupt { l: Box::new(l), trigger, node, store },
    }
}

fn block(t: T, saved: Rc<[(String, Option<Value>)]>) -> T {
    match t {
        T::Done(s) => {
            let mut s = (*s).clone();
            for (n, old) in saved.iter() {
                match old {
                    Some(v) => s.insert(n.clone(), v.clone()),
                    None => s.remove(n),
                };
            }
            T::Done(Rc::new(s))
        }
        t => T::Block(Box::new(t), saved),
    }
}

// -- offers ---------------------------------------------------------------

fn offer_in(o: &Offer, p: &Pat) -> bool {
    o.chan == p.chan && o.vals.len() >= p.prefix.len() && o.vals.iter().zip(&p.prefix).all(|(a, b)| a.as_ref() == Some(b))
}

/// Fill every open position of `o` from the model's domains.
pub fn instantiate(m: &Model, o: &Offer) -> Vec<Event> {
    let mut acc: Vec<Vec<Value>> = vec![Vec::new()];
    for (i, v) in o.vals.iter().enumerate() {
        let choices = match v {
            Some(v) => vec![v.clone()],
            None => m.domain(&o.chan, i),
        };
        let mut next = Vec::with_capacity(acc.len() * choices.len());
        for a in &acc {
            for c in &choices {
                let mut a = a.clone();
                a.push(c.clone());
                next.push(a);
            }
        }
        acc = next;
    }
    acc.into_iter().map(|vals| Event::new(o.chan.clone(), vals)).collect()
}

/// Split `o` into the parts inside and outside `pats`, instantiating open
/// positions that a value prefix in `pats` inspects.
fn split(m: &Model, o: &Offer, pats: &[Pat]) -> (Vec<Offer>, Vec<Offer>) {
    let k = pats.iter().filter(|p| p.chan == o.chan).map(|p| p.prefix.len()).max();
    let Some(k) = k else { return (Vec::new(), vec![o.clone()]) };
    let mut cands = vec![o.clone()];
    for i in 0..k.min(o.vals.len()) {
        if o.vals[i].is_none() {
            let dom = m.domain(&o.chan, i);
            cands = cands
                .into_iter()
                .flat_map(|c| {
                    dom.iter().map(move |v| {
                        let mut c = c.clone();
                        c.vals[i] = Some(v.clone());
                        c
                    })
                })
                .collect();
        }
    }
    cands.into_iter().partition(|c| pats.iter().any(|p| offer_in(c, p)))
}

pub fn offers(m: &Model, t: &T) -> Vec<Offer> {
    let mut out = Vec::new();
    collect_offers(m, t, &mut out);
    out.sort();
    out.dedup();
    out
}

fn collect_offers(m: &Model, t: &T, out: &mut Vec<Offer>) {
    match t {
        T::Done(_) | T::Stopped | T::Fault(_) | T::Choice(..) | T::Wait(..) | T::WaitChoice(..) => {}
        T::Prefix { offer, .. } => out.push(offer.clone()),
        T::Seq(l, _) | T::EndBy(l, ..) | T::StartBy(l, ..) | T::Block(l, _) => collect_offers(m, l, out),
        T::Ext(l, r) => {
            collect_offers(m, l, out);
            collect_offers(m, r, out);
        }
        T::Interrupt { l, trigger, .. } => {
            collect_offers(m, l, out);
            out.push(trigger.clone());
        }
        T::Hide(k, cs) => {
            for o in offers(m, k) {
                out.extend(split(m, &o, cs).1);
            }
        }
        T::Par { l, r, cs, .. } => {
            let (mut li, mut ri) = (Vec::new(), Vec::new());
            for o in offers(m, l) {
                let (i, x) = split(m, &o, cs);
                li.extend(i);
                out.extend(x);
            }
            for o in offers(m, r) {
                let (i, x) = split(m, &o, cs);
                ri.extend(i);
                out.extend(x);
            }
            for a in &li {
                for b in &ri {
                    if let Some(u) = a.unify(b) {
                        out.push(u);
                    }
                }
            }
        }
    }
}

// -- transitions ----------------------------------------------------------

/// Successors of `t` on the visible event `e`.
pub fn perform(m: &Model, t: &T, e: &Event) -> Vec<T> {
    match t {
        T::Done(_) | T::Stopped | T::Fault(_) | T::Choice(..) | T::Wait(..) | T::WaitChoice(..) => Vec::new(),
        T::Prefix { offer, node, store } => {
            if !offer.matches(e) {
                return Vec::new();
            }
            let Node::Prefix(c, k) = m.node(*node) else { unreachable!() };
            let mut s = store.clone();
            for (it, v) in c.items.iter().zip(&e.vals) {
                if let CommItem::In(x) = it {
                    s = store_with(&s, x, v.clone());
                }
            }
            vec![start(m, *k, s)]
        }
        T::Seq(l, k) => perform(m, l, e).into_iter().map(|l| seq(m, l, *k)).collect(),
        T::Ext(l, r) => {
            let mut out = perform(m, l, e);
            out.extend(perform(m, r, e));
            out
        }
        T::Par { l, r, cs, ns1, ns2, base } => {
            let rebuild = |l: T, r: T| par(l, r, cs.clone(), ns1.clone(), ns2.clone(), base.clone());
            if super::value::in_set(cs, e) {
                let ls = perform(m, l, e);
                if ls.is_empty() {
                    return Vec::new();
                }
                let rs = perform(m, r, e);
                let mut out = Vec::new();
                for a in &ls {
                    for b in &rs {
                        out.push(rebuild(a.clone(), b.clone()));
                    }
                }
                out
            } else {
                let mut out: Vec<T> = perform(m, l, e).into_iter().map(|a| rebuild(a, (**r).clone())).collect();
                out.extend(perform(m, r, e).into_iter().map(|b| rebuild((**l).clone(), b)));
                out
            }
        }
        T::Hide(k, cs) => {
            if super::value::in_set(cs, e) {
                Vec::new()
            } else {
                perform(m, k, e).into_iter().map(|k| hide(k, cs.clone())).collect()
            }
        }
        T::EndBy(b, d, label) => perform(m, b, e).into_iter().map(|b| endby(b, *d, label.clone())).collect(),
        // the first visible event discharges the obligation
        T::StartBy(b, ..) => perform(m, b, e),
        T::Interrupt { l, trigger, node, store } => {
            let mut out: Vec<T> =
                perform(m, l, e).into_iter().map(|l| interrupt(l, trigger.clone(), *node, store.clone())).collect();
            if trigger.matches(e) {
                let Node::Interrupt { trigger: c, r, .. } = m.node(*node) else { unreachable!() };
                let mut s = store.clone();
                for (it, v) in c.items.iter().zip(&e.vals) {
                    if let CommItem::In(x) = it {
                        s = store_with(&s, x, v.clone());
                    }
                }
                out.push(start(m, *r, s));
            }
            out
        }
        T::Block(b, saved) => perform(m, b, e).into_iter().map(|b| block(b, saved.clone())).collect(),
    }
}

/// Internal successors.
pub fn taus(m: &Model, t: &T) -> Vec<T> {
    match t {
        T::Done(_) | T::Stopped | T::Fault(_) | T::Prefix { .. } | T::Wait(..) => Vec::new(),
        T::Choice(ks, s) => ks.iter().map(|k| start(m, *k, s.clone())).collect(),
        T::WaitChoice(lo, hi, s) => (*lo..=*hi).map(|n| wait(n, s.clone())).collect(),
        T::Seq(l, k) => taus(m, l).into_iter().map(|l| seq(m, l, *k)).collect(),
        T::Ext(l, r) => {
            let mut out: Vec<T> = taus(m, l).into_iter().map(|a| ext(a, (**r).clone())).collect();
            out.extend(taus(m, r).into_iter().map(|b| ext((**l).clone(), b)));
            out
        }
        T::Par { l, r, cs, ns1, ns2, base } => {
            let rebuild = |l: T, r: T| par(l, r, cs.clone(), ns1.clone(), ns2.clone(), base.clone());
            let mut out: Vec<T> = taus(m, l).into_iter().map(|a| rebuild(a, (**r).clone())).collect();
            out.extend(taus(m, r).into_iter().map(|b| rebuild((**l).clone(), b)));
            out
        }
        T::Hide(k, cs) => {
            let mut out: Vec<T> = taus(m, k).into_iter().map(|k| hide(k, cs.clone())).collect();
            for o in offers(m, k) {
                for part in split(m, &o, cs).0 {
                    for e in instantiate(m, &part) {
                        out.extend(perform(m, k, &e).into_iter().map(|k| hide(k, cs.clone())));
                    }
                }
            }
            out
        }
        T::EndBy(b, d, label) => taus(m, b).into_iter().map(|b| endby(b, *d, label.clone())).collect(),
        T::StartBy(b, d, label) => taus(m, b).into_iter().map(|b| startby(b, *d, label.clone())).collect(),
        T::Interrupt { l, trigger, node, store } => {
            taus(m, l).into_iter().map(|l| interrupt(l, trigger.clone(), *node, store.clone())).collect()
        }
        T::Block(b, saved) => taus(m, b).into_iter().map(|b| block(b, saved.clone())).collect(),
    }
}

/// One unit of time. `None` when a deadline or pending internal choice
/// forbids it.
pub fn tick(m: &Model, t: &T) -> Option<T> {
    Some(match t {
        T::Done(_) | T::Stopped | T::Fault(_) | T::Prefix { .. } => t.clone(),
        T::Choice(..) | T::WaitChoice(..) => return None,
        T::Wait(n, s) => wait(n - 1, s.clone()),
        T::Seq(l, k) => seq(m, tick(m, l)?, *k),
        T::Ext(l, r) => ext(tick(m, l)?, tick(m, r)?),
        T::Par { l, r, cs, ns1, ns2, base } => par(tick(m, l)?, tick(m, r)?, cs.clone(), ns1.clone(), ns2.clone(), base.clone()),
        T::Hide(k, cs) => hide(tick(m, k)?, cs.clone()),
        T::EndBy(b, d, label) => {
            if *d == 0 {
                return None;
            }
            endby(tick(m, b)?, d - 1, label.clone())
        }
        T::StartBy(b, d, label) => {
            if *d == 0 {
                return None;
            }
            startby(tick(m, b)?, d - 1, label.clone())
        }
        T::Interrupt { l, trigger, node, store } => interrupt(tick(m, l)?, trigger.clone(), *node, store.clone()),
        T::Block(b, saved) => block(tick(m, b)?, saved.clone()),
    })
}

/// The first expired deadline found in the active part of `t`.
pub fn obligation(t: &T) -> Option<Obligation> {
    match t {
        T::EndBy(b, d, label) | T::StartBy(b, d, label) => {
            if let Some(o) = obligation(b) {
                return Some(o);
            }
            (*d == 0).then(|| Obligation {
                component: label.to_string(),
                operator: if matches!(t, T::EndBy(..)) { "endby" } else { "startby" },
            })
        }
        T::Seq(l, _) | T::Hide(l, _) | T::Block(l, _) | T::Interrupt { l, .. } => obligation(l),
        T::Ext(l, r) | T::Par { l, r, .. } => obligation(l).or_else(|| obligation(r)),
        _ => None,
    }
}

pub fn fault_of(t: &T) -> Option<&str> {
    match t {
        T::Fault(m) => Some(m),
        T::Seq(l, _) | T::Hide(l, _) | T::Block(l, _) | T::Interrupt { l, .. } | T::EndBy(l, ..) | T::StartBy(l, ..) => {
            fault_of(l)
        }
        T::Ext(l, r) | T::Par { l, r, .. } => fault_of(l).or_else(|| fault_of(r)),
        _ => None,
    }
}
