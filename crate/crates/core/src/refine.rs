//! Refinement laws with proviso checks, bounded trace refinement, and the
//! recogniser mapping composed framework/application processes back to
//! SCJ-Circus paragraphs.

use std::collections::{BTreeMap, BTreeSet};

use crate::ast::*;
use crate::checker::{method_channels, release_target, APPLICATION, RELEASE};
use crate::frameworks::{self, FrameworkKind};
use crate::sim::{Model, Sim, SimError};
use crate::translate::{app_name, channel_set, ctor_channels, id_of};

#[derive(Debug, thiserror::Error)]
pub enum RefineError {
    #[error("proviso violated: {proviso} ({})", names.join(", "))]
    ProvisoViolation { proviso: &'static str, names: Vec<String> },
    #[error("target does not have the shape of the law: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Placeholder(#[from] PlaceholderCount),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("cannot recognise `{0}`: {1}")]
    Unrecognized(String, String),
}

fn violation(proviso: &'static str, names: impl IntoIterator<Item = String>) -> RefineError {
    RefineError::ProvisoViolation { proviso, names: names.into_iter().collect() }
}

/// Names bound by inputs and `var` blocks anywhere in `a`.
fn bound_names(a: &Action, out: &mut BTreeSet<String>) {
    match a {
        Action::Prefix(c, _) | Action::Interrupt { trigger: c, .. } => out.extend(c.inputs().map(str::to_string)),
        Action::VarBlock(ds, _) => out.extend(ds.iter().map(|d| d.name.clone())),
        _ => {}
    }
    for c in a.children() {
        bound_names(c, out);
    }
}

/// Law 1 (parallelism introduction):
/// `F(A)` becomes `(F(c1 -> c2 -> Skip) [| usedV(F) | {|c1, c2|} | usedV(A) |] (c1 -> A ; c2 -> Skip)) \ {|c1, c2|}`.
///
/// Names bound by inputs or blocks of `F` count as used by `F`, so `A`
/// cannot depend on values received in the context.
pub fn apply_law1(
    context: &Action,
    a: &Action,
    c1: &str,
    c2: &str,
    constants: &BTreeSet<String>,
) -> Result<Action, RefineError> {
    let whole = substitute(context, a)?;
    let mut vf = used_variables(context, constants);
    bound_names(context, &mut vf);
    let va = used_variables(a, constants);
    let shared: Vec<String> = vf.intersection(&va).cloned().collect();
    if !shared.is_empty() {
        return Err(violation("usedV(F) and usedV(A) must be disjoint", shared));
    }
    if c1 == c2 {
        return Err(violation("c1 and c2 must be distinct", [c1.to_string()]));
    }
    let used = used_channels(&whole);
    let clash: Vec<String> = [c1, c2].iter().filter(|c| used.contains(**c)).map(|c| c.to_string()).collect();
    if !clash.is_empty() {
        return Err(violation("c1, c2 must not be used in F(A)", clash));
    }
    let left = substitute(context, &Action::event(c1, Action::event(c2, Action::Skip)))?;
    let right = Action::seq(Action::event(c1, a.clone()), Action::event(c2, Action::Skip));
    let cs = chanset([c1, c2]);
    Ok(Action::hide(
        Action::par(left, vf.into_iter().collect(), cs.clone(), va.into_iter().collect(), right),
        cs,
    ))
}

fn chanset_names(cs: &ChanSet) -> BTreeSet<&str> {
    cs.iter().map(|i| i.chan.as_str()).collect()
}

/// Law 2 (unused behaviour introduction):
/// `(a -> A [| ns1 | cs | ns2 |] a -> B)` becomes
/// `(a -> A [| ns1 | cs + {|b|} | ns2 |] (a -> B [] b -> C))`.
pub fn apply_law2(target: &Action, b: &str, c: &Action) -> Result<Action, RefineError> {
    let Action::Par { left, ns1, cs, ns2, right } = target else {
        return Err(RefineError::ShapeMismatch("not a parallel composition".into()));
    };
    let (Action::Prefix(a1, _), Action::Prefix(a2, _)) = (&**left, &**right) else {
        return Err(RefineError::ShapeMismatch("both sides must start with a prefix".into()));
    };
    if a1 != a2 {
        return Err(RefineError::ShapeMismatch(format!("prefixes `{}` and `{}` differ", a1.chan, a2.chan)));
    }
    let synced = cs.iter().any(|i| i.chan == a1.chan && i.prefix.is_empty());
    if !synced {
        return Err(violation("a must be in cs", [a1.chan.clone()]));
    }
    let mut used = used_channels(left);
    used.extend(used_channels(right));
    if used.contains(b) {
        return Err(violation("b must not be used by either side", [b.to_string()]));
    }
    let mut cs2 = cs.clone();
    if !chanset_names(cs).contains(b) {
        cs2.push(ChanItem::chan(b));
    }
    Ok(Action::Par {
        left: left.clone(),
        ns1: ns1.clone(),
        cs: cs2,
        ns2: ns2.clone(),
        right: Box::new(Action::ext((**right).clone(), Action::event(b, c.clone()))),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementResult {
    pub holds: bool,
    /// A shortest trace of the implementation the specification lacks.
    pub counterexample: Option<Vec<String>>,
    /// Enumeration hit the state cap on either side.
    pub partial: bool,
}

/// Bounded trace refinement: every timed trace of `imp` up to `depth` is a
/// trace of `spec`. Both name processes of `program`.
pub fn check_bounded_refinement(
    program: &Program,
    spec: &str,
    imp: &str,
    depth: usize,
    consts: &BTreeMap<String, u64>,
) -> Result<RefinementResult, RefineError> {
    check_programs(program, spec, program, imp, depth, consts)
}

/// As [`check_bounded_refinement`] with the two processes in separate programs.
pub fn check_programs(
    spec_program: &Program,
    spec: &str,
    imp_program: &Program,
    imp: &str,
    depth: usize,
    consts: &BTreeMap<String, u64>,
) -> Result<RefinementResult, RefineError> {
    let s = Sim::new(Model::new(spec_program, consts)?, spec)?.traces(depth);
    let i = Sim::new(Model::new(imp_program, consts)?, imp)?.traces(depth);
    let counterexample = i.traces.iter().filter(|t| !s.traces.contains(*t)).min_by_key(|t| t.len()).cloned();
    Ok(RefinementResult { holds: counterexample.is_none(), counterexample, partial: s.partial || i.partial })
}

/// Two main actions compared in a program holding `decls`.
pub fn check_actions(
    decls: &[Paragraph],
    spec: &Action,
    imp: &Action,
    depth: usize,
    consts: &BTreeMap<String, u64>,
) -> Result<RefinementResult, RefineError> {
    let mut program = Program::new(decls.to_vec());
    for (name, a) in [("Spec__", spec), ("Impl__", imp)] {
        program.paragraphs.push(Paragraph::Circus(CircusParagraph::Process(ProcessDecl {
            name: name.into(),
            params: Vec::new(),
            body: Process::Basic(BasicProcess { state: Vec::new(), actions: Vec::new(), main: a.clone() }),
        })));
    }
    check_bounded_refinement(&program, "Spec__", "Impl__", depth, consts)
}

// -- recognition --------------------------------------------------------------

struct Served {
    params: Vec<String>,
    body: Action,
}

fn unserve(a: &Action, call: &str, ret: &str) -> Option<Served> {
    let Action::Prefix(c, k) = a else { return None };
    if c.chan != call || c.items.len() < 2 {
        return None;
    }
    let params = c.items[2..]
        .iter()
        .map(|i| match i {
            CommItem::In(x) => Some(x.clone()),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()?;
    let is_ret = |a: &Action| matches!(a, Action::Prefix(r, k) if r.chan == ret && **k == Action::Skip);
    let body = match &**k {
        r if is_ret(r) => Action::Skip,
        Action::Seq(b, r) if is_ret(r) => (**b).clone(),
        _ => return None,
    };
    Some(Served { params, body })
}

fn outs(c: &Comm) -> Option<Vec<Expr>> {
    c.items
        .iter()
        .map(|i| match i {
            CommItem::Out(e) => Some(e.clone()),
            _ => None,
        })
        .collect()
}

/// Prefix chain `c1 -> c2 -> ... -> Skip`.
fn chain(a: &Action) -> Option<Vec<Comm>> {
    let mut out = Vec::new();
    let mut a = a;
    loop {
        match a {
            Action::Skip => return Some(out),
            Action::Prefix(c, k) => {
                out.push(c.clone());
                a = k;
            }
            _ => return None,
        }
    }
}

fn time_of(e: &Expr) -> Option<TimeExpr> {
    Some(match e {
        Expr::Nat(n) => TimeExpr::Lit(*n),
        Expr::Name(n) => TimeExpr::Name(n.clone()),
        Expr::Bin(BinOp::Add, a, b) => TimeExpr::Sum(Box::new(time_of(a)?), Box::new(time_of(b)?)),
        _ => return None,
    })
}

struct Rx<'a> {
    program: &'a Program,
    /// Component name to framework kind.
    kinds: BTreeMap<String, FrameworkKind>,
}

impl Rx<'_> {
    fn name_of_id(&self, e: &Expr) -> Option<String> {
        match e {
            Expr::Name(n) => n.strip_suffix("ID").filter(|c| self.kinds.contains_key(*c)).map(str::to_string),
            _ => None,
        }
    }

    fn unid(&self, a: &Action) -> Action {
        a.rename_names(&|n: &str| n.strip_suffix("ID").filter(|c| self.kinds.contains_key(*c)).map(str::to_string))
    }

    fn unid_expr(&self, e: &Expr) -> Expr {
        e.rename(&|n: &str| n.strip_suffix("ID").filter(|c| self.kinds.contains_key(*c)).map(str::to_string))
    }

    fn err(&self, name: &str, msg: impl Into<String>) -> RefineError {
        RefineError::Unrecognized(name.to_string(), msg.into())
    }

    fn app<'b>(&'b self, name: &str) -> Result<&'b BasicProcess, RefineError> {
        match self.program.process(&app_name(name)).map(|d| &d.body) {
            Some(Process::Basic(b)) => Ok(b),
            _ => Err(self.err(name, "application process missing")),
        }
    }

    fn action<'b>(&self, app: &'b BasicProcess, name: &str, meth: &str) -> Result<&'b Action, RefineError> {
        app.actions.iter().find(|(n, _)| n == meth).map(|(_, a)| a).ok_or_else(|| self.err(name, format!("no `{meth}`")))
    }

    fn served(&self, app: &BasicProcess, name: &str, meth: &str, call: &str, ret: &str) -> Result<Served, RefineError> {
        unserve(self.action(app, name, meth)?, call, ret).ok_or_else(|| self.err(name, format!("`{meth}` has an unexpected shape")))
    }

    /// Auxiliary methods: every `<m>Meth` other than the framework ones.
    fn methods(&self, app: &BasicProcess, name: &str, fixed: &[&str]) -> Result<Vec<Method>, RefineError> {
        let mut out = Vec::new();
        for (n, _) in &app.actions {
            let Some(m) = n.strip_suffix("Meth") else { continue };
            if fixed.contains(&n.as_str()) {
                continue;
            }
            let [c, r] = method_channels(m);
            let s = self.served(app, name, n, &c, &r)?;
            out.push(Method { name: m.to_string(), body: self.unid(&s.body) });
        }
        Ok(out)
    }

    fn initial_from_main(&self, app: &BasicProcess) -> Option<Initial> {
        match &app.main {
            Action::Seq(i, m) if **m == Action::call("Methods") => {
                Some(Initial { params: Vec::new(), body: self.unid(i) })
            }
            _ => None,
        }
    }

    fn safelet(&self, name: &str) -> Result<SafeletDecl, RefineError> {
        let app = self.app(name)?;
        let g = self.served(app, name, "getSequencerMeth", "getSequencerCall", "getSequencerRet")?;
        let i = self.served(app, name, "initializeApplicationMeth", "safeletInitializeCall", "safeletInitializeRet")?;
        Ok(SafeletDecl {
            name: name.into(),
            state: without_ret(&app.state),
            methods: self.methods(app, name, &["getSequencerMeth", "initializeApplicationMeth"])?,
            initialize: self.unid(&i.body),
            get_sequencer: self.unid(&g.body),
        })
    }

    fn sequencer(&self, name: &str) -> Result<SequencerDecl, RefineError> {
        let app = self.app(name)?;
        let g = self.served(app, name, "getNextMissionMeth", "getNextMissionCall", "getNextMissionRet")?;
        Ok(SequencerDecl {
            name: name.into(),
            state: without_ret(&app.state),
            initial: self.initial_from_main(app),
            methods: self.methods(app, name, &["getNextMissionMeth"])?,
            get_next_mission: self.unid(&g.body),
        })
    }

    /// Returns the mission and the start/period of each periodic handler.
    fn mission(&self, name: &str) -> Result<(MissionDecl, BTreeMap<String, (TimeExpr, TimeExpr)>), RefineError> {
        let app = self.app(name)?;
        let init = self.served(app, name, "initializeMeth", "missionInitializeCall", "missionInitializeRet")?;
        let is_ctor = |a: &Action| matches!(a, Action::Prefix(c, _) if c.chan.ends_with("InitCall"));
        let (initialize, ctors) = match init.body {
            Action::Seq(i, c) if *c == Action::Skip || is_ctor(&c) => (*i, *c),
            c if is_ctor(&c) => (Action::Skip, c),
            other => (other, Action::Skip),
        };
        let ctors = chain(&ctors).ok_or_else(|| self.err(name, "constructor calls"))?;
        let mut handlers = Vec::new();
        for c in ctors.iter().step_by(2) {
            let vals = outs(c).ok_or_else(|| self.err(name, "constructor call items"))?;
            let h = vals.get(1).and_then(|e| self.name_of_id(e)).ok_or_else(|| self.err(name, "constructor target"))?;
            handlers.push(HandlerRef { name: h, args: vals[2..].iter().map(|e| self.unid_expr(e)).collect() });
        }
        let starts = self.served(app, name, "startHandlersMeth", "startHandlersCall", "startHandlersRet")?;
        let mut timing = BTreeMap::new();
        for c in chain(&starts.body).ok_or_else(|| self.err(name, "handler starts"))? {
            if c.chan != "start_peh" {
                continue;
            }
            let vals = outs(&c).filter(|v| v.len() == 4).ok_or_else(|| self.err(name, "start_peh items"))?;
            let h = self.name_of_id(&vals[1]).ok_or_else(|| self.err(name, "start_peh target"))?;
            let t = (time_of(&vals[2]), time_of(&vals[3]));
            let (Some(s), Some(p)) = t else { return Err(self.err(name, "start_peh timing")) };
            timing.insert(h, (s, p));
        }
        let cleanup = self.served(app, name, "cleanupMeth", "cleanupCall", "cleanupRet")?;
        let fixed = ["initializeMeth", "startHandlersMeth", "terminateHandlersMeth", "cleanupMeth"];
        let m = MissionDecl {
            name: name.into(),
            state: app.state.clone(),
            initial: self.initial_from_main(app),
            methods: self.methods(app, name, &fixed)?,
            initialize: self.unid(&initialize),
            handlers,
            cleanup: self.unid(&cleanup.body),
        };
        Ok((m, timing))
    }

    fn handler(&self, name: &str) -> Result<(Vec<VarDecl>, Option<Initial>, Vec<Method>, Action), RefineError> {
        let app = self.app(name)?;
        let [call, ret] = ctor_channels(name);
        let ctor = self.served(app, name, "Ctor", &call, &ret)?;
        let sorts: Vec<Sort> =
            self.program.channels().find(|(c, _)| *c == call).map(|(_, s)| s.to_vec()).unwrap_or_default();
        if sorts.len() != ctor.params.len() + 2 {
            return Err(self.err(name, "constructor channel sorts"));
        }
        let initial = (!ctor.params.is_empty() || ctor.body != Action::Skip).then(|| Initial {
            params: ctor.params.iter().zip(&sorts[2..]).map(|(n, s)| VarDecl::new(n.clone(), s.clone())).collect(),
            body: self.unid(&ctor.body),
        });
        let h = self.served(app, name, "handleAsyncEventMeth", "handleAsyncEventCall", "handleAsyncEventRet")?;
        Ok((app.state.clone(), initial, self.methods(app, name, &["handleAsyncEventMeth"])?, self.unid(&h.body)))
    }
}

fn without_ret(state: &[VarDecl]) -> Vec<VarDecl> {
    let mut s = state.to_vec();
    if s.last().is_some_and(|d| d.name == "ret" && d.sort == Sort::Id) {
        s.pop();
    }
    s
}

/// `(FW(NID) [| cs |] N_App) \ cs` with `cs` the channel set of the kind.
fn composed_kind(d: &ProcessDecl) -> Option<FrameworkKind> {
    let Process::Hide(inner, hidden) = &d.body else { return None };
    let Process::Par(fw, cs, app) = &**inner else { return None };
    let Process::Inst(k, args) = &**fw else { return None };
    let kind: FrameworkKind = FrameworkKind::ALL.into_iter().find(|x| x.name() == k)?;
    let id_ok = matches!(args.as_slice(), [Expr::Name(n)] if *n == id_of(&d.name));
    let app_ok = matches!(&**app, Process::Inst(a, xs) if *a == app_name(&d.name) && xs.is_empty());
    let cs_ok = *cs == channel_set(kind) && hidden == cs;
    (id_ok && app_ok && cs_ok).then_some(kind)
}

fn release_bare(a: &Action, target: &str) -> Action {
    let a = match a {
        Action::Prefix(c, k) if c.chan == RELEASE && outs(c).is_some_and(|v| v == [Expr::name(target)]) => {
            Action::Prefix(Comm::bare(RELEASE), k.clone())
        }
        a => a.clone(),
    };
    a.map_children(&mut |c| release_bare(c, target))
}

/// Map a translated program back to SCJ-Circus: each composed process with
/// its application process becomes the paragraph it came from, and the
/// declarations the translation adds are dropped.
pub fn recognize(program: &Program) -> Result<Program, RefineError> {
    let kinds: BTreeMap<String, FrameworkKind> = program
        .paragraphs
        .iter()
        .filter_map(|p| match p {
            Paragraph::Circus(CircusParagraph::Process(d)) => Some((d.name.clone(), composed_kind(d)?)),
            _ => None,
        })
        .collect();
    let rx = Rx { program, kinds };
    let mut timing = BTreeMap::new();
    for (n, k) in &rx.kinds {
        if *k == FrameworkKind::MissionFW {
            timing.extend(rx.mission(n)?.1);
        }
    }
    let templates: Vec<ProcessDecl> = FrameworkKind::ALL.iter().map(|k| k.decl()).collect();
    let fw_channels = frameworks::channel_decls();
    let by_app: BTreeMap<String, String> = rx.kinds.keys().map(|n| (app_name(n), n.clone())).collect();
    let ids: Vec<String> = rx.kinds.keys().map(|n| id_of(n)).collect();
    let mut generated_channels = BTreeSet::new();
    let mut out = Vec::new();
    for p in &program.paragraphs {
        let Paragraph::Circus(c) = p else {
            out.push(p.clone());
            continue;
        };
        match c {
            CircusParagraph::Ids(names) if !rx.kinds.is_empty() && {
                let mut s = names.clone();
                s.sort();
                s == ids
            } => {}
            CircusParagraph::Channel(d) if fw_channels.contains(d) => {}
            CircusParagraph::Channel(_) => {
                generated_channels.insert(out.len());
                out.push(p.clone());
            }
            CircusParagraph::Process(d) if templates.contains(d) || rx.kinds.contains_key(&d.name) => {}
            CircusParagraph::Process(d) if d.name == APPLICATION && !rx.kinds.is_empty() => {}
            CircusParagraph::Process(d) if by_app.contains_key(&d.name) => {
                let name = &by_app[&d.name];
                out.push(match rx.kinds[name] {
                    FrameworkKind::SafeletFW => Paragraph::Safelet(rx.safelet(name)?),
                    FrameworkKind::SequencerFW => Paragraph::Sequencer(rx.sequencer(name)?),
                    FrameworkKind::MissionFW => Paragraph::Mission(rx.mission(name)?.0),
                    FrameworkKind::PEHFW => {
                        let (state, initial, methods, handle) = rx.handler(name)?;
                        let (start, period) =
                            timing.get(name).cloned().ok_or_else(|| rx.err(name, "no mission starts it"))?;
                        Paragraph::Periodic(PeriodicHandlerDecl { name: name.clone(), start, period, state, initial, methods, handle })
                    }
                    FrameworkKind::APEHFW => {
                        let (state, initial, methods, handle) = rx.handler(name)?;
                        Paragraph::Aperiodic(AperiodicHandlerDecl { name: name.clone(), state, initial, methods, handle })
                    }
                });
            }
            _ => out.push(p.clone()),
        }
    }
    // Drop channel declarations introduced for methods and constructors.
    let mut generated: BTreeSet<String> = BTreeSet::new();
    for p in &out {
        match p {
            Paragraph::Periodic(PeriodicHandlerDecl { name, .. }) | Paragraph::Aperiodic(AperiodicHandlerDecl { name, .. }) => {
                generated.extend(ctor_channels(name));
            }
            _ => {}
        }
        let methods: &[Method] = match p {
            Paragraph::Safelet(s) => &s.methods,
            Paragraph::Sequencer(s) => &s.methods,
            Paragraph::Mission(s) => &s.methods,
            Paragraph::Periodic(s) => &s.methods,
            Paragraph::Aperiodic(s) => &s.methods,
            Paragraph::Circus(_) => &[],
        };
        for m in methods {
            generated.extend(method_channels(&m.name));
        }
    }
    let out: Vec<Paragraph> = out
        .into_iter()
        .enumerate()
        .filter(|(i, p)| match p {
            Paragraph::Circus(CircusParagraph::Channel(d)) if generated_channels.contains(i) => {
                !d.names.iter().all(|n| generated.contains(n))
            }
            _ => true,
        })
        .map(|(_, p)| p)
        .collect();
    let mut result = Program::new(out);
    bare_releases(&mut result);
    Ok(result)
}

/// `release!A` where `A` is the only aperiodic handler of the mission goes
/// back to bare `release`.
fn bare_releases(p: &mut Program) {
    let snapshot = p.clone();
    for par in &mut p.paragraphs {
        let Paragraph::Periodic(h) = par else { continue };
        let Some(m) = snapshot.paragraphs.iter().find_map(|x| match x {
            Paragraph::Mission(m) if m.handlers.iter().any(|r| r.name == h.name) => Some(m),
            _ => None,
        }) else {
            continue;
        };
        let targets = release_target(&snapshot, m, &Action::event(RELEASE, Action::Skip));
        if let [t] = targets.as_slice() {
            h.handle = release_bare(&h.handle, t);
            for meth in &mut h.methods {
                meth.body = release_bare(&meth.body, t);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_action, parse_program};
    use crate::translate::translate_program;

    fn act(s: &str) -> Action {
        parse_action(s).unwrap()
    }

    #[test]
    fn law1_example_shape() {
        let r = apply_law1(&act("x := 1 ; HOLE"), &act("c -> Skip"), "c1", "c2", &BTreeSet::new()).unwrap();
        let expected = Action::hide(
            Action::par(
                act("x := 1 ; c1 -> c2 -> Skip"),
                vec!["x".into()],
                chanset(["c1", "c2"]),
                vec![],
                act("(c1 -> c -> Skip) ; c2 -> Skip"),
            ),
            chanset(["c1", "c2"]),
        );
        assert_eq!(r, expected);
    }

    #[test]
    fn law1_provisos() {
        let e = apply_law1(&act("x := 1 ; HOLE"), &act("x := 2"), "c1", "c2", &BTreeSet::new()).unwrap_err();
        assert!(matches!(e, RefineError::ProvisoViolation { ref names, .. } if names == &["x"]));
        let e = apply_law1(&act("c1 -> HOLE"), &act("Skip"), "c1", "c2", &BTreeSet::new()).unwrap_err();
        assert!(matches!(e, RefineError::ProvisoViolation { ref names, .. } if names == &["c1"]));
        let e = apply_law1(&act("c?y -> HOLE"), &act("d!y -> Skip"), "c1", "c2", &BTreeSet::new()).unwrap_err();
        assert!(matches!(e, RefineError::ProvisoViolation { .. }));
    }

    #[test]
    fn law2_provisos_and_shape() {
        let t = act("a -> b -> Skip [| {} | {| a |} | {} |] a -> Skip");
        let r = apply_law2(&t, "t", &act("Skip")).unwrap();
        let Action::Par { cs, right, .. } = &r else { panic!() };
        assert_eq!(cs, &chanset(["a", "t"]));
        assert_eq!(**right, act("a -> Skip [] t -> Skip"));
        assert!(matches!(apply_law2(&t, "b", &Action::Skip), Err(RefineError::ProvisoViolation { .. })));
        let unsynced = act("a -> Skip [| {} | {| d |} | {} |] a -> Skip");
        assert!(matches!(apply_law2(&unsynced, "t", &Action::Skip), Err(RefineError::ProvisoViolation { .. })));
        assert!(matches!(apply_law2(&act("a -> Skip"), "t", &Action::Skip), Err(RefineError::ShapeMismatch(_))));
    }

    #[test]
    fn bounded_refinement_examples() {
        let decls = parse_program("channel a, b").unwrap().paragraphs;
        let none = BTreeMap::new();
        let r = check_actions(&decls, &act("a -> Skip [] b -> Skip"), &act("a -> Skip"), 2, &none).unwrap();
        assert!(r.holds);
        let r = check_actions(&decls, &act("a -> Skip"), &act("a -> Skip [] b -> Skip"), 2, &none).unwrap();
        assert_eq!(r.counterexample, Some(vec!["b".to_string()]));
    }

    #[test]
    fn law1_example_refines_both_ways() {
        let decls = parse_program("channel c, c1, c2").unwrap().paragraphs;
        let ctx = act("x := 1 ; HOLE");
        let a = act("c -> Skip");
        let lhs = substitute(&ctx, &a).unwrap();
        let rhs = apply_law1(&ctx, &a, "c1", "c2", &BTreeSet::new()).unwrap();
        let wrap = |a: Action| Action::VarBlock(vec![VarDecl::new("x", Sort::Nat)], Box::new(a));
        let none = BTreeMap::new();
        assert!(check_actions(&decls, &wrap(lhs.clone()), &wrap(rhs.clone()), 5, &none).unwrap().holds);
        assert!(check_actions(&decls, &wrap(rhs), &wrap(lhs), 5, &none).unwrap().holds);
    }

    #[test]
    fn recognize_inverts_translate() {
        let src = "channel tick_in : Nat
            safelet S = begin initialize = Skip getSequencer = ret := Q end
            sequencer Q = begin state [done: Bool] getNextMission = if not done then done := true ; ret := M [] done then ret := null fi end
            mission M = begin initialize = Skip handlers H(A), A end
            periodic handler H = begin start 1 period 4 state [a: ID] initial = a: ID @ this.a := a handleAsyncEvent = tick_in?v -> release -> Skip end
            aperiodic handler A = begin handleAsyncEvent = wait 1 end";
        let p = parse_program(src).unwrap();
        let t = translate_program(&p).unwrap();
        assert_eq!(recognize(&t.program()).unwrap(), p);
    }
}
