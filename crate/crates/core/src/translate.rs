//! Semantic functions from SCJ-Circus paragraphs to Circus Time processes.
//!
//! Each SCJ paragraph `N` becomes an application process `N_App` and a
//! composed process `N = (FW(NID) [| CS |] N_App) \ CS`. The `Application`
//! process composes the components, which talk over the visible start,
//! done, release and constructor channels.

use std::collections::{BTreeMap, BTreeSet};

use crate::ast::*;
use crate::checker::{method_channels, release_target, APPLICATION, RELEASE};
use crate::frameworks::{self, FrameworkKind};
use crate::pretty;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("internal error: {0} (was the program checked?)")]
    Internal(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslationOutput {
    pub paragraphs: Vec<Paragraph>,
    /// SCJ paragraph name to (application process, composed process).
    pub components: BTreeMap<String, (String, String)>,
}

impl TranslationOutput {
    pub fn program(&self) -> Program {
        Program { paragraphs: self.paragraphs.clone() }
    }

    pub fn text(&self) -> String {
        pretty::program(&self.program())
    }
}

pub fn id_of(name: &str) -> String {
    format!("{name}ID")
}

pub fn app_name(name: &str) -> String {
    format!("{name}_App")
}

pub fn ctor_channels(handler: &str) -> [String; 2] {
    [format!("{handler}InitCall"), format!("{handler}InitRet")]
}

pub fn kind_of(p: &Paragraph) -> Option<FrameworkKind> {
    Some(match p {
        Paragraph::Safelet(_) => FrameworkKind::SafeletFW,
        Paragraph::Sequencer(_) => FrameworkKind::SequencerFW,
        Paragraph::Mission(_) => FrameworkKind::MissionFW,
        Paragraph::Periodic(_) => FrameworkKind::PEHFW,
        Paragraph::Aperiodic(_) => FrameworkKind::APEHFW,
        Paragraph::Circus(_) => return None,
    })
}

/// Channels on which a component's application and framework processes
/// synchronise; hidden in the composed process.
pub fn channel_set(kind: FrameworkKind) -> ChanSet {
    let (pairs, end): (&[&str], &str) = match kind {
        FrameworkKind::SafeletFW => (
            &["safeletInitializeCall", "safeletInitializeRet", "getSequencerCall", "getSequencerRet"],
            "end_safelet_app",
        ),
        FrameworkKind::SequencerFW => (&["getNextMissionCall", "getNextMissionRet"], "end_sequencer_app"),
        FrameworkKind::MissionFW => (
            &[
                "missionInitializeCall",
                "missionInitializeRet",
                "startHandlersCall",
                "startHandlersRet",
                "terminateHandlersCall",
                "terminateHandlersRet",
                "cleanupCall",
                "cleanupRet",
            ],
            "end_mission_app",
        ),
        FrameworkKind::PEHFW | FrameworkKind::APEHFW => {
            (&["handleAsyncEventCall", "handleAsyncEventRet"], "end_handler_app")
        }
    };
    pairs.iter().chain([&end]).map(|c| ChanItem::chan(*c)).collect()
}

// -- helpers ----------------------------------------------------------------

fn fresh(avoid: &BTreeSet<String>, base: &str) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1..).map(|i| format!("{base}{i}")).find(|n| !avoid.contains(n)).unwrap()
}

fn names_in(a: &Action) -> BTreeSet<String> {
    let mut out = used_variables(a, &BTreeSet::new());
    collect_inputs(a, &mut out);
    out
}

fn collect_inputs(a: &Action, out: &mut BTreeSet<String>) {
    match a {
        Action::Prefix(c, _) | Action::Interrupt { trigger: c, .. } => out.extend(c.inputs().map(str::to_string)),
        Action::VarBlock(ds, _) => out.extend(ds.iter().map(|d| d.name.clone())),
        _ => {}
    }
    for c in a.children() {
        collect_inputs(c, out);
    }
}

fn then(a: Action, k: Action) -> Action {
    match a {
        Action::Skip => k,
        a => Action::seq(a, k),
    }
}

fn out(e: Expr) -> CommItem {
    CommItem::Out(e)
}

/// `call?x!NID?p.. -> (body ; ret!x!NID[!v] -> Skip)`
fn serve(call: &str, ret: &str, nid: &str, params: &[VarDecl], body: Action, value: Option<Expr>) -> Action {
    let mut avoid = names_in(&body);
    avoid.extend(params.iter().map(|d| d.name.clone()));
    let x = fresh(&avoid, "x");
    let mut items = vec![CommItem::In(x.clone()), out(Expr::name(nid))];
    items.extend(params.iter().map(|d| CommItem::In(d.name.clone())));
    let mut ritems = vec![out(Expr::name(x)), out(Expr::name(nid))];
    ritems.extend(value.map(out));
    Action::prefix(Comm::new(call, items), then(body, Action::prefix(Comm::new(ret, ritems), Action::Skip)))
}

/// `mu X @ (M1 ; X [] ... [] end -> Skip)`
fn methods_loop(meths: &[String], end: &str) -> Action {
    let mut alts: Vec<Action> = meths.iter().map(|m| Action::seq(Action::call(m), Action::call("X"))).collect();
    alts.push(Action::event(end, Action::Skip));
    Action::mu("X", Action::ext_all(alts))
}

fn time_expr(t: &TimeExpr) -> Result<Expr, TranslateError> {
    Ok(match t {
        TimeExpr::Lit(n) => Expr::Nat(*n),
        TimeExpr::Name(n) => Expr::name(n.clone()),
        TimeExpr::Sum(a, b) => Expr::bin(BinOp::Add, time_expr(a)?, time_expr(b)?),
        TimeExpr::Range(..) => return Err(TranslateError::Internal("start/period must be a single value".into())),
    })
}

/// Translation context: the source program and its component names.
pub struct Cx<'a> {
    program: &'a Program,
    scj: BTreeSet<String>,
}

impl<'a> Cx<'a> {
    pub fn new(program: &'a Program) -> Self {
        Cx { program, scj: scj_names(program).into_iter().collect() }
    }

    /// Component names used as values become their identifiers.
    fn ids(&self, a: &Action) -> Action {
        let f = |n: &str| self.scj.contains(n).then(|| id_of(n));
        a.rename_names(&f)
    }

    fn ids_expr(&self, e: &Expr) -> Expr {
        e.rename(&|n: &str| self.scj.contains(n).then(|| id_of(n)))
    }

    /// Aim bare releases at the single aperiodic handler of the mission.
    fn releases(&self, handler: &str, a: &Action) -> Result<Action, TranslateError> {
        let target = self.mission_of(handler).map(|m| release_target(self.program, m, &Action::event(RELEASE, Action::Skip)));
        fix_release(a, target.as_ref().and_then(|t| t.first().copied()))
    }

    fn mission_of(&self, handler: &str) -> Option<&MissionDecl> {
        self.program.paragraphs.iter().find_map(|p| match p {
            Paragraph::Mission(m) if m.handlers.iter().any(|h| h.name == handler) => Some(m),
            _ => None,
        })
    }
}

fn fix_release(a: &Action, target: Option<&str>) -> Result<Action, TranslateError> {
    let mut err = None;
    let r = map_prefixes(a, &mut |c| {
        if c.chan == RELEASE && c.items.is_empty() {
            match target {
                Some(t) => Comm::new(RELEASE, vec![out(Expr::name(id_of(t)))]),
                None => {
                    err = Some(TranslateError::Internal("release without a unique aperiodic target".into()));
                    c.clone()
                }
            }
        } else {
            c.clone()
        }
    });
    err.map_or(Ok(r), Err)
}

fn map_prefixes(a: &Action, f: &mut dyn FnMut(&Comm) -> Comm) -> Action {
    let a = match a {
        Action::Prefix(c, k) => Action::Prefix(f(c), k.clone()),
        a => a.clone(),
    };
    a.map_children(&mut |c| map_prefixes(c, f))
}

fn aux(methods: &[Method], nid: &str, cx: &Cx) -> Vec<(String, Action)> {
    methods
        .iter()
        .map(|m| {
            let [c, r] = method_channels(&m.name);
            (format!("{}Meth", m.name), serve(&c, &r, nid, &[], cx.ids(&m.body), None))
        })
        .collect()
}

fn basic(state: Vec<VarDecl>, actions: Vec<(String, Action)>, main: Action) -> Process {
    Process::Basic(BasicProcess { state, actions, main })
}

fn decl(name: String, body: Process) -> Paragraph {
    Paragraph::Circus(CircusParagraph::Process(ProcessDecl { name, params: Vec::new(), body }))
}

fn with_ret(state: &[VarDecl]) -> Vec<VarDecl> {
    let mut s = state.to_vec();
    if !s.iter().any(|d| d.name == "ret") {
        s.push(VarDecl::new("ret", Sort::Id));
    }
    s
}

fn composed(kind: FrameworkKind, name: &str) -> Paragraph {
    let cs = channel_set(kind);
    let body = Process::hide(
        Process::par(Process::inst(kind.name(), vec![Expr::name(id_of(name))]), cs.clone(), Process::inst(&app_name(name), vec![])),
        cs,
    );
    decl(name.to_string(), body)
}

fn initial_then(init: Option<&Initial>, cx: &Cx, k: Action) -> Action {
    match init {
        Some(i) => then(cx.ids(&i.body), k),
        None => k,
    }
}

// -- per paragraph -----------------------------------------------------------

pub fn translate_safelet(s: &SafeletDecl, cx: &Cx) -> [Paragraph; 2] {
    let nid = id_of(&s.name);
    let mut actions = vec![
        (
            "getSequencerMeth".to_string(),
            serve("getSequencerCall", "getSequencerRet", &nid, &[], cx.ids(&s.get_sequencer), Some(Expr::name("ret"))),
        ),
        (
            "initializeApplicationMeth".to_string(),
            serve("safeletInitializeCall", "safeletInitializeRet", &nid, &[], cx.ids(&s.initialize), None),
        ),
    ];
    actions.extend(aux(&s.methods, &nid, cx));
    let names: Vec<String> = actions.iter().map(|(n, _)| n.clone()).collect();
    actions.push(("Methods".into(), methods_loop(&names, "end_safelet_app")));
    let app = basic(with_ret(&s.state), actions, Action::call("Methods"));
    [decl(app_name(&s.name), app), composed(FrameworkKind::SafeletFW, &s.name)]
}

pub fn translate_sequencer(s: &SequencerDecl, cx: &Cx) -> [Paragraph; 2] {
    let nid = id_of(&s.name);
    let mut actions = vec![(
        "getNextMissionMeth".to_string(),
        serve("getNextMissionCall", "getNextMissionRet", &nid, &[], cx.ids(&s.get_next_mission), Some(Expr::name("ret"))),
    )];
    actions.extend(aux(&s.methods, &nid, cx));
    let names: Vec<String> = actions.iter().map(|(n, _)| n.clone()).collect();
    actions.push(("Methods".into(), methods_loop(&names, "end_sequencer_app")));
    let main = initial_then(s.initial.as_ref(), cx, Action::call("Methods"));
    let app = basic(with_ret(&s.state), actions, main);
    [decl(app_name(&s.name), app), composed(FrameworkKind::SequencerFW, &s.name)]
}

pub fn translate_mission(m: &MissionDecl, cx: &Cx) -> Result<[Paragraph; 2], TranslateError> {
    let nid = id_of(&m.name);
    let mine = Expr::name(nid.clone());
    let mut ctors = Action::Skip;
    let mut starts = Action::Skip;
    let mut stops = Action::Skip;
    for h in m.handlers.iter().rev() {
        let hid = Expr::name(id_of(&h.name));
        let [call, ret] = ctor_channels(&h.name);
        let mut items = vec![out(mine.clone()), out(hid.clone())];
        items.extend(h.args.iter().map(|a| out(cx.ids_expr(a))));
        ctors = Action::prefix(
            Comm::new(call, items),
            Action::prefix(Comm::new(ret, vec![out(mine.clone()), out(hid.clone())]), ctors),
        );
        let start = match cx.program.find(&h.name) {
            Some(Paragraph::Periodic(p)) => Comm::new(
                "start_peh",
                vec![out(mine.clone()), out(hid.clone()), out(time_expr(&p.start)?), out(time_expr(&p.period)?)],
            ),
            Some(Paragraph::Aperiodic(_)) => Comm::new("start_apeh", vec![out(mine.clone()), out(hid.clone())]),
            _ => return Err(TranslateError::Internal(format!("unknown handler `{}`", h.name))),
        };
        starts = Action::prefix(start, starts);
        stops = Action::prefix(Comm::new("done_handler", vec![out(hid)]), stops);
    }
    let any = Expr::Bool(!m.handlers.is_empty());
    let mut actions = vec![
        (
            "initializeMeth".to_string(),
            serve("missionInitializeCall", "missionInitializeRet", &nid, &[], then(cx.ids(&m.initialize), ctors), None),
        ),
        ("startHandlersMeth".to_string(), serve("startHandlersCall", "startHandlersRet", &nid, &[], starts, Some(any))),
        (
            "terminateHandlersMeth".to_string(),
            serve("terminateHandlersCall", "terminateHandlersRet", &nid, &[], stops, None),
        ),
        ("cleanupMeth".to_string(), serve("cleanupCall", "cleanupRet", &nid, &[], cx.ids(&m.cleanup), None)),
    ];
    actions.extend(aux(&m.methods, &nid, cx));
    let names: Vec<String> = actions.iter().map(|(n, _)| n.clone()).collect();
    actions.push(("Methods".into(), methods_loop(&names, "end_mission_app")));
    let main = initial_then(m.initial.as_ref(), cx, Action::call("Methods"));
    let app = basic(m.state.clone(), actions, main);
    Ok([decl(app_name(&m.name), app), composed(FrameworkKind::MissionFW, &m.name)])
}

fn translate_handler(
    kind: FrameworkKind,
    name: &str,
    state: &[VarDecl],
    initial: Option<&Initial>,
    methods: &[Method],
    handle: &Action,
    cx: &Cx,
) -> Result<[Paragraph; 2], TranslateError> {
    let nid = id_of(name);
    let [call, ret] = ctor_channels(name);
    let (params, ctor) = match initial {
        Some(i) => (i.params.clone(), cx.ids(&i.body)),
        None => (Vec::new(), Action::Skip),
    };
    let body = cx.releases(name, &cx.ids(handle))?;
    let mut actions = vec![
        ("Ctor".to_string(), serve(&call, &ret, &nid, &params, ctor, None)),
        ("handleAsyncEventMeth".to_string(), serve("handleAsyncEventCall", "handleAsyncEventRet", &nid, &[], body, None)),
    ];
    let mut extra = aux(methods, &nid, cx);
    for (_, a) in &mut extra {
        *a = cx.releases(name, a)?;
    }
    actions.extend(extra);
    let names: Vec<String> = actions.iter().skip(1).map(|(n, _)| n.clone()).collect();
    actions.push(("Methods".into(), methods_loop(&names, "end_handler_app")));
    let app = basic(state.to_vec(), actions, Action::seq(Action::call("Ctor"), Action::call("Methods")));
    Ok([decl(app_name(name), app), composed(kind, name)])
}

pub fn translate_periodic_handler(h: &PeriodicHandlerDecl, cx: &Cx) -> Result<[Paragraph; 2], TranslateError> {
    translate_handler(FrameworkKind::PEHFW, &h.name, &h.state, h.initial.as_ref(), &h.methods, &h.handle, cx)
}

pub fn translate_aperiodic_handler(h: &AperiodicHandlerDecl, cx: &Cx) -> Result<[Paragraph; 2], TranslateError> {
    translate_handler(FrameworkKind::APEHFW, &h.name, &h.state, h.initial.as_ref(), &h.methods, &h.handle, cx)
}

// -- whole programs ------------------------------------------------------------

fn scj_names(p: &Program) -> Vec<String> {
    p.paragraphs.iter().filter(|x| x.is_scj()).filter_map(|x| x.name().map(str::to_string)).collect()
}

/// Declarations every translated program starts with.
fn prelude(p: &Program) -> Vec<Paragraph> {
    let mut out = Vec::new();
    let names = scj_names(p);
    if !names.is_empty() {
        out.push(Paragraph::Circus(CircusParagraph::Ids(names.iter().map(|n| id_of(n)).collect())));
    }
    for d in frameworks::channel_decls() {
        out.push(Paragraph::Circus(CircusParagraph::Channel(d)));
    }
    let mut seen = BTreeSet::new();
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
            if seen.insert(m.name.clone()) {
                out.push(Paragraph::Circus(CircusParagraph::Channel(ChannelDecl {
                    names: method_channels(&m.name).to_vec(),
                    sorts: vec![Sort::Id, Sort::Id],
                })));
            }
        }
        let (name, init) = match par {
            Paragraph::Periodic(h) => (&h.name, &h.initial),
            Paragraph::Aperiodic(h) => (&h.name, &h.initial),
            _ => continue,
        };
        let [call, ret] = ctor_channels(name);
        let mut sorts = vec![Sort::Id, Sort::Id];
        sorts.extend(init.iter().flat_map(|i| i.params.iter().map(|d| d.sort.clone())));
        out.push(Paragraph::Circus(CircusParagraph::Channel(ChannelDecl { names: vec![call], sorts })));
        out.push(Paragraph::Circus(CircusParagraph::Channel(ChannelDecl { names: vec![ret], sorts: vec![Sort::Id, Sort::Id] })));
    }
    for k in FrameworkKind::ALL {
        out.push(Paragraph::Circus(CircusParagraph::Process(k.decl())));
    }
    out
}

pub fn translate_program(p: &Program) -> Result<TranslationOutput, TranslateError> {
    let cx = Cx::new(p);
    let mut paragraphs = if cx.scj.is_empty() { Vec::new() } else { prelude(p) };
    let mut components = BTreeMap::new();
    for par in &p.paragraphs {
        let pair = match par {
            Paragraph::Circus(c) => {
                paragraphs.push(Paragraph::Circus(c.clone()));
                continue;
            }
            Paragraph::Safelet(s) => translate_safelet(s, &cx),
            Paragraph::Sequencer(s) => translate_sequencer(s, &cx),
            Paragraph::Mission(m) => translate_mission(m, &cx)?,
            Paragraph::Periodic(h) => translate_periodic_handler(h, &cx)?,
            Paragraph::Aperiodic(h) => translate_aperiodic_handler(h, &cx)?,
        };
        let name = par.name().unwrap_or_default().to_string();
        components.insert(name.clone(), (app_name(&name), name));
        paragraphs.extend(pair);
    }
    paragraphs.push(decl(APPLICATION.to_string(), application(p, &|n| Process::inst(n, vec![]))));
    Ok(TranslationOutput { paragraphs, components })
}

fn fold(items: Vec<Process>, mut join: impl FnMut(Process, Process) -> Process) -> Option<Process> {
    let mut it = items.into_iter().rev();
    let last = it.next()?;
    Some(it.fold(last, |acc, p| join(p, acc)))
}

fn sync(l: Option<Process>, cs: ChanSet, r: Option<Process>) -> Option<Process> {
    match (l, r) {
        (Some(l), Some(r)) if cs.is_empty() => Some(Process::interleave(l, r)),
        (Some(l), Some(r)) => Some(Process::par(l, cs, r)),
        (l, None) => l,
        (None, r) => r,
    }
}

fn of_kind(p: &Program, f: fn(&Paragraph) -> bool) -> Vec<String> {
    p.paragraphs.iter().filter(|x| f(x)).filter_map(|x| x.name().map(str::to_string)).collect()
}

/// Release items a periodic handler in `left` aims at an aperiodic in `right`
/// or the other way round.
fn release_items(p: &Program, left: &[String], right: &[String]) -> ChanSet {
    let mut targets = BTreeSet::new();
    for par in &p.paragraphs {
        let Paragraph::Mission(m) = par else { continue };
        for h in &m.handlers {
            if let Some(Paragraph::Periodic(ph)) = p.find(&h.name) {
                for a in release_target(p, m, &ph.handle) {
                    let crosses = (left.contains(&ph.name) && right.iter().any(|r| r == a))
                        || (right.contains(&ph.name) && left.iter().any(|l| l == a));
                    if crosses {
                        targets.insert(a.to_string());
                    }
                }
            }
        }
    }
    targets.into_iter().map(|a| ChanItem::with_prefix(RELEASE, vec![Expr::name(id_of(&a))])).collect()
}

fn handler_links(p: &Program) -> ChanSet {
    let mut cs = chanset(["start_peh", "start_apeh", "done_handler", "requestTerminationCall", "requestTerminationRet"]);
    for h in of_kind(p, |x| matches!(x, Paragraph::Periodic(_) | Paragraph::Aperiodic(_))) {
        cs.extend(ctor_channels(&h).into_iter().map(ChanItem::chan));
    }
    cs
}

fn handlers_fold(p: &Program, names: &[String], mk: &dyn Fn(&str) -> Process) -> Option<Process> {
    let (first, rest) = names.split_first()?;
    let tail = handlers_fold(p, rest, mk);
    let cs = release_items(p, std::slice::from_ref(first), rest);
    sync(Some(mk(first)), cs, tail)
}

/// Safelet, sequencer, missions and handlers composed on their start/done
/// and handler-control channels. `mk` names each component's process.
fn application(p: &Program, mk: &dyn Fn(&str) -> Process) -> Process {
    let group = |f: fn(&Paragraph) -> bool| fold(of_kind(p, f).iter().map(|n| mk(n)).collect(), Process::interleave);
    let safelets = group(|x| matches!(x, Paragraph::Safelet(_)));
    let sequencers = group(|x| matches!(x, Paragraph::Sequencer(_)));
    let missions = group(|x| matches!(x, Paragraph::Mission(_)));
    let handlers = handlers_fold(p, &of_kind(p, |x| matches!(x, Paragraph::Periodic(_) | Paragraph::Aperiodic(_))), mk);
    let lower = sync(missions, handler_links(p), handlers);
    let mid = sync(sequencers, chanset(["start_mission", "done_mission"]), lower);
    sync(safelets, chanset(["start_sequencer", "done_sequencer"]), mid)
        .unwrap_or_else(|| basic(Vec::new(), Vec::new(), Action::Skip))
}

/// The framework-first composition of the same components: every framework
/// process composed into one network, in parallel with every application
/// process, synchronising on the union of the channel sets (hidden) and on
/// the channels crossing between application and framework processes.
/// Returns the declarations `Framework`, `Apps` and `Monolithic`; append them
/// to a translation of `p`.
pub fn monolithic(p: &Program) -> Vec<Paragraph> {
    let kinds: BTreeMap<String, FrameworkKind> =
        p.paragraphs.iter().filter_map(|x| Some((x.name()?.to_string(), kind_of(x)?))).collect();
    let fw = |n: &str| Process::inst(kinds[n].name(), vec![Expr::name(id_of(n))]);
    let framework = {
        let group = |f: fn(&Paragraph) -> bool| fold(of_kind(p, f).iter().map(|n| fw(n)).collect(), Process::interleave);
        let lower = sync(
            group(|x| matches!(x, Paragraph::Mission(_))),
            Vec::new(),
            group(|x| matches!(x, Paragraph::Periodic(_) | Paragraph::Aperiodic(_))),
        );
        let mid = sync(group(|x| matches!(x, Paragraph::Sequencer(_))), chanset(["start_mission", "done_mission"]), lower);
        sync(group(|x| matches!(x, Paragraph::Safelet(_))), chanset(["start_sequencer", "done_sequencer"]), mid)
    };
    let apps = {
        let app = |n: &str| Process::inst(&app_name(n), vec![]);
        let group = |f: fn(&Paragraph) -> bool| fold(of_kind(p, f).iter().map(|n| app(n)).collect(), Process::interleave);
        let mut ctor = Vec::new();
        for h in of_kind(p, |x| matches!(x, Paragraph::Periodic(_) | Paragraph::Aperiodic(_))) {
            ctor.extend(ctor_channels(&h).into_iter().map(ChanItem::chan));
        }
        let lower = sync(group(|x| matches!(x, Paragraph::Mission(_))), ctor, group(|x| matches!(x, Paragraph::Periodic(_) | Paragraph::Aperiodic(_))));
        let mid = sync(group(|x| matches!(x, Paragraph::Sequencer(_))), Vec::new(), lower);
        sync(group(|x| matches!(x, Paragraph::Safelet(_))), Vec::new(), mid)
    };
    let mut hidden: ChanSet = Vec::new();
    for k in kinds.values() {
        hidden.extend(channel_set(*k));
    }
    hidden.sort();
    hidden.dedup();
    let mut cs = hidden.clone();
    cs.extend(chanset(["start_peh", "start_apeh", "done_handler", "requestTerminationCall", "requestTerminationRet", RELEASE]));
    let empty = || basic(Vec::new(), Vec::new(), Action::Skip);
    vec![
        decl("Framework".into(), framework.unwrap_or_else(empty)),
        decl("Apps".into(), apps.unwrap_or_else(empty)),
        decl(
            "Monolithic".into(),
            Process::hide(Process::par(Process::inst("Framework", vec![]), cs, Process::inst("Apps", vec![])), hidden),
        ),
    ]
}
