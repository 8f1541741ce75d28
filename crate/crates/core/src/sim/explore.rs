//! Configurations, random runs, exhaustive search and trace enumeration.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::model::Model;
use super::term::{self, T};
use super::value::Event;
use super::SimError;

/// Explicit cap on explored states.
pub const STATE_CAP: usize = 1_000_000;
const MAX_STEPS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    pub term: T,
    pub clock: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Event(Event),
    /// Index into the list of internal successors.
    Internal(usize),
    Tick,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Event(e) => write!(f, "{e}"),
            Label::Internal(i) => write!(f, "tau{i}"),
            Label::Tick => f.write_str("tock"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Ok { clock: u64, terminated: bool },
    DeadlineViolation { component: String, operator: String, clock: u64 },
    Deadlock { clock: u64 },
    DepthExhausted { clock: u64 },
    /// Expression evaluation failed at run time.
    Fault { message: String, clock: u64 },
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Ok { .. } => "ok",
            Verdict::DeadlineViolation { .. } => "deadline_violation",
            Verdict::Deadlock { .. } => "deadlock",
            Verdict::DepthExhausted { .. } => "depth_exhausted",
            Verdict::Fault { .. } => "fault",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Ok { clock, terminated } => {
                write!(f, "verdict ok clock={clock}{}", if *terminated { " terminated" } else { "" })
            }
            Verdict::DeadlineViolation { component, operator, clock } => {
                write!(f, "verdict deadline_violation component={component} operator={operator} clock={clock}")
            }
            Verdict::Deadlock { clock } => write!(f, "verdict deadlock clock={clock}"),
            Verdict::DepthExhausted { clock } => write!(f, "verdict depth_exhausted clock={clock}"),
            Verdict::Fault { message, clock } => write!(f, "verdict fault clock={clock} {message}"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Policy {
    Random(u64),
    /// Visible events on earlier channels win; ties go to the first event.
    Priority(Vec<String>),
}

#[derive(Clone, Debug)]
pub struct RunResult {
    /// Visible events with the clock at which they happened.
    pub trace: Vec<(u64, Event)>,
    pub verdict: Verdict,
}

impl RunResult {
    pub fn lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self.trace.iter().map(|(t, e)| format!("@t{t} {e}")).collect();
        out.push(self.verdict.to_string());
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TraceSet {
    pub traces: BTreeSet<Vec<String>>,
    /// Set when the state cap cut the enumeration short.
    pub partial: bool,
}

impl TraceSet {
    pub fn maximal(&self) -> Vec<&Vec<String>> {
        self.traces
            .iter()
            .filter(|t| !self.traces.iter().any(|u| u.len() > t.len() && u.starts_with(t)))
            .collect()
    }
}

pub struct Sim {
    pub model: Model,
    init: T,
}

impl Sim {
    /// Simulate the declared process `main`.
    pub fn new(model: Model, main: &str) -> Result<Sim, SimError> {
        let (params, body) = model.proc_def(main).ok_or_else(|| SimError::UnknownProcess(main.to_string()))?;
        if !params.is_empty() {
            return Err(SimError::Parametrised(main.to_string()));
        }
        let init = term::start_process(&model, &body.clone(), Rc::new(BTreeMap::new()));
        Ok(Sim { model, init })
    }

    pub fn initial(&self) -> Config {
        Config { term: self.init.clone(), clock: 0 }
    }

    pub fn visible(&self, c: &Config) -> Vec<Event> {
        let mut evs: Vec<Event> = term::offers(&self.model, &c.term)
            .iter()
            .flat_map(|o| term::instantiate(&self.model, o))
            .filter(|e| !term::perform(&self.model, &c.term, e).is_empty())
            .collect();
        evs.sort();
        evs.dedup();
        evs
    }

    pub fn internal(&self, c: &Config) -> Vec<Config> {
        let mut v: Vec<T> = term::taus(&self.model, &c.term);
        dedup(&mut v);
        v.into_iter().map(|t| Config { term: t, clock: c.clock }).collect()
    }

    /// Tick successor; honours maximal progress.
    pub fn tick(&self, c: &Config) -> Option<Config> {
        if !term::taus(&self.model, &c.term).is_empty() {
            return None;
        }
        term::tick(&self.model, &c.term).map(|t| Config { term: t, clock: c.clock + 1 })
    }

    pub fn enabled(&self, c: &Config) -> Vec<Label> {
        let taus = self.internal(c);
        let mut out: Vec<Label> = (0..taus.len()).map(Label::Internal).collect();
        out.extend(self.visible(c).into_iter().map(Label::Event));
        if taus.is_empty() && term::tick(&self.model, &c.term).is_some() {
            out.push(Label::Tick);
        }
        out
    }

    /// All successors on `l`.
    pub fn step_all(&self, c: &Config, l: &Label) -> Result<Vec<Config>, SimError> {
        let out: Vec<Config> = match l {
            Label::Event(e) => {
                let mut v = term::perform(&self.model, &c.term, e);
                dedup(&mut v);
                v.into_iter().map(|t| Config { term: t, clock: c.clock }).collect()
            }
            Label::Internal(i) => self.internal(c).into_iter().nth(*i).into_iter().collect(),
            Label::Tick => self.tick(c).into_iter().collect(),
        };
        if out.is_empty() {
            return Err(SimError::IllegalStep(l.to_string()));
        }
        Ok(out)
    }

    pub fn step(&self, c: &Config, l: &Label) -> Result<Config, SimError> {
        Ok(self.step_all(c, l)?.swap_remove(0))
    }

    fn stuck_verdict(&self, c: &Config) -> Verdict {
        match term::obligation(&c.term) {
            Some(o) => Verdict::DeadlineViolation { component: o.component, operator: o.operator.into(), clock: c.clock },
            None => Verdict::Deadlock { clock: c.clock },
        }
    }

    /// Classify a state with no internal moves. `None` means it can go on.
    fn terminal(&self, c: &Config, visible: &[Event], tick: &Option<Config>) -> Option<Verdict> {
        if let Some(m) = term::fault_of(&c.term) {
            return Some(Verdict::Fault { message: m.to_string(), clock: c.clock });
        }
        if matches!(c.term, T::Done(_)) {
            return Some(Verdict::Ok { clock: c.clock, terminated: true });
        }
        if visible.is_empty() {
            match tick {
                None => return Some(self.stuck_verdict(c)),
                Some(n) if n.term == c.term => return Some(Verdict::Deadlock { clock: c.clock }),
                Some(_) => {}
            }
        }
        None
    }

    /// Internal moves first, then visible events, then time.
    pub fn run(&self, policy: &Policy, max_ticks: u64) -> RunResult {
        let mut rng = ChaCha8Rng::seed_from_u64(match policy {
            Policy::Random(s) => *s,
            Policy::Priority(_) => 0,
        });
        let mut c = self.initial();
        let mut trace = Vec::new();
        for _ in 0..MAX_STEPS {
            let taus = self.internal(&c);
            if !taus.is_empty() {
                c = match policy {
                    Policy::Random(_) => taus.choose(&mut rng).cloned().unwrap(),
                    Policy::Priority(_) => taus.into_iter().next().unwrap(),
                };
                continue;
            }
            let vis = self.visible(&c);
            let tick = self.tick(&c);
            if let Some(v) = self.terminal(&c, &vis, &tick) {
                return RunResult { trace, verdict: v };
            }
            if vis.is_empty() {
                c = tick.unwrap();
                if c.clock >= max_ticks {
                    return RunResult { trace, verdict: Verdict::Ok { clock: c.clock, terminated: false } };
                }
                continue;
            }
            let e = match policy {
                Policy::Random(_) => vis.choose(&mut rng).cloned().unwrap(),
                Policy::Priority(order) => order
                    .iter()
                    .find_map(|ch| vis.iter().find(|e| &e.chan == ch))
                    .unwrap_or(&vis[0])
                    .clone(),
            };
            let mut next = term::perform(&self.model, &c.term, &e);
            dedup(&mut next);
            let t = match policy {
                Policy::Random(_) => next.choose(&mut rng).cloned().unwrap(),
                Policy::Priority(_) => next.swap_remove(0),
            };
            trace.push((c.clock, e));
            c = Config { term: t, clock: c.clock };
        }
        RunResult { trace, verdict: Verdict::DepthExhausted { clock: c.clock } }
    }

    /// Breadth-first search, under the same urgency as `run`, for a state
    /// whose verdict is not ok within `max_ticks`.
    pub fn search_violation(&self, max_ticks: u64) -> Result<Option<RunResult>, SimError> {
        #[derive(Debug)]
        struct Path(Option<Rc<Path>>, Option<(u64, Event)>);
        fn unwind(p: &Rc<Path>) -> Vec<(u64, Event)> {
            let mut out = Vec::new();
            let mut cur = Some(p.clone());
            while let Some(n) = cur {
                if let Some(e) = &n.1 {
                    out.push(e.clone());
                }
                cur = n.0.clone();
            }
            out.reverse();
            out
        }
        let mut seen: HashSet<Config> = HashSet::new();
        let mut queue: VecDeque<(Config, Rc<Path>)> = VecDeque::new();
        let c0 = self.initial();
        seen.insert(c0.clone());
        queue.push_back((c0, Rc::new(Path(None, None))));
        while let Some((c, path)) = queue.pop_front() {
            if seen.len() > STATE_CAP {
                return Err(SimError::StateCap);
            }
            let taus = self.internal(&c);
            let mut next: Vec<(Config, Option<(u64, Event)>)> = Vec::new();
            if !taus.is_empty() {
                next.extend(taus.into_iter().map(|t| (t, None)));
            } else {
                let vis = self.visible(&c);
                let tick = self.tick(&c);
                if let Some(v) = self.terminal(&c, &vis, &tick) {
                    if !v.is_ok() {
                        return Ok(Some(RunResult { trace: unwind(&path), verdict: v }));
                    }
                    continue;
                }
                if vis.is_empty() {
                    let t = tick.unwrap();
                    if t.clock >= max_ticks {
                        continue;
                    }
                    next.push((t, None));
                } else {
                    for e in vis {
                        for t in term::perform(&self.model, &c.term, &e) {
                            next.push((Config { term: t, clock: c.clock }, Some((c.clock, e.clone()))));
                        }
                    }
                }
            }
            for (n, ev) in next {
                if seen.insert(n.clone()) {
                    let p = if ev.is_some() { Rc::new(Path(Some(path.clone()), ev)) } else { path.clone() };
                    queue.push_back((n, p));
                }
            }
        }
        Ok(None)
    }

    /// Visible traces of length at most `depth`, with `tock` for ticks.
    pub fn traces(&self, depth: usize) -> TraceSet {
        self.enumerate(depth, true)
    }

    /// As [`Sim::traces`] with time passing silently.
    pub fn untimed_traces(&self, depth: usize) -> TraceSet {
        self.enumerate(depth, false)
    }

    fn enumerate(&self, depth: usize, timed: bool) -> TraceSet {
        let mut out = TraceSet::default();
        let mut budget = STATE_CAP;
        let start = self.closure(vec![self.initial().term], timed, &mut budget, &mut out.partial);
        self.traces_from(start, Vec::new(), depth, timed, &mut budget, &mut out);
        out
    }

    // A terminated process does not record further time.
    fn tock(&self, t: &T) -> Option<T> {
        if matches!(t, T::Done(_)) || !term::taus(&self.model, t).is_empty() {
            return None;
        }
        term::tick(&self.model, t)
    }

    fn closure(&self, seed: Vec<T>, timed: bool, budget: &mut usize, partial: &mut bool) -> Vec<T> {
        let mut seen: HashSet<T> = HashSet::new();
        let mut stack = seed;
        let mut out = Vec::new();
        while let Some(t) = stack.pop() {
            if seen.contains(&t) {
                continue;
            }
            if *budget == 0 {
                *partial = true;
                break;
            }
            *budget -= 1;
            stack.extend(term::taus(&self.model, &t));
            if !timed {
                stack.extend(self.tock(&t));
            }
            seen.insert(t.clone());
            out.push(t);
        }
        out
    }

    fn traces_from(
        &self,
        set: Vec<T>,
        prefix: Vec<String>,
        depth: usize,
        timed: bool,
        budget: &mut usize,
        out: &mut TraceSet,
    ) {
        out.traces.insert(prefix.clone());
        if prefix.len() >= depth || set.is_empty() {
            return;
        }
        let mut by_label: BTreeMap<String, Vec<T>> = BTreeMap::new();
        for t in &set {
            for o in term::offers(&self.model, t) {
                for e in term::instantiate(&self.model, &o) {
                    let succ = term::perform(&self.model, t, &e);
                    if !succ.is_empty() {
                        by_label.entry(e.to_string()).or_default().extend(succ);
                    }
                }
            }
            if timed {
                if let Some(n) = self.tock(t) {
                    by_label.entry("tock".into()).or_default().push(n);
                }
            }
        }
        for (label, succ) in by_label {
            if *budget == 0 {
                out.partial = true;
                return;
            }
            let next = self.closure(succ, timed, budget, &mut out.partial);
            let mut p = prefix.clone();
            p.push(label);
            self.traces_from(next, p, depth, timed, budget, out);
        }
    }
}

fn dedup(v: &mut Vec<T>) {
    let mut seen = HashSet::new();
    v.retain(|t| seen.insert(t.clone()));
}
