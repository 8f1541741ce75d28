//! Abstract syntax for the SCJ-Circus surface language and the Circus Time
//! target calculus, plus the structural utilities the rest of the crate uses.
//!
//! All values are plain immutable trees; equality is structural.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Role an identifier plays.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IdentKind {
    Channel,
    Variable,
    Process,
    Action,
    Paragraph,
    Constant,
}

/// A validated name together with its role.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Identifier {
    text: String,
    kind: IdentKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid identifier `{0}`")]
pub struct InvalidIdentifier(pub String);

impl Identifier {
    pub fn new(text: impl Into<String>, kind: IdentKind) -> Result<Self, InvalidIdentifier> {
        let text = text.into();
        if is_valid_name(&text) {
            Ok(Identifier { text, kind })
        } else {
            Err(InvalidIdentifier(text))
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn kind(&self) -> IdentKind {
        self.kind
    }
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// `[A-Za-z][A-Za-z0-9_]*`
pub fn is_valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => false,
    }
}

/// Payload and variable sorts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sort {
    Nat,
    Bool,
    Id,
    SeqNat,
    Unit,
    /// A class or otherwise opaque type, e.g. `Buffer`.
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarDecl {
    pub name: String,
    pub sort: Sort,
}

impl VarDecl {
    pub fn new(name: impl Into<String>, sort: Sort) -> Self {
        VarDecl { name: name.into(), sort }
    }
}

/// Memory area targeted by an allocation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NewKind {
    /// Immortal memory.
    NewI,
    /// Mission memory.
    NewM,
    /// Per-release memory.
    NewPR,
    /// Private memory.
    NewPM,
}

impl NewKind {
    pub const ALL: [NewKind; 4] = [NewKind::NewI, NewKind::NewM, NewKind::NewPR, NewKind::NewPM];

    pub fn keyword(self) -> &'static str {
        match self {
            NewKind::NewI => "newI",
            NewKind::NewM => "newM",
            NewKind::NewPR => "newPR",
            NewKind::NewPM => "newPM",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        NewKind::ALL.into_iter().find(|k| k.keyword() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Concat,
    Eq,
    Neq,
    Lt,
    Le,
    In,
    NotIn,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Concat => "^",
            BinOp::Eq => "=",
            BinOp::Neq => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::In => "in",
            BinOp::NotIn => "notin",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn level(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Neq | BinOp::Lt | BinOp::Le | BinOp::In | BinOp::NotIn => 4,
            BinOp::Add | BinOp::Sub | BinOp::Concat => 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Expr {
    Nat(u64),
    Bool(bool),
    Null,
    /// Variable, constant, parameter or ID value.
    Name(String),
    /// `this.x`
    Field(String),
    SeqLit(Vec<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    New {
        kind: NewKind,
        class: String,
        args: Vec<Expr>,
    },
}

impl Expr {
    pub fn name(s: impl Into<String>) -> Self {
        Expr::Name(s.into())
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn free_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Nat(_) | Expr::Bool(_) | Expr::Null => {}
            Expr::Name(n) | Expr::Field(n) => {
                out.insert(n.clone());
            }
            Expr::SeqLit(xs) => xs.iter().for_each(|x| x.free_names(out)),
            Expr::Bin(op, l, r) => {
                l.free_names(out);
                // the right operand of a membership test names a set constant
                if !matches!(op, BinOp::In | BinOp::NotIn) {
                    r.free_names(out);
                }
            }
            Expr::Not(e) => e.free_names(out),
            Expr::New { args, .. } => args.iter().for_each(|x| x.free_names(out)),
        }
    }

    pub fn visit_allocs(&self, f: &mut dyn FnMut(NewKind, &str)) {
        match self {
            Expr::SeqLit(xs) => xs.iter().for_each(|x| x.visit_allocs(f)),
            Expr::Bin(_, l, r) => {
                l.visit_allocs(f);
                r.visit_allocs(f);
            }
            Expr::Not(e) => e.visit_allocs(f),
            Expr::New { kind, class, args } => {
                f(*kind, class);
                args.iter().for_each(|x| x.visit_allocs(f));
            }
            _ => {}
        }
    }

    /// Rename free names according to `f` (used by translation).
    pub fn rename(&self, f: &dyn Fn(&str) -> Option<String>) -> Expr {
        match self {
            Expr::Name(n) => Expr::Name(f(n).unwrap_or_else(|| n.clone())),
            Expr::SeqLit(xs) => Expr::SeqLit(xs.iter().map(|x| x.rename(f)).collect()),
            Expr::Bin(op, l, r) => {
                let r = if matches!(op, BinOp::In | BinOp::NotIn) {
                    (**r).clone()
                } else {
                    r.rename(f)
                };
                Expr::bin(*op, l.rename(f), r)
            }
            Expr::Not(e) => Expr::Not(Box::new(e.rename(f))),
            Expr::New { kind, class, args } => Expr::New {
                kind: *kind,
                class: class.clone(),
                args: args.iter().map(|x| x.rename(f)).collect(),
            },
            other => other.clone(),
        }
    }
}

/// Time expressions; units are abstract ticks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TimeExpr {
    Lit(u64),
    /// Named constant or (in framework processes) a state variable.
    Name(String),
    Sum(Box<TimeExpr>, Box<TimeExpr>),
    Range(Box<TimeExpr>, Box<TimeExpr>),
}

impl TimeExpr {
    pub fn name(s: impl Into<String>) -> Self {
        TimeExpr::Name(s.into())
    }

    pub fn range(lo: TimeExpr, hi: TimeExpr) -> Self {
        TimeExpr::Range(Box::new(lo), Box::new(hi))
    }

    pub fn names(&self, out: &mut BTreeSet<String>) {
        match self {
            TimeExpr::Lit(_) => {}
            TimeExpr::Name(n) => {
                out.insert(n.clone());
            }
            TimeExpr::Sum(a, b) | TimeExpr::Range(a, b) => {
                a.names(out);
                b.names(out);
            }
        }
    }

    /// Evaluate with `lookup`; ranges yield `(lo, hi)`, plain values `(v, v)`.
    pub fn eval_bounds(&self, lookup: &dyn Fn(&str) -> Option<u64>) -> Result<(u64, u64), String> {
        fn point(t: &TimeExpr, lookup: &dyn Fn(&str) -> Option<u64>) -> Result<u64, String> {
            match t {
                TimeExpr::Lit(n) => Ok(*n),
                TimeExpr::Name(n) => lookup(n).ok_or_else(|| n.clone()),
                TimeExpr::Sum(a, b) => Ok(point(a, lookup)?.saturating_add(point(b, lookup)?)),
                TimeExpr::Range(..) => Err("nested range".into()),
            }
        }
        match self {
            TimeExpr::Range(lo, hi) => Ok((point(lo, lookup)?, point(hi, lookup)?)),
            t => {
                let v = point(t, lookup)?;
                Ok((v, v))
            }
        }
    }

    fn rename(&self, f: &dyn Fn(&str) -> Option<String>) -> TimeExpr {
        match self {
            TimeExpr::Name(n) => TimeExpr::Name(f(n).unwrap_or_else(|| n.clone())),
            TimeExpr::Sum(a, b) => TimeExpr::Sum(Box::new(a.rename(f)), Box::new(b.rename(f))),
            TimeExpr::Range(a, b) => TimeExpr::Range(Box::new(a.rename(f)), Box::new(b.rename(f))),
            t => t.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CommItem {
    /// `!e`
    Out(Expr),
    /// `?x`
    In(String),
    /// `.e`
    Dot(Expr),
}

/// A communication `c!e?x.e'`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Comm {
    pub chan: String,
    pub items: Vec<CommItem>,
}

impl Comm {
    pub fn new(chan: impl Into<String>, items: Vec<CommItem>) -> Self {
        Comm { chan: chan.into(), items }
    }

    pub fn bare(chan: impl Into<String>) -> Self {
        Comm::new(chan, Vec::new())
    }

    pub fn inputs(&self) -> impl Iterator<Item = &str> {
        self.items.iter().filter_map(|i| match i {
            CommItem::In(x) => Some(x.as_str()),
            _ => None,
        })
    }
}

/// Member of a channel set: a whole channel, or the events of a channel
/// whose leading payload values equal `prefix`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ChanItem {
    pub chan: String,
    pub prefix: Vec<Expr>,
}

impl ChanItem {
    pub fn chan(c: impl Into<String>) -> Self {
        ChanItem { chan: c.into(), prefix: Vec::new() }
    }

    pub fn with_prefix(c: impl Into<String>, prefix: Vec<Expr>) -> Self {
        ChanItem { chan: c.into(), prefix }
    }
}

pub type ChanSet = Vec<ChanItem>;

pub fn chanset<I: IntoIterator<Item = S>, S: Into<String>>(names: I) -> ChanSet {
    names.into_iter().map(ChanItem::chan).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    Skip,
    Stop,
    Prefix(Comm, Box<Action>),
    ExtChoice(Box<Action>, Box<Action>),
    IntChoice(Box<Action>, Box<Action>),
    Seq(Box<Action>, Box<Action>),
    Par {
        left: Box<Action>,
        ns1: Vec<String>,
        cs: ChanSet,
        ns2: Vec<String>,
        right: Box<Action>,
    },
    Interleave(Box<Action>, Box<Action>),
    Hide(Box<Action>, ChanSet),
    Mu(String, Box<Action>),
    /// Reference to a recursion variable or a named action of the process.
    Call(String),
    /// `wait t` or `wait lo..hi`.
    Wait(TimeExpr),
    /// `A endby t`: must terminate within `t`.
    EndBy(Box<Action>, TimeExpr),
    /// `A startby t`: must engage in its first event within `t`.
    StartBy(Box<Action>, TimeExpr),
    Interrupt {
        left: Box<Action>,
        trigger: Comm,
        right: Box<Action>,
    },
    Assign {
        this: bool,
        var: String,
        value: Expr,
    },
    VarBlock(Vec<VarDecl>, Box<Action>),
    Guarded(Vec<(Expr, Action)>),
    /// Placeholder for context expressions `F(_)`.
    Hole,
}

/// Builders kept terse for tests and the framework templates.
impl Action {
    pub fn prefix(c: Comm, k: Action) -> Action {
        Action::Prefix(c, Box::new(k))
    }

    pub fn event(chan: &str, k: Action) -> Action {
        Action::Prefix(Comm::bare(chan), Box::new(k))
    }

    pub fn seq(a: Action, b: Action) -> Action {
        Action::Seq(Box::new(a), Box::new(b))
    }

    pub fn ext(a: Action, b: Action) -> Action {
        Action::ExtChoice(Box::new(a), Box::new(b))
    }

    pub fn int(a: Action, b: Action) -> Action {
        Action::IntChoice(Box::new(a), Box::new(b))
    }

    pub fn par(left: Action, ns1: Vec<String>, cs: ChanSet, ns2: Vec<String>, right: Action) -> Action {
        Action::Par { left: Box::new(left), ns1, cs, ns2, right: Box::new(right) }
    }

    pub fn interleave(a: Action, b: Action) -> Action {
        Action::Interleave(Box::new(a), Box::new(b))
    }

    pub fn hide(a: Action, cs: ChanSet) -> Action {
        Action::Hide(Box::new(a), cs)
    }

    pub fn mu(x: &str, body: Action) -> Action {
        Action::Mu(x.to_string(), Box::new(body))
    }

    pub fn call(x: &str) -> Action {
        Action::Call(x.to_string())
    }

    pub fn endby(a: Action, t: TimeExpr) -> Action {
        Action::EndBy(Box::new(a), t)
    }

    pub fn startby(a: Action, t: TimeExpr) -> Action {
        Action::StartBy(Box::new(a), t)
    }

    pub fn interrupt(left: Action, trigger: Comm, right: Action) -> Action {
        Action::Interrupt { left: Box::new(left), trigger, right: Box::new(right) }
    }

    pub fn assign(var: &str, value: Expr) -> Action {
        Action::Assign { this: false, var: var.to_string(), value }
    }

    /// Fold a non-empty list with external choice, left-associated.
    pub fn ext_all(mut items: Vec<Action>) -> Action {
        let first = items.remove(0);
        items.into_iter().fold(first, Action::ext)
    }

    /// Fold a list with sequential composition; empty is `Skip`.
    pub fn seq_all(items: Vec<Action>) -> Action {
        let mut it = items.into_iter();
        match it.next() {
            None => Action::Skip,
            Some(first) => it.fold(first, Action::seq),
        }
    }

    /// Immediate children, in order.
    pub fn children(&self) -> Vec<&Action> {
        match self {
            Action::Prefix(_, k)
            | Action::Hide(k, _)
            | Action::Mu(_, k)
            | Action::EndBy(k, _)
            | Action::StartBy(k, _)
            | Action::VarBlock(_, k) => vec![k],
            Action::ExtChoice(a, b)
            | Action::IntChoice(a, b)
            | Action::Seq(a, b)
            | Action::Interleave(a, b) => vec![a, b],
            Action::Par { left, right, .. } | Action::Interrupt { left, right, .. } => vec![left, right],
            Action::Guarded(alts) => alts.iter().map(|(_, a)| a).collect(),
            _ => Vec::new(),
        }
    }

    /// Number of `Hole` occurrences.
    pub fn hole_count(&self) -> usize {
        match self {
            Action::Hole => 1,
            a => a.children().into_iter().map(Action::hole_count).sum(),
        }
    }

    /// Apply `f` to every immediate child, rebuilding the node.
    pub fn map_children(&self, f: &mut dyn FnMut(&Action) -> Action) -> Action {
        match self {
            Action::Prefix(c, k) => Action::Prefix(c.clone(), Box::new(f(k))),
            Action::ExtChoice(a, b) => Action::ExtChoice(Box::new(f(a)), Box::new(f(b))),
            Action::IntChoice(a, b) => Action::IntChoice(Box::new(f(a)), Box::new(f(b))),
            Action::Seq(a, b) => Action::Seq(Box::new(f(a)), Box::new(f(b))),
            Action::Par { left, ns1, cs, ns2, right } => Action::Par {
                left: Box::new(f(left)),
                ns1: ns1.clone(),
                cs: cs.clone(),
                ns2: ns2.clone(),
                right: Box::new(f(right)),
            },
            Action::Interleave(a, b) => Action::Interleave(Box::new(f(a)), Box::new(f(b))),
            Action::Hide(a, cs) => Action::Hide(Box::new(f(a)), cs.clone()),
            Action::Mu(x, a) => Action::Mu(x.clone(), Box::new(f(a))),
            Action::EndBy(a, t) => Action::EndBy(Box::new(f(a)), t.clone()),
            Action::StartBy(a, t) => Action::StartBy(Box::new(f(a)), t.clone()),
            Action::Interrupt { left, trigger, right } => Action::Interrupt {
                left: Box::new(f(left)),
                trigger: trigger.clone(),
                right: Box::new(f(right)),
            },
            Action::VarBlock(d, a) => Action::VarBlock(d.clone(), Box::new(f(a))),
            Action::Guarded(alts) => Action::Guarded(alts.iter().map(|(g, a)| (g.clone(), f(a))).collect()),
            leaf => leaf.clone(),
        }
    }

    /// Rename free expression names (not channels, not bound names).
    pub fn rename_names(&self, f: &dyn Fn(&str) -> Option<String>) -> Action {
        let shallow = match self {
            Action::Prefix(c, k) => Action::Prefix(rename_comm(c, f), k.clone()),
            Action::Par { left, ns1, cs, ns2, right } => Action::Par {
                left: left.clone(),
                ns1: ns1.clone(),
                cs: rename_cs(cs, f),
                ns2: ns2.clone(),
                right: right.clone(),
            },
            Action::Hide(a, cs) => Action::Hide(a.clone(), rename_cs(cs, f)),
            Action::Wait(t) => Action::Wait(t.rename(f)),
            Action::EndBy(a, t) => Action::EndBy(a.clone(), t.rename(f)),
            Action::StartBy(a, t) => Action::StartBy(a.clone(), t.rename(f)),
            Action::Interrupt { left, trigger, right } => Action::Interrupt {
                left: left.clone(),
                trigger: rename_comm(trigger, f),
                right: right.clone(),
            },
            Action::Assign { this, var, value } => Action::Assign { this: *this, var: var.clone(), value: value.rename(f) },
            Action::Guarded(alts) => Action::Guarded(alts.iter().map(|(g, a)| (g.rename(f), a.clone())).collect()),
            other => other.clone(),
        };
        shallow.map_children(&mut |c| c.rename_names(f))
    }
}

fn rename_comm(c: &Comm, f: &dyn Fn(&str) -> Option<String>) -> Comm {
    Comm {
        chan: c.chan.clone(),
        items: c
            .items
            .iter()
            .map(|i| match i {
                CommItem::Out(e) => CommItem::Out(e.rename(f)),
                CommItem::Dot(e) => CommItem::Dot(e.rename(f)),
                CommItem::In(x) => CommItem::In(x.clone()),
            })
            .collect(),
    }
}

fn rename_cs(cs: &ChanSet, f: &dyn Fn(&str) -> Option<String>) -> ChanSet {
    cs.iter()
        .map(|i| ChanItem { chan: i.chan.clone(), prefix: i.prefix.iter().map(|e| e.rename(f)).collect() })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasicProcess {
    pub state: Vec<VarDecl>,
    pub actions: Vec<(String, Action)>,
    pub main: Action,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Process {
    Basic(BasicProcess),
    Par(Box<Process>, ChanSet, Box<Process>),
    Interleave(Box<Process>, Box<Process>),
    Hide(Box<Process>, ChanSet),
    /// Reference to a named process, with arguments when parametrised.
    Inst(String, Vec<Expr>),
}

impl Process {
    pub fn par(l: Process, cs: ChanSet, r: Process) -> Process {
        Process::Par(Box::new(l), cs, Box::new(r))
    }

    pub fn interleave(l: Process, r: Process) -> Process {
        Process::Interleave(Box::new(l), Box::new(r))
    }

    pub fn hide(p: Process, cs: ChanSet) -> Process {
        Process::Hide(Box::new(p), cs)
    }

    pub fn inst(name: &str, args: Vec<Expr>) -> Process {
        Process::Inst(name.to_string(), args)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProcessDecl {
    pub name: String,
    pub params: Vec<VarDecl>,
    pub body: Process,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChannelDecl {
    pub names: Vec<String>,
    pub sorts: Vec<Sort>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CircusParagraph {
    Channel(ChannelDecl),
    /// `const N : T` (value bound externally) or `const N = e`.
    Const {
        name: String,
        sort: Sort,
        value: Option<Expr>,
    },
    /// `ids A, B`: members of the identifier sort.
    Ids(Vec<String>),
    Process(ProcessDecl),
}

/// Auxiliary method paragraph `method N = A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Method {
    pub name: String,
    pub body: Action,
}

/// Constructor `initial = x: T @ A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Initial {
    pub params: Vec<VarDecl>,
    pub body: Action,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SafeletDecl {
    pub name: String,
    pub state: Vec<VarDecl>,
    pub methods: Vec<Method>,
    pub initialize: Action,
    /// Assigns the chosen sequencer (or `null`) to `ret`.
    pub get_sequencer: Action,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SequencerDecl {
    pub name: String,
    pub state: Vec<VarDecl>,
    pub initial: Option<Initial>,
    pub methods: Vec<Method>,
    /// Assigns the next mission (or `null`) to `ret`.
    pub get_next_mission: Action,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HandlerRef {
    pub name: String,
    pub args: Vec<Expr>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MissionDecl {
    pub name: String,
    pub state: Vec<VarDecl>,
    pub initial: Option<Initial>,
    pub methods: Vec<Method>,
    pub initialize: Action,
    pub handlers: Vec<HandlerRef>,
    pub cleanup: Action,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodicHandlerDecl {
    pub name: String,
    pub start: TimeExpr,
    pub period: TimeExpr,
    pub state: Vec<VarDecl>,
    pub initial: Option<Initial>,
    pub methods: Vec<Method>,
    pub handle: Action,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AperiodicHandlerDecl {
    pub name: String,
    pub state: Vec<VarDecl>,
    pub initial: Option<Initial>,
    pub methods: Vec<Method>,
    pub handle: Action,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Paragraph {
    Safelet(SafeletDecl),
    Sequencer(SequencerDecl),
    Mission(MissionDecl),
    Periodic(PeriodicHandlerDecl),
    Aperiodic(AperiodicHandlerDecl),
    Circus(CircusParagraph),
}

/// Paragraph kinds that carry an allocation policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ParagraphKind {
    Safelet,
    Sequencer,
    Mission,
    Handler,
}

impl ParagraphKind {
    pub const ALL: [ParagraphKind; 4] =
        [ParagraphKind::Safelet, ParagraphKind::Sequencer, ParagraphKind::Mission, ParagraphKind::Handler];
}

impl Paragraph {
    pub fn name(&self) -> Option<&str> {
        match self {
            Paragraph::Safelet(s) => Some(&s.name),
            Paragraph::Sequencer(s) => Some(&s.name),
            Paragraph::Mission(s) => Some(&s.name),
            Paragraph::Periodic(s) => Some(&s.name),
            Paragraph::Aperiodic(s) => Some(&s.name),
            Paragraph::Circus(CircusParagraph::Process(p)) => Some(&p.name),
            Paragraph::Circus(CircusParagraph::Const { name, .. }) => Some(name),
            Paragraph::Circus(_) => None,
        }
    }

    pub fn kind(&self) -> Option<ParagraphKind> {
        match self {
            Paragraph::Safelet(_) => Some(ParagraphKind::Safelet),
            Paragraph::Sequencer(_) => Some(ParagraphKind::Sequencer),
            Paragraph::Mission(_) => Some(ParagraphKind::Mission),
            Paragraph::Periodic(_) | Paragraph::Aperiodic(_) => Some(ParagraphKind::Handler),
            Paragraph::Circus(_) => None,
        }
    }

    pub fn is_scj(&self) -> bool {
        self.kind().is_some()
    }

    /// Every action body of an SCJ paragraph, labelled by method name.
    pub fn bodies(&self) -> Vec<(&str, &Action)> {
        let mut out: Vec<(&str, &Action)> = Vec::new();
        match self {
            Paragraph::Safelet(s) => {
                out.push(("initialize", &s.initialize));
                out.push(("getSequencer", &s.get_sequencer));
                out.extend(s.methods.iter().map(|m| (m.name.as_str(), &m.body)));
            }
            Paragraph::Sequencer(s) => {
                if let Some(i) = &s.initial {
                    out.push(("initial", &i.body));
                }
                out.push(("getNextMission", &s.get_next_mission));
                out.extend(s.methods.iter().map(|m| (m.name.as_str(), &m.body)));
            }
            Paragraph::Mission(s) => {
                if let Some(i) = &s.initial {
                    out.push(("initial", &i.body));
                }
                out.push(("initialize", &s.initialize));
                out.push(("cleanup", &s.cleanup));
                out.extend(s.methods.iter().map(|m| (m.name.as_str(), &m.body)));
            }
            Paragraph::Periodic(s) => {
                if let Some(i) = &s.initial {
                    out.push(("initial", &i.body));
                }
                out.push(("handleAsyncEvent", &s.handle));
                out.extend(s.methods.iter().map(|m| (m.name.as_str(), &m.body)));
            }
            Paragraph::Aperiodic(s) => {
                if let Some(i) = &s.initial {
                    out.push(("initial", &i.body));
                }
                out.push(("handleAsyncEvent", &s.handle));
                out.extend(s.methods.iter().map(|m| (m.name.as_str(), &m.body)));
            }
            Paragraph::Circus(_) => {}
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Program {
    pub paragraphs: Vec<Paragraph>,
}

impl Program {
    pub fn new(paragraphs: Vec<Paragraph>) -> Self {
        Program { paragraphs }
    }

    pub fn find(&self, name: &str) -> Option<&Paragraph> {
        self.paragraphs.iter().find(|p| p.name() == Some(name))
    }

    pub fn process(&self, name: &str) -> Option<&ProcessDecl> {
        self.paragraphs.iter().find_map(|p| match p {
            Paragraph::Circus(CircusParagraph::Process(d)) if d.name == name => Some(d),
            _ => None,
        })
    }

    pub fn channels(&self) -> impl Iterator<Item = (&str, &[Sort])> {
        self.paragraphs.iter().flat_map(|p| match p {
            Paragraph::Circus(CircusParagraph::Channel(d)) => {
                d.names.iter().map(|n| (n.as_str(), d.sorts.as_slice())).collect::<Vec<_>>()
            }
            _ => Vec::new(),
        })
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.paragraphs.iter().flat_map(|p| match p {
            Paragraph::Circus(CircusParagraph::Ids(v)) => v.iter().map(String::as_str).collect::<Vec<_>>(),
            _ => Vec::new(),
        })
    }
}

// ---------------------------------------------------------------------------
// Structural queries

/// Channels occurring in prefixes, synchronisation and hiding sets, and
/// interrupt triggers.
pub fn used_channels(a: &Action) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_channels(a, &mut out);
    out
}

fn collect_channels(a: &Action, out: &mut BTreeSet<String>) {
    match a {
        Action::Prefix(c, _) => {
            out.insert(c.chan.clone());
        }
        Action::Par { cs, .. } | Action::Hide(_, cs) => out.extend(cs.iter().map(|i| i.chan.clone())),
        Action::Interrupt { trigger, .. } => {
            out.insert(trigger.chan.clone());
        }
        _ => {}
    }
    for c in a.children() {
        collect_channels(c, out);
    }
}

/// Channels used anywhere in a process, including its named actions.
pub fn process_channels(p: &Process) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    match p {
        Process::Basic(b) => {
            for (_, a) in &b.actions {
                out.extend(used_channels(a));
            }
            out.extend(used_channels(&b.main));
        }
        Process::Par(l, cs, r) => {
            out.extend(process_channels(l));
            out.extend(process_channels(r));
            out.extend(cs.iter().map(|i| i.chan.clone()));
        }
        Process::Interleave(l, r) => {
            out.extend(process_channels(l));
            out.extend(process_channels(r));
        }
        Process::Hide(q, cs) => {
            out.extend(process_channels(q));
            out.extend(cs.iter().map(|i| i.chan.clone()));
        }
        Process::Inst(..) => {}
    }
    out
}

/// Variables read or written by `a`, excluding names bound inside it
/// (inputs and `var` blocks) and names listed in `constants`.
pub fn used_variables(a: &Action, constants: &BTreeSet<String>) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_vars(a, &mut Vec::new(), &mut out);
    out.retain(|v| !constants.contains(v));
    out
}

fn note(names: BTreeSet<String>, bound: &[String], out: &mut BTreeSet<String>) {
    out.extend(names.into_iter().filter(|n| !bound.contains(n)));
}

fn comm_names(c: &Comm) -> BTreeSet<String> {
    let mut s = BTreeSet::new();
    for i in &c.items {
        match i {
            CommItem::Out(e) | CommItem::Dot(e) => e.free_names(&mut s),
            CommItem::In(_) => {}
        }
    }
    s
}

fn cs_names(cs: &ChanSet) -> BTreeSet<String> {
    let mut s = BTreeSet::new();
    cs.iter().flat_map(|i| i.prefix.iter()).for_each(|e| e.free_names(&mut s));
    s
}

fn collect_vars(a: &Action, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match a {
        Action::Prefix(c, k) => {
            note(comm_names(c), bound, out);
            let n = bound.len();
            bound.extend(c.inputs().map(str::to_string));
            collect_vars(k, bound, out);
            bound.truncate(n);
        }
        Action::Interrupt { left, trigger, right } => {
            note(comm_names(trigger), bound, out);
            collect_vars(left, bound, out);
            let n = bound.len();
            bound.extend(trigger.inputs().map(str::to_string));
            collect_vars(right, bound, out);
            bound.truncate(n);
        }
        Action::VarBlock(decls, k) => {
            let n = bound.len();
            bound.extend(decls.iter().map(|d| d.name.clone()));
            collect_vars(k, bound, out);
            bound.truncate(n);
        }
        Action::Assign { var, value, .. } => {
            let mut s = BTreeSet::new();
            s.insert(var.clone());
            value.free_names(&mut s);
            note(s, bound, out);
        }
        Action::Wait(t) | Action::EndBy(_, t) | Action::StartBy(_, t) => {
            let mut s = BTreeSet::new();
            t.names(&mut s);
            note(s, bound, out);
            for c in a.children() {
                collect_vars(c, bound, out);
            }
        }
        Action::Guarded(alts) => {
            for (g, k) in alts {
                let mut s = BTreeSet::new();
                g.free_names(&mut s);
                note(s, bound, out);
                collect_vars(k, bound, out);
            }
        }
        Action::Par { left, ns1, cs, ns2, right } => {
            note(cs_names(cs), bound, out);
            note(ns1.iter().chain(ns2).cloned().collect(), bound, out);
            collect_vars(left, bound, out);
            collect_vars(right, bound, out);
        }
        Action::Hide(k, cs) => {
            note(cs_names(cs), bound, out);
            collect_vars(k, bound, out);
        }
        other => {
            for c in other.children() {
                collect_vars(c, bound, out);
            }
        }
    }
}

/// Names referenced by `Call` that are not bound by an enclosing `mu`.
pub fn free_calls(a: &Action) -> BTreeSet<String> {
    fn go(a: &Action, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match a {
            Action::Call(x) if !bound.contains(x) => {
                out.insert(x.clone());
            }
            Action::Mu(x, k) => {
                bound.push(x.clone());
                go(k, bound, out);
                bound.pop();
            }
            other => other.children().into_iter().for_each(|c| go(c, bound, out)),
        }
    }
    let mut out = BTreeSet::new();
    go(a, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("context must contain exactly one placeholder, found {found}")]
pub struct PlaceholderCount {
    pub found: usize,
}

/// Replace the single `Hole` of `context` with `filler`.
pub fn substitute(context: &Action, filler: &Action) -> Result<Action, PlaceholderCount> {
    let found = context.hole_count();
    if found != 1 {
        return Err(PlaceholderCount { found });
    }
    Ok(fill(context, filler))
}

fn fill(a: &Action, filler: &Action) -> Action {
    match a {
        Action::Hole => filler.clone(),
        other => other.map_children(&mut |c| fill(c, filler)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn identifier_validation() {
        assert!(Identifier::new("PEHFW", IdentKind::Process).is_ok());
        assert!(Identifier::new("done_handler", IdentKind::Channel).is_ok());
        assert!(Identifier::new("_x", IdentKind::Variable).is_err());
        assert!(Identifier::new("9a", IdentKind::Variable).is_err());
        assert!(Identifier::new("", IdentKind::Variable).is_err());
        let id = Identifier::new("P", IdentKind::Constant).unwrap();
        assert_eq!(id.kind(), IdentKind::Constant);
    }

    #[test]
    fn channels_of_skip_and_prefix() {
        assert!(used_channels(&Action::Skip).is_empty());
        assert_eq!(used_channels(&Action::event("release", Action::Skip)), set(&["release"]));
    }

    #[test]
    fn variables_of_assignment_and_wait() {
        let a = Action::assign("start", Expr::name("s"));
        assert_eq!(used_variables(&a, &BTreeSet::new()), set(&["start", "s"]));
        let w = Action::Wait(TimeExpr::name("P"));
        assert!(used_variables(&w, &set(&["P"])).is_empty());
    }

    #[test]
    fn inputs_are_local() {
        let a = Action::prefix(
            Comm::new("c", vec![CommItem::In("x".into())]),
            Action::assign("y", Expr::name("x")),
        );
        assert_eq!(used_variables(&a, &BTreeSet::new()), set(&["y"]));
    }

    #[test]
    fn substitute_cases() {
        assert_eq!(substitute(&Action::Hole, &Action::Skip).unwrap(), Action::Skip);
        let ctx = Action::event("c", Action::Hole);
        let got = substitute(&ctx, &Action::event("d", Action::Skip)).unwrap();
        assert_eq!(got, Action::event("c", Action::event("d", Action::Skip)));
        assert_eq!(substitute(&Action::Skip, &Action::Skip), Err(PlaceholderCount { found: 0 }));
        let two = Action::seq(Action::Hole, Action::Hole);
        assert_eq!(substitute(&two, &Action::Skip), Err(PlaceholderCount { found: 2 }));
    }

    #[test]
    fn free_calls_respects_mu() {
        let a = Action::mu("X", Action::event("c", Action::seq(Action::call("X"), Action::call("Execute"))));
        assert_eq!(free_calls(&a), set(&["Execute"]));
    }
}
