//! Compilation of a Circus Time program into an index-linked form the
//! stepper can walk without re-resolving names.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use crate::ast::*;

use super::value::{Pat, Store, Value};
use super::SimError;

pub type NodeId = u32;

#[derive(Debug, Clone)]
pub enum Node {
    Skip,
    Stop,
    Prefix(Comm, NodeId),
    Ext(NodeId, NodeId),
    Int(NodeId, NodeId),
    Seq(NodeId, NodeId),
    Par { l: NodeId, r: NodeId, ns1: Rc<[String]>, cs: ChanSet, ns2: Rc<[String]> },
    Hide(NodeId, ChanSet),
    /// Recursion entry and named-action alias both just start their target.
    Jump(NodeId),
    Wait(TimeExpr),
    EndBy(NodeId, TimeExpr, Rc<str>),
    StartBy(NodeId, TimeExpr, Rc<str>),
    Interrupt { l: NodeId, trigger: Comm, r: NodeId },
    Assign(String, Expr),
    Block(Vec<VarDecl>, NodeId),
    Guarded(Vec<(Expr, NodeId)>),
}

#[derive(Debug, Clone)]
pub enum PNode {
    Basic { state: Vec<VarDecl>, main: NodeId },
    Par(Box<PNode>, ChanSet, Box<PNode>),
    Interleave(Box<PNode>, Box<PNode>),
    Hide(Box<PNode>, ChanSet),
    Inst(String, Vec<Expr>),
}

#[derive(Debug, Clone)]
struct ProcDef {
    params: Vec<VarDecl>,
    body: PNode,
}

type SetPredicate = fn(&Value) -> bool;

fn last_three_equal(v: &Value) -> bool {
    match v {
        Value::Seq(xs) if xs.len() >= 3 => {
            let n = xs.len();
            xs[n - 1] == xs[n - 2] && xs[n - 2] == xs[n - 3]
        }
        _ => false,
    }
}

/// Knobs for finite instantiation of inputs left open by the environment.
#[derive(Debug, Clone)]
pub struct Domains {
    pub nat: Vec<u64>,
    pub seq: Vec<Vec<u64>>,
}

impl Default for Domains {
    fn default() -> Self {
        Domains { nat: vec![0, 1], seq: vec![Vec::new()] }
    }
}

/// A compiled program ready for simulation.
#[derive(Debug)]
pub struct Model {
    pub(crate) nodes: Vec<Node>,
    procs: HashMap<String, ProcDef>,
    consts: BTreeMap<String, Value>,
    ids: BTreeSet<String>,
    channels: HashMap<String, Vec<Sort>>,
    sets: HashMap<String, SetPredicate>,
    pub domains: Domains,
}

impl Model {
    /// Compile every process of `program`. `bindings` supplies values for
    /// constants declared without one; unknown names are rejected.
    pub fn new(program: &Program, bindings: &BTreeMap<String, u64>) -> Result<Model, SimError> {
        let mut m = Model {
            nodes: Vec::new(),
            procs: HashMap::new(),
            consts: BTreeMap::new(),
            ids: program.ids().map(str::to_string).collect(),
            channels: program.channels().map(|(n, s)| (n.to_string(), s.to_vec())).collect(),
            sets: HashMap::new(),
            domains: Domains::default(),
        };
        m.sets.insert("theSame".into(), last_three_equal);
        m.sets.insert("three_0".into(), last_three_equal);

        let declared: BTreeSet<&str> = program
            .paragraphs
            .iter()
            .filter_map(|p| match p {
                Paragraph::Circus(CircusParagraph::Const { name, .. }) => Some(name.as_str()),
                _ => None,
            })
            .collect();
        for k in bindings.keys() {
            if !declared.contains(k.as_str()) {
                return Err(SimError::UnknownConstant(k.clone()));
            }
        }
        let empty: Store = Rc::new(BTreeMap::new());
        for p in &program.paragraphs {
            if let Paragraph::Circus(CircusParagraph::Const { name, value, .. }) = p {
                let v = match (bindings.get(name), value) {
                    (Some(b), _) => Value::Nat(*b),
                    (None, Some(e)) => m.eval(e, &empty).map_err(SimError::Eval)?,
                    (None, None) => return Err(SimError::Unbound(name.clone())),
                };
                m.consts.insert(name.clone(), v);
            }
        }
        for p in &program.paragraphs {
            if let Paragraph::Circus(CircusParagraph::Process(d)) = p {
                let body = m.compile_process(&d.body, &d.name);
                m.procs.insert(d.name.clone(), ProcDef { params: d.params.clone(), body });
            }
        }
        Ok(m)
    }

    /// Compile a standalone process (not declared in the program) and
    /// return it for use as a simulation root.
    pub fn add_process(&mut self, name: &str, params: Vec<VarDecl>, p: &Process) {
        let body = self.compile_process(p, name);
        self.procs.insert(name.to_string(), ProcDef { params, body });
    }

    pub fn has_process(&self, name: &str) -> bool {
        self.procs.contains_key(name)
    }

    pub fn with_set(mut self, name: &str, pred: SetPredicate) -> Self {
        self.sets.insert(name.to_string(), pred);
        self
    }

    pub(crate) fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    fn push(&mut self, n: Node) -> NodeId {
        self.nodes.push(n);
        (self.nodes.len() - 1) as NodeId
    }

    fn compile_process(&mut self, p: &Process, owner: &str) -> PNode {
        match p {
            Process::Basic(b) => {
                // reserve a slot per named action so bodies can refer to each other
                let mut scope: Vec<(String, NodeId)> = Vec::new();
                for (n, _) in &b.actions {
                    let slot = self.push(Node::Stop);
                    scope.push((n.clone(), slot));
                }
                let comp = owner.to_string();
                for (i, (_, a)) in b.actions.iter().enumerate() {
                    let body = self.compile(a, &mut scope.clone(), &comp);
                    self.nodes[scope[i].1 as usize] = Node::Jump(body);
                }
                let main = self.compile(&b.main, &mut scope, &comp);
                PNode::Basic { state: b.state.clone(), main }
            }
            Process::Par(l, cs, r) => PNode::Par(
                Box::new(self.compile_process(l, owner)),
                cs.clone(),
                Box::new(self.compile_process(r, owner)),
            ),
            Process::Interleave(l, r) => {
                PNode::Interleave(Box::new(self.compile_process(l, owner)), Box::new(self.compile_process(r, owner)))
            }
            Process::Hide(q, cs) => PNode::Hide(Box::new(self.compile_process(q, owner)), cs.clone()),
            Process::Inst(n, args) => PNode::Inst(n.clone(), args.clone()),
        }
    }

    fn compile(&mut self, a: &Action, scope: &mut Vec<(String, NodeId)>, comp: &str) -> NodeId {
        let n = match a {
            Action::Skip => Node::Skip,
            Action::Stop | Action::Hole => Node::Stop,
            Action::Prefix(c, k) => {
                let k = self.compile(k, scope, comp);
                Node::Prefix(c.clone(), k)
            }
            Action::ExtChoice(l, r) => Node::Ext(self.compile(l, scope, comp), self.compile(r, scope, comp)),
            Action::IntChoice(l, r) => Node::Int(self.compile(l, scope, comp), self.compile(r, scope, comp)),
            Action::Seq(l, r) => Node::Seq(self.compile(l, scope, comp), self.compile(r, scope, comp)),
            Action::Par { left, ns1, cs, ns2, right } => Node::Par {
                l: self.compile(left, scope, comp),
                r: self.compile(right, scope, comp),
                ns1: ns1.clone().into(),
                cs: cs.clone(),
                ns2: ns2.clone().into(),
            },
            Action::Interleave(l, r) => Node::Par {
                l: self.compile(l, scope, comp),
                r: self.compile(r, scope, comp),
                ns1: Rc::from(Vec::new()),
                cs: Vec::new(),
                ns2: Rc::from(Vec::new()),
            },
            Action::Hide(k, cs) => Node::Hide(self.compile(k, scope, comp), cs.clone()),
            Action::Mu(x, body) => {
                let slot = self.push(Node::Stop);
                scope.push((x.clone(), slot));
                let b = self.compile(body, scope, comp);
                scope.pop();
                self.nodes[slot as usize] = Node::Jump(b);
                return slot;
            }
            Action::Call(x) => match scope.iter().rev().find(|(n, _)| n == x) {
                Some((_, id)) => Node::Jump(*id),
                // unresolved references behave as Stop
                None => Node::Stop,
            },
            Action::Wait(t) => Node::Wait(t.clone()),
            Action::EndBy(k, t) => Node::EndBy(self.compile(k, scope, comp), t.clone(), Rc::from(comp)),
            Action::StartBy(k, t) => Node::StartBy(self.compile(k, scope, comp), t.clone(), Rc::from(comp)),
            Action::Interrupt { left, trigger, right } => Node::Interrupt {
                l: self.compile(left, scope, comp),
                trigger: trigger.clone(),
                r: self.compile(right, scope, comp),
            },
            Action::Assign { var, value, .. } => Node::Assign(var.clone(), value.clone()),
            Action::VarBlock(ds, k) => Node::Block(ds.clone(), self.compile(k, scope, comp)),
            Action::Guarded(alts) => {
                Node::Guarded(alts.iter().map(|(g, k)| (g.clone(), self.compile(k, scope, comp))).collect())
            }
        };
        self.push(n)
    }

    pub(crate) fn proc_def(&self, name: &str) -> Option<(&[VarDecl], &PNode)> {
        self.procs.get(name).map(|d| (d.params.as_slice(), &d.body))
    }

    // -- evaluation -------------------------------------------------------

    pub fn lookup(&self, name: &str, store: &Store) -> Option<Value> {
        if let Some(v) = store.get(name) {
            return Some(v.clone());
        }
        if let Some(v) = self.consts.get(name) {
            return Some(v.clone());
        }
        if self.ids.contains(name) {
            return Some(Value::Id(name.to_string()));
        }
        None
    }

    pub fn eval(&self, e: &Expr, store: &Store) -> Result<Value, String> {
        Ok(match e {
            Expr::Nat(n) => Value::Nat(*n),
            Expr::Bool(b) => Value::Bool(*b),
            Expr::Null => Value::Null,
            Expr::Name(n) | Expr::Field(n) => self.lookup(n, store).ok_or_else(|| format!("unbound name `{n}`"))?,
            Expr::SeqLit(xs) => Value::Seq(xs.iter().map(|x| self.eval(x, store)?.as_nat()).collect::<Result<_, _>>()?),
            Expr::Not(x) => Value::Bool(!self.eval(x, store)?.as_bool()?),
            Expr::New { class, .. } => Value::Obj(class.clone()),
            Expr::Bin(op, l, r) => {
                if matches!(op, BinOp::In | BinOp::NotIn) {
                    let Expr::Name(set) = &**r else { return Err("membership needs a named set".into()) };
                    let pred = self.sets.get(set).ok_or_else(|| format!("unknown set `{set}`"))?;
                    let v = self.eval(l, store)?;
                    return Ok(Value::Bool(pred(&v) == (*op == BinOp::In)));
                }
                let a = self.eval(l, store)?;
                let b = self.eval(r, store)?;
                match op {
                    BinOp::Add => Value::Nat(a.as_nat()?.saturating_add(b.as_nat()?)),
                    BinOp::Sub => Value::Nat(a.as_nat()?.saturating_sub(b.as_nat()?)),
                    BinOp::Concat => match (a, b) {
                        (Value::Seq(mut x), Value::Seq(y)) => {
                            x.extend(y);
                            Value::Seq(x)
                        }
                        (x, y) => return Err(format!("cannot concatenate {x} and {y}")),
                    },
                    BinOp::Eq => Value::Bool(a == b),
                    BinOp::Neq => Value::Bool(a != b),
                    BinOp::Lt => Value::Bool(a.as_nat()? < b.as_nat()?),
                    BinOp::Le => Value::Bool(a.as_nat()? <= b.as_nat()?),
                    BinOp::And => Value::Bool(a.as_bool()? && b.as_bool()?),
                    BinOp::Or => Value::Bool(a.as_bool()? || b.as_bool()?),
                    BinOp::In | BinOp::NotIn => unreachable!(),
                }
            }
        })
    }

    pub fn eval_time(&self, t: &TimeExpr, store: &Store) -> Result<(u64, u64), String> {
        let look = |n: &str| self.lookup(n, store).and_then(|v| v.as_nat().ok());
        t.eval_bounds(&look).map_err(|n| format!("unbound time name `{n}`"))
    }

    pub fn eval_chanset(&self, cs: &ChanSet, store: &Store) -> Result<Rc<[Pat]>, String> {
        cs.iter()
            .map(|i| {
                Ok(Pat {
                    chan: i.chan.clone(),
                    prefix: i.prefix.iter().map(|e| self.eval(e, store)).collect::<Result<_, String>>()?,
                })
            })
            .collect::<Result<Vec<_>, String>>()
            .map(Rc::from)
    }

    /// Candidate values for an open input position.
    pub fn domain(&self, chan: &str, pos: usize) -> Vec<Value> {
        let sort = self.channels.get(chan).and_then(|s| s.get(pos)).cloned().unwrap_or(Sort::Nat);
        match sort {
            Sort::Nat | Sort::Unit => self.domains.nat.iter().map(|n| Value::Nat(*n)).collect(),
            Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Sort::Id => {
                let mut v: Vec<Value> = self.ids.iter().map(|s| Value::Id(s.clone())).collect();
                v.push(Value::Null);
                v
            }
            Sort::SeqNat => self.domains.seq.iter().map(|s| Value::Seq(s.clone())).collect(),
            Sort::Named(_) => vec![Value::Null],
        }
    }

    pub fn arity(&self, chan: &str) -> Option<usize> {
        self.channels.get(chan).map(Vec::len)
    }
}
