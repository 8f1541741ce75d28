use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::ast::Sort;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Value {
    Nat(u64),
    Bool(bool),
    /// A member of the identifier sort.
    Id(String),
    Null,
    Seq(Vec<u64>),
    /// Reference to an allocated object of the named class.
    Obj(String),
}

impl Value {
    pub fn default_for(sort: &Sort) -> Value {
        match sort {
            Sort::Nat | Sort::Unit => Value::Nat(0),
            Sort::Bool => Value::Bool(false),
            Sort::Id | Sort::Named(_) => Value::Null,
            Sort::SeqNat => Value::Seq(Vec::new()),
        }
    }

    pub fn as_nat(&self) -> Result<u64, String> {
        match self {
            Value::Nat(n) => Ok(*n),
            v => Err(format!("expected a natural, found {v}")),
        }
    }

    pub fn as_bool(&self) -> Result<bool, String> {
        match self {
            Value::Bool(b) => Ok(*b),
            v => Err(format!("expected a boolean, found {v}")),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Nat(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Id(s) => f.write_str(s),
            Value::Null => f.write_str("null"),
            Value::Seq(xs) => {
                let items: Vec<String> = xs.iter().map(u64::to_string).collect();
                write!(f, "<{}>", items.join(","))
            }
            Value::Obj(c) => write!(f, "@{c}"),
        }
    }
}

/// Variable store of one sequential thread of control.
pub type Store = Rc<BTreeMap<String, Value>>;

pub fn store_with(store: &Store, name: &str, v: Value) -> Store {
    let mut m = (**store).clone();
    m.insert(name.to_string(), v);
    Rc::new(m)
}

/// A communication on a channel with concrete payload.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Event {
    pub chan: String,
    pub vals: Vec<Value>,
}

impl Event {
    pub fn new(chan: impl Into<String>, vals: Vec<Value>) -> Self {
        Event { chan: chan.into(), vals }
    }

    pub fn bare(chan: impl Into<String>) -> Self {
        Event::new(chan, Vec::new())
    }
}

/// `chan.v1.v2`
impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.chan)?;
        for v in &self.vals {
            write!(f, ".{v}")?;
        }
        Ok(())
    }
}

/// Offered communication; `None` marks a position still open for input.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Offer {
    pub chan: String,
    pub vals: Vec<Option<Value>>,
}

impl Offer {
    pub fn matches(&self, e: &Event) -> bool {
        self.chan == e.chan
            && self.vals.len() == e.vals.len()
            && self.vals.iter().zip(&e.vals).all(|(p, v)| p.as_ref().is_none_or(|p| p == v))
    }

    pub fn unify(&self, other: &Offer) -> Option<Offer> {
        if self.chan != other.chan || self.vals.len() != other.vals.len() {
            return None;
        }
        let mut vals = Vec::with_capacity(self.vals.len());
        for (a, b) in self.vals.iter().zip(&other.vals) {
            vals.push(match (a, b) {
                (Some(x), Some(y)) if x != y => return None,
                (Some(x), _) | (None, Some(x)) => Some(x.clone()),
                (None, None) => None,
            });
        }
        Some(Offer { chan: self.chan.clone(), vals })
    }
}

/// Evaluated channel-set member.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pat {
    pub chan: String,
    pub prefix: Vec<Value>,
}

impl Pat {
    pub fn matches(&self, e: &Event) -> bool {
        self.chan == e.chan && e.vals.len() >= self.prefix.len() && e.vals.iter().zip(&self.prefix).all(|(a, b)| a == b)
    }
}

pub fn in_set(pats: &[Pat], e: &Event) -> bool {
    pats.iter().any(|p| p.matches(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unify_offers() {
        let a = Offer { chan: "c".into(), vals: vec![Some(Value::Nat(1)), None] };
        let b = Offer { chan: "c".into(), vals: vec![None, Some(Value::Bool(true))] };
        let u = a.unify(&b).unwrap();
        assert_eq!(u.vals, vec![Some(Value::Nat(1)), Some(Value::Bool(true))]);
        let c = Offer { chan: "c".into(), vals: vec![Some(Value::Nat(2)), None] };
        assert!(a.unify(&c).is_none());
    }

    #[test]
    fn event_display() {
        let e = Event::new("start_peh", vec![Value::Id("M".into()), Value::Nat(2), Value::Seq(vec![1, 2])]);
        assert_eq!(e.to_string(), "start_peh.M.2.<1,2>");
    }
}
