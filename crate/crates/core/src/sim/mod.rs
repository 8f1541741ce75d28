//! Discrete-time operational semantics of the Circus Time subset.

mod explore;
mod model;
pub mod term;
pub mod value;

pub use explore::{Config, Label, Policy, RunResult, Sim, TraceSet, Verdict, STATE_CAP};
pub use model::{Domains, Model};
pub use value::{Event, Value};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("unknown process `{0}`")]
    UnknownProcess(String),
    #[error("process `{0}` takes parameters and cannot be simulated directly")]
    Parametrised(String),
    #[error("constant `{0}` has no value; bind it with --const")]
    Unbound(String),
    #[error("`{0}` is not a declared constant")]
    UnknownConstant(String),
    #[error("evaluation failed: {0}")]
    Eval(String),
    #[error("event `{0}` is not enabled")]
    IllegalStep(String),
    #[error("state space exceeded {} states", STATE_CAP)]
    StateCap,
}
