//! Active learning of callback typestates for asynchronous components.
//!
//! A callback typestate is an [`interface::InterfaceAutomaton`]. Its
//! [`closure`] is a Mealy machine that L* can learn through a membership
//! oracle driving the component; [`convert`] maps the result back.

pub mod alphabet;
pub mod closure;
pub mod convert;
pub mod dot;
pub mod equivalence;
pub mod error;
pub mod interface;
pub mod learner;
pub mod mealy;
pub mod minimize;
pub mod models;
pub mod oracle;
pub mod pipeline;
pub mod purpose;
pub mod random;
pub mod spec;
pub mod sul;
pub mod sweep;

pub use error::{Error, Result};
