//! The system under learning: a discrete-time simulator of asynchronous
//! components, the query cache with non-determinism detection, alphabet
//! refinement, and the unbounded request-response fixture.

mod cache;
mod counter;
mod refinement;
mod simulator;

pub use cache::{NonDeterminismReport, QueryCache};
pub use counter::{CounterReference, CounterSul};
pub use refinement::{apply_refinement, RefinementSpec};
pub use simulator::{AsyncModel, NondetBlock, Simulator, Timing};

/// Outcome of invoking a callin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Invocation {
    Accepted,
    /// The callin is not enabled; a real component would throw.
    Rejected,
}

/// A black-box asynchronous component driven one call at a time.
///
/// Callins and callbacks are addressed by their index in
/// [`callins`](Self::callins) and [`callbacks`](Self::callbacks).
pub trait AsyncInterface {
    fn callins(&self) -> &[String];
    fn callbacks(&self) -> &[String];

    /// Fresh, isolated instance in the initial state.
    fn reset(&mut self);

    fn invoke(&mut self, callin: usize) -> Invocation;

    /// Let time pass for one quiescence window; returns the callback
    /// delivered in that window, if any.
    fn wait(&mut self) -> Option<usize>;
}
