//! L* for Mealy machines.

mod cex;
mod lstar;
mod table;

pub use cex::analyze_cex;
pub use lstar::{lstar, EqRecord, LStarConfig, LearnResult, LearnStats};
pub use table::ObservationTable;

/// The membership-query budget of L* given an equivalence oracle:
/// `|Σ|²·n + |Σ|·n²·m`, saturating.
pub fn query_budget(inputs: usize, n: usize, m: usize) -> u128 {
    let (s, n, m) = (inputs as u128, n as u128, m.max(1) as u128);
    s.saturating_mul(s)
        .saturating_mul(n)
        .saturating_add(s.saturating_mul(n).saturating_mul(n).saturating_mul(m))
}
