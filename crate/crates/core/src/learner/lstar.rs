use super::{analyze_cex, ObservationTable};
use crate::alphabet::Word;
use crate::equivalence::{EqOutcome, EquivalenceOracle, Split};
use crate::error::{Error, Result};
use crate::mealy::MealyMachine;
use crate::oracle::MembershipOracle;

#[derive(Clone, Debug)]
pub struct LStarConfig {
    /// Abort once this many equivalence queries returned a counterexample.
    pub eq_cap: usize,
    /// Fill rows past `err`/`oop` without asking the oracle.
    pub suppress_absorbing: bool,
}

impl Default for LStarConfig {
    fn default() -> Self {
        LStarConfig {
            eq_cap: 64,
            suppress_absorbing: true,
        }
    }
}

/// One equivalence query as seen from the cache counters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqRecord {
    pub hypothesis_states: usize,
    pub counterexample: Option<Word>,
    pub asked: u64,
    pub executed: u64,
    /// Whether the oracle's suffix was used directly instead of analysis.
    pub used_split: bool,
}

#[derive(Clone, Debug, Default)]
pub struct LearnStats {
    /// Membership queries issued by the learner itself (table fills,
    /// suffix confirmation, counterexample analysis).
    pub learner_queries: u64,
    pub eqs: Vec<EqRecord>,
    pub max_cex_len: usize,
}

impl LearnStats {
    pub fn eq_count(&self) -> usize {
        self.eqs.len()
    }
}

#[derive(Clone, Debug)]
pub struct LearnResult {
    pub machine: MealyMachine,
    pub stats: LearnStats,
    pub table: ObservationTable,
}

/// L* for Mealy machines.
pub fn lstar(
    mq: &mut dyn MembershipOracle,
    eq: &mut dyn EquivalenceOracle,
    config: &LStarConfig,
) -> Result<LearnResult> {
    let alphabet = mq.alphabet().clone();
    let mut table = ObservationTable::new(alphabet, config.suppress_absorbing);
    let mut stats = LearnStats::default();
    let mut extra_queries = 0u64;
    table.fill(mq)?;
    loop {
        while let Some(w) = table.check_closed() {
            table.add_prefix(w);
            table.fill(mq)?;
        }
        let h = table.build_mm()?;
        let before = mq.counters();
        let outcome = eq.find_counterexample(&h, mq)?;
        let delta = mq.counters() - before;
        let mut record = EqRecord {
            hypothesis_states: h.state_count(),
            counterexample: None,
            asked: delta.asked,
            executed: delta.executed,
            used_split: false,
        };
        let (cex, split) = match outcome {
            EqOutcome::Correct => {
                stats.eqs.push(record);
                stats.learner_queries = table.queries() + extra_queries;
                return Ok(LearnResult {
                    machine: h,
                    stats,
                    table,
                });
            }
            EqOutcome::Counterexample { word, split } => (word, split),
        };
        stats.max_cex_len = stats.max_cex_len.max(cex.len());
        record.counterexample = Some(cex.clone());
        let states = h.state_count();
        let suffix = match split {
            Some(s) if confirm_split(&table, &s, mq, &mut extra_queries)? => {
                record.used_split = true;
                s.suffix
            }
            _ => {
                let (suffix, q) = analyze_cex(&h, table.prefixes(), &cex, mq)?;
                extra_queries += q;
                suffix
            }
        };
        stats.eqs.push(record);
        if stats.eqs.len() >= config.eq_cap {
            stats.learner_queries = table.queries() + extra_queries;
            return Err(Error::EqCapExceeded {
                cap: config.eq_cap,
                states,
            });
        }
        table.add_suffix(suffix);
        table.fill(mq)?;
        debug_assert!(table.check_closed().is_some(), "counterexample made no progress");
    }
}

/// The oracle's suffix separates two hypothesis-level words; it is only
/// useful if it also separates the table prefixes that represent them.
fn confirm_split(
    table: &ObservationTable,
    split: &Split,
    mq: &mut dyn MembershipOracle,
    queries: &mut u64,
) -> Result<bool> {
    if table.suffixes().contains(&split.suffix) {
        return Ok(false);
    }
    let prefixes = table.prefixes();
    let (Some(p), Some(t)) = (prefixes.get(split.state), prefixes.get(split.target)) else {
        return Ok(false);
    };
    let mut left = p.clone();
    left.push(split.input);
    left.extend_from_slice(&split.suffix);
    let mut right = t.clone();
    right.extend_from_slice(&split.suffix);
    *queries += 2;
    let l = mq.query(&left)?;
    let r = mq.query(&right)?;
    let n = split.suffix.len();
    Ok(l[l.len() - n..] != r[r.len() - n..])
}
