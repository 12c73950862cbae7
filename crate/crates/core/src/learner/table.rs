use std::collections::HashMap;
use std::sync::Arc;

use crate::alphabet::{Alphabet, Output, Word};
use crate::error::{Error, Result};
use crate::mealy::MealyMachine;
use crate::oracle::MembershipOracle;

type Row = Vec<Vec<Output>>;

/// L* observation table: prefixes `S_Q`, suffixes `E`, and for every word of
/// `S_Q ∪ S_Q·Σ` one output word per suffix.
#[derive(Clone, Debug)]
pub struct ObservationTable {
    alphabet: Arc<Alphabet>,
    prefixes: Vec<Word>,
    suffixes: Vec<Word>,
    rows: HashMap<Word, Row>,
    /// Absorbing output emitted at the end of a row's word, if any.
    absorbed: HashMap<Word, Output>,
    suppress_absorbing: bool,
    queries: u64,
}

impl ObservationTable {
    /// `S_Q = {ε}`, `E` = every single input.
    pub fn new(alphabet: Arc<Alphabet>, suppress_absorbing: bool) -> Self {
        let suffixes = alphabet.input_ids().map(|i| vec![i]).collect();
        ObservationTable {
            alphabet,
            prefixes: vec![Vec::new()],
            suffixes,
            rows: HashMap::new(),
            absorbed: HashMap::new(),
            suppress_absorbing,
            queries: 0,
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn prefixes(&self) -> &[Word] {
        &self.prefixes
    }

    pub fn suffixes(&self) -> &[Word] {
        &self.suffixes
    }

    /// Membership queries issued while filling.
    pub fn queries(&self) -> u64 {
        self.queries
    }

    /// Words of `S_Q ∪ S_Q·Σ` in row order.
    pub fn domain(&self) -> Vec<Word> {
        let mut out: Vec<Word> = self.prefixes.clone();
        for s in &self.prefixes {
            for i in self.alphabet.input_ids() {
                let mut w = s.clone();
                w.push(i);
                if !out.contains(&w) {
                    out.push(w);
                }
            }
        }
        out
    }

    pub fn row(&self, w: &[crate::alphabet::Input]) -> Option<&Row> {
        self.rows.get(w)
    }

    pub fn cell(&self, w: &[crate::alphabet::Input], e: usize) -> Option<&[Output]> {
        self.rows.get(w).and_then(|r| r.get(e)).map(Vec::as_slice)
    }

    pub fn cell_count(&self) -> usize {
        self.rows.values().map(Vec::len).sum()
    }

    pub fn add_prefix(&mut self, w: Word) {
        if !self.prefixes.contains(&w) {
            self.prefixes.push(w);
        }
    }

    /// Returns `false` if the suffix was already present.
    pub fn add_suffix(&mut self, e: Word) -> bool {
        if e.is_empty() || self.suffixes.contains(&e) {
            return false;
        }
        self.suffixes.push(e);
        true
    }

    /// Populate every missing cell; filled cells are never asked again.
    pub fn fill(&mut self, oracle: &mut dyn MembershipOracle) -> Result<()> {
        for w in self.domain() {
            let absorbed = self.absorbed_output(&w);
            let have = self.rows.get(&w).map_or(0, Vec::len);
            for e in have..self.suffixes.len() {
                let suffix = &self.suffixes[e];
                let cell = match absorbed {
                    Some(o) => vec![o; suffix.len()],
                    None => {
                        let mut q = w.clone();
                        q.extend_from_slice(suffix);
                        self.queries += 1;
                        let out = oracle.query(&q)?;
                        out[w.len()..].to_vec()
                    }
                };
                self.rows.entry(w.clone()).or_default().push(cell);
            }
            self.note_absorbed(&w);
        }
        Ok(())
    }

    /// Whether the row of `w` is known to be past an absorbing output.
    fn absorbed_output(&self, w: &[crate::alphabet::Input]) -> Option<Output> {
        if !self.suppress_absorbing || w.is_empty() {
            return None;
        }
        self.absorbed.get(w).copied()
    }

    /// Record, for each one-letter extension of `w`, whether it ends in an
    /// absorbing output. The first `|Σ|` suffixes are the single inputs.
    fn note_absorbed(&mut self, w: &Word) {
        let inherited = self.absorbed.get(w).copied();
        for i in self.alphabet.input_ids() {
            let o = match inherited {
                Some(o) => o,
                None => self.rows[w][i.index()][0],
            };
            if self.alphabet.is_absorbing(o) {
                let mut ext = w.clone();
                ext.push(i);
                self.absorbed.insert(ext, o);
            }
        }
    }

    /// First extension `s·i` (row order, then input order) whose row equals
    /// no prefix row.
    pub fn check_closed(&self) -> Option<Word> {
        for s in &self.prefixes {
            for i in self.alphabet.input_ids() {
                let mut w = s.clone();
                w.push(i);
                let row = &self.rows[&w];
                if !self.prefixes.iter().any(|p| &self.rows[p] == row) {
                    return Some(w);
                }
            }
        }
        None
    }

    /// Index of the first prefix whose row equals the row of `w`.
    fn representative(&self, w: &[crate::alphabet::Input]) -> Option<usize> {
        let row = self.rows.get(w)?;
        self.prefixes.iter().position(|p| &self.rows[p] == row)
    }

    /// Hypothesis whose state `k` is the row of the `k`-th prefix.
    pub fn build_mm(&self) -> Result<MealyMachine> {
        if let Some(w) = self.check_closed() {
            return Err(Error::Model(format!(
                "observation table is not closed at {}",
                self.alphabet.format_word(&w)
            )));
        }
        let n = self.prefixes.len();
        let machine = MealyMachine::from_fn(self.alphabet.clone(), n, 0, |q, i| {
            let mut w = self.prefixes[q].clone();
            w.push(i);
            let target = self.representative(&w).expect("closed table");
            (target, self.rows[&self.prefixes[q]][i.index()][0])
        });
        Ok(machine)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::closure;
    use crate::models;
    use crate::oracle::MealyOracle;
    use crate::sul::QueryCache;

    #[test]
    fn fresh_fill_counts_cells() {
        let a = Arc::new(Alphabet::plain(["a"], ["x", "y"]).unwrap());
        let m = MealyMachine::from_fn(a.clone(), 1, 0, |_, _| (0, Output(0)));
        let mut oracle = MealyOracle::new(m);
        let mut t = ObservationTable::new(a, true);
        t.fill(&mut oracle).unwrap();
        // rows ε and a, one suffix each
        assert_eq!(t.cell_count(), 2);
        assert_eq!(t.queries(), 2);
        assert!(t.check_closed().is_none());
        assert_eq!(t.build_mm().unwrap().state_count(), 1);
        t.fill(&mut oracle).unwrap();
        assert_eq!(t.queries(), 2);
    }

    #[test]
    fn async_task_initial_table_is_unclosed() {
        let m = closure(&models::async_task()).machine;
        let a = m.alphabet_arc().clone();
        let mut oracle = QueryCache::new(MealyOracle::new(m));
        let mut t = ObservationTable::new(a.clone(), true);
        t.fill(&mut oracle).unwrap();
        let execute = a.input("execute").unwrap();
        assert_eq!(t.check_closed(), Some(vec![execute]));
        t.add_prefix(vec![execute]);
        t.fill(&mut oracle).unwrap();
        assert_ne!(t.check_closed(), Some(vec![execute]));
    }

    #[test]
    fn err_rows_are_not_queried() {
        let m = closure(&models::async_task()).machine;
        let a = m.alphabet_arc().clone();
        let mut on = MealyOracle::new(m.clone());
        let mut off = MealyOracle::new(m);
        let mut t_on = ObservationTable::new(a.clone(), true);
        let mut t_off = ObservationTable::new(a.clone(), false);
        t_on.fill(&mut on).unwrap();
        t_off.fill(&mut off).unwrap();
        // `wait` from the initial state is quiet; nothing is absorbing yet
        let execute = a.input("execute").unwrap();
        for t in [&mut t_on, &mut t_off] {
            t.add_prefix(vec![execute]);
        }
        t_on.fill(&mut on).unwrap();
        t_off.fill(&mut off).unwrap();
        assert!(t_on.queries() < t_off.queries());
        for w in t_on.domain() {
            assert_eq!(t_on.row(&w), t_off.row(&w));
        }
    }
}
