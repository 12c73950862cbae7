use crate::alphabet::{Input, Word};
use crate::error::Result;
use crate::mealy::MealyMachine;
use crate::oracle::MembershipOracle;

/// Rivest–Schapire counterexample analysis.
///
/// `access[q]` is the table prefix that represents hypothesis state `q`.
/// Split point `k` replaces `cex[..k]` by the access word of the state it
/// reaches; at `k = 0` the oracle disagrees with the hypothesis on the
/// remainder and at `k = |cex|` it trivially agrees. The first `k` at which
/// it agrees marks where the hypothesis went wrong, and the remainder from
/// there separates two words the table currently deems equal.
///
/// Returns the suffix together with the number of membership queries used
/// (at most `|cex|`).
pub fn analyze_cex(
    h: &MealyMachine,
    access: &[Word],
    cex: &[Input],
    oracle: &mut dyn MembershipOracle,
) -> Result<(Word, u64)> {
    let m = cex.len();
    assert!(m > 0, "counterexample must be non-empty");
    let mut states = Vec::with_capacity(m + 1);
    let mut q = h.initial();
    states.push(q);
    for &i in cex {
        q = h.next(q, i);
        states.push(q);
    }
    let mut queries = 1;
    // oracle outputs on the remainder after the current split point
    let mut prev_tail = oracle.query(cex)?;
    for k in 1..=m {
        let rest = &cex[k..];
        let expected = h.outputs_from(states[k], rest);
        let agrees = if rest.is_empty() {
            true
        } else {
            let mut w = access[states[k]].clone();
            w.extend_from_slice(rest);
            queries += 1;
            let out = oracle.query(&w)?;
            let tail = out[out.len() - rest.len()..].to_vec();
            let same = tail == expected;
            if !same {
                prev_tail = tail;
            }
            same
        };
        if agrees {
            let j = k - 1;
            let own = h.output(states[j], cex[j]);
            if prev_tail[0] != own || k == m {
                return Ok((cex[j..].to_vec(), queries));
            }
            return Ok((cex[k..].to_vec(), queries));
        }
    }
    unreachable!("the empty remainder always agrees")
}
