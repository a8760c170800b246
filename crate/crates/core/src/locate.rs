//! Using a detecting array as a test suite: simulate outcomes for a set of
//! faulty interactions, and recover the faults from observed outcomes.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::array::{column_sets, decode_levels, Interaction, MixedArray, RowSet};
use crate::error::{Error, Result};
use crate::verify::is_detecting;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    Pass,
    Fail,
}

/// One pass/fail flag per row of an array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct OutcomeVector(Vec<Outcome>);

impl OutcomeVector {
    pub fn new(outcomes: Vec<Outcome>) -> Self {
        Self(outcomes)
    }

    pub fn all_pass(n: usize) -> Self {
        Self(vec![Outcome::Pass; n])
    }

    /// Rows in `failing` fail, every other row passes.
    pub fn from_failing(failing: &RowSet) -> Self {
        Self(
            (0..failing.universe())
                .map(|r| {
                    if failing.contains(r) {
                        Outcome::Fail
                    } else {
                        Outcome::Pass
                    }
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.0
    }

    pub fn failing(&self) -> RowSet {
        RowSet::from_rows(
            self.0.len(),
            self.0
                .iter()
                .enumerate()
                .filter(|(_, &o)| o == Outcome::Fail)
                .map(|(r, _)| r),
        )
    }
}

impl FromStr for OutcomeVector {
    type Err = Error;

    /// One `P` or `F` per non-empty line.
    fn from_str(text: &str) -> Result<Self> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            match line.trim() {
                "" => continue,
                "P" | "p" => out.push(Outcome::Pass),
                "F" | "f" => out.push(Outcome::Fail),
                other => {
                    return Err(Error::Parse {
                        line: i + 1,
                        message: format!("expected P or F, found `{other}`"),
                    })
                }
            }
        }
        Ok(Self(out))
    }
}

impl fmt::Display for OutcomeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.0 {
            writeln!(f, "{}", if *o == Outcome::Fail { "F" } else { "P" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum LocateResult {
    /// The faulty interactions; their row sets union to the failing rows.
    Identified { faults: Vec<Interaction> },
    /// More than `d` interactions fit inside the failing rows.
    TooManyFaults { candidates: usize },
    /// Failing rows that no admissible candidate explains.
    Inconsistent { unexplained: RowSet },
}

/// Outcomes of running `array` when exactly `faults` are faulty: a row
/// fails iff it covers at least one of them.
pub fn simulate_outcome(array: &MixedArray, faults: &[Interaction]) -> Result<OutcomeVector> {
    if let Some(first) = faults.first() {
        if let Some(odd) = faults.iter().find(|f| f.strength() != first.strength()) {
            return Err(Error::InvalidStrength {
                t: odd.strength(),
                constraint: format!("all faults share strength {}", first.strength()),
            });
        }
    }
    let failing = crate::array::rho_union(array, faults)?;
    Ok(OutcomeVector::from_failing(&failing))
}

/// Recovers up to `d` faulty t-way interactions from `outcomes`.
///
/// Candidates are the t-way interactions with a non-empty row set lying
/// entirely inside the failing rows. More than `d` candidates means more
/// than `d` faults; otherwise the candidates are the answer when they
/// explain every failing row. The result is exact only when `array` is a
/// (d,t)-detecting array with more than `d` t-way interactions; see
/// [`locate_faults_verified`].
pub fn locate_faults(
    array: &MixedArray,
    d: usize,
    t: usize,
    outcomes: &OutcomeVector,
) -> Result<LocateResult> {
    if outcomes.len() != array.n() {
        return Err(Error::InvalidShape(format!(
            "{} outcomes for an array with {} rows",
            outcomes.len(),
            array.n()
        )));
    }
    crate::array::check_strength(t, array.k())?;
    let failing = outcomes.failing();
    let mut candidates = Vec::new();
    let mut explained = RowSet::empty(array.n());
    for columns in column_sets(array.k(), t) {
        for (idx, rows) in array.row_sets_on(&columns).iter().enumerate() {
            if !rows.is_empty() && rows.is_subset(&failing) {
                let levels = decode_levels(array.types(), &columns, idx);
                candidates.push(Interaction::from_parts(&columns, &levels));
                explained.union_with(rows);
            }
        }
    }
    if candidates.len() > d {
        return Ok(LocateResult::TooManyFaults {
            candidates: candidates.len(),
        });
    }
    let unexplained = failing.difference(&explained);
    if unexplained.is_empty() {
        Ok(LocateResult::Identified { faults: candidates })
    } else {
        Ok(LocateResult::Inconsistent { unexplained })
    }
}

/// [`locate_faults`] after confirming that `array` is (d,t)-detecting.
pub fn locate_faults_verified(
    array: &MixedArray,
    d: usize,
    t: usize,
    outcomes: &OutcomeVector,
) -> Result<LocateResult> {
    let report = is_detecting(array, d, t)?;
    if !report.holds {
        return Err(Error::Precondition(format!(
            "array is not ({d},{t})-detecting: {}",
            report.witness.map(|w| w.to_string()).unwrap_or_default()
        )));
    }
    if array.types().interaction_count(t) <= d as u128 {
        return Err(Error::Precondition(format!(
            "exact recovery needs more than {d} {t}-way interactions"
        )));
    }
    locate_faults(array, d, t, outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::TypeVector;

    fn factorial() -> MixedArray {
        MixedArray::full_factorial(TypeVector::new(vec![2, 3, 3]).unwrap())
    }

    #[test]
    fn no_faults_all_pass() {
        let a = factorial();
        assert_eq!(
            simulate_outcome(&a, &[]).unwrap(),
            OutcomeVector::all_pass(a.n())
        );
    }

    #[test]
    fn disjoint_faults_union() {
        let a = factorial();
        let f1 = Interaction::new(vec![(0, 0), (1, 0)]).unwrap();
        let f2 = Interaction::new(vec![(0, 1), (1, 1)]).unwrap();
        let y = simulate_outcome(&a, &[f1.clone(), f2.clone()]).unwrap();
        assert_eq!(y.failing().len(), 6);
    }

    #[test]
    fn mixed_strength_faults_rejected() {
        let a = factorial();
        let f1 = Interaction::new(vec![(0, 0)]).unwrap();
        let f2 = Interaction::new(vec![(0, 1), (1, 1)]).unwrap();
        assert!(simulate_outcome(&a, &[f1, f2]).is_err());
    }

    #[test]
    fn length_mismatch() {
        let a = factorial();
        assert!(locate_faults(&a, 1, 2, &OutcomeVector::all_pass(3)).is_err());
    }

    #[test]
    fn outcome_text() {
        let y: OutcomeVector = "P\nF\n\nP\n".parse().unwrap();
        assert_eq!(y.len(), 3);
        assert_eq!(y.failing().one_based(), vec![2]);
        assert_eq!(y.to_string(), "P\nF\nP\n");
        assert!(matches!(
            "P\nX\n".parse::<OutcomeVector>(),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
