//! Predicates and bounds for covering and detecting arrays.
//!
//! [`is_detecting`] is the structural check (coverage index at least `d+1`
//! plus d-extendibility); [`is_detecting_brute`] evaluates the defining
//! containment condition directly and serves as its oracle on small inputs.

use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::array::{
    check_strength, column_sets, decode_levels, interactions, Interaction, MixedArray, RowSet,
    TypeVector,
};
use crate::error::{Error, Result};

/// Largest `d` for which d-extendibility is checked exactly.
pub const MAX_EXACT_D: usize = 4;

/// Caps on enumeration work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Upper bound on `(interactions) x (candidate sets)` examined by the
    /// brute-force detecting check.
    pub max_enum: u128,
    /// Upper bound on the number of level tuples tabulated for one column set.
    pub max_table: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_enum: 200_000_000,
            max_table: 1 << 26,
        }
    }
}

impl Limits {
    /// Defaults, with `max_enum` overridden by `DTA_MAX_ENUM` when set.
    pub fn from_env() -> Self {
        let mut limits = Self::default();
        if let Some(cap) = std::env::var("DTA_MAX_ENUM")
            .ok()
            .and_then(|s| s.trim().parse::<u128>().ok())
        {
            limits.max_enum = cap;
        }
        limits
    }
}

/// Evidence attached to a failed check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A t-way interaction covered fewer times than required.
    Undercovered {
        interaction: Interaction,
        count: usize,
        required: usize,
    },
    /// A (t+1)-tuple appearing in more than one row.
    RepeatedTuple {
        interaction: Interaction,
        rows: RowSet,
    },
    /// At most `d` extensions whose rows exhaust the rows of `interaction`.
    ExtensionCover {
        interaction: Interaction,
        extensions: Vec<Interaction>,
    },
    /// A violation of `rho(T) ⊆ rho(𝒯) ⇔ T ∈ 𝒯`.
    Containment {
        interaction: Interaction,
        set: Vec<Interaction>,
        contained: bool,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Undercovered {
                interaction,
                count,
                required,
            } => write!(
                f,
                "interaction {interaction} covered {count} time(s), needs {required}"
            ),
            Witness::RepeatedTuple { interaction, rows } => {
                write!(f, "tuple {interaction} repeated in rows {rows}")
            }
            Witness::ExtensionCover {
                interaction,
                extensions,
            } => write!(
                f,
                "rows of {interaction} exhausted by extensions [{}]",
                extensions.iter().join(", ")
            ),
            Witness::Containment {
                interaction,
                set,
                contained,
            } => {
                let rel = if *contained { "⊆" } else { "⊄" };
                write!(f, "rho{interaction} {rel} rho([{}])", set.iter().join(", "))
            }
        }
    }
}

/// Outcome of one predicate. A failed verdict always carries a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub property: String,
    pub holds: bool,
    pub witness: Option<Witness>,
    pub n: usize,
    /// Smallest cover count at the checked strength, when computed.
    pub min_coverage: Option<usize>,
    /// Size lower bound for the checked parameters, when defined.
    pub lower_bound: Option<u128>,
    /// Whether `n` equals `lower_bound`.
    pub optimum: Option<bool>,
}

impl VerifyReport {
    fn new(property: impl Into<String>, n: usize, witness: Option<Witness>) -> Self {
        Self {
            property: property.into(),
            holds: witness.is_none(),
            witness,
            n,
            min_coverage: None,
            lower_bound: None,
            optimum: None,
        }
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}",
            self.property,
            if self.holds { "yes" } else { "no" }
        )?;
        write!(f, " (N={}", self.n)?;
        if let Some(c) = self.min_coverage {
            write!(f, ", coverage index {c}")?;
        }
        if let Some(b) = self.lower_bound {
            write!(f, ", bound {b}")?;
        }
        if let Some(o) = self.optimum {
            write!(f, ", {}", if o { "optimum" } else { "not optimum" })?;
        }
        write!(f, ")")?;
        if let Some(w) = &self.witness {
            write!(f, "\n  witness: {w}")?;
        }
        Ok(())
    }
}

fn check_table(array: &MixedArray, columns: &[usize], limits: &Limits) -> Result<()> {
    let size = array.types().product_of(columns);
    if size > limits.max_table {
        return Err(Error::EnumerationCap {
            count: size as u128,
            cap: limits.max_table as u128,
        });
    }
    Ok(())
}

/// Smallest cover count over all t-way interactions and the first
/// interaction attaining it.
fn min_coverage(array: &MixedArray, t: usize, limits: &Limits) -> Result<(usize, Interaction)> {
    check_strength(t, array.k())?;
    let mut best: Option<(usize, Interaction)> = None;
    for columns in column_sets(array.k(), t) {
        check_table(array, &columns, limits)?;
        let counts = array.counts_on(&columns);
        let (idx, &c) = counts
            .iter()
            .enumerate()
            .min_by_key(|&(i, &c)| (c, i))
            .expect("non-empty table");
        if best.as_ref().is_none_or(|(b, _)| (c as usize) < *b) {
            let levels = decode_levels(array.types(), &columns, idx);
            best = Some((c as usize, Interaction::from_parts(&columns, &levels)));
        }
    }
    Ok(best.expect("at least one column set"))
}

/// Largest `λ` such that every t-tuple in every t columns appears at least
/// `λ` times (0 if something is uncovered).
pub fn coverage_index(array: &MixedArray, t: usize) -> Result<usize> {
    min_coverage(array, t, &Limits::default()).map(|(c, _)| c)
}

/// Smallest and largest cover count over all t-way interactions.
/// Equal values `λ` mean the array is an orthogonal array of index `λ`.
pub fn coverage_range(array: &MixedArray, t: usize) -> Result<(usize, usize)> {
    check_strength(t, array.k())?;
    let mut lo = usize::MAX;
    let mut hi = 0;
    for columns in column_sets(array.k(), t) {
        check_table(array, &columns, &Limits::default())?;
        for c in array.counts_on(&columns) {
            lo = lo.min(c as usize);
            hi = hi.max(c as usize);
        }
    }
    Ok((lo, hi))
}

/// No (t+1)-tuple of values occurs twice in any t+1 columns.
pub fn is_super_simple(array: &MixedArray, t: usize) -> Result<VerifyReport> {
    if t == 0 || t + 1 > array.k() {
        return Err(Error::InvalidStrength {
            t,
            constraint: format!("1 <= t and t+1 <= k = {}", array.k()),
        });
    }
    let limits = Limits::default();
    for columns in column_sets(array.k(), t + 1) {
        check_table(array, &columns, &limits)?;
        let sets = array.row_sets_on(&columns);
        if let Some((idx, rows)) = sets.iter().enumerate().find(|(_, s)| s.len() > 1) {
            let levels = decode_levels(array.types(), &columns, idx);
            let witness = Witness::RepeatedTuple {
                interaction: Interaction::from_parts(&columns, &levels),
                rows: rows.clone(),
            };
            return Ok(VerifyReport::new("super-simple", array.n(), Some(witness)));
        }
    }
    Ok(VerifyReport::new("super-simple", array.n(), None))
}

/// Finds at most `budget` candidate sets whose union contains `target`.
/// Branches on the lowest uncovered row, so the first cover found is the
/// same on every run.
fn find_cover(
    target: &RowSet,
    candidates: &[(Interaction, RowSet)],
    budget: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    let Some(row) = target.first() else {
        return true;
    };
    if budget == 0 {
        return false;
    }
    let largest = candidates
        .iter()
        .map(|(_, s)| s.intersection(target).len())
        .max()
        .unwrap_or(0);
    if largest * budget < target.len() {
        return false;
    }
    for (i, (_, set)) in candidates.iter().enumerate() {
        if !set.contains(row) {
            continue;
        }
        chosen.push(i);
        if find_cover(&target.difference(set), candidates, budget - 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

fn d_extendible_witness(
    array: &MixedArray,
    t: usize,
    d: usize,
    limits: &Limits,
) -> Result<Option<Witness>> {
    let k = array.k();
    if t == 0 || t >= k {
        return Err(Error::InvalidStrength {
            t,
            constraint: format!("1 <= t < k = {k}"),
        });
    }
    if d > MAX_EXACT_D {
        return Err(Error::Infeasible(format!(
            "exact d-extendibility check is infeasible for d = {d} (supported up to {MAX_EXACT_D})"
        )));
    }
    let by_level: Vec<Vec<RowSet>> = (0..k).map(|c| array.row_sets_on(&[c])).collect();
    for columns in column_sets(k, t) {
        check_table(array, &columns, limits)?;
        let sets = array.row_sets_on(&columns);
        for (idx, rows) in sets.iter().enumerate() {
            let levels = decode_levels(array.types(), &columns, idx);
            let interaction = Interaction::from_parts(&columns, &levels);
            let mut candidates = Vec::new();
            for c in (0..k).filter(|c| !columns.contains(c)) {
                for (level, level_rows) in by_level[c].iter().enumerate() {
                    let part = rows.intersection(level_rows);
                    if !part.is_empty() {
                        candidates.push((interaction.extend(c, level as u32)?, part));
                    }
                }
            }
            let mut chosen = Vec::new();
            if find_cover(rows, &candidates, d, &mut chosen) {
                return Ok(Some(Witness::ExtensionCover {
                    interaction,
                    extensions: chosen.iter().map(|&i| candidates[i].0.clone()).collect(),
                }));
            }
        }
    }
    Ok(None)
}

/// For every t-way interaction `T`, no choice of at most `d` extensions of
/// `T` has row sets whose union is all of `rho(T)`. An interaction with no
/// rows fails trivially (the empty choice already exhausts it).
pub fn is_d_extendible(array: &MixedArray, t: usize, d: usize) -> Result<VerifyReport> {
    let witness = d_extendible_witness(array, t, d, &Limits::default())?;
    Ok(VerifyReport::new(
        format!("{d}-extendible at strength {t}"),
        array.n(),
        witness,
    ))
}

/// Shared preconditions of the detecting-array checks.
fn check_dta_params(types: &TypeVector, d: usize, t: usize) -> Result<()> {
    let k = types.k();
    if t == 0 || t >= k {
        return Err(Error::Infeasible(format!(
            "detecting arrays require 1 <= t < k (t = {t}, k = {k})"
        )));
    }
    if d == 0 {
        return Err(Error::Infeasible("detecting arrays require d >= 1".into()));
    }
    types.require_nontrivial()?;
    if d as u128 >= u128::from(types.min()) {
        return Err(Error::Infeasible(format!(
            "no (d,t)-detecting array exists when d >= smallest alphabet (d = {d}, min v = {})",
            types.min()
        )));
    }
    Ok(())
}

/// `(d+1)` times the product of the `t` largest alphabet sizes: no
/// (d,t)-detecting array of this type has fewer rows.
pub fn lower_bound(d: usize, t: usize, types: &TypeVector) -> Result<u128> {
    check_dta_params(types, d, t)?;
    Ok((d as u128 + 1) * types.top_product(t))
}

fn annotate_bound(report: &mut VerifyReport, d: usize, t: usize, types: &TypeVector) {
    let bound = (d as u128 + 1) * types.top_product(t);
    report.lower_bound = Some(bound);
    report.optimum = Some(report.n as u128 == bound);
}

/// Structural detecting-array check: coverage index at least `d+1` and
/// d-extendible.
pub fn is_detecting(array: &MixedArray, d: usize, t: usize) -> Result<VerifyReport> {
    is_detecting_with(array, d, t, &Limits::default())
}

pub fn is_detecting_with(
    array: &MixedArray,
    d: usize,
    t: usize,
    limits: &Limits,
) -> Result<VerifyReport> {
    check_dta_params(array.types(), d, t)?;
    let property = format!("({d},{t})-detecting");
    let (cover, weakest) = min_coverage(array, t, limits)?;
    let witness = if cover < d + 1 {
        Some(Witness::Undercovered {
            interaction: weakest,
            count: cover,
            required: d + 1,
        })
    } else {
        d_extendible_witness(array, t, d, limits)?
    };
    let mut report = VerifyReport::new(property, array.n(), witness);
    report.min_coverage = Some(cover);
    annotate_bound(&mut report, d, t, array.types());
    Ok(report)
}

fn binomial(n: u128, r: u128) -> u128 {
    if r > n {
        return 0;
    }
    (0..r).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Definitional detecting-array check: for every t-way `T` and every set
/// `𝒯` of exactly `d` t-way interactions, `rho(T) ⊆ rho(𝒯)` holds exactly
/// when `T ∈ 𝒯`. Exponential; intended as an oracle on small arrays.
pub fn is_detecting_brute(array: &MixedArray, d: usize, t: usize) -> Result<VerifyReport> {
    is_detecting_brute_with(array, d, t, &Limits::from_env())
}

pub fn is_detecting_brute_with(
    array: &MixedArray,
    d: usize,
    t: usize,
    limits: &Limits,
) -> Result<VerifyReport> {
    check_dta_params(array.types(), d, t)?;
    let all = interactions(array.types(), t);
    let m = all.len() as u128;
    let work = binomial(m, d as u128).saturating_mul(m);
    if work > limits.max_enum {
        return Err(Error::EnumerationCap {
            count: work,
            cap: limits.max_enum,
        });
    }
    let sets: Vec<RowSet> = all
        .iter()
        .map(|i| crate::array::rho(array, i))
        .collect::<Result<_>>()?;
    let mut witness = None;
    'outer: for combo in (0..all.len()).combinations(d) {
        let mut union = RowSet::empty(array.n());
        combo.iter().for_each(|&i| union.union_with(&sets[i]));
        for (i, rows) in sets.iter().enumerate() {
            let contained = rows.is_subset(&union);
            if contained != combo.contains(&i) {
                witness = Some(Witness::Containment {
                    interaction: all[i].clone(),
                    set: combo.iter().map(|&j| all[j].clone()).collect(),
                    contained,
                });
                break 'outer;
            }
        }
    }
    let mut report = VerifyReport::new(
        format!("({d},{t})-detecting [brute force]"),
        array.n(),
        witness,
    );
    annotate_bound(&mut report, d, t, array.types());
    Ok(report)
}

/// Every t-way interaction is covered at least `d+1` times.
pub fn min_rho_check(array: &MixedArray, d: usize, t: usize) -> Result<VerifyReport> {
    let (cover, weakest) = min_coverage(array, t, &Limits::default())?;
    let witness = (cover < d + 1).then(|| Witness::Undercovered {
        interaction: weakest,
        count: cover,
        required: d + 1,
    });
    let mut report = VerifyReport::new(
        format!("every {t}-way row set has >= {} rows", d + 1),
        array.n(),
        witness,
    );
    report.min_coverage = Some(cover);
    Ok(report)
}

/// Verdict of [`check_search_constraints`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConstraintVerdict {
    /// A known necessary condition applies and is satisfied.
    Pass { rules: Vec<String> },
    /// A necessary condition for a bound-meeting array is violated.
    Reject { rule: String, reason: String },
    /// No known constraint covers these parameters.
    Unknown,
}

impl ConstraintVerdict {
    pub fn is_reject(&self) -> bool {
        matches!(self, ConstraintVerdict::Reject { .. })
    }
}

impl fmt::Display for ConstraintVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintVerdict::Pass { rules } => write!(f, "pass ({})", rules.join("; ")),
            ConstraintVerdict::Reject { rule, reason } => write!(f, "reject: {rule}: {reason}"),
            ConstraintVerdict::Unknown => write!(f, "unknown: no known constraint"),
        }
    }
}

const FIXED_LEVEL_RULE: &str = "fixed-level (1,2) bound: k <= 2q for type q^k";
const MIXED_RULE: &str = "mixed (1,2) bound for type 2^u 3^k w^1";

/// Necessary conditions for a (1,2)-detecting array meeting the size
/// bound. Only the fixed-level family `q^k` and the family `2^u 3^k w^1`
/// (`w >= 3`) are known; anything else is reported as unknown.
pub fn check_search_constraints(types: &TypeVector, d: usize, t: usize) -> ConstraintVerdict {
    if let Err(e) = check_dta_params(types, d, t) {
        return ConstraintVerdict::Reject {
            rule: "parameter conventions".into(),
            reason: e.to_string(),
        };
    }
    if (d, t) != (1, 2) {
        return ConstraintVerdict::Unknown;
    }
    let sorted = types.sorted();
    let mut passed = Vec::new();

    let q = sorted[0];
    if sorted.iter().all(|&v| v == q) {
        let k = sorted.len();
        if k > 2 * q as usize {
            return ConstraintVerdict::Reject {
                rule: FIXED_LEVEL_RULE.into(),
                reason: format!("k = {k} exceeds 2q = {}", 2 * q),
            };
        }
        passed.push(FIXED_LEVEL_RULE.to_string());
    }

    let (w, rest) = sorted.split_last().expect("non-empty");
    if *w >= 3 && rest.iter().all(|&v| v == 2 || v == 3) {
        let u = rest.iter().filter(|&&v| v == 2).count();
        let k = rest.len() - u;
        let violated = if u >= 2 && k >= 2 {
            Some("either u or k must be below 2".to_string())
        } else if k == 0 && u > 3 {
            Some(format!("k = 0 requires u <= 3, got u = {u}"))
        } else if k == 1 && u > 4 {
            Some(format!("k = 1 requires u <= 4, got u = {u}"))
        } else if u == 0 && k > 5 {
            Some(format!("u = 0 requires k <= 5, got k = {k}"))
        } else if u == 1 && k > 3 {
            Some(format!("u = 1 requires k <= 3, got k = {k}"))
        } else {
            None
        };
        if let Some(reason) = violated {
            return ConstraintVerdict::Reject {
                rule: format!("{MIXED_RULE} (u = {u}, k = {k}, w = {w})"),
                reason,
            };
        }
        passed.push(format!("{MIXED_RULE} (u = {u}, k = {k}, w = {w})"));
    }

    if passed.is_empty() {
        ConstraintVerdict::Unknown
    } else {
        ConstraintVerdict::Pass { rules: passed }
    }
}
