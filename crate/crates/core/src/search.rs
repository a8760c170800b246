//! Simulated annealing for (1,2)-detecting arrays.
//!
//! The objective counts pairs `(T, E)` where `T` is a 2-way interaction,
//! `E` one of its extensions, and both are covered by the same number of
//! rows. Because `rho(E) ⊆ rho(T)`, equal counts mean equal row sets, and
//! the objective is zero exactly on (1,2)-detecting arrays.
//!
//! Moves swap two entries of one column, so each column keeps the level
//! multiset it was initialised with. A move is kept when it lowers the
//! objective, otherwise with a fixed probability `p`; there is no cooling.
//! Initial columns are balanced (every level `floor(N/v)` or `ceil(N/v)`
//! times) and shuffled. Restarts run independent chains seeded
//! `seed, seed+1, ...`; the first chain to reach zero wins.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::array::{MixedArray, TypeVector};
use crate::error::{Error, Result};
use crate::verify::{check_search_constraints, lower_bound};

/// Incrementally maintained objective for one array.
///
/// Keeps one row bitmask per `(column, level)`. The rows of a 2-way
/// interaction are the intersection of two masks, and an extension along
/// column `c` has the same rows iff that intersection lies inside one of
/// column `c`'s masks.
#[derive(Debug, Clone)]
pub struct Objective {
    array: MixedArray,
    sizes: Vec<usize>,
    /// Index of the first mask of each column.
    mask_base: Vec<usize>,
    words: usize,
    masks: Vec<u64>,
    value: u64,
    keys: Vec<TermKey>,
}

/// A term of the objective: 2-way interaction `((a, x), (b, y))`
/// extended along column `c`.
type TermKey = (usize, u32, usize, u32, usize);

impl Objective {
    pub fn new(array: MixedArray) -> Result<Self> {
        let k = array.k();
        if k < 3 {
            return Err(Error::InvalidShape(format!(
                "the objective needs at least 3 columns, got {k}"
            )));
        }
        let sizes: Vec<usize> = array.types().sizes().iter().map(|&v| v as usize).collect();
        let mut mask_base = Vec::with_capacity(k);
        let mut total = 0;
        for &v in &sizes {
            mask_base.push(total);
            total += v;
        }
        let words = array.n().div_ceil(64);
        let mut obj = Self {
            sizes,
            mask_base,
            words,
            masks: vec![0; total * words],
            value: 0,
            keys: Vec::new(),
            array,
        };
        for r in 0..obj.array.n() {
            for c in 0..k {
                obj.flip(c, obj.array.get(r, c), r);
            }
        }
        obj.value = obj.full_value();
        Ok(obj)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn array(&self) -> &MixedArray {
        &self.array
    }

    pub fn into_array(self) -> MixedArray {
        self.array
    }

    fn mask(&self, column: usize, level: u32) -> &[u64] {
        let start = (self.mask_base[column] + level as usize) * self.words;
        &self.masks[start..start + self.words]
    }

    fn flip(&mut self, column: usize, level: u32, row: usize) {
        let start = (self.mask_base[column] + level as usize) * self.words;
        self.masks[start + row / 64] ^= 1 << (row % 64);
    }

    /// Number of levels of column `c` whose extension has exactly the rows
    /// of the 2-way interaction.
    fn term(&self, (a, x, b, y, c): TermKey) -> u64 {
        let (ma, mb) = (self.mask(a, x), self.mask(b, y));
        if ma.iter().zip(mb).all(|(p, q)| p & q == 0) {
            return self.sizes[c] as u64;
        }
        let hit = (0..self.sizes[c] as u32).any(|z| {
            let mc = self.mask(c, z);
            (0..self.words).all(|w| ma[w] & mb[w] & !mc[w] == 0)
        });
        u64::from(hit)
    }

    /// Objective recomputed from the masks.
    pub fn full_value(&self) -> u64 {
        let k = self.sizes.len();
        let mut total = 0;
        for a in 0..k {
            for b in a + 1..k {
                for x in 0..self.sizes[a] as u32 {
                    for y in 0..self.sizes[b] as u32 {
                        for c in (0..k).filter(|&c| c != a && c != b) {
                            total += self.term((a, x, b, y, c));
                        }
                    }
                }
            }
        }
        total
    }

    /// Collects into `self.keys`, without repeats, the terms whose value can
    /// change when rows `r1` and `r2` (with different levels) exchange
    /// their entries in `column`.
    fn collect_affected(&mut self, column: usize, r1: usize, r2: usize) {
        let k = self.sizes.len();
        let mut keys = std::mem::take(&mut self.keys);
        keys.clear();
        let (row1, row2) = (self.array.row(r1), self.array.row(r2));
        // Interactions pinning `column` that contain r1 or r2 before or after.
        for b in (0..k).filter(|&b| b != column) {
            let ys: &[u32] = if row1[b] == row2[b] {
                &row1[b..=b]
            } else {
                &[row1[b], row2[b]]
            };
            for x in [row1[column], row2[column]] {
                for &y in ys {
                    for c in (0..k).filter(|&c| c != column && c != b) {
                        keys.push((column, x, b, y, c));
                    }
                }
            }
        }
        // Interactions avoiding `column`, extended along it.
        for a in (0..k).filter(|&a| a != column) {
            for b in (a + 1..k).filter(|&b| b != column) {
                keys.push((a, row1[a], b, row1[b], column));
                if (row1[a], row1[b]) != (row2[a], row2[b]) {
                    keys.push((a, row2[a], b, row2[b], column));
                }
            }
        }
        self.keys = keys;
    }

    fn affected_sum(&self) -> u64 {
        self.keys.iter().map(|&key| self.term(key)).sum()
    }

    fn exchange(&mut self, column: usize, r1: usize, r2: usize) {
        let (x1, x2) = (self.array.get(r1, column), self.array.get(r2, column));
        self.flip(column, x1, r1);
        self.flip(column, x2, r2);
        self.flip(column, x2, r1);
        self.flip(column, x1, r2);
        self.array.swap_in_column(column, r1, r2);
    }

    /// Exchanges two entries of `column` and returns the new objective.
    pub fn swap(&mut self, column: usize, r1: usize, r2: usize) -> u64 {
        if r1 == r2 || self.array.get(r1, column) == self.array.get(r2, column) {
            return self.value;
        }
        self.collect_affected(column, r1, r2);
        let before = self.affected_sum();
        self.exchange(column, r1, r2);
        let after = self.affected_sum();
        self.value = self.value + after - before;
        self.value
    }

    /// Reverts a [`swap`](Self::swap) whose prior objective was `previous`.
    pub fn undo(&mut self, column: usize, r1: usize, r2: usize, previous: u64) {
        if r1 != r2 && self.array.get(r1, column) != self.array.get(r2, column) {
            self.exchange(column, r1, r2);
        }
        self.value = previous;
    }
}

/// The (1,2) objective of `array`, computed from scratch.
pub fn sa_objective(array: &MixedArray) -> Result<u64> {
    Objective::new(array.clone()).map(|o| o.value())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    pub types: TypeVector,
    /// Target row count; `None` means the size lower bound.
    pub n: Option<usize>,
    pub seed: u64,
    /// Moves per chain.
    pub max_iters: u64,
    /// Number of independent chains.
    pub restarts: usize,
    /// Probability of keeping a move that does not lower the objective.
    pub accept_prob: f64,
    /// Run even when a known necessary condition rules the type out.
    pub force: bool,
}

impl SearchConfig {
    pub fn new(types: TypeVector) -> Self {
        Self {
            types,
            n: None,
            seed: 0,
            max_iters: 2_000_000,
            restarts: 16,
            accept_prob: 0.01,
            force: false,
        }
    }

    /// Checks parameters and returns the row count to search at.
    pub fn resolve_n(&self) -> Result<usize> {
        let bound = lower_bound(1, 2, &self.types)?;
        let n = self.n.unwrap_or(bound as usize);
        if (n as u128) < bound {
            return Err(Error::Infeasible(format!(
                "N = {n} is below the lower bound (d+1) * (product of the t largest sizes) = {bound}"
            )));
        }
        if !(0.0..=1.0).contains(&self.accept_prob) {
            return Err(Error::Precondition(format!(
                "acceptance probability {} outside [0, 1]",
                self.accept_prob
            )));
        }
        if self.max_iters == 0 || self.restarts == 0 {
            return Err(Error::Precondition(
                "max_iters and restarts must both be at least 1".into(),
            ));
        }
        if self.types.k() < 3 {
            return Err(Error::Precondition(
                "search needs at least 3 columns".into(),
            ));
        }
        if !self.force {
            let verdict = check_search_constraints(&self.types, 1, 2);
            if verdict.is_reject() {
                return Err(Error::Infeasible(format!(
                    "{verdict} (use force to search anyway)"
                )));
            }
        }
        Ok(n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchOutcome {
    Found,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainSummary {
    pub seed: u64,
    pub initial_objective: u64,
    pub best_objective: u64,
    pub final_objective: u64,
    pub iterations: u64,
    pub accepted: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub outcome: SearchOutcome,
    pub n: usize,
    pub array: Option<MixedArray>,
    pub chains: Vec<ChainSummary>,
    #[serde(serialize_with = "ser_millis")]
    pub elapsed: Duration,
}

fn ser_millis<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u128(d.as_millis())
}

/// Reports compare equal when everything but the wall-clock time matches.
impl PartialEq for SearchReport {
    fn eq(&self, other: &Self) -> bool {
        self.outcome == other.outcome
            && self.n == other.n
            && self.array == other.array
            && self.chains == other.chains
    }
}

/// Balanced columns, each shuffled independently.
pub fn balanced_start(types: &TypeVector, n: usize, rng: &mut impl Rng) -> MixedArray {
    let k = types.k();
    let mut data = vec![0u32; n * k];
    for j in 0..k {
        let v = types.size(j);
        let mut column: Vec<u32> = (0..n as u32).map(|i| i % v).collect();
        column.shuffle(rng);
        for (r, level) in column.into_iter().enumerate() {
            data[r * k + j] = level;
        }
    }
    MixedArray::from_flat(types.clone(), data).expect("levels in range")
}

#[cfg_attr(not(debug_assertions), allow(dead_code))]
fn column_histograms(a: &MixedArray) -> Vec<Vec<usize>> {
    (0..a.k())
        .map(|j| {
            let mut h = vec![0; a.types().size(j) as usize];
            a.column(j).for_each(|l| h[l as usize] += 1);
            h
        })
        .collect()
}

fn run_chain(
    types: &TypeVector,
    n: usize,
    seed: u64,
    max_iters: u64,
    p: f64,
) -> (ChainSummary, Option<MixedArray>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = balanced_start(types, n, &mut rng);
    #[cfg(debug_assertions)]
    let histograms = column_histograms(&start);
    let mut obj = Objective::new(start).expect("k >= 3 checked by caller");
    let k = types.k();
    let mut summary = ChainSummary {
        seed,
        initial_objective: obj.value(),
        best_objective: obj.value(),
        final_objective: obj.value(),
        iterations: 0,
        accepted: 0,
    };
    while obj.value() > 0 && summary.iterations < max_iters {
        summary.iterations += 1;
        let column = rng.gen_range(0..k);
        let r1 = rng.gen_range(0..n);
        let r2 = loop {
            let r = rng.gen_range(0..n);
            if obj.array().get(r, column) != obj.array().get(r1, column) {
                break r;
            }
        };
        let old = obj.value();
        let new = obj.swap(column, r1, r2);
        if new < old || rng.gen::<f64>() < p {
            summary.accepted += 1;
            summary.best_objective = summary.best_objective.min(new);
            #[cfg(debug_assertions)]
            debug_assert_eq!(column_histograms(obj.array()), histograms);
        } else {
            obj.undo(column, r1, r2, old);
        }
        #[cfg(debug_assertions)]
        if summary.iterations.is_multiple_of(1000) {
            debug_assert_eq!(obj.value(), obj.full_value());
        }
    }
    summary.final_objective = obj.value();
    let found = (obj.value() == 0).then(|| obj.into_array());
    (summary, found)
}

/// Searches for a (1,2)-detecting array of the configured type and size.
/// Running out of budget is reported as [`SearchOutcome::Exhausted`] and
/// says nothing about existence.
pub fn sa_search(cfg: &SearchConfig) -> Result<SearchReport> {
    let n = cfg.resolve_n()?;
    let clock = Instant::now();
    let mut chains = Vec::new();
    let mut array = None;
    for i in 0..cfg.restarts {
        let seed = cfg.seed.wrapping_add(i as u64);
        let (summary, found) = run_chain(&cfg.types, n, seed, cfg.max_iters, cfg.accept_prob);
        chains.push(summary);
        if found.is_some() {
            array = found;
            break;
        }
    }
    debug_assert!(array
        .as_ref()
        .is_none_or(|a| crate::verify::is_detecting(a, 1, 2).is_ok_and(|r| r.holds)));
    Ok(SearchReport {
        outcome: if array.is_some() {
            SearchOutcome::Found
        } else {
            SearchOutcome::Exhausted
        },
        n,
        array,
        chains,
        elapsed: clock.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{extensions, interactions, rho};

    /// Objective straight from the definition, via row sets.
    fn objective_oracle(a: &MixedArray) -> u64 {
        interactions(a.types(), 2)
            .iter()
            .map(|t| {
                let base = rho(a, t).unwrap().len();
                extensions(a, t)
                    .unwrap()
                    .iter()
                    .filter(|e| rho(a, e).unwrap().len() == base)
                    .count() as u64
            })
            .sum()
    }

    fn types(v: &[u32]) -> TypeVector {
        TypeVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn constant_array_has_positive_objective() {
        let a = MixedArray::new(types(&[2, 3, 3, 3]), vec![vec![0; 4]; 18]).unwrap();
        let v = sa_objective(&a).unwrap();
        assert!(v > 0);
        assert_eq!(v, objective_oracle(&a));
    }

    #[test]
    fn needs_three_columns() {
        let a = MixedArray::full_factorial(types(&[2, 2]));
        assert!(sa_objective(&a).is_err());
    }

    #[test]
    fn incremental_matches_full_after_every_swap() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for ty in [vec![2, 3, 3, 3], vec![2, 2, 2, 4], vec![3, 3, 3, 3, 3]] {
            let ty = types(&ty);
            let start = balanced_start(&ty, 18, &mut rng);
            let mut obj = Objective::new(start).unwrap();
            for _ in 0..300 {
                let c = rng.gen_range(0..ty.k());
                let r1 = rng.gen_range(0..18);
                let r2 = rng.gen_range(0..18);
                let old = obj.value();
                let v = obj.swap(c, r1, r2);
                assert_eq!(v, obj.full_value());
                assert_eq!(v, objective_oracle(obj.array()));
                if rng.gen_bool(0.3) {
                    obj.undo(c, r1, r2, old);
                    assert_eq!(obj.value(), obj.full_value());
                }
            }
        }
    }

    #[test]
    fn below_bound_is_rejected() {
        let mut cfg = SearchConfig::new(types(&[2, 3, 3, 3]));
        cfg.n = Some(17);
        assert!(matches!(sa_search(&cfg), Err(Error::Infeasible(_))));
    }

    #[test]
    fn known_obstruction_needs_force() {
        let mut cfg = SearchConfig::new(types(&[3; 7]));
        cfg.max_iters = 10;
        cfg.restarts = 1;
        assert!(sa_search(&cfg).is_err());
        cfg.force = true;
        assert_eq!(sa_search(&cfg).unwrap().outcome, SearchOutcome::Exhausted);
    }

    #[test]
    fn balanced_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = balanced_start(&types(&[2, 3, 4]), 10, &mut rng);
        let h = column_histograms(&a);
        assert_eq!(h[0], vec![5, 5]);
        assert_eq!(h[1], vec![4, 3, 3]);
        assert_eq!(h[2], vec![3, 3, 2, 2]);
    }

    #[test]
    fn finds_small_binary_dta() {
        let mut cfg = SearchConfig::new(types(&[2, 2, 2, 2]));
        cfg.seed = 3;
        let report = sa_search(&cfg).unwrap();
        assert_eq!(report.outcome, SearchOutcome::Found);
        let a = report.array.unwrap();
        assert_eq!(a.n(), 8);
        assert!(crate::verify::is_detecting(&a, 1, 2).unwrap().holds);
    }
}
