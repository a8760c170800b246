//! Array and interaction data model.
//!
//! Levels of column `j` are the integers `0..v_j`. Columns keep the order
//! they were given in; nothing here assumes nondecreasing alphabet sizes.
//! Row and column indices are 0-based in the API; [`RowSet`] and
//! [`Interaction`] render 1-based when displayed.

use std::fmt;

use itertools::Itertools;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};

/// Per-column alphabet sizes `(v_1, ..., v_k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TypeVector(Vec<u32>);

impl TypeVector {
    /// Builds a type vector. Sizes of 1 are accepted here; feasibility
    /// checks for detecting arrays reject them later.
    pub fn new(sizes: Vec<u32>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidTypes(
                "at least one column is required".into(),
            ));
        }
        if let Some(j) = sizes.iter().position(|&v| v == 0) {
            return Err(Error::InvalidTypes(format!(
                "column {} has an empty alphabet",
                j + 1
            )));
        }
        Ok(Self(sizes))
    }

    /// Parses `2,3,3,3` or `2 3 3 3`. Exponent shorthand `2^1,3^3` is also accepted.
    pub fn parse(text: &str) -> Result<Self> {
        let mut sizes = Vec::new();
        for tok in text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
        {
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => (b, e),
                None => (tok, "1"),
            };
            let base: u32 = base
                .parse()
                .map_err(|_| Error::InvalidTypes(format!("bad alphabet size `{tok}`")))?;
            let exp: usize = exp
                .parse()
                .map_err(|_| Error::InvalidTypes(format!("bad exponent in `{tok}`")))?;
            sizes.extend(std::iter::repeat_n(base, exp));
        }
        Self::new(sizes)
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn sizes(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self, column: usize) -> u32 {
        self.0[column]
    }

    pub fn min(&self) -> u32 {
        *self.0.iter().min().expect("non-empty")
    }

    /// Sizes sorted nondecreasing.
    pub fn sorted(&self) -> Vec<u32> {
        let mut s = self.0.clone();
        s.sort_unstable();
        s
    }

    /// Product of the `t` largest alphabet sizes.
    pub fn top_product(&self, t: usize) -> u128 {
        self.sorted()
            .iter()
            .rev()
            .take(t)
            .map(|&v| u128::from(v))
            .product()
    }

    /// Product of the sizes of the given columns.
    pub fn product_of(&self, columns: &[usize]) -> usize {
        columns.iter().map(|&c| self.0[c] as usize).product()
    }

    /// Rejects alphabets smaller than 2.
    pub fn require_nontrivial(&self) -> Result<()> {
        match self.0.iter().position(|&v| v < 2) {
            Some(j) => Err(Error::Infeasible(format!(
                "column {} has alphabet size {}; every alphabet needs at least 2 levels",
                j + 1,
                self.0[j]
            ))),
            None => Ok(()),
        }
    }

    pub(crate) fn check_level(&self, column: usize, level: u32) -> Result<()> {
        if column >= self.k() {
            return Err(Error::ColumnOutOfRange {
                column: column + 1,
                k: self.k(),
            });
        }
        if level >= self.0[column] {
            return Err(Error::LevelOutOfRange {
                column: column + 1,
                level,
                size: self.0[column],
            });
        }
        Ok(())
    }

    /// Number of t-way interactions over these columns.
    pub fn interaction_count(&self, t: usize) -> u128 {
        (0..self.k())
            .combinations(t)
            .map(|cols| {
                cols.iter()
                    .map(|&c| u128::from(self.0[c]))
                    .product::<u128>()
            })
            .sum()
    }
}

impl fmt::Display for TypeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(","))
    }
}

/// An `N x k` matrix of levels, column `j` drawn from `0..v_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MixedArray {
    types: TypeVector,
    n: usize,
    data: Vec<u32>,
}

impl MixedArray {
    pub fn new(types: TypeVector, rows: Vec<Vec<u32>>) -> Result<Self> {
        let k = types.k();
        let mut data = Vec::with_capacity(rows.len() * k);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidShape(format!(
                    "row {} has {} entries, expected {}",
                    r + 1,
                    row.len(),
                    k
                )));
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(types, data)
    }

    /// Builds from row-major storage.
    pub fn from_flat(types: TypeVector, data: Vec<u32>) -> Result<Self> {
        let k = types.k();
        if data.is_empty() || !data.len().is_multiple_of(k) {
            return Err(Error::InvalidShape(format!(
                "{} entries do not form a non-empty array with {} columns",
                data.len(),
                k
            )));
        }
        for (i, &level) in data.iter().enumerate() {
            let column = i % k;
            if level >= types.size(column) {
                return Err(Error::LevelOutOfRange {
                    column: column + 1,
                    level,
                    size: types.size(column),
                });
            }
        }
        let n = data.len() / k;
        Ok(Self { types, n, data })
    }

    /// Every combination of levels once, last column varying fastest.
    pub fn full_factorial(types: TypeVector) -> Self {
        let k = types.k();
        let rows = types.product_of(&(0..k).collect::<Vec<_>>());
        let mut data = Vec::with_capacity(rows * k);
        for idx in 0..rows {
            let mut rest = idx;
            let start = data.len();
            data.resize(start + k, 0);
            for j in (0..k).rev() {
                let v = types.size(j) as usize;
                data[start + j] = (rest % v) as u32;
                rest /= v;
            }
        }
        Self {
            types,
            n: rows,
            data,
        }
    }

    pub fn types(&self) -> &TypeVector {
        &self.types
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.types.k()
    }

    pub fn get(&self, row: usize, column: usize) -> u32 {
        self.data[row * self.k() + column]
    }

    pub(crate) fn set(&mut self, row: usize, column: usize, level: u32) {
        let k = self.k();
        self.data[row * k + column] = level;
    }

    pub(crate) fn swap_in_column(&mut self, column: usize, r1: usize, r2: usize) {
        let k = self.k();
        self.data.swap(r1 * k + column, r2 * k + column);
    }

    pub fn row(&self, row: usize) -> &[u32] {
        let k = self.k();
        &self.data[row * k..(row + 1) * k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks_exact(self.k())
    }

    pub fn column(&self, column: usize) -> impl Iterator<Item = u32> + '_ {
        self.rows().map(move |r| r[column])
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.rows().map(<[u32]>::to_vec).collect()
    }

    /// Concatenates the rows of `other` below `self`. Types must match.
    pub fn stack(&self, other: &MixedArray) -> Result<MixedArray> {
        if self.types != other.types {
            return Err(Error::InvalidShape(format!(
                "cannot stack arrays of types {} and {}",
                self.types, other.types
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            types: self.types.clone(),
            n: self.n + other.n,
            data,
        })
    }

    /// Mixed-radix index of the levels a row takes on `columns`.
    pub(crate) fn tuple_index(&self, row: usize, columns: &[usize]) -> usize {
        let r = self.row(row);
        columns.iter().fold(0usize, |acc, &c| {
            acc * self.types.size(c) as usize + r[c] as usize
        })
    }

    /// One row set per level tuple on `columns`, indexed by mixed radix.
    pub(crate) fn row_sets_on(&self, columns: &[usize]) -> Vec<RowSet> {
        let mut sets = vec![RowSet::empty(self.n); self.types.product_of(columns)];
        for r in 0..self.n {
            sets[self.tuple_index(r, columns)].insert(r);
        }
        sets
    }

    /// Cover counts per level tuple on `columns`, indexed by mixed radix.
    pub(crate) fn counts_on(&self, columns: &[usize]) -> Vec<u32> {
        let mut counts = vec![0u32; self.types.product_of(columns)];
        for r in 0..self.n {
            counts[self.tuple_index(r, columns)] += 1;
        }
        counts
    }
}

impl fmt::Display for MixedArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            writeln!(f, "{}", row.iter().join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for MixedArray {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.rows())
    }
}

/// A t-way interaction: levels pinned on `t` distinct columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interaction {
    pins: Vec<(usize, u32)>,
}

impl Interaction {
    /// Pins are sorted by column; repeated columns are rejected.
    pub fn new(mut pins: Vec<(usize, u32)>) -> Result<Self> {
        if pins.is_empty() {
            return Err(Error::InvalidStrength {
                t: 0,
                constraint: "an interaction pins at least one column".into(),
            });
        }
        pins.sort_unstable();
        if let Some(w) = pins.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateColumn { column: w[0].0 + 1 });
        }
        Ok(Self { pins })
    }

    pub(crate) fn from_parts(columns: &[usize], levels: &[u32]) -> Self {
        Self {
            pins: columns
                .iter()
                .copied()
                .zip(levels.iter().copied())
                .collect(),
        }
    }

    pub fn strength(&self) -> usize {
        self.pins.len()
    }

    pub fn pins(&self) -> &[(usize, u32)] {
        &self.pins
    }

    pub fn columns(&self) -> Vec<usize> {
        self.pins.iter().map(|p| p.0).collect()
    }

    pub fn levels(&self) -> Vec<u32> {
        self.pins.iter().map(|p| p.1).collect()
    }

    pub fn pins_column(&self, column: usize) -> bool {
        self.pins.iter().any(|p| p.0 == column)
    }

    pub fn validate(&self, types: &TypeVector) -> Result<()> {
        self.pins
            .iter()
            .try_for_each(|&(c, l)| types.check_level(c, l))
    }

    pub fn covers(&self, row: &[u32]) -> bool {
        self.pins.iter().all(|&(c, l)| row[c] == l)
    }

    /// The interaction with one more pinned column.
    pub fn extend(&self, column: usize, level: u32) -> Result<Self> {
        let mut pins = self.pins.clone();
        pins.push((column, level));
        Self::new(pins)
    }

    /// Parses `1=0,3=2` (1-based columns).
    pub fn parse(text: &str) -> Result<Self> {
        let mut pins = Vec::new();
        for tok in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (c, l) = tok
                .split_once('=')
                .ok_or_else(|| Error::InvalidShape(format!("expected col=level, got `{tok}`")))?;
            let c: usize = c
                .trim()
                .parse()
                .map_err(|_| Error::InvalidShape(format!("bad column in `{tok}`")))?;
            let l: u32 = l
                .trim()
                .parse()
                .map_err(|_| Error::InvalidShape(format!("bad level in `{tok}`")))?;
            if c == 0 {
                return Err(Error::ColumnOutOfRange { column: 0, k: 0 });
            }
            pins.push((c - 1, l));
        }
        Self::new(pins)
    }
}

impl fmt::Display for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{{}}}",
            self.pins
                .iter()
                .map(|(c, l)| format!("({},{})", c + 1, l))
                .join(",")
        )
    }
}

impl Serialize for Interaction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.pins.len()))?;
        for &(c, l) in &self.pins {
            seq.serialize_element(&(c + 1, l))?;
        }
        seq.end()
    }
}

/// A set of row indices of one array, stored as a bitset over `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RowSet {
    n: usize,
    words: Vec<u64>,
}

impl RowSet {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        (0..n).for_each(|r| s.insert(r));
        s
    }

    pub fn from_rows(n: usize, rows: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        rows.into_iter().for_each(|r| s.insert(r));
        s
    }

    /// Capacity: the row count of the underlying array.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, row: usize) {
        debug_assert!(row < self.n);
        self.words[row / 64] |= 1 << (row % 64);
    }

    pub fn contains(&self, row: usize) -> bool {
        row < self.n && self.words[row / 64] >> (row % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &RowSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &RowSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn union_with(&mut self, other: &RowSet) {
        self.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a |= b);
    }

    pub fn intersection(&self, other: &RowSet) -> RowSet {
        RowSet {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn difference(&self, other: &RowSet) -> RowSet {
        RowSet {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    /// Lowest row index in the set.
    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    /// Ascending 0-based row indices.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&r| self.contains(r))
    }

    /// Ascending 1-based row numbers, as shown to users.
    pub fn one_based(&self) -> Vec<usize> {
        self.iter().map(|r| r + 1).collect()
    }
}

impl fmt::Debug for RowSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RowSet{:?}", self.one_based())
    }
}

impl fmt::Display for RowSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.one_based().iter().join(","))
    }
}

impl Serialize for RowSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.one_based())
    }
}

/// All t-subsets of `0..k` in lexicographic order.
pub fn column_sets(k: usize, t: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..k).combinations(t)
}

/// Decodes a mixed-radix tuple index into levels (last column fastest).
pub(crate) fn decode_levels(types: &TypeVector, columns: &[usize], mut index: usize) -> Vec<u32> {
    let mut levels = vec![0u32; columns.len()];
    for (slot, &c) in columns.iter().enumerate().rev() {
        let v = types.size(c) as usize;
        levels[slot] = (index % v) as u32;
        index /= v;
    }
    levels
}

/// Every t-way interaction over `types`, column sets in lexicographic
/// order and levels varying fastest in the last pinned column.
pub fn interactions(types: &TypeVector, t: usize) -> Vec<Interaction> {
    let mut out = Vec::new();
    for columns in column_sets(types.k(), t) {
        for idx in 0..types.product_of(&columns) {
            out.push(Interaction::from_parts(
                &columns,
                &decode_levels(types, &columns, idx),
            ));
        }
    }
    out
}

pub(crate) fn check_strength(t: usize, k: usize) -> Result<()> {
    if t == 0 || t > k {
        return Err(Error::InvalidStrength {
            t,
            constraint: format!("1 <= t <= k = {k}"),
        });
    }
    Ok(())
}

/// Rows of `array` covering `interaction`.
pub fn rho(array: &MixedArray, interaction: &Interaction) -> Result<RowSet> {
    interaction.validate(array.types())?;
    Ok(RowSet::from_rows(
        array.n(),
        (0..array.n()).filter(|&r| interaction.covers(array.row(r))),
    ))
}

/// Union of the row sets of `interactions`; empty for an empty collection.
pub fn rho_union<'a>(
    array: &MixedArray,
    interactions: impl IntoIterator<Item = &'a Interaction>,
) -> Result<RowSet> {
    let mut acc = RowSet::empty(array.n());
    for t in interactions {
        acc.union_with(&rho(array, t)?);
    }
    Ok(acc)
}

/// All interactions obtained by pinning one more column of `interaction`,
/// ordered by the new column, then its level.
pub fn extensions(array: &MixedArray, interaction: &Interaction) -> Result<Vec<Interaction>> {
    interaction.validate(array.types())?;
    let k = array.k();
    if interaction.strength() >= k {
        return Err(Error::InvalidStrength {
            t: interaction.strength(),
            constraint: format!("t < k = {k} for an extension to exist"),
        });
    }
    let mut out = Vec::new();
    for column in (0..k).filter(|&c| !interaction.pins_column(c)) {
        for level in 0..array.types().size(column) {
            out.push(interaction.extend(column, level)?);
        }
    }
    Ok(out)
}
