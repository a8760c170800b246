//! Shipped reference arrays and search targets.
//!
//! Every array entry is checked against its declared `(d, t)` the first
//! time the catalog is touched; an entry that fails is never handed out.

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::array::TypeVector;
use crate::error::{Error, Result};
use crate::tooling::format::ArrayDocument;
use crate::verify::{is_detecting, VerifyReport};

const TABLE1: &str = include_str!("../../data/table1.dta");
const EXAMPLE34: &str = include_str!("../../data/example34.dta");

/// A family of bound-meeting (1,2)-detecting array types `fixed + extra^a`
/// found by search, with the largest `a` reported.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchTarget {
    pub n: usize,
    /// Alphabet size repeated `a` times.
    pub repeated: u32,
    /// Other columns as `(size, multiplicity)`.
    pub fixed: Vec<(u32, u32)>,
    pub max_a: u32,
}

impl SearchTarget {
    /// Type vector for a given `a`, sizes nondecreasing.
    pub fn types(&self, a: u32) -> TypeVector {
        let mut sizes: Vec<u32> = std::iter::repeat_n(self.repeated, a as usize).collect();
        for &(v, m) in &self.fixed {
            sizes.extend(std::iter::repeat_n(v, m as usize));
        }
        sizes.sort_unstable();
        TypeVector::new(sizes).expect("non-empty")
    }
}

impl fmt::Display for SearchTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![(self.repeated, "a".to_string())];
        parts.extend(self.fixed.iter().map(|&(v, m)| (v, m.to_string())));
        parts.sort();
        let levels: Vec<String> = parts.iter().map(|(v, e)| format!("{v}^{e}")).collect();
        write!(
            f,
            "N={} levels {} for a <= {}",
            self.n,
            levels.join(" "),
            self.max_a
        )
    }
}

fn target(n: usize, repeated: u32, fixed: &[(u32, u32)], max_a: u32) -> SearchTarget {
    SearchTarget {
        n,
        repeated,
        fixed: fixed.to_vec(),
        max_a,
    }
}

/// Bound-meeting (1,2)-detecting arrays with at most 30 rows reported as
/// found by annealing.
pub fn search_targets() -> Vec<SearchTarget> {
    vec![
        target(8, 2, &[], 4),
        target(12, 2, &[(3, 1)], 3),
        target(16, 2, &[(4, 1)], 3),
        target(18, 3, &[(2, 1)], 3),
        target(18, 2, &[(3, 2)], 4),
        target(18, 3, &[], 6),
        target(20, 2, &[(5, 1)], 3),
        target(24, 2, &[(6, 1)], 3),
        target(24, 2, &[(3, 2), (4, 1)], 1),
        target(24, 2, &[(3, 1), (4, 1)], 4),
        target(24, 3, &[(4, 1)], 5),
        target(28, 2, &[(7, 1)], 3),
        target(30, 2, &[(3, 3), (5, 1)], 1),
        target(30, 2, &[(3, 1), (5, 1)], 4),
        target(30, 3, &[(5, 1)], 5),
    ]
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CatalogContent {
    Array {
        #[serde(skip)]
        document: Box<ArrayDocument>,
        verification: VerifyReport,
    },
    Targets {
        targets: Vec<SearchTarget>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub provenance: &'static str,
    pub content: CatalogContent,
}

impl CatalogEntry {
    pub fn document(&self) -> Option<&ArrayDocument> {
        match &self.content {
            CatalogContent::Array { document, .. } => Some(document),
            CatalogContent::Targets { .. } => None,
        }
    }
}

struct Source {
    id: &'static str,
    provenance: &'static str,
    text: Option<&'static str>,
}

const SOURCES: &[Source] = &[
    Source {
        id: "table1",
        provenance: "PMx/StarMAIL copy-function test plan: (1,2)-DTA(18; 4, (2^1 3^3)), tests in their original order",
        text: Some(TABLE1),
    },
    Source {
        id: "example34",
        provenance: "optimum (2,2)-DTA(48; 5, (3^3 4^2)) that is not super-simple; runs are the columns of two factor-major 5x24 matrices, first then second",
        text: Some(EXAMPLE34),
    },
    Source {
        id: "table2-targets",
        provenance: "bound-meeting (1,2)-DTA types with N <= 30 reachable by simulated annealing",
        text: None,
    },
];

fn build(source: &Source) -> Result<CatalogEntry> {
    let content = match source.text {
        None => CatalogContent::Targets {
            targets: search_targets(),
        },
        Some(text) => {
            let document = Box::new(ArrayDocument::parse(text)?);
            let verification = is_detecting(&document.array, document.d, document.t)?;
            if !verification.holds {
                return Err(Error::CatalogVerification {
                    id: source.id.into(),
                    reason: verification.to_string(),
                });
            }
            CatalogContent::Array {
                document,
                verification,
            }
        }
    };
    Ok(CatalogEntry {
        id: source.id,
        provenance: source.provenance,
        content,
    })
}

fn entries() -> &'static [Result<CatalogEntry>] {
    static CATALOG: OnceLock<Vec<Result<CatalogEntry>>> = OnceLock::new();
    CATALOG.get_or_init(|| SOURCES.iter().map(build).collect())
}

/// Identifiers of all entries.
pub fn catalog_ids() -> Vec<&'static str> {
    SOURCES.iter().map(|s| s.id).collect()
}

/// A verified catalog entry.
pub fn catalog_get(id: &str) -> Result<CatalogEntry> {
    let idx = SOURCES
        .iter()
        .position(|s| s.id == id)
        .ok_or_else(|| Error::UnknownCatalogEntry(id.into()))?;
    entries()[idx].clone()
}

/// The document of an array entry.
pub fn catalog_document(id: &str) -> Result<ArrayDocument> {
    catalog_get(id)?
        .document()
        .cloned()
        .ok_or_else(|| Error::Precondition(format!("catalog entry `{id}` is not an array")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_verifies() {
        for id in catalog_ids() {
            catalog_get(id).unwrap_or_else(|e| panic!("{id}: {e}"));
        }
    }

    #[test]
    fn unknown_id() {
        assert!(matches!(
            catalog_get("nope"),
            Err(Error::UnknownCatalogEntry(_))
        ));
    }

    #[test]
    fn targets_meet_bound() {
        for t in search_targets() {
            let ty = t.types(t.max_a);
            assert_eq!(
                crate::verify::lower_bound(1, 2, &ty).unwrap(),
                t.n as u128,
                "{t}"
            );
        }
        assert_eq!(search_targets().len(), 15);
    }
}
