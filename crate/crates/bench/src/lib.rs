//! Fixtures shared by the benchmarks.

use dta_core::tooling::catalog_document;
use dta_core::{MixedArray, TypeVector};

pub fn catalog_array(id: &str) -> MixedArray {
    catalog_document(id)
        .unwrap_or_else(|e| panic!("catalog entry {id}: {e}"))
        .array
}

pub fn types(sizes: &[u32]) -> TypeVector {
    TypeVector::new(sizes.to_vec()).expect("valid sizes")
}
