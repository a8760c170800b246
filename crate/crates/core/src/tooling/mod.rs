//! Serialization, the reference catalog and test-plan export.

pub mod catalog;
pub mod export;
pub mod format;

pub use catalog::{
    catalog_document, catalog_get, catalog_ids, search_targets, CatalogContent, CatalogEntry,
    SearchTarget,
};
pub use export::export_suite;
pub use format::{parse, serialize, ArrayDocument, NameMap, FORMAT_VERSION};
