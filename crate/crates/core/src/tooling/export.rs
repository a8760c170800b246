//! Rendering an array as a readable test plan.

use crate::error::{Error, Result};
use crate::tooling::format::{ArrayDocument, NameMap};

/// Writes one CSV record per test, headed by the factor names.
///
/// With `numeric` set, raw level indices are written and `names` is only
/// used for the header. Otherwise every level of every column must have a
/// name. Factors without a name are headed `F<j>`.
pub fn export_suite(doc: &ArrayDocument, names: &NameMap, numeric: bool) -> Result<String> {
    let a = &doc.array;
    if !numeric {
        let missing: Vec<String> = (0..a.k())
            .flat_map(|c| (0..a.types().size(c)).map(move |l| (c, l)))
            .filter(|&(c, l)| names.level(c, l).is_none())
            .map(|(c, l)| format!("col={} level={l}", c + 1))
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingNames(missing.join(", ")));
        }
    }
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let header: Vec<String> = (0..a.k())
        .map(|c| {
            names
                .factor(c)
                .map_or_else(|| format!("F{}", c + 1), str::to_string)
        })
        .collect();
    let io = |e: csv::Error| Error::InvalidShape(format!("csv: {e}"));
    writer.write_record(&header).map_err(io)?;
    for row in a.rows() {
        let record: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, &l)| {
                if numeric {
                    l.to_string()
                } else {
                    names.level(c, l).expect("checked above").to_string()
                }
            })
            .collect();
        writer.write_record(&record).map_err(io)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::InvalidShape(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
