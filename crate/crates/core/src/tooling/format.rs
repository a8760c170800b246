//! Plain-text array documents.
//!
//! ```text
//! DTA 1
//! N=<rows> k=<columns> t=<strength> d=<faults>[ lambda=<index>]
//! types=<v1> <v2> ... <vk>
//! <N lines of k space-separated levels>
//! # factor col=<j> <factor name>
//! # name col=<j> <level>=<level name>
//! ```
//!
//! Columns in the trailing name lines are 1-based. Other `#` lines are
//! treated as comments and dropped.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::array::{MixedArray, TypeVector};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

/// Human-readable names for factors and their levels (0-based keys).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameMap {
    pub factors: BTreeMap<usize, String>,
    pub levels: BTreeMap<(usize, u32), String>,
}

impl NameMap {
    pub fn is_empty(&self) -> bool {
        self.factors.is_empty() && self.levels.is_empty()
    }

    pub fn level(&self, column: usize, level: u32) -> Option<&str> {
        self.levels.get(&(column, level)).map(String::as_str)
    }

    pub fn factor(&self, column: usize) -> Option<&str> {
        self.factors.get(&column).map(String::as_str)
    }

    /// Looks up the level index carrying `name` in `column`.
    pub fn level_by_name(&self, column: usize, name: &str) -> Option<u32> {
        self.levels
            .iter()
            .find(|((c, _), n)| *c == column && n.as_str() == name)
            .map(|((_, l), _)| *l)
    }
}

/// An array together with its declared parameters and optional names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayDocument {
    pub version: u32,
    /// Declared strength; advisory until verified.
    pub t: usize,
    /// Declared number of locatable faults; advisory until verified.
    pub d: usize,
    /// Declared coverage index; advisory until verified.
    pub lambda: Option<usize>,
    pub array: MixedArray,
    pub names: NameMap,
}

impl ArrayDocument {
    pub fn new(array: MixedArray, t: usize, d: usize) -> Self {
        Self {
            version: FORMAT_VERSION,
            t,
            d,
            lambda: None,
            array,
            names: NameMap::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse(text)
    }

    pub fn serialize(&self) -> String {
        serialize(self)
    }

    /// Renders an interaction with factor and level names where known.
    pub fn describe_interaction(&self, interaction: &crate::array::Interaction) -> String {
        let parts: Vec<String> = interaction
            .pins()
            .iter()
            .map(|&(c, l)| {
                let factor = self
                    .names
                    .factor(c)
                    .map_or_else(|| format!("col{}", c + 1), str::to_string);
                let level = self
                    .names
                    .level(c, l)
                    .map_or_else(|| l.to_string(), str::to_string);
                format!("{factor}={level}")
            })
            .collect();
        parts.join(", ")
    }
}

impl FromStr for ArrayDocument {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_kv<T: FromStr>(line: usize, token: &str, key: &str) -> Result<T> {
    let value = token
        .strip_prefix(key)
        .and_then(|s| s.strip_prefix('='))
        .ok_or_else(|| err(line, format!("expected `{key}=<int>`, found `{token}`")))?;
    value
        .parse()
        .map_err(|_| err(line, format!("`{value}` is not a valid value for {key}")))
}

pub fn parse(text: &str) -> Result<ArrayDocument> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (ln, magic) = lines.next().ok_or_else(|| err(1, "empty document"))?;
    let version: u32 = match magic.trim().split_once(' ') {
        Some(("DTA", v)) => v
            .trim()
            .parse()
            .map_err(|_| err(ln, format!("bad version `{v}`")))?,
        _ => return Err(err(ln, "expected `DTA <version>`")),
    };
    if version != FORMAT_VERSION {
        return Err(err(ln, format!("unsupported format version {version}")));
    }

    let (ln, header) = lines.next().ok_or_else(|| err(2, "missing size header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 && fields.len() != 5 {
        return Err(err(ln, "expected `N=<int> k=<int> t=<int> d=<int>`"));
    }
    let n: usize = parse_kv(ln, fields[0], "N")?;
    let k: usize = parse_kv(ln, fields[1], "k")?;
    let t: usize = parse_kv(ln, fields[2], "t")?;
    let d: usize = parse_kv(ln, fields[3], "d")?;
    let lambda = fields
        .get(4)
        .map(|f| parse_kv::<usize>(ln, f, "lambda"))
        .transpose()?;
    if n == 0 || k == 0 {
        return Err(err(ln, "N and k must be positive"));
    }

    let (ln, types_line) = lines.next().ok_or_else(|| err(3, "missing types line"))?;
    let sizes = types_line
        .strip_prefix("types=")
        .ok_or_else(|| err(ln, "expected `types=<v1> ... <vk>`"))?
        .split_whitespace()
        .map(|s| {
            s.parse::<u32>()
                .map_err(|_| err(ln, format!("bad alphabet size `{s}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if sizes.len() != k {
        return Err(err(
            ln,
            format!("{} alphabet sizes for k = {k}", sizes.len()),
        ));
    }
    let types = TypeVector::new(sizes.clone()).map_err(|e| err(ln, e.to_string()))?;

    let mut data = Vec::with_capacity(n * k);
    for r in 0..n {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| err(4 + r, format!("expected {n} rows, found {r}")))?;
        let mut count = 0;
        for (j, tok) in line.split_whitespace().enumerate() {
            let level: u32 = tok
                .parse()
                .map_err(|_| err(ln, format!("bad entry `{tok}`")))?;
            if j >= k {
                return Err(err(ln, format!("row has more than {k} entries")));
            }
            if level >= sizes[j] {
                return Err(err(
                    ln,
                    format!(
                        "entry {level} in column {} is outside 0..{}",
                        j + 1,
                        sizes[j]
                    ),
                ));
            }
            data.push(level);
            count += 1;
        }
        if count != k {
            return Err(err(ln, format!("row has {count} entries, expected {k}")));
        }
    }
    let array = MixedArray::from_flat(types, data).map_err(|e| err(3, e.to_string()))?;

    let mut names = NameMap::default();
    for (ln, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let Some(comment) = line.strip_prefix('#') else {
            return Err(err(ln, format!("unexpected content after {n} rows")));
        };
        let comment = comment.trim_start();
        if let Some(rest) = comment.strip_prefix("factor ") {
            let (col, name) = parse_col(ln, rest, k)?;
            names.factors.insert(col, name.to_string());
        } else if let Some(rest) = comment.strip_prefix("name ") {
            let (col, assignment) = parse_col(ln, rest, k)?;
            let (level, name) = assignment
                .split_once('=')
                .ok_or_else(|| err(ln, "expected `<level>=<name>`"))?;
            let level: u32 = level
                .trim()
                .parse()
                .map_err(|_| err(ln, format!("bad level `{level}`")))?;
            if level >= sizes[col] {
                return Err(err(
                    ln,
                    format!("named level {level} outside column {} alphabet", col + 1),
                ));
            }
            names.levels.insert((col, level), name.to_string());
        }
    }

    Ok(ArrayDocument {
        version,
        t,
        d,
        lambda,
        array,
        names,
    })
}

/// Splits `col=<j> <rest>` into a 0-based column and the remainder.
fn parse_col(ln: usize, text: &str, k: usize) -> Result<(usize, &str)> {
    let (col, rest) = text
        .split_once(' ')
        .ok_or_else(|| err(ln, "expected `col=<j> ...`"))?;
    let col: usize = parse_kv(ln, col, "col")?;
    if col == 0 || col > k {
        return Err(err(ln, format!("column {col} outside 1..={k}")));
    }
    Ok((col - 1, rest))
}

pub fn serialize(doc: &ArrayDocument) -> String {
    let a = &doc.array;
    let mut out = String::new();
    let _ = writeln!(out, "DTA {}", doc.version);
    let _ = write!(out, "N={} k={} t={} d={}", a.n(), a.k(), doc.t, doc.d);
    if let Some(l) = doc.lambda {
        let _ = write!(out, " lambda={l}");
    }
    out.push('\n');
    let sizes: Vec<String> = a.types().sizes().iter().map(u32::to_string).collect();
    let _ = writeln!(out, "types={}", sizes.join(" "));
    out.push_str(&a.to_string());
    for col in 0..a.k() {
        if let Some(f) = doc.names.factor(col) {
            let _ = writeln!(out, "# factor col={} {f}", col + 1);
        }
        for ((_, level), name) in doc.names.levels.range((col, 0)..=(col, u32::MAX)) {
            let _ = writeln!(out, "# name col={} {level}={name}", col + 1);
        }
    }
    out
}
