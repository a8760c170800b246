use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use dta_core::construct::{
    derive_super_simple, insert_expand, kronecker, mca_optimum, oa_bush, oa_sum, replicate_cyclic,
};
use dta_core::tooling::{catalog_document, catalog_get, catalog_ids, export_suite};
use dta_core::verify::{coverage_range, is_detecting_brute_with, is_detecting_with};
use dta_core::{
    check_search_constraints, is_d_extendible, is_super_simple, locate_faults,
    locate_faults_verified, lower_bound, min_rho_check, sa_search, ArrayDocument, Limits,
    LocateResult, MixedArray, OutcomeVector, SearchConfig, SearchOutcome, TypeVector,
};

/// Exit status when a search runs out of budget without finding an array.
const EXHAUSTED: u8 = 2;

#[derive(Parser)]
#[command(
    name = "dta",
    version,
    about = "Generate, verify, compose and apply detecting arrays"
)]
struct Cli {
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Size lower bound (d+1) * (product of the t largest alphabet sizes).
    Bound {
        #[arg(long = "type", value_name = "SIZES")]
        types: String,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        t: usize,
    },
    /// Check a property of an array; exits 1 when it does not hold.
    Verify {
        /// Array file, or `catalog:<id>`.
        array: String,
        /// Number of faults; defaults to the document header.
        #[arg(long)]
        d: Option<usize>,
        /// Strength; defaults to the document header.
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, value_enum, default_value_t = Property::Detecting)]
        property: Property,
        /// Check detection from the definition instead of structurally.
        #[arg(long)]
        brute: bool,
    },
    /// Simulated-annealing search for a bound-meeting (1,2)-detecting array.
    Search {
        #[arg(long = "type", value_name = "SIZES")]
        types: String,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        t: usize,
        /// Row count; defaults to the lower bound.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        max_iters: Option<u64>,
        #[arg(long)]
        restarts: Option<usize>,
        /// Probability of keeping a non-improving move.
        #[arg(long)]
        p: Option<f64>,
        /// Search even when a known necessary condition fails.
        #[arg(long)]
        force: bool,
    },
    /// Build arrays from constructions and compositions.
    Compose {
        #[command(subcommand)]
        op: Compose,
    },
    /// Identify faulty interactions from pass/fail outcomes.
    Locate {
        array: String,
        /// One `P` or `F` per line.
        outcomes: String,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        /// Skip checking that the array is detecting.
        #[arg(long)]
        no_verify: bool,
    },
    /// Reference arrays and search targets.
    Catalog {
        #[command(subcommand)]
        op: CatalogOp,
    },
    /// Render an array as a CSV test plan.
    Export {
        array: String,
        /// Print level indices instead of names.
        #[arg(long)]
        numeric: bool,
    },
}

#[derive(Subcommand)]
enum Compose {
    /// Kronecker product of two arrays with the same number of columns.
    Kron { a: String, b: String },
    /// Optimum index-1 mixed covering array with k = t+1.
    Sumcol {
        #[arg(long)]
        t: usize,
        #[arg(long = "type", value_name = "SIZES")]
        types: String,
    },
    /// Widen one column of A by E levels using the strength-(t-1) array B.
    Insert {
        a: String,
        b: String,
        /// 1-based column to widen.
        #[arg(long)]
        col: usize,
        #[arg(long, default_value_t = 1)]
        e: u32,
    },
    /// Stack D cyclically shifted copies of an index-1 array with k = t+1.
    Replicate {
        a: String,
        #[arg(long)]
        d: usize,
    },
    /// Index-1 orthogonal array: Bush over prime Q, or the sum construction.
    Oa {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        q: u32,
        /// Use the sum construction OA(t, t+1, q) instead.
        #[arg(long)]
        sum: bool,
    },
    /// Super-simple index-LAMBDA array from an index-1 orthogonal array.
    DeriveSs {
        a: String,
        #[arg(long)]
        lambda: u32,
    },
}

#[derive(Subcommand)]
enum CatalogOp {
    List,
    Show { id: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    Detecting,
    SuperSimple,
    Extendible,
    Coverage,
    MinRho,
    Constraints,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load(source: &str) -> Result<ArrayDocument> {
    if let Some(id) = source.strip_prefix("catalog:") {
        return Ok(catalog_document(id)?);
    }
    let text =
        fs::read_to_string(Path::new(source)).with_context(|| format!("reading {source}"))?;
    ArrayDocument::parse(&text).with_context(|| format!("parsing {source}"))
}

fn parse_types(text: &str) -> Result<TypeVector> {
    TypeVector::parse(text).with_context(|| format!("bad type `{text}`"))
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn emit_document(doc: &ArrayDocument, as_json: bool) -> Result<()> {
    if as_json {
        print_json(&json!({
            "n": doc.array.n(),
            "k": doc.array.k(),
            "t": doc.t,
            "d": doc.d,
            "lambda": doc.lambda,
            "types": doc.array.types().sizes(),
            "rows": doc.array,
        }))
    } else {
        print!("{}", doc.serialize());
        Ok(())
    }
}

fn document(array: MixedArray, t: usize, d: usize, lambda: Option<usize>) -> ArrayDocument {
    let mut doc = ArrayDocument::new(array, t, d);
    doc.lambda = lambda;
    doc
}

fn run(cli: Cli) -> Result<u8> {
    let as_json = cli.json;
    match cli.command {
        Command::Bound { types, d, t } => {
            let types = parse_types(&types)?;
            let bound = lower_bound(d, t, &types)?;
            if as_json {
                print_json(&json!({ "d": d, "t": t, "types": types.sizes(), "bound": bound }))?;
            } else {
                println!("{bound}");
            }
            Ok(0)
        }
        Command::Verify {
            array,
            d,
            t,
            property,
            brute,
        } => {
            let doc = load(&array)?;
            let d = d.unwrap_or(doc.d);
            let t = t.unwrap_or(doc.t);
            verify(&doc.array, d, t, property, brute, as_json)
        }
        Command::Search {
            types,
            d,
            t,
            n,
            max_iters,
            restarts,
            p,
            force,
        } => {
            if (d, t) != (1, 2) {
                bail!(
                    "search only generates (1,2)-detecting arrays; use `compose` for other (d,t)"
                );
            }
            let mut cfg = SearchConfig::new(parse_types(&types)?);
            cfg.n = n;
            cfg.seed = cli.seed;
            cfg.force = force;
            if let Some(m) = max_iters {
                cfg.max_iters = m;
            }
            if let Some(r) = restarts {
                cfg.restarts = r;
            }
            if let Some(p) = p {
                cfg.accept_prob = p;
            }
            let report = sa_search(&cfg)?;
            if as_json {
                print_json(&report)?;
            } else {
                for c in &report.chains {
                    eprintln!(
                        "chain seed={} initial={} best={} final={} iterations={} accepted={}",
                        c.seed,
                        c.initial_objective,
                        c.best_objective,
                        c.final_objective,
                        c.iterations,
                        c.accepted
                    );
                }
                eprintln!(
                    "{:?} after {:.3}s",
                    report.outcome,
                    report.elapsed.as_secs_f64()
                );
                if let Some(a) = &report.array {
                    emit_document(&document(a.clone(), 2, 1, None), false)?;
                }
            }
            Ok(match report.outcome {
                SearchOutcome::Found => 0,
                SearchOutcome::Exhausted => EXHAUSTED,
            })
        }
        Command::Compose { op } => {
            let doc = compose(op)?;
            emit_document(&doc, as_json)?;
            Ok(0)
        }
        Command::Locate {
            array,
            outcomes,
            d,
            t,
            no_verify,
        } => {
            let doc = load(&array)?;
            let d = d.unwrap_or(doc.d);
            let t = t.unwrap_or(doc.t);
            let text =
                fs::read_to_string(&outcomes).with_context(|| format!("reading {outcomes}"))?;
            let y: OutcomeVector = text
                .parse()
                .with_context(|| format!("parsing {outcomes}"))?;
            let result = if no_verify {
                locate_faults(&doc.array, d, t, &y)?
            } else {
                locate_faults_verified(&doc.array, d, t, &y)?
            };
            report_location(&doc, &result, as_json)?;
            Ok(0)
        }
        Command::Catalog { op } => {
            match op {
                CatalogOp::List => {
                    let entries = catalog_ids()
                        .into_iter()
                        .map(catalog_get)
                        .collect::<dta_core::Result<Vec<_>>>()?;
                    if as_json {
                        print_json(&entries)?;
                    } else {
                        for e in entries {
                            println!("{:<16} {}", e.id, e.provenance);
                        }
                    }
                }
                CatalogOp::Show { id } => {
                    let entry = catalog_get(&id)?;
                    match entry.document() {
                        Some(doc) => emit_document(doc, as_json)?,
                        None if as_json => print_json(&entry)?,
                        None => {
                            if let dta_core::tooling::CatalogContent::Targets { targets } =
                                &entry.content
                            {
                                for target in targets {
                                    println!("{target}");
                                }
                            }
                        }
                    }
                }
            }
            Ok(0)
        }
        Command::Export { array, numeric } => {
            let doc = load(&array)?;
            print!("{}", export_suite(&doc, &doc.names, numeric)?);
            Ok(0)
        }
    }
}

fn verify(
    array: &MixedArray,
    d: usize,
    t: usize,
    property: Property,
    brute: bool,
    as_json: bool,
) -> Result<u8> {
    let limits = Limits::from_env();
    let report = match property {
        Property::Detecting if brute => is_detecting_brute_with(array, d, t, &limits)?,
        Property::Detecting => is_detecting_with(array, d, t, &limits)?,
        Property::SuperSimple => is_super_simple(array, t)?,
        Property::Extendible => is_d_extendible(array, t, d)?,
        Property::MinRho => min_rho_check(array, d, t)?,
        Property::Coverage => {
            let (min, max) = coverage_range(array, t)?;
            if as_json {
                print_json(&json!({ "t": t, "min": min, "max": max }))?;
            } else {
                println!("coverage at strength {t}: min {min}, max {max}");
            }
            return Ok(0);
        }
        Property::Constraints => {
            let verdict = check_search_constraints(array.types(), d, t);
            if as_json {
                print_json(&verdict)?;
            } else {
                println!("{verdict}");
            }
            return Ok(if verdict.is_reject() { 1 } else { 0 });
        }
    };
    if as_json {
        print_json(&report)?;
    } else {
        println!("{report}");
    }
    Ok(if report.holds { 0 } else { 1 })
}

fn load_array(path: &str) -> Result<MixedArray> {
    Ok(load(path)?.array)
}

fn compose(op: Compose) -> Result<ArrayDocument> {
    Ok(match op {
        Compose::Kron { a, b } => {
            let (a, b) = (load(&a)?, load(&b)?);
            let c = kronecker(&a.array, &b.array)?;
            document(c, a.t, (a.d + 1) * (b.d + 1) - 1, None)
        }
        Compose::Sumcol { t, types } => {
            document(mca_optimum(t, &parse_types(&types)?)?, t, 0, Some(1))
        }
        Compose::Insert { a, b, col, e } => {
            if col == 0 {
                bail!("columns are numbered from 1");
            }
            let a = load(&a)?;
            let out = insert_expand(&a.array, &load_array(&b)?, col - 1, e)?;
            document(out, a.t, 0, None)
        }
        Compose::Replicate { a, d } => {
            let a = load_array(&a)?;
            let t = a.k().saturating_sub(1);
            let out = replicate_cyclic(&a, d)?;
            document(out, t, d.saturating_sub(1), Some(d))
        }
        Compose::Oa { t, q, sum } => {
            let out = if sum { oa_sum(t, q)? } else { oa_bush(t, q)? };
            document(out, t, 0, Some(1))
        }
        Compose::DeriveSs { a, lambda } => {
            let a = load(&a)?;
            let out = derive_super_simple(&a.array, lambda)?;
            let t = a.t.saturating_sub(1).max(1);
            document(out, t, lambda as usize - 1, Some(lambda as usize))
        }
    })
}

fn report_location(doc: &ArrayDocument, result: &LocateResult, as_json: bool) -> Result<()> {
    if as_json {
        let mut value = serde_json::to_value(result)?;
        if let LocateResult::Identified { faults } = result {
            value["described"] = json!(faults
                .iter()
                .map(|f| doc.describe_interaction(f))
                .collect::<Vec<_>>());
        }
        return print_json(&value);
    }
    match result {
        LocateResult::Identified { faults } if faults.is_empty() => {
            println!("identified: no faulty interactions");
        }
        LocateResult::Identified { faults } => {
            println!("identified {} faulty interaction(s):", faults.len());
            for f in faults {
                println!("  {f}  {}", doc.describe_interaction(f));
            }
        }
        LocateResult::TooManyFaults { candidates } => {
            println!("more faults than the array can locate ({candidates} candidate interactions)");
        }
        LocateResult::Inconsistent { unexplained } => {
            println!("inconsistent outcomes: failing rows {unexplained} are not explained");
        }
    }
    Ok(())
}
