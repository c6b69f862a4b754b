//! `markoff`: command-line front end for markoff-core.
//!
//! Exit codes: 0 on success, 2 on usage errors (including inputs outside a
//! command's domain), 3 on computational errors.

mod record;
mod stats;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use markoff_core::classify::{classify_with, is_admissible, is_exceptional, ClassifyOptions};
use markoff_core::local::{delta_truncated, to_f64};
use markoff_core::oracle::{default_bound, orbit_decompose};
use markoff_core::scan::{
    census_with, chunk_bounds, chunk_count, default_sample_points, family_generators, family_members_below, level_rows,
    CensusAggregate, CensusOptions, CensusRun, Family, LevelRow, SeriesPoint, DEFAULT_CHUNK_WIDTH,
};
use markoff_core::{class_number, evaluate, reduce, ClassNumber, MarkoffError, Triple};

use record::*;

#[derive(Parser)]
#[command(name = "markoff", version, about = "Integral points on the Markoff surfaces x1^2+x2^2+x3^2-x1x2x3 = k")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum TextFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verdict, class number and fundamental representatives of one level.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Largest a listed for the (2,a,a) representatives at k = 4.
        #[arg(long)]
        cayley_bound: Option<u64>,
    },
    /// Descend a point to its fundamental representative.
    Reduce {
        /// Coordinates as x,y,z.
        #[arg(long, allow_hyphen_values = true)]
        point: Triple,
        #[arg(long, value_enum, default_value = "text")]
        format: TextFormat,
    },
    /// Census over [kmin, kmax]: per-level CSV plus an aggregate JSON.
    Scan {
        #[arg(long, default_value_t = 1)]
        kmin: u64,
        #[arg(long)]
        kmax: u64,
        /// Per-level CSV (k,verdict,h,hasse_failure).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Aggregate JSON; printed to stdout when absent.
        #[arg(long)]
        aggregate: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Continue from --checkpoint if it exists.
        #[arg(long, requires = "checkpoint")]
        resume: bool,
        /// Worker threads; defaults to the number of cores.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_CHUNK_WIDTH)]
        chunk: u64,
        /// Stop after this many new chunks (the checkpoint keeps the progress).
        #[arg(long)]
        max_chunks: Option<u64>,
    },
    /// Local densities delta_p(k) for p <= pmax and their product.
    Density {
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[arg(long, default_value_t = 13)]
        pmax: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Members of the Hasse-failure families.
    Families {
        /// hf1, hf1-plus, hf1-minus, hf1-ell, f12 or f20
        #[arg(long)]
        which: Family,
        #[arg(long, default_value_t = 10)]
        limit: usize,
        /// Only members with |k| <= kmax.
        #[arg(long)]
        kmax: Option<u64>,
    },
    /// Table-style summaries from a scan CSV.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Brute-force orbit decomposition in a box, checked against the class number.
    Oracle {
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        /// Box half-width; defaults to one covering both fundamental boxes.
        #[arg(long)]
        bound: Option<u64>,
    },
}

enum Failure {
    Usage(anyhow::Error),
    Compute(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<MarkoffError>() {
            Some(m) if is_domain_error(m) => Failure::Usage(e),
            _ => Failure::Compute(e),
        }
    }
}

impl From<MarkoffError> for Failure {
    fn from(e: MarkoffError) -> Self {
        anyhow::Error::from(e).into()
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Compute(e.into())
    }
}

/// Inputs the command cannot accept, as opposed to failures while computing.
fn is_domain_error(e: &MarkoffError) -> bool {
    use MarkoffError::*;
    matches!(
        e,
        LevelOutOfRange(_)
            | CayleyUnbounded
            | ModulusTooLarge(_)
            | InvalidPrime(_)
            | UnsupportedLevel(_)
            | DegeneratePair(..)
            | BoundTooLarge(_)
            | ConfigViolation(_)
            | NotOnCayleyShiftedSurface
    )
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(anyhow::anyhow!(msg.into()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn print_json<T: Serialize>(v: &T) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    let res = serde_json::to_writer_pretty(&mut out, v).map_err(io::Error::from).and_then(|()| writeln!(out));
    match res {
        // a closed pipe (`| head`) is not an error
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Classify { k, format, cayley_bound } => cmd_classify(k, format, cayley_bound),
        Cmd::Reduce { point, format } => cmd_reduce(point, format),
        Cmd::Scan { kmin, kmax, out, aggregate, checkpoint, resume, threads, chunk, max_chunks } => {
            let args = ScanArgs { kmin, kmax, out, aggregate, checkpoint, resume, threads, chunk, max_chunks };
            cmd_scan(args)
        }
        Cmd::Density { k, pmax, format } => cmd_density(k, pmax, format),
        Cmd::Families { which, limit, kmax } => cmd_families(which, limit, kmax),
        Cmd::Stats { input } => cmd_stats(input),
        Cmd::Oracle { k, bound } => cmd_oracle(k, bound),
    }
}

fn cmd_classify(k: i64, format: Format, cayley_bound: Option<u64>) -> Result<(), Failure> {
    if k == 4 && cayley_bound.is_none() {
        return Err(usage("k = 4 has infinitely many orbits; pass --cayley-bound"));
    }
    let rec = classify_with(k, &ClassifyOptions { cayley_bound })?;
    let out = OutputRecord::from_classification(&rec);
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Tagged<'a> {
                schema: &'a str,
                #[serde(flatten)]
                record: &'a OutputRecord,
            }
            print_json(&Tagged { schema: RECORD_SCHEMA, record: &out })
        }
        Format::Csv => write_records(io::stdout().lock(), &[out]).map_err(Failure::Compute),
    }
}

fn cmd_reduce(point: Triple, format: TextFormat) -> Result<(), Failure> {
    let k = evaluate(&point)?;
    let (rep, word) = reduce(&point)?;
    match format {
        TextFormat::Text => {
            println!("k: {k}");
            println!("representative: {rep}");
            println!("word:{}", if word.moves.is_empty() { String::new() } else { format!(" {word}") });
            println!("vieta_steps: {}", word.vieta_steps());
            Ok(())
        }
        TextFormat::Json => {
            #[derive(Serialize)]
            struct Out {
                k: i128,
                point: String,
                representative: String,
                word: String,
                vieta_steps: usize,
            }
            print_json(&Out {
                k,
                point: point.to_string(),
                representative: rep.to_string(),
                word: word.to_string(),
                vieta_steps: word.vieta_steps(),
            })
        }
    }
}

struct ScanArgs {
    kmin: u64,
    kmax: u64,
    out: Option<PathBuf>,
    aggregate: Option<PathBuf>,
    checkpoint: Option<PathBuf>,
    resume: bool,
    threads: Option<usize>,
    chunk: u64,
    max_chunks: Option<u64>,
}

#[derive(Serialize)]
struct AggregateFile<'a> {
    schema: &'a str,
    tool_version: &'a str,
    flags: &'a str,
    aggregate: &'a CensusAggregate,
    percent_series: Vec<SeriesPoint>,
}

fn cmd_scan(a: ScanArgs) -> Result<(), Failure> {
    if a.kmin == 0 || a.kmin > a.kmax {
        return Err(usage(format!("need 1 <= kmin <= kmax, got [{}, {}]", a.kmin, a.kmax)));
    }
    if a.chunk == 0 {
        return Err(usage("--chunk must be positive"));
    }
    if let Some(n) = a.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Compute(e.into()))?;
    }
    // only the options that change results; paths and --threads do not
    let flags = format!("kmin={} kmax={} chunk={}", a.kmin, a.kmax, a.chunk);
    let opts = CensusOptions {
        k_min: a.kmin,
        chunk_width: a.chunk,
        checkpoint: a.checkpoint.clone(),
        resume: a.resume,
        max_new_chunks: a.max_chunks,
        flags: flags.clone(),
        ..Default::default()
    };
    let agg = match census_with(a.kmax, &opts)? {
        CensusRun::Complete(agg) => agg,
        CensusRun::Interrupted { done, total } => {
            eprintln!("stopped after {done} of {total} chunks; rerun with --resume to continue");
            return Ok(());
        }
    };
    if let Some(path) = &a.out {
        write_scan_csv(path, a.kmin, a.kmax, a.chunk).map_err(Failure::Compute)?;
    }
    let points = default_sample_points(a.kmax, a.chunk);
    let file = AggregateFile {
        schema: AGGREGATE_SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION"),
        flags: &flags,
        aggregate: &agg,
        percent_series: agg.percent_series(&points),
    };
    match &a.aggregate {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
            serde_json::to_writer_pretty(&mut w, &file).map_err(|e| Failure::Compute(e.into()))?;
            writeln!(w)?;
            w.flush()?;
            Ok(())
        }
        None => print_json(&file),
    }
}

fn write_scan_csv(path: &PathBuf, kmin: u64, kmax: u64, chunk: u64) -> anyhow::Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = csv_writer(BufWriter::new(f), SCAN_SCHEMA)?;
    for id in 0..chunk_count(kmin, kmax, chunk) {
        let (lo, hi) = chunk_bounds(kmin, kmax, chunk, id);
        for row in level_rows(lo, hi) {
            w.serialize(row)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn ratio(r: &num_rational::BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn cmd_density(k: i64, pmax: u64, format: Format) -> Result<(), Failure> {
    let prof = delta_truncated(k, pmax)?;
    match format {
        Format::Csv => {
            let mut w = csv_writer(io::stdout().lock(), DENSITY_SCHEMA).map_err(Failure::Compute)?;
            let io = |e: csv::Error| Failure::Compute(e.into());
            w.write_record(["p", "delta", "decimal"]).map_err(io)?;
            for (p, d) in &prof.factors {
                w.write_record([p.to_string(), ratio(d), format!("{:.12}", to_f64(d))]).map_err(io)?;
            }
            let t = &prof.truncated_product;
            w.write_record(["product".to_string(), ratio(t), format!("{:.12}", to_f64(t))]).map_err(io)?;
            w.flush()?;
            Ok(())
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                p: u64,
                delta: String,
                decimal: f64,
            }
            #[derive(Serialize)]
            struct Out {
                schema: &'static str,
                k: i64,
                pmax: u64,
                factors: Vec<Row>,
                product: String,
                product_decimal: f64,
            }
            print_json(&Out {
                schema: DENSITY_SCHEMA,
                k,
                pmax,
                factors: prof.factors.iter().map(|(p, d)| Row { p: *p, delta: ratio(d), decimal: to_f64(d) }).collect(),
                product: ratio(&prof.truncated_product),
                product_decimal: to_f64(&prof.truncated_product),
            })
        }
    }
}

fn cmd_families(which: Family, limit: usize, kmax: Option<u64>) -> Result<(), Failure> {
    if limit == 0 {
        return Err(usage("--limit must be at least 1"));
    }
    let members = match kmax {
        Some(b) => family_members_below(which, b, limit),
        None => family_generators(which, limit),
    };
    let mut w = csv_writer(io::stdout().lock(), FAMILY_SCHEMA).map_err(Failure::Compute)?;
    for m in members {
        w.serialize(m).map_err(|e| Failure::Compute(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_stats(input: PathBuf) -> Result<(), Failure> {
    let f = File::open(&input).with_context(|| format!("opening {}", input.display())).map_err(Failure::Usage)?;
    let mut rd = csv_reader(BufReader::new(f), SCAN_SCHEMA).map_err(Failure::Usage)?;
    let rows: Vec<LevelRow> =
        rd.deserialize().collect::<Result<_, _>>().map_err(|e| Failure::Usage(anyhow::Error::from(e)))?;
    let s = stats::summarize(&rows).map_err(Failure::Usage)?;
    print_json(&s)
}

fn cmd_oracle(k: i64, bound: Option<u64>) -> Result<(), Failure> {
    let bound = bound.unwrap_or_else(|| default_bound(k));
    let d = orbit_decompose(k, bound)?;
    let h = class_number(k)?;
    let comparable = k != 4 && is_admissible(k).is_none() && (k < 0 || k < 5 || !is_exceptional(k).any());
    let agreement = match h {
        ClassNumber::Exact(n) if comparable => {
            if n == d.orbits.len() as u64 {
                "agree"
            } else {
                "disagree"
            }
        }
        _ => "not comparable",
    };
    #[derive(Serialize)]
    struct OrbitOut {
        representative: String,
        points_in_box: usize,
        visited: usize,
    }
    #[derive(Serialize)]
    struct Out {
        schema: &'static str,
        k: i64,
        bound: u64,
        working_box: u64,
        points: usize,
        orbit_count: usize,
        orbits: Vec<OrbitOut>,
        class_number: String,
        agreement: &'static str,
    }
    print_json(&Out {
        schema: ORACLE_SCHEMA,
        k,
        bound,
        working_box: d.working_box,
        points: d.points.len(),
        orbit_count: d.orbits.len(),
        orbits: d
            .orbits
            .iter()
            .map(|o| OrbitOut {
                representative: o.representative.to_string(),
                points_in_box: o.members.len(),
                visited: o.visited,
            })
            .collect(),
        class_number: h.to_string(),
        agreement,
    })
}
