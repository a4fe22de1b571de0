//! `x0wp`: command-line front end for the Weierstrass-point test.

use std::collections::HashSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use x0_weierstrass::basis_io::{bundled_levels, parse_basis, write_basis};
use x0_weierstrass::{
    classify, decide_batch, decide_detailed, fetch_basis, BasisSource, DecideOptions, Decision,
    Error, FetchConfig, GenusBand, Method, RecordFormat, ResultsFile, ScanRecord, Verdict,
};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_PRECISION: u8 = 3;
const EXIT_DATA: u8 = 4;

#[derive(Parser)]
#[command(
    name = "x0wp",
    version,
    about = "Is the cusp at infinity of X0(N) an m/2-Weierstrass point?"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a single (level, weight) pair.
    Decide(DecideArgs),
    /// Decide a grid of levels and weights, appending to a results file.
    Scan(ScanArgs),
    /// Download (or read from cache) the weight-2 basis for a level.
    FetchBasis(FetchArgs),
    /// Validate the bundled fixtures or the basis files in a directory.
    VerifyFixtures(VerifyArgs),
}

#[derive(Args, Clone)]
struct SourceArgs {
    /// Read the weight-2 basis from this file instead of the bundled data.
    #[arg(long, value_name = "PATH")]
    basis_file: Option<PathBuf>,
    /// Never touch the network; use bundled data and the cache only.
    #[arg(long)]
    offline: bool,
    /// Cache directory for downloaded bases.
    #[arg(long, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
}

impl SourceArgs {
    fn fetch_config(&self) -> FetchConfig {
        let mut cfg = FetchConfig::from_env();
        cfg.offline = self.offline;
        if let Some(dir) = &self.cache_dir {
            cfg.cache_dir = dir.clone();
        }
        cfg
    }

    fn source(&self) -> BasisSource {
        match &self.basis_file {
            Some(p) => BasisSource::File(p.clone()),
            None => BasisSource::Auto,
        }
    }
}

#[derive(Args, Clone)]
struct MethodArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    method: MethodArg,
    /// Weight-2 precision to use instead of the computed minimum.
    #[arg(long, value_name = "P")]
    precision: Option<usize>,
    /// Permit m = 4 on genus-2 hyperelliptic levels.
    #[arg(long)]
    allow_hyperelliptic_g2_m4: bool,
}

#[derive(Args)]
struct DecideArgs {
    #[arg(long, value_parser = parse_level)]
    level: u64,
    #[arg(long, value_parser = parse_weight)]
    weight: u32,
    #[command(flatten)]
    method: MethodArgs,
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Print the reduced rows with their monomial combinations.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct ScanArgs {
    /// Levels as `A..B` (inclusive), a comma list, or a mix: `34..60,77`.
    #[arg(long, value_parser = parse_levels)]
    levels: Levels,
    /// Comma-separated even weights.
    #[arg(long, value_parser = parse_weights, default_value = "4")]
    weights: Weights,
    #[command(flatten)]
    method: MethodArgs,
    #[command(flatten)]
    source: SourceArgs,
    /// Results file format.
    #[arg(long, value_enum, default_value_t = ScanFormat::Jsonl)]
    format: ScanFormat,
    /// Results file; defaults to `x0wp_scan.<format>`.
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Recompute cells that already have a record.
    #[arg(long)]
    force: bool,
    /// Print one line per cell, including not-applicable ones.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct FetchArgs {
    #[arg(long, value_parser = parse_level)]
    level: u64,
    /// Minimum precision the cached basis must have.
    #[arg(long, value_name = "P", default_value_t = 0)]
    precision: usize,
    #[command(flatten)]
    source: SourceArgs,
    /// Also write the basis to this file.
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Directory of `gamma0_NNN.basis` files; default is the bundled set.
    #[arg(long, value_name = "DIR")]
    dir: Option<PathBuf>,
    /// Also run the weight-4 test on each non-hyperelliptic level.
    #[arg(long)]
    decide: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Echelon,
    Wronskian,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Echelon => Method::Echelon,
            MethodArg::Wronskian => Method::Wronskian,
            MethodArg::Both => Method::Both,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Jsonl,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScanFormat {
    Jsonl,
    Csv,
}

#[derive(Clone, Debug)]
struct Levels(Vec<u64>);

#[derive(Clone, Debug)]
struct Weights(Vec<u32>);

fn parse_level(s: &str) -> Result<u64, String> {
    match s.trim().parse::<u64>() {
        Ok(0) | Err(_) => Err(format!("level must be a positive integer, got {s:?}")),
        Ok(n) => Ok(n),
    }
}

fn parse_weight(s: &str) -> Result<u32, String> {
    match s.trim().parse::<u32>() {
        Ok(m) if m >= 2 && m % 2 == 0 => Ok(m),
        _ => Err(format!("weight must be an even integer >= 2, got {s:?}")),
    }
}

fn parse_levels(s: &str) -> Result<Levels, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (parse_level(a)?, parse_level(b.trim_start_matches('='))?);
                if a > b {
                    return Err(format!("empty level range {part:?}"));
                }
                out.extend(a..=b);
            }
            None => out.push(parse_level(part)?),
        }
    }
    if out.is_empty() {
        return Err("no levels given".into());
    }
    out.sort_unstable();
    out.dedup();
    Ok(Levels(out))
}

fn parse_weights(s: &str) -> Result<Weights, String> {
    let mut out: Vec<u32> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(parse_weight)
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err("no weights given".into());
    }
    out.sort_unstable();
    out.dedup();
    Ok(Weights(out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Decide(a) => cmd_decide(a),
        Command::Scan(a) => cmd_scan(a),
        Command::FetchBasis(a) => cmd_fetch(a),
        Command::VerifyFixtures(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    let code = match e {
        Error::InvalidArgument(_) => EXIT_USAGE,
        Error::PrecisionExceeded { required, .. } => {
            eprintln!("recommended precision: {required}");
            EXIT_PRECISION
        }
        Error::Network(_) | Error::NoBasis { .. } | Error::UpstreamFormat(_) => EXIT_DATA,
        Error::Parse { .. } | Error::Validation(_) | Error::Io { .. } => EXIT_DATA,
        _ => EXIT_FAILURE,
    };
    ExitCode::from(code)
}

fn options(method: &MethodArgs, source: &SourceArgs) -> DecideOptions {
    DecideOptions {
        method: method.method.into(),
        precision: method.precision,
        source: source.source(),
        allow_hyperelliptic_g2_m4: method.allow_hyperelliptic_g2_m4,
        fetch: source.fetch_config(),
    }
}

fn cmd_decide(args: DecideArgs) -> Result<ExitCode, Error> {
    let opts = options(&args.method, &args.source);
    let decision = decide_detailed(args.level, args.weight, &opts)?;
    match args.format {
        Format::Text => print!("{}", text_report(&decision, args.verbose)),
        Format::Jsonl => println!(
            "{}",
            serde_json::to_string(&decision.verdict).expect("verdict serializes")
        ),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            w.serialize(ScanRecord::from_verdict(&decision.verdict))
                .and_then(|_| w.flush().map_err(csv::Error::from))
                .map_err(|e| Error::Records(e.to_string()))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn text_report(d: &Decision, verbose: bool) -> String {
    let v = &d.verdict;
    let mut out = format!("X0({}), weight m = {}\n", v.level, v.weight);
    if let Verdict::NotApplicable(_) = v.verdict {
        if let Some(g) = v.genus {
            out += &format!("genus g = {g}\n");
        }
        out += &v.headline();
        out.push('\n');
        return out;
    }
    let g = v.genus.expect("genus known for a verdict");
    let t = v.t.expect("t known for a verdict");
    let methods: Vec<String> = v.methods_run.iter().map(Method::to_string).collect();
    out += &format!("genus g = {g}\n");
    out += &format!("t = dim S_{}^H = {t}\n", v.weight);
    out += &format!("precision used: q^{}\n", v.precision_used.unwrap_or(0));
    out += &format!("methods: {}\n", methods.join(", "));
    out += &format!(
        "pivots: {}\n",
        v.pivots
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    );
    out += &format!(
        "consecutive run would end at q^{}; last pivot q^{}\n",
        v.weight as usize / 2 + t - 1,
        v.pivots.last().copied().unwrap_or(0)
    );
    if let Some(w) = &d.wronskian {
        out += &format!(
            "ord_q W = {} (Weierstrass iff >= {})\n",
            w.order, w.threshold
        );
    }
    if verbose {
        if let Some(e) = &d.echelon {
            out += "reduced rows:\n";
            for (u, row) in e.reduced_rows.iter().enumerate() {
                out += &format!("  {} = {row}\n", e.combination(u));
            }
        }
    }
    out += &v.headline();
    out.push('\n');
    out
}

fn cmd_scan(args: ScanArgs) -> Result<ExitCode, Error> {
    let format = match args.format {
        ScanFormat::Jsonl => RecordFormat::Jsonl,
        ScanFormat::Csv => RecordFormat::Csv,
    };
    let path = args.output.clone().unwrap_or_else(|| match format {
        RecordFormat::Jsonl => PathBuf::from("x0wp_scan.jsonl"),
        RecordFormat::Csv => PathBuf::from("x0wp_scan.csv"),
    });
    let file = ResultsFile::new(&path, format);
    let cells: HashSet<(u64, u32)> = args
        .levels
        .0
        .iter()
        .flat_map(|&n| args.weights.0.iter().map(move |&m| (n, m)))
        .collect();
    let done = if args.force {
        file.remove_cells(&cells)?;
        HashSet::new()
    } else {
        file.recorded_cells()?
    };

    let opts = options(&args.method, &args.source);
    let printer = Printer {
        inner: &file,
        verbose: args.verbose,
    };
    let summary = decide_batch(
        &args.levels.0,
        &args.weights.0,
        &opts,
        &printer,
        args.jobs,
        &|n, m| done.contains(&(n, m)),
    )?;
    eprintln!(
        "{}: {} IsWeierstrass, {} NotWeierstrass, {} NotApplicable, {} failed, {} already recorded",
        path.display(),
        summary.is_weierstrass,
        summary.not_weierstrass,
        summary.not_applicable,
        summary.failures,
        summary.skipped
    );
    Ok(if summary.failures > 0 {
        ExitCode::from(EXIT_FAILURE)
    } else {
        ExitCode::SUCCESS
    })
}

/// Forwards records to the results file, echoing progress.
struct Printer<'a> {
    inner: &'a ResultsFile,
    verbose: bool,
}

impl x0_weierstrass::VerdictSink for Printer<'_> {
    fn record(&self, r: &ScanRecord) -> x0_weierstrass::Result<()> {
        let quiet = r.verdict == "NotApplicable" && !self.verbose;
        if !quiet {
            if r.status == "ok" {
                eprintln!("N={} m={}: {} [{}]", r.level, r.weight, r.verdict, r.pivots);
            } else {
                eprintln!("N={} m={}: error: {}", r.level, r.weight, r.detail);
            }
        }
        self.inner.record(r)
    }
}

fn cmd_fetch(args: FetchArgs) -> Result<ExitCode, Error> {
    let cfg = args.source.fetch_config();
    let basis = fetch_basis(args.level, args.precision, &cfg)?;
    println!(
        "level {}: genus {}, precision q^{}, cached at {}",
        basis.level,
        basis.genus(),
        basis.prec,
        cfg.cache_path(args.level).display()
    );
    if let Some(out) = &args.output {
        write_basis(out, &basis)?;
        println!("written to {}", out.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let entries: Vec<(String, x0_weierstrass::Result<x0_weierstrass::BasisSet>)> = match &args.dir {
        None => bundled_levels()
            .into_iter()
            .map(|n| {
                let b = x0_weierstrass::bundled_basis(n).expect("listed level is bundled");
                (format!("bundled level {n}"), b)
            })
            .collect(),
        Some(dir) => {
            let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
                .map_err(|e| Error::Io {
                    path: dir.clone(),
                    source: e,
                })?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "basis"))
                .collect();
            paths.sort();
            paths
                .into_iter()
                .map(|p| {
                    let parsed = std::fs::read_to_string(&p)
                        .map_err(|e| Error::Io {
                            path: p.clone(),
                            source: e,
                        })
                        .and_then(|text| parse_basis(&text));
                    (p.display().to_string(), parsed)
                })
                .collect()
        }
    };

    let mut failures = 0;
    for (name, basis) in entries {
        let outcome = basis.and_then(|b| {
            b.validate()?;
            let class = classify(b.level);
            let mut line = format!("genus {}, precision q^{}", b.genus(), b.prec);
            if args.decide && class.genus_band == GenusBand::AtLeastTwo && class.nonhyperelliptic {
                let opts = DecideOptions {
                    source: BasisSource::Provided(b.clone()),
                    ..DecideOptions::default()
                };
                let v = decide_detailed(b.level, 4, &opts)?.verdict;
                line += &format!(", m=4 {}", v.verdict);
            }
            Ok(line)
        });
        match outcome {
            Ok(line) => println!("ok   {name}: {line}"),
            Err(e) => {
                failures += 1;
                println!("FAIL {name}: {e}");
            }
        }
    }
    Ok(if failures > 0 {
        ExitCode::from(EXIT_DATA)
    } else {
        ExitCode::SUCCESS
    })
}
