//! Command-line front end: spectrum stats, minimization, verification,
//! rendering, the CSV benchmark harness and the GF(4) tools.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use sierpinski_core::esop::{self, Reference, VerifyMode};
use sierpinski_core::gasket::{self, RenderFormat};
use sierpinski_core::gf4::{self, GfsopConfig};
use sierpinski_core::minimize::{self, distinct_terms, InitChoice, MinimizeError};
use sierpinski_core::{
    parse_pla, CostMetric, Esop, Gfsop, InitStrategy, LogicSpec, MinimizeConfig, QuaternaryFunction,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const CSV_HEADER: &str = "name,in,out,terms_sum,terms_union,literals,time_s,verified,seed";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        source: sierpinski_core::Error,
    },
    #[error(transparent)]
    Core(#[from] sierpinski_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(sierpinski_core::Error::Invalid(_)) => EXIT_INVALID,
            CliError::Io { .. } | CliError::Input { .. } | CliError::Core(_) => EXIT_IO,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "sierpinski",
    version,
    about = "ESOP and GFSOP minimization on Sierpinski gaskets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Vertex, cell and empty-cell counts of the n-variable gasket.
    Stats { n: usize },
    /// Spectrum summary of every output of a PLA.
    Build {
        pla: PathBuf,
        /// Print the full spectrum cell list (n ≤ 6).
        #[arg(long)]
        cells: bool,
    },
    /// Minimize a PLA as one ESOP per output.
    Minimize(MinimizeArgs),
    /// Check an ESOP against a PLA output.
    Verify {
        pla: PathBuf,
        esop: PathBuf,
        #[arg(long, default_value_t = 0)]
        output: usize,
        /// Sample this many random points instead of checking exhaustively.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Draw the gasket of a PLA output, optionally with a marking.
    Render {
        pla: PathBuf,
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        output: usize,
        /// ESOP whose terms are drawn as marked vertices.
        #[arg(long)]
        marking: Option<PathBuf>,
        /// Draw the XOR triangle of the truth vector instead.
        #[arg(long)]
        triangle: bool,
    },
    /// Minimize every .pla in a directory and print a CSV report.
    Bench(BenchArgs),
    /// GF(4) tools.
    #[command(subcommand)]
    Gf4(Gf4Command),
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// terms, literals or lex.
    #[arg(long, default_value = "lex")]
    pub cost: String,
    /// auto, minterms, pprm, best-fixed or disjoint-cubes.
    #[arg(long, default_value = "auto")]
    pub init: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub patience: Option<usize>,
    /// Stop the search after this many seconds and keep the best result.
    #[arg(long)]
    pub time_limit: Option<f64>,
}

impl SearchArgs {
    pub fn config(&self) -> CliResult<MinimizeConfig> {
        let mut cfg = MinimizeConfig {
            cost_metric: self
                .cost
                .parse::<CostMetric>()
                .map_err(|e| CliError::Usage(e.to_string()))?,
            rng_seed: self.seed,
            ..MinimizeConfig::default()
        };
        if self.init != "auto" {
            cfg.init = InitChoice::Strategy(
                self.init
                    .parse::<InitStrategy>()
                    .map_err(|e| CliError::Usage(e.to_string()))?,
            );
        }
        if let Some(v) = self.iters {
            cfg.max_iterations = v;
        }
        if let Some(v) = self.restarts {
            cfg.restarts = v;
        }
        if let Some(v) = self.patience {
            cfg.patience = v;
        }
        if let Some(s) = self.time_limit {
            if !(s.is_finite() && s > 0.0) {
                return Err(CliError::Usage(format!("invalid time limit {s}")));
            }
            cfg.time_limit = Some(Duration::from_secs_f64(s));
        }
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct MinimizeArgs {
    pla: PathBuf,
    #[command(flatten)]
    search: SearchArgs,
    /// Minimize only this output.
    #[arg(long)]
    output: Option<usize>,
    /// Write the result; multi-output runs write `<stem>.<k>.<ext>` per output.
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Print marking and spectrum storage sizes.
    #[arg(long)]
    report_memory: bool,
    /// Print the full key=value report per output.
    #[arg(long)]
    report: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    pub dir: PathBuf,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Write `-` in the time column so reports compare byte for byte.
    #[arg(long)]
    pub omit_time: bool,
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Gf4Command {
    /// Pair binary inputs/outputs of a PLA into 4-valued functions.
    Pair {
        pla: PathBuf,
        /// Output prefix; writes `<prefix>.<k>.q4` per output pair.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Minimize a 4-valued function (.q4) or every output pair of a PLA.
    Minimize {
        input: PathBuf,
        #[arg(long, default_value = "lex")]
        cost: String,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Check a GFSOP against a 4-valued function.
    Verify { q4: PathBuf, gfsop: PathBuf },
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    match cmd {
        Command::Stats { n } => stats(n, out),
        Command::Build { pla, cells } => build(&pla, cells, out),
        Command::Minimize(args) => minimize_cmd(&args, out, err),
        Command::Verify {
            pla,
            esop,
            output,
            samples,
            seed,
        } => verify_cmd(&pla, &esop, output, samples, seed, out),
        Command::Render {
            pla,
            format,
            out: path,
            output,
            marking,
            triangle,
        } => render_cmd(
            &pla,
            &format,
            path.as_deref(),
            output,
            marking.as_deref(),
            triangle,
            out,
        ),
        Command::Bench(args) => {
            let (csv, all_ok) = bench(&args)?;
            match &args.out {
                Some(p) => write_file(p, &csv)?,
                None => out.write_all(csv.as_bytes()).map_err(stdout_err)?,
            }
            Ok(if all_ok { EXIT_OK } else { EXIT_INVALID })
        }
        Command::Gf4(g) => gf4_cmd(g, out),
    }
}

fn stdout_err(e: std::io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn input_err(path: &Path) -> impl FnOnce(sierpinski_core::Error) -> CliError + '_ {
    move |source| CliError::Input {
        path: path.to_path_buf(),
        source,
    }
}

pub fn load_pla(path: &Path) -> CliResult<LogicSpec> {
    let spec = parse_pla(&read_file(path)?).map_err(input_err(path))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(spec.with_name(name))
}

fn check_output(spec: &LogicSpec, output: usize) -> CliResult<()> {
    spec.check_output(output).map_err(CliError::from)
}

fn stats(n: usize, out: &mut dyn Write) -> CliResult<i32> {
    if !(1..=60).contains(&n) {
        return Err(CliError::Usage(format!("n must be in 1..=60, got {n}")));
    }
    let c = gasket::structural_counts(n);
    writeln!(
        out,
        "vertices={} cells={} empty={} (4^n/2-2^n/2: {})",
        c.vertex_count, c.triangle_cells, c.empty_cells, c.reported_memory
    )
    .map_err(stdout_err)?;
    Ok(EXIT_OK)
}

fn build(path: &Path, cells: bool, out: &mut dyn Write) -> CliResult<i32> {
    let spec = load_pla(path)?;
    for o in 0..spec.n_outputs {
        let tt = spec.to_truth_table(o)?;
        let g = gasket::build_spectrum(&tt)?;
        writeln!(
            out,
            "output={o} n={} minterms={} cells={} spectrum_ones={} spectrum_bytes={}",
            tt.n(),
            tt.count_ones(),
            g.cell_count(),
            g.ones(),
            g.spectrum_bytes()
        )
        .map_err(stdout_err)?;
        if cells {
            if tt.n() > gasket::MAX_RENDER_VARS {
                return Err(CliError::Usage(format!(
                    "--cells is limited to {} variables",
                    gasket::MAX_RENDER_VARS
                )));
            }
            for (c, v) in g.cells().filter(|(_, v)| *v) {
                writeln!(out, "  {c} {}", u8::from(v)).map_err(stdout_err)?;
            }
        }
    }
    Ok(EXIT_OK)
}

/// Minimizes one output, turning a time-limit stop into its best result.
fn minimize_one(
    spec: &LogicSpec,
    output: usize,
    cfg: &MinimizeConfig,
    err: &mut dyn Write,
) -> CliResult<minimize::MinimizeResult> {
    match minimize::minimize(Reference::Spec { spec, output }, cfg) {
        Ok(r) => Ok(r),
        Err(MinimizeError::TimeLimit(r)) => {
            let _ = writeln!(
                err,
                "output {output}: time limit reached after {} iterations",
                r.iterations
            );
            Ok(*r)
        }
        Err(MinimizeError::Core(e)) => Err(e.into()),
    }
}

fn numbered_path(base: &Path, k: usize) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}.{k}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{k}"),
    };
    base.with_file_name(name)
}

fn minimize_cmd(args: &MinimizeArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let spec = load_pla(&args.pla)?;
    let cfg = args.search.config()?;
    let outputs: Vec<usize> = match args.output {
        Some(o) => {
            check_output(&spec, o)?;
            vec![o]
        }
        None => (0..spec.n_outputs).collect(),
    };
    let mut results = Vec::new();
    for &o in &outputs {
        results.push((o, minimize_one(&spec, o, &cfg, err)?));
    }
    let w = |e: std::io::Error| stdout_err(e);
    if results.len() == 1 {
        let r = &results[0].1;
        writeln!(out, "{}", r.cost).map_err(w)?;
        if args.report {
            write!(out, "{}", r.report()).map_err(w)?;
        }
    } else {
        for (o, r) in &results {
            writeln!(out, "output={o} {}", r.cost).map_err(w)?;
            if args.report {
                write!(out, "{}", r.report()).map_err(w)?;
            }
        }
        let terms: usize = results.iter().map(|(_, r)| r.cost.term_count).sum();
        let lits: usize = results.iter().map(|(_, r)| r.cost.literal_count).sum();
        let union = distinct_terms(results.iter().map(|(_, r)| &r.esop));
        writeln!(out, "terms={terms} literals={lits} terms_union={union}").map_err(w)?;
    }
    if args.report_memory {
        let n = spec.n_inputs;
        let per_term = (2 * n).div_ceil(8);
        let marking: usize = results.iter().map(|(_, r)| r.esop.len() * per_term).sum();
        write!(out, "marking_bytes={marking}").map_err(w)?;
        if n <= gasket::MAX_SPECTRUM_VARS {
            write!(out, " spectrum_bytes={}", 3usize.pow(n as u32).div_ceil(8)).map_err(w)?;
        }
        writeln!(out).map_err(w)?;
    }
    if let Some(path) = &args.emit {
        if results.len() == 1 {
            write_file(path, &results[0].1.esop.to_text())?;
        } else {
            for (o, r) in &results {
                write_file(&numbered_path(path, *o), &r.esop.to_text())?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn verify_cmd(
    pla: &Path,
    esop_path: &Path,
    output: usize,
    samples: Option<u64>,
    seed: u64,
    out: &mut dyn Write,
) -> CliResult<i32> {
    let spec = load_pla(pla)?;
    check_output(&spec, output)?;
    let e = Esop::parse(&read_file(esop_path)?).map_err(input_err(esop_path))?;
    let mode = match samples {
        Some(samples) => VerifyMode::Sampled { samples, seed },
        None => VerifyMode::auto(spec.n_inputs),
    };
    let verdict = esop::verify(
        &e,
        Reference::Spec {
            spec: &spec,
            output,
        },
        mode,
    )?;
    writeln!(out, "{verdict}").map_err(stdout_err)?;
    if verdict.valid {
        writeln!(out, "{}", e.cost()).map_err(stdout_err)?;
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_INVALID)
    }
}

fn render_cmd(
    pla: &Path,
    format: &str,
    path: Option<&Path>,
    output: usize,
    marking: Option<&Path>,
    triangle: bool,
    out: &mut dyn Write,
) -> CliResult<i32> {
    let format: RenderFormat = format
        .parse()
        .map_err(|e: sierpinski_core::Error| CliError::Usage(e.to_string()))?;
    let spec = load_pla(pla)?;
    check_output(&spec, output)?;
    let tt = spec.to_truth_table(output)?;
    let text = if triangle {
        let bits: Vec<bool> = tt.bits().collect();
        gasket::render_triangle(&gasket::build_xor_triangle(&bits)?, format)?
    } else {
        let mut g = gasket::build_spectrum(&tt)?;
        if let Some(m) = marking {
            let e = Esop::parse(&read_file(m)?).map_err(input_err(m))?;
            g.set_marking(e.into_terms())?;
        }
        gasket::render_gasket(&g, format)?
    };
    match path {
        Some(p) => write_file(p, &text)?,
        None => out.write_all(text.as_bytes()).map_err(stdout_err)?,
    }
    Ok(EXIT_OK)
}

/// One CSV line per `.pla` file in `args.dir`, sorted by file name.
/// Returns the report and whether every row verified.
pub fn bench(args: &BenchArgs) -> CliResult<(String, bool)> {
    let cfg = args.search.config()?;
    let entries = fs::read_dir(&args.dir).map_err(|source| CliError::Io {
        path: args.dir.clone(),
        source,
    })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "pla"))
        .collect();
    files.sort();

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    let mut all_ok = true;
    for path in files {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let start = Instant::now();
        let row = bench_file(&path, &cfg);
        let time = if args.omit_time {
            "-".to_string()
        } else {
            format!("{:.3}", start.elapsed().as_secs_f64())
        };
        let line = match row {
            Ok(r) => {
                all_ok &= r.verified;
                format!(
                    "{name},{},{},{},{},{},{time},{},{}",
                    r.inputs,
                    r.outputs,
                    r.terms_sum,
                    r.terms_union,
                    r.literals,
                    r.verified,
                    cfg.rng_seed
                )
            }
            Err(e) => {
                all_ok = false;
                log::warn!("{name}: {e}");
                format!("{name},-,-,-,-,-,{time},error,{}", cfg.rng_seed)
            }
        };
        csv.push_str(&line);
        csv.push('\n');
    }
    Ok((csv, all_ok))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub inputs: usize,
    pub outputs: usize,
    pub terms_sum: usize,
    pub terms_union: usize,
    pub literals: usize,
    pub verified: bool,
}

pub fn bench_file(path: &Path, cfg: &MinimizeConfig) -> CliResult<BenchRow> {
    let spec = load_pla(path)?;
    let mut sink = std::io::sink();
    let results = (0..spec.n_outputs)
        .map(|o| minimize_one(&spec, o, cfg, &mut sink))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(BenchRow {
        inputs: spec.n_inputs,
        outputs: spec.n_outputs,
        terms_sum: results.iter().map(|r| r.cost.term_count).sum(),
        terms_union: distinct_terms(results.iter().map(|r| &r.esop)),
        literals: results.iter().map(|r| r.cost.literal_count).sum(),
        verified: results.iter().all(|r| r.verified.valid),
    })
}

fn load_quaternary(path: &Path) -> CliResult<Vec<QuaternaryFunction>> {
    let text = read_file(path)?;
    if path.extension().is_some_and(|x| x == "pla") {
        let spec = parse_pla(&text).map_err(input_err(path))?;
        Ok(gf4::pair_binary(&spec)?)
    } else {
        Ok(vec![
            QuaternaryFunction::parse(&text).map_err(input_err(path))?
        ])
    }
}

fn gf4_cmd(cmd: Gf4Command, out: &mut dyn Write) -> CliResult<i32> {
    match cmd {
        Gf4Command::Pair { pla, out: prefix } => {
            let spec = load_pla(&pla)?;
            let funcs = gf4::pair_binary(&spec)?;
            for (k, f) in funcs.iter().enumerate() {
                match &prefix {
                    Some(p) => {
                        let mut name = p.as_os_str().to_owned();
                        name.push(format!(".{k}.q4"));
                        write_file(Path::new(&name), &f.to_text())?;
                    }
                    None => {
                        writeln!(out, "# output pair {k}").map_err(stdout_err)?;
                        out.write_all(f.to_text().as_bytes()).map_err(stdout_err)?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Gf4Command::Minimize { input, cost, emit } => {
            let cfg = GfsopConfig {
                cost_metric: cost
                    .parse()
                    .map_err(|e: sierpinski_core::Error| CliError::Usage(e.to_string()))?,
                ..GfsopConfig::default()
            };
            let funcs = load_quaternary(&input)?;
            let single = funcs.len() == 1;
            for (k, f) in funcs.iter().enumerate() {
                let r = gf4::minimize_gfsop(f, &cfg)?;
                let prefix = if single {
                    String::new()
                } else {
                    format!("pair={k} ")
                };
                writeln!(
                    out,
                    "{prefix}{} fixed_terms={} fixed_literals={} verified={}",
                    r.cost,
                    r.fixed_polarity_cost.term_count,
                    r.fixed_polarity_cost.literal_count,
                    r.verified.valid
                )
                .map_err(stdout_err)?;
                if let Some(path) = &emit {
                    let target = if single {
                        path.clone()
                    } else {
                        numbered_path(path, k)
                    };
                    write_file(&target, &r.gfsop.to_text())?;
                }
            }
            Ok(EXIT_OK)
        }
        Gf4Command::Verify { q4, gfsop } => {
            let f = QuaternaryFunction::parse(&read_file(&q4)?).map_err(input_err(&q4))?;
            let g = Gfsop::parse(&read_file(&gfsop)?).map_err(input_err(&gfsop))?;
            let v = gf4::gfsop_verify(&g, &f)?;
            match &v.counterexample {
                None => {
                    writeln!(out, "valid ({} points)", v.points_checked).map_err(stdout_err)?;
                    writeln!(out, "{}", g.cost()).map_err(stdout_err)?;
                    Ok(EXIT_OK)
                }
                Some((x, want, got)) => {
                    let point: String = x.iter().map(|v| v.to_string()).collect();
                    writeln!(out, "INVALID: input {point}: expected {want}, got {got}")
                        .map_err(stdout_err)?;
                    Ok(EXIT_INVALID)
                }
            }
        }
    }
}
