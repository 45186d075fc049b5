//! `rvalues`: r-values of subsets of GF(2^n) from the command line.
//!
//! Exit status: 0 success, 1 verification or diff failure, 2 usage error.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gf2_rvalues::compare::compare;
use gf2_rvalues::construct::{bootstrap, lift, r25_search, WitnessPool};
use gf2_rvalues::enumerate::{default_shard_count, enumerate_combinations, SweepOptions, SweepRun};
use gf2_rvalues::identity::{exhaustive_sweep, random_sweep, SweepReport};
use gf2_rvalues::reference::{import_pairs, split_report, TABLE_N6_CSV};
use gf2_rvalues::{r_abc, r_set, steiner_blocks, Error, FieldSpec, SpectrumTable, SubsetMask, ZeroClass};

const CACHE_ENV: &str = "RVALUES_CACHE_DIR";

#[derive(Parser)]
#[command(name = "rvalues", version, about = "r-values of subsets of GF(2^n)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print r(A), or r(A, B, C) with --b/--c
    Rvalue(RvalueArgs),
    /// Compute a spectrum of r-values
    Spectrum {
        #[command(subcommand)]
        mode: SpectrumMode,
    },
    /// Check the closed-form identities on random or exhaustive inputs
    Verify(VerifyArgs),
    /// List the blocks {a, b, a+b} inside a zero-free set
    Steiner(SteinerArgs),
    /// Diff two spectrum JSON files
    Compare(CompareArgs),
    /// Convert a size,r CSV (default: the bundled partial GF(64) table) to spectrum JSON
    #[command(name = "import-table2")]
    ImportTable2(ImportArgs),
    /// Re-verify every witness in a pool file
    WitnessCheck {
        pool: PathBuf,
    },
    /// Check the published GF(16) split table for sizes 5..7 against exhaustive results
    SplitReport,
}

#[derive(Args)]
struct FieldArgs {
    /// Field dimension n (GF(2^n))
    #[arg(long)]
    n: u32,
    /// Defining polynomial, e.g. 0x13; must be irreducible of degree n
    #[arg(long, value_parser = parse_int)]
    poly: Option<u32>,
}

impl FieldArgs {
    fn spec(&self) -> Result<FieldSpec, Error> {
        match self.poly {
            Some(p) => FieldSpec::new(self.n, p),
            None => FieldSpec::with_default_poly(self.n),
        }
    }
}

#[derive(Args)]
struct RvalueArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Elements (1,2,3) or hex mask (0xE)
    #[arg(long)]
    set: String,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    c: Option<String>,
    /// Also list every (a, b, a+b)
    #[arg(long)]
    triples: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the table here
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Do not print the summary grid
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum SpectrumMode {
    /// Exhaustive sweep (n <= 5)
    Brute(BruteArgs),
    /// Lift from an exhaustive small field with the construction rules
    Construct(ConstructArgs),
}

#[derive(Args)]
struct BruteArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Largest zero-free size to record (default 2^(n-1), enough for the full spectrum)
    #[arg(long)]
    max_size: Option<usize>,
    /// Enumerate only these sizes (LO..HI) in combinations mode; allows n = 6
    #[arg(long, value_parser = parse_range)]
    sizes: Option<(usize, usize)>,
    /// Record subset counts per value
    #[arg(long)]
    counts: bool,
    /// Number of shards (power of two; default from the thread count)
    #[arg(long)]
    shards: Option<u64>,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    threads: Option<usize>,
    /// Checkpoint file (n = 5 default: in the cache directory)
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Subsets between checkpoints
    #[arg(long, default_value_t = 1 << 24)]
    checkpoint_every: u64,
    /// Continue from the checkpoint file if it exists
    #[arg(long)]
    resume: bool,
    /// Required for n = 5 (2^31 subsets)
    #[arg(long)]
    confirm_long: bool,
    /// Only print zero-free sizes; skip the derived full spectrum
    #[arg(long)]
    zero_free_only: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Start from this pool file instead of the exhaustive n = 3 base
    #[arg(long)]
    base_pool: Option<PathBuf>,
    /// Write the final witness pool (JSON lines) here
    #[arg(long)]
    pool_out: Option<PathBuf>,
    /// Only print zero-free sizes; skip the derived full spectrum
    #[arg(long)]
    zero_free_only: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Every input tuple instead of random ones (n <= 2)
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Args)]
struct SteinerArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    set: String,
}

#[derive(Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    /// Compare zero-free entries only
    #[arg(long)]
    zero_free: bool,
    /// Values only in the first file are allowed (second file is a partial list)
    #[arg(long)]
    superset: bool,
}

#[derive(Args)]
struct ImportArgs {
    /// CSV with a size,r header
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    n: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_int(s: &str) -> Result<u32, String> {
    let t = s.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u32::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|e| format!("{s:?}: {e}"))
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
    let lo: usize = lo.trim().parse().map_err(|e| format!("{lo:?}: {e}"))?;
    let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|e| format!("{hi:?}: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok((lo, hi))
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Usage(anyhow::Error),
    Check(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(
                Error::UnsupportedDimension(_)
                | Error::NotIrreducible { .. }
                | Error::NoDefaultPolynomial(_)
                | Error::ElementOutOfRange { .. }
                | Error::FieldMismatch(..)
                | Error::ContainsZero
                | Error::Parse { .. }
                | Error::TooLarge(_)
                | Error::Shard(_),
            ) => Failure::Usage(e),
            _ => Failure::Check(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::from(anyhow::Error::new(e))
    }
}

type CmdResult = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(anyhow!(msg.into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Rvalue(a) => cmd_rvalue(a),
        Command::Spectrum { mode: SpectrumMode::Brute(a) } => cmd_brute(a),
        Command::Spectrum { mode: SpectrumMode::Construct(a) } => cmd_construct(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Steiner(a) => cmd_steiner(a),
        Command::Compare(a) => cmd_compare(a),
        Command::ImportTable2(a) => cmd_import(a),
        Command::WitnessCheck { pool } => cmd_witness_check(&pool),
        Command::SplitReport => cmd_split_report(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("usage error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn cmd_rvalue(a: RvalueArgs) -> CmdResult {
    let n = a.field.n;
    a.field.spec()?;
    let set_a = SubsetMask::parse(n, &a.set)?;
    let set_b = a.b.as_deref().map(|s| SubsetMask::parse(n, s)).transpose()?.unwrap_or_else(|| set_a.clone());
    let set_c = a.c.as_deref().map(|s| SubsetMask::parse(n, s)).transpose()?.unwrap_or_else(|| set_a.clone());
    let mut out = io::stdout().lock();
    writeln!(out, "{}", r_abc(&set_a, &set_b, &set_c)?).map_err(anyhow::Error::from)?;
    if a.triples {
        for t in r_set(&set_a, &set_b, &set_c)? {
            writeln!(out, "{} + {} = {}", t.a, t.b, t.c).map_err(anyhow::Error::from)?;
        }
    }
    Ok(())
}

fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("rvalues-cache"))
}

fn emit_table(table: &SpectrumTable, output: &OutputArgs) -> CmdResult {
    if let Some(path) = &output.out {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        match output.format {
            Format::Json => {
                table.write_json(&mut w)?;
                writeln!(w).map_err(anyhow::Error::from)?;
            }
            Format::Csv => table.write_csv(&mut w)?,
        }
        w.flush().map_err(anyhow::Error::from)?;
    }
    if !output.quiet {
        print!("{}", table.render_grid());
    }
    Ok(())
}

fn cmd_brute(a: BruteArgs) -> CmdResult {
    let spec = a.field.spec()?;
    let n = a.field.n;
    if let Some(t) = a.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| usage(format!("thread pool: {e}")))?;
    }
    if let Some((lo, hi)) = a.sizes {
        let mut table = enumerate_combinations(n, lo..=hi, a.counts)?;
        table.poly = Some(spec.poly());
        return emit_table(&table, &a.output);
    }
    if n >= 6 {
        return Err(usage(format!("n = {n} is too large for a full sweep; use --sizes LO..HI or `spectrum construct`")));
    }
    if n == 5 && !a.confirm_long {
        return Err(usage("n = 5 sweeps 2^31 subsets; pass --confirm-long to run it"));
    }
    let half = 1usize << (n - 1);
    let max_size = a.max_size.unwrap_or(half);
    let opts = SweepOptions { n, max_size, counts: a.counts };
    let threads = a.threads.unwrap_or_else(rayon::current_num_threads);
    let shards = a.shards.unwrap_or_else(|| default_shard_count(n, threads));
    let checkpoint = a.checkpoint.clone().or_else(|| {
        (n == 5).then(|| cache_dir().join(format!("brute-n5-max{max_size}{}.ckpt.json", if a.counts { "-counts" } else { "" })))
    });

    let mut run = match &checkpoint {
        Some(path) if a.resume && path.exists() => {
            let run = SweepRun::load(path)?;
            if !run.matches(opts) {
                return Err(usage(format!("checkpoint {} was made with different options", path.display())));
            }
            eprintln!("resuming from {} ({} of {} subsets done)", path.display(), run.done(), run.total());
            run
        }
        _ => SweepRun::new(opts, shards)?,
    };
    if let Some(path) = &checkpoint {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(anyhow::Error::from)?;
        }
    }
    let every = a.checkpoint_every.max(1);
    while !run.is_done() {
        run.run_round(every);
        if let Some(path) = &checkpoint {
            run.save(path)?;
            eprintln!("checkpoint: {} of {} subsets", run.done(), run.total());
        }
    }
    let mut table = run.finish()?;
    table.poly = Some(spec.poly());
    if let Some(path) = &checkpoint {
        let _ = std::fs::remove_file(path);
    }
    let table = if a.zero_free_only || max_size < half { table } else { table.extend_full()? };
    emit_table(&table, &a.output)
}

fn read_pool(path: &Path) -> Result<WitnessPool, Failure> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(WitnessPool::read_jsonl(BufReader::new(file))?)
}

fn cmd_construct(a: ConstructArgs) -> CmdResult {
    let spec = a.field.spec()?;
    let n = a.field.n;
    if n < 3 && a.base_pool.is_none() {
        return Err(usage("construct starts from the exhaustive n = 3 pool; use n >= 3"));
    }
    let pool = match &a.base_pool {
        Some(path) => {
            let mut pool = read_pool(path)?;
            if pool.n > n {
                return Err(usage(format!("base pool is for n = {}, above the target n = {n}", pool.n)));
            }
            for level in pool.n + 1..=n {
                pool = lift(&pool, level)?;
            }
            pool
        }
        None => bootstrap(3, n)?.pop().expect("non-empty"),
    };
    for level in 4..=n {
        let s = r25_search(level)?;
        if !s.missing.is_empty() {
            eprintln!(
                "note: n = {level}: no two-plus-five witness for {:?}{}",
                s.missing,
                if s.exhaustive { " (searched exhaustively)" } else { "" }
            );
        }
    }
    if let Some(path) = &a.pool_out {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        pool.write_jsonl(&mut w)?;
        w.flush().map_err(anyhow::Error::from)?;
    }
    let mut table = pool.to_table();
    table.poly = Some(spec.poly());
    let table = if a.zero_free_only { table } else { table.extend_full()? };
    emit_table(&table, &a.output)
}

fn print_sweep(rep: &SweepReport) {
    for (id, t) in &rep.tallies {
        println!("{:<18} checked {:>8}  passed {:>8}  skipped {:>6}", id.name(), t.checked, t.passed, t.skipped);
        for f in &t.failures {
            println!("  FAIL {}", serde_json::to_string(f).unwrap_or_default());
        }
    }
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let rep = if a.exhaustive {
        if a.n > 2 {
            return Err(usage("--exhaustive is limited to n <= 2"));
        }
        exhaustive_sweep(a.n)?
    } else {
        gf2_rvalues::field::check_dimension(a.n)?;
        random_sweep(a.n, a.trials, a.seed)
    };
    print_sweep(&rep);
    if rep.all_passed() {
        println!("all identities hold");
        Ok(())
    } else {
        Err(Failure::Check(anyhow!("identity failures")))
    }
}

fn cmd_steiner(a: SteinerArgs) -> CmdResult {
    let set = SubsetMask::parse(a.n, &a.set)?;
    let blocks = steiner_blocks(&set)?;
    for b in &blocks {
        println!("{{{},{},{}}}", b.elements[0], b.elements[1], b.elements[2]);
    }
    let rv = gf2_rvalues::r(&set);
    println!("blocks: {}", blocks.len());
    let consistent = rv as usize == 6 * blocks.len();
    println!("r = {rv}, r/6 = {}: {}", rv / 6, if consistent { "consistent" } else { "INCONSISTENT" });
    if consistent {
        Ok(())
    } else {
        Err(Failure::Check(anyhow!("block count does not match r/6")))
    }
}

fn read_table(path: &Path) -> Result<SpectrumTable, Failure> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    SpectrumTable::read_json(BufReader::new(file))
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Check)
}

fn cmd_compare(a: CompareArgs) -> CmdResult {
    let mut ta = read_table(&a.a)?;
    let mut tb = read_table(&a.b)?;
    if a.zero_free {
        ta = ta.restricted(ZeroClass::ZeroFree, usize::MAX);
        tb = tb.restricted(ZeroClass::ZeroFree, usize::MAX);
    }
    let rep = compare(&ta, &tb)?;
    let label = |p: &Path| p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    print!("{}", rep.render(&label(&a.a), &label(&a.b)));
    let failed = if a.superset { rep.only_b_count() > 0 } else { !rep.is_empty() };
    if failed {
        Err(Failure::Check(anyhow!("spectra differ")))
    } else {
        Ok(())
    }
}

fn cmd_import(a: ImportArgs) -> CmdResult {
    let table = match &a.csv {
        Some(path) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            import_pairs(a.n, BufReader::new(file))?
        }
        None if a.n == 6 => import_pairs(6, TABLE_N6_CSV.as_bytes())?,
        None => return Err(usage("the bundled table is for n = 6; pass a CSV for other n")),
    };
    if let Some(path) = &a.out {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        table.write_json(&mut w)?;
        writeln!(w).map_err(anyhow::Error::from)?;
    }
    print!("{}", table.render_grid());
    Ok(())
}

fn cmd_witness_check(path: &Path) -> CmdResult {
    let pool = read_pool(path)?;
    let sizes = pool.max_size().map_or(0, |m| m + 1);
    println!("{} witnesses verified (n = {}, sizes 0..{})", pool.len(), pool.n, sizes.saturating_sub(1));
    Ok(())
}

fn cmd_split_report() -> CmdResult {
    let zf = gf2_rvalues::enumerate::enumerate_zero_free(SweepOptions::half(4), None)?;
    let rep = split_report(&zf.extend_full()?)?;
    print!("{}", rep.render());
    if rep.row_mismatches.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(anyhow!("row unions differ from the exhaustive spectrum")))
    }
}
