use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lpmphf::kmer::Kmer;
use lpmphf::spss::{read_sequences, KmerIter};
use lpmphf::theory::{density, side_probability, type_probabilities, TheoryParams};
use lpmphf::{
    generate_spss, load_spss, AnyLpMphf, BuildOptions, Error, FlType, GenConfig, HashSeed,
    InputFormat, LpHash, LpMphfBasic, LpMphfPartitioned, MinimizerScheme, SpssInput, StatsReport,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INTERNAL: u8 = 3;
const BENCH_RUNS: usize = 5;
/// Largest fraction of k-mers with an ambiguous minimizer accepted when `-m` is omitted.
const DEFAULT_MAX_XI: f64 = 0.05;

#[derive(Parser)]
#[command(
    name = "lpmphf",
    version,
    about = "Locality-preserving minimal perfect hashing of k-mers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a structure from a string set and write it to a file.
    Build(BuildArgs),
    /// Look up the k-mers of query strings.
    Query(QueryArgs),
    /// Measured statistics next to the closed forms.
    Stats(StatsArgs),
    /// Evaluate the closed forms for given k and m.
    Theory(TheoryArgs),
    /// Write a random string set whose k-mers are all distinct.
    GenSpss(GenArgs),
    /// Check a structure against the string set it was built from.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Fasta,
    Lines,
}

impl From<FormatArg> for InputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Fasta => InputFormat::Fasta,
            FormatArg::Lines => InputFormat::Lines,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Basic,
    Partitioned,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Tsv,
    Json,
    Kv,
}

#[derive(Args)]
struct InputArgs {
    /// String set, one record per FASTA entry or per line.
    #[arg(short = 'i', long = "input")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "fasta")]
    format: FormatArg,
    /// Check that all k-mers are distinct before building.
    #[arg(long)]
    validate: bool,
}

#[derive(Args)]
struct SchemeArgs {
    #[arg(short = 'k')]
    k: usize,
    /// Minimizer length; when omitted, the smallest length from ceil(log4 N)
    /// upward that leaves at most 5% of k-mers with an ambiguous minimizer.
    #[arg(short = 'm')]
    m: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "partitioned")]
    variant: VariantArg,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(short = 'o', long = "output")]
    output: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    /// Structure file written by `build`.
    #[arg(short = 'x', long = "index")]
    index: PathBuf,
    /// Query strings.
    #[arg(short = 'i', long = "input")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "fasta")]
    format: FormatArg,
    /// Expected k; a mismatch with the structure is an error.
    #[arg(short = 'k')]
    k: Option<usize>,
    /// Consecutive lookups that reuse minimizer state (default).
    #[arg(long, conflicts_with = "random")]
    streaming: bool,
    /// Independent lookups in shuffled order.
    #[arg(long)]
    random: bool,
    /// Print `*` for k-mers that are detectably not in the set.
    #[arg(long)]
    checked: bool,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Time both modes (median of 5 single-threaded runs) instead of printing values.
    #[arg(long)]
    bench: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Structure built from the input; built in memory when omitted.
    #[arg(short = 'x', long = "index", conflicts_with = "k")]
    index: Option<PathBuf>,
    #[arg(short = 'k', required_unless_present = "index")]
    k: Option<usize>,
    #[arg(short = 'm')]
    m: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "partitioned")]
    variant: VariantArg,
    #[arg(long = "out-format", value_enum, default_value = "tsv")]
    out_format: ReportFormat,
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(short = 'k')]
    k: u32,
    #[arg(short = 'm')]
    m: u32,
    /// Bits per key of the inner MPHF.
    #[arg(short = 'b', default_value_t = 3.0)]
    b: f64,
    #[arg(long = "little-oh", default_value_t = lpmphf::theory::DEFAULT_LITTLE_OH)]
    little_oh: f64,
}

#[derive(Args)]
struct GenArgs {
    /// Total number of bases.
    #[arg(long)]
    length: usize,
    #[arg(short = 'k')]
    k: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    records: usize,
    #[arg(short = 'o', long = "output")]
    output: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(short = 'x', long = "index")]
    index: PathBuf,
}

/// A self-check found the structure inconsistent with its input.
#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "verification failed: {}", self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<CheckFailed>().is_some() {
        return EXIT_INTERNAL;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::InvalidParams(_)) => EXIT_USAGE,
        Some(Error::ConstructionFailure { .. }) => EXIT_INTERNAL,
        Some(_) => EXIT_DATA,
        None if e.downcast_ref::<io::Error>().is_some() => EXIT_DATA,
        None => EXIT_INTERNAL,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Query(a) => cmd_query(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Theory(a) => cmd_theory(a),
        Command::GenSpss(a) => cmd_gen_spss(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn thread_pool(threads: usize) -> anyhow::Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("starting worker threads")
}

fn load_input(a: &InputArgs, k: usize) -> anyhow::Result<SpssInput> {
    load_spss(&a.input, k, a.format.into(), a.validate)
        .with_context(|| format!("reading {}", a.input.display()))
}

fn load_index(path: &Path) -> anyhow::Result<AnyLpMphf> {
    AnyLpMphf::load(path).with_context(|| format!("loading {}", path.display()))
}

fn build_in_memory(
    spss: &SpssInput,
    k: usize,
    m: Option<usize>,
    seed: u64,
    variant: VariantArg,
) -> anyhow::Result<AnyLpMphf> {
    let m = match m {
        Some(m) => m,
        None => MinimizerScheme::choose_m(spss, HashSeed(seed), DEFAULT_MAX_XI)?,
    };
    let scheme = MinimizerScheme::new(k, m, HashSeed(seed))?;
    let opts = BuildOptions::default();
    Ok(match variant {
        VariantArg::Basic => LpMphfBasic::build(spss, &scheme, &opts)?.into(),
        VariantArg::Partitioned => LpMphfPartitioned::build(spss, &scheme, &opts)?.into(),
    })
}

fn cmd_build(a: BuildArgs) -> anyhow::Result<()> {
    let s = &a.scheme;
    let spss = load_input(&a.input, s.k)?;
    let pool = thread_pool(s.threads)?;
    let t = Instant::now();
    let f = pool.install(|| build_in_memory(&spss, s.k, s.m, s.seed, s.variant))?;
    let elapsed = t.elapsed();
    f.save(&a.output)
        .with_context(|| format!("writing {}", a.output.display()))?;

    let report = pool.install(|| StatsReport::compute(&spss, &f))?;
    let mut out = io::stdout().lock();
    writeln!(out, "variant\t{}", f.variant())?;
    writeln!(out, "k\t{}\nm\t{}", report.k, report.m)?;
    writeln!(out, "kmers\t{}", report.num_kmers)?;
    writeln!(out, "minimizers\t{}", report.num_minimizers)?;
    writeln!(out, "xi\t{:.6}", report.xi)?;
    if let AnyLpMphf::Partitioned(p) = &f {
        for (t, c) in FlType::ALL.iter().zip(p.type_counts()) {
            writeln!(out, "{}\t{c}", t.name())?;
        }
    }
    writeln!(out, "bits_per_kmer\t{:.4}", report.bits_per_kmer)?;
    writeln!(
        out,
        "bits_per_kmer_computed\t{:.4}",
        report.predicted_bits()
    )?;
    writeln!(out, "epsilon\t{:.6}", report.epsilon)?;
    writeln!(out, "build_seconds\t{:.3}", elapsed.as_secs_f64())?;
    Ok(())
}

/// Value printed for one k-mer: its index, or `None` for a detected miss.
type Answer = Option<u64>;

fn stream_record(f: &AnyLpMphf, seq: &[u8], checked: bool) -> anyhow::Result<Vec<Answer>> {
    if seq.len() < f.scheme().k() {
        return Ok(Vec::new());
    }
    f.stream(seq, checked)?
        .map(|r| match r {
            Ok(v) => Ok(Some(v)),
            Err(Error::DefiniteMiss) => Ok(None),
            Err(e) => Err(e.into()),
        })
        .collect()
}

fn random_lookup(f: &AnyLpMphf, x: &Kmer, checked: bool) -> anyhow::Result<Answer> {
    if !checked {
        return Ok(Some(f.lookup(x)));
    }
    match f.lookup_checked(x) {
        Ok(v) => Ok(Some(v)),
        Err(Error::DefiniteMiss) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn encode_all(seqs: &[Vec<u8>], k: usize) -> anyhow::Result<Vec<Kmer>> {
    let mut out = Vec::new();
    for s in seqs {
        for (i, w) in s.windows(k).enumerate() {
            out.push(Kmer::encode(w).with_context(|| format!("k-mer at offset {i}"))?);
        }
    }
    Ok(out)
}

fn median(mut runs: Vec<Duration>) -> Duration {
    runs.sort();
    runs[runs.len() / 2]
}

fn cmd_query(a: QueryArgs) -> anyhow::Result<()> {
    let f = load_index(&a.index)?;
    let k = f.scheme().k();
    if let Some(want) = a.k {
        if want != k {
            return Err(Error::KMismatch {
                expected: k,
                got: want,
            }
            .into());
        }
    }
    let file = File::open(&a.input).with_context(|| format!("opening {}", a.input.display()))?;
    let seqs = read_sequences(file, a.format.into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);

    if a.bench {
        let kmers = encode_all(&seqs, k)?;
        let n = kmers.len();
        if n == 0 {
            println!("kmers\t0");
            return Ok(());
        }
        let mut shuffled = kmers;
        shuffled.shuffle(&mut rng);
        let (mut ts, mut tr) = (Vec::new(), Vec::new());
        for _ in 0..BENCH_RUNS {
            let t = Instant::now();
            for s in &seqs {
                std::hint::black_box(stream_record(&f, s, a.checked)?);
            }
            ts.push(t.elapsed());
            let t = Instant::now();
            for x in &shuffled {
                std::hint::black_box(random_lookup(&f, x, a.checked)?);
            }
            tr.push(t.elapsed());
        }
        let ns = |d: Duration| d.as_nanos() as f64 / n as f64;
        let (s, r) = (ns(median(ts)), ns(median(tr)));
        println!("kmers\t{n}");
        println!("streaming_ns_per_kmer\t{s:.2}");
        println!("random_ns_per_kmer\t{r:.2}");
        println!("speedup\t{:.2}", r / s);
        return Ok(());
    }

    let pool = thread_pool(a.threads)?;
    let t = Instant::now();
    let answers: Vec<Vec<Answer>> = if a.random {
        let kmers = encode_all(&seqs, k)?;
        let mut order: Vec<usize> = (0..kmers.len()).collect();
        order.shuffle(&mut rng);
        let mut flat = vec![None; kmers.len()];
        let results: Vec<anyhow::Result<Answer>> = pool.install(|| {
            order
                .par_iter()
                .map(|&i| random_lookup(&f, &kmers[i], a.checked))
                .collect()
        });
        for (&i, r) in order.iter().zip(results) {
            flat[i] = r?;
        }
        let mut it = flat.into_iter();
        seqs.iter()
            .map(|s| it.by_ref().take((s.len() + 1).saturating_sub(k)).collect())
            .collect()
    } else {
        pool.install(|| {
            seqs.par_iter()
                .map(|s| stream_record(&f, s, a.checked))
                .collect::<anyhow::Result<_>>()
        })?
    };
    let elapsed = t.elapsed();
    let total: usize = answers.iter().map(Vec::len).sum();

    let sink: Box<dyn Write> = match &a.output {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = BufWriter::new(sink);
    for v in answers.iter().flatten() {
        match v {
            Some(v) => writeln!(out, "{v}")?,
            None => writeln!(out, "*")?,
        }
    }
    out.flush()?;
    if total > 0 {
        eprintln!(
            "{total} k-mers, {:.1} ns/k-mer ({})",
            elapsed.as_nanos() as f64 / total as f64,
            if a.random { "random" } else { "streaming" }
        );
    }
    Ok(())
}

fn cmd_stats(a: StatsArgs) -> anyhow::Result<()> {
    let (spss, f) = match &a.index {
        Some(path) => {
            let f = load_index(path)?;
            (load_input(&a.input, f.scheme().k())?, f)
        }
        None => {
            let k = a.k.expect("clap enforces -k without --index");
            let spss = load_input(&a.input, k)?;
            let f = build_in_memory(&spss, k, a.m, a.seed, a.variant)?;
            (spss, f)
        }
    };
    let report = StatsReport::compute(&spss, &f)?;
    let text = match a.out_format {
        ReportFormat::Tsv => report.to_tsv(),
        ReportFormat::Json => report.to_json() + "\n",
        ReportFormat::Kv => report.to_key_values(),
    };
    print!("{text}");
    Ok(())
}

fn cmd_theory(a: TheoryArgs) -> anyhow::Result<()> {
    let params = TheoryParams::with_little_oh(a.k, a.m, a.b, a.little_oh)?;
    let w = params.w();
    let p = type_probabilities::<f64>(w);
    println!("w\t{w}");
    println!("density\t{:.6}", density::<f64>(w));
    println!("W\t{:.6}", side_probability::<f64>(w));
    println!("p_lr\t{:.6}", p.left_right_max);
    println!("p_l\t{:.6}", p.left_max);
    println!("p_r\t{:.6}", p.right_max);
    println!("p_n\t{:.6}", p.non_max);
    println!("bits_per_kmer_basic\t{:.6}", params.basic_bits_per_kmer());
    println!(
        "bits_per_kmer_partitioned\t{:.6}",
        params.partitioned_bits_per_kmer()
    );
    Ok(())
}

fn cmd_gen_spss(a: GenArgs) -> anyhow::Result<()> {
    let spss = generate_spss(GenConfig {
        length: a.length,
        k: a.k,
        seed: a.seed,
        records: a.records,
    })?;
    let out =
        File::create(&a.output).with_context(|| format!("creating {}", a.output.display()))?;
    spss.write_fasta(BufWriter::new(out))?;
    eprintln!(
        "{} records, {} bases, {} k-mers",
        spss.num_strings(),
        spss.total_len(),
        spss.num_kmers()
    );
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> anyhow::Result<()> {
    let f = load_index(&a.index)?;
    let k = f.scheme().k();
    let spss = load_input(&a.input, k)?;
    let n = spss.num_kmers();
    if f.num_kmers() != n {
        bail!(CheckFailed(format!(
            "structure has {} k-mers, input has {n}",
            f.num_kmers()
        )));
    }

    let mut seen = vec![false; n as usize];
    let mut adjacent = 0u64;
    for s in spss.strings() {
        let vals = f.stream_lookup(s)?;
        for (x, &v) in KmerIter::new(s, k).zip(&vals) {
            if f.lookup(&x) != v {
                bail!(CheckFailed(format!("streaming and random disagree on {x}")));
            }
        }
        for &v in &vals {
            if std::mem::replace(&mut seen[v as usize], true) {
                bail!(CheckFailed(format!("value {v} assigned twice")));
            }
        }
        adjacent += vals.windows(2).filter(|p| p[1] == p[0] + 1).count() as u64;
    }
    println!("bijective\tok");

    let records = f.scheme().split_all(&spss)?;
    let census = lpmphf::MinimizerCensus::from_records(&records);
    for r in records.iter().filter(|r| !census.is_ambiguous(r.minimizer)) {
        let s = &spss.strings()[r.string_id as usize];
        let vals = f.stream_lookup(&s[r.start..r.start + r.size as usize + k - 1])?;
        if vals.windows(2).any(|p| p[1] != p[0] + 1) {
            bail!(CheckFailed(format!(
                "super-k-mer at string {} offset {} is not consecutive",
                r.string_id, r.start
            )));
        }
    }
    println!("consecutive_within_super_kmers\tok");

    let eps = if n == 0 {
        0.0
    } else {
        1.0 - adjacent as f64 / n as f64
    };
    let floor = spss.fragmentation() + 1.0 / n.max(1) as f64;
    if n > 0 && eps < floor {
        bail!(CheckFailed(format!("epsilon {eps} below {floor}")));
    }
    println!("epsilon\t{eps:.6}");
    println!("variant\t{}", f.variant());
    Ok(())
}
