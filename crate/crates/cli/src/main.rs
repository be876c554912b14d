mod bundle;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dispersa_core::extremal::{
    certify_disperser_exhaustive, certify_multiset_exhaustive, plan_disperser_params, plan_multiset_params,
    refute_disperser_randomized, refute_multiset_randomized, sample_certified, CertifyOptions, DEFAULT_FAMILY_CAP,
    DEFAULT_SUBSET_CAP,
};
use dispersa_core::graphcode::{agreement, fold_list_decode, list_decode, unique_decode, FoldParams, FoldedWord};
use dispersa_core::harness::{
    brute_force_family, flip_family, list_budget, run_experiment, runtime_scaling, trial_folded, trial_list,
    trial_unique, unique_lattice, FamilyShape, ListTrials, Strategy, TrialReport, UniqueTrials,
};
use dispersa_core::mothercode::{find_inner_code, MotherCode};
use dispersa_core::plurality::{pair_agreement_bound, scan_plurality, ScanMode, SCAN_CAP};
use dispersa_core::rng::derive_seed;
use dispersa_core::{BipartiteGraph, DisperserKind, DisperserSpec, LinearCode, ReceivedWord, Symbol};
use serde::Serialize;

use bundle::{Code, CodeBundle, FoldedBranch};

#[derive(Parser)]
#[command(name = "dispersa", version, about = "Graph-concatenated codes over certified dispersers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a left-regular bipartite graph, optionally certified.
    BuildGraph(BuildGraph),
    /// Certify or refute a graph as a disperser or multi-set disperser.
    Certify(Certify),
    /// Bundle a graph with a linear mother code (and optionally a folded branch).
    BuildCode(BuildCode),
    /// Encode a message.
    Encode(Encode),
    /// Decode a received word.
    Decode(Decode),
    /// Run randomized decoding trials on a code file.
    Trial(Trial),
    /// Maximize the plurality sum over L-subsets of a code.
    PluralityScan(PluralityScan),
    /// Measure decode time against length.
    Scaling(Scaling),
    /// Run an experiment config and write report.json and report.csv.
    Report(Report),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Disperser,
    Multiset,
}

impl From<Kind> for DisperserKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Disperser => DisperserKind::Disperser,
            Kind::Multiset => DisperserKind::Multiset,
        }
    }
}

#[derive(Args)]
struct BuildGraph {
    #[arg(long)]
    n_left: usize,
    /// Threshold used for planning and certification.
    #[arg(long)]
    k: usize,
    #[arg(long)]
    delta: f64,
    #[arg(long, value_enum, default_value = "disperser")]
    kind: Kind,
    /// Overrides the planned right side.
    #[arg(long)]
    n_right: Option<usize>,
    /// Overrides the planned degree.
    #[arg(long)]
    degree: Option<usize>,
    /// Resample until certification does not refute the graph.
    #[arg(long)]
    certified: bool,
    #[arg(long, default_value_t = 200)]
    attempts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the certificate when `--certified` is given.
    #[arg(long)]
    cert_out: Option<PathBuf>,
}

#[derive(Args)]
struct Certify {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    delta: f64,
    /// Family size for multi-set certification.
    #[arg(long)]
    t: Option<usize>,
    #[arg(long, conflicts_with = "trials")]
    exhaustive: bool,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildCode {
    #[arg(long)]
    graph: PathBuf,
    /// Linear code file; otherwise a random code is drawn from `--q` and `--dim`.
    #[arg(long, conflicts_with_all = ["q", "dim"])]
    mother: Option<PathBuf>,
    #[arg(long, requires = "dim")]
    q: Option<usize>,
    #[arg(long, requires = "q")]
    dim: Option<usize>,
    /// Random codes drawn when keeping the best distance.
    #[arg(long, default_value_t = 20)]
    attempts: usize,
    /// Left size of the second branch; makes the code folded.
    #[arg(long)]
    fold_n_left: Option<usize>,
    #[arg(long, default_value_t = 3)]
    fold_degree: usize,
    #[arg(long, default_value_t = 0.5)]
    inner_distance: f64,
    #[arg(long, default_value_t = 12)]
    inner_max_len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Encode {
    #[arg(long)]
    code: PathBuf,
    /// Comma-separated message symbols.
    #[arg(long, value_delimiter = ',')]
    message: Vec<Symbol>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DecodeMode {
    Unique,
    List,
    Fold,
}

#[derive(Args)]
struct Decode {
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    word: PathBuf,
    #[arg(long, value_enum)]
    mode: DecodeMode,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    ell: usize,
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    /// Folded filter; defaults to `1/ell + k/N`.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TrialMode {
    Unique,
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    UniformRandom,
    Clustered,
    Targeted,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::UniformRandom => Strategy::UniformRandom,
            StrategyArg::Clustered => Strategy::Clustered,
            StrategyArg::Targeted => Strategy::Targeted,
        }
    }
}

#[derive(Args)]
struct Trial {
    #[arg(long)]
    code: PathBuf,
    #[arg(long, value_enum)]
    mode: TrialMode,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    ell: usize,
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Unique mode cells as `e:s`, comma-separated; defaults to the in-budget lattice.
    #[arg(long, value_delimiter = ',')]
    cells: Vec<String>,
    /// List mode error counts; defaults to `0..=budget`.
    #[arg(long, value_delimiter = ',')]
    errors: Vec<usize>,
    #[arg(long, value_enum, default_value = "uniform-random")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 0)]
    permutations: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the per-cell CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct PluralityScan {
    #[arg(long)]
    code: PathBuf,
    #[arg(long = "L")]
    l: usize,
    /// Threshold in the bound `n + C(L,2) k`; defaults to the largest
    /// pairwise agreement plus one.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, conflicts_with = "trials")]
    exhaustive: bool,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScalingMotherArg {
    Flip,
    BruteForce,
}

#[derive(Args)]
struct Scaling {
    #[arg(long, value_delimiter = ',', default_value = "2048,4096,8192,16384")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, value_enum, default_value = "flip")]
    mother: ScalingMotherArg,
    #[arg(long, default_value_t = 8)]
    degree: usize,
    #[arg(long, default_value_t = 6)]
    check_degree: usize,
    #[arg(long, default_value_t = 0)]
    refute_trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Report {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "report")]
    out_dir: PathBuf,
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            r => Ok(r?),
        },
    }
}

fn read_graph(path: &Path) -> Result<BipartiteGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(BipartiteGraph::from_json(&text)?)
}

fn build_graph(a: BuildGraph) -> Result<()> {
    let kind = DisperserKind::from(a.kind);
    let (d, m) = match kind {
        DisperserKind::Disperser => plan_disperser_params(a.n_left, a.k, a.delta)?,
        DisperserKind::Multiset => plan_multiset_params(a.n_left, a.k, a.delta)?,
    };
    let (m, d) = (a.n_right.unwrap_or(m), a.degree.unwrap_or(d));
    let g = if a.certified {
        let spec = DisperserSpec { k: a.k, delta: a.delta, kind };
        let (g, cert) = sample_certified(a.n_left, m, d, &spec, a.attempts, a.seed, &CertifyOptions::default())?;
        match &a.cert_out {
            Some(p) => emit(&cert, Some(p))?,
            None => eprintln!("verdict: {:?}", cert.verdict),
        }
        g
    } else {
        BipartiteGraph::sample_left_regular(a.n_left, m, d, a.seed)?
    };
    emit(&g.to_file(), a.out.as_deref())
}

fn certify(a: Certify) -> Result<()> {
    let g = read_graph(&a.graph)?;
    let spec = DisperserSpec { k: a.k, delta: a.delta, kind: a.kind.into() };
    let cert = match (spec.kind, a.trials) {
        (DisperserKind::Disperser, None) => certify_disperser_exhaustive(&g, &spec, DEFAULT_SUBSET_CAP)?,
        (DisperserKind::Disperser, Some(t)) => refute_disperser_randomized(&g, &spec, t, a.seed)?,
        (DisperserKind::Multiset, None) => {
            certify_multiset_exhaustive(&g, &spec, a.t.unwrap_or(3), DEFAULT_FAMILY_CAP)?
        }
        (DisperserKind::Multiset, Some(trials)) => {
            let t = a.t.unwrap_or_else(|| (g.n_left() / a.k).clamp(2, 3));
            refute_multiset_randomized(&g, &spec, t, trials, a.seed)?
        }
    };
    emit(&cert, a.out.as_deref())
}

fn build_code(a: BuildCode) -> Result<()> {
    let g = read_graph(&a.graph)?;
    let mother = match (&a.mother, a.q, a.dim) {
        (Some(p), _, _) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            LinearCode::from_json(&text)?
        }
        (None, Some(q), Some(dim)) => LinearCode::random_best_distance(q, g.n_right(), dim, a.attempts, a.seed)?,
        _ => bail!("give either --mother or both --q and --dim"),
    };
    if mother.length() != g.n_right() {
        bail!("mother length {} differs from n_right {}", mother.length(), g.n_right());
    }
    let folded = match a.fold_n_left {
        None => None,
        Some(n2) => {
            let fs = derive_seed(a.seed, &[4]);
            let inner = find_inner_code(mother.alphabet(), a.inner_distance, a.inner_max_len, fs)?;
            let g2 = BipartiteGraph::sample_left_regular(
                n2,
                mother.length() * inner.len(),
                a.fold_degree,
                derive_seed(fs, &[1]),
            )?;
            Some(FoldedBranch { graph: g2.to_file(), inner: inner.to_file() })
        }
    };
    let bundle = CodeBundle { graph: g.to_file(), mother: mother.to_file(), folded };
    bundle.build()?;
    emit(&bundle, a.out.as_deref())
}

fn encode(a: Encode) -> Result<()> {
    match CodeBundle::read(&a.code)?.build()? {
        Code::Graph(gc) => {
            let x = gc.encode_message(&a.message)?;
            emit(&ReceivedWord::clean(&x).to_file(gc.alphabet_q(), gc.degree()), a.out.as_deref())
        }
        Code::Folded(fc) => emit(&FoldedWord::clean(&fc.fold_encode_message(&a.message)?), a.out.as_deref()),
    }
}

#[derive(Serialize)]
struct Decoded<W> {
    words: Vec<W>,
    mother_words: Vec<Vec<Symbol>>,
}

fn decode(a: Decode) -> Result<()> {
    let text = fs::read_to_string(&a.word).with_context(|| format!("reading {}", a.word.display()))?;
    let code = CodeBundle::read(&a.code)?.build()?;
    match (a.mode, code) {
        (DecodeMode::Fold, Code::Folded(fc)) => {
            let y: FoldedWord = serde_json::from_str(&text).context("parsing folded word")?;
            let gamma = a.gamma.unwrap_or(1.0 / a.ell as f64 + a.k as f64 / fc.length() as f64);
            let out = fold_list_decode(&fc, &y, FoldParams { k: a.k, ell: a.ell, rho: a.rho, gamma })?;
            emit(&Decoded { words: out.words, mother_words: out.mother_words }, a.out.as_deref())
        }
        (DecodeMode::Fold, Code::Graph(_)) => bail!("fold mode needs a folded code file"),
        (_, Code::Folded(_)) => bail!("folded code files decode with --mode fold"),
        (mode, Code::Graph(gc)) => {
            let y = ReceivedWord::from_json(&text)?;
            y.validate(gc.alphabet_q(), gc.degree())?;
            let words = match mode {
                DecodeMode::Unique => unique_decode(&gc, &y, a.k)?.into_iter().collect(),
                _ => list_decode(&gc, &y, a.k, a.ell, a.rho)?,
            };
            let mother_words = words.iter().map(|w| mother_of(&gc, w)).collect();
            emit(&Decoded { words, mother_words }, a.out.as_deref())
        }
    }
}

/// Reads a mother codeword back off a left word.
fn mother_of(gc: &dispersa_core::GraphCode<LinearCode>, w: &[Vec<Symbol>]) -> Vec<Symbol> {
    let mut c = vec![0; gc.graph().n_right()];
    for (l, nb) in gc.graph().all_neighbors().iter().enumerate() {
        for (slot, &r) in nb.iter().enumerate() {
            c[r] = w[l][slot];
        }
    }
    c
}

fn parse_cell(s: &str) -> Result<(usize, usize)> {
    let (e, x) = s.split_once(':').with_context(|| format!("cell `{s}` is not `e:s`"))?;
    Ok((e.trim().parse()?, x.trim().parse()?))
}

fn trial(a: Trial) -> Result<()> {
    let report: TrialReport = match (a.mode, CodeBundle::read(&a.code)?.build()?) {
        (TrialMode::Unique, Code::Graph(gc)) => {
            let cells = if a.cells.is_empty() {
                unique_lattice(gc.length(), a.k)
            } else {
                a.cells.iter().map(|c| parse_cell(c)).collect::<Result<_>>()?
            };
            let cfg = UniqueTrials {
                cells,
                trials: a.trials,
                seed: a.seed,
                strategy: a.strategy.into(),
                permutations: a.permutations,
            };
            trial_unique(&gc, a.k, &cfg)?
        }
        (TrialMode::List, code) => {
            let n = match &code {
                Code::Graph(gc) => gc.length(),
                Code::Folded(fc) => fc.length(),
            };
            let errors = if a.errors.is_empty() {
                (0..=list_budget(n, a.k, a.ell).unwrap_or(0)).collect()
            } else {
                a.errors.clone()
            };
            match code {
                Code::Graph(gc) => {
                    let cfg = ListTrials {
                        errors,
                        trials: a.trials,
                        seed: a.seed,
                        ell: a.ell,
                        rho: a.rho,
                        strategy: a.strategy.into(),
                    };
                    trial_list(&gc, a.k, &cfg)?
                }
                Code::Folded(fc) => {
                    let gamma = a.gamma.unwrap_or(1.0 / a.ell as f64 + a.k as f64 / n as f64);
                    let params = FoldParams { k: a.k, ell: a.ell, rho: a.rho, gamma };
                    trial_folded(&fc, params, &errors, a.trials, a.seed)?
                }
            }
        }
        (TrialMode::Unique, Code::Folded(_)) => bail!("unique trials need a graph code file"),
    };
    if let Some(p) = &a.csv {
        report.write_csv(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)?;
    }
    emit(&report, a.out.as_deref())?;
    if report.wrong_decodes() > 0 || !report.in_budget_perfect() {
        bail!("in-budget failures or wrong decodes recorded");
    }
    Ok(())
}

#[derive(Serialize)]
struct ScanOutput {
    worst_sum: usize,
    bound: u128,
    witness: Vec<usize>,
    k: usize,
    examined: u128,
    exhaustive: bool,
}

fn plurality_scan(a: PluralityScan) -> Result<()> {
    let gc = CodeBundle::read(&a.code)?.graph_code()?;
    let image: Vec<Vec<Vec<Symbol>>> =
        gc.mother().codewords()?.iter().map(|c| gc.encode(c)).collect::<dispersa_core::Result<_>>()?;
    let k = match a.k {
        Some(k) => k,
        None => {
            let mut max = 0;
            for (i, x) in image.iter().enumerate() {
                for y in &image[..i] {
                    max = max.max(agreement(x, y));
                }
            }
            max + 1
        }
    };
    let mode = match a.trials {
        Some(trials) => ScanMode::Sampled { trials, seed: a.seed },
        None => ScanMode::Exhaustive { cap: SCAN_CAP },
    };
    let scan = scan_plurality(&image, a.l, mode)?;
    let out = ScanOutput {
        worst_sum: scan.worst_sum,
        bound: pair_agreement_bound(gc.length(), a.l, k),
        witness: scan.witness,
        k,
        examined: scan.examined,
        exhaustive: scan.exhaustive,
    };
    emit(&out, a.out.as_deref())
}

fn scaling(a: Scaling) -> Result<()> {
    let shape = FamilyShape { degree: a.degree, refute_trials: a.refute_trials, ..FamilyShape::default() };
    let report = match a.mother {
        ScalingMotherArg::Flip => runtime_scaling(&a.sizes, a.trials, a.seed, flip_family(shape, a.check_degree))?,
        ScalingMotherArg::BruteForce => runtime_scaling(&a.sizes, a.trials, a.seed, brute_force_family(shape))?,
    };
    emit(&report, a.out.as_deref())
}

fn report(a: Report) -> Result<()> {
    let out = run_experiment(&a.config, &a.out_dir)?;
    println!("hash {}", out.report.hash);
    println!("wrote {} and {}", out.json.display(), out.csv.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::BuildGraph(a) => build_graph(a),
        Command::Certify(a) => certify(a),
        Command::BuildCode(a) => build_code(a),
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Trial(a) => trial(a),
        Command::PluralityScan(a) => plurality_scan(a),
        Command::Scaling(a) => scaling(a),
        Command::Report(a) => report(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
