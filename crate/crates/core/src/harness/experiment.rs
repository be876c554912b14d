//! Config-driven pipelines: plan, build a mother code, sample a certified
//! graph, build the code, then run trials or scans and write reports.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::channel::Strategy;
use super::scaling::{brute_force_family, flip_family, runtime_scaling, FamilyShape, ScalingReport};
use super::trials::{
    list_budget, trial_folded, trial_list, trial_unique, unique_lattice, CodeMeta, ListTrials, TrialReport,
    UniqueTrials,
};
use crate::bigraph::BipartiteGraph;
use crate::error::{Error, Result};
use crate::extremal::{
    certify, plan_disperser_params, plan_multiset_params, sample_certified, Certificate, CertifyOptions, DisperserKind,
    DisperserSpec,
};
use crate::graphcode::{FoldParams, FoldedCode, GraphCode};
use crate::mothercode::{find_inner_code, ExpanderCode, LinearCode, MotherCode};
use crate::plurality::{multiset_lbar, pair_agreement_bound, scan_plurality, ScanMode, ScanResult, SCAN_CAP};
use crate::rng::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mother: Option<MotherConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<CodeConfig>,
    pub experiment: ExperimentSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphConfig {
    File {
        file: PathBuf,
        /// Threshold certified on the loaded graph; defaults to `code.k`.
        #[serde(default)]
        k: Option<usize>,
        #[serde(default)]
        certify_delta: Option<f64>,
    },
    Plan(PlanConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    #[serde(default)]
    pub kind: Option<DisperserKind>,
    pub n_left: usize,
    pub k: usize,
    /// Planning `delta`; fixes `D` and `M` unless overridden.
    pub delta: f64,
    #[serde(default)]
    pub n_right: Option<usize>,
    #[serde(default)]
    pub degree: Option<usize>,
    /// Certification `delta`; derived from the experiment when absent.
    #[serde(default)]
    pub certify_delta: Option<f64>,
    #[serde(default = "default_attempts")]
    pub attempts: usize,
    #[serde(default = "default_cert_trials")]
    pub trials: u64,
}

fn default_attempts() -> usize {
    200
}

fn default_cert_trials() -> u64 {
    200
}

fn default_code_attempts() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MotherConfig {
    /// Best-distance random linear code of length `M`.
    Linear {
        q: usize,
        dim: usize,
        #[serde(default = "default_code_attempts")]
        attempts: usize,
    },
    Repetition {
        q: usize,
    },
    /// Expander code on `M` variables.
    Expander {
        checks: usize,
        degree: usize,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeKind {
    #[default]
    Graph,
    Folded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeConfig {
    #[serde(default)]
    pub kind: CodeKind,
    /// Decoding threshold; defaults to the planned `k`.
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub ell: Option<usize>,
    #[serde(default)]
    pub rho: Option<f64>,
    /// Folded filter parameter; defaults to `1/ell + k/N`.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub folded: Option<FoldedConfig>,
}

/// Second branch of a folded code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoldedConfig {
    pub n_left: usize,
    pub degree: usize,
    #[serde(default = "default_inner_distance")]
    pub inner_distance: f64,
    #[serde(default = "default_inner_len")]
    pub inner_max_len: usize,
}

fn default_inner_distance() -> f64 {
    0.5
}

fn default_inner_len() -> usize {
    12
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingMother {
    #[default]
    Flip,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ExperimentSpec {
    Unique {
        /// Explicit `(e, s)` cells; the full lattice when absent.
        #[serde(default)]
        cells: Option<Vec<(usize, usize)>>,
        trials: u64,
        #[serde(default)]
        strategy: Strategy,
        #[serde(default)]
        permutations: usize,
    },
    List {
        /// Error counts; `0..=budget` when absent.
        #[serde(default)]
        errors: Option<Vec<usize>>,
        trials: u64,
        #[serde(default)]
        strategy: Strategy,
    },
    Plurality {
        l: usize,
        /// Sampled subsets; exhaustive when absent.
        #[serde(default)]
        samples: Option<usize>,
    },
    Scaling {
        sizes: Vec<usize>,
        trials: u64,
        #[serde(default)]
        mother: ScalingMother,
        #[serde(default)]
        shape: FamilyShape,
        #[serde(default = "default_check_degree")]
        check_degree: usize,
    },
}

fn default_check_degree() -> usize {
    6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PluralityOutcome {
    pub l: usize,
    pub scan: ScanResult,
    /// Largest agreement between distinct codewords.
    pub max_agreement: usize,
    /// `n + C(L, 2) k`.
    pub pair_bound: u128,
    /// `10 k Lbar (ln Lbar + 2)` for multi-set dispersers.
    #[serde(default)]
    pub multiset_bound: Option<f64>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentResult {
    Trials(TrialReport),
    Plurality(PluralityOutcome),
    Scaling(ScalingReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    #[serde(default)]
    pub meta: Option<CodeMeta>,
    pub result: ExperimentResult,
    /// SHA-256 of the report with timings zeroed and this field empty.
    pub hash: String,
}

impl ExperimentReport {
    /// Hash over everything except measured times.
    pub fn content_hash(&self) -> Result<String> {
        let mut r = self.clone();
        r.hash.clear();
        match &mut r.result {
            ExperimentResult::Trials(t) => t.cells.iter_mut().for_each(|c| c.mean_ms = 0.0),
            ExperimentResult::Scaling(s) => {
                s.points.iter_mut().for_each(|p| p.mean_ms = 0.0);
                s.exponent = 0.0;
                s.intercept = 0.0;
            }
            ExperimentResult::Plurality(_) => {}
        }
        let bytes = serde_json::to_vec(&r)?;
        Ok(hex::encode(Sha256::digest(&bytes)))
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        match &self.result {
            ExperimentResult::Trials(t) => t.write_csv(w),
            ExperimentResult::Scaling(s) => {
                let mut out = csv::Writer::from_writer(w);
                out.write_record(["n", "trials", "successes", "mean_ms"])?;
                for p in &s.points {
                    out.write_record([
                        p.n.to_string(),
                        p.trials.to_string(),
                        p.successes.to_string(),
                        format!("{:.6}", p.mean_ms),
                    ])?;
                }
                out.flush()?;
                Ok(())
            }
            ExperimentResult::Plurality(p) => {
                let mut out = csv::Writer::from_writer(w);
                out.write_record(["l", "worst_sum", "pair_bound", "examined", "exhaustive", "holds"])?;
                out.write_record([
                    p.l.to_string(),
                    p.scan.worst_sum.to_string(),
                    p.pair_bound.to_string(),
                    p.scan.examined.to_string(),
                    p.scan.exhaustive.to_string(),
                    p.holds.to_string(),
                ])?;
                out.flush()?;
                Ok(())
            }
        }
    }
}

/// Paths written by [`run_experiment`].
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub json: PathBuf,
    pub csv: PathBuf,
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    serde_json::from_str(text).map_err(|e| Error::from(e).in_stage("parse"))
}

/// Runs the config at `path` and writes `report.json` and `report.csv` into `out_dir`.
/// Relative file references in the config resolve against its directory.
pub fn run_experiment(path: &Path, out_dir: &Path) -> Result<ExperimentOutput> {
    let text = fs::read_to_string(path).map_err(|e| Error::from(e).in_stage("read"))?;
    let cfg = parse_config(&text)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let report = run_config(&cfg, base)?;
    write_report(&report, out_dir)
}

pub fn write_report(report: &ExperimentReport, out_dir: &Path) -> Result<ExperimentOutput> {
    let wrap = |e: Error| e.in_stage("write");
    fs::create_dir_all(out_dir).map_err(|e| wrap(e.into()))?;
    let json = out_dir.join("report.json");
    let csv = out_dir.join("report.csv");
    let text = serde_json::to_string_pretty(report).map_err(|e| wrap(e.into()))?;
    fs::write(&json, text + "\n").map_err(|e| wrap(e.into()))?;
    let file = fs::File::create(&csv).map_err(|e| wrap(e.into()))?;
    report.write_csv(file).map_err(wrap)?;
    Ok(ExperimentOutput { report: report.clone(), json, csv })
}

/// A mother code of whichever configured kind.
pub enum AnyMother {
    Linear(LinearCode),
    Expander(ExpanderCode),
}

impl AnyMother {
    fn boxed(self) -> Box<dyn MotherCode> {
        match self {
            AnyMother::Linear(c) => Box::new(c),
            AnyMother::Expander(c) => Box::new(c),
        }
    }
}

pub fn build_mother(cfg: &MotherConfig, length: usize, seed: u64, base: &Path) -> Result<AnyMother> {
    let c = match cfg {
        MotherConfig::Linear { q, dim, attempts } => {
            AnyMother::Linear(LinearCode::random_best_distance(*q, length, *dim, *attempts, seed)?)
        }
        MotherConfig::Repetition { q } => AnyMother::Linear(LinearCode::repetition(*q, length)?),
        MotherConfig::Expander { checks, degree } => {
            let g2 = BipartiteGraph::sample_left_regular(length, *checks, *degree, seed)?;
            AnyMother::Expander(ExpanderCode::new(g2))
        }
        MotherConfig::File { path } => {
            let text = fs::read_to_string(base.join(path))?;
            AnyMother::Linear(LinearCode::from_json(&text)?)
        }
    };
    let n = match &c {
        AnyMother::Linear(c) => c.length(),
        AnyMother::Expander(c) => c.length(),
    };
    if n != length {
        return Err(Error::LengthMismatch { expected: length, found: n });
    }
    Ok(c)
}

/// Stage seeds, one per pipeline step.
const SEED_MOTHER: u64 = 1;
const SEED_GRAPH: u64 = 2;
const SEED_TRIALS: u64 = 3;
const SEED_FOLD: u64 = 4;

pub fn run_config(cfg: &ExperimentConfig, base: &Path) -> Result<ExperimentReport> {
    let result_and_meta = match &cfg.experiment {
        ExperimentSpec::Scaling { sizes, trials, mother, shape, check_degree } => {
            let seed = derive_seed(cfg.seed, &[SEED_TRIALS]);
            let report = match mother {
                ScalingMother::Flip => runtime_scaling(sizes, *trials, seed, flip_family(*shape, *check_degree)),
                ScalingMother::BruteForce => runtime_scaling(sizes, *trials, seed, brute_force_family(*shape)),
            }
            .map_err(|e| e.in_stage("scaling"))?;
            (ExperimentResult::Scaling(report), None)
        }
        _ => run_code_pipeline(cfg, base)?,
    };
    let (result, meta) = result_and_meta;
    let mut report = ExperimentReport { config: cfg.clone(), meta, result, hash: String::new() };
    report.hash = report.content_hash()?;
    Ok(report)
}

fn require<'a, T>(x: &'a Option<T>, what: &str) -> Result<&'a T> {
    x.as_ref().ok_or_else(|| Error::param(format!("config needs a `{what}` section")))
}

fn run_code_pipeline(cfg: &ExperimentConfig, base: &Path) -> Result<(ExperimentResult, Option<CodeMeta>)> {
    let graph_cfg = require(&cfg.graph, "graph").map_err(|e| e.in_stage("parse"))?;
    let mother_cfg = require(&cfg.mother, "mother").map_err(|e| e.in_stage("parse"))?;
    let code_cfg = cfg.code.clone().unwrap_or(CodeConfig {
        kind: CodeKind::Graph,
        k: None,
        ell: None,
        rho: None,
        gamma: None,
        folded: None,
    });

    // plan
    let (n_left, n_right, degree, plan_k) = match graph_cfg {
        GraphConfig::Plan(p) => {
            let kind = p.kind.unwrap_or(DisperserKind::Disperser);
            let (d, m) = match kind {
                DisperserKind::Disperser => plan_disperser_params(p.n_left, p.k, p.delta),
                DisperserKind::Multiset => plan_multiset_params(p.n_left, p.k, p.delta),
            }
            .map_err(|e| e.in_stage("plan"))?;
            (p.n_left, p.n_right.unwrap_or(m), p.degree.unwrap_or(d), Some(p.k))
        }
        GraphConfig::File { k, .. } => (0, 0, 0, *k),
    };
    let loaded = match graph_cfg {
        GraphConfig::File { file, .. } => Some(
            fs::read_to_string(base.join(file))
                .map_err(Error::from)
                .and_then(|t| BipartiteGraph::from_json(&t))
                .map_err(|e| e.in_stage("graph"))?,
        ),
        GraphConfig::Plan(_) => None,
    };
    let n_right = loaded.as_ref().map_or(n_right, BipartiteGraph::n_right);
    let n_left = loaded.as_ref().map_or(n_left, BipartiteGraph::n_left);
    let k = code_cfg.k.or(plan_k).ok_or_else(|| Error::param("no threshold k in code or graph").in_stage("parse"))?;

    // mother
    let mother = build_mother(mother_cfg, n_right, derive_seed(cfg.seed, &[SEED_MOTHER]), base)
        .map_err(|e| e.in_stage("mother"))?;

    // certification spec
    let kind = match graph_cfg {
        GraphConfig::Plan(p) => p.kind.unwrap_or(DisperserKind::Disperser),
        GraphConfig::File { .. } => DisperserKind::Disperser,
    };
    let explicit = match graph_cfg {
        GraphConfig::Plan(p) => p.certify_delta,
        GraphConfig::File { certify_delta, .. } => *certify_delta,
    };
    let list_like = matches!(cfg.experiment, ExperimentSpec::List { .. }) || code_cfg.kind == CodeKind::Folded;
    let delta = match (explicit, list_like, kind) {
        (Some(d), _, _) => d,
        (None, _, DisperserKind::Multiset) => match graph_cfg {
            GraphConfig::Plan(p) => p.delta,
            GraphConfig::File { .. } => unreachable!("file graphs are certified as plain dispersers"),
        },
        (None, true, _) => code_cfg.rho.unwrap_or(0.5),
        (None, false, _) => {
            let d = match &mother {
                AnyMother::Linear(c) => c.min_distance(),
                AnyMother::Expander(c) => c.min_distance(),
            }
            .map_err(|e| e.in_stage("mother"))?;
            (d.saturating_sub(1)) as f64 / (2 * n_right) as f64
        }
    };
    let spec = DisperserSpec { k, delta, kind };

    // graph
    let graph_seed = derive_seed(cfg.seed, &[SEED_GRAPH]);
    let (graph, cert): (BipartiteGraph, Certificate) = match (graph_cfg, loaded) {
        (GraphConfig::Plan(p), _) => {
            let opts = CertifyOptions { trials: p.trials, ..CertifyOptions::default() };
            sample_certified(n_left, n_right, degree, &spec, p.attempts, graph_seed, &opts)
                .map_err(|e| e.in_stage("sample"))?
        }
        (GraphConfig::File { .. }, Some(g)) => {
            let c = certify(&g, &spec, &CertifyOptions::default(), graph_seed).map_err(|e| e.in_stage("certify"))?;
            (g, c)
        }
        (GraphConfig::File { .. }, None) => unreachable!("file graphs are loaded above"),
    };

    let trial_seed = derive_seed(cfg.seed, &[SEED_TRIALS]);
    if code_cfg.kind == CodeKind::Folded {
        let AnyMother::Linear(c1) = mother else {
            return Err(Error::param("folded codes need a linear mother").in_stage("code"));
        };
        let fold =
            code_cfg.folded.as_ref().ok_or_else(|| Error::param("folded code needs `folded`").in_stage("code"))?;
        let ell = code_cfg.ell.unwrap_or(2);
        let rho = code_cfg.rho.unwrap_or(0.5);
        let gamma = code_cfg.gamma.unwrap_or(1.0 / ell as f64 + k as f64 / graph.n_left() as f64);
        let fs = derive_seed(cfg.seed, &[SEED_FOLD]);
        let fc = find_inner_code(c1.alphabet(), fold.inner_distance, fold.inner_max_len, fs)
            .and_then(|inner| {
                let m2 = c1.length() * inner.len();
                let g2 = BipartiteGraph::sample_left_regular(fold.n_left, m2, fold.degree, derive_seed(fs, &[1]))?;
                FoldedCode::new(graph, c1, g2, inner)
            })
            .map_err(|e| e.in_stage("code"))?;
        let ExperimentSpec::List { errors, trials, .. } = &cfg.experiment else {
            return Err(Error::param("folded codes support list experiments only").in_stage("code"));
        };
        let errors = errors.clone().unwrap_or_else(|| (0..=list_budget(fc.length(), k, ell).unwrap_or(0)).collect());
        let params = FoldParams { k, ell, rho, gamma };
        let mut report = trial_folded(&fc, params, &errors, *trials, trial_seed).map_err(|e| e.in_stage("trials"))?;
        report.meta.certificates.push(cert);
        let meta = report.meta.clone();
        return Ok((ExperimentResult::Trials(report), Some(meta)));
    }

    let gc = GraphCode::new(graph, mother.boxed()).map_err(|e| e.in_stage("code"))?;
    let n = gc.length();
    let result = match &cfg.experiment {
        ExperimentSpec::Unique { cells, trials, strategy, permutations } => {
            let t = UniqueTrials {
                cells: cells.clone().unwrap_or_else(|| unique_lattice(n, k)),
                trials: *trials,
                seed: trial_seed,
                strategy: *strategy,
                permutations: *permutations,
            };
            ExperimentResult::Trials(trial_unique(&gc, k, &t).map_err(|e| e.in_stage("trials"))?)
        }
        ExperimentSpec::List { errors, trials, strategy } => {
            let ell = code_cfg.ell.unwrap_or(2);
            let t = ListTrials {
                errors: errors.clone().unwrap_or_else(|| (0..=list_budget(n, k, ell).unwrap_or(0)).collect()),
                trials: *trials,
                seed: trial_seed,
                ell,
                rho: code_cfg.rho.unwrap_or(0.5),
                strategy: *strategy,
            };
            ExperimentResult::Trials(trial_list(&gc, k, &t).map_err(|e| e.in_stage("trials"))?)
        }
        ExperimentSpec::Plurality { l, samples } => {
            let image: Vec<_> = gc
                .mother()
                .codewords()
                .and_then(|cs| cs.iter().map(|c| gc.encode(c)).collect::<Result<Vec<_>>>())
                .map_err(|e| e.in_stage("scan"))?;
            let mode = match samples {
                Some(t) => ScanMode::Sampled { trials: *t, seed: trial_seed },
                None => ScanMode::Exhaustive { cap: SCAN_CAP },
            };
            let scan = scan_plurality(&image, *l, mode).map_err(|e| e.in_stage("scan"))?;
            let mut max_agreement = 0;
            for (i, a) in image.iter().enumerate() {
                for b in &image[..i] {
                    max_agreement = max_agreement.max(crate::graphcode::agreement(a, b));
                }
            }
            let pair_bound = pair_agreement_bound(n, *l, k);
            let multiset_bound = (kind == DisperserKind::Multiset).then(|| {
                let lbar = multiset_lbar(n, k) as f64;
                10.0 * k as f64 * lbar * (lbar.ln() + 2.0)
            });
            let holds =
                scan.worst_sum as u128 <= pair_bound && multiset_bound.is_none_or(|b| (scan.worst_sum as f64) < b);
            ExperimentResult::Plurality(PluralityOutcome {
                l: *l,
                scan,
                max_agreement,
                pair_bound,
                multiset_bound,
                holds,
            })
        }
        ExperimentSpec::Scaling { .. } => unreachable!("scaling runs without a code"),
    };
    let meta = CodeMeta::of(&gc, k, vec![cert]);
    let result = match result {
        ExperimentResult::Trials(t) => ExperimentResult::Trials(TrialReport { meta: meta.clone(), ..t }),
        other => other,
    };
    Ok((result, Some(meta)))
}
