use std::time::Instant;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::channel::{corrupt, ChannelSpec, Strategy};
use crate::error::{Error, Result};
use crate::extremal::Certificate;
use crate::field::Symbol;
use crate::graphcode::{
    fold_list_decode, half_distance, list_decode_traced, unique_decode_traced, within_list_radius, FoldParams,
    FoldedCode, FoldedSymbol, FoldedWord, GraphCode, LeftWord, ReceivedWord, ScanOrder, UniqueOptions,
};
use crate::mothercode::{bf_list_recover, MotherCode};
use crate::rng::{derive_seed, rng_from_seed};

/// Metadata of the code a report was produced on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeMeta {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub k: usize,
    pub q: usize,
    /// Exact rate as `num/den`, when rational.
    pub rate: Option<String>,
    #[serde(default)]
    pub certificates: Vec<Certificate>,
}

impl CodeMeta {
    pub fn of<C: MotherCode>(gc: &GraphCode<C>, k: usize, certificates: Vec<Certificate>) -> Self {
        CodeMeta {
            n: gc.length(),
            m: gc.graph().n_right(),
            d: gc.degree(),
            k,
            q: gc.alphabet_q(),
            rate: gc.rate().map(|r| r.to_string()),
            certificates,
        }
    }
}

/// Outcome counts for one `(e, s)` cell.
///
/// `failures = trials - successes`. Among the failures, `declined` counts
/// trials where the decoder returned nothing, `wrong_decodes` those where it
/// returned another codeword no closer to `y` than the transmitted one, and
/// `miscorrections` those where the returned codeword is strictly closer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub e: usize,
    pub s: usize,
    pub in_budget: bool,
    pub trials: u64,
    pub successes: u64,
    pub failures: u64,
    pub declined: u64,
    pub wrong_decodes: u64,
    pub miscorrections: u64,
    pub mean_list: f64,
    pub max_list: usize,
    pub mean_ms: f64,
    /// Decoder bookkeeping steps contradicted by the ground truth.
    pub accounting_violations: u64,
    /// Trials whose success changed under a permuted scan order.
    pub order_violations: u64,
    /// Trials whose output list exceeded the brute-force recovery output.
    pub oracle_violations: u64,
}

impl CellReport {
    fn new(e: usize, s: usize, in_budget: bool) -> Self {
        CellReport {
            e,
            s,
            in_budget,
            trials: 0,
            successes: 0,
            failures: 0,
            declined: 0,
            wrong_decodes: 0,
            miscorrections: 0,
            mean_list: 0.0,
            max_list: 0,
            mean_ms: 0.0,
            accounting_violations: 0,
            order_violations: 0,
            oracle_violations: 0,
        }
    }

    fn record(&mut self, success: bool, list: usize, ms: f64) {
        self.trials += 1;
        if success {
            self.successes += 1;
        } else {
            self.failures += 1;
        }
        self.max_list = self.max_list.max(list);
        // running means keep the report independent of trial batching
        let t = self.trials as f64;
        self.mean_list += (list as f64 - self.mean_list) / t;
        self.mean_ms += (ms - self.mean_ms) / t;
    }

    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.successes as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub kind: String,
    pub meta: CodeMeta,
    pub cells: Vec<CellReport>,
}

impl TrialReport {
    pub fn wrong_decodes(&self) -> u64 {
        self.cells.iter().map(|c| c.wrong_decodes).sum()
    }

    /// Every in-budget cell succeeded on every trial.
    pub fn in_budget_perfect(&self) -> bool {
        self.cells.iter().filter(|c| c.in_budget).all(|c| c.successes == c.trials)
    }

    pub fn violations(&self) -> u64 {
        self.cells.iter().map(|c| c.accounting_violations + c.order_violations + c.oracle_violations).sum()
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["e", "s", "trials", "successes", "mean_list", "max_list", "mean_ms"])?;
        for c in &self.cells {
            out.write_record([
                c.e.to_string(),
                c.s.to_string(),
                c.trials.to_string(),
                c.successes.to_string(),
                format!("{:.6}", c.mean_list),
                c.max_list.to_string(),
                format!("{:.6}", c.mean_ms),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Wilson score interval for a binomial proportion at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // the bounds at p = 0 and p = 1 are exact; keep them free of rounding
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// All `(e, s)` with `e + s <= n` and `2e + s <= n - k + 1`: the in-budget
/// lattice plus the two half-distance levels just outside it.
pub fn unique_lattice(n: usize, k: usize) -> Vec<(usize, usize)> {
    let top = (n + 1).saturating_sub(k);
    let mut cells = Vec::new();
    for e in 0..=n {
        for s in 0..=n - e {
            if 2 * e + s <= top {
                cells.push((e, s));
            }
        }
    }
    cells
}

/// Largest error count within the list decoding radius, if any.
pub fn list_budget(n: usize, k: usize, ell: usize) -> Option<usize> {
    (0..=n).rev().find(|&e| within_list_radius(e, n, k, ell))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniqueTrials {
    pub cells: Vec<(usize, usize)>,
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub strategy: Strategy,
    /// Permuted scan orders replayed per trial.
    #[serde(default)]
    pub permutations: usize,
}

/// The image codeword closest to `x` other than `x` itself.
fn nearest_other(image: &[LeftWord], x: &LeftWord) -> Option<LeftWord> {
    image.iter().filter(|w| *w != x).min_by_key(|w| w.iter().zip(x).filter(|(a, b)| a != b).count()).cloned()
}

fn image_of<C: MotherCode>(gc: &GraphCode<C>) -> Result<Vec<LeftWord>> {
    gc.mother().codewords()?.iter().map(|c| gc.encode(c)).collect()
}

/// Targeting needs a second codeword; codes with one codeword fall back to uniform.
fn effective(strategy: Strategy, target: &Option<LeftWord>) -> Strategy {
    match (strategy, target) {
        (Strategy::Targeted, None) => Strategy::UniformRandom,
        _ => strategy,
    }
}

fn erroneous(y: &ReceivedWord, x: &LeftWord, u: usize) -> bool {
    y.values[u].as_ref().is_some_and(|v| v != &x[u])
}

/// Unique decoding against ground truth.
pub fn trial_unique<C: MotherCode>(gc: &GraphCode<C>, k: usize, cfg: &UniqueTrials) -> Result<TrialReport> {
    let n = gc.length();
    let q = gc.alphabet_q();
    let image = match cfg.strategy {
        Strategy::Targeted => Some(image_of(gc)?),
        _ => None,
    };
    let mut cells = Vec::with_capacity(cfg.cells.len());
    for (ci, &(e, s)) in cfg.cells.iter().enumerate() {
        if e + s > n {
            return Err(Error::param(format!("cell ({e}, {s}) exceeds length {n}")));
        }
        let mut cell = CellReport::new(e, s, 2 * e + s + k < n);
        for t in 0..cfg.trials {
            let mut rng = rng_from_seed(derive_seed(cfg.seed, &[ci as u64, t]));
            let c = gc.mother().random_codeword(&mut rng)?;
            let x = gc.encode(&c)?;
            let target = image.as_ref().and_then(|im| nearest_other(im, &x));
            let spec = ChannelSpec { e, s, strategy: effective(cfg.strategy, &target), seed: rng.gen() };
            let y = corrupt(&x, q, &spec, target.as_deref())?;

            let start = Instant::now();
            let out = unique_decode_traced(gc, &y, k, UniqueOptions::default())?;
            let ms = start.elapsed().as_secs_f64() * 1e3;

            let success = out.word.as_ref() == Some(&x);
            if let Some(w) = &out.word {
                if !success {
                    if half_distance(&y, w)? < half_distance(&y, &x)? {
                        cell.miscorrections += 1;
                    } else {
                        cell.wrong_decodes += 1;
                    }
                }
            } else {
                cell.declined += 1;
            }
            let bad_pairs = out
                .trace
                .erased_pairs
                .iter()
                .filter(|&&(u, v, _)| !erroneous(&y, &x, u) && !erroneous(&y, &x, v))
                .count();
            cell.accounting_violations += bad_pairs as u64;
            for _ in 0..cfg.permutations {
                let opts = UniqueOptions { order: ScanOrder::Permuted(rng.gen()), filler: 0 };
                let other = unique_decode_traced(gc, &y, k, opts)?;
                if cell.in_budget && (other.word.as_ref() == Some(&x)) != success {
                    cell.order_violations += 1;
                }
            }
            cell.record(success, usize::from(out.word.is_some()), ms);
        }
        cells.push(cell);
    }
    Ok(TrialReport { kind: "unique".into(), meta: CodeMeta::of(gc, k, Vec::new()), cells })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ListTrials {
    pub errors: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub ell: usize,
    pub rho: f64,
    #[serde(default)]
    pub strategy: Strategy,
}

/// List decoding against ground truth, with the phase accounting and the
/// brute-force recovery cross-check.
pub fn trial_list<C: MotherCode>(gc: &GraphCode<C>, k: usize, cfg: &ListTrials) -> Result<TrialReport> {
    let n = gc.length();
    let q = gc.alphabet_q();
    let image = match cfg.strategy {
        Strategy::Targeted => Some(image_of(gc)?),
        _ => None,
    };
    let mut cells = Vec::with_capacity(cfg.errors.len());
    for (ci, &e) in cfg.errors.iter().enumerate() {
        if e > n {
            return Err(Error::param(format!("error count {e} exceeds length {n}")));
        }
        let mut cell = CellReport::new(e, 0, within_list_radius(e, n, k, cfg.ell));
        for t in 0..cfg.trials {
            let mut rng = rng_from_seed(derive_seed(cfg.seed, &[ci as u64, t]));
            let c = gc.mother().random_codeword(&mut rng)?;
            let x = gc.encode(&c)?;
            let target = image.as_ref().and_then(|im| nearest_other(im, &x));
            let spec = ChannelSpec { e, s: 0, strategy: effective(cfg.strategy, &target), seed: rng.gen() };
            let y = corrupt(&x, q, &spec, target.as_deref())?;

            let start = Instant::now();
            let out = list_decode_traced(gc, &y, k, cfg.ell, cfg.rho)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;

            let mut bad = out.trace.phase1.iter().filter(|&&u| !erroneous(&y, &x, u)).count();
            bad += out
                .trace
                .phase2
                .iter()
                .filter(|(_, group)| group.iter().filter(|&&u| erroneous(&y, &x, u)).count() + 1 < cfg.ell)
                .count();
            cell.accounting_violations += bad as u64;
            let oracle = bf_list_recover(gc.mother(), &out.trace.lists, cfg.rho)?;
            if out.words.len() > oracle.len() {
                cell.oracle_violations += 1;
            }
            cell.record(out.words.contains(&x), out.words.len(), ms);
        }
        cells.push(cell);
    }
    Ok(TrialReport { kind: "list".into(), meta: CodeMeta::of(gc, k, Vec::new()), cells })
}

/// Replaces `e` whole folded symbols by random different ones.
pub fn corrupt_folded(word: &[FoldedSymbol], q: usize, e: usize, seed: u64) -> Result<FoldedWord> {
    if e > word.len() {
        return Err(Error::param(format!("error count {e} exceeds length {}", word.len())));
    }
    let mut rng = rng_from_seed(seed);
    let mut y = FoldedWord::clean(word);
    for p in rand::seq::index::sample(&mut rng, word.len(), e) {
        let orig = &word[p];
        let fresh = loop {
            let outer: Vec<Symbol> = orig.outer.iter().map(|_| rng.gen_range(0..q as Symbol)).collect();
            let inner: Vec<Vec<Symbol>> =
                orig.inner.iter().map(|b| b.iter().map(|_| rng.gen_range(0..2)).collect()).collect();
            let s = FoldedSymbol { outer, inner };
            if &s != orig {
                break s;
            }
        };
        y.values[p] = Some(fresh);
    }
    Ok(y)
}

/// Containment trials for the folded code at the given error counts.
pub fn trial_folded(
    fc: &FoldedCode,
    params: FoldParams,
    errors: &[usize],
    trials: u64,
    seed: u64,
) -> Result<TrialReport> {
    let n = fc.length();
    let q = fc.c1().alphabet();
    let bound = crate::extremal::floor_tol((1.0 - params.gamma) * n as f64);
    let mut cells = Vec::with_capacity(errors.len());
    for (ci, &e) in errors.iter().enumerate() {
        let in_budget = within_list_radius(e, n, params.k, params.ell) && e <= bound;
        let mut cell = CellReport::new(e, 0, in_budget);
        for t in 0..trials {
            let mut rng = rng_from_seed(derive_seed(seed, &[ci as u64, t]));
            let c = fc.c1().random_codeword(&mut rng)?;
            let z = fc.fold_encode(&c)?;
            let y = corrupt_folded(&z, q, e, rng.gen())?;
            let start = Instant::now();
            let out = fold_list_decode(fc, &y, params)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            cell.record(out.words.contains(&z), out.words.len(), ms);
        }
        cells.push(cell);
    }
    let b1 = fc.branch1();
    let meta = CodeMeta { rate: fc.rate().map(|r| r.to_string()), ..CodeMeta::of(b1, params.k, Vec::new()) };
    Ok(TrialReport { kind: "folded".into(), meta, cells })
}
