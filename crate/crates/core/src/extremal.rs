//! Disperser and multi-set disperser planning, certification and refutation.
//!
//! Exhaustive certifiers enumerate every subset (or family) the definition
//! quantifies over and are only run under an explicit enumeration cap.
//! Randomized refuters are sound but not complete: they never certify, they
//! either find a violation or report how many probes passed.

use rand::seq::index::sample as sample_indices;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::bigraph::BipartiteGraph;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, derived_rng};

const EPS: f64 = 1e-9;

/// Default cap on the number of size-k subsets enumerated by the plain certifier.
pub const DEFAULT_SUBSET_CAP: u128 = 10_000_000;
/// Default cap on the number of normalized families enumerated by the multi-set certifier.
pub const DEFAULT_FAMILY_CAP: u128 = 1 << 28;
/// Resampling attempts per random family before giving up.
const FAMILY_RETRIES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisperserKind {
    #[serde(alias = "plain")]
    Disperser,
    Multiset,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisperserSpec {
    pub k: usize,
    pub delta: f64,
    pub kind: DisperserKind,
}

impl DisperserSpec {
    pub fn plain(k: usize, delta: f64) -> Self {
        DisperserSpec { k, delta, kind: DisperserKind::Disperser }
    }

    pub fn multiset(k: usize, delta: f64) -> Self {
        DisperserSpec { k, delta, kind: DisperserKind::Multiset }
    }

    /// Checks these parameters against a target graph: `0 < k < n_left`, `0 <= delta < 1`.
    ///
    /// `delta = 0` is accepted so that exact-coverage questions can be asked.
    pub fn validate_for(&self, g: &BipartiteGraph) -> Result<()> {
        if self.k == 0 || self.k >= g.n_left() {
            return Err(Error::param(format!("k must satisfy 0 < k < n_left (k={}, n_left={})", self.k, g.n_left())));
        }
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Error::param(format!("delta must lie in [0, 1), got {}", self.delta)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedExhaustive,
    Refuted,
    PassedRandomized,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    /// A left subset whose neighborhood is too small.
    Subset(Vec<usize>),
    /// Right subsets `S_1..S_t` and the left vertices trapped inside some
    /// `(S_i Δ S_j)^c`.
    Family { sets: Vec<Vec<usize>>, offenders: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: DisperserKind,
    pub k: usize,
    pub delta: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Largest family size covered, multi-set certificates only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Certificate {
    fn new(spec: &DisperserSpec, verdict: Verdict) -> Self {
        Certificate {
            kind: spec.kind,
            k: spec.k,
            delta: spec.delta,
            verdict,
            trials: None,
            seed: None,
            t: None,
            witness: None,
        }
    }

    fn refuted(spec: &DisperserSpec, witness: Witness) -> Self {
        Certificate { witness: Some(witness), ..Self::new(spec, Verdict::Refuted) }
    }

    pub fn is_refuted(&self) -> bool {
        self.verdict == Verdict::Refuted
    }

    pub fn spec(&self) -> DisperserSpec {
        DisperserSpec { k: self.k, delta: self.delta, kind: self.kind }
    }

    /// Re-runs the definitional check on the witness. `true` iff the
    /// certificate is refuted and its witness really is a violation.
    pub fn replay(&self, g: &BipartiteGraph) -> Result<bool> {
        let spec = self.spec();
        match (&self.verdict, &self.witness) {
            (Verdict::Refuted, Some(Witness::Subset(s))) => Ok(s.len() >= spec.k && disperser_violation(g, &spec, s)?),
            (Verdict::Refuted, Some(Witness::Family { sets, .. })) => {
                let masks: Vec<Vec<bool>> = sets
                    .iter()
                    .map(|s| {
                        let mut m = vec![false; g.n_right()];
                        for &w in s {
                            if w < m.len() {
                                m[w] = true;
                            }
                        }
                        m
                    })
                    .collect();
                Ok(family_offenders(g, &spec, &masks)?.is_some_and(|o| o.len() > sets.len() * spec.k))
            }
            _ => Ok(false),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub(crate) fn ceil_tol(x: f64) -> usize {
    (x - EPS).ceil().max(0.0) as usize
}

pub(crate) fn floor_tol(x: f64) -> usize {
    (x + EPS).floor().max(0.0) as usize
}

/// Smallest neighborhood size meeting `|Γ(S)| >= (1 - delta) * n_right`.
pub fn required_coverage(n_right: usize, delta: f64) -> usize {
    ceil_tol((1.0 - delta) * n_right as f64)
}

/// Smallest symmetric-difference size meeting `|S_i Δ S_j| >= delta * n_right`.
pub fn required_separation(n_right: usize, delta: f64) -> usize {
    ceil_tol(delta * n_right as f64).max(1)
}

fn check_plan_args(n_left: usize, k: usize, delta: f64) -> Result<()> {
    if k == 0 || k >= n_left {
        return Err(Error::param(format!("need 0 < k < n_left (k={k}, n_left={n_left})")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// `(degree, n_right)` for a random plain disperser:
/// `D = ceil(4 log2(N/K) / delta)`, `M = max(1, ceil(K D / max(1, log2(1/delta))))`.
pub fn plan_disperser_params(n_left: usize, k: usize, delta: f64) -> Result<(usize, usize)> {
    check_plan_args(n_left, k, delta)?;
    let ratio = (n_left as f64 / k as f64).log2();
    let degree = ceil_tol(4.0 * ratio / delta).max(1);
    let denom = (1.0 / delta).log2().max(1.0);
    let n_right = ceil_tol(k as f64 * degree as f64 / denom).max(1);
    Ok((degree, n_right))
}

/// `(degree, n_right)` for a random multi-set disperser:
/// `D = ceil(4 log2(N/K) / delta)`, `M = floor(K log2(N/K))`.
pub fn plan_multiset_params(n_left: usize, k: usize, delta: f64) -> Result<(usize, usize)> {
    check_plan_args(n_left, k, delta)?;
    if 2 * k >= n_left {
        return Err(Error::param(format!("multi-set planning needs k < n_left/2 (k={k}, n_left={n_left})")));
    }
    let ratio = (n_left as f64 / k as f64).log2();
    let degree = ceil_tol(4.0 * ratio / delta).max(1);
    let n_right = (k as f64 * ratio + EPS).floor() as usize;
    if n_right == 0 {
        return Err(Error::param("planned n_right is 0".to_string()));
    }
    Ok((degree, n_right))
}

/// `log2(k * degree / n_right)`.
pub fn entropy_loss(g: &BipartiteGraph, k: usize) -> f64 {
    ((k * g.degree()) as f64 / g.n_right() as f64).log2()
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Definitional check for one left subset: `true` iff `|Γ(S)| < (1 - delta) M`.
pub fn disperser_violation(g: &BipartiteGraph, spec: &DisperserSpec, s: &[usize]) -> Result<bool> {
    let cover = g.right_neighborhood(s.iter().copied())?.len();
    Ok(cover < required_coverage(g.n_right(), spec.delta))
}

/// Visits every size-`k` subset of `0..n` in lexicographic order until the
/// callback returns `true`.
pub(crate) fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if f(&idx) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Enumerates all subsets of size exactly `k` (sufficient by monotonicity of Γ).
pub fn certify_disperser_exhaustive(g: &BipartiteGraph, spec: &DisperserSpec, cap: u128) -> Result<Certificate> {
    spec.validate_for(g)?;
    let needed = binomial(g.n_left(), spec.k);
    if needed > cap {
        return Err(Error::EnumerationCap { needed, cap });
    }
    let required = required_coverage(g.n_right(), spec.delta);
    let mut mark = vec![0u32; g.n_right()];
    let mut stamp = 0u32;
    let mut witness = None;
    for_each_combination(g.n_left(), spec.k, |s| {
        stamp = stamp.wrapping_add(1);
        if stamp == 0 {
            mark.iter_mut().for_each(|m| *m = 0);
            stamp = 1;
        }
        if g.neighborhood_size_with(s, &mut mark, stamp) < required {
            witness = Some(s.to_vec());
            true
        } else {
            false
        }
    });
    Ok(match witness {
        Some(s) => Certificate::refuted(spec, Witness::Subset(s)),
        None => Certificate::new(spec, Verdict::CertifiedExhaustive),
    })
}

/// Greedy adversary: repeatedly adds the left vertex contributing the fewest
/// new right vertices (lowest index on ties).
fn greedy_small_neighborhood(g: &BipartiteGraph, k: usize) -> Vec<usize> {
    let mut covered = vec![false; g.n_right()];
    let mut chosen = vec![false; g.n_left()];
    let mut s = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(usize, usize)> = None;
        for l in (0..g.n_left()).filter(|&l| !chosen[l]) {
            let mut seen: Vec<usize> = g.neighbors(l).iter().copied().filter(|&w| !covered[w]).collect();
            seen.sort_unstable();
            seen.dedup();
            if best.is_none_or(|(_, c)| seen.len() < c) {
                best = Some((l, seen.len()));
            }
        }
        let (l, _) = best.expect("k < n_left");
        chosen[l] = true;
        s.push(l);
        for &w in g.neighbors(l) {
            covered[w] = true;
        }
    }
    s.sort_unstable();
    s
}

/// Samples `trials` random size-k subsets plus one greedy subset.
pub fn refute_disperser_randomized(
    g: &BipartiteGraph,
    spec: &DisperserSpec,
    trials: u64,
    seed: u64,
) -> Result<Certificate> {
    spec.validate_for(g)?;
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    let greedy = greedy_small_neighborhood(g, spec.k);
    if disperser_violation(g, spec, &greedy)? {
        return Ok(Certificate::refuted(spec, Witness::Subset(greedy)));
    }
    let mut rng = derived_rng(seed, &[0xD15]);
    for _ in 0..trials {
        let mut s = sample_indices(&mut rng, g.n_left(), spec.k).into_vec();
        s.sort_unstable();
        if disperser_violation(g, spec, &s)? {
            return Ok(Certificate::refuted(spec, Witness::Subset(s)));
        }
    }
    Ok(Certificate { trials: Some(trials), seed: Some(seed), ..Certificate::new(spec, Verdict::PassedRandomized) })
}

/// Left vertices whose whole neighborhood avoids `S_i Δ S_j` for some pair,
/// or `None` if the family is not admissible (a pair is closer than `delta M`).
pub fn family_offenders(g: &BipartiteGraph, spec: &DisperserSpec, sets: &[Vec<bool>]) -> Result<Option<Vec<usize>>> {
    let m = g.n_right();
    if sets.iter().any(|s| s.len() != m) {
        return Err(Error::LengthMismatch {
            expected: m,
            found: sets.iter().map(Vec::len).find(|&l| l != m).unwrap_or(0),
        });
    }
    let sep = required_separation(m, spec.delta);
    let mut diffs = Vec::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let d: Vec<bool> = sets[i].iter().zip(&sets[j]).map(|(a, b)| a != b).collect();
            if d.iter().filter(|&&x| x).count() < sep {
                return Ok(None);
            }
            diffs.push(d);
        }
    }
    let offenders = (0..g.n_left()).filter(|&v| diffs.iter().any(|d| g.neighbors(v).iter().all(|&w| !d[w]))).collect();
    Ok(Some(offenders))
}

fn mask_to_set(mask: u64, m: usize) -> Vec<usize> {
    (0..m).filter(|&w| mask >> w & 1 == 1).collect()
}

/// Exhaustive multi-set certification for every family size `2..=t_max`
/// (`t_max <= 3`). Families are normalized to contain `∅`, which loses
/// nothing because symmetric differences are invariant under a common XOR.
pub fn certify_multiset_exhaustive(
    g: &BipartiteGraph,
    spec: &DisperserSpec,
    t_max: usize,
    cap: u128,
) -> Result<Certificate> {
    spec.validate_for(g)?;
    if !(2..=3).contains(&t_max) {
        return Err(Error::param(format!("exhaustive multi-set certification supports 2 <= t <= 3, got {t_max}")));
    }
    let m = g.n_right();
    if m > 30 {
        return Err(Error::EnumerationCap { needed: 1u128 << m.min(127), cap });
    }
    let needed = 1u128 << (m * (t_max - 1));
    if needed > cap {
        return Err(Error::EnumerationCap { needed, cap });
    }
    let full: u64 = (1u64 << m) - 1;
    let sep = required_separation(m, spec.delta) as u32;

    // within[A] = #{v : Γ(v) ⊆ A}, via a subset-sum transform.
    let mut within = vec![0u32; 1usize << m];
    for v in 0..g.n_left() {
        within[g.neighbor_mask(v) as usize] += 1;
    }
    for bit in 0..m {
        for a in 0..within.len() {
            if a >> bit & 1 == 1 {
                within[a] += within[a ^ (1 << bit)];
            }
        }
    }

    let far: Vec<u64> = (1..=full).filter(|x| x.count_ones() >= sep).collect();
    let offenders_of = |complements: &[u64]| -> Vec<usize> {
        (0..g.n_left())
            .filter(|&v| {
                let nm = g.neighbor_mask(v);
                complements.iter().any(|&a| nm & !a == 0)
            })
            .collect()
    };
    let family_witness = |xs: &[u64], complements: &[u64]| Witness::Family {
        sets: std::iter::once(Vec::new()).chain(xs.iter().map(|&x| mask_to_set(x, m))).collect(),
        offenders: offenders_of(complements),
    };

    let k = spec.k as u64;
    if 2 * k < g.n_left() as u64 {
        for &x in &far {
            let a = full & !x;
            if within[a as usize] as u64 > 2 * k {
                return Ok(Certificate::refuted(spec, family_witness(&[x], &[a])));
            }
        }
    }
    if t_max >= 3 && 3 * k < g.n_left() as u64 {
        for (i, &x2) in far.iter().enumerate() {
            let a1 = full & !x2;
            for &x3 in &far[i + 1..] {
                if (x2 ^ x3).count_ones() < sep {
                    continue;
                }
                let a2 = full & !x3;
                let a3 = full & !(x2 ^ x3);
                let f = |a: u64| within[a as usize] as i64;
                let union = f(a1) + f(a2) + f(a3) - f(a1 & a2) - f(a1 & a3) - f(a2 & a3) + f(a1 & a2 & a3);
                if union as u64 > 3 * k {
                    return Ok(Certificate::refuted(spec, family_witness(&[x2, x3], &[a1, a2, a3])));
                }
            }
        }
    }
    Ok(Certificate { t: Some(t_max), ..Certificate::new(spec, Verdict::CertifiedExhaustive) })
}

/// Greedy right set `A` built from small neighborhoods while `|A^c| >= delta M`;
/// returns the family `{∅, A^c}`.
fn greedy_family(g: &BipartiteGraph, spec: &DisperserSpec) -> Vec<Vec<bool>> {
    let m = g.n_right();
    let max_inside = m.saturating_sub(required_separation(m, spec.delta));
    let mut inside = vec![false; m];
    let mut size = 0;
    let mut used = vec![false; g.n_left()];
    loop {
        let mut best: Option<(usize, usize)> = None;
        for v in (0..g.n_left()).filter(|&v| !used[v]) {
            let mut new: Vec<usize> = g.neighbors(v).iter().copied().filter(|&w| !inside[w]).collect();
            new.sort_unstable();
            new.dedup();
            if size + new.len() <= max_inside && best.is_none_or(|(_, c)| new.len() < c) {
                best = Some((v, new.len()));
            }
        }
        let Some((v, added)) = best else { break };
        used[v] = true;
        size += added;
        for &w in g.neighbors(v) {
            inside[w] = true;
        }
    }
    vec![vec![false; m], inside.iter().map(|&x| !x).collect()]
}

fn random_family(rng: &mut crate::rng::Rng, m: usize, t: usize, sep: usize) -> Option<Vec<Vec<bool>>> {
    'retry: for _ in 0..FAMILY_RETRIES {
        let sets: Vec<Vec<bool>> = (0..t).map(|_| (0..m).map(|_| rng.gen::<bool>()).collect()).collect();
        for i in 0..t {
            for j in i + 1..t {
                if sets[i].iter().zip(&sets[j]).filter(|(a, b)| a != b).count() < sep {
                    continue 'retry;
                }
            }
        }
        return Some(sets);
    }
    None
}

/// Samples `trials` random admissible families of `t` right subsets plus one
/// greedy two-set family, and refutes on the first family trapping more than
/// `t k` (resp. `2k`) left vertices.
pub fn refute_multiset_randomized(
    g: &BipartiteGraph,
    spec: &DisperserSpec,
    t: usize,
    trials: u64,
    seed: u64,
) -> Result<Certificate> {
    spec.validate_for(g)?;
    if t < 2 || t > g.n_left() / spec.k {
        return Err(Error::param(format!(
            "family size t must satisfy 2 <= t <= n_left/k (t={t}, bound={})",
            g.n_left() / spec.k
        )));
    }
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    let as_sets = |fam: &[Vec<bool>]| -> Vec<Vec<usize>> {
        fam.iter().map(|s| (0..s.len()).filter(|&w| s[w]).collect()).collect()
    };

    let greedy = greedy_family(g, spec);
    if let Some(off) = family_offenders(g, spec, &greedy)? {
        if off.len() > 2 * spec.k {
            return Ok(Certificate::refuted(spec, Witness::Family { sets: as_sets(&greedy), offenders: off }));
        }
    }

    let m = g.n_right();
    let sep = required_separation(m, spec.delta);
    let mut rng = derived_rng(seed, &[0x5E7, t as u64]);
    for _ in 0..trials {
        let fam = random_family(&mut rng, m, t, sep).ok_or_else(|| {
            Error::BudgetExhausted(format!(
                "no admissible family of {t} subsets with pairwise separation {sep} found in {FAMILY_RETRIES} draws"
            ))
        })?;
        let off = family_offenders(g, spec, &fam)?.expect("sampled family is admissible");
        if off.len() > t * spec.k {
            return Ok(Certificate::refuted(spec, Witness::Family { sets: as_sets(&fam), offenders: off }));
        }
    }
    Ok(Certificate {
        trials: Some(trials),
        seed: Some(seed),
        t: Some(t),
        ..Certificate::new(spec, Verdict::PassedRandomized)
    })
}

/// Knobs for [`certify`] and [`sample_certified`].
#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    pub subset_cap: u128,
    pub family_cap: u128,
    pub trials: u64,
    pub t_max: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { subset_cap: DEFAULT_SUBSET_CAP, family_cap: DEFAULT_FAMILY_CAP, trials: 200, t_max: 3 }
    }
}

/// Whether exhaustive certification fits under the caps in `opts`.
pub fn exhaustive_feasible(g: &BipartiteGraph, spec: &DisperserSpec, opts: &CertifyOptions) -> bool {
    match spec.kind {
        DisperserKind::Disperser => binomial(g.n_left(), spec.k) <= opts.subset_cap,
        DisperserKind::Multiset => {
            let t_max = opts.t_max.clamp(2, 3);
            g.n_right() <= 30 && (1u128 << (g.n_right() * (t_max - 1))) <= opts.family_cap
        }
    }
}

/// Exhaustive when feasible, randomized refutation otherwise.
pub fn certify(g: &BipartiteGraph, spec: &DisperserSpec, opts: &CertifyOptions, seed: u64) -> Result<Certificate> {
    let exhaustive = exhaustive_feasible(g, spec, opts);
    match (spec.kind, exhaustive) {
        (DisperserKind::Disperser, true) => certify_disperser_exhaustive(g, spec, opts.subset_cap),
        (DisperserKind::Disperser, false) => refute_disperser_randomized(g, spec, opts.trials, seed),
        (DisperserKind::Multiset, true) => {
            certify_multiset_exhaustive(g, spec, opts.t_max.clamp(2, 3), opts.family_cap)
        }
        (DisperserKind::Multiset, false) => {
            let t = (g.n_left() / spec.k).clamp(2, opts.t_max.max(2));
            refute_multiset_randomized(g, spec, t, opts.trials, seed)
        }
    }
}

/// Samples graphs with the given shape until one is not refuted.
pub fn sample_certified(
    n_left: usize,
    n_right: usize,
    degree: usize,
    spec: &DisperserSpec,
    attempt_budget: usize,
    seed: u64,
    opts: &CertifyOptions,
) -> Result<(BipartiteGraph, Certificate)> {
    if attempt_budget == 0 {
        return Err(Error::param("attempt budget must be at least 1"));
    }
    for attempt in 0..attempt_budget as u64 {
        let g = BipartiteGraph::sample_left_regular(n_left, n_right, degree, derive_seed(seed, &[attempt]))?;
        let cert = certify(&g, spec, opts, derive_seed(seed, &[attempt, 1]))?;
        if !cert.is_refuted() {
            return Ok((g, cert));
        }
    }
    Err(Error::BudgetExhausted(format!(
        "no non-refuted graph ({n_left}x{n_right}, degree {degree}) in {attempt_budget} attempts"
    )))
}
