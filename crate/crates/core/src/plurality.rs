//! Plurality vectors of codeword sets and the bounds built on them.
//!
//! Functions are generic over the symbol type so they apply equally to
//! mother codewords (`Symbol`) and left words (`Vec<Symbol>`).

use std::collections::HashMap;
use std::hash::Hash;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal::{binomial, ceil_tol, floor_tol};
use crate::rng::rng_from_seed;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PluralityReport {
    pub pl: Vec<usize>,
    pub sum: usize,
    /// `(beta, |{j : pl_j >= beta L}|)` for each queried beta.
    pub exceed_counts: Vec<(f64, usize)>,
}

fn check_uniform<S>(lam: &[Vec<S>]) -> Result<usize> {
    let n = lam.first().map_or(0, Vec::len);
    match lam.iter().find(|w| w.len() != n) {
        Some(w) => Err(Error::LengthMismatch { expected: n, found: w.len() }),
        None => Ok(n),
    }
}

fn pl_at<S: Eq + Hash>(lam: &[Vec<S>], j: usize) -> usize {
    let mut counts: HashMap<&S, usize> = HashMap::new();
    lam.iter()
        .map(|w| {
            let c = counts.entry(&w[j]).or_default();
            *c += 1;
            *c
        })
        .max()
        .unwrap_or(0)
}

/// `pl_j(Λ)`: the multiplicity of the most common symbol at each coordinate.
pub fn plurality_vector<S: Eq + Hash>(lam: &[Vec<S>]) -> Result<PluralityReport> {
    plurality_report(lam, &[])
}

pub fn plurality_report<S: Eq + Hash>(lam: &[Vec<S>], betas: &[f64]) -> Result<PluralityReport> {
    if lam.is_empty() {
        return Err(Error::param("plurality of an empty set"));
    }
    let n = check_uniform(lam)?;
    let pl: Vec<usize> = (0..n).map(|j| pl_at(lam, j)).collect();
    let sum = pl.iter().sum();
    let exceed_counts = betas
        .iter()
        .map(|&b| {
            let t = ceil_tol(b * lam.len() as f64);
            (b, pl.iter().filter(|&&p| p >= t).count())
        })
        .collect();
    Ok(PluralityReport { pl, sum, exceed_counts })
}

/// Whether `Σ pl_j < eps n L`, the hypothesis that makes `Λ`'s code
/// `(1 - eps, L - 1)`-average-radius list decodable.
pub fn average_radius_check<S: Eq + Hash>(lam: &[Vec<S>], eps: f64) -> Result<bool> {
    let r = plurality_vector(lam)?;
    let n = r.pl.len();
    Ok((r.sum as f64) < eps * (n * lam.len()) as f64 - EPS)
}

/// Whether `|{j : pl_j >= beta L}| <= delta n`.
pub fn plurality_condition_check<S: Eq + Hash>(lam: &[Vec<S>], beta: f64, delta: f64) -> Result<bool> {
    if !(beta > 0.0 && beta <= 1.0 && delta > 0.0 && delta <= 1.0) {
        return Err(Error::param(format!("need 0 < beta, delta <= 1 (beta={beta}, delta={delta})")));
    }
    let r = plurality_report(lam, &[beta])?;
    Ok(r.exceed_counts[0].1 <= floor_tol(delta * r.pl.len() as f64))
}

/// `eps L n (ln L + 2)`.
pub fn abel_bound(eps: f64, l: usize, n: usize) -> f64 {
    eps * (l * n) as f64 * ((l as f64).ln() + 2.0)
}

/// The summed form preceding [`abel_bound`]:
/// `Σ_{i=1}^{floor(L/2)} floor(eps L n / i) + 2 eps L n`.
pub fn abel_sum_bound(eps: f64, l: usize, n: usize) -> f64 {
    let eln = eps * (l * n) as f64;
    (1..=l / 2).map(|i| (eln / i as f64 + EPS).floor()).sum::<f64>() + 2.0 * eln
}

/// `(radius, list)` from a `(k, delta)`-multi-set disperser on `n_left`
/// vertices: `Lbar = ceil(N / 5k)`, radius `1 - 10 (k/N)(ln Lbar + 2)`,
/// list size `Lbar - 1`. The radius is not clamped.
pub fn multiset_list_bound(n_left: usize, k: usize) -> Result<(f64, usize)> {
    if k == 0 || k >= n_left {
        return Err(Error::param(format!("need 0 < k < n_left (k={k}, n_left={n_left})")));
    }
    let lbar = n_left.div_ceil(5 * k);
    let radius = 1.0 - 10.0 * (k as f64 / n_left as f64) * ((lbar as f64).ln() + 2.0);
    Ok((radius, lbar - 1))
}

/// `Lbar = ceil(N / 5k)`.
pub fn multiset_lbar(n_left: usize, k: usize) -> usize {
    n_left.div_ceil(5 * k)
}

/// Random subsets `T` of `[0, ground)` of size `ceil(2 / beta)`, returning
/// the first one meeting at least `0.3 N` of the sets in two or more
/// elements.
pub fn intersection_witness(
    sets: &[Vec<usize>],
    ground: usize,
    beta: f64,
    trials: usize,
    seed: u64,
) -> Result<Option<Vec<usize>>> {
    if !(beta > 0.0 && beta <= 0.5 + EPS) || beta * (ground as f64) < 2.0 - EPS {
        return Err(Error::param(format!("need beta <= 1/2 and beta L >= 2 (beta={beta}, L={ground})")));
    }
    let min_size = ceil_tol(beta * ground as f64);
    let mut member = vec![vec![false; ground]; sets.len()];
    for (m, s) in member.iter_mut().zip(sets) {
        for &x in s {
            *m.get_mut(x).ok_or(Error::VertexOutOfRange { vertex: x, bound: ground })? = true;
        }
        if m.iter().filter(|&&b| b).count() < min_size {
            return Err(Error::param(format!("set {s:?} is smaller than beta L = {min_size}")));
        }
    }
    let size = ceil_tol(2.0 / beta).min(ground);
    let mut rng = rng_from_seed(seed);
    for _ in 0..trials {
        let mut t = sample(&mut rng, ground, size).into_vec();
        let hits = member.iter().filter(|m| t.iter().filter(|&&x| m[x]).count() >= 2).count();
        if 10 * hits >= 3 * sets.len() {
            t.sort_unstable();
            return Ok(Some(t));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMode {
    Exhaustive { cap: u128 },
    Sampled { trials: usize, seed: u64 },
}

/// Default limit on the number of `L`-subsets visited exhaustively.
pub const SCAN_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanResult {
    pub worst_sum: usize,
    /// Indices (into the scanned word list) of a maximizing `Λ`.
    pub witness: Vec<usize>,
    pub examined: u128,
    pub exhaustive: bool,
}

/// Column-wise interned symbols, so that plurality counts work on small ints.
fn intern<S: Eq + Hash>(words: &[Vec<S>]) -> Vec<Vec<u32>> {
    let n = words.first().map_or(0, Vec::len);
    let mut out = vec![vec![0u32; n]; words.len()];
    for j in 0..n {
        let mut ids: HashMap<&S, u32> = HashMap::new();
        for (i, w) in words.iter().enumerate() {
            let next = ids.len() as u32;
            out[i][j] = *ids.entry(&w[j]).or_insert(next);
        }
    }
    out
}

#[allow(clippy::needless_range_loop)]
fn pl_sum(ids: &[Vec<u32>], subset: &[usize], scratch: &mut Vec<u32>) -> usize {
    let n = ids.first().map_or(0, Vec::len);
    let mut total = 0;
    for j in 0..n {
        scratch.clear();
        scratch.extend(subset.iter().map(|&i| ids[i][j]));
        scratch.sort_unstable();
        let (mut best, mut run) = (0, 0);
        for (a, b) in scratch.iter().zip(scratch.iter().skip(1).map(Some).chain([None])) {
            run += 1;
            if b != Some(a) {
                best = best.max(run);
                run = 0;
            }
        }
        total += best;
    }
    total
}

/// Maximizes `Σ_j pl_j(Λ)` over `L`-subsets of `words`, exactly or by
/// sampling. Ties keep the lexicographically smallest witness.
pub fn scan_plurality<S: Eq + Hash>(words: &[Vec<S>], l: usize, mode: ScanMode) -> Result<ScanResult> {
    check_uniform(words)?;
    if l == 0 || l > words.len() {
        return Err(Error::param(format!("need 1 <= L <= {} (L={l})", words.len())));
    }
    let ids = intern(words);
    let mut scratch = Vec::with_capacity(l);
    let mut best: Option<(usize, Vec<usize>)> = None;
    let mut consider = |subset: &[usize], scratch: &mut Vec<u32>| {
        let s = pl_sum(&ids, subset, scratch);
        let better = match &best {
            None => true,
            Some((b, w)) => s > *b || (s == *b && subset < w.as_slice()),
        };
        if better {
            best = Some((s, subset.to_vec()));
        }
    };
    let (examined, exhaustive) = match mode {
        ScanMode::Exhaustive { cap } => {
            let needed = binomial(words.len(), l);
            if needed > cap {
                return Err(Error::EnumerationCap { needed, cap });
            }
            crate::extremal::for_each_combination(words.len(), l, |s| {
                consider(s, &mut scratch);
                false
            });
            (needed, true)
        }
        ScanMode::Sampled { trials, seed } => {
            let mut rng = rng_from_seed(seed);
            for _ in 0..trials {
                let mut s = sample(&mut rng, words.len(), l).into_vec();
                s.sort_unstable();
                consider(&s, &mut scratch);
            }
            (trials as u128, false)
        }
    };
    let (worst_sum, witness) = best.ok_or_else(|| Error::param("no subsets scanned"))?;
    Ok(ScanResult { worst_sum, witness, examined, exhaustive })
}

/// `n + C(L, 2) a`: the double-counting bound on `Σ pl_j` for codes whose
/// distinct codewords agree on at most `a` coordinates.
pub fn pair_agreement_bound(n: usize, l: usize, a: usize) -> u128 {
    n as u128 + binomial(l, 2) * a as u128
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lam() -> Vec<Vec<u32>> {
        vec![vec![0, 0, 0], vec![0, 1, 1], vec![0, 1, 2]]
    }

    #[test]
    fn plurality_examples() {
        let r = plurality_vector(&lam()).unwrap();
        assert_eq!(r.pl, vec![3, 2, 1]);
        assert_eq!(r.sum, 6);
        assert_eq!(plurality_vector(&[vec![4u32, 5]]).unwrap().pl, vec![1, 1]);
        assert_eq!(plurality_vector(&[vec![0u32], vec![1], vec![2]]).unwrap().pl, vec![1]);
        assert!(plurality_vector(&[vec![0u32], vec![1, 2]]).is_err());
    }

    #[test]
    fn average_radius_examples() {
        assert!(average_radius_check(&lam(), 0.7).unwrap());
        assert!(!average_radius_check(&lam(), 0.6).unwrap());
        assert!(!average_radius_check(&[vec![1u32, 2, 3]], 1.0).unwrap());
    }

    #[test]
    fn plurality_condition_examples() {
        assert!(plurality_condition_check(&lam(), 1.0, 1.0 / 3.0).unwrap());
        assert!(!plurality_condition_check(&lam(), 1.0, 0.2).unwrap());
        assert!(plurality_condition_check(&lam(), 1.0 / 3.0, 1.0).unwrap());
        assert!(!plurality_condition_check(&lam(), 1.0 / 3.0, 0.9).unwrap());
    }

    #[test]
    fn bound_arithmetic() {
        assert!((abel_bound(0.1, 4, 100) - 40.0 * (4f64.ln() + 2.0)).abs() < 1e-9);
        assert!((abel_bound(0.1, 4, 100) - 135.45).abs() < 0.01);
        assert!((abel_bound(0.3, 1, 10) - 6.0).abs() < 1e-9);
        assert_eq!(abel_bound(0.0, 7, 9), 0.0);

        let (r, l) = multiset_list_bound(1000, 10).unwrap();
        assert_eq!(l, 19);
        assert!((r - 0.5004).abs() < 1e-3);
        let (r, l) = multiset_list_bound(1000, 50).unwrap();
        assert_eq!(l, 3);
        assert!((r + 0.693).abs() < 1e-3);
        let (r, l) = multiset_list_bound(1000, 200).unwrap();
        assert_eq!(l, 0);
        assert!((r + 3.0).abs() < 1e-9);
        assert!(multiset_list_bound(10, 0).is_err());
    }

    #[test]
    fn intersection_witness_examples() {
        let s = vec![vec![0, 1, 2, 3]; 5];
        // beta L = 4 with L = 8 gives beta = 1/2 and |T| = 4
        let t = intersection_witness(&s, 8, 0.5, 100, 1).unwrap().unwrap();
        assert!(t.iter().filter(|&&x| x < 4).count() >= 2);
        let t = intersection_witness(&[vec![2, 3]], 4, 0.5, 100, 2).unwrap().unwrap();
        assert!(t.contains(&2) && t.contains(&3));
        assert!(intersection_witness(&[vec![0, 1]], 4, 0.6, 10, 0).is_err());
        assert!(intersection_witness(&[vec![0]], 4, 0.5, 10, 0).is_err());
    }

    #[test]
    fn scan_examples() {
        let words = vec![vec![0u32, 0, 0, 0, 0], vec![1, 1, 1, 0, 0]];
        let r = scan_plurality(&words, 2, ScanMode::Exhaustive { cap: SCAN_CAP }).unwrap();
        // 2n - d with n = 5, d = 3
        assert_eq!(r.worst_sum, 7);
        let r = scan_plurality(&lam(), 1, ScanMode::Exhaustive { cap: SCAN_CAP }).unwrap();
        assert_eq!((r.worst_sum, r.witness.clone()), (3, vec![0]));
        let r = scan_plurality(&lam(), 2, ScanMode::Sampled { trials: 50, seed: 3 }).unwrap();
        assert!(!r.exhaustive && r.worst_sum == 5);
        assert!(scan_plurality(&lam(), 2, ScanMode::Exhaustive { cap: 2 }).is_err());
    }

    /// Every received word is far on average from a set passing the check.
    #[test]
    fn average_radius_conclusion_exhaustive() {
        let (n, q) = (4usize, 3u32);
        let all: Vec<Vec<u32>> = (0..q.pow(n as u32))
            .map(|mut x| {
                (0..n)
                    .map(|_| {
                        let d = x % q;
                        x /= q;
                        d
                    })
                    .collect()
            })
            .collect();
        let mut rng = rng_from_seed(11);
        for _ in 0..100 {
            let l = 3;
            let lam: Vec<Vec<u32>> = sample(&mut rng, all.len(), l).into_iter().map(|i| all[i].clone()).collect();
            for eps in [0.4, 0.5, 0.6, 0.75, 0.9] {
                if average_radius_check(&lam, eps).unwrap() {
                    for y in &all {
                        let total: usize = lam.iter().map(|c| c.iter().zip(y).filter(|(a, b)| a != b).count()).sum();
                        assert!(total as f64 > (1.0 - eps) * (n * l) as f64);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn permutation_equivariance(
            words in prop::collection::vec(prop::collection::vec(0u32..3, 5), 1..6),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            let base = plurality_vector(&words).unwrap();
            let mut rng = rng_from_seed(seed);
            let mut rows = words.clone();
            rows.shuffle(&mut rng);
            prop_assert_eq!(&plurality_vector(&rows).unwrap().pl, &base.pl);
            let mut perm: Vec<usize> = (0..5).collect();
            perm.shuffle(&mut rng);
            let cols: Vec<Vec<u32>> = words.iter().map(|w| perm.iter().map(|&j| w[j]).collect()).collect();
            let permuted = plurality_vector(&cols).unwrap().pl;
            for (i, &j) in perm.iter().enumerate() {
                prop_assert_eq!(permuted[i], base.pl[j]);
            }
            prop_assert!(base.sum >= 5 && base.pl.iter().all(|&p| p >= 1 && p <= words.len()));
        }

        /// Plurality conditions at every grid level imply the summed Abel bound.
        #[test]
        fn abel_discretized(
            words in prop::collection::vec(prop::collection::vec(0u32..4, 12), 4..9),
            eps in 0.05f64..0.5,
        ) {
            let l = words.len();
            let holds = (1..=l / 2).all(|i| {
                let beta = i as f64 / l as f64;
                beta <= eps || plurality_condition_check(&words, beta, (eps / beta).min(1.0)).unwrap()
            });
            if holds {
                let sum = plurality_vector(&words).unwrap().sum as f64;
                prop_assert!(sum <= abel_bound(eps, l, 12) + eps * (l * 12) as f64);
            }
        }
    }
}
