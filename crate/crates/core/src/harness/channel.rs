use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Symbol;
use crate::graphcode::ReceivedWord;
use crate::rng::{rng_from_seed, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    #[default]
    UniformRandom,
    /// Corrupted positions form one cyclic run starting at a random offset.
    Clustered,
    /// Errors copy a second codeword where it differs from the transmitted one.
    Targeted,
}

/// Exactly `e` errors and `s` erasures, on disjoint positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub e: usize,
    pub s: usize,
    #[serde(default)]
    pub strategy: Strategy,
    pub seed: u64,
}

/// A uniformly random `D`-tuple over `[0, q)` different from `x`.
fn different_tuple(x: &[Symbol], q: usize, rng: &mut Rng) -> Vec<Symbol> {
    loop {
        let t: Vec<Symbol> = x.iter().map(|_| rng.gen_range(0..q as Symbol)).collect();
        if t != x {
            return t;
        }
    }
}

/// Corrupts a left word. `target` is required for the targeted strategy.
pub fn corrupt(
    word: &[Vec<Symbol>],
    q: usize,
    spec: &ChannelSpec,
    target: Option<&[Vec<Symbol>]>,
) -> Result<ReceivedWord> {
    let n = word.len();
    if spec.e + spec.s > n {
        return Err(Error::param(format!("e + s = {} exceeds length {n}", spec.e + spec.s)));
    }
    if spec.e > 0 && (q < 2 || word.iter().any(Vec::is_empty)) {
        return Err(Error::param("errors need at least two distinct symbols"));
    }
    let mut rng = rng_from_seed(spec.seed);
    let mut y = ReceivedWord::clean(word);
    let total = spec.e + spec.s;
    let (errors, erasures): (Vec<usize>, Vec<usize>) = match spec.strategy {
        Strategy::UniformRandom => {
            let pos = sample(&mut rng, n, total).into_vec();
            (pos[..spec.e].to_vec(), pos[spec.e..].to_vec())
        }
        Strategy::Clustered => {
            let start = if n == 0 { 0 } else { rng.gen_range(0..n) };
            let run: Vec<usize> = (0..total).map(|i| (start + i) % n).collect();
            let order = sample(&mut rng, total, total).into_vec();
            let pos: Vec<usize> = order.iter().map(|&i| run[i]).collect();
            (pos[..spec.e].to_vec(), pos[spec.e..].to_vec())
        }
        Strategy::Targeted => {
            let target = target.ok_or_else(|| Error::param("targeted corruption needs a target word"))?;
            if target.len() != n {
                return Err(Error::LengthMismatch { expected: n, found: target.len() });
            }
            let mut differ: Vec<usize> = (0..n).filter(|&i| word[i] != target[i]).collect();
            let mut agree: Vec<usize> = (0..n).filter(|&i| word[i] == target[i]).collect();
            shuffle(&mut differ, &mut rng);
            shuffle(&mut agree, &mut rng);
            // errors go where the target differs first; erasures take the rest
            let mut pool = differ;
            pool.extend(agree);
            (pool[..spec.e].to_vec(), pool[spec.e..total].to_vec())
        }
    };
    for &p in &errors {
        let v = match (spec.strategy, target) {
            (Strategy::Targeted, Some(t)) if t[p] != word[p] => t[p].clone(),
            _ => different_tuple(&word[p], q, &mut rng),
        };
        y.values[p] = Some(v);
    }
    for &p in &erasures {
        y.values[p] = None;
    }
    Ok(y)
}

fn shuffle(v: &mut [usize], rng: &mut Rng) {
    use rand::seq::SliceRandom;
    v.shuffle(rng);
}
