use std::collections::HashMap;

use num_rational::Ratio;
use once_cell::sync::OnceCell;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{check_symbols, enumerate_by_encoding, hamming_distance, LinearCode, MotherCode};
use crate::error::{Error, Result};
use crate::field::Symbol;
use crate::rng::rng_from_seed;

/// A binary code with exactly `q` words, word `a` encoding outer symbol `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerCode {
    q: usize,
    len: usize,
    words: Vec<Vec<Symbol>>,
    distance: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InnerCodeFile {
    pub q: usize,
    pub len: usize,
    pub words: Vec<String>,
}

impl InnerCode {
    pub fn new(words: Vec<Vec<Symbol>>) -> Result<Self> {
        let q = words.len();
        if q < 2 {
            return Err(Error::MalformedCode("inner code needs at least two words".into()));
        }
        let len = words[0].len();
        let mut distance = len;
        for (i, w) in words.iter().enumerate() {
            if w.len() != len {
                return Err(Error::LengthMismatch { expected: len, found: w.len() });
            }
            check_symbols(w, 2)?;
            for v in &words[..i] {
                distance = distance.min(hamming_distance(v, w));
            }
        }
        if distance == 0 {
            return Err(Error::MalformedCode("inner code words are not distinct".into()));
        }
        Ok(InnerCode { q, len, words, distance })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[Vec<Symbol>] {
        &self.words
    }

    /// Exact minimum pairwise distance.
    pub fn distance(&self) -> usize {
        self.distance
    }

    /// The map `f_{C2}` applied to one outer symbol.
    pub fn word(&self, symbol: Symbol) -> &[Symbol] {
        &self.words[symbol as usize]
    }

    pub fn to_file(&self) -> InnerCodeFile {
        InnerCodeFile {
            q: self.q,
            len: self.len,
            words: self.words.iter().map(|w| w.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()).collect(),
        }
    }

    pub fn from_file(file: InnerCodeFile) -> Result<Self> {
        let words = file
            .words
            .iter()
            .map(|s| {
                s.chars()
                    .map(|ch| match ch {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        _ => Err(Error::MalformedCode(format!("inner word {s:?} is not binary"))),
                    })
                    .collect::<Result<Vec<Symbol>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let code = InnerCode::new(words)?;
        if code.q != file.q || code.len != file.len {
            return Err(Error::MalformedCode(format!(
                "header says q={} len={}, words give q={} len={}",
                file.q, file.len, code.q, code.len
            )));
        }
        Ok(code)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(s)?)
    }
}

const RESTARTS_PER_LENGTH: usize = 64;

/// Randomized greedy search for `q` binary words with pairwise relative
/// distance at least `min_rel_distance`, trying lengths in increasing order.
pub fn find_inner_code(q: usize, min_rel_distance: f64, max_len: usize, seed: u64) -> Result<InnerCode> {
    if q < 2 {
        return Err(Error::param("inner code size must be at least 2"));
    }
    if max_len >= 64 || (1u128 << max_len) < q as u128 {
        return Err(Error::param(format!("{q} words do not fit in length {max_len}")));
    }
    let mut rng = rng_from_seed(seed);
    let min_len = (usize::BITS - (q - 1).leading_zeros()) as usize;
    for len in min_len.max(1)..=max_len {
        let need = crate::extremal::ceil_tol(min_rel_distance * len as f64).max(1);
        if need > len {
            continue;
        }
        for _ in 0..RESTARTS_PER_LENGTH {
            let candidates: Vec<u64> = if len <= 16 {
                let mut all: Vec<u64> = (0..1u64 << len).collect();
                all.shuffle(&mut rng);
                all
            } else {
                (0..1 << 14).map(|_| rng.gen_range(0..1u64 << len)).collect()
            };
            let mut chosen: Vec<u64> = Vec::with_capacity(q);
            for c in candidates {
                if chosen.iter().all(|&w| (w ^ c).count_ones() as usize >= need) {
                    chosen.push(c);
                    if chosen.len() == q {
                        break;
                    }
                }
            }
            if chosen.len() == q {
                let words = chosen.iter().map(|&w| (0..len).map(|i| (w >> i & 1) as Symbol).collect()).collect();
                return InnerCode::new(words);
            }
        }
    }
    Err(Error::BudgetExhausted(format!(
        "no binary code of size {q} and relative distance {min_rel_distance} up to length {max_len}"
    )))
}

/// `C1 ∘ C2`: outer codeword symbols replaced by inner codewords.
#[derive(Debug, Clone)]
pub struct ConcatenatedCode {
    outer: LinearCode,
    inner: InnerCode,
    index: HashMap<Vec<Symbol>, Symbol>,
    codewords: OnceCell<Vec<Vec<Symbol>>>,
}

pub fn concatenate(outer: LinearCode, inner: InnerCode) -> Result<ConcatenatedCode> {
    if inner.q() != outer.alphabet() {
        return Err(Error::param(format!(
            "inner code has {} words, outer alphabet has {}",
            inner.q(),
            outer.alphabet()
        )));
    }
    let index = inner.words().iter().enumerate().map(|(a, w)| (w.clone(), a as Symbol)).collect();
    Ok(ConcatenatedCode { outer, inner, index, codewords: OnceCell::new() })
}

impl ConcatenatedCode {
    pub fn outer(&self) -> &LinearCode {
        &self.outer
    }

    pub fn inner(&self) -> &InnerCode {
        &self.inner
    }

    /// The map `f_{C2}` applied to a whole outer word.
    pub fn f_c2(&self, outer_word: &[Symbol]) -> Vec<Symbol> {
        outer_word.iter().flat_map(|&a| self.inner.word(a).iter().copied()).collect()
    }

    /// Inverse of [`f_c2`](Self::f_c2); `None` if some block is not an inner word.
    pub fn unsubstitute(&self, word: &[Symbol]) -> Option<Vec<Symbol>> {
        if word.len() != self.length() {
            return None;
        }
        word.chunks(self.inner.len()).map(|b| self.index.get(b).copied()).collect()
    }
}

impl MotherCode for ConcatenatedCode {
    fn alphabet(&self) -> usize {
        2
    }

    fn length(&self) -> usize {
        self.outer.length() * self.inner.len()
    }

    fn message_alphabet(&self) -> usize {
        self.outer.message_alphabet()
    }

    fn message_len(&self) -> usize {
        self.outer.message_len()
    }

    fn encode(&self, message: &[Symbol]) -> Result<Vec<Symbol>> {
        Ok(self.f_c2(&self.outer.encode(message)?))
    }

    fn contains(&self, word: &[Symbol]) -> bool {
        self.unsubstitute(word).is_some_and(|w| self.outer.contains(&w))
    }

    /// `k log2 q`, rational only when q is a power of two.
    fn dimension(&self) -> Option<Ratio<u64>> {
        let q = self.outer.alphabet();
        q.is_power_of_two().then(|| Ratio::from_integer((self.outer.dim() as u64) * q.trailing_zeros() as u64))
    }

    fn enum_cap(&self) -> u128 {
        self.outer.enum_cap()
    }

    fn codewords(&self) -> Result<&[Vec<Symbol>]> {
        self.codewords.get_or_try_init(|| enumerate_by_encoding(self)).map(Vec::as_slice)
    }
}
