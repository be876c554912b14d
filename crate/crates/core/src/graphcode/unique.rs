//! Unique decoding by pairwise conflict erasure.
//!
//! While two live left entries send different values into the same right
//! vertex, both are erased. Each surviving right vertex then sees a single
//! value, the resulting right word is decoded by the mother code, and the
//! re-encoded word is accepted only if its half distance to `y` is below
//! `N - k`.

use rand::seq::SliceRandom;

use super::{half_distance, GraphCode, LeftWord, ReceivedWord};
use crate::bigraph::Incidence;
use crate::error::{Error, Result};
use crate::field::Symbol;
use crate::mothercode::MotherCode;
use crate::rng::rng_from_seed;

/// Order in which conflicting pairs are found.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ScanOrder {
    /// Right vertices ascending, incidences by `(left, slot)`.
    #[default]
    Canonical,
    /// Right vertices and each incidence list shuffled under the seed.
    Permuted(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniqueOptions {
    pub order: ScanOrder,
    /// Value given to right vertices whose neighbors were all erased.
    pub filler: Symbol,
}

impl Default for UniqueOptions {
    fn default() -> Self {
        UniqueOptions { order: ScanOrder::Canonical, filler: 0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UniqueTrace {
    /// `(u, v, w)` per loop iteration: left vertices `u`, `v` erased for a
    /// conflict at right vertex `w` (`u == v` for a self-conflict).
    pub erased_pairs: Vec<(usize, usize, usize)>,
    /// Right vertices that received the filler.
    pub filled: usize,
    pub mother_decoded: bool,
    pub final_half_distance: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct UniqueOutcome {
    pub word: Option<LeftWord>,
    pub mother_word: Option<Vec<Symbol>>,
    pub trace: UniqueTrace,
}

pub fn unique_decode<C: MotherCode>(gc: &GraphCode<C>, y: &ReceivedWord, k: usize) -> Result<Option<LeftWord>> {
    Ok(unique_decode_traced(gc, y, k, UniqueOptions::default())?.word)
}

pub fn unique_decode_traced<C: MotherCode>(
    gc: &GraphCode<C>,
    y: &ReceivedWord,
    k: usize,
    opts: UniqueOptions,
) -> Result<UniqueOutcome> {
    let g = gc.graph();
    let n = gc.length();
    if y.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: y.len() });
    }
    y.validate(gc.alphabet_q(), gc.degree())?;
    if opts.filler as usize >= gc.alphabet_q() {
        return Err(Error::SymbolOutOfRange { symbol: opts.filler, q: gc.alphabet_q() });
    }
    let value = |x: &Incidence| y.values[x.left].as_ref().map(|t| t[x.slot]);

    let mut alive: Vec<bool> = y.values.iter().map(Option::is_some).collect();
    let mut rng = match opts.order {
        ScanOrder::Permuted(seed) => Some(rng_from_seed(seed)),
        ScanOrder::Canonical => None,
    };
    let mut rights: Vec<usize> = (0..g.n_right()).collect();
    if let Some(rng) = rng.as_mut() {
        rights.shuffle(rng);
    }

    let mut trace = UniqueTrace::default();
    let mut inc: Vec<Incidence> = Vec::new();
    for &w in &rights {
        inc.clear();
        inc.extend(g.incidences(w).iter().copied().filter(|x| alive[x.left]));
        if let Some(rng) = rng.as_mut() {
            inc.shuffle(rng);
        }
        loop {
            inc.retain(|x| alive[x.left]);
            let Some(a) = inc.first().copied() else { break };
            let va = value(&a);
            let Some(b) = inc.iter().copied().find(|x| value(x) != va) else {
                break;
            };
            alive[a.left] = false;
            alive[b.left] = false;
            trace.erased_pairs.push((a.left, b.left, w));
        }
    }

    let z: Vec<Option<Symbol>> = (0..g.n_right())
        .map(|w| {
            let v = g.incidences(w).iter().find(|x| alive[x.left]).and_then(value);
            if v.is_none() {
                trace.filled += 1;
            }
            Some(v.unwrap_or(opts.filler))
        })
        .collect();

    let Some(mother_word) = gc.mother().unique_decode(&z)? else {
        return Ok(UniqueOutcome { word: None, mother_word: None, trace });
    };
    trace.mother_decoded = true;
    let word = gc.encode_unchecked(&mother_word);
    let hd = half_distance(y, &word)?;
    trace.final_half_distance = Some(hd);
    let accepted = hd + k < n;
    Ok(UniqueOutcome { word: accepted.then_some(word), mother_word: accepted.then_some(mother_word), trace })
}
