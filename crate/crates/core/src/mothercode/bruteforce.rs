//! Definitional oracles over enumerated codewords.

use super::{check_enumerable, MotherCode};
use crate::error::{Error, Result};
use crate::field::Symbol;

/// Result of a nearest-codeword search under the half-error metric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearestCodeword {
    pub codeword: Vec<Symbol>,
    /// Position of the codeword in enumeration order.
    pub index: usize,
    /// `2e + s` against the received word.
    pub half_distance: usize,
    /// Another codeword attains the same minimum.
    pub ambiguous: bool,
}

impl NearestCodeword {
    /// Whether the minimizer lies strictly inside the unique-decoding radius.
    pub fn within(&self, distance: usize) -> bool {
        self.half_distance < distance
    }
}

/// `2 #errors + #erasures` between a received word and a codeword.
pub fn half_distance_symbols(received: &[Option<Symbol>], codeword: &[Symbol]) -> usize {
    received
        .iter()
        .zip(codeword)
        .map(|(r, &c)| match r {
            None => 1,
            Some(s) if *s != c => 2,
            Some(_) => 0,
        })
        .sum()
}

/// Codeword minimizing `2e + s`; ties go to the earliest codeword and are
/// flagged as ambiguous.
pub fn bf_unique_decode<C: MotherCode + ?Sized>(code: &C, received: &[Option<Symbol>]) -> Result<NearestCodeword> {
    if received.len() != code.length() {
        return Err(Error::LengthMismatch { expected: code.length(), found: received.len() });
    }
    let words = code.codewords()?;
    let mut best: Option<(usize, usize)> = None;
    let mut ambiguous = false;
    for (i, c) in words.iter().enumerate() {
        let hd = half_distance_symbols(received, c);
        match best {
            Some((_, b)) if hd > b => {}
            Some((_, b)) if hd == b => ambiguous = true,
            _ => {
                best = Some((i, hd));
                ambiguous = false;
            }
        }
    }
    let (index, half_distance) = best.ok_or_else(|| Error::MalformedCode("code has no codewords".into()))?;
    Ok(NearestCodeword { codeword: words[index].clone(), index, half_distance, ambiguous })
}

/// Number of matches needed to reach `(1 - rho) n`.
pub(crate) fn required_matches(n: usize, rho: f64) -> usize {
    ((1.0 - rho) * n as f64 - 1e-9).ceil().max(0.0) as usize
}

/// Every codeword `c` with `c_w ∈ lists[w]` for at least `(1 - rho) n`
/// positions, in enumeration order. Empty lists never match.
pub fn bf_list_recover<C: MotherCode + ?Sized>(code: &C, lists: &[Vec<Symbol>], rho: f64) -> Result<Vec<Vec<Symbol>>> {
    if lists.len() != code.length() {
        return Err(Error::LengthMismatch { expected: code.length(), found: lists.len() });
    }
    let need = required_matches(code.length(), rho);
    let mut member = vec![vec![false; code.alphabet()]; code.length()];
    for (m, list) in member.iter_mut().zip(lists) {
        for &s in list {
            if let Some(slot) = m.get_mut(s as usize) {
                *slot = true;
            }
        }
    }
    Ok(code
        .codewords()?
        .iter()
        .filter(|c| c.iter().zip(&member).filter(|(&s, m)| m[s as usize]).count() >= need)
        .cloned()
        .collect())
}

/// Exact minimum distance over all codeword pairs.
pub fn brute_force_min_distance<C: MotherCode + ?Sized>(code: &C) -> Result<usize> {
    check_enumerable(code)?;
    let words = code.codewords()?;
    let mut best = code.length() + 1;
    for i in 0..words.len() {
        for j in i + 1..words.len() {
            best = best.min(super::hamming_distance(&words[i], &words[j]));
        }
    }
    Ok(best)
}

/// The list-recovery bound `L`: the largest number of codewords consistent
/// with some choice of `ell`-element lists on `(1 - rho) n` positions.
/// Exhaustive over all list collections, so only for tiny codes.
pub fn list_recovery_bound<C: MotherCode + ?Sized>(code: &C, ell: usize, rho: f64, cap: u128) -> Result<usize> {
    let q = code.alphabet();
    let n = code.length();
    let ell = ell.min(q);
    let lists_per_position: Vec<u64> = (0u64..1 << q).filter(|m| m.count_ones() as usize == ell).collect();
    let needed = (lists_per_position.len() as u128).saturating_pow(n as u32);
    if q > 16 || needed > cap {
        return Err(Error::EnumerationCap { needed, cap });
    }
    let words = code.codewords()?;
    let need = required_matches(n, rho);
    let mut choice = vec![0usize; n];
    let mut best = 0;
    loop {
        let count = words
            .iter()
            .filter(|c| c.iter().zip(&choice).filter(|(&s, &ci)| lists_per_position[ci] >> s & 1 == 1).count() >= need)
            .count();
        best = best.max(count);
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(best);
            }
            choice[pos] += 1;
            if choice[pos] < lists_per_position.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}
