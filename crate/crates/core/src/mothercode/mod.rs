//! Codes placed on the right side of a graph.
//!
//! Every implementation exposes the same capability surface through
//! [`MotherCode`]: encoding, desk-scale enumeration, unique decoding and list
//! recovery. The default decoders are the definitional brute-force oracles in
//! [`bruteforce`]; [`ExpanderCode`] overrides unique decoding with bit flipping.

pub mod bruteforce;
mod concat;
mod expander;
mod linear;

use num_rational::Ratio;

pub use bruteforce::{
    bf_list_recover, bf_unique_decode, brute_force_min_distance, list_recovery_bound, NearestCodeword,
};
pub use concat::{concatenate, find_inner_code, ConcatenatedCode, InnerCode, InnerCodeFile};
pub use expander::{expander_code_build, flip_decode, ExpanderCode};
pub use linear::{CodeFile, LinearCode};

use crate::error::{Error, Result};
use crate::field::Symbol;
use crate::rng::Rng;

/// Default limit on the number of codewords any brute-force routine may visit.
pub const DEFAULT_ENUM_CAP: u128 = 1 << 20;

pub trait MotherCode: Send + Sync {
    /// Size of the codeword alphabet.
    fn alphabet(&self) -> usize;

    fn length(&self) -> usize;

    /// Size of the message alphabet (differs from [`alphabet`](Self::alphabet)
    /// for concatenated codes).
    fn message_alphabet(&self) -> usize;

    fn message_len(&self) -> usize;

    fn encode(&self, message: &[Symbol]) -> Result<Vec<Symbol>>;

    fn contains(&self, word: &[Symbol]) -> bool;

    /// `log_q |C|` as an exact rational, when it is one.
    fn dimension(&self) -> Option<Ratio<u64>>;

    fn enum_cap(&self) -> u128 {
        DEFAULT_ENUM_CAP
    }

    /// All codewords, in message order. Fails when the code is larger than
    /// [`enum_cap`](Self::enum_cap).
    fn codewords(&self) -> Result<&[Vec<Symbol>]>;

    fn size(&self) -> u128 {
        (self.message_alphabet() as u128).saturating_pow(self.message_len() as u32)
    }

    /// Rate `log_q|C| / n`.
    fn rate(&self) -> Option<Ratio<u64>> {
        self.dimension().map(|d| d / Ratio::from_integer(self.length() as u64))
    }

    /// Unique decoding from errors and erasures; `None` when no unique
    /// nearest codeword exists.
    fn unique_decode(&self, received: &[Option<Symbol>]) -> Result<Option<Vec<Symbol>>> {
        let nearest = bf_unique_decode(self, received)?;
        Ok((!nearest.ambiguous).then_some(nearest.codeword))
    }

    /// All codewords agreeing with the lists on at least `(1 - rho) n` positions.
    fn list_recover(&self, lists: &[Vec<Symbol>], rho: f64) -> Result<Vec<Vec<Symbol>>> {
        bf_list_recover(self, lists, rho)
    }

    fn min_distance(&self) -> Result<usize> {
        brute_force_min_distance(self)
    }

    fn random_message(&self, rng: &mut Rng) -> Vec<Symbol> {
        use rand::Rng as _;
        let q = self.message_alphabet() as Symbol;
        (0..self.message_len()).map(|_| rng.gen_range(0..q)).collect()
    }

    fn random_codeword(&self, rng: &mut Rng) -> Result<Vec<Symbol>> {
        let m = self.random_message(rng);
        self.encode(&m)
    }
}

impl<C: MotherCode + ?Sized> MotherCode for Box<C> {
    fn alphabet(&self) -> usize {
        (**self).alphabet()
    }
    fn length(&self) -> usize {
        (**self).length()
    }
    fn message_alphabet(&self) -> usize {
        (**self).message_alphabet()
    }
    fn message_len(&self) -> usize {
        (**self).message_len()
    }
    fn encode(&self, message: &[Symbol]) -> Result<Vec<Symbol>> {
        (**self).encode(message)
    }
    fn contains(&self, word: &[Symbol]) -> bool {
        (**self).contains(word)
    }
    fn dimension(&self) -> Option<Ratio<u64>> {
        (**self).dimension()
    }
    fn enum_cap(&self) -> u128 {
        (**self).enum_cap()
    }
    fn codewords(&self) -> Result<&[Vec<Symbol>]> {
        (**self).codewords()
    }
    fn unique_decode(&self, received: &[Option<Symbol>]) -> Result<Option<Vec<Symbol>>> {
        (**self).unique_decode(received)
    }
    fn list_recover(&self, lists: &[Vec<Symbol>], rho: f64) -> Result<Vec<Vec<Symbol>>> {
        (**self).list_recover(lists, rho)
    }
    fn min_distance(&self) -> Result<usize> {
        (**self).min_distance()
    }
}

/// Checks that the code is small enough to enumerate.
pub(crate) fn check_enumerable<C: MotherCode + ?Sized>(code: &C) -> Result<()> {
    let needed = code.size();
    let cap = code.enum_cap();
    if needed > cap {
        return Err(Error::EnumerationCap { needed, cap });
    }
    Ok(())
}

/// Digits of `index` in base `q`, most significant first.
pub(crate) fn message_from_index(mut index: u128, q: usize, len: usize) -> Vec<Symbol> {
    let mut m = vec![0; len];
    for slot in m.iter_mut().rev() {
        *slot = (index % q as u128) as Symbol;
        index /= q as u128;
    }
    m
}

/// Enumerates every codeword by encoding every message in order.
pub(crate) fn enumerate_by_encoding<C: MotherCode + ?Sized>(code: &C) -> Result<Vec<Vec<Symbol>>> {
    check_enumerable(code)?;
    (0..code.size()).map(|i| code.encode(&message_from_index(i, code.message_alphabet(), code.message_len()))).collect()
}

pub(crate) fn check_symbols(word: &[Symbol], q: usize) -> Result<()> {
    match word.iter().find(|&&s| s as usize >= q) {
        Some(&symbol) => Err(Error::SymbolOutOfRange { symbol, q }),
        None => Ok(()),
    }
}

pub fn hamming_distance(a: &[Symbol], b: &[Symbol]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}
