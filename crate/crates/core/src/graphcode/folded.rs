//! Folding two graph codes over the message space of `C1`.
//!
//! Position `l` carries `G1(c)_l` followed by `t` consecutive positions of
//! `G2(f(c))`, where `f` substitutes inner codewords for the symbols of `c`
//! and `t = floor(N2 / N1)`. The last `N2 - t N1` positions of the second
//! branch are dropped.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{list_decode_traced, GraphCode, ReceivedWord};
use crate::bigraph::BipartiteGraph;
use crate::error::{Error, Result};
use crate::field::Symbol;
use crate::mothercode::{check_symbols, concatenate, ConcatenatedCode, InnerCode, LinearCode, MotherCode};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FoldedSymbol {
    /// The `D1`-tuple over `F_q`.
    pub outer: Vec<Symbol>,
    /// `t` binary `D2`-tuples.
    pub inner: Vec<Vec<Symbol>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldedWord {
    pub values: Vec<Option<FoldedSymbol>>,
}

impl FoldedWord {
    pub fn clean(word: &[FoldedSymbol]) -> Self {
        FoldedWord { values: word.iter().cloned().map(Some).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The `F_q^{D1}` components, as a received word for the first branch.
    pub fn project(&self) -> ReceivedWord {
        ReceivedWord { values: self.values.iter().map(|v| v.as_ref().map(|s| s.outer.clone())).collect() }
    }

    /// Positions differing from `z`; erasures count as differences.
    pub fn distance(&self, z: &[FoldedSymbol]) -> usize {
        self.values.iter().zip(z).filter(|(v, x)| v.as_ref() != Some(*x)).count()
    }
}

#[derive(Debug, Clone)]
pub struct FoldedCode {
    branch1: GraphCode<LinearCode>,
    branch2: GraphCode<ConcatenatedCode>,
    t: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldParams {
    /// Disperser threshold of `G1`.
    pub k: usize,
    /// Input list size for recovery on the first branch.
    pub ell: usize,
    /// Recovery radius on the first branch.
    pub rho: f64,
    /// Candidates are kept iff their distance to `y` is at most `(1 - gamma) N1`.
    pub gamma: f64,
}

#[derive(Debug, Clone)]
pub struct FoldOutcome {
    pub words: Vec<Vec<FoldedSymbol>>,
    /// `C1` codewords of `words`, in the same order.
    pub mother_words: Vec<Vec<Symbol>>,
    /// Size of the first-branch list before the folded filter.
    pub candidates: usize,
}

impl FoldedCode {
    pub fn new(g1: BipartiteGraph, c1: LinearCode, g2: BipartiteGraph, inner: InnerCode) -> Result<Self> {
        let concat = concatenate(c1.clone(), inner)?;
        let branch1 = GraphCode::new(g1, c1)?;
        let branch2 = GraphCode::new(g2, concat)?;
        let t = branch2.length() / branch1.length();
        if t == 0 {
            return Err(Error::param(format!(
                "second branch length {} is shorter than the first {}",
                branch2.length(),
                branch1.length()
            )));
        }
        Ok(FoldedCode { branch1, branch2, t })
    }

    pub fn branch1(&self) -> &GraphCode<LinearCode> {
        &self.branch1
    }

    pub fn branch2(&self) -> &GraphCode<ConcatenatedCode> {
        &self.branch2
    }

    pub fn c1(&self) -> &LinearCode {
        self.branch1.mother()
    }

    pub fn concat(&self) -> &ConcatenatedCode {
        self.branch2.mother()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Length `N1`.
    pub fn length(&self) -> usize {
        self.branch1.length()
    }

    /// Second-branch positions lost to folding.
    pub fn dropped(&self) -> usize {
        self.branch2.length() - self.t * self.branch1.length()
    }

    /// `log2 |C1| / (N1 (D1 log2 q + t D2))`, when q is a power of two.
    pub fn rate(&self) -> Option<Ratio<u64>> {
        let q = self.c1().alphabet();
        if !q.is_power_of_two() {
            return None;
        }
        let bits = q.trailing_zeros() as u64;
        let symbol_bits = self.branch1.degree() as u64 * bits + (self.t * self.branch2.degree()) as u64;
        Some(Ratio::new(self.c1().dim() as u64 * bits, self.length() as u64 * symbol_bits))
    }

    pub fn fold_encode(&self, c: &[Symbol]) -> Result<Vec<FoldedSymbol>> {
        let first = self.branch1.encode(c)?;
        let second = self.branch2.encode_unchecked(&self.concat().f_c2(c));
        Ok(first
            .into_iter()
            .enumerate()
            .map(|(l, outer)| FoldedSymbol { outer, inner: second[self.t * l..self.t * (l + 1)].to_vec() })
            .collect())
    }

    pub fn fold_encode_message(&self, message: &[Symbol]) -> Result<Vec<FoldedSymbol>> {
        self.fold_encode(&self.c1().encode(message)?)
    }

    pub fn validate(&self, y: &FoldedWord) -> Result<()> {
        if y.len() != self.length() {
            return Err(Error::LengthMismatch { expected: self.length(), found: y.len() });
        }
        for s in y.values.iter().flatten() {
            if s.outer.len() != self.branch1.degree() {
                return Err(Error::LengthMismatch { expected: self.branch1.degree(), found: s.outer.len() });
            }
            check_symbols(&s.outer, self.c1().alphabet())?;
            if s.inner.len() != self.t {
                return Err(Error::LengthMismatch { expected: self.t, found: s.inner.len() });
            }
            for part in &s.inner {
                if part.len() != self.branch2.degree() {
                    return Err(Error::LengthMismatch { expected: self.branch2.degree(), found: part.len() });
                }
                check_symbols(part, 2)?;
            }
        }
        Ok(())
    }
}

/// Decodes the first branch from the projected word, then keeps the folded
/// re-encodings within `(1 - gamma) N1` of `y`.
pub fn fold_list_decode(fc: &FoldedCode, y: &FoldedWord, params: FoldParams) -> Result<FoldOutcome> {
    fc.validate(y)?;
    let first = list_decode_traced(fc.branch1(), &y.project(), params.k, params.ell, params.rho)?;
    let bound = crate::extremal::floor_tol((1.0 - params.gamma) * fc.length() as f64);
    let mut words = Vec::new();
    let mut mother_words = Vec::new();
    for c in &first.mother_words {
        let z = fc.fold_encode(c)?;
        if y.distance(&z) <= bound {
            words.push(z);
            mother_words.push(c.clone());
        }
    }
    Ok(FoldOutcome { words, mother_words, candidates: first.words.len() })
}
