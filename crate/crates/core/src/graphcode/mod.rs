//! Graph concatenation `G(C)`: position `l` of the left word carries the
//! mother symbols at `Γ_1(l), …, Γ_D(l)`.

mod folded;
mod list;
mod unique;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub use folded::{fold_list_decode, FoldOutcome, FoldParams, FoldedCode, FoldedSymbol, FoldedWord};
pub(crate) use list::within_list_radius;
pub use list::{list_decode, list_decode_traced, ListOutcome, ListTrace};
pub use unique::{unique_decode, unique_decode_traced, ScanOrder, UniqueOptions, UniqueOutcome, UniqueTrace};

use crate::bigraph::BipartiteGraph;
use crate::error::{Error, Result};
use crate::field::Symbol;
use crate::mothercode::MotherCode;

/// A left word: one `D`-tuple per left vertex.
pub type LeftWord = Vec<Vec<Symbol>>;

#[derive(Debug, Clone)]
pub struct GraphCode<C> {
    graph: BipartiteGraph,
    mother: C,
}

impl<C: MotherCode> GraphCode<C> {
    pub fn new(graph: BipartiteGraph, mother: C) -> Result<Self> {
        if mother.length() != graph.n_right() {
            return Err(Error::param(format!(
                "mother length {} differs from n_right {}",
                mother.length(),
                graph.n_right()
            )));
        }
        Ok(GraphCode { graph, mother })
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn mother(&self) -> &C {
        &self.mother
    }

    /// Number of left positions `N`.
    pub fn length(&self) -> usize {
        self.graph.n_left()
    }

    pub fn degree(&self) -> usize {
        self.graph.degree()
    }

    /// Mother alphabet size; the left alphabet is its `D`-th power.
    pub fn alphabet_q(&self) -> usize {
        self.mother.alphabet()
    }

    /// `R(C) M / (N D)`.
    pub fn rate(&self) -> Option<Ratio<u64>> {
        let r = self.mother.rate()?;
        Some(r * Ratio::new(self.graph.n_right() as u64, (self.length() * self.degree()) as u64))
    }

    /// Rate measured from the enumerated image: `log_q |G(C)| / (N D)`.
    /// `None` when the image size is not a rational power of `q`.
    pub fn image_rate(&self) -> Result<Option<Ratio<u64>>> {
        let mut image: Vec<LeftWord> = self.mother.codewords()?.iter().map(|c| self.encode_unchecked(c)).collect();
        image.sort_unstable();
        image.dedup();
        // |image| = r^a and q = r^b for the smallest root r of q
        let (r, b) = smallest_root(self.mother.alphabet() as u128);
        let Some(a) = exact_log(image.len() as u128, r) else {
            return Ok(None);
        };
        let dim = Ratio::new(a as u64, b as u64);
        Ok(Some(dim / Ratio::from_integer((self.length() * self.degree()) as u64)))
    }

    pub fn encode(&self, codeword: &[Symbol]) -> Result<LeftWord> {
        if codeword.len() != self.mother.length() {
            return Err(Error::LengthMismatch { expected: self.mother.length(), found: codeword.len() });
        }
        if !self.mother.contains(codeword) {
            return Err(Error::NotACodeword);
        }
        Ok(self.encode_unchecked(codeword))
    }

    pub fn encode_message(&self, message: &[Symbol]) -> Result<LeftWord> {
        Ok(self.encode_unchecked(&self.mother.encode(message)?))
    }

    pub(crate) fn encode_unchecked(&self, codeword: &[Symbol]) -> LeftWord {
        self.graph.all_neighbors().iter().map(|nb| nb.iter().map(|&w| codeword[w]).collect()).collect()
    }
}

/// `(r, b)` with `q = r^b` and `r` as small as possible.
fn smallest_root(q: u128) -> (u128, u32) {
    (2..=q).find_map(|r| exact_log(q, r).map(|b| (r, b))).unwrap_or((q, 1))
}

/// `e` with `base^e = x`, if any.
fn exact_log(x: u128, base: u128) -> Option<u32> {
    if x == 0 || base < 2 {
        return (x == 1).then_some(0);
    }
    let (mut v, mut e) = (x, 0);
    while v % base == 0 {
        v /= base;
        e += 1;
    }
    (v == 1).then_some(e)
}

/// A received left word; `None` entries are erasures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceivedWord {
    pub values: Vec<Option<Vec<Symbol>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReceivedWordFile {
    pub alphabet_q: usize,
    pub degree: usize,
    pub values: Vec<Option<Vec<Symbol>>>,
}

impl ReceivedWord {
    pub fn clean(word: &[Vec<Symbol>]) -> Self {
        ReceivedWord { values: word.iter().cloned().map(Some).collect() }
    }

    pub fn erased(n: usize) -> Self {
        ReceivedWord { values: vec![None; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn erasures(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// Checks that every present entry is a `degree`-tuple over `[0, q)`.
    pub fn validate(&self, q: usize, degree: usize) -> Result<()> {
        for v in self.values.iter().flatten() {
            if v.len() != degree {
                return Err(Error::LengthMismatch { expected: degree, found: v.len() });
            }
            crate::mothercode::check_symbols(v, q)?;
        }
        Ok(())
    }

    pub fn to_file(&self, q: usize, degree: usize) -> ReceivedWordFile {
        ReceivedWordFile { alphabet_q: q, degree, values: self.values.clone() }
    }

    pub fn from_file(file: ReceivedWordFile) -> Result<Self> {
        let w = ReceivedWord { values: file.values };
        w.validate(file.alphabet_q, file.degree)?;
        Ok(w)
    }

    pub fn to_json(&self, q: usize, degree: usize) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file(q, degree))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(s)?)
    }
}

/// `2 #{errors} + #{erasures}` between a received word and a left word.
pub fn half_distance(y: &ReceivedWord, c: &[Vec<Symbol>]) -> Result<usize> {
    if y.len() != c.len() {
        return Err(Error::LengthMismatch { expected: c.len(), found: y.len() });
    }
    Ok(y.values
        .iter()
        .zip(c)
        .map(|(v, x)| match v {
            None => 1,
            Some(v) if v != x => 2,
            Some(_) => 0,
        })
        .sum())
}

/// Positions where `y` differs from `c`; erasures count as differences.
pub fn received_distance(y: &ReceivedWord, c: &[Vec<Symbol>]) -> Result<usize> {
    if y.len() != c.len() {
        return Err(Error::LengthMismatch { expected: c.len(), found: y.len() });
    }
    Ok(y.values.iter().zip(c).filter(|(v, x)| v.as_ref() != Some(*x)).count())
}

/// Positions where two left words agree.
pub fn agreement(a: &[Vec<Symbol>], b: &[Vec<Symbol>]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x == y).count()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::bigraph::tests::g0;
    use crate::mothercode::{InnerCode, LinearCode};

    /// Four left vertices, each with neighbors (0, 1).
    pub(crate) fn g1() -> BipartiteGraph {
        BipartiteGraph::from_neighbors(2, vec![vec![0, 1]; 4]).unwrap()
    }

    #[test]
    fn encode_examples() {
        let mother = LinearCode::from_generator(3, 2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let gc = GraphCode::new(g0(), mother).unwrap();
        let (a, b) = (2, 1);
        assert_eq!(gc.encode(&[a, b]).unwrap(), vec![vec![a, b], vec![a, b], vec![b, b]]);

        let rep = LinearCode::repetition(2, 2).unwrap();
        let gc = GraphCode::new(g1(), rep).unwrap();
        let zero = gc.encode(&[0, 0]).unwrap();
        let one = gc.encode(&[1, 1]).unwrap();
        assert_eq!(zero, vec![vec![0, 0]; 4]);
        assert_eq!(one, vec![vec![1, 1]; 4]);
        assert_eq!(agreement(&zero, &one), 0);
        assert!(matches!(gc.encode(&[0, 1]), Err(Error::NotACodeword)));
    }

    #[test]
    fn length_mismatch_rejected() {
        let rep = LinearCode::repetition(2, 3).unwrap();
        assert!(GraphCode::new(g1(), rep).is_err());
    }

    #[test]
    fn half_distance_examples() {
        let c = vec![vec![0, 1], vec![1, 1], vec![0, 0]];
        assert_eq!(half_distance(&ReceivedWord::clean(&c), &c).unwrap(), 0);
        let y = ReceivedWord { values: vec![None, Some(vec![0, 1]), Some(vec![0, 0])] };
        assert_eq!(half_distance(&y, &c).unwrap(), 3);
        assert_eq!(half_distance(&ReceivedWord::erased(3), &c).unwrap(), 3);
        assert_eq!(received_distance(&y, &c).unwrap(), 2);
        assert!(half_distance(&ReceivedWord::erased(2), &c).is_err());
    }

    #[test]
    fn rate_formula_matches_image() {
        let mother = LinearCode::random_best_distance(2, 6, 3, 5, 9).unwrap();
        let g = BipartiteGraph::sample_left_regular(10, 6, 3, 4).unwrap();
        let gc = GraphCode::new(g, mother).unwrap();
        // R(C) = 1/2, M/(ND) = 6/30
        assert_eq!(gc.rate(), Some(Ratio::new(1, 10)));
        let measured = gc.image_rate().unwrap();
        if gc.graph().right_neighborhood(0..10).unwrap().len() == 6 {
            assert_eq!(measured, gc.rate());
        }
    }

    #[test]
    fn rate_of_concatenated_mother() {
        let outer = LinearCode::random(4, 4, 2, 1).unwrap();
        let inner = InnerCode::new(vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]).unwrap();
        let mother = crate::mothercode::concatenate(outer, inner).unwrap();
        let g = BipartiteGraph::sample_left_regular(8, 12, 3, 2).unwrap();
        let gc = GraphCode::new(g, mother).unwrap();
        // dim = 2 * log2 4 = 4 bits over length 12, times 12 / 24
        assert_eq!(gc.rate(), Some(Ratio::new(1, 6)));
    }

    #[test]
    fn received_file_round_trip() {
        let y = ReceivedWord { values: vec![Some(vec![0, 1]), None, Some(vec![1, 1])] };
        let s = y.to_json(2, 2).unwrap();
        assert!(s.contains("null"));
        assert_eq!(ReceivedWord::from_json(&s).unwrap(), y);
        let bad = r#"{"alphabet_q": 2, "degree": 2, "values": [[0, 2]]}"#;
        assert!(ReceivedWord::from_json(bad).is_err());
        let bad = r#"{"alphabet_q": 2, "degree": 2, "values": [[0, 1, 1]]}"#;
        assert!(ReceivedWord::from_json(bad).is_err());
    }

    #[test]
    fn exact_log_cases() {
        assert_eq!(exact_log(8, 2), Some(3));
        assert_eq!(exact_log(1, 5), Some(0));
        assert_eq!(exact_log(12, 2), None);
        assert_eq!(smallest_root(8), (2, 3));
        assert_eq!(smallest_root(6), (6, 1));
    }
}
