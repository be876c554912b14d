//! Left-regular bipartite multigraphs.
//!
//! Left vertex `l` has an ordered list of exactly `degree` right neighbors
//! (its slots); parallel edges are allowed and kept. The right-side incidence
//! lists are the transpose of the slot lists and are rebuilt on construction.

use std::collections::BTreeSet;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// One edge end seen from the right: left vertex `left` reaches the right
/// vertex through its slot `slot`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Incidence {
    pub left: usize,
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    n_left: usize,
    n_right: usize,
    degree: usize,
    neighbors: Vec<Vec<usize>>,
    right_incidence: Vec<Vec<Incidence>>,
}

/// On-disk form of a graph. Incidence lists are never serialized.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub n_left: usize,
    pub n_right: usize,
    pub degree: usize,
    pub neighbors: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    /// Builds a graph from explicit slot lists, validating arity and range.
    pub fn from_neighbors(n_right: usize, neighbors: Vec<Vec<usize>>) -> Result<Self> {
        let n_left = neighbors.len();
        if n_left == 0 || n_right == 0 {
            return Err(Error::MalformedGraph("graph needs at least one vertex per side".into()));
        }
        let degree = neighbors[0].len();
        if degree == 0 {
            return Err(Error::MalformedGraph("left degree must be positive".into()));
        }
        Self::validate(n_left, n_right, degree, &neighbors)?;
        Ok(Self::assemble(n_right, degree, neighbors))
    }

    fn validate(n_left: usize, n_right: usize, degree: usize, neighbors: &[Vec<usize>]) -> Result<()> {
        if neighbors.len() != n_left {
            return Err(Error::MalformedGraph(format!("expected {n_left} neighbor lists, found {}", neighbors.len())));
        }
        for (l, slots) in neighbors.iter().enumerate() {
            if slots.len() != degree {
                return Err(Error::MalformedGraph(format!(
                    "left vertex {l} has {} slots, degree is {degree}",
                    slots.len()
                )));
            }
            if let Some(&w) = slots.iter().find(|&&w| w >= n_right) {
                return Err(Error::VertexOutOfRange { vertex: w, bound: n_right });
            }
        }
        Ok(())
    }

    fn assemble(n_right: usize, degree: usize, neighbors: Vec<Vec<usize>>) -> Self {
        let right_incidence = transpose(n_right, &neighbors);
        BipartiteGraph { n_left: neighbors.len(), n_right, degree, neighbors, right_incidence }
    }

    /// Samples every slot independently and uniformly from `[0, n_right)`.
    pub fn sample_left_regular(n_left: usize, n_right: usize, degree: usize, seed: u64) -> Result<Self> {
        if n_left == 0 || n_right == 0 || degree == 0 {
            return Err(Error::param(format!(
                "graph dimensions must be positive (n_left={n_left}, n_right={n_right}, degree={degree})"
            )));
        }
        let mut rng = rng_from_seed(seed);
        let neighbors = (0..n_left).map(|_| (0..degree).map(|_| rng.gen_range(0..n_right)).collect()).collect();
        Ok(Self::assemble(n_right, degree, neighbors))
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn edge_count(&self) -> usize {
        self.n_left * self.degree
    }

    /// Ordered slot list of left vertex `l`.
    pub fn neighbors(&self, l: usize) -> &[usize] {
        &self.neighbors[l]
    }

    pub fn all_neighbors(&self) -> &[Vec<usize>] {
        &self.neighbors
    }

    /// Incidences into right vertex `w`, sorted by `(left, slot)`.
    pub fn incidences(&self, w: usize) -> &[Incidence] {
        &self.right_incidence[w]
    }

    pub fn right_degree(&self, w: usize) -> usize {
        self.right_incidence[w].len()
    }

    /// Γ(S): the duplicate-free set of right vertices adjacent to `s`.
    pub fn right_neighborhood<I>(&self, s: I) -> Result<BTreeSet<usize>>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut out = BTreeSet::new();
        for l in s {
            if l >= self.n_left {
                return Err(Error::VertexOutOfRange { vertex: l, bound: self.n_left });
            }
            out.extend(self.neighbors[l].iter().copied());
        }
        Ok(out)
    }

    /// |Γ(S)| using a caller-provided scratch marker, for hot certification loops.
    pub(crate) fn neighborhood_size_with(&self, s: &[usize], mark: &mut [u32], stamp: u32) -> usize {
        let mut count = 0;
        for &l in s {
            for &w in &self.neighbors[l] {
                if mark[w] != stamp {
                    mark[w] = stamp;
                    count += 1;
                }
            }
        }
        count
    }

    /// Bitmask of the right vertices adjacent to `l`; only valid when `n_right <= 64`.
    pub(crate) fn neighbor_mask(&self, l: usize) -> u64 {
        debug_assert!(self.n_right <= 64);
        self.neighbors[l].iter().fold(0u64, |m, &w| m | (1u64 << w))
    }

    /// Recomputes the transpose and compares it with the stored incidence lists.
    pub fn check_consistency(&self) -> bool {
        self.neighbors.len() == self.n_left
            && self.neighbors.iter().all(|s| s.len() == self.degree && s.iter().all(|&w| w < self.n_right))
            && transpose(self.n_right, &self.neighbors) == self.right_incidence
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile { n_left: self.n_left, n_right: self.n_right, degree: self.degree, neighbors: self.neighbors.clone() }
    }

    pub fn from_file(file: GraphFile) -> Result<Self> {
        if file.n_left == 0 || file.n_right == 0 || file.degree == 0 {
            return Err(Error::MalformedGraph("dimensions must be positive".into()));
        }
        Self::validate(file.n_left, file.n_right, file.degree, &file.neighbors)?;
        Ok(Self::assemble(file.n_right, file.degree, file.neighbors))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: GraphFile =
            serde_json::from_str(s).map_err(|e| Error::MalformedGraph(format!("invalid graph document: {e}")))?;
        Self::from_file(file)
    }
}

fn transpose(n_right: usize, neighbors: &[Vec<usize>]) -> Vec<Vec<Incidence>> {
    let mut inc = vec![Vec::new(); n_right];
    for (left, slots) in neighbors.iter().enumerate() {
        for (slot, &w) in slots.iter().enumerate() {
            inc[w].push(Incidence { left, slot });
        }
    }
    inc
}
