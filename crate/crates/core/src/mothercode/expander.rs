use std::collections::VecDeque;

use num_rational::Ratio;
use once_cell::sync::OnceCell;

use super::{bf_unique_decode, check_symbols, LinearCode, MotherCode};
use crate::bigraph::BipartiteGraph;
use crate::error::Result;
use crate::field::Symbol;

/// Checks of each variable and variables of each check, keeping only pairs
/// joined by an odd number of parallel edges.
fn odd_adjacency(g: &BipartiteGraph) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut var_checks = vec![Vec::new(); g.n_left()];
    for (v, checks) in var_checks.iter_mut().enumerate() {
        let mut slots = g.neighbors(v).to_vec();
        slots.sort_unstable();
        let mut i = 0;
        while i < slots.len() {
            let j = slots[i..].iter().take_while(|&&w| w == slots[i]).count();
            if j % 2 == 1 {
                checks.push(slots[i]);
            }
            i += j;
        }
    }
    let mut check_vars = vec![Vec::new(); g.n_right()];
    for (v, checks) in var_checks.iter().enumerate() {
        for &w in checks {
            check_vars[w].push(v);
        }
    }
    (var_checks, check_vars)
}

/// The binary code `{x : x H = 0}` where `H[v][w]` is the parity of the edge
/// multiplicity between variable `v` (left) and check `w` (right).
pub fn expander_code_build(g2: &BipartiteGraph) -> Result<LinearCode> {
    let (_, check_vars) = odd_adjacency(g2);
    let parity = check_vars
        .iter()
        .map(|vars| {
            let mut row = vec![0; g2.n_left()];
            for &v in vars {
                row[v] = 1;
            }
            row
        })
        .collect();
    LinearCode::from_parity(2, g2.n_left(), parity)
}

/// Bit flipping: while some variable has more unsatisfied than satisfied
/// checks, flip it. Returns the word only if every check ends satisfied.
///
/// At most `n * degree` flips are made. Erasures must be filled in by the caller.
pub fn flip_decode(g2: &BipartiteGraph, y: &[Symbol]) -> Option<Vec<Symbol>> {
    let (var_checks, check_vars) = odd_adjacency(g2);
    flip_with(&var_checks, &check_vars, g2.edge_count(), y)
}

fn flip_with(var_checks: &[Vec<usize>], check_vars: &[Vec<usize>], cap: usize, y: &[Symbol]) -> Option<Vec<Symbol>> {
    if y.len() != var_checks.len() || y.iter().any(|&b| b > 1) {
        return None;
    }
    let mut x = y.to_vec();
    let mut unsat_check: Vec<bool> =
        check_vars.iter().map(|vars| vars.iter().fold(0, |acc, &v| acc ^ x[v]) == 1).collect();
    let mut unsat: Vec<usize> = var_checks.iter().map(|cs| cs.iter().filter(|&&w| unsat_check[w]).count()).collect();
    let wants_flip = |unsat: &[usize], v: usize| 2 * unsat[v] > var_checks[v].len();

    let mut queue: VecDeque<usize> = (0..x.len()).filter(|&v| wants_flip(&unsat, v)).collect();
    let mut queued = vec![false; x.len()];
    for &v in &queue {
        queued[v] = true;
    }
    let mut flips = 0;
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        if !wants_flip(&unsat, v) {
            continue;
        }
        if flips == cap {
            return None;
        }
        flips += 1;
        x[v] ^= 1;
        for &w in &var_checks[v] {
            unsat_check[w] = !unsat_check[w];
            for &u in &check_vars[w] {
                if unsat_check[w] {
                    unsat[u] += 1;
                } else {
                    unsat[u] -= 1;
                }
                if !queued[u] && wants_flip(&unsat, u) {
                    queued[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    unsat_check.iter().all(|&b| !b).then_some(x)
}

/// An expander code decoded by bit flipping, with brute-force fallback for
/// codes small enough to enumerate.
///
/// The generator matrix is computed lazily, so large instances can be
/// decoded (and checked for membership) without ever forming it.
#[derive(Debug, Clone)]
pub struct ExpanderCode {
    graph: BipartiteGraph,
    var_checks: Vec<Vec<usize>>,
    check_vars: Vec<Vec<usize>>,
    linear: OnceCell<LinearCode>,
    fallback: bool,
}

impl ExpanderCode {
    pub fn new(graph: BipartiteGraph) -> Self {
        let (var_checks, check_vars) = odd_adjacency(&graph);
        ExpanderCode { graph, var_checks, check_vars, linear: OnceCell::new(), fallback: true }
    }

    /// Disables the brute-force fallback; failures of bit flipping are final.
    pub fn flip_only(mut self) -> Self {
        self.fallback = false;
        self
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn linear(&self) -> Result<&LinearCode> {
        self.linear.get_or_try_init(|| expander_code_build(&self.graph))
    }

    pub fn flip_decode(&self, y: &[Symbol]) -> Option<Vec<Symbol>> {
        flip_with(&self.var_checks, &self.check_vars, self.graph.edge_count(), y)
    }
}

impl MotherCode for ExpanderCode {
    fn alphabet(&self) -> usize {
        2
    }

    fn length(&self) -> usize {
        self.graph.n_left()
    }

    fn message_alphabet(&self) -> usize {
        2
    }

    fn message_len(&self) -> usize {
        self.linear().map(|c| c.dim()).unwrap_or(0)
    }

    fn encode(&self, message: &[Symbol]) -> Result<Vec<Symbol>> {
        self.linear()?.encode(message)
    }

    fn contains(&self, word: &[Symbol]) -> bool {
        word.len() == self.length()
            && check_symbols(word, 2).is_ok()
            && self.check_vars.iter().all(|vars| vars.iter().fold(0, |acc, &v| acc ^ word[v]) == 0)
    }

    fn dimension(&self) -> Option<Ratio<u64>> {
        self.linear().ok().map(|c| Ratio::from_integer(c.dim() as u64))
    }

    fn codewords(&self) -> Result<&[Vec<Symbol>]> {
        self.linear()?.codewords()
    }

    fn unique_decode(&self, received: &[Option<Symbol>]) -> Result<Option<Vec<Symbol>>> {
        let filled: Vec<Symbol> = received.iter().map(|s| s.unwrap_or(0)).collect();
        if let Some(x) = self.flip_decode(&filled) {
            return Ok(Some(x));
        }
        if self.fallback && self.linear()?.size() <= self.linear()?.enum_cap() {
            let nearest = bf_unique_decode(self, received)?;
            return Ok((!nearest.ambiguous).then_some(nearest.codeword));
        }
        Ok(None)
    }

    fn min_distance(&self) -> Result<usize> {
        self.linear()?.min_weight()
    }
}
