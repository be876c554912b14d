//! List decoding through list recovery of the mother code.
//!
//! Phase 1 erases left vertices that contradict themselves through parallel
//! edges. Phase 2 erases, at each right vertex, groups of `ell` left vertices
//! carrying `ell` distinct values, until fewer than `ell` distinct values
//! survive. The surviving values form the input lists `T(w)`.

use std::collections::BTreeSet;

use super::{received_distance, GraphCode, LeftWord, ReceivedWord};
use crate::error::{Error, Result};
use crate::field::Symbol;
use crate::mothercode::MotherCode;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ListTrace {
    /// Left vertices erased for self-inconsistency.
    pub phase1: Vec<usize>,
    /// `(w, group)` per phase-2 erasure: the `ell` left vertices erased at `w`.
    pub phase2: Vec<(usize, Vec<usize>)>,
    /// The recovery input `T(w)`.
    pub lists: Vec<Vec<Symbol>>,
    /// Mother codewords returned by list recovery, before filtering.
    pub candidates: usize,
}

#[derive(Debug, Clone)]
pub struct ListOutcome {
    pub words: Vec<LeftWord>,
    /// Mother codewords of `words`, in the same order.
    pub mother_words: Vec<Vec<Symbol>>,
    pub trace: ListTrace,
}

pub fn list_decode<C: MotherCode>(
    gc: &GraphCode<C>,
    y: &ReceivedWord,
    k: usize,
    ell: usize,
    rho: f64,
) -> Result<Vec<LeftWord>> {
    Ok(list_decode_traced(gc, y, k, ell, rho)?.words)
}

/// Whether `dist <= (1 - 1/ell - k/N) N`, in integers.
pub(crate) fn within_list_radius(dist: usize, n: usize, k: usize, ell: usize) -> bool {
    (dist * ell) as i128 <= (n * ell) as i128 - n as i128 - (k * ell) as i128
}

pub fn list_decode_traced<C: MotherCode>(
    gc: &GraphCode<C>,
    y: &ReceivedWord,
    k: usize,
    ell: usize,
    rho: f64,
) -> Result<ListOutcome> {
    if ell < 2 {
        return Err(Error::param(format!("ell must be at least 2, got {ell}")));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::param(format!("rho must lie in [0, 1], got {rho}")));
    }
    let g = gc.graph();
    let n = gc.length();
    if y.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: y.len() });
    }
    y.validate(gc.alphabet_q(), gc.degree())?;

    let mut trace = ListTrace::default();
    let mut alive: Vec<bool> = y.values.iter().map(Option::is_some).collect();

    for (u, nb) in g.all_neighbors().iter().enumerate() {
        let Some(t) = &y.values[u] else { continue };
        let inconsistent = (0..nb.len()).any(|i| (i + 1..nb.len()).any(|j| nb[i] == nb[j] && t[i] != t[j]));
        if inconsistent {
            alive[u] = false;
            trace.phase1.push(u);
        }
    }

    let value = |left: usize, slot: usize| y.values[left].as_ref().map(|t| t[slot]).unwrap_or(0);
    let mut lists = Vec::with_capacity(g.n_right());
    for w in 0..g.n_right() {
        loop {
            // first incidence of each distinct value, in scan order
            let mut seen: Vec<(Symbol, usize)> = Vec::new();
            for x in g.incidences(w) {
                if alive[x.left] {
                    let v = value(x.left, x.slot);
                    if !seen.iter().any(|&(s, _)| s == v) {
                        seen.push((v, x.left));
                        if seen.len() == ell {
                            break;
                        }
                    }
                }
            }
            if seen.len() < ell {
                let t: BTreeSet<Symbol> = seen.iter().map(|&(s, _)| s).collect();
                lists.push(t.into_iter().collect());
                break;
            }
            let group: Vec<usize> = seen.iter().map(|&(_, l)| l).collect();
            for &l in &group {
                alive[l] = false;
            }
            trace.phase2.push((w, group));
        }
    }

    let candidates = gc.mother().list_recover(&lists, rho)?;
    trace.candidates = candidates.len();
    trace.lists = lists;
    let mut words = Vec::new();
    let mut mother_words = Vec::new();
    for c in candidates {
        let x = gc.encode_unchecked(&c);
        if within_list_radius(received_distance(y, &x)?, n, k, ell) {
            words.push(x);
            mother_words.push(c);
        }
    }
    Ok(ListOutcome { words, mother_words, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigraph::BipartiteGraph;
    use crate::graphcode::tests::g1;
    use crate::mothercode::{bf_list_recover, LinearCode};

    #[test]
    fn hand_simulation_on_g1() {
        let gc = GraphCode::new(g1(), LinearCode::repetition(3, 2).unwrap()).unwrap();
        let y = ReceivedWord { values: vec![Some(vec![1, 1]), Some(vec![1, 1]), Some(vec![1, 1]), Some(vec![0, 2])] };
        let out = list_decode_traced(&gc, &y, 1, 3, 0.5).unwrap();
        assert!(out.trace.phase1.is_empty() && out.trace.phase2.is_empty());
        assert_eq!(out.trace.lists, vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(out.trace.candidates, 3);
        assert_eq!(out.words, vec![vec![vec![1, 1]; 4]]);
        assert_eq!(out.mother_words, vec![vec![1, 1]]);
    }

    #[test]
    fn all_erased_gives_empty_list() {
        let gc = GraphCode::new(g1(), LinearCode::repetition(3, 2).unwrap()).unwrap();
        let out = list_decode_traced(&gc, &ReceivedWord::erased(4), 1, 3, 1.0).unwrap();
        assert!(out.trace.lists.iter().all(Vec::is_empty));
        assert_eq!(out.trace.candidates, 3);
        assert!(out.words.is_empty());
    }

    #[test]
    fn parallel_edge_inconsistency_is_erased() {
        let g = BipartiteGraph::from_neighbors(2, vec![vec![0, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let gc = GraphCode::new(g, LinearCode::repetition(3, 2).unwrap()).unwrap();
        let y = ReceivedWord { values: vec![Some(vec![0, 1]), Some(vec![2, 2]), Some(vec![2, 2])] };
        let out = list_decode_traced(&gc, &y, 1, 3, 0.0).unwrap();
        assert_eq!(out.trace.phase1, vec![0]);
        assert_eq!(out.trace.lists, vec![vec![2], vec![2]]);
        assert_eq!(out.mother_words, vec![vec![2, 2]]);
    }

    #[test]
    fn phase2_erases_groups_of_ell() {
        // right vertex 0 sees values 0, 1, 2 from three vertices: with ell = 2,
        // the first two distinct values are erased, leaving {2}
        let g = BipartiteGraph::from_neighbors(1, vec![vec![0]; 3]).unwrap();
        let gc = GraphCode::new(g, LinearCode::repetition(3, 1).unwrap()).unwrap();
        let y = ReceivedWord { values: vec![Some(vec![0]), Some(vec![1]), Some(vec![2])] };
        let out = list_decode_traced(&gc, &y, 1, 2, 0.0).unwrap();
        assert_eq!(out.trace.phase2, vec![(0, vec![0, 1])]);
        assert_eq!(out.trace.lists, vec![vec![2]]);
    }

    #[test]
    fn output_is_filtered_subset_of_recovery() {
        let mother = LinearCode::random_best_distance(3, 6, 2, 10, 7).unwrap();
        let g = BipartiteGraph::sample_left_regular(12, 6, 3, 3).unwrap();
        let gc = GraphCode::new(g, mother).unwrap();
        let mut rng = crate::rng::rng_from_seed(1);
        for _ in 0..100 {
            let c = gc.mother().random_codeword(&mut rng).unwrap();
            let mut y = ReceivedWord::clean(&gc.encode(&c).unwrap());
            for p in rand::seq::index::sample(&mut rng, 12, 4) {
                y.values[p] = Some(vec![rand::Rng::gen_range(&mut rng, 0..3); 3]);
            }
            let out = list_decode_traced(&gc, &y, 2, 3, 0.5).unwrap();
            let oracle = bf_list_recover(gc.mother(), &out.trace.lists, 0.5).unwrap();
            assert!(out.words.len() <= oracle.len());
            for x in &out.words {
                assert!(within_list_radius(received_distance(&y, x).unwrap(), 12, 2, 3));
            }
        }
    }

    #[test]
    fn radius_arithmetic() {
        // N = 4, k = 1, ell = 3: (1 - 1/3 - 1/4) * 4 = 5/3
        assert!(within_list_radius(1, 4, 1, 3));
        assert!(!within_list_radius(2, 4, 1, 3));
        assert!(!within_list_radius(0, 4, 4, 2));
    }
}
