//! Client-prefix × group-slot bipartite graphs and a Hopcroft-Karp matcher.
//!
//! Every group `j` owns `alpha[j]` interchangeable right-hand slots. All
//! slots of one group share the same left neighbourhood, so adjacency is
//! stored per (left vertex, group) and expanded into slots only inside the
//! matcher.

use std::collections::VecDeque;

use crate::error::{usage, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    left_size: usize,
    alpha: Vec<usize>,
    slot_offset: Vec<usize>,
    /// For each left vertex, ascending indices of groups it is adjacent to.
    /// Groups without slots never appear.
    adjacency: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(alpha: Vec<usize>, adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let mut slot_offset = Vec::with_capacity(alpha.len() + 1);
        let mut acc = 0;
        for &a in &alpha {
            slot_offset.push(acc);
            acc += a;
        }
        slot_offset.push(acc);
        let mut adjacency = adjacency;
        for row in &mut adjacency {
            row.sort_unstable();
            row.dedup();
            if row.iter().any(|&g| g >= alpha.len()) {
                return Err(usage("adjacency refers to an unknown group"));
            }
            row.retain(|&g| alpha[g] > 0);
        }
        Ok(Self {
            left_size: adjacency.len(),
            alpha,
            slot_offset,
            adjacency,
        })
    }

    pub fn left_size(&self) -> usize {
        self.left_size
    }

    pub fn right_size(&self) -> usize {
        *self.slot_offset.last().unwrap()
    }

    /// `(group, copy)` for every right-hand slot, in slot order.
    pub fn right_slots(&self) -> Vec<(usize, usize)> {
        self.alpha
            .iter()
            .enumerate()
            .flat_map(|(g, &a)| (0..a).map(move |r| (g, r)))
            .collect()
    }

    pub fn slot_group(&self, slot: usize) -> usize {
        // slot_offset is non-decreasing; find the last group starting at or before `slot`
        self.slot_offset.partition_point(|&o| o <= slot) - 1
    }

    pub fn adjacent_groups(&self, left: usize) -> &[usize] {
        &self.adjacency[left]
    }

    /// Slot indices adjacent to `left`, ascending.
    pub fn neighbors(&self, left: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[left]
            .iter()
            .flat_map(move |&g| self.slot_offset[g]..self.slot_offset[g + 1])
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency
            .iter()
            .map(|row| row.iter().map(|&g| self.alpha[g]).sum::<usize>())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    /// `(left vertex, right slot)`, sorted by left vertex.
    pub pairs: Vec<(usize, usize)>,
    pub saturates_left: bool,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Left vertex `i` gets every slot of group `j` iff `dmin[i][j] <= lambda`.
pub fn build_threshold_graph(dmin: &[Vec<f64>], alpha: &[usize], lambda: f64) -> Result<BipartiteGraph> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(usage("threshold radius must be non-negative"));
    }
    let adjacency = dmin
        .iter()
        .map(|row| {
            debug_assert_eq!(row.len(), alpha.len());
            (0..alpha.len())
                .filter(|&j| alpha[j] > 0 && row[j] <= lambda)
                .collect()
        })
        .collect();
    BipartiteGraph::new(alpha.to_vec(), adjacency)
}

const FREE: usize = usize::MAX;

/// Maximum-cardinality matching by Hopcroft-Karp.
///
/// Each phase layers the graph by BFS from the free left vertices and then
/// augments along vertex-disjoint shortest paths. Vertices are scanned in
/// ascending order, so the result is deterministic.
pub fn max_matching(graph: &BipartiteGraph) -> Matching {
    let n_left = graph.left_size();
    let mut match_left = vec![FREE; n_left];
    let mut match_right = vec![FREE; graph.right_size()];
    let mut layer = vec![0usize; n_left];

    loop {
        // BFS layering
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_left[u] == FREE {
                layer[u] = 0;
                queue.push_back(u);
            } else {
                layer[u] = usize::MAX;
            }
        }
        let mut found_free = false;
        while let Some(u) = queue.pop_front() {
            for v in graph.neighbors(u) {
                let w = match_right[v];
                if w == FREE {
                    found_free = true;
                } else if layer[w] == usize::MAX {
                    layer[w] = layer[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found_free {
            break;
        }

        let mut augmented = false;
        for u in 0..n_left {
            if match_left[u] == FREE && augment(graph, u, &mut match_left, &mut match_right, &mut layer) {
                augmented = true;
            }
        }
        if !augmented {
            break;
        }
    }

    let pairs: Vec<(usize, usize)> = match_left
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != FREE)
        .map(|(u, &v)| (u, v))
        .collect();
    Matching {
        saturates_left: pairs.len() == n_left,
        pairs,
    }
}

fn augment(
    graph: &BipartiteGraph,
    u: usize,
    match_left: &mut [usize],
    match_right: &mut [usize],
    layer: &mut [usize],
) -> bool {
    let next = layer[u].wrapping_add(1);
    // dead ends are removed from the layering for the rest of the phase
    layer[u] = usize::MAX;
    for v in graph.neighbors(u) {
        let w = match_right[v];
        let ok = w == FREE || (layer[w] == next && augment(graph, w, match_left, match_right, layer));
        if ok {
            match_left[u] = v;
            match_right[v] = u;
            return true;
        }
    }
    false
}
