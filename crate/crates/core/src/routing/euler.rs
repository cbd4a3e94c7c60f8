// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.


//! Balanced orientation of an undirected graph along Euler circuits.

use crate::graph::{GuestGraph, NodeId};

/// Orients every edge of `g` so that each node `v` has in- and out-degree at
/// most `ceil(deg(v) / 2)`. Entry `i` of the result is edge `i` as a
/// `(source, target)` pair.
///
/// Odd-degree nodes are paired in increasing id order by dummy edges, the
/// augmented graph is decomposed into closed trails, and every edge takes
/// the direction in which its trail traverses it. Dummy edges are dropped.
pub fn euler_orient(g: &GuestGraph) -> Vec<(NodeId, NodeId)> {
    let n = g.node_count();
    let mut ends: Vec<(NodeId, NodeId)> = g.edges().to_vec();
    let odd: Vec<NodeId> = (0..n).filter(|&v| g.degree(v) % 2 == 1).collect();
    for pair in odd.chunks(2) {
        ends.push((pair[0], pair[1]));
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &(u, v)) in ends.iter().enumerate() {
        adj[u].push(e);
        adj[v].push(e);
    }
    let mut used = vec![false; ends.len()];
    let mut next = vec![0usize; n];
    let mut oriented = vec![(0, 0); ends.len()];
    for start in 0..n {
        loop {
            // walk a closed trail from `start` until it gets stuck
            let mut cur = start;
            let mut moved = false;
            loop {
                while next[cur] < adj[cur].len() && used[adj[cur][next[cur]]] {
                    next[cur] += 1;
                }
                if next[cur] == adj[cur].len() {
                    break;
                }
                let e = adj[cur][next[cur]];
                used[e] = true;
                let (a, b) = ends[e];
                let to = if a == cur { b } else { a };
                oriented[e] = (cur, to);
                cur = to;
                moved = true;
            }
            debug_assert!(!moved || cur == start, "trail must close in an even graph");
            if !moved {
                break;
            }
        }
    }
    oriented.truncate(g.edge_count());
    oriented
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn degrees(n: usize, arcs: &[(NodeId, NodeId)]) -> (Vec<usize>, Vec<usize>) {
        let mut out = vec![0; n];
        let mut inn = vec![0; n];
        for &(u, v) in arcs {
            out[u] += 1;
            inn[v] += 1;
        }
        (inn, out)
    }

    #[test]
    fn triangle_becomes_a_cycle() {
        let g = GuestGraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let (inn, out) = degrees(3, &euler_orient(&g));
        assert_eq!(inn, vec![1, 1, 1]);
        assert_eq!(out, vec![1, 1, 1]);
    }

    #[test]
    fn path_is_directed_one_way() {
        let g = GuestGraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let arcs = euler_orient(&g);
        assert!(arcs == vec![(0, 1), (1, 2)] || arcs == vec![(1, 0), (2, 1)]);
    }

    #[test]
    fn star_centre_is_balanced() {
        // every orientation of K_{1,3} has max(in, out) >= 2 at the centre;
        // the balanced ones reach exactly 2
        let g = GuestGraph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let (inn, out) = degrees(4, &euler_orient(&g));
        assert_eq!(inn[0] + out[0], 3);
        assert_eq!(inn[0].max(out[0]), 2);
    }

    proptest! {
        #[test]
        fn orientation_is_balanced(raw in proptest::collection::vec((0usize..12, 0usize..12), 0..50)) {
            let mut seen = std::collections::HashSet::new();
            let edges: Vec<_> = raw
                .into_iter()
                .filter(|&(u, v)| u != v)
                .map(|(u, v)| (u.min(v), u.max(v)))
                .filter(|e| seen.insert(*e))
                .collect();
            let g = GuestGraph::new(12, edges.clone()).unwrap();
            let arcs = euler_orient(&g);
            prop_assert_eq!(arcs.len(), edges.len());
            for (&(a, b), &(u, v)) in arcs.iter().zip(&edges) {
                prop_assert!((a, b) == (u, v) || (a, b) == (v, u));
            }
            let (inn, out) = degrees(12, &arcs);
            let odd = (0..12).filter(|&v| g.degree(v) % 2 == 1).count();
            let imbalance: usize = (0..12).map(|v| inn[v].abs_diff(out[v])).sum();
            prop_assert!(imbalance <= odd);
            for v in 0..12 {
                let cap = g.degree(v).div_ceil(2);
                prop_assert!(inn[v] <= cap && out[v] <= cap);
            }
        }
    }
}
