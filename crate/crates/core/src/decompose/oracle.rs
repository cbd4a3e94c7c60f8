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


//! Node-separator oracles.
//!
//! An oracle receives an induced subgraph and returns a separator `S` and
//! two parts with no edge between them. Oracles advertise `(C, alpha, beta)`:
//! each part has at most `beta |V|` nodes and `|S| <= C |V|^alpha`.
//! Heuristic oracles advertise parameters they do not certify.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{GuestGraph, NodeId};

/// Advertised separator parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleParams {
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `false` for heuristics whose parameters are not guaranteed.
    pub certified: bool,
}

/// Subgraph induced by `nodes`, with adjacency in local indices.
#[derive(Clone, Debug)]
pub struct Induced<'g> {
    pub graph: &'g GuestGraph,
    pub nodes: Vec<NodeId>,
    pub adj: Vec<Vec<usize>>,
}

impl<'g> Induced<'g> {
    pub fn new(graph: &'g GuestGraph, nodes: Vec<NodeId>) -> Self {
        let local: HashMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let adj = nodes
            .iter()
            .map(|&v| graph.neighbors(v).filter_map(|u| local.get(&u).copied()).collect())
            .collect();
        Induced { graph, nodes, adj }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Connected components in local indices, each in BFS order from its
    /// smallest member, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &u in &self.adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                    }
                }
            }
            out.push(comp);
        }
        out
    }
}

/// Separator and the two sides, in local indices of the induced subgraph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Separation {
    pub separator: Vec<usize>,
    pub parts: [Vec<usize>; 2],
}

/// A source of node separators for induced subgraphs of one guest.
pub trait NodeSeparatorOracle: Sync {
    fn name(&self) -> &'static str;
    fn params(&self) -> OracleParams;
    fn separate(&self, h: &Induced<'_>) -> Result<Separation>;
}

/// Centroid separator for forests: one node, parts of at most `2n/3`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CentroidOracle;

impl CentroidOracle {
    pub fn for_guest(g: &GuestGraph) -> Result<Self> {
        if !g.is_forest() {
            return Err(Error::OracleFamily("the centroid oracle needs a forest".into()));
        }
        Ok(CentroidOracle)
    }
}

fn centroid(h: &Induced<'_>, comp: &[usize]) -> usize {
    // `comp` is in BFS order, so parents precede children
    let mut parent: HashMap<usize, usize> = HashMap::new();
    let mut size: HashMap<usize, usize> = comp.iter().map(|&v| (v, 1)).collect();
    for &v in comp {
        for &u in &h.adj[v] {
            if u != comp[0] && !parent.contains_key(&u) && parent.get(&v) != Some(&u) {
                parent.insert(u, v);
            }
        }
    }
    for &v in comp.iter().rev() {
        if let Some(&p) = parent.get(&v) {
            let s = size[&v];
            *size.get_mut(&p).unwrap() += s;
        }
    }
    let total = comp.len();
    comp.iter()
        .copied()
        .min_by_key(|&v| {
            let below = h.adj[v].iter().filter(|&&u| parent.get(&u) == Some(&v)).map(|u| size[u]).max().unwrap_or(0);
            (below.max(total - size[&v]), v)
        })
        .unwrap()
}

/// Splits items (sizes, payload) into two groups, each at most `2n/3` when
/// every item is at most `n/2`.
fn two_groups(mut items: Vec<Vec<usize>>) -> [Vec<usize>; 2] {
    items.sort_by_key(|c| (std::cmp::Reverse(c.len()), c.iter().min().copied()));
    let total: usize = items.iter().map(Vec::len).sum::<usize>() + 1;
    let mut groups: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    let mut iter = items.into_iter();
    if let Some(first) = iter.next() {
        if 3 * first.len() >= total {
            groups[0] = first;
            groups[1] = iter.flatten().collect();
            return groups;
        }
        groups[0] = first;
    }
    for item in iter {
        let g = if groups[0].len() <= groups[1].len() { 0 } else { 1 };
        groups[g].extend(item);
    }
    groups
}

impl NodeSeparatorOracle for CentroidOracle {
    fn name(&self) -> &'static str {
        "centroid"
    }

    fn params(&self) -> OracleParams {
        OracleParams { c: 1.0, alpha: 0.0, beta: 2.0 / 3.0, certified: true }
    }

    fn separate(&self, h: &Induced<'_>) -> Result<Separation> {
        if h.is_empty() {
            return Ok(Separation::default());
        }
        let comps = h.components();
        let largest = comps.iter().max_by_key(|c| (c.len(), std::cmp::Reverse(c[0]))).unwrap();
        let c = centroid(h, largest);
        // components of the largest component without the centroid
        let mut items: Vec<Vec<usize>> = comps.iter().filter(|comp| comp[0] != largest[0]).cloned().collect();
        let mut seen: HashMap<usize, ()> = HashMap::from([(c, ())]);
        for &s in &h.adj[c] {
            let mut piece = vec![s];
            seen.insert(s, ());
            let mut i = 0;
            while i < piece.len() {
                let v = piece[i];
                i += 1;
                for &u in &h.adj[v] {
                    if seen.insert(u, ()).is_none() {
                        piece.push(u);
                    }
                }
            }
            items.push(piece);
        }
        Ok(Separation { separator: vec![c], parts: two_groups(items) })
    }
}

/// Middle row or column of a two-dimensional grid guest with row-major ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HyperplaneOracle {
    pub rows: usize,
    pub cols: usize,
}

impl HyperplaneOracle {
    /// Recognises `g` as the `rows x cols` grid with node `r * cols + c` at
    /// row `r`, column `c`.
    pub fn for_guest(g: &GuestGraph) -> Result<Self> {
        let n = g.node_count();
        let mismatch = || Error::OracleFamily("the hyperplane oracle needs a row-major 2-D grid guest".into());
        if n == 0 {
            return Err(mismatch());
        }
        let cols = if n == 1 {
            1
        } else {
            let nb: Vec<NodeId> = g.neighbors(0).collect();
            // a path reads as a single row
            match nb.iter().copied().max() {
                Some(1) => n,
                Some(c) => c,
                None => return Err(mismatch()),
            }
        };
        if cols == 0 || !n.is_multiple_of(cols) {
            return Err(mismatch());
        }
        let rows = n / cols;
        let expected = rows * (cols - 1) + cols * (rows - 1);
        if g.edge_count() != expected {
            return Err(mismatch());
        }
        for &(u, v) in g.edges() {
            let horizontal = v == u + 1 && u % cols != cols - 1;
            let vertical = v == u + cols;
            if !horizontal && !vertical {
                return Err(mismatch());
            }
        }
        Ok(HyperplaneOracle { rows, cols })
    }
}

/// Coordinate `x` such that fewer than half of `values` lie on either side.
fn median_line(values: &[usize]) -> usize {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    sorted[(sorted.len() - 1) / 2]
}

impl NodeSeparatorOracle for HyperplaneOracle {
    fn name(&self) -> &'static str {
        "hyperplane"
    }

    fn params(&self) -> OracleParams {
        OracleParams { c: 2.0, alpha: 0.5, beta: 0.5, certified: true }
    }

    fn separate(&self, h: &Induced<'_>) -> Result<Separation> {
        if h.is_empty() {
            return Ok(Separation::default());
        }
        let n = h.len();
        let coord = |axis: usize| -> Vec<usize> {
            h.nodes.iter().map(|&v| if axis == 0 { v / self.cols } else { v % self.cols }).collect()
        };
        let mut best: Option<Separation> = None;
        for axis in 0..2 {
            let xs = coord(axis);
            let mut candidates = vec![median_line(&xs)];
            // the median of a balanced split may sit on either side
            let mut sorted = xs.clone();
            sorted.sort_unstable();
            candidates.push(sorted[n / 2]);
            for x in candidates {
                let mut sep = Separation::default();
                for (i, &c) in xs.iter().enumerate() {
                    match c.cmp(&x) {
                        std::cmp::Ordering::Less => sep.parts[0].push(i),
                        std::cmp::Ordering::Greater => sep.parts[1].push(i),
                        std::cmp::Ordering::Equal => sep.separator.push(i),
                    }
                }
                if 2 * sep.parts[0].len() > n || 2 * sep.parts[1].len() > n {
                    continue;
                }
                if best.as_ref().is_none_or(|b| sep.separator.len() < b.separator.len()) {
                    best = Some(sep);
                }
            }
        }
        Ok(best.expect("a median line always balances"))
    }
}

/// Breadth-first layer bisection for arbitrary graphs. No guarantees.
#[derive(Clone, Copy, Debug, Default)]
pub struct GreedyBisectionOracle;

impl NodeSeparatorOracle for GreedyBisectionOracle {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn params(&self) -> OracleParams {
        OracleParams { c: 2.0, alpha: 0.5, beta: 2.0 / 3.0, certified: false }
    }

    fn separate(&self, h: &Induced<'_>) -> Result<Separation> {
        let n = h.len();
        if n == 0 {
            return Ok(Separation::default());
        }
        // BFS layers per component, components concatenated
        let mut order = Vec::with_capacity(n);
        let mut layer = vec![0usize; n];
        let mut comp_of = vec![0usize; n];
        let mut seen = vec![false; n];
        let mut comp_id = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                order.push(v);
                comp_of[v] = comp_id;
                for &u in &h.adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        layer[u] = layer[v] + 1;
                        q.push_back(u);
                    }
                }
            }
            comp_id += 1;
        }
        let pivot = order[n / 2];
        let (pc, pl) = (comp_of[pivot], layer[pivot]);
        let mut sep = Separation::default();
        for &v in &order {
            if comp_of[v] == pc && layer[v] == pl {
                sep.separator.push(v);
            } else if comp_of[v] < pc || (comp_of[v] == pc && layer[v] < pl) {
                sep.parts[0].push(v);
            } else {
                sep.parts[1].push(v);
            }
        }
        Ok(sep)
    }
}

/// Checks partition, absence of crossing edges and balance. Size is checked
/// by the caller, which knows whether the oracle is certified.
pub fn check_separation(h: &Induced<'_>, sep: &Separation, beta: f64) -> std::result::Result<(), String> {
    let n = h.len();
    let mut side = vec![u8::MAX; n];
    for (tag, list) in [(0u8, &sep.separator), (1, &sep.parts[0]), (2, &sep.parts[1])] {
        for &v in list {
            if v >= n || side[v] != u8::MAX {
                return Err(format!("local node {v} listed twice or out of range"));
            }
            side[v] = tag;
        }
    }
    if side.contains(&u8::MAX) {
        return Err("separator and parts do not cover the subgraph".into());
    }
    for v in 0..n {
        for &u in &h.adj[v] {
            if side[v] * side[u] == 2 {
                return Err(format!("edge {}-{} crosses the parts", h.nodes[v], h.nodes[u]));
            }
        }
    }
    let cap = beta * n as f64 + 1e-9;
    for part in &sep.parts {
        if part.len() as f64 > cap {
            return Err(format!("part of {} nodes exceeds {beta} * {n}", part.len()));
        }
    }
    Ok(())
}
