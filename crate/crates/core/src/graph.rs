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

//! Undirected simple guest graphs.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type EdgeId = usize;

/// An undirected simple graph on nodes `0..n`.
///
/// Edges are stored once with `u < v`; edge ids index into [`GuestGraph::edges`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuestGraph {
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
    adj: Vec<Vec<(NodeId, EdgeId)>>,
}

impl GuestGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) out of range for {n} nodes")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {a}")));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({},{})", e.0, e.1)));
            }
            list.push(e);
        }
        let mut adj = vec![Vec::new(); n];
        for (id, &(a, b)) in list.iter().enumerate() {
            adj[a].push((b, id));
            adj[b].push((a, id));
        }
        Ok(GuestGraph { n, edges: list, adj })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> (NodeId, NodeId) {
        self.edges[id]
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adj[v].iter().map(|&(u, _)| u)
    }

    /// `(neighbor, edge id)` pairs incident to `v`.
    pub fn incident(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The endpoint of `e` other than `v`.
    pub fn opposite(&self, e: EdgeId, v: NodeId) -> NodeId {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Ids of edges with both endpoints in the subset.
    pub fn induced_edges(&self, members: &[bool]) -> Vec<EdgeId> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| members[a] && members[b])
            .map(|(id, _)| id)
            .collect()
    }

    pub fn is_forest(&self) -> bool {
        self.edges.len() + self.component_count() == self.n
    }

    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for u in self.neighbors(v) {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        count
    }

    /// Parses the `N M` header followed by `M` lines of `u v`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let nums = parse_ints(header, ln)?;
        if nums.len() != 2 {
            return Err(Error::Parse { line: ln, msg: "header must be `N M`".into() });
        }
        let (n, m) = (nums[0], nums[1]);
        let mut edges = Vec::with_capacity(m);
        for (ln, line) in lines {
            let xs = parse_ints(line, ln)?;
            if xs.len() != 2 {
                return Err(Error::Parse { line: ln, msg: "edge line must be `u v`".into() });
            }
            edges.push((xs[0], xs[1]));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header announces {m} edges, found {}", edges.len()),
            });
        }
        GuestGraph::new(n, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.n, self.edges.len()).unwrap();
        for &(a, b) in &self.edges {
            writeln!(out, "{a} {b}").unwrap();
        }
        out
    }
}

fn parse_ints(line: &str, ln: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| Error::Parse { line: ln, msg: format!("{t:?}: {e}") }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_text() {
        let g = GuestGraph::new(4, [(0, 1), (2, 1), (3, 2)]).unwrap();
        let back = GuestGraph::parse(&g.to_text()).unwrap();
        assert_eq!(g, back);
        assert_eq!(back.edge(1), (1, 2));
        assert_eq!(back.max_degree(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(GuestGraph::new(2, [(0, 0)]).is_err());
        assert!(GuestGraph::new(2, [(0, 1), (1, 0)]).is_err());
        assert!(GuestGraph::new(2, [(0, 2)]).is_err());
        assert!(GuestGraph::parse("3 2\n0 1\n").is_err());
        assert!(GuestGraph::parse("3 1\n0 x\n").is_err());
    }

    #[test]
    fn forest_detection() {
        let path = GuestGraph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(path.is_forest());
        let tri = GuestGraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(!tri.is_forest());
        let isolated = GuestGraph::new(3, []).unwrap();
        assert!(isolated.is_forest());
        assert_eq!(isolated.component_count(), 3);
    }
}
