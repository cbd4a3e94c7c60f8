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


//! Independent checks of embeddings and decomposition trees, plus the
//! reference bounds that measurements are reported against.
//!
//! Nothing here calls producer code: paths are rebuilt from the raw edge
//! lists with plain coordinate vectors, and tree bookkeeping is recomputed
//! from the guest.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decompose::DecompositionTree;
use crate::graph::GuestGraph;
use crate::grid::{Embedding, GridSpec};

type Point = Vec<u32>;

/// Outcome of [`verify_embedding`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingReport {
    pub valid: bool,
    pub congestion: u32,
    pub dilation: usize,
    /// One entry per problem found, naming the guest node or edge.
    pub problems: Vec<String>,
    /// Guest edges whose image failed to check.
    pub bad_edges: Vec<usize>,
}

impl EmbeddingReport {
    /// `valid=<bool> congestion=<int> dilation=<int>`.
    pub fn summary_line(&self) -> String {
        format!("valid={} congestion={} dilation={}", self.valid, self.congestion, self.dilation)
    }
}

impl fmt::Display for EmbeddingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.problems {
            writeln!(f, "error: {p}")?;
        }
        write!(f, "{}", self.summary_line())
    }
}

fn in_host(dims: &[u32], p: &[u32]) -> bool {
    p.len() == dims.len() && p.iter().zip(dims).all(|(&x, &l)| x >= 1 && x <= l)
}

/// Walks the edge set of one image from `from`; returns the path length if
/// the set is exactly a simple path ending at `to`.
fn trace(edges: &[(Point, Point)], from: &Point, to: &Point) -> Result<usize, String> {
    if edges.is_empty() {
        return if from == to { Ok(0) } else { Err("empty image between distinct nodes".into()) };
    }
    let mut adj: HashMap<&Point, Vec<&Point>> = HashMap::new();
    for (a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    if let Some((v, _)) = adj.iter().find(|(_, n)| n.len() > 2) {
        return Err(format!("branches at {v:?}"));
    }
    let mut prev: Option<&Point> = None;
    let mut cur = from;
    let mut steps = 0;
    let mut seen: HashSet<&Point> = HashSet::from([from]);
    while cur != to {
        let next = adj
            .get(cur)
            .and_then(|n| n.iter().copied().find(|&x| Some(x) != prev))
            .ok_or_else(|| format!("path breaks off at {cur:?}"))?;
        if !seen.insert(next) {
            return Err(format!("revisits {next:?}"));
        }
        prev = Some(cur);
        cur = next;
        steps += 1;
    }
    if steps != edges.len() {
        return Err(format!("{} edges are not on the path", edges.len() - steps));
    }
    if adj.get(from).map_or(0, Vec::len) != 1 {
        return Err("path does not start at the mapped endpoint".into());
    }
    Ok(steps)
}

/// Checks that `emb` is an embedding of `g` into `host`: the node map is
/// one-to-one into the host, every guest edge has an image, and every image
/// is a simple host path between its endpoints' images. Congestion and
/// dilation are measured from scratch.
pub fn verify_embedding(g: &GuestGraph, host: &GridSpec, emb: &Embedding) -> EmbeddingReport {
    let dims = host.dims().to_vec();
    let mut problems = Vec::new();
    let mut bad_edges = Vec::new();
    if emb.host.dims() != host.dims() {
        problems.push(format!("embedding is for host {} not {host}", emb.host));
    }
    let phi: Vec<Point> = emb.phi.iter().map(|v| v.coords().to_vec()).collect();
    if phi.len() != g.node_count() {
        problems.push(format!("node map covers {} of {} guest nodes", phi.len(), g.node_count()));
    }
    let mut owner: HashMap<&Point, usize> = HashMap::new();
    for (s, p) in phi.iter().enumerate() {
        if !in_host(&dims, p) {
            problems.push(format!("guest node {s} maps outside the host to {p:?}"));
        }
        if let Some(t) = owner.insert(p, s) {
            problems.push(format!("guest nodes {t} and {s} share host node {p:?}"));
        }
    }
    if emb.edges.len() != g.edge_count() || emb.rho.len() != g.edge_count() {
        problems.push(format!(
            "{} edges and {} images for a guest with {} edges",
            emb.edges.len(),
            emb.rho.len(),
            g.edge_count()
        ));
    }
    let mut load: HashMap<(Point, usize), u32> = HashMap::new();
    let mut dilation = 0;
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let (Some(pu), Some(pv)) = (phi.get(u), phi.get(v)) else { continue };
        let Some(img) = emb.rho.get(e) else {
            bad_edges.push(e);
            continue;
        };
        let mut edges = Vec::with_capacity(img.len());
        let mut ok = true;
        for he in img.edges() {
            let lo = he.lo.coords().to_vec();
            let axis = he.axis();
            let mut hi = lo.clone();
            if axis < hi.len() {
                hi[axis] += 1;
            }
            if axis >= dims.len() || !in_host(&dims, &lo) || !in_host(&dims, &hi) {
                problems.push(format!("guest edge {e} uses host edge {he} outside the host"));
                ok = false;
                continue;
            }
            *load.entry((lo.clone(), axis)).or_default() += 1;
            edges.push((lo, hi));
        }
        match trace(&edges, pu, pv) {
            Ok(len) if ok => dilation = dilation.max(len),
            Ok(_) => bad_edges.push(e),
            Err(msg) => {
                problems.push(format!("guest edge {e} ({u}, {v}): {msg}"));
                bad_edges.push(e);
            }
        }
    }
    bad_edges.dedup();
    EmbeddingReport {
        valid: problems.is_empty() && bad_edges.is_empty(),
        congestion: load.values().copied().max().unwrap_or(0),
        dilation,
        problems,
        bad_edges,
    }
}

/// Deletes one host edge from the image of a randomly chosen guest edge
/// with a non-empty image. Returns the damaged guest edge, or `None` when
/// every image is empty.
pub fn inject_fault(emb: &mut Embedding, seed: u64) -> Option<usize> {
    let candidates: Vec<usize> = (0..emb.rho.len()).filter(|&e| !emb.rho[e].is_empty()).collect();
    if candidates.is_empty() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = candidates[rng.gen_range(0..candidates.len())];
    let victim = emb.rho[e].edges()[rng.gen_range(0..emb.rho[e].len())].clone();
    emb.rho[e].remove(&victim);
    Some(e)
}

/// Outcome of [`verify_tree`].
#[derive(Clone, Debug, PartialEq)]
pub struct TreeReport {
    pub valid: bool,
    pub problems: Vec<String>,
    /// `max |ext(H)| / |V(H)|^alpha`, recomputed from the guest.
    pub max_expansion: f64,
}

/// Recomputes the bookkeeping of every tree node from `g`: children
/// partition their parent with the recorded split sizes, leaves are single
/// nodes, external and cut edge lists are exact, the inherited set is the
/// part of the node lying in ancestors' separators, and every external edge
/// touches some ancestor's separator.
pub fn verify_tree(g: &GuestGraph, t: &DecompositionTree) -> TreeReport {
    let mut problems = Vec::new();
    let mut max_expansion: f64 = 0.0;
    let bmax = t.params.tree_beta();
    if t.nodes.is_empty() {
        return TreeReport { valid: false, problems: vec!["empty tree".into()], max_expansion };
    }
    let mut root: Vec<usize> = t.nodes[0].nodes.clone();
    root.sort_unstable();
    if root != (0..g.node_count()).collect::<Vec<_>>() {
        problems.push("root does not hold every guest node".into());
    }
    let mut sep_of: Vec<Vec<usize>> = vec![Vec::new(); g.node_count()];
    for (i, node) in t.nodes.iter().enumerate() {
        for &v in &node.separator {
            if let Some(list) = sep_of.get_mut(v) {
                list.push(i);
            }
        }
    }
    for (i, node) in t.nodes.iter().enumerate() {
        let members: HashSet<usize> = node.nodes.iter().copied().collect();
        let mut external: Vec<usize> = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, (a, b))| members.contains(a) != members.contains(b))
            .map(|(e, _)| e)
            .collect();
        external.sort_unstable();
        if external != node.external {
            problems.push(format!("tree node {i}: external edge list is wrong"));
        }
        if let Some(p) = node.parent {
            let up = &t.nodes[p];
            if let Some(e) = external.iter().find(|e| up.external.binary_search(e).is_err() && up.cut.binary_search(e).is_err()) {
                problems.push(format!("tree node {i}: external edge {e} is neither external nor cut at the parent"));
            }
        }
        // separator nodes of proper ancestors
        let above = |v: usize| {
            let mut cur = node.parent;
            while let Some(p) = cur {
                if sep_of[v].contains(&p) {
                    return true;
                }
                cur = t.nodes[p].parent;
            }
            false
        };
        let mut inherited: Vec<usize> = node.nodes.iter().copied().filter(|&v| above(v)).collect();
        inherited.sort_unstable();
        let mut recorded = node.inherited.clone();
        recorded.sort_unstable();
        if inherited != recorded {
            problems.push(format!("tree node {i}: inherited set differs from the ancestors' separators"));
        }
        for &e in &external {
            let (a, b) = g.edges()[e];
            if !above(a) && !above(b) {
                problems.push(format!("tree node {i}: external edge {e} misses every ancestor separator"));
            }
        }
        if !node.nodes.is_empty() {
            max_expansion =
                max_expansion.max(external.len() as f64 / (node.nodes.len() as f64).powf(t.params.alpha));
        }
        match node.children {
            None => {
                if node.nodes.len() != 1 {
                    problems.push(format!("leaf {i} holds {} nodes", node.nodes.len()));
                }
            }
            Some([c1, c2]) => {
                let (h1, h2) = (&t.nodes[c1].nodes, &t.nodes[c2].nodes);
                let mut union: Vec<usize> = h1.iter().chain(h2).copied().collect();
                union.sort_unstable();
                let mut own = node.nodes.clone();
                own.sort_unstable();
                if union != own {
                    problems.push(format!("tree node {i}: children do not partition it"));
                }
                if let Some(s) = &node.split {
                    let n = node.nodes.len() as u64;
                    let (num, den) = (s.beta_prime.num, s.beta_prime.den);
                    let want1 = (num * n).div_ceil(den);
                    let want2 = ((den - num) * n) / den;
                    if (h1.len() as u64, h2.len() as u64) != (want1, want2) {
                        problems.push(format!("tree node {i}: child sizes {} / {} break the split ratio", h1.len(), h2.len()));
                    }
                    let bp = num as f64 / den as f64;
                    if bp < 0.5 - 1e-12 || bp > bmax + 1e-12 {
                        problems.push(format!("tree node {i}: split ratio {bp} out of range"));
                    }
                }
                let m1: HashSet<usize> = h1.iter().copied().collect();
                let mut cut: Vec<usize> = g
                    .edges()
                    .iter()
                    .enumerate()
                    .filter(|(_, (a, b))| members.contains(a) && members.contains(b) && m1.contains(a) != m1.contains(b))
                    .map(|(e, _)| e)
                    .collect();
                cut.sort_unstable();
                if cut != node.cut {
                    problems.push(format!("tree node {i}: cut edge list is wrong"));
                }
                for c in [c1, c2] {
                    if t.nodes[c].parent != Some(i) || t.nodes[c].depth != node.depth + 1 {
                        problems.push(format!("tree node {c}: parent link is wrong"));
                    }
                }
            }
        }
    }
    TreeReport { valid: problems.is_empty(), problems, max_expansion }
}

/// Reference values for a guest/host pair.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceBounds {
    /// `2 ceil(delta/2) max l_i`, exact.
    pub permutation_congestion: u64,
    /// `2 sum l_i`, exact.
    pub permutation_dilation: u64,
    /// Asymptotic congestion shape for separators of size `O(n^alpha)`.
    pub separator_regime: String,
    /// Asymptotic congestion shape for trees of expansion `c n^alpha`.
    pub tree_regime: String,
    pub dilation_shape: String,
}

/// Exact permutation-routing bounds and labelled asymptotic shapes. The
/// shapes are reference forms only; no constants are certified.
pub fn reference_bounds(n: usize, max_degree: usize, c: f64, alpha: f64, d: usize, dims: &[u32]) -> ReferenceBounds {
    let lmax = u64::from(dims.iter().copied().max().unwrap_or(0));
    let sum: u64 = dims.iter().map(|&l| u64::from(l)).sum();
    let df = d as f64;
    let one = 1.0 / (1.0 - alpha);
    let two = 2.0 / (1.0 - alpha);
    let eq = |a: f64, b: f64| (a - b).abs() < 1e-9;
    let separator_regime = if eq(df, one) {
        "d = 1/(1−α): O(Δ log N)".to_string()
    } else if df > one {
        "d > 1/(1−α): O(Δ)".to_string()
    } else {
        format!("d < 1/(1−α): O(Δ N^{:.4})", alpha - 1.0 + 1.0 / df)
    };
    let tree_regime = if df > two + 1e-9 {
        "d > 2/(1−α): O(dC + d²Δ)".to_string()
    } else if df > one + 1e-9 {
        format!("1/(1−α) < d ≤ 2/(1−α): O(C/{:.4} + d²Δ)", 1.0 - alpha - 1.0 / df)
    } else {
        format!("d ≤ 1/(1−α): O(C(N^{:.4} + log N) + d²Δ)", alpha - 1.0 + 1.0 / df)
    };
    let _ = c;
    ReferenceBounds {
        permutation_congestion: 2 * max_degree.div_ceil(2) as u64 * lmax,
        permutation_dilation: 2 * sum,
        separator_regime,
        tree_regime,
        dilation_shape: format!("O(d N^(1/d)) = O({:.1})", df * (n.max(1) as f64).powf(1.0 / df)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridNode, Image};

    fn path_guest() -> (GuestGraph, GridSpec, Embedding) {
        let g = GuestGraph::new(3, [(0, 1), (0, 2)]).unwrap();
        let host: GridSpec = "2x2".parse().unwrap();
        let p = |a: u32, b: u32| GridNode::from_slice(&[a, b]);
        let phi = vec![p(1, 1), p(1, 2), p(2, 2)];
        let rho = vec![Image::from_walk(&[p(1, 1), p(1, 2)]), Image::from_walk(&[p(1, 1), p(2, 1), p(2, 2)])];
        let emb = Embedding::new(host.clone(), phi, g.edges().to_vec(), rho).unwrap();
        (g, host, emb)
    }

    #[test]
    fn accepts_a_valid_embedding() {
        let (g, host, emb) = path_guest();
        let r = verify_embedding(&g, &host, &emb);
        assert_eq!(r.summary_line(), "valid=true congestion=1 dilation=2");
    }

    #[test]
    fn reports_the_broken_edge() {
        let (g, host, mut emb) = path_guest();
        let hit = inject_fault(&mut emb, 3).unwrap();
        let r = verify_embedding(&g, &host, &emb);
        assert!(!r.valid);
        assert_eq!(r.bad_edges, vec![hit]);
        assert!(r.problems[0].contains(&format!("guest edge {hit}")));
    }

    #[test]
    fn catches_shared_host_nodes() {
        let (g, host, mut emb) = path_guest();
        emb.phi[2] = emb.phi[1].clone();
        let r = verify_embedding(&g, &host, &emb);
        assert!(!r.valid);
        assert!(r.problems.iter().any(|p| p.contains("share")));
    }

    #[test]
    fn catches_detours_with_spare_edges() {
        let (g, host, mut emb) = path_guest();
        let p = |a: u32, b: u32| GridNode::from_slice(&[a, b]);
        // a path plus a disjoint extra edge
        emb.rho[0] = Image::from_edges(
            Image::from_walk(&[p(1, 1), p(1, 2)]).edges().iter().chain(Image::from_walk(&[p(2, 1), p(2, 2)]).edges()).cloned(),
        );
        assert!(!verify_embedding(&g, &host, &emb).valid);
    }

    fn cbt_tree() -> (GuestGraph, DecompositionTree) {
        let g = GuestGraph::new(31, (1..31).map(|i| ((i - 1) / 2, i))).unwrap();
        let t = crate::decompose::build_decomposition_tree(&g, &crate::decompose::CentroidOracle, 0.1).unwrap();
        (g, t)
    }

    #[test]
    fn built_trees_pass() {
        let (g, t) = cbt_tree();
        let r = verify_tree(&g, &t);
        assert!(r.valid, "{:?}", r.problems);
        assert!(r.max_expansion > 0.0);
    }

    #[test]
    fn corrupted_trees_fail() {
        let (g, t) = cbt_tree();
        let mut bad = t.clone();
        bad.nodes[1].external.push(29);
        assert!(!verify_tree(&g, &bad).valid);
        let mut bad = t.clone();
        let leaf = bad.nodes.iter().position(|n| n.is_leaf()).unwrap();
        bad.nodes[leaf].nodes.push(30);
        assert!(!verify_tree(&g, &bad).valid);
        let mut bad = t;
        bad.nodes[1].inherited.clear();
        assert!(!verify_tree(&g, &bad).valid);
    }

    #[test]
    fn reference_values() {
        let r = reference_bounds(64, 4, 1.0, 0.0, 2, &[8, 8]);
        assert_eq!(r.permutation_congestion, 32);
        assert_eq!(r.permutation_dilation, 32);
        assert_eq!(reference_bounds(64, 1, 1.0, 0.0, 2, &[8, 8]).permutation_congestion, 16);
        assert_eq!(reference_bounds(64, 3, 1.0, 0.5, 2, &[8, 8]).separator_regime, "d = 1/(1−α): O(Δ log N)");
        assert!(reference_bounds(64, 3, 1.0, 0.0, 3, &[4, 4, 4]).separator_regime.starts_with("d > 1/(1−α)"));
        assert!(reference_bounds(64, 3, 1.0, 0.9, 2, &[8, 8]).separator_regime.starts_with("d < 1/(1−α)"));
        assert!(reference_bounds(64, 3, 1.0, 0.0, 3, &[4, 4, 4]).tree_regime.starts_with("d > 2/(1−α)"));
    }
}
