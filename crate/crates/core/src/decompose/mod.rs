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


//! Decomposition trees with bounded expansion built from node separators.
//!
//! Each frame holds a subgraph `H` and the set `X` of its nodes that sat in
//! an ancestor's separator. With `H' = H - X`, the frame either separates
//! `H'` with the oracle (when `C |H'|^alpha <= eps |H'|`) or treats all of
//! `H'` as separator. Inherited and fresh separator nodes `Y = X + S` are
//! then dealt to the two children in the proportion `beta'` of the parts, so
//! that the children have exactly `ceil(beta' |H|)` and
//! `floor((1 - beta') |H|)` nodes and every external edge of a child stays
//! incident to its inherited set.

mod oracle;

pub use oracle::{
    check_separation, CentroidOracle, GreedyBisectionOracle, HyperplaneOracle, Induced, NodeSeparatorOracle,
    OracleParams, Separation,
};

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, GuestGraph, NodeId};
use crate::par::{self, Exec};

/// Exact fraction `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0 && num <= den);
        Ratio { num, den }
    }

    pub fn half() -> Self {
        Ratio { num: 1, den: 2 }
    }

    /// `ceil(self * m)`.
    pub fn ceil_mul(&self, m: u64) -> u64 {
        (self.num * m).div_ceil(self.den)
    }

    /// `floor((1 - self) * m)`.
    pub fn floor_complement_mul(&self, m: u64) -> u64 {
        (self.den - self.num) * m / self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitKind {
    /// The oracle separated `H'`.
    Separated,
    /// `H'` was too small to separate and went whole into `Y`.
    Whole,
    /// Supplied by hand through [`DecompositionTree::from_splits`].
    Manual,
}

/// How one internal tree node was split.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Split {
    pub kind: SplitKind,
    pub beta_prime: Ratio,
    /// `|H'_1|`, `|H'_2|`.
    pub parts: [usize; 2],
    /// `|Y_1|`, `|Y_2|`.
    pub y: [usize; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    /// Guest nodes of `H`, sorted.
    pub nodes: Vec<NodeId>,
    /// Nodes inherited from ancestors' separators, sorted.
    pub inherited: Vec<NodeId>,
    /// The separator `S` chosen at this node (all of `H'` for whole splits).
    pub separator: Vec<NodeId>,
    pub split: Option<Split>,
    /// Larger child first.
    pub children: Option<[usize; 2]>,
    pub parent: Option<usize>,
    /// Guest edges with exactly one endpoint in `H`, sorted.
    pub external: Vec<EdgeId>,
    /// Guest edges between the two children, sorted.
    pub cut: Vec<EdgeId>,
    pub depth: usize,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

/// Parameters the tree was built with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeParams {
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub certified: bool,
}

impl TreeParams {
    /// Balance of the resulting tree, `beta / (1 - eps)`.
    pub fn tree_beta(&self) -> f64 {
        self.beta / (1.0 - self.epsilon)
    }
}

/// Arena-backed binary tree in preorder; index 0 is the root.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionTree {
    pub nodes: Vec<TreeNode>,
    pub params: TreeParams,
}

impl DecompositionTree {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &TreeNode {
        &self.nodes[i]
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|t| t.is_leaf()).count()
    }

    pub fn height(&self) -> usize {
        self.nodes.iter().map(|t| t.depth).max().unwrap_or(0)
    }

    /// Preorder dump, one `depth |V| |ext| [separator ids]` line per node.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for t in &self.nodes {
            let ids: Vec<String> = t.separator.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{} {} {} [{}]", t.depth, t.nodes.len(), t.external.len(), ids.join(" ")).unwrap();
        }
        out
    }

    /// Builds a tree from an explicit splitting rule. `split` gets the nodes
    /// of a tree node with at least two nodes and returns its two children.
    pub fn from_splits<F>(g: &GuestGraph, params: TreeParams, split: F) -> Result<Self>
    where
        F: Fn(&[NodeId]) -> (Vec<NodeId>, Vec<NodeId>),
    {
        let mut nodes = Vec::new();
        manual_frame(g, &split, (0..g.node_count()).collect(), Vec::new(), 0, None, &mut nodes)?;
        Ok(DecompositionTree { nodes, params })
    }
}

fn external_of(g: &GuestGraph, members: &[NodeId]) -> Vec<EdgeId> {
    let inside: HashSet<NodeId> = members.iter().copied().collect();
    let mut ext: Vec<EdgeId> = members
        .iter()
        .flat_map(|&v| g.incident(v).iter().filter(|(u, _)| !inside.contains(u)).map(|&(_, e)| e))
        .collect();
    ext.sort_unstable();
    ext
}

fn cut_between(g: &GuestGraph, a: &[NodeId], b: &[NodeId]) -> Vec<EdgeId> {
    let in_b: HashSet<NodeId> = b.iter().copied().collect();
    let mut cut: Vec<EdgeId> = a
        .iter()
        .flat_map(|&v| g.incident(v).iter().filter(|(u, _)| in_b.contains(u)).map(|&(_, e)| e))
        .collect();
    cut.sort_unstable();
    cut
}

fn manual_frame<F>(
    g: &GuestGraph,
    split: &F,
    members: Vec<NodeId>,
    external: Vec<EdgeId>,
    depth: usize,
    parent: Option<usize>,
    out: &mut Vec<TreeNode>,
) -> Result<()>
where
    F: Fn(&[NodeId]) -> (Vec<NodeId>, Vec<NodeId>),
{
    let me = out.len();
    out.push(TreeNode {
        nodes: members.clone(),
        inherited: Vec::new(),
        separator: Vec::new(),
        split: None,
        children: None,
        parent,
        external,
        cut: Vec::new(),
        depth,
    });
    if members.len() <= 1 {
        return Ok(());
    }
    let (mut a, mut b) = split(&members);
    a.sort_unstable();
    b.sort_unstable();
    let mut both: Vec<NodeId> = a.iter().chain(&b).copied().collect();
    both.sort_unstable();
    if a.is_empty() || b.is_empty() || both != members {
        return Err(Error::InvalidParameter(format!("split of {} nodes is not a bipartition", members.len())));
    }
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    let n = members.len() as u64;
    out[me].cut = cut_between(g, &a, &b);
    out[me].split = Some(Split {
        kind: SplitKind::Manual,
        beta_prime: Ratio::new(a.len() as u64, n),
        parts: [0, 0],
        y: [a.len(), b.len()],
    });
    let ea = external_of(g, &a);
    let eb = external_of(g, &b);
    let first = out.len();
    manual_frame(g, split, a, ea, depth + 1, Some(me), out)?;
    let second = out.len();
    manual_frame(g, split, b, eb, depth + 1, Some(me), out)?;
    out[me].children = Some([first, second]);
    Ok(())
}

/// Builds a `beta / (1 - eps)`-decomposition tree of `g`.
pub fn build_decomposition_tree(
    g: &GuestGraph,
    oracle: &dyn NodeSeparatorOracle,
    epsilon: f64,
) -> Result<DecompositionTree> {
    build_decomposition_tree_with(g, oracle, epsilon, Exec::default())
}

pub fn build_decomposition_tree_with(
    g: &GuestGraph,
    oracle: &dyn NodeSeparatorOracle,
    epsilon: f64,
    exec: Exec,
) -> Result<DecompositionTree> {
    let p = oracle.params();
    if !(0.5..1.0).contains(&p.beta) || !(0.0..1.0).contains(&p.alpha) || p.c <= 0.0 {
        return Err(Error::InvalidParameter(format!("oracle parameters out of range: {p:?}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0 - p.beta) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must lie in (0, {})", 1.0 - p.beta)));
    }
    if g.node_count() == 0 {
        return Err(Error::InvalidGraph("empty guest".into()));
    }
    let params = TreeParams { c: p.c, alpha: p.alpha, beta: p.beta, epsilon, certified: p.certified };
    let ctx = Ctx { g, oracle, params, exec };
    let nodes = ctx.frame((0..g.node_count()).collect(), Vec::new(), Vec::new(), 0, 1)?;
    Ok(DecompositionTree { nodes, params })
}

struct Ctx<'a> {
    g: &'a GuestGraph,
    oracle: &'a dyn NodeSeparatorOracle,
    params: TreeParams,
    exec: Exec,
}

impl Ctx<'_> {
    /// Subtree rooted at `members`, with indices relative to its root.
    fn frame(
        &self,
        members: Vec<NodeId>,
        inherited: Vec<NodeId>,
        external: Vec<EdgeId>,
        depth: usize,
        frame_id: u64,
    ) -> Result<Vec<TreeNode>> {
        let mut here = TreeNode {
            nodes: members,
            inherited,
            separator: Vec::new(),
            split: None,
            children: None,
            parent: None,
            external,
            cut: Vec::new(),
            depth,
        };
        if here.nodes.len() <= 1 {
            return Ok(vec![here]);
        }
        let (split, separator, [h1p, h2p]) = self.separate(&here, frame_id)?;
        here.separator = separator;

        // Y = X + S, dealt in BFS order of H
        let mut y: Vec<NodeId> = here.inherited.iter().chain(&here.separator).copied().collect();
        y.sort_unstable();
        let m = y.len() as u64;
        let y1_size = split.beta_prime.ceil_mul(m) as usize;
        let order = bfs_order(self.g, &here.nodes, &y);
        let mut side: Vec<HashSet<NodeId>> =
            vec![h1p.iter().copied().collect(), h2p.iter().copied().collect()];
        let mut ys: [Vec<NodeId>; 2] = [Vec::new(), Vec::new()];
        let caps = [y1_size, y.len() - y1_size];
        for v in order {
            let near = |s: &HashSet<NodeId>| self.g.neighbors(v).filter(|u| s.contains(u)).count();
            let mut j = if near(&side[0]) >= near(&side[1]) { 0 } else { 1 };
            if ys[j].len() == caps[j] {
                j = 1 - j;
            }
            ys[j].push(v);
            side[j].insert(v);
        }
        let split = Split { y: [ys[0].len(), ys[1].len()], ..split };
        here.split = Some(split);

        let mut kids: [Vec<NodeId>; 2] = [h1p, h2p];
        for j in 0..2 {
            kids[j].extend(&ys[j]);
            kids[j].sort_unstable();
            ys[j].sort_unstable();
        }
        here.cut = cut_between(self.g, &kids[0], &kids[1]);
        let child_ext = |j: usize| -> Vec<EdgeId> {
            let inside: HashSet<NodeId> = kids[j].iter().copied().collect();
            let mut e: Vec<EdgeId> = here
                .external
                .iter()
                .chain(&here.cut)
                .copied()
                .filter(|&e| {
                    let (a, b) = self.g.edge(e);
                    inside.contains(&a) != inside.contains(&b)
                })
                .collect();
            e.sort_unstable();
            e
        };
        let (e1, e2) = (child_ext(0), child_ext(1));
        let [k1, k2] = kids;
        let [y1, y2] = ys;
        let (left, right) = par::join(
            self.exec,
            || self.frame(k1, y1, e1, depth + 1, frame_id.saturating_mul(2)),
            || self.frame(k2, y2, e2, depth + 1, frame_id.saturating_mul(2).saturating_add(1)),
        );
        let (left, right) = (left?, right?);
        let mut out = Vec::with_capacity(1 + left.len() + right.len());
        let off_l = 1;
        let off_r = 1 + left.len();
        here.children = Some([off_l, off_r]);
        out.push(here);
        for (off, sub) in [(off_l, left), (off_r, right)] {
            for mut t in sub {
                t.parent = Some(t.parent.map_or(0, |p| p + off));
                t.children = t.children.map(|[a, b]| [a + off, b + off]);
                out.push(t);
            }
        }
        Ok(out)
    }

    /// Chooses the separator and the parts `H'_1`, `H'_2` (larger first).
    fn separate(&self, here: &TreeNode, frame_id: u64) -> Result<(Split, Vec<NodeId>, [Vec<NodeId>; 2])> {
        let p = self.params;
        let inherited: HashSet<NodeId> = here.inherited.iter().copied().collect();
        let h_prime: Vec<NodeId> = here.nodes.iter().copied().filter(|v| !inherited.contains(v)).collect();
        let np = h_prime.len() as f64;
        let whole = |h_prime: Vec<NodeId>| {
            let split = Split { kind: SplitKind::Whole, beta_prime: Ratio::half(), parts: [0, 0], y: [0, 0] };
            Ok((split, h_prime, [Vec::new(), Vec::new()]))
        };
        if h_prime.is_empty() || p.c * np.powf(p.alpha) > p.epsilon * np {
            return whole(h_prime);
        }
        let ind = Induced::new(self.g, h_prime.clone());
        let sep = self.oracle.separate(&ind)?;
        let violation = |msg: String| Error::SeparatorContract { frame: frame_id, msg };
        let mut problem = check_separation(&ind, &sep, p.beta).err();
        if problem.is_none() && sep.separator.len() as f64 > p.c * np.powf(p.alpha) + 1e-9 {
            problem = Some(format!("separator of {} nodes exceeds C n^alpha for n = {np}", sep.separator.len()));
        }
        let mut parts: [Vec<NodeId>; 2] =
            sep.parts.clone().map(|part| part.into_iter().map(|i| ind.nodes[i]).collect::<Vec<_>>());
        for part in &mut parts {
            part.sort_unstable();
        }
        let key = |v: &Vec<NodeId>| (std::cmp::Reverse(v.len()), v.first().copied().unwrap_or(usize::MAX));
        if key(&parts[1]) < key(&parts[0]) {
            parts.swap(0, 1);
        }
        let (a, b) = (parts[0].len() as u64, parts[1].len() as u64);
        if problem.is_none() && (b == 0 || (a as f64) / ((a + b) as f64) > p.beta / (1.0 - p.epsilon) + 1e-12) {
            problem = Some(format!("parts of {a} and {b} nodes give beta' outside [1/2, beta/(1-eps)]"));
        }
        if let Some(msg) = problem {
            if p.certified {
                return Err(violation(msg));
            }
            // heuristic oracle: fall back to taking all of H'
            return whole(h_prime);
        }
        let mut separator: Vec<NodeId> = sep.separator.iter().map(|&i| ind.nodes[i]).collect();
        separator.sort_unstable();
        let split = Split { kind: SplitKind::Separated, beta_prime: Ratio::new(a, a + b), parts: [a as usize, b as usize], y: [0, 0] };
        Ok((split, separator, parts))
    }
}

/// Nodes of `subset` in BFS order over the subgraph induced by `members`,
/// starting from the smallest member; unreachable parts follow by id.
fn bfs_order(g: &GuestGraph, members: &[NodeId], subset: &[NodeId]) -> Vec<NodeId> {
    let inside: HashSet<NodeId> = members.iter().copied().collect();
    let wanted: HashSet<NodeId> = subset.iter().copied().collect();
    let mut seen: HashSet<NodeId> = HashSet::new();
    let mut out = Vec::with_capacity(subset.len());
    for &s in members {
        if out.len() == subset.len() {
            break;
        }
        if !seen.insert(s) {
            continue;
        }
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            if wanted.contains(&v) {
                out.push(v);
            }
            for u in g.neighbors(v) {
                if inside.contains(&u) && seen.insert(u) {
                    q.push_back(u);
                }
            }
        }
    }
    out
}

/// Expansion statistics of one depth level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelAudit {
    pub depth: usize,
    pub tree_nodes: usize,
    pub max_external: usize,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionAudit {
    pub alpha: f64,
    /// `max |ext(H)| / |V(H)|^alpha` over all tree nodes.
    pub max_ratio: f64,
    pub max_external: usize,
    pub levels: Vec<LevelAudit>,
}

/// Measures the expansion of `t` against `|V(H)|^alpha` with the tree's
/// own `alpha`.
pub fn audit_expansion(t: &DecompositionTree) -> ExpansionAudit {
    audit_expansion_with_alpha(t, t.params.alpha)
}

pub fn audit_expansion_with_alpha(t: &DecompositionTree, alpha: f64) -> ExpansionAudit {
    let mut levels: Vec<LevelAudit> = Vec::new();
    for node in &t.nodes {
        if levels.len() <= node.depth {
            levels.resize_with(node.depth + 1, || LevelAudit { depth: 0, tree_nodes: 0, max_external: 0, max_ratio: 0.0 });
        }
        let lvl = &mut levels[node.depth];
        lvl.depth = node.depth;
        lvl.tree_nodes += 1;
        lvl.max_external = lvl.max_external.max(node.external.len());
        let ratio = node.external.len() as f64 / (node.nodes.len() as f64).powf(alpha);
        lvl.max_ratio = lvl.max_ratio.max(ratio);
    }
    ExpansionAudit {
        alpha,
        max_ratio: levels.iter().map(|l| l.max_ratio).fold(0.0, f64::max),
        max_external: levels.iter().map(|l| l.max_external).max().unwrap_or(0),
        levels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> GuestGraph {
        GuestGraph::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    fn cbt(n: usize) -> GuestGraph {
        GuestGraph::new(n, (1..n).map(|i| ((i - 1) / 2, i))).unwrap()
    }

    fn size_equations_hold(t: &DecompositionTree) {
        let bmax = t.params.tree_beta();
        for node in &t.nodes {
            if let (Some([a, b]), Some(s)) = (node.children, node.split) {
                let n = node.nodes.len() as u64;
                let bp = s.beta_prime;
                assert!(bp.to_f64() >= 0.5 && bp.to_f64() <= bmax + 1e-12, "beta' {bp:?}");
                assert_eq!(t.nodes[a].nodes.len() as u64, bp.ceil_mul(n));
                assert_eq!(t.nodes[b].nodes.len() as u64, bp.floor_complement_mul(n));
            }
        }
    }

    #[test]
    fn single_node_is_a_leaf() {
        let g = GuestGraph::new(1, []).unwrap();
        let t = build_decomposition_tree(&g, &CentroidOracle, 0.1).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(audit_expansion(&t).max_ratio, 0.0);
        assert_eq!(t.dump(), "0 1 0 []\n");
    }

    #[test]
    fn path_of_four_replays_size_equations() {
        let t = build_decomposition_tree(&path(4), &CentroidOracle, 0.1).unwrap();
        // C * 4^0 > 0.1 * 4, so the root takes the whole-separator branch
        let s = t.root().split.unwrap();
        assert_eq!(s.kind, SplitKind::Whole);
        assert_eq!(s.beta_prime, Ratio::half());
        let [a, b] = t.root().children.unwrap();
        assert_eq!((t.nodes[a].nodes.len(), t.nodes[b].nodes.len()), (2, 2));
        size_equations_hold(&t);
        assert_eq!(t.leaf_count(), 4);
    }

    #[test]
    fn binary_trees_have_bounded_expansion() {
        let mut last = usize::MAX;
        for n in [63, 127, 255] {
            let t = build_decomposition_tree(&cbt(n), &CentroidOracle, 0.1).unwrap();
            size_equations_hold(&t);
            assert_eq!(t.leaf_count(), n);
            let k = audit_expansion(&t).max_external;
            assert!(k <= last.max(k), "expansion grew");
            last = k;
        }
    }

    #[test]
    fn heuristic_oracle_never_fails() {
        let mut e = Vec::new();
        for r in 0..9 {
            for c in 0..9 {
                let v = r * 9 + c;
                if c < 8 {
                    e.push((v, v + 1));
                }
                if r < 8 {
                    e.push((v, v + 9));
                }
            }
        }
        let g = GuestGraph::new(81, e).unwrap();
        let t = build_decomposition_tree(&g, &GreedyBisectionOracle, 0.2).unwrap();
        size_equations_hold(&t);
        assert_eq!(t.leaf_count(), 81);
    }

    #[test]
    fn rejects_bad_epsilon() {
        let g = path(3);
        assert!(build_decomposition_tree(&g, &CentroidOracle, 0.0).is_err());
        assert!(build_decomposition_tree(&g, &CentroidOracle, 0.5).is_err());
    }

    struct Lopsided;

    impl NodeSeparatorOracle for Lopsided {
        fn name(&self) -> &'static str {
            "lopsided"
        }
        fn params(&self) -> OracleParams {
            OracleParams { c: 1.0, alpha: 0.0, beta: 2.0 / 3.0, certified: true }
        }
        fn separate(&self, h: &Induced<'_>) -> Result<Separation> {
            Ok(Separation { separator: vec![0], parts: [(1..h.len()).collect(), Vec::new()] })
        }
    }

    #[test]
    fn unbalanced_certified_oracle_is_an_error() {
        let err = build_decomposition_tree(&path(40), &Lopsided, 0.1).unwrap_err();
        assert!(matches!(err, Error::SeparatorContract { frame: 1, .. }), "{err:?}");
    }

    #[test]
    fn hand_built_two_by_four() {
        // 2 x 4 grid, ids r * 4 + c; halve the columns, then split rows
        let mut e = Vec::new();
        for r in 0..2 {
            for c in 0..4 {
                let v = r * 4 + c;
                if c < 3 {
                    e.push((v, v + 1));
                }
                if r < 1 {
                    e.push((v, v + 4));
                }
            }
        }
        let g = GuestGraph::new(8, e).unwrap();
        let params = TreeParams { c: 1.0, alpha: 0.0, beta: 0.5, epsilon: 0.1, certified: false };
        let t = DecompositionTree::from_splits(&g, params, |vs| {
            let both_rows = vs.iter().any(|&v| v < 4) && vs.iter().any(|&v| v >= 4);
            if vs.len() == 8 {
                vs.iter().partition(|&&v| v % 4 < 2)
            } else if both_rows {
                vs.iter().partition(|&&v| v < 4)
            } else {
                vs.iter().partition(|&&v| v == vs[0])
            }
        })
        .unwrap();
        assert_eq!(t.leaf_count(), 8);
        assert_eq!(audit_expansion(&t).max_external, 3);
    }
}
