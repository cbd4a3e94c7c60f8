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


//! Node placement for frames that are embedded directly.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::decompose::DecompositionTree;
use crate::graph::NodeId;
use crate::grid::GridNode;

/// Per-fiber outcome of [`spread_node_map`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpreadAudit {
    /// Number of fibers of `U` along the chosen axis.
    pub fibers: usize,
    /// Largest sum of external multiplicities landing in one fiber.
    pub max_load: usize,
    /// `e |X| / fibers + delta`.
    pub bound: f64,
}

/// Places the tree node `t` on `slots` by recursive bisection: the slots
/// are cut across the longest extent of their bounding box in the size
/// ratio of `t`'s children, so each subtree lands on a compact block.
pub fn bisection_layout(tree: &DecompositionTree, t: usize, slots: Vec<GridNode>) -> Vec<(NodeId, GridNode)> {
    let mut out = Vec::with_capacity(slots.len());
    lay(tree, t, slots, &mut out);
    out
}

fn lay(tree: &DecompositionTree, t: usize, mut slots: Vec<GridNode>, out: &mut Vec<(NodeId, GridNode)>) {
    let node = tree.node(t);
    debug_assert_eq!(node.nodes.len(), slots.len());
    let Some([a, b]) = node.children else {
        out.extend(node.nodes.iter().copied().zip(slots));
        return;
    };
    let d = slots.first().map_or(0, GridNode::dim);
    let axis = (0..d)
        .max_by_key(|&i| {
            let (lo, hi) = slots.iter().fold((u32::MAX, 0), |(lo, hi), v| (lo.min(v.get(i)), hi.max(v.get(i))));
            (hi - lo, std::cmp::Reverse(i))
        })
        .unwrap_or(0);
    slots.sort_by(|x, y| x.get(axis).cmp(&y.get(axis)).then_with(|| x.cmp(y)));
    let rest = slots.split_off(tree.node(a).nodes.len());
    lay(tree, a, slots, out);
    lay(tree, b, rest, out);
}

/// Moves nodes carrying external edges so that they are spread over the
/// fibers along `axis`, starting from the placement `home` (`nodes[i]` on
/// `home[i]`).
///
/// `multiplicity[i]` is the number of external slots on `nodes[i]`. Those
/// nodes are taken by decreasing multiplicity; each goes to the least
/// loaded fiber with an unclaimed slot, at the unclaimed slot nearest its
/// current position, and swaps places with whoever sat there. Everything
/// else keeps its home position unless swapped.
pub fn spread_node_map(
    nodes: &[NodeId],
    multiplicity: &[usize],
    home: &[GridNode],
    axis: usize,
    max_degree: usize,
) -> (Vec<(NodeId, GridNode)>, SpreadAudit) {
    assert_eq!(nodes.len(), home.len(), "one slot per node");
    let mut fiber_of: BTreeMap<GridNode, usize> = BTreeMap::new();
    for v in home {
        let n = fiber_of.len();
        fiber_of.entry(v.drop_axes(&[axis])).or_insert(n);
    }
    // slots per fiber, with the index of the node currently on each slot
    let mut slots: Vec<Vec<usize>> = vec![Vec::new(); fiber_of.len()];
    for (i, v) in home.iter().enumerate() {
        slots[fiber_of[&v.drop_axes(&[axis])]].push(i);
    }
    let mut pos: Vec<GridNode> = home.to_vec();
    let mut at: HashMap<GridNode, usize> = home.iter().cloned().zip(0..).collect();
    let mut claimed: HashSet<GridNode> = HashSet::new();
    let mut load = vec![0usize; slots.len()];
    let mut free = slots.iter().map(Vec::len).collect::<Vec<_>>();
    let total: usize = multiplicity.iter().sum();

    let mut heavy: Vec<usize> = (0..nodes.len()).filter(|&i| multiplicity[i] > 0).collect();
    heavy.sort_by_key(|&i| (std::cmp::Reverse(multiplicity[i]), nodes[i]));
    for i in heavy {
        let least = (0..slots.len()).filter(|&f| free[f] > 0).map(|f| load[f]).min().expect("a free slot exists");
        let (f, target) = (0..slots.len())
            .filter(|&f| free[f] > 0 && load[f] == least)
            .flat_map(|f| slots[f].iter().map(move |&j| (f, home[j].clone())))
            .filter(|(_, v)| !claimed.contains(v))
            .min_by_key(|(_, v)| (v.l1_distance(&pos[i]), v.clone()))
            .expect("fiber with room has an unclaimed slot");
        let other = at[&target];
        let mine = pos[i].clone();
        pos.swap(i, other);
        at.insert(mine, other);
        at.insert(target.clone(), i);
        claimed.insert(target);
        free[f] -= 1;
        load[f] += multiplicity[i];
    }
    let audit = SpreadAudit {
        fibers: slots.len(),
        max_load: load.iter().copied().max().unwrap_or(0),
        bound: std::f64::consts::E * total as f64 / slots.len().max(1) as f64 + max_degree as f64,
    };
    (nodes.iter().copied().zip(pos).collect(), audit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{build_decomposition_tree, CentroidOracle};
    use crate::graph::GuestGraph;
    use crate::grid::{GridSpec, SubGrid};

    fn grid_nodes(s: &str) -> Vec<GridNode> {
        SubGrid::whole(&s.parse::<GridSpec>().unwrap()).nodes().collect()
    }

    fn fiber_sums(map: &[(NodeId, GridNode)], mult: &BTreeMap<NodeId, usize>, axis: usize) -> usize {
        let mut sums: BTreeMap<GridNode, usize> = BTreeMap::new();
        for (s, v) in map {
            *sums.entry(v.drop_axes(&[axis])).or_default() += mult.get(s).copied().unwrap_or(0);
        }
        sums.into_values().max().unwrap_or(0)
    }

    #[test]
    fn four_externals_on_one_node() {
        let u = grid_nodes("3x3");
        let nodes: Vec<NodeId> = (0..9).collect();
        let mut mult = vec![0; 9];
        mult[4] = 4;
        let (map, audit) = spread_node_map(&nodes, &mult, &u, 0, 4);
        assert_eq!(map[4].1, u[4], "a lone heavy node stays home");
        let by_node: BTreeMap<NodeId, usize> = nodes.iter().copied().zip(mult.iter().copied()).collect();
        assert_eq!(fiber_sums(&map, &by_node, 0), 4);
        assert_eq!(audit.max_load, 4);
        assert!(audit.max_load as f64 <= audit.bound);
        let images: HashSet<&GridNode> = map.iter().map(|(_, v)| v).collect();
        assert_eq!(images.len(), 9);
    }

    #[test]
    fn every_node_heavy() {
        let u = grid_nodes("4x5");
        let nodes: Vec<NodeId> = (0..20).collect();
        let mult = vec![3; 20];
        let (map, audit) = spread_node_map(&nodes, &mult, &u, 1, 3);
        let by_node: BTreeMap<NodeId, usize> = nodes.iter().map(|&s| (s, 3)).collect();
        assert_eq!(fiber_sums(&map, &by_node, 1), audit.max_load);
        assert_eq!(audit.max_load, 15);
        assert!(audit.max_load as f64 <= audit.bound);
    }

    #[test]
    fn layout_is_a_bijection_and_keeps_subtrees_together() {
        let g = GuestGraph::new(63, (1..63).map(|i| ((i - 1) / 2, i))).unwrap();
        let t = build_decomposition_tree(&g, &CentroidOracle, 0.1).unwrap();
        let slots = grid_nodes("8x8")[..63].to_vec();
        let map = bisection_layout(&t, 0, slots.clone());
        let images: HashSet<&GridNode> = map.iter().map(|(_, v)| v).collect();
        assert_eq!(images.len(), 63);
        assert!(images.iter().all(|v| slots.contains(v)));
        let mut seen: Vec<NodeId> = map.iter().map(|p| p.0).collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..63).collect::<Vec<_>>());
    }
}
