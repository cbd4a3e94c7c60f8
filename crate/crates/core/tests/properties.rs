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


//! Randomised invariants across module boundaries, each checked against a
//! recount or oracle written here.

use std::collections::{BTreeMap, HashSet};

use proptest::prelude::*;

use gridembed::decompose::{build_decomposition_tree, CentroidOracle, GreedyBisectionOracle};
use gridembed::par::Exec;
use gridembed::routing::{embed_by_permutation, euler_orient, permutation_color_classes, route_permutation};
use gridembed::sbe::cube_host;
use gridembed::toolkit::{embed_guest, gen_family, Family, OracleKind};
use gridembed::verify::{inject_fault, verify_embedding, verify_tree};
use gridembed::{Embedding, GridNode, GridSpec, GuestGraph, RoutingGraph, SubGrid};

fn dims_strategy() -> impl Strategy<Value = Vec<u32>> {
    proptest::collection::vec(1u32..6, 1..4)
}

fn random_guest(n: usize, delta: usize, seed: u64) -> GuestGraph {
    gen_family(Family::RandomBoundedDegree { n, max_degree: delta }, seed).unwrap()
}

/// Usage count of every unit edge, keyed by sorted endpoint pair.
fn recount(emb: &Embedding) -> BTreeMap<(Vec<u32>, Vec<u32>), u32> {
    let mut load = BTreeMap::new();
    for img in &emb.rho {
        for e in img.edges() {
            let (a, b) = (e.lo.coords().to_vec(), e.hi().coords().to_vec());
            *load.entry((a.clone().min(b.clone()), a.max(b))).or_insert(0) += 1;
        }
    }
    load
}

/// Smallest possible congestion for routing `pairs` in a 2x2 grid, by
/// trying both simple paths for every request that has two.
fn best_2x2(pairs: &[(GridNode, GridNode)]) -> u32 {
    let ring = [[1u32, 1], [1, 2], [2, 2], [2, 1]];
    let pos = |v: &GridNode| ring.iter().position(|c| c[..] == *v.coords()).unwrap();
    let choices = 1usize << pairs.len();
    (0..choices)
        .map(|mask| {
            let mut load = [0u32; 4];
            for (i, (s, t)) in pairs.iter().enumerate() {
                let (a, b) = (pos(s), pos(t));
                if a == b {
                    continue;
                }
                // walk clockwise or counter-clockwise around the ring
                let cw = mask >> i & 1 == 1;
                let mut x = a;
                while x != b {
                    let y = if cw { (x + 1) % 4 } else { (x + 3) % 4 };
                    load[if cw { x } else { y }] += 1;
                    x = y;
                }
            }
            load.into_iter().max().unwrap()
        })
        .min()
        .unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn every_permutation_of_small_grids_routes_validly() {
    for dims in [vec![6], vec![1, 6], vec![6, 1], vec![2, 2], vec![2, 3], vec![3, 2], vec![1, 2, 3], vec![2, 1, 2]] {
        let spec = GridSpec::new(dims.clone()).unwrap();
        let m = SubGrid::whole(&spec);
        let nodes: Vec<GridNode> = spec.nodes().collect();
        for perm in permutations(nodes.len()) {
            let mut r = RoutingGraph::new();
            for (i, &j) in perm.iter().enumerate() {
                r.push(i as u64, nodes[i].clone(), nodes[j].clone());
            }
            let routing = route_permutation(&r, &m).unwrap();
            routing.validate(&r).unwrap_or_else(|e| panic!("{dims:?} {perm:?}: {e}"));
            for q in r.requests() {
                assert!(routing.images[&q.id].len() as u64 >= q.source.l1_distance(&q.target));
            }
        }
    }
}

#[test]
fn two_by_two_routing_stays_within_twice_the_optimum() {
    let spec = GridSpec::new(vec![2, 2]).unwrap();
    let m = SubGrid::whole(&spec);
    let nodes: Vec<GridNode> = spec.nodes().collect();
    for perm in permutations(4) {
        let mut r = RoutingGraph::new();
        let pairs: Vec<_> = perm.iter().enumerate().map(|(i, &j)| (nodes[i].clone(), nodes[j].clone())).collect();
        for (i, (s, t)) in pairs.iter().enumerate() {
            r.push(i as u64, s.clone(), t.clone());
        }
        let c = route_permutation(&r, &m).unwrap().congestion();
        let best = best_2x2(&pairs);
        assert!(best <= c && c <= 2 * best.max(1), "{perm:?}: routed {c}, optimum {best}");
    }
}

#[test]
fn generators_are_deterministic() {
    for kind in [
        Family::CompleteBinaryTree { depth: 6 },
        Family::Grid2d { rows: 7, cols: 9 },
        Family::RandomBoundedDegree { n: 300, max_degree: 5 },
    ] {
        assert_eq!(gen_family(kind, 9).unwrap().to_text(), gen_family(kind, 9).unwrap().to_text());
    }
    assert_ne!(random_guest(300, 5, 1).to_text(), random_guest(300, 5, 2).to_text());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_a_bijection(dims in dims_strategy(), pick in 0usize..3) {
        let spec = GridSpec::new(dims.clone()).unwrap();
        let axis = pick % dims.len();
        let mut seen = HashSet::new();
        for v in spec.nodes() {
            let (x, rest) = v.project(axis).unwrap();
            prop_assert_eq!(rest.dim(), dims.len() - 1);
            let mut back = rest.coords().to_vec();
            back.insert(axis, x);
            prop_assert_eq!(&back[..], v.coords());
            prop_assert!(seen.insert((x, rest)));
        }
        prop_assert_eq!(seen.len() as u64, spec.node_count());
    }

    #[test]
    fn euler_orientation_balances_degrees(n in 2usize..80, delta in 2usize..8, seed in any::<u64>()) {
        let g = random_guest(n, delta, seed);
        let arcs = euler_orient(&g);
        prop_assert_eq!(arcs.len(), g.edge_count());
        let mut out = vec![0usize; n];
        let mut inn = vec![0usize; n];
        for (e, &(s, t)) in arcs.iter().enumerate() {
            let (u, v) = g.edge(e);
            prop_assert!((s, t) == (u, v) || (s, t) == (v, u));
            out[s] += 1;
            inn[t] += 1;
        }
        for v in 0..n {
            prop_assert!(out[v] <= g.degree(v).div_ceil(2) && inn[v] <= g.degree(v).div_ceil(2));
        }
    }

    #[test]
    fn permutation_classes_are_permutations_of_the_slices(
        dims in proptest::collection::vec(1u32..5, 2..4),
        seed in any::<u64>(),
    ) {
        use rand::{seq::SliceRandom, SeedableRng};
        let spec = GridSpec::new(dims.clone()).unwrap();
        let m = SubGrid::whole(&spec);
        let nodes: Vec<GridNode> = spec.nodes().collect();
        let mut targets = nodes.clone();
        targets.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let mut r = RoutingGraph::new();
        for (i, (s, t)) in nodes.iter().zip(&targets).enumerate() {
            r.push(i as u64, s.clone(), t.clone());
        }
        let classes = permutation_color_classes(&r, &m).unwrap();
        let mut srcs = HashSet::new();
        let mut dsts = HashSet::new();
        for (q, &c) in r.requests().iter().zip(&classes) {
            prop_assert!((1..=dims[0]).contains(&c));
            prop_assert!(srcs.insert((c, q.source.drop_axes(&[0]))));
            prop_assert!(dsts.insert((c, q.target.drop_axes(&[0]))));
        }
        // a full permutation fills every class completely
        prop_assert_eq!(srcs.len(), nodes.len());
    }

    #[test]
    fn congestion_and_dilation_match_a_recount(n in 2usize..64, delta in 2usize..7, seed in any::<u64>()) {
        let g = random_guest(n, delta, seed);
        let spec = GridSpec::new(vec![8, 8]).unwrap();
        let emb = embed_by_permutation(&g, &SubGrid::whole(&spec), None).unwrap();
        let load = recount(&emb);
        let report = verify_embedding(&g, &spec, &emb);
        prop_assert!(report.valid, "{:?}", report.problems);
        prop_assert_eq!(report.congestion, load.values().copied().max().unwrap_or(0));
        prop_assert_eq!(report.congestion, emb.measure().congestion);
        for (e, img) in emb.rho.iter().enumerate() {
            let (u, v) = g.edge(e);
            prop_assert!(img.len() as u64 >= emb.phi[u].l1_distance(&emb.phi[v]));
        }
        prop_assert_eq!(report.dilation, emb.rho.iter().map(|i| i.len()).max().unwrap_or(0));
    }

    #[test]
    fn greedy_trees_satisfy_the_structural_checks(n in 2usize..200, delta in 2usize..6, seed in any::<u64>()) {
        let g = random_guest(n, delta, seed);
        let t = build_decomposition_tree(&g, &GreedyBisectionOracle, 0.1).unwrap();
        let report = verify_tree(&g, &t);
        prop_assert!(report.valid, "{:?}", report.problems);
    }

    #[test]
    fn centroid_trees_satisfy_the_structural_checks(parents in proptest::collection::vec(any::<prop::sample::Index>(), 1..250)) {
        let edges: Vec<_> = parents.iter().enumerate().map(|(i, p)| (p.index(i + 1), i + 1)).collect();
        let g = GuestGraph::new(parents.len() + 1, edges).unwrap();
        let t = build_decomposition_tree(&g, &CentroidOracle, 0.1).unwrap();
        let report = verify_tree(&g, &t);
        prop_assert!(report.valid, "{:?}", report.problems);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn recursive_embedding_is_valid_and_audited(n in 2usize..400, delta in 2usize..6, d in 2usize..4, seed in any::<u64>()) {
        let g = random_guest(n, delta, seed);
        let host = cube_host(n, d).unwrap();
        let run = embed_guest(&g, &host, OracleKind::Greedy, 0.1, None, Exec::default()).unwrap();
        let audit = &run.output.audit;
        let report = verify_embedding(&g, &run.host, &run.output.embedding);
        prop_assert!(report.valid, "{:?}", report.problems);
        prop_assert_eq!(audit.violations(), 0);
        prop_assert_eq!(report.congestion, audit.congestion);
        prop_assert_eq!(report.dilation, audit.dilation);
        prop_assert_eq!(recount(&run.output.embedding).values().copied().max().unwrap_or(0), audit.congestion);
    }

    #[test]
    fn injected_faults_are_always_caught(n in 2usize..200, seed in any::<u64>()) {
        let g = random_guest(n, 4, seed);
        let spec = GridSpec::new(vec![16, 16]).unwrap();
        let mut emb = embed_by_permutation(&g, &SubGrid::whole(&spec), None).unwrap();
        if let Some(hit) = inject_fault(&mut emb, seed) {
            let report = verify_embedding(&g, &spec, &emb);
            prop_assert!(!report.valid);
            prop_assert!(report.bad_edges.contains(&hit));
        }
    }
}
