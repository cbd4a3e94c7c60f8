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


//! Proper edge colouring of bipartite multigraphs with the minimum number of
//! colours (Koenig's theorem), by alternating-path recolouring.

const FREE: usize = usize::MAX;

/// Colours `edges` (pairs of left and right vertex indices) so that no two
/// edges sharing an endpoint get the same colour, using exactly the maximum
/// degree many colours `0..max_degree`.
pub fn bipartite_edge_color(left: usize, right: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let k = max_degree(left, right, edges);
    color_with(left, right, edges, k, |_| Vec::new())
}

/// Maximum vertex degree of the bipartite multigraph.
pub fn max_degree(left: usize, right: usize, edges: &[(usize, usize)]) -> usize {
    let mut dl = vec![0usize; left];
    let mut dr = vec![0usize; right];
    for &(u, v) in edges {
        dl[u] += 1;
        dr[v] += 1;
    }
    dl.into_iter().chain(dr).max().unwrap_or(0)
}

/// Colours with `k >= max_degree` colours. `preferred(e)` lists colours to
/// try first for edge `e`; the first one free at both endpoints is taken.
/// Preferences only steer the choice, propriety is always kept.
pub fn color_with<P>(left: usize, right: usize, edges: &[(usize, usize)], k: usize, preferred: P) -> Vec<usize>
where
    P: Fn(usize) -> Vec<usize>,
{
    assert!(k >= max_degree(left, right, edges), "not enough colours");
    let mut color = vec![FREE; edges.len()];
    if k == 0 {
        return color;
    }
    // at_l[u * k + c] = edge with colour c at left vertex u
    let mut at_l = vec![FREE; left * k];
    let mut at_r = vec![FREE; right * k];

    for (e, &(u, v)) in edges.iter().enumerate() {
        let free_l = |c: usize, at_l: &[usize]| at_l[u * k + c] == FREE;
        let free_r = |c: usize, at_r: &[usize]| at_r[v * k + c] == FREE;
        let pref: Vec<usize> = preferred(e).into_iter().filter(|&c| c < k).collect();
        let mut chosen = pref.iter().copied().find(|&c| free_l(c, &at_l) && free_r(c, &at_r));
        if chosen.is_none() {
            // fall back in preference order, then by index
            let mut ranked = pref.iter().copied().chain(0..k);
            let a = ranked.find(|&c| free_l(c, &at_l)).expect("left vertex saturated");
            if free_r(a, &at_r) {
                chosen = Some(a);
            } else {
                let b = pref.iter().copied().chain(0..k).find(|&c| free_r(c, &at_r)).expect("right vertex saturated");
                flip_path(v, a, b, k, edges, &mut color, &mut at_l, &mut at_r);
                chosen = Some(a);
            }
        }
        let c = chosen.unwrap();
        color[e] = c;
        at_l[u * k + c] = e;
        at_r[v * k + c] = e;
    }
    color
}

/// Swaps colours `a` and `b` along the maximal alternating path that starts
/// at right vertex `v` with its `a`-edge. Afterwards `a` is free at `v`.
#[allow(clippy::too_many_arguments)]
fn flip_path(
    v: usize,
    a: usize,
    b: usize,
    k: usize,
    edges: &[(usize, usize)],
    color: &mut [usize],
    at_l: &mut [usize],
    at_r: &mut [usize],
) {
    let mut path = Vec::new();
    let mut on_right = true;
    let mut node = v;
    let mut want = a;
    loop {
        let e = if on_right { at_r[node * k + want] } else { at_l[node * k + want] };
        if e == FREE {
            break;
        }
        path.push(e);
        let (l, r) = edges[e];
        node = if on_right { l } else { r };
        on_right = !on_right;
        want = if want == a { b } else { a };
    }
    for &e in &path {
        let (l, r) = edges[e];
        at_l[l * k + color[e]] = FREE;
        at_r[r * k + color[e]] = FREE;
    }
    for &e in &path {
        let (l, r) = edges[e];
        let c = if color[e] == a { b } else { a };
        color[e] = c;
        at_l[l * k + c] = e;
        at_r[r * k + c] = e;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn is_proper(edges: &[(usize, usize)], color: &[usize]) -> bool {
        let mut seen = HashSet::new();
        edges
            .iter()
            .zip(color)
            .all(|(&(u, v), &c)| seen.insert((0, u, c)) && seen.insert((1, v, c)))
    }

    #[test]
    fn perfect_matching_needs_one_colour() {
        let edges: Vec<_> = (0..5).map(|i| (i, (i + 2) % 5)).collect();
        let c = bipartite_edge_color(5, 5, &edges);
        assert!(c.iter().all(|&x| x == 0));
    }

    #[test]
    fn even_cycle_needs_two() {
        // C6 as a bipartite graph on 3 + 3 vertices
        let edges = [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 0)];
        let c = bipartite_edge_color(3, 3, &edges);
        assert!(is_proper(&edges, &c));
        assert_eq!(c.iter().copied().collect::<HashSet<_>>().len(), 2);
    }

    #[test]
    fn preferences_are_honoured_when_free() {
        let edges = [(0, 0), (1, 1), (2, 2)];
        let c = color_with(3, 3, &edges, 3, |e| vec![2 - e]);
        assert_eq!(c, vec![2, 1, 0]);
    }

    proptest! {
        #[test]
        fn colours_are_proper_and_minimal(
            raw in proptest::collection::vec((0usize..8, 0usize..8), 0..60),
        ) {
            let edges: Vec<_> = raw;
            let c = bipartite_edge_color(8, 8, &edges);
            let k = max_degree(8, 8, &edges);
            prop_assert!(is_proper(&edges, &c));
            prop_assert!(c.iter().all(|&x| x < k));
        }
    }
}
