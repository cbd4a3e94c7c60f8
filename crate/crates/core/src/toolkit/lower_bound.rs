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


//! A grid with a snake of edges removed and one long edge added, whose
//! identity embedding routes the long edge along the snake.

use crate::error::{Error, Result};
use crate::graph::GuestGraph;
use crate::grid::{Embedding, GridNode, GridSpec, Image};

fn check(l: u32) -> Result<()> {
    if l < 9 || l % 4 != 1 {
        return Err(Error::InvalidParameter(format!("side {l} must be at least 9 and 1 mod 4")));
    }
    Ok(())
}

fn id(l: u32, i: u32, j: u32) -> usize {
    ((i - 1) * l + (j - 1)) as usize
}

/// A `(row, col)` position, 1-based.
pub type Cell = (u32, u32);

/// The removed grid edges as pairs of positions.
pub fn lower_bound_removed_edges(l: u32) -> Result<Vec<(Cell, Cell)>> {
    check(l)?;
    let mut out = Vec::new();
    for i in (3..=l - 2).filter(|i| i % 2 == 1) {
        out.extend((3..=l - 3).map(|j| ((i, j), (i, j + 1))));
    }
    out.extend((5..=l - 3).filter(|i| matches!(i % 4, 1 | 2)).map(|i| ((i, 3), (i + 1, 3))));
    out.extend((3..=l - 5).filter(|i| matches!(i % 4, 3 | 0)).map(|i| ((i, l - 2), (i + 1, l - 2))));
    Ok(out)
}

/// `Grid(l, l)` without the removed edges, plus the edge joining `(3, 3)`
/// and `(l-2, l-2)`, which gets the last edge id. Node `(i, j)` has id
/// `(i-1) l + (j-1)`.
pub fn gen_lower_bound_graph(l: u32) -> Result<GuestGraph> {
    let removed: std::collections::HashSet<_> = lower_bound_removed_edges(l)?.into_iter().collect();
    let mut edges = Vec::new();
    for i in 1..=l {
        for j in 1..=l {
            if j < l && !removed.contains(&((i, j), (i, j + 1))) {
                edges.push((id(l, i, j), id(l, i, j + 1)));
            }
            if i < l && !removed.contains(&((i, j), (i + 1, j))) {
                edges.push((id(l, i, j), id(l, i + 1, j)));
            }
        }
    }
    edges.push((id(l, 3, 3), id(l, l - 2, l - 2)));
    GuestGraph::new((l * l) as usize, edges)
}

/// The snake from `(3, 3)` to `(l-2, l-2)`: odd rows are crossed
/// alternately rightwards and leftwards, joined by two-step drops at
/// columns `l-2` and `3`.
pub fn snake_path(l: u32) -> Result<Vec<(u32, u32)>> {
    check(l)?;
    let mut path = vec![(3, 3)];
    let mut row = 3;
    loop {
        let rightwards = row % 4 == 3;
        let cols: Vec<u32> = if rightwards { (4..=l - 2).collect() } else { (3..l - 2).rev().collect() };
        path.extend(cols.into_iter().map(|c| (row, c)));
        if row == l - 2 {
            return Ok(path);
        }
        let col = if rightwards { l - 2 } else { 3 };
        path.extend([(row + 1, col), (row + 2, col)]);
        row += 2;
    }
}

/// Identity node map, every kept grid edge routed on itself and the added
/// edge routed on the snake.
pub fn canonical_lower_bound_embedding(l: u32) -> Result<Embedding> {
    let g = gen_lower_bound_graph(l)?;
    let node = |v: usize| GridNode::from_slice(&[v as u32 / l + 1, v as u32 % l + 1]);
    let phi: Vec<GridNode> = (0..g.node_count()).map(node).collect();
    let last = g.edge_count() - 1;
    let rho = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| {
            if e == last {
                let walk: Vec<GridNode> = snake_path(l)?.into_iter().map(|(i, j)| GridNode::from_slice(&[i, j])).collect();
                Ok(Image::from_walk(&walk))
            } else {
                Ok(Image::from_walk(&[node(a), node(b)]))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Embedding::new(GridSpec::new(vec![l, l])?, phi, g.edges().to_vec(), rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        for l in [9u32, 13, 17, 21] {
            let removed = lower_bound_removed_edges(l).unwrap().len() as u32;
            assert_eq!(removed, (l - 3) * (l - 5) / 2 + (l - 5));
            let g = gen_lower_bound_graph(l).unwrap();
            assert_eq!(g.edge_count() as u32, 2 * l * (l - 1) - removed + 1);
            assert_eq!(g.node_count() as u32, l * l);
        }
        assert_eq!(gen_lower_bound_graph(13).unwrap().edge_count(), 265);
    }

    #[test]
    fn snake_uses_exactly_the_removed_edges() {
        for l in [9u32, 13, 17] {
            let snake = snake_path(l).unwrap();
            assert_eq!(snake.len() as u32 - 1, (l - 5) * (l - 1) / 2);
            let mut steps: Vec<_> = snake.windows(2).map(|p| (p[0].min(p[1]), p[0].max(p[1]))).collect();
            steps.sort();
            let mut removed = lower_bound_removed_edges(l).unwrap();
            removed.sort();
            assert_eq!(steps, removed);
        }
    }

    #[test]
    fn canonical_embedding_measures() {
        for (l, dil) in [(9, 16), (13, 48)] {
            let m = canonical_lower_bound_embedding(l).unwrap().measure_checked().unwrap();
            assert_eq!((m.congestion, m.dilation), (1, dil));
        }
    }

    #[test]
    fn invalid_sides() {
        for l in [5, 8, 11, 15] {
            assert!(gen_lower_bound_graph(l).is_err());
        }
    }
}
