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


//! Seeded guest families.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::GuestGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Complete binary tree of the given depth (`2^(depth+1) - 1` nodes).
    CompleteBinaryTree { depth: u32 },
    /// `rows x cols` grid, nodes numbered row-major.
    Grid2d { rows: usize, cols: usize },
    /// Random graph on `n` nodes with maximum degree at most `max_degree`.
    RandomBoundedDegree { n: usize, max_degree: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::CompleteBinaryTree { .. } => "cbt",
            Family::Grid2d { .. } => "grid2d",
            Family::RandomBoundedDegree { .. } => "random",
        }
    }

    /// The member of family `name` with `n` nodes. Trees need `n + 1` to be
    /// a power of two and grid guests a square `n`.
    pub fn with_size(name: &str, n: usize, max_degree: usize) -> Result<Family> {
        match name {
            "cbt" => {
                if n == 0 || !(n + 1).is_power_of_two() {
                    return Err(Error::InvalidParameter(format!("a complete binary tree cannot have {n} nodes")));
                }
                Ok(Family::CompleteBinaryTree { depth: (n + 1).trailing_zeros() - 1 })
            }
            "grid2d" => {
                let side = (n as f64).sqrt().round() as usize;
                if side * side != n || n == 0 {
                    return Err(Error::InvalidParameter(format!("a square grid guest cannot have {n} nodes")));
                }
                Ok(Family::Grid2d { rows: side, cols: side })
            }
            "random" => Ok(Family::RandomBoundedDegree { n, max_degree }),
            other => Err(Error::InvalidParameter(format!("unknown family {other:?}; use cbt, grid2d or random"))),
        }
    }
}

/// Generates a guest; a pure function of `(kind, seed)`. The seed only
/// matters for the random family.
pub fn gen_family(kind: Family, seed: u64) -> Result<GuestGraph> {
    match kind {
        Family::CompleteBinaryTree { depth } => {
            if depth > 24 {
                return Err(Error::InvalidParameter(format!("tree depth {depth} is too large")));
            }
            let n = (1usize << (depth + 1)) - 1;
            GuestGraph::new(n, (1..n).map(|i| ((i - 1) / 2, i)))
        }
        Family::Grid2d { rows, cols } => {
            if rows == 0 || cols == 0 {
                return Err(Error::InvalidParameter("grid guest needs positive sides".into()));
            }
            let id = |r: usize, c: usize| r * cols + c;
            let mut edges = Vec::with_capacity(2 * rows * cols);
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        edges.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            GuestGraph::new(rows * cols, edges)
        }
        Family::RandomBoundedDegree { n, max_degree } => random_bounded(n, max_degree, seed),
    }
}

/// A random spanning tree (so the guest is connected) followed by random
/// extra edges, all subject to the degree cap.
fn random_bounded(n: usize, max_degree: usize, seed: u64) -> Result<GuestGraph> {
    if n == 0 || (n > 1 && max_degree < 2) {
        return Err(Error::InvalidParameter(format!("cannot build a connected graph on {n} nodes with degree {max_degree}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut deg = vec![0usize; n];
    let mut edges = std::collections::BTreeSet::new();
    for i in 1..n {
        // attach to an earlier node with spare degree; the newest node has
        // degree 1 and always qualifies
        let open: Vec<usize> = (0..i).filter(|&j| deg[order[j]] + 1 < max_degree || j == i - 1).collect();
        let (a, b) = (order[open[rng.gen_range(0..open.len())]], order[i]);
        edges.insert((a.min(b), a.max(b)));
        deg[a] += 1;
        deg[b] += 1;
    }
    for _ in 0..n * max_degree {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b && deg[a] < max_degree && deg[b] < max_degree && edges.insert((a.min(b), a.max(b))) {
            deg[a] += 1;
            deg[b] += 1;
        }
    }
    let g = GuestGraph::new(n, edges)?;
    debug_assert!(g.max_degree() <= max_degree);
    Ok(g)
}
