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


//! Channel point sets and uniform mappings onto them.
//!
//! The channel of level `w >= 1` in a subgrid `M` uses the interior nodes
//! of `M` whose first two coordinates are `2^(w-1) mod 2^w`; level 0 uses
//! every interior node. The point set is a product of per-axis coordinate
//! lists, so it is stored as a [`Lattice`] and routed on directly.

use crate::error::{Error, Result};
use crate::grid::{GridEdge, GridNode, SubGrid};
use crate::routing::Lattice;

fn on_level(x: u32, w: u32) -> bool {
    w == 0 || x % (1u32 << w) == 1u32 << (w - 1)
}

/// The point set of a channel (or of a combined channel).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelPoints {
    coords: Vec<Vec<u32>>,
    /// Levels admitted along the first two axes.
    levels: Vec<u32>,
}

impl ChannelPoints {
    /// Points of level `w` in `m`.
    pub fn new(m: &SubGrid, w: u32) -> Self {
        Self::with_levels(m, &[w])
    }

    /// Combined point set for a child channel at level `wj` and the
    /// parent's level `w`: along the first two axes a coordinate qualifies
    /// when it is on either level, so both single-level point sets are
    /// contained in it.
    pub fn combined(m: &SubGrid, wj: u32, w: u32) -> Self {
        Self::with_levels(m, &[wj, w])
    }

    fn with_levels(m: &SubGrid, levels: &[u32]) -> Self {
        let coords = (0..m.dim())
            .map(|i| {
                (m.lo(i) + 1..m.hi(i))
                    .filter(|&x| i >= 2 || levels.iter().any(|&w| on_level(x, w)))
                    .collect()
            })
            .collect();
        let mut levels = levels.to_vec();
        levels.sort_unstable();
        levels.dedup();
        ChannelPoints { coords, levels }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn coords(&self, axis: usize) -> &[u32] {
        &self.coords[axis]
    }

    /// Number of distinct coordinates along `axis`.
    pub fn side(&self, axis: usize) -> usize {
        self.coords[axis].len()
    }

    pub fn sides(&self) -> Vec<u32> {
        self.coords.iter().map(|c| c.len() as u32).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.iter().any(Vec::is_empty)
    }

    pub fn len(&self) -> u64 {
        self.coords.iter().map(|c| c.len() as u64).product()
    }

    /// Section size `|pi_bar_i(points)|`.
    pub fn section(&self, axis: usize) -> u64 {
        self.coords
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != axis)
            .map(|(_, c)| c.len() as u64)
            .product()
    }

    /// Axis minimising the section size, i.e. the longest side; the
    /// smallest index wins ties.
    pub fn direction(&self) -> usize {
        let best = self.coords.iter().map(Vec::len).max().unwrap_or(0);
        self.coords.iter().position(|c| c.len() == best).unwrap_or(0)
    }

    pub fn contains(&self, v: &GridNode) -> bool {
        v.dim() == self.dim() && v.coords().iter().zip(&self.coords).all(|(x, c)| c.binary_search(x).is_ok())
    }

    /// All points in lexicographic order.
    pub fn points(&self) -> Vec<GridNode> {
        let mut out = vec![GridNode::new(std::iter::empty())];
        for c in &self.coords {
            out = out
                .into_iter()
                .flat_map(|p| c.iter().map(move |&x| GridNode::new(p.coords().iter().copied().chain([x]))))
                .collect();
        }
        if self.is_empty() {
            out.clear();
        }
        out
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.coords.clone())
    }

    /// `max_i ceil(c n^alpha / S_i)`, the per-fiber load a uniform mapping
    /// of `c n^alpha` slots can reach on this point set.
    pub fn load_bound(&self, c: f64, n: usize, alpha: f64) -> u64 {
        let slots = c * (n as f64).powf(alpha);
        (0..self.dim())
            .map(|i| (slots / self.section(i) as f64 - 1e-9).ceil().max(0.0) as u64)
            .max()
            .unwrap_or(0)
    }
}

/// The channel graph of `points`: the grid on the point set with every
/// lattice edge subdivided into the straight run of host edges it spans.
pub fn channel_graph(points: &ChannelPoints) -> Result<Lattice> {
    points.lattice()
}

/// Host edges used by the channel graph of `points`.
pub fn channel_edges(points: &ChannelPoints) -> Vec<GridEdge> {
    let mut out = Vec::new();
    for v in points.points() {
        for axis in 0..points.dim() {
            let c = points.coords(axis);
            let at = c.binary_search(&v.get(axis)).expect("point on lattice");
            if let Some(&next) = c.get(at + 1) {
                for x in v.get(axis)..next {
                    out.push(GridEdge::between(&v.with_coord(axis, x), &v.with_coord(axis, x + 1)).expect("unit step"));
                }
            }
        }
    }
    out
}

fn decode(mut index: u64, axes: &[usize], cp: &ChannelPoints, out: &mut [u32]) {
    // mixed radix, last listed axis fastest
    for &a in axes.iter().rev() {
        let len = cp.side(a) as u64;
        out[a] = cp.coords[a][(index % len) as usize];
        index /= len;
    }
}

/// Maps `count` slots onto `points` so that the load of every fiber along
/// each axis in `axes` (one or two axes) is exactly `ceil(count / S_i)`.
///
/// One axis `i`: slot `t` goes to fiber `t mod S_i` at position
/// `(t div S_i) mod l_i`. Two axes `i, j`: with `R` the product of the
/// remaining sides, slot `t` uses the remaining coordinates `t mod R` and
/// positions `p mod l_i`, `p mod l_j` for `p = t div R`, which walks a
/// diagonal between the two axes.
pub fn uniform_mapping(count: usize, points: &ChannelPoints, axes: &[usize]) -> Result<Vec<GridNode>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if points.is_empty() {
        return Err(Error::EmptyChannel(format!("levels {:?}", points.levels)));
    }
    let d = points.dim();
    let mut axes = axes.to_vec();
    axes.dedup();
    if axes.is_empty() || axes.len() > 2 || axes.iter().any(|&a| a >= d) {
        return Err(Error::InvalidParameter(format!("uniform mapping needs one or two axes, got {axes:?}")));
    }
    let rest: Vec<usize> = (0..d).filter(|a| !axes.contains(a)).collect();
    let r: u64 = rest.iter().map(|&a| points.side(a) as u64).product();
    let mut out = Vec::with_capacity(count);
    let mut c = vec![0u32; d];
    for t in 0..count as u64 {
        match *axes.as_slice() {
            [i] => {
                let s = points.section(i);
                decode(t % s, &rest, points, &mut c);
                let li = points.side(i) as u64;
                c[i] = points.coords[i][((t / s) % li) as usize];
            }
            [i, j] => {
                decode(t % r, &rest, points, &mut c);
                let p = t / r;
                c[i] = points.coords[i][(p % points.side(i) as u64) as usize];
                c[j] = points.coords[j][(p % points.side(j) as u64) as usize];
            }
            _ => unreachable!(),
        }
        out.push(GridNode::from_slice(&c));
    }
    Ok(out)
}

/// `lambda_i`: the largest number of images sharing one fiber along `axis`.
pub fn fiber_load(images: &[GridNode], axis: usize) -> usize {
    let mut count: std::collections::HashMap<GridNode, usize> = std::collections::HashMap::new();
    for v in images {
        *count.entry(v.drop_axes(&[axis])).or_default() += 1;
    }
    count.into_values().max().unwrap_or(0)
}
