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


//! Permutation routing on grids and embedding by permutation routing.
//!
//! [`route_permutation`] is the classic slice recursion: colour the
//! projection along the first axis with at most `l_1` colours, send colour
//! class `c` into the slice `x_1 = c + 1`, recurse, and attach the first-axis
//! runs at both ends. [`route_general`] and [`route_general_aspect`] extend it
//! to `p`-`q` routing graphs. [`embed_by_permutation`] orients the guest
//! along Euler trails, splits it into `ceil(delta / 2)` permutations and
//! routes each one.

mod coloring;
mod engine;
mod euler;

pub use coloring::{bipartite_edge_color, color_with, max_degree};
pub use engine::{Lattice, Scheme};
pub use euler::euler_orient;

pub(crate) use engine::{first_stage, route_walks};

use crate::error::{Error, Result};
use crate::graph::GuestGraph;
use crate::grid::{Embedding, GridNode, Image, Request, Routing, RoutingGraph, SubGrid};
use crate::par::{self, Exec};

/// Axis order led by `h`, the rest by non-increasing length (ties by index).
pub fn sorted_order(sides: &[u32], h: usize) -> Vec<usize> {
    let mut rest: Vec<usize> = (0..sides.len()).filter(|&i| i != h).collect();
    rest.sort_by_key(|&i| (std::cmp::Reverse(sides[i]), i));
    std::iter::once(h).chain(rest).collect()
}

fn check_endpoints(r: &RoutingGraph, m: &SubGrid) -> Result<()> {
    for q in r.requests() {
        for v in [&q.source, &q.target] {
            if !m.contains(v) {
                return Err(Error::OutOfBounds { node: v.to_string(), grid: m.box_string() });
            }
        }
    }
    Ok(())
}

fn to_routing(requests: &[Request], walks: Vec<Vec<GridNode>>) -> Routing {
    Routing { images: requests.iter().zip(walks).map(|(q, w)| (q.id, Image::from_walk(&w))).collect() }
}

/// Routes a 1-1 routing graph on `m` with congestion at most `2 max l_i`
/// and dilation at most `2 sum l_i`.
pub fn route_permutation(r: &RoutingGraph, m: &SubGrid) -> Result<Routing> {
    route_permutation_with(r, m, Exec::default())
}

pub fn route_permutation_with(r: &RoutingGraph, m: &SubGrid, exec: Exec) -> Result<Routing> {
    check_endpoints(r, m)?;
    if !r.is_one_to_one() {
        return Err(Error::NotOneToOne(r.max_out().max(r.max_in()) as u64));
    }
    let order: Vec<usize> = (0..m.dim()).collect();
    let walks = route_walks(&Lattice::of_subgrid(m), r.requests(), &order, Scheme::Permutation, exec)?;
    Ok(to_routing(r.requests(), walks))
}

/// Routes `r` with congestion at most `2 max{p, q}`, where `p`-`q` is the
/// multiplicity of the projection of `r` along `h`.
///
/// Without `dim_order`, `h` must be a longest axis and the remaining axes
/// are peeled in non-increasing length. An explicit `dim_order` must start
/// with `h` and overrides the length sort.
pub fn route_general(r: &RoutingGraph, m: &SubGrid, h: usize, dim_order: Option<&[usize]>) -> Result<Routing> {
    route_general_with(r, m, h, dim_order, Exec::default())
}

pub fn route_general_with(
    r: &RoutingGraph,
    m: &SubGrid,
    h: usize,
    dim_order: Option<&[usize]>,
    exec: Exec,
) -> Result<Routing> {
    let d = m.dim();
    if h >= d {
        return Err(Error::AxisOutOfRange { axis: h, dim: d });
    }
    check_endpoints(r, m)?;
    let order = match dim_order {
        Some(o) => {
            let mut sorted = o.to_vec();
            sorted.sort_unstable();
            if sorted != (0..d).collect::<Vec<_>>() || o[0] != h {
                return Err(Error::RoutingPrecondition(format!(
                    "dimension order {o:?} must be a permutation of the axes led by {h}"
                )));
            }
            o.to_vec()
        }
        None => {
            if m.side(h) != m.max_side() {
                return Err(Error::RoutingPrecondition(format!(
                    "axis {h} has length {} but the longest side is {}",
                    m.side(h),
                    m.max_side()
                )));
            }
            sorted_order(m.spec().dims(), h)
        }
    };
    let walks = route_walks(&Lattice::of_subgrid(m), r.requests(), &order, Scheme::General, exec)?;
    Ok(to_routing(r.requests(), walks))
}

/// Like [`route_general`] for any axis `h`; congestion at most
/// `2 ceil(mu max{p, q})` with `mu` the aspect ratio of `m`.
pub fn route_general_aspect(r: &RoutingGraph, m: &SubGrid, h: usize) -> Result<Routing> {
    route_general_aspect_with(r, m, h, Exec::default())
}

pub fn route_general_aspect_with(r: &RoutingGraph, m: &SubGrid, h: usize, exec: Exec) -> Result<Routing> {
    if h >= m.dim() {
        return Err(Error::AxisOutOfRange { axis: h, dim: m.dim() });
    }
    check_endpoints(r, m)?;
    let order = sorted_order(m.spec().dims(), h);
    let walks = route_walks(&Lattice::of_subgrid(m), r.requests(), &order, Scheme::General, exec)?;
    Ok(to_routing(r.requests(), walks))
}

/// Colour class (slice along the first axis, 1-based) that permutation
/// routing gives each request of `r`. Within a class no two requests share
/// a projected source or a projected target.
pub fn permutation_color_classes(r: &RoutingGraph, m: &SubGrid) -> Result<Vec<u32>> {
    check_endpoints(r, m)?;
    if !r.is_one_to_one() {
        return Err(Error::NotOneToOne(r.max_out().max(r.max_in()) as u64));
    }
    let order: Vec<usize> = (0..m.dim()).collect();
    first_stage(&Lattice::of_subgrid(m), r.requests(), &order, Scheme::Permutation)
}

/// `2 ceil(delta / 2) max l_i`.
pub fn permutation_embedding_bound(max_degree: usize, m: &SubGrid) -> u64 {
    2 * max_degree.div_ceil(2) as u64 * u64::from(m.max_side())
}

/// Splits the Euler orientation of `g` into at most `ceil(delta / 2)`
/// routing graphs that are 1-1 on guest nodes. Entry `e` is the class of
/// guest edge `e`, and the oriented arcs are returned alongside.
pub fn permutation_classes(g: &GuestGraph) -> (Vec<(usize, usize)>, Vec<usize>) {
    let arcs = euler_orient(g);
    let n = g.node_count();
    let classes = bipartite_edge_color(n, n, &arcs);
    (arcs, classes)
}

/// Embeds `g` into `m` by routing `ceil(delta / 2)` permutations.
///
/// `phi` defaults to the first `|V(g)|` nodes of `m` in lexicographic order.
pub fn embed_by_permutation(g: &GuestGraph, m: &SubGrid, phi: Option<&[GridNode]>) -> Result<Embedding> {
    embed_by_permutation_with(g, m, phi, Exec::default())
}

pub fn embed_by_permutation_with(
    g: &GuestGraph,
    m: &SubGrid,
    phi: Option<&[GridNode]>,
    exec: Exec,
) -> Result<Embedding> {
    let n = g.node_count();
    if n as u64 > m.node_count() {
        return Err(Error::GuestTooLarge { guest: n, host: m.node_count() });
    }
    let phi: Vec<GridNode> = match phi {
        Some(p) => {
            if p.len() != n {
                return Err(Error::InvalidParameter(format!("node map has {} entries for {n} nodes", p.len())));
            }
            let mut seen = std::collections::HashSet::new();
            for v in p {
                if !m.contains(v) {
                    return Err(Error::OutOfBounds { node: v.to_string(), grid: m.box_string() });
                }
                if !seen.insert(v) {
                    return Err(Error::InvalidParameter(format!("node map hits {v} twice")));
                }
            }
            p.to_vec()
        }
        None => m.nodes().take(n).collect(),
    };
    let rho = route_guest_edges(g, m, &phi, exec)?;
    let host = m.spec().clone();
    // the embedding lives in the root grid when `m` is a subgrid
    let root = if m.origin().iter().all(|&o| o == 0) {
        host
    } else {
        crate::grid::GridSpec::new((0..m.dim()).map(|i| m.hi(i)).collect())?
    };
    Embedding::new(root, phi, g.edges().to_vec(), rho)
}

/// Routes every guest edge between its mapped endpoints inside `m`; one
/// image per guest edge id.
pub(crate) fn route_guest_edges(g: &GuestGraph, m: &SubGrid, phi: &[GridNode], exec: Exec) -> Result<Vec<Image>> {
    let (arcs, classes) = permutation_classes(g);
    let k = classes.iter().copied().max().map_or(0, |c| c + 1);
    let mut graphs = vec![RoutingGraph::new(); k];
    for (e, (&(u, v), &c)) in arcs.iter().zip(&classes).enumerate() {
        graphs[c].push(e as u64, phi[u].clone(), phi[v].clone());
    }
    let routed = par::map(exec, &graphs, |r| route_permutation_with(r, m, exec));
    let mut rho = vec![Image::default(); g.edge_count()];
    for routing in routed {
        for (id, img) in routing?.images {
            rho[id as usize] = img;
        }
    }
    Ok(rho)
}
