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

//! Grid geometry and the routing/embedding data structures shared by every
//! other module.
//!
//! Coordinates are 1-based: a node of the `l_1 x ... x l_d` grid has
//! `coords[i]` in `1..=l_i`. Axes are 0-based indices into the coordinate
//! vector.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Coords = SmallVec<[u32; 4]>;

/// A point of a grid.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridNode(Coords);

impl GridNode {
    pub fn new<I: IntoIterator<Item = u32>>(coords: I) -> Self {
        GridNode(coords.into_iter().collect())
    }

    pub fn from_slice(coords: &[u32]) -> Self {
        GridNode(Coords::from_slice(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, axis: usize) -> u32 {
        self.0[axis]
    }

    /// Splits the node into its coordinate along `axis` and the node of the
    /// `(d-1)`-dimensional grid obtained by dropping that coordinate.
    pub fn project(&self, axis: usize) -> Result<(u32, GridNode)> {
        if axis >= self.dim() {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim() });
        }
        let rest = self
            .0
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != axis)
            .map(|(_, &x)| x)
            .collect();
        Ok((self.0[axis], GridNode(rest)))
    }

    /// The node with every coordinate in `axes` removed.
    pub fn drop_axes(&self, axes: &[usize]) -> GridNode {
        GridNode(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| !axes.contains(i))
                .map(|(_, &x)| x)
                .collect(),
        )
    }

    pub fn with_coord(&self, axis: usize, value: u32) -> GridNode {
        let mut c = self.0.clone();
        c[axis] = value;
        GridNode(c)
    }

    pub fn l1_distance(&self, other: &GridNode) -> u64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(&a, &b)| u64::from(a.abs_diff(b)))
            .sum()
    }

    /// The axis of the grid edge joining `self` and `other`, if they are
    /// grid neighbours.
    pub fn edge_axis(&self, other: &GridNode) -> Option<usize> {
        if self.dim() != other.dim() {
            return None;
        }
        let mut axis = None;
        for (i, (&a, &b)) in self.0.iter().zip(other.0.iter()).enumerate() {
            match a.abs_diff(b) {
                0 => {}
                1 if axis.is_none() => axis = Some(i),
                _ => return None,
            }
        }
        axis
    }
}

impl fmt::Display for GridNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for GridNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for GridNode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::Parse { line: 0, msg: format!("node {s:?} is not parenthesised") })?;
        let coords = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Parse { line: 0, msg: format!("coordinate {t:?}: {e}") })
            })
            .collect::<Result<Coords>>()?;
        if coords.is_empty() {
            return Err(Error::Parse { line: 0, msg: "empty node".into() });
        }
        Ok(GridNode(coords))
    }
}

/// Side lengths `(l_1, ..., l_d)` of a grid.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GridSpec {
    dims: Vec<u32>,
}

impl GridSpec {
    pub fn new(dims: Vec<u32>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidGrid("at least one dimension is required".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidGrid(format!("side lengths must be positive: {dims:?}")));
        }
        Ok(GridSpec { dims })
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn side(&self, axis: usize) -> u32 {
        self.dims[axis]
    }

    pub fn node_count(&self) -> u64 {
        self.dims.iter().map(|&l| u64::from(l)).product()
    }

    /// `max_{i,j} l_j / l_i`.
    pub fn aspect_ratio(&self) -> f64 {
        let max = *self.dims.iter().max().unwrap();
        let min = *self.dims.iter().min().unwrap();
        f64::from(max) / f64::from(min)
    }

    pub fn contains(&self, v: &GridNode) -> bool {
        v.dim() == self.dim() && v.coords().iter().zip(&self.dims).all(|(&x, &l)| x >= 1 && x <= l)
    }

    pub fn nodes(&self) -> BoxIter {
        SubGrid::whole(self).nodes()
    }

    pub fn edge_count(&self) -> u64 {
        (0..self.dim())
            .map(|axis| {
                self.dims
                    .iter()
                    .enumerate()
                    .map(|(i, &l)| if i == axis { u64::from(l) - 1 } else { u64::from(l) })
                    .product::<u64>()
            })
            .sum()
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// Parses `"l1xl2x...xld"`, e.g. `"8x8x4"`.
    fn from_str(s: &str) -> Result<Self> {
        let dims = s
            .trim()
            .split(['x', 'X'])
            .map(|t| t.trim().parse::<u32>().map_err(|e| Error::InvalidGrid(format!("{s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        GridSpec::new(dims)
    }
}

/// An axis-aligned box inside a root grid.
///
/// Global coordinates of the box run over `origin[i] + 1 ..= origin[i] + l_i`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SubGrid {
    origin: Coords,
    spec: GridSpec,
}

impl SubGrid {
    pub fn new(origin: &[u32], spec: GridSpec) -> Result<Self> {
        if origin.len() != spec.dim() {
            return Err(Error::InvalidGrid(format!(
                "origin has {} coordinates, grid has {} dimensions",
                origin.len(),
                spec.dim()
            )));
        }
        Ok(SubGrid { origin: Coords::from_slice(origin), spec })
    }

    pub fn whole(spec: &GridSpec) -> Self {
        SubGrid { origin: std::iter::repeat_n(0, spec.dim()).collect(), spec: spec.clone() }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn origin(&self) -> &[u32] {
        &self.origin
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn side(&self, axis: usize) -> u32 {
        self.spec.side(axis)
    }

    /// Smallest global coordinate along `axis`.
    pub fn lo(&self, axis: usize) -> u32 {
        self.origin[axis] + 1
    }

    /// Largest global coordinate along `axis`.
    pub fn hi(&self, axis: usize) -> u32 {
        self.origin[axis] + self.spec.side(axis)
    }

    pub fn node_count(&self) -> u64 {
        self.spec.node_count()
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.spec.aspect_ratio()
    }

    /// Longest axis; the smallest index wins ties.
    pub fn longest_axis(&self) -> usize {
        let dims = self.spec.dims();
        let max = *dims.iter().max().unwrap();
        dims.iter().position(|&l| l == max).unwrap()
    }

    pub fn min_side(&self) -> u32 {
        *self.spec.dims().iter().min().unwrap()
    }

    pub fn max_side(&self) -> u32 {
        *self.spec.dims().iter().max().unwrap()
    }

    pub fn contains(&self, v: &GridNode) -> bool {
        v.dim() == self.dim() && (0..self.dim()).all(|i| v.get(i) >= self.lo(i) && v.get(i) <= self.hi(i))
    }

    /// Number of grid neighbours of `v` inside the box.
    pub fn degree(&self, v: &GridNode) -> usize {
        (0..self.dim())
            .map(|i| usize::from(v.get(i) > self.lo(i)) + usize::from(v.get(i) < self.hi(i)))
            .sum()
    }

    /// A node is interior when it has full degree `2d` inside the box.
    pub fn is_interior(&self, v: &GridNode) -> bool {
        self.contains(v) && (0..self.dim()).all(|i| v.get(i) > self.lo(i) && v.get(i) < self.hi(i))
    }

    pub fn interior_count(&self) -> u64 {
        self.spec.dims().iter().map(|&l| u64::from(l.saturating_sub(2))).product()
    }

    pub fn fits_in(&self, root: &GridSpec) -> bool {
        self.dim() == root.dim() && (0..self.dim()).all(|i| self.hi(i) <= root.side(i))
    }

    /// Nodes in lexicographic order.
    pub fn nodes(&self) -> BoxIter {
        BoxIter::new((0..self.dim()).map(|i| (self.lo(i), self.hi(i))).collect())
    }

    /// Interior nodes in lexicographic order.
    pub fn interior_nodes(&self) -> BoxIter {
        BoxIter::new((0..self.dim()).map(|i| (self.lo(i) + 1, self.hi(i).saturating_sub(1))).collect())
    }

    /// Every grid edge of the box exactly once, tagged with its axis.
    pub fn edges(&self) -> impl Iterator<Item = GridEdge> + '_ {
        self.nodes().flat_map(move |v| {
            (0..self.dim())
                .filter(|&i| v.get(i) < self.hi(i))
                .map(|i| GridEdge { lo: v.clone(), axis: i as u8 })
                .collect::<Vec<_>>()
        })
    }

    /// The sub-box with global coordinates `from..=to` along `axis`.
    pub fn slab(&self, axis: usize, from: u32, to: u32) -> SubGrid {
        debug_assert!(self.lo(axis) <= from && from <= to && to <= self.hi(axis));
        let mut origin = self.origin.clone();
        origin[axis] = from - 1;
        let mut dims = self.spec.dims().to_vec();
        dims[axis] = to - from + 1;
        SubGrid { origin, spec: GridSpec { dims } }
    }

    /// Human readable box, e.g. `[1..8]x[3..5]`.
    pub fn box_string(&self) -> String {
        (0..self.dim()).map(|i| format!("[{}..{}]", self.lo(i), self.hi(i))).collect::<Vec<_>>().join("x")
    }
}

/// Odometer over an axis-aligned box, last axis fastest.
#[derive(Clone, Debug)]
pub struct BoxIter {
    ranges: Vec<(u32, u32)>,
    cur: Option<Coords>,
}

impl BoxIter {
    fn new(ranges: Vec<(u32, u32)>) -> Self {
        let empty = ranges.iter().any(|&(a, b)| a > b);
        let cur = if empty { None } else { Some(ranges.iter().map(|&(a, _)| a).collect()) };
        BoxIter { ranges, cur }
    }
}

impl Iterator for BoxIter {
    type Item = GridNode;

    fn next(&mut self) -> Option<GridNode> {
        let cur = self.cur.as_mut()?;
        let out = GridNode(cur.clone());
        let mut i = self.ranges.len();
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            if cur[i] < self.ranges[i].1 {
                cur[i] += 1;
                break;
            }
            cur[i] = self.ranges[i].0;
        }
        Some(out)
    }
}

/// An undirected grid edge, stored by its lower endpoint and axis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GridEdge {
    pub lo: GridNode,
    pub axis: u8,
}

impl GridEdge {
    pub fn between(a: &GridNode, b: &GridNode) -> Option<GridEdge> {
        let axis = a.edge_axis(b)?;
        let lo = if a.get(axis) < b.get(axis) { a.clone() } else { b.clone() };
        Some(GridEdge { lo, axis: axis as u8 })
    }

    pub fn hi(&self) -> GridNode {
        let axis = usize::from(self.axis);
        self.lo.with_coord(axis, self.lo.get(axis) + 1)
    }

    pub fn axis(&self) -> usize {
        usize::from(self.axis)
    }
}

impl fmt::Display for GridEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi())
    }
}

/// One routing request. Ids are unique within a routing graph.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Request {
    pub id: u64,
    pub source: GridNode,
    pub target: GridNode,
}

/// A multiset of routing requests.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RoutingGraph {
    requests: Vec<Request>,
}

impl RoutingGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_requests(requests: Vec<Request>) -> Result<Self> {
        let mut ids = HashSet::new();
        for r in &requests {
            if !ids.insert(r.id) {
                return Err(Error::InvalidParameter(format!("duplicate request id {}", r.id)));
            }
            if r.source.dim() != r.target.dim() {
                return Err(Error::InvalidParameter(format!("request {} mixes dimensions", r.id)));
            }
        }
        Ok(RoutingGraph { requests })
    }

    pub fn push(&mut self, id: u64, source: GridNode, target: GridNode) {
        self.requests.push(Request { id, source, target });
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    /// Maximum out-multiplicity `p`.
    pub fn max_out(&self) -> usize {
        max_multiplicity(self.requests.iter().map(|r| &r.source))
    }

    /// Maximum in-multiplicity `q`.
    pub fn max_in(&self) -> usize {
        max_multiplicity(self.requests.iter().map(|r| &r.target))
    }

    pub fn is_one_to_one(&self) -> bool {
        self.max_out() <= 1 && self.max_in() <= 1
    }

    /// Drops coordinate `axis` from every endpoint, keeping request ids.
    pub fn project(&self, axis: usize) -> Result<RoutingGraph> {
        let requests = self
            .requests
            .iter()
            .map(|r| {
                Ok(Request { id: r.id, source: r.source.project(axis)?.1, target: r.target.project(axis)?.1 })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RoutingGraph { requests })
    }
}

fn max_multiplicity<'a>(nodes: impl Iterator<Item = &'a GridNode>) -> usize {
    let mut count: HashMap<&GridNode, usize> = HashMap::new();
    for v in nodes {
        *count.entry(v).or_default() += 1;
    }
    count.into_values().max().unwrap_or(0)
}

/// Removes cycles from a walk, keeping the first visit order.
///
/// The result is a simple path with the same endpoints whose edges are a
/// subset of the walk's edges.
pub fn loop_erase(walk: &[GridNode]) -> Vec<GridNode> {
    let mut out: Vec<GridNode> = Vec::with_capacity(walk.len());
    let mut pos: HashMap<GridNode, usize> = HashMap::with_capacity(walk.len());
    for v in walk {
        if let Some(&p) = pos.get(v) {
            for dropped in out.drain(p + 1..) {
                pos.remove(&dropped);
            }
        } else {
            pos.insert(v.clone(), out.len());
            out.push(v.clone());
        }
    }
    out
}

/// Joins walks that meet end to start.
pub fn concat_walks<'a>(parts: impl IntoIterator<Item = &'a [GridNode]>) -> Vec<GridNode> {
    let mut out: Vec<GridNode> = Vec::new();
    for part in parts {
        if part.is_empty() {
            continue;
        }
        match out.last() {
            Some(last) => {
                debug_assert_eq!(last, &part[0], "walks do not meet");
                out.extend_from_slice(&part[1..]);
            }
            None => out.extend_from_slice(part),
        }
    }
    out
}

/// The edge set a routing assigns to one request or guest edge.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Image {
    edges: Vec<GridEdge>,
}

impl Image {
    pub fn from_edges(edges: impl IntoIterator<Item = GridEdge>) -> Image {
        let mut edges: Vec<GridEdge> = edges.into_iter().collect();
        edges.sort();
        edges.dedup();
        Image { edges }
    }

    /// Loop-erases the walk and keeps its edges. Consecutive walk nodes must
    /// be grid neighbours.
    pub fn from_walk(walk: &[GridNode]) -> Image {
        let path = loop_erase(walk);
        Image::from_edges(path.windows(2).map(|w| {
            GridEdge::between(&w[0], &w[1]).unwrap_or_else(|| panic!("{} and {} are not adjacent", w[0], w[1]))
        }))
    }

    pub fn edges(&self) -> &[GridEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: &GridEdge) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    pub fn remove(&mut self, e: &GridEdge) -> bool {
        match self.edges.binary_search(e) {
            Ok(i) => {
                self.edges.remove(i);
                true
            }
            Err(_) => false,
        }
    }

    /// Reconstructs the node order of the image as a simple path from
    /// `from` to `to`; `None` when the edge set is not such a path.
    pub fn ordered_path(&self, from: &GridNode, to: &GridNode) -> Option<Vec<GridNode>> {
        if self.edges.is_empty() {
            return (from == to).then(|| vec![from.clone()]);
        }
        let mut adj: HashMap<GridNode, Vec<GridNode>> = HashMap::new();
        for e in &self.edges {
            let hi = e.hi();
            adj.entry(e.lo.clone()).or_default().push(hi.clone());
            adj.entry(hi).or_default().push(e.lo.clone());
        }
        if adj.len() != self.edges.len() + 1 {
            return None;
        }
        if adj.get(from)?.len() != 1 || adj.get(to)?.len() != 1 {
            return None;
        }
        let mut path = vec![from.clone()];
        let mut prev: Option<GridNode> = None;
        let mut cur = from.clone();
        while &cur != to {
            let nbrs = &adj[&cur];
            if nbrs.len() > 2 {
                return None;
            }
            let next = nbrs.iter().find(|n| Some(*n) != prev.as_ref())?.clone();
            prev = Some(cur);
            cur = next;
            path.push(cur.clone());
            if path.len() > adj.len() {
                return None;
            }
        }
        (path.len() == adj.len()).then_some(path)
    }
}

/// Dilation, congestion and the congestion histogram of a routing.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Measurement {
    pub dilation: usize,
    pub congestion: u32,
    /// congestion value -> number of host edges carrying it
    pub histogram: BTreeMap<u32, u64>,
}

pub type CongestionMap = HashMap<GridEdge, u32>;

pub fn congestion_map<'a>(images: impl IntoIterator<Item = &'a Image>) -> CongestionMap {
    let mut map = CongestionMap::new();
    for img in images {
        for e in img.edges() {
            *map.entry(e.clone()).or_default() += 1;
        }
    }
    map
}

/// Congestion counted over walks, one unit per traversal of an edge.
pub fn walk_congestion<'a>(walks: impl IntoIterator<Item = &'a [GridNode]>) -> CongestionMap {
    let mut map = CongestionMap::new();
    for w in walks {
        for pair in w.windows(2) {
            let e = GridEdge::between(&pair[0], &pair[1]).expect("walk steps must be grid edges");
            *map.entry(e).or_default() += 1;
        }
    }
    map
}

fn measurement<'a>(images: impl IntoIterator<Item = &'a Image> + Clone, host_edges: Option<u64>) -> Measurement {
    let dilation = images.clone().into_iter().map(Image::len).max().unwrap_or(0);
    let map = congestion_map(images);
    let mut histogram = BTreeMap::new();
    for &c in map.values() {
        *histogram.entry(c).or_default() += 1;
    }
    if let Some(total) = host_edges {
        let used = map.len() as u64;
        if total > used {
            histogram.insert(0, total - used);
        }
    }
    Measurement { dilation, congestion: map.values().copied().max().unwrap_or(0), histogram }
}

/// A routing of a routing graph: one image per request id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Routing {
    pub images: BTreeMap<u64, Image>,
}

impl Routing {
    pub fn measure(&self) -> Measurement {
        measurement(self.images.values(), None)
    }

    pub fn congestion(&self) -> u32 {
        self.measure().congestion
    }

    pub fn dilation(&self) -> usize {
        self.images.values().map(Image::len).max().unwrap_or(0)
    }

    /// Checks that every request's image is a simple path between its
    /// endpoints.
    pub fn validate(&self, graph: &RoutingGraph) -> Result<()> {
        for r in graph.requests() {
            let img = self.images.get(&r.id).ok_or_else(|| Error::InvalidImage {
                edge: r.id as usize,
                msg: "missing image".into(),
            })?;
            if img.ordered_path(&r.source, &r.target).is_none() {
                return Err(Error::InvalidImage {
                    edge: r.id as usize,
                    msg: format!("not a simple path from {} to {}", r.source, r.target),
                });
            }
        }
        Ok(())
    }
}

/// An embedding `<phi, rho>` of a guest graph into a host grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub host: GridSpec,
    /// Host node of each guest node.
    pub phi: Vec<GridNode>,
    /// Guest edges `(u, v)`; `rho[i]` routes `edges[i]`.
    pub edges: Vec<(usize, usize)>,
    pub rho: Vec<Image>,
}

impl Embedding {
    pub fn new(host: GridSpec, phi: Vec<GridNode>, edges: Vec<(usize, usize)>, rho: Vec<Image>) -> Result<Self> {
        if edges.len() != rho.len() {
            return Err(Error::InvalidParameter(format!("{} edges but {} images", edges.len(), rho.len())));
        }
        if let Some(v) = phi.iter().find(|v| !host.contains(v)) {
            return Err(Error::OutOfBounds { node: v.to_string(), grid: host.to_string() });
        }
        Ok(Embedding { host, phi, edges, rho })
    }

    pub fn measure(&self) -> Measurement {
        measurement(self.rho.iter(), Some(self.host.edge_count()))
    }

    /// Like [`Embedding::measure`] but rejects images that are not simple
    /// paths between the mapped endpoints, and non-injective node maps.
    pub fn measure_checked(&self) -> Result<Measurement> {
        let mut seen = HashSet::new();
        for (v, p) in self.phi.iter().enumerate() {
            if !seen.insert(p) {
                return Err(Error::InvalidParameter(format!("node map is not injective at guest node {v}")));
            }
        }
        for (i, (&(u, v), img)) in self.edges.iter().zip(&self.rho).enumerate() {
            if img.edges().iter().any(|e| !self.host.contains(&e.lo) || !self.host.contains(&e.hi())) {
                return Err(Error::InvalidImage { edge: i, msg: "leaves the host grid".into() });
            }
            if img.ordered_path(&self.phi[u], &self.phi[v]).is_none() {
                return Err(Error::InvalidImage {
                    edge: i,
                    msg: format!("not a simple path from {} to {}", self.phi[u], self.phi[v]),
                });
            }
        }
        Ok(self.measure())
    }

    pub fn congestion_map(&self) -> CongestionMap {
        congestion_map(self.rho.iter())
    }

    /// Text form: one `v -> (x1,...,xd)` line per guest node, then one
    /// `u v : (p1) (p2) ... (pk)` line per guest edge.
    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        for (v, p) in self.phi.iter().enumerate() {
            writeln!(out, "{v} -> {p}").unwrap();
        }
        for (&(u, v), img) in self.edges.iter().zip(&self.rho) {
            let from = &self.phi[u];
            let to = &self.phi[v];
            write!(out, "{u} {v} :").unwrap();
            match img.ordered_path(from, to) {
                Some(path) => {
                    for p in path {
                        write!(out, " {p}").unwrap();
                    }
                }
                // not a path; dump the edges so nothing is lost
                None => {
                    for e in img.edges() {
                        write!(out, " {} {}", e.lo, e.hi()).unwrap();
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parses the text form. Consecutive path nodes must be grid neighbours.
    pub fn parse(text: &str, host: &GridSpec) -> Result<Embedding> {
        let mut phi: BTreeMap<usize, GridNode> = BTreeMap::new();
        let mut edges = Vec::new();
        let mut rho = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: ln, msg };
            if let Some((lhs, rhs)) = line.split_once("->") {
                let v = lhs.trim().parse::<usize>().map_err(|e| perr(e.to_string()))?;
                let p: GridNode = rhs.trim().parse().map_err(|e: Error| perr(e.to_string()))?;
                if phi.insert(v, p).is_some() {
                    return Err(perr(format!("guest node {v} mapped twice")));
                }
            } else if let Some((lhs, rhs)) = line.split_once(':') {
                let ends: Vec<usize> = lhs
                    .split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|e| perr(e.to_string())))
                    .collect::<Result<_>>()?;
                if ends.len() != 2 {
                    return Err(perr("edge line must start with `u v :`".into()));
                }
                let nodes = parse_node_list(rhs).map_err(|e| perr(e.to_string()))?;
                let mut img = Vec::new();
                for w in nodes.windows(2) {
                    img.push(
                        GridEdge::between(&w[0], &w[1])
                            .ok_or_else(|| perr(format!("{} and {} are not adjacent", w[0], w[1])))?,
                    );
                }
                edges.push((ends[0], ends[1]));
                rho.push(Image::from_edges(img));
            } else {
                return Err(perr(format!("unrecognised line {line:?}")));
            }
        }
        let n = phi.len();
        if phi.keys().copied().ne(0..n) {
            return Err(Error::Parse { line: 0, msg: "guest node ids must be 0..N without gaps".into() });
        }
        Embedding::new(host.clone(), phi.into_values().collect(), edges, rho)
    }
}

fn parse_node_list(s: &str) -> Result<Vec<GridNode>> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let close = rest.find(')').ok_or_else(|| Error::Parse { line: 0, msg: "unclosed node".into() })?;
        out.push(rest[..=close].parse()?);
        rest = rest[close + 1..].trim_start();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(c: &[u32]) -> GridNode {
        GridNode::from_slice(c)
    }

    #[test]
    fn projection_examples() {
        // axis 1 is the second coordinate
        assert_eq!(node(&[3, 5, 2]).project(1).unwrap(), (5, node(&[3, 2])));
        assert_eq!(node(&[1, 1]).project(0).unwrap(), (1, node(&[1])));
        assert!(node(&[1, 1]).project(2).is_err());
    }

    #[test]
    fn routing_graph_projection_keeps_parallel_requests() {
        // Three requests on Grid(2,3); projecting out axis 0 merges two of
        // them onto the same pair of Grid(3) nodes without losing either.
        let mut r = RoutingGraph::new();
        r.push(0, node(&[1, 1]), node(&[2, 3]));
        r.push(1, node(&[2, 1]), node(&[1, 3]));
        r.push(2, node(&[1, 2]), node(&[1, 2]));
        let p = r.project(0).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.requests()[0].source, node(&[1]));
        assert_eq!(p.requests()[1].target, node(&[3]));
        assert_eq!(p.max_out(), 2);
        assert_eq!(p.max_in(), 2);
        assert_eq!(r.max_out(), 1);
        assert!(r.is_one_to_one());
        assert!(!p.is_one_to_one());
    }

    #[test]
    fn edge_counts() {
        let count = |s: &str| {
            let g: GridSpec = s.parse().unwrap();
            (SubGrid::whole(&g).edges().count() as u64, g.edge_count())
        };
        assert_eq!(count("2x2"), (4, 4));
        assert_eq!(count("3x3"), (12, 12));
        // 7*8*4 + 8*7*4 + 8*8*3
        assert_eq!(count("8x8x4"), (640, 640));
    }

    #[test]
    fn spec_parsing() {
        let g: GridSpec = "8x8x4".parse().unwrap();
        assert_eq!(g.dims(), &[8, 8, 4]);
        assert_eq!(g.to_string(), "8x8x4");
        assert_eq!(g.aspect_ratio(), 2.0);
        assert!("8x0".parse::<GridSpec>().is_err());
        assert!("".parse::<GridSpec>().is_err());
    }

    #[test]
    fn interior_and_slabs() {
        let m = SubGrid::whole(&"5x4".parse().unwrap());
        assert_eq!(m.interior_count(), 6);
        assert_eq!(m.interior_nodes().count(), 6);
        assert!(m.is_interior(&node(&[2, 2])));
        assert!(!m.is_interior(&node(&[1, 2])));
        let s = m.slab(0, 3, 5);
        assert_eq!(s.spec().dims(), &[3, 4]);
        assert_eq!(s.lo(0), 3);
        assert_eq!(s.degree(&node(&[3, 2])), 3);
        assert!(s.is_interior(&node(&[4, 2])));
        assert_eq!(s.box_string(), "[3..5]x[1..4]");
    }

    #[test]
    fn loop_erasure() {
        let w = [node(&[1, 1]), node(&[2, 1]), node(&[3, 1]), node(&[2, 1]), node(&[2, 2])];
        assert_eq!(loop_erase(&w), vec![node(&[1, 1]), node(&[2, 1]), node(&[2, 2])]);
        let img = Image::from_walk(&w);
        assert_eq!(img.len(), 2);
        assert_eq!(
            img.ordered_path(&node(&[2, 2]), &node(&[1, 1])).unwrap(),
            vec![node(&[2, 2]), node(&[2, 1]), node(&[1, 1])]
        );
    }

    #[test]
    fn ordered_path_rejects_broken_images() {
        let a = node(&[1, 1]);
        let b = node(&[3, 1]);
        let mut img = Image::from_walk(&[a.clone(), node(&[2, 1]), b.clone()]);
        assert!(img.ordered_path(&a, &b).is_some());
        img.remove(&GridEdge::between(&a, &node(&[2, 1])).unwrap());
        assert!(img.ordered_path(&a, &b).is_none());
        assert!(Image::default().ordered_path(&a, &a).is_some());
        assert!(Image::default().ordered_path(&a, &b).is_none());
    }

    #[test]
    fn identity_embedding_measure() {
        let host: GridSpec = "3x3".parse().unwrap();
        let phi: Vec<GridNode> = host.nodes().collect();
        let index: HashMap<GridNode, usize> = phi.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let mut edges = Vec::new();
        let mut rho = Vec::new();
        for e in SubGrid::whole(&host).edges() {
            edges.push((index[&e.lo], index[&e.hi()]));
            rho.push(Image::from_edges([e]));
        }
        let emb = Embedding::new(host, phi, edges, rho).unwrap();
        let m = emb.measure_checked().unwrap();
        assert_eq!((m.dilation, m.congestion), (1, 1));
        assert_eq!(m.histogram.get(&1), Some(&12));
        let back = Embedding::parse(&emb.to_text(), &emb.host).unwrap();
        assert_eq!(back, emb);
    }
}
