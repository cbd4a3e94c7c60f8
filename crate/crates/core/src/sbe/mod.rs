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


//! Separator-based recursive embedding.
//!
//! A frame embeds one decomposition-tree node `H` into a subgrid `M` on a
//! designated node set `U`, and additionally routes every external edge of
//! `H` from its endpoint to a point of the frame's channel. Frames whose
//! longest side is at most `2 mu d` are embedded directly; larger ones split
//! `M` across its longest side, recurse, and join the children's channel
//! ends through their own channel. Every inequality the construction relies
//! on is measured and checked as it runs; a failed check aborts the run with
//! the offending frame.

pub mod base;
pub mod channel;
pub mod partition;

use std::collections::HashMap;
use std::fmt::Write as _;

pub use base::{bisection_layout, spread_node_map, SpreadAudit};
pub use channel::{channel_edges, channel_graph, fiber_load, uniform_mapping, ChannelPoints};
pub use partition::{
    check_partition, cube_host, initial_designated_set, is_minimal_host, minimal_host, partition_host, HostPartition,
};

use crate::decompose::{audit_expansion, DecompositionTree};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, GuestGraph, NodeId};
use crate::grid::{
    concat_walks, congestion_map, loop_erase, CongestionMap, Embedding, GridEdge, GridNode, GridSpec, Image, Request,
    RoutingGraph, SubGrid,
};
use crate::par::{self, Exec};
use crate::routing::{route_guest_edges, route_walks, sorted_order, Lattice, Scheme};

/// Parameters of one run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SbeConfig {
    pub d: usize,
    pub alpha: f64,
    /// Expansion constant: `|ext(H)| <= c |V(H)|^alpha` on every tree node.
    pub c: f64,
    /// Balance of the decomposition tree.
    pub beta: f64,
    pub mu: f64,
    pub alpha_tilde: f64,
    /// Maximum degree of the whole guest.
    pub max_degree: usize,
    pub exec: Exec,
}

impl SbeConfig {
    /// `(1 / (1 - beta)) (1 / (7 beta) + e beta) + 5/4`, the smallest aspect
    /// ratio the host split can be held to.
    pub fn mu_floor(beta: f64) -> f64 {
        (1.0 / (1.0 - beta)) * (1.0 / (7.0 * beta) + std::f64::consts::E * beta) + 1.25
    }

    pub fn new(d: usize, alpha: f64, c: f64, beta: f64, host_aspect: f64, max_degree: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in [0, 1)")));
        }
        if !(0.5..1.0).contains(&beta) {
            return Err(Error::InvalidParameter(format!("beta = {beta} must lie in [1/2, 1)")));
        }
        if c.is_nan() || c <= 0.0 {
            return Err(Error::InvalidParameter(format!("expansion constant {c} must be positive")));
        }
        let mu = Self::mu_floor(beta).max(host_aspect);
        let alpha_tilde = (1.0 - 2.0 / d as f64).max(alpha);
        Ok(SbeConfig { d, alpha, c, beta, mu, alpha_tilde, max_degree, exec: Exec::default() })
    }

    /// Configuration for embedding `g` along `tree` into `host`: the
    /// expansion constant is the tree's measured one (at least 1) and the
    /// balance is the tree's.
    pub fn for_instance(g: &GuestGraph, tree: &DecompositionTree, host: &GridSpec) -> Result<Self> {
        let c = audit_expansion(tree).max_ratio.max(1.0);
        Self::new(host.dim(), tree.params.alpha, c, tree.params.tree_beta(), host.aspect_ratio(), g.max_degree())
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    /// Frames whose longest side is at most this are embedded directly.
    pub fn base_threshold(&self) -> f64 {
        2.0 * self.mu * self.d as f64
    }

    /// `c n^alpha`.
    pub fn slot_bound(&self, n: usize) -> f64 {
        self.c * (n as f64).powf(self.alpha)
    }
}

/// Channel level of a frame with `n` guest nodes:
/// `max(floor((1/2) ((1 - at - 1/d) log2 n - log2(mu / (1 - beta)))), 0)`.
pub fn channel_config_w(n: usize, cfg: &SbeConfig) -> u32 {
    let n = n.max(1) as f64;
    let x = 0.5 * ((1.0 - cfg.alpha_tilde - 1.0 / cfg.d as f64) * n.log2() - (cfg.mu / (1.0 - cfg.beta)).log2());
    x.floor().max(0.0) as u32
}

/// One measured inequality.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub check: &'static str,
    pub measured: f64,
    pub bound: f64,
}

/// Everything measured in one frame.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameAudit {
    /// Heap numbering: the root is 1, children of `f` are `2f` and `2f+1`.
    pub frame: u64,
    pub tree_node: usize,
    pub n: usize,
    pub slots: usize,
    pub w: u32,
    pub k: usize,
    pub bbox: String,
    pub base: bool,
    /// `max_i ceil(c n^alpha / S_i)` on this frame's channel.
    pub load: u64,
    /// `ceil(8 e mu 4^w c n^(alpha - 1 + 1/d))`.
    pub load_closed_form: u64,
    pub checks: Vec<CheckRecord>,
}

impl FrameAudit {
    fn check(&mut self, check: &'static str, measured: f64, bound: f64) -> Result<()> {
        self.checks.push(CheckRecord { check, measured, bound });
        if measured > bound + 1e-9 {
            return Err(self.violation(check, format!("measured {measured} exceeds {bound}")));
        }
        Ok(())
    }

    fn violation(&self, check: &'static str, detail: String) -> Error {
        Error::StepViolation { check, frame: self.frame, n: self.n, bbox: self.bbox.clone(), w: self.w, detail }
    }
}

/// Audit log of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct SbeAudit {
    pub config: SbeConfig,
    /// Sorted by frame id.
    pub frames: Vec<FrameAudit>,
    pub congestion: u32,
    pub dilation: usize,
    /// Largest per-edge sum of the congestion of all routed pieces.
    pub piece_congestion: u32,
}

impl SbeAudit {
    pub fn check_count(&self) -> usize {
        self.frames.iter().map(|f| f.checks.len()).sum()
    }

    /// Number of recorded checks whose measurement exceeds the bound; zero
    /// for any run that returned.
    pub fn violations(&self) -> usize {
        self.frames.iter().flat_map(|f| &f.checks).filter(|c| c.measured > c.bound + 1e-9).count()
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# mu={:.4} alpha~={:.4} c={:.4} beta={:.4} base-threshold={:.2}",
            self.config.mu,
            self.config.alpha_tilde,
            self.config.c,
            self.config.beta,
            self.config.base_threshold()
        );
        let _ = writeln!(s, "frame\tn\tw\tk\t|X|\tD\tD-closed\tbox\tchecks");
        for f in &self.frames {
            let checks: Vec<String> =
                f.checks.iter().map(|c| format!("{}={}/{}", c.check, c.measured, c.bound)).collect();
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}{}\t{}",
                f.frame,
                f.n,
                f.w,
                f.k,
                f.slots,
                f.load,
                f.load_closed_form,
                f.bbox,
                if f.base { " base" } else { "" },
                checks.join(" ")
            );
        }
        let _ = writeln!(
            s,
            "# congestion={} dilation={} piece-congestion={}",
            self.congestion, self.dilation, self.piece_congestion
        );
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SbeOutput {
    pub embedding: Embedding,
    pub audit: SbeAudit,
}

struct Ctx<'a> {
    g: &'a GuestGraph,
    tree: &'a DecompositionTree,
    cfg: &'a SbeConfig,
}

#[derive(Default)]
struct FrameOut {
    phi: Vec<(NodeId, GridNode)>,
    rho: Vec<(EdgeId, Image)>,
    /// Channel end of every external slot.
    psi: HashMap<EdgeId, GridNode>,
    /// Simple path from the slot's endpoint to its channel end.
    sigma: HashMap<EdgeId, Vec<GridNode>>,
    w: u32,
    k: usize,
    audits: Vec<FrameAudit>,
    pieces: CongestionMap,
}

fn add_pieces<'a>(map: &mut CongestionMap, walks: impl IntoIterator<Item = &'a Vec<GridNode>>) -> u32 {
    let images: Vec<Image> = walks.into_iter().map(|w| Image::from_walk(w)).collect();
    let local = congestion_map(&images);
    let max = local.values().copied().max().unwrap_or(0);
    for (e, c) in local {
        *map.entry(e).or_default() += c;
    }
    max
}

fn merge(into: &mut CongestionMap, from: CongestionMap) {
    for (e, c) in from {
        *into.entry(e).or_default() += c;
    }
}

fn is_walk(w: &[GridNode], from: &GridNode, to: &GridNode) -> bool {
    w.first() == Some(from) && w.last() == Some(to) && w.windows(2).all(|p| GridEdge::between(&p[0], &p[1]).is_some())
}

impl Ctx<'_> {
    fn inner(&self, t: usize, e: EdgeId) -> NodeId {
        let (u, v) = self.g.edge(e);
        if self.tree.node(t).nodes.binary_search(&u).is_ok() {
            u
        } else {
            v
        }
    }

    fn route(&self, lat: &Lattice, reqs: &[Request], order: &[usize]) -> Result<Vec<Vec<GridNode>>> {
        Ok(route_walks(lat, reqs, order, Scheme::General, self.cfg.exec)?.iter().map(|w| loop_erase(w)).collect())
    }

    fn frame(&self, t: usize, m: SubGrid, u: Vec<GridNode>, id: u64) -> Result<FrameOut> {
        let node = self.tree.node(t);
        let n = node.nodes.len();
        let cfg = self.cfg;
        let w = channel_config_w(n, cfg);
        let cf = ChannelPoints::new(&m, w);
        let k = if cf.is_empty() { m.longest_axis() } else { cf.direction() };
        let mut audit = FrameAudit {
            frame: id,
            tree_node: t,
            n,
            slots: node.external.len(),
            w,
            k,
            bbox: m.box_string(),
            base: false,
            load: if cf.is_empty() { 0 } else { cf.load_bound(cfg.c, n, cfg.alpha) },
            load_closed_form: (8.0
                * std::f64::consts::E
                * cfg.mu
                * 4f64.powi(w as i32)
                * cfg.c
                * (n as f64).powf(cfg.alpha - 1.0 + 1.0 / cfg.d as f64)
                - 1e-9)
                .ceil() as u64,
            checks: Vec::new(),
        };
        if u.len() != n {
            return Err(audit.violation("designated-size", format!("{} designated nodes for {n} guest nodes", u.len())));
        }
        audit.check("slot-count", node.external.len() as f64, cfg.slot_bound(n))?;
        if (m.max_side() as f64) <= cfg.base_threshold() || node.is_leaf() {
            audit.base = true;
            self.base(t, m, u, cf, audit)
        } else {
            self.split(t, m, u, cf, audit)
        }
    }

    fn base(&self, t: usize, m: SubGrid, u: Vec<GridNode>, cf: ChannelPoints, mut audit: FrameAudit) -> Result<FrameOut> {
        let node = self.tree.node(t);
        let cfg = self.cfg;
        let x = &node.external;
        let k = audit.k;
        let mut out = FrameOut { w: audit.w, k, ..Default::default() };

        // node map
        let layout = bisection_layout(self.tree, t, u);
        out.phi = if x.is_empty() {
            layout
        } else {
            let mut home = layout;
            home.sort_by_key(|p| p.0);
            let home: Vec<GridNode> = home.into_iter().map(|p| p.1).collect();
            let mut mult = vec![0usize; node.nodes.len()];
            for &e in x {
                let s = self.inner(t, e);
                mult[node.nodes.binary_search(&s).expect("inner endpoint")] += 1;
            }
            let (map, spread) = spread_node_map(&node.nodes, &mult, &home, k, cfg.max_degree);
            audit.check("degree-spread", spread.max_load as f64, spread.bound)?;
            map
        };
        let local_phi: Vec<GridNode> = {
            let mut p = out.phi.clone();
            p.sort_by_key(|q| q.0);
            p.into_iter().map(|q| q.1).collect()
        };

        // internal edges
        let mut internal: Vec<EdgeId> = Vec::new();
        for &v in &node.nodes {
            for &(o, e) in self.g.incident(v) {
                if v < o && node.nodes.binary_search(&o).is_ok() {
                    internal.push(e);
                }
            }
        }
        internal.sort_unstable();
        let local = |v: NodeId| node.nodes.binary_search(&v).expect("member");
        let lg = GuestGraph::new(
            node.nodes.len(),
            internal.iter().map(|&e| {
                let (a, b) = self.g.edge(e);
                (local(a), local(b))
            }),
        )?;
        let images = route_guest_edges(&lg, &m, &local_phi, cfg.exec)?;
        let map = congestion_map(&images);
        let rho_bound = 2 * lg.max_degree().div_ceil(2) as u64 * u64::from(m.max_side());
        audit.check("base-edge-congestion", f64::from(map.values().copied().max().unwrap_or(0)), rho_bound as f64)?;
        merge(&mut out.pieces, map);
        out.rho = internal.into_iter().zip(images).collect();

        // slot routes
        if !x.is_empty() {
            audit.check("channel-nonempty", -(cf.len() as f64), -1.0)?;
            let psi = uniform_mapping(x.len(), &cf, &[k])?;
            audit.check("uniformity", fiber_load(&psi, k) as f64, x.len().div_ceil(cf.section(k) as usize) as f64)?;
            let at: HashMap<NodeId, &GridNode> = out.phi.iter().map(|(s, v)| (*s, v)).collect();
            let reqs: Vec<Request> = x
                .iter()
                .zip(&psi)
                .map(|(&e, p)| Request { id: e as u64, source: at[&self.inner(t, e)].clone(), target: p.clone() })
                .collect();
            let r = RoutingGraph::from_requests(reqs.clone())?;
            let proj = r.project(k)?;
            let pq = proj.max_out().max(proj.max_in()) as f64;
            let walks = self.route(&Lattice::of_subgrid(&m), &reqs, &sorted_order(m.spec().dims(), k))?;
            let measured = add_pieces(&mut out.pieces, &walks);
            audit.check("base-slot-congestion", f64::from(measured), 2.0 * (m.aspect_ratio() * pq - 1e-9).ceil())?;
            for ((&e, p), walk) in x.iter().zip(psi).zip(walks) {
                out.psi.insert(e, p);
                out.sigma.insert(e, walk);
            }
        }
        out.audits.push(audit);
        Ok(out)
    }

    fn split(&self, t: usize, m: SubGrid, u: Vec<GridNode>, cf: ChannelPoints, mut audit: FrameAudit) -> Result<FrameOut> {
        let node = self.tree.node(t);
        let cfg = self.cfg;
        let (w, k) = (audit.w, audit.k);
        let [a, b] = node.children.expect("split frames have children");
        let kids = [a, b];
        let sizes = kids.map(|c| self.tree.node(c).nodes.len());
        let h = m.longest_axis();
        let part = partition_host(&m, &u, sizes[0], sizes[1], h)
            .map_err(|e| audit.violation("host-partition", e.to_string()))?;
        for (asp, min_side) in part.shape() {
            audit.check("partition-aspect", asp, cfg.mu)?;
            // min side > 2d, recorded as -side <= -(2d + 1)
            audit.check("partition-min-side", -f64::from(min_side), -(2.0 * cfg.d as f64 + 1.0))?;
        }
        let child_cf = [0, 1].map(|j| ChannelPoints::new(&part.hosts[j], w));
        for c in &child_cf {
            // recorded as -|points| <= -1
            audit.check("channel-nonempty", -(c.len() as f64), -1.0)?;
        }
        let HostPartition { hosts: [m1, m2], designated: [u1, u2], .. } = part;
        let hosts = [m1.clone(), m2.clone()];
        let id = audit.frame;
        let (o1, o2) = par::join(cfg.exec, || self.frame(a, m1, u1, 2 * id), || self.frame(b, m2, u2, 2 * id + 1));
        let kid_out = [o1?, o2?];

        // child channel ends onto this frame's level
        let mut lifted: [HashMap<EdgeId, GridNode>; 2] = Default::default();
        let mut lift_walks: [HashMap<EdgeId, Vec<GridNode>>; 2] = Default::default();
        let mut pieces = CongestionMap::new();
        let mut child_load = 0u64;
        for j in 0..2 {
            let xj = &self.tree.node(kids[j]).external;
            let (wj, kj) = (kid_out[j].w, kid_out[j].k);
            let psit = uniform_mapping(xj.len(), &child_cf[j], &[k, kj])?;
            for axis in [k, kj] {
                let want = xj.len().div_ceil(child_cf[j].section(axis) as usize);
                audit.check("uniformity", fiber_load(&psit, axis) as f64, want as f64)?;
            }
            let comb = ChannelPoints::combined(&hosts[j], wj, w);
            let own = ChannelPoints::new(&hosts[j], wj);
            let order = sorted_order(&own.sides(), kj);
            let reqs: Vec<Request> = xj
                .iter()
                .zip(&psit)
                .map(|(&e, p)| Request { id: e as u64, source: kid_out[j].psi[&e].clone(), target: p.clone() })
                .collect();
            let walks = self.route(&comb.lattice()?, &reqs, &order)?;
            let measured = add_pieces(&mut pieces, &walks);
            let load = child_cf[j].load_bound(cfg.c, sizes[j], cfg.alpha);
            child_load = child_load.max(load);
            audit.check("child-channel-congestion", f64::from(measured), 2.0 * load as f64)?;
            for ((&e, p), walk) in xj.iter().zip(psit).zip(walks) {
                lifted[j].insert(e, p);
                lift_walks[j].insert(e, walk);
            }
        }

        // cut edges and slots through this frame's channel
        let x = &node.external;
        let psi = uniform_mapping(x.len(), &cf, &[k])?;
        if !x.is_empty() {
            audit.check("uniformity", fiber_load(&psi, k) as f64, x.len().div_ceil(cf.section(k) as usize) as f64)?;
        }
        let side_of = |e: EdgeId| if lifted[0].contains_key(&e) { 0 } else { 1 };
        let mut reqs: Vec<Request> = node
            .cut
            .iter()
            .map(|&e| Request { id: e as u64, source: lifted[0][&e].clone(), target: lifted[1][&e].clone() })
            .collect();
        reqs.extend(
            x.iter().zip(&psi).map(|(&e, p)| Request { id: e as u64, source: lifted[side_of(e)][&e].clone(), target: p.clone() }),
        );
        let walks = if reqs.is_empty() {
            Vec::new()
        } else {
            self.route(&cf.lattice()?, &reqs, &sorted_order(&cf.sides(), k))?
        };
        let measured = add_pieces(&mut pieces, &walks);
        let own_load = audit.load;
        audit.check(
            "cut-channel-congestion",
            f64::from(measured),
            2.0 * (2 * child_load).max(child_load + own_load) as f64,
        )?;
        let joined: HashMap<EdgeId, Vec<GridNode>> = reqs.iter().map(|r| r.id as usize).zip(walks).collect();

        // assemble
        let [k1, k2] = kid_out;
        let mut out = FrameOut { w, k, ..Default::default() };
        for o in [&k1, &k2] {
            out.phi.extend(o.phi.iter().cloned());
        }
        let at: HashMap<NodeId, &GridNode> = out.phi.iter().map(|(s, v)| (*s, v)).collect();
        let mut rho = Vec::with_capacity(node.cut.len());
        for &e in &node.cut {
            let back = |walk: &[GridNode]| walk.iter().rev().cloned().collect::<Vec<_>>();
            let b2 = back(&lift_walks[1][&e]);
            let s2 = back(&k2.sigma[&e]);
            let walk = loop_erase(&concat_walks([
                k1.sigma[&e].as_slice(),
                lift_walks[0][&e].as_slice(),
                joined[&e].as_slice(),
                b2.as_slice(),
                s2.as_slice(),
            ]));
            let (p, q) = (at[&self.inner(a, e)], at[&self.inner(b, e)]);
            if !is_walk(&walk, p, q) {
                return Err(audit.violation("cut-edge-concatenation", format!("guest edge {e} does not join {p} and {q}")));
            }
            rho.push((e, Image::from_walk(&walk)));
        }
        for (&e, p) in x.iter().zip(psi) {
            let j = side_of(e);
            let from = &kid_out_sigma(&k1, &k2, j)[&e];
            let walk = loop_erase(&concat_walks([from.as_slice(), lift_walks[j][&e].as_slice(), joined[&e].as_slice()]));
            let s = at[&self.inner(t, e)];
            if !is_walk(&walk, s, &p) {
                return Err(audit.violation("slot-concatenation", format!("slot {e} does not reach its channel end")));
            }
            out.psi.insert(e, p);
            out.sigma.insert(e, walk);
        }
        out.rho = rho;
        for o in [k1, k2] {
            out.rho.extend(o.rho);
            out.audits.extend(o.audits);
            merge(&mut out.pieces, o.pieces);
        }
        merge(&mut out.pieces, pieces);
        out.audits.push(audit);
        Ok(out)
    }
}

fn kid_out_sigma<'a>(k1: &'a FrameOut, k2: &'a FrameOut, j: usize) -> &'a HashMap<EdgeId, Vec<GridNode>> {
    if j == 0 {
        &k1.sigma
    } else {
        &k2.sigma
    }
}

/// Embeds `g` into `m0` following `tree`.
///
/// `m0` must be a minimal host: at least `N` nodes, and no proper subgrid
/// with `N` nodes. The returned audit lists every frame with the checks it
/// passed.
pub fn sbe_embed(g: &GuestGraph, tree: &DecompositionTree, m0: &SubGrid, cfg: &SbeConfig) -> Result<SbeOutput> {
    let n = g.node_count();
    if cfg.d != m0.dim() || cfg.d < 2 {
        return Err(Error::InvalidParameter(format!(
            "configuration is for d = {} but the host has dimension {} (at least 2 needed)",
            cfg.d,
            m0.dim()
        )));
    }
    if n == 0 || tree.is_empty() || tree.root().nodes.len() != n {
        return Err(Error::InvalidParameter("decomposition tree does not cover the guest".into()));
    }
    if !is_minimal_host(m0.spec(), n) {
        return Err(Error::InvalidParameter(format!(
            "host {} is not minimal for {n} nodes; shrink it first",
            m0.spec()
        )));
    }
    if !tree.root().external.is_empty() {
        return Err(Error::InvalidParameter("the root of the tree has external edges".into()));
    }
    let u = initial_designated_set(m0, n)?;
    let ctx = Ctx { g, tree, cfg };
    let out = ctx.frame(0, m0.clone(), u, 1)?;

    let mut phi: Vec<Option<GridNode>> = vec![None; n];
    for (s, v) in out.phi {
        phi[s] = Some(v);
    }
    let phi: Vec<GridNode> = phi
        .into_iter()
        .enumerate()
        .map(|(s, v)| v.ok_or_else(|| Error::InvalidParameter(format!("guest node {s} was never placed"))))
        .collect::<Result<_>>()?;
    let mut rho: Vec<Option<Image>> = vec![None; g.edge_count()];
    for (e, img) in out.rho {
        rho[e] = Some(img);
    }
    let rho: Vec<Image> = rho
        .into_iter()
        .enumerate()
        .map(|(e, i)| i.ok_or_else(|| Error::InvalidImage { edge: e, msg: "never routed".into() }))
        .collect::<Result<_>>()?;
    let host = if m0.origin().iter().all(|&o| o == 0) {
        m0.spec().clone()
    } else {
        GridSpec::new((0..m0.dim()).map(|i| m0.hi(i)).collect())?
    };
    let embedding = Embedding::new(host, phi, g.edges().to_vec(), rho)?;
    let measured = embedding.measure();
    for (e, c) in embedding.congestion_map() {
        let total = out.pieces.get(&e).copied().unwrap_or(0);
        if c > total {
            return Err(Error::StepViolation {
                check: "congestion-accounting",
                frame: 1,
                n,
                bbox: m0.box_string(),
                w: out.w,
                detail: format!("edge {e} carries {c} paths but its pieces only {total}"),
            });
        }
    }
    let mut frames = out.audits;
    frames.sort_by_key(|f| f.frame);
    let audit = SbeAudit {
        config: *cfg,
        frames,
        congestion: measured.congestion,
        dilation: measured.dilation,
        piece_congestion: out.pieces.values().copied().max().unwrap_or(0),
    };
    Ok(SbeOutput { embedding, audit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{build_decomposition_tree, CentroidOracle, GreedyBisectionOracle, HyperplaneOracle};

    fn cbt(n: usize) -> GuestGraph {
        GuestGraph::new(n, (1..n).map(|i| ((i - 1) / 2, i))).unwrap()
    }

    fn grid2d(r: usize, c: usize) -> GuestGraph {
        let mut e = Vec::new();
        for i in 0..r {
            for j in 0..c {
                if j + 1 < c {
                    e.push((i * c + j, i * c + j + 1));
                }
                if i + 1 < r {
                    e.push((i * c + j, (i + 1) * c + j));
                }
            }
        }
        GuestGraph::new(r * c, e).unwrap()
    }

    fn run(g: &GuestGraph, oracle: &dyn crate::decompose::NodeSeparatorOracle, d: usize) -> SbeOutput {
        let t = build_decomposition_tree(g, oracle, 0.1).unwrap();
        let host = cube_host(g.node_count(), d).unwrap();
        let cfg = SbeConfig::for_instance(g, &t, &host).unwrap();
        sbe_embed(g, &t, &SubGrid::whole(&host), &cfg).unwrap()
    }

    fn config(alpha: f64, d: usize, beta: f64) -> SbeConfig {
        SbeConfig::new(d, alpha, 1.0, beta, 1.0, 3).unwrap()
    }

    #[test]
    fn level_formula() {
        // (1 - 0 - 1/2) * 20 = 10, log2(mu / (1/2)) with mu = 4/7 + e + 5/4
        let cfg = config(0.0, 2, 0.5);
        let mu = 4.0 / 7.0 + std::f64::consts::E + 1.25;
        assert!((cfg.mu - mu).abs() < 1e-12);
        let expect = ((10.0 - (2.0 * mu).log2()) / 2.0).floor() as u32;
        assert_eq!(expect, 3);
        assert_eq!(channel_config_w(1 << 20, &cfg), 3);
        assert_eq!(channel_config_w(1, &cfg), 0);
        let dense = config(0.9, 2, 0.5);
        assert!((1..30).all(|p| channel_config_w(1 << p, &dense) == 0));
    }

    #[test]
    fn mu_exceeds_four() {
        for b in [0.5, 0.6, 0.7, 0.8, 0.9, 0.99] {
            assert!(SbeConfig::mu_floor(b) > 4.0);
        }
        assert!(SbeConfig::new(2, 0.0, 1.0, 0.4, 1.0, 3).is_err());
        assert!(SbeConfig::new(2, 1.0, 1.0, 0.5, 1.0, 3).is_err());
    }

    #[test]
    fn single_node() {
        let g = GuestGraph::new(1, []).unwrap();
        let out = run(&g, &CentroidOracle, 2);
        assert_eq!(out.embedding.phi.len(), 1);
        assert_eq!(out.audit.congestion, 0);
    }

    #[test]
    fn rejects_oversized_host() {
        let g = cbt(15);
        let t = build_decomposition_tree(&g, &CentroidOracle, 0.1).unwrap();
        let host: GridSpec = "8x8".parse().unwrap();
        let cfg = SbeConfig::for_instance(&g, &t, &host).unwrap();
        assert!(sbe_embed(&g, &t, &SubGrid::whole(&host), &cfg).is_err());
    }

    #[test]
    fn base_frame_only() {
        let g = cbt(1023);
        let out = run(&g, &CentroidOracle, 2);
        assert_eq!(out.audit.frames.len(), 1);
        assert!(out.audit.frames[0].base);
        out.embedding.measure_checked().unwrap();
    }

    #[test]
    fn split_frames_in_two_dimensions() {
        let g = cbt(4095);
        let out = run(&g, &CentroidOracle, 2);
        assert!(out.audit.frames.len() > 1);
        assert_eq!(out.audit.violations(), 0);
        let m = out.embedding.measure_checked().unwrap();
        assert_eq!(m.congestion, out.audit.congestion);
        assert!(out.audit.piece_congestion >= out.audit.congestion);
    }

    #[test]
    fn grid_guest_with_hyperplanes() {
        let g = grid2d(48, 48);
        let out = run(&g, &HyperplaneOracle::for_guest(&g).unwrap(), 2);
        out.embedding.measure_checked().unwrap();
    }

    #[test]
    fn sequential_matches_parallel() {
        let g = cbt(2047);
        let t = build_decomposition_tree(&g, &GreedyBisectionOracle, 0.1).unwrap();
        let host = cube_host(2047, 3).unwrap();
        let cfg = SbeConfig::for_instance(&g, &t, &host).unwrap();
        let m0 = SubGrid::whole(&host);
        let a = sbe_embed(&g, &t, &m0, &cfg.with_exec(Exec::Sequential)).unwrap();
        let b = sbe_embed(&g, &t, &m0, &cfg.with_exec(Exec::Parallel)).unwrap();
        assert_eq!(a.embedding.phi, b.embedding.phi);
        assert_eq!(a.audit.frames, b.audit.frames);
        assert_eq!(a.audit.congestion, b.audit.congestion);
        assert_eq!(a.embedding.rho, b.embedding.rho);
    }
}
