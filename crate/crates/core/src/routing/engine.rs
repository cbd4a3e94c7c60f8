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


//! Slice-recursive routing on a lattice.
//!
//! A [`Lattice`] is a product of sorted coordinate lists, one per axis. The
//! router works in local 1-based indices into those lists and only at the
//! end expands every unit step into the straight run of concrete grid edges
//! between two consecutive lattice coordinates. For a plain subgrid the
//! lists are contiguous and the expansion is the identity; for channels
//! the runs pass through subdivision nodes.

use std::collections::{BTreeMap, HashMap};

use super::coloring;
use crate::error::{Error, Result};
use crate::grid::{Coords, GridNode, Request, SubGrid};
use crate::par::{self, Exec};

/// How requests are split among the slices of the leading axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Colour the projection along the leading axis; colour `c` uses slice
    /// `c + 1`. Requires a 1-1 routing graph.
    Permutation,
    /// Balanced split for `p`-`q` routing graphs: by rank in two
    /// dimensions, by round-robin colour classes of the projection along
    /// the two leading axes otherwise.
    General,
}

/// Product of per-axis coordinate lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    coords: Vec<Vec<u32>>,
}

impl Lattice {
    /// Each list must be strictly increasing and non-empty.
    pub fn new(coords: Vec<Vec<u32>>) -> Result<Self> {
        for (axis, c) in coords.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::EmptyChannel(format!("no lattice coordinates along axis {axis}")));
            }
            if c.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter(format!("axis {axis} coordinates not increasing")));
            }
        }
        Ok(Lattice { coords })
    }

    pub fn of_subgrid(m: &SubGrid) -> Self {
        Lattice { coords: (0..m.dim()).map(|i| (m.lo(i)..=m.hi(i)).collect()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self, axis: usize) -> &[u32] {
        &self.coords[axis]
    }

    /// Number of lattice coordinates along each axis.
    pub fn dims(&self) -> Vec<u32> {
        self.coords.iter().map(|c| c.len() as u32).collect()
    }

    pub fn point_count(&self) -> u64 {
        self.coords.iter().map(|c| c.len() as u64).product()
    }

    pub fn contains(&self, v: &GridNode) -> bool {
        self.to_local(v).is_some()
    }

    fn to_local(&self, v: &GridNode) -> Option<Coords> {
        if v.dim() != self.dim() {
            return None;
        }
        v.coords()
            .iter()
            .zip(&self.coords)
            .map(|(x, list)| list.binary_search(x).ok().map(|i| i as u32 + 1))
            .collect()
    }

    fn expand(&self, walk: &[Coords]) -> Vec<GridNode> {
        let concrete =
            |c: &Coords| GridNode::new(c.iter().enumerate().map(|(i, &x)| self.coords[i][x as usize - 1]));
        let mut out = Vec::with_capacity(walk.len());
        out.push(concrete(&walk[0]));
        for pair in walk.windows(2) {
            let axis = (0..self.dim()).find(|&i| pair[0][i] != pair[1][i]).expect("walk repeats a node");
            let from = self.coords[axis][pair[0][axis] as usize - 1];
            let to = self.coords[axis][pair[1][axis] as usize - 1];
            let last = out.last().unwrap().clone();
            if from < to {
                out.extend((from + 1..=to).map(|x| last.with_coord(axis, x)));
            } else {
                out.extend((to..from).rev().map(|x| last.with_coord(axis, x)));
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
struct Job {
    id: u64,
    src: Coords,
    dst: Coords,
}

/// Routes `requests` on `lat`, peeling axes in `order`. Returns one concrete
/// walk per request, in request order. Walks may revisit nodes.
pub(crate) fn route_walks(
    lat: &Lattice,
    requests: &[Request],
    order: &[usize],
    scheme: Scheme,
    exec: Exec,
) -> Result<Vec<Vec<GridNode>>> {
    let jobs = requests
        .iter()
        .map(|r| {
            let local = |v: &GridNode| {
                lat.to_local(v)
                    .ok_or_else(|| Error::RoutingPrecondition(format!("request {} endpoint {v} is off the lattice", r.id)))
            };
            Ok(Job { id: r.id, src: local(&r.source)?, dst: local(&r.target)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let dims = lat.dims();
    let mut by_id: HashMap<u64, Vec<Coords>> = recurse(&dims, jobs, order, scheme, exec).into_iter().collect();
    Ok(requests.iter().map(|r| lat.expand(&by_id.remove(&r.id).expect("every request is routed"))).collect())
}

/// Slice chosen for each request in the first stage of routing along
/// `order[0]`, as a 1-based lattice index.
pub(crate) fn first_stage(lat: &Lattice, requests: &[Request], order: &[usize], scheme: Scheme) -> Result<Vec<u32>> {
    let jobs = requests
        .iter()
        .map(|r| match (lat.to_local(&r.source), lat.to_local(&r.target)) {
            (Some(src), Some(dst)) => Ok(Job { id: r.id, src, dst }),
            _ => Err(Error::RoutingPrecondition(format!("request {} is off the lattice", r.id))),
        })
        .collect::<Result<Vec<_>>>()?;
    if order.len() < 2 {
        return Ok(jobs.iter().map(|j| j.src[order[0]]).collect());
    }
    Ok(assign_slices(&lat.dims(), &jobs, order, scheme))
}

fn line(from: &Coords, to: &Coords, axis: usize) -> Vec<Coords> {
    let (a, b) = (from[axis], to[axis]);
    let step = |x: u32| {
        let mut c = from.clone();
        c[axis] = x;
        c
    };
    if a <= b {
        (a..=b).map(step).collect()
    } else {
        (b..=a).rev().map(step).collect()
    }
}

fn recurse(dims: &[u32], jobs: Vec<Job>, order: &[usize], scheme: Scheme, exec: Exec) -> Vec<(u64, Vec<Coords>)> {
    let mut out = Vec::with_capacity(jobs.len());
    let mut live = Vec::with_capacity(jobs.len());
    for j in jobs {
        if j.src == j.dst {
            out.push((j.id, vec![j.src]));
        } else {
            live.push(j);
        }
    }
    if live.is_empty() {
        return out;
    }
    let a = order[0];
    if order.len() == 1 {
        out.extend(live.into_iter().map(|j| (j.id, line(&j.src, &j.dst, a))));
        return out;
    }

    let slices = assign_slices(dims, &live, order, scheme);
    let mut groups: BTreeMap<u32, Vec<Job>> = BTreeMap::new();
    for (j, &s) in live.iter().zip(&slices) {
        let mut src = j.src.clone();
        let mut dst = j.dst.clone();
        src[a] = s;
        dst[a] = s;
        groups.entry(s).or_default().push(Job { id: j.id, src, dst });
    }
    let groups: Vec<Vec<Job>> = groups.into_values().collect();
    let inner = par::map(exec, &groups, |g| recurse(dims, g.clone(), &order[1..], scheme, exec));
    let mut sub: HashMap<u64, Vec<Coords>> = inner.into_iter().flatten().collect();

    for (j, &s) in live.iter().zip(&slices) {
        let mut walk = line(&j.src, &{
            let mut c = j.src.clone();
            c[a] = s;
            c
        }, a);
        let mid = sub.remove(&j.id).unwrap();
        walk.extend_from_slice(&mid[1..]);
        let mut landing = j.dst.clone();
        landing[a] = s;
        walk.extend_from_slice(&line(&landing, &j.dst, a)[1..]);
        out.push((j.id, walk));
    }
    out
}

fn drop_axes(c: &Coords, axes: &[usize]) -> Coords {
    c.iter().enumerate().filter(|(i, _)| !axes.contains(i)).map(|(_, &x)| x).collect()
}

fn intern(keys: impl Iterator<Item = Coords>) -> (Vec<usize>, usize) {
    let mut ids: HashMap<Coords, usize> = HashMap::new();
    let v = keys
        .map(|k| {
            let n = ids.len();
            *ids.entry(k).or_insert(n)
        })
        .collect();
    (v, ids.len())
}

/// Colours ordered by the detour their slice costs `job`, nearest to the
/// source first on ties; slice `s` owns colours `s, s + la, ...`.
fn by_detour(job: &Job, a: usize, la: usize, per_slice: usize) -> Vec<usize> {
    let (x, y) = (job.src[a] as usize - 1, job.dst[a] as usize - 1);
    let mut slices: Vec<usize> = (0..la).collect();
    slices.sort_by_key(|&s| (x.abs_diff(s) + s.abs_diff(y), x.abs_diff(s), s));
    (0..per_slice).flat_map(|t| slices.iter().map(move |&s| s + la * t)).collect()
}

/// Slice (1-based index along `order[0]`) for every job.
fn assign_slices(dims: &[u32], jobs: &[Job], order: &[usize], scheme: Scheme) -> Vec<u32> {
    let a = order[0];
    let la = dims[a] as usize;
    match scheme {
        Scheme::Permutation => {
            let (left, nl) = intern(jobs.iter().map(|j| drop_axes(&j.src, &[a])));
            let (right, nr) = intern(jobs.iter().map(|j| drop_axes(&j.dst, &[a])));
            let edges: Vec<(usize, usize)> = left.into_iter().zip(right).collect();
            let k = coloring::max_degree(nl, nr, &edges).max(la);
            // nearest slices first: staying between source and target adds no detour
            let colors = coloring::color_with(nl, nr, &edges, k, |e| by_detour(&jobs[e], a, la, 1));
            debug_assert!(colors.iter().all(|&c| c < la), "routing graph is not 1-1");
            colors.into_iter().map(|c| c as u32 + 1).collect()
        }
        Scheme::General if order.len() == 2 => {
            // contiguous ranks keep each slice at ceil(m / l_a) requests
            let m = jobs.len();
            let mut idx: Vec<usize> = (0..m).collect();
            idx.sort_by_key(|&i| (jobs[i].src[a], jobs[i].dst[a], jobs[i].id));
            let mut slices = vec![0u32; m];
            for (rank, &i) in idx.iter().enumerate() {
                slices[i] = (rank * la / m) as u32 + 1;
            }
            slices
        }
        Scheme::General => {
            let b = order[1];
            let (left, nl) = intern(jobs.iter().map(|j| drop_axes(&j.src, &[a, b])));
            let (right, nr) = intern(jobs.iter().map(|j| drop_axes(&j.dst, &[a, b])));
            let edges: Vec<(usize, usize)> = left.into_iter().zip(right).collect();
            let per_slice = coloring::max_degree(nl, nr, &edges).div_ceil(la);
            let k = la * per_slice;
            let colors = coloring::color_with(nl, nr, &edges, k, |e| by_detour(&jobs[e], a, la, per_slice));
            // colour classes go round-robin to slices
            colors.into_iter().map(|c| (c % la) as u32 + 1).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_expansion_fills_runs() {
        let lat = Lattice::new(vec![vec![3, 5, 7], vec![2, 3]]).unwrap();
        let walk = vec![Coords::from_slice(&[1, 1]), Coords::from_slice(&[2, 1]), Coords::from_slice(&[2, 2])];
        let nodes = lat.expand(&walk);
        let want: Vec<GridNode> =
            [[3, 2], [4, 2], [5, 2], [5, 3]].iter().map(|c| GridNode::from_slice(c)).collect();
        assert_eq!(nodes, want);
        assert!(lat.contains(&GridNode::from_slice(&[7, 3])));
        assert!(!lat.contains(&GridNode::from_slice(&[4, 3])));
        assert!(Lattice::new(vec![vec![]]).is_err());
    }

    #[test]
    fn rank_split_respects_cap() {
        let dims = [3u32, 4];
        let jobs: Vec<Job> = (0..7)
            .map(|i| Job { id: i, src: Coords::from_slice(&[1, 1 + (i as u32 % 4)]), dst: Coords::from_slice(&[3, 2]) })
            .collect();
        let s = assign_slices(&dims, &jobs, &[0, 1], Scheme::General);
        for slice in 1..=3 {
            assert!(s.iter().filter(|&&x| x == slice).count() <= 3);
        }
    }
}
