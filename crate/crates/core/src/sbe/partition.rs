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


//! Designated node sets and the split of a host subgrid into two slabs.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::grid::{GridNode, GridSpec, SubGrid};

/// Interior of `m` plus its lexicographically smallest boundary nodes,
/// `n` nodes in total, in lexicographic order.
pub fn initial_designated_set(m: &SubGrid, n: usize) -> Result<Vec<GridNode>> {
    let interior = m.interior_count() as usize;
    if n < interior || n as u64 > m.node_count() {
        return Err(Error::InvalidParameter(format!(
            "{} has {interior} interior nodes and {} in total; cannot designate {n}",
            m.box_string(),
            m.node_count()
        )));
    }
    let mut boundary_left = n - interior;
    Ok(m.nodes()
        .filter(|v| {
            if m.is_interior(v) {
                true
            } else if boundary_left > 0 {
                boundary_left -= 1;
                true
            } else {
                false
            }
        })
        .collect())
}

/// True when no proper subgrid of `spec` holds `n` nodes.
pub fn is_minimal_host(spec: &GridSpec, n: usize) -> bool {
    let total = spec.node_count();
    total >= n as u64
        && (0..spec.dim()).all(|i| {
            let l = u64::from(spec.side(i));
            (l - 1) * (total / l) < n as u64
        })
}

/// Shrinks `spec` one unit at a time, longest side first, until it is a
/// minimal host for `n` nodes.
pub fn minimal_host(spec: &GridSpec, n: usize) -> Result<GridSpec> {
    if spec.node_count() < n as u64 {
        return Err(Error::GuestTooLarge { guest: n, host: spec.node_count() });
    }
    let mut dims = spec.dims().to_vec();
    loop {
        let total: u64 = dims.iter().map(|&l| u64::from(l)).product();
        let mut axes: Vec<usize> = (0..dims.len()).collect();
        axes.sort_by_key(|&i| (std::cmp::Reverse(dims[i]), i));
        let shrink = axes.into_iter().find(|&i| {
            let l = u64::from(dims[i]);
            (l - 1) * (total / l) >= n as u64
        });
        match shrink {
            Some(i) => dims[i] -= 1,
            None => return GridSpec::new(dims),
        }
    }
}

/// Smallest `d`-dimensional host with near-equal sides holding `n` nodes,
/// shrunk to a minimal one.
pub fn cube_host(n: usize, d: usize) -> Result<GridSpec> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let mut side = (n.max(1) as f64).powf(1.0 / d as f64).floor().max(1.0) as u32;
    while u64::from(side).pow(d as u32) < n as u64 {
        side += 1;
    }
    minimal_host(&GridSpec::new(vec![side; d])?, n.max(1))
}

/// Result of splitting a host across its longest side.
#[derive(Clone, Debug, PartialEq)]
pub struct HostPartition {
    /// Coordinate of the shared hyperplane.
    pub cut: u32,
    pub hosts: [SubGrid; 2],
    pub designated: [Vec<GridNode>; 2],
}

impl HostPartition {
    /// Aspect ratio and minimum side of each part, the quantities the split
    /// has to keep in range.
    pub fn shape(&self) -> [(f64, u32); 2] {
        [0, 1].map(|j| (self.hosts[j].aspect_ratio(), self.hosts[j].min_side()))
    }
}

/// Splits `m` across axis `h` at the smallest coordinate `m1` whose prefix
/// holds `n1` designated nodes. `M1` and `M2` share the hyperplane `m1`;
/// `U1` takes everything below it plus the lexicographically first nodes
/// on it.
pub fn partition_host(m: &SubGrid, u: &[GridNode], n1: usize, n2: usize, h: usize) -> Result<HostPartition> {
    if h >= m.dim() {
        return Err(Error::AxisOutOfRange { axis: h, dim: m.dim() });
    }
    if n1 + n2 != u.len() || n1 == 0 || n2 == 0 {
        return Err(Error::InvalidParameter(format!("cannot split {} designated nodes into {n1} + {n2}", u.len())));
    }
    let (lo, hi) = (m.lo(h), m.hi(h));
    let mut per_plane = vec![0usize; (hi - lo + 1) as usize];
    for v in u {
        if !m.contains(v) {
            return Err(Error::OutOfBounds { node: v.to_string(), grid: m.box_string() });
        }
        per_plane[(v.get(h) - lo) as usize] += 1;
    }
    let mut below = 0;
    let mut cut = hi;
    for (off, &c) in per_plane.iter().enumerate() {
        if below + c >= n1 {
            cut = lo + off as u32;
            break;
        }
        below += c;
    }
    let mut on_plane: Vec<&GridNode> = u.iter().filter(|v| v.get(h) == cut).collect();
    on_plane.sort();
    let take: HashSet<&GridNode> = on_plane.into_iter().take(n1 - below).collect();
    let (mut u1, mut u2) = (Vec::with_capacity(n1), Vec::with_capacity(n2));
    for v in u {
        if v.get(h) < cut || take.contains(v) {
            u1.push(v.clone());
        } else {
            u2.push(v.clone());
        }
    }
    u1.sort();
    u2.sort();
    let hosts = [m.slab(h, lo, cut), m.slab(h, cut, hi)];
    let part = HostPartition { cut, hosts, designated: [u1, u2] };
    check_partition(m, u, &part)?;
    Ok(part)
}

/// Independent postcondition check: the parts cover `u`, stay inside their
/// hosts and contain their hosts' interiors.
pub fn check_partition(m: &SubGrid, u: &[GridNode], p: &HostPartition) -> Result<()> {
    let fail = |msg: String| Err(Error::InvalidParameter(format!("partition of {}: {msg}", m.box_string())));
    let mut all: Vec<&GridNode> = p.designated.iter().flatten().collect();
    all.sort();
    let mut want: Vec<&GridNode> = u.iter().collect();
    want.sort();
    if all != want {
        return fail("parts do not cover the designated set exactly".into());
    }
    for j in 0..2 {
        let set: HashSet<&GridNode> = p.designated[j].iter().collect();
        if let Some(v) = p.designated[j].iter().find(|v| !p.hosts[j].contains(v)) {
            return fail(format!("{v} lies outside part {}", j + 1));
        }
        if let Some(v) = p.hosts[j].interior_nodes().find(|v| !set.contains(v)) {
            return fail(format!("interior node {v} of part {} is not designated", j + 1));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn whole(s: &str) -> SubGrid {
        SubGrid::whole(&s.parse::<GridSpec>().unwrap())
    }

    #[test]
    fn minimality() {
        assert!(is_minimal_host(&"8x8".parse().unwrap(), 64));
        assert!(!is_minimal_host(&"8x8".parse().unwrap(), 56));
        assert!(is_minimal_host(&"8x7".parse().unwrap(), 50));
        assert_eq!(minimal_host(&"10x10".parse().unwrap(), 50).unwrap().dims(), &[7, 8]);
        assert_eq!(cube_host(511, 3).unwrap().dims(), &[8, 8, 8]);
        let h = cube_host(255, 3).unwrap();
        assert!(is_minimal_host(&h, 255) && h.node_count() >= 255);
        assert_eq!(cube_host(1, 2).unwrap().dims(), &[1, 1]);
    }

    #[test]
    fn designated_set_contains_interior() {
        let m = whole("6x5");
        let u = initial_designated_set(&m, 20).unwrap();
        assert_eq!(u.len(), 20);
        assert!(m.interior_nodes().all(|v| u.contains(&v)));
        assert!(initial_designated_set(&m, 11).is_err());
        assert!(initial_designated_set(&m, 31).is_err());
    }

    #[test]
    fn fifty_nodes_twenty_thirty() {
        // a 10 x 7 host with 50 designated nodes, split along the long side
        let m = whole("10x7");
        let u = initial_designated_set(&m, 50).unwrap();
        let p = partition_host(&m, &u, 20, 30, 0).unwrap();
        assert_eq!(p.designated[0].len(), 20);
        assert_eq!(p.designated[1].len(), 30);
        assert_eq!(p.hosts[0].hi(0), p.hosts[1].lo(0));
        assert_eq!(p.hosts[0].hi(0), p.cut);
    }

    #[test]
    fn tight_prefix() {
        let m = whole("12x6");
        let u: Vec<GridNode> = m.interior_nodes().collect();
        // the first interior plane holds 4 nodes, so the smallest prefix
        // holding 8 ends on the second interior plane
        let p = partition_host(&m, &u, 8, u.len() - 8, 0).unwrap();
        assert_eq!(p.cut, 3);
        assert!(p.designated[0].iter().all(|v| v.get(0) <= 3));
    }

    #[test]
    fn twenty_by_seventeen() {
        let m = whole("20x17");
        let u: Vec<GridNode> = m.nodes().collect();
        let n1 = (2 * 340usize).div_ceil(3);
        let p = partition_host(&m, &u, n1, 340 - n1, 0).unwrap();
        check_partition(&m, &u, &p).unwrap();
    }

    #[test]
    fn bad_sizes() {
        let m = whole("5x5");
        let u: Vec<GridNode> = m.nodes().collect();
        assert!(partition_host(&m, &u, 10, 10, 0).is_err());
        assert!(partition_host(&m, &u, 25, 0, 0).is_err());
    }
}
