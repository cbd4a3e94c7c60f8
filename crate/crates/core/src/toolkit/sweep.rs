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


//! End-to-end embedding runs and the CSV sweep.

use std::str::FromStr;
use std::time::Instant;

use super::families::{gen_family, Family};
use crate::decompose::{
    build_decomposition_tree_with, CentroidOracle, DecompositionTree, GreedyBisectionOracle, HyperplaneOracle,
};
use crate::error::{Error, Result};
use crate::graph::GuestGraph;
use crate::grid::{GridSpec, SubGrid};
use crate::par::{self, Exec};
use crate::sbe::{cube_host, is_minimal_host, minimal_host, sbe_embed, SbeConfig, SbeOutput};

/// Which separator oracle builds the decomposition tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    /// Centroids; forests only.
    Tree,
    /// Median lines of a row-major grid guest.
    Grid,
    /// BFS-layer bisection; any graph, no guarantee.
    Greedy,
}

impl OracleKind {
    pub fn for_family(f: &Family) -> OracleKind {
        match f {
            Family::CompleteBinaryTree { .. } => OracleKind::Tree,
            Family::Grid2d { .. } => OracleKind::Grid,
            Family::RandomBoundedDegree { .. } => OracleKind::Greedy,
        }
    }
}

impl FromStr for OracleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tree" => Ok(OracleKind::Tree),
            "grid" => Ok(OracleKind::Grid),
            "greedy" => Ok(OracleKind::Greedy),
            _ => Err(Error::InvalidParameter(format!("unknown oracle {s:?}; use tree, grid or greedy"))),
        }
    }
}

pub fn build_tree(g: &GuestGraph, kind: OracleKind, epsilon: f64, exec: Exec) -> Result<DecompositionTree> {
    match kind {
        OracleKind::Tree => build_decomposition_tree_with(g, &CentroidOracle::for_guest(g)?, epsilon, exec),
        OracleKind::Grid => build_decomposition_tree_with(g, &HyperplaneOracle::for_guest(g)?, epsilon, exec),
        OracleKind::Greedy => build_decomposition_tree_with(g, &GreedyBisectionOracle, epsilon, exec),
    }
}

/// Result of [`embed_guest`].
#[derive(Clone, Debug)]
pub struct EmbedRun {
    pub host: GridSpec,
    /// True when the requested host was larger than a minimal one.
    pub shrunk: bool,
    pub tree: DecompositionTree,
    pub output: SbeOutput,
}

/// Decomposes `g`, shrinks `host` to a minimal one if needed and runs the
/// embedding. `beta` may only loosen the tree's balance.
pub fn embed_guest(
    g: &GuestGraph,
    host: &GridSpec,
    oracle: OracleKind,
    epsilon: f64,
    beta: Option<f64>,
    exec: Exec,
) -> Result<EmbedRun> {
    let n = g.node_count();
    let shrunk = !is_minimal_host(host, n);
    let host = if shrunk { minimal_host(host, n)? } else { host.clone() };
    let tree = build_tree(g, oracle, epsilon, exec)?;
    let mut cfg = SbeConfig::for_instance(g, &tree, &host)?;
    if let Some(b) = beta {
        if b < cfg.beta {
            return Err(Error::InvalidParameter(format!("beta {b} is below the tree's balance {}", cfg.beta)));
        }
        cfg = SbeConfig::new(cfg.d, cfg.alpha, cfg.c, b, host.aspect_ratio(), cfg.max_degree)?;
    }
    let output = sbe_embed(g, &tree, &SubGrid::whole(&host), &cfg.with_exec(exec))?;
    Ok(EmbedRun { host, shrunk, tree, output })
}

/// One line of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub family: String,
    pub n: usize,
    pub d: usize,
    pub host: String,
    pub max_degree: usize,
    pub congestion: u32,
    pub dilation: usize,
    pub frames: usize,
    pub max_w: u32,
    /// Largest measured/bound ratio over the congestion checks.
    pub max_check_ratio: f64,
    pub piece_congestion: u32,
    pub millis: u128,
}

impl SweepRow {
    pub const HEADER: [&'static str; 12] = [
        "family",
        "n",
        "d",
        "host",
        "max_degree",
        "congestion",
        "dilation",
        "frames",
        "max_w",
        "max_check_ratio",
        "piece_congestion",
        "millis",
    ];

    fn record(&self) -> Vec<String> {
        vec![
            self.family.clone(),
            self.n.to_string(),
            self.d.to_string(),
            self.host.clone(),
            self.max_degree.to_string(),
            self.congestion.to_string(),
            self.dilation.to_string(),
            self.frames.to_string(),
            self.max_w.to_string(),
            format!("{:.4}", self.max_check_ratio),
            self.piece_congestion.to_string(),
            self.millis.to_string(),
        ]
    }
}

/// Embeds the `family` member of every size in `sizes` into the smallest
/// near-cubic minimal `d`-dimensional host; rows come back in input order.
pub fn bench_sweep(family: &str, sizes: &[usize], d: usize, seed: u64, epsilon: f64, exec: Exec) -> Result<Vec<SweepRow>> {
    let rows = par::map(exec, sizes, |&n| -> Result<SweepRow> {
        let start = Instant::now();
        let kind = Family::with_size(family, n, 4)?;
        let g = gen_family(kind, seed)?;
        let host = cube_host(n, d)?;
        let run = embed_guest(&g, &host, OracleKind::for_family(&kind), epsilon, None, exec)?;
        let audit = &run.output.audit;
        let max_check_ratio = audit
            .frames
            .iter()
            .flat_map(|f| &f.checks)
            .filter(|c| c.check.ends_with("congestion") && c.bound > 0.0)
            .map(|c| c.measured / c.bound)
            .fold(0.0, f64::max);
        Ok(SweepRow {
            family: family.to_string(),
            n,
            d,
            host: run.host.to_string(),
            max_degree: g.max_degree(),
            congestion: audit.congestion,
            dilation: audit.dilation,
            frames: audit.frames.len(),
            max_w: audit.frames.iter().map(|f| f.w).max().unwrap_or(0),
            max_check_ratio,
            piece_congestion: audit.piece_congestion,
            millis: start.elapsed().as_millis(),
        })
    });
    rows.into_iter().collect()
}

/// Writes rows as CSV with a header line.
pub fn rows_to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SweepRow::HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sweep_has_only_a_header() {
        let rows = bench_sweep("cbt", &[], 2, 0, 0.1, Exec::default()).unwrap();
        assert!(rows.is_empty());
        assert_eq!(rows_to_csv(&rows).unwrap().lines().count(), 1);
    }

    #[test]
    fn small_sweep() {
        let rows = bench_sweep("cbt", &[63, 127], 2, 0, 0.1, Exec::default()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].n, 63);
        let csv = rows_to_csv(&rows).unwrap();
        assert!(csv.starts_with("family,n,d,host"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn oversized_hosts_are_shrunk() {
        let g = gen_family(Family::CompleteBinaryTree { depth: 4 }, 0).unwrap();
        let run = embed_guest(&g, &"10x10".parse().unwrap(), OracleKind::Tree, 0.1, None, Exec::default()).unwrap();
        assert!(run.shrunk);
        assert!(is_minimal_host(&run.host, 31));
        assert!(embed_guest(&g, &"5x5".parse().unwrap(), OracleKind::Tree, 0.1, Some(0.6), Exec::default()).is_err());
    }

    #[test]
    fn oracle_names() {
        assert_eq!("grid".parse::<OracleKind>().unwrap(), OracleKind::Grid);
        assert!("planar".parse::<OracleKind>().is_err());
    }
}
