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


//! Command-line front end: generate guests, embed them, verify embeddings
//! and run size sweeps.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use gridembed::decompose::audit_expansion;
use gridembed::par::Exec;
use gridembed::toolkit::{
    bench_sweep, build_tree, canonical_lower_bound_embedding, embed_guest, gen_family, gen_lower_bound_graph,
    rows_to_csv, Family, OracleKind,
};
use gridembed::verify::{reference_bounds, verify_embedding, verify_tree};
use gridembed::{Embedding, GridSpec, GuestGraph};

#[derive(Parser)]
#[command(name = "gridembed", version, about = "Embed graphs into grids with small edge-congestion")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Cbt,
    Grid2d,
    Random,
    LowerBound,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Tree,
    Grid,
    Greedy,
}

impl From<OracleArg> for OracleKind {
    fn from(o: OracleArg) -> Self {
        match o {
            OracleArg::Tree => OracleKind::Tree,
            OracleArg::Grid => OracleKind::Grid,
            OracleArg::Greedy => OracleKind::Greedy,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a guest graph ("N M" then one "u v" line per edge).
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Node count; for lower-bound graphs the side length.
        #[arg(long)]
        size: usize,
        /// Degree cap of random guests.
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the canonical embedding of a lower-bound graph here.
        #[arg(long)]
        embedding: Option<PathBuf>,
    },
    /// Embed a guest into a grid; the host is shrunk to a minimal one first.
    Embed {
        #[arg(long)]
        guest: PathBuf,
        /// Host dimensions, e.g. 64x64 or 16x16x16.
        #[arg(long)]
        grid: GridSpec,
        #[arg(long, value_enum, default_value = "greedy")]
        oracle: OracleArg,
        /// Claimed tree balance; may only be looser than the oracle's.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Print the per-frame audit table to stderr.
        #[arg(long)]
        audit: bool,
        /// Write the decomposition tree dump here.
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        sequential: bool,
    },
    /// Check an embedding; exits non-zero when it is invalid.
    Verify {
        #[arg(long)]
        guest: PathBuf,
        #[arg(long)]
        grid: GridSpec,
        #[arg(long)]
        embedding: PathBuf,
    },
    /// Embed one family member per size and write CSV.
    Bench {
        #[arg(long, value_enum, default_value = "cbt")]
        family: FamilyArg,
        /// Comma-separated node counts.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        sequential: bool,
    },
    /// Describe a guest, its decomposition tree and reference bounds.
    Stats {
        #[arg(long)]
        guest: PathBuf,
        #[arg(long)]
        grid: Option<GridSpec>,
        #[arg(long, value_enum, default_value = "greedy")]
        oracle: OracleArg,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn exec(sequential: bool) -> Exec {
    if sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

fn family_name(f: FamilyArg) -> Result<&'static str> {
    Ok(match f {
        FamilyArg::Cbt => "cbt",
        FamilyArg::Grid2d => "grid2d",
        FamilyArg::Random => "random",
        FamilyArg::LowerBound => bail!("lower-bound graphs have no size sweep"),
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Gen { family, size, degree, seed, out, embedding } => {
            let g = match family {
                FamilyArg::LowerBound => {
                    let l = u32::try_from(size).context("side too large")?;
                    if let Some(p) = &embedding {
                        fs::write(p, canonical_lower_bound_embedding(l)?.to_text())?;
                    }
                    gen_lower_bound_graph(l)?
                }
                f => {
                    if embedding.is_some() {
                        bail!("--embedding is only available for lower-bound graphs");
                    }
                    gen_family(Family::with_size(family_name(f)?, size, degree)?, seed)?
                }
            };
            emit(&out, &g.to_text())?;
        }
        Cmd::Embed { guest, grid, oracle, beta, epsilon, audit, tree, out, sequential } => {
            let g = GuestGraph::parse(&read(&guest)?)?;
            let run = embed_guest(&g, &grid, oracle.into(), epsilon, beta, exec(sequential))?;
            if run.shrunk {
                eprintln!("warning: host {grid} is not minimal for {} nodes; using {}", g.node_count(), run.host);
            }
            if let Some(p) = tree {
                fs::write(&p, run.tree.dump()).with_context(|| format!("writing {}", p.display()))?;
            }
            if audit {
                eprint!("{}", run.output.audit.table());
            }
            let text = format!("# host {}\n{}", run.host, run.output.embedding.to_text());
            emit(&out, &text)?;
        }
        Cmd::Verify { guest, grid, embedding } => {
            let g = GuestGraph::parse(&read(&guest)?)?;
            let emb = Embedding::parse(&read(&embedding)?, &grid)?;
            let report = verify_embedding(&g, &grid, &emb);
            println!("{report}");
            if !report.valid {
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Bench { family, sizes, dim, seed, epsilon, out, sequential } => {
            let rows = bench_sweep(family_name(family)?, &sizes, dim, seed, epsilon, exec(sequential))?;
            emit(&out, &rows_to_csv(&rows)?)?;
        }
        Cmd::Stats { guest, grid, oracle, epsilon } => {
            let g = GuestGraph::parse(&read(&guest)?)?;
            println!("nodes={} edges={} max_degree={}", g.node_count(), g.edge_count(), g.max_degree());
            println!("components={} forest={}", g.component_count(), g.is_forest());
            let t = build_tree(&g, oracle.into(), epsilon, Exec::Parallel)?;
            let exp = audit_expansion(&t);
            let check = verify_tree(&g, &t);
            println!(
                "tree: nodes={} height={} alpha={} max_expansion={:.4} max_external={} valid={}",
                t.len(),
                t.height(),
                exp.alpha,
                exp.max_ratio,
                exp.max_external,
                check.valid
            );
            for l in &exp.levels {
                println!("  depth {}: {} sets, max external {}, ratio {:.4}", l.depth, l.tree_nodes, l.max_external, l.max_ratio);
            }
            if let Some(spec) = grid {
                let r = reference_bounds(g.node_count(), g.max_degree(), exp.max_ratio.max(1.0), exp.alpha, spec.dim(), spec.dims());
                println!("permutation embedding: congestion <= {} dilation <= {}", r.permutation_congestion, r.permutation_dilation);
                println!("separator shape: {}", r.separator_regime);
                println!("tree shape: {}", r.tree_regime);
                println!("dilation shape: {}", r.dilation_shape);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
