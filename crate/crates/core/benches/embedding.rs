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


//! Sequential against rayon-parallel execution of the embedding pipeline.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gridembed::decompose::build_decomposition_tree_with;
use gridembed::par::Exec;
use gridembed::routing::embed_by_permutation_with;
use gridembed::sbe::{cube_host, sbe_embed, SbeConfig};
use gridembed::toolkit::{gen_family, Family};
use gridembed::{decompose::CentroidOracle, SubGrid};

fn sbe(c: &mut Criterion) {
    let mut group = c.benchmark_group("sbe_embed");
    group.sample_size(10);
    for depth in [10u32, 11] {
        let g = gen_family(Family::CompleteBinaryTree { depth }, 0).unwrap();
        let host = cube_host(g.node_count(), 2).unwrap();
        let tree = build_decomposition_tree_with(&g, &CentroidOracle, 0.1, Exec::Sequential).unwrap();
        let cfg = SbeConfig::for_instance(&g, &tree, &host).unwrap();
        let m0 = SubGrid::whole(&host);
        for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
            group.bench_with_input(BenchmarkId::new(name, g.node_count()), &exec, |b, &exec| {
                b.iter(|| sbe_embed(&g, &tree, &m0, &cfg.with_exec(exec)).unwrap())
            });
        }
    }
    group.finish();
}

fn permutation(c: &mut Criterion) {
    let mut group = c.benchmark_group("embed_by_permutation");
    group.sample_size(10);
    let g = gen_family(Family::RandomBoundedDegree { n: 4096, max_degree: 8 }, 1).unwrap();
    let m = SubGrid::whole(&"64x64".parse().unwrap());
    for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        group.bench_function(name, |b| b.iter(|| embed_by_permutation_with(&g, &m, None, exec).unwrap()));
    }
    group.finish();
}

fn decomposition(c: &mut Criterion) {
    let mut group = c.benchmark_group("decomposition_tree");
    group.sample_size(10);
    let g = gen_family(Family::CompleteBinaryTree { depth: 14 }, 0).unwrap();
    for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        group.bench_function(name, |b| b.iter(|| build_decomposition_tree_with(&g, &CentroidOracle, 0.1, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, sbe, permutation, decomposition);
criterion_main!(benches);
