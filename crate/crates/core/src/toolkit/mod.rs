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


//! Instance generators, the lower-bound construction and the sweep harness.

mod families;
mod lower_bound;
mod sweep;

pub use families::{gen_family, Family};
pub use lower_bound::{canonical_lower_bound_embedding, gen_lower_bound_graph, lower_bound_removed_edges, snake_path};
pub use sweep::{bench_sweep, build_tree, embed_guest, rows_to_csv, EmbedRun, OracleKind, SweepRow};
