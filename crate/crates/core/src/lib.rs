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

//! Embedding graphs into multidimensional grids with small edge-congestion.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`] holds grid geometry, routing graphs, routings and embeddings.
//! * [`decompose`] builds decomposition trees with bounded expansion from
//!   node-separator oracles.
//! * [`routing`] implements permutation routing on grids and the reduction
//!   of an embedding to a handful of permutation routings.
//! * [`sbe`] is the separator-based recursive embedding with its per-step
//!   audit.
//! * [`verify`] re-derives validity, congestion and dilation from raw data.
//! * [`toolkit`] has instance generators, file formats and the sweep harness.
//!
//! With the default `parallel` feature, independent recursive calls and batch
//! drivers run on the rayon thread pool; without it everything runs
//! sequentially and produces identical output.

pub mod decompose;
pub mod error;
pub mod graph;
pub mod grid;
pub mod par;
pub mod routing;
pub mod sbe;
pub mod toolkit;
pub mod verify;

pub use error::{Error, Result};
pub use graph::GuestGraph;
pub use grid::{Embedding, GridEdge, GridNode, GridSpec, Image, Routing, RoutingGraph, SubGrid};
