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

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("node {node} is not inside the grid {grid}")]
    OutOfBounds { node: String, grid: String },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid guest graph: {0}")]
    InvalidGraph(String),

    #[error("invalid image for guest edge {edge}: {msg}")]
    InvalidImage { edge: usize, msg: String },

    #[error("guest has {guest} nodes but the host only {host}")]
    GuestTooLarge { guest: usize, host: u64 },

    #[error("routing graph is not one-to-one (multiplicity {0})")]
    NotOneToOne(u64),

    #[error("routing precondition violated: {0}")]
    RoutingPrecondition(String),

    #[error("oracle family mismatch: {0}")]
    OracleFamily(String),

    #[error("separator contract violated at frame {frame}: {msg}")]
    SeparatorContract { frame: u64, msg: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty channel point set for {0}")]
    EmptyChannel(String),

    #[error("{check} violated at frame {frame} (n={n}, box={bbox}, w={w}): {detail}")]
    StepViolation {
        check: &'static str,
        frame: u64,
        n: usize,
        bbox: String,
        w: u32,
        detail: String,
    },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
