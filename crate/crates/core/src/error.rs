// Copyright contributors to the qadapt project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("matrix is not square: row {row} has {len} entries, expected {dim}")]
    NotSquare { row: usize, len: usize, dim: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("level {level} out of range for {levels} levels")]
    LevelOutOfRange { level: usize, levels: usize },

    #[error("invalid rotation between levels {0} and {1}")]
    InvalidRotation(usize, usize),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("levels {0} and {1} are not connected")]
    Disconnected(usize, usize),

    #[error("dimension {0} is not an odd prime")]
    NotOddPrime(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no decomposition below cost limit {limit:.6e} after expanding {nodes} nodes")]
    NoSolution { limit: f64, nodes: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
