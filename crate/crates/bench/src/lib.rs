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

//! Fixed workloads shared by the benchmarks.

use qadapt_core::suite::builtin_architectures;
use qadapt_core::{clifford_batch, Architecture, ComplexMatrix, Result};

pub const SEED: u64 = 2024;

pub struct Workload {
    pub dim: usize,
    pub unitaries: Vec<ComplexMatrix>,
    pub architectures: Vec<Architecture>,
}

/// The first `count` benchmark Cliffords of `dim` with the built-in
/// architectures for that dimension.
pub fn workload(dim: usize, count: usize) -> Result<Workload> {
    Ok(Workload {
        dim,
        unitaries: clifford_batch(dim, count, SEED, 12)?,
        architectures: builtin_architectures(dim)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workload_is_stable() {
        let a = workload(3, 4).unwrap();
        let b = workload(3, 4).unwrap();
        assert_eq!(a.unitaries.len(), 4);
        assert_eq!(a.architectures.len(), 3);
        for (x, y) in a.unitaries.iter().zip(&b.unitaries) {
            assert_eq!(x.max_distance(y).unwrap(), 0.0);
        }
    }
}
