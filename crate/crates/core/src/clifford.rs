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

//! Seeded random single-qudit Clifford unitaries for odd prime dimensions.
//!
//! Samples are random words over the Fourier gate `F` and the phase gate
//! `S`, which generate the Clifford group up to global phase. Diagonal
//! words are rejected and redrawn.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cis, ComplexMatrix, DEFAULT_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordSpec {
    pub dim: usize,
    pub seed: u64,
    pub word_length: usize,
}

impl CliffordSpec {
    pub fn new(dim: usize, seed: u64) -> Self {
        Self {
            dim,
            seed,
            word_length: 12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(is_prime(self.dim) && self.dim > 2) {
            return Err(Error::NotOddPrime(self.dim));
        }
        if self.word_length == 0 {
            return Err(Error::Config("word length must be at least 1".into()));
        }
        Ok(())
    }
}

pub fn is_prime(n: usize) -> bool {
    n >= 2
        && (2..)
            .take_while(|k| k * k <= n)
            .all(|k| !n.is_multiple_of(k))
}

/// `[F, S]` with `F_{jk} = ω^{jk}/√d` and `S_{jj} = ω^{j(j−1)/2}`.
pub fn generator_set(dim: usize) -> Result<Vec<ComplexMatrix>> {
    if !(is_prime(dim) && dim > 2) {
        return Err(Error::NotOddPrime(dim));
    }
    let omega = |k: usize| cis(TAU * (k % dim) as f64 / dim as f64);
    let norm = 1.0 / (dim as f64).sqrt();
    let f = ComplexMatrix::from_fn(dim, |j, k| omega(j * k) * norm);
    let s = ComplexMatrix::from_diagonal(
        &(0..dim)
            .map(|j| omega(j * j.saturating_sub(1) / 2))
            .collect::<Vec<_>>(),
    );
    Ok(vec![f, s])
}

/// A non-diagonal Clifford drawn from `rng`.
pub fn random_clifford_with<R: Rng + ?Sized>(
    dim: usize,
    word_length: usize,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    let gens = generator_set(dim)?;
    loop {
        let mut u = ComplexMatrix::identity(dim);
        for _ in 0..word_length {
            u = gens[rng.random_range(0..gens.len())].multiply(&u)?;
        }
        if !u.is_diagonal(DEFAULT_TOL) {
            return Ok(u);
        }
    }
}

/// Deterministic per `(seed, dim, word_length)`.
pub fn random_clifford(spec: &CliffordSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    random_clifford_with(spec.dim, spec.word_length, &mut rng)
}

/// Sample `index` of a benchmark set. Each sample uses its own stream of
/// the seeded generator, so sets are reproducible however they are computed.
pub fn benchmark_clifford(
    dim: usize,
    seed: u64,
    word_length: usize,
    index: usize,
) -> Result<ComplexMatrix> {
    CliffordSpec {
        dim,
        seed,
        word_length,
    }
    .validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((dim as u64) << 40) | index as u64);
    random_clifford_with(dim, word_length, &mut rng)
}

/// The first `count` samples of a benchmark set.
pub fn clifford_batch(
    dim: usize,
    count: usize,
    seed: u64,
    word_length: usize,
) -> Result<Vec<ComplexMatrix>> {
    CliffordSpec {
        dim,
        seed,
        word_length,
    }
    .validate()?;
    (0..count)
        .into_par_iter()
        .map(|k| benchmark_clifford(dim, seed, word_length, k))
        .collect()
}
