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

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qadapt_bench::workload;
use qadapt_core::{adaptive_compile, qr_decompose, ExperimentalCost, SearchConfig};

fn compile(c: &mut Criterion) {
    let model = ExperimentalCost::default();
    let cfg = SearchConfig::default();
    for dim in [3, 5] {
        let w = workload(dim, 8).expect("valid workload");
        let mut group = c.benchmark_group(format!("dim{dim}"));
        group.sample_size(10);
        for arch in &w.architectures {
            group.bench_with_input(BenchmarkId::new("qr", &arch.id), &arch.graph, |b, g| {
                b.iter(|| {
                    for u in &w.unitaries {
                        black_box(qr_decompose(u, g, &model).ok());
                    }
                })
            });
            group.bench_with_input(
                BenchmarkId::new("adaptive", &arch.id),
                &arch.graph,
                |b, g| {
                    b.iter(|| {
                        for u in &w.unitaries {
                            black_box(adaptive_compile(u, g, &cfg, &model).ok());
                        }
                    })
                },
            );
        }
        group.finish();
    }
}

criterion_group!(benches, compile);
criterion_main!(benches);
