// Copyright 2026 The allocdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal fork-join helpers and deterministic seeding of substreams.

#ifndef ALLOCDP_PARALLEL_H_
#define ALLOCDP_PARALLEL_H_

#include <cstdint>
#include <functional>

namespace allocdp {

// Name of the environment variable holding the default worker count.
inline constexpr char kThreadsEnvVar[] = "ALLOCDP_THREADS";

// Worker count from ALLOCDP_THREADS if set to a positive integer, otherwise
// the hardware concurrency (at least 1).
int DefaultThreadCount();

// Runs fn(i) for i in [0, n) on up to `threads` workers (<= 0 means the
// default). Indices are handed out dynamically, so fn must write only to
// per-index state. Blocks until all calls finish.
void ParallelFor(int64_t n, int threads, const std::function<void(int64_t)>& fn);

// SplitMix64 finalizer.
uint64_t SplitMix64(uint64_t x);

// Seed of substream `index` derived from a base seed. Independent of the
// number of workers.
uint64_t SubstreamSeed(uint64_t seed, uint64_t index);

}  // namespace allocdp

#endif  // ALLOCDP_PARALLEL_H_
