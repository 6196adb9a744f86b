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

// Integer partitions with a bounded number of parts, and the combinatorial
// weights attached to them by the allocation RDP sum.

#ifndef ALLOCDP_PARTITIONS_H_
#define ALLOCDP_PARTITIONS_H_

#include <cstdint>
#include <span>
#include <vector>

namespace allocdp {

// Streams the partitions of `alpha` into at most `max_parts` parts, each
// exactly once, in descending lexicographic order: [alpha], [alpha-1, 1], ...
//
//   PartitionGenerator gen(5, 2);
//   while (gen.Next()) Use(gen.parts());   // [5] [4,1] [3,2]
class PartitionGenerator {
 public:
  PartitionGenerator(int alpha, int64_t max_parts);

  // Advances to the next partition. Returns false once exhausted.
  bool Next();

  // Parts of the current partition, non-increasing.
  std::span<const int> parts() const { return parts_; }

 private:
  int alpha_;
  int max_parts_;
  bool started_ = false;
  bool done_ = false;
  std::vector<int> parts_;
};

// Number of partitions of n into at most k parts (memoized table).
uint64_t RestrictedPartitionCount(int n, int64_t k);

// ln of the combinatorial factors attached to one partition Pi of alpha when
// the alpha draws are spread over t slots:
//   log_count_coeff  = ln( t! / (prod_v c_v! * (t - |Pi|)!) ), c_v the
//                      multiplicity of each distinct part value,
//   log_multinomial  = ln( alpha! / prod_p p! ).
struct PartitionWeights {
  double log_count_coeff;
  double log_multinomial;
  std::vector<int> counts;
};

// Precomputed tables for weighting partitions of orders up to `max_alpha`
// against a fixed number of slots t.
class PartitionWeighter {
 public:
  PartitionWeighter(int64_t t, int max_alpha);

  PartitionWeights Weights(std::span<const int> parts) const;
  // log_count_coeff + log_multinomial without materializing the counts.
  double LogWeight(std::span<const int> parts) const;

 private:
  int64_t t_;
  std::vector<double> log_factorial_;         // ln k!, k <= max_alpha
  std::vector<double> log_falling_factorial_; // ln t!/(t-m)!, m <= max_alpha
};

}  // namespace allocdp

#endif  // ALLOCDP_PARTITIONS_H_
