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

#include "allocdp/partitions.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

namespace allocdp {

PartitionGenerator::PartitionGenerator(int alpha, int64_t max_parts)
    : alpha_(alpha),
      max_parts_(static_cast<int>(std::min<int64_t>(max_parts, alpha))) {
  parts_.reserve(std::max(alpha, 1));
  if (alpha_ < 1 || max_parts_ < 1) done_ = true;
}

bool PartitionGenerator::Next() {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    parts_.assign(1, alpha_);
    return true;
  }
  // Decrease the rightmost part that can shrink by one while the freed mass
  // (plus everything to its right) still fits in the remaining slots using
  // parts no larger than the new value; then refill greedily.
  int suffix = 0;
  for (int i = static_cast<int>(parts_.size()) - 1; i >= 0; --i) {
    const int value = parts_[i] - 1;
    const int remainder = suffix + 1;
    suffix += parts_[i];
    if (value < 1) continue;
    const int slots = max_parts_ - (i + 1);
    if (static_cast<int64_t>(value) * slots < remainder) continue;
    parts_.resize(i + 1);
    parts_[i] = value;
    int left = remainder;
    while (left > 0) {
      const int part = std::min(value, left);
      parts_.push_back(part);
      left -= part;
    }
    return true;
  }
  done_ = true;
  return false;
}

uint64_t RestrictedPartitionCount(int n, int64_t k) {
  if (n < 0 || k < 0) return 0;
  if (n == 0) return 1;
  static std::mutex mu;
  // table[m][j]: partitions of m into parts of size <= j, which by
  // conjugation equals partitions of m into at most j parts.
  static std::vector<std::vector<uint64_t>> table = {{1}};
  std::lock_guard lock(mu);
  while (static_cast<int>(table.size()) <= n) {
    const int m = static_cast<int>(table.size());
    // Rebuild rows so each row m has columns 0..m.
    std::vector<uint64_t> row(m + 1, 0);
    for (int j = 1; j <= m; ++j) {
      const uint64_t without_j = row[j - 1];
      const auto& prev = table[m - j];
      const uint64_t with_j = prev[std::min<int>(j, m - j)];
      row[j] = without_j + with_j;
    }
    table.push_back(std::move(row));
  }
  const auto& row = table[n];
  return row[std::min<int64_t>(k, n)];
}

PartitionWeighter::PartitionWeighter(int64_t t, int max_alpha) : t_(t) {
  log_factorial_.assign(max_alpha + 1, 0.0);
  for (int k = 2; k <= max_alpha; ++k) {
    log_factorial_[k] = log_factorial_[k - 1] + std::log(static_cast<double>(k));
  }
  const int64_t max_len = std::min<int64_t>(t, max_alpha);
  log_falling_factorial_.assign(max_alpha + 1,
                                -std::numeric_limits<double>::infinity());
  log_falling_factorial_[0] = 0.0;
  for (int64_t m = 1; m <= max_len; ++m) {
    log_falling_factorial_[m] =
        log_falling_factorial_[m - 1] + std::log(static_cast<double>(t - m + 1));
  }
}

PartitionWeights PartitionWeighter::Weights(std::span<const int> parts) const {
  PartitionWeights w;
  int alpha = 0;
  double log_part_factorials = 0.0;
  double log_count_factorials = 0.0;
  for (size_t i = 0; i < parts.size();) {
    size_t j = i;
    while (j < parts.size() && parts[j] == parts[i]) ++j;
    const int count = static_cast<int>(j - i);
    w.counts.push_back(count);
    log_count_factorials += log_factorial_[count];
    log_part_factorials += count * log_factorial_[parts[i]];
    alpha += count * parts[i];
    i = j;
  }
  w.log_count_coeff =
      log_falling_factorial_[parts.size()] - log_count_factorials;
  w.log_multinomial = log_factorial_[alpha] - log_part_factorials;
  return w;
}

double PartitionWeighter::LogWeight(std::span<const int> parts) const {
  int alpha = 0;
  double log_denominator = 0.0;
  for (size_t i = 0; i < parts.size();) {
    size_t j = i;
    while (j < parts.size() && parts[j] == parts[i]) ++j;
    const int count = static_cast<int>(j - i);
    log_denominator += log_factorial_[count] + count * log_factorial_[parts[i]];
    alpha += count * parts[i];
    i = j;
  }
  return log_falling_factorial_[parts.size()] + log_factorial_[alpha] -
         log_denominator;
}

}  // namespace allocdp
