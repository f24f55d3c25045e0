// Copyright 2026 The RidgeSVM Authors. All Rights Reserved.
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

#ifndef RIDGESVM_DETAIL_COLUMN_CACHE_HPP
#define RIDGESVM_DETAIL_COLUMN_CACHE_HPP

#include <cstdint>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ridgesvm/kernels.hpp"
#include "ridgesvm/linalg.hpp"

namespace ridgesvm::detail {

/// Columns of K + ρI keyed by sample id. Rows follow the owning state's
/// sample order, so every layout change of the state has to be mirrored here
/// (erase_rows / append_rows).
class ColumnCache {
 public:
  template <class SampleRange>
  const Vector& get(std::uint64_t id, std::size_t pos, const SampleRange& samples, const KernelSpec& spec) {
    auto it = cols_.find(id);
    if (it != cols_.end()) return it->second;
    Vector col(static_cast<Eigen::Index>(samples.size()));
    const auto& x = samples[pos].features;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      col(static_cast<Eigen::Index>(j)) = kernel_eval(samples[j].features, x, spec);
    }
    col(static_cast<Eigen::Index>(pos)) += spec.ridge;
    return cols_.emplace(id, std::move(col)).first->second;
  }

  bool contains(std::uint64_t id) const { return cols_.count(id) != 0; }

  /// Drops rows at the given (ascending) positions and the columns of `ids`.
  void erase_rows(std::span<const std::size_t> positions, std::span<const std::uint64_t> ids) {
    for (auto id : ids) cols_.erase(id);
    if (positions.empty()) return;
    for (auto& [id, col] : cols_) {
      const Eigen::Index n = col.size();
      Vector out(n - static_cast<Eigen::Index>(positions.size()));
      Eigen::Index w = 0;
      std::size_t p = 0;
      for (Eigen::Index r = 0; r < n; ++r) {
        if (p < positions.size() && static_cast<Eigen::Index>(positions[p]) == r) {
          ++p;
          continue;
        }
        out(w++) = col(r);
      }
      col = std::move(out);
    }
  }

  /// Extends cached columns with rows for samples[first_new..].
  template <class SampleRange>
  void append_rows(const SampleRange& samples, std::size_t first_new, const KernelSpec& spec,
                   const std::unordered_map<std::uint64_t, std::size_t>& position) {
    if (first_new >= samples.size()) return;
    for (auto& [id, col] : cols_) {
      const auto& x = samples[position.at(id)].features;
      const Eigen::Index old_n = col.size();
      col.conservativeResize(static_cast<Eigen::Index>(samples.size()));
      for (std::size_t j = first_new; j < samples.size(); ++j) {
        col(static_cast<Eigen::Index>(j)) = kernel_eval(samples[j].features, x, spec);
      }
      (void)old_n;
    }
  }

  void retain(const std::unordered_set<std::uint64_t>& keep) {
    for (auto it = cols_.begin(); it != cols_.end();) {
      if (keep.count(it->first) == 0) {
        it = cols_.erase(it);
      } else {
        ++it;
      }
    }
  }

  void clear() { cols_.clear(); }
  std::size_t size() const { return cols_.size(); }

 private:
  std::unordered_map<std::uint64_t, Vector> cols_;
};

}  // namespace ridgesvm::detail

#endif  // RIDGESVM_DETAIL_COLUMN_CACHE_HPP
