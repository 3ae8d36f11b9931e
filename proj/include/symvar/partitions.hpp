// Copyright 2026 The symvar Authors
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

// Set partitions of {1,...,n} and the three lattices behind classical, free
// and Boolean cumulants: all partitions, non-crossing partitions and interval
// partitions.
//
// Enumeration walks restricted growth strings (element i gets the label of
// its block, labels appear in increasing order of first use) in lexicographic
// order. Non-crossing and interval lattices are generated by pruning the same
// walk, so all three lists share one deterministic order.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "symvar/errors.hpp"

namespace symvar {

enum class IndependenceKind { Classical, Free, Boolean };

inline constexpr std::array<IndependenceKind, 3> kAllKinds = {
    IndependenceKind::Classical, IndependenceKind::Free, IndependenceKind::Boolean};

inline std::string_view to_string(IndependenceKind kind) {
  switch (kind) {
    case IndependenceKind::Classical: return "classical";
    case IndependenceKind::Free: return "free";
    case IndependenceKind::Boolean: return "boolean";
  }
  return "?";
}

inline IndependenceKind parse_kind(std::string_view name) {
  if (name == "classical") return IndependenceKind::Classical;
  if (name == "free") return IndependenceKind::Free;
  if (name == "boolean") return IndependenceKind::Boolean;
  throw ValidationError("unknown independence kind '" + std::string(name) + "'",
                        "expected one of classical, free, boolean");
}

inline constexpr int kMaxPartitionSize = 14;

/// A partition of {1,...,n}, stored canonically: blocks sorted by their
/// minimum element, elements ascending inside each block.
class Partition {
 public:
  Partition(int n, std::vector<std::vector<int>> blocks) : n_(n), blocks_(std::move(blocks)) {
    if (n_ < 1) throw ValidationError("partition ground set must be nonempty");
    std::vector<char> seen(static_cast<std::size_t>(n_) + 1, 0);
    for (auto& block : blocks_) {
      if (block.empty()) throw ValidationError("partition has an empty block");
      std::sort(block.begin(), block.end());
      for (int e : block) {
        if (e < 1 || e > n_) throw ValidationError("partition element out of range");
        if (seen[e]) throw ValidationError("partition blocks are not disjoint");
        seen[e] = 1;
      }
    }
    if (std::count(seen.begin() + 1, seen.end(), 1) != n_)
      throw ValidationError("partition blocks do not cover {1,...,n}");
    std::sort(blocks_.begin(), blocks_.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
  }

  /// Builds the partition whose element i (0-based) lies in block labels[i].
  static Partition from_labels(std::span<const int> labels) {
    int blocks = 0;
    for (int l : labels) blocks = std::max(blocks, l + 1);
    std::vector<std::vector<int>> out(static_cast<std::size_t>(blocks));
    for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(static_cast<int>(i) + 1);
    return Partition(static_cast<int>(labels.size()), std::move(out));
  }

  int size() const noexcept { return n_; }
  const std::vector<std::vector<int>>& blocks() const noexcept { return blocks_; }

  std::vector<int> block_sizes() const {
    std::vector<int> sizes;
    sizes.reserve(blocks_.size());
    for (const auto& b : blocks_) sizes.push_back(static_cast<int>(b.size()));
    return sizes;
  }

  std::string str() const {
    std::string s = "{";
    for (const auto& b : blocks_) {
      s += "{";
      for (std::size_t i = 0; i < b.size(); ++i) s += (i ? "," : "") + std::to_string(b[i]);
      s += "}";
    }
    return s + "}";
  }

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition& a, const Partition& b) {
    if (auto c = a.n_ <=> b.n_; c != 0) return c;
    return a.blocks_ <=> b.blocks_;
  }

 private:
  int n_;
  std::vector<std::vector<int>> blocks_;
};

/// No a<b<c<d with a,c in one block and b,d in another.
inline bool is_noncrossing(const Partition& p) {
  const int n = p.size();
  std::vector<int> label(static_cast<std::size_t>(n) + 1);
  for (std::size_t b = 0; b < p.blocks().size(); ++b)
    for (int e : p.blocks()[b]) label[e] = static_cast<int>(b);
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b) {
      if (label[b] == label[a]) continue;
      for (int c = b + 1; c <= n; ++c) {
        if (label[c] != label[a]) continue;
        for (int d = c + 1; d <= n; ++d)
          if (label[d] == label[b]) return false;
      }
    }
  return true;
}

/// Every block is a run of consecutive integers.
inline bool is_interval(const Partition& p) {
  for (const auto& block : p.blocks())
    if (block.back() - block.front() + 1 != static_cast<int>(block.size())) return false;
  return true;
}

inline bool in_lattice(const Partition& p, IndependenceKind kind) {
  switch (kind) {
    case IndependenceKind::Classical: return true;
    case IndependenceKind::Free: return is_noncrossing(p);
    case IndependenceKind::Boolean: return is_interval(p);
  }
  return false;
}

namespace detail {

inline void check_partition_size(int n) {
  if (n < 1 || n > kMaxPartitionSize)
    throw SizeError("partition size " + std::to_string(n) + " outside [1, " +
                        std::to_string(kMaxPartitionSize) + "]",
                    "lattice sizes explode past n=14");
}

template <class Visitor>
class LatticeWalk {
 public:
  LatticeWalk(int n, IndependenceKind kind, Visitor& visit)
      : n_(n), kind_(kind), visit_(visit), labels_(n), last_(n), first_(n), sizes_(n) {}

  void run() { place(0, 0); }

 private:
  bool admissible(int i, int block) const {
    switch (kind_) {
      case IndependenceKind::Classical:
        return true;
      case IndependenceKind::Boolean:
        return labels_[i - 1] == block;
      case IndependenceKind::Free: {
        // Joining block b (last element j) crosses iff some element strictly
        // between j and i belongs to a block that started before j.
        const int j = last_[block];
        for (int c = j + 1; c < i; ++c)
          if (first_[labels_[c]] < j) return false;
        return true;
      }
    }
    return false;
  }

  void place(int i, int blocks) {
    if (i == n_) {
      visit_(std::span<const int>(labels_.data(), n_), std::span<const int>(sizes_.data(), blocks));
      return;
    }
    for (int b = 0; b < blocks; ++b) {
      if (!admissible(i, b)) continue;
      const int saved_last = last_[b];
      labels_[i] = b;
      last_[b] = i;
      ++sizes_[b];
      place(i + 1, blocks);
      --sizes_[b];
      last_[b] = saved_last;
    }
    labels_[i] = blocks;
    first_[blocks] = last_[blocks] = i;
    sizes_[blocks] = 1;
    place(i + 1, blocks + 1);
    sizes_[blocks] = 0;
  }

  int n_;
  IndependenceKind kind_;
  Visitor& visit_;
  std::vector<int> labels_, last_, first_, sizes_;
};

}  // namespace detail

/// Streams every partition of {1..n} in the kind's lattice. The visitor gets
/// the block label of each element and the block sizes; both views are only
/// valid during the call.
template <class Visitor>
void for_each_partition(int n, IndependenceKind kind, Visitor&& visit) {
  detail::check_partition_size(n);
  detail::LatticeWalk<std::remove_reference_t<Visitor>> walk(n, kind, visit);
  walk.run();
}

/// Materialized lattice; for Classical at n=14 this is ~1.9e8 partitions, so
/// prefer for_each_partition there.
inline std::vector<Partition> enumerate(int n, IndependenceKind kind) {
  std::vector<Partition> out;
  for_each_partition(n, kind, [&](std::span<const int> labels, std::span<const int>) {
    out.push_back(Partition::from_labels(labels));
  });
  return out;
}

inline std::uint64_t count_partitions(int n, IndependenceKind kind) {
  std::uint64_t count = 0;
  for_each_partition(n, kind, [&](std::span<const int>, std::span<const int>) { ++count; });
  return count;
}

/// A block-size multiset (sizes descending) together with how many lattice
/// partitions have exactly those block sizes.
struct BlockType {
  std::vector<int> sizes;
  std::uint64_t count = 0;
};

namespace detail {

inline std::vector<BlockType> compute_block_types(int n, IndependenceKind kind) {
  // Key: nibble s-1 holds the number of blocks of size s (at most 14 < 16).
  std::unordered_map<std::uint64_t, std::uint64_t> tally;
  for_each_partition(n, kind, [&](std::span<const int>, std::span<const int> sizes) {
    std::uint64_t key = 0;
    for (int s : sizes) key += std::uint64_t{1} << (4 * (s - 1));
    ++tally[key];
  });
  std::vector<BlockType> types;
  types.reserve(tally.size());
  for (const auto& [key, count] : tally) {
    BlockType t;
    t.count = count;
    for (int s = n; s >= 1; --s) {
      const auto mult = static_cast<int>((key >> (4 * (s - 1))) & 0xF);
      t.sizes.insert(t.sizes.end(), mult, s);
    }
    types.push_back(std::move(t));
  }
  std::sort(types.begin(), types.end(),
            [](const BlockType& a, const BlockType& b) { return a.sizes > b.sizes; });
  return types;
}

}  // namespace detail

/// Block-type table of the kind's lattice on {1..n}, computed once by
/// enumeration and cached for the life of the process. Thread-safe.
inline const std::vector<BlockType>& block_type_table(int n, IndependenceKind kind) {
  detail::check_partition_size(n);
  static std::mutex mutex;
  static std::map<std::pair<int, IndependenceKind>, std::vector<BlockType>> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(n, kind);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, detail::compute_block_types(n, kind)).first;
  return it->second;
}

}  // namespace symvar
