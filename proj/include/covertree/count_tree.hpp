#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "covertree/tree.hpp"

namespace covertree {

/// Exact number over a power-of-two denominator: numerator / 2^log2_den.
struct DyadicRational {
  std::uint64_t numerator = 0;
  int log2_denominator = 0;

  double value() const { return std::ldexp(static_cast<double>(numerator), -log2_denominator); }
  friend bool operator==(const DyadicRational&, const DyadicRational&) = default;
};

/// Per-edge excursion counts T^s_{v,|v|} over T_n, stored sparsely.
///
/// An edge is named by its lower endpoint (its heap id). Only edges with a
/// positive count are stored, sorted by heap id. The level-0 edge carries the
/// root multiplicity s.
class CountTree {
 public:
  struct Edge {
    std::uint64_t id;
    std::uint64_t count;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  CountTree(int depth, std::uint64_t root_multiplicity);

  /// Takes unsorted (id, count) pairs with count > 0 and distinct ids.
  CountTree(int depth, std::uint64_t root_multiplicity, std::vector<Edge> edges);

  /// From a dense array indexed by heap id (size 2^{n+1}; slot 0 ignored).
  static CountTree from_dense(int depth, std::uint64_t root_multiplicity,
                              std::span<const std::uint64_t> by_heap_id);

  int depth() const { return depth_; }
  std::uint64_t root_multiplicity() const { return root_multiplicity_; }
  std::span<const Edge> edges() const { return edges_; }

  std::uint64_t count(VertexId v) const;
  std::uint64_t count_by_id(std::uint64_t heap_id) const;

  /// Counts of all 2^level edges entering level `level`, in index order.
  std::vector<std::uint64_t> level_counts(int level) const;
  std::vector<std::uint64_t> to_dense() const;

  std::uint64_t total() const;
  std::uint64_t level_total(int level) const;

  /// R^s_n = 2^{-n} sum over all edges.
  DyadicRational r_value() const { return {total(), depth_}; }

  /// Edge-wise sum; depths must match.
  CountTree& operator+=(const CountTree& other);

  friend bool operator==(const CountTree&, const CountTree&) = default;

 private:
  int depth_;
  std::uint64_t root_multiplicity_;
  std::vector<Edge> edges_;
};

}  // namespace covertree
