#pragma once

#include <bit>
#include <cstdint>
#include <ranges>

#include "covertree/errors.hpp"

namespace covertree {

/// Address of a vertex of the rooted binary tree T_n.
///
/// Level -1 is the root rho (index 0). Level 0 holds the single vertex
/// attached to rho. A vertex at level j >= 1 has an index in [0, 2^j) whose
/// binary digits, read from the most significant end, spell the path of
/// left (0) / right (1) turns from the level-0 vertex.
///
/// The heap id packs (level, index) into one integer: rho = 0, and
/// 2^level + index otherwise, so parent(id) = id >> 1 and children are
/// 2 id and 2 id + 1.
struct VertexId {
  int level = -1;
  std::uint64_t index = 0;

  static constexpr VertexId root() { return {}; }

  constexpr bool is_root() const { return level < 0; }

  constexpr std::uint64_t heap_id() const {
    return level < 0 ? 0 : (std::uint64_t{1} << level) + index;
  }

  static constexpr VertexId from_heap_id(std::uint64_t id) {
    if (id == 0) return root();
    const int lvl = static_cast<int>(std::bit_width(id)) - 1;
    return {lvl, id - (std::uint64_t{1} << lvl)};
  }

  constexpr VertexId child(unsigned bit) const {
    if (level < 0) return {0, 0};
    return {level + 1, (index << 1) | (bit & 1u)};
  }

  friend constexpr bool operator==(const VertexId&, const VertexId&) = default;
};

inline constexpr int kMaxTreeLevel = 62;

/// Level of a heap id; -1 for rho.
constexpr int heap_level(std::uint64_t id) {
  return static_cast<int>(std::bit_width(id)) - 1;
}

struct TreeShape {
  int depth = 0;

  constexpr std::uint64_t leaf_count() const { return std::uint64_t{1} << depth; }
  /// Edges of T_n, including the edge (rho, level-0 vertex).
  constexpr std::uint64_t edge_count() const {
    return (std::uint64_t{1} << (depth + 1)) - 1;
  }
};

/// Ancestor of v at level j, -1 <= j <= v.level. Throws DomainError otherwise.
VertexId ancestor(VertexId v, int j);

/// Last common ancestor of two vertices at levels >= 0.
VertexId lca(VertexId u, VertexId v);

/// Leaves of T_n below u, in index order. Requires 0 <= u.level <= n.
inline auto subtree_leaves(VertexId u, int n) {
  if (u.level < 0 || u.level > n || n > kMaxTreeLevel) {
    throw DomainError("subtree_leaves: need 0 <= u.level <= n");
  }
  const int shift = n - u.level;
  const std::uint64_t first = u.index << shift;
  const std::uint64_t last = first + (std::uint64_t{1} << shift);
  return std::views::iota(first, last) |
         std::views::transform([n](std::uint64_t i) { return VertexId{n, i}; });
}

}  // namespace covertree
