#include "covertree/tree.hpp"

#include <algorithm>

namespace covertree {

VertexId ancestor(VertexId v, int j) {
  if (j < -1 || j > v.level) {
    throw DomainError("ancestor: level out of range");
  }
  if (j == -1) return VertexId::root();
  return {j, v.index >> (v.level - j)};
}

VertexId lca(VertexId u, VertexId v) {
  if (u.level < 0 || v.level < 0) {
    throw DomainError("lca: both vertices must be at level >= 0");
  }
  const int common = std::min(u.level, v.level);
  const std::uint64_t a = u.index >> (u.level - common);
  const std::uint64_t b = v.index >> (v.level - common);
  // The level-0 vertex is unique, so the shared prefix always reaches level 0.
  const int differing = static_cast<int>(std::bit_width(a ^ b));
  return {common - differing, a >> differing};
}

}  // namespace covertree
