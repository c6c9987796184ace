#include "covertree/count_tree.hpp"

#include <algorithm>

#include "covertree/errors.hpp"

namespace covertree {

CountTree::CountTree(int depth, std::uint64_t root_multiplicity)
    : depth_(depth), root_multiplicity_(root_multiplicity) {
  if (depth < 0 || depth > kMaxTreeLevel - 1) throw DomainError("CountTree: bad depth");
  if (root_multiplicity > 0) edges_.push_back({1, root_multiplicity});
}

CountTree::CountTree(int depth, std::uint64_t root_multiplicity, std::vector<Edge> edges)
    : depth_(depth), root_multiplicity_(root_multiplicity), edges_(std::move(edges)) {
  if (depth < 0 || depth > kMaxTreeLevel - 1) throw DomainError("CountTree: bad depth");
  const auto by_id = [](const Edge& a, const Edge& b) { return a.id < b.id; };
  if (!std::is_sorted(edges_.begin(), edges_.end(), by_id)) std::sort(edges_.begin(), edges_.end(), by_id);
}

CountTree CountTree::from_dense(int depth, std::uint64_t root_multiplicity,
                                std::span<const std::uint64_t> by_heap_id) {
  std::vector<Edge> edges;
  for (std::uint64_t id = 1; id < by_heap_id.size(); ++id) {
    if (by_heap_id[id] > 0) edges.push_back({id, by_heap_id[id]});
  }
  return CountTree(depth, root_multiplicity, std::move(edges));
}

std::uint64_t CountTree::count_by_id(std::uint64_t heap_id) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), heap_id,
                             [](const Edge& e, std::uint64_t id) { return e.id < id; });
  return (it != edges_.end() && it->id == heap_id) ? it->count : 0;
}

std::uint64_t CountTree::count(VertexId v) const {
  if (v.level < 0 || v.level > depth_) throw DomainError("CountTree::count: vertex outside tree");
  return count_by_id(v.heap_id());
}

std::vector<std::uint64_t> CountTree::level_counts(int level) const {
  if (level < 0 || level > depth_) throw DomainError("CountTree::level_counts: bad level");
  const std::uint64_t first = std::uint64_t{1} << level;
  std::vector<std::uint64_t> out(first, 0);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), first,
                             [](const Edge& e, std::uint64_t id) { return e.id < id; });
  for (; it != edges_.end() && it->id < 2 * first; ++it) out[it->id - first] = it->count;
  return out;
}

std::vector<std::uint64_t> CountTree::to_dense() const {
  std::vector<std::uint64_t> out(std::uint64_t{2} << depth_, 0);
  for (const auto& e : edges_) out[e.id] = e.count;
  return out;
}

std::uint64_t CountTree::total() const {
  std::uint64_t sum = 0;
  for (const auto& e : edges_) sum += e.count;
  return sum;
}

std::uint64_t CountTree::level_total(int level) const {
  std::uint64_t sum = 0;
  for (auto c : level_counts(level)) sum += c;
  return sum;
}

CountTree& CountTree::operator+=(const CountTree& other) {
  if (other.depth_ != depth_) throw DomainError("CountTree: depth mismatch in sum");
  std::vector<Edge> merged;
  merged.reserve(edges_.size() + other.edges_.size());
  auto a = edges_.begin();
  auto b = other.edges_.begin();
  while (a != edges_.end() || b != other.edges_.end()) {
    if (b == other.edges_.end() || (a != edges_.end() && a->id < b->id)) {
      merged.push_back(*a++);
    } else if (a == edges_.end() || b->id < a->id) {
      merged.push_back(*b++);
    } else {
      merged.push_back({a->id, a->count + b->count});
      ++a;
      ++b;
    }
  }
  edges_ = std::move(merged);
  root_multiplicity_ += other.root_multiplicity_;
  return *this;
}

}  // namespace covertree
