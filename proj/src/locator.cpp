#include "wlanloc/locator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace wlanloc {

namespace {

struct Candidate {
  double d2;
  std::size_t index;

  bool operator<(const Candidate& o) const noexcept {
    return d2 < o.d2 || (d2 == o.d2 && index < o.index);
  }
};

/// Bounded max-heap of the best k candidates under (d2, index) ordering.
class BestK {
 public:
  explicit BestK(std::size_t k) : k_(k) { heap_.reserve(k + 1); }

  [[nodiscard]] bool full() const noexcept { return heap_.size() == k_; }
  [[nodiscard]] double worst_d2() const noexcept { return heap_.front().d2; }

  void offer(Candidate c) {
    if (!full()) {
      heap_.push_back(c);
      std::push_heap(heap_.begin(), heap_.end());
    } else if (c < heap_.front()) {
      std::pop_heap(heap_.begin(), heap_.end());
      heap_.back() = c;
      std::push_heap(heap_.begin(), heap_.end());
    }
  }

  [[nodiscard]] std::vector<Neighbor> sorted() && {
    std::sort_heap(heap_.begin(), heap_.end());
    std::vector<Neighbor> out;
    out.reserve(heap_.size());
    for (const auto& c : heap_) out.push_back(Neighbor{c.index, std::sqrt(c.d2)});
    return out;
  }

 private:
  std::size_t k_;
  std::vector<Candidate> heap_;
};

void check_query(const RadioMap& map, const Fingerprint& query, std::size_t k) {
  if (k < 1) throw InvariantError("k must be at least 1");
  if (query.dimension() != map.dimension()) {
    throw DimensionError("query has " + std::to_string(query.dimension()) +
                         " values but the map roster has " + std::to_string(map.dimension()));
  }
}

}  // namespace

std::vector<Neighbor> brute_force_k_nearest(const RadioMap& map, const Fingerprint& query,
                                            std::size_t k) {
  check_query(map, query, k);
  const auto& entries = map.entries();
  std::vector<Candidate> all;
  all.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    all.push_back(Candidate{squared_distance(query.values(), entries[i].fp.values()), i});
  }
  const std::size_t take = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end());
  std::vector<Neighbor> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(Neighbor{all[i].index, std::sqrt(all[i].d2)});
  return out;
}

// ---------------------------------------------------------------------------

NNIndex::NNIndex(const RadioMap& map) : dim_(map.dimension()), count_(map.size()) {
  if (map.empty()) throw InvariantError("cannot index an empty radio map");
  points_.reserve(count_ * dim_);
  for (const auto& e : map.entries()) {
    points_.insert(points_.end(), e.fp.values().begin(), e.fp.values().end());
  }
  order_.resize(count_);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  build(0, count_);
}

std::int32_t NNIndex::build(std::size_t begin, std::size_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});

  std::vector<double> lo(dim_, 0.0);
  std::vector<double> hi(dim_, 0.0);
  for (std::size_t d = 0; d < dim_; ++d) {
    lo[d] = hi[d] = point(order_[begin])[d];
    for (std::size_t i = begin + 1; i < end; ++i) {
      const double v = point(order_[i])[d];
      lo[d] = std::min(lo[d], v);
      hi[d] = std::max(hi[d], v);
    }
  }
  box_lo_.insert(box_lo_.end(), lo.begin(), lo.end());
  box_hi_.insert(box_hi_.end(), hi.begin(), hi.end());

  if (end - begin <= kLeafSize) return id;

  std::size_t split_dim = 0;
  double best_spread = -1.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    if (hi[d] - lo[d] > best_spread) {
      best_spread = hi[d] - lo[d];
      split_dim = d;
    }
  }
  if (best_spread <= 0.0) return id;  // all points coincide

  const std::size_t mid = begin + (end - begin) / 2;
  const auto by_coord = [&](std::size_t a, std::size_t b) {
    const double va = point(a)[split_dim];
    const double vb = point(b)[split_dim];
    return va < vb || (va == vb && a < b);
  };
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end), by_coord);

  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

// Summed in slot order like squared_distance, so for any point inside the box
// the bound never exceeds that point's computed squared distance.
double NNIndex::box_lower_bound(std::size_t node, std::span<const double> q) const noexcept {
  const double* lo = box_lo_.data() + node * dim_;
  const double* hi = box_hi_.data() + node * dim_;
  double sum = 0.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    double gap = 0.0;
    if (q[d] < lo[d]) {
      gap = lo[d] - q[d];
    } else if (q[d] > hi[d]) {
      gap = q[d] - hi[d];
    }
    sum += gap * gap;
  }
  return sum;
}

std::vector<Neighbor> NNIndex::k_nearest(const Fingerprint& query, std::size_t k,
                                         double epsilon) const {
  if (k < 1) throw InvariantError("k must be at least 1");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw InvariantError("epsilon must be a finite non-negative number");
  }
  if (query.dimension() != dim_) {
    throw DimensionError("query has " + std::to_string(query.dimension()) +
                         " values but the index has dimension " + std::to_string(dim_));
  }
  const auto q = query.values();
  const double inflate = (1.0 + epsilon) * (1.0 + epsilon);
  BestK best(std::min(k, count_));

  const auto prunable = [&](double lower_bound) {
    return best.full() && lower_bound * inflate > best.worst_d2();
  };

  // Explicit stack; near child is pushed last so it is popped first.
  std::vector<std::pair<std::int32_t, double>> stack;
  stack.emplace_back(0, box_lower_bound(0, q));
  while (!stack.empty()) {
    const auto [id, bound] = stack.back();
    stack.pop_back();
    if (prunable(bound)) continue;
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (node.left < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::size_t entry = order_[i];
        best.offer(Candidate{squared_distance(q, point(entry)), entry});
      }
      continue;
    }
    const double lb_left = box_lower_bound(static_cast<std::size_t>(node.left), q);
    const double lb_right = box_lower_bound(static_cast<std::size_t>(node.right), q);
    if (lb_left <= lb_right) {
      stack.emplace_back(node.right, lb_right);
      stack.emplace_back(node.left, lb_left);
    } else {
      stack.emplace_back(node.left, lb_left);
      stack.emplace_back(node.right, lb_right);
    }
  }
  return std::move(best).sorted();
}

NNIndex build_index(const RadioMap& map) { return NNIndex{map}; }

std::vector<Neighbor> k_nearest(const NNIndex& index, const Fingerprint& query, std::size_t k,
                                double epsilon) {
  return index.k_nearest(query, k, epsilon);
}

// ---------------------------------------------------------------------------

PositionEstimate estimate_position(const RadioMap& map, std::span<const Neighbor> neighbors) {
  if (neighbors.empty()) throw InvariantError("cannot estimate a position from zero neighbours");
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& n : neighbors) {
    if (n.index >= map.size()) {
      throw InvariantError("neighbour index " + std::to_string(n.index) + " is not in the map");
    }
    sx += map.entries()[n.index].pos.x;
    sy += map.entries()[n.index].pos.y;
  }
  const auto count = static_cast<double>(neighbors.size());
  return PositionEstimate{Point2{sx / count, sy / count},
                          std::vector<Neighbor>(neighbors.begin(), neighbors.end())};
}

PositionEstimate locate(const RadioMap& map, const NNIndex& index, const ScanObservation& obs,
                        std::int64_t k, double epsilon) {
  if (k < 1) throw InvariantError("k must be at least 1");
  if (index.size() != map.size() || index.dimension() != map.dimension()) {
    throw DimensionError("index was not built from this radio map");
  }
  const Fingerprint fp = align_fingerprint(obs, map.roster());
  const auto neighbors = index.k_nearest(fp, static_cast<std::size_t>(k), epsilon);
  return estimate_position(map, neighbors);
}

}  // namespace wlanloc
