#pragma once

// k-nearest-neighbour search in signal space and neighbour-averaging position
// estimation.
//
// Ordering everywhere is by (distance, entry index) ascending, so equal
// distances resolve to the lower map index. Search compares squared distances
// and takes the square root only when reporting.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wlanloc/core.hpp"

namespace wlanloc {

/// Exhaustive scan; the reference the kd-tree is tested against. k is clamped
/// to the map size. Throws InvariantError for k < 1, DimensionError on a
/// roster mismatch.
[[nodiscard]] std::vector<Neighbor> brute_force_k_nearest(const RadioMap& map,
                                                          const Fingerprint& query,
                                                          std::size_t k);

/// kd-tree over the fingerprints of a radio map.
///
/// Internal nodes split on the dimension of largest spread at the median;
/// leaves hold up to kLeafSize points. Every node keeps the tight bounding box
/// of its points, which gives the lower bound used for pruning. Immutable once
/// built, so concurrent queries are safe.
class NNIndex {
 public:
  static constexpr std::size_t kLeafSize = 8;

  /// Throws InvariantError for an empty map.
  explicit NNIndex(const RadioMap& map);

  [[nodiscard]] std::size_t size() const noexcept { return count_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return dim_; }
  [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }

  /// epsilon == 0 gives exactly the brute-force answer. With epsilon > 0 a
  /// subtree is skipped once its lower bound times (1 + epsilon) exceeds the
  /// current k-th best, so the i-th reported distance is at most (1 + epsilon)
  /// times the true i-th distance.
  [[nodiscard]] std::vector<Neighbor> k_nearest(const Fingerprint& query, std::size_t k,
                                                double epsilon = 0.0) const;

 private:
  struct Node {
    std::size_t begin;  // range in order_
    std::size_t end;
    std::int32_t left{-1};
    std::int32_t right{-1};
  };

  std::int32_t build(std::size_t begin, std::size_t end);
  [[nodiscard]] std::span<const double> point(std::size_t entry) const noexcept {
    return {points_.data() + entry * dim_, dim_};
  }
  [[nodiscard]] double box_lower_bound(std::size_t node, std::span<const double> q) const noexcept;

  std::size_t dim_;
  std::size_t count_;
  std::vector<double> points_;       // count_ x dim_, entry-major
  std::vector<std::size_t> order_;   // entry indices, grouped by node
  std::vector<Node> nodes_;
  std::vector<double> box_lo_;       // nodes_ x dim_
  std::vector<double> box_hi_;
};

[[nodiscard]] NNIndex build_index(const RadioMap& map);

[[nodiscard]] std::vector<Neighbor> k_nearest(const NNIndex& index, const Fingerprint& query,
                                              std::size_t k, double epsilon = 0.0);

/// Unweighted mean of the neighbours' grid positions.
[[nodiscard]] PositionEstimate estimate_position(const RadioMap& map,
                                                 std::span<const Neighbor> neighbors);

/// align -> k_nearest -> estimate. `index` must have been built from `map`.
[[nodiscard]] PositionEstimate locate(const RadioMap& map, const NNIndex& index,
                                      const ScanObservation& obs, std::int64_t k,
                                      double epsilon = 0.0);

}  // namespace wlanloc
