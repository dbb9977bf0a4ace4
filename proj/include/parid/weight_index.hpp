#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace parid {

/// Fenwick tree over positive per-vertex weights with O(log n) weighted
/// selection, point update and append.
class WeightIndex {
public:
  WeightIndex() = default;
  explicit WeightIndex(std::span<const double> weights) { rebuild(weights); }

  void rebuild(std::span<const double> weights);
  void push_back(double weight);
  void add(std::size_t i, double delta);

  /// Sum of weights [0, i).
  double prefix(std::size_t i) const;
  double total() const { return prefix(size()); }

  /// Smallest i with prefix(i + 1) > r, for 0 <= r < total().
  std::size_t select(double r) const;

  std::size_t size() const { return tree_.size() - 1; }
  std::uint64_t updates_since_rebuild() const { return updates_; }

private:
  std::vector<double> tree_ = std::vector<double>(1, 0.0); // 1-based
  std::size_t top_bit_ = 0;
  std::uint64_t updates_ = 0;
};

} // namespace parid
