#include "parid/weight_index.hpp"

#include <bit>

namespace parid {

namespace {

constexpr std::size_t lowbit(std::size_t i) { return i & (~i + 1); }

} // namespace

void WeightIndex::rebuild(std::span<const double> weights) {
  const std::size_t n = weights.size();
  tree_.assign(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    tree_[i] += weights[i - 1];
    const std::size_t parent = i + lowbit(i);
    if (parent <= n)
      tree_[parent] += tree_[i];
  }
  top_bit_ = n == 0 ? 0 : std::bit_floor(n);
  updates_ = 0;
}

void WeightIndex::push_back(double weight) {
  const std::size_t i = tree_.size();
  // node i covers (i - lowbit(i), i]
  tree_.push_back(weight + prefix(i - 1) - prefix(i - lowbit(i)));
  top_bit_ = std::bit_floor(i);
  ++updates_;
}

void WeightIndex::add(std::size_t i, double delta) {
  for (std::size_t j = i + 1; j < tree_.size(); j += lowbit(j))
    tree_[j] += delta;
  ++updates_;
}

double WeightIndex::prefix(std::size_t i) const {
  double sum = 0.0;
  for (; i > 0; i -= lowbit(i))
    sum += tree_[i];
  return sum;
}

std::size_t WeightIndex::select(double r) const {
  const std::size_t n = size();
  std::size_t pos = 0;
  for (std::size_t step = top_bit_; step > 0; step >>= 1) {
    const std::size_t next = pos + step;
    if (next <= n && tree_[next] <= r) {
      pos = next;
      r -= tree_[next];
    }
  }
  return pos < n ? pos : n - 1;
}

} // namespace parid
