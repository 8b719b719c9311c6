#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace nethedge {

/// Walker/Vose alias table: O(n) build, O(1) draws from a discrete
/// distribution given by non-negative weights.
class AliasTable {
 public:
  AliasTable() = default;
  /// Weights need not be normalized; at least one must be positive.
  explicit AliasTable(std::span<const double> weights);

  template <typename Rng>
  [[nodiscard]] std::size_t sample(Rng& rng) const {
    const double x = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * static_cast<double>(prob_.size());
    auto i = static_cast<std::size_t>(x);
    if (i >= prob_.size()) i = prob_.size() - 1;
    return (x - static_cast<double>(i)) < prob_[i] ? i : alias_[i];
  }

  [[nodiscard]] std::size_t size() const { return prob_.size(); }
  [[nodiscard]] bool empty() const { return prob_.empty(); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace nethedge
