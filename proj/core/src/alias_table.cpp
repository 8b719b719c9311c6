#include "nethedge/alias_table.hpp"

#include "nethedge/errors.hpp"

#include <cmath>
#include <numeric>

namespace nethedge {

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  double total = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw NumericalError("alias table: weights must be finite and non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw NumericalError("alias table: all weights are zero");

  prob_.assign(n, 0.0);
  alias_.resize(n);
  std::iota(alias_.begin(), alias_.end(), 0U);
  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large, zero;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    if (weights[i] == 0.0) {
      zero.push_back(i);
    } else {
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
  }
  // Zero-weight entries go on top of the stack so they are paired while
  // a large entry is still available.
  small.insert(small.end(), zero.rbegin(), zero.rend());
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = static_cast<std::uint32_t>(l);
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (const auto i : large) prob_[i] = 1.0;
  for (const auto i : small) prob_[i] = 1.0;
}

}  // namespace nethedge
