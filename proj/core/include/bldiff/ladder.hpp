#pragma once

#include <span>
#include <vector>

namespace bldiff {

/// Output-injection gains k_i and their ratios ktilde_i = k_i / k_{i-1} (k_{-1} = 1).
///
/// One representation is stored as given; the other is derived from it.
class GainLadder {
 public:
  GainLadder() = default;

  static GainLadder from_gains(std::vector<double> k);
  static GainLadder from_ratios(std::vector<double> ktilde);

  std::span<const double> k() const { return k_; }
  std::span<const double> ktilde() const { return ktilde_; }
  double k(int i) const { return k_[i]; }
  double ktilde(int i) const { return ktilde_[i]; }
  int order() const { return static_cast<int>(k_.size()); }

 private:
  std::vector<double> k_;
  std::vector<double> ktilde_;
};

}  // namespace bldiff
