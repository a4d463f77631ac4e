#pragma once

// Dilated-sphere sampling used by the decay certificate and gain synthesis.

#include <functional>
#include <span>
#include <vector>

namespace bldiff {

/// Directions on the unit sphere in `dim` dimensions from a Sobol sequence
/// pushed through the normal quantile. For dim = 1 this is {-1, +1}.
std::vector<std::vector<double>> sphere_directions(int dim, int count);

/// Radii 10^k for k = log10_min, log10_min + log10_step, ..., log10_max; every
/// direction is dilated once with the 0-limit weights and once with the
/// infinity-limit weights at each radius.
struct SamplingPlan {
  int directions = 2000;
  double log10_min = -3.0;
  double log10_max = 3.0;
  double log10_step = 0.5;

  std::vector<double> radii() const;
  std::size_t sample_count(bool both_dilations = true) const;
};

/// One sample of the plan.
struct DilatedSample {
  std::span<const double> z;
  std::size_t radius_index;
  double radius;
  bool infinity_weights;
};

/// Calls visit(sample) for every (radius, dilation, direction) triple. The
/// weight spans give the dilation exponents per coordinate.
void for_each_sample(const SamplingPlan& plan, std::span<const double> weights0,
                     std::span<const double> weightsInf,
                     const std::function<void(const DilatedSample&)>& visit);

}  // namespace bldiff
