#include "bldiff/sampling.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/random/sobol.hpp>
#include <cmath>

#include "bldiff/errors.hpp"

namespace bldiff {

std::vector<std::vector<double>> sphere_directions(int dim, int count) {
  if (dim < 1) throw ConfigError("sampling dimension must be positive");
  if (count < 1) throw ConfigError("direction count must be positive");
  if (dim == 1) return {{-1.0}, {1.0}};

  boost::random::sobol gen(static_cast<std::size_t>(dim));
  // The first Sobol point is the origin; skip it.
  gen.discard(static_cast<boost::uintmax_t>(dim));
  const double scale = static_cast<double>(gen.max()) + 1.0;

  std::vector<std::vector<double>> dirs;
  dirs.reserve(count);
  std::vector<double> v(dim);
  while (static_cast<int>(dirs.size()) < count) {
    double norm2 = 0.0;
    for (int j = 0; j < dim; ++j) {
      const double u = (static_cast<double>(gen()) + 0.5) / scale;
      v[j] = std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
      norm2 += v[j] * v[j];
    }
    if (!(norm2 > 0.0)) continue;
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
    dirs.push_back(v);
  }
  return dirs;
}

std::vector<double> SamplingPlan::radii() const {
  if (!(log10_step > 0.0) || log10_max < log10_min) {
    throw ConfigError("sampling plan needs log10_step > 0 and log10_max >= log10_min");
  }
  std::vector<double> out;
  const int count = static_cast<int>(std::floor((log10_max - log10_min) / log10_step + 1e-9)) + 1;
  for (int k = 0; k < count; ++k) out.push_back(std::pow(10.0, log10_min + k * log10_step));
  return out;
}

std::size_t SamplingPlan::sample_count(bool both_dilations) const {
  return radii().size() * static_cast<std::size_t>(directions) * (both_dilations ? 2u : 1u);
}

void for_each_sample(const SamplingPlan& plan, std::span<const double> weights0,
                     std::span<const double> weightsInf,
                     const std::function<void(const DilatedSample&)>& visit) {
  const int dim = static_cast<int>(weights0.size());
  const auto dirs = sphere_directions(dim, plan.directions);
  const auto radii = plan.radii();
  std::vector<double> z(dim);
  for (std::size_t r = 0; r < radii.size(); ++r) {
    for (int which = 0; which < 2; ++which) {
      const auto weights = which == 0 ? weights0 : weightsInf;
      std::vector<double> scale(dim);
      for (int j = 0; j < dim; ++j) scale[j] = std::pow(radii[r], weights[j]);
      for (const auto& u : dirs) {
        for (int j = 0; j < dim; ++j) z[j] = scale[j] * u[j];
        visit(DilatedSample{z, r, radii[r], which == 1});
      }
    }
  }
}

}  // namespace bldiff
