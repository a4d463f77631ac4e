#include "bldiff/ladder.hpp"

#include <cmath>
#include <string>

#include "bldiff/errors.hpp"

namespace bldiff {

namespace {

void require_positive(const std::vector<double>& v, const char* name) {
  if (v.empty()) throw ConfigError(std::string(name) + " must not be empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
      throw ConfigError(std::string(name) + "[" + std::to_string(i) +
                        "] must be positive and finite");
    }
  }
}

}  // namespace

GainLadder GainLadder::from_gains(std::vector<double> k) {
  require_positive(k, "k");
  GainLadder ladder;
  ladder.ktilde_.resize(k.size());
  double prev = 1.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    ladder.ktilde_[i] = k[i] / prev;
    prev = k[i];
  }
  ladder.k_ = std::move(k);
  return ladder;
}

GainLadder GainLadder::from_ratios(std::vector<double> ktilde) {
  require_positive(ktilde, "ktilde");
  GainLadder ladder;
  ladder.k_.resize(ktilde.size());
  double prod = 1.0;
  for (std::size_t i = 0; i < ktilde.size(); ++i) {
    prod *= ktilde[i];
    ladder.k_[i] = prod;
  }
  ladder.ktilde_ = std::move(ktilde);
  return ladder;
}

}  // namespace bldiff
