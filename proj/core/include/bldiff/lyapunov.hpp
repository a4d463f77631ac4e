#pragma once

// Smooth bl-homogeneous Lyapunov function of the normalized error dynamics,
// its worst-case derivative bound and the sampled decay certificate.

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bldiff/core_math.hpp"
#include "bldiff/ladder.hpp"
#include "bldiff/sampling.hpp"

namespace bldiff {

struct LyapunovParams {
  double p0 = 0.0;
  double pinf = 0.0;
  std::vector<double> beta0;
  std::vector<double> betainf;

  /// Smallest admissible exponents with unit beta coefficients.
  static LyapunovParams defaults(const WeightVectors& w);
};

/// Smallest p0 and pinf meeting the lower bounds, with pinf then inflated by
/// kPinfInflation until p0 / r0_i < pinf / rinf_i holds for every i.
std::pair<double, double> default_p(const WeightVectors& w);
inline constexpr double kPinfInflation = 1.05;

struct PCheck {
  bool ok = false;
  /// Zero-based index of the first violation, -1 when ok.
  int index = -1;
  std::string diagnostic;
};

/// Checks the lower bounds on p0, pinf and the strict ordering p0/r0_i < pinf/rinf_i.
PCheck check_p(double p0, double pinf, const WeightVectors& w);

class LyapunovFunction {
 public:
  LyapunovFunction(WeightVectors weights, InternalGains gains, LyapunovParams params);

  int order() const { return weights_.order(); }
  const WeightVectors& weights() const { return weights_; }
  const InternalGains& gains() const { return gains_; }
  const LyapunovParams& params() const { return params_; }

  /// xi_i = varphi_i^{-1}(z_next) for i < n-1, and 0 for the last component.
  double xi(int i, double z_next) const;

  /// Z_i(z_i, z_{i+1}); the last component ignores z_next.
  double Z(int i, double zi, double z_next) const;
  double Z_xi(int i, double zi, double xi) const;

  double V(std::span<const double> z) const;

  /// dZ_i/dz_i
  double sigma(int i, double zi, double z_next) const;
  double sigma_xi(int i, double zi, double xi) const;
  /// dZ_i/dz_{i+1}; identically zero for the last component.
  double s(int i, double zi, double z_next) const;
  double s_xi(int i, double zi, double xi) const;

  /// dV/dz
  std::vector<double> gradient(std::span<const double> z) const;

  /// Upper envelope of dV/dt over the error dynamics with |delta_bar| <= Delta / k_{n-1}
  /// and sign(0) read as [-1, 1]. Throws ConfigError if Delta > 0 with d0 > -1
  /// or Delta >= discontinuous_gain * k_{n-1}.
  double W_star(std::span<const double> z, const GainLadder& ladder, double Delta) const;

 private:
  WeightVectors weights_;
  InternalGains gains_;
  LyapunovParams params_;
};

/// Rejects perturbation bounds the discontinuous injection cannot dominate.
void check_perturbation_bound(const WeightVectors& w, const InternalGains& g,
                              const GainLadder& ladder, double Delta);

struct DecayCertificate {
  double eta0 = 0.0;
  double etainf = 0.0;
  /// Fixed-time bound, present when d0 < 0 < dinf.
  std::optional<double> Tbar;
  std::size_t sample_count = 0;
  std::size_t ratio_samples = 0;
  /// Smallest sampled -W*/(V^a + V^b), before the safety factor.
  double min_margin = 0.0;
  /// Largest sampled W* (negative for a certificate).
  double max_w_star = 0.0;
};

struct CertifyOptions {
  SamplingPlan plan;
  double safety_factor = 2.0;
  /// Samples with V^a + V^b below this are excluded from the ratio.
  double ratio_floor = 1e-12;
};

/// Sampled decay certificate. Throws CertificationError at the first sample
/// with W* >= 0.
DecayCertificate estimate_eta(const LyapunovFunction& lyap, const DegreeConfig& degrees,
                              const GainLadder& ladder, double Delta,
                              const CertifyOptions& options = {});

/// Settling-time bound from the two-term decay inequality. Requires
/// d0 < 0 < dinf and positive rates; throws NumericalError on a non-positive result.
double fixed_time_bound(double eta0, double etainf, double p0, double pinf, double d0,
                        double dinf);

}  // namespace bldiff
