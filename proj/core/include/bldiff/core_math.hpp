#pragma once

// Weights, injection functions and their homogeneous limit approximations.
//
// Component indices are zero-based throughout the library: component i = 0
// is the first differentiator state. A differentiator of order n has n
// states and n + 1 weights per limit.

#include <cmath>
#include <span>
#include <vector>

namespace bldiff {

/// Order and the pair of homogeneity degrees (0-limit, infinity-limit).
struct DegreeConfig {
  int n = 2;
  double d0 = 0.0;
  double dinf = 0.0;
};

/// Throws ConfigError naming the violated bound unless
/// -1 <= d0 <= dinf < 1/(n-1) and n >= 1.
void validate(const DegreeConfig& cfg);

/// Homogeneity weights of both limits plus the cached injection exponents.
struct WeightVectors {
  /// r0[i] = 1 - (n-1-i) d0 for i = 0..n, so r0[n-1] = 1.
  std::vector<double> r0;
  std::vector<double> rinf;
  /// exp0[i] = r0[i+1] / r0[i], expinf[i] = rinf[i+1] / rinf[i], i = 0..n-1.
  std::vector<double> exp0;
  std::vector<double> expinf;

  int order() const { return static_cast<int>(exp0.size()); }
};

WeightVectors compute_weights(const DegreeConfig& cfg);

/// Internal gains weighting the low-power (kappa) and high-power (theta)
/// term of every injection function.
struct InternalGains {
  std::vector<double> kappa;
  std::vector<double> theta;

  /// kappa_i = mu, theta_i = 1 - mu with mu in (0, 1).
  static InternalGains from_mu(int n, double mu);
  static InternalGains uniform(int n, double kappa, double theta);

  int order() const { return static_cast<int>(kappa.size()); }
};

/// Throws ConfigError unless both sequences have n strictly positive entries.
void validate(const InternalGains& gains, int n);

/// Signed power |s|^p sign(s). For p = 0 this is sign(s) with sign(0) = 0.
inline double spow(double s, double p) {
  if (s == 0.0) return 0.0;
  const double mag = p == 0.0 ? 1.0 : std::pow(std::fabs(s), p);
  return std::signbit(s) ? -mag : mag;
}

/// Single injection stage varphi_i(s) = kappa_i |s|^a sign(s) + theta_i |s|^b sign(s).
double varphi_eval(int i, double s, const WeightVectors& w, const InternalGains& g);

/// Derivative of varphi_i at s != 0 (infinite at 0 when the low power is < 1).
double varphi_derivative(int i, double s, const WeightVectors& w, const InternalGains& g);

/// Composed injection phi_i = varphi_i o ... o varphi_0.
double phi_eval(int i, double z, const WeightVectors& w, const InternalGains& g);

/// Fills out[i] = phi_i(z) for all i = 0..n-1 in one pass.
///
/// With boundary_layer > 0 a zero exponent (the discontinuous stage) uses the
/// saturation clamp(s / boundary_layer, -1, 1) in place of sign(s).
void phi_all(double z, const WeightVectors& w, const InternalGains& g, std::span<double> out,
             double boundary_layer = 0.0);

/// Magnitude of the sign term in the last stage: kappa_{n-1} when d0 = -1,
/// plus theta_{n-1} when dinf = -1 as well. Zero for a continuous injection.
double discontinuous_gain(const WeightVectors& w, const InternalGains& g);

/// Inverse of varphi_i by bracketed bisection. Requires both exponents of
/// stage i to be positive (always true for i < n-1).
double varphi_inverse(int i, double y, const WeightVectors& w, const InternalGains& g);

struct InverseTolerance {
  static constexpr double rtol = 1e-12;
  static constexpr double atol = 1e-300;
  static constexpr int max_iterations = 200;
};

/// Coefficients and powers of the homogeneous approximations
/// phi_{i,0}(s) = K0[i] |s|^{exponents0[i]} sign(s) and the infinity analogue.
struct HomogeneousApprox {
  std::vector<double> K0;
  std::vector<double> Kinf;
  std::vector<double> exponents0;
  std::vector<double> exponentsInf;

  double phi0(int i, double s) const { return K0[i] * spow(s, exponents0[i]); }
  double phiInf(int i, double s) const { return Kinf[i] * spow(s, exponentsInf[i]); }
};

HomogeneousApprox homog_approx(const DegreeConfig& cfg, const WeightVectors& w,
                               const InternalGains& g);

}  // namespace bldiff
