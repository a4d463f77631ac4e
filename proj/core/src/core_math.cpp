#include "bldiff/core_math.hpp"

#include <algorithm>
#include <sstream>

#include "bldiff/errors.hpp"

namespace bldiff {

void validate(const DegreeConfig& cfg) {
  std::ostringstream msg;
  if (cfg.n < 1) {
    msg << "order n = " << cfg.n << " must be at least 1";
    throw ConfigError(msg.str());
  }
  if (!std::isfinite(cfg.d0) || !std::isfinite(cfg.dinf)) {
    throw ConfigError("degrees d0 and dinf must be finite");
  }
  if (cfg.d0 < -1.0) {
    msg << "d0 = " << cfg.d0 << " violates -1 <= d0";
    throw ConfigError(msg.str());
  }
  if (cfg.d0 > cfg.dinf) {
    msg << "d0 = " << cfg.d0 << " > dinf = " << cfg.dinf << " violates d0 <= dinf";
    throw ConfigError(msg.str());
  }
  if (cfg.n >= 2) {
    const double upper = 1.0 / (cfg.n - 1);
    if (!(cfg.dinf < upper)) {
      msg << "dinf = " << cfg.dinf << " violates dinf < 1/(n-1) = " << upper;
      throw ConfigError(msg.str());
    }
  }
}

WeightVectors compute_weights(const DegreeConfig& cfg) {
  validate(cfg);
  const int n = cfg.n;
  WeightVectors w;
  w.r0.resize(n + 1);
  w.rinf.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double steps = static_cast<double>(n - 1 - i);
    w.r0[i] = 1.0 - steps * cfg.d0;
    w.rinf[i] = 1.0 - steps * cfg.dinf;
  }
  w.exp0.resize(n);
  w.expinf.resize(n);
  for (int i = 0; i < n; ++i) {
    w.exp0[i] = w.r0[i + 1] / w.r0[i];
    w.expinf[i] = w.rinf[i + 1] / w.rinf[i];
  }
  return w;
}

InternalGains InternalGains::from_mu(int n, double mu) {
  if (!(mu > 0.0 && mu < 1.0)) {
    throw ConfigError("mu must lie in (0, 1)");
  }
  return uniform(n, mu, 1.0 - mu);
}

InternalGains InternalGains::uniform(int n, double kappa, double theta) {
  return InternalGains{std::vector<double>(n, kappa), std::vector<double>(n, theta)};
}

void validate(const InternalGains& gains, int n) {
  if (static_cast<int>(gains.kappa.size()) != n || static_cast<int>(gains.theta.size()) != n) {
    std::ostringstream msg;
    msg << "internal gains need " << n << " kappa and theta entries, got " << gains.kappa.size()
        << " and " << gains.theta.size();
    throw ConfigError(msg.str());
  }
  for (int i = 0; i < n; ++i) {
    if (!(gains.kappa[i] > 0.0) || !(gains.theta[i] > 0.0) || !std::isfinite(gains.kappa[i]) ||
        !std::isfinite(gains.theta[i])) {
      std::ostringstream msg;
      msg << "internal gains must be positive and finite (component " << i << ")";
      throw ConfigError(msg.str());
    }
  }
}

namespace {

// varphi_i on |s| > 0; callers restore the sign.
inline double varphi_abs(int i, double mag, const WeightVectors& w, const InternalGains& g) {
  const double a = w.exp0[i];
  const double b = w.expinf[i];
  const double low = a == 0.0 ? 1.0 : std::pow(mag, a);
  return g.kappa[i] * low + g.theta[i] * std::pow(mag, b);
}

}  // namespace

double varphi_eval(int i, double s, const WeightVectors& w, const InternalGains& g) {
  if (s == 0.0) return 0.0;
  const double v = varphi_abs(i, std::fabs(s), w, g);
  return std::signbit(s) ? -v : v;
}

double varphi_derivative(int i, double s, const WeightVectors& w, const InternalGains& g) {
  const double mag = std::fabs(s);
  const double a = w.exp0[i];
  const double b = w.expinf[i];
  const double low = a == 0.0 ? 0.0 : g.kappa[i] * a * std::pow(mag, a - 1.0);
  return low + g.theta[i] * b * std::pow(mag, b - 1.0);
}

double phi_eval(int i, double z, const WeightVectors& w, const InternalGains& g) {
  double v = z;
  for (int j = 0; j <= i; ++j) v = varphi_eval(j, v, w, g);
  return v;
}

void phi_all(double z, const WeightVectors& w, const InternalGains& g, std::span<double> out,
             double boundary_layer) {
  double v = z;
  const int n = w.order();
  for (int j = 0; j < n; ++j) {
    if (boundary_layer > 0.0 && w.exp0[j] == 0.0) {
      const double sat = std::clamp(v / boundary_layer, -1.0, 1.0);
      v = g.kappa[j] * sat + g.theta[j] * spow(v, w.expinf[j]);
    } else {
      v = varphi_eval(j, v, w, g);
    }
    out[j] = v;
  }
}

double discontinuous_gain(const WeightVectors& w, const InternalGains& g) {
  const int n = w.order();
  double out = 0.0;
  if (w.exp0[n - 1] == 0.0) out += g.kappa[n - 1];
  if (w.expinf[n - 1] == 0.0) out += g.theta[n - 1];
  return out;
}

double varphi_inverse(int i, double y, const WeightVectors& w, const InternalGains& g) {
  const double a = w.exp0[i];
  const double b = w.expinf[i];
  if (!(a > 0.0 && b > 0.0)) {
    throw ConfigError("varphi_inverse: stage " + std::to_string(i) +
                      " is discontinuous and has no inverse");
  }
  if (y == 0.0) return 0.0;
  const double target = std::fabs(y);
  // Each branch alone overshoots the sum, so its inverse bounds the root.
  double hi = 2.0 * std::min(std::pow(target / g.kappa[i], 1.0 / a),
                             std::pow(target / g.theta[i], 1.0 / b));
  double lo = 0.0;
  const double tol = InverseTolerance::atol + InverseTolerance::rtol * target;
  for (int it = 0; it < InverseTolerance::max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) {
      return std::signbit(y) ? -mid : mid;
    }
    const double v = varphi_abs(i, mid, w, g);
    if (std::fabs(v - target) <= tol) {
      return std::signbit(y) ? -mid : mid;
    }
    (v < target ? lo : hi) = mid;
  }
  throw NumericalError("varphi_inverse: bisection exceeded " +
                       std::to_string(InverseTolerance::max_iterations) + " iterations for y = " +
                       std::to_string(y));
}

HomogeneousApprox homog_approx(const DegreeConfig& cfg, const WeightVectors& w,
                               const InternalGains& g) {
  const int n = cfg.n;
  HomogeneousApprox h;
  h.K0.assign(n, 1.0);
  h.Kinf.assign(n, 1.0);
  h.exponents0.resize(n);
  h.exponentsInf.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      // The last factor always carries power one; this also covers r0[n] = 0.
      const double e0 = j == i ? 1.0 : w.r0[i + 1] / w.r0[j + 1];
      const double einf = j == i ? 1.0 : w.rinf[i + 1] / w.rinf[j + 1];
      h.K0[i] *= std::pow(g.kappa[j], e0);
      h.Kinf[i] *= std::pow(g.theta[j], einf);
    }
    h.exponents0[i] = w.r0[i + 1] / w.r0[0];
    h.exponentsInf[i] = w.rinf[i + 1] / w.rinf[0];
  }
  return h;
}

}  // namespace bldiff
