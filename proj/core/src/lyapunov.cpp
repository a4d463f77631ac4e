#include "bldiff/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bldiff/errors.hpp"

namespace bldiff {

namespace {

// Bregman divergence of |x|^q / q between z and xi:
//   |z|^q / q - z sign(xi)|xi|^{q-1} + (1 - 1/q)|xi|^q  >= 0.
double bregman(double z, double xi, double q) {
  if (xi == 0.0) return std::pow(std::fabs(z), q) / q;
  const double u = z / xi;
  if (u > 0.5 && u < 1.5) {
    // |xi|^q h(u) with h(u) = (u^q - 1)/q - (u - 1), evaluated without cancellation.
    const double w = u - 1.0;
    const double h = std::expm1(q * std::log1p(w)) / q - w;
    return std::max(0.0, std::pow(std::fabs(xi), q) * h);
  }
  const double direct = std::pow(std::fabs(z), q) / q - z * spow(xi, q - 1.0) +
                        (1.0 - 1.0 / q) * std::pow(std::fabs(xi), q);
  return std::max(0.0, direct);
}

// |xi|^{q-2} / varphi_i'(xi), finite at xi = 0 whenever q - 1 - a >= 0.
double weighted_inverse_slope(int i, double xi, double q, const WeightVectors& w,
                              const InternalGains& g) {
  const double a = w.exp0[i];
  const double b = w.expinf[i];
  const double mag = std::fabs(xi);
  const double denom = g.kappa[i] * a + g.theta[i] * b * std::pow(mag, b - a);
  const double e = q - 1.0 - a;
  if (mag == 0.0) {
    if (e > 0.0) return 0.0;
    if (e == 0.0) return 1.0 / denom;
    return std::numeric_limits<double>::infinity();
  }
  return std::pow(mag, e) / denom;
}

}  // namespace

LyapunovParams LyapunovParams::defaults(const WeightVectors& w) {
  const auto [p0, pinf] = default_p(w);
  const int n = w.order();
  return LyapunovParams{p0, pinf, std::vector<double>(n, 1.0), std::vector<double>(n, 1.0)};
}

std::pair<double, double> default_p(const WeightVectors& w) {
  const int n = w.order();
  const double dinf = w.rinf[n] - w.rinf[n - 1];
  double p0 = 0.0;
  double rinf_max = 0.0;
  for (int i = 0; i < n; ++i) {
    p0 = std::max(p0, w.r0[i] / w.rinf[i] * (2.0 * w.rinf[i] + dinf));
    rinf_max = std::max(rinf_max, w.rinf[i]);
  }
  double pinf = 2.0 * rinf_max + dinf;
  auto ordered = [&] {
    for (int i = 0; i < n; ++i) {
      if (!(p0 / w.r0[i] < pinf / w.rinf[i])) return false;
    }
    return true;
  };
  while (!ordered()) pinf *= kPinfInflation;
  return {p0, pinf};
}

PCheck check_p(double p0, double pinf, const WeightVectors& w) {
  const int n = w.order();
  const double dinf = w.rinf[n] - w.rinf[n - 1];
  PCheck result;
  std::ostringstream msg;
  msg.precision(17);
  if (!(p0 > 0.0) || !(pinf > 0.0)) {
    result.diagnostic = "p0 and pinf must be positive";
    return result;
  }
  double p0_min = 0.0;
  int p0_arg = 0;
  double rinf_max = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cand = w.r0[i] / w.rinf[i] * (2.0 * w.rinf[i] + dinf);
    if (cand > p0_min) {
      p0_min = cand;
      p0_arg = i;
    }
    rinf_max = std::max(rinf_max, w.rinf[i]);
  }
  if (p0 < p0_min) {
    result.index = p0_arg;
    msg << "p0 = " << p0 << " is below the lower bound " << p0_min << " set by component "
        << p0_arg;
    result.diagnostic = msg.str();
    return result;
  }
  const double pinf_min = 2.0 * rinf_max + dinf;
  if (pinf < pinf_min) {
    msg << "pinf = " << pinf << " is below the lower bound " << pinf_min;
    result.diagnostic = msg.str();
    return result;
  }
  bool homogeneous = true;
  for (int i = 0; i <= n; ++i) homogeneous = homogeneous && w.r0[i] == w.rinf[i];
  for (int i = 0; i < n; ++i) {
    if (!(p0 / w.r0[i] < pinf / w.rinf[i])) {
      result.index = i;
      msg << "p0/r0[" << i << "] = " << p0 / w.r0[i] << " is not below pinf/rinf[" << i
          << "] = " << pinf / w.rinf[i];
      if (homogeneous && p0 == pinf) {
        msg << " (homogeneous case: equal weights with p0 = pinf collapse both limit approximations into one)";
      }
      result.diagnostic = msg.str();
      return result;
    }
  }
  result.ok = true;
  return result;
}

LyapunovFunction::LyapunovFunction(WeightVectors weights, InternalGains gains,
                                   LyapunovParams params)
    : weights_(std::move(weights)), gains_(std::move(gains)), params_(std::move(params)) {
  const int n = weights_.order();
  validate(gains_, n);
  if (static_cast<int>(params_.beta0.size()) != n ||
      static_cast<int>(params_.betainf.size()) != n) {
    throw ConfigError("Lyapunov beta0/betainf need " + std::to_string(n) + " entries");
  }
  for (int i = 0; i < n; ++i) {
    if (!(params_.beta0[i] > 0.0) || !(params_.betainf[i] > 0.0)) {
      throw ConfigError("Lyapunov beta coefficients must be positive");
    }
  }
  const PCheck check = check_p(params_.p0, params_.pinf, weights_);
  if (!check.ok) throw ConfigError("invalid Lyapunov exponents: " + check.diagnostic);
}

double LyapunovFunction::xi(int i, double z_next) const {
  if (i == order() - 1) return 0.0;
  return varphi_inverse(i, z_next, weights_, gains_);
}

double LyapunovFunction::Z_xi(int i, double zi, double xi) const {
  const double q0 = params_.p0 / weights_.r0[i];
  const double qinf = params_.pinf / weights_.rinf[i];
  return params_.beta0[i] * bregman(zi, xi, q0) + params_.betainf[i] * bregman(zi, xi, qinf);
}

double LyapunovFunction::Z(int i, double zi, double z_next) const {
  return Z_xi(i, zi, xi(i, z_next));
}

double LyapunovFunction::V(std::span<const double> z) const {
  const int n = order();
  double v = 0.0;
  for (int i = 0; i < n; ++i) v += Z(i, z[i], i + 1 < n ? z[i + 1] : 0.0);
  return v;
}

double LyapunovFunction::sigma_xi(int i, double zi, double xi) const {
  const double q0 = params_.p0 / weights_.r0[i];
  const double qinf = params_.pinf / weights_.rinf[i];
  return params_.beta0[i] * (spow(zi, q0 - 1.0) - spow(xi, q0 - 1.0)) +
         params_.betainf[i] * (spow(zi, qinf - 1.0) - spow(xi, qinf - 1.0));
}

double LyapunovFunction::sigma(int i, double zi, double z_next) const {
  return sigma_xi(i, zi, xi(i, z_next));
}

double LyapunovFunction::s_xi(int i, double zi, double xi) const {
  if (i == order() - 1) return 0.0;
  const double q0 = params_.p0 / weights_.r0[i];
  const double qinf = params_.pinf / weights_.rinf[i];
  const double d = zi - xi;
  return -params_.beta0[i] * (q0 - 1.0) * d * weighted_inverse_slope(i, xi, q0, weights_, gains_) -
         params_.betainf[i] * (qinf - 1.0) * d *
             weighted_inverse_slope(i, xi, qinf, weights_, gains_);
}

double LyapunovFunction::s(int i, double zi, double z_next) const {
  return s_xi(i, zi, xi(i, z_next));
}

std::vector<double> LyapunovFunction::gradient(std::span<const double> z) const {
  const int n = order();
  std::vector<double> grad(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double x = xi(i, i + 1 < n ? z[i + 1] : 0.0);
    grad[i] += sigma_xi(i, z[i], x);
    if (i + 1 < n) grad[i + 1] += s_xi(i, z[i], x);
  }
  return grad;
}

void check_perturbation_bound(const WeightVectors& w, const InternalGains& g,
                              const GainLadder& ladder, double Delta) {
  const int n = w.order();
  if (!(Delta >= 0.0)) throw ConfigError("Delta must be nonnegative");
  if (Delta == 0.0) return;
  if (w.exp0[n - 1] != 0.0) {
    throw ConfigError("Delta > 0 requires d0 = -1 (only the discontinuous injection is exact)");
  }
  const double authority = discontinuous_gain(w, g) * ladder.k(n - 1);
  if (!(Delta < authority)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Delta = " << Delta << " is not below the sign-term authority k_n kappa_n = " << authority;
    throw ConfigError(msg.str());
  }
}

double LyapunovFunction::W_star(std::span<const double> z, const GainLadder& ladder,
                                double Delta) const {
  const int n = order();
  check_perturbation_bound(weights_, gains_, ladder, Delta);
  const auto grad = gradient(z);
  std::vector<double> phi(n);
  phi_all(z[0], weights_, gains_, phi);
  double w = 0.0;
  for (int i = 0; i + 1 < n; ++i) w -= ladder.ktilde(i) * grad[i] * (phi[i] - z[i + 1]);
  const double g = grad[n - 1];
  const double kt = ladder.ktilde(n - 1);
  double last = -kt * g * phi[n - 1] + kt * std::fabs(g) * Delta / ladder.k(n - 1);
  if (z[0] == 0.0) {
    // sign(0) is the whole interval [-1, 1], so phi[n-1] ranges over the sign-term magnitude.
    last += kt * std::fabs(g) * discontinuous_gain(weights_, gains_);
  }
  return w + last;
}

DecayCertificate estimate_eta(const LyapunovFunction& lyap, const DegreeConfig& degrees,
                              const GainLadder& ladder, double Delta,
                              const CertifyOptions& options) {
  const int n = lyap.order();
  if (ladder.order() != n) throw ConfigError("gain ladder order mismatch");
  check_perturbation_bound(lyap.weights(), lyap.gains(), ladder, Delta);
  const auto& prm = lyap.params();
  const double a = (prm.p0 + degrees.d0) / prm.p0;
  const double b = (prm.pinf + degrees.dinf) / prm.pinf;

  DecayCertificate cert;
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_w = -std::numeric_limits<double>::infinity();
  const auto& w = lyap.weights();
  for_each_sample(options.plan, std::span(w.r0).first(n), std::span(w.rinf).first(n),
                  [&](const DilatedSample& smp) {
                    ++cert.sample_count;
                    const double ws = lyap.W_star(smp.z, ladder, Delta);
                    if (!(ws < 0.0)) {
                      std::ostringstream msg;
                      msg.precision(17);
                      msg << "W* = " << ws << " >= 0 at z = [";
                      for (int j = 0; j < n; ++j) msg << (j ? ", " : "") << smp.z[j];
                      msg << "]; gains are not certified";
                      throw CertificationError(
                          msg.str(), std::vector<double>(smp.z.begin(), smp.z.end()));
                    }
                    max_w = std::max(max_w, ws);
                    const double v = lyap.V(smp.z);
                    const double denom = std::pow(v, a) + std::pow(v, b);
                    if (!(denom >= options.ratio_floor) || !std::isfinite(denom)) return;
                    ++cert.ratio_samples;
                    min_ratio = std::min(min_ratio, -ws / denom);
                  });
  if (cert.ratio_samples == 0) {
    throw CertificationError("no sample passed the ratio floor; widen the sampling plan");
  }
  cert.min_margin = min_ratio;
  cert.max_w_star = max_w;
  cert.eta0 = min_ratio / options.safety_factor;
  cert.etainf = cert.eta0;
  if (degrees.d0 < 0.0 && degrees.dinf > 0.0) {
    cert.Tbar = fixed_time_bound(cert.eta0, cert.etainf, prm.p0, prm.pinf, degrees.d0,
                                 degrees.dinf);
  }
  return cert;
}

double fixed_time_bound(double eta0, double etainf, double p0, double pinf, double d0,
                        double dinf) {
  if (!(d0 < 0.0)) throw ConfigError("fixed-time bound requires d0 < 0");
  if (!(dinf > 0.0)) throw ConfigError("fixed-time bound requires dinf > 0");
  if (!(eta0 > 0.0) || !(etainf > 0.0)) throw ConfigError("decay rates must be positive");
  const double c = pinf * d0 / (p0 * dinf) - 1.0;
  const double t = p0 / (d0 * etainf) * c * std::pow(eta0 / etainf, 1.0 / c);
  if (!(t > 0.0) || !std::isfinite(t)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "fixed-time bound evaluated to " << t << " (expected a positive value)";
    throw NumericalError(msg.str());
  }
  return t;
}

}  // namespace bldiff
