#include "bldiff/signals.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "bldiff/errors.hpp"

namespace bldiff {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// m-th derivative of sin(theta) expressed through sin/cos without phase shifts.
double sin_derivative(double theta, int m) {
  switch (m % 4) {
    case 0: return std::sin(theta);
    case 1: return std::cos(theta);
    case 2: return -std::sin(theta);
    default: return -std::cos(theta);
  }
}

void check_order(int order) {
  if (order < 0) throw ConfigError("signal order must be nonnegative");
}

}  // namespace

double NoiseSpec::amplitude_at(double t) const {
  if (decay_period <= 0.0) return epsilon;
  const double steps = std::floor(t / decay_period);
  return epsilon * std::pow(decay_factor, steps);
}

SignalSpec SignalSpec::polynomial(int order, std::vector<double> coefficients) {
  check_order(order);
  SignalSpec s(Kind::polynomial, order);
  s.coefficients_ = std::move(coefficients);
  return s;
}

SignalSpec SignalSpec::sinusoid_mix(int order, std::vector<double> omegas,
                                    std::vector<double> sin_amplitudes,
                                    std::vector<double> cos_amplitudes) {
  check_order(order);
  if (sin_amplitudes.size() != omegas.size() || cos_amplitudes.size() != omegas.size()) {
    throw ConfigError("sinusoid mix needs equally many omegas, sin and cos amplitudes");
  }
  SignalSpec s(Kind::sinusoid_mix, order);
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    if (sin_amplitudes[k] != 0.0) s.harmonics_.push_back({sin_amplitudes[k], omegas[k], 0.0});
    if (cos_amplitudes[k] != 0.0) {
      s.harmonics_.push_back({cos_amplitudes[k], omegas[k], std::acos(0.0)});
    }
  }
  return s;
}

SignalSpec SignalSpec::custom_harmonic(int order, std::vector<Harmonic> harmonics,
                                       std::vector<double> trend) {
  check_order(order);
  SignalSpec s(Kind::custom_harmonic, order);
  s.harmonics_ = std::move(harmonics);
  s.coefficients_ = std::move(trend);
  return s;
}

SignalSpec& SignalSpec::with_auto_delta(double horizon) {
  delta_ = 1.01 * grid_max_top_derivative(horizon);
  return *this;
}

SignalSpec& SignalSpec::with_delta(double delta, double horizon) {
  if (!(delta >= 0.0)) throw ConfigError("Delta must be nonnegative");
  const double observed = grid_max_top_derivative(horizon);
  if (observed > delta) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Delta = " << delta << " is not a bound: max |f0^(" << order_ << ")| on the grid is "
        << observed;
    throw ConfigError(msg.str());
  }
  delta_ = delta;
  return *this;
}

SignalSpec& SignalSpec::with_noise(NoiseSpec noise) {
  if (!(noise.epsilon >= 0.0)) throw ConfigError("noise epsilon must be nonnegative");
  if (noise.decay_period > 0.0 && !(noise.decay_factor >= 0.0 && noise.decay_factor <= 1.0)) {
    throw ConfigError("noise decay_factor must lie in [0, 1]");
  }
  noise_ = noise;
  return *this;
}

SignalClass SignalSpec::signal_class() const {
  if (!harmonics_.empty()) return SignalClass::lipschitz;
  return static_cast<int>(coefficients_.size()) <= order_ ? SignalClass::polynomial
                                                          : SignalClass::lipschitz;
}

double SignalSpec::eval(double t, int m) const {
  if (m < 0 || m > order_) {
    throw ConfigError("derivative order " + std::to_string(m) + " exceeds signal order " +
                      std::to_string(order_));
  }
  double value = 0.0;
  // Horner on the m-th derivative: sum_{k>=m} c_k k!/(k-m)! t^{k-m}.
  const int deg = static_cast<int>(coefficients_.size()) - 1;
  for (int k = deg; k >= m; --k) {
    double falling = 1.0;
    for (int j = 0; j < m; ++j) falling *= static_cast<double>(k - j);
    value = value * t + coefficients_[k] * falling;
  }
  for (const Harmonic& h : harmonics_) {
    value += h.amplitude * std::pow(h.omega, m) * sin_derivative(h.omega * t + h.phase, m);
  }
  return value;
}

double SignalSpec::measured(double t) const {
  const double base = eval(t, 0);
  return noise_ ? base + sample_noise(*noise_, t) : base;
}

double SignalSpec::grid_max_top_derivative(double horizon, int points) const {
  if (!(horizon > 0.0)) throw ConfigError("signal check horizon must be positive");
  double best = 0.0;
  for (int k = 0; k < points; ++k) {
    const double t = horizon * static_cast<double>(k) / (points - 1);
    best = std::max(best, std::fabs(eval(t, order_)));
  }
  return best;
}

double eval_signal(const SignalSpec& spec, double t, int derivative_order) {
  return spec.eval(t, derivative_order);
}

double sample_noise(const NoiseSpec& spec, double t) {
  const double amp = spec.amplitude_at(t);
  if (amp == 0.0) return 0.0;
  switch (spec.kind) {
    case NoiseSpec::Kind::sinusoidal:
      return amp * std::sin(spec.omega * t + spec.phase);
    case NoiseSpec::Kind::uniform_bounded: {
      const std::uint64_t h = splitmix64(spec.seed ^ splitmix64(std::bit_cast<std::uint64_t>(t)));
      const double u = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0, 1)
      return amp * (2.0 * u - 1.0);
    }
  }
  return 0.0;
}

}  // namespace bldiff
