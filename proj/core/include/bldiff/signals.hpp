#pragma once

// Base signals with analytic derivatives and bounded measurement noise.

#include <cstdint>
#include <optional>
#include <vector>

namespace bldiff {

/// a * sin(omega * t + phase)
struct Harmonic {
  double amplitude = 0.0;
  double omega = 0.0;
  double phase = 0.0;
};

struct NoiseSpec {
  enum class Kind { uniform_bounded, sinusoidal };

  Kind kind = Kind::uniform_bounded;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  /// Sinusoidal kind only: nu(t) = epsilon * sin(omega * t + phase).
  double omega = 0.0;
  double phase = 0.0;
  /// Optional step decay of the amplitude: epsilon * decay_factor^floor(t / decay_period).
  /// Disabled when decay_period <= 0.
  double decay_period = 0.0;
  double decay_factor = 1.0;

  /// Amplitude bound in force at time t.
  double amplitude_at(double t) const;
};

/// Signal class membership: polynomial of degree < n, or bounded n-th derivative.
enum class SignalClass { polynomial, lipschitz };

/// Base signal f0 = polynomial + sum of harmonics, differentiable up to `order`.
class SignalSpec {
 public:
  enum class Kind { polynomial, sinusoid_mix, custom_harmonic };

  /// Polynomial sum_k coefficients[k] t^k.
  static SignalSpec polynomial(int order, std::vector<double> coefficients);
  /// sum_k sin_amplitudes[k] sin(omegas[k] t) + cos_amplitudes[k] cos(omegas[k] t).
  static SignalSpec sinusoid_mix(int order, std::vector<double> omegas,
                                 std::vector<double> sin_amplitudes,
                                 std::vector<double> cos_amplitudes);
  /// Harmonics with arbitrary phases plus an optional polynomial trend.
  static SignalSpec custom_harmonic(int order, std::vector<Harmonic> harmonics,
                                    std::vector<double> trend = {});

  /// Sets Delta to 1.01 x the grid maximum of |f0^(order)| over [0, horizon].
  SignalSpec& with_auto_delta(double horizon);
  /// Declares Delta; throws ConfigError if the grid maximum over [0, horizon] exceeds it.
  SignalSpec& with_delta(double delta, double horizon);
  SignalSpec& with_noise(NoiseSpec noise);

  Kind kind() const { return kind_; }
  int order() const { return order_; }
  double delta() const { return delta_; }
  const std::optional<NoiseSpec>& noise() const { return noise_; }
  SignalClass signal_class() const;
  const std::vector<double>& coefficients() const { return coefficients_; }
  const std::vector<Harmonic>& harmonics() const { return harmonics_; }

  /// Exact derivative of the base signal f0 (no noise). Throws ConfigError for
  /// derivative_order > order().
  double eval(double t, int derivative_order) const;

  /// Measured sample f(t) = f0(t) + nu(t).
  double measured(double t) const;

  /// Maximum of |f0^(order)| over a uniform grid of `points` points on [0, horizon].
  double grid_max_top_derivative(double horizon, int points = 100000) const;

 private:
  SignalSpec(Kind kind, int order) : kind_(kind), order_(order) {}

  Kind kind_;
  int order_;
  std::vector<double> coefficients_;
  std::vector<Harmonic> harmonics_;
  double delta_ = 0.0;
  std::optional<NoiseSpec> noise_;
};

double eval_signal(const SignalSpec& spec, double t, int derivative_order);

/// Deterministic given (seed, t) and bounded by the amplitude in force at t.
double sample_noise(const NoiseSpec& spec, double t);

}  // namespace bldiff
