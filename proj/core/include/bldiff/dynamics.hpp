#pragma once

// Right-hand sides of the differentiator and of its normalized error
// dynamics, and the fixed-step forward-Euler integrator.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bldiff/core_math.hpp"
#include "bldiff/ladder.hpp"
#include "bldiff/signals.hpp"

namespace bldiff {

/// Complete parameterization of a differentiator.
struct DifferentiatorConfig {
  DegreeConfig degrees;
  WeightVectors weights;
  InternalGains gains;
  GainLadder ladder;

  /// Validates every block and computes the weights.
  static DifferentiatorConfig make(DegreeConfig degrees, InternalGains gains, GainLadder ladder);

  int order() const { return degrees.n; }
};

/// x' = [-k_i phi_i(x_0 - f) + x_{i+1}]_i, last row -k_{n-1} phi_{n-1}(x_0 - f).
void differentiator_rhs(std::span<const double> x, double f_sample,
                        const DifferentiatorConfig& cfg, std::span<double> out,
                        double boundary_layer = 0.0);

/// z' = [-ktilde_i (phi_i(z_0 - nu) - z_{i+1})]_i, last row
/// -ktilde_{n-1} (phi_{n-1}(z_0 - nu) - delta_bar).
void error_rhs(std::span<const double> z, double nu, double delta_bar,
               const DifferentiatorConfig& cfg, std::span<double> out,
               double boundary_layer = 0.0);

/// z_i = e_i / k_{i-1} with k_{-1} = 1.
std::vector<double> error_to_z(std::span<const double> e, const GainLadder& ladder);
std::vector<double> z_to_error(std::span<const double> z, const GainLadder& ladder);

enum class RhsKind { full, error };

/// Uniformly sampled simulation record. States are x (full) or z (error form);
/// `errors` always holds e_i = x_i - f0^(i).
class Trajectory {
 public:
  Trajectory(RhsKind kind, int n, double dt) : kind_(kind), n_(n), dt_(dt) {}

  RhsKind kind() const { return kind_; }
  int order() const { return n_; }
  /// Spacing between recorded samples.
  double dt() const { return dt_; }
  std::size_t size() const { return times_.size(); }

  double time(std::size_t k) const { return times_[k]; }
  std::span<const double> state(std::size_t k) const { return {states_.data() + k * n_, static_cast<std::size_t>(n_)}; }
  std::span<const double> error(std::size_t k) const { return {errors_.data() + k * n_, static_cast<std::size_t>(n_)}; }
  double error_norm(std::size_t k) const { return norms_[k]; }
  /// NaN unless a Lyapunov value was attached.
  double lyapunov(std::size_t k) const { return values_.empty() ? std::nan("") : values_[k]; }
  bool has_lyapunov() const { return !values_.empty(); }

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& norms() const { return norms_; }

  void push(double t, std::span<const double> state, std::span<const double> error);
  void set_lyapunov(std::vector<double> values);
  void reserve(std::size_t samples);

  /// Free-form description of the run (used in emitted tables).
  std::string metadata;

 private:
  RhsKind kind_;
  int n_;
  double dt_;
  std::vector<double> times_;
  std::vector<double> states_;
  std::vector<double> errors_;
  std::vector<double> norms_;
  std::vector<double> values_;
};

struct IntegrateOptions {
  double dt = 1e-4;
  double t_final = 1.0;
  int record_every = 1;
  double t0 = 0.0;
  /// Width of the optional boundary layer replacing sign(); 0 keeps the exact
  /// discontinuous injection.
  double boundary_layer = 0.0;
  /// Divergence guard: abort once the state norm exceeds guard_factor * (1 + |initial|).
  double guard_factor = 1e12;
};

/// Forward-Euler simulation at fixed dt. `initial` is x(t0) for the full form
/// and z(t0) for the error form. Noise (if any) is held constant over each step.
/// Throws DivergenceError if the state becomes non-finite or exceeds the guard.
Trajectory integrate(RhsKind kind, const DifferentiatorConfig& cfg,
                     std::span<const double> initial, const SignalSpec& signal,
                     const IntegrateOptions& options);

/// Convenience: full-form simulation started from x(t0) = f0-derivatives(t0) + e0.
Trajectory simulate_from_error(const DifferentiatorConfig& cfg, std::span<const double> e0,
                               const SignalSpec& signal, const IntegrateOptions& options);

/// Earliest recorded time after which every remaining sample has |e| <= threshold.
std::optional<double> measure_convergence_time(const Trajectory& traj, double threshold);

}  // namespace bldiff
