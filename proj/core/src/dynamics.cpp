#include "bldiff/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "bldiff/errors.hpp"

namespace bldiff {

namespace {

double euclidean_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

// Small fixed-capacity scratch to keep the stepping loop allocation free.
constexpr int kMaxOrder = 16;

}  // namespace

DifferentiatorConfig DifferentiatorConfig::make(DegreeConfig degrees, InternalGains gains,
                                                GainLadder ladder) {
  DifferentiatorConfig cfg;
  cfg.weights = compute_weights(degrees);
  validate(gains, degrees.n);
  if (ladder.order() != degrees.n) {
    std::ostringstream msg;
    msg << "gain ladder has " << ladder.order() << " entries, order is " << degrees.n;
    throw ConfigError(msg.str());
  }
  if (degrees.n > kMaxOrder) {
    throw ConfigError("order above " + std::to_string(kMaxOrder) + " is not supported");
  }
  cfg.degrees = degrees;
  cfg.gains = std::move(gains);
  cfg.ladder = std::move(ladder);
  return cfg;
}

void differentiator_rhs(std::span<const double> x, double f_sample,
                        const DifferentiatorConfig& cfg, std::span<double> out,
                        double boundary_layer) {
  const int n = cfg.order();
  double phi[kMaxOrder];
  phi_all(x[0] - f_sample, cfg.weights, cfg.gains, {phi, static_cast<std::size_t>(n)},
          boundary_layer);
  for (int i = 0; i + 1 < n; ++i) out[i] = -cfg.ladder.k(i) * phi[i] + x[i + 1];
  out[n - 1] = -cfg.ladder.k(n - 1) * phi[n - 1];
}

void error_rhs(std::span<const double> z, double nu, double delta_bar,
               const DifferentiatorConfig& cfg, std::span<double> out, double boundary_layer) {
  const int n = cfg.order();
  double phi[kMaxOrder];
  phi_all(z[0] - nu, cfg.weights, cfg.gains, {phi, static_cast<std::size_t>(n)}, boundary_layer);
  for (int i = 0; i + 1 < n; ++i) out[i] = -cfg.ladder.ktilde(i) * (phi[i] - z[i + 1]);
  out[n - 1] = -cfg.ladder.ktilde(n - 1) * (phi[n - 1] - delta_bar);
}

std::vector<double> error_to_z(std::span<const double> e, const GainLadder& ladder) {
  std::vector<double> z(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) z[i] = i == 0 ? e[0] : e[i] / ladder.k(static_cast<int>(i) - 1);
  return z;
}

std::vector<double> z_to_error(std::span<const double> z, const GainLadder& ladder) {
  std::vector<double> e(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) e[i] = i == 0 ? z[0] : z[i] * ladder.k(static_cast<int>(i) - 1);
  return e;
}

void Trajectory::push(double t, std::span<const double> state, std::span<const double> error) {
  times_.push_back(t);
  states_.insert(states_.end(), state.begin(), state.end());
  errors_.insert(errors_.end(), error.begin(), error.end());
  norms_.push_back(euclidean_norm(error));
}

void Trajectory::set_lyapunov(std::vector<double> values) {
  if (values.size() != times_.size()) {
    throw ConfigError("Lyapunov values must match the number of samples");
  }
  values_ = std::move(values);
}

void Trajectory::reserve(std::size_t samples) {
  times_.reserve(samples);
  states_.reserve(samples * n_);
  errors_.reserve(samples * n_);
  norms_.reserve(samples);
}

Trajectory integrate(RhsKind kind, const DifferentiatorConfig& cfg,
                     std::span<const double> initial, const SignalSpec& signal,
                     const IntegrateOptions& opt) {
  const int n = cfg.order();
  if (static_cast<int>(initial.size()) != n) {
    throw ConfigError("initial state has " + std::to_string(initial.size()) +
                      " entries, order is " + std::to_string(n));
  }
  if (!(opt.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(opt.t_final > 0.0)) throw ConfigError("t_final must be positive");
  if (opt.record_every < 1) throw ConfigError("record_every must be at least 1");
  if (signal.order() < n) {
    throw ConfigError("signal must provide derivatives up to order " + std::to_string(n));
  }
  if (!all_finite(initial)) throw ConfigError("initial state must be finite");

  const long long steps = std::llround(opt.t_final / opt.dt);
  Trajectory traj(kind, n, opt.dt * opt.record_every);
  traj.reserve(static_cast<std::size_t>(steps / opt.record_every + 1));

  const double bound = opt.guard_factor * (1.0 + euclidean_norm(initial));
  const double kn = cfg.ladder.k(n - 1);

  std::vector<double> state(initial.begin(), initial.end());
  std::vector<double> rhs(n);
  std::vector<double> err(n);

  auto errors_at = [&](double t) {
    if (kind == RhsKind::full) {
      for (int i = 0; i < n; ++i) err[i] = state[i] - signal.eval(t, i);
    } else {
      err[0] = state[0];
      for (int i = 1; i < n; ++i) err[i] = state[i] * cfg.ladder.k(i - 1);
    }
  };

  for (long long step = 0;; ++step) {
    const double t = opt.t0 + static_cast<double>(step) * opt.dt;
    if (step % opt.record_every == 0) {
      errors_at(t);
      traj.push(t, state, err);
    }
    if (step == steps) break;

    const double nu = signal.noise() ? sample_noise(*signal.noise(), t) : 0.0;
    if (kind == RhsKind::full) {
      differentiator_rhs(state, signal.eval(t, 0) + nu, cfg, rhs, opt.boundary_layer);
    } else {
      const double delta_bar = -signal.eval(t, n) / kn;
      error_rhs(state, nu, delta_bar, cfg, rhs, opt.boundary_layer);
    }

    double norm2 = 0.0;
    bool finite = true;
    for (int i = 0; i < n; ++i) {
      const double next = state[i] + opt.dt * rhs[i];
      finite = finite && std::isfinite(next);
      norm2 += next * next;
    }
    if (!finite || !(std::sqrt(norm2) <= bound)) {
      std::ostringstream msg;
      msg << "integration diverged at t = " << t + opt.dt
          << (finite ? " (state norm exceeded the guard)" : " (non-finite state)")
          << "; reduce dt or check the gains";
      throw DivergenceError(msg.str(), t, state);
    }
    for (int i = 0; i < n; ++i) state[i] += opt.dt * rhs[i];
  }
  return traj;
}

Trajectory simulate_from_error(const DifferentiatorConfig& cfg, std::span<const double> e0,
                               const SignalSpec& signal, const IntegrateOptions& options) {
  const int n = cfg.order();
  if (static_cast<int>(e0.size()) != n) throw ConfigError("initial error size mismatch");
  std::vector<double> x0(n);
  for (int i = 0; i < n; ++i) x0[i] = signal.eval(options.t0, i) + e0[i];
  return integrate(RhsKind::full, cfg, x0, signal, options);
}

std::optional<double> measure_convergence_time(const Trajectory& traj, double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("convergence threshold must be positive");
  const auto& norms = traj.norms();
  std::size_t first = norms.size();
  while (first > 0 && norms[first - 1] <= threshold) --first;
  if (first == norms.size()) return std::nullopt;
  return traj.time(first) - traj.time(0);
}

}  // namespace bldiff
