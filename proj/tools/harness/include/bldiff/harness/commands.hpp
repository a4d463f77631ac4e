#pragma once

// Experiment commands. Each run_* function computes results in memory; the
// matching cmd_* function also writes the CSV tables and a plain-text
// summary and maps failures to an exit code.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bldiff/harness/config.hpp"

namespace bldiff::harness {

enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kCertification = 2,
  kDivergence = 3,
};

/// Differentiator ready to run: ladder resolved (given or synthesized),
/// scaling applied, step (a) checked.
struct Design {
  DifferentiatorConfig diff;
  LyapunovParams lyapunov;
  /// Perturbation bound the design is checked against.
  double delta = 0.0;
  /// Present when the ladder was synthesized.
  std::optional<SynthesisResult> synthesis;
};

/// Throws ConfigError on an inconsistent or under-powered ladder and
/// CertificationError when synthesis fails.
Design build_design(const ExperimentConfig& cfg);

/// Runs fn(i) for i in [0, count) on `workers` threads (0 = hardware
/// concurrency). Exceptions are rethrown after all workers finish.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

struct RunSummary {
  std::optional<double> convergence_time;
  std::vector<double> final_error;
  double final_norm = 0.0;
};

RunSummary summarize(const Trajectory& traj, double threshold);

struct SimulateResult {
  Trajectory trajectory;
  RunSummary summary;
};

SimulateResult run_simulate(const ExperimentConfig& cfg, const Design& design);

struct SweepRow {
  std::size_t index = 0;
  std::optional<double> exponent;
  std::vector<double> initial_error;
  double initial_norm = 0.0;
  RunSummary summary;
  std::optional<double> bound;
  /// Empty on success; otherwise the failure that ended the run.
  std::string error;
};

/// One run per initial error, in parallel; rows come back in sweep order.
std::vector<SweepRow> run_sweep_ic(const ExperimentConfig& cfg, const Design& design);

struct NoiseRow {
  double epsilon = 0.0;
  double omega = 0.0;
  std::optional<double> settle_time;
  /// max |e_i| over the steady-state window.
  std::vector<double> amplitude;
  bool in_fit = false;
  std::string error;
};

struct NoiseFit {
  std::vector<double> slope;
  std::vector<double> expected;
  /// Empirical lambda_i: geometric mean of amplitude / (Delta^(i/n) eps^((n-i)/n)).
  std::vector<double> lambda;
  std::size_t points = 0;
};

struct NoiseSweepResult {
  std::vector<NoiseRow> rows;
  NoiseFit fit;
};

/// Throws ConfigError unless d0 = -1 and at least two positive epsilons are
/// given; a row whose settled window is shorter than 20% of the horizon is
/// marked with an error and left out of the fit.
NoiseSweepResult run_sweep_noise(const ExperimentConfig& cfg, const Design& design);

/// Least-squares slope and intercept of y against x.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct CertifyResult {
  DecayCertificate certificate;
  PCheck p_check;
};

/// check_p, the W* scan and the rate estimate for the design.
CertifyResult run_certify(const ExperimentConfig& cfg, const Design& design);

struct IssPhase {
  std::string name;
  int step = 0;
  double amplitude = 0.0;
  /// max ||e|| over the second half of the phase window.
  double envelope = 0.0;
};

struct IssReport {
  std::vector<IssPhase> phases;
  double floor_radius = 0.0;
  double persistent_radius = 0.0;
  bool bounded = false;
  bool vanishing = false;
};

IssReport run_iss_probe(const ExperimentConfig& cfg, const Design& design);

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log);
int cmd_sweep_ic(const ExperimentConfig& cfg, std::ostream& log);
int cmd_sweep_noise(const ExperimentConfig& cfg, std::ostream& log);
int cmd_certify(const ExperimentConfig& cfg, std::ostream& log);
int cmd_synth_gains(const ExperimentConfig& cfg, std::ostream& log);
int cmd_iss_probe(const ExperimentConfig& cfg, std::ostream& log);

/// Runs `body` and maps library exceptions to exit codes, printing the
/// diagnostic to `log`.
int guarded(const std::function<int()>& body, std::ostream& log);

}  // namespace bldiff::harness
