#pragma once

// Experiment configuration: a JSON document parsed into typed blocks.
//
// Missing optional keys take the defaults documented in configs/README.md.
// Every validation failure throws bldiff::ConfigError whose message starts
// with the dotted path of the offending field.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bldiff/bldiff.hpp"

namespace bldiff::harness {

struct DifferentiatorBlock {
  DegreeConfig degrees;
  InternalGains gains;
  /// Exactly one of k / ktilde is set unless `synthesize` is true.
  std::vector<double> k;
  std::vector<double> ktilde;
  bool synthesize = false;
  /// Perturbation bound used for synthesis; defaults to the signal bound.
  std::optional<double> synthesis_delta;
};

struct LyapunovBlock {
  /// Unset means the smallest admissible exponents.
  std::optional<double> p0;
  std::optional<double> pinf;
  /// Empty means all ones.
  std::vector<double> beta0;
  std::vector<double> betainf;
};

struct SimulationBlock {
  double dt = 1e-4;
  double t_final = 20.0;
  int record_every = 10;
  double threshold = 1e-3;
  double boundary_layer = 0.0;
  std::vector<double> initial_error;
  /// Attach V(z(t)) to simulate output.
  bool record_lyapunov = true;
};

struct SweepBlock {
  std::vector<std::vector<double>> initial_errors;
  /// Exponents p of the generator e0 = base * 10^p; parallel to initial_errors
  /// when the generator is used, empty otherwise.
  std::vector<double> exponents;
  std::vector<double> noise_epsilons;
  /// Noise frequency law for sweep-noise: omega = omega_scale * (Delta / eps)^(1/n)
  /// when set, otherwise the fixed signal.noise.omega.
  std::optional<double> noise_omega_scale;
  /// Fraction of the horizon used as the steady-state window.
  double steady_fraction = 0.3;
  /// Attach the certified bound to every sweep row.
  bool with_bound = false;
};

struct CertifyBlock {
  CertifyOptions options;
  /// Perturbation bound for the scan; defaults to the signal bound when d0 = -1
  /// and 0 otherwise.
  std::optional<double> delta;
};

struct IssBlock {
  NoiseSpec::Kind kind = NoiseSpec::Kind::sinusoidal;
  /// Sinusoidal kind only.
  double omega = 10.0;
  double epsilon = 1e-3;
  double decay_period = 10.0;
  double decay_factor = 0.1;
  int steps = 4;
};

struct OutputBlock {
  std::string dir = "out";
  std::string prefix;
};

struct ExperimentConfig {
  DifferentiatorBlock differentiator;
  ScalingParams scaling;
  LyapunovBlock lyapunov;
  SignalSpec signal = SignalSpec::polynomial(1, {});
  SimulationBlock simulation;
  SweepBlock sweep;
  CertifyBlock certify;
  SynthesisSettings synthesis;
  IssBlock iss;
  OutputBlock output;
  std::uint64_t seed = 0;
  int workers = 0;
  /// FNV-1a digest of the normalized document after overrides.
  std::string digest;
};

/// Command-line overrides; unset fields leave the document untouched.
struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<double> threshold;
};

ExperimentConfig parse_config(const nlohmann::json& doc, const Overrides& overrides = {});
ExperimentConfig load_config(const std::string& path, const Overrides& overrides = {});

/// 64-bit FNV-1a of `text`, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& text);

/// Lyapunov parameters with defaults filled in for the given weights.
LyapunovParams resolve_lyapunov(const LyapunovBlock& block, const WeightVectors& w);

/// Perturbation bound the certificate and validation use.
double certified_delta(const ExperimentConfig& cfg);

}  // namespace bldiff::harness
