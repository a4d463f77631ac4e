#pragma once

// Gain ladder validation, recursive gain synthesis and (alpha, L) scaling.

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bldiff/core_math.hpp"
#include "bldiff/dynamics.hpp"
#include "bldiff/ladder.hpp"
#include "bldiff/lyapunov.hpp"

namespace bldiff {

struct ScalingParams {
  double alpha = 1.0;
  double L = 1.0;
};

struct SynthesisSettings {
  CertifyOptions certify;
  /// Multiplier applied to each sampled supremum.
  double safety_factor = 2.0;
  double ktilde_floor = 1e-6;
  /// Margin of the last gain over the perturbation: k_{n-1} * discontinuous_gain = margin * Delta.
  double perturbation_margin = 1.5;
  /// Denominator floor on the unit-radius scale of the ratio.
  double denominator_floor = 1e-12;
  /// Relative growth of the running maximum across the outermost radii that
  /// marks the ratio as unbounded.
  double growth_tolerance = 0.10;
};

struct SynthesisResult {
  GainLadder ladder;
  DecayCertificate certificate;
  /// Sampled suprema omega_i (index n-1 unused and left at 0).
  std::vector<double> omega;
};

/// Backward recursion: fixes the last ratio, then for i = n-2..0 sets
/// ktilde_i = safety_factor * max(omega_i, floor) where omega_i is the sampled
/// supremum of the restricted derivative ratio. The first ratio is raised if
/// needed so that kappa_{n-1} k_{n-1} reaches the perturbation margin. The
/// returned ladder has passed the W* certificate scan.
///
/// Throws CertificationError when a ratio keeps growing across the radius
/// range (index() names the component) or when the final scan fails.
SynthesisResult synthesize_gains(const DegreeConfig& degrees, const InternalGains& gains,
                                 double Delta, const LyapunovParams& params,
                                 const SynthesisSettings& settings = {});

/// Sampled supremum of the restricted ratio for component i given the ratios
/// ktilde_{i+1..n-1} (entries of `ktilde` below i+1 are ignored) and the last
/// gain used to normalize Delta.
double sample_omega(int i, const LyapunovFunction& lyap, std::span<const double> ktilde,
                    double k_last, double Delta, const SynthesisSettings& settings);

/// kappa_i *= (L^n/alpha)^{d0/r0_i}, theta_i *= (L^n/alpha)^{dinf/rinf_i}, k_i *= L^{i+1}.
std::pair<InternalGains, GainLadder> scale_gains(const DegreeConfig& degrees,
                                                 const InternalGains& gains,
                                                 const GainLadder& ladder,
                                                 const ScalingParams& s);

DifferentiatorConfig scale_design(const DifferentiatorConfig& cfg, const ScalingParams& s);

/// alpha = max(1, Delta_target / Delta_base), L = max(1, Tbar_base / Tbar_target).
ScalingParams design_for_targets(double Tbar_base, double Delta_base, double Tbar_target,
                                 double Delta_target);

struct LadderCheck {
  bool ok = true;
  std::vector<std::string> diagnostics;
  std::optional<DecayCertificate> certificate;
};

/// Positivity, discontinuous_gain * k_{n-1} > Delta, k / ktilde consistency (when ktilde
/// is given) and, when `scan` is set, the W* certificate scan.
LadderCheck validate_ladder(const DegreeConfig& degrees, const InternalGains& gains,
                            std::span<const double> k, std::span<const double> ktilde,
                            double Delta, const LyapunovFunction* scan = nullptr,
                            const CertifyOptions& options = {});

/// Certifies the order-(n-j) differentiator built from the tail of a ladder:
/// components j..n-1 with the perturbation bound rescaled so that the
/// normalized bound Delta / k_{n-1} is unchanged.
DecayCertificate certify_tail(const DegreeConfig& degrees, const InternalGains& gains,
                              const GainLadder& ladder, const LyapunovParams& params, int j,
                              double Delta, const CertifyOptions& options = {});

}  // namespace bldiff
