#include "bldiff/gains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "bldiff/errors.hpp"

namespace bldiff {

double sample_omega(int i, const LyapunovFunction& lyap, std::span<const double> ktilde,
                    double k_last, double Delta, const SynthesisSettings& settings) {
  const int n = lyap.order();
  if (i < 0 || i > n - 2) throw ConfigError("sample_omega: component index out of range");
  const int m = n - i;
  const auto& w = lyap.weights();
  const auto& g = lyap.gains();
  const auto& prm = lyap.params();
  const double d0 = w.r0[n] - w.r0[n - 1];
  const double dinf = w.rinf[n] - w.rinf[n - 1];
  const double sign_gain = discontinuous_gain(w, g);
  const double delta_bar = Delta / k_last;

  const auto radii = settings.certify.plan.radii();
  const double lowest = -std::numeric_limits<double>::infinity();
  std::vector<double> max_per_radius(radii.size(), lowest);

  std::vector<double> psi(m), xi(m), sig(m), sl(m);
  for_each_sample(
      settings.certify.plan, std::span(w.r0).subspan(i, m), std::span(w.rinf).subspan(i, m),
      [&](const DilatedSample& smp) {
        const auto z = smp.z;
        double v = z[0];
        for (int l = 0; l < m; ++l) {
          v = varphi_eval(i + l, v, w, g);
          psi[l] = v;
        }
        for (int l = 0; l < m; ++l) {
          xi[l] = l + 1 < m ? varphi_inverse(i + l, z[l + 1], w, g) : 0.0;
          sig[l] = lyap.sigma_xi(i + l, z[l], xi[l]);
          sl[l] = lyap.s_xi(i + l, z[l], xi[l]);
        }
        const double denom = sig[0] * (psi[0] - z[1]);
        const double degree = smp.infinity_weights ? prm.pinf + dinf : prm.p0 + d0;
        if (!(denom > settings.denominator_floor * std::pow(smp.radius, degree))) return;

        double num = 0.0;
        for (int l = 1; l + 1 < m; ++l) {
          num += ktilde[i + l] * (sl[l - 1] + sig[l]) * (z[l + 1] - psi[l]);
        }
        const double gl = sl[m - 2] + sig[m - 1];
        const double kt = ktilde[n - 1];
        num += -kt * gl * psi[m - 1] + kt * std::fabs(gl) * delta_bar;
        if (z[0] == 0.0) num += kt * std::fabs(gl) * sign_gain;

        const double ratio = num / denom;
        auto& slot = max_per_radius[smp.radius_index];
        slot = std::max(slot, ratio);
      });

  const std::size_t R = radii.size();
  const double overall = *std::max_element(max_per_radius.begin(), max_per_radius.end());
  if (overall == lowest) {
    throw CertificationError("no admissible sample for component " + std::to_string(i), {}, i);
  }
  if (R >= 3 && overall > 0.0) {
    const double without_outer =
        *std::max_element(max_per_radius.begin(), max_per_radius.end() - 1);
    const double without_inner =
        *std::max_element(max_per_radius.begin() + 1, max_per_radius.end());
    const double tol = 1.0 + settings.growth_tolerance;
    if (overall > tol * without_outer || overall > tol * without_inner) {
      std::ostringstream msg;
      msg.precision(6);
      msg << "restricted ratio for component " << i << " keeps growing across the "
          << (overall > tol * without_outer ? "outermost" : "innermost")
          << " radii (max " << overall << "); gains downstream cannot be certified";
      throw CertificationError(msg.str(), {}, i);
    }
  }
  return overall;
}

SynthesisResult synthesize_gains(const DegreeConfig& degrees, const InternalGains& gains,
                                 double Delta, const LyapunovParams& params,
                                 const SynthesisSettings& settings) {
  const WeightVectors w = compute_weights(degrees);
  validate(gains, degrees.n);
  const int n = degrees.n;
  if (!(Delta >= 0.0)) throw ConfigError("Delta must be nonnegative");
  if (Delta > 0.0 && degrees.d0 != -1.0) {
    throw ConfigError("Delta > 0 requires d0 = -1");
  }
  LyapunovFunction lyap(w, gains, params);

  const double k_last =
      Delta > 0.0 ? settings.perturbation_margin * Delta / discontinuous_gain(w, gains) : 1.0;
  std::vector<double> ktilde(n, 1.0);
  std::vector<double> omega(n, 0.0);
  if (n == 1) {
    ktilde[0] = k_last;
  } else {
    ktilde[n - 1] = 1.0;
    for (int i = n - 2; i >= 0; --i) {
      omega[i] = sample_omega(i, lyap, ktilde, k_last, Delta, settings);
      ktilde[i] = settings.safety_factor * std::max(omega[i], settings.ktilde_floor);
    }
    const double product = std::accumulate(ktilde.begin(), ktilde.end(), 1.0,
                                           std::multiplies<>());
    // Raising the first ratio only deepens the (nonpositive) first term of W.
    if (product < k_last) ktilde[0] *= k_last / product;
  }

  SynthesisResult result{GainLadder::from_ratios(ktilde), {}, std::move(omega)};
  result.certificate = estimate_eta(lyap, degrees, result.ladder, Delta, settings.certify);
  return result;
}

std::pair<InternalGains, GainLadder> scale_gains(const DegreeConfig& degrees,
                                                 const InternalGains& gains,
                                                 const GainLadder& ladder,
                                                 const ScalingParams& s) {
  if (!(s.alpha > 0.0) || !(s.L > 0.0)) throw ConfigError("alpha and L must be positive");
  const WeightVectors w = compute_weights(degrees);
  const int n = degrees.n;
  const double c = std::pow(s.L, n) / s.alpha;
  InternalGains out = gains;
  std::vector<double> k(ladder.k().begin(), ladder.k().end());
  for (int i = 0; i < n; ++i) {
    out.kappa[i] *= std::pow(c, degrees.d0 / w.r0[i]);
    out.theta[i] *= std::pow(c, degrees.dinf / w.rinf[i]);
    k[i] *= std::pow(s.L, i + 1);
  }
  return {std::move(out), GainLadder::from_gains(std::move(k))};
}

DifferentiatorConfig scale_design(const DifferentiatorConfig& cfg, const ScalingParams& s) {
  auto [g, ladder] = scale_gains(cfg.degrees, cfg.gains, cfg.ladder, s);
  return DifferentiatorConfig::make(cfg.degrees, std::move(g), std::move(ladder));
}

ScalingParams design_for_targets(double Tbar_base, double Delta_base, double Tbar_target,
                                 double Delta_target) {
  if (!(Tbar_base > 0.0) || !(Tbar_target > 0.0)) {
    throw ConfigError("convergence times must be positive");
  }
  if (!(Delta_target >= 0.0) || !(Delta_base >= 0.0)) {
    throw ConfigError("perturbation bounds must be nonnegative");
  }
  ScalingParams s;
  if (Delta_target > 0.0) {
    if (Delta_base == 0.0) {
      throw ConfigError("a design certified for Delta = 0 cannot be scaled to Delta > 0");
    }
    s.alpha = std::max(1.0, Delta_target / Delta_base);
  }
  s.L = std::max(1.0, Tbar_base / Tbar_target);
  return s;
}

LadderCheck validate_ladder(const DegreeConfig& degrees, const InternalGains& gains,
                            std::span<const double> k, std::span<const double> ktilde,
                            double Delta, const LyapunovFunction* scan,
                            const CertifyOptions& options) {
  LadderCheck out;
  const int n = degrees.n;
  auto fail = [&](std::string msg) {
    out.ok = false;
    out.diagnostics.push_back(std::move(msg));
  };
  if (static_cast<int>(k.size()) != n) {
    fail("ladder has " + std::to_string(k.size()) + " gains, order is " + std::to_string(n));
    return out;
  }
  for (int i = 0; i < n; ++i) {
    if (!(k[i] > 0.0) || !std::isfinite(k[i])) {
      fail("positivity: k[" + std::to_string(i) + "] = " + std::to_string(k[i]) +
           " is not positive");
    }
  }
  if (!ktilde.empty()) {
    if (static_cast<int>(ktilde.size()) != n) {
      fail("ktilde has " + std::to_string(ktilde.size()) + " entries, order is " +
           std::to_string(n));
    } else {
      double prod = 1.0;
      for (int i = 0; i < n; ++i) {
        prod *= ktilde[i];
        if (!(ktilde[i] > 0.0)) fail("positivity: ktilde[" + std::to_string(i) + "] <= 0");
        if (std::fabs(prod - k[i]) > 1e-12 * std::fabs(k[i])) {
          fail("consistency: k[" + std::to_string(i) + "] differs from the product of ktilde");
        }
      }
    }
  }
  if (static_cast<int>(gains.kappa.size()) != n) {
    fail("internal gains size mismatch");
    return out;
  }
  if (Delta > 0.0 && degrees.d0 != -1.0) {
    fail("perturbation: Delta > 0 requires d0 = -1");
  }
  const double authority = discontinuous_gain(compute_weights(degrees), gains) * k[n - 1];
  if (Delta > 0.0 && !(authority > Delta)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "step (a): sign-term authority k_n kappa_n = " << authority
        << " does not exceed Delta = " << Delta;
    fail(msg.str());
  }
  if (out.ok && scan != nullptr) {
    try {
      out.certificate = estimate_eta(*scan, degrees,
                                     GainLadder::from_gains({k.begin(), k.end()}), Delta,
                                     options);
    } catch (const CertificationError& e) {
      fail(std::string("certificate: ") + e.what());
    }
  }
  return out;
}

DecayCertificate certify_tail(const DegreeConfig& degrees, const InternalGains& gains,
                              const GainLadder& ladder, const LyapunovParams& params, int j,
                              double Delta, const CertifyOptions& options) {
  const int n = degrees.n;
  if (j < 0 || j >= n) throw ConfigError("tail start index out of range");
  const DegreeConfig tail{n - j, degrees.d0, degrees.dinf};
  auto cut = [&](const std::vector<double>& v) {
    return std::vector<double>(v.begin() + j, v.end());
  };
  const InternalGains tail_gains{cut(gains.kappa), cut(gains.theta)};
  const GainLadder tail_ladder =
      GainLadder::from_ratios({ladder.ktilde().begin() + j, ladder.ktilde().end()});
  const LyapunovParams tail_params{params.p0, params.pinf, cut(params.beta0),
                                   cut(params.betainf)};
  const double tail_delta = Delta * tail_ladder.k(n - j - 1) / ladder.k(n - 1);
  LyapunovFunction lyap(compute_weights(tail), tail_gains, tail_params);
  return estimate_eta(lyap, tail, tail_ladder, tail_delta, options);
}

}  // namespace bldiff
