// Acceptance checks. `bldiff_acceptance N` runs criterion N, no argument runs
// all of them; each prints one line "criterion N: PASS|FAIL: detail" and the
// exit status is nonzero if any check failed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <span>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "bldiff/bldiff.hpp"
#include "bldiff/harness/commands.hpp"
#include "bldiff/harness/config.hpp"
#include "oracles.hpp"

using namespace bldiff;
using namespace bldiff::harness;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string config_path(const std::string& name) { return std::string(BLDIFF_CONFIG_DIR) + "/" + name; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string join(std::span<const double> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + fmt(v[i]);
  return "[" + out + "]";
}

std::vector<double> sweep_times(const std::vector<SweepRow>& rows, std::string& why) {
  std::vector<double> T;
  for (const auto& r : rows) {
    if (!r.error.empty()) why += "row " + std::to_string(r.index) + ": " + r.error + "; ";
    else if (!r.summary.convergence_time) why += "row " + std::to_string(r.index) + " did not converge; ";
    T.push_back(r.summary.convergence_time.value_or(std::nan("")));
  }
  return T;
}

std::vector<double> reference_sweep_times(const std::string& config, std::string& why) {
  auto cfg = load_config(config_path(config));
  return sweep_times(run_sweep_ic(cfg, build_design(cfg)), why);
}

Verdict convergence_asymptote() {
  std::string why;
  const auto T = reference_sweep_times("reference_example.json", why);
  if (!why.empty()) return {false, why};
  bool increasing = true, decelerating = true;
  for (std::size_t j = 1; j < T.size(); ++j) increasing = increasing && T[j] > T[j - 1];
  // Index j holds p = j - 1; increments from p >= 3 on.
  for (std::size_t j = 5; j < T.size(); ++j) {
    decelerating = decelerating && (T[j] - T[j - 1]) < (T[j - 1] - T[j - 2]);
  }
  const double last = T.back() - T[T.size() - 2];
  const bool small_tail = last <= 0.1 * T.back();
  std::string detail = "T(p=-1..7) = " + join(T) + ", increasing " + (increasing ? "yes" : "no") +
                       ", increments decreasing for p >= 3 " + (decelerating ? "yes" : "no") +
                       ", final increment " + fmt(last) + " vs 10% of T(7) = " + fmt(0.1 * T.back());
  return {increasing && decelerating && small_tail, detail};
}

Verdict time_scaling() {
  std::string why;
  const auto T1 = reference_sweep_times("reference_example.json", why);
  const auto T2 = reference_sweep_times("reference_example_L2.json", why);
  if (!why.empty()) return {false, why};
  std::vector<double> ratio;
  bool ratios_ok = true;
  for (std::size_t j = 0; j < T1.size(); ++j) {
    ratio.push_back(T2[j] / T1[j]);
    ratios_ok = ratios_ok && ratio.back() >= 0.4 && ratio.back() <= 0.6;
  }

  // Exact form: the scaled design run on the scaled signal from the mapped
  // initial error reproduces e'_i(t) = alpha / L^(n-i) e_i(L t), zero-based i.
  const auto cfg = load_config(config_path("reference_example.json"));
  const auto base = build_design(cfg).diff;
  const double alpha = 1.0, L = 2.0;
  const int n = 3;
  const auto scaled = scale_design(base, {alpha, L});
  const double c0 = alpha / std::pow(L, n);
  const auto s = SignalSpec::sinusoid_mix(3, {0.5, 1.0}, {0.5, 0.0}, {0.0, 0.5});
  const auto s_scaled = SignalSpec::sinusoid_mix(3, {0.5 * L, 1.0 * L}, {0.5 * c0, 0.0}, {0.0, 0.5 * c0});
  const auto& e0 = cfg.simulation.initial_error;
  std::vector<double> e0s(n);
  for (int i = 0; i < n; ++i) e0s[i] = alpha / std::pow(L, n - i) * e0[i];
  IntegrateOptions opt;
  opt.dt = 1e-5;
  opt.t_final = 2.0 * L;
  opt.record_every = 100;
  IntegrateOptions opt_s = opt;
  opt_s.dt = opt.dt / L;
  opt_s.t_final = opt.t_final / L;
  const auto a = simulate_from_error(base, e0, s, opt);
  const auto b = simulate_from_error(scaled, e0s, s_scaled, opt_s);
  double gap = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
    for (int i = 0; i < n; ++i) {
      const double mapped = alpha / std::pow(L, n - i) * a.error(k)[i];
      gap = std::max(gap, std::fabs(b.error(k)[i] - mapped));
      scale = std::max(scale, std::fabs(mapped));
    }
  }
  const bool exact_ok = a.size() == b.size() && gap <= 1e-3 * scale;
  std::string detail = "T_L2/T_L1 per row = " + join(ratio) + " (band [0.4, 0.6]) " + (ratios_ok ? "ok" : "violated") +
                       "; exact time map over scaled t in [0, 2]: relative deviation " + fmt(gap / scale) +
                       (exact_ok ? " ok" : " too large");
  return {ratios_ok && exact_ok, detail};
}

struct Floors {
  double e1 = 0.0;
  double e3 = 0.0;
  double T = 0.0;
};

Floors post_convergence_floor(double dt) {
  Overrides o;
  o.dt = dt;
  auto cfg = load_config(config_path("reference_example.json"), o);
  cfg.simulation.record_every = static_cast<int>(std::lround(1e-3 / dt));
  const auto sim = run_simulate(cfg, build_design(cfg));
  Floors f;
  if (!sim.summary.convergence_time) {
    f.e1 = f.e3 = f.T = std::nan("");
    return f;
  }
  f.T = *sim.summary.convergence_time;
  // Steady-state window: the last part of the horizon, as in the noise sweep.
  const double start = std::max(f.T, (1.0 - cfg.sweep.steady_fraction) * cfg.simulation.t_final);
  for (std::size_t k = 0; k < sim.trajectory.size(); ++k) {
    if (sim.trajectory.time(k) < start) continue;
    const auto e = sim.trajectory.error(k);
    f.e1 = std::max(f.e1, std::fabs(e[0]));
    f.e3 = std::max(f.e3, std::fabs(e[2]));
  }
  return f;
}

Verdict lipschitz_exactness() {
  const auto coarse = post_convergence_floor(1e-4);
  const auto fine = post_convergence_floor(1e-5);
  const bool bounds = coarse.e1 <= 1e-4 && coarse.e3 <= 0.1;
  const bool shrink = fine.e1 * 2.0 <= coarse.e1 && fine.e3 * 2.0 <= coarse.e3;
  std::string detail = "dt 1e-4: max|e1| " + fmt(coarse.e1) + ", max|e3| " + fmt(coarse.e3) + " (T = " +
                       fmt(coarse.T) + ", steady window); dt 1e-5: max|e1| " + fmt(fine.e1) + ", max|e3| " + fmt(fine.e3) +
                       "; shrink factors " + fmt(coarse.e1 / fine.e1) + ", " + fmt(coarse.e3 / fine.e3);
  return {bounds && shrink, detail};
}

Verdict noise_exponents() {
  const auto cfg = load_config(config_path("reference_noise.json"));
  const auto result = run_sweep_noise(cfg, build_design(cfg));
  double lo = INFINITY, hi = 0.0;
  for (const auto& r : result.rows) {
    if (!r.in_fit) continue;
    lo = std::min(lo, r.epsilon);
    hi = std::max(hi, r.epsilon);
  }
  bool ok = result.fit.points >= 4 && hi / lo >= 0.99e3;
  for (std::size_t i = 0; i < result.fit.slope.size(); ++i) {
    ok = ok && std::fabs(result.fit.slope[i] - result.fit.expected[i]) <= 0.15;
  }
  std::string detail = "slopes " + join(result.fit.slope) + " vs " + join(result.fit.expected) + " over " +
                       std::to_string(result.fit.points) + " epsilons in [" + fmt(lo) + ", " + fmt(hi) + "]";
  return {ok, detail};
}

Verdict certificate_soundness() {
  const auto cfg = load_config(config_path("reference_example.json"));
  const auto design = build_design(cfg);
  CertifyResult cert;
  try {
    cert = run_certify(cfg, design);
  } catch (const CertificationError& e) {
    return {false, std::string("reference ladder not certified: ") + e.what()};
  }
  const auto& c = cert.certificate;
  if (!cert.p_check.ok) return {false, "exponent check: " + cert.p_check.diagnostic};
  std::string why;
  const auto T = reference_sweep_times("reference_example.json", why);
  const double worst = *std::max_element(T.begin(), T.end());
  const bool ok = c.eta0 > 0 && c.etainf > 0 && c.min_margin > 0 && c.sample_count >= 26000 && c.Tbar &&
                  why.empty() && *c.Tbar >= worst;
  std::string detail = "eta0 " + fmt(c.eta0) + ", etainf " + fmt(c.etainf) + ", min_margin " + fmt(c.min_margin) +
                       " over " + std::to_string(c.sample_count) + " samples, Tbar " +
                       (c.Tbar ? fmt(*c.Tbar) : std::string("none")) + " vs max measured T " + fmt(worst);
  return {ok, detail};
}

Verdict lyapunov_structure() {
  using oracle::mp;
  const DegreeConfig degrees{3, -1.0, 0.2};
  const auto w = compute_weights(degrees);
  const auto g = InternalGains::uniform(3, 1.0, 1.0);
  const auto params = LyapunovParams::defaults(w);
  const LyapunovFunction lyap(w, g, params);
  const oracle::Config o{3, -1.0, 0.2, g.kappa, g.theta};
  const oracle::Lyap ol{params.p0, params.pinf, params.beta0, params.betainf};
  std::mt19937_64 rng(71);

  // Partials against central differences of the 50-digit Z.
  double worst_grad = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int i = static_cast<int>(rng() % 3);
    const double zi = oracle::signed_log_uniform(rng, -1, 1), zn = oracle::signed_log_uniform(rng, -1, 1);
    const mp hi = mp(1e-6) * std::fabs(zi), hn = mp(1e-6) * std::fabs(zn);
    const mp xi = oracle::xi(o, i, zn);
    const double fd_sigma = static_cast<double>(
        (oracle::Z_xi(o, ol, i, zi + hi, xi) - oracle::Z_xi(o, ol, i, zi - hi, xi)) / (2 * hi));
    const double fd_s =
        static_cast<double>((oracle::Z(o, ol, i, zi, zn + hn) - oracle::Z(o, ol, i, zi, zn - hn)) / (2 * hn));
    for (const auto& [an, fd] : {std::pair{lyap.sigma(i, zi, zn), fd_sigma}, std::pair{lyap.s(i, zi, zn), fd_s}}) {
      // Partials that vanish identically (s of the last component) are compared absolutely.
      const double err = std::fabs(an) > 1e-4 ? std::fabs(an - fd) / std::fabs(an) : std::fabs(an - fd) * 1e-4 / 1e-8;
      worst_grad = std::max(worst_grad, err);
    }
  }

  int negative = 0, zero_off_manifold = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    const int i = static_cast<int>(rng() % 3);
    const double zi = oracle::signed_log_uniform(rng, -3, 3), zn = oracle::signed_log_uniform(rng, -3, 3);
    const double z = lyap.Z(i, zi, zn);
    if (z < 0.0) ++negative;
    const bool on = i < 2 && std::fabs(varphi_eval(i, zi, w, g) - zn) <= 1e-6 * std::fabs(zn);
    if (!on && z <= 0.0) ++zero_off_manifold;
  }
  int manifold_nonzero = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int i = static_cast<int>(rng() % 2);
    const double zi = oracle::signed_log_uniform(rng, -3, 3);
    const double zn = varphi_eval(i, zi, w, g);
    const double scale = std::pow(std::fabs(zi), params.p0 / w.r0[i]) + std::pow(std::fabs(zi), params.pinf / w.rinf[i]);
    if (std::fabs(lyap.Z(i, zi, zn)) > 1e-9 * scale) ++manifold_nonzero;
  }

  int v_bad = 0;
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::vector<double> dir{nd(rng), nd(rng), nd(rng)};
    double last = 0.0;
    for (int e = -6; e <= 6; ++e) {
      const double rho = std::pow(10.0, e);
      std::vector<double> z(3);
      for (int i = 0; i < 3; ++i) z[i] = std::pow(rho, trial % 2 ? w.rinf[i] : w.r0[i]) * dir[i];
      const double v = lyap.V(z);
      if (!(v > last)) ++v_bad;
      last = v;
    }
  }

  double worst_inverse = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int i = static_cast<int>(rng() % 2);
    const double y = oracle::signed_log_uniform(rng, -9, 9);
    worst_inverse = std::max(worst_inverse, std::fabs(varphi_eval(i, varphi_inverse(i, y, w, g), w, g) - y) / std::fabs(y));
  }

  const bool ok = worst_grad <= 1e-4 && negative == 0 && zero_off_manifold == 0 && manifold_nonzero == 0 &&
                  v_bad == 0 && worst_inverse <= 1e-10;
  std::string detail = "gradient worst relative gap " + fmt(worst_grad) + "; Z < 0 at " + std::to_string(negative) +
                       ", Z = 0 off-manifold at " + std::to_string(zero_off_manifold) + ", Z != 0 on-manifold at " +
                       std::to_string(manifold_nonzero) + " points; V not positive increasing on " +
                       std::to_string(v_bad) + " of 26000 samples; inverse round trip " + fmt(worst_inverse);
  return {ok, detail};
}

Verdict special_cases() {
  // Linear: kappa = theta = 1/2 makes every injection the identity, so the
  // error obeys e' = A e with the companion matrix of s^3 + k1 s^2 + k2 s + k3.
  // Triple pole at -0.1 keeps Euler's truncation error under 1e-6 of the peak.
  // A ramp input: any curvature in f adds a first-order sampling term on top.
  const std::vector<double> k{0.3, 0.03, 0.001};
  const auto lin = DifferentiatorConfig::make({3, 0.0, 0.0}, InternalGains::uniform(3, 0.5, 0.5),
                                              GainLadder::from_gains(k));
  Eigen::Matrix3d A;
  A << -k[0], 1.0, 0.0, -k[1], 0.0, 1.0, -k[2], 0.0, 0.0;
  const Eigen::Vector3d e0(1.0, -1.0, 0.5);
  IntegrateOptions opt;
  opt.dt = 1e-5;
  opt.t_final = 60.0;
  opt.record_every = 10000;
  const std::vector<double> e0v{e0[0], e0[1], e0[2]};
  const auto traj = simulate_from_error(lin, e0v, SignalSpec::polynomial(3, {0.0, 1.0}), opt);
  double gap = 0.0, peak = 0.0;
  for (std::size_t j = 0; j < traj.size(); ++j) {
    const Eigen::Vector3d exact = (A * traj.time(j)).exp() * e0;
    for (int i = 0; i < 3; ++i) {
      gap = std::max(gap, std::fabs(traj.error(j)[i] - exact[i]));
      peak = std::max(peak, std::fabs(exact[i]));
    }
  }
  const bool linear_ok = gap <= 1e-6 * peak;

  std::string why;
  const auto T = reference_sweep_times("levant.json", why);
  bool growing = why.empty();
  for (std::size_t j = 2; growing && j < T.size(); ++j) {
    growing = T[j] - T[j - 1] > T[j - 1] - T[j - 2] && T[j - 1] > T[j - 2];
  }
  std::string detail = "linear observer vs matrix exponential: max gap " + fmt(gap / peak) +
                       " of peak; Levant reduction T(p=-1..2) = " + join(T) +
                       (growing ? ", finite and growing with accelerating increments" : ", " + why + "no unbounded growth");
  return {linear_ok && growing, detail};
}

Verdict group_law() {
  const DegreeConfig d{3, -1.0, 0.2};
  const InternalGains g{{0.6, 1.4, 0.9}, {1.3, 0.5, 1.1}};
  const auto ladder = GainLadder::from_gains({3.0, 1.5 * std::sqrt(3.0), 1.1});
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const ScalingParams s1{std::pow(10.0, u(rng)), std::pow(10.0, u(rng))};
    const ScalingParams s2{std::pow(10.0, u(rng)), std::pow(10.0, u(rng))};
    const auto [g1, l1] = scale_gains(d, g, ladder, s1);
    const auto [g12, l12] = scale_gains(d, g1, l1, s2);
    const auto [gc, lc] = scale_gains(d, g, ladder, {s1.alpha * s2.alpha, s1.L * s2.L});
    for (int i = 0; i < 3; ++i) {
      worst = std::max(worst, std::fabs(g12.kappa[i] - gc.kappa[i]) / gc.kappa[i]);
      worst = std::max(worst, std::fabs(g12.theta[i] - gc.theta[i]) / gc.theta[i]);
      worst = std::max(worst, std::fabs(l12.k(i) - lc.k(i)) / lc.k(i));
    }
  }
  return {worst <= 1e-12, "1000 random (alpha, L) pairs, worst relative gap " + fmt(worst)};
}

std::string synthesis_run(const std::string& config, bool& ok) {
  auto cfg = load_config(config_path(config));
  const int n = cfg.differentiator.degrees.n;
  const auto design = build_design(cfg);
  CertifyResult cert;
  try {
    cert = run_certify(cfg, design);
  } catch (const CertificationError& e) {
    ok = false;
    return "n = " + std::to_string(n) + ": certify failed: " + e.what();
  }
  if (!cert.certificate.Tbar) {
    ok = false;
    return "n = " + std::to_string(n) + ": no fixed-time bound";
  }
  const double Tbar = *cert.certificate.Tbar;
  std::mt19937_64 rng(cfg.seed);
  cfg.sweep.initial_errors.clear();
  cfg.sweep.exponents.clear();
  for (int run = 0; run < 100; ++run) {
    std::vector<double> e0(n);
    for (auto& v : e0) v = oracle::signed_log_uniform(rng, -2, 4);
    cfg.sweep.initial_errors.push_back(e0);
  }
  cfg.simulation.t_final = Tbar;
  const auto rows = run_sweep_ic(cfg, design);
  int converged = 0;
  double worst = 0.0, floor = 0.0;
  for (const auto& r : rows) {
    if (r.error.empty() && r.summary.convergence_time && *r.summary.convergence_time <= Tbar) {
      ++converged;
      worst = std::max(worst, *r.summary.convergence_time);
    } else if (r.error.empty()) {
      floor = std::max(floor, r.summary.final_norm);
    }
  }
  ok = ok && converged == 100;
  std::string out = "n = " + std::to_string(n) + ": k = " + join(design.diff.ladder.k()) + ", Tbar " + fmt(Tbar) +
                    ", " + std::to_string(converged) + "/100 converged";
  if (converged > 0) out += " (latest " + fmt(worst) + ")";
  if (converged < 100) out += ", worst final norm of the rest " + fmt(floor);
  return out;
}

Verdict synthesis_viability() {
  bool ok = true;
  const auto two = synthesis_run("synth_n2.json", ok);
  const auto three = synthesis_run("synth_n3.json", ok);
  return {ok, two + "; " + three};
}

const std::vector<std::function<Verdict()>> kCriteria{
    convergence_asymptote, time_scaling,       lipschitz_exactness, noise_exponents,    certificate_soundness,
    lyapunov_structure,    special_cases,      group_law,           synthesis_viability,
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  if (argc > 1) {
    const int c = std::atoi(argv[1]);
    if (c < 1 || c > static_cast<int>(kCriteria.size())) {
      std::cerr << "usage: bldiff_acceptance [1-" << kCriteria.size() << "]\n";
      return 2;
    }
    selected.push_back(c);
  } else {
    for (int c = 1; c <= static_cast<int>(kCriteria.size()); ++c) selected.push_back(c);
  }
  int failed = 0;
  for (int c : selected) {
    Verdict v;
    try {
      v = kCriteria[c - 1]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << c << ": " << (v.pass ? "PASS" : "FAIL") << ": " << v.detail << std::endl;
    if (!v.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
