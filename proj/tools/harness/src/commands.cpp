#include "bldiff/harness/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "bldiff/harness/csv.hpp"

namespace bldiff::harness {

namespace {

std::filesystem::path out_path(const ExperimentConfig& cfg, const std::string& name) {
  return std::filesystem::path(cfg.output.dir) / (cfg.output.prefix + name);
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

IntegrateOptions integrate_options(const SimulationBlock& sim) {
  IntegrateOptions o;
  o.dt = sim.dt;
  o.t_final = sim.t_final;
  o.record_every = sim.record_every;
  o.boundary_layer = sim.boundary_layer;
  return o;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += (out.empty() ? "" : "; ") + l;
  return out;
}

/// Largest ||e|| over recorded samples with t in [from, to].
double window_max(const Trajectory& traj, double from, double to) {
  double m = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.time(k);
    if (t >= from && t <= to) m = std::max(m, traj.error_norm(k));
  }
  return m;
}

/// Key/value summary written next to the tables and echoed to the log.
class Summary {
 public:
  explicit Summary(std::string command) { add("command", std::move(command)); }

  void add(const std::string& key, const std::string& value) { lines_.push_back(key + " = " + value); }
  void add(const std::string& key, double value) { add(key, CsvWriter::format(value)); }
  void add(const std::string& key, const std::optional<double>& value) {
    add(key, value ? CsvWriter::format(*value) : std::string("none"));
  }

  void write(const ExperimentConfig& cfg, const std::string& name, std::ostream& log) const {
    const auto path = out_path(cfg, name);
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("output: cannot write " + path.string());
    for (const auto& l : lines_) {
      out << l << '\n';
      log << l << '\n';
    }
    out << "config_digest = " << cfg.digest << '\n';
    log << "config_digest = " << cfg.digest << '\n';
  }

 private:
  std::vector<std::string> lines_;
};

std::vector<std::string> indexed(const std::string& stem, int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

std::string vector_text(std::span<const double> v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += (i ? ", " : "") + CsvWriter::format(v[i]);
  }
  return out + "]";
}

}  // namespace

Design build_design(const ExperimentConfig& cfg) {
  const auto& d = cfg.differentiator;
  const WeightVectors w = compute_weights(d.degrees);
  Design out;
  out.lyapunov = resolve_lyapunov(cfg.lyapunov, w);
  out.delta = certified_delta(cfg);

  GainLadder ladder;
  if (d.synthesize) {
    const double delta = d.synthesis_delta.value_or(out.delta);
    out.synthesis = synthesize_gains(d.degrees, d.gains, delta, out.lyapunov, cfg.synthesis);
    ladder = out.synthesis->ladder;
  } else {
    try {
      ladder = d.k.empty() ? GainLadder::from_ratios(d.ktilde) : GainLadder::from_gains(d.k);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("differentiator.") + (d.k.empty() ? "ktilde" : "k") + ": " +
                        e.what());
    }
  }
  const auto base = DifferentiatorConfig::make(d.degrees, d.gains, ladder);
  const bool scaled = cfg.scaling.alpha != 1.0 || cfg.scaling.L != 1.0;
  out.diff = scaled ? scale_design(base, cfg.scaling) : base;

  const auto check = validate_ladder(d.degrees, out.diff.gains, out.diff.ladder.k(), {}, out.delta);
  if (!check.ok) throw ConfigError("differentiator: " + join_lines(check.diagnostics));
  return out;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  std::size_t threads = workers > 0 ? static_cast<std::size_t>(workers)
                                    : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

RunSummary summarize(const Trajectory& traj, double threshold) {
  RunSummary s;
  s.convergence_time = measure_convergence_time(traj, threshold);
  const auto last = traj.error(traj.size() - 1);
  s.final_error.assign(last.begin(), last.end());
  s.final_norm = traj.error_norm(traj.size() - 1);
  return s;
}

SimulateResult run_simulate(const ExperimentConfig& cfg, const Design& design) {
  const auto& sim = cfg.simulation;
  Trajectory traj =
      simulate_from_error(design.diff, sim.initial_error, cfg.signal, integrate_options(sim));
  if (sim.record_lyapunov && check_p(design.lyapunov.p0, design.lyapunov.pinf, design.diff.weights).ok) {
    const LyapunovFunction lyap(design.diff.weights, design.diff.gains, design.lyapunov);
    std::vector<double> values(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
      values[k] = lyap.V(error_to_z(traj.error(k), design.diff.ladder));
    }
    traj.set_lyapunov(std::move(values));
  }
  auto summary = summarize(traj, sim.threshold);
  return {std::move(traj), std::move(summary)};
}

std::vector<SweepRow> run_sweep_ic(const ExperimentConfig& cfg, const Design& design) {
  const auto& errors = cfg.sweep.initial_errors;
  if (errors.empty()) throw ConfigError("sweep.initial_errors: no initial errors to sweep");
  std::optional<double> bound;
  if (cfg.sweep.with_bound) {
    try {
      bound = run_certify(cfg, design).certificate.Tbar;
    } catch (const CertificationError&) {
      bound.reset();
    }
  }
  std::vector<SweepRow> rows(errors.size());
  const auto options = integrate_options(cfg.simulation);
  parallel_for(errors.size(), cfg.workers, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.index = i;
    if (i < cfg.sweep.exponents.size()) row.exponent = cfg.sweep.exponents[i];
    row.initial_error = errors[i];
    row.initial_norm = norm2(errors[i]);
    row.bound = bound;
    try {
      const auto traj = simulate_from_error(design.diff, errors[i], cfg.signal, options);
      row.summary = summarize(traj, cfg.simulation.threshold);
    } catch (const DivergenceError& e) {
      row.error = std::string("diverged: ") + e.what();
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return rows;
}

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

NoiseSweepResult run_sweep_noise(const ExperimentConfig& cfg, const Design& design) {
  const int n = design.diff.order();
  if (design.diff.degrees.d0 != -1.0) {
    throw ConfigError("differentiator.d0: the noise sweep needs the discontinuous case d0 = -1");
  }
  const auto& eps_list = cfg.sweep.noise_epsilons;
  std::vector<double> positive;
  for (double e : eps_list) {
    if (e > 0.0) positive.push_back(e);
  }
  if (positive.size() < 2) {
    throw ConfigError("sweep.noise_epsilons: at least two positive amplitudes are needed");
  }
  const auto [lo, hi] = std::minmax_element(positive.begin(), positive.end());
  if (*hi < 1e3 * *lo * (1.0 - 1e-9)) {
    throw ConfigError("sweep.noise_epsilons: amplitudes must span at least 3 decades");
  }
  const double Delta = cfg.signal.delta();
  if (cfg.sweep.noise_omega_scale && !(Delta > 0.0)) {
    throw ConfigError("sweep.noise_omega_scale: needs a signal with a positive delta");
  }

  NoiseSpec base;
  base.kind = NoiseSpec::Kind::sinusoidal;
  base.seed = cfg.seed;
  if (cfg.signal.noise()) base = *cfg.signal.noise();

  const double horizon = cfg.simulation.t_final;
  const double f = cfg.sweep.steady_fraction;
  const auto options = integrate_options(cfg.simulation);

  NoiseSweepResult result;
  result.rows.resize(eps_list.size());
  parallel_for(eps_list.size(), cfg.workers, [&](std::size_t r) {
    NoiseRow& row = result.rows[r];
    row.epsilon = eps_list[r];
    NoiseSpec nz = base;
    nz.epsilon = row.epsilon;
    if (cfg.sweep.noise_omega_scale && row.epsilon > 0.0) {
      nz.omega = *cfg.sweep.noise_omega_scale * std::pow(Delta / row.epsilon, 1.0 / n);
    }
    row.omega = nz.omega;
    SignalSpec signal = cfg.signal;
    signal.with_noise(nz);
    try {
      const auto traj = simulate_from_error(design.diff, cfg.simulation.initial_error, signal, options);
      const double t_end = traj.time(traj.size() - 1);
      const double steady = window_max(traj, t_end - f * horizon, t_end);
      row.settle_time = measure_convergence_time(traj, std::max(cfg.simulation.threshold, 2.0 * steady));
      if (!row.settle_time || t_end - *row.settle_time < 0.2 * horizon) {
        row.error = "post-convergence window shorter than 20% of the horizon";
        return;
      }
      const double from = std::max(*row.settle_time, t_end - f * horizon);
      row.amplitude.assign(n, 0.0);
      for (std::size_t k = 0; k < traj.size(); ++k) {
        if (traj.time(k) < from) continue;
        const auto e = traj.error(k);
        for (int i = 0; i < n; ++i) row.amplitude[i] = std::max(row.amplitude[i], std::fabs(e[i]));
      }
      row.in_fit = row.epsilon > 0.0;
    } catch (const DivergenceError& e) {
      row.error = std::string("diverged: ") + e.what();
    }
  });

  NoiseFit& fit = result.fit;
  std::vector<const NoiseRow*> used;
  for (const auto& row : result.rows) {
    if (row.in_fit) used.push_back(&row);
  }
  fit.points = used.size();
  for (int i = 0; i < n; ++i) {
    fit.expected.push_back(static_cast<double>(n - i) / n);
    if (used.size() < 2) {
      fit.slope.push_back(std::nan(""));
      fit.lambda.push_back(std::nan(""));
      continue;
    }
    std::vector<double> x, y;
    double log_lambda = 0.0;
    for (const auto* row : used) {
      x.push_back(std::log10(row->epsilon));
      y.push_back(std::log10(row->amplitude[i]));
      const double scale = std::pow(Delta, static_cast<double>(i) / n) *
                           std::pow(row->epsilon, static_cast<double>(n - i) / n);
      log_lambda += std::log(row->amplitude[i] / scale);
    }
    fit.slope.push_back(fit_line(x, y).first);
    fit.lambda.push_back(std::exp(log_lambda / used.size()));
  }
  return result;
}

CertifyResult run_certify(const ExperimentConfig& cfg, const Design& design) {
  CertifyResult out;
  const auto& lp = design.lyapunov;
  out.p_check = check_p(lp.p0, lp.pinf, design.diff.weights);
  if (!out.p_check.ok) throw ConfigError("lyapunov: " + out.p_check.diagnostic);
  const LyapunovFunction lyap(design.diff.weights, design.diff.gains, lp);
  out.certificate = estimate_eta(lyap, design.diff.degrees, design.diff.ladder, design.delta,
                                 cfg.certify.options);
  return out;
}

IssReport run_iss_probe(const ExperimentConfig& cfg, const Design& design) {
  const int n = design.diff.order();
  const auto& iss = cfg.iss;
  const SignalSpec zero = SignalSpec::polynomial(n, {});
  IssReport report;

  IntegrateOptions opt = integrate_options(cfg.simulation);
  const double T = cfg.simulation.t_final;
  const auto& e0 = cfg.simulation.initial_error;

  // Zero inputs: what is left is the discretization floor.
  {
    const auto traj = simulate_from_error(design.diff, e0, zero, opt);
    report.floor_radius = window_max(traj, T / 2, T);
    report.phases.push_back({"zero_input", 0, 0.0, report.floor_radius});
  }

  NoiseSpec probe;
  probe.kind = iss.kind;
  probe.omega = iss.omega;
  probe.seed = cfg.seed;
  probe.epsilon = iss.epsilon;

  // Persistent bounded noise on the configured signal.
  {
    const NoiseSpec nz = probe;
    SignalSpec signal = cfg.signal;
    signal.with_noise(nz);
    const auto traj = simulate_from_error(design.diff, e0, signal, opt);
    report.persistent_radius = window_max(traj, T / 2, T);
    const double third = window_max(traj, T / 2, 3 * T / 4);
    const double last = window_max(traj, 3 * T / 4, T);
    report.bounded = std::isfinite(report.persistent_radius) &&
                     last <= 1.1 * third + report.floor_radius;
    report.phases.push_back({"persistent", 0, iss.epsilon, report.persistent_radius});
  }

  // Step-decaying noise with a polynomial base signal, so both inputs vanish.
  {
    NoiseSpec nz = probe;
    nz.decay_period = iss.decay_period;
    nz.decay_factor = iss.decay_factor;
    SignalSpec signal = zero;
    signal.with_noise(nz);
    IntegrateOptions o = opt;
    o.t_final = iss.decay_period * iss.steps;
    const auto traj = simulate_from_error(design.diff, e0, signal, o);
    std::vector<double> env;
    for (int s = 0; s < iss.steps; ++s) {
      const double start = s * iss.decay_period;
      env.push_back(window_max(traj, start + iss.decay_period / 2, start + iss.decay_period));
      report.phases.push_back({"decaying", s, nz.amplitude_at(start + 0.5 * iss.decay_period), env.back()});
    }
    bool ok = env.back() < env.front();
    for (std::size_t s = 1; s < env.size(); ++s) {
      const bool at_floor = env[s] <= 2.0 * report.floor_radius;
      ok = ok && (env[s] < env[s - 1] || at_floor);
    }
    report.vanishing = ok;
  }
  return report;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
  const Design design = build_design(cfg);
  const auto res = run_simulate(cfg, design);
  const int n = design.diff.order();
  auto cols = std::vector<std::string>{"t"};
  for (auto& c : indexed("e_", n)) cols.push_back(c);
  cols.push_back("norm_e");
  cols.push_back("V");
  CsvWriter table(out_path(cfg, "trajectory.csv"), cols, cfg.digest);
  const auto& traj = res.trajectory;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::vector<CsvWriter::Cell> row{traj.time(k)};
    for (double e : traj.error(k)) row.emplace_back(e);
    row.emplace_back(traj.error_norm(k));
    row.emplace_back(traj.lyapunov(k));
    table.row(row);
  }
  Summary s("simulate");
  s.add("convergence_time", res.summary.convergence_time);
  s.add("threshold", cfg.simulation.threshold);
  s.add("final_norm", res.summary.final_norm);
  s.add("final_error", vector_text(res.summary.final_error));
  s.add("dt", cfg.simulation.dt);
  s.add("t_final", cfg.simulation.t_final);
  s.add("k", vector_text(design.diff.ladder.k()));
  s.write(cfg, "simulate_summary.txt", log);
  return res.summary.convergence_time ? kOk : kCertification;
}

int cmd_sweep_ic(const ExperimentConfig& cfg, std::ostream& log) {
  const Design design = build_design(cfg);
  const auto rows = run_sweep_ic(cfg, design);
  const int n = design.diff.order();
  std::vector<std::string> cols{"index", "exponent", "e0_norm", "converged", "T"};
  for (auto& c : indexed("final_e_", n)) cols.push_back(c);
  cols.insert(cols.end(), {"final_norm", "Tbar", "status"});
  CsvWriter table(out_path(cfg, "sweep_ic.csv"), cols, cfg.digest);
  int code = kOk;
  for (const auto& r : rows) {
    const bool converged = r.error.empty() && r.summary.convergence_time.has_value();
    std::vector<CsvWriter::Cell> row{static_cast<long long>(r.index),
                                     r.exponent.value_or(std::nan("")), r.initial_norm,
                                     static_cast<long long>(converged),
                                     r.summary.convergence_time.value_or(std::nan(""))};
    for (int i = 0; i < n; ++i) {
      row.emplace_back(r.error.empty() ? r.summary.final_error[i] : std::nan(""));
    }
    row.emplace_back(r.error.empty() ? r.summary.final_norm : std::nan(""));
    row.emplace_back(r.bound.value_or(std::nan("")));
    row.emplace_back(r.error.empty() ? (converged ? "ok" : "not_converged") : "failed");
    table.row(row);
    if (!r.error.empty()) {
      log << "row " << r.index << ": " << r.error << '\n';
      code = std::max(code, int(r.error.rfind("diverged", 0) == 0 ? kDivergence : kCertification));
    } else if (!converged) {
      code = std::max(code, int(kCertification));
    }
  }
  Summary s("sweep-ic");
  s.add("rows", static_cast<double>(rows.size()));
  s.add("threshold", cfg.simulation.threshold);
  s.add("table", table.path().string());
  s.write(cfg, "sweep_ic_summary.txt", log);
  return code;
}

int cmd_sweep_noise(const ExperimentConfig& cfg, std::ostream& log) {
  const Design design = build_design(cfg);
  const auto res = run_sweep_noise(cfg, design);
  const int n = design.diff.order();
  std::vector<std::string> cols{"epsilon", "omega", "settle_time", "in_fit"};
  for (auto& c : indexed("amplitude_e_", n)) cols.push_back(c);
  cols.push_back("status");
  CsvWriter table(out_path(cfg, "sweep_noise.csv"), cols, cfg.digest);
  for (const auto& r : res.rows) {
    std::vector<CsvWriter::Cell> row{r.epsilon, r.omega, r.settle_time.value_or(std::nan("")),
                                     static_cast<long long>(r.in_fit)};
    for (int i = 0; i < n; ++i) row.emplace_back(r.amplitude.empty() ? std::nan("") : r.amplitude[i]);
    row.emplace_back(r.error.empty() ? std::string("ok") : r.error);
    table.row(row);
  }
  CsvWriter fit(out_path(cfg, "sweep_noise_fit.csv"),
                {"component", "slope", "expected_slope", "lambda_empirical", "points"}, cfg.digest);
  for (int i = 0; i < n; ++i) {
    fit.row({static_cast<long long>(i + 1), res.fit.slope[i], res.fit.expected[i],
             res.fit.lambda[i], static_cast<long long>(res.fit.points)});
  }
  Summary s("sweep-noise");
  s.add("fit_points", static_cast<double>(res.fit.points));
  s.add("slopes", vector_text(res.fit.slope));
  s.add("expected_slopes", vector_text(res.fit.expected));
  s.add("lambda_empirical", vector_text(res.fit.lambda));
  s.write(cfg, "sweep_noise_summary.txt", log);
  for (const auto& r : res.rows) {
    if (!r.error.empty()) log << "epsilon " << CsvWriter::format(r.epsilon) << ": " << r.error << '\n';
  }
  return res.fit.points >= 2 ? kOk : kCertification;
}

namespace {

void write_certificate(const ExperimentConfig& cfg, const Design& design,
                       const DecayCertificate& c, const std::string& name) {
  CsvWriter table(out_path(cfg, name),
                  {"eta0", "etainf", "Tbar", "min_margin", "max_w_star", "sample_count",
                   "ratio_samples", "p0", "pinf", "delta", "kind"},
                  cfg.digest);
  table.row({c.eta0, c.etainf, c.Tbar.value_or(std::nan("")), c.min_margin, c.max_w_star,
             static_cast<long long>(c.sample_count), static_cast<long long>(c.ratio_samples),
             design.lyapunov.p0, design.lyapunov.pinf, design.delta,
             std::string("sampled_numerical_certificate")});
}

void add_certificate(Summary& s, const DecayCertificate& c) {
  s.add("eta0", c.eta0);
  s.add("etainf", c.etainf);
  s.add("Tbar", c.Tbar);
  s.add("min_margin", c.min_margin);
  s.add("max_w_star", c.max_w_star);
  s.add("sample_count", static_cast<double>(c.sample_count));
  s.add("note", "sampled numerical certificate, not a proof");
}

}  // namespace

int cmd_certify(const ExperimentConfig& cfg, std::ostream& log) {
  const Design design = build_design(cfg);
  const auto res = run_certify(cfg, design);
  write_certificate(cfg, design, res.certificate, "certificate.csv");
  Summary s("certify");
  s.add("k", vector_text(design.diff.ladder.k()));
  s.add("p0", design.lyapunov.p0);
  s.add("pinf", design.lyapunov.pinf);
  s.add("delta", design.delta);
  add_certificate(s, res.certificate);
  s.write(cfg, "certify_summary.txt", log);
  return kOk;
}

int cmd_synth_gains(const ExperimentConfig& input, std::ostream& log) {
  ExperimentConfig cfg = input;
  cfg.differentiator.synthesize = true;
  cfg.differentiator.k.clear();
  cfg.differentiator.ktilde.clear();
  const Design design = build_design(cfg);
  const auto& syn = *design.synthesis;
  const int n = design.diff.order();
  CsvWriter table(out_path(cfg, "gains.csv"),
                  {"component", "k", "ktilde", "omega", "kappa", "theta"}, cfg.digest);
  for (int i = 0; i < n; ++i) {
    table.row({static_cast<long long>(i + 1), design.diff.ladder.k(i), design.diff.ladder.ktilde(i),
               syn.omega[i], design.diff.gains.kappa[i], design.diff.gains.theta[i]});
  }
  write_certificate(cfg, design, syn.certificate, "certificate.csv");
  Summary s("synth-gains");
  s.add("k", vector_text(design.diff.ladder.k()));
  s.add("ktilde", vector_text(design.diff.ladder.ktilde()));
  s.add("omega", vector_text(syn.omega));
  add_certificate(s, syn.certificate);
  s.write(cfg, "synth_gains_summary.txt", log);
  return kOk;
}

int cmd_iss_probe(const ExperimentConfig& cfg, std::ostream& log) {
  const Design design = build_design(cfg);
  const auto rep = run_iss_probe(cfg, design);
  CsvWriter table(out_path(cfg, "iss.csv"), {"phase", "step", "amplitude", "envelope"}, cfg.digest);
  for (const auto& p : rep.phases) {
    table.row({p.name, static_cast<long long>(p.step), p.amplitude, p.envelope});
  }
  Summary s("iss-probe");
  s.add("floor_radius", rep.floor_radius);
  s.add("persistent_radius", rep.persistent_radius);
  s.add("bounded", rep.bounded ? "true" : "false");
  s.add("vanishing", rep.vanishing ? "true" : "false");
  s.write(cfg, "iss_probe_summary.txt", log);
  return rep.bounded && rep.vanishing ? kOk : kCertification;
}

int guarded(const std::function<int()>& body, std::ostream& log) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const CertificationError& e) {
    log << "certification failed: " << e.what() << '\n';
    if (e.index() >= 0) log << "component (zero-based): " << e.index() << '\n';
    if (!e.sample().empty()) log << "sample: " << vector_text(e.sample()) << '\n';
    return kCertification;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << '\n';
    return kCertification;
  } catch (const DivergenceError& e) {
    log << "diverged at t = " << CsvWriter::format(e.time()) << ": " << e.what() << '\n';
    log << "last state: " << vector_text(e.last_state()) << '\n';
    return kDivergence;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kValidation;
  }
}

}  // namespace bldiff::harness
