#include "bldiff/harness/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace bldiff::harness {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

void allow_keys(const json& obj, const std::string& path, std::set<std::string> keys) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!keys.count(key)) fail(path + "." + key, "unknown key");
  }
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

double positive(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x > 0.0)) fail(path, "must be positive");
  return x;
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

/// A scalar broadcast to n entries, or an array of exactly n entries.
std::vector<double> per_component(const json& v, int n, const std::string& path) {
  if (v.is_number()) return std::vector<double>(n, number(v, path));
  auto out = numbers(v, path);
  if (static_cast<int>(out.size()) != n) {
    fail(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(out.size()));
  }
  return out;
}

double get_or(const json& obj, const char* key, double fallback, const std::string& path) {
  return obj.contains(key) ? number(obj.at(key), join(path, key)) : fallback;
}

DifferentiatorBlock parse_differentiator(const json& d) {
  const std::string path = "differentiator";
  allow_keys(d, path, {"order", "d0", "dinf", "kappa", "theta", "mu", "k", "ktilde", "synthesize"});
  DifferentiatorBlock out;
  if (!d.contains("order")) fail(path + ".order", "required");
  out.degrees.n = integer(d.at("order"), path + ".order");
  out.degrees.d0 = get_or(d, "d0", 0.0, path);
  out.degrees.dinf = get_or(d, "dinf", 0.0, path);
  try {
    validate(out.degrees);
  } catch (const ConfigError& e) {
    fail(path, e.what());
  }
  const int n = out.degrees.n;
  if (d.contains("mu")) {
    if (d.contains("kappa") || d.contains("theta")) fail(path + ".mu", "conflicts with kappa/theta");
    const double mu = number(d.at("mu"), path + ".mu");
    if (!(mu > 0.0 && mu < 1.0)) fail(path + ".mu", "must lie in (0, 1)");
    out.gains = InternalGains::from_mu(n, mu);
  } else {
    out.gains.kappa = d.contains("kappa") ? per_component(d.at("kappa"), n, path + ".kappa")
                                          : std::vector<double>(n, 1.0);
    out.gains.theta = d.contains("theta") ? per_component(d.at("theta"), n, path + ".theta")
                                          : std::vector<double>(n, 1.0);
  }
  for (int i = 0; i < n; ++i) {
    if (!(out.gains.kappa[i] > 0.0)) fail(path + ".kappa[" + std::to_string(i) + "]", "must be positive");
    if (!(out.gains.theta[i] > 0.0)) fail(path + ".theta[" + std::to_string(i) + "]", "must be positive");
  }

  int sources = 0;
  if (d.contains("k")) {
    out.k = per_component(d.at("k"), n, path + ".k");
    ++sources;
  }
  if (d.contains("ktilde")) {
    out.ktilde = per_component(d.at("ktilde"), n, path + ".ktilde");
    ++sources;
  }
  if (d.contains("synthesize")) {
    const auto& s = d.at("synthesize");
    if (s.is_boolean()) {
      out.synthesize = s.get<bool>();
    } else if (s.is_object()) {
      allow_keys(s, path + ".synthesize", {"delta"});
      out.synthesize = true;
      if (s.contains("delta")) {
        const double delta = number(s.at("delta"), path + ".synthesize.delta");
        if (delta < 0.0) fail(path + ".synthesize.delta", "must be nonnegative");
        out.synthesis_delta = delta;
      }
    } else {
      fail(path + ".synthesize", "expected a boolean or an object");
    }
    if (out.synthesize) ++sources;
  }
  if (sources != 1) fail(path, "exactly one of k, ktilde or synthesize must be given");
  return out;
}

NoiseSpec parse_noise(const json& v, std::uint64_t seed) {
  const std::string path = "signal.noise";
  allow_keys(v, path, {"kind", "epsilon", "seed", "omega", "phase", "decay_period", "decay_factor"});
  NoiseSpec nz;
  nz.seed = seed;
  const std::string kind = v.value("kind", "uniform");
  if (kind == "uniform") {
    nz.kind = NoiseSpec::Kind::uniform_bounded;
  } else if (kind == "sinusoidal") {
    nz.kind = NoiseSpec::Kind::sinusoidal;
  } else {
    fail(path + ".kind", "expected \"uniform\" or \"sinusoidal\"");
  }
  nz.epsilon = get_or(v, "epsilon", 0.0, path);
  if (nz.epsilon < 0.0) fail(path + ".epsilon", "must be nonnegative");
  if (v.contains("seed")) {
    if (!v.at("seed").is_number_unsigned()) fail(path + ".seed", "expected a nonnegative integer");
    nz.seed = v.at("seed").get<std::uint64_t>();
  }
  nz.omega = get_or(v, "omega", 0.0, path);
  nz.phase = get_or(v, "phase", 0.0, path);
  nz.decay_period = get_or(v, "decay_period", 0.0, path);
  nz.decay_factor = get_or(v, "decay_factor", 1.0, path);
  if (!(nz.decay_factor > 0.0 && nz.decay_factor <= 1.0)) {
    fail(path + ".decay_factor", "must lie in (0, 1]");
  }
  return nz;
}

SignalSpec parse_signal(const json& v, int n, double horizon, std::uint64_t seed) {
  const std::string path = "signal";
  allow_keys(v, path, {"kind", "order", "coefficients", "omegas", "sin_amplitudes",
                       "cos_amplitudes", "harmonics", "trend", "delta", "noise"});
  const int order = v.contains("order") ? integer(v.at("order"), path + ".order") : n;
  if (order != n) fail(path + ".order", "must equal the differentiator order");
  const std::string kind = v.value("kind", "polynomial");
  std::optional<SignalSpec> spec;
  try {
    if (kind == "polynomial") {
      spec = SignalSpec::polynomial(
          order, v.contains("coefficients") ? numbers(v.at("coefficients"), path + ".coefficients")
                                            : std::vector<double>{});
    } else if (kind == "sinusoid_mix") {
      const auto omegas = numbers(v.value("omegas", json::array()), path + ".omegas");
      auto sines = v.contains("sin_amplitudes")
                       ? numbers(v.at("sin_amplitudes"), path + ".sin_amplitudes")
                       : std::vector<double>(omegas.size(), 0.0);
      auto cosines = v.contains("cos_amplitudes")
                         ? numbers(v.at("cos_amplitudes"), path + ".cos_amplitudes")
                         : std::vector<double>(omegas.size(), 0.0);
      spec = SignalSpec::sinusoid_mix(order, omegas, std::move(sines), std::move(cosines));
    } else if (kind == "custom_harmonic") {
      std::vector<Harmonic> hs;
      const json arr = v.value("harmonics", json::array());
      if (!arr.is_array()) fail(path + ".harmonics", "expected an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string hp = path + ".harmonics[" + std::to_string(i) + "]";
        allow_keys(arr[i], hp, {"amplitude", "omega", "phase"});
        hs.push_back({get_or(arr[i], "amplitude", 0.0, hp), get_or(arr[i], "omega", 0.0, hp),
                      get_or(arr[i], "phase", 0.0, hp)});
      }
      spec = SignalSpec::custom_harmonic(
          order, std::move(hs),
          v.contains("trend") ? numbers(v.at("trend"), path + ".trend") : std::vector<double>{});
    } else {
      fail(path + ".kind", "expected polynomial, sinusoid_mix or custom_harmonic");
    }
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    fail(path, msg);
  }

  if (!v.contains("delta") || v.at("delta") == "auto") {
    spec->with_auto_delta(horizon);
  } else {
    const double delta = number(v.at("delta"), path + ".delta");
    if (delta < 0.0) fail(path + ".delta", "must be nonnegative");
    try {
      spec->with_delta(delta, horizon);
    } catch (const ConfigError& e) {
      fail(path + ".delta", e.what());
    }
  }
  if (v.contains("noise")) spec->with_noise(parse_noise(v.at("noise"), seed));
  return *spec;
}

SimulationBlock parse_simulation(const json& v, int n) {
  const std::string path = "simulation";
  allow_keys(v, path, {"dt", "t_final", "record_every", "threshold", "boundary_layer",
                       "initial_error", "record_lyapunov"});
  SimulationBlock s;
  if (v.contains("dt")) s.dt = positive(v.at("dt"), path + ".dt");
  if (v.contains("t_final")) s.t_final = positive(v.at("t_final"), path + ".t_final");
  if (v.contains("record_every")) {
    s.record_every = integer(v.at("record_every"), path + ".record_every");
    if (s.record_every < 1) fail(path + ".record_every", "must be at least 1");
  }
  if (v.contains("threshold")) s.threshold = positive(v.at("threshold"), path + ".threshold");
  s.boundary_layer = get_or(v, "boundary_layer", 0.0, path);
  if (s.boundary_layer < 0.0) fail(path + ".boundary_layer", "must be nonnegative");
  s.initial_error = v.contains("initial_error")
                        ? per_component(v.at("initial_error"), n, path + ".initial_error")
                        : std::vector<double>(n, 0.0);
  if (v.contains("record_lyapunov")) {
    if (!v.at("record_lyapunov").is_boolean()) fail(path + ".record_lyapunov", "expected a boolean");
    s.record_lyapunov = v.at("record_lyapunov").get<bool>();
  }
  return s;
}

SweepBlock parse_sweep(const json& v, int n) {
  const std::string path = "sweep";
  allow_keys(v, path, {"initial_errors", "generator", "noise_epsilons", "noise_omega_scale",
                       "steady_fraction", "with_bound"});
  SweepBlock s;
  if (v.contains("initial_errors") && v.contains("generator")) {
    fail(path, "initial_errors and generator are mutually exclusive");
  }
  if (v.contains("initial_errors")) {
    const auto& arr = v.at("initial_errors");
    if (!arr.is_array()) fail(path + ".initial_errors", "expected an array of vectors");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      s.initial_errors.push_back(
          per_component(arr[i], n, path + ".initial_errors[" + std::to_string(i) + "]"));
    }
  }
  if (v.contains("generator")) {
    const std::string gp = path + ".generator";
    const auto& g = v.at("generator");
    allow_keys(g, gp, {"base", "p_min", "p_max", "p_step"});
    if (!g.contains("base")) fail(gp + ".base", "required");
    const auto base = per_component(g.at("base"), n, gp + ".base");
    const double pmin = get_or(g, "p_min", 0.0, gp);
    const double pmax = get_or(g, "p_max", pmin, gp);
    const double step = get_or(g, "p_step", 1.0, gp);
    if (!(step > 0.0)) fail(gp + ".p_step", "must be positive");
    if (pmax < pmin) fail(gp + ".p_max", "must not be below p_min");
    const int count = static_cast<int>(std::floor((pmax - pmin) / step + 1e-9)) + 1;
    for (int j = 0; j < count; ++j) {
      const double p = pmin + j * step;
      std::vector<double> e(base);
      for (auto& x : e) x *= std::pow(10.0, p);
      s.initial_errors.push_back(std::move(e));
      s.exponents.push_back(p);
    }
  }
  if (v.contains("noise_epsilons")) {
    s.noise_epsilons = numbers(v.at("noise_epsilons"), path + ".noise_epsilons");
    for (std::size_t i = 0; i < s.noise_epsilons.size(); ++i) {
      if (s.noise_epsilons[i] < 0.0) {
        fail(path + ".noise_epsilons[" + std::to_string(i) + "]", "must be nonnegative");
      }
    }
  }
  if (v.contains("noise_omega_scale")) {
    s.noise_omega_scale = positive(v.at("noise_omega_scale"), path + ".noise_omega_scale");
  }
  s.steady_fraction = get_or(v, "steady_fraction", 0.3, path);
  if (!(s.steady_fraction > 0.0 && s.steady_fraction < 1.0)) {
    fail(path + ".steady_fraction", "must lie in (0, 1)");
  }
  if (v.contains("with_bound")) {
    if (!v.at("with_bound").is_boolean()) fail(path + ".with_bound", "expected a boolean");
    s.with_bound = v.at("with_bound").get<bool>();
  }
  return s;
}

LyapunovBlock parse_lyapunov(const json& v, int n) {
  const std::string path = "lyapunov";
  allow_keys(v, path, {"p0", "pinf", "beta0", "betainf"});
  LyapunovBlock out;
  auto exponent = [&](const char* key) -> std::optional<double> {
    if (!v.contains(key) || v.at(key) == "auto") return std::nullopt;
    return positive(v.at(key), join(path, key));
  };
  out.p0 = exponent("p0");
  out.pinf = exponent("pinf");
  if (out.p0.has_value() != out.pinf.has_value()) {
    fail(path, "p0 and pinf must both be given or both be automatic");
  }
  auto betas = [&](const char* key) {
    if (!v.contains(key)) return std::vector<double>{};
    auto b = per_component(v.at(key), n, join(path, key));
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (!(b[i] > 0.0)) fail(join(path, key) + "[" + std::to_string(i) + "]", "must be positive");
    }
    return b;
  };
  out.beta0 = betas("beta0");
  out.betainf = betas("betainf");
  return out;
}

CertifyBlock parse_certify(const json& v) {
  const std::string path = "certify";
  allow_keys(v, path, {"directions", "log10_min", "log10_max", "log10_step", "safety_factor",
                       "ratio_floor", "delta"});
  CertifyBlock c;
  auto& plan = c.options.plan;
  if (v.contains("directions")) {
    plan.directions = integer(v.at("directions"), path + ".directions");
    if (plan.directions < 2) fail(path + ".directions", "must be at least 2");
  }
  plan.log10_min = get_or(v, "log10_min", plan.log10_min, path);
  plan.log10_max = get_or(v, "log10_max", plan.log10_max, path);
  if (plan.log10_max < plan.log10_min) fail(path + ".log10_max", "must not be below log10_min");
  if (v.contains("log10_step")) plan.log10_step = positive(v.at("log10_step"), path + ".log10_step");
  if (v.contains("safety_factor")) {
    c.options.safety_factor = positive(v.at("safety_factor"), path + ".safety_factor");
  }
  if (v.contains("ratio_floor")) {
    c.options.ratio_floor = positive(v.at("ratio_floor"), path + ".ratio_floor");
  }
  if (v.contains("delta")) {
    const double delta = number(v.at("delta"), path + ".delta");
    if (delta < 0.0) fail(path + ".delta", "must be nonnegative");
    c.delta = delta;
  }
  return c;
}

SynthesisSettings parse_synthesis(const json& v, const CertifyOptions& certify) {
  const std::string path = "synthesis";
  allow_keys(v, path, {"safety_factor", "ktilde_floor", "perturbation_margin",
                       "denominator_floor", "growth_tolerance"});
  SynthesisSettings s;
  s.certify = certify;
  if (v.contains("safety_factor")) s.safety_factor = positive(v.at("safety_factor"), path + ".safety_factor");
  if (v.contains("ktilde_floor")) s.ktilde_floor = positive(v.at("ktilde_floor"), path + ".ktilde_floor");
  if (v.contains("perturbation_margin")) {
    s.perturbation_margin = number(v.at("perturbation_margin"), path + ".perturbation_margin");
    if (!(s.perturbation_margin > 1.0)) fail(path + ".perturbation_margin", "must exceed 1");
  }
  if (v.contains("denominator_floor")) {
    s.denominator_floor = positive(v.at("denominator_floor"), path + ".denominator_floor");
  }
  if (v.contains("growth_tolerance")) {
    s.growth_tolerance = positive(v.at("growth_tolerance"), path + ".growth_tolerance");
  }
  return s;
}

IssBlock parse_iss(const json& v) {
  const std::string path = "iss";
  allow_keys(v, path, {"kind", "omega", "epsilon", "decay_period", "decay_factor", "steps"});
  IssBlock b;
  if (v.contains("kind")) {
    const auto kind = v.at("kind");
    if (kind == "uniform") {
      b.kind = NoiseSpec::Kind::uniform_bounded;
    } else if (kind != "sinusoidal") {
      fail(path + ".kind", "expected \"uniform\" or \"sinusoidal\"");
    }
  }
  if (v.contains("omega")) b.omega = positive(v.at("omega"), path + ".omega");
  if (v.contains("epsilon")) b.epsilon = positive(v.at("epsilon"), path + ".epsilon");
  if (v.contains("decay_period")) b.decay_period = positive(v.at("decay_period"), path + ".decay_period");
  if (v.contains("decay_factor")) {
    b.decay_factor = number(v.at("decay_factor"), path + ".decay_factor");
    if (!(b.decay_factor > 0.0 && b.decay_factor < 1.0)) {
      fail(path + ".decay_factor", "must lie in (0, 1)");
    }
  }
  if (v.contains("steps")) {
    b.steps = integer(v.at("steps"), path + ".steps");
    if (b.steps < 2) fail(path + ".steps", "must be at least 2");
  }
  return b;
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(const json& input, const Overrides& overrides) {
  json doc = input;
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object at the top level");
  allow_keys(doc, "config", {"differentiator", "scaling", "lyapunov", "signal", "simulation",
                             "sweep", "certify", "synthesis", "iss", "output", "seed", "workers"});
  if (overrides.out_dir) doc["output"]["dir"] = *overrides.out_dir;
  if (overrides.seed) doc["seed"] = *overrides.seed;
  if (overrides.workers) doc["workers"] = *overrides.workers;
  if (overrides.dt) doc["simulation"]["dt"] = *overrides.dt;
  if (overrides.t_final) doc["simulation"]["t_final"] = *overrides.t_final;
  if (overrides.threshold) doc["simulation"]["threshold"] = *overrides.threshold;

  ExperimentConfig cfg;
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) fail("seed", "expected a nonnegative integer");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("workers")) {
    cfg.workers = integer(doc.at("workers"), "workers");
    if (cfg.workers < 0) fail("workers", "must be nonnegative");
  }
  if (!doc.contains("differentiator")) fail("differentiator", "required");
  cfg.differentiator = parse_differentiator(doc.at("differentiator"));
  const int n = cfg.differentiator.degrees.n;

  if (doc.contains("scaling")) {
    const auto& s = doc.at("scaling");
    allow_keys(s, "scaling", {"alpha", "L"});
    if (s.contains("alpha")) cfg.scaling.alpha = positive(s.at("alpha"), "scaling.alpha");
    if (s.contains("L")) cfg.scaling.L = positive(s.at("L"), "scaling.L");
  }
  cfg.simulation = parse_simulation(doc.value("simulation", json::object()), n);
  cfg.lyapunov = parse_lyapunov(doc.value("lyapunov", json::object()), n);
  cfg.signal = parse_signal(doc.value("signal", json::object()), n,
                            std::max(cfg.simulation.t_final, 1.0), cfg.seed);
  cfg.sweep = parse_sweep(doc.value("sweep", json::object()), n);
  cfg.certify = parse_certify(doc.value("certify", json::object()));
  cfg.synthesis = parse_synthesis(doc.value("synthesis", json::object()), cfg.certify.options);
  cfg.iss = parse_iss(doc.value("iss", json::object()));
  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    allow_keys(o, "output", {"dir", "prefix"});
    if (o.contains("dir")) {
      if (!o.at("dir").is_string()) fail("output.dir", "expected a string");
      cfg.output.dir = o.at("dir").get<std::string>();
    }
    if (o.contains("prefix")) {
      if (!o.at("prefix").is_string()) fail("output.prefix", "expected a string");
      cfg.output.prefix = o.at("prefix").get<std::string>();
    }
  }

  const auto& d = cfg.differentiator;
  if (d.synthesis_delta && *d.synthesis_delta > 0.0 && d.degrees.d0 != -1.0) {
    fail("differentiator.synthesize.delta", "a positive bound requires d0 = -1");
  }

  // Results do not depend on where they are written or on the worker count.
  json digest_doc = doc;
  digest_doc.erase("output");
  digest_doc.erase("workers");
  cfg.digest = fnv1a_hex(digest_doc.dump());
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return parse_config(doc, overrides);
}

LyapunovParams resolve_lyapunov(const LyapunovBlock& block, const WeightVectors& w) {
  LyapunovParams p = LyapunovParams::defaults(w);
  if (block.p0) {
    p.p0 = *block.p0;
    p.pinf = *block.pinf;
  }
  if (!block.beta0.empty()) p.beta0 = block.beta0;
  if (!block.betainf.empty()) p.betainf = block.betainf;
  return p;
}

double certified_delta(const ExperimentConfig& cfg) {
  if (cfg.certify.delta) return *cfg.certify.delta;
  return cfg.differentiator.degrees.d0 == -1.0 ? cfg.signal.delta() : 0.0;
}

}  // namespace bldiff::harness
