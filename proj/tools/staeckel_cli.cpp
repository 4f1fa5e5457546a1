// staeckel: command-line front end for the verification suites, trajectories,
// geometry tables and quantum checks.
//
// Exit codes: 0 all checks pass, 1 a check failed (or a run hit the domain
// boundary), 2 configuration error.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "staeckel.hpp"

using namespace staeckel;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string system;
  int dim = 3;
  std::vector<std::string> raw_params;
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
  int trials = 100;
  double tol = -1.0;  // < 0: the suite default
  std::string output;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("STAECKEL_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("STAECKEL_SEED is not an unsigned integer: ") + env);
  }
  return 20240611;
}

SystemParams parse_params(RunConfig& cfg) {
  SystemParams p;
  const std::map<std::string, double SystemParams::*> fields{
      {"alpha", &SystemParams::alpha}, {"beta", &SystemParams::beta}, {"gamma", &SystemParams::gamma},
      {"delta", &SystemParams::delta}, {"xi", &SystemParams::xi},     {"lambda", &SystemParams::lambda},
      {"eta", &SystemParams::eta}};
  for (const auto& kv : cfg.raw_params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--param expects name=value, got '" + kv + "'");
    const std::string name = kv.substr(0, eq);
    const auto it = fields.find(name);
    if (it == fields.end()) throw ConfigError("unknown parameter '" + name + "'");
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
    } catch (const std::exception&) {
      throw ConfigError("bad value in --param " + kv);
    }
    p.*(it->second) = v;
    cfg.params[name] = v;
  }
  return p;
}

SystemSpec build_spec(RunConfig& cfg) {
  const SystemParams p = parse_params(cfg);
  return make_system(parse_system_id(cfg.system), cfg.dim, p);
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad number in ") + what + ": '" + item + "'");
    }
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

Json report_header(const RunConfig& cfg, const SystemSpec& spec) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["system"] = spec.name();
  j["dim"] = spec.dim;
  Json params = Json::object();
  for (const auto& [k, v] : cfg.params) params[k] = v;
  j["params"] = params;
  j["seed"] = cfg.seed;
  j["timestamp"] = utc_timestamp();
  return j;
}

// Writes to --output when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot open output file " + path);
    }
  }
  std::ostream& out() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

// The free system has two candidate sets; the first one is monitored.
std::vector<Observable> monitored_set(const SystemSpec& spec, int fixed_i) {
  if (spec.id == SystemId::FreeEuclidean) return free_independent_sets(spec, fixed_i).first;
  return independent_set(spec, fixed_i);
}

Json check(const std::string& name, double residual, double tol, bool pass) {
  return Json{{"name", name}, {"max_residual", residual}, {"tol", tol}, {"pass", pass}};
}

int cmd_verify(RunConfig& cfg) {
  const auto spec = build_spec(cfg);
  if (cfg.trials < 10) throw ConfigError("--trials must be at least 10");
  const double tol = cfg.tol > 0 ? cfg.tol : kCommutationTol;
  Json j = report_header(cfg, spec);
  j["trials"] = cfg.trials;
  Json checks = Json::array();
  bool all = true;
  double oracle = 0.0;
  auto add = [&](Json c) {
    all = all && c["pass"].get<bool>();
    checks.push_back(std::move(c));
  };

  auto brackets = commutation_suite(spec, tol, cfg.trials, cfg.seed);
  const auto algebra = algebra_suite(spec, tol, cfg.trials, cfg.seed);
  brackets.insert(brackets.end(), algebra.begin(), algebra.end());
  for (const auto& r : brackets) {
    add(check(r.name, r.max_normalized, r.tol, r.pass));
    oracle = std::max(oracle, r.max_oracle_deviation);
  }
  add(check("fd-oracle agreement", oracle, kOracleTol, oracle <= kOracleTol));

  for (const auto& r : trace_identity_check(spec, cfg.trials, cfg.seed, cfg.tol > 0 ? cfg.tol : kTraceTol))
    add(check(r.name, r.max_relative_deviation, r.tol, r.pass));

  const auto rank = independence_rank(spec, monitored_set(spec, 1), cfg.trials, cfg.seed);
  Json rc = check("rank " + std::to_string(rank.expected_rank) + " of the independent set", 1.0 - rank.full_rank_fraction,
                  1.0 - kRankPassFraction, rank.pass);
  rc["min_relative_sigma"] = rank.min_relative_sigma;
  rc["sigma_threshold"] = rank.threshold;
  rc["labels"] = rank.labels;
  add(std::move(rc));

  j["checks"] = checks;
  j["pass"] = all;
  Sink sink(cfg.output);
  sink.out() << j.dump(2) << '\n';
  return all ? 0 : kExitFail;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

struct IntegrateArgs {
  std::string q, p;
  double t_end = 10.0;
  int fixed_i = 1;
};

int cmd_integrate(RunConfig& cfg, const IntegrateArgs& args) {
  const auto spec = build_spec(cfg);
  const double tol = cfg.tol > 0 ? cfg.tol : 1e-10;
  PhaseState x0;
  if (args.q.empty() != args.p.empty()) throw ConfigError("--q and --p must be given together");
  if (args.q.empty()) {
    x0 = sample_phase_point(spec, cfg.seed, kSampleMargin);
  } else {
    x0 = PhaseState(parse_list(args.q, "--q"), parse_list(args.p, "--p"));
    if (x0.dim() != spec.dim) throw ConfigError("initial state dimension does not match --dim");
    require_in_domain(spec, radius(x0));
  }
  if (!(args.t_end >= 0.0)) throw ConfigError("--t-end must be non-negative");

  std::vector<Observable> monitor = monitored_set(spec, args.fixed_i);
  if (monitor.empty() || monitor.front().label() != "H") monitor.insert(monitor.begin(), hamiltonian_observable(spec));
  const auto out = integrate_with_outcome(spec, x0, args.t_end, tol, monitor);
  const auto& tr = out.trajectory;

  Sink sink(cfg.output);
  auto& os = sink.out();
  os << "# schema_version: " << kSchemaVersion << '\n';
  os << 't';
  for (int i = 1; i <= spec.dim; ++i) os << ",q" << i;
  for (int i = 1; i <= spec.dim; ++i) os << ",p" << i;
  os << ",H";
  for (std::size_t k = 1; k < tr.labels.size(); ++k) os << ',' << tr.labels[k];
  os << '\n';
  for (std::size_t s = 0; s < tr.size(); ++s) {
    os << fmt(tr.times[s]);
    for (double v : tr.states[s].q) os << ',' << fmt(v);
    for (double v : tr.states[s].p) os << ',' << fmt(v);
    for (const auto& col : tr.series) os << ',' << fmt(col[s]);
    os << '\n';
  }
  if (out.failure) {
    os.flush();
    std::cerr << "staeckel: integration stopped at t=" << fmt(tr.times.back()) << ": " << out.message << '\n';
    return kExitFail;
  }
  os << "drift";
  for (int i = 0; i < 2 * spec.dim; ++i) os << ',';
  for (const auto& d : drift_report(tr, monitor)) os << ',' << fmt(d.max_relative_drift);
  os << '\n';
  return 0;
}

struct GeometryArgs {
  std::string radii;
  double r_min = 0.1;
  double r_max = 5.0;
  int r_count = 50;
};

int cmd_geometry(RunConfig& cfg, const GeometryArgs& args) {
  const auto spec = build_spec(cfg);
  const auto prof = conformal_factor(spec);
  std::vector<double> grid;
  if (!args.radii.empty()) {
    grid = parse_list(args.radii, "--r");
  } else {
    if (args.r_count < 1) throw ConfigError("--r-count must be positive");
    for (int k = 0; k < args.r_count; ++k)
      grid.push_back(args.r_count == 1 ? args.r_min : args.r_min + (args.r_max - args.r_min) * k / (args.r_count - 1));
  }
  Sink sink(cfg.output);
  auto& os = sink.out();
  os << "# schema_version: " << kSchemaVersion << '\n';
  os << "r,f,R_closed,R_oracle,u_kc,u_o\n";
  for (double r : grid) {
    try {
      const double closed = scalar_curvature_closed(spec, r);
      const double oracle = scalar_curvature_oracle(prof, spec.dim, r);
      const auto u = intrinsic_potentials(spec, r);
      os << fmt(r) << ',' << fmt(prof.f(r)) << ',' << fmt(closed) << ',' << fmt(oracle) << ',' << fmt(u.u_kc) << ','
         << fmt(u.u_o) << '\n';
    } catch (const Error& e) {
      std::cerr << "staeckel: warning: skipping r=" << fmt(r) << " (" << e.what() << ")\n";
    }
  }
  return 0;
}

int cmd_quantum(RunConfig& cfg, int points) {
  const auto spec = build_spec(cfg);
  if (points < kMinConfidencePoints)
    throw ConfigError("--points must be at least " + std::to_string(kMinConfidencePoints));
  const auto sys = build_quantum_system(spec);
  Json j = report_header(cfg, spec);
  j["points"] = points;
  Json checks = Json::array();
  bool all = true;
  for (const auto& v : quantum_verdicts(sys, points, cfg.seed)) {
    Json c = check(v.name, v.max_normalized, kZeroTestTol, v.pass);
    c["terms"] = v.terms;
    checks.push_back(std::move(c));
    all = all && v.pass;
  }
  j["checks"] = checks;
  j["pass"] = all;
  j["note"] = "algebraic independence of the quantum integrals is not certified";
  Sink sink(cfg.output);
  sink.out() << j.dump(2) << '\n';
  return all ? 0 : kExitFail;
}

void common_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--system", cfg.system, "free, flat-oscillator, flat-kc, curved-kc, darboux3, spherical-osc, taubnut")
      ->required();
  sub->add_option("--dim", cfg.dim, "configuration-space dimension N");
  sub->add_option("--param", cfg.raw_params, "coupling as name=value (repeatable)");
  sub->add_option("--seed", cfg.seed, "sampling seed (default: $STAECKEL_SEED)");
  sub->add_option("-o,--output", cfg.output, "output path (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Staeckel-transform superintegrable systems: verification and experiments"};
  app.require_subcommand(1);
  RunConfig cfg;
  int points = kMinConfidencePoints;
  IntegrateArgs iargs;
  GeometryArgs gargs;

  auto* verify = app.add_subcommand("verify", "Poisson commutation, trace identities and independence rank");
  common_options(verify, cfg);
  verify->add_option("--trials", cfg.trials, "sample points per check");
  verify->add_option("--tol", cfg.tol, "override the bracket and identity tolerance");

  auto* integ = app.add_subcommand("integrate", "integrate a trajectory and write CSV");
  common_options(integ, cfg);
  integ->add_option("--q", iargs.q, "initial positions, comma separated");
  integ->add_option("--p", iargs.p, "initial momenta, comma separated");
  integ->add_option("--t-end", iargs.t_end, "final time");
  integ->add_option("--tol", cfg.tol, "integrator tolerance (default 1e-10)");
  integ->add_option("--set", iargs.fixed_i, "index i of the independent set to monitor");

  auto* geom = app.add_subcommand("geometry", "tabulate f, scalar curvature and intrinsic potentials");
  common_options(geom, cfg);
  geom->add_option("--r", gargs.radii, "explicit radii, comma separated");
  geom->add_option("--r-min", gargs.r_min, "first radius of the grid");
  geom->add_option("--r-max", gargs.r_max, "last radius of the grid");
  geom->add_option("--r-count", gargs.r_count, "number of grid radii");

  auto* quant = app.add_subcommand("quantum-verify", "randomized zero tests of the quantum commutators");
  common_options(quant, cfg);
  quant->add_option("--points", points, "evaluation points per zero test");

  try {
    cfg.seed = default_seed();
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "staeckel: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (verify->parsed()) return cmd_verify(cfg);
    if (integ->parsed()) return cmd_integrate(cfg, iargs);
    if (geom->parsed()) return cmd_geometry(cfg, gargs);
    return cmd_quantum(cfg, points);
  } catch (const ConfigError& e) {
    std::cerr << "staeckel: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "staeckel: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::InvalidParameter:
      case ErrorKind::UnsupportedDimension:
      case ErrorKind::DomainViolation:
      case ErrorKind::EmptyDomain:
      case ErrorKind::NotCurved:
      case ErrorKind::OriginSingularity:
        return kExitConfig;
      default:
        return kExitFail;
    }
  }
}
