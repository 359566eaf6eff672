#include "chl/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "chl/event_io.hpp"
#include "chl/parallel.hpp"
#include "chl/render.hpp"
#include "chl/report.hpp"
#include "chl/verify.hpp"

namespace chl {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Values as given on the command line; unset fields fall back to the
/// config file, then to per-command defaults.
struct Flags {
  std::optional<double> n, lambda, t, window, tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicas, samples;
  std::optional<unsigned> threads;
  std::vector<std::string> probes, only;
  std::vector<double> n_list;
  std::optional<std::string> out, input, config;
  bool forward = false, trajectory = false;
};

struct RunConfig {
  std::string command;
  double n = 16.0;
  double lambda = 1.0;
  double t = 1.0;
  std::uint64_t seed = 1;
  std::size_t replicas = 2000;
  std::optional<double> window;
  double tol = 1e-10;
  std::vector<Complex> probes;
  std::vector<double> n_list;
  std::vector<std::string> only;
  std::size_t samples = 16;
  std::optional<std::string> input;
  fs::path out = ".";
  unsigned threads = 0;
  bool forward = false;
  bool trajectory = false;
};

std::string format_complex(const Complex& z) {
  std::string s = format_double(z.real());
  s += z.imag() < 0 || std::signbit(z.imag()) ? "-" : "+";
  s += format_double(std::abs(z.imag())) + "i";
  return s;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("malformed config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  static const std::vector<std::string> known{
      "n", "lambda", "t", "seed", "replicas", "window", "probe", "n-list", "out", "threads",
      "only", "tol", "forward", "trajectory", "samples", "input"};
  for (const auto& item : j.items())
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      throw UsageError("unknown config key: " + item.key());
  return j;
}

template <typename T>
T pick(const std::optional<T>& flag, const json& file, const char* key, T fallback) {
  if (flag) return *flag;
  if (file.contains(key)) {
    try {
      return file.at(key).get<T>();
    } catch (const json::exception&) {
      throw UsageError(std::string("config key has the wrong type: ") + key);
    }
  }
  return fallback;
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("CHL_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  std::size_t used = 0;
  std::uint64_t value = 0;
  try {
    value = std::stoull(raw, &used);
  } catch (const std::exception&) {
    throw UsageError(std::string("CHL_SEED is not an unsigned integer: ") + raw);
  }
  if (raw[used] != '\0' || raw[0] == '-')
    throw UsageError(std::string("CHL_SEED is not an unsigned integer: ") + raw);
  return value;
}

RunConfig resolve(const std::string& command, const Flags& f) {
  const json file = f.config ? load_config(*f.config) : json::object();
  RunConfig c;
  c.command = command;
  const bool converge = command == "converge";
  const bool simulate_like = command == "simulate" || command == "render";
  c.n = pick(f.n, file, "n", simulate_like ? 10.0 : 16.0);
  c.lambda = pick(f.lambda, file, "lambda", 1.0);
  c.t = pick(f.t, file, "t", converge ? 0.5 : 1.0);
  std::optional<std::uint64_t> seed = f.seed;
  if (!seed && file.contains("seed")) seed = pick<std::uint64_t>(std::nullopt, file, "seed", 1);
  if (!seed) seed = env_seed();
  c.seed = seed.value_or(1);
  c.replicas = pick(f.replicas, file, "replicas", std::size_t{converge ? 500u : 2000u});
  c.tol = pick(f.tol, file, "tol", 1e-10);
  c.samples = pick(f.samples, file, "samples", std::size_t{16});
  c.threads = pick(f.threads, file, "threads", 0u);
  c.forward = f.forward || pick<bool>(std::nullopt, file, "forward", false);
  c.trajectory = f.trajectory || pick<bool>(std::nullopt, file, "trajectory", false);
  c.out = pick(f.out, file, "out", std::string("."));
  c.input = f.input;
  if (!c.input && file.contains("input"))
    c.input = pick<std::string>(std::nullopt, file, "input", "");
  c.window = f.window;
  if (!c.window && file.contains("window")) c.window = pick(std::optional<double>{}, file, "window", 0.0);

  std::vector<std::string> probes = f.probes;
  if (probes.empty() && file.contains("probe"))
    probes = pick<std::vector<std::string>>(std::nullopt, file, "probe", {});
  if (probes.empty()) probes = {"0+1i"};
  for (const std::string& text : probes) {
    try {
      c.probes.push_back(parse_complex(text));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  c.n_list = f.n_list;
  if (c.n_list.empty() && file.contains("n-list"))
    c.n_list = pick<std::vector<double>>(std::nullopt, file, "n-list", {});
  if (c.n_list.empty()) c.n_list = {4, 8, 16, 32};
  c.only = f.only;
  if (c.only.empty() && file.contains("only"))
    c.only = pick<std::vector<std::string>>(std::nullopt, file, "only", {});

  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError(std::string(name) + " must be positive");
  };
  positive(c.n, "--n");
  positive(c.lambda, "--lambda");
  positive(c.tol, "--tol");
  if (!(c.t >= 0.0) || !std::isfinite(c.t)) throw UsageError("--t must be non-negative");
  if (c.window) positive(*c.window, "--window");
  if (c.replicas == 0) throw UsageError("--replicas must be positive");
  if (c.samples < 2) throw UsageError("--samples must be at least 2");
  for (double n : c.n_list) positive(n, "--n-list entries");
  if (!std::is_sorted(c.n_list.begin(), c.n_list.end()))
    throw UsageError("--n-list must be ascending");
  for (const std::string& name : c.only)
    if (std::find(check_names().begin(), check_names().end(), name) == check_names().end())
      throw UsageError("unknown check: " + name);
  return c;
}

/// Echo of every setting that influences the outputs.
json config_echo(const RunConfig& c) {
  json probes = json::array();
  for (const Complex& z : c.probes) probes.push_back(format_complex(z));
  json j = {{"command", c.command}, {"n", c.n},         {"lambda", c.lambda},
            {"t", c.t},             {"seed", c.seed},   {"replicas", c.replicas},
            {"tol", c.tol},         {"probe", probes},  {"n-list", c.n_list},
            {"only", c.only},       {"samples", c.samples}, {"forward", c.forward},
            {"trajectory", c.trajectory}};
  j["window"] = c.window ? json(*c.window) : json(nullptr);
  j["input"] = c.input ? json(*c.input) : json(nullptr);
  return j;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void prepare_out(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw std::runtime_error("cannot create " + c.out.string() + ": " + ec.message());
  open_output(c.out / "config.json") << config_echo(c).dump(2) << "\n";
}

int cmd_simulate(const RunConfig& c) {
  prepare_out(c);
  const CylinderParams p = make_cylinder(c.n, c.lambda);
  const EventLog log = sample_events(p, c.t, c.seed);
  {
    std::ofstream out = open_output(c.out / "events.jsonl");
    write_event_log(out, log);
  }
  if (c.trajectory) {
    const ProcessKind kind = c.forward ? ProcessKind::ForwardChl : ProcessKind::BackwardChl;
    const ProcessEvaluator cyl(log, kind);
    std::optional<ProcessEvaluator> shl;
    if (c.window)
      shl.emplace(log, c.forward ? ProcessKind::ForwardShl : ProcessKind::BackwardShl, c.window);
    std::vector<std::vector<std::pair<double, Complex>>> paths;
    for (const Complex& z : c.probes) paths.push_back(cyl.trajectory(z));
    std::ofstream out = open_output(c.out / "trajectory.csv");
    out << "time";
    for (std::size_t k = 0; k < c.probes.size(); ++k) {
      out << ",re_" << k << ",im_" << k;
      if (shl) out << ",shl_re_" << k << ",shl_im_" << k;
    }
    out << "\n";
    for (std::size_t j = 0; j < paths.front().size(); ++j) {
      const double time = paths.front()[j].first;
      out << format_double(time);
      for (std::size_t k = 0; k < c.probes.size(); ++k) {
        const Complex v = paths[k][j].second;
        out << "," << format_double(v.real()) << "," << format_double(v.imag());
        if (shl) {
          const Complex s = (*shl)(c.probes[k], time);
          out << "," << format_double(s.real()) << "," << format_double(s.imag());
        }
      }
      out << "\n";
    }
  }
  std::cerr << "simulate: " << log.size() << " events written to "
            << (c.out / "events.jsonl").string() << "\n";
  return kExitPass;
}

int cmd_verify(const RunConfig& c) {
  prepare_out(c);
  SuiteConfig suite;
  suite.radius_n = c.n;
  suite.lambda = c.lambda;
  suite.seed = c.seed;
  suite.replicas = c.replicas;
  suite.quad_tol = c.tol;
  suite.threads = c.threads;
  suite.only = c.only;
  const std::vector<CheckOutcome> outcomes = run_checks(suite);
  const json report = report_json(outcomes);
  open_output(c.out / "report.json") << report.dump(2) << "\n";
  for (const CheckOutcome& o : outcomes) {
    if (o.fit) {
      std::ofstream csv = open_output(c.out / (o.check + ".csv"));
      write_rate_csv(csv, *o.fit);
    }
    std::cerr << (o.pass ? "PASS " : "FAIL ") << o.check << "\n";
  }
  return report.at("pass").get<bool>() ? kExitPass : kExitCheckFailed;
}

int cmd_converge(const RunConfig& c) {
  prepare_out(c);
  const Complex z = c.probes.front();
  const auto rows =
      mc_coupling_convergence(c.lambda, z, c.t, c.n_list, c.replicas, c.seed, c.threads, c.window);
  {
    std::ofstream csv = open_output(c.out / "coupling.csv");
    csv << "N,mean_sq_distance,std,ci99_halfwidth\n";
    for (const CouplingRow& r : rows)
      csv << format_double(r.radius_n) << "," << format_double(r.summary.mean.real()) << ","
          << format_double(r.summary.std.real()) << ","
          << format_double(r.summary.ci99_halfwidth) << "\n";
  }
  const RateFit slit = slit_convergence_rate(c.lambda, z, {10, 20, 40, 80, 160});
  {
    std::ofstream csv = open_output(c.out / "slit_rate.csv");
    write_rate_csv(csv, slit);
  }
  std::vector<std::pair<double, double>> means;
  for (const CouplingRow& r : rows)
    if (r.summary.mean.real() > 0) means.emplace_back(r.radius_n, r.summary.mean.real());
  const bool monotone = monotone_up_to_ci(rows);
  json summary = {{"monotone", monotone},
                  {"strictly_decreasing", strictly_decreasing_beyond_ci(rows)},
                  {"paired_decrease_fraction",
                   rows.size() > 1 ? paired_decrease_fraction(rows, 0, rows.size() - 1) : 0.0},
                  {"slit_rate", fit_json(slit)}};
  summary["coupling_rate"] = means.size() >= 2 ? fit_json(fit_power_law(means)) : json(nullptr);
  open_output(c.out / "summary.json") << summary.dump(2) << "\n";
  std::cerr << "converge: means " << (monotone ? "non-increasing" : "not monotone") << "\n";
  return monotone ? kExitPass : kExitCheckFailed;
}

int cmd_render(const RunConfig& c) {
  std::optional<EventLog> log;
  if (c.input) {
    std::ifstream in(*c.input);
    if (!in) throw UsageError("cannot open input " + *c.input);
    try {
      log.emplace(read_event_log(in));
    } catch (const std::runtime_error& e) {
      throw UsageError(e.what());
    }
  } else {
    log.emplace(sample_events(make_cylinder(c.n, c.lambda), c.t, c.seed));
  }
  prepare_out(c);
  const auto traces =
      c.forward ? trace_cluster_forward(*log, c.samples) : trace_cluster(*log, c.samples);
  {
    std::ofstream csv = open_output(c.out / "cluster.csv");
    export_csv(csv, traces);
  }
  if (traces.empty()) {
    std::cerr << "render: empty log, no SVG written\n";
    return kExitPass;
  }
  std::ofstream svg = open_output(c.out / "cluster.svg");
  export_svg(svg, traces, log->params());
  std::cerr << "render: " << traces.size() << " particles\n";
  return kExitPass;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--n", f.n, "Cylinder radius N");
  sub->add_option("--lambda", f.lambda, "Slit length");
  sub->add_option("--seed", f.seed, "Random seed (fallback: CHL_SEED)");
  sub->add_option("--out", f.out, "Output directory");
  sub->add_option("--threads", f.threads, "Worker threads (default: all cores)");
  sub->add_option("--config", f.config, "JSON config file; flags take precedence");
}

}  // namespace

Complex parse_complex(const std::string& text) {
  static const std::string num = R"((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)";
  static const std::regex real_only("^\\s*([+-]?" + num + ")\\s*$");
  static const std::regex imag_only("^\\s*([+-]?)(" + num + ")?[ij]\\s*$");
  static const std::regex both("^\\s*([+-]?" + num + ")([+-])(" + num + ")?[ij]\\s*$");
  std::smatch m;
  if (std::regex_match(text, m, real_only)) return {std::stod(m[1].str()), 0.0};
  if (std::regex_match(text, m, imag_only)) {
    const double mag = m[2].matched ? std::stod(m[2].str()) : 1.0;
    return {0.0, m[1].str() == "-" ? -mag : mag};
  }
  if (std::regex_match(text, m, both)) {
    const double mag = m[3].matched ? std::stod(m[3].str()) : 1.0;
    return {std::stod(m[1].str()), m[2].str() == "-" ? -mag : mag};
  }
  throw std::invalid_argument("not a complex literal: \"" + text + "\"");
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Cylindrical Hastings-Levitov(0) simulation and verification", "chl"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* simulate = app.add_subcommand("simulate", "Sample an event log and trajectories");
  add_common(simulate, f);
  simulate->add_option("--t", f.t, "Time horizon");
  simulate->add_option("--probe", f.probes, "Probe point a+bi (repeatable)");
  simulate->add_option("--window", f.window, "Add SHL columns truncated at this width");
  simulate->add_flag("--trajectory", f.trajectory, "Write trajectory.csv for the probes");
  simulate->add_flag("--forward", f.forward, "Trajectory of the forward process");

  CLI::App* verify = app.add_subcommand("verify", "Run the verification suite");
  add_common(verify, f);
  verify->add_option("--replicas", f.replicas, "Monte Carlo replicas");
  verify->add_option("--tol", f.tol, "Quadrature absolute tolerance");
  verify->add_option("--only", f.only, "Run only these checks")->delimiter(',');

  CLI::App* converge = app.add_subcommand("converge", "Coupled CHL/SHL convergence study");
  add_common(converge, f);
  converge->add_option("--t", f.t, "Time horizon");
  converge->add_option("--replicas", f.replicas, "Coupled replicas");
  converge->add_option("--n-list", f.n_list, "Ascending radii, comma separated")->delimiter(',');
  converge->add_option("--probe", f.probes, "Probe point a+bi (first one is used)");
  converge->add_option("--window", f.window, "Fixed SHL truncation width");

  CLI::App* render = app.add_subcommand("render", "Trace the cluster and export SVG/CSV");
  add_common(render, f);
  render->add_option("--t", f.t, "Time horizon for inline sampling");
  render->add_option("--input", f.input, "events.jsonl written by simulate");
  render->add_option("--samples", f.samples, "Samples per slit");
  render->add_flag("--forward", f.forward, "Direct forward trace");

  std::vector<std::string> argv(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(argv.begin(), argv.end());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  for (CLI::App* sub : {simulate, verify, converge, render}) {
    if (!sub->parsed()) continue;
    try {
      const RunConfig c = resolve(sub->get_name(), f);
      if (sub == simulate) return cmd_simulate(c);
      if (sub == verify) return cmd_verify(c);
      if (sub == converge) return cmd_converge(c);
      return cmd_render(c);
    } catch (const std::exception& e) {
      // Bad values that slipped past validation surface here as well.
      std::cerr << "chl " << sub->get_name() << ": " << e.what() << "\n";
      return kExitUsage;
    }
  }
  return kExitUsage;
}

}  // namespace chl
