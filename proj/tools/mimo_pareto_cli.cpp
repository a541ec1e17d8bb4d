// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: scenario generation, explicit sweeps, boundary tracing,
// verification and plot-script emission. Every command writes a manifest next to
// its outputs.

#include "mimo_pareto/mimo_pareto.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
namespace mp = mimo_pareto;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitVerification = 4;
constexpr int kManifestSchemaVersion = 1;

struct Common {
  std::string out = ".";
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool strict_pareto = false;
};

struct ScenarioArgs {
  std::string kind = "miso-ic";
  int kt = 0;
  int n = 2;
  int users = 2;
  double snr = 10.0;
  double evm = 0.0;
  std::string metric = "rate";
};

struct ExplicitArgs {
  std::string scenario;
  double step = 0.01;
  std::size_t max_points = 5'000'000;
};

struct TraceArgs {
  std::string scenario;
  double tol = 1e-5;
  int profiles = 101;
  std::vector<std::string> alphas;
  bool random_profiles = false;
  bool no_power_resolve = false;
};

struct VerifyArgs {
  std::string scenario;
  std::string boundary;
  double tol = 1e-5;
  int profiles = 101;
  std::size_t samples = 100000;
  int power_grid = 10;
  double refine = 0.5;
  bool no_oracle = false;
};

struct PlotArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> labels;
  std::string image = "region.png";
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Effective value of every option of a subcommand, defaults included.
mp::Json effective_options(const CLI::App* app) {
  mp::Json j = mp::Json::object();
  for (const CLI::Option* o : app->get_options()) {
    const std::string name = o->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    const bool flag = o->get_expected_max() == 0;
    if (o->count() > 0) {
      const auto& r = o->results();
      if (flag) {
        j[name] = true;
      } else if (r.size() == 1 && o->get_expected_max() == 1) {
        j[name] = r.front();
      } else {
        j[name] = r;
      }
    } else if (flag) {
      j[name] = false;
    } else if (!o->get_default_str().empty()) {
      j[name] = o->get_default_str();
    } else {
      j[name] = nullptr;
    }
  }
  return j;
}

void write_manifest(const Common& common, const CLI::App* sub, const mp::Json& inputs,
                    const std::vector<std::string>& outputs, const mp::Json& extra = mp::Json::object()) {
  mp::Json m;
  m["schema_version"] = kManifestSchemaVersion;
  m["tool"] = "mimo_pareto";
  m["version"] = mp::kVersion;
  m["command"] = sub->get_name();
  m["config"] = effective_options(sub);
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  m["created"] = utc_timestamp();
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  mp::write_text_file_atomic(fs::path(common.out) / (sub->get_name() + ".manifest.json"), m.dump(2) + "\n");
}

mp::Json scenario_input(const std::string& path, const mp::Scenario& s) {
  return {{"path", path}, {"fingerprint", mp::fingerprint(s)}};
}

mp::Scenario load_checked(const std::string& path) {
  mp::Scenario s = mp::load_scenario(path);
  for (const auto& w : s.warnings()) std::cerr << "warning: " << w << "\n";
  return s;
}

void ensure_out(const Common& c) { fs::create_directories(c.out); }

int cmd_scenario(const Common& common, const ScenarioArgs& a, const CLI::App* sub) {
  const mp::ScenarioKind kind = mp::parse_scenario_kind(a.kind);
  mp::ScenarioSizes sizes;
  if (kind == mp::ScenarioKind::miso_ic) {
    sizes.transmitters = a.kt > 0 ? a.kt : 2;
    sizes.antennas_per_transmitter = a.n;
    sizes.users = sizes.transmitters;
  } else {
    const int kt = a.kt > 0 ? a.kt : a.n;
    if (a.n <= 0 || kt <= 0 || a.n % kt != 0) {
      throw mp::ValidationError("scenario: --n must be a positive multiple of --kt for network-mimo");
    }
    sizes.transmitters = kt;
    sizes.antennas_per_transmitter = a.n / kt;
    sizes.users = a.users;
  }
  if (sizes.antennas_per_transmitter <= 0) throw mp::ValidationError("scenario: --n must be positive");
  mp::Scenario s = mp::generate_scenario(kind, sizes, a.snr, a.evm, common.seed);
  if (a.metric == "mse") {
    s = mp::with_metric(s, mp::PerformanceMetric::mse());
  } else if (a.metric == "ser4qam") {
    s = mp::with_metric(s, mp::PerformanceMetric::ser4qam());
  } else if (a.metric != "rate") {
    throw mp::ValidationError("scenario: unknown metric '" + a.metric + "'");
  }
  for (const auto& w : s.warnings()) std::cerr << "warning: " << w << "\n";
  ensure_out(common);
  const fs::path path = fs::path(common.out) / "scenario.json";
  mp::save_scenario(s, path);
  write_manifest(common, sub, mp::Json::object(), {path.string()}, {{"fingerprint", mp::fingerprint(s)}});
  std::cout << path.string() << "\n";
  return 0;
}

int cmd_explicit(const Common& common, const ExplicitArgs& a, const CLI::App* sub) {
  const mp::Scenario s = load_checked(a.scenario);
  mp::SweepOptions opt;
  opt.max_points = a.max_points;
  opt.threads = common.threads;
  const mp::SweepResult sweep = mp::sweep_explicit(s, a.step, opt);
  const mp::RegionSample all = mp::sample_from_sweep(s, sweep);
  const mp::RegionSample front =
      mp::pareto_filter(all, common.strict_pareto ? mp::ParetoMode::pareto : mp::ParetoMode::outer);
  ensure_out(common);
  const fs::path sweep_path = fs::path(common.out) / "sweep.csv";
  const fs::path front_path = fs::path(common.out) / "front.csv";
  mp::export_sample(all, sweep_path);
  mp::export_sample(front, front_path);
  write_manifest(common, sub, {{"scenario", scenario_input(a.scenario, s)}}, {sweep_path.string(), front_path.string()},
                 {{"grid_points", sweep.total}, {"invalid_points", sweep.skipped}});
  std::cout << sweep.total << " grid points, " << sweep.skipped << " invalid, " << front.rows.size() << " on the front\n";
  return 0;
}

std::vector<mp::FairnessProfile> parse_alphas(const std::vector<std::string>& specs, int users) {
  std::vector<mp::FairnessProfile> out;
  for (const auto& spec : specs) {
    std::vector<double> v;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw mp::ValidationError("trace: cannot parse profile '" + spec + "'");
      }
    }
    if (static_cast<int>(v.size()) != users) {
      throw mp::ValidationError("trace: profile '" + spec + "' needs " + std::to_string(users) + " entries");
    }
    out.push_back(mp::FairnessProfile::from(Eigen::Map<const Eigen::VectorXd>(v.data(), users)));
  }
  return out;
}

int cmd_trace(const Common& common, const TraceArgs& a, const CLI::App* sub) {
  const mp::Scenario s = load_checked(a.scenario);
  std::vector<mp::FairnessProfile> profiles;
  if (!a.alphas.empty()) {
    profiles = parse_alphas(a.alphas, s.num_users());
  } else if (a.random_profiles) {
    if (a.profiles < 1) throw mp::ValidationError("trace: --profiles must be positive");
    profiles = mp::random_profiles(s.num_users(), a.profiles, common.seed);
  } else {
    profiles = mp::uniform_profiles(s.num_users(), a.profiles);
  }
  mp::TraceOptions opt;
  opt.tol = a.tol;
  opt.power_resolve = !a.no_power_resolve;
  opt.threads = common.threads;
  const auto pts = mp::trace_boundary(s, profiles, opt);

  mp::RegionSample sample = mp::sample_from_boundary(s, pts);
  mp::Json warnings = mp::Json::array();
  bool solver_failed = false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (const auto& w : pts[i].warnings) {
      warnings.push_back({{"profile", i}, {"message", w}});
      if (w.rfind("solver failure", 0) == 0) solver_failed = true;
    }
  }
  if (common.strict_pareto) {
    std::erase_if(sample.rows, [](const mp::RegionRow& r) { return r.weak_pareto; });
  }
  ensure_out(common);
  const fs::path path = fs::path(common.out) / "boundary.csv";
  mp::export_sample(sample, path);
  write_manifest(common, sub, {{"scenario", scenario_input(a.scenario, s)}}, {path.string()},
                 {{"warnings", warnings}, {"profiles_traced", pts.size()}});
  std::cout << sample.rows.size() << " boundary points written to " << path.string() << "\n";
  if (solver_failed) {
    std::cerr << "error: the cone solver failed on at least one feasibility test (see manifest warnings)\n";
    return kExitSolver;
  }
  return 0;
}

int cmd_verify(const Common& common, const VerifyArgs& a, const CLI::App* sub) {
  const mp::Scenario s = load_checked(a.scenario);
  mp::VerifyOptions opt;
  opt.profiles = a.profiles;
  opt.trace.tol = a.tol;
  opt.trace.threads = common.threads;
  opt.run_oracle = !a.no_oracle;
  opt.oracle.num_samples = a.samples;
  opt.oracle.seed = common.seed;
  opt.oracle.power_grid = a.power_grid;
  opt.oracle.refine_fraction = a.refine;
  opt.oracle.threads = common.threads;
  mp::VerificationReport rep = mp::verify_scenario(s, opt);
  mp::Json inputs = {{"scenario", scenario_input(a.scenario, s)}};
  if (!a.boundary.empty()) {
    const mp::RegionSample stored = mp::load_sample(a.boundary);
    rep.checks.push_back(mp::verify_boundary_sample(s, stored));
    inputs["boundary"] = {{"path", a.boundary}, {"fingerprint", stored.fingerprint}};
  }
  ensure_out(common);
  const fs::path path = fs::path(common.out) / "verify.json";
  mp::write_text_file_atomic(path, rep.to_json().dump(2) + "\n");
  write_manifest(common, sub, inputs, {path.string()}, {{"passed", rep.passed()}});
  for (const auto& c : rep.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << c.value << " threshold=" << c.threshold;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << "\n";
  }
  return rep.passed() ? 0 : kExitVerification;
}

int cmd_plot(const Common& common, const PlotArgs& a, const CLI::App* sub) {
  if (!a.labels.empty() && a.labels.size() != a.inputs.size()) {
    throw mp::ValidationError("plot: give one label per input or none");
  }
  ensure_out(common);
  std::vector<std::string> names;
  std::vector<std::string> outputs;
  mp::Json inputs = mp::Json::array();
  int users = -1;
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    mp::RegionSample sample = mp::load_sample(a.inputs[i]);
    if (common.strict_pareto) sample = mp::pareto_filter(sample, mp::ParetoMode::pareto);
    if (users >= 0 && sample.num_users != users) throw mp::ValidationError("plot: inputs have different user counts");
    users = sample.num_users;
    const std::string name = "data_" + std::to_string(i) + ".csv";
    mp::export_sample(sample, fs::path(common.out) / name);
    names.push_back(name);
    outputs.push_back((fs::path(common.out) / name).string());
    inputs.push_back({{"path", a.inputs[i]}, {"fingerprint", sample.fingerprint}});
  }
  const std::vector<std::string> labels = a.labels.empty() ? a.inputs : a.labels;
  const fs::path script = fs::path(common.out) / "plot.py";
  mp::write_text_file_atomic(script, mp::plot_script(names, labels, users, a.image));
  outputs.push_back(script.string());
  write_manifest(common, sub, inputs, outputs);
  std::cout << script.string() << "\n";
  return 0;
}

void add_common(CLI::App* sub, Common& c, bool pareto_flag) {
  sub->add_option("--out", c.out, "Output directory")->capture_default_str();
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
  if (pareto_flag) {
    sub->add_flag("--strict-pareto", c.strict_pareto,
                  "Keep only strongly Pareto optimal points (default keeps weakly optimal ones)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pareto boundary computation for multi-user MISO beamforming"};
  app.set_version_flag("--version", std::string(mp::kVersion));
  app.set_config("--config", "", "TOML or INI file with option values; command-line flags take precedence");
  app.require_subcommand(1);

  Common common;
  ScenarioArgs sa;
  ExplicitArgs ea;
  TraceArgs ta;
  VerifyArgs va;
  PlotArgs pa;

  CLI::App* scen = app.add_subcommand("scenario", "Generate a random scenario file");
  scen->add_option("--kind", sa.kind, "miso-ic or network-mimo")->capture_default_str()
      ->check(CLI::IsMember({"miso-ic", "network-mimo"}));
  scen->add_option("--kt", sa.kt, "Number of transmitters (miso-ic default 2, network-mimo default --n)")
      ->capture_default_str();
  scen->add_option("--n", sa.n, "Antennas per transmitter (miso-ic) or in total (network-mimo)")->capture_default_str();
  scen->add_option("--users", sa.users, "Users (network-mimo)")->capture_default_str();
  scen->add_option("--snr", sa.snr, "Average single-user SNR in dB")->capture_default_str();
  scen->add_option("--evm", sa.evm, "Error vector magnitude on every antenna")->capture_default_str();
  scen->add_option("--metric", sa.metric, "rate, mse or ser4qam")->capture_default_str();
  add_common(scen, common, false);

  CLI::App* expl = app.add_subcommand("explicit", "Sweep the explicit parametrization on a uniform grid");
  expl->add_option("--scenario", ea.scenario, "Scenario file")->required();
  expl->add_option("--step", ea.step, "Grid step on both simplices")->capture_default_str();
  expl->add_option("--max-points", ea.max_points, "Refuse grids larger than this")->capture_default_str();
  add_common(expl, common, true);

  CLI::App* trace = app.add_subcommand("trace", "Trace the boundary along fairness profiles");
  trace->add_option("--scenario", ta.scenario, "Scenario file")->required();
  trace->add_option("--tol", ta.tol, "Bisection tolerance on g_sum")->capture_default_str();
  trace->add_option("--profiles", ta.profiles, "Number of profiles (per axis + 1 for more than two users)")
      ->capture_default_str();
  trace->add_option("--alpha", ta.alphas, "Explicit profile as comma-separated weights; repeatable");
  trace->add_flag("--random-profiles", ta.random_profiles, "Draw --profiles profiles uniformly from the simplex");
  trace->add_flag("--no-power-resolve", ta.no_power_resolve, "Report the cone solution without re-solving powers");
  add_common(trace, common, true);

  CLI::App* ver = app.add_subcommand("verify", "Trace, cross-check and compare against a brute-force oracle");
  ver->add_option("--scenario", va.scenario, "Scenario file")->required();
  ver->add_option("--boundary", va.boundary, "Stored boundary file to check as well");
  ver->add_option("--tol", va.tol, "Bisection tolerance")->capture_default_str();
  ver->add_option("--profiles", va.profiles, "Number of traced profiles")->capture_default_str();
  ver->add_option("--samples", va.samples, "Oracle sample budget")->capture_default_str();
  ver->add_option("--power-grid", va.power_grid, "Oracle power levels per user")->capture_default_str();
  ver->add_option("--refine", va.refine, "Share of the oracle budget spent on local search")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  ver->add_flag("--no-oracle", va.no_oracle, "Skip the brute-force comparison");
  add_common(ver, common, false);

  CLI::App* plot = app.add_subcommand("plot", "Emit a plot script and data files");
  plot->add_option("--inputs", pa.inputs, "Region sample files (CSV or JSON)")->required();
  plot->add_option("--labels", pa.labels, "Legend labels, one per input");
  plot->add_option("--image", pa.image, "Image file the script writes")->capture_default_str();
  add_common(plot, common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*scen) return cmd_scenario(common, sa, scen);
    if (*expl) return cmd_explicit(common, ea, expl);
    if (*trace) return cmd_trace(common, ta, trace);
    if (*ver) return cmd_verify(common, va, ver);
    if (*plot) return cmd_plot(common, pa, plot);
  } catch (const mp::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitValidation;
}
