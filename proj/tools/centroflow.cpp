// centroflow: batch front-end for the flow, the solver and the diagnostics.
//
//   centroflow evolve   --config run.json --out results/ [--seed N]
//   centroflow solve    --config target.json --out results/
//   centroflow forward  --config curve.json --out results/
//   centroflow diagnose --config target.json --out results/
//   centroflow selftest [--config criteria.json] [--seed N]
//
// A config may carry an "experiments" array; each entry is merged over the
// top-level object and runs in its own subdirectory. CENTROFLOW_THREADS caps
// the number of experiments run at once.
//
// Exit codes: 0 success, 1 failure (selftest invariant or runtime error),
// 2 configuration error.
#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "centroflow/acceptance.hpp"
#include "centroflow/affine.hpp"
#include "centroflow/curve.hpp"
#include "centroflow/errors.hpp"
#include "centroflow/flow.hpp"
#include "centroflow/io.hpp"
#include "centroflow/obstruction.hpp"
#include "centroflow/shapes.hpp"
#include "centroflow/solver.hpp"

namespace fs = std::filesystem;
using namespace centroflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

std::mutex log_mutex;

void log_line(const std::string& line) {
  std::lock_guard lock(log_mutex);
  std::cout << line << std::endl;
}

// Prefixes ConfigError messages with where in the config they came from.
[[noreturn]] void rethrow_in(const std::string& where) {
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const Error& e) {
    // Bad curves and targets in a config are config errors too.
    throw ConfigError(where + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Config resolution

struct Experiment {
  std::string name;
  Json config;
  fs::path out_dir;
  std::uint64_t seed = 0;
};

std::vector<Experiment> expand(const Json& root, const fs::path& out, std::uint64_t seed) {
  if (!root.is_object()) throw ConfigError("top level of the config must be a JSON object");
  Json base = root;
  base.erase("experiments");
  if (!root.contains("experiments")) return {{"", base, out, seed}};

  const Json& list = root.at("experiments");
  if (!list.is_array() || list.empty()) throw ConfigError("'experiments' must be a non-empty array");
  std::vector<Experiment> out_list;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (!list[i].is_object()) throw ConfigError("experiments[" + std::to_string(i) + "] must be an object");
    Json merged = base;
    merged.merge_patch(list[i]);
    char fallback[32];
    std::snprintf(fallback, sizeof fallback, "exp_%03zu", i);
    std::string name = merged.value("name", std::string(fallback));
    if (name.empty() || name.find('/') != std::string::npos || name == "." || name == "..") {
      throw ConfigError("experiments[" + std::to_string(i) + "]: invalid name '" + name + "'");
    }
    out_list.push_back({name, std::move(merged), out / name, seed + i});
  }
  return out_list;
}

std::uint64_t resolve_seed(const Options& opt, const Json& root) {
  if (opt.seed) return *opt.seed;
  if (root.is_object() && root.contains("seed")) {
    if (!root.at("seed").is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
    return root.at("seed").get<std::uint64_t>();
  }
  return 0;
}

fs::path resolve_out(const Options& opt, const Json& root) {
  if (!opt.out.empty()) return opt.out;
  if (root.is_object() && root.contains("output_dir")) {
    if (!root.at("output_dir").is_string()) throw ConfigError("'output_dir' must be a string");
    return root.at("output_dir").get<std::string>();
  }
  return "centroflow_out";
}

int integer_key(const Json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
  return j.at(key).get<int>();
}

// One column of a CSV with a header row.
Field read_csv_column(const fs::path& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const auto it = std::find(header.begin(), header.end(), column);
  if (it == header.end()) throw ConfigError(path.string() + ": no column '" + column + "'");
  const auto idx = static_cast<std::size_t>(it - header.begin());
  Field values;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    for (std::size_t c = 0; c <= idx && std::getline(ss, cell, ','); ++c) {
    }
    try {
      values.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw ConfigError(path.string() + ":" + std::to_string(row) + ": not a number '" + cell + "'");
    }
  }
  return values;
}

// A curve is given as a Fourier spec {"a0","cos","sin"}, {"csv": path},
// {"ellipse": [a, b]} or {"random": {"period": k, "max_harmonic": m}}.
SupportField curve_from_json(const Json& j, int n, std::mt19937_64& rng, const fs::path& base) {
  if (!j.is_object()) throw ConfigError("curve must be an object");
  if (j.contains("csv")) {
    if (!j.at("csv").is_string()) throw ConfigError("'csv' must be a path");
    std::ifstream in(base / j.at("csv").get<std::string>());
    if (!in) throw ConfigError("cannot open " + (base / j.at("csv").get<std::string>()).string());
    return read_curve_csv(in);
  }
  if (j.contains("ellipse")) {
    const Json& e = j.at("ellipse");
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw ConfigError("'ellipse' must be [a, b]");
    }
    return ellipse(e[0].get<double>(), e[1].get<double>(), n);
  }
  if (j.contains("random")) {
    const Json& r = j.at("random");
    if (!r.is_object()) throw ConfigError("'random' must be an object");
    const int k = integer_key(r, "period", 1);
    const int m = integer_key(r, "max_harmonic", 6);
    if (k < 1 || m < 1) throw ConfigError("'period' and 'max_harmonic' must be positive");
    return synthesize(random_convex_spec(rng, n, k, m), n);
  }
  return synthesize(fourier_spec_from_json(j), n);
}

// Phi is given as a Fourier spec or {"csv": path, "column": name}.
Field target_from_json(const Json& j, int n, const fs::path& base) {
  if (!j.is_object()) throw ConfigError("'phi' must be an object");
  if (j.contains("csv")) {
    if (!j.at("csv").is_string()) throw ConfigError("'csv' must be a path");
    const std::string column = j.value("column", std::string("phi"));
    return read_csv_column(base / j.at("csv").get<std::string>(), column);
  }
  return sample(fourier_spec_from_json(j), n);
}

void write_file(const fs::path& path, const std::string& text) { write_text_file(path, text); }

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

std::string curve_file(const SupportField& s) {
  return render([&](std::ostream& os) { write_curve_csv(os, s); });
}

// ---------------------------------------------------------------------------
// Worker pool

int worker_count(std::size_t jobs) {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CENTROFLOW_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) cap = static_cast<unsigned>(v);
    } catch (const std::exception&) {
      throw ConfigError(std::string("CENTROFLOW_THREADS must be a positive integer, got '") + env + "'");
    }
  }
  return static_cast<int>(std::min<std::size_t>(cap, jobs));
}

// Runs jobs on a bounded pool; returns the first failure message, if any.
std::optional<std::string> run_pool(std::vector<std::function<void()>>& jobs) {
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::optional<std::string> first_error;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        jobs[i]();
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mutex);
        if (!first_error) first_error = e.what();
      }
    }
  };
  const int n = worker_count(jobs.size());
  std::vector<std::jthread> threads;
  for (int i = 1; i < n; ++i) threads.emplace_back(worker);
  worker();
  threads.clear();
  return first_error;
}

std::string label(const Experiment& e) { return e.name.empty() ? std::string() : "[" + e.name + "] "; }

// ---------------------------------------------------------------------------
// evolve

struct EvolveJob {
  Experiment exp;
  FlowConfig cfg;
  SupportField initial;
  long dump_every = 0;
  bool lambda = false;
};

EvolveJob prepare_evolve(const Experiment& e, const fs::path& base) {
  try {
    const FlowConfig cfg = flow_config_from_json(e.config);
    cfg.validate();
    std::mt19937_64 rng(e.seed);
    SupportField initial = e.config.contains("initial")
                               ? curve_from_json(e.config.at("initial"), cfg.n_samples, rng, base)
                               : SupportField::constant(1.0, cfg.n_samples);
    if (initial.size() != cfg.n_samples) {
      throw ConfigError("initial curve has " + std::to_string(initial.size()) + " samples but n_samples is " +
                        std::to_string(cfg.n_samples));
    }
    geometry(initial);  // NotConvex surfaces here
    const long dump = integer_key(e.config, "dump_every", 0);
    if (dump < 0) throw ConfigError("'dump_every' must be >= 0");
    bool lambda = false;
    if (e.config.contains("lambda_curve")) {
      if (!e.config.at("lambda_curve").is_boolean()) throw ConfigError("'lambda_curve' must be true or false");
      lambda = e.config.at("lambda_curve").get<bool>();
    }
    return {e, cfg, std::move(initial), dump, lambda};
  } catch (...) {
    rethrow_in(e.name.empty() ? "config" : "experiment '" + e.name + "'");
  }
}

void run_evolve(const EvolveJob& job) {
  const fs::path& dir = job.exp.out_dir;
  fs::create_directories(dir / "curves");
  write_file(dir / "curves" / "initial.csv", curve_file(job.initial));

  FlowObserver observer;
  if (job.dump_every > 0) {
    observer = [&](const FlowState& st, const FlowRecord&) {
      if (st.step_index > 0 && st.step_index % job.dump_every == 0) {
        char name[48];
        std::snprintf(name, sizeof name, "step_%08ld.csv", st.step_index);
        write_file(dir / "curves" / name, curve_file(st.s));
      }
      return true;
    };
  }
  const FlowTrace trace = run(job.cfg, job.initial, observer);
  write_file(dir / "trace.csv", render([&](std::ostream& os) { write_trace_csv(os, trace); }));
  if (trace.final_state) {
    write_file(dir / "curves" / "final.csv", curve_file(trace.final_state->s));
    if (job.lambda) {
      write_file(dir / "lambda.csv",
                 render([&](std::ostream& os) { write_lambda_csv(os, lambda_curve(trace.final_state->s)); }));
    }
  }

  const MonotoneCheck mono = check_monotone(trace);
  Json summary;
  summary["termination"] = to_string(trace.termination);
  summary["detail"] = trace.detail;
  summary["p"] = job.cfg.p;
  summary["n_samples"] = job.cfg.n_samples;
  summary["normalize"] = job.cfg.normalize;
  summary["integrator"] = to_string(job.cfg.integrator);
  summary["seed"] = job.exp.seed;
  summary["initial"] = to_json(trace.records.front());
  summary["final"] = to_json(trace.records.back());
  if (!job.cfg.normalize) {
    const auto est = extrapolate_extinction(trace, job.cfg.p);
    summary["extinction_estimate"] = est ? Json(*est) : Json(nullptr);
    summary["extinction_bound"] = extinction_bound(job.initial, job.cfg);
  } else if (trace.final_state) {
    summary["scale"] = trace.final_state->scale;
  }
  summary["monotone"] = {{"pass", mono.pass()},
                         {"worst_min_speed_drop", mono.worst_min_speed_drop},
                         {"worst_ratio_drop", mono.worst_ratio_drop}};
  write_file(dir / "summary.json", summary.dump(2) + "\n");

  const FlowRecord& last = trace.records.back();
  char msg[256];
  std::snprintf(msg, sizeof msg, "evolve: %s after %ld steps, t=%.6g area=%.6g", to_string(trace.termination),
                last.step, last.t, last.area);
  log_line(label(job.exp) + msg);
}

// ---------------------------------------------------------------------------
// solve

struct SolveJob {
  Experiment exp;
  TargetData target;
  FlowConfig cfg;
};

SolveJob prepare_solve(const Experiment& e, const fs::path& base) {
  try {
    if (!e.config.contains("phi")) throw ConfigError("missing 'phi'");
    FlowConfig cfg = default_solve_config();
    if (e.config.contains("flow")) cfg = flow_config_from_json(e.config.at("flow"), cfg);
    const int n = integer_key(e.config, "n_samples", cfg.n_samples);
    double p = cfg.p;
    if (e.config.contains("p")) {
      if (!e.config.at("p").is_number()) throw ConfigError("'p' must be a number");
      p = e.config.at("p").get<double>();
    }
    cfg.p = p;
    cfg.n_samples = n;
    cfg.normalize = true;
    cfg.validate();
    TargetData target = make_target(target_from_json(e.config.at("phi"), n, base), p);
    return {e, std::move(target), cfg};
  } catch (...) {
    rethrow_in(e.name.empty() ? "config" : "experiment '" + e.name + "'");
  }
}

void run_solve(const SolveJob& job) {
  const fs::path& dir = job.exp.out_dir;
  fs::create_directories(dir / "snapshots");
  const SolveReport report = solve(job.target, job.cfg);
  std::vector<std::string> refs;
  for (std::size_t i = 0; i < report.snapshots.size(); ++i) {
    char name[48];
    std::snprintf(name, sizeof name, "snapshots/snapshot_%02zu.csv", i);
    write_file(dir / name, curve_file(report.snapshots[i].s));
    refs.emplace_back(name);
  }
  write_file(dir / "solution.csv", curve_file(report.best_s));
  write_file(dir / "trace.csv", render([&](std::ostream& os) { write_trace_csv(os, report.trace); }));
  Json j = to_json(report, refs);
  j["solution_ref"] = "solution.csv";
  write_file(dir / "report.json", j.dump(2) + "\n");

  char msg[256];
  std::snprintf(msg, sizeof msg, "solve: %s residual_sup=%.3e residual_osc=%.3e aspect=%.3g steps=%ld",
                to_string(report.status), report.residual_sup, report.residual_osc, report.final_aspect,
                report.n_steps);
  log_line(label(job.exp) + msg);
}

// ---------------------------------------------------------------------------
// forward

struct ForwardJob {
  Experiment exp;
  SupportField curve;
};

ForwardJob prepare_forward(const Experiment& e, const fs::path& base) {
  try {
    if (!e.config.contains("curve")) throw ConfigError("missing 'curve'");
    const int n = integer_key(e.config, "n_samples", 256);
    if (n < 8 || n % 4 != 0) throw ConfigError("'n_samples' must be a multiple of 4, at least 8");
    std::mt19937_64 rng(e.seed);
    SupportField s = curve_from_json(e.config.at("curve"), n, rng, base);
    geometry(s);
    return {e, std::move(s)};
  } catch (...) {
    rethrow_in(e.name.empty() ? "config" : "experiment '" + e.name + "'");
  }
}

void run_forward(const ForwardJob& job) {
  const fs::path& dir = job.exp.out_dir;
  fs::create_directories(dir);
  const Field phi = forward(job.curve);
  write_file(dir / "forward.csv", field_csv(phi, "phi"));
  write_file(dir / "curve.csv", curve_file(job.curve));
  const int k = detect_periodicity(phi);
  Json j;
  j["n_samples"] = job.curve.size();
  j["phi_min"] = *std::min_element(phi.begin(), phi.end());
  j["phi_max"] = *std::max_element(phi.begin(), phi.end());
  j["k"] = k == kUnboundedPeriodicity ? Json(nullptr) : Json(k);
  j["area"] = geometry(job.curve).area;
  j["phi_ref"] = "forward.csv";
  j["curve_ref"] = "curve.csv";
  write_file(dir / "forward.json", j.dump(2) + "\n");
  log_line(label(job.exp) + "forward: wrote " + (dir / "forward.csv").string());
}

// ---------------------------------------------------------------------------
// diagnose

struct DiagnoseJob {
  Experiment exp;
  Field phi;
  std::optional<SupportField> u;
};

DiagnoseJob prepare_diagnose(const Experiment& e, const fs::path& base) {
  try {
    if (!e.config.contains("phi")) throw ConfigError("missing 'phi'");
    const int n = integer_key(e.config, "n_samples", 256);
    if (n < 8 || n % 4 != 0) throw ConfigError("'n_samples' must be a multiple of 4, at least 8");
    Field phi = target_from_json(e.config.at("phi"), n, base);
    make_target(phi, 1.5);  // positivity and symmetry
    std::optional<SupportField> u;
    if (e.config.contains("u")) {
      std::mt19937_64 rng(e.seed);
      u = curve_from_json(e.config.at("u"), static_cast<int>(phi.size()), rng, base);
    }
    return {e, std::move(phi), std::move(u)};
  } catch (...) {
    rethrow_in(e.name.empty() ? "config" : "experiment '" + e.name + "'");
  }
}

void run_diagnose(const DiagnoseJob& job) {
  const fs::path& dir = job.exp.out_dir;
  fs::create_directories(dir);
  const ObstructionReport r = diagnose(job.phi, job.u ? &*job.u : nullptr);
  Json j = to_json(r);
  j["b_values_ref"] = "b_values.csv";
  write_file(dir / "diagnose.json", j.dump(2) + "\n");

  std::string csv = "x,b\n";
  char line[96];
  const std::size_t m = r.b_values.size();
  for (std::size_t i = 0; i < m; ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", std::numbers::pi * static_cast<double>(i) / static_cast<double>(m),
                  r.b_values[i]);
    csv += line;
  }
  write_file(dir / "b_values.csv", csv);

  std::string count = r.critical.degenerate ? "Degenerate" : std::to_string(r.critical.count);
  std::string winding = r.winding ? std::to_string(*r.winding) : "n/a";
  log_line(label(job.exp) + "diagnose: critical=" + count + " winding=" + winding +
           " necessary_condition_pass=" + (r.necessary_condition_pass ? "true" : "false") +
           " theorem_b_applicable=" + (r.theorem_b_applicable ? "true" : "false"));
}

// ---------------------------------------------------------------------------

template <class Job>
int batch(const Options& opt, Job (*prepare)(const Experiment&, const fs::path&), void (*execute)(const Job&)) {
  if (opt.config.empty()) throw ConfigError("--config is required");
  const Json root = read_json_file(opt.config);
  const fs::path base = fs::path(opt.config).parent_path();
  const auto experiments = expand(root, resolve_out(opt, root), resolve_seed(opt, root));

  // Everything is validated before anything runs.
  std::vector<Job> prepared;
  for (const Experiment& e : experiments) prepared.push_back(prepare(e, base));

  std::vector<std::function<void()>> jobs;
  for (const Job& job : prepared) jobs.emplace_back([&job, execute] { execute(job); });
  if (auto err = run_pool(jobs)) {
    std::cerr << "error: " << *err << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int selftest(const Options& opt) {
  std::vector<int> ids;
  Json root = Json::object();
  if (!opt.config.empty()) {
    root = read_json_file(opt.config);
    if (root.contains("criteria")) {
      const Json& c = root.at("criteria");
      if (!c.is_array()) throw ConfigError("'criteria' must be an array of integers");
      for (const Json& v : c) {
        if (!v.is_number_integer() || v.get<int>() < 1 || v.get<int>() > acceptance::kCriteria) {
          throw ConfigError("'criteria' entries must be integers in 1.." + std::to_string(acceptance::kCriteria));
        }
        ids.push_back(v.get<int>());
      }
    }
  }
  const std::uint64_t seed = opt.seed ? *opt.seed
                             : root.contains("seed") ? resolve_seed(opt, root)
                                                     : acceptance::kDefaultSeed;
  const auto results = acceptance::run_all(std::cout, ids, seed);

  if (!opt.out.empty()) {
    fs::create_directories(opt.out);
    Json j = Json::array();
    for (const auto& r : results) {
      j.push_back({{"criterion", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    }
    write_file(fs::path(opt.out) / "selftest.json", j.dump(2) + "\n");
  }
  for (const auto& r : results) {
    if (!r.pass) {
      std::cerr << "selftest: criterion " << r.id << " (" << r.name << ") failed: " << r.detail << "\n";
      return kExitFailure;
    }
  }
  std::cout << "selftest: all " << results.size() << " criteria passed\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Centro-affine curve flow and planar Minkowski problem toolkit", "centroflow"};
  app.require_subcommand(1);

  Options opt;
  const std::pair<const char*, const char*> commands[] = {
      {"evolve", "Run the curve flow and write traces and curve dumps"},
      {"solve", "Solve s (s'' + s)^{1/3} = Phi by the normalized flow"},
      {"forward", "Compute Phi = s (s'' + s)^{1/3} for a curve"},
      {"diagnose", "Report the obstruction diagnostics of a target Phi"},
      {"selftest", "Run the acceptance invariant suite"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON experiment config");
    sub->add_option("--out", opt.out, "Output directory");
    sub->add_option("--seed", opt.seed, "Seed for random curve generation");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "evolve") return batch(opt, prepare_evolve, run_evolve);
    if (cmd == "solve") return batch(opt, prepare_solve, run_solve);
    if (cmd == "forward") return batch(opt, prepare_forward, run_forward);
    if (cmd == "diagnose") return batch(opt, prepare_diagnose, run_diagnose);
    return selftest(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
