#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "swt/analysis.hpp"
#include "swt/io.hpp"
#include "swt/offline.hpp"
#include "swt/registry.hpp"
#include "swt/verify.hpp"

namespace swt::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

/// Bad command line or experiment spec (exit code 2).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Worker count from SWT_WORKERS (default 1).
inline std::size_t env_workers() {
  const char* raw = std::getenv("SWT_WORKERS");
  if (raw == nullptr || *raw == '\0') return 1;
  try {
    const long v = std::stol(raw);
    if (v < 1) throw std::invalid_argument("");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw UsageError(std::string("SWT_WORKERS must be a positive integer, got '") + raw + "'");
  }
}

/// Formats a grid value with 12 significant digits so CSV cells and generator
/// parameters stay free of accumulated floating-point noise.
inline std::string format_grid_value(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

struct GridAxis {
  std::string name;
  std::vector<std::string> values;
};

/// Parses `name=start:stop:step` into its points (inclusive of stop).
inline GridAxis parse_grid(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("grid must look like name=start:stop:step");
  GridAxis axis;
  axis.name = text.substr(0, eq);
  std::vector<double> parts;
  std::stringstream ss(text.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      parts.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("bad grid value '" + item + "'");
    }
  }
  if (parts.size() == 1) parts = {parts[0], parts[0], 1.0};
  if (parts.size() != 3 || !(parts[2] > 0.0)) throw UsageError("grid must look like name=start:stop:step with step > 0");
  const double start = parts[0];
  const double stop = parts[1];
  const double step = parts[2];
  if (stop < start) throw UsageError("empty grid for '" + axis.name + "'");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) axis.values.push_back(format_grid_value(start + step * static_cast<double>(i)));
  return axis;
}

/// Runs `work(i)` for i in [0, count) on `workers` threads with strided indices.
template <class Work>
void parallel_for(std::size_t count, std::size_t workers, Work&& work) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < count; i += workers) work(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct SourceSpec {
  std::vector<std::string> gen;  // name followed by key=value items
  std::string instance_path;
};

template <Numeric Num>
GeneratorSetup<Num> resolve_source(const SourceSpec& spec, std::uint64_t seed,
                                   const std::map<std::string, std::string>& extra = {}) {
  if (!spec.gen.empty() && !spec.instance_path.empty()) throw UsageError("use either --gen or --instance, not both");
  if (!spec.instance_path.empty()) {
    std::ifstream in(spec.instance_path);
    if (!in) throw UsageError("cannot open instance file '" + spec.instance_path + "'");
    GeneratorSetup<Num> out;
    out.factory = static_source_factory(read_instance<Num>(in));
    return out;
  }
  if (spec.gen.empty()) throw UsageError("one of --gen or --instance is required");
  std::map<std::string, std::string> params;
  for (std::size_t i = 1; i < spec.gen.size(); ++i) parse_assignment(spec.gen[i], params);
  for (const auto& [k, v] : extra) params[k] = v;
  return make_generator<Num>(spec.gen.front(), params, seed);
}

struct RunSpec {
  std::string alg;
  SourceSpec source;
  std::string objective = "sum";
  std::size_t trials = 1;
  std::optional<std::uint64_t> seed;
  bool exact = false;
};

template <Numeric Num>
struct RunResult {
  Expectation<Num> expectation;
  double ratio = 0.0;
  bool randomized = false;
};

template <Numeric Num>
RunResult<Num> run_spec(const RunSpec& spec, std::size_t workers,
                        const std::map<std::string, std::string>& extra = {}) {
  if (spec.trials < 1) throw UsageError("--trials must be >= 1");
  AlgorithmChoice choice;
  const auto algorithm = make_algorithm<Num>(parse_key(spec.alg), &choice);
  const Objective objective = parse_objective(spec.objective);
  const auto setup = resolve_source<Num>(spec.source, spec.seed.value_or(0), extra);
  const bool needs_seed = (choice.randomized && !spec.exact) || setup.seeded;
  if (needs_seed && !spec.seed) throw UsageError("--seed is required for randomized runs");

  ExpectationOptions options;
  options.trials = spec.trials;
  options.seed = spec.seed.value_or(0);
  options.objective = objective;
  options.workers = workers;
  if (spec.exact) {
    if (setup.seeded) throw UsageError("--exact cannot enumerate a seeded generator");
    options.mode = ExpectationMode::Exact;
  } else if (choice.randomized || setup.seeded) {
    options.mode = ExpectationMode::MonteCarlo;
  }
  RunResult<Num> out;
  out.randomized = choice.randomized;
  out.expectation = run_expected<Num>(
      algorithm, setup.factory, [objective](const Instance<Num>& i) { return optimal_cost(i, objective); },
      options);
  out.ratio = make_ratio_report(out.expectation.mean, out.expectation.opt_mean).ratio;
  return out;
}

template <Numeric Num>
void write_trace_file(const RunSpec& spec, const std::string& path) {
  const auto algorithm = make_algorithm<Num>(parse_key(spec.alg));
  const std::uint64_t s = spec.seed ? trial_seed(*spec.seed, 0) : 0;
  const auto setup = resolve_source<Num>(spec.source, spec.seed.value_or(0));
  auto alg = algorithm.sample(s);
  auto source = setup.factory(s);
  const Trace<Num> trace = run(*alg, *source);
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write trace file '" + path + "'");
  write_trace(out, trace);
}

template <Numeric Num>
nlohmann::json simulate_report(const RunSpec& spec, const RunResult<Num>& r) {
  const auto& e = r.expectation;
  nlohmann::json out = {{"algorithm", spec.alg},
                        {"objective", spec.objective},
                        {"numeric", NumTraits<Num>::name},
                        {"alg_cost", time_to_json(e.mean)},
                        {"opt_cost", time_to_json(e.opt_mean)},
                        {"ratio", r.ratio},
                        {"trials", e.trials},
                        {"stderr", e.std_error},
                        {"exact", e.exact}};
  if (spec.seed) out["seed"] = *spec.seed;
  return out;
}

struct SweepSpec {
  RunSpec run;
  std::vector<std::string> grids;
  std::string curve;
  bool skip_invalid = false;
};

template <Numeric Num>
int sweep_runs(const SweepSpec& spec, std::ostream& out) {
  if (spec.grids.empty()) throw UsageError("sweep needs at least one --grid");
  std::vector<GridAxis> axes;
  for (const auto& g : spec.grids) axes.push_back(parse_grid(g));
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.values.size();

  std::vector<std::optional<RunResult<Num>>> rows(total);
  const auto point = [&](std::size_t index) {
    std::map<std::string, std::string> values;
    for (std::size_t k = axes.size(); k-- > 0;) {
      values[axes[k].name] = axes[k].values[index % axes[k].values.size()];
      index /= axes[k].values.size();
    }
    return values;
  };
  parallel_for(total, env_workers(), [&](std::size_t i) {
    try {
      rows[i] = run_spec<Num>(spec.run, 1, point(i));
    } catch (const std::invalid_argument&) {
      if (!spec.skip_invalid) throw;
    }
  });

  for (const auto& a : axes) out << a.name << ',';
  out << "alg_cost,opt_cost,ratio,stderr\n";
  for (std::size_t i = 0; i < total; ++i) {
    if (!rows[i]) continue;
    const auto values = point(i);
    for (const auto& a : axes) out << values.at(a.name) << ',';
    const auto& e = rows[i]->expectation;
    out << std::setprecision(17) << to_double(e.mean) << ',' << to_double(e.opt_mean) << ',' << rows[i]->ratio
        << ',' << e.std_error << '\n';
  }
  return kOk;
}

inline double curve_value(const std::string& curve, double p) {
  if (curve == "combined") return combined_curve(p, solve_thresholds());
  if (curve == "beat") return beat_ratio(p);
  if (curve == "threshold_uniform") return thresh_uniform_ratio(p);
  if (curve == "ute") return ute_ratio(p, ute_rho_star());
  throw UsageError("unknown curve '" + curve + "' (combined, beat, threshold_uniform, ute)");
}

inline int sweep_curve(const SweepSpec& spec, std::ostream& out) {
  if (spec.grids.size() != 1) throw UsageError("--curve takes exactly one --grid over p_bar");
  const GridAxis axis = parse_grid(spec.grids.front());
  out << axis.name << ",ratio\n";
  for (const auto& v : axis.values) {
    double ratio = 0.0;
    try {
      ratio = curve_value(spec.curve, std::stod(v));
    } catch (const std::domain_error&) {
      if (spec.skip_invalid) continue;
      throw UsageError("p_bar=" + v + " is outside the domain of curve '" + spec.curve + "'");
    }
    out << v << ',' << std::setprecision(17) << ratio << '\n';
  }
  return kOk;
}

struct LowerBoundSpec {
  std::string kind;
  std::size_t n = 1000;
  double delta = 0.6306655;
  double p_bar = 1.9896202;
  double q = 1.0 - 1.0 / std::sqrt(3.0);
  std::size_t trials = 100;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> algs;
};

/// Runs each algorithm against the adaptive deterministic adversary.
inline nlohmann::json lower_bound_det(const LowerBoundSpec& spec) {
  DetLbProfile profile{spec.n, spec.delta, spec.p_bar};
  profile.validate();
  const DetLbValue analytic = det_lb_value(spec.delta, spec.p_bar);
  std::vector<std::string> algs = spec.algs;
  if (algs.empty()) algs = {"threshold", "delay_all", "combined", "ute", "best_family"};

  nlohmann::json results = nlohmann::json::array();
  double min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& name : algs) {
    std::string key = name;
    if (name == "best_family") {
      std::ostringstream os;
      os << std::setprecision(17) << "family[nu=" << analytic.nu << ",lambda=" << analytic.lambda << "]";
      key = os.str();
    }
    AlgorithmChoice choice;
    const auto algorithm = make_algorithm<double>(parse_key(key), &choice);
    if (choice.randomized) throw UsageError("det lower bound takes deterministic algorithms only");
    auto alg = algorithm.sample(0);
    DetLbAdversary<double> adversary(profile);
    const Trace<double> trace = run(*alg, adversary);
    const double opt = optimal_sum(adversary.realized()).cost;
    const double ratio = make_ratio_report(trace.total_completion, opt).ratio;
    min_ratio = std::min(min_ratio, ratio);
    results.push_back({{"algorithm", name}, {"alg_cost", trace.total_completion}, {"opt_cost", opt}, {"ratio", ratio}});
  }
  return {{"kind", "det"},       {"n", spec.n},           {"delta", spec.delta},
          {"p_bar", spec.p_bar}, {"analytic", analytic.ratio}, {"best_nu", analytic.nu},
          {"best_lambda", analytic.lambda}, {"results", results}, {"min_ratio", min_ratio}};
}

/// Monte Carlo E[ALG]/E[OPT] on the randomized lower-bound distribution.
inline nlohmann::json lower_bound_rand(const LowerBoundSpec& spec, std::size_t workers) {
  if (!spec.seed) throw UsageError("--seed is required for randomized runs");
  RandLbProfile profile{spec.n, spec.q};
  profile.validate();
  std::vector<std::string> algs = spec.algs;
  if (algs.empty()) algs = {"threshold", "random"};
  const std::uint64_t seed = *spec.seed;
  const SourceFactory<double> factory = [profile, seed](std::uint64_t s) {
    return std::make_unique<StaticSource<double>>(gen_rand_lb<double>(profile, mix_seed(seed ^ s)));
  };
  nlohmann::json results = nlohmann::json::array();
  double min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& name : algs) {
    const auto algorithm = make_algorithm<double>(parse_key(name));
    ExpectationOptions options;
    options.trials = spec.trials;
    options.seed = seed;
    options.mode = ExpectationMode::MonteCarlo;
    options.workers = workers;
    const auto e = run_expected<double>(
        algorithm, factory, [](const Instance<double>& i) { return optimal_sum(i).cost; }, options);
    const double ratio = e.mean / e.opt_mean;
    min_ratio = std::min(min_ratio, ratio);
    results.push_back({{"algorithm", name},
                       {"mean_alg", e.mean},
                       {"mean_opt", e.opt_mean},
                       {"ratio", ratio},
                       {"ci95", 1.96 * e.std_error / e.opt_mean},
                       {"trials", e.trials}});
  }
  return {{"kind", "rand"},
          {"n", spec.n},
          {"q", spec.q},
          {"seed", seed},
          {"analytic", rand_lb_value(spec.q)},
          {"alg_bound", rand_lb_alg_bound(spec.n, spec.q)},
          {"expected_opt", rand_lb_expected_opt(spec.n, spec.q)},
          {"results", results},
          {"min_ratio", min_ratio}};
}

template <Numeric Num>
int gen_instance(const SourceSpec& source, std::optional<std::uint64_t> seed, const std::string& path,
                 std::ostream& out) {
  const auto setup = resolve_source<Num>(source, seed.value_or(0));
  if (setup.adaptive) throw UsageError("adaptive generators have no fixed instance to emit");
  if (setup.seeded && !seed) throw UsageError("--seed is required for randomized generators");
  const Instance<Num> instance = setup.factory(0)->realized();
  if (path.empty()) {
    write_instance(out, instance);
  } else {
    std::ofstream file(path);
    if (!file) throw UsageError("cannot write '" + path + "'");
    write_instance(file, instance);
  }
  return kOk;
}

template <Numeric Num>
int replay(const std::string& trace_path, const std::string& instance_path, std::ostream& out) {
  std::ifstream in(trace_path);
  if (!in) throw UsageError("cannot open trace file '" + trace_path + "'");
  const auto actions = read_trace<Num>(in);
  std::size_t n = trace_job_count(actions);
  if (!instance_path.empty()) {
    std::ifstream inst(instance_path);
    if (!inst) throw UsageError("cannot open instance file '" + instance_path + "'");
    const Instance<Num> instance = read_instance<Num>(inst);
    n = instance.size();
    check_durations<Num>(actions, instance);
  }
  const auto cost = cost_of_trace<Num>(std::span<const TimedAction<Num>>(actions), n);
  const nlohmann::json report = {{"actions", actions.size()},
                                 {"jobs", n},
                                 {"total_completion", time_to_json(cost.total_completion)},
                                 {"makespan", time_to_json(cost.makespan)}};
  out << report.dump(2) << '\n';
  return kOk;
}

/// Entry point shared by the executable and the tests.
inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scheduling with testing: simulate online algorithms, sweep, and verify constants", "swt"};
  app.require_subcommand(1);

  RunSpec sim;
  std::string trace_path;
  auto* simulate = app.add_subcommand("simulate", "Run one algorithm on one instance family and report the ratio");
  simulate->add_option("--alg", sim.alg, "Algorithm key, e.g. random[T=1.75,E=2.86]")->required();
  simulate->add_option("--gen", sim.source.gen, "Generator name followed by key=value parameters")->expected(1, -1);
  simulate->add_option("--instance", sim.source.instance_path, "Instance JSON file");
  simulate->add_option("--objective", sim.objective, "sum or makespan")->check(CLI::IsMember({"sum", "makespan"}));
  simulate->add_option("--trials", sim.trials, "Monte Carlo trials");
  simulate->add_option("--seed", sim.seed, "Master seed (required for randomized runs)");
  simulate->add_flag("--exact", sim.exact, "Rational arithmetic and exact expectation");
  simulate->add_option("--trace", trace_path, "Write the trace of one run as JSON lines");

  SweepSpec sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate a grid of generator parameters; CSV on stdout");
  sweep_cmd->add_option("--alg", sweep.run.alg, "Algorithm key");
  sweep_cmd->add_option("--gen", sweep.run.source.gen, "Generator name followed by fixed key=value parameters")
      ->expected(1, -1);
  sweep_cmd->add_option("--grid", sweep.grids, "name=start:stop:step, repeatable (cartesian product)");
  sweep_cmd->add_option("--curve", sweep.curve, "Emit an analytic ratio curve instead of simulating");
  sweep_cmd->add_option("--objective", sweep.run.objective, "sum or makespan")
      ->check(CLI::IsMember({"sum", "makespan"}));
  sweep_cmd->add_option("--trials", sweep.run.trials, "Monte Carlo trials per point");
  sweep_cmd->add_option("--seed", sweep.run.seed, "Master seed");
  sweep_cmd->add_flag("--exact", sweep.run.exact, "Rational arithmetic and exact expectation");
  sweep_cmd->add_flag("--skip-invalid", sweep.skip_invalid, "Drop grid points the generator rejects");

  std::vector<std::string> overrides;
  auto* verify = app.add_subcommand("verify-constants", "Recompute every reference constant and compare");
  verify->add_option("--override", overrides, "name=value replaces a reference value (negative control)");

  LowerBoundSpec lb;
  auto* lower = app.add_subcommand("lower-bound", "Run the deterministic or randomized lower-bound construction");
  lower->add_option("kind", lb.kind, "det or rand")->required()->check(CLI::IsMember({"det", "rand"}));
  lower->add_option("--n", lb.n, "Number of jobs");
  lower->add_option("--delta", lb.delta, "Adversary fraction (det)");
  lower->add_option("--p-bar", lb.p_bar, "Upper limit (det)");
  lower->add_option("--q", lb.q, "Zero probability (rand)");
  lower->add_option("--trials", lb.trials, "Monte Carlo trials (rand)");
  lower->add_option("--seed", lb.seed, "Master seed (rand)");
  lower->add_option("--alg", lb.algs, "Algorithm keys; best_family names the optimal (nu, lambda) schedule");

  SourceSpec gen_source;
  std::optional<std::uint64_t> gen_seed;
  std::string gen_out;
  bool gen_exact = false;
  auto* gen = app.add_subcommand("gen", "Emit an instance file");
  gen->add_option("--gen", gen_source.gen, "Generator name followed by key=value parameters")
      ->expected(1, -1)
      ->required();
  gen->add_option("--seed", gen_seed, "Seed for randomized generators");
  gen->add_option("--out", gen_out, "Output path (default stdout)");
  gen->add_flag("--exact", gen_exact, "Write exact rationals");

  std::string replay_trace;
  std::string replay_instance;
  bool replay_exact = false;
  auto* replay_cmd = app.add_subcommand("replay", "Recompute costs of a trace file and check it");
  replay_cmd->add_option("--trace", replay_trace, "Trace JSON lines")->required();
  replay_cmd->add_option("--instance", replay_instance, "Instance to check durations against");
  replay_cmd->add_flag("--exact", replay_exact, "Rational arithmetic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*simulate) {
      const std::size_t workers = env_workers();
      nlohmann::json report;
      if (sim.exact) {
        report = simulate_report(sim, run_spec<Rational>(sim, workers));
        if (!trace_path.empty()) write_trace_file<Rational>(sim, trace_path);
      } else {
        report = simulate_report(sim, run_spec<double>(sim, workers));
        if (!trace_path.empty()) write_trace_file<double>(sim, trace_path);
      }
      out << report.dump(2) << '\n';
      return kOk;
    }
    if (*sweep_cmd) {
      if (!sweep.curve.empty()) return sweep_curve(sweep, out);
      if (sweep.run.alg.empty()) throw UsageError("sweep needs --alg or --curve");
      return sweep.run.exact ? sweep_runs<Rational>(sweep, out) : sweep_runs<double>(sweep, out);
    }
    if (*verify) {
      std::map<std::string, std::string> raw;
      for (const auto& o : overrides) parse_assignment(o, raw);
      std::map<std::string, double> values;
      for (const auto& [k, v] : raw) {
        try {
          values[k] = std::stod(v);
        } catch (const std::exception&) {
          throw UsageError("bad override value '" + v + "'");
        }
      }
      const auto checks = verify_constants(values);
      out << checks_to_json(checks).dump(2) << '\n';
      bool ok = true;
      for (const auto& c : checks) {
        if (!c.pass) {
          ok = false;
          err << "mismatch: " << c.name << " computed " << std::setprecision(10) << c.computed_value
              << " vs reference " << c.reference_value << '\n';
        }
      }
      return ok ? kOk : kFailure;
    }
    if (*lower) {
      const nlohmann::json report = lb.kind == "det" ? lower_bound_det(lb) : lower_bound_rand(lb, env_workers());
      out << report.dump(2) << '\n';
      return kOk;
    }
    if (*gen) {
      return gen_exact ? gen_instance<Rational>(gen_source, gen_seed, gen_out, out)
                       : gen_instance<double>(gen_source, gen_seed, gen_out, out);
    }
    if (*replay_cmd) {
      return replay_exact ? replay<Rational>(replay_trace, replay_instance, out)
                          : replay<double>(replay_trace, replay_instance, out);
    }
  } catch (const ProtocolError& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const AdversaryError& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const TraceError& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const NumericFailure& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace swt::cli
