#pragma once

#include <cstddef>
#include <cstdint>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "swt/algorithms.hpp"
#include "swt/generators.hpp"

namespace swt {

/// A name with key=value parameters, e.g. `random[T=1.8,E=3]`.
struct Key {
  std::string name;
  std::map<std::string, std::string> params;
};

/// Reads `key=value` into `out`; throws on a missing '=' or an empty key.
inline void parse_assignment(std::string_view text, std::map<std::string, std::string>& out) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw std::invalid_argument("expected key=value, got '" + std::string(text) + "'");
  }
  out[std::string(text.substr(0, eq))] = std::string(text.substr(eq + 1));
}

inline Key parse_key(std::string_view text) {
  Key key;
  const auto open = text.find('[');
  if (open == std::string_view::npos) {
    key.name = std::string(text);
  } else {
    if (text.back() != ']') throw std::invalid_argument("unterminated parameter list in '" + std::string(text) + "'");
    key.name = std::string(text.substr(0, open));
    std::string_view body = text.substr(open + 1, text.size() - open - 2);
    while (!body.empty()) {
      const auto comma = body.find(',');
      parse_assignment(body.substr(0, comma), key.params);
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
  }
  if (key.name.empty()) throw std::invalid_argument("empty name");
  return key;
}

/// Typed access to a parameter map that rejects unknown and malformed entries.
class Params {
 public:
  Params(std::string owner, std::map<std::string, std::string> values)
      : owner_(std::move(owner)), values_(std::move(values)) {}

  double real(const std::string& name, double fallback) {
    used_.insert(name);
    const auto it = values_.find(name);
    if (it == values_.end()) return fallback;
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing text");
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument(owner_ + ": bad number for " + name + ": '" + it->second + "'");
    }
  }

  std::optional<double> optional_real(const std::string& name) {
    if (values_.count(name) == 0) {
      used_.insert(name);
      return std::nullopt;
    }
    return real(name, 0.0);
  }

  std::size_t count(const std::string& name, std::size_t fallback) {
    const double v = real(name, static_cast<double>(fallback));
    if (v < 0.0 || v != std::floor(v)) throw std::invalid_argument(owner_ + ": " + name + " must be a count");
    return static_cast<std::size_t>(v);
  }

  /// Call after reading: any parameter that was never asked for is an error.
  void finish() const {
    for (const auto& [k, v] : values_) {
      if (used_.count(k) == 0) throw std::invalid_argument(owner_ + ": unknown parameter '" + k + "'");
    }
  }

 private:
  std::string owner_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

inline const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names = {"threshold", "delay_all", "random",       "beat",
                                                 "combined",  "ute",       "makespan_det", "makespan_rand",
                                                 "family",    "untested"};
  return names;
}

struct AlgorithmChoice {
  std::string name;
  bool randomized = false;
};

/// Builds the randomized-algorithm spec for a key; deterministic algorithms get a
/// single-outcome spec.
template <Numeric Num>
RandomizedSpec<Num> make_algorithm(const Key& key, AlgorithmChoice* choice = nullptr) {
  Params p(key.name, key.params);
  RandomizedSpec<Num> spec;
  bool randomized = false;
  const auto det = [](auto make) {
    return deterministic_spec<Num>([make]() -> std::unique_ptr<Algorithm<Num>> { return make(); });
  };
  if (key.name == "threshold") {
    spec = det([] { return std::make_unique<ThresholdAlgorithm<Num>>(false); });
  } else if (key.name == "delay_all") {
    spec = det([] { return std::make_unique<ThresholdAlgorithm<Num>>(true); });
  } else if (key.name == "random") {
    RandomParams rp;
    rp.T = p.real("T", rp.T);
    rp.E = p.real("E", rp.E);
    spec = random_spec<Num>(rp);
    randomized = true;
  } else if (key.name == "beat") {
    spec = det([] { return std::make_unique<BeatAlgorithm<Num>>(); });
  } else if (key.name == "combined") {
    CombinedThresholds th;
    th.T1 = p.real("T1", th.T1);
    th.T2 = p.real("T2", th.T2);
    spec = det([th] { return std::make_unique<CombinedAlgorithm<Num>>(th); });
  } else if (key.name == "ute") {
    UteParams up;
    up.rho = p.real("rho", up.rho);
    spec = det([up] { return std::make_unique<UteAlgorithm<Num>>(up); });
  } else if (key.name == "makespan_det") {
    spec = det([] { return std::make_unique<MakespanDetAlgorithm<Num>>(); });
  } else if (key.name == "makespan_rand") {
    spec = makespan_rand_spec<Num>();
    randomized = true;
  } else if (key.name == "family") {
    const double nu = p.real("nu", 0.0);
    const double lambda = p.real("lambda", 0.0);
    spec = det([nu, lambda] { return std::make_unique<ScheduleFamilyAlgorithm<Num>>(nu, lambda); });
  } else if (key.name == "untested") {
    spec = det([] { return std::make_unique<AllUntestedAlgorithm<Num>>(); });
  } else {
    throw std::invalid_argument("unknown algorithm '" + key.name + "'");
  }
  p.finish();
  // Validate parameters eagerly so configuration errors surface before any run.
  (void)spec.sample(0);
  if (choice) *choice = {key.name, randomized};
  return spec;
}

inline const std::vector<std::string>& generator_names() {
  static const std::vector<std::string> names = {"threshold_worstcase", "four_type",     "det_lb",
                                                 "rand_lb",             "extreme_uniform", "uniform_mixed",
                                                 "threshold_uniform",   "random_mixed"};
  return names;
}

/// A generator resolved to a source factory. Static generators ignore the trial
/// seed; seeded ones draw a fresh instance per trial; `det_lb` is adaptive.
template <Numeric Num>
struct GeneratorSetup {
  SourceFactory<Num> factory;
  bool adaptive = false;
  bool seeded = false;
};

template <Numeric Num>
GeneratorSetup<Num> make_generator(const std::string& name, const std::map<std::string, std::string>& params,
                                   std::uint64_t master_seed) {
  Params p(name, params);
  GeneratorSetup<Num> out;
  const auto fixed = [&](Instance<Num> instance) { out.factory = static_source_factory(std::move(instance)); };
  if (name == "threshold_worstcase") {
    const std::size_t a = p.count("a", 0);
    const std::size_t b = p.count("b", 0);
    const std::size_t c = p.count("c", 0);
    const double eps = p.real("eps", 1e-6);
    p.finish();
    fixed(gen_threshold_worstcase<Num>(a, b, c, eps));
  } else if (name == "four_type") {
    FourTypeProfile f;
    f.n = p.count("n", 4);
    f.alpha = p.real("alpha", f.alpha);
    f.beta = p.real("beta", f.beta);
    f.gamma = p.real("gamma", f.gamma);
    f.T = p.real("T", f.T);
    f.E = p.real("E", f.E);
    f.epsilon = p.real("eps", f.epsilon);
    p.finish();
    fixed(gen_four_type<Num>(f));
  } else if (name == "det_lb") {
    DetLbProfile d;
    d.n = p.count("n", 1000);
    d.delta = p.real("delta", d.delta);
    d.p_bar = p.real("p_bar", d.p_bar);
    p.finish();
    d.validate();
    out.factory = [d](std::uint64_t) { return std::make_unique<DetLbAdversary<Num>>(d); };
    out.adaptive = true;
  } else if (name == "rand_lb") {
    RandLbProfile r;
    r.n = p.count("n", 100);
    r.q = p.real("q", r.q);
    p.finish();
    r.validate();
    out.factory = [r, master_seed](std::uint64_t s) {
      return std::make_unique<StaticSource<Num>>(gen_rand_lb<Num>(r, mix_seed(master_seed ^ s)));
    };
    out.seeded = true;
  } else if (name == "extreme_uniform") {
    ExtremeUniformProfile e;
    e.n = p.count("n", 100);
    e.p_bar = p.real("p_bar", e.p_bar);
    e.gamma = p.real("gamma", e.gamma);
    p.finish();
    fixed(gen_extreme_uniform<Num>(e));
  } else if (name == "uniform_mixed") {
    UniformMixedProfile u;
    u.n = p.count("n", 100);
    u.p_bar = p.real("p_bar", u.p_bar);
    u.long_fraction = p.real("long", u.long_fraction);
    u.short_fraction = p.real("short", u.short_fraction);
    u.middle = p.optional_real("middle");
    p.finish();
    fixed(gen_uniform_mixed<Num>(u));
  } else if (name == "threshold_uniform") {
    ThresholdUniformProfile t;
    t.n = p.count("n", 100);
    t.p_bar = p.real("p_bar", t.p_bar);
    t.alpha = p.real("alpha", t.alpha);
    t.beta = p.real("beta", t.beta);
    p.finish();
    fixed(gen_threshold_uniform<Num>(t));
  } else if (name == "random_mixed") {
    RandomMixedProfile r;
    r.n = p.count("n", 10);
    r.max_upper = p.real("max_upper", r.max_upper);
    r.grid = p.count("grid", r.grid);
    p.finish();
    out.factory = [r, master_seed](std::uint64_t s) {
      return std::make_unique<StaticSource<Num>>(gen_random_mixed<Num>(r, mix_seed(master_seed ^ s)));
    };
    out.seeded = true;
  } else {
    throw std::invalid_argument("unknown generator '" + name + "'");
  }
  return out;
}

}  // namespace swt
