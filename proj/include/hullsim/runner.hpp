#pragma once

// Experiment orchestration and report emission: checkpointed convergence
// runs for the constructed sequence and the i.i.d. Gaussian baseline,
// tail-bound tables, partition diagnostics, JSON config parsing with strict
// validation, and atomic CSV writers. Seeds run in parallel; all results are
// independent of the thread count.

#include "hullsim/analysis.hpp"
#include "hullsim/construction.hpp"
#include "hullsim/geometry.hpp"
#include "hullsim/hull_engine.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace hullsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunMode { Counterexample, Goodman, Tailbound, PartitionCheck, Hull2dDemo };

inline std::string run_mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::Counterexample: return "counterexample";
    case RunMode::Goodman: return "goodman";
    case RunMode::Tailbound: return "tailbound";
    case RunMode::PartitionCheck: return "partition-check";
    case RunMode::Hull2dDemo: return "hull2d-demo";
  }
  return "counterexample";
}

inline RunMode run_mode_from_name(const std::string& name) {
  if (name == "counterexample") return RunMode::Counterexample;
  if (name == "goodman") return RunMode::Goodman;
  if (name == "tailbound") return RunMode::Tailbound;
  if (name == "partition-check") return RunMode::PartitionCheck;
  if (name == "hull2d-demo") return RunMode::Hull2dDemo;
  throw ConfigError("mode: unknown mode '" + name +
                    "' (expected counterexample, goodman, tailbound, partition-check or "
                    "hull2d-demo)");
}

// Declarative body description as it appears in config files.
struct BodyConfig {
  std::string kind = "ball";  // ball | ellipsoid | polytope
  double radius = 1.0;
  Eigen::MatrixXd sigma;
  std::vector<std::vector<double>> generators;

  SymmetricConvexBody build(int dimension) const {
    if (kind == "ball") return SymmetricConvexBody::ball(dimension, radius);
    if (kind == "ellipsoid") {
      if (sigma.rows() != dimension || sigma.cols() != dimension)
        throw ConfigError("target.ellipsoid.sigma: must be dimension x dimension");
      return SymmetricConvexBody::ellipsoid(sigma);
    }
    if (kind == "polytope") {
      std::vector<Vector> gens;
      gens.reserve(generators.size());
      for (size_t i = 0; i < generators.size(); ++i) {
        if (static_cast<int>(generators[i].size()) != dimension)
          throw ConfigError("target.generators[" + std::to_string(i) +
                            "]: wrong number of coordinates");
        Vector g(dimension);
        for (int c = 0; c < dimension; ++c) g(c) = generators[i][static_cast<size_t>(c)];
        gens.push_back(std::move(g));
      }
      return SymmetricConvexBody::polytope(dimension, std::move(gens));
    }
    throw ConfigError("target.kind: must be one of ball, ellipsoid, polytope");
  }
};

struct ExperimentConfig {
  RunMode mode = RunMode::Counterexample;
  int dimension = 2;
  BodyConfig target;

  // Construction block.
  int m = 8;
  std::string directions_mode = "uniform-angles-2d";  // or seeded-quasi-uniform / explicit
  std::vector<std::vector<double>> explicit_directions;
  std::vector<double> densities;  // empty = uniform p_k = 1/m
  uint64_t construction_seed = 1;

  std::vector<uint64_t> seeds = {1};
  int probe_count = 256;
  std::vector<long long> checkpoints = {100, 1000, 10000, 100000, 1000000};
  double epsilon = 0.2;

  Eigen::MatrixXd sigma;  // Goodman covariance; empty = identity

  std::vector<long long> tail_n = {10, 100, 1000, 10000, 100000, 1000000};
  std::vector<double> tail_epsilon = {0.05, 0.1, 0.2};
  std::vector<double> tail_gamma = {0.3, 0.4, 0.45};

  std::string out_dir = ".";
  int threads = 0;  // 0 = hardware concurrency
  bool dump_hulls = false;

  // Cooperative cancellation; not part of the serialized config.
  std::atomic<bool>* interrupt_flag = nullptr;
};

struct ReportRow {
  uint64_t seed = 0;
  long long n = 0;
  double sup_error_vs_v = std::numeric_limits<double>::quiet_NaN();
  double sup_error_vs_vm = std::numeric_limits<double>::quiet_NaN();
  double exact_hausdorff_2d = std::numeric_limits<double>::quiet_NaN();
  double max_discrepancy = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> class_norm_max;   // empty when not applicable
  long long violation_count = -1;       // -1 when not applicable
};

struct SummaryRow {
  long long n = 0;
  std::string metric;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
};

struct ConvergenceReport {
  std::vector<ReportRow> rows;
  std::vector<SummaryRow> aggregates;
  bool interrupted = false;
};

struct TailTableRow {
  long long n = 0;
  double epsilon = 0.0;
  double gamma = 0.0;
  double bound = 0.0;
  double exact_tail = 0.0;
  double bound_partial_sum = 0.0;
  double exact_partial_sum = 0.0;
};

struct PartitionCheckRow {
  long long n = 0;
  int cls = 0;  // 1-based in reports
  long long count = 0;
  double expected = 0.0;
  double discrepancy = 0.0;
};

namespace detail {

// ---- config JSON helpers -------------------------------------------------

using json = nlohmann::json;

inline double json_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": must be a number");
  return j.get<double>();
}

inline long long json_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": must be an integer");
  return j.get<long long>();
}

inline std::string json_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path + ": must be a string");
  return j.get<std::string>();
}

inline bool json_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path + ": must be a boolean");
  return j.get<bool>();
}

inline const json& json_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": must be an array");
  return j;
}

inline Eigen::MatrixXd json_matrix(const json& j, const std::string& path) {
  json_array(j, path);
  const size_t rows = j.size();
  if (rows == 0) throw ConfigError(path + ": must be a non-empty row-major matrix");
  size_t cols = 0;
  Eigen::MatrixXd m;
  for (size_t r = 0; r < rows; ++r) {
    const std::string rpath = path + "[" + std::to_string(r) + "]";
    json_array(j[r], rpath);
    if (r == 0) {
      cols = j[r].size();
      if (cols == 0) throw ConfigError(rpath + ": empty row");
      m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    } else if (j[r].size() != cols) {
      throw ConfigError(rpath + ": ragged matrix rows");
    }
    for (size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          json_number(j[r][c], rpath + "[" + std::to_string(c) + "]");
  }
  return m;
}

inline void reject_unknown_keys(const json& obj, const std::vector<std::string>& known,
                                const std::string& prefix, bool lenient) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
      if (lenient)
        std::fprintf(stderr, "warning: ignoring unknown config key '%s'\n", path.c_str());
      else
        throw ConfigError(path + ": unknown key");
    }
  }
}

// ---- CSV formatting --------------------------------------------------------

// Shortest round-trip-exact decimal form; identical doubles yield identical
// bytes, which is what makes reports byte-reproducible.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline std::string csv_double(double v) {
  if (std::isnan(v)) return "";
  return format_double(v);
}

inline std::string joined_doubles(const std::vector<double>& vs) {
  std::string out;
  for (size_t i = 0; i < vs.size(); ++i) {
    if (i) out.push_back(';');
    out += format_double(vs[i]);
  }
  return out;
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path parent = path.parent_path();
  std::error_code ec;
  if (!parent.empty()) fs::create_directories(parent, ec);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("rename failed for " + path.string() + ": " + ec.message());
}

// ---- parallel seed map -----------------------------------------------------

inline int resolve_threads(int requested, size_t tasks) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  int t = requested > 0 ? requested : static_cast<int>(hw);
  t = std::min<int>(t, static_cast<int>(tasks));
  return std::max(t, 1);
}

template <typename Fn>
void parallel_for_index(size_t count, int threads, Fn&& fn) {
  if (count == 0) return;
  if (threads <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    workers.emplace_back([&]() {
      for (size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

// ---- config parsing ----------------------------------------------------------

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["mode"] = run_mode_name(cfg.mode);
  j["dimension"] = cfg.dimension;
  nlohmann::json target;
  target["kind"] = cfg.target.kind;
  if (cfg.target.kind == "ball") target["r"] = cfg.target.radius;
  if (cfg.target.kind == "ellipsoid") {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < cfg.target.sigma.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < cfg.target.sigma.cols(); ++c) row.push_back(cfg.target.sigma(r, c));
      rows.push_back(row);
    }
    target["sigma"] = rows;
  }
  if (cfg.target.kind == "polytope") target["generators"] = cfg.target.generators;
  j["target"] = target;

  nlohmann::json construction;
  construction["m"] = cfg.m;
  if (cfg.directions_mode == "explicit")
    construction["directions"] = cfg.explicit_directions;
  else
    construction["directions"] = cfg.directions_mode;
  if (cfg.densities.empty())
    construction["densities"] = "uniform";
  else
    construction["densities"] = cfg.densities;
  construction["seed"] = cfg.construction_seed;
  j["construction"] = construction;

  if (cfg.sigma.size() > 0) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < cfg.sigma.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < cfg.sigma.cols(); ++c) row.push_back(cfg.sigma(r, c));
      rows.push_back(row);
    }
    j["sigma"] = rows;
  }

  j["probe_count"] = cfg.probe_count;
  j["checkpoints"] = cfg.checkpoints;
  j["seeds"] = cfg.seeds;
  j["epsilon"] = cfg.epsilon;
  j["tail_grid"] = {{"n", cfg.tail_n}, {"epsilon", cfg.tail_epsilon}, {"gamma", cfg.tail_gamma}};
  j["out_dir"] = cfg.out_dir;
  j["threads"] = cfg.threads;
  j["dump_hulls"] = cfg.dump_hulls;
  return j;
}

inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.dimension < 1) throw ConfigError("dimension: must be >= 1");
  if (cfg.m < 1) throw ConfigError("construction.m: must be >= 1");
  if (cfg.seeds.empty()) throw ConfigError("seeds: must be non-empty");
  if (cfg.probe_count < 2 * cfg.dimension)
    throw ConfigError("probe_count: must be >= 2 * dimension");
  for (size_t i = 0; i < cfg.checkpoints.size(); ++i) {
    const std::string path = "checkpoints[" + std::to_string(i) + "]";
    if (cfg.checkpoints[i] < 2) throw ConfigError(path + ": must be >= 2");
    if (i > 0 && cfg.checkpoints[i] <= cfg.checkpoints[i - 1])
      throw ConfigError(path + ": checkpoints must be strictly increasing");
  }
  if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon: must be > 0");
  if (!cfg.densities.empty()) {
    if (static_cast<int>(cfg.densities.size()) != cfg.m)
      throw ConfigError("construction.densities: must list exactly m values");
    double sum = 0.0;
    for (size_t k = 0; k < cfg.densities.size(); ++k) {
      if (!(cfg.densities[k] > 0.0))
        throw ConfigError("construction.densities[" + std::to_string(k) + "]: must be > 0");
      sum += cfg.densities[k];
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw ConfigError("construction.densities: must sum to 1 (got " +
                        detail::format_double(sum) + ")");
  }
  if (cfg.directions_mode == "explicit") {
    if (static_cast<int>(cfg.explicit_directions.size()) != cfg.m)
      throw ConfigError("construction.directions: explicit list must have m entries");
    for (size_t k = 0; k < cfg.explicit_directions.size(); ++k) {
      if (static_cast<int>(cfg.explicit_directions[k].size()) != cfg.dimension)
        throw ConfigError("construction.directions[" + std::to_string(k) +
                          "]: wrong number of coordinates");
      double norm2 = 0.0;
      for (double c : cfg.explicit_directions[k]) norm2 += c * c;
      if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12)
        throw ConfigError("construction.directions[" + std::to_string(k) +
                          "]: must be a unit vector");
    }
  } else if (cfg.directions_mode != "uniform-angles-2d" &&
             cfg.directions_mode != "seeded-quasi-uniform") {
    throw ConfigError("construction.directions: unknown mode '" + cfg.directions_mode + "'");
  }
  if (cfg.directions_mode == "uniform-angles-2d" && cfg.dimension != 2 &&
      (cfg.mode == RunMode::Counterexample || cfg.mode == RunMode::Hull2dDemo))
    throw ConfigError("construction.directions: uniform-angles-2d requires dimension = 2");
  if (cfg.sigma.size() > 0) {
    if (cfg.sigma.rows() != cfg.dimension || cfg.sigma.cols() != cfg.dimension)
      throw ConfigError("sigma: must be dimension x dimension");
  }
  for (size_t i = 0; i < cfg.tail_n.size(); ++i) {
    const std::string path = "tail_grid.n[" + std::to_string(i) + "]";
    if (cfg.tail_n[i] < 2) throw ConfigError(path + ": must be >= 2");
    if (i > 0 && cfg.tail_n[i] <= cfg.tail_n[i - 1])
      throw ConfigError(path + ": must be strictly increasing");
  }
  for (size_t i = 0; i < cfg.tail_epsilon.size(); ++i)
    if (!(cfg.tail_epsilon[i] > 0.0))
      throw ConfigError("tail_grid.epsilon[" + std::to_string(i) + "]: must be > 0");
  for (size_t i = 0; i < cfg.tail_gamma.size(); ++i)
    if (!(cfg.tail_gamma[i] > 0.0 && cfg.tail_gamma[i] < 0.5))
      throw ConfigError("tail_grid.gamma[" + std::to_string(i) + "]: must lie in (0, 0.5)");
  if (cfg.mode == RunMode::Tailbound &&
      (cfg.tail_n.empty() || cfg.tail_epsilon.empty() || cfg.tail_gamma.empty()))
    throw ConfigError("tail_grid: n, epsilon and gamma grids must be non-empty");
  if (cfg.threads < 0) throw ConfigError("threads: must be >= 0");
  if (cfg.target.kind == "ball") {
    if (!(cfg.target.radius > 0.0)) throw ConfigError("target.r: must be > 0");
  } else if (cfg.target.kind == "polytope") {
    if (cfg.target.generators.empty())
      throw ConfigError("target.generators: must be a non-empty list of points");
  } else if (cfg.target.kind != "ellipsoid") {
    throw ConfigError("target.kind: must be one of ball, ellipsoid, polytope");
  }
}

inline ExperimentConfig config_from_json(const nlohmann::json& j, bool lenient = false) {
  using detail::json_array;
  using detail::json_bool;
  using detail::json_integer;
  using detail::json_number;
  using detail::json_string;
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  detail::reject_unknown_keys(j,
                              {"mode", "dimension", "target", "construction", "sigma",
                               "probe_count", "checkpoints", "seeds", "epsilon", "tail_grid",
                               "out_dir", "threads", "dump_hulls"},
                              "", lenient);
  ExperimentConfig cfg;
  bool seeds_given = false;
  if (j.contains("mode")) cfg.mode = run_mode_from_name(json_string(j["mode"], "mode"));
  if (j.contains("dimension"))
    cfg.dimension = static_cast<int>(json_integer(j["dimension"], "dimension"));
  if (j.contains("target")) {
    const auto& t = j["target"];
    if (!t.is_object()) throw ConfigError("target: must be an object");
    detail::reject_unknown_keys(t, {"kind", "r", "sigma", "generators"}, "target", lenient);
    if (!t.contains("kind")) throw ConfigError("target.kind: missing");
    cfg.target.kind = json_string(t["kind"], "target.kind");
    if (t.contains("r")) cfg.target.radius = json_number(t["r"], "target.r");
    if (t.contains("sigma")) cfg.target.sigma = detail::json_matrix(t["sigma"], "target.sigma");
    if (t.contains("generators")) {
      const auto& g = json_array(t["generators"], "target.generators");
      cfg.target.generators.clear();
      for (size_t i = 0; i < g.size(); ++i) {
        const std::string path = "target.generators[" + std::to_string(i) + "]";
        json_array(g[i], path);
        std::vector<double> point;
        for (size_t c = 0; c < g[i].size(); ++c)
          point.push_back(json_number(g[i][c], path + "[" + std::to_string(c) + "]"));
        cfg.target.generators.push_back(std::move(point));
      }
    }
    if (cfg.target.kind == "ellipsoid" && !t.contains("sigma"))
      throw ConfigError("target.sigma: missing for ellipsoid target");
    if (cfg.target.kind == "polytope" && !t.contains("generators"))
      throw ConfigError("target.generators: missing for polytope target");
  }
  if (j.contains("construction")) {
    const auto& c = j["construction"];
    if (!c.is_object()) throw ConfigError("construction: must be an object");
    detail::reject_unknown_keys(c, {"m", "directions", "densities", "seed"}, "construction",
                                lenient);
    if (c.contains("m")) cfg.m = static_cast<int>(json_integer(c["m"], "construction.m"));
    if (c.contains("directions")) {
      const auto& d = c["directions"];
      if (d.is_string()) {
        cfg.directions_mode = d.get<std::string>();
      } else if (d.is_array()) {
        cfg.directions_mode = "explicit";
        cfg.explicit_directions.clear();
        for (size_t k = 0; k < d.size(); ++k) {
          const std::string path = "construction.directions[" + std::to_string(k) + "]";
          json_array(d[k], path);
          std::vector<double> dir;
          for (size_t i = 0; i < d[k].size(); ++i)
            dir.push_back(json_number(d[k][i], path + "[" + std::to_string(i) + "]"));
          cfg.explicit_directions.push_back(std::move(dir));
        }
      } else {
        throw ConfigError("construction.directions: must be a mode string or a list of vectors");
      }
    }
    if (c.contains("densities")) {
      const auto& den = c["densities"];
      if (den.is_string()) {
        if (den.get<std::string>() != "uniform")
          throw ConfigError("construction.densities: unknown mode '" + den.get<std::string>() +
                            "'");
        cfg.densities.clear();
      } else if (den.is_array()) {
        cfg.densities.clear();
        for (size_t k = 0; k < den.size(); ++k)
          cfg.densities.push_back(
              json_number(den[k], "construction.densities[" + std::to_string(k) + "]"));
      } else {
        throw ConfigError("construction.densities: must be \"uniform\" or a list");
      }
    }
    if (c.contains("seed")) {
      if (!c["seed"].is_number_unsigned() &&
          !(c["seed"].is_number_integer() && c["seed"].get<long long>() >= 0))
        throw ConfigError("construction.seed: must be a non-negative integer");
      cfg.construction_seed = c["seed"].get<uint64_t>();
    }
  }
  if (j.contains("sigma")) cfg.sigma = detail::json_matrix(j["sigma"], "sigma");
  if (j.contains("probe_count"))
    cfg.probe_count = static_cast<int>(json_integer(j["probe_count"], "probe_count"));
  if (j.contains("checkpoints")) {
    const auto& cps = json_array(j["checkpoints"], "checkpoints");
    cfg.checkpoints.clear();
    for (size_t i = 0; i < cps.size(); ++i)
      cfg.checkpoints.push_back(json_integer(cps[i], "checkpoints[" + std::to_string(i) + "]"));
  }
  if (j.contains("seeds")) {
    const auto& s = json_array(j["seeds"], "seeds");
    cfg.seeds.clear();
    for (size_t i = 0; i < s.size(); ++i) {
      const std::string path = "seeds[" + std::to_string(i) + "]";
      if (!s[i].is_number_unsigned() &&
          !(s[i].is_number_integer() && s[i].get<long long>() >= 0))
        throw ConfigError(path + ": must be a non-negative integer");
      cfg.seeds.push_back(s[i].get<uint64_t>());
    }
    seeds_given = true;
  }
  if (j.contains("epsilon")) cfg.epsilon = json_number(j["epsilon"], "epsilon");
  if (j.contains("tail_grid")) {
    const auto& t = j["tail_grid"];
    if (!t.is_object()) throw ConfigError("tail_grid: must be an object");
    detail::reject_unknown_keys(t, {"n", "epsilon", "gamma"}, "tail_grid", lenient);
    if (t.contains("n")) {
      const auto& g = json_array(t["n"], "tail_grid.n");
      cfg.tail_n.clear();
      for (size_t i = 0; i < g.size(); ++i)
        cfg.tail_n.push_back(json_integer(g[i], "tail_grid.n[" + std::to_string(i) + "]"));
    }
    if (t.contains("epsilon")) {
      const auto& g = json_array(t["epsilon"], "tail_grid.epsilon");
      cfg.tail_epsilon.clear();
      for (size_t i = 0; i < g.size(); ++i)
        cfg.tail_epsilon.push_back(
            json_number(g[i], "tail_grid.epsilon[" + std::to_string(i) + "]"));
    }
    if (t.contains("gamma")) {
      const auto& g = json_array(t["gamma"], "tail_grid.gamma");
      cfg.tail_gamma.clear();
      for (size_t i = 0; i < g.size(); ++i)
        cfg.tail_gamma.push_back(json_number(g[i], "tail_grid.gamma[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("out_dir")) cfg.out_dir = json_string(j["out_dir"], "out_dir");
  if (j.contains("threads")) cfg.threads = static_cast<int>(json_integer(j["threads"], "threads"));
  if (j.contains("dump_hulls")) cfg.dump_hulls = json_bool(j["dump_hulls"], "dump_hulls");
  if (!seeds_given) cfg.seeds = {cfg.construction_seed};
  validate_config(cfg);
  return cfg;
}

inline ExperimentConfig parse_config(const std::string& path, bool lenient = false) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not readable: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return config_from_json(j, lenient);
}

inline ExperimentConfig default_config(RunMode mode) {
  ExperimentConfig cfg;
  cfg.mode = mode;
  validate_config(cfg);
  return cfg;
}

// ---- probes and run preparation -----------------------------------------------

inline ProbeSet make_probes(int dimension, int count, uint64_t probe_seed = 0) {
  if (dimension == 1) return probes_1d();
  if (dimension == 2) return uniform_probes_2d(count);
  std::vector<Vector> dirs;
  dirs.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    Vector v(dimension);
    for (int c = 0; c < dimension; ++c)
      v(c) = standard_normal(probe_seed, static_cast<uint64_t>(i), static_cast<uint32_t>(c),
                             kDomainAux);
    const double norm = v.norm();
    if (norm < 1e-12) {
      v.setZero();
      v(0) = 1.0;
    } else {
      v /= norm;
    }
    dirs.push_back(std::move(v));
  }
  return ProbeSet(std::move(dirs));
}

namespace detail {

inline std::vector<Vector> config_directions(const ExperimentConfig& cfg) {
  if (cfg.directions_mode == "explicit") {
    std::vector<Vector> dirs;
    dirs.reserve(cfg.explicit_directions.size());
    for (const auto& d : cfg.explicit_directions) {
      Vector v(static_cast<Eigen::Index>(d.size()));
      for (size_t c = 0; c < d.size(); ++c) v(static_cast<Eigen::Index>(c)) = d[c];
      dirs.push_back(std::move(v));
    }
    return direction_sequence(cfg.dimension, cfg.m, DirectionMode::ExplicitList, dirs);
  }
  if (cfg.directions_mode == "uniform-angles-2d")
    return direction_sequence(cfg.dimension, cfg.m, DirectionMode::UniformAngles2d);
  return direction_sequence(cfg.dimension, cfg.m, DirectionMode::SeededQuasiUniform, {},
                            cfg.construction_seed);
}

inline std::vector<double> config_densities(const ExperimentConfig& cfg) {
  if (!cfg.densities.empty()) return cfg.densities;
  return std::vector<double>(static_cast<size_t>(cfg.m), 1.0 / static_cast<double>(cfg.m));
}

inline Polygon2D scaled_polygon(const std::vector<Eigen::Vector2d>& vertices, double scale) {
  Polygon2D poly;
  poly.vertices.reserve(vertices.size());
  for (const auto& v : vertices) poly.vertices.emplace_back(v.x() * scale, v.y() * scale);
  return poly;
}

inline bool interrupted(const ExperimentConfig& cfg) {
  return cfg.interrupt_flag && cfg.interrupt_flag->load(std::memory_order_relaxed);
}

}  // namespace detail

inline void write_hull_csv(const Polygon2D& poly, const std::filesystem::path& path) {
  std::string out = "x,y\n";
  for (const auto& v : poly.vertices)
    out += detail::format_double(v.x()) + "," + detail::format_double(v.y()) + "\n";
  detail::write_file_atomic(path, out);
}

// ---- convergence runs ----------------------------------------------------------

namespace detail {

inline void append_aggregates(ConvergenceReport& report, const std::vector<long long>& checkpoints) {
  struct Metric {
    const char* name;
    double ReportRow::*field;
  };
  static constexpr Metric kMetrics[] = {
      {"sup_error_vs_v", &ReportRow::sup_error_vs_v},
      {"sup_error_vs_vm", &ReportRow::sup_error_vs_vm},
      {"exact_hausdorff_2d", &ReportRow::exact_hausdorff_2d},
  };
  for (long long cp : checkpoints) {
    for (const Metric& metric : kMetrics) {
      std::vector<double> values;
      for (const ReportRow& row : report.rows)
        if (row.n == cp && !std::isnan(row.*(metric.field))) values.push_back(row.*(metric.field));
      if (values.empty()) continue;
      std::sort(values.begin(), values.end());
      report.aggregates.push_back(SummaryRow{cp, metric.name, quantile_sorted(values, 0.25),
                                             quantile_sorted(values, 0.5),
                                             quantile_sorted(values, 0.75)});
    }
    std::vector<double> violations;
    for (const ReportRow& row : report.rows)
      if (row.n == cp && row.violation_count >= 0)
        violations.push_back(static_cast<double>(row.violation_count));
    if (!violations.empty()) {
      std::sort(violations.begin(), violations.end());
      report.aggregates.push_back(SummaryRow{cp, "violation_count",
                                             quantile_sorted(violations, 0.25),
                                             quantile_sorted(violations, 0.5),
                                             quantile_sorted(violations, 0.75)});
    }
  }
}

}  // namespace detail

// Streams the constructed sequence for every seed, ingesting into a support
// accumulator and recording checkpointed error metrics against both the
// requested target V and the truncated target V_m (the exact limit of the
// finite-direction construction). In d = 2 an exact hull is maintained and
// compared against the V_m polygon by exact Hausdorff distance.
inline ConvergenceReport run_counterexample(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const SymmetricConvexBody target = cfg.target.build(cfg.dimension);
  const std::vector<Vector> directions = detail::config_directions(cfg);
  const std::vector<double> densities = detail::config_densities(cfg);
  ConstructionSpec spec0 = build_spec(target, directions, densities, cfg.construction_seed);
  const TruncatedTarget vm = truncated_target(spec0);
  const ProbeSet probes = make_probes(cfg.dimension, cfg.probe_count);
  const bool is2d = cfg.dimension == 2;

  ConvergenceReport report;
  if (cfg.checkpoints.empty()) return report;
  const long long n_last = cfg.checkpoints.back();
  const std::vector<int32_t> labels = assign_labels(densities, n_last);

  // Discrepancy trace is seed-independent.
  std::vector<double> disc_at_checkpoint(cfg.checkpoints.size(), 0.0);
  {
    std::vector<long long> counts(densities.size(), 0);
    size_t ci = 0;
    for (long long n = 1; n <= n_last && ci < cfg.checkpoints.size(); ++n) {
      ++counts[static_cast<size_t>(labels[static_cast<size_t>(n - 1)])];
      if (n == cfg.checkpoints[ci]) {
        double d = 0.0;
        for (size_t k = 0; k < counts.size(); ++k)
          d = std::max(d, std::abs(static_cast<double>(counts[k]) -
                                   static_cast<double>(n) * densities[k]));
        disc_at_checkpoint[ci] = d;
        ++ci;
      }
    }
  }

  Polygon2D vm_poly;
  if (is2d) {
    std::vector<Eigen::Vector2d> pts;
    for (const Vector& g : vm.body.generators()) {
      pts.emplace_back(g(0), g(1));
      pts.emplace_back(-g(0), -g(1));
    }
    vm_poly = exact_hull_2d(std::move(pts));
  }

  const size_t m = directions.size();
  std::vector<double> sx(m), sy(m);
  if (is2d)
    for (size_t k = 0; k < m; ++k) {
      sx[k] = directions[k](0);
      sy[k] = directions[k](1);
    }

  std::vector<std::vector<ReportRow>> rows_by_seed(cfg.seeds.size());
  std::atomic<bool> any_interrupted{false};

  detail::parallel_for_index(
      cfg.seeds.size(), detail::resolve_threads(cfg.threads, cfg.seeds.size()), [&](size_t si) {
        const uint64_t seed = cfg.seeds[si];
        ConstructionSpec spec = spec0;
        spec.seed = seed;
        SupportAccumulator acc(probes);
        std::vector<double> class_absmax(m, 0.0);
        long long violations = 0;
        std::vector<Eigen::Vector2d> hull_vertices;
        std::vector<Eigen::Vector2d> buffer;
        if (is2d) buffer.reserve(1 << 16);
        std::vector<ReportRow> rows;
        size_t ci = 0;
        for (long long n = 1; n <= n_last && ci < cfg.checkpoints.size(); ++n) {
          const size_t k = static_cast<size_t>(labels[static_cast<size_t>(n - 1)]);
          const double xi = sample_xi(spec, n);
          const double a = spec.gauge_radii[k];
          const double axi = a * xi;
          if (is2d) {
            const double x = axi * sx[k];
            const double y = axi * sy[k];
            acc.ingest2(x, y);
            buffer.emplace_back(x, y);
            if (buffer.size() >= (1u << 16)) {
              buffer.insert(buffer.end(), hull_vertices.begin(), hull_vertices.end());
              hull_vertices = exact_hull_2d(std::move(buffer)).vertices;
              buffer = {};
              buffer.reserve(1 << 16);
            }
          } else {
            acc.ingest(axi * directions[k]);
          }
          const double abs_xi = std::abs(xi);
          if (abs_xi > class_absmax[k]) class_absmax[k] = abs_xi;
          if (n >= 2 && a > 0.0) {
            const double threshold =
                (1.0 + cfg.epsilon) * normalizer_b(static_cast<double>(n)) + cfg.epsilon / a;
            if (abs_xi > threshold) ++violations;
          }
          if ((n & 8191) == 0 && detail::interrupted(cfg)) {
            any_interrupted.store(true, std::memory_order_relaxed);
            break;
          }
          if (n == cfg.checkpoints[ci]) {
            const double b = normalizer_b(static_cast<double>(n));
            ReportRow row;
            row.seed = seed;
            row.n = n;
            row.sup_error_vs_v = acc.sup_error(target);
            row.sup_error_vs_vm = acc.sup_error(vm.body);
            row.max_discrepancy = disc_at_checkpoint[ci];
            row.violation_count = violations;
            row.class_norm_max.resize(m);
            for (size_t c = 0; c < m; ++c) row.class_norm_max[c] = class_absmax[c] / b;
            if (is2d) {
              buffer.insert(buffer.end(), hull_vertices.begin(), hull_vertices.end());
              hull_vertices = exact_hull_2d(std::move(buffer)).vertices;
              buffer = {};
              buffer.reserve(1 << 16);
              const Polygon2D scaled = detail::scaled_polygon(hull_vertices, 1.0 / b);
              row.exact_hausdorff_2d = exact_hausdorff_2d(scaled, vm_poly);
              if ((cfg.dump_hulls || cfg.mode == RunMode::Hull2dDemo) && si == 0)
                write_hull_csv(scaled, std::filesystem::path(cfg.out_dir) /
                                           ("hull_" + std::to_string(n) + ".csv"));
            }
            rows.push_back(std::move(row));
            ++ci;
          }
        }
        rows_by_seed[si] = std::move(rows);
      });

  for (auto& rows : rows_by_seed)
    for (auto& row : rows) report.rows.push_back(std::move(row));
  report.interrupted = any_interrupted.load();
  detail::append_aggregates(report, cfg.checkpoints);
  return report;
}

// i.i.d. baseline: X_i = L z_i with L L' = Sigma, measured against the
// concentration ellipsoid of Sigma.
inline ConvergenceReport run_goodman(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const int d = cfg.dimension;
  Eigen::MatrixXd sigma = cfg.sigma;
  if (sigma.size() == 0) sigma = Eigen::MatrixXd::Identity(d, d);
  const SymmetricConvexBody target = SymmetricConvexBody::ellipsoid(sigma);

  // Cholesky where possible; eigenvalue square root for the semi-definite
  // boundary.
  Eigen::MatrixXd L;
  {
    Eigen::LLT<Eigen::MatrixXd> llt(target.ellipsoid_shape());
    if (llt.info() == Eigen::Success) {
      L = llt.matrixL();
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(target.ellipsoid_shape());
      L = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }
  }

  const ProbeSet probes = make_probes(d, cfg.probe_count);
  ConvergenceReport report;
  if (cfg.checkpoints.empty()) return report;
  const long long n_last = cfg.checkpoints.back();
  const bool is2d = d == 2;
  const double l00 = L(0, 0);
  const double l10 = is2d ? L(1, 0) : 0.0;
  const double l11 = is2d ? L(1, 1) : 0.0;

  std::vector<std::vector<ReportRow>> rows_by_seed(cfg.seeds.size());
  std::atomic<bool> any_interrupted{false};

  detail::parallel_for_index(
      cfg.seeds.size(), detail::resolve_threads(cfg.threads, cfg.seeds.size()), [&](size_t si) {
        const uint64_t seed = cfg.seeds[si];
        SupportAccumulator acc(probes);
        std::vector<ReportRow> rows;
        Vector z(d), X(d);
        size_t ci = 0;
        for (long long n = 1; n <= n_last && ci < cfg.checkpoints.size(); ++n) {
          if (is2d) {
            const auto zp = normal_pair(seed, static_cast<uint64_t>(n), 0, kDomainSamples);
            acc.ingest2(l00 * zp.first, l10 * zp.first + l11 * zp.second);
          } else {
            for (int c = 0; c < d; ++c)
              z(c) = standard_normal(seed, static_cast<uint64_t>(n), static_cast<uint32_t>(c),
                                     kDomainSamples);
            X.noalias() = L * z;
            acc.ingest(X);
          }
          if ((n & 8191) == 0 && detail::interrupted(cfg)) {
            any_interrupted.store(true, std::memory_order_relaxed);
            break;
          }
          if (n == cfg.checkpoints[ci]) {
            ReportRow row;
            row.seed = seed;
            row.n = n;
            row.sup_error_vs_v = acc.sup_error(target);
            rows.push_back(std::move(row));
            ++ci;
          }
        }
        rows_by_seed[si] = std::move(rows);
      });

  for (auto& rows : rows_by_seed)
    for (auto& row : rows) report.rows.push_back(std::move(row));
  report.interrupted = any_interrupted.load();
  detail::append_aggregates(report, cfg.checkpoints);
  return report;
}

// (n, epsilon, gamma) grid of the analytic bound vs the exact tail at
// x = (1+eps) b(n), with partial sums accumulated down the n grid inside
// each (epsilon, gamma) block.
inline std::vector<TailTableRow> run_tailbound(const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::vector<TailTableRow> rows;
  rows.reserve(cfg.tail_epsilon.size() * cfg.tail_gamma.size() * cfg.tail_n.size());
  for (double eps : cfg.tail_epsilon) {
    for (double gamma : cfg.tail_gamma) {
      double bound_sum = 0.0;
      double exact_sum = 0.0;
      for (long long n : cfg.tail_n) {
        TailTableRow row;
        row.n = n;
        row.epsilon = eps;
        row.gamma = gamma;
        row.bound = tail_bound(n, eps, gamma);
        row.exact_tail = gaussian_tail_exact((1.0 + eps) * normalizer_b(static_cast<double>(n)));
        bound_sum += row.bound;
        exact_sum += row.exact_tail;
        row.bound_partial_sum = bound_sum;
        row.exact_partial_sum = exact_sum;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

// Quota-partition diagnostics: per-class counts vs n * p_k at every
// checkpoint; every index up to the last checkpoint is verified against the
// discrepancy bound max_k |c_k(n) - n p_k| <= 1.
inline std::vector<PartitionCheckRow> run_partition_check(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const std::vector<double> densities = detail::config_densities(cfg);
  PartitionScheme scheme(densities);
  std::vector<PartitionCheckRow> rows;
  if (cfg.checkpoints.empty()) return rows;
  const long long n_last = cfg.checkpoints.back();
  size_t ci = 0;
  for (long long n = 1; n <= n_last; ++n) {
    scheme.assign_next();
    const double disc = scheme.max_discrepancy();
    if (disc > 1.0 + 1e-9)
      throw InvariantViolation("partition discrepancy bound exceeded at n = " + std::to_string(n) +
                               " (discrepancy " + detail::format_double(disc) + ")");
    if (ci < cfg.checkpoints.size() && n == cfg.checkpoints[ci]) {
      for (int k = 0; k < scheme.classes(); ++k) {
        PartitionCheckRow row;
        row.n = n;
        row.cls = k + 1;
        row.count = scheme.counts()[static_cast<size_t>(k)];
        row.expected = static_cast<double>(n) * densities[static_cast<size_t>(k)];
        row.discrepancy = std::abs(static_cast<double>(row.count) - row.expected);
        rows.push_back(row);
      }
      ++ci;
    }
  }
  return rows;
}

// ---- CSV writers -----------------------------------------------------------------

inline void write_report_csv(const ConvergenceReport& report, const std::filesystem::path& path) {
  std::string out =
      "seed,n,sup_error_vs_v,sup_error_vs_vm,exact_hausdorff_2d,max_discrepancy,"
      "class_norm_max,violation_count\n";
  for (const ReportRow& row : report.rows) {
    out += std::to_string(row.seed) + "," + std::to_string(row.n) + "," +
           detail::csv_double(row.sup_error_vs_v) + "," + detail::csv_double(row.sup_error_vs_vm) +
           "," + detail::csv_double(row.exact_hausdorff_2d) + "," +
           detail::csv_double(row.max_discrepancy) + "," +
           detail::joined_doubles(row.class_norm_max) + "," +
           (row.violation_count < 0 ? std::string() : std::to_string(row.violation_count)) + "\n";
  }
  detail::write_file_atomic(path, out);
}

inline void write_summary_csv(const ConvergenceReport& report, const std::filesystem::path& path) {
  std::string out = "n,metric,q25,median,q75\n";
  for (const SummaryRow& row : report.aggregates) {
    out += std::to_string(row.n) + "," + row.metric + "," + detail::format_double(row.q25) + "," +
           detail::format_double(row.median) + "," + detail::format_double(row.q75) + "\n";
  }
  detail::write_file_atomic(path, out);
}

inline void write_tailbound_csv(const std::vector<TailTableRow>& rows,
                                const std::filesystem::path& path) {
  std::string out = "n,epsilon,gamma,bound,exact_tail,ratio,bound_partial_sum,exact_partial_sum\n";
  for (const TailTableRow& row : rows) {
    out += std::to_string(row.n) + "," + detail::format_double(row.epsilon) + "," +
           detail::format_double(row.gamma) + "," + detail::format_double(row.bound) + "," +
           detail::format_double(row.exact_tail) + "," +
           detail::format_double(row.bound / row.exact_tail) + "," +
           detail::format_double(row.bound_partial_sum) + "," +
           detail::format_double(row.exact_partial_sum) + "\n";
  }
  detail::write_file_atomic(path, out);
}

inline void write_partition_csv(const std::vector<PartitionCheckRow>& rows,
                                const std::filesystem::path& path) {
  std::string out = "n,class,count,expected,discrepancy\n";
  for (const PartitionCheckRow& row : rows) {
    out += std::to_string(row.n) + "," + std::to_string(row.cls) + "," +
           std::to_string(row.count) + "," + detail::format_double(row.expected) + "," +
           detail::format_double(row.discrepancy) + "\n";
  }
  detail::write_file_atomic(path, out);
}

}  // namespace hullsim
