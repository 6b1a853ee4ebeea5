// lampwalk: exact word lengths, walk experiments, and tour-splitting checks
// on wreath products over free and lattice bases.
//
// Exit codes: 0 success, 1 internal failure, 2 configuration error,
// 3 resource-guard tripped.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lampwalk/defect_geometry.hpp"
#include "lampwalk/errors.hpp"
#include "lampwalk/free_group.hpp"
#include "lampwalk/io.hpp"
#include "lampwalk/lamp_group.hpp"
#include "lampwalk/lattice.hpp"
#include "lampwalk/rng.hpp"
#include "lampwalk/stats.hpp"
#include "lampwalk/tsp.hpp"
#include "lampwalk/walk.hpp"
#include "lampwalk/wreath.hpp"

namespace {

using nlohmann::json;
using namespace lampwalk;

// ---------------------------------------------------------------------------
// Shared option plumbing

struct Common {
  std::string config_path;
  std::string lamp = "Z2";
  std::string base = "free:2";
  std::uint64_t seed = 1;
  int threads = -1;  // unset; resolution order: flag, config, env, auto
  bool dry_run = false;
  json config;  // loaded config file, defaults for unset flags
};

void attach_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "JSON config file; flags override its keys");
  sub->add_option("--lamp", c.lamp, "lamp group: Z2 | Zd:k | path to a {order, mul} JSON table");
  sub->add_option("--base", c.base, "base group: free:k | lattice:d");
  sub->add_option("--seed", c.seed, "base seed for all random streams");
  sub->add_option("--threads", c.threads, "worker threads; 0 = hardware");
  sub->add_flag("--dry-run", c.dry_run, "validate and print the resolved plan, compute nothing");
}

template <class T>
void cfg_override(const CLI::App* sub, const json& cfg, const char* flag, const char* key,
                  T& target) {
  if (sub->count(flag) > 0 || !cfg.is_object() || !cfg.contains(key)) return;
  try {
    target = cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

void load_common_config(const CLI::App* sub, Common& c) {
  if (!c.config_path.empty()) c.config = io::load_json_file(c.config_path);
  if (c.config.is_object() && c.config.contains("kind")) {
    std::string kind;
    try {
      kind = c.config.at("kind").get<std::string>();
    } catch (const json::exception&) {
      throw ConfigError("config key 'kind' must be a string");
    }
    if (kind != sub->get_name())
      throw ConfigError("config key 'kind' is '" + kind + "' but the subcommand is '" +
                        sub->get_name() + "'");
  }
  if (c.config.is_object() && c.config.contains("group")) {
    const auto& grp = c.config.at("group");
    if (!grp.is_object()) throw ConfigError("config key 'group' must be an object");
    if (sub->count("--lamp") == 0 && grp.contains("lamp")) {
      try {
        c.lamp = grp.at("lamp").get<std::string>();
      } catch (const json::exception&) {
        throw ConfigError("config key 'group.lamp' must be a string");
      }
    }
    if (sub->count("--base") == 0 && grp.contains("base")) {
      try {
        c.base = grp.at("base").get<std::string>();
      } catch (const json::exception&) {
        throw ConfigError("config key 'group.base' must be a string");
      }
    }
  }
  cfg_override(sub, c.config, "--seed", "seed", c.seed);
  cfg_override(sub, c.config, "--threads", "threads", c.threads);
}

int resolve_thread_request(int threads) {
  if (threads >= 0) return threads;
  if (const char* env = std::getenv("LAMPWALK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0)
      throw ConfigError("env LAMPWALK_THREADS must be a nonnegative integer");
    return static_cast<int>(v);
  }
  return 0;  // auto
}

int parse_positive_suffix(const std::string& text, std::size_t prefix_len, const char* what) {
  const std::string tail = text.substr(prefix_len);
  try {
    std::size_t pos = 0;
    const int v = std::stoi(tail, &pos);
    if (pos != tail.size() || v < 1) throw ConfigError("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("group key '") + what + "' value '" + text +
                      "' has a bad numeric suffix");
  }
}

// Instantiates the wreath product named by the lamp and base strings and calls
// fn(wreath). fn must be a generic callable.
template <class F>
void with_group(const Common& c, F&& fn) {
  const auto with_lamp = [&](auto base_group) {
    if (c.lamp == "Z2") {
      fn(Wreath(FiniteLampGroup::z2(), std::move(base_group)));
    } else if (c.lamp.rfind("Zd:", 0) == 0) {
      fn(Wreath(ZdLampGroup(parse_positive_suffix(c.lamp, 3, "lamp")), std::move(base_group)));
    } else if (c.lamp.find('.') != std::string::npos || c.lamp.find('/') != std::string::npos) {
      fn(Wreath(io::load_lamp_table(c.lamp), std::move(base_group)));
    } else {
      throw ConfigError("group key 'lamp' must be Z2, Zd:k, or a table file path");
    }
  };
  if (c.base.rfind("free:", 0) == 0) {
    with_lamp(FreeGroup(parse_positive_suffix(c.base, 5, "base")));
  } else if (c.base.rfind("lattice:", 0) == 0) {
    with_lamp(IntegerLattice(parse_positive_suffix(c.base, 8, "base")));
  } else {
    throw ConfigError("group key 'base' must be free:k or lattice:d");
  }
}

template <class W>
bool has_free_base(const W&) {
  return std::is_same_v<typename W::BaseElement, Word>;
}

// Lenient element syntax: "site=value+...;pos", or a bare base word when
// there is no ';'.
template <class W>
typename W::Element parse_element(const W& g, const std::string& s) {
  if (s.find(';') == std::string::npos) return {{}, g.base().parse(s)};
  return g.parse(s);
}

// Step law from a config value: "default" (or nothing) is uniform on the
// standard generators; otherwise {atoms: [{element, prob}], tail?, and
// require_symmetric? (default true)}.
template <class W>
walk::StepDistribution<W> make_measure(const W& g, const json& m) {
  if (m.is_null() || (m.is_string() && m.get<std::string>() == "default"))
    return walk::StepDistribution<W>::uniform_standard(g);
  if (!m.is_object() || !m.contains("atoms"))
    throw ConfigError("config key 'measure' must be \"default\" or {atoms, tail?}");
  std::vector<typename walk::StepDistribution<W>::Atom> atoms;
  for (const auto& a : m.at("atoms")) {
    if (!a.is_object() || !a.contains("element") || !a.contains("prob"))
      throw ConfigError("config key 'measure.atoms' entries must be {element, prob}");
    atoms.push_back({parse_element(g, a.at("element").get<std::string>()),
                     a.at("prob").get<double>()});
  }
  std::optional<typename walk::StepDistribution<W>::Tail> tail;
  if (m.contains("tail") && !m.at("tail").is_null()) {
    const auto& t = m.at("tail");
    typename walk::StepDistribution<W>::Tail tl;
    tl.prob = t.value("prob", 0.0);
    tl.geom_p = t.value("geom_p", 0.5);
    tl.lamp_prob = t.value("lamp_prob", 0.5);
    tail = tl;
  }
  const bool require_symmetric = m.value("require_symmetric", true);
  return walk::StepDistribution<W>(g, std::move(atoms), tail, require_symmetric);
}

json measure_config(const Common& c) {
  if (c.config.is_object() && c.config.contains("measure")) return c.config.at("measure");
  return nullptr;
}

// Output stream selection; "-" means stdout.
class OutFile {
 public:
  explicit OutFile(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw ConfigError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

json group_json(const Common& c) { return json{{"lamp", c.lamp}, {"base", c.base}}; }

int finish_dry_run(const json& plan) {
  json out = plan;
  out["dry_run"] = true;
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// length

struct LengthArgs {
  Common common;
  std::string element = ";1";
};

int run_length(const LengthArgs& args) {
  std::int64_t value = 0;
  with_group(args.common, [&](const auto& g) {
    const auto e = parse_element(g, args.element);
    value = g.word_length(e);
  });
  if (args.common.dry_run)
    return finish_dry_run(json{{"command", "length"},
                               {"group", group_json(args.common)},
                               {"element", args.element}});
  std::cout << value << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// tsp

struct TspArgs {
  Common common;
  std::string instance;  // inline JSON or a file path
  std::string solver = "auto";
};

json load_inline_or_file(const std::string& s, const char* what) {
  if (!s.empty() && s.front() == '{') {
    try {
      return json::parse(s);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("inline ") + what + " is not valid json: " + e.what());
    }
  }
  if (s.empty()) throw ConfigError(std::string(what) + " is required");
  return io::load_json_file(s);
}

template <class G>
tsp::Solution solve_with(const G& g, const tsp::Instance<G>& inst, const std::string& solver) {
  if (solver == "auto") return tsp::solve(g, inst);
  if (solver == "tree") return tsp::solve_tree(g, inst);
  if (solver == "dp") return tsp::solve_dp(g, inst);
  if (solver == "brute") return tsp::brute_force(g, inst);
  if (solver == "approx") return tsp::approx_two_opt(g, inst);
  throw ConfigError("config key 'solver' must be auto, tree, dp, brute, or approx");
}

int run_tsp(const TspArgs& args) {
  const json inst_json = load_inline_or_file(args.instance, "tsp instance");
  if (!inst_json.is_object() || !inst_json.contains("start") || !inst_json.contains("end") ||
      !inst_json.contains("points"))
    throw ConfigError("tsp instance must be {start, end, points}");
  json result;
  with_group(args.common, [&](const auto& g) {
    const auto& base = g.base();
    const auto start = base.parse(inst_json.at("start").get<std::string>());
    const auto end = base.parse(inst_json.at("end").get<std::string>());
    std::vector<std::decay_t<decltype(start)>> points;
    for (const auto& p : inst_json.at("points")) points.push_back(base.parse(p.get<std::string>()));
    const auto inst = tsp::make_instance(base, start, end, points);
    const auto sol = solve_with(base, inst, args.solver);
    json order = json::array();
    for (const auto idx : sol.order) order.push_back(base.str(inst.points[idx]));
    result = json{{"value", sol.value}, {"order", order}, {"exact", sol.exact}};
  });
  if (args.common.dry_run)
    return finish_dry_run(json{{"command", "tsp"},
                               {"group", group_json(args.common)},
                               {"solver", args.solver}});
  std::cout << result.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// bfs-oracle

struct BfsArgs {
  Common common;
  std::int64_t radius = 3;
  std::uint64_t guard = 10'000'000;
  std::string out = "-";
  bool check = false;
};

int run_bfs(const BfsArgs& args) {
  const json plan{{"command", "bfs-oracle"},
                  {"group", group_json(args.common)},
                  {"radius", args.radius},
                  {"check", args.check}};
  if (args.common.dry_run) return finish_dry_run(plan);
  const std::uint64_t hash = io::config_hash(plan);
  int exit_code = 0;
  with_group(args.common, [&](const auto& g) {
    const auto ball = g.bfs_ball(args.radius, args.guard);
    OutFile out(args.out);
    io::write_meta(out.stream(), hash, args.common.seed);
    out.stream() << "element,distance\n";
    std::int64_t mismatches = 0;
    for (const auto& [e, d] : ball) {
      out.stream() << g.str(e) << "," << d << "\n";
      if (args.check && g.word_length(e) != d) ++mismatches;
    }
    if (args.check) {
      std::cerr << "checked " << ball.size() << " elements, " << mismatches << " mismatches\n";
      if (mismatches > 0) exit_code = 1;
    }
  });
  return exit_code;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  Common common;
  std::vector<std::int64_t> horizons;
  std::int64_t samples = 1000;
  std::string out = "-";
  std::string format = "csv";
};

int run_simulate(SimulateArgs args, const CLI::App* sub) {
  cfg_override(sub, args.common.config, "--horizons", "horizons", args.horizons);
  cfg_override(sub, args.common.config, "--samples", "samples", args.samples);
  cfg_override(sub, args.common.config, "--format", "format", args.format);
  if (args.horizons.empty()) args.horizons = {1000};
  if (args.format != "csv" && args.format != "json")
    throw ConfigError("config key 'format' must be csv or json");
  const json plan{{"command", "simulate"},       {"group", group_json(args.common)},
                  {"measure", measure_config(args.common)}, {"horizons", args.horizons},
                  {"samples", args.samples},     {"seed", args.common.seed},
                  {"format", args.format}};
  const int threads = resolve_thread_request(args.common.threads);
  const std::uint64_t hash = io::config_hash(plan);
  with_group(args.common, [&](const auto& g) {
    const auto mu = make_measure(g, measure_config(args.common));
    if (args.common.dry_run) return;
    const auto records =
        walk::batch_cocycle(g, mu, args.horizons, args.samples, args.common.seed, threads);
    OutFile out(args.out);
    if (args.format == "csv") {
      io::write_meta(out.stream(), hash, args.common.seed);
      out.stream() << "horizon,sample,length,base_dist\n";
      for (const auto& r : records)
        out.stream() << r.horizon << "," << r.sample << "," << r.length << "," << r.base_dist
                     << "\n";
      return;
    }
    json agg;
    agg["meta"] = io::meta_json(hash, args.common.seed);
    agg["horizons"] = json::array();
    for (std::size_t hi = 0; hi < args.horizons.size(); ++hi) {
      stats::MomentAccumulator len(2), base(2);
      for (std::int64_t s = 0; s < args.samples; ++s) {
        const auto& r = records[hi * static_cast<std::size_t>(args.samples) +
                                static_cast<std::size_t>(s)];
        len.add(static_cast<double>(r.length));
        base.add(static_cast<double>(r.base_dist));
      }
      const double n = static_cast<double>(args.horizons[hi]);
      agg["horizons"].push_back(json{{"horizon", args.horizons[hi]},
                                     {"count", args.samples},
                                     {"mean_length", len.mean()},
                                     {"var_length", len.variance()},
                                     {"normalized_length", len.mean() / n},
                                     {"mean_base_dist", base.mean()},
                                     {"normalized_base_dist", base.mean() / n}});
    }
    out.stream() << agg.dump(2) << "\n";
  });
  if (args.common.dry_run) return finish_dry_run(plan);
  return 0;
}

// ---------------------------------------------------------------------------
// defect-table

struct DefectArgs {
  Common common;
  std::vector<std::string> grid;  // "m:n" entries
  std::string diag;               // "min:max", powers of two, m = n
  std::int64_t samples = 1000;
  std::vector<int> orders = {1, 2};
  std::string records_out;
  std::string out = "-";
};

std::vector<std::pair<std::int64_t, std::int64_t>> resolve_defect_grid(const DefectArgs& args) {
  std::vector<std::pair<std::int64_t, std::int64_t>> grid;
  for (const auto& s : args.grid) {
    const auto sep = s.find(':');
    if (sep == std::string::npos)
      throw ConfigError("config key 'grid' entries must look like m:n");
    try {
      std::size_t p1 = 0, p2 = 0;
      const std::string ms = s.substr(0, sep), ns = s.substr(sep + 1);
      const std::int64_t m = std::stoll(ms, &p1);
      const std::int64_t n = std::stoll(ns, &p2);
      if (p1 != ms.size() || p2 != ns.size()) throw ConfigError("");
      grid.emplace_back(m, n);
    } catch (const std::exception&) {
      throw ConfigError("config key 'grid' entries must look like m:n");
    }
  }
  if (grid.empty()) {
    std::int64_t lo = 64, hi = 4096;
    if (!args.diag.empty()) {
      const auto sep = args.diag.find(':');
      if (sep == std::string::npos)
        throw ConfigError("config key 'diag' must look like min:max");
      try {
        std::size_t p1 = 0, p2 = 0;
        const std::string los = args.diag.substr(0, sep), his = args.diag.substr(sep + 1);
        lo = std::stoll(los, &p1);
        hi = std::stoll(his, &p2);
        if (p1 != los.size() || p2 != his.size() || lo < 1 || hi < lo) throw ConfigError("");
      } catch (const std::exception&) {
        throw ConfigError("config key 'diag' must look like min:max with 1 <= min <= max");
      }
    }
    for (std::int64_t n = lo; n <= hi; n *= 2) grid.emplace_back(n, n);
  }
  return grid;
}

int run_defect(DefectArgs args, const CLI::App* sub) {
  cfg_override(sub, args.common.config, "--grid", "grid", args.grid);
  cfg_override(sub, args.common.config, "--diag", "diag", args.diag);
  cfg_override(sub, args.common.config, "--samples", "samples", args.samples);
  cfg_override(sub, args.common.config, "--orders", "orders", args.orders);
  const auto grid = resolve_defect_grid(args);
  json grid_json = json::array();
  for (const auto& [m, n] : grid) grid_json.push_back(json::array({m, n}));
  const json plan{{"command", "defect-table"},    {"group", group_json(args.common)},
                  {"measure", measure_config(args.common)}, {"grid", grid_json},
                  {"samples", args.samples},      {"orders", args.orders},
                  {"seed", args.common.seed}};
  const int threads = resolve_thread_request(args.common.threads);
  const std::uint64_t hash = io::config_hash(plan);
  with_group(args.common, [&](const auto& g) {
    const auto mu = make_measure(g, measure_config(args.common));
    if (args.common.dry_run) return;
    const auto records = walk::batch_defect(g, mu, grid, args.samples, args.common.seed, threads);
    if (!args.records_out.empty()) {
      OutFile rec_out(args.records_out);
      io::write_meta(rec_out.stream(), hash, args.common.seed);
      rec_out.stream() << "m,n,sample,q_m,d_mid,q_mn,defect\n";
      for (const auto& r : records)
        rec_out.stream() << r.m << "," << r.n << "," << r.sample << "," << r.q_m << ","
                         << r.d_mid << "," << r.q_mn << "," << r.defect << "\n";
    }
    const auto rows = stats::defect_moment_table(records, args.orders);
    const auto fits = stats::fit_defect_growth(rows, args.orders);
    OutFile out(args.out);
    io::write_meta(out.stream(), hash, args.common.seed);
    out.stream() << "n,p,moment,fit_exponent,fit_coeff,residual\n";
    for (std::size_t pi = 0; pi < args.orders.size(); ++pi) {
      const auto& fit = fits[pi];
      for (const auto& row : rows) {
        const double moment = row.moments[pi];
        const double residual =
            moment > 0 ? std::abs(fit.intercept + fit.exponent * std::log(static_cast<double>(row.n)) -
                                  std::log(moment))
                       : 0.0;
        out.stream() << row.n << "," << args.orders[pi] << "," << io::format_double(moment) << ","
                     << io::format_double(fit.exponent) << "," << io::format_double(fit.coeff)
                     << "," << io::format_double(residual) << "\n";
      }
    }
  });
  if (args.common.dry_run) return finish_dry_run(plan);
  return 0;
}

// ---------------------------------------------------------------------------
// clt-test

struct CltArgs {
  Common common;
  std::int64_t n = 2000;
  std::int64_t samples = 5000;
  std::int64_t est_samples = 0;  // 0: same as samples
  std::string observable = "length";
  std::string out = "-";
};

int run_clt(CltArgs args, const CLI::App* sub) {
  cfg_override(sub, args.common.config, "--n", "n", args.n);
  cfg_override(sub, args.common.config, "--samples", "samples", args.samples);
  cfg_override(sub, args.common.config, "--est-samples", "est_samples", args.est_samples);
  cfg_override(sub, args.common.config, "--observable", "observable", args.observable);
  if (args.n < 1) throw ConfigError("config key 'n' must be positive");
  if (args.samples < 1) throw ConfigError("config key 'samples' must be positive");
  if (args.est_samples == 0) args.est_samples = args.samples;
  if (args.est_samples < 2) throw ConfigError("config key 'est_samples' must be at least 2");
  if (args.observable != "length" && args.observable != "base_dist")
    throw ConfigError("config key 'observable' must be length or base_dist");
  const json plan{{"command", "clt-test"},
                  {"group", group_json(args.common)},
                  {"measure", measure_config(args.common)},
                  {"n", args.n},
                  {"samples", args.samples},
                  {"est_samples", args.est_samples},
                  {"observable", args.observable},
                  {"seed", args.common.seed}};
  const int threads = resolve_thread_request(args.common.threads);
  const std::uint64_t hash = io::config_hash(plan);
  json report;
  with_group(args.common, [&](const auto& g) {
    const auto mu = make_measure(g, measure_config(args.common));
    if (args.common.dry_run) return;
    const std::vector<std::int64_t> horizons{args.n};
    const auto pick = [&](const walk::CocycleRecord& r) {
      return args.observable == "length" ? r.length : r.base_dist;
    };
    // Estimation batch on an independent seed, then the test batch.
    const std::uint64_t est_seed = args.common.seed + 1;
    const auto est_records =
        walk::batch_cocycle(g, mu, horizons, args.est_samples, est_seed, threads);
    std::vector<std::int64_t> est_values;
    est_values.reserve(est_records.size());
    for (const auto& r : est_records) est_values.push_back(pick(r));
    const auto drift = stats::estimate_drift({{args.n, est_values}});
    const auto sigma = stats::estimate_sigma(args.n, est_values);

    report["meta"] = io::meta_json(hash, args.common.seed);
    report["estimation"] = json{{"n", args.n},
                                {"samples", args.est_samples},
                                {"seed", est_seed},
                                {"drift", drift.speed},
                                {"sigma", sigma.sigma},
                                {"degenerate", sigma.degenerate}};
    if (sigma.degenerate) {
      report["test"] = nullptr;
      return;
    }

    const auto records =
        walk::batch_cocycle(g, mu, horizons, args.samples, args.common.seed, threads);
    std::vector<double> z;
    z.reserve(records.size());
    const double center = drift.speed * static_cast<double>(args.n);
    const double scale = sigma.sigma * std::sqrt(static_cast<double>(args.n));
    for (const auto& r : records)
      z.push_back((static_cast<double>(pick(r)) - center) / scale);
    const auto rep = stats::normality_test(z);
    report["test"] = json{{"n", args.n},
                          {"samples", args.samples},
                          {"mean", rep.mean},
                          {"variance", rep.variance},
                          {"skewness", rep.skewness},
                          {"excess_kurtosis", rep.excess_kurtosis},
                          {"ks_stat", rep.ks_stat},
                          {"ks_p", rep.ks_p},
                          {"ad_stat", rep.ad_stat},
                          {"ks_reject_1pct", rep.ks_reject_1pct}};
  });
  if (args.common.dry_run) return finish_dry_run(plan);
  OutFile out(args.out);
  out.stream() << report.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// tracking

struct TrackingArgs {
  Common common;
  std::vector<std::int64_t> horizons;
  std::int64_t samples = 500;
  double k0 = 0;  // 0: skip the pair-speed scan
  std::int64_t window = 32;
  std::string out = "-";
  std::string format = "csv";
};

int run_tracking_cmd(TrackingArgs args, const CLI::App* sub) {
  cfg_override(sub, args.common.config, "--horizons", "horizons", args.horizons);
  cfg_override(sub, args.common.config, "--samples", "samples", args.samples);
  cfg_override(sub, args.common.config, "--k0", "k0", args.k0);
  cfg_override(sub, args.common.config, "--window", "window", args.window);
  cfg_override(sub, args.common.config, "--format", "format", args.format);
  if (args.horizons.empty()) args.horizons = {128, 256, 512, 1024, 2048, 4096, 8192};
  if (args.format != "csv" && args.format != "json")
    throw ConfigError("config key 'format' must be csv or json");
  if (args.k0 < 0) throw ConfigError("config key 'k0' must be nonnegative");
  const json plan{{"command", "tracking"},       {"group", group_json(args.common)},
                  {"measure", measure_config(args.common)}, {"horizons", args.horizons},
                  {"samples", args.samples},     {"k0", args.k0},
                  {"window", args.window},       {"seed", args.common.seed},
                  {"format", args.format}};
  const int threads = resolve_thread_request(args.common.threads);
  const std::uint64_t hash = io::config_hash(plan);
  with_group(args.common, [&](const auto& g) {
    using W = std::decay_t<decltype(g)>;
    if constexpr (std::is_same_v<typename W::BaseElement, Word>) {
      const auto mu = make_measure(g, measure_config(args.common));
      if (args.common.dry_run) return;
      const std::optional<double> k0 =
          args.k0 > 0 ? std::optional<double>(args.k0) : std::nullopt;
      const auto records = walk::batch_tracking(g, mu, args.horizons, args.samples,
                                                args.common.seed, threads, k0, args.window);
      OutFile out(args.out);
      if (args.format == "csv") {
        io::write_meta(out.stream(), hash, args.common.seed);
        out.stream() << "horizon,sample,max_dev,end_dist,violations\n";
        for (const auto& r : records)
          out.stream() << r.horizon << "," << r.sample << "," << r.max_dev << "," << r.end_dist
                       << "," << r.violations << "\n";
        return;
      }
      json agg;
      agg["meta"] = io::meta_json(hash, args.common.seed);
      agg["horizons"] = json::array();
      for (std::size_t hi = 0; hi < args.horizons.size(); ++hi) {
        std::vector<double> devs;
        std::int64_t violations = 0;
        stats::MomentAccumulator end(1);
        for (std::int64_t s = 0; s < args.samples; ++s) {
          const auto& r = records[hi * static_cast<std::size_t>(args.samples) +
                                  static_cast<std::size_t>(s)];
          devs.push_back(static_cast<double>(r.max_dev));
          end.add(static_cast<double>(r.end_dist));
          if (r.violations > 0) violations += r.violations;
        }
        agg["horizons"].push_back(json{{"horizon", args.horizons[hi]},
                                       {"count", args.samples},
                                       {"median_max_dev", stats::quantile(devs, 0.5)},
                                       {"p90_max_dev", stats::quantile(devs, 0.9)},
                                       {"mean_end_dist", end.mean()},
                                       {"violations", violations}});
      }
      out.stream() << agg.dump(2) << "\n";
    } else {
      throw ConfigError("tracking needs a free base group");
    }
  });
  if (args.common.dry_run) return finish_dry_run(plan);
  return 0;
}

// ---------------------------------------------------------------------------
// verify-lemma

struct LemmaArgs {
  Common common;
  std::int64_t count = 100;
  std::int64_t d_min = 1, d_max = 3;
  std::int64_t axis_min = 48, axis_max = 160;
  std::int64_t max_points = 12;
  double shared_fraction = 0.25;
  std::uint64_t max_attempts_per_instance = 1000;
  std::string out = "-";
};

int run_verify_lemma(LemmaArgs args, const CLI::App* sub) {
  cfg_override(sub, args.common.config, "--count", "count", args.count);
  cfg_override(sub, args.common.config, "--d-min", "d_min", args.d_min);
  cfg_override(sub, args.common.config, "--d-max", "d_max", args.d_max);
  cfg_override(sub, args.common.config, "--axis-min", "axis_min", args.axis_min);
  cfg_override(sub, args.common.config, "--axis-max", "axis_max", args.axis_max);
  cfg_override(sub, args.common.config, "--max-points", "max_points", args.max_points);
  cfg_override(sub, args.common.config, "--shared-fraction", "shared_fraction",
               args.shared_fraction);
  if (args.count < 1) throw ConfigError("config key 'count' must be positive");
  if (args.common.base.rfind("free:", 0) != 0)
    throw ConfigError("verify-lemma needs a free base group");
  const json plan{{"command", "verify-lemma"},
                  {"group", group_json(args.common)},
                  {"count", args.count},
                  {"d_min", args.d_min},
                  {"d_max", args.d_max},
                  {"axis_min", args.axis_min},
                  {"axis_max", args.axis_max},
                  {"max_points", args.max_points},
                  {"shared_fraction", args.shared_fraction},
                  {"seed", args.common.seed}};
  if (args.common.dry_run) return finish_dry_run(plan);
  const std::uint64_t hash = io::config_hash(plan);

  const FreeGroup g(parse_positive_suffix(args.common.base, 5, "base"));
  lemma::RandomInstanceParams params;
  params.d_min = args.d_min;
  params.d_max = args.d_max;
  params.axis_min = args.axis_min;
  params.axis_max = args.axis_max;
  params.max_points = args.max_points;
  params.shared_fraction = args.shared_fraction;

  OutFile out(args.out);
  io::write_meta(out.stream(), hash, args.common.seed);
  out.stream() << "seed,R,D,N,t1,t2,t3,defect,bound,verdict\n";
  std::int64_t produced = 0;
  std::uint64_t attempt = 0;
  const std::uint64_t max_attempts =
      args.max_attempts_per_instance * static_cast<std::uint64_t>(args.count);
  while (produced < args.count) {
    if (attempt >= max_attempts)
      throw GuardError("instance generation exceeded the attempt budget");
    PhiloxRng rng(args.common.seed, attempt);
    const auto inst = lemma::random_instance(g, params, rng);
    const std::uint64_t this_attempt = attempt++;
    if (!inst) continue;
    const auto cert = lemma::certify(g, *inst);
    const auto rep = lemma::defect_sandwich(g, *inst, cert,
                                            lemma::set_union_of(inst->l1, inst->l2));
    const bool ok = rep.lower_ok && rep.upper_ok;
    out.stream() << this_attempt << "," << cert.r << "," << inst->d << "," << cert.n_window << ","
                 << rep.t_first << "," << rep.t_second << "," << rep.t_joint << "," << rep.defect
                 << "," << rep.bound << "," << (ok ? "pass" : "fail") << "\n";
    ++produced;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lampwalk: exact word lengths and random-walk experiments on wreath products"};
  app.require_subcommand(1);

  LengthArgs length_args;
  auto* length_cmd = app.add_subcommand("length", "word length of one element");
  attach_common(length_cmd, length_args.common);
  length_cmd->add_option("element", length_args.element,
                         "element as site=value+...;pos (bare word = position only)");

  TspArgs tsp_args;
  auto* tsp_cmd = app.add_subcommand("tsp", "fixed-endpoint tour through base-group points");
  attach_common(tsp_cmd, tsp_args.common);
  tsp_cmd->add_option("instance", tsp_args.instance,
                      "instance as inline JSON {start, end, points} or a file path");
  tsp_cmd->add_option("--solver", tsp_args.solver, "auto | tree | dp | brute | approx");

  BfsArgs bfs_args;
  auto* bfs_cmd = app.add_subcommand("bfs-oracle", "breadth-first ball with exact distances");
  attach_common(bfs_cmd, bfs_args.common);
  bfs_cmd->add_option("--radius", bfs_args.radius, "ball radius");
  bfs_cmd->add_option("--guard", bfs_args.guard, "element-count guard");
  bfs_cmd->add_option("--out", bfs_args.out, "output CSV path, - for stdout");
  bfs_cmd->add_flag("--check", bfs_args.check, "cross-check word_length against BFS distances");

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "sample word lengths along random walks");
  attach_common(sim_cmd, sim_args.common);
  sim_cmd->add_option("--horizons", sim_args.horizons, "walk lengths to sample at")
      ->delimiter(',');
  sim_cmd->add_option("--samples", sim_args.samples, "trajectories per horizon");
  sim_cmd->add_option("--out", sim_args.out, "output path, - for stdout");
  sim_cmd->add_option("--format", sim_args.format, "csv | json");

  DefectArgs defect_args;
  auto* defect_cmd = app.add_subcommand("defect-table", "defect moments over an (m, n) grid");
  attach_common(defect_cmd, defect_args.common);
  defect_cmd->add_option("--grid", defect_args.grid, "explicit m:n cells")->delimiter(',');
  defect_cmd->add_option("--diag", defect_args.diag,
                         "min:max diagonal of powers of two (default 64:4096)");
  defect_cmd->add_option("--samples", defect_args.samples, "samples per cell");
  defect_cmd->add_option("--orders", defect_args.orders, "moment orders")->delimiter(',');
  defect_cmd->add_option("--records-out", defect_args.records_out, "per-sample record CSV path");
  defect_cmd->add_option("--out", defect_args.out, "fit table CSV path, - for stdout");

  CltArgs clt_args;
  auto* clt_cmd = app.add_subcommand("clt-test", "normality of the standardized word length");
  attach_common(clt_cmd, clt_args.common);
  clt_cmd->add_option("--n", clt_args.n, "walk length");
  clt_cmd->add_option("--samples", clt_args.samples, "test trajectories");
  clt_cmd->add_option("--est-samples", clt_args.est_samples,
                      "trajectories for the independent drift/spread estimate");
  clt_cmd->add_option("--observable", clt_args.observable, "length | base_dist");
  clt_cmd->add_option("--out", clt_args.out, "report JSON path, - for stdout");

  TrackingArgs tracking_args;
  auto* tracking_cmd =
      app.add_subcommand("tracking", "deviation of the base walk from its final geodesic");
  attach_common(tracking_cmd, tracking_args.common);
  tracking_cmd->add_option("--horizons", tracking_args.horizons, "walk lengths")->delimiter(',');
  tracking_cmd->add_option("--samples", tracking_args.samples, "trajectories per horizon");
  tracking_cmd->add_option("--k0", tracking_args.k0,
                           "pair-speed floor constant; 0 skips the pair scan");
  tracking_cmd->add_option("--window", tracking_args.window, "minimum pair gap for the scan");
  tracking_cmd->add_option("--out", tracking_args.out, "output path, - for stdout");
  tracking_cmd->add_option("--format", tracking_args.format, "csv | json");

  LemmaArgs lemma_args;
  auto* lemma_cmd =
      app.add_subcommand("verify-lemma", "tour-splitting sandwich on random certified instances");
  attach_common(lemma_cmd, lemma_args.common);
  lemma_cmd->add_option("--count", lemma_args.count, "certified instances to emit");
  lemma_cmd->add_option("--d-min", lemma_args.d_min, "smallest neighborhood width");
  lemma_cmd->add_option("--d-max", lemma_args.d_max, "largest neighborhood width");
  lemma_cmd->add_option("--axis-min", lemma_args.axis_min, "shortest axis");
  lemma_cmd->add_option("--axis-max", lemma_args.axis_max, "longest axis");
  lemma_cmd->add_option("--max-points", lemma_args.max_points, "point budget per instance");
  lemma_cmd->add_option("--shared-fraction", lemma_args.shared_fraction,
                        "chance an eligible point joins both clouds");
  lemma_cmd->add_option("--out", lemma_args.out, "output CSV path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    Common* common = nullptr;
    if (sub == length_cmd) common = &length_args.common;
    if (sub == tsp_cmd) common = &tsp_args.common;
    if (sub == bfs_cmd) common = &bfs_args.common;
    if (sub == sim_cmd) common = &sim_args.common;
    if (sub == defect_cmd) common = &defect_args.common;
    if (sub == clt_cmd) common = &clt_args.common;
    if (sub == tracking_cmd) common = &tracking_args.common;
    if (sub == lemma_cmd) common = &lemma_args.common;
    load_common_config(sub, *common);

    if (sub == length_cmd) return run_length(length_args);
    if (sub == tsp_cmd) return run_tsp(tsp_args);
    if (sub == bfs_cmd) return run_bfs(bfs_args);
    if (sub == sim_cmd) return run_simulate(sim_args, sim_cmd);
    if (sub == defect_cmd) return run_defect(defect_args, defect_cmd);
    if (sub == clt_cmd) return run_clt(clt_args, clt_cmd);
    if (sub == tracking_cmd) return run_tracking_cmd(tracking_args, tracking_cmd);
    if (sub == lemma_cmd) return run_verify_lemma(lemma_args, lemma_cmd);
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const GuardError& e) {
    std::cerr << "guard error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
