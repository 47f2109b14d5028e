#pragma once

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bridge_rate/error.hpp"
#include "bridge_rate/fm_distance.hpp"
#include "bridge_rate/functionals.hpp"
#include "bridge_rate/io.hpp"
#include "bridge_rate/lattice_law.hpp"
#include "bridge_rate/local_limit.hpp"
#include "bridge_rate/parallel.hpp"
#include "bridge_rate/path_sim.hpp"
#include "bridge_rate/rate_lab.hpp"
#include "bridge_rate/rn_weighting.hpp"
#include "bridge_rate/walk_pmf.hpp"

namespace bridge_rate::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 1;

/// "64:16384:geom" (ratio 2), "64:16384:geom:4", "10:100:lin:10" or "16,64,256".
inline std::vector<std::int64_t> parse_n_grid(const std::string& text) {
  std::vector<std::string> parts;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, sep);) parts.push_back(p);
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, "bad n-grid '" + text + "'");
    }
    require(used == s.size() && v >= 1, "bad n-grid '" + text + "'");
    return static_cast<std::int64_t>(v);
  };
  std::vector<std::int64_t> out;
  if (sep == ',') {
    for (const auto& p : parts) out.push_back(to_int(p));
    return out;
  }
  require(parts.size() == 3 || parts.size() == 4, "bad n-grid '" + text + "'");
  const auto lo = to_int(parts[0]);
  const auto hi = to_int(parts[1]);
  require(lo <= hi, "n-grid: lower bound exceeds upper bound");
  if (parts[2] == "geom") {
    const auto ratio = parts.size() == 4 ? to_int(parts[3]) : 2;
    require(ratio >= 2, "n-grid: geometric ratio must be >= 2");
    for (auto n = lo; n <= hi; n *= ratio) out.push_back(n);
  } else if (parts[2] == "lin") {
    const auto step = parts.size() == 4 ? to_int(parts[3]) : 1;
    for (auto n = lo; n <= hi; n += step) out.push_back(n);
  } else {
    fail(ErrorCode::InvalidArgument, "n-grid: spacing must be geom or lin");
  }
  return out;
}

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::NotFound:
    case ErrorCode::Unsupported:
      return 2;
    case ErrorCode::SizeCap:
    case ErrorCode::TooLarge:
    case ErrorCode::QuadratureFailure:
    case ErrorCode::SolverFailure:
      return 3;
    case ErrorCode::InternalError:
      return 1;
  }
  return 1;
}

namespace detail {

struct Context {
  std::string command;
  std::string config_echo;
  std::uint64_t seed = kDefaultSeed;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  void stamp(CsvWriter& csv, bool with_seed) const {
    csv.meta("bridge_rate", kVersion);
    csv.meta("command", command);
    csv.meta("config", config_echo);
    if (with_seed) csv.meta("seed", std::to_string(seed));
  }

  void finish(CsvWriter& csv, const std::string& out, std::ostream& stdout_stream) const {
    csv.meta("wallclock_s", format_double(elapsed()));
    if (out.empty() || out == "-") {
      stdout_stream << csv.str();
    } else {
      csv.write(out);
    }
  }

  void finish_json(nlohmann::json result, const std::string& out, std::ostream& stdout_stream,
                   bool with_seed) const {
    nlohmann::json doc;
    doc["metadata"] = {{"bridge_rate", kVersion}, {"command", command}, {"config", config_echo},
                       {"wallclock_s", elapsed()}};
    if (with_seed) doc["metadata"]["seed"] = seed;
    doc["result"] = std::move(result);
    const std::string text = doc.dump(2) + "\n";
    if (out.empty() || out == "-") {
      stdout_stream << text;
      return;
    }
    std::ofstream f(out);
    if (!f) fail(ErrorCode::InvalidArgument, "cannot write '" + out + "'");
    f << text;
  }
};

inline nlohmann::json distance_json(const DistanceEstimate& d) {
  return {{"value", d.value},
          {"kind", d.kind == DistanceKind::fm ? "fm" : "w1"},
          {"solver_status", d.solver_status == SolverStatus::optimal ? "optimal" : "tol_reached"},
          {"half_width", d.half_width},
          {"m", d.m},
          {"k", d.k}};
}

}  // namespace detail

/// Parses and runs one command line (args excludes the program name).
/// Returns 0 on success, 2 on validation errors, 3 on cap/solver failures;
/// errors go to `err` as a single "error: CODE: message" line.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"bridge_rate: conditioned random walks and the Brownian bridge"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = all cores)");

  detail::Context ctx;
  std::optional<std::uint64_t> seed_flag;
  std::string law_spec = "rademacher";
  std::string out_path;
  std::int64_t n = 16;
  double t = 1.0;
  std::string n_grid = "64:1024:geom";
  double delta = 0.0;
  double s = 1.0;
  bool s_sup = false;
  double abs_tol = 1e-8;
  int max_depth = 40;
  std::string kind = "conditioned";
  std::size_t count = 100;
  std::string functional = "F2";
  std::string path_a, path_b, metric = "fm";
  std::string n_list = "16,64,256,1024";
  std::size_t samples = 2000;
  std::size_t reps = 20;
  std::int64_t grid_bridge = 0;
  std::int64_t exact_n = 2;
  std::int64_t lemma_n = 4;
  double lemma_t = 0.5;

  auto add_law = [&](CLI::App* c) { c->add_option("--law", law_spec, "rademacher, poisson1, or a JSON law file"); };
  auto add_out = [&](CLI::App* c) { c->add_option("--out", out_path, "output file ('-' for stdout)"); };
  auto add_seed = [&](CLI::App* c) { c->add_option("--seed", seed_flag, "64-bit seed (env BRIDGE_RATE_SEED, default 1)"); };

  auto* pmf = app.add_subcommand("pmf", "exact law of the rescaled partial sum");
  add_law(pmf);
  pmf->add_option("--n", n)->check(CLI::PositiveNumber);
  pmf->add_option("--t", t)->check(CLI::Range(0.0, 1.0));
  add_out(pmf);

  auto* rho_cmd = app.add_subcommand("rho", "return-probability error rho(L, n) over an n grid");
  add_law(rho_cmd);
  rho_cmd->add_option("--n-grid", n_grid);
  add_out(rho_cmd);

  auto* tau_cmd = app.add_subcommand("tau", "characteristic-function error tau(L, n, delta) over an n grid");
  add_law(tau_cmd);
  tau_cmd->add_option("--delta", delta, "cut-off exponent (default: 1/6 rademacher, 1/12 poisson1)");
  tau_cmd->add_option("--s", s)->check(CLI::Range(0.0, 1.0));
  tau_cmd->add_flag("--sup", s_sup, "maximize over the default s grid instead of a single s");
  tau_cmd->add_option("--n-grid", n_grid);
  tau_cmd->add_option("--abs-tol", abs_tol);
  tau_cmd->add_option("--max-depth", max_depth);
  add_out(tau_cmd);

  auto* sample = app.add_subcommand("sample", "draw paths in long format");
  sample->add_option("--kind", kind)->check(CLI::IsMember({"walk", "conditioned", "bridge", "empirical"}));
  add_law(sample);
  sample->add_option("--n", n)->check(CLI::PositiveNumber);
  sample->add_option("--count", count)->check(CLI::PositiveNumber);
  add_seed(sample);
  add_out(sample);

  auto* lemma = app.add_subcommand("lemma1", "both sides of the de-conditioning identity by enumeration");
  add_law(lemma);
  lemma->add_option("--n", lemma_n)->check(CLI::PositiveNumber);
  lemma->add_option("--t", lemma_t);
  lemma->add_option("--functional", functional)->check(CLI::IsMember({"F1", "F2", "F3", "F4", "F5"}));
  add_out(lemma);

  auto* dist = app.add_subcommand("distance", "FM or W1 distance between two path files");
  dist->add_option("--a", path_a)->required();
  dist->add_option("--b", path_b)->required();
  dist->add_option("--metric", metric)->check(CLI::IsMember({"fm", "w1"}));
  add_out(dist);

  auto* rate = app.add_subcommand("rate", "FM distance, rho and tau across n");
  add_law(rate);
  rate->add_option("--n", n_list, "comma list or n-grid");
  rate->add_option("--samples", samples)->check(CLI::PositiveNumber);
  rate->add_option("--reps", reps);
  rate->add_option("--grid-bridge", grid_bridge, "bridge grid (default max(256, n))");
  rate->add_option("--delta", delta);
  add_seed(rate);
  add_out(rate);

  auto* gc = app.add_subcommand("gc-check", "empirical process vs conditioned Poisson walk");
  gc->add_option("--n", n)->check(CLI::PositiveNumber);
  gc->add_option("--samples", samples)->check(CLI::PositiveNumber);
  gc->add_option("--reps", reps);
  add_seed(gc);
  add_out(gc);

  auto* spot = app.add_subcommand("spotcheck", "tail inequality for conditioned walks");
  add_law(spot);
  spot->add_option("--n", n_list, "comma list or n-grid");
  spot->add_option("--samples", samples)->check(CLI::PositiveNumber);
  spot->add_option("--exact-n", exact_n, "also sum exactly at this n (0 to skip)");
  add_seed(spot);
  add_out(spot);

  std::vector<const char*> argv{"bridge_rate"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: INVALID: " << e.what() << '\n';
    return 2;
  }

  try {
    set_default_threads(threads);
    ctx.command = app.get_subcommands().front()->get_name();
    for (std::size_t i = 0; i < args.size(); ++i) ctx.config_echo += (i ? " " : "") + args[i];
    if (seed_flag) {
      ctx.seed = *seed_flag;
    } else if (const char* env = std::getenv("BRIDGE_RATE_SEED")) {
      try {
        ctx.seed = std::stoull(env);
      } catch (const std::exception&) {
        fail(ErrorCode::InvalidArgument, "BRIDGE_RATE_SEED is not an integer");
      }
    }
    const RngStream rng(ctx.seed);

    if (*pmf) {
      const auto law = resolve_law(law_spec);
      const auto p = exact_pmf(law, n, t);
      CsvWriter csv({"value", "prob"});
      ctx.stamp(csv, false);
      for (std::int64_t z = p.first_index; z <= p.last_index(); ++z) {
        csv.row({format_double(p.value(z)), format_double(p.prob_index(z))});
      }
      ctx.finish(csv, out_path, out);
    } else if (*rho_cmd) {
      const auto law = resolve_law(law_spec);
      CsvWriter csv({"n", "rho"});
      ctx.stamp(csv, false);
      std::vector<std::pair<double, double>> pairs;
      for (auto ni : parse_n_grid(n_grid)) {
        const double r = rho(law, ni);
        pairs.emplace_back(static_cast<double>(ni), r);
        csv.row({std::to_string(ni), format_double(r)});
      }
      if (pairs.size() >= 4) csv.meta("loglog_slope", format_double(loglog_slope(pairs).slope));
      ctx.finish(csv, out_path, out);
    } else if (*tau_cmd) {
      const auto law = resolve_law(law_spec);
      QuadratureSpec quad;
      quad.abs_tol = abs_tol;
      quad.max_depth = max_depth;
      const double d = delta > 0.0 ? delta : default_delta(law);
      CsvWriter csv({"n", "tau"});
      ctx.stamp(csv, false);
      std::vector<std::pair<double, double>> pairs;
      for (auto ni : parse_n_grid(n_grid)) {
        const double v = s_sup ? tau_sup(law, ni, d, default_s_grid(ni), quad) : tau(law, ni, d, s, quad);
        pairs.emplace_back(static_cast<double>(ni), v);
        csv.row({std::to_string(ni), format_double(v)});
      }
      if (pairs.size() >= 4) csv.meta("loglog_slope", format_double(loglog_slope(pairs).slope));
      ctx.finish(csv, out_path, out);
    } else if (*sample) {
      PathSampler sampler;
      std::optional<LatticeLaw> law;
      std::optional<ConditionedSampler> conditioned;
      if (kind == "walk" || kind == "conditioned") law = resolve_law(law_spec);
      if (kind == "walk") {
        sampler = [&](RngStream& r) { return sample_walk_path(*law, n, r); };
      } else if (kind == "conditioned") {
        conditioned.emplace(*law, n);
        sampler = [&](RngStream& r) { return conditioned->sample(r); };
      } else if (kind == "bridge") {
        sampler = [&](RngStream& r) { return sample_brownian_bridge(n, r); };
      } else {
        sampler = [&](RngStream& r) { return sample_empirical_process(n, r); };
      }
      const auto paths = draw_paths(sampler, count, rng);
      CsvWriter csv({"sample_id", "k", "t", "value"});
      ctx.stamp(csv, true);
      csv.meta("kind", kind);
      for (std::size_t i = 0; i < paths.size(); ++i) add_path_rows(csv, i, paths[i]);
      ctx.finish(csv, out_path, out);
    } else if (*lemma) {
      const auto law = resolve_law(law_spec);
      const auto battery = functional_battery();
      const auto sides = lemma1_sides(law, lemma_n, lemma_t, find_functional(battery, functional));
      ctx.finish_json({{"law", law.name()}, {"n", lemma_n}, {"t", lemma_t}, {"functional", functional},
                       {"lhs", sides.lhs}, {"rhs", sides.rhs}, {"residual", sides.residual()}},
                      out_path, out, false);
    } else if (*dist) {
      auto a = EmpiricalMeasure::uniform(read_paths_csv(path_a));
      auto b = EmpiricalMeasure::uniform(read_paths_csv(path_b));
      const auto d = metric == "fm" ? fm_empirical(a, b) : w1_empirical(a, b);
      ctx.finish_json(detail::distance_json(d), out_path, out, false);
    } else if (*rate) {
      const auto law = resolve_law(law_spec);
      ConvergenceOptions options;
      options.reps = reps;
      options.grid_bridge = grid_bridge;
      options.delta = delta;
      const auto rows = convergence_table(law, parse_n_grid(n_list), samples, rng, options);
      CsvWriter csv({"n", "fm_value", "fm_half_width", "rho_value", "tau_value"});
      ctx.stamp(csv, true);
      for (const auto& r : rows) {
        csv.row({std::to_string(r.n), format_double(r.fm_value), format_double(r.fm_half_width),
                 format_double(r.rho_value), format_double(r.tau_value)});
        csv.meta("row_wallclock_s_n" + std::to_string(r.n), format_double(r.wallclock_s));
      }
      csv.meta("fm_trend_decreasing", fm_trend_decreasing(rows) ? "true" : "false");
      ctx.finish(csv, out_path, out);
    } else if (*gc) {
      const auto res = gc_equivalence_check(n, samples, rng, reps);
      nlohmann::json result{{"n", n},
                            {"estimate", detail::distance_json(res.estimate)},
                            {"baseline", detail::distance_json(res.baseline)},
                            {"indistinguishable", res.indistinguishable}};
      if (n <= 4) result["exact_tv"] = gc_exact_tv(n);
      ctx.finish_json(result, out_path, out, true);
    } else if (*spot) {
      const auto law = resolve_law(law_spec);
      auto rows = inequality_spotchecks(law, parse_n_grid(n_list), samples, rng);
      if (exact_n > 0) rows.insert(rows.begin(), inequality_exact(law, exact_n));
      CsvWriter csv({"n", "t_n", "lhs", "lhs_se", "rhs", "rhs_se", "exact", "pass"});
      ctx.stamp(csv, true);
      for (const auto& r : rows) {
        csv.row({std::to_string(r.n), format_double(r.t_n), format_double(r.lhs), format_double(r.lhs_se),
                 format_double(r.rhs), format_double(r.rhs_se), r.exact ? "1" : "0", r.pass ? "1" : "0"});
      }
      ctx.finish(csv, out_path, out);
    }
  } catch (const Error& e) {
    err << "error: " << error_code_name(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: INTERNAL: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace bridge_rate::cli
