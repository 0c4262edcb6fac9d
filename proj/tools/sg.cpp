// Copyright 2026 The sg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sg/artifacts.hpp"
#include "sg/catastrophe.hpp"
#include "sg/game.hpp"
#include "sg/game_io.hpp"
#include "sg/lemke_howson.hpp"
#include "sg/qre.hpp"
#include "sg/rational.hpp"

namespace {

using nlohmann::json;

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
};

Range parse_range(const std::string& text, const std::string& flag) {
  Range r;
  std::istringstream ss(text);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 3) throw sg::GameParseError(flag + ": expected LO:HI:N");
  try {
    r.lo = std::stod(parts[0]);
    r.hi = std::stod(parts[1]);
    r.n = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw sg::GameParseError(flag + ": cannot parse \"" + text + "\"");
  }
  if (r.n < 2) throw sg::GameParseError(flag + ": need at least 2 points");
  return r;
}

std::pair<double, double> parse_interval(const std::string& text, const std::string& flag) {
  std::istringstream ss(text);
  std::string a, b;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b))
    throw sg::GameParseError(flag + ": expected LO:HI");
  try {
    return {std::stod(a), std::stod(b)};
  } catch (const std::exception&) {
    throw sg::GameParseError(flag + ": cannot parse \"" + text + "\"");
  }
}

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      out.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw sg::GameParseError(flag + ": cannot parse \"" + text + "\"");
    }
  }
  if (out.empty()) throw sg::GameParseError(flag + ": empty list");
  return out;
}

struct GameArgs {
  std::string file;
  std::string builtin;
};

void add_game_flags(CLI::App* cmd, GameArgs& args) {
  auto* f = cmd->add_option("--game", args.file, "game file (JSON)");
  auto* b = cmd->add_option("--builtin", args.builtin, "builtin game: pd, chicken, ts:T,S");
  f->excludes(b);
}

sg::LoadedGame load_game(const GameArgs& args) {
  if (!args.builtin.empty()) return sg::load_builtin_game(args.builtin);
  if (!args.file.empty()) return sg::load_game_file(args.file);
  throw sg::GameParseError("no game given; use --game FILE or --builtin NAME");
}

std::string input_hash(const GameArgs& args) {
  if (!args.builtin.empty()) return sg::fnv1a64_hex("builtin:" + args.builtin);
  if (!args.file.empty()) return sg::hash_file(args.file);
  return sg::fnv1a64_hex("");
}

const sg::BimatrixGame& require_bimatrix(const sg::LoadedGame& loaded) {
  if (!loaded.bimatrix)
    throw sg::GameParseError("this command needs a two-agent game");
  return *loaded.bimatrix;
}

json equilibrium_json(const sg::RationalEquilibrium& eq, const sg::BimatrixGame& original) {
  const sg::EquilibriumPoint pt = sg::to_equilibrium_point(eq, original);
  json jx = json::array(), jy = json::array();
  for (const auto& p : eq.x) jx.push_back(sg::fraction_string(p));
  for (const auto& p : eq.y) jy.push_back(sg::fraction_string(p));
  return {{"x", std::move(jx)},
          {"y", std::move(jy)},
          {"payoffs", pt.payoffs},
          {"kind", pt.kind == sg::EquilibriumKind::pure ? "pure" : "mixed"}};
}

const char* stability_name(sg::QreStability s) {
  switch (s) {
    case sg::QreStability::stable: return "stable";
    case sg::QreStability::unstable: return "unstable";
    case sg::QreStability::marginal: return "marginal";
  }
  return "unknown";
}

json fixed_point_json(const sg::QreFixedPoint& fp) {
  json j{{"p", fp.profile.distributions},
         {"residual", fp.residual},
         {"stability", stability_name(fp.stability)}};
  if (fp.profile.num_agents() == 2 && fp.profile.distributions[0].size() == 2 &&
      fp.profile.distributions[1].size() == 2)
    j["Q"] = {fp.Q(0), fp.Q(1)};
  return j;
}

// Output sink: JSON defaults to stdout, CSV requires --out. Every file
// written gets a manifest next to it.
struct OutputContext {
  std::string out_path;
  mutable sg::RunManifest manifest;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void stamp_wall_time() const {
    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  void emit_json(const json& j) const {
    if (out_path.empty()) {
      std::cout << j.dump(2) << "\n";
      return;
    }
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot write " + out_path);
    f << j.dump(2) << "\n";
    stamp_wall_time();
    manifest.write_alongside(out_path);
  }

  void emit_csv(const std::string& header, const std::vector<std::string>& rows) const {
    if (out_path.empty()) throw sg::GameParseError("CSV output needs --out PATH");
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot write " + out_path);
    f << header << "\n";
    for (const auto& r : rows) f << r << "\n";
    stamp_wall_time();
    manifest.write_alongside(out_path);
  }
};

int cmd_solve_nash(const GameArgs& game_args, int label, OutputContext& out) {
  const sg::LoadedGame loaded = load_game(game_args);
  const sg::BimatrixGame& original = require_bimatrix(loaded);
  const auto rational = sg::RationalBimatrix::from(sg::positivize(original));
  const auto result = sg::lemke_howson(rational, label);
  json j{{"source", loaded.source},
         {"label", label},
         {"path_steps", result.path.steps.size()},
         {"equilibrium", equilibrium_json(result.equilibrium, original)}};
  out.emit_json(j);
  return 0;
}

int cmd_enumerate_nash(const GameArgs& game_args, const std::string& method,
                       OutputContext& out) {
  const sg::LoadedGame loaded = load_game(game_args);
  const sg::BimatrixGame& original = require_bimatrix(loaded);
  std::vector<sg::RationalEquilibrium> eqs;
  bool warning = false;
  if (method == "lh") {
    const auto rational = sg::RationalBimatrix::from(sg::positivize(original));
    auto res = sg::enumerate_equilibria_lh(rational);
    eqs = std::move(res.equilibria);
    warning = res.degenerate_warning;
  } else if (method == "support") {
    eqs = sg::support_enumeration(sg::RationalBimatrix::from(original));
  } else {
    throw sg::GameParseError("--method must be lh or support");
  }
  json list = json::array();
  for (const auto& eq : eqs) list.push_back(equilibrium_json(eq, original));
  json j{{"source", loaded.source},
         {"method", method},
         {"count", eqs.size()},
         {"equilibria", std::move(list)}};
  if (warning) j["degeneracy_warning"] = true;
  out.emit_json(j);
  return 0;
}

int cmd_classify_game(const GameArgs& game_args, OutputContext& out) {
  const sg::LoadedGame loaded = load_game(game_args);
  const sg::BimatrixGame& original = require_bimatrix(loaded);
  const auto eqs = sg::support_enumeration(sg::RationalBimatrix::from(original));
  int pure = 0;
  for (const auto& eq : eqs) pure += eq.is_pure() ? 1 : 0;

  std::string region = "n/a";
  if (game_args.builtin.rfind("ts:", 0) == 0) {
    const std::string args = game_args.builtin.substr(3);
    const auto comma = args.find(',');
    const sg::TSFamilyPoint p{std::stod(args.substr(0, comma)), std::stod(args.substr(comma + 1))};
    region = sg::ts_region_name(sg::ts_region(p));
  }
  std::ostringstream report;
  report << pure << " pure NE, region: " << region;
  json j{{"source", loaded.source},
         {"pure_ne_count", pure},
         {"total_ne_count", eqs.size()},
         {"region", region},
         {"report", report.str()}};
  out.emit_json(j);
  return 0;
}

int cmd_qre_solve(const GameArgs& game_args, const std::string& beta_text, double damping,
                  OutputContext& out) {
  const sg::LoadedGame loaded = load_game(game_args);
  const std::vector<double> betas = parse_double_list(beta_text, "--beta");
  const sg::LogitParams params{betas};
  json j{{"source", loaded.source}, {"betas", betas}};

  const bool is_2x2 = loaded.bimatrix && loaded.bimatrix->rows() == 2 &&
                      loaded.bimatrix->cols() == 2;
  if (is_2x2) {
    const auto fps = sg::solve_qre_fixed_points(*loaded.bimatrix, params);
    json list = json::array();
    for (const auto& fp : fps) list.push_back(fixed_point_json(fp));
    j["count"] = fps.size();
    j["fixed_points"] = std::move(list);
    j["converged"] = true;
    out.emit_json(j);
    return 0;
  }

  const auto res = sg::qre_iterate(loaded.game, sg::MixedStrategyProfile::uniform(loaded.game),
                                   params, damping);
  j["count"] = 1;
  j["fixed_points"] = json::array({fixed_point_json(res.point)});
  j["converged"] = res.converged;
  j["iterations"] = res.iterations;
  out.emit_json(j);
  return res.converged ? 0 : 1;
}

int cmd_qre_sweep(const GameArgs& game_args, const std::string& grid_text, int threads,
                  OutputContext& out) {
  const sg::LoadedGame loaded = load_game(game_args);
  const sg::BimatrixGame& game = require_bimatrix(loaded);
  const Range r = parse_range(grid_text, "--beta-grid");
  if (r.lo < 0.0) throw sg::GameParseError("--beta-grid: betas must be nonnegative");
  const auto b1s = sg::linspace(r.lo, r.hi, r.n);
  const auto b2s = b1s;

  std::vector<std::vector<sg::QreFixedPoint>> cells(b1s.size() * b2s.size());
  sg::parallel_for(cells.size(), threads, [&](std::size_t idx) {
    const double b1 = b1s[idx / b2s.size()];
    const double b2 = b2s[idx % b2s.size()];
    cells[idx] = sg::solve_qre_fixed_points(game, sg::LogitParams{{b1, b2}});
  });

  std::vector<std::string> rows;
  for (std::size_t idx = 0; idx < cells.size(); ++idx) {
    const double b1 = b1s[idx / b2s.size()];
    const double b2 = b2s[idx % b2s.size()];
    for (const auto& fp : cells[idx]) {
      rows.push_back(sg::fmt17(b1) + "," + sg::fmt17(b2) + "," +
                     std::to_string(cells[idx].size()) + "," + sg::fmt17(fp.Q(0)) + "," +
                     sg::fmt17(fp.Q(1)));
    }
  }
  out.emit_csv("beta1,beta2,count,Q1,Q2", rows);
  return 0;
}

int cmd_qre_critical(const GameArgs& game_args, int resolution, OutputContext& out) {
  const sg::LoadedGame loaded = load_game(game_args);
  const sg::BimatrixGame& game = require_bimatrix(loaded);
  const auto curves = sg::trace_critical_set(game, resolution);
  std::vector<std::string> rows;
  for (std::size_t c = 0; c < curves.size(); ++c)
    for (const auto& pt : curves[c].points)
      rows.push_back(sg::fmt17(pt.Q1) + "," + sg::fmt17(pt.Q2) + "," + sg::fmt17(pt.beta1) +
                     "," + sg::fmt17(pt.beta2) + "," + std::to_string(c));
  out.emit_csv("Q1,Q2,beta1,beta2,curve_id", rows);
  return 0;
}

int cmd_cusp_surface(const std::string& u1_text, const std::string& u2_text,
                     OutputContext& out) {
  const Range r1 = parse_range(u1_text, "--u1");
  const Range r2 = parse_range(u2_text, "--u2");
  const auto rows_data = sg::sweep_cusp_surface(r1.lo, r1.hi, r1.n, r2.lo, r2.hi, r2.n);
  std::vector<std::string> rows;
  for (const auto& row : rows_data)
    for (const auto& root : row.set.roots)
      rows.push_back(sg::fmt17(row.u1) + "," + sg::fmt17(row.u2) + "," + sg::fmt17(root.x) +
                     "," +
                     (root.stability == sg::RootStability::stable ? "stable" : "unstable"));
  out.emit_csv("u1,u2,root,stability", rows);
  return 0;
}

int cmd_sct_density(double u1, double u2, double sigma, const std::string& support_text,
                    int grid, OutputContext& out) {
  const auto [lo, hi] = parse_interval(support_text, "--support");
  if (!(hi > lo)) throw sg::GameParseError("--support: need LO < HI");
  const auto drift = [u1, u2](double x) { return -x * x * x + u1 * x + u2; };
  const auto density = sg::stationary_density_const_sigma(drift, sigma, lo, hi, grid);
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < density.x.size(); ++i)
    rows.push_back(sg::fmt17(density.x[i]) + "," + sg::fmt17(density.density[i]));
  out.emit_csv("x,density", rows);
  return 0;
}

int cmd_sct_sim(double u1, double u2, double sigma, double x0, std::uint64_t seed, double dt,
                long steps, int bins, OutputContext& out) {
  const auto drift = [u1, u2](double x) { return -x * x * x + u1 * x + u2; };
  sg::SdeOptions opt;
  opt.histogram_bins = bins;
  opt.keep_trajectory = false;
  const auto sim = sg::simulate_sde(drift, [sigma](double) { return sigma; }, x0, dt, steps,
                                    seed, opt);
  std::vector<std::string> rows;
  const auto centers = sim.histogram.centers();
  for (std::size_t i = 0; i < centers.size(); ++i)
    rows.push_back(sg::fmt17(centers[i]) + "," + sg::fmt17(sim.histogram.density[i]));
  out.emit_csv("bin_center,density", rows);
  if (sim.escaped)
    std::cerr << "warning: trajectory escaped the guard interval at t = " << sim.escape_time
              << "; histogram covers the visited prefix\n";
  return 0;
}

int cmd_potential_check(const GameArgs& game_args, const std::string& matrix_file, double tol,
                        OutputContext& out) {
  sg::Matrix A{{0.0}};
  std::string source;
  if (!matrix_file.empty()) {
    std::ifstream in(matrix_file);
    if (!in) throw sg::GameParseError("cannot open matrix file: " + matrix_file);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw sg::GameParseError("invalid JSON in " + matrix_file + ": " + e.what());
    }
    A = sg::detail::parse_matrix(j.contains("A") ? j["A"] : j, "A");
    source = "file:" + matrix_file;
  } else {
    const sg::LoadedGame loaded = load_game(game_args);
    const sg::BimatrixGame& g = require_bimatrix(loaded);
    if (g.rows() != g.cols())
      throw sg::GameParseError("potential-check needs a square matrix");
    A = g.A;
    source = loaded.source;
  }
  const auto check = sg::has_potential_condition(A, tol);
  json j{{"source", source}, {"holds", check.holds}, {"tolerance", tol}};
  if (!check.holds) {
    j["worst_triple"] = {check.worst_triple[0] + 1, check.worst_triple[1] + 1,
                         check.worst_triple[2] + 1};
    j["worst_violation"] = check.worst_violation;
  }
  out.emit_json(j);
  return 0;
}

std::string reconstruct_command_line(int argc, char** argv) {
  std::string cmd;
  for (int i = 0; i < argc; ++i) {
    if (i) cmd += ' ';
    const std::string arg = argv[i];
    cmd += arg.find(' ') == std::string::npos ? arg : "\"" + arg + "\"";
  }
  return cmd;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nash equilibria, quantal response surfaces and catastrophe structures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sg::kToolVersion);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads for sweeps (0 = auto)");

  GameArgs game_args;
  std::string out_path;
  int label = 1;
  std::string method = "support";
  std::string beta_text;
  double damping = 0.5;
  std::string beta_grid;
  int resolution = 256;
  std::string u1_range, u2_range;
  double u1 = 1.0, u2 = 0.0, sigma = 0.5, x0 = 0.0, dt = 1e-3;
  std::uint64_t seed = 1;
  long steps = 1000000;
  int bins = 64, grid = 1024;
  std::string support_text = "-4:4";
  std::string matrix_file;
  double pc_tol = 1e-9;

  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "output path (JSON default: stdout; CSV: required)");
  };

  auto* solve = app.add_subcommand("solve-nash", "one Lemke-Howson equilibrium");
  add_game_flags(solve, game_args);
  solve->add_option("--label", label, "label k in {1..l+m} to drop first");
  add_out(solve);

  auto* enumerate = app.add_subcommand("enumerate-nash", "all equilibria of a small game");
  add_game_flags(enumerate, game_args);
  enumerate->add_option("--method", method, "lh or support");
  add_out(enumerate);

  auto* classify = app.add_subcommand("classify-game", "equilibrium count and T-S region");
  add_game_flags(classify, game_args);
  add_out(classify);

  auto* qre_solve = app.add_subcommand("qre-solve", "logit QRE fixed points");
  add_game_flags(qre_solve, game_args);
  qre_solve->add_option("--beta", beta_text, "comma-separated betas, one per agent")
      ->required();
  qre_solve->add_option("--damping", damping, "iteration damping for games beyond 2x2");
  add_out(qre_solve);

  auto* sweep = app.add_subcommand("qre-sweep", "fixed-point counts over a beta grid");
  add_game_flags(sweep, game_args);
  sweep->add_option("--beta-grid", beta_grid, "LO:HI:N for both beta axes")->required();
  add_out(sweep);

  auto* critical = app.add_subcommand("qre-critical", "trace the QRE critical set");
  add_game_flags(critical, game_args);
  critical->add_option("--resolution", resolution, "Q-grid resolution (>= 64)");
  add_out(critical);

  auto* cusp = app.add_subcommand("cusp-surface", "cusp equilibrium surface sweep");
  cusp->add_option("--u1", u1_range, "LO:HI:N")->required();
  cusp->add_option("--u2", u2_range, "LO:HI:N")->required();
  add_out(cusp);

  auto* density = app.add_subcommand("sct-density", "stationary density of the noisy cusp");
  density->add_option("--u1", u1, "cusp control u1");
  density->add_option("--u2", u2, "cusp control u2");
  density->add_option("--sigma", sigma, "constant diffusion strength");
  density->add_option("--support", support_text, "density support LO:HI");
  density->add_option("--grid", grid, "grid points");
  add_out(density);

  auto* sim = app.add_subcommand("sct-sim", "Euler-Maruyama simulation of the noisy cusp");
  sim->add_option("--u1", u1, "cusp control u1");
  sim->add_option("--u2", u2, "cusp control u2");
  sim->add_option("--sigma", sigma, "constant diffusion strength");
  sim->add_option("--x0", x0, "initial state");
  sim->add_option("--seed", seed, "random seed");
  sim->add_option("--dt", dt, "time step");
  sim->add_option("--steps", steps, "number of steps");
  sim->add_option("--bins", bins, "histogram bins");
  add_out(sim);

  auto* potential = app.add_subcommand("potential-check", "triple condition for a potential");
  add_game_flags(potential, game_args);
  potential->add_option("--matrix", matrix_file, "JSON matrix file");
  potential->add_option("--tol", pc_tol, "violation tolerance");
  add_out(potential);

  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; every real parse failure is an
    // input error.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  OutputContext out;
  out.out_path = out_path;
  out.manifest.command_line = reconstruct_command_line(argc, argv);
  out.manifest.input_hash = input_hash(game_args);
  if (sim->parsed()) out.manifest.seed = seed;

  int code = 0;
  try {
    if (solve->parsed()) code = cmd_solve_nash(game_args, label, out);
    else if (enumerate->parsed()) code = cmd_enumerate_nash(game_args, method, out);
    else if (classify->parsed()) code = cmd_classify_game(game_args, out);
    else if (qre_solve->parsed()) code = cmd_qre_solve(game_args, beta_text, damping, out);
    else if (sweep->parsed()) code = cmd_qre_sweep(game_args, beta_grid,
                                                   sg::resolve_threads(threads), out);
    else if (critical->parsed()) code = cmd_qre_critical(game_args, resolution, out);
    else if (cusp->parsed()) code = cmd_cusp_surface(u1_range, u2_range, out);
    else if (density->parsed()) code = cmd_sct_density(u1, u2, sigma, support_text, grid, out);
    else if (sim->parsed()) code = cmd_sct_sim(u1, u2, sigma, x0, seed, dt, steps, bins, out);
    else if (potential->parsed()) code = cmd_potential_check(game_args, matrix_file, pc_tol, out);
  } catch (const sg::GameParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return code;
}
