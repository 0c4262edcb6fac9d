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

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sg/game.hpp"

namespace sg {

inline constexpr double kQreResidualTol = 1e-10;
inline constexpr int kScalarScanGrid = 4096;

struct LogitParams {
  std::vector<double> betas;

  void validate(int num_agents) const {
    if (static_cast<int>(betas.size()) != num_agents)
      throw DimensionError("LogitParams: need one beta per agent",
                           static_cast<int>(betas.size()));
    for (double b : betas)
      if (!(b >= 0.0) || !std::isfinite(b))
        throw std::invalid_argument("LogitParams: betas must be finite and nonnegative");
  }
};

enum class QreStability { stable, unstable, marginal };

struct QreFixedPoint {
  MixedStrategyProfile profile;
  LogitParams betas;
  double residual = 0.0;
  QreStability stability = QreStability::marginal;

  // Rescaled first-choice probability of agent i (two-choice agents).
  double Q(int agent) const { return 2.0 * profile.distributions[agent][0] - 1.0; }
};

struct QCoordinates {
  double Q1 = 0.0;
  double Q2 = 0.0;

  static QCoordinates from_profile(const MixedStrategyProfile& p) {
    return {2.0 * p.distributions[0][0] - 1.0, 2.0 * p.distributions[1][0] - 1.0};
  }
  MixedStrategyProfile to_profile() const {
    MixedStrategyProfile p;
    p.distributions = {{(1.0 + Q1) / 2.0, (1.0 - Q1) / 2.0},
                       {(1.0 + Q2) / 2.0, (1.0 - Q2) / 2.0}};
    return p;
  }
};

// Logit response map: per-agent softmax over conditional payoffs with
// max subtraction so large betas cannot overflow.
inline MixedStrategyProfile logit_response(const NormalFormGame& game,
                                           const MixedStrategyProfile& profile,
                                           const LogitParams& params) {
  params.validate(game.num_agents());
  profile.validate_against(game);
  MixedStrategyProfile out;
  out.distributions.resize(game.num_agents());
  for (int i = 0; i < game.num_agents(); ++i) {
    const std::vector<double> cond = conditional_payoff(game, i, profile);
    const double beta = params.betas[i];
    double mx = -std::numeric_limits<double>::infinity();
    for (double c : cond) mx = std::max(mx, beta * c);
    double z = 0.0;
    std::vector<double>& d = out.distributions[i];
    d.resize(cond.size());
    for (std::size_t j = 0; j < cond.size(); ++j) {
      d[j] = std::exp(beta * cond[j] - mx);
      z += d[j];
    }
    for (double& p : d) p /= z;
  }
  return out;
}

inline double qre_residual(const NormalFormGame& game, const MixedStrategyProfile& profile,
                           const LogitParams& params) {
  const MixedStrategyProfile r = logit_response(game, profile, params);
  double res = 0.0;
  for (int i = 0; i < game.num_agents(); ++i)
    for (std::size_t j = 0; j < profile.distributions[i].size(); ++j)
      res = std::max(res, std::abs(profile.distributions[i][j] - r.distributions[i][j]));
  return res;
}

// ---------------------------------------------------------------------------
// Two-agent, two-choice reduction. With x (resp. y) the first-choice
// probability of agent 1 (resp. 2), each agent's conditional-payoff
// difference (choice 1 minus choice 2) is linear in the opponent's
// probability, and the logit response becomes a scalar sigmoid. In
// rescaled coordinates Q_i = 2 p_i - 1 the response is
// Q_i = tanh(beta_i * Delta_i(Q_{-i}) / 2) with Delta_i = c_i + d_i Q_{-i}.
// ---------------------------------------------------------------------------

struct G22Form {
  double c1 = 0.0, d1 = 0.0;  // Delta_1(Q2) = c1 + d1 Q2
  double c2 = 0.0, d2 = 0.0;  // Delta_2(Q1) = c2 + d2 Q1

  double delta1_q(double Q2) const { return c1 + d1 * Q2; }
  double delta2_q(double Q1) const { return c2 + d2 * Q1; }
  // Probability-coordinate payoff differences.
  double dq1(double y) const { return delta1_q(2.0 * y - 1.0); }
  double dq2(double x) const { return delta2_q(2.0 * x - 1.0); }

  static G22Form from(const BimatrixGame& g) {
    g.validate();
    if (g.rows() != 2 || g.cols() != 2)
      throw std::invalid_argument("G22Form: game must be 2x2");
    G22Form f;
    const double a1 = g.A(0, 0) - g.A(1, 0);  // vs opponent's first choice
    const double a0 = g.A(0, 1) - g.A(1, 1);  // vs opponent's second choice
    f.c1 = 0.5 * (a1 + a0);
    f.d1 = 0.5 * (a1 - a0);
    const double b1 = g.B(0, 0) - g.B(0, 1);
    const double b0 = g.B(1, 0) - g.B(1, 1);
    f.c2 = 0.5 * (b1 + b0);
    f.d2 = 0.5 * (b1 - b0);
    return f;
  }

  // An identically-zero payoff difference makes the whole strategy
  // interval an equilibrium continuum.
  bool degenerate() const { return (c1 == 0.0 && d1 == 0.0) || (c2 == 0.0 && d2 == 0.0); }
};

namespace detail {

inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace detail

// Agent 1's logit response (first-choice probability) to y, and agent
// 2's response to x.
inline double qre_response1(const G22Form& f, double y, double beta1) {
  return detail::sigmoid(beta1 * f.dq1(y));
}
inline double qre_response2(const G22Form& f, double x, double beta2) {
  return detail::sigmoid(beta2 * f.dq2(x));
}

// All logit QRE fixed points of a 2x2 game, by reducing to the scalar
// root problem x - psi2(psi1(x)) = 0 on [0, 1]: sign scan on a fixed
// grid, bisection on each bracket, then a Newton polish. Stability is
// the contraction factor of the composed scalar map.
inline std::vector<QreFixedPoint> solve_qre_fixed_points(const BimatrixGame& game,
                                                         const LogitParams& params) {
  params.validate(2);
  const G22Form f = G22Form::from(game);
  const double b1 = params.betas[0], b2 = params.betas[1];

  const auto composed = [&](double x) { return qre_response1(f, qre_response2(f, x, b2), b1); };
  const auto F = [&](double x) { return x - composed(x); };
  const auto composed_deriv = [&](double x) {
    const double y = qre_response2(f, x, b2);
    const double xr = qre_response1(f, y, b1);
    const double dy_dx = y * (1.0 - y) * b2 * (f.dq2(1.0) - f.dq2(0.0));
    const double dx_dy = xr * (1.0 - xr) * b1 * (f.dq1(1.0) - f.dq1(0.0));
    return dx_dy * dy_dx;
  };

  std::vector<double> roots;
  double prev_x = 0.0, prev_F = F(0.0);
  if (prev_F == 0.0) roots.push_back(0.0);
  for (int k = 1; k < kScalarScanGrid; ++k) {
    const double x = static_cast<double>(k) / (kScalarScanGrid - 1);
    const double Fx = F(x);
    if (Fx == 0.0) {
      roots.push_back(x);
    } else if (prev_F != 0.0 && std::signbit(Fx) != std::signbit(prev_F)) {
      double lo = prev_x, hi = x, flo = prev_F;
      for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = F(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (std::signbit(fm) == std::signbit(flo)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      double r = 0.5 * (lo + hi);
      for (int it = 0; it < 4; ++it) {
        const double deriv = 1.0 - composed_deriv(r);
        if (std::abs(deriv) < 1e-14) break;
        const double step = F(r) / deriv;
        const double next = r - step;
        if (next < prev_x || next > x) break;
        r = next;
      }
      roots.push_back(r);
    }
    prev_x = x;
    prev_F = Fx;
  }

  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-9; }),
              roots.end());

  const NormalFormGame nf = game.to_normal_form();
  std::vector<QreFixedPoint> out;
  for (double x : roots) {
    QreFixedPoint fp;
    const double y = qre_response2(f, x, b2);
    fp.profile.distributions = {{x, 1.0 - x}, {y, 1.0 - y}};
    fp.betas = params;
    fp.residual = qre_residual(nf, fp.profile, params);
    const double slope = std::abs(composed_deriv(x));
    if (std::abs(slope - 1.0) <= 1e-8)
      fp.stability = QreStability::marginal;
    else
      fp.stability = slope < 1.0 ? QreStability::stable : QreStability::unstable;
    out.push_back(std::move(fp));
  }
  return out;
}

struct QreIterationResult {
  QreFixedPoint point;
  bool converged = false;
  long iterations = 0;
};

// Damped fixed-point iteration p <- (1-lambda) p + lambda L(p) for any
// number of agents and choices. Finds one fixed point, basin-dependent.
inline QreIterationResult qre_iterate(const NormalFormGame& game,
                                      const MixedStrategyProfile& start,
                                      const LogitParams& params, double damping = 1.0,
                                      long max_iterations = 100000) {
  if (!(damping > 0.0) || damping > 1.0)
    throw std::invalid_argument("qre_iterate: damping must be in (0, 1]");
  QreIterationResult result;
  MixedStrategyProfile p = start;
  p.validate_against(game);
  double res = qre_residual(game, p, params);
  while (result.iterations < max_iterations && res > kQreResidualTol) {
    const MixedStrategyProfile r = logit_response(game, p, params);
    for (int i = 0; i < game.num_agents(); ++i)
      for (std::size_t j = 0; j < p.distributions[i].size(); ++j)
        p.distributions[i][j] =
            (1.0 - damping) * p.distributions[i][j] + damping * r.distributions[i][j];
    res = qre_residual(game, p, params);
    ++result.iterations;
  }
  result.converged = res <= kQreResidualTol;
  result.point.profile = p;
  result.point.betas = params;
  result.point.residual = res;

  // Dominant contraction factor of the response map, estimated by
  // finite-difference power iteration.
  double norm_est = 0.0;
  {
    const double eps = 1e-6;
    std::vector<double> dir;
    for (const auto& d : p.distributions)
      for (std::size_t j = 0; j < d.size(); ++j) dir.push_back(j == 0 ? 1.0 : -1.0 / (d.size() - 1));
    double dn = 0.0;
    for (double v : dir) dn += v * v;
    for (double& v : dir) v /= std::sqrt(dn);
    for (int it = 0; it < 25; ++it) {
      MixedStrategyProfile q = p;
      std::size_t idx = 0;
      for (auto& d : q.distributions) {
        double s = 0.0;
        for (double& v : d) {
          v = std::clamp(v + eps * dir[idx++], 0.0, 1.0);
          s += v;
        }
        for (double& v : d) v /= s;
      }
      const MixedStrategyProfile rp = logit_response(game, p, params);
      const MixedStrategyProfile rq = logit_response(game, q, params);
      std::vector<double> next;
      idx = 0;
      double nn = 0.0;
      for (int i = 0; i < game.num_agents(); ++i)
        for (std::size_t j = 0; j < p.distributions[i].size(); ++j) {
          const double v = (rq.distributions[i][j] - rp.distributions[i][j]) / eps;
          next.push_back(v);
          nn += v * v;
        }
      norm_est = std::sqrt(nn);
      if (norm_est < 1e-12) break;
      for (double& v : next) v /= norm_est;
      dir = std::move(next);
    }
  }
  if (std::abs(norm_est - 1.0) <= 1e-8)
    result.point.stability = QreStability::marginal;
  else
    result.point.stability = norm_est < 1.0 ? QreStability::stable : QreStability::unstable;
  return result;
}

struct NashLimitReport {
  int qre_count = 0;
  int nash_count = 0;
  bool cardinality_mismatch = false;
  bool degenerate = false;  // some agent is fully indifferent
  double max_distance = 0.0;
  std::vector<std::pair<int, int>> matching;  // (qre index, nash index)
};

// Matches the QRE fixed points at a large beta against a known Nash
// set by greedy nearest pairing in strategy space (max norm).
inline NashLimitReport nash_limit_check(const BimatrixGame& game, double beta_max,
                                        const std::vector<MixedStrategyProfile>& nash_set) {
  NashLimitReport report;
  report.degenerate = G22Form::from(game).degenerate();
  const auto qre = solve_qre_fixed_points(game, LogitParams{{beta_max, beta_max}});
  report.qre_count = static_cast<int>(qre.size());
  report.nash_count = static_cast<int>(nash_set.size());
  report.cardinality_mismatch = report.qre_count != report.nash_count;

  const auto dist = [](const MixedStrategyProfile& a, const MixedStrategyProfile& b) {
    double d = 0.0;
    for (int i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < a.distributions[i].size(); ++j)
        d = std::max(d, std::abs(a.distributions[i][j] - b.distributions[i][j]));
    return d;
  };

  std::vector<bool> used(nash_set.size(), false);
  for (int qi = 0; qi < report.qre_count; ++qi) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int ni = 0; ni < report.nash_count; ++ni) {
      if (used[ni]) continue;
      const double d = dist(qre[qi].profile, nash_set[ni]);
      if (d < best_d) {
        best_d = d;
        best = ni;
      }
    }
    if (best < 0) break;
    used[best] = true;
    report.matching.emplace_back(qi, best);
    report.max_distance = std::max(report.max_distance, best_d);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Closed-form Jacobian terms of the response maps Q_i = f_i(Q_{-i}, beta_i)
// and the derivative matrix of the implicitly-defined Q(beta).
// ---------------------------------------------------------------------------

struct JacobianTerms {
  double f1_1 = 0.0;  // d f_1 / d Q_2
  double f2_1 = 0.0;  // d f_1 / d beta_1
  double f1_2 = 0.0;  // d f_2 / d Q_1
  double f2_2 = 0.0;  // d f_2 / d beta_2
  double denom = 0.0;  // f1_1 * f1_2 - 1; zero exactly on the critical set
  bool singular = false;
  // dQ/dbeta entries, row-major (dQ1/db1, dQ1/db2, dQ2/db1, dQ2/db2);
  // meaningful only when !singular.
  std::array<double, 4> J{0.0, 0.0, 0.0, 0.0};
};

inline JacobianTerms jacobian_terms(const BimatrixGame& game, const QCoordinates& q,
                                    const LogitParams& params) {
  params.validate(2);
  if (std::abs(q.Q1) >= 1.0 || std::abs(q.Q2) >= 1.0)
    throw std::invalid_argument("jacobian_terms: Q must be interior to (-1,1)^2");
  const G22Form f = G22Form::from(game);
  const double b1 = params.betas[0], b2 = params.betas[1];

  const double t1 = std::tanh(0.5 * b1 * f.delta1_q(q.Q2));
  const double t2 = std::tanh(0.5 * b2 * f.delta2_q(q.Q1));
  JacobianTerms jt;
  jt.f1_1 = (1.0 - t1 * t1) * 0.5 * b1 * f.d1;
  jt.f2_1 = (1.0 - t1 * t1) * 0.5 * f.delta1_q(q.Q2);
  jt.f1_2 = (1.0 - t2 * t2) * 0.5 * b2 * f.d2;
  jt.f2_2 = (1.0 - t2 * t2) * 0.5 * f.delta2_q(q.Q1);
  jt.denom = jt.f1_1 * jt.f1_2 - 1.0;
  jt.singular = std::abs(jt.denom) < 1e-12;
  if (!jt.singular) {
    jt.J[0] = -jt.f2_1 / jt.denom;           // dQ1/dbeta1
    jt.J[1] = -jt.f1_1 * jt.f2_2 / jt.denom;  // dQ1/dbeta2
    jt.J[2] = -jt.f1_2 * jt.f2_1 / jt.denom;  // dQ2/dbeta1
    jt.J[3] = -jt.f2_2 / jt.denom;            // dQ2/dbeta2
  }
  return jt;
}

struct BetaInversion {
  enum class Status { ok, off_surface, indeterminate };
  Status status = Status::ok;
  LogitParams betas;
  double forward_residual = 0.0;  // max_i |tanh(beta_i Delta_i / 2) - Q_i|
};

// Solves Q_i = tanh(beta_i Delta_i(Q_{-i}) / 2) for beta, i.e.
// beta_i = 2 artanh(Q_i) / Delta_i. Points needing a negative beta are
// not on the admissible surface.
inline BetaInversion invert_beta_on_surface(const BimatrixGame& game, const QCoordinates& q) {
  if (std::abs(q.Q1) >= 1.0 || std::abs(q.Q2) >= 1.0)
    throw std::invalid_argument("invert_beta_on_surface: Q must be interior to (-1,1)^2");
  const G22Form f = G22Form::from(game);
  BetaInversion inv;
  inv.betas.betas.assign(2, 0.0);

  const double delta[2] = {f.delta1_q(q.Q2), f.delta2_q(q.Q1)};
  const double qq[2] = {q.Q1, q.Q2};
  for (int i = 0; i < 2; ++i) {
    if (delta[i] == 0.0) {
      inv.status = qq[i] == 0.0 ? BetaInversion::Status::indeterminate
                                : BetaInversion::Status::off_surface;
      return inv;
    }
    const double beta = 2.0 * std::atanh(qq[i]) / delta[i];
    if (beta < 0.0 || !std::isfinite(beta)) {
      inv.status = BetaInversion::Status::off_surface;
      return inv;
    }
    inv.betas.betas[i] = beta;
  }
  inv.forward_residual =
      std::max(std::abs(std::tanh(0.5 * inv.betas.betas[0] * delta[0]) - q.Q1),
               std::abs(std::tanh(0.5 * inv.betas.betas[1] * delta[1]) - q.Q2));
  return inv;
}

// Residual of the fixed-point (surface) equations at (Q, beta).
inline double qre_surface_residual(const BimatrixGame& game, const QCoordinates& q,
                                   const LogitParams& params) {
  const G22Form f = G22Form::from(game);
  return std::max(std::abs(std::tanh(0.5 * params.betas[0] * f.delta1_q(q.Q2)) - q.Q1),
                  std::abs(std::tanh(0.5 * params.betas[1] * f.delta2_q(q.Q1)) - q.Q2));
}

// ---------------------------------------------------------------------------
// Critical set: zero level of c(Q) = f1_1 * f1_2 - 1 restricted to the
// admissible surface (beta recovered from Q), traced by marching
// squares with bisection refinement along grid edges.
// ---------------------------------------------------------------------------

struct CriticalPoint {
  double Q1 = 0.0, Q2 = 0.0;
  double beta1 = 0.0, beta2 = 0.0;
};

enum class CurveClosure { open_arc, closed_loop };

struct CriticalCurve {
  std::vector<CriticalPoint> points;
  CurveClosure closure = CurveClosure::open_arc;
};

namespace detail {

// c(Q) on the admissible surface; nullopt when Q is inadmissible.
inline std::optional<double> critical_value(const BimatrixGame& game, const G22Form& f,
                                            double Q1, double Q2) {
  const auto inv = invert_beta_on_surface(game, {Q1, Q2});
  if (inv.status != BetaInversion::Status::ok) return std::nullopt;
  const double t1sq = Q1 * Q1;  // on-surface tanh equals Q itself
  const double t2sq = Q2 * Q2;
  const double f11 = (1.0 - t1sq) * 0.5 * inv.betas.betas[0] * f.d1;
  const double f12 = (1.0 - t2sq) * 0.5 * inv.betas.betas[1] * f.d2;
  return f11 * f12 - 1.0;
}

struct EdgeCrossing {
  double Q1 = 0.0, Q2 = 0.0;
  bool valid = false;
};

// Bisection along the straight edge between two admissible nodes with
// opposite signs of c; rejects pole crossings (sign flips where |c|
// stays large).
inline EdgeCrossing refine_edge(const BimatrixGame& game, const G22Form& f, double aq1,
                                double aq2, double ca, double bq1, double bq2,
                                double tol = 1e-8) {
  EdgeCrossing out;
  double lo = 0.0, hi = 1.0, clo = ca;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto cm = critical_value(game, f, aq1 + (bq1 - aq1) * mid, aq2 + (bq2 - aq2) * mid);
    if (!cm) return out;  // admissibility boundary inside the edge
    if (*cm == 0.0) {
      lo = hi = mid;
      break;
    }
    if (std::signbit(*cm) == std::signbit(clo)) {
      lo = mid;
      clo = *cm;
    } else {
      hi = mid;
    }
  }
  const double t = 0.5 * (lo + hi);
  out.Q1 = aq1 + (bq1 - aq1) * t;
  out.Q2 = aq2 + (bq2 - aq2) * t;
  const auto cv = critical_value(game, f, out.Q1, out.Q2);
  out.valid = cv && std::abs(*cv) <= tol;
  return out;
}

}  // namespace detail

inline std::vector<CriticalCurve> trace_critical_set(const BimatrixGame& game, int resolution,
                                                     double tol = 1e-8) {
  if (resolution < 64) throw std::invalid_argument("trace_critical_set: resolution >= 64");
  const G22Form f = G22Form::from(game);

  // Interior nodes of (-1, 1)^2.
  std::vector<double> nodes(resolution);
  for (int k = 0; k < resolution; ++k)
    nodes[k] = -1.0 + 2.0 * (k + 1) / static_cast<double>(resolution + 1);

  const auto node_value = [&](int ix, int iy) {
    return detail::critical_value(game, f, nodes[ix], nodes[iy]);
  };
  std::vector<std::optional<double>> values(static_cast<std::size_t>(resolution) * resolution);
  for (int ix = 0; ix < resolution; ++ix)
    for (int iy = 0; iy < resolution; ++iy)
      values[static_cast<std::size_t>(ix) * resolution + iy] = node_value(ix, iy);
  const auto val = [&](int ix, int iy) -> const std::optional<double>& {
    return values[static_cast<std::size_t>(ix) * resolution + iy];
  };

  // Edge ids: horizontal edge (ix, iy) joins nodes (ix, iy)-(ix+1, iy);
  // vertical edge joins (ix, iy)-(ix, iy+1).
  const auto h_edge = [&](int ix, int iy) { return 2 * (ix * resolution + iy); };
  const auto v_edge = [&](int ix, int iy) { return 2 * (ix * resolution + iy) + 1; };

  std::map<int, detail::EdgeCrossing> crossings;
  const auto edge_crossing = [&](int id, int ax, int ay, int bx, int by)
      -> const detail::EdgeCrossing* {
    const auto it = crossings.find(id);
    if (it != crossings.end()) return it->second.valid ? &it->second : nullptr;
    detail::EdgeCrossing cr;
    const auto& ca = val(ax, ay);
    const auto& cb = val(bx, by);
    if (ca && cb && *ca != 0.0 && *cb != 0.0 && std::signbit(*ca) != std::signbit(*cb))
      cr = detail::refine_edge(game, f, nodes[ax], nodes[ay], *ca, nodes[bx], nodes[by], tol);
    const auto ins = crossings.emplace(id, cr);
    return ins.first->second.valid ? &ins.first->second : nullptr;
  };

  // Segments connect crossing points on cell edges.
  std::vector<std::pair<int, int>> segments;
  for (int ix = 0; ix + 1 < resolution; ++ix) {
    for (int iy = 0; iy + 1 < resolution; ++iy) {
      const auto& c00 = val(ix, iy);
      const auto& c10 = val(ix + 1, iy);
      const auto& c01 = val(ix, iy + 1);
      const auto& c11 = val(ix + 1, iy + 1);
      if (!c00 || !c10 || !c01 || !c11) continue;

      struct Hit {
        int edge_id;
        const detail::EdgeCrossing* cr;
      };
      std::vector<Hit> hits;
      if (const auto* cr = edge_crossing(h_edge(ix, iy), ix, iy, ix + 1, iy))
        hits.push_back({h_edge(ix, iy), cr});
      if (const auto* cr = edge_crossing(v_edge(ix + 1, iy), ix + 1, iy, ix + 1, iy + 1))
        hits.push_back({v_edge(ix + 1, iy), cr});
      if (const auto* cr = edge_crossing(h_edge(ix, iy + 1), ix, iy + 1, ix + 1, iy + 1))
        hits.push_back({h_edge(ix, iy + 1), cr});
      if (const auto* cr = edge_crossing(v_edge(ix, iy), ix, iy, ix, iy + 1))
        hits.push_back({v_edge(ix, iy), cr});

      if (hits.size() == 2) {
        segments.emplace_back(hits[0].edge_id, hits[1].edge_id);
      } else if (hits.size() == 4) {
        // Saddle cell: use the centre sign to pick the pairing.
        const auto cc =
            detail::critical_value(game, f, 0.5 * (nodes[ix] + nodes[ix + 1]),
                                   0.5 * (nodes[iy] + nodes[iy + 1]));
        const bool centre_pos = cc && *cc > 0.0;
        const bool corner_pos = *c00 > 0.0;
        if (centre_pos == corner_pos) {
          segments.emplace_back(hits[0].edge_id, hits[1].edge_id);
          segments.emplace_back(hits[2].edge_id, hits[3].edge_id);
        } else {
          segments.emplace_back(hits[0].edge_id, hits[3].edge_id);
          segments.emplace_back(hits[1].edge_id, hits[2].edge_id);
        }
      }
    }
  }

  // Chain segments into polylines.
  std::map<int, std::vector<std::size_t>> by_edge;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    by_edge[segments[s].first].push_back(s);
    by_edge[segments[s].second].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<CriticalCurve> curves;

  const auto walk = [&](std::size_t seed_seg, int start_edge) {
    CriticalCurve curve;
    int edge = start_edge;
    std::size_t seg = seed_seg;
    std::vector<int> edge_chain{edge};
    while (true) {
      used[seg] = true;
      edge = segments[seg].first == edge ? segments[seg].second : segments[seg].first;
      edge_chain.push_back(edge);
      std::size_t next = segments.size();
      for (std::size_t cand : by_edge[edge])
        if (!used[cand]) {
          next = cand;
          break;
        }
      if (next == segments.size()) break;
      seg = next;
    }
    curve.closure = edge_chain.front() == edge_chain.back() && edge_chain.size() > 2
                        ? CurveClosure::closed_loop
                        : CurveClosure::open_arc;
    for (int e : edge_chain) {
      const auto& cr = crossings.at(e);
      const auto inv = invert_beta_on_surface(game, {cr.Q1, cr.Q2});
      if (inv.status != BetaInversion::Status::ok) continue;
      curve.points.push_back({cr.Q1, cr.Q2, inv.betas.betas[0], inv.betas.betas[1]});
    }
    return curve;
  };

  // Open arcs first (edges of degree 1), then remaining loops.
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (used[s]) continue;
    const int a = segments[s].first, b = segments[s].second;
    int start = -1;
    if (by_edge[a].size() == 1)
      start = a;
    else if (by_edge[b].size() == 1)
      start = b;
    if (start >= 0) curves.push_back(walk(s, start));
  }
  for (std::size_t s = 0; s < segments.size(); ++s)
    if (!used[s]) curves.push_back(walk(s, segments[s].first));

  curves.erase(std::remove_if(curves.begin(), curves.end(),
                              [](const CriticalCurve& c) { return c.points.size() < 2; }),
               curves.end());
  return curves;
}

struct BetaPolyline {
  std::vector<std::pair<double, double>> points;
};

// Projection of the critical curves onto the (beta1, beta2) control
// plane, clipped to [0, beta_max]^2. Polylines split where they leave
// the clip box.
inline std::vector<BetaPolyline> branch_locus(const std::vector<CriticalCurve>& curves,
                                              double beta_max = 50.0) {
  std::vector<BetaPolyline> out;
  for (const auto& curve : curves) {
    BetaPolyline current;
    for (const auto& pt : curve.points) {
      const bool inside =
          pt.beta1 >= 0.0 && pt.beta1 <= beta_max && pt.beta2 >= 0.0 && pt.beta2 <= beta_max;
      if (inside) {
        current.points.emplace_back(pt.beta1, pt.beta2);
      } else if (!current.points.empty()) {
        out.push_back(std::move(current));
        current = {};
      }
    }
    if (!current.points.empty()) out.push_back(std::move(current));
  }
  return out;
}

struct RegionCell {
  double beta1 = 0.0, beta2 = 0.0;
  int count = 0;
  std::vector<QreFixedPoint> points;
};

inline std::vector<RegionCell> count_fixed_points_region(const BimatrixGame& game,
                                                         const std::vector<double>& beta1_values,
                                                         const std::vector<double>& beta2_values) {
  std::vector<RegionCell> cells;
  cells.reserve(beta1_values.size() * beta2_values.size());
  for (double b1 : beta1_values)
    for (double b2 : beta2_values) {
      RegionCell cell;
      cell.beta1 = b1;
      cell.beta2 = b2;
      cell.points = solve_qre_fixed_points(game, LogitParams{{b1, b2}});
      cell.count = static_cast<int>(cell.points.size());
      cells.push_back(std::move(cell));
    }
  return cells;
}

// ---------------------------------------------------------------------------
// Heaviside best-response map: the sharp-response limit whose fixed
// points are exactly the Nash equilibria.
// ---------------------------------------------------------------------------

inline double heaviside(double X, double tie_value) {
  if (X > 0.0) return 1.0;
  if (X < 0.0) return 0.0;
  return tie_value;
}

// One application of Psi(x, y) = (H(dq1(y), x), H(dq2(x), y)); ties keep
// the current coordinate, so indifferent agents stay put.
inline std::pair<double, double> heaviside_best_response_map(const BimatrixGame& game, double x,
                                                             double y) {
  if (x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0)
    throw std::invalid_argument("heaviside_best_response_map: (x, y) must lie in [0,1]^2");
  const G22Form f = G22Form::from(game);
  return {heaviside(f.dq1(y), x), heaviside(f.dq2(x), y)};
}

struct HeavisideFixedPoints {
  std::vector<std::pair<double, double>> points;
  bool degenerate = false;  // an agent is indifferent on a continuum
};

inline HeavisideFixedPoints heaviside_fixed_points(const BimatrixGame& game) {
  const G22Form f = G22Form::from(game);
  HeavisideFixedPoints out;
  out.degenerate = f.degenerate();

  for (double x : {0.0, 1.0})
    for (double y : {0.0, 1.0}) {
      const auto [nx, ny] = heaviside_best_response_map(game, x, y);
      if (nx == x && ny == y) out.points.emplace_back(x, y);
    }

  // Interior point: both payoff differences vanish.
  const double slope1 = f.dq1(1.0) - f.dq1(0.0);
  const double slope2 = f.dq2(1.0) - f.dq2(0.0);
  if (slope1 != 0.0 && slope2 != 0.0) {
    const double y_star = -f.dq1(0.0) / slope1;
    const double x_star = -f.dq2(0.0) / slope2;
    if (x_star > 0.0 && x_star < 1.0 && y_star > 0.0 && y_star < 1.0)
      out.points.emplace_back(x_star, y_star);
  } else if ((slope1 == 0.0 && f.dq1(0.0) == 0.0) || (slope2 == 0.0 && f.dq2(0.0) == 0.0)) {
    out.degenerate = true;
  }
  return out;
}

}  // namespace sg
