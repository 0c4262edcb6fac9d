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
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sg {

// Probability vectors must sum to 1 within this tolerance.
inline constexpr double kProfileSumTol = 1e-12;
// Absolute tolerance for payoff ties in best-response sets.
inline constexpr double kBestResponseTol = 1e-9;

struct DimensionError : std::invalid_argument {
  DimensionError(const std::string& what, int agent_index)
      : std::invalid_argument(what), agent(agent_index) {}
  int agent;
};

// Dense row-major matrix of doubles. All games in scope are tiny.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("Matrix: non-positive shape");
  }
  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    if (rows_ == 0 || cols_ == 0) throw std::invalid_argument("Matrix: empty initializer");
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != cols_)
        throw std::invalid_argument("Matrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const std::vector<double>& data() const { return data_; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double min_entry() const { return *std::min_element(data_.begin(), data_.end()); }
  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }
  bool all_positive() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return v > 0.0; });
  }

  Matrix shifted(double c) const {
    Matrix s = *this;
    for (double& v : s.data_) v += c;
    return s;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

struct BimatrixGame;

// Finite n-agent game in normal form. Payoffs are stored as a dense
// row-major tensor over joint pure choices, agent 1's choice outermost,
// with an n-vector of agent payoffs at each cell.
struct NormalFormGame {
  std::vector<int> choice_counts;
  std::vector<double> payoffs;  // flattened: joint_index * n + agent

  int num_agents() const { return static_cast<int>(choice_counts.size()); }

  std::size_t joint_count() const {
    std::size_t c = 1;
    for (int k : choice_counts) c *= static_cast<std::size_t>(k);
    return c;
  }

  void validate() const {
    const int n = num_agents();
    if (n < 2) throw std::invalid_argument("NormalFormGame: need at least 2 agents");
    for (int i = 0; i < n; ++i) {
      if (choice_counts[i] < 2)
        throw DimensionError("NormalFormGame: agent " + std::to_string(i + 1) +
                                 " needs at least 2 choices",
                             i);
    }
    if (payoffs.size() != joint_count() * static_cast<std::size_t>(n))
      throw std::invalid_argument("NormalFormGame: payoff tensor has wrong size");
    for (double v : payoffs) {
      if (!std::isfinite(v)) throw std::invalid_argument("NormalFormGame: non-finite payoff");
    }
  }

  std::size_t joint_index(const std::vector<int>& choice) const {
    std::size_t idx = 0;
    for (int i = 0; i < num_agents(); ++i) idx = idx * choice_counts[i] + choice[i];
    return idx;
  }

  double payoff(const std::vector<int>& choice, int agent) const {
    return payoffs[joint_index(choice) * num_agents() + agent];
  }

  static NormalFormGame from_bimatrix(const BimatrixGame& g);
  BimatrixGame to_bimatrix() const;
};

// Two-agent game given by the row agent's matrix A and the column
// agent's matrix B, both l x m.
struct BimatrixGame {
  Matrix A, B;

  int rows() const { return A.rows(); }
  int cols() const { return A.cols(); }

  void validate() const {
    if (A.rows() != B.rows() || A.cols() != B.cols())
      throw std::invalid_argument("BimatrixGame: A and B shapes differ");
    if (!A.all_finite() || !B.all_finite())
      throw std::invalid_argument("BimatrixGame: non-finite payoff");
  }

  NormalFormGame to_normal_form() const { return NormalFormGame::from_bimatrix(*this); }
};

inline NormalFormGame NormalFormGame::from_bimatrix(const BimatrixGame& g) {
  g.validate();
  NormalFormGame nf;
  nf.choice_counts = {g.rows(), g.cols()};
  nf.payoffs.resize(static_cast<std::size_t>(g.rows()) * g.cols() * 2);
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) {
      const std::size_t cell = (static_cast<std::size_t>(i) * g.cols() + j) * 2;
      nf.payoffs[cell] = g.A(i, j);
      nf.payoffs[cell + 1] = g.B(i, j);
    }
  return nf;
}

inline BimatrixGame NormalFormGame::to_bimatrix() const {
  if (num_agents() != 2)
    throw std::invalid_argument("to_bimatrix: game does not have exactly 2 agents");
  const int l = choice_counts[0], m = choice_counts[1];
  BimatrixGame g{Matrix(l, m), Matrix(l, m)};
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < m; ++j) {
      const std::size_t cell = (static_cast<std::size_t>(i) * m + j) * 2;
      g.A(i, j) = payoffs[cell];
      g.B(i, j) = payoffs[cell + 1];
    }
  return g;
}

// One probability vector per agent.
struct MixedStrategyProfile {
  std::vector<std::vector<double>> distributions;

  int num_agents() const { return static_cast<int>(distributions.size()); }

  void validate() const {
    for (int i = 0; i < num_agents(); ++i) {
      double s = 0.0;
      for (double p : distributions[i]) {
        if (!(p >= 0.0) || !std::isfinite(p))
          throw DimensionError(
              "MixedStrategyProfile: negative or non-finite probability for agent " +
                  std::to_string(i + 1),
              i);
        s += p;
      }
      if (std::abs(s - 1.0) > kProfileSumTol)
        throw DimensionError("MixedStrategyProfile: agent " + std::to_string(i + 1) +
                                 " distribution sums to " + std::to_string(s),
                             i);
    }
  }

  void validate_against(const NormalFormGame& game) const {
    if (num_agents() != game.num_agents())
      throw DimensionError("profile has " + std::to_string(num_agents()) + " agents, game has " +
                               std::to_string(game.num_agents()),
                           std::min(num_agents(), game.num_agents()));
    for (int i = 0; i < num_agents(); ++i) {
      if (static_cast<int>(distributions[i].size()) != game.choice_counts[i])
        throw DimensionError("profile for agent " + std::to_string(i + 1) + " has " +
                                 std::to_string(distributions[i].size()) + " entries, expected " +
                                 std::to_string(game.choice_counts[i]),
                             i);
    }
    validate();
  }

  bool is_pure(double tol = 0.0) const {
    for (const auto& d : distributions)
      for (double p : d)
        if (std::min(std::abs(p), std::abs(p - 1.0)) > tol) return false;
    return true;
  }

  static MixedStrategyProfile pure(const NormalFormGame& game, const std::vector<int>& choice) {
    MixedStrategyProfile pr;
    pr.distributions.resize(game.num_agents());
    for (int i = 0; i < game.num_agents(); ++i) {
      pr.distributions[i].assign(game.choice_counts[i], 0.0);
      pr.distributions[i][choice[i]] = 1.0;
    }
    return pr;
  }

  static MixedStrategyProfile uniform(const NormalFormGame& game) {
    MixedStrategyProfile pr;
    pr.distributions.resize(game.num_agents());
    for (int i = 0; i < game.num_agents(); ++i)
      pr.distributions[i].assign(game.choice_counts[i], 1.0 / game.choice_counts[i]);
    return pr;
  }
};

enum class EquilibriumKind { pure, mixed };

struct EquilibriumPoint {
  MixedStrategyProfile profile;
  std::vector<double> payoffs;
  EquilibriumKind kind = EquilibriumKind::mixed;
  double epsilon = 0.0;  // largest unilateral-deviation gain seen by the verifier
};

// Symmetric 2x2 family with R = 1, P = 0 fixed; rows are
// (first choice, second choice) = (cooperate, defect).
struct TSFamilyPoint {
  double T = 0.0;
  double S = 0.0;
};

inline BimatrixGame ts_family_game(const TSFamilyPoint& p) {
  Matrix A{{1.0, p.S}, {p.T, 0.0}};
  return BimatrixGame{A, A.transposed()};
}

namespace detail {

// Iterates joint pure choices with one agent's choice pinned (or none).
template <typename F>
void for_each_joint_choice(const NormalFormGame& game, int pinned_agent, int pinned_choice,
                           F&& visit) {
  const int n = game.num_agents();
  std::vector<int> choice(n, 0);
  if (pinned_agent >= 0) choice[pinned_agent] = pinned_choice;
  while (true) {
    visit(choice);
    int i = n - 1;
    for (; i >= 0; --i) {
      if (i == pinned_agent) continue;
      if (++choice[i] < game.choice_counts[i]) break;
      choice[i] = 0;
    }
    if (i < 0) break;
  }
}

}  // namespace detail

// Multilinear expected payoff, one value per agent.
inline std::vector<double> expected_payoff(const NormalFormGame& game,
                                           const MixedStrategyProfile& profile) {
  profile.validate_against(game);
  const int n = game.num_agents();
  std::vector<double> result(n, 0.0);
  detail::for_each_joint_choice(game, -1, -1, [&](const std::vector<int>& choice) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) w *= profile.distributions[i][choice[i]];
    if (w == 0.0) return;
    const std::size_t base = game.joint_index(choice) * n;
    for (int i = 0; i < n; ++i) result[i] += w * game.payoffs[base + i];
  });
  return result;
}

// Expected payoff to `agent` conditional on each of its pure choices,
// with the remaining agents playing `others`. Entry j is the payoff
// when the agent commits to choice j. The agent's own entry in
// `others` is ignored.
inline std::vector<double> conditional_payoff(const NormalFormGame& game, int agent,
                                              const MixedStrategyProfile& others) {
  others.validate_against(game);
  if (agent < 0 || agent >= game.num_agents())
    throw DimensionError("conditional_payoff: agent index out of range", agent);
  const int n = game.num_agents();
  std::vector<double> result(game.choice_counts[agent], 0.0);
  for (int j = 0; j < game.choice_counts[agent]; ++j) {
    double total = 0.0;
    detail::for_each_joint_choice(game, agent, j, [&](const std::vector<int>& choice) {
      double w = 1.0;
      for (int i = 0; i < n; ++i) {
        if (i == agent) continue;
        w *= others.distributions[i][choice[i]];
      }
      if (w == 0.0) return;
      total += w * game.payoff(choice, agent);
    });
    result[j] = total;
  }
  return result;
}

// Argmax set of conditional payoffs; everything within `tol` of the
// maximum counts as tied.
inline std::vector<int> best_response_set(const NormalFormGame& game, int agent,
                                          const MixedStrategyProfile& others,
                                          double tol = kBestResponseTol) {
  const std::vector<double> cond = conditional_payoff(game, agent, others);
  const double mx = *std::max_element(cond.begin(), cond.end());
  std::vector<int> best;
  for (int j = 0; j < static_cast<int>(cond.size()); ++j)
    if (cond[j] >= mx - tol) best.push_back(j);
  return best;
}

struct NashCheck {
  bool accepted = false;
  EquilibriumPoint point;  // filled when accepted
  // Witness when rejected: `agent` gains `gain` by moving probability
  // from `supported_choice` to `better_choice`.
  int agent = -1;
  int supported_choice = -1;
  int better_choice = -1;
  double gain = 0.0;
};

// Support characterization: accept iff every pure strategy played with
// positive probability attains the agent's best conditional payoff
// within tol.
inline NashCheck is_nash(const NormalFormGame& game, const MixedStrategyProfile& profile,
                         double tol) {
  profile.validate_against(game);
  NashCheck check;
  double worst_gain = 0.0;
  for (int i = 0; i < game.num_agents(); ++i) {
    const std::vector<double> cond = conditional_payoff(game, i, profile);
    const int best =
        static_cast<int>(std::max_element(cond.begin(), cond.end()) - cond.begin());
    for (int j = 0; j < game.choice_counts[i]; ++j) {
      if (profile.distributions[i][j] <= 0.0) continue;
      const double gain = cond[best] - cond[j];
      worst_gain = std::max(worst_gain, gain);
      if (gain > tol && gain > check.gain) {
        check.agent = i;
        check.supported_choice = j;
        check.better_choice = best;
        check.gain = gain;
      }
    }
  }
  if (check.agent >= 0) return check;
  check.accepted = true;
  check.point.profile = profile;
  check.point.payoffs = expected_payoff(game, profile);
  check.point.kind = profile.is_pure() ? EquilibriumKind::pure : EquilibriumKind::mixed;
  check.point.epsilon = worst_gain;
  return check;
}

inline NashCheck is_nash(const BimatrixGame& game, const MixedStrategyProfile& profile,
                         double tol) {
  return is_nash(game.to_normal_form(), profile, tol);
}

// Shifts all payoffs by 1 - min(entries) when any entry is <= 0, so that
// everything ends up >= 1. Equilibria are unchanged by a common shift.
inline BimatrixGame positivize(const BimatrixGame& game) {
  game.validate();
  const double mn = std::min(game.A.min_entry(), game.B.min_entry());
  if (mn > 0.0) return game;
  const double c = 1.0 - mn;
  return BimatrixGame{game.A.shifted(c), game.B.shifted(c)};
}

namespace detail {

// Relations characterizing normalized equilibria of a positive game:
// u^T B <= 1, A v <= 1, both nonnegative, with equality on supports.
inline void check_uv_relations(const BimatrixGame& game, const std::vector<double>& u,
                               const std::vector<double>& v, double tol, const char* who) {
  for (double ui : u)
    if (ui < -tol) throw std::invalid_argument(std::string(who) + ": u has negative entries");
  for (double vj : v)
    if (vj < -tol) throw std::invalid_argument(std::string(who) + ": v has negative entries");
  for (int j = 0; j < game.cols(); ++j) {
    double ub = 0.0;
    for (int i = 0; i < game.rows(); ++i) ub += u[i] * game.B(i, j);
    if (ub > 1.0 + tol || (v[j] > tol && std::abs(ub - 1.0) > tol))
      throw std::invalid_argument(std::string(who) + ": (u^T B)_" + std::to_string(j + 1) +
                                  " violates the equilibrium relations");
  }
  for (int i = 0; i < game.rows(); ++i) {
    double av = 0.0;
    for (int j = 0; j < game.cols(); ++j) av += game.A(i, j) * v[j];
    if (av > 1.0 + tol || (u[i] > tol && std::abs(av - 1.0) > tol))
      throw std::invalid_argument(std::string(who) + ": (A v)_" + std::to_string(i + 1) +
                                  " violates the equilibrium relations");
  }
}

}  // namespace detail

// The normalization bijection for positive games:
// u_i = x_i / (x^T B y), v_j = y_j / (x^T A y).
inline std::pair<std::vector<double>, std::vector<double>> nash_to_uv(
    const BimatrixGame& game, const EquilibriumPoint& eq, double tol = 1e-7) {
  if (!game.A.all_positive() || !game.B.all_positive())
    throw std::invalid_argument("nash_to_uv: game must be strictly positive; call positivize");
  const auto& x = eq.profile.distributions[0];
  const auto& y = eq.profile.distributions[1];
  double xAy = 0.0, xBy = 0.0;
  for (int i = 0; i < game.rows(); ++i)
    for (int j = 0; j < game.cols(); ++j) {
      xAy += x[i] * game.A(i, j) * y[j];
      xBy += x[i] * game.B(i, j) * y[j];
    }
  std::vector<double> u(x.size()), v(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = x[i] / xBy;
  for (std::size_t j = 0; j < y.size(); ++j) v[j] = y[j] / xAy;
  detail::check_uv_relations(game, u, v, tol, "nash_to_uv");
  return {u, v};
}

inline EquilibriumPoint uv_to_nash(const BimatrixGame& game, const std::vector<double>& u,
                                   const std::vector<double>& v, double tol = 1e-7) {
  const double su = std::accumulate(u.begin(), u.end(), 0.0);
  const double sv = std::accumulate(v.begin(), v.end(), 0.0);
  if (su <= 0.0 || sv <= 0.0)
    throw std::invalid_argument("uv_to_nash: artificial equilibrium has no strategy image");
  detail::check_uv_relations(game, u, v, tol, "uv_to_nash");
  MixedStrategyProfile pr;
  pr.distributions.resize(2);
  pr.distributions[0].resize(u.size());
  pr.distributions[1].resize(v.size());
  for (std::size_t i = 0; i < u.size(); ++i) pr.distributions[0][i] = u[i] / su;
  for (std::size_t j = 0; j < v.size(); ++j) pr.distributions[1][j] = v[j] / sv;
  EquilibriumPoint eq;
  eq.profile = pr;
  eq.payoffs = expected_payoff(game.to_normal_form(), pr);
  eq.kind = pr.is_pure(1e-12) ? EquilibriumKind::pure : EquilibriumKind::mixed;
  eq.epsilon = 0.0;
  return eq;
}

// V(p) = 1/2 sum_{i,j} a_{ij} p_i p_j for a square matrix over one
// strategy distribution.
inline double game_potential(const Matrix& A, const std::vector<double>& p) {
  if (A.rows() != A.cols()) throw std::invalid_argument("game_potential: matrix must be square");
  if (static_cast<int>(p.size()) != A.rows())
    throw DimensionError("game_potential: p has wrong length", 0);
  double v = 0.0;
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) v += A(i, j) * p[i] * p[j];
  return 0.5 * v;
}

struct PotentialCheck {
  bool holds = true;
  std::array<int, 3> worst_triple{-1, -1, -1};
  double worst_violation = 0.0;
};

// Triple condition a_{ij} + a_{jk} + a_{ki} = a_{ik} + a_{kj} + a_{ji}.
// Triples with repeated indices satisfy it identically, so any matrix
// with fewer than 3 strategies passes.
inline PotentialCheck has_potential_condition(const Matrix& A, double tol) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("has_potential_condition: matrix must be square");
  PotentialCheck check;
  const int n = A.rows();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double lhs = A(i, j) + A(j, k) + A(k, i);
        const double rhs = A(i, k) + A(k, j) + A(j, i);
        const double viol = std::abs(lhs - rhs);
        if (viol > check.worst_violation) {
          check.worst_violation = viol;
          check.worst_triple = {i, j, k};
        }
      }
  check.holds = check.worst_violation <= tol;
  return check;
}

enum class TSRegion { prisoners_dilemma, stag_hunt, chicken, harmony, boundary };

inline TSRegion ts_region(const TSFamilyPoint& p, double tol = 1e-12) {
  if (std::abs(p.T - 1.0) <= tol || std::abs(p.S) <= tol) return TSRegion::boundary;
  if (p.T > 1.0 && p.S < 0.0) return TSRegion::prisoners_dilemma;
  if (p.T < 1.0 && p.S < 0.0) return TSRegion::stag_hunt;
  if (p.T > 1.0 && p.S > 0.0) return TSRegion::chicken;
  return TSRegion::harmony;
}

inline std::string ts_region_name(TSRegion r) {
  switch (r) {
    case TSRegion::prisoners_dilemma: return "Prisoner's Dilemma";
    case TSRegion::stag_hunt: return "Stag Hunt";
    case TSRegion::chicken: return "Chicken";
    case TSRegion::harmony: return "Harmony";
    case TSRegion::boundary: return "boundary";
  }
  return "unknown";
}

}  // namespace sg
