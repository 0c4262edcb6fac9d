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

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sg/game.hpp"
#include "sg/rational.hpp"

namespace sg {

// Exact-arithmetic copy of a bimatrix game. Floating-point payoffs are
// lifted through `scale` and rounded; integer payoffs survive exactly.
struct RationalBimatrix {
  int l = 0;
  int m = 0;
  RationalVector A, B;  // row-major l x m
  std::int64_t scale = 1;

  const Rational& a(int i, int j) const { return A[static_cast<std::size_t>(i) * m + j]; }
  const Rational& b(int i, int j) const { return B[static_cast<std::size_t>(i) * m + j]; }

  static RationalBimatrix from(const BimatrixGame& g, std::int64_t scale = 1'000'000) {
    g.validate();
    RationalBimatrix r;
    r.l = g.rows();
    r.m = g.cols();
    r.scale = scale;
    r.A.reserve(static_cast<std::size_t>(r.l) * r.m);
    r.B.reserve(static_cast<std::size_t>(r.l) * r.m);
    for (int i = 0; i < r.l; ++i)
      for (int j = 0; j < r.m; ++j) {
        r.A.push_back(rationalize(g.A(i, j), scale));
        r.B.push_back(rationalize(g.B(i, j), scale));
      }
    return r;
  }

  bool all_positive() const {
    for (const auto& v : A)
      if (v <= 0) return false;
    for (const auto& v : B)
      if (v <= 0) return false;
    return true;
  }

  Rational min_entry() const {
    Rational mn = A[0];
    for (const auto& v : A) mn = std::min(mn, v);
    for (const auto& v : B) mn = std::min(mn, v);
    return mn;
  }

  // Shift by 1 - min when any entry is <= 0; exact counterpart of positivize.
  RationalBimatrix positivized() const {
    const Rational mn = min_entry();
    if (mn > 0) return *this;
    RationalBimatrix r = *this;
    const Rational c = 1 - mn;
    for (auto& v : r.A) v += c;
    for (auto& v : r.B) v += c;
    return r;
  }
};

enum class Side { X, Y };

// Subset of the label set K = {1..l} u {l+1..l+m}.
struct LabelSet {
  std::uint32_t bits = 0;

  void add(int label) { bits |= (1u << (label - 1)); }
  bool contains(int label) const { return (bits >> (label - 1)) & 1u; }
  int count() const { return __builtin_popcount(bits); }
  std::vector<int> to_vector() const {
    std::vector<int> out;
    for (int lab = 1; lab <= 32; ++lab)
      if (contains(lab)) out.push_back(lab);
    return out;
  }
  friend LabelSet operator|(LabelSet a, LabelSet b) { return LabelSet{a.bits | b.bits}; }
  friend LabelSet operator&(LabelSet a, LabelSet b) { return LabelSet{a.bits & b.bits}; }
  friend bool operator==(LabelSet a, LabelSet b) { return a.bits == b.bits; }
};

inline LabelSet full_label_set(int l, int m) {
  LabelSet s;
  for (int lab = 1; lab <= l + m; ++lab) s.add(lab);
  return s;
}

struct InfeasibleVertexError : std::invalid_argument {
  InfeasibleVertexError(const std::string& what, std::string constraint_)
      : std::invalid_argument(what), constraint(std::move(constraint_)) {}
  std::string constraint;
};

// Shapley labels of a polytope point, computed exactly.
// X side: label i iff x_i = 0, label l+j iff (x^T B)_j = 1.
// Y side: label l+j iff y_j = 0, label i iff (A y)_i = 1.
inline LabelSet labels_of(const RationalVector& vertex, Side side, const RationalBimatrix& game) {
  LabelSet labels;
  const int l = game.l, m = game.m;
  if (side == Side::X) {
    if (static_cast<int>(vertex.size()) != l)
      throw std::invalid_argument("labels_of: X-side vertex must have length l");
    for (int i = 0; i < l; ++i) {
      if (vertex[i] < 0)
        throw InfeasibleVertexError("labels_of: vertex violates x_" + std::to_string(i + 1) +
                                        " >= 0",
                                    "x_" + std::to_string(i + 1) + " >= 0");
      if (vertex[i] == 0) labels.add(i + 1);
    }
    for (int j = 0; j < m; ++j) {
      Rational dot = 0;
      for (int i = 0; i < l; ++i) dot += vertex[i] * game.b(i, j);
      if (dot > 1)
        throw InfeasibleVertexError(
            "labels_of: vertex violates (x^T B)_" + std::to_string(j + 1) + " <= 1",
            "(x^T B)_" + std::to_string(j + 1) + " <= 1");
      if (dot == 1) labels.add(l + j + 1);
    }
  } else {
    if (static_cast<int>(vertex.size()) != m)
      throw std::invalid_argument("labels_of: Y-side vertex must have length m");
    for (int j = 0; j < m; ++j) {
      if (vertex[j] < 0)
        throw InfeasibleVertexError("labels_of: vertex violates y_" + std::to_string(j + 1) +
                                        " >= 0",
                                    "y_" + std::to_string(j + 1) + " >= 0");
      if (vertex[j] == 0) labels.add(l + j + 1);
    }
    for (int i = 0; i < l; ++i) {
      Rational dot = 0;
      for (int j = 0; j < m; ++j) dot += game.a(i, j) * vertex[j];
      if (dot > 1)
        throw InfeasibleVertexError(
            "labels_of: vertex violates (A y)_" + std::to_string(i + 1) + " <= 1",
            "(A y)_" + std::to_string(i + 1) + " <= 1");
      if (dot == 1) labels.add(i + 1);
    }
  }
  return labels;
}

// Feasible dictionary for one of the polytopes
//   X = { x >= 0, x^T B <= 1 }   (m slack rows)
//   Y = { y >= 0, A y <= 1 }     (l slack rows)
// kept in exact rational arithmetic. The leaving row of each pivot is
// chosen by the lexicographic minimum-ratio rule over (rhs, slack
// columns), which breaks degenerate ties deterministically and
// prevents cycling.
class LabelledTableau {
 public:
  LabelledTableau(const RationalBimatrix& game, Side side)
      : side_(side),
        n_struct_(side == Side::X ? game.l : game.m),
        n_slack_(side == Side::X ? game.m : game.l) {
    const int vars = n_struct_ + n_slack_;
    cols_ = vars + 1;  // rhs last
    M_.assign(static_cast<std::size_t>(n_slack_) * cols_, Rational(0));
    basis_.resize(n_slack_);
    var_row_.assign(vars, -1);
    labels_.resize(vars);
    label_var_.assign(vars + 1, -1);
    const int l = game.l;
    for (int v = 0; v < vars; ++v) {
      int label;
      if (side == Side::X) {
        label = v + 1;  // x_i -> i, r_j -> l+j
      } else {
        label = v < n_struct_ ? l + v + 1 : v - n_struct_ + 1;  // y_j -> l+j, s_i -> i
      }
      labels_[v] = label;
      label_var_[label] = v;
    }
    for (int r = 0; r < n_slack_; ++r) {
      for (int c = 0; c < n_struct_; ++c)
        at(r, c) = side == Side::X ? game.b(c, r) : game.a(r, c);
      at(r, n_struct_ + r) = 1;
      rhs(r) = 1;
      basis_[r] = n_struct_ + r;
      var_row_[n_struct_ + r] = r;
    }
  }

  Side side() const { return side_; }
  int num_vars() const { return n_struct_ + n_slack_; }
  const std::vector<int>& basis() const { return basis_; }
  bool degenerate_tie_seen() const { return degenerate_tie_; }

  int label_of_var(int v) const { return labels_[v]; }
  int var_of_label(int label) const { return label_var_[label]; }
  bool is_nonbasic(int v) const { return var_row_[v] < 0; }
  bool holds_label(int label) const { return is_nonbasic(label_var_[label]); }

  LabelSet held_labels() const {
    LabelSet s;
    for (int v = 0; v < num_vars(); ++v)
      if (is_nonbasic(v)) s.add(labels_[v]);
    return s;
  }

  // Values of the structural variables at the current basic solution.
  RationalVector vertex() const {
    RationalVector x(n_struct_, Rational(0));
    for (int v = 0; v < n_struct_; ++v)
      if (var_row_[v] >= 0) x[v] = rhs_const(var_row_[v]);
    return x;
  }

  // Brings `entering` into the basis; returns the leaving variable.
  // The leaving row minimizes the ratio rhs / coefficient; a tie there
  // marks a degenerate vertex and is resolved by comparing the slack
  // (initial-basis) columns lexicographically.
  int pivot_in(int entering) {
    if (!is_nonbasic(entering)) throw std::logic_error("pivot_in: variable already basic");
    int pivot_row = -1;
    int min_count = 0;
    for (int r = 0; r < n_slack_; ++r) {
      if (at(r, entering) <= 0) continue;
      if (pivot_row < 0) {
        pivot_row = r;
        min_count = 1;
        continue;
      }
      // Compare rhs_r / a_r with the current minimum by cross
      // multiplication (coefficients are positive).
      const Rational lhs = rhs_const(r) * at(pivot_row, entering);
      const Rational rhsv = rhs_const(pivot_row) * at(r, entering);
      if (lhs < rhsv) {
        pivot_row = r;
        min_count = 1;
      } else if (lhs == rhsv) {
        ++min_count;
        if (slack_ratio_compare(r, pivot_row, entering) < 0) pivot_row = r;
      }
    }
    if (pivot_row < 0)
      throw std::logic_error("pivot_in: no blocking row; polytope unbounded (game not positive?)");
    if (min_count > 1) degenerate_tie_ = true;

    const int leaving = basis_[pivot_row];
    const Rational piv = at(pivot_row, entering);
    for (int c = 0; c < cols_; ++c) at(pivot_row, c) /= piv;
    for (int r = 0; r < n_slack_; ++r) {
      if (r == pivot_row) continue;
      const Rational f = at(r, entering);
      if (f == 0) continue;
      for (int c = 0; c < cols_; ++c) at(r, c) -= f * at(pivot_row, c);
    }
    basis_[pivot_row] = entering;
    var_row_[entering] = pivot_row;
    var_row_[leaving] = -1;
    check_feasible();
    return leaving;
  }

  const std::vector<Rational>& matrix() const { return M_; }

 private:
  Rational& at(int r, int c) { return M_[static_cast<std::size_t>(r) * cols_ + c]; }
  const Rational& at(int r, int c) const { return M_[static_cast<std::size_t>(r) * cols_ + c]; }
  Rational& rhs(int r) { return M_[static_cast<std::size_t>(r) * cols_ + cols_ - 1]; }
  const Rational& rhs_const(int r) const {
    return M_[static_cast<std::size_t>(r) * cols_ + cols_ - 1];
  }

  // Tie-break for rows with equal rhs ratio: compare the initial-basis
  // (slack) columns, each divided by the entering coefficient. Those
  // columns hold the basis inverse, so no two rows can agree on all of
  // them.
  int slack_ratio_compare(int r1, int r2, int entering) const {
    const Rational& a1 = at(r1, entering);
    const Rational& a2 = at(r2, entering);
    for (int s = 0; s < n_slack_; ++s) {
      const int c = n_struct_ + s;
      const Rational lhs = at(r1, c) * a2;
      const Rational rhsv = at(r2, c) * a1;
      if (lhs < rhsv) return -1;
      if (lhs > rhsv) return 1;
    }
    throw std::logic_error("slack_ratio_compare: identical ratio rows");
  }

  void check_feasible() const {
    for (int r = 0; r < n_slack_; ++r)
      if (rhs_const(r) < 0) throw std::logic_error("tableau lost feasibility");
  }

  Side side_;
  int n_struct_;
  int n_slack_;
  int cols_;
  std::vector<Rational> M_;
  std::vector<int> basis_;
  std::vector<int> var_row_;
  std::vector<int> labels_;
  std::vector<int> label_var_;
  bool degenerate_tie_ = false;
};

// One pivot of a Lemke-Howson run: the vertex pair reached, the label
// whose variable entered, and the label that dropped out.
struct LHStep {
  RationalVector x, y;
  int entering_label = 0;
  int dropped_label = 0;
};

struct LHPath {
  RationalVector x_start, y_start;
  RationalVector x_end, y_end;
  int missing_label = 0;
  std::vector<LHStep> steps;
  bool degenerate_tie = false;
};

// Equilibrium in exact arithmetic: normalized strategies plus the
// polytope coordinates they came from.
struct RationalEquilibrium {
  RationalVector x, y;
  RationalVector u, v;
  Rational payoff1, payoff2;

  bool is_pure() const {
    for (const auto& p : x)
      if (p != 0 && p != 1) return false;
    for (const auto& p : y)
      if (p != 0 && p != 1) return false;
    return true;
  }
};

inline RationalEquilibrium make_equilibrium(const RationalBimatrix& game, RationalVector u,
                                            RationalVector v) {
  const Rational su = sum(u), sv = sum(v);
  if (su == 0 || sv == 0)
    throw std::invalid_argument("make_equilibrium: artificial equilibrium has no strategy image");
  RationalEquilibrium eq;
  eq.u = std::move(u);
  eq.v = std::move(v);
  eq.x.resize(eq.u.size());
  eq.y.resize(eq.v.size());
  for (std::size_t i = 0; i < eq.u.size(); ++i) eq.x[i] = eq.u[i] / su;
  for (std::size_t j = 0; j < eq.v.size(); ++j) eq.y[j] = eq.v[j] / sv;
  eq.payoff1 = 0;
  eq.payoff2 = 0;
  for (int i = 0; i < game.l; ++i)
    for (int j = 0; j < game.m; ++j) {
      eq.payoff1 += eq.x[i] * game.a(i, j) * eq.y[j];
      eq.payoff2 += eq.x[i] * game.b(i, j) * eq.y[j];
    }
  return eq;
}

inline EquilibriumPoint to_equilibrium_point(const RationalEquilibrium& eq,
                                             const BimatrixGame& original_game) {
  MixedStrategyProfile pr;
  pr.distributions.resize(2);
  for (const auto& p : eq.x) pr.distributions[0].push_back(to_double(p));
  for (const auto& p : eq.y) pr.distributions[1].push_back(to_double(p));
  EquilibriumPoint point;
  point.profile = pr;
  point.payoffs = expected_payoff(original_game.to_normal_form(), pr);
  point.kind = eq.is_pure() ? EquilibriumKind::pure : EquilibriumKind::mixed;
  const NashCheck check = is_nash(original_game, pr, kBestResponseTol);
  point.epsilon = check.accepted ? check.point.epsilon : check.gain;
  return point;
}

namespace detail {

struct TableauPair {
  LabelledTableau tx, ty;
  TableauPair(const RationalBimatrix& game) : tx(game, Side::X), ty(game, Side::Y) {}
};

inline std::pair<RationalVector, RationalVector> pair_vertices(const TableauPair& t) {
  return {t.tx.vertex(), t.ty.vertex()};
}

// Follows the k-almost completely labelled path from the current
// (completely labelled) pair until another completely labelled pair is
// reached. Verifies the labelling invariants at every step.
inline LHPath follow_path(TableauPair& tabs, int k, int l, int m) {
  const LabelSet full = full_label_set(l, m);
  LHPath path;
  path.missing_label = k;
  path.x_start = tabs.tx.vertex();
  path.y_start = tabs.ty.vertex();

  if (!((tabs.tx.held_labels() | tabs.ty.held_labels()) == full))
    throw std::logic_error("follow_path: start pair is not completely labelled");

  const bool x_holds = tabs.tx.holds_label(k);
  const bool y_holds = tabs.ty.holds_label(k);
  if (x_holds == y_holds)
    throw std::logic_error("follow_path: label k must be held by exactly one side");
  LabelledTableau* side = x_holds ? &tabs.tx : &tabs.ty;

  LabelSet almost = full;
  almost.bits &= ~(1u << (k - 1));

  int current_label = k;
  const long max_steps = 100000;
  for (long step = 0; step < max_steps; ++step) {
    const int entering = side->var_of_label(current_label);
    const int leaving = side->pivot_in(entering);
    const int dropped = side->label_of_var(leaving);

    LHStep s;
    s.x = tabs.tx.vertex();
    s.y = tabs.ty.vertex();
    s.entering_label = current_label;
    s.dropped_label = dropped;
    path.steps.push_back(std::move(s));

    const LabelSet lx = tabs.tx.held_labels();
    const LabelSet ly = tabs.ty.held_labels();
    if (dropped == k) {
      if (!((lx | ly) == full))
        throw std::logic_error("follow_path: endpoint is not completely labelled");
      path.x_end = tabs.tx.vertex();
      path.y_end = tabs.ty.vertex();
      path.degenerate_tie = tabs.tx.degenerate_tie_seen() || tabs.ty.degenerate_tie_seen();
      return path;
    }
    if (!((lx | ly) == almost) || (lx & ly).count() != 1)
      throw std::logic_error("follow_path: interior pair is not k-almost completely labelled");
    current_label = dropped;
    side = (side == &tabs.tx) ? &tabs.ty : &tabs.tx;
  }
  throw std::logic_error("follow_path: step limit exceeded");
}

inline void require_positive(const RationalBimatrix& game, const char* who) {
  if (!game.all_positive())
    throw std::invalid_argument(std::string(who) +
                                ": game must be strictly positive; positivize it first");
}

}  // namespace detail

struct LemkeHowsonResult {
  RationalEquilibrium equilibrium;
  LHPath path;
};

// Complementary pivoting from the artificial equilibrium (0, 0),
// dropping label k. Terminates at a genuine equilibrium of a positive
// game.
inline LemkeHowsonResult lemke_howson(const RationalBimatrix& game, int k) {
  detail::require_positive(game, "lemke_howson");
  if (k < 1 || k > game.l + game.m)
    throw std::invalid_argument("lemke_howson: label k = " + std::to_string(k) +
                                " outside K = {1.." + std::to_string(game.l + game.m) + "}");
  detail::TableauPair tabs(game);
  LHPath path = detail::follow_path(tabs, k, game.l, game.m);
  LemkeHowsonResult result{make_equilibrium(game, tabs.tx.vertex(), tabs.ty.vertex()),
                           std::move(path)};
  return result;
}

struct LHEnumerationResult {
  std::vector<RationalEquilibrium> equilibria;
  bool degenerate_warning = false;
};

// Breadth-first exploration of the Lemke-Howson path structure: restart
// from every discovered equilibrium with every label. Finds the
// component of the artificial equilibrium; completeness for arbitrary
// games is the job of support_enumeration.
inline LHEnumerationResult enumerate_equilibria_lh(const RationalBimatrix& game) {
  detail::require_positive(game, "enumerate_equilibria_lh");
  if (game.l > 10 || game.m > 10)
    throw std::invalid_argument("enumerate_equilibria_lh: guard l, m <= 10 exceeded");

  using Key = std::pair<RationalVector, RationalVector>;
  std::map<Key, detail::TableauPair> discovered;
  std::vector<Key> queue;
  LHEnumerationResult result;

  detail::TableauPair origin(game);
  const Key origin_key = detail::pair_vertices(origin);
  discovered.emplace(origin_key, origin);
  queue.push_back(origin_key);

  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const Key from = queue[qi];
    for (int k = 1; k <= game.l + game.m; ++k) {
      detail::TableauPair tabs = discovered.at(from);
      LHPath path = detail::follow_path(tabs, k, game.l, game.m);
      result.degenerate_warning |= path.degenerate_tie;
      const Key end = detail::pair_vertices(tabs);
      if (discovered.emplace(end, tabs).second) queue.push_back(end);
    }
  }

  for (const auto& [key, tabs] : discovered) {
    if (is_zero(key.first) && is_zero(key.second)) continue;  // artificial equilibrium
    result.equilibria.push_back(make_equilibrium(game, key.first, key.second));
  }
  return result;
}

namespace detail {

// Exact Gaussian elimination; nullopt when the system is singular.
inline std::optional<RationalVector> solve_linear(std::vector<RationalVector> mat,
                                                  RationalVector rhs) {
  const int n = static_cast<int>(mat.size());
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (mat[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return std::nullopt;
    std::swap(mat[col], mat[piv]);
    std::swap(rhs[col], rhs[piv]);
    const Rational p = mat[col][col];
    for (int c = col; c < n; ++c) mat[col][c] /= p;
    rhs[col] /= p;
    for (int r = 0; r < n; ++r) {
      if (r == col || mat[r][col] == 0) continue;
      const Rational f = mat[r][col];
      for (int c = col; c < n; ++c) mat[r][c] -= f * mat[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  return rhs;
}

inline void subsets_of_size(int n, int k, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

// Independent oracle: solves the equal-payoff indifference system for
// every pair of equal-size supports and keeps the solutions that
// satisfy the support characterization exactly. Returns all equilibria
// of a nondegenerate game.
inline std::vector<RationalEquilibrium> support_enumeration(const RationalBimatrix& game) {
  if (game.l > 6 || game.m > 6)
    throw std::invalid_argument("support_enumeration: guard l, m <= 6 exceeded");
  const int l = game.l, m = game.m;
  std::map<std::pair<RationalVector, RationalVector>, RationalEquilibrium> found;

  for (int s = 1; s <= std::min(l, m); ++s) {
    std::vector<std::vector<int>> row_supports, col_supports;
    detail::subsets_of_size(l, s, [&](const std::vector<int>& v) { row_supports.push_back(v); });
    detail::subsets_of_size(m, s, [&](const std::vector<int>& v) { col_supports.push_back(v); });

    for (const auto& rows : row_supports) {
      for (const auto& cols : col_supports) {
        // y on `cols` making rows in `rows` indifferent at value v1.
        std::vector<RationalVector> my(s + 1, RationalVector(s + 1, Rational(0)));
        RationalVector ry(s + 1, Rational(0));
        for (int r = 0; r < s; ++r) {
          for (int c = 0; c < s; ++c) my[r][c] = game.a(rows[r], cols[c]);
          my[r][s] = -1;
        }
        for (int c = 0; c < s; ++c) my[s][c] = 1;
        ry[s] = 1;
        const auto ysol = detail::solve_linear(my, ry);
        if (!ysol) continue;

        // x on `rows` making columns in `cols` indifferent at value v2.
        std::vector<RationalVector> mx(s + 1, RationalVector(s + 1, Rational(0)));
        RationalVector rx(s + 1, Rational(0));
        for (int c = 0; c < s; ++c) {
          for (int r = 0; r < s; ++r) mx[c][r] = game.b(rows[r], cols[c]);
          mx[c][s] = -1;
        }
        for (int r = 0; r < s; ++r) mx[s][r] = 1;
        rx[s] = 1;
        const auto xsol = detail::solve_linear(mx, rx);
        if (!xsol) continue;

        bool ok = true;
        for (int c = 0; c < s && ok; ++c) ok = (*ysol)[c] >= 0;
        for (int r = 0; r < s && ok; ++r) ok = (*xsol)[r] >= 0;
        if (!ok) continue;

        RationalVector x(l, Rational(0)), y(m, Rational(0));
        for (int r = 0; r < s; ++r) x[rows[r]] = (*xsol)[r];
        for (int c = 0; c < s; ++c) y[cols[c]] = (*ysol)[c];
        const Rational v1 = (*ysol)[s];
        const Rational v2 = (*xsol)[s];

        // Support characterization: no row beats v1 against y, no
        // column beats v2 against x, with equality on the supports.
        for (int i = 0; i < l && ok; ++i) {
          Rational ay = 0;
          for (int j = 0; j < m; ++j) ay += game.a(i, j) * y[j];
          if (x[i] > 0 && ay != v1) ok = false;
          if (ay > v1) ok = false;
        }
        for (int j = 0; j < m && ok; ++j) {
          Rational xb = 0;
          for (int i = 0; i < l; ++i) xb += x[i] * game.b(i, j);
          if (y[j] > 0 && xb != v2) ok = false;
          if (xb > v2) ok = false;
        }
        if (!ok) continue;

        RationalEquilibrium eq;
        eq.x = x;
        eq.y = y;
        eq.payoff1 = v1;
        eq.payoff2 = v2;
        eq.u.assign(l, Rational(0));
        eq.v.assign(m, Rational(0));
        if (v2 > 0)
          for (int i = 0; i < l; ++i) eq.u[i] = x[i] / v2;
        if (v1 > 0)
          for (int j = 0; j < m; ++j) eq.v[j] = y[j] / v1;
        found.emplace(std::make_pair(x, y), std::move(eq));
      }
    }
  }

  std::vector<RationalEquilibrium> out;
  out.reserve(found.size());
  for (auto& [key, eq] : found) out.push_back(std::move(eq));
  return out;
}

struct NondegeneracyReport {
  bool nondegenerate = true;
  Side side = Side::X;
  RationalVector witness;
  int tight_count = 0;
  int expected = 0;
};

// Enumerates every vertex of X and Y and counts tight constraints; a
// game is nondegenerate iff each X vertex is tight in exactly l
// constraints and each Y vertex in exactly m.
inline NondegeneracyReport is_nondegenerate(const RationalBimatrix& game) {
  detail::require_positive(game, "is_nondegenerate");
  if (game.l > 10 || game.m > 10)
    throw std::invalid_argument(
        "is_nondegenerate: guard l, m <= 10 exceeded; use a sampling check instead");

  NondegeneracyReport report;
  const int l = game.l, m = game.m;

  const auto scan_side = [&](Side side) -> bool {
    const int dim = side == Side::X ? l : m;
    const int n_ineq = side == Side::X ? m : l;
    bool ok = true;
    detail::subsets_of_size(dim + n_ineq, dim, [&](const std::vector<int>& tight) {
      if (!ok) return;
      std::vector<RationalVector> mat(dim, RationalVector(dim, Rational(0)));
      RationalVector rhs(dim, Rational(0));
      for (int r = 0; r < dim; ++r) {
        const int c = tight[r];
        if (c < dim) {
          mat[r][c] = 1;  // coordinate = 0
        } else {
          const int j = c - dim;
          for (int i = 0; i < dim; ++i)
            mat[r][i] = side == Side::X ? game.b(i, j) : game.a(j, i);
          rhs[r] = 1;
        }
      }
      const auto sol = detail::solve_linear(mat, rhs);
      if (!sol) return;
      // Feasibility and exact tight count.
      int count = 0;
      for (int i = 0; i < dim; ++i) {
        if ((*sol)[i] < 0) return;
        if ((*sol)[i] == 0) ++count;
      }
      for (int j = 0; j < n_ineq; ++j) {
        Rational dot = 0;
        for (int i = 0; i < dim; ++i)
          dot += (*sol)[i] * (side == Side::X ? game.b(i, j) : game.a(j, i));
        if (dot > 1) return;
        if (dot == 1) ++count;
      }
      if (count != dim) {
        report.nondegenerate = false;
        report.side = side;
        report.witness = *sol;
        report.tight_count = count;
        report.expected = dim;
        ok = false;
      }
    });
    return ok;
  };

  if (scan_side(Side::X)) scan_side(Side::Y);
  return report;
}

}  // namespace sg
