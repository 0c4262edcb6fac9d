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

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sg/game.hpp"

namespace sg {

struct GameParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LoadedGame {
  NormalFormGame game;
  std::optional<BimatrixGame> bimatrix;  // present for two-agent games
  std::string source;                    // "file:<path>" or "builtin:<name>"
};

namespace detail {

inline double finite_number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw GameParseError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw GameParseError(where + ": non-finite payoff");
  return v;
}

inline Matrix parse_matrix(const nlohmann::json& j, const std::string& name) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
    throw GameParseError("matrix \"" + name + "\" must be a non-empty 2-D array");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
      throw GameParseError("matrix \"" + name + "\" row " + std::to_string(i + 1) +
                           " is ragged");
    for (int c = 0; c < cols; ++c)
      m(i, c) = finite_number(j[i][c], name + "[" + std::to_string(i + 1) + "][" +
                                           std::to_string(c + 1) + "]");
  }
  return m;
}

inline void parse_payoff_tree(const nlohmann::json& j, const NormalFormGame& shape, int depth,
                              std::vector<int>& choice, std::vector<double>& flat,
                              const std::string& path) {
  const int n = shape.num_agents();
  if (depth == n) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
      throw GameParseError("payoffs" + path + ": expected an array of " + std::to_string(n) +
                           " agent payoffs");
    const std::size_t base = shape.joint_index(choice) * n;
    for (int a = 0; a < n; ++a)
      flat[base + a] = finite_number(j[a], "payoffs" + path + "[" + std::to_string(a + 1) + "]");
    return;
  }
  const int k = shape.choice_counts[depth];
  if (!j.is_array() || static_cast<int>(j.size()) != k)
    throw GameParseError("payoffs" + path + ": expected " + std::to_string(k) +
                         " entries for agent " + std::to_string(depth + 1));
  for (int c = 0; c < k; ++c) {
    choice[depth] = c;
    parse_payoff_tree(j[c], shape, depth + 1, choice, flat,
                      path + "[" + std::to_string(c + 1) + "]");
  }
}

}  // namespace detail

// Accepts either the bimatrix convenience form {"A": [[..]], "B": [[..]]}
// or the general form {"agents": n, "choices": [...], "payoffs": [...]}.
inline LoadedGame parse_game_json(const nlohmann::json& j, const std::string& source) {
  LoadedGame loaded;
  loaded.source = source;
  if (j.contains("A") || j.contains("B")) {
    if (!j.contains("A") || !j.contains("B"))
      throw GameParseError("bimatrix form needs both \"A\" and \"B\"");
    BimatrixGame g{detail::parse_matrix(j["A"], "A"), detail::parse_matrix(j["B"], "B")};
    if (g.A.rows() != g.B.rows() || g.A.cols() != g.B.cols())
      throw GameParseError("\"A\" and \"B\" must have the same shape");
    loaded.bimatrix = g;
    loaded.game = g.to_normal_form();
    return loaded;
  }

  if (!j.contains("agents") || !j.contains("choices") || !j.contains("payoffs"))
    throw GameParseError("game needs \"agents\", \"choices\" and \"payoffs\" fields");
  if (!j["agents"].is_number_integer() || j["agents"].get<int>() < 2)
    throw GameParseError("\"agents\" must be an integer >= 2");
  const int n = j["agents"].get<int>();
  if (!j["choices"].is_array() || static_cast<int>(j["choices"].size()) != n)
    throw GameParseError("\"choices\" must list one choice count per agent");

  NormalFormGame game;
  for (int i = 0; i < n; ++i) {
    const auto& c = j["choices"][i];
    if (!c.is_number_integer() || c.get<int>() < 2)
      throw GameParseError("\"choices\"[" + std::to_string(i + 1) +
                           "] must be an integer >= 2");
    game.choice_counts.push_back(c.get<int>());
  }
  game.payoffs.assign(game.joint_count() * n, 0.0);
  std::vector<int> choice(n, 0);
  detail::parse_payoff_tree(j["payoffs"], game, 0, choice, game.payoffs, "");
  game.validate();
  loaded.game = std::move(game);
  if (n == 2) loaded.bimatrix = loaded.game.to_bimatrix();
  return loaded;
}

inline LoadedGame load_game_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GameParseError("cannot open game file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw GameParseError("invalid JSON in " + path + ": " + e.what());
  }
  return parse_game_json(j, "file:" + path);
}

// Prisoner's Dilemma: cooperate/defect.
inline BimatrixGame prisoners_dilemma() {
  Matrix A{{-1.0, -3.0}, {0.0, -2.0}};
  return BimatrixGame{A, A.transposed()};
}

// Chicken: swerve/straight.
inline BimatrixGame chicken_game() {
  Matrix A{{0.0, -1.0}, {1.0, -10.0}};
  return BimatrixGame{A, A.transposed()};
}

// Builtin names: "pd", "chicken", "ts:T,S".
inline LoadedGame load_builtin_game(const std::string& name) {
  LoadedGame loaded;
  loaded.source = "builtin:" + name;
  if (name == "pd") {
    loaded.bimatrix = prisoners_dilemma();
  } else if (name == "chicken") {
    loaded.bimatrix = chicken_game();
  } else if (name.rfind("ts:", 0) == 0) {
    const std::string args = name.substr(3);
    const auto comma = args.find(',');
    if (comma == std::string::npos)
      throw GameParseError("builtin ts takes two parameters, e.g. ts:2,-1");
    try {
      std::size_t used = 0;
      const double t = std::stod(args.substr(0, comma), &used);
      if (used != comma) throw std::invalid_argument("trailing characters");
      const std::string s_str = args.substr(comma + 1);
      const double s = std::stod(s_str, &used);
      if (used != s_str.size()) throw std::invalid_argument("trailing characters");
      loaded.bimatrix = ts_family_game({t, s});
    } catch (const std::exception&) {
      throw GameParseError("cannot parse ts parameters in \"" + name + "\"");
    }
  } else {
    throw GameParseError("unknown builtin game \"" + name +
                         "\"; expected pd, chicken or ts:T,S");
  }
  loaded.game = loaded.bimatrix->to_normal_form();
  return loaded;
}

inline nlohmann::json game_to_json(const BimatrixGame& g) {
  nlohmann::json a = nlohmann::json::array(), b = nlohmann::json::array();
  for (int i = 0; i < g.rows(); ++i) {
    nlohmann::json ra = nlohmann::json::array(), rb = nlohmann::json::array();
    for (int j = 0; j < g.cols(); ++j) {
      ra.push_back(g.A(i, j));
      rb.push_back(g.B(i, j));
    }
    a.push_back(std::move(ra));
    b.push_back(std::move(rb));
  }
  return {{"A", std::move(a)}, {"B", std::move(b)}};
}

}  // namespace sg
