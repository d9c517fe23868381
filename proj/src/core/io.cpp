#include "popgame/io.hpp"

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "popgame/error.hpp"

namespace popgame::io {

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line and column.
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": malformed JSON");
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path);
  return parse_json(buf.str(), path);
}

namespace {

const json& require(const json& doc, const std::string& field) {
  if (!doc.is_object()) throw ValidationError("expected an object holding '" + field + "'");
  auto it = doc.find(field);
  if (it == doc.end()) throw ValidationError("missing field '" + field + "'");
  return *it;
}

double number(const json& node, const std::string& field) {
  if (!node.is_number()) throw ValidationError("field '" + field + "' must hold numbers");
  const double v = node.get<double>();
  if (!std::isfinite(v)) throw ValidationError("field '" + field + "' is not finite");
  return v;
}

std::vector<std::string> names(const json& node, const std::string& field) {
  if (!node.is_array()) throw ValidationError("field '" + field + "' must be an array");
  std::vector<std::string> out;
  for (const json& n : node) {
    if (!n.is_string()) throw ValidationError("field '" + field + "' must hold strings");
    out.push_back(n.get<std::string>());
  }
  return out;
}

std::size_t index(const json& node, const std::string& field) {
  if (!node.is_number_integer() || node.get<long long>() < 0)
    throw ValidationError("field '" + field + "' must hold nonnegative integers");
  return node.get<std::size_t>();
}

}  // namespace

Vector vector_from_json(const json& node, const std::string& field) {
  if (!node.is_array()) throw ValidationError("field '" + field + "' must be an array");
  Vector v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = number(node[i], field);
  return v;
}

Matrix matrix_from_json(const json& node, const std::string& field) {
  if (!node.is_array() || node.empty())
    throw ValidationError("field '" + field + "' must be a nonempty array of rows");
  const std::size_t rows = node.size();
  if (!node[0].is_array())
    throw ValidationError("field '" + field + "' must be an array of rows");
  const std::size_t cols = node[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const Vector row = vector_from_json(node[r], field);
    if (static_cast<std::size_t>(row.size()) != cols)
      throw ValidationError("field '" + field + "' has ragged rows");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

SimplexVector simplex_from_json(const json& node, const std::string& field) {
  try {
    return SimplexVector(vector_from_json(node, field));
  } catch (const ValidationError& e) {
    throw ValidationError("field '" + field + "': " + e.what());
  }
}

VectorPayoffGame game_from_json(const json& doc) {
  auto actions = names(require(doc, "actions"), "actions");
  const json& dim_node = require(doc, "payoff_dim");
  if (!dim_node.is_number_integer() || dim_node.get<long long>() <= 0)
    throw ValidationError("field 'payoff_dim' must be a positive integer");
  const auto m = dim_node.get<std::size_t>();
  const json& rows = require(doc, "payoffs");
  const std::size_t n = actions.size();
  if (!rows.is_array() || rows.size() != n)
    throw ValidationError("field 'payoffs' must have " + std::to_string(n) + " rows");
  std::vector<std::vector<Vector>> table(n);
  for (std::size_t l = 0; l < n; ++l) {
    if (!rows[l].is_array() || rows[l].size() != n)
      throw ValidationError("payoff row " + std::to_string(l) + " must have " +
                            std::to_string(n) + " entries");
    for (std::size_t k = 0; k < n; ++k) table[l].push_back(vector_from_json(rows[l][k], "payoffs"));
  }
  return VectorPayoffGame(std::move(actions), m, std::move(table));
}

ScalarGame scalar_game_from_json(const json& doc) {
  ScalarGame g{names(require(doc, "actions"), "actions"),
               matrix_from_json(require(doc, "payoffs"), "payoffs")};
  const auto n = static_cast<Eigen::Index>(g.action_names.size());
  if (n == 0) throw ValidationError("scalar game has no actions");
  if (g.payoff.rows() != n || g.payoff.cols() != n)
    throw ValidationError("scalar payoff matrix must be " + std::to_string(n) + "x" +
                          std::to_string(n));
  return g;
}

HarsanyiGame harsanyi_from_json(const json& doc) {
  auto states = names(require(doc, "states"), "states");
  Vector prior = vector_from_json(require(doc, "prior"), "prior");
  const json& types_node = require(doc, "types");
  if (!types_node.is_array() || types_node.size() != 2)
    throw ValidationError("field 'types' must list both players");
  std::array<TypeSpace, 2> types;
  for (std::size_t i = 0; i < 2; ++i) {
    types[i].names = names(require(types_node[i], "names"), "types.names");
    const json& of_state = require(types_node[i], "of_state");
    if (!of_state.is_array()) throw ValidationError("field 'of_state' must be an array");
    for (const json& t : of_state) types[i].of_state.push_back(index(t, "of_state"));
  }
  auto actions = names(require(doc, "actions"), "actions");
  const json& pay = require(doc, "payoffs");
  if (!pay.is_array() || pay.size() != states.size())
    throw ValidationError("field 'payoffs' must have one entry per state");
  std::vector<std::array<Matrix, 2>> payoffs;
  for (const json& per_state : pay) {
    if (!per_state.is_array() || per_state.size() != 2)
      throw ValidationError("each state needs payoff matrices for both players");
    payoffs.push_back({matrix_from_json(per_state[0], "payoffs"),
                       matrix_from_json(per_state[1], "payoffs")});
  }
  return HarsanyiGame(std::move(states), std::move(prior), std::move(types),
                      std::move(actions), std::move(payoffs));
}

double round9(double v) {
  if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

std::string format9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", round9(v));
  return buf;
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(round9(v[i]));
  return out;
}

json to_json(const std::vector<Vector>& vs) {
  json out = json::array();
  for (const Vector& v : vs) out.push_back(to_json(v));
  return out;
}

json game_to_json(const VectorPayoffGame& game) {
  json rows = json::array();
  for (std::size_t l = 0; l < game.n_actions(); ++l) {
    json row = json::array();
    for (std::size_t k = 0; k < game.n_actions(); ++k) row.push_back(to_json(game.payoff(l, k)));
    rows.push_back(std::move(row));
  }
  return {{"actions", game.action_names()},
          {"payoff_dim", game.payoff_dim()},
          {"payoffs", std::move(rows)}};
}

}  // namespace popgame::io
