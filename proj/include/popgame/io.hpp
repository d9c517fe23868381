#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "popgame/game.hpp"
#include "popgame/harsanyi.hpp"
#include "popgame/types.hpp"

namespace popgame::io {

using nlohmann::json;

// Reads and parses a JSON document; IoError if unreadable, ValidationError
// with line/column on syntax errors.
json read_json_file(const std::string& path);
json parse_json(const std::string& text, const std::string& origin);

// {"actions": [...], "payoff_dim": m, "payoffs": [[[..m..], ...], ...]}
VectorPayoffGame game_from_json(const json& doc);
// {"actions": [...], "payoffs": [[scalar, ...], ...]}
ScalarGame scalar_game_from_json(const json& doc);
// {"states", "prior", "types": [{"names", "of_state"}, x2], "actions",
//  "payoffs": [state][player][own][opp]}
HarsanyiGame harsanyi_from_json(const json& doc);

json game_to_json(const VectorPayoffGame& game);

Vector vector_from_json(const json& node, const std::string& field);
Matrix matrix_from_json(const json& node, const std::string& field);
SimplexVector simplex_from_json(const json& node, const std::string& field);

// Rounded to 9 significant digits for stable golden output.
double round9(double v);
json to_json(const Vector& v);
json to_json(const std::vector<Vector>& vs);
std::string format9(double v);

}  // namespace popgame::io
