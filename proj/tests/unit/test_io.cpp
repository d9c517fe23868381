#include <doctest.h>

#include <string>

#include "popgame/error.hpp"
#include "popgame/harsanyi.hpp"
#include "popgame/io.hpp"
#include "popgame/scenario.hpp"

using namespace popgame;

namespace {

const std::string kData = POPGAME_DATA_DIR;

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("parse errors carry line and column") {
  const std::string text = "{\n  \"a\": [1, 2\n  \"b\": 3\n}\n";
  const std::string msg = message_of([&] { io::parse_json(text, "doc.json"); });
  CHECK(msg.find("doc.json:3:") == 0);
  CHECK_THROWS_AS(io::parse_json("[1,", "x"), ValidationError);
}

TEST_CASE("unreadable files are I/O errors") {
  const std::string msg = message_of([] { io::read_json_file("/nonexistent/dir/game.json"); });
  CHECK(msg.find("/nonexistent/dir/game.json") != std::string::npos);
  CHECK_THROWS_AS(io::read_json_file("/nonexistent/dir/game.json"), IoError);
}

TEST_CASE("vector game round trip") {
  const VectorPayoffGame g = io::game_from_json(io::read_json_file(kData + "/games/pd_payoffs.json"));
  const VectorPayoffGame ref = prisoners_dilemma_payoffs();
  REQUIRE(g.n_actions() == 2);
  for (std::size_t l = 0; l < 2; ++l)
    for (std::size_t k = 0; k < 2; ++k) CHECK(g.payoff(l, k) == ref.payoff(l, k));
  const VectorPayoffGame back = io::game_from_json(io::game_to_json(g));
  CHECK(back.action_names() == g.action_names());
  CHECK(back.payoff(1, 0) == g.payoff(1, 0));
}

TEST_CASE("game schema errors name the field") {
  auto doc = io::parse_json(R"({"actions": ["a", "b"], "payoff_dim": 2,
                                "payoffs": [[[0, 0], [1, 1]], [[2, 2]]]})", "g");
  CHECK_THROWS_AS(io::game_from_json(doc), ValidationError);
  doc = io::parse_json(R"({"actions": ["a"], "payoffs": [[[0, 0]]]})", "g");
  CHECK(message_of([&] { io::game_from_json(doc); }).find("payoff_dim") != std::string::npos);
  doc = io::parse_json(R"({"actions": ["a"], "payoff_dim": 2, "payoffs": [[[0, "x"]]]})", "g");
  CHECK_THROWS_AS(io::game_from_json(doc), ValidationError);
  doc = io::parse_json(R"({"actions": ["a", "b"], "payoffs": [[1, 2], [3]]})", "g");
  CHECK_THROWS_AS(io::scalar_game_from_json(doc), ValidationError);
}

TEST_CASE("Harsanyi file matches the builtin game") {
  const HarsanyiGame h = io::harsanyi_from_json(io::read_json_file(kData + "/harsanyi/bos.json"));
  const HarsanyiGame ref = bayesian_battle_of_sexes();
  REQUIRE(h.n_states() == ref.n_states());
  for (std::size_t w = 0; w < h.n_states(); ++w)
    for (std::size_t p = 0; p < 2; ++p)
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) CHECK(h.payoff(w, p, a, b) == ref.payoff(w, p, a, b));
  CHECK(h.types(1).of_state == ref.types(1).of_state);

  auto doc = io::read_json_file(kData + "/harsanyi/bos.json");
  doc["prior"] = {0.25, 0.25, 0.25, 0.15};
  CHECK_THROWS_AS(io::harsanyi_from_json(doc), ValidationError);
}

TEST_CASE("simplex fields") {
  const auto ok = io::parse_json(R"({"q": [0.25, 0.75]})", "s");
  CHECK(io::simplex_from_json(ok["q"], "q")[1] == 0.75);
  const auto bad = io::parse_json(R"({"q": [0.5, 0.4]})", "s");
  CHECK(message_of([&] { io::simplex_from_json(bad["q"], "q"); }).find("'q'") != std::string::npos);
}

TEST_CASE("nine significant digits") {
  CHECK(io::round9(1.0 / 3.0) == 0.333333333);
  CHECK(io::format9(2.0 / 3.0) == "0.666666667");
  CHECK(io::format9(-0.0) == "0");
  CHECK(io::round9(123456789012.0) == 123456789000.0);
  CHECK(io::to_json(Vector::Constant(2, 0.1)).dump() == "[0.1,0.1]");
}
