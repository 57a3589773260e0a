#include <cmath>
#include <cstring>
#include <string>

#include "definetti.h"
#include "doctest.h"

namespace {

std::string take(char* text) {
  std::string s = text ? text : "";
  df_string_free(text);
  return s;
}

}  // namespace

TEST_CASE("builtin spaces round-trip through the C surface") {
  df_space* sq = nullptr;
  REQUIRE(df_space_builtin("square", &sq) == DF_OK);
  CHECK(df_space_dim(sq) == 3);

  char* json = nullptr;
  REQUIRE(df_space_to_json(sq, 0, &json) == DF_OK);
  std::string text = take(json);
  CHECK(text.find("\"square\"") != std::string::npos);

  df_space* again = nullptr;
  REQUIRE(df_space_parse(text.c_str(), &again) == DF_OK);
  CHECK(df_space_dim(again) == 3);

  df_config cfg = df_config_default();
  int pass = 0;
  char* report = nullptr;
  REQUIRE(df_space_validate(again, &cfg, &pass, &report) == DF_OK);
  CHECK(pass == 1);
  CHECK(take(report).find("[pass]") != std::string::npos);

  df_space_free(sq);
  df_space_free(again);

  df_space* bogus = nullptr;
  CHECK(df_space_builtin("dodecahedron", &bogus) == DF_ERR_PARSE);
  CHECK(std::string(df_last_error()).find("dodecahedron") != std::string::npos);
}

TEST_CASE("relative entropy through the C surface") {
  df_space* bit = nullptr;
  REQUIRE(df_space_builtin("simplex:2", &bit) == DF_OK);
  df_config cfg = df_config_default();

  double x[2] = {1.0, 0.0};
  double y[2] = {0.5, 0.5};
  df_entropy_result r;
  REQUIRE(df_relative_entropy(bit, x, 2, y, 2, &cfg, nullptr, &r) == DF_OK);
  CHECK(r.value == doctest::Approx(std::log(2.0)).epsilon(1e-8));
  CHECK(r.lower <= r.value);
  CHECK(r.upper >= r.value);
  CHECK(r.lambda == doctest::Approx(2.0));

  // boundary reference reports a domain error
  double bad_y[2] = {1.0, 0.0};
  CHECK(df_relative_entropy(bit, y, 2, bad_y, 2, &cfg, nullptr, &r) == DF_ERR_DOMAIN);

  double tau[2];
  double lambda = 0.0;
  REQUIRE(df_optimize_tau(bit, &cfg, tau, &lambda) == DF_OK);
  CHECK(lambda == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(tau[0] == doctest::Approx(0.5).epsilon(1e-5));
  df_space_free(bit);
}

TEST_CASE("schedules and games through the C surface") {
  df_space* bit = nullptr;
  REQUIRE(df_space_builtin("simplex:2", &bit) == DF_OK);
  char* bit_json_raw = nullptr;
  REQUIRE(df_space_to_json(bit, 0, &bit_json_raw) == DF_OK);
  std::string bit_json = take(bit_json_raw);
  df_space_free(bit);

  std::string problem = std::string("{\"label\":\"capi-demo\",\"A\":") + bit_json +
                        ",\"B\":" + bit_json +
                        ",\"P\":[1,0,0,-1],\"F_A\":[],\"F_B\":[],\"G_A\":[],\"G_B\":[]}";
  df_problem* p = nullptr;
  REQUIRE(df_problem_parse(problem.c_str(), &p) == DF_OK);
  df_config cfg = df_config_default();
  char* report = nullptr;
  REQUIRE(df_solve_schedule(p, &cfg, 2, 1, &report) == DF_OK);
  std::string text = take(report);
  CHECK(text.find("\"levels\"") != std::string::npos);
  CHECK(text.find("inner") != std::string::npos);
  df_problem_free(p);

  CHECK(df_problem_parse("{\"not\":\"a problem\"}", &p) == DF_ERR_PARSE);

  const char* chsh =
      "{\"label\":\"chsh\",\"X\":2,\"Y\":2,\"A\":2,\"B\":2,"
      "\"pi\":[[0.25,0.25],[0.25,0.25]],"
      "\"V\":[[[[1,0],[1,0]],[[0,1],[0,1]]],[[[0,1],[0,1]],[[1,0],[1,1]]]]}";
  // V above: a xor b == x and y  (encoded [a][b][x][y])
  df_game* g = nullptr;
  {
    // build the predicate programmatically to avoid hand-encoding mistakes
    std::string v = "[";
    for (int a = 0; a < 2; ++a) {
      v += a ? ",[" : "[";
      for (int b = 0; b < 2; ++b) {
        v += b ? ",[" : "[";
        for (int x = 0; x < 2; ++x) {
          v += x ? ",[" : "[";
          for (int y = 0; y < 2; ++y) {
            v += std::to_string(((a ^ b) == (x & y)) ? 1 : 0);
            if (y == 0) v += ",";
          }
          v += "]";
        }
        v += "]";
      }
      v += "]";
    }
    v += "]";
    std::string game_json =
        std::string("{\"label\":\"chsh\",\"X\":2,\"Y\":2,\"A\":2,\"B\":2,"
                    "\"pi\":[[0.25,0.25],[0.25,0.25]],\"V\":") +
        v + "}";
    REQUIRE(df_game_parse(game_json.c_str(), &g) == DF_OK);
    (void)chsh;
  }

  df_space* kb = nullptr;
  REQUIRE(df_space_builtin("simplex:2", &kb) == DF_OK);
  char* game_report = nullptr;
  REQUIRE(df_game_run(g, kb, &cfg, 1, 3, 0, &game_report) == DF_OK);
  std::string gr = take(game_report);
  CHECK(gr.find("\"classical_value\":0.75") != std::string::npos);
  df_game_free(g);
  df_space_free(kb);

  // malformed pi is a parse/domain error with exit-style status
  const char* bad_game =
      "{\"X\":2,\"Y\":2,\"A\":2,\"B\":2,\"pi\":[[0.9,0.25],[0.25,0.25]],"
      "\"V\":[[[[1,1],[1,1]],[[1,1],[1,1]]],[[[1,1],[1,1]],[[1,1],[1,1]]]]}";
  df_game* bad = nullptr;
  CHECK(df_game_parse(bad_game, &bad) == DF_ERR_PARSE);
}
