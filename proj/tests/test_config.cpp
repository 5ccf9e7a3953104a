#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mlsl/config.hpp"

using namespace mlsl;

TEST_CASE("defaults are present and typed getters work") {
  RunConfig cfg;
  CHECK(cfg.get_int("n_items") == 3000);
  CHECK(cfg.get_double("p_reliable") == 0.6);
  CHECK(cfg.get_bool("indicator") == false);
  CHECK(cfg.get_seed() == 1);
  CHECK(cfg.get_string("unfolding") == "asymmetric");
  CHECK_FALSE(cfg.is_set("graph"));
  CHECK_THROWS_AS(cfg.get_string("graph"), ValidationError);
  CHECK_THROWS_AS(cfg.require("graph", "train"), ValidationError);
}

TEST_CASE("parse accepts comments and whitespace") {
  RunConfig cfg = RunConfig::from_text(
      "# a comment\n"
      "n_items = 10\n"
      "\n"
      "p_reliable=0.75   # trailing comment\n"
      "level_sizes = 2, 3, 3\n",
      "test");
  CHECK(cfg.get_int("n_items") == 10);
  CHECK(cfg.get_double("p_reliable") == 0.75);
  CHECK(cfg.get_int_list("level_sizes") == std::vector<int>{2, 3, 3});
}

TEST_CASE("unknown keys and malformed lines are rejected") {
  CHECK_THROWS_AS(RunConfig::from_text("no_such_key = 1\n", "test"),
                  ValidationError);
  CHECK_THROWS_AS(RunConfig::from_text("n_items\n", "test"),
                  ValidationError);
  CHECK_THROWS_AS(RunConfig::from_text("n_items =\n", "test"),
                  ValidationError);
}

TEST_CASE("range and choice validation") {
  CHECK_THROWS_AS(RunConfig::from_text("p_reliable = 1.5\n", "test"),
                  ValidationError);
  CHECK_THROWS_AS(RunConfig::from_text("epochs = 0\n", "test"),
                  ValidationError);
  CHECK_THROWS_AS(RunConfig::from_text("unfolding = sideways\n", "test"),
                  ValidationError);
  CHECK_THROWS_AS(RunConfig::from_text("rho = not_a_number\n", "test"),
                  ValidationError);
  CHECK_THROWS_AS(RunConfig::from_text("scales = 1,0\n", "test"),
                  ValidationError);
  RunConfig ok = RunConfig::from_text("baseline = kos\n", "test");
  CHECK(ok.get_string("baseline") == "kos");
}

TEST_CASE("echo round-trips through the parser") {
  RunConfig cfg = RunConfig::from_text(
      "n_items = 42\nbaseline = em\nscales = 1.5,2\n", "test");
  RunConfig back = RunConfig::from_text(cfg.echo(), "echo");
  CHECK(back.get_int("n_items") == 42);
  CHECK(back.get_string("baseline") == "em");
  CHECK(back.get_double_list("scales") == std::vector<double>{1.5, 2.0});
  CHECK(back.echo() == cfg.echo());
}

TEST_CASE("set validates like the parser") {
  RunConfig cfg;
  cfg.set("master_seed", "777");
  CHECK(cfg.get_seed() == 777);
  CHECK_THROWS_AS(cfg.set("visit", "zigzag"), ValidationError);
}
