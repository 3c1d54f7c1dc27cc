#include <doctest.h>

#include <cmath>

#include "rns/config.hpp"

using namespace rns;

TEST_SUITE_BEGIN("config");

TEST_CASE("minimal config fills the defaults") {
  const auto cfg = parse_config_text("{}");
  CHECK(cfg.parameters.a == doctest::Approx(0.4));
  CHECK(cfg.parameters.diff == doctest::Approx(10.0 / 7.0));
  CHECK(cfg.grid.cells == 512);
  CHECK(cfg.solver.mode == "both");
  CHECK(cfg.parameters.well_ordered());
}

TEST_CASE("missing mu inside a parameters block is a schema error with pointer") {
  const char* text = R"({"parameters":{"a":0.4,"c_v":1.0,"nu":2.0,
      "diff":1.4,"rate_k":1.0,"heat_q":0.5}})";
  try {
    parse_config_text(text);
    FAIL("expected SchemaError");
  } catch (const SchemaError& ex) {
    CHECK(std::string(ex.what()).find("/parameters/mu") != std::string::npos);
  }
}

TEST_CASE("duplicate keys are rejected") {
  CHECK_THROWS_AS(parse_config_text(R"({"seed":1,"seed":2})"), SchemaError);
  CHECK_THROWS_AS(
      parse_config_text(R"({"grid":{"cells":64,"cells":128,"half_width":4}})"),
      SchemaError);
}

TEST_CASE("unknown keys are rejected with their location") {
  try {
    parse_config_text(R"({"grid":{"half_width":4.0,"cellz":64}})");
    FAIL("expected SchemaError");
  } catch (const SchemaError& ex) {
    CHECK(std::string(ex.what()).find("/grid/cellz") != std::string::npos);
  }
}

TEST_CASE("initial data builder hits a requested perturbation size exactly") {
  auto cfg = parse_config_text(R"({
    "grid": {"half_width": 8.0, "cells": 512},
    "initial_data": {
      "profiles": [
        {"field": "v", "type": "gaussian", "amplitude": 0.3},
        {"field": "u", "type": "gaussian", "amplitude": 0.2, "center": 1.0},
        {"field": "z", "type": "gaussian", "amplitude": 0.4}
      ],
      "target_delta_pert": 0.02
    }
  })");
  const auto data = build_initial_data(cfg);
  CHECK(data.delta_pert == doctest::Approx(0.02).epsilon(1e-9));
  CHECK(data.z0.minCoeff() >= 0.0);
  CHECK(data.z0.maxCoeff() <= 1.0);
}

TEST_CASE("config hash is stable and sensitive") {
  const auto a = parse_config_text("{}");
  auto b = a;
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 99;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("reaction kinds parse") {
  const auto cfg = parse_config_text(
      R"({"reaction":{"kind":"ignition-ramp","theta_ignition":1.1,"ramp_width":0.3}})");
  CHECK(cfg.reaction.kind == ReactionRate::Kind::IgnitionRamp);
  CHECK(cfg.reaction(1.4) == doctest::Approx(1.0));
  CHECK(cfg.reaction(1.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(parse_config_text(R"({"reaction":{"kind":"bogus"}})"), SchemaError);
}

TEST_SUITE_END();
