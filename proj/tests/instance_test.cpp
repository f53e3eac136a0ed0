#include "gammacomp/instance.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

namespace gammacomp::io {
namespace {

using nlohmann::json;

// f1 = 1 + 2|x|, f2 = 1 + |x - 1|: gamma = 2/3 at x = 1/3.
const char* kLine2 = R"({
  "norm": "l2",
  "feasible_set": {"lower": null},
  "refs": [
    {"id": "f1", "x_ref": [0], "v": 1,
     "models": [{"type": "lipschitz", "M": 2}],
     "evaluator": {"type": "abs_sum", "offset": 1, "weights": [2], "centers": [0]}},
    {"id": "f2", "x_ref": [1], "v": 1,
     "models": [{"type": "lipschitz", "M": 1, "mono": ["none"]}],
     "evaluator": {"type": "abs_sum", "offset": 1, "weights": [1], "centers": [1]}}
  ]
})";

TEST(InstanceTest, ParsesAndSolvesTwoMetricLine) {
  const auto inst = parse_instance(json::parse(kLine2));
  ASSERT_EQ(inst.refs.size(), 2u);
  EXPECT_EQ(inst.refs[0].id, "f1");
  EXPECT_TRUE(inst.all_lipschitz());
  EXPECT_TRUE(inst.has_evaluators());
  EXPECT_TRUE(std::isinf(inst.K.lower()(0)));
  for (const char* norm : {"l1", "l2", "linf"}) {
    auto copy = inst;
    copy.set_norm(parse_norm(norm));
    EXPECT_TRUE(copy.all_lipschitz());
    const auto sol = solve_instance(copy);
    EXPECT_NEAR(sol.gamma, 2.0 / 3.0, 1e-6) << norm;
    EXPECT_NEAR(sol.x(0), 1.0 / 3.0, 1e-5) << norm;
    EXPECT_TRUE(verify_competitiveness(sol.x, sol.gamma + 1e-6, copy.require_evaluators()).competitive);
  }
}

TEST(InstanceTest, DefaultsAndBounds) {
  const auto inst = parse_instance(json::parse(R"({
    "refs": [{"x_ref": [1, 2], "v": 3, "sense": "max",
              "models": [{"type": "lipschitz", "M": 1, "mono": ["inc", "dec"]}]}],
    "feasible_set": {"upper": [5, null], "halfspaces": [{"a": [1, 1], "b": 4}]},
    "tolerances": {"gamma": 1e-8}
  })"));
  EXPECT_EQ(inst.refs[0].id, "f1");
  EXPECT_EQ(inst.refs[0].sense, Sense::Maximize);
  EXPECT_EQ(inst.K.lower(), Eigen::VectorXd::Zero(2));
  EXPECT_EQ(inst.K.upper()(0), 5.0);
  EXPECT_TRUE(std::isinf(inst.K.upper()(1)));
  EXPECT_EQ(inst.K.halfspaces().size(), 1u);
  EXPECT_EQ(inst.cfg.gamma_tolerance, 1e-8);
  EXPECT_FALSE(inst.has_evaluators());
  EXPECT_THROW(inst.require_evaluators(), std::invalid_argument);
  const auto sol = solve_instance(inst);
  EXPECT_NEAR(sol.gamma, 0.0, 1e-12);
}

TEST(InstanceTest, SetNormKeepsExplicitModelNorms) {
  auto inst = parse_instance(json::parse(R"({
    "norm": "l2",
    "refs": [{"x_ref": [0], "v": 1, "models": [{"type": "lipschitz", "M": 1},
                                               {"type": "lipschitz", "M": 2, "norm": "l1"}]}]
  })"));
  inst.set_norm(NormKind::LInf);
  EXPECT_EQ(inst.cfg.norm, NormKind::LInf);
  EXPECT_EQ(std::get<LipschitzNorm<double>>(inst.refs[0].models[0]).norm, NormKind::LInf);
  EXPECT_EQ(std::get<LipschitzNorm<double>>(inst.refs[0].models[1]).norm, NormKind::L1);
  EXPECT_FALSE(inst.all_lipschitz());
}

TEST(InstanceTest, MixedModelsDispatchToApprox) {
  const auto inst = parse_instance(json::parse(R"({
    "feasible_set": {"lower": null},
    "refs": [
      {"x_ref": [0], "v": 1, "models": [{"type": "quadratic", "grad": [0], "L": 1}]},
      {"x_ref": [2], "v": 1, "models": [{"type": "lipschitz", "M": 1}]}
    ]
  })"));
  EXPECT_FALSE(inst.all_lipschitz());
  const auto sol = solve_instance(inst);
  // sqrt(gamma) + gamma = 2.
  EXPECT_NEAR(sol.gamma, 1.0, 1e-5);
  const auto j = to_json(sol);
  EXPECT_EQ(j["x"].size(), 1u);
  EXPECT_TRUE(j.contains("method"));
}

TEST(InstanceTest, Errors) {
  EXPECT_THROW(parse_instance(json::parse(R"({"refs": []})")), std::invalid_argument);
  EXPECT_THROW(parse_instance(json::parse(R"({"norm": "l3", "refs": [{"x_ref": [0], "v": 1, "models": []}]})")),
               std::invalid_argument);
  EXPECT_THROW(parse_instance(json::parse(R"({"refs": [{"x_ref": [0], "v": 1,
      "models": [{"type": "lipschitz", "M": 1, "mono": ["up"]}]}]})")),
               std::invalid_argument);
  EXPECT_THROW(parse_instance(json::parse(R"({"refs": [{"x_ref": [0], "v": 1,
      "models": [{"type": "spline"}]}]})")),
               std::invalid_argument);
  EXPECT_THROW(parse_instance(json::parse(R"({"refs": [{"x_ref": [0], "v": 1,
      "models": [{"type": "lipschitz", "M": 1}]}], "feasible_set": {"lower": [0, 0]}})")),
               DimensionError);
  EXPECT_THROW(parse_instance(json::parse(R"({"refs": [{"x_ref": [0], "v": 1,
      "models": [{"type": "lipschitz", "M": 1}],
      "evaluator": {"type": "linear", "coef": [1, 2]}}]})")),
               DimensionError);
  EXPECT_THROW(parse_instance(json::parse(R"({"refs": [{"v": 1, "models": []}]})")), json::exception);
}

TEST(InstanceTest, LoadFromFile) {
  const auto dir = std::filesystem::path(testing::TempDir());
  const auto good = (dir / "line2.json").string();
  std::ofstream(good) << kLine2;
  EXPECT_EQ(load_instance(good).refs.size(), 2u);

  const auto bad = (dir / "broken.json").string();
  std::ofstream(bad) << "{\"refs\": [";
  EXPECT_THROW(load_instance(bad), std::runtime_error);
  EXPECT_THROW(load_instance((dir / "missing.json").string()), std::runtime_error);
}

}  // namespace
}  // namespace gammacomp::io
