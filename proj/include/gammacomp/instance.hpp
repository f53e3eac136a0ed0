#pragma once

// JSON instance files for the CLI.
//
// {
//   "norm": "l2",
//   "tolerances": {"gamma": 1e-6, "feasibility": 1e-7, "max_iters": 5000},
//   "feasible_set": {
//     "lower": [0, 0] | null,          // absent: zeros; null (or null entries): unbounded
//     "upper": [10, 10] | null,        // absent/null: unbounded
//     "halfspaces": [{"a": [1, 1], "b": 4}]
//   },
//   "refs": [{
//     "id": "f1", "x_ref": [0, 0], "v": 1.0, "sense": "min" | "max",
//     "models": [
//       {"type": "lipschitz", "M": 1.0, "norm": "l2", "mono": ["inc", "dec", "none"]},
//       {"type": "concave", "grad": [1, 0]},
//       {"type": "quadratic", "grad": [0, 0], "L": 1.0}
//     ],
//     "evaluator": {"type": "abs_sum", "offset": 1, "weights": [1, 1], "centers": [0, 0]}
//   }]
// }
//
// Evaluators (optional, for verify/oracle):
//   abs_sum:   offset + sum_j weights_j |x_j - centers_j|
//   linear:    offset + coef . x
//   quadratic: offset + scale ||x - center||^2

#include "gammacomp/caolf.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace gammacomp::io {

struct Instance {
  std::vector<MetricRef<double>> refs;
  FeasibleSet<double> K;
  SolveConfig cfg;
  std::vector<std::optional<MetricEvaluator<double>>> evaluators;  // one slot per ref

  bool all_lipschitz() const;
  /// Switches the solve norm. Lipschitz models on the previous instance-wide
  /// norm follow it; models declared with another norm keep theirs.
  void set_norm(NormKind norm);
  bool has_evaluators() const;
  std::vector<MetricEvaluator<double>> require_evaluators() const;
};

Instance parse_instance(const nlohmann::json& j);
Instance load_instance(const std::string& path);

/// Dispatches to solve_caolf when every model is Lipschitz in cfg.norm,
/// otherwise to solve_approx.
CompetitiveSolution<double> solve_instance(const Instance& inst);

nlohmann::json to_json(const CompetitiveSolution<double>& sol);

}  // namespace gammacomp::io
