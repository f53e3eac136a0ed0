#include "gammacomp/instance.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace gammacomp::io {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd vec(const json& j, const std::string& what) {
  if (!j.is_array()) throw std::invalid_argument(what + ": expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

// Bound vector where null entries (or a null vector) mean `fill`.
Eigen::VectorXd bounds(const json& j, Eigen::Index n, double fill, const std::string& what) {
  if (j.is_null()) return Eigen::VectorXd::Constant(n, fill);
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n)
    throw DimensionError(what + ": expected an array of length " + std::to_string(n));
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& e = j[static_cast<std::size_t>(i)];
    v(i) = e.is_null() ? fill : e.get<double>();
  }
  return v;
}

Monotonicity parse_mono(const std::string& s) {
  if (s == "inc" || s == "increasing") return Monotonicity::Increasing;
  if (s == "dec" || s == "decreasing") return Monotonicity::Decreasing;
  if (s == "none" || s == "nonmonotone") return Monotonicity::NonMonotone;
  throw std::invalid_argument("unknown monotonicity '" + s + "'");
}

Sense parse_sense(const std::string& s) {
  if (s == "min" || s == "minimize") return Sense::Minimize;
  if (s == "max" || s == "maximize") return Sense::Maximize;
  throw std::invalid_argument("unknown sense '" + s + "'");
}

ConstraintModel<double> parse_model(const json& j, Eigen::Index n, NormKind default_norm) {
  const auto type = j.at("type").get<std::string>();
  if (type == "lipschitz") {
    LipschitzNorm<double> m{j.at("M").get<double>(), default_norm, {}};
    if (j.contains("norm")) m.norm = parse_norm(j["norm"].get<std::string>());
    if (j.contains("mono")) {
      for (const auto& s : j["mono"]) m.mono.push_back(parse_mono(s.get<std::string>()));
    } else {
      m.mono.assign(static_cast<std::size_t>(n), Monotonicity::NonMonotone);
    }
    return m;
  }
  if (type == "concave") return ConcaveLinear<double>{vec(j.at("grad"), "grad")};
  if (type == "quadratic") return ConvexQuadratic<double>{vec(j.at("grad"), "grad"), j.at("L").get<double>()};
  throw std::invalid_argument("unknown model type '" + type + "'");
}

MetricEvaluator<double> parse_evaluator(const json& j, const MetricRef<double>& ref) {
  const auto type = j.at("type").get<std::string>();
  const double offset = j.value("offset", 0.0);
  std::function<double(const Eigen::VectorXd&)> f;
  if (type == "abs_sum") {
    const Eigen::VectorXd w = vec(j.at("weights"), "weights");
    const Eigen::VectorXd c = vec(j.at("centers"), "centers");
    if (w.size() != ref.dimension() || c.size() != ref.dimension()) throw DimensionError("abs_sum evaluator: size");
    f = [=](const Eigen::VectorXd& x) { return offset + w.dot((x - c).cwiseAbs()); };
  } else if (type == "linear") {
    const Eigen::VectorXd a = vec(j.at("coef"), "coef");
    if (a.size() != ref.dimension()) throw DimensionError("linear evaluator: size");
    f = [=](const Eigen::VectorXd& x) { return offset + a.dot(x); };
  } else if (type == "quadratic") {
    const Eigen::VectorXd c = vec(j.at("center"), "center");
    const double scale = j.value("scale", 1.0);
    if (c.size() != ref.dimension()) throw DimensionError("quadratic evaluator: size");
    f = [=](const Eigen::VectorXd& x) { return offset + scale * (x - c).squaredNorm(); };
  } else {
    throw std::invalid_argument("unknown evaluator type '" + type + "'");
  }
  return {std::move(f), ref.v, ref.sense};
}

}  // namespace

bool Instance::all_lipschitz() const {
  for (const auto& r : refs)
    for (const auto& m : r.models) {
      const auto* lip = std::get_if<LipschitzNorm<double>>(&m);
      if (!lip || lip->norm != cfg.norm) return false;
    }
  return true;
}

void Instance::set_norm(NormKind norm) {
  for (auto& r : refs)
    for (auto& m : r.models)
      if (auto* lip = std::get_if<LipschitzNorm<double>>(&m); lip && lip->norm == cfg.norm) lip->norm = norm;
  cfg.norm = norm;
}

bool Instance::has_evaluators() const {
  for (const auto& e : evaluators)
    if (!e) return false;
  return !evaluators.empty();
}

std::vector<MetricEvaluator<double>> Instance::require_evaluators() const {
  if (!has_evaluators()) throw std::invalid_argument("instance: every ref needs an 'evaluator'");
  std::vector<MetricEvaluator<double>> out;
  for (const auto& e : evaluators) out.push_back(*e);
  return out;
}

Instance parse_instance(const json& j) {
  Instance inst;
  if (j.contains("norm")) inst.cfg.norm = parse_norm(j["norm"].get<std::string>());
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    inst.cfg.gamma_tolerance = t.value("gamma", inst.cfg.gamma_tolerance);
    inst.cfg.feasibility_tolerance = t.value("feasibility", inst.cfg.feasibility_tolerance);
    inst.cfg.max_projection_iters = t.value("max_iters", inst.cfg.max_projection_iters);
  }
  const auto& refs = j.at("refs");
  if (!refs.is_array() || refs.empty()) throw std::invalid_argument("instance: 'refs' must be a non-empty array");
  for (const auto& r : refs) {
    MetricRef<double> ref;
    ref.id = r.value("id", "f" + std::to_string(inst.refs.size() + 1));
    ref.x_ref = vec(r.at("x_ref"), "x_ref");
    ref.v = r.at("v").get<double>();
    ref.sense = parse_sense(r.value("sense", std::string("min")));
    for (const auto& m : r.at("models")) ref.models.push_back(parse_model(m, ref.dimension(), inst.cfg.norm));
    ref.validate();
    inst.evaluators.push_back(r.contains("evaluator") ? std::optional(parse_evaluator(r["evaluator"], ref))
                                                      : std::nullopt);
    inst.refs.push_back(std::move(ref));
  }
  const Eigen::Index n = inst.refs.front().dimension();
  const json fs = j.value("feasible_set", json::object());
  const Eigen::VectorXd lower =
      fs.contains("lower") ? bounds(fs["lower"], n, -kInf, "lower") : Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd upper = bounds(fs.value("upper", json()), n, kInf, "upper");
  std::vector<FeasibleSet<double>::Halfspace> halfspaces;
  for (const auto& h : fs.value("halfspaces", json::array())) {
    Eigen::VectorXd a = vec(h.at("a"), "halfspace a");
    if (a.size() != n) throw DimensionError("halfspace dimension mismatch");
    halfspaces.push_back({std::move(a), h.at("b").get<double>()});
  }
  inst.K = FeasibleSet<double>(lower, upper, std::move(halfspaces));
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return parse_instance(j);
}

CompetitiveSolution<double> solve_instance(const Instance& inst) {
  if (inst.all_lipschitz()) return solve_caolf(inst.refs, inst.K, inst.cfg);
  return solve_approx(inst.refs, inst.K, inst.cfg);
}

json to_json(const CompetitiveSolution<double>& sol) {
  json j;
  j["x"] = std::vector<double>(sol.x.data(), sol.x.data() + sol.x.size());
  j["gamma"] = sol.gamma;
  if (!sol.slacks.empty()) j["slacks"] = sol.slacks;
  j["iterations"] = sol.diagnostics.iterations;
  j["residual"] = sol.diagnostics.residual;
  j["method"] = sol.diagnostics.method;
  return j;
}

}  // namespace gammacomp::io
