// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
// here; the exit status is non-zero when any criterion fails.

#include "gammacomp/bench.hpp"
#include "gammacomp/caolf.hpp"
#include "gammacomp/lp.hpp"
#include "gammacomp/network.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace gammacomp;
using Vec = Eigen::VectorXd;
using Ref = MetricRef<double>;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Clip written out independently of the library.
Vec my_clip(const Vec& x, const Vec& ref, const std::vector<Monotonicity>& mono, Sense sense) {
  Vec d(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    auto m = mono[static_cast<std::size_t>(j)];
    if (sense == Sense::Maximize && m != Monotonicity::NonMonotone)
      m = m == Monotonicity::Increasing ? Monotonicity::Decreasing : Monotonicity::Increasing;
    const double diff = x(j) - ref(j);
    if (m == Monotonicity::Increasing)
      d(j) = std::max(diff, 0.0);
    else if (m == Monotonicity::Decreasing)
      d(j) = std::max(-diff, 0.0);
    else
      d(j) = diff;
  }
  return d;
}

double my_norm(const Vec& d, NormKind k) {
  if (k == NormKind::L1) return d.cwiseAbs().sum();
  if (k == NormKind::LInf) return d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
  return std::sqrt(d.squaredNorm());
}

Ref lipschitz(const Vec& x, double v, double M, NormKind norm, std::vector<Monotonicity> mono,
              Sense sense = Sense::Minimize) {
  Ref r;
  r.id = "f";
  r.x_ref = x;
  r.v = v;
  r.sense = sense;
  r.models.push_back(LipschitzNorm<double>{M, norm, std::move(mono)});
  return r;
}

std::vector<Ref> line_refs(double M1, double M2, NormKind norm) {
  const std::vector<Monotonicity> none{Monotonicity::NonMonotone};
  return {lipschitz(Vec::Zero(1), 1, M1, norm, none), lipschitz(Vec::Ones(1), 1, M2, norm, none)};
}

const NormKind kNorms[] = {NormKind::L1, NormKind::L2, NormKind::LInf};

// Random 2-D instance with evaluators consistent with each ref's model:
// f = v +- alpha M phi(||clip(x)||) where phi is 1-Lipschitz, increasing and
// phi(0) = 0, so f is M-Lipschitz, monotone as declared, and f(x_ref) = v.
struct RandomInstance {
  std::vector<Ref> refs;
  std::vector<MetricEvaluator<double>> evaluators;
  FeasibleSet<double> K;
  NormKind norm;
};

RandomInstance random_instance(std::mt19937& rng, NormKind norm, bool piecewise_linear, bool with_budget) {
  std::uniform_real_distribution<double> coord(0, 4), val(0.5, 2), lip(0.5, 3), alpha(0.5, 1), unit(0, 1);
  std::uniform_int_distribution<int> count(2, 4), mono_pick(0, 2);
  RandomInstance inst;
  inst.norm = norm;
  const int m = count(rng);
  double max_sum = 0;
  for (int i = 0; i < m; ++i) {
    const Vec x = (Vec(2) << coord(rng), coord(rng)).finished();
    max_sum = std::max(max_sum, x.sum());
    std::vector<Monotonicity> mono;
    for (int j = 0; j < 2; ++j) mono.push_back(static_cast<Monotonicity>(mono_pick(rng)));
    const Sense sense = unit(rng) < 0.7 ? Sense::Minimize : Sense::Maximize;
    const double v = val(rng), M = lip(rng);
    const double a = piecewise_linear ? 1.0 : alpha(rng);
    const bool hyperbola = !piecewise_linear && unit(rng) < 0.5;
    inst.refs.push_back(lipschitz(x, v, M, norm, mono, sense));
    auto f = [=](const Vec& y) {
      const double t = my_norm(my_clip(y, x, mono, sense), norm);
      const double phi = hyperbola ? std::sqrt(1 + t * t) - 1 : t;
      return sense == Sense::Minimize ? v + a * M * phi : v - a * M * phi;
    };
    inst.evaluators.push_back({f, v, sense});
  }
  std::vector<FeasibleSet<double>::Halfspace> hs;
  if (with_budget) hs.push_back({Vec::Ones(2), std::min(max_sum + 0.5, 8.0)});
  inst.K = FeasibleSet<double>(Vec::Zero(2), Vec::Constant(2, 4.0), hs);
  return inst;
}

SolveConfig config(NormKind norm) {
  SolveConfig cfg;
  cfg.norm = norm;
  return cfg;
}

// 1. Two-metric line example.
Outcome line_golden() {
  const auto t0 = Clock::now();
  const double cases[][2] = {{1, 1}, {2, 1}, {10, 3}};
  double gerr = 0, xerr = 0;
  for (const auto& c : cases) {
    const double g = c[0] * c[1] / (c[0] + c[1]);
    const auto sol = solve_caolf(line_refs(c[0], c[1], NormKind::L2), FeasibleSet<double>::unbounded(1), config(NormKind::L2));
    gerr = std::max(gerr, std::abs(sol.gamma - g));
    xerr = std::max(xerr, std::abs(sol.x(0) - g / c[0]));
  }
  const double t = seconds_since(t0);
  return {gerr <= 1e-5 && xerr <= 1e-4 && t < 1.0,
          fmt("Two-metric line: max |gamma err| %.2e (tol 1e-5), max |x err| %.2e (tol 1e-4), %.3f s (< 1 s)", gerr,
              xerr, t)};
}

// 2. Stability under approximate Lipschitz constants.
Outcome stability() {
  const auto t0 = Clock::now();
  const auto refs = line_refs(100, 1, NormKind::L2);
  const auto K = FeasibleSet<double>::unbounded(1);
  const auto base = solve_caolf(refs, K, config(NormKind::L2));
  const auto pert = stability_probe(refs, K, config(NormKind::L2), {1.0, 2.0});
  const double ratio_err = std::abs(pert.gamma / base.gamma - 1.01 / 0.51);

  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> kap(0.5, 3);
  int violations = 0;
  double worst = -1e300;
  for (int trial = 0; trial < 100; ++trial) {
    const NormKind norm = trial % 2 ? NormKind::L1 : NormKind::LInf;
    const auto inst = random_instance(rng, norm, true, trial % 3 == 0);
    const auto star = solve_caolf(inst.refs, inst.K, config(norm));
    std::vector<double> kappa;
    for (std::size_t i = 0; i < inst.refs.size(); ++i) kappa.push_back(kap(rng));
    const double kmax = *std::max_element(kappa.begin(), kappa.end());
    const auto tilde = stability_probe(inst.refs, inst.K, config(norm), kappa);
    for (std::size_t i = 0; i < inst.refs.size(); ++i) {
      const auto& e = inst.evaluators[i];
      const double lhs = std::abs(e.f(tilde.x) - e.v);
      const double rhs = kmax / kappa[i] * star.gamma * e.v + 1e-6;
      worst = std::max(worst, lhs - rhs);
      if (lhs > rhs) ++violations;
    }
  }
  const double t = seconds_since(t0);
  return {ratio_err <= 1e-3 && violations == 0 && t < 10.0,
          fmt("Stability: ratio err %.2e (tol 1e-3), bound violations %.0f of 100 instances, %.2f s (< 10 s)",
              ratio_err, violations, t)};
}

// 3. Solutions are competitive for the true metrics.
Outcome end_to_end() {
  const auto t0 = Clock::now();
  std::mt19937 rng(7);
  int failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const NormKind norm = kNorms[trial % 3];
    const auto inst = random_instance(rng, norm, false, trial % 2 == 0);
    const auto sol = solve_caolf(inst.refs, inst.K, config(norm));
    const bool in_K = inst.K.contains(sol.x, 1e-9);
    if (!in_K || !verify_competitiveness(sol.x, sol.gamma + 1e-6, inst.evaluators).competitive) ++failures;
  }
  const double t = seconds_since(t0);
  return {failures == 0 && t < 30.0,
          fmt("End-to-end verification: %.0f of 200 solutions fail at gamma + 1e-6, %.2f s (< 30 s)", failures, t)};
}

// 4. Agreement with brute-force grids.
Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937 rng(99);
  const int res = 401;
  int failures = 0;
  double worst_gap = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const NormKind norm = kNorms[trial % 3];
    const auto inst = random_instance(rng, norm, false, trial % 2 == 1);
    const auto sol = solve_caolf(inst.refs, inst.K, config(norm));

    const double step = 4.0 / (res - 1);
    double max_M = 0, min_v = 1e300;
    for (const auto& r : inst.refs) {
      max_M = std::max(max_M, std::get<LipschitzNorm<double>>(r.models[0]).M);
      min_v = std::min(min_v, r.v);
    }
    const double err = 2 * step * max_M / min_v;

    double grid = 1e300;
    Vec x(2);
    for (int a = 0; a < res; ++a)
      for (int b = 0; b < res; ++b) {
        x << a * step, b * step;
        if (!inst.K.contains(x, 1e-12)) continue;
        double g = 0;
        for (const auto& r : inst.refs) {
          const auto& lm = std::get<LipschitzNorm<double>>(r.models[0]);
          g = std::max(g, lm.M * my_norm(my_clip(x, r.x_ref, lm.mono, r.sense), norm) / r.v);
        }
        grid = std::min(grid, g);
      }
    const auto swcm = grid_oracle_swcm(inst.evaluators, inst.K, res);
    worst_gap = std::max(worst_gap, std::abs(sol.gamma - grid) / err);
    if (std::abs(sol.gamma - grid) > err || sol.gamma < swcm.gamma - err) ++failures;
  }
  const double t = seconds_since(t0);
  return {failures == 0 && t < 60.0,
          fmt("Oracle equivalence: %.0f of 50 instances outside grid error, worst |gap|/err %.3f, %.2f s (< 60 s)",
              failures, worst_gap, t)};
}

net::NetworkInstance make_net(int nodes, std::vector<net::Edge> edges) {
  net::NetworkInstance n;
  n.nodes = nodes;
  n.edges = std::move(edges);
  n.base_capacity = Vec::Ones(n.num_edges());
  n.price_pre = Vec::Ones(n.num_edges());
  n.price_in = Vec::Constant(n.num_edges(), 1.1);
  return n;
}

double min_cut(const net::NetworkInstance& n, const Vec& b, int s, int t) {
  double best = 1e300;
  for (unsigned mask = 0; mask < (1u << n.nodes); ++mask) {
    if (!(mask >> s & 1u) || (mask >> t & 1u)) continue;
    double cut = 0;
    for (std::size_t e = 0; e < n.edges.size(); ++e)
      if ((mask >> n.edges[e].tail & 1u) && !(mask >> n.edges[e].head & 1u)) cut += b(static_cast<Eigen::Index>(e));
    best = std::min(best, cut);
  }
  return best;
}

struct Graph {
  net::NetworkInstance net;
  Vec b;
};

Graph random_graph(std::mt19937& rng, int nodes, double p, bool ring) {
  std::bernoulli_distribution keep(p);
  std::uniform_int_distribution<int> cap(1, 6);
  std::uniform_real_distribution<double> cost(1, 5), price(1, 3);
  std::vector<net::Edge> edges;
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j)
      if (i != j && (keep(rng) || (ring && j == (i + 1) % nodes))) edges.push_back({i, j, cost(rng)});
  Graph g{make_net(nodes, edges), Vec(static_cast<Eigen::Index>(edges.size()))};
  for (Eigen::Index e = 0; e < g.b.size(); ++e) {
    g.b(e) = cap(rng);
    g.net.price_in(e) = price(rng);
  }
  return g;
}

// 5. Network metric unit suite.
Outcome metric_suite() {
  const auto t0 = Clock::now();
  std::vector<std::string> failed;
  for (int n = 3; n <= 5; ++n) {
    std::vector<net::WeightedEdge> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
    if (std::abs(net::lambda2(n, edges) - n) > 1e-8) failed.push_back("K_" + std::to_string(n));
  }
  if (std::abs(net::lambda2(3, {{0, 1, 1.0}, {1, 2, 1.0}}) - 1.0) > 1e-8) failed.push_back("P3");
  if (std::abs(net::lambda2(2, {{0, 1, 0.35}}) - 0.7) > 1e-8) failed.push_back("single edge");

  std::mt19937 rng(5);
  int cut_mismatch = 0;
  for (int nodes = 2; nodes <= 6; ++nodes)
    for (int trial = 0; trial < 40; ++trial) {
      const auto g = random_graph(rng, nodes, 0.45, false);
      for (int s = 0; s < nodes; ++s)
        for (int t = 0; t < nodes; ++t)
          if (s != t && std::abs(net::max_flow(g.net, g.b, s, t) - min_cut(g.net, g.b, s, t)) > 1e-9) ++cut_mismatch;
    }
  if (cut_mismatch) failed.push_back("max-flow/min-cut x" + std::to_string(cut_mismatch));

  auto two = make_net(2, {{0, 1, 1}, {0, 1, 5}});
  two.price_in = Vec::Constant(2, 2.0);
  if (std::abs(net::mccf_value(two, net::DemandMatrix{2, {{0, 1, 3}}}, (Vec(2) << 1, 10).finished()) - 7.0) > 1e-9)
    failed.push_back("MCCF two-edge");

  std::normal_distribution<double> dir(0, 1);
  std::uniform_real_distribution<double> amt(0.5, 3), len(0.01, 2);
  int lip_violations = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const int nodes = 3 + trial % 3;
    const auto g = random_graph(rng, nodes, 0.3, true);
    net::DemandMatrix D{nodes, {}};
    for (int s = 0; s < nodes; ++s)
      for (int t = 0; t < nodes; ++t)
        if (s != t && rng() % 2) D.entries.push_back({s, t, amt(rng)});
    if (D.empty()) D.entries.push_back({0, 1, 1.0});
    const double f0 = net::mccf_value(g.net, D, g.b);
    for (int k = 0; k < 5; ++k) {
      Vec d(g.b.size());
      for (Eigen::Index e = 0; e < d.size(); ++e) d(e) = dir(rng);
      const Vec b2 = (g.b + len(rng) * d / d.norm()).cwiseMax(0.0);
      const double df = std::abs(net::mccf_value(g.net, D, b2) - f0);
      for (auto norm : kNorms)
        if (df > dual_norm_value(g.net.price_in, norm) * my_norm(b2 - g.b, norm) + 1e-9) ++lip_violations;
    }
  }
  if (lip_violations) failed.push_back("MCCF Lipschitz x" + std::to_string(lip_violations));

  const double t = seconds_since(t0);
  std::string detail = "Metric unit suite: ";
  if (failed.empty()) {
    detail += "all checks hold";
  } else {
    detail += "failed";
    for (const auto& f : failed) detail += " [" + f + "]";
  }
  detail += fmt(", %.2f s (< 30 s)", t);
  return {failed.empty() && t < 30.0, detail};
}

std::string csv(const std::vector<bench::SweepRow>& rows) {
  std::ostringstream out;
  bench::write_csv(rows, out);
  return out.str();
}

// 6. Desk-scale sweep.
Outcome sweep() {
  bench::ExperimentConfig cfg;  // 12 nodes, 5 scenarios, 10 multipliers, three norms
  cfg.record_wall_time = false;
  const auto t0 = Clock::now();
  const auto exp = bench::build_experiment(cfg);
  const auto rows = bench::run_sweep(exp, cfg);
  const double t = seconds_since(t0);

  int errors = 0, unverified = 0, increases = 0;
  for (const auto norm : cfg.norms) {
    double prev = 1e300;
    for (const auto& r : rows) {
      if (r.norm != norm) continue;
      if (!r.error.empty()) ++errors;
      if (!r.verified) ++unverified;
      if (r.gamma > prev + 1e-6) ++increases;
      prev = std::min(prev, r.gamma);
    }
  }
  const bool deterministic = csv(rows) == csv(bench::run_sweep(cfg));
  const bool shape = rows.size() == cfg.multipliers.size() * cfg.norms.size();
  std::string detail = fmt("Desk-scale sweep: %.0f nodes, %.0f edges, %.1f s (< 300 s); ", exp.network.nodes,
                           static_cast<double>(exp.network.num_edges()), t);
  detail += fmt("%.0f solver errors, %.0f unverified rows, %.0f gamma increases; ", errors, unverified, increases);
  detail += deterministic ? "CSV deterministic" : "CSV differs between runs";
  return {t < 300.0 && errors == 0 && unverified == 0 && increases == 0 && deterministic && shape, detail};
}

// 7. LP kernel.
Outcome lp_kernel() {
  const auto t0 = Clock::now();
  std::vector<std::string> failed;
  {
    LpProblem<double> p(1);
    p.c << -1;
    p.A_ub = Eigen::MatrixXd::Ones(1, 1);
    p.b_ub = Vec::Ones(1);
    const auto s = solve_lp(p);
    if (!s.optimal() || std::abs(s.z(0) - 1) > 1e-12 || std::abs(s.objective + 1) > 1e-12) failed.push_back("trivial");
    p.c << 0;
    p.b_ub << -1;
    if (solve_lp(p).status != LpStatus::Infeasible) failed.push_back("infeasible");
    LpProblem<double> u(1);
    u.c << -1;
    if (solve_lp(u).status != LpStatus::Unbounded) failed.push_back("unbounded");
  }

  std::mt19937 rng(77);
  int flow_mismatch = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int nodes = 4 + trial % 5;
    const auto g = random_graph(rng, nodes, 0.4, false);
    const int s = 0, t = nodes - 1;
    const double dinic = net::max_flow(g.net, g.b, s, t);
    const double lp = net::max_flow_lp(g.net, g.b, s, t);
    if (std::abs(dinic - lp) > 1e-9 || dinic != std::round(dinic)) ++flow_mismatch;
  }
  if (flow_mismatch) failed.push_back("max-flow LP x" + std::to_string(flow_mismatch));

  double gerr = 0;
  const double cases[][2] = {{1, 1}, {2, 1}, {10, 3}};
  for (const auto& c : cases) {
    const auto sol = solve_caolf(line_refs(c[0], c[1], NormKind::LInf), FeasibleSet<double>::unbounded(1),
                                 config(NormKind::LInf));
    gerr = std::max(gerr, std::abs(sol.gamma - c[0] * c[1] / (c[0] + c[1])));
    if (sol.diagnostics.method != "epigraph-lp") failed.push_back("Linf path not LP");
  }
  if (gerr > 1e-5) failed.push_back("line example via Linf LP");

  std::string detail = "LP kernel: ";
  if (failed.empty()) {
    detail += "triple ok, 20 max-flow LPs match Dinic";
  } else {
    detail += "failed";
    for (const auto& f : failed) detail += " [" + f + "]";
  }
  detail += fmt(", line example via Linf LP err %.2e (tol 1e-5), %.2f s", gerr, seconds_since(t0));
  return {failed.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1", line_golden}, {"AC2", stability}, {"AC3", end_to_end}, {"AC4", oracle_equivalence},
      {"AC5", metric_suite},  {"AC6", sweep},     {"AC7", lp_kernel}};
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o{false, ""};
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s %s  %s\n", name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
