#include "gammacomp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gammacomp::bench {

ParseError::ParseError(const std::string& file, int line, const std::string& what)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

std::vector<double> default_multipliers() {
  std::vector<double> m;
  for (int i = 0; i < 10; ++i) m.push_back(0.1 + (1.6 - 0.1) * i / 9.0);
  return m;
}

void ExperimentConfig::validate() const {
  if (!(sparsify_prob >= 0 && sparsify_prob <= 1)) throw std::invalid_argument("sparsify probability must be in [0, 1]");
  if (scenarios < 1) throw std::invalid_argument("scenario count must be >= 1");
  if (multipliers.empty()) throw std::invalid_argument("no budget multipliers");
  for (std::size_t i = 0; i < multipliers.size(); ++i) {
    if (!(multipliers[i] > 0)) throw std::invalid_argument("budget multipliers must be positive");
    if (i > 0 && !(multipliers[i] > multipliers[i - 1]))
      throw std::invalid_argument("budget multipliers must be ascending");
  }
  if (norms.empty()) throw std::invalid_argument("no norms selected");
  if (metrics.empty()) throw std::invalid_argument("no metrics selected");
  if (!topology_path && nodes < 2) throw std::invalid_argument("need at least two nodes");
  if (!(edge_prob >= 0 && edge_prob <= 1)) throw std::invalid_argument("edge probability must be in [0, 1]");
  if (!(cost_scale > 0)) throw std::invalid_argument("cost scale must be positive");
  if (!(pair_fraction > 0 && pair_fraction <= 1)) throw std::invalid_argument("pair fraction must be in (0, 1]");
  solve.validate();
}

Prices prices_from_draws(const Eigen::VectorXd& c, double C, const Eigen::VectorXd& xi_pre,
                         const Eigen::VectorXd& xi_in) {
  if ((c.array() <= 0).any()) throw std::invalid_argument("generate_costs: flow costs must be positive");
  if (!(C > 0)) throw std::invalid_argument("generate_costs: C must be positive");
  Prices p;
  p.pre = (C / c.array().sqrt()) * xi_pre.array();
  p.in = p.pre.array() * xi_in.array();
  return p;
}

Prices generate_costs(const Eigen::VectorXd& c, double C, Rng& rng) {
  std::uniform_real_distribution<double> pre(9.0, 11.0);
  std::uniform_real_distribution<double> in(1.05, 1.15);
  Eigen::VectorXd xi_pre(c.size());
  Eigen::VectorXd xi_in(c.size());
  for (Eigen::Index e = 0; e < c.size(); ++e) {
    xi_pre(e) = pre(rng);
    xi_in(e) = in(rng);
  }
  return prices_from_draws(c, C, xi_pre, xi_in);
}

net::DemandMatrix sparsify(const net::DemandMatrix& D, double p, Rng& rng) {
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("sparsify: probability must be in [0, 1]");
  std::bernoulli_distribution drop(p);
  net::DemandMatrix out{D.nodes, {}};
  for (const auto& d : D.entries)
    if (!drop(rng)) out.entries.push_back(d);
  return out;
}

std::vector<std::pair<int, int>> select_flow_pairs(const net::DemandMatrix& D, double fraction) {
  if (D.empty()) throw std::invalid_argument("select_flow_pairs: empty demand matrix");
  auto entries = D.entries;
  std::stable_sort(entries.begin(), entries.end(), [](const net::Demand& a, const net::Demand& b) {
    if (a.amount != b.amount) return a.amount > b.amount;
    return std::pair(a.source, a.target) < std::pair(b.source, b.target);
  });
  const auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(entries.size()) - 1e-9));
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < std::min(count, entries.size()); ++i)
    pairs.emplace_back(entries[i].source, entries[i].target);
  return pairs;
}

std::vector<net::Observation> observe(const net::NetworkInstance& network, const net::DemandMatrix& D,
                                      const Eigen::VectorXd& b, const std::vector<net::MetricKind>& metrics,
                                      double pair_fraction) {
  std::vector<net::Observation> out;
  for (const auto kind : metrics) {
    if (kind == net::MetricKind::MaxFlow) {
      for (const auto& [s, t] : select_flow_pairs(D, pair_fraction)) {
        net::MetricSpec spec{kind, s, t};
        out.push_back({spec, net::evaluate(spec, network, D, b)});
      }
    } else {
      net::MetricSpec spec{kind};
      out.push_back({spec, net::evaluate(spec, network, D, b)});
    }
  }
  return out;
}

namespace {

net::NetworkInstance synthetic_network(const ExperimentConfig& cfg, Rng& rng) {
  net::NetworkInstance network;
  network.nodes = cfg.nodes;
  // Directed ring for strong connectivity, then random chords.
  std::vector<std::pair<int, int>> arcs;
  for (int i = 0; i < cfg.nodes; ++i) arcs.emplace_back(i, (i + 1) % cfg.nodes);
  std::bernoulli_distribution keep(cfg.edge_prob);
  for (int u = 0; u < cfg.nodes; ++u)
    for (int v = 0; v < cfg.nodes; ++v)
      if (u != v && v != (u + 1) % cfg.nodes && keep(rng)) arcs.emplace_back(u, v);

  std::uniform_real_distribution<double> cost(1.0, 10.0);
  for (const auto& [u, v] : arcs) network.edges.push_back({u, v, cost(rng)});
  std::uniform_real_distribution<double> cap(5.0, 15.0);
  network.base_capacity.resize(network.num_edges());
  for (Eigen::Index e = 0; e < network.num_edges(); ++e) network.base_capacity(e) = cap(rng);
  return network;
}

net::DemandMatrix synthetic_demands(int nodes, Rng& rng) {
  std::uniform_real_distribution<double> amount(0.5, 2.0);
  net::DemandMatrix D{nodes, {}};
  for (int s = 0; s < nodes; ++s)
    for (int t = 0; t < nodes; ++t)
      if (s != t) D.entries.push_back({s, t, amount(rng)});
  return D;
}

}  // namespace

Experiment build_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  Experiment exp;
  net::DemandMatrix base;
  if (cfg.topology_path) {
    exp.network = load_network(*cfg.topology_path);
    base = cfg.demand_path ? load_demands(*cfg.demand_path, exp.network.nodes)
                           : synthetic_demands(exp.network.nodes, rng);
  } else {
    exp.network = synthetic_network(cfg, rng);
    base = synthetic_demands(cfg.nodes, rng);
  }
  const auto prices = generate_costs(exp.network.flow_costs(), cfg.cost_scale, rng);
  exp.network.price_pre = prices.pre;
  exp.network.price_in = prices.in;
  exp.network.validate();

  std::vector<net::DemandMatrix> demands;
  for (int i = 0; i < cfg.scenarios; ++i) demands.push_back(sparsify(base, cfg.sparsify_prob, rng));
  std::uniform_real_distribution<double> jitter(0.8, 1.2);
  double budget = 0.0;
  for (int i = 0; i < cfg.scenarios; ++i) {
    net::Scenario sc;
    sc.capacity = exp.network.base_capacity;
    for (Eigen::Index e = 0; e < sc.capacity.size(); ++e) sc.capacity(e) *= jitter(rng);
    sc.demand = std::move(demands[static_cast<std::size_t>(i)]);
    budget += exp.network.price_pre.dot(sc.capacity);
    exp.history.push_back(std::move(sc));
  }
  exp.mean_budget = budget / cfg.scenarios;
  for (auto& sc : exp.history)
    sc.observed = observe(exp.network, sc.demand, sc.capacity, cfg.metrics, cfg.pair_fraction);
  return exp;
}

std::vector<SweepRow> run_sweep(const Experiment& exp, const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& network = exp.network;
  const Eigen::Index n = network.num_edges();

  // Ground-truth evaluators aligned with build_metric_refs' ordering.
  struct Target {
    const net::Scenario* scenario;
    net::MetricSpec metric;
  };
  std::vector<Target> targets;
  for (const auto& sc : exp.history)
    for (const auto& obs : sc.observed) targets.push_back({&sc, obs.metric});

  std::vector<SweepRow> rows;
  for (const double mult : cfg.multipliers) {
    using Half = FeasibleSet<double>::Halfspace;
    const FeasibleSet<double> K(Eigen::VectorXd::Zero(n),
                                Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity()),
                                {Half{network.price_pre, mult * exp.mean_budget}});
    for (const NormKind norm : cfg.norms) {
      SweepRow row{mult, norm, std::nan(""), {}, {}, 0.0, 0, false, {}};
      const auto start = std::chrono::steady_clock::now();
      try {
        const auto refs = net::build_metric_refs(network, exp.history, norm);
        SolveConfig sc = cfg.solve;
        sc.norm = norm;
        const auto sol = solve_caolf(refs, K, sc);
        row.gamma = sol.gamma;
        row.iterations = sol.diagnostics.iterations;

        std::vector<MetricEvaluator<double>> evaluators;
        for (std::size_t i = 0; i < refs.size(); ++i) {
          const double value = net::evaluate(targets[i].metric, network, targets[i].scenario->demand, sol.x);
          row.metric_ids.push_back(refs[i].id);
          row.ratios.push_back(value / refs[i].v);
          evaluators.push_back({[value](const Eigen::VectorXd&) { return value; }, refs[i].v, refs[i].sense});
        }
        row.verified = verify_competitiveness(sol.x, sol.gamma + 1e-6, evaluators).competitive;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      if (cfg.record_wall_time)
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  return run_sweep(build_experiment(cfg), cfg);
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

bool blank_or_comment(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

// Reads exactly `count` whitespace-separated fields and rejects trailing text.
template <typename... Ts>
bool read_fields(const std::string& line, Ts&... fields) {
  std::istringstream ss(line);
  (ss >> ... >> fields);
  if (!ss) return false;
  std::string rest;
  return !(ss >> rest);
}

}  // namespace

net::NetworkInstance load_network(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  int lineno = 0;
  int k = -1;
  long n = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    if (!read_fields(line, k, n) || k < 1 || n < 0) throw ParseError(path, lineno, "expected header 'k n'");
    break;
  }
  if (k < 0) throw ParseError(path, lineno, "missing header");
  net::NetworkInstance network;
  network.nodes = k;
  std::vector<double> caps;
  while (static_cast<long>(network.edges.size()) < n && std::getline(in, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    int u = 0;
    int v = 0;
    double cost = 0;
    double cap = 0;
    if (!read_fields(line, u, v, cost, cap)) throw ParseError(path, lineno, "expected 'tail head cost capacity'");
    if (u < 0 || u >= k || v < 0 || v >= k) throw ParseError(path, lineno, "vertex out of range");
    if (u == v) throw ParseError(path, lineno, "self-loop");
    if (!(cost >= 0) || !(cap >= 0)) throw ParseError(path, lineno, "negative cost or capacity");
    network.edges.push_back({u, v, cost});
    caps.push_back(cap);
  }
  if (static_cast<long>(network.edges.size()) != n)
    throw ParseError(path, lineno, "expected " + std::to_string(n) + " edges, found " +
                                       std::to_string(network.edges.size()));
  while (std::getline(in, line)) {
    ++lineno;
    if (!blank_or_comment(line)) throw ParseError(path, lineno, "unexpected trailing content");
  }
  network.base_capacity = Eigen::Map<const Eigen::VectorXd>(caps.data(), static_cast<Eigen::Index>(caps.size()));
  return network;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

}  // namespace

void save_network(const net::NetworkInstance& network, const std::string& path) {
  auto out = open_output(path);
  out << network.nodes << ' ' << network.num_edges() << '\n';
  for (Eigen::Index e = 0; e < network.num_edges(); ++e) {
    const auto& edge = network.edges[static_cast<std::size_t>(e)];
    out << edge.tail << ' ' << edge.head << ' ' << fmt(edge.cost) << ' ' << fmt(network.base_capacity(e)) << '\n';
  }
}

net::DemandMatrix load_demands(const std::string& path, int nodes) {
  auto in = open_input(path);
  net::DemandMatrix D{nodes, {}};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    int s = 0;
    int t = 0;
    double amount = 0;
    if (!read_fields(line, s, t, amount)) throw ParseError(path, lineno, "expected 's t amount'");
    if (s < 0 || s >= nodes || t < 0 || t >= nodes) throw ParseError(path, lineno, "vertex out of range");
    if (s == t) throw ParseError(path, lineno, "source equals target");
    if (!(amount > 0) || !std::isfinite(amount)) throw ParseError(path, lineno, "amount must be positive");
    D.entries.push_back({s, t, amount});
  }
  return D;
}

void save_demands(const net::DemandMatrix& D, const std::string& path) {
  auto out = open_output(path);
  for (const auto& d : D.entries) out << d.source << ' ' << d.target << ' ' << fmt(d.amount) << '\n';
}

void write_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "budget_mult,norm,gamma,metric_id,ratio,wall_ms,iters\n";
  for (const auto& row : rows) {
    const std::string prefix = fmt_short(row.multiplier) + "," + to_string(row.norm) + ",";
    const std::string suffix = "," + fmt_short(row.wall_ms) + "," + std::to_string(row.iterations) + "\n";
    if (!row.error.empty()) {
      out << prefix << "nan,error,nan" << suffix;
      continue;
    }
    for (std::size_t i = 0; i < row.metric_ids.size(); ++i)
      out << prefix << fmt_short(row.gamma) << "," << row.metric_ids[i] << "," << fmt_short(row.ratios[i]) << suffix;
  }
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  auto out = open_output(path);
  write_csv(rows, out);
}

}  // namespace gammacomp::bench
