#include "gammacomp/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace gammacomp::net {

VectorXd NetworkInstance::flow_costs() const {
  VectorXd c(num_edges());
  for (Eigen::Index e = 0; e < num_edges(); ++e) c(e) = edges[static_cast<std::size_t>(e)].cost;
  return c;
}

void NetworkInstance::validate() const {
  if (nodes < 1) throw std::invalid_argument("network: node count must be positive");
  for (const auto& e : edges) {
    if (e.tail < 0 || e.tail >= nodes || e.head < 0 || e.head >= nodes)
      throw std::invalid_argument("network: edge endpoint out of range");
    if (e.tail == e.head) throw std::invalid_argument("network: self-loop");
    if (!(e.cost >= 0)) throw std::invalid_argument("network: negative flow cost");
  }
  const auto n = num_edges();
  if (base_capacity.size() != n) throw DimensionError("network: base capacity size mismatch");
  if ((base_capacity.array() < 0).any()) throw std::invalid_argument("network: negative capacity");
  if (price_pre.size() != 0 && price_pre.size() != n) throw DimensionError("network: price size mismatch");
  if (price_in.size() != 0 && price_in.size() != n) throw DimensionError("network: price size mismatch");
  if (price_pre.size() && (price_pre.array() <= 0).any())
    throw std::invalid_argument("network: prices must be positive");
  if (price_in.size() && (price_in.array() <= 0).any())
    throw std::invalid_argument("network: prices must be positive");
}

void DemandMatrix::validate() const {
  for (const auto& d : entries) {
    if (d.source < 0 || d.source >= nodes || d.target < 0 || d.target >= nodes)
      throw std::invalid_argument("demand: vertex out of range");
    if (d.source == d.target) throw std::invalid_argument("demand: source equals target");
    if (!std::isfinite(d.amount)) throw std::invalid_argument("demand: non-finite amount");
  }
}

const char* to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Mccf: return "mccf";
    case MetricKind::MaxFlow: return "maxflow";
    case MetricKind::Lambda2: return "lambda2";
  }
  return "?";
}

MetricKind parse_metric_kind(const std::string& s) {
  if (s == "mccf") return MetricKind::Mccf;
  if (s == "maxflow") return MetricKind::MaxFlow;
  if (s == "lambda2") return MetricKind::Lambda2;
  throw std::invalid_argument("unknown metric '" + s + "' (expected mccf, maxflow or lambda2)");
}

std::string MetricSpec::label() const {
  if (kind == MetricKind::MaxFlow)
    return "maxflow[" + std::to_string(source) + "->" + std::to_string(target) + "]";
  return to_string(kind);
}

MatrixXd incidence(const NetworkInstance& net) {
  MatrixXd A = MatrixXd::Zero(net.nodes, net.num_edges());
  for (Eigen::Index e = 0; e < net.num_edges(); ++e) {
    const auto& edge = net.edges[static_cast<std::size_t>(e)];
    A(edge.tail, e) = 1.0;
    A(edge.head, e) = -1.0;
  }
  return A;
}

MatrixXd demand_to_supply(const DemandMatrix& D) {
  D.validate();
  MatrixXd DA = MatrixXd::Zero(D.nodes, D.nodes);
  for (const auto& d : D.entries) {
    DA(d.source, d.source) += d.amount;
    DA(d.target, d.source) -= d.amount;
  }
  return DA;
}

double mccf_value(const NetworkInstance& net, const DemandMatrix& D, const VectorXd& b) {
  const Eigen::Index n = net.num_edges();
  if (b.size() != n) throw DimensionError("mccf_value: capacity size mismatch");
  if ((b.array() < 0).any()) throw std::invalid_argument("mccf_value: negative capacity");
  if (net.price_in.size() != n) throw std::invalid_argument("mccf_value: rental prices missing");
  if (D.nodes != net.nodes) throw DimensionError("mccf_value: demand dimension mismatch");

  const MatrixXd DA = demand_to_supply(D);
  std::vector<int> sources;
  for (int s = 0; s < net.nodes; ++s)
    if (DA.col(s).cwiseAbs().maxCoeff() > 0) sources.push_back(s);
  if (sources.empty()) return 0.0;

  const auto K = static_cast<Eigen::Index>(sources.size());
  const Eigen::Index vars = n * K + n;  // F column-major by commodity, then y
  const Eigen::Index rows_per = net.nodes - 1;  // last conservation row is redundant
  const VectorXd c = net.flow_costs();
  const MatrixXd A = incidence(net);

  LpProblem<double> lp(vars);
  for (Eigen::Index k = 0; k < K; ++k) lp.c.segment(k * n, n) = c;
  lp.c.tail(n) = net.price_in;

  lp.A_ub = MatrixXd::Zero(n, vars);
  lp.b_ub = b;
  for (Eigen::Index k = 0; k < K; ++k) lp.A_ub.block(0, k * n, n, n).setIdentity();
  lp.A_ub.rightCols(n) = -MatrixXd::Identity(n, n);

  lp.A_eq = MatrixXd::Zero(rows_per * K, vars);
  lp.b_eq = VectorXd::Zero(rows_per * K);
  for (Eigen::Index k = 0; k < K; ++k) {
    lp.A_eq.block(k * rows_per, k * n, rows_per, n) = A.topRows(rows_per);
    lp.b_eq.segment(k * rows_per, rows_per) = DA.col(sources[static_cast<std::size_t>(k)]).head(rows_per);
  }

  const auto sol = solve_lp(lp);
  if (!sol.optimal())
    throw SolverError(std::string("mccf LP failed: ") + to_string(sol.status) + " " + sol.message);
  return sol.objective;
}

double mccf_lipschitz(const NetworkInstance& net, NormKind norm) {
  if (net.price_in.size() == 0 || (net.price_in.array() <= 0).any())
    throw std::invalid_argument("mccf_lipschitz: rental prices must be positive");
  return dual_norm_value(net.price_in, norm);
}

namespace {

// Dinic on a residual graph with paired arcs (arc ^ 1 is the reverse).
class Dinic {
 public:
  explicit Dinic(int nodes) : adj_(static_cast<std::size_t>(nodes)) {}

  void add_edge(int u, int v, double cap) {
    adj_[static_cast<std::size_t>(u)].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({v, cap});
    adj_[static_cast<std::size_t>(v)].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({u, 0.0});
  }

  double run(int s, int t) {
    double total = 0.0;
    while (bfs(s, t)) {
      it_.assign(adj_.size(), 0);
      while (true) {
        const double pushed = dfs(s, t, std::numeric_limits<double>::infinity());
        if (pushed <= kEps) break;
        total += pushed;
      }
    }
    return total;
  }

 private:
  struct Arc {
    int to;
    double cap;
  };
  static constexpr double kEps = 1e-12;

  bool bfs(int s, int t) {
    level_.assign(adj_.size(), -1);
    std::queue<int> q;
    level_[static_cast<std::size_t>(s)] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const int a : adj_[static_cast<std::size_t>(u)]) {
        const auto& arc = arcs_[static_cast<std::size_t>(a)];
        if (arc.cap > kEps && level_[static_cast<std::size_t>(arc.to)] < 0) {
          level_[static_cast<std::size_t>(arc.to)] = level_[static_cast<std::size_t>(u)] + 1;
          q.push(arc.to);
        }
      }
    }
    return level_[static_cast<std::size_t>(t)] >= 0;
  }

  double dfs(int u, int t, double limit) {
    if (u == t) return limit;
    auto& i = it_[static_cast<std::size_t>(u)];
    const auto& out = adj_[static_cast<std::size_t>(u)];
    for (; i < out.size(); ++i) {
      const int a = out[i];
      auto& arc = arcs_[static_cast<std::size_t>(a)];
      if (arc.cap <= kEps ||
          level_[static_cast<std::size_t>(arc.to)] != level_[static_cast<std::size_t>(u)] + 1)
        continue;
      const double pushed = dfs(arc.to, t, std::min(limit, arc.cap));
      if (pushed > kEps) {
        arc.cap -= pushed;
        arcs_[static_cast<std::size_t>(a ^ 1)].cap += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<int>> adj_;
  std::vector<Arc> arcs_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
};

void check_pair(const NetworkInstance& net, const VectorXd& b, int s, int t) {
  if (b.size() != net.num_edges()) throw DimensionError("max_flow: capacity size mismatch");
  if (s < 0 || s >= net.nodes || t < 0 || t >= net.nodes) throw std::invalid_argument("max_flow: vertex out of range");
  if (s == t) throw std::invalid_argument("max_flow: source equals target");
}

}  // namespace

double max_flow(const NetworkInstance& net, const VectorXd& b, int s, int t) {
  check_pair(net, b, s, t);
  Dinic dinic(net.nodes);
  for (Eigen::Index e = 0; e < net.num_edges(); ++e) {
    const auto& edge = net.edges[static_cast<std::size_t>(e)];
    dinic.add_edge(edge.tail, edge.head, std::max(b(e), 0.0));
  }
  return dinic.run(s, t);
}

double max_flow_lp(const NetworkInstance& net, const VectorXd& b, int s, int t) {
  check_pair(net, b, s, t);
  const Eigen::Index n = net.num_edges();
  LpProblem<double> lp(n + 1);  // [f, x]
  lp.c(0) = -1.0;
  lp.upper.tail(n) = b;
  lp.A_eq = MatrixXd::Zero(net.nodes, n + 1);
  lp.A_eq.rightCols(n) = incidence(net);
  lp.A_eq(s, 0) = -1.0;
  lp.A_eq(t, 0) = 1.0;
  lp.b_eq = VectorXd::Zero(net.nodes);
  const auto sol = solve_lp(lp);
  if (!sol.optimal())
    throw SolverError(std::string("max-flow LP failed: ") + to_string(sol.status) + " " + sol.message);
  return sol.z(0);
}

VectorXd jacobi_eigenvalues(MatrixXd a, double threshold, int max_sweeps) {
  if (a.rows() != a.cols()) throw DimensionError("jacobi: matrix must be square");
  const Eigen::Index n = a.rows();
  const double scale = std::max(1.0, a.norm());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const double off = (a - MatrixXd(a.diagonal().asDiagonal())).norm();
    if (off <= threshold * scale) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= std::numeric_limits<double>::min()) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  VectorXd ev = a.diagonal();
  std::sort(ev.data(), ev.data() + ev.size());
  return ev;
}

MatrixXd laplacian(const MatrixXd& W) {
  if (W.rows() != W.cols()) throw DimensionError("laplacian: weight matrix must be square");
  const double scale = std::max(1.0, W.cwiseAbs().maxCoeff());
  if ((W - W.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("laplacian: weight matrix must be symmetric");
  if ((W.array() < 0).any()) throw std::invalid_argument("laplacian: negative weight");
  MatrixXd L = -W;
  L.diagonal() += W.rowwise().sum();
  return L;
}

double lambda2(const MatrixXd& W) {
  if (W.rows() < 2) throw std::invalid_argument("lambda2: need at least two vertices");
  const MatrixXd L = laplacian(W);
  const VectorXd ev = jacobi_eigenvalues(L);
  if (std::abs(ev(0)) > 1e-8 * std::max(1.0, L.norm()))
    throw SolverError("lambda2: smallest Laplacian eigenvalue is not zero");
  return std::max(ev(1), 0.0);
}

double lambda2(int nodes, const std::vector<WeightedEdge>& edges) {
  MatrixXd W = MatrixXd::Zero(nodes, nodes);
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= nodes || e.v < 0 || e.v >= nodes) throw std::invalid_argument("lambda2: vertex out of range");
    if (e.weight < 0) throw std::invalid_argument("lambda2: negative weight");
    if (e.u == e.v) continue;
    W(e.u, e.v) += e.weight;
    W(e.v, e.u) += e.weight;
  }
  return lambda2(W);
}

MatrixXd undirected_weights(const NetworkInstance& net, const VectorXd& b) {
  if (b.size() != net.num_edges()) throw DimensionError("undirected_weights: capacity size mismatch");
  MatrixXd W = MatrixXd::Zero(net.nodes, net.nodes);
  for (Eigen::Index e = 0; e < net.num_edges(); ++e) {
    const auto& edge = net.edges[static_cast<std::size_t>(e)];
    W(edge.tail, edge.head) += b(e);
    W(edge.head, edge.tail) += b(e);
  }
  return W;
}

double lipschitz_maxflow(NormKind norm, Eigen::Index num_edges) {
  const auto n = static_cast<double>(num_edges);
  switch (norm) {
    case NormKind::L1: return 1.0;
    case NormKind::L2: return std::sqrt(n);
    case NormKind::LInf: return n;
  }
  return n;
}

double lipschitz_lambda2(NormKind norm, Eigen::Index num_edges) {
  return 2.0 * lipschitz_maxflow(norm, num_edges);
}

double evaluate(const MetricSpec& metric, const NetworkInstance& net, const DemandMatrix& D, const VectorXd& b) {
  switch (metric.kind) {
    case MetricKind::Mccf: return mccf_value(net, D, b);
    case MetricKind::MaxFlow: return max_flow(net, b, metric.source, metric.target);
    case MetricKind::Lambda2: return lambda2(undirected_weights(net, b));
  }
  throw std::logic_error("evaluate: unknown metric");
}

Sense sense_of(MetricKind kind) {
  return kind == MetricKind::Mccf ? Sense::Minimize : Sense::Maximize;
}

std::vector<MetricRef<double>> build_metric_refs(const NetworkInstance& net, const ScenarioHistory& history,
                                                 NormKind norm) {
  std::vector<MetricRef<double>> refs;
  const auto n = static_cast<std::size_t>(net.num_edges());
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& sc = history[i];
    if (sc.capacity.size() != net.num_edges()) throw DimensionError("scenario capacity size mismatch");
    for (const auto& obs : sc.observed) {
      const std::string id = obs.metric.label() + "@" + std::to_string(i);
      if (!(obs.value > 0)) throw std::invalid_argument("metric '" + id + "': realized value must be positive");
      double M = 0.0;
      Monotonicity mono = Monotonicity::Increasing;
      switch (obs.metric.kind) {
        case MetricKind::Mccf:
          M = mccf_lipschitz(net, norm);
          mono = Monotonicity::Decreasing;
          break;
        case MetricKind::MaxFlow: M = lipschitz_maxflow(norm, net.num_edges()); break;
        case MetricKind::Lambda2: M = lipschitz_lambda2(norm, net.num_edges()); break;
      }
      MetricRef<double> ref;
      ref.id = id;
      ref.x_ref = sc.capacity;
      ref.v = obs.value;
      ref.sense = sense_of(obs.metric.kind);
      ref.models.push_back(LipschitzNorm<double>{M, norm, std::vector<Monotonicity>(n, mono)});
      refs.push_back(std::move(ref));
    }
  }
  return refs;
}

}  // namespace gammacomp::net
