#pragma once

// Network experiment metrics: min-cost concurrent flow with rental penalty,
// s-t max flow and the algebraic connectivity of the capacity-weighted graph.
// Capacities b are the decision vector, one entry per edge.

#include "gammacomp/core.hpp"
#include "gammacomp/lp.hpp"

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace gammacomp::net {

using VectorXd = Eigen::VectorXd;
using MatrixXd = Eigen::MatrixXd;

struct Edge {
  int tail;
  int head;
  double cost;  // per unit of flow

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct NetworkInstance {
  int nodes = 0;
  std::vector<Edge> edges;
  VectorXd base_capacity;  // b
  VectorXd price_pre;      // c_b, per unit of capacity rented before the period
  VectorXd price_in;       // c_a, per unit rented during the period

  Eigen::Index num_edges() const { return static_cast<Eigen::Index>(edges.size()); }
  VectorXd flow_costs() const;
  void validate() const;
};

struct Demand {
  int source;
  int target;
  double amount;

  friend bool operator==(const Demand&, const Demand&) = default;
};

struct DemandMatrix {
  int nodes = 0;
  std::vector<Demand> entries;

  bool empty() const { return entries.empty(); }
  void validate() const;
};

enum class MetricKind { Mccf, MaxFlow, Lambda2 };

const char* to_string(MetricKind kind);
MetricKind parse_metric_kind(const std::string& s);

/// One metric instance. Max-flow carries its (source, target) pair.
struct MetricSpec {
  MetricKind kind;
  int source = -1;
  int target = -1;

  std::string label() const;
};

struct Observation {
  MetricSpec metric;
  double value;
};

struct Scenario {
  VectorXd capacity;  // b_i
  DemandMatrix demand;  // D_i
  std::vector<Observation> observed;  // realized metric values at b_i
};

using ScenarioHistory = std::vector<Scenario>;

/// k x n vertex-edge incidence: +1 at the tail row, -1 at the head row.
MatrixXd incidence(const NetworkInstance& net);

/// k x k supply matrix whose column i is the supply vector of vertex i.
MatrixXd demand_to_supply(const DemandMatrix& D);

/// Optimal value of the rental-penalty MCCF linear program at capacities b.
double mccf_value(const NetworkInstance& net, const DemandMatrix& D, const VectorXd& b);

/// Lipschitz constant of b -> mccf_value: the dual norm of the rental prices.
double mccf_lipschitz(const NetworkInstance& net, NormKind norm);

/// Max s-t flow under capacities b (Dinic).
double max_flow(const NetworkInstance& net, const VectorXd& b, int s, int t);

/// Same value through the LP formulation, solved by the dense simplex.
double max_flow_lp(const NetworkInstance& net, const VectorXd& b, int s, int t);

struct WeightedEdge {
  int u;
  int v;
  double weight;
};

/// Eigenvalues (ascending) of a symmetric matrix by cyclic Jacobi rotations.
VectorXd jacobi_eigenvalues(MatrixXd a, double threshold = 1e-12, int max_sweeps = 100);

/// Laplacian diag(W1) - W of a symmetric non-negative weight matrix.
MatrixXd laplacian(const MatrixXd& W);

/// Second-smallest Laplacian eigenvalue of the weighted undirected graph.
double lambda2(const MatrixXd& W);
double lambda2(int nodes, const std::vector<WeightedEdge>& edges);

/// Undirected view of the network with weights b (parallel and anti-parallel
/// edges add up).
MatrixXd undirected_weights(const NetworkInstance& net, const VectorXd& b);

double lipschitz_maxflow(NormKind norm, Eigen::Index num_edges);
double lipschitz_lambda2(NormKind norm, Eigen::Index num_edges);

/// Evaluates one metric at capacities b for the given scenario demands.
double evaluate(const MetricSpec& metric, const NetworkInstance& net, const DemandMatrix& D, const VectorXd& b);

Sense sense_of(MetricKind kind);

/// One MetricRef per observation: MCCF is minimized and non-increasing in
/// every capacity; max-flow and lambda2 are maximized and non-decreasing.
std::vector<MetricRef<double>> build_metric_refs(const NetworkInstance& net, const ScenarioHistory& history,
                                                 NormKind norm);

}  // namespace gammacomp::net
