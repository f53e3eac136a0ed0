#pragma once

// Synthetic capacity-planning experiments: instance generation, budget sweeps
// and CSV output.

#include "gammacomp/caolf.hpp"
#include "gammacomp/network.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gammacomp::bench {

using Rng = std::mt19937_64;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

std::vector<double> default_multipliers();

struct ExperimentConfig {
  // Topology: a network file (and optional demand file) or the generator below.
  std::optional<std::string> topology_path;
  std::optional<std::string> demand_path;
  int nodes = 12;
  double edge_prob = 0.15;

  int scenarios = 5;
  double sparsify_prob = 0.4;
  std::vector<double> multipliers = default_multipliers();
  std::vector<NormKind> norms{NormKind::L1, NormKind::L2, NormKind::LInf};
  std::vector<net::MetricKind> metrics{net::MetricKind::Mccf, net::MetricKind::MaxFlow, net::MetricKind::Lambda2};
  std::uint64_t seed = 1;
  double cost_scale = 10.0;  // C in the rental price formula
  double pair_fraction = 0.05;
  SolveConfig solve;
  bool record_wall_time = true;

  void validate() const;
};

struct SweepRow {
  double multiplier;
  NormKind norm;
  double gamma;
  std::vector<std::string> metric_ids;
  std::vector<double> ratios;  // f_i(x) / v_i
  double wall_ms;
  int iterations;
  bool verified = false;  // passes verify_competitiveness at gamma + 1e-6
  std::string error;      // non-empty when the solve failed
};

struct Prices {
  Eigen::VectorXd pre;  // c_b
  Eigen::VectorXd in;   // c_a
};

/// c_b = (C / sqrt(c)) xi_b and c_a = c_b xi_a for given draws.
Prices prices_from_draws(const Eigen::VectorXd& c, double C, const Eigen::VectorXd& xi_pre,
                         const Eigen::VectorXd& xi_in);

/// Draws xi_b ~ U[9, 11] and xi_a ~ U[1.05, 1.15] per edge.
Prices generate_costs(const Eigen::VectorXd& c, double C, Rng& rng);

/// Drops each entry independently with probability p.
net::DemandMatrix sparsify(const net::DemandMatrix& D, double p, Rng& rng);

/// The ceil(fraction * |entries|) largest demands, ties by (s, t).
std::vector<std::pair<int, int>> select_flow_pairs(const net::DemandMatrix& D, double fraction = 0.05);

struct Experiment {
  net::NetworkInstance network;
  net::ScenarioHistory history;
  double mean_budget;  // mean over scenarios of c_b^T b_i
};

/// Builds the network, prices and scenario history. RNG draws happen in a
/// fixed order: topology, flow costs, base capacities, base demands, rental
/// prices, per-scenario sparsification, per-scenario capacity jitter.
Experiment build_experiment(const ExperimentConfig& cfg);

/// Observed metric values of one scenario.
std::vector<net::Observation> observe(const net::NetworkInstance& network, const net::DemandMatrix& D,
                                      const Eigen::VectorXd& b, const std::vector<net::MetricKind>& metrics,
                                      double pair_fraction);

std::vector<SweepRow> run_sweep(const Experiment& exp, const ExperimentConfig& cfg);
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

net::NetworkInstance load_network(const std::string& path);
void save_network(const net::NetworkInstance& network, const std::string& path);
net::DemandMatrix load_demands(const std::string& path, int nodes);
void save_demands(const net::DemandMatrix& D, const std::string& path);

void write_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);

}  // namespace gammacomp::bench
