// gammacomp: command-line front end.
//
//   gammacomp solve  instance.json [--norm l2] [--tol 1e-6] [--out sol.json]
//   gammacomp verify instance.json --x 0.5 [--x ...] --gamma 0.5
//   gammacomp oracle instance.json [--resolution 201]
//   gammacomp sweep  [--config cfg.json] [--nodes 12] [--norm l1 --norm l2] [--seed 1] [--out sweep.csv]

#include "gammacomp/bench.hpp"
#include "gammacomp/instance.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

namespace {

using gammacomp::NormKind;
using nlohmann::json;

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

gammacomp::bench::ExperimentConfig config_from_json(const json& j) {
  gammacomp::bench::ExperimentConfig cfg;
  if (j.contains("topology")) cfg.topology_path = j["topology"].get<std::string>();
  if (j.contains("demands")) cfg.demand_path = j["demands"].get<std::string>();
  cfg.nodes = j.value("nodes", cfg.nodes);
  cfg.edge_prob = j.value("edge_prob", cfg.edge_prob);
  cfg.scenarios = j.value("scenarios", cfg.scenarios);
  cfg.sparsify_prob = j.value("sparsify_prob", cfg.sparsify_prob);
  cfg.multipliers = j.value("multipliers", cfg.multipliers);
  if (j.contains("norms")) {
    cfg.norms.clear();
    for (const auto& n : j["norms"]) cfg.norms.push_back(gammacomp::parse_norm(n.get<std::string>()));
  }
  if (j.contains("metrics")) {
    cfg.metrics.clear();
    for (const auto& m : j["metrics"]) cfg.metrics.push_back(gammacomp::net::parse_metric_kind(m.get<std::string>()));
  }
  cfg.seed = j.value("seed", cfg.seed);
  cfg.cost_scale = j.value("cost_scale", cfg.cost_scale);
  cfg.pair_fraction = j.value("pair_fraction", cfg.pair_fraction);
  cfg.solve.gamma_tolerance = j.value("gamma_tolerance", cfg.solve.gamma_tolerance);
  cfg.record_wall_time = j.value("record_wall_time", cfg.record_wall_time);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gamma-competitive multi-objective scalarization"};
  app.require_subcommand(1);

  std::string instance_path;
  std::string out_path;
  std::string norm_flag;
  double tol = 0;

  auto* solve = app.add_subcommand("solve", "solve one CAoLF/APPROX instance from a JSON file");
  solve->add_option("instance", instance_path, "instance JSON")->required()->check(CLI::ExistingFile);
  solve->add_option("--norm", norm_flag, "override the instance norm (l1, l2, linf)");
  solve->add_option("--tol", tol, "bisection width on gamma");
  solve->add_option("--out", out_path, "write the solution JSON here instead of stdout");

  std::vector<double> x_values;
  double gamma = 0;
  auto* verify = app.add_subcommand("verify", "check a point for relative gamma-competitiveness");
  verify->add_option("instance", instance_path, "instance JSON")->required()->check(CLI::ExistingFile);
  verify->add_option("--x", x_values, "decision vector entries")->required();
  verify->add_option("--gamma", gamma, "competitive ratio to check")->required();
  verify->add_option("--out", out_path, "output path");

  int resolution = 201;
  auto* oracle = app.add_subcommand("oracle", "brute-force grid search on a <= 3-D instance with evaluators");
  oracle->add_option("instance", instance_path, "instance JSON")->required()->check(CLI::ExistingFile);
  oracle->add_option("--resolution", resolution, "grid points per axis");
  oracle->add_option("--out", out_path, "output path");

  gammacomp::bench::ExperimentConfig sweep_cfg;
  std::string config_path;
  std::string topology;
  std::string demands;
  std::vector<std::string> norms;
  std::vector<std::string> metrics;
  std::vector<double> multipliers;
  bool no_timing = false;
  auto* sweep = app.add_subcommand("sweep", "budget sweep on a synthetic or file-based network");
  sweep->add_option("--config", config_path, "ExperimentConfig JSON (flags override)")->check(CLI::ExistingFile);
  sweep->add_option("--topology", topology, "network file ('k n' then 'tail head cost capacity' lines)");
  sweep->add_option("--demands", demands, "demand file ('s t amount' lines)");
  sweep->add_option("--nodes", sweep_cfg.nodes, "synthetic node count");
  sweep->add_option("--edge-prob", sweep_cfg.edge_prob, "synthetic chord probability");
  sweep->add_option("--scenarios", sweep_cfg.scenarios, "number of historical periods");
  sweep->add_option("--sparsify", sweep_cfg.sparsify_prob, "demand drop probability");
  sweep->add_option("--multipliers", multipliers, "budget multipliers (ascending)")->delimiter(',');
  sweep->add_option("--norm", norms, "norm(s): l1, l2, linf");
  sweep->add_option("--metrics", metrics, "metric(s): mccf, maxflow, lambda2")->delimiter(',');
  sweep->add_option("--seed", sweep_cfg.seed, "RNG seed");
  sweep->add_option("--cost-scale", sweep_cfg.cost_scale, "constant C of the rental price formula");
  sweep->add_option("--tol", tol, "bisection width on gamma");
  sweep->add_flag("--no-timing", no_timing, "write wall_ms as 0 (byte-reproducible output)");
  sweep->add_option("--out", out_path, "CSV output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      auto inst = gammacomp::io::load_instance(instance_path);
      if (!norm_flag.empty()) inst.set_norm(gammacomp::parse_norm(norm_flag));
      if (tol > 0) inst.cfg.gamma_tolerance = tol;
      auto sol = gammacomp::io::solve_instance(inst);
      if (inst.has_evaluators()) gammacomp::evaluate_slacks(sol, inst.require_evaluators());
      write_output(gammacomp::io::to_json(sol).dump(2) + "\n", out_path);
    } else if (verify->parsed()) {
      const auto inst = gammacomp::io::load_instance(instance_path);
      const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x_values.data(), static_cast<Eigen::Index>(x_values.size()));
      if (x.size() != inst.K.dimension()) throw gammacomp::DimensionError("--x has the wrong number of entries");
      json out;
      if (inst.has_evaluators()) {
        const auto res = gammacomp::verify_competitiveness(x, gamma, inst.require_evaluators());
        out["mode"] = "evaluators";
        out["competitive"] = res.competitive;
        out["margins"] = res.margins;
      } else {
        // Without evaluators, check the constraint system the models imply.
        std::vector<double> margins;
        bool ok = true;
        for (const auto& ref : inst.refs) {
          const double m = gamma - gammacomp::required_gamma<double>({ref}, x);
          margins.push_back(m);
          ok = ok && m >= -1e-9;
        }
        out["mode"] = "constraints";
        out["competitive"] = ok;
        out["margins"] = margins;
      }
      out["in_feasible_set"] = inst.K.contains(x, 1e-9);
      write_output(out.dump(2) + "\n", out_path);
      return out["competitive"].get<bool>() ? 0 : 2;
    } else if (oracle->parsed()) {
      const auto inst = gammacomp::io::load_instance(instance_path);
      const auto best = gammacomp::grid_oracle_swcm(inst.require_evaluators(), inst.K, resolution);
      json out;
      out["gamma"] = best.gamma;
      out["x"] = std::vector<double>(best.x.data(), best.x.data() + best.x.size());
      out["resolution"] = resolution;
      write_output(out.dump(2) + "\n", out_path);
    } else if (sweep->parsed()) {
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        sweep_cfg = config_from_json(json::parse(in));
        // Flags given explicitly on the command line still win.
        for (const auto* opt : sweep->get_options()) {
          if (opt->count() == 0) continue;
          const auto name = opt->get_name();
          if (name == "--nodes") sweep_cfg.nodes = opt->as<int>();
          if (name == "--edge-prob") sweep_cfg.edge_prob = opt->as<double>();
          if (name == "--scenarios") sweep_cfg.scenarios = opt->as<int>();
          if (name == "--sparsify") sweep_cfg.sparsify_prob = opt->as<double>();
          if (name == "--seed") sweep_cfg.seed = opt->as<std::uint64_t>();
          if (name == "--cost-scale") sweep_cfg.cost_scale = opt->as<double>();
        }
      }
      if (!topology.empty()) sweep_cfg.topology_path = topology;
      if (!demands.empty()) sweep_cfg.demand_path = demands;
      if (!multipliers.empty()) sweep_cfg.multipliers = multipliers;
      if (!norms.empty()) {
        sweep_cfg.norms.clear();
        for (const auto& n : norms) sweep_cfg.norms.push_back(gammacomp::parse_norm(n));
      }
      if (!metrics.empty()) {
        sweep_cfg.metrics.clear();
        for (const auto& m : metrics) sweep_cfg.metrics.push_back(gammacomp::net::parse_metric_kind(m));
      }
      if (tol > 0) sweep_cfg.solve.gamma_tolerance = tol;
      if (no_timing) sweep_cfg.record_wall_time = false;

      const auto rows = gammacomp::bench::run_sweep(sweep_cfg);
      if (out_path.empty())
        gammacomp::bench::write_csv(rows, std::cout);
      else
        gammacomp::bench::emit_csv(rows, out_path);
      for (const auto& r : rows)
        if (!r.error.empty())
          std::cerr << "warning: multiplier " << r.multiplier << " norm " << gammacomp::to_string(r.norm) << ": "
                    << r.error << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
