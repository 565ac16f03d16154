// mcnet: simulate, sweep and analyze multicast cloud-network scenarios.
//
// Exit codes: 0 on success, 2 on invalid input or an infeasible load, 1 on
// any other failure.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcnet/network.h"
#include "mcnet/policy.h"
#include "mcnet/queue_state.h"
#include "mcnet/scenario.h"
#include "mcnet/simulator.h"
#include "mcnet/stability.h"
#include "mcnet/sweep.h"

namespace {

using namespace mcnet;

struct PolicyFlags {
  std::vector<std::string> policies{"gdcnc"};
  double V = 0.0;
  double eta = 0.0;
  int trees = 1;
  std::string metric = "hop";
  bool normalize = false;
};

void AddPolicyFlags(CLI::App* app, PolicyFlags& f, bool many) {
  if (many) {
    app->add_option("--policy", f.policies, "gdcnc, gdcnc-r, egdcnc, egdcnc-r, dcnc, edspa (repeatable)");
  } else {
    app->add_option("--policy", f.policies[0], "gdcnc, gdcnc-r, egdcnc, egdcnc-r, dcnc, edspa");
  }
  app->add_option("--V", f.V, "cost weight");
  app->add_option("--eta", f.eta, "shortest-path bias weight");
  app->add_option("--K", f.trees, "duplication trees for the -r variants");
  app->add_option("--metric", f.metric, "clustering metric: geographic, hop, capacity, cost");
  app->add_flag("--normalize", f.normalize, "divide queue values by cumulative scaling");
}

std::vector<PolicyConfig> MakeConfigs(const PolicyFlags& f) {
  std::vector<PolicyConfig> out;
  for (const std::string& name : f.policies) {
    PolicyConfig c;
    c.kind = ParsePolicyKind(name);
    c.V = f.V;
    c.eta = f.eta;
    c.num_trees = f.trees;
    c.metric = ParseClusterMetric(f.metric);
    c.normalize = f.normalize;
    c.Validate();
    out.push_back(c);
  }
  return out;
}

struct RunFlags {
  int64_t slots = 10000;
  uint64_t seed = 1;
  int64_t thinning = 100;
  std::string out;
};

void AddRunFlags(CLI::App* app, RunFlags& f) {
  app->add_option("--slots", f.slots, "slots per run");
  app->add_option("--seed", f.seed, "base seed");
  app->add_option("--thinning", f.thinning, "series sampling interval, slots");
  app->add_option("--out", f.out, "metrics CSV (default: stdout)");
}

SimOptions MakeOptions(const RunFlags& f) {
  SimOptions o;
  o.slots = f.slots;
  o.seed = f.seed;
  o.thinning = f.thinning;
  return o;
}

void Emit(const std::string& path, const std::vector<SweepRow>& rows) {
  if (path.empty() || path == "-") {
    WriteMetricsCsv(std::cout, rows);
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  WriteMetricsCsv(out, rows);
}

void WriteSeries(const std::string& path, const RunMetrics& m, int64_t thinning) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << kMetricsCsvVersion << "\nslot,backlog,weighted_backlog,cost\n" << std::setprecision(10);
  for (size_t i = 0; i < m.backlog_series.size(); ++i) {
    out << static_cast<int64_t>(i) * thinning << ',' << m.backlog_series[i] << ','
        << m.weighted_series[i] << ',' << m.cost_series[i] << '\n';
  }
}

std::vector<double> UnitDirection(const Scenario& s) {
  const double total = s.arrivals.total();
  if (!(total > 0)) throw InvalidInput("scenario has no arrivals to define a load direction");
  std::vector<double> dir = s.arrivals.rate;
  for (double& v : dir) v /= total;
  return dir;
}

void PrintCertificate(const InfeasibleLoad& e) {
  std::cerr << "violated constraints (Farkas multipliers):\n";
  for (size_t r = 0; r < e.certificate.size(); ++r) {
    if (e.certificate[r] != 0) std::cerr << "  " << e.labels[r] << "  " << e.certificate[r] << "\n";
  }
}

void WriteBeta(const std::string& path, const LayeredNetwork& layered, const std::vector<BetaEntry>& beta) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  const Network& net = layered.network();
  const int d = net.num_destinations();
  out << "resource,kind,stage,q,s,beta\n" << std::setprecision(12);
  for (const BetaEntry& b : beta) {
    const LayeredEdge& e = layered.edge(b.edge);
    std::string resource;
    if (b.processing) {
      resource = net.node(b.resource).name;
    } else {
      resource = net.node(net.edge(b.resource).from).name + "->" + net.node(net.edge(b.resource).to).name;
    }
    out << resource << ',' << (b.processing ? "processing" : "link") << ','
        << layered.StageOf(e.from) + 1 << ',' << b.choice.q.ToString(d) << ','
        << b.choice.s.ToString(d) << ',' << b.beta << '\n';
  }
}

int Analyze(const std::string& path, const std::vector<double>& loads, const std::string& beta_out) {
  const Scenario scenario = LoadScenario(path);
  const LayeredNetwork layered(scenario.network, scenario.service);
  const std::vector<double> dir = UnitDirection(scenario);
  const double multicast = MulticastBoundary(layered, dir);
  const double unicast = UnicastBoundary(layered, dir);
  std::cout << std::setprecision(10);
  std::cout << "destinations " << scenario.num_destinations() << "\n";
  std::cout << "multicast_boundary " << multicast << "\n";
  std::cout << "unicast_boundary " << unicast << "\n";
  std::cout << "ratio " << (unicast > 0 ? multicast / unicast : 0.0) << "\n";
  for (double load : loads) {
    if (!(load >= 0)) throw InvalidInput("loads must be >= 0");
    std::vector<double> lambda = dir;
    for (double& v : lambda) v *= load;
    const MinCostResult mc = MinCost(layered, lambda);
    std::string unicast_cost = "infeasible";
    try {
      std::ostringstream text;
      text << std::setprecision(10) << UnicastMinCost(layered, lambda);
      unicast_cost = text.str();
    } catch (const InfeasibleLoad&) {
    }
    std::cout << "min_cost load=" << load << " multicast=" << mc.cost << " unicast=" << unicast_cost << "\n";
    if (!beta_out.empty()) WriteBeta(beta_out, layered, BetaFromFlows(layered, mc.vars, mc.flow));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multicast cloud-network control simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  PolicyFlags sim_policy;
  RunFlags sim_run;
  std::string series_out;
  auto* simulate = app.add_subcommand("simulate", "run one policy on a scenario");
  simulate->add_option("--scenario", scenario_path, "scenario JSON")->required();
  AddPolicyFlags(simulate, sim_policy, false);
  AddRunFlags(simulate, sim_run);
  simulate->add_option("--series-out", series_out, "time-series CSV");

  PolicyFlags sweep_policy;
  RunFlags sweep_run;
  std::string axis;
  std::vector<double> values;
  int reps = 1;
  auto* sweep = app.add_subcommand("sweep", "sweep one parameter with replications");
  sweep->add_option("--scenario", scenario_path, "scenario JSON")->required();
  sweep->add_option("--axis", axis, "V, eta, lambda, D or K")->required();
  sweep->add_option("--values", values, "axis values")->required();
  sweep->add_option("--reps", reps, "replications per value");
  AddPolicyFlags(sweep, sweep_policy, true);
  AddRunFlags(sweep, sweep_run);

  std::vector<double> loads;
  std::string beta_out;
  auto* analyze = app.add_subcommand("analyze", "stability boundaries and minimum cost");
  analyze->add_option("--scenario", scenario_path, "scenario JSON")->required();
  analyze->add_option("--load", loads, "total load for min-cost evaluation (repeatable)");
  analyze->add_option("--beta-out", beta_out, "randomized-policy probabilities CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*simulate) {
      const Scenario scenario = LoadScenario(scenario_path);
      const PolicyConfig config = MakeConfigs(sim_policy).front();
      const RunMetrics m = Run(scenario, config, MakeOptions(sim_run));
      Emit(sim_run.out, {{"none", 0.0, 0, m}});
      if (!series_out.empty()) WriteSeries(series_out, m, sim_run.thinning);
      return 0;
    }
    if (*sweep) {
      SweepSpec spec;
      spec.scenario = LoadScenario(scenario_path);
      spec.policies = MakeConfigs(sweep_policy);
      spec.axis = ParseSweepAxis(axis);
      spec.values = values;
      spec.replications = reps;
      spec.options = MakeOptions(sweep_run);
      Emit(sweep_run.out, RunSweep(spec));
      return 0;
    }
    return Analyze(scenario_path, loads, beta_out);
  } catch (const InfeasibleLoad& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    PrintCertificate(e);
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const InvalidDecision& e) {
    std::cerr << "decision rejected: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
