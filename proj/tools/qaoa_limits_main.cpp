#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "commands.hpp"
#include "qaoa/errors.hpp"
#include "qaoa/parallel.hpp"

namespace {

void add_out_option(CLI::App* cmd, std::string& out) {
  cmd->add_option("--out", out, "Write the report here instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Infinite-size QAOA energies, angle transfer, and finite-instance checks"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads,
                 "Worker thread cap (overrides QAOA_LIMITS_THREADS; 0 = automatic)");

  qaoa::cli::PredictOptions pred;
  auto* predict = app.add_subcommand(
      "predict", "Optimize the infinite-size energy of a model and report the angles");
  predict->add_option("--model", pred.model, "er | sk | chung-lu | diluted-p1")->required();
  predict->add_option("--p", pred.p, "Circuit depth (default 1)");
  predict->add_option("--d", pred.degree,
                      "Mean degree (er), or interactions per spin (diluted-p1)");
  predict->add_option("--arity", pred.arity, "Bodies per interaction (diluted-p1, default 2)");
  predict->add_option("--dist", pred.dist, "Degree classes, e.g. 4:0.667,9:0.333 (chung-lu)");
  predict->add_option("--restarts", pred.restarts, "Random restarts (default 100)");
  predict->add_option("--budget", pred.budget,
                      "Objective evaluations per restart (default 1000)");
  predict->add_option("--seed", pred.seed, "RNG seed (default 0)");
  predict->add_option("--angles-out", pred.angles_out,
                      "Also write the optimal angles as a standalone angle file");
  add_out_option(predict, pred.out);

  qaoa::cli::TransferOptions trans;
  auto* transfer =
      app.add_subcommand("transfer", "Rescale SK-optimal angles to a mean-degree-d graph");
  transfer->add_option("--angles", trans.angles_file, "Angle file (JSON)")->required();
  transfer->add_option("--d", trans.degree, "Target mean degree")->required();
  add_out_option(transfer, trans.out);

  qaoa::cli::McOptions mc;
  auto* mc_cmd = app.add_subcommand(
      "mc", "Monte-Carlo estimate of the disorder-averaged SK energy at finite n");
  mc_cmd->add_option("--n", mc.n, "System size")->required();
  mc_cmd->add_option("--angles", mc.angles_file, "Angle file (JSON)")->required();
  mc_cmd->add_option("--samples", mc.samples, "Number of draws (default 10000)");
  mc_cmd->add_option("--seed", mc.seed, "RNG seed (default 0)");
  mc_cmd->add_flag("--force", mc.force, "Sample even where the variance bound diverges");
  mc_cmd->add_option("--samples-out", mc.samples_out, "Also write the raw draws as CSV");
  add_out_option(mc_cmd, mc.out);

  qaoa::cli::SimulateOptions sim;
  auto* simulate = app.add_subcommand(
      "simulate", "Sample one finite instance and evaluate the circuit exactly");
  simulate->add_option("--model", sim.model, "er | chung-lu | sk")->required();
  simulate->add_option("--n", sim.n, "Number of vertices")->required();
  simulate->add_option("--d", sim.degree, "Mean degree (er)");
  simulate->add_option("--dist", sim.dist, "Degree classes (chung-lu)");
  simulate->add_option("--angles", sim.angles_file, "Angle file (JSON)")->required();
  simulate->add_option("--seed", sim.seed, "Instance seed (default 0)");
  simulate->add_option("--cut-draws", sim.cut_draws,
                       "Basis-state measurements for cut statistics (graph models)");
  add_out_option(simulate, sim.out);

  qaoa::cli::ExperimentOptions exp;
  auto* experiment = app.add_subcommand(
      "experiment", "Race optimization from transferred angles against random restarts");
  experiment->add_option("--ensemble", exp.ensemble, "er | chung-lu")->required();
  experiment->add_option("--n", exp.n, "Vertices per instance (default 16, max 20)");
  experiment->add_option("--p", exp.p, "Circuit depth (default 3)");
  experiment->add_option("--instances", exp.instances, "Number of instances (default 50)");
  experiment->add_option("--restarts", exp.restarts, "Random restarts per instance (default 200)");
  experiment->add_option("--budget", exp.budget,
                         "Objective evaluations per optimization run (default 300)");
  experiment->add_option("--d", exp.degree, "Mean degree for the er ensemble (default 4)");
  experiment->add_option("--dist", exp.dist,
                         "Degree classes for the chung-lu ensemble (default 4:2/3, 9:1/3)");
  experiment->add_option("--seed", exp.seed, "RNG seed (default 0)");
  add_out_option(experiment, exp.out);

  qaoa::cli::LandscapeOptions land;
  auto* landscape =
      app.add_subcommand("landscape", "Tabulate the infinite-size energy on an angle grid");
  landscape->add_option("--model", land.model, "er | sk | chung-lu | diluted-p1")->required();
  landscape->add_option("--p", land.p, "Circuit depth (default 1)");
  landscape->add_option("--d", land.degree, "Mean degree / interactions per spin");
  landscape->add_option("--arity", land.arity, "Bodies per interaction (diluted-p1)");
  landscape->add_option("--dist", land.dist, "Degree classes (chung-lu)");
  landscape->add_option("--beta-axis", land.beta_axis,
                        "Per-layer beta grid as min:max:steps (default half period)");
  landscape->add_option("--gamma-axis", land.gamma_axis,
                        "Per-layer gamma grid as min:max:steps (default full period)");
  add_out_option(landscape, land.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse diagnostic
    return code == 0 ? 0 : 2;
  }

  try {
    if (threads != 0) {
      if (threads < 0) throw qaoa::validation_error("--threads must be nonnegative");
      qaoa::set_max_threads(threads);
    }
    if (predict->parsed()) {
      qaoa::cli::run_predict(pred);
    } else if (transfer->parsed()) {
      qaoa::cli::run_transfer(trans);
    } else if (mc_cmd->parsed()) {
      qaoa::cli::run_mc(mc);
    } else if (simulate->parsed()) {
      qaoa::cli::run_simulate(sim);
    } else if (experiment->parsed()) {
      qaoa::cli::run_experiment(exp);
    } else if (landscape->parsed()) {
      qaoa::cli::run_landscape(land);
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return qaoa::exit_code_for(e);
  }
}
