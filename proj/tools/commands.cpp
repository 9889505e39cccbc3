#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qaoa/angle_tools.hpp"
#include "qaoa/bitstrings.hpp"
#include "qaoa/dspin.hpp"
#include "qaoa/errors.hpp"
#include "qaoa/infinite_limit.hpp"
#include "qaoa/instances.hpp"
#include "qaoa/parallel.hpp"
#include "qaoa/rng.hpp"
#include "qaoa/simulator.hpp"
#include "qaoa/sk_montecarlo.hpp"

namespace qaoa::cli {
namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;
constexpr int kMaxDepth = 6;

// All reports go through here so that stdout and file output carry the exact
// same bytes.
void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot open output file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw resource_error("failed while writing " + path);
}

std::string render(const json& report) { return report.dump(2) + "\n"; }

json angles_to_json(const AngleVector& a) {
  return json{{"p", a.p()}, {"betas", a.betas}, {"gammas", a.gammas}};
}

// Accepts any JSON object with top-level "betas"/"gammas" arrays, so reports
// written by `transfer` (or by `predict --angles-out`) feed straight back in.
AngleVector read_angle_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open angle file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw validation_error("angle file " + path + " is not valid JSON: " + e.what());
  }
  AngleVector a;
  try {
    a.betas = j.at("betas").get<std::vector<double>>();
    a.gammas = j.at("gammas").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw validation_error("angle file " + path +
                           " needs numeric \"betas\" and \"gammas\" arrays: " + e.what());
  }
  if (j.contains("p") && (!j["p"].is_number_integer() || j["p"].get<int>() != a.p())) {
    throw validation_error("angle file " + path + ": \"p\" does not match the array lengths");
  }
  a.validate();
  return a;
}

DegreeDistribution parse_distribution(const std::string& text) {
  DegreeDistribution dist;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw validation_error("degree class '" + item +
                             "' is not of the form degree:probability");
    }
    try {
      std::size_t used_deg = 0;
      std::size_t used_prob = 0;
      const std::string deg_text = item.substr(0, colon);
      const std::string prob_text = item.substr(colon + 1);
      const double deg = std::stod(deg_text, &used_deg);
      const double prob = std::stod(prob_text, &used_prob);
      if (used_deg != deg_text.size() || used_prob != prob_text.size()) {
        throw std::invalid_argument("trailing characters");
      }
      dist.push_back({deg, prob});
    } catch (const std::exception&) {
      throw validation_error("cannot parse degree class '" + item +
                             "' (expected degree:probability)");
    }
  }
  if (dist.empty()) throw validation_error("empty degree distribution");
  validate_distribution(dist);
  return dist;
}

json distribution_to_json(const DegreeDistribution& dist) {
  json arr = json::array();
  for (const auto& cls : dist) {
    arr.push_back({{"degree", cls.expected_degree}, {"probability", cls.probability}});
  }
  return arr;
}

json trace_to_json(const std::vector<RestartRecord>& trace) {
  json arr = json::array();
  for (const auto& r : trace) {
    arr.push_back({{"restart", r.restart}, {"iterations", r.iterations}, {"value", r.value}});
  }
  return arr;
}

// An infinite-size objective plus the bookkeeping the commands need around
// it: which symmetry class its couplings live in, whether a sqrt(degree)
// gamma rescale is meaningful, and the resolved model fields for the config
// echo.
struct ModelContext {
  EnergyFunctional f;
  std::optional<WeightParity> parity;     // unset: leave angles as found
  std::optional<double> rescale_degree;
  json config;
};

ModelContext make_limit_model(const std::string& model, int p, double degree, int arity,
                              const std::string& dist_text) {
  if (p < 1) throw validation_error("p must be at least 1");
  if (p > kMaxDepth) {
    throw resource_error("the infinite-size recursion is capped at p = " +
                         std::to_string(kMaxDepth));
  }
  ModelContext ctx;
  ctx.config["model"] = model;
  ctx.config["p"] = p;
  if (model == "er") {
    if (!(degree > 0.0)) throw validation_error("er needs a positive --d");
    auto table = std::make_shared<BitstringTable>(p);
    ctx.f = [table, degree](const AngleVector& a) {
      return er_energy_per_vertex(*table, a, degree);
    };
    ctx.parity = WeightParity::kIntegerCouplings;
    ctx.rescale_degree = degree;
    ctx.config["degree"] = degree;
  } else if (model == "chung-lu") {
    if (dist_text.empty()) {
      throw validation_error("chung-lu needs --dist degree:probability[,...]");
    }
    const DegreeDistribution dist = parse_distribution(dist_text);
    auto table = std::make_shared<BitstringTable>(p);
    ctx.f = [table, dist](const AngleVector& a) {
      return chung_lu_energy_per_vertex(*table, a, dist);
    };
    ctx.parity = WeightParity::kIntegerCouplings;
    ctx.rescale_degree = mean_degree(dist);
    ctx.config["dist"] = distribution_to_json(dist);
  } else if (model == "sk") {
    auto table = std::make_shared<BitstringTable>(p);
    ctx.f = [table](const AngleVector& a) { return sk_energy_per_vertex(*table, a); };
    ctx.parity = WeightParity::kGenericWeights;
  } else if (model == "diluted-p1") {
    if (p != 1) throw validation_error("diluted-p1 is a single-layer model; use --p 1");
    if (!(degree > 0.0)) throw validation_error("diluted-p1 needs a positive --d");
    const DSpinConfig cfg{arity, degree};
    ctx.f = [cfg](const AngleVector& a) {
      return diluted_p1_energy(a.betas[0], a.gammas[0], cfg);
    };
    // The D-body symmetry group differs from the two-body one standardize
    // knows about, so the optimum is reported exactly as found.
    ctx.config["degree"] = degree;
    ctx.config["arity"] = arity;
  } else {
    throw validation_error("unknown model '" + model +
                           "' (expected er, sk, chung-lu, or diluted-p1)");
  }
  return ctx;
}

json header(json config) {
  return json{{"schema_version", kSchemaVersion}, {"config", std::move(config)}};
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Axis {
  double lo = 0.0;
  double hi = 0.0;
  int steps = 1;

  double value_at(int k) const {
    if (steps == 1) return lo;
    return lo + (hi - lo) * (static_cast<double>(k) / (steps - 1));
  }
};

Axis parse_axis(const std::string& text) {
  const auto first = text.find(':');
  const auto second = first == std::string::npos ? first : text.find(':', first + 1);
  if (second == std::string::npos) {
    throw validation_error("axis '" + text + "' is not of the form min:max:steps");
  }
  Axis axis;
  try {
    std::size_t used = 0;
    const std::string lo_text = text.substr(0, first);
    const std::string hi_text = text.substr(first + 1, second - first - 1);
    const std::string steps_text = text.substr(second + 1);
    axis.lo = std::stod(lo_text, &used);
    if (used != lo_text.size()) throw std::invalid_argument("trailing characters");
    axis.hi = std::stod(hi_text, &used);
    if (used != hi_text.size()) throw std::invalid_argument("trailing characters");
    axis.steps = std::stoi(steps_text, &used);
    if (used != steps_text.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw validation_error("cannot parse axis '" + text + "' (expected min:max:steps)");
  }
  if (axis.steps < 1) throw validation_error("axis '" + text + "' needs at least one step");
  return axis;
}

}  // namespace

void run_predict(const PredictOptions& opt) {
  if (opt.restarts < 1) throw validation_error("--restarts must be at least 1");
  if (opt.budget < 1) throw validation_error("--budget must be at least 1");
  ModelContext ctx = make_limit_model(opt.model, opt.p, opt.degree, opt.arity, opt.dist);

  const OptimizationResult res = multi_restart(ctx.f, opt.p, opt.restarts, opt.seed, opt.budget);
  AngleVector best = res.best_angles;
  if (ctx.parity) best = standardize(best, *ctx.parity).angles;

  // Standardization must not move the energy; re-evaluating at the reported
  // angles both checks that and pins the value the report claims for them.
  const double energy = ctx.f(best);
  if (std::abs(energy - res.best_value) > 1e-9 * std::max(1.0, std::abs(res.best_value))) {
    throw consistency_error("the standardized angles do not reproduce the optimized energy");
  }

  json config = ctx.config;
  config["command"] = "predict";
  config["restarts"] = opt.restarts;
  config["budget"] = opt.budget;
  config["seed"] = opt.seed;

  json result;
  result["angles"] = angles_to_json(best);
  result["energy_per_vertex"] = energy;
  result["restarts_used"] = res.restarts_used;
  result["restart_trace"] = trace_to_json(res.trace);
  if (ctx.rescale_degree) {
    const double root = std::sqrt(*ctx.rescale_degree);
    json scaled = json::array();
    for (double g : best.gammas) scaled.push_back(g * root);
    result["gammas_times_sqrt_degree"] = scaled;
  }

  json report = header(config);
  report["result"] = result;
  write_output(opt.out, render(report));

  if (!opt.angles_out.empty()) {
    json angle_file = header(config);
    angle_file["p"] = best.p();
    angle_file["betas"] = best.betas;
    angle_file["gammas"] = best.gammas;
    write_output(opt.angles_out, render(angle_file));
  }
}

void run_transfer(const TransferOptions& opt) {
  if (!(opt.degree > 0.0)) throw validation_error("--d must be positive");
  const AngleVector src = read_angle_file(opt.angles_file);
  const AngleVector dst = transfer_sk_to_er(src, opt.degree);

  json report = header({{"command", "transfer"},
                        {"angles", opt.angles_file},
                        {"degree", opt.degree}});
  report["p"] = dst.p();
  report["betas"] = dst.betas;
  report["gammas"] = dst.gammas;
  write_output(opt.out, render(report));
}

void run_mc(const McOptions& opt) {
  const AngleVector a = read_angle_file(opt.angles_file);
  if (a.p() >= 4 && !opt.force) {
    throw validation_error(
        "the per-sample variance bound diverges at p >= 4, so the estimate would be "
        "untrustworthy at any sample count; pass --force to draw anyway");
  }

  const double bound = variance_upper_bound(a);
  std::vector<EnergySample> samples = draw_sk_energy_samples(opt.n, a, opt.samples, opt.seed);
  const EnergyEstimate est = summarize_samples(
      samples, std::isfinite(bound) ? std::optional<double>(bound) : std::nullopt);

  json config{{"command", "mc"},      {"n", opt.n},
              {"angles", opt.angles_file}, {"p", a.p()},
              {"samples", opt.samples},    {"seed", opt.seed},
              {"force", opt.force}};

  json result;
  result["mean"] = est.mean;
  result["std_error"] = est.std_error;
  result["n_samples"] = est.n_samples;
  if (est.variance_bound) {
    result["variance_bound"] = *est.variance_bound;
    result["sample_std_bound"] = std::sqrt(*est.variance_bound);
    result["bound_overflowed"] = false;
  } else {
    // The bound exceeds double range. That is a property of these angles, not
    // of the draws, so it is reported rather than treated as an error.
    result["variance_bound"] = nullptr;
    result["sample_std_bound"] = nullptr;
    result["bound_overflowed"] = true;
  }
  if (a.p() == 1 && opt.n <= 2048) {
    result["exact"] = exact_sk_energy_p1(opt.n, a);
  }

  json report = header(config);
  report["result"] = result;
  write_output(opt.out, render(report));

  if (!opt.samples_out.empty()) {
    write_output(opt.samples_out, samples_to_csv(samples));
  }
}

void run_simulate(const SimulateOptions& opt) {
  const AngleVector a = read_angle_file(opt.angles_file);

  json config{{"command", "simulate"}, {"model", opt.model},
              {"n", opt.n},            {"angles", opt.angles_file},
              {"seed", opt.seed},      {"cut_draws", opt.cut_draws}};
  if (opt.cut_draws < 0) throw validation_error("--cut-draws must be nonnegative");

  IsingHamiltonian h;
  json instance;
  bool graph_model = false;
  if (opt.model == "er" || opt.model == "chung-lu") {
    graph_model = true;
    GraphInstance g;
    if (opt.model == "er") {
      if (!(opt.degree > 0.0)) throw validation_error("er needs a positive --d");
      g = sample_er(opt.n, opt.degree, opt.seed);
      config["degree"] = opt.degree;
    } else {
      if (opt.dist.empty()) {
        throw validation_error("chung-lu needs --dist degree:probability[,...]");
      }
      const DegreeDistribution dist = parse_distribution(opt.dist);
      g = sample_chung_lu(opt.n, dist, opt.seed);
      config["dist"] = distribution_to_json(dist);
    }
    h.n = g.n;
    for (const auto& [i, j] : g.edges) h.terms.push_back({{i, j}, 1.0});
    instance["n"] = g.n;
    instance["edge_count"] = g.edges.size();
  } else if (opt.model == "sk") {
    if (opt.cut_draws > 0) {
      throw validation_error("cut statistics are only defined for unit-coupling graph models");
    }
    const SKInstance inst = sample_sk(opt.n, opt.seed);
    h.n = inst.n;
    for (int i = 0; i < inst.n; ++i) {
      for (int j = i + 1; j < inst.n; ++j) h.terms.push_back({{i, j}, inst.at(i, j)});
    }
    instance["n"] = inst.n;
    instance["coupling_count"] = h.terms.size();
  } else {
    throw validation_error("unknown model '" + opt.model +
                           "' (simulate expects er, chung-lu, or sk)");
  }

  const Simulator sim(std::move(h));
  const double energy = sim.expected_energy(a);

  json result;
  result["instance"] = instance;
  result["expected_energy"] = energy;
  result["energy_per_vertex"] = energy / opt.n;
  if (graph_model && opt.cut_draws > 0) {
    Rng rng(opt.seed, 0x637574);
    const CutStatistics cs = sim.cut_statistics(a, opt.cut_draws, rng);
    result["cut"] = {{"expected_cut", cs.expected_cut},
                     {"best_sampled_cut", cs.best_sampled_cut}};
  }

  json report = header(config);
  report["result"] = result;
  write_output(opt.out, render(report));
}

void run_experiment(const ExperimentOptions& opt) {
  if (opt.ensemble != "er" && opt.ensemble != "chung-lu") {
    throw validation_error("unknown ensemble '" + opt.ensemble + "' (expected er or chung-lu)");
  }
  if (opt.n < 2) throw validation_error("--n must be at least 2");
  if (opt.n > 20) {
    throw resource_error("experiment instances are simulated exactly; n is capped at 20");
  }
  if (opt.p < 1) throw validation_error("--p must be at least 1");
  if (opt.p > kMaxDepth) {
    throw resource_error("the infinite-size guess is capped at p = " + std::to_string(kMaxDepth));
  }
  if (opt.instances < 1) throw validation_error("--instances must be at least 1");
  if (opt.restarts < 1) throw validation_error("--restarts must be at least 1");
  if (opt.budget < 1) throw validation_error("--budget must be at least 1");

  DegreeDistribution dist;
  double mean_deg = opt.degree;
  if (opt.ensemble == "chung-lu") {
    dist = parse_distribution(opt.dist);
    mean_deg = mean_degree(dist);
  } else if (!(opt.degree > 0.0)) {
    throw validation_error("er needs a positive --d");
  }

  json config{{"command", "experiment"}, {"ensemble", opt.ensemble},
              {"n", opt.n},              {"p", opt.p},
              {"instances", opt.instances}, {"restarts", opt.restarts},
              {"budget", opt.budget},    {"seed", opt.seed}};
  if (opt.ensemble == "er") {
    config["degree"] = opt.degree;
  } else {
    config["dist"] = distribution_to_json(dist);
  }

  // Stage 1: the guess. Optimize the infinite-size SK energy at this depth
  // and rescale the gammas down to the ensemble's mean degree.
  const BitstringTable table(opt.p);
  const EnergyFunctional sk_f = [&table](const AngleVector& a) {
    return sk_energy_per_vertex(table, a);
  };
  Rng seeder(opt.seed, 0x657870);
  const std::uint64_t sk_seed = seeder.next_u64();
  std::vector<std::pair<std::uint64_t, std::uint64_t>> instance_seeds;
  instance_seeds.reserve(static_cast<std::size_t>(opt.instances));
  for (int i = 0; i < opt.instances; ++i) {
    const std::uint64_t graph_seed = seeder.next_u64();
    const std::uint64_t restart_seed = seeder.next_u64();
    instance_seeds.emplace_back(graph_seed, restart_seed);
  }

  const OptimizationResult sk_opt = multi_restart(sk_f, opt.p, 60, sk_seed, 1000);
  const StandardizedAngles sk_std =
      standardize(sk_opt.best_angles, WeightParity::kGenericWeights);
  const AngleVector guess = transfer_sk_to_er(sk_std.angles, mean_deg);
  const StandardizedAngles guess_std = standardize(guess, WeightParity::kIntegerCouplings);

  // Stage 2: per instance, polish the guess and race it against random
  // restarts under the same evaluation budget.
  json rows = json::array();
  double sum_attempts = 0.0;
  int censored = 0;
  int guess_wins = 0;
  double sum_dist_all = 0.0;
  double sum_dist_betas = 0.0;
  double sum_dist_gammas = 0.0;

  for (int i = 0; i < opt.instances; ++i) {
    const auto [graph_seed, restart_seed] = instance_seeds[static_cast<std::size_t>(i)];
    const GraphInstance g = opt.ensemble == "er"
                                ? sample_er(opt.n, opt.degree, graph_seed)
                                : sample_chung_lu(opt.n, dist, graph_seed);
    IsingHamiltonian h;
    h.n = g.n;
    for (const auto& [u, v] : g.edges) h.terms.push_back({{u, v}, 1.0});
    const Simulator sim(std::move(h));
    const double inv_n = 1.0 / opt.n;
    const EnergyFunctional f = [&sim, inv_n](const AngleVector& a) {
      return sim.expected_energy(a) * inv_n;
    };

    const double energy_at_guess = f(guess);
    const OptimizationResult from_guess = minimize(f, opt.p, guess, opt.budget);
    const OptimizationResult restarts =
        multi_restart(f, opt.p, opt.restarts, restart_seed, opt.budget);

    const int attempts = attempts_to_beat(restarts, from_guess.best_value);
    // When no restart beats the polished guess the count is censored at the
    // restart budget, which understates the true value.
    sum_attempts += attempts < 0 ? opt.restarts : attempts;
    censored += attempts < 0 ? 1 : 0;
    const bool guess_at_least_best =
        from_guess.best_value <= restarts.best_value + 1e-12;
    guess_wins += guess_at_least_best ? 1 : 0;

    const StandardizedAngles best_std =
        standardize(restarts.best_angles, WeightParity::kIntegerCouplings);
    const double d_all = angle_distance(guess_std, best_std, AngleSubset::kAll);
    const double d_betas = angle_distance(guess_std, best_std, AngleSubset::kBetas);
    const double d_gammas = angle_distance(guess_std, best_std, AngleSubset::kGammas);
    sum_dist_all += d_all;
    sum_dist_betas += d_betas;
    sum_dist_gammas += d_gammas;

    json iterations = json::array();
    json values = json::array();
    for (const auto& r : restarts.trace) {
      iterations.push_back(r.iterations);
      values.push_back(r.value);
    }

    json row;
    row["index"] = i;
    row["edge_count"] = g.edges.size();
    row["energy_at_guess"] = energy_at_guess;
    row["optimized_from_guess"] = from_guess.best_value;
    row["guess_iterations"] = from_guess.trace.empty() ? 0 : from_guess.trace[0].iterations;
    row["best_restart"] = restarts.best_value;
    row["guess_at_least_best_restart"] = guess_at_least_best;
    row["attempts_to_beat"] = attempts;
    row["distance"] = {{"all", d_all}, {"betas", d_betas}, {"gammas", d_gammas}};
    row["best_restart_angles"] = angles_to_json(best_std.angles);
    row["restart_trace"] = {{"iterations", iterations}, {"values", values}};
    rows.push_back(std::move(row));
  }

  const double inv = 1.0 / opt.instances;
  json summary;
  summary["mean_degree"] = mean_deg;
  summary["sk_limit_energy"] = sk_opt.best_value;
  summary["sk_optimal_angles"] = angles_to_json(sk_std.angles);
  summary["guess_angles"] = angles_to_json(guess_std.angles);
  summary["mean_attempts_to_beat"] = sum_attempts * inv;
  summary["instances_where_no_restart_beat_guess"] = censored;
  summary["guess_at_least_best_fraction"] = guess_wins * inv;
  summary["mean_distance"] = {{"all", sum_dist_all * inv},
                              {"betas", sum_dist_betas * inv},
                              {"gammas", sum_dist_gammas * inv}};

  json report = header(config);
  report["instances"] = rows;
  report["summary"] = summary;
  write_output(opt.out, render(report));
}

void run_landscape(const LandscapeOptions& opt) {
  ModelContext ctx = make_limit_model(opt.model, opt.p, opt.degree, opt.arity, opt.dist);
  const Axis beta_axis = parse_axis(opt.beta_axis);
  const Axis gamma_axis = parse_axis(opt.gamma_axis);

  const int p = opt.p;
  double rows_d = 1.0;
  for (int j = 0; j < p; ++j) rows_d *= beta_axis.steps;
  for (int j = 0; j < p; ++j) rows_d *= gamma_axis.steps;
  if (rows_d > 1e6) {
    char count[40];
    std::snprintf(count, sizeof count, "%.0f", rows_d);
    throw resource_error("grid has " + std::string(count) + " points; the cap is 1000000");
  }
  const std::int64_t rows = static_cast<std::int64_t>(rows_d);

  // Row r decodes to one grid point: beta axes first, gamma axes after, the
  // last coordinate varying fastest. Energies are computed in parallel and
  // written in index order, so the bytes do not depend on the thread count.
  const auto point_at = [&](std::int64_t r) {
    AngleVector a;
    a.betas.resize(static_cast<std::size_t>(p));
    a.gammas.resize(static_cast<std::size_t>(p));
    for (int j = p - 1; j >= 0; --j) {
      a.gammas[static_cast<std::size_t>(j)] =
          gamma_axis.value_at(static_cast<int>(r % gamma_axis.steps));
      r /= gamma_axis.steps;
    }
    for (int j = p - 1; j >= 0; --j) {
      a.betas[static_cast<std::size_t>(j)] =
          beta_axis.value_at(static_cast<int>(r % beta_axis.steps));
      r /= beta_axis.steps;
    }
    return a;
  };

  std::vector<double> energies(static_cast<std::size_t>(rows));
  parallel_for(rows, [&](std::int64_t r) {
    energies[static_cast<std::size_t>(r)] = ctx.f(point_at(r));
  });

  std::string csv;
  csv.reserve(static_cast<std::size_t>(rows) * 24 * (2 * p + 1));
  for (int j = 0; j < p; ++j) csv += "beta_" + std::to_string(j) + ",";
  for (int j = 0; j < p; ++j) csv += "gamma_" + std::to_string(j) + ",";
  csv += "energy\n";
  for (std::int64_t r = 0; r < rows; ++r) {
    const AngleVector a = point_at(r);
    for (double b : a.betas) {
      csv += format_double(b);
      csv += ',';
    }
    for (double g : a.gammas) {
      csv += format_double(g);
      csv += ',';
    }
    csv += format_double(energies[static_cast<std::size_t>(r)]);
    csv += '\n';
  }
  write_output(opt.out, csv);
}

}  // namespace qaoa::cli
