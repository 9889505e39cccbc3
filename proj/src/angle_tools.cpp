#include "qaoa/angle_tools.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qaoa/errors.hpp"
#include "qaoa/parallel.hpp"
#include "qaoa/rng.hpp"
#include "qaoa/simulator.hpp"

namespace qaoa {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Stream tag so restart starting points decorrelate from the instance
// samplers under a shared seed.
constexpr std::uint64_t kRestartStream = 0x6d72;

constexpr double kDiameterTol = 1e-8;
constexpr double kInitStep = 0.25;
constexpr double kSymmetryTol = 1e-10;

std::vector<double> flatten(const AngleVector& a) {
  std::vector<double> x;
  x.reserve(a.betas.size() + a.gammas.size());
  x.insert(x.end(), a.betas.begin(), a.betas.end());
  x.insert(x.end(), a.gammas.begin(), a.gammas.end());
  return x;
}

AngleVector unflatten(const std::vector<double>& x) {
  const std::size_t p = x.size() / 2;
  AngleVector a;
  a.betas.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(p));
  a.gammas.assign(x.begin() + static_cast<std::ptrdiff_t>(p), x.end());
  return a;
}

// Counts evaluations against the budget and rejects non-finite objective
// values on the spot.
class BudgetedObjective {
 public:
  BudgetedObjective(const EnergyFunctional& f, int budget) : f_(f), budget_(budget) {}

  bool spent() const { return evals_ >= budget_; }

  // False once the budget is exhausted; otherwise stores f(x) in `value`.
  bool eval(const std::vector<double>& x, double& value) {
    if (evals_ >= budget_) return false;
    ++evals_;
    const double v = f_(unflatten(x));
    if (!std::isfinite(v)) {
      throw consistency_error("minimize: objective returned a non-finite value");
    }
    value = v;
    return true;
  }

 private:
  const EnergyFunctional& f_;
  int budget_;
  int evals_ = 0;
};

double simplex_diameter(const std::vector<std::vector<double>>& pts) {
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < pts[i].size(); ++k) {
        const double d = pts[i][k] - pts[j][k];
        d2 += d * d;
      }
      worst = std::max(worst, d2);
    }
  }
  return std::sqrt(worst);
}

struct SimplexOutcome {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
};

// Nelder-Mead with the standard reflect/expand/contract/shrink coefficients
// (1, 2, 1/2, 1/2). Vertices are kept sorted by value with a stable order so
// runs are reproducible; the best vertex never worsens, which is what makes
// the "never above f(init)" guarantee hold.
SimplexOutcome nelder_mead(BudgetedObjective& obj, const std::vector<double>& start) {
  const std::size_t d = start.size();
  std::vector<std::vector<double>> pts;
  std::vector<double> val;
  pts.reserve(d + 1);
  val.reserve(d + 1);

  double v0 = 0.0;
  obj.eval(start, v0);  // budget >= 1, so the starting point is always valued
  pts.push_back(start);
  val.push_back(v0);
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> x = start;
    x[i] += kInitStep;
    double v = 0.0;
    if (!obj.eval(x, v)) break;
    pts.push_back(std::move(x));
    val.push_back(v);
  }

  auto sort_vertices = [&] {
    std::vector<std::size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    std::vector<std::vector<double>> new_pts;
    std::vector<double> new_val;
    new_pts.reserve(pts.size());
    new_val.reserve(pts.size());
    for (std::size_t i : idx) {
      new_pts.push_back(std::move(pts[i]));
      new_val.push_back(val[i]);
    }
    pts = std::move(new_pts);
    val = std::move(new_val);
  };

  sort_vertices();
  int iterations = 0;
  if (pts.size() == d + 1) {
    while (!obj.spent() && simplex_diameter(pts) >= kDiameterTol) {
      std::vector<double> centroid(d, 0.0);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < d; ++k) centroid[k] += pts[i][k];
      }
      for (double& c : centroid) c /= static_cast<double>(d);
      const std::vector<double>& worst = pts[d];

      std::vector<double> xr(d);
      for (std::size_t k = 0; k < d; ++k) xr[k] = 2.0 * centroid[k] - worst[k];
      double fr = 0.0;
      if (!obj.eval(xr, fr)) break;

      bool shrink = false;
      if (fr < val[0]) {
        std::vector<double> xe(d);
        for (std::size_t k = 0; k < d; ++k) xe[k] = 3.0 * centroid[k] - 2.0 * worst[k];
        double fe = 0.0;
        if (obj.eval(xe, fe) && fe < fr) {
          pts[d] = std::move(xe);
          val[d] = fe;
        } else {
          pts[d] = std::move(xr);
          val[d] = fr;
        }
      } else if (fr < val[d - 1]) {
        pts[d] = std::move(xr);
        val[d] = fr;
      } else if (fr < val[d]) {
        std::vector<double> xc(d);
        for (std::size_t k = 0; k < d; ++k) xc[k] = centroid[k] + 0.5 * (xr[k] - centroid[k]);
        double fc = 0.0;
        if (obj.eval(xc, fc) && fc <= fr) {
          pts[d] = std::move(xc);
          val[d] = fc;
        } else {
          shrink = true;
        }
      } else {
        std::vector<double> xc(d);
        for (std::size_t k = 0; k < d; ++k) xc[k] = centroid[k] + 0.5 * (worst[k] - centroid[k]);
        double fc = 0.0;
        if (obj.eval(xc, fc) && fc < val[d]) {
          pts[d] = std::move(xc);
          val[d] = fc;
        } else {
          shrink = true;
        }
      }

      if (shrink) {
        for (std::size_t i = 1; i <= d; ++i) {
          std::vector<double> x(d);
          for (std::size_t k = 0; k < d; ++k) x[k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
          double v = 0.0;
          if (!obj.eval(x, v)) break;  // out of budget: keep the old vertex
          pts[i] = std::move(x);
          val[i] = v;
        }
      }

      ++iterations;
      sort_vertices();
    }
  }

  return {pts[0], val[0], iterations};
}

// Candidate symmetry checks run on random two-body instances of the given
// coupling class. Returns one pass/fail flag per AngleSymmetry value.
IsingHamiltonian random_two_body(Rng& rng, int n, WeightParity parity) {
  IsingHamiltonian h;
  h.n = n;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.next_double() >= 0.5) continue;
      double coupling;
      if (parity == WeightParity::kIntegerCouplings) {
        constexpr double kChoices[] = {-2.0, -1.0, 1.0, 2.0};
        coupling = kChoices[rng.next_below(4)];
      } else {
        // Keep the draws visibly away from integers so a symmetry that only
        // holds on integer spectra cannot slip through the check.
        do {
          coupling = rng.uniform(-1.5, 1.5);
        } while (std::abs(coupling - std::nearbyint(coupling)) < 0.05);
      }
      h.terms.push_back({{i, j}, coupling});
    }
  }
  if (h.terms.empty()) h.terms.push_back({{0, 1}, 1.0});
  return h;
}

std::array<bool, 3> verify_symmetries(WeightParity parity) {
  Rng rng(0x73796d, static_cast<std::uint64_t>(parity));
  std::array<double, 3> deviation{0.0, 0.0, 0.0};
  auto record = [&](int which, const Simulator& sim, const AngleVector& v, double e0) {
    deviation[which] = std::max(deviation[which], std::abs(sim.expected_energy(v) - e0));
  };
  for (int instance = 0; instance < 10; ++instance) {
    const Simulator sim(random_two_body(rng, 8, parity));
    for (int p = 1; p <= 3; ++p) {
      for (int rep = 0; rep < 2; ++rep) {
        AngleVector a;
        for (int j = 0; j < p; ++j) {
          a.betas.push_back(rng.uniform(-2.5, 2.5));
          a.gammas.push_back(rng.uniform(-2.5, 2.5));
        }
        const double e0 = sim.expected_energy(a);

        AngleVector flipped = a;
        for (double& b : flipped.betas) b = -b;
        for (double& g : flipped.gammas) g = -g;
        record(0, sim, flipped, e0);

        for (int j = 0; j < p; ++j) {
          AngleVector shifted = a;
          shifted.betas[j] += kPi;
          record(1, sim, shifted, e0);
          shifted = a;
          shifted.gammas[j] += 2.0 * kPi;
          record(2, sim, shifted, e0);
        }
      }
    }
  }
  return {deviation[0] < kSymmetryTol, deviation[1] < kSymmetryTol,
          deviation[2] < kSymmetryTol};
}

const std::array<std::array<bool, 3>, 2>& symmetry_table() {
  static const std::array<std::array<bool, 3>, 2> table{
      verify_symmetries(WeightParity::kIntegerCouplings),
      verify_symmetries(WeightParity::kGenericWeights)};
  return table;
}

// Reduces x to (-period/2, period/2]. std::remainder is exact, so values
// already inside the interval come back bit for bit unchanged.
double reduce_half_open(double x, double period) {
  double r = std::remainder(x, period);
  if (r <= -0.5 * period) r += period;  // remainder can land on the open endpoint
  return r;
}

// The flip gauge keeps the representative whose coordinate sum is positive;
// exact ties fall back to the sign of the first nonzero coordinate so the
// rule stays a function of the orbit alone.
bool wants_flip(const AngleVector& v) {
  double sum = 0.0;
  for (double b : v.betas) sum += b;
  for (double g : v.gammas) sum += g;
  if (sum != 0.0) return sum < 0.0;
  for (double b : v.betas) {
    if (b != 0.0) return b < 0.0;
  }
  for (double g : v.gammas) {
    if (g != 0.0) return g < 0.0;
  }
  return false;
}

}  // namespace

OptimizationResult minimize(const EnergyFunctional& f, int p, const AngleVector& init,
                            int budget) {
  if (!f) throw validation_error("minimize: missing objective");
  if (p < 1) throw validation_error("minimize: need at least one layer");
  init.validate();
  if (init.p() != p) {
    throw validation_error("minimize: starting point has the wrong number of layers");
  }
  if (budget < 1) throw validation_error("minimize: evaluation budget must be at least 1");

  BudgetedObjective obj(f, budget);
  SimplexOutcome out = nelder_mead(obj, flatten(init));

  OptimizationResult result;
  result.best_angles = unflatten(out.x);
  result.best_value = out.value;
  result.restarts_used = 1;
  result.trace.push_back({0, out.iterations, out.value});
  return result;
}

OptimizationResult multi_restart(const EnergyFunctional& f, int p, int n_restarts,
                                 std::uint64_t seed, int budget) {
  if (n_restarts < 1) throw validation_error("multi_restart: need at least one restart");

  std::vector<OptimizationResult> runs(static_cast<std::size_t>(n_restarts));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(n_restarts));
  parallel_for(n_restarts, [&](std::int64_t i) {
    try {
      const AngleVector init = restart_initial_angles(seed, static_cast<int>(i), p);
      runs[static_cast<std::size_t>(i)] = minimize(f, p, init, budget);
    } catch (...) {
      failures[static_cast<std::size_t>(i)] = std::current_exception();
    }
  });
  for (const std::exception_ptr& e : failures) {
    if (e) std::rethrow_exception(e);
  }

  OptimizationResult out;
  out.restarts_used = n_restarts;
  out.trace.reserve(static_cast<std::size_t>(n_restarts));
  int best = 0;
  for (int i = 0; i < n_restarts; ++i) {
    RestartRecord record = runs[static_cast<std::size_t>(i)].trace.front();
    record.restart = i;
    out.trace.push_back(record);
    if (runs[static_cast<std::size_t>(i)].best_value <
        runs[static_cast<std::size_t>(best)].best_value) {
      best = i;
    }
  }
  out.best_angles = runs[static_cast<std::size_t>(best)].best_angles;
  out.best_value = runs[static_cast<std::size_t>(best)].best_value;
  return out;
}

AngleVector restart_initial_angles(std::uint64_t seed, int restart, int p) {
  if (restart < 0) throw validation_error("restart index must be nonnegative");
  if (p < 1) throw validation_error("need at least one layer");
  Rng child = Rng(seed, kRestartStream).derive(static_cast<std::uint64_t>(restart));
  AngleVector a;
  a.betas.reserve(static_cast<std::size_t>(p));
  a.gammas.reserve(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) a.betas.push_back(child.uniform(-kPi, kPi));
  for (int j = 0; j < p; ++j) a.gammas.push_back(child.uniform(-kPi, kPi));
  return a;
}

int attempts_to_beat(const OptimizationResult& result, double reference) {
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    if (result.trace[i].value < reference) return static_cast<int>(i) + 1;
  }
  return -1;
}

std::string trace_to_csv(const OptimizationResult& result) {
  std::string out = "restart,iterations,final_value\n";
  char line[96];
  for (const RestartRecord& r : result.trace) {
    std::snprintf(line, sizeof(line), "%d,%d,%.17g\n", r.restart, r.iterations, r.value);
    out += line;
  }
  return out;
}

bool symmetry_holds(AngleSymmetry symmetry, WeightParity parity) {
  return symmetry_table()[static_cast<std::size_t>(parity)]
                         [static_cast<std::size_t>(symmetry)];
}

StandardizedAngles standardize(const AngleVector& a, WeightParity parity) {
  a.validate();
  const bool reduce_beta = symmetry_holds(AngleSymmetry::kBetaShiftPi, parity);
  const bool reduce_gamma = symmetry_holds(AngleSymmetry::kGammaShiftTwoPi, parity);
  const bool fix_flip = symmetry_holds(AngleSymmetry::kGlobalFlip, parity);

  StandardizedAngles out{a, parity};
  auto reduce = [&](AngleVector& v) {
    if (reduce_beta) {
      for (double& b : v.betas) b = reduce_half_open(b, kPi);
    }
    if (reduce_gamma) {
      for (double& g : v.gammas) g = reduce_half_open(g, 2.0 * kPi);
    }
  };
  reduce(out.angles);
  if (fix_flip && wants_flip(out.angles)) {
    for (double& b : out.angles.betas) b = -b;
    for (double& g : out.angles.gammas) g = -g;
    reduce(out.angles);  // negation can push a boundary value just outside
  }
  return out;
}

double angle_distance(const StandardizedAngles& a, const StandardizedAngles& b,
                      AngleSubset subset) {
  a.angles.validate();
  b.angles.validate();
  if (a.angles.p() != b.angles.p()) {
    throw validation_error("angle distance: angle vectors have different depths");
  }
  if (a.parity != b.parity) {
    throw validation_error("angle distance: angle vectors use different coupling classes");
  }

  double sum = 0.0;
  int count = 0;
  if (subset != AngleSubset::kGammas) {
    for (std::size_t j = 0; j < a.angles.betas.size(); ++j) {
      const double u =
          std::abs(std::remainder(a.angles.betas[j] - b.angles.betas[j], kPi)) / (0.5 * kPi);
      sum += u * u;
      ++count;
    }
  }
  if (subset != AngleSubset::kBetas) {
    for (std::size_t j = 0; j < a.angles.gammas.size(); ++j) {
      const double u =
          std::abs(std::remainder(a.angles.gammas[j] - b.angles.gammas[j], 2.0 * kPi)) / kPi;
      sum += u * u;
      ++count;
    }
  }
  return std::sqrt(sum / static_cast<double>(count));
}

}  // namespace qaoa
