#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qaoa/bitstrings.hpp"

namespace qaoa {

// Objective over a full angle vector. Must be deterministic and safe to call
// from several threads at once (restarts run in parallel).
using EnergyFunctional = std::function<double(const AngleVector&)>;

struct RestartRecord {
  int restart = 0;     // 0-based restart index
  int iterations = 0;  // simplex iterations spent in that restart
  double value = 0.0;  // final objective value of that restart
};

struct OptimizationResult {
  AngleVector best_angles;
  double best_value = 0.0;
  int restarts_used = 0;
  std::vector<RestartRecord> trace;  // one record per restart, in restart order
};

// Nelder-Mead from a fixed starting point. `budget` caps objective
// evaluations; the run also stops once the simplex diameter falls below
// 1e-8. Never returns a value above f(init). Throws consistency_error if the
// objective produces a non-finite value, validation_error on bad arguments.
OptimizationResult minimize(const EnergyFunctional& f, int p, const AngleVector& init,
                            int budget = 1000);

// Independent Nelder-Mead runs from uniform random starts in [-pi, pi]^{2p},
// one per restart, executed in parallel on private RNG substreams. Returns
// the lowest final value (ties break toward the lower restart index) together
// with the per-restart trace.
OptimizationResult multi_restart(const EnergyFunctional& f, int p, int n_restarts,
                                 std::uint64_t seed, int budget = 1000);

// The starting point multi_restart(seed, ...) uses for a given restart.
AngleVector restart_initial_angles(std::uint64_t seed, int restart, int p);

// Number of restarts it took to reach a value strictly below `reference`,
// i.e. 1 + the first qualifying index in the trace, or -1 if none qualifies.
int attempts_to_beat(const OptimizationResult& result, double reference);

// "restart,iterations,final_value" rows, full double precision.
std::string trace_to_csv(const OptimizationResult& result);

// Coupling class of the cost functions an angle vector is meant for. Integer
// couplings admit a larger symmetry group (gamma gains a 2*pi period).
enum class WeightParity { kIntegerCouplings, kGenericWeights };

// Candidate symmetries of two-body cost functions under the half-angle layer
// convention. Shifts act per layer.
enum class AngleSymmetry { kGlobalFlip, kBetaShiftPi, kGammaShiftTwoPi };

// Whether a candidate symmetry actually leaves circuit energies invariant for
// the given coupling class. Checked once per (symmetry, parity) pair against
// exact simulations of random two-body instances and then cached; standardize
// only applies reductions whose symmetry passed this check.
bool symmetry_holds(AngleSymmetry symmetry, WeightParity parity);

struct StandardizedAngles {
  AngleVector angles;
  WeightParity parity = WeightParity::kIntegerCouplings;
};

// Canonical representative under the verified symmetries: betas reduced to
// (-pi/2, pi/2], gammas to (-pi, pi] when the coupling class allows it, and
// the overall sign fixed so the coordinate sum is nonnegative. Idempotent,
// and energy-preserving for two-body cost functions of the declared class.
StandardizedAngles standardize(const AngleVector& a,
                               WeightParity parity = WeightParity::kIntegerCouplings);

enum class AngleSubset { kAll, kBetas, kGammas };

// Root-mean-square circular distance between canonical representatives over
// the chosen coordinate subset, each coordinate normalized by its
// half-period (pi/2 for betas, pi for gammas). Always lands in [0, 1].
double angle_distance(const StandardizedAngles& a, const StandardizedAngles& b,
                      AngleSubset subset);

}  // namespace qaoa
