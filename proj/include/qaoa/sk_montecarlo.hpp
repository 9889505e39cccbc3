#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qaoa/bitstrings.hpp"

namespace qaoa {

// Unbiased Monte-Carlo estimator of the disorder-averaged QAOA energy per
// vertex on the Sherrington-Kirkpatrick model at finite n. Each draw costs
// O(4^p * 4^p) arithmetic regardless of n: the configuration-path sum is
// reorganized so that only the occupancies of the non-palindromic path
// strings are sampled (one Poisson draw per string pair), while the
// palindromic bulk is summed in closed form.

struct EnergySample {
  double value = 0.0;
};

struct EnergyEstimate {
  double mean = 0.0;
  // Sample standard deviation (ddof 1) divided by sqrt(n_samples).
  double std_error = 0.0;
  int n_samples = 0;
  // Deterministic per-sample variance bound, when it fits in a double.
  std::optional<double> variance_bound;
};

// Exact disorder-averaged energy per vertex for a single layer, by direct
// summation of the configuration classes. Requires p == 1 and 2 <= n <= 2048.
// Useful as a ground truth for the sampler and for finite-size extrapolation.
double exact_sk_energy_p1(int n, const AngleVector& angles);

// One draw of the estimator. Equal in distribution (and in value, for a fixed
// seed) to draw_sk_energy_samples(n, angles, 1, seed)[0]. Throws
// resource_error when the reweighting factor overflows double range, which
// happens at large angle magnitudes where the estimator degenerates.
EnergySample sample_sk_energy(int n, const AngleVector& angles, std::uint64_t seed);

// Independent draws; sample i is produced from a dedicated RNG substream, so
// the values do not depend on thread count or evaluation order.
std::vector<EnergySample> draw_sk_energy_samples(int n, const AngleVector& angles,
                                                 int n_samples, std::uint64_t seed);

// Draws n_samples (at least 2) and reports mean, standard error, and the
// deterministic variance bound for these angles when it is finite.
EnergyEstimate estimate_sk_energy(int n, const AngleVector& angles, int n_samples,
                                  std::uint64_t seed);

// Mean and standard error of already-drawn samples, with an optional bound to
// carry through.
EnergyEstimate summarize_samples(const std::vector<EnergySample>& samples,
                                 std::optional<double> variance_bound = std::nullopt);

// Header "sample_index,value", one row per sample, full double precision.
std::string samples_to_csv(const std::vector<EnergySample>& samples);

// The variance bound runs two sweeps over the non-palindromic strings: a
// growth sweep bounding how much each Poisson intensity can be inflated by
// earlier draws, and a compounding sweep propagating those factors backwards.
// The forms share the sweeps and differ in the final pair combination: kSharp
// keeps the full |B|^3 weight of the per-pair second-moment bound,
// kConservative relaxes it to |B| (valid since |B| <= 1, but far looser).
enum class VarianceBoundForm {
  kSharp,
  kConservative,
};

// Deterministic upper bound on the variance of one energy sample at these
// angles. Independent of n. May overflow to +infinity for deep circuits or
// large angles; that is a statement about the estimator, not an error.
double variance_upper_bound(const AngleVector& angles,
                            VarianceBoundForm form = VarianceBoundForm::kSharp);

}  // namespace qaoa
