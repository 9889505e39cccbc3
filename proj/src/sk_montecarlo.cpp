#include "qaoa/sk_montecarlo.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <utility>

#include "qaoa/errors.hpp"
#include "qaoa/guards.hpp"
#include "qaoa/parallel.hpp"
#include "qaoa/rng.hpp"

namespace qaoa {

namespace {

constexpr std::uint64_t kSkSamplerStream = 0x6d63;  // "mc"

// Everything about (n, angles) that draws share. Pair k of the list owns RNG
// substream pair_substream[k]; the substream is the pair's triangular index
// over all string pairs, so it does not depend on which pairs are active.
struct SamplerTables {
  int n = 0;
  BitstringTable table;
  std::vector<std::complex<double>> b;
  std::vector<double> phi;
  std::vector<double> phi2;
  std::vector<double> sign;  // energy sign attached to B in the pair sum

  struct ActivePair {
    Bitstring u = 0;
    Bitstring v = 0;
    std::uint64_t substream = 0;
  };
  std::vector<ActivePair> pairs;

  SamplerTables(int n_in, const AngleVector& angles) : n(n_in), table(angles.p()) {
    b = table.b_table(angles.betas);
    phi = table.phi_table(angles.gammas);
    const std::uint32_t size = table.size();
    phi2.resize(size);
    sign.resize(size);
    for (std::uint32_t w = 0; w < size; ++w) {
      phi2[w] = phi[w] * phi[w];
      sign[w] = table.energy_sign(static_cast<Bitstring>(w));
    }
    std::uint64_t index = 0;
    for (std::uint32_t u = 0; u < size; ++u) {
      for (std::uint32_t v = u + 1; v < size; ++v, ++index) {
        if (phi[u ^ v] == 0.0) continue;
        if (std::abs(b[u]) == 0.0 || std::abs(b[v]) == 0.0) continue;
        pairs.push_back({u, v, index});
      }
    }
  }
};

// One pair's term of one draw. Works in log space: the Poisson reweighting
// carries a factor exp(sum |lambda|) that can reach e^300 long before the
// combined term leaves double range. Returns NaN is impossible here; overflow
// to infinity is detected by the caller.
std::complex<double> sample_pair(const SamplerTables& tbl, Bitstring u, Bitstring v, Rng rng) {
  const auto& walk = tbl.table.odd_below_top();
  const double n = tbl.n;
  const double inv2n = 0.5 / n;

  double sum_abs_lambda = 0.0;
  double phase = 0.0;
  long long total_m = 0;
  // Strings that drew a nonzero occupancy, with their counts.
  std::vector<std::pair<Bitstring, double>> drawn;

  for (Bitstring t : walk) {
    const Bitstring ft = tbl.table.flip(t);
    double e_keep = tbl.phi2[u ^ t] + tbl.phi2[v ^ t];
    double e_flip = tbl.phi2[u ^ ft] + tbl.phi2[v ^ ft];
    for (const auto& [s, m] : drawn) {
      e_keep += m * tbl.phi2[s ^ t];
      e_flip += m * tbl.phi2[s ^ ft];
    }
    const std::complex<double> lambda =
        0.5 * n * tbl.b[t] * (std::exp(-e_flip * inv2n) - std::exp(-e_keep * inv2n));
    const double intensity = std::abs(lambda);
    if (intensity == 0.0) continue;
    sum_abs_lambda += intensity;
    const long long m = rng.next_poisson(intensity);
    if (m > 0) {
      phase += static_cast<double>(m) * std::arg(lambda);
      drawn.emplace_back(t, static_cast<double>(m));
      total_m += m;
    }
  }

  // The leftover population n - 2 - total_m must be nonnegative; beyond that
  // the falling factorial underneath is exactly zero.
  const long long leftover = tbl.n - 2 - total_m;
  if (leftover < 0) return {0.0, 0.0};
  const double log_ff = std::lgamma(n - 1.0) - std::lgamma(static_cast<double>(leftover) + 1.0) -
                        static_cast<double>(total_m) * std::log(n);

  // Palindromic strings summed in closed form, including their interaction
  // with the forced occupancies at u and v. B is exactly real on palindromes.
  double base = 0.0;
  for (Bitstring w : tbl.table.top_level()) {
    double e = tbl.phi2[u ^ w] + tbl.phi2[v ^ w];
    for (const auto& [s, m] : drawn) e += m * tbl.phi2[s ^ w];
    base += tbl.table.parity_sign(w) * tbl.b[w].real() * std::exp(-e * inv2n);
  }
  base *= 0.5;

  double base_sign = 1.0;
  double log_base_pow = 0.0;
  if (base == 0.0) {
    if (leftover > 0) return {0.0, 0.0};
  } else {
    if (base < 0.0 && (leftover & 1)) base_sign = -1.0;
    log_base_pow = static_cast<double>(leftover) * std::log(std::abs(base));
  }

  const double log_mag = sum_abs_lambda + std::log1p(-1.0 / n) - tbl.phi2[u ^ v] * inv2n +
                         log_ff + log_base_pow;
  const std::complex<double> reweight = std::polar(std::exp(log_mag), phase);
  return tbl.sign[u] * tbl.sign[v] * tbl.b[u] * tbl.b[v] * tbl.phi[u ^ v] * base_sign * reweight;
}

// NaN marks a degenerate draw; the public entry points turn it into an error.
double one_draw(const SamplerTables& tbl, const Rng& draw_rng) {
  const std::int64_t n_pairs = static_cast<std::int64_t>(tbl.pairs.size());
  std::vector<std::complex<double>> contrib(tbl.pairs.size());
  parallel_for(n_pairs, [&](std::int64_t k) {
    const auto& pr = tbl.pairs[static_cast<std::size_t>(k)];
    contrib[static_cast<std::size_t>(k)] = sample_pair(tbl, pr.u, pr.v, draw_rng.derive(pr.substream));
  });
  std::complex<double> acc{};
  for (const auto& c : contrib) acc += c;  // fixed order, thread-count independent
  const double value = -0.25 * acc.imag();
  if (!std::isfinite(acc.real()) || !std::isfinite(value)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return value;
}

SamplerTables make_tables(int n, const AngleVector& angles) {
  angles.validate();
  if (n < 2) throw validation_error("energy sampler: n must be at least 2");
  if (angles.p() > 5) {
    throw resource_error("energy sampler: p > 5 would need hundreds of MB of pair tables");
  }
  return SamplerTables(n, angles);
}

[[noreturn]] void throw_degenerate() {
  throw resource_error(
      "energy sampler: reweighting factor overflowed double range; the estimator degenerates at "
      "these angle magnitudes");
}

}  // namespace

double exact_sk_energy_p1(int n, const AngleVector& angles) {
  angles.validate();
  if (angles.p() != 1) throw validation_error("exact single-layer energy: angles must have p = 1");
  if (n < 2) throw validation_error("exact single-layer energy: n must be at least 2");
  if (n > 2048) throw resource_error("exact single-layer energy: n above 2048 not supported");

  // With one layer a path string has three bits and its phase weight only
  // reads the end bits, so strings fall into four classes keyed by
  // (s_0, s_2). Within a class, summing the two middle-bit choices with
  // binomial weights collapses the configuration sum to class occupancies:
  //   plain weight      sum_k C(N,k) a0^k a1^(N-k)           = X^N
  //   mid-sign weight   sum_k C(N,k) a0^k a1^(N-k) (2k - N)  = N Z X^(N-1)
  // where a0, a1 are the signed path weights of the two strings and
  // X = a0 + a1, Z = a0 - a1.
  BitstringTable table(1);
  const auto b = table.b_table(angles.betas);
  const auto ph = table.phi_table(angles.gammas);
  const auto cls = [](Bitstring w) { return (w & 1u) | ((w >> 1) & 2u); };

  std::complex<double> X[4] = {};
  std::complex<double> Z[4] = {};
  for (Bitstring w = 0; w < 8; ++w) {
    const std::complex<double> a = table.parity_sign(w) * b[w];
    X[cls(w)] += a;
    Z[cls(w)] += bit_at(w, 1) ? -a : a;
  }
  // Phase gap between classes, from middle-bit-zero representatives.
  double gap[4][4];
  for (int ca = 0; ca < 4; ++ca) {
    for (int cb = 0; cb < 4; ++cb) {
      const Bitstring wa = (ca & 1u) | ((ca & 2u) << 1);
      const Bitstring wb = (cb & 1u) | ((cb & 2u) << 1);
      gap[ca][cb] = ph[wa ^ wb];
    }
  }

  const auto plain = [&](int c, int occ) -> std::complex<double> {
    if (occ == 0) return 1.0;
    return std::pow(X[c], occ);
  };
  const auto signed_sum = [&](int c, int occ) -> std::complex<double> {
    if (occ == 0) return 0.0;
    if (occ == 1) return Z[c];
    return static_cast<double>(occ) * Z[c] * std::pow(X[c], occ - 1);
  };

  // Classes (0,1) and (1,0) have X == 0, so any term that populates one of
  // them more than once vanishes: occupancy k contributes X^k or k Z X^(k-1).
  const double log_half_n = static_cast<double>(n) * std::log(2.0);
  const std::complex<double> imag_unit(0.0, 1.0);
  std::complex<double> total{};
  for (int k1 = 0; k1 <= 1; ++k1) {      // class 1 = ends (1, 0)
    for (int k2 = 0; k2 <= 1; ++k2) {    // class 2 = ends (0, 1)
      for (int n0 = 0; n0 + k1 + k2 <= n; ++n0) {
        const int occ[4] = {n0, k1, k2, n - n0 - k1 - k2};
        double logw = std::lgamma(n + 1.0) - log_half_n;
        double gauss = 0.0;
        for (int ca = 0; ca < 4; ++ca) {
          logw -= std::lgamma(occ[ca] + 1.0);
          for (int cb = ca + 1; cb < 4; ++cb) {
            gauss += gap[ca][cb] * gap[ca][cb] * occ[ca] * occ[cb];
          }
        }
        std::complex<double> cross{};
        for (int ca = 0; ca < 4; ++ca) {
          for (int cb = 0; cb < 4; ++cb) {
            if (cb == ca || gap[ca][cb] == 0.0) continue;
            std::complex<double> term = gap[ca][cb] * signed_sum(ca, occ[ca]) * signed_sum(cb, occ[cb]);
            for (int cc = 0; cc < 4; ++cc) {
              if (cc != ca && cc != cb) term *= plain(cc, occ[cc]);
            }
            cross += term;
          }
        }
        total += std::exp(logw - gauss / (2.0 * n)) * cross;
      }
    }
  }
  total *= 0.5 * imag_unit / static_cast<double>(n);
  return real_with_guard(total, "exact single-layer energy") / n;
}

EnergySample sample_sk_energy(int n, const AngleVector& angles, std::uint64_t seed) {
  const SamplerTables tbl = make_tables(n, angles);
  const double value = one_draw(tbl, Rng(seed, kSkSamplerStream).derive(0));
  if (!std::isfinite(value)) throw_degenerate();
  return {value};
}

std::vector<EnergySample> draw_sk_energy_samples(int n, const AngleVector& angles, int n_samples,
                                                 std::uint64_t seed) {
  if (n_samples < 1) throw validation_error("energy sampler: n_samples must be at least 1");
  const SamplerTables tbl = make_tables(n, angles);
  const Rng root(seed, kSkSamplerStream);
  std::vector<EnergySample> out(static_cast<std::size_t>(n_samples));
  parallel_for(n_samples, [&](std::int64_t i) {
    out[static_cast<std::size_t>(i)].value = one_draw(tbl, root.derive(static_cast<std::uint64_t>(i)));
  });
  for (const auto& s : out) {
    if (!std::isfinite(s.value)) throw_degenerate();
  }
  return out;
}

EnergyEstimate estimate_sk_energy(int n, const AngleVector& angles, int n_samples,
                                  std::uint64_t seed) {
  if (n_samples < 2) {
    throw validation_error("energy estimate: need at least two samples for a standard error");
  }
  const std::vector<EnergySample> samples = draw_sk_energy_samples(n, angles, n_samples, seed);
  const double bound = variance_upper_bound(angles);
  return summarize_samples(samples, std::isfinite(bound) ? std::optional<double>(bound)
                                                         : std::nullopt);
}

EnergyEstimate summarize_samples(const std::vector<EnergySample>& samples,
                                 std::optional<double> variance_bound) {
  if (samples.empty()) throw validation_error("energy estimate: no samples to summarize");
  const auto count = static_cast<double>(samples.size());
  double mean = 0.0;
  for (const auto& s : samples) mean += s.value;
  mean /= count;
  double ss = 0.0;
  for (const auto& s : samples) {
    const double d = s.value - mean;
    ss += d * d;
  }
  EnergyEstimate est;
  est.mean = mean;
  est.std_error = samples.size() >= 2 ? std::sqrt(ss / (count - 1.0) / count) : 0.0;
  est.n_samples = static_cast<int>(samples.size());
  est.variance_bound = variance_bound;
  return est;
}

std::string samples_to_csv(const std::vector<EnergySample>& samples) {
  std::string csv = "sample_index,value\n";
  char row[64];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::snprintf(row, sizeof(row), "%zu,%.17g\n", i, samples[i].value);
    csv += row;
  }
  return csv;
}

double variance_upper_bound(const AngleVector& angles, VarianceBoundForm form) {
  angles.validate();
  const BitstringTable table(angles.p());
  const auto b = table.b_table(angles.betas);
  const auto ph = table.phi_table(angles.gammas);
  const std::uint32_t size = table.size();
  std::vector<double> phi2(size), absb(size);
  for (std::uint32_t w = 0; w < size; ++w) {
    phi2[w] = ph[w] * ph[w];
    absb[w] = std::abs(b[w]);
  }
  const auto& walk = table.odd_below_top();

  // Growth sweep: how much the draws of every other string can inflate this
  // string's Poisson intensity, in the worst case. Each contribution carries
  // the |B_t| damping from the intensity bound itself.
  std::vector<double> rhat(size, 1.0);
  for (Bitstring s : walk) {
    double acc = 0.0;
    for (Bitstring t : walk) {
      acc += absb[t] * std::abs(phi2[s ^ t] - phi2[s ^ table.flip(t)]);
    }
    rhat[s] = rhat[table.flip(s)] = std::exp(0.25 * acc);
  }
  // Compounding sweep: a string drawn late in the walk inflates every earlier
  // string's factor; visiting the walk backwards lets each factor settle
  // before it is used. Skip zero-gap updates so an already-infinite factor
  // contributes nothing rather than exp(inf * 0).
  for (std::size_t i = walk.size(); i-- > 0;) {
    const Bitstring s = walk[i];
    const double grown = rhat[s] * absb[s];
    for (std::size_t j = 0; j < i; ++j) {
      const Bitstring t = walk[j];
      const double gap = std::abs(phi2[t ^ table.flip(s)] - phi2[t ^ s]);
      if (gap == 0.0) continue;
      const double mult = std::exp(0.25 * grown * gap);
      rhat[t] *= mult;
      rhat[table.flip(t)] *= mult;
    }
  }

  // Pair terms carry B_u B_v twice over: once in the estimator's prefactor
  // and once inside the second-moment bound on the reweighting factor. The
  // sharp form keeps those |B|^3 weights; the conservative form relaxes them
  // to the single |B| of the coarse per-pair bound (valid since |B| <= 1).
  const int bpow = form == VarianceBoundForm::kSharp ? 3 : 1;
  double total = 0.0;
  for (std::uint32_t u = 0; u < size; ++u) {
    for (std::uint32_t v = u + 1; v < size; ++v) {
      if (phi2[u ^ v] == 0.0) continue;
      total += phi2[u ^ v] * std::pow(absb[u], bpow) * rhat[u] *
               std::pow(absb[v], bpow) * rhat[v];
    }
  }
  return 0.25 * total;
}

}  // namespace qaoa
