#include "qaoa/dspin.hpp"

#include <array>
#include <cmath>
#include <complex>

#include "qaoa/errors.hpp"
#include "qaoa/guards.hpp"

namespace qaoa {

namespace {

using cplx = std::complex<double>;

void check_angle(double a, const char* name) {
  if (!std::isfinite(a)) {
    throw validation_error(std::string(name) + " must be finite");
  }
}

cplx pow_int(cplx z, int k) {
  cplx acc{1.0, 0.0};
  while (k > 0) {
    if (k & 1) acc *= z;
    z *= z;
    k >>= 1;
  }
  return acc;
}

// Enumeration state for the composition sum over the 8 length-3 path strings.
// Each string contributes a per-unit weight (mixer factor, signs, decay); the
// phase depends only on two count parities, so those ride along in the DFS.
struct CompositionSum {
  std::array<cplx, 8> unit;
  std::array<int, 8> hi_bit;  // s_2, drives one phase parity
  std::array<int, 8> lo_bit;  // s_0, drives the other
  cplx phase[2][2];           // cis(phi) by (parity of hi count, parity of lo count)
  cplx total{};

  void run(int s, int remaining, cplx coeff, int pa, int pb) {
    if (s == 7) {
      coeff *= pow_int(unit[7], remaining);
      pa = (pa + remaining * hi_bit[7]) & 1;
      pb = (pb + remaining * lo_bit[7]) & 1;
      total += coeff * phase[pa][pb];
      return;
    }
    double binom = 1.0;
    cplx upow{1.0, 0.0};
    for (int k = 0; k <= remaining; ++k) {
      if (k > 0) {
        binom = binom * static_cast<double>(remaining - k + 1) / static_cast<double>(k);
        upow *= unit[s];
      }
      run(s + 1, remaining - k, coeff * binom * upow, (pa + k * hi_bit[s]) & 1,
          (pb + k * lo_bit[s]) & 1);
    }
  }
};

}  // namespace

double diluted_p1_energy(double beta, double gamma, const DSpinConfig& cfg) {
  check_angle(beta, "beta");
  check_angle(gamma, "gamma");
  if (cfg.D < 2) throw validation_error("interaction arity must be at least 2");
  if (cfg.D > 40) throw resource_error("interaction arity above 40 is not supported");
  if (!std::isfinite(cfg.d) || cfg.d <= 0.0) {
    throw validation_error("degree parameter must be positive and finite");
  }

  const double c = std::cos(0.5 * beta);
  const double s = std::sin(0.5 * beta);
  const cplx even{c * c, 0.0};
  const cplx mixed{0.0, c * s};
  const cplx cross{-s * s, 0.0};
  const double decay = std::exp(-cfg.d * (1.0 - std::cos(gamma)));

  CompositionSum sum;
  for (int t = 0; t < 8; ++t) {
    const int b0 = t & 1, b1 = (t >> 1) & 1, b2 = (t >> 2) & 1;
    cplx u = (b0 == b1 && b1 == b2) ? even : (b0 == b2 ? cross : mixed);
    if (b1) u = -u;            // middle-bit sign, one per unit
    if (b0 != b1) u = -u;      // odd-string sign, one per unit
    if (b0 != b2) u *= decay;  // asymmetric strings carry the sparse decay
    sum.unit[t] = u;
    sum.hi_bit[t] = b2;
    sum.lo_bit[t] = b0;
  }
  for (int pa = 0; pa < 2; ++pa) {
    for (int pb = 0; pb < 2; ++pb) {
      const double sa = pa ? -1.0 : 1.0;
      const double sb = pb ? -1.0 : 1.0;
      sum.phase[pa][pb] = std::polar(1.0, 0.5 * gamma * (sa - sb));
    }
  }
  sum.run(0, cfg.D, cplx{1.0, 0.0}, 0, 0);

  const double norm = cfg.d / (std::ldexp(1.0, cfg.D) * static_cast<double>(cfg.D));
  return real_with_guard(norm * sum.total, "diluted_p1_energy");
}

double dense_p1_energy(double beta, double gamma, int D) {
  check_angle(beta, "beta");
  check_angle(gamma, "gamma");
  if (D < 2) throw validation_error("interaction arity must be at least 2");

  const double fact = std::tgamma(static_cast<double>(D));  // (D-1)!
  const double damp = std::exp(-gamma * gamma / (2.0 * fact));
  const cplx z{std::cos(beta), std::sin(beta) * damp};
  // Normalized to the 2-body all-pairs limit at D = 2; the rescaled sparse
  // model converges to exactly twice this value (see the relation test).
  return 0.5 * gamma * std::imag(pow_int(z, D));
}

}  // namespace qaoa
