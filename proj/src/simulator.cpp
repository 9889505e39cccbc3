#include "qaoa/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qaoa/errors.hpp"
#include "qaoa/parallel.hpp"

namespace qaoa {
namespace {

using cplx = std::complex<double>;

constexpr int kMaxQubits = 26;
// Largest diagonal-phase lookup table we are willing to build. Beyond this the
// per-state polar call is cheaper than the memory traffic anyway.
constexpr std::int64_t kMaxPhaseTable = std::int64_t{1} << 22;

bool is_small_integer(double x) {
  return std::isfinite(x) && x == std::nearbyint(x) && std::abs(x) <= 1048576.0;
}

}  // namespace

void IsingHamiltonian::validate() const {
  if (n < 1) throw validation_error("hamiltonian: qubit count must be positive");
  if (n > kMaxQubits) {
    throw resource_error("hamiltonian: statevector limited to " +
                         std::to_string(kMaxQubits) + " qubits, got " + std::to_string(n));
  }
  std::vector<std::uint32_t> masks;
  masks.reserve(terms.size());
  for (const IsingTerm& t : terms) {
    if (t.sites.empty()) throw validation_error("hamiltonian: term with no sites");
    std::uint32_t mask = 0;
    int prev = -1;
    for (int q : t.sites) {
      if (q < 0 || q >= n) throw validation_error("hamiltonian: site index out of range");
      if (q <= prev) throw validation_error("hamiltonian: term sites must be sorted and distinct");
      prev = q;
      mask |= std::uint32_t{1} << q;
    }
    if (!std::isfinite(t.coupling)) throw validation_error("hamiltonian: non-finite coupling");
    masks.push_back(mask);
  }
  std::sort(masks.begin(), masks.end());
  if (std::adjacent_find(masks.begin(), masks.end()) != masks.end()) {
    throw validation_error("hamiltonian: duplicate term");
  }
}

double Statevector::norm() const {
  const double sq = blocked_sum<double>(
      static_cast<std::int64_t>(amplitudes.size()),
      [&](std::int64_t z) { return std::norm(amplitudes[static_cast<std::size_t>(z)]); });
  return std::sqrt(sq);
}

Simulator::Simulator(IsingHamiltonian h) : h_(std::move(h)) {
  h_.validate();
  const std::int64_t size = std::int64_t{1} << h_.n;

  std::vector<std::uint32_t> masks(h_.terms.size());
  std::vector<double> couplings(h_.terms.size());
  integral_couplings_ = true;
  for (std::size_t t = 0; t < h_.terms.size(); ++t) {
    std::uint32_t mask = 0;
    for (int q : h_.terms[t].sites) mask |= std::uint32_t{1} << q;
    masks[t] = mask;
    couplings[t] = h_.terms[t].coupling;
    if (!is_small_integer(couplings[t])) integral_couplings_ = false;
  }
  if (integral_couplings_) {
    coupling_magnitude_ = 0;
    for (double c : couplings) coupling_magnitude_ += std::llround(std::abs(c));
  }

  // Each Z-product on the qubits in `mask` evaluates to (-1)^{popcount(z & mask)}
  // when spin q is read off bit q of z.
  energy_.assign(static_cast<std::size_t>(size), 0.0);
  parallel_for(size, [&](std::int64_t z) {
    const std::uint32_t bits = static_cast<std::uint32_t>(z);
    double e = 0.0;
    for (std::size_t t = 0; t < masks.size(); ++t) {
      e += (std::popcount(bits & masks[t]) & 1) ? -couplings[t] : couplings[t];
    }
    energy_[static_cast<std::size_t>(z)] = e;
  });
}

Statevector Simulator::state(const AngleVector& angles) const {
  angles.validate();
  const std::int64_t size = std::int64_t{1} << h_.n;

  Statevector psi;
  psi.n = h_.n;
  psi.amplitudes.assign(static_cast<std::size_t>(size),
                        cplx{1.0 / std::sqrt(static_cast<double>(size)), 0.0});
  cplx* a = psi.amplitudes.data();

  const bool use_table =
      integral_couplings_ && 2 * coupling_magnitude_ + 1 <= kMaxPhaseTable;

  for (int layer = 0; layer < angles.p(); ++layer) {
    const double gamma = angles.gammas[static_cast<std::size_t>(layer)];
    const double beta = angles.betas[static_cast<std::size_t>(layer)];

    if (use_table) {
      // Integer-valued H(z) lets one small table serve the whole register.
      const std::int64_t offset = coupling_magnitude_;
      std::vector<cplx> phase(static_cast<std::size_t>(2 * offset + 1));
      for (std::int64_t k = 0; k < static_cast<std::int64_t>(phase.size()); ++k) {
        phase[static_cast<std::size_t>(k)] =
            std::polar(1.0, -0.5 * gamma * static_cast<double>(k - offset));
      }
      const cplx* tab = phase.data();
      parallel_for(size, [&](std::int64_t z) {
        const std::size_t i = static_cast<std::size_t>(z);
        a[i] *= tab[std::llround(energy_[i]) + offset];
      });
    } else {
      parallel_for(size, [&](std::int64_t z) {
        const std::size_t i = static_cast<std::size_t>(z);
        a[i] *= std::polar(1.0, -0.5 * gamma * energy_[i]);
      });
    }

    const double c = std::cos(0.5 * beta);
    const cplx ms{0.0, -std::sin(0.5 * beta)};
    for (int q = 0; q < h_.n; ++q) {
      const std::int64_t low_mask = (std::int64_t{1} << q) - 1;
      parallel_for(size >> 1, [&](std::int64_t z) {
        const std::int64_t i0 = ((z >> q) << (q + 1)) | (z & low_mask);
        const std::int64_t i1 = i0 | (std::int64_t{1} << q);
        const cplx a0 = a[i0];
        const cplx a1 = a[i1];
        a[i0] = c * a0 + ms * a1;
        a[i1] = ms * a0 + c * a1;
      });
    }

    for (std::int64_t z = 0; z < size; ++z) {
      const cplx v = a[z];
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw consistency_error("simulator: non-finite amplitude after layer " +
                                std::to_string(layer));
      }
    }
  }
  return psi;
}

double Simulator::expected_energy(const AngleVector& angles) const {
  const Statevector psi = state(angles);
  return blocked_sum<double>(
      static_cast<std::int64_t>(psi.amplitudes.size()), [&](std::int64_t z) {
        const std::size_t i = static_cast<std::size_t>(z);
        return std::norm(psi.amplitudes[i]) * energy_[i];
      });
}

CutStatistics Simulator::cut_statistics(const AngleVector& angles, int draws,
                                        Rng& rng) const {
  for (const IsingTerm& t : h_.terms) {
    if (t.sites.size() != 2 || t.coupling != 1.0) {
      throw validation_error("cut statistics: instance must be a unit-coupling graph");
    }
  }
  if (draws < 1) throw validation_error("cut statistics: need at least one draw");

  const Statevector psi = state(angles);
  const std::size_t size = psi.amplitudes.size();
  const std::int64_t edges = static_cast<std::int64_t>(h_.terms.size());

  CutStatistics out;
  out.expected_cut =
      0.5 * (static_cast<double>(edges) -
             blocked_sum<double>(static_cast<std::int64_t>(size), [&](std::int64_t z) {
               const std::size_t i = static_cast<std::size_t>(z);
               return std::norm(psi.amplitudes[i]) * energy_[i];
             }));

  std::vector<double> cdf(size);
  double acc = 0.0;
  for (std::size_t z = 0; z < size; ++z) {
    acc += std::norm(psi.amplitudes[z]);
    cdf[z] = acc;
  }

  int best = 0;
  for (int k = 0; k < draws; ++k) {
    const double u = rng.next_double() * acc;
    std::size_t z = static_cast<std::size_t>(
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (z >= size) z = size - 1;
    const int cut = static_cast<int>((edges - std::llround(energy_[z])) / 2);
    best = std::max(best, cut);
  }
  out.best_sampled_cut = best;
  return out;
}

Statevector qaoa_state(const IsingHamiltonian& h, const AngleVector& angles) {
  return Simulator(h).state(angles);
}

double expected_energy(const IsingHamiltonian& h, const AngleVector& angles) {
  return Simulator(h).expected_energy(angles);
}

CutStatistics cut_statistics(const IsingHamiltonian& h, const AngleVector& angles,
                             int draws, Rng& rng) {
  return Simulator(h).cut_statistics(angles, draws, rng);
}

}  // namespace qaoa
