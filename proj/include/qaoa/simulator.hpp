#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qaoa/bitstrings.hpp"
#include "qaoa/rng.hpp"

namespace qaoa {

// One diagonal term: a product of Pauli Z on the listed qubits times a real
// coupling. Sites are sorted and distinct.
struct IsingTerm {
  std::vector<int> sites;
  double coupling = 1.0;
};

// Diagonal cost Hamiltonian on n qubits. Terms may mix arities (fields,
// pairs, higher-order products) but the site subsets must be distinct.
struct IsingHamiltonian {
  int n = 0;
  std::vector<IsingTerm> terms;

  void validate() const;  // throws validation_error / resource_error
};

struct Statevector {
  int n = 0;
  std::vector<std::complex<double>> amplitudes;  // indexed by basis state, bit q = qubit q

  double norm() const;
};

struct CutStatistics {
  double expected_cut = 0.0;
  int best_sampled_cut = 0;
};

// Exact alternating-layer circuit on a precomputed instance. Construction
// validates the Hamiltonian and tabulates H(z) once; the per-call work is then
// O(p * n * 2^n) regardless of the number of terms. Limited to n <= 26.
class Simulator {
 public:
  explicit Simulator(IsingHamiltonian h);

  const IsingHamiltonian& hamiltonian() const { return h_; }
  // H(z) for every basis state z.
  const std::vector<double>& energy_table() const { return energy_; }

  // Layer j applies exp(-i gamma_j/2 H) then exp(-i beta_j/2 X) on every
  // qubit, starting from the uniform superposition; gamma_0 acts first.
  Statevector state(const AngleVector& angles) const;

  // <H> in the circuit state.
  double expected_energy(const AngleVector& angles) const;

  // Satisfied-edge statistics for unit-coupling two-body instances:
  // expected_cut = (|E| - <H>) / 2, best_sampled_cut the maximum cut value
  // among `draws` basis-state measurements.
  CutStatistics cut_statistics(const AngleVector& angles, int draws, Rng& rng) const;

 private:
  IsingHamiltonian h_;
  std::vector<double> energy_;
  bool integral_couplings_ = false;
  std::int64_t coupling_magnitude_ = 0;  // sum of |coupling|, integral case only
};

// One-shot conveniences for callers that do not reuse the instance.
Statevector qaoa_state(const IsingHamiltonian& h, const AngleVector& angles);
double expected_energy(const IsingHamiltonian& h, const AngleVector& angles);
CutStatistics cut_statistics(const IsingHamiltonian& h, const AngleVector& angles,
                             int draws, Rng& rng);

}  // namespace qaoa
