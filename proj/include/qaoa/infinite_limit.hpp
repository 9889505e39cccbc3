#pragma once

#include <complex>
#include <vector>

#include "qaoa/bitstrings.hpp"

namespace qaoa {

// Per-string weights produced by the level-descending recursion, indexed by
// the raw bitstring value. Fully palindromic strings always carry exactly 1.
struct RTable {
  int p = 0;
  std::vector<std::complex<double>> values;
};

struct DegreeClass {
  double expected_degree = 0.0;
  double probability = 0.0;
};

// Label mix for expected-degree random graphs. Probabilities must sum to 1.
using DegreeDistribution = std::vector<DegreeClass>;

void validate_distribution(const DegreeDistribution& dist);
double mean_degree(const DegreeDistribution& dist);

// Average-degree-d sparse-graph recursion.
RTable compute_r_er(const BitstringTable& table, const AngleVector& angles, double degree);

// All-pairs Gaussian-coupling recursion (quadratic phase weights).
RTable compute_r_sk(const BitstringTable& table, const AngleVector& angles);

// Labelled recursion: one table per degree class, coupled through the
// mean-degree-weighted mix of the tables one level up.
std::vector<RTable> compute_r_chung_lu(const BitstringTable& table,
                                       const AngleVector& angles,
                                       const DegreeDistribution& dist);

// Infinite-size energy per vertex. The underlying quadratic forms are complex;
// an imaginary residue above 1e-8 trips a consistency_error.
double er_energy_per_vertex(const BitstringTable& table, const AngleVector& angles,
                            double degree);
double sk_energy_per_vertex(const BitstringTable& table, const AngleVector& angles);
double chung_lu_energy_per_vertex(const BitstringTable& table, const AngleVector& angles,
                                  const DegreeDistribution& dist);

// Warm-start rescaling for average-degree-d graphs: betas pass through,
// gammas shrink by sqrt(d).
AngleVector transfer_sk_to_er(const AngleVector& sk_angles, double degree);

}  // namespace qaoa
