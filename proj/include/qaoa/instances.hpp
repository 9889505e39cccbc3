#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qaoa/infinite_limit.hpp"

namespace qaoa {

// Unweighted graph, optionally with per-vertex label indices into the degree
// distribution that produced it. Edges are stored as (i, j) with i < j, sorted
// lexicographically and free of duplicates.
struct GraphInstance {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> labels;  // empty, or one entry per vertex

  void validate() const;
};

// Dense symmetric coupling matrix with zero diagonal, entries N(0,1)/sqrt(n).
struct SKInstance {
  int n = 0;
  std::vector<double> couplings;  // row-major n*n

  double at(int i, int j) const { return couplings[static_cast<std::size_t>(i) * n + j]; }
};

// Each of the C(n,2) edges appears independently with probability
// degree/(n-1).
GraphInstance sample_er(int n, double degree, std::uint64_t seed);

// Labels drawn i.i.d. from the distribution, then an edge between vertices
// labelled l, l' with probability d_l d_{l'} / ((n-1) * mean degree). Requires
// n large enough that no pair probability exceeds one.
GraphInstance sample_chung_lu(int n, const DegreeDistribution& dist, std::uint64_t seed);

SKInstance sample_sk(int n, std::uint64_t seed);

// Edge-list serialization: {"n": ..., "edges": [[i,j],...], "labels": [...]}.
// Reading accepts edges in any order and normalizes them.
std::string graph_to_json(const GraphInstance& g);
GraphInstance graph_from_json(const std::string& text);

}  // namespace qaoa
