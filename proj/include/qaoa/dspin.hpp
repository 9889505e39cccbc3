#pragma once

namespace qaoa {

struct DSpinConfig {
  int D = 2;      // interaction arity (bodies per term)
  double d = 1.0; // expected interactions per spin, sparse model only
};

// Infinite-size level-1 energy per spin of the sparse D-body model. Exact
// composition sum, cost O((D+7 choose 7)); arity is capped at 40 to keep the
// multinomials exact in doubles.
double diluted_p1_energy(double beta, double gamma, const DSpinConfig& cfg);

// Infinite-size level-1 energy per spin of the Gaussian all-tuples D-body
// model, normalized so D = 2 reproduces the all-pairs 2-body limit exactly.
double dense_p1_energy(double beta, double gamma, int D);

}  // namespace qaoa
