#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qaoa/errors.hpp"

namespace qaoa {

// Configuration-path bitstring of length 2p+1. Bit j (LSB = j 0) holds s_j.
using Bitstring = std::uint32_t;

inline int bit_at(Bitstring s, int j) { return static_cast<int>((s >> j) & 1u); }

struct AngleVector {
  std::vector<double> betas;
  std::vector<double> gammas;

  int p() const { return static_cast<int>(betas.size()); }
  void validate() const;  // throws validation_error on shape or value problems
};

// Largest j <= p such that s_{p+k} == s_{p-k} for all k <= j, i.e. the radius
// of the palindromic window around the middle bit.
int level_of_symmetry(Bitstring s, int p);

// A string is odd when its first and middle bits differ.
inline bool is_odd_string(Bitstring s, int p) {
  return bit_at(s, 0) != bit_at(s, p);
}

// Complements the central window of 2L(s)+1 bits. An involution that maps odd
// strings to even ones at the same level of symmetry.
Bitstring partial_flip(Bitstring s, int p);

// Mixer weight of a path: one cos(beta_j/2) or i*sin(beta_j/2) factor per
// transition on each side of the string.
std::complex<double> b_coefficient(const std::vector<double>& betas, Bitstring s);

// Phase-layer weight of a path. Reduces to sum_j gamma_j * (s_j - s_{2p-j}).
double phi(const std::vector<double>& gammas, Bitstring s);

// Precomputed combinatorial data for all 2^{2p+1} path strings, plus the
// canonical enumeration order: levels ascending; within a level below p each
// odd string (ascending) immediately followed by its partial flip; the fully
// palindromic strings last, ascending.
class BitstringTable {
 public:
  explicit BitstringTable(int p);

  int p() const { return p_; }
  int num_bits() const { return 2 * p_ + 1; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(1) << num_bits(); }

  const std::vector<Bitstring>& order() const { return order_; }
  std::uint32_t order_index(Bitstring s) const { return order_index_[s]; }

  int level(Bitstring s) const { return level_[s]; }
  bool odd(Bitstring s) const { return odd_[s] != 0; }
  Bitstring flip(Bitstring s) const { return flip_[s]; }
  // (-1)^{s odd}
  double parity_sign(Bitstring s) const { return odd_[s] ? -1.0 : 1.0; }
  // (-1)^{s odd} * (-1)^{s_p}, the sign attached to B_s in energy sums
  double energy_sign(Bitstring s) const { return sigma_[s]; }

  const std::vector<Bitstring>& strings_at_level(int l) const { return by_level_[l]; }
  // Fully palindromic strings (level p), ascending.
  const std::vector<Bitstring>& top_level() const { return by_level_[p_]; }
  // Odd strings with level < p, in enumeration order.
  const std::vector<Bitstring>& odd_below_top() const { return odd_below_top_; }

  // Per-angle tables indexed by the raw bitstring value.
  std::vector<std::complex<double>> b_table(const std::vector<double>& betas) const;
  std::vector<double> phi_table(const std::vector<double>& gammas) const;
  // cis_phi_table[w] = exp(i * phi(gammas, w))
  std::vector<std::complex<double>> cis_phi_table(const std::vector<double>& gammas) const;

 private:
  int p_;
  std::vector<std::uint8_t> level_;
  std::vector<std::uint8_t> odd_;
  std::vector<Bitstring> flip_;
  std::vector<double> sigma_;
  std::vector<Bitstring> order_;
  std::vector<std::uint32_t> order_index_;
  std::vector<std::vector<Bitstring>> by_level_;
  std::vector<Bitstring> odd_below_top_;
};

}  // namespace qaoa
