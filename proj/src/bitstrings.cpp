#include "qaoa/bitstrings.hpp"

#include <cmath>

namespace qaoa {

void AngleVector::validate() const {
  if (betas.empty()) throw validation_error("angle vector: p must be at least 1");
  if (betas.size() != gammas.size()) {
    throw validation_error("angle vector: betas and gammas must have equal length");
  }
  for (double b : betas) {
    if (!std::isfinite(b)) throw validation_error("angle vector: non-finite beta");
  }
  for (double g : gammas) {
    if (!std::isfinite(g)) throw validation_error("angle vector: non-finite gamma");
  }
}

int level_of_symmetry(Bitstring s, int p) {
  int l = 0;
  while (l < p && bit_at(s, p + l + 1) == bit_at(s, p - l - 1)) ++l;
  return l;
}

Bitstring partial_flip(Bitstring s, int p) {
  const int l = level_of_symmetry(s, p);
  const Bitstring window = ((static_cast<Bitstring>(1) << (2 * l + 1)) - 1) << (p - l);
  return s ^ window;
}

std::complex<double> b_coefficient(const std::vector<double>& betas, Bitstring s) {
  const int p = static_cast<int>(betas.size());
  std::complex<double> prod{1.0, 0.0};
  for (int j = 0; j < p; ++j) {
    const double c = std::cos(betas[j] / 2.0);
    const double sn = std::sin(betas[j] / 2.0);
    prod *= bit_at(s, j) == bit_at(s, j + 1) ? std::complex<double>{c, 0.0}
                                             : std::complex<double>{0.0, sn};
    prod *= bit_at(s, 2 * p - j) == bit_at(s, 2 * p - j - 1)
                ? std::complex<double>{c, 0.0}
                : std::complex<double>{0.0, sn};
  }
  return prod;
}

double phi(const std::vector<double>& gammas, Bitstring s) {
  const int p = static_cast<int>(gammas.size());
  double total = 0.0;
  for (int j = 0; j < p; ++j) {
    total += gammas[j] * static_cast<double>(bit_at(s, j) - bit_at(s, 2 * p - j));
  }
  return total;
}

BitstringTable::BitstringTable(int p) : p_(p) {
  if (p < 1) throw validation_error("bitstring table: p must be at least 1");
  if (p > 10) throw resource_error("bitstring table: p > 10 would need > 2M strings");

  const std::uint32_t n = size();
  level_.resize(n);
  odd_.resize(n);
  flip_.resize(n);
  sigma_.resize(n);
  order_index_.resize(n);
  by_level_.assign(p + 1, {});
  order_.reserve(n);

  for (Bitstring s = 0; s < n; ++s) {
    const int l = level_of_symmetry(s, p);
    level_[s] = static_cast<std::uint8_t>(l);
    odd_[s] = is_odd_string(s, p) ? 1 : 0;
    flip_[s] = partial_flip(s, p);
    sigma_[s] = (odd_[s] ? -1.0 : 1.0) * (bit_at(s, p) ? -1.0 : 1.0);
  }

  for (int l = 0; l < p; ++l) {
    for (Bitstring s = 0; s < n; ++s) {
      if (level_[s] == l && odd_[s]) {
        order_.push_back(s);
        order_.push_back(flip_[s]);
        by_level_[l].push_back(s);
        by_level_[l].push_back(flip_[s]);
        odd_below_top_.push_back(s);
      }
    }
  }
  for (Bitstring s = 0; s < n; ++s) {
    if (level_[s] == p) {
      order_.push_back(s);
      by_level_[p].push_back(s);
    }
  }

  for (std::uint32_t i = 0; i < n; ++i) order_index_[order_[i]] = i;
}

std::vector<std::complex<double>> BitstringTable::b_table(
    const std::vector<double>& betas) const {
  if (static_cast<int>(betas.size()) != p_) {
    throw validation_error("b_table: betas length must equal p");
  }
  std::vector<std::complex<double>> out(size());
  for (Bitstring s = 0; s < size(); ++s) out[s] = b_coefficient(betas, s);
  return out;
}

std::vector<double> BitstringTable::phi_table(const std::vector<double>& gammas) const {
  if (static_cast<int>(gammas.size()) != p_) {
    throw validation_error("phi_table: gammas length must equal p");
  }
  std::vector<double> out(size());
  for (Bitstring w = 0; w < size(); ++w) out[w] = phi(gammas, w);
  return out;
}

std::vector<std::complex<double>> BitstringTable::cis_phi_table(
    const std::vector<double>& gammas) const {
  std::vector<double> ph = phi_table(gammas);
  std::vector<std::complex<double>> out(size());
  for (Bitstring w = 0; w < size(); ++w) out[w] = {std::cos(ph[w]), std::sin(ph[w])};
  return out;
}

}  // namespace qaoa
