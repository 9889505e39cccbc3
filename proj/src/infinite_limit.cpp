#include "qaoa/infinite_limit.hpp"

#include <cmath>
#include <cstdint>

#include "qaoa/guards.hpp"
#include "qaoa/parallel.hpp"

namespace qaoa {

namespace {

void check_inputs(const BitstringTable& table, const AngleVector& angles) {
  angles.validate();
  if (angles.p() != table.p()) {
    throw validation_error("angle vector level does not match the bitstring table");
  }
}

void check_degree(double degree) {
  if (!std::isfinite(degree) || degree < 0.0) {
    throw validation_error("average degree must be finite and nonnegative");
  }
}

// sum_{s,t} w_s w_t cis[s ^ t] over all ordered pairs, in a fixed blocked
// order so results do not depend on the thread count.
std::complex<double> pair_quadratic_form(const std::vector<std::complex<double>>& w,
                                         const std::vector<std::complex<double>>& cis) {
  const std::int64_t n = static_cast<std::int64_t>(w.size());
  return blocked_sum<std::complex<double>>(n * n, [&](std::int64_t k) {
    const auto s = static_cast<std::uint32_t>(k / n);
    const auto t = static_cast<std::uint32_t>(k % n);
    return w[s] * w[t] * cis[s ^ t];
  });
}

// Same quadratic form with an extra antisymmetric phi(s ^ t) factor.
std::complex<double> pair_phase_form(const std::vector<std::complex<double>>& w,
                                     const std::vector<double>& phi_tbl) {
  const std::int64_t n = static_cast<std::int64_t>(w.size());
  return blocked_sum<std::complex<double>>(n * n, [&](std::int64_t k) {
    const auto s = static_cast<std::uint32_t>(k / n);
    const auto t = static_cast<std::uint32_t>(k % n);
    return phi_tbl[s ^ t] * w[s] * w[t];
  });
}

}  // namespace

void validate_distribution(const DegreeDistribution& dist) {
  if (dist.empty()) throw validation_error("degree distribution: no classes");
  double total = 0.0;
  for (const auto& c : dist) {
    if (!std::isfinite(c.expected_degree) || c.expected_degree <= 0.0) {
      throw validation_error("degree distribution: expected degrees must be positive");
    }
    if (!std::isfinite(c.probability) || c.probability < 0.0 || c.probability > 1.0) {
      throw validation_error("degree distribution: probabilities must lie in [0, 1]");
    }
    total += c.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw validation_error("degree distribution: probabilities must sum to 1");
  }
}

double mean_degree(const DegreeDistribution& dist) {
  double mean = 0.0;
  for (const auto& c : dist) mean += c.probability * c.expected_degree;
  return mean;
}

RTable compute_r_er(const BitstringTable& table, const AngleVector& angles,
                    double degree) {
  check_inputs(table, angles);
  check_degree(degree);
  const int p = table.p();
  const auto B = table.b_table(angles.betas);
  const auto cis = table.cis_phi_table(angles.gammas);

  RTable r{p, std::vector<std::complex<double>>(table.size(), {1.0, 0.0})};
  // The recursion reproduces exactly 1 on the top level (phases vanish and the
  // signed mixer weights sum to 2), so only lower levels are computed.
  for (int l = p - 1; l >= 0; --l) {
    for (Bitstring s : table.strings_at_level(l)) {
      std::complex<double> base{};
      for (Bitstring t : table.top_level()) {
        base += table.parity_sign(t) * B[t] * cis[s ^ t];
      }
      std::complex<double> z = -degree * (1.0 - 0.5 * base);
      for (int m = l + 1; m < p; ++m) {
        std::complex<double> level_sum{};
        for (Bitstring t : table.strings_at_level(m)) {
          level_sum += table.parity_sign(t) * B[t] * r.values[t] * cis[s ^ t];
        }
        z += 0.5 * degree * level_sum;
      }
      r.values[s] = std::exp(z);
    }
  }
  return r;
}

RTable compute_r_sk(const BitstringTable& table, const AngleVector& angles) {
  check_inputs(table, angles);
  const int p = table.p();
  const auto B = table.b_table(angles.betas);
  const auto ph = table.phi_table(angles.gammas);

  RTable r{p, std::vector<std::complex<double>>(table.size(), {1.0, 0.0})};
  for (int l = p - 1; l >= 0; --l) {
    for (Bitstring s : table.strings_at_level(l)) {
      std::complex<double> z{};
      for (Bitstring t : table.top_level()) {
        const double f = ph[s ^ t];
        z += table.parity_sign(t) * B[t] * (f * f);
      }
      for (int m = l + 1; m < p; ++m) {
        for (Bitstring t : table.strings_at_level(m)) {
          const double f = ph[s ^ t];
          z += table.parity_sign(t) * B[t] * (f * f) * r.values[t];
        }
      }
      r.values[s] = std::exp(-0.25 * z);
    }
  }
  return r;
}

std::vector<RTable> compute_r_chung_lu(const BitstringTable& table,
                                       const AngleVector& angles,
                                       const DegreeDistribution& dist) {
  check_inputs(table, angles);
  validate_distribution(dist);
  const int p = table.p();
  const double dbar = mean_degree(dist);
  const std::size_t nl = dist.size();
  const auto B = table.b_table(angles.betas);
  const auto cis = table.cis_phi_table(angles.gammas);

  std::vector<RTable> r(nl, RTable{p, std::vector<std::complex<double>>(
                                          table.size(), {1.0, 0.0})});
  // Mean-degree-weighted mix of the per-class tables, refreshed per level.
  std::vector<std::complex<double>> mix(table.size(), {0.0, 0.0});
  for (Bitstring s = 0; s < table.size(); ++s) {
    std::complex<double> acc{};
    for (std::size_t l = 0; l < nl; ++l) {
      acc += dist[l].probability * dist[l].expected_degree * r[l].values[s];
    }
    mix[s] = acc / dbar;
  }

  for (int lev = p - 1; lev >= 0; --lev) {
    for (Bitstring s : table.strings_at_level(lev)) {
      std::complex<double> base{};
      for (Bitstring t : table.top_level()) {
        base += table.parity_sign(t) * B[t] * cis[s ^ t];
      }
      std::complex<double> cross{};
      for (int m = lev + 1; m < p; ++m) {
        for (Bitstring t : table.strings_at_level(m)) {
          cross += table.parity_sign(t) * B[t] * mix[t] * cis[s ^ t];
        }
      }
      // z scales linearly with the class degree; everything else is shared.
      const std::complex<double> unit = -(1.0 - 0.5 * base) + 0.5 * cross;
      for (std::size_t l = 0; l < nl; ++l) {
        r[l].values[s] = std::exp(dist[l].expected_degree * unit);
      }
    }
    for (Bitstring s : table.strings_at_level(lev)) {
      std::complex<double> acc{};
      for (std::size_t l = 0; l < nl; ++l) {
        acc += dist[l].probability * dist[l].expected_degree * r[l].values[s];
      }
      mix[s] = acc / dbar;
    }
  }
  return r;
}

double er_energy_per_vertex(const BitstringTable& table, const AngleVector& angles,
                            double degree) {
  const RTable r = compute_r_er(table, angles, degree);
  const auto B = table.b_table(angles.betas);
  const auto cis = table.cis_phi_table(angles.gammas);

  std::vector<std::complex<double>> w(table.size());
  for (Bitstring s = 0; s < table.size(); ++s) {
    w[s] = table.energy_sign(s) * B[s] * r.values[s];
  }
  const std::complex<double> e = 0.125 * degree * pair_quadratic_form(w, cis);
  return real_with_guard(e, "er_energy_per_vertex");
}

double sk_energy_per_vertex(const BitstringTable& table, const AngleVector& angles) {
  const RTable r = compute_r_sk(table, angles);
  const auto B = table.b_table(angles.betas);
  const auto ph = table.phi_table(angles.gammas);

  std::vector<std::complex<double>> w(table.size());
  for (Bitstring s = 0; s < table.size(); ++s) {
    w[s] = table.energy_sign(s) * B[s] * r.values[s];
  }
  // The i/8 prefactor makes the four p=1 facts line up at once: the closed
  // form (gamma/2)sin(2 beta)exp(-gamma^2/2), its optimum -1/(2 sqrt(e)), the
  // finite-size configuration sum, and the rescaled Erdos-Renyi limit.
  const std::complex<double> e =
      std::complex<double>{0.0, 0.125} * pair_phase_form(w, ph);
  return real_with_guard(e, "sk_energy_per_vertex");
}

double chung_lu_energy_per_vertex(const BitstringTable& table, const AngleVector& angles,
                                  const DegreeDistribution& dist) {
  const std::vector<RTable> r = compute_r_chung_lu(table, angles, dist);
  const double dbar = mean_degree(dist);
  const double root_dbar = std::sqrt(dbar);
  const auto B = table.b_table(angles.betas);
  const auto cis = table.cis_phi_table(angles.gammas);

  std::vector<std::complex<double>> w(table.size());
  for (Bitstring s = 0; s < table.size(); ++s) {
    std::complex<double> y{};
    for (std::size_t l = 0; l < dist.size(); ++l) {
      y += dist[l].probability * dist[l].expected_degree * r[l].values[s];
    }
    w[s] = table.energy_sign(s) * B[s] * (y / root_dbar);
  }
  const std::complex<double> e = 0.125 * pair_quadratic_form(w, cis);
  return real_with_guard(e, "chung_lu_energy_per_vertex");
}

AngleVector transfer_sk_to_er(const AngleVector& sk_angles, double degree) {
  sk_angles.validate();
  if (!std::isfinite(degree) || degree <= 0.0) {
    throw validation_error("transfer_sk_to_er: degree must be positive");
  }
  AngleVector out = sk_angles;
  const double scale = 1.0 / std::sqrt(degree);
  for (double& g : out.gammas) g *= scale;
  return out;
}

}  // namespace qaoa
