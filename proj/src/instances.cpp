#include "qaoa/instances.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qaoa/errors.hpp"
#include "qaoa/rng.hpp"

namespace qaoa {
namespace {

// Stream tags so the three samplers decorrelate even under a shared seed.
constexpr std::uint64_t kErStream = 0x6572;
constexpr std::uint64_t kClStream = 0x636c;
constexpr std::uint64_t kSkStream = 0x736b;

// Visits the positions of a run of independent Bernoulli(prob) trials that
// come up true, skipping the false ones in geometrically distributed jumps.
// Expected cost is O(1 + prob * len) rng draws instead of len.
template <typename Hit>
void bernoulli_positions(Rng& rng, double prob, std::int64_t len, Hit&& hit) {
  if (prob <= 0.0 || len <= 0) return;
  if (prob >= 1.0) {
    for (std::int64_t i = 0; i < len; ++i) hit(i);
    return;
  }
  const double log_miss = std::log1p(-prob);
  std::int64_t pos = 0;
  while (pos < len) {
    const double jump = std::floor(std::log1p(-rng.next_double()) / log_miss);
    if (jump >= static_cast<double>(len - pos)) break;
    pos += static_cast<std::int64_t>(jump);
    hit(pos);
    ++pos;
  }
}

void check_vertex_count(int n) {
  if (n < 2) throw validation_error("instance sampler: need at least two vertices");
}

}  // namespace

void GraphInstance::validate() const {
  if (n < 1) throw validation_error("graph: vertex count must be positive");
  std::pair<int, int> prev{-1, -1};
  for (const auto& [a, b] : edges) {
    if (a < 0 || b >= n || a >= b) throw validation_error("graph: malformed edge");
    std::pair<int, int> cur{a, b};
    if (!(prev < cur)) throw validation_error("graph: edges must be sorted and distinct");
    prev = cur;
  }
  if (!labels.empty()) {
    if (static_cast<int>(labels.size()) != n) {
      throw validation_error("graph: labels must cover every vertex");
    }
    for (int l : labels) {
      if (l < 0) throw validation_error("graph: negative label");
    }
  }
}

GraphInstance sample_er(int n, double degree, std::uint64_t seed) {
  check_vertex_count(n);
  if (!std::isfinite(degree) || degree < 0.0 || degree > static_cast<double>(n - 1)) {
    throw validation_error("uniform graph sampler: expected degree must lie in [0, n-1]");
  }
  const double prob = degree / static_cast<double>(n - 1);

  GraphInstance g;
  g.n = n;
  Rng rng(seed, kErStream);

  // Pairs (i, j), i < j, in lexicographic order; hits arrive with increasing
  // position so the row walk is amortized O(n).
  const std::int64_t total = static_cast<std::int64_t>(n) * (n - 1) / 2;
  std::int64_t row_start = 0;
  int row = 0;
  bernoulli_positions(rng, prob, total, [&](std::int64_t pos) {
    while (pos >= row_start + (n - 1 - row)) {
      row_start += n - 1 - row;
      ++row;
    }
    g.edges.emplace_back(row, row + 1 + static_cast<int>(pos - row_start));
  });
  return g;
}

GraphInstance sample_chung_lu(int n, const DegreeDistribution& dist, std::uint64_t seed) {
  check_vertex_count(n);
  validate_distribution(dist);
  const double dbar = mean_degree(dist);
  double max_degree = 0.0;
  for (const DegreeClass& c : dist) max_degree = std::max(max_degree, c.expected_degree);
  // Sharp well-definedness condition: the largest pairwise edge probability,
  // (max d)^2 / ((n-1) mean d), must not exceed one.
  if (max_degree * max_degree > (static_cast<double>(n - 1)) * dbar) {
    throw validation_error(
        "degree-mix sampler: vertex count too small for this degree distribution");
  }

  GraphInstance g;
  g.n = n;
  Rng rng(seed, kClStream);

  g.labels.resize(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> members(dist.size());
  for (int v = 0; v < n; ++v) {
    const double u = rng.next_double();
    double acc = 0.0;
    std::size_t label = dist.size() - 1;
    for (std::size_t l = 0; l < dist.size(); ++l) {
      acc += dist[l].probability;
      if (u < acc) {
        label = l;
        break;
      }
    }
    g.labels[static_cast<std::size_t>(v)] = static_cast<int>(label);
    members[label].push_back(v);
  }

  // Every unordered pair of vertices falls in exactly one label block, and
  // within a block the edge probability is constant.
  for (std::size_t l = 0; l < dist.size(); ++l) {
    for (std::size_t m = l; m < dist.size(); ++m) {
      const double prob =
          dist[l].expected_degree * dist[m].expected_degree / ((n - 1) * dbar);
      const std::vector<int>& left = members[l];
      const std::vector<int>& right = members[m];
      if (l == m) {
        const std::int64_t count = static_cast<std::int64_t>(left.size());
        std::int64_t row_start = 0;
        std::int64_t row = 0;
        bernoulli_positions(rng, prob, count * (count - 1) / 2, [&](std::int64_t pos) {
          while (pos >= row_start + (count - 1 - row)) {
            row_start += count - 1 - row;
            ++row;
          }
          g.edges.emplace_back(left[static_cast<std::size_t>(row)],
                               left[static_cast<std::size_t>(row + 1 + pos - row_start)]);
        });
      } else {
        const std::int64_t stride = static_cast<std::int64_t>(right.size());
        bernoulli_positions(
            rng, prob, static_cast<std::int64_t>(left.size()) * stride,
            [&](std::int64_t pos) {
              const int a = left[static_cast<std::size_t>(pos / stride)];
              const int b = right[static_cast<std::size_t>(pos % stride)];
              g.edges.emplace_back(std::min(a, b), std::max(a, b));
            });
      }
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

SKInstance sample_sk(int n, std::uint64_t seed) {
  check_vertex_count(n);
  SKInstance inst;
  inst.n = n;
  inst.couplings.assign(static_cast<std::size_t>(n) * n, 0.0);
  Rng rng(seed, kSkStream);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = rng.next_normal() * scale;
      inst.couplings[static_cast<std::size_t>(i) * n + j] = v;
      inst.couplings[static_cast<std::size_t>(j) * n + i] = v;
    }
  }
  return inst;
}

std::string graph_to_json(const GraphInstance& g) {
  g.validate();
  nlohmann::json j;
  j["n"] = g.n;
  j["edges"] = nlohmann::json::array();
  for (const auto& [a, b] : g.edges) j["edges"].push_back({a, b});
  if (!g.labels.empty()) j["labels"] = g.labels;
  return j.dump();
}

GraphInstance graph_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("graph json: ") + e.what());
  }

  GraphInstance g;
  try {
    g.n = j.at("n").get<int>();
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) {
        throw validation_error("graph json: each edge must be a pair");
      }
      const int a = e[0].get<int>();
      const int b = e[1].get<int>();
      g.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    if (j.contains("labels")) g.labels = j.at("labels").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("graph json: ") + e.what());
  }

  std::sort(g.edges.begin(), g.edges.end());
  g.validate();
  return g;
}

}  // namespace qaoa
