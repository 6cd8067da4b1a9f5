// Independent oracles for the test suites. Everything here is written from
// first principles (different formulas or brute force) so it never shares a
// code path with the library implementation it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lhl/core.hpp"

namespace oracles {

// Spherical law of cosines on the same reference sphere; numerically
// different route than the haversine.
inline double law_of_cosines_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kR = 6371.0088;
  constexpr double kDeg = 3.14159265358979323846 / 180.0;
  const double p1 = lat1 * kDeg;
  const double p2 = lat2 * kDeg;
  const double dl = (lon2 - lon1) * kDeg;
  double cosine = std::sin(p1) * std::sin(p2) + std::cos(p1) * std::cos(p2) * std::cos(dl);
  cosine = std::clamp(cosine, -1.0, 1.0);
  return kR * std::acos(cosine);
}

// Forward azimuth via 3-D unit vectors: the direction of the target's
// component in the local east/north frame.
inline double vector_bearing_deg(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kDeg = 3.14159265358979323846 / 180.0;
  const double p1 = lat1 * kDeg, l1 = lon1 * kDeg;
  const double p2 = lat2 * kDeg, l2 = lon2 * kDeg;
  const double ax = std::cos(p1) * std::cos(l1), ay = std::cos(p1) * std::sin(l1),
               az = std::sin(p1);
  const double bx = std::cos(p2) * std::cos(l2), by = std::cos(p2) * std::sin(l2),
               bz = std::sin(p2);
  // Local frame at a.
  const double ex = -std::sin(l1), ey = std::cos(l1), ez = 0;                      // east
  const double nx = -std::sin(p1) * std::cos(l1), ny = -std::sin(p1) * std::sin(l1),
               nz = std::cos(p1);                                                  // north
  const double dot = ax * bx + ay * by + az * bz;
  const double cx = bx - dot * ax, cy = by - dot * ay, cz = bz - dot * az;
  const double east = cx * ex + cy * ey + cz * ez;
  const double north = cx * nx + cy * ny + cz * nz;
  double deg = std::atan2(east, north) / kDeg;
  if (deg < 0) deg += 360.0;
  return std::fmod(deg, 360.0);
}

// Jensen-Shannon divergence straight from the KL definition in nats / ln 2.
inline double js_divergence(std::vector<double> p, std::vector<double> q) {
  double sp = 0, sq = 0;
  for (double v : p) sp += v;
  for (double v : q) sq += v;
  for (double& v : p) v /= sp;
  for (double& v : q) v /= sq;
  auto kl = [](const std::vector<double>& x, const std::vector<double>& m) {
    double d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] > 0) d += x[i] * std::log(x[i] / m[i]);
    }
    return d;
  };
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = (p[i] + q[i]) / 2;
  return (0.5 * kl(p, m) + 0.5 * kl(q, m)) / std::log(2.0);
}

// Weighted quantile by literal expansion of integer weights.
inline double weighted_quantile_by_expansion(
    const std::vector<std::pair<double, std::uint64_t>>& value_weight, double q) {
  std::vector<double> expanded;
  for (const auto& [value, weight] : value_weight) {
    for (std::uint64_t i = 0; i < weight; ++i) expanded.push_back(value);
  }
  std::sort(expanded.begin(), expanded.end());
  const auto idx = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(expanded.size())) - 1);
  return expanded[std::min(idx, expanded.size() - 1)];
}

// ---- graph oracles over plain adjacency sets ----

using Adjacency = std::map<std::string, std::set<std::string>>;

inline Adjacency adjacency_of(const lhl::LhNetGraph& g) {
  Adjacency adj;
  for (const auto& v : g.vertices) adj[v];
  for (const auto& [key, attr] : g.edges) {
    if (key.first == key.second) continue;
    adj[key.first].insert(key.second);
    adj[key.second].insert(key.first);
  }
  return adj;
}

// Components by repeated whole-set scans (no BFS bookkeeping shared with the
// implementation).
inline std::map<std::string, int> brute_components(const Adjacency& adj) {
  std::map<std::string, int> comp;
  int next = 0;
  for (const auto& [v, nbrs] : adj) {
    if (comp.count(v)) continue;
    comp[v] = next;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [u, un] : adj) {
        if (!comp.count(u) || comp[u] != next) continue;
        for (const auto& w : un) {
          if (!comp.count(w)) {
            comp[w] = next;
            changed = true;
          }
        }
      }
    }
    ++next;
  }
  return comp;
}

// k-core by definition: for each k, repeatedly delete nodes of degree < k;
// a node's shell is the largest k whose k-core contains it.
inline std::map<std::string, std::uint64_t> brute_kcore(const Adjacency& adj) {
  std::map<std::string, std::uint64_t> shell;
  for (const auto& [v, nbrs] : adj) shell[v] = 0;
  for (std::uint64_t k = 1;; ++k) {
    Adjacency sub = adj;
    bool removed = true;
    while (removed) {
      removed = false;
      for (auto it = sub.begin(); it != sub.end();) {
        if (it->second.size() < k) {
          for (const auto& u : it->second) sub[u].erase(it->first);
          it = sub.erase(it);
          removed = true;
        } else {
          ++it;
        }
      }
    }
    if (sub.empty()) break;
    for (const auto& [v, nbrs] : sub) shell[v] = k;
  }
  return shell;
}

// Random simple graph as an LhNetGraph at router granularity.
inline lhl::LhNetGraph random_graph(std::mt19937_64& rng, int max_nodes) {
  std::uniform_int_distribution<int> node_count(1, max_nodes);
  std::uniform_real_distribution<double> prob(0.0, 1.0);
  const int n = node_count(rng);
  const double p = prob(rng) * 0.25;
  lhl::LhNetGraph g;
  g.granularity = lhl::Granularity::router;
  for (int i = 0; i < n; ++i) g.vertices.insert("n" + std::to_string(i));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (prob(rng) < p) {
        lhl::EdgeAttr attr;
        attr.multiplicity = 1;
        attr.sum_min_diff_ms = 60;
        g.edges[{"n" + std::to_string(i), "n" + std::to_string(j)}] = attr;
      }
    }
  }
  return g;
}

}  // namespace oracles
