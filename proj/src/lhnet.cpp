#include "lhl/lhnet.hpp"

#include <algorithm>
#include <stdexcept>

namespace lhl {
namespace lhnet {

namespace {

// Node keys for one link end at the requested granularity; empty optional
// means the link cannot be keyed (unmapped AS).
std::optional<std::pair<std::string, std::string>> node_keys(const LongHaulLink& link,
                                                             Granularity granularity) {
  switch (granularity) {
    case Granularity::router:
      return std::make_pair(link.pair.near_router, link.pair.far_router);
    case Granularity::as:
      if (!link.near_asn || !link.far_asn) return std::nullopt;
      return std::make_pair(std::to_string(*link.near_asn), std::to_string(*link.far_asn));
    case Granularity::country:
      return std::make_pair(link.near_geo.country, link.far_geo.country);
  }
  return std::nullopt;
}

}  // namespace

LhNetGraph build_graph(std::span<const LongHaulLink> links, Granularity granularity,
                       Counters* counters) {
  LhNetGraph g;
  g.granularity = granularity;
  for (const LongHaulLink& link : links) {
    auto keys = node_keys(link, granularity);
    if (!keys) {
      if (counters) bump(*counters, "graph.unmapped_end_skipped");
      continue;
    }
    auto [a, b] = *keys;
    g.vertices.insert(a);
    g.vertices.insert(b);
    auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
    EdgeAttr& attr = g.edges[key];
    attr.multiplicity += 1;
    attr.sum_min_diff_ms += link.pair.min_diff_ms;
    attr.countries.insert(link.near_geo.country);
    attr.countries.insert(link.far_geo.country);
  }
  return g;
}

std::map<std::uint64_t, std::uint64_t> degree_distribution(const LhNetGraph& g) {
  std::map<std::uint64_t, std::uint64_t> dist;
  for (const auto& [node, degree] : g.degrees()) ++dist[degree];
  return dist;
}

std::vector<std::pair<std::uint64_t, double>> ccdf(const LhNetGraph& g) {
  std::vector<std::pair<std::uint64_t, double>> out;
  const auto dist = degree_distribution(g);
  std::uint64_t total = 0;
  for (const auto& [degree, count] : dist) total += count;
  if (total == 0) return out;
  std::uint64_t at_least = total;
  for (const auto& [degree, count] : dist) {
    out.emplace_back(degree, static_cast<double>(at_least) / static_cast<double>(total));
    at_least -= count;
  }
  return out;
}

std::vector<SuperRouterRow> super_routers(const LhNetGraph& router_graph,
                                          std::span<const LongHaulLink> links,
                                          std::size_t min_countries) {
  if (router_graph.granularity != Granularity::router) {
    throw std::invalid_argument("super_routers needs a router-granularity graph");
  }
  struct Info {
    std::set<std::string> far_countries;
    std::optional<std::uint32_t> asn;
    GeoTag location;
    bool seen = false;
  };
  std::map<std::string, Info> info;
  for (const LongHaulLink& link : links) {
    auto& near = info[link.pair.near_router];
    near.far_countries.insert(link.far_geo.country);
    if (!near.seen) {
      near.asn = link.near_asn;
      near.location = link.near_geo;
      near.seen = true;
    }
    auto& far = info[link.pair.far_router];
    far.far_countries.insert(link.near_geo.country);
    if (!far.seen) {
      far.asn = link.far_asn;
      far.location = link.far_geo;
      far.seen = true;
    }
  }

  const auto degrees = router_graph.degrees();
  std::vector<SuperRouterRow> rows;
  for (const auto& [router, data] : info) {
    if (data.far_countries.size() < min_countries) continue;
    SuperRouterRow row;
    row.router = router;
    auto it = degrees.find(router);
    row.degree = it == degrees.end() ? 0 : it->second;
    row.countries = data.far_countries;
    row.asn = data.asn;
    row.location = data.location;
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const SuperRouterRow& x, const SuperRouterRow& y) {
    if (x.countries.size() != y.countries.size()) return x.countries.size() > y.countries.size();
    if (x.degree != y.degree) return x.degree > y.degree;
    return x.router < y.router;
  });
  return rows;
}

namespace {

std::map<std::string, std::set<std::string>> simple_adjacency(const LhNetGraph& g) {
  std::map<std::string, std::set<std::string>> adj;
  for (const auto& v : g.vertices) adj[v];
  for (const auto& [key, attr] : g.edges) {
    if (key.first == key.second) continue;
    adj[key.first].insert(key.second);
    adj[key.second].insert(key.first);
  }
  return adj;
}

}  // namespace

CoreDecomposition k_core(const LhNetGraph& g) {
  CoreDecomposition result;
  auto adj = simple_adjacency(g);
  std::map<std::string, std::uint64_t> degree;
  for (const auto& [v, nbrs] : adj) degree[v] = nbrs.size();

  // Peel nodes in non-decreasing degree order; a node's shell is the degree
  // pressure at the moment it is removed.
  std::map<std::uint64_t, std::set<std::string>> buckets;
  for (const auto& [v, d] : degree) buckets[d].insert(v);
  std::uint64_t current = 0;
  while (!buckets.empty()) {
    auto it = buckets.begin();
    if (it->second.empty()) {
      buckets.erase(it);
      continue;
    }
    const std::uint64_t d = it->first;
    current = std::max(current, d);
    const std::string v = *it->second.begin();
    it->second.erase(it->second.begin());
    if (it->second.empty()) buckets.erase(it);
    result.shell[v] = current;
    for (const auto& u : adj[v]) {
      if (result.shell.count(u)) continue;
      auto& bucket = buckets[degree[u]];
      bucket.erase(u);
      if (bucket.empty()) buckets.erase(degree[u]);
      degree[u] -= 1;
      buckets[degree[u]].insert(u);
    }
  }

  for (const auto& [v, shell] : result.shell) result.max_shell = std::max(result.max_shell, shell);
  for (const auto& [v, shell] : result.shell) {
    if (shell == result.max_shell) result.top_core.insert(v);
  }
  return result;
}

Components connected_components(const LhNetGraph& g) {
  Components out;
  const auto adj = simple_adjacency(g);
  std::uint64_t next_component = 0;
  for (const auto& [start, nbrs] : adj) {
    if (out.membership.count(start)) continue;
    const std::uint64_t id = next_component++;
    std::vector<std::string> frontier{start};
    out.membership[start] = id;
    while (!frontier.empty()) {
      const std::string v = std::move(frontier.back());
      frontier.pop_back();
      for (const auto& u : adj.at(v)) {
        if (!out.membership.count(u)) {
          out.membership[u] = id;
          frontier.push_back(u);
        }
      }
    }
  }

  out.report.component_count = next_component;
  out.report.vertices = g.vertices.size();
  out.report.edges = g.edges.size();

  std::map<std::uint64_t, std::uint64_t> component_vertices;
  for (const auto& [v, id] : out.membership) ++component_vertices[id];
  std::map<std::uint64_t, std::uint64_t> component_edges;
  for (const auto& [key, attr] : g.edges) ++component_edges[out.membership.at(key.first)];

  for (const auto& [id, count] : component_vertices) {
    const std::uint64_t edges = component_edges.count(id) ? component_edges.at(id) : 0;
    if (count > out.report.max_component_vertices ||
        (count == out.report.max_component_vertices && edges > out.report.max_component_edges)) {
      out.report.max_component_vertices = count;
      out.report.max_component_edges = edges;
    }
  }
  return out;
}

DegreeVariation degree_variation(const LhNetGraph& t1, const LhNetGraph& t2) {
  if (t1.granularity != t2.granularity) {
    throw std::invalid_argument("degree_variation requires matching granularities");
  }
  const auto d1 = t1.degrees();
  const auto d2 = t2.degrees();
  DegreeVariation out;
  std::set<std::string> nodes;
  for (const auto& [v, d] : d1) nodes.insert(v);
  for (const auto& [v, d] : d2) nodes.insert(v);
  double sum = 0;
  for (const auto& v : nodes) {
    const auto a = d1.count(v) ? static_cast<long long>(d1.at(v)) : 0;
    const auto b = d2.count(v) ? static_cast<long long>(d2.at(v)) : 0;
    out.delta[v] = b - a;
    sum += static_cast<double>(b - a);
  }
  if (!nodes.empty()) out.mean = sum / static_cast<double>(nodes.size());

  std::map<long long, std::uint64_t> hist;
  for (const auto& [v, d] : out.delta) ++hist[d];
  std::uint64_t cum = 0;
  for (const auto& [d, count] : hist) {
    cum += count;
    out.cdf.emplace_back(d, static_cast<double>(cum) / static_cast<double>(nodes.size()));
  }
  return out;
}

namespace {

struct AsAccum {
  double sum = 0;
  std::uint64_t count = 0;
};

std::map<std::uint32_t, AsAccum> per_as(std::span<const LongHaulLink> links) {
  std::map<std::uint32_t, AsAccum> accum;
  for (const LongHaulLink& link : links) {
    if (link.near_asn) {
      accum[*link.near_asn].sum += link.pair.min_diff_ms;
      accum[*link.near_asn].count += 1;
    }
    // An intra-AS link contributes once.
    if (link.far_asn && (!link.near_asn || *link.far_asn != *link.near_asn)) {
      accum[*link.far_asn].sum += link.pair.min_diff_ms;
      accum[*link.far_asn].count += 1;
    }
  }
  return accum;
}

}  // namespace

std::vector<AsLatencyRow> as_latency_variation(std::span<const LongHaulLink> links_t1,
                                               std::span<const LongHaulLink> links_t2) {
  const auto t1 = per_as(links_t1);
  const auto t2 = per_as(links_t2);
  std::vector<AsLatencyRow> rows;
  for (const auto& [asn, a1] : t1) {
    auto it = t2.find(asn);
    if (it == t2.end()) continue;
    AsLatencyRow row;
    row.asn = asn;
    row.mean_t1 = a1.sum / static_cast<double>(a1.count);
    row.mean_t2 = it->second.sum / static_cast<double>(it->second.count);
    row.links_t1 = a1.count;
    row.links_t2 = it->second.count;
    row.delta_links =
        static_cast<long long>(it->second.count) - static_cast<long long>(a1.count);
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::pair<std::string, std::string> sorted_pair(std::string a, std::string b) {
  return a <= b ? std::make_pair(std::move(a), std::move(b))
                : std::make_pair(std::move(b), std::move(a));
}

std::vector<MplsAdoptionRow> adoption_rows(
    const std::map<std::pair<std::string, std::string>, std::pair<std::uint64_t, std::uint64_t>>&
        counts) {
  std::vector<MplsAdoptionRow> rows;
  rows.reserve(counts.size());
  for (const auto& [key, totals] : counts) {
    MplsAdoptionRow row;
    row.a = key.first;
    row.b = key.second;
    row.total_links = totals.first;
    row.mpls_links = totals.second;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ReportBundle tabulate(std::span<const LongHaulLink> links) {
  ReportBundle bundle;
  bundle.total_links = links.size();

  std::map<std::pair<std::string, std::string>, std::pair<std::uint64_t, std::uint64_t>>
      by_country, by_continent, by_as;
  std::vector<double> latencies;
  latencies.reserve(links.size());

  for (const LongHaulLink& link : links) {
    bundle.continent_matrix[{link.near_geo.continent, link.far_geo.continent}] += 1;
    bundle.destination_counts[link.near_geo.continent][link.far_geo.country] += 1;
    ++bundle.relationship_counts[link.relationship];
    latencies.push_back(link.pair.min_diff_ms);
    bundle.latency_by_continent_pair[sorted_pair(link.near_geo.continent,
                                                 link.far_geo.continent)]
        .push_back(link.pair.min_diff_ms);

    if (link.near_geo.lat == link.far_geo.lat && link.near_geo.lon == link.far_geo.lon) {
      ++bundle.compass_undefined;
    } else {
      const double bearing = geo::initial_bearing_deg(
          {link.near_geo.lat, link.near_geo.lon}, {link.far_geo.lat, link.far_geo.lon});
      ++bundle.compass_counts[geo::compass_axis(bearing)];
    }

    const std::uint64_t is_mpls = link.mpls_visible ? 1 : 0;
    auto count_pair = [&](auto& counts, std::pair<std::string, std::string> key) {
      auto& entry = counts[std::move(key)];
      entry.first += 1;
      entry.second += is_mpls;
    };
    count_pair(by_country, sorted_pair(link.near_geo.country, link.far_geo.country));
    count_pair(by_continent, sorted_pair(link.near_geo.continent, link.far_geo.continent));
    if (link.near_asn && link.far_asn) {
      count_pair(by_as,
                 sorted_pair(std::to_string(*link.near_asn), std::to_string(*link.far_asn)));
    } else {
      ++bundle.mpls_as_unmapped_links;
    }
  }

  std::sort(latencies.begin(), latencies.end());
  for (std::size_t i = 0; i < latencies.size(); ++i) {
    if (i + 1 < latencies.size() && latencies[i + 1] == latencies[i]) continue;
    bundle.latency_cdf.emplace_back(
        latencies[i], static_cast<double>(i + 1) / static_cast<double>(latencies.size()));
  }
  for (auto& [key, values] : bundle.latency_by_continent_pair) {
    std::sort(values.begin(), values.end());
  }

  bundle.mpls_country = adoption_rows(by_country);
  bundle.mpls_continent = adoption_rows(by_continent);
  bundle.mpls_as = adoption_rows(by_as);
  return bundle;
}

std::vector<std::pair<std::string, std::uint64_t>> top_destinations(
    const std::map<std::string, std::uint64_t>& counts, std::size_t limit) {
  std::vector<std::pair<std::string, std::uint64_t>> rows(counts.begin(), counts.end());
  std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  if (rows.size() > limit) rows.resize(limit);
  return rows;
}

WeightedCdf mpls_weighted_cdf(const std::vector<MplsAdoptionRow>& rows) {
  WeightedCdf out;
  double total_weight = 0;
  std::vector<std::pair<double, double>> samples;  // (adoption, weight)
  for (const auto& row : rows) {
    const auto weight = static_cast<double>(row.total_links);
    samples.emplace_back(row.adoption(), weight);
    total_weight += weight;
    out.weighted_mean += row.adoption() * weight;
  }
  if (total_weight == 0) return out;
  out.weighted_mean /= total_weight;
  std::sort(samples.begin(), samples.end());
  double cum = 0;
  for (const auto& [adoption, weight] : samples) {
    cum += weight;
    out.points.emplace_back(adoption, cum / total_weight);
  }
  return out;
}

}  // namespace lhnet
}  // namespace lhl
