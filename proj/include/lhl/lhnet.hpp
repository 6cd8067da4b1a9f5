// Graph construction over the surviving long-haul links and every analysis
// run on it: degree distributions, super routers, k-core shells, connected
// components, snapshot-to-snapshot variation, and the link-level report
// tables (continent matrix, destinations, compass, relationships, latency
// CDFs, MPLS adoption).
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lhl/core.hpp"
#include "lhl/geo.hpp"
#include "lhl/util.hpp"

namespace lhl {
namespace lhnet {

// Router granularity keys on router IDs, AS on ASNs (links with an unmapped
// end are skipped and counted), country on country codes. Parallel links
// accumulate multiplicity; self-loops are recorded but never enter degrees.
LhNetGraph build_graph(std::span<const LongHaulLink> links, Granularity granularity,
                       Counters* counters = nullptr);

std::map<std::uint64_t, std::uint64_t> degree_distribution(const LhNetGraph& g);

// Sorted (degree, P[X >= degree]); starts at 1 and never increases.
std::vector<std::pair<std::uint64_t, double>> ccdf(const LhNetGraph& g);

struct SuperRouterRow {
  std::string router;
  std::uint64_t degree = 0;
  std::set<std::string> countries;  // far-end countries over the router's links
  std::optional<std::uint32_t> asn;
  GeoTag location;
};

// Routers whose direct LHL neighbours span at least min_countries countries,
// sorted by country count, then degree, both descending.
std::vector<SuperRouterRow> super_routers(const LhNetGraph& router_graph,
                                          std::span<const LongHaulLink> links,
                                          std::size_t min_countries);

struct CoreDecomposition {
  std::map<std::string, std::uint64_t> shell;
  std::uint64_t max_shell = 0;
  std::set<std::string> top_core;
};

// Shell indices by iterative peeling on the simple-graph view (multiplicity
// and self-loops ignored).
CoreDecomposition k_core(const LhNetGraph& g);

struct ComponentReport {
  std::uint64_t component_count = 0;
  std::uint64_t vertices = 0;
  std::uint64_t edges = 0;  // distinct vertex pairs, self-loops included
  std::uint64_t max_component_vertices = 0;
  std::uint64_t max_component_edges = 0;
};

struct Components {
  ComponentReport report;
  std::map<std::string, std::uint64_t> membership;  // vertex -> component id
};

Components connected_components(const LhNetGraph& g);

struct DegreeVariation {
  std::map<std::string, long long> delta;  // over the union; absent node = degree 0
  double mean = 0;
  std::vector<std::pair<long long, double>> cdf;  // (delta, P[X <= delta])
};

// Throws std::invalid_argument when the granularities differ.
DegreeVariation degree_variation(const LhNetGraph& t1, const LhNetGraph& t2);

struct AsLatencyRow {
  std::uint32_t asn = 0;
  double mean_t1 = 0;
  double mean_t2 = 0;
  std::uint64_t links_t1 = 0;
  std::uint64_t links_t2 = 0;
  long long delta_links = 0;
};

// Mean link latency per AS in two snapshots; a link contributes to both end
// ASes, or once when intra-AS. Only ASes present in both snapshots appear.
std::vector<AsLatencyRow> as_latency_variation(std::span<const LongHaulLink> links_t1,
                                               std::span<const LongHaulLink> links_t2);

struct MplsAdoptionRow {
  std::string a;  // pair key, a <= b
  std::string b;
  std::uint64_t total_links = 0;
  std::uint64_t mpls_links = 0;

  double adoption() const {
    return total_links ? static_cast<double>(mpls_links) / static_cast<double>(total_links) : 0.0;
  }
};

struct ReportBundle {
  // near continent -> far continent -> link count
  std::map<std::pair<std::string, std::string>, std::uint64_t> continent_matrix;
  // near-side continent -> far-side country counts
  std::map<std::string, std::map<std::string, std::uint64_t>> destination_counts;
  std::map<geo::CompassAxis, std::uint64_t> compass_counts;
  std::uint64_t compass_undefined = 0;
  std::map<Relationship, std::uint64_t> relationship_counts;
  std::vector<std::pair<double, double>> latency_cdf;  // (ms, P[X <= ms])
  std::map<std::pair<std::string, std::string>, std::vector<double>> latency_by_continent_pair;
  std::vector<MplsAdoptionRow> mpls_country;
  std::vector<MplsAdoptionRow> mpls_continent;
  std::vector<MplsAdoptionRow> mpls_as;  // links with unmapped ends excluded
  std::uint64_t mpls_as_unmapped_links = 0;
  std::uint64_t total_links = 0;
};

ReportBundle tabulate(std::span<const LongHaulLink> links);

// Top destination countries for one region, ties broken alphabetically.
std::vector<std::pair<std::string, std::uint64_t>> top_destinations(
    const std::map<std::string, std::uint64_t>& counts, std::size_t limit);

// Weighted adoption CDF support: rows sorted by adoption with cumulative
// weight fractions, plus the weighted mean adoption.
struct WeightedCdf {
  std::vector<std::pair<double, double>> points;  // (adoption, cumulative weight fraction)
  double weighted_mean = 0;
};

WeightedCdf mpls_weighted_cdf(const std::vector<MplsAdoptionRow>& rows);

}  // namespace lhnet
}  // namespace lhl
