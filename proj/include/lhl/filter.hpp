// Stages 2-5 of the pipeline: aggregate candidates into router pairs, apply
// the latency threshold, attach sidecar annotations, keep intercontinental
// pairs, drop speed-of-light violations, and tag MPLS visibility and the AS
// relationship. Every dropped pair lands in exactly one named counter.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lhl/core.hpp"
#include "lhl/geo.hpp"
#include "lhl/ingest.hpp"
#include "lhl/util.hpp"

namespace lhl {
namespace filter {

// A router pair moving through the filter chain, with annotations filled in
// by augment() and the far-side MPLS label counts of every supporting
// candidate kept for later tagging.
struct AnnotatedPair {
  RouterPair pair;
  std::vector<int> far_mpls;
  std::optional<GeoTag> near_geo;
  std::optional<GeoTag> far_geo;
  std::optional<std::uint32_t> near_asn;
  std::optional<std::uint32_t> far_asn;
};

struct CoverageStats {
  std::uint64_t routers = 0;
  std::uint64_t geolocated = 0;
  std::uint64_t as_mapped = 0;

  double geolocated_fraction() const {
    return routers ? static_cast<double>(geolocated) / static_cast<double>(routers) : 0.0;
  }
  double as_mapped_fraction() const {
    return routers ? static_cast<double>(as_mapped) / static_cast<double>(routers) : 0.0;
  }
};

// Groups candidates by unordered router pair. IPs missing from the alias
// map become pseudo-routers keyed by the IP itself; candidates whose two
// ends alias to the same router are dropped and counted. The stored
// near/far orientation follows the candidate that set the minimum diff.
std::vector<AnnotatedPair> aggregate_router_pairs(
    std::span<const CandidateLink> candidates,
    const std::unordered_map<std::string, std::string>& alias_map, Counters& counters);

// Keeps pairs with min_diff_ms >= threshold_ms (the threshold is inclusive).
// A non-positive threshold is a configuration error.
std::vector<AnnotatedPair> apply_threshold(std::vector<AnnotatedPair> pairs, double threshold_ms,
                                           Counters& counters);

// Attaches geolocation, continent and ASN to both ends and reports sidecar
// coverage over the distinct routers seen. Missing annotations stay absent.
CoverageStats augment(std::vector<AnnotatedPair>& pairs, const ingest::SidecarBundle& sidecars,
                      Counters& counters);

// Keeps pairs whose continents differ; pairs lacking geolocation or a
// continent mapping are dropped and counted.
std::vector<AnnotatedPair> filter_intercontinental(std::vector<AnnotatedPair> pairs,
                                                   Counters& counters);

// Drops pairs whose min_diff cannot span the minimum distance between their
// countries. Pairs missing from the distance table are kept and counted.
std::vector<AnnotatedPair> filter_sol(std::vector<AnnotatedPair> pairs,
                                      const geo::CountryDistanceTable& table, Counters& counters);

// mpls_visible iff any supporting far-side hop carried MPLS labels.
void tag_mpls(LongHaulLink& link, std::span<const Hop> supporting_far_hops);

Relationship classify_relationship(
    const LongHaulLink& link,
    const std::map<std::pair<std::uint32_t, std::uint32_t>, ingest::AsRel>& as_rel,
    const std::unordered_set<std::string>& ixp_addrs);

// Survivors of the whole chain become LongHaulLinks with MPLS visibility
// and AS relationship tagged. Requires both geo annotations present.
std::vector<LongHaulLink> finalize_links(const std::vector<AnnotatedPair>& pairs,
                                         const ingest::SidecarBundle& sidecars);

}  // namespace filter
}  // namespace lhl
