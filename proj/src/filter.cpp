#include "lhl/filter.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace lhl {
namespace filter {

std::vector<AnnotatedPair> aggregate_router_pairs(
    std::span<const CandidateLink> candidates,
    const std::unordered_map<std::string, std::string>& alias_map, Counters& counters) {
  auto resolve = [&](const std::string& ip) -> std::string {
    auto it = alias_map.find(ip);
    return it == alias_map.end() ? ip : it->second;  // pseudo-router fallback
  };

  std::map<std::pair<std::string, std::string>, AnnotatedPair> grouped;
  for (const CandidateLink& c : candidates) {
    const std::string near_router = resolve(c.near_ip);
    const std::string far_router = resolve(c.far_ip);
    if (near_router == far_router) {
      bump(counters, "aggregate.self_alias_pair");
      continue;
    }
    auto key = near_router <= far_router ? std::make_pair(near_router, far_router)
                                         : std::make_pair(far_router, near_router);
    auto [it, inserted] = grouped.try_emplace(key);
    AnnotatedPair& entry = it->second;
    if (inserted) {
      entry.pair.near_router = near_router;
      entry.pair.far_router = far_router;
      entry.pair.min_diff_ms = c.rtt_diff_ms;
    } else if (c.rtt_diff_ms < entry.pair.min_diff_ms) {
      entry.pair.min_diff_ms = c.rtt_diff_ms;
      entry.pair.near_router = near_router;
      entry.pair.far_router = far_router;
    }
    entry.pair.ip_pairs.insert({c.near_ip, c.far_ip});
    entry.pair.sample_count += 1;
    entry.far_mpls.push_back(c.far_mpls_labels);
  }

  std::vector<AnnotatedPair> out;
  out.reserve(grouped.size());
  for (auto& [key, entry] : grouped) out.push_back(std::move(entry));
  return out;
}

std::vector<AnnotatedPair> apply_threshold(std::vector<AnnotatedPair> pairs, double threshold_ms,
                                           Counters& counters) {
  if (threshold_ms <= 0) throw std::invalid_argument("threshold_ms must be positive");
  std::vector<AnnotatedPair> kept;
  kept.reserve(pairs.size());
  for (auto& p : pairs) {
    if (p.pair.min_diff_ms >= threshold_ms) {
      kept.push_back(std::move(p));
    } else {
      bump(counters, "threshold.below_threshold");
    }
  }
  return kept;
}

CoverageStats augment(std::vector<AnnotatedPair>& pairs, const ingest::SidecarBundle& sidecars,
                      Counters& counters) {
  auto annotate = [&](const std::string& router, std::optional<GeoTag>& geo,
                      std::optional<std::uint32_t>& asn) {
    if (auto it = sidecars.router_geo.find(router); it != sidecars.router_geo.end()) {
      GeoTag tag;
      tag.lat = it->second.lat;
      tag.lon = it->second.lon;
      tag.country = it->second.country;
      if (auto cc = sidecars.country_continent.find(tag.country);
          cc != sidecars.country_continent.end()) {
        tag.continent = cc->second;
      } else {
        bump(counters, "augment.country_without_continent");
      }
      geo = tag;
    } else {
      bump(counters, "augment.router_without_geo");
    }
    if (auto it = sidecars.router_asn.find(router); it != sidecars.router_asn.end()) {
      asn = it->second;
    } else {
      bump(counters, "augment.router_without_asn");
    }
  };

  std::set<std::string> routers;
  for (auto& p : pairs) {
    annotate(p.pair.near_router, p.near_geo, p.near_asn);
    annotate(p.pair.far_router, p.far_geo, p.far_asn);
    routers.insert(p.pair.near_router);
    routers.insert(p.pair.far_router);
  }

  CoverageStats stats;
  stats.routers = routers.size();
  for (const auto& r : routers) {
    if (sidecars.router_geo.count(r)) ++stats.geolocated;
    if (sidecars.router_asn.count(r)) ++stats.as_mapped;
  }
  return stats;
}

namespace {

bool geolocated(const AnnotatedPair& p) {
  return p.near_geo && p.far_geo && !p.near_geo->continent.empty() &&
         !p.far_geo->continent.empty();
}

}  // namespace

std::vector<AnnotatedPair> filter_intercontinental(std::vector<AnnotatedPair> pairs,
                                                   Counters& counters) {
  std::vector<AnnotatedPair> kept;
  kept.reserve(pairs.size());
  for (auto& p : pairs) {
    if (!geolocated(p)) {
      bump(counters, "intercontinental.ungeolocated");
      continue;
    }
    if (p.near_geo->continent == p.far_geo->continent) {
      bump(counters, "intercontinental.intra_continental");
      continue;
    }
    kept.push_back(std::move(p));
  }
  return kept;
}

std::vector<AnnotatedPair> filter_sol(std::vector<AnnotatedPair> pairs,
                                      const geo::CountryDistanceTable& table,
                                      Counters& counters) {
  std::vector<AnnotatedPair> kept;
  kept.reserve(pairs.size());
  for (auto& p : pairs) {
    if (!geolocated(p)) {  // defensive: chain normally runs intercontinental first
      bump(counters, "sol.ungeolocated_kept");
      kept.push_back(std::move(p));
      continue;
    }
    auto verdict =
        geo::sol_violates(p.pair.min_diff_ms, p.near_geo->country, p.far_geo->country, table);
    if (!verdict.has_value()) {
      bump(counters, "sol.country_pair_missing_kept");
      kept.push_back(std::move(p));
      continue;
    }
    if (*verdict) {
      bump(counters, "sol.violation");
      continue;
    }
    kept.push_back(std::move(p));
  }
  return kept;
}

void tag_mpls(LongHaulLink& link, std::span<const Hop> supporting_far_hops) {
  link.mpls_visible = std::any_of(supporting_far_hops.begin(), supporting_far_hops.end(),
                                  [](const Hop& h) { return h.mpls_labels > 0; });
}

Relationship classify_relationship(
    const LongHaulLink& link,
    const std::map<std::pair<std::uint32_t, std::uint32_t>, ingest::AsRel>& as_rel,
    const std::unordered_set<std::string>& ixp_addrs) {
  if (link.near_asn && link.far_asn) {
    if (*link.near_asn == *link.far_asn) return Relationship::intra_domain;
    auto it = as_rel.find({*link.near_asn, *link.far_asn});
    if (it != as_rel.end()) {
      return it->second == ingest::AsRel::p2p ? Relationship::p2p : Relationship::p2c;
    }
  }
  for (const auto& [near_ip, far_ip] : link.pair.ip_pairs) {
    if (ixp_addrs.count(near_ip) || ixp_addrs.count(far_ip)) return Relationship::ixp;
  }
  if (link.near_asn && link.far_asn) return Relationship::unknown;
  return Relationship::unmapped;
}

std::vector<LongHaulLink> finalize_links(const std::vector<AnnotatedPair>& pairs,
                                         const ingest::SidecarBundle& sidecars) {
  std::vector<LongHaulLink> links;
  links.reserve(pairs.size());
  for (const AnnotatedPair& p : pairs) {
    if (!p.near_geo || !p.far_geo) {
      throw std::logic_error("finalize_links requires geolocated pairs");
    }
    LongHaulLink link;
    link.pair = p.pair;
    link.near_geo = *p.near_geo;
    link.far_geo = *p.far_geo;
    link.near_asn = p.near_asn;
    link.far_asn = p.far_asn;
    std::vector<Hop> far_hops;
    far_hops.reserve(p.far_mpls.size());
    for (int labels : p.far_mpls) {
      Hop h;
      h.address = link.pair.far_router;
      h.rtt_ms = {link.pair.min_diff_ms};
      h.mpls_labels = labels;
      far_hops.push_back(std::move(h));
    }
    tag_mpls(link, far_hops);
    link.relationship = classify_relationship(link, sidecars.as_rel, sidecars.ixp_addrs);
    links.push_back(std::move(link));
  }
  return links;
}

}  // namespace filter
}  // namespace lhl
