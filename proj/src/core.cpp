#include "lhl/core.hpp"

#include <algorithm>
#include <cmath>

#include "lhl/util.hpp"

namespace lhl {

std::optional<double> Hop::representative_rtt() const {
  if (rtt_ms.empty()) return std::nullopt;
  return *std::min_element(rtt_ms.begin(), rtt_ms.end());
}

const char* to_string(Relationship r) {
  switch (r) {
    case Relationship::intra_domain: return "intra_domain";
    case Relationship::p2c: return "p2c";
    case Relationship::p2p: return "p2p";
    case Relationship::ixp: return "ixp";
    case Relationship::unknown: return "unknown";
    case Relationship::unmapped: return "unmapped";
  }
  return "unmapped";
}

std::optional<Relationship> relationship_from_string(std::string_view s) {
  if (s == "intra_domain") return Relationship::intra_domain;
  if (s == "p2c") return Relationship::p2c;
  if (s == "p2p") return Relationship::p2p;
  if (s == "ixp") return Relationship::ixp;
  if (s == "unknown") return Relationship::unknown;
  if (s == "unmapped") return Relationship::unmapped;
  return std::nullopt;
}

const char* to_string(Granularity g) {
  switch (g) {
    case Granularity::router: return "router";
    case Granularity::as: return "as";
    case Granularity::country: return "country";
  }
  return "router";
}

std::optional<Granularity> granularity_from_string(std::string_view s) {
  if (s == "router") return Granularity::router;
  if (s == "as") return Granularity::as;
  if (s == "country") return Granularity::country;
  return std::nullopt;
}

std::uint64_t LhNetGraph::simple_edge_count() const {
  std::uint64_t n = 0;
  for (const auto& [key, attr] : edges) {
    if (key.first != key.second) ++n;
  }
  return n;
}

std::uint64_t LhNetGraph::self_loop_count() const {
  return edges.size() - simple_edge_count();
}

std::map<std::string, std::uint64_t> LhNetGraph::degrees() const {
  std::map<std::string, std::uint64_t> deg;
  for (const auto& v : vertices) deg[v] = 0;
  for (const auto& [key, attr] : edges) {
    if (key.first == key.second) continue;
    ++deg[key.first];
    ++deg[key.second];
  }
  return deg;
}

std::vector<std::string> validate(const Hop& h) {
  std::vector<std::string> out;
  if (h.index < 0) out.push_back("negative hop index");
  if (h.responsive()) {
    if (!is_ipv4(h.address)) out.push_back("address not IPv4");
    for (double r : h.rtt_ms) {
      if (!std::isfinite(r) || r < 0) {
        out.push_back("rtt sample not finite and non-negative");
        break;
      }
    }
  } else {
    if (!h.rtt_ms.empty()) out.push_back("rtt samples on unresponsive hop");
    if (h.mpls_labels != 0) out.push_back("mpls on unresponsive hop");
  }
  if (h.mpls_labels < 0) out.push_back("negative mpls label count");
  return out;
}

std::vector<std::string> validate(const Traceroute& t) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i < t.hops.size(); ++i) {
    if (t.hops[i].index <= t.hops[i - 1].index) {
      out.push_back("hop indices not strictly increasing");
      break;
    }
  }
  for (const auto& h : t.hops) {
    for (auto& v : validate(h)) out.push_back("hop " + std::to_string(h.index) + ": " + v);
  }
  return out;
}

std::vector<std::string> validate(const CandidateLink& c) {
  std::vector<std::string> out;
  if (c.rtt_diff_ms <= 0) out.push_back("rtt_diff not positive");
  if (!is_ipv4(c.near_ip)) out.push_back("near_ip not IPv4");
  if (!is_ipv4(c.far_ip)) out.push_back("far_ip not IPv4");
  if (c.near_index < 0) out.push_back("negative near_index");
  if (c.far_mpls_labels < 0) out.push_back("negative far mpls label count");
  return out;
}

std::vector<std::string> validate(const RouterPair& p) {
  std::vector<std::string> out;
  if (p.near_router == p.far_router) out.push_back("pair ends alias to one router");
  if (p.sample_count < 1) out.push_back("sample_count below 1");
  if (p.sample_count < p.ip_pairs.size()) out.push_back("fewer samples than ip pairs");
  if (!std::isfinite(p.min_diff_ms) || p.min_diff_ms <= 0) out.push_back("min_diff not positive");
  return out;
}

std::vector<std::string> validate(const LongHaulLink& l, double threshold_ms) {
  std::vector<std::string> out = validate(l.pair);
  if (l.near_geo.continent == l.far_geo.continent) out.push_back("not intercontinental");
  if (l.pair.min_diff_ms < threshold_ms) out.push_back("min_diff below threshold");
  auto coord_ok = [](const GeoTag& g) {
    return std::abs(g.lat) <= 90.0 && std::abs(g.lon) <= 180.0;
  };
  if (!coord_ok(l.near_geo)) out.push_back("near geo out of range");
  if (!coord_ok(l.far_geo)) out.push_back("far geo out of range");
  return out;
}

std::vector<std::string> validate(const LhNetGraph& g) {
  std::vector<std::string> out;
  for (const auto& [key, attr] : g.edges) {
    if (!g.vertices.count(key.first) || !g.vertices.count(key.second)) {
      out.push_back("edge endpoint missing from vertex set");
      break;
    }
  }
  for (const auto& [key, attr] : g.edges) {
    if (key.first > key.second) {
      out.push_back("edge key not ordered");
      break;
    }
    if (attr.multiplicity < 1) {
      out.push_back("edge multiplicity below 1");
      break;
    }
  }
  if (g.granularity == Granularity::router && g.self_loop_count() > 0) {
    out.push_back("self-loop at router granularity");
  }
  return out;
}

}  // namespace lhl
