// Domain types shared by the whole pipeline. Values are immutable once
// built and safe to share across workers; validate() reports invariant
// violations as data instead of throwing.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lhl {

inline constexpr const char* kUnresponsive = "*";
inline constexpr double kDefaultThresholdMs = 57.0;

struct Hop {
  int index = 0;                 // 0-based position in the path
  std::string address;           // dotted-quad IPv4, or "*" when unresponsive
  std::vector<double> rtt_ms;    // raw samples; empty iff unresponsive
  int mpls_labels = 0;           // label-stack entries echoed in the ICMP payload

  bool responsive() const { return address != kUnresponsive; }

  // Minimum over the hop's samples: the congestion-robust representative.
  std::optional<double> representative_rtt() const;

  bool operator==(const Hop&) const = default;
};

struct TraceRef {
  std::string monitor;
  std::string cycle;
  std::string dst;

  std::string key() const { return monitor + "|" + cycle + "|" + dst; }
  auto operator<=>(const TraceRef&) const = default;
};

struct Traceroute {
  std::string monitor_id;
  std::string cycle_id;
  std::string dst;
  std::vector<Hop> hops;  // indices strictly increasing

  TraceRef ref() const { return TraceRef{monitor_id, cycle_id, dst}; }

  bool operator==(const Traceroute&) const = default;
};

struct CandidateLink {
  std::string near_ip;
  std::string far_ip;
  int near_index = 0;       // far hop sits at near_index + 1
  double rtt_diff_ms = 0;   // far representative minus near representative, > 0
  TraceRef trace_ref;
  int far_mpls_labels = 0;  // carried along so MPLS tagging survives the candidate cache

  bool operator==(const CandidateLink&) const = default;
};

struct RouterPair {
  std::string near_router;
  std::string far_router;
  std::set<std::pair<std::string, std::string>> ip_pairs;
  double min_diff_ms = 0;
  std::uint64_t sample_count = 0;

  bool operator==(const RouterPair&) const = default;
};

struct GeoTag {
  double lat = 0;
  double lon = 0;
  std::string country;    // ISO 3166-1 alpha-2
  std::string continent;  // one of AF AN AS EU NA OC SA

  bool operator==(const GeoTag&) const = default;
};

enum class Relationship { intra_domain, p2c, p2p, ixp, unknown, unmapped };

const char* to_string(Relationship r);
std::optional<Relationship> relationship_from_string(std::string_view s);

struct LongHaulLink {
  RouterPair pair;
  GeoTag near_geo;
  GeoTag far_geo;
  std::optional<std::uint32_t> near_asn;
  std::optional<std::uint32_t> far_asn;
  bool mpls_visible = false;
  Relationship relationship = Relationship::unmapped;

  bool operator==(const LongHaulLink&) const = default;
};

enum class Granularity { router, as, country };

const char* to_string(Granularity g);
std::optional<Granularity> granularity_from_string(std::string_view s);

struct EdgeAttr {
  std::uint64_t multiplicity = 0;   // distinct LHLs collapsed onto this edge
  double sum_min_diff_ms = 0;       // mean = sum / multiplicity
  std::set<std::string> countries;  // endpoint countries of contributing links

  double mean_min_diff_ms() const {
    return multiplicity ? sum_min_diff_ms / static_cast<double>(multiplicity) : 0.0;
  }
};

// Undirected multigraph at one granularity. Edge keys are ordered node
// pairs (first <= second). Self-loops are kept in the edge map but never
// contribute to degrees.
struct LhNetGraph {
  Granularity granularity = Granularity::router;
  std::set<std::string> vertices;
  std::map<std::pair<std::string, std::string>, EdgeAttr> edges;

  std::uint64_t simple_edge_count() const;  // distinct pairs, self-loops excluded
  std::uint64_t self_loop_count() const;
  std::map<std::string, std::uint64_t> degrees() const;  // distinct neighbours
};

// ---- invariant checks ----
// Total functions: malformed combinations come back as tagged violation
// strings, never as exceptions.

std::vector<std::string> validate(const Hop& h);
std::vector<std::string> validate(const Traceroute& t);
std::vector<std::string> validate(const CandidateLink& c);
std::vector<std::string> validate(const RouterPair& p);
std::vector<std::string> validate(const LongHaulLink& l, double threshold_ms = kDefaultThresholdMs);
std::vector<std::string> validate(const LhNetGraph& g);

}  // namespace lhl
