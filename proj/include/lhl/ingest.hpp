// Parsers for every input artifact: traceroute JSONL, ITDK-style sidecars,
// AS relationships, IXP address lists, facility and country-continent CSVs,
// and GeoJSON country polygons. Data problems become diagnostic counters;
// only unreadable streams and broken alias maps are errors.
#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lhl/core.hpp"
#include "lhl/geo.hpp"
#include "lhl/util.hpp"

namespace lhl {
namespace ingest {

template <typename T>
struct Parsed {
  T value{};
  Counters diagnostics;
};

// Relationship of ordered AS pair (a,b): a provider-of b, a customer-of b,
// or peers.
enum class AsRel { p2c, c2p, p2p };

struct RouterGeo {
  double lat = 0;
  double lon = 0;
  std::string country;
};

struct SidecarBundle {
  std::unordered_map<std::string, std::string> alias_map;       // IPv4 -> router ID
  std::unordered_map<std::string, std::uint32_t> router_asn;    // router ID -> ASN
  std::unordered_map<std::string, RouterGeo> router_geo;        // router ID -> location
  std::map<std::pair<std::uint32_t, std::uint32_t>, AsRel> as_rel;
  std::unordered_set<std::string> ixp_addrs;
  std::map<std::string, std::string> country_continent;
  std::vector<geo::Facility> facility_locations;
  std::map<std::string, geo::PolygonSet> country_polygons;
};

// One JSON object per line:
// {"monitor":str,"cycle":str,"dst":str,
//  "hops":[{"i":int,"addr":str|"*","rtt":[float,...],"mpls":int}]}
// Malformed lines are counted and skipped.
Parsed<std::vector<Traceroute>> parse_traceroutes(std::istream& in);

// `node N<id>: <ip> <ip> ...`; an IP listed under two nodes is a hard
// error (std::runtime_error) because the alias map must be a function.
Parsed<std::unordered_map<std::string, std::string>> parse_alias_nodes(std::istream& in);

// `node.AS N<id> <asn>`
Parsed<std::unordered_map<std::string, std::uint32_t>> parse_router_asn(std::istream& in);

// `node.geo N<id>: <continent> <country> ... <lat> <lon>`
Parsed<std::unordered_map<std::string, RouterGeo>> parse_router_geo(std::istream& in);

// `<A>|<B>|<code>` with code -1 (A provides transit to B) or 0 (peers);
// the symmetric closure is populated.
Parsed<std::map<std::pair<std::uint32_t, std::uint32_t>, AsRel>> parse_as_rel(std::istream& in);

// One IPv4 per line.
Parsed<std::unordered_set<std::string>> parse_ixp_addrs(std::istream& in);

// CSV with header `country,continent`.
Parsed<std::map<std::string, std::string>> parse_country_continent(std::istream& in);

// CSV with header `fac_id,lat,lon,country,continent,net_count`.
Parsed<std::vector<geo::Facility>> parse_facilities(std::istream& in);

// GeoJSON FeatureCollection; features need an ISO country property and a
// Polygon or MultiPolygon geometry. Ring closure points are dropped and
// rings with fewer than 3 distinct points rejected.
Parsed<std::map<std::string, geo::PolygonSet>> parse_country_polygons(std::istream& in);

struct SidecarPaths {
  std::string nodes;
  std::string nodes_as;
  std::string nodes_geo;
  std::string as_rel;
  std::string ixp_addrs;
  std::string country_continent;
  std::string facilities;  // optional, used by calibration only
  std::string polygons;
};

// Loads every non-empty path; throws std::runtime_error when a file cannot
// be opened. Diagnostics from all parsers are merged into `diagnostics`.
SidecarBundle load_sidecars(const SidecarPaths& paths, Counters& diagnostics);

}  // namespace ingest
}  // namespace lhl
