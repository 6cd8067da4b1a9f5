#include "lhl/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace lhl {
namespace ingest {

namespace {

using nlohmann::json;

bool is_comment_or_blank(std::string_view line) {
  auto t = trim(line);
  return t.empty() || t.front() == '#';
}

std::optional<Hop> hop_from_json(const json& j) {
  if (!j.is_object()) return std::nullopt;
  if (!j.contains("i") || !j["i"].is_number_integer()) return std::nullopt;
  if (!j.contains("addr") || !j["addr"].is_string()) return std::nullopt;
  Hop hop;
  hop.index = j["i"].get<int>();
  hop.address = j["addr"].get<std::string>();
  if (hop.index < 0) return std::nullopt;
  if (j.contains("rtt")) {
    if (!j["rtt"].is_array()) return std::nullopt;
    for (const auto& v : j["rtt"]) {
      if (!v.is_number()) return std::nullopt;
      hop.rtt_ms.push_back(v.get<double>());
    }
  }
  if (j.contains("mpls")) {
    if (!j["mpls"].is_number_integer()) return std::nullopt;
    hop.mpls_labels = j["mpls"].get<int>();
  }
  if (!validate(hop).empty()) return std::nullopt;
  return hop;
}

std::optional<Traceroute> trace_from_json(const json& j) {
  if (!j.is_object()) return std::nullopt;
  for (const char* key : {"monitor", "cycle", "dst"}) {
    if (!j.contains(key) || !j[key].is_string()) return std::nullopt;
  }
  if (!j.contains("hops") || !j["hops"].is_array()) return std::nullopt;
  Traceroute t;
  t.monitor_id = j["monitor"].get<std::string>();
  t.cycle_id = j["cycle"].get<std::string>();
  t.dst = j["dst"].get<std::string>();
  if (!is_ipv4(t.dst)) return std::nullopt;
  for (const auto& hj : j["hops"]) {
    auto hop = hop_from_json(hj);
    if (!hop) return std::nullopt;
    t.hops.push_back(std::move(*hop));
  }
  if (!validate(t).empty()) return std::nullopt;
  return t;
}

}  // namespace

Parsed<std::vector<Traceroute>> parse_traceroutes(std::istream& in) {
  if (!in) throw std::runtime_error("unreadable traceroute stream");
  Parsed<std::vector<Traceroute>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) {
      bump(out.diagnostics, "traceroutes.comments");
      continue;
    }
    json j = json::parse(line, nullptr, false);
    auto trace = j.is_discarded() ? std::nullopt : trace_from_json(j);
    if (!trace) {
      bump(out.diagnostics, "traceroutes.skipped.malformed_line");
      continue;
    }
    bump(out.diagnostics, "traceroutes.parsed");
    out.value.push_back(std::move(*trace));
  }
  return out;
}

Parsed<std::unordered_map<std::string, std::string>> parse_alias_nodes(std::istream& in) {
  if (!in) throw std::runtime_error("unreadable nodes stream");
  Parsed<std::unordered_map<std::string, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) {
      bump(out.diagnostics, "nodes.comments");
      continue;
    }
    auto tokens = split_ws(line);
    if (tokens.size() < 3 || tokens[0] != "node" || tokens[1].size() < 3 ||
        tokens[1][0] != 'N' || tokens[1].back() != ':') {
      bump(out.diagnostics, "nodes.skipped.malformed_line");
      continue;
    }
    const std::string router = tokens[1].substr(0, tokens[1].size() - 1);
    bool ok = true;
    for (std::size_t i = 2; i < tokens.size(); ++i) {
      if (!is_ipv4(tokens[i])) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      bump(out.diagnostics, "nodes.skipped.malformed_line");
      continue;
    }
    for (std::size_t i = 2; i < tokens.size(); ++i) {
      auto [it, inserted] = out.value.emplace(tokens[i], router);
      if (!inserted && it->second != router) {
        throw std::runtime_error("alias map conflict: " + tokens[i] + " maps to both " +
                                 it->second + " and " + router);
      }
    }
    bump(out.diagnostics, "nodes.parsed");
  }
  return out;
}

Parsed<std::unordered_map<std::string, std::uint32_t>> parse_router_asn(std::istream& in) {
  if (!in) throw std::runtime_error("unreadable nodes.as stream");
  Parsed<std::unordered_map<std::string, std::uint32_t>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) {
      bump(out.diagnostics, "nodes_as.comments");
      continue;
    }
    auto tokens = split_ws(line);
    std::optional<long long> asn;
    if (tokens.size() >= 3 && tokens[0] == "node.AS" && !tokens[1].empty() &&
        tokens[1][0] == 'N') {
      asn = parse_int(tokens[2]);
    }
    if (!asn || *asn < 0 || *asn > 0xffffffffLL) {
      bump(out.diagnostics, "nodes_as.skipped.malformed_line");
      continue;
    }
    out.value[tokens[1]] = static_cast<std::uint32_t>(*asn);
    bump(out.diagnostics, "nodes_as.parsed");
  }
  return out;
}

Parsed<std::unordered_map<std::string, RouterGeo>> parse_router_geo(std::istream& in) {
  if (!in) throw std::runtime_error("unreadable nodes.geo stream");
  Parsed<std::unordered_map<std::string, RouterGeo>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) {
      bump(out.diagnostics, "nodes_geo.comments");
      continue;
    }
    auto tokens = split_ws(line);
    if (tokens.size() < 6 || tokens[0] != "node.geo" || tokens[1].size() < 3 ||
        tokens[1][0] != 'N' || tokens[1].back() != ':') {
      bump(out.diagnostics, "nodes_geo.skipped.malformed_line");
      continue;
    }
    const std::string router = tokens[1].substr(0, tokens[1].size() - 1);
    const std::string country = tokens[3];
    auto lat = parse_double(tokens[tokens.size() - 2]);
    auto lon = parse_double(tokens[tokens.size() - 1]);
    if (!lat || !lon) {
      bump(out.diagnostics, "nodes_geo.skipped.malformed_line");
      continue;
    }
    if (std::abs(*lat) > 90.0 || std::abs(*lon) > 180.0) {
      bump(out.diagnostics, "nodes_geo.skipped.coordinate_out_of_range");
      continue;
    }
    out.value[router] = RouterGeo{*lat, *lon, country};
    bump(out.diagnostics, "nodes_geo.parsed");
  }
  return out;
}

Parsed<std::map<std::pair<std::uint32_t, std::uint32_t>, AsRel>> parse_as_rel(
    std::istream& in) {
  if (!in) throw std::runtime_error("unreadable as-rel stream");
  Parsed<std::map<std::pair<std::uint32_t, std::uint32_t>, AsRel>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) {
      bump(out.diagnostics, "as_rel.comments");
      continue;
    }
    auto fields = split_char(trim(line), '|');
    std::optional<long long> a, b, code;
    if (fields.size() >= 3) {
      a = parse_int(fields[0]);
      b = parse_int(fields[1]);
      code = parse_int(fields[2]);
    }
    if (!a || !b || !code || *a < 0 || *b < 0) {
      bump(out.diagnostics, "as_rel.skipped.malformed_line");
      continue;
    }
    const auto as_a = static_cast<std::uint32_t>(*a);
    const auto as_b = static_cast<std::uint32_t>(*b);
    if (*code == -1) {
      out.value[{as_a, as_b}] = AsRel::p2c;
      out.value[{as_b, as_a}] = AsRel::c2p;
    } else if (*code == 0) {
      out.value[{as_a, as_b}] = AsRel::p2p;
      out.value[{as_b, as_a}] = AsRel::p2p;
    } else {
      bump(out.diagnostics, "as_rel.skipped.unknown_code");
      continue;
    }
    bump(out.diagnostics, "as_rel.parsed");
  }
  return out;
}

Parsed<std::unordered_set<std::string>> parse_ixp_addrs(std::istream& in) {
  if (!in) throw std::runtime_error("unreadable ixp stream");
  Parsed<std::unordered_set<std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) {
      bump(out.diagnostics, "ixp.comments");
      continue;
    }
    auto addr = std::string(trim(line));
    if (!is_ipv4(addr)) {
      bump(out.diagnostics, "ixp.skipped.malformed_line");
      continue;
    }
    out.value.insert(addr);
    bump(out.diagnostics, "ixp.parsed");
  }
  return out;
}

Parsed<std::map<std::string, std::string>> parse_country_continent(std::istream& in) {
  if (!in) throw std::runtime_error("unreadable country-continent stream");
  Parsed<std::map<std::string, std::string>> out;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) {
      bump(out.diagnostics, "country_continent.comments");
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // `country,continent`
      continue;
    }
    auto fields = split_char(trim(line), ',');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      bump(out.diagnostics, "country_continent.skipped.malformed_line");
      continue;
    }
    out.value[fields[0]] = fields[1];
    bump(out.diagnostics, "country_continent.parsed");
  }
  return out;
}

Parsed<std::vector<geo::Facility>> parse_facilities(std::istream& in) {
  if (!in) throw std::runtime_error("unreadable facilities stream");
  Parsed<std::vector<geo::Facility>> out;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) {
      bump(out.diagnostics, "facilities.comments");
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // `fac_id,lat,lon,country,continent,net_count`
      continue;
    }
    auto fields = split_char(trim(line), ',');
    if (fields.size() != 6) {
      bump(out.diagnostics, "facilities.skipped.malformed_line");
      continue;
    }
    auto lat = parse_double(fields[1]);
    auto lon = parse_double(fields[2]);
    auto nets = parse_int(fields[5]);
    if (!lat || !lon || std::abs(*lat) > 90.0 || std::abs(*lon) > 180.0) {
      bump(out.diagnostics, "facilities.skipped.bad_coordinates");
      continue;
    }
    if (!nets || *nets < 0) {
      bump(out.diagnostics, "facilities.skipped.bad_net_count");
      continue;
    }
    out.value.push_back(geo::Facility{fields[0], {*lat, *lon}, fields[3], fields[4], *nets});
    bump(out.diagnostics, "facilities.parsed");
  }
  return out;
}

namespace {

// Returns the ring with the closure point dropped, or nullopt if degenerate.
std::optional<geo::Ring> ring_from_json(const json& coords) {
  if (!coords.is_array()) return std::nullopt;
  geo::Ring ring;
  for (const auto& pt : coords) {
    if (!pt.is_array() || pt.size() < 2 || !pt[0].is_number() || !pt[1].is_number()) {
      return std::nullopt;
    }
    ring.push_back(geo::GeoPoint{pt[1].get<double>(), pt[0].get<double>()});  // [lon,lat]
  }
  if (ring.size() >= 2 && ring.front().lat == ring.back().lat &&
      ring.front().lon == ring.back().lon) {
    ring.pop_back();
  }
  std::vector<std::pair<double, double>> distinct;
  for (const auto& p : ring) {
    auto key = std::make_pair(p.lat, p.lon);
    if (std::find(distinct.begin(), distinct.end(), key) == distinct.end()) {
      distinct.push_back(key);
    }
  }
  if (distinct.size() < 3) return std::nullopt;
  return ring;
}

std::optional<std::string> country_property(const json& props) {
  if (!props.is_object()) return std::nullopt;
  for (const char* key : {"ISO_A2", "iso_a2", "ISO_A2_EH", "ISO2", "iso2", "country", "COUNTRY"}) {
    if (props.contains(key) && props[key].is_string()) {
      auto value = props[key].get<std::string>();
      if (!value.empty() && value != "-99") return value;
    }
  }
  return std::nullopt;
}

}  // namespace

Parsed<std::map<std::string, geo::PolygonSet>> parse_country_polygons(std::istream& in) {
  if (!in) throw std::runtime_error("unreadable polygons stream");
  Parsed<std::map<std::string, geo::PolygonSet>> out;
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("features") ||
      !doc["features"].is_array()) {
    throw std::runtime_error("polygon input is not a GeoJSON FeatureCollection");
  }
  for (const auto& feature : doc["features"]) {
    auto country = country_property(feature.value("properties", json::object()));
    if (!country) {
      bump(out.diagnostics, "polygons.skipped.missing_country");
      continue;
    }
    if (!feature.contains("geometry") || !feature["geometry"].is_object()) {
      bump(out.diagnostics, "polygons.skipped.missing_geometry");
      continue;
    }
    const auto& geom = feature["geometry"];
    const std::string type = geom.value("type", "");
    const json& coords = geom.contains("coordinates") ? geom["coordinates"] : json::array();
    std::vector<const json*> polygon_coords;
    if (type == "Polygon") {
      polygon_coords.push_back(&coords);
    } else if (type == "MultiPolygon") {
      for (const auto& part : coords) polygon_coords.push_back(&part);
    } else {
      bump(out.diagnostics, "polygons.skipped.unsupported_geometry");
      continue;
    }
    std::size_t accepted = 0;
    for (const json* poly : polygon_coords) {
      if (!poly->is_array()) continue;
      for (const auto& ring_json : *poly) {
        auto ring = ring_from_json(ring_json);
        if (!ring) {
          bump(out.diagnostics, "polygons.skipped.degenerate_ring");
          continue;
        }
        out.value[*country].push_back(std::move(*ring));
        ++accepted;
      }
    }
    if (accepted > 0) bump(out.diagnostics, "polygons.parsed");
  }
  return out;
}

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input: " + path);
  return in;
}

}  // namespace

SidecarBundle load_sidecars(const SidecarPaths& paths, Counters& diagnostics) {
  SidecarBundle bundle;
  if (!paths.nodes.empty()) {
    auto in = open_or_throw(paths.nodes);
    auto parsed = parse_alias_nodes(in);
    bundle.alias_map = std::move(parsed.value);
    merge_counters(diagnostics, parsed.diagnostics);
  }
  if (!paths.nodes_as.empty()) {
    auto in = open_or_throw(paths.nodes_as);
    auto parsed = parse_router_asn(in);
    bundle.router_asn = std::move(parsed.value);
    merge_counters(diagnostics, parsed.diagnostics);
  }
  if (!paths.nodes_geo.empty()) {
    auto in = open_or_throw(paths.nodes_geo);
    auto parsed = parse_router_geo(in);
    bundle.router_geo = std::move(parsed.value);
    merge_counters(diagnostics, parsed.diagnostics);
  }
  if (!paths.as_rel.empty()) {
    auto in = open_or_throw(paths.as_rel);
    auto parsed = parse_as_rel(in);
    bundle.as_rel = std::move(parsed.value);
    merge_counters(diagnostics, parsed.diagnostics);
  }
  if (!paths.ixp_addrs.empty()) {
    auto in = open_or_throw(paths.ixp_addrs);
    auto parsed = parse_ixp_addrs(in);
    bundle.ixp_addrs = std::move(parsed.value);
    merge_counters(diagnostics, parsed.diagnostics);
  }
  if (!paths.country_continent.empty()) {
    auto in = open_or_throw(paths.country_continent);
    auto parsed = parse_country_continent(in);
    bundle.country_continent = std::move(parsed.value);
    merge_counters(diagnostics, parsed.diagnostics);
  }
  if (!paths.facilities.empty()) {
    auto in = open_or_throw(paths.facilities);
    auto parsed = parse_facilities(in);
    bundle.facility_locations = std::move(parsed.value);
    merge_counters(diagnostics, parsed.diagnostics);
  }
  if (!paths.polygons.empty()) {
    auto in = open_or_throw(paths.polygons);
    auto parsed = parse_country_polygons(in);
    bundle.country_polygons = std::move(parsed.value);
    merge_counters(diagnostics, parsed.diagnostics);
  }
  return bundle;
}

}  // namespace ingest
}  // namespace lhl
