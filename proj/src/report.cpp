#include "lhl/report.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lhl/util.hpp"

namespace lhl {
namespace report {

using nlohmann::json;

std::string trace_to_jsonl(const Traceroute& trace) {
  json j;
  j["monitor"] = trace.monitor_id;
  j["cycle"] = trace.cycle_id;
  j["dst"] = trace.dst;
  json hops = json::array();
  for (const Hop& hop : trace.hops) {
    json h;
    h["i"] = hop.index;
    h["addr"] = hop.address;
    h["rtt"] = hop.rtt_ms;
    h["mpls"] = hop.mpls_labels;
    hops.push_back(std::move(h));
  }
  j["hops"] = std::move(hops);
  return j.dump();
}

std::string link_to_csv_row(const LongHaulLink& link) {
  std::ostringstream out;
  out << link.pair.near_router << ',' << link.pair.far_router << ','
      << format_double(link.pair.min_diff_ms) << ',' << link.pair.sample_count << ','
      << link.near_geo.country << ',' << link.far_geo.country << ',' << link.near_geo.continent
      << ',' << link.far_geo.continent << ','
      << (link.near_asn ? std::to_string(*link.near_asn) : std::string()) << ','
      << (link.far_asn ? std::to_string(*link.far_asn) : std::string()) << ','
      << (link.mpls_visible ? '1' : '0') << ',' << to_string(link.relationship) << ','
      << format_double(link.near_geo.lat) << ',' << format_double(link.near_geo.lon) << ','
      << format_double(link.far_geo.lat) << ',' << format_double(link.far_geo.lon);
  return out.str();
}

LongHaulLink link_from_csv_row(const std::string& row) {
  const auto fields = split_char(row, ',');
  if (fields.size() != 16) throw std::runtime_error("link row does not have 16 fields: " + row);
  LongHaulLink link;
  link.pair.near_router = fields[0];
  link.pair.far_router = fields[1];
  const auto min_diff = parse_double(fields[2]);
  const auto samples = parse_int(fields[3]);
  if (!min_diff || !samples || *samples < 1) {
    throw std::runtime_error("bad numeric field in link row: " + row);
  }
  link.pair.min_diff_ms = *min_diff;
  link.pair.sample_count = static_cast<std::uint64_t>(*samples);
  link.near_geo.country = fields[4];
  link.far_geo.country = fields[5];
  link.near_geo.continent = fields[6];
  link.far_geo.continent = fields[7];
  if (!fields[8].empty()) {
    const auto asn = parse_int(fields[8]);
    if (!asn) throw std::runtime_error("bad near_asn in link row: " + row);
    link.near_asn = static_cast<std::uint32_t>(*asn);
  }
  if (!fields[9].empty()) {
    const auto asn = parse_int(fields[9]);
    if (!asn) throw std::runtime_error("bad far_asn in link row: " + row);
    link.far_asn = static_cast<std::uint32_t>(*asn);
  }
  link.mpls_visible = fields[10] == "1";
  const auto rel = relationship_from_string(fields[11]);
  if (!rel) throw std::runtime_error("bad relationship in link row: " + row);
  link.relationship = *rel;
  const auto near_lat = parse_double(fields[12]);
  const auto near_lon = parse_double(fields[13]);
  const auto far_lat = parse_double(fields[14]);
  const auto far_lon = parse_double(fields[15]);
  if (!near_lat || !near_lon || !far_lat || !far_lon) {
    throw std::runtime_error("bad coordinates in link row: " + row);
  }
  link.near_geo.lat = *near_lat;
  link.near_geo.lon = *near_lon;
  link.far_geo.lat = *far_lat;
  link.far_geo.lon = *far_lon;
  return link;
}

void write_links_csv(std::ostream& out, const std::vector<LongHaulLink>& links) {
  out << kLinkCsvHeader << '\n';
  for (const LongHaulLink& link : links) out << link_to_csv_row(link) << '\n';
}

std::vector<LongHaulLink> read_links_csv(std::istream& in) {
  std::vector<LongHaulLink> links;
  std::string line;
  if (!std::getline(in, line)) return links;
  if (trim(line) != kLinkCsvHeader) throw std::runtime_error("unexpected link CSV header");
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    links.push_back(link_from_csv_row(line));
  }
  return links;
}

std::vector<LongHaulLink> read_links_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open links CSV: " + path);
  return read_links_csv(in);
}

namespace {

json candidate_to_json(const CandidateLink& c) {
  json j;
  j["near"] = c.near_ip;
  j["far"] = c.far_ip;
  j["idx"] = c.near_index;
  j["diff"] = c.rtt_diff_ms;
  j["monitor"] = c.trace_ref.monitor;
  j["cycle"] = c.trace_ref.cycle;
  j["dst"] = c.trace_ref.dst;
  j["far_mpls"] = c.far_mpls_labels;
  return j;
}

std::optional<CandidateLink> candidate_from_json(const json& j) {
  if (!j.is_object()) return std::nullopt;
  CandidateLink c;
  try {
    c.near_ip = j.at("near").get<std::string>();
    c.far_ip = j.at("far").get<std::string>();
    c.near_index = j.at("idx").get<int>();
    c.rtt_diff_ms = j.at("diff").get<double>();
    c.trace_ref.monitor = j.at("monitor").get<std::string>();
    c.trace_ref.cycle = j.at("cycle").get<std::string>();
    c.trace_ref.dst = j.at("dst").get<std::string>();
    c.far_mpls_labels = j.at("far_mpls").get<int>();
  } catch (const json::exception&) {
    return std::nullopt;
  }
  return c;
}

}  // namespace

void write_candidates_file(const std::string& path, const std::vector<CandidateLink>& candidates,
                           const std::string& digest) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write candidates file: " + path);
  json header;
  header["kind"] = "candidates";
  header["digest"] = digest;
  header["count"] = candidates.size();
  out << header.dump() << '\n';
  for (const CandidateLink& c : candidates) out << candidate_to_json(c).dump() << '\n';
}

std::optional<std::vector<CandidateLink>> read_candidates_file(const std::string& path,
                                                               const std::string& digest) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || header.value("kind", "") != "candidates" ||
      header.value("digest", "") != digest) {
    return std::nullopt;
  }
  std::vector<CandidateLink> out;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    auto c = j.is_discarded() ? std::nullopt : candidate_from_json(j);
    if (!c) return std::nullopt;  // corrupt cache is recomputed, never trusted
    out.push_back(std::move(*c));
  }
  return out;
}

void write_csv_file(const std::string& path, const std::string& header,
                    const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace report
}  // namespace lhl
