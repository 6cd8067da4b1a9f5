// Synthetic world and traceroute corpus with planted ground truth: known
// intercontinental links, intra-continental decoys, speed-of-light
// violators, transient congestion spikes and plain paths. Written to disk
// in the toolkit's input formats so tests drive the real pipeline.
#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lhl/core.hpp"
#include "lhl/pipeline.hpp"
#include "lhl/report.hpp"

namespace synthetic {

namespace fs = std::filesystem;

struct CorpusSpec {
  std::size_t planted = 100;       // intercontinental pairs (2 traces each)
  std::size_t intra = 200;         // same-continent jump decoys
  std::size_t sol = 100;           // speed-of-light violating jumps
  std::size_t noise = 1000;        // transient congestion spikes
  std::size_t plain = 3600;        // unremarkable paths
  std::uint64_t seed = 20220401;
};

struct GroundTruth {
  std::set<std::string> planted_pairs;  // canonical "a|b" router pair keys
  std::set<std::string> intra_pairs;
  std::set<std::string> sol_pairs;
  std::map<std::string, lhl::Relationship> expected_relationship;
  std::map<std::string, bool> expected_mpls;
};

inline std::string pair_key(const std::string& a, const std::string& b) {
  return a <= b ? a + "|" + b : b + "|" + a;
}

class World {
 public:
  explicit World(const std::string& dir) : dir_(dir) { fs::create_directories(dir); }

  std::string dir() const { return dir_; }
  std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

  // Writes the corpus plus every sidecar and returns the planted truth.
  GroundTruth write(const CorpusSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    GroundTruth truth;
    std::vector<lhl::Traceroute> traces;
    std::vector<std::string> nodes_lines;
    std::vector<std::string> as_lines;
    std::vector<std::string> geo_lines;
    std::vector<std::string> rel_lines;
    std::vector<std::string> ixp_lines;

    auto geo_line = [&](const std::string& router, const char* continent, const char* country,
                        double lat, double lon) {
      geo_lines.push_back("node.geo " + router + ": " + continent + " " + country + " r c " +
                          lhl::format_double(lat) + " " + lhl::format_double(lon));
    };
    auto in_box = [&](double lat_lo, double lat_hi, double lon_lo, double lon_hi) {
      std::uniform_real_distribution<double> lat(lat_lo, lat_hi);
      std::uniform_real_distribution<double> lon(lon_lo, lon_hi);
      return std::make_pair(lat(rng), lon(rng));
    };

    // Planted intercontinental pairs: near in XA (NA), far in XE (EU).
    for (std::size_t i = 0; i < spec.planted; ++i) {
      const std::string near_router = "N" + std::to_string(10000 + i);
      const std::string far_router = "N" + std::to_string(20000 + i);
      const std::string near_ip = block_ip(20, i);
      const std::string far_ip = block_ip(21, i);
      const double delta = 62.0 + static_cast<double>(i % 79);
      const bool mpls = i % 4 == 0;
      const std::string key = pair_key(near_router, far_router);
      truth.planted_pairs.insert(key);
      truth.expected_mpls[key] = mpls;

      std::string near_alias_line = "node " + near_router + ": " + near_ip;
      std::string second_near_ip;
      if (i % 10 == 0) {  // a second interface on the near router
        second_near_ip = block_ip(22, i);
        near_alias_line += " " + second_near_ip;
      }
      nodes_lines.push_back(near_alias_line);
      nodes_lines.push_back("node " + far_router + ": " + far_ip);

      auto [nlat, nlon] = in_box(40, 45, -75, -70);
      auto [flat, flon] = in_box(45, 50, -10, 0);
      geo_line(near_router, "NA", "XA", nlat, nlon);
      geo_line(far_router, "EU", "XE", flat, flon);

      // Relationship classes cycle through every category.
      const auto asn = static_cast<std::uint32_t>(i);
      switch (i % 6) {
        case 0:
          as_lines.push_back("node.AS " + near_router + " " + std::to_string(1000 + asn));
          as_lines.push_back("node.AS " + far_router + " " + std::to_string(1000 + asn));
          truth.expected_relationship[key] = lhl::Relationship::intra_domain;
          break;
        case 1:
          as_lines.push_back("node.AS " + near_router + " " + std::to_string(20000 + asn));
          as_lines.push_back("node.AS " + far_router + " " + std::to_string(30000 + asn));
          rel_lines.push_back(std::to_string(20000 + asn) + "|" + std::to_string(30000 + asn) +
                              "|-1");
          truth.expected_relationship[key] = lhl::Relationship::p2c;
          break;
        case 2:
          as_lines.push_back("node.AS " + near_router + " " + std::to_string(40000 + asn));
          as_lines.push_back("node.AS " + far_router + " " + std::to_string(50000 + asn));
          rel_lines.push_back(std::to_string(40000 + asn) + "|" + std::to_string(50000 + asn) +
                              "|0");
          truth.expected_relationship[key] = lhl::Relationship::p2p;
          break;
        case 3:
          as_lines.push_back("node.AS " + near_router + " " + std::to_string(60000 + asn));
          as_lines.push_back("node.AS " + far_router + " " + std::to_string(70000 + asn));
          ixp_lines.push_back(far_ip);
          truth.expected_relationship[key] = lhl::Relationship::ixp;
          break;
        case 4:
          as_lines.push_back("node.AS " + near_router + " " + std::to_string(80000 + asn));
          as_lines.push_back("node.AS " + far_router + " " + std::to_string(90000 + asn));
          truth.expected_relationship[key] = lhl::Relationship::unknown;
          break;
        default:
          as_lines.push_back("node.AS " + far_router + " " + std::to_string(99000 + asn));
          truth.expected_relationship[key] = lhl::Relationship::unmapped;
          break;
      }

      for (int support = 0; support < 2; ++support) {
        const std::string& use_near =
            (support == 1 && !second_near_ip.empty()) ? second_near_ip : near_ip;
        traces.push_back(jump_trace(rng, use_near, far_ip, delta, mpls && support == 0 ? 2 : 0));
      }
    }

    // Intra-continental decoys: XA to XB, both NA.
    for (std::size_t j = 0; j < spec.intra; ++j) {
      const std::string near_router = "N" + std::to_string(30000 + j);
      const std::string far_router = "N" + std::to_string(40000 + j);
      const std::string near_ip = block_ip(23, j);
      const std::string far_ip = block_ip(24, j);
      truth.intra_pairs.insert(pair_key(near_router, far_router));
      nodes_lines.push_back("node " + near_router + ": " + near_ip);
      nodes_lines.push_back("node " + far_router + ": " + far_ip);
      auto [nlat, nlon] = in_box(40, 45, -75, -70);
      auto [flat, flon] = in_box(40, 45, -69, -64);
      geo_line(near_router, "NA", "XA", nlat, nlon);
      geo_line(far_router, "NA", "XB", flat, flon);
      traces.push_back(jump_trace(rng, near_ip, far_ip, 60.0 + static_cast<double>(j % 60), 0));
    }

    // Speed-of-light violators: XA to XS at RTTs far too small for ~10500km.
    for (std::size_t k = 0; k < spec.sol; ++k) {
      const std::string near_router = "N" + std::to_string(50000 + k);
      const std::string far_router = "N" + std::to_string(60000 + k);
      const std::string near_ip = block_ip(25, k);
      const std::string far_ip = block_ip(26, k);
      truth.sol_pairs.insert(pair_key(near_router, far_router));
      nodes_lines.push_back("node " + near_router + ": " + near_ip);
      nodes_lines.push_back("node " + far_router + ": " + far_ip);
      auto [nlat, nlon] = in_box(40, 45, -75, -70);
      auto [flat, flon] = in_box(30, 40, 100, 110);
      geo_line(near_router, "NA", "XA", nlat, nlon);
      geo_line(far_router, "AS", "XS", flat, flon);
      traces.push_back(jump_trace(rng, near_ip, far_ip, 60.0 + static_cast<double>(k % 40), 0));
    }

    for (std::size_t n = 0; n < spec.noise; ++n) traces.push_back(spike_trace(rng));
    for (std::size_t n = 0; n < spec.plain; ++n) traces.push_back(plain_trace(rng));

    std::shuffle(traces.begin(), traces.end(), rng);
    for (std::size_t i = 0; i < traces.size(); ++i) {
      traces[i].dst = unique_dst(i);
      traces[i].monitor_id = "mon" + std::to_string(i % 5);
      traces[i].cycle_id = "c1";
    }

    {
      std::ofstream out(path("traceroutes.jsonl"));
      for (const auto& trace : traces) out << lhl::report::trace_to_jsonl(trace) << "\n";
    }
    write_lines("nodes.txt", nodes_lines);
    write_lines("nodes_as.txt", as_lines);
    write_lines("nodes_geo.txt", geo_lines);
    write_lines("as_rel.txt", rel_lines);
    write_lines("ixp.txt", ixp_lines);
    {
      std::ofstream out(path("country_continent.csv"));
      out << "country,continent\nXA,NA\nXB,NA\nXE,EU\nXF,EU\nXS,AS\n";
    }
    {
      std::ofstream out(path("polygons.geojson"));
      out << polygons_geojson();
    }
    return truth;
  }

  lhl::pipeline::PipelineConfig config(const std::string& out_dir) const {
    lhl::pipeline::PipelineConfig c;
    c.snapshot = "synthetic";
    c.traceroutes = path("traceroutes.jsonl");
    c.sidecars.nodes = path("nodes.txt");
    c.sidecars.nodes_as = path("nodes_as.txt");
    c.sidecars.nodes_geo = path("nodes_geo.txt");
    c.sidecars.as_rel = path("as_rel.txt");
    c.sidecars.ixp_addrs = path("ixp.txt");
    c.sidecars.country_continent = path("country_continent.csv");
    c.sidecars.polygons = path("polygons.geojson");
    c.out_dir = out_dir;
    return c;
  }

 private:
  std::string dir_;
  std::uint64_t base_counter_ = 0;

  static std::string block_ip(int block, std::size_t i) {
    return "172." + std::to_string(block) + "." + std::to_string(i / 200) + "." +
           std::to_string(i % 200 + 1);
  }

  static std::string unique_dst(std::size_t i) {
    return "198." + std::to_string(i / 62500 % 250 + 1) + "." + std::to_string(i / 250 % 250) +
           "." + std::to_string(i % 250 + 1);
  }

  std::string next_base_ip() {
    const std::uint64_t c = base_counter_++;
    return "10." + std::to_string(c / 62500 % 250 + 1) + "." + std::to_string(c / 250 % 250) +
           "." + std::to_string(c % 250 + 1);
  }

  lhl::Hop make_hop(std::mt19937_64& rng, int index, const std::string& addr, double value,
                    int mpls) {
    std::uniform_int_distribution<int> extra(0, 2);
    std::uniform_real_distribution<double> above(0.1, 2.0);
    lhl::Hop hop;
    hop.index = index;
    hop.address = addr;
    hop.mpls_labels = mpls;
    hop.rtt_ms.push_back(value);
    const int extras = extra(rng);
    for (int e = 0; e < extras; ++e) hop.rtt_ms.push_back(value + above(rng));
    return hop;
  }

  // A path whose level jumps by `delta` between two given addresses and
  // stays there; every hop responsive.
  lhl::Traceroute jump_trace(std::mt19937_64& rng, const std::string& near_ip,
                             const std::string& far_ip, double delta, int far_mpls) {
    std::uniform_int_distribution<int> length(10, 14);
    std::uniform_real_distribution<double> start(1.0, 4.0);
    std::uniform_real_distribution<double> step(0.3, 1.8);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    const int m = length(rng);
    std::uniform_int_distribution<int> position(2, m - 3);
    const int p = position(rng);
    lhl::Traceroute trace;
    double level = start(rng);
    for (int h = 0; h < m; ++h) {
      std::string addr;
      int mpls = 0;
      if (h == p) {
        addr = near_ip;
      } else if (h == p + 1) {
        level += delta + jitter(rng);
        addr = far_ip;
        mpls = far_mpls;
      } else {
        addr = next_base_ip();
      }
      trace.hops.push_back(make_hop(rng, h, addr, level, mpls));
      level += step(rng);
    }
    return trace;
  }

  // Transient congestion: a spike of one or two hops that reverts.
  lhl::Traceroute spike_trace(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> length(9, 13);
    std::uniform_real_distribution<double> start(1.0, 4.0);
    std::uniform_real_distribution<double> step(0.3, 1.8);
    std::uniform_real_distribution<double> spike(60.0, 120.0);
    std::uniform_int_distribution<int> spike_len(1, 2);
    const int m = length(rng);
    std::uniform_int_distribution<int> position(2, m - 3);
    const int q = position(rng);
    const int ql = spike_len(rng);
    const double s = spike(rng);
    lhl::Traceroute trace;
    double level = start(rng);
    for (int h = 0; h < m; ++h) {
      const double value = (h >= q && h < q + ql) ? level + s : level;
      trace.hops.push_back(make_hop(rng, h, next_base_ip(), value, 0));
      level += step(rng);
    }
    return trace;
  }

  lhl::Traceroute plain_trace(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> length(3, 14);
    std::uniform_real_distribution<double> start(1.0, 4.0);
    std::uniform_real_distribution<double> step(0.3, 1.8);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const int m = length(rng);
    lhl::Traceroute trace;
    double level = start(rng);
    const bool with_gap = m >= 6 && coin(rng) < 0.2;
    std::uniform_int_distribution<int> gap_pos(1, std::max(1, m - 2));
    const int gap = with_gap ? gap_pos(rng) : -1;
    for (int h = 0; h < m; ++h) {
      if (h == gap) {
        lhl::Hop hop;
        hop.index = h;
        hop.address = lhl::kUnresponsive;
        trace.hops.push_back(hop);
      } else {
        trace.hops.push_back(make_hop(rng, h, next_base_ip(), level, 0));
      }
      level += step(rng);
    }
    return trace;
  }

  void write_lines(const std::string& name, const std::vector<std::string>& lines) {
    std::ofstream out(path(name));
    out << "# generated fixture\n";
    for (const auto& line : lines) out << line << "\n";
  }

  static std::string polygons_geojson() {
    auto box = [](const char* code, double lat_lo, double lat_hi, double lon_lo, double lon_hi) {
      std::string ring = "[[" + std::to_string(lon_lo) + "," + std::to_string(lat_lo) + "],[" +
                         std::to_string(lon_hi) + "," + std::to_string(lat_lo) + "],[" +
                         std::to_string(lon_hi) + "," + std::to_string(lat_hi) + "],[" +
                         std::to_string(lon_lo) + "," + std::to_string(lat_hi) + "],[" +
                         std::to_string(lon_lo) + "," + std::to_string(lat_lo) + "]]";
      return std::string("{\"type\":\"Feature\",\"properties\":{\"ISO_A2\":\"") + code +
             "\"},\"geometry\":{\"type\":\"Polygon\",\"coordinates\":[" + ring + "]}}";
    };
    std::string features = box("XA", 40, 45, -75, -70) + "," + box("XB", 40, 45, -69, -64) + "," +
                           box("XE", 45, 50, -10, 0) + "," + box("XF", 45, 50, 1, 8) + "," +
                           box("XS", 30, 40, 100, 110);
    return "{\"type\":\"FeatureCollection\",\"features\":[" + features + "]}\n";
  }
};

}  // namespace synthetic
