#include "lhl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "lhl/powerlaw.hpp"
#include "lhl/report.hpp"

namespace lhl {
namespace pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  c.snapshot = j.value("snapshot", c.snapshot);
  c.traceroutes = j.value("traceroutes", c.traceroutes);
  if (j.contains("sidecars") && j["sidecars"].is_object()) {
    const auto& s = j["sidecars"];
    c.sidecars.nodes = s.value("nodes", "");
    c.sidecars.nodes_as = s.value("nodes_as", "");
    c.sidecars.nodes_geo = s.value("nodes_geo", "");
    c.sidecars.as_rel = s.value("as_rel", "");
    c.sidecars.ixp_addrs = s.value("ixp_addrs", "");
    c.sidecars.country_continent = s.value("country_continent", "");
    c.sidecars.facilities = s.value("facilities", "");
    c.sidecars.polygons = s.value("polygons", "");
  }
  c.threshold_ms = j.value("threshold_ms", c.threshold_ms);
  if (j.contains("detector") && j["detector"].is_object()) {
    c.detector.window = j["detector"].value("window", c.detector.window);
    c.detector.c = j["detector"].value("c", c.detector.c);
  }
  c.sample_fraction = j.value("sample_fraction", c.sample_fraction);
  c.seed = j.value("seed", c.seed);
  c.densify_km = j.value("densify_km", c.densify_km);
  c.min_countries = j.value("min_countries", c.min_countries);
  c.powerlaw_bootstrap = j.value("powerlaw_bootstrap", c.powerlaw_bootstrap);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.jobs = j.value("jobs", c.jobs);
  c.distance_cache = j.value("distance_cache", c.distance_cache);
  return c;
}

PipelineConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw std::runtime_error("config is not a JSON object: " + path);
  }
  return config_from_json(j);
}

json config_to_json(const PipelineConfig& c) {
  json j;
  j["snapshot"] = c.snapshot;
  j["traceroutes"] = c.traceroutes;
  j["sidecars"] = {{"nodes", c.sidecars.nodes},
                   {"nodes_as", c.sidecars.nodes_as},
                   {"nodes_geo", c.sidecars.nodes_geo},
                   {"as_rel", c.sidecars.as_rel},
                   {"ixp_addrs", c.sidecars.ixp_addrs},
                   {"country_continent", c.sidecars.country_continent},
                   {"facilities", c.sidecars.facilities},
                   {"polygons", c.sidecars.polygons}};
  j["threshold_ms"] = c.threshold_ms;
  j["detector"] = {{"window", c.detector.window}, {"c", c.detector.c}};
  j["sample_fraction"] = c.sample_fraction;
  j["seed"] = c.seed;
  j["densify_km"] = c.densify_km;
  j["min_countries"] = c.min_countries;
  j["powerlaw_bootstrap"] = c.powerlaw_bootstrap;
  return j;
}

std::string config_digest(const PipelineConfig& c) {
  std::ostringstream hex;
  hex << std::hex << fnv1a64(config_to_json(c).dump());
  return hex.str();
}

void validate_config(const PipelineConfig& c) {
  if (c.threshold_ms <= 0) throw std::invalid_argument("threshold_ms must be positive");
  if (c.sample_fraction <= 0 || c.sample_fraction > 1.0) {
    throw std::invalid_argument("sample_fraction must lie in (0,1]");
  }
  if (!c.detector.valid()) throw std::invalid_argument("detector window/c out of range");
  if (c.densify_km <= 0) throw std::invalid_argument("densify_km must be positive");
  if (c.min_countries < 1) throw std::invalid_argument("min_countries must be at least 1");
  if (c.jobs < 1) throw std::invalid_argument("jobs must be at least 1");
  if (c.powerlaw_bootstrap < 0) throw std::invalid_argument("powerlaw_bootstrap must be >= 0");
  std::vector<std::string> paths = {c.traceroutes,
                                    c.sidecars.nodes,
                                    c.sidecars.nodes_as,
                                    c.sidecars.nodes_geo,
                                    c.sidecars.as_rel,
                                    c.sidecars.ixp_addrs,
                                    c.sidecars.country_continent,
                                    c.sidecars.facilities,
                                    c.sidecars.polygons};
  paths.erase(std::remove(paths.begin(), paths.end(), std::string()), paths.end());
  std::sort(paths.begin(), paths.end());
  if (std::adjacent_find(paths.begin(), paths.end()) != paths.end()) {
    throw std::invalid_argument("input paths must be distinct");
  }
}

std::vector<CandidateLink> detect_candidates(const std::vector<Traceroute>& traces,
                                             const detect::LevelShiftConfig& cfg, int jobs) {
  std::vector<std::vector<CandidateLink>> per_trace(traces.size());
  const std::size_t n = traces.size();
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) per_trace[i] = detect::extract_candidates(traces[i], cfg);
  } else {
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      if (lo >= hi) break;
      threads.emplace_back([&, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i) {
          per_trace[i] = detect::extract_candidates(traces[i], cfg);
        }
      });
    }
    for (auto& t : threads) t.join();
  }
  std::vector<CandidateLink> out;
  for (auto& cs : per_trace) {
    for (auto& c : cs) out.push_back(std::move(c));
  }
  return out;
}

namespace {

std::string candidates_digest(const PipelineConfig& config) {
  std::ostringstream key;
  key << fnv1a64_file(config.traceroutes) << '|' << config.detector.window << '|'
      << format_double(config.detector.c) << '|' << format_double(config.sample_fraction) << '|'
      << config.seed;
  std::ostringstream hex;
  hex << std::hex << fnv1a64(key.str());
  return hex.str();
}

geo::CountryDistanceTable load_or_build_distance_table(const PipelineConfig& config,
                                                       const ingest::SidecarBundle& sidecars) {
  if (config.sidecars.polygons.empty() || sidecars.country_polygons.empty()) {
    return geo::CountryDistanceTable{};
  }
  const std::uint64_t digest = fnv1a64_file(config.sidecars.polygons);
  const std::string cache = config.distance_cache.empty()
                                ? (fs::path(config.out_dir) / "country_distances.csv").string()
                                : config.distance_cache;
  if (auto cached = geo::CountryDistanceTable::load_csv(cache, digest)) {
    return std::move(*cached);
  }
  auto table = geo::CountryDistanceTable::build(sidecars.country_polygons, config.densify_km);
  table.save_csv(cache, digest);
  return table;
}

std::string sorted_pair_key(const std::string& a, const std::string& b) {
  return a <= b ? a + "|" + b : b + "|" + a;
}

std::vector<std::string> string_row(std::initializer_list<std::string> cells) { return cells; }

json powerlaw_to_json(const std::vector<std::uint64_t>& degrees, int bootstrap,
                      std::uint64_t seed) {
  powerlaw::FitOptions opts;
  opts.bootstrap_replicates = bootstrap;
  opts.seed = seed;
  try {
    const auto fit = powerlaw::fit_powerlaw(degrees, opts);
    json j;
    j["alpha"] = fit.alpha;
    j["xmin"] = fit.xmin;
    j["ks_distance"] = fit.ks_distance;
    j["loglik_ratio_vs_lognormal"] = fit.loglik_ratio_vs_lognormal;
    j["p_value_proxy"] = fit.p_value_proxy;
    j["tail_size"] = fit.tail_size;
    return j;
  } catch (const std::invalid_argument& e) {
    json j;
    j["error"] = e.what();
    return j;
  }
}

void emit_graph_reports(const PipelineConfig& config, const std::vector<LongHaulLink>& links,
                        Counters& counters, std::vector<std::string>& files) {
  for (const Granularity g :
       {Granularity::router, Granularity::as, Granularity::country}) {
    const std::string gname = to_string(g);
    const auto graph = lhnet::build_graph(links, g, &counters);
    const auto base = config.snapshot + "_" + gname + "_";
    const fs::path dir(config.out_dir);

    {
      std::vector<std::vector<std::string>> rows;
      for (const auto& [degree, count] : lhnet::degree_distribution(graph)) {
        rows.push_back(string_row({std::to_string(degree), std::to_string(count)}));
      }
      report::write_csv_file((dir / (base + "degree_distribution.csv")).string(), "degree,nodes",
                             rows);
      files.push_back(base + "degree_distribution.csv");
    }
    {
      std::vector<std::vector<std::string>> rows;
      for (const auto& [degree, p] : lhnet::ccdf(graph)) {
        rows.push_back(string_row({std::to_string(degree), format_double(p)}));
      }
      report::write_csv_file((dir / (base + "ccdf.csv")).string(), "degree,p_at_least", rows);
      files.push_back(base + "ccdf.csv");
    }

    const auto cores = lhnet::k_core(graph);
    {
      std::vector<std::vector<std::string>> rows;
      for (const auto& [node, shell] : cores.shell) {
        rows.push_back(string_row({node, std::to_string(shell),
                                   cores.top_core.count(node) ? "1" : "0"}));
      }
      report::write_csv_file((dir / (base + "kcore.csv")).string(), "node,shell,top_core", rows);
      files.push_back(base + "kcore.csv");
    }

    const auto components = lhnet::connected_components(graph);
    {
      std::vector<std::vector<std::string>> rows;
      rows.push_back(string_row({std::to_string(components.report.component_count),
                                 std::to_string(components.report.vertices),
                                 std::to_string(components.report.edges),
                                 std::to_string(components.report.max_component_vertices),
                                 std::to_string(components.report.max_component_edges)}));
      report::write_csv_file(
          (dir / (base + "components.csv")).string(),
          "components,vertices,edges,max_component_vertices,max_component_edges", rows);
      files.push_back(base + "components.csv");
    }

    std::vector<std::uint64_t> degree_sample;
    for (const auto& [node, degree] : graph.degrees()) degree_sample.push_back(degree);
    json summary;
    summary["granularity"] = gname;
    summary["vertices"] = graph.vertices.size();
    summary["simple_edges"] = graph.simple_edge_count();
    summary["self_loops"] = graph.self_loop_count();
    summary["components"] = {
        {"count", components.report.component_count},
        {"max_component_vertices", components.report.max_component_vertices},
        {"max_component_edges", components.report.max_component_edges}};
    summary["kcore"] = {{"max_shell", cores.max_shell},
                        {"top_core_size", cores.top_core.size()}};
    summary["powerlaw"] =
        powerlaw_to_json(degree_sample, config.powerlaw_bootstrap, config.seed + 1);
    report::write_text_file((dir / (base + "summary.json")).string(), summary.dump(2) + "\n");
    files.push_back(base + "summary.json");
  }
}

void emit_link_reports(const PipelineConfig& config, const std::vector<LongHaulLink>& links,
                       const filter::CoverageStats& coverage, std::vector<std::string>& files) {
  const fs::path dir(config.out_dir);
  const std::string base = config.snapshot + "_links_";
  const auto bundle = lhnet::tabulate(links);
  const auto total = static_cast<double>(bundle.total_links);

  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [key, count] : bundle.continent_matrix) {
      rows.push_back(string_row({key.first, key.second, std::to_string(count),
                                 format_double(total ? count / total : 0.0)}));
    }
    report::write_csv_file((dir / (base + "continent_matrix.csv")).string(),
                           "near_continent,far_continent,links,fraction", rows);
    files.push_back(base + "continent_matrix.csv");
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [region, counts] : bundle.destination_counts) {
      const auto top = lhnet::top_destinations(counts, 10);
      for (std::size_t rank = 0; rank < top.size(); ++rank) {
        rows.push_back(string_row({region, std::to_string(rank + 1), top[rank].first,
                                   std::to_string(top[rank].second)}));
      }
    }
    report::write_csv_file((dir / (base + "destinations.csv")).string(),
                           "region,rank,country,links", rows);
    files.push_back(base + "destinations.csv");
  }
  {
    std::uint64_t defined = 0;
    for (const auto& [axis, count] : bundle.compass_counts) defined += count;
    std::vector<std::vector<std::string>> rows;
    for (const auto& [axis, count] : bundle.compass_counts) {
      rows.push_back(string_row(
          {geo::to_string(axis), std::to_string(count),
           format_double(defined ? static_cast<double>(count) / defined : 0.0)}));
    }
    report::write_csv_file((dir / (base + "compass.csv")).string(), "axis,links,fraction", rows);
    files.push_back(base + "compass.csv");
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [rel, count] : bundle.relationship_counts) {
      rows.push_back(string_row({to_string(rel), std::to_string(count),
                                 format_double(total ? count / total : 0.0)}));
    }
    report::write_csv_file((dir / (base + "relationships.csv")).string(),
                           "relationship,links,fraction", rows);
    files.push_back(base + "relationships.csv");
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [ms, p] : bundle.latency_cdf) {
      rows.push_back(string_row({format_double(ms), format_double(p)}));
    }
    report::write_csv_file((dir / (base + "latency_cdf.csv")).string(), "min_diff_ms,p_at_most",
                           rows);
    files.push_back(base + "latency_cdf.csv");
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [key, values] : bundle.latency_by_continent_pair) {
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
        rows.push_back(string_row(
            {key.first, key.second, format_double(values[i]),
             format_double(static_cast<double>(i + 1) / static_cast<double>(values.size()))}));
      }
    }
    report::write_csv_file((dir / (base + "latency_cdf_by_continent_pair.csv")).string(),
                           "continent_a,continent_b,min_diff_ms,p_at_most", rows);
    files.push_back(base + "latency_cdf_by_continent_pair.csv");
  }

  auto emit_mpls = [&](const std::string& level, const std::vector<lhnet::MplsAdoptionRow>& rows) {
    const auto cdf = lhnet::mpls_weighted_cdf(rows);
    // Rows in adoption order so the cumulative weight column is the CDF.
    std::vector<std::pair<double, const lhnet::MplsAdoptionRow*>> order;
    double total_weight = 0;
    for (const auto& row : rows) {
      order.push_back({row.adoption(), &row});
      total_weight += static_cast<double>(row.total_links);
    }
    std::sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first < y.first;
      return std::tie(x.second->a, x.second->b) < std::tie(y.second->a, y.second->b);
    });
    double cum = 0;
    std::vector<std::vector<std::string>> out_rows;
    for (const auto& [adoption, row] : order) {
      cum += static_cast<double>(row->total_links);
      out_rows.push_back(string_row({row->a, row->b, std::to_string(row->total_links),
                                     std::to_string(row->mpls_links), format_double(adoption),
                                     format_double(total_weight ? cum / total_weight : 0.0)}));
    }
    report::write_csv_file((dir / (base + "mpls_adoption_" + level + ".csv")).string(),
                           "a,b,links,mpls_links,adoption,cum_weight_fraction", out_rows);
    files.push_back(base + "mpls_adoption_" + level + ".csv");
    return cdf.weighted_mean;
  };
  const double mean_country = emit_mpls("country", bundle.mpls_country);
  const double mean_continent = emit_mpls("continent", bundle.mpls_continent);
  const double mean_as = emit_mpls("as", bundle.mpls_as);

  {
    const auto router_graph = lhnet::build_graph(links, Granularity::router);
    const auto rows = lhnet::super_routers(router_graph, links, config.min_countries);
    std::vector<std::vector<std::string>> out_rows;
    for (const auto& row : rows) {
      std::string countries;
      for (const auto& c : row.countries) {
        if (!countries.empty()) countries += ';';
        countries += c;
      }
      out_rows.push_back(string_row(
          {row.router, std::to_string(row.degree), std::to_string(row.countries.size()),
           countries, row.asn ? std::to_string(*row.asn) : std::string(), row.location.country,
           format_double(row.location.lat), format_double(row.location.lon)}));
    }
    report::write_csv_file((dir / (config.snapshot + "_router_super_routers.csv")).string(),
                           "router,degree,country_count,countries,asn,country,lat,lon", out_rows);
    files.push_back(config.snapshot + "_router_super_routers.csv");
  }

  json summary;
  summary["links"] = bundle.total_links;
  summary["mpls_links"] = [&] {
    std::uint64_t n = 0;
    for (const auto& link : links) n += link.mpls_visible ? 1 : 0;
    return n;
  }();
  summary["compass_undefined"] = bundle.compass_undefined;
  summary["mpls_weighted_mean_adoption"] = {
      {"country", mean_country}, {"continent", mean_continent}, {"as", mean_as}};
  summary["mpls_as_unmapped_links"] = bundle.mpls_as_unmapped_links;
  summary["coverage"] = {{"routers", coverage.routers},
                         {"geolocated_fraction", coverage.geolocated_fraction()},
                         {"as_mapped_fraction", coverage.as_mapped_fraction()}};
  report::write_text_file((fs::path(config.out_dir) / (base + "summary.json")).string(),
                          summary.dump(2) + "\n");
  files.push_back(base + "summary.json");
}

}  // namespace

RunResult run(const PipelineConfig& config) {
  validate_config(config);
  if (config.traceroutes.empty()) throw std::invalid_argument("traceroutes path is required");
  fs::create_directories(config.out_dir);

  RunResult result;
  auto& counters = result.counters;

  std::ifstream trace_stream(config.traceroutes);
  if (!trace_stream) throw std::runtime_error("cannot open traceroutes: " + config.traceroutes);
  auto parsed = ingest::parse_traceroutes(trace_stream);
  merge_counters(counters, parsed.diagnostics);
  result.stages.emplace_back("traceroutes", parsed.value.size());

  std::vector<Traceroute> sampled;
  sampled.reserve(parsed.value.size());
  for (auto& trace : parsed.value) {
    if (detect::keep_in_sample(trace, config.sample_fraction, config.seed)) {
      sampled.push_back(std::move(trace));
    }
  }
  result.stages.emplace_back("sampled", sampled.size());

  const std::string cache_digest = candidates_digest(config);
  const std::string cache_path =
      (fs::path(config.out_dir) / (config.snapshot + "_candidates.jsonl")).string();
  std::vector<CandidateLink> candidates;
  if (auto cached = report::read_candidates_file(cache_path, cache_digest)) {
    candidates = std::move(*cached);
    bump(counters, "detect.cache_hit");
  } else {
    candidates = detect_candidates(sampled, config.detector, config.jobs);
  }
  report::write_candidates_file(cache_path, candidates, cache_digest);
  result.files.push_back(config.snapshot + "_candidates.jsonl");
  result.stages.emplace_back("candidates", candidates.size());

  ingest::SidecarBundle sidecars = ingest::load_sidecars(config.sidecars, counters);
  const auto table = load_or_build_distance_table(config, sidecars);

  auto pairs = filter::aggregate_router_pairs(candidates, sidecars.alias_map, counters);
  result.stages.emplace_back("router_pairs", pairs.size());

  pairs = filter::apply_threshold(std::move(pairs), config.threshold_ms, counters);
  result.stages.emplace_back("threshold", pairs.size());

  result.coverage = filter::augment(pairs, sidecars, counters);

  pairs = filter::filter_intercontinental(std::move(pairs), counters);
  result.stages.emplace_back("intercontinental", pairs.size());

  pairs = filter::filter_sol(std::move(pairs), table, counters);
  result.stages.emplace_back("sol", pairs.size());

  result.links = filter::finalize_links(pairs, sidecars);

  {
    std::ofstream out(fs::path(config.out_dir) / (config.snapshot + "_links.csv"));
    if (!out) throw std::runtime_error("cannot write links CSV");
    report::write_links_csv(out, result.links);
    result.files.push_back(config.snapshot + "_links.csv");
  }
  emit_graph_reports(config, result.links, counters, result.files);
  emit_link_reports(config, result.links, result.coverage, result.files);

  json manifest;
  manifest["snapshot"] = config.snapshot;
  manifest["config"] = config_to_json(config);
  manifest["config_digest"] = config_digest(config);
  json inputs;
  for (const auto& [name, path] :
       std::initializer_list<std::pair<const char*, const std::string&>>{
           {"traceroutes", config.traceroutes},
           {"nodes", config.sidecars.nodes},
           {"nodes_as", config.sidecars.nodes_as},
           {"nodes_geo", config.sidecars.nodes_geo},
           {"as_rel", config.sidecars.as_rel},
           {"ixp_addrs", config.sidecars.ixp_addrs},
           {"country_continent", config.sidecars.country_continent},
           {"facilities", config.sidecars.facilities},
           {"polygons", config.sidecars.polygons}}) {
    if (!path.empty()) {
      std::ostringstream hex;
      hex << std::hex << fnv1a64_file(path);
      inputs[name] = hex.str();
    }
  }
  manifest["inputs"] = std::move(inputs);
  json stages = json::array();
  for (const auto& [name, count] : result.stages) stages.push_back({{"stage", name}, {"survivors", count}});
  manifest["stages"] = std::move(stages);
  manifest["counters"] = counters;
  manifest["links"] = result.links.size();
  manifest["coverage"] = {{"routers", result.coverage.routers},
                          {"geolocated_fraction", result.coverage.geolocated_fraction()},
                          {"as_mapped_fraction", result.coverage.as_mapped_fraction()}};
  manifest["files"] = result.files;
  result.manifest = manifest;
  report::write_text_file(
      (fs::path(config.out_dir) / (config.snapshot + "_manifest.json")).string(),
      manifest.dump(2) + "\n");
  return result;
}

namespace {

struct ChainEnvironment {
  std::vector<CandidateLink> candidates;
  ingest::SidecarBundle sidecars;
  geo::CountryDistanceTable table;
};

// Shared front half for the sensitivity analyses: parse, optionally sample,
// detect once, load sidecars.
ChainEnvironment prepare_environment(const PipelineConfig& config, double fraction) {
  validate_config(config);
  if (config.traceroutes.empty()) throw std::invalid_argument("traceroutes path is required");
  fs::create_directories(config.out_dir);
  ChainEnvironment env;
  std::ifstream trace_stream(config.traceroutes);
  if (!trace_stream) throw std::runtime_error("cannot open traceroutes: " + config.traceroutes);
  auto parsed = ingest::parse_traceroutes(trace_stream);
  std::vector<Traceroute> sampled;
  for (auto& trace : parsed.value) {
    if (detect::keep_in_sample(trace, fraction, config.seed)) {
      sampled.push_back(std::move(trace));
    }
  }
  env.candidates = detect_candidates(sampled, config.detector, config.jobs);
  Counters scratch;
  env.sidecars = ingest::load_sidecars(config.sidecars, scratch);
  env.table = load_or_build_distance_table(config, env.sidecars);
  return env;
}

struct GraphSize {
  std::uint64_t vertices = 0;
  std::uint64_t edges = 0;
};

GraphSize router_graph_size(const std::vector<LongHaulLink>& links) {
  const auto graph = lhnet::build_graph(links, Granularity::router);
  return GraphSize{graph.vertices.size(), graph.edges.size()};
}

std::vector<LongHaulLink> run_chain(const std::vector<CandidateLink>& candidates,
                                    const ChainEnvironment& env, double threshold_ms,
                                    bool apply_latency, bool apply_geo) {
  Counters scratch;
  auto pairs = filter::aggregate_router_pairs(candidates, env.sidecars.alias_map, scratch);
  if (apply_latency) pairs = filter::apply_threshold(std::move(pairs), threshold_ms, scratch);
  filter::augment(pairs, env.sidecars, scratch);
  if (apply_geo) {
    pairs = filter::filter_intercontinental(std::move(pairs), scratch);
    pairs = filter::filter_sol(std::move(pairs), env.table, scratch);
    return filter::finalize_links(pairs, env.sidecars);
  }
  // Latency-only survivors: geolocation may be absent, so links cannot be
  // finalized; synthesize bare links for counting and histograms.
  std::vector<LongHaulLink> links;
  links.reserve(pairs.size());
  for (const auto& p : pairs) {
    LongHaulLink link;
    link.pair = p.pair;
    if (p.near_geo) link.near_geo = *p.near_geo;
    if (p.far_geo) link.far_geo = *p.far_geo;
    link.near_asn = p.near_asn;
    link.far_asn = p.far_asn;
    links.push_back(std::move(link));
  }
  return links;
}

}  // namespace

std::vector<DownsampleRow> sensitivity_downsample(const PipelineConfig& config,
                                                  const std::vector<double>& fractions,
                                                  int repeats, std::uint64_t seed) {
  if (repeats < 1) throw std::invalid_argument("repeats must be at least 1");
  for (double f : fractions) {
    if (f <= 0 || f > 1.0) throw std::invalid_argument("fractions must lie in (0,1]");
  }
  const ChainEnvironment env = prepare_environment(config, 1.0);
  const auto baseline =
      router_graph_size(run_chain(env.candidates, env, config.threshold_ms, true, true));

  auto recall = [](std::uint64_t num, std::uint64_t den) {
    if (den == 0) return num == 0 ? 1.0 : 0.0;
    return static_cast<double>(num) / static_cast<double>(den);
  };

  std::vector<DownsampleRow> rows;
  for (double fraction : fractions) {
    double node_sum = 0;
    double edge_sum = 0;
    for (int rep = 0; rep < repeats; ++rep) {
      const std::uint64_t rep_seed = splitmix64(seed + 0x9e3779b97f4a7c15ULL * (rep + 1));
      std::vector<CandidateLink> subset;
      for (const auto& c : env.candidates) {
        if (detect::keep_in_sample(c.trace_ref, fraction, rep_seed)) subset.push_back(c);
      }
      const auto size = router_graph_size(run_chain(subset, env, config.threshold_ms, true, true));
      node_sum += recall(size.vertices, baseline.vertices);
      edge_sum += recall(size.edges, baseline.edges);
    }
    rows.push_back(DownsampleRow{fraction, node_sum / repeats, edge_sum / repeats});
  }
  return rows;
}

std::vector<ThresholdRow> sensitivity_threshold(const PipelineConfig& config,
                                                const std::vector<double>& thresholds) {
  for (double t : thresholds) {
    if (t <= 0) throw std::invalid_argument("thresholds must be positive");
  }
  const ChainEnvironment env = prepare_environment(config, config.sample_fraction);
  const auto baseline =
      router_graph_size(run_chain(env.candidates, env, config.threshold_ms, true, true));

  auto delta_pct = [](std::uint64_t value, std::uint64_t base) {
    if (base == 0) return 0.0;
    return 100.0 * (static_cast<double>(value) - static_cast<double>(base)) /
           static_cast<double>(base);
  };

  std::vector<ThresholdRow> rows;
  for (double t : thresholds) {
    const auto size = router_graph_size(run_chain(env.candidates, env, t, true, true));
    rows.push_back(ThresholdRow{t, size.vertices, size.edges,
                                delta_pct(size.vertices, baseline.vertices),
                                delta_pct(size.edges, baseline.edges)});
  }
  return rows;
}

double js_divergence(const std::vector<double>& hist_a, const std::vector<double>& hist_b) {
  if (hist_a.size() != hist_b.size()) {
    throw std::invalid_argument("histograms must share the same binning");
  }
  double sum_a = 0;
  double sum_b = 0;
  for (double v : hist_a) sum_a += v;
  for (double v : hist_b) sum_b += v;
  if (hist_a.empty() || sum_a <= 0 || sum_b <= 0) {
    throw std::invalid_argument("histograms must be non-empty");
  }
  double js = 0;
  for (std::size_t i = 0; i < hist_a.size(); ++i) {
    const double p = hist_a[i] / sum_a;
    const double q = hist_b[i] / sum_b;
    const double m = (p + q) / 2;
    if (p > 0) js += 0.5 * p * std::log2(p / m);
    if (q > 0) js += 0.5 * q * std::log2(q / m);
  }
  return js;
}

namespace {

std::vector<double> latency_histogram(const std::vector<LongHaulLink>& links,
                                      std::size_t bins, double width) {
  std::vector<double> hist(bins, 0.0);
  for (const auto& link : links) {
    auto idx = static_cast<std::size_t>(link.pair.min_diff_ms / width);
    if (idx >= bins) idx = bins - 1;
    hist[idx] += 1.0;
  }
  return hist;
}

double safe_js(const std::vector<double>& a, const std::vector<double>& b) {
  double sum_a = 0;
  double sum_b = 0;
  for (double v : a) sum_a += v;
  for (double v : b) sum_b += v;
  if (sum_a <= 0 && sum_b <= 0) return 0.0;
  if (sum_a <= 0 || sum_b <= 0) return 1.0;
  return js_divergence(a, b);
}

}  // namespace

FilterComparison compare_filters(const PipelineConfig& config) {
  const ChainEnvironment env = prepare_environment(config, config.sample_fraction);
  FilterComparison cmp;

  const auto full = run_chain(env.candidates, env, config.threshold_ms, true, true);
  const auto geo_only = run_chain(env.candidates, env, config.threshold_ms, false, true);
  const auto latency_only = run_chain(env.candidates, env, config.threshold_ms, true, false);

  double max_diff = 0;
  for (const auto* set : {&full, &geo_only, &latency_only}) {
    for (const auto& link : *set) max_diff = std::max(max_diff, link.pair.min_diff_ms);
  }
  const auto bins = static_cast<std::size_t>(std::floor(max_diff / cmp.bin_width_ms)) + 1;
  cmp.full_hist = latency_histogram(full, bins, cmp.bin_width_ms);
  cmp.geo_hist = latency_histogram(geo_only, bins, cmp.bin_width_ms);
  cmp.latency_hist = latency_histogram(latency_only, bins, cmp.bin_width_ms);

  auto keys = [](const std::vector<LongHaulLink>& links) {
    std::set<std::string> out;
    for (const auto& link : links) {
      out.insert(sorted_pair_key(link.pair.near_router, link.pair.far_router));
    }
    return out;
  };
  cmp.full_pairs = keys(full);
  cmp.geo_pairs = keys(geo_only);
  cmp.latency_pairs = keys(latency_only);

  cmp.js_full_vs_geo = safe_js(cmp.full_hist, cmp.geo_hist);
  cmp.js_full_vs_latency = safe_js(cmp.full_hist, cmp.latency_hist);
  cmp.js_geo_vs_latency = safe_js(cmp.geo_hist, cmp.latency_hist);
  return cmp;
}

std::vector<std::string> longitudinal(std::vector<Snapshot> snapshots,
                                      const LongitudinalOptions& options) {
  std::sort(snapshots.begin(), snapshots.end(),
            [](const Snapshot& a, const Snapshot& b) { return a.id < b.id; });
  fs::create_directories(options.out_dir);
  const fs::path dir(options.out_dir);
  std::vector<std::string> files;

  for (const Granularity g : {Granularity::router, Granularity::as, Granularity::country}) {
    const std::string gname = to_string(g);
    std::vector<LhNetGraph> graphs;
    graphs.reserve(snapshots.size());
    for (const auto& snap : snapshots) graphs.push_back(lhnet::build_graph(snap.links, g));

    {
      std::vector<std::vector<std::string>> rows;
      for (std::size_t i = 0; i < snapshots.size(); ++i) {
        const auto components = lhnet::connected_components(graphs[i]);
        rows.push_back(string_row({snapshots[i].id,
                                   std::to_string(components.report.component_count),
                                   std::to_string(components.report.vertices),
                                   std::to_string(components.report.edges),
                                   std::to_string(components.report.max_component_vertices),
                                   std::to_string(components.report.max_component_edges)}));
      }
      const std::string name = "longitudinal_" + gname + "_dimensions.csv";
      report::write_csv_file(
          (dir / name).string(),
          "snapshot,components,vertices,edges,max_component_vertices,max_component_edges", rows);
      files.push_back(name);
    }

    if (g == Granularity::router) continue;  // variation reports follow AS/country levels

    {
      std::vector<std::vector<std::string>> summary_rows;
      std::vector<std::vector<std::string>> cdf_rows;
      auto emit_variation = [&](std::size_t i, std::size_t j) {
        const auto var = lhnet::degree_variation(graphs[i], graphs[j]);
        summary_rows.push_back(string_row({snapshots[i].id, snapshots[j].id,
                                           format_double(var.mean),
                                           std::to_string(var.delta.size())}));
        for (const auto& [delta, p] : var.cdf) {
          cdf_rows.push_back(string_row({snapshots[i].id, snapshots[j].id,
                                         std::to_string(delta), format_double(p)}));
        }
      };
      for (std::size_t i = 0; i + 1 < snapshots.size(); ++i) emit_variation(i, i + 1);
      if (snapshots.size() > 2) emit_variation(0, snapshots.size() - 1);
      const std::string summary_name = "longitudinal_" + gname + "_degree_variation.csv";
      report::write_csv_file((dir / summary_name).string(), "from,to,mean_delta,nodes",
                             summary_rows);
      files.push_back(summary_name);
      const std::string cdf_name = "longitudinal_" + gname + "_degree_variation_cdf.csv";
      report::write_csv_file((dir / cdf_name).string(), "from,to,delta,p_at_most", cdf_rows);
      files.push_back(cdf_name);
    }

    {
      std::map<std::string, std::uint64_t> appearances;
      for (const auto& graph : graphs) {
        const auto cores = lhnet::k_core(graph);
        for (const auto& node : cores.top_core) ++appearances[node];
      }
      std::vector<std::vector<std::string>> rows;
      for (const auto& [node, count] : appearances) {
        rows.push_back(string_row(
            {node, std::to_string(count),
             count >= static_cast<std::uint64_t>(options.topcore_min_snapshots) ? "1" : "0"}));
      }
      const std::string name = "longitudinal_" + gname + "_topcore.csv";
      report::write_csv_file((dir / name).string(), "node,appearances,persistent", rows);
      files.push_back(name);
    }
  }

  if (snapshots.size() >= 2) {
    const auto rows =
        lhnet::as_latency_variation(snapshots.front().links, snapshots.back().links);
    std::vector<std::vector<std::string>> out_rows;
    for (const auto& row : rows) {
      out_rows.push_back(string_row(
          {std::to_string(row.asn), format_double(row.mean_t1), format_double(row.mean_t2),
           std::to_string(row.links_t1), std::to_string(row.links_t2),
           std::to_string(row.delta_links)}));
    }
    const std::string name = "longitudinal_as_latency_variation.csv";
    report::write_csv_file((dir / name).string(),
                           "asn,mean_first_ms,mean_last_ms,links_first,links_last,delta_links",
                           out_rows);
    files.push_back(name);
  }

  json summary;
  json ids = json::array();
  for (const auto& snap : snapshots) ids.push_back(snap.id);
  summary["snapshots"] = std::move(ids);
  summary["topcore_min_snapshots"] = options.topcore_min_snapshots;
  report::write_text_file((dir / "longitudinal_summary.json").string(), summary.dump(2) + "\n");
  files.push_back("longitudinal_summary.json");
  return files;
}

}  // namespace pipeline
}  // namespace lhl
