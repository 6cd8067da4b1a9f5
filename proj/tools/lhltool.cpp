// lhltool: batch identification of intercontinental long-haul links in
// traceroute corpora and graph analysis of the resulting long-haul network.
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lhl/geo.hpp"
#include "lhl/ingest.hpp"
#include "lhl/pipeline.hpp"
#include "lhl/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold_ms;
  std::optional<double> sample_fraction;
  std::optional<int> jobs;
  std::optional<std::string> out_dir;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool config_required = true) {
  auto* opt = cmd->add_option("--config", flags.config_path, "pipeline config JSON");
  if (config_required) opt->required();
  cmd->add_option("--seed", flags.seed, "override sampling seed");
  cmd->add_option("--threshold-ms", flags.threshold_ms, "override latency threshold (ms)");
  cmd->add_option("--sample-fraction", flags.sample_fraction, "override downsample fraction");
  cmd->add_option("--jobs", flags.jobs, "worker threads for detection");
  cmd->add_option("--out-dir", flags.out_dir, "output directory");
}

lhl::pipeline::PipelineConfig load_config(const CommonFlags& flags) {
  auto config = flags.config_path.empty() ? lhl::pipeline::PipelineConfig{}
                                          : lhl::pipeline::config_from_file(flags.config_path);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.threshold_ms) config.threshold_ms = *flags.threshold_ms;
  if (flags.sample_fraction) config.sample_fraction = *flags.sample_fraction;
  if (flags.jobs) config.jobs = *flags.jobs;
  if (flags.out_dir) config.out_dir = *flags.out_dir;
  return config;
}

std::vector<double> parse_number_list(const std::string& csv, const char* what) {
  std::vector<double> out;
  for (const auto& field : lhl::split_char(csv, ',')) {
    auto value = lhl::parse_double(field);
    if (!value) throw std::invalid_argument(std::string("bad ") + what + " list entry: " + field);
    out.push_back(*value);
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + " list is empty");
  return out;
}

int cmd_calibrate(const std::string& facilities_path, double quantile,
                  const std::string& out_dir) {
  std::ifstream in(facilities_path);
  if (!in) throw std::runtime_error("cannot open facilities: " + facilities_path);
  auto parsed = lhl::ingest::parse_facilities(in);
  const auto calibration = lhl::geo::calibrate_threshold(parsed.value, quantile);
  const double threshold_ms = lhl::geo::rtt_for_distance_ms(calibration.threshold_km);

  fs::create_directories(out_dir);
  auto write_hist = [&](const char* name, const std::vector<std::pair<double, double>>& samples) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [km, weight] : samples) {
      rows.push_back({lhl::format_double(km), lhl::format_double(weight)});
    }
    lhl::report::write_csv_file((fs::path(out_dir) / name).string(), "km,weight", rows);
  };
  write_hist("calibration_intra_continental.csv", calibration.intra_continental);
  write_hist("calibration_inter_continental.csv", calibration.inter_continental);

  json summary;
  summary["quantile"] = quantile;
  summary["threshold_km"] = calibration.threshold_km;
  summary["threshold_ms"] = threshold_ms;
  summary["intra_continental_pairs"] = calibration.intra_continental.size();
  summary["inter_continental_pairs"] = calibration.inter_continental.size();
  lhl::report::write_text_file((fs::path(out_dir) / "calibration.json").string(),
                               summary.dump(2) + "\n");

  std::cout << "threshold_km " << lhl::format_double(calibration.threshold_km) << "\n"
            << "threshold_ms " << lhl::format_double(threshold_ms) << "\n";
  return 0;
}

int cmd_detect(const lhl::pipeline::PipelineConfig& config) {
  lhl::pipeline::validate_config(config);
  if (config.traceroutes.empty()) throw std::invalid_argument("traceroutes path is required");
  std::ifstream in(config.traceroutes);
  if (!in) throw std::runtime_error("cannot open traceroutes: " + config.traceroutes);
  auto parsed = lhl::ingest::parse_traceroutes(in);
  std::vector<lhl::Traceroute> sampled;
  for (auto& trace : parsed.value) {
    if (lhl::detect::keep_in_sample(trace, config.sample_fraction, config.seed)) {
      sampled.push_back(std::move(trace));
    }
  }
  auto candidates = lhl::pipeline::detect_candidates(sampled, config.detector, config.jobs);
  fs::create_directories(config.out_dir);
  std::cout << "traceroutes " << parsed.value.size() << "\nsampled " << sampled.size()
            << "\ncandidates " << candidates.size() << "\n";
  lhl::report::write_candidates_file(
      (fs::path(config.out_dir) / (config.snapshot + "_candidates.jsonl")).string(), candidates,
      "adhoc");
  return 0;
}

int cmd_run(const lhl::pipeline::PipelineConfig& config, bool print_reports) {
  const auto result = lhl::pipeline::run(config);
  std::cout << "links " << result.links.size() << "\n";
  for (const auto& [stage, survivors] : result.stages) {
    std::cout << "stage " << stage << " " << survivors << "\n";
  }
  if (print_reports) {
    for (const auto& file : result.files) std::cout << "wrote " << file << "\n";
  }
  std::cout << "manifest " << config.snapshot + "_manifest.json" << "\n";
  return 0;
}

int cmd_sensitivity(const lhl::pipeline::PipelineConfig& config, const std::string& mode,
                    const std::string& fractions_csv, int repeats, std::uint64_t seed,
                    const std::string& thresholds_csv) {
  fs::create_directories(config.out_dir);
  if (mode == "downsample") {
    const auto rows = lhl::pipeline::sensitivity_downsample(
        config, parse_number_list(fractions_csv, "fraction"), repeats, seed);
    std::vector<std::vector<std::string>> out_rows;
    for (const auto& row : rows) {
      out_rows.push_back({lhl::format_double(row.fraction), lhl::format_double(row.node_recall),
                          lhl::format_double(row.edge_recall)});
      std::cout << "fraction " << lhl::format_double(row.fraction) << " node_recall "
                << lhl::format_double(row.node_recall) << " edge_recall "
                << lhl::format_double(row.edge_recall) << "\n";
    }
    lhl::report::write_csv_file(
        (fs::path(config.out_dir) / (config.snapshot + "_sensitivity_downsample.csv")).string(),
        "fraction,node_recall,edge_recall", out_rows);
    return 0;
  }
  if (mode == "threshold") {
    const auto rows = lhl::pipeline::sensitivity_threshold(
        config, parse_number_list(thresholds_csv, "threshold"));
    std::vector<std::vector<std::string>> out_rows;
    for (const auto& row : rows) {
      out_rows.push_back({lhl::format_double(row.threshold_ms), std::to_string(row.vertices),
                          std::to_string(row.edges), lhl::format_double(row.vertices_delta_pct),
                          lhl::format_double(row.edges_delta_pct)});
      std::cout << "threshold " << lhl::format_double(row.threshold_ms) << " vertices "
                << row.vertices << " edges " << row.edges << " dv% "
                << lhl::format_double(row.vertices_delta_pct) << " de% "
                << lhl::format_double(row.edges_delta_pct) << "\n";
    }
    lhl::report::write_csv_file(
        (fs::path(config.out_dir) / (config.snapshot + "_sensitivity_threshold.csv")).string(),
        "threshold_ms,vertices,edges,vertices_delta_pct,edges_delta_pct", out_rows);
    return 0;
  }
  throw std::invalid_argument("sensitivity --mode must be downsample or threshold");
}

int cmd_compare_filters(const lhl::pipeline::PipelineConfig& config) {
  const auto cmp = lhl::pipeline::compare_filters(config);
  fs::create_directories(config.out_dir);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < cmp.full_hist.size(); ++i) {
    rows.push_back({lhl::format_double(static_cast<double>(i) * cmp.bin_width_ms),
                    lhl::format_double(cmp.full_hist[i]), lhl::format_double(cmp.geo_hist[i]),
                    lhl::format_double(cmp.latency_hist[i])});
  }
  lhl::report::write_csv_file(
      (fs::path(config.out_dir) / (config.snapshot + "_filter_comparison_hist.csv")).string(),
      "bin_ms,full,geolocation_only,latency_only", rows);

  json summary;
  summary["survivors"] = {{"full", cmp.full_pairs.size()},
                          {"geolocation_only", cmp.geo_pairs.size()},
                          {"latency_only", cmp.latency_pairs.size()}};
  summary["js"] = {{"full_vs_geolocation", cmp.js_full_vs_geo},
                   {"full_vs_latency", cmp.js_full_vs_latency},
                   {"geolocation_vs_latency", cmp.js_geo_vs_latency}};
  lhl::report::write_text_file(
      (fs::path(config.out_dir) / (config.snapshot + "_filter_comparison.json")).string(),
      summary.dump(2) + "\n");

  std::cout << "full " << cmp.full_pairs.size() << "\ngeolocation_only " << cmp.geo_pairs.size()
            << "\nlatency_only " << cmp.latency_pairs.size() << "\n"
            << "js full_vs_geolocation " << lhl::format_double(cmp.js_full_vs_geo) << "\n"
            << "js full_vs_latency " << lhl::format_double(cmp.js_full_vs_latency) << "\n"
            << "js geolocation_vs_latency " << lhl::format_double(cmp.js_geo_vs_latency) << "\n";
  return 0;
}

int cmd_longitudinal(const std::string& snapshots_path, int min_snapshots,
                     const std::string& out_dir) {
  std::ifstream in(snapshots_path);
  if (!in) throw std::runtime_error("cannot open snapshots list: " + snapshots_path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    throw std::runtime_error("snapshots list must be a JSON array");
  }
  std::vector<lhl::pipeline::Snapshot> snapshots;
  for (const auto& entry : doc) {
    if (!entry.is_object() || !entry.contains("id") || !entry.contains("links_csv")) {
      throw std::runtime_error("snapshot entries need id and links_csv");
    }
    lhl::pipeline::Snapshot snap;
    snap.id = entry["id"].get<std::string>();
    snap.links = lhl::report::read_links_csv_file(entry["links_csv"].get<std::string>());
    snapshots.push_back(std::move(snap));
  }
  lhl::pipeline::LongitudinalOptions options;
  options.topcore_min_snapshots = min_snapshots;
  options.out_dir = out_dir;
  const auto files = lhl::pipeline::longitudinal(std::move(snapshots), options);
  for (const auto& file : files) std::cout << "wrote " << file << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"long-haul link identification and analysis toolkit"};
  app.require_subcommand(1);

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "derive the distance threshold from facilities");
  std::string facilities_path;
  double quantile = 0.95;
  std::string calibrate_out = "out";
  calibrate->add_option("--facilities", facilities_path, "facilities CSV")->required();
  calibrate->add_option("--quantile", quantile, "intra-continental distance quantile");
  calibrate->add_option("--out-dir", calibrate_out, "output directory");

  // detect
  auto* detect = app.add_subcommand("detect", "detect latency discontinuities");
  CommonFlags detect_flags;
  add_common_flags(detect, detect_flags);

  // filter / analyze run the full pipeline; analyze is the complete run with
  // graph reports, filter stops at the link table (both share run()).
  auto* filter_cmd = app.add_subcommand("filter", "run the filter chain and emit links");
  CommonFlags filter_flags;
  add_common_flags(filter_cmd, filter_flags);

  auto* analyze = app.add_subcommand("analyze", "full pipeline with graph and link reports");
  CommonFlags analyze_flags;
  add_common_flags(analyze, analyze_flags);

  // longitudinal
  auto* longitudinal_cmd = app.add_subcommand("longitudinal", "multi-snapshot comparison");
  std::string snapshots_path;
  int min_snapshots = 6;
  std::string longitudinal_out = "out";
  longitudinal_cmd->add_option("--snapshots", snapshots_path, "JSON list of {id, links_csv}")
      ->required();
  longitudinal_cmd->add_option("--min-snapshots", min_snapshots,
                               "TOPcore persistence threshold");
  longitudinal_cmd->add_option("--out-dir", longitudinal_out, "output directory");

  // sensitivity
  auto* sensitivity = app.add_subcommand("sensitivity", "downsampling / threshold sweeps");
  CommonFlags sensitivity_flags;
  add_common_flags(sensitivity, sensitivity_flags);
  std::string mode;
  std::string fractions_csv = "1,0.5,0.25,0.1";
  std::string thresholds_csv = "57,40,30,20";
  int repeats = 3;
  std::uint64_t sweep_seed = 1;
  sensitivity->add_option("--mode", mode, "downsample or threshold")->required();
  sensitivity->add_option("--fractions", fractions_csv, "comma-separated fractions");
  sensitivity->add_option("--repeats", repeats, "repetitions per fraction");
  sensitivity->add_option("--sweep-seed", sweep_seed, "seed for the repeat selections");
  sensitivity->add_option("--thresholds", thresholds_csv, "comma-separated thresholds (ms)");

  // compare-filters
  auto* compare = app.add_subcommand("compare-filters", "full vs single-filter variants");
  CommonFlags compare_flags;
  add_common_flags(compare, compare_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (calibrate->parsed()) return cmd_calibrate(facilities_path, quantile, calibrate_out);
    if (detect->parsed()) return cmd_detect(load_config(detect_flags));
    if (filter_cmd->parsed()) return cmd_run(load_config(filter_flags), false);
    if (analyze->parsed()) return cmd_run(load_config(analyze_flags), true);
    if (longitudinal_cmd->parsed()) {
      return cmd_longitudinal(snapshots_path, min_snapshots, longitudinal_out);
    }
    if (sensitivity->parsed()) {
      return cmd_sensitivity(load_config(sensitivity_flags), mode, fractions_csv, repeats,
                             sweep_seed, thresholds_csv);
    }
    if (compare->parsed()) return cmd_compare_filters(load_config(compare_flags));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
