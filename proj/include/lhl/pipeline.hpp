// Orchestration: configuration, the end-to-end run (parse, sample, detect,
// aggregate, filter, graph, report), longitudinal multi-snapshot driving,
// and the sensitivity analyses (downsampling, threshold sweep, single-filter
// comparison, Jensen-Shannon divergence).
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lhl/core.hpp"
#include "lhl/detect.hpp"
#include "lhl/filter.hpp"
#include "lhl/geo.hpp"
#include "lhl/ingest.hpp"
#include "lhl/lhnet.hpp"
#include "lhl/util.hpp"

namespace lhl {
namespace pipeline {

struct PipelineConfig {
  std::string snapshot = "run";
  std::string traceroutes;
  ingest::SidecarPaths sidecars;
  double threshold_ms = kDefaultThresholdMs;
  detect::LevelShiftConfig detector{};
  double sample_fraction = 1.0;
  std::uint64_t seed = 0;
  double densify_km = 10.0;
  std::size_t min_countries = 5;
  int powerlaw_bootstrap = 100;
  std::string out_dir = "out";
  int jobs = 1;
  std::string distance_cache;  // defaults to <out_dir>/country_distances.csv
};

PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig config_from_file(const std::string& path);

// Canonical form: the semantic fields only, so worker count and output
// location never change a digest.
nlohmann::json config_to_json(const PipelineConfig& config);
std::string config_digest(const PipelineConfig& config);

// Throws std::invalid_argument on out-of-range fields or duplicate paths.
void validate_config(const PipelineConfig& config);

struct RunResult {
  std::vector<LongHaulLink> links;
  Counters counters;
  std::vector<std::pair<std::string, std::uint64_t>> stages;  // survivor counts, in order
  filter::CoverageStats coverage;
  nlohmann::json manifest;
  std::vector<std::string> files;  // emitted files, relative to out_dir
};

RunResult run(const PipelineConfig& config);

// Detection fan-out; candidates come back in trace input order regardless
// of the worker count.
std::vector<CandidateLink> detect_candidates(const std::vector<Traceroute>& traces,
                                             const detect::LevelShiftConfig& cfg, int jobs);

// ---- sensitivity analyses ----

struct DownsampleRow {
  double fraction = 1.0;
  double node_recall = 0;
  double edge_recall = 0;
};

std::vector<DownsampleRow> sensitivity_downsample(const PipelineConfig& config,
                                                  const std::vector<double>& fractions,
                                                  int repeats, std::uint64_t seed);

struct ThresholdRow {
  double threshold_ms = 0;
  std::uint64_t vertices = 0;
  std::uint64_t edges = 0;
  double vertices_delta_pct = 0;  // vs the configured default threshold
  double edges_delta_pct = 0;
};

std::vector<ThresholdRow> sensitivity_threshold(const PipelineConfig& config,
                                                const std::vector<double>& thresholds);

// Base-2 Jensen-Shannon divergence of two histograms over the same bins.
// Throws std::invalid_argument on size mismatch or empty histograms.
double js_divergence(const std::vector<double>& hist_a, const std::vector<double>& hist_b);

struct FilterComparison {
  double bin_width_ms = 1.0;
  std::vector<double> full_hist;      // threshold + intercontinental + SoL
  std::vector<double> geo_hist;      // intercontinental + SoL only
  std::vector<double> latency_hist;  // threshold only
  std::set<std::string> full_pairs;
  std::set<std::string> geo_pairs;
  std::set<std::string> latency_pairs;
  double js_full_vs_geo = 0;
  double js_full_vs_latency = 0;
  double js_geo_vs_latency = 0;
};

FilterComparison compare_filters(const PipelineConfig& config);

// ---- longitudinal driving ----

struct Snapshot {
  std::string id;
  std::vector<LongHaulLink> links;
};

struct LongitudinalOptions {
  int topcore_min_snapshots = 6;
  std::string out_dir = "out";
};

// Emits dimension, degree-variation, TOPcore-persistence and AS-latency
// reports across snapshots ordered by id. Returns the emitted file names.
std::vector<std::string> longitudinal(std::vector<Snapshot> snapshots,
                                      const LongitudinalOptions& options);

}  // namespace pipeline
}  // namespace lhl
