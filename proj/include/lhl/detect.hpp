// Stage 1 of the pipeline: flag latency discontinuities inside each
// traceroute with a two-window median level-shift detector, then turn the
// flagged boundaries into candidate links.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lhl/core.hpp"

namespace lhl {
namespace detect {

struct LevelShiftConfig {
  int window = 2;  // hops per side
  double c = 1.0;  // IQR multiplier

  bool valid() const { return window >= 1 && c > 0; }
};

// Per-hop representative RTTs aligned to a dense index range; nullopt marks
// an unresponsive or missing hop. Index 0 of the series corresponds to the
// smallest hop index present in the trace.
struct RttSeries {
  int base_index = 0;
  std::vector<std::optional<double>> values;
};

RttSeries representative_series(const Traceroute& trace);

// One flag per boundary between series positions i and i+1. Gaps split the
// series into maximal responsive runs; each run is scored independently.
// Within a run, the boundary diff is median(right window) - median(left
// window) with windows truncated at the run edges. A boundary is flagged
// when its diff is positive and exceeds c times the IQR of all diffs in the
// run; contiguous flagged boundaries collapse to the one with the largest
// diff, since a single level shift smears across neighbouring windows.
// Runs whose diff spread is degenerate fall back to the max-min spread and
// then to a strict-maximum rule.
std::vector<bool> level_shift_flags(const std::vector<std::optional<double>>& rtts,
                                    const LevelShiftConfig& cfg);

// Keeps a flagged boundary only when the near hop, the far hop, the hop
// before near and the hop after far are all responsive.
std::vector<CandidateLink> extract_candidates(const Traceroute& trace,
                                              const std::vector<bool>& flags);

// Convenience: flags computed from the trace itself.
std::vector<CandidateLink> extract_candidates(const Traceroute& trace,
                                              const LevelShiftConfig& cfg);

// Keeps each trace independently with probability `fraction`; the decision
// is a pure function of (seed, trace identity), so any worker layout and
// any repetition with the same seed selects the same traces.
bool keep_in_sample(const TraceRef& ref, double fraction, std::uint64_t seed);
bool keep_in_sample(const Traceroute& trace, double fraction, std::uint64_t seed);

std::vector<Traceroute> downsample(const std::vector<Traceroute>& traces, double fraction,
                                   std::uint64_t seed);

}  // namespace detect
}  // namespace lhl
