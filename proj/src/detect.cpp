#include "lhl/detect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lhl/util.hpp"

namespace lhl {
namespace detect {

RttSeries representative_series(const Traceroute& trace) {
  RttSeries series;
  if (trace.hops.empty()) return series;
  series.base_index = trace.hops.front().index;
  const int span = trace.hops.back().index - series.base_index + 1;
  series.values.assign(static_cast<std::size_t>(span), std::nullopt);
  for (const Hop& hop : trace.hops) {
    if (!hop.responsive()) continue;
    series.values[static_cast<std::size_t>(hop.index - series.base_index)] =
        hop.representative_rtt();
  }
  return series;
}

namespace {

struct Run {
  std::size_t begin = 0;  // first series position of the run
  std::size_t end = 0;    // one past the last position
};

std::vector<Run> responsive_runs(const std::vector<std::optional<double>>& rtts) {
  std::vector<Run> runs;
  std::size_t i = 0;
  while (i < rtts.size()) {
    while (i < rtts.size() && !rtts[i].has_value()) ++i;
    std::size_t start = i;
    while (i < rtts.size() && rtts[i].has_value()) ++i;
    if (i > start) runs.push_back(Run{start, i});
  }
  return runs;
}

void flag_run(const std::vector<std::optional<double>>& rtts, const Run& run,
              const LevelShiftConfig& cfg, std::vector<bool>& flags) {
  const std::size_t len = run.end - run.begin;
  if (len < 2) return;

  const auto w = static_cast<std::size_t>(cfg.window);
  std::vector<double> diffs;
  diffs.reserve(len - 1);
  for (std::size_t b = run.begin; b + 1 < run.end; ++b) {
    std::vector<double> left;
    std::vector<double> right;
    const std::size_t left_lo = (b >= run.begin + w - 1) ? b - (w - 1) : run.begin;
    for (std::size_t i = left_lo; i <= b; ++i) left.push_back(**(rtts.begin() + i));
    const std::size_t right_hi = std::min(run.end, b + 1 + w);
    for (std::size_t i = b + 1; i < right_hi; ++i) right.push_back(**(rtts.begin() + i));
    diffs.push_back(median(std::move(right)) - median(std::move(left)));
  }

  std::vector<bool> raw(diffs.size(), false);
  const double spread = iqr(diffs);
  if (spread > 0) {
    for (std::size_t k = 0; k < diffs.size(); ++k) {
      raw[k] = diffs[k] > 0 && diffs[k] > cfg.c * spread;
    }
  } else {
    const auto [lo, hi] = std::minmax_element(diffs.begin(), diffs.end());
    const double range = *hi - *lo;
    if (range > 0) {
      for (std::size_t k = 0; k < diffs.size(); ++k) {
        raw[k] = diffs[k] > 0 && diffs[k] > cfg.c * range;
      }
    } else {
      // All diffs equal; a lone positive boundary is still a shift.
      for (std::size_t k = 0; k < diffs.size(); ++k) {
        bool strictly_max = diffs[k] > 0;
        for (std::size_t m = 0; m < diffs.size() && strictly_max; ++m) {
          if (m != k && diffs[m] >= diffs[k]) strictly_max = false;
        }
        raw[k] = strictly_max;
      }
    }
  }

  // A single shift produces a ramp of elevated diffs as the windows slide
  // across it; keep only the peak of each contiguous flagged stretch.
  std::size_t k = 0;
  while (k < raw.size()) {
    if (!raw[k]) {
      ++k;
      continue;
    }
    std::size_t seg_end = k;
    while (seg_end + 1 < raw.size() && raw[seg_end + 1]) ++seg_end;
    std::size_t peak = k;
    for (std::size_t m = k + 1; m <= seg_end; ++m) {
      if (diffs[m] > diffs[peak]) peak = m;
    }
    flags[run.begin + peak] = true;
    k = seg_end + 1;
  }
}

}  // namespace

std::vector<bool> level_shift_flags(const std::vector<std::optional<double>>& rtts,
                                    const LevelShiftConfig& cfg) {
  if (!cfg.valid()) throw std::invalid_argument("level shift config out of range");
  if (rtts.size() < 2) return {};
  std::vector<bool> flags(rtts.size() - 1, false);
  for (const Run& run : responsive_runs(rtts)) flag_run(rtts, run, cfg, flags);
  return flags;
}

std::vector<CandidateLink> extract_candidates(const Traceroute& trace,
                                              const std::vector<bool>& flags) {
  std::vector<CandidateLink> out;
  if (trace.hops.size() < 2) return out;
  const RttSeries series = representative_series(trace);
  if (flags.size() + 1 != series.values.size()) {
    throw std::invalid_argument("flags do not match this trace");
  }

  // Map dense series positions back to hop records.
  std::vector<const Hop*> at(series.values.size(), nullptr);
  for (const Hop& hop : trace.hops) {
    at[static_cast<std::size_t>(hop.index - series.base_index)] = &hop;
  }
  auto responsive_at = [&](std::size_t pos) {
    return pos < at.size() && at[pos] != nullptr && at[pos]->responsive() &&
           series.values[pos].has_value();
  };

  for (std::size_t b = 0; b < flags.size(); ++b) {
    if (!flags[b]) continue;
    const std::size_t near_pos = b;
    const std::size_t far_pos = b + 1;
    if (!responsive_at(near_pos) || !responsive_at(far_pos)) continue;
    if (near_pos == 0 || !responsive_at(near_pos - 1)) continue;
    if (!responsive_at(far_pos + 1)) continue;
    const double diff = *series.values[far_pos] - *series.values[near_pos];
    if (diff <= 0) continue;
    out.push_back(CandidateLink{
        at[near_pos]->address,
        at[far_pos]->address,
        at[near_pos]->index,
        diff,
        trace.ref(),
        at[far_pos]->mpls_labels,
    });
  }
  return out;
}

std::vector<CandidateLink> extract_candidates(const Traceroute& trace,
                                              const LevelShiftConfig& cfg) {
  const RttSeries series = representative_series(trace);
  if (series.values.size() < 2) return {};
  return extract_candidates(trace, level_shift_flags(series.values, cfg));
}

bool keep_in_sample(const TraceRef& ref, double fraction, std::uint64_t seed) {
  if (fraction >= 1.0) return true;
  return keyed_uniform(seed, ref.key()) < fraction;
}

bool keep_in_sample(const Traceroute& trace, double fraction, std::uint64_t seed) {
  return keep_in_sample(trace.ref(), fraction, seed);
}

std::vector<Traceroute> downsample(const std::vector<Traceroute>& traces, double fraction,
                                   std::uint64_t seed) {
  if (fraction <= 0.0 || fraction > 1.0) {
    throw std::invalid_argument("fraction must lie in (0,1]");
  }
  std::vector<Traceroute> kept;
  for (const Traceroute& t : traces) {
    if (keep_in_sample(t, fraction, seed)) kept.push_back(t);
  }
  return kept;
}

}  // namespace detect
}  // namespace lhl
