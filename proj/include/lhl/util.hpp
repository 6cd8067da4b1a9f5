// Small shared helpers: string handling, hashing, statistics.
#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lhl {

// Diagnostic counters keyed by stage-qualified names, e.g. "ingest.malformed_line".
// Data anomalies are counted, never thrown.
using Counters = std::map<std::string, std::uint64_t>;

inline void bump(Counters& c, const std::string& key, std::uint64_t n = 1) { c[key] += n; }

std::uint64_t counter_sum(const Counters& c, std::string_view prefix);
void merge_counters(Counters& into, const Counters& from);

// ---- strings ----

std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string> split_char(std::string_view s, char sep);
std::string_view trim(std::string_view s);
bool is_ipv4(std::string_view s);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// Shortest round-trip decimal representation; keeps report files
// byte-stable across runs and exact through parse.
std::string format_double(double v);

// ---- hashing ----

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64_file(const std::string& path);  // throws std::runtime_error if unreadable
std::uint64_t splitmix64(std::uint64_t x);

// Uniform in [0,1) derived from (seed, key); stable across platforms and
// independent of evaluation order, so parallel runs agree.
double keyed_uniform(std::uint64_t seed, std::string_view key);

// ---- statistics ----

// Median of an unsorted sample (copy taken). Empty input is a caller bug.
double median(std::vector<double> v);

// Linear-interpolation quantile (the numpy default) on an unsorted sample.
double quantile(std::vector<double> v, double q);

inline double iqr(const std::vector<double>& v) {
  return quantile(v, 0.75) - quantile(v, 0.25);
}

// Smallest value whose cumulative weight reaches q of the total weight.
double weighted_quantile(std::vector<std::pair<double, double>> value_weight, double q);

}  // namespace lhl
