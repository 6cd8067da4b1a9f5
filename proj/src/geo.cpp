#include "lhl/geo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lhl {
namespace geo {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

double haversine_km(GeoPoint a, GeoPoint b) {
  const double lat1 = a.lat * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double dlat = (b.lat - a.lat) * kDegToRad;
  const double dlon = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dlat / 2);
  const double s2 = std::sin(dlon / 2);
  const double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

double rtt_for_distance_ms(double km) { return 2.0 * km / kPropagationSpeedKms * 1000.0; }

double max_distance_for_rtt_km(double ms) { return ms / 1000.0 * kPropagationSpeedKms / 2.0; }

double initial_bearing_deg(GeoPoint a, GeoPoint b) {
  if (a.lat == b.lat && a.lon == b.lon) {
    throw std::invalid_argument("bearing undefined for identical points");
  }
  const double lat1 = a.lat * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double dlon = (b.lon - a.lon) * kDegToRad;
  const double y = std::sin(dlon) * std::cos(lat2);
  const double x = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
  double deg = std::atan2(y, x) / kDegToRad;
  deg = std::fmod(deg + 360.0, 360.0);
  return deg;
}

const char* to_string(CompassAxis a) {
  switch (a) {
    case CompassAxis::ns: return "N-S";
    case CompassAxis::nne_ssw: return "NNE-SSW";
    case CompassAxis::ene_wsw: return "ENE-WSW";
    case CompassAxis::ew: return "E-W";
    case CompassAxis::ese_wnw: return "ESE-WNW";
    case CompassAxis::sse_nnw: return "SSE-NNW";
  }
  return "N-S";
}

CompassAxis compass_axis(double bearing_deg) {
  double folded = std::fmod(bearing_deg, 180.0);
  if (folded < 0) folded += 180.0;
  const int sector = static_cast<int>(std::floor((folded + 15.0) / 30.0)) % 6;
  return static_cast<CompassAxis>(sector);
}

namespace {

// Samples every edge of the ring (closed implicitly) at steps of at most
// densify_km, interpolating linearly in lat/lon. Step counts are powers of
// two so halving densify_km only refines the sample set; the minimum can
// then never grow as the resolution increases.
std::vector<GeoPoint> densify(const PolygonSet& polys, double densify_km) {
  std::vector<GeoPoint> points;
  for (const Ring& ring : polys) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      const GeoPoint& p = ring[i];
      const GeoPoint& q = ring[(i + 1) % n];
      const double len = haversine_km(p, q);
      const auto needed =
          std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(len / densify_km)));
      const std::uint64_t steps = std::bit_ceil(needed);
      for (std::uint64_t s = 0; s < steps; ++s) {
        const double t = static_cast<double>(s) / static_cast<double>(steps);
        points.push_back(GeoPoint{p.lat + t * (q.lat - p.lat), p.lon + t * (q.lon - p.lon)});
      }
    }
  }
  return points;
}

}  // namespace

double min_country_distance_km(const PolygonSet& a, const PolygonSet& b, double densify_km) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty polygon set");
  if (densify_km <= 0) throw std::invalid_argument("densify_km must be positive");
  const auto pa = densify(a, densify_km);
  const auto pb = densify(b, densify_km);
  double best = std::numeric_limits<double>::infinity();
  for (const GeoPoint& p : pa) {
    for (const GeoPoint& q : pb) {
      best = std::min(best, haversine_km(p, q));
      if (best == 0.0) return 0.0;
    }
  }
  return best;
}

void CountryDistanceTable::set(const std::string& a, const std::string& b, double km) {
  auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
  entries_[key] = km;
}

std::optional<double> CountryDistanceTable::lookup(const std::string& a,
                                                   const std::string& b) const {
  if (a == b) return 0.0;
  auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

CountryDistanceTable CountryDistanceTable::build(
    const std::map<std::string, PolygonSet>& polygons, double densify_km) {
  CountryDistanceTable table;
  for (auto ia = polygons.begin(); ia != polygons.end(); ++ia) {
    for (auto ib = std::next(ia); ib != polygons.end(); ++ib) {
      table.set(ia->first, ib->first,
                min_country_distance_km(ia->second, ib->second, densify_km));
    }
  }
  return table;
}

void CountryDistanceTable::save_csv(const std::string& path, std::uint64_t polygons_digest) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write country distance cache: " + path);
  out << "# polygons_digest=" << polygons_digest << "\n";
  out << "country_a,country_b,km\n";
  for (const auto& [key, km] : entries_) {
    out << key.first << "," << key.second << "," << format_double(km) << "\n";
  }
}

std::optional<CountryDistanceTable> CountryDistanceTable::load_csv(
    const std::string& path, std::uint64_t polygons_digest) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  const std::string expected = "# polygons_digest=" + std::to_string(polygons_digest);
  if (trim(line) != expected) return std::nullopt;  // stale cache
  if (!std::getline(in, line)) return std::nullopt;  // header
  CountryDistanceTable table;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_char(line, ',');
    if (fields.size() != 3) return std::nullopt;
    auto km = parse_double(fields[2]);
    if (!km) return std::nullopt;
    table.set(fields[0], fields[1], *km);
  }
  return table;
}

std::optional<bool> sol_violates(double rtt_diff_ms, const std::string& country_a,
                                 const std::string& country_b,
                                 const CountryDistanceTable& table) {
  auto min_km = table.lookup(country_a, country_b);
  if (!min_km) return std::nullopt;
  return max_distance_for_rtt_km(rtt_diff_ms) < *min_km;
}

Calibration calibrate_threshold(const std::vector<Facility>& facilities, double quantile) {
  if (quantile <= 0.0 || quantile >= 1.0) {
    throw std::invalid_argument("quantile must lie in (0,1)");
  }
  Calibration result;
  for (std::size_t i = 0; i < facilities.size(); ++i) {
    for (std::size_t j = i + 1; j < facilities.size(); ++j) {
      const auto& fa = facilities[i];
      const auto& fb = facilities[j];
      const double weight = static_cast<double>(fa.net_count) * static_cast<double>(fb.net_count);
      if (weight <= 0) continue;
      const double km = haversine_km(fa.location, fb.location);
      if (fa.continent == fb.continent) {
        result.intra_continental.emplace_back(km, weight);
      } else {
        result.inter_continental.emplace_back(km, weight);
      }
    }
  }
  if (result.intra_continental.empty()) {
    throw std::invalid_argument("no intra-continental facility pairs");
  }
  result.threshold_km = weighted_quantile(result.intra_continental, quantile);
  std::sort(result.intra_continental.begin(), result.intra_continental.end());
  std::sort(result.inter_continental.begin(), result.inter_continental.end());
  return result;
}

}  // namespace geo
}  // namespace lhl
