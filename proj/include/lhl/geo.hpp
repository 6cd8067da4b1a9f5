// Geodesy on the spherical earth model: great-circle distances, bearings,
// compass binning, polygon-based minimum country distances, speed-of-light
// feasibility, and facility-based threshold calibration.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lhl/util.hpp"

namespace lhl {
namespace geo {

inline constexpr double kEarthRadiusKm = 6371.0088;
// RTTs propagate at two thirds of c in fibre, km/s.
inline constexpr double kPropagationSpeedKms = 2.0 / 3.0 * 299792.458;

struct GeoPoint {
  double lat = 0;
  double lon = 0;
};

double haversine_km(GeoPoint a, GeoPoint b);

double rtt_for_distance_ms(double km);
double max_distance_for_rtt_km(double ms);

// Forward azimuth from a to b, degrees in [0, 360).
// Throws std::invalid_argument when the points coincide.
double initial_bearing_deg(GeoPoint a, GeoPoint b);

// The six axes of a 12-wind compass rose folded onto a semicircle.
enum class CompassAxis { ns, nne_ssw, ene_wsw, ew, ese_wnw, sse_nnw };

const char* to_string(CompassAxis a);

// Folds the bearing mod 180 into six 30-degree sectors centred on
// 0,30,...,150; each sector owns [centre-15, centre+15).
CompassAxis compass_axis(double bearing_deg);

using Ring = std::vector<GeoPoint>;        // closure point dropped
using PolygonSet = std::vector<Ring>;      // all boundary rings of one country

// Minimum great-circle distance between the two boundary point sets after
// resampling every ring edge to steps of at most densify_km.
double min_country_distance_km(const PolygonSet& a, const PolygonSet& b, double densify_km);

class CountryDistanceTable {
 public:
  // Symmetric storage; the diagonal is implicitly zero.
  void set(const std::string& a, const std::string& b, double km);
  std::optional<double> lookup(const std::string& a, const std::string& b) const;

  static CountryDistanceTable build(const std::map<std::string, PolygonSet>& polygons,
                                    double densify_km);

  // CSV cache "country_a,country_b,km" guarded by a digest of the polygon
  // input; a stale digest forces recomputation.
  void save_csv(const std::string& path, std::uint64_t polygons_digest) const;
  static std::optional<CountryDistanceTable> load_csv(const std::string& path,
                                                      std::uint64_t polygons_digest);

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, double> entries_;
};

// True iff the RTT difference cannot span the minimum distance between the
// two countries at propagation speed. nullopt when the pair is not in the
// table; callers keep the link and count the miss.
std::optional<bool> sol_violates(double rtt_diff_ms, const std::string& country_a,
                                 const std::string& country_b,
                                 const CountryDistanceTable& table);

struct Facility {
  std::string id;
  GeoPoint location;
  std::string country;
  std::string continent;
  long long net_count = 0;
};

struct Calibration {
  double threshold_km = 0;
  // (distance km, weight) samples for histogram emission.
  std::vector<std::pair<double, double>> intra_continental;
  std::vector<std::pair<double, double>> inter_continental;
};

// Network-pair-weighted distance distributions between peering facilities;
// the threshold is the requested quantile of the intra-continental one.
// Throws std::invalid_argument when no intra-continental pair exists.
Calibration calibrate_threshold(const std::vector<Facility>& facilities, double quantile);

}  // namespace geo
}  // namespace lhl
