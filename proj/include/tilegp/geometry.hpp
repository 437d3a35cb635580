#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace tilegp {

inline constexpr double kEarthRadiusKm = 6371.0;

/// Two generated points closer than this are considered coincident and the
/// later one is redrawn; below it the exact covariance paths go singular.
inline constexpr double kMinSeparation = 1e-8;

enum class MetricKind { Euclidean, GreatCircle };

struct DistanceMetric {
  MetricKind kind = MetricKind::Euclidean;
  double sphere_radius = kEarthRadiusKm;  // used only for GreatCircle

  friend bool operator==(const DistanceMetric&, const DistanceMetric&) = default;
};

/// n planar or spherical 2D points plus the metric they are measured under.
/// GreatCircle coordinates are (longitude, latitude) in degrees, with
/// latitude in [-90, 90] and longitude in [-180, 360).
struct LocationSet {
  std::vector<double> xs;
  std::vector<double> ys;
  DistanceMetric metric;

  int count() const { return static_cast<int>(xs.size()); }

  /// Checks the type invariants; throws std::domain_error on violation.
  void validate() const;
};

/// Distance between (ax,ay) and (bx,by) under the metric. Exactly symmetric
/// in its two points. GreatCircle uses the haversine formulation scaled by
/// sphere_radius.
double distance(double ax, double ay, double bx, double by, const DistanceMetric& metric);

/// n i.i.d. uniform points on [0,1]^2, deterministic per seed (stream 0 of
/// the seed), Euclidean metric. Points closer than kMinSeparation to an
/// earlier point are redrawn.
LocationSet random_locations(int n, std::uint64_t seed);

/// Same generator driven by an arbitrary uniform(0,1) source; the seam the
/// seeded variant wraps, exposed so tests can script the draw sequence.
LocationSet random_locations_from(int n, const std::function<double()>& next_uniform);

/// nx*ny tensor-grid points, x varying fastest, using the right-closed
/// convention x_j = lo + (j+1)*(hi-lo)/nx (so a 1x1 grid sits at the high
/// endpoint). Euclidean metric.
LocationSet grid_locations(int nx, int ny, double x_lo, double x_hi, double y_lo, double y_hi);

namespace detail {
// Unchecked kernels used by the hot assembly loops after a LocationSet has
// been validated once.
double dist_euclidean(double ax, double ay, double bx, double by);
double dist_haversine_deg(double lon_a, double lat_a, double lon_b, double lat_b, double radius);
}  // namespace detail

}  // namespace tilegp
