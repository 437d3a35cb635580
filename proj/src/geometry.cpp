#include "tilegp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tilegp/rng.hpp"

namespace tilegp {

namespace {

constexpr double kDegToRad = 0.017453292519943295;

void check_point(double x, double y, const DistanceMetric& metric) {
  if (!std::isfinite(x) || !std::isfinite(y)) throw std::domain_error("non-finite coordinate");
  if (metric.kind == MetricKind::GreatCircle) {
    if (y < -90.0 || y > 90.0) throw std::domain_error("latitude outside [-90, 90]");
    if (x < -180.0 || x >= 360.0) throw std::domain_error("longitude outside [-180, 360)");
  }
}

}  // namespace

namespace detail {

double dist_euclidean(double ax, double ay, double bx, double by) {
  const double dx = ax - bx;
  const double dy = ay - by;
  return std::sqrt(dx * dx + dy * dy);
}

double dist_haversine_deg(double lon_a, double lat_a, double lon_b, double lat_b, double radius) {
  // |delta| keeps the evaluation bitwise symmetric under point swap.
  const double dlat = std::fabs(lat_a - lat_b) * kDegToRad;
  const double dlon = std::fabs(lon_a - lon_b) * kDegToRad;
  const double sp = std::sin(0.5 * dlat);
  const double sl = std::sin(0.5 * dlon);
  const double h = sp * sp + std::cos(lat_a * kDegToRad) * std::cos(lat_b * kDegToRad) * sl * sl;
  return 2.0 * radius * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace detail

void LocationSet::validate() const {
  if (xs.size() != ys.size()) throw std::domain_error("xs and ys differ in length");
  if (xs.empty()) throw std::domain_error("empty location set");
  if (metric.kind == MetricKind::GreatCircle && !(metric.sphere_radius > 0.0))
    throw std::domain_error("sphere_radius must be positive");
  for (std::size_t i = 0; i < xs.size(); ++i) check_point(xs[i], ys[i], metric);
}

double distance(double ax, double ay, double bx, double by, const DistanceMetric& metric) {
  check_point(ax, ay, metric);
  check_point(bx, by, metric);
  if (metric.kind == MetricKind::Euclidean) return detail::dist_euclidean(ax, ay, bx, by);
  return detail::dist_haversine_deg(ax, ay, bx, by, metric.sphere_radius);
}

LocationSet random_locations_from(int n, const std::function<double()>& next_uniform) {
  if (n < 1) throw std::invalid_argument("random_locations: n must be >= 1");
  LocationSet locs;
  locs.xs.reserve(n);
  locs.ys.reserve(n);
  for (int i = 0; i < n; ++i) {
    double x, y;
    bool clear;
    do {
      x = next_uniform();
      y = next_uniform();
      clear = true;
      for (int j = 0; j < i; ++j) {
        if (detail::dist_euclidean(x, y, locs.xs[j], locs.ys[j]) < kMinSeparation) {
          clear = false;
          break;
        }
      }
    } while (!clear);
    locs.xs.push_back(x);
    locs.ys.push_back(y);
  }
  return locs;
}

LocationSet random_locations(int n, std::uint64_t seed) {
  SplitMix64 rng(split_stream(seed, 0));
  return random_locations_from(n, [&rng] { return rng.next_uniform(); });
}

LocationSet grid_locations(int nx, int ny, double x_lo, double x_hi, double y_lo, double y_hi) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("grid_locations: zero grid dimension");
  if (!(x_hi > x_lo) || !(y_hi > y_lo)) throw std::invalid_argument("grid_locations: degenerate range");
  LocationSet locs;
  locs.xs.reserve(static_cast<std::size_t>(nx) * ny);
  locs.ys.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 1; j <= ny; ++j) {
    const double y = y_lo + j * (y_hi - y_lo) / ny;
    for (int i = 1; i <= nx; ++i) {
      locs.xs.push_back(x_lo + i * (x_hi - x_lo) / nx);
      locs.ys.push_back(y);
    }
  }
  return locs;
}

}  // namespace tilegp
