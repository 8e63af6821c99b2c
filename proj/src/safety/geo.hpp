#pragma once

namespace webgcs {

inline constexpr double kEarthRadiusM = 6371000.0;

struct LatLon {
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees

  bool operator==(const LatLon&) const = default;
};

namespace geo {

// Haversine great-circle distance in meters.
double distance_m(const LatLon& a, const LatLon& b) noexcept;

// Initial great-circle bearing from a to b, degrees in [0, 360).
double bearing_deg(const LatLon& a, const LatLon& b) noexcept;

// Point reached by travelling distance_m along the great circle with the given initial bearing.
LatLon destination(const LatLon& from, double bearing_deg, double distance_m) noexcept;

bool valid(const LatLon& p) noexcept;

}  // namespace geo
}  // namespace webgcs
