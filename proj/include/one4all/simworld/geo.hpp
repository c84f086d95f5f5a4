#pragma once

#include <vector>

#include "one4all/validation/validator.hpp"

namespace one4all::sim {

using GpsPoint = validation::GpsPoint;
using Polygon = std::vector<GpsPoint>;  // outer ring, closing vertex optional

inline constexpr double kEarthRadiusMeters = 6371008.8;

// Great-circle distance on a sphere of kEarthRadiusMeters.
double haversine_m(const GpsPoint& a, const GpsPoint& b);

// Point reached after travelling `fraction` of the great-circle arc from a to b.
GpsPoint interpolate(const GpsPoint& a, const GpsPoint& b, double fraction);

// Small-offset helper: shifts a point by metres east/north (spherical approximation).
GpsPoint offset_m(const GpsPoint& origin, double east_m, double north_m);

// Ray casting in lon/lat space; points on an edge count as inside.
bool contains(const Polygon& polygon, const GpsPoint& p);

GpsPoint centroid(const Polygon& polygon);

}  // namespace one4all::sim
