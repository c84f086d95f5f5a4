#include "one4all/simworld/geo.hpp"

#include <cmath>
#include <numbers>

namespace one4all::sim {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

bool on_segment(const GpsPoint& a, const GpsPoint& b, const GpsPoint& p) {
    const double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
    if (std::abs(cross) > 1e-12) return false;
    return p.lon >= std::min(a.lon, b.lon) - 1e-12 && p.lon <= std::max(a.lon, b.lon) + 1e-12 &&
           p.lat >= std::min(a.lat, b.lat) - 1e-12 && p.lat <= std::max(a.lat, b.lat) + 1e-12;
}

}  // namespace

double haversine_m(const GpsPoint& a, const GpsPoint& b) {
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double dphi = (b.lat - a.lat) * kDegToRad;
    const double dlambda = (b.lon - a.lon) * kDegToRad;
    const double h = std::sin(dphi / 2) * std::sin(dphi / 2) +
                     std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) * std::sin(dlambda / 2);
    return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(h)));
}

GpsPoint interpolate(const GpsPoint& a, const GpsPoint& b, double fraction) {
    const double phi1 = a.lat * kDegToRad, lambda1 = a.lon * kDegToRad;
    const double phi2 = b.lat * kDegToRad, lambda2 = b.lon * kDegToRad;
    const double delta = haversine_m(a, b) / kEarthRadiusMeters;
    if (delta < 1e-15) return a;
    const double wa = std::sin((1 - fraction) * delta) / std::sin(delta);
    const double wb = std::sin(fraction * delta) / std::sin(delta);
    const double x = wa * std::cos(phi1) * std::cos(lambda1) + wb * std::cos(phi2) * std::cos(lambda2);
    const double y = wa * std::cos(phi1) * std::sin(lambda1) + wb * std::cos(phi2) * std::sin(lambda2);
    const double z = wa * std::sin(phi1) + wb * std::sin(phi2);
    return {std::atan2(z, std::hypot(x, y)) / kDegToRad, std::atan2(y, x) / kDegToRad};
}

GpsPoint offset_m(const GpsPoint& origin, double east_m, double north_m) {
    const double dlat = north_m / kEarthRadiusMeters / kDegToRad;
    const double dlon = east_m / (kEarthRadiusMeters * std::cos(origin.lat * kDegToRad)) / kDegToRad;
    return {origin.lat + dlat, origin.lon + dlon};
}

bool contains(const Polygon& polygon, const GpsPoint& p) {
    if (polygon.size() < 3) return false;
    bool inside = false;
    for (std::size_t i = 0, j = polygon.size() - 1; i < polygon.size(); j = i++) {
        const auto& a = polygon[i];
        const auto& b = polygon[j];
        if (on_segment(a, b, p)) return true;
        if ((a.lat > p.lat) != (b.lat > p.lat)) {
            const double lon_at = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
            if (p.lon < lon_at) inside = !inside;
        }
    }
    return inside;
}

GpsPoint centroid(const Polygon& polygon) {
    GpsPoint c{0, 0};
    if (polygon.empty()) return c;
    std::size_t n = polygon.size();
    if (n > 1 && polygon.front().lat == polygon.back().lat && polygon.front().lon == polygon.back().lon) --n;
    for (std::size_t i = 0; i < n; ++i) {
        c.lat += polygon[i].lat;
        c.lon += polygon[i].lon;
    }
    c.lat /= static_cast<double>(n);
    c.lon /= static_cast<double>(n);
    return c;
}

}  // namespace one4all::sim
