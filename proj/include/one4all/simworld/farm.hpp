#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "one4all/simworld/geo.hpp"

namespace one4all::sim {

class GeoJsonError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FeatureProps {
    std::optional<std::string> species;
    std::optional<double> temperature;    // degrees C
    std::optional<double> co2_flux;       // umol m^-2 s^-1
    std::optional<double> canopy_radius;  // m
    nlohmann::json extra = nlohmann::json::object();  // unrecognised properties, verbatim
};

struct Feature {
    std::string id;
    std::optional<GpsPoint> point;  // set for Point geometry
    Polygon polygon;                // set for Polygon geometry (outer ring)
    FeatureProps props;

    bool is_point() const { return point.has_value(); }
};

// Structural features are recognised by a "role" property: "boundary" (a
// Polygon giving the farm bounds) and "start" (a Point giving the rover's
// initial position). They are not listed in `features`.
struct FarmModel {
    std::vector<Feature> features;
    Polygon bounds;
    std::optional<GpsPoint> start;

    const Feature* find(std::string_view id) const;
    // Nearest point feature within `radius_m` of `p`; ties go to the smaller id.
    const Feature* nearest_point(const GpsPoint& p, double radius_m) const;
    // Rover start: the "start" feature, else the bounds centroid.
    GpsPoint start_position() const;
    // Compact text description for planner prompts.
    std::string summary() const;
};

FarmModel load_farm(std::string_view geojson_text);
FarmModel load_farm_file(const std::string& path);

}  // namespace one4all::sim
