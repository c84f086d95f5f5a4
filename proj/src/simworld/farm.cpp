#include "one4all/simworld/farm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

namespace one4all::sim {

namespace {

using nlohmann::json;

GpsPoint read_position(const json& coords, const std::string& where) {
    if (!coords.is_array() || coords.size() < 2 || !coords[0].is_number() || !coords[1].is_number()) {
        throw GeoJsonError(where + ": position must be [lon, lat]");
    }
    const double lon = coords[0].get<double>();
    const double lat = coords[1].get<double>();
    if (!std::isfinite(lat) || lat < -90 || lat > 90) {
        throw GeoJsonError(where + ": latitude " + coords[1].dump() + " outside [-90, 90]");
    }
    if (!std::isfinite(lon) || lon < -180 || lon > 180) {
        throw GeoJsonError(where + ": longitude " + coords[0].dump() + " outside [-180, 180]");
    }
    return {lat, lon};
}

Polygon read_ring(const json& coords, const std::string& where) {
    if (!coords.is_array() || coords.empty() || !coords[0].is_array()) {
        throw GeoJsonError(where + ": polygon coordinates must be a list of rings");
    }
    Polygon ring;
    for (const auto& pos : coords[0]) ring.push_back(read_position(pos, where));
    if (ring.size() < 4) throw GeoJsonError(where + ": polygon ring needs at least 4 positions");
    return ring;
}

std::optional<double> number_prop(const json& props, const char* key, const std::string& where) {
    if (!props.contains(key) || props[key].is_null()) return std::nullopt;
    if (!props[key].is_number()) throw GeoJsonError(where + ": property '" + key + "' must be a number");
    return props[key].get<double>();
}

std::string feature_id(const json& f, const json& props, std::size_t index) {
    const json* id = nullptr;
    if (f.contains("id")) id = &f["id"];
    else if (props.contains("id")) id = &props["id"];
    if (id == nullptr || id->is_null()) return "feature-" + std::to_string(index);
    if (id->is_string()) return id->get<std::string>();
    if (id->is_number_integer()) return std::to_string(id->get<long long>());
    return id->dump();
}

}  // namespace

const Feature* FarmModel::find(std::string_view id) const {
    for (const auto& f : features) {
        if (f.id == id) return &f;
    }
    return nullptr;
}

const Feature* FarmModel::nearest_point(const GpsPoint& p, double radius_m) const {
    const Feature* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& f : features) {
        if (!f.is_point()) continue;
        const double d = haversine_m(p, *f.point);
        if (d > radius_m) continue;
        if (d < best_d || (d == best_d && best != nullptr && f.id < best->id)) {
            best = &f;
            best_d = d;
        }
    }
    return best;
}

GpsPoint FarmModel::start_position() const {
    if (start) return *start;
    return centroid(bounds);
}

std::string FarmModel::summary() const {
    std::ostringstream out;
    out << std::setprecision(9);
    out << "FARM with " << features.size() << " features\n";
    if (!bounds.empty()) {
        double min_lat = 90, max_lat = -90, min_lon = 180, max_lon = -180;
        for (const auto& p : bounds) {
            min_lat = std::min(min_lat, p.lat);
            max_lat = std::max(max_lat, p.lat);
            min_lon = std::min(min_lon, p.lon);
            max_lon = std::max(max_lon, p.lon);
        }
        out << "  bounds lat [" << min_lat << ", " << max_lat << "] lon [" << min_lon << ", " << max_lon << "]\n";
    }
    if (start) out << "  rover start " << start->lat << "," << start->lon << "\n";
    for (const auto& f : features) {
        out << "  FEATURE " << f.id;
        if (f.point) out << " at " << f.point->lat << "," << f.point->lon;
        else out << " polygon with " << f.polygon.size() << " vertices";
        if (f.props.species) out << " species=" << *f.props.species;
        if (f.props.temperature) out << " temperature=" << *f.props.temperature;
        if (f.props.co2_flux) out << " co2_flux=" << *f.props.co2_flux;
        if (f.props.canopy_radius) out << " canopy_radius=" << *f.props.canopy_radius;
        out << "\n";
    }
    return out.str();
}

FarmModel load_farm(std::string_view geojson_text) {
    json doc;
    try {
        doc = json::parse(geojson_text);
    } catch (const json::parse_error& e) {
        throw GeoJsonError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection") {
        throw GeoJsonError("top-level object must be a FeatureCollection");
    }
    if (!doc.contains("features") || !doc["features"].is_array()) {
        throw GeoJsonError("FeatureCollection needs a 'features' array");
    }

    FarmModel farm;
    std::set<std::string> ids;
    std::size_t index = 0;
    for (const auto& f : doc["features"]) {
        const std::string where = "feature " + std::to_string(index);
        if (!f.is_object() || f.value("type", "") != "Feature") throw GeoJsonError(where + ": not a Feature");
        const json props = f.contains("properties") && f["properties"].is_object() ? f["properties"] : json::object();
        if (!f.contains("geometry") || !f["geometry"].is_object()) throw GeoJsonError(where + ": missing geometry");
        const auto& geometry = f["geometry"];
        const std::string type = geometry.value("type", "");
        if (!geometry.contains("coordinates")) throw GeoJsonError(where + ": geometry has no coordinates");

        Feature feature;
        feature.id = feature_id(f, props, index);
        if (type == "Point") {
            feature.point = read_position(geometry["coordinates"], where);
        } else if (type == "Polygon") {
            feature.polygon = read_ring(geometry["coordinates"], where);
        } else {
            throw GeoJsonError(where + ": unsupported geometry type '" + type + "'");
        }
        ++index;

        const std::string role = props.contains("role") && props["role"].is_string() ? props["role"].get<std::string>() : "";
        if (role == "boundary") {
            if (feature.is_point()) throw GeoJsonError(where + ": boundary must be a Polygon");
            farm.bounds = feature.polygon;
            continue;
        }
        if (role == "start") {
            if (!feature.is_point()) throw GeoJsonError(where + ": start must be a Point");
            farm.start = feature.point;
            continue;
        }

        if (!ids.insert(feature.id).second) throw GeoJsonError(where + ": duplicate feature id '" + feature.id + "'");
        if (props.contains("species") && !props["species"].is_null()) {
            if (!props["species"].is_string()) throw GeoJsonError(where + ": property 'species' must be a string");
            feature.props.species = props["species"].get<std::string>();
        }
        feature.props.temperature = number_prop(props, "temperature", where);
        feature.props.co2_flux = number_prop(props, "co2_flux", where);
        feature.props.canopy_radius = number_prop(props, "canopy_radius", where);
        for (const auto& [key, value] : props.items()) {
            if (key != "species" && key != "temperature" && key != "co2_flux" && key != "canopy_radius" && key != "id") {
                feature.props.extra[key] = value;
            }
        }
        farm.features.push_back(std::move(feature));
    }

    if (farm.bounds.empty()) {
        if (doc.contains("bbox") && doc["bbox"].is_array() && doc["bbox"].size() == 4) {
            const auto& b = doc["bbox"];
            const GpsPoint lo = read_position(json::array({b[0], b[1]}), "bbox");
            const GpsPoint hi = read_position(json::array({b[2], b[3]}), "bbox");
            farm.bounds = {lo, {lo.lat, hi.lon}, hi, {hi.lat, lo.lon}, lo};
        } else if (!farm.features.empty()) {
            double min_lat = 90, max_lat = -90, min_lon = 180, max_lon = -180;
            for (const auto& f : farm.features) {
                const Polygon pts = f.is_point() ? Polygon{*f.point} : f.polygon;
                for (const auto& p : pts) {
                    min_lat = std::min(min_lat, p.lat);
                    max_lat = std::max(max_lat, p.lat);
                    min_lon = std::min(min_lon, p.lon);
                    max_lon = std::max(max_lon, p.lon);
                }
            }
            farm.bounds = {{min_lat, min_lon}, {min_lat, max_lon}, {max_lat, max_lon}, {max_lat, min_lon}, {min_lat, min_lon}};
        }
    }

    for (const auto& f : farm.features) {
        if (f.is_point() && !contains(farm.bounds, *f.point)) {
            throw GeoJsonError("feature '" + f.id + "' lies outside the farm bounds");
        }
    }
    if (farm.start && !contains(farm.bounds, *farm.start)) throw GeoJsonError("start position lies outside the farm bounds");
    return farm;
}

FarmModel load_farm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GeoJsonError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_farm(buf.str());
}

}  // namespace one4all::sim
