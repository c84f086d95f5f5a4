#include "one4all/simworld/scene.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace one4all::sim {

std::vector<SceneObject> load_scene(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SceneError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_array()) throw SceneError("scene must be a JSON list of objects");
    std::vector<SceneObject> scene;
    std::set<std::string> ids;
    for (const auto& o : doc) {
        if (!o.is_object() || !o.contains("id") || !o["id"].is_string()) throw SceneError("scene object needs a string id");
        SceneObject obj;
        obj.id = o["id"].get<std::string>();
        if (!ids.insert(obj.id).second) throw SceneError("duplicate scene object id '" + obj.id + "'");
        if (!o.contains("class_name") || !o["class_name"].is_string()) {
            throw SceneError("scene object '" + obj.id + "' needs a class_name");
        }
        obj.class_name = o["class_name"].get<std::string>();
        obj.color = o.contains("color") && o["color"].is_string() ? o["color"].get<std::string>() : "";
        const auto& p = o.contains("position") ? o["position"] : nlohmann::json();
        if (!p.is_array() || p.size() != 3) throw SceneError("scene object '" + obj.id + "' needs position [x, y, z]");
        for (int i = 0; i < 3; ++i) {
            if (!p[i].is_number() || !std::isfinite(p[i].get<double>())) {
                throw SceneError("scene object '" + obj.id + "' has a non-numeric position");
            }
            obj.position[i] = p[i].get<double>();
        }
        scene.push_back(std::move(obj));
    }
    return scene;
}

std::vector<SceneObject> load_scene_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SceneError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scene(buf.str());
}

}  // namespace one4all::sim
