#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace one4all::sim {

class SceneError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SceneObject {
    std::string id;
    std::string class_name;
    std::string color;
    Eigen::Vector3d position;  // arm base frame, metres
};

// JSON list of {"id", "class_name", "color", "position": [x, y, z]}.
std::vector<SceneObject> load_scene(std::string_view json_text);
std::vector<SceneObject> load_scene_file(const std::string& path);

}  // namespace one4all::sim
