#include "one4all/simworld/world.hpp"

namespace one4all::sim {

SimWorld::SimWorld(FarmModel farm_model, std::vector<SceneObject> objects, std::uint64_t seed, WorldConfig config)
    : farm(std::move(farm_model)), scene(std::move(objects)), config_(std::move(config)), seed_(seed), rng_(seed) {
    rover.position = farm.start_position();
    rover.speed = config_.rover_speed;
    arm.home_pose = config_.arm_home;
    arm.ee_pose = config_.arm_home;
    arm.reach = config_.arm_reach;
}

std::string SimWorld::next_artifact(const std::string& kind) {
    return "sim://" + kind + "/" + std::to_string(++artifacts_);
}

SceneObject* SimWorld::scene_object(const std::string& id) {
    for (auto& o : scene) {
        if (o.id == id) return &o;
    }
    return nullptr;
}

}  // namespace one4all::sim
