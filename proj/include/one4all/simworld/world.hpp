#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "one4all/simworld/farm.hpp"
#include "one4all/simworld/pose.hpp"
#include "one4all/simworld/scene.hpp"

namespace one4all::sim {

struct WorldConfig {
    double rover_speed = 1.0;             // m/s
    double sensor_radius = 5.0;           // m
    double ambient_temperature = 20.0;    // degrees C
    double ambient_co2_flux = 0.0;        // umol m^-2 s^-1
    double arm_reach = 0.9;               // m
    Pose arm_home{Eigen::Vector3d(0.35, 0.0, 0.4), Eigen::Quaterniond::Identity()};
    double ee_speed = 0.25;               // m/s
    double ee_angular_speed = 1.5707963267948966;  // rad/s
    double camera_half_angle_deg = 35.0;
    double camera_range = 1.5;            // m
    double pick_tolerance = 0.1;          // m
    double random_move_min = 0.2;         // m; upper bound is 0.8 * reach
    double cloud_sigma = 0.02;            // m
    int cloud_points = 500;
};

struct RoverState {
    GpsPoint position;
    double speed = 1.0;
};

struct ArmState {
    Pose ee_pose;
    Pose home_pose;
    double reach = 0.9;
    std::optional<std::string> gripper_holding;
};

// Mutable simulation state owned by one mission at a time. Copying a world
// yields an independent clone, including the random generator state.
class SimWorld {
public:
    SimWorld(FarmModel farm, std::vector<SceneObject> scene, std::uint64_t seed, WorldConfig config = {});

    const WorldConfig& config() const { return config_; }
    std::uint64_t seed() const { return seed_; }
    std::mt19937_64& rng() { return rng_; }

    double clock() const { return clock_; }
    void advance(double seconds) { clock_ += seconds; }

    // Deterministic artifact reference, e.g. "sim://thermal_image/3".
    std::string next_artifact(const std::string& kind);

    SceneObject* scene_object(const std::string& id);

    FarmModel farm;
    std::vector<SceneObject> scene;
    RoverState rover;
    ArmState arm;
    // Objects located by detection: id -> base-frame position.
    std::map<std::string, Eigen::Vector3d> known_objects;
    // Most recent detection per class name, so plans may name a class.
    std::map<std::string, std::string> last_detected;

private:
    WorldConfig config_;
    std::uint64_t seed_;
    std::mt19937_64 rng_;
    double clock_ = 0.0;
    std::uint64_t artifacts_ = 0;
};

}  // namespace one4all::sim
