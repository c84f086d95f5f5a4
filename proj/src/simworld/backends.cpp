#include "one4all/simworld/backends.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace one4all::sim {

namespace {

using nlohmann::json;

constexpr double kDegToRad = std::numbers::pi / 180.0;

TaskOutcome outcome(const TaskCall& call, std::string label, json value, double duration) {
    return {call.task_id, std::move(label), std::move(value), duration};
}

TaskOutcome failure(const TaskCall& call, const std::string& reason, double duration = 0.0) {
    return outcome(call, "failure", json{{"reason", reason}}, duration);
}

const std::string* param(const TaskCall& call, const std::string& name) {
    const auto it = call.params.find(name);
    return it == call.params.end() ? nullptr : &it->second;
}

double float_param(const TaskCall& call, const std::string& name, double fallback) {
    const auto* text = param(call, name);
    if (text == nullptr) return fallback;
    const auto v = validation::parse_float(*text);
    if (!v) throw BackendFault("param '" + name + "' is not a number: " + *text);
    return *v;
}

std::optional<double> optional_float(const TaskCall& call, const std::string& name) {
    if (param(call, name) == nullptr) return std::nullopt;
    return float_param(call, name, 0.0);
}

const std::string& required(const TaskCall& call, const std::string& name) {
    const auto* text = param(call, name);
    if (text == nullptr) throw BackendFault("action '" + call.action + "' missing param '" + name + "'");
    return *text;
}

json vec_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

// --- rover -----------------------------------------------------------------

TaskOutcome threshold_reading(const TaskCall& call, double reading, const char* unit, double duration) {
    const auto low = optional_float(call, "low_threshold");
    const auto high = optional_float(call, "high_threshold");
    std::string label = "success";
    if (low && reading < *low) label = "low";
    else if (high && reading > *high) label = "high";
    return outcome(call, label, json{{"reading", reading}, {"unit", unit}}, duration);
}

// --- arm -------------------------------------------------------------------

double motion_time(const SimWorld& world, const Pose& from, const Pose& to) {
    const double translation = (to.position - from.position).norm();
    const double rotation = from.orientation.angularDistance(to.orientation);
    return translation / world.config().ee_speed + rotation / world.config().ee_angular_speed;
}

// Moves the end effector, carrying any held object along.
double move_ee(SimWorld& world, const Pose& target) {
    const double t = motion_time(world, world.arm.ee_pose, target);
    world.arm.ee_pose = target;
    if (world.arm.gripper_holding) {
        if (auto* held = world.scene_object(*world.arm.gripper_holding)) held->position = target.position;
    }
    return t;
}

bool reachable(const SimWorld& world, const Eigen::Vector3d& p) { return p.norm() <= world.arm.reach + 1e-12; }

// Resolves a target by object id, or by class name via the latest detection.
std::optional<std::pair<std::string, Eigen::Vector3d>> resolve_target(const SimWorld& world, const std::string& name) {
    if (auto it = world.known_objects.find(name); it != world.known_objects.end()) return std::make_pair(it->first, it->second);
    if (auto it = world.last_detected.find(name); it != world.last_detected.end()) {
        return std::make_pair(it->second, world.known_objects.at(it->second));
    }
    return std::nullopt;
}

TaskOutcome arm_move_pose(const TaskCall& call, SimWorld& world) {
    const auto parsed = validation::parse_pose6d(required(call, "pose"));
    if (!parsed) throw BackendFault("param 'pose' is not a pose6d");
    const auto* mode = param(call, "mode");
    const bool relative = mode != nullptr && *mode == "relative";
    const Pose given = to_pose(*parsed);
    const Pose target = relative ? compose_relative(world.arm.ee_pose, given) : given;
    if (!reachable(world, target.position)) {
        return failure(call, "target lies beyond the arm reach of " + std::to_string(world.arm.reach) + " m");
    }
    const double t = move_ee(world, target);
    return outcome(call, "success", json{{"pose", pose_json(target)}}, t);
}

TaskOutcome arm_random_move(const TaskCall& call, SimWorld& world) {
    auto& rng = world.rng();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r_min = world.config().random_move_min;
    const double r_max = 0.8 * world.arm.reach;
    // Uniform in volume: radius from the cube-root CDF, direction uniform on the upper hemisphere.
    const double r = std::cbrt(r_min * r_min * r_min + unit(rng) * (r_max * r_max * r_max - r_min * r_min * r_min));
    const double cos_polar = unit(rng);
    const double azimuth = 2.0 * std::numbers::pi * unit(rng);
    const double sin_polar = std::sqrt(1.0 - cos_polar * cos_polar);
    Pose target;
    target.position = r * Eigen::Vector3d(sin_polar * std::cos(azimuth), sin_polar * std::sin(azimuth), cos_polar);
    target.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(azimuth, Eigen::Vector3d::UnitZ()));
    const double t = move_ee(world, target);
    return outcome(call, "success", json{{"pose", pose_json(target)}}, t);
}

// 1.0 on the optical axis, falling linearly to 0.5 at the cone edge.
double detection_confidence(const Pose& camera, const Eigen::Vector3d& p, double half_angle) {
    const Eigen::Vector3d v = p - camera.position;
    if (v.norm() < 1e-12) return 1.0;
    const double angle = std::acos(std::clamp(forward_axis(camera.orientation).dot(v.normalized()), -1.0, 1.0));
    return 1.0 - 0.5 * std::min(angle / half_angle, 1.0);
}

TaskOutcome arm_detect(const TaskCall& call, SimWorld& world) {
    const auto* class_name = param(call, "class_name");
    const auto* color = param(call, "color");
    const double min_confidence = float_param(call, "min_confidence", 0.0);
    const double half_angle = world.config().camera_half_angle_deg * kDegToRad;
    const SceneObject* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& o : world.scene) {
        if (world.arm.gripper_holding && *world.arm.gripper_holding == o.id) continue;
        if (class_name != nullptr && o.class_name != *class_name) continue;
        if (color != nullptr && o.color != *color) continue;
        if (!in_view_cone(world.arm.ee_pose, o.position, half_angle, world.config().camera_range)) continue;
        if (detection_confidence(world.arm.ee_pose, o.position, half_angle) < min_confidence) continue;
        const double d = (o.position - world.arm.ee_pose.position).norm();
        if (d < best_d || (d == best_d && best != nullptr && o.id < best->id)) {
            best = &o;
            best_d = d;
        }
    }
    constexpr double kDetectSeconds = 0.5;
    if (best == nullptr) return failure(call, "no matching object in view", kDetectSeconds);
    world.known_objects[best->id] = best->position;
    world.last_detected[best->class_name] = best->id;
    return outcome(call, "success",
                   json{{"object_id", best->id},
                        {"class_name", best->class_name},
                        {"color", best->color},
                        {"position", vec_json(best->position)},
                        {"distance", best_d},
                        {"confidence", detection_confidence(world.arm.ee_pose, best->position, half_angle)}},
                   kDetectSeconds);
}

TaskOutcome arm_nbv(const TaskCall& call, SimWorld& world) {
    const auto target = resolve_target(world, required(call, "target_object"));
    if (!target) return failure(call, "object '" + required(call, "target_object") + "' has not been detected");
    const double k_value = float_param(call, "k", 6);
    const int k = static_cast<int>(k_value);
    if (k < 1 || k != k_value) throw BackendFault("param 'k' must be a positive integer");
    const double radius = float_param(call, "radius", 0.3);

    const auto views = nbv_viewpoints(target->second, k, radius);
    std::vector<Pose> visited;
    for (const auto& v : views) {
        if (reachable(world, v.position)) visited.push_back(v);
    }
    const auto needed = static_cast<std::size_t>((k + 1) / 2);
    if (visited.size() < needed) {
        return failure(call, std::to_string(visited.size()) + " of " + std::to_string(k) +
                                 " viewpoints reachable, need " + std::to_string(needed));
    }
    constexpr double kCaptureSeconds = 0.5;
    double t = 0;
    std::vector<std::vector<Eigen::Vector3d>> slices;
    json poses = json::array();
    for (const auto& v : visited) {
        t += move_ee(world, v) + kCaptureSeconds;
        slices.push_back(capture_slice(v, target->second, world.config().cloud_sigma, world.config().cloud_points, world.rng()));
        poses.push_back(pose_json(v));
    }
    const auto merged = merge_slices(visited, slices);
    return outcome(call, "success",
                   json{{"object_id", target->first},
                        {"viewpoints", k},
                        {"captured", visited.size()},
                        {"merged_points", merged.size()},
                        {"cloud", world.next_artifact("point_cloud")},
                        {"poses", poses}},
                   t);
}

TaskOutcome arm_pick(const TaskCall& call, SimWorld& world) {
    if (world.arm.gripper_holding) return failure(call, "gripper already holds '" + *world.arm.gripper_holding + "'");
    const auto target = resolve_target(world, required(call, "target_object"));
    if (!target) return failure(call, "object '" + required(call, "target_object") + "' has not been detected");
    Pose approach = world.arm.ee_pose;
    approach.position = target->second;
    if (!reachable(world, approach.position)) approach.position = target->second.normalized() * world.arm.reach;
    constexpr double kGraspSeconds = 1.0;
    const double t = move_ee(world, approach) + kGraspSeconds;
    const double gap = (approach.position - target->second).norm();
    if (gap > world.config().pick_tolerance) return failure(call, "object out of reach", t);
    world.arm.gripper_holding = target->first;
    if (auto* o = world.scene_object(target->first)) o->position = approach.position;
    return outcome(call, "success", json{{"object_id", target->first}}, t);
}

}  // namespace

json pose_json(const Pose& pose) {
    const auto& q = pose.orientation;
    return json::array({pose.position.x(), pose.position.y(), pose.position.z(), q.w(), q.x(), q.y(), q.z()});
}

RoverBackend::RoverBackend(schema::ActionPool pool) : pool_(std::move(pool)) {}

TaskOutcome RoverBackend::execute(const TaskCall& call, SimWorld& world) {
    auto& rover = world.rover;
    if (call.action == "goto_gps") {
        const GpsPoint target{float_param(call, "lat", rover.position.lat), float_param(call, "lon", rover.position.lon)};
        if (!contains(world.farm.bounds, target)) return failure(call, "target lies outside the farm boundary");
        const double distance = haversine_m(rover.position, target);
        rover.position = target;
        return outcome(call, "success", json{{"distance", distance}}, distance / rover.speed);
    }
    if (call.action == "read_temperature" || call.action == "measure_co2") {
        const bool temperature = call.action == "read_temperature";
        double reading = temperature ? world.config().ambient_temperature : world.config().ambient_co2_flux;
        if (const auto* f = world.farm.nearest_point(rover.position, world.config().sensor_radius)) {
            const auto& prop = temperature ? f->props.temperature : f->props.co2_flux;
            if (prop) reading = *prop;
        }
        return threshold_reading(call, reading, temperature ? "C" : "umol/m2/s", temperature ? 2.0 : 10.0);
    }
    if (call.action == "take_thermal_image") {
        return outcome(call, "success", json{{"artifact", world.next_artifact("thermal_image")}}, 1.0);
    }
    throw BackendFault("rover has no handler for action '" + call.action + "'");
}

json RoverBackend::snapshot(const SimWorld& world) const {
    return json{{"lat", world.rover.position.lat}, {"lon", world.rover.position.lon}, {"speed", world.rover.speed}};
}

ArmBackend::ArmBackend(schema::ActionPool pool) : pool_(std::move(pool)) {}

TaskOutcome ArmBackend::execute(const TaskCall& call, SimWorld& world) {
    if (call.action == "move_pose") return arm_move_pose(call, world);
    if (call.action == "move_home") {
        const double t = move_ee(world, world.arm.home_pose);
        return outcome(call, "success", json{{"pose", pose_json(world.arm.home_pose)}}, t);
    }
    if (call.action == "random_move") return arm_random_move(call, world);
    if (call.action == "detect_object") return arm_detect(call, world);
    if (call.action == "nbv") return arm_nbv(call, world);
    if (call.action == "pick") return arm_pick(call, world);
    if (call.action == "capture_image") {
        return outcome(call, "success", json{{"artifact", world.next_artifact("image")}}, 0.2);
    }
    throw BackendFault("arm has no handler for action '" + call.action + "'");
}

json ArmBackend::snapshot(const SimWorld& world) const {
    return json{{"ee_pose", pose_json(world.arm.ee_pose)},
                {"holding", world.arm.gripper_holding ? json(*world.arm.gripper_holding) : json(nullptr)}};
}

std::unique_ptr<RobotBackend> make_backend(const schema::ActionPool& pool) {
    if (pool.robot_id == "husky") return std::make_unique<RoverBackend>(pool);
    if (pool.robot_id == "kortex") return std::make_unique<ArmBackend>(pool);
    throw std::invalid_argument("no simulated backend for robot '" + pool.robot_id + "'");
}

}  // namespace one4all::sim
