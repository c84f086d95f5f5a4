#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "one4all/plan/plan.hpp"
#include "one4all/schema/action_pool.hpp"
#include "one4all/simworld/world.hpp"

namespace one4all::sim {

struct TaskCall {
    std::string task_id;
    std::string action;
    plan::ParamMap params;
};

struct TaskOutcome {
    std::string task_id;
    std::string label;
    nlohmann::json value;  // null when the action reports nothing
    double duration = 0;   // simulated seconds
};

// Raised by a handler that cannot run at all (as opposed to reporting failure).
class BackendFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RobotBackend {
public:
    virtual ~RobotBackend() = default;
    virtual const std::string& robot_id() const = 0;
    virtual const schema::ActionPool& pool() const = 0;
    // Runs one atomic action, advancing the world; the returned label is
    // always declared by the action's spec.
    virtual TaskOutcome execute(const TaskCall& call, SimWorld& world) = 0;
    // Robot state recorded next to each trace entry.
    virtual nlohmann::json snapshot(const SimWorld& world) const = 0;
};

// Wheeled rover: goto_gps, read_temperature, measure_co2, take_thermal_image.
class RoverBackend : public RobotBackend {
public:
    explicit RoverBackend(schema::ActionPool pool);
    const std::string& robot_id() const override { return pool_.robot_id; }
    const schema::ActionPool& pool() const override { return pool_; }
    TaskOutcome execute(const TaskCall& call, SimWorld& world) override;
    nlohmann::json snapshot(const SimWorld& world) const override;

private:
    schema::ActionPool pool_;
};

// Manipulator with a wrist camera: move_pose, move_home, random_move,
// detect_object, nbv, pick, capture_image.
class ArmBackend : public RobotBackend {
public:
    explicit ArmBackend(schema::ActionPool pool);
    const std::string& robot_id() const override { return pool_.robot_id; }
    const schema::ActionPool& pool() const override { return pool_; }
    TaskOutcome execute(const TaskCall& call, SimWorld& world) override;
    nlohmann::json snapshot(const SimWorld& world) const override;

private:
    schema::ActionPool pool_;
};

// Picks the backend kind from the pool's robot id ("husky" or "kortex").
std::unique_ptr<RobotBackend> make_backend(const schema::ActionPool& pool);

nlohmann::json pose_json(const Pose& pose);

}  // namespace one4all::sim
