#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "one4all/plan/plan.hpp"
#include "one4all/simworld/backends.hpp"
#include "one4all/simworld/world.hpp"

namespace one4all::exec {

enum class NodeStatus { Succeeded, Failed };
enum class FinalStatus { Completed, Failed };

std::string_view to_string(FinalStatus status);

// A Conditional read the outcome of a task that never ran. Validated plans
// cannot reach this.
class MissingOutcome : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct BranchDecision {
    std::string path;      // of the Conditional
    std::string on;        // referenced task id
    std::string observed;  // that task's outcome label
    std::string taken;     // branch outcome label, "else", or "none"
    bool operator==(const BranchDecision&) const = default;
};

struct TraceEntry {
    std::size_t seq = 0;
    std::string path;
    std::string action;
    plan::ParamMap params;
    sim::TaskOutcome outcome;
    nlohmann::json state;  // robot snapshot after the task
    double timestamp = 0;  // simulated clock after the task, seconds
};

struct ExecutionTrace {
    std::string mission_id;
    std::string robot_id;
    std::uint64_t seed = 0;
    std::vector<TraceEntry> entries;
    std::vector<BranchDecision> branches;
    FinalStatus final_status = FinalStatus::Completed;
    std::optional<std::string> fault;  // set when a backend fault ended the mission
};

struct RunOptions {
    double task_timeout = 60.0;  // simulated seconds
};

// Label source for the tree walk: returns the outcome label of a dispatched
// task, or nullopt to abort the mission.
using Dispatch = std::function<std::optional<std::string>(const plan::Task& task, const std::string& path)>;

struct InterpretResult {
    NodeStatus status = NodeStatus::Succeeded;
    bool aborted = false;
    std::vector<std::string> dispatched;  // task ids, in order
    std::vector<BranchDecision> branches;
};

// Single-pass depth-first walk. A task fails when its label is "failure" and
// no Conditional in the tree reads it; a Sequence stops at its first failed
// child; a Conditional runs the matching branch, else its else-branch, else
// succeeds without running anything.
InterpretResult interpret(const plan::MissionPlan& plan, const Dispatch& dispatch);

// Interprets `plan` against `backend`, advancing `world`.
// Throws std::invalid_argument if the backend serves a different robot.
ExecutionTrace run(const plan::MissionPlan& plan, sim::RobotBackend& backend, sim::SimWorld& world,
                   const RunOptions& options = {});

// Re-walks `plan` feeding the labels recorded in `trace`, in order.
InterpretResult replay(const plan::MissionPlan& plan, const ExecutionTrace& trace);

}  // namespace one4all::exec
