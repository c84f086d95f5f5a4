#include "one4all/executor/interpreter.hpp"

#include <map>

namespace one4all::exec {

namespace {

std::string element_name(const plan::Node& n) {
    if (n.is_sequence()) return "sequence";
    if (n.is_task()) return "task";
    return "conditional";
}

class Walker {
public:
    Walker(const plan::MissionPlan& plan, const Dispatch& dispatch) : dispatch_(dispatch) {
        for (const auto& id : plan::branched_task_ids(plan.root)) consumed_.insert(id);
    }

    InterpretResult result;

    NodeStatus walk(const plan::Node& node, const std::string& path) {
        if (node.is_task()) return task(node.task(), path);
        if (node.is_sequence()) return sequence(node.sequence(), path);
        return conditional(node.conditional(), path);
    }

private:
    NodeStatus task(const plan::Task& t, const std::string& path) {
        const auto label = dispatch_(t, path);
        result.dispatched.push_back(t.id);
        if (!label) {
            result.aborted = true;
            return NodeStatus::Failed;
        }
        outcomes_[t.id] = *label;
        return (*label == "failure" && consumed_.count(t.id) == 0) ? NodeStatus::Failed : NodeStatus::Succeeded;
    }

    NodeStatus sequence(const plan::Sequence& s, const std::string& path) {
        std::map<std::string, std::size_t> counters;
        for (const auto& child : s.children) {
            const std::string name = element_name(child);
            const auto status = walk(child, path + "/" + name + "[" + std::to_string(++counters[name]) + "]");
            if (status == NodeStatus::Failed || result.aborted) return NodeStatus::Failed;
        }
        return NodeStatus::Succeeded;
    }

    NodeStatus conditional(const plan::Conditional& c, const std::string& path) {
        const auto it = outcomes_.find(c.on);
        if (it == outcomes_.end()) throw MissingOutcome("conditional at " + path + " reads task '" + c.on + "' which has not run");
        BranchDecision decision{path, c.on, it->second, "none"};
        std::size_t index = 0;
        for (const auto& b : c.branches) {
            ++index;
            if (b.outcome == it->second) {
                decision.taken = b.outcome;
                result.branches.push_back(decision);
                return walk(*b.body, path + "/branch[" + std::to_string(index) + "]/" + element_name(*b.body));
            }
        }
        if (c.else_branch) {
            decision.taken = "else";
            result.branches.push_back(decision);
            return walk(**c.else_branch, path + "/else/" + element_name(**c.else_branch));
        }
        result.branches.push_back(decision);
        return NodeStatus::Succeeded;
    }

    const Dispatch& dispatch_;
    std::set<std::string> consumed_;
    std::map<std::string, std::string> outcomes_;
};

}  // namespace

std::string_view to_string(FinalStatus status) {
    return status == FinalStatus::Completed ? "completed" : "failed";
}

InterpretResult interpret(const plan::MissionPlan& plan, const Dispatch& dispatch) {
    Walker walker(plan, dispatch);
    walker.result.status = walker.walk(plan.root, "/mission/" + element_name(plan.root));
    if (walker.result.aborted) walker.result.status = NodeStatus::Failed;
    return std::move(walker.result);
}

ExecutionTrace run(const plan::MissionPlan& plan, sim::RobotBackend& backend, sim::SimWorld& world,
                   const RunOptions& options) {
    if (backend.robot_id() != plan.robot_id) {
        throw std::invalid_argument("plan targets robot '" + plan.robot_id + "' but backend serves '" +
                                    backend.robot_id() + "'");
    }
    ExecutionTrace trace;
    trace.mission_id = plan.mission_id;
    trace.robot_id = plan.robot_id;
    trace.seed = world.seed();

    const Dispatch dispatch = [&](const plan::Task& task, const std::string& path) -> std::optional<std::string> {
        TraceEntry entry;
        entry.seq = trace.entries.size() + 1;
        entry.path = path;
        entry.action = task.action;
        entry.params = task.params;
        bool ok = true;
        try {
            entry.outcome = backend.execute({task.id, task.action, task.params}, world);
            const auto* spec = schema::lookup(backend.pool(), task.action);
            if (spec == nullptr || !spec->declares_outcome(entry.outcome.label)) {
                throw sim::BackendFault("handler for '" + task.action + "' returned undeclared outcome '" +
                                        entry.outcome.label + "'");
            }
        } catch (const std::exception& e) {
            entry.outcome = {task.id, "failure", nlohmann::json{{"fault", e.what()}}, 0.0};
            trace.fault = "task '" + task.id + "': " + e.what();
            ok = false;
        }
        entry.outcome.task_id = task.id;
        if (ok && entry.outcome.duration > options.task_timeout) {
            entry.outcome.value = nlohmann::json{{"reason", "timeout"},
                                                 {"timeout", options.task_timeout},
                                                 {"label", entry.outcome.label},
                                                 {"value", entry.outcome.value}};
            entry.outcome.label = "failure";
            entry.outcome.duration = options.task_timeout;
        }
        world.advance(entry.outcome.duration);
        entry.timestamp = world.clock();
        entry.state = backend.snapshot(world);
        const std::string label = entry.outcome.label;
        trace.entries.push_back(std::move(entry));
        if (!ok) return std::nullopt;
        return label;
    };

    const auto result = interpret(plan, dispatch);
    trace.branches = result.branches;
    trace.final_status = result.status == NodeStatus::Succeeded ? FinalStatus::Completed : FinalStatus::Failed;
    return trace;
}

InterpretResult replay(const plan::MissionPlan& plan, const ExecutionTrace& trace) {
    std::size_t next = 0;
    const Dispatch dispatch = [&](const plan::Task& task, const std::string& path) -> std::optional<std::string> {
        if (next >= trace.entries.size()) throw std::runtime_error("trace ended before task '" + task.id + "' at " + path);
        const auto& e = trace.entries[next++];
        if (e.outcome.task_id != task.id) {
            throw std::runtime_error("trace records task '" + e.outcome.task_id + "' where '" + task.id + "' ran");
        }
        if (trace.fault && next == trace.entries.size()) return std::nullopt;
        return e.outcome.label;
    };
    return interpret(plan, dispatch);
}

}  // namespace one4all::exec
