#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "one4all/plan/plan.hpp"
#include "one4all/schema/action_pool.hpp"
#include "one4all/simworld/backends.hpp"
#include "one4all/simworld/world.hpp"
#include "one4all/wire/message.hpp"

namespace one4all::testing {

using Rng = std::mt19937_64;

std::filesystem::path corpus_dir();
std::string read_text(const std::filesystem::path& path);
std::vector<schema::ActionPool> corpus_pools();
const schema::ActionPool& corpus_pool(const std::string& robot_id);
// Sorted list of corpus/plans/*.xml.
std::vector<std::filesystem::path> corpus_plan_files();
// Text of the corpus plan whose file name starts with `prefix`, e.g. "03".
std::string corpus_plan(const std::string& prefix);
sim::FarmModel corpus_farm();
std::vector<sim::SceneObject> corpus_scene();

// --- generators ---------------------------------------------------------

struct ShapeOptions {
    int max_tasks = 6;
    int max_conditionals = 3;
    int max_depth = 3;
    std::string action = "act";
    std::vector<std::string> labels = {"success", "failure"};
};

// Random behavior tree whose tasks all use options.action and whose
// conditionals only read tasks that are certain to have run.
plan::MissionPlan random_shape(Rng& rng, const ShapeOptions& options = {});

// Random well-formed plan with arbitrary text in params and query, for
// parse/serialize round trips.
plan::MissionPlan random_roundtrip_plan(Rng& rng);

// Arbitrary XML-legal text including markup characters and non-ASCII.
std::string random_text(Rng& rng, std::size_t max_len);
std::string random_identifier(Rng& rng);

wire::Message random_message(Rng& rng);

// Pool with one action "act" whose outcomes are success and failure.
schema::ActionPool binary_pool(const std::string& robot_id = "bot");

// Task ids in document order.
std::vector<std::string> task_ids(const plan::Node& root);

// Independent evaluator for the tree semantics: returns dispatched task ids.
std::vector<std::string> reference_dispatch(const plan::Node& root, const std::map<std::string, std::string>& labels);

// Backend answering each task with a fixed label (default "success").
class ScriptedBackend : public sim::RobotBackend {
public:
    ScriptedBackend(schema::ActionPool pool, std::map<std::string, std::string> labels);
    const std::string& robot_id() const override { return pool_.robot_id; }
    const schema::ActionPool& pool() const override { return pool_; }
    sim::TaskOutcome execute(const sim::TaskCall& call, sim::SimWorld& world) override;
    nlohmann::json snapshot(const sim::SimWorld& world) const override;

    std::vector<std::string> calls;
    std::map<std::string, double> durations;  // per task id, default 1 s
    std::string throw_on;                     // task id whose handler throws

private:
    schema::ActionPool pool_;
    std::map<std::string, std::string> labels_;
};

sim::SimWorld empty_world(std::uint64_t seed = 0);

}  // namespace one4all::testing

namespace one4all::testing {

// Lines of headers/sources under `dirs` (relative to the source tree) that
// include a planner or gateway header. Empty when the split is intact.
std::vector<std::string> forbidden_includes(const std::vector<std::string>& dirs);

}  // namespace one4all::testing
