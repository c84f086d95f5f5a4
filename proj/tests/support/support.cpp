#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "one4all/simworld/farm.hpp"
#include "one4all/simworld/scene.hpp"

namespace one4all::testing {

namespace fs = std::filesystem;

fs::path corpus_dir() { return fs::path(ONE4ALL_CORPUS_DIR); }

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<schema::ActionPool> corpus_pools() {
    return {schema::load_pool_file((corpus_dir() / "schemas" / "husky.xml").string()),
            schema::load_pool_file((corpus_dir() / "schemas" / "kortex.xml").string())};
}

const schema::ActionPool& corpus_pool(const std::string& robot_id) {
    static const auto pools = corpus_pools();
    for (const auto& p : pools) {
        if (p.robot_id == robot_id) return p;
    }
    throw std::runtime_error("no corpus pool " + robot_id);
}

std::vector<fs::path> corpus_plan_files() {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(corpus_dir() / "plans")) {
        if (e.path().extension() == ".xml") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string corpus_plan(const std::string& prefix) {
    for (const auto& p : corpus_plan_files()) {
        if (p.filename().string().rfind(prefix, 0) == 0) return read_text(p);
    }
    throw std::runtime_error("no corpus plan " + prefix);
}

sim::FarmModel corpus_farm() { return sim::load_farm_file((corpus_dir() / "worlds" / "pistachio_farm.geojson").string()); }

std::vector<sim::SceneObject> corpus_scene() {
    return sim::load_scene_file((corpus_dir() / "worlds" / "kortex_scene.json").string());
}

// --- generators ---------------------------------------------------------

namespace {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

class ShapeGen {
public:
    ShapeGen(Rng& rng, const ShapeOptions& o) : rng_(rng), o_(o) {}

    plan::Node root() {
        std::vector<std::string> visible;
        if (coin(rng_, 0.1)) return task(visible);
        return sequence(visible, 0);
    }

private:
    plan::Node task(std::vector<std::string>& visible) {
        const std::string id = "t" + std::to_string(++tasks_);
        visible.push_back(id);
        return plan::make_task(id, o_.action);
    }

    // `visible` gains the ids of tasks this sequence is guaranteed to run.
    plan::Node sequence(std::vector<std::string>& visible, int depth) {
        std::vector<plan::Node> children;
        const int n = uniform(rng_, 0, 4);
        for (int i = 0; i < n; ++i) {
            const int roll = uniform(rng_, 0, 9);
            if (roll < 2 && depth < o_.max_depth) {
                children.push_back(sequence(visible, depth + 1));
            } else if (roll < 6 && !visible.empty() && conditionals_ < o_.max_conditionals && depth < o_.max_depth) {
                children.push_back(conditional(visible, depth));
            } else if (tasks_ < o_.max_tasks) {
                children.push_back(task(visible));
            }
        }
        return plan::make_sequence(std::move(children));
    }

    plan::Node body(const std::vector<std::string>& visible, int depth) {
        auto local = visible;
        const int roll = uniform(rng_, 0, 9);
        if (roll < 5 && tasks_ < o_.max_tasks) return task(local);
        if (roll < 7 && !local.empty() && conditionals_ < o_.max_conditionals && depth < o_.max_depth) {
            return conditional(local, depth);
        }
        return sequence(local, depth + 1);
    }

    plan::Node conditional(const std::vector<std::string>& visible, int depth) {
        ++conditionals_;
        const std::string on = visible[static_cast<std::size_t>(uniform(rng_, 0, static_cast<int>(visible.size()) - 1))];
        std::vector<std::pair<std::string, plan::Node>> branches;
        for (const auto& label : o_.labels) {
            if (coin(rng_, 0.6)) branches.emplace_back(label, body(visible, depth + 1));
        }
        std::optional<plan::Node> otherwise;
        if (branches.empty() || coin(rng_, 0.3)) otherwise = body(visible, depth + 1);
        return plan::make_conditional(on, std::move(branches), std::move(otherwise));
    }

    Rng& rng_;
    const ShapeOptions& o_;
    int tasks_ = 0;
    int conditionals_ = 0;
};

void collect_ids(const plan::Node& n, std::vector<std::string>& out) {
    if (n.is_task()) {
        out.push_back(n.task().id);
    } else if (n.is_sequence()) {
        for (const auto& c : n.sequence().children) collect_ids(c, out);
    } else {
        for (const auto& b : n.conditional().branches) collect_ids(*b.body, out);
        if (n.conditional().else_branch) collect_ids(**n.conditional().else_branch, out);
    }
}

}  // namespace

plan::MissionPlan random_shape(Rng& rng, const ShapeOptions& options) {
    ShapeGen gen(rng, options);
    plan::MissionPlan p;
    p.mission_id = "m" + std::to_string(rng() % 100000);
    p.robot_id = "bot";
    p.root = gen.root();
    return p;
}

std::string random_identifier(Rng& rng) {
    static const std::string first = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_";
    static const std::string rest = first + "0123456789.-";
    std::string s(1, first[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(first.size()) - 1))]);
    const int n = uniform(rng, 0, 10);
    for (int i = 0; i < n; ++i) s += rest[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(rest.size()) - 1))];
    return s;
}

std::string random_text(Rng& rng, std::size_t max_len) {
    static const std::vector<std::string> pieces = {
        "a", "Z", "7", " ", "  ", "\t", "\n", "\r", "\r\n", "<", ">", "&", "\"", "'", "]]>", "&amp;", "=",
        "\xc3\xa9", "\xe2\x82\xac", "\xf0\x9f\x8c\xb3", "pistachio", ",", "-0.5", "{{QUERY}}"};
    std::string s;
    const auto n = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(max_len)));
    while (s.size() < n) s += pieces[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(pieces.size()) - 1))];
    return s;
}

plan::MissionPlan random_roundtrip_plan(Rng& rng) {
    ShapeOptions o;
    o.max_tasks = uniform(rng, 0, 12);
    o.max_conditionals = uniform(rng, 0, 4);
    o.max_depth = 4;
    o.labels = {"success", "failure", "low", "high"};
    auto p = random_shape(rng, o);
    p.mission_id = random_identifier(rng);
    p.robot_id = random_identifier(rng);
    p.source_query = random_text(rng, 40);
    // Give tasks varied actions and free-text params.
    std::function<void(plan::Node&)> decorate = [&](plan::Node& n) {
        if (auto* t = std::get_if<plan::Task>(&n.value)) {
            t->action = random_identifier(rng);
            const int params = uniform(rng, 0, 3);
            for (int i = 0; i < params; ++i) t->params[random_identifier(rng)] = random_text(rng, 20);
        } else if (auto* s = std::get_if<plan::Sequence>(&n.value)) {
            for (auto& c : s->children) decorate(c);
        } else if (auto* c = std::get_if<plan::Conditional>(&n.value)) {
            for (auto& b : c->branches) decorate(*b.body);
            if (c->else_branch) decorate(**c->else_branch);
        }
    };
    decorate(p.root);
    return p;
}

wire::Message random_message(Rng& rng) {
    const std::string id = random_identifier(rng);
    switch (uniform(rng, 0, 3)) {
        case 0: return wire::SubmitPlan::make(id, random_text(rng, 200));
        case 1: {
            wire::Ack a{id, coin(rng), std::nullopt};
            if (coin(rng)) a.reason = random_text(rng, 60);
            return a;
        }
        case 2: return wire::FetchReport{id};
        default: {
            const wire::ReportStatus statuses[] = {wire::ReportStatus::Completed, wire::ReportStatus::Failed,
                                                   wire::ReportStatus::Unknown};
            return wire::Report{id, statuses[uniform(rng, 0, 2)], random_text(rng, 300)};
        }
    }
}

schema::ActionPool binary_pool(const std::string& robot_id) {
    return schema::load_pool("<actionpool robot=\"" + robot_id +
                             "\" version=\"1\"><action name=\"act\"><outcome>success</outcome>"
                             "<outcome>failure</outcome></action></actionpool>");
}

std::vector<std::string> task_ids(const plan::Node& root) {
    std::vector<std::string> out;
    collect_ids(root, out);
    return out;
}

// Written from the semantics description, without looking at the interpreter.
std::vector<std::string> reference_dispatch(const plan::Node& root, const std::map<std::string, std::string>& labels) {
    std::set<std::string> read;
    std::function<void(const plan::Node&)> scan = [&](const plan::Node& n) {
        if (n.is_sequence()) for (const auto& c : n.sequence().children) scan(c);
        if (!n.is_conditional()) return;
        read.insert(n.conditional().on);
        for (const auto& b : n.conditional().branches) scan(*b.body);
        if (n.conditional().else_branch) scan(**n.conditional().else_branch);
    };
    scan(root);
    std::vector<std::string> out;
    std::map<std::string, std::string> seen;
    std::function<bool(const plan::Node&)> eval = [&](const plan::Node& n) -> bool {
        if (n.is_task()) {
            const auto& id = n.task().id;
            out.push_back(id);
            seen[id] = labels.count(id) ? labels.at(id) : "success";
            return !(seen[id] == "failure" && read.count(id) == 0);
        }
        if (n.is_sequence()) {
            for (const auto& c : n.sequence().children) if (!eval(c)) return false;
            return true;
        }
        const auto& c = n.conditional();
        const std::string got = seen.at(c.on);
        for (const auto& b : c.branches) if (b.outcome == got) return eval(*b.body);
        return c.else_branch ? eval(**c.else_branch) : true;
    };
    eval(root);
    return out;
}

ScriptedBackend::ScriptedBackend(schema::ActionPool pool, std::map<std::string, std::string> labels)
    : pool_(std::move(pool)), labels_(std::move(labels)) {}

sim::TaskOutcome ScriptedBackend::execute(const sim::TaskCall& call, sim::SimWorld&) {
    calls.push_back(call.task_id);
    if (call.task_id == throw_on) throw std::runtime_error("scripted handler crash");
    const auto it = labels_.find(call.task_id);
    const auto d = durations.find(call.task_id);
    return {call.task_id, it == labels_.end() ? "success" : it->second, nullptr, d == durations.end() ? 1.0 : d->second};
}

nlohmann::json ScriptedBackend::snapshot(const sim::SimWorld& world) const { return {{"clock", world.clock()}}; }

sim::SimWorld empty_world(std::uint64_t seed) { return sim::SimWorld(sim::FarmModel{}, {}, seed); }

}  // namespace one4all::testing

namespace one4all::testing {

std::vector<std::string> forbidden_includes(const std::vector<std::string>& dirs) {
    std::vector<std::string> hits;
    const fs::path root(ONE4ALL_SOURCE_DIR);
    for (const auto& d : dirs) {
        if (!fs::exists(root / d)) {
            hits.push_back("missing directory " + d);
            continue;
        }
        for (const auto& e : fs::recursive_directory_iterator(root / d)) {
            if (!e.is_regular_file()) continue;
            std::istringstream in(read_text(e.path()));
            std::string line;
            std::size_t n = 0;
            while (std::getline(in, line)) {
                ++n;
                if (line.find("#include") == std::string::npos) continue;
                if (line.find("planner") != std::string::npos || line.find("gateway") != std::string::npos) {
                    hits.push_back(e.path().string() + ":" + std::to_string(n) + ": " + line);
                }
            }
        }
    }
    return hits;
}

}  // namespace one4all::testing
