#include "one4all/cli/context.hpp"

#include <algorithm>
#include <cstdlib>

namespace one4all::cli {

namespace fs = std::filesystem;

namespace {

std::vector<fs::path> files_with(const fs::path& dir, const std::string& suffix) {
    std::vector<fs::path> out;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return out;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.size() > suffix.size() &&
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

void RunConfig::check() const {
    if (gateway != "mock" && gateway != "live") throw ConfigError("--gateway must be mock or live, got '" + gateway + "'");
    if (gateway == "mock" && script.empty()) throw ConfigError("mock gateway needs --script");
    if (gateway == "live") {
        if (llm.endpoint.empty()) throw ConfigError("live gateway needs --endpoint");
        const char* key = std::getenv(planner::kApiKeyEnv);
        if (key == nullptr || *key == '\0') throw ConfigError(std::string("live gateway needs ") + planner::kApiKeyEnv);
    }
    try {
        llm.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(task_timeout > 0)) throw ConfigError("task timeout must be positive");
}

sim::SimWorld LoadedContext::make_world(std::uint64_t seed) const {
    return sim::SimWorld(farm.value_or(sim::FarmModel{}), scene, seed);
}

LoadedContext load_context(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw ConfigError("context directory not found: " + dir.string());
    LoadedContext ctx;
    const auto schemas = files_with(dir / "schemas", ".xml");
    if (schemas.empty()) throw ConfigError("no schema files under " + (dir / "schemas").string());
    for (const auto& path : schemas) {
        try {
            ctx.pools.push_back(schema::load_pool_file(path.string()));
        } catch (const std::exception& e) {
            throw ConfigError(path.string() + ": " + e.what());
        }
    }
    for (std::size_t i = 0; i < ctx.pools.size(); ++i) {
        for (std::size_t j = i + 1; j < ctx.pools.size(); ++j) {
            if (ctx.pools[i].robot_id == ctx.pools[j].robot_id) {
                throw ConfigError("two schema files describe robot '" + ctx.pools[i].robot_id + "'");
            }
        }
    }

    const auto farms = files_with(dir / "worlds", ".geojson");
    if (farms.size() > 1) throw ConfigError("more than one farm file under " + (dir / "worlds").string());
    if (!farms.empty()) {
        try {
            ctx.farm = sim::load_farm_file(farms.front().string());
        } catch (const std::exception& e) {
            throw ConfigError(farms.front().string() + ": " + e.what());
        }
    }
    std::vector<fs::path> scenes;
    for (const auto& p : files_with(dir / "worlds", ".json")) {
        if (p.extension() == ".json") scenes.push_back(p);
    }
    if (scenes.size() > 1) throw ConfigError("more than one scene file under " + (dir / "worlds").string());
    if (!scenes.empty()) {
        try {
            ctx.scene = sim::load_scene_file(scenes.front().string());
        } catch (const std::exception& e) {
            throw ConfigError(scenes.front().string() + ": " + e.what());
        }
    }
    return ctx;
}

}  // namespace one4all::cli
