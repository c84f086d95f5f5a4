#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "one4all/planner/gateway.hpp"
#include "one4all/schema/action_pool.hpp"
#include "one4all/simworld/world.hpp"

namespace one4all::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // Layout: schemas/*.xml, optional worlds/*.geojson (farm) and
    // worlds/*.json (arm scene), at most one of each.
    std::filesystem::path context_dir = ".";
    std::string gateway = "mock";  // mock | live
    std::filesystem::path script;  // mock mode
    planner::GatewayConfig llm;
    std::string addr = "127.0.0.1:7447";
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = ".";
    double task_timeout = 60.0;
    double report_timeout = 60.0;  // e2e wait for the executor, wall-clock seconds

    // Throws ConfigError on an inconsistent combination.
    void check() const;
};

struct LoadedContext {
    std::vector<schema::ActionPool> pools;
    std::optional<sim::FarmModel> farm;
    std::vector<sim::SceneObject> scene;

    sim::SimWorld make_world(std::uint64_t seed) const;
};

// Throws ConfigError for a missing directory, no schemas, or unreadable files.
LoadedContext load_context(const std::filesystem::path& dir);

}  // namespace one4all::cli
