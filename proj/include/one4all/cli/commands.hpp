#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>

#include "one4all/cli/context.hpp"
#include "one4all/planner/gateway.hpp"

namespace one4all::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitRefused = 2,
    kExitExhausted = 3,
    kExitInvalid = 4,
    kExitMissionFailed = 5,
    kExitTransport = 6,
};

std::unique_ptr<planner::LlmGateway> make_gateway(const RunConfig& config);

// Prints the approved plan XML; writes <output>/transcript.ndjson.
int cmd_plan(const std::string& query, const RunConfig& config, std::ostream& out, std::ostream& err);
// Prints the error log on rejection.
int cmd_validate(const std::string& plan_file, const RunConfig& config, std::ostream& out, std::ostream& err);
// Runs locally on a fresh simulated world; writes <output>/traces/<mission>.ndjson.
int cmd_execute(const std::string& plan_file, const RunConfig& config, std::ostream& out, std::ostream& err);
// Serves until `stop` becomes true (or SIGINT/SIGTERM when `stop` is null).
// `on_ready` receives the bound port.
int cmd_serve(const RunConfig& config, std::ostream& out, std::ostream& err, const std::atomic<bool>* stop = nullptr,
              const std::function<void(std::uint16_t)>& on_ready = {});
// Plans, submits to the executor at config.addr, polls for the report.
int cmd_e2e(const std::string& query, const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv (CLI11, with --config FILE in TOML form) and dispatches.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace one4all::cli
