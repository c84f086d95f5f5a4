#include "one4all/cli/commands.hpp"

#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "one4all/executor/service.hpp"
#include "one4all/executor/trace.hpp"
#include "one4all/planner/live_gateway.hpp"
#include "one4all/planner/mock_gateway.hpp"
#include "one4all/planner/planner.hpp"
#include "one4all/validation/validator.hpp"
#include "one4all/wire/client.hpp"

namespace one4all::cli {

namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_signalled{false};

extern "C" void on_signal(int) { g_signalled = true; }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) throw ConfigError("cannot write " + path.string());
}

planner::ContextBundle bundle_of(const LoadedContext& ctx) { return {ctx.pools, ctx.farm, {}}; }

// Runs the planning stage; returns the approved plan or an exit code.
std::variant<plan::MissionPlan, int> plan_stage(const std::string& query, const RunConfig& config,
                                                const LoadedContext& ctx, std::ostream& err) {
    auto gateway = make_gateway(config);
    planner::PlanningResult result;
    try {
        result = planner::plan_mission(bundle_of(ctx), query, *gateway, config.llm);
    } catch (const planner::GatewayUnavailable& e) {
        err << "gateway unavailable: " << e.what() << "\n";
        return kExitTransport;
    } catch (const planner::GatewayError& e) {
        err << "gateway error: " << e.what() << "\n";
        return kExitConfig;
    }
    write_file(config.output_dir / "transcript.ndjson", planner::transcript_ndjson(result));
    if (const auto* refused = std::get_if<planner::Refused>(&result.outcome)) {
        err << "no mission plan: " << refused->explanation << "\n";
        return kExitRefused;
    }
    if (const auto* exhausted = std::get_if<planner::Exhausted>(&result.outcome)) {
        err << "no approved plan after " << result.transcript.size() << " attempts; last error log:\n"
            << validation::render_error_log(exhausted->last_report);
        return kExitExhausted;
    }
    return std::get<planner::Approved>(result.outcome).plan;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const wire::WireError& e) {
        err << "transport error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const std::system_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace

std::unique_ptr<planner::LlmGateway> make_gateway(const RunConfig& config) {
    config.check();
    if (config.gateway == "live") return std::make_unique<planner::LiveGateway>(config.llm);
    try {
        return std::make_unique<planner::MockGateway>(planner::MockGateway::load_script(config.script));
    } catch (const std::exception& e) {
        throw ConfigError(config.script.string() + ": " + e.what());
    }
}

int cmd_plan(const std::string& query, const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        config.check();
        const auto ctx = load_context(config.context_dir);
        auto planned = plan_stage(query, config, ctx, err);
        if (const int* code = std::get_if<int>(&planned)) return *code;
        out << plan::serialize_plan(std::get<plan::MissionPlan>(planned));
        return static_cast<int>(kExitOk);
    });
}

int cmd_validate(const std::string& plan_file, const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto ctx = load_context(config.context_dir);
        const auto result = validation::validate(read_file(plan_file), ctx.pools);
        if (!result.report.approved()) {
            out << validation::render_error_log(result.report);
            return static_cast<int>(kExitInvalid);
        }
        const auto counts = plan::count_nodes(*result.plan);
        out << "approved: mission " << result.plan->mission_id << " for " << result.plan->robot_id << ", "
            << counts.total() << " tasks (" << counts.conditionals << " conditional)\n";
        return static_cast<int>(kExitOk);
    });
}

int cmd_execute(const std::string& plan_file, const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto ctx = load_context(config.context_dir);
        const auto result = validation::validate(read_file(plan_file), ctx.pools);
        if (!result.report.approved()) {
            out << validation::render_error_log(result.report);
            return static_cast<int>(kExitInvalid);
        }
        const auto& plan = *result.plan;
        auto backend = sim::make_backend(*schema::lookup_pool(ctx.pools, plan.robot_id));
        auto world = ctx.make_world(config.seed);
        const auto trace = exec::run(plan, *backend, world, {config.task_timeout});
        const auto path = exec::write_trace(trace, config.output_dir);
        out << exec::summarize(trace) << "trace: " << path.string() << "\n";
        return static_cast<int>(trace.final_status == exec::FinalStatus::Completed ? kExitOk : kExitMissionFailed);
    });
}

int cmd_serve(const RunConfig& config, std::ostream& out, std::ostream& err, const std::atomic<bool>* stop,
              const std::function<void(std::uint16_t)>& on_ready) {
    return guarded(err, [&] {
        const auto ctx = load_context(config.context_dir);
        exec::ServiceOptions options;
        options.run.task_timeout = config.task_timeout;
        options.output_dir = config.output_dir;
        exec::ExecutorService service(ctx.pools, ctx.make_world(config.seed), options);
        const auto endpoint = wire::parse_endpoint(config.addr);
        wire::Server server(service, endpoint);
        if (stop == nullptr) {
            g_signalled = false;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
        }
        server.start();
        out << "executor listening on " << endpoint.host << ":" << server.port() << std::endl;
        if (on_ready) on_ready(server.port());
        const std::atomic<bool>& flag = stop != nullptr ? *stop : g_signalled;
        while (!flag) std::this_thread::sleep_for(std::chrono::milliseconds(20));
        server.stop();
        service.shutdown();
        out << "executor stopped" << std::endl;
        return static_cast<int>(kExitOk);
    });
}

int cmd_e2e(const std::string& query, const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        config.check();
        const auto ctx = load_context(config.context_dir);
        auto planned = plan_stage(query, config, ctx, err);
        if (const int* code = std::get_if<int>(&planned)) return *code;
        const auto& plan = std::get<plan::MissionPlan>(planned);

        wire::Client client(wire::parse_endpoint(config.addr));
        const auto ack = client.submit(plan);
        if (!ack.accepted) {
            err << "executor rejected mission " << plan.mission_id << ":\n" << ack.reason.value_or("") << "\n";
            return static_cast<int>(kExitInvalid);
        }
        const auto deadline = std::chrono::steady_clock::now() +
                              std::chrono::milliseconds(static_cast<long long>(config.report_timeout * 1000));
        wire::Report report;
        while (true) {
            report = client.fetch_report(plan.mission_id);
            if (report.status != wire::ReportStatus::Unknown) break;
            if (std::chrono::steady_clock::now() > deadline) {
                err << "no report for mission " << plan.mission_id << " before the deadline\n";
                return static_cast<int>(kExitTransport);
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
        write_file(config.output_dir / "traces" / (plan.mission_id + ".ndjson"), report.trace);
        out << "report: " << wire::to_string(report.status) << "\n" << exec::summarize(exec::from_ndjson(report.trace));
        return static_cast<int>(report.status == wire::ReportStatus::Completed ? kExitOk : kExitMissionFailed);
    });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"one4all: one-shot mission planning and execution for field robots"};
    app.set_config("--config", "", "TOML-style configuration file; flags override it");
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig config;
    std::string context = config.context_dir.string(), script, output = config.output_dir.string();
    app.add_option("--context", context, "Directory with schemas/ and worlds/");
    app.add_option("--gateway", config.gateway, "mock or live")->check(CLI::IsMember({"mock", "live"}));
    app.add_option("--script", script, "Mock gateway script (JSON)");
    app.add_option("--endpoint", config.llm.endpoint, "Chat-completion URL (live)");
    app.add_option("--model", config.llm.model, "Model name (live)");
    app.add_option("--temperature", config.llm.temperature, "Sampling temperature")->check(CLI::Range(0.0, 2.0));
    app.add_option("--max-tokens", config.llm.max_tokens, "Response token limit")->check(CLI::PositiveNumber);
    app.add_option("--max-attempts", config.llm.max_attempts, "Plan/rewrite attempts")->check(CLI::PositiveNumber);
    app.add_option("--seed", config.seed, "World seed");
    app.add_option("--addr", config.addr, "Executor HOST:PORT");
    app.add_option("--output", output, "Directory for transcripts and traces");
    app.add_option("--task-timeout", config.task_timeout, "Per-task limit in simulated seconds");

    std::string query, plan_file;
    auto* plan_cmd = app.add_subcommand("plan", "Generate and approve a plan for a query");
    plan_cmd->add_option("query", query, "Mission request")->required();
    auto* validate_cmd = app.add_subcommand("validate", "Validate a plan file");
    validate_cmd->add_option("plan", plan_file, "Plan XML")->required();
    auto* execute_cmd = app.add_subcommand("execute", "Run a plan on the local simulator");
    execute_cmd->add_option("plan", plan_file, "Plan XML")->required();
    auto* serve_cmd = app.add_subcommand("serve", "Run the executor service");
    auto* e2e_cmd = app.add_subcommand("e2e", "Plan, submit to an executor, fetch the report");
    e2e_cmd->add_option("query", query, "Mission request")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    config.context_dir = context;
    config.script = script;
    config.output_dir = output;

    if (*plan_cmd) return cmd_plan(query, config, out, err);
    if (*validate_cmd) return cmd_validate(plan_file, config, out, err);
    if (*execute_cmd) return cmd_execute(plan_file, config, out, err);
    if (*serve_cmd) return cmd_serve(config, out, err);
    return cmd_e2e(query, config, out, err);
}

}  // namespace one4all::cli
