#pragma once

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include "one4all/executor/interpreter.hpp"
#include "one4all/wire/server.hpp"

namespace one4all::exec {

using BackendFactory = std::function<std::unique_ptr<sim::RobotBackend>(const schema::ActionPool&)>;

struct ServiceOptions {
    RunOptions run;
    std::optional<std::filesystem::path> output_dir;  // traces go to <dir>/traces when set
    BackendFactory make_backend = sim::make_backend;
    // Called on the robot's worker thread just before a mission starts.
    std::function<void(const std::string& mission_id)> on_mission_start;
};

// Executor side of the hand-off: validates submitted plans, queues them per
// robot and runs each robot's missions serially on a fresh copy of the
// template world.
class ExecutorService : public wire::MissionHandler {
public:
    ExecutorService(std::vector<schema::ActionPool> pools, sim::SimWorld world_template, ServiceOptions options = {});
    ~ExecutorService() override;
    ExecutorService(const ExecutorService&) = delete;
    ExecutorService& operator=(const ExecutorService&) = delete;

    wire::Ack on_submit(const wire::SubmitPlan& request) override;
    wire::Report on_fetch(const wire::FetchReport& request) override;

    // Blocks until every queued mission has finished.
    void wait_idle();
    void shutdown();

private:
    struct Mission {
        plan::MissionPlan plan;
        wire::ReportStatus status = wire::ReportStatus::Unknown;
        std::string trace;
    };
    struct Worker {
        std::deque<std::string> queue;
        std::thread thread;
    };

    void work(const std::string& robot_id);

    std::vector<schema::ActionPool> pools_;
    sim::SimWorld template_;
    ServiceOptions options_;

    std::mutex mutex_;
    std::condition_variable changed_;
    bool stopping_ = false;
    std::size_t pending_ = 0;
    std::map<std::string, Mission> missions_;
    std::map<std::string, Worker> workers_;
};

}  // namespace one4all::exec
