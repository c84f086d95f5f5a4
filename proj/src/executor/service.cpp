#include "one4all/executor/service.hpp"

#include "one4all/executor/trace.hpp"
#include "one4all/validation/validator.hpp"

namespace one4all::exec {

ExecutorService::ExecutorService(std::vector<schema::ActionPool> pools, sim::SimWorld world_template,
                                 ServiceOptions options)
    : pools_(std::move(pools)), template_(std::move(world_template)), options_(std::move(options)) {
    if (pools_.empty()) throw std::invalid_argument("executor service needs at least one action pool");
}

ExecutorService::~ExecutorService() { shutdown(); }

wire::Ack ExecutorService::on_submit(const wire::SubmitPlan& request) {
    auto result = validation::validate(request.plan_xml, pools_);
    if (!result.report.approved()) {
        return {request.mission_id, false, validation::render_error_log(result.report)};
    }
    auto& plan = *result.plan;
    if (plan.mission_id != request.mission_id) {
        return {request.mission_id, false,
                "MISSION_ID_MISMATCH: frame names '" + request.mission_id + "' but the plan is '" + plan.mission_id + "'"};
    }
    const auto* pool = schema::lookup_pool(pools_, plan.robot_id);
    try {
        options_.make_backend(*pool);
    } catch (const std::exception& e) {
        return {request.mission_id, false, std::string("NO_BACKEND: ") + e.what()};
    }

    std::lock_guard lock(mutex_);
    if (stopping_) return {request.mission_id, false, "SHUTTING_DOWN: executor is stopping"};
    if (missions_.count(request.mission_id) > 0) {
        return {request.mission_id, false, "DUPLICATE_MISSION: mission '" + request.mission_id + "' was already submitted"};
    }
    const std::string robot = plan.robot_id;
    missions_[request.mission_id] = Mission{std::move(plan), wire::ReportStatus::Unknown, ""};
    auto& worker = workers_[robot];
    worker.queue.push_back(request.mission_id);
    ++pending_;
    if (!worker.thread.joinable()) worker.thread = std::thread([this, robot] { work(robot); });
    changed_.notify_all();
    return {request.mission_id, true, std::nullopt};
}

wire::Report ExecutorService::on_fetch(const wire::FetchReport& request) {
    std::lock_guard lock(mutex_);
    const auto it = missions_.find(request.mission_id);
    if (it == missions_.end() || it->second.status == wire::ReportStatus::Unknown) {
        return {request.mission_id, wire::ReportStatus::Unknown, ""};
    }
    return {request.mission_id, it->second.status, it->second.trace};
}

void ExecutorService::work(const std::string& robot_id) {
    const auto* pool = schema::lookup_pool(pools_, robot_id);
    auto backend = options_.make_backend(*pool);
    while (true) {
        std::string id;
        plan::MissionPlan plan;
        {
            std::unique_lock lock(mutex_);
            auto& queue = workers_[robot_id].queue;
            changed_.wait(lock, [&] { return stopping_ || !queue.empty(); });
            if (queue.empty()) return;
            id = queue.front();
            queue.pop_front();
            plan = missions_.at(id).plan;
        }
        if (options_.on_mission_start) options_.on_mission_start(id);
        sim::SimWorld world = template_;
        ExecutionTrace trace = run(plan, *backend, world, options_.run);
        if (options_.output_dir) {
            try {
                write_trace(trace, *options_.output_dir);
            } catch (const std::exception&) {
                // The report still carries the trace.
            }
        }
        {
            std::lock_guard lock(mutex_);
            auto& m = missions_.at(id);
            m.trace = to_ndjson(trace);
            m.status = trace.final_status == FinalStatus::Completed ? wire::ReportStatus::Completed
                                                                    : wire::ReportStatus::Failed;
            --pending_;
        }
        changed_.notify_all();
    }
}

void ExecutorService::wait_idle() {
    std::unique_lock lock(mutex_);
    changed_.wait(lock, [&] { return pending_ == 0; });
}

void ExecutorService::shutdown() {
    {
        std::lock_guard lock(mutex_);
        if (stopping_) return;
        stopping_ = true;
    }
    changed_.notify_all();
    for (auto& [robot, worker] : workers_) {
        if (worker.thread.joinable()) worker.thread.join();
    }
}

}  // namespace one4all::exec
