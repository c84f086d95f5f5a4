#include "one4all/wire/client.hpp"

namespace one4all::wire {

Client::Client(Endpoint endpoint, Millis timeout) : endpoint_(std::move(endpoint)), timeout_(timeout) {}

Message Client::request(const Message& message) {
    if (!socket_.valid()) {
        socket_ = connect_to(endpoint_, timeout_);
        decoder_ = FrameDecoder{};
    }
    try {
        send_frame(socket_, message, timeout_);
        return receive_frame(socket_, decoder_, timeout_);
    } catch (const WireError&) {
        socket_.close();
        throw;
    }
}

Ack Client::submit(const plan::MissionPlan& plan) { return submit_xml(plan.mission_id, plan::serialize_plan(plan)); }

Ack Client::submit_xml(const std::string& mission_id, const std::string& plan_xml) {
    auto response = request(SubmitPlan::make(mission_id, plan_xml));
    auto* ack = std::get_if<Ack>(&response);
    if (ack == nullptr || ack->mission_id != mission_id) throw MalformedPayload("expected an ack for '" + mission_id + "'");
    return std::move(*ack);
}

Report Client::fetch_report(const std::string& mission_id) {
    auto response = request(FetchReport{mission_id});
    auto* report = std::get_if<Report>(&response);
    if (report == nullptr || report->mission_id != mission_id) {
        throw MalformedPayload("expected a report for '" + mission_id + "'");
    }
    return std::move(*report);
}

}  // namespace one4all::wire
