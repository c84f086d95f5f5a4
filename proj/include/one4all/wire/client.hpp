#pragma once

#include "one4all/plan/plan.hpp"
#include "one4all/wire/socket.hpp"

namespace one4all::wire {

// Blocking request/response client over one TCP connection.
class Client {
public:
    explicit Client(Endpoint endpoint, Millis timeout = Millis(10000));

    Ack submit(const plan::MissionPlan& plan);
    Ack submit_xml(const std::string& mission_id, const std::string& plan_xml);
    Report fetch_report(const std::string& mission_id);

    // Sends one frame and waits for the single response frame.
    Message request(const Message& message);

private:
    Endpoint endpoint_;
    Millis timeout_;
    Socket socket_;
    FrameDecoder decoder_;
};

}  // namespace one4all::wire
