#pragma once

#include <atomic>
#include <list>
#include <memory>
#include <mutex>
#include <thread>

#include "one4all/wire/socket.hpp"

namespace one4all::wire {

class MissionHandler {
public:
    virtual ~MissionHandler() = default;
    virtual Ack on_submit(const SubmitPlan& request) = 0;
    virtual Report on_fetch(const FetchReport& request) = 0;
};

// Accept loop plus one thread per connection. Every outbound frame answers
// exactly one inbound frame; a connection that sends anything other than a
// request is closed.
class Server {
public:
    // Binds immediately; throws std::system_error if the address is taken.
    Server(MissionHandler& handler, const Endpoint& endpoint);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    std::uint16_t port() const { return port_; }
    void start();
    void stop();

private:
    struct Connection {
        Socket socket;
        std::thread thread;
        std::atomic<bool> done{false};
    };

    void accept_loop();
    void serve(Connection& connection);
    void reap(bool all);

    MissionHandler& handler_;
    Socket listener_;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::thread acceptor_;
    std::mutex mutex_;
    std::list<std::unique_ptr<Connection>> connections_;
};

}  // namespace one4all::wire
