#include "one4all/wire/server.hpp"

#include <poll.h>
#include <sys/socket.h>

namespace one4all::wire {

namespace {
constexpr int kPollMillis = 50;
}

Server::Server(MissionHandler& handler, const Endpoint& endpoint) : handler_(handler) {
    auto [socket, port] = listen_on(endpoint);
    listener_ = std::move(socket);
    port_ = port;
}

Server::~Server() { stop(); }

void Server::start() {
    if (acceptor_.joinable()) return;
    stopping_ = false;
    acceptor_ = std::thread([this] { accept_loop(); });
}

void Server::stop() {
    stopping_ = true;
    if (acceptor_.joinable()) acceptor_.join();
    listener_.close();
    {
        std::lock_guard lock(mutex_);
        for (auto& c : connections_) c->socket.shutdown();
    }
    reap(true);
}

void Server::reap(bool all) {
    std::list<std::unique_ptr<Connection>> finished;
    {
        std::lock_guard lock(mutex_);
        for (auto it = connections_.begin(); it != connections_.end();) {
            if (all || (*it)->done) {
                finished.push_back(std::move(*it));
                it = connections_.erase(it);
            } else {
                ++it;
            }
        }
    }
    for (auto& c : finished) {
        if (c->thread.joinable()) c->thread.join();
    }
}

void Server::accept_loop() {
    while (!stopping_) {
        pollfd p{listener_.fd(), POLLIN, 0};
        if (::poll(&p, 1, kPollMillis) <= 0) {
            reap(false);
            continue;
        }
        Socket client(::accept4(listener_.fd(), nullptr, nullptr, SOCK_CLOEXEC));
        if (!client.valid()) continue;
        auto connection = std::make_unique<Connection>();
        connection->socket = std::move(client);
        auto* raw = connection.get();
        {
            std::lock_guard lock(mutex_);
            connections_.push_back(std::move(connection));
        }
        raw->thread = std::thread([this, raw] { serve(*raw); });
        reap(false);
    }
}

void Server::serve(Connection& connection) {
    FrameDecoder decoder;
    const Millis reply_timeout(10000);
    try {
        while (!stopping_) {
            Message request;
            try {
                request = receive_frame(connection.socket, decoder, Millis(kPollMillis));
            } catch (const Timeout&) {
                continue;
            } catch (const ChecksumMismatch& e) {
                // Answerable: the frame itself was well-formed apart from the digest.
                send_frame(connection.socket, Ack{"unknown", false, std::string("CHECKSUM_MISMATCH: ") + e.what()},
                           reply_timeout);
                continue;
            }
            if (const auto* submit = std::get_if<SubmitPlan>(&request)) {
                send_frame(connection.socket, handler_.on_submit(*submit), reply_timeout);
            } else if (const auto* fetch = std::get_if<FetchReport>(&request)) {
                send_frame(connection.socket, handler_.on_fetch(*fetch), reply_timeout);
            } else {
                break;
            }
        }
    } catch (const std::exception&) {
        // Connection errors end this connection only.
    }
    connection.socket.shutdown();
    connection.done = true;
}

}  // namespace one4all::wire
