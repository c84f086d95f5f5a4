#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <utility>

#include "one4all/wire/message.hpp"

namespace one4all::wire {

// Owning POSIX file descriptor.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket() { close(); }

    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    void close();
    // Wakes any thread blocked on this socket without releasing the descriptor.
    void shutdown();

private:
    int fd_ = -1;
};

struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = kDefaultPort;
};

// "host:port", "host" or ":port"; missing parts take defaults.
Endpoint parse_endpoint(const std::string& text);

using Millis = std::chrono::milliseconds;

// Throws ConnectionLost when the peer cannot be reached, Timeout on expiry.
Socket connect_to(const Endpoint& endpoint, Millis timeout);
// Listening socket; returns it together with the bound port (useful with port 0).
// Throws std::system_error when the address cannot be bound.
std::pair<Socket, std::uint16_t> listen_on(const Endpoint& endpoint);

void send_frame(const Socket& socket, const Message& message, Millis timeout);
// Reads bytes into `decoder` until one message is available.
Message receive_frame(const Socket& socket, FrameDecoder& decoder, Millis timeout);

}  // namespace one4all::wire
