#include "one4all/wire/socket.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <system_error>

namespace one4all::wire {

namespace {

using Clock = std::chrono::steady_clock;

int remaining_ms(Clock::time_point deadline) {
    const auto left = std::chrono::duration_cast<Millis>(deadline - Clock::now()).count();
    return left < 0 ? 0 : static_cast<int>(left);
}

// Waits for `events`; false on timeout.
bool wait_for(int fd, short events, Clock::time_point deadline) {
    while (true) {
        pollfd p{fd, events, 0};
        const int r = ::poll(&p, 1, remaining_ms(deadline));
        if (r > 0) return true;
        if (r == 0) return false;
        if (errno != EINTR) throw ConnectionLost(std::string("poll failed: ") + std::strerror(errno));
    }
}

addrinfo* resolve(const Endpoint& endpoint, bool passive) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) hints.ai_flags = AI_PASSIVE;
    addrinfo* result = nullptr;
    const auto port = std::to_string(endpoint.port);
    const int rc = ::getaddrinfo(endpoint.host.empty() ? nullptr : endpoint.host.c_str(), port.c_str(), &hints, &result);
    if (rc != 0) return nullptr;
    return result;
}

}  // namespace

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
}

void Socket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void Socket::shutdown() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

Endpoint parse_endpoint(const std::string& text) {
    Endpoint e;
    const auto colon = text.rfind(':');
    if (colon == std::string::npos) {
        if (!text.empty()) e.host = text;
        return e;
    }
    if (colon > 0) e.host = text.substr(0, colon);
    const auto port_text = text.substr(colon + 1);
    if (port_text.empty()) return e;
    std::size_t used = 0;
    unsigned long port = 0;
    try {
        port = std::stoul(port_text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("invalid port in address '" + text + "'");
    }
    if (used != port_text.size() || port > 65535) throw std::invalid_argument("invalid port in address '" + text + "'");
    e.port = static_cast<std::uint16_t>(port);
    return e;
}

Socket connect_to(const Endpoint& endpoint, Millis timeout) {
    const auto deadline = Clock::now() + timeout;
    addrinfo* list = resolve(endpoint, false);
    if (list == nullptr) throw ConnectionLost("cannot resolve " + endpoint.host);
    std::string last_error = "no addresses";
    for (addrinfo* ai = list; ai != nullptr; ai = ai->ai_next) {
        Socket s(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
        if (!s.valid()) continue;
        const int flags = ::fcntl(s.fd(), F_GETFL, 0);
        ::fcntl(s.fd(), F_SETFL, flags | O_NONBLOCK);
        int rc = ::connect(s.fd(), ai->ai_addr, ai->ai_addrlen);
        if (rc != 0 && errno == EINPROGRESS) {
            if (!wait_for(s.fd(), POLLOUT, deadline)) {
                ::freeaddrinfo(list);
                throw Timeout("connect to " + endpoint.host + ":" + std::to_string(endpoint.port) + " timed out");
            }
            int err = 0;
            socklen_t len = sizeof(err);
            ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
            rc = err == 0 ? 0 : -1;
            errno = err;
        }
        if (rc == 0) {
            ::fcntl(s.fd(), F_SETFL, flags);
            const int one = 1;
            ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
            ::freeaddrinfo(list);
            return s;
        }
        last_error = std::strerror(errno);
    }
    ::freeaddrinfo(list);
    throw ConnectionLost("cannot connect to " + endpoint.host + ":" + std::to_string(endpoint.port) + ": " + last_error);
}

std::pair<Socket, std::uint16_t> listen_on(const Endpoint& endpoint) {
    addrinfo* list = resolve(endpoint, true);
    if (list == nullptr) throw std::system_error(EINVAL, std::generic_category(), "cannot resolve " + endpoint.host);
    int last_errno = EADDRNOTAVAIL;
    for (addrinfo* ai = list; ai != nullptr; ai = ai->ai_next) {
        Socket s(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
        if (!s.valid()) {
            last_errno = errno;
            continue;
        }
        const int one = 1;
        ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        if (::bind(s.fd(), ai->ai_addr, ai->ai_addrlen) != 0 || ::listen(s.fd(), 64) != 0) {
            last_errno = errno;
            continue;
        }
        sockaddr_storage bound{};
        socklen_t len = sizeof(bound);
        ::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&bound), &len);
        const std::uint16_t port = bound.ss_family == AF_INET6
                                       ? ntohs(reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port)
                                       : ntohs(reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
        ::freeaddrinfo(list);
        return {std::move(s), port};
    }
    ::freeaddrinfo(list);
    throw std::system_error(last_errno, std::generic_category(),
                            "cannot listen on " + endpoint.host + ":" + std::to_string(endpoint.port));
}

void send_frame(const Socket& socket, const Message& message, Millis timeout) {
    const auto deadline = Clock::now() + timeout;
    const std::string frame = encode(message);
    std::size_t sent = 0;
    while (sent < frame.size()) {
        if (!wait_for(socket.fd(), POLLOUT, deadline)) throw Timeout("send timed out");
        const ssize_t n = ::send(socket.fd(), frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR || errno == EAGAIN) continue;
            throw ConnectionLost(std::string("send failed: ") + std::strerror(errno));
        }
        sent += static_cast<std::size_t>(n);
    }
}

Message receive_frame(const Socket& socket, FrameDecoder& decoder, Millis timeout) {
    const auto deadline = Clock::now() + timeout;
    char buf[65536];
    while (true) {
        if (auto m = decoder.next()) return std::move(*m);
        if (!wait_for(socket.fd(), POLLIN, deadline)) throw Timeout("no response within the timeout");
        const ssize_t n = ::recv(socket.fd(), buf, sizeof(buf), 0);
        if (n == 0) throw ConnectionLost("peer closed the connection");
        if (n < 0) {
            if (errno == EINTR || errno == EAGAIN) continue;
            throw ConnectionLost(std::string("recv failed: ") + std::strerror(errno));
        }
        decoder.feed(std::string_view(buf, static_cast<std::size_t>(n)));
    }
}

}  // namespace one4all::wire
