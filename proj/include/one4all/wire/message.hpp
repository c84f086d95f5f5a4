#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace one4all::wire {

inline constexpr std::uint16_t kDefaultPort = 7447;
inline constexpr std::size_t kMaxPayload = 16u * 1024u * 1024u;

class WireError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class FrameTooLarge : public WireError {
public:
    using WireError::WireError;
};
class MalformedPayload : public WireError {
public:
    using WireError::WireError;
};
class ChecksumMismatch : public WireError {
public:
    using WireError::WireError;
};
class ConnectionLost : public WireError {
public:
    using WireError::WireError;
};
class Timeout : public WireError {
public:
    using WireError::WireError;
};

enum class ReportStatus { Completed, Failed, Unknown };
std::string_view to_string(ReportStatus status);

struct SubmitPlan {
    std::string mission_id;
    std::string plan_xml;
    std::string checksum;  // lowercase hex SHA-256 of plan_xml

    // Builds the message with a freshly computed checksum.
    static SubmitPlan make(std::string mission_id, std::string plan_xml);
    bool operator==(const SubmitPlan&) const = default;
};

struct Ack {
    std::string mission_id;
    bool accepted = false;
    std::optional<std::string> reason;
    bool operator==(const Ack&) const = default;
};

struct FetchReport {
    std::string mission_id;
    bool operator==(const FetchReport&) const = default;
};

struct Report {
    std::string mission_id;
    ReportStatus status = ReportStatus::Unknown;
    std::string trace;  // NDJSON execution trace; empty when status is unknown
    bool operator==(const Report&) const = default;
};

using Message = std::variant<SubmitPlan, Ack, FetchReport, Report>;

std::string sha256_hex(std::string_view bytes);

// JSON payload without the length prefix.
std::string to_payload(const Message& message);
// Throws MalformedPayload, or ChecksumMismatch for a SubmitPlan whose
// checksum does not match its plan_xml.
Message from_payload(std::string_view payload);

// 4-byte big-endian payload length followed by the payload.
std::string encode(const Message& message);
// `frame` must hold exactly one complete frame.
Message decode(std::string_view frame);

// Incremental decoder for a byte stream; chunk boundaries are irrelevant.
class FrameDecoder {
public:
    void feed(std::string_view bytes);
    // Next complete message, if buffered. Throws FrameTooLarge as soon as a
    // header declares an oversized payload.
    std::optional<Message> next();
    std::size_t buffered() const { return buffer_.size(); }

private:
    std::string buffer_;
};

}  // namespace one4all::wire
