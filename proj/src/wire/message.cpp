#include "one4all/wire/message.hpp"

#include <array>
#include <memory>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

namespace one4all::wire {

namespace {

using nlohmann::json;

std::string read_string(const json& doc, const char* key, bool non_empty = false) {
    if (!doc.contains(key) || !doc[key].is_string()) {
        throw MalformedPayload(std::string("field '") + key + "' must be a string");
    }
    auto value = doc[key].get<std::string>();
    if (non_empty && value.empty()) throw MalformedPayload(std::string("field '") + key + "' must not be empty");
    return value;
}

std::uint32_t read_length(std::string_view header) {
    return (static_cast<std::uint32_t>(static_cast<unsigned char>(header[0])) << 24) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(header[1])) << 16) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(header[2])) << 8) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(header[3]));
}

void check_length(std::uint32_t length) {
    if (length > kMaxPayload) {
        throw FrameTooLarge("frame declares " + std::to_string(length) + " payload bytes; limit is " +
                            std::to_string(kMaxPayload));
    }
}

}  // namespace

std::string_view to_string(ReportStatus status) {
    switch (status) {
        case ReportStatus::Completed: return "completed";
        case ReportStatus::Failed: return "failed";
        case ReportStatus::Unknown: return "unknown";
    }
    return "unknown";
}

std::string sha256_hex(std::string_view bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int size = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &size) != 1) {
        throw std::runtime_error("SHA-256 computation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(size * 2);
    for (unsigned int i = 0; i < size; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xf]);
    }
    return out;
}

SubmitPlan SubmitPlan::make(std::string mission_id, std::string plan_xml) {
    SubmitPlan m{std::move(mission_id), std::move(plan_xml), ""};
    m.checksum = sha256_hex(m.plan_xml);
    return m;
}

std::string to_payload(const Message& message) {
    json doc;
    std::visit(
        [&doc](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if (m.mission_id.empty()) throw std::invalid_argument("mission_id must not be empty");
            doc["mission_id"] = m.mission_id;
            if constexpr (std::is_same_v<T, SubmitPlan>) {
                doc["type"] = "submit_plan";
                doc["plan_xml"] = m.plan_xml;
                doc["checksum"] = m.checksum;
            } else if constexpr (std::is_same_v<T, Ack>) {
                doc["type"] = "ack";
                doc["accepted"] = m.accepted;
                if (m.reason) doc["reason"] = *m.reason;
            } else if constexpr (std::is_same_v<T, FetchReport>) {
                doc["type"] = "fetch_report";
            } else {
                doc["type"] = "report";
                doc["status"] = std::string(to_string(m.status));
                doc["trace"] = m.trace;
            }
        },
        message);
    try {
        return doc.dump();
    } catch (const json::type_error& e) {
        throw std::invalid_argument(std::string("message is not valid UTF-8: ") + e.what());
    }
}

Message from_payload(std::string_view payload) {
    json doc;
    try {
        doc = json::parse(payload);
    } catch (const json::parse_error& e) {
        throw MalformedPayload(std::string("payload is not JSON: ") + e.what());
    }
    if (!doc.is_object()) throw MalformedPayload("payload must be a JSON object");
    const auto type = read_string(doc, "type");
    auto mission_id = read_string(doc, "mission_id", true);
    if (type == "submit_plan") {
        SubmitPlan m{std::move(mission_id), read_string(doc, "plan_xml"), read_string(doc, "checksum")};
        if (sha256_hex(m.plan_xml) != m.checksum) {
            throw ChecksumMismatch("plan_xml does not match checksum for mission '" + m.mission_id + "'");
        }
        return m;
    }
    if (type == "ack") {
        if (!doc.contains("accepted") || !doc["accepted"].is_boolean()) {
            throw MalformedPayload("field 'accepted' must be a boolean");
        }
        Ack m{std::move(mission_id), doc["accepted"].get<bool>(), std::nullopt};
        if (doc.contains("reason")) m.reason = read_string(doc, "reason");
        return m;
    }
    if (type == "fetch_report") return FetchReport{std::move(mission_id)};
    if (type == "report") {
        const auto status = read_string(doc, "status");
        Report m{std::move(mission_id), ReportStatus::Unknown, read_string(doc, "trace")};
        if (status == "completed") m.status = ReportStatus::Completed;
        else if (status == "failed") m.status = ReportStatus::Failed;
        else if (status != "unknown") throw MalformedPayload("unknown report status '" + status + "'");
        return m;
    }
    throw MalformedPayload("unknown message type '" + type + "'");
}

std::string encode(const Message& message) {
    const auto payload = to_payload(message);
    check_length(static_cast<std::uint32_t>(std::min<std::size_t>(payload.size(), 0xffffffffu)));
    std::string frame;
    frame.reserve(4 + payload.size());
    const auto n = static_cast<std::uint32_t>(payload.size());
    frame.push_back(static_cast<char>((n >> 24) & 0xff));
    frame.push_back(static_cast<char>((n >> 16) & 0xff));
    frame.push_back(static_cast<char>((n >> 8) & 0xff));
    frame.push_back(static_cast<char>(n & 0xff));
    frame += payload;
    return frame;
}

Message decode(std::string_view frame) {
    if (frame.size() < 4) throw MalformedPayload("frame shorter than its 4-byte header");
    const auto length = read_length(frame.substr(0, 4));
    check_length(length);
    if (frame.size() - 4 != length) {
        throw MalformedPayload("frame header declares " + std::to_string(length) + " bytes but " +
                               std::to_string(frame.size() - 4) + " follow");
    }
    return from_payload(frame.substr(4));
}

void FrameDecoder::feed(std::string_view bytes) { buffer_.append(bytes); }

std::optional<Message> FrameDecoder::next() {
    if (buffer_.size() < 4) return std::nullopt;
    const auto length = read_length(buffer_);
    check_length(length);
    if (buffer_.size() - 4 < length) return std::nullopt;
    const std::string payload = buffer_.substr(4, length);
    buffer_.erase(0, 4 + static_cast<std::size_t>(length));
    return from_payload(payload);
}

}  // namespace one4all::wire
