#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "one4all/planner/gateway.hpp"

namespace one4all::planner {

enum class MockFault { None, Malformed, Refuse, Unavailable };

struct MockEntry {
    std::string match;     // substring of the query; empty matches any query
    std::string response;  // returned verbatim when fault is None
    MockFault fault = MockFault::None;
    bool sticky = false;   // reusable; otherwise consumed by its first use
    std::optional<std::string> requires_error;  // only eligible when the prompt carries this text
};

// Deterministic stand-in for the model. The query is recovered from the
// prompt's delimiters; among unconsumed entries whose key occurs in it, the
// longest key wins and ties go to the earliest entry.
class MockGateway : public LlmGateway {
public:
    explicit MockGateway(std::vector<MockEntry> entries);

    // JSON list of {"match", "response" | "response_file" | "fault", "sticky",
    // "requires_error"}; response files resolve relative to `base_dir`.
    static std::vector<MockEntry> parse_script(std::string_view text, const std::filesystem::path& base_dir);
    static std::vector<MockEntry> load_script(const std::filesystem::path& path);

    std::string complete(const std::string& prompt) override;

    std::size_t call_count() const;
    std::vector<std::string> calls() const;
    // Calls made through every MockGateway in this process.
    static std::size_t total_calls();

private:
    mutable std::mutex mutex_;
    std::vector<MockEntry> entries_;
    std::vector<bool> consumed_;
    std::vector<std::string> calls_;
};

}  // namespace one4all::planner
