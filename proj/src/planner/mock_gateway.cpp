#include "one4all/planner/mock_gateway.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "one4all/planner/prompt.hpp"

namespace one4all::planner {

namespace {

std::atomic<std::size_t> g_total_calls{0};

constexpr const char* kMalformedResponse =
    "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<mission id=\"broken\" robot=\"kortex\">\n  <sequence>\n";
constexpr const char* kRefusalResponse = "<no_mission>The request does not describe a task any robot can perform.</no_mission>";

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

MockGateway::MockGateway(std::vector<MockEntry> entries)
    : entries_(std::move(entries)), consumed_(entries_.size(), false) {}

std::vector<MockEntry> MockGateway::parse_script(std::string_view text, const std::filesystem::path& base_dir) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("mock script is not JSON: ") + e.what());
    }
    if (!doc.is_array()) throw std::runtime_error("mock script must be a JSON list");
    std::vector<MockEntry> entries;
    for (const auto& item : doc) {
        if (!item.is_object()) throw std::runtime_error("mock script entries must be objects");
        MockEntry e;
        e.match = item.value("match", "");
        e.sticky = item.value("sticky", false);
        if (item.contains("requires_error")) e.requires_error = item["requires_error"].get<std::string>();
        const int sources = int(item.contains("response")) + int(item.contains("response_file")) + int(item.contains("fault"));
        if (sources != 1) throw std::runtime_error("mock entry needs exactly one of response, response_file, fault");
        if (item.contains("response")) {
            e.response = item["response"].get<std::string>();
        } else if (item.contains("response_file")) {
            e.response = read_file(base_dir / item["response_file"].get<std::string>());
        } else {
            const auto fault = item["fault"].get<std::string>();
            if (fault == "malformed") e.fault = MockFault::Malformed;
            else if (fault == "refuse") e.fault = MockFault::Refuse;
            else if (fault == "unavailable") e.fault = MockFault::Unavailable;
            else throw std::runtime_error("unknown mock fault '" + fault + "'");
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<MockEntry> MockGateway::load_script(const std::filesystem::path& path) {
    return parse_script(read_file(path), path.parent_path());
}

std::string MockGateway::complete(const std::string& prompt) {
    if (prompt.empty()) throw std::invalid_argument("prompt must not be empty");
    std::lock_guard lock(mutex_);
    calls_.push_back(prompt);
    ++g_total_calls;
    const std::string key = extract_query(prompt).value_or(prompt);
    std::size_t best = entries_.size();
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (consumed_[i] || key.find(e.match) == std::string::npos) continue;
        if (e.requires_error && prompt.find(*e.requires_error) == std::string::npos) continue;
        if (best == entries_.size() || e.match.size() > entries_[best].match.size()) best = i;
    }
    if (best == entries_.size()) {
        throw ScriptExhausted("mock script has no remaining entry for query '" + key + "'");
    }
    const auto& e = entries_[best];
    if (!e.sticky) consumed_[best] = true;
    switch (e.fault) {
        case MockFault::None: return e.response;
        case MockFault::Malformed: return kMalformedResponse;
        case MockFault::Refuse: return kRefusalResponse;
        case MockFault::Unavailable: throw GatewayUnavailable("scripted gateway outage");
    }
    return e.response;
}

std::size_t MockGateway::call_count() const {
    std::lock_guard lock(mutex_);
    return calls_.size();
}

std::size_t MockGateway::total_calls() { return g_total_calls.load(); }

std::vector<std::string> MockGateway::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

}  // namespace one4all::planner
