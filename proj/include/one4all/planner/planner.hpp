#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "one4all/planner/gateway.hpp"
#include "one4all/planner/prompt.hpp"
#include "one4all/validation/validator.hpp"

namespace one4all::planner {

struct Approved {
    plan::MissionPlan plan;
    std::size_t attempts_used = 0;
};

struct Refused {
    std::string explanation;  // never empty
};

struct Exhausted {
    validation::ValidationReport last_report;
};

struct TranscriptEntry {
    std::string prompt;
    std::string response;
};

struct PlanningResult {
    std::variant<Approved, Refused, Exhausted> outcome;
    std::vector<TranscriptEntry> transcript;

    bool approved() const { return std::holds_alternative<Approved>(outcome); }
    bool refused() const { return std::holds_alternative<Refused>(outcome); }
    bool exhausted() const { return std::holds_alternative<Exhausted>(outcome); }
};

// Explanation text when `response` is a <no_mission> refusal.
std::optional<std::string> refusal_explanation(std::string_view response);

// Drops a surrounding Markdown code fence, if any, and outer whitespace.
std::string strip_code_fences(std::string_view response);

// Prompt, complete, validate; on rejection re-prompt with the error log, up
// to config.max_attempts times. Stops at the first approved plan.
PlanningResult plan_mission(const ContextBundle& bundle, std::string_view query, LlmGateway& gateway,
                            const GatewayConfig& config);

// Transcript as JSON lines: {"attempt", "prompt", "response"}.
std::string transcript_ndjson(const PlanningResult& result);

}  // namespace one4all::planner
