#include "one4all/planner/planner.hpp"

#include <nlohmann/json.hpp>

#include "one4all/xml.hpp"

namespace one4all::planner {

namespace {

std::string_view trim(std::string_view s) {
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
    while (!s.empty() && ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && ws(s.back())) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string strip_code_fences(std::string_view response) {
    auto text = trim(response);
    if (text.substr(0, 3) != "```") return std::string(text);
    const auto first_newline = text.find('\n');
    if (first_newline == std::string_view::npos) return std::string(text);
    auto body = text.substr(first_newline + 1);
    const auto close = body.rfind("```");
    if (close != std::string_view::npos) body = body.substr(0, close);
    return std::string(trim(body));
}

std::optional<std::string> refusal_explanation(std::string_view response) {
    try {
        const auto root = xml::parse(strip_code_fences(response));
        if (root.name != "no_mission") return std::nullopt;
        std::string text(trim(root.text));
        if (text.empty()) text = "the model declined to produce a mission plan";
        return text;
    } catch (const xml::SyntaxError&) {
        return std::nullopt;
    }
}

PlanningResult plan_mission(const ContextBundle& bundle, std::string_view query, LlmGateway& gateway,
                            const GatewayConfig& config) {
    config.validate();
    PlanningResult result{Exhausted{}, {}};
    std::optional<std::string> error_log;
    for (std::size_t attempt = 1; attempt <= config.max_attempts; ++attempt) {
        std::string prompt = build_prompt(bundle, query, error_log);
        std::string response = gateway.complete(prompt);
        result.transcript.push_back({std::move(prompt), response});

        if (auto explanation = refusal_explanation(response)) {
            result.outcome = Refused{std::move(*explanation)};
            return result;
        }
        auto validated = validation::validate(strip_code_fences(response), bundle.pools);
        if (validated.report.approved()) {
            result.outcome = Approved{std::move(*validated.plan), attempt};
            return result;
        }
        error_log = validation::render_error_log(validated.report);
        result.outcome = Exhausted{std::move(validated.report)};
    }
    return result;
}

std::string transcript_ndjson(const PlanningResult& result) {
    std::string out;
    for (std::size_t i = 0; i < result.transcript.size(); ++i) {
        out += nlohmann::json{{"attempt", i + 1}, {"prompt", result.transcript[i].prompt},
                              {"response", result.transcript[i].response}}
                   .dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        out += '\n';
    }
    return out;
}

}  // namespace one4all::planner
