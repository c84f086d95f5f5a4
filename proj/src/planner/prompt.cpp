#include "one4all/planner/prompt.hpp"

#include <map>
#include <stdexcept>

#include "prompt_template.hpp"

namespace one4all::planner {

std::string_view prompt_template() { return generated::kPromptTemplate; }

std::string build_prompt(const ContextBundle& bundle, std::string_view query,
                         std::optional<std::string_view> prior_error_log) {
    if (query.empty()) throw std::invalid_argument("query must not be empty");
    if (query.find(kQueryEnd) != std::string_view::npos || query.find(kQueryEnd.substr(1)) == 0) {
        throw std::invalid_argument("query must not contain the closing delimiter");
    }
    std::map<std::string, std::string> values;
    values["ROBOTS"] = schema::render_context(bundle.pools);
    values["FARM"] = bundle.farm ? bundle.farm->summary() : "(none)\n";
    std::string docs;
    for (const auto& [name, text] : bundle.extra_docs) {
        docs += "--- " + name + " ---\n" + text;
        if (docs.back() != '\n') docs += '\n';
    }
    values["DOCS"] = docs.empty() ? "(none)\n" : docs;
    values["QUERY"] = std::string(query);
    if (prior_error_log) {
        std::string log(*prior_error_log);
        if (!log.empty() && log.back() != '\n') log += '\n';
        values["REWRITE"] =
            "\nREWRITE REQUEST\nThe approval stage rejected your previous plan. Its error log follows.\n"
            "<<<ERRORS\n" + log + "ERRORS>>>\nReturn a corrected plan that fixes every listed error.\n";
    } else {
        values["REWRITE"] = "";
    }

    const std::string_view tpl = prompt_template();
    std::string out;
    std::size_t pos = 0;
    while (true) {
        const auto open = tpl.find("{{", pos);
        if (open == std::string_view::npos) break;
        const auto close = tpl.find("}}", open);
        if (close == std::string_view::npos) break;
        const std::string key(tpl.substr(open + 2, close - open - 2));
        const auto it = values.find(key);
        if (it == values.end()) throw std::logic_error("prompt template has unknown placeholder {{" + key + "}}");
        out.append(tpl.substr(pos, open - pos));
        out += it->second;
        pos = close + 2;
    }
    out.append(tpl.substr(pos));
    return out;
}

std::optional<std::string> extract_query(std::string_view prompt) {
    const auto begin = prompt.find(kQueryBegin);
    if (begin == std::string_view::npos) return std::nullopt;
    const auto start = begin + kQueryBegin.size();
    const auto end = prompt.find(kQueryEnd, start);
    if (end == std::string_view::npos) return std::nullopt;
    return std::string(prompt.substr(start, end - start));
}

}  // namespace one4all::planner
