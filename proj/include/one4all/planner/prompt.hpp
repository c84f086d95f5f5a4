#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "one4all/schema/action_pool.hpp"
#include "one4all/simworld/farm.hpp"

namespace one4all::planner {

struct ContextBundle {
    std::vector<schema::ActionPool> pools;
    std::optional<sim::FarmModel> farm;
    std::vector<std::pair<std::string, std::string>> extra_docs;  // (name, text)
};

inline constexpr std::string_view kQueryBegin = "<<<QUERY\n";
inline constexpr std::string_view kQueryEnd = "\nQUERY>>>";

// The versioned template text compiled into the binary.
std::string_view prompt_template();

// Fills the template. Throws std::invalid_argument for an empty query, an
// empty pool list, or a query containing the closing delimiter.
std::string build_prompt(const ContextBundle& bundle, std::string_view query,
                         std::optional<std::string_view> prior_error_log = std::nullopt);

// The query placed between the delimiters by build_prompt.
std::optional<std::string> extract_query(std::string_view prompt);

}  // namespace one4all::planner
