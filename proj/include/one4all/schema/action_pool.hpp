#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "one4all/xml.hpp"

namespace one4all::schema {

enum class ParamKind { String, Int, Float, Bool, Enum, GpsPoint, Pose6d };

std::string_view to_string(ParamKind kind);
std::optional<ParamKind> param_kind_from_string(std::string_view text);

struct ParamSpec {
    std::string name;
    ParamKind kind = ParamKind::String;
    bool required = false;
    std::vector<std::string> allowed_values;  // non-empty iff kind == Enum
    std::optional<double> min;                // Int/Float only
    std::optional<double> max;

    bool operator==(const ParamSpec&) const = default;
};

struct ActionSpec {
    std::string name;
    std::vector<ParamSpec> params;  // declaration order, names unique
    std::set<std::string> outcomes; // always contains "success" and "failure"
    std::string doc;

    const ParamSpec* param(std::string_view param_name) const;
    bool declares_outcome(std::string_view label) const { return outcomes.count(std::string(label)) > 0; }

    bool operator==(const ActionSpec&) const = default;
};

// One robot's capability set.
struct ActionPool {
    std::string robot_id;
    std::string schema_version;
    std::map<std::string, ActionSpec> actions;

    bool operator==(const ActionPool&) const = default;
};

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed document; carries the position of the offending construct.
class SchemaSyntaxError : public SchemaError {
public:
    SchemaSyntaxError(const std::string& message, xml::Location where);
    xml::Location where() const noexcept { return where_; }

private:
    xml::Location where_;
};

// Well-formed document that violates a pool invariant.
class SchemaSemanticError : public SchemaError {
public:
    using SchemaError::SchemaError;
};

ActionPool load_pool(std::string_view source);
ActionPool load_pool_file(const std::string& path);
std::string serialize_pool(const ActionPool& pool);

// Deterministic LLM-facing description of every robot, action, parameter and
// outcome. Robots and actions are listed in lexicographic order, so the text
// depends only on the set of pools. Throws std::invalid_argument on an empty list.
std::string render_context(const std::vector<ActionPool>& pools);

const ActionSpec* lookup(const ActionPool& pool, std::string_view name);
// First pool whose robot_id equals `robot_id`, or null.
const ActionPool* lookup_pool(const std::vector<ActionPool>& pools, std::string_view robot_id);

bool is_identifier(std::string_view text);
bool is_outcome_label(std::string_view text);

}  // namespace one4all::schema
