#include "one4all/schema/action_pool.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace one4all::schema {

namespace {

std::string format_syntax(const std::string& message, xml::Location where) {
    std::ostringstream out;
    out << "schema syntax error at line " << where.line << ", column " << where.column << ": " << message;
    return out.str();
}

std::optional<double> parse_number(const std::string& text) {
    if (text.empty()) return std::nullopt;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string format_number(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

const std::string& require_attribute(const xml::Element& el, std::string_view key) {
    const std::string* v = el.attribute(key);
    if (v == nullptr) {
        throw SchemaSyntaxError("<" + el.name + "> is missing attribute '" + std::string(key) + "'", el.where);
    }
    return *v;
}

void reject_unknown_attributes(const xml::Element& el, std::initializer_list<std::string_view> known) {
    for (const auto& a : el.attributes) {
        if (std::find(known.begin(), known.end(), a.name) == known.end()) {
            throw SchemaSyntaxError("unexpected attribute '" + a.name + "' on <" + el.name + ">", el.where);
        }
    }
}

void require_no_text(const xml::Element& el) {
    if (!el.has_only_whitespace_text()) {
        throw SchemaSyntaxError("unexpected text inside <" + el.name + ">", el.where);
    }
}

ParamSpec load_param(const xml::Element& el, const std::string& action) {
    reject_unknown_attributes(el, {"name", "kind", "required", "min", "max"});
    ParamSpec p;
    p.name = require_attribute(el, "name");
    if (!is_identifier(p.name)) {
        throw SchemaSemanticError("action '" + action + "': invalid parameter name '" + p.name + "'");
    }
    const auto kind = param_kind_from_string(require_attribute(el, "kind"));
    if (!kind) {
        throw SchemaSemanticError("action '" + action + "', parameter '" + p.name + "': unknown kind '" +
                                  *el.attribute("kind") + "'");
    }
    p.kind = *kind;
    if (const auto* req = el.attribute("required")) {
        if (*req == "true") p.required = true;
        else if (*req == "false") p.required = false;
        else throw SchemaSemanticError("parameter '" + p.name + "': required must be true or false");
    }
    for (const char* bound : {"min", "max"}) {
        const auto* text = el.attribute(bound);
        if (text == nullptr) continue;
        if (p.kind != ParamKind::Int && p.kind != ParamKind::Float) {
            throw SchemaSemanticError("parameter '" + p.name + "': bounds are only allowed on int and float");
        }
        const auto v = parse_number(*text);
        if (!v) throw SchemaSemanticError("parameter '" + p.name + "': bound '" + *text + "' is not a number");
        (std::string_view(bound) == "min" ? p.min : p.max) = *v;
    }
    if (p.min && p.max && *p.min > *p.max) {
        throw SchemaSemanticError("parameter '" + p.name + "': min exceeds max");
    }
    require_no_text(el);
    for (const auto& child : el.children) {
        if (child.name != "value") {
            throw SchemaSyntaxError("unexpected element <" + child.name + "> inside <param>", child.where);
        }
        reject_unknown_attributes(child, {});
        if (child.text.empty()) throw SchemaSemanticError("parameter '" + p.name + "': empty enum value");
        if (std::find(p.allowed_values.begin(), p.allowed_values.end(), child.text) != p.allowed_values.end()) {
            throw SchemaSemanticError("parameter '" + p.name + "': duplicate enum value '" + child.text + "'");
        }
        p.allowed_values.push_back(child.text);
    }
    if (p.kind == ParamKind::Enum && p.allowed_values.empty()) {
        throw SchemaSemanticError("parameter '" + p.name + "' of action '" + action + "': enum without values");
    }
    if (p.kind != ParamKind::Enum && !p.allowed_values.empty()) {
        throw SchemaSemanticError("parameter '" + p.name + "': <value> is only allowed on enum parameters");
    }
    return p;
}

ActionSpec load_action(const xml::Element& el) {
    reject_unknown_attributes(el, {"name", "doc"});
    ActionSpec spec;
    spec.name = require_attribute(el, "name");
    if (!is_identifier(spec.name)) throw SchemaSemanticError("invalid action name '" + spec.name + "'");
    if (const auto* doc = el.attribute("doc")) spec.doc = *doc;
    require_no_text(el);
    for (const auto& child : el.children) {
        if (child.name == "param") {
            ParamSpec p = load_param(child, spec.name);
            if (spec.param(p.name) != nullptr) {
                throw SchemaSemanticError("action '" + spec.name + "': duplicate parameter '" + p.name + "'");
            }
            spec.params.push_back(std::move(p));
        } else if (child.name == "outcome") {
            reject_unknown_attributes(child, {});
            if (!child.children.empty()) {
                throw SchemaSyntaxError("<outcome> must contain only a label", child.where);
            }
            if (!is_outcome_label(child.text)) {
                throw SchemaSemanticError("action '" + spec.name + "': invalid outcome label '" + child.text + "'");
            }
            if (!spec.outcomes.insert(child.text).second) {
                throw SchemaSemanticError("action '" + spec.name + "': duplicate outcome '" + child.text + "'");
            }
        } else {
            throw SchemaSyntaxError("unexpected element <" + child.name + "> inside <action>", child.where);
        }
    }
    if (!spec.declares_outcome("success") || !spec.declares_outcome("failure")) {
        throw SchemaSemanticError("action '" + spec.name + "' must declare outcomes success and failure");
    }
    return spec;
}

std::string describe_param(const ParamSpec& p) {
    std::ostringstream out;
    out << "    param " << p.name << ": " << to_string(p.kind) << (p.required ? ", required" : ", optional");
    if (p.kind == ParamKind::Enum) {
        out << ", one of {";
        for (std::size_t i = 0; i < p.allowed_values.size(); ++i) out << (i ? ", " : "") << p.allowed_values[i];
        out << "}";
    }
    if (p.min || p.max) {
        out << ", range [" << (p.min ? format_number(*p.min) : "-inf") << ", "
            << (p.max ? format_number(*p.max) : "inf") << "]";
    }
    if (p.kind == ParamKind::GpsPoint) out << " (written \"lat,lon\" in WGS84 degrees)";
    if (p.kind == ParamKind::Pose6d) out << " (written \"x,y,z,qw,qx,qy,qz\": meters and a unit quaternion)";
    return out.str();
}

}  // namespace

SchemaSyntaxError::SchemaSyntaxError(const std::string& message, xml::Location where)
    : SchemaError(format_syntax(message, where)), where_(where) {}

std::string_view to_string(ParamKind kind) {
    switch (kind) {
        case ParamKind::String: return "string";
        case ParamKind::Int: return "int";
        case ParamKind::Float: return "float";
        case ParamKind::Bool: return "bool";
        case ParamKind::Enum: return "enum";
        case ParamKind::GpsPoint: return "gps_point";
        case ParamKind::Pose6d: return "pose6d";
    }
    return "string";
}

std::optional<ParamKind> param_kind_from_string(std::string_view text) {
    for (auto k : {ParamKind::String, ParamKind::Int, ParamKind::Float, ParamKind::Bool, ParamKind::Enum,
                   ParamKind::GpsPoint, ParamKind::Pose6d}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

const ParamSpec* ActionSpec::param(std::string_view param_name) const {
    for (const auto& p : params) {
        if (p.name == param_name) return &p;
    }
    return nullptr;
}

bool is_identifier(std::string_view text) {
    if (text.empty()) return false;
    const char c0 = text.front();
    if (!((c0 >= 'A' && c0 <= 'Z') || (c0 >= 'a' && c0 <= 'z') || c0 == '_')) return false;
    return std::all_of(text.begin(), text.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
               c == '.';
    });
}

bool is_outcome_label(std::string_view text) {
    if (text.empty() || !(text.front() >= 'a' && text.front() <= 'z')) return false;
    return std::all_of(text.begin(), text.end(),
                       [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'; });
}

ActionPool load_pool(std::string_view source) {
    xml::Element root;
    try {
        root = xml::parse(source);
    } catch (const xml::SyntaxError& e) {
        throw SchemaSyntaxError(e.detail(), e.where());
    }
    if (root.name != "actionpool") {
        throw SchemaSyntaxError("root element must be <actionpool>, found <" + root.name + ">", root.where);
    }
    reject_unknown_attributes(root, {"robot", "version"});
    ActionPool pool;
    pool.robot_id = require_attribute(root, "robot");
    pool.schema_version = require_attribute(root, "version");
    if (!is_identifier(pool.robot_id)) throw SchemaSemanticError("invalid robot id '" + pool.robot_id + "'");
    require_no_text(root);
    for (const auto& child : root.children) {
        if (child.name != "action") {
            throw SchemaSyntaxError("unexpected element <" + child.name + "> inside <actionpool>", child.where);
        }
        ActionSpec spec = load_action(child);
        const std::string name = spec.name;
        if (!pool.actions.emplace(name, std::move(spec)).second) {
            throw SchemaSemanticError("duplicate action '" + name + "'");
        }
    }
    return pool;
}

ActionPool load_pool_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot read schema file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_pool(buf.str());
}

std::string serialize_pool(const ActionPool& pool) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<actionpool robot=\"" << xml::escape_attribute(pool.robot_id) << "\" version=\""
        << xml::escape_attribute(pool.schema_version) << "\">\n";
    for (const auto& [name, spec] : pool.actions) {
        out << "  <action name=\"" << xml::escape_attribute(name) << "\"";
        if (!spec.doc.empty()) out << " doc=\"" << xml::escape_attribute(spec.doc) << "\"";
        out << ">\n";
        for (const auto& p : spec.params) {
            out << "    <param name=\"" << xml::escape_attribute(p.name) << "\" kind=\"" << to_string(p.kind)
                << "\" required=\"" << (p.required ? "true" : "false") << "\"";
            if (p.min) out << " min=\"" << format_number(*p.min) << "\"";
            if (p.max) out << " max=\"" << format_number(*p.max) << "\"";
            if (p.allowed_values.empty()) {
                out << "/>\n";
            } else {
                out << ">";
                for (const auto& v : p.allowed_values) out << "<value>" << xml::escape_text(v) << "</value>";
                out << "</param>\n";
            }
        }
        for (const auto& o : spec.outcomes) out << "    <outcome>" << o << "</outcome>\n";
        out << "  </action>\n";
    }
    out << "</actionpool>\n";
    return out.str();
}

std::string render_context(const std::vector<ActionPool>& pools) {
    if (pools.empty()) throw std::invalid_argument("render_context requires at least one action pool");
    std::vector<const ActionPool*> sorted;
    sorted.reserve(pools.size());
    for (const auto& p : pools) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(),
              [](const ActionPool* a, const ActionPool* b) { return a->robot_id < b->robot_id; });

    std::ostringstream out;
    for (const ActionPool* pool : sorted) {
        out << "ROBOT " << pool->robot_id << " (schema version " << pool->schema_version << ")\n";
        for (const auto& [name, spec] : pool->actions) {
            out << "  ACTION " << name;
            if (!spec.doc.empty()) out << " -- " << spec.doc;
            out << "\n";
            for (const auto& p : spec.params) out << describe_param(p) << "\n";
            out << "    outcomes: ";
            bool first = true;
            for (const auto& o : spec.outcomes) {
                out << (first ? "" : ", ") << o;
                first = false;
            }
            out << "\n";
        }
    }
    return out.str();
}

const ActionSpec* lookup(const ActionPool& pool, std::string_view name) {
    const auto it = pool.actions.find(std::string(name));
    return it == pool.actions.end() ? nullptr : &it->second;
}

const ActionPool* lookup_pool(const std::vector<ActionPool>& pools, std::string_view robot_id) {
    for (const auto& p : pools) {
        if (p.robot_id == robot_id) return &p;
    }
    return nullptr;
}

}  // namespace one4all::schema
