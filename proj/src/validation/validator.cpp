#include "one4all/validation/validator.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace one4all::validation {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
    while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view s) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        parts.push_back(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) return parts;
        start = comma + 1;
    }
}

std::string format_number(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

struct Collector : plan::TreeVisitor {
    const schema::ActionPool* pool = nullptr;
    std::vector<ValidationError> errors;

    void add(std::string path, ErrorCode code, std::string message) {
        errors.push_back({std::move(path), code, std::move(message)});
    }

    void issue(plan::ShapeIssue issue) override {
        switch (issue.kind) {
            case plan::ShapeIssueKind::Grammar: add(issue.path, ErrorCode::XmlSyntax, issue.message); break;
            case plan::ShapeIssueKind::DuplicateTaskId: add(issue.path, ErrorCode::DuplicateTaskId, issue.message); break;
            case plan::ShapeIssueKind::ForwardReference: add(issue.path, ErrorCode::ForwardReference, issue.message); break;
        }
    }

    void task(const plan::Task& task, const std::string& path, const xml::Element& element) override {
        if (pool == nullptr) return;
        const auto* spec = schema::lookup(*pool, task.action);
        if (spec == nullptr) {
            add(path, ErrorCode::UnknownAction,
                "robot '" + pool->robot_id + "' has no action '" + task.action + "'");
            return;
        }
        for (const auto& p : spec->params) {
            if (p.required && task.params.count(p.name) == 0) {
                add(path, ErrorCode::MissingParam,
                    "action '" + spec->name + "' requires param '" + p.name + "' (" + std::string(to_string(p.kind)) + ")");
            }
        }
        std::size_t index = 0;
        for (const auto& child : element.children) {
            if (child.name != "param") continue;
            const std::string param_path = path + "/param[" + std::to_string(++index) + "]";
            const auto* name = child.attribute("name");
            if (name == nullptr) continue;
            const auto* p = spec->param(*name);
            if (p == nullptr) {
                add(param_path, ErrorCode::UnknownParam, "action '" + spec->name + "' has no param '" + *name + "'");
                continue;
            }
            check_value(*p, child.text, param_path);
        }
    }

    void conditional(const std::string& on, const std::vector<plan::BranchLabel>& branches, const std::string& /*path*/,
                     const plan::Task* referenced) override {
        if (pool == nullptr || referenced == nullptr) return;
        const auto* spec = schema::lookup(*pool, referenced->action);
        if (spec == nullptr) return;
        for (const auto& b : branches) {
            if (!spec->declares_outcome(b.outcome)) {
                std::string declared;
                for (const auto& o : spec->outcomes) declared += (declared.empty() ? "" : ", ") + o;
                add(b.path, ErrorCode::UnknownOutcome,
                    "task '" + on + "' (" + spec->name + ") never reports outcome '" + b.outcome +
                        "'; declared outcomes: " + declared);
            }
        }
    }

    void check_value(const schema::ParamSpec& p, const std::string& value, const std::string& path) {
        const std::string kind(to_string(p.kind));
        auto bad_type = [&] {
            add(path, ErrorCode::BadParamType, "param '" + p.name + "' expects " + kind + ", got '" + value + "'");
        };
        auto check_bounds = [&](double v) {
            if ((p.min && v < *p.min) || (p.max && v > *p.max)) {
                add(path, ErrorCode::ParamOutOfRange,
                    "param '" + p.name + "' = " + format_number(v) + " outside [" +
                        (p.min ? format_number(*p.min) : "-inf") + ", " + (p.max ? format_number(*p.max) : "inf") + "]");
            }
        };
        switch (p.kind) {
            case schema::ParamKind::String: break;
            case schema::ParamKind::Int: {
                const auto v = parse_int(value);
                if (!v) bad_type();
                else check_bounds(static_cast<double>(*v));
                break;
            }
            case schema::ParamKind::Float: {
                const auto v = parse_float(value);
                if (!v) bad_type();
                else check_bounds(*v);
                break;
            }
            case schema::ParamKind::Bool:
                if (!parse_bool(value)) bad_type();
                break;
            case schema::ParamKind::Enum:
                if (std::find(p.allowed_values.begin(), p.allowed_values.end(), trim(value)) == p.allowed_values.end()) {
                    std::string allowed;
                    for (const auto& a : p.allowed_values) allowed += (allowed.empty() ? "" : ", ") + a;
                    add(path, ErrorCode::BadParamType,
                        "param '" + p.name + "' must be one of {" + allowed + "}, got '" + value + "'");
                }
                break;
            case schema::ParamKind::GpsPoint: {
                const auto g = parse_gps_point(value);
                if (!g) {
                    bad_type();
                } else if (g->lat < -90 || g->lat > 90 || g->lon < -180 || g->lon > 180) {
                    add(path, ErrorCode::ParamOutOfRange,
                        "param '" + p.name + "' latitude must be in [-90, 90] and longitude in [-180, 180]");
                }
                break;
            }
            case schema::ParamKind::Pose6d: {
                const auto pose = parse_pose6d(value);
                if (!pose) {
                    bad_type();
                    break;
                }
                const double norm = std::sqrt(pose->qw * pose->qw + pose->qx * pose->qx + pose->qy * pose->qy +
                                              pose->qz * pose->qz);
                if (std::abs(norm - 1.0) > kQuaternionNormTolerance) {
                    add(path, ErrorCode::ParamOutOfRange,
                        "param '" + p.name + "' quaternion norm is " + format_number(norm) + ", expected 1 within 1e-6");
                }
                break;
            }
        }
    }
};

}  // namespace

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownRobot: return "UNKNOWN_ROBOT";
        case ErrorCode::UnknownAction: return "UNKNOWN_ACTION";
        case ErrorCode::MissingParam: return "MISSING_PARAM";
        case ErrorCode::UnknownParam: return "UNKNOWN_PARAM";
        case ErrorCode::BadParamType: return "BAD_PARAM_TYPE";
        case ErrorCode::ParamOutOfRange: return "PARAM_OUT_OF_RANGE";
        case ErrorCode::UnknownOutcome: return "UNKNOWN_OUTCOME";
        case ErrorCode::ForwardReference: return "FORWARD_REFERENCE";
        case ErrorCode::DuplicateTaskId: return "DUPLICATE_TASK_ID";
        case ErrorCode::XmlSyntax: return "XML_SYNTAX";
    }
    return "XML_SYNTAX";
}

bool ValidationReport::contains(ErrorCode code) const {
    return std::any_of(errors.begin(), errors.end(), [code](const ValidationError& e) { return e.code == code; });
}

ValidationResult validate(std::string_view xml_text, const std::vector<schema::ActionPool>& pools) {
    if (pools.empty()) throw std::invalid_argument("validate requires at least one action pool");
    ValidationResult result;
    xml::Element root;
    try {
        root = xml::parse(xml_text);
    } catch (const xml::SyntaxError& e) {
        result.report.errors.push_back({"", ErrorCode::XmlSyntax, e.what()});
        return result;
    }

    Collector collector;
    if (root.name == "mission") {
        const auto* robot = root.attribute("robot");
        std::size_t matches = 0;
        for (const auto& pool : pools) {
            if (robot != nullptr && pool.robot_id == *robot) {
                collector.pool = &pool;
                ++matches;
            }
        }
        if (robot != nullptr && matches != 1) {
            std::string known;
            for (const auto& pool : pools) known += (known.empty() ? "" : ", ") + pool.robot_id;
            collector.add("/mission", ErrorCode::UnknownRobot,
                          (matches == 0 ? "no robot named '" : "more than one pool for robot '") + *robot +
                              "'; available robots: " + known);
            collector.pool = nullptr;
        }
    }
    auto plan = plan::build_plan(root, collector);
    result.report.errors = std::move(collector.errors);
    if (!plan && result.report.errors.empty()) {
        result.report.errors.push_back({"/mission", ErrorCode::XmlSyntax, "unusable mission document"});
    }
    if (result.report.approved()) result.plan = std::move(plan);
    return result;
}

std::string render_error_log(const ValidationReport& report) {
    if (report.approved()) throw std::invalid_argument("render_error_log called on an approved report");
    std::ostringstream out;
    for (const auto& e : report.errors) {
        std::string message = e.message;
        std::replace(message.begin(), message.end(), '\n', ' ');
        out << to_string(e.code) << " at " << e.path << ": " << message << "\n";
    }
    return out.str();
}

std::optional<long long> parse_int(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    std::size_t i = (text[0] == '+' || text[0] == '-') ? 1 : 0;
    if (i == text.size()) return std::nullopt;
    for (std::size_t j = i; j < text.size(); ++j) {
        if (text[j] < '0' || text[j] > '9') return std::nullopt;
    }
    const std::string copy(text);
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(copy.c_str(), &end, 10);
    if (errno == ERANGE) return std::nullopt;
    return v;
}

std::optional<double> parse_float(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    for (char c : text) {
        if (!((c >= '0' && c <= '9') || c == '.' || c == '-' || c == '+' || c == 'e' || c == 'E')) return std::nullopt;
    }
    const std::string copy(text);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(copy.c_str(), &end);
    if (end != copy.c_str() + copy.size() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<bool> parse_bool(std::string_view text) {
    text = trim(text);
    if (text == "true") return true;
    if (text == "false") return false;
    return std::nullopt;
}

std::optional<GpsPoint> parse_gps_point(std::string_view text) {
    const auto parts = split_commas(text);
    if (parts.size() != 2) return std::nullopt;
    const auto lat = parse_float(parts[0]);
    const auto lon = parse_float(parts[1]);
    if (!lat || !lon) return std::nullopt;
    return GpsPoint{*lat, *lon};
}

std::optional<Pose6d> parse_pose6d(std::string_view text) {
    const auto parts = split_commas(text);
    if (parts.size() != 7) return std::nullopt;
    double v[7];
    for (std::size_t i = 0; i < 7; ++i) {
        const auto f = parse_float(parts[i]);
        if (!f) return std::nullopt;
        v[i] = *f;
    }
    return Pose6d{v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

}  // namespace one4all::validation
