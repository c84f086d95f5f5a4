#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "one4all/plan/plan.hpp"
#include "one4all/schema/action_pool.hpp"

namespace one4all::validation {

enum class ErrorCode {
    UnknownRobot,
    UnknownAction,
    MissingParam,
    UnknownParam,
    BadParamType,
    ParamOutOfRange,
    UnknownOutcome,
    ForwardReference,
    DuplicateTaskId,
    XmlSyntax,
};

// Wire spelling used in error logs, e.g. "UNKNOWN_ACTION".
std::string_view to_string(ErrorCode code);

struct ValidationError {
    std::string path;  // empty only for XML_SYNTAX without a location in the tree
    ErrorCode code;
    std::string message;

    bool operator==(const ValidationError&) const = default;
};

struct ValidationReport {
    std::vector<ValidationError> errors;  // document order

    bool approved() const { return errors.empty(); }
    bool contains(ErrorCode code) const;
};

struct ValidationResult {
    std::optional<plan::MissionPlan> plan;  // present iff report.approved()
    ValidationReport report;
};

// The approval stage: checks the candidate plan against the pool of the robot
// it names and against the behavior-tree shape rules. Every problem is
// reported; nothing throws. Throws std::invalid_argument only when `pools`
// is empty.
ValidationResult validate(std::string_view xml_text, const std::vector<schema::ActionPool>& pools);

// "<CODE> at <path>: <message>" per line. Throws std::invalid_argument on an
// approved report.
std::string render_error_log(const ValidationReport& report);

// Value coercion shared with the executor backends.
std::optional<long long> parse_int(std::string_view text);
std::optional<double> parse_float(std::string_view text);
std::optional<bool> parse_bool(std::string_view text);

struct GpsPoint {
    double lat = 0;
    double lon = 0;
};

struct Pose6d {
    double x = 0, y = 0, z = 0;
    double qw = 1, qx = 0, qy = 0, qz = 0;
};

std::optional<GpsPoint> parse_gps_point(std::string_view text);
std::optional<Pose6d> parse_pose6d(std::string_view text);

inline constexpr double kQuaternionNormTolerance = 1e-6;

}  // namespace one4all::validation
