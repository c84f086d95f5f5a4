#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "one4all/executor/interpreter.hpp"

namespace one4all::exec {

class TraceFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One JSON record per line: a header, one entry per dispatched task, then a
// status record with the final status and branch decisions.
std::string to_ndjson(const ExecutionTrace& trace);
ExecutionTrace from_ndjson(std::string_view text);

// Writes <dir>/traces/<mission_id>.ndjson and returns the path.
std::filesystem::path write_trace(const ExecutionTrace& trace, const std::filesystem::path& dir);

// Human-readable run summary: tasks run, branches taken, final status.
std::string summarize(const ExecutionTrace& trace);

}  // namespace one4all::exec
