#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace one4all::planner {

class GatewayError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class GatewayUnavailable : public GatewayError {
public:
    using GatewayError::GatewayError;
};
class AuthError : public GatewayError {
public:
    using GatewayError::GatewayError;
};
class ScriptExhausted : public GatewayError {
public:
    using GatewayError::GatewayError;
};

inline constexpr const char* kApiKeyEnv = "ONE4ALL_API_KEY";

struct GatewayConfig {
    std::string model = "gpt-4o-2024-11-20";
    double temperature = 0.2;
    std::size_t max_tokens = 4096;
    std::size_t max_attempts = 3;
    std::string endpoint;  // live mode only, e.g. https://api.openai.com/v1/chat/completions

    // Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

class LlmGateway {
public:
    virtual ~LlmGateway() = default;
    // One completion for `prompt` (non-empty).
    virtual std::string complete(const std::string& prompt) = 0;
};

}  // namespace one4all::planner
