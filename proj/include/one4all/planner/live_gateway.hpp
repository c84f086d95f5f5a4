#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "one4all/planner/gateway.hpp"

namespace one4all::planner {

struct HttpExchange {
    std::string request;   // body, secrets redacted
    std::string response;  // body or transport error, secrets redacted
    int status = 0;        // 0 when no HTTP response arrived
};

// Chat-completion client: POSTs {model, temperature, max_tokens, messages}
// to the configured endpoint with a bearer token from the environment.
class LiveGateway : public LlmGateway {
public:
    explicit LiveGateway(GatewayConfig config, std::string key_env = kApiKeyEnv, int retries = 3,
                         std::chrono::milliseconds backoff = std::chrono::milliseconds(500));

    // Throws AuthError (before any I/O) when the key is unset or rejected,
    // GatewayUnavailable after the retries are spent.
    std::string complete(const std::string& prompt) override;

    const std::vector<HttpExchange>& exchanges() const { return exchanges_; }

private:
    GatewayConfig config_;
    std::string key_env_;
    int retries_;
    std::chrono::milliseconds backoff_;
    std::vector<HttpExchange> exchanges_;
};

}  // namespace one4all::planner
