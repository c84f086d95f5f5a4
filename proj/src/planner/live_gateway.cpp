#include "one4all/planner/live_gateway.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace one4all::planner {

namespace {

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Url split_url(const std::string& endpoint) {
    const auto scheme = endpoint.find("://");
    if (scheme == std::string::npos) throw std::invalid_argument("endpoint must be an absolute URL: " + endpoint);
    const auto slash = endpoint.find('/', scheme + 3);
    if (slash == std::string::npos) return {endpoint, "/v1/chat/completions"};
    return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

std::string redact(std::string text, const std::string& secret) {
    if (secret.empty()) return text;
    for (auto pos = text.find(secret); pos != std::string::npos; pos = text.find(secret, pos)) {
        text.replace(pos, secret.size(), "[REDACTED]");
    }
    return text;
}

}  // namespace

LiveGateway::LiveGateway(GatewayConfig config, std::string key_env, int retries, std::chrono::milliseconds backoff)
    : config_(std::move(config)), key_env_(std::move(key_env)), retries_(retries), backoff_(backoff) {
    config_.validate();
    if (retries_ < 1) throw std::invalid_argument("retries must be at least 1");
}

std::string LiveGateway::complete(const std::string& prompt) {
    if (prompt.empty()) throw std::invalid_argument("prompt must not be empty");
    const char* key_value = std::getenv(key_env_.c_str());
    if (key_value == nullptr || *key_value == '\0') throw AuthError(key_env_ + " is not set");
    const std::string key(key_value);
    if (config_.endpoint.empty()) throw std::invalid_argument("live gateway needs an endpoint");
    const Url url = split_url(config_.endpoint);

    const nlohmann::json body{{"model", config_.model},
                              {"temperature", config_.temperature},
                              {"max_tokens", config_.max_tokens},
                              {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
    const std::string payload = body.dump();

    httplib::Client client(url.origin);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(120, 0);
    const httplib::Headers headers{{"Authorization", "Bearer " + key}};

    std::string last_error;
    for (int attempt = 1; attempt <= retries_; ++attempt) {
        HttpExchange exchange{redact(payload, key), "", 0};
        auto res = client.Post(url.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            exchange.response = last_error;
            exchanges_.push_back(std::move(exchange));
        } else {
            exchange.status = res->status;
            exchange.response = redact(res->body, key);
            exchanges_.push_back(exchange);
            if (res->status == 401 || res->status == 403) {
                throw AuthError("endpoint rejected the credentials (HTTP " + std::to_string(res->status) + ")");
            }
            if (res->status >= 200 && res->status < 300) {
                try {
                    const auto doc = nlohmann::json::parse(res->body);
                    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
                } catch (const nlohmann::json::exception& e) {
                    throw GatewayError(std::string("unexpected completion response: ") + e.what());
                }
            }
            last_error = "HTTP " + std::to_string(res->status);
            if (res->status < 500 && res->status != 429) throw GatewayError("endpoint returned " + last_error);
        }
        if (attempt < retries_) std::this_thread::sleep_for(backoff_ * attempt);
    }
    throw GatewayUnavailable("no completion after " + std::to_string(retries_) + " attempts: " + last_error);
}

}  // namespace one4all::planner
