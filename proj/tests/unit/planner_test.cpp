#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "one4all/planner/live_gateway.hpp"
#include "one4all/planner/mock_gateway.hpp"
#include "one4all/planner/planner.hpp"
#include "one4all/planner/prompt.hpp"
#include "one4all/schema/action_pool.hpp"
#include "one4all/validation/validator.hpp"
#include "support.hpp"

// After Eigen: httplib pulls in <resolv.h>, whose _res macro breaks Eigen headers.
#include <httplib.h>

namespace one4all {
namespace {

using namespace planner;

ContextBundle bundle(bool with_farm = true) {
    ContextBundle b;
    b.pools = testing::corpus_pools();
    if (with_farm) b.farm = testing::corpus_farm();
    return b;
}

std::vector<MockEntry> table() { return MockGateway::load_script(testing::corpus_dir() / "mock" / "table.json"); }

GatewayConfig config() { return GatewayConfig{}; }

std::size_t occurrences(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
    return n;
}

// --- prompt -----------------------------------------------------------------

TEST(Prompt, ContainsContextQueryAndGrammar) {
    const auto b = bundle();
    const auto p = build_prompt(b, "Find pistachio and take NBV");
    EXPECT_NE(p.find(schema::render_context(b.pools)), std::string::npos);
    for (const auto& pool : b.pools) {
        for (const auto& [name, spec] : pool.actions) EXPECT_NE(p.find(name), std::string::npos) << name;
    }
    EXPECT_NE(p.find(b.farm->summary()), std::string::npos);
    EXPECT_NE(p.find("<mission id="), std::string::npos);
    EXPECT_NE(p.find("<no_mission>"), std::string::npos);
    EXPECT_EQ(extract_query(p), "Find pistachio and take NBV");
    EXPECT_EQ(p.find("REWRITE REQUEST"), std::string::npos);
    EXPECT_EQ(p, build_prompt(b, "Find pistachio and take NBV"));
}

TEST(Prompt, RewriteSectionQuotesLogVerbatim) {
    const std::string log = "UNKNOWN_ACTION at /mission/sequence/task[1]: action 'fly' is not offered by robot 'kortex'\n";
    const auto p = build_prompt(bundle(), "Turn left", log);
    EXPECT_NE(p.find(log), std::string::npos);
    EXPECT_EQ(occurrences(p, "UNKNOWN_ACTION"), 1u);
}

TEST(Prompt, PlaceholdersInQueryAreNotExpanded) {
    const auto p = build_prompt(bundle(false), "say {{ROBOTS}} twice");
    EXPECT_EQ(extract_query(p), "say {{ROBOTS}} twice");
    EXPECT_THROW(build_prompt(bundle(), ""), std::invalid_argument);
    EXPECT_THROW(build_prompt(ContextBundle{}, "x"), std::invalid_argument);
    EXPECT_THROW(build_prompt(bundle(), "a\nQUERY>>>b"), std::invalid_argument);
}

TEST(Prompt, ExtraDocsIncluded) {
    auto b = bundle(false);
    b.extra_docs = {{"notes.txt", "rows run north to south"}};
    const auto p = build_prompt(b, "Measure all sensors");
    EXPECT_NE(p.find("notes.txt"), std::string::npos);
    EXPECT_NE(p.find("rows run north to south"), std::string::npos);
}

// --- mock gateway -------------------------------------------------------------

TEST(MockGateway, TableLookupMoveInASquare) {
    MockGateway gw(table());
    const auto xml = gw.complete(build_prompt(bundle(), "Move in a square"));
    const auto r = validation::validate(xml, testing::corpus_pools());
    ASSERT_TRUE(r.plan.has_value());
    EXPECT_EQ(r.plan->robot_id, "kortex");
    EXPECT_EQ(plan::count_nodes(*r.plan), (plan::NodeCounts{4, 0, 0}));
    // The longer key wins over its prefix.
    const auto pictures = gw.complete(build_prompt(bundle(), "Move in a square and take pictures"));
    EXPECT_EQ(validation::validate(pictures, testing::corpus_pools()).plan->robot_id, "husky");
}

TEST(MockGateway, ScriptRunsOut) {
    MockGateway gw({{"", "A", MockFault::None, false, std::nullopt}, {"", "B", MockFault::None, false, std::nullopt}});
    const auto prompt = build_prompt(bundle(), "anything");
    EXPECT_EQ(gw.complete(prompt), "A");
    EXPECT_EQ(gw.complete(prompt), "B");
    EXPECT_THROW(gw.complete(prompt), ScriptExhausted);
    EXPECT_EQ(gw.call_count(), 3u);
}

TEST(MockGateway, FaultsAndScriptErrors) {
    MockGateway gw({{"down", "", MockFault::Unavailable, true, std::nullopt}});
    EXPECT_THROW(gw.complete(build_prompt(bundle(), "down")), GatewayUnavailable);
    EXPECT_THROW(MockGateway::parse_script("{}", "."), std::exception);
    EXPECT_THROW(MockGateway::parse_script(R"([{"match":"a","fault":"sneeze"}])", "."), std::exception);
}

// --- planning loop --------------------------------------------------------------

TEST(PlanMission, TableRowApprovedFirstTry) {
    MockGateway gw(table());
    const auto r = plan_mission(bundle(), "Find pistachio and take NBV", gw, config());
    ASSERT_TRUE(r.approved());
    const auto& a = std::get<Approved>(r.outcome);
    EXPECT_EQ(a.attempts_used, 1u);
    EXPECT_EQ(plan::count_nodes(a.plan).total(), 2u);
    EXPECT_EQ(plan::count_nodes(a.plan).conditionals, 1u);
    EXPECT_EQ(gw.call_count(), 1u);
}

TEST(PlanMission, RewriteLoopFeedsBackErrorLog) {
    MockGateway gw(MockGateway::load_script(testing::corpus_dir() / "mock" / "rewrite.json"));
    const auto r = plan_mission(bundle(), "Find pistachio and take NBV", gw, config());
    ASSERT_TRUE(r.approved());
    EXPECT_EQ(std::get<Approved>(r.outcome).attempts_used, 2u);
    ASSERT_EQ(r.transcript.size(), 2u);
    const auto first = validation::validate(strip_code_fences(r.transcript[0].response), testing::corpus_pools());
    ASSERT_FALSE(first.report.approved());
    const auto log = validation::render_error_log(first.report);
    EXPECT_NE(r.transcript[1].prompt.find(log), std::string::npos);
    EXPECT_EQ(r.transcript[0].prompt.find("REWRITE REQUEST"), std::string::npos);
    // No gateway call after approval.
    EXPECT_EQ(gw.call_count(), 2u);
}

TEST(PlanMission, AlwaysInvalidExhausts) {
    MockGateway gw({{"", "", MockFault::Malformed, true, std::nullopt}});
    auto cfg = config();
    cfg.max_attempts = 3;
    const auto r = plan_mission(bundle(), "Find pistachio and take NBV", gw, cfg);
    ASSERT_TRUE(r.exhausted());
    EXPECT_EQ(r.transcript.size(), 3u);
    EXPECT_TRUE(std::get<Exhausted>(r.outcome).last_report.contains(validation::ErrorCode::XmlSyntax));
    const auto ndjson = transcript_ndjson(r);
    EXPECT_EQ(occurrences(ndjson, "\n"), 3u);
}

TEST(PlanMission, GibberishRefused) {
    MockGateway gw(table());
    const auto r = plan_mission(bundle(), "flurble wibble grommet", gw, config());
    ASSERT_TRUE(r.refused());
    EXPECT_FALSE(std::get<Refused>(r.outcome).explanation.empty());
    EXPECT_EQ(r.transcript.size(), 1u);
}

TEST(PlanMission, AttemptsMatchTranscriptProperty) {
    testing::Rng rng(4);
    const auto good = testing::corpus_plan("08");
    for (int i = 0; i < 50; ++i) {
        const std::size_t bad = rng() % 5;
        std::vector<MockEntry> script;
        for (std::size_t k = 0; k < bad; ++k) script.push_back({"", "", MockFault::Malformed, false, std::nullopt});
        script.push_back({"", good, MockFault::None, false, std::nullopt});
        MockGateway gw(script);
        auto cfg = config();
        cfg.max_attempts = 1 + rng() % 4;
        const auto r = plan_mission(bundle(), "Move in a square", gw, cfg);
        EXPECT_LE(r.transcript.size(), cfg.max_attempts);
        EXPECT_EQ(gw.call_count(), r.transcript.size());
        if (bad < cfg.max_attempts) {
            ASSERT_TRUE(r.approved());
            EXPECT_EQ(std::get<Approved>(r.outcome).attempts_used, r.transcript.size());
            EXPECT_EQ(r.transcript.size(), bad + 1);
        } else {
            EXPECT_TRUE(r.exhausted());
        }
    }
}

TEST(PlanMission, Helpers) {
    EXPECT_EQ(refusal_explanation("  <no_mission>Nope.</no_mission>\n"), "Nope.");
    EXPECT_FALSE(refusal_explanation("<mission/>").has_value());
    EXPECT_EQ(strip_code_fences("```xml\n<a/>\n```\n"), "<a/>");
    EXPECT_EQ(strip_code_fences("  <a/> "), "<a/>");
}

TEST(GatewayConfig, Bounds) {
    auto c = config();
    EXPECT_EQ(c.model, "gpt-4o-2024-11-20");
    EXPECT_DOUBLE_EQ(c.temperature, 0.2);
    EXPECT_EQ(c.max_tokens, 4096u);
    c.temperature = 2.5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = config();
    c.max_attempts = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = config();
    c.max_tokens = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

// --- live gateway against a local fake endpoint -----------------------------------

struct FakeEndpoint {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> requests{0};
    std::vector<int> statuses;  // per request; the last one repeats
    std::string last_auth, last_body;
    std::mutex mutex;

    FakeEndpoint() {
        server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard<std::mutex> lock(mutex);
            const int n = requests++;
            last_auth = req.get_header_value("Authorization");
            last_body = req.body;
            res.status = statuses.empty() ? 200 : statuses[std::min<std::size_t>(n, statuses.size() - 1)];
            nlohmann::json reply{{"choices", {{{"message", {{"role", "assistant"}, {"content", "<no_mission>ok</no_mission>"}}}}}}};
            res.set_content(res.status == 200 ? reply.dump() : R"({"error":"busy"})", "application/json");
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~FakeEndpoint() {
        server.stop();
        thread.join();
    }
    GatewayConfig config() const {
        GatewayConfig c;
        c.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
        return c;
    }
};

constexpr const char* kTestKeyEnv = "ONE4ALL_TEST_LIVE_KEY";

TEST(LiveGateway, MissingKeyFailsBeforeAnyRequest) {
    FakeEndpoint fake;
    ::unsetenv(kTestKeyEnv);
    LiveGateway gw(fake.config(), kTestKeyEnv, 3, std::chrono::milliseconds(1));
    EXPECT_THROW(gw.complete("hello"), AuthError);
    EXPECT_EQ(fake.requests.load(), 0);
    EXPECT_TRUE(gw.exchanges().empty());
}

TEST(LiveGateway, SendsConfiguredRequestAndRedactsKey) {
    FakeEndpoint fake;
    ::setenv(kTestKeyEnv, "sk-test-secret", 1);
    LiveGateway gw(fake.config(), kTestKeyEnv, 3, std::chrono::milliseconds(1));
    EXPECT_EQ(gw.complete("hello sk-test-secret"), "<no_mission>ok</no_mission>");
    EXPECT_EQ(fake.last_auth, "Bearer sk-test-secret");
    const auto body = nlohmann::json::parse(fake.last_body);
    EXPECT_EQ(body.at("model"), "gpt-4o-2024-11-20");
    EXPECT_DOUBLE_EQ(body.at("temperature").get<double>(), 0.2);
    EXPECT_EQ(body.at("max_tokens"), 4096);
    EXPECT_EQ(body.at("messages").at(0).at("content"), "hello sk-test-secret");
    ASSERT_EQ(gw.exchanges().size(), 1u);
    EXPECT_EQ(gw.exchanges()[0].request.find("sk-test-secret"), std::string::npos);
    EXPECT_EQ(gw.exchanges()[0].status, 200);
    ::unsetenv(kTestKeyEnv);
}

TEST(LiveGateway, RetriesServerErrorsThenSucceeds) {
    FakeEndpoint fake;
    fake.statuses = {503, 429, 200};
    ::setenv(kTestKeyEnv, "k", 1);
    LiveGateway gw(fake.config(), kTestKeyEnv, 3, std::chrono::milliseconds(1));
    EXPECT_EQ(gw.complete("x"), "<no_mission>ok</no_mission>");
    EXPECT_EQ(fake.requests.load(), 3);
    ::unsetenv(kTestKeyEnv);
}

TEST(LiveGateway, UnavailableAfterRetriesAndAuthRejected) {
    FakeEndpoint fake;
    fake.statuses = {500};
    ::setenv(kTestKeyEnv, "k", 1);
    LiveGateway gw(fake.config(), kTestKeyEnv, 3, std::chrono::milliseconds(1));
    EXPECT_THROW(gw.complete("x"), GatewayUnavailable);
    EXPECT_EQ(fake.requests.load(), 3);

    FakeEndpoint denied;
    denied.statuses = {401};
    LiveGateway gw2(denied.config(), kTestKeyEnv, 3, std::chrono::milliseconds(1));
    EXPECT_THROW(gw2.complete("x"), AuthError);
    EXPECT_EQ(denied.requests.load(), 1);

    // Nothing listening at all.
    auto cfg = fake.config();
    cfg.endpoint = "http://127.0.0.1:1/v1/chat/completions";
    LiveGateway gw3(cfg, kTestKeyEnv, 2, std::chrono::milliseconds(1));
    EXPECT_THROW(plan_mission(bundle(), "Turn left", gw3, cfg), GatewayUnavailable);
    ::unsetenv(kTestKeyEnv);
}

}  // namespace
}  // namespace one4all
