#include <gtest/gtest.h>

#include <poll.h>
#include <sys/socket.h>

#include <cctype>
#include <future>

#include "one4all/executor/service.hpp"
#include "one4all/wire/client.hpp"
#include "one4all/wire/message.hpp"
#include "one4all/wire/server.hpp"
#include "one4all/wire/socket.hpp"
#include "support.hpp"

namespace one4all {
namespace {

using namespace wire;

TEST(Wire, Sha256KnownVector) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Wire, AckRoundTripAndLayout) {
    const Message m = Ack{"m1", true, std::nullopt};
    const auto bytes = encode(m);
    ASSERT_GE(bytes.size(), 4u);
    const std::size_t len = (static_cast<unsigned char>(bytes[0]) << 24) | (static_cast<unsigned char>(bytes[1]) << 16) |
                            (static_cast<unsigned char>(bytes[2]) << 8) | static_cast<unsigned char>(bytes[3]);
    EXPECT_EQ(len, bytes.size() - 4);
    const auto doc = nlohmann::json::parse(bytes.substr(4));
    EXPECT_EQ(doc.at("type"), "ack");
    EXPECT_EQ(doc.at("mission_id"), "m1");
    EXPECT_EQ(doc.at("accepted"), true);
    EXPECT_EQ(decode(bytes), m);
}

TEST(Wire, RoundTripProperty) {
    testing::Rng rng(17);
    for (int i = 0; i < 500; ++i) {
        const auto m = testing::random_message(rng);
        ASSERT_EQ(decode(encode(m)), m) << to_payload(m);
    }
}

TEST(Wire, ByteAtATimeMatchesWholeBuffer) {
    testing::Rng rng(23);
    std::string stream;
    std::vector<Message> sent;
    for (int i = 0; i < 50; ++i) {
        sent.push_back(testing::random_message(rng));
        stream += encode(sent.back());
    }
    FrameDecoder whole;
    whole.feed(stream);
    FrameDecoder trickle;
    std::vector<Message> a, b;
    while (auto m = whole.next()) a.push_back(*m);
    for (char c : stream) {
        trickle.feed(std::string_view(&c, 1));
        while (auto m = trickle.next()) b.push_back(*m);
    }
    EXPECT_EQ(a, sent);
    EXPECT_EQ(b, sent);
    EXPECT_EQ(trickle.buffered(), 0u);
}

// Replaces one alphanumeric byte inside the checksummed fields.
TEST(Wire, CorruptedSubmitPlanFailsChecksum) {
    testing::Rng rng(29);
    const auto xml = testing::corpus_plan("03");
    for (int i = 0; i < 500; ++i) {
        auto frame = encode(SubmitPlan::make("pistachio-nbv-conditionals", xml));
        const auto payload = frame.substr(4);
        const auto doc = nlohmann::json::parse(payload);
        // Byte range of the plan_xml or checksum string value in the payload.
        const std::string field = rng() % 4 == 0 ? "\"checksum\":\"" : "\"plan_xml\":\"";
        const auto start = payload.find(field) + field.size();
        const auto end = payload.find('"', field == "\"checksum\":\"" ? start : payload.find("</mission>", start));
        std::size_t pos;
        do {
            pos = start + rng() % (end - start);
        } while (!std::isalnum(static_cast<unsigned char>(payload[pos])) || payload[pos - 1] == '\\');
        char replacement;
        do {
            replacement = "abcdefghijklmnopqrstuvwxyz0123456789"[rng() % 36];
        } while (replacement == payload[pos]);
        frame[4 + pos] = replacement;
        EXPECT_THROW(decode(frame), ChecksumMismatch) << pos;
    }
}

TEST(Wire, OversizedLengthRejectedBeforeAllocation) {
    const std::string header("\xff\xff\xff\xff", 4);
    EXPECT_THROW(decode(header), FrameTooLarge);
    FrameDecoder d;
    d.feed(header);
    EXPECT_THROW(d.next(), FrameTooLarge);
    std::string just_over(4, '\0');
    const std::size_t n = kMaxPayload + 1;
    just_over[0] = static_cast<char>(n >> 24), just_over[1] = static_cast<char>(n >> 16);
    just_over[2] = static_cast<char>(n >> 8), just_over[3] = static_cast<char>(n);
    EXPECT_THROW(decode(just_over), FrameTooLarge);
}

TEST(Wire, MalformedPayloads) {
    EXPECT_THROW(from_payload("{"), MalformedPayload);
    EXPECT_THROW(from_payload(R"({"type":"nope","mission_id":"m"})"), MalformedPayload);
    EXPECT_THROW(from_payload(R"({"type":"ack","mission_id":"m"})"), MalformedPayload);
    EXPECT_THROW(from_payload(R"({"type":"fetch_report","mission_id":""})"), MalformedPayload);
    EXPECT_THROW(from_payload(R"({"type":"report","mission_id":"m","status":"odd","trace":""})"), MalformedPayload);
    auto frame = encode(FetchReport{"m"});
    EXPECT_THROW(decode(frame + "x"), WireError);
    EXPECT_THROW(decode(frame.substr(0, frame.size() - 1)), WireError);
}

TEST(Wire, ParseEndpoint) {
    const auto a = parse_endpoint("10.0.0.2:9000");
    EXPECT_EQ(a.host, "10.0.0.2");
    EXPECT_EQ(a.port, 9000);
    EXPECT_EQ(parse_endpoint(":81").host, "127.0.0.1");
    EXPECT_EQ(parse_endpoint("example").port, kDefaultPort);
    EXPECT_THROW(parse_endpoint("h:99999"), std::invalid_argument);
}

// --- loopback ---------------------------------------------------------------

struct Loopback : ::testing::Test {
    std::unique_ptr<exec::ExecutorService> service;
    std::unique_ptr<Server> server;

    void start(exec::ServiceOptions options = {}) {
        sim::SimWorld world(testing::corpus_farm(), testing::corpus_scene(), 7);
        service = std::make_unique<exec::ExecutorService>(testing::corpus_pools(), world, std::move(options));
        server = std::make_unique<Server>(*service, Endpoint{"127.0.0.1", 0});
        server->start();
    }
    Endpoint endpoint() const { return {"127.0.0.1", server->port()}; }
    void TearDown() override {
        if (server) server->stop();
        if (service) service->shutdown();
    }
};

TEST_F(Loopback, SubmitAndFetch) {
    start();
    Client client(endpoint());
    const auto p = plan::parse_plan(testing::corpus_plan("01"));
    const auto ack = client.submit(p);
    EXPECT_TRUE(ack.accepted) << ack.reason.value_or("");
    EXPECT_EQ(ack.mission_id, p.mission_id);
    service->wait_idle();
    const auto report = client.fetch_report(p.mission_id);
    EXPECT_EQ(report.status, ReportStatus::Completed);
    EXPECT_FALSE(report.trace.empty());

    const auto unknown = client.fetch_report("never-submitted");
    EXPECT_EQ(unknown.status, ReportStatus::Unknown);
    EXPECT_TRUE(unknown.trace.empty());
}

TEST_F(Loopback, UnknownRobotRejected) {
    start();
    Client client(endpoint());
    auto p = plan::parse_plan(testing::corpus_plan("08"));
    p.robot_id = "spot";
    const auto ack = client.submit(p);
    EXPECT_FALSE(ack.accepted);
    ASSERT_TRUE(ack.reason.has_value());
    EXPECT_NE(ack.reason->find("UNKNOWN_ROBOT"), std::string::npos) << *ack.reason;
}

TEST_F(Loopback, DuplicateMissionAndBadChecksum) {
    start();
    Client client(endpoint());
    const auto p = plan::parse_plan(testing::corpus_plan("08"));
    EXPECT_TRUE(client.submit(p).accepted);
    const auto again = client.submit(p);
    EXPECT_FALSE(again.accepted);

    auto bad = SubmitPlan::make("other", testing::corpus_plan("07"));
    bad.checksum[0] = bad.checksum[0] == 'a' ? 'b' : 'a';
    const auto reply = client.request(bad);
    ASSERT_TRUE(std::holds_alternative<Ack>(reply));
    EXPECT_FALSE(std::get<Ack>(reply).accepted);
}

TEST_F(Loopback, InFlightMissionReportsUnknown) {
    std::promise<void> started, release;
    auto release_future = release.get_future().share();
    exec::ServiceOptions options;
    options.on_mission_start = [&, release_future](const std::string&) {
        started.set_value();
        release_future.wait();
    };
    start(options);
    Client client(endpoint());
    const auto p = plan::parse_plan(testing::corpus_plan("03"));
    ASSERT_TRUE(client.submit(p).accepted);
    started.get_future().wait();
    const auto during = client.fetch_report(p.mission_id);
    EXPECT_EQ(during.status, ReportStatus::Unknown);
    EXPECT_TRUE(during.trace.empty());
    release.set_value();
    service->wait_idle();
    EXPECT_EQ(client.fetch_report(p.mission_id).status, ReportStatus::Completed);
}

TEST_F(Loopback, ServerSendsOnlyReplies) {
    start();
    auto sock = connect_to(endpoint(), Millis(2000));
    pollfd pfd{sock.fd(), POLLIN, 0};
    EXPECT_EQ(::poll(&pfd, 1, 200), 0) << "unsolicited data before any request";
    send_frame(sock, FetchReport{"x"}, Millis(2000));
    FrameDecoder decoder;
    const auto reply = receive_frame(sock, decoder, Millis(2000));
    EXPECT_TRUE(std::holds_alternative<Report>(reply));
    pfd.revents = 0;
    EXPECT_EQ(::poll(&pfd, 1, 200), 0) << "more than one frame for one request";
    EXPECT_EQ(decoder.buffered(), 0u);

    // A response-type message is not a request: the server hangs up.
    send_frame(sock, Ack{"x", true, std::nullopt}, Millis(2000));
    EXPECT_THROW(receive_frame(sock, decoder, Millis(2000)), ConnectionLost);
}

TEST_F(Loopback, ConcurrentClients) {
    start();
    std::vector<std::future<bool>> results;
    for (int i = 0; i < 8; ++i) {
        results.push_back(std::async(std::launch::async, [this, i] {
            Client c(endpoint());
            for (int j = 0; j < 20; ++j) {
                if (c.fetch_report("m" + std::to_string(i)).status != ReportStatus::Unknown) return false;
            }
            return true;
        }));
    }
    for (auto& r : results) EXPECT_TRUE(r.get());
}

TEST_F(Loopback, ConnectionLostAfterShutdown) {
    start();
    Client client(endpoint());
    EXPECT_EQ(client.fetch_report("a").status, ReportStatus::Unknown);
    const auto ep = endpoint();
    server->stop();
    const auto p = plan::parse_plan(testing::corpus_plan("08"));
    EXPECT_THROW(client.submit(p), ConnectionLost);
    Client fresh(ep);
    EXPECT_THROW(fresh.submit(p), ConnectionLost);
}

TEST(Wire, OccupiedPortThrows) {
    auto [sock, port] = listen_on(Endpoint{"127.0.0.1", 0});
    EXPECT_THROW(listen_on(Endpoint{"127.0.0.1", port}), std::system_error);
}

TEST(Wire, TimeoutWhenPeerNeverAnswers) {
    auto [listener, port] = listen_on(Endpoint{"127.0.0.1", 0});
    Client client(Endpoint{"127.0.0.1", port}, Millis(200));
    EXPECT_THROW(client.fetch_report("m"), Timeout);
}

}  // namespace
}  // namespace one4all
