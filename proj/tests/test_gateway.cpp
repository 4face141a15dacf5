#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

#include "causalrag/digest.hpp"
#include "causalrag/embedding.hpp"
#include "causalrag/errors.hpp"
#include "causalrag/gateway.hpp"
#include "causalrag/json.hpp"
#include "helpers.hpp"

using namespace causalrag;

TEST_CASE("mock replay is deterministic for an exact digest entry") {
    const std::string prompt = render_template(TemplateId::CausalDiscovery, {{"graph_data", "g"}});
    MockScript script;
    script.add_exact(TemplateId::CausalDiscovery, sha256_hex(prompt), "canned report");
    Gateway gateway(testutil::mock_config(), std::move(script));

    CHECK(gateway.complete(TemplateId::CausalDiscovery, prompt) == "canned report");
    CHECK(gateway.complete(TemplateId::CausalDiscovery, prompt) == "canned report");
    CHECK(gateway.completion_calls() == 2);
    CHECK(gateway.completion_calls_for(TemplateId::CausalDiscovery) == 2);
}

TEST_CASE("mock miss falls back, then errors naming the template") {
    MockScript with_fallback;
    with_fallback.set_fallback("generic");
    Gateway gateway(testutil::mock_config(), std::move(with_fallback));
    CHECK(gateway.complete(TemplateId::AnswerGeneration, "anything") == "generic");

    Gateway empty(testutil::mock_config(), MockScript{});
    try {
        empty.complete(TemplateId::AnswerGeneration, "anything");
        FAIL("expected MockMissError");
    } catch (const MockMissError& e) {
        CHECK(std::string(e.what()).find("answer_generation") != std::string::npos);
    }
}

TEST_CASE("mock lookup precedence: digest, then contains, then template default") {
    MockScript script;
    script.add_default(TemplateId::AnswerGeneration, "default");
    script.add_contains(TemplateId::AnswerGeneration, "special", "by-contains");
    script.add_exact(TemplateId::AnswerGeneration, sha256_hex("special prompt"), "by-digest");
    Gateway gateway(testutil::mock_config(), std::move(script));

    CHECK(gateway.complete(TemplateId::AnswerGeneration, "special prompt") == "by-digest");
    CHECK(gateway.complete(TemplateId::AnswerGeneration, "a special day") == "by-contains");
    CHECK(gateway.complete(TemplateId::AnswerGeneration, "plain") == "default");
}

TEST_CASE("mock embeddings are deterministic, sized and distinct") {
    Gateway gateway(testutil::mock_config(48), MockScript{});
    const auto first = gateway.embed({"buyer attention", "buyer attention", "contract award"});
    REQUIRE(first.size() == 3);
    for (const auto& vec : first) CHECK(vec.size() == 48);
    CHECK(first[0] == first[1]);

    const auto again = gateway.embed({"buyer attention"});
    CHECK(again[0] == first[0]);

    // distinct texts land below 1.0 similarity (computed, then asserted)
    const double similarity = cosine_similarity(first[0], first[2]);
    CHECK(similarity < 1.0);
    CHECK(gateway.embedding_calls() == 2);
    CHECK(gateway.embedded_texts() == 4);
}

TEST_CASE("token overlap pulls mock embeddings together") {
    const auto a = mock_embedding("solar flare activity", 64);
    const auto b = mock_embedding("a solar flare erupted", 64);
    const auto c = mock_embedding("orchard cider harvest", 64);
    CHECK(cosine_similarity(a, b) > cosine_similarity(a, c) + 0.2);
}

TEST_CASE("embedding an empty list violates the contract") {
    Gateway gateway(testutil::mock_config(), MockScript{});
    CHECK_THROWS_AS(gateway.embed({}), ContractError);
}

TEST_CASE("bounded concurrent mock calls all succeed within the bound") {
    GatewayConfig config = testutil::mock_config();
    config.max_concurrent = 3;
    MockScript script;
    script.set_fallback("ok");
    Gateway gateway(std::move(config), std::move(script));

    std::vector<std::thread> workers;
    std::atomic<int> done{0};
    for (int i = 0; i < 16; ++i) {
        workers.emplace_back([&gateway, &done] {
            for (int j = 0; j < 20; ++j) {
                if (gateway.complete(TemplateId::AnswerGeneration, "p") == "ok") done.fetch_add(1);
            }
        });
    }
    for (auto& worker : workers) worker.join();
    CHECK(done.load() == 16 * 20);
    CHECK(gateway.max_in_flight() <= 3);
}

// ---------------------------------------------------------------- live stubs

namespace {

struct StubServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> chat_hits{0};

    explicit StubServer(int fail_first_n = 0) {
        server.Post("/v1/chat/completions", [this, fail_first_n](const httplib::Request& req,
                                                                 httplib::Response& res) {
            const int hit = chat_hits.fetch_add(1) + 1;
            if (hit <= fail_first_n) {
                res.status = 500;
                res.set_content("try later", "text/plain");
                return;
            }
            const auto body = Json::parse(req.body);
            const std::string content = body.at("messages").at(0).at("content");
            Json reply = {{"choices", Json::array({Json{{"message", Json{{"content",
                                                                          "echo: " + content}}}}})}};
            res.set_content(reply.dump(), "application/json");
        });
        server.Post("/v1/embeddings", [](const httplib::Request& req, httplib::Response& res) {
            const auto body = Json::parse(req.body);
            Json data = Json::array();
            int index = 0;
            for (const auto& text : body.at("input")) {
                (void)text;
                data.push_back(Json{{"index", index}, {"embedding", Json::array({1.0, 0.5, index * 1.0, 1.0})}});
                ++index;
            }
            res.set_content(Json{{"data", data}}.dump(), "application/json");
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~StubServer() {
        server.stop();
        thread.join();
    }

    GatewayConfig config(int dim = 4) const {
        GatewayConfig cfg;
        cfg.mode = GatewayMode::Live;
        cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1";
        cfg.api_key_env = "CAUSALRAG_TEST_KEY";
        cfg.embedding_dim = dim;
        cfg.max_retries = 2;
        cfg.initial_backoff = std::chrono::milliseconds(1);
        return cfg;
    }
};

}  // namespace

TEST_CASE("live completion against a local stub echoes the prompt") {
    setenv("CAUSALRAG_TEST_KEY", "test-key", 1);
    StubServer stub;
    Gateway gateway(stub.config());
    CHECK(gateway.complete(TemplateId::AnswerGeneration, "hello there") == "echo: hello there");
}

TEST_CASE("live embeddings validate the configured dimension") {
    setenv("CAUSALRAG_TEST_KEY", "test-key", 1);
    StubServer stub;

    Gateway good(stub.config(4));
    const auto vectors = good.embed({"a", "b"});
    REQUIRE(vectors.size() == 2);
    CHECK(vectors[1][2] == doctest::Approx(1.0));

    Gateway bad(stub.config(8));
    CHECK_THROWS_AS(bad.embed({"a"}), ProtocolError);
}

TEST_CASE("transient failures are retried, then exhaust into a transport error") {
    setenv("CAUSALRAG_TEST_KEY", "test-key", 1);
    {
        StubServer flaky(2);  // two 500s, then success
        Gateway gateway(flaky.config());
        CHECK(gateway.complete(TemplateId::AnswerGeneration, "hi") == "echo: hi");
        CHECK(flaky.chat_hits.load() == 3);
    }
    {
        StubServer flaky(5);
        GatewayConfig config = flaky.config();
        config.max_retries = 1;
        Gateway gateway(std::move(config));
        CHECK_THROWS_AS(gateway.complete(TemplateId::AnswerGeneration, "hi"), TransportError);
        CHECK(flaky.chat_hits.load() == 2);
    }
}

TEST_CASE("live mode requires the API key environment variable at call time") {
    StubServer stub;
    GatewayConfig config = stub.config();
    config.api_key_env = "CAUSALRAG_UNSET_KEY_VAR";
    unsetenv("CAUSALRAG_UNSET_KEY_VAR");
    Gateway gateway(std::move(config));
    CHECK_THROWS_AS(gateway.complete(TemplateId::AnswerGeneration, "hi"), AuthError);
}

TEST_CASE("mock script files parse entries and fallback") {
    testutil::TempDir tmp;
    testutil::write_file(tmp.path / "script.json", R"({
      "fallback": "fb",
      "entries": [
        {"template": "answer_generation", "contains": "magic", "response": "found"}
      ]
    })");
    const MockScript script = MockScript::from_file(tmp.path / "script.json");
    Gateway gateway(testutil::mock_config(), script);
    CHECK(gateway.complete(TemplateId::AnswerGeneration, "some magic here") == "found");
    CHECK(gateway.complete(TemplateId::FaithfulnessJudge, "other") == "fb");
    CHECK_THROWS_AS(MockScript::from_file(tmp.path / "missing.json"), NotFoundError);
}
