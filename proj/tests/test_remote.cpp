#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <json.hpp>
#include <thread>

#include "patchdct/attack.hpp"
#include "patchdct/error.hpp"
#include "patchdct/remote_oracle.hpp"
#include "test_support.hpp"

using namespace patchdct;
using testsupport::random_image;

namespace {

// Minimal stand-in for the model server: decodes requests with the wire
// helpers and answers from a local oracle, or with a scripted failure.
class StubServer {
 public:
  enum class Mode { kLocal, kGarbage, kError500, kBadLabelType };

  explicit StubServer(const HardLabelOracle& model, int num_classes = 1000) : model_(model) {
    server_.Post("/predict", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      switch (mode_.load()) {
        case Mode::kGarbage:
          res.set_content("not json at all", "application/json");
          return;
        case Mode::kError500:
          res.status = 500;
          res.set_content(R"({"error":"internal"})", "application/json");
          return;
        case Mode::kBadLabelType:
          res.set_content(R"({"label":"cat"})", "application/json");
          return;
        case Mode::kLocal:
          break;
      }
      try {
        const ImageTensor x = wire::decode_predict_request(req.body);
        res.set_content(wire::encode_label_response(model_.predict(x)), "application/json");
      } catch (const Error& e) {
        res.status = 400;
        res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
      }
    });
    server_.Get("/healthz", [num_classes](const httplib::Request&, httplib::Response& res) {
      res.set_content(wire::encode_health_response(num_classes), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int port() const { return port_; }
  void set_mode(Mode mode) { mode_ = mode; }
  std::uint64_t requests() const { return requests_.load(); }

 private:
  const HardLabelOracle& model_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<Mode> mode_{Mode::kLocal};
  std::atomic<std::uint64_t> requests_{0};
};

}  // namespace

TEST(Wire, Base64RoundTrip) {
  for (std::size_t n = 0; n < 20; ++n) {
    std::string bytes;
    for (std::size_t i = 0; i < n; ++i) bytes.push_back(static_cast<char>((i * 73 + 11) & 0xff));
    EXPECT_EQ(wire::decode_base64(wire::encode_base64(bytes)), bytes) << n;
  }
  EXPECT_EQ(wire::encode_base64("foobar"), "Zm9vYmFy");
  EXPECT_EQ(wire::decode_base64("Zm9vYg=="), "foob");
}

TEST(Wire, MalformedBase64) {
  EXPECT_THROW(wire::decode_base64("abc"), ProtocolError);
  EXPECT_THROW(wire::decode_base64("ab$d"), ProtocolError);
}

TEST(Wire, PredictRequestRoundTripIsBitExact) {
  const auto x = random_image(1, {7, 5, 3}, -1, 2);
  const std::string body = wire::encode_predict_request(x);
  const auto json = nlohmann::json::parse(body);
  EXPECT_EQ(json.at("w").get<int>(), 7);
  EXPECT_EQ(json.at("h").get<int>(), 5);
  EXPECT_EQ(json.at("c").get<int>(), 3);
  EXPECT_EQ(wire::decode_predict_request(body), x);
}

TEST(Wire, MalformedPredictRequests) {
  EXPECT_THROW(wire::decode_predict_request("{"), ProtocolError);
  EXPECT_THROW(wire::decode_predict_request(R"({"w":2,"h":2,"c":1})"), ProtocolError);
  EXPECT_THROW(wire::decode_predict_request(R"({"w":2,"h":2,"c":1,"data_b64":"%%%%"})"), ProtocolError);
  // Payload of the wrong length.
  EXPECT_THROW(wire::decode_predict_request(R"({"w":2,"h":2,"c":1,"data_b64":"AAAAAAAAAAA="})"), ProtocolError);
}

TEST(Wire, LabelAndHealthResponses) {
  EXPECT_EQ(wire::decode_label_response(wire::encode_label_response(417)), 417);
  EXPECT_EQ(wire::decode_health_response(wire::encode_health_response(1000)), 1000);
  EXPECT_THROW(wire::decode_label_response("[]"), ProtocolError);
  EXPECT_THROW(wire::decode_label_response(R"({"label":1.5})"), ProtocolError);
  EXPECT_THROW(wire::decode_health_response(R"({"status":"down","num_classes":3})"), ProtocolError);
}

TEST(RemoteOracle, ConstantLabelServer) {
  testsupport::ConstantOracle model(7);
  StubServer server(model);
  RemoteOracle oracle(server.endpoint());
  for (std::uint64_t seed = 0; seed < 5; ++seed) EXPECT_EQ(oracle.predict(random_image(seed, {4, 4, 3})), 7);
  EXPECT_EQ(server.requests(), 5u);
}

TEST(RemoteOracle, HealthzReportsClassCount) {
  testsupport::ConstantOracle model(0);
  StubServer server(model, 1000);
  EXPECT_EQ(RemoteOracle(server.endpoint()).num_classes(), 1000);
  EXPECT_EQ(RemoteOracle(server.endpoint(), 12).num_classes(), 12);  // given explicitly, no request
}

TEST(RemoteOracle, ServedAndLocalAgreeOnSeededTensors) {
  const Shape shape{16, 16, 3};
  const MlpOracle model(3, 10, shape);
  StubServer server(model, 10);
  RemoteOracle oracle(server.endpoint());
  int agree = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto x = random_image(seed + 100, shape);
    agree += oracle.predict(x) == model.predict(x);
  }
  EXPECT_EQ(agree, 50);
}

TEST(RemoteOracle, MalformedResponseIsProtocolErrorAndStillCharged) {
  testsupport::ConstantOracle model(0);
  StubServer server(model);
  server.set_mode(StubServer::Mode::kGarbage);
  RemoteOracle oracle(server.endpoint());
  QueryLedger ledger(10);
  EXPECT_THROW(query(oracle, ledger, ImageTensor(Shape{2, 2, 1})), ProtocolError);
  EXPECT_EQ(ledger.used(), 1u);
  server.set_mode(StubServer::Mode::kBadLabelType);
  EXPECT_THROW(query(oracle, ledger, ImageTensor(Shape{2, 2, 1})), ProtocolError);
  EXPECT_EQ(ledger.used(), 2u);
}

TEST(RemoteOracle, HttpErrorStatusIsServerError) {
  testsupport::ConstantOracle model(0);
  StubServer server(model);
  server.set_mode(StubServer::Mode::kError500);
  RemoteOracle oracle(server.endpoint());
  try {
    oracle.predict(ImageTensor(Shape{2, 2, 1}));
    FAIL() << "expected ServerError";
  } catch (const ServerError& e) {
    EXPECT_EQ(e.status(), 500);
  }
}

TEST(RemoteOracle, StubRejectsMalformedRequestWith400) {
  testsupport::ConstantOracle model(0);
  StubServer server(model);
  httplib::Client client(server.endpoint());
  const auto res = client.Post("/predict", R"({"w":1,"h":1,"c":1,"data_b64":"!!"})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
}

TEST(RemoteOracle, UnreachableEndpointIsConnectionError) {
  int port = 0;
  {
    testsupport::ConstantOracle model(0);
    StubServer server(model);
    port = server.port();
  }  // server gone; port now closed
  RemoteOracle oracle("http://127.0.0.1:" + std::to_string(port), std::nullopt, 2.0);
  EXPECT_THROW(oracle.predict(ImageTensor(Shape{2, 2, 1})), ConnectionError);
  EXPECT_THROW(oracle.num_classes(), ConnectionError);
}

TEST(RemoteOracle, AttackQueryCountMatchesServerSide) {
  const Shape shape{32, 32, 3};
  const PatchOracle model(shape, 16, 0, 0.55);
  StubServer server(model, 2);
  RemoteOracle oracle(server.endpoint());
  AttackConfig config;
  config.budget = 300;
  config.seed = 4;
  const auto x0 = random_image(9, shape, 0.4, 0.6);
  const auto result = run_attack(x0, oracle, config);
  EXPECT_EQ(result.queries_used, server.requests());
  EXPECT_LE(result.queries_used, 300u);
  EXPECT_TRUE(result.succeeded) << result.message;
  // Same run against the local model is identical.
  const auto local = run_attack(x0, model, config);
  EXPECT_EQ(local.adversarial, result.adversarial);
  EXPECT_EQ(local.trace, result.trace);
}

TEST(RemoteOracle, ServerFailureMidAttackIsReportedAndAccounted) {
  const Shape shape{32, 32, 3};
  testsupport::ConstantOracle model(0);
  StubServer server(model, 2);
  server.set_mode(StubServer::Mode::kError500);
  RemoteOracle oracle(server.endpoint());
  AttackConfig config;
  config.budget = 100;
  const auto result = run_attack(random_image(1, shape, 0.3, 0.7), oracle, config);
  EXPECT_EQ(result.status, AttackStatus::kOracleError);
  EXPECT_FALSE(result.succeeded);
  EXPECT_EQ(result.queries_used, server.requests());
}
