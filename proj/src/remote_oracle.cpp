#include "patchdct/remote_oracle.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>

#include <httplib.h>
#include <json.hpp>

#include "patchdct/error.hpp"

namespace patchdct {

namespace wire {

static_assert(std::endian::native == std::endian::little, "wire tensors are little-endian f64");

std::string encode_base64(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int written = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                      reinterpret_cast<const unsigned char*>(bytes.data()),
                                      static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(written));
  return out;
}

std::string decode_base64(std::string_view text) {
  if (text.size() % 4 != 0) throw ProtocolError("base64 length is not a multiple of 4");
  std::string out(3 * text.size() / 4, '\0');
  const int written = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                      reinterpret_cast<const unsigned char*>(text.data()),
                                      static_cast<int>(text.size()));
  if (written < 0) throw ProtocolError("malformed base64 payload");
  // EVP_DecodeBlock counts padding as zero bytes.
  std::size_t padding = 0;
  if (!text.empty() && text.back() == '=') ++padding;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++padding;
  out.resize(static_cast<std::size_t>(written) - padding);
  return out;
}

std::string encode_predict_request(const ImageTensor& x) {
  const std::string_view bytes(reinterpret_cast<const char*>(x.values().data()), x.size() * sizeof(double));
  nlohmann::json body = {{"w", x.width()}, {"h", x.height()}, {"c", x.channels()}, {"data_b64", encode_base64(bytes)}};
  return body.dump();
}

ImageTensor decode_predict_request(std::string_view body) {
  try {
    const auto json = nlohmann::json::parse(body);
    const Shape shape{json.at("w").get<std::size_t>(), json.at("h").get<std::size_t>(),
                      json.at("c").get<std::size_t>()};
    const std::string bytes = decode_base64(json.at("data_b64").get<std::string>());
    if (shape.size() == 0 || bytes.size() != shape.size() * sizeof(double)) {
      throw ProtocolError("payload size does not match w*h*c");
    }
    std::vector<double> data(shape.size());
    std::memcpy(data.data(), bytes.data(), bytes.size());
    return ImageTensor(shape, std::move(data));
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed predict request: ") + e.what());
  }
}

std::string encode_label_response(Label label) { return nlohmann::json{{"label", label}}.dump(); }

Label decode_label_response(std::string_view body) {
  try {
    const auto json = nlohmann::json::parse(body);
    const auto& label = json.at("label");
    if (!label.is_number_integer()) throw ProtocolError("label is not an integer");
    return label.get<Label>();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed predict response: ") + e.what());
  }
}

std::string encode_health_response(int num_classes) {
  return nlohmann::json{{"status", "ok"}, {"num_classes", num_classes}}.dump();
}

int decode_health_response(std::string_view body) {
  try {
    const auto json = nlohmann::json::parse(body);
    if (json.at("status").get<std::string>() != "ok") throw ProtocolError("server reports unhealthy status");
    const auto& classes = json.at("num_classes");
    if (!classes.is_number_integer()) throw ProtocolError("num_classes is not an integer");
    return classes.get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed health response: ") + e.what());
  }
}

}  // namespace wire

namespace {

httplib::Client make_client(const std::string& endpoint, double timeout_seconds) {
  httplib::Client client(endpoint);
  const auto seconds = static_cast<time_t>(timeout_seconds);
  const auto micros = static_cast<time_t>((timeout_seconds - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);
  return client;
}

const httplib::Response& checked(const httplib::Result& result, const std::string& what) {
  if (!result) throw ConnectionError(what + ": " + httplib::to_string(result.error()));
  if (result->status != 200) {
    throw ServerError(result->status, what + ": HTTP " + std::to_string(result->status));
  }
  return *result;
}

}  // namespace

RemoteOracle::RemoteOracle(std::string endpoint, std::optional<int> num_classes, double timeout_seconds)
    : endpoint_(std::move(endpoint)), timeout_seconds_(timeout_seconds), num_classes_(num_classes) {}

RemoteOracle::~RemoteOracle() = default;

Label RemoteOracle::predict(const ImageTensor& x) const {
  auto client = make_client(endpoint_, timeout_seconds_);
  const auto result = client.Post("/predict", wire::encode_predict_request(x), "application/json");
  return wire::decode_label_response(checked(result, "POST " + endpoint_ + "/predict").body);
}

int RemoteOracle::num_classes() const {
  std::lock_guard lock(mutex_);
  if (!num_classes_) {
    auto client = make_client(endpoint_, timeout_seconds_);
    const auto result = client.Get("/healthz");
    num_classes_ = wire::decode_health_response(checked(result, "GET " + endpoint_ + "/healthz").body);
  }
  return *num_classes_;
}

}  // namespace patchdct
