#ifndef PATCHDCT_REMOTE_ORACLE_HPP
#define PATCHDCT_REMOTE_ORACLE_HPP

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "patchdct/oracle.hpp"

namespace patchdct {

namespace wire {

// POST /predict  {"w": int, "h": int, "c": int, "data_b64": base64(f64 LE, (h,w,c))}
//             -> {"label": int}
// GET /healthz  -> {"status": "ok", "num_classes": int}

std::string encode_base64(std::string_view bytes);
/// Throws ProtocolError on malformed input.
std::string decode_base64(std::string_view text);

std::string encode_predict_request(const ImageTensor& x);
/// Server side of the protocol. Throws ProtocolError.
ImageTensor decode_predict_request(std::string_view body);

std::string encode_label_response(Label label);
Label decode_label_response(std::string_view body);

std::string encode_health_response(int num_classes);
int decode_health_response(std::string_view body);

}  // namespace wire

/// Oracle served over HTTP by a model server speaking the wire protocol.
class RemoteOracle : public HardLabelOracle {
 public:
  /// endpoint like "http://127.0.0.1:8080". num_classes is fetched from
  /// /healthz on first use when not given.
  explicit RemoteOracle(std::string endpoint, std::optional<int> num_classes = std::nullopt,
                        double timeout_seconds = 30.0);
  ~RemoteOracle() override;

  Label predict(const ImageTensor& x) const override;
  int num_classes() const override;
  bool concurrent_safe() const override { return true; }

  const std::string& endpoint() const { return endpoint_; }

 private:
  std::string endpoint_;
  double timeout_seconds_;
  mutable std::mutex mutex_;
  mutable std::optional<int> num_classes_;
};

}  // namespace patchdct

#endif  // PATCHDCT_REMOTE_ORACLE_HPP
