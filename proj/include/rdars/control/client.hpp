#pragma once

#include <cstdint>

#include "rdars/control/frame.hpp"
#include "rdars/control/udp.hpp"

// BS-side controller client: sends one configuration request per call and
// retransmits the identical datagram until a matching reply arrives or the
// attempt budget is exhausted. Requests are idempotent at the device thanks
// to sequence deduplication, so a duplicate NACK for our own seq means the
// configuration was already applied.

namespace rdars::ctrl {

struct ClientOptions {
  double timeout_s = 0.2;  // per-attempt reply timeout
  int retries = 3;         // retransmissions after the first attempt
};

enum class SendStatus {
  acked,            // ACK received
  already_applied,  // NACK stale/duplicate for our seq: applied earlier
  nacked,           // NACK with any other status
  timeout,          // no matching reply after all attempts
};

struct SendOutcome {
  SendStatus status = SendStatus::timeout;
  std::uint8_t nack_status = 0;  // valid when status == nacked
  int attempts = 0;

  bool delivered() const {
    return status == SendStatus::acked || status == SendStatus::already_applied;
  }
};

class ControllerClient {
 public:
  explicit ControllerClient(Endpoint device);

  SendOutcome send_config(const RdarsConfiguration& config, std::uint16_t seq,
                          const ClientOptions& options = {});
  SendOutcome send_mode_mask(const std::vector<bool>& connected_mask,
                             std::uint16_t seq, const ClientOptions& options = {});

  /// Sends an arbitrary request frame with retransmission.
  SendOutcome send_request(const ControlFrame& frame, const ClientOptions& options);

 private:
  Endpoint device_;
  UdpSocket socket_;
};

}  // namespace rdars::ctrl
