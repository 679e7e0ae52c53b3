#include "rdars/control/client.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace rdars::ctrl {

ControllerClient::ControllerClient(Endpoint device) : device_(std::move(device)) {
  socket_.bind({"0.0.0.0", 0});
}

SendOutcome ControllerClient::send_config(const RdarsConfiguration& config,
                                          std::uint16_t seq,
                                          const ClientOptions& options) {
  return send_request(make_phase_config(seq, config), options);
}

SendOutcome ControllerClient::send_mode_mask(const std::vector<bool>& connected_mask,
                                             std::uint16_t seq,
                                             const ClientOptions& options) {
  return send_request(make_mode_mask(seq, connected_mask), options);
}

SendOutcome ControllerClient::send_request(const ControlFrame& frame,
                                           const ClientOptions& options) {
  if (!(options.timeout_s > 0.0)) {
    throw std::invalid_argument("ControllerClient: timeout must be positive");
  }
  if (options.retries < 0) {
    throw std::invalid_argument("ControllerClient: retries must be >= 0");
  }
  const auto datagram = encode_frame(frame);
  const int timeout_ms =
      std::max(1, static_cast<int>(std::lround(options.timeout_s * 1000.0)));

  SendOutcome outcome;
  for (int attempt = 0; attempt <= options.retries; ++attempt) {
    outcome.attempts = attempt + 1;
    socket_.send_to(datagram, device_);

    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::milliseconds(timeout_ms);
    while (true) {
      const auto now = std::chrono::steady_clock::now();
      if (now >= deadline) break;
      const int remaining_ms = static_cast<int>(
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now)
              .count());
      auto reply = socket_.recv_from(std::max(1, remaining_ms));
      if (!reply) break;

      ControlFrame parsed;
      try {
        parsed = decode_frame(*reply);
      } catch (const FrameDecodeError&) {
        continue;  // corrupted reply; keep waiting within this attempt
      }
      if (parsed.type != MsgType::ack && parsed.type != MsgType::nack) continue;
      const AckInfo info = parse_ack_payload(parsed);
      if (info.echoed_seq != frame.seq) continue;  // reply to someone else

      if (parsed.type == MsgType::ack) {
        outcome.status = SendStatus::acked;
        return outcome;
      }
      if (info.status == kStatusStale) {
        outcome.status = SendStatus::already_applied;
        return outcome;
      }
      outcome.status = SendStatus::nacked;
      outcome.nack_status = info.status;
      return outcome;
    }
  }
  outcome.status = SendStatus::timeout;
  return outcome;
}

}  // namespace rdars::ctrl
