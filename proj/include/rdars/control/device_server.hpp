#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "rdars/control/frame.hpp"
#include "rdars/control/udp.hpp"
#include "rdars/surface.hpp"

// Emulated RDARS controller: a single-threaded UDP server that applies
// PHASE_CONFIG / MODE_MASK requests to its stored surface state with
// sequence-number deduplication, and answers each valid request in-band.
// Optional datagram-loss injection (independent per direction, seeded)
// supports robustness testing.

namespace rdars::ctrl {

struct DeviceServerOptions {
  Endpoint bind{"127.0.0.1", kDefaultPort};  // port 0 = ephemeral
  double loss_rx = 0.0;   // probability an arriving datagram is dropped
  double loss_tx = 0.0;   // probability a reply datagram is dropped
  std::uint64_t loss_seed = 0;
};

struct DeviceCounters {
  std::uint64_t datagrams_received = 0;
  std::uint64_t datagrams_dropped = 0;   // loss injection, receive side
  std::uint64_t replies_dropped = 0;     // loss injection, transmit side
  std::uint64_t applied = 0;
  std::uint64_t nacked_stale = 0;
  std::uint64_t nacked_malformed = 0;
  std::uint64_t ignored = 0;             // undecodable or non-request frames
};

struct DeviceSnapshot {
  RdarsConfiguration current;
  std::uint16_t last_seq_applied = 0;
  bool any_applied = false;
  DeviceCounters counters;
};

class DeviceServer {
 public:
  explicit DeviceServer(DeviceServerOptions options = {});
  ~DeviceServer();
  DeviceServer(const DeviceServer&) = delete;
  DeviceServer& operator=(const DeviceServer&) = delete;

  /// Binds the socket and starts the service thread.
  void start();
  void stop();

  std::uint16_t port() const { return port_; }
  DeviceSnapshot state() const;

 private:
  void serve_loop();
  void handle_datagram(const std::vector<std::uint8_t>& datagram,
                       const Endpoint& peer);
  void reply(const ControlFrame& frame, const Endpoint& peer);

  DeviceServerOptions options_;
  UdpSocket socket_;
  std::uint16_t port_ = 0;
  std::thread thread_;
  std::atomic<bool> running_{false};

  mutable std::mutex mutex_;
  std::vector<std::uint8_t> codes_;   // stored 2-bit code per element
  std::vector<bool> connected_;      // stored mode per element
  std::uint16_t last_seq_applied_ = 0;
  bool any_applied_ = false;
  std::uint16_t reply_seq_ = 0;
  DeviceCounters counters_;
  std::mt19937_64 loss_rng_;
};

}  // namespace rdars::ctrl
