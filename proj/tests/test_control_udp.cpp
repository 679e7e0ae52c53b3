#include <doctest.h>

#include <chrono>
#include <thread>

#include "rdars/control/client.hpp"
#include "rdars/control/device_server.hpp"
#include "rdars/rng.hpp"

using namespace rdars;
using namespace rdars::ctrl;

namespace {

DeviceServerOptions loopback_options() {
  DeviceServerOptions options;
  options.bind = {"127.0.0.1", 0};  // ephemeral port
  return options;
}

RdarsConfiguration patterned_config(std::uint8_t salt) {
  RdarsConfiguration c(kElementCount);
  for (std::size_t n = 0; n < kElementCount; ++n) {
    c.set_reflection(n, PhaseCode{static_cast<std::uint8_t>((n + salt) % 4)});
  }
  return c;
}

// Polls the device until the expected seq is applied or the deadline hits;
// replies travel on a different socket, so the state can lag an ACK.
DeviceSnapshot wait_for_seq(const DeviceServer& server, std::uint16_t seq,
                            int timeout_ms = 500) {
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::milliseconds(timeout_ms);
  while (std::chrono::steady_clock::now() < deadline) {
    const auto snap = server.state();
    if (snap.any_applied && snap.last_seq_applied == seq) return snap;
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  return server.state();
}

}  // namespace

TEST_CASE("device applies configurations and deduplicates sequence numbers") {
  DeviceServer server(loopback_options());
  server.start();
  ControllerClient client({"127.0.0.1", server.port()});
  const ClientOptions options{0.2, 3};

  std::vector<bool> mask(kElementCount, false);
  for (std::size_t n : {7, 8, 9}) mask[n] = true;
  CHECK(client.send_mode_mask(mask, 1, options).status == SendStatus::acked);

  const RdarsConfiguration sent = [&] {
    RdarsConfiguration c = patterned_config(1);
    for (std::size_t n : {7, 8, 9}) c.set_connected(n);
    return c;
  }();
  CHECK(client.send_config(sent, 2, options).status == SendStatus::acked);

  const DeviceSnapshot snap = wait_for_seq(server, 2);
  CHECK(snap.current == sent);
  CHECK(snap.last_seq_applied == 2);

  // Replaying an old sequence number must not change device state.
  const auto replay = client.send_config(patterned_config(3), 2, options);
  CHECK(replay.status == SendStatus::already_applied);
  CHECK(server.state().current == sent);
  CHECK(server.state().counters.nacked_stale >= 1);

  server.stop();
}

TEST_CASE("mode mask changes preserve stored phase codes") {
  DeviceServer server(loopback_options());
  server.start();
  ControllerClient client({"127.0.0.1", server.port()});
  const ClientOptions options{0.2, 3};

  const RdarsConfiguration phases = patterned_config(2);
  REQUIRE(client.send_config(phases, 10, options).status == SendStatus::acked);

  std::vector<bool> mask(kElementCount, false);
  mask[0] = mask[100] = true;
  REQUIRE(client.send_mode_mask(mask, 11, options).status == SendStatus::acked);

  const DeviceSnapshot snap = wait_for_seq(server, 11);
  for (std::size_t n = 0; n < kElementCount; ++n) {
    if (n == 0 || n == 100) {
      CHECK(snap.current.is_connected(n));
    } else {
      CHECK(snap.current.code(n).value == phases.code(n).value);
    }
  }

  // Clearing the mask re-exposes the stored codes for all elements.
  REQUIRE(client
              .send_mode_mask(std::vector<bool>(kElementCount, false), 12, options)
              .status == SendStatus::acked);
  const DeviceSnapshot cleared = wait_for_seq(server, 12);
  for (std::size_t n = 0; n < kElementCount; ++n) {
    if (n == 0 || n == 100) continue;  // were connected, payload bits were 0
    CHECK(cleared.current.code(n).value == phases.code(n).value);
  }
  server.stop();
}

TEST_CASE("malformed datagrams are NACKed when the seq is recoverable") {
  DeviceServer server(loopback_options());
  server.start();
  const Endpoint device{"127.0.0.1", server.port()};

  UdpSocket raw;
  raw.bind({"127.0.0.1", 0});

  // Valid frame with the CRC corrupted: NACK malformed, state untouched.
  auto frame = encode_frame(make_phase_config(33, patterned_config(0)));
  frame.back() ^= 0x5A;
  raw.send_to(frame, device);
  auto reply = raw.recv_from(500);
  REQUIRE(reply.has_value());
  const ControlFrame nack = decode_frame(*reply);
  CHECK(nack.type == MsgType::nack);
  const AckInfo info = parse_ack_payload(nack);
  CHECK(info.echoed_seq == 33);
  CHECK(info.status == kStatusMalformed);
  CHECK(!server.state().any_applied);

  // Unrecognizable junk is dropped silently.
  raw.send_to({0xDE, 0xAD, 0xBE, 0xEF}, device);
  CHECK(!raw.recv_from(120).has_value());
  CHECK(server.state().counters.ignored >= 1);

  server.stop();
}

TEST_CASE("reordered and duplicated datagrams keep state consistent") {
  DeviceServer server(loopback_options());
  server.start();
  ControllerClient client({"127.0.0.1", server.port()});
  const ClientOptions options{0.2, 3};

  const RdarsConfiguration a = patterned_config(0);
  const RdarsConfiguration b = patterned_config(1);
  const RdarsConfiguration c = patterned_config(2);

  CHECK(client.send_config(a, 5, options).status == SendStatus::acked);
  CHECK(client.send_config(b, 4, options).status == SendStatus::already_applied);
  CHECK(client.send_config(c, 8, options).status == SendStatus::acked);
  CHECK(client.send_config(b, 6, options).status == SendStatus::already_applied);
  CHECK(client.send_config(c, 8, options).status == SendStatus::already_applied);

  const DeviceSnapshot snap = wait_for_seq(server, 8);
  CHECK(snap.current == c);  // only explicitly sent configs, newest wins
  server.stop();
}

TEST_CASE("client times out against a dead endpoint") {
  // Bind a socket to reserve a port, then leave it unserved.
  UdpSocket blackhole;
  blackhole.bind({"127.0.0.1", 0});
  ControllerClient client({"127.0.0.1", blackhole.local_port()});
  const ClientOptions options{0.03, 2};
  const auto outcome = client.send_config(patterned_config(0), 1, options);
  CHECK(outcome.status == SendStatus::timeout);
  CHECK(outcome.attempts == 3);
}

TEST_CASE("retransmission survives heavy datagram loss") {
  DeviceServerOptions options = loopback_options();
  options.loss_rx = 0.5;
  options.loss_tx = 0.5;
  options.loss_seed = 91;
  DeviceServer server(options);
  server.start();
  ControllerClient client({"127.0.0.1", server.port()});
  const ClientOptions client_options{0.02, 5};

  int confirmed = 0;
  const int sends = 30;
  for (int i = 1; i <= sends; ++i) {
    const auto outcome = client.send_config(
        patterned_config(static_cast<std::uint8_t>(i)),
        static_cast<std::uint16_t>(i), client_options);
    if (outcome.delivered()) ++confirmed;
  }
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  // Delivery = the device applied the configuration; with 6 transmissions
  // at 50% loss a request gets through with probability 1 - 0.5^6. The
  // bound mirrors the >= 90% acceptance requirement.
  const auto applied = server.state().counters.applied;
  CHECK(applied >= 27);
  CHECK(applied <= static_cast<std::uint64_t>(sends));
  CHECK(confirmed >= sends / 2);  // reply direction is lossy too
  server.stop();
}
