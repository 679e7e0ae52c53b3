#include "rdars/control/device_server.hpp"

#include <cstdio>

#include "rdars/rng.hpp"

namespace rdars::ctrl {

DeviceServer::DeviceServer(DeviceServerOptions options)
    : options_(options),
      codes_(kElementCount, 0),
      connected_(kElementCount, false),
      loss_rng_(make_stream(options.loss_seed, 0x10DE)) {}

DeviceServer::~DeviceServer() { stop(); }

void DeviceServer::start() {
  socket_.bind(options_.bind);
  port_ = socket_.local_port();
  running_ = true;
  thread_ = std::thread([this] { serve_loop(); });
}

void DeviceServer::stop() {
  running_ = false;
  if (thread_.joinable()) thread_.join();
}

DeviceSnapshot DeviceServer::state() const {
  std::lock_guard lock(mutex_);
  DeviceSnapshot snap;
  snap.current = RdarsConfiguration(kElementCount);
  for (std::size_t n = 0; n < kElementCount; ++n) {
    if (connected_[n]) {
      snap.current.set_connected(n);
    } else {
      snap.current.set_reflection(n, PhaseCode{codes_[n]});
    }
  }
  snap.last_seq_applied = last_seq_applied_;
  snap.any_applied = any_applied_;
  snap.counters = counters_;
  return snap;
}

void DeviceServer::serve_loop() {
  while (running_) {
    try {
      Endpoint peer;
      auto datagram = socket_.recv_from(50, &peer);
      if (!datagram) continue;
      handle_datagram(*datagram, peer);
    } catch (const SocketError& err) {
      std::fprintf(stderr, "device server: %s\n", err.what());
      running_ = false;
    }
  }
}

void DeviceServer::handle_datagram(const std::vector<std::uint8_t>& datagram,
                                   const Endpoint& peer) {
  std::unique_lock lock(mutex_);
  ++counters_.datagrams_received;
  if (options_.loss_rx > 0.0 &&
      uniform_double(loss_rng_) < options_.loss_rx) {
    ++counters_.datagrams_dropped;
    return;
  }

  ControlFrame frame;
  try {
    frame = decode_frame(datagram);
  } catch (const FrameDecodeError& err) {
    // NACK only when the sequence number is trustworthy: header intact up
    // to the seq field and the frame is unmistakably ours.
    const bool seq_recoverable =
        datagram.size() >= kHeaderSize && datagram[0] == kMagic0 &&
        datagram[1] == kMagic1 && datagram[2] == kVersion &&
        err.kind() != DecodeErrorKind::bad_magic &&
        err.kind() != DecodeErrorKind::bad_version;
    if (seq_recoverable) {
      const std::uint16_t seq =
          static_cast<std::uint16_t>((datagram[4] << 8) | datagram[5]);
      ++counters_.nacked_malformed;
      lock.unlock();
      reply(make_nack(++reply_seq_, seq, kStatusMalformed), peer);
    } else {
      ++counters_.ignored;
    }
    return;
  }

  if (frame.type == MsgType::ack || frame.type == MsgType::nack) {
    ++counters_.ignored;  // not a request; never answer replies
    return;
  }

  const bool fresh = !any_applied_ || seq_is_newer(frame.seq, last_seq_applied_);
  if (!fresh) {
    ++counters_.nacked_stale;
    lock.unlock();
    reply(make_nack(++reply_seq_, frame.seq, kStatusStale), peer);
    return;
  }

  if (frame.type == MsgType::phase_config) {
    for (std::size_t n = 0; n < kElementCount; ++n) {
      codes_[n] = (frame.payload[n / 4] >> (2 * (n % 4))) & 0x03;
    }
  } else {  // mode_mask
    const std::vector<bool> mask = decode_mode_payload(frame.payload);
    connected_ = mask;  // stored phase codes are untouched
  }
  last_seq_applied_ = frame.seq;
  any_applied_ = true;
  ++counters_.applied;
  lock.unlock();
  reply(make_ack(++reply_seq_, frame.seq, kStatusOk), peer);
}

void DeviceServer::reply(const ControlFrame& frame, const Endpoint& peer) {
  {
    std::lock_guard lock(mutex_);
    if (options_.loss_tx > 0.0 &&
        uniform_double(loss_rng_) < options_.loss_tx) {
      ++counters_.replies_dropped;
      return;
    }
  }
  socket_.send_to(encode_frame(frame), peer);
}

}  // namespace rdars::ctrl
