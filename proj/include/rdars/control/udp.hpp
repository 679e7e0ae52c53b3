#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Minimal RAII wrapper over a POSIX UDP socket; enough for the control
// link's datagram exchange on IPv4.

namespace rdars::ctrl {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

/// Parses "host:port". Throws std::invalid_argument on malformed input.
Endpoint parse_endpoint(const std::string& text);

class UdpSocket {
 public:
  UdpSocket();
  ~UdpSocket();
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;
  UdpSocket(UdpSocket&& other) noexcept;
  UdpSocket& operator=(UdpSocket&& other) noexcept;

  /// Binds to host:port (port 0 selects an ephemeral port).
  void bind(const Endpoint& endpoint);
  std::uint16_t local_port() const;

  void send_to(const std::vector<std::uint8_t>& data, const Endpoint& peer);

  /// Waits up to timeout_ms for one datagram. Returns the payload and
  /// fills `from` when provided; std::nullopt on timeout.
  std::optional<std::vector<std::uint8_t>> recv_from(int timeout_ms,
                                                     Endpoint* from = nullptr);

 private:
  int fd_ = -1;
};

class SocketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rdars::ctrl
