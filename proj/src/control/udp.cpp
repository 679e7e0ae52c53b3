#include "rdars/control/udp.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <utility>

namespace rdars::ctrl {

namespace {

sockaddr_in to_sockaddr(const Endpoint& ep) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(ep.port);
  if (::inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) != 1) {
    throw SocketError("invalid IPv4 address: " + ep.host);
  }
  return addr;
}

}  // namespace

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= text.size()) {
    throw std::invalid_argument("endpoint must be host:port, got '" + text + "'");
  }
  Endpoint ep;
  ep.host = text.substr(0, colon);
  const std::string port_text = text.substr(colon + 1);
  std::size_t used = 0;
  const int port = std::stoi(port_text, &used);
  if (used != port_text.size() || port < 0 || port > 65535) {
    throw std::invalid_argument("invalid port in endpoint '" + text + "'");
  }
  ep.port = static_cast<std::uint16_t>(port);
  return ep;
}

UdpSocket::UdpSocket() {
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) {
    throw SocketError(std::string("socket(): ") + std::strerror(errno));
  }
}

UdpSocket::~UdpSocket() {
  if (fd_ >= 0) ::close(fd_);
}

UdpSocket::UdpSocket(UdpSocket&& other) noexcept : fd_(other.fd_) {
  other.fd_ = -1;
}

UdpSocket& UdpSocket::operator=(UdpSocket&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(other.fd_, -1);
  }
  return *this;
}

void UdpSocket::bind(const Endpoint& endpoint) {
  sockaddr_in addr = to_sockaddr(endpoint);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    throw SocketError(std::string("bind(): ") + std::strerror(errno));
  }
}

std::uint16_t UdpSocket::local_port() const {
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    throw SocketError(std::string("getsockname(): ") + std::strerror(errno));
  }
  return ntohs(addr.sin_port);
}

void UdpSocket::send_to(const std::vector<std::uint8_t>& data, const Endpoint& peer) {
  sockaddr_in addr = to_sockaddr(peer);
  const auto sent = ::sendto(fd_, data.data(), data.size(), 0,
                             reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
  if (sent < 0 || static_cast<std::size_t>(sent) != data.size()) {
    throw SocketError(std::string("sendto(): ") + std::strerror(errno));
  }
}

std::optional<std::vector<std::uint8_t>> UdpSocket::recv_from(int timeout_ms,
                                                              Endpoint* from) {
  pollfd pfd{fd_, POLLIN, 0};
  const int ready = ::poll(&pfd, 1, timeout_ms);
  if (ready < 0) {
    throw SocketError(std::string("poll(): ") + std::strerror(errno));
  }
  if (ready == 0) return std::nullopt;

  std::vector<std::uint8_t> buf(2048);
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  const auto got = ::recvfrom(fd_, buf.data(), buf.size(), 0,
                              reinterpret_cast<sockaddr*>(&addr), &len);
  if (got < 0) {
    throw SocketError(std::string("recvfrom(): ") + std::strerror(errno));
  }
  buf.resize(static_cast<std::size_t>(got));
  if (from != nullptr) {
    char host[INET_ADDRSTRLEN] = {};
    ::inet_ntop(AF_INET, &addr.sin_addr, host, sizeof(host));
    from->host = host;
    from->port = ntohs(addr.sin_port);
  }
  return buf;
}

}  // namespace rdars::ctrl
