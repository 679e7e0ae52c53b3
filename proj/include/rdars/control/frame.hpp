#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdars/surface.hpp"

// Wire format of the RDARS control link. One frame per UDP datagram:
//
//   offset  size  field
//   0       2     magic 0x52 0x44 ("RD")
//   2       1     version, 0x01
//   3       1     msg_type (0x01 PHASE_CONFIG, 0x02 MODE_MASK,
//                 0x03 ACK, 0x04 NACK)
//   4       2     seq, unsigned big-endian
//   6       2     payload_len, unsigned big-endian
//   8       n     payload
//   8+n     2     CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF) over
//                 bytes 0 .. 8+n-1, big-endian
//
// Payloads:
//   PHASE_CONFIG  64 bytes; element n's 2-bit code occupies bits
//                 2*(n mod 4) .. 2*(n mod 4)+1 of byte n div 4 (LSB
//                 first). Connected elements encode code 0.
//   MODE_MASK     32 bytes; bit n (byte n div 8, bit n mod 8, LSB first)
//                 set means element n is in connected mode.
//   ACK / NACK    3 bytes: echoed seq (big-endian) + status
//                 (0x00 OK, 0x01 malformed, 0x02 stale/duplicate).

namespace rdars::ctrl {

inline constexpr std::uint8_t kMagic0 = 0x52;
inline constexpr std::uint8_t kMagic1 = 0x44;
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kHeaderSize = 8;
inline constexpr std::size_t kCrcSize = 2;
inline constexpr std::size_t kPhasePayloadSize = 64;   // 512-bit phase signal
inline constexpr std::size_t kModePayloadSize = 32;    // 256-bit mode mask
inline constexpr std::size_t kAckPayloadSize = 3;
inline constexpr std::size_t kMaxFrameSize = 128;
inline constexpr std::size_t kElementCount = 256;
inline constexpr std::uint16_t kDefaultPort = 47474;

enum class MsgType : std::uint8_t {
  phase_config = 0x01,
  mode_mask = 0x02,
  ack = 0x03,
  nack = 0x04,
};

inline constexpr std::uint8_t kStatusOk = 0x00;
inline constexpr std::uint8_t kStatusMalformed = 0x01;
inline constexpr std::uint8_t kStatusStale = 0x02;

struct ControlFrame {
  MsgType type = MsgType::ack;
  std::uint16_t seq = 0;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const ControlFrame&, const ControlFrame&) = default;
};

enum class DecodeErrorKind {
  bad_magic,
  bad_version,
  length_mismatch,
  bad_crc,
  unknown_type,
};

class FrameDecodeError : public std::runtime_error {
 public:
  FrameDecodeError(DecodeErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  DecodeErrorKind kind() const { return kind_; }

 private:
  DecodeErrorKind kind_;
};

std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data);

/// Serializes a frame; validates the per-type payload length.
std::vector<std::uint8_t> encode_frame(const ControlFrame& frame);

/// Parses and validates a datagram. Throws FrameDecodeError with the
/// specific kind on any violation.
ControlFrame decode_frame(std::span<const std::uint8_t> datagram);

/// 64-byte phase payload for a 256-element configuration.
std::vector<std::uint8_t> encode_phase_payload(const RdarsConfiguration& config);

/// Inverse of encode_phase_payload; `connected_mask` restores the mode of
/// each element (payload bits of connected elements are don't-care).
RdarsConfiguration decode_phase_payload(std::span<const std::uint8_t> payload,
                                        const std::vector<bool>& connected_mask);

/// 32-byte mode mask with bit n set for each connected element.
std::vector<std::uint8_t> encode_mode_payload(const std::vector<bool>& connected_mask);

std::vector<bool> decode_mode_payload(std::span<const std::uint8_t> payload);

ControlFrame make_phase_config(std::uint16_t seq, const RdarsConfiguration& config);
ControlFrame make_mode_mask(std::uint16_t seq, const std::vector<bool>& connected_mask);
ControlFrame make_ack(std::uint16_t seq, std::uint16_t echoed_seq, std::uint8_t status);
ControlFrame make_nack(std::uint16_t seq, std::uint16_t echoed_seq, std::uint8_t status);

/// Echoed seq and status carried by an ACK/NACK payload.
struct AckInfo {
  std::uint16_t echoed_seq = 0;
  std::uint8_t status = 0;
};
AckInfo parse_ack_payload(const ControlFrame& frame);

/// True when `candidate` is ahead of `reference` in the modulo-2^16
/// sequence space (window 2^15).
bool seq_is_newer(std::uint16_t candidate, std::uint16_t reference);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(const std::string& hex);

}  // namespace rdars::ctrl
