#include "rdars/control/frame.hpp"

#include <cstdio>

namespace rdars::ctrl {

namespace {

void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

std::uint16_t read_u16(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return static_cast<std::uint16_t>((bytes[offset] << 8) | bytes[offset + 1]);
}

std::size_t expected_payload_size(MsgType type) {
  switch (type) {
    case MsgType::phase_config:
      return kPhasePayloadSize;
    case MsgType::mode_mask:
      return kModePayloadSize;
    case MsgType::ack:
    case MsgType::nack:
      return kAckPayloadSize;
  }
  throw FrameDecodeError(DecodeErrorKind::unknown_type, "unknown message type");
}

}  // namespace

std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data) {
  std::uint16_t crc = 0xFFFF;
  for (std::uint8_t byte : data) {
    crc ^= static_cast<std::uint16_t>(byte) << 8;
    for (int bit = 0; bit < 8; ++bit) {
      crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021)
                           : static_cast<std::uint16_t>(crc << 1);
    }
  }
  return crc;
}

std::vector<std::uint8_t> encode_frame(const ControlFrame& frame) {
  if (frame.payload.size() != expected_payload_size(frame.type)) {
    throw std::invalid_argument("encode_frame: payload length does not match type");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + frame.payload.size() + kCrcSize);
  out.push_back(kMagic0);
  out.push_back(kMagic1);
  out.push_back(kVersion);
  out.push_back(static_cast<std::uint8_t>(frame.type));
  append_u16(out, frame.seq);
  append_u16(out, static_cast<std::uint16_t>(frame.payload.size()));
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  append_u16(out, crc16_ccitt_false(out));
  return out;
}

ControlFrame decode_frame(std::span<const std::uint8_t> datagram) {
  if (datagram.size() < kHeaderSize + kCrcSize || datagram.size() > kMaxFrameSize) {
    throw FrameDecodeError(DecodeErrorKind::length_mismatch,
                           "datagram size outside frame bounds");
  }
  if (datagram[0] != kMagic0 || datagram[1] != kMagic1) {
    throw FrameDecodeError(DecodeErrorKind::bad_magic, "bad magic");
  }
  if (datagram[2] != kVersion) {
    throw FrameDecodeError(DecodeErrorKind::bad_version, "unsupported version");
  }
  const std::uint16_t payload_len = read_u16(datagram, 6);
  if (datagram.size() != kHeaderSize + payload_len + kCrcSize) {
    throw FrameDecodeError(DecodeErrorKind::length_mismatch,
                           "payload_len inconsistent with datagram size");
  }
  const std::uint16_t stored_crc = read_u16(datagram, datagram.size() - kCrcSize);
  const std::uint16_t computed_crc =
      crc16_ccitt_false(datagram.first(datagram.size() - kCrcSize));
  if (stored_crc != computed_crc) {
    throw FrameDecodeError(DecodeErrorKind::bad_crc, "CRC mismatch");
  }
  const std::uint8_t raw_type = datagram[3];
  if (raw_type < 0x01 || raw_type > 0x04) {
    throw FrameDecodeError(DecodeErrorKind::unknown_type, "unknown message type");
  }
  ControlFrame frame;
  frame.type = static_cast<MsgType>(raw_type);
  frame.seq = read_u16(datagram, 4);
  if (payload_len != expected_payload_size(frame.type)) {
    throw FrameDecodeError(DecodeErrorKind::length_mismatch,
                           "payload length does not match message type");
  }
  frame.payload.assign(datagram.begin() + kHeaderSize,
                       datagram.end() - kCrcSize);
  return frame;
}

std::vector<std::uint8_t> encode_phase_payload(const RdarsConfiguration& config) {
  if (config.size() != kElementCount) {
    throw std::invalid_argument("encode_phase_payload: expected 256 elements");
  }
  std::vector<std::uint8_t> payload(kPhasePayloadSize, 0);
  for (std::size_t n = 0; n < kElementCount; ++n) {
    const std::uint8_t code = config.is_connected(n) ? 0 : config.code(n).value;
    payload[n / 4] |= static_cast<std::uint8_t>(code << (2 * (n % 4)));
  }
  return payload;
}

RdarsConfiguration decode_phase_payload(std::span<const std::uint8_t> payload,
                                        const std::vector<bool>& connected_mask) {
  if (payload.size() != kPhasePayloadSize) {
    throw std::invalid_argument("decode_phase_payload: expected 64 bytes");
  }
  if (connected_mask.size() != kElementCount) {
    throw std::invalid_argument("decode_phase_payload: mask must cover 256 elements");
  }
  RdarsConfiguration config(kElementCount);
  for (std::size_t n = 0; n < kElementCount; ++n) {
    if (connected_mask[n]) {
      config.set_connected(n);
    } else {
      const std::uint8_t code = (payload[n / 4] >> (2 * (n % 4))) & 0x03;
      config.set_reflection(n, PhaseCode{code});
    }
  }
  return config;
}

std::vector<std::uint8_t> encode_mode_payload(const std::vector<bool>& connected_mask) {
  if (connected_mask.size() != kElementCount) {
    throw std::invalid_argument("encode_mode_payload: mask must cover 256 elements");
  }
  std::vector<std::uint8_t> payload(kModePayloadSize, 0);
  for (std::size_t n = 0; n < kElementCount; ++n) {
    if (connected_mask[n]) {
      payload[n / 8] |= static_cast<std::uint8_t>(1u << (n % 8));
    }
  }
  return payload;
}

std::vector<bool> decode_mode_payload(std::span<const std::uint8_t> payload) {
  if (payload.size() != kModePayloadSize) {
    throw std::invalid_argument("decode_mode_payload: expected 32 bytes");
  }
  std::vector<bool> mask(kElementCount, false);
  for (std::size_t n = 0; n < kElementCount; ++n) {
    mask[n] = (payload[n / 8] >> (n % 8)) & 1u;
  }
  return mask;
}

ControlFrame make_phase_config(std::uint16_t seq, const RdarsConfiguration& config) {
  return {MsgType::phase_config, seq, encode_phase_payload(config)};
}

ControlFrame make_mode_mask(std::uint16_t seq, const std::vector<bool>& connected_mask) {
  return {MsgType::mode_mask, seq, encode_mode_payload(connected_mask)};
}

namespace {
ControlFrame make_reply(MsgType type, std::uint16_t seq, std::uint16_t echoed_seq,
                        std::uint8_t status) {
  ControlFrame frame;
  frame.type = type;
  frame.seq = seq;
  frame.payload = {static_cast<std::uint8_t>(echoed_seq >> 8),
                   static_cast<std::uint8_t>(echoed_seq & 0xFF), status};
  return frame;
}
}  // namespace

ControlFrame make_ack(std::uint16_t seq, std::uint16_t echoed_seq, std::uint8_t status) {
  return make_reply(MsgType::ack, seq, echoed_seq, status);
}

ControlFrame make_nack(std::uint16_t seq, std::uint16_t echoed_seq, std::uint8_t status) {
  return make_reply(MsgType::nack, seq, echoed_seq, status);
}

AckInfo parse_ack_payload(const ControlFrame& frame) {
  if ((frame.type != MsgType::ack && frame.type != MsgType::nack) ||
      frame.payload.size() != kAckPayloadSize) {
    throw std::invalid_argument("parse_ack_payload: not an ACK/NACK frame");
  }
  return {static_cast<std::uint16_t>((frame.payload[0] << 8) | frame.payload[1]),
          frame.payload[2]};
}

bool seq_is_newer(std::uint16_t candidate, std::uint16_t reference) {
  const std::uint16_t delta = static_cast<std::uint16_t>(candidate - reference);
  return delta != 0 && delta <= 0x8000;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  char buf[3];
  for (std::uint8_t b : bytes) {
    std::snprintf(buf, sizeof(buf), "%02x", b);
    out += buf;
  }
  return out;
}

std::vector<std::uint8_t> from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) {
    throw std::invalid_argument("from_hex: odd number of hex digits");
  }
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("from_hex: invalid hex digit");
  };
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>((nibble(hex[i]) << 4) | nibble(hex[i + 1])));
  }
  return out;
}

}  // namespace rdars::ctrl
