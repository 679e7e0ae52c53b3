#include <doctest.h>

#include <cstring>

#include "rdars/control/frame.hpp"
#include "rdars/rng.hpp"

using namespace rdars;
using namespace rdars::ctrl;

namespace {

// Golden wire images, frozen from an independent encoder.
const char* kGoldenPhaseHex =
    "52440101010200401b000000000000000000000000000000000000000000"
    "000000000000000000000000000000000000000000000000000000000000"
    "0000000000000000000000006885";
const char* kGoldenModeHex =
    "524401020005002001800000000000000000000000000000000000000000000000000000"
    "000001805527";
const char* kGoldenAckHex = "52440103000100030001007460";
const char* kGoldenNackHex = "5244010400070003000702b47d";

RdarsConfiguration random_configuration(std::mt19937_64& rng) {
  RdarsConfiguration c(kElementCount);
  for (std::size_t n = 0; n < kElementCount; ++n) {
    if (uniform_double(rng) < 0.05) {
      c.set_connected(n);
    } else {
      c.set_reflection(n, PhaseCode{static_cast<std::uint8_t>(uniform_below(rng, 4))});
    }
  }
  return c;
}

}  // namespace

TEST_CASE("CRC-16/CCITT-FALSE check value") {
  const char* msg = "123456789";
  std::vector<std::uint8_t> data(msg, msg + std::strlen(msg));
  CHECK(crc16_ccitt_false(data) == 0x29B1);
  CHECK(crc16_ccitt_false(std::vector<std::uint8_t>{}) == 0xFFFF);
}

TEST_CASE("golden frames are byte-exact") {
  SUBCASE("PHASE_CONFIG") {
    RdarsConfiguration config = RdarsConfiguration::all_reflection(kElementCount);
    config.set_reflection(0, PhaseCode{3});
    config.set_reflection(1, PhaseCode{2});
    config.set_reflection(2, PhaseCode{1});
    config.set_reflection(3, PhaseCode{0});
    const auto bytes = encode_frame(make_phase_config(0x0102, config));
    CHECK(bytes.size() == 74);
    CHECK(to_hex(bytes) == kGoldenPhaseHex);
  }
  SUBCASE("MODE_MASK") {
    std::vector<bool> mask(kElementCount, false);
    for (std::size_t n : {0, 15, 240, 255}) mask[n] = true;
    const auto bytes = encode_frame(make_mode_mask(5, mask));
    CHECK(bytes.size() == 42);
    CHECK(to_hex(bytes) == kGoldenModeHex);
  }
  SUBCASE("ACK") {
    const auto bytes = encode_frame(make_ack(1, 1, kStatusOk));
    CHECK(bytes.size() == 13);
    CHECK(to_hex(bytes) == kGoldenAckHex);
  }
  SUBCASE("NACK") {
    const auto bytes = encode_frame(make_nack(7, 7, kStatusStale));
    CHECK(bytes.size() == 13);
    CHECK(to_hex(bytes) == kGoldenNackHex);
  }
}

TEST_CASE("phase payload bit packing") {
  auto all_zero = RdarsConfiguration::all_reflection(kElementCount);
  CHECK(encode_phase_payload(all_zero) ==
        std::vector<std::uint8_t>(kPhasePayloadSize, 0x00));

  auto saturated = RdarsConfiguration::all_reflection(kElementCount, PhaseCode{3});
  CHECK(encode_phase_payload(saturated) ==
        std::vector<std::uint8_t>(kPhasePayloadSize, 0xFF));

  auto mixed = RdarsConfiguration::all_reflection(kElementCount);
  mixed.set_reflection(0, PhaseCode{3});
  mixed.set_reflection(1, PhaseCode{2});
  mixed.set_reflection(2, PhaseCode{1});
  mixed.set_reflection(3, PhaseCode{0});
  const auto payload = encode_phase_payload(mixed);
  CHECK(payload[0] == 0x1B);
  for (std::size_t i = 1; i < kPhasePayloadSize; ++i) CHECK(payload[i] == 0x00);

  // Inverse of the packing example.
  const auto decoded =
      decode_phase_payload(payload, std::vector<bool>(kElementCount, false));
  CHECK(decoded.code(0).value == 3);
  CHECK(decoded.code(1).value == 2);
  CHECK(decoded.code(2).value == 1);
  CHECK(decoded.code(3).value == 0);

  CHECK_THROWS_AS(decode_phase_payload(std::vector<std::uint8_t>(63, 0),
                                       std::vector<bool>(kElementCount, false)),
                  std::invalid_argument);
}

TEST_CASE("phase payload round trip on random configurations") {
  auto rng = make_stream(1000, 0);
  for (int i = 0; i < 1000; ++i) {
    const RdarsConfiguration config = random_configuration(rng);
    std::vector<bool> mask(kElementCount, false);
    for (std::size_t n = 0; n < kElementCount; ++n) mask[n] = config.is_connected(n);
    const RdarsConfiguration decoded =
        decode_phase_payload(encode_phase_payload(config), mask);
    CHECK(decoded == config);
  }
}

TEST_CASE("mode payload") {
  std::vector<bool> mask(kElementCount, false);
  for (std::size_t n : {0, 15, 240, 255}) mask[n] = true;
  const auto payload = encode_mode_payload(mask);
  REQUIRE(payload.size() == kModePayloadSize);
  CHECK(payload[0] == 0x01);   // element 0 -> byte 0 bit 0
  CHECK(payload[1] == 0x80);   // element 15 -> byte 1 bit 7
  CHECK(payload[30] == 0x01);  // element 240
  CHECK(payload[31] == 0x80);  // element 255
  for (std::size_t i = 2; i < 30; ++i) CHECK(payload[i] == 0x00);
  CHECK(decode_mode_payload(payload) == mask);
}

TEST_CASE("frame round trip") {
  const ControlFrame ack = make_ack(9, 9, kStatusOk);
  CHECK(decode_frame(encode_frame(ack)) == ack);

  auto rng = make_stream(2000, 0);
  for (int i = 0; i < 1000; ++i) {
    ControlFrame frame;
    const int pick = static_cast<int>(uniform_below(rng, 4));
    frame.seq = static_cast<std::uint16_t>(uniform_below(rng, 65536));
    switch (pick) {
      case 0:
        frame = make_phase_config(frame.seq, random_configuration(rng));
        break;
      case 1: {
        std::vector<bool> mask(kElementCount, false);
        for (std::size_t n = 0; n < kElementCount; ++n) {
          mask[n] = uniform_double(rng) < 0.5;
        }
        frame = make_mode_mask(frame.seq, mask);
        break;
      }
      case 2:
        frame = make_ack(frame.seq,
                         static_cast<std::uint16_t>(uniform_below(rng, 65536)),
                         static_cast<std::uint8_t>(uniform_below(rng, 3)));
        break;
      default:
        frame = make_nack(frame.seq,
                          static_cast<std::uint16_t>(uniform_below(rng, 65536)),
                          static_cast<std::uint8_t>(uniform_below(rng, 3)));
        break;
    }
    CHECK(decode_frame(encode_frame(frame)) == frame);
  }
}

TEST_CASE("every single-bit corruption is detected") {
  RdarsConfiguration config = RdarsConfiguration::all_reflection(kElementCount);
  config.set_reflection(10, PhaseCode{2});
  const auto frame = encode_frame(make_phase_config(0x0457, config));

  for (std::size_t byte = 0; byte < frame.size(); ++byte) {
    for (int bit = 0; bit < 8; ++bit) {
      auto tampered = frame;
      tampered[byte] = static_cast<std::uint8_t>(tampered[byte] ^ (1u << bit));
      CHECK_THROWS_AS(decode_frame(tampered), FrameDecodeError);
      // Payload and CRC corruption specifically reports a CRC failure.
      if (byte >= kHeaderSize) {
        try {
          decode_frame(tampered);
        } catch (const FrameDecodeError& err) {
          CHECK(err.kind() == DecodeErrorKind::bad_crc);
        }
      }
    }
  }
}

TEST_CASE("decode error kinds are distinct") {
  const auto good = encode_frame(make_ack(3, 3, kStatusOk));

  auto bad_magic = good;
  bad_magic[0] = 0x00;
  CHECK_THROWS_WITH_AS(decode_frame(bad_magic), "bad magic", FrameDecodeError);

  auto bad_version = good;
  bad_version[2] = 0x02;
  try {
    decode_frame(bad_version);
    FAIL("expected throw");
  } catch (const FrameDecodeError& err) {
    CHECK(err.kind() == DecodeErrorKind::bad_version);
  }

  auto truncated = good;
  truncated.pop_back();
  try {
    decode_frame(truncated);
    FAIL("expected throw");
  } catch (const FrameDecodeError& err) {
    CHECK(err.kind() == DecodeErrorKind::length_mismatch);
  }

  std::vector<std::uint8_t> tiny{0x52, 0x44};
  try {
    decode_frame(tiny);
    FAIL("expected throw");
  } catch (const FrameDecodeError& err) {
    CHECK(err.kind() == DecodeErrorKind::length_mismatch);
  }

  auto bad_crc = good;
  bad_crc.back() ^= 0xFF;
  try {
    decode_frame(bad_crc);
    FAIL("expected throw");
  } catch (const FrameDecodeError& err) {
    CHECK(err.kind() == DecodeErrorKind::bad_crc);
  }

  // Unknown type with a recomputed CRC still fails, after the CRC check.
  auto unknown_type = good;
  unknown_type[3] = 0x05;
  const std::uint16_t crc = crc16_ccitt_false(
      std::span<const std::uint8_t>(unknown_type.data(), unknown_type.size() - 2));
  unknown_type[unknown_type.size() - 2] = static_cast<std::uint8_t>(crc >> 8);
  unknown_type[unknown_type.size() - 1] = static_cast<std::uint8_t>(crc & 0xFF);
  try {
    decode_frame(unknown_type);
    FAIL("expected throw");
  } catch (const FrameDecodeError& err) {
    CHECK(err.kind() == DecodeErrorKind::unknown_type);
  }
}

TEST_CASE("sequence window compare") {
  CHECK(seq_is_newer(1, 0));
  CHECK(!seq_is_newer(0, 1));
  CHECK(!seq_is_newer(5, 5));
  CHECK(seq_is_newer(0, 65535));      // wrap-around
  CHECK(seq_is_newer(32768, 0));      // exactly at the window edge
  CHECK(!seq_is_newer(32769, 0));     // beyond the window
  CHECK(!seq_is_newer(65535, 0));
}

TEST_CASE("hex helpers") {
  const std::vector<std::uint8_t> bytes{0x52, 0x44, 0x01, 0xAB};
  CHECK(to_hex(bytes) == "524401ab");
  CHECK(from_hex("524401AB") == bytes);
  CHECK(from_hex("524401ab") == bytes);
  CHECK_THROWS_AS(from_hex("abc"), std::invalid_argument);
  CHECK_THROWS_AS(from_hex("zz"), std::invalid_argument);
}

TEST_CASE("encode validates payload length per type") {
  ControlFrame frame;
  frame.type = MsgType::phase_config;
  frame.seq = 1;
  frame.payload.assign(10, 0);
  CHECK_THROWS_AS(encode_frame(frame), std::invalid_argument);
}
