#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wallfinder/errors.hpp"

// Open Interface sensor packets and commands for the Create 2 family,
// plus the query-stream framing used to deliver them at the 15 ms cadence.
namespace wallfinder::oi {

enum PacketId : std::uint8_t {
  kBumpsWheelDrops = 7,
  kEncoderLeft = 43,
  kEncoderRight = 44,
  kLightBumper = 45,
  kLightBumpLeftSignal = 46,
  kLightBumpFrontLeftSignal = 47,
  kLightBumpCenterLeftSignal = 48,
  kLightBumpCenterRightSignal = 49,
  kLightBumpFrontRightSignal = 50,
  kLightBumpRightSignal = 51,
};

inline constexpr std::uint8_t kDriveDirectOpcode = 0x91;  // decimal 145
inline constexpr std::uint8_t kStreamHeader = 0x13;       // decimal 19
inline constexpr int kMaxWheelSpeedMmS = 500;

// Data bytes carried by a supported packet id; 0 if the id is unknown.
std::size_t packet_data_size(std::uint8_t id);

// ---------------------------------------------------------------------------
// Packet payloads

// Raw packet 7 byte. Bit 0 = bump right, bit 1 = bump left,
// bit 2 = wheel drop right, bit 3 = wheel drop left; bits 4-7 reserved.
struct BumpByte {
  std::uint8_t value = 0;
  bool operator==(const BumpByte&) const = default;
};

struct BumpState {
  bool bump_left = false;
  bool bump_right = false;
  bool wheel_drop_left = false;
  bool wheel_drop_right = false;
  bool operator==(const BumpState&) const = default;
};

// Throws ProtocolError when a reserved bit (value > 15) is set.
BumpState decode_bumps(BumpByte byte);
BumpByte encode_bumps(const BumpState& state);

// Cumulative raw wheel encoder registers (packets 43/44), signed 16-bit,
// high byte first on the wire. The registers roll over in normal operation.
struct EncoderCounts {
  std::int16_t left = 0;
  std::int16_t right = 0;
  bool operator==(const EncoderCounts&) const = default;
};

std::int16_t decode_i16_be(std::span<const std::uint8_t, 2> bytes);
std::array<std::uint8_t, 2> encode_i16_be(std::int16_t value);
std::array<std::uint8_t, 2> encode_u16_be(std::uint16_t value);

EncoderCounts decode_encoder_pair(std::span<const std::uint8_t, 2> left_bytes,
                                  std::span<const std::uint8_t, 2> right_bytes);

// Packet 45: one detection bit per light bumper, bits 0-5 = left,
// front-left, center-left, center-right, front-right, right.
struct LightBumperBits {
  std::uint8_t value = 0;
  bool left() const { return value & 0x01; }
  bool front_left() const { return value & 0x02; }
  bool center_left() const { return value & 0x04; }
  bool center_right() const { return value & 0x08; }
  bool front_right() const { return value & 0x10; }
  bool right() const { return value & 0x20; }
  bool operator==(const LightBumperBits&) const = default;
};

// Packets 46-51: one signal strength, unsigned 16-bit, 0-4095.
struct LightBumpSignal {
  std::uint16_t value = 0;
  bool operator==(const LightBumpSignal&) const = default;
};

LightBumperBits decode_light_bumper(std::uint8_t byte);   // ProtocolError if bit 7 set
LightBumpSignal decode_light_signal(std::span<const std::uint8_t, 2> bytes);

// ---------------------------------------------------------------------------
// Drive Direct command (opcode 145)

struct DriveDirectCommand {
  std::int16_t right_mm_s = 0;
  std::int16_t left_mm_s = 0;
  bool operator==(const DriveDirectCommand&) const = default;
};

// Wire form: [0x91][right hi][right lo][left hi][left lo].
// Throws RangeError when a speed is outside +/-500 mm/s.
std::array<std::uint8_t, 5> encode_drive_direct(int right_mm_s, int left_mm_s);
DriveDirectCommand decode_drive_direct(std::span<const std::uint8_t> bytes);

// ---------------------------------------------------------------------------
// Query stream framing
//
// [0x13][n][id1][data1...][id2][data2...][checksum]
// n counts every byte between itself and the checksum; the checksum byte
// makes the sum of all frame bytes, header included, 0 mod 256.

using PacketValue =
    std::variant<BumpState, std::int16_t, LightBumperBits, LightBumpSignal>;

struct ParsedPacket {
  std::uint8_t id = 0;
  PacketValue value;
  bool operator==(const ParsedPacket&) const = default;
};

struct QueryFrame {
  std::vector<ParsedPacket> packets;
  bool operator==(const QueryFrame&) const = default;
};

// Throws RangeError for an empty packet list and ProtocolError when a
// value does not fit its packet (id/value mismatch, reserved bits, >4095).
std::vector<std::uint8_t> encode_query_stream(
    std::span<const ParsedPacket> packets);

enum class StreamErrorKind {
  kChecksum,
  kUnknownPacketId,
  kTruncated,
  kDesync,
  kInvalidValue,
};

const char* stream_error_name(StreamErrorKind kind);

struct StreamError {
  StreamErrorKind kind{};
  std::size_t offset = 0;  // stream offset of the offending frame or byte run
  std::string message;
  bool operator==(const StreamError&) const = default;
};

using StreamEvent = std::variant<QueryFrame, StreamError>;

// Push parser. Feed bytes in chunks of any size; completed frames and
// errors come back in stream order. Chunk boundaries never change the
// event sequence. After a bad frame the parser resumes scanning at the
// byte that follows it; bytes that are not a frame header are reported
// as one kDesync event per contiguous run.
class QueryStreamParser {
 public:
  std::vector<StreamEvent> consume(std::span<const std::uint8_t> bytes);

  // Flushes any pending desync run and reports an unfinished frame as
  // kTruncated. Leaves the parser ready for a fresh stream.
  std::vector<StreamEvent> finish();

  void reset();

 private:
  enum class State { kIdle, kLength, kBody };

  void flush_desync(std::vector<StreamEvent>& out);
  void finalize_frame(std::vector<StreamEvent>& out);

  State state_ = State::kIdle;
  std::vector<std::uint8_t> frame_;
  std::size_t frame_total_ = 0;   // full frame size once the length byte is in
  std::size_t frame_start_ = 0;
  std::size_t offset_ = 0;
  std::size_t desync_start_ = 0;
  std::size_t desync_count_ = 0;
};

// One-shot convenience: parses a complete byte string, throwing the
// matching ProtocolError subclass at the first problem.
std::vector<QueryFrame> parse_query_stream(std::span<const std::uint8_t> bytes);

}  // namespace wallfinder::oi
