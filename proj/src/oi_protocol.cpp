#include "wallfinder/oi_protocol.hpp"

#include <numeric>
#include <sstream>

namespace wallfinder::oi {

namespace {

std::string hex_byte(std::uint8_t b) {
  static const char* digits = "0123456789abcdef";
  return std::string{"0x"} + digits[b >> 4] + std::string(1, digits[b & 0xf]);
}

}  // namespace

std::size_t packet_data_size(std::uint8_t id) {
  switch (id) {
    case kBumpsWheelDrops:
    case kLightBumper:
      return 1;
    case kEncoderLeft:
    case kEncoderRight:
    case kLightBumpLeftSignal:
    case kLightBumpFrontLeftSignal:
    case kLightBumpCenterLeftSignal:
    case kLightBumpCenterRightSignal:
    case kLightBumpFrontRightSignal:
    case kLightBumpRightSignal:
      return 2;
    default:
      return 0;
  }
}

BumpState decode_bumps(BumpByte byte) {
  if (byte.value > 15) {
    throw ProtocolError("bump byte " + hex_byte(byte.value) +
                        " has reserved bits set");
  }
  BumpState s;
  s.bump_right = byte.value & 0x01;
  s.bump_left = byte.value & 0x02;
  s.wheel_drop_right = byte.value & 0x04;
  s.wheel_drop_left = byte.value & 0x08;
  return s;
}

BumpByte encode_bumps(const BumpState& state) {
  std::uint8_t v = 0;
  if (state.bump_right) v |= 0x01;
  if (state.bump_left) v |= 0x02;
  if (state.wheel_drop_right) v |= 0x04;
  if (state.wheel_drop_left) v |= 0x08;
  return BumpByte{v};
}

std::int16_t decode_i16_be(std::span<const std::uint8_t, 2> bytes) {
  const std::uint16_t u =
      static_cast<std::uint16_t>((bytes[0] << 8) | bytes[1]);
  return static_cast<std::int16_t>(u);
}

std::array<std::uint8_t, 2> encode_i16_be(std::int16_t value) {
  return encode_u16_be(static_cast<std::uint16_t>(value));
}

std::array<std::uint8_t, 2> encode_u16_be(std::uint16_t value) {
  return {static_cast<std::uint8_t>(value >> 8),
          static_cast<std::uint8_t>(value & 0xff)};
}

EncoderCounts decode_encoder_pair(std::span<const std::uint8_t, 2> left_bytes,
                                  std::span<const std::uint8_t, 2> right_bytes) {
  return EncoderCounts{decode_i16_be(left_bytes), decode_i16_be(right_bytes)};
}

LightBumperBits decode_light_bumper(std::uint8_t byte) {
  if (byte > 127) {
    throw ProtocolError("light bumper byte " + hex_byte(byte) +
                        " has the reserved bit set");
  }
  return LightBumperBits{byte};
}

LightBumpSignal decode_light_signal(std::span<const std::uint8_t, 2> bytes) {
  const std::uint16_t v =
      static_cast<std::uint16_t>((bytes[0] << 8) | bytes[1]);
  if (v > 4095) {
    throw ProtocolError("light bump signal " + std::to_string(v) +
                        " exceeds 4095");
  }
  return LightBumpSignal{v};
}

std::array<std::uint8_t, 5> encode_drive_direct(int right_mm_s, int left_mm_s) {
  for (int speed : {right_mm_s, left_mm_s}) {
    if (speed < -kMaxWheelSpeedMmS || speed > kMaxWheelSpeedMmS) {
      throw RangeError("wheel speed " + std::to_string(speed) +
                       " outside +/-" + std::to_string(kMaxWheelSpeedMmS));
    }
  }
  const auto r = encode_i16_be(static_cast<std::int16_t>(right_mm_s));
  const auto l = encode_i16_be(static_cast<std::int16_t>(left_mm_s));
  return {kDriveDirectOpcode, r[0], r[1], l[0], l[1]};
}

DriveDirectCommand decode_drive_direct(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != 5) {
    throw WrongLengthError("drive direct command is 5 bytes, got " +
                           std::to_string(bytes.size()));
  }
  if (bytes[0] != kDriveDirectOpcode) {
    throw ProtocolError("expected opcode 0x91, got " + hex_byte(bytes[0]));
  }
  return DriveDirectCommand{decode_i16_be(bytes.subspan<1, 2>()),
                            decode_i16_be(bytes.subspan<3, 2>())};
}

// ---------------------------------------------------------------------------

namespace {

void append_packet_bytes(const ParsedPacket& p, std::vector<std::uint8_t>& out) {
  out.push_back(p.id);
  switch (p.id) {
    case kBumpsWheelDrops: {
      const auto* s = std::get_if<BumpState>(&p.value);
      if (!s) throw ProtocolError("packet 7 requires a BumpState value");
      out.push_back(encode_bumps(*s).value);
      return;
    }
    case kEncoderLeft:
    case kEncoderRight: {
      const auto* c = std::get_if<std::int16_t>(&p.value);
      if (!c) throw ProtocolError("encoder packet requires a count value");
      const auto be = encode_i16_be(*c);
      out.insert(out.end(), be.begin(), be.end());
      return;
    }
    case kLightBumper: {
      const auto* b = std::get_if<LightBumperBits>(&p.value);
      if (!b) throw ProtocolError("packet 45 requires LightBumperBits");
      if (b->value > 127) {
        throw ProtocolError("light bumper value exceeds 127");
      }
      out.push_back(b->value);
      return;
    }
    default: {
      if (packet_data_size(p.id) == 0) {
        throw ProtocolError("unsupported packet id " + std::to_string(p.id));
      }
      const auto* sig = std::get_if<LightBumpSignal>(&p.value);
      if (!sig) throw ProtocolError("signal packet requires LightBumpSignal");
      if (sig->value > 4095) {
        throw ProtocolError("light bump signal exceeds 4095");
      }
      const auto be = encode_u16_be(sig->value);
      out.insert(out.end(), be.begin(), be.end());
      return;
    }
  }
}

}  // namespace

std::vector<std::uint8_t> encode_query_stream(
    std::span<const ParsedPacket> packets) {
  if (packets.empty()) {
    throw RangeError("a query-stream frame must carry at least one packet");
  }
  std::vector<std::uint8_t> out;
  out.push_back(kStreamHeader);
  out.push_back(0);  // patched below
  for (const auto& p : packets) {
    append_packet_bytes(p, out);
  }
  const std::size_t n = out.size() - 2;
  if (n > 255) {
    throw RangeError("frame payload exceeds 255 bytes");
  }
  out[1] = static_cast<std::uint8_t>(n);
  const unsigned sum = std::accumulate(out.begin(), out.end(), 0u);
  out.push_back(static_cast<std::uint8_t>(0x100 - (sum & 0xff)));
  return out;
}

const char* stream_error_name(StreamErrorKind kind) {
  switch (kind) {
    case StreamErrorKind::kChecksum: return "checksum";
    case StreamErrorKind::kUnknownPacketId: return "unknown-packet-id";
    case StreamErrorKind::kTruncated: return "truncated";
    case StreamErrorKind::kDesync: return "desync";
    case StreamErrorKind::kInvalidValue: return "invalid-value";
  }
  return "?";
}

void QueryStreamParser::flush_desync(std::vector<StreamEvent>& out) {
  if (desync_count_ == 0) return;
  StreamError e;
  e.kind = StreamErrorKind::kDesync;
  e.offset = desync_start_;
  e.message = std::to_string(desync_count_) +
              " byte(s) outside any frame (expected header 0x13)";
  out.push_back(std::move(e));
  desync_count_ = 0;
}

void QueryStreamParser::finalize_frame(std::vector<StreamEvent>& out) {
  const unsigned sum = std::accumulate(frame_.begin(), frame_.end(), 0u);
  if ((sum & 0xff) != 0) {
    StreamError e;
    e.kind = StreamErrorKind::kChecksum;
    e.offset = frame_start_;
    e.message = "frame byte sum is " + std::to_string(sum & 0xff) +
                " mod 256, expected 0";
    out.push_back(std::move(e));
    return;
  }
  if (frame_.size() == 3) {  // header, n = 0, checksum
    StreamError e;
    e.kind = StreamErrorKind::kInvalidValue;
    e.offset = frame_start_;
    e.message = "frame carries no packets";
    out.push_back(std::move(e));
    return;
  }

  QueryFrame frame;
  std::size_t i = 2;
  const std::size_t payload_end = frame_.size() - 1;
  while (i < payload_end) {
    const std::uint8_t id = frame_[i++];
    const std::size_t need = packet_data_size(id);
    if (need == 0) {
      StreamError e;
      e.kind = StreamErrorKind::kUnknownPacketId;
      e.offset = frame_start_;
      e.message = "unknown packet id " + std::to_string(id) + " in frame";
      out.push_back(std::move(e));
      return;
    }
    if (payload_end - i < need) {
      StreamError e;
      e.kind = StreamErrorKind::kTruncated;
      e.offset = frame_start_;
      e.message = "packet " + std::to_string(id) +
                  " data truncated by the declared frame length";
      out.push_back(std::move(e));
      return;
    }
    try {
      switch (id) {
        case kBumpsWheelDrops:
          frame.packets.push_back(
              {id, decode_bumps(BumpByte{frame_[i]})});
          break;
        case kEncoderLeft:
        case kEncoderRight:
          frame.packets.push_back(
              {id, decode_i16_be(std::span<const std::uint8_t, 2>(
                       frame_.data() + i, 2))});
          break;
        case kLightBumper:
          frame.packets.push_back({id, decode_light_bumper(frame_[i])});
          break;
        default:
          frame.packets.push_back(
              {id, decode_light_signal(std::span<const std::uint8_t, 2>(
                       frame_.data() + i, 2))});
          break;
      }
    } catch (const ProtocolError& err) {
      StreamError e;
      e.kind = StreamErrorKind::kInvalidValue;
      e.offset = frame_start_;
      e.message = err.what();
      out.push_back(std::move(e));
      return;
    }
    i += need;
  }
  out.push_back(std::move(frame));
}

std::vector<StreamEvent> QueryStreamParser::consume(
    std::span<const std::uint8_t> bytes) {
  std::vector<StreamEvent> out;
  for (const std::uint8_t b : bytes) {
    switch (state_) {
      case State::kIdle:
        if (b == kStreamHeader) {
          flush_desync(out);
          frame_.assign(1, b);
          frame_start_ = offset_;
          state_ = State::kLength;
        } else {
          if (desync_count_ == 0) desync_start_ = offset_;
          ++desync_count_;
        }
        break;
      case State::kLength:
        frame_.push_back(b);
        frame_total_ = 2 + static_cast<std::size_t>(b) + 1;
        state_ = State::kBody;
        break;
      case State::kBody:
        frame_.push_back(b);
        if (frame_.size() == frame_total_) {
          finalize_frame(out);
          frame_.clear();
          state_ = State::kIdle;
        }
        break;
    }
    ++offset_;
  }
  return out;
}

std::vector<StreamEvent> QueryStreamParser::finish() {
  std::vector<StreamEvent> out;
  flush_desync(out);
  if (state_ != State::kIdle) {
    StreamError e;
    e.kind = StreamErrorKind::kTruncated;
    e.offset = frame_start_;
    e.message = "stream ended inside a frame (" +
                std::to_string(frame_.size()) + " byte(s) received)";
    out.push_back(std::move(e));
  }
  reset();
  return out;
}

void QueryStreamParser::reset() {
  state_ = State::kIdle;
  frame_.clear();
  frame_total_ = 0;
  frame_start_ = 0;
  offset_ = 0;
  desync_start_ = 0;
  desync_count_ = 0;
}

std::vector<QueryFrame> parse_query_stream(
    std::span<const std::uint8_t> bytes) {
  QueryStreamParser parser;
  std::vector<StreamEvent> events = parser.consume(bytes);
  const std::vector<StreamEvent> tail = parser.finish();
  events.insert(events.end(), tail.begin(), tail.end());

  std::vector<QueryFrame> frames;
  for (auto& ev : events) {
    if (auto* frame = std::get_if<QueryFrame>(&ev)) {
      frames.push_back(std::move(*frame));
      continue;
    }
    const auto& err = std::get<StreamError>(ev);
    switch (err.kind) {
      case StreamErrorKind::kChecksum:
        throw ChecksumError(err.message);
      case StreamErrorKind::kUnknownPacketId:
        throw UnknownPacketIdError(err.message);
      case StreamErrorKind::kTruncated:
        throw TruncatedFrameError(err.message);
      default:
        throw ProtocolError(err.message);
    }
  }
  return frames;
}

}  // namespace wallfinder::oi
