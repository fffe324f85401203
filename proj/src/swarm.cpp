#include "wallfinder/swarm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wallfinder/errors.hpp"

namespace wallfinder::swarm {

namespace {

void put_u16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v >> 8);
  p[1] = static_cast<std::uint8_t>(v & 0xff);
}

void put_i32(std::uint8_t* p, std::int32_t v) {
  const auto u = static_cast<std::uint32_t>(v);
  p[0] = static_cast<std::uint8_t>(u >> 24);
  p[1] = static_cast<std::uint8_t>(u >> 16);
  p[2] = static_cast<std::uint8_t>(u >> 8);
  p[3] = static_cast<std::uint8_t>(u & 0xff);
}

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

std::int32_t get_i32(const std::uint8_t* p) {
  const std::uint32_t u = (static_cast<std::uint32_t>(p[0]) << 24) |
                          (static_cast<std::uint32_t>(p[1]) << 16) |
                          (static_cast<std::uint32_t>(p[2]) << 8) |
                          static_cast<std::uint32_t>(p[3]);
  return static_cast<std::int32_t>(u);
}

}  // namespace

PositionReport make_report(std::uint8_t robot_id, std::uint16_t seq,
                           const kinematics::Pose& pose, bool localized) {
  PositionReport report;
  report.robot_id = robot_id;
  report.seq = seq;
  report.x_mm = static_cast<std::int32_t>(std::llround(pose.x_mm));
  report.y_mm = static_cast<std::int32_t>(std::llround(pose.y_mm));
  report.theta_mrad =
      static_cast<std::int16_t>(std::lround(pose.theta_rad * 1000.0));
  report.flags = localized ? kFlagCornerLocalized : 0;
  return report;
}

std::array<std::uint8_t, kReportSize> encode_report(
    const PositionReport& report) {
  std::array<std::uint8_t, kReportSize> out{};
  out[0] = kReportMagic;
  out[1] = report.robot_id;
  put_u16(&out[2], report.seq);
  put_i32(&out[4], report.x_mm);
  put_i32(&out[8], report.y_mm);
  put_u16(&out[12], static_cast<std::uint16_t>(report.theta_mrad));
  out[14] = report.flags;
  unsigned sum = 0;
  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    sum += out[i];
  }
  out[15] = static_cast<std::uint8_t>((0x100u - (sum & 0xffu)) & 0xffu);
  return out;
}

PositionReport decode_report(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kReportSize) {
    throw WrongLengthError("position report must be 16 bytes, got " +
                           std::to_string(bytes.size()));
  }
  if (bytes[0] != kReportMagic) {
    throw BadMagicError("position report magic mismatch");
  }
  unsigned sum = 0;
  for (const auto b : bytes) {
    sum += b;
  }
  if ((sum & 0xffu) != 0) {
    throw ChecksumError("position report checksum mismatch");
  }
  PositionReport report;
  report.robot_id = bytes[1];
  report.seq = get_u16(&bytes[2]);
  report.x_mm = get_i32(&bytes[4]);
  report.y_mm = get_i32(&bytes[8]);
  report.theta_mrad = static_cast<std::int16_t>(get_u16(&bytes[12]));
  report.flags = bytes[14];
  return report;
}

bool seq_newer(std::uint16_t a, std::uint16_t b) {
  return a != b && static_cast<std::uint16_t>(a - b) < 32768u;
}

bool PeerTable::update(const PositionReport& report,
                       std::uint64_t receive_tick) {
  auto it = entries_.find(report.robot_id);
  if (it != entries_.end() && !seq_newer(report.seq, it->second.report.seq)) {
    return false;
  }
  entries_[report.robot_id] = Entry{report, receive_tick};
  return true;
}

void BusConfig::validate() const {
  if (!(drop_probability >= 0.0 && drop_probability <= 1.0)) {
    throw RangeError("drop_probability outside [0, 1]");
  }
  if (latency_ticks < 0) {
    throw RangeError("latency_ticks must be non-negative");
  }
}

BroadcastBus::BroadcastBus(const BusConfig& config,
                           std::vector<std::uint8_t> robot_ids)
    : config_(config), robot_ids_(std::move(robot_ids)), rng_(config.seed) {
  config_.validate();
  std::sort(robot_ids_.begin(), robot_ids_.end());
}

void BroadcastBus::broadcast(std::uint8_t sender_id,
                             const PositionReport& report,
                             std::uint64_t current_tick) {
  for (const auto recipient : robot_ids_) {
    if (recipient == sender_id) {
      continue;
    }
    if (rng_.uniform01() < config_.drop_probability) {
      continue;
    }
    Pending p;
    p.due_tick = current_tick + static_cast<std::uint64_t>(config_.latency_ticks);
    p.delivery = Delivery{recipient, report};
    queue_.push_back(p);
  }
}

std::vector<BroadcastBus::Delivery> BroadcastBus::deliver_due(
    std::uint64_t current_tick) {
  std::vector<Delivery> out;
  while (!queue_.empty() && queue_.front().due_tick <= current_tick) {
    out.push_back(queue_.front().delivery);
    queue_.pop_front();
  }
  return out;
}

}  // namespace wallfinder::swarm
