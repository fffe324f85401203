#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <vector>

#include "wallfinder/kinematics.hpp"
#include "wallfinder/rng.hpp"

namespace wallfinder::swarm {

inline constexpr std::uint8_t kReportMagic = 0x52;
inline constexpr std::size_t kReportSize = 16;
inline constexpr std::uint8_t kFlagCornerLocalized = 0x01;

struct PositionReport {
  std::uint8_t robot_id = 0;
  std::uint16_t seq = 0;
  std::int32_t x_mm = 0;
  std::int32_t y_mm = 0;
  std::int16_t theta_mrad = 0;
  std::uint8_t flags = 0;

  bool corner_localized() const { return (flags & kFlagCornerLocalized) != 0; }
  bool operator==(const PositionReport&) const = default;
};

PositionReport make_report(std::uint8_t robot_id, std::uint16_t seq,
                           const kinematics::Pose& pose, bool localized);

std::array<std::uint8_t, kReportSize> encode_report(
    const PositionReport& report);

// Throws WrongLengthError, BadMagicError or ChecksumError.
PositionReport decode_report(std::span<const std::uint8_t> bytes);

// Serial-number comparison with a half-range window: is a newer than b?
bool seq_newer(std::uint16_t a, std::uint16_t b);

class PeerTable {
 public:
  struct Entry {
    PositionReport report;
    std::uint64_t receive_tick = 0;
  };

  // Inserts or replaces, but only for a strictly newer seq. Returns whether
  // the table changed.
  bool update(const PositionReport& report, std::uint64_t receive_tick);

  const std::map<std::uint8_t, Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::uint8_t, Entry> entries_;
};

struct BusConfig {
  double drop_probability = 0.0;
  int latency_ticks = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Simulated lossy broadcast radio. Every robot except the sender gets an
// independent Bernoulli drop draw; survivors are queued for delivery
// latency_ticks later. Per-sender order is FIFO.
class BroadcastBus {
 public:
  struct Delivery {
    std::uint8_t recipient = 0;
    PositionReport report;
  };

  BroadcastBus(const BusConfig& config, std::vector<std::uint8_t> robot_ids);

  void broadcast(std::uint8_t sender_id, const PositionReport& report,
                 std::uint64_t current_tick);

  // All deliveries that have come due, oldest first.
  std::vector<Delivery> deliver_due(std::uint64_t current_tick);

  std::size_t pending() const { return queue_.size(); }

 private:
  struct Pending {
    std::uint64_t due_tick = 0;
    Delivery delivery;
  };

  BusConfig config_;
  std::vector<std::uint8_t> robot_ids_;
  Rng rng_;
  std::deque<Pending> queue_;
};

}  // namespace wallfinder::swarm
