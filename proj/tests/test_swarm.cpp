#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <vector>

#include "wallfinder/rng.hpp"
#include "wallfinder/swarm.hpp"

using namespace wallfinder;
using namespace wallfinder::swarm;

TEST_CASE("report wire layout") {
  PositionReport r;
  r.robot_id = 1;
  r.seq = 1;
  r.x_mm = 1000;
  r.y_mm = 1348;
  r.theta_mrad = 0;
  r.flags = kFlagCornerLocalized;

  const auto bytes = encode_report(r);
  CHECK(bytes[0] == 0x52);
  CHECK(bytes[1] == 0x01);
  CHECK(bytes[2] == 0x00);  // seq, high byte first
  CHECK(bytes[3] == 0x01);
  CHECK(bytes[4] == 0x00);  // x = 1000
  CHECK(bytes[5] == 0x00);
  CHECK(bytes[6] == 0x03);
  CHECK(bytes[7] == 0xE8);
  CHECK(bytes[8] == 0x00);  // y = 1348
  CHECK(bytes[9] == 0x00);
  CHECK(bytes[10] == 0x05);
  CHECK(bytes[11] == 0x44);
  CHECK(bytes[12] == 0x00);  // theta
  CHECK(bytes[13] == 0x00);
  CHECK(bytes[14] == 0x01);  // flags

  unsigned sum = 0;
  for (const auto b : bytes) {
    sum += b;
  }
  CHECK(sum % 256 == 0);

  CHECK(decode_report(bytes) == r);
}

TEST_CASE("negative coordinates use two's complement on the wire") {
  PositionReport r;
  r.robot_id = 200;
  r.seq = 65535;
  r.x_mm = -1;
  r.y_mm = -100000;
  r.theta_mrad = -3142;
  const auto bytes = encode_report(r);
  CHECK(bytes[4] == 0xFF);
  CHECK(bytes[5] == 0xFF);
  CHECK(bytes[6] == 0xFF);
  CHECK(bytes[7] == 0xFF);
  CHECK(decode_report(bytes) == r);
}

TEST_CASE("report round trips under fuzz") {
  Rng rng(404);
  for (int i = 0; i < 10000; ++i) {
    PositionReport r;
    r.robot_id = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    r.seq = static_cast<std::uint16_t>(rng.uniform_int(0, 65535));
    r.x_mm = rng.uniform_int(-2000000, 2000000);
    r.y_mm = rng.uniform_int(-2000000, 2000000);
    r.theta_mrad = static_cast<std::int16_t>(rng.uniform_int(-3142, 3142));
    r.flags = static_cast<std::uint8_t>(rng.uniform_int(0, 1));
    CHECK(decode_report(encode_report(r)) == r);
  }
}

TEST_CASE("decode rejects bad length, magic and checksum in that order") {
  const auto good = encode_report(PositionReport{7, 3, 10, 20, 30, 1});

  std::vector<std::uint8_t> short_buf(good.begin(), good.end() - 1);
  CHECK_THROWS_AS(decode_report(short_buf), WrongLengthError);

  std::vector<std::uint8_t> long_buf(good.begin(), good.end());
  long_buf.push_back(0);
  CHECK_THROWS_AS(decode_report(long_buf), WrongLengthError);

  auto bad_magic = good;
  bad_magic[0] = 0x53;
  CHECK_THROWS_AS(decode_report(bad_magic), BadMagicError);

  // a wrong magic wins over the checksum complaint
  auto bad_both = good;
  bad_both[0] = 0x00;
  bad_both[5] ^= 0xFF;
  CHECK_THROWS_AS(decode_report(bad_both), BadMagicError);

  for (std::size_t pos = 1; pos < good.size(); ++pos) {
    auto flipped = good;
    flipped[pos] ^= 0x04;
    CHECK_THROWS_AS(decode_report(flipped), ChecksumError);
  }
}

TEST_CASE("make_report rounds pose fields to wire precision") {
  const auto r = make_report(9, 41, {1000.89, 1348.20, 0.5}, true);
  CHECK(r.robot_id == 9);
  CHECK(r.seq == 41);
  CHECK(r.x_mm == 1001);
  CHECK(r.y_mm == 1348);
  CHECK(r.theta_mrad == 500);
  CHECK(r.corner_localized());

  const auto neg = make_report(9, 42, {-0.6, 0.4, -3.14159265}, false);
  CHECK(neg.x_mm == -1);
  CHECK(neg.y_mm == 0);
  CHECK(neg.theta_mrad == -3142);
  CHECK_FALSE(neg.corner_localized());
}

TEST_CASE("sequence comparison uses a half-range window") {
  CHECK(seq_newer(5, 4));
  CHECK_FALSE(seq_newer(4, 5));
  CHECK_FALSE(seq_newer(5, 5));
  CHECK(seq_newer(2, 65530));  // wrapped around
  CHECK_FALSE(seq_newer(65530, 2));
  CHECK(seq_newer(0, 65535));
  CHECK_FALSE(seq_newer(32768, 0));  // exactly half a range away is not newer
  CHECK(seq_newer(32767, 0));

  Rng rng(777);
  for (int i = 0; i < 20000; ++i) {
    const auto a = static_cast<std::uint16_t>(rng.uniform_int(0, 65535));
    const auto b = static_cast<std::uint16_t>(rng.uniform_int(0, 65535));
    // forward distance from b to a on the 16-bit circle
    const unsigned k = (a - b) & 0xFFFFu;
    CHECK(seq_newer(a, b) == (k >= 1 && k <= 32767));
  }
}

TEST_CASE("peer table keeps only strictly newer reports") {
  PeerTable table;
  CHECK(table.update(PositionReport{1, 10, 5, 5, 0, 0}, 100));
  CHECK(table.size() == 1);

  // same seq: ignored
  CHECK_FALSE(table.update(PositionReport{1, 10, 9, 9, 0, 0}, 101));
  CHECK(table.entries().at(1).report.x_mm == 5);
  CHECK(table.entries().at(1).receive_tick == 100);

  // older: ignored
  CHECK_FALSE(table.update(PositionReport{1, 9, 9, 9, 0, 0}, 102));

  // newer: replaced
  CHECK(table.update(PositionReport{1, 11, 7, 7, 0, 1}, 103));
  CHECK(table.entries().at(1).report.y_mm == 7);
  CHECK(table.entries().at(1).receive_tick == 103);

  // wrap-around still counts as newer
  CHECK(table.update(PositionReport{2, 65530, 0, 0, 0, 0}, 104));
  CHECK(table.update(PositionReport{2, 2, 1, 1, 0, 0}, 105));
  CHECK(table.entries().at(2).report.seq == 2);
  CHECK(table.size() == 2);
}

TEST_CASE("bus config validation") {
  CHECK_NOTHROW(BusConfig{}.validate());
  CHECK_NOTHROW((BusConfig{1.0, 5, 0}.validate()));
  CHECK_THROWS_AS((BusConfig{-0.1, 0, 0}.validate()), RangeError);
  CHECK_THROWS_AS((BusConfig{1.1, 0, 0}.validate()), RangeError);
  CHECK_THROWS_AS((BusConfig{0.0, -1, 0}.validate()), RangeError);
}

TEST_CASE("lossless bus reaches everyone but the sender") {
  BroadcastBus bus(BusConfig{0.0, 0, 1}, {3, 1, 2});
  const PositionReport r{1, 1, 10, 20, 30, 0};
  bus.broadcast(1, r, 5);
  const auto due = bus.deliver_due(5);
  REQUIRE(due.size() == 2);
  // recipients come out in ascending id order
  CHECK(due[0].recipient == 2);
  CHECK(due[1].recipient == 3);
  CHECK(due[0].report == r);
  CHECK(due[1].report == r);
  CHECK(bus.pending() == 0);
}

TEST_CASE("latency holds deliveries until their tick comes up") {
  BroadcastBus bus(BusConfig{0.0, 2, 1}, {1, 2});
  const PositionReport r{1, 1, 0, 0, 0, 0};
  bus.broadcast(1, r, 10);
  CHECK(bus.deliver_due(10).empty());
  CHECK(bus.deliver_due(11).empty());
  CHECK(bus.pending() == 1);
  const auto due = bus.deliver_due(12);
  REQUIRE(due.size() == 1);
  CHECK(due[0].recipient == 2);

  // a late poll picks up everything owed so far
  bus.broadcast(1, r, 20);
  bus.broadcast(1, r, 21);
  CHECK(bus.deliver_due(50).size() == 2);
}

TEST_CASE("full drop delivers nothing") {
  BroadcastBus bus(BusConfig{1.0, 0, 9}, {1, 2, 3, 4});
  for (std::uint64_t t = 0; t < 50; ++t) {
    bus.broadcast(1, PositionReport{1, static_cast<std::uint16_t>(t), 0, 0, 0, 0}, t);
    CHECK(bus.deliver_due(t).empty());
  }
  CHECK(bus.pending() == 0);
}

TEST_CASE("per-sender delivery order is first in, first out") {
  BroadcastBus bus(BusConfig{0.0, 1, 4}, {1, 2});
  for (std::uint16_t s = 0; s < 10; ++s) {
    bus.broadcast(1, PositionReport{1, s, 0, 0, 0, 0}, s);
  }
  std::vector<std::uint16_t> seen;
  for (std::uint64_t t = 0; t <= 11; ++t) {
    for (const auto& d : bus.deliver_due(t)) {
      seen.push_back(d.report.seq);
    }
  }
  REQUIRE(seen.size() == 10);
  for (std::uint16_t s = 0; s < 10; ++s) {
    CHECK(seen[s] == s);
  }
}

TEST_CASE("drop draws are reproducible for a fixed seed") {
  auto run = [](std::uint64_t seed) {
    BroadcastBus bus(BusConfig{0.5, 0, seed}, {1, 2, 3, 4, 5});
    std::vector<std::uint8_t> log;
    for (std::uint64_t t = 0; t < 200; ++t) {
      bus.broadcast(static_cast<std::uint8_t>(1 + t % 5),
                    PositionReport{0, static_cast<std::uint16_t>(t), 0, 0, 0, 0},
                    t);
      for (const auto& d : bus.deliver_due(t)) {
        log.push_back(d.recipient);
      }
    }
    return log;
  };
  const auto a = run(42);
  const auto b = run(42);
  CHECK(a == b);
  CHECK_FALSE(a.empty());
  CHECK(a.size() < 200 * 4);  // some draws did drop
}

TEST_CASE("drop rate is roughly honored") {
  BroadcastBus bus(BusConfig{0.3, 0, 2024}, {1, 2});
  int delivered = 0;
  const int attempts = 20000;
  for (int t = 0; t < attempts; ++t) {
    bus.broadcast(1, PositionReport{1, 0, 0, 0, 0, 0},
                  static_cast<std::uint64_t>(t));
    delivered += static_cast<int>(bus.deliver_due(static_cast<std::uint64_t>(t)).size());
  }
  const double rate = static_cast<double>(delivered) / attempts;
  CHECK(rate > 0.67);
  CHECK(rate < 0.73);
}

TEST_CASE("reports survive the codec between bus and table") {
  Rng rng(31);
  PeerTable table;
  for (int i = 0; i < 500; ++i) {
    const auto id = static_cast<std::uint8_t>(rng.uniform_int(2, 5));
    const auto seq = static_cast<std::uint16_t>(i);
    const auto r = make_report(id, seq,
                               {rng.uniform01() * 2000.0,
                                rng.uniform01() * 2000.0,
                                (rng.uniform01() - 0.5) * 6.0},
                               i % 2 == 0);
    const auto decoded = decode_report(encode_report(r));
    CHECK(decoded == r);
    table.update(decoded, static_cast<std::uint64_t>(i));
  }
  CHECK(table.size() == 4);
  for (const auto& [id, entry] : table.entries()) {
    CHECK(entry.report.robot_id == id);
  }
}
