#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "wallfinder/controller.hpp"
#include "wallfinder/errors.hpp"
#include "wallfinder/kinematics.hpp"
#include "wallfinder/oi_protocol.hpp"
#include "wallfinder/runner.hpp"
#include "wallfinder/scenario.hpp"

namespace {

using namespace wallfinder;

constexpr int kExitBadInput = 1;
constexpr int kExitBadScenario = 2;
constexpr int kExitIo = 3;

std::optional<std::vector<std::uint8_t>> parse_hex(
    const std::vector<std::string>& words) {
  std::string hex;
  for (const auto& w : words) {
    hex += w;
  }
  if (hex.size() % 2 != 0) {
    return std::nullopt;
  }
  std::vector<std::uint8_t> bytes;
  bytes.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const auto digit = [](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      if (c >= 'A' && c <= 'F') return c - 'A' + 10;
      return -1;
    };
    const int hi = digit(hex[i]);
    const int lo = digit(hex[i + 1]);
    if (hi < 0 || lo < 0) {
      return std::nullopt;
    }
    bytes.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
  }
  return bytes;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) {
      out += sep;
    }
    out += parts[i];
  }
  return out;
}

std::string describe_bumps(const oi::BumpState& s) {
  std::vector<std::string> parts;
  if (s.bump_left) parts.push_back("bump left");
  if (s.bump_right) parts.push_back("bump right");
  if (s.wheel_drop_left) parts.push_back("wheel drop left");
  if (s.wheel_drop_right) parts.push_back("wheel drop right");
  return parts.empty() ? "none" : join(parts, " + ");
}

std::string describe_light_bits(const oi::LightBumperBits& b) {
  std::vector<std::string> parts;
  if (b.left()) parts.push_back("left");
  if (b.front_left()) parts.push_back("front left");
  if (b.center_left()) parts.push_back("center left");
  if (b.center_right()) parts.push_back("center right");
  if (b.front_right()) parts.push_back("front right");
  if (b.right()) parts.push_back("right");
  return parts.empty() ? "none" : join(parts, " + ");
}

const char* signal_name(std::uint8_t id) {
  switch (id) {
    case oi::kLightBumpLeftSignal: return "light bump left signal";
    case oi::kLightBumpFrontLeftSignal: return "light bump front left signal";
    case oi::kLightBumpCenterLeftSignal: return "light bump center left signal";
    case oi::kLightBumpCenterRightSignal: return "light bump center right signal";
    case oi::kLightBumpFrontRightSignal: return "light bump front right signal";
    case oi::kLightBumpRightSignal: return "light bump right signal";
    default: return "signal";
  }
}

std::string describe_packet(const oi::ParsedPacket& p) {
  switch (p.id) {
    case oi::kBumpsWheelDrops:
      return "bumps/wheel drops: " +
             describe_bumps(std::get<oi::BumpState>(p.value));
    case oi::kEncoderLeft:
      return "left encoder: " +
             std::to_string(std::get<std::int16_t>(p.value));
    case oi::kEncoderRight:
      return "right encoder: " +
             std::to_string(std::get<std::int16_t>(p.value));
    case oi::kLightBumper:
      return "light bumper: " +
             describe_light_bits(std::get<oi::LightBumperBits>(p.value));
    default:
      return std::string(signal_name(p.id)) + ": " +
             std::to_string(std::get<oi::LightBumpSignal>(p.value).value);
  }
}

int decode_single_packet(int id, std::span<const std::uint8_t> bytes) {
  const auto size = oi::packet_data_size(static_cast<std::uint8_t>(id));
  if (size == 0) {
    std::cerr << "unknown packet id " << id << "\n";
    return kExitBadInput;
  }
  if (bytes.size() != size) {
    std::cerr << "packet " << id << " carries " << size << " data byte"
              << (size == 1 ? "" : "s") << ", got " << bytes.size() << "\n";
    return kExitBadInput;
  }
  try {
    switch (id) {
      case oi::kBumpsWheelDrops:
        std::cout << describe_bumps(oi::decode_bumps(oi::BumpByte{bytes[0]}))
                  << "\n";
        break;
      case oi::kEncoderLeft:
      case oi::kEncoderRight:
        std::cout << oi::decode_i16_be(
                         std::span<const std::uint8_t, 2>(bytes.data(), 2))
                  << "\n";
        break;
      case oi::kLightBumper:
        std::cout << describe_light_bits(oi::decode_light_bumper(bytes[0]))
                  << "\n";
        break;
      default:
        std::cout << oi::decode_light_signal(
                         std::span<const std::uint8_t, 2>(bytes.data(), 2))
                         .value
                  << "\n";
        break;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return 0;
}

int run_decode(const std::vector<std::string>& hex_words,
               std::optional<int> packet_id) {
  const auto bytes = parse_hex(hex_words);
  if (!bytes) {
    std::cerr << "input is not an even-length hex string\n";
    return kExitBadInput;
  }
  if (packet_id) {
    return decode_single_packet(*packet_id, *bytes);
  }
  if (bytes->empty()) {
    std::cerr << "empty input\n";
    return kExitBadInput;
  }
  const std::uint8_t first = bytes->front();
  if (first == oi::kDriveDirectOpcode) {
    try {
      const auto cmd = oi::decode_drive_direct(*bytes);
      std::cout << "drive direct: right=" << cmd.right_mm_s
                << " mm/s left=" << cmd.left_mm_s << " mm/s\n";
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitBadInput;
    }
    return 0;
  }
  if (first == oi::kStreamHeader) {
    oi::QueryStreamParser parser;
    auto events = parser.consume(*bytes);
    for (auto& e : parser.finish()) {
      events.push_back(std::move(e));
    }
    bool clean = true;
    for (const auto& event : events) {
      if (const auto* frame = std::get_if<oi::QueryFrame>(&event)) {
        std::cout << "frame:\n";
        for (const auto& packet : frame->packets) {
          std::cout << "  [" << static_cast<int>(packet.id) << "] "
                    << describe_packet(packet) << "\n";
        }
      } else {
        const auto& err = std::get<oi::StreamError>(event);
        std::cout << "error: " << oi::stream_error_name(err.kind)
                  << " at offset " << err.offset << ": " << err.message
                  << "\n";
        clean = false;
      }
    }
    return clean ? 0 : kExitBadInput;
  }
  std::cerr << "unrecognized leading byte 0x" << std::hex
            << static_cast<int>(first)
            << " (expected 0x13 stream or 0x91 drive direct)\n";
  return kExitBadInput;
}

int run_simulate(const std::string& scenario_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed) {
  Scenario scenario;
  try {
    scenario = load_scenario(scenario_path);
    if (seed) {
      scenario.reseed(*seed);
    }
  } catch (const Error& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitBadScenario;
  }
  try {
    const auto result = run_scenario(scenario, out_dir);
    for (const auto& robot : result.robots) {
      std::cout << "robot " << static_cast<int>(robot.id) << ": ";
      if (robot.localized && robot.corner) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "localized at %s, corner error %.1f mm, position error "
                      "%.1f mm",
                      control::corner_name(*robot.corner),
                      robot.corner_error_mm.value_or(-1.0),
                      robot.position_error_mm);
        std::cout << buf << "\n";
      } else {
        std::cout << "not localized (" << robot.bump_edges << " bumps, "
                  << robot.hits_recorded << " wall hits)\n";
      }
    }
    std::cout << "wrote " << result.out_dir.string() << "\n";
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return 0;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    cells.push_back("");
  }
  return cells;
}

int run_rotate(double theta_deg, double radius_mm,
               const std::string& quadrant, const std::string& in_path,
               const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) {
    std::cerr << "cannot open " << in_path << "\n";
    return kExitIo;
  }
  std::string header;
  if (!std::getline(in, header)) {
    std::cerr << "empty input csv\n";
    return kExitBadScenario;
  }
  if (!header.empty() && header.back() == '\r') {
    header.pop_back();
  }
  auto columns = split_csv_line(header);
  auto index_of = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) {
        return i;
      }
    }
    return std::nullopt;
  };
  const auto ix = index_of("est_x");
  const auto iy = index_of("est_y");
  const auto itheta = index_of("est_theta");
  if (!ix || !iy) {
    std::cerr << "csv lacks est_x/est_y columns\n";
    return kExitBadScenario;
  }

  int qx = 0;
  int qy = 0;
  if (quadrant != "auto") {
    if (quadrant.size() != 2 || (quadrant[0] != '+' && quadrant[0] != '-') ||
        (quadrant[1] != '+' && quadrant[1] != '-')) {
      std::cerr << "quadrant must be auto, ++, +-, -+ or --\n";
      return kExitBadScenario;
    }
    qx = quadrant[0] == '+' ? 1 : -1;
    qy = quadrant[1] == '+' ? 1 : -1;
  }

  const double theta = kinematics::deg_to_rad(theta_deg);
  const kinematics::FrameTransform transform{theta, {0.0, 0.0}};

  std::ostringstream out;
  if (radius_mm > 0.0) {
    columns.push_back("corner_x");
    columns.push_back("corner_y");
  }
  out << join(columns, ",") << "\n";

  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    auto cells = split_csv_line(line);
    if (cells.size() < columns.size() - (radius_mm > 0.0 ? 2 : 0)) {
      std::cerr << "line " << line_no << ": too few columns\n";
      return kExitBadScenario;
    }
    double x = 0.0;
    double y = 0.0;
    double est_theta = 0.0;
    try {
      x = std::stod(cells[*ix]);
      y = std::stod(cells[*iy]);
      if (itheta) {
        est_theta = std::stod(cells[*itheta]);
      }
    } catch (const std::exception&) {
      std::cerr << "line " << line_no << ": est columns are not numeric\n";
      return kExitBadScenario;
    }
    const auto p = kinematics::to_world(transform, {x, y});
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", p.x);
    cells[*ix] = buf;
    std::snprintf(buf, sizeof(buf), "%.3f", p.y);
    cells[*iy] = buf;
    if (itheta) {
      std::snprintf(buf, sizeof(buf), "%.6f",
                    kinematics::normalize_angle(est_theta + theta));
      cells[*itheta] = buf;
    }
    if (radius_mm > 0.0) {
      kinematics::QuadrantSign sign{qx, qy};
      if (quadrant == "auto") {
        sign.x = p.x >= 0.0 ? 1 : -1;
        sign.y = p.y >= 0.0 ? 1 : -1;
      }
      const auto corner =
          kinematics::corner_estimate_from_center(p, sign, radius_mm);
      std::snprintf(buf, sizeof(buf), "%.3f", corner.x);
      cells.push_back(buf);
      std::snprintf(buf, sizeof(buf), "%.3f", corner.y);
      cells.push_back(buf);
    }
    out << join(cells, ",") << "\n";
  }

  std::ofstream out_file(out_path, std::ios::binary);
  if (!out_file) {
    std::cerr << "cannot open " << out_path << " for writing\n";
    return kExitIo;
  }
  out_file << out.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wall-finding robot simulator and protocol tools"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand(
      "simulate", "run a scenario and write per-robot trajectories");
  std::string scenario_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  simulate->add_option("--scenario", scenario_path, "scenario json file")
      ->required();
  simulate->add_option("--out", out_dir, "output directory")->required();
  auto* seed_opt =
      simulate->add_option("--seed", seed, "override the scenario seed");

  auto* decode =
      app.add_subcommand("decode", "decode hex bytes of the wire protocol");
  std::vector<std::string> hex_words;
  int packet_id = -1;
  auto* packet_opt = decode->add_option(
      "--packet", packet_id, "treat the bytes as one packet's data");
  decode->add_option("hex", hex_words, "hex bytes, spaces allowed")
      ->required()
      ->expected(-1);

  auto* rotate = app.add_subcommand(
      "rotate", "rotate est_x/est_y columns into the room frame");
  double theta_deg = 0.0;
  double radius_mm = 0.0;
  std::string quadrant = "auto";
  std::string in_csv;
  std::string out_csv;
  rotate->add_option("--theta", theta_deg, "rotation in degrees, ccw positive")
      ->required();
  rotate->add_option("--radius", radius_mm,
                     "append corner_x/corner_y offset by this radius");
  rotate->add_option("--quadrant", quadrant,
                     "corner offset direction: auto, ++, +-, -+ or --");
  rotate->add_option("--in", in_csv, "input csv")->required();
  rotate->add_option("--out", out_csv, "output csv")->required();

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) {
    return run_simulate(scenario_path, out_dir,
                        seed_opt->count() > 0
                            ? std::optional<std::uint64_t>(seed)
                            : std::nullopt);
  }
  if (decode->parsed()) {
    return run_decode(hex_words, packet_opt->count() > 0
                                     ? std::optional<int>(packet_id)
                                     : std::nullopt);
  }
  if (rotate->parsed()) {
    return run_rotate(theta_deg, radius_mm, quadrant, in_csv, out_csv);
  }
  return 0;
}
