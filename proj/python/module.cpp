// Python bindings for the wallfinder core: protocol codec, motion math,
// position reports and the scenario runner.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wallfinder/controller.hpp"
#include "wallfinder/errors.hpp"
#include "wallfinder/kinematics.hpp"
#include "wallfinder/oi_protocol.hpp"
#include "wallfinder/runner.hpp"
#include "wallfinder/scenario.hpp"
#include "wallfinder/swarm.hpp"

namespace py = pybind11;
using namespace wallfinder;

namespace {

std::vector<std::uint8_t> to_bytes(const py::bytes& data) {
  const auto view = static_cast<std::string_view>(data);
  return {view.begin(), view.end()};
}

py::bytes from_bytes(const std::uint8_t* data, std::size_t size) {
  return py::bytes(reinterpret_cast<const char*>(data), size);
}

// Wire packets cross the boundary as (id, value) pairs with the value in
// its raw register form: the bumper bit field, a signed count, the light
// bit field, or a signal level.
int packet_value_to_int(const oi::ParsedPacket& packet) {
  if (const auto* bumps = std::get_if<oi::BumpState>(&packet.value)) {
    return oi::encode_bumps(*bumps).value;
  }
  if (const auto* count = std::get_if<std::int16_t>(&packet.value)) {
    return *count;
  }
  if (const auto* bits = std::get_if<oi::LightBumperBits>(&packet.value)) {
    return bits->value;
  }
  return std::get<oi::LightBumpSignal>(packet.value).value;
}

oi::ParsedPacket packet_from_pair(std::uint8_t id, int value) {
  switch (id) {
    case oi::kBumpsWheelDrops:
      if (value < 0 || value > 255) {
        throw RangeError("bump byte outside 0..255");
      }
      return {id, oi::decode_bumps(oi::BumpByte{static_cast<std::uint8_t>(value)})};
    case oi::kEncoderLeft:
    case oi::kEncoderRight:
      if (value < -32768 || value > 32767) {
        throw RangeError("encoder count outside the signed 16-bit range");
      }
      return {id, static_cast<std::int16_t>(value)};
    case oi::kLightBumper:
      if (value < 0 || value > 255) {
        throw RangeError("light bumper byte outside 0..255");
      }
      return {id, oi::decode_light_bumper(static_cast<std::uint8_t>(value))};
    default:
      if (oi::packet_data_size(id) == 0) {
        throw UnknownPacketIdError("unsupported packet id " +
                                   std::to_string(id));
      }
      if (value < 0 || value > 4095) {
        throw RangeError("light signal outside 0..4095");
      }
      return {id, oi::LightBumpSignal{static_cast<std::uint16_t>(value)}};
  }
}

py::dict stats_to_dict(const RobotRunStats& stats) {
  py::dict d;
  d["id"] = stats.id;
  d["localized"] = stats.localized;
  d["corner"] = stats.corner
                    ? py::object(py::str(control::corner_name(*stats.corner)))
                    : py::object(py::none());
  d["corner_error_mm"] = stats.corner_error_mm
                             ? py::object(py::float_(*stats.corner_error_mm))
                             : py::object(py::none());
  d["position_error_mm"] = stats.position_error_mm;
  d["localized_tick"] = stats.localized_tick
                            ? py::object(py::int_(*stats.localized_tick))
                            : py::object(py::none());
  d["true_pose"] = py::make_tuple(stats.true_pose.x_mm, stats.true_pose.y_mm,
                                  stats.true_pose.theta_rad);
  d["estimate"] = py::make_tuple(stats.estimate.x_mm, stats.estimate.y_mm,
                                 stats.estimate.theta_rad);
  if (stats.corner_estimate_mm) {
    d["corner_estimate_mm"] =
        py::make_tuple(stats.corner_estimate_mm->x, stats.corner_estimate_mm->y);
  } else {
    d["corner_estimate_mm"] = py::none();
  }
  d["bump_edges"] = stats.bump_edges;
  d["hits_recorded"] = stats.hits_recorded;
  d["reports_sent"] = stats.reports_sent;
  d["reports_received"] = stats.reports_received;
  d["peers_known"] = stats.peers_known;
  return d;
}

py::list run_and_convert(Scenario scenario, const std::filesystem::path& out_dir,
                         std::optional<std::uint64_t> seed) {
  if (seed) {
    scenario.reseed(*seed);
  }
  const auto result = run_scenario(scenario, out_dir);
  py::list rows;
  for (const auto& stats : result.robots) {
    rows.append(stats_to_dict(stats));
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Differential-drive wall-finding localization: codec, motion "
            "math, simulator runner";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) {
        std::rethrow_exception(p);
      }
    } catch (const IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    } catch (const Error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.attr("MM_PER_COUNT") = kinematics::kDefaultMmPerCount;
  m.attr("ROBOT_RADIUS_MM") = 117.5;
  m.attr("WHEEL_BASE_MM") = 235.0;

  py::class_<kinematics::Pose>(m, "Pose")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("x_mm"),
           py::arg("y_mm"), py::arg("theta_rad"))
      .def_readwrite("x_mm", &kinematics::Pose::x_mm)
      .def_readwrite("y_mm", &kinematics::Pose::y_mm)
      .def_readwrite("theta_rad", &kinematics::Pose::theta_rad)
      .def("__repr__", [](const kinematics::Pose& p) {
        return "Pose(x_mm=" + std::to_string(p.x_mm) +
               ", y_mm=" + std::to_string(p.y_mm) +
               ", theta_rad=" + std::to_string(p.theta_rad) + ")";
      });

  // motion math
  m.def(
      "wheel_speeds",
      [](int forward_mm_s, int spin_mm_s) {
        const auto s = kinematics::wheel_speeds({forward_mm_s, spin_mm_s});
        return py::make_tuple(s.right_mm_s, s.left_mm_s);
      },
      py::arg("forward_mm_s"), py::arg("spin_mm_s"),
      "Split a forward/spin command into (right, left) wheel speeds.");
  m.def("encoder_delta", &kinematics::encoder_delta, py::arg("prev"),
        py::arg("curr"),
        "Signed count change between register reads, rollover resolved.");
  m.def(
      "counts_to_mm",
      [](int counts) { return kinematics::counts_to_mm(counts); },
      py::arg("counts"));
  m.def("normalize_angle", &kinematics::normalize_angle, py::arg("radians"));
  m.def(
      "integrate_pose",
      [](const kinematics::Pose& pose, double d_left_mm, double d_right_mm) {
        return kinematics::integrate_pose(pose, d_left_mm, d_right_mm);
      },
      py::arg("pose"), py::arg("d_left_mm"), py::arg("d_right_mm"),
      "Advance a pose by per-wheel travel along an exact arc.");
  m.def(
      "to_world",
      [](double rotation_rad, double x, double y, double offset_x,
         double offset_y) {
        const auto v = kinematics::to_world(
            {rotation_rad, {offset_x, offset_y}}, {x, y});
        return py::make_tuple(v.x, v.y);
      },
      py::arg("rotation_rad"), py::arg("x"), py::arg("y"),
      py::arg("offset_x") = 0.0, py::arg("offset_y") = 0.0,
      "Rotate a start-frame point counterclockwise, then translate.");
  m.def(
      "corner_estimate_from_center",
      [](double x, double y, int sign_x, int sign_y, double radius_mm) {
        const auto v = kinematics::corner_estimate_from_center(
            {x, y}, {sign_x, sign_y}, radius_mm);
        return py::make_tuple(v.x, v.y);
      },
      py::arg("x"), py::arg("y"), py::arg("sign_x"), py::arg("sign_y"),
      py::arg("radius_mm") = 117.5,
      "Push a wedged center position outward to the corner point.");

  // wire codec
  m.def(
      "classify_bump",
      [](int byte) {
        if (byte < 0 || byte > 255) {
          throw RangeError("bump byte outside 0..255");
        }
        return std::string(control::bump_class_name(
            control::classify_bump(oi::BumpByte{static_cast<std::uint8_t>(byte)})));
      },
      py::arg("byte"),
      "Name the bumper side encoded in a packet 7 byte: none, left, right "
      "or both.");
  m.def(
      "encode_drive_direct",
      [](int right_mm_s, int left_mm_s) {
        const auto wire = oi::encode_drive_direct(right_mm_s, left_mm_s);
        return from_bytes(wire.data(), wire.size());
      },
      py::arg("right_mm_s"), py::arg("left_mm_s"));
  m.def(
      "decode_drive_direct",
      [](const py::bytes& data) {
        const auto buf = to_bytes(data);
        const auto cmd = oi::decode_drive_direct(buf);
        return py::make_tuple(cmd.right_mm_s, cmd.left_mm_s);
      },
      py::arg("data"));
  m.def(
      "encode_query_frame",
      [](const std::vector<std::pair<int, int>>& packets) {
        std::vector<oi::ParsedPacket> parsed;
        for (const auto& [id, value] : packets) {
          if (id < 0 || id > 255) {
            throw RangeError("packet id outside 0..255");
          }
          parsed.push_back(
              packet_from_pair(static_cast<std::uint8_t>(id), value));
        }
        const auto wire = oi::encode_query_stream(parsed);
        return from_bytes(wire.data(), wire.size());
      },
      py::arg("packets"),
      "Frame (packet_id, raw_value) pairs into one query-stream frame.");
  m.def(
      "parse_query_stream",
      [](const py::bytes& data) {
        const auto buf = to_bytes(data);
        const auto frames = oi::parse_query_stream(buf);
        py::list out;
        for (const auto& frame : frames) {
          py::list packets;
          for (const auto& packet : frame.packets) {
            packets.append(py::make_tuple(packet.id,
                                          packet_value_to_int(packet)));
          }
          out.append(packets);
        }
        return out;
      },
      py::arg("data"),
      "Parse a complete query stream into per-frame (id, raw_value) lists. "
      "Raises ValueError on any framing or value error.");

  // position reports
  py::class_<swarm::PositionReport>(m, "PositionReport")
      .def(py::init<>())
      .def(py::init([](int robot_id, int seq, int x_mm, int y_mm,
                       int theta_mrad, bool localized) {
             swarm::PositionReport r;
             r.robot_id = static_cast<std::uint8_t>(robot_id);
             r.seq = static_cast<std::uint16_t>(seq);
             r.x_mm = x_mm;
             r.y_mm = y_mm;
             r.theta_mrad = static_cast<std::int16_t>(theta_mrad);
             r.flags = localized ? swarm::kFlagCornerLocalized : 0;
             return r;
           }),
           py::arg("robot_id"), py::arg("seq"), py::arg("x_mm"),
           py::arg("y_mm"), py::arg("theta_mrad") = 0,
           py::arg("localized") = false)
      .def_readwrite("robot_id", &swarm::PositionReport::robot_id)
      .def_readwrite("seq", &swarm::PositionReport::seq)
      .def_readwrite("x_mm", &swarm::PositionReport::x_mm)
      .def_readwrite("y_mm", &swarm::PositionReport::y_mm)
      .def_readwrite("theta_mrad", &swarm::PositionReport::theta_mrad)
      .def_readwrite("flags", &swarm::PositionReport::flags)
      .def_property_readonly("localized",
                             &swarm::PositionReport::corner_localized)
      .def("__eq__",
           [](const swarm::PositionReport& a, const swarm::PositionReport& b) {
             return a == b;
           })
      .def("__repr__", [](const swarm::PositionReport& r) {
        return "PositionReport(robot_id=" + std::to_string(r.robot_id) +
               ", seq=" + std::to_string(r.seq) +
               ", x_mm=" + std::to_string(r.x_mm) +
               ", y_mm=" + std::to_string(r.y_mm) +
               ", theta_mrad=" + std::to_string(r.theta_mrad) +
               ", flags=" + std::to_string(r.flags) + ")";
      });

  m.def(
      "encode_report",
      [](const swarm::PositionReport& report) {
        const auto wire = swarm::encode_report(report);
        return from_bytes(wire.data(), wire.size());
      },
      py::arg("report"));
  m.def(
      "decode_report",
      [](const py::bytes& data) {
        return swarm::decode_report(to_bytes(data));
      },
      py::arg("data"));
  m.def("seq_newer", &swarm::seq_newer, py::arg("a"), py::arg("b"),
        "Serial-number comparison with a 16-bit half-range window.");

  // scenario runner
  m.def(
      "run_scenario_json",
      [](const std::string& json_text, const std::filesystem::path& out_dir,
         std::optional<std::uint64_t> seed) {
        return run_and_convert(parse_scenario(json_text), out_dir, seed);
      },
      py::arg("json_text"), py::arg("out_dir"), py::arg("seed") = py::none(),
      "Run a scenario given as JSON text; returns per-robot result dicts "
      "and writes trajectory.csv, events.jsonl and summary.json per robot.");
  m.def(
      "run_scenario_file",
      [](const std::filesystem::path& path,
         const std::filesystem::path& out_dir,
         std::optional<std::uint64_t> seed) {
        return run_and_convert(load_scenario(path), out_dir, seed);
      },
      py::arg("path"), py::arg("out_dir"), py::arg("seed") = py::none());
}
