"""Wall-finding localization for differential-drive robots.

Thin wrapper over the compiled core: Open Interface codec helpers, motion
math, position reports and the deterministic scenario runner.
"""

from wallfinder._core import (
    MM_PER_COUNT,
    ROBOT_RADIUS_MM,
    WHEEL_BASE_MM,
    Pose,
    PositionReport,
    classify_bump,
    corner_estimate_from_center,
    counts_to_mm,
    decode_drive_direct,
    decode_report,
    encode_drive_direct,
    encode_query_frame,
    encode_report,
    encoder_delta,
    integrate_pose,
    normalize_angle,
    parse_query_stream,
    run_scenario_file,
    run_scenario_json,
    seq_newer,
    to_world,
    wheel_speeds,
)

__version__ = "1.0.0"

__all__ = [
    "MM_PER_COUNT",
    "ROBOT_RADIUS_MM",
    "WHEEL_BASE_MM",
    "Pose",
    "PositionReport",
    "classify_bump",
    "corner_estimate_from_center",
    "counts_to_mm",
    "decode_drive_direct",
    "decode_report",
    "encode_drive_direct",
    "encode_query_frame",
    "encode_report",
    "encoder_delta",
    "integrate_pose",
    "normalize_angle",
    "parse_query_stream",
    "run_scenario_file",
    "run_scenario_json",
    "seq_newer",
    "to_world",
    "wheel_speeds",
]
