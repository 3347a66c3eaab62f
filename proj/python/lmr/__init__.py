"""Lane Miss Rate evaluation for trajectory predictions."""

from lmr._core import (
    FormatError,
    LaneGraph,
    LaneSegment,
    UnknownSegmentError,
    ValidationError,
    average_velocity,
    evaluate_directories,
    generate_random,
    hit_threshold,
    lane_assignments,
    lane_distance,
    miss_labels,
)

__all__ = [
    "FormatError",
    "LaneGraph",
    "LaneSegment",
    "UnknownSegmentError",
    "ValidationError",
    "average_velocity",
    "evaluate_directories",
    "generate_random",
    "hit_threshold",
    "lane_assignments",
    "lane_distance",
    "miss_labels",
]

__version__ = "0.1.0"
