"""Streaming no-reference video quality metrics with a fixed-width datapath model.

Four per-frame luma metrics are computed: blockiness, exposure, blackout and
interlace. The engine consumes a 128-bit word stream exactly as a hardware
accelerator would; the oracle recomputes everything directly on pixels.
"""

from .errors import (
    FileUnreadable,
    FrameIncomplete,
    HeaderMalformed,
    ResolutionInvalid,
    ResolutionMismatch,
    TooFewBlocks,
    TruncatedFrame,
    UnsupportedColorspace,
    VqError,
    WordOverrun,
)
from .ingest import Frame, Resolution, open_raw_source, open_y4m_source
from .serializer import GridGeometry, grid_geometry, serialize_frame
from .engine import (
    EngineConfig,
    EngineState,
    FrameMetrics,
    MetricRecord,
    analyze_frame,
    engine_init,
    finalize_frame,
    record_to_metrics,
)
from .lanes import LaneConfig, benchmark, run_pipeline

__all__ = [
    "EngineConfig",
    "EngineState",
    "FileUnreadable",
    "Frame",
    "FrameIncomplete",
    "FrameMetrics",
    "GridGeometry",
    "HeaderMalformed",
    "LaneConfig",
    "MetricRecord",
    "Resolution",
    "ResolutionInvalid",
    "ResolutionMismatch",
    "TooFewBlocks",
    "TruncatedFrame",
    "UnsupportedColorspace",
    "VqError",
    "WordOverrun",
    "analyze_frame",
    "benchmark",
    "engine_init",
    "finalize_frame",
    "grid_geometry",
    "open_raw_source",
    "open_y4m_source",
    "record_to_metrics",
    "run_pipeline",
    "serialize_frame",
]
