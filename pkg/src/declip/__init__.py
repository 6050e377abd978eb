"""Audio declipping by sparse time-frequency synthesis, with consistency
postprocessing (reliable-sample replacement and crossfading) and a
corpus sweep harness for SDR convergence experiments."""

from .clipping import ClipModel, hard_clip, masks_from_clipped, threshold_for_input_sdr
from .frames import (
    FrameParams,
    FramePlan,
    TFCoeffs,
    analysis,
    default_frame_params,
    synthesis,
)
from .postprocess import (
    CrossfadeConfig,
    crossfade_reliable,
    crossfade_weights,
    replace_reliable,
)
from .shrinkage import (
    NeighborhoodShape,
    ew_shrink,
    hinge,
    neighborhood_energy,
    pew_shrink,
)
from .signals import (
    SampleMask,
    Segment,
    SegmentList,
    Signal,
    sdr,
    sdr_on_mask,
    segments,
)
from .solver import (
    SolverConfig,
    SolverTrace,
    StageRecord,
    declip_sspew,
    lambda_schedule,
    smooth_gradient,
    smooth_objective,
)
from .sweep import SweepSpec, load_sweep_spec, run_sweep
from .wavio import read_wav, synth_signal, write_wav

__version__ = "0.1.0"

__all__ = [
    "ClipModel",
    "CrossfadeConfig",
    "FrameParams",
    "FramePlan",
    "NeighborhoodShape",
    "SampleMask",
    "Segment",
    "SegmentList",
    "Signal",
    "SolverConfig",
    "SolverTrace",
    "StageRecord",
    "SweepSpec",
    "TFCoeffs",
    "analysis",
    "crossfade_reliable",
    "crossfade_weights",
    "declip_sspew",
    "default_frame_params",
    "ew_shrink",
    "hard_clip",
    "hinge",
    "lambda_schedule",
    "load_sweep_spec",
    "masks_from_clipped",
    "neighborhood_energy",
    "pew_shrink",
    "read_wav",
    "replace_reliable",
    "run_sweep",
    "sdr",
    "sdr_on_mask",
    "segments",
    "smooth_gradient",
    "smooth_objective",
    "synth_signal",
    "synthesis",
    "threshold_for_input_sdr",
    "write_wav",
]
