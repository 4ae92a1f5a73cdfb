"""Pixel-level video fusion on the dual-tree complex wavelet transform,
with interchangeable scalar / vector / accelerator-model backends, a
calibrated cycle+energy cost model, and cost-driven backend dispatch."""

from .backends import (BackendId, CapabilityReport, EquivalenceReport,
                       capability_report, verify_equivalence)
from .errors import (CalibrationFailed, CapacityExceeded, ExtrapolationRefused,
                     InvalidInput, NotCalibrated, ParseError, WavefuseError)
from .filters import FilterBank, default_bank, load_bank, save_bank
from .frame import Frame
from .fusion import FusionRule, fuse_frames, fuse_pyramids
from .transform import (ComplexSubband, Pyramid, analysis_pair, dtcwt_forward,
                        dtcwt_inverse, dwt2d_level, dump_pyramid,
                        extend_symmetric, load_pyramid, synthesis_pair)

__version__ = "0.1.0"
