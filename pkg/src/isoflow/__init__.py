"""Spectral geometry of closed plane curves and two isoperimetric flows."""
from .curve import (
    ArcLengthCurve,
    CurveSamples,
    FrameFields,
    frame_fields,
    isoperimetric_deficit,
    resample_arclength,
    signed_area,
)
from .errors import *  # noqa: F401,F403
from .flow import DiagnosticsTrace, FlowConfig, FlowKind, FlowState, fit_decay, simulate, step, velocity
from .functionals import CurveDiagnostics, I_ell, J_kp, diagnose
from .limitshape import CircleFit, barycenter, circle_fit, convergence_report, hausdorff_to_disk
from .spectral import SpectralCoeffs, analyze, deficit_sums, identity_residuals, moment_sum, synthesize

__version__ = "0.1.0"
