"""Explicit time stepping of two curvature flows with a non-local term.

Both flows move the curve along its inward normal ``nu``:

* ``jiang-pan``:        ``v = (kappa - L / (2A)) nu``
* ``area-preserving``:  ``v = (kappa - 2 pi / L) nu``

Each step is classical RK4 on the sample positions (``L`` and ``A`` are
recomputed at every stage) followed by redistribution to uniform arc
length.  The redistribution is a pure tangential reshuffle and leaves every
recorded diagnostic unchanged.

Along the exact flows

* ``jiang-pan``:        ``dA/dt = (L^2 - 4 pi A) / (2A)``, ``dL/dt = -int kappa^2 + pi L / A``
* ``area-preserving``:  ``dA/dt = 0``, ``dL/dt = -int kdev^2``

and these right-hand sides are stored with each trace row so they can be
compared against finite differences of the recorded series.
"""
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import functionals
from .curve import (
    CurveSamples,
    parametric_geometry,
    frame_fields,
    resample_arclength,
    signed_area,
)
from .errors import (
    DegenerateCurve,
    InsufficientData,
    IsoflowError,
    NonFinite,
    NonPositiveArea,
    NotStarShaped,
    StepRejected,
    StiffnessFailure,
)
from .io import trace_columns
from .limitshape import barycenter_offset, circle_fit, hausdorff_to_disk
from .spectral import analyze, derivative_cap

MAX_HALVINGS = 20
# area-preserving runs may not lengthen the curve by more than rounding
LENGTH_INCREASE_TOL = 1e-12
DECAY_FLOOR = 1e-12
MIN_FIT_SAMPLES = 10


class FlowKind(enum.Enum):
    JIANG_PAN = "jiang-pan"
    AREA_PRESERVING = "area-preserving"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower().replace("_", "-"))
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown flow kind {value!r}; expected one of {names}") from None


@dataclass
class FlowConfig:
    c_stab: float = 0.2
    t_end: float = 10.0
    record_interval: int = 10
    stop_tol: float = 1e-10
    ell_max: int = 3

    def __post_init__(self):
        for name in ("c_stab", "t_end", "stop_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if int(self.record_interval) != self.record_interval or self.record_interval < 1:
            raise ValueError("record_interval must be a positive integer")
        if self.ell_max < 0:
            raise ValueError("ell_max must be non-negative")


@dataclass(frozen=True)
class FlowState:
    curve: object
    t: float = 0.0
    step_count: int = 0


@dataclass
class DiagnosticsTrace:
    """Per-row diagnostics of one run, in the column order of ``columns``."""

    kind: str
    n: int
    ell_max: int
    dt_policy: str = ""
    rows: list = field(default_factory=list)
    stop_reason: str = ""
    steps: int = 0
    reoriented: bool = False
    flags: list = field(default_factory=list)
    final_state: object = None

    @property
    def columns(self):
        return trace_columns(self.ell_max)

    @property
    def nrows(self):
        return len(self.rows)

    def array(self):
        return np.array(self.rows, dtype=float).reshape(-1, len(self.columns))

    def column(self, name):
        return self.array()[:, self.columns.index(name)]


@dataclass(frozen=True)
class DecayFit:
    rate: float
    c0: float
    window: tuple
    rms_residual: float
    samples: int


# --------------------------------------------------------------------------
# velocity and a single step
# --------------------------------------------------------------------------

def _coefficient(kind, kappa, L, A):
    if not A > 0:
        raise NonPositiveArea(f"signed area {A:.3e} is not positive")
    if kind is FlowKind.JIANG_PAN:
        return kappa - L / (2 * A)
    return kappa - 2 * np.pi / L


def velocity(kind, c, frame, A):
    """Normal velocity field on an arc-length curve, shape ``(N, 2)``."""
    kind = FlowKind.parse(kind)
    coef = _coefficient(kind, frame.kappa, c.length, A)
    return coef[:, None] * frame.nu


def _stage_velocity(kind, z):
    L, A, kappa, nu, _ = parametric_geometry(z)
    return _coefficient(kind, kappa, L, A) * nu


def step(state, kind, dt):
    """One RK4 step followed by arc-length redistribution.

    Raises StepRejected on non-finite or degenerate output, on a vanishing
    area inside a stage, and (area-preserving only) on growth of ``L``.
    """
    kind = FlowKind.parse(kind)
    c = state.curve
    z = c.z
    try:
        k1 = _stage_velocity(kind, z)
        k2 = _stage_velocity(kind, z + 0.5 * dt * k1)
        k3 = _stage_velocity(kind, z + 0.5 * dt * k2)
        k4 = _stage_velocity(kind, z + dt * k3)
        z_new = z + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        new = resample_arclength(CurveSamples.from_complex(z_new), c.n)
    except (NonFinite, DegenerateCurve, NonPositiveArea, ValueError) as exc:
        raise StepRejected(str(exc)) from exc
    if new.reoriented:
        raise StepRejected("step reversed the orientation of the curve")
    if kind is FlowKind.AREA_PRESERVING and new.length > c.length * (1 + LENGTH_INCREASE_TOL):
        raise StepRejected(f"length grew from {c.length!r} to {new.length!r}")
    return FlowState(new, state.t + dt, state.step_count + 1)


def nominal_dt(c, c_stab):
    return c_stab * (c.length / c.n) ** 2


# --------------------------------------------------------------------------
# diagnostics rows
# --------------------------------------------------------------------------

def diagnostics_row(c, t, kind, ell_max, flags=None):
    """Values for one trace row (see ``io.trace_columns``)."""
    frame = frame_fields(c)
    L = c.length
    A = signed_area(c)
    im1 = 1.0 - 4 * np.pi * A / L ** 2
    i_vals = [functionals.I_ell(c, frame, ell) for ell in range(ell_max + 1)]
    integral = lambda v: c.h * float(np.sum(v))  # noqa: E731
    if kind is FlowKind.JIANG_PAN:
        dadt = (L ** 2 - 4 * np.pi * A) / (2 * A)
        dldt = -integral(frame.kappa ** 2) + np.pi * L / A
    else:
        dadt = 0.0
        dldt = -integral(frame.kappa_dev ** 2)
    fit = circle_fit(analyze(c, warn=False))
    try:
        haus = hausdorff_to_disk(c, fit)
    except NotStarShaped as exc:
        haus = exc.lower_bound
        if flags is not None:
            flags.append(f"t={t!r}: not star-shaped, hausdorff is a lower bound")
    bary = abs(barycenter_offset(c, fit.center))
    return [t, L, A, im1, *i_vals,
            float(frame.kappa.min()), float(frame.kappa.max()), dadt, dldt,
            fit.center[0], fit.center[1], fit.radius, fit.phase, fit.rho_sup,
            haus, bary]


# --------------------------------------------------------------------------
# driver
# --------------------------------------------------------------------------

def simulate(initial, kind, config=None, n=None):
    """Run a flow from ``initial`` until ``I_{-1} < stop_tol`` or ``t_end``.

    Parameters
    ----------
    initial : CurveSamples or ArcLengthCurve
        Starting curve; clockwise input is reversed first.
    kind : FlowKind or str
    config : FlowConfig, optional
    n : int, optional
        Sample count of the run (defaults to that of ``initial``).

    Returns
    -------
    DiagnosticsTrace
        One row at t = 0, one every ``record_interval`` accepted steps, and
        a final row.  ``stop_reason`` is ``"converged"`` or ``"t_end"``.

    Raises
    ------
    StiffnessFailure
        A step was rejected ``MAX_HALVINGS`` times; the partial trace is
        attached.
    RotationNumberMismatch
        The curve stopped turning once (e.g. it pinched off); the partial
        trace is attached as ``exc.trace``.
    """
    kind = FlowKind.parse(kind)
    config = config or FlowConfig()
    if isinstance(initial, CurveSamples):
        c0 = resample_arclength(initial, n)
    else:
        c0 = initial if n in (None, initial.n) else resample_arclength(
            CurveSamples(initial.points), n)
    cap = derivative_cap(c0.n)
    if config.ell_max > cap:
        raise ValueError(f"ell_max={config.ell_max} exceeds the cap {cap} for N={c0.n}")
    area0 = signed_area(c0)
    if not area0 > 0:
        raise NonPositiveArea(f"signed area {area0:.3e} is not positive")

    trace = DiagnosticsTrace(
        kind=kind.value, n=c0.n, ell_max=config.ell_max,
        dt_policy=f"dt = {config.c_stab!r} * (L/N)^2, halved up to {MAX_HALVINGS} times on rejection",
        reoriented=c0.reoriented)
    state = FlowState(c0)

    def record(s):
        try:
            trace.rows.append(diagnostics_row(s.curve, s.t, kind, config.ell_max, trace.flags))
        except IsoflowError as exc:
            trace.stop_reason = f"aborted: {exc}"
            trace.steps = s.step_count
            trace.final_state = s
            exc.trace = trace
            raise

    record(state)
    last_recorded = 0
    deficit = 1.0 - 4 * np.pi * area0 / c0.length ** 2
    reason = "converged" if deficit < config.stop_tol else None
    while reason is None:
        dt = nominal_dt(state.curve, config.c_stab)
        remaining = config.t_end - state.t
        if remaining <= dt * 1e-9:
            reason = "t_end"
            if last_recorded != state.step_count:
                record(state)
            break
        dt = min(dt, remaining)
        for _ in range(MAX_HALVINGS + 1):
            try:
                state = step(state, kind, dt)
                break
            except StepRejected as exc:
                last_error = exc
                dt *= 0.5
        else:
            trace.stop_reason = f"stiffness: {last_error}"
            trace.steps = state.step_count
            trace.final_state = state
            raise StiffnessFailure(
                f"step at t={state.t:.6g} rejected after {MAX_HALVINGS} halvings: {last_error}",
                trace)
        c = state.curve
        deficit = 1.0 - 4 * np.pi * signed_area(c) / c.length ** 2
        if deficit < config.stop_tol:
            reason = "converged"
        elif state.t >= config.t_end:
            reason = "t_end"
        if reason or state.step_count - last_recorded >= config.record_interval:
            record(state)
            last_recorded = state.step_count
    trace.stop_reason = reason
    trace.steps = state.step_count
    trace.final_state = state
    return trace


# --------------------------------------------------------------------------
# decay fits
# --------------------------------------------------------------------------

def fit_series(t, values, window=None):
    """Least-squares fit ``values ~ c0 * exp(-rate * t)``.

    Only samples above ``DECAY_FLOOR`` inside ``window = (t_start, t_end)``
    are used; the default window is the last half of the samples.
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if window is None:
        if t.size == 0:
            raise InsufficientData("no samples")
        window = (float(t[t.size // 2]), float(t[-1]))
    mask = (t >= window[0]) & (t <= window[1]) & (values > DECAY_FLOOR) & np.isfinite(values)
    if mask.sum() < MIN_FIT_SAMPLES:
        raise InsufficientData(
            f"only {int(mask.sum())} samples above {DECAY_FLOOR:g} in the window "
            f"(need {MIN_FIT_SAMPLES})")
    tt = t[mask]
    logs = np.log(values[mask])
    slope, intercept = np.polyfit(tt, logs, 1)
    resid = logs - (slope * tt + intercept)
    return DecayFit(rate=float(-slope), c0=float(math.exp(intercept)),
                    window=(float(tt[0]), float(tt[-1])),
                    rms_residual=float(np.sqrt(np.mean(resid ** 2))),
                    samples=int(mask.sum()))


def fit_decay(trace, selector, window=None):
    """Exponential decay fit of one trace quantity.

    ``selector`` is a column name or a callable mapping the trace to a
    series (e.g. ``lambda tr: tr.column("L")**2 - 4*pi*tr.column("A")``).
    """
    series = trace.column(selector) if isinstance(selector, str) else selector(trace)
    return fit_series(trace.column("t"), series, window)
