"""Limit-circle extraction and convergence diagnostics for flow traces.

The circle ``c + r exp(2 pi i (s + sigma) / L)`` is read off the Fourier modes
0 and 1 of the arc-length curve; everything else is the residual ``rho``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .curve import signed_area, spectral_diff
from .errors import InsufficientData, NonPositiveArea, NotStarShaped

GAP_NAMES = ("center", "radius", "rho", "hausdorff", "barycenter")
# (f - c) . nu may touch zero through rounding on an exact circle
STAR_TOL = 1e-12


@dataclass(frozen=True)
class CircleFit:
    center: tuple
    radius: float
    phase: float
    rho_sup: float
    length: float

    def circle_points(self, n):
        s = self.length * np.arange(n) / n
        z = complex(*self.center) + self.radius * np.exp(
            2j * np.pi * (s + self.phase) / self.length)
        return np.column_stack([z.real, z.imag])


def circle_fit(sc):
    """Centre, radius, phase and residual sup-norm from modes 0 and 1."""
    L = sc.length
    root = math.sqrt(L)
    c = sc.mode(0) / root
    a1 = sc.mode(1) / root
    r = abs(a1)
    phase = (math.atan2(a1.imag, a1.real) * L / (2 * np.pi)) % L
    if phase >= L:  # a tiny negative angle rounds up to L
        phase = 0.0
    rest = sc.coeffs.copy()
    rest[sc.n // 2] = 0.0
    rest[sc.n // 2 + 1] = 0.0
    rho = np.fft.ifft(np.fft.ifftshift(rest)) * (sc.n / root)
    return CircleFit((float(c.real), float(c.imag)), float(r), float(phase),
                     float(np.abs(rho).max()), float(L))


def _radial_offsets(c, fit):
    d = c.z - complex(*fit.center)
    nu = 1j * spectral_diff(c.z, c.length)
    support = np.real(d * np.conj(nu))
    return d, support


def is_star_shaped(c, fit):
    """True when ``(f - c) . nu`` keeps one sign (negative for inward ``nu``)."""
    _, support = _radial_offsets(c, fit)
    scale = np.abs(c.z - complex(*fit.center)).max()
    return bool(np.all(support < STAR_TOL * scale) or np.all(support > -STAR_TOL * scale))


def hausdorff_to_disk(c, fit):
    """``max | |f - c| - r |``, the Hausdorff distance for star-shaped curves.

    Raises NotStarShaped (carrying the same number as a lower bound) when a
    ray from the centre can cross the boundary more than once.
    """
    d, _ = _radial_offsets(c, fit)
    dist = float(np.abs(np.abs(d) - fit.radius).max())
    if not is_star_shaped(c, fit):
        raise NotStarShaped(dist)
    return dist


def barycenter_offset(c, center):
    """``A (b - center)`` via ``-(i/2) * integral |f - center|^2 f' ds``."""
    d = c.z - complex(*center)
    dz = spectral_diff(c.z, c.length)
    return -0.5j * c.h * np.sum(np.abs(d) ** 2 * dz)


def barycenter(c, center=None):
    """Centroid of the enclosed region from a boundary integral.

    ``center`` defaults to the centroid of the samples; any choice gives
    the same answer up to rounding.
    """
    area = signed_area(c)
    if not area > 0:
        raise NonPositiveArea(f"signed area {area:.3e} is not positive")
    if center is None:
        center = (float(c.points[:, 0].mean()), float(c.points[:, 1].mean()))
    b = complex(*center) + barycenter_offset(c, center) / area
    return float(b.real), float(b.imag)


# --------------------------------------------------------------------------
# trace-level report
# --------------------------------------------------------------------------

def _gap_series(trace):
    cx, cy = trace.column("cx"), trace.column("cy")
    r = trace.column("r_fit")
    return {
        "center": np.hypot(cx - cx[-1], cy - cy[-1]),
        "radius": np.abs(r - r[-1]),
        "rho": trace.column("rho_sup"),
        "hausdorff": trace.column("hausdorff"),
        "barycenter": trace.column("barycenter_gap"),
    }


def convexification_row(kappa_min):
    """First row after which ``kappa_min`` stays positive, or None."""
    bad = np.nonzero(kappa_min <= 0)[0]
    if bad.size == 0:
        return 0
    first = int(bad[-1]) + 1
    return first if first < kappa_min.size else None


def convergence_report(trace, window=None):
    """Decay rates of the gap series plus the end-of-run circle mismatch.

    Gaps to the final centre and radius vanish at the last row by
    construction, so their fits use the window that excludes it.  A series
    that never rises above the fitting floor (a circle, or a symmetric curve
    whose centre never moves) gets rate ``None`` and a flag instead.
    """
    from .flow import DECAY_FLOOR, fit_series

    if trace.nrows == 0:
        raise InsufficientData("trace has no rows")
    L = trace.column("L")
    r = trace.column("r_fit")
    t = trace.column("t")
    flags = list(trace.flags)
    rates = {}
    for name, series in _gap_series(trace).items():
        if name in ("center", "radius"):
            tt, ss = t[:-1], series[:-1]
        else:
            tt, ss = t, series
        if ss.size == 0 or np.all(ss <= DECAY_FLOOR):
            rates[name] = None
            flags.append(f"{name}: series below fitting floor")
            continue
        try:
            rates[name] = fit_series(tt, ss, window=window).rate
        except InsufficientData as exc:
            rates[name] = None
            flags.append(f"{name}: {exc}")
    t_star = convexification_row(trace.column("kappa_min"))
    if t_star is None:
        flags.append("curve is not convex at the final row")
    return {
        "r_gap_final": float(abs(r[-1] - L[-1] / (2 * np.pi))),
        "rates": rates,
        "t_star_convex": None if t_star is None else float(t[t_star]),
        "t_star_row": t_star,
        "sigma": [float(v) for v in trace.column("sigma_fit")],
        "flags": flags,
    }
