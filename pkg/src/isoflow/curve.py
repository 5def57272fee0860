"""Closed plane curves on a uniform arc-length grid.

A curve is stored as N samples ``f(s_j)`` at ``s_j = j L / N`` together with
its length ``L``.  All derivatives are taken spectrally (FFT), so every
quantity below is spectrally accurate for smooth, resolved curves.

Orientation convention: the tangent is ``tau = f'`` and the inward normal is
``nu = (-f2', f1')``, i.e. ``tau`` rotated by +90 degrees.  Counter-clockwise
curves therefore have positive signed area and positive curvature when convex.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _accel
from .errors import DegenerateCurve, NonFinite, RotationNumberMismatch

MIN_SAMPLES = 16
ROTATION_TOL = 1e-3
DEGENERATE_SPEED = 1e-12
POLISH_TOL = 1e-8
NEWTON_MAX_ITER = 6


# --------------------------------------------------------------------------
# spectral helpers
# --------------------------------------------------------------------------

@lru_cache(maxsize=32)
def mode_numbers(n):
    """Integer wavenumbers in FFT order, with the Nyquist mode set to zero.

    The returned array is cached and read-only.
    """
    k = np.fft.fftfreq(n, 1.0 / n)
    k[n // 2] = 0.0
    k.setflags(write=False)
    return k


def spectral_diff(values, period, order=1):
    """Derivative of periodic samples by FFT.

    The Nyquist coefficient is discarded for every order so that odd and even
    derivatives of real data stay real.
    """
    values = np.asarray(values)
    if order == 0:
        return values.copy()
    n = values.shape[0]
    mult = (2j * np.pi * mode_numbers(n) / period) ** order
    out = np.fft.ifft(mult * np.fft.fft(values))
    return out.real if np.isrealobj(values) else out


def dealiased_product(a, b):
    """Pointwise product computed on a 2x zero-padded grid, then truncated."""
    n = a.shape[0]
    m = 2 * n

    def pad(v):
        vh = np.fft.fft(v) / n
        out = np.zeros(m, dtype=complex)
        half = n // 2
        out[:half] = vh[:half]
        out[-(half - 1):] = vh[half + 1:]
        return np.fft.ifft(out) * m

    prod_hat = np.fft.fft(pad(a) * pad(b)) / m
    half = n // 2
    trunc = np.zeros(n, dtype=complex)
    trunc[:half] = prod_hat[:half]
    trunc[half + 1:] = prod_hat[-(half - 1):]
    out = np.fft.ifft(trunc) * n
    if np.isrealobj(a) and np.isrealobj(b):
        return out.real
    return out


def _as_complex(points):
    points = np.asarray(points, dtype=float)
    return points[:, 0] + 1j * points[:, 1]


def _as_points(z):
    return np.column_stack([z.real, z.imag])


# --------------------------------------------------------------------------
# data types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CurveSamples:
    """Samples of a closed curve at N uniform values of a periodic parameter.

    The closing point is implicit (sample N wraps to sample 0).
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must have shape (N, 2)")
        n = pts.shape[0]
        if n < MIN_SAMPLES or n % 2:
            raise ValueError(f"need an even number of samples >= {MIN_SAMPLES}, got {n}")
        if not np.all(np.isfinite(pts)):
            raise NonFinite("curve samples contain NaN or Inf")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def z(self):
        return _as_complex(self.points)

    @classmethod
    def from_complex(cls, z):
        return cls(_as_points(np.asarray(z, dtype=complex)))

    def reversed(self):
        """Same image traversed backwards, keeping sample 0 first."""
        return CurveSamples(np.roll(self.points[::-1], 1, axis=0))


@dataclass(frozen=True)
class ArcLengthCurve:
    """N samples at uniform arc-length spacing ``h = L / N``.

    ``reoriented`` records whether the source curve was clockwise and had to
    be reversed on ingestion.
    """

    points: np.ndarray
    length: float
    reoriented: bool = field(default=False, compare=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must have shape (N, 2)")
        if not np.all(np.isfinite(pts)) or not np.isfinite(self.length):
            raise NonFinite("arc-length curve contains NaN or Inf")
        if self.length <= 0:
            raise DegenerateCurve("length must be positive")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "length", float(self.length))

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def h(self):
        return self.length / self.n

    @property
    def z(self):
        return _as_complex(self.points)

    @property
    def s(self):
        return self.h * np.arange(self.n)

    def scaled(self, factor):
        return ArcLengthCurve(self.points * factor, self.length * factor, self.reoriented)

    def translated(self, shift):
        return ArcLengthCurve(self.points + np.asarray(shift, dtype=float),
                              self.length, self.reoriented)

    def rotated(self, angle):
        z = self.z * np.exp(1j * angle)
        return ArcLengthCurve(_as_points(z), self.length, self.reoriented)


@dataclass(frozen=True)
class FrameFields:
    tau: np.ndarray
    nu: np.ndarray
    kappa: np.ndarray
    kappa_dev: np.ndarray
    length: float

    @property
    def rotation_number(self):
        return tangent_winding(self.tau[:, 0] + 1j * self.tau[:, 1])


def tangent_winding(tau):
    """Total turning of sampled unit tangents divided by ``2 pi``.

    Summing the principal angle between consecutive tangents gives the
    integer turning number whenever neighbouring tangents differ by less
    than half a turn, independently of how well curvature is resolved.
    """
    turns = np.angle(np.roll(tau, -1) * np.conj(tau))
    return float(np.sum(turns)) / (2 * np.pi)


# --------------------------------------------------------------------------
# geometry of a uniformly sampled periodic parametrisation
# --------------------------------------------------------------------------

def parametric_geometry(z):
    """Length, signed area, curvature and unit normal of samples ``z(u_j)``.

    ``u_j = 2 pi j / N`` is an arbitrary (not necessarily arc-length)
    parameter.  Returns ``(L, A, kappa, nu, speed)`` with ``nu`` complex.
    """
    n = z.shape[0]
    k = mode_numbers(n)
    zh = np.fft.fft(z)
    zu, zuu = np.fft.ifft(np.vstack([1j * k * zh, -(k ** 2) * zh]), axis=1)
    speed = np.abs(zu)
    length = 2 * np.pi * float(speed.sum()) / n
    area = np.pi * float(np.imag(np.conj(z) * zu).sum()) / n
    kappa = np.imag(zuu * np.conj(zu)) / speed ** 3
    nu = 1j * zu / speed
    return length, area, kappa, nu, speed


def raw_signed_area(raw):
    """Signed area enclosed by the trigonometric interpolant of ``raw``."""
    n = raw.n
    zh = np.fft.fft(raw.z) / n
    # (1/2) int Im(conj(z) z_u) du = pi * sum_k k |zh_k|^2
    return np.pi * float(np.sum(mode_numbers(n) * np.abs(zh) ** 2))


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------

def _resample_complex(z, n_out):
    n = z.shape[0]
    if not np.all(np.isfinite(z)):
        raise NonFinite("curve samples contain NaN or Inf")
    k = mode_numbers(n)
    zh = np.fft.fft(z) / n
    zh[n // 2] = 0.0
    speed = np.abs(np.fft.ifft(1j * k * zh) * n)
    diameter = max(np.ptp(z.real), np.ptp(z.imag))
    if not np.isfinite(speed).all():
        raise NonFinite("non-finite derivative while resampling")
    if speed.min() < DEGENERATE_SPEED * diameter or diameter == 0.0:
        raise DegenerateCurve("curve has a (numerically) vanishing tangent")
    length = 2 * np.pi * float(np.mean(speed))

    # s(u) = L u / 2pi + P(u) - P(0), with P the antiderivative of speed - mean
    sh = np.fft.fft(speed) / n
    sh[n // 2] = 0.0
    ph = np.zeros(n, dtype=complex)
    nz = k != 0
    ph[nz] = sh[nz] / (1j * k[nz])
    p_grid = (np.fft.ifft(ph) * n).real
    p0 = p_grid[0]
    u_grid = 2 * np.pi * np.arange(n) / n
    s_grid = length * u_grid / (2 * np.pi) + p_grid - p0
    if np.any(np.diff(s_grid) <= 0):
        raise DegenerateCurve("arc length is not monotone in the curve parameter")
    target = length * np.arange(n_out) / n_out
    u = _accel.pchip_eval(np.append(s_grid, length), np.append(u_grid, 2 * np.pi), target)

    # coefficient rows in ascending k order for the non-uniform evaluation
    kmin = -(n // 2) + 1
    # ascending k = -n/2+1 .. n/2-1; the zeroed Nyquist mode is dropped
    ascending = np.r_[np.arange(n // 2 + 1, n), np.arange(n // 2)]
    rows = np.vstack([ph[ascending], sh[ascending], zh[ascending]])
    # Newton on the exact interpolant; once the guess is within 1e-8 L a
    # single update is quadratically accurate and needs no re-check
    for _ in range(NEWTON_MAX_ITER):
        p_u, speed_u = _accel.trig_eval(rows[:2], kmin, u)
        residual = length * u / (2 * np.pi) + p_u.real - p0 - target
        worst = np.max(np.abs(residual))
        u = u - residual / speed_u.real
        if worst <= POLISH_TOL * length:
            break
    else:
        raise DegenerateCurve("arc-length inversion did not converge")
    z_u = _accel.trig_eval(rows[2:], kmin, u)[0]
    return z_u, length


def resample_arclength(raw, n_out=None):
    """Redistribute a closed curve to ``n_out`` points of equal arc length.

    The curve is taken to be the trigonometric interpolant of ``raw``.  Arc
    length is integrated spectrally, inverted with a monotone cubic, and
    polished by Newton iteration on the exact interpolant.  Clockwise input
    is reversed so that the signed area is positive.
    """
    n_out = raw.n if n_out is None else int(n_out)
    if n_out < MIN_SAMPLES or n_out % 2:
        raise ValueError(f"n_out must be even and >= {MIN_SAMPLES}")
    z = raw.z
    reoriented = raw_signed_area(raw) < 0
    if reoriented:
        z = np.roll(z[::-1], 1)
    z_new, length = _resample_complex(z, n_out)
    return ArcLengthCurve(_as_points(z_new), length, reoriented)


def frame_fields(c, rotation_tol=ROTATION_TOL):
    """Tangent, inward normal, curvature and curvature deviation.

    Raises RotationNumberMismatch when the total turning of the tangent
    differs from ``2 pi`` by more than ``2 pi * rotation_tol``.
    """
    z = c.z
    L = c.length
    dz = spectral_diff(z, L)
    ddz = spectral_diff(z, L, 2)
    speed = np.abs(dz)
    # dividing by |f'|^3 keeps kappa exact when |f'| = 1 only approximately
    kappa = np.imag(ddz * np.conj(dz)) / speed ** 3
    tau = dz / speed
    rotation = tangent_winding(tau)
    if not np.isfinite(rotation) or abs(rotation - 1.0) > rotation_tol:
        raise RotationNumberMismatch(rotation)
    nu = 1j * tau
    return FrameFields(_as_points(tau), _as_points(nu), kappa, kappa - 2 * np.pi / L, L)


def signed_area(c):
    """``A = -1/2 * integral of f . nu ds`` on the arc-length grid."""
    z = c.z
    nu = 1j * spectral_diff(z, c.length)
    area = -0.5 * c.h * float(np.sum(np.real(z * np.conj(nu))))
    if not np.isfinite(area):
        raise NonFinite("signed area is not finite")
    return area


def isoperimetric_deficit(c):
    """``I_{-1} = 1 - 4 pi A / L^2``."""
    return 1.0 - 4 * np.pi * signed_area(c) / c.length ** 2
