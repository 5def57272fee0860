"""Scale-invariant curvature functionals and the isoperimetric inequalities.

``I_l = L**(2l+1) * integral |d^l/ds^l kdev|^2 ds`` with ``kdev = kappa - 2 pi/L``,
and ``I_{-1} = 1 - 4 pi A / L^2``.  The inequality checks return margins or
ratios rather than asserting anything; callers decide on tolerances.
"""
from dataclasses import asdict, dataclass, field

import numpy as np

from .curve import frame_fields, isoperimetric_deficit, signed_area, spectral_diff
from .errors import DegenerateRatio, DerivativeCapExceeded
from .spectral import derivative_cap

THM3_PAIRS = ((0, 1), (0, 2), (1, 2))
DEGENERATE_DENOMINATOR = 1e-30


def _check_cap(c, order):
    cap = derivative_cap(c.n)
    if order > cap:
        raise DerivativeCapExceeded(f"order {order} exceeds the cap {cap} for N={c.n}")


def I_ell(c, frame, ell):
    _check_cap(c, ell)
    L = c.length
    d = spectral_diff(frame.kappa_dev, L, ell)
    return float(L ** (2 * ell + 1) * c.h * np.sum(d * d))


def J_kp(c, frame, k, p):
    """``{L**((1+k)p - 1) * integral |d^k kdev|^p ds}**(1/p)``; ``J_{k,2}**2 = I_k``."""
    if p < 2:
        raise ValueError("p must be >= 2")
    _check_cap(c, k)
    L = c.length
    d = spectral_diff(frame.kappa_dev, L, k)
    return float((L ** ((1 + k) * p - 1) * c.h * np.sum(np.abs(d) ** p)) ** (1.0 / p))


def theorem2_G(c, frame):
    """``L^3 * integral (kappa^3 kdev + kdev'^2) ds``, non-negative in theory."""
    L = c.length
    kd = frame.kappa_dev
    dkd = spectral_diff(kd, L)
    return float(L ** 3 * c.h * np.sum(frame.kappa ** 3 * kd + dkd ** 2))


def theorem2_scale(c, frame):
    """``L^3 * integral (kappa^4 + kdev'^2) ds``, the rounding scale of G.

    ``kdev`` carries absolute error of order ``eps * |kappa|``, so the first
    term of G is only known to ``eps * L^3 * integral kappa^4``; using
    ``|kappa^3 kdev|`` instead would give a zero scale on a circle.
    """
    L = c.length
    dkd = spectral_diff(frame.kappa_dev, L)
    return float(L ** 3 * c.h * np.sum(frame.kappa ** 4 + dkd ** 2))


def theorem3_ratio(im1, i_ell, i_m, ell, m):
    """``I_l / (I_{-1}^{(m-l)/2} I_m + I_{-1}^{(m-l)/(m+1)} I_m^{(l+1)/(m+1)})``."""
    im1 = max(im1, 0.0)
    denom = (im1 ** ((m - ell) / 2) * i_m
             + im1 ** ((m - ell) / (m + 1)) * i_m ** ((ell + 1) / (m + 1)))
    if not denom > DEGENERATE_DENOMINATOR:
        raise DegenerateRatio(
            f"denominator {denom:.3e} underflows for (l, m) = ({ell}, {m}); "
            f"the curve is numerically a circle")
    return i_ell / denom


@dataclass
class CurveDiagnostics:
    length: float
    area: float
    deficit: float
    i_ell: list
    kappa_min: float
    kappa_max: float
    thm1_margin: float
    thm2_G: float
    thm2_margin: float
    thm3_ratios: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def diagnose(c, ell_max=3, frame=None):
    """Compute every functional and theorem margin for one curve.

    Theorem-3 ratios whose denominator underflows are recorded as ``None``
    (the inequality holds trivially for a circle).
    """
    _check_cap(c, ell_max)
    if frame is None:
        frame = frame_fields(c)
    i_vals = [I_ell(c, frame, ell) for ell in range(ell_max + 1)]
    im1 = isoperimetric_deficit(c)
    G = theorem2_G(c, frame)
    ratios = {}
    for ell, m in THM3_PAIRS:
        if m > ell_max:
            continue
        try:
            ratios[f"{ell},{m}"] = theorem3_ratio(im1, i_vals[ell], i_vals[m], ell, m)
        except DegenerateRatio:
            ratios[f"{ell},{m}"] = None
    return CurveDiagnostics(
        length=c.length,
        area=signed_area(c),
        deficit=im1,
        i_ell=i_vals,
        kappa_min=float(frame.kappa.min()),
        kappa_max=float(frame.kappa.max()),
        thm1_margin=i_vals[0] / (8 * np.pi ** 2) - im1,
        thm2_G=G,
        thm2_margin=float(np.sqrt(max(im1, 0.0) * max(G, 0.0))) - i_vals[0],
        thm3_ratios=ratios,
    )


def check_theorem1(diag):
    """Margin ``I_0 / (8 pi^2) - I_{-1}``; zero only for circles."""
    return diag.thm1_margin


def check_theorem2(diag):
    """``(G, sqrt(I_{-1} G) - I_0)``."""
    return diag.thm2_G, diag.thm2_margin


def check_theorem3(diag, ell, m):
    if not 0 <= ell <= m:
        raise ValueError("need 0 <= ell <= m")
    if m >= len(diag.i_ell):
        raise DerivativeCapExceeded(f"I_{m} was not computed (ell_max={len(diag.i_ell) - 1})")
    return theorem3_ratio(diag.deficit, diag.i_ell[ell], diag.i_ell[m], ell, m)
