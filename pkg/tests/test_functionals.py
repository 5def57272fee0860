import numpy as np
import pytest

from isoflow.curve import CurveSamples, frame_fields, isoperimetric_deficit, resample_arclength
from isoflow.curvegen import (
    Circle,
    CurveSpec,
    Ellipse,
    PolarCosine,
    generate,
    standard_corpus,
)
from isoflow.errors import DegenerateRatio, DerivativeCapExceeded
from isoflow.functionals import (
    I_ell,
    J_kp,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    diagnose,
    theorem2_G,
    theorem2_scale,
    theorem3_ratio,
)
from isoflow.spectral import SpectralCoeffs, analyze, deficit_sums

from oracles import EllipseQuadrature, single_mode_curve

TWO_PI = 2 * np.pi


def arc(variant, n=256):
    return resample_arclength(generate(CurveSpec(variant, n)))


@pytest.fixture(scope="module")
def single_mode():
    return single_mode_curve(TWO_PI, 1e-3, 3, 256)


@pytest.fixture(scope="module")
def corpus():
    return [resample_arclength(generate(s)) for s in standard_corpus(256)]


# --------------------------------------------------------------------------
# I_l and J_{k,p}
# --------------------------------------------------------------------------

def test_circle_functionals_vanish():
    c = arc(Circle(2.0, (1.0, 0.0)))
    fr = frame_fields(c)
    for ell in range(3):
        assert I_ell(c, fr, ell) < 1e-10
    assert J_kp(c, fr, 0, 2) < 1e-10
    assert J_kp(c, fr, 1, 4) < 1e-6


@pytest.mark.parametrize("ell", [0, 1, 2, 3])
def test_single_mode_closed_form(single_mode, ell):
    # kdev = eps cos(2 pi m s / L)  =>  I_l = L^(2l+2) eps^2 (2 pi m / L)^(2l) / 2
    L, eps, m = TWO_PI, 1e-3, 3
    expected = L ** (2 * ell + 2) * eps ** 2 * (TWO_PI * m / L) ** (2 * ell) / 2
    got = I_ell(single_mode, frame_fields(single_mode), ell)
    assert abs(got - expected) < 1e-8 * expected


def test_single_mode_first_order_value(single_mode):
    assert abs(I_ell(single_mode, frame_fields(single_mode), 1) - 7.0135e-3) < 1e-6


def test_j_kp_relations(single_mode, ellipse):
    for c in (single_mode, ellipse):
        fr = frame_fields(c)
        for k in (0, 1, 2):
            assert abs(J_kp(c, fr, k, 2) ** 2 - I_ell(c, fr, k)) < 1e-10 * I_ell(c, fr, k)


def test_j_kp_fourth_power_closed_form(single_mode):
    # integral of cos^4 over a period is 3L/8
    L, eps = TWO_PI, 1e-3
    expected = (L ** 3 * eps ** 4 * 3 * L / 8) ** 0.25
    got = J_kp(single_mode, frame_fields(single_mode), 0, 4)
    assert abs(got - expected) < 1e-8 * expected


def test_j_kp_rejects_small_p(ellipse):
    with pytest.raises(ValueError):
        J_kp(ellipse, frame_fields(ellipse), 0, 1.5)


def test_cap_enforced():
    c = arc(Circle(), 64)
    with pytest.raises(DerivativeCapExceeded):
        I_ell(c, frame_fields(c), 4)
    with pytest.raises(DerivativeCapExceeded):
        diagnose(c, ell_max=4)


def test_i0_matches_spectral_sum(corpus):
    for c in corpus:
        fr = frame_fields(c)
        i0 = I_ell(c, fr, 0)
        assert abs(i0 - deficit_sums(analyze(c, warn=False))[1]) <= 1e-8 * max(i0, 1e-10)


# --------------------------------------------------------------------------
# theorem checks
# --------------------------------------------------------------------------

def test_circle_margins_are_zero():
    d = diagnose(arc(Circle(1.0)))
    assert abs(check_theorem1(d)) < 1e-12
    G, margin = check_theorem2(d)
    assert abs(G) < 1e-10 and abs(margin) < 1e-10
    assert all(v is None or v < 1e-3 for v in d.thm3_ratios.values())


def test_ellipse_theorem_margins(ellipse):
    d = diagnose(ellipse)
    assert d.thm1_margin > 0
    G, margin = check_theorem2(d)
    assert G > 0 and margin > 0
    ratio = check_theorem3(d, 0, 1)
    assert np.isfinite(ratio) and ratio > 0


def test_ellipse_theorem2_against_quadrature(ellipse):
    q = EllipseQuadrature(2.0, 1.0)
    L = q.length
    kd = q.kappa - TWO_PI / L
    G = L ** 3 * q.integral(q.kappa ** 3 * kd + q.dkappa_ds() ** 2)
    i0 = L * q.integral(kd ** 2)
    d = diagnose(ellipse)
    assert abs(d.thm2_G - G) < 1e-8 * G
    assert abs(d.i_ell[0] - i0) < 1e-8 * i0


def test_nonconvex_polar_theorem2():
    c = arc(PolarCosine(1.0, 0.5, 3), 2048)
    d = diagnose(c)
    assert d.kappa_min < 0
    G, margin = check_theorem2(d)
    assert G > 0 and margin > 0
    assert d.thm1_margin > 0


def test_theorem3_diagonal_is_one_half(ellipse):
    d = diagnose(ellipse)
    for m in range(4):
        assert abs(check_theorem3(d, m, m) - 0.5) < 1e-14


def test_theorem3_degenerate_on_exact_zero():
    with pytest.raises(DegenerateRatio):
        theorem3_ratio(0.0, 0.0, 0.0, 0, 1)


def test_theorem3_argument_checks(ellipse):
    d = diagnose(ellipse, ell_max=2)
    with pytest.raises(ValueError):
        check_theorem3(d, 2, 1)
    with pytest.raises(DerivativeCapExceeded):
        check_theorem3(d, 0, 3)


def test_diagnostics_field_names(ellipse):
    d = diagnose(ellipse).to_dict()
    assert list(d) == ["length", "area", "deficit", "i_ell", "kappa_min", "kappa_max",
                       "thm1_margin", "thm2_G", "thm2_margin", "thm3_ratios"]
    assert list(d["thm3_ratios"]) == ["0,1", "0,2", "1,2"]


def test_inequality_chain_on_corpus(corpus):
    for c in corpus:
        d = diagnose(c)
        i0, i1 = d.i_ell[0], d.i_ell[1]
        assert d.deficit >= -1e-10
        # I_-1 <= I_0/(8 pi^2) <= I_0/(4 pi^2), and Wirtinger I_0 <= I_1/(4 pi^2)
        assert d.deficit <= i0 / (8 * np.pi ** 2) + 1e-10
        assert i0 / (8 * np.pi ** 2) <= i0 / (4 * np.pi ** 2)
        assert i0 <= i1 / (4 * np.pi ** 2) * (1 + 1e-8) + 1e-10
        assert d.thm2_G >= -1e-10
        assert d.thm2_margin >= -1e-8 * i0 - 1e-10


# --------------------------------------------------------------------------
# near-circle scaling
# --------------------------------------------------------------------------

def test_near_circle_ratio_matches_two_term_prediction():
    # f = e^{iu} + eps e^{3iu}; in arc length the leading coefficients sit at
    # k = 3 and k = -1 with weights (m-2)/(2(m-1)) and m/(2(m-1)) times eps
    m, eps, n = 3, 1e-4, 256
    u = TWO_PI * np.arange(n) / n
    c = resample_arclength(CurveSamples.from_complex(np.exp(1j * u) + eps * np.exp(1j * m * u)))
    d = diagnose(c)
    ratio = d.deficit / d.i_ell[0]

    coeffs = np.zeros(n, dtype=complex)
    coeffs[n // 2 + 1] = 1.0
    coeffs[n // 2 + m] = eps * (m - 2) / (2 * (m - 1))
    coeffs[n // 2 + 2 - m] = eps * m / (2 * (m - 1))
    im1, i0 = deficit_sums(SpectralCoeffs(coeffs, TWO_PI))
    predicted = im1 / i0
    assert abs(predicted - 1 / (12 * np.pi ** 2)) < 1e-12
    assert abs(ratio - predicted) < 0.01 * predicted


def test_theorem2_G_direct(ellipse):
    fr = frame_fields(ellipse)
    assert theorem2_G(ellipse, fr) == diagnose(ellipse, frame=fr).thm2_G
    assert abs(isoperimetric_deficit(ellipse) - diagnose(ellipse).deficit) == 0


def test_theorem2_scale_absorbs_circle_rounding():
    c = resample_arclength(generate(CurveSpec(Circle(2.0, (3.0, -1.0), 0.7), 256)))
    frame = frame_fields(c)
    G = theorem2_G(c, frame)
    scale = theorem2_scale(c, frame)
    # L^3 * integral kappa^4 ds = (2 pi)^4 for any circle
    assert scale == pytest.approx((2 * np.pi) ** 4, rel=1e-10)
    assert abs(G) < 1e-10 * scale
