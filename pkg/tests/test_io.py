import json

import numpy as np
import pytest

from isoflow import io
from isoflow.curve import resample_arclength
from isoflow.curvegen import CurveSpec, Ellipse, generate
from isoflow.flow import FlowConfig, simulate
from isoflow.spectral import analyze


def test_trace_columns_order():
    assert io.trace_columns(2) == [
        "t", "L", "A", "I_m1", "I_0", "I_1", "I_2", "kappa_min", "kappa_max",
        "dAdt_pred", "dLdt_pred", "cx", "cy", "r_fit", "sigma_fit", "rho_sup",
        "hausdorff", "barycenter_gap"]


def test_json_samples_round_trip(tmp_path):
    src = generate(CurveSpec(Ellipse(2.0, 1.0, (0.1, 0.2)), 64))
    path = tmp_path / "c.json"
    io.write_curve(path, src.points, {"note": "x"})
    back = io.read_curve(path)
    np.testing.assert_array_equal(back.points, src.points)
    assert json.loads(path.read_text())["metadata"] == {"note": "x"}


def test_csv_curve(tmp_path):
    src = generate(CurveSpec(Ellipse(2.0, 1.0), 32))
    path = tmp_path / "c.csv"
    path.write_text("\n".join(f"{float(x)!r},{float(y)!r}" for x, y in src.points) + "\n")
    np.testing.assert_array_equal(io.read_curve(path).points, src.points)


def test_fourier_curve_file(tmp_path, ellipse):
    sc = analyze(ellipse)
    entries = [{"k": int(k), "re": float(a.real), "im": float(a.imag)}
               for k, a in zip(sc.k, sc.coeffs) if abs(a) > 1e-15]
    path = tmp_path / "f.json"
    path.write_text(json.dumps({"fourier": entries, "length": ellipse.length}))
    raw = io.read_curve(path, n=256)
    c = resample_arclength(raw)
    assert abs(c.length - ellipse.length) < 1e-12 * ellipse.length
    # the fourier grid is already uniform in arc length
    assert np.max(np.abs(raw.points - ellipse.points)) < 1e-12


def test_fourier_circle_default_grid(tmp_path):
    L = 2 * np.pi
    path = tmp_path / "f.json"
    path.write_text(json.dumps({"fourier": [{"k": 1, "re": L ** 0.5, "im": 0.0}], "length": L}))
    raw = io.read_curve(path)
    assert raw.n == 16
    assert np.allclose(np.hypot(*raw.points.T), 1.0)


@pytest.mark.parametrize("text, suffix", [
    ("{bad", ".json"),
    ('{"other": 1}', ".json"),
    ('{"samples": [[0, 1], [2]]}', ".json"),
    ('{"fourier": [{"k": 1}], "length": 1.0}', ".json"),
    ('{"fourier": [{"k": 1, "re": 1, "im": 0}]}', ".json"),
    ("1,2\nx,y\n", ".csv"),
])
def test_malformed_files(tmp_path, text, suffix):
    path = tmp_path / f"bad{suffix}"
    path.write_text(text)
    with pytest.raises(io.MalformedInput):
        io.read_curve(path)


def test_missing_file(tmp_path):
    with pytest.raises(io.MalformedInput):
        io.read_curve(tmp_path / "nope.json")


def test_trace_csv_round_trip(tmp_path):
    tr = simulate(generate(CurveSpec(Ellipse(2.0, 1.0), 64)), "jiang-pan",
                  FlowConfig(t_end=0.01, record_interval=3))
    path = tmp_path / "trace.csv"
    io.write_trace(path, tr)
    columns, rows = io.read_trace_csv(path)
    assert columns == tr.columns
    # repr round-trips doubles exactly
    np.testing.assert_array_equal(rows, tr.array())
    side = io.sidecar({"n": 64}, tr)
    assert side["stop_reason"] == "t_end" and side["N"] == 64
    assert {"config", "kind", "dt_policy", "timestamp"} <= set(side)
