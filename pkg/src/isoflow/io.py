"""Curve files, trace CSVs and JSON sidecars.

Curve files are JSON, either ``{"samples": [[x, y], ...]}`` or
``{"fourier": [{"k": int, "re": float, "im": float}, ...], "length": L}``
with coefficients in the orthonormal arc-length basis, or headerless CSV
with one ``x,y`` row per sample.

Floats are written with ``repr`` (shortest round-trip form) so that equal
inputs always give byte-identical files.
"""
import csv
import datetime
import json
import math
from pathlib import Path

import numpy as np

from .curve import CurveSamples

TRACE_PREFIX = ("t", "L", "A", "I_m1")
TRACE_SUFFIX = ("kappa_min", "kappa_max", "dAdt_pred", "dLdt_pred", "cx", "cy",
                "r_fit", "sigma_fit", "rho_sup", "hausdorff", "barycenter_gap")


class MalformedInput(ValueError):
    """A curve or config file could not be parsed."""


def trace_columns(ell_max):
    return list(TRACE_PREFIX) + [f"I_{i}" for i in range(ell_max + 1)] + list(TRACE_SUFFIX)


def _fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


# --------------------------------------------------------------------------
# curves
# --------------------------------------------------------------------------

def _from_fourier(entries, length, n):
    if not length or length <= 0:
        raise MalformedInput("fourier curve files need a positive 'length'")
    coeffs = {}
    for e in entries:
        try:
            coeffs[int(e["k"])] = complex(float(e["re"]), float(e["im"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"bad fourier entry {e!r}") from exc
    if n is None:
        kmax = max(abs(k) for k in coeffs) if coeffs else 0
        n = max(16, 2 ** math.ceil(math.log2(4 * kmax + 1)))
    s = length * np.arange(n) / n
    z = np.zeros(n, dtype=complex)
    for k, a in coeffs.items():
        z += a * np.exp(2j * np.pi * k * s / length)
    return CurveSamples.from_complex(z / math.sqrt(length))


def _resize(samples, n):
    """Trigonometric interpolation of ``samples`` onto ``n`` uniform points."""
    m = samples.n
    if n is None or n == m:
        return samples
    zh = np.fft.fft(samples.z) / m
    out = np.zeros(n, dtype=complex)
    half = min(m, n) // 2
    out[:half] = zh[:half]
    out[-(half - 1):] = zh[m - half + 1:]
    return CurveSamples.from_complex(np.fft.ifft(out) * n)


def read_curve(path, n=None):
    """Load a curve file; ``n`` resamples it trigonometrically to ``n`` points."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".csv":
            rows = [r for r in csv.reader(text.splitlines()) if r]
            pts = np.array([[float(r[0]), float(r[1])] for r in rows])
            return _resize(CurveSamples(pts), n)
        data = json.loads(text)
        if "samples" in data:
            return _resize(CurveSamples(np.asarray(data["samples"], dtype=float)), n)
        if "fourier" in data:
            return _from_fourier(data["fourier"], data.get("length"), n)
    except (ValueError, IndexError, TypeError) as exc:
        if isinstance(exc, MalformedInput):
            raise
        raise MalformedInput(f"{path}: {exc}") from exc
    raise MalformedInput(f"{path}: expected a 'samples' or 'fourier' key")


def curve_to_json(points, metadata=None):
    doc = {"samples": [[float(x), float(y)] for x, y in np.asarray(points)]}
    if metadata:
        doc["metadata"] = metadata
    return json.dumps(doc, indent=None)


def write_curve(path, points, metadata=None):
    Path(path).write_text(curve_to_json(points, metadata) + "\n")


# --------------------------------------------------------------------------
# traces
# --------------------------------------------------------------------------

def trace_to_csv(trace):
    lines = [",".join(trace.columns)]
    for row in trace.rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def write_trace(path, trace):
    Path(path).write_text(trace_to_csv(trace))


def read_trace_csv(path):
    """``(columns, rows)`` of a trace file as a header list and float array."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        columns = next(reader)
        rows = np.array([[float(v) for v in r] for r in reader if r])
    return columns, rows


def write_json(path, doc):
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n")


def sidecar(config, trace, extra=None):
    """Run metadata; the timestamp is the only non-reproducible field."""
    doc = {
        "config": config,
        "kind": trace.kind,
        "N": trace.n,
        "dt_policy": trace.dt_policy,
        "stop_reason": trace.stop_reason,
        "steps": trace.steps,
        "reoriented": trace.reoriented,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    if extra:
        doc.update(extra)
    return doc
