"""Deterministic generators for test curves.

Random curves use SplitMix64 so that a corpus can be reproduced bit-for-bit
in any language:

    state  <- state + 0x9E3779B97F4A7C15           (mod 2**64)
    z      <- state
    z      <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9  (mod 2**64)
    z      <- (z ^ (z >> 27)) * 0x94D049BB133111EB  (mod 2**64)
    output <- z ^ (z >> 31)

A uniform double in [0, 1) is ``(output >> 11) * 2**-53``.

FourierPerturbedCircle draws, for k = -max_mode .. max_mode with k not in
{0, 1} and in ascending order, a magnitude ``radius * decay**|k| * U`` and
a phase ``2 pi * V`` (two consecutive uniforms U, V).  If
``sum |k| |a_k| > 0.5 * radius`` all amplitudes are scaled down to make it
equal, which keeps ``|f'| >= 0.5 * radius`` and the rotation number at one.
"""
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .curve import CurveSamples
from .errors import SpecInvalid

MASK64 = (1 << 64) - 1
REGULARITY_MARGIN = 0.5


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & MASK64

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self):
        return (self.next_u64() >> 11) * 2.0 ** -53


@dataclass(frozen=True)
class Circle:
    radius: float = 1.0
    center: Tuple[float, float] = (0.0, 0.0)
    phase: float = 0.0


@dataclass(frozen=True)
class Ellipse:
    a: float = 2.0
    b: float = 1.0
    center: Tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class PolarCosine:
    """``r(theta) = base_radius + amplitude * cos(mode * theta)``."""

    base_radius: float = 1.0
    amplitude: float = 0.5
    mode: int = 3


@dataclass(frozen=True)
class FourierPerturbedCircle:
    radius: float = 1.0
    seed: int = 0
    max_mode: int = 8
    amplitude_decay: float = 0.3


@dataclass(frozen=True)
class FromFile:
    path: str


Variant = Union[Circle, Ellipse, PolarCosine, FourierPerturbedCircle, FromFile]


@dataclass(frozen=True)
class CurveSpec:
    variant: Variant
    n: int = 256


def _param(n):
    return 2 * np.pi * np.arange(n) / n


def _require(cond, message):
    if not cond:
        raise SpecInvalid(message)


def perturbation_modes(v):
    """Mode amplitudes ``{k: a_k}`` of a FourierPerturbedCircle."""
    rng = SplitMix64(v.seed)
    modes = {}
    for k in range(-v.max_mode, v.max_mode + 1):
        if k in (0, 1):
            continue
        mag = v.radius * v.amplitude_decay ** abs(k) * rng.uniform()
        modes[k] = mag * np.exp(2j * np.pi * rng.uniform())
    budget = sum(abs(k) * abs(a) for k, a in modes.items())
    if budget > REGULARITY_MARGIN * v.radius:
        scale = REGULARITY_MARGIN * v.radius / budget
        modes = {k: a * scale for k, a in modes.items()}
    return modes


def validate(spec):
    v = spec.variant
    _require(spec.n >= 16 and spec.n % 2 == 0, "n must be even and >= 16")
    if isinstance(v, Circle):
        _require(v.radius > 0, "radius must be positive")
    elif isinstance(v, Ellipse):
        _require(v.a > 0 and v.b > 0, "semi-axes a, b must be positive")
    elif isinstance(v, PolarCosine):
        _require(v.base_radius > 0, "base_radius must be positive")
        _require(v.amplitude > 0, "amplitude must be positive")
        _require(v.amplitude < v.base_radius,
                 "amplitude must be smaller than base_radius (eps < r)")
        _require(int(v.mode) == v.mode and v.mode >= 1, "mode must be a positive integer")
    elif isinstance(v, FourierPerturbedCircle):
        _require(v.radius > 0, "radius must be positive")
        _require(v.amplitude_decay > 0, "amplitude_decay must be positive")
        _require(v.max_mode >= 1, "max_mode must be positive")
        _require(v.max_mode <= spec.n // 4, "max_mode must be <= n/4")
        _require(v.seed >= 0, "seed must be non-negative")
    elif isinstance(v, FromFile):
        _require(bool(v.path), "path must be given")
    else:
        raise SpecInvalid(f"unknown variant {type(v).__name__}")


def generate(spec):
    """Samples of the curve described by ``spec`` (deterministic)."""
    validate(spec)
    v = spec.variant
    u = _param(spec.n)
    if isinstance(v, Circle):
        z = complex(*v.center) + v.radius * np.exp(1j * (u + v.phase))
    elif isinstance(v, Ellipse):
        z = complex(*v.center) + v.a * np.cos(u) + 1j * v.b * np.sin(u)
    elif isinstance(v, PolarCosine):
        z = (v.base_radius + v.amplitude * np.cos(v.mode * u)) * np.exp(1j * u)
    elif isinstance(v, FourierPerturbedCircle):
        z = v.radius * np.exp(1j * u)
        for k, a in perturbation_modes(v).items():
            z = z + a * np.exp(1j * k * u)
    else:
        from .io import read_curve

        return read_curve(v.path, n=spec.n)
    return CurveSamples.from_complex(z)


def standard_corpus(n=256):
    """The 20-curve reference corpus; seven members are nonconvex."""
    variants = [
        Circle(1.0),
        Circle(2.0, (3.0, -1.0), 0.7),
        Ellipse(2.0, 1.0),
        Ellipse(1.5, 1.0, (1.0, 2.0)),
        Ellipse(2.5, 1.2, (-1.0, 0.5)),
        PolarCosine(1.0, 0.05, 3),
        PolarCosine(1.0, 0.1, 2),
        # nonconvex: amplitude / base_radius > 1 / (mode**2 + 1)
        PolarCosine(1.0, 0.3, 2),
        PolarCosine(1.0, 0.15, 3),
        PolarCosine(1.0, 0.08, 4),
        PolarCosine(1.0, 0.05, 5),
        PolarCosine(1.0, 0.035, 6),
        PolarCosine(2.0, 0.2, 4),
        PolarCosine(1.0, 0.12, 3),
    ]
    variants += [FourierPerturbedCircle(1.0, seed, 6, 0.3) for seed in range(1, 7)]
    return [CurveSpec(v, n) for v in variants]


def perturbed_corpus(count, n=256, start_seed=1000, max_mode=6, amplitude_decay=0.5):
    return [CurveSpec(FourierPerturbedCircle(1.0, start_seed + i, max_mode, amplitude_decay), n)
            for i in range(count)]
