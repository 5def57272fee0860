import numpy as np
import pytest

from isoflow.curve import frame_fields, resample_arclength, signed_area, spectral_diff
from isoflow.curvegen import (
    REGULARITY_MARGIN,
    Circle,
    CurveSpec,
    Ellipse,
    FourierPerturbedCircle,
    FromFile,
    PolarCosine,
    SplitMix64,
    generate,
    perturbation_modes,
    perturbed_corpus,
    standard_corpus,
    validate,
)
from isoflow.errors import SpecInvalid
from isoflow.io import write_curve


def test_splitmix64_reference_sequence():
    # published outputs of SplitMix64 started from seed 0
    rng = SplitMix64(0)
    assert [rng.next_u64() for _ in range(3)] == [
        0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_uniform_range():
    rng = SplitMix64(99)
    vals = np.array([rng.uniform() for _ in range(2000)])
    assert vals.min() >= 0.0 and vals.max() < 1.0
    assert abs(vals.mean() - 0.5) < 0.03


def test_circle_curvature_is_one():
    c = resample_arclength(generate(CurveSpec(Circle(1.0, (0.0, 0.0), 0.0), 64)))
    assert np.max(np.abs(frame_fields(c).kappa - 1.0)) < 1e-12


def test_polar_cosine_is_nonconvex():
    c = resample_arclength(generate(CurveSpec(PolarCosine(1.0, 0.5, 3), 256)))
    fr = frame_fields(c)
    assert fr.kappa.min() < 0
    assert abs(fr.rotation_number - 1) < 1e-9


def test_perturbed_circle_is_deterministic():
    spec = CurveSpec(FourierPerturbedCircle(1.0, 42, 8, 0.3), 256)
    a, b = generate(spec), generate(spec)
    assert a.points.tobytes() == b.points.tobytes()
    other = generate(CurveSpec(FourierPerturbedCircle(1.0, 43, 8, 0.3), 256))
    assert not np.array_equal(a.points, other.points)


def test_perturbation_amplitudes_bounded():
    v = FourierPerturbedCircle(2.0, 5, 8, 0.3)
    modes = perturbation_modes(v)
    assert sorted(modes) == [k for k in range(-8, 9) if k not in (0, 1)]
    for k, a in modes.items():
        assert abs(a) <= v.radius * v.amplitude_decay ** abs(k)
    assert sum(abs(k) * abs(a) for k, a in modes.items()) <= REGULARITY_MARGIN * v.radius * (1 + 1e-12)


def test_large_amplitudes_are_rescaled():
    v = FourierPerturbedCircle(1.0, 3, 6, 0.9)
    modes = perturbation_modes(v)
    budget = sum(abs(k) * abs(a) for k, a in modes.items())
    assert abs(budget - REGULARITY_MARGIN) < 1e-12
    c = generate(CurveSpec(v, 256))
    speed = np.abs(spectral_diff(c.z, 2 * np.pi))
    assert speed.min() >= (1 - REGULARITY_MARGIN) - 1e-12


@pytest.mark.parametrize("spec, word", [
    (CurveSpec(Circle(-1.0)), "radius"),
    (CurveSpec(Ellipse(2.0, 0.0)), "semi-axes"),
    (CurveSpec(PolarCosine(1.0, 1.0, 3)), "eps < r"),
    (CurveSpec(PolarCosine(1.0, 0.5, 0)), "mode"),
    (CurveSpec(FourierPerturbedCircle(1.0, 1, 70, 0.3), 256), "max_mode"),
    (CurveSpec(FourierPerturbedCircle(1.0, -1, 4, 0.3)), "seed"),
    (CurveSpec(Circle(), 15), "n must be"),
    (CurveSpec(FromFile("")), "path"),
])
def test_invalid_specs(spec, word):
    with pytest.raises(SpecInvalid, match=word):
        validate(spec)
    with pytest.raises(SpecInvalid):
        generate(spec)


def test_from_file(tmp_path):
    src = generate(CurveSpec(Ellipse(2.0, 1.0), 64))
    path = tmp_path / "e.json"
    write_curve(path, src.points)
    back = generate(CurveSpec(FromFile(str(path)), 64))
    np.testing.assert_array_equal(back.points, src.points)
    finer = generate(CurveSpec(FromFile(str(path)), 128))
    np.testing.assert_allclose(finer.points[::2], src.points, atol=1e-13)


def test_standard_corpus_composition():
    corpus = standard_corpus(256)
    assert len(corpus) == 20
    nonconvex = 0
    for spec in corpus:
        c = resample_arclength(generate(spec))
        fr = frame_fields(c)
        assert abs(fr.rotation_number - 1) < 1e-9
        assert signed_area(c) > 0
        assert np.max(np.abs(np.abs(spectral_diff(c.z, c.length)) - 1)) < 1e-8
        nonconvex += fr.kappa.min() < 0
    assert nonconvex >= 5


def test_perturbed_corpus_seeds():
    specs = perturbed_corpus(5, 128, start_seed=10)
    assert [s.variant.seed for s in specs] == [10, 11, 12, 13, 14]
    assert all(s.n == 128 for s in specs)
