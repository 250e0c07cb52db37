import numpy as np
import pytest

from scatternet.core.exceptions import ScatternetDomainError, ScatternetShapeError
from scatternet.typing.field_types import Grid1D, Grid2D, PhysConstants, WaveField, WaveVector
from scatternet.wavefield import (
    MAX_DERIVATIVE_ORDER,
    central_difference_weights,
    derivative,
    from_intensity,
    momentum_translation_phase,
    normalize,
    plane_wave,
    sampled,
    series_margin,
    shift_exact,
    translate_series,
    translation_phase,
    write_field_csv,
    write_field_pgm,
)


@pytest.fixture
def line():
    return Grid1D.regular(101, 0.1, -5.0)


def test_plane_wave_zero_k_is_constant():
    field = plane_wave(Grid2D.regular(4, 5), WaveVector((0.0, 0.0)))
    assert np.array_equal(field.values, np.ones((4, 5), dtype=np.complex128))


def test_plane_wave_half_turn():
    field = plane_wave(Grid1D.regular(3), (np.pi,))
    assert field.values[1] == pytest.approx(-1 + 0j, abs=1e-15)


def test_plane_wave_period_of_eight_samples():
    field = plane_wave(Grid1D.regular(64), (2 * np.pi / 8,))
    assert np.max(np.abs(field.values[8:] - field.values[:-8])) < 1e-12


def test_plane_wave_modulus_and_dimension_check():
    field = plane_wave(Grid2D.regular(16, 16, 0.5), (0.3, 1.7), amplitude=3.0)
    assert np.max(np.abs(field.modulus() - 3.0)) < 1e-12
    with pytest.raises(ScatternetShapeError):
        plane_wave(Grid1D.regular(4), (1.0, 1.0))


@pytest.mark.parametrize("k, a", [(0.0, 3.7), (2.1, 0.0), ((0.0, 0.0), (1.0, -2.0))])
def test_translation_phase_identity(k, a):
    assert translation_phase(k, a) == 1


def test_translation_phase_group_and_modulus(rng):
    for _ in range(200):
        k, a, b = rng.uniform(-5, 5, (3, 2))
        assert abs(translation_phase(k, a) * translation_phase(k, b) - translation_phase(k, a + b)) < 1e-12
        assert abs(abs(translation_phase(k, a)) - 1) < 1e-12
    assert translation_phase(np.pi, 1.0) == pytest.approx(-1 + 0j, abs=1e-15)


def test_momentum_translation_phase_divides_by_hbar():
    constants = PhysConstants(hbar=2.0)
    assert momentum_translation_phase(3.0, 0.5, constants) == translation_phase(1.5, 0.5)
    with pytest.raises(ScatternetDomainError):
        PhysConstants(hbar=0.0)


def test_central_difference_weights():
    assert np.allclose(central_difference_weights(1, 1), [-0.5, 0.0, 0.5])
    assert np.allclose(central_difference_weights(2, 1), [1.0, -2.0, 1.0])
    with pytest.raises(ScatternetDomainError):
        central_difference_weights(4, 1)


def test_derivative_of_quadratic(line):
    x = line.axis(0)
    f = sampled(line, x**2)
    m = series_margin(2)
    assert np.allclose(derivative(f, 1)[m:-m], 2 * x[m:-m], atol=1e-9)
    assert np.allclose(derivative(f, 2)[m:-m], 2.0, atol=1e-7)


def test_translate_series_terminates_on_quadratic(line):
    x = line.axis(0)
    out = translate_series(sampled(line, x**2), 1.0, 2)
    m = series_margin(2)
    assert np.allclose(out.values[m:-m].real, (x[m:-m] + 1) ** 2, rtol=1e-6, atol=1e-9)


def test_translate_series_sine(line):
    x = line.axis(0)
    out = translate_series(sampled(line, np.sin(0.5 * x)), 0.2, 6)
    m = series_margin(6)
    assert np.max(np.abs(out.values[m:-m] - np.sin(0.5 * (x[m:-m] + 0.2)))) < 1e-4


def test_translate_series_zero_displacement_is_identity(line):
    f = sampled(line, np.cos(line.axis(0)))
    assert translate_series(f, 0.0, 3) is f


def test_translate_series_error_falls_with_terms():
    grid = Grid1D.regular(201, 0.1, -10.0)
    x = grid.axis(0)
    f = sampled(grid, np.sin(0.5 * x))
    m = series_margin(6)
    errors = [
        np.max(np.abs(translate_series(f, 1.0, n).values[m:-m] - np.sin(0.5 * (x[m:-m] + 1.0))))
        for n in range(1, 7)
    ]
    assert all(later < earlier for earlier, later in zip(errors, errors[1:]))


@pytest.mark.parametrize("n_terms", [0, MAX_DERIVATIVE_ORDER + 1])
def test_translate_series_rejects_term_count(line, n_terms):
    with pytest.raises(ScatternetDomainError):
        translate_series(sampled(line, np.zeros(101)), 1.0, n_terms)


def test_shift_exact_moves_impulse():
    grid = Grid1D.regular(10)
    impulse = np.zeros(10)
    impulse[3] = 1.0
    f = sampled(grid, impulse)
    assert np.flatnonzero(shift_exact(f, 2).values).tolist() == [5]
    assert shift_exact(f, 0).values.tolist() == f.values.tolist()


def test_shift_exact_round_trip_on_interior(rng):
    grid = Grid1D.regular(20)
    values = np.zeros(20, dtype=np.complex128)
    values[5:15] = rng.normal(size=10) + 1j * rng.normal(size=10)
    f = sampled(grid, values)
    assert np.array_equal(shift_exact(shift_exact(f, 3), -3).values, f.values)


def test_shift_exact_rejects_large_shift():
    with pytest.raises(ScatternetDomainError):
        shift_exact(sampled(Grid1D.regular(4), np.ones(4)), 4)


def test_normalize_and_from_intensity():
    grid = Grid2D.regular(2, 2)
    f = from_intensity(grid, [[1.0, 4.0], [0.0, 9.0]])
    assert np.array_equal(f.values.real, [[1.0, 2.0], [0.0, 3.0]])
    assert normalize(f).intensity().sum() == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ScatternetDomainError):
        from_intensity(grid, [[1.0, -1.0], [0.0, 0.0]])
    with pytest.raises(ScatternetDomainError):
        normalize(WaveField(grid, np.zeros((2, 2))))


def test_wave_field_rejects_bad_values():
    with pytest.raises(ScatternetShapeError):
        WaveField(Grid1D.regular(3), np.zeros(4))
    with pytest.raises(ScatternetDomainError):
        Grid1D.regular(3, spacing=0.0)


def test_field_writers(tmp_path):
    f = sampled(Grid1D.regular(2), [complex(1, 2), complex(0, -0.5)])
    csv_path = write_field_csv(str(tmp_path / "f.csv"), f)
    assert open(csv_path).read() == "index,re,im\n0,1,2\n1,0,-0.5\n"
    pgm_path = write_field_pgm(str(tmp_path / "f.pgm"), f)
    assert open(pgm_path, "rb").read().startswith(b"P5\n2 1\n65535\n")
