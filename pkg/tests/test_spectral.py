"""Tests for the periodic spectral operators."""

import numpy as np
import pytest

from mnns.errors import ExponentError, FieldError, GridError
from mnns.exponents import INF, MixedExponents
from mnns.grid import ScalarField, TensorGrid, VectorField
from mnns.spectral import (
    SpectralField,
    fft_workers,
    heat_propagate,
    leray_project,
    pressure_from_velocity,
    pressure_poisson_reference,
    random_band_limited,
    riesz_boundedness_probe,
    riesz_transform,
    spectral_divergence,
    spectral_gradient,
    vector_gradient,
)


@pytest.fixture
def torus2():
    return TensorGrid((64, 64), (np.pi, np.pi), periodic=True)


@pytest.fixture
def torus3():
    return TensorGrid((24, 24, 24), (np.pi, np.pi, np.pi), periodic=True)


def taylor_green(grid):
    return VectorField.from_profiles(
        grid,
        (
            lambda x, y: np.sin(x) * np.cos(y),
            lambda x, y: -np.cos(x) * np.sin(y),
        ),
    )


class TestRieszTransform:
    def test_single_mode(self, torus2):
        """R_1 sin(x) = -cos(x): the multiplier is -i xi/|xi| = -i sign."""
        f = ScalarField.from_profile(torus2, lambda x, y: np.sin(x))
        got = riesz_transform(f, 1)
        expected = ScalarField.from_profile(torus2, lambda x, y: -np.cos(x))
        assert (got - expected).max_abs() <= 1e-12

    def test_transverse_mode_unaffected(self, torus2):
        f = ScalarField.from_profile(torus2, lambda x, y: np.sin(x))
        assert riesz_transform(f, 2).max_abs() <= 1e-13

    def test_squares_sum_to_minus_identity(self, torus2):
        """sum_j R_j^2 = -1 on mean-free fields."""
        rng = np.random.default_rng(11)
        f = random_band_limited(torus2, rng)
        total = ScalarField.zeros(torus2)
        for j in (1, 2):
            total = total + riesz_transform(riesz_transform(f, j), j)
        assert (total + f).max_abs() <= 1e-10

    def test_skew_adjoint(self, torus2):
        rng = np.random.default_rng(12)
        f = random_band_limited(torus2, rng)
        g = random_band_limited(torus2, rng)
        dot = lambda a, b: float(np.sum(a.samples * b.samples))
        assert dot(riesz_transform(f, 1), g) == pytest.approx(
            -dot(f, riesz_transform(g, 1)), abs=1e-8
        )

    def test_kills_the_mean(self, torus2):
        f = ScalarField.from_profile(torus2, lambda x, y: 2.5 + np.sin(x))
        got = riesz_transform(f, 1)
        assert abs(got.samples.mean()) <= 1e-13

    def test_rejects_truncated_grid(self):
        grid = TensorGrid((16, 16), (1.0, 1.0))
        with pytest.raises(GridError):
            riesz_transform(ScalarField.zeros(grid), 1)

    def test_rejects_bad_axis(self, torus2):
        with pytest.raises(FieldError):
            riesz_transform(ScalarField.zeros(torus2), 3)


class TestGradientAndDivergence:
    def test_gradient_of_single_mode(self, torus2):
        f = ScalarField.from_profile(torus2, lambda x, y: np.sin(2.0 * x) * np.cos(y))
        got = spectral_gradient(f, 1)
        expected = ScalarField.from_profile(
            torus2, lambda x, y: 2.0 * np.cos(2.0 * x) * np.cos(y)
        )
        assert (got - expected).max_abs() <= 1e-11

    def test_vector_gradient_rows(self, torus2):
        v = taylor_green(torus2)
        rows = vector_gradient(v)
        assert len(rows) == 2 and len(rows[0]) == 2
        for i in (1, 2):
            for j in (1, 2):
                direct = spectral_gradient(v.components[i - 1], j)
                assert (rows[i - 1][j - 1] - direct).max_abs() <= 1e-12

    def test_divergence_of_gradient_field(self, torus2):
        phi = ScalarField.from_profile(torus2, lambda x, y: np.sin(x) * np.sin(y))
        grad = VectorField(
            torus2, (spectral_gradient(phi, 1), spectral_gradient(phi, 2))
        )
        lap = spectral_divergence(grad)
        expected = phi * (-2.0)
        assert (lap - expected).max_abs() <= 1e-11


class TestLerayProjection:
    def test_fixes_divergence_free_field(self, torus2):
        v = taylor_green(torus2)
        assert (leray_project(v) - v).max_abs() <= 1e-12

    def test_annihilates_gradients(self, torus2):
        phi = ScalarField.from_profile(torus2, lambda x, y: np.cos(x) * np.sin(2.0 * y))
        grad = VectorField(
            torus2, (spectral_gradient(phi, 1), spectral_gradient(phi, 2))
        )
        assert leray_project(grad).max_abs() <= 1e-12

    def test_idempotent_and_divergence_free(self, torus3):
        rng = np.random.default_rng(21)
        v = random_band_limited(torus3, rng, components=3)
        once = leray_project(v)
        assert spectral_divergence(once).max_abs() <= 1e-10
        assert (leray_project(once) - once).max_abs() <= 1e-12

    def test_constants_pass_through(self, torus2):
        c = VectorField.from_component_samples(
            torus2,
            [np.full(torus2.numpy_shape, 1.5), np.full(torus2.numpy_shape, -0.5)],
        )
        assert (leray_project(c) - c).max_abs() <= 1e-13


class TestHeatPropagate:
    def test_single_mode_decay(self, torus2):
        f = ScalarField.from_profile(torus2, lambda x, y: np.sin(3.0 * x))
        t = 0.2
        got = heat_propagate(f, t)
        assert (got - f * np.exp(-9.0 * t)).max_abs() <= 1e-12

    def test_time_zero_identity(self, torus2):
        f = ScalarField.from_profile(torus2, lambda x, y: np.cos(x))
        assert heat_propagate(f, 0.0) is f

    def test_rejects_negative_time(self, torus2):
        with pytest.raises(FieldError):
            heat_propagate(ScalarField.zeros(torus2), -1.0)


class TestPressure:
    def test_taylor_green_closed_form(self, torus2):
        """The two vortex layouts give P = +/- (1/4)(cos 2x + cos 2y)."""
        layouts = {
            +0.25: (
                lambda x, y: np.sin(x) * np.cos(y),
                lambda x, y: -np.cos(x) * np.sin(y),
            ),
            -0.25: (
                lambda x, y: np.cos(x) * np.sin(y),
                lambda x, y: -np.sin(x) * np.cos(y),
            ),
        }
        for coeff, profiles in layouts.items():
            u = VectorField.from_profiles(torus2, profiles)
            got = pressure_from_velocity(u)
            expected = ScalarField.from_profile(
                torus2, lambda x, y: coeff * (np.cos(2.0 * x) + np.cos(2.0 * y))
            )
            assert (got - expected).max_abs() <= 1e-12

    def test_sign_flip_leaves_pressure_unchanged(self, torus2):
        u = taylor_green(torus2)
        a = pressure_from_velocity(u)
        b = pressure_from_velocity(u * -1.0)
        assert (a - b).max_abs() <= 1e-13

    def test_two_routes_agree(self, torus2):
        rng = np.random.default_rng(31)
        u = leray_project(random_band_limited(torus2, rng, components=2))
        a = pressure_from_velocity(u)
        b = pressure_poisson_reference(u)
        assert (a - b).max_abs() <= 1e-10
        assert abs(a.samples.mean()) <= 1e-12


class TestBoundednessProbe:
    def test_stays_within_budget(self, torus2):
        rng = np.random.default_rng(41)
        fields = [random_band_limited(torus2, rng) for _ in range(20)]
        worst = riesz_boundedness_probe(fields, MixedExponents((3.0, 3.0)))
        assert 0.0 < worst <= 10.0

    def test_rejects_endpoint_exponents(self, torus2):
        f = random_band_limited(torus2, np.random.default_rng(0))
        with pytest.raises(ExponentError):
            riesz_boundedness_probe([f], MixedExponents((1.0, 3.0)))
        with pytest.raises(ExponentError):
            riesz_boundedness_probe([f], MixedExponents((3.0, INF)))


class TestSpectralField:
    def test_round_trip(self, torus3):
        rng = np.random.default_rng(51)
        v = random_band_limited(torus3, rng, components=3)
        back = SpectralField.from_field(v).to_field()
        assert isinstance(back, VectorField)
        assert (back - v).max_abs() <= 1e-12

    def test_conjugate_symmetry_defect_small_for_real_data(self, torus2):
        f = random_band_limited(torus2, np.random.default_rng(52))
        assert SpectralField.from_field(f).conjugate_symmetry_defect() <= 1e-12

    def test_imaginary_residue_detected(self, torus2):
        hat = np.zeros(torus2.numpy_shape, dtype=complex)
        hat[1, 2] = 1.0  # no conjugate partner: inverse transform is complex
        s = SpectralField(torus2, (hat,), False)
        with pytest.raises(FieldError, match="imaginary residue"):
            s.to_field()

    def test_rejects_truncated_grid(self):
        grid = TensorGrid((8, 8), (1.0, 1.0))
        with pytest.raises(GridError):
            SpectralField.from_field(ScalarField.zeros(grid))


class TestRandomBandLimited:
    def test_band_and_normalization(self, torus2):
        rng = np.random.default_rng(61)
        f = random_band_limited(torus2, rng, band=0.25)
        assert f.max_abs() == pytest.approx(1.0)
        assert abs(f.samples.mean()) <= 1e-13
        hat = np.fft.fftn(f.samples)
        j = np.rint(np.fft.fftfreq(64) * 64).astype(int)
        outside = (np.abs(j)[:, None] >= 16) | (np.abs(j)[None, :] >= 16)
        assert np.max(np.abs(hat[outside])) <= 1e-9 * np.max(np.abs(hat))

    def test_rejects_bad_band(self, torus2):
        with pytest.raises(FieldError):
            random_band_limited(torus2, np.random.default_rng(0), band=0.7)

    def test_component_count_checked(self, torus2):
        with pytest.raises(FieldError):
            random_band_limited(torus2, np.random.default_rng(0), components=3)


class TestFftWorkers:
    def test_default_is_one(self, monkeypatch):
        monkeypatch.delenv("MNNS_THREADS", raising=False)
        assert fft_workers() == 1

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("MNNS_THREADS", "4")
        assert fft_workers() == 4

    @pytest.mark.parametrize("value", ["zero", "0", "-2"])
    def test_rejects_bad_values(self, monkeypatch, value):
        monkeypatch.setenv("MNNS_THREADS", value)
        with pytest.raises(FieldError):
            fft_workers()
