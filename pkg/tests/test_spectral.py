import numpy as np
import pytest

from lpmhd.errors import ConfigurationError
from lpmhd.spectral import (
    Grid,
    ScalarField,
    VectorField,
    constant_field,
    dealias,
    divergence,
    gradient,
    invert_laplacian,
    l2_norm,
    l2_norm_spectral,
    mean,
    random_band_limited,
    spectral_derivative,
    sup_norm,
)


class TestGrid:
    @pytest.mark.parametrize("bad_n", [8, 20, 100, 15])
    def test_rejects_non_power_of_two_or_small(self, bad_n):
        with pytest.raises(ConfigurationError):
            Grid(bad_n)

    def test_rejects_bad_length(self):
        with pytest.raises(ConfigurationError):
            Grid(64, length=0.0)

    def test_dealias_mask_symmetric_under_reflection(self, grid64):
        mask = grid64.dealias_mask
        # k -> -k maps index i -> (-i) mod n
        flipped = np.flip(np.roll(np.roll(mask, -1, axis=0), -1, axis=1))
        assert np.array_equal(mask, flipped)

    def test_dealias_mask_cutoff(self, grid64):
        inside = (np.abs(grid64.k1) <= 64 / 3) & (np.abs(grid64.k2) <= 64 / 3)
        assert np.array_equal(grid64.dealias_mask, inside)


class TestScalarField:
    def test_roundtrip(self, grid64, rng):
        f = random_band_limited(grid64, rng)
        back = ScalarField.from_coeffs(grid64, f.coeffs)
        rel = sup_norm(back - f) / sup_norm(f)
        assert rel <= 1e-12

    def test_conjugate_symmetry(self, grid64, rng):
        c = random_band_limited(grid64, rng).coeffs
        flipped = np.conj(np.flip(np.roll(np.roll(c, -1, axis=0), -1, axis=1)))
        assert np.max(np.abs(c - flipped)) <= 1e-12 * np.max(np.abs(c))

    def test_values_read_only(self, grid64):
        f = constant_field(grid64, 1.0)
        with pytest.raises(ValueError):
            f.values[0, 0] = 2.0

    def test_vector_requires_shared_grid(self, grid64):
        other = Grid(64, length=1.0)
        with pytest.raises(ConfigurationError):
            VectorField(constant_field(grid64, 1.0), constant_field(other, 1.0))


class TestDerivative:
    def test_constant_derivative_is_zero(self, grid64):
        df = spectral_derivative(constant_field(grid64, 3.5), axis=1, order=1)
        assert sup_norm(df) == 0.0

    def test_second_derivative_of_sine(self, grid64):
        f = ScalarField.from_values(grid64, np.sin(grid64.x1))
        d2 = spectral_derivative(f, axis=1, order=2)
        assert sup_norm(d2 + f) <= 1e-12

    def test_matches_centered_finite_differences(self):
        # fixed band-limited function sampled on two grids; the spectral
        # derivative is exact, so the FD error itself must shrink like h^2
        modes = [(3, 1, 0.7), (5, -2, -0.4), (1, 7, 0.2)]

        def sample(grid):
            vals = np.zeros((grid.n, grid.n))
            for kx, ky, amp in modes:
                vals += amp * np.cos(kx * grid.x1 + ky * grid.x2)
            return ScalarField.from_values(grid, vals)

        errors = {}
        for n in (64, 128):
            grid = Grid(n)
            f = sample(grid)
            exact = spectral_derivative(f, axis=1, order=1).values
            h = grid.spacing
            fd = (np.roll(f.values, -1, axis=0) - np.roll(f.values, 1, axis=0)) / (2 * h)
            errors[n] = np.max(np.abs(fd - exact))
        ratio = errors[64] / errors[128]
        assert 2.5 <= ratio <= 6.0  # second-order convergence

    @pytest.mark.parametrize("order", [0, 5, -1])
    def test_rejects_out_of_range_order(self, grid64, order):
        f = constant_field(grid64, 1.0)
        with pytest.raises(ConfigurationError):
            spectral_derivative(f, axis=1, order=order)

    def test_rejects_bad_axis(self, grid64):
        with pytest.raises(ConfigurationError):
            spectral_derivative(constant_field(grid64, 1.0), axis=3)


class TestInvertLaplacian:
    def test_single_mode(self, grid64):
        f = ScalarField.from_values(grid64, np.cos(grid64.x1))
        g = invert_laplacian(f)
        assert sup_norm(g + f) <= 1e-12  # -cos(x1) under the -1/|k|^2 convention

    def test_constant_maps_to_zero(self, grid64):
        assert sup_norm(invert_laplacian(constant_field(grid64, 4.2))) == 0.0

    def test_roundtrip_against_laplacian(self, grid64, rng):
        f = random_band_limited(grid64, rng)
        g = invert_laplacian(f)
        lap = spectral_derivative(g, 1, 2) + spectral_derivative(g, 2, 2)
        assert sup_norm(lap - f) <= 1e-10
        assert abs(mean(g)) <= 1e-14


class TestDealias:
    def test_band_limited_unchanged(self, grid64, rng):
        f = random_band_limited(grid64, rng, kmax=10.0)
        assert sup_norm(dealias(f) - f) <= 1e-13

    def test_mode_above_cutoff_removed(self, grid64):
        f = ScalarField.from_values(grid64, np.cos((64 // 2 - 1) * grid64.x1))
        assert sup_norm(dealias(f)) <= 1e-13

    def test_idempotent(self, grid64, rng):
        f = ScalarField.from_values(grid64, rng.standard_normal((64, 64)))
        once = dealias(f)
        twice = dealias(once)
        assert sup_norm(twice - once) == 0.0


class TestNormsAndProperties:
    def test_parseval(self, grid64, rng):
        f = random_band_limited(grid64, rng)
        a, b = l2_norm(f), l2_norm_spectral(f)
        assert abs(a - b) / a <= 1e-12

    def test_multiplier_operations_commute(self, grid64, rng):
        f = random_band_limited(grid64, rng, kmax=10.0)
        pairs = [
            (lambda g: spectral_derivative(dealias(g), 1),
             lambda g: dealias(spectral_derivative(g, 1))),
            (lambda g: invert_laplacian(spectral_derivative(g, 2)),
             lambda g: spectral_derivative(invert_laplacian(g), 2)),
            (lambda g: spectral_derivative(spectral_derivative(g, 1), 2),
             lambda g: spectral_derivative(spectral_derivative(g, 2), 1)),
        ]
        for left, right in pairs:
            assert sup_norm(left(f) - right(f)) <= 1e-12

    def test_divergence_of_gradient_rotation(self, grid64, rng):
        # perpendicular gradient fields are exactly solenoidal
        g = random_band_limited(grid64, rng)
        v = VectorField(-spectral_derivative(g, 2), spectral_derivative(g, 1))
        assert sup_norm(divergence(v)) <= 1e-11

    def test_gradient_components(self, grid64):
        f = ScalarField.from_values(grid64, np.sin(grid64.x1 + 2 * grid64.x2))
        gf = gradient(f)
        expected1 = np.cos(grid64.x1 + 2 * grid64.x2)
        assert np.max(np.abs(gf.c1.values - expected1)) <= 1e-12
        assert np.max(np.abs(gf.c2.values - 2 * expected1)) <= 1e-12
