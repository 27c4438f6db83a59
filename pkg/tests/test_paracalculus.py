import numpy as np
import pytest

from lpmhd.errors import ConfigurationError, PreconditionError
from lpmhd.littlewood_paley import build_partition
from lpmhd.paracalculus import (
    HomogeneousSymbol,
    advect_vector,
    biot_savart,
    bony_reconstruct,
    commutator_block,
    commutator_block_ratio,
    commutator_leray,
    commutator_leray_ratio,
    commutator_para_multiplier,
    commutator_para_multiplier_ratio,
    curl2d,
    leray_project,
    paraproduct,
    paraproduct_bound_ratio,
    projected_advection_ratio,
    random_solenoidal,
    remainder,
)
from lpmhd.spectral import (
    Grid,
    ScalarField,
    VectorField,
    constant_field,
    dealias,
    divergence,
    gradient,
    random_band_limited,
    sup_norm,
)


def random_vector(grid, rng):
    return VectorField(random_band_limited(grid, rng), random_band_limited(grid, rng))


class TestLeray:
    def test_annihilates_gradients(self, grid64, rng):
        g = random_band_limited(grid64, rng)
        out = leray_project(gradient(g))
        assert sup_norm(out.c1) <= 1e-12  # zero-mean input: nothing survives
        assert sup_norm(out.c2) <= 1e-12

    def test_fixes_solenoidal_fields(self, grid64, rng):
        v = random_solenoidal(grid64, rng)
        pv = leray_project(v)
        assert max(sup_norm(pv.c1 - v.c1), sup_norm(pv.c2 - v.c2)) <= 1e-12

    def test_output_divergence_and_idempotency(self, grid64, rng):
        f = random_vector(grid64, rng)
        pf = leray_project(f)
        assert sup_norm(divergence(pf)) <= 1e-10
        ppf = leray_project(pf)
        assert max(sup_norm(ppf.c1 - pf.c1), sup_norm(ppf.c2 - pf.c2)) <= 1e-12

    def test_mean_mode_unchanged(self, grid64):
        f = VectorField(constant_field(grid64, 2.0), constant_field(grid64, -1.0))
        pf = leray_project(f)
        assert sup_norm(pf.c1 - f.c1) == 0.0
        assert sup_norm(pf.c2 - f.c2) == 0.0


class TestCurlAndBiotSavart:
    def test_curl_of_gradient_vanishes(self, grid64, rng):
        g = random_band_limited(grid64, rng)
        assert sup_norm(curl2d(gradient(g))) <= 1e-12

    def test_analytic_shear(self, grid64):
        zero = np.zeros((64, 64))
        f = VectorField.from_values(grid64, -np.sin(grid64.x2), zero)
        expected = ScalarField.from_values(grid64, np.cos(grid64.x2))
        assert sup_norm(curl2d(f) - expected) <= 1e-12

    def test_zero_vorticity(self, grid64):
        v = biot_savart(constant_field(grid64, 0.0))
        assert sup_norm(v.c1) == 0.0 and sup_norm(v.c2) == 0.0

    def test_single_mode_stream(self, grid64):
        omega = ScalarField.from_values(grid64, np.cos(grid64.x1))
        v = biot_savart(omega)
        assert sup_norm(v.c1) <= 1e-13
        expected = ScalarField.from_values(grid64, np.sin(grid64.x1))
        assert sup_norm(v.c2 - expected) <= 1e-12
        assert sup_norm(curl2d(v) - omega) <= 1e-12

    def test_inversion_on_random_fields(self, grid64, rng):
        for _ in range(5):
            omega = random_band_limited(grid64, rng)
            v = biot_savart(omega)
            assert sup_norm(curl2d(v) - omega) <= 1e-10
            assert sup_norm(divergence(v)) <= 1e-10


class TestBony:
    def test_constant_pair(self, grid64, part64):
        u = constant_field(grid64, 2.0)
        v = constant_field(grid64, -3.0)
        assert bony_reconstruct(u, v, part64) <= 1e-14

    def test_constant_times_field_reconstructs(self, grid64, part64, rng):
        c = constant_field(grid64, 2.5)
        v = dealias(random_band_limited(grid64, rng))
        assert bony_reconstruct(c, v, part64) <= 1e-12

    def test_low_high_pair(self, grid64, part64):
        u = ScalarField.from_values(grid64, np.cos(grid64.x1))
        v = ScalarField.from_values(grid64, np.cos(8.0 * grid64.x1))
        assert bony_reconstruct(u, v, part64) <= 1e-10
        # the paraproduct with low-frequency u carries most of the product
        tu = paraproduct(u, v, part64)
        assert sup_norm(tu) > 0.1

    def test_analytic_pair(self, grid64, part64):
        u = ScalarField.from_values(grid64, np.cos(3 * grid64.x1 + grid64.x2))
        v = ScalarField.from_values(grid64, np.sin(5 * grid64.x2))
        assert bony_reconstruct(u, v, part64) <= 1e-10

    def test_random_pairs(self, grid64, part64, rng):
        worst = 0.0
        for _ in range(10):
            u = dealias(random_band_limited(grid64, rng))
            v = dealias(random_band_limited(grid64, rng))
            worst = max(worst, bony_reconstruct(u, v, part64))
        assert worst <= 1e-10

    def test_remainder_symmetric(self, grid64, part64, rng):
        u = dealias(random_band_limited(grid64, rng))
        v = dealias(random_band_limited(grid64, rng))
        assert sup_norm(remainder(u, v, part64) - remainder(v, u, part64)) <= 1e-12

    def test_paraproduct_grid_mismatch(self, grid64, part64, rng):
        other = Grid(64, length=1.0)
        u = random_band_limited(grid64, rng)
        v = random_band_limited(other, rng)
        with pytest.raises(ConfigurationError):
            paraproduct(u, v, part64)

    def test_paraproduct_continuity_constant_stable(self, part64, part128, rng):
        constants = {}
        for part in (part64, part128):
            grid = part.grid
            local = np.random.default_rng(9)
            worst = 0.0
            for _ in range(10):
                u = dealias(random_band_limited(grid, local))
                v = dealias(random_band_limited(grid, local))
                worst = max(worst, paraproduct_bound_ratio(u, v, part))
            constants[grid.n] = worst
        assert constants[128] <= 1.5 * constants[64]


class TestCommutators:
    def test_block_commutator_constant_velocity(self, grid64, part64, rng):
        v = VectorField(constant_field(grid64, 1.0), constant_field(grid64, -2.0))
        f = dealias(random_band_limited(grid64, rng))
        assert sup_norm(commutator_block(v, f, 3, part64)) <= 1e-12

    def test_block_commutator_requires_solenoidal(self, grid64, part64, rng):
        v = random_vector(grid64, rng)  # generic field, not divergence-free
        f = random_band_limited(grid64, rng)
        with pytest.raises(PreconditionError):
            commutator_block(v, f, 2, part64)

    def test_block_commutator_ratio_finite(self, grid64, part64, rng):
        v = random_solenoidal(grid64, rng)
        f = dealias(random_band_limited(grid64, rng))
        ratio = commutator_block_ratio(v, f, part64)
        assert 0.0 < ratio < 100.0

    def test_multiplier_commutator_identity_symbol(self, grid64, part64, rng):
        v = random_solenoidal(grid64, rng)
        f = dealias(random_band_limited(grid64, rng))
        out = commutator_para_multiplier(v, f, HomogeneousSymbol("identity"), part64)
        assert sup_norm(out) <= 1e-12

    def test_multiplier_commutator_constant_velocity(self, grid64, part64, rng):
        v = VectorField(constant_field(grid64, 0.7), constant_field(grid64, 0.3))
        f = dealias(random_band_limited(grid64, rng))
        sym = HomogeneousSymbol("riesz", 0, (1, 2))
        assert sup_norm(commutator_para_multiplier(v, f, sym, part64)) <= 1e-12

    def test_unknown_symbol_rejected(self, grid64):
        with pytest.raises(ConfigurationError):
            HomogeneousSymbol("hilbert").tabulate(grid64)

    def test_multiplier_commutator_ratio_finite(self, grid64, part64, rng):
        v = random_solenoidal(grid64, rng)
        f = dealias(random_band_limited(grid64, rng))
        for sym in (HomogeneousSymbol("riesz", 0, (1, 1)),
                    HomogeneousSymbol("abs_power", 1)):
            ratio = commutator_para_multiplier_ratio(v, f, sym, part64)
            assert 0.0 < ratio < 100.0

    def test_leray_commutator_constant_field(self, grid64, part64, rng):
        f = VectorField(constant_field(grid64, 1.0), constant_field(grid64, 2.0))
        g = random_solenoidal(grid64, rng)
        out = commutator_leray(f, g)
        assert max(sup_norm(out.c1), sup_norm(out.c2)) <= 1e-11

    def test_leray_commutator_requires_solenoidal(self, grid64, rng):
        f = random_vector(grid64, rng)
        g = random_solenoidal(grid64, rng)
        with pytest.raises(PreconditionError):
            commutator_leray(f, g)

    def test_leray_commutator_ratio_growth(self, part64, part128):
        constants = {}
        for part in (part64, part128):
            grid = part.grid
            local = np.random.default_rng(21)
            worst_comm = worst_adv = 0.0
            for _ in range(10):
                f = random_solenoidal(grid, local)
                g = random_solenoidal(grid, local)
                worst_comm = max(worst_comm, commutator_leray_ratio(f, g, part))
                worst_adv = max(worst_adv, projected_advection_ratio(f, g, part))
            constants[grid.n] = (worst_comm, worst_adv)
        for i in range(2):
            assert constants[128][i] <= 1.5 * constants[64][i]

    def test_projected_advection_matches_decomposition(self, grid64, rng):
        # P(f.grad)v = (f.grad)v - [f.grad, P]v for solenoidal f, v
        f = random_solenoidal(grid64, rng)
        v = random_solenoidal(grid64, rng)
        direct = leray_project(advect_vector(f, v))
        adv = advect_vector(f, v)
        comm = commutator_leray(f, v)
        recombined = adv - comm
        assert max(sup_norm(direct.c1 - recombined.c1),
                   sup_norm(direct.c2 - recombined.c2)) <= 1e-11
