import math

import numpy as np
import pytest

from lpmhd.diagnostics import (
    DiagnosticsRecord,
    Trajectory,
    continuation_integral_b2d,
    continuation_integral_elsasser,
    continuation_integral_lipschitz,
    continuation_integral_u,
    delta_elsasser,
    euler_growth_bound,
    fit_euler_growth_constant,
    lifespan_bound_new,
    lifespan_bound_old,
    measure_state,
    t_star_empirical,
    tail_fraction,
)
from lpmhd.dynamics import MHDState, SimConfig, run_simulation
from lpmhd.errors import ConfigurationError, DiagnosticError
from lpmhd.littlewood_paley import build_partition
from lpmhd.paracalculus import random_solenoidal
from lpmhd.spectral import Grid, VectorField


def synthetic_trajectory(times, **series):
    """Trajectory with prescribed norm series, everything else zero."""
    traj = Trajectory(system="mhd", n=32, length=2 * np.pi)
    for i, t in enumerate(times):
        values = {name: vals[i] for name, vals in series.items()}
        rec = DiagnosticsRecord(
            t=float(t), energy=values.get("energy", 1.0),
            grad_u_sup=values.get("grad_u_sup", 0.0),
            grad2_u_sup=values.get("grad2_u_sup", 0.0),
            b_sup=0.0, grad_b_sup=values.get("grad_b_sup", 0.0),
            omega_plus_j=values.get("omega_plus_j", 0.0),
            omega_minus_j=values.get("omega_minus_j", 0.0),
            current_b1=values.get("current_b1", 0.0),
            tail_fraction=0.0,
        )
        traj.append(rec)
    return traj


class TestCriterionIntegrals:
    def test_zero_trajectory(self):
        times = np.linspace(0.0, 1.0, 11)
        traj = synthetic_trajectory(times)
        assert continuation_integral_u(traj)[-1] == 0.0
        assert continuation_integral_lipschitz(traj)[-1] == 0.0
        assert continuation_integral_b2d(traj)[-1] == 0.0

    def test_constant_integrand(self):
        times = np.linspace(0.0, 2.0, 21)
        c = 1.7
        traj = synthetic_trajectory(
            times,
            grad2_u_sup=np.full(21, c),
            grad_u_sup=np.full(21, c),
            grad_b_sup=np.full(21, c),
            omega_plus_j=np.full(21, c),
            current_b1=np.full(21, c),
        )
        assert continuation_integral_u(traj)[-1] == pytest.approx(2.0 * c)
        assert continuation_integral_lipschitz(traj)[-1] == pytest.approx(4.0 * c)
        assert continuation_integral_elsasser(traj, +1)[-1] == pytest.approx(2.0 * c)
        assert continuation_integral_b2d(traj)[-1] == pytest.approx(2.0 * c * c)

    def test_nondecreasing_and_additive(self):
        rng = np.random.default_rng(0)
        times = np.linspace(0.0, 1.0, 41)
        vals = rng.random(41)
        traj = synthetic_trajectory(times, grad2_u_sup=vals)
        series = continuation_integral_u(traj)
        assert np.all(np.diff(series) >= 0)
        # additivity over adjacent intervals is quadrature-exact
        mid = 20
        left = synthetic_trajectory(times[: mid + 1], grad2_u_sup=vals[: mid + 1])
        right = synthetic_trajectory(times[mid:], grad2_u_sup=vals[mid:])
        total = continuation_integral_u(left)[-1] + continuation_integral_u(right)[-1]
        assert total == pytest.approx(series[-1], rel=1e-12)

    def test_sign_argument_validated(self):
        traj = synthetic_trajectory(np.linspace(0, 1, 3))
        with pytest.raises(ConfigurationError):
            continuation_integral_elsasser(traj, 2)

    def test_refinement_agreement_on_run(self):
        coarse_cfg = SimConfig(n=64, dt=1e-3, t_end=0.2, cadence=0.04,
                               profile="orszag_tang", epsilon=0.1, seed=0)
        fine_cfg = SimConfig(n=64, dt=1e-3, t_end=0.2, cadence=0.004,
                             profile="orszag_tang", epsilon=0.1, seed=0)
        coarse = run_simulation(coarse_cfg, "mhd")
        fine = run_simulation(fine_cfg, "mhd")
        for integral in (continuation_integral_u, continuation_integral_lipschitz,
                         continuation_integral_b2d):
            a, b = integral(coarse)[-1], integral(fine)[-1]
            assert abs(a - b) <= 0.01 * max(abs(b), 1e-30)

    def test_elsasser_signs_cobounded_on_smooth_run(self):
        cfg = SimConfig(n=64, dt=1e-3, t_end=0.2, cadence=0.02,
                        profile="orszag_tang", epsilon=0.1, seed=0)
        traj = run_simulation(cfg, "mhd")
        plus = continuation_integral_elsasser(traj, +1)[-1]
        minus = continuation_integral_elsasser(traj, -1)[-1]
        assert plus / minus <= 10.0 and minus / plus <= 10.0

    def test_aligned_state_signs(self, grid64, part64, rng):
        # u = b: the beta carrier vanishes, so omega - j == 0 pointwise
        u = random_solenoidal(grid64, rng, kmax=8.0)
        records = []
        for t in (0.0, 0.1, 0.2):
            records.append(measure_state(grid64, part64, t, u, u))
        traj = Trajectory(system="mhd", n=64, length=grid64.length)
        for r in records:
            traj.append(r)
        assert continuation_integral_elsasser(traj, -1)[-1] <= 1e-12
        plus = continuation_integral_elsasser(traj, +1)[-1]
        assert plus == pytest.approx(0.2 * records[0].omega_plus_j, rel=1e-12)


class TestLifespanBounds:
    def test_unit_inputs_value(self):
        est = lifespan_bound_new(1.0, 1.0, 1.0)
        assert abs(est.bound - 0.4231) <= 1e-3
        assert est.bound == pytest.approx(0.42303585716440205, rel=1e-12)

    def test_old_bound_same_nested_form(self):
        est = lifespan_bound_old(1.0, 1.0, 1.0, 1.0)
        assert est.bound == pytest.approx(0.42303585716440205, rel=1e-12)

    def test_large_magnetic_norm_kills_bound(self):
        assert lifespan_bound_new(1.0, 1e12, 1.0).bound <= 1e-10

    def test_strictly_decreasing_in_magnetic_norm(self):
        bounds = [lifespan_bound_new(1.0, b, 1.0).bound
                  for b in np.logspace(-6, 2, 17)]
        assert all(x > y for x, y in zip(bounds, bounds[1:]))

    def test_halving_magnetic_norm_increases_bound(self):
        assert lifespan_bound_new(2.0, 0.05, 1.0).bound > lifespan_bound_new(
            2.0, 0.1, 1.0).bound

    def test_zero_magnetic_norm_returns_infinity(self):
        assert math.isinf(lifespan_bound_new(1.0, 0.0, 1.0).bound)
        assert math.isinf(lifespan_bound_old(1.0, 1.0, 0.0, 1.0).bound)

    def test_old_bound_grows_as_b_vanishes(self):
        values = [lifespan_bound_old(2.0, 2.0, b, 1.0).bound
                  for b in (1e-1, 1e-4, 1e-8)]
        assert values[0] < values[1] < values[2]

    def test_prefactor_scaling(self):
        # at a fixed ratio the bound scales inversely with the velocity norm
        a = lifespan_bound_new(1.0, 0.1, 1.0).bound
        b = lifespan_bound_new(2.0, 0.2, 1.0).bound
        assert b == pytest.approx(a / 2.0, rel=1e-12)

    def test_comparison_report_new_vs_old(self):
        # tabulated comparison; the ordering depends on the norms, so this
        # only checks both evaluate finitely on a grid
        for b0 in (1e-3, 1e-2, 1e-1):
            new = lifespan_bound_new(3.0, b0, 1.0).bound
            old = lifespan_bound_old(3.0 + b0, 2.0 + b0, b0, 1.0).bound
            assert math.isfinite(new) and math.isfinite(old)

    def test_input_validation(self):
        with pytest.raises(ConfigurationError):
            lifespan_bound_new(0.0, 1.0, 1.0)
        with pytest.raises(ConfigurationError):
            lifespan_bound_new(1.0, 1.0, -1.0)


class TestEulerGrowthBound:
    def test_zero_time(self):
        assert euler_growth_bound(2.0, 0.0, 3.0) == pytest.approx(6.0)

    def test_monotone_in_each_argument(self):
        base = euler_growth_bound(1.0, 1.0, 1.0)
        assert euler_growth_bound(2.0, 1.0, 1.0) > base
        assert euler_growth_bound(1.0, 2.0, 1.0) > base
        assert euler_growth_bound(1.0, 1.0, 2.0) > base

    def test_overflow_maps_to_infinity(self):
        assert math.isinf(euler_growth_bound(10.0, 100.0, 10.0))

    def test_fit_on_synthetic_series(self):
        times = np.linspace(0.0, 0.5, 11)
        v0 = 2.0
        target = 1.3
        measured = np.array([0.98 * euler_growth_bound(v0, t, target) for t in times])
        fitted = fit_euler_growth_constant(times, measured, v0)
        assert fitted <= target + 1e-6
        assert all(euler_growth_bound(v0, t, fitted) >= m
                   for t, m in zip(times, measured))

    def test_fit_failure_reported(self):
        times = np.array([0.0, 0.1])
        measured = np.array([1.0, 1e300])
        with pytest.raises(DiagnosticError):
            fit_euler_growth_constant(times, measured, 1.0, c_max=2.0)


class TestTStar:
    def test_zero_series_censored(self):
        times = np.linspace(0.0, 3.0, 7)
        res = t_star_empirical(times, np.zeros(7), 1.0)
        assert res.censored and res.t_star == 3.0

    def test_constant_series_closed_form(self):
        e0 = 0.4
        times = np.linspace(0.0, 10.0, 2001)
        res = t_star_empirical(times, np.full(2001, e0), e0)
        assert not res.censored
        assert res.t_star == pytest.approx(1.0 / e0, abs=1e-9)

    def test_exponential_series_oracle(self):
        a, c, e0 = 0.3, 1.7, 0.9
        times = np.linspace(0.0, 4.0, 4001)
        res = t_star_empirical(times, a * np.exp(c * times), e0)
        exact = math.log(1.0 + 2.0 * c * e0 / a**2) / (2.0 * c)
        assert abs(res.t_star - exact) <= 1e-3

    def test_monotone_in_series(self):
        times = np.linspace(0.0, 5.0, 501)
        small = 0.3 + 0.1 * times
        large = small * 1.5
        t_small = t_star_empirical(times, small, 0.5).t_star
        t_large = t_star_empirical(times, large, 0.5).t_star
        assert t_large <= t_small

    def test_empty_series_rejected(self):
        with pytest.raises(DiagnosticError):
            t_star_empirical(np.array([]), np.array([]), 1.0)


@pytest.fixture(scope="module")
def runs():
    cfg = SimConfig(n=64, dt=2e-3, t_end=0.2, cadence=0.02,
                    profile="orszag_tang", epsilon=0.05, seed=0)
    euler = run_simulation(cfg, "euler", with_snapshots=True)
    mhd = run_simulation(cfg, "mhd", reference=euler, with_snapshots=True)
    return cfg, euler, mhd


class TestDeltaElsasser:
    def test_initial_value_two_ways(self, runs):
        cfg, euler, mhd = runs
        # E(0) from the difference fields vs twice the magnetic norm
        assert mhd.records[0].delta_norm == pytest.approx(2 * cfg.epsilon, abs=1e-10)

    def test_zero_epsilon_series_stays_small(self):
        cfg = SimConfig(n=64, dt=2e-3, t_end=0.2, cadence=0.02,
                        profile="orszag_tang", epsilon=0.0, seed=0)
        euler = run_simulation(cfg, "euler", with_snapshots=True)
        mhd = run_simulation(cfg, "mhd", reference=euler)
        assert max(r.delta_norm for r in mhd.records) <= 1e-6

    def test_offline_series_matches_inline(self, runs):
        cfg, euler, mhd = runs
        grid = Grid(cfg.n, cfg.length)
        part = build_partition(grid)
        times, series = delta_elsasser(mhd, euler, part, grid)
        inline = mhd.series("delta_norm")
        np.testing.assert_allclose(series, inline, rtol=1e-12, atol=1e-14)

    def test_interpolation_on_misaligned_grids(self, runs):
        cfg, euler, mhd = runs
        coarse_cfg = SimConfig(n=64, dt=2e-3, t_end=0.2, cadence=0.04,
                               profile="orszag_tang", epsilon=0.05, seed=0)
        coarse_euler = run_simulation(coarse_cfg, "euler", with_snapshots=True)
        grid = Grid(cfg.n, cfg.length)
        part = build_partition(grid)
        _, series_fine_ref = delta_elsasser(mhd, euler, part, grid)
        _, series_coarse_ref = delta_elsasser(mhd, coarse_euler, part, grid)
        # linear interpolation of the reference changes E only mildly
        np.testing.assert_allclose(series_coarse_ref, series_fine_ref, rtol=5e-2,
                                   atol=1e-8)


class TestTailFraction:
    def test_smooth_field_negligible(self, grid64, rng):
        u = random_solenoidal(grid64, rng, kmax=5.0)
        assert tail_fraction(grid64, u) <= 1e-12

    def test_edge_field_large(self, grid64, rng):
        u = random_solenoidal(grid64, rng, kmin=18.0, kmax=grid64.n / 3.0)
        assert tail_fraction(grid64, u) > 0.5
