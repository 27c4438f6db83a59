"""Property suite behind ``lpmhd verify``.

Each check exercises one operator identity or estimate over a seeded random
suite and reports a named pass/fail row with the measured statistic.  Exact
identities assert tight tolerances; continuity/commutator estimates report
their observed constants and, at the full level, check stability of those
constants when the resolution doubles.

``fast`` runs everything at n = 64 with short integrations; ``full`` uses
n = 128, the complete sample counts, and unit-time integrations.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from . import paracalculus as pc
from .diagnostics import lifespan_bound_new, t_star_empirical
from .dynamics import (
    MHDState,
    SimConfig,
    make_initial_data,
    rk4_step,
    run_simulation,
)
from .errors import ConfigurationError
from .littlewood_paley import (
    INF,
    bernstein_ratio,
    build_partition,
    dyadic_block,
)
from .spectral import (
    Grid,
    VectorField,
    dealias,
    divergence,
    gradient,
    random_band_limited,
    sup_norm,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    statistic: float
    threshold: float
    detail: str = ""

    def row(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return (f"{status:4s}  {self.name:34s} stat={self.statistic:11.4e}  "
                f"limit={self.threshold:9.3e}  {self.detail}")


@dataclass
class Ops:
    """Injectable operator table; tests swap members to exercise failures."""

    leray_project: callable = pc.leray_project
    biot_savart: callable = pc.biot_savart
    curl2d: callable = pc.curl2d


@dataclass
class _Setup:
    level: str
    n: int
    samples: int
    pairs: int
    steps: int
    run_n: int
    run_t: float
    run_dt: float


def _setup(level: str) -> _Setup:
    if level == "fast":
        return _Setup(level, n=64, samples=8, pairs=10, steps=200,
                      run_n=64, run_t=0.25, run_dt=2e-3)
    if level == "full":
        return _Setup(level, n=128, samples=20, pairs=50, steps=1000,
                      run_n=128, run_t=1.0, run_dt=1e-3)
    raise ConfigurationError(f"verify level must be 'fast' or 'full', got {level!r}")


def _max_sup(v: VectorField) -> float:
    return max(sup_norm(v.c1), sup_norm(v.c2))


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------

def check_partition_of_unity(s: _Setup, ops: Ops) -> CheckResult:
    grid = Grid(128)
    t0 = time.perf_counter()
    part = build_partition(grid)
    residual = float(np.max(np.abs(part.chi + part.phi.sum(axis=0) - 1.0)))
    elapsed = time.perf_counter() - t0
    return CheckResult("partition-of-unity", residual <= 1e-12 and elapsed < 1.0,
                       residual, 1e-12, f"n=128, {elapsed * 1e3:.0f} ms")


def check_lp_reconstruction(s: _Setup, ops: Ops) -> CheckResult:
    grid = Grid(s.n)
    part = build_partition(grid)
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(20):
        f = random_band_limited(grid, rng)
        total = sum((dyadic_block(f, j, part) for j in range(0, part.j_max + 1)),
                    start=dyadic_block(f, -1, part))
        worst = max(worst, sup_norm(total - f))
    return CheckResult("lp-reconstruction", worst <= 1e-12, worst, 1e-12,
                       f"20 fields, n={s.n}")


def check_block_orthogonality(s: _Setup, ops: Ops) -> CheckResult:
    grid = Grid(s.n)
    part = build_partition(grid)
    rng = np.random.default_rng(12)
    f = random_band_limited(grid, rng)
    worst = 0.0
    for j in range(-1, part.j_max + 1):
        for k in range(j + 2, part.j_max + 1):
            worst = max(worst, sup_norm(dyadic_block(dyadic_block(f, j, part), k, part)))
    return CheckResult("block-orthogonality", worst <= 1e-12, worst, 1e-12,
                       "|j-k| >= 2 pairs")


def check_bernstein(s: _Setup, ops: Ops) -> CheckResult:
    grid = Grid(s.n)
    part = build_partition(grid)
    constants = []
    for j in range(2, part.j_max - 1):
        rep = bernstein_ratio(part, j, INF, INF, sample_count=s.samples,
                              rng=np.random.default_rng(100 + j))
        constants.append(rep.constant)
    cmax, cmin = max(constants), min(constants)
    passed = cmax <= 8.0 and cmax / cmin <= 2.0
    return CheckResult("bernstein-gradient-ratio", passed, cmax, 8.0,
                       f"j=2..{part.j_max - 2}, spread {cmax / cmin:.2f}x")


def check_bony_identity(s: _Setup, ops: Ops) -> CheckResult:
    grid = Grid(s.n)
    part = build_partition(grid)
    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(s.pairs):
        u = dealias(random_band_limited(grid, rng))
        v = dealias(random_band_limited(grid, rng))
        worst = max(worst, pc.bony_reconstruct(u, v, part))
    return CheckResult("bony-identity", worst <= 1e-10, worst, 1e-10,
                       f"{s.pairs} pairs, n={s.n}")


def _random_pair(grid, rng):
    return (pc.random_solenoidal(grid, rng), pc.random_solenoidal(grid, rng))


def check_leray_idempotent(s: _Setup, ops: Ops) -> CheckResult:
    grid = Grid(s.n)
    rng = np.random.default_rng(14)
    worst = 0.0
    for _ in range(s.samples):
        f = VectorField(random_band_limited(grid, rng), random_band_limited(grid, rng))
        pf = ops.leray_project(f)
        worst = max(worst, _max_sup(ops.leray_project(pf) - pf))
    return CheckResult("leray-idempotency", worst <= 1e-12, worst, 1e-12)


def check_leray_divergence(s: _Setup, ops: Ops) -> CheckResult:
    grid = Grid(s.n)
    rng = np.random.default_rng(15)
    worst = 0.0
    for _ in range(s.samples):
        f = VectorField(random_band_limited(grid, rng), random_band_limited(grid, rng))
        worst = max(worst, sup_norm(divergence(ops.leray_project(f))))
    return CheckResult("leray-solenoidal-output", worst <= 1e-10, worst, 1e-10)


def check_leray_gradients(s: _Setup, ops: Ops) -> CheckResult:
    grid = Grid(s.n)
    rng = np.random.default_rng(16)
    worst = 0.0
    for _ in range(s.samples):
        g = random_band_limited(grid, rng)
        projected = ops.leray_project(gradient(g))
        c1 = np.array(projected.c1.coeffs, copy=True)
        c1[0, 0] = 0.0  # mean mode passes through by convention
        worst = max(worst, float(np.max(np.abs(np.fft.ifft2(c1).real))),
                    sup_norm(projected.c2))
    return CheckResult("leray-annihilates-gradients", worst <= 1e-12, worst, 1e-12)


def check_biot_savart(s: _Setup, ops: Ops) -> CheckResult:
    grid = Grid(s.n)
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(s.samples):
        omega = random_band_limited(grid, rng)
        v = ops.biot_savart(omega)
        worst = max(worst, sup_norm(ops.curl2d(v) - omega),
                    sup_norm(divergence(v)))
    return CheckResult("biot-savart-inverse", worst <= 1e-10, worst, 1e-10)


def _estimate_constants(n: int, samples: int):
    """Observed constants of the four commutator/continuity estimates."""
    grid = Grid(n)
    part = build_partition(grid)
    rng = np.random.default_rng(18)
    out = {"paraproduct": 0.0, "block-commutator": 0.0,
           "multiplier-commutator": 0.0, "leray-commutator": 0.0,
           "projected-advection": 0.0}
    symbol = pc.HomogeneousSymbol("riesz", 0, (1, 2))
    for _ in range(samples):
        u = dealias(random_band_limited(grid, rng))
        w = dealias(random_band_limited(grid, rng))
        v = pc.random_solenoidal(grid, rng)
        g = pc.random_solenoidal(grid, rng)
        out["paraproduct"] = max(out["paraproduct"], pc.paraproduct_bound_ratio(u, w, part))
        out["block-commutator"] = max(out["block-commutator"],
                                      pc.commutator_block_ratio(v, u, part))
        out["multiplier-commutator"] = max(
            out["multiplier-commutator"],
            pc.commutator_para_multiplier_ratio(v, u, symbol, part))
        out["leray-commutator"] = max(out["leray-commutator"],
                                      pc.commutator_leray_ratio(v, g, part))
        out["projected-advection"] = max(out["projected-advection"],
                                         pc.projected_advection_ratio(v, g, part))
    return out


def check_estimate_stability(s: _Setup, ops: Ops) -> list[CheckResult]:
    samples = s.samples
    coarse = _estimate_constants(64, samples)
    fine = _estimate_constants(128, samples) if s.level == "full" else None
    results = []
    for name, c64 in coarse.items():
        if fine is None:
            ok = math.isfinite(c64) and c64 > 0
            results.append(CheckResult(f"estimate-{name}", ok, c64, math.inf,
                                       "n=64 constant finite"))
        else:
            growth = fine[name] / c64
            ok = math.isfinite(fine[name]) and growth <= 1.5
            results.append(CheckResult(f"estimate-{name}", ok, fine[name], 1.5,
                                       f"growth x{growth:.3f} from n=64 to n=128"))
    return results


def _drift_after_steps(state: MHDState, steps: int, dt: float) -> float:
    current = state
    for _ in range(steps):
        current = rk4_step(current, dt)
    return max(_max_sup(current.u - state.u), _max_sup(current.b - state.b))


def check_steady_states(s: _Setup, ops: Ops) -> list[CheckResult]:
    grid = Grid(64)
    part = build_partition(grid)
    cfg = SimConfig(n=64, dt=1e-3, t_end=1.0, profile="orszag_tang", epsilon=0.1)
    u, _ = make_initial_data(cfg, grid, part)
    alfven = MHDState(u=u, b=u, t=0.0)
    drift_a = _drift_after_steps(alfven, s.steps, 1e-3)
    shear_cfg = replace(cfg, profile="shear", epsilon=0.0)
    us, bs = make_initial_data(shear_cfg, grid, part)
    shear = MHDState(u=us, b=bs, t=0.0)
    drift_s = _drift_after_steps(shear, s.steps, 1e-3)
    return [
        CheckResult("alfven-steady-state", drift_a <= 1e-8, drift_a, 1e-8,
                    f"{s.steps} steps"),
        CheckResult("shear-steady-state", drift_s <= 1e-8, drift_s, 1e-8,
                    f"{s.steps} steps"),
    ]


def _reference_config(s: _Setup, **overrides) -> SimConfig:
    base = dict(n=s.run_n, dt=s.run_dt, t_end=s.run_t, cadence=10 * s.run_dt,
                profile="orszag_tang", epsilon=0.1, seed=0)
    base.update(overrides)
    return SimConfig(**base)


def check_energy_conservation(s: _Setup, ops: Ops) -> CheckResult:
    traj = run_simulation(_reference_config(s), "mhd")
    e = traj.series("energy")
    drift = float(np.max(np.abs(e - e[0])) / e[0])
    return CheckResult("energy-conservation", drift <= 1e-6, drift, 1e-6,
                       f"n={s.run_n}, t={s.run_t}, dt={s.run_dt}")


def check_formulation_equivalence(s: _Setup, ops: Ops) -> CheckResult:
    cfg = _reference_config(s)
    t1 = run_simulation(cfg, "mhd", with_snapshots=True)
    t2 = run_simulation(cfg, "elsasser", with_snapshots=True)
    s1, s2 = t1.snapshots[-1], t2.snapshots[-1]
    diff = max(float(np.max(np.abs(s1[k] - s2[k]))) for k in ("u1", "u2", "b1", "b2"))
    return CheckResult("formulation-equivalence", diff <= 1e-6, diff, 1e-6,
                       f"t={s.run_t}")


def check_euler_reduction(s: _Setup, ops: Ops) -> CheckResult:
    cfg = _reference_config(s, epsilon=0.0)
    tm = run_simulation(cfg, "mhd", with_snapshots=True)
    tv = run_simulation(cfg, "euler", with_snapshots=True)
    sm, sv = tm.snapshots[-1], tv.snapshots[-1]
    diff = max(float(np.max(np.abs(sm["u1"] - sv["v1"]))),
               float(np.max(np.abs(sm["u2"] - sv["v2"]))),
               float(np.max(np.abs(sm["b1"]))), float(np.max(np.abs(sm["b2"]))))
    return CheckResult("euler-reduction", diff <= 1e-8, diff, 1e-8,
                       "mhd with b0=0 vs euler")


_UNIT_BOUND = 0.42303585716440205  # log(1+log(1+log 2)), frozen from mpmath at 30 digits


def check_lifespan_formula(s: _Setup, ops: Ops) -> CheckResult:
    value = lifespan_bound_new(1.0, 1.0, 1.0).bound
    err = abs(value - _UNIT_BOUND)
    b_norms = np.logspace(-3, 1, 10)
    bounds = [lifespan_bound_new(1.0, b, 1.0).bound for b in b_norms]
    monotone = all(x > y for x, y in zip(bounds, bounds[1:]))
    return CheckResult("lifespan-formula", err <= 1e-3 and monotone, err, 1e-3,
                       "unit value + strict decrease in the magnetic norm")


def check_t_star_oracle(s: _Setup, ops: Ops) -> CheckResult:
    a, c, e0 = 0.3, 1.7, 0.9
    times = np.linspace(0.0, 4.0, 4001)
    e = a * np.exp(c * times)
    result = t_star_empirical(times, e, e0)
    exact = math.log(1.0 + 2.0 * c * e0 / a**2) / (2.0 * c)
    err = abs(result.t_star - exact)
    return CheckResult("t-star-exponential-oracle", err <= 1e-3 and not result.censored,
                       err, 1e-3, f"analytic root {exact:.6f}")


_CHECKS = (
    check_partition_of_unity,
    check_lp_reconstruction,
    check_block_orthogonality,
    check_bernstein,
    check_bony_identity,
    check_leray_idempotent,
    check_leray_divergence,
    check_leray_gradients,
    check_biot_savart,
    check_estimate_stability,
    check_steady_states,
    check_energy_conservation,
    check_formulation_equivalence,
    check_euler_reduction,
    check_lifespan_formula,
    check_t_star_oracle,
)


def run_suite(level: str = "fast", ops: Ops | None = None) -> list[CheckResult]:
    setup = _setup(level)
    ops = ops or Ops()
    results: list[CheckResult] = []
    for check in _CHECKS:
        outcome = check(setup, ops)
        if isinstance(outcome, list):
            results.extend(outcome)
        else:
            results.append(outcome)
    return results
