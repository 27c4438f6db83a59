"""Tendencies and time integration for the coupled magnetofluid systems.

Three formulations of the same physics are integrated side by side:

    momentum/induction:  du/dt = P[(b.grad)b - (u.grad)u],
                         db/dt = (b.grad)u - (u.grad)b
    symmetric transport: dalpha/dt = -P[(beta.grad)alpha],
                         dbeta/dt  = -P[(alpha.grad)beta]
                         with alpha = u + b, beta = u - b
    pure fluid:          dv/dt = -P[(v.grad)v]

Pressure never appears: the Leray projection eliminates it, and
``recover_pressure`` rebuilds the total pressure diagnostically from a
Poisson solve.  The induction tendency is solenoidal without projection
(checked, never projected).  Every quadratic product is dealiased, so a
state that starts band-limited inside the 2/3 mask stays there and the
discrete energy balance holds to rounding.

Integration is classical fixed-step RK4 behind a CFL guard
dt <= 0.5 h / max(||u||_inf + ||b||_inf, 1e-6).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .diagnostics import (
    TAIL_FRACTION_LIMIT,
    DiagnosticsRecord,
    EulerReference,
    Trajectory,
    measure_state,
)
from .errors import ConfigurationError, PreconditionError, StepSizeError
from .littlewood_paley import B1_INF_1, DyadicPartition, besov_norm, build_partition
from .paracalculus import random_solenoidal
from .spectral import (
    TWO_PI,
    Grid,
    ScalarField,
    VectorField,
    divergence_bound,
    invert_laplacian,
    sup_norm,
)

CFL_FACTOR = 0.5
CFL_FLOOR = 1e-6
_SOLENOIDAL_TOL = 1e-8

SYSTEMS = ("mhd", "elsasser", "euler")
PROFILES = ("orszag_tang", "taylor_green", "shear", "random")


# ---------------------------------------------------------------------------
# states and configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MHDState:
    u: VectorField
    b: VectorField
    t: float = 0.0


@dataclass(frozen=True)
class ElsasserState:
    alpha: VectorField
    beta: VectorField
    t: float = 0.0


@dataclass(frozen=True)
class EulerState:
    v: VectorField
    t: float = 0.0


@dataclass(frozen=True)
class SimConfig:
    """Everything a run needs; mirrors the flat key=value config files."""

    n: int
    dt: float
    t_end: float
    length: float = TWO_PI
    dealias: bool = True
    profile: str = "orszag_tang"
    amplitude: float = 1.0
    epsilon: float = 0.1
    seed: int = 0
    cadence: float = 0.01
    blowup_threshold: float = 1000.0
    system: str = "mhd"
    euler_reference: bool = True

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.t_end < self.dt:
            raise ConfigurationError("t_end must be at least one step")
        if self.cadence <= 0:
            raise ConfigurationError("cadence must be positive")
        if self.blowup_threshold <= 0:
            raise ConfigurationError("blowup threshold must be positive")
        if self.epsilon < 0:
            raise ConfigurationError("epsilon must be nonnegative")
        if self.system not in SYSTEMS:
            raise ConfigurationError(f"unknown system {self.system!r}; pick from {SYSTEMS}")
        if self.profile not in PROFILES:
            raise ConfigurationError(f"unknown profile {self.profile!r}; pick from {PROFILES}")


def _require_solenoidal(v: VectorField, who: str):
    bound = divergence_bound(v)
    if bound > _SOLENOIDAL_TOL:
        raise PreconditionError(f"{who}: field is not divergence-free (|div| ~ {bound:.2e})")


# ---------------------------------------------------------------------------
# tendencies
# ---------------------------------------------------------------------------

def _gradients(grid: Grid, f: VectorField):
    """Real-space Jacobian entries (d1 f1, d2 f1, d1 f2, d2 f2)."""
    m1 = grid.derivative_multiplier(1, 1)
    m2 = grid.derivative_multiplier(2, 1)
    out = []
    for comp in f.components:
        c = comp.coeffs
        out.append(np.fft.ifft2(m1 * c).real)
        out.append(np.fft.ifft2(m2 * c).real)
    return out


def _spectral(grid: Grid, values: np.ndarray, mask) -> np.ndarray:
    c = np.fft.fft2(values)
    return np.where(mask, c, 0.0) if mask is not None else c


def _projected(grid: Grid, c1, c2) -> VectorField:
    p1, p2 = kernels.leray_pair(c1, c2, grid.k1, grid.k2, grid.inv_ksq_int)
    return VectorField(ScalarField.from_coeffs(grid, p1, copy=False),
                       ScalarField.from_coeffs(grid, p2, copy=False))


def mhd_tendency(s: MHDState, do_dealias: bool = True, check: bool = True):
    """Projected momentum tendency and raw induction tendency.

    The induction part (b.grad)u - (u.grad)b is divergence-free by itself
    for solenoidal states; this is asserted, not enforced by projection.
    """
    if check:
        _require_solenoidal(s.u, "mhd_tendency(u)")
        _require_solenoidal(s.b, "mhd_tendency(b)")
    grid = s.u.grid
    mask = grid.dealias_mask if do_dealias else None
    u1, u2 = s.u.c1.values, s.u.c2.values
    b1, b2 = s.b.c1.values, s.b.c2.values
    du11, du12, du21, du22 = _gradients(grid, s.u)
    db11, db12, db21, db22 = _gradients(grid, s.b)
    # momentum: (b.grad)b - (u.grad)u, combined before the single transform
    mom1 = kernels.advect(b1, b2, db11, db12) - kernels.advect(u1, u2, du11, du12)
    mom2 = kernels.advect(b1, b2, db21, db22) - kernels.advect(u1, u2, du21, du22)
    # induction: (b.grad)u - (u.grad)b
    ind1 = kernels.advect(b1, b2, du11, du12) - kernels.advect(u1, u2, db11, db12)
    ind2 = kernels.advect(b1, b2, du21, du22) - kernels.advect(u1, u2, db21, db22)
    du = _projected(grid, _spectral(grid, mom1, mask), _spectral(grid, mom2, mask))
    db = VectorField(
        ScalarField.from_coeffs(grid, _spectral(grid, ind1, mask), copy=False),
        ScalarField.from_coeffs(grid, _spectral(grid, ind2, mask), copy=False),
    )
    if check and divergence_bound(db) > _SOLENOIDAL_TOL:
        raise PreconditionError("induction tendency lost solenoidality")
    return du, db


def elsasser_tendency(s: ElsasserState, do_dealias: bool = True, check: bool = True):
    """Both transport tendencies, each projected."""
    if check:
        _require_solenoidal(s.alpha, "elsasser_tendency(alpha)")
        _require_solenoidal(s.beta, "elsasser_tendency(beta)")
    grid = s.alpha.grid
    mask = grid.dealias_mask if do_dealias else None

    def transported(carrier, moved):
        a1, a2 = carrier.c1.values, carrier.c2.values
        g11, g12, g21, g22 = _gradients(grid, moved)
        w1 = kernels.advect(a1, a2, g11, g12)
        w2 = kernels.advect(a1, a2, g21, g22)
        return _projected(grid, _spectral(grid, -w1, mask), _spectral(grid, -w2, mask))

    return transported(s.beta, s.alpha), transported(s.alpha, s.beta)


def euler_tendency(s: EulerState, do_dealias: bool = True, check: bool = True) -> VectorField:
    """Projected self-advection tendency of the plain fluid."""
    if check:
        _require_solenoidal(s.v, "euler_tendency")
    grid = s.v.grid
    mask = grid.dealias_mask if do_dealias else None
    v1, v2 = s.v.c1.values, s.v.c2.values
    g11, g12, g21, g22 = _gradients(grid, s.v)
    w1 = kernels.advect(v1, v2, g11, g12)
    w2 = kernels.advect(v1, v2, g21, g22)
    return _projected(grid, _spectral(grid, -w1, mask), _spectral(grid, -w2, mask))


def to_elsasser(s: MHDState) -> ElsasserState:
    return ElsasserState(alpha=s.u + s.b, beta=s.u - s.b, t=s.t)


def from_elsasser(e: ElsasserState) -> MHDState:
    return MHDState(u=(e.alpha + e.beta) * 0.5, b=(e.alpha - e.beta) * 0.5, t=e.t)


# ---------------------------------------------------------------------------
# RK4 stepping
# ---------------------------------------------------------------------------

def _speed(state) -> float:
    if isinstance(state, MHDState):
        return sup_norm(state.u) + sup_norm(state.b)
    if isinstance(state, ElsasserState):
        u = (state.alpha + state.beta) * 0.5
        b = (state.alpha - state.beta) * 0.5
        return sup_norm(u) + sup_norm(b)
    return sup_norm(state.v)


def cfl_limit(state) -> float:
    grid = _state_fields(state)[0].grid
    return CFL_FACTOR * grid.spacing / max(_speed(state), CFL_FLOOR)


def _state_fields(state):
    if isinstance(state, MHDState):
        return state.u, state.b
    if isinstance(state, ElsasserState):
        return state.alpha, state.beta
    return (state.v,)


def _rhs_fields(state, do_dealias, check=True):
    if isinstance(state, MHDState):
        return mhd_tendency(state, do_dealias, check)
    if isinstance(state, ElsasserState):
        return elsasser_tendency(state, do_dealias, check)
    return (euler_tendency(state, do_dealias, check),)


def _shift(state, fields, tendencies, factor, new_t):
    moved = [
        VectorField(
            ScalarField.from_coeffs(f.grid, f.c1.coeffs + factor * k.c1.coeffs, copy=False),
            ScalarField.from_coeffs(f.grid, f.c2.coeffs + factor * k.c2.coeffs, copy=False),
        )
        for f, k in zip(fields, tendencies)
    ]
    return _rebuild(state, moved, new_t)


def _rebuild(state, fields, t):
    if isinstance(state, MHDState):
        return MHDState(u=fields[0], b=fields[1], t=t)
    if isinstance(state, ElsasserState):
        return ElsasserState(alpha=fields[0], beta=fields[1], t=t)
    return EulerState(v=fields[0], t=t)


def rk4_step(state, dt: float, do_dealias: bool = True, enforce_cfl: bool = True):
    """One classical RK4 step; raises StepSizeError past the CFL guard."""
    if enforce_cfl:
        limit = cfl_limit(state)
        if dt > limit:
            raise StepSizeError(f"dt = {dt:.3e} exceeds the CFL guard {limit:.3e}")
    fields = _state_fields(state)
    t = state.t
    # internal stages stay solenoidal by construction; check only the input
    k1 = _rhs_fields(state, do_dealias)
    k2 = _rhs_fields(_shift(state, fields, k1, 0.5 * dt, t + 0.5 * dt), do_dealias, False)
    k3 = _rhs_fields(_shift(state, fields, k2, 0.5 * dt, t + 0.5 * dt), do_dealias, False)
    k4 = _rhs_fields(_shift(state, fields, k3, dt, t + dt), do_dealias, False)
    new_fields = []
    for f, a, b, c, d in zip(fields, k1, k2, k3, k4):
        comps = [
            ScalarField.from_coeffs(
                f.grid,
                kernels.rk4_combine(fc.coeffs, ac.coeffs, bc.coeffs, cc.coeffs,
                                    dc.coeffs, dt),
                copy=False,
            )
            for fc, ac, bc, cc, dc in zip(f.components, a.components, b.components,
                                          c.components, d.components)
        ]
        new_fields.append(VectorField(*comps))
    return _rebuild(state, new_fields, t + dt)


def _finite(state) -> bool:
    return all(np.isfinite(c.coeffs).all() for f in _state_fields(state)
               for c in f.components)


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------

def make_initial_data(config: SimConfig, grid: Optional[Grid] = None,
                      part: Optional[DyadicPartition] = None):
    """Build the divergence-free pair (u0, b0) named by the config profile.

    b0 is rescaled so its B^1_inf,1 norm equals epsilon exactly; epsilon = 0
    yields the zero field.  Seeded profiles are reproducible bit for bit.
    """
    grid = grid or Grid(config.n, config.length)
    part = part or build_partition(grid)
    x1, x2 = grid.x1, grid.x2
    amp = config.amplitude
    rng = np.random.default_rng(config.seed)

    if config.profile == "orszag_tang":
        u = VectorField.from_values(grid, -amp * np.sin(x2), amp * np.sin(x1))
        b_raw = VectorField.from_values(grid, -np.sin(x2), np.sin(2.0 * x1))
    elif config.profile == "taylor_green":
        u = VectorField.from_values(grid, amp * np.sin(x1) * np.cos(x2),
                                    -amp * np.cos(x1) * np.sin(x2))
        b_raw = VectorField.from_values(grid, np.cos(x1) * np.sin(x2),
                                        -np.sin(x1) * np.cos(x2))
    elif config.profile == "shear":
        zero = np.zeros((grid.n, grid.n))
        u = VectorField.from_values(grid, amp * np.sin(x2), zero)
        b_raw = VectorField.from_values(grid, np.sin(2.0 * x2), zero)
    elif config.profile == "random":
        kmax = max(4.0, grid.n / 8.0)
        u = random_solenoidal(grid, rng, kmin=1.0, kmax=kmax, amplitude=amp)
        b_raw = random_solenoidal(grid, rng, kmin=1.0, kmax=kmax, amplitude=1.0)
    else:  # pragma: no cover - SimConfig already validated
        raise ConfigurationError(f"unknown profile {config.profile!r}")

    if config.epsilon == 0.0:
        b = VectorField.zero(grid)
    else:
        norm = besov_norm(b_raw, B1_INF_1, part)
        b = b_raw * (config.epsilon / norm)
    return u, b


# ---------------------------------------------------------------------------
# pressure recovery
# ---------------------------------------------------------------------------

def recover_pressure(s: MHDState, do_dealias: bool = True) -> ScalarField:
    """Total pressure from -Laplace(q) = div[(u.grad)u - (b.grad)b], mean 0.

    Its gradient equals the projection complement of the momentum
    nonlinearity, i.e. exactly what the projected tendency discards.
    """
    grid = s.u.grid
    mask = grid.dealias_mask if do_dealias else None
    u1, u2 = s.u.c1.values, s.u.c2.values
    b1, b2 = s.b.c1.values, s.b.c2.values
    du11, du12, du21, du22 = _gradients(grid, s.u)
    db11, db12, db21, db22 = _gradients(grid, s.b)
    f1 = _spectral(grid, kernels.advect(u1, u2, du11, du12)
                   - kernels.advect(b1, b2, db11, db12), mask)
    f2 = _spectral(grid, kernels.advect(u1, u2, du21, du22)
                   - kernels.advect(b1, b2, db21, db22), mask)
    m1 = grid.derivative_multiplier(1, 1)
    m2 = grid.derivative_multiplier(2, 1)
    div_f = ScalarField.from_coeffs(grid, m1 * f1 + m2 * f2, copy=False)
    return -invert_laplacian(div_f)


# ---------------------------------------------------------------------------
# simulation driver
# ---------------------------------------------------------------------------

def _as_mhd_fields(state):
    """Velocity/magnetic pair for diagnostics, whatever the formulation."""
    if isinstance(state, MHDState):
        return state.u, state.b
    if isinstance(state, ElsasserState):
        converted = from_elsasser(state)
        return converted.u, converted.b
    return state.v, None


def _snapshot(state) -> dict:
    if isinstance(state, EulerState):
        return {"v1": state.v.c1.values, "v2": state.v.c2.values}
    u, b = _as_mhd_fields(state)
    return {"u1": u.c1.values, "u2": u.c2.values,
            "b1": b.c1.values, "b2": b.c2.values}


def initial_state(config: SimConfig, system: str, grid: Grid, part: DyadicPartition):
    u0, b0 = make_initial_data(config, grid, part)
    if system == "euler":
        return EulerState(v=u0, t=0.0)
    state = MHDState(u=u0, b=b0, t=0.0)
    return to_elsasser(state) if system == "elsasser" else state


def run_simulation(config: SimConfig, system: Optional[str] = None,
                   reference: Optional[Trajectory] = None,
                   with_snapshots: bool = False) -> Trajectory:
    """Integrate to t_end, recording diagnostics at the configured cadence.

    Stops early, recording the reason, when the blow-up threshold on
    ||grad u||_inf + ||grad b||_inf trips, when the spectral tail fraction
    crosses 1e-4 (resolution loss), when the CFL guard is violated, or when
    non-finite values appear (numerical failure, not an exception).
    """
    system = system or config.system
    if system not in SYSTEMS:
        raise ConfigurationError(f"unknown system {system!r}")
    grid = Grid(config.n, config.length)
    part = build_partition(grid)
    state = initial_state(config, system, grid, part)
    ref = EulerReference(reference) if reference is not None else None

    steps_per_record = max(1, round(config.cadence / config.dt))
    n_steps = round(config.t_end / config.dt)
    traj = Trajectory(system=system, n=grid.n, length=grid.length,
                      snapshots=[] if with_snapshots else None)

    def record(st) -> DiagnosticsRecord:
        u, b = _as_mhd_fields(st)
        rec = measure_state(grid, part, st.t, u, b, reference=ref,
                            euler_phi=(system == "euler"))
        if traj.records:
            rec = rec.accumulate(traj.records[-1])
        traj.append(rec, _snapshot(st) if with_snapshots else None)
        return rec

    rec = record(state)
    termination = "completed"
    for step in range(1, n_steps + 1):
        if config.dt > cfl_limit(state):
            termination = "cfl_violation"
            break
        state = rk4_step(state, config.dt, do_dealias=config.dealias,
                         enforce_cfl=False)
        state = _rebuild(state, _state_fields(state), step * config.dt)
        if not _finite(state):
            termination = "numerical_failure"
            break
        if step % steps_per_record == 0 or step == n_steps:
            rec = record(state)
            if rec.grad_u_sup + rec.grad_b_sup > config.blowup_threshold:
                termination = "blowup_threshold"
                break
            if rec.tail_fraction > TAIL_FRACTION_LIMIT:
                termination = "resolution_loss"
                break
    traj.termination = termination
    return traj


# ---------------------------------------------------------------------------
# snapshot files: JSON header line + raw little-endian float64 planes
# ---------------------------------------------------------------------------

def save_snapshot(path, grid_n: int, length: float, t: float, fields: dict):
    """Write named real-space planes with a one-line JSON header.

    Layout: UTF-8 JSON header terminated by a newline, then each field's
    n x n samples as little-endian float64 in C order, in header order.
    """
    names = sorted(fields)
    header = {
        "n": grid_n,
        "length": length,
        "t": t,
        "fields": names,
        "dtype": "<f8",
        "order": "C",
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header).encode("utf-8") + b"\n")
        for name in names:
            arr = np.ascontiguousarray(fields[name], dtype="<f8")
            fh.write(arr.tobytes())


def load_snapshot(path):
    """Inverse of save_snapshot: returns (header dict, {name: array})."""
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        n = header["n"]
        out = {}
        for name in header["fields"]:
            raw = fh.read(n * n * 8)
            out[name] = np.frombuffer(raw, dtype="<f8").reshape(n, n).copy()
    return header, out
