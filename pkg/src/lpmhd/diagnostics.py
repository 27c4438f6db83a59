"""Per-step measurements, continuation integrals, and lifespan bounds.

A simulation emits one DiagnosticsRecord per cadence interval; a Trajectory
is the ordered collection plus optional field snapshots and the termination
reason.  Everything downstream (continuation criteria, the Euler-comparison
series E(t), the empirical T*, CSV emission) consumes trajectories only.

Conventions, used consistently everywhere:
  * pair norms ||(f, g)|| = ||f|| + ||g||;
  * intersection norms ||.||_{L2 ^ X} = ||.||_{L2} + ||.||_X;
  * a vector field's Besov norm is the sum of its component norms;
  * gradient sup norms take the max over Jacobian entries;
  * criterion integrals use trapezoidal quadrature on the record grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DiagnosticError
from .littlewood_paley import (
    B0_INF_1,
    B1_INF_1,
    B2_INF_1,
    DyadicPartition,
    besov_norm,
)
from .spectral import (
    Grid,
    ScalarField,
    VectorField,
    l2_norm,
    spectral_derivative,
    sup_norm,
)

TAIL_FRACTION_LIMIT = 1e-4
_TAIL_RADIUS_FACTOR = 0.75  # tail = retained modes with |k| >= 0.75 * (n/3)


@dataclass
class DiagnosticsRecord:
    """Norms and accumulated criterion integrals at one instant."""

    t: float
    energy: float
    grad_u_sup: float
    grad2_u_sup: float
    b_sup: float
    grad_b_sup: float
    omega_plus_j: float      # ||omega + j||_{B^0_inf,1}
    omega_minus_j: float     # ||omega - j||_{B^0_inf,1}
    current_b1: float        # ||j||_{B^1_inf,1}
    tail_fraction: float
    delta_norm: float = math.nan   # E(t) when an Euler reference is attached
    euler_phi: float = math.nan    # ||v||_{L2 ^ B^2_inf,1} on Euler runs
    int_grad2_u: float = 0.0
    int_omega_plus: float = 0.0
    int_omega_minus: float = 0.0
    int_lipschitz: float = 0.0
    int_current_sq: float = 0.0

    CSV_FIELDS = (
        "t", "energy", "grad_u_sup", "grad2_u_sup", "b_sup", "grad_b_sup",
        "omega_plus_j", "omega_minus_j", "current_b1", "tail_fraction",
        "delta_norm", "euler_phi", "int_grad2_u", "int_omega_plus",
        "int_omega_minus", "int_lipschitz", "int_current_sq",
    )

    def accumulate(self, prev: "DiagnosticsRecord") -> "DiagnosticsRecord":
        """Extend the running criterion integrals from ``prev`` by trapezoid."""
        h = self.t - prev.t
        if h <= 0:
            raise DiagnosticError("records must advance strictly in time")
        return replace(
            self,
            int_grad2_u=prev.int_grad2_u + 0.5 * h * (prev.grad2_u_sup + self.grad2_u_sup),
            int_omega_plus=prev.int_omega_plus + 0.5 * h * (prev.omega_plus_j + self.omega_plus_j),
            int_omega_minus=prev.int_omega_minus + 0.5 * h * (prev.omega_minus_j + self.omega_minus_j),
            int_lipschitz=prev.int_lipschitz + 0.5 * h * (
                prev.grad_u_sup + prev.grad_b_sup + self.grad_u_sup + self.grad_b_sup
            ),
            int_current_sq=prev.int_current_sq + 0.5 * h * (
                prev.current_b1**2 + self.current_b1**2
            ),
        )


@dataclass
class Trajectory:
    """Ordered diagnostics records plus optional state snapshots."""

    system: str
    n: int
    length: float
    records: list = field(default_factory=list)
    snapshots: Optional[list] = None
    termination: str = "incomplete"

    def append(self, record: DiagnosticsRecord, snapshot=None):
        if self.records and record.t <= self.records[-1].t:
            raise DiagnosticError("trajectory time stamps must increase strictly")
        self.records.append(record)
        if self.snapshots is not None:
            if snapshot is None:
                raise DiagnosticError("snapshot-carrying trajectory needs a snapshot per record")
            self.snapshots.append(snapshot)

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    def series(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    def __len__(self):
        return len(self.records)


# ---------------------------------------------------------------------------
# per-state measurement
# ---------------------------------------------------------------------------

def _grad_entries(v: VectorField):
    return [spectral_derivative(c, axis) for c in v.components for axis in (1, 2)]


def _grad_sup(v: VectorField) -> float:
    return max(sup_norm(df) for df in _grad_entries(v))


def _second_grad_sup(v: VectorField) -> float:
    """Max sup norm over the second partials of both components (the mixed
    partial counts once; its transpose is spectrally identical)."""
    worst = 0.0
    for c in v.components:
        d11 = spectral_derivative(c, 1, 2)
        d22 = spectral_derivative(c, 2, 2)
        d12 = spectral_derivative(spectral_derivative(c, 1), 2)
        worst = max(worst, sup_norm(d11), sup_norm(d22), sup_norm(d12))
    return worst


def _tail_mask(grid: Grid) -> np.ndarray:
    cutoff = grid.n / 3.0
    return grid.dealias_mask & (grid.kmag >= _TAIL_RADIUS_FACTOR * cutoff)


def tail_fraction(grid: Grid, *fields: VectorField) -> float:
    """Fraction of spectral energy sitting in the outer quarter of the
    retained band; a proxy for loss of dealiased resolution."""
    mask = _tail_mask(grid)
    tail = 0.0
    total = 0.0
    for vf in fields:
        for c in vf.components:
            power = np.abs(c.coeffs) ** 2
            tail += float(power[mask].sum())
            total += float(power.sum())
    return tail / total if total > 0 else 0.0


def curl_coeffs(v: VectorField) -> np.ndarray:
    g = v.grid
    m1 = g.derivative_multiplier(1, 1)
    m2 = g.derivative_multiplier(2, 1)
    return m1 * v.c2.coeffs - m2 * v.c1.coeffs


def measure_state(grid: Grid, part: DyadicPartition, t: float,
                  u: VectorField, b: Optional[VectorField],
                  reference: "EulerReference | None" = None,
                  euler_phi: bool = False) -> DiagnosticsRecord:
    """Evaluate every monitored norm for one state.

    ``b=None`` marks a pure Euler state: magnetic entries are exactly zero
    and, with ``euler_phi=True``, the record carries ||v||_{L2 ^ B2_inf,1}.
    """
    omega_hat = curl_coeffs(u)
    energy = l2_norm(u) ** 2
    if b is not None:
        energy += l2_norm(b) ** 2
        j_hat = curl_coeffs(b)
        omega_plus = ScalarField.from_coeffs(grid, omega_hat + j_hat, copy=False)
        omega_minus = ScalarField.from_coeffs(grid, omega_hat - j_hat, copy=False)
        current = ScalarField.from_coeffs(grid, j_hat, copy=False)
        b_sup = sup_norm(b)
        grad_b = _grad_sup(b)
        plus_norm = besov_norm(omega_plus, B0_INF_1, part)
        minus_norm = besov_norm(omega_minus, B0_INF_1, part)
        current_norm = besov_norm(current, B1_INF_1, part)
        tail = tail_fraction(grid, u, b)
    else:
        omega = ScalarField.from_coeffs(grid, omega_hat, copy=False)
        plus_norm = minus_norm = besov_norm(omega, B0_INF_1, part)
        current_norm = 0.0
        b_sup = grad_b = 0.0
        tail = tail_fraction(grid, u)

    record = DiagnosticsRecord(
        t=t,
        energy=energy,
        grad_u_sup=_grad_sup(u),
        grad2_u_sup=_second_grad_sup(u),
        b_sup=b_sup,
        grad_b_sup=grad_b,
        omega_plus_j=plus_norm,
        omega_minus_j=minus_norm,
        current_b1=current_norm,
        tail_fraction=tail,
    )
    if reference is not None and b is not None:
        v1, v2 = reference.fields_at(t)
        record.delta_norm = delta_elsasser_norm(grid, part, u, b, v1, v2)
    if euler_phi:
        record.euler_phi = l2_norm(u) + besov_norm(u, B2_INF_1, part)
    return record


# ---------------------------------------------------------------------------
# Euler reference and the difference series E(t)
# ---------------------------------------------------------------------------

def delta_elsasser_norm(grid: Grid, part: DyadicPartition,
                        u: VectorField, b: VectorField,
                        v1: np.ndarray, v2: np.ndarray) -> float:
    """||(u+b-v, u-b-v)||_{B^1_inf,1} with the sum pair-norm convention."""
    da = VectorField.from_values(grid, u.c1.values + b.c1.values - v1,
                                 u.c2.values + b.c2.values - v2)
    db = VectorField.from_values(grid, u.c1.values - b.c1.values - v1,
                                 u.c2.values - b.c2.values - v2)
    return besov_norm(da, B1_INF_1, part) + besov_norm(db, B1_INF_1, part)


class EulerReference:
    """Snapshot-backed Euler solution, linearly interpolated in time.

    Off-grid query times use the documented rule: componentwise linear
    interpolation between the two bracketing snapshots.
    """

    def __init__(self, traj: Trajectory):
        if traj.snapshots is None or not traj.snapshots:
            raise DiagnosticError("Euler reference needs a snapshot-carrying trajectory")
        if traj.system != "euler":
            raise DiagnosticError(f"reference trajectory must be an euler run, got {traj.system!r}")
        self.times = traj.times
        self._v1 = [snap["v1"] for snap in traj.snapshots]
        self._v2 = [snap["v2"] for snap in traj.snapshots]

    def fields_at(self, t: float):
        times = self.times
        if t <= times[0]:
            return self._v1[0], self._v2[0]
        if t >= times[-1]:
            return self._v1[-1], self._v2[-1]
        hi = int(np.searchsorted(times, t))
        lo = hi - 1
        w = (t - times[lo]) / (times[hi] - times[lo])
        if w == 0.0:
            return self._v1[lo], self._v2[lo]
        return ((1.0 - w) * self._v1[lo] + w * self._v1[hi],
                (1.0 - w) * self._v2[lo] + w * self._v2[hi])


def delta_elsasser(traj_mhd: Trajectory, traj_euler: Trajectory,
                   part: DyadicPartition, grid: Grid):
    """E(t) series from snapshot-carrying MHD and Euler trajectories."""
    if traj_mhd.snapshots is None:
        raise DiagnosticError("delta_elsasser needs MHD snapshots")
    ref = EulerReference(traj_euler)
    times = traj_mhd.times
    out = np.empty(len(times))
    for i, (t, snap) in enumerate(zip(times, traj_mhd.snapshots)):
        u = VectorField.from_values(grid, snap["u1"], snap["u2"])
        b = VectorField.from_values(grid, snap["b1"], snap["b2"])
        v1, v2 = ref.fields_at(t)
        out[i] = delta_elsasser_norm(grid, part, u, b, v1, v2)
    return times, out


# ---------------------------------------------------------------------------
# continuation-criterion integrals
# ---------------------------------------------------------------------------

def _running_trapezoid(times: np.ndarray, values: np.ndarray) -> np.ndarray:
    if len(times) == 0:
        raise DiagnosticError("empty trajectory")
    out = np.zeros_like(values, dtype=np.float64)
    if len(times) > 1:
        increments = 0.5 * np.diff(times) * (values[1:] + values[:-1])
        out[1:] = np.cumsum(increments)
    return out


def continuation_integral_u(traj: Trajectory) -> np.ndarray:
    """Running integral of ||grad^2 u||_inf (velocity-only criterion)."""
    return _running_trapezoid(traj.times, traj.series("grad2_u_sup"))


def continuation_integral_elsasser(traj: Trajectory, sign: int) -> np.ndarray:
    """Running integral of ||omega +/- j||_{B^0_inf,1}; sign in {+1, -1}."""
    if sign not in (1, -1):
        raise ConfigurationError("sign must be +1 or -1")
    name = "omega_plus_j" if sign == 1 else "omega_minus_j"
    return _running_trapezoid(traj.times, traj.series(name))


def continuation_integral_lipschitz(traj: Trajectory) -> np.ndarray:
    """Running integral of ||grad u||_inf + ||grad b||_inf."""
    vals = traj.series("grad_u_sup") + traj.series("grad_b_sup")
    return _running_trapezoid(traj.times, vals)


def continuation_integral_b2d(traj: Trajectory) -> np.ndarray:
    """Running integral of ||j||^2_{B^1_inf,1} (2-D magnetic-only criterion)."""
    return _running_trapezoid(traj.times, traj.series("current_b1") ** 2)


# ---------------------------------------------------------------------------
# lifespan lower bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LifespanEstimate:
    """Evaluated lifespan lower bound with the inputs that produced it."""

    bound: float
    constant: float
    norms: dict


def _triple_log(c: float, ratio: float) -> float:
    return math.log1p(c * math.log1p(c * math.log1p(c * ratio)))


def lifespan_bound_new(u0_norm: float, b0_norm: float, constant: float = 1.0) -> LifespanEstimate:
    """Velocity-weighted triple-logarithm bound.

    T >= (C / ||u0||_{L2^B2}) * log(1 + C log(1 + C log(1 + C ||u0||/||b0||))).
    A vanishing magnetic norm returns the +inf marker.
    """
    if u0_norm <= 0 or constant <= 0 or b0_norm < 0:
        raise ConfigurationError("norms and constant must be positive")
    norms = {"u0_l2_b2": u0_norm, "b0_b1": b0_norm}
    if b0_norm == 0.0:
        return LifespanEstimate(math.inf, constant, norms)
    bound = (constant / u0_norm) * _triple_log(constant, u0_norm / b0_norm)
    return LifespanEstimate(bound, constant, norms)


def lifespan_bound_old(pair_norm_b2: float, pair_norm_b1: float, b0_norm: float,
                       constant: float = 1.0) -> LifespanEstimate:
    """Earlier pair-norm bound: prefactor and ratio use ||(u0, b0)|| norms."""
    if pair_norm_b2 <= 0 or pair_norm_b1 <= 0 or constant <= 0 or b0_norm < 0:
        raise ConfigurationError("norms and constant must be positive")
    norms = {"pair_l2_b2": pair_norm_b2, "pair_l2_b1": pair_norm_b1, "b0_b1": b0_norm}
    if b0_norm == 0.0:
        return LifespanEstimate(math.inf, constant, norms)
    bound = (constant / pair_norm_b2) * _triple_log(constant, pair_norm_b1 / b0_norm)
    return LifespanEstimate(bound, constant, norms)


def euler_growth_bound(v0: float, t: float, constant: float) -> float:
    """Double-exponential envelope C V0 exp(C t V0 exp(C t V0)) for the
    Euler solution's L2 ^ B2 norm; overflow maps to the +inf marker."""
    if v0 <= 0 or t < 0 or constant <= 0:
        raise ConfigurationError("arguments must be positive (t may be zero)")
    try:
        inner = constant * t * v0 * math.exp(constant * t * v0)
        return constant * v0 * math.exp(inner)
    except OverflowError:
        return math.inf


def fit_euler_growth_constant(times: np.ndarray, measured: np.ndarray, v0: float,
                              c_max: float = 64.0) -> float:
    """Smallest C for which the growth envelope dominates the measured norms."""

    def dominates(c: float) -> bool:
        return all(euler_growth_bound(v0, float(t), c) >= m
                   for t, m in zip(times, measured))

    if not dominates(c_max):
        raise DiagnosticError(f"growth envelope does not dominate even at C = {c_max}")
    lo, hi = 0.0, c_max
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if mid <= 0.0 or not dominates(mid):
            lo = mid
        else:
            hi = mid
    return hi


# ---------------------------------------------------------------------------
# empirical T*
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TStarResult:
    t_star: float
    censored: bool


def t_star_empirical(times: np.ndarray, e_values: np.ndarray, e0: float) -> TStarResult:
    """Largest time T with integral_0^T E^2 <= e0 under trapezoid quadrature.

    Between records the squared series is interpolated linearly (consistent
    with the trapezoid rule), so the crossing solves a quadratic.  If the
    budget is never exhausted the run end is returned, flagged censored.
    """
    times = np.asarray(times, dtype=np.float64)
    e_values = np.asarray(e_values, dtype=np.float64)
    if times.size == 0:
        raise DiagnosticError("empty E series")
    if e0 <= 0:
        raise ConfigurationError("e0 must be positive")
    q = e_values**2
    cumulative = _running_trapezoid(times, q)
    if cumulative[-1] <= e0:
        return TStarResult(float(times[-1]), True)
    idx = int(np.searchsorted(cumulative, e0, side="right"))
    lo, hi = idx - 1, idx
    residual = e0 - cumulative[lo]
    h = times[hi] - times[lo]
    q0, q1 = q[lo], q[hi]
    # solve residual = q0 s + (q1 - q0) s^2 / (2h) for s in [0, h]
    a = 0.5 * (q1 - q0) / h
    if abs(a) < 1e-300:
        s = residual / q0 if q0 > 0 else h
    else:
        disc = q0 * q0 + 4.0 * a * residual
        s = (-q0 + math.sqrt(max(disc, 0.0))) / (2.0 * a)
        if not (0.0 <= s <= h):
            s = min(max(s, 0.0), h)
    return TStarResult(float(times[lo] + s), False)
