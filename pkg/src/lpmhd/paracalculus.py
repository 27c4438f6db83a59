"""Paraproducts, Leray projection, Biot-Savart, and commutator operators.

Index conventions for the product decomposition

    u v = T_u(v) + T_v(u) + R(u, v)

follow the low-cutoff identity S_j = sum_{m <= j-1} Delta_m: the paraproduct
sums S_{j-1}u * Delta_j v over j >= 1, so T_u collects exactly the index
pairs (m, j) with m <= j - 2, and the remainder takes |m - j| <= 1.  The
three index sets tile all pairs, which makes the decomposition identity
exact on the lattice (up to rounding); dealiasing is linear, so it survives
the 2/3-rule mask applied to every quadratic product.

Estimate-style checks (paraproduct continuity, transport/block,
paraproduct/multiplier, and transport/projection commutators) are exposed
as observed-ratio measurements; the constants are reported, never asserted
against theoretical values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigurationError, PreconditionError
from .littlewood_paley import (
    INF,
    BesovSpec,
    DyadicPartition,
    besov_norm,
)
from .spectral import (
    Grid,
    ScalarField,
    VectorField,
    dealias,
    divergence_bound,
    invert_laplacian,
    spectral_derivative,
    sup_norm,
)

_SOLENOIDAL_TOL = 1e-8


def _require_solenoidal(v: VectorField, who: str):
    bound = divergence_bound(v)
    if bound > _SOLENOIDAL_TOL:
        raise PreconditionError(f"{who} needs a divergence-free field (|div| <= {bound:.2e})")


# ---------------------------------------------------------------------------
# Leray projection and the 2-D curl / Biot-Savart pair
# ---------------------------------------------------------------------------

def leray_project(f: VectorField) -> VectorField:
    """Project onto divergence-free fields: f_hat - k (k . f_hat)/|k|^2.

    The k = 0 (mean) mode passes through unchanged.
    """
    g = f.grid
    p1, p2 = kernels.leray_pair(f.c1.coeffs, f.c2.coeffs, g.k1, g.k2, g.inv_ksq_int)
    return VectorField(ScalarField.from_coeffs(g, p1, copy=False),
                       ScalarField.from_coeffs(g, p2, copy=False))


def curl2d(f: VectorField) -> ScalarField:
    """Scalar curl d1 f2 - d2 f1 via spectral derivatives."""
    return spectral_derivative(f.c2, 1) - spectral_derivative(f.c1, 2)


def biot_savart(omega: ScalarField) -> VectorField:
    """Divergence-free velocity with the given scalar vorticity.

    Builds the stream function psi from Laplace(psi) = omega - mean(omega)
    and returns the rotated gradient (-d2 psi, d1 psi), so that
    curl2d(biot_savart(omega)) = omega - mean(omega).
    """
    c = np.array(omega.coeffs, copy=True)
    c[0, 0] = 0.0  # zero-mean convention
    psi = invert_laplacian(ScalarField.from_coeffs(omega.grid, c, copy=False))
    return VectorField(-spectral_derivative(psi, 2), spectral_derivative(psi, 1))


# ---------------------------------------------------------------------------
# advection products (shared with the dynamics module)
# ---------------------------------------------------------------------------

def advect_scalar(v: VectorField, f: ScalarField, do_dealias: bool = True) -> ScalarField:
    """(v . grad) f with the quadratic product dealiased."""
    fx = spectral_derivative(f, 1).values
    fy = spectral_derivative(f, 2).values
    prod = kernels.advect(v.c1.values, v.c2.values, fx, fy)
    out = ScalarField.from_values(f.grid, prod, copy=False)
    return dealias(out) if do_dealias else out


def advect_vector(v: VectorField, f: VectorField, do_dealias: bool = True) -> VectorField:
    """(v . grad) f componentwise."""
    return VectorField(advect_scalar(v, f.c1, do_dealias),
                       advect_scalar(v, f.c2, do_dealias))


# ---------------------------------------------------------------------------
# Bony decomposition
# ---------------------------------------------------------------------------

def _block_values(f: ScalarField, part: DyadicPartition) -> list[np.ndarray]:
    """Real-space dyadic blocks of f, index order j = -1 .. j_max."""
    coeffs = f.coeffs
    out = []
    for j in range(-1, part.j_max + 1):
        localised = coeffs * part.block_multiplier(j)
        if localised.any():
            out.append(np.fft.ifft2(localised).real)
        else:
            out.append(None)  # identically zero block
    return out


def paraproduct(u: ScalarField, v: ScalarField, part: DyadicPartition) -> ScalarField:
    """Low-high part of the product: sum_{j>=1} S_{j-1}u * Delta_j v, dealiased."""
    if u.grid != v.grid:
        raise ConfigurationError("paraproduct needs fields on one grid")
    bu = _block_values(u, part)
    bv = _block_values(v, part)
    n = u.grid.n
    acc = np.zeros((n, n))
    cutoff = np.zeros((n, n))  # S_{j-1}u, built cumulatively
    for j in range(1, part.j_max + 1):
        prev = bu[j - 1]  # list index j-1 holds block j-2, the top of S_{j-1}
        if prev is not None:
            cutoff = cutoff + prev
        if bv[j + 1] is not None:
            acc += cutoff * bv[j + 1]
    return dealias(ScalarField.from_values(u.grid, acc, copy=False))


def remainder(u: ScalarField, v: ScalarField, part: DyadicPartition) -> ScalarField:
    """Comparable-frequency part: sum over |j - m| <= 1 of Delta_j u Delta_m v."""
    if u.grid != v.grid:
        raise ConfigurationError("remainder needs fields on one grid")
    bu = _block_values(u, part)
    bv = _block_values(v, part)
    n = u.grid.n
    acc = np.zeros((n, n))
    count = part.j_max + 2
    for idx in range(count):
        if bu[idx] is None:
            continue
        lo, hi = max(0, idx - 1), min(count - 1, idx + 1)
        near = None
        for m in range(lo, hi + 1):
            if bv[m] is not None:
                near = bv[m] if near is None else near + bv[m]
        if near is not None:
            acc += bu[idx] * near
    return dealias(ScalarField.from_values(u.grid, acc, copy=False))


def bony_reconstruct(u: ScalarField, v: ScalarField, part: DyadicPartition) -> float:
    """Max pointwise residual of uv - T_u(v) - T_v(u) - R(u, v), all dealiased."""
    product = dealias(ScalarField.from_values(u.grid, u.values * v.values, copy=False))
    recon = paraproduct(u, v, part) + paraproduct(v, u, part) + remainder(u, v, part)
    return sup_norm(product - recon)


# ---------------------------------------------------------------------------
# homogeneous Fourier multipliers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HomogeneousSymbol:
    """Multiplier smooth away from 0 and homogeneous of degree ``degree``.

    Implemented kinds: "identity" (constant 1), "abs_power" (|k|^degree),
    and "riesz" (k_a k_b / |k|^2, degree 0) with axes selecting (a, b).
    """

    kind: str
    degree: int = 0
    axes: tuple[int, int] = (1, 1)

    def tabulate(self, grid: Grid) -> np.ndarray:
        if self.kind == "identity":
            return np.ones((grid.n, grid.n))
        if self.kind == "abs_power":
            kmag = grid.kmag * grid.scale
            with np.errstate(divide="ignore"):
                table = np.where(kmag > 0, kmag**float(self.degree), 0.0)
            return table
        if self.kind == "riesz":
            if not set(self.axes) <= {1, 2}:
                raise ConfigurationError(f"riesz axes must be in (1, 2), got {self.axes}")
            ka = grid.k1 if self.axes[0] == 1 else grid.k2
            kb = grid.k1 if self.axes[1] == 1 else grid.k2
            return ka * kb * grid.inv_ksq_int
        raise ConfigurationError(f"unsupported multiplier symbol {self.kind!r}")


def paraproduct_transport(v: VectorField, f: ScalarField,
                          part: DyadicPartition) -> ScalarField:
    """Paraproduct part of the transport operator: sum_c T_{v_c}(d_c f)."""
    return (paraproduct(v.c1, spectral_derivative(f, 1), part)
            + paraproduct(v.c2, spectral_derivative(f, 2), part))


# ---------------------------------------------------------------------------
# commutators
# ---------------------------------------------------------------------------

def commutator_block(v: VectorField, f: ScalarField, j: int,
                     part: DyadicPartition) -> ScalarField:
    """Transport/block commutator (v . grad)(Delta_j f) - Delta_j((v . grad) f)."""
    _require_solenoidal(v, "commutator_block")
    from .littlewood_paley import dyadic_block

    direct = advect_scalar(v, dyadic_block(f, j, part))
    swapped = dyadic_block(advect_scalar(v, f), j, part)
    return direct - swapped


def commutator_para_multiplier(v: VectorField, f: ScalarField,
                               symbol: HomogeneousSymbol,
                               part: DyadicPartition) -> ScalarField:
    """Commutator between the transport paraproduct and a multiplier symbol."""
    table = symbol.tabulate(f.grid)
    kf = ScalarField.from_coeffs(f.grid, f.coeffs * table, copy=False)
    first = paraproduct_transport(v, kf, part)
    second = ScalarField.from_coeffs(
        f.grid, paraproduct_transport(v, f, part).coeffs * table, copy=False
    )
    return first - second


def commutator_leray(f: VectorField, g: VectorField) -> VectorField:
    """Transport/projection commutator (f . grad)(Pg) - P((f . grad) g).

    Both inputs must be solenoidal, so Pg = g and the commutator reduces to
    the projection complement of the advection term.
    """
    _require_solenoidal(f, "commutator_leray")
    _require_solenoidal(g, "commutator_leray")
    adv = advect_vector(f, g)
    return adv - leray_project(adv)


# ---------------------------------------------------------------------------
# observed-ratio measurements for the continuity/commutator estimates
# ---------------------------------------------------------------------------

def _grad_fields(v: VectorField) -> list[ScalarField]:
    return [spectral_derivative(c, axis) for c in v.components for axis in (1, 2)]


def grad_sup(v: VectorField) -> float:
    """Max sup norm over the four entries of the Jacobian."""
    return max(sup_norm(df) for df in _grad_fields(v))


def grad_besov(v: VectorField, spec: BesovSpec, part: DyadicPartition) -> float:
    """Sum of the Jacobian entries' Besov norms (sum convention throughout)."""
    return sum(besov_norm(df, spec, part) for df in _grad_fields(v))


def paraproduct_bound_ratio(u: ScalarField, v: ScalarField, part: DyadicPartition,
                            s: float = 1.0) -> float:
    """Observed constant in ||T_u(v)||_{B^s} <= C ||u||_inf ||v||_{B^s} (r = 1)."""
    spec = BesovSpec(s, INF, 1.0)
    num = besov_norm(paraproduct(u, v, part), spec, part)
    den = sup_norm(u) * besov_norm(v, spec, part)
    return num / den


def commutator_block_ratio(v: VectorField, f: ScalarField, part: DyadicPartition,
                           s: float = 1.0) -> float:
    """Observed constant in the summed transport/block commutator estimate.

    sum_j 2^{js} ||[v.grad, Delta_j] f||_inf against
    ||grad v||_inf ||f||_{B^s} + ||grad v||_{B^{s-1}} ||grad f||_inf.
    """
    total = 0.0
    for j in range(-1, part.j_max + 1):
        total += 2.0 ** (j * s) * sup_norm(commutator_block(v, f, j, part))
    fspec = BesovSpec(s, INF, 1.0)
    gspec = BesovSpec(s - 1.0, INF, 1.0)
    grad_f_sup = max(sup_norm(spectral_derivative(f, 1)), sup_norm(spectral_derivative(f, 2)))
    den = grad_sup(v) * besov_norm(f, fspec, part) + grad_besov(v, gspec, part) * grad_f_sup
    return total / den


def commutator_para_multiplier_ratio(v: VectorField, f: ScalarField,
                                     symbol: HomogeneousSymbol,
                                     part: DyadicPartition, s: float = 1.0) -> float:
    """Observed constant in ||[T_v, kappa(D)] f||_{B^{s-m+1}} <= C ||grad v||_inf ||f||_{B^s}.

    T_v here is the transport paraproduct, which shifts the commutator
    degree by one compared with the scalar paraproduct form.
    """
    comm = commutator_para_multiplier(v, f, symbol, part)
    out_spec = BesovSpec(s - symbol.degree, INF, 1.0)
    num = besov_norm(comm, out_spec, part)
    den = grad_sup(v) * besov_norm(f, BesovSpec(s, INF, 1.0), part)
    return num / den


def commutator_leray_ratio(f: VectorField, g: VectorField,
                           part: DyadicPartition) -> float:
    """Observed constant in ||[f.grad, P] g||_{B^1} <= C ||f||_{B^1} ||g||_{B^1}."""
    spec = BesovSpec(1.0, INF, 1.0)
    num = besov_norm(commutator_leray(f, g), spec, part)
    den = besov_norm(f, spec, part) * besov_norm(g, spec, part)
    return num / den


def projected_advection_ratio(f: VectorField, v: VectorField,
                              part: DyadicPartition) -> float:
    """Observed constant in ||P (f.grad) v||_{B^1} <= C ||f||_{B^1} ||v||_{B^2}."""
    _require_solenoidal(f, "projected_advection_ratio")
    _require_solenoidal(v, "projected_advection_ratio")
    num = besov_norm(leray_project(advect_vector(f, v)), BesovSpec(1.0, INF, 1.0), part)
    den = besov_norm(f, BesovSpec(1.0, INF, 1.0), part) * besov_norm(v, BesovSpec(2.0, INF, 1.0), part)
    return num / den


def random_solenoidal(grid: Grid, rng: np.random.Generator,
                      kmin: float = 1.0, kmax: float | None = None,
                      amplitude: float = 1.0) -> VectorField:
    """Seeded random divergence-free field via a band-limited vorticity."""
    from .spectral import random_band_limited

    omega = random_band_limited(grid, rng, kmin=kmin, kmax=kmax, amplitude=1.0)
    v = biot_savart(omega)
    peak = max(sup_norm(v.c1), sup_norm(v.c2))
    if peak > 0:
        v = v * (amplitude / peak)
    return v
