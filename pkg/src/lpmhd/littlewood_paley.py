"""Dyadic frequency decomposition and Besov norms on the periodic lattice.

The decomposition is built from one smooth radial profile rho(r): equal to 1
for r <= 1.1, to 0 for r >= 1.9, joined by the exp(-1/t)-mollified step, and
nonincreasing in r.  Tabulated on the integer wavenumber lattice:

    block j >= 0:   phi_j(k) = rho(|k| / 2^j) - rho(|k| / 2^(j-1))
    low block:      chi(k)   = rho(2 |k|)
    cutoff  S_j:    chi(2^-j k) = rho(|k| / 2^(j-1))

With the low block at half the profile scale the three defining identities
hold exactly (telescoping, no approximation):

    chi + sum_j phi_j = 1 on the whole lattice,
    S_j = chi + phi_0 + ... + phi_(j-1),
    supp phi_j inside the annulus 2^(j-1) <= |k| <= 2^(j+1).

Blocks beyond j_max = ceil(log2 max|k|) + 1 vanish identically on the
lattice, so the finite truncation is exact rather than approximate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DiagnosticError
from .spectral import (
    Grid,
    ScalarField,
    apply_multiplier,
    l2_norm,
    sup_norm,
)

PROFILE_INNER = 1.1
PROFILE_OUTER = 1.9

INF = math.inf


def _bump(t) -> np.ndarray:
    """exp(-1/t) extended by 0 for t <= 0."""
    t = np.asarray(t, dtype=np.float64)
    safe = np.maximum(t, np.finfo(np.float64).tiny)
    return np.where(t > 0.0, np.exp(-1.0 / safe), 0.0)


def radial_profile(r) -> np.ndarray:
    """Smooth step: 1 on [0, 1.1], 0 on [1.9, inf), C-infinity in between."""
    r = np.asarray(r, dtype=np.float64)
    t = (r - PROFILE_INNER) / (PROFILE_OUTER - PROFILE_INNER)
    up = _bump(1.0 - t)
    down = _bump(t)
    return up / (up + down + np.finfo(np.float64).tiny)


class DyadicPartition:
    """Tabulated dyadic multipliers chi, phi_j, S_j for one grid.

    Immutable after construction; shareable across threads.
    """

    def __init__(self, grid: Grid):
        self.grid = grid
        kmax = float(np.max(grid.kmag))
        self.j_max = int(math.ceil(math.log2(kmax))) + 1

        self.chi = radial_profile(2.0 * grid.kmag)
        self.phi = np.empty((self.j_max + 1, grid.n, grid.n))
        for j in range(self.j_max + 1):
            self.phi[j] = radial_profile(grid.kmag / 2.0**j) - radial_profile(
                grid.kmag / 2.0 ** (j - 1)
            )
        self._s_tables = np.empty((self.j_max + 1, grid.n, grid.n))
        for j in range(self.j_max + 1):
            self._s_tables[j] = radial_profile(grid.kmag / 2.0 ** (j - 1))
        for arr in (self.chi, self.phi, self._s_tables):
            arr.setflags(write=False)

    def block_multiplier(self, j: int) -> np.ndarray:
        if j < -1 or j > self.j_max:
            raise IndexError(f"block index {j} outside -1..{self.j_max}")
        return self.chi if j == -1 else self.phi[j]

    def cutoff_multiplier(self, j: int) -> np.ndarray:
        if j < 0 or j > self.j_max:
            raise IndexError(f"cutoff index {j} outside 0..{self.j_max}")
        return self._s_tables[j]

    def __repr__(self):
        return f"DyadicPartition(grid={self.grid!r}, j_max={self.j_max})"


def build_partition(grid: Grid) -> DyadicPartition:
    """Tabulate the dyadic partition of unity on the grid's frequency lattice."""
    return DyadicPartition(grid)


def dyadic_block(f: ScalarField, j: int, part: DyadicPartition) -> ScalarField:
    """Frequency-localise f to the j-th dyadic annulus (j = -1 is the low ball)."""
    return apply_multiplier(f, part.block_multiplier(j))


def low_cutoff(f: ScalarField, j: int, part: DyadicPartition) -> ScalarField:
    """Keep frequencies below ~2^j: equals the sum of blocks up to j-1 exactly."""
    return apply_multiplier(f, part.cutoff_multiplier(j))


@dataclass(frozen=True)
class BesovSpec:
    """Besov space indices (s, p, r); implemented exponents p in {2, inf},
    r in {1, inf}."""

    s: float
    p: float = INF
    r: float = 1.0

    def __post_init__(self):
        if self.p not in (2, 2.0, INF):
            raise ConfigurationError(f"integrability exponent p={self.p} not implemented")
        if self.r not in (1, 1.0, INF):
            raise ConfigurationError(f"summation exponent r={self.r} not implemented")


B0_INF_1 = BesovSpec(0.0, INF, 1.0)
B1_INF_1 = BesovSpec(1.0, INF, 1.0)
B2_INF_1 = BesovSpec(2.0, INF, 1.0)


def _lp_norm(block: ScalarField, p: float) -> float:
    return sup_norm(block) if p == INF else l2_norm(block)


def block_norms(f: ScalarField, part: DyadicPartition, p: float = INF) -> np.ndarray:
    """L^p norms of every dyadic block, index order j = -1 .. j_max."""
    coeffs = f.coeffs
    out = np.empty(part.j_max + 2)
    for idx, j in enumerate(range(-1, part.j_max + 1)):
        mult = part.block_multiplier(j)
        localised = coeffs * mult
        if not localised.any():
            out[idx] = 0.0
            continue
        out[idx] = _lp_norm(ScalarField.from_coeffs(f.grid, localised, copy=False), p)
    return out


def besov_norm(f, spec: BesovSpec, part: DyadicPartition) -> float:
    """Weighted block-norm sum: ||2^{js} ||Delta_j f||_{L^p}||_{l^r}, j >= -1.

    The j = -1 block carries its literal weight 2^{-s}.  Vector fields use
    the sum of their component norms.
    """
    if hasattr(f, "components"):
        return sum(besov_norm(c, spec, part) for c in f.components)
    norms = block_norms(f, part, spec.p)
    weights = 2.0 ** (spec.s * np.arange(-1, part.j_max + 1))
    terms = weights * norms
    return float(np.sum(terms) if spec.r == 1 else np.max(terms))


# ---------------------------------------------------------------------------
# Bernstein ratio sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BernsteinReport:
    """Empirical derivative/embedding ratios for annulus-supported samples.

    grad ratios are ||grad f||_p / (2^j ||f||_p); the embedding ratio divides
    ||f||_q / ||f||_p by 2^{j d (1/p - 1/q)} with d = 2.  ``constant`` is the
    smallest C with all gradient ratios inside [1/C, C].
    """

    j: int
    p: float
    q: float
    samples: int
    grad_ratio_min: float
    grad_ratio_max: float
    pq_ratio_min: float
    pq_ratio_max: float
    constant: float


def annulus_sample(grid: Grid, part: DyadicPartition, j: int,
                   rng: np.random.Generator) -> ScalarField:
    """Random real field spectrally supported in the j-th dyadic annulus."""
    mult = part.block_multiplier(j)
    noise_coeffs = np.fft.fft2(rng.standard_normal((grid.n, grid.n)))
    c = noise_coeffs * mult
    # drop the Nyquist lines: they have no conjugate partner under k -> -k
    c[grid.n // 2, :] = 0.0
    c[:, grid.n // 2] = 0.0
    if not c.any():
        raise DiagnosticError(f"dyadic annulus j={j} is empty on the lattice")
    return ScalarField.from_coeffs(grid, c, copy=False)


def bernstein_ratio(part: DyadicPartition, j: int, p: float = INF, q: float = INF,
                    sample_count: int = 20, rng=None) -> BernsteinReport:
    """Measure derivative and p->q embedding ratios over random annulus fields.

    ||grad f||_p is the max of the two partial derivatives' L^p norms.
    """
    if j < 0:
        raise ConfigurationError("bernstein_ratio needs an annulus index j >= 0")
    if rng is None:
        rng = np.random.default_rng(0)
    from .spectral import spectral_derivative  # local import avoids cycle at module load

    grid = part.grid
    grad_ratios = []
    pq_ratios = []
    pq_scale = 2.0 ** (j * 2.0 * (1.0 / p - 1.0 / q)) if p != q else 1.0
    for _ in range(sample_count):
        f = annulus_sample(grid, part, j, rng)
        fp = _lp_norm(f, p)
        gp = max(_lp_norm(spectral_derivative(f, 1), p),
                 _lp_norm(spectral_derivative(f, 2), p))
        grad_ratios.append(gp / (2.0**j * fp))
        fq = _lp_norm(f, q) if q != p else fp
        pq_ratios.append(fq / fp / pq_scale)
    grad_ratios = np.array(grad_ratios)
    pq_ratios = np.array(pq_ratios)
    constant = float(max(grad_ratios.max(), 1.0 / grad_ratios.min()))
    return BernsteinReport(
        j=j, p=p, q=q, samples=sample_count,
        grad_ratio_min=float(grad_ratios.min()),
        grad_ratio_max=float(grad_ratios.max()),
        pq_ratio_min=float(pq_ratios.min()),
        pq_ratio_max=float(pq_ratios.max()),
        constant=constant,
    )
