"""Periodic grid, FFT-backed fields, and Fourier-multiplier primitives.

The computational domain is the square torus [0, length)^2 sampled on an
n x n collocation lattice (n a power of two, n >= 16).  Fields carry their
real-space samples together with a lazily cached table of full-lattice
Fourier coefficients (numpy ``fft2`` convention, unnormalised).  All
operators act as multipliers on the integer wavenumber lattice
k in {-n/2, ..., n/2 - 1}^2 and return fresh fields; nothing here mutates
its inputs.

Derivatives are spectral only.  Finite differences appear nowhere in this
module; they exist solely as an independent oracle in the test suite.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import ConfigurationError

TWO_PI = 2.0 * np.pi

_MAX_DERIVATIVE_ORDER = 4


class Grid:
    """Periodic collocation/frequency lattice.

    Attributes:
        n: points per axis (power of two, >= 16).
        length: domain period (default 2*pi).
        k1, k2: integer wavenumber lattices, shape (n, n), fft ordering.
        kmag: |k| on the integer lattice.
        dealias_mask: True where |k1| <= n/3 and |k2| <= n/3 (2/3 rule).
        scale: 2*pi/length; physical wavenumber = scale * integer k.
    """

    def __init__(self, n: int, length: float = TWO_PI):
        if n < 16 or (n & (n - 1)) != 0:
            raise ConfigurationError(f"grid size must be a power of two >= 16, got {n}")
        if length <= 0:
            raise ConfigurationError(f"domain length must be positive, got {length}")
        self.n = int(n)
        self.length = float(length)
        self.scale = TWO_PI / self.length

        k = np.fft.fftfreq(self.n, d=1.0 / self.n)  # integers -n/2..n/2-1
        self.k1 = np.repeat(k[:, None], self.n, axis=1)
        self.k2 = np.repeat(k[None, :], self.n, axis=0)
        self.kmag = np.hypot(self.k1, self.k2)
        self.ksq_phys = (self.scale**2) * (self.k1**2 + self.k2**2)

        cutoff = self.n / 3.0
        self.dealias_mask = (np.abs(self.k1) <= cutoff) & (np.abs(self.k2) <= cutoff)

        # -1/|k|^2 with the zero mode projected out (mean-free convention)
        ksq_int = self.k1**2 + self.k2**2
        with np.errstate(divide="ignore"):
            inv = np.where(self.ksq_phys > 0.0, -1.0 / self.ksq_phys, 0.0)
            self.inv_ksq_int = np.where(ksq_int > 0.0, 1.0 / ksq_int, 0.0)
        self.inv_neg_ksq = inv

        x = np.arange(self.n) * (self.length / self.n)
        self.x1 = np.repeat(x[:, None], self.n, axis=1)
        self.x2 = np.repeat(x[None, :], self.n, axis=0)

        for arr in (self.k1, self.k2, self.kmag, self.ksq_phys, self.dealias_mask,
                    self.inv_neg_ksq, self.inv_ksq_int, self.x1, self.x2):
            arr.setflags(write=False)
        self._deriv_cache: dict[tuple[int, int], np.ndarray] = {}

    @property
    def freqs(self):
        """Integer wavenumber lattice as a (k1, k2) pair."""
        return self.k1, self.k2

    @property
    def spacing(self) -> float:
        return self.length / self.n

    def __eq__(self, other):
        return isinstance(other, Grid) and self.n == other.n and self.length == other.length

    def __hash__(self):
        return hash((self.n, self.length))

    def __repr__(self):
        return f"Grid(n={self.n}, length={self.length!r})"

    def derivative_multiplier(self, axis: int, order: int) -> np.ndarray:
        """Tabulated (i*k_axis)^order with the Nyquist line zeroed for odd orders.

        The k = -n/2 mode has no conjugate partner, so an odd power of ik
        cannot stay Hermitian there; zeroing it keeps outputs real.  Inputs
        band-limited below the dealias cutoff never touch that line.
        """
        key = (axis, order)
        cached = self._deriv_cache.get(key)
        if cached is not None:
            return cached
        k = self.k1 if axis == 1 else self.k2
        mult = (1j * self.scale * k) ** order
        if order % 2 == 1:
            mult = np.where(k == -self.n // 2, 0.0, mult)
        mult = np.ascontiguousarray(mult)
        mult.setflags(write=False)
        self._deriv_cache[key] = mult
        return mult


class ScalarField:
    """Real samples on the collocation lattice with cached Fourier coefficients.

    Either representation may be supplied; the other is computed on first
    access and cached.  Stored arrays are marked read-only: fields are
    immutable values and every operation returns a fresh field.
    """

    __slots__ = ("grid", "_values", "_coeffs")

    def __init__(self, grid: Grid, values=None, coeffs=None):
        if values is None and coeffs is None:
            raise ConfigurationError("ScalarField needs values or coeffs")
        self.grid = grid
        self._values = values
        self._coeffs = coeffs

    @classmethod
    def from_values(cls, grid: Grid, values, copy: bool = True) -> "ScalarField":
        arr = np.array(values, dtype=np.float64, copy=copy)
        if arr.shape != (grid.n, grid.n):
            raise ConfigurationError(f"values shape {arr.shape} != grid {(grid.n, grid.n)}")
        arr.setflags(write=False)
        return cls(grid, values=arr)

    @classmethod
    def from_coeffs(cls, grid: Grid, coeffs, copy: bool = True) -> "ScalarField":
        arr = np.array(coeffs, dtype=np.complex128, copy=copy)
        if arr.shape != (grid.n, grid.n):
            raise ConfigurationError(f"coeffs shape {arr.shape} != grid {(grid.n, grid.n)}")
        arr.setflags(write=False)
        return cls(grid, coeffs=arr)

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            v = np.fft.ifft2(self._coeffs).real
            v.setflags(write=False)
            self._values = v
        return self._values

    @property
    def coeffs(self) -> np.ndarray:
        if self._coeffs is None:
            c = np.fft.fft2(self._values)
            c.setflags(write=False)
            self._coeffs = c
        return self._coeffs

    # -- arithmetic (real-space, linear: preserves band limits) ------------

    def __add__(self, other):
        _check_same_grid(self, other)
        return ScalarField.from_values(self.grid, self.values + other.values, copy=False)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return ScalarField.from_values(self.grid, self.values - other.values, copy=False)

    def __mul__(self, scalar):
        return ScalarField.from_values(self.grid, self.values * float(scalar), copy=False)

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField.from_values(self.grid, -self.values, copy=False)

    def __repr__(self):
        return f"ScalarField(grid={self.grid!r})"


class VectorField:
    """Two scalar components on one shared grid."""

    __slots__ = ("c1", "c2")

    def __init__(self, c1: ScalarField, c2: ScalarField):
        if c1.grid != c2.grid:
            raise ConfigurationError("vector components must share a grid")
        self.c1 = c1
        self.c2 = c2

    @classmethod
    def from_values(cls, grid: Grid, v1, v2) -> "VectorField":
        return cls(ScalarField.from_values(grid, v1), ScalarField.from_values(grid, v2))

    @classmethod
    def zero(cls, grid: Grid) -> "VectorField":
        z = np.zeros((grid.n, grid.n))
        return cls(ScalarField.from_values(grid, z, copy=False),
                   ScalarField.from_values(grid, z, copy=False))

    @property
    def grid(self) -> Grid:
        return self.c1.grid

    @property
    def components(self):
        return self.c1, self.c2

    def __add__(self, other):
        return VectorField(self.c1 + other.c1, self.c2 + other.c2)

    def __sub__(self, other):
        return VectorField(self.c1 - other.c1, self.c2 - other.c2)

    def __mul__(self, scalar):
        return VectorField(self.c1 * scalar, self.c2 * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return VectorField(-self.c1, -self.c2)

    def __repr__(self):
        return f"VectorField(grid={self.grid!r})"


def _check_same_grid(f, g):
    if f.grid != g.grid:
        raise ConfigurationError("fields live on different grids")


# ---------------------------------------------------------------------------
# multiplier operations
# ---------------------------------------------------------------------------

def apply_multiplier(f: ScalarField, mult: np.ndarray) -> ScalarField:
    """Return the field with coefficients mult(k) * f_hat(k)."""
    return ScalarField.from_coeffs(
        f.grid, kernels.apply_multiplier(f.coeffs, mult), copy=False
    )


def spectral_derivative(f: ScalarField, axis: int, order: int = 1) -> ScalarField:
    """Differentiate ``order`` times along ``axis`` (1 or 2) in frequency space.

    Exact for band-limited inputs.  Orders above 4 are rejected: nothing in
    the solver needs them and high powers of ik amplify rounding noise.
    """
    if axis not in (1, 2):
        raise ConfigurationError(f"axis must be 1 or 2, got {axis}")
    if not isinstance(order, (int, np.integer)) or order < 1 or order > _MAX_DERIVATIVE_ORDER:
        raise ConfigurationError(
            f"derivative order must be an integer in 1..{_MAX_DERIVATIVE_ORDER}, got {order}"
        )
    return apply_multiplier(f, f.grid.derivative_multiplier(axis, int(order)))


def invert_laplacian(f: ScalarField) -> ScalarField:
    """Solve Laplace(g) = f - mean(f) with mean(g) = 0.

    Coefficients: g_hat(k) = -f_hat(k)/|k|^2 for k != 0, g_hat(0) = 0.
    """
    return apply_multiplier(f, f.grid.inv_neg_ksq)


def dealias(f: ScalarField) -> ScalarField:
    """Zero every coefficient outside the 2/3-rule mask.  Idempotent."""
    return ScalarField.from_coeffs(f.grid, np.where(f.grid.dealias_mask, f.coeffs, 0.0),
                                   copy=False)


def dealias_vector(v: VectorField) -> VectorField:
    return VectorField(dealias(v.c1), dealias(v.c2))


def gradient(f: ScalarField) -> VectorField:
    return VectorField(spectral_derivative(f, 1), spectral_derivative(f, 2))


def divergence(v: VectorField) -> ScalarField:
    return spectral_derivative(v.c1, 1) + spectral_derivative(v.c2, 2)


def divergence_bound(v: VectorField) -> float:
    """Cheap sup-norm bound on div(v): l1 mass of its spectrum / n^2.

    Avoids an inverse transform; used for precondition checks in hot paths.
    """
    g = v.grid
    m1 = g.derivative_multiplier(1, 1)
    m2 = g.derivative_multiplier(2, 1)
    div_hat = m1 * v.c1.coeffs + m2 * v.c2.coeffs
    return float(np.sum(np.abs(div_hat)) / g.n**2)


# ---------------------------------------------------------------------------
# norms and reductions
# ---------------------------------------------------------------------------

def mean(f: ScalarField) -> float:
    return float(f.values.mean())


def sup_norm(f) -> float:
    """Max pointwise magnitude; for vectors, the max over both components."""
    if isinstance(f, VectorField):
        return max(sup_norm(f.c1), sup_norm(f.c2))
    return float(np.max(np.abs(f.values)))


def l2_norm(f) -> float:
    """Quadrature L^2 norm sqrt(sum |f|^2 h^2); vectors use both components."""
    if isinstance(f, VectorField):
        h = f.grid.spacing
        return float(h * np.sqrt(np.sum(f.c1.values**2) + np.sum(f.c2.values**2)))
    return float(f.grid.spacing * np.sqrt(np.sum(f.values**2)))


def l2_norm_spectral(f: ScalarField) -> float:
    """Same norm evaluated from coefficients (Parseval route)."""
    g = f.grid
    return float((g.length / g.n**2) * np.sqrt(np.sum(np.abs(f.coeffs) ** 2)))


def inner_l2(f: ScalarField, g: ScalarField) -> float:
    _check_same_grid(f, g)
    h = f.grid.spacing
    return float(h * h * np.sum(f.values * g.values))


def inner_l2_vector(u: VectorField, v: VectorField) -> float:
    return inner_l2(u.c1, v.c1) + inner_l2(u.c2, v.c2)


# ---------------------------------------------------------------------------
# field constructors
# ---------------------------------------------------------------------------

def constant_field(grid: Grid, value: float) -> ScalarField:
    return ScalarField.from_values(grid, np.full((grid.n, grid.n), float(value)),
                                   copy=False)


def zero_field(grid: Grid) -> ScalarField:
    return constant_field(grid, 0.0)


def random_band_limited(grid: Grid, rng: np.random.Generator,
                        kmin: float = 1.0, kmax: float | None = None,
                        amplitude: float = 1.0) -> ScalarField:
    """Seeded random real field supported in kmin <= |k| <= kmax, zero mean.

    Defaults to the dealias band; normalised to the requested sup norm.
    """
    if kmax is None:
        kmax = grid.n / 3.0
    noise = rng.standard_normal((grid.n, grid.n))
    c = np.fft.fft2(noise)
    keep = (grid.kmag >= kmin) & (grid.kmag <= kmax) & grid.dealias_mask
    c = np.where(keep, c, 0.0)
    c[0, 0] = 0.0
    f = ScalarField.from_coeffs(grid, c, copy=False)
    peak = sup_norm(f)
    if peak > 0:
        f = f * (amplitude / peak)
    return f
