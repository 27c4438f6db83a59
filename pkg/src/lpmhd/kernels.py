"""Hot elementwise kernels with numba and pure-numpy implementations.

Every function here is a flat loop over the collocation or frequency
lattice; they dominate the non-FFT part of a time step.  Two complete
implementations are kept: numba ``@njit`` loops and vectorised numpy.
The active backend is chosen once at import time from the environment
variable ``LPMHD_BACKEND`` (``"numba"`` or ``"numpy"``); the default is
numba when it imports, numpy otherwise.  ``benchmarks/bench_kernels.py``
compares the two.
"""

import os

import numpy as np

from .errors import ConfigurationError


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def _advect_numpy(a1, a2, g1, g2):
    return a1 * g1 + a2 * g2


def _leray_pair_numpy(c1, c2, k1, k2, inv_ksq):
    kc = (k1 * c1 + k2 * c2) * inv_ksq
    return c1 - k1 * kc, c2 - k2 * kc


def _apply_multiplier_numpy(c, m):
    return c * m


def _rk4_combine_numpy(y, k1, k2, k3, k4, dt):
    return y + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


_NUMPY_IMPLS = {
    "advect": _advect_numpy,
    "leray_pair": _leray_pair_numpy,
    "apply_multiplier": _apply_multiplier_numpy,
    "rk4_combine": _rk4_combine_numpy,
}

_IMPLS = {"numpy": _NUMPY_IMPLS}


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    njit = None

if njit is not None:

    @njit(cache=True)
    def _advect_numba(a1, a2, g1, g2):
        n0, n1 = g1.shape
        out = np.empty_like(g1)
        for i in range(n0):
            for j in range(n1):
                out[i, j] = a1[i, j] * g1[i, j] + a2[i, j] * g2[i, j]
        return out

    @njit(cache=True)
    def _leray_pair_numba(c1, c2, k1, k2, inv_ksq):
        n0, n1 = c1.shape
        p1 = np.empty_like(c1)
        p2 = np.empty_like(c2)
        for i in range(n0):
            for j in range(n1):
                kc = (k1[i, j] * c1[i, j] + k2[i, j] * c2[i, j]) * inv_ksq[i, j]
                p1[i, j] = c1[i, j] - k1[i, j] * kc
                p2[i, j] = c2[i, j] - k2[i, j] * kc
        return p1, p2

    @njit(cache=True)
    def _apply_multiplier_numba(c, m):
        n0, n1 = c.shape
        out = np.empty_like(c)
        for i in range(n0):
            for j in range(n1):
                out[i, j] = c[i, j] * m[i, j]
        return out

    @njit(cache=True)
    def _rk4_combine_numba(y, k1, k2, k3, k4, dt):
        n0, n1 = y.shape
        out = np.empty_like(y)
        w = dt / 6.0
        for i in range(n0):
            for j in range(n1):
                out[i, j] = y[i, j] + w * (
                    k1[i, j] + 2.0 * (k2[i, j] + k3[i, j]) + k4[i, j]
                )
        return out

    _IMPLS["numba"] = {
        "advect": _advect_numba,
        "leray_pair": _leray_pair_numba,
        "apply_multiplier": _apply_multiplier_numba,
        "rk4_combine": _rk4_combine_numba,
    }


# ---------------------------------------------------------------------------
# backend selection
# ---------------------------------------------------------------------------

def available_backends():
    """Names of the kernel backends importable in this process."""
    return tuple(sorted(_IMPLS))


def get_backend(name):
    """Return the kernel table for ``name`` (for benchmarks and tests)."""
    try:
        return _IMPLS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown kernel backend {name!r}; available: {available_backends()}"
        ) from None


def _select_backend():
    requested = os.environ.get("LPMHD_BACKEND", "").strip().lower()
    if requested:
        return requested, get_backend(requested)
    name = "numba" if "numba" in _IMPLS else "numpy"
    return name, _IMPLS[name]


BACKEND_NAME, _ACTIVE = _select_backend()

advect = _ACTIVE["advect"]
leray_pair = _ACTIVE["leray_pair"]
apply_multiplier = _ACTIVE["apply_multiplier"]
rk4_combine = _ACTIVE["rk4_combine"]
