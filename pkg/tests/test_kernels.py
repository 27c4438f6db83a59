import os
import subprocess
import sys

import numpy as np
import pytest

from lpmhd import kernels
from lpmhd.errors import ConfigurationError


@pytest.fixture
def arrays(rng):
    shape = (32, 32)
    real = [rng.standard_normal(shape) for _ in range(4)]
    cplx = [rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            for _ in range(5)]
    k1 = rng.standard_normal(shape)
    k2 = rng.standard_normal(shape)
    inv = rng.standard_normal(shape) ** 2
    return real, cplx, k1, k2, inv


def test_numpy_backend_always_available():
    assert "numpy" in kernels.available_backends()


def test_unknown_backend_rejected():
    with pytest.raises(ConfigurationError):
        kernels.get_backend("fortran")


@pytest.mark.skipif("numba" not in kernels.available_backends(),
                    reason="numba backend not importable")
def test_backends_agree(arrays):
    real, cplx, k1, k2, inv = arrays
    np_impl = kernels.get_backend("numpy")
    nb_impl = kernels.get_backend("numba")

    a = np_impl["advect"](real[0], real[1], real[2], real[3])
    b = nb_impl["advect"](real[0], real[1], real[2], real[3])
    np.testing.assert_allclose(a, b, rtol=1e-15, atol=0)

    p1a, p2a = np_impl["leray_pair"](cplx[0], cplx[1], k1, k2, inv)
    p1b, p2b = nb_impl["leray_pair"](cplx[0], cplx[1], k1, k2, inv)
    np.testing.assert_allclose(p1a, p1b, rtol=1e-14, atol=1e-15)
    np.testing.assert_allclose(p2a, p2b, rtol=1e-14, atol=1e-15)

    ma = np_impl["apply_multiplier"](cplx[0], inv)
    mb = nb_impl["apply_multiplier"](cplx[0], inv)
    np.testing.assert_allclose(ma, mb, rtol=1e-15, atol=0)

    ra = np_impl["rk4_combine"](cplx[0], cplx[1], cplx[2], cplx[3], cplx[4], 1e-3)
    rb = nb_impl["rk4_combine"](cplx[0], cplx[1], cplx[2], cplx[3], cplx[4], 1e-3)
    np.testing.assert_allclose(ra, rb, rtol=1e-15, atol=0)


def test_env_flag_selects_numpy_fallback():
    env = dict(os.environ, LPMHD_BACKEND="numpy")
    code = ("import lpmhd.kernels as k; "
            "assert k.BACKEND_NAME == 'numpy'; "
            "assert k.advect is k.get_backend('numpy')['advect']")
    subprocess.run([sys.executable, "-c", code], check=True, env=env)


def test_env_flag_rejects_unknown_backend():
    env = dict(os.environ, LPMHD_BACKEND="cuda")
    proc = subprocess.run([sys.executable, "-c", "import lpmhd.kernels"],
                          env=env, capture_output=True, text=True)
    assert proc.returncode != 0
    assert "unknown kernel backend" in proc.stderr
