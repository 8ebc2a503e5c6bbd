"""Backend selection and cross-backend trajectory identity."""

import os
import subprocess
import sys

import numpy as np
import pytest

from fkwaves import BACKEND, PURE_ENV_VAR
from fkwaves import _chain_numpy

try:
    from fkwaves import _chain_core
except ImportError:
    _chain_core = None


def _trajectory(run_chain, n_steps):
    rng = np.random.default_rng(7)
    u = np.concatenate([[1.05], 1.0 + 0.1 * rng.standard_normal(60),
                        -1.0 + 0.1 * rng.standard_normal(60), [-0.95]])
    v = 0.05 * rng.standard_normal(u.size)
    v[0] = v[-1] = 0.0
    run_chain(u, v, 1.0, 0.05, 0.1, 0.01, n_steps)
    return u, v


class TestSelection:
    def test_active_backend_is_compiled(self):
        # the build installs the extension; absence would be a packaging bug
        assert BACKEND == "cython"

    def test_env_var_forces_numpy(self):
        code = ("import fkwaves; print(fkwaves.BACKEND)")
        env = dict(os.environ, **{PURE_ENV_VAR: "1"})
        out = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "numpy"


class TestBitIdentity:
    @pytest.mark.skipif(_chain_core is None, reason="extension not built")
    def test_trajectories_bit_identical(self):
        u_a, v_a = _trajectory(_chain_numpy.run_chain, 5000)
        u_b, v_b = _trajectory(_chain_core.run_chain, 5000)
        assert np.array_equal(u_a, u_b)
        assert np.array_equal(v_a, v_b)
