"""Dispersion function, its root finding, and resonance location.

Oracles are independent of the module internals: finite differences for the
derivative, dense sign-change scans for real roots, and the one-dimensional
reduction of the resonance system solved directly with brentq.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose
from scipy.optimize import brentq

from fkwaves import (
    Branch,
    ModelParams,
    ResonantVelocity,
    classify_real_root,
    complex_roots,
    eval_L,
    eval_Lk,
    is_resonant,
    real_roots,
    resonance_velocities,
    root_set,
    sigma_AC,
)

FD_TOL = 1e-6
ROOT_TOL = 1e-8
RES_TOL = 1e-8

P1 = ModelParams(mu=1.0, alpha=0.0)


class TestEvalL:
    def test_value_at_zero(self):
        # L(0) = mu exactly
        assert eval_L(np.array([0.0]), 0.5, P1)[0] == pytest.approx(1.0)

    def test_derivative_matches_finite_difference(self):
        rng = np.random.default_rng(7)
        ks = rng.uniform(0.3, 30.0, 12) + 1j * rng.uniform(-2.0, 2.0, 12)
        h = 1e-6
        for alpha in (0.0, 0.25):
            p = ModelParams(1.0, alpha)
            fd = (eval_L(ks + h, 0.4, p) - eval_L(ks - h, 0.4, p)) / (2 * h)
            assert_allclose(eval_Lk(ks, 0.4, p), fd, rtol=1e-5, atol=FD_TOL)

    @settings(max_examples=60, deadline=None)
    @given(kr=st.floats(-25, 25), ki=st.floats(-3, 3),
           alpha=st.floats(0, 1), V=st.floats(0.05, 1.0))
    def test_conjugate_reflection_symmetry(self, kr, ki, alpha, V):
        # L(-conj(k)) = conj(L(k)) holds for every damping level
        p = ModelParams(1.0, alpha)
        k = np.array([complex(kr, ki)])
        lhs = eval_L(-np.conj(k), V, p)
        rhs = np.conj(eval_L(k, V, p))
        assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def _scan_real_root_count(V, params, k_max=80.0):
    # independent count: sign changes of L(k) on a dense grid, k > 0
    k = np.linspace(1e-6, k_max, 400001)
    f = np.real(eval_L(k, V, params))
    return int(np.sum(np.sign(f[1:]) != np.sign(f[:-1])))


class TestRealRoots:
    @pytest.mark.parametrize("V", [0.5, 0.3, 0.2, 0.11])
    def test_roots_satisfy_dispersion(self, V):
        rs = real_roots(V, P1)
        assert np.all(rs > 0)
        assert np.max(np.abs(eval_L(rs, V, P1))) < ROOT_TOL

    @pytest.mark.parametrize("V", [0.5, 0.2, 0.11])
    def test_count_matches_scan(self, V):
        rs = real_roots(V, P1)
        assert len(rs) == _scan_real_root_count(V, P1)

    def test_single_pair_above_first_resonance(self):
        assert len(real_roots(0.5, P1)) == 1

    def test_radiation_side_above_first_resonance(self):
        # group velocity below the front speed puts the phonon behind
        r = real_roots(0.5, P1)[0]
        assert classify_real_root(r, 0.5, P1) is Branch.REAL_BEHIND
        cg = np.sin(r) / np.sqrt(1.0 + 4.0 * np.sin(r / 2.0) ** 2)
        assert cg < 0.5


class TestComplexRoots:
    @pytest.mark.parametrize("alpha", [0.0, 0.1])
    def test_roots_satisfy_dispersion(self, alpha):
        p = ModelParams(1.0, alpha)
        roots = complex_roots(0.5, p, 40)
        assert len(roots) >= 80        # both half planes
        ks = np.array([r.k for r in roots])
        assert np.max(np.abs(eval_L(ks, 0.5, p))) < 1e-8

    @pytest.mark.parametrize("alpha", [0.0, 0.1])
    def test_root_set_partition_is_consistent(self, alpha):
        p = ModelParams(1.0, alpha)
        rs = root_set(0.5, p, 60)
        assert np.all(rs.upper.imag > 0)
        assert np.all(rs.lower.imag < 0)

        def sort(z):
            return np.array(sorted(z, key=lambda w: (w.imag, w.real)))

        # each half family is closed under the mirror k -> -conj(k)
        assert_allclose(sort(rs.upper), sort(-np.conj(rs.upper)),
                        rtol=1e-8, atol=1e-8)
        assert_allclose(sort(rs.lower), sort(-np.conj(rs.lower)),
                        rtol=1e-8, atol=1e-8)
        if alpha == 0.0:
            # without damping the halves are complex conjugates
            assert_allclose(sort(rs.lower), sort(np.conj(rs.upper)),
                            rtol=1e-12, atol=1e-12)


class TestResonances:
    def test_against_scalar_reduction(self):
        # eliminating V from L = dL/dk = 0 leaves
        #   g(k) = mu + 2 - 2 cos k - k sin k = 0,  V = sqrt(sin k / k)
        mu = 1.0

        def g(k):
            return mu + 2.0 - 2.0 * np.cos(k) - k * np.sin(k)

        ks = np.linspace(0.5, 40.0, 16001)
        vals = g(ks)
        found = []
        for a, b in zip(ks[:-1], ks[1:]):
            if g(a) * g(b) < 0:
                k0 = brentq(g, a, b, xtol=1e-13)
                s = np.sin(k0) / k0
                if s > 0:
                    found.append((np.sqrt(s), k0))
        found.sort(reverse=True)
        got = resonance_velocities(P1, count=5)
        for (Vg, kg), (Vo, ko) in zip(got, found[:5]):
            assert Vg == pytest.approx(Vo, abs=RES_TOL)
            assert kg == pytest.approx(ko, abs=1e-6)

    def test_first_resonance_value(self):
        # regression anchor, cross-checked by the reduction test above
        V1, k1 = resonance_velocities(P1, count=1)[0]
        assert V1 == pytest.approx(0.24441475248391872, abs=1e-9)
        assert k1 == pytest.approx(8.866559875871447, abs=1e-6)

    def test_is_resonant_flags(self):
        V1 = resonance_velocities(P1, count=1)[0][0]
        assert is_resonant(V1, P1)
        assert not is_resonant(0.5, P1)
        assert not is_resonant(0.3570147628397361, P1)

    def test_resonant_velocity_refused(self):
        V1 = resonance_velocities(P1, count=1)[0][0]
        with pytest.raises(ResonantVelocity):
            sigma_AC(V1, P1)
