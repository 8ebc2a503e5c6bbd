"""Panel quadrature, principal-value subtraction, and analytic tails.

Every assertion here is checked against scipy.integrate.quad (with cauchy /
oscillatory weights) or a closed form, never against the module itself.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import quad
from scipy.special import exp1

from fkwaves import ModelParams
from fkwaves.dispersion import eval_L
from fkwaves.quadrature import (
    build_panels,
    exp_tail_integrals,
    panel_integral,
    pv_panel_integral,
    tail_integral,
)

PV_TOL = 1e-9
TAIL_TOL = 1e-7

P1 = ModelParams(mu=1.0, alpha=0.0)


class TestPanels:
    def test_weights_integrate_constants(self):
        grid = build_panels(37.0, poles=(4.2, 11.5))
        assert grid.nodes.min() > 0.0
        assert grid.nodes.max() < 37.0
        assert np.sum(grid.weights) == pytest.approx(37.0, abs=1e-9)

    def test_no_node_on_a_pole(self):
        grid = build_panels(20.0, poles=(5.0,))
        assert np.min(np.abs(grid.nodes - 5.0)) > 1e-12

    def test_plain_integral_of_cosine(self):
        grid = build_panels(25.0)
        vals = np.cos(grid.nodes)[None, :]
        assert panel_integral(grid, vals)[0] == pytest.approx(
            np.sin(25.0), abs=1e-11)

    def test_refine_concentrates_nodes(self):
        base = build_panels(30.0)
        fine = build_panels(30.0, refine=((12.0, 0.05),))
        near = lambda g: np.sum(np.abs(g.nodes - 12.0) < 0.5)
        assert near(fine) > near(base)


class TestPrincipalValue:
    @pytest.mark.parametrize("r", [3.7, 9.2])
    def test_cosine_over_simple_pole(self, r):
        K = 30.0
        grid = build_panels(K, poles=(r,))
        f = (np.cos(grid.nodes) / (grid.nodes - r))[None, :]
        strengths = np.array([[np.cos(r)]])
        got = pv_panel_integral(grid, f, np.array([r]), strengths)[0]
        want = quad(np.cos, 0.0, K, weight="cauchy", wvar=r,
                    limit=400)[0]
        assert got == pytest.approx(want, abs=PV_TOL)

    def test_two_poles(self):
        K = 30.0
        poles = np.array([4.0, 6.0])
        grid = build_panels(K, poles=tuple(poles))

        def g(k):
            return np.sin(k + 0.3)

        f = (g(grid.nodes) / ((grid.nodes - 4.0) * (grid.nodes - 6.0)))
        # residues of f at each pole
        c = np.array([[g(4.0) / (4.0 - 6.0), g(6.0) / (6.0 - 4.0)]])
        got = pv_panel_integral(grid, f[None, :], poles, c)[0]
        # oracle: split the domain between the poles so each piece holds one
        w1 = quad(lambda k: g(k) / (k - 6.0), 0.0, 5.0, weight="cauchy",
                  wvar=4.0, limit=400)[0]
        w2 = quad(lambda k: g(k) / (k - 4.0), 5.0, K, weight="cauchy",
                  wvar=6.0, limit=400)[0]
        assert got == pytest.approx(w1 + w2, abs=1e-8)


class TestExpTails:
    @pytest.mark.parametrize("a", [0.7, -1.3])
    def test_p1_against_exponential_integral(self, a):
        # integral_K^inf e^{iak}/k dk = E1(-iaK) for a > 0, conjugate else
        K = 12.0
        T = exp_tail_integrals(a, 3, K)
        want = exp1(-1j * abs(a) * K)
        if a < 0:
            want = np.conj(want)
        assert_allclose(T[1], want, rtol=1e-10, atol=1e-12)

    @pytest.mark.parametrize("a,p", [(0.7, 2), (0.7, 4), (-1.3, 3)])
    def test_higher_p_against_oscillatory_quad(self, a, p):
        K = 12.0
        B = K + 400 * np.pi / abs(a)
        re = quad(lambda k: k**-p, K, B, weight="cos", wvar=a, limit=2000)[0]
        im = quad(lambda k: k**-p, K, B, weight="sin", wvar=a, limit=2000)[0]
        # leading remainder of the truncated upper limit, by parts
        rem = -np.exp(1j * a * B) * B**-p / (1j * a)
        got = exp_tail_integrals(a, p, K)[p]
        assert_allclose(got, re + 1j * im + rem, atol=1e-9)

    def test_zero_frequency_closed_form(self):
        K = 9.0
        T = exp_tail_integrals(0.0, 4, K)
        for p in (2, 3, 4):
            assert T[p] == pytest.approx(K ** (1 - p) / (p - 1), rel=1e-14)


class TestDispersionTail:
    @pytest.mark.parametrize("xi,extra_p", [(0.3, 0), (-0.7, 0), (1.1, 1)])
    def test_against_oscillatory_quad(self, xi, extra_p):
        V, K = 0.5, 60.0
        got = tail_integral(np.array([xi]), V, P1, K, extra_p)[0]

        def f(k):
            return 1.0 / (k**extra_p * np.real(eval_L(np.array([k]), V, P1))[0])

        # composite Gauss over whole periods plus the by-parts remainder
        x, w = np.polynomial.legendre.leggauss(40)
        B = K + 1200 * np.pi / abs(xi)
        edges = np.arange(K, B, 2 * np.pi / abs(xi))
        total = 0.0 + 0.0j
        for a, b in zip(edges[:-1], edges[1:]):
            half, mid = 0.5 * (b - a), 0.5 * (a + b)
            kk = half * x + mid
            fv = 1.0 / (kk**extra_p * np.real(eval_L(kk, V, P1)))
            total += half * np.sum(w * fv * np.exp(1j * xi * kk))
        total += -np.exp(1j * xi * edges[-1]) * f(edges[-1]) / (1j * xi)
        assert_allclose(got, total, atol=TAIL_TOL)
