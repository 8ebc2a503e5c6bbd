"""Principal-value panel quadrature and analytic tails for profile integrals.

All profile and kernel integrals in this package have the form

    integral_0^inf  g(k, xi) / (k^p L(k, V))  dk

with g a sine/cosine or complex exponential. The integrand has simple poles
at the positive real roots of L (principal value, alpha = 0 only) and decays
like k^{-p-2}. The strategy is Gauss-Legendre panels on [0, K] with poles
removed by subtraction, plus a closed-form tail for [K, inf) from expanding
1/L in inverse powers and incomplete trigonometric integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import sici

from .errors import QuadratureFail
from .params import ModelParams

GAUSS_ORDER = 24
PANEL_WIDTH = 1.5
# K = KFAC * (largest possible real root); |1/L| <= 1/((KFAC^2-1) V^2 k^2) beyond
KFAC = 10.0
TAIL_TERMS = 5
TAIL_TARGET = 1e-10


@dataclass(frozen=True)
class PanelGrid:
    """Gauss-Legendre nodes and weights covering [0, K]."""

    nodes: np.ndarray
    weights: np.ndarray
    K: float


@lru_cache(maxsize=8)
def _gauss_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    return leggauss(order)


def build_panels(K: float, poles: tuple[float, ...] = (),
                 width: float = PANEL_WIDTH,
                 order: int = GAUSS_ORDER,
                 refine: tuple[tuple[float, float], ...] = ()) -> PanelGrid:
    """Panels on [0, K] with edges pinned to the poles.

    Each pole becomes a panel edge (Gauss nodes are interior, so no node can
    collide with it) and gets geometrically shrinking neighbor panels, which
    keeps the pole-subtracted integrand resolved even when two poles are close.
    refine entries (center, scale) add edges at center +- scale * powers of
    two without any pole subtraction; they resolve sharp but smooth peaks,
    e.g. a complex pole pair pinching the axis just past a resonance.
    """
    edges = set(np.linspace(0.0, K, int(np.ceil(K / width)) + 1).tolist())
    ps = sorted(poles)
    for i, r in enumerate(ps):
        gaps = [r, K - r]
        if i > 0:
            gaps.append(0.5 * (r - ps[i - 1]))
        if i + 1 < len(ps):
            gaps.append(0.5 * (ps[i + 1] - r))
        s = min(1.0, *gaps)
        edges.add(r)
        for f in (0.02, 0.1, 0.35):
            edges.add(r - s * f)
            edges.add(r + s * f)
    for xc, scale in refine:
        edges.add(xc)
        for f in (0.5, 1.0, 2.0, 4.0, 8.0):
            edges.add(xc - scale * f)
            edges.add(xc + scale * f)
    es = np.array(sorted(e for e in edges if 0.0 <= e <= K))
    es = es[np.concatenate([[True], np.diff(es) > 1e-9])]
    x, w = _gauss_rule(order)
    a, b = es[:-1], es[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    nodes = (half[:, None] * x[None, :] + mid[:, None]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return PanelGrid(nodes=nodes, weights=weights, K=float(es[-1]))


@dataclass(frozen=True)
class ContourGrid:
    """Panels along [0, K] indented by semicircular arcs around near-axis poles.

    Real-axis segments carry real nodes; each arc contributes complex nodes
    with complex weights i rho e^{i theta} d theta. Taking Re or Im of an
    integrand commutes with integration segment by segment, so splitting the
    contour this way lets callers integrate only the convergent part near
    k = 0 while still detouring around poles.
    """

    nodes_real: np.ndarray
    weights_real: np.ndarray
    nodes_arc: np.ndarray
    weights_arc: np.ndarray
    K: float


def build_contour(K: float, arcs: tuple[tuple[float, float, int], ...],
                  width: float = PANEL_WIDTH,
                  order: int = GAUSS_ORDER) -> ContourGrid:
    """Contour from 0 to K with arcs (center, rho, side); side +1 bulges up.

    An arc replaces the real segment (center-rho, center+rho); use side +1
    to pass above a pole below the axis and side -1 to pass below one above.
    """
    edges = set(np.linspace(0.0, K, int(np.ceil(K / width)) + 1).tolist())
    for xc, rho, _ in arcs:
        edges.add(xc - rho)
        edges.add(xc + rho)
    es = np.array(sorted(e for e in edges if 0.0 <= e <= K))
    es = es[np.concatenate([[True], np.diff(es) > 1e-9])]
    x, w = _gauss_rule(order)
    keep = np.ones(len(es) - 1, bool)
    mids_all = 0.5 * (es[:-1] + es[1:])
    for xc, rho, _ in arcs:
        keep &= np.abs(mids_all - xc) > rho - 1e-12
    a, b = es[:-1][keep], es[1:][keep]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    nodes_r = (half[:, None] * x[None, :] + mid[:, None]).ravel()
    weights_r = (half[:, None] * w[None, :]).ravel()
    arc_nodes, arc_weights = [], []
    for xc, rho, side in arcs:
        t0, t1 = (np.pi, 0.0) if side > 0 else (np.pi, 2.0 * np.pi)
        th = 0.5 * (t1 - t0) * x + 0.5 * (t0 + t1)
        wt = 0.5 * (t1 - t0) * w
        arc_nodes.append(xc + rho * np.exp(1j * th))
        arc_weights.append(1j * rho * np.exp(1j * th) * wt)
    na = np.concatenate(arc_nodes) if arcs else np.array([], complex)
    wa = np.concatenate(arc_weights) if arcs else np.array([], complex)
    return ContourGrid(nodes_real=nodes_r, weights_real=weights_r,
                       nodes_arc=na, weights_arc=wa, K=float(es[-1]))


def pv_panel_integral(grid: PanelGrid, f_nodes: np.ndarray,
                      poles: np.ndarray, strengths: np.ndarray) -> np.ndarray:
    """Principal value of integral_0^K f(k) dk, poles r_j with residues c_j.

    f_nodes has shape (n_xi, n_nodes), strengths (n_xi, n_poles). Subtracted
    form: near its closest pole the difference f - c/(k - r) is assembled as
    (f*(k-r) - c) / (k-r), with f*(k-r) evaluated as f_nodes * (k-r); the
    remaining poles are far enough for plain subtraction. The subtracted
    c_j/(k-r_j) integrate to c_j log((K-r_j)/r_j).
    """
    k = grid.nodes
    vals = np.array(f_nodes, copy=True)
    if len(poles):
        D = k[None, :] - poles[:, None]            # (n_poles, n_nodes)
        jstar = np.argmin(np.abs(D), axis=0)       # (n_nodes,)
        inv = 1.0 / D                              # all |D| > 0 by construction
        d_inv = inv[jstar, np.arange(k.size)][None, :]
        c_star = strengths[:, jstar]
        # remove the naive nearest-pole term, add back the grouped version:
        # vals <- ((vals - full + c*/d*) * d* - c*) / d*
        vals -= strengths @ inv
        vals += c_star * d_inv
        vals /= d_inv
        vals -= c_star
        vals *= d_inv
    out = vals @ grid.weights
    for r, c in zip(poles, strengths.T):
        out = out + c * math.log((grid.K - r) / r)
    return out


def panel_integral(grid: PanelGrid, f_nodes: np.ndarray) -> np.ndarray:
    """Plain integral_0^K f(k) dk for pole-free integrands."""
    return f_nodes @ grid.weights


# ---------------------------------------------------------------------------
# analytic tail
# ---------------------------------------------------------------------------

# Upward by-parts recursion for T[p] loses relative accuracy like
# (aK)^{p-1}/(p-1)! against the K^{1-p} decay of the true values, so it is
# only used for |a| K <= CF_SPLIT; beyond that each order comes from the
# continued fraction for the exponential integral, which tightens as |a| K
# grows. e^{CF_SPLIT} * eps bounds the recursion's relative error.
CF_SPLIT = 18.0
CF_EPS = 1e-15
CF_MAX_ITER = 500


def _expint_cf(p: int, z: np.ndarray) -> np.ndarray:
    """E_p(z) = integral_1^inf e^{-zt} t^{-p} dt by modified Lentz.

    Valid for |arg z| < pi; here z = -i|a|K sits on the imaginary axis,
    where the fraction still converges (slower as |z| drops, hence the
    CF_SPLIT floor on |z|).
    """
    tiny = 1e-300
    b = z + float(p)
    c = np.full(z.shape, 1.0 / tiny, dtype=complex)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, CF_MAX_ITER + 1):
        ai = -float(i) * (p - 1 + i)
        b = b + 2.0
        d = ai * d + b
        np.copyto(d, tiny, where=np.abs(d) < tiny)
        d = 1.0 / d
        c = b + ai / c
        np.copyto(c, tiny, where=np.abs(c) < tiny)
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) < CF_EPS):
            break
    else:
        raise QuadratureFail(
            "exponential-integral continued fraction did not converge")
    return np.exp(-z) * h


def exp_tail_integrals(a, p_max: int, K: float) -> np.ndarray:
    """T[p] = integral_K^inf e^{iak} k^{-p} dk for p = 1 .. p_max.

    For |a| K <= CF_SPLIT, T[1] comes from the sine and cosine integrals and
    higher p follow from integrating by parts:
    T[p] = e^{iaK} K^{1-p}/(p-1) + ia/(p-1) T[p-1]. For larger |a| K each
    order is K^{1-p} E_p(-i|a|K) by continued fraction, keeping every T[p]
    accurate relative to its own magnitude. a = 0 is allowed only for
    p >= 2 (T[p] = K^{1-p}/(p-1)). Vectorized: scalar a gives shape
    (p_max+1,), an array gives (p_max+1, len(a)).
    """
    arr = np.atleast_1d(np.asarray(a, dtype=float))
    T = np.zeros((p_max + 1, arr.size), dtype=complex)
    av = np.abs(arr)
    zero = arr == 0.0
    if zero.any():
        T[1, zero] = np.nan
        for p in range(2, p_max + 1):
            T[p, zero] = K ** (1 - p) / (p - 1)
    rec = ~zero & (av * K <= CF_SPLIT)
    if rec.any():
        av_r = av[rec]
        si, ci = sici(av_r * K)
        t1 = -ci + 1j * (0.5 * np.pi - si)
        T[1, rec] = t1
        phase = np.exp(1j * av_r * K)
        prev = t1
        for p in range(2, p_max + 1):
            prev = phase * K ** (1 - p) / (p - 1) + (1j * av_r / (p - 1)) * prev
            T[p, rec] = prev
    cf = av * K > CF_SPLIT
    if cf.any():
        z = -1j * (av[cf] * K)
        for p in range(1, p_max + 1):
            T[p, cf] = K ** (1 - p) * _expint_cf(p, z)
    neg = arr < 0.0
    if neg.any():
        T[:, neg] = np.conj(T[:, neg])
    return T[:, 0] if np.isscalar(a) or np.ndim(a) == 0 else T


@lru_cache(maxsize=64)
def _inv_L_series(mu: float, alpha: float, V: float,
                  n_terms: int) -> tuple[tuple[tuple[int, int], complex], ...]:
    """Expansion sum_m w^m of 1/(1 - w) where 1/L = -w-series / (V^2 k^2).

    Entries ((j, p), c) stand for c * e^{ijk} / k^p. The generator is
    w = (mu + 2 - 2 cos k)/(V^2 k^2) - i alpha/(V k).
    """
    w: dict[tuple[int, int], complex] = {
        (0, 2): (mu + 2.0) / V**2,
        (1, 2): -1.0 / V**2,
        (-1, 2): -1.0 / V**2,
    }
    if alpha != 0.0:
        w[(0, 1)] = -1j * alpha / V
    total: dict[tuple[int, int], complex] = {(0, 0): 1.0}
    cur: dict[tuple[int, int], complex] = {(0, 0): 1.0}
    for _ in range(1, n_terms):
        nxt: dict[tuple[int, int], complex] = {}
        for (j1, p1), c1 in cur.items():
            for (j2, p2), c2 in w.items():
                key = (j1 + j2, p1 + p2)
                nxt[key] = nxt.get(key, 0.0) + c1 * c2
        for key, c in nxt.items():
            total[key] = total.get(key, 0.0) + c
        cur = nxt
    return tuple(sorted(total.items()))


def tail_terms_needed(V: float, params: ModelParams, K: float) -> int:
    """Series length so the geometric remainder stays below TAIL_TARGET."""
    w_bound = (params.mu + 4.0) / (V**2 * K**2) + params.alpha / (V * K)
    if w_bound >= 0.5:
        raise QuadratureFail(
            f"tail series does not converge fast enough (|w| bound {w_bound:.3f}); "
            "increase the panel cutoff")
    need = int(np.ceil(np.log(TAIL_TARGET) / np.log(w_bound))) + 1
    return max(TAIL_TERMS, min(need, 24))


def tail_integral(xis: np.ndarray, V: float, params: ModelParams, K: float,
                  extra_p: int, n_terms: int | None = None) -> np.ndarray:
    """integral_K^inf e^{ik xi} / (k^extra_p L(k, V)) dk for each xi."""
    if n_terms is None:
        n_terms = tail_terms_needed(V, params, K)
    series = _inv_L_series(params.mu, params.alpha, V, n_terms)
    p_max = max(p for (_, p), _ in series) + 2 + extra_p
    xis = np.atleast_1d(np.asarray(xis, float))
    out = np.zeros(xis.shape, dtype=complex)
    by_shift: dict[int, list[tuple[int, complex]]] = {}
    for (j, p), c in series:
        by_shift.setdefault(j, []).append((p, c))
    for j, terms in by_shift.items():
        T = exp_tail_integrals(xis + j, p_max, K)
        for p, c in terms:
            out = out + c * T[p + 2 + extra_p]
    out = -out / V**2
    if not np.all(np.isfinite(out)):
        raise QuadratureFail("tail series produced non-finite values")
    return out
