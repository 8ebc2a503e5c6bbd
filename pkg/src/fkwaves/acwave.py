"""Classical traveling kink of the driven chain and its kinetic relation.

In the frame xi = n - V t the displacement U(xi) of a steadily moving front
solves a linear advance-delay equation on each side of xi = 0, closed by the
continuity condition U(0) = 0. Fourier inversion gives U as a contour
integral; residues at dispersion roots turn it into rapidly converging sums,
one per side. The applied stress sigma is then pinned to the kinetic value
Sigma(V), and the wave is admissible when U keeps the sign pattern
U > 0 behind the front and U < 0 ahead of it.

Two independent evaluation routes are provided: residue sums over a truncated
root set (U_profile, kernel_q) and principal-value quadrature with analytic
tails (U_integral, q_integral). They cross-validate each other; the
quadrature route is the accuracy workhorse for the kernel-based solvers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dispersion import (
    eval_L,
    eval_Lk,
    is_resonant,
    real_roots,
    root_set,
    DEFAULT_N_PAIRS,
)
from .errors import QuadratureFail, ResonantVelocity, RootCountMismatch
from .params import ModelParams
from .quadrature import (
    KFAC,
    build_contour,
    build_panels,
    pv_panel_integral,
    tail_integral,
)

# imaginary residue of analytically real sums beyond this means bad roots
REALNESS_TOL = 1e-9
# one-sided branch disagreement at xi = 0 beyond this suggests n_pairs too low
TRUNCATION_TOL = 1e-4
# admissibility sampling
ADMISSIBLE_RANGE = 40.0
ADMISSIBLE_SPACING = 0.05
# quadrature self-check target at construction time
QUAD_SELF_TOL = 1e-8


@dataclass(frozen=True)
class ProfileSample:
    xi: float
    value: float


@dataclass(frozen=True)
class ACSolution:
    """Classical z = 0 wave at one velocity."""

    V: float
    params: ModelParams
    sigma: float
    admissible: bool
    u_plus: float   # equilibrium ahead, sigma - 1
    u_minus: float  # equilibrium behind, sigma + 1


def _require_nonresonant(V: float, params: ModelParams) -> None:
    if is_resonant(V, params):
        raise ResonantVelocity(f"V={V} is within tolerance of a resonance")


def _real_checked(values: np.ndarray, what: str):
    bad = np.max(np.abs(values.imag)) if values.size else 0.0
    if bad > REALNESS_TOL:
        raise RootCountMismatch(
            f"{what} has imaginary residue {bad:.2e}; root set is inconsistent")
    return values.real


def sigma_AC(V: float, params: ModelParams,
             n_pairs: int = DEFAULT_N_PAIRS) -> float:
    """Kinetic relation Sigma(V) of the classical branch.

    For alpha = 0 this is the phonon sum 2 mu sum_{r>0} 1/|r L_k(r)| over
    positive real roots (both signs of each root contribute equally). For
    alpha > 0 no real roots exist and sigma is fixed by continuity U(0) = 0,
    which resolves to mu (S_plus - S_minus) with S_pm the residue sums
    1/(k L_k) over the upper/lower half-plane roots. The recipes agree in
    the alpha -> 0 limit.
    """
    _require_nonresonant(V, params)
    if params.alpha == 0.0:
        rs = real_roots(V, params)
        return 2.0 * params.mu * float(np.sum(
            1.0 / np.abs(rs * eval_Lk(rs, V, params).real)))
    roots = root_set(V, params, n_pairs)
    s_plus = np.sum(1.0 / (roots.upper * eval_Lk(roots.upper, V, params)))
    s_minus = np.sum(1.0 / (roots.lower * eval_Lk(roots.lower, V, params)))
    sig = params.mu * (s_plus - s_minus)
    return float(_real_checked(np.array([sig]), "sigma residue sum")[0])


def _branch_terms(V: float, params: ModelParams, n_pairs: int):
    """Residue data for the two one-sided representations."""
    roots = root_set(V, params, n_pairs)
    kp = np.concatenate([roots.upper, roots.real_ahead.astype(complex),
                         -roots.real_ahead.astype(complex)])
    km = np.concatenate([roots.lower, roots.real_behind.astype(complex),
                         -roots.real_behind.astype(complex)])
    return kp, eval_Lk(kp, V, params), km, eval_Lk(km, V, params)


def _truncation_check(V: float, params: ModelParams, n_pairs: int,
                      plus0: float, minus0: float, what: str) -> None:
    if abs(plus0 - minus0) > TRUNCATION_TOL:
        from .errors import TruncationWarning
        warnings.warn(
            f"{what} branch mismatch {abs(plus0 - minus0):.2e} at xi=0 with "
            f"n_pairs={n_pairs}; increase n_pairs",
            TruncationWarning, stacklevel=3)


def U_profile(xi, V: float, params: ModelParams,
              n_pairs: int = DEFAULT_N_PAIRS):
    """Two-branch residue form of the wave profile U(xi) at sigma = Sigma(V).

    xi > 0 sums over upper-half roots and ahead-radiating phonons, xi < 0
    over their lower/behind partners; at xi = 0 both branches analytically
    give 0 and the average is returned (their mismatch measures truncation).
    """
    _require_nonresonant(V, params)
    sigma = sigma_AC(V, params, n_pairs)
    kp, lkp, km, lkm = _branch_terms(V, params, n_pairs)
    xi = np.atleast_1d(np.asarray(xi, float))
    out = np.empty(xi.shape)
    mu = params.mu

    def plus_branch(x):
        return sigma - 1.0 - 2.0 * mu * _real_checked(
            np.exp(1j * np.outer(x, kp)) @ (1.0 / (kp * lkp)), "U plus branch")

    def minus_branch(x):
        return sigma + 1.0 + 2.0 * mu * _real_checked(
            np.exp(1j * np.outer(x, km)) @ (1.0 / (km * lkm)), "U minus branch")

    pos, neg, zero = xi > 0, xi < 0, xi == 0
    if pos.any():
        out[pos] = plus_branch(xi[pos])
    if neg.any():
        out[neg] = minus_branch(xi[neg])
    if zero.any():
        p0 = plus_branch(np.zeros(1))[0]
        m0 = minus_branch(np.zeros(1))[0]
        _truncation_check(V, params, n_pairs, p0, m0, "U_profile")
        out[zero] = 0.5 * (p0 + m0)
    return out if out.size > 1 else float(out[0])


def kernel_q(xi, V: float, params: ModelParams,
             n_pairs: int = DEFAULT_N_PAIRS):
    """Residue form of the kernel q(xi) = -U'(xi); continuous at xi = 0."""
    _require_nonresonant(V, params)
    kp, lkp, km, lkm = _branch_terms(V, params, n_pairs)
    xi = np.atleast_1d(np.asarray(xi, float))
    out = np.empty(xi.shape)
    mu = params.mu

    def plus_branch(x):
        return 2.0 * mu * _real_checked(
            np.exp(1j * np.outer(x, kp)) @ (1j / lkp), "q plus branch")

    def minus_branch(x):
        return -2.0 * mu * _real_checked(
            np.exp(1j * np.outer(x, km)) @ (1j / lkm), "q minus branch")

    pos, neg, zero = xi > 0, xi < 0, xi == 0
    if pos.any():
        out[pos] = plus_branch(xi[pos])
    if neg.any():
        out[neg] = minus_branch(xi[neg])
    if zero.any():
        p0 = plus_branch(np.zeros(1))[0]
        m0 = minus_branch(np.zeros(1))[0]
        _truncation_check(V, params, n_pairs, p0, m0, "kernel_q")
        out[zero] = 0.5 * (p0 + m0)
    return out if out.size > 1 else float(out[0])


# ---------------------------------------------------------------------------
# quadrature route
# ---------------------------------------------------------------------------

class KernelQuadrature:
    """Principal-value quadrature evaluator for q(xi) and U(xi).

    Realizes the contour form of the profile integrals: a principal value
    along the real axis plus half-residue corrections at the real roots,
    with the oscillatory tail integrated analytically. Construction runs a
    self-check of q against a refined panel grid and raises QuadratureFail
    if the two disagree beyond tol.
    """

    # contour arcs engage for damped poles closer to the axis than this
    POLE_BAND = 0.3
    ARC_RHO = 0.08

    def __init__(self, V: float, params: ModelParams, tol: float = QUAD_SELF_TOL,
                 self_check: bool = True):
        _require_nonresonant(V, params)
        self.V = V
        self.params = params
        K = KFAC * np.sqrt(params.mu + 4.0) / V
        if params.alpha == 0.0:
            self.rs = real_roots(V, params)
            self.lkv = eval_Lk(self.rs, V, params).real
            self.cls = np.sign(self.rs * self.lkv)
            self._refine = self._plan_refine(V, params, K)
            self._grids = [self._make_grid(K, 1.0, 0)]
        else:
            self.rs = np.array([])
            self.lkv = np.array([])
            self.cls = np.array([])
            self._arcs = self._plan_arcs(V, params, K)
            self._grids = [self._make_grid(K, 1.0, 0)]
        if self_check:
            self._grids.append(self._make_grid(K, 0.5, 8))
            probe = np.array([0.0, 0.37, 1.0, -2.2])
            base = self._q_core(probe, 0)
            ref = self._q_core(probe, 1)
            err = float(np.max(np.abs(base - ref)))
            if err > tol:
                raise QuadratureFail(
                    f"panel quadrature self-check failed: {err:.2e} > {tol:.0e}")

    @staticmethod
    def _plan_refine(V: float, params: ModelParams, K: float):
        """Extra panel edges under complex pairs that pinch the real axis.

        Just past a resonance a conjugate pair sits at distance |Im k| << 1
        from the contour; the integrand stays smooth on the axis but peaks
        with that width, so panels are shrunk to match it.
        """
        roots = root_set(V, params, 60)
        found: dict[float, float] = {}
        for k in roots.upper:
            if abs(k.imag) < KernelQuadrature.POLE_BAND and 0.0 < k.real < K:
                xc = round(float(k.real), 6)
                sc = max(abs(float(k.imag)), 1e-3)
                found[xc] = min(found.get(xc, np.inf), sc)
        return tuple(sorted(found.items()))

    @staticmethod
    def _plan_arcs(V: float, params: ModelParams, K: float):
        """Indentation arcs around damped roots that hug the real axis."""
        roots = root_set(V, params, 60)
        near = [k for k in np.concatenate([roots.upper, roots.lower])
                if abs(k.imag) < KernelQuadrature.POLE_BAND
                and 0.3 < k.real < K - 1.0]
        near.sort(key=lambda k: abs(k.imag))
        arcs: list[tuple[float, float, int]] = []
        for k in near:
            rho = KernelQuadrature.ARC_RHO
            for xc, r0, _ in arcs:
                gap = abs(k.real - xc)
                if gap < rho + r0:
                    rho = -1.0  # overlaps an accepted arc; that arc covers it
                    break
                rho = min(rho, gap / 3.0)
            if rho > 0:
                arcs.append((float(k.real), rho, 1 if k.imag < 0 else -1))
        return tuple(sorted(arcs))

    def _make_grid(self, K: float, refine: float, extra_order: int):
        width = 1.5 * refine
        order = 24 + extra_order
        if self.params.alpha == 0.0:
            grid = build_panels(K, tuple(self.rs), width=width, order=order,
                                refine=self._refine)
            return grid, eval_L(grid.nodes, self.V, self.params).real
        grid = build_contour(K, self._arcs, width=width, order=order)
        return grid, (eval_L(grid.nodes_real, self.V, self.params),
                      eval_L(grid.nodes_arc, self.V, self.params))

    def _q_core(self, xi: np.ndarray, which: int) -> np.ndarray:
        V, mu = self.V, self.params.mu
        grid, Lnodes = self._grids[which]
        if self.params.alpha == 0.0:
            k = grid.nodes
            f = np.cos(np.outer(xi, k)) / Lnodes[None, :]
            c = np.cos(np.outer(xi, self.rs)) / self.lkv[None, :]
            pv = pv_panel_integral(grid, f, self.rs, c)
        else:
            Lr, La = Lnodes
            fr = (np.exp(1j * np.outer(xi, grid.nodes_real)) / Lr[None, :]).real
            pv = fr @ grid.weights_real
            if grid.nodes_arc.size:
                fa = np.exp(1j * np.outer(xi, grid.nodes_arc)) / La[None, :]
                pv = pv + (fa @ grid.weights_arc).real
        tail = tail_integral(xi, V, self.params, grid.K, extra_p=0).real
        out = (2.0 * mu / np.pi) * (pv + tail)
        for r, cl, lk in zip(self.rs, self.cls, self.lkv):
            out = out - 2.0 * mu * cl * np.sin(r * xi) / lk
        return out

    def q(self, xi) -> np.ndarray:
        """Kernel q(xi)."""
        xi = np.atleast_1d(np.asarray(xi, float))
        return self._q_core(xi, 0)

    def U(self, xi, sigma: float) -> np.ndarray:
        """Profile U(xi) at applied stress sigma."""
        xi = np.atleast_1d(np.asarray(xi, float))
        V, mu = self.V, self.params.mu
        grid, Lnodes = self._grids[0]
        if self.params.alpha == 0.0:
            k = grid.nodes
            f = np.sin(np.outer(xi, k)) / (k * Lnodes)[None, :]
            c = np.sin(np.outer(xi, self.rs)) / (self.rs * self.lkv)[None, :]
            pv = pv_panel_integral(grid, f, self.rs, c)
        else:
            Lr, La = Lnodes
            fr = (np.exp(1j * np.outer(xi, grid.nodes_real))
                  / (grid.nodes_real * Lr)[None, :]).imag
            pv = fr @ grid.weights_real
            if grid.nodes_arc.size:
                fa = (np.exp(1j * np.outer(xi, grid.nodes_arc))
                      / (grid.nodes_arc * La)[None, :])
                pv = pv + (fa @ grid.weights_arc).imag
        tail = tail_integral(xi, V, self.params, grid.K, extra_p=1).imag
        out = sigma - (2.0 * mu / np.pi) * (pv + tail)
        for r, cl, lk in zip(self.rs, self.cls, self.lkv):
            out = out - 2.0 * mu * cl * np.cos(r * xi) / (r * lk)
        return out


@lru_cache(maxsize=64)
def quad_kernel(V: float, params: ModelParams) -> KernelQuadrature:
    return KernelQuadrature(V, params)


def U_integral(xi, V: float, params: ModelParams):
    """Quadrature evaluation of U(xi) at sigma = Sigma(V).

    Independent of the residue route: principal-value panels over [0, K]
    with half-residue phonon corrections, plus an asymptotic tail. Serves
    as the oracle for U_profile.
    """
    qk = quad_kernel(V, params)
    sigma = sigma_AC(V, params)
    out = qk.U(xi, sigma)
    return out if out.size > 1 else float(out[0])


def q_integral(xi, V: float, params: ModelParams):
    """Quadrature evaluation of the kernel q(xi); oracle for kernel_q."""
    qk = quad_kernel(V, params)
    out = qk.q(xi)
    return out if out.size > 1 else float(out[0])


def ac_admissible(V: float, params: ModelParams,
                  span: float = ADMISSIBLE_RANGE, tol: float = 1e-6,
                  n_pairs: int = DEFAULT_N_PAIRS) -> bool:
    """Sign check of the classical wave: U > 0 for xi < 0, U < 0 for xi > 0.

    Samples at spacing <= 0.05 on +-(0, span], excluding |xi| < tol. Just
    below the threshold velocity the violation is a bump of height ~ q(0)^2
    squeezed against xi = 0, so the uniform grid is augmented with a
    geometric ladder from tol up to the first grid point, evaluated by
    quadrature (the residue sums are too noisy at that amplitude).
    """
    n = int(np.ceil(span / ADMISSIBLE_SPACING))
    xs = np.linspace(ADMISSIBLE_SPACING, span, n)
    xs = xs[xs >= tol]
    right = U_profile(xs, V, params, n_pairs)
    left = U_profile(-xs, V, params, n_pairs)
    if np.any(right >= 0.0) or np.any(left <= 0.0):
        return False
    ladder = []
    x = tol
    while x < ADMISSIBLE_SPACING:
        ladder.append(x)
        x *= 2.0
    lad = np.array(ladder)
    qk = quad_kernel(V, params)
    sigma = sigma_AC(V, params, n_pairs)
    return bool(np.all(qk.U(lad, sigma) < 0.0)
                and np.all(qk.U(-lad, sigma) > 0.0))


def ac_solution(V: float, params: ModelParams,
                n_pairs: int = DEFAULT_N_PAIRS) -> ACSolution:
    """Bundle sigma, admissibility, and equilibria of the classical wave."""
    sigma = sigma_AC(V, params, n_pairs)
    return ACSolution(
        V=V,
        params=params,
        sigma=sigma,
        admissible=ac_admissible(V, params, n_pairs=n_pairs),
        u_plus=sigma - 1.0,
        u_minus=sigma + 1.0,
    )
