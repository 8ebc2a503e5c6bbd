"""Threshold velocity and small-plateau expansion of the new branch.

The classical kink loses admissibility where the kernel value q(0) changes
sign; that velocity V0 is the bifurcation point of the z > 0 branch. Near
V0 the plateau is narrow and the shape function collapses onto its
endpoints, so z and the endpoint masses follow in closed form from the jet
of the kernel at 0: the value q(0), the one-sided slopes q'(0+) and q'(0-)
(q is continuous at 0 but kinked), and the shared quadratic coefficient.
Those numbers come from exact advance-delay identities, so no numerical
differentiation enters the default path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .acwave import quad_kernel, sigma_AC
from .dispersion import (
    DEFAULT_N_PAIRS,
    eval_Lk,
    is_resonant,
    real_roots,
    resonance_velocities,
)
from .errors import (
    NoPositiveRoot,
    NoSignChange,
    NotConverged,
    RegimeMismatch,
    ResonantVelocity,
)
from .newwave import ShapeFunction
from .params import ModelParams

# bisection width for the threshold velocity
V0_TOL = 1e-5
# scan resolution used to bracket the q(0) sign change
V0_SCAN_POINTS = 60
# margin kept between scan endpoints and a resonance
RESONANCE_MARGIN = 2e-3
# acceptable imaginary part when polishing quartic roots
QUARTIC_IMAG_TOL = 1e-8
FD_STEP = 1e-3


@dataclass(frozen=True)
class KernelJet:
    """Jet of the kernel q at the origin.

    q0 is q(0); q_plus / q_minus are the one-sided slopes q'(0+) / q'(0-);
    q2 is the quadratic coefficient shared by both sides:
    q(xi) ~ q0 + q'(0+-) xi + q2 xi^2 near 0.
    """

    V: float
    q0: float
    q_plus: float
    q_minus: float
    q2: float


def kernel_jet(V: float, params: ModelParams,
               n_pairs: int = DEFAULT_N_PAIRS,
               method: str = "identity") -> KernelJet:
    """Kernel jet at xi = 0 by one of three routes.

    "identity" (default) evaluates exact advance-delay identities with
    quadrature kernel values: the governing equation at the corner gives

        V^2 q'(0+) = alpha V q(0) - U(1) - U(-1) - mu (sigma - 1)
        q'(0+) - q'(0-) = 2 mu / V^2
        2 V^2 q2 = alpha V (q'(0+)+q'(0-))/2 + q(1) - (2+mu) q(0) + q(-1)

    "closed" uses the single-real-root closed form (valid above the first
    resonance only, RegimeMismatch below); "fd" estimates the one-sided
    slopes by polynomial extrapolation as an independent cross-check.
    """
    if is_resonant(V, params):
        raise ResonantVelocity(f"V={V} is within tolerance of a resonance")
    if method == "identity":
        return _jet_identity(V, params, n_pairs)
    if method == "closed":
        return _jet_closed(V, params, n_pairs)
    if method == "fd":
        return _jet_fd(V, params)
    raise ValueError(f"unknown jet method {method!r}")


def _jet_identity(V: float, params: ModelParams,
                  n_pairs: int) -> KernelJet:
    mu, alpha = params.mu, params.alpha
    qk = quad_kernel(V, params)
    sigma = sigma_AC(V, params, n_pairs)
    q0 = float(qk.q(np.zeros(1))[0])
    U1, Um1 = qk.U(np.array([1.0, -1.0]), sigma)
    q_plus = (alpha * V * q0 - (U1 + Um1) - mu * (sigma - 1.0)) / V**2
    q_minus = q_plus - 2.0 * mu / V**2
    q1, qm1 = qk.q(np.array([1.0, -1.0]))
    q2 = (alpha * V * 0.5 * (q_plus + q_minus)
          + q1 - (2.0 + mu) * q0 + qm1) / (2.0 * V**2)
    return KernelJet(V=V, q0=q0, q_plus=float(q_plus),
                     q_minus=float(q_minus), q2=float(q2))


def _jet_closed(V: float, params: ModelParams, n_pairs: int) -> KernelJet:
    """Single-root closed form; requires exactly one real root pair."""
    if params.alpha != 0.0:
        raise RegimeMismatch("closed form requires alpha = 0")
    mu = params.mu
    roots = real_roots(V, params)
    pos = sorted(r for r in roots if r > 0)
    if len(pos) != 1:
        raise RegimeMismatch(
            f"closed form needs a single real root pair, found {len(pos)}; "
            "V is below the first resonance")
    r = pos[0]
    lk = float(eval_Lk(np.array([r + 0j]), V, params).real[0])
    base = _jet_identity(V, params, n_pairs)
    s = 4.0 * mu * np.cos(r) / (r * lk)
    sig = sigma_AC(V, params, n_pairs)
    q_plus = (mu - sig * (2.0 + mu) - s) / V**2
    q_minus = (-mu - sig * (2.0 + mu) - s) / V**2
    return KernelJet(V=V, q0=base.q0, q_plus=q_plus, q_minus=q_minus,
                     q2=base.q2)


def _jet_fd(V: float, params: ModelParams) -> KernelJet:
    """One-sided polynomial extrapolation; cross-check route only.

    Fits a cubic through q on 0 and four one-sided offsets; the linear and
    quadratic fit coefficients estimate q'(0+-) and q2.
    """
    qk = quad_kernel(V, params)
    q0 = float(qk.q(np.zeros(1))[0])

    def one_sided(sign: float) -> tuple[float, float]:
        h = FD_STEP
        x = sign * np.array([0.0, h, 2 * h, 3 * h, 4 * h])
        v = qk.q(x)
        v[0] = q0
        c = np.polyfit(x, v, 3)
        return float(c[2]), float(c[1])

    qp, ap = one_sided(+1.0)
    qm, am = one_sided(-1.0)
    return KernelJet(V=V, q0=q0, q_plus=qp, q_minus=qm,
                     q2=0.5 * (ap + am))


def _q0_of_V(V: float, params: ModelParams) -> float:
    return float(quad_kernel(V, params).q(np.zeros(1))[0])


def threshold_V0(params: ModelParams, tol: float = V0_TOL,
                 V_max: float = 1.2) -> float:
    """Bifurcation velocity: the zero of q(0) along the classical branch.

    Scans velocities above the first resonance (for alpha = 0; from low V
    otherwise, stepping around resonant points is unnecessary since damping
    removes them) for sign changes of q(0) and bisects the one at the
    largest velocity to width tol. Damped chains keep remnant q(0)
    oscillations near former resonances at low V; those zeros are not the
    admissibility boundary, which is why the last sign change wins. Raises
    NoSignChange when q(0) keeps one sign over the whole window, which
    happens at large damping.
    """
    if params.alpha == 0.0:
        V1 = resonance_velocities(params)[0][0]
        lo = V1 + RESONANCE_MARGIN
    else:
        lo = 0.05
    vs = np.linspace(lo, V_max, V0_SCAN_POINTS)
    vals, kept = [], []
    for v in vs:
        if is_resonant(v, params):
            continue
        vals.append(_q0_of_V(v, params))
        kept.append(v)
    vals = np.array(vals)
    kept = np.array(kept)
    flips = np.nonzero(vals[:-1] * vals[1:] < 0)[0]
    if len(flips) == 0:
        raise NoSignChange(
            f"q(0) does not change sign on [{lo:.4f}, {V_max}] "
            f"(mu={params.mu}, alpha={params.alpha})")
    i = flips[-1]
    a, b = kept[i], kept[i + 1]
    fa = vals[i]
    while b - a > tol:
        c = 0.5 * (a + b)
        fc = _q0_of_V(c, params)
        if fc == 0.0:
            return c
        if np.sign(fc) == np.sign(fa):
            a, fa = c, fc
        else:
            b = c
    return 0.5 * (a + b)


def z_linear(jet: KernelJet) -> float:
    """Leading-order plateau half-width from the kernel jet."""
    return jet.q0 * (jet.q_plus - jet.q_minus) / (2.0 * jet.q_plus
                                                  * jet.q_minus)


def shape_linear(jet: KernelJet) -> ShapeFunction:
    """Leading-order shape: two endpoint masses, no continuous part."""
    z = z_linear(jet)
    den = jet.q_minus - jet.q_plus
    return ShapeFunction(z=z, mesh=np.array([]), weights=np.array([]),
                         delta_minus=jet.q_minus / den,
                         delta_plus=-jet.q_plus / den)


def z_quartic(jet: KernelJet) -> float:
    """Next-order z: smallest positive root of the quartic correction.

    The quartic in z (ascending coefficients)

        c0 + c1 z + c2 z^2 + c3 z^3 + c4 z^4 = 0,
        c0 = (q+ - q-) q0,          c1 = 4 q2 q0 - 2 q+ q-,
        c2 = 4 q2 (q+ - q-),        c3 = 32 q2^2 / 3,
        c4 = 32 q2^3 / (3 (q+ - q-)),

    reduces to the linear estimate when q2 = 0. Roots come from the
    companion matrix and are polished by Newton; NoPositiveRoot if no real
    positive root exists.
    """
    qp, qm, q0, q2 = jet.q_plus, jet.q_minus, jet.q0, jet.q2
    d = qp - qm
    c = np.array([d * q0,
                  4.0 * q2 * q0 - 2.0 * qp * qm,
                  4.0 * q2 * d,
                  32.0 * q2**2 / 3.0,
                  32.0 * q2**3 / (3.0 * d)])
    if abs(c[4]) < 1e-300 and abs(c[3]) < 1e-300:
        # degenerate (q2 = 0): linear balance only
        z = -c[0] / c[1]
        if z <= 0:
            raise NoPositiveRoot("degenerate quartic has no positive root")
        return float(z)
    roots = np.roots(c[::-1])
    poly = np.polynomial.Polynomial(c)
    dpoly = poly.deriv()
    best = None
    for r in roots:
        if abs(r.imag) > QUARTIC_IMAG_TOL * (1.0 + abs(r)):
            continue
        x = float(r.real)
        if x <= 0:
            continue
        for _ in range(50):
            f = poly(x)
            df = dpoly(x)
            if df == 0:
                break
            step = f / df
            x -= step
            if abs(step) <= 1e-15 * (1.0 + abs(x)):
                break
        else:
            raise NotConverged(f"quartic root polish stalled at {x}")
        if x > 0 and (best is None or x < best):
            best = x
    if best is None:
        raise NoPositiveRoot("quartic has no positive real root")
    return best


def shape_quadratic(jet: KernelJet) -> ShapeFunction:
    """Next-order shape: endpoint masses plus a constant interior density.

    Interior density zeta = -2 q2 / (q+ - q-) on [-z, z] with z from the
    quartic; the endpoint masses keep total mass 1 exactly.
    """
    z = z_quartic(jet)
    d = jet.q_plus - jet.q_minus
    zeta = -2.0 * jet.q2 / d
    D = d + 4.0 * jet.q2 * z
    half_sum = (jet.q_plus + jet.q_minus) / (2.0 * D)
    mass_minus = D / (2.0 * d) - half_sum  # at xi = -z
    mass_plus = D / (2.0 * d) + half_sum   # at xi = +z
    mesh = np.linspace(-z, z, 2)
    return ShapeFunction(z=z, mesh=mesh, weights=np.full(2, zeta),
                         delta_minus=mass_minus, delta_plus=mass_plus)
