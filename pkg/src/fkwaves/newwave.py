"""Construction of traveling waves with a zero plateau (the z > 0 branch).

Below the threshold velocity the classical kink violates its sign
constraints. A generalized wave fixes this by staying exactly at the
spinodal value u = 0 on a plateau [-z, z]: writing u as a convolution of a
normalized shape function h supported on [-z, z] with the classical profile
U turns the plateau condition into a homogeneous Fredholm equation of the
first kind with the kernel q(xi - s). Discretized on a uniform mesh the
equation becomes Q(z) h = 0; z is located where det Q(z) changes sign, h is
the null direction, and the stress follows from u(z) + u(-z) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .acwave import (
    ADMISSIBLE_SPACING,
    ac_admissible,
    kernel_q,
    quad_kernel,
    sigma_AC,
    U_profile,
)
from .dispersion import DEFAULT_N_PAIRS, is_resonant
from .errors import (
    NoAdmissibleWave,
    NoCandidate,
    NotConverged,
    NullspaceNotRankOne,
    ResonantVelocity,
)
from .params import ModelParams

DEFAULT_MESH = 100
# z window scanned for determinant sign changes
Z_RANGE = (0.005, 1.0)
Z_SCAN_POINTS = 160
Z_BISECT_TOL = 1e-8
# plateau flatness required before a wave counts as admissible; the
# achieved residual is reported on the wave and shrinks with the mesh
PLATEAU_TOL = 1e-3
PLATEAU_SAMPLES = 41
# sign constraints sampled on +-(z, z+range]
CHECK_RANGE = 40.0
# singular-value gates for the null direction
NULLSPACE_REL = 1e-6
NULLSPACE_GAP = 1e-3


@dataclass(frozen=True)
class ShapeFunction:
    """Normalized weight h whose convolution with U builds the wave.

    weights are sampled values of h on the mesh; the trapezoidal integral of
    weights plus the two optional point masses at -z and +z equals 1. The
    purely analytic small-z approximations carry their mass entirely in
    delta_minus / delta_plus (at xi = -z / +z) and an optional constant.
    """

    z: float
    mesh: np.ndarray
    weights: np.ndarray
    delta_plus: float = 0.0
    delta_minus: float = 0.0

    def trapezoid(self) -> np.ndarray:
        """Trapezoidal quadrature weights matching the mesh."""
        m = len(self.mesh)
        if m == 0:
            return np.array([])
        if m == 1:
            return np.array([0.0])
        d = self.mesh[1] - self.mesh[0]
        w = np.full(m, d)
        w[0] = w[-1] = 0.5 * d
        return w

    def mass(self) -> float:
        w = self.trapezoid()
        return float(w @ self.weights if len(w) else 0.0) \
            + self.delta_plus + self.delta_minus


@dataclass(frozen=True)
class KineticPoint:
    V: float
    sigma: float
    z: float
    admissible: bool
    branch: str  # "ac" | "new"
    flag: str = "ok"


@dataclass(frozen=True)
class WaveSolution:
    """Assembled traveling wave u(xi) at one velocity."""

    V: float
    params: ModelParams
    z: float
    sigma: float
    shape: ShapeFunction
    residual: float
    admissible: bool
    branch: str
    _kernel: str = field(default="quad", repr=False)

    def evaluate(self, xi, method: str | None = None) -> np.ndarray:
        """u(xi) = sigma - Sigma(V) + integral h(s) U(xi - s) ds.

        method "quad" (accurate, default for small batches) or "residue"
        (fast for large site grids, e.g. seeding a chain).
        """
        xi = np.atleast_1d(np.asarray(xi, float))
        ev = _evaluator(self.V, self.params, method or self._kernel,
                        DEFAULT_N_PAIRS)
        w = self.shape.trapezoid()
        lags = xi[:, None] - self.shape.mesh[None, :] if len(w) else None
        out = np.full(xi.shape, self.sigma - ev.Sigma)
        if lags is not None:
            Uv = ev.U(lags.ravel()).reshape(lags.shape)
            out = out + Uv @ (w * self.shape.weights)
        if self.shape.delta_minus:
            out = out + self.shape.delta_minus * ev.U(xi + self.z)
        if self.shape.delta_plus:
            out = out + self.shape.delta_plus * ev.U(xi - self.z)
        return out

    def derivative(self, xi, method: str | None = None) -> np.ndarray:
        """du/dxi; the kernel q is -dU/dxi, so this is -(h * q)(xi).

        A traveling wave moves sites by du/dt = -V du/dxi, which seeds the
        velocity field of a chain simulation.
        """
        xi = np.atleast_1d(np.asarray(xi, float))
        ev = _evaluator(self.V, self.params, method or self._kernel,
                        DEFAULT_N_PAIRS)
        w = self.shape.trapezoid()
        out = np.zeros(xi.shape)
        if len(w):
            lags = xi[:, None] - self.shape.mesh[None, :]
            out = out - ev.q(lags.ravel()).reshape(lags.shape) \
                @ (w * self.shape.weights)
        if self.shape.delta_minus:
            out = out - self.shape.delta_minus * ev.q(xi + self.z)
        if self.shape.delta_plus:
            out = out - self.shape.delta_plus * ev.q(xi - self.z)
        return out


class _Evaluator:
    """Uniform q/U evaluation front end over the two kernel routes."""

    def __init__(self, V: float, params: ModelParams, method: str = "quad",
                 n_pairs: int = DEFAULT_N_PAIRS):
        if method not in ("quad", "residue"):
            raise ValueError(f"unknown kernel method {method!r}")
        self.V = V
        self.params = params
        self.method = method
        self.n_pairs = n_pairs
        self.Sigma = sigma_AC(V, params, n_pairs)
        self._qk = quad_kernel(V, params) if method == "quad" else None

    def q(self, x) -> np.ndarray:
        if self.method == "quad":
            return self._qk.q(x)
        return np.atleast_1d(kernel_q(x, self.V, self.params, self.n_pairs))

    def U(self, x) -> np.ndarray:
        if self.method == "quad":
            return self._qk.U(x, self.Sigma)
        return np.atleast_1d(U_profile(x, self.V, self.params, self.n_pairs))


@lru_cache(maxsize=32)
def _evaluator(V: float, params: ModelParams, method: str,
               n_pairs: int) -> _Evaluator:
    return _Evaluator(V, params, method, n_pairs)


def _mesh_and_weights(z: float, m: int) -> tuple[np.ndarray, np.ndarray]:
    s = np.linspace(-z, z, m)
    d = s[1] - s[0]
    w = np.full(m, d)
    w[0] = w[-1] = 0.5 * d
    return s, w


def _q_lags(z: float, m: int, ev: _Evaluator) -> np.ndarray:
    """Kernel values q((i - j) d) for all lags of the uniform mesh."""
    d = 2.0 * z / (m - 1)
    lags = np.arange(-(m - 1), m) * d
    return np.asarray(ev.q(lags))


def _q_matrix(z: float, m: int, ev: _Evaluator) -> np.ndarray:
    qv = _q_lags(z, m, ev)
    _, w = _mesh_and_weights(z, m)
    idx = np.arange(m)
    Q = qv[(idx[:, None] - idx[None, :]) + m - 1]
    return Q * w[None, :]


def build_Q(z: float, V: float, params: ModelParams,
            m: int = DEFAULT_MESH, kernel: str = "quad",
            n_pairs: int = DEFAULT_N_PAIRS) -> np.ndarray:
    """Discretized plateau operator Q[i][j] = w_j q(xi_i - s_j).

    Uniform m-point mesh on [-z, z] with trapezoidal weights; rows are the
    plateau collocation points, columns the shape samples. Convolution
    structure: Q[i][j] / w_j depends on i - j only.
    """
    if m < 3:
        raise ValueError("mesh size m must be >= 3")
    if z <= 0:
        raise ValueError("z must be positive")
    return _q_matrix(z, m, _evaluator(V, params, kernel, n_pairs))


def _logdet_sign(Q: np.ndarray) -> tuple[float, float]:
    """slogdet after row scaling; 100x100 kernels overflow a naive det."""
    sc = np.max(np.abs(Q), axis=1)
    sc[sc == 0.0] = 1.0
    sign, logd = np.linalg.slogdet(Q / sc[:, None])
    return float(sign), float(logd + np.sum(np.log(sc)))


def find_z(V: float, params: ModelParams,
           z_range: tuple[float, float] = Z_RANGE,
           m: int = DEFAULT_MESH, kernel: str = "quad",
           n_pairs: int = DEFAULT_N_PAIRS,
           scan_points: int = Z_SCAN_POINTS) -> list[float]:
    """Plateau half-widths where det Q(z) changes sign, refined by bisection.

    Ascending; |delta z| <= 1e-8 after refinement. Raises NoCandidate when
    the determinant keeps one sign across the scanned range.
    """
    if is_resonant(V, params):
        raise ResonantVelocity(f"V={V} is within tolerance of a resonance")
    ev = _evaluator(V, params, kernel, n_pairs)
    zs = np.linspace(z_range[0], z_range[1], scan_points)
    signs = np.array([_logdet_sign(_q_matrix(z, m, ev))[0] for z in zs])
    out: list[float] = []
    for i in np.nonzero(signs[:-1] * signs[1:] < 0)[0]:
        a, b = zs[i], zs[i + 1]
        sa = signs[i]
        while b - a > Z_BISECT_TOL:
            c = 0.5 * (a + b)
            if _logdet_sign(_q_matrix(c, m, ev))[0] == sa:
                a = c
            else:
                b = c
        z = 0.5 * (a + b)
        if not out or z - out[-1] > 10 * Z_BISECT_TOL:
            out.append(z)
    if not out:
        raise NoCandidate(
            f"det Q has no sign change for z in {z_range} at V={V}")
    return out


def solve_shape(z: float, V: float, params: ModelParams,
                m: int = DEFAULT_MESH, kernel: str = "quad",
                n_pairs: int = DEFAULT_N_PAIRS) -> ShapeFunction:
    """Null direction of Q(z), normalized to unit trapezoidal integral.

    Extracted from the SVD; requires a clean rank-one null space: smallest
    singular value <= 1e-6 of the largest and well separated from the next.
    """
    Q = build_Q(z, V, params, m, kernel, n_pairs)
    _, sv, vt = np.linalg.svd(Q)
    if sv[-1] > NULLSPACE_REL * sv[0]:
        raise NotConverged(
            f"smallest singular value {sv[-1]:.2e} is not a null direction "
            f"(largest {sv[0]:.2e}); z={z} is not a determinant zero")
    if sv[-1] > NULLSPACE_GAP * sv[-2]:
        raise NullspaceNotRankOne(
            f"ambiguous null space: s_min={sv[-1]:.2e} s_next={sv[-2]:.2e}")
    h = vt[-1]
    s, w = _mesh_and_weights(z, m)
    integral = float(w @ h)
    if integral == 0.0:
        raise NullspaceNotRankOne("null direction has zero mean")
    h = h / integral
    return ShapeFunction(z=z, mesh=s, weights=h)


def assemble_wave(shape: ShapeFunction, V: float, params: ModelParams,
                  kernel: str = "quad",
                  n_pairs: int = DEFAULT_N_PAIRS) -> WaveSolution:
    """Wave profile and stress from a shape function.

    sigma is fixed by u(z) + u(-z) = 0; the reported residual is max |u|
    over uniformly spaced plateau samples. Admissibility is judged by
    check_generalized with default range and plateau tolerance.
    """
    ev = _evaluator(V, params, kernel, n_pairs)
    w = shape.trapezoid()
    wh = w * shape.weights if len(w) else np.array([])

    def conv_U(xi: np.ndarray) -> np.ndarray:
        out = np.zeros(xi.shape)
        if len(wh):
            lags = xi[:, None] - shape.mesh[None, :]
            out = out + ev.U(lags.ravel()).reshape(lags.shape) @ wh
        if shape.delta_minus:
            out = out + shape.delta_minus * ev.U(xi + shape.z)
        if shape.delta_plus:
            out = out + shape.delta_plus * ev.U(xi - shape.z)
        return out

    edges = np.array([shape.z, -shape.z])
    sigma = ev.Sigma - 0.5 * float(np.sum(conv_U(edges)))
    if shape.z > 0:
        plateau = np.linspace(-shape.z, shape.z, PLATEAU_SAMPLES)
        u_plat = sigma - ev.Sigma + conv_U(plateau)
        residual = float(np.max(np.abs(u_plat)))
    else:
        residual = abs(sigma - ev.Sigma + float(conv_U(np.zeros(1))[0]))
    wave = WaveSolution(
        V=V, params=params, z=shape.z, sigma=sigma, shape=shape,
        residual=residual, admissible=False,
        branch="new" if shape.z > 0 else "ac", _kernel=kernel)
    return replace(wave, admissible=check_generalized(wave, CHECK_RANGE,
                                                      PLATEAU_TOL))


def check_generalized(wave: WaveSolution, span: float = CHECK_RANGE,
                      tol: float = PLATEAU_TOL) -> bool:
    """Generalized admissibility: flat plateau and strict signs outside.

    True iff the plateau residual is <= tol and u < 0 on (z, z+span],
    u > 0 on [-z-span, -z), sampled at spacing <= 0.05.
    """
    if wave.residual > tol:
        return False
    n = int(np.ceil(span / ADMISSIBLE_SPACING))
    xs = wave.z + np.linspace(ADMISSIBLE_SPACING, span, n)
    # residue evaluation is accurate away from the plateau and much faster
    right = wave.evaluate(xs, method="residue")
    left = wave.evaluate(-xs, method="residue")
    return bool(np.all(right < 0.0) and np.all(left > 0.0))


def kinetic_point(V: float, params: ModelParams, m: int = DEFAULT_MESH,
                  kernel: str = "quad", n_pairs: int = DEFAULT_N_PAIRS,
                  z_range: tuple[float, float] = Z_RANGE) -> KineticPoint:
    """One point of the kinetic relation sigma(V).

    Returns the classical branch when it is admissible; otherwise runs the
    plateau pipeline and returns the unique admissible z > 0 wave (smallest
    plateau residual when several candidates pass).
    """
    wave = kinetic_wave(V, params, m, kernel, n_pairs, z_range)
    return KineticPoint(V=V, sigma=wave.sigma, z=wave.z,
                        admissible=wave.admissible, branch=wave.branch)


def kinetic_wave(V: float, params: ModelParams, m: int = DEFAULT_MESH,
                 kernel: str = "quad", n_pairs: int = DEFAULT_N_PAIRS,
                 z_range: tuple[float, float] = Z_RANGE) -> WaveSolution:
    """Full wave behind kinetic_point; used for profiles and chain seeding."""
    if is_resonant(V, params):
        raise ResonantVelocity(f"V={V} is within tolerance of a resonance")
    if ac_admissible(V, params, n_pairs=n_pairs):
        shape = ShapeFunction(z=0.0, mesh=np.array([]), weights=np.array([]),
                              delta_plus=0.5, delta_minus=0.5)
        return assemble_wave(shape, V, params, kernel, n_pairs)
    candidates = find_z(V, params, z_range, m, kernel, n_pairs)
    accepted: list[WaveSolution] = []
    for z in candidates:
        try:
            shape = solve_shape(z, V, params, m, kernel, n_pairs)
        except (NotConverged, NullspaceNotRankOne):
            continue
        wave = assemble_wave(shape, V, params, kernel, n_pairs)
        if wave.admissible:
            accepted.append(wave)
    if not accepted:
        raise NoAdmissibleWave(
            f"no admissible wave at V={V}: {len(candidates)} determinant "
            "zeros, none passed the sign and plateau checks")
    accepted.sort(key=lambda w: w.residual)
    return accepted[0]


def kinetic_curve(V_list, params: ModelParams, m: int = DEFAULT_MESH,
                  kernel: str = "quad",
                  n_pairs: int = DEFAULT_N_PAIRS) -> list[KineticPoint]:
    """kinetic_point per velocity; failures become flagged placeholder rows.

    Resonant velocities are marked SKIPPED_RESONANT with NaN sigma.
    Velocities where the plateau pipeline finds nothing keep the classical
    branch value as an inadmissible reference row (the classical relation
    stays finite off resonance, damping included) flagged NO_CANDIDATE or
    NO_ADMISSIBLE_WAVE. The sweep always continues.
    """
    out = []
    for V in V_list:
        try:
            out.append(kinetic_point(V, params, m, kernel, n_pairs))
        except ResonantVelocity:
            out.append(KineticPoint(V=V, sigma=np.nan, z=np.nan,
                                    admissible=False, branch="",
                                    flag="SKIPPED_RESONANT"))
        except (NoCandidate, NoAdmissibleWave) as exc:
            flag = ("NO_CANDIDATE" if isinstance(exc, NoCandidate)
                    else "NO_ADMISSIBLE_WAVE")
            sigma = _evaluator(V, params, kernel, n_pairs).Sigma
            out.append(KineticPoint(V=V, sigma=sigma, z=0.0,
                                    admissible=False, branch="ac",
                                    flag=flag))
    return out
