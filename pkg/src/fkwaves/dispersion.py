"""Dispersion analysis of the linearized traveling-wave problem.

Plane waves e^{ik xi} in the co-moving frame xi = n - V t satisfy L(k, V) = 0
with

    L(k, V) = mu + 4 sin^2(k/2) - V^2 k^2 - i k alpha V.

Real roots are lattice phonons radiated by a steadily moving front; the sign
of k * dL/dk decides whether a phonon travels ahead of or behind the front.
Complex roots control the core shape through residue sums. Velocities where a
real root is degenerate (L = dL/dk = 0) are resonances; kinetic quantities
develop cusps or poles there and most solvers in this package refuse to work
on top of one.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache, cached_property

import numpy as np

from .errors import NotConverged, ResonantVelocity, RootCountMismatch
from .params import ModelParams

# bracketing scan resolution for real roots on (0, sqrt(mu+4)/V]
REAL_SCAN_POINTS = 2048
# Newton targets: absolute |L| for real roots, step based for complex ones
REAL_ROOT_TOL = 1e-12
COMPLEX_ROOT_TOL = 1e-10
NEWTON_STEP_TOL = 1e-13
# |dL/dk| <= RES_GUARD * (1 + |k|) at a real root means "numerically resonant"
RES_GUARD = 1e-6
# roots closer than this are considered duplicates
DEDUPE_RADIUS = 1e-8
# default number of complex roots kept per half plane
DEFAULT_N_PAIRS = 400
# off-axis band: for alpha = 0 complex roots cannot sit closer to the real
# axis than this outside the resonance exclusion zone
AXIS_OFFSET = 5e-5

CACHE_ENV_VAR = "FKWAVES_CACHE_DIR"


class Branch(Enum):
    """Where a dispersion root contributes to the wave profile."""

    REAL_AHEAD = "real_ahead"    # phonon radiated ahead of the front (k L_k > 0)
    REAL_BEHIND = "real_behind"  # phonon radiated behind the front (k L_k < 0)
    UPPER_HALF = "upper_half"    # decays for xi > 0
    LOWER_HALF = "lower_half"    # decays for xi < 0


@dataclass(frozen=True)
class DispersionRoot:
    k: complex
    branch: Branch
    lk: complex  # dL/dk evaluated at k


def eval_L(k, V: float, params: ModelParams):
    """Dispersion function L(k, V); accepts scalar or array, real or complex k."""
    k = np.asarray(k)
    val = params.mu + 4.0 * np.sin(k / 2.0) ** 2 - V**2 * k**2
    if params.alpha != 0.0:
        val = val - 1j * k * params.alpha * V
    return val if val.ndim else val[()]


def eval_Lk(k, V: float, params: ModelParams):
    """dL/dk."""
    k = np.asarray(k)
    val = 2.0 * np.sin(k) - 2.0 * V**2 * k
    if params.alpha != 0.0:
        val = val - 1j * params.alpha * V
    return val if val.ndim else val[()]


def _eval_Lkk(k, V: float):
    return 2.0 * np.cos(k) - 2.0 * V**2


def _eval_LV(k, V: float, params: ModelParams):
    val = -2.0 * V * np.asarray(k) ** 2
    if params.alpha != 0.0:
        val = val - 1j * np.asarray(k) * params.alpha
    return val


def real_roots(V: float, params: ModelParams, tol: float = REAL_ROOT_TOL) -> np.ndarray:
    """Positive real roots of L(., V), ascending.

    Only defined for alpha = 0; damping pushes every root off the real axis.
    Callers are expected to rule out resonant V beforehand (is_resonant);
    a root with |dL/dk| below the resonance guard raises ResonantVelocity.

    Negative roots are the mirror images -k and are not returned.
    """
    if V <= 0.0:
        raise ValueError("V must be positive")
    if params.alpha != 0.0:
        raise ValueError("real roots exist only for alpha = 0")
    kmax = np.sqrt(params.mu + 4.0) / V
    ks = np.linspace(kmax / REAL_SCAN_POINTS, kmax, REAL_SCAN_POINTS)
    vals = eval_L(ks, V, params).real
    roots = []
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    for i in idx:
        a, b = ks[i], ks[i + 1]
        fa = vals[i]
        for _ in range(64):
            c = 0.5 * (a + b)
            fc = eval_L(c, V, params).real
            if fa * fc <= 0.0:
                b = c
            else:
                a, fa = c, fc
        r = 0.5 * (a + b)
        for _ in range(8):  # Newton polish
            f = eval_L(r, V, params).real
            df = eval_Lk(r, V, params).real
            if df == 0.0 or abs(f) <= tol:
                break
            r -= f / df
        if abs(eval_L(r, V, params).real) > 1e3 * tol:
            raise NotConverged(f"real root polish stalled at k={r}")
        if abs(eval_Lk(r, V, params).real) <= RES_GUARD * (1.0 + abs(r)):
            raise ResonantVelocity(
                f"degenerate real root k={r:.12g} at V={V:.12g}")
        roots.append(r)
    out = np.array(sorted(roots))
    keep = np.ones(len(out), bool)
    keep[1:] = np.diff(out) > DEDUPE_RADIUS
    return out[keep]


def classify_real_root(k: float, V: float, params: ModelParams) -> Branch:
    """Radiation side of a real phonon root.

    k * dL/dk is even in k, so a root and its mirror -k classify identically.
    """
    s = k * eval_Lk(k, V, params).real
    return Branch.REAL_AHEAD if s > 0.0 else Branch.REAL_BEHIND


# ---------------------------------------------------------------------------
# complex roots
# ---------------------------------------------------------------------------

def _newton_complex(seeds: np.ndarray, V: float, params: ModelParams,
                    iters: int = 60) -> np.ndarray:
    """Vectorized Newton iteration on L; returns converged points only."""
    k = np.asarray(seeds, dtype=complex).copy()
    step = np.full(k.shape, np.inf)
    # dead iterates carry NaN; silence the resulting invalid-value noise
    with np.errstate(invalid="ignore", over="ignore"):
        for _ in range(iters):
            f = eval_L(k, V, params)
            df = eval_Lk(k, V, params)
            bad = np.abs(df) < 1e-14
            df = np.where(bad, 1.0, df)
            d = f / df
            k = np.where(bad, np.nan, k - d)
            step = np.abs(d)
            if np.all(~np.isfinite(k)
                      | (step < NEWTON_STEP_TOL * (1.0 + np.abs(k)))):
                break
        ok = np.isfinite(k)
        ok &= ((step < NEWTON_STEP_TOL * (1.0 + np.abs(k)))
               | (np.abs(eval_L(k, V, params)) <= COMPLEX_ROOT_TOL))
    return k[ok]


def _dedupe_complex(ks: np.ndarray) -> list[complex]:
    out: list[complex] = []
    for z in sorted(ks, key=lambda z: (abs(z.imag), abs(z.real), z.real)):
        if all(abs(z - w) > DEDUPE_RADIUS * (1.0 + abs(z)) for w in out):
            out.append(complex(z))
    return out


def _strip_predictors(V: float, params: ModelParams, n_strips: int, sgn: float):
    """Asymptotic seeds near x = (2m+1) pi, e^y ~ V^2 x^2 - mu - 2."""
    seeds = []
    for m in range(1, n_strips + 1):
        x0 = (2 * m + 1) * np.pi
        arg = V**2 * x0**2 - params.mu - 2.0
        if arg <= 2.0:
            continue
        y0 = np.log(arg)
        seeds.append(x0 + sgn * 1j * y0)
        seeds.append(x0 - 1.0 + sgn * 1j * y0)
        seeds.append(x0 + 1.0 + sgn * 1j * y0)
    return seeds


def _winding_count(V: float, params: ModelParams, x0: float, x1: float,
                   y0: float, y1: float, max_rounds: int = 40) -> int:
    """Zeros of L inside the rectangle via boundary phase tracking.

    Each boundary segment is subdivided until consecutive phase increments
    stay below pi/2, which makes the wrapped phase sum equal the winding
    number of L around the contour.
    """
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1),
               complex(x0, y1), complex(x0, y0)]
    pts = []
    for a, b in zip(corners[:-1], corners[1:]):
        n = max(16, int(4.0 * abs(b - a)))
        pts.append(a + (b - a) * np.arange(n) / n)
    pts = np.concatenate(pts + [np.array([corners[-1]])])
    for _ in range(max_rounds):
        vals = eval_L(pts, V, params)
        if np.min(np.abs(vals)) < 1e-13:
            raise RootCountMismatch(
                "winding contour passes through a zero of L; shift the rectangle")
        dphi = np.angle(vals[1:] / vals[:-1])
        bad = np.nonzero(np.abs(dphi) >= 0.5 * np.pi)[0]
        if bad.size == 0:
            total = dphi.sum() / (2.0 * np.pi)
            n = int(np.rint(total))
            if abs(total - n) > 1e-2:
                raise RootCountMismatch(f"winding sum {total} is not an integer")
            return n
        mids = 0.5 * (pts[bad] + pts[bad + 1])
        pts = np.insert(pts, bad + 1, mids)
    raise RootCountMismatch("winding refinement did not settle")


def _half_plane_roots(V: float, params: ModelParams, n_roots: int,
                      lower: bool = False) -> np.ndarray:
    """At least n_roots complex roots in one half plane, sorted by |Im| then |Re|.

    Mirror symmetry L(-conj(k)) = conj(L(k)) pairs each off-axis root with a
    partner in the same half plane, so the returned count is rounded up when a
    cut would split such a pair. Verified with an argument-principle winding
    count over the searched band; on mismatch the seed grid is densified once
    before giving up.
    """
    sgn = -1.0 if lower else 1.0
    kmax_real = np.sqrt(params.mu + 4.0) / V
    n_strips = n_roots // 2 + 8

    def collect(extra_dense: bool) -> list[complex]:
        step = 0.35 if extra_dense else 0.7
        xs = np.arange(0.0, kmax_real + 2.0 * np.pi, step)
        ys = np.arange(0.05, 9.0, 0.45 if extra_dense else 0.9)
        gx, gy = np.meshgrid(xs, ys)
        seeds = (gx + sgn * 1j * gy).ravel().tolist()
        seeds += _strip_predictors(V, params, n_strips, sgn)
        if params.alpha > 0.0:
            # damping shifts the alpha = 0 phonon roots slightly off axis
            try:
                undamped = real_roots(V, ModelParams(params.mu, 0.0))
            except (ResonantVelocity, NotConverged):
                undamped = np.array([])
            for r in undamped:
                seeds += [r + sgn * 1j * 1e-3, -r + sgn * 1j * 1e-3]
        ks = _newton_complex(np.array(seeds), V, params)
        floor = 1e-12 if params.alpha > 0.0 else AXIS_OFFSET
        ks = ks[sgn * ks.imag > floor]
        # snap near-axis real parts so mirror pairs match exactly
        re = np.where(np.abs(ks.real) < 1e-9 * (1.0 + np.abs(ks.imag)), 0.0, ks.real)
        ks = re + 1j * ks.imag
        roots = _dedupe_complex(ks)
        full = list(roots)
        for z in roots:
            zm = -np.conj(z)
            if abs(zm.real) > 0 and all(abs(zm - w) > DEDUPE_RADIUS * (1 + abs(zm)) for w in full):
                full.append(zm)
        return sorted(full, key=lambda z: (abs(z.imag), abs(z.real), z.real))

    for attempt in (False, True):
        roots = collect(extra_dense=attempt)
        # group mirror families in |Im| order and cut between families
        fams: list[list[complex]] = []
        used = set()
        for i, z in enumerate(roots):
            if i in used:
                continue
            fam = [z]
            used.add(i)
            if z.real != 0.0:
                zm = -np.conj(z)
                for j in range(i + 1, len(roots)):
                    if j not in used and abs(roots[j] - zm) < 1e-7 * (1 + abs(zm)):
                        fam.append(roots[j])
                        used.add(j)
                        break
            fams.append(fam)
        kept: list[complex] = []
        cut_im = None
        for fi, fam in enumerate(fams):
            if len(kept) >= n_roots:
                cut_im = abs(fam[0].imag)
                break
            kept.extend(fam)
        if len(kept) < n_roots or cut_im is None:
            if not attempt:
                continue
            raise RootCountMismatch(
                f"found only {len(kept)} roots in half plane, wanted {n_roots}")
        last_im = max(abs(z.imag) for z in kept)
        if cut_im - last_im < 1e-9:
            if not attempt:
                continue
            raise RootCountMismatch("could not separate root families at the cut")
        y_hi = 0.5 * (last_im + cut_im)
        y_lo = 0.0 if params.alpha > 0.0 else 0.5 * AXIS_OFFSET
        x_max = max(abs(z.real) for z in kept) + 0.5 * np.pi
        try:
            if lower:
                n_inside = _winding_count(V, params, -x_max, x_max, -y_hi, -y_lo)
            else:
                n_inside = _winding_count(V, params, -x_max, x_max, y_lo, y_hi)
        except RootCountMismatch:
            if not attempt:
                continue
            raise
        expected = sum(1 for z in kept if abs(z.real) <= x_max)
        if n_inside != expected:
            if not attempt:
                continue
            raise RootCountMismatch(
                f"winding count {n_inside} != located {expected} "
                f"(V={V}, {'lower' if lower else 'upper'} half)")
        return np.array(kept)
    raise RootCountMismatch("unreachable")


@dataclass(frozen=True)
class RootSet:
    """All dispersion roots needed to evaluate profiles at one velocity."""

    V: float
    params: ModelParams
    roots: tuple[DispersionRoot, ...]
    n_requested: int

    @cached_property
    def upper(self) -> np.ndarray:
        return np.array([r.k for r in self.roots if r.branch is Branch.UPPER_HALF])

    @cached_property
    def lower(self) -> np.ndarray:
        return np.array([r.k for r in self.roots if r.branch is Branch.LOWER_HALF])

    @cached_property
    def real_ahead(self) -> np.ndarray:
        """Positive representatives; -k belongs to the same class."""
        return np.array(sorted(r.k.real for r in self.roots
                               if r.branch is Branch.REAL_AHEAD and r.k.real > 0))

    @cached_property
    def real_behind(self) -> np.ndarray:
        """Positive representatives; -k belongs to the same class."""
        return np.array(sorted(r.k.real for r in self.roots
                               if r.branch is Branch.REAL_BEHIND and r.k.real > 0))

    @cached_property
    def real_all(self) -> np.ndarray:
        return np.sort(np.concatenate([self.real_ahead, self.real_behind]))


def _complex_pair_arrays(V: float, params: ModelParams,
                         n_pairs: int) -> tuple[np.ndarray, np.ndarray]:
    upper = _half_plane_roots(V, params, n_pairs, lower=False)
    if params.alpha == 0.0:
        lower = np.conj(upper)
    else:
        lower = _half_plane_roots(V, params, n_pairs, lower=True)
    return upper, lower


def complex_roots(V: float, params: ModelParams,
                  n_pairs: int = DEFAULT_N_PAIRS) -> list[DispersionRoot]:
    """The n_pairs complex roots of smallest |Im k| per half plane.

    Counts may exceed n_pairs by one per half so a mirror pair (k, -conj k)
    is never split. For alpha = 0 the lower half is the conjugate of the
    upper; with damping the halves are searched independently.
    """
    upper, lower = _complex_pair_arrays(V, params, n_pairs)
    out = [DispersionRoot(complex(k), Branch.UPPER_HALF,
                          complex(eval_Lk(k, V, params))) for k in upper]
    out += [DispersionRoot(complex(k), Branch.LOWER_HALF,
                           complex(eval_Lk(k, V, params))) for k in lower]
    out.sort(key=lambda r: (abs(r.k.imag), abs(r.k.real), r.k.real, r.k.imag))
    return out


def _cache_path(V: float, params: ModelParams, n_pairs: int) -> str | None:
    root = os.environ.get(CACHE_ENV_VAR)
    if not root:
        return None
    key = f"{V!r}|{params.mu!r}|{params.alpha!r}|{n_pairs}|1"
    h = hashlib.sha256(key.encode()).hexdigest()[:24]
    return os.path.join(root, f"rootset_{h}.npz")


@lru_cache(maxsize=256)
def root_set(V: float, params: ModelParams,
             n_pairs: int = DEFAULT_N_PAIRS) -> RootSet:
    """Memoized bundle of real and complex roots at velocity V.

    With FKWAVES_CACHE_DIR set, root arrays are also persisted on disk so
    that repeated CLI sweeps skip the search.
    """
    path = _cache_path(V, params, n_pairs)
    if path and os.path.exists(path):
        data = np.load(path)
        upper, lower = data["upper"], data["lower"]
        ahead, behind = data["ahead"], data["behind"]
    else:
        if params.alpha == 0.0:
            reals = real_roots(V, params)
            cls = [classify_real_root(r, V, params) for r in reals]
            ahead = np.array([r for r, c in zip(reals, cls) if c is Branch.REAL_AHEAD])
            behind = np.array([r for r, c in zip(reals, cls) if c is Branch.REAL_BEHIND])
        else:
            ahead = np.array([])
            behind = np.array([])
        upper, lower = _complex_pair_arrays(V, params, n_pairs)
        if path:
            os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
            np.savez(path, upper=upper, lower=lower, ahead=ahead, behind=behind)

    roots: list[DispersionRoot] = []
    for arr, br in ((ahead, Branch.REAL_AHEAD), (behind, Branch.REAL_BEHIND)):
        for r in arr:
            roots.append(DispersionRoot(complex(r), br, complex(eval_Lk(r, V, params))))
            roots.append(DispersionRoot(complex(-r), br, complex(eval_Lk(-r, V, params))))
    for arr, br in ((upper, Branch.UPPER_HALF), (lower, Branch.LOWER_HALF)):
        for k in arr:
            roots.append(DispersionRoot(complex(k), br, complex(eval_Lk(k, V, params))))
    roots.sort(key=lambda r: (abs(r.k.imag), abs(r.k.real), r.k.real, r.k.imag))
    return RootSet(V=V, params=params, roots=tuple(roots), n_requested=n_pairs)


# ---------------------------------------------------------------------------
# resonances
# ---------------------------------------------------------------------------

def resonance_velocities(params: ModelParams, count: int = 5) -> list[tuple[float, float]]:
    """First `count` resonance velocities, descending, as (V, k) pairs.

    A resonance is a simultaneous zero L = dL/dk = 0 with k real; there the
    radiated phonon travels exactly at the front speed. Resonances are a
    property of the undamped dispersion, so alpha is ignored here. Found by
    two-dimensional Newton iteration on (L, dL/dk) from a (k, V) seed grid.
    """
    p0 = ModelParams(params.mu, 0.0)
    k_cap = max(40.0, 12.0 * count)
    for _ in range(4):
        sols = _resonance_newton(p0, k_cap)
        if len(sols) >= count:
            return sols[:count]
        k_cap *= 2.0
    raise NotConverged(f"found only {len(sols)} resonances below k={k_cap}")


def _resonance_newton(params: ModelParams, k_cap: float) -> list[tuple[float, float]]:
    ks = np.arange(0.5, k_cap, 0.35)
    Vs = np.arange(0.04, 1.1, 0.04)
    K, Vv = np.meshgrid(ks, Vs)
    K = K.ravel().astype(float)
    Vv = Vv.ravel().astype(float)
    for _ in range(60):
        f1 = params.mu + 4.0 * np.sin(K / 2.0) ** 2 - Vv**2 * K**2
        f2 = 2.0 * np.sin(K) - 2.0 * Vv**2 * K
        j11 = f2
        j12 = -2.0 * Vv * K**2
        j21 = 2.0 * np.cos(K) - 2.0 * Vv**2
        j22 = -4.0 * Vv * K
        det = j11 * j22 - j12 * j21
        det = np.where(np.abs(det) < 1e-14, np.nan, det)
        dk = (f1 * j22 - f2 * j12) / det
        dv = (f2 * j11 - f1 * j21) / det
        K, Vv = K - dk, Vv - dv
    ok = np.isfinite(K) & np.isfinite(Vv) & (K > 0.3) & (Vv > 1e-3) & (Vv < 2.0)
    K, Vv = K[ok], Vv[ok]
    res = np.abs(params.mu + 4.0 * np.sin(K / 2.0) ** 2 - Vv**2 * K**2) \
        + np.abs(2.0 * np.sin(K) - 2.0 * Vv**2 * K)
    ok = res < 1e-10 * (1.0 + K**2)
    sols: list[tuple[float, float]] = []
    for v, k in sorted(zip(Vv[ok], K[ok]), reverse=True):
        if all(abs(v - v0) > 1e-9 or abs(k - k0) > 1e-7 for v0, k0 in sols):
            sols.append((float(v), float(k)))
    return sols


def is_resonant(V: float, params: ModelParams, tol: float = 1e-5) -> bool:
    """True when V lies within tol of a resonance velocity.

    Implemented locally: at distance dV from a resonance the extremal value
    of L between (or instead of) the colliding real roots is about
    |dL/dV| * dV, so the test needs no global resonance enumeration.
    """
    if params.alpha > 0.0:
        return False
    if V <= 0.0:
        raise ValueError("V must be positive")
    kmax = np.sqrt(params.mu + 4.0) / V
    ks = np.linspace(kmax / 4096, kmax, 4096)
    Lv = eval_L(ks, V, params).real
    dL = np.diff(Lv)
    ext = np.nonzero(np.sign(dL[:-1]) * np.sign(dL[1:]) < 0)[0] + 1
    for i in ext:
        k = ks[i]
        if abs(Lv[i]) > 1.0:
            continue
        for _ in range(50):  # Newton on dL/dk
            g = eval_Lk(k, V, params).real
            gk = _eval_Lkk(k, V)
            if gk == 0.0:
                break
            step = g / gk
            k -= step
            if abs(step) < 1e-13 * (1.0 + abs(k)):
                break
        if not (0.0 < k <= kmax * 1.01):
            continue
        if abs(eval_Lk(k, V, params).real) > 1e-9 * (1.0 + abs(k)):
            continue
        if abs(eval_L(k, V, params).real) <= tol * abs(_eval_LV(k, V, params).real):
            return True
    return False
