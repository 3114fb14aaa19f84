"""Real zeros of q(theta) = Re(exp(i*phi) p(exp(i*theta))) on [0, 2*pi)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DegenerateInputError, ParameterError
from .poly import Polynomial, TrigView, eval_trig, trig_on_grid
from .rootfind import companion_oracle, find_roots, ORACLE_MAX_DEGREE

TWO_PI = 2.0 * math.pi
TANGENT_RTOL = 1e-9
BORDERLINE_RTOL = 1e-6
MERGE_TOL = 1e-9


@dataclass(frozen=True)
class TrigRootReport:
    """Distinct zeros of the trigonometric view.

    ``X == sign_changes + tangential``. Near-tangential local minima whose
    value sits between the tangential threshold and ``BORDERLINE_RTOL`` are
    listed in ``borderline`` and are not counted in ``X``.
    """

    X: int
    sign_changes: int
    tangential: int
    locations: tuple[float, ...]
    method: str
    borderline: tuple[float, ...] = ()
    kinds: tuple[str, ...] = field(default=(), repr=False)


def _wrap(t: float) -> float:
    t = math.fmod(t, TWO_PI)
    if t < 0:
        t += TWO_PI
    return 0.0 if t >= TWO_PI else t


def _merge(found: list[tuple[float, str]]) -> list[tuple[float, str]]:
    """Sort cyclically and merge zeros closer than MERGE_TOL; sign changes win ties."""
    if not found:
        return []
    found = sorted((_wrap(t), k) for t, k in found)
    out = [found[0]]
    for t, k in found[1:]:
        if t - out[-1][0] <= MERGE_TOL:
            if k == "sign":
                out[-1] = (out[-1][0], "sign")
        else:
            out.append((t, k))
    if len(out) > 1 and out[0][0] + TWO_PI - out[-1][0] <= MERGE_TOL:
        t, k = out.pop()
        if k == "sign":
            out[0] = (out[0][0], "sign")
    return out


def count_real_roots(v: TrigView, grid: int | None = None) -> TrigRootReport:
    """Count distinct zeros of the view on a uniform grid of ``grid`` points.

    Sign changes between neighbours are refined together by vectorized
    bisection to 1e-12 in theta. Every grid local minimum of |q| without a sign change
    is refined to the true local extremum of q: a value within 1e-9 * max|q|
    of zero is a tangential zero, a clear sign flip reveals a close pair of
    crossings, and a value below 1e-6 * max|q| is reported as borderline.
    """
    n = v.base.degree
    if n < 1:
        raise DegenerateInputError("trigonometric root counting needs degree >= 1")
    if grid is None:
        grid = 16 * n
    if grid < 8 * n:
        raise ParameterError(f"grid {grid} is coarser than 8n = {8 * n}")
    grid = max(int(grid), 16)
    theta = TWO_PI * np.arange(grid) / grid
    q = trig_on_grid(v, grid)
    scale = float(np.abs(q).max())
    if scale == 0.0:
        raise DegenerateInputError("trigonometric view vanishes identically")

    f = _scalar_trig(v)

    found: list[tuple[float, str]] = []
    borderline: list[float] = []
    sgn = np.sign(q)
    nxt = np.roll(np.arange(grid), -1)
    t_next = theta + TWO_PI / grid

    # exact zeros at grid nodes
    for i in np.flatnonzero(sgn == 0):
        left = _nonzero_sign(sgn, i, -1)
        right = _nonzero_sign(sgn, i, +1)
        found.append((theta[i], "sign" if left * right < 0 else "tangent"))

    # bracketed sign changes, all refined together
    br = np.flatnonzero(sgn * sgn[nxt] < 0)
    for r in _bisect(v, theta[br], t_next[br], sgn[br]):
        found.append((float(r), "sign"))

    # local minima of |q| between same-sign neighbours
    aq = np.abs(q)
    prv = np.roll(np.arange(grid), 1)
    cand = (aq <= aq[prv]) & (aq <= aq[nxt]) & (sgn != 0) & (sgn == sgn[prv]) & (sgn == sgn[nxt])
    h = TWO_PI / grid
    for i in np.flatnonzero(cand):
        s = sgn[i]
        a, b = theta[i] - h, theta[i] + h
        res = minimize_scalar(lambda t: s * f(t), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-13})
        t0, v0 = float(res.x), s * float(res.fun)
        if abs(v0) <= TANGENT_RTOL * scale:
            # a crossing pair inside rounding noise is indistinguishable from a touch
            found.append((t0, "tangent"))
        elif s * v0 < 0:
            found.append((brentq(f, a, t0, xtol=1e-12), "sign"))
            found.append((brentq(f, t0, b, xtol=1e-12), "sign"))
        elif abs(v0) <= BORDERLINE_RTOL * scale:
            borderline.append(_wrap(t0))

    merged = _merge(found)
    kinds = tuple(k for _, k in merged)
    sc = sum(1 for k in kinds if k == "sign")
    return TrigRootReport(X=len(merged), sign_changes=sc, tangential=len(merged) - sc,
                          locations=tuple(t for t, _ in merged), method="sampling",
                          borderline=tuple(sorted(borderline)), kinds=kinds)


def _bisect(v: TrigView, lo: np.ndarray, hi: np.ndarray, s_lo: np.ndarray,
            xtol: float = 1e-12) -> np.ndarray:
    """Vectorized bisection of brackets [lo, hi] where q(lo) has sign s_lo and q(hi) the opposite."""
    lo = lo.astype(float).copy()
    hi = hi.astype(float).copy()
    while lo.size and np.max(hi - lo) > xtol:
        mid = 0.5 * (lo + hi)
        same = np.sign(eval_trig(v, mid)) == s_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def _scalar_trig(v: TrigView):
    """Fast scalar q(t) by Horner in plain complex arithmetic."""
    coeffs = [complex(c) for c in v.base.coeffs[::-1]]
    rot = complex(math.cos(v.phase), math.sin(v.phase))

    def f(t: float) -> float:
        z = complex(math.cos(t), math.sin(t))
        acc = 0j
        for c in coeffs:
            acc = acc * z + c
        return (rot * acc).real

    return f


def _nonzero_sign(sgn: np.ndarray, i: int, step: int) -> float:
    m = sgn.size
    for d in range(1, m):
        s = sgn[(i + step * d) % m]
        if s != 0:
            return s
    return 0.0


def self_inversive_lift(p: Polynomial) -> Polynomial:
    """R(z) = sum a_k z^(n+k) + sum conj(a_k) z^(n-k), so R(e^it) = 2 e^(int) Re p(e^it)."""
    n = p.degree
    if n < 1:
        raise DegenerateInputError("self-inversive lift needs degree >= 1")
    c = np.zeros(2 * n + 1, dtype=complex)
    c[n:] += p.coeffs
    c[n::-1] += np.conj(p.coeffs)
    return Polynomial(c)


def count_real_roots_self_inversive(v: TrigView, unit_tol: float = 1e-6,
                                    cluster_tol: float = 1e-6) -> TrigRootReport:
    """Algebraic count: unit-modulus roots of the self-inversive lift of exp(i*phi) p.

    Roots of R within ``unit_tol`` of the circle are grouped by argument;
    a group of even size is a tangential zero, odd size a sign change.
    """
    base = Polynomial(v.base.coeffs * np.exp(1j * v.phase))
    r = self_inversive_lift(base)
    rs = companion_oracle(r) if r.degree <= ORACLE_MAX_DEGREE else find_roots(r)
    z = rs.roots[np.abs(np.abs(rs.roots) - 1.0) < unit_tol]
    ang = np.sort(np.mod(np.angle(z), TWO_PI))
    groups: list[list[float]] = []
    for t in ang:
        if groups and t - groups[-1][-1] <= cluster_tol:
            groups[-1].append(t)
        else:
            groups.append([t])
    if len(groups) > 1 and groups[0][0] + TWO_PI - groups[-1][-1] <= cluster_tol:
        groups[0] = groups.pop() + groups[0]
    locs = tuple(_wrap(float(np.mean(np.unwrap(g)))) for g in groups)
    kinds = tuple("tangent" if len(g) % 2 == 0 else "sign" for g in groups)
    order = np.argsort(locs)
    locs = tuple(locs[i] for i in order)
    kinds = tuple(kinds[i] for i in order)
    sc = kinds.count("sign")
    return TrigRootReport(X=len(locs), sign_changes=sc, tangential=len(locs) - sc,
                          locations=locs, method="self_inversive", kinds=kinds)


def count_level_crossings(p: Polynomial, x: float, grid: int | None = None) -> TrigRootReport:
    """Zeros of Re(exp(i(pi/2 - x)) p(e^it)), i.e. arg p(e^it) = x (mod pi)."""
    return count_real_roots(TrigView(p, math.pi / 2 - x), grid)
