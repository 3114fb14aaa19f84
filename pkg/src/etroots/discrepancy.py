"""Angular discrepancy, clustering-interval packing, and the per-arc root census."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circle import h_measure
from .errors import DegenerateInputError, ParameterError, SingularInputError
from .lemmas import _breakpoints, integrate_arg_derivative
from .poly import Polynomial
from .rootfind import AngularSample, RootSet, angular_sample

TWO_PI = 2.0 * math.pi
NEAR_CIRCLE = 1e-6
UNIT_SNAP = 1e-12
ARC_CLEARANCE = 1e-8


# ----------------------------------------------------------------- discrepancy

def _distinct(angles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    u, m = np.unique(np.asarray(angles, dtype=float), return_counts=True)
    return u, m.astype(float)


def angular_discrepancy(s: AngularSample) -> float:
    """Supremum over circular arcs J of |#{angles in J}/n_total - |J|/(2 pi)|.

    Closed arcs between two sample angles give the largest excess; open arcs
    between sample angles (including the circle minus one angle) give the
    largest deficit. The full circle contributes 1 - n_angular/n_total, which
    is nonzero only when roots sit at the origin. The sweep is over ordered
    pairs of distinct angles, one offset at a time.
    """
    if s.angles.size == 0:
        raise DegenerateInputError("discrepancy needs at least one angle")
    n = float(s.n_total)
    u, m = _distinct(s.angles)
    d = u.size
    uu = np.concatenate([u, u + TWO_PI])
    cs = np.concatenate([[0.0], np.cumsum(np.concatenate([m, m]))])
    idx = np.arange(d)
    n_ang = float(m.sum())
    best = 1.0 - n_ang / n
    for k in range(d):
        length = (uu[idx + k] - u) / TWO_PI
        closed = (cs[idx + k + 1] - cs[idx]) / n - length
        if k == 0:
            opened = 1.0 - (n_ang - m) / n
        else:
            opened = length - (cs[idx + k] - cs[idx + 1]) / n
        best = max(best, float(closed.max()), float(opened.max()))
    return best


def et_bound(p: Polynomial, rs: RootSet | None = None, rtol: float = 1e-8) -> float:
    """(8/pi) sqrt(h(p)/n). ``rs`` is accepted for symmetry with the discrepancy call."""
    h = h_measure(p, rtol=rtol).value
    return 8.0 / math.pi * math.sqrt(max(h, 0.0) / p.degree)


# ------------------------------------------------------------------ clustering

@dataclass(frozen=True)
class ClusterReport:
    """Maximum packing of disjoint dense arcs of length n^-alpha.

    ``I`` uses closed arcs, ``I_half_open`` arcs of the form [a, a + L).
    ``chosen_intervals`` realize ``I``; touching closed arcs are separated by
    a nudge far below every gap in the data.
    """

    alpha: float
    interval_length: float
    factor: float
    threshold_count: int
    I: int
    I_half_open: int
    chosen_intervals: tuple[tuple[float, float], ...]
    bound_x_term: float | None = None
    bound_log_term: float | None = None
    empirical_ratio: float | None = None
    upper_limit: int = 0
    cut: str = ""
    detail: dict = field(default_factory=dict, repr=False)


def threshold_count(n: int, alpha: float, factor: float) -> int:
    """Smallest integer >= factor * n^(1 - alpha) / (2 pi), guarded against rounding up noise."""
    x = factor * n ** (1.0 - alpha) / TWO_PI
    r = round(x)
    if abs(x - r) <= 1e-9 * max(1.0, x):
        return max(int(r), 1)
    return max(int(math.ceil(x)), 1)


def theorem_bound(X: int, log_integral: float, n: int, alpha: float) -> tuple[float, float]:
    """(n^(alpha-1) X, n^(2 alpha-1) log_integral); no implied constant."""
    if n < 1:
        raise ParameterError("theorem_bound needs n >= 1")
    return n ** (alpha - 1.0) * X, n ** (2.0 * alpha - 1.0) * log_integral


# Positions are (value, k): value + k * eta for an infinitesimal eta > 0.
# Lexicographic tuple comparison then decides strict/non-strict contacts exactly.

def _greedy(y: np.ndarray, T: int, L: float, start: tuple[float, int], end: tuple[float, int],
            closed: bool) -> list[tuple[int, int]]:
    """Earliest-finish greedy on a line segment for arcs holding >= T points.

    ``y`` is sorted. Arcs must begin after ``start`` (closed) or at/after it
    (half-open) and end by ``end``. Returns the index window (k, m) of the
    points each chosen arc was built around.
    """
    out = []
    R = start
    i0 = 0
    n = y.size
    while True:
        # first point still available after the previous arc
        while i0 < n and ((y[i0], 0) <= R if closed else (y[i0], 0) < R):
            i0 += 1
        m = i0 + T - 1
        chosen = None
        while m < n:
            k = m - T + 1
            lo = y[m] - L
            if closed:
                if lo <= y[k]:
                    a = max((lo, 0), (R[0], R[1] + 1))
                    chosen = (a[0] + L, a[1]) if a[1] else (y[m], 0)
                    break
            else:
                if lo < y[k]:
                    a = max((lo, 1), R)
                    chosen = (y[m], 1) if a == (lo, 1) else (a[0] + L, a[1])
                    break
            m += 1
        if chosen is None or chosen > end:
            return out
        out.append((k, m))
        R = chosen


def _feasible_right_ends(u: np.ndarray, m: np.ndarray, T: int, L: float, closed: bool) -> np.ndarray:
    """Indices of distinct angles that end some window of >= T points spanning <= L (or < L)."""
    d = u.size
    uu = np.concatenate([u - TWO_PI, u])
    cs = np.concatenate([[0.0], np.cumsum(np.concatenate([m, m]))])
    # for right end uu[d + i], the leftmost start within reach
    if closed:
        j = np.searchsorted(uu, uu[d:] - L, side="left")
    else:
        j = np.searchsorted(uu, uu[d:] - L, side="right")
    j = np.maximum(j, np.arange(1, d + 1))  # never wrap past the point itself
    count = cs[d + np.arange(d) + 1] - cs[j]
    return np.flatnonzero(count >= T)


def _lift(u: np.ndarray, m: np.ndarray, c: float) -> np.ndarray:
    """Points on the line (c, c + 2 pi], with multiplicity."""
    v = np.where(u > c, u, u + TWO_PI)
    order = np.argsort(v, kind="stable")
    return np.repeat(v[order], m[order].astype(int))


def _pack_circle(u: np.ndarray, m: np.ndarray, T: int, L: float, closed: bool):
    """Maximum packing on the circle: (windows, lifted points, cut, how)."""
    if m.sum() < T:
        return [], None, 0.0, "empty"
    gaps = np.diff(np.concatenate([u, [u[0] + TWO_PI]]))
    g = int(np.argmax(gaps))
    if gaps[g] > 2 * L:
        # no qualifying arc can contain the middle of a gap longer than 2L
        c = u[g] + gaps[g] / 2
        y = _lift(u, m, c)
        return _greedy(y, T, L, (c, 0), (c + TWO_PI, 0), closed), y, c, "gap"
    # Rotating an optimal packing backwards until one arc's right end meets its
    # last point keeps every arc's points, so some optimum has an arc ending at
    # a feasible right end y0; cutting there loses nothing.
    best: tuple = ([], None, 0.0, "candidates")
    for i in _feasible_right_ends(u, m, T, L, closed):
        c = float(u[i])
        y = _lift(u, m, c)
        if closed:
            got = _greedy(y, T, L, (c, 0), (c + TWO_PI, 0), True)
        else:
            got = _greedy(y, T, L, (c, 1), (c + TWO_PI, 1), False)
        if len(got) > len(best[0]):
            best = (got, y, c, "candidates")
    return best


def _realize(windows, y: np.ndarray, c: float, L: float) -> tuple[tuple[float, float], ...]:
    """Concrete closed arcs for greedy windows, each clear of its points by a small margin.

    Each arc is placed as far left as its points and its predecessor allow,
    then moved right by min(eta, half its slack), so no sample angle sits on
    an endpoint and rounding in the reduction mod 2 pi cannot change a count.
    """
    if not windows:
        return ()
    vals = np.unique(np.concatenate([y, [c, c + TWO_PI]]))
    sep = float(np.diff(vals).min()) if vals.size > 1 else 1.0
    eta = min(1e-12, sep / 8.0)
    out = []
    prev_end = c + eta
    for k, m in windows:
        lower = max(y[m] - L, prev_end + eta)
        shift = min(eta, (y[k] - lower) / 2)
        a = lower + shift
        prev_end = a + L
        out.append((a, prev_end))
    return tuple(sorted((float(a % TWO_PI), float(a % TWO_PI + L)) for a, _ in out))


def clustering_count(s: AngularSample, alpha: float, factor: float = 5.0,
                     X: int | None = None, log_integral: float | None = None) -> ClusterReport:
    """Maximum number of disjoint arcs of length n^-alpha holding >= factor * expected roots.

    Pass ``X`` and ``log_integral`` to fill the two bound terms and their ratio.
    """
    n = int(s.n_total)
    if not (0.0 <= alpha <= 1.0):
        raise ParameterError(f"alpha must lie in [0, 1], got {alpha}")
    if factor <= 1.0:
        raise ParameterError(f"factor must exceed 1, got {factor}")
    if n < 2:
        raise ParameterError("clustering needs n_total >= 2")
    L = n ** (-alpha)
    if L >= TWO_PI:
        raise DegenerateInputError("interval length n^-alpha is not below 2 pi")
    T = threshold_count(n, alpha, factor)
    if s.angles.size:
        u, m = _distinct(s.angles)
        closed, y, c, how = _pack_circle(u, m, T, L, True)
        half = _pack_circle(u, m, T, L, False)[0]
        chosen = _realize(closed, y, c, L)
    else:
        closed, half, chosen, how = [], [], (), "empty"
    bx = bl = ratio = None
    if X is not None and log_integral is not None:
        bx, bl = theorem_bound(X, log_integral, n, alpha)
        if bx + bl > 0:
            ratio = len(closed) / (bx + bl)
    return ClusterReport(alpha=float(alpha), interval_length=L, factor=float(factor),
                         threshold_count=T, I=len(closed), I_half_open=len(half),
                         chosen_intervals=chosen, bound_x_term=bx, bound_log_term=bl,
                         empirical_ratio=ratio,
                         upper_limit=int(math.floor(TWO_PI / factor * n ** alpha + 1e-9)),
                         cut=how)


def count_in_arc(angles: np.ndarray, a: float, b: float, closed: bool = True) -> int:
    """Angles in the arc from a to b (b - a <= 2 pi), closed or half-open [a, b)."""
    x = np.mod(np.asarray(angles, dtype=float) - a, TWO_PI)
    w = b - a
    if w >= TWO_PI:
        return int(x.size)
    return int(np.sum(x <= w) if closed else np.sum(x < w))


# ---------------------------------------------------------------------- census

@dataclass(frozen=True)
class RegionCensus:
    J: tuple[float, float]
    A1: int
    A2: int
    A3: int
    B1: int
    B2: int
    case_label: str
    largeness: float
    dense: bool

    @property
    def total(self) -> int:
        return self.A1 + self.A2 + self.A3 + self.B1 + self.B2


def region_census(rs: RootSet | np.ndarray, J: tuple[float, float], alpha: float,
                  factor: float = 5.0, c: float = 0.01) -> RegionCensus:
    """Split roots by argument in the closed arc J and by modulus bands.

    Moduli within ``UNIT_SNAP`` of 1 are treated as exactly 1, so computed
    roots on the circle land in A3 or B1 regardless of their last bit.
    Roots at the origin have no argument and are counted in B2. The case
    label is ``a`` if |A1| >= c n^(1-alpha), else ``b`` if |A3| >= c n^(1-alpha),
    else ``c`` if J holds at least factor * |J| n / (2 pi) roots, else ``none``.
    """
    z = rs.roots if isinstance(rs, RootSet) else np.asarray(rs, dtype=complex)
    n = z.size
    a, b = float(J[0]), float(J[1])
    r = np.abs(z)
    r = np.where(np.abs(r - 1.0) <= UNIT_SNAP, 1.0, r)
    nz = r > 0
    in_j = np.zeros(n, dtype=bool)
    if nz.any():
        x = np.mod(np.angle(z[nz]) - a, TWO_PI)
        in_j[nz] = (x <= b - a) if b - a < TWO_PI else True
    outer = 1.0 + n ** (-alpha)
    A1 = int(np.sum(in_j & (r >= outer)))
    A2 = int(np.sum(in_j & (r > 1.0) & (r < outer)))
    A3 = int(np.sum(in_j & (r <= 1.0)))
    B1 = int(np.sum(~in_j & (r >= 1.0)))
    B2 = n - A1 - A2 - A3 - B1
    big = c * n ** (1.0 - alpha)
    dense = (A1 + A2 + A3) >= factor * (b - a) * n / TWO_PI - 1e-9
    if A1 >= big:
        label = "a"
    elif A3 >= big:
        label = "b"
    elif dense:
        label = "c"
    else:
        label = "none"
    return RegionCensus((a, b), A1, A2, A3, B1, B2, label, c, bool(dense))


# --------------------------------------------------------------------- winding

def _arc_distance(z: complex, a: float, b: float) -> float:
    r = abs(z)
    if r > 0 and (b - a >= TWO_PI or (math.atan2(z.imag, z.real) - a) % TWO_PI <= b - a):
        return abs(r - 1.0)
    return min(abs(complex(math.cos(a), math.sin(a)) - z), abs(complex(math.cos(b), math.sin(b)) - z))


def _unwrapped_change(z: complex, a: float, b: float) -> float:
    """Argument change of e^{it} - z over [a, b] on a grid graded toward the nearest circle point."""
    theta = math.atan2(z.imag, z.real)
    width = max(abs(abs(z) - 1.0), ARC_CLEARANCE)
    pts = _breakpoints(width / 8, theta, a, b)
    t = np.unique(np.concatenate([[a, b], np.linspace(a, b, 4097), pts]))
    w = np.exp(1j * t) - z
    return float(np.sum(np.angle(w[1:] / w[:-1])))


def winding_integral(rs: RootSet | np.ndarray, J: tuple[float, float]) -> float:
    """Integral over J of d/dt arg p(e^{it}), summed root by root."""
    z = rs.roots if isinstance(rs, RootSet) else np.asarray(rs, dtype=complex)
    a, b = float(J[0]), float(J[1])
    if b < a or b - a > TWO_PI + 1e-15:
        raise ParameterError("J must satisfy a <= b <= a + 2 pi")
    total = 0.0
    for zk in z:
        zk = complex(zk)
        if _arc_distance(zk, a, b) < ARC_CLEARANCE:
            raise SingularInputError(f"root {zk} lies within {ARC_CLEARANCE} of the arc")
        r = abs(zk)
        if abs(r - 1.0) > NEAR_CIRCLE:
            theta = math.atan2(zk.imag, zk.real)
            total += integrate_arg_derivative(r, theta, a, b)[0]
        else:
            total += _unwrapped_change(zk, a, b)
    return total


def gap_cv(s: AngularSample) -> float:
    """Coefficient of variation of consecutive circular gaps between angles."""
    x = np.sort(np.asarray(s.angles, dtype=float))
    if x.size < 2:
        raise DegenerateInputError("gap statistics need at least two angles")
    gaps = np.diff(np.concatenate([x, [x[0] + TWO_PI]]))
    return float(gaps.std() / gaps.mean())


__all__ = ["angular_discrepancy", "et_bound", "ClusterReport", "clustering_count",
           "threshold_count", "theorem_bound", "count_in_arc", "RegionCensus", "region_census",
           "winding_integral", "gap_cv", "angular_sample"]
