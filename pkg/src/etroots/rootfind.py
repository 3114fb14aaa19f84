"""All roots of a polynomial: Ehrlich-Aberth iteration plus a companion-matrix oracle."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateInputError, ParameterError
from .poly import Polynomial

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
DEFAULT_TOL = 1e-10
MAX_SWEEPS = 500
EPS = float(np.finfo(float).eps)
ORACLE_MAX_DEGREE = 500


@dataclass(frozen=True, eq=False)
class RootSet:
    """Roots z_1..z_n with per-root backward-error residuals.

    ``residuals[k]`` is |p(z_k)| / sum_j |a_j| |z_k|^j, the relative backward
    error of z_k as a root of p.
    """

    roots: np.ndarray
    residuals: np.ndarray
    iterations: int
    certified: bool
    tol: float = DEFAULT_TOL
    method: str = "aberth"
    diagnostic: str = ""

    @property
    def n(self) -> int:
        return self.roots.size

    def __len__(self) -> int:
        return self.roots.size


@dataclass(frozen=True, eq=False)
class AngularSample:
    """Sorted root arguments in [0, 2*pi); origin roots are counted, not sampled."""

    angles: np.ndarray
    n_total: int
    origin_count: int = 0

    @property
    def n_angular(self) -> int:
        return self.angles.size


def backward_residuals(p: Polynomial, z: np.ndarray) -> np.ndarray:
    """|p(z)| / sum |a_k||z|^k, evaluated through the reversed polynomial when |z| > 1."""
    return backward_residuals_coeffs(p.coeffs, z)


def backward_residuals_coeffs(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    ac = np.abs(c)
    out = np.empty(z.shape, dtype=float)
    inside = np.abs(z) <= 1.0
    if inside.any():
        zi = z[inside]
        num = _horner(c, zi)
        den = _horner(ac.astype(complex), np.abs(zi)).real
        out[inside] = _safe_ratio(np.abs(num), den)
    if (~inside).any():
        w = 1.0 / z[~inside]
        num = _horner(c[::-1], w)
        den = _horner(ac[::-1].astype(complex), np.abs(w)).real
        out[~inside] = _safe_ratio(np.abs(num), den)
    return out


def _safe_ratio(num, den):
    with np.errstate(invalid="ignore", divide="ignore"):
        r = num / den
    return np.where(den > 0, r, 0.0)


def _horner(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc = np.full(z.shape, c[-1], dtype=complex)
    for a in c[-2::-1]:
        acc = acc * z + a
    return acc


def _horner_with_derivative(c: np.ndarray, z: np.ndarray):
    p = np.full(z.shape, c[-1], dtype=complex)
    dp = np.zeros(z.shape, dtype=complex)
    for a in c[-2::-1]:
        dp = dp * z + p
        p = p * z + a
    return p, dp


def _newton_ratio(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    """p(z)/p'(z), using the reversed polynomial outside the unit disk to avoid overflow."""
    n = c.size - 1
    out = np.empty(z.shape, dtype=complex)
    inside = np.abs(z) <= 1.0
    if inside.any():
        pv, dv = _horner_with_derivative(c, z[inside])
        out[inside] = pv / dv
    if (~inside).any():
        zo = z[~inside]
        w = 1.0 / zo
        qv, dq = _horner_with_derivative(c[::-1], w)
        # p(z) = z^n q(w)  =>  p/p' = z / (n - w q'(w)/q(w))
        with np.errstate(divide="ignore", invalid="ignore"):
            r = zo / (n - w * dq / qv)
        out[~inside] = np.where(qv == 0, 0.0, r)
    return out


def newton_polygon_start(c: np.ndarray, sigma: float = 0.7) -> np.ndarray:
    """Initial guesses from the upper convex hull of (k, log|a_k|).

    Each hull edge from k_i to k_j places k_j - k_i points on a circle of
    radius (|a_ki| / |a_kj|)^(1/(k_j-k_i)), rotated by a fixed offset so no
    two circles line up.
    """
    n = c.size - 1
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(c))
    idx = [k for k in range(n + 1) if np.isfinite(logs[k])]
    hull: list[int] = []
    for k in idx:
        while len(hull) >= 2:
            k1, k2 = hull[-2], hull[-1]
            # drop k2 if it lies on or below the chord k1 -> k
            if (logs[k2] - logs[k1]) * (k - k1) <= (logs[k] - logs[k1]) * (k2 - k1):
                hull.pop()
            else:
                break
        hull.append(k)
    guesses = []
    for e, (ki, kj) in enumerate(zip(hull[:-1], hull[1:])):
        m = kj - ki
        u = math.exp((logs[ki] - logs[kj]) / m)
        ang = TWO_PI * np.arange(m) / m + TWO_PI * e / n + sigma
        guesses.append(u * np.exp(1j * ang))
    return np.concatenate(guesses)


def _split_zero_roots(p: Polynomial):
    c = p.coeffs
    nz = np.flatnonzero(c)
    k0 = int(nz[0])
    return k0, c[k0:]


def find_roots(p: Polynomial, tol: float = DEFAULT_TOL, max_sweeps: int = MAX_SWEEPS,
               start: np.ndarray | None = None) -> RootSet:
    """All roots of ``p`` with multiplicity, by Ehrlich-Aberth simultaneous iteration.

    Iteration stops for a root once its correction falls below
    ``tol * max(1, |z|)`` or its backward residual drops inside the Horner
    rounding bound 2 (n + 1) eps; the whole run stops when every root has stopped
    or after ``max_sweeps`` sweeps. The result is certified when every
    backward-error residual is at most ``tol``. A run that exhausts the
    sweep budget returns an uncertified set with a diagnostic string.
    """
    if p.degree < 1:
        raise DegenerateInputError("root finding needs degree >= 1")
    if tol <= 0:
        raise ParameterError("tol must be positive")
    k0, c = _split_zero_roots(p)
    m = c.size - 1
    roots = np.zeros(p.degree, dtype=complex)
    sweeps = 0
    diagnostic = ""
    if m == 1:
        roots[k0:] = -c[0] / c[1]
    elif m > 1:
        z = newton_polygon_start(c) if start is None else np.array(start, dtype=complex)
        if z.size != m:
            raise ParameterError(f"start has {z.size} points, need {m}")
        active = np.ones(m, dtype=bool)
        # one extra polishing sweep after the last root stops
        polish = False
        while sweeps < max_sweeps:
            sweeps += 1
            ia = np.flatnonzero(active)
            za = z[ia]
            ratio = _newton_ratio(c, za)
            diff = za[:, None] - z[None, :]
            diff[np.arange(ia.size), ia] = 1.0
            inv = 1.0 / diff
            inv[np.arange(ia.size), ia] = 0.0
            s = inv.sum(axis=1)
            corr = ratio / (1.0 - ratio * s)
            bad = ~np.isfinite(corr)
            if bad.any():
                # exact hit on a root (ratio = 0) or a coincident pair
                corr[bad & (ratio == 0)] = 0.0
                still = ~np.isfinite(corr)
                corr[still] = 1e-8 * (1.0 + np.abs(za[still]))
            # a residual inside Horner's rounding bound means the value is noise;
            # clustered roots otherwise jitter at that level forever
            noise = backward_residuals_coeffs(c, za) <= 2.0 * (m + 1) * EPS
            z[ia] = za - corr
            done = (np.abs(corr) <= tol * np.maximum(1.0, np.abs(za))) | noise
            active[ia[done]] = False
            if polish:
                break
            if not active.any():
                active[:] = True
                polish = True
        else:
            diagnostic = (f"Ehrlich-Aberth did not converge in {max_sweeps} sweeps; "
                          f"{int(active.sum())} roots still moving")
            log.warning(diagnostic)
        roots[k0:] = z
    residuals = backward_residuals(p, roots)
    certified = bool(np.all(residuals <= tol)) and not diagnostic
    if not certified and not diagnostic:
        diagnostic = f"max residual {residuals.max():.3e} exceeds tol {tol:.1e}"
    return RootSet(roots=_readonly(roots), residuals=_readonly(residuals), iterations=sweeps,
                   certified=certified, tol=tol, method="aberth", diagnostic=diagnostic)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.flags.writeable = False
    return a


# --- companion-matrix oracle -------------------------------------------------


def companion_matrix(c: np.ndarray) -> np.ndarray:
    """Upper Hessenberg companion matrix of the monic polynomial with coefficients c."""
    n = c.size - 1
    mon = c[:-1] / c[-1]
    a = np.zeros((n, n), dtype=complex)
    a[0, :] = -mon[::-1]
    a[np.arange(1, n), np.arange(n - 1)] = 1.0
    return a


def balance(a: np.ndarray) -> np.ndarray:
    """Parlett-Reinsch diagonal balancing with powers of two."""
    a = a.copy()
    n = a.shape[0]
    radix = 2.0
    converged = False
    while not converged:
        converged = True
        for i in range(n):
            col = np.abs(a[:, i]).sum() - abs(a[i, i])
            row = np.abs(a[i, :]).sum() - abs(a[i, i])
            if col == 0.0 or row == 0.0:
                continue
            g = row / radix
            f = 1.0
            s = col + row
            while col < g:
                f *= radix
                col *= radix * radix
            g = row * radix
            while col > g:
                f /= radix
                col /= radix * radix
            if (col + row) / f < 0.95 * s:
                converged = False
                a[i, :] /= f
                a[:, i] *= f
    return a


def hessenberg_eigvals(h: np.ndarray, max_iter_per_eig: int = 60) -> np.ndarray:
    """Eigenvalues of an upper Hessenberg matrix by single-shift complex QR.

    Wilkinson shifts with deflation on small subdiagonals; an exceptional
    shift every 10 stalled iterations breaks cycles.
    """
    h = np.array(h, dtype=complex)
    n = h.shape[0]
    eigs = np.zeros(n, dtype=complex)
    hi = n - 1
    iters = 0
    eps = np.finfo(float).eps
    while hi >= 0:
        if hi == 0:
            eigs[0] = h[0, 0]
            break
        # find the active unreduced block [lo, hi]
        lo = hi
        while lo > 0:
            s = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if s == 0.0:
                s = np.abs(h[: hi + 1, : hi + 1]).sum()
            if abs(h[lo, lo - 1]) <= eps * s:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eigs[hi] = h[hi, hi]
            hi -= 1
            iters = 0
            continue
        iters += 1
        if iters > max_iter_per_eig:
            raise np.linalg.LinAlgError("QR iteration failed to converge")
        if iters % 10 == 0:
            mu = h[hi, hi] + abs(h[hi, hi - 1]) * (0.75 + 0.5j)
        else:
            a, b = h[hi - 1, hi - 1], h[hi - 1, hi]
            cc, d = h[hi, hi - 1], h[hi, hi]
            tr = a + d
            det = a * d - b * cc
            disc = np.sqrt(tr * tr / 4 - det)
            l1, l2 = tr / 2 + disc, tr / 2 - disc
            mu = l1 if abs(l1 - d) < abs(l2 - d) else l2
        _qr_sweep(h, lo, hi, mu)
    return eigs


def _qr_sweep(h: np.ndarray, lo: int, hi: int, mu: complex) -> None:
    """One explicit-shift QR step H - mu I = QR, H <- RQ + mu I on rows/cols lo..hi."""
    n = h.shape[0]
    for k in range(lo, hi + 1):
        h[k, k] -= mu
    rots = []
    for k in range(lo, hi):
        x, y = h[k, k], h[k + 1, k]
        r = math.hypot(abs(x), abs(y))
        if r == 0.0:
            c, s = 1.0, 0.0
        else:
            c, s = x / r, y / r
        # G = [[conj(c), conj(s)], [-s, c]] applied to rows k, k+1
        rk = h[k, k:n].copy()
        rk1 = h[k + 1, k:n].copy()
        h[k, k:n] = np.conj(c) * rk + np.conj(s) * rk1
        h[k + 1, k:n] = -s * rk + c * rk1
        rots.append((c, s))
    for k, (c, s) in zip(range(lo, hi), rots):
        top = min(k + 2, hi) + 1
        ck = h[:top, k].copy()
        ck1 = h[:top, k + 1].copy()
        h[:top, k] = c * ck + s * ck1
        h[:top, k + 1] = -np.conj(s) * ck + np.conj(c) * ck1
    for k in range(lo, hi + 1):
        h[k, k] += mu


def companion_oracle(p: Polynomial) -> RootSet:
    """Roots as eigenvalues of the balanced companion matrix. Test oracle only."""
    if p.degree < 1:
        raise DegenerateInputError("root finding needs degree >= 1")
    if p.degree > ORACLE_MAX_DEGREE:
        raise ParameterError(f"companion oracle refuses degree {p.degree} > {ORACLE_MAX_DEGREE}")
    k0, c = _split_zero_roots(p)
    roots = np.zeros(p.degree, dtype=complex)
    if c.size > 1:
        roots[k0:] = hessenberg_eigvals(balance(companion_matrix(c)))
    residuals = backward_residuals(p, roots)
    return RootSet(roots=_readonly(roots), residuals=_readonly(residuals), iterations=0,
                   certified=bool(np.all(residuals <= DEFAULT_TOL)), method="companion")


# --- root-set utilities --------------------------------------------------------


def angular_sample(rs: RootSet | np.ndarray, n_total: int | None = None) -> AngularSample:
    """Sorted arguments in [0, 2*pi), excluding roots exactly at the origin."""
    roots = rs.roots if isinstance(rs, RootSet) else np.asarray(rs, dtype=complex)
    at_origin = roots == 0
    ang = np.mod(np.angle(roots[~at_origin]), TWO_PI)
    ang[ang >= TWO_PI] = 0.0
    ang.sort()
    total = roots.size if n_total is None else n_total
    return AngularSample(angles=_readonly(ang), n_total=int(total),
                         origin_count=int(at_origin.sum()))


def match_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Max distance under greedy minimal-distance matching of two root multisets."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.size != b.size:
        raise ParameterError("multisets differ in size")
    d = np.abs(a[:, None] - b[None, :])
    order = np.argsort(d, axis=None, kind="stable")
    used_a = np.zeros(a.size, dtype=bool)
    used_b = np.zeros(b.size, dtype=bool)
    worst = 0.0
    left = a.size
    for flat in order:
        i, j = divmod(int(flat), b.size)
        if used_a[i] or used_b[j]:
            continue
        used_a[i] = used_b[j] = True
        worst = max(worst, float(d[i, j]))
        left -= 1
        if left == 0:
            break
    return worst


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    d = np.abs(np.asarray(a)[:, None] - np.asarray(b)[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def reconstruct_coeffs(roots: np.ndarray, leading: complex) -> np.ndarray:
    """Coefficients (lowest power first) of leading * prod (z - z_k).

    The product is sampled at the (n+1)-th roots of unity and inverted by FFT.
    Expanding factor by factor (``np.poly``) cancels catastrophically once the
    roots straddle the unit circle at moderate degree; the sampled product
    never forms those large intermediate coefficients.
    """
    z = np.asarray(roots, dtype=complex).ravel()
    m = z.size + 1
    w = np.exp(2j * np.pi * np.arange(m) / m)
    vals = np.empty(m, dtype=complex)
    step = max(1, 2_000_000 // m)
    for i in range(0, m, step):
        vals[i:i + step] = np.prod(w[i:i + step, None] - z[None, :], axis=1)
    return leading * np.fft.fft(vals) / m


def format_root_table(p: Polynomial, rs: RootSet) -> str:
    """Root dump: re, im, modulus, argument, residual at full precision."""
    lines = ["# re im modulus argument residual"]
    for z, r in zip(rs.roots, rs.residuals):
        lines.append(f"{z.real:.17g} {z.imag:.17g} {abs(z):.17g} "
                     f"{math.atan2(z.imag, z.real) % TWO_PI:.17g} {r:.17g}")
    return "\n".join(lines) + "\n"


def write_root_table(p: Polynomial, rs: RootSet, path: str | Path) -> None:
    Path(path).write_text(format_root_table(p, rs))


def read_root_table(path: str | Path) -> np.ndarray:
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        rows.append(complex(float(parts[0]), float(parts[1])))
    return np.array(rows, dtype=complex)
