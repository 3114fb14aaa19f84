"""Log-modulus integrals over the unit circle and the Jensen cross-check.

The quadrature engine is composite 8-point Gauss-Legendre on panels of the
circle. Each panel is also integrated on its two halves; the difference is the
panel's error estimate, and panels that miss their share of the tolerance are
bisected. Bisection therefore grades geometrically toward zeros of p on or
near the circle, until a panel's error is negligible in absolute terms or
its width reaches 1e-12. The first level uses
FFT evaluation on shifted uniform grids; refined panels use Horner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateInputError, ParameterError
from .poly import Polynomial, eval_on_circle_grid, evaluate
from .rootfind import RootSet

TWO_PI = 2.0 * math.pi
MIN_WIDTH = 1e-12
DEFAULT_RTOL = 1e-6
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_TINY = 1e-300


@dataclass(frozen=True)
class CircleIntegralResult:
    """Quadrature value with its bookkeeping.

    ``value_half`` is the same mesh integrated with one rule per panel instead
    of two; ``error_estimate`` is the sum of per-panel differences, so it is
    never smaller than ``|value - value_half|``.
    """

    value: float
    nodes_used: int
    refined_windows: int
    error_estimate: float
    value_half: float
    converged: bool
    tol: float


def _fine_offsets():
    """Relative node offsets and weights of the two-half rule on a unit panel."""
    x = np.concatenate([(_GL_X + 1) / 4, 0.5 + (_GL_X + 1) / 4])
    wt = np.concatenate([_GL_W, _GL_W]) / 4
    return x, wt


def _coarse_offsets():
    return (_GL_X + 1) / 2, _GL_W / 2


def _values_fft(p: Polynomial, m: int, rel: np.ndarray) -> np.ndarray:
    """|p| at exp(i(2 pi j/m + rel_k 2 pi/m)) for all panels j, shape (m, len(rel))."""
    w = TWO_PI / m
    cols = [np.abs(eval_on_circle_grid(p, m, offset=r * w)) for r in rel]
    return np.stack(cols, axis=1)


def _values_horner(p: Polynomial, a: np.ndarray, w: np.ndarray, rel: np.ndarray) -> np.ndarray:
    t = a[:, None] + rel[None, :] * w[:, None]
    return np.abs(evaluate(p, np.exp(1j * t)))


def circle_quadrature(p: Polynomial, integrand: Callable[[np.ndarray], np.ndarray],
                      rtol: float = DEFAULT_RTOL, panels: int | None = None,
                      breakpoints: np.ndarray | None = None, max_nodes: int = 4_000_000,
                      max_depth: int = 64) -> CircleIntegralResult:
    """Integrate ``integrand(|p(e^it)|)`` over t in [0, 2 pi).

    ``breakpoints`` are extra panel boundaries (kinks of the integrand).
    Convergence means ``error_estimate <= rtol * (1 + |value|)``; the
    refinement itself aims a hundred times lower to leave margin.
    """
    n = max(p.degree, 1)
    m = panels or max(8 * n, 32)
    xf, wf = _fine_offsets()
    xc, wc = _coarse_offsets()

    base_a = TWO_PI * np.arange(m) / m
    base_w = np.full(m, TWO_PI / m)
    gf = integrand(_values_fft(p, m, xf))
    gc = integrand(_values_fft(p, m, xc))
    qf = (gf @ wf) * base_w
    qc = (gc @ wc) * base_w
    nodes = m * (xf.size + xc.size)

    a, w = base_a, base_w
    if breakpoints is not None and len(breakpoints):
        bp = np.sort(np.mod(np.asarray(breakpoints, dtype=float), TWO_PI))
        j = np.minimum((bp / (TWO_PI / m)).astype(int), m - 1)
        hit = np.unique(j)
        keep = np.ones(m, dtype=bool)
        keep[hit] = False
        sub_a, sub_w = [], []
        for jj in hit:
            lo, hi = base_a[jj], base_a[jj] + base_w[jj]
            cuts = bp[(bp > lo) & (bp < hi)]
            edges = np.concatenate([[lo], cuts, [hi]])
            widths = np.diff(edges)
            ok = widths > 0
            sub_a.extend(edges[:-1][ok])
            sub_w.extend(widths[ok])
        sub_a = np.array(sub_a)
        sub_w = np.array(sub_w)
        sqf = (integrand(_values_horner(p, sub_a, sub_w, xf)) @ wf) * sub_w
        sqc = (integrand(_values_horner(p, sub_a, sub_w, xc)) @ wc) * sub_w
        nodes += sub_a.size * (xf.size + xc.size)
        a = np.concatenate([a[keep], sub_a])
        w = np.concatenate([w[keep], sub_w])
        qf = np.concatenate([qf[keep], sqf])
        qc = np.concatenate([qc[keep], sqc])

    v0 = float(qf.sum())
    target = rtol * (1.0 + abs(v0)) / 100.0
    floor_share = target / (16.0 * m)
    value = 0.0
    value_half = 0.0
    err_total = 0.0
    refined = 0
    depth = 0
    while a.size:
        err = np.abs(qf - qc)
        # a share proportional to width, or a small absolute share, so panels at
        # a logarithmic singularity stop refining once their error is negligible
        accept = ((err <= target * w / TWO_PI) | (err <= floor_share) | (w <= MIN_WIDTH)
                  | ~np.isfinite(err))
        if depth >= max_depth or nodes > max_nodes:
            accept[:] = True
        value += float(qf[accept].sum())
        value_half += float(qc[accept].sum())
        err_total += float(err[accept & np.isfinite(err)].sum())
        split = ~accept
        if not split.any():
            break
        refined += int(split.sum())
        pa, pw = a[split], w[split] / 2
        # each half of a split panel already has its single-rule value
        half_vals = _half_values(p, integrand, pa, pw * 2, xc, wc)
        ca = np.concatenate([pa, pa + pw])
        cw = np.concatenate([pw, pw])
        cqc = np.concatenate([half_vals[0], half_vals[1]])
        cqf = (integrand(_values_horner(p, ca, cw, xf)) @ wf) * cw
        nodes += ca.size * xf.size
        a, w, qf, qc = ca, cw, cqf, cqc
        depth += 1

    # panels forced through by the budget still carry their error into err_total,
    # so the estimate alone decides convergence
    converged = math.isfinite(value) and err_total <= rtol * (1.0 + abs(value))
    return CircleIntegralResult(value=value, nodes_used=int(nodes), refined_windows=refined,
                                error_estimate=max(err_total, abs(value - value_half)),
                                value_half=value_half, converged=bool(converged), tol=rtol)


def _half_values(p, integrand, a, w, xc, wc):
    """Single-rule values on the left and right halves of panels (a, w)."""
    hw = w / 2
    left = (integrand(_values_horner(p, a, hw, xc)) @ wc) * hw
    right = (integrand(_values_horner(p, a + hw, hw, xc)) @ wc) * hw
    return left, right


def _log_abs(v: np.ndarray) -> np.ndarray:
    return np.log(np.maximum(v, _TINY))


def log_abs_integral(p: Polynomial, rtol: float = DEFAULT_RTOL, **kw) -> CircleIntegralResult:
    """Integral of log|p(e^it)| over [0, 2 pi], with no 1/(2 pi) factor."""
    if p.is_zero():
        raise DegenerateInputError("log|p| is -inf for the zero polynomial")
    if p.degree == 0:
        v = TWO_PI * math.log(abs(p.coeffs[0]))
        return CircleIntegralResult(v, 0, 0, 0.0, v, True, rtol)
    return circle_quadrature(p, _log_abs, rtol=rtol, **kw)


def _level_crossings(p: Polynomial, level: float, m: int) -> np.ndarray:
    """Points where |p(e^it)| crosses ``level``, located by sign changes on an m-grid."""
    t = TWO_PI * np.arange(m) / m
    u = np.log(np.maximum(np.abs(eval_on_circle_grid(p, m)), _TINY)) - math.log(level)

    def f(s):
        return math.log(max(abs(evaluate(p, complex(math.cos(s), math.sin(s)))), _TINY)) - math.log(level)

    out = []
    nxt = np.roll(np.arange(m), -1)
    for i in np.flatnonzero(np.sign(u) * np.sign(u[nxt]) < 0):
        out.append(brentq(f, t[i], t[i] + TWO_PI / m, xtol=1e-14))
    out.extend(t[u == 0])
    return np.array(out)


def h_measure(p: Polynomial, rtol: float = DEFAULT_RTOL, **kw) -> CircleIntegralResult:
    """(1/2 pi) * integral of log+(|p(e^it)| / sqrt|a_0|); zero for degree 0 with |c| = 1."""
    a0 = abs(p.coeffs[0])
    if a0 == 0.0:
        raise DegenerateInputError("h(p) is undefined when a_0 = 0")
    s = math.sqrt(a0)
    if p.degree == 0:
        v = max(0.0, math.log(a0 / s))
        return CircleIntegralResult(v, 0, 0, 0.0, v, True, rtol)
    log_s = math.log(s)

    def g(v):
        return np.maximum(_log_abs(v) - log_s, 0.0) / TWO_PI

    kinks = _level_crossings(p, s, max(64 * p.degree, 256))
    return circle_quadrature(p, g, rtol=rtol, breakpoints=kinks, **kw)


def jensen_sum(rs: RootSet | np.ndarray) -> float:
    """2 pi * sum of log|z_k| over roots outside the closed unit disk."""
    z = rs.roots if isinstance(rs, RootSet) else np.asarray(rs, dtype=complex)
    r = np.abs(z)
    return float(TWO_PI * np.log(r[r > 1.0]).sum())


def jensen_residual(p: Polynomial, rs: RootSet | np.ndarray, rtol: float = DEFAULT_RTOL,
                    integral: CircleIntegralResult | None = None) -> float:
    """|log_abs_integral(p) - jensen_sum(roots)| for a leading-normalized p."""
    if abs(abs(p.leading) - 1.0) > 1e-12:
        raise ParameterError("jensen_residual expects |a_n| = 1")
    if integral is None:
        integral = log_abs_integral(p, rtol=rtol)
    return abs(integral.value - jensen_sum(rs))


def near_circle_count(rs: RootSet | np.ndarray, margin: float = 1e-3) -> int:
    z = rs.roots if isinstance(rs, RootSet) else np.asarray(rs, dtype=complex)
    return int(np.sum(np.abs(np.abs(z) - 1.0) < margin))
