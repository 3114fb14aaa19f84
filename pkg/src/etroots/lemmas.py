"""The argument-derivative kernel and numerical checks of its integral bounds.

For z = r e^{i theta}, the t-derivative of arg(e^{it} - z) is

    (1 - r cos(t - theta)) / (1 - 2 r cos(t - theta) + r^2).

Single integrals use adaptive Gauss-Kronrod (scipy's QUADPACK) with breakpoints
graded toward the peak; bulk arc sweeps use a vectorized composite
Gauss-Legendre antiderivative on a mesh graded the same way. Every check
requires the integrator's own error estimate to stay under 1e-9.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import brentq, minimize_scalar

from .errors import ParameterError, SingularInputError

TWO_PI = 2.0 * math.pi
QUAD_ERR_MAX = 1e-9


@dataclass(frozen=True)
class LemmaCheckResult:
    name: str
    max_violation: float
    samples: int
    passed: bool
    worst_case: tuple = ()
    tolerance: float = 0.0
    detail: dict = field(default_factory=dict)

    def row(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name:<28} {self.max_violation: .3e} {self.samples:>7d}  {status}"


def arg_derivative(r, theta, t):
    """d/dt arg(e^{it} - r e^{i theta}); vectorized over numpy inputs."""
    # 1 - r cos u = (1 - r) + 2 r sin^2(u/2) and 1 - 2 r cos u + r^2 = (1 - r)^2 + 4 r sin^2(u/2);
    # the expanded forms cancel catastrophically near r = 1, u = 0
    s2 = np.sin(0.5 * (np.asarray(t, dtype=float) - theta)) ** 2
    r = np.asarray(r, dtype=float)
    den = (1.0 - r) ** 2 + 4.0 * r * s2
    if np.any(den == 0.0):
        raise SingularInputError("e^{it} coincides with z (r = 1 and t = theta)")
    out = ((1.0 - r) + 2.0 * r * s2) / den
    return float(out) if out.ndim == 0 else out


def arg_change(r: float, theta: float, a: float, b: float) -> float:
    """Exact change of arg(e^{it} - z) for t from a to b, from the antiderivative.

    Outside the disk arg(1 - e^{it}/z) stays in (-pi/2, pi/2); inside it is
    t + arg(1 - z e^{-it}). Both are continuous, so no unwrapping is needed.
    """
    z = r * complex(math.cos(theta), math.sin(theta))
    if r > 1.0:
        def f(t):
            return math.atan2(*_im_re(1.0 - complex(math.cos(t), math.sin(t)) / z))
    elif r < 1.0:
        def f(t):
            return t + math.atan2(*_im_re(1.0 - z * complex(math.cos(t), -math.sin(t))))
    else:
        raise SingularInputError("arg change is singular for r = 1")
    return f(b) - f(a)


def _im_re(w: complex):
    return w.imag, w.real


def integrate_arg_derivative(r: float, theta: float, a: float, b: float,
                             epsabs: float = 1e-12) -> tuple[float, float]:
    """Adaptive quadrature of the kernel over [a, b]; returns (value, error estimate)."""
    if r == 1.0:
        raise SingularInputError("kernel is not integrable across t = theta when r = 1")
    pts = _breakpoints(abs(r - 1.0), theta, a, b)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(lambda t: arg_derivative(r, theta, t), a, b, points=pts or None,
                        epsabs=epsabs, epsrel=0.0, limit=1000)
    return val, err


def _breakpoints(width: float, theta: float, a: float, b: float) -> list[float]:
    """Peaks theta + 2 pi k inside (a, b), plus points graded geometrically around them."""
    offsets = [0.0]
    s = width / 4
    while s < math.pi:
        offsets.append(s)
        s *= 4
    out = set()
    k = math.ceil((a - theta - math.pi) / TWO_PI)
    while theta + k * TWO_PI - math.pi < b:
        c = theta + k * TWO_PI
        for o in offsets:
            for t in (c - o, c + o):
                if a < t < b:
                    out.add(t)
        k += 1
    return sorted(out)


def check_full_circle(r: float, theta: float = 0.0, tol: float = 1e-8) -> LemmaCheckResult:
    """Full-circle integral: 0 outside the disk, 2 pi inside."""
    if r < 0 or r == 1.0:
        raise ParameterError("need r >= 0 and r != 1")
    expected = 0.0 if r > 1.0 else TWO_PI
    val, err = integrate_arg_derivative(r, theta, theta - math.pi, theta + math.pi)
    viol = abs(val - expected)
    return LemmaCheckResult("full_circle", viol, 1, viol <= tol and err < QUAD_ERR_MAX,
                            (r, theta), tol, {"value": val, "expected": expected, "quad_err": err})


def drop_integral(r: float) -> tuple[float, float]:
    """Integral of the kernel over [theta - (r-1), theta + (r-1)] (theta-invariant, so theta = 0)."""
    h = r - 1.0
    return integrate_arg_derivative(r, 0.0, -h, h)


def check_drop(r: float, tol: float = 1e-8) -> LemmaCheckResult:
    """The window integral of half-width r - 1 is at most -3/2 for 1 < r <= 1.1."""
    if not (1.0 < r <= 1.1):
        raise ParameterError(f"check_drop needs 1 < r <= 1.1, got {r}")
    val, err = drop_integral(r)
    viol = max(0.0, val + 1.5)
    return LemmaCheckResult("drop", viol, 1, viol <= tol and err < QUAD_ERR_MAX, (r,), tol,
                            {"value": val, "quad_err": err})


def check_drop_grid(points: int = 1000, tol: float = 1e-8) -> LemmaCheckResult:
    """Sweep r over (1, 1.1]: bound -3/2 everywhere, monotone in r, and <= -1.52 at r = 1.1."""
    rs = 1.0 + 0.1 * np.arange(1, points + 1) / points
    vals = np.empty(points)
    errs = np.empty(points)
    for i, r in enumerate(rs):
        vals[i], errs[i] = drop_integral(float(r))
    bound_viol = float(np.max(vals + 1.5))
    mono_slack = 2.0 * max(float(errs.max()), tol)
    steps = np.diff(vals)
    mono_viol = float(max(0.0, -steps.min()))
    end_viol = float(vals[-1] + 1.52)
    worst = int(np.argmax(vals + 1.5))
    viol = max(bound_viol, end_viol, mono_viol, 0.0)
    passed = (bound_viol <= tol and mono_viol <= mono_slack and end_viol <= tol
              and errs.max() < QUAD_ERR_MAX)
    return LemmaCheckResult("drop_grid", viol, points, bool(passed),
                            (float(rs[worst]),), tol,
                            {"value_at_1.1": float(vals[-1]), "value_near_1": float(vals[0]),
                             "max_value": float(vals.max()), "monotone_violation": mono_viol,
                             "quad_err_max": float(errs.max())})


def _kernel_slope(r: float, u: float) -> float:
    """Numerator N'D - ND' of the kernel's derivative in u (same sign as the derivative)."""
    s2 = math.sin(0.5 * u) ** 2
    num = (1.0 - r) + 2.0 * r * s2
    den = (1.0 - r) ** 2 + 4.0 * r * s2
    return r * math.sin(u) * den - num * 2.0 * r * math.sin(u)


def check_pointwise(r: float, grid: int = 100_000, tol: float = 1e-12) -> LemmaCheckResult:
    """Maximum of the kernel over t - theta is at most 1/(1 + r) for r > 1."""
    if r <= 1.0:
        raise ParameterError("check_pointwise needs r > 1")
    u = TWO_PI * np.arange(grid) / grid
    f = arg_derivative(r, 0.0, u)
    i = int(np.argmax(f))
    h = TWO_PI / grid
    res = minimize_scalar(lambda s: -arg_derivative(r, 0.0, s), bounds=(u[i] - h, u[i] + h),
                          method="bounded", options={"xatol": 1e-12})
    umax = float(res.x)
    # the peak is very flat for r near 1; polish on the sign of the derivative
    lo, hi = u[i] - h, u[i] + h
    if _kernel_slope(r, lo) > 0 > _kernel_slope(r, hi):
        umax = brentq(lambda s: _kernel_slope(r, s), lo, hi, xtol=1e-15)
    umax %= TWO_PI
    fmax = max(float(-res.fun), float(f[i]), float(arg_derivative(r, 0.0, umax)))
    bound = 1.0 / (1.0 + r)
    viol = max(0.0, fmax - bound)
    # stationary points of the kernel in u satisfy sin(u) = 0
    stationarity = abs(math.sin(umax))
    return LemmaCheckResult("pointwise", viol, grid, viol <= tol and fmax <= 0.5 + tol, (r, umax),
                            tol, {"max": fmax, "bound": bound, "argmax": umax,
                                  "stationarity": stationarity})


def check_arc_bounds(r: float, J: tuple[float, float], tol: float = 1e-8) -> LemmaCheckResult:
    """One arc: integral <= pi for r > 1; between 0 and 2 pi for r < 1."""
    if r == 1.0:
        raise ParameterError("check_arc_bounds needs r != 1")
    a, b = J
    val, err = integrate_arg_derivative(r, 0.0, a, b)
    if r > 1.0:
        viol = max(0.0, val - math.pi)
    else:
        viol = max(0.0, -val, val - TWO_PI)
    return LemmaCheckResult("arc_bounds", viol, 1, viol <= tol and err < QUAD_ERR_MAX,
                            (r, a, b), tol, {"value": val, "quad_err": err})


_GL20 = np.polynomial.legendre.leggauss(20)
_GL10 = np.polynomial.legendre.leggauss(10)


def _graded_mesh(r: float) -> np.ndarray:
    """Panel edges on [0, 2 pi] refined geometrically toward the peaks at 0 and 2 pi."""
    w = max(abs(r - 1.0), 1e-15) / 4
    g = []
    while w < 1.0:
        g.append(w)
        w *= 2
    g = np.array(g)
    mid = np.linspace(1.0, TWO_PI - 1.0, 16)
    return np.unique(np.concatenate([[0.0], g, mid, TWO_PI - g[::-1], [TWO_PI]]))


def _gl(r: float, a: np.ndarray, b: np.ndarray, rule) -> np.ndarray:
    x, wt = rule
    h = (b - a) / 2
    t = (a + b)[:, None] / 2 + h[:, None] * x[None, :]
    return (arg_derivative(r, 0.0, t) @ wt) * h


def kernel_antiderivative(r: float, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Integral of the kernel (theta = 0) from 0 to each t in [0, 2 pi], with error estimates.

    Whole panels of the graded mesh are summed cumulatively; the partial panel
    ending at t uses the same 20-point rule. The estimate adds the 20-point
    versus 10-point differences of every panel used.
    """
    if r == 1.0:
        raise SingularInputError("kernel is not integrable across t = 0 when r = 1")
    t = np.asarray(t, dtype=float)
    edges = _graded_mesh(r)
    fine = _gl(r, edges[:-1], edges[1:], _GL20)
    coarse = _gl(r, edges[:-1], edges[1:], _GL10)
    cum = np.concatenate([[0.0], np.cumsum(fine)])
    cum_err = np.concatenate([[0.0], np.cumsum(np.abs(fine - coarse))])
    j = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, edges.size - 2)
    lo = edges[j]
    part = _gl(r, lo, t, _GL20)
    part_err = np.abs(part - _gl(r, lo, t, _GL10))
    return cum[j] + part, cum_err[j] + part_err


def check_arc_bounds_random(r: float, count: int = 10_000, seed: int = 0,
                            tol: float = 1e-8) -> LemmaCheckResult:
    """Random arcs J inside [0, 2 pi] against the bound for radius r (theta = 0)."""
    if r == 1.0:
        raise ParameterError("check_arc_bounds needs r != 1")
    rng = np.random.default_rng(seed)
    ends = np.sort(rng.uniform(0.0, TWO_PI, size=(count, 2)), axis=1)
    fa, ea = kernel_antiderivative(r, ends[:, 0])
    fb, eb = kernel_antiderivative(r, ends[:, 1])
    vals = fb - fa
    errs = ea + eb
    viols = np.maximum(0.0, vals - math.pi) if r > 1.0 else np.maximum(0.0, np.maximum(-vals, vals - TWO_PI))
    # independent check of the quadrature against the exact antiderivative
    k_chk = np.linspace(0, count - 1, min(count, 200)).astype(int)
    exact_dev = max(abs(vals[k] - arg_change(r, 0.0, ends[k, 0], ends[k, 1])) for k in k_chk)
    k = int(np.argmax(viols))
    worst, worst_j = float(viols[k]), (float(ends[k, 0]), float(ends[k, 1]))
    passed = worst <= tol and errs.max() < QUAD_ERR_MAX and exact_dev < QUAD_ERR_MAX
    return LemmaCheckResult(f"arc_bounds_r={r:g}", worst, count, bool(passed), (r,) + worst_j, tol,
                            {"max_value": float(vals.max()), "min_value": float(vals.min()),
                             "quad_err_max": float(errs.max()), "exact_deviation": float(exact_dev)})


def finite_difference_arg(r: float, theta: float, t: float, step: float = 1e-5) -> float:
    """Centered difference of the unwrapped argument of e^{it} - z."""
    z = r * complex(math.cos(theta), math.sin(theta))
    a1 = np.angle(complex(math.cos(t + step), math.sin(t + step)) - z)
    a0 = np.angle(complex(math.cos(t - step), math.sin(t - step)) - z)
    d = (a1 - a0 + math.pi) % TWO_PI - math.pi
    return d / (2 * step)


def check_finite_difference(samples: int = 10_000, seed: int = 0, step: float = 1e-5,
                            tol: float = 1e-5) -> LemmaCheckResult:
    """Closed form against centered differences, r in [0, 0.99] and [1.01, 10]."""
    rng = np.random.default_rng(seed)
    inside = rng.random(samples) < 0.5
    r = np.where(inside, rng.uniform(0.0, 0.99, samples), rng.uniform(1.01, 10.0, samples))
    theta = rng.uniform(0.0, TWO_PI, samples)
    t = rng.uniform(0.0, TWO_PI, samples)
    z = r * np.exp(1j * theta)
    a1 = np.angle(np.exp(1j * (t + step)) - z)
    a0 = np.angle(np.exp(1j * (t - step)) - z)
    fd = ((a1 - a0 + math.pi) % TWO_PI - math.pi) / (2 * step)
    cf = arg_derivative(r, theta, t)
    err = np.abs(cf - fd)
    k = int(np.argmax(err))
    return LemmaCheckResult("finite_difference", float(err[k]), samples, bool(err[k] < tol),
                            (float(r[k]), float(theta[k]), float(t[k])), tol)


def check_shift_invariance(samples: int = 1000, seed: int = 0) -> LemmaCheckResult:
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.0, 10.0, samples)
    r[np.abs(r - 1.0) < 1e-3] = 2.0
    theta = rng.uniform(0.0, TWO_PI, samples)
    t = rng.uniform(0.0, TWO_PI, samples)
    s = rng.uniform(-10.0, 10.0, samples)
    d = np.abs(arg_derivative(r, theta + s, t + s) - arg_derivative(r, theta, t))
    scale = np.maximum(1.0, np.abs(arg_derivative(r, theta, t)))
    rel = d / scale
    k = int(np.argmax(rel))
    return LemmaCheckResult("shift_invariance", float(rel[k]), samples, bool(rel[k] <= 1e-12),
                            (float(r[k]), float(theta[k]), float(t[k]), float(s[k])), 1e-12)


def run_suite(seed: int = 0, drop_points: int = 1000, arc_count: int = 10_000,
              pointwise_count: int = 100) -> list[LemmaCheckResult]:
    """Every kernel check, in a fixed order."""
    out = [check_finite_difference(seed=seed), check_shift_invariance(seed=seed)]
    for r in (1.5, 0.5, 1.0001, 0.9999, 3.0, 0.1):
        res = check_full_circle(r)
        out.append(LemmaCheckResult(f"full_circle_r={r:g}", res.max_violation, 1, res.passed,
                                    res.worst_case, res.tolerance, res.detail))
    out.append(check_drop_grid(drop_points))
    rs = 1.0 + 9.0 * np.arange(1, pointwise_count + 1) / pointwise_count
    pw = [check_pointwise(float(r)) for r in rs]
    worst = max(pw, key=lambda x: x.max_violation)
    out.append(LemmaCheckResult("pointwise_grid", worst.max_violation, pointwise_count,
                                all(x.passed for x in pw), worst.worst_case, worst.tolerance,
                                {"max_stationarity": max(x.detail["stationarity"] for x in pw)}))
    for r in (2.0, 1.05, 0.5):
        out.append(check_arc_bounds_random(r, count=arc_count, seed=seed))
    return out
