"""Seeded randomized property runs used by ``verify`` and the acceptance tests."""

from __future__ import annotations

import math
import warnings

import numpy as np

from .circle import jensen_sum, log_abs_integral
from .discrepancy import angular_discrepancy, et_bound, winding_integral
from .lemmas import LemmaCheckResult, run_suite
from .poly import FamilySpec, NonnegativityWarning, Polynomial, family
from .rootfind import (angular_sample, companion_oracle, find_roots, match_distance,
                       reconstruct_coeffs)

TWO_PI = 2.0 * math.pi
A0_MIN = 1e-2
# quadrature target for the Jensen runs, well inside their 1e-6 acceptance
VERIFY_RTOL = 1e-8


def unit_disk_polynomial(rng: np.random.Generator, n: int) -> Polynomial:
    """Coefficients uniform in the unit disk, |a_n| = 1, and |a_0| >= A0_MIN."""
    r = np.sqrt(rng.random(n + 1))
    c = r * np.exp(1j * rng.uniform(0.0, TWO_PI, n + 1))
    while abs(c[0]) < A0_MIN:
        c[0] = math.sqrt(rng.random()) * np.exp(1j * rng.uniform(0.0, TWO_PI))
    while abs(c[-1]) == 0.0:
        c[-1] = np.exp(1j * rng.uniform(0.0, TWO_PI))
    return Polynomial(c / abs(c[-1]))


def clear_of_circle(rng: np.random.Generator, n: int, margin: float) -> Polynomial:
    """Monic polynomial from roots drawn with ||z| - 1| >= margin."""
    out = []
    while len(out) < n:
        rad = rng.uniform(0.1, 2.0)
        if abs(rad - 1.0) >= margin:
            out.append(rad * np.exp(1j * rng.uniform(0.0, TWO_PI)))
    return Polynomial(reconstruct_coeffs(np.array(out), 1.0))


def jensen_runs(seed: int = 0, count: int = 50, degree: int = 20, rtol: float = 1e-8,
                strict: bool = False) -> LemmaCheckResult:
    """|integral of log|p| - 2 pi sum log|z_k|| <= 1e-6 (1 + |value|) on monic random polynomials."""
    rng = np.random.default_rng(seed)
    worst, worst_seed, unconverged = 0.0, -1, 0
    for k in range(count):
        p = clear_of_circle(rng, degree, 1e-2)
        rs = find_roots(p)
        li = log_abs_integral(p, rtol=rtol)
        unconverged += not li.converged
        rel = abs(li.value - jensen_sum(rs)) / (1.0 + abs(li.value))
        if rel > worst:
            worst, worst_seed = rel, k
    passed = worst <= 1e-6 and (unconverged == 0 or not strict)
    return LemmaCheckResult("jensen_random", worst, count, passed, (seed, worst_seed), 1e-6,
                            {"unconverged": unconverged, "rtol": rtol})


def jensen_exact(rtol: float = 1e-8) -> LemmaCheckResult:
    p = Polynomial([-2.0, 1.0])
    li = log_abs_integral(p, rtol=rtol)
    err = abs(li.value - TWO_PI * math.log(2.0))
    return LemmaCheckResult("jensen_z_minus_2", err, 1, err <= 1e-8, (2.0,), 1e-8,
                            {"value": li.value, "converged": li.converged})


def discrepancy_bound_runs(seed: int = 0, count: int = 100, degree: int = 50, rho: float = 0.9,
                           rtol: float = 1e-8) -> LemmaCheckResult:
    """Discrepancy never exceeds (8/pi) sqrt(h/n): random polynomials plus the three families."""
    rng = np.random.default_rng(seed)
    cases = [("random", unit_disk_polynomial(rng, degree)) for _ in range(count)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonnegativityWarning)
        for spec in (FamilySpec("fejer", degree), FamilySpec("young", degree),
                     FamilySpec("poisson", degree, rho)):
            cases.append((spec.label(), family(spec)))
    worst, worst_case, violations = -math.inf, "", 0
    for label, p in cases:
        rs = find_roots(p)
        d = angular_discrepancy(angular_sample(rs))
        b = et_bound(p, rs, rtol=rtol)
        violations += d > b
        if d - b > worst:
            worst, worst_case = d - b, label
    return LemmaCheckResult("discrepancy_bound", max(worst, 0.0), len(cases), violations == 0,
                            (worst_case,), 0.0, {"violations": violations, "max_gap": worst})


def argument_principle_runs(seed: int = 0, count: int = 50, max_degree: int = 30) -> LemmaCheckResult:
    """Full-circle winding equals 2 pi times the number of roots inside the disk."""
    rng = np.random.default_rng(seed)
    worst, worst_k = 0.0, -1
    for k in range(count):
        n = int(rng.integers(1, max_degree + 1))
        p = clear_of_circle(rng, n, 1e-3)
        rs = find_roots(p)
        inside = int(np.sum(np.abs(rs.roots) < 1.0))
        err = abs(winding_integral(rs, (0.0, TWO_PI)) - TWO_PI * inside)
        if err > worst:
            worst, worst_k = err, k
    return LemmaCheckResult("argument_principle", worst, count, worst <= 1e-6, (seed, worst_k), 1e-6)


def oracle_agreement_runs(seed: int = 0, count: int = 50, max_degree: int = 100) -> LemmaCheckResult:
    """Ehrlich-Aberth against the balanced companion-matrix QR oracle."""
    rng = np.random.default_rng(seed)
    worst, worst_k = 0.0, -1
    for k in range(count):
        n = int(rng.integers(2, max_degree + 1))
        p = Polynomial(rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1))
        d = match_distance(find_roots(p).roots, companion_oracle(p).roots)
        if d > worst:
            worst, worst_k = d, k
    return LemmaCheckResult("aberth_vs_companion", worst, count, worst < 1e-8, (seed, worst_k), 1e-8)


def verify_all(seed: int = 0, rtol: float = VERIFY_RTOL, strict: bool = False) -> list[LemmaCheckResult]:
    out = run_suite(seed=seed)
    out.append(jensen_exact(rtol))
    out.append(jensen_runs(seed, rtol=rtol, strict=strict))
    out.append(discrepancy_bound_runs(seed, rtol=max(rtol, 1e-10)))
    out.append(argument_principle_runs(seed))
    return out


def format_table(results: list[LemmaCheckResult]) -> str:
    lines = [f"{'name':<28} {'max_violation':>13} {'samples':>7}  pass"]
    for r in results:
        lines.append(r.row())
    return "\n".join(lines) + "\n"
