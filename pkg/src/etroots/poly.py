"""Dense complex polynomials, their trigonometric view, and named families.

Coefficients are stored lowest power first: ``coeffs[k]`` multiplies ``z**k``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateInputError, ParameterError

FAMILY_NAMES = ("fejer", "poisson", "young")


class NonnegativityWarning(UserWarning):
    """A family member's trigonometric view dips below zero on the check grid."""


def _as_coeff_array(coeffs: Iterable[complex]) -> np.ndarray:
    arr = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                   dtype=complex).ravel()
    if arr.size == 0:
        raise DegenerateInputError("polynomial needs at least one coefficient")
    if not np.all(np.isfinite(arr)):
        raise ParameterError("coefficients must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class Polynomial:
    """p(z) = sum_k coeffs[k] z**k with a nonzero leading coefficient.

    Trailing zero coefficients are dropped on construction, so ``degree`` is
    always the index of the last stored coefficient. The zero polynomial is
    kept as the single coefficient ``[0]``.
    """

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_coeff_array(self.coeffs)
        nz = np.flatnonzero(arr)
        arr = arr[: nz[-1] + 1] if nz.size else arr[:1]
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def leading(self) -> complex:
        return complex(self.coeffs[-1])

    def __call__(self, z):
        return evaluate(self, z)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        out = np.zeros(max(a.size, b.size), dtype=complex)
        out[: a.size] += a
        out[: b.size] += b
        return Polynomial(out)

    def __len__(self) -> int:
        return self.coeffs.size

    def __repr__(self) -> str:
        return f"Polynomial(degree={self.degree}, coeffs={self.coeffs.tolist()!r})"

    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0


@dataclass(frozen=True)
class TrigView:
    """q(theta) = Re(exp(i*phase) * p(exp(i*theta)))."""

    base: Polynomial
    phase: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "phase", float(self.phase) % (2 * math.pi))

    def __call__(self, theta):
        return eval_trig(self, theta)


@dataclass(frozen=True)
class FamilySpec:
    name: str
    n: int
    rho: float | None = None

    def __post_init__(self) -> None:
        if self.name not in FAMILY_NAMES:
            raise ParameterError(f"unknown family {self.name!r}; expected one of {FAMILY_NAMES}")
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"family degree must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.name == "poisson":
            if self.rho is None or not (0.0 < self.rho < 1.0):
                raise ParameterError(f"poisson family needs 0 < rho < 1, got {self.rho!r}")
        elif self.rho is not None:
            raise ParameterError(f"rho only applies to the poisson family, not {self.name!r}")

    def label(self) -> str:
        if self.name == "poisson":
            return f"poisson(rho={self.rho!r}, n={self.n})"
        return f"{self.name}({self.n})"


def evaluate(p: Polynomial, z):
    """Horner evaluation, highest degree first. Accepts scalars or arrays."""
    c = p.coeffs
    zz = np.asarray(z, dtype=complex)
    acc = np.full(zz.shape, c[-1], dtype=complex)
    for a in c[-2::-1]:
        acc = acc * zz + a
    if acc.ndim == 0:
        return complex(acc)
    return acc


def eval_on_circle_grid(p: Polynomial, m: int, offset: float = 0.0) -> np.ndarray:
    """Values p(exp(i*(offset + 2*pi*j/m))) for j = 0..m-1, via one FFT.

    Coefficients above m-1 are folded modulo m, which is exact on this grid.
    """
    k = np.arange(p.coeffs.size)
    b = p.coeffs * np.exp(1j * offset * k) if offset else np.array(p.coeffs)
    folded = np.zeros(m, dtype=complex)
    np.add.at(folded, k % m, b)
    return np.fft.ifft(folded) * m


def eval_trig(v: TrigView, theta):
    """Re(exp(i*phase) * p(exp(i*theta)))."""
    z = np.exp(1j * np.asarray(theta, dtype=float))
    out = (np.exp(1j * v.phase) * evaluate(v.base, z)).real
    if np.ndim(out) == 0:
        return float(out)
    return out


def trig_on_grid(v: TrigView, m: int) -> np.ndarray:
    """q at theta_j = 2*pi*j/m for j = 0..m-1."""
    return (np.exp(1j * v.phase) * eval_on_circle_grid(v.base, m)).real


def normalize_leading(p: Polynomial) -> Polynomial:
    """Divide by |a_n|, keeping the argument of a_n."""
    if p.is_zero():
        raise DegenerateInputError("cannot normalize the zero polynomial")
    s = abs(p.leading)
    if s == 1.0:
        return p
    return Polynomial(p.coeffs / s)


def rotate_coeffs(p: Polynomial, phi: float) -> Polynomial:
    """Multiply every coefficient by exp(i*phi); the root set is unchanged."""
    return Polynomial(p.coeffs * np.exp(1j * phi))


def rotate_argument(p: Polynomial, psi: float) -> Polynomial:
    """Coefficients a_k -> a_k exp(i*k*psi), i.e. z -> exp(i*psi) z."""
    k = np.arange(p.coeffs.size)
    return Polynomial(p.coeffs * np.exp(1j * psi * k))


def family_raw(spec: FamilySpec) -> Polynomial:
    """Coefficients exactly as displayed for the family, before normalization."""
    n = spec.n
    k = np.arange(1, n + 1, dtype=float)
    a = np.empty(n + 1, dtype=float)
    if spec.name == "fejer":
        a[0] = n + 1
        a[1:] = 2.0 * (n + 1 - k)
    elif spec.name == "poisson":
        rho = float(spec.rho)
        a[0] = rho ** (-n)
        a[1:] = 2.0 * rho ** (k - n)
    else:
        a[0] = n
        a[1:] = n / k
    return Polynomial(a.astype(complex))


def family(spec: FamilySpec, check_grid: bool = True) -> Polynomial:
    """Leading-normalized family member.

    Warns with :class:`NonnegativityWarning` if the real part on the unit
    circle goes negative on a 16n-point grid (poisson with n too small for rho).
    """
    p = normalize_leading(family_raw(spec))
    if check_grid and not is_nonnegative_on_grid(p):
        warnings.warn(f"{spec.label()}: trigonometric view is negative on the 16n grid",
                      NonnegativityWarning, stacklevel=2)
    return p


def is_nonnegative_on_grid(p: Polynomial, points_per_degree: int = 16) -> bool:
    m = max(points_per_degree * p.degree, 16)
    q = trig_on_grid(TrigView(p), m)
    return bool(q.min() >= -1e-9 * max(1.0, np.abs(q).max()))


def add_rotated_copy(p: Polynomial, angle: float = 1.0) -> Polynomial:
    """p(z) + p(exp(i*angle) z), coefficientwise a_k (1 + exp(i*k*angle)).

    ``angle=1`` applied to fejer(20) gives the standard perturbed example.
    """
    k = np.arange(p.coeffs.size)
    return Polynomial(p.coeffs * (1.0 + np.exp(1j * angle * k)))


def read_coeffs(path: str | Path) -> Polynomial:
    """Read a coefficient file: a JSON list of [re, im] pairs, index = power."""
    data = json.loads(Path(path).read_text())
    return Polynomial(parse_coeff_pairs(data))


def parse_coeff_pairs(data) -> np.ndarray:
    """Dense list of pairs, or a sparse ``{"power": [re, im]}`` mapping."""
    if isinstance(data, dict) and data:
        try:
            powers = {int(k): v for k, v in data.items()}
        except ValueError as exc:
            raise ParameterError(f"sparse coefficient keys must be integers: {exc}") from None
        if min(powers) < 0:
            raise ParameterError("sparse coefficient powers must be >= 0")
        dense = [[0.0, 0.0]] * (max(powers) + 1)
        for k, v in powers.items():
            dense[k] = v
        data = dense
    if not isinstance(data, list) or not data:
        raise ParameterError("coefficient file must hold a non-empty list of [re, im] pairs")
    out = np.empty(len(data), dtype=complex)
    for k, pair in enumerate(data):
        if isinstance(pair, (int, float)):
            out[k] = float(pair)
            continue
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ParameterError(f"coefficient {k} is not an [re, im] pair: {pair!r}")
        out[k] = complex(float(pair[0]), float(pair[1]))
    return out


def format_coeff_pairs(coeffs: Sequence[complex]) -> str:
    """Serialize as a JSON list of [re, im] at 17 significant digits."""
    rows = [f"  [{c.real:.17g}, {c.imag:.17g}]" for c in np.asarray(coeffs, dtype=complex)]
    return "[\n" + ",\n".join(rows) + "\n]\n"


def write_coeffs(p: Polynomial | Sequence[complex], path: str | Path) -> None:
    coeffs = p.coeffs if isinstance(p, Polynomial) else p
    Path(path).write_text(format_coeff_pairs(coeffs))
