import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from etroots.errors import DegenerateInputError, ParameterError
from etroots.poly import FamilySpec, Polynomial, family
from etroots.rootfind import (AngularSample, angular_sample, backward_residuals, companion_oracle,
                              find_roots, format_root_table, hausdorff_distance, match_distance,
                              read_root_table, reconstruct_coeffs, write_root_table)


def unit_disk(rng, n):
    return np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))


def test_z2_plus_1():
    rs = find_roots(Polynomial([1, 0, 1]))
    assert sorted(rs.roots, key=lambda z: z.imag) == pytest.approx([-1j, 1j])
    assert rs.residuals.max() < 1e-14
    assert rs.certified


def test_roots_of_unity_angles():
    rs = find_roots(Polynomial([-1] + [0] * 99 + [1]))
    ang = np.sort(np.mod(np.angle(rs.roots), 2 * np.pi))
    expected = 2 * np.pi * np.arange(100) / 100
    err = np.abs(np.angle(np.exp(1j * (ang - expected))))
    assert err.max() < 1e-10


def test_fejer50_matches_companion():
    p = family(FamilySpec("fejer", 50))
    assert hausdorff_distance(find_roots(p).roots, companion_oracle(p).roots) < 1e-8


def test_companion_examples():
    assert sorted(companion_oracle(Polynomial([2, -3, 1])).roots.real) == pytest.approx([1, 2])
    assert companion_oracle(Polynomial([0, 0, 0, 1])).roots.tolist() == [0, 0, 0]


def test_companion_refuses_large_degree():
    with pytest.raises(ParameterError):
        companion_oracle(Polynomial(np.ones(502)))


def test_companion_agrees_on_random_degree_30():
    rng = np.random.default_rng(30)
    p = Polynomial(rng.normal(size=31) + 1j * rng.normal(size=31))
    assert match_distance(find_roots(p).roots, companion_oracle(p).roots) < 1e-8


def test_zero_roots_are_split_off():
    rs = find_roots(Polynomial([0, 0, 1, 1]))
    assert sorted(np.abs(rs.roots)) == pytest.approx([0, 0, 1])
    assert np.sum(rs.roots == 0) == 2


def test_degree_checks():
    with pytest.raises(DegenerateInputError):
        find_roots(Polynomial([3]))
    with pytest.raises(ParameterError):
        find_roots(Polynomial([1, 1]), tol=0)


def test_nonconvergence_is_reported_not_silent():
    rs = find_roots(family(FamilySpec("fejer", 40)), max_sweeps=2)
    assert not rs.certified
    assert "did not converge" in rs.diagnostic


def test_certified_implies_residuals_within_tol():
    rng = np.random.default_rng(5)
    for _ in range(20):
        p = Polynomial(unit_disk(rng, 40))
        rs = find_roots(p)
        if rs.certified:
            assert rs.residuals.max() <= rs.tol


def test_reconstruction_invariant_200_polynomials():
    rng = np.random.default_rng(200)
    for _ in range(200):
        n = int(rng.integers(2, 101))
        c = unit_disk(rng, n + 1)
        c[-1] = c[-1] if abs(c[-1]) > 1e-3 else 1.0
        rs = find_roots(Polynomial(c))
        rec = reconstruct_coeffs(rs.roots, c[-1])
        assert np.max(np.abs(rec - c)) <= 1e-8 * np.max(np.abs(c))


def test_real_coefficients_give_conjugate_closed_roots():
    rng = np.random.default_rng(8)
    p = Polynomial(rng.normal(size=41))
    z = find_roots(p).roots
    assert match_distance(z, np.conj(z)) < 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=2, max_value=60), st.integers(min_value=0, max_value=2**31))
def test_aberth_matches_companion_multiset(n, seed):
    rng = np.random.default_rng(seed)
    p = Polynomial(rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1))
    assert match_distance(find_roots(p).roots, companion_oracle(p).roots) < 1e-8


def test_backward_residual_definition():
    p = Polynomial([1, 0, 1])
    z = np.array([1.0 + 0j])
    assert backward_residuals(p, z)[0] == pytest.approx(2.0 / 2.0)


def test_angular_sample_examples():
    s = angular_sample(np.array([1, 1j, -1, -1j]))
    assert s.angles.tolist() == pytest.approx([0, math.pi / 2, math.pi, 3 * math.pi / 2])
    s = angular_sample(np.array([0, 1 + 0j]))
    assert s.angles.tolist() == [0.0]
    assert s.origin_count == 1 and s.n_total == 2 and s.n_angular == 1


def test_angular_sample_roots_of_unity_gaps():
    s = angular_sample(find_roots(Polynomial([-1] + [0] * 99 + [1])))
    gaps = np.diff(s.angles)
    assert np.abs(gaps - 2 * np.pi / 100).max() < 1e-10
    assert isinstance(s, AngularSample)


def test_root_table_round_trip(tmp_path):
    p = Polynomial([1, 2, 3, 4])
    rs = find_roots(p)
    path = tmp_path / "roots.txt"
    write_root_table(p, rs, path)
    assert read_root_table(path).tolist() == rs.roots.tolist()
    assert format_root_table(p, rs).startswith("# re im modulus argument residual")
