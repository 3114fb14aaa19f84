import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from etroots.circle import log_abs_integral
from etroots.discrepancy import (angular_discrepancy, clustering_count, count_in_arc, et_bound,
                                 gap_cv, region_census, theorem_bound, threshold_count,
                                 winding_integral)
from etroots.errors import DegenerateInputError, ParameterError, SingularInputError
from etroots.poly import FamilySpec, Polynomial, TrigView, evaluate, family
from etroots.rootfind import AngularSample, angular_sample, find_roots, reconstruct_coeffs
from etroots.trig import count_real_roots
from oracles import (brute_discrepancy, brute_force_packing, clustered_angles, unwrapped_arg_change,
                     window_counts)

TWO_PI = 2 * math.pi


def unity_sample(n=100):
    return angular_sample(find_roots(Polynomial([-1] + [0] * (n - 1) + [1])))


# ------------------------------------------------------------- discrepancy

def test_equispaced_four():
    s = AngularSample(np.array([0, math.pi / 2, math.pi, 3 * math.pi / 2]), 4)
    assert angular_discrepancy(s) == pytest.approx(0.25, abs=1e-15)


def test_single_angle():
    assert angular_discrepancy(AngularSample(np.array([0.0]), 1)) == 1.0


def test_roots_of_unity():
    assert angular_discrepancy(unity_sample()) == pytest.approx(0.01, abs=1e-10)


def test_empty_sample_rejected():
    with pytest.raises(DegenerateInputError):
        angular_discrepancy(AngularSample(np.array([]), 3))


def test_origin_roots_enter_the_full_circle_term():
    s = angular_sample(np.array([0, 0, 1, 1j, -1, -1j]))
    assert angular_discrepancy(s) == pytest.approx(brute_discrepancy(s.angles, 6))
    assert angular_discrepancy(s) >= 2 / 6


@pytest.mark.parametrize("seed", range(30))
def test_discrepancy_matches_pairwise_oracle(seed):
    r = np.random.default_rng(seed)
    m = int(r.integers(1, 25))
    x = np.sort(r.uniform(0, TWO_PI, m))
    if seed % 3 == 0:
        x = np.sort(np.concatenate([x, x[: m // 2]]))
    n_total = x.size + int(r.integers(0, 3))
    assert angular_discrepancy(AngularSample(x, n_total)) == pytest.approx(
        brute_discrepancy(x, n_total), abs=1e-13)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 359), min_size=1, max_size=40), st.integers(0, 359))
def test_discrepancy_rotation_invariant(deg, shift):
    # integer-degree angles make the rotation exact up to one rounding of each angle
    a = np.sort(np.radians(np.array(deg, dtype=float)))
    b = np.sort(np.radians(np.mod(np.array(deg) + shift, 360).astype(float)))
    d1 = angular_discrepancy(AngularSample(a, len(deg)))
    d2 = angular_discrepancy(AngularSample(b, len(deg)))
    assert d1 == pytest.approx(d2, abs=1e-12)
    assert 0 < d1 <= 1


def test_discrepancy_bound_holds_for_families():
    for spec in (FamilySpec("fejer", 50), FamilySpec("young", 50), FamilySpec("poisson", 50, 0.9)):
        p = family(spec)
        assert angular_discrepancy(angular_sample(find_roots(p))) <= et_bound(p)


def test_bound_is_zero_when_h_is_zero():
    # |0.25 + 0.25 z| <= 0.5 = sqrt|a_0| on the circle, so log+ vanishes
    assert et_bound(Polynomial([0.25, 0.25])) == 0.0


# -------------------------------------------------------------- clustering

def test_threshold_examples():
    assert threshold_count(100, 0.5, 5) == 8
    assert threshold_count(4, 1.0, 2 * math.pi) == 1


def test_atom_gives_one_interval():
    rep = clustering_count(AngularSample(np.full(100, 1.3), 100), 0.5, 5)
    assert rep.I == 1
    a, b = rep.chosen_intervals[0]
    assert count_in_arc(np.full(100, 1.3), a, b) == 100


def test_roots_of_unity_have_no_dense_interval():
    s = unity_sample()
    rep = clustering_count(s, 0.5, 5)
    assert rep.I == 0 and rep.threshold_count == 8
    starts = np.linspace(0, TWO_PI, 20001)
    assert window_counts(s.angles, starts, rep.interval_length).max() == 2


def test_fejer_lift_has_no_dense_interval():
    s = angular_sample(find_roots(family(FamilySpec("fejer", 50))))
    rep = clustering_count(s, 0.5, 5)
    assert rep.I == 0
    starts = np.concatenate([s.angles, s.angles - rep.interval_length])
    assert window_counts(s.angles, starts, rep.interval_length).max() < rep.threshold_count


def test_clustering_parameter_errors():
    s = AngularSample(np.array([0.0, 1.0]), 2)
    with pytest.raises(ParameterError):
        clustering_count(s, 1.5)
    with pytest.raises(ParameterError):
        clustering_count(s, 0.5, factor=1.0)
    with pytest.raises(ParameterError):
        clustering_count(AngularSample(np.array([0.0]), 1), 0.5)


@pytest.mark.parametrize("seed", range(25))
def test_greedy_matches_brute_force(seed):
    n, x = clustered_angles(seed)
    s = AngularSample(x, n)
    for alpha in (0.5, 0.75):
        rep = clustering_count(s, alpha)
        o = brute_force_packing(x, rep.interval_length, rep.threshold_count)
        if o is not None:
            assert rep.I == o
        oh = brute_force_packing(x, rep.interval_length, rep.threshold_count, closed=False)
        if oh is not None:
            assert rep.I_half_open == oh
        assert rep.I <= rep.upper_limit


@pytest.mark.parametrize("seed", range(15))
def test_chosen_intervals_recount(seed):
    n, x = clustered_angles(100 + seed)
    rep = clustering_count(AngularSample(x, n), 0.5)
    ch = rep.chosen_intervals
    assert len(ch) == rep.I
    for a, b in ch:
        assert b - a == pytest.approx(rep.interval_length, rel=1e-9)
        assert window_counts(x, np.array([a]), b - a)[0] >= rep.threshold_count
    for i in range(len(ch)):
        for j in range(i + 1, len(ch)):
            d = (ch[j][0] - ch[i][0]) % TWO_PI
            assert rep.interval_length < d < TWO_PI - rep.interval_length


@pytest.mark.parametrize("seed", range(8))
def test_antitone_in_factor(seed):
    n, x = clustered_angles(200 + seed)
    s = AngularSample(x, n)
    counts = [clustering_count(s, 0.5, f).I for f in (1.5, 2, 3, 5, 8, 13)]
    assert counts == sorted(counts, reverse=True)


def test_theorem_bound_examples():
    assert theorem_bound(0, 0.0, 7, 0.3) == (0.0, 0.0)
    bx, bl = theorem_bound(10, TWO_PI * math.log(100), 100, 0.5)
    assert bx == pytest.approx(1.0)
    # n^(2 alpha - 1) = 1 at alpha = 1/2
    assert bl == pytest.approx(TWO_PI * math.log(100))
    with pytest.raises(ParameterError):
        theorem_bound(1, 1.0, 0, 0.5)


def test_young_empirical_ratio_envelope():
    p = family(FamilySpec("young", 50))
    s = angular_sample(find_roots(p))
    X = count_real_roots(TrigView(p)).X
    li = log_abs_integral(p).value
    rep = clustering_count(s, 0.5, 5, X=X, log_integral=li)
    assert rep.bound_x_term == 0.0
    assert rep.bound_log_term == pytest.approx(li)
    assert rep.empirical_ratio is not None and rep.empirical_ratio <= 10


# ------------------------------------------------------------------ census

def test_census_all_outside():
    z = 2 * np.exp(1j * np.linspace(0, TWO_PI, 16, endpoint=False))
    c = region_census(z, (0.0, TWO_PI), 0.5)
    assert (c.A1, c.A2, c.A3, c.B1, c.B2) == (16, 0, 0, 0, 0)
    assert c.case_label == "a"


def test_census_unit_circle_roots_fall_in_a3():
    z = find_roots(Polynomial([-1] + [0] * 99 + [1])).roots
    c = region_census(z, (0.0, 0.5), 0.5)
    assert c.A1 == c.A2 == 0 and c.A3 == count_in_arc(np.mod(np.angle(z), TWO_PI), 0.0, 0.5)
    assert c.B1 == 100 - c.A3


def test_census_origin_roots_go_to_b2():
    c = region_census(np.array([0, 0, 2, 0.5]), (0.0, 0.1), 0.5)
    assert (c.A1, c.A3, c.B1, c.B2) == (1, 1, 0, 2)


def test_census_for_a_dense_window():
    rs = find_roots(family(FamilySpec("fejer", 50)))
    s = angular_sample(rs)
    c = region_census(rs, (s.angles[0], s.angles[0] + 0.3), 0.5)
    assert c.total == 50


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.floats(0, TWO_PI), st.floats(0, TWO_PI))
def test_census_partition(seed, a, w):
    r = np.random.default_rng(seed)
    z = r.normal(size=30) + 1j * r.normal(size=30)
    z[:3] = 0
    c = region_census(z, (a, a + w), float(r.uniform(0, 1)))
    assert c.total == 30
    assert c.case_label in {"a", "b", "c", "none"}


# ----------------------------------------------------------------- winding

def test_winding_examples():
    assert winding_integral(np.array([0j]), (0.0, TWO_PI)) == pytest.approx(TWO_PI, abs=1e-10)
    assert winding_integral(np.array([2 + 0j]), (0.0, TWO_PI)) == pytest.approx(0.0, abs=1e-10)


def test_winding_matches_direct_unwrap():
    p = Polynomial([0.25, 0, 1])
    rs = find_roots(p)
    ref = unwrapped_arg_change(lambda z: evaluate(p, z), 0.0, math.pi)
    assert winding_integral(rs, (0.0, math.pi)) == pytest.approx(ref, abs=1e-6)


def test_winding_near_circle_root_uses_unwrap():
    z = np.array([(1 + 3e-7) * np.exp(0.4j), 0.3 - 0.2j])
    p = Polynomial(reconstruct_coeffs(z, 1.0))
    ref = unwrapped_arg_change(lambda w: evaluate(p, w), 0.0, 1.0, points=2_000_001)
    assert winding_integral(z, (0.0, 1.0)) == pytest.approx(ref, abs=1e-6)


def test_root_on_the_arc_is_singular():
    with pytest.raises(SingularInputError):
        winding_integral(find_roots(Polynomial([1, 0, 1])), (0.0, math.pi))


def test_argument_principle():
    r = np.random.default_rng(9)
    for _ in range(10):
        n = int(r.integers(1, 31))
        z = r.uniform(0.2, 2.0, n) * np.exp(1j * r.uniform(0, TWO_PI, n))
        z = z[np.abs(np.abs(z) - 1) > 1e-3]
        assert winding_integral(z, (0.0, TWO_PI)) == pytest.approx(
            TWO_PI * np.sum(np.abs(z) < 1), abs=1e-6)


# -------------------------------------------------------------- regularity

def test_gap_cv_regular_vs_perturbed():
    from etroots.poly import add_rotated_copy
    reg = gap_cv(angular_sample(find_roots(family(FamilySpec("fejer", 20)))))
    pert = gap_cv(angular_sample(find_roots(add_rotated_copy(family(FamilySpec("fejer", 20)), 1.0))))
    assert reg < 0.5 and pert > reg
    assert gap_cv(unity_sample()) < 1e-8
    with pytest.raises(DegenerateInputError):
        gap_cv(AngularSample(np.array([1.0]), 1))
