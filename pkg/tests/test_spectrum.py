import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import beta, brute_force_argmax
from sh3.errors import AmbiguousPartition, InvalidParameters
from sh3.spectrum import (
    I3_LENGTH,
    PartitionClass,
    SystemParams,
    analyze,
    critical_lambda,
    growth_rate,
    growth_rates,
    i4_length,
    max_real_indices,
)

TWO_PI = 2 * math.pi


def test_mean_mode_rate_is_minus_one():
    assert growth_rate(0, SystemParams(3.7)) == complex(-1, 0)


def test_unit_mode_on_two_pi():
    assert growth_rate(1, SystemParams(TWO_PI, sigma=2.6)) == pytest.approx(complex(0, -2.6), abs=1e-15)


def test_second_mode_on_two_pi():
    assert growth_rate(2, SystemParams(TWO_PI, sigma=2.6)) == pytest.approx(complex(-9, -20.8), abs=1e-12)


def test_vectorised_matches_scalar():
    p = SystemParams(11.3, 1.7, 0.4, 0.2)
    n = list(range(-8, 9))
    vec = growth_rates(n, p.ell, p.sigma, p.lam)
    assert all(v == growth_rate(i, p) for i, v in zip(n, vec))


@pytest.mark.parametrize("bad", [dict(ell=0.0), dict(ell=-1.0), dict(ell=math.inf),
                                 dict(ell=1.0, sigma=math.nan), dict(ell=1.0, lam=-math.inf)])
def test_params_validation(bad):
    with pytest.raises(InvalidParameters):
        SystemParams(**bad)


def test_short_domain_has_only_mean_mode():
    assert max_real_indices(1.0) == {0}


def test_triple_point():
    assert max_real_indices(I3_LENGTH) == {-1, 0, 1}


def test_first_double_pair_length():
    ell = TWO_PI * math.sqrt(2.5)
    assert max_real_indices(ell) == {-2, -1, 1, 2}
    assert brute_force_argmax(ell, 10) == [-2, -1, 1, 2]


def test_analyze_two_pi():
    a = analyze(TWO_PI)
    assert (a.partition_class, a.k, a.multiplicity) == (PartitionClass.I2, 1, 2)
    assert a.lambda0 == pytest.approx(0.0, abs=1e-15)


def test_analyze_triple_point():
    a = analyze(I3_LENGTH)
    assert (a.partition_class, a.multiplicity, a.lambda0) == (PartitionClass.I3, 3, 1.0)


def test_analyze_twelve():
    a = analyze(12.0)
    rho2 = (TWO_PI / 12) ** 2
    assert brute_force_argmax(12.0) == [-2, 2]
    assert (a.partition_class, a.k) == (PartitionClass.I2, 2)
    assert a.lambda0 == pytest.approx((1 - 4 * rho2) ** 2, rel=1e-14)
    assert a.lambda0 == pytest.approx(0.00933, abs=1e-5)


@pytest.mark.parametrize("k,expected", [(1, 9.93459), (2, 16.0190), (6, 40.9614)])
def test_i4_lengths(k, expected):
    ell = i4_length(k)
    assert ell == pytest.approx(expected, abs=5e-5)
    assert ell == pytest.approx(TWO_PI * math.sqrt((k * k + (k + 1) ** 2) / 2), rel=1e-15)
    a = analyze(ell)
    assert (a.partition_class, a.k, a.multiplicity) == (PartitionClass.I4, k, 4)
    rho2 = (TWO_PI / ell) ** 2
    assert abs(rho2 - 2 / (k * k + (k + 1) ** 2)) <= 1e-12


def test_i4_length_rejects_zero():
    with pytest.raises(InvalidParameters):
        i4_length(0)


def test_loose_tolerance_is_ambiguous():
    # with a huge tolerance everything near the top ties
    with pytest.raises(AmbiguousPartition):
        analyze(TWO_PI, tie_tol=10.0)


def test_max_real_indices_rejects_bad_tolerance():
    with pytest.raises(InvalidParameters):
        max_real_indices(1.0, tie_tol=0.0)


@given(st.integers(-50, 50), st.floats(0.1, 200), st.floats(-20, 20), st.floats(-5, 5))
def test_conjugate_symmetry(n, ell, sigma, lam):
    p = SystemParams(ell, sigma, 0.0, lam)
    assert growth_rate(-n, p) == growth_rate(n, p).conjugate()


@given(st.integers(0, 30), st.floats(0.5, 100), st.floats(-3, 3), st.floats(-3, 3))
def test_real_part_shifts_with_lambda(n, ell, lam1, lam2):
    p1, p2 = SystemParams(ell, 1.0, 0, lam1), SystemParams(ell, 1.0, 0, lam2)
    r1, r2 = growth_rate(n, p1).real, growth_rate(n, p2).real
    assert r2 - r1 == pytest.approx(lam2 - lam1, abs=1e-12 * max(1.0, abs(r1)))


@given(st.floats(0.05, 500))
@settings(max_examples=200)
def test_argmax_matches_exhaustive_scan(ell):
    assert sorted(max_real_indices(ell)) == brute_force_argmax(ell, 1000)


@given(st.integers(1, 30), st.floats(0.02, 0.98))
def test_between_i4_points_is_single_pair(k, frac):
    lo, hi = i4_length(k), i4_length(k + 1)
    a = analyze(lo + frac * (hi - lo))
    assert (a.partition_class, a.k) == (PartitionClass.I2, k + 1)


@given(st.floats(I3_LENGTH * 1.0001, i4_length(1) * 0.9999))
def test_before_first_i4_point_is_unit_pair(ell):
    a = analyze(ell)
    assert (a.partition_class, a.k) == (PartitionClass.I2, 1)
    assert a.lambda0 == pytest.approx(critical_lambda(1, ell), rel=1e-15)


def test_oracle_dispersion_agrees():
    p = SystemParams(7.3, 1.3, 0.0, 0.4)
    for n in range(-6, 7):
        assert growth_rate(n, p) == pytest.approx(beta(n, p.ell, p.sigma, p.lam), abs=1e-12)
