import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from checkerboard.exceptions import (
    CombinatorialBlowupError,
    EqualWeightsError,
    ExactModeTooLargeError,
    InvalidSpecError,
    ZeroPolynomialError,
    ZeroTargetError,
)
from checkerboard.oracles import (
    PartitionSumQuery,
    binomial_alternating_sum,
    blip_m2_variance_limit,
    centered_blip_moment_limit,
    composition_count,
    expected_blip_moment_limit,
    gaussian_moment,
    hollow_goe_exact_trace,
    hollow_goe_joint_trace_moment,
    hollow_goe_trace_m2_variance,
    hollow_goe_trace_moment,
    hollow_goe_trace_samples,
    interpolation_check,
    isserlis_pairings,
    partition_sum_closed_s2,
    partition_sum_direct,
    root_order,
    vanishing_sum,
    weight_polynomial_exact,
)
from checkerboard.polynomials import MultiPoly, RationalPoly

F = Fraction

# E[Tr B^m] for m = 0..8, from the walk enumeration; m = 4 also matches
# 3 k(k-1) + 2 k(k-1)(k-2) counted by hand
HOLLOW_TRACES = {
    2: [2, 0, 2, 0, 6, 0, 30, 0, 210],
    3: [3, 0, 6, 0, 30, 0, 222, 0, 2178],
    4: [4, 0, 12, 0, 84, 0, 828, 0, 10356],
}


# ---- partition sums


def test_partition_sum_examples():
    assert partition_sum_direct(PartitionSumQuery(3, (1, 1), (2, 3))) == 30
    w = (F(2), F(-3), F(5, 7))
    assert partition_sum_direct(PartitionSumQuery(3, (1, 1, 1), w)) == w[0] * w[1] * w[2]
    assert partition_sum_direct(PartitionSumQuery(2, (1, 1), (4, F(1, 3)))) == F(4, 3)


def test_closed_s2_examples():
    assert partition_sum_closed_s2(3, 2, 3) == 30
    assert partition_sum_closed_s2(2, 5, F(-2, 3)) == 5 * F(-2, 3)
    assert partition_sum_closed_s2(4, 1, -1) == -1
    assert partition_sum_direct(PartitionSumQuery(4, (1, 1), (1, -1))) == -1


def test_partition_sum_errors():
    with pytest.raises(EqualWeightsError):
        PartitionSumQuery(4, (1, 1), (2, 2))
    with pytest.raises(EqualWeightsError):
        partition_sum_closed_s2(3, F(1, 2), 0.5)
    with pytest.raises(InvalidSpecError):
        PartitionSumQuery(1, (1, 1), (1, 2))
    with pytest.raises(InvalidSpecError):
        PartitionSumQuery(3, (0, 1), (1, 2))
    with pytest.raises(InvalidSpecError):
        PartitionSumQuery(3, (1,), (1,))
    q = PartitionSumQuery(40, (1, 1, 1, 1), (1, 2, 3, 4))
    assert composition_count(40, (1, 1, 1, 1)) == math.comb(39, 3)
    with pytest.raises(CombinatorialBlowupError):
        partition_sum_direct(q, cap=1000)


distinct_pairs = st.tuples(
    st.fractions(-4, 4, max_denominator=5), st.fractions(-4, 4, max_denominator=5)
).filter(lambda p: p[0] != p[1])


@given(w=distinct_pairs, eta=st.integers(2, 20))
def test_direct_equals_closed_form_for_two_parts(w, eta):
    assert partition_sum_direct(PartitionSumQuery(eta, (1, 1), w)) == partition_sum_closed_s2(eta, *w)


@st.composite
def interpolation_cases(draw):
    s = draw(st.sampled_from([2, 3]))
    weights = draw(st.lists(st.integers(-4, 4).filter(bool), min_size=s, max_size=s, unique=True))
    y = tuple(draw(st.lists(st.integers(1, 2), min_size=s, max_size=s)))
    deg = draw(st.integers(0, 2))
    terms = {}
    for _ in range(draw(st.integers(1, 3))):
        e = draw(st.lists(st.integers(0, deg), min_size=s, max_size=s).filter(lambda e: sum(e) <= deg))
        terms[tuple(e)] = draw(st.integers(-3, 3))
    poly = MultiPoly(s, terms)
    if poly.degree < 0:
        poly = MultiPoly.one(s)
    return y, weights, poly


@given(interpolation_cases())
def test_partition_sum_has_exponential_polynomial_form(case):
    y, weights, poly = case
    assert interpolation_check(y, weights, poly)


def test_interpolation_detects_a_too_small_degree():
    # p = x_1^2 needs degree-2 polynomials in eta; a degree-0 ansatz fails
    poly = MultiPoly(2, {(2, 0): 1})
    assert interpolation_check((1, 1), (2, 3), poly)
    assert not interpolation_check((1, 1), (2, 3), poly, degree=0)


# ---- root lemmas


def test_vanishing_sum_examples():
    x = RationalPoly.x()
    assert vanishing_sum((x - 2) ** 3, 2, x**2) == 0
    assert vanishing_sum(x - 2, 2, x) == 2
    for m in range(1, 7):
        for d in range(m):
            p = RationalPoly([F(j + 1, 3) for j in range(d + 1)])
            assert vanishing_sum((x - 1) ** m, 1, p) == 0


def test_root_order_examples():
    x = RationalPoly.x()
    assert root_order((x - 2) ** 3, 2) == 3
    assert root_order(x**2 + 1, 1) == 0
    base = weight_polynomial_exact((1, 1, 2), 2, 1, base_only=True)
    assert base == x * (2 - x) * (2 * x - 1) * (3 - 2 * x)
    f = base**2
    assert root_order(f, 0) == 2 and root_order(f, F(1, 2)) == 2
    assert root_order(f, 2) == 2 and root_order(f, F(3, 2)) == 2
    with pytest.raises(ZeroPolynomialError):
        root_order(RationalPoly(), 1)


@given(
    x0=st.fractions(-3, 3, max_denominator=4),
    order=st.integers(1, 5),
    rest=st.lists(st.fractions(-3, 3, max_denominator=4), max_size=3),
    data=st.data(),
)
def test_planted_root_order_and_vanishing_sums(x0, order, rest, data):
    rest = [r for r in rest if r != x0]
    f = RationalPoly.from_roots([x0] * order + rest, lead=data.draw(st.integers(1, 4)))
    assert root_order(f, x0) == order
    x = RationalPoly.x()
    for d in range(order):
        assert vanishing_sum(f, x0, x**d) == 0
    if x0 != 0:
        assert vanishing_sum(f, x0, x**order) != 0
        # each application of x d/dx lowers the order at x0 by one
        g = f
        for d in range(order):
            assert root_order(g, x0) == order - d
            g = g.theta()


def test_binomial_alternating_sum():
    assert binomial_alternating_sum(3, 2) == 0
    assert binomial_alternating_sum(3, 3) == 6
    assert binomial_alternating_sum(0, 0) == 1
    for m in range(8):
        for j in range(m):
            assert binomial_alternating_sum(m, j) == 0
        assert binomial_alternating_sum(m, m) == math.factorial(m)


# ---- hollow GOE


def test_isserlis_counts():
    assert isserlis_pairings([]) == 1
    assert isserlis_pairings("aab") == 0
    assert isserlis_pairings("aaaa") == 3
    assert gaussian_moment((6,)) == 15
    assert gaussian_moment((2, 4)) == 3


@pytest.mark.parametrize("k1", [2, 3, 4])
def test_exact_traces_frozen(k1):
    assert [hollow_goe_exact_trace(k1, m) for m in range(9)] == HOLLOW_TRACES[k1]


@pytest.mark.parametrize("k1", range(1, 7))
def test_trace_low_order_identities(k1):
    assert hollow_goe_trace_moment(k1, 0) == k1
    assert hollow_goe_trace_moment(k1, 1) == 0
    assert hollow_goe_trace_moment(k1, 2) == k1 * (k1 - 1)


def test_odd_traces_vanish_for_two_by_two():
    assert all(hollow_goe_exact_trace(2, m) == 0 for m in range(1, 9, 2))


def test_exact_mode_limits():
    with pytest.raises(ExactModeTooLargeError):
        hollow_goe_trace_moment(3, 9)
    with pytest.raises(ExactModeTooLargeError):
        hollow_goe_trace_moment(7, 2)
    with pytest.raises(ValueError):
        hollow_goe_trace_moment(3, 2, mode="symbolic")


@pytest.mark.parametrize("k1", [1, 2, 3, 4])
def test_monte_carlo_agrees_with_exact(k1):
    for m in range(7):
        mean, se = hollow_goe_trace_moment(k1, m, mode="monte_carlo", trials=100_000, seed=11, return_stderr=True)
        exact = hollow_goe_exact_trace(k1, m)
        assert abs(mean - exact) <= 3 * se + 1e-9 * max(1, exact)


def test_monte_carlo_is_seed_deterministic():
    a = hollow_goe_trace_moment(3, 4, mode="monte_carlo", trials=500, seed=3)
    b = hollow_goe_trace_moment(3, 4, mode="monte_carlo", trials=500, seed=3)
    c = hollow_goe_trace_moment(3, 4, mode="monte_carlo", trials=500, seed=4)
    assert a == b != c


def test_per_trial_samples():
    x = hollow_goe_trace_samples(3, 2, 2000, seed=1)
    assert x.shape == (2000,)
    assert abs(x.mean() - 6) < 4 * x.std() / math.sqrt(len(x))


def test_joint_moments_and_m2_variance():
    assert hollow_goe_joint_trace_moment(4, 2, 2) == 192
    assert hollow_goe_joint_trace_moment(3, 4, 4) == 3780
    assert hollow_goe_joint_trace_moment(3, 0, 2) == 3 * 6
    for k1 in range(1, 6):
        assert hollow_goe_trace_m2_variance(k1) == F(4 * (k1 - 1), k1)
    x = hollow_goe_trace_samples(3, 2, 20_000, seed=2) / 3
    assert abs(x.var() - 8 / 3) < 0.1


# ---- blip limits


def test_expected_blip_moment_limit_examples():
    assert expected_blip_moment_limit(6, 3, 3, 0) == 1
    assert expected_blip_moment_limit(6, 3, 3, 1) == F(5, 3)
    assert expected_blip_moment_limit(7, F(-1, 2), 4, 1) == -12
    assert expected_blip_moment_limit(6, 3, 3, 2) == F(43, 9)
    with pytest.raises(ZeroTargetError):
        expected_blip_moment_limit(6, 0, 3, 2)


def test_centered_limit_examples():
    assert centered_blip_moment_limit(3, 1) == 0
    assert centered_blip_moment_limit(3, 2) == 2
    assert all(centered_blip_moment_limit(1, m) == 0 for m in range(1, 8))
    assert centered_blip_moment_limit(3, 4) == 10


@given(k=st.integers(2, 8), w=st.fractions(-5, 5, max_denominator=4).filter(bool), k1=st.integers(1, 4), m=st.integers(0, 6))
def test_raw_limit_is_binomial_shift_of_centered(k, w, k1, m):
    # the raw limit is the centered limit shifted by (k - 1) / w
    shift = F(k - 1) / w
    direct = sum(math.comb(m, j) * shift ** (m - j) * centered_blip_moment_limit(k1, j) for j in range(m + 1))
    assert expected_blip_moment_limit(k, w, k1, m) == direct


def test_variance_limit():
    assert blip_m2_variance_limit(1) == 0
    assert blip_m2_variance_limit(2) == 1
    assert blip_m2_variance_limit(3) == F(4, 3)
    with pytest.raises(ValueError):
        blip_m2_variance_limit(0)


def test_weight_polynomial_normalized_and_even():
    f = weight_polynomial_exact((0, 0, 0, 3, 3, 3), 3, 2)
    assert f(F(1)) == 1
    assert f.degree == 4 * 2 * 2
    g = weight_polynomial_exact((1, -2, 3), 2, 1)
    for t in (F(1, 7), F(-2, 3), F(5, 2)):
        assert g(t) == g(2 - t)
    with pytest.raises(ZeroTargetError):
        weight_polynomial_exact((0, 1), 0, 1)
