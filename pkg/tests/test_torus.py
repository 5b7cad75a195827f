import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sensilab.errors import UsageError
from sensilab.systems import MorseSystem, TorusSystem, parse_system, rotation, skew
from sensilab.systems.torus import (
    CircleCoord,
    TorusPoint,
    binomial_row,
    binomial_wrap,
    circle_metric,
    parse_circle_coord,
    parse_torus_point,
    skew_iterate_closed,
    skew_iterate_many,
    skew_orbit,
    skew_orbit_closed,
    skew_step,
    skew_step_inverse,
    skew_steps,
    torus_metric,
)

BITS = st.sampled_from([32, 64, 128])


def py_step(theta, alpha, bits):
    """Reference map in plain integers."""
    m = (1 << bits) - 1
    out = [(theta[0] + alpha) & m]
    out += [(theta[j] + theta[j - 1]) & m for j in range(1, len(theta))]
    return out


def py_closed(theta, alpha, n, bits):
    """Reference closed form with exact binomials (n >= 0)."""
    full = [alpha] + list(theta)
    return [
        sum(math.comb(n, j + 1 - i) * full[i] for i in range(j + 2)) % (1 << bits) for j in range(len(theta))
    ]


@st.composite
def skew_cases(draw, max_d=5):
    bits = draw(BITS)
    d = draw(st.integers(1, max_d))
    theta = tuple(draw(st.integers(0, (1 << bits) - 1)) for _ in range(d))
    alpha = draw(st.integers(0, (1 << bits) - 1))
    return bits, TorusPoint(theta, bits), CircleCoord(alpha, bits)


@given(skew_cases(), st.integers(0, 40))
def test_stepping_matches_reference(case, n):
    bits, theta, alpha = case
    ref = list(theta.values)
    for _ in range(n):
        ref = py_step(ref, alpha.value, bits)
    assert list(skew_steps(theta, alpha, n).values) == ref


@given(skew_cases(), st.integers(0, 10**7))
def test_closed_form_matches_exact_binomials(case, n):
    bits, theta, alpha = case
    assert list(skew_iterate_closed(theta, alpha, n).values) == py_closed(theta.values, alpha.value, n, bits)


@given(skew_cases(), st.integers(-300, 300))
def test_closed_form_signed_and_inverse(case, n):
    bits, theta, alpha = case
    x = theta
    if n >= 0:
        for _ in range(n):
            x = skew_step(x, alpha)
    else:
        for _ in range(-n):
            x = skew_step_inverse(x, alpha)
    assert skew_iterate_closed(theta, alpha, n) == x
    assert skew_step_inverse(skew_step(theta, alpha), alpha) == theta


@given(skew_cases(max_d=4), st.integers(0, 50), st.integers(0, 50))
def test_group_law(case, a, b):
    _, theta, alpha = case
    lhs = skew_iterate_closed(skew_iterate_closed(theta, alpha, a), alpha, b)
    assert lhs == skew_iterate_closed(theta, alpha, a + b)


@pytest.mark.parametrize("bits", [64, 128])
def test_orbit_closed_equals_stepping(bits):
    rng = np.random.default_rng(1)
    for d in (1, 2, 3, 5):
        theta = TorusPoint(tuple(int(v) for v in rng.integers(0, 2**63, d)), bits)
        alpha = CircleCoord.sqrt2_minus_1(bits)
        a = skew_orbit(theta, alpha, 700)
        b = skew_orbit_closed(theta, alpha, 700)
        assert np.array_equal(a, b)
        assert [int(v) for v in a[699]] == py_closed(theta.values, alpha.value, 699, bits)


@given(st.integers(0, 10**9), st.integers(0, 8), BITS)
def test_binomial_wrap(n, k, bits):
    assert binomial_wrap(n, k, bits) == math.comb(n, k) % (1 << bits)


@given(st.integers(-1000, 1000), BITS)
def test_binomial_row_pascal_identity(n, bits):
    m = 1 << bits
    row, nxt = binomial_row(n, 6, bits), binomial_row(n + 1, 6, bits)
    assert row[0] == 1
    for k in range(1, 7):
        assert nxt[k] == (row[k] + row[k - 1]) % m


def test_skew_iterate_many_rows():
    rng = np.random.default_rng(2)
    alpha = CircleCoord.golden(64)
    words = rng.integers(0, 2**63, size=(5, 3), dtype=np.uint64)
    out = skew_iterate_many(words, alpha, 12345, 64)
    for row, got in zip(words, out):
        want = skew_iterate_closed(TorusPoint(tuple(int(v) for v in row), 64), alpha, 12345)
        assert tuple(int(v) for v in got) == want.values


def test_circle_metric_and_parsing():
    half = CircleCoord.from_fraction(Fraction(1, 2), 64)
    q = CircleCoord.from_fraction(Fraction(3, 4), 64)
    assert circle_metric(half, q) == Fraction(1, 4)
    assert circle_metric(CircleCoord(0, 64), q) == Fraction(1, 4)
    p = parse_torus_point("0.25/0x8000000000000000", 64)
    assert p.fractions() == (Fraction(1, 4), Fraction(1, 2))
    assert torus_metric(p, TorusPoint.zero(2, 64)) == Fraction(1, 2)
    assert parse_circle_coord("sqrt2-1", 64) == CircleCoord.sqrt2_minus_1(64)
    with pytest.raises(UsageError) as e:
        parse_torus_point("0.25/zz", 64)
    assert e.value.position == 5


def test_sqrt2_truncation():
    a = CircleCoord.sqrt2_minus_1(64).value
    # floor((sqrt2 - 1) 2^64) is the unique a with a^2 <= ... checked via exact squares
    x = a + (1 << 64)
    assert x * x <= 2 << 128 < (x + 1) * (x + 1)


def test_system_literals():
    s = parse_system("skew:3:sqrt2-1", 64)
    assert isinstance(s, TorusSystem) and s.d == 3
    assert parse_system("rotation:0.5", 32) == rotation(CircleCoord(1 << 31, 32))
    assert isinstance(parse_system("morse"), MorseSystem)
    for bad in ("skew:x:0.5", "skew:0:0.5", "spin:1", "rotation"):
        with pytest.raises(UsageError):
            parse_system(bad)


def test_rotation_iterate_any_n():
    s = rotation(CircleCoord.from_fraction(Fraction(1, 8), 64))
    x = s.point("0")
    assert s.iterate(x, 3).fractions() == (Fraction(3, 8),)
    assert s.iterate(x, -1).fractions() == (Fraction(7, 8),)
    sk = skew(2, CircleCoord.golden(64))
    assert sk.iterate(sk.iterate(x := sk.point("0/0"), 10**12), -(10**12)) == x
