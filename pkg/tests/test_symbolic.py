from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sensilab.errors import ResourceLimitError, UnsupportedPointError, UsageError
from sensilab.systems.symbolic import (
    ETA,
    ETA_BAR,
    OMEGA,
    OMEGA_BAR,
    Flip,
    MetricValue,
    Periodic,
    disagreement_radius,
    flip,
    morse_symbol,
    morse_symbol_recursive,
    morse_window,
    odometer_coordinate,
    orbit_disagreements,
    parse_symbolic,
    shift,
    symbolic_eval,
    symbolic_metric,
    symbolic_window,
)

BASES = st.sampled_from([OMEGA, OMEGA_BAR, ETA, ETA_BAR, Periodic("0110"), Periodic("1")])


@st.composite
def points(draw):
    p = draw(BASES)
    for _ in range(draw(st.integers(0, 3))):
        if draw(st.booleans()):
            p = flip(p)
        else:
            p = shift(p, draw(st.integers(-500, 500)))
    return p


def direct_metric(p, q, radius):
    """Reference: scan coordinates outward one by one."""
    for m in range(radius + 1):
        if symbolic_eval(p, m) != symbolic_eval(q, m) or symbolic_eval(p, -m) != symbolic_eval(q, -m):
            return MetricValue.exact(Fraction(1, 2**m))
    return MetricValue.at_most(Fraction(1, 2 ** (radius + 1)))


def test_prefix():
    assert "".join(str(morse_symbol(n)) for n in range(16)) == "0110100110010110"


def test_recurrences_vectorized():
    n = np.arange(1 << 20, dtype=np.int64)
    w = morse_window(n)
    assert np.array_equal(morse_window(2 * n), w)
    assert np.array_equal(morse_window(2 * n + 1), 1 - w)


@given(st.integers(-(2**40), 2**40))
def test_symbol_against_recursion(n):
    assert morse_symbol(n) == morse_symbol_recursive(n)
    assert morse_symbol(-n - 1) == morse_symbol(n)


@given(points(), st.integers(-2000, 2000), st.integers(0, 300))
def test_window_matches_pointwise(p, start, length):
    win = symbolic_window(p, start, length)
    assert [int(v) for v in win] == [symbolic_eval(p, i) for i in range(start, start + length)]


@given(points(), st.integers(-1000, 1000), st.integers(-1000, 1000))
def test_shift_composition(p, a, b):
    assert symbolic_eval(shift(shift(p, a), b), 0) == symbolic_eval(shift(p, a + b), 0)
    assert symbolic_eval(flip(flip(p)), a) == symbolic_eval(p, a)


@given(points(), points(), st.integers(0, 40))
def test_metric_matches_direct_scan(p, q, radius):
    assert symbolic_metric(p, q, radius) == direct_metric(p, q, radius)
    assert symbolic_metric(p, q, radius) == symbolic_metric(q, p, radius)


@given(points(), points(), st.integers(-300, 300), st.integers(1, 60), st.integers(0, 20))
def test_orbit_disagreements_pointwise(p, q, start, count, radius):
    got = orbit_disagreements(p, q, start, count, radius)
    for j, m in enumerate(got):
        assert m == disagreement_radius(shift(p, start + j), shift(q, start + j), radius)


def test_example_pair():
    x, y = shift(OMEGA_BAR, -3), shift(ETA, -3)
    assert str(symbolic_metric(x, y, 10)) == "exact:1/2^3"
    # eta and flip(omega) agree on negative coordinates, differ at 0
    assert symbolic_metric(OMEGA_BAR, ETA, 10) == MetricValue.exact(1)
    assert symbolic_metric(OMEGA, OMEGA, 5) == MetricValue.at_most(Fraction(1, 64))


def test_metric_value_decisions():
    assert MetricValue.exact(Fraction(1, 2)).exceeds(Fraction(1, 4))
    assert not MetricValue.at_most(Fraction(1, 2)).exceeds(Fraction(1, 4))
    assert MetricValue.at_most(Fraction(1, 8)).certainly_not_exceeds(Fraction(1, 4))
    assert not MetricValue.at_most(Fraction(1, 2)).certainly_not_exceeds(Fraction(1, 4))


def test_parser():
    assert parse_symbolic("shift(-64, flip(omega))") == shift(OMEGA_BAR, -64)
    assert parse_symbolic(" periodic(01) ") == Periodic("01")
    for p in [OMEGA, ETA_BAR, shift(ETA, 7), Periodic("10"), Flip(shift(OMEGA, -2))]:
        assert parse_symbolic(str(p)) == p
    cases = {"omeg": 0, "flip(omega": 10, "shift(x, omega)": 6, "periodic(012)": 9, "eta)": 3}
    for text, pos in cases.items():
        with pytest.raises(UsageError) as e:
            parse_symbolic(text)
        assert e.value.position == pos, text


def test_depth_limit():
    p = OMEGA
    for _ in range(70):
        p = Flip(p)
    with pytest.raises(ResourceLimitError):
        symbolic_eval(p, 0)
    with pytest.raises(UsageError):
        parse_symbolic("flip(" * 70 + "omega" + ")" * 70)


# ------------------------------------------------------------ odometer


def block_phase(p, level, blocks=64):
    """Independent oracle: the alignment of level-``level`` Morse blocks.

    Returns ``k mod 2^level`` where the point looks like ``sigma^k`` of a
    sequence built from aligned copies of the block ``B`` and its complement.
    """
    size = 1 << level
    block = morse_window(np.arange(size))
    win = symbolic_window(p, -blocks * size, 2 * blocks * size + size)
    phases = []
    for s in range(size):
        chunks = win[s: s + 2 * blocks * size].reshape(-1, size)
        ok = all(np.array_equal(c, block) or np.array_equal(c, 1 - block) for c in chunks)
        if ok:
            phases.append(s)
    assert len(phases) == 1
    # chunk boundaries sit at window index s, i.e. at coordinate s - blocks*size;
    # for sigma^k of a base point boundaries sit at -k mod 2^level
    return (-(phases[0] - blocks * size)) % size


@given(st.sampled_from([OMEGA, OMEGA_BAR, ETA, ETA_BAR]), st.integers(-5000, 5000))
def test_odometer_against_block_phase(base, k):
    p = shift(base, k)
    coords = odometer_coordinate(p, 6)
    for m in range(1, 7):
        assert coords[m - 1] == block_phase(p, m)


@given(st.sampled_from([OMEGA, ETA]), st.integers(-1000, 1000))
def test_odometer_equivariance(base, k):
    a = odometer_coordinate(shift(base, k), 8)
    b = odometer_coordinate(shift(base, k + 1), 8)
    assert all(bb == (aa + 1) % (1 << m) for m, (aa, bb) in enumerate(zip(a, b), start=1))


def test_odometer_unsupported():
    with pytest.raises(UnsupportedPointError):
        odometer_coordinate(Periodic("01"), 3)
