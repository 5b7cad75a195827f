import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sensilab.analysis import (
    Ball,
    Budget,
    CellSpace,
    Cylinder,
    ball_samples,
    cylinder_samples,
    divergence_profile,
    gillis_select,
    hitting_times,
    ip_overlap_search,
    pigeonhole_recurrence,
    proximality_inf,
    return_times,
    rp_witness_search,
    sensitivity_set,
    verify_rp_witness,
)
from sensilab.analysis.recurrence import covering_count
from sensilab.errors import ResourceLimitError, UsageError
from sensilab.families import WindowSet, fs_closure
from sensilab.systems import MorseSystem, rotation, skew
from sensilab.systems.symbolic import ETA, OMEGA, OMEGA_BAR, shift, symbolic_eval
from sensilab.systems.torus import CircleCoord, TorusPoint, torus_metric

GOLD = CircleCoord.golden(64)
SQ2 = CircleCoord.sqrt2_minus_1(64)


def frac_point(system, p, n):
    """Exact rational image used as an oracle: iterate by stepping in Fractions."""
    theta = [Fraction(v, 1 << p.bits) for v in p.values]
    a = system.alpha.fraction()
    for _ in range(n):
        theta = [(theta[0] + a) % 1] + [(theta[j] + theta[j - 1]) % 1 for j in range(1, len(theta))]
    return theta


def frac_dist(u, v):
    return max(min((a - b) % 1, (b - a) % 1) for a, b in zip(u, v))


# -------------------------------------------------------------- samples


@given(
    st.integers(1, 3),
    st.integers(1, 6),
    st.integers(1, 2**20).map(lambda k: Fraction(k, 2**21)),
    st.integers(0, 2**64 - 1),
)
def test_ball_samples_inside(d, g, r, c):
    U = Ball(TorusPoint((c,) * d, 64), r)
    pts = ball_samples(U, g)
    assert pts[0] == U.center
    assert len(pts) == len({p.values for p in pts})
    for p in pts:
        assert torus_metric(p, U.center) < r
        assert U.contains(p)


def test_cylinder_samples_inside():
    U = Cylinder.around(shift(OMEGA, 5), 6)
    pts = cylinder_samples(U, 8)
    assert len(pts) == 8
    for p in pts:
        assert all(symbolic_eval(p, i) == s for i, s in U.pattern)


# --------------------------------------------------------- return times


def test_rotation_half_return_times():
    s = rotation(CircleCoord.from_fraction(Fraction(1, 2), 64))
    x = s.point("0")
    U = Ball(x, Fraction(1, 8))
    assert str(return_times(s, x, U, 11)) == "0,2,4,6,8,10@11"
    V = Ball(s.point("0.5"), Fraction(1, 8))
    assert str(hitting_times(s, U, V, 11, 2)) == "1,3,5,7,9@11"


@given(st.integers(0, 2**64 - 1), st.integers(1, 2**10).map(lambda k: Fraction(k, 2**12)))
def test_return_times_oracle(x0, r):
    s = skew(2, GOLD)
    x = TorusPoint((x0, x0 // 3), 64)
    U = Ball(TorusPoint((x0 // 5, x0 // 7), 64), r)
    got = return_times(s, x, U, 40)
    want = [t for t in range(40) if frac_dist(frac_point(s, x, t), [Fraction(v, 2**64) for v in U.center.values]) < r]
    assert list(got) == want


def test_morse_return_times():
    s = MorseSystem(16)
    U = Cylinder.around(OMEGA, 2)
    got = return_times(s, OMEGA, U, 200)
    want = [t for t in range(200) if U.contains(shift(OMEGA, t))]
    assert list(got) == want and 0 in got


# ------------------------------------------------------------- divergence


@given(st.integers(0, 2**64 - 1), st.integers(0, 2**64 - 1), st.integers(1, 2**8).map(lambda k: Fraction(k, 2**9)))
def test_torus_divergence_oracle(a, b, delta):
    s = skew(2, SQ2)
    x, y = TorusPoint((a, b), 64), TorusPoint((b, a), 64)
    prof = divergence_profile(s, x, y, delta, 25, back=0)
    want = [t for t in range(25) if frac_dist(frac_point(s, x, t), frac_point(s, y, t)) > delta]
    assert list(prof.exceed) == want
    assert prof.ambiguity_count == 0
    assert prof.non_exceed_count == 25 - len(want)


def test_torus_divergence_back_window():
    s = rotation(GOLD)
    x, y = s.point("0"), s.point("0.25")
    prof = divergence_profile(s, x, y, Fraction(1, 8), 5, back=3)
    assert prof.start == -3 and prof.count == 8
    assert prof.times() == list(range(-3, 5))


def test_morse_divergence_and_ambiguity():
    s = MorseSystem(8)
    xs, ys = shift(OMEGA_BAR, -4), shift(ETA, -4)
    prof = divergence_profile(s, xs, ys, Fraction(1, 2), 20)
    assert list(prof.exceed) == list(range(4, 20))
    same = divergence_profile(s, OMEGA, OMEGA, Fraction(1, 1024), 5)
    assert same.ambiguity_count == 5 and len(same.exceed) == 0
    # at_most 2^-9 is certainly below 1/4, so not ambiguous
    assert divergence_profile(s, OMEGA, OMEGA, Fraction(1, 4), 5).ambiguity_count == 0


def test_budget_enforced():
    s = rotation(GOLD)
    with pytest.raises(ResourceLimitError):
        divergence_profile(s, s.point("0"), s.point("0"), Fraction(1, 4), 100, budget=Budget(orbit=10))
    with pytest.raises(UsageError):
        divergence_profile(s, s.point("0"), s.point("0"), 0, 10)
    with pytest.raises(UsageError):
        sensitivity_set(s, Cylinder.around(OMEGA, 1), Fraction(1, 4), 10, 2)


# ------------------------------------------------------------ sensitivity


def test_sensitivity_sound_and_sample_complete():
    s = skew(2, SQ2)
    U = Ball(TorusPoint.zero(2, 64), Fraction(1, 16))
    delta = Fraction(1, 4)
    got = sensitivity_set(s, U, delta, 60, 3)
    pts = ball_samples(U, 3)
    for t in range(60):
        imgs = [frac_point(s, p, t) for p in pts]
        diam = max(frac_dist(u, v) for u, v in itertools.combinations(imgs, 2))
        assert (t in got) == (diam > delta)


@given(st.integers(0, 2**64 - 1), st.integers(1, 2**6).map(lambda k: Fraction(k, 2**8)))
def test_rotation_not_sensitive(c, r):
    s = rotation(SQ2)
    U = Ball(TorusPoint((c,), 64), r)
    assert len(sensitivity_set(s, U, 2 * r, 500, 9)) == 0


def test_morse_sensitivity_detects_divergence():
    s = MorseSystem(32)
    U = Cylinder.around(shift(OMEGA_BAR, -20), 19)
    got = sensitivity_set(s, U, Fraction(1, 2), 100, 6)
    assert len(got) > 0


# ------------------------------------------------------------ proximality


def test_proximality():
    s = rotation(GOLD)
    p = proximality_inf(s, s.point("0"), s.point("0.25"), 10)
    assert p.value == Fraction(1, 4)
    m = MorseSystem(64)
    back = proximality_inf(m, shift(OMEGA_BAR, 0), ETA, 30, direction=-1)
    assert back.value.value == Fraction(1, 2**30) and back.argmin == 30


# ------------------------------------------------------------- pigeonhole


@given(
    st.integers(0, 2**64 - 1),
    st.sampled_from([Fraction(1, 4), Fraction(1, 10), Fraction(1, 32), Fraction(3, 100)]),
    st.data(),
)
def test_pigeonhole_property(x0, eps, data):
    k = covering_count(eps)
    S = data.draw(st.lists(st.integers(-(10**6), 10**6), min_size=k + 1, max_size=k + 3, unique=True))
    start = CircleCoord(x0, 64)
    res = pigeonhole_recurrence(SQ2, start, eps, S)
    u, v = res.pair
    assert u > v and u in S and v in S
    moved = (start.fraction() + (u - v) * SQ2.fraction()) % 1
    gap = abs(moved - start.fraction())
    assert min(gap, 1 - gap) < eps


def test_pigeonhole_errors():
    with pytest.raises(UsageError):
        pigeonhole_recurrence(SQ2, CircleCoord(0, 64), Fraction(1, 4), [1, 1, 2])
    with pytest.raises(UsageError):
        pigeonhole_recurrence(SQ2, CircleCoord(0, 64), 0, [1, 2])


# ----------------------------------------------------------------- gillis


def brute_gillis(sets, m, a, k, eps):
    for combo in itertools.combinations(range(len(sets)), k):
        inter = set.intersection(*(set(sets[j]) for j in combo))
        if Fraction(len(inter), m) >= a**k - eps:
            return combo
    return None


@given(st.integers(0, 2**32 - 1), st.integers(2, 3), st.sampled_from([Fraction(0), Fraction(1, 50)]))
def test_gillis_exhaustive_matches_bruteforce(seed, k, eps):
    rng = np.random.default_rng(seed)
    m, n, a = 20, 7, Fraction(3, 10)
    sets = [tuple(sorted(rng.choice(m, 6, replace=False).tolist())) for _ in range(n)]
    res = gillis_select(CellSpace.uniform(m), sets, a, k, eps)
    assert res.strategy == "exhaustive"
    assert res.indices == brute_gillis(sets, m, a, k, eps)


def test_gillis_beam_verified_and_weights():
    rng = np.random.default_rng(3)
    m = 30
    sets = [tuple(sorted(rng.choice(m, 15, replace=False).tolist())) for _ in range(25)]
    res = gillis_select(CellSpace.uniform(m), sets, Fraction(1, 2), 3, Fraction(1, 100), exhaustive_limit=10)
    assert res.strategy == "beam"
    if res.indices is not None:
        inter = set.intersection(*(set(sets[j]) for j in res.indices))
        assert Fraction(len(inter), m) == res.measure >= Fraction(1, 8) - Fraction(1, 100)
    w = CellSpace((Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)))
    r = gillis_select(w, [(0, 1), (0, 2)], Fraction(1, 2), 2, 0)
    assert r.indices == (0, 1) and r.measure == Fraction(1, 2)
    with pytest.raises(UsageError):
        CellSpace((Fraction(1, 2),))
    with pytest.raises(UsageError):
        gillis_select(w, [(1,), (0, 2)], Fraction(1, 2), 2, 0)


# ------------------------------------------------------------- ip overlap


def test_ip_overlap():
    s = skew(2, SQ2)
    U = Ball(TorusPoint.zero(2, 64), Fraction(1, 8))
    res = ip_overlap_search(s, U, [3, 5, 7], 32)
    assert res.q in fs_closure([3, 5, 7])
    # recount with Fractions on the same cell centers
    centers = [Fraction(2 * i + 1, 64) for i in range(32)]
    hits = 0
    for a, b in itertools.product(centers, repeat=2):
        if frac_dist([a, b], [0, 0]) < Fraction(1, 8):
            p = TorusPoint(tuple(int(c * 2**64) for c in (a, b)), 64)
            if frac_dist(frac_point(s, p, res.q), [0, 0]) < Fraction(1, 8):
                hits += 1
    assert Fraction(hits, 32 * 32) == res.overlap >= res.threshold


# --------------------------------------------------------------------- rp


def test_rp_found_and_verified():
    s = skew(2, SQ2)
    x = TorusPoint((0, 0), 64)
    y = TorusPoint((0, 1 << 58), 64)
    delta = Fraction(1, 16)
    res = rp_witness_search(s, x, y, 2, delta, 6, 1)
    assert res.status == "found"
    w = res.witness
    assert verify_rp_witness(s, x, y, w, delta)
    assert all(v != 0 for v in w.n)
    for eps, t in w.combos:
        assert t == sum(a * b for a, b in zip(w.n, eps))
        assert frac_dist(frac_point_signed(s, w.x, t), frac_point_signed(s, w.y, t)) < delta


def frac_point_signed(s, p, t):
    if t >= 0:
        return frac_point(s, p, t)
    back = s.iterate(p, t)
    return [Fraction(v, 2**64) for v in back.values]


def test_rp_trivial_absent_and_errors():
    s = skew(2, SQ2)
    x = s.point("0.1/0.2")
    assert rp_witness_search(s, x, x, 3, Fraction(1, 8), 2, 1).witness.n == (1, 1, 1)
    far = rp_witness_search(s, s.point("0/0"), s.point("0.5/0"), 2, Fraction(1, 16), 3, 1)
    assert far.status == "absent-budget"
    with pytest.raises(UsageError):
        rp_witness_search(MorseSystem(), OMEGA, ETA, 2, Fraction(1, 4), 2, 1)
    with pytest.raises(UsageError):
        rp_witness_search(s, x, x, 5, Fraction(1, 4), 2, 1)
    with pytest.raises(ResourceLimitError):
        rp_witness_search(s, x, s.point("0.3/0"), 4, Fraction(1, 8), 50, 8, Budget(rp_evaluations=1000))


def test_window_set_from_sensitivity_roundtrip():
    s = rotation(GOLD)
    got = sensitivity_set(s, Ball(s.point("0"), Fraction(1, 4)), Fraction(1, 8), 10, 3)
    assert WindowSet.parse(str(got)) == got
