from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from prngsuite import core, lcg
from prngsuite.lcg import LcgParams, MrgComponent, MrgParams


def orbit_length(p: LcgParams, start: int = 0) -> int:
    """Steps until ``start`` recurs (0 if it never does within m steps)."""
    x = start
    for k in range(1, p.m + 1):
        x = (p.a * x + p.c) % p.m
        if x == start:
            return k
    return 0


@pytest.mark.parametrize("a, c, m, full, period", [
    (5, 1, 16, True, 16),
    (2, 1, 8, False, None),
    (4, 1, 9, True, 9),
])
def test_hull_dobell_examples(a, c, m, full, period):
    p = LcgParams(a, c, m)
    assert lcg.hull_dobell_check(p) is full
    if period:
        assert orbit_length(p) == period


@pytest.mark.parametrize("m", range(1, 33))
def test_hull_dobell_against_exhaustive_period(m):
    for a in range(m):
        for c in range(m):
            p = LcgParams(a, c, m)
            assert lcg.hull_dobell_check(p) == (orbit_length(p) == m), (a, c, m)


@pytest.mark.parametrize("p", [lcg.MMIX, lcg.RAND, lcg.LRAND48, lcg.BORLAND])
def test_catalog_lcgs_have_full_period(p):
    assert lcg.hull_dobell_check(p)


def test_minstd_is_not_full_period_in_the_hull_dobell_sense():
    assert not lcg.hull_dobell_check(lcg.MINSTD)


@pytest.mark.parametrize("p, state, nxt", [
    (lcg.BORLAND, 0, 1),
    (lcg.RAND, 1, 1103527590),
    (lcg.LRAND48, 0, 11),
])
def test_single_steps(p, state, nxt):
    assert lcg.lcg_next(state, p) == (nxt, nxt)


def test_jump_ahead_trivial_cases():
    assert lcg.jump_ahead(99, lcg.MMIX, 0) == 99
    assert lcg.jump_ahead(99, lcg.MMIX, 1) == lcg.lcg_next(99, lcg.MMIX)[0]
    with pytest.raises(ValueError):
        lcg.affine_power(lcg.MMIX, -1)


def test_jump_1000_on_mmix_seed_7():
    x = 7
    for _ in range(1000):
        x = (lcg.MMIX.a * x + lcg.MMIX.c) % lcg.MMIX.m
    assert lcg.jump_ahead(7, lcg.MMIX, 1000) == x
    g = core.create("mmix", 7)
    g.jump(1000)
    assert g.state == (x,)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**48 - 1), st.integers(0, 3000), st.integers(0, 3000))
def test_jumps_compose(state, u, v):
    p = lcg.LRAND48
    assert lcg.jump_ahead(lcg.jump_ahead(state, p, u), p, v) == lcg.jump_ahead(state, p, u + v)


@pytest.mark.parametrize("p", [lcg.MMIX, lcg.RAND, lcg.MINSTD, lcg.LRAND48])
def test_lane_states_equal_sequential(p):
    xs = lcg.lcg_states(12345, p, 5000, lanes=64)
    x, want = 12345, []
    for _ in range(5000):
        x = (p.a * x + p.c) % p.m
        want.append(x)
    assert [int(v) for v in xs] == want


def test_lane_states_reject_wide_prime_modulus():
    with pytest.raises(ValueError):
        lcg.lcg_states(1, LcgParams(3, 0, 2**61 - 1), 10)


@pytest.mark.parametrize("a, c, m", [(5, 0, 0), (16, 1, 16), (1, -1, 8)])
def test_params_validation(a, c, m):
    with pytest.raises(ValueError):
        LcgParams(a, c, m)


def test_lrand48_outputs_high_31_bits():
    g = core.create("lrand48", 0)
    x = (0 << 16) | 0x330E
    for _ in range(20):
        x = (lcg.LRAND48.a * x + lcg.LRAND48.c) % 2**48
        assert g.next_word() == x >> 17


# -- MRG ---------------------------------------------------------------------

def test_mrg_zero_component_stays_zero():
    state = ((0, 0, 0), (5, 6, 7))
    for _ in range(50):
        state, _ = lcg.mrg31k3p_next(state)
        assert state[0] == (0, 0, 0)


def test_mrg31k3p_first_outputs_by_direct_recurrence():
    m1, m2 = 2**31 - 1, 2**31 - 21069
    x1, x2 = [1, 1, 1], [1, 1, 1]  # oldest first
    want = []
    for _ in range(5):
        n1 = (2**22 * x1[-2] + (2**7 + 1) * x1[-3]) % m1
        n2 = (2**15 * x2[-1] + (2**15 + 1) * x2[-3]) % m2
        x1, x2 = x1[1:] + [n1], x2[1:] + [n2]
        want.append((n1 - n2) % m1)
    state, got = ((1, 1, 1), (1, 1, 1)), []
    for _ in range(5):
        state, w = lcg.mrg31k3p_next(state)
        got.append(w)
    assert got == want
    g = core.create("mrg31k3p", 1)
    assert [g.next_word() for _ in range(5)] == want


def test_miniature_combined_mrg_period():
    # order-1 components with primitive roots 3 mod 7 and 2 mod 11
    p = MrgParams((MrgComponent(7, (3,)), MrgComponent(11, (2,))), (1, -1))
    state, seen, outputs = ((1,), (1,)), {}, []
    for k in range(200):
        if state in seen:
            break
        seen[state] = k
        state, w = lcg.combined_mrg_next(state, p)
        outputs.append(w)
    assert len(seen) == math.lcm(6, 10) == 30
    # the output sequence itself has no shorter period
    cyc = outputs[:30] * 3
    assert min(d for d in range(1, 31) if cyc[d:d + 30] == cyc[:30]) == 30


def test_mrg_moduli_must_be_coprime():
    with pytest.raises(ValueError):
        MrgParams((MrgComponent(6, (1,)), MrgComponent(9, (2,))), (1, -1))
    with pytest.raises(ValueError):
        MrgComponent(7, (0, 0))


def test_mrg_companion_matches_step():
    comp = lcg.MRG31K3P.components[1]
    hist = (11, 22, 33)
    stepped = comp.step(hist)
    mat = comp.companion()
    assert tuple(int(v) for v in mat.dot(np.array(hist, dtype=object)) % comp.m) == stepped


def test_mrg_seed_reduction_and_remap():
    g = core.create("mrg31k3p", 2**31 - 1)  # a multiple of m1 only
    assert g.state[0] == (1, 1, 1)
    assert g.state[1] == ((2**31 - 1) % (2**31 - 21069),) * 3


# -- PCG ---------------------------------------------------------------------

def test_pcg_state_zero_advances_to_increment():
    assert lcg.pcg32_next(0)[0] == 1
    assert lcg.pcg32_output(0) == 0


def test_pcg_reference_demo_stream():
    # pcg32_srandom_r(&rng, 42, 54): increment (54 << 1) | 1
    inc = 109
    state = lcg.pcg32_next(0, inc)[0]
    state = lcg.pcg32_next((state + 42) % 2**64, inc)[0]
    words = []
    for _ in range(6):
        state, w = lcg.pcg32_next(state, inc)
        words.append(w)
    assert words == [0xA15C02B7, 0x7B47F409, 0xBA1D3330, 0x83D2F293, 0xBFA4784B, 0xCBED606E]


def test_pcg_first_three_outputs_seed_42():
    mult, mask = 6364136223846793005, 2**64 - 1
    s = (mult * 0 + 1) & mask
    s = (s + 42) & mask
    s = (s * mult + 1) & mask
    want = []
    for _ in range(3):
        old, s = s, (s * mult + 1) & mask
        xs = (((old >> 18) ^ old) >> 27) & 0xFFFFFFFF
        r = old >> 59
        want.append(((xs >> r) | (xs << (32 - r))) & 0xFFFFFFFF)
    g = core.create("pcg32", 42)
    assert [g.next_word() for _ in range(3)] == want
