from __future__ import annotations

import cmath
import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from prngsuite import core, stats
from prngsuite.core import BitStream

B = BitStream.from_string


def mt_bits(n: int, seed: int = 1234) -> BitStream:
    return core.emit_bits(core.create("mt19937-64", seed), n)


# -- special functions ------------------------------------------------------------

@pytest.mark.parametrize("x", [0.0, 0.1, 0.5, 1.0, 2.5, 5.0, 8.0])
def test_erfc_against_mpmath(x):
    assert stats.erfc(x) == pytest.approx(float(mpmath.erfc(x)), rel=1e-8, abs=1e-300)


@pytest.mark.parametrize("a, x", [(0.5, 0.1), (1.5, 2.44), (4, 3.0), (128, 120.0),
                                  (2**14, 2**14 + 300.0), (2.5, 40.0)])
def test_igamc_against_mpmath(a, x):
    want = float(mpmath.gammainc(a, x, mpmath.inf, regularized=True))
    assert stats.incomplete_gamma(a, x) == pytest.approx(want, rel=1e-8, abs=1e-300)


def test_chi_square_examples():
    assert stats.chi_square_pvalue(0, 3) == 1.0
    assert stats.erfc(0) == 1.0
    assert stats.chi_square_pvalue(2.16, 4) == pytest.approx(0.706, abs=5e-4)
    with pytest.raises(ValueError):
        stats.chi_square_pvalue(1.0, 0)
    with pytest.raises(ValueError):
        stats.incomplete_gamma(0, 1)


# -- discrete p-values and verdicts ------------------------------------------------

@pytest.mark.parametrize("p_r, p_l, p", [(0.9, 0.2, 0.9), (0.1, 0.1, 0.9), (0.6, 0.6, 0.5)])
def test_pvalue_discrete_cases(p_r, p_l, p):
    assert stats.pvalue_discrete(p_r, p_l) == pytest.approx(p)


def test_pvalue_discrete_range():
    with pytest.raises(ValueError):
        stats.pvalue_discrete(1.2, 0.1)


def test_testu01_ordering_flags_an_excess():
    # many more events than expected: p_r tiny, p_l near 1
    assert stats.pvalue_discrete_testu01(1e-9, 1.0) == 1e-9
    assert stats.pvalue_discrete_testu01(0.9, 0.2) == pytest.approx(0.8)


@pytest.mark.parametrize("ps, convention, ok", [
    ([0.5, 0.3], "diehard", True),
    ([0.01], "diehard", False),
    ([0.975], "diehard", True),
    ([0.9995], "rabbit", False),
    ([0.0015, 0.998], "rabbit", True),
    ([0.5] * 99 + [0.001], "nist", True),
    ([0.5] * 90 + [0.001] * 10, "nist", False),
])
def test_verdicts(ps, convention, ok):
    assert stats.verdict(ps, convention) is ok


def test_verdict_errors():
    with pytest.raises(ValueError):
        stats.verdict([], "diehard")
    with pytest.raises(ValueError):
        stats.verdict([0.5], "crush")


def test_nist_proportion_band():
    band = stats.nist_proportion_range(0.01, 1000)
    assert 0.9805 <= band.lower <= 0.9806
    assert band.min_count == 980
    assert band.upper == pytest.approx(0.99 + (0.99 - band.lower))
    assert stats.nist_proportion_range(0.01, 629).min_count == 615
    # a 1000-sequence report needs 981 passes: 980/1000 is below the band
    assert not stats.verdict([0.5] * 980 + [0.0] * 20, "nist")
    assert stats.verdict([0.5] * 981 + [0.0] * 19, "nist")


# -- NIST worked examples -----------------------------------------------------------

def test_monobit_examples():
    assert stats.monobit(B("1011010101"), min_bits=1).p_values[0] == pytest.approx(0.527089, abs=1e-6)
    zeros = stats.monobit(np.zeros(100, dtype=np.uint8))
    assert zeros.p_values[0] == pytest.approx(math.erfc(10 / math.sqrt(2)), rel=1e-9)
    assert zeros.p_values[0] < 1e-20
    assert stats.monobit(B("01" * 50)).p_values == (1.0,)


def test_block_frequency_example():
    o = stats.block_frequency(B("0110011010"), block=3, min_bits=1)
    assert o.statistics["chi2"] == pytest.approx(1.0)
    assert o.p_values[0] == pytest.approx(0.801252, abs=1e-6)


def test_runs_examples():
    assert stats.runs_test(B("1001101011"), min_bits=1).p_values[0] == pytest.approx(0.147232, abs=1e-6)
    alt = stats.runs_test(B("01" * 500))
    assert alt.p_values[0] < 1e-10
    assert stats.runs_test(np.ones(200, dtype=np.uint8)).skipped


def test_longest_run_example():
    ex = ("11001100000101010110110001001100111000000000001001001101010100010001001111010110"
          "100000001101011111001100111001101101100010110010")
    o = stats.longest_run(B(ex))
    assert o.statistics["chi2"] == pytest.approx(4.882605, abs=1e-6)
    # the published p (0.180609) carries a rounding slip; the chi-square is exact
    assert o.p_values[0] == pytest.approx(0.180609, abs=1e-4)


def test_serial_example():
    o = stats.serial_test(B("0011011101"), m=3, min_bits=1)
    assert o.p_values == pytest.approx((0.808792, 0.670320), abs=1e-6)


def test_approximate_entropy_example():
    o = stats.approximate_entropy(B("0100110101"), m=3, min_bits=1)
    assert o.p_values[0] == pytest.approx(0.261961, abs=1e-6)


def test_cusum_example():
    o = stats.cumulative_sums(B("1011010111"), min_bits=1)
    assert o.p_values == pytest.approx((0.4116588, 0.4116588), abs=1e-6)


def test_dft_against_direct_transform():
    bits = mt_bits(1200).bits
    x = [2 * int(b) - 1 for b in bits]
    n = len(x)
    mods = [abs(sum(v * cmath.exp(-2j * math.pi * k * j / n) for j, v in enumerate(x)))
            for k in range(n // 2)]
    t = math.sqrt(math.log(20) * n)
    n1 = sum(m < t for m in mods)
    d = (n1 - 0.95 * n / 2) / math.sqrt(n * 0.95 * 0.05 / 4)
    o = stats.dft_test(BitStream(bits))
    assert o.statistics["n1"] == n1
    assert o.p_values[0] == pytest.approx(math.erfc(abs(d) / math.sqrt(2)), rel=1e-12)


def test_autocorrelation_detects_lag_structure():
    o = stats.autocorrelation(B("0011" * 1000))
    assert o.p_values[1] < 1e-10  # lag 2 always disagrees


# -- matrix rank ------------------------------------------------------------------

def test_full_rank_4x4_probability():
    assert stats.rank_probability(4, 4, 4) == pytest.approx(20160 / 65536, rel=1e-12)


def test_4x4_rank_distribution_by_enumeration():
    mats = np.array([[(v >> (4 * r)) & 0xF for r in range(4)] for v in range(2**16)], dtype=np.uint64)
    ranks = stats.gf2_ranks(mats, 4)
    counts = np.bincount(ranks, minlength=5)
    assert counts[4] == 20160
    for r in range(5):
        assert counts[r] / 2**16 == pytest.approx(stats.rank_probability(r, 4, 4), rel=1e-12)


@pytest.mark.parametrize("kind, rank", [("identity", 32), ("zero", 0)])
def test_gf2_rank_extremes(kind, rank):
    rows = [1 << (31 - i) for i in range(32)] if kind == "identity" else [0] * 32
    assert stats.gf2_ranks(np.array([rows], dtype=np.uint64), 32)[0] == rank


def test_rank_distribution_random_matrices():
    rng = np.random.default_rng(11)
    mats = rng.integers(0, 16, size=(10_000, 4), dtype=np.uint64)
    counts = np.bincount(stats.gf2_ranks(mats, 4), minlength=5)
    expected = 10_000 * np.array([stats.rank_probability(r, 4, 4) for r in range(5)])
    keep = expected > 5
    tail = counts[~keep].sum()
    obs = np.append(counts[keep], tail)
    exp = np.append(expected[keep], expected[~keep].sum())
    chi2 = float(np.sum((obs - exp) ** 2 / exp))
    assert stats.chi_square_pvalue(chi2, len(obs) - 1) > 0.001


# -- birthday spacings ----------------------------------------------------------------

def test_birthday_tiny_design_by_enumeration():
    draws = np.array(list(itertools.product(range(16), repeat=4)))
    mean = stats.repeated_spacings(draws).mean()
    # plain-Python count of equal adjacent sorted spacings, first spacing = smallest day
    total = 0
    for d in draws:
        s = sorted(d)
        sp = sorted([s[0]] + [b - a for a, b in zip(s, s[1:])])
        total += sum(1 for a, b in zip(sp, sp[1:]) if a == b)
    assert mean == total / len(draws) == 0.6255645751953125
    # the asymptotic Poisson mean for this design is 1
    assert stats.birthday_lambda(4, 4) == 1.0


def test_birthday_identical_samples_fail():
    bits = core.words_to_bits(np.full(10 * 512, 0xABCDEF12, dtype=np.uint64), 32)
    o = stats.birthday_spacings(BitStream(bits))
    assert max(o.p_values) < 1e-10


def test_birthday_mt_stream_is_unremarkable():
    o = stats.birthday_spacings(mt_bits(10**6))
    assert all(0.001 < p < 0.999 for p in o.p_values)


# -- battery ------------------------------------------------------------------------

def test_battery_on_mt32():
    s = core.emit_bits(core.create("mt19937-32", 1234), 10**7)
    rep = stats.run_battery(s, convention="rabbit", generator="mt19937-32", seed=1234)
    assert [o.test_id for o in rep.outcomes] == list(stats.BATTERY)
    assert len(rep.outcomes) == 12
    assert rep.pass_count >= 10
    assert rep.pass_count == sum(o.passed for o in rep.outcomes)


def test_empty_battery():
    rep = stats.run_battery(mt_bits(1000), battery=[])
    assert rep.outcomes == [] and rep.pass_count == 0


def test_battery_is_deterministic():
    s = mt_bits(300_000, seed=7)
    a = stats.run_all_conventions(s, generator="x", seed=7)
    b = stats.run_all_conventions(s, generator="x", seed=7)
    assert {c: r.to_tsv() for c, r in a.items()} == {c: r.to_tsv() for c, r in b.items()}


def test_short_stream_tests_are_skipped_and_fail():
    rep = stats.run_battery(mt_bits(500), convention="diehard")
    skipped = [o for o in rep.outcomes if o.skipped]
    assert {o.test_id for o in skipped} >= {"matrix_rank", "birthday_spacings", "serial"}
    assert not any(o.passed for o in skipped)
    assert "SKIP" in rep.to_text()


def test_nist_convention_splits_sequences():
    s = mt_bits(3 * 10**6, seed=19650218)
    rep = stats.run_battery(s, ["monobit", "cumulative_sums"], convention="nist")
    mono, cusum = rep.outcomes
    assert mono.statistics["sequences"] == 3 and len(mono.p_values) == 3
    assert len(cusum.p_values) == 6


@pytest.mark.parametrize("pattern", ["0", "1", "01"])
def test_degenerate_streams_are_rejected(pattern):
    s = B(pattern * (10**6 // len(pattern)))
    outs = [stats.run_test(name, s) for name in stats.BATTERY]
    assert min(min(o.p_values) for o in outs if o.p_values) < 1e-10


def test_unknown_test_and_convention():
    with pytest.raises(KeyError):
        stats.run_test("bogus", mt_bits(100))
    with pytest.raises(ValueError):
        stats.run_all_conventions(mt_bits(100), [], ["crush"])


def test_report_tsv_shape():
    rep = stats.run_battery(mt_bits(10**5), ["monobit", "runs"], convention="diehard",
                            generator="g", seed=3)
    lines = rep.to_tsv().splitlines()
    assert lines[0].split("\t")[0] == "generator" and len(lines) == 3
    assert all(len(l.split("\t")) == 7 for l in lines)


@settings(max_examples=25, deadline=None)
@given(st.binary(min_size=500, max_size=3000))
def test_p_values_always_in_unit_interval(data):
    s = BitStream(np.unpackbits(np.frombuffer(data, dtype=np.uint8)))
    for name in stats.BATTERY:
        o = stats.run_test(name, s)
        assert all(0.0 <= p <= 1.0 for p in o.p_values)
