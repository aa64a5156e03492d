"""Native 12-test statistical battery and verdict conventions.

Every test takes a ``BitStream`` (or a 0/1 uint8 array) and returns a
``TestOutcome`` holding its statistics and p-values.  Verdicts are applied
afterwards so one set of p-values can be judged under several conventions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

import numpy as np
from scipy import special, stats

from .core import BitStream

ALPHA_NIST = 0.01
NIST_SEQUENCE_BITS = 1_000_000
INTERVALS = {"diehard": (0.025, 0.975), "rabbit": (0.001, 0.999)}
CONVENTIONS = ("diehard", "rabbit", "nist")

Bits = Union[BitStream, np.ndarray]


# -- special functions ----------------------------------------------------------

def erfc(x: float) -> float:
    return float(special.erfc(x))


def incomplete_gamma(a: float, x: float) -> float:
    """Regularised upper incomplete gamma Q(a, x) (NIST's igamc)."""
    if a <= 0 or x < 0:
        raise ValueError("need a > 0 and x >= 0")
    return float(special.gammaincc(a, x))


def chi_square_pvalue(stat: float, df: float) -> float:
    """Upper-tail probability of a chi-square variate with ``df`` degrees of freedom."""
    if df < 1:
        raise ValueError("df must be at least 1")
    if not math.isfinite(stat):
        raise ValueError("statistic must be finite")
    if stat <= 0:
        return 1.0
    return incomplete_gamma(df / 2.0, stat / 2.0)


def normal_cdf(x):
    return special.ndtr(x)


def pvalue_discrete(p_r: float, p_l: float) -> float:
    """Three-case p-value for a discrete statistic, cases taken in the order written.

    ``p_r = P(X >= t)`` and ``p_l = P(X <= t)``.
    """
    for p in (p_r, p_l):
        if not 0.0 <= p <= 1.0:
            raise ValueError("probabilities must lie in [0, 1]")
    if p_r > p_l:
        return p_r
    if p_r >= p_l and p_l < 0.5:
        return 1.0 - p_l
    return 0.5


def pvalue_discrete_testu01(p_r: float, p_l: float) -> float:
    """TestU01's rule: the right tail when it is the smaller one.

    Unlike ``pvalue_discrete`` this reports a small p for an excess of
    events, which is the failure mode the birthday test looks for.
    """
    if p_r < p_l:
        return p_r
    if p_l < 0.5:
        return 1.0 - p_l
    return 0.5


# -- outcomes -------------------------------------------------------------------

@dataclass
class TestOutcome:
    test_id: str
    statistics: dict[str, float] = field(default_factory=dict)
    p_values: tuple[float, ...] = ()
    skipped: str = ""        # reason when the test could not be applied
    passed: bool | None = None
    convention: str = ""

    __test__ = False  # not a pytest class

    def __post_init__(self):
        self.p_values = tuple(float(min(1.0, max(0.0, p))) for p in self.p_values)

    @property
    def applicable(self) -> bool:
        return not self.skipped


def _bits(s: Bits) -> np.ndarray:
    if isinstance(s, BitStream):
        return s.bits
    return np.ascontiguousarray(s, dtype=np.uint8)


class ShortStream(ValueError):
    """The stream is below a test's documented minimum length."""


def _need(bits: np.ndarray, n: int, test: str) -> None:
    if bits.size < n:
        raise ShortStream(f"{test} needs at least {n} bits, got {bits.size}")


# -- frequency family -----------------------------------------------------------

def monobit(s: Bits, min_bits: int = 100) -> TestOutcome:
    bits = _bits(s)
    _need(bits, min_bits, "monobit")
    n = bits.size
    total = 2 * int(np.count_nonzero(bits)) - n
    s_obs = abs(total) / math.sqrt(n)
    return TestOutcome("monobit", {"sum": total, "s_obs": s_obs}, (erfc(s_obs / math.sqrt(2)),))


def block_frequency(s: Bits, block: int = 128, min_bits: int = 100) -> TestOutcome:
    bits = _bits(s)
    _need(bits, max(min_bits, block), "block frequency")
    nblocks = bits.size // block
    pi = bits[:nblocks * block].reshape(nblocks, block).sum(axis=1) / block
    chi2 = 4.0 * block * float(np.sum((pi - 0.5) ** 2))
    return TestOutcome("block_frequency", {"chi2": chi2, "blocks": nblocks},
                       (incomplete_gamma(nblocks / 2.0, chi2 / 2.0),))


def runs_test(s: Bits, min_bits: int = 100) -> TestOutcome:
    bits = _bits(s)
    _need(bits, min_bits, "runs")
    n = bits.size
    pi = np.count_nonzero(bits) / n
    tau = 2.0 / math.sqrt(n)
    if abs(pi - 0.5) >= tau:
        return TestOutcome("runs", {"pi": pi, "tau": tau},
                           skipped="frequency pre-test failed")
    v_obs = 1 + int(np.count_nonzero(bits[1:] != bits[:-1]))
    num = abs(v_obs - 2.0 * n * pi * (1 - pi))
    den = 2.0 * math.sqrt(2.0 * n) * pi * (1 - pi)
    return TestOutcome("runs", {"pi": pi, "v_obs": v_obs}, (erfc(num / den),))


# NIST class boundaries and probabilities for the longest-run test.
_LONGEST_RUN = {
    8: (1, (0.2148, 0.3672, 0.2305, 0.1875)),
    128: (4, (0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124)),
    10_000: (10, (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
}


def _row_longest_runs(rows: np.ndarray) -> np.ndarray:
    nrows, width = rows.shape
    padded = np.zeros((nrows, width + 2), dtype=np.int8)
    padded[:, 1:-1] = rows
    edges = np.diff(padded.ravel())
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    lengths = ends - starts
    owner = starts // (width + 2)
    out = np.zeros(nrows, dtype=np.int64)
    np.maximum.at(out, owner, lengths)
    return out


def longest_run(s: Bits) -> TestOutcome:
    bits = _bits(s)
    _need(bits, 128, "longest run")
    n = bits.size
    block = 8 if n < 6272 else 128 if n < 750_000 else 10_000
    low, probs = _LONGEST_RUN[block]
    nblocks = n // block
    runs = _row_longest_runs(bits[:nblocks * block].reshape(nblocks, block))
    classes = np.clip(runs, low, low + len(probs) - 1) - low
    counts = np.bincount(classes, minlength=len(probs))
    expected = nblocks * np.asarray(probs)
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    return TestOutcome("longest_run", {"chi2": chi2, "block": block, "blocks": nblocks},
                       (incomplete_gamma((len(probs) - 1) / 2.0, chi2 / 2.0),))


# -- binary matrix rank -----------------------------------------------------------

def rank_probability(r: int, rows: int, cols: int) -> float:
    """P(rank = r) for a uniformly random GF(2) matrix."""
    if r == 0:
        return 2.0 ** (-rows * cols)
    log2p = r * (rows + cols - r) - rows * cols
    prod = 1.0
    for i in range(r):
        prod *= (1 - 2.0 ** (i - rows)) * (1 - 2.0 ** (i - cols)) / (1 - 2.0 ** (i - r))
    return 2.0 ** log2p * prod


def gf2_ranks(matrices: np.ndarray, cols: int) -> np.ndarray:
    """Ranks of a stack of GF(2) matrices given as (count, rows) packed row ints."""
    rows = np.array(matrices, dtype=np.uint64, copy=True)
    count, nrows = rows.shape
    rank = np.zeros(count, dtype=np.int64)
    used = np.zeros((count, nrows), dtype=bool)
    idx = np.arange(count)
    for bit in range(cols - 1, -1, -1):
        has = ((rows >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        candidates = has & ~used
        found = candidates.any(axis=1)
        if not found.any():
            continue
        pivot = np.argmax(candidates, axis=1)
        pivot_rows = rows[idx, pivot]
        hit = has & found[:, None]
        hit[idx, pivot] = False
        rows = np.where(hit, rows ^ pivot_rows[:, None], rows)
        used[idx[found], pivot[found]] = True
        rank += found
    return rank


def matrix_rank_test(s: Bits, rows: int = 32, cols: int = 32) -> TestOutcome:
    bits = _bits(s)
    _need(bits, 38 * rows * cols, "matrix rank")
    count = bits.size // (rows * cols)
    block = bits[:count * rows * cols].reshape(count * rows, cols)
    weights = (np.uint64(1) << np.arange(cols - 1, -1, -1, dtype=np.uint64))
    packed = (block.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64).reshape(count, rows)
    ranks = gf2_ranks(packed, cols)
    full = min(rows, cols)
    observed = np.array([np.sum(ranks == full), np.sum(ranks == full - 1), np.sum(ranks < full - 1)])
    p_full = rank_probability(full, rows, cols)
    p_less = rank_probability(full - 1, rows, cols)
    probs = np.array([p_full, p_less, 1.0 - p_full - p_less])
    expected = count * probs
    chi2 = float(np.sum((observed - expected) ** 2 / expected))
    return TestOutcome("matrix_rank",
                       {"chi2": chi2, "matrices": count, "full": int(observed[0]),
                        "full_minus_1": int(observed[1]), "lower": int(observed[2])},
                       (math.exp(-chi2 / 2.0),))


# -- spectral ---------------------------------------------------------------------

def dft_test(s: Bits, min_bits: int = 1000) -> TestOutcome:
    bits = _bits(s)
    _need(bits, min_bits, "spectral")
    n = bits.size
    x = 2.0 * bits - 1.0
    mod = np.abs(np.fft.rfft(x))[: n // 2]
    threshold = math.sqrt(math.log(1 / 0.05) * n)
    n0 = 0.95 * n / 2.0
    n1 = int(np.count_nonzero(mod < threshold))
    d = (n1 - n0) / math.sqrt(n * 0.95 * 0.05 / 4.0)
    return TestOutcome("dft", {"n1": n1, "n0": n0, "d": d}, (erfc(abs(d) / math.sqrt(2)),))


# -- pattern counting -------------------------------------------------------------

def _pattern_values(bits: np.ndarray, m: int) -> np.ndarray:
    """Integer value of the overlapping m-bit window at every position (cyclic)."""
    n = bits.size
    ext = np.concatenate([bits, bits[: m - 1]]).astype(np.int64)
    vals = np.zeros(n, dtype=np.int64)
    for k in range(m):
        vals <<= 1
        vals |= ext[k:k + n]
    return vals


def _psi_sq(counts: np.ndarray, m: int, n: int) -> float:
    if m == 0:
        return 0.0
    return float((2.0 ** m / n) * np.sum(counts.astype(np.float64) ** 2) - n)


def serial_test(s: Bits, m: int = 16, min_bits: int | None = None) -> TestOutcome:
    bits = _bits(s)
    _need(bits, 2 ** (m + 2) + 1 if min_bits is None else min_bits, "serial")
    n = bits.size
    vals = _pattern_values(bits, m)
    psi = []
    for k in (m, m - 1, m - 2):
        counts = np.bincount(vals >> (m - k), minlength=2 ** k) if k else np.array([n])
        psi.append(_psi_sq(counts, k, n))
    d1 = psi[0] - psi[1]
    d2 = psi[0] - 2 * psi[1] + psi[2]
    return TestOutcome("serial", {"psi_m": psi[0], "del1": d1, "del2": d2},
                       (incomplete_gamma(2 ** (m - 2), d1 / 2), incomplete_gamma(2 ** (m - 3), d2 / 2)))


def approximate_entropy(s: Bits, m: int = 10, min_bits: int | None = None) -> TestOutcome:
    bits = _bits(s)
    _need(bits, 2 ** (m + 5) if min_bits is None else min_bits, "approximate entropy")
    n = bits.size
    vals = _pattern_values(bits, m + 1)
    phi = []
    for k in (m, m + 1):
        counts = np.bincount(vals >> (m + 1 - k), minlength=2 ** k)
        c = counts[counts > 0] / n
        phi.append(float(np.sum(c * np.log(c))))
    apen = phi[0] - phi[1]
    chi2 = 2.0 * n * (math.log(2) - apen)
    return TestOutcome("approximate_entropy", {"apen": apen, "chi2": chi2},
                       (incomplete_gamma(2 ** (m - 1), chi2 / 2),))


# -- cumulative sums --------------------------------------------------------------

def _cusum_p(z: int, n: int) -> float:
    sq = math.sqrt(n)
    k1 = np.arange(int((-n / z + 1) / 4), int((n / z - 1) / 4) + 1)
    k2 = np.arange(int((-n / z - 3) / 4), int((n / z - 1) / 4) + 1)
    s1 = np.sum(normal_cdf((4 * k1 + 1) * z / sq) - normal_cdf((4 * k1 - 1) * z / sq))
    s2 = np.sum(normal_cdf((4 * k2 + 3) * z / sq) - normal_cdf((4 * k2 + 1) * z / sq))
    return float(1.0 - s1 + s2)


def cumulative_sums(s: Bits, min_bits: int = 100) -> TestOutcome:
    bits = _bits(s)
    _need(bits, min_bits, "cumulative sums")
    n = bits.size
    walk = np.cumsum(2 * bits.astype(np.int64) - 1)
    z_fwd = int(np.max(np.abs(walk)))
    back = walk[-1] - np.concatenate([[0], walk[:-1]])
    z_bwd = int(np.max(np.abs(back)))
    return TestOutcome("cumulative_sums", {"z_forward": z_fwd, "z_backward": z_bwd},
                       (_cusum_p(z_fwd, n), _cusum_p(z_bwd, n)))


# -- autocorrelation and Hamming weights ------------------------------------------

def autocorrelation(s: Bits, lags: Sequence[int] = (1, 2)) -> TestOutcome:
    bits = _bits(s)
    _need(bits, 100, "autocorrelation")
    n = bits.size
    stats_, ps = {}, []
    for d in lags:
        agree = int(np.count_nonzero(bits[: n - d] ^ bits[d:]))
        z = 2.0 * (agree - (n - d) / 2.0) / math.sqrt(n - d)
        stats_[f"z_lag{d}"] = z
        ps.append(erfc(abs(z) / math.sqrt(2)))
    return TestOutcome("autocorrelation", stats_, tuple(ps))


def hamming_weight(s: Bits, block: int = 32) -> TestOutcome:
    """Chi-square over the Hamming weights of consecutive ``block``-bit blocks."""
    bits = _bits(s)
    _need(bits, 100 * block, "Hamming weight")
    nblocks = bits.size // block
    w = bits[:nblocks * block].reshape(nblocks, block).sum(axis=1, dtype=np.int64)
    x = float(np.sum((w - block / 2.0) ** 2) * 4.0 / block)
    return TestOutcome("hamming_weight", {"chi2": x, "blocks": nblocks},
                       (chi_square_pvalue(x, nblocks),))


# -- birthday spacings ------------------------------------------------------------

BIRTHDAYS = 512
DAY_BITS = 24


def birthday_lambda(m: int, day_bits: int) -> float:
    return m ** 3 / (4.0 * 2 ** day_bits)


def repeated_spacings(days: np.ndarray) -> np.ndarray:
    """Per-row count of repeated values among the m sorted-birthday spacings."""
    days = np.sort(np.atleast_2d(days), axis=1)
    spacings = np.diff(days, axis=1, prepend=0)
    spacings.sort(axis=1)
    return np.count_nonzero(np.diff(spacings, axis=1) == 0, axis=1)


def birthday_spacings(s: Bits, m: int = BIRTHDAYS, day_bits: int = DAY_BITS,
                      offsets: Sequence[int] = (0, 8)) -> TestOutcome:
    """Days are ``day_bits``-bit fields of consecutive 32-bit chunks, one p per offset."""
    bits = _bits(s)
    _need(bits, 10 * m * 32, "birthday spacings")
    samples = bits.size // (32 * m)
    chunks = bits[: samples * m * 32].reshape(-1, 32).astype(np.uint64)
    weights = np.uint64(1) << np.arange(31, -1, -1, dtype=np.uint64)
    words = (chunks * weights).sum(axis=1, dtype=np.uint64)
    lam = birthday_lambda(m, day_bits) * samples
    stats_, ps = {"samples": samples, "expected": lam}, []
    for off in offsets:
        shift = np.uint64(32 - day_bits - off)
        days = ((words >> shift) & np.uint64(2 ** day_bits - 1)).astype(np.int64).reshape(samples, m)
        total = int(repeated_spacings(days).sum())
        p_r = float(stats.poisson.sf(total - 1, lam))
        p_l = float(stats.poisson.cdf(total, lam))
        stats_[f"repeats_off{off}"] = total
        ps.append(pvalue_discrete_testu01(p_r, p_l))
    return TestOutcome("birthday_spacings", stats_, tuple(ps))


# -- registry ---------------------------------------------------------------------

TESTS: dict[str, Callable[[Bits], TestOutcome]] = {
    "monobit": monobit,
    "block_frequency": block_frequency,
    "runs": runs_test,
    "longest_run": longest_run,
    "matrix_rank": matrix_rank_test,
    "dft": dft_test,
    "serial": serial_test,
    "approximate_entropy": approximate_entropy,
    "cumulative_sums": cumulative_sums,
    "autocorrelation": autocorrelation,
    "hamming_weight": hamming_weight,
    "birthday_spacings": birthday_spacings,
}
BATTERY = tuple(TESTS)


def run_test(name: str, s: Bits) -> TestOutcome:
    try:
        fn = TESTS[name]
    except KeyError:
        raise KeyError(f"unknown test {name!r}") from None
    try:
        return fn(s)
    except ShortStream as exc:
        return TestOutcome(name, skipped=str(exc))


# -- verdicts ---------------------------------------------------------------------

@dataclass(frozen=True)
class ProportionBand:
    lower: float
    upper: float
    min_count: int   # NIST's reported minimum pass count, floor(lower * m)


def nist_proportion_range(alpha: float, m: int) -> ProportionBand:
    if not 0 < alpha < 1 or m < 1:
        raise ValueError("need 0 < alpha < 1 and m >= 1")
    p = 1 - alpha
    half = 3 * math.sqrt(alpha * p / m)
    return ProportionBand(p - half, p + half, math.floor((p - half) * m))


def verdict(p_values: Sequence[float], convention: str, alpha: float = ALPHA_NIST) -> bool:
    """Pass/fail for one test's p-values.

    diehard and rabbit need every p inside a closed interval.  For nist the
    p-values are one per sequence and the pass proportion must reach the
    lower end of the acceptance band.
    """
    if not len(p_values):
        raise ValueError("no p-values to judge")
    if convention in INTERVALS:
        lo, hi = INTERVALS[convention]
        return all(lo <= p <= hi for p in p_values)
    if convention == "nist":
        band = nist_proportion_range(alpha, len(p_values))
        passed = sum(p >= alpha for p in p_values)
        return passed / len(p_values) >= band.lower
    raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


@dataclass
class BatteryReport:
    generator: str
    seed: int | None
    convention: str
    outcomes: list[TestOutcome] = field(default_factory=list)

    @property
    def pass_count(self) -> int:
        return sum(1 for o in self.outcomes if o.passed)

    def rows(self) -> list[list[str]]:
        out = []
        for o in self.outcomes:
            st = ";".join(f"{k}={_fmt(v)}" for k, v in o.statistics.items())
            ps = ";".join(f"{p:.6g}" for p in o.p_values) if len(o.p_values) <= 4 else f"{len(o.p_values)} values"
            result = "skip" if o.skipped else ("pass" if o.passed else "fail")
            out.append([self.generator, str(self.seed), self.convention, o.test_id, st, ps, result])
        return out

    def to_tsv(self) -> str:
        head = ["generator", "seed", "convention", "test", "statistics", "p_values", "verdict"]
        return "\n".join("\t".join(r) for r in [head] + self.rows()) + "\n"

    def to_text(self) -> str:
        lines = [f"{self.generator} seed={self.seed} convention={self.convention}"]
        for o in self.outcomes:
            if o.skipped:
                lines.append(f"  {o.test_id:<20} SKIP  {o.skipped}")
                continue
            ps = ", ".join(f"{p:.4f}" for p in o.p_values[:4])
            if len(o.p_values) > 4:
                ps += f", ... ({len(o.p_values)} p-values)"
            lines.append(f"  {o.test_id:<20} {'PASS' if o.passed else 'FAIL'}  {ps}")
        lines.append(f"  passed {self.pass_count}/{len(self.outcomes)}")
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.6g}"


def _judge(outcome: TestOutcome, convention: str, p_values: Sequence[float] | None = None) -> TestOutcome:
    out = TestOutcome(outcome.test_id, dict(outcome.statistics), outcome.p_values,
                      outcome.skipped, convention=convention)
    if outcome.skipped:
        out.passed = False
    else:
        out.passed = verdict(p_values if p_values is not None else outcome.p_values, convention)
    return out


def _nist_outcome(name: str, parts: list[TestOutcome], alpha: float) -> TestOutcome:
    """Combine per-sequence outcomes: each p-value slot must reach the band."""
    slots = max((len(o.p_values) for o in parts), default=0)
    m = len(parts)
    band = nist_proportion_range(alpha, m)
    statistics: dict[str, float] = {"sequences": m, "min_count": band.min_count}
    passed = slots > 0
    for k in range(slots):
        count = sum(1 for o in parts if len(o.p_values) > k and o.p_values[k] >= alpha)
        statistics[f"passed_{k}"] = count
        passed &= count / m >= band.lower
    flat = tuple(p for o in parts for p in o.p_values)
    skipped = "" if slots else parts[0].skipped
    return TestOutcome(name, statistics, flat, skipped, passed=bool(passed), convention="nist")


def run_battery(s: Bits, battery: Iterable[str] = BATTERY, convention: str = "rabbit",
                generator: str = "", seed: int | None = None,
                sequence_bits: int = NIST_SEQUENCE_BITS, alpha: float = ALPHA_NIST) -> BatteryReport:
    return run_all_conventions(s, battery, (convention,), generator, seed, sequence_bits, alpha)[convention]


def run_all_conventions(s: Bits, battery: Iterable[str] = BATTERY,
                        conventions: Sequence[str] = CONVENTIONS, generator: str = "",
                        seed: int | None = None, sequence_bits: int = NIST_SEQUENCE_BITS,
                        alpha: float = ALPHA_NIST) -> dict[str, BatteryReport]:
    """Run the battery once and judge it under each convention.

    The nist convention splits the stream into ``sequence_bits`` sequences
    when at least two fit; otherwise the whole stream is one sequence and
    its p-values are shared with the other conventions.
    """
    bits = _bits(s)
    battery = list(battery)
    for c in conventions:
        if c not in CONVENTIONS:
            raise ValueError(f"unknown convention {c!r}; expected one of {CONVENTIONS}")
    whole: dict[str, TestOutcome] = {}
    nseq = bits.size // sequence_bits
    split = "nist" in conventions and nseq >= 2
    if any(c != "nist" for c in conventions) or not split:
        whole = {name: run_test(name, bits) for name in battery}
    reports = {}
    for c in conventions:
        rep = BatteryReport(generator, seed, c)
        for name in battery:
            if c == "nist" and split:
                parts = [run_test(name, bits[i * sequence_bits:(i + 1) * sequence_bits])
                         for i in range(nseq)]
                rep.outcomes.append(_nist_outcome(name, parts, alpha))
            elif c == "nist":
                # One sequence: each p-value must reach alpha on its own.
                o = whole[name]
                rep.outcomes.append(_judge(o, c, [min(o.p_values)] if o.p_values else None))
            else:
                rep.outcomes.append(_judge(whole[name], c))
        reports[c] = rep
    return reports
