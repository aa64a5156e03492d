"""One-dimensional cellular automata and the CA-based generators.

Configurations used by the generators are packed into Python ints with
cell 0 in the most significant position, so a full 32-cell configuration
read as an integer is already the output word.  The array-based
``eca_step`` and ``ca3_step`` are the reference semantics; the packed
steppers are the fast path and are tested against them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .arith import prime_factors
from .core import Generator, GeneratorId, register

NULL, PERIODIC = "null", "periodic"

MAXLEN_RULES = (90, 150, 90, 90, 90, 150, 150, 90, 90, 90, 90, 90, 150, 90, 90, 150,
                150, 90, 150, 150, 150, 90, 150, 150, 150, 150, 90, 150, 90, 150, 90, 150)
NONLINEAR_RULES = (5, 105, 90, 90, 165, 150, 90, 105, 150, 105, 90, 165, 150, 150, 165,
                   90, 165, 90, 165, 150, 150, 90, 165, 105, 90, 165, 150, 90, 105, 150,
                   165, 90, 105, 105, 90, 150, 90, 90, 165, 150, 150, 105, 90, 165, 20)
HYBRID_30_45 = (30, 45) * 16
CA3_RULE = "120021120021021120021021210"


@dataclass(frozen=True)
class RuleVector:
    rules: tuple[int, ...]
    boundary: str = NULL

    def __post_init__(self):
        if self.boundary not in (NULL, PERIODIC):
            raise ValueError(f"boundary must be {NULL!r} or {PERIODIC!r}")
        if not self.rules:
            raise ValueError("empty rule vector")
        if any(not 0 <= r <= 255 for r in self.rules):
            raise ValueError("ECA rules are numbered 0..255")

    @classmethod
    def uniform(cls, rule: int, n: int, boundary: str = PERIODIC) -> "RuleVector":
        return cls((rule,) * n, boundary)

    def __len__(self):
        return len(self.rules)


def _neighbours(cells: np.ndarray, boundary: str) -> tuple[np.ndarray, np.ndarray]:
    if boundary == PERIODIC:
        return np.roll(cells, 1), np.roll(cells, -1)
    zero = np.zeros(1, dtype=cells.dtype)
    return (np.concatenate([zero, cells[:-1]]), np.concatenate([cells[1:], zero]))


def eca_step(cells: Sequence[int], rv: RuleVector) -> np.ndarray:
    """Apply rule R_i to (left, self, right) of every cell simultaneously."""
    c = np.asarray(cells, dtype=np.uint8)
    if c.size != len(rv):
        raise ValueError(f"configuration has {c.size} cells, rule vector {len(rv)}")
    left, right = _neighbours(c, rv.boundary)
    idx = (left.astype(np.int64) << 2) | (c.astype(np.int64) << 1) | right
    rules = np.asarray(rv.rules, dtype=np.int64)
    return ((rules >> idx) & 1).astype(np.uint8)


def _check_rule3(rule: str) -> None:
    if len(rule) != 27 or set(rule) - set("012"):
        raise ValueError("3-state rule must be 27 digits over {0,1,2}")


def ca3_step(cells: Sequence[int], rule: str = CA3_RULE) -> np.ndarray:
    """Periodic 3-state step; neighbourhood (l, s, r) reads digit 26 - (9l + 3s + r)."""
    _check_rule3(rule)
    c = np.asarray(cells, dtype=np.int64)
    if np.any((c < 0) | (c > 2)):
        raise ValueError("3-state cells must be 0, 1 or 2")
    table = np.array([int(ch) for ch in reversed(rule)], dtype=np.int64)
    return table[9 * np.roll(c, 1) + 3 * c + np.roll(c, -1)]


# -- packed fast path ---------------------------------------------------------

def pack_cells(cells: Sequence[int]) -> int:
    v = 0
    for bit in cells:
        v = (v << 1) | int(bit)
    return v


def unpack_cells(value: int, n: int) -> np.ndarray:
    return np.array([(value >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)


class PackedStepper:
    """Hybrid ECA step on an n-bit integer via per-neighbourhood masks."""

    def __init__(self, rv: RuleVector):
        self.n = len(rv)
        self.full = (1 << self.n) - 1
        self.periodic = rv.boundary == PERIODIC
        # masks[k]: cells whose rule maps neighbourhood k to 1
        self.masks = [pack_cells([(r >> k) & 1 for r in rv.rules]) for k in range(8)]
        self.rule30 = set(rv.rules) == {30}

    def neighbours(self, x: int) -> tuple[int, int]:
        n, full = self.n, self.full
        if self.periodic:
            left = (x >> 1) | ((x & 1) << (n - 1))
            right = ((x << 1) & full) | (x >> (n - 1))
        else:
            left = x >> 1
            right = (x << 1) & full
        return left, right

    def __call__(self, x: int) -> int:
        left, right = self.neighbours(x)
        if self.rule30:
            return left ^ (x | right)
        full = self.full
        nl, nc, nr = full ^ left, full ^ x, full ^ right
        out = 0
        for k, mask in enumerate(self.masks):
            if not mask:
                continue
            term = mask
            term &= left if k & 4 else nl
            term &= x if k & 2 else nc
            term &= right if k & 1 else nr
            out |= term
        return out


# -- word extraction ----------------------------------------------------------

@dataclass(frozen=True)
class Extraction:
    """How output words are read from a run of configurations.

    kind is one of "full", "spacing" (site spacing gamma, two steps per
    word), "window" (cells [start, start + width)) or "ternary".
    """

    kind: str
    width: int = 32
    start: int = 0
    gamma: int = 0

    def __post_init__(self):
        if self.kind not in ("full", "spacing", "window", "ternary"):
            raise ValueError(f"unknown extraction kind {self.kind!r}")


def ca_extract_word(configs: Sequence[Sequence[int]], spec: Extraction) -> int:
    """Read one word from one configuration (two for site spacing)."""
    first = np.asarray(configs[0])
    n = first.size
    if spec.kind == "full":
        return pack_cells(first)
    if spec.kind == "spacing":
        step = spec.gamma + 1
        word = 0
        for cfg in configs[:step]:
            word = (word << len(range(0, n, step))) | pack_cells(np.asarray(cfg)[::step])
        return word
    if spec.start + spec.width > n:
        raise ValueError(f"window [{spec.start}, {spec.start + spec.width}) exceeds {n} cells")
    window = first[spec.start:spec.start + spec.width]
    if spec.kind == "window":
        return pack_cells(window)
    value = 0
    for d in window:
        value = value * 3 + int(d)
    return value


# -- seed to configuration ----------------------------------------------------

def seed_config(seed: int, n: int) -> int:
    """Repeat the 64 seed bits from the least significant cell upward.

    Bit j of the packed configuration (cell n - 1 - j) is seed bit j mod 64,
    so for n <= 64 the configuration is simply ``seed mod 2**n``.  An
    all-zero result is replaced by a single live centre cell.
    """
    v = 0
    for j in range(n):
        v |= ((seed >> (j % 64)) & 1) << j
    if v == 0:
        return 1 << (n - 1 - n // 2)
    return v


# -- GF(2) machinery ----------------------------------------------------------

def characteristic_matrix(rv: RuleVector) -> np.ndarray:
    """Tridiagonal T with T[i, i] = 1 for rule 150 (periodic adds the corners)."""
    if set(rv.rules) - {90, 150}:
        raise ValueError("characteristic matrix is defined for rules 90 and 150 only")
    n = len(rv)
    t = np.zeros((n, n), dtype=np.uint8)
    for i, r in enumerate(rv.rules):
        t[i, i] = r == 150
        if i > 0:
            t[i, i - 1] = 1
        if i < n - 1:
            t[i, i + 1] = 1
    if rv.boundary == PERIODIC and n > 1:
        # wrap-around links; for n = 2 they cancel the direct ones
        t[0, n - 1] ^= 1
        t[n - 1, 0] ^= 1
    return t


def _rows(m: np.ndarray) -> list[int]:
    return [pack_cells(row) for row in np.asarray(m, dtype=np.uint8)]


def _mul(a: list[int], b: list[int], n: int) -> list[int]:
    out = []
    for row in a:
        acc = 0
        for j in range(n):
            if (row >> (n - 1 - j)) & 1:
                acc ^= b[j]
        out.append(acc)
    return out


def _pow(a: list[int], e: int, n: int) -> list[int]:
    result = [1 << (n - 1 - i) for i in range(n)]
    base = a
    while e:
        if e & 1:
            result = _mul(result, base, n)
        base = _mul(base, base, n)
        e >>= 1
    return result


def gf2_matpow(m: np.ndarray, e: int) -> np.ndarray:
    n = m.shape[0]
    return np.array([unpack_cells(r, n) for r in _pow(_rows(m), e, n)], dtype=np.uint8)


def gf2_rank(m: np.ndarray) -> int:
    rows = _rows(m)
    rank = 0
    ncols = np.asarray(m).shape[1]
    for bit in reversed(range(ncols)):
        pivot = next((r for r in rows if (r >> bit) & 1), None)
        if pivot is None:
            continue
        rows = [r ^ pivot if (r >> bit) & 1 else r for r in rows if r is not pivot]
        rank += 1
    return rank


def is_maximal_length(t: np.ndarray) -> bool:
    """True iff T has multiplicative order 2^n - 1 in GL(n, 2)."""
    t = np.asarray(t, dtype=np.uint8)
    n = t.shape[0]
    if t.shape != (n, n) or n == 0 or n > 64:
        raise ValueError("need a square matrix with 1 <= n <= 64")
    rows = _rows(t)
    ident = [1 << (n - 1 - i) for i in range(n)]
    order = 2**n - 1
    if _pow(rows, order, n) != ident:
        return False
    return all(_pow(rows, order // p, n) != ident for p in prime_factors(order))


# -- generators ---------------------------------------------------------------

class _EcaGenerator(Generator):
    rule_vector: RuleVector

    def _seed(self, seed):
        self.stepper = PackedStepper(self.rule_vector)
        self.x = seed_config(seed, len(self.rule_vector))

    @property
    def state(self):
        return (self.x,)

    @property
    def cells(self) -> np.ndarray:
        return unpack_cells(self.x, len(self.rule_vector))


@register
class Rule30(_EcaGenerator):
    ID = GeneratorId("CA", "rule30", 32)
    divisor = 2**32
    rule_vector = RuleVector.uniform(30, 101, PERIODIC)
    description = "rule 30 on a 101-cell ring, central 32-cell window each step"
    shift = 101 - 34 - 32

    def _step(self):
        self.x = self.stepper(self.x)
        return (self.x >> self.shift) & 0xFFFFFFFF


@register
class Rule30Center(_EcaGenerator):
    ID = GeneratorId("CA", "rule30-center", 32)
    divisor = 2**32
    rule_vector = RuleVector.uniform(30, 101, PERIODIC)
    description = "rule 30 on a 101-cell ring, centre cell over 32 steps per word"
    shift = 101 - 1 - 50

    def _step(self):
        return int(self._bulk(1)[0])

    def _bulk(self, n):
        # Inlined rule-30 ring step; this generator needs 32 steps per word.
        x, shift = self.x, self.shift
        top, full = 100, (1 << 101) - 1
        bits = bytearray(32 * n)
        for i in range(32 * n):
            x = ((x >> 1) | ((x & 1) << top)) ^ (x | ((x << 1) & full) | (x >> top))
            bits[i] = (x >> shift) & 1
        self.x = x
        packed = np.packbits(np.frombuffer(bytes(bits), dtype=np.uint8))
        return packed.view(">u4").astype(np.uint64)


@register
class Hybrid3045(_EcaGenerator):
    ID = GeneratorId("CA", "hybrid30-45", 32)
    divisor = 2**32
    rule_vector = RuleVector(HYBRID_30_45, PERIODIC)
    description = "32-cell periodic hybrid CA with alternating rules 30 and 45"

    def _step(self):
        self.x = self.stepper(self.x)
        return self.x


@register
class MaxLengthG0(_EcaGenerator):
    ID = GeneratorId("CA", "maxlen-g0", 32)
    divisor = 2**32
    rule_vector = RuleVector(MAXLEN_RULES, NULL)
    description = "maximal-length 90/150 CA, null boundary, whole configuration per step"

    def _step(self):
        self.x = self.stepper(self.x)
        return self.x


def _even_cells(x: int) -> int:
    """Cells 0, 2, ..., 30 of a packed 32-cell configuration, in order."""
    y = (x >> 1) & 0x55555555
    y = (y | (y >> 1)) & 0x33333333
    y = (y | (y >> 2)) & 0x0F0F0F0F
    y = (y | (y >> 4)) & 0x00FF00FF
    return (y | (y >> 8)) & 0x0000FFFF


@register
class MaxLengthG1(_EcaGenerator):
    ID = GeneratorId("CA", "maxlen-g1", 32)
    divisor = 2**32
    rule_vector = RuleVector(MAXLEN_RULES, NULL)
    description = "maximal-length 90/150 CA, site spacing 1, two steps per word"

    def _step(self):
        first = self.stepper(self.x)
        self.x = self.stepper(first)
        return (_even_cells(first) << 16) | _even_cells(self.x)


@register
class NonLinear45(_EcaGenerator):
    ID = GeneratorId("CA", "nonlinear", 45)
    divisor = 2**45
    rule_vector = RuleVector(NONLINEAR_RULES, NULL)
    description = "45-cell null-boundary non-linear hybrid CA, 45-bit words"

    def _step(self):
        self.x = self.stepper(self.x)
        return self.x


class _Ca3Generator(Generator):
    cells_n: int
    window: int
    base = 3

    def _seed(self, seed):
        self.c = unpack_cells(seed_config(seed, self.cells_n), self.cells_n).astype(np.int64)
        self.table = np.array([int(ch) for ch in reversed(CA3_RULE)], dtype=np.int64)
        self.start = (self.cells_n - self.window) // 2
        self.weights = [3**k for k in reversed(range(self.window))]

    @property
    def digits(self):
        return self.window

    @property
    def state(self):
        return tuple(int(v) for v in self.c)

    def _bulk(self, n):
        # Ring held in a padded buffer so each step is a few in-place ops.
        m, w, s = self.cells_n, self.window, self.start
        buf = np.empty(m + 2, dtype=np.int64)
        buf[1:-1] = self.c
        idx = np.empty(m, dtype=np.int64)
        tmp = np.empty(m, dtype=np.int64)
        left, mid, right = buf[:-2], buf[1:-1], buf[2:]
        rows = np.empty((n, w), dtype=np.int64)
        table = self.table
        for i in range(n):
            buf[0] = buf[m]
            buf[m + 1] = buf[1]
            np.multiply(left, 9, out=idx)
            np.multiply(mid, 3, out=tmp)
            idx += tmp
            idx += right
            table.take(idx, out=mid)
            rows[i] = mid[s:s + w]
        self.c = mid.copy()
        out = np.zeros(n, dtype=np.uint64)
        for col in range(w):
            out = out * np.uint64(3) + rows[:, col].astype(np.uint64)
        return out

    def _step(self):
        return int(self._bulk(1)[0])


@register
class Ca3Small(_Ca3Generator):
    ID = GeneratorId("CA", "ca3-32", 32)
    divisor = 3**20
    cells_n, window = 51, 20
    description = "3-state periodic CA, n = 51, 20-digit ternary window"


@register
class Ca3Large(_Ca3Generator):
    ID = GeneratorId("CA", "ca3-64", 64)
    divisor = 3**40
    cells_n, window = 101, 40
    description = "3-state periodic CA, n = 101, 40-digit ternary window"
