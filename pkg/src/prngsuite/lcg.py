"""LCG-class generators: plain LCGs, the minstd MCG, MRG31k3p and PCG-32.

Also holds the affine jump-ahead and the Hull-Dobell full-period check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .arith import prime_factors
from .core import MASK32, MASK64, Generator, GeneratorId, register, remap_zero


@dataclass(frozen=True)
class LcgParams:
    a: int
    c: int
    m: int

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError("modulus must be positive")
        if not (0 <= self.a < self.m and 0 <= self.c < self.m):
            raise ValueError("need 0 <= a < m and 0 <= c < m")


MMIX = LcgParams(6364136223846793005, 1442695040888963407, 2**64)
RAND = LcgParams(1103515245, 12345, 2**31)
LRAND48 = LcgParams(25214903917, 11, 2**48)
MINSTD = LcgParams(48271, 0, 2**31 - 1)
BORLAND = LcgParams(22695477, 1, 2**32)
PCG_MULT = 6364136223846793005
PCG_INC = 1


def lcg_next(state: int, p: LcgParams) -> tuple[int, int]:
    """One step of x' = (a x + c) mod m; the raw word is the new state."""
    state = (p.a * state + p.c) % p.m
    return state, state


def affine_power(p: LcgParams, v: int) -> tuple[int, int]:
    """(A, C) with x_{n+v} = (A x_n + C) mod m, by repeated squaring."""
    if v < 0:
        raise ValueError("step count must be non-negative")
    acc_a, acc_c = 1, 0
    sq_a, sq_c = p.a % p.m, p.c % p.m
    while v:
        if v & 1:
            acc_a, acc_c = (sq_a * acc_a) % p.m, (sq_a * acc_c + sq_c) % p.m
        sq_a, sq_c = (sq_a * sq_a) % p.m, (sq_a * sq_c + sq_c) % p.m
        v >>= 1
    return acc_a, acc_c


def jump_ahead(state: int, p: LcgParams, v: int) -> int:
    a, c = affine_power(p, v)
    return (a * state + c) % p.m


def hull_dobell_check(p: LcgParams) -> bool:
    """True iff the LCG has full period m from every start state."""
    if p.m == 1:
        return True
    if math.gcd(p.c, p.m) != 1:
        return False
    if p.m % 4 == 0 and (p.a - 1) % 4:
        return False
    return all((p.a - 1) % q == 0 for q in prime_factors(p.m))


def lcg_states(state: int, p: LcgParams, n: int, lanes: int = 4096) -> np.ndarray:
    """The ``n`` states following ``state``, computed in parallel lanes.

    Requires m <= 2**64 and, for moduli that are not powers of two,
    m < 2**32 so lane products fit in 64 bits.
    """
    pow2 = p.m & (p.m - 1) == 0
    if not pow2 and p.m >= 2**32:
        raise ValueError("vectorised path needs a power-of-two modulus or m < 2**32")
    lanes = max(1, min(n, lanes))
    first = np.empty(lanes, dtype=np.uint64)
    x = state
    for i in range(lanes):
        x = (p.a * x + p.c) % p.m
        first[i] = x
    out = np.empty(n, dtype=np.uint64)
    out[:lanes] = first
    a_k, c_k = affine_power(p, lanes)
    a_k, c_k = np.uint64(a_k), np.uint64(c_k)
    mask = np.uint64((p.m - 1) & MASK64)
    cur = first
    pos = lanes
    while pos < n:
        if pow2:
            cur = cur * a_k + c_k
            if p.m != 2**64:
                cur &= mask
        else:
            cur = (cur * a_k + c_k) % np.uint64(p.m)
        take = min(lanes, n - pos)
        out[pos:pos + take] = cur[:take]
        pos += take
    return out


class _Lcg(Generator):
    params: LcgParams

    @property
    def state(self) -> tuple:
        return (self.x,)

    def _output(self, x: int) -> int:
        return x

    def _output_array(self, xs: np.ndarray) -> np.ndarray:
        return xs

    def _step(self) -> int:
        self.x = (self.params.a * self.x + self.params.c) % self.params.m
        return self._output(self.x)

    def _bulk(self, n: int) -> np.ndarray:
        xs = lcg_states(self.x, self.params, n)
        self.x = int(xs[-1])
        return self._output_array(xs)

    def jump(self, v: int) -> None:
        """Advance the state by ``v`` steps without producing output."""
        self.x = jump_ahead(self.x, self.params, v)
        self.steps_taken += v


@register
class Mmix(_Lcg):
    ID = GeneratorId("LCG", "mmix", 64)
    params = MMIX
    divisor = 2**64
    description = "Knuth's MMIX LCG, m = 2^64"

    def _seed(self, seed):
        self.x = seed


@register
class MinStd(_Lcg):
    ID = GeneratorId("LCG", "minstd", 32)
    params = MINSTD
    divisor = MINSTD.m
    description = "C++11 minstd_rand MCG, a = 48271, m = 2^31 - 1 (31-bit value in a 32-bit word)"

    def _seed(self, seed):
        self.x = remap_zero(seed % MINSTD.m, what="minstd state")


@register
class Borland(_Lcg):
    ID = GeneratorId("LCG", "borland", 32)
    params = BORLAND
    divisor = 2**32
    description = "Borland LCG, a = 22695477, c = 1, m = 2^32"

    def _seed(self, seed):
        self.x = seed & MASK32


@register
class Rand(_Lcg):
    ID = GeneratorId("LCG", "rand", 32)
    params = RAND
    divisor = 2**31
    description = "ISO C rand() LCG, m = 2^31 (31-bit value in a 32-bit word)"

    def _seed(self, seed):
        self.x = seed % RAND.m


@register
class Lrand48(_Lcg):
    ID = GeneratorId("LCG", "lrand48", 32)
    params = LRAND48
    divisor = 2**31
    description = "SVID lrand48(): high 31 bits of a 48-bit LCG state"

    def _seed(self, seed):
        # srand48 semantics: low 32 bits of the seed above the constant 0x330E.
        self.x = ((seed & MASK32) << 16) | 0x330E

    def _output(self, x):
        return x >> 17

    def _output_array(self, xs):
        return xs >> np.uint64(17)


# -- MRG31k3p -----------------------------------------------------------------

@dataclass(frozen=True)
class MrgComponent:
    """x_n = (a_1 x_{n-1} + ... + a_k x_{n-k}) mod m."""

    m: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not any(self.coeffs):
            raise ValueError("at least one coefficient must be nonzero")

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def step(self, history: Sequence[int]) -> tuple[int, ...]:
        """``history`` is most-recent-first; returns the advanced history."""
        x = sum(a * h for a, h in zip(self.coeffs, history)) % self.m
        return (x,) + tuple(history[:-1])

    def companion(self) -> np.ndarray:
        k = self.order
        mat = np.zeros((k, k), dtype=object)
        mat[0, :] = self.coeffs
        for i in range(1, k):
            mat[i, i - 1] = 1
        return mat


@dataclass(frozen=True)
class MrgParams:
    components: tuple[MrgComponent, ...]
    deltas: tuple[int, ...]

    def __post_init__(self):
        ms = [c.m for c in self.components]
        for i in range(len(ms)):
            for j in range(i + 1, len(ms)):
                if math.gcd(ms[i], ms[j]) != 1:
                    raise ValueError("component moduli must be pairwise coprime")

    def combine(self, newest: Sequence[int]) -> int:
        m1 = self.components[0].m
        return sum(d * x for d, x in zip(self.deltas, newest)) % m1


MRG31K3P = MrgParams(
    components=(
        MrgComponent(2**31 - 1, (0, 2**22, 2**7 + 1)),
        MrgComponent(2**31 - 21069, (2**15, 0, 2**15 + 1)),
    ),
    deltas=(1, -1),
)


def combined_mrg_next(state: Sequence[Sequence[int]], p: MrgParams) -> tuple[tuple, int]:
    new = tuple(comp.step(hist) for comp, hist in zip(p.components, state))
    return new, p.combine([h[0] for h in new])


def mrg31k3p_next(state: Sequence[Sequence[int]]) -> tuple[tuple, int]:
    """Advance both order-3 components; word = (x1 - x2) mod m1."""
    return combined_mrg_next(state, MRG31K3P)


def _matpow_mod(mat: np.ndarray, e: int, m: int) -> np.ndarray:
    k = mat.shape[0]
    result = np.identity(k, dtype=object)
    base = mat.copy()
    while e:
        if e & 1:
            result = result.dot(base) % m
        base = base.dot(base) % m
        e >>= 1
    return result


@register
class Mrg31k3p(Generator):
    ID = GeneratorId("LCG", "mrg31k3p", 32)
    divisor = MRG31K3P.components[0].m
    params = MRG31K3P
    description = "L'Ecuyer-Touzin combined MRG (two order-3 components)"

    def _seed(self, seed):
        hist = []
        for comp in self.params.components:
            s = seed % comp.m
            hist.append((s, s, s) if s else (1, 1, 1))
            if not s:
                remap_zero(0, what="MRG31k3p component")
        self.hist = tuple(hist)

    @property
    def state(self):
        return self.hist

    def _step(self):
        self.hist, word = combined_mrg_next(self.hist, self.params)
        return word

    def _bulk(self, n: int, lanes: int = 2048) -> np.ndarray:
        lanes = max(1, min(n, lanes))
        comps = self.params.components
        newest = np.empty((len(comps), lanes), dtype=np.uint64)
        vecs = [np.empty((c.order, lanes), dtype=np.uint64) for c in comps]
        out = np.empty(n, dtype=np.uint64)
        for i in range(lanes):
            out[i] = self._step()
            for j, h in enumerate(self.hist):
                vecs[j][:, i] = h
                newest[j, i] = h[0]
        saved = self.hist
        jumps = [_matpow_mod(c.companion(), lanes, c.m) for c in comps]
        m1 = np.uint64(comps[0].m)
        pos = lanes
        while pos < n:
            for j, (comp, jm) in enumerate(zip(comps, jumps)):
                mod = np.uint64(comp.m)
                cur = vecs[j]
                nxt = np.zeros_like(cur)
                for r in range(comp.order):
                    acc = np.zeros(lanes, dtype=np.uint64)
                    for col in range(comp.order):
                        coef = int(jm[r, col])
                        if coef:
                            acc = (acc + (cur[col] * np.uint64(coef)) % mod) % mod
                    nxt[r] = acc
                vecs[j] = nxt
            x1, x2 = vecs[0][0], vecs[1][0]
            words = np.where(x1 >= x2, x1 - x2, x1 + m1 - x2)
            take = min(lanes, n - pos)
            out[pos:pos + take] = words[:take]
            pos += take
            saved = tuple(tuple(int(v) for v in vecs[j][:, take - 1]) for j in range(len(comps)))
        self.hist = saved
        return out


# -- PCG-32 ---------------------------------------------------------------------

def pcg32_output(old: int) -> int:
    """XSH-RR: xorshift the high bits, then rotate by the top five bits."""
    xorshifted = (((old >> 18) ^ old) >> 27) & MASK32
    rot = old >> 59
    return ((xorshifted >> rot) | (xorshifted << ((-rot) & 31))) & MASK32


def pcg32_next(state: int, inc: int = PCG_INC) -> tuple[int, int]:
    """Advance the 64-bit LCG; the word is permuted from the pre-advance state."""
    return (state * PCG_MULT + inc) & MASK64, pcg32_output(state)


@register
class Pcg32(Generator):
    ID = GeneratorId("LCG", "pcg32", 32)
    divisor = 2**32
    description = "PCG-XSH-RR 64/32 with increment 1"

    def _seed(self, seed):
        # Reference pcg32_srandom_r(seed, 0): increment stays 1.
        self.inc = PCG_INC
        self.x = (PCG_MULT * 0 + self.inc) & MASK64
        self.x = (self.x + seed) & MASK64
        self.x = (self.x * PCG_MULT + self.inc) & MASK64

    @property
    def state(self):
        return (self.x,)

    def _step(self):
        self.x, word = pcg32_next(self.x, self.inc)
        return word

    def _bulk(self, n):
        params = LcgParams(PCG_MULT, self.inc, 2**64)
        new = lcg_states(self.x, params, n)
        old = np.empty_like(new)
        old[0] = self.x
        old[1:] = new[:-1]
        self.x = int(new[-1])
        xorshifted = (((old >> np.uint64(18)) ^ old) >> np.uint64(27)) & np.uint64(MASK32)
        rot = old >> np.uint64(59)
        left = (np.uint64(32) - rot) & np.uint64(31)
        return ((xorshifted >> rot) | (xorshifted << left)) & np.uint64(MASK32)
