"""LFSR-class generators over GF(2).

BSD random(), the combined Tausworthe generators (Taus88, LFSR113,
LFSR258), WELL512a/1024a, the xorshift variants and both Mersenne Twisters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import MASK32, MASK64, Generator, GeneratorId, register, remap_zero


def _rotate_seed32(seed: int) -> int:
    return seed & MASK32


# -- BSD random() -------------------------------------------------------------

BSD_DEG, BSD_SEP = 31, 3
BSD_DISCARD = 310


def bsd_register(seed: int) -> list[int]:
    """Initial 34-word window of the TYPE_3 additive register (glibc srandom).

    The 31 seed words come from a Park-Miller walk done with C's truncating
    division on a signed 32-bit start value.
    """
    word = seed & MASK32
    if word == 0:
        word = 1
    if word >= 2**31:
        word -= 2**32  # srandom stores the seed in an int32_t
    r = [word]
    for _ in range(1, BSD_DEG):
        hi = int(word / 127773)  # C division truncates toward zero
        lo = word - hi * 127773
        word = 16807 * lo - 2836 * hi
        if word < 0:
            word += 2147483647
        r.append(word)
    r = [v & MASK32 for v in r]
    r.extend(r[:BSD_SEP])
    return r


def bsd_random_next(window: list[int]) -> tuple[list[int], int]:
    """Additive step r_i = r_{i-31} + r_{i-3} mod 2^32; word is r_i >> 1."""
    v = (window[-31] + window[-3]) & MASK32
    window.append(v)
    del window[0]
    return window, v >> 1


@register
class BsdRandom(Generator):
    ID = GeneratorId("LFSR", "random", 32)
    divisor = 2**31
    description = "glibc random() TYPE_3 additive feedback, 31-bit value in a 32-bit word"

    def _seed(self, seed):
        self.window = bsd_register(seed)
        for _ in range(BSD_DISCARD):
            bsd_random_next(self.window)

    @property
    def state(self):
        return tuple(self.window[-BSD_DEG:])

    def _step(self):
        w = self.window
        v = (w[-31] + w[-3]) & MASK32
        w.append(v)
        del w[0]
        return v >> 1

    def _bulk(self, n):
        w = self.window
        start = len(w)
        for i in range(start, start + n):
            w.append((w[i - 31] + w[i - 3]) & MASK32)
        out = np.array(w[start:], dtype=np.uint64) >> np.uint64(1)
        self.window = w[-34:]
        return out


# -- combined Tausworthe ------------------------------------------------------

@dataclass(frozen=True)
class TausComponent:
    """One Tausworthe component: z' = ((z & mask) << k) ^ (((z << q) ^ z) >> s).

    ``min_seed`` is the smallest register value that keeps the significant
    bits nonzero.
    """

    q: int
    s: int
    k: int
    mask: int
    width: int = 32
    min_seed: int = 2

    @property
    def order(self) -> int:
        # Bits of the register that carry the recurrence.
        return self.width - (self.mask ^ ((1 << self.width) - 1)).bit_length()

    def step(self, z: int) -> int:
        full = (1 << self.width) - 1
        b = (((z << self.q) & full) ^ z) >> self.s
        return (((z & self.mask) << self.k) & full) ^ b

    def normalise_seed(self, z: int) -> int:
        z &= (1 << self.width) - 1
        return z + self.min_seed if z < self.min_seed else z


TAUS88 = (
    TausComponent(13, 19, 12, 0xFFFFFFFE, 32, 2),
    TausComponent(2, 25, 4, 0xFFFFFFF8, 32, 8),
    TausComponent(3, 11, 17, 0xFFFFFFF0, 32, 16),
)
LFSR113 = (
    TausComponent(6, 13, 18, 4294967294, 32, 2),
    TausComponent(2, 27, 2, 4294967288, 32, 8),
    TausComponent(13, 21, 7, 4294967280, 32, 16),
    TausComponent(3, 12, 13, 4294967168, 32, 128),
)
LFSR258 = (
    TausComponent(1, 53, 10, 2**64 - 2, 64, 2),
    TausComponent(24, 50, 5, 2**64 - 512, 64, 512),
    TausComponent(3, 23, 29, 2**64 - 4096, 64, 4096),
    TausComponent(5, 24, 23, 2**64 - 131072, 64, 131072),
    TausComponent(3, 33, 8, 2**64 - 8388608, 64, 8388608),
)


def taus_combined_next(components: Sequence[TausComponent],
                       registers: Sequence[int]) -> tuple[tuple[int, ...], int]:
    regs = tuple(c.step(z) for c, z in zip(components, registers))
    word = 0
    for z in regs:
        word ^= z
    return regs, word


class _Taus(Generator):
    components: tuple[TausComponent, ...]

    def _seed(self, seed):
        width = self.components[0].width
        z = seed & ((1 << width) - 1)
        self.regs = tuple(c.normalise_seed(z) for c in self.components)

    @property
    def state(self):
        return self.regs

    def _step(self):
        self.regs, word = taus_combined_next(self.components, self.regs)
        return word


@register
class Taus88(_Taus):
    ID = GeneratorId("LFSR", "taus88", 32)
    divisor = 2**32
    components = TAUS88
    description = "L'Ecuyer three-component combined Tausworthe"


@register
class Lfsr113(_Taus):
    ID = GeneratorId("LFSR", "lfsr113", 32)
    divisor = 2**32
    components = LFSR113
    description = "L'Ecuyer four-component combined Tausworthe, period about 2^113"


@register
class Lfsr258(_Taus):
    ID = GeneratorId("LFSR", "lfsr258", 64)
    divisor = 2**64
    components = LFSR258
    description = "L'Ecuyer five-component 64-bit combined Tausworthe, period about 2^258"


# -- WELL ---------------------------------------------------------------------

def _m0pos(t, v):
    return v ^ (v >> t)


def _m0neg(t, v):
    return v ^ ((v << t) & MASK32)


def well512a_next(regs: list[int], i: int) -> tuple[int, int]:
    """One WELL512a transition in place; returns (new index, word)."""
    z0 = regs[(i + 15) & 15]
    z1 = _m0neg(16, regs[i]) ^ _m0neg(15, regs[(i + 13) & 15])
    z2 = _m0pos(11, regs[(i + 9) & 15])
    v1 = z1 ^ z2
    regs[i] = v1
    v0 = (_m0neg(2, z0) ^ _m0neg(18, z1) ^ ((z2 << 28) & MASK32)
          ^ (v1 ^ ((v1 << 5) & 0xDA442D24)))
    i = (i + 15) & 15
    regs[i] = v0
    return i, v0


def well1024a_next(regs: list[int], i: int) -> tuple[int, int]:
    z0 = regs[(i + 31) & 31]
    z1 = regs[i] ^ _m0pos(8, regs[(i + 3) & 31])
    z2 = _m0neg(19, regs[(i + 24) & 31]) ^ _m0neg(14, regs[(i + 10) & 31])
    regs[i] = z1 ^ z2
    v0 = _m0neg(11, z0) ^ _m0neg(7, z1) ^ _m0neg(13, z2)
    i = (i + 31) & 31
    regs[i] = v0
    return i, v0


class _Well(Generator):
    size: int
    transition = staticmethod(well512a_next)

    def _seed(self, seed):
        word = remap_zero(seed & MASK32, what="WELL seed word")
        self.regs = [word] * self.size
        self.i = 0

    @property
    def state(self):
        return tuple(self.regs[self.i:] + self.regs[:self.i])

    def _step(self):
        self.i, word = self.transition(self.regs, self.i)
        return word


@register
class Well512a(_Well):
    ID = GeneratorId("LFSR", "well512a", 32)
    divisor = 2**32
    size = 16
    transition = staticmethod(well512a_next)
    description = "WELL512a (k = 512, w = 32, n = 16)"


@register
class Well1024a(_Well):
    ID = GeneratorId("LFSR", "well1024a", 32)
    divisor = 2**32
    size = 32
    transition = staticmethod(well1024a_next)
    description = "WELL1024a (k = 1024, w = 32, n = 32)"


# -- xorshift -----------------------------------------------------------------

def xorshift_step(x: int, a: int, b: int, c: int, width: int = 32) -> int:
    """Left ``a``, right ``b``, left ``c`` xorshift on a ``width``-bit word."""
    mask = (1 << width) - 1
    x ^= (x << a) & mask
    x ^= x >> b
    x ^= (x << c) & mask
    return x


XORSHIFT32_SHIFTS = (13, 17, 5)
XORSHIFT64STAR_MULT = 2685821657736338717
XORSHIFT1024STAR_MULT = 1181783497276652981


def xorshift32_next(x: int) -> tuple[int, int]:
    x = xorshift_step(x, *XORSHIFT32_SHIFTS)
    return x, x


def xorshift64star_next(x: int) -> tuple[int, int]:
    x ^= x >> 12
    x ^= (x << 25) & MASK64
    x ^= x >> 27
    return x, (x * XORSHIFT64STAR_MULT) & MASK64


def xorshift1024star_next(s: list[int], p: int) -> tuple[int, int]:
    """In-place step on the 16 lanes; returns (new rotation index, word)."""
    s0 = s[p]
    p = (p + 1) & 15
    s1 = s[p]
    s1 ^= (s1 << 31) & MASK64
    s[p] = s1 ^ s0 ^ (s1 >> 11) ^ (s0 >> 30)
    return p, (s[p] * XORSHIFT1024STAR_MULT) & MASK64


def xorshift128plus_next(lanes: tuple[int, int]) -> tuple[tuple[int, int], int]:
    s1, s0 = lanes
    s1 ^= (s1 << 23) & MASK64
    new1 = s1 ^ s0 ^ (s1 >> 17) ^ (s0 >> 26)
    return (s0, new1), (new1 + s0) & MASK64


@register
class Xorshift32(Generator):
    ID = GeneratorId("LFSR", "xorshift32", 32)
    divisor = 2**32
    description = "Marsaglia xorshift, triple (13, 17, 5)"

    def _seed(self, seed):
        self.x = remap_zero(seed & MASK32, what="xorshift32 state")

    @property
    def state(self):
        return (self.x,)

    def _step(self):
        x = self.x
        x ^= (x << 13) & MASK32
        x ^= x >> 17
        x ^= (x << 5) & MASK32
        self.x = x
        return x


@register
class Xorshift64Star(Generator):
    ID = GeneratorId("LFSR", "xorshift64star", 64)
    divisor = 2**64
    description = "xorshift64* (shifts 12, 25, 27, then a 64-bit multiply)"

    def _seed(self, seed):
        self.x = remap_zero(seed, what="xorshift64* state")

    @property
    def state(self):
        return (self.x,)

    def _step(self):
        self.x, word = xorshift64star_next(self.x)
        return word


@register
class Xorshift1024Star(Generator):
    ID = GeneratorId("LFSR", "xorshift1024star", 64)
    divisor = 2**64
    description = "xorshift1024* with 16 lanes and a rotating index"

    def _seed(self, seed):
        self.s = [remap_zero(seed, what="xorshift1024* lane")] * 16
        self.p = 0

    @property
    def state(self):
        return (tuple(self.s), self.p)

    def _step(self):
        self.p, word = xorshift1024star_next(self.s, self.p)
        return word


@register
class Xorshift128Plus(Generator):
    ID = GeneratorId("LFSR", "xorshift128plus", 64)
    divisor = 2**64
    description = "xorshift128+ (shifts 23, 17, 26), output is the lane sum"

    def _seed(self, seed):
        v = remap_zero(seed, what="xorshift128+ lane")
        self.lanes = (v, v)

    @property
    def state(self):
        return self.lanes

    def _step(self):
        self.lanes, word = xorshift128plus_next(self.lanes)
        return word


# -- Mersenne Twister ---------------------------------------------------------

@dataclass(frozen=True)
class MtParams:
    w: int
    n: int
    m: int
    r: int
    a: int
    u: int
    d: int
    s: int
    b: int
    t: int
    c: int
    l: int
    f: int  # seed-expansion multiplier

    @property
    def mask(self) -> int:
        return (1 << self.w) - 1

    @property
    def lower(self) -> int:
        return (1 << self.r) - 1

    @property
    def upper(self) -> int:
        return self.mask ^ self.lower


MT32 = MtParams(32, 624, 397, 31, 0x9908B0DF, 11, 0xFFFFFFFF, 7, 0x9D2C5680,
                15, 0xEFC60000, 18, 1812433253)
MT64 = MtParams(64, 312, 156, 31, 0xB5026F5AA96619E9, 29, 0x5555555555555555,
                17, 0x71D67FFFEDA60000, 37, 0xFFF7EEE000000000, 43,
                6364136223846793005)


def mt_init(seed: int, p: MtParams) -> list[int]:
    """Reference index-fill seed expansion (init_genrand)."""
    mt = [seed & p.mask]
    for i in range(1, p.n):
        prev = mt[-1]
        mt.append((p.f * (prev ^ (prev >> (p.w - 2))) + i) & p.mask)
    return mt


def mt_temper(x: int, p: MtParams) -> int:
    x ^= (x >> p.u) & p.d
    x ^= (x << p.s) & p.b & p.mask
    x ^= (x << p.t) & p.c & p.mask
    x ^= x >> p.l
    return x


def _undo_right(y: int, shift: int, mask: int, w: int) -> int:
    # y = x ^ ((x >> shift) & mask); the top `shift` bits are already right
    # and each pass recovers `shift` more.
    x = y
    for _ in range(-(-w // shift) - 1):
        x = y ^ ((x >> shift) & mask)
    return x


def _undo_left(y: int, shift: int, mask: int, w: int) -> int:
    full = (1 << w) - 1
    x = y
    for _ in range(-(-w // shift) - 1):
        x = y ^ ((x << shift) & mask & full)
    return x


def mt_untemper(y: int, p: MtParams) -> int:
    y = _undo_right(y, p.l, p.mask, p.w)
    y = _undo_left(y, p.t, p.c, p.w)
    y = _undo_left(y, p.s, p.b, p.w)
    return _undo_right(y, p.u, p.d, p.w)


def mt_regenerate(mt: np.ndarray, p: MtParams) -> np.ndarray:
    """Recompute all n state words in place (vectorised in three slabs)."""
    n, m = p.n, p.m
    dt = mt.dtype.type
    upper, lower, a = dt(p.upper), dt(p.lower), dt(p.a)
    one = dt(1)

    def twist(lo, hi, src):
        y = (mt[lo:hi] & upper) | (mt[lo + 1:hi + 1] & lower)
        mag = np.where(y & one, a, dt(0))
        mt[lo:hi] = src ^ (y >> one) ^ mag

    k = n - m
    twist(0, k, mt[m:n].copy())
    lo = k
    while lo < n - 1:
        hi = min(lo + k, n - 1)
        twist(lo, hi, mt[lo - k:hi - k].copy())
        lo = hi
    y = (mt[n - 1] & upper) | (mt[0] & lower)
    mt[n - 1] = mt[m - 1] ^ (y >> one) ^ (a if y & one else dt(0))
    return mt


def mt_temper_array(x: np.ndarray, p: MtParams) -> np.ndarray:
    dt = x.dtype.type
    x = x ^ ((x >> dt(p.u)) & dt(p.d))
    x = x ^ ((x << dt(p.s)) & dt(p.b))
    x = x ^ ((x << dt(p.t)) & dt(p.c))
    return x ^ (x >> dt(p.l))


class _Mt(Generator):
    params: MtParams
    dtype: type

    def _seed(self, seed):
        self.mt = np.array(mt_init(seed, self.params), dtype=self.dtype)
        self.index = self.params.n
        self.out = None

    @property
    def state(self):
        return (tuple(int(v) for v in self.mt), self.index)

    def _refill(self):
        mt_regenerate(self.mt, self.params)
        self.out = mt_temper_array(self.mt, self.params).astype(np.uint64)
        self.index = 0

    def _step(self):
        if self.index >= self.params.n:
            self._refill()
        word = int(self.out[self.index])
        self.index += 1
        return word

    def _bulk(self, n):
        parts = []
        need = n
        while need:
            if self.index >= self.params.n:
                self._refill()
            take = min(need, self.params.n - self.index)
            parts.append(self.out[self.index:self.index + take])
            self.index += take
            need -= take
        return np.concatenate(parts)


@register
class Mt19937(_Mt):
    ID = GeneratorId("LFSR", "mt19937-32", 32)
    divisor = 2**32
    params = MT32
    dtype = np.uint32
    description = "32-bit Mersenne Twister, (w, n, m, r) = (32, 624, 397, 31)"


@register
class Mt19937_64(_Mt):
    ID = GeneratorId("LFSR", "mt19937-64", 64)
    divisor = 2**64
    params = MT64
    dtype = np.uint64
    description = "64-bit Mersenne Twister, (w, n, m, r) = (64, 312, 156, 31)"
