"""Uniform generator abstraction, seeding, bit emission and .bin export."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, Union

import numpy as np

log = logging.getLogger("prngsuite")

MASK32 = 0xFFFFFFFF
MASK64 = 0xFFFFFFFFFFFFFFFF

FAMILIES = ("LCG", "LFSR", "CA")

# Seeds hard-coded in the original C sources of the tested generators.
PAPER_SEEDS = (7, 1234, 12345, 19650218, 123456789123456789)

# External-suite input sizes.
DIEHARD_BYTES = 11_534_336          # 11.5 MiB
RABBIT_BITS = 10_000_000
NIST_BYTES = 125_000_000            # 1000 sequences of 10**6 bits


class CatalogError(KeyError):
    """Raised for a generator name that is not in the catalog."""


@dataclass(frozen=True)
class GeneratorId:
    family: str
    name: str
    word_width: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if not 1 <= self.word_width <= 64:
            raise ValueError("word_width must be in 1..64")


class Generator:
    """A seeded, stateful generator emitting fixed-width words.

    Subclasses set ``ID`` and ``divisor`` and implement ``_seed`` and
    ``_step``. ``_bulk`` may be overridden with a vectorised path; it must
    produce exactly the words ``_step`` would.
    """

    ID: GeneratorId
    divisor: int = 0          # normalisation divisor for next_unit
    base: int = 2             # digit alphabet for space-time diagrams
    digits: int = 0           # digits per word in ``base`` (0: word_width)
    description: str = ""

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed <= MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.steps_taken = 0
        self._seed(seed)

    # -- subclass hooks -------------------------------------------------
    def _seed(self, seed: int) -> None:
        raise NotImplementedError

    def _step(self) -> int:
        raise NotImplementedError

    def _bulk(self, n: int) -> np.ndarray:
        step = self._step
        return np.fromiter((step() for _ in range(n)), dtype=np.uint64, count=n)

    @property
    def state(self) -> tuple:
        raise NotImplementedError

    # -- public API -----------------------------------------------------
    @property
    def id(self) -> GeneratorId:
        return self.ID

    @property
    def name(self) -> str:
        return self.ID.name

    @property
    def word_width(self) -> int:
        return self.ID.word_width

    @property
    def digit_count(self) -> int:
        return self.digits or self.ID.word_width

    def next_word(self) -> int:
        word = self._step()
        self.steps_taken += 1
        return word

    def next_unit(self) -> float:
        return to_unit(self.next_word(), self.divisor)

    def words(self, n: int) -> np.ndarray:
        """The next ``n`` words as a uint64 array."""
        if n < 0:
            raise ValueError("n must be non-negative")
        out = self._bulk(n) if n else np.zeros(0, dtype=np.uint64)
        self.steps_taken += n
        return out

    def units(self, n: int) -> np.ndarray:
        return np.array([to_unit(int(w), self.divisor) for w in self.words(n)])

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} seed={self.seed} steps={self.steps_taken}>"


def to_unit(word: int, divisor: int) -> float:
    """``word / divisor`` truncated to 53 bits, so the result is always < 1.

    Exact whenever the divisor is a power of two no larger than 2**53.
    """
    return ((int(word) << 53) // divisor) * 2.0 ** -53


# -- catalog ----------------------------------------------------------------

_REGISTRY: dict[str, type[Generator]] = {}


def register(cls: type[Generator]) -> type[Generator]:
    name = cls.ID.name
    if name in _REGISTRY:
        raise ValueError(f"duplicate catalog entry {name}")
    _REGISTRY[name] = cls
    # Keep family order fixed whichever family module happens to be imported first.
    ordered = sorted(_REGISTRY.items(), key=lambda kv: FAMILIES.index(kv[1].ID.family))
    _REGISTRY.clear()
    _REGISTRY.update(ordered)
    return cls


def _load_catalog() -> None:
    # Family modules register themselves on import.
    from . import lcg, lfsr, ca  # noqa: F401  (catalog order: LCG, LFSR, CA)


def catalog() -> list[GeneratorId]:
    _load_catalog()
    return [cls.ID for cls in _REGISTRY.values()]


def names() -> list[str]:
    _load_catalog()
    return list(_REGISTRY)


def generator_class(name: str) -> type[Generator]:
    _load_catalog()
    try:
        return _REGISTRY[name.lower()]
    except KeyError:
        raise CatalogError(f"unknown generator {name!r}; known: {', '.join(_REGISTRY)}") from None


def create(name: Union[str, GeneratorId], seed: int) -> Generator:
    if isinstance(name, GeneratorId):
        name = name.name
    return generator_class(name)(seed)


def remap_zero(value: int, replacement: int = 1, what: str = "state") -> int:
    if value == 0:
        log.info("zero %s remapped to %d", what, replacement)
        return replacement
    return value


# -- bit streams ------------------------------------------------------------

@dataclass(eq=False)
class BitStream:
    """An ordered bit sequence (uint8 array of 0/1) with its word framing."""

    bits: np.ndarray
    framing: int = 8
    source: str = field(default="")

    def __post_init__(self):
        self.bits = np.ascontiguousarray(self.bits, dtype=np.uint8)

    def __len__(self) -> int:
        return int(self.bits.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitStream):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __getitem__(self, item) -> "BitStream":
        if isinstance(item, slice):
            return BitStream(self.bits[item], self.framing, self.source)
        return int(self.bits[item])

    @classmethod
    def from_string(cls, text: str) -> "BitStream":
        text = "".join(ch for ch in text if ch in "01")
        return cls(np.frombuffer(text.encode(), dtype=np.uint8) - ord("0"), framing=1)

    def to_string(self) -> str:
        return (self.bits + ord("0")).tobytes().decode()

    def packed(self) -> bytes:
        """MSB-first bytes, final partial byte padded with zero bits."""
        return np.packbits(self.bits).tobytes()

    def chunks(self, size: int) -> Iterable["BitStream"]:
        for start in range(0, len(self) - size + 1, size):
            yield self[start:start + size]


def words_to_bits(words: np.ndarray, width: int) -> np.ndarray:
    """MSB-first concatenation of ``width``-bit words."""
    words = np.asarray(words, dtype=np.uint64)
    if width == 64:
        as_bytes = words.astype(">u8").view(np.uint8)
        return np.unpackbits(as_bytes)
    if width == 32:
        as_bytes = words.astype(">u4").view(np.uint8)
        return np.unpackbits(as_bytes)
    bits = np.unpackbits(words.astype(">u8").view(np.uint8)).reshape(-1, 64)
    return np.ascontiguousarray(bits[:, 64 - width:]).ravel()


def emit_bits(g: Generator, n: int) -> BitStream:
    """The next ``n`` bits of ``g``: whole words packed MSB-first, truncated."""
    if n < 0:
        raise ValueError("bit count must be non-negative")
    width = g.word_width
    nwords = -(-n // width)
    bits = words_to_bits(g.words(nwords), width)[:n]
    return BitStream(bits, framing=width, source=f"{g.name}:{g.seed}")


Sink = Union[str, Path, BinaryIO]


def dump_bin(stream: BitStream, sink: Sink) -> int:
    """Write ``stream`` as raw MSB-first bytes with no header; returns bytes written."""
    data = stream.packed()
    if len(stream) % 8:
        log.info("stream of %d bits zero-padded to %d bytes", len(stream), len(data))
    if isinstance(sink, (str, Path)):
        Path(sink).write_bytes(data)
    else:
        sink.write(data)
    return len(data)


def load_bin(source: Union[Sink, bytes], nbits: int | None = None, framing: int = 8) -> BitStream:
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
    else:
        data = source.read()
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    if nbits is not None:
        if nbits > bits.size:
            raise ValueError(f"requested {nbits} bits but source holds {bits.size}")
        bits = bits[:nbits]
    return BitStream(bits, framing=framing)


def write_generator_bin(g: Generator, sink: Sink, nbytes: int) -> int:
    """Stream exactly ``nbytes`` of ``g`` output to ``sink`` in bounded memory."""
    chunk_bits = 8 * 65_536 * g.word_width  # whole words and whole bytes
    written = 0
    out = open(sink, "wb") if isinstance(sink, (str, Path)) else sink
    try:
        while written < nbytes:
            want = min(chunk_bits, 8 * (nbytes - written))
            # Only the last chunk may end mid-word; the generator is discarded after.
            data = emit_bits(g, want).packed()
            out.write(data)
            written += len(data)
    finally:
        if out is not sink:
            out.close()
    return written


def target_bytes(target: str) -> int:
    sizes = {"diehard": DIEHARD_BYTES, "rabbit": RABBIT_BITS // 8, "nist": NIST_BYTES}
    try:
        return sizes[target]
    except KeyError:
        raise ValueError(f"unknown target {target!r}; expected one of {sorted(sizes)}") from None

