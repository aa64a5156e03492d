"""Lattice scatter sets and space-time diagrams, written as PGM/PPM files."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .core import Generator

# Digit colours: 0 white, 1 black, 2 red.
PALETTE = ((255, 255, 255), (0, 0, 0), (200, 30, 30))


@dataclass
class PointSet:
    dim: int
    points: np.ndarray       # shape (count, dim), values in [0, 1)

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("lattice sets are 2- or 3-dimensional")
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, self.dim)

    def __len__(self):
        return len(self.points)

    def to_text(self) -> str:
        """One point per line, space-separated, 10 significant digits."""
        return "".join(" ".join(f"{v:.10g}" for v in p) + "\n" for p in self.points)


@dataclass
class RasterImage:
    pixels: np.ndarray       # (height, width) digit values
    base: int = 2

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.pixels.ndim != 2:
            raise ValueError("pixel grid must be 2-D")
        if self.pixels.size and int(self.pixels.max()) >= self.base:
            raise ValueError(f"pixel value exceeds palette size {self.base}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def rgb(self) -> np.ndarray:
        return np.array(PALETTE[:self.base], dtype=np.uint8)[self.pixels]

    def encode(self) -> bytes:
        """P5 (greyscale) for two digits, P6 (colour) otherwise; maxval 255."""
        if self.base == 2:
            body = np.where(self.pixels == 1, 0, 255).astype(np.uint8)
            magic = b"P5"
        else:
            body = self.rgb()
            magic = b"P6"
        header = b"%s\n%d %d\n255\n" % (magic, self.width, self.height)
        return header + body.tobytes()

    @property
    def suffix(self) -> str:
        return ".pgm" if self.base == 2 else ".ppm"

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_bytes(self.encode())
        return path


def read_netpbm(path: Union[str, Path]) -> tuple[str, int, int, np.ndarray]:
    """Parse a P5/P6 file written by ``RasterImage.save``."""
    data = Path(path).read_bytes()
    magic, dims, maxval, rest = data.split(b"\n", 3)
    w, h = (int(v) for v in dims.split())
    if int(maxval) != 255:
        raise ValueError("only maxval 255 is supported")
    channels = 1 if magic == b"P5" else 3
    arr = np.frombuffer(rest, dtype=np.uint8).reshape(h, w, channels) if channels == 3 \
        else np.frombuffer(rest, dtype=np.uint8).reshape(h, w)
    return magic.decode(), w, h, arr


def lattice_points(g: Generator, count: int = 1000, dim: int = 2) -> PointSet:
    """Consume ``count`` normalised outputs as disjoint ``dim``-tuples."""
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    if count < dim:
        raise ValueError("count must be at least dim")
    used = dim * (count // dim)
    return PointSet(dim, g.units(used).reshape(-1, dim))


def render_scatter(ps: PointSet, resolution: int = 512) -> RasterImage:
    """Binary raster of the points; 3-D sets become xy | xz | yz projections."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    pairs = [(0, 1)] if ps.dim == 2 else [(0, 1), (0, 2), (1, 2)]
    panels = []
    for a, b in pairs:
        img = np.zeros((resolution, resolution), dtype=np.uint8)
        if len(ps):
            cols = np.minimum((ps.points[:, a] * resolution).astype(int), resolution - 1)
            rows = resolution - 1 - np.minimum((ps.points[:, b] * resolution).astype(int), resolution - 1)
            img[rows, cols] = 1
        panels.append(img)
    return RasterImage(np.hstack(panels), base=2)


def word_digits(words: np.ndarray, ndigits: int, base: int) -> np.ndarray:
    """Most-significant-first digits of each word, shape (len(words), ndigits)."""
    words = np.asarray(words, dtype=np.uint64)
    out = np.empty((words.size, ndigits), dtype=np.uint8)
    rest = words.copy()
    b = np.uint64(base)
    for col in range(ndigits - 1, -1, -1):
        out[:, col] = (rest % b).astype(np.uint8)
        rest //= b
    return out


def spacetime_image(g: Generator, rows: int = 1000, base: int | None = None) -> RasterImage:
    """Row t holds the digits of the t-th word, most significant on the left."""
    if rows < 1:
        raise ValueError("rows must be positive")
    base = base or g.base
    ndigits = g.digit_count if base == g.base else int(np.ceil(g.word_width / np.log2(base)))
    return RasterImage(word_digits(g.words(rows), ndigits, base), base=base)
