"""Pseudo-random number generators with statistical and graphical tests."""

from __future__ import annotations

from .core import (
    BitStream,
    CatalogError,
    Generator,
    GeneratorId,
    PAPER_SEEDS,
    catalog,
    create,
    dump_bin,
    emit_bits,
    load_bin,
    names,
    to_unit,
)

__all__ = [
    "BitStream",
    "CatalogError",
    "Generator",
    "GeneratorId",
    "PAPER_SEEDS",
    "catalog",
    "create",
    "dump_bin",
    "emit_bits",
    "load_bin",
    "names",
    "to_unit",
]

__version__ = "0.1.0"
