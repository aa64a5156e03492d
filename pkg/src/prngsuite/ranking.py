"""Seed sweeps and the three-level ranking of generators."""

from __future__ import annotations

import configparser
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from . import core
from .stats import BATTERY, CONVENTIONS, BatteryReport, run_all_conventions

log = logging.getLogger("prngsuite.ranking")

TAGS = ("seed-dependent", "fixed-bits", "pattern", "blocks-of-zeros", "independent-of-seed")
# independent-of-seed is a favourable observation and carries no penalty
TAG_PENALTY = {t: (0 if t == "independent-of-seed" else 1) for t in TAGS}
AVERAGE_CONVENTION = "diehard"
DEFAULT_BITS = 1_000_000


@dataclass(frozen=True)
class SweepSpec:
    generators: tuple[str, ...]
    fixed_seeds: tuple[int, ...] = core.PAPER_SEEDS
    random_seeds: int = 1000
    bits: int = DEFAULT_BITS
    average_bits: int = DEFAULT_BITS
    battery: tuple[str, ...] = BATTERY

    def __post_init__(self):
        known = set(core.names())
        bad = [g for g in self.generators if g not in known]
        if bad:
            raise core.CatalogError(f"unknown generators: {', '.join(bad)}")
        bad = [t for t in self.battery if t not in BATTERY]
        if bad:
            raise ValueError(f"unknown tests: {', '.join(bad)}")
        if self.bits < 1 or self.average_bits < 1 or self.random_seeds < 0:
            raise ValueError("bit counts must be positive and the seed count non-negative")


@dataclass
class SweepResult:
    generator: str
    seed: int
    reports: dict[str, BatteryReport] = field(default_factory=dict)
    error: str = ""

    def passes(self, convention: str) -> int:
        return self.reports[convention].pass_count if convention in self.reports else 0


def random_seed_source(n: int) -> list[int]:
    """The first ``n`` rand() words after seeding with 0."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return [int(w) for w in core.create("rand", 0).words(n)]


def _job(args) -> SweepResult:
    name, seed, bits, battery = args
    try:
        stream = core.emit_bits(core.create(name, seed), bits)
        reports = run_all_conventions(stream, battery, CONVENTIONS, name, seed)
        return SweepResult(name, seed, reports)
    except Exception as exc:  # one bad job must not sink the sweep
        log.error("job %s seed %d failed: %s", name, seed, exc)
        return SweepResult(name, seed, error=f"{type(exc).__name__}: {exc}")


def run_sweep(generators: Sequence[str], seeds: Sequence[int], bits: int,
              battery: Sequence[str] = BATTERY, jobs: int = 1) -> list[SweepResult]:
    """One result per (generator, seed), ordered generator-major as given."""
    tasks = [(g, int(s), bits, tuple(battery)) for g in generators for s in seeds]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            # map preserves input order, so the merge is deterministic
            return list(pool.map(_job, tasks, chunksize=1))
    return [_job(t) for t in tasks]


# -- ranking ------------------------------------------------------------------------

def dense_rank(keys: Mapping[str, tuple]) -> dict[str, int]:
    """Rank 1 for the smallest key; equal keys share a rank, no gaps."""
    distinct = sorted(set(keys.values()))
    position = {k: i + 1 for i, k in enumerate(distinct)}
    return {name: position[k] for name, k in keys.items()}


@dataclass
class RankRow:
    generator: str
    level1: int = 0
    score: tuple[int, int, int] = (0, 0, 0)   # summed (nist, rabbit, diehard) passes
    average: float = 0.0
    low: int = 0
    high: int = 0
    level2: int = 0
    final: int = 0
    annotations: tuple[str, ...] = ()


@dataclass
class RankTable:
    rows: list[RankRow]

    def __getitem__(self, name: str) -> RankRow:
        for r in self.rows:
            if r.generator == name:
                return r
        raise KeyError(name)

    def ordered(self) -> list[RankRow]:
        return sorted(self.rows, key=lambda r: (r.final, r.level2, r.level1, r.generator))

    HEADER = ("generator", "level1", "nist", "rabbit", "diehard", "average", "range",
              "level2", "final", "annotations")

    def _cells(self, r: RankRow) -> list[str]:
        return [r.generator, str(r.level1), *map(str, r.score), f"{r.average:.2f}",
                f"{r.low}-{r.high}", str(r.level2), str(r.final), ",".join(r.annotations) or "-"]

    def to_tsv(self) -> str:
        lines = ["\t".join(self.HEADER)] + ["\t".join(self._cells(r)) for r in self.ordered()]
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        table = [list(self.HEADER)] + [self._cells(r) for r in self.ordered()]
        widths = [max(len(row[i]) for row in table) for i in range(len(self.HEADER))]
        return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip()
                         for row in table) + "\n"


def _by_generator(results: Iterable[SweepResult]) -> dict[str, list[SweepResult]]:
    out: dict[str, list[SweepResult]] = {}
    for r in results:
        out.setdefault(r.generator, []).append(r)
    return out


def rank_level1(fixed: Iterable[SweepResult], seeds: Sequence[int] | None = None) -> RankTable:
    """Dense rank on summed (NIST, rabbit, Diehard) pass counts, higher first."""
    groups = _by_generator(fixed)
    if seeds is not None:
        for name, rs in groups.items():
            missing = set(int(s) for s in seeds) - {r.seed for r in rs}
            if missing:
                raise ValueError(f"{name}: no reports for seeds {sorted(missing)}")
    scores = {name: tuple(sum(r.passes(c) for r in rs) for c in ("nist", "rabbit", "diehard"))
              for name, rs in groups.items()}
    ranks = dense_rank({n: tuple(-v for v in s) for n, s in scores.items()})
    return RankTable([RankRow(n, level1=ranks[n], score=scores[n]) for n in groups])


def rank_level2(level1: RankTable, average: Iterable[SweepResult],
                convention: str = AVERAGE_CONVENTION) -> RankTable:
    """Break level-1 ties by average pass count, then by the pass-count range.

    Averages are compared at one decimal, the precision they are reported
    at.  A larger minimum wins, so a range reaching 0 ranks below one that
    does not; a larger maximum breaks any remaining tie.
    """
    groups = _by_generator(average)
    rows = []
    for r in level1.rows:
        r = RankRow(**r.__dict__)
        counts = [x.passes(convention) for x in groups.get(r.generator, [])]
        if counts:
            r.average, r.low, r.high = float(np.mean(counts)), min(counts), max(counts)
        rows.append(r)
    keys = {r.generator: (r.level1, -round(r.average, 1), -r.low, -r.high) for r in rows}
    ranks = dense_rank(keys)
    for r in rows:
        r.level2 = r.final = ranks[r.generator]
    return RankTable(rows)


def final_rank(level2: RankTable, annotations: Mapping[str, Sequence[str]] | None = None) -> RankTable:
    """Each penalising image tag moves a generator one step down within its level-2 group."""
    annotations = annotations or {}
    for name, tags in annotations.items():
        bad = [t for t in tags if t not in TAG_PENALTY]
        if bad:
            raise ValueError(f"{name}: unknown annotation tags {bad}; expected {TAGS}")
    rows = []
    for r in level2.rows:
        tags = tuple(annotations.get(r.generator, ()))
        rows.append(RankRow(**{**r.__dict__, "annotations": tags}))
    keys = {r.generator: (r.level2, sum(TAG_PENALTY[t] for t in r.annotations)) for r in rows}
    ranks = dense_rank(keys)
    for r in rows:
        r.final = ranks[r.generator]
    return RankTable(rows)


@dataclass
class Pipeline:
    spec: SweepSpec
    annotations: dict[str, tuple[str, ...]] = field(default_factory=dict)
    jobs: int = 1

    def run(self) -> tuple[RankTable, list[SweepResult], list[SweepResult]]:
        s = self.spec
        fixed = run_sweep(s.generators, s.fixed_seeds, s.bits, s.battery, self.jobs)
        seeds = random_seed_source(s.random_seeds) if s.random_seeds else []
        average = run_sweep(s.generators, seeds, s.average_bits, s.battery, self.jobs)
        table = final_rank(rank_level2(rank_level1(fixed, s.fixed_seeds), average), self.annotations)
        return table, fixed, average


# -- configuration --------------------------------------------------------------------

def _split(value: str) -> list[str]:
    return [v.strip() for v in value.replace("\n", ",").split(",") if v.strip()]


def load_config(source: Union[str, Path]) -> Pipeline:
    """Read an INI sweep file with [sweep] and optional [annotations] sections."""
    cp = configparser.ConfigParser()
    path = Path(source)
    if not cp.read(path):
        raise FileNotFoundError(f"cannot read configuration {path}")
    if "sweep" not in cp:
        raise ValueError("configuration needs a [sweep] section")
    sw = cp["sweep"]
    gens = _split(sw.get("generators", "all"))
    generators = tuple(core.names()) if gens in ([], ["all"]) else tuple(g.lower() for g in gens)
    tests = _split(sw.get("battery", "all"))
    battery = BATTERY if tests in ([], ["all"]) else tuple(tests)
    fixed = tuple(int(v) for v in _split(sw.get("fixed_seeds", ""))) or core.PAPER_SEEDS
    bits = sw.getint("bits", DEFAULT_BITS)
    spec = SweepSpec(generators=generators, fixed_seeds=fixed,
                     random_seeds=sw.getint("random_seeds", 1000), bits=bits,
                     average_bits=sw.getint("average_bits", bits), battery=battery)
    notes = {}
    if "annotations" in cp:
        for name, value in cp["annotations"].items():
            if name not in spec.generators:
                raise core.CatalogError(f"annotation for unknown or unselected generator {name!r}")
            notes[name] = tuple(_split(value))
    pipe = Pipeline(spec, notes)
    final_rank(RankTable([]), notes)  # validate tags before any job runs
    return pipe
