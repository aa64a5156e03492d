"""Matplotlib figures written next to the text and TSV reports."""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

if TYPE_CHECKING:
    from .graphical import PointSet, RasterImage
    from .ranking import RankTable
    from .stats import BatteryReport

PathLike = Union[str, Path]

# Fixed metadata keeps repeated runs byte-identical.
_PNG_META = {"Software": None}


def _save(fig, path: PathLike) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=100, metadata=_PNG_META)
    plt.close(fig)
    return path


def plot_report(report: "BatteryReport", path: PathLike) -> Path:
    """p-values per test against the convention's acceptance band."""
    fig, ax = plt.subplots(figsize=(8, 4))
    for i, o in enumerate(report.outcomes):
        ps = o.p_values[:50]
        colour = "tab:green" if o.passed else "tab:red"
        if ps:
            ax.scatter([i] * len(ps), ps, s=14, color=colour)
        else:
            ax.scatter([i], [0.5], marker="x", color="tab:grey")
    lo, hi = {"diehard": (0.025, 0.975), "rabbit": (0.001, 0.999)}.get(report.convention, (0.01, 1.0))
    ax.axhspan(lo, hi, color="tab:blue", alpha=0.08)
    ax.set_xticks(range(len(report.outcomes)))
    ax.set_xticklabels([o.test_id for o in report.outcomes], rotation=60, ha="right", fontsize=8)
    ax.set_ylim(-0.02, 1.02)
    ax.set_ylabel("p-value")
    ax.set_title(f"{report.generator} seed {report.seed} ({report.convention}): "
                 f"{report.pass_count}/{len(report.outcomes)} passed", fontsize=10)
    fig.tight_layout()
    return _save(fig, path)


def plot_points(ps: "PointSet", path: PathLike, title: str = "") -> Path:
    if ps.dim == 2:
        fig, ax = plt.subplots(figsize=(5, 5))
        ax.scatter(ps.points[:, 0], ps.points[:, 1], s=2, color="black")
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1)
        ax.set_xlabel("$u_{2i}$")
        ax.set_ylabel("$u_{2i+1}$")
    else:
        fig = plt.figure(figsize=(5, 5))
        ax = fig.add_subplot(projection="3d")
        ax.scatter(ps.points[:, 0], ps.points[:, 1], ps.points[:, 2], s=2, color="black")
    ax.set_title(title, fontsize=10)
    return _save(fig, path)


def plot_raster(img: "RasterImage", path: PathLike, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(4, 6))
    ax.imshow(img.rgb(), aspect="auto", interpolation="nearest")
    ax.set_xlabel("digit (most significant left)")
    ax.set_ylabel("time")
    ax.set_title(title, fontsize=10)
    fig.tight_layout()
    return _save(fig, path)


def plot_rank_table(table: "RankTable", path: PathLike) -> Path:
    """Average-case pass counts with min-max ranges, ordered by final rank."""
    rows = sorted(table.rows, key=lambda r: (r.final, r.generator))
    fig, ax = plt.subplots(figsize=(9, 0.28 * len(rows) + 1.5))
    y = np.arange(len(rows))
    avg = np.array([r.average for r in rows])
    lo = np.array([r.low for r in rows])
    hi = np.array([r.high for r in rows])
    ax.barh(y, avg, color="tab:blue", alpha=0.6)
    ax.errorbar(avg, y, xerr=np.vstack([avg - lo, hi - avg]), fmt="none", ecolor="black", capsize=2)
    ax.set_yticks(y)
    ax.set_yticklabels([f"{r.final:>2}  {r.generator}" for r in rows], fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("tests passed (average-case sweep)")
    fig.tight_layout()
    return _save(fig, path)
