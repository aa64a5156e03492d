"""Command-line interface: prngsuite {generate,dump-bin,test,lattice,spacetime,rank}."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import core, graphical, plotting, ranking, stats

EXIT_OK, EXIT_JOB, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value <= core.MASK64:
        raise argparse.ArgumentTypeError("seed must be in 0 .. 2**64 - 1")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _generator(name: str) -> str:
    try:
        core.generator_class(name)
    except core.CatalogError as exc:
        raise UsageError(str(exc.args[0])) from None
    return name.lower()


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _announce(*paths: Path) -> None:
    for p in paths:
        print(p)


# -- subcommands ----------------------------------------------------------------------

def cmd_generate(args) -> int:
    name = _generator(args.generator)
    g = core.create(name, args.seed)
    out = _outdir(args)
    stem = out / f"{name}_{args.seed}"
    if args.format == "bin":
        path = stem.with_suffix(".bin")
        core.dump_bin(core.emit_bits(g, args.count * g.word_width), path)
    else:
        path = stem.with_suffix(".txt")
        path.write_text("".join(f"{int(w)}\n" for w in g.words(args.count)))
    _announce(path)
    return EXIT_OK


def cmd_dump_bin(args) -> int:
    name = _generator(args.generator)
    nbytes = args.bytes or core.target_bytes(args.target)
    path = _outdir(args) / f"{name}_{args.seed}_{args.target if not args.bytes else nbytes}.bin"
    core.write_generator_bin(core.create(name, args.seed), path, nbytes)
    _announce(path)
    return EXIT_OK


def cmd_test(args) -> int:
    if bool(args.generator) == bool(args.file):
        raise UsageError("give either a generator name or --file, not both")
    battery = tuple(args.tests) if args.tests else stats.BATTERY
    unknown = [t for t in battery if t not in stats.TESTS]
    if unknown:
        raise UsageError(f"unknown tests: {', '.join(unknown)}")
    if args.file:
        stream = core.load_bin(args.file)
        if args.bits and args.bits < len(stream):
            stream = stream[:args.bits]
        label, seed = Path(args.file).stem, None
    else:
        label = _generator(args.generator)
        seed = args.seed
        stream = core.emit_bits(core.create(label, seed), args.bits or ranking.DEFAULT_BITS)
    conventions = stats.CONVENTIONS if args.convention == "all" else (args.convention,)
    reports = stats.run_all_conventions(stream, battery, conventions, label, seed)
    out = _outdir(args)
    stem = f"{label}_{seed}" if seed is not None else label
    tsv = out / f"{stem}_report.tsv"
    txt = out / f"{stem}_report.txt"
    tsv.write_text("".join(r.to_tsv() if i == 0 else r.to_tsv().split("\n", 1)[1]
                           for i, r in enumerate(reports.values())))
    txt.write_text("\n".join(r.to_text() for r in reports.values()))
    figs = [plotting.plot_report(r, out / f"{stem}_{c}.png") for c, r in reports.items()]
    print("".join(r.to_text() for r in reports.values()), end="")
    _announce(txt, tsv, *figs)
    return EXIT_OK


def cmd_lattice(args) -> int:
    name = _generator(args.generator)
    ps = graphical.lattice_points(core.create(name, args.seed), args.count, args.dim)
    out = _outdir(args)
    stem = out / f"{name}_{args.seed}_lattice{args.dim}d"
    coords = stem.with_suffix(".txt")
    coords.write_text(ps.to_text())
    img = graphical.render_scatter(ps, args.resolution).save(stem.with_suffix(".pgm"))
    fig = plotting.plot_points(ps, stem.with_suffix(".png"), f"{name}, seed {args.seed}")
    _announce(coords, img, fig)
    return EXIT_OK


def cmd_spacetime(args) -> int:
    name = _generator(args.generator)
    img = graphical.spacetime_image(core.create(name, args.seed), args.rows)
    out = _outdir(args)
    stem = out / f"{name}_{args.seed}_spacetime"
    raster = img.save(stem.with_suffix(img.suffix))
    fig = plotting.plot_raster(img, stem.with_suffix(".png"), f"{name}, seed {args.seed}")
    _announce(raster, fig)
    return EXIT_OK


def cmd_rank(args) -> int:
    if not args.config:
        raise UsageError("rank needs --config")
    try:
        pipe = ranking.load_config(args.config)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        raise UsageError(str(exc)) from None
    pipe.jobs = args.jobs
    table, fixed, average = pipe.run()
    out = _outdir(args)
    paths = [out / "rank.txt", out / "rank.tsv"]
    paths[0].write_text(table.to_text())
    paths[1].write_text(table.to_tsv())
    for label, results in (("fixed", fixed), ("average", average)):
        path = out / f"sweep_{label}.tsv"
        lines = ["generator\tseed\tnist\trabbit\tdiehard\terror"]
        lines += [f"{r.generator}\t{r.seed}\t{r.passes('nist')}\t{r.passes('rabbit')}\t"
                  f"{r.passes('diehard')}\t{r.error or '-'}" for r in results]
        path.write_text("\n".join(lines) + "\n")
        paths.append(path)
    paths.append(plotting.plot_rank_table(table, out / "rank.png"))
    print(table.to_text(), end="")
    _announce(*paths)
    failed = [r for r in fixed + average if r.error]
    if failed:
        print(f"{len(failed)} job(s) failed; see the error column in the sweep files", file=sys.stderr)
        return EXIT_JOB
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="prngsuite-out", help="output directory")
    common.add_argument("--jobs", type=_positive, default=1, help="parallel worker processes")
    common.add_argument("--config", help="INI sweep configuration")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="prngsuite", description=__doc__.split(":")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="emit words as text or .bin")
    p.add_argument("generator")
    p.add_argument("--seed", type=_seed, default=core.PAPER_SEEDS[0])
    p.add_argument("--count", type=_positive, default=1000)
    p.add_argument("--format", choices=("text", "bin"), default="text")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("dump-bin", parents=[common], help="write an external-suite .bin file")
    p.add_argument("generator")
    p.add_argument("--seed", type=_seed, default=core.PAPER_SEEDS[0])
    p.add_argument("--target", choices=("diehard", "rabbit", "nist"), default="diehard")
    p.add_argument("--bytes", type=_positive, help="explicit size, overriding --target")
    p.set_defaults(func=cmd_dump_bin)

    p = sub.add_parser("test", parents=[common], help="run the native battery")
    p.add_argument("generator", nargs="?")
    p.add_argument("--file", help="test a raw .bin file instead of a generator")
    p.add_argument("--seed", type=_seed, default=core.PAPER_SEEDS[0])
    p.add_argument("--bits", type=_positive)
    p.add_argument("--convention", choices=stats.CONVENTIONS + ("all",), default="all")
    p.add_argument("--tests", nargs="+", metavar="TEST", help=f"subset of: {' '.join(stats.BATTERY)}")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("lattice", parents=[common], help="2-D/3-D lattice scatter")
    p.add_argument("generator")
    p.add_argument("--seed", type=_seed, default=core.PAPER_SEEDS[0])
    p.add_argument("--count", type=_positive, default=1000)
    p.add_argument("--dim", type=int, choices=(2, 3), default=2)
    p.add_argument("--resolution", type=_positive, default=512)
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("spacetime", parents=[common], help="space-time diagram")
    p.add_argument("generator")
    p.add_argument("--seed", type=_seed, default=core.PAPER_SEEDS[0])
    p.add_argument("--rows", type=_positive, default=1000)
    p.set_defaults(func=cmd_spacetime)

    p = sub.add_parser("rank", parents=[common], help="sweep seeds and rank generators")
    p.set_defaults(func=cmd_rank)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return EXIT_JOB


if __name__ == "__main__":
    sys.exit(main())
