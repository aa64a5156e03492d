from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from prngsuite import core, ranking, stats
from prngsuite.ranking import RankRow, RankTable, SweepResult, SweepSpec
from prngsuite.stats import BatteryReport, TestOutcome


def fake(gen: str, seed: int, nist: int, rabbit: int, diehard: int) -> SweepResult:
    reports = {}
    for conv, k in (("nist", nist), ("rabbit", rabbit), ("diehard", diehard)):
        outs = [TestOutcome(t, passed=i < k, convention=conv) for i, t in enumerate(stats.BATTERY)]
        reports[conv] = BatteryReport(gen, seed, conv, outs)
    return SweepResult(gen, seed, reports)


def level1_of(scores: dict[str, tuple[int, int, int]]) -> RankTable:
    return ranking.rank_level1([fake(g, 1, *s) for g, s in scores.items()])


def test_random_seed_source():
    seeds = ranking.random_seed_source(1000)
    assert seeds[0] == 12345
    assert len(seeds) == 1000 and all(s < 2**31 for s in seeds)
    assert seeds == ranking.random_seed_source(1000)
    g = core.create("rand", 0)
    assert seeds == [g.next_word() for _ in range(1000)]
    with pytest.raises(ValueError):
        ranking.random_seed_source(0)


@pytest.mark.parametrize("keys, ranks", [
    ({"a": (1,), "b": (1,)}, {"a": 1, "b": 1}),
    ({"a": (0,), "b": (5,)}, {"a": 1, "b": 2}),
    ({"a": (0,), "b": (3,), "c": (3,)}, {"a": 1, "b": 2, "c": 2}),
    ({"a": (2, 1), "b": (2, 0), "c": (9, 9)}, {"a": 2, "b": 1, "c": 3}),
])
def test_dense_rank(keys, ranks):
    assert ranking.dense_rank(keys) == ranks


def test_level1_examples():
    t = level1_of({"same1": (5, 5, 5), "same2": (5, 5, 5)})
    assert t["same1"].level1 == t["same2"].level1 == 1
    t = level1_of({"all": (12, 12, 12), "none": (0, 0, 0)})
    assert (t["all"].level1, t["none"].level1) == (1, 2)
    t = level1_of({"a": (12, 12, 12), "b": (9, 9, 9), "c": (9, 9, 9)})
    assert [t[g].level1 for g in "abc"] == [1, 2, 2]
    # nist passes dominate rabbit, which dominates diehard
    t = level1_of({"n": (10, 0, 0), "r": (9, 12, 12)})
    assert t["n"].level1 < t["r"].level1


def test_level1_needs_all_seeds():
    with pytest.raises(ValueError):
        ranking.rank_level1([fake("g", 7, 1, 1, 1)], seeds=[7, 1234])


def averaged(level1: RankTable, counts: dict[str, list[int]]) -> RankTable:
    sweep = [fake(g, i, 0, 0, c) for g, cs in counts.items() for i, c in enumerate(cs)]
    return ranking.rank_level2(level1, sweep)


def test_level2_average_breaks_ties():
    l1 = level1_of({"hi": (5, 5, 5), "lo": (5, 5, 5)})
    t = averaged(l1, {"hi": [10, 10, 10, 10, 11], "lo": [9, 9, 10, 9, 9]})
    assert t["hi"].average == pytest.approx(10.2) and t["lo"].average == pytest.approx(9.2)
    assert t["hi"].level2 < t["lo"].level2


def test_level2_identical_stay_tied():
    l1 = level1_of({"a": (5, 5, 5), "b": (5, 5, 5)})
    t = averaged(l1, {"a": [8, 9, 10], "b": [10, 9, 8]})
    assert t["a"].level2 == t["b"].level2


def test_level2_range_reaching_zero_is_demoted():
    l1 = level1_of({"zero": (5, 5, 5), "safe": (5, 5, 5)})
    t = averaged(l1, {"zero": [0, 10, 11, 11], "safe": [7, 8, 8, 9]})
    assert t["zero"].average == t["safe"].average == 8.0
    assert t["zero"].low == 0 and t["safe"].level2 < t["zero"].level2


def test_level2_respects_level1_order():
    l1 = level1_of({"better": (9, 9, 9), "worse": (1, 1, 1)})
    t = averaged(l1, {"better": [1], "worse": [12]})
    assert t["better"].level2 < t["worse"].level2
    assert l1["better"].level2 == 0  # the input table is left untouched


def test_final_rank_annotations():
    l1 = level1_of({"a": (5, 5, 5), "b": (5, 5, 5), "c": (1, 1, 1)})
    l2 = averaged(l1, {"a": [9], "b": [9], "c": [3]})
    plain = ranking.final_rank(l2)
    assert [plain[g].final for g in "abc"] == [l2[g].level2 for g in "abc"]
    tagged = ranking.final_rank(l2, {"b": ["seed-dependent"], "a": ["independent-of-seed"]})
    assert tagged["a"].final < tagged["b"].final < tagged["c"].final
    with pytest.raises(ValueError):
        ranking.final_rank(l2, {"a": ["ugly"]})


def test_rank_table_text_and_tsv():
    t = ranking.final_rank(averaged(level1_of({"x": (3, 2, 1), "y": (1, 1, 1)}),
                                    {"x": [5, 6], "y": [1, 2]}))
    tsv = t.to_tsv().splitlines()
    assert tsv[0].split("\t") == list(RankTable.HEADER)
    assert tsv[1].split("\t")[:2] == ["x", "1"]
    assert "5.50" in t.to_text() and "1-2" in t.to_text()


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.sampled_from("abcdefgh"),
                       st.tuples(st.integers(0, 12), st.integers(0, 12), st.integers(0, 12)),
                       min_size=1))
def test_dense_ranks_are_contiguous(scores):
    t = level1_of(scores)
    ranks = sorted({r.level1 for r in t.rows})
    assert ranks == list(range(1, len(set(scores.values())) + 1))


@settings(max_examples=60, deadline=None)
@given(st.dictionaries(st.sampled_from("abcdef"),
                       st.tuples(st.integers(0, 11), st.integers(0, 11), st.integers(0, 11)),
                       min_size=2),
       st.integers(0, 2))
def test_more_passes_never_lower_rank(scores, which):
    name = sorted(scores)[0]
    before = level1_of(scores)[name].level1
    bumped = list(scores[name])
    bumped[which] += 1
    after = level1_of({**scores, name: tuple(bumped)})[name].level1
    assert after <= before


# -- sweeps and pipeline -----------------------------------------------------------------

def test_sweep_spec_validation():
    with pytest.raises(core.CatalogError):
        SweepSpec(("nope",))
    with pytest.raises(ValueError):
        SweepSpec(("rand",), battery=("bogus",))
    with pytest.raises(ValueError):
        SweepSpec(("rand",), bits=0)


def test_sweep_shape_and_empty_battery():
    res = ranking.run_sweep(["rand"], [7], 1000, battery=[])
    assert len(res) == 1 and res[0].reports["diehard"].pass_count == 0
    res = ranking.run_sweep(core.names(), core.PAPER_SEEDS, 2000, battery=["monobit"])
    assert len(res) == 135
    assert [(r.generator, r.seed) for r in res[:2]] == [("mmix", 7), ("mmix", 1234)]


def test_job_errors_are_captured(monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("disk on fire")
    monkeypatch.setattr(ranking, "run_all_conventions", boom)
    res = ranking.run_sweep(["rand", "minstd"], [1], 1000)
    assert all("disk on fire" in r.error for r in res)


def test_parallel_sweep_matches_serial():
    args = (["rand", "xorshift32"], [1, 2], 20_000, ["monobit", "runs"])
    a = ranking.run_sweep(*args, jobs=1)
    b = ranking.run_sweep(*args, jobs=2)
    assert [r.reports["rabbit"].to_tsv() for r in a] == [r.reports["rabbit"].to_tsv() for r in b]


def test_pipeline_is_deterministic():
    spec = SweepSpec(("rand", "mt19937-32", "minstd"), fixed_seeds=(7, 1234), random_seeds=3,
                     bits=100_000, battery=("monobit", "runs", "serial", "birthday_spacings"))
    t1, _, _ = ranking.Pipeline(spec).run()
    t2, _, _ = ranking.Pipeline(spec).run()
    assert t1.to_tsv() == t2.to_tsv()
    assert t1["mt19937-32"].final < t1["rand"].final


def test_load_config(tmp_path):
    cfg = tmp_path / "s.ini"
    cfg.write_text("[sweep]\ngenerators = rand, MINSTD\nfixed_seeds = 7, 1234\nrandom_seeds = 5\n"
                   "bits = 50000\nbattery = monobit, runs\n\n[annotations]\nrand = pattern, fixed-bits\n")
    pipe = ranking.load_config(cfg)
    assert pipe.spec.generators == ("rand", "minstd")
    assert pipe.spec.fixed_seeds == (7, 1234) and pipe.spec.average_bits == 50000
    assert pipe.annotations == {"rand": ("pattern", "fixed-bits")}


@pytest.mark.parametrize("body, exc", [
    ("[other]\n", ValueError),
    ("[sweep]\ngenerators = rand\n[annotations]\nminstd = pattern\n", core.CatalogError),
    ("[sweep]\ngenerators = rand\n[annotations]\nrand = shiny\n", ValueError),
])
def test_bad_configs(tmp_path, body, exc):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(body)
    with pytest.raises(exc):
        ranking.load_config(cfg)


def test_missing_config(tmp_path):
    with pytest.raises(FileNotFoundError):
        ranking.load_config(tmp_path / "absent.ini")


def test_default_config_selects_everything(tmp_path):
    cfg = tmp_path / "all.ini"
    cfg.write_text("[sweep]\n")
    pipe = ranking.load_config(cfg)
    assert pipe.spec.generators == tuple(core.names())
    assert pipe.spec.fixed_seeds == core.PAPER_SEEDS and pipe.spec.random_seeds == 1000


def test_row_defaults():
    r = RankRow("g")
    assert r.annotations == () and r.score == (0, 0, 0)
