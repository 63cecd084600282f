"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line (also collected into the
terminal summary) listing the measured values next to their targets, then
asserts every sub-check.
"""

import time

import pytest

from conftest import ACCEPTANCE_LINES
from timehash import bench
from timehash.cli import main
from timehash.datagen import DistributionConfig, calibrate, generate
from timehash.hierarchy import DEFAULT_HIERARCHY, boundary_constant, max_key_bound, validate_hierarchy
from timehash.index import Strategy
from timehash.keygen import TimeRange, index_terms, parse_hhmm

pytestmark = pytest.mark.slow


def record(n, title, checks):
    """checks: list of (description, ok)."""
    ok = all(c for _, c in checks)
    detail = "; ".join(f"{d} {'ok' if c else 'MISS'}" for d, c in checks)
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n} ({title}): {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    failed = [d for d, c in checks if not c]
    assert not failed, f"criterion {n} failed: {failed}"


def near(value, target, tol):
    return abs(value - target) <= tol


def keys(a, b):
    return index_terms(TimeRange(parse_hhmm(a), parse_hhmm(b)))


def test_criterion_1_worked_key_sets():
    cases = [
        (("1140", "2100"), {"08113040", "081145", "12", "16", "2020"}),
        (("0800", "2100"), {"08", "12", "16", "2020"}),
        (("1200", "1600"), {"12"}),
        (("1200", "1300"), {"1212"}),
    ]
    record(1, "worked key sets", [(f"{a}-{b} -> {sorted(keys(a, b))}", keys(a, b) == want) for (a, b), want in cases])


def test_criterion_2_oracle_equivalence():
    t0 = time.perf_counter()
    probes = bench.verify_point_probes(DEFAULT_HIERARCHY, random_per_range=32, seed=0)
    elapsed = time.perf_counter() - t0
    small = validate_hierarchy((60, 15, 5, 1))
    point = bench.verify_point_exhaustive(small, day=240)
    rng = bench.verify_range_exhaustive(small, day=240)
    record(
        2,
        "oracle equivalence",
        [
            (f"full-day probes: {probes.checks} checks, {probes.mismatches} mismatches", probes.ok),
            (f"probe runtime {elapsed:.0f}s < 120s", elapsed < 120),
            (f"240-min point exhaustive: {point.checks} checks, {point.mismatches} mismatches", point.ok),
            (f"240-min range exhaustive: {rng.checks} checks, {rng.mismatches} mismatches", rng.ok),
        ],
    )


def test_criterion_3_key_count_bounds():
    stats = bench.enumerate_key_stats(DEFAULT_HIERARCHY)
    table = {"<1h": (6.5, 1, 14), "1-4h": (9.2, 1, 20), "4-12h": (13.1, 2, 25), "12-24h": (15.4, 4, 28)}
    checks = [
        (f"B={boundary_constant(DEFAULT_HIERARCHY)} (24)", boundary_constant(DEFAULT_HIERARCHY) == 24),
        (f"bound={max_key_bound(DEFAULT_HIERARCHY)} (31)", max_key_bound(DEFAULT_HIERARCHY) == 31),
        (f"max={stats['all'].max} (28)", stats["all"].max == 28),
    ]
    for label, (avg, lo, hi) in table.items():
        b = stats[label]
        checks.append((f"{label} avg {b.avg:.2f} ({avg}±0.2)", near(b.avg, avg, 0.2)))
        checks.append((f"{label} min-max {b.min}-{b.max} ({lo}-{hi})", (b.min, b.max) == (lo, hi)))
    record(3, "key-count bounds", checks)


def test_criterion_4_ablation():
    rep = bench.ablation(DEFAULT_HIERARCHY)
    full = rep.row("Full (4h,1h,15m,5m,1m)")
    r4h = rep.row("Remove 4h")
    three = rep.row("3-level (4h,1h,1m)")
    six = rep.row("6-level (+30m)")
    record(
        4,
        "ablation",
        [
            (f"full avg {full['avg_keys']:.2f} (5.8±0.1)", near(full["avg_keys"], 5.8, 0.1)),
            (f"remove-4h avg {r4h['avg_keys']:.2f} (8.8±0.1)", near(r4h["avg_keys"], 8.8, 0.1)),
            (f"remove-4h delta {r4h['delta_pct']:+.1f}% (+51±3)", near(r4h["delta_pct"], 51, 3)),
            (f"3-level avg {three['avg_keys']:.2f} (18.3±0.2)", near(three["avg_keys"], 18.3, 0.2)),
            (f"3-level delta {three['delta_pct']:+.1f}% (+214±5)", near(three["delta_pct"], 214, 5)),
            (f"6-level delta {six['delta_pct']:+.1f}% (-5±2)", near(six["delta_pct"], -5, 2)),
        ],
    )


def test_criterion_5_index_size(pois_100k):
    cfg = calibrate(609.7)
    pois = pois_100k if cfg == DistributionConfig() else generate(cfg)
    size = bench.index_size_comparison(pois, queries=bench.sample_queries(100, seed=1))
    th, m1, h1 = size.row("timehash"), size.row("minute1"), size.row("hour1")
    e2e = bench.end_to_end(pois, n_queries=1000, n_accuracy=100, seed=2)
    scope_p50 = e2e.row("scope")["p50_us"]
    index_p50 = {s.value: e2e.row(s.value)["p50_us"] for s in bench.INDEX_STRATEGIES}
    speedup = e2e.row("minute1")["build_s"] / e2e.row("timehash")["build_s"]
    record(
        5,
        "index size at 100K",
        [
            (f"timehash terms/doc {th['terms_per_doc']:.3f} (5.6±0.2)", near(th["terms_per_doc"], 5.6, 0.2)),
            (f"minute1 terms/doc {m1['terms_per_doc']:.1f} (609.7±2%)", near(m1["terms_per_doc"], 609.7, 0.02 * 609.7)),
            (f"reduction {th['reduction_pct']:.2f}% (>=98.8)", th["reduction_pct"] >= 98.8),
            (f"timehash P/R {th['precision']:.3f}/{th['recall']:.3f} (1/1)", th["precision"] == 1.0 and th["recall"] == 1.0),
            (f"hour1 precision {h1['precision']:.3f} (<1)", h1["precision"] < 1.0),
            (
                f"scope P50 {scope_p50:.0f}us > index P50s {', '.join(f'{k} {v:.0f}' for k, v in index_p50.items())}",
                all(scope_p50 > v for v in index_p50.values()),
            ),
            (f"build speedup {speedup:.1f}x (>=10)", speedup >= 10),
        ],
    )


def test_criterion_6_scalability():
    rep = bench.scalability((100_000, 1_000_000), DistributionConfig(), n_queries=1000, n_check=3)
    small, large = rep.rows
    tpd_drift = abs(large["terms_per_doc"] / small["terms_per_doc"] - 1)
    linear = small["build_s"] * large["n"] / small["n"]
    record(
        6,
        "scalability 100K->1M",
        [
            (f"terms/doc {small['terms_per_doc']:.3f} -> {large['terms_per_doc']:.3f} (drift {tpd_drift:.2%} <= 1%)", tpd_drift <= 0.01),
            (f"1M build {large['build_s']:.1f}s vs linear {linear:.1f}s (<=1.5x)", large["build_s"] <= 1.5 * linear),
            (f"unique keys {small['unique_terms']}, {large['unique_terms']} (<=300)", max(small["unique_terms"], large["unique_terms"]) <= 300),
            (f"oracle mismatches {small['mismatches'] + large['mismatches']}", small["mismatches"] + large["mismatches"] == 0),
        ],
    )


def test_criterion_7_hierarchy_sweep(pois_100k):
    rep = bench.hierarchy_sweep(pois_100k)
    r = {row["label"]: row["ratio_pct"] for row in rep.rows}
    a, b, c, d, e = r["60,5"], r["60,30,5"], r["120,60,5"], r["120,60,30,5"], r["120,60,30,15,5"]
    record(
        7,
        "hierarchy sweep",
        [
            (f"ordering {a:.2f} > {b:.2f} > {c:.2f} > {d:.2f} >= {e:.2f}", a > b > c > d >= e),
            (f"(60,5) ratio {a:.2f}% (8-13)", 8 <= a <= 13),
        ],
    )


def test_criterion_8_determinism(tmp_path, capsys):
    paths = [tmp_path / "a.jsonl", tmp_path / "b.jsonl"]
    for p in paths:
        assert main(["gen", "--seed", "42", "--n", "100000", "--out", str(p)]) == 0
    same_gen = paths[0].read_bytes() == paths[1].read_bytes()
    outputs = []
    for _ in range(2):
        main(["keys", "--from", "1140", "--to", "2100"])
        main(["keys", "--from", "2200", "--to", "0200"])
        main(["query", "--at", "1430"])
        outputs.append(capsys.readouterr().out)
    record(
        8,
        "determinism",
        [
            (f"gen 100K twice byte-identical ({paths[0].stat().st_size} bytes)", same_gen),
            ("keys/query output byte-stable", outputs[0] == outputs[1] and outputs[0] != ""),
        ],
    )
