"""Acceptance criteria, each at its stated tolerance, one PASS/FAIL line per criterion.

Lines are printed immediately (visible with ``-s``) and repeated in the
pytest terminal summary.
"""

import math
import time
import timeit

import pytest

from bosonbudget.architectures import ArchitectureSpec, ModeScaling, optimize_hybrid_timebin, timebin_vs_spatial_threshold
from bosonbudget.lossmodel import TABLE_I, ExperimentConfig, compose_efficiencies, max_lost_photons
from bosonbudget.oracle.suite import run_suite
from bosonbudget.solver import (
    DEFAULT_DETECTED_GRID,
    DEFAULT_X2_GRID,
    FULL_DETECTED_GRID,
    mean_gap,
    mzi_frontier,
    required_efficiency,
    source_requirement_curve,
    surface_maximum,
    tolerated_loss_surface,
)

from .conftest import ACCEPTANCE_LINES, REPORT_LINES

CFG = ExperimentConfig()
QUAD = ModeScaling.quadratic()
LIN10 = ModeScaling.linear(10)
CASES = [(QUAD, "spatial"), (QUAD, "timebin"), (LIN10, "spatial"), (LIN10, "timebin")]


def record(number: int, passed: bool, text: str) -> None:
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {text}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def report(text: str) -> None:
    REPORT_LINES.append(text)
    print(text)


@pytest.fixture(scope="module")
def surfaces():
    start = time.perf_counter()
    out = {(s.label(), e): tolerated_loss_surface(CFG, s, e, DEFAULT_X2_GRID, DEFAULT_DETECTED_GRID) for s, e in CASES}
    return out, time.perf_counter() - start


@pytest.fixture(scope="module")
def full_surfaces():
    start = time.perf_counter()
    out = {(s.label(), e): tolerated_loss_surface(CFG, s, e, DEFAULT_X2_GRID, FULL_DETECTED_GRID) for s, e in CASES}
    return out, time.perf_counter() - start


def test_criterion_1_lost_photons():
    got = (max_lost_photons(0.96, 50, 0.01, 49), max_lost_photons(1.0, 50, 0.01, 49))
    per_call = min(timeit.repeat(lambda: max_lost_photons(1.0, 50, 0.01, 49), number=200, repeat=5)) / 200
    ok = got == (9, 12) and per_call < 1e-3
    record(1, ok, f"max lost photons {got} (expected (9, 12)), {per_call * 1e6:.1f} us per call")
    assert ok


def test_criterion_2_surface_maxima(full_surfaces):
    surfaces, elapsed = full_surfaces
    expected = {0.98: [3.78, 3.46, 3.35, 3.20], 1.0: [3.96, 3.65, 3.53, 3.39]}
    worst = 0.0
    parts = []
    for x2, targets in expected.items():
        got = [surface_maximum(surfaces[(s.label(), e)], x2).max_loss for s, e in CASES]
        worst = max(worst, max(abs(g - t) for g, t in zip(got, targets)))
        parts.append(f"x2={x2}: " + " / ".join(f"{g:.3f}" for g in got))
    ok = worst <= 0.05 and elapsed < 60
    record(2, ok, "; ".join(parts) + f" dB (max dev {worst:.3f}, full surface {elapsed:.1f} s)")
    assert ok


def _gaps(surfaces):
    q, l = "quadratic", "linear10"
    return [
        mean_gap(surfaces[(q, "spatial")], surfaces[(l, "spatial")]),
        mean_gap(surfaces[(q, "timebin")], surfaces[(l, "timebin")]),
        mean_gap(surfaces[(q, "spatial")], surfaces[(q, "timebin")]),
        mean_gap(surfaces[(l, "spatial")], surfaces[(l, "timebin")]),
    ]


def test_criterion_3_average_gaps(surfaces, full_surfaces):
    expected = [0.430, 0.277, 0.298, 0.145]
    labels = ["quad-lin spatial", "quad-lin timebin", "spatial-timebin quad", "spatial-timebin lin"]
    got = _gaps(surfaces[0])
    devs = [abs(g - e) for g, e in zip(got, expected)]
    ok = max(devs) <= 0.05
    record(3, ok, f"detected {DEFAULT_DETECTED_GRID[0]}..{DEFAULT_DETECTED_GRID[-1]}: "
           + ", ".join(f"{lab} {g:.3f} (exp {e})" for lab, g, e in zip(labels, got, expected)))
    report("grid sensitivity of the averaged gaps (x2 0.805..1.0 step 0.005):")
    for upper in (55, 60, 70, 80, 100):
        subset = {k: [pt for pt in v if pt.detected <= upper] for k, v in full_surfaces[0].items()}
        vals = _gaps(subset)
        flags = ["ok" if abs(v - e) <= 0.05 else "OUT" for v, e in zip(vals, expected)]
        report(f"  detected 50..{upper}: " + ", ".join(f"{v:.3f} {f}" for v, f in zip(vals, flags)))
    assert ok


def test_criterion_4_time_vs_space_threshold(surfaces):
    quad = timebin_vs_spatial_threshold(59, 2500, 0.298)
    lin = timebin_vs_spatial_threshold(59, 500, 0.145)
    ok = abs(quad - 0.0497) <= 5e-4 and abs(lin - 0.0242) <= 5e-4
    record(4, ok, f"thresholds {quad:.4f} / {lin:.4f} dB (expected 0.0497 / 0.0242)")
    own = _gaps(surfaces[0])
    report(f"thresholds from this run's gaps: {own[2] / 6:.4f} / {own[3] / 6:.4f} dB")
    assert ok


def test_criterion_5_hybrid_timebin_layouts():
    expected = {2500: (41, 3, 18, 18), 500: (32, 4, 11, 12), 250: (29, 4, 8, 9)}
    parts, ok = [], True
    for m, (d, n, m1, m2) in expected.items():
        lay = optimize_hybrid_timebin(59, m)
        holds = lay.m1 * lay.m2 * lay.time_bins >= m
        match = lay.depth == d and holds
        ok &= match
        parts.append(f"m={m}: depth {lay.depth} (n={lay.n}, {lay.m1}x{lay.m2}) vs {d} (n={n}, {m1}x{m2})")
    record(5, ok, "; ".join(parts))
    assert ok


def test_criterion_6_frontier_thresholds():
    static = mzi_frontier(CFG, ArchitectureSpec("hybrid-spatial"), QUAD, "AB", [0.0035])[0]
    eff_static = required_efficiency(static.residual_budget)
    best = {}
    for family in ("hybrid-spatial", "hybrid-timebin"):
        values = []
        for scaling in (QUAD, LIN10, ModeScaling.linear(5)):
            pt = mzi_frontier(CFG, ArchitectureSpec(family), scaling, "AB", [0.055])[0]
            eff = required_efficiency(pt.residual_budget)
            if eff is not None:
                values.append((eff, scaling.label()))
        best[family] = min(values)
    in_band = all(0.60 <= eff <= 0.75 for eff, _ in best.values())
    ok = abs(eff_static - 0.45) <= 0.05 and in_band
    record(6, ok, f"static MZI: {eff_static:.3f} (exp 0.45); reconfigurable MZI: "
           + ", ".join(f"{fam} {eff:.3f} ({lab})" for fam, (eff, lab) in best.items()) + " (band 0.65-0.70 +/- 0.05)")
    assert ok


def test_criterion_7_source_requirements():
    quad = source_requirement_curve(CFG, QUAD, DEFAULT_X2_GRID)
    lin = source_requirement_curve(CFG, LIN10, DEFAULT_X2_GRID)
    (at96,) = [pt for pt in quad if math.isclose(pt.x2, 0.96)]
    dominated = all(
        (q.required_efficiency is None and l.required_efficiency is None)
        or (q.required_efficiency is not None and (l.required_efficiency is None or q.required_efficiency <= l.required_efficiency))
        for q, l in zip(quad, lin)
    )
    ok = at96.required_efficiency is not None and abs(at96.required_efficiency - 0.60) <= 0.05 and dominated
    record(7, ok, f"x2=0.96 quadratic requires {at96.required_efficiency:.3f} (exp 0.60); quadratic <= linear everywhere: {dominated}")
    assert ok


def test_criterion_8_oracle_equivalences():
    start = time.perf_counter()
    results = run_suite("all", seed=0, m=[4, 6])
    elapsed = time.perf_counter() - start
    failed = [r.line() for r in results if not r.passed]
    ok = not failed and elapsed < 120
    record(8, ok, f"{len(results) - len(failed)}/{len(results)} oracle checks passed in {elapsed:.1f} s")
    for r in results:
        if r.suite in ("timebin-equiv", "post-selection-mc"):
            report(r.line())
    assert ok, failed


def test_criterion_9_table_composition():
    cur, near = TABLE_I["current_best"], TABLE_I["near_term"]
    a = compose_efficiencies(cur["sps"], cur["coupling"], cur["dmx"], cur["det"])
    b = compose_efficiencies(near["sps"], near["coupling"], near["dmx"], near["det"])
    ok = round(a, 2) == 0.47 and abs(b - 0.615) <= 0.005
    record(9, ok, f"current best {a:.4f} -> {round(a, 2)}, near term {b:.4f}")
    assert ok
