"""Validation suites comparing the closed-form models with brute force."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from ..architectures import Family, build_timebin_program, mzi_count, optical_depth, spatial_mesh_layout
from ..lossmodel import PhotonCounts, post_selection_efficiency, sample_probability_ab, sample_probability_linear
from .exact import (
    exact_post_selection,
    exact_sample_probability_ab,
    exact_sample_probability_linear,
    validate_post_selection_formula,
)
from .fock import coherence_rank, complexity_score, enumerate_fock, is_collision_free, uniform_post_selection
from .mesh import expand_spatial_mesh, expand_timebin_program, match_rows
from .permanent import naive_permanent, permanent
from .unitary import SWAP, haar_unitary, make_rng, mzi_matrix, output_distribution, random_settings, unitarity_error


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        tail = f"  {self.detail}" if self.detail else ""
        return f"{status}  {self.suite}/{self.name}{tail}"


def _permanent_suite(seed: int, **_) -> Iterator[CheckResult]:
    s = "permanent"
    yield CheckResult(s, "identity-3", permanent(np.eye(3, dtype=int)) == 1)
    yield CheckResult(s, "ones-2", permanent(np.ones((2, 2), dtype=int)) == 2)
    yield CheckResult(s, "example-2x2", permanent(np.array([[1, 2], [3, 4]])) == 10)
    rng = make_rng(seed)
    exact_ok = all(
        permanent(a) == naive_permanent(a)
        for n in range(1, 7)
        for a in (rng.integers(-5, 6, size=(n, n)) for _ in range(5))
    )
    yield CheckResult(s, "integer-vs-naive", exact_ok, "n <= 6, exact")
    worst = 0.0
    for n in range(1, 7):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        worst = max(worst, abs(permanent(a) - naive_permanent(a)))
    yield CheckResult(s, "complex-vs-naive", worst < 1e-10, f"max |diff| = {worst:.2e}")
    a = rng.integers(-4, 5, size=(4, 4))
    r1, r2 = rng.integers(-4, 5, size=4), rng.integers(-4, 5, size=4)
    b, c, d = a.copy(), a.copy(), a.copy()
    b[0], c[0], d[0] = r1, r2, 3 * r1 - 2 * r2
    yield CheckResult(s, "row-multilinearity", permanent(d) == 3 * permanent(b) - 2 * permanent(c))


def _haar_suite(seed: int, **_) -> Iterator[CheckResult]:
    s = "haar"
    u1 = haar_unitary(1, seed)
    yield CheckResult(s, "m1-unimodular", abs(abs(u1[0, 0]) - 1) < 1e-12)
    err = max(unitarity_error(haar_unitary(16, seed + k)) for k in range(5))
    yield CheckResult(s, "unitary-16", err < 1e-10, f"max err {err:.1e}")
    same = np.array_equal(haar_unitary(5, seed), haar_unitary(5, seed))
    yield CheckResult(s, "deterministic", same)


def _eq7_suite(**_) -> Iterator[CheckResult]:
    s = "eq7"
    mismatches = []
    checked = 0
    for n in range(1, 5):
        for m in range(n, 9):
            for d in range(1, n + 1):
                enum = uniform_post_selection(n, 0, d, m)
                closed = exact_post_selection(n, d, m)
                model = post_selection_efficiency(PhotonCounts(n, 0, d), m)
                checked += 1
                if enum != closed or abs(model - float(closed)) > 1e-12:
                    mismatches.append((n, d, m))
    yield CheckResult(s, "enumeration-exact", not mismatches, f"{checked} cases, mismatches {mismatches[:3]}")
    yield CheckResult(s, "example-2-2-2", uniform_post_selection(2, 0, 2, 2) == exact_post_selection(2, 2, 2) == Fraction(1, 3))


def _appendix_a_suite(**_) -> Iterator[CheckResult]:
    s = "appendix-a"
    yield CheckResult(s, "example-111", complexity_score((1, 1, 1)) == 8)
    yield CheckResult(s, "example-21", complexity_score((2, 1)) == 6)
    yield CheckResult(s, "example-5", complexity_score((5,)) == 6)
    ok_prod = ok_iff = ok_bound = True
    count = 0
    for m in range(1, 9):
        for n in range(0, 9):
            for state in enumerate_fock(m, n):
                score = complexity_score(state)
                count += 1
                ok_prod &= score == math.prod(1 + k for k in state)
                ok_iff &= (score == 2**n) == is_collision_free(state)
                ok_bound &= score >= 2 ** coherence_rank(state)
    yield CheckResult(s, "product-identity", ok_prod, f"{count} states")
    yield CheckResult(s, "collision-free-iff", ok_iff)
    yield CheckResult(s, "coherence-bound", ok_bound)


def _appendix_b_suite(**_) -> Iterator[CheckResult]:
    s = "appendix-b"
    ok_full = ok_bucket = True
    for m in range(1, 11):
        for n in range(1, 5):
            states = enumerate_fock(m, n)
            ok_full &= len(states) == math.comb(m + n - 1, n)
            for d in range(1, n + 1):
                bucket = sum(1 for st in states if coherence_rank(st) == d)
                ok_bucket &= bucket == math.comb(m, d) * math.comb(n - 1, n - d)
    yield CheckResult(s, "full-count", ok_full, "M <= 10, N <= 4")
    yield CheckResult(s, "bucket-count", ok_bucket)
    yield CheckResult(s, "example-M10-N4", len(enumerate_fock(10, 4)) == 715)


def _hom_suite(**_) -> Iterator[CheckResult]:
    s = "hom"
    p11 = output_distribution(mzi_matrix(math.pi / 2, 0.0), (1, 1))[(1, 1)]
    yield CheckResult(s, "balanced-mzi", abs(p11) < 1e-12, f"P(1,1) = {p11:.1e}")
    swap = mzi_matrix(0.0, 0.0)
    yield CheckResult(s, "swap-up-to-phase", np.allclose(swap, 1j * SWAP, atol=1e-12))
    yield CheckResult(s, "swap-moves-photon", abs(output_distribution(swap, (1, 0))[(0, 1)] - 1) < 1e-12)


def _mesh_suite(seed: int, **_) -> Iterator[CheckResult]:
    s = "mesh"
    bar = mzi_matrix(math.pi, 0.0)
    yield CheckResult(s, "bar-state", np.allclose(np.abs(bar), np.eye(2), atol=1e-12) and unitarity_error(bar) < 1e-12)
    worst, counts_ok = 0.0, True
    for m in range(2, 11):
        settings = random_settings(mzi_count(Family.CLEMENTS, m, m), seed + m)
        worst = max(worst, unitarity_error(expand_spatial_mesh(Family.CLEMENTS, m, m, settings)))
        counts_ok &= spatial_mesh_layout(Family.CLEMENTS, m, m).depth == optical_depth(Family.CLEMENTS, m, m)
    yield CheckResult(s, "clements-unitary", worst < 1e-10, f"m <= 10, max err {worst:.1e}")
    yield CheckResult(s, "clements-depth", counts_ok)
    iso_ok = conn_ok = depth_ok = True
    for m in range(1, 13):
        for p in range(1, m + 1):
            a = expand_spatial_mesh(Family.RECTANGULAR, p, m, seed=seed + 100 * m + p)
            iso_ok &= np.max(np.abs(a @ a.conj().T - np.eye(p))) < 1e-10
            conn_ok &= bool(np.min(np.abs(a)) > 1e-9)
            depth_ok &= spatial_mesh_layout(Family.RECTANGULAR, p, m).depth == optical_depth(Family.RECTANGULAR, p, m)
    yield CheckResult(s, "rectangular-isometry", iso_ok, "p <= m <= 12")
    yield CheckResult(s, "rectangular-connectivity", conn_ok)
    yield CheckResult(s, "rectangular-depth", depth_ok)
    try:
        expand_spatial_mesh(Family.CLEMENTS, 4, 4, random_settings(3, seed))
        rejected = False
    except ValueError:
        rejected = True
    yield CheckResult(s, "settings-count-guard", rejected)


def _timebin_suite(seed: int, m: list[int] | None = None, **_) -> Iterator[CheckResult]:
    s = "timebin-equiv"
    for size in m or [4, 6]:
        prog = build_timebin_program(Family.CLEMENTS, size, size)
        settings = random_settings(prog.n_settings, seed + size)
        spatial = expand_spatial_mesh(Family.CLEMENTS, size, size, settings)
        timebin = expand_timebin_program(prog, settings)
        match = match_rows(timebin, spatial)
        ok = match.max_deviation < 1e-9 and unitarity_error(timebin) < 1e-10
        yield CheckResult(s, f"clements-m{size}", ok,
                          f"permutation {list(match.perm)}, max dev {match.max_deviation:.1e}, seed {seed + size}")
    bar = [(math.pi, 0.0)] * build_timebin_program(Family.CLEMENTS, 6, 6).n_settings
    u = expand_timebin_program(build_timebin_program(Family.CLEMENTS, 6, 6), bar)
    mags = np.abs(u)
    is_perm = np.allclose(np.sort(mags, axis=1)[:, -1], 1.0) and np.allclose(mags.sum(axis=0), 1.0)
    yield CheckResult(s, "all-bar-permutation", bool(is_perm))
    counts_ok = all(
        build_timebin_program(Family.CLEMENTS, size, size).physical_mzis == optical_depth(Family.CLEMENTS, size, size)
        for size in range(2, 41, 2)
    )
    yield CheckResult(s, "clements-physical-mzis", counts_ok, "even m <= 40")
    rect_ok = all(
        build_timebin_program(Family.RECTANGULAR, p, size).physical_mzis
        == optical_depth(Family.RECTANGULAR, p, size, "timebin")
        for size in range(2, 41, 2)
        for p in range(1, size // 2 + 1)
    )
    yield CheckResult(s, "rectangular-physical-mzis", rect_ok, "even m <= 40")
    worst = 0.0
    for size, p in ((4, 2), (6, 2), (8, 3), (10, 3)):
        worst = max(worst, unitarity_error(expand_timebin_program(build_timebin_program(Family.RECTANGULAR, p, size), seed=seed)))
    yield CheckResult(s, "rectangular-unitary", worst < 1e-10, f"max err {worst:.1e}")


def _normalization_suite(seed: int, **_) -> Iterator[CheckResult]:
    s = "normalization"
    worst = 0.0
    for p in (1, 2, 5, 17, 59, 100):
        for eff in (0.05, 0.3, 0.5, 0.83, 0.99):
            total = sum(sample_probability_ab(eff, PhotonCounts(p, l)) for l in range(p)) + (1 - eff) ** p
            worst = max(worst, abs(total - 1))
    yield CheckResult(s, "lost-photon-sum", worst < 1e-10, f"max |sum - 1| = {worst:.1e}")
    worst = 0.0
    for n in range(1, 13):
        for m in range(n, 13):
            total = sum(post_selection_efficiency(PhotonCounts(n, 0, d), m) for d in range(1, n + 1))
            worst = max(worst, abs(total - 1))
    yield CheckResult(s, "post-selection-sum", worst < 1e-10, f"1 <= p-l <= m <= 12, max dev {worst:.1e}")
    rng = make_rng(seed)
    worst = 0.0
    for m in range(2, 9):
        for n in range(1, 5):
            state = [0] * m
            for mode in rng.integers(0, m, size=n):
                state[mode] += 1
            dist = output_distribution(haar_unitary(m, rng=rng), tuple(state))
            worst = max(worst, abs(sum(dist.values()) - 1))
    yield CheckResult(s, "distribution-sum", worst < 1e-8, f"N <= 4, M <= 8, max dev {worst:.1e}")
    worst = 0.0
    for p, d, m, eff in ((59, 50, 500, 0.45), (60, 50, 2500, 0.6), (12, 9, 40, 0.8), (5, 3, 6, 0.3)):
        a = sample_probability_linear(eff, p, d, m)
        worst = max(worst, abs(a - exact_sample_probability_linear(eff, p, d, m)) / a)
        for l in (0, p - d):
            b = sample_probability_ab(eff, PhotonCounts(p, l))
            worst = max(worst, abs(b - exact_sample_probability_ab(eff, p, l)) / b)
    yield CheckResult(s, "closed-vs-exact", worst < 1e-10, f"max rel dev {worst:.1e}")


def _post_selection_mc_suite(seed: int, trials: int = 2000, **_) -> Iterator[CheckResult]:
    s = "post-selection-mc"
    for p, l, d, m in ((2, 0, 2, 2), (3, 0, 3, 9), (3, 1, 2, 4)):
        rep = validate_post_selection_formula(p, l, d, m, trials=trials, seed=seed)
        sigma = abs(rep.haar_mc - float(rep.closed_form)) / rep.stderr if rep.stderr > 0 else 0.0
        detail = (f"exact {rep.uniform_exact} = {float(rep.uniform_exact):.6g}, Haar MC {rep.haar_mc:.6g} "
                  f"+/- {rep.stderr:.2g} ({sigma:.1f} sigma, trials {trials}, seed {seed})")
        # Only the exact identity is judged; the Monte Carlo value is reported.
        yield CheckResult(s, f"p{p}-l{l}-d{d}-m{m}", rep.exact_match, detail)


SUITES: dict[str, Callable[..., Iterator[CheckResult]]] = {
    "permanent": _permanent_suite,
    "haar": _haar_suite,
    "eq7": _eq7_suite,
    "appendix-a": _appendix_a_suite,
    "appendix-b": _appendix_b_suite,
    "hom": _hom_suite,
    "mesh": _mesh_suite,
    "timebin-equiv": _timebin_suite,
    "normalization": _normalization_suite,
    "post-selection-mc": _post_selection_mc_suite,
}


def run_suite(name: str, seed: int = 0, **options) -> list[CheckResult]:
    """Run one suite (or ``"all"``) and collect its check results."""
    names = list(SUITES) if name == "all" else [name]
    results = []
    for suite in names:
        if suite not in SUITES:
            raise KeyError(f"unknown suite {suite!r}")
        results.extend(SUITES[suite](seed=seed, **options))
    return results
