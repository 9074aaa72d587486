import dataclasses
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bosonbudget.architectures import ArchitectureSpec, Encoding, ModeScaling, input_rate, optimize_hybrid_spatial
from bosonbudget.lossmodel import ExperimentConfig, Infeasible, PhotonCounts, db_to_efficiency, max_lost_photons
from bosonbudget.oracle import exact_sample_probability_ab, exact_sample_probability_linear
from bosonbudget.solver import (
    DEFAULT_X2_GRID,
    ToleratedLossPoint,
    default_counts,
    max_tolerated_loss,
    mean_gap,
    mzi_frontier,
    required_efficiency,
    source_requirement_curve,
    surface_maximum,
    tolerated_loss_surface,
)

CFG = ExperimentConfig()
QUAD = ModeScaling.quadratic()
LIN = ModeScaling.linear(10)


def _exact_rate(cfg, scaling, encoding, counts, loss_db):
    m = scaling.modes(counts.p, counts.l)
    eff = db_to_efficiency(loss_db)
    if scaling.is_linear:
        prob = exact_sample_probability_linear(eff, counts.p, counts.d, m)
    else:
        prob = exact_sample_probability_ab(eff, counts.p, counts.l)
    return prob * input_rate("clements", encoding, counts.p, m, cfg.single_photon_rate)


class TestMaxToleratedLoss:
    def test_quadratic_spatial_reference(self):
        surface = tolerated_loss_surface(CFG, QUAD, "spatial", [0.98])
        assert surface_maximum(surface).max_loss == pytest.approx(3.78, abs=0.05)

    def test_linear_timebin_reference(self):
        surface = tolerated_loss_surface(CFG, LIN, "timebin", [1.0])
        assert surface_maximum(surface).max_loss == pytest.approx(3.39, abs=0.05)

    def test_fixed_counts_frozen(self):
        # independent exact-arithmetic root of the same equation
        assert max_tolerated_loss(CFG, QUAD, "spatial", PhotonCounts(59, 9)) == pytest.approx(3.605294, abs=1e-6)
        assert max_tolerated_loss(CFG, QUAD, "spatial", PhotonCounts(50)) == pytest.approx(2.047509, abs=1e-6)
        assert max_tolerated_loss(CFG, LIN, "spatial", PhotonCounts(59, 9)) == pytest.approx(3.177381, abs=1e-6)

    @pytest.mark.parametrize("scaling", [QUAD, LIN])
    def test_target_at_peak_gives_zero_loss(self, scaling):
        counts = PhotonCounts(50)
        m = scaling.modes(50)
        peak_rate = _exact_rate(CFG, scaling, "spatial", counts, 0.0)
        cfg = dataclasses.replace(CFG, target_sample_rate=peak_rate)
        assert max_tolerated_loss(cfg, scaling, "spatial", counts) == pytest.approx(0.0, abs=1e-6)
        assert m > 0

    def test_unreachable_target(self):
        cfg = dataclasses.replace(CFG, target_sample_rate=1e9)
        with pytest.raises(Infeasible):
            max_tolerated_loss(cfg, QUAD, "spatial", PhotonCounts(59, 9))

    @settings(max_examples=30, deadline=None)
    @given(st.floats(1e-6, 1e3), st.floats(1e-6, 1e3), st.sampled_from([QUAD, LIN]), st.sampled_from(list(Encoding)))
    def test_monotone_in_target_rate(self, a, b, scaling, encoding):
        lo, hi = sorted((a, b))
        counts = PhotonCounts(55, 8)
        loss_lo = max_tolerated_loss(dataclasses.replace(CFG, target_sample_rate=lo), scaling, encoding, counts)
        loss_hi = max_tolerated_loss(dataclasses.replace(CFG, target_sample_rate=hi), scaling, encoding, counts)
        assert loss_hi <= loss_lo + 1e-9

    @settings(max_examples=40, deadline=None)
    @given(st.integers(50, 100), st.floats(0.81, 1.0), st.sampled_from([QUAD, LIN]), st.sampled_from(list(Encoding)))
    def test_residual_against_oracle(self, detected, x2, scaling, encoding):
        l = max_lost_photons(x2, detected, 0.01, 49)
        counts = PhotonCounts(detected + l, l)
        loss = max_tolerated_loss(CFG, scaling, encoding, counts)
        rate = _exact_rate(CFG, scaling, encoding, counts, loss)
        assert abs(rate - CFG.target_sample_rate) / CFG.target_sample_rate < 1e-4
        assert loss >= 0


@pytest.fixture(scope="module")
def surfaces():
    return {
        (s.label(), e): tolerated_loss_surface(CFG, s, e, DEFAULT_X2_GRID[1::4] + (1.0,), range(50, 61, 2))
        for s in (QUAD, LIN)
        for e in ("spatial", "timebin")
    }


@pytest.fixture(scope="module")
def curves():
    grid = [0.8, 0.81, 0.85, 0.9, 0.96, 1.0]
    return {s.label(): source_requirement_curve(CFG, s, grid) for s in (QUAD, LIN)}


class TestSurface:
    def test_infeasible_cells_flagged(self):
        surface = tolerated_loss_surface(CFG, QUAD, "spatial", [0.5, 0.805], [50, 51])
        assert len(surface) == 4
        assert all(not pt.feasible and pt.reason == "error-bound" for pt in surface)

    def test_cell_contents(self, surfaces):
        for pts in surfaces.values():
            for pt in pts:
                assert pt.feasible
                assert pt.l == max_lost_photons(pt.x2, pt.detected, 0.01, 49)
                assert pt.p == pt.detected + pt.l and pt.max_loss >= 0

    def test_ordering_of_cases(self, surfaces):
        top = {k: surface_maximum(v, 1.0).max_loss for k, v in surfaces.items()}
        assert top[("quadratic", "spatial")] > top[("quadratic", "timebin")] > top[("linear10", "spatial")] > top[("linear10", "timebin")]

    def test_monotone_in_x2_after_reoptimising(self, surfaces):
        for pts in surfaces.values():
            xs = sorted({pt.x2 for pt in pts})
            best = [surface_maximum(pts, x).max_loss for x in xs]
            assert all(b2 >= b1 - 1e-9 for b1, b2 in zip(best, best[1:]))

    def test_parallel_ordering(self):
        grid = ([0.9, 0.95, 1.0], [50, 53, 57])
        serial = tolerated_loss_surface(CFG, LIN, "timebin", *grid, jobs=1)
        parallel = tolerated_loss_surface(CFG, LIN, "timebin", *grid, jobs=3)
        assert serial == parallel
        assert [(p.x2, p.detected) for p in serial] == [(x, d) for x in grid[0] for d in grid[1]]

    def test_mean_gap(self):
        a = [ToleratedLossPoint(1.0, 50, 0, 50, 2500, 3.0), ToleratedLossPoint(1.0, 51, 0, 51, 2601, None)]
        b = [ToleratedLossPoint(1.0, 50, 0, 50, 500, 2.5), ToleratedLossPoint(1.0, 51, 0, 51, 510, 2.0)]
        assert mean_gap(a, b) == pytest.approx(0.5)


class TestFrontier:
    def test_default_counts(self):
        assert default_counts("AB") == PhotonCounts(59, 9)
        assert default_counts("AA") == PhotonCounts(50, 0)

    def test_clements_quadratic_infeasible(self):
        (pt,) = mzi_frontier(CFG, ArchitectureSpec("clements"), QUAD, "AB", [0.0035])
        assert pt.optical_depth == 2500
        assert pt.raw_residual == pytest.approx(pt.max_loss - 8.75)
        assert pt.residual_budget is None

    def test_hybrid_spatial_requirement(self):
        (pt,) = mzi_frontier(CFG, ArchitectureSpec("hybrid-spatial"), QUAD, "AB", [0.0035])
        assert required_efficiency(pt.residual_budget) == pytest.approx(0.45, abs=0.05)

    @pytest.mark.parametrize("family", ["clements", "rectangular", "hybrid-spatial", "hybrid-timebin"])
    @pytest.mark.parametrize("mode", ["AB", "AA"])
    def test_lossless_interferometer(self, family, mode):
        (pt,) = mzi_frontier(CFG, ArchitectureSpec(family), LIN, mode, [0.0])
        assert pt.residual_budget == pt.max_loss

    @pytest.mark.parametrize("family", ["rectangular", "hybrid-spatial", "hybrid-timebin"])
    def test_straight_lines(self, family):
        grid = [0.0, 0.001, 0.0035, 0.01, 0.02, 0.055]
        pts = mzi_frontier(CFG, ArchitectureSpec(family), QUAD, "AB", grid)
        d = pts[0].optical_depth
        for a, b in zip(pts, pts[1:]):
            assert (b.raw_residual - a.raw_residual) / (b.mzi_loss - a.mzi_loss) == pytest.approx(-d, abs=1e-9 / 1e-3)
            assert abs(b.raw_residual - (a.max_loss - d * b.mzi_loss)) < 1e-9

    def test_timebin_extra_losses(self):
        arch = ArchitectureSpec("clements", "timebin", 0.0, 0.001, 0.002)
        (pt,) = mzi_frontier(CFG, arch, LIN, "AB", [0.001])
        assert pt.raw_residual == pytest.approx(pt.max_loss - 500 * 0.004)


class TestSourceRequirement:
    def test_reference_point(self, curves):
        (pt,) = [p for p in curves["quadratic"] if p.x2 == 0.96]
        assert pt.required_efficiency == pytest.approx(0.6, abs=0.05)

    def test_below_threshold(self, curves):
        assert curves["quadratic"][0].required_efficiency is None

    def test_quadratic_dominates(self, curves):
        for q, l in zip(curves["quadratic"], curves["linear10"]):
            if q.required_efficiency is not None:
                assert q.required_efficiency <= l.required_efficiency

    def test_budget_composition(self, curves):
        (pt,) = [p for p in curves["quadratic"] if p.x2 == 0.96]
        layout = optimize_hybrid_spatial(pt.p, pt.m)
        loss = max_tolerated_loss(CFG, QUAD, "spatial", PhotonCounts(pt.p, pt.l))
        residual = loss - layout.depth * 0.0035 - 0.458 - 0.458 / 5 * math.ceil(math.log2(pt.p))
        assert pt.required_efficiency == pytest.approx(10 ** (-residual / 10), rel=1e-12)

    def test_detector_override(self):
        base = source_requirement_curve(CFG, QUAD, [0.96])[0]
        lossy = source_requirement_curve(dataclasses.replace(CFG, detector_efficiency=0.95), QUAD, [0.96])[0]
        assert lossy.required_efficiency == pytest.approx(base.required_efficiency / 0.95, rel=1e-9)
