"""Loss-budget solvers: tolerated loss, MZI frontiers and source requirements.

The central quantity is the largest per-photon system loss for which the
post-selected sample rate ``P_sample(P_sys) * r_input`` still meets the
target rate. ``P_sample`` peaks near ``P_sys = (p-l)/p``; the root is taken
on the low-efficiency side of that peak, where the rate falls with loss.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .architectures import (
    ArchitectureSpec,
    Encoding,
    Family,
    ModeScaling,
    depth,
    input_rate,
    optimize_hybrid_spatial,
)
from .lossmodel import (
    ExperimentConfig,
    Infeasible,
    PhotonCounts,
    db_to_efficiency,
    demux_loss,
    efficiency_to_db,
    max_lost_photons,
    sample_probability_ab,
    sample_probability_linear,
)

__all__ = [
    "SamplingMode",
    "ToleratedLossPoint",
    "FrontierPoint",
    "SourceRequirementPoint",
    "DEFAULT_X2_GRID",
    "DEFAULT_DETECTED_GRID",
    "FULL_DETECTED_GRID",
    "MZI_LOSS_PHASE_SHIFTER",
    "MZI_LOSS_SWITCH",
    "FIG6_COUPLING_LOSS",
    "FIG6_SWITCH_LOSS",
    "sampling_probability",
    "max_tolerated_loss",
    "tolerated_loss_surface",
    "surface_maximum",
    "mean_gap",
    "default_counts",
    "mzi_frontier",
    "required_efficiency",
    "source_requirement_curve",
]

# Bisection stops once the bracket is narrower than this (dB).
LOSS_TOLERANCE_DB = 1e-7

DEFAULT_X2_GRID = tuple(round(0.805 + 0.005 * i, 3) for i in range(40))
DEFAULT_DETECTED_GRID = tuple(range(50, 61))
FULL_DETECTED_GRID = tuple(range(50, 101))

# -10 log10(0.987) spread over 16 phase shifters, and 1.1 dB over 20 switches.
MZI_LOSS_PHASE_SHIFTER = -10.0 * math.log10(0.987) / 16
MZI_LOSS_SWITCH = 1.1 / 20
FIG6_MZI_LOSS = 0.0035
FIG6_COUPLING_LOSS = 0.458
FIG6_SWITCH_LOSS = 0.458 / 5


class SamplingMode(str, Enum):
    """Lost-photon sampling (photons may be lost) or lossless post-selection."""

    AB = "AB"
    AA = "AA"


@dataclass(frozen=True)
class ToleratedLossPoint:
    """One cell of a tolerated-loss surface; ``max_loss`` is ``None`` when infeasible."""

    x2: float
    detected: int
    l: int | None
    p: int | None
    m: int | None
    max_loss: float | None
    reason: str = ""

    @property
    def feasible(self) -> bool:
        return self.max_loss is not None


@dataclass(frozen=True)
class FrontierPoint:
    """Residual loss budget outside the interferometer at one MZI loss.

    ``residual_budget`` is ``None`` when the interferometer alone exceeds
    the tolerated loss; ``raw_residual`` keeps the unclipped value.
    """

    mzi_loss: float
    residual_budget: float | None
    raw_residual: float
    optical_depth: int
    max_loss: float


@dataclass(frozen=True)
class SourceRequirementPoint:
    x2: float
    scaling: str
    detected: int | None
    l: int | None
    p: int | None
    m: int | None
    required_efficiency: float | None
    reason: str = ""


def sampling_probability(counts: PhotonCounts, m: int, linear: bool) -> Callable[[float], float]:
    """``P_sample(P_sys)`` for lost-photon sampling (``linear=False``) or clicked-mode post-selection."""
    if linear:
        return lambda eff: sample_probability_linear(eff, counts.p, counts.d, m)
    return lambda eff: sample_probability_ab(eff, counts)


def _peak_efficiency(prob: Callable[[float], float], counts: PhotonCounts, linear: bool) -> float:
    lo = counts.surviving / counts.p
    if not linear or lo >= 1.0:
        return lo
    # The clicked-mode sum shifts the maximum towards P_sys = 1.
    res = minimize_scalar(lambda e: -prob(e), bounds=(lo, 1.0), method="bounded", options={"xatol": 1e-12})
    best = max((lo, 1.0, float(res.x)), key=prob)
    return best


def _solve_loss(prob: Callable[[float], float], peak: float, rate: float, target: float) -> float:
    def excess(loss_db: float) -> float:
        value = prob(db_to_efficiency(loss_db)) * rate
        return math.log(value / target) if value > 0 else -math.inf

    start = efficiency_to_db(peak)
    top = excess(start)
    if -1e-12 < top <= 0:
        # target sits on the peak up to rounding
        return start
    if top < 0:
        raise Infeasible(
            f"peak sample rate {prob(peak) * rate:.6g} Hz is below the target {target:.6g} Hz"
        )
    hi = start + 1.0
    while excess(hi) > 0:
        hi += 2 * (hi - start)
        if hi > 1e4:
            raise Infeasible("tolerated loss exceeds 10^4 dB; rate target is effectively zero")
    return float(brentq(excess, start, hi, xtol=LOSS_TOLERANCE_DB, rtol=1e-15, maxiter=500))


def max_tolerated_loss(
    cfg: ExperimentConfig,
    scaling: ModeScaling,
    encoding: Encoding | str,
    counts: PhotonCounts,
    family: Family | str = Family.CLEMENTS,
) -> float:
    """Largest per-photon loss (dB) meeting the target sample rate.

    Args:
        cfg: rates and thresholds.
        scaling: mode scaling; linear scaling post-selects on ``counts.d`` clicks.
        encoding: sets the input rate (spatial ``r/p``, time-bin ``2r/m``).
        counts: photon numbers, normally with ``l`` from ``max_lost_photons``.
        family: only used for the input rate of hybrid layouts.

    Returns:
        Loss in dB.

    Raises:
        Infeasible: if even the best operating point misses the target rate.
    """
    m = scaling.modes(counts.p, counts.l)
    linear = scaling.is_linear
    if linear and counts.d > m:
        raise Infeasible(f"{counts.d} clicks do not fit in {m} modes")
    prob = sampling_probability(counts, m, linear)
    rate = input_rate(family, encoding, counts.p, m, cfg.single_photon_rate)
    peak = _peak_efficiency(prob, counts, linear)
    return _solve_loss(prob, peak, rate, cfg.target_sample_rate)


def _surface_cell(args) -> ToleratedLossPoint:
    cfg, scaling, encoding, x2, detected = args
    cell_cfg = dataclasses.replace(cfg, indistinguishability_x2=x2)
    try:
        l = max_lost_photons(x2, detected, cfg.error_threshold, cfg.permanent_order)
    except Infeasible:
        return ToleratedLossPoint(x2, detected, None, None, None, None, "error-bound")
    p = detected + l
    m = scaling.modes(p, l)
    try:
        loss = max_tolerated_loss(cell_cfg, scaling, encoding, PhotonCounts(p, l))
    except Infeasible:
        return ToleratedLossPoint(x2, detected, l, p, m, None, "rate")
    return ToleratedLossPoint(x2, detected, l, p, m, loss)


def tolerated_loss_surface(
    cfg: ExperimentConfig,
    scaling: ModeScaling,
    encoding: Encoding | str,
    x2_grid: Sequence[float] = DEFAULT_X2_GRID,
    detected_grid: Sequence[int] = DEFAULT_DETECTED_GRID,
    jobs: int = 1,
) -> list[ToleratedLossPoint]:
    """Tolerated loss on an (x2, detected) grid with ``l`` maximised per cell.

    Rows come back x2-major in grid order regardless of ``jobs``.
    """
    if any(d < 1 for d in detected_grid):
        raise ValueError("detected photon numbers must be >= 1")
    tasks = [(cfg, scaling, Encoding(encoding), float(x2), int(d)) for x2 in x2_grid for d in detected_grid]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_surface_cell, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    return [_surface_cell(t) for t in tasks]


def surface_maximum(points: Sequence[ToleratedLossPoint], x2: float | None = None) -> ToleratedLossPoint | None:
    """Feasible cell with the largest tolerated loss, optionally restricted to one x2."""
    pool = [pt for pt in points if pt.feasible and (x2 is None or math.isclose(pt.x2, x2))]
    return max(pool, key=lambda pt: pt.max_loss) if pool else None


def mean_gap(a: Sequence[ToleratedLossPoint], b: Sequence[ToleratedLossPoint]) -> float:
    """Mean of ``a - b`` over cells feasible in both surfaces (same grid)."""
    index = {(pt.x2, pt.detected): pt for pt in b if pt.feasible}
    diffs = [pt.max_loss - index[(pt.x2, pt.detected)].max_loss
             for pt in a if pt.feasible and (pt.x2, pt.detected) in index]
    if not diffs:
        raise ValueError("surfaces share no feasible cells")
    return float(np.mean(diffs))


def default_counts(mode: SamplingMode | str) -> PhotonCounts:
    """Photon numbers used for frontiers: 59 in / 9 lost, or 50 in / none lost."""
    return PhotonCounts(59, 9) if SamplingMode(mode) is SamplingMode.AB else PhotonCounts(50, 0)


def mzi_frontier(
    cfg: ExperimentConfig,
    arch: ArchitectureSpec,
    scaling: ModeScaling,
    sampling_mode: SamplingMode | str,
    mzi_grid: Sequence[float],
    counts: PhotonCounts | None = None,
) -> list[FrontierPoint]:
    """Residual budget ``max_loss - rho_int(rho_MZI)`` along a grid of MZI losses.

    Raises:
        Infeasible: if the rate target cannot be met even without interferometer loss.
    """
    counts = counts or default_counts(sampling_mode)
    m = scaling.modes(counts.p, counts.l)
    max_loss = max_tolerated_loss(cfg, scaling, arch.encoding, counts, arch.family)
    layout = None
    if arch.family is Family.HYBRID_SPATIAL:
        layout = optimize_hybrid_spatial(counts.p, m, arch.sub_interferometer)
    points = []
    for rho in mzi_grid:
        report = depth(arch.with_mzi_loss(float(rho)), counts.p, m, cfg.single_photon_rate, layout)
        layout = report.layout
        raw = max_loss - report.interferometer_loss
        points.append(FrontierPoint(float(rho), raw if raw >= 0 else None, raw, report.optical_depth, max_loss))
    return points


def required_efficiency(residual_db: float | None) -> float | None:
    """Combined efficiency the rest of the system needs to fit a residual budget."""
    if residual_db is None or residual_db < 0:
        return None
    return db_to_efficiency(residual_db)


def _source_point(cfg, scaling, x2, detected_grid, mzi_loss, coupling_loss, switch_loss, sub) -> SourceRequirementPoint:
    cell_cfg = dataclasses.replace(cfg, indistinguishability_x2=x2)
    det_db = efficiency_to_db(cfg.detector_efficiency)
    best = None
    for detected in detected_grid:
        try:
            l = max_lost_photons(x2, detected, cfg.error_threshold, cfg.permanent_order)
        except Infeasible:
            continue
        p = detected + l
        m = scaling.modes(p, l)
        try:
            loss = max_tolerated_loss(cell_cfg, scaling, Encoding.SPATIAL, PhotonCounts(p, l), Family.HYBRID_SPATIAL)
        except Infeasible:
            continue
        layout = optimize_hybrid_spatial(p, m, sub)
        residual = loss - layout.depth * mzi_loss - demux_loss(p, switch_loss) - coupling_loss - det_db
        if residual < 0:
            continue
        eff = db_to_efficiency(residual)
        if best is None or eff < best.required_efficiency:
            best = SourceRequirementPoint(x2, scaling.label(), detected, l, p, m, eff)
    if best is None:
        return SourceRequirementPoint(x2, scaling.label(), None, None, None, None, None, "no feasible photon number")
    return best


def source_requirement_curve(
    cfg: ExperimentConfig,
    scaling: ModeScaling,
    x2_grid: Sequence[float] = DEFAULT_X2_GRID,
    detected_grid: Sequence[int] = DEFAULT_DETECTED_GRID,
    mzi_loss: float = FIG6_MZI_LOSS,
    coupling_loss: float = FIG6_COUPLING_LOSS,
    switch_loss: float = FIG6_SWITCH_LOSS,
    sub_interferometer: str = "rectangular",
    jobs: int = 1,
) -> list[SourceRequirementPoint]:
    """Minimum single-photon source efficiency per x2 for a hybrid spatial interferometer.

    For each x2 the detected photon number is chosen to minimise the
    requirement, with ``l`` maximised as in the surface protocol. The
    budget subtracts interferometer, demultiplexer (``switch_loss`` per tree
    level), coupling and detector losses from the tolerated loss.
    """
    tasks = [(cfg, scaling, float(x2), tuple(detected_grid), mzi_loss, coupling_loss, switch_loss, sub_interferometer)
             for x2 in x2_grid]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_source_star, tasks))
    return [_source_star(t) for t in tasks]


def _source_star(args) -> SourceRequirementPoint:
    return _source_point(*args)
