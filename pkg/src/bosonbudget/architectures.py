"""Optical depth, loss and input-rate models for interferometer architectures.

Covers spatial Clements and Rectangular meshes, their time-bin
counterparts, hybrid (multi-encoding) layouts and the symbolic time-bin
column programs. Mesh layouts here are the single source of MZI counts;
the oracle package only expands them into matrices.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

from .lossmodel import Infeasible, demux_depth

__all__ = [
    "Family",
    "Encoding",
    "ModeScaling",
    "ArchitectureSpec",
    "HybridSpatialLayout",
    "HybridTimeBinLayout",
    "DepthReport",
    "MeshLayout",
    "BinOp",
    "TimeBinColumn",
    "TimeBinProgram",
    "LoopPenalties",
    "clements_depth",
    "rectangular_depth",
    "timebin_rectangular_depth",
    "spatial_mesh_layout",
    "mzi_count",
    "hybrid_timebin_depth",
    "optimize_hybrid_timebin",
    "optimize_hybrid_spatial",
    "optical_depth",
    "input_rate",
    "timebin_effective_mzi_loss",
    "depth",
    "timebin_vs_spatial_threshold",
    "build_timebin_program",
    "loop_penalties",
]


class Family(str, enum.Enum):
    CLEMENTS = "clements"
    RECTANGULAR = "rectangular"
    HYBRID_SPATIAL = "hybrid-spatial"
    HYBRID_TIMEBIN = "hybrid-timebin"


class Encoding(str, enum.Enum):
    SPATIAL = "spatial"
    TIMEBIN = "timebin"


def _ceil_half(x: int) -> int:
    return -(-x // 2)


@dataclass(frozen=True)
class ModeScaling:
    """Number of interferometer modes as a function of surviving photons.

    ``kind`` is ``"quadratic"`` (m = (p-l)^2) or ``"linear"`` (m = ceil(c (p-l))).
    """

    kind: str = "quadratic"
    coefficient: float = 10.0

    def __post_init__(self):
        if self.kind not in ("quadratic", "linear"):
            raise ValueError(f"unknown mode scaling {self.kind!r}")
        if self.kind == "linear" and self.coefficient < 1:
            raise ValueError("linear coefficient must be >= 1")

    @classmethod
    def quadratic(cls) -> "ModeScaling":
        return cls("quadratic")

    @classmethod
    def linear(cls, coefficient: float = 10.0) -> "ModeScaling":
        return cls("linear", coefficient)

    @property
    def is_linear(self) -> bool:
        return self.kind == "linear"

    def modes(self, p: int, l: int = 0) -> int:
        n = p - l
        if n < 1:
            raise ValueError("need at least one surviving photon")
        if self.kind == "quadratic":
            return n * n
        return math.ceil(self.coefficient * n - 1e-9)

    def label(self) -> str:
        if self.kind == "quadratic":
            return "quadratic"
        return f"linear{self.coefficient:g}"


@dataclass(frozen=True)
class ArchitectureSpec:
    """Interferometer family plus the per-component losses that feed its budget.

    ``encoding`` only matters for Clements and Rectangular. The propagation
    and inter-stage coupling losses only apply to time-bin sections.
    """

    family: Family = Family.CLEMENTS
    encoding: Encoding = Encoding.SPATIAL
    mzi_loss: float = 0.0
    prop_loss_per_bin: float = 0.0
    interstage_coupling_loss: float = 0.0
    sub_interferometer: str = "rectangular"

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "encoding", Encoding(self.encoding))
        if min(self.mzi_loss, self.prop_loss_per_bin, self.interstage_coupling_loss) < 0:
            raise ValueError("losses must be non-negative")
        if self.sub_interferometer not in ("rectangular", "clements"):
            raise ValueError("sub_interferometer must be 'rectangular' or 'clements'")

    @property
    def uses_timebins(self) -> bool:
        return self.family is Family.HYBRID_TIMEBIN or (
            self.family in (Family.CLEMENTS, Family.RECTANGULAR) and self.encoding is Encoding.TIMEBIN
        )

    def with_mzi_loss(self, mzi_loss: float) -> "ArchitectureSpec":
        return ArchitectureSpec(
            self.family, self.encoding, mzi_loss, self.prop_loss_per_bin,
            self.interstage_coupling_loss, self.sub_interferometer,
        )


@dataclass(frozen=True)
class HybridSpatialLayout:
    """Two spatial encodings with ``m1 x m2`` output modes.

    The photons enter on a ``p1 x p2`` block of input modes, so each
    Rectangular sub-interferometer of encoding ``i`` has ``p_i`` inputs.
    """

    m1: int
    m2: int
    p1: int
    p2: int
    depth: int
    sub_interferometer: str = "rectangular"

    @property
    def modes(self) -> int:
        return self.m1 * self.m2


@dataclass(frozen=True)
class HybridTimeBinLayout:
    n: int
    m1: int
    m2: int
    time_bins: int
    depth: int

    @property
    def modes(self) -> int:
        return self.m1 * self.m2 * self.time_bins

    @property
    def timebin_depth(self) -> int:
        return 2 * self.time_bins


@dataclass(frozen=True)
class DepthReport:
    optical_depth: int
    interferometer_loss: float
    input_rate: float
    total_modes_realized: int
    layout: HybridSpatialLayout | HybridTimeBinLayout | None = None


def clements_depth(m: int) -> int:
    return m


def rectangular_depth(p: int, m: int) -> int:
    """Column count of a spatial Rectangular mesh with ``p`` inputs and ``m`` outputs."""
    if not 1 <= p <= m:
        raise Infeasible(f"Rectangular mesh needs 1 <= p <= m, got p={p}, m={m}")
    return _ceil_half(m) + _ceil_half(p) - 1


def timebin_rectangular_depth(p: int, m: int) -> int:
    """Physical MZI count of the time-bin Rectangular interferometer (2p input modes)."""
    if m % 2:
        raise Infeasible(f"time-bin interferometers need an even mode count, got m={m}")
    if m < 2 * p:
        raise Infeasible(f"time-bin Rectangular mesh needs m >= 2p, got p={p}, m={m}")
    return (m + 2 * p) // 2 - 1


@dataclass(frozen=True)
class MeshLayout:
    """Brick-wall MZI mesh: each column lists the lower mode index of its MZIs."""

    m: int
    inputs: tuple[int, ...]
    columns: tuple[tuple[int, ...], ...]

    @property
    def mzi_count(self) -> int:
        return sum(len(c) for c in self.columns)

    @property
    def depth(self) -> int:
        return len(self.columns)


def _clements_layout(m: int) -> MeshLayout:
    cols = tuple(tuple(range(c % 2, m - 1, 2)) for c in range(m))
    return MeshLayout(m, tuple(range(m)), cols)


def _rectangular_layout(p: int, m: int) -> MeshLayout:
    # Inputs sit in the middle; the first column pairs the first input with
    # its upper neighbour and only MZIs inside the light cone are kept.
    ncols = rectangular_depth(p, m)
    start = (m - p) // 2
    inputs = tuple(range(start, start + p))
    lo, hi = start, start + p - 1
    cols = []
    for c in range(ncols):
        parity = (start + c) % 2
        col = tuple(i for i in range(parity, m - 1, 2) if i + 1 >= lo and i <= hi)
        cols.append(col)
        if col:
            lo = min(lo, col[0])
            hi = max(hi, col[-1] + 1)
    return MeshLayout(m, inputs, tuple(cols))


def spatial_mesh_layout(family: Family | str, p: int, m: int) -> MeshLayout:
    family = Family(family)
    if family is Family.CLEMENTS:
        if m < 1:
            raise ValueError("m must be >= 1")
        return _clements_layout(m)
    if family is Family.RECTANGULAR:
        return _rectangular_layout(p, m)
    raise ValueError(f"no single-encoding mesh layout for {family.value}")


def mzi_count(family: Family | str, p: int, m: int) -> int:
    return spatial_mesh_layout(family, p, m).mzi_count


def hybrid_timebin_depth(n: int, p: int, m1: int, m2: int) -> int:
    """Depth of demultiplexer (depth ``n``) + time-bin stage + two spatial encodings."""
    if n < 1 or m1 < 2 or m2 < 2:
        raise ValueError("need n >= 1 and m1, m2 >= 2")
    time_bins = -(-p // 2**n)
    return n + 2 * time_bins + _ceil_half(m1) + _ceil_half(m2) + 2**n // 2


def _minimal_pairs(target: int):
    # (m1, m2) with m1 <= m2, m1 * m2 >= target, and neither factor reducible.
    m1 = 2
    while True:
        m2 = max(2, -(-target // m1))
        if m2 < m1:
            break
        if (m1 - 1) * m2 < target or m1 == 2:
            yield m1, m2
        m1 += 1


@lru_cache(maxsize=4096)
def optimize_hybrid_timebin(p: int, target_m: int) -> HybridTimeBinLayout:
    """Minimise the hybrid time-bin depth subject to ``m1 m2 ceil(p/2^n) >= target_m``.

    Searches every demultiplexer depth ``n`` in ``[1, ceil(log2 p)]`` and every
    irreducible ``m1 <= m2`` split. Ties go to the smaller ``n``, then the
    more balanced split, then the smaller mode product.
    """
    if target_m < p or p < 1:
        raise Infeasible(f"need target_m >= p >= 1, got p={p}, target_m={target_m}")
    best_key, best = None, None
    for n in range(1, max(1, demux_depth(p)) + 1):
        time_bins = -(-p // 2**n)
        need = -(-target_m // time_bins)
        for m1, m2 in _minimal_pairs(need):
            d = hybrid_timebin_depth(n, p, m1, m2)
            key = (d, n, m2 - m1, m1 * m2)
            if best_key is None or key < best_key:
                best_key, best = key, HybridTimeBinLayout(n, m1, m2, time_bins, d)
    return best


def _input_block(p: int, m1: int, m2: int, sub: str) -> tuple[int, int, int] | None:
    # Cheapest p1 x p2 >= p block of input modes; returns (cost, p1, p2).
    if sub == "clements":
        p1 = min(m1, p)
        p2 = -(-p // p1)
        return (0, p1, p2) if p2 <= m2 else None
    best = None
    for p1 in range(1, min(m1, p) + 1):
        p2 = -(-p // p1)
        if p2 > m2:
            continue
        key = (_ceil_half(p1) + _ceil_half(p2) - 2, abs(p2 - p1), p1)
        if best is None or key < best:
            best = key
    return None if best is None else (best[0], best[2], -(-p // best[2]))


def _sub_depth(m_i: int, sub: str) -> int:
    return m_i if sub == "clements" else _ceil_half(m_i)


@lru_cache(maxsize=4096)
def optimize_hybrid_spatial(p: int, target_m: int, sub: str = "rectangular") -> HybridSpatialLayout:
    """Cheapest two-encoding spatial layout with at least ``target_m`` modes.

    With Rectangular sub-interferometers encoding ``i`` costs
    ``ceil(m_i/2) + ceil(p_i/2) - 1`` where ``p_i`` is the side of the input
    block. Ties go to the more balanced split, then the smaller mode product.
    """
    if target_m < p or p < 1:
        raise Infeasible(f"need target_m >= p >= 1, got p={p}, target_m={target_m}")
    best_key, best = None, None
    for m1, m2 in _minimal_pairs(max(target_m, 4)):
        block = _input_block(p, m1, m2, sub)
        if block is None:
            continue
        cost, p1, p2 = block
        d = _sub_depth(m1, sub) + _sub_depth(m2, sub) + cost
        key = (d, m2 - m1, m1 * m2)
        if best_key is None or key < best_key:
            best_key, best = key, HybridSpatialLayout(m1, m2, p1, p2, d, sub)
    if best is None:
        raise Infeasible(f"no hybrid spatial layout for p={p}, target_m={target_m}")
    return best


def hybrid_spatial_depth(p: int, m1: int, m2: int, sub: str = "rectangular") -> HybridSpatialLayout:
    """Depth of a fixed ``m1 x m2`` hybrid spatial interferometer."""
    block = _input_block(p, m1, m2, sub)
    if block is None:
        raise Infeasible(f"{p} photons do not fit a {m1}x{m2} hybrid interferometer")
    cost, p1, p2 = block
    return HybridSpatialLayout(m1, m2, p1, p2, _sub_depth(m1, sub) + _sub_depth(m2, sub) + cost, sub)


def optical_depth(family: Family | str, p: int, m: int, encoding: Encoding | str = Encoding.SPATIAL) -> int:
    """Number of MZIs a photon traverses, without hybrid layout details."""
    family, encoding = Family(family), Encoding(encoding)
    if m < p:
        raise Infeasible(f"need m >= p, got p={p}, m={m}")
    if family is Family.CLEMENTS:
        if encoding is Encoding.TIMEBIN and m % 2:
            raise Infeasible(f"time-bin interferometers need an even mode count, got m={m}")
        return clements_depth(m)
    if family is Family.RECTANGULAR:
        if encoding is Encoding.TIMEBIN:
            return timebin_rectangular_depth(p, m)
        return rectangular_depth(p, m)
    if family is Family.HYBRID_SPATIAL:
        return optimize_hybrid_spatial(p, m).depth
    return optimize_hybrid_timebin(p, m).depth


def input_rate(family: Family | str, encoding: Encoding | str, p: int, m: int, single_photon_rate: float) -> float:
    """Multi-photon input-state generation rate in Hz."""
    family, encoding = Family(family), Encoding(encoding)
    if p < 1 or m < 2:
        raise ValueError("need p >= 1 and m >= 2")
    if family in (Family.CLEMENTS, Family.RECTANGULAR) and encoding is Encoding.TIMEBIN:
        return 2.0 * single_photon_rate / m
    # demultiplexed sources, and hybrid time-bin layouts without empty bins
    return single_photon_rate / p


def timebin_effective_mzi_loss(spec: ArchitectureSpec) -> float:
    """Per-MZI loss including one bin of delay and the inter-stage coupling."""
    return spec.mzi_loss + spec.prop_loss_per_bin + spec.interstage_coupling_loss


def depth(
    arch: ArchitectureSpec,
    p: int,
    m: int,
    single_photon_rate: float = 1e9,
    layout: HybridSpatialLayout | HybridTimeBinLayout | None = None,
) -> DepthReport:
    """Depth, interferometer loss and input rate of ``arch`` for ``p`` photons in ``m`` modes.

    Hybrid layouts are optimised for ``m`` unless one is passed in.
    """
    if m < p:
        raise Infeasible(f"need m >= p, got p={p}, m={m}")
    family = arch.family
    rate = input_rate(family, arch.encoding, p, m, single_photon_rate)
    if family is Family.HYBRID_SPATIAL:
        if layout is None:
            layout = optimize_hybrid_spatial(p, m, arch.sub_interferometer)
        loss = layout.depth * arch.mzi_loss
        return DepthReport(layout.depth, loss, rate, layout.modes, layout)
    if family is Family.HYBRID_TIMEBIN:
        if layout is None:
            layout = optimize_hybrid_timebin(p, m)
        extra = arch.prop_loss_per_bin + arch.interstage_coupling_loss
        loss = layout.depth * arch.mzi_loss + layout.timebin_depth * extra
        return DepthReport(layout.depth, loss, rate, layout.modes, layout)
    d = optical_depth(family, p, m, arch.encoding)
    per_mzi = timebin_effective_mzi_loss(arch) if arch.uses_timebins else arch.mzi_loss
    return DepthReport(d, d * per_mzi, rate, m)


def timebin_vs_spatial_threshold(
    p: int, optical_depth: int, delta_db: float, prop_loss: float = 0.0, demux_depth: int = 6
) -> float:
    """MZI loss below which a demultiplexed spatial mesh beats the time-bin mesh.

    Balances ``demux_depth`` switch MZIs plus a ``p - 1`` bin delay against
    one bin of delay per interferometer MZI and the rate penalty ``delta_db``.
    """
    return ((optical_depth - 1 - (p - 1)) * prop_loss + delta_db) / demux_depth


# --- time-bin programs -------------------------------------------------------


@dataclass(frozen=True)
class BinOp:
    """Operation of the physical MZI on one time bin.

    ``kind`` is ``"mzi"`` or ``"swap"``. For ``"mzi"``, ``setting`` indexes
    the program's flat settings list and ``crossed`` marks a bin where rail
    b carries the lower-index mode, so the MZI acts on swapped inputs.
    """

    bin: int
    kind: str
    setting: int | None = None
    crossed: bool = False


@dataclass(frozen=True)
class TimeBinColumn:
    kind: str
    width: int
    bins_in: int
    bins_out: int
    modes_out: int
    ops: tuple[BinOp, ...]


@dataclass(frozen=True)
class TimeBinProgram:
    """Ordered column program for a cascade of time-bin MZIs.

    Every column is one physical MZI followed by a one-bin delay on rail b.
    Input mode ``2t`` is rail a of bin ``t``; mode ``2t+1`` is rail b.
    """

    family: Family
    p: int
    m: int
    columns: tuple[TimeBinColumn, ...]
    n_settings: int
    photon_inputs: tuple[int, ...] = field(default=())

    @property
    def physical_mzis(self) -> int:
        return len(self.columns)

    @property
    def input_bins(self) -> int:
        return self.columns[0].bins_in


def _c1(width: int, first: bool, offset: int) -> tuple[TimeBinColumn, int]:
    bins = width // 2
    ops = tuple(BinOp(t, "mzi", offset + t, crossed=not first) for t in range(bins))
    return TimeBinColumn("C1", width, bins, bins + 1, width, ops), offset + bins


def _c2(width: int, offset: int) -> tuple[TimeBinColumn, int]:
    bins = width // 2 + 1
    ops = tuple(BinOp(t, "mzi", offset + t, crossed=True) for t in range(bins))
    return TimeBinColumn("C2", width, bins, bins + 1, width + 2, ops), offset + bins


def _c3(width: int, offset: int) -> tuple[TimeBinColumn, int]:
    bins = width // 2 + 1
    ops = [BinOp(0, "swap")]
    ops += [BinOp(s, "mzi", offset + s - 1, crossed=True) for s in range(1, bins - 1)]
    ops.append(BinOp(bins - 1, "swap"))
    return TimeBinColumn("C3", width, bins, bins - 1, width, tuple(ops)), offset + bins - 2


def build_timebin_program(family: Family | str, p: int, m: int) -> TimeBinProgram:
    """Column program realising a Clements or Rectangular mesh on time bins.

    Clements is ``m/2`` (C1, C3) pairs. Rectangular is C1(2p), then
    ``(m-2p)/2`` C2 columns growing the width by two, then ``p-1`` (C3, C1)
    pairs. Clements settings are numbered exactly like
    ``spatial_mesh_layout("clements", m, m)``.
    """
    family = Family(family)
    if m % 2 or m < 2:
        raise Infeasible(f"time-bin programs need an even mode count >= 2, got m={m}")
    cols = []
    offset = 0
    if family is Family.CLEMENTS:
        for i in range(m // 2):
            col, offset = _c1(m, i == 0, offset)
            cols.append(col)
            col, offset = _c3(m, offset)
            cols.append(col)
        photons = tuple(range(min(p, m))) if p else ()
    elif family is Family.RECTANGULAR:
        timebin_rectangular_depth(p, m)
        col, offset = _c1(2 * p, True, offset)
        cols.append(col)
        for width in range(2 * p, m, 2):
            col, offset = _c2(width, offset)
            cols.append(col)
        for _ in range(p - 1):
            col, offset = _c3(m, offset)
            cols.append(col)
            col, offset = _c1(m, False, offset)
            cols.append(col)
        photons = tuple(2 * t for t in range(p))
    else:
        raise ValueError(f"no time-bin program for {family.value}")
    return TimeBinProgram(family, p, m, tuple(cols), offset, photons)


@dataclass(frozen=True)
class LoopPenalties:
    delay_cascaded: float
    delay_loop: float
    rate_loop: float


def loop_penalties(m: int, tau: float, single_photon_rate: float) -> LoopPenalties:
    """Worst-case delay of cascaded vs single-loop time-bin Clements meshes, and the loop input rate."""
    if m % 2 or m < 2:
        raise ValueError("m must be even and >= 2")
    half = m // 2 - 1
    return LoopPenalties(
        delay_cascaded=half * tau,
        delay_loop=(m - 1) * half * tau,
        rate_loop=2.0 * single_photon_rate / (m * (m - 1)),
    )
