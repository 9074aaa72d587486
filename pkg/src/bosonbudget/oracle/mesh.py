"""Matrix expansion of spatial meshes and time-bin column programs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..architectures import Family, TimeBinProgram, spatial_mesh_layout
from .unitary import SWAP, MziSetting, random_settings


def _resolve_settings(settings, count: int, seed: int | None) -> list[MziSetting]:
    if settings is None:
        return random_settings(count, seed)
    settings = [s if isinstance(s, MziSetting) else MziSetting(*s) for s in settings]
    if len(settings) != count:
        raise ValueError(f"mesh has {count} MZIs but {len(settings)} settings were given")
    return settings


def expand_spatial_mesh(family, p: int, m: int, settings=None, seed: int | None = None) -> np.ndarray:
    """Transfer matrix of a spatial Clements or Rectangular mesh.

    Settings are consumed column by column, top to bottom. Random settings
    are drawn from ``seed`` when none are given.

    Returns:
        Clements: the ``m x m`` unitary ``U[out, in]``. Rectangular: the
        ``p x m`` isometry ``A[input, out]`` (rows of the embedding unitary
        restricted to the photon inputs).
    """
    family = Family(family)
    layout = spatial_mesh_layout(family, p, m)
    settings = _resolve_settings(settings, layout.mzi_count, seed)
    u = np.eye(m, dtype=complex)
    k = 0
    for column in layout.columns:
        for i in column:
            u[[i, i + 1], :] = settings[k].matrix() @ u[[i, i + 1], :]
            k += 1
    if family is Family.CLEMENTS:
        return u
    return u[:, list(layout.inputs)].T


def expand_timebin_program(program: TimeBinProgram, settings=None, seed: int | None = None) -> np.ndarray:
    """Simulate a time-bin program slot by slot and return its transfer matrix.

    Each physical MZI acts on the (rail a, rail b) pair of every bin in its
    column, then rail b is delayed by one bin. Edge bins of C2 columns pick
    up fresh vacuum inputs.

    Returns:
        ``U[out, in]`` with outputs ordered by (time bin, rail a before b)
        and inputs numbered ``2t`` (rail a) and ``2t + 1`` (rail b), followed
        by any modes added along the way.
    """
    settings = _resolve_settings(settings, program.n_settings, seed)
    n_in = 2 * program.input_bins
    slots: dict[tuple[int, int], np.ndarray] = {}
    for t in range(program.input_bins):
        for rail in (0, 1):
            vec = np.zeros(n_in, dtype=complex)
            vec[2 * t + rail] = 1.0
            slots[(rail, t)] = vec

    def fresh() -> np.ndarray:
        nonlocal n_in
        n_in += 1
        vec = np.zeros(n_in, dtype=complex)
        vec[-1] = 1.0
        return vec

    def pad(v: np.ndarray) -> np.ndarray:
        return np.pad(v, (0, n_in - len(v)))

    for column in program.columns:
        times = sorted({t for _, t in slots})
        if len(times) != column.bins_in or times != list(range(times[0], times[0] + column.bins_in)):
            raise ValueError(f"{column.kind} column expects {column.bins_in} bins, found {len(times)}")
        t0 = times[0]
        for op in column.ops:
            t = t0 + op.bin
            a, b = slots.pop((0, t), None), slots.pop((1, t), None)
            if op.kind == "swap":
                if a is not None:
                    slots[(1, t)] = a
                if b is not None:
                    slots[(0, t)] = b
                continue
            if a is None or b is None:
                if column.kind != "C2" or (a is None and b is None):
                    raise ValueError(f"MZI at bin {op.bin} of {column.kind} column has an empty rail")
                a = fresh() if a is None else a
                b = fresh() if b is None else b
            a, b = pad(a), pad(b)
            w = settings[op.setting].matrix()
            if op.crossed:
                w = w @ SWAP
            slots[(0, t)] = w[0, 0] * a + w[0, 1] * b
            slots[(1, t)] = w[1, 0] * a + w[1, 1] * b
        slots = {(rail, t + rail): v for (rail, t), v in slots.items()}
        if len(slots) != column.modes_out:
            raise ValueError(f"{column.kind} column produced {len(slots)} modes, expected {column.modes_out}")

    order = sorted(slots, key=lambda key: (key[1], key[0]))
    out = np.array([pad(slots[key]) for key in order])
    if out.shape[0] != out.shape[1]:
        raise ValueError(f"program maps {out.shape[1]} inputs to {out.shape[0]} outputs")
    return out


@dataclass(frozen=True)
class PermutationMatch:
    """Row correspondence ``a[i] ~ exp(i phases[i]) b[perm[i]]``."""

    perm: tuple[int, ...]
    phases: tuple[float, ...]
    max_deviation: float


def match_rows(a: np.ndarray, b: np.ndarray) -> PermutationMatch:
    """Match rows of ``a`` to rows of ``b`` up to per-row phases.

    Pairs are assigned greedily by the largest normalised overlap. The
    caller decides whether ``max_deviation`` is acceptable.
    """
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    overlap = np.abs(a.conj() @ b.T) / np.outer(na, nb)
    n = a.shape[0]
    perm = [-1] * n
    free_a, free_b = set(range(n)), set(range(n))
    for flat in np.argsort(-overlap, axis=None):
        i, j = divmod(int(flat), n)
        if i in free_a and j in free_b:
            perm[i] = j
            free_a.discard(i)
            free_b.discard(j)
            if not free_a:
                break
    phases = [float(np.angle(np.vdot(b[perm[i]], a[i]))) for i in range(n)]
    dev = max(float(np.max(np.abs(a[i] - np.exp(1j * phases[i]) * b[perm[i]]))) for i in range(n))
    return PermutationMatch(tuple(perm), tuple(phases), dev)
