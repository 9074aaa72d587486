"""Exhaustive Fock-space enumeration and collision statistics."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

FockState = tuple[int, ...]

MAX_ENUMERATION = 2_000_000


def enumerate_fock(modes: int, photons: int) -> list[FockState]:
    """All occupation vectors of ``photons`` bosons over ``modes`` modes."""
    if modes < 1 or photons < 0:
        raise ValueError("need modes >= 1 and photons >= 0")
    if math.comb(modes + photons - 1, photons) > MAX_ENUMERATION:
        raise ValueError(f"Fock space of {photons} photons in {modes} modes is too large to enumerate")
    states = []
    for combo in itertools.combinations_with_replacement(range(modes), photons):
        occ = [0] * modes
        for mode in combo:
            occ[mode] += 1
        states.append(tuple(occ))
    return states


def coherence_rank(state: FockState) -> int:
    """Number of occupied modes."""
    return sum(1 for n in state if n)


def is_collision_free(state: FockState) -> bool:
    return all(n <= 1 for n in state)


def full_count(p: int, l: int, m: int) -> int:
    """Size of the ``p - l`` photon, ``m`` mode Fock space, by enumeration."""
    return len(enumerate_fock(m, p - l))


def subspace_count(p: int, l: int, d: int, m: int) -> int:
    """Number of ``p - l`` photon states with exactly ``d`` occupied modes, by enumeration."""
    return sum(1 for s in enumerate_fock(m, p - l) if coherence_rank(s) == d)


def uniform_post_selection(p: int, l: int, d: int, m: int) -> Fraction:
    return Fraction(subspace_count(p, l, d, m), full_count(p, l, m))


def elementary_symmetric(state: FockState, k: int) -> int:
    """Sum of all k-fold products of distinct nonzero occupations (X_0 = 1)."""
    nonzero = [n for n in state if n]
    if k < 0 or k > len(nonzero):
        return 0
    return sum(math.prod(c) for c in itertools.combinations(nonzero, k))


def complexity_score(state: FockState) -> int:
    """Sum of elementary symmetric polynomials X_0..X_alpha of the occupations."""
    return sum(elementary_symmetric(state, k) for k in range(coherence_rank(state) + 1))
