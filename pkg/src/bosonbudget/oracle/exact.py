"""Exact-arithmetic sampling probabilities and the post-selection check.

Everything here uses integer binomials and 50-digit ``mpmath`` floats so it
shares no numerical code path with the closed-form model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .fock import coherence_rank, enumerate_fock, uniform_post_selection
from .unitary import haar_unitary, make_rng, output_distribution

_DPS = 50


def exact_post_selection(n: int, d: int, m: int) -> Fraction:
    """Collision-pattern fraction as an exact rational (0 outside the valid range)."""
    if not 1 <= d <= n or d > m:
        return Fraction(0)
    return Fraction(math.comb(m, d) * math.comb(n - 1, n - d), math.comb(m + n - 1, n))


def exact_sample_probability_ab(p_sys: float, p: int, l: int) -> float:
    with mpmath.workdps(_DPS):
        q = mpmath.mpf(p_sys)
        return float(math.comb(p, l) * q ** (p - l) * (1 - q) ** l)


def exact_sample_probability_linear(p_sys: float, p: int, d: int, m: int) -> float:
    with mpmath.workdps(_DPS):
        q = mpmath.mpf(p_sys)
        total = mpmath.mpf(0)
        for l in range(0, p - d + 1):
            frac = exact_post_selection(p - l, d, m)
            total += math.comb(p, l) * q ** (p - l) * (1 - q) ** l * frac.numerator / mpmath.mpf(frac.denominator)
        return float(total)


@dataclass(frozen=True)
class PostSelectionReport:
    """Enumeration, closed form and Haar Monte Carlo estimate of the d-click fraction."""

    p: int
    l: int
    d: int
    m: int
    uniform_exact: Fraction
    closed_form: Fraction
    haar_mc: float
    stderr: float
    trials: int
    seed: int

    @property
    def exact_match(self) -> bool:
        return self.uniform_exact == self.closed_form


def validate_post_selection_formula(p: int, l: int, d: int, m: int, trials: int = 1000, seed: int = 0) -> PostSelectionReport:
    """Compare the d-click fraction from enumeration, the closed form and Haar sampling.

    The Monte Carlo estimate injects ``p - l`` photons into the first modes
    of independent Haar unitaries (one derived seed per trial) and records
    the mass on outputs with exactly ``d`` occupied modes. It is reported,
    not judged.
    """
    n = p - l
    uniform = uniform_post_selection(p, l, d, m)
    closed = exact_post_selection(n, d, m)
    mc, err = math.nan, math.nan
    if trials > 0:
        state = tuple([1] * n + [0] * (m - n)) if n <= m else None
        if state is None:
            raise ValueError("Monte Carlo input needs p - l <= m")
        children = np.random.SeedSequence(seed).spawn(trials)
        masks = None
        values = np.empty(trials)
        for i, child in enumerate(children):
            dist = output_distribution(haar_unitary(m, rng=make_rng(child.generate_state(1)[0])), state)
            if masks is None:
                masks = np.array([coherence_rank(t) == d for t in dist])
            values[i] = float(np.sum(np.fromiter(dist.values(), float)[masks]))
        mc = float(values.mean())
        err = float(values.std(ddof=1) / math.sqrt(trials)) if trials > 1 else math.nan
    return PostSelectionReport(p, l, d, m, uniform, closed, mc, err, trials, seed)


def fock_space_check(m: int, n: int) -> tuple[int, int]:
    """(enumerated size, closed-form size) of the ``n``-photon ``m``-mode space."""
    return len(enumerate_fock(m, n)), math.comb(m + n - 1, n)
