"""Loss algebra and the closed-form sampling-probability models.

Losses are carried as plain floats in decibels and efficiencies as plain
floats in [0, 1]; ``db_to_efficiency`` / ``efficiency_to_db`` convert
between the two. Everything in this module is a pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import gammaln

__all__ = [
    "Infeasible",
    "DivergentBound",
    "PhotonCounts",
    "ExperimentConfig",
    "SAMPLES_PER_DAY",
    "db_to_efficiency",
    "efficiency_to_db",
    "binom",
    "log_binom",
    "sample_probability_ab",
    "renema_error_lhs",
    "max_lost_photons",
    "post_selection_efficiency",
    "sample_probability_linear",
    "required_samples",
    "demux_depth",
    "demux_loss",
    "source_loss",
    "compose_system_loss",
    "compose_efficiencies",
    "TABLE_I",
]

SAMPLES_PER_DAY = 100 / (24 * 3600)

# Exact integer arithmetic up to this argument size, log-gamma above.
_EXACT_BINOM_LIMIT = 64


class Infeasible(ValueError):
    """A configuration admits no solution (e.g. the error bound or rate target cannot be met)."""


class DivergentBound(ArithmeticError):
    """The approximation-error bound diverges (x^2 (p-l)/p >= 1)."""


@dataclass(frozen=True)
class PhotonCounts:
    """Input photons ``p``, lost photons ``l`` and clicked modes ``d``.

    ``d`` defaults to ``p - l`` (every surviving photon in its own mode).
    """

    p: int
    l: int = 0
    d: int | None = None

    def __post_init__(self):
        if self.d is None:
            object.__setattr__(self, "d", self.p - self.l)
        if self.p < 1 or self.l < 0 or self.p - self.l < 1:
            raise ValueError(f"invalid photon counts p={self.p}, l={self.l}")
        if not 1 <= self.d <= self.p - self.l:
            raise ValueError(f"clicked modes d={self.d} must lie in [1, p - l = {self.p - self.l}]")

    @property
    def surviving(self) -> int:
        return self.p - self.l


@dataclass(frozen=True)
class ExperimentConfig:
    """System-level parameters shared by every budget computation.

    Attributes:
        indistinguishability_x2: pairwise photon overlap x^2.
        single_photon_rate: source emission rate in Hz.
        target_sample_rate: required post-selected sample rate in Hz.
        error_threshold: target approximation error E of the classical simulator.
        permanent_order: order k of the classically computed permanents.
        detector_efficiency: P_det, only used where detector loss is split out.
    """

    indistinguishability_x2: float = 0.96
    single_photon_rate: float = 1e9
    target_sample_rate: float = SAMPLES_PER_DAY
    error_threshold: float = 0.01
    permanent_order: int = 49
    detector_efficiency: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.indistinguishability_x2 <= 1.0:
            raise ValueError("indistinguishability_x2 must lie in [0, 1]")
        if self.single_photon_rate <= 0 or self.target_sample_rate <= 0:
            raise ValueError("rates must be positive")
        if not 0.0 < self.error_threshold < 1.0:
            raise ValueError("error_threshold must lie in (0, 1)")
        if self.permanent_order < 1:
            raise ValueError("permanent_order must be >= 1")
        if not 0.0 < self.detector_efficiency <= 1.0:
            raise ValueError("detector_efficiency must lie in (0, 1]")


def db_to_efficiency(loss_db: float) -> float:
    """Convert a loss in dB to a transmission probability, ``10**(-loss/10)``."""
    if loss_db < 0:
        raise ValueError(f"loss must be non-negative, got {loss_db}")
    return 10.0 ** (-loss_db / 10.0)


def efficiency_to_db(efficiency: float) -> float:
    """Convert an efficiency to dB. Zero efficiency maps to ``math.inf``."""
    if not 0.0 <= efficiency <= 1.0:
        raise ValueError(f"efficiency must lie in [0, 1], got {efficiency}")
    if efficiency == 0.0:
        return math.inf
    # -0.0 for a perfect channel is normalised to 0.0
    return -10.0 * math.log10(efficiency) + 0.0


def log_binom(a: int, b: int) -> float:
    """Natural log of C(a, b); ``-inf`` for out-of-range arguments."""
    if b < 0 or a < 0 or b > a:
        return -math.inf
    if a <= _EXACT_BINOM_LIMIT:
        return math.log(math.comb(a, b))
    return float(gammaln(a + 1) - gammaln(b + 1) - gammaln(a - b + 1))


def binom(a: int, b: int) -> float:
    """C(a, b) as a float, zero when ``b < 0``, ``a < 0`` or ``b > a``."""
    if b < 0 or a < 0 or b > a:
        return 0.0
    if a <= _EXACT_BINOM_LIMIT:
        return float(math.comb(a, b))
    return math.exp(log_binom(a, b))


def _xlogy(n: int, x: float) -> float:
    # n * log(x) with the 0 * log(0) = 0 convention
    if n == 0:
        return 0.0
    if x <= 0.0:
        return -math.inf
    return n * math.log(x)


def _loss_pattern_log_prob(p_sys: float, p: int, l: int) -> float:
    return _xlogy(p - l, p_sys) + _xlogy(l, 1.0 - p_sys) + log_binom(p, l)


def sample_probability_ab(p_sys: float, counts: PhotonCounts) -> float:
    """Probability that exactly ``l`` of ``p`` photons are lost at per-photon efficiency ``p_sys``."""
    if not 0.0 <= p_sys <= 1.0:
        raise ValueError("p_sys must lie in [0, 1]")
    return math.exp(_loss_pattern_log_prob(p_sys, counts.p, counts.l))


def renema_error_lhs(x2: float, p: int, l: int, k: int) -> float:
    """Left-hand side of the classical-approximation error bound.

    Returns ``x2**(k+1) * ((p-l)/p)**(k+1) / (1 - x2*(p-l)/p)``. The bound
    has to exceed ``E**2`` for the configuration to stay out of reach of the
    truncated-permanent classical simulator.

    Raises:
        DivergentBound: if ``x2 * (p-l)/p >= 1`` (only at x2 = 1, l = 0).
    """
    if not 0.0 <= x2 <= 1.0:
        raise ValueError("x2 must lie in [0, 1]")
    if not 0 <= l < p:
        raise ValueError(f"need 0 <= l < p, got p={p}, l={l}")
    ratio = x2 * (p - l) / p
    if ratio >= 1.0:
        raise DivergentBound(f"x2 * (p-l)/p = {ratio} >= 1")
    return ratio ** (k + 1) / (1.0 - ratio)


def _bound_holds(x2: float, p: int, l: int, k: int, e2: float) -> bool:
    try:
        return renema_error_lhs(x2, p, l, k) >= e2
    except DivergentBound:
        return True


def max_lost_photons(x2: float, detected: int, error_threshold: float, k: int) -> int:
    """Largest number of lost photons ``l`` keeping the approximation error above ``E``.

    The scan runs upward from ``l = 0`` with ``p = detected + l``.

    Raises:
        Infeasible: if even ``l = 0`` violates the bound.
    """
    if detected < 1:
        raise ValueError("detected must be >= 1")
    e2 = error_threshold**2
    if not _bound_holds(x2, detected, 0, k, e2):
        raise Infeasible(
            f"x2={x2} cannot reach error {error_threshold} with {detected} detected photons"
        )
    l = 0
    while _bound_holds(x2, detected + l + 1, l + 1, k, e2):
        l += 1
    return l


def _log_post_selection(n: int, d: int, m: int) -> float:
    return log_binom(m, d) + log_binom(n - 1, n - d) - log_binom(m + n - 1, n)


def post_selection_efficiency(counts: PhotonCounts, m: int) -> float:
    """Fraction of the ``p - l`` photon, ``m`` mode Fock space with exactly ``d`` occupied modes."""
    if m < counts.d:
        return 0.0
    return math.exp(_log_post_selection(counts.surviving, counts.d, m))


def sample_probability_linear(p_sys: float, p: int, d: int, m: int) -> float:
    """Probability of ``d`` clicks when ``p`` photons enter an ``m``-mode interferometer.

    Sums over the number of lost photons ``l``; loss patterns leaving fewer
    than ``d`` photons contribute nothing.
    """
    if not 0.0 <= p_sys <= 1.0:
        raise ValueError("p_sys must lie in [0, 1]")
    if not 1 <= d <= p or m < d:
        raise ValueError(f"need 1 <= d <= p and m >= d, got p={p}, d={d}, m={m}")
    total = 0.0
    for l in range(0, p - d + 1):
        total += math.exp(_loss_pattern_log_prob(p_sys, p, l) + _log_post_selection(p - l, d, m))
    return total


def required_samples(m: float, p: int) -> float:
    """Coupon-collector sample count ``m ln(m) / p`` needed for validation."""
    if m <= 1 or p < 1:
        raise ValueError("need m > 1 and p >= 1")
    return m * math.log(m) / p


def demux_depth(p: int) -> int:
    """Switch-tree depth ceil(log2 p) of a demultiplexer feeding ``p`` modes."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return (p - 1).bit_length()


def demux_loss(p: int, switch_loss_db: float) -> float:
    return demux_depth(p) * switch_loss_db


def source_loss(sps_db: float, dmx_db: float, coupling_db: float) -> float:
    return sps_db + dmx_db + coupling_db


def compose_system_loss(src_db: float, int_db: float, det_db: float) -> float:
    """Per-photon system loss; losses along a path add in dB."""
    for value in (src_db, int_db, det_db):
        if value < 0:
            raise ValueError("losses must be non-negative")
    return src_db + int_db + det_db


def compose_efficiencies(*efficiencies: float) -> float:
    return db_to_efficiency(sum(efficiency_to_db(e) for e in efficiencies))


# Reported component efficiencies (P_sps, P_coupling, P_dmx, P_det).
TABLE_I = {
    "current_best": {"sps": 0.658, "coupling": 0.902, "dmx": 0.83, "det": 0.95, "dmx_modes": 20, "x2": 0.964},
    "near_term": {"sps": 0.78, "coupling": 0.902, "dmx": 0.92, "det": 0.95, "dmx_modes": None, "x2": 0.985},
}
