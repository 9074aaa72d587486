"""Haar-random unitaries, the MZI convention and exact output distributions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import FockState, enumerate_fock
from .permanent import permanents_batch

MAX_DIST_PHOTONS = 5
MAX_DIST_MODES = 10

# Symmetric 50:50 coupler.
COUPLER = np.array([[1.0, 1.0j], [1.0j, 1.0]]) / math.sqrt(2.0)
SWAP = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def make_rng(seed: int | None) -> np.random.Generator:
    """Counter-based (Philox) generator for ``seed``."""
    return np.random.Generator(np.random.Philox(seed))


def phase(alpha: float) -> np.ndarray:
    return np.diag([np.exp(1j * alpha), 1.0])


def mzi_matrix(theta: float, phi: float) -> np.ndarray:
    """2x2 MZI transfer matrix ``B P(theta) B P(phi)``.

    ``theta = pi`` is the bar state and ``theta = 0`` the cross state
    (``i`` times the swap); ``theta = pi/2`` is a balanced splitter.
    """
    return COUPLER @ phase(theta) @ COUPLER @ phase(phi)


@dataclass(frozen=True)
class MziSetting:
    theta: float
    phi: float = 0.0

    def matrix(self) -> np.ndarray:
        return mzi_matrix(self.theta, self.phi)


def random_settings(count: int, seed: int | None) -> list[MziSetting]:
    rng = make_rng(seed)
    angles = rng.uniform(0.0, 2.0 * np.pi, size=(count, 2))
    return [MziSetting(float(t), float(f)) for t, f in angles]


def haar_unitary(m: int, seed: int | None = None, rng: np.random.Generator | None = None) -> np.ndarray:
    """Haar-distributed ``m x m`` unitary from the QR decomposition of a Ginibre matrix.

    Args:
        m: matrix size.
        seed: seed for a fresh Philox generator, ignored when ``rng`` is given.
        rng: generator to draw from.

    Returns:
        Complex ``(m, m)`` array.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if rng is None:
        rng = make_rng(seed)
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def unitarity_error(u: np.ndarray) -> float:
    """``max |U^dag U - I|``."""
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[1]))))


def _check_regime(modes: int, photons: int) -> None:
    if photons > MAX_DIST_PHOTONS or modes > MAX_DIST_MODES:
        raise ValueError(
            f"exhaustive distribution limited to N <= {MAX_DIST_PHOTONS}, M <= {MAX_DIST_MODES}; "
            f"got N={photons}, M={modes}"
        )


def _expand(state: FockState) -> list[int]:
    return [mode for mode, n in enumerate(state) for _ in range(n)]


def output_distribution(u: np.ndarray, input_state: FockState) -> dict[FockState, float]:
    """Exact output probabilities ``|Perm(U_ST)|^2 / (prod s! prod t!)`` for every output state.

    ``u`` is indexed ``[output, input]``.
    """
    u = np.asarray(u, dtype=complex)
    m = u.shape[0]
    if u.shape != (m, m) or len(input_state) != m:
        raise ValueError("unitary and input state sizes disagree")
    n = sum(input_state)
    _check_regime(m, n)
    outputs = enumerate_fock(m, n)
    cols = _expand(input_state)
    rows = np.array([_expand(t) for t in outputs], dtype=int).reshape(len(outputs), n)
    subs = u[rows][:, :, cols]
    perms = permanents_batch(subs)
    norm_in = math.prod(math.factorial(s) for s in input_state)
    norm_out = np.array([math.prod(math.factorial(t) for t in out) for out in outputs], dtype=float)
    probs = np.abs(perms) ** 2 / (norm_in * norm_out)
    return dict(zip(outputs, probs.tolist()))
