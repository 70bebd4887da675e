"""Logarithmic negativity, purity, and thermal-noise bookkeeping for sequential drives.

The logarithm base is a module-wide setting (natural log by default); every
:class:`NegativityReport` records the base it was computed with.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .bogoliubov import perturbative_block
from .errors import InvalidArgumentError, OutOfValidityError
from .gaussian_core import (
    CovarianceState,
    apply_symplectic,
    p_index,
    symplectic_eigenvalues,
    two_mode_squeezer,
)

_SIGMA_Z = np.diag([1.0, -1.0])
_LOG_BASES = {"e": math.e, "2": 2.0}
_log_base = "e"


def get_log_base() -> str:
    return _log_base


def set_log_base(base: str) -> None:
    global _log_base
    base = str(base)
    if base not in _LOG_BASES:
        raise InvalidArgumentError(f"log base must be 'e' or '2', got {base!r}")
    _log_base = base


@contextmanager
def log_base(base: str):
    """Temporarily switch the logarithm base."""
    previous = get_log_base()
    set_log_base(base)
    try:
        yield
    finally:
        set_log_base(previous)


def _log(x: float) -> float:
    return math.log(x) / math.log(_LOG_BASES[_log_base])


@dataclass(frozen=True)
class NegativityReport:
    pair: tuple[int, int]
    value: float
    nu_tilde: float
    method: str
    log_base: str = field(default_factory=get_log_base)


def log_negativity_closed_form(B: float) -> float:
    """``max(0, -log((1 - B)^2))``, the negativity of the perturbative TMS family."""
    if abs(B) >= 1:
        raise OutOfValidityError(f"|B| = {abs(B)} >= 1 is outside the closed form's domain")
    return max(0.0, -_log(1 + B * B - 2 * B))


def partial_transpose(sigma: np.ndarray, mode: int = 1) -> np.ndarray:
    """Flip the sign of ``P`` on ``mode``."""
    flip = np.ones(sigma.shape[0])
    flip[p_index(mode)] = -1.0
    return sigma * np.outer(flip, flip)


def smallest_pt_eigenvalue(sigma: np.ndarray) -> float:
    """Smallest symplectic eigenvalue of the partial transpose of a two-mode ``sigma``."""
    return float(symplectic_eigenvalues(partial_transpose(sigma))[0])


def log_negativity_two_mode(state: CovarianceState, pair: tuple[int, int] = (0, 1),
                            allow_unphysical: bool = False) -> NegativityReport:
    """Negativity from the smallest symplectic eigenvalue of the partial transpose.

    ``allow_unphysical`` skips the uncertainty-relation check, for the
    perturbative block states whose second-order diagonal overshoots it.
    """
    if state.n_modes != 2:
        raise InvalidArgumentError(f"expected a two-mode state, got {state.n_modes} modes")
    if not allow_unphysical:
        state.require_physical()
    nu = smallest_pt_eigenvalue(state.sigma)
    value = max(0.0, -_log(nu)) if nu > 0 else math.inf
    return NegativityReport(tuple(pair), value, nu, "symplectic")


def purity(state: CovarianceState) -> float:
    """``1 / sqrt(det sigma)``; rejects states violating the uncertainty relation."""
    state.require_physical()
    return float(1.0 / math.sqrt(np.linalg.det(state.sigma)))


def sequential_drive_state(initial: CovarianceState, pair: tuple[int, int], B: float,
                           pump_phase: float = 0.0) -> CovarianceState:
    """Apply the exact two-mode squeezer of strength ``B`` to ``pair``.

    Negative ``B`` is folded into the pump phase, which is what a pi/2 pump
    rotation amounts to.
    """
    j, k = pair
    if B < 0:
        B, pump_phase = -B, pump_phase + math.pi / 2
    return apply_symplectic(initial, two_mode_squeezer(initial.n_modes, j, k, B, pump_phase))


@dataclass(frozen=True)
class NoiseFactors:
    """Per-mode thermal factors ``C`` (1 for vacuum) carried by the perturbative track."""

    C_values: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(c < 1 for c in self.C_values.values()):
            raise InvalidArgumentError("noise factors must be >= 1")

    def get(self, mode: int) -> float:
        return self.C_values.get(mode, 1.0)

    def after_drive(self, pair: tuple[int, int], B: float) -> "NoiseFactors":
        """Both modes end with ``(C_j + C_k)/2 * (1 + B^2)``."""
        j, k = pair
        c = 0.5 * (self.get(j) + self.get(k)) * (1 + B * B)
        out = dict(self.C_values)
        out[j] = out[k] = c
        return NoiseFactors(out)


def noisy_input_state(C_j: float, C_k: float) -> CovarianceState:
    """Reduced state ``diag(C_j I, C_k I)`` of a pair after earlier, disjoint drives."""
    return CovarianceState(perturbative_block(C_j, C_k, np.zeros((2, 2))))


def perturbative_pair_state(C_j: float, C_k: float, B: float) -> CovarianceState:
    """Block state of a pair driven with strength ``B`` from noise factors ``C_j, C_k``.

    Diagonal ``((C_j + C_k)/2)(1 + B^2) I`` and cross block
    ``-B[(C_j + C_k) sz + (C_j - C_k) I]``. With ``C_j = C_k = 1`` this is the
    vacuum-input state ``[[(1 + B^2) I, -2B sz], [-2B sz, (1 + B^2) I]]``.
    """
    cbar = 0.5 * (C_j + C_k)
    cross = -B * ((C_j + C_k) * _SIGMA_Z + (C_j - C_k) * np.eye(2))
    diag = cbar * (1 + B * B)
    return CovarianceState(perturbative_block(diag, diag, cross))


def printed_noisy_negativity(C_j: float, C_k: float, B: float) -> float:
    """The printed noisy-input negativity expression, evaluated term by term.

    ``max(0, log(2 / ((C_j + C_k)(1 + B^2)))
    - sqrt((C_j^2 + C_k^2)(1 + 10 B^2 + B^4) - 2 C_j C_k (1 + B^2)^2))``.
    Kept only for comparison with the symplectic route; a negative radicand
    gives ``nan``.
    """
    b2 = B * B
    radicand = (C_j ** 2 + C_k ** 2) * (1 + 10 * b2 + b2 * b2) - 2 * C_j * C_k * (1 + b2) ** 2
    if radicand < 0:
        return math.nan
    return max(0.0, _log(2 / ((C_j + C_k) * (1 + b2))) - math.sqrt(radicand))
