"""First-order Bogoliubov coefficients for moving-boundary cavities.

Covers the two motion scenarios used by the planner and the experiment:
piecewise uniform acceleration of a rigid cavity (expansion in
``h = a L / c^2``) and a single wall oscillating with relative amplitude
``epsilon = delta_L / L``. Also embeds Bogoliubov sets into phase space.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidArgumentError, PerturbativeWarning
from .gaussian_core import CovarianceState, SymplecticTransform, mode_slice

RESONANCE_RTOL = 1e-9
_SIGMA_Z = np.diag([1.0, -1.0])


class BoundaryKind(str, Enum):
    HALF_WAVE = "half_wave_dirichlet"
    QUARTER_WAVE = "quarter_wave_squid"


class MotionKind(str, Enum):
    DISCRETE = "discrete_segments"
    OSCILLATING = "oscillating_wall"


@dataclass(frozen=True)
class CavitySpec:
    """One-dimensional cavity of length ``length_L`` (m) with wave speed ``speed_c`` (m/s).

    Half-wave (Dirichlet) cavities have ``omega_n = pi n c / L`` for ``n >= 1``.
    Quarter-wave resonators terminated by a SQUID have
    ``omega_k = 2 pi (k + 1/2) c / (2 L)`` for ``k >= 0``.
    """

    length_L: float
    speed_c: float
    boundary_kind: BoundaryKind = BoundaryKind.HALF_WAVE

    def __post_init__(self):
        object.__setattr__(self, "boundary_kind", BoundaryKind(self.boundary_kind))
        if not (self.length_L > 0 and self.speed_c > 0):
            raise InvalidArgumentError("cavity length and wave speed must be positive")

    @classmethod
    def from_fundamental(cls, fundamental_omega: float, boundary_kind=BoundaryKind.QUARTER_WAVE,
                         speed_c: float = 1.0e8) -> "CavitySpec":
        """Cavity whose lowest mode has angular frequency ``fundamental_omega``."""
        if fundamental_omega <= 0:
            raise InvalidArgumentError("fundamental frequency must be positive")
        kind = BoundaryKind(boundary_kind)
        factor = 2.0 if kind is BoundaryKind.QUARTER_WAVE else 1.0
        return cls(math.pi * speed_c / (factor * fundamental_omega), speed_c, kind)

    @property
    def min_mode(self) -> int:
        return 0 if self.boundary_kind is BoundaryKind.QUARTER_WAVE else 1

    @property
    def fundamental_omega(self) -> float:
        return self.omega(self.min_mode)

    def frequency_index(self, k: int) -> int:
        """Dimensionless frequency ``omega_k / omega_fundamental`` (an integer)."""
        if k < self.min_mode:
            raise InvalidArgumentError(f"mode {k} below the lowest mode {self.min_mode}")
        return 2 * k + 1 if self.boundary_kind is BoundaryKind.QUARTER_WAVE else k

    def omega(self, k: int) -> float:
        if self.boundary_kind is BoundaryKind.QUARTER_WAVE:
            if k < 0:
                raise InvalidArgumentError(f"mode {k} below the lowest mode 0")
            return 2 * math.pi * (k + 0.5) * self.speed_c / (2 * self.length_L)
        if k < 1:
            raise InvalidArgumentError(f"mode {k} below the lowest mode 1")
        return math.pi * k * self.speed_c / self.length_L


def h_max(epsilon: float, drive_omega: float, length_L: float, speed_c: float) -> float:
    """Peak ``h = a L / c^2`` of a wall oscillating with amplitude ``epsilon L``."""
    return epsilon * drive_omega ** 2 * length_L ** 2 / speed_c ** 2


@dataclass(frozen=True)
class MotionParams:
    """Parameters of a boundary trajectory.

    ``h`` applies to discrete segments; ``epsilon``, ``drive_omega`` and
    ``duration_T`` to the oscillating wall. Values outside the perturbative
    regime are rejected (``h, epsilon >= 0.1``) or warned about
    (``h > 0.01``, ``omega_fund * T < 10``).
    """

    kind: MotionKind
    h: float = 0.0
    epsilon: float = 0.0
    drive_omega: float = 0.0
    duration_T: float = 0.0
    repetitions_N: int = 1
    fundamental_omega: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", MotionKind(self.kind))
        if self.repetitions_N < 1:
            raise InvalidArgumentError("repetitions_N must be >= 1")
        if self.kind is MotionKind.DISCRETE:
            if not 0 <= abs(self.h) < 0.1:
                raise InvalidArgumentError(f"h = {self.h} is outside the perturbative regime")
            if abs(self.h) > 0.01:
                warnings.warn(f"h = {self.h} > 0.01; first-order results degrade",
                              PerturbativeWarning, stacklevel=2)
        else:
            if not 0 < self.epsilon < 0.1:
                raise InvalidArgumentError(f"epsilon must lie in (0, 0.1), got {self.epsilon}")
            if self.drive_omega <= 0 or self.duration_T <= 0:
                raise InvalidArgumentError("drive frequency and duration must be positive")
            if self.fundamental_omega is not None and self.fundamental_omega * self.duration_T <= 10:
                warnings.warn("omega_fund * T <= 10; the long-drive approximation is poor",
                              PerturbativeWarning, stacklevel=2)

    def h_max(self, cavity: CavitySpec) -> float:
        return h_max(self.epsilon, self.drive_omega, cavity.length_L, cavity.speed_c)


def beta_discrete_first_order(k: int, kp: int, h: float) -> float:
    """First-order beta between modes ``k`` and ``kp`` for a sharp acceleration change.

    ``sqrt(k kp) / (k + kp)^3 * (1 - (-1)^(k + kp)) * h``; vanishes for even sums.
    """
    if k < 1 or kp < 1:
        raise InvalidArgumentError("mode numbers start at 1")
    if k == kp:
        raise InvalidArgumentError("diagonal coefficients are not covered by this formula")
    parity = 0 if (k + kp) % 2 == 0 else 2
    return math.sqrt(k * kp) / (k + kp) ** 3 * parity * h


def beta_oscillating(k: int, kp: int, epsilon: float, omega_fund: float, T: float, p: float,
                     boundary_kind=BoundaryKind.HALF_WAVE) -> float:
    """Beta coefficient grown by a wall oscillating at ``p`` times the fundamental.

    Returns ``(epsilon * omega_fund * T / 2) * sqrt(nu_k / nu_kp)`` when
    ``nu_k + nu_kp == p`` and zero otherwise. ``nu`` is the frequency index
    (``n`` for half-wave cavities, ``2k + 1`` for quarter-wave ones), so the
    result is not symmetric under ``k <-> kp``.
    """
    if epsilon <= 0 or omega_fund <= 0 or T <= 0:
        raise InvalidArgumentError("epsilon, omega_fund and T must be positive")
    kind = BoundaryKind(boundary_kind)
    if kind is BoundaryKind.QUARTER_WAVE:
        nu_k, nu_kp = 2 * k + 1, 2 * kp + 1
    else:
        nu_k, nu_kp = k, kp
    if min(nu_k, nu_kp) < 1:
        raise InvalidArgumentError(f"invalid mode numbers ({k}, {kp})")
    if abs(nu_k + nu_kp - p) > RESONANCE_RTOL * abs(p):
        return 0.0
    return epsilon * omega_fund * T / 2 * math.sqrt(nu_k / nu_kp)


def resonant_pairs(cavity: CavitySpec, drive_omega: float, cutoff: int) -> list[tuple[int, int]]:
    """All ``k < kp <= cutoff`` with ``omega_k + omega_kp = drive_omega``."""
    if cutoff < 1:
        raise InvalidArgumentError("cutoff must be >= 1")
    omegas = {k: cavity.omega(k) for k in range(cavity.min_mode, cutoff + 1)}
    pairs = []
    for k in range(cavity.min_mode, cutoff + 1):
        for kp in range(k + 1, cutoff + 1):
            if abs(omegas[k] + omegas[kp] - drive_omega) < RESONANCE_RTOL * drive_omega:
                pairs.append((k, kp))
    return pairs


@dataclass(frozen=True, eq=False)
class BogoliubovSet:
    """Mode-mixing (``alpha``) and particle-creation (``beta``) coefficient matrices.

    ``order`` is the perturbative order the set is accurate to (``None`` for
    exact sets). Truncated sets break the Bogoliubov identities at the next
    order; :meth:`identity_residual` measures by how much.
    """

    alpha: np.ndarray
    beta: np.ndarray
    order: int | None = None

    def __post_init__(self):
        a = np.array(self.alpha, dtype=complex)
        b = np.array(self.beta, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
            raise InvalidArgumentError("alpha and beta must be square matrices of equal size")
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def cutoff(self) -> int:
        return self.alpha.shape[0]

    def identity_residual(self) -> float:
        """Max violation of ``a a^dag - b b^dag = I`` and ``a b^T = (a b^T)^T``."""
        a, b = self.alpha, self.beta
        r1 = np.max(np.abs(a @ a.conj().T - b @ b.conj().T - np.eye(self.cutoff)))
        ab = a @ b.T
        r2 = np.max(np.abs(ab - ab.T))
        return float(max(r1, r2))

    @classmethod
    def first_order(cls, n_modes: int, betas: dict[tuple[int, int], complex]) -> "BogoliubovSet":
        """Set with ``alpha = I`` and symmetric ``beta`` entries at given positions."""
        beta = np.zeros((n_modes, n_modes), dtype=complex)
        for (j, k), b in betas.items():
            beta[j, k] = beta[k, j] = b
        return cls(np.eye(n_modes), beta, order=1)


def symplectic_from_bogoliubov(bset: BogoliubovSet, warn: bool = True) -> SymplecticTransform:
    """Assemble ``S`` from 2x2 blocks

    ``M_mn = [[Re(a - b), Im(a + b)], [-Im(a - b), Re(a + b)]]``.

    The result is not validated strictly: first-order sets are symplectic only
    up to second order. A ``PerturbativeWarning`` is emitted when the residual
    exceeds 1e-6.
    """
    n = bset.cutoff
    s = np.zeros((2 * n, 2 * n))
    for m in range(n):
        for k in range(n):
            a, b = bset.alpha[m, k], bset.beta[m, k]
            s[mode_slice(m), mode_slice(k)] = [[(a - b).real, (a + b).imag],
                                               [-(a - b).imag, (a + b).real]]
    out = SymplecticTransform(s, strict=False)
    if warn and out.residual > 1e-6:
        warnings.warn(f"Bogoliubov set is symplectic only to residual {out.residual:.2e}",
                      PerturbativeWarning, stacklevel=2)
    return out


def resonance_angle(k: int, kp: int) -> float:
    return 2 * math.pi * k / (k + kp)


def resonant_tms_state(k: int, kp: int, N: int, beta1: float, theta: float | None = None,
                       order: str = "first") -> CovarianceState:
    """Two-mode block state after ``N`` resonant repetitions.

    The squeezing is ``r = N * beta1 * cos(theta)`` with
    ``theta = 2 pi k / (k + kp)`` by default. ``order="first"`` gives
    ``[[I, -2r sz], [-2r sz, I]]``; ``order="second"`` puts ``(1 + r^2) I`` on
    the diagonal. Both are bookkeeping states accurate to first order in
    ``r``; neither satisfies the uncertainty relation exactly.
    """
    if N < 1:
        raise InvalidArgumentError("N must be >= 1")
    if order not in ("first", "second"):
        raise InvalidArgumentError(f"order must be 'first' or 'second', got {order!r}")
    if theta is None:
        theta = resonance_angle(k, kp)
    r = N * (beta1 * math.cos(theta))
    if abs(r) >= 0.5:
        warnings.warn(f"|r| = {abs(r):.3f} >= 0.5; perturbative state unreliable",
                      PerturbativeWarning, stacklevel=2)
    diag = 1.0 + r * r if order == "second" else 1.0
    return CovarianceState(perturbative_block(diag, diag, -2 * r * _SIGMA_Z))


def perturbative_block(diag_a: float, diag_b: float, cross) -> np.ndarray:
    """4x4 matrix ``[[diag_a I, cross], [cross^T, diag_b I]]``."""
    cross = np.asarray(cross, dtype=float)
    out = np.zeros((4, 4))
    out[:2, :2] = diag_a * np.eye(2)
    out[2:, 2:] = diag_b * np.eye(2)
    out[:2, 2:] = cross
    out[2:, :2] = cross.T
    return out
