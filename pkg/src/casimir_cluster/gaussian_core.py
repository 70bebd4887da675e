"""Phase-space representation of multimode Gaussian states.

Conventions used throughout the package:

* quadratures are mode-interleaved, ``X = (Q_1, P_1, Q_2, P_2, ...)`` with
  ``Q = (a + a^dag)/sqrt(2)`` and ``P = -i (a - a^dag)/sqrt(2)``;
* ``sigma_ij = <X_i X_j + X_j X_i> - 2 <X_i><X_j>``, so the vacuum has
  ``sigma = I`` and a single quadrature variance equals ``sigma_ii / 2``;
* the symplectic form is the direct sum of ``[[0, 1], [-1, 0]]`` blocks.

Modes are addressed by their 0-based position in the state. Use
:func:`q_index`, :func:`p_index` and :func:`mode_slice` instead of computing
raw matrix indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgumentError, UnphysicalStateError

SYMPLECTIC_TOL = 1e-10
SYMMETRY_TOL = 1e-12
PHYSICAL_TOL = 1e-10

_OMEGA_1 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def q_index(mode: int) -> int:
    return 2 * mode


def p_index(mode: int) -> int:
    return 2 * mode + 1


def mode_slice(mode: int) -> slice:
    return slice(2 * mode, 2 * mode + 2)


def quadrature_indices(modes: Iterable[int]) -> list[int]:
    """Matrix indices of the (Q, P) rows of ``modes``, in the given order."""
    out = []
    for m in modes:
        out.extend((q_index(m), p_index(m)))
    return out


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), _OMEGA_1)


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    arr.flags.writeable = False
    return arr


def _check_modes(n_modes: int, *modes: int) -> None:
    for m in modes:
        if not (isinstance(m, (int, np.integer)) and 0 <= m < n_modes):
            raise InvalidArgumentError(f"mode {m!r} out of range for {n_modes} modes")


@dataclass(frozen=True, eq=False)
class SymplecticTransform:
    """Real ``2n x 2n`` matrix acting on quadratures as ``X -> S X``.

    Construction fails if ``S Omega S^T != Omega`` beyond ``SYMPLECTIC_TOL``.
    Pass ``strict=False`` for perturbative matrices that are symplectic only
    to some order; the residual is still recorded.
    """

    matrix: np.ndarray
    strict: bool = True
    residual: float = field(init=False)

    def __post_init__(self):
        m = _readonly(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise InvalidArgumentError(f"symplectic matrix must be 2n x 2n, got {m.shape}")
        object.__setattr__(self, "matrix", m)
        om = symplectic_form(m.shape[0] // 2)
        res = float(np.max(np.abs(m @ om @ m.T - om)))
        object.__setattr__(self, "residual", res)
        if self.strict and res > SYMPLECTIC_TOL:
            raise InvalidArgumentError(f"matrix is not symplectic (residual {res:.3e})")

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def __matmul__(self, other: "SymplecticTransform") -> "SymplecticTransform":
        # (self @ other) applies `other` first.
        return SymplecticTransform(self.matrix @ other.matrix,
                                   strict=self.strict and other.strict)

    @classmethod
    def identity(cls, n_modes: int) -> "SymplecticTransform":
        return cls(np.eye(2 * n_modes))


@dataclass(frozen=True, eq=False)
class CovarianceState:
    """Gaussian state given by its covariance matrix and mean vector.

    Only symmetry is enforced on construction. Perturbative block states used
    for bookkeeping may violate the uncertainty relation at second order, so
    physicality is checked by the operations that need it
    (see :meth:`require_physical`).
    """

    sigma: np.ndarray
    mean: np.ndarray = None

    def __post_init__(self):
        s = _readonly(self.sigma)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] == 0 or s.shape[0] % 2:
            raise InvalidArgumentError(f"sigma must be a nonempty 2n x 2n matrix, got {s.shape}")
        scale = max(1.0, float(np.max(np.abs(s))))
        if np.max(np.abs(s - s.T)) > SYMMETRY_TOL * scale:
            raise InvalidArgumentError("sigma is not symmetric")
        mean = np.zeros(s.shape[0]) if self.mean is None else self.mean
        mean = _readonly(mean)
        if mean.shape != (s.shape[0],):
            raise InvalidArgumentError(f"mean must have length {s.shape[0]}, got {mean.shape}")
        object.__setattr__(self, "sigma", s)
        object.__setattr__(self, "mean", mean)

    @property
    def n_modes(self) -> int:
        return self.sigma.shape[0] // 2

    def physicality_margin(self) -> float:
        """Smallest eigenvalue of ``sigma + i Omega`` (>= 0 for physical states)."""
        herm = self.sigma + 1j * symplectic_form(self.n_modes)
        return float(np.linalg.eigvalsh(herm)[0])

    def is_physical(self, tol: float = PHYSICAL_TOL) -> bool:
        return self.physicality_margin() >= -tol

    def require_physical(self, tol: float = PHYSICAL_TOL) -> "CovarianceState":
        margin = self.physicality_margin()
        if margin < -tol:
            raise UnphysicalStateError(
                f"sigma + i*Omega has eigenvalue {margin:.3e} < 0")
        return self

    def photon_number(self) -> float:
        """Total mean photon number, ``(tr(sigma)/2 - n)/2 + |mean|^2/2``."""
        return float((np.trace(self.sigma) / 2 - self.n_modes) / 2 + self.mean @ self.mean / 2)


def vacuum(n_modes: int) -> CovarianceState:
    if not isinstance(n_modes, (int, np.integer)) or n_modes < 1:
        raise InvalidArgumentError(f"n_modes must be a positive integer, got {n_modes!r}")
    return CovarianceState(np.eye(2 * n_modes))


def apply_symplectic(state: CovarianceState, s: SymplecticTransform) -> CovarianceState:
    """Return ``S sigma S^T`` with mean ``S mean``."""
    if s.matrix.shape[0] != state.sigma.shape[0]:
        raise InvalidArgumentError(
            f"transform acts on {s.n_modes} modes, state has {state.n_modes}")
    m = s.matrix
    out = m @ state.sigma @ m.T
    return CovarianceState(0.5 * (out + out.T), m @ state.mean)


def partial_trace(state: CovarianceState, keep: Sequence[int]) -> CovarianceState:
    """Reduced state on the modes in ``keep`` (in that order)."""
    keep = list(keep)
    if not keep:
        raise InvalidArgumentError("keep must name at least one mode")
    if len(set(keep)) != len(keep):
        raise InvalidArgumentError(f"duplicate modes in keep: {keep}")
    _check_modes(state.n_modes, *keep)
    idx = quadrature_indices(keep)
    return CovarianceState(state.sigma[np.ix_(idx, idx)], state.mean[idx])


def phase_shift_matrix(n_modes: int, mode: int, theta: float) -> SymplecticTransform:
    """Rotation ``a -> exp(-i theta) a`` of a single mode.

    In quadratures ``Q -> cos(theta) Q + sin(theta) P`` and
    ``P -> -sin(theta) Q + cos(theta) P``; free evolution for time ``t`` is
    ``theta = omega * t``.
    """
    _check_modes(n_modes, mode)
    m = np.eye(2 * n_modes)
    c, s = np.cos(theta), np.sin(theta)
    m[mode_slice(mode), mode_slice(mode)] = [[c, s], [-s, c]]
    return SymplecticTransform(m)


def phase_shift(state: CovarianceState, mode: int, theta: float) -> CovarianceState:
    return apply_symplectic(state, phase_shift_matrix(state.n_modes, mode, theta))


def two_mode_squeezer(n_modes: int, j: int, k: int, r: float,
                      phi: float = 0.0) -> SymplecticTransform:
    """Exact two-mode squeezer ``exp(-xi a_j^dag a_k^dag + xi^* a_j a_k)``.

    ``phi`` is the pump phase: ``xi = r exp(2 i phi)``, so rotating the pump by
    ``pi/2`` flips the sign of the squeezing. With ``phi = 0`` the vacuum maps
    to a state whose cross block is ``-sinh(2r) sigma_z``.

    Args:
        n_modes: number of modes the transform acts on.
        j, k: distinct mode positions.
        r: squeezing parameter, ``r >= 0``.
        phi: pump phase in radians.
    """
    _check_modes(n_modes, j, k)
    if j == k:
        raise InvalidArgumentError("two-mode squeezer needs two distinct modes")
    if r < 0:
        raise InvalidArgumentError(f"squeezing parameter must be >= 0, got {r}")
    ch, sh = np.cosh(r), np.sinh(r)
    c2, s2 = np.cos(2 * phi), np.sin(2 * phi)
    cross = -sh * np.array([[c2, s2], [s2, -c2]])
    m = np.eye(2 * n_modes)
    for a, b in ((j, k), (k, j)):
        m[mode_slice(a), mode_slice(a)] = ch * np.eye(2)
        m[mode_slice(a), mode_slice(b)] = cross
    return SymplecticTransform(m)


def single_mode_squeezer(n_modes: int, mode: int, r: float,
                         phi: float = 0.0) -> SymplecticTransform:
    """``exp((xi^* a^2 - xi a^dag^2)/2)`` with ``xi = r exp(2 i phi)``; ``phi = 0`` squeezes Q."""
    _check_modes(n_modes, mode)
    ch, sh = np.cosh(r), np.sinh(r)
    c2, s2 = np.cos(2 * phi), np.sin(2 * phi)
    m = np.eye(2 * n_modes)
    m[mode_slice(mode), mode_slice(mode)] = ch * np.eye(2) - sh * np.array([[c2, s2], [s2, -c2]])
    return SymplecticTransform(m)


def cz_gate(n_modes: int, j: int, k: int, weight: float = 1.0) -> SymplecticTransform:
    """Controlled-phase ``exp(i g Q_j Q_k)``: ``P_j -> P_j + g Q_k``, ``P_k -> P_k + g Q_j``."""
    _check_modes(n_modes, j, k)
    if j == k:
        raise InvalidArgumentError("CZ gate needs two distinct modes")
    m = np.eye(2 * n_modes)
    m[p_index(j), q_index(k)] = weight
    m[p_index(k), q_index(j)] = weight
    return SymplecticTransform(m)


def symplectic_eigenvalues(sigma) -> np.ndarray:
    """Symplectic eigenvalues of ``sigma`` in ascending order (one per mode)."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] % 2:
        raise InvalidArgumentError(f"sigma must be 2n x 2n, got {sigma.shape}")
    n = sigma.shape[0] // 2
    omega = symplectic_form(n)
    try:
        # Hermitian form i L^T Omega L has spectrum +-nu and stays well conditioned
        chol = np.linalg.cholesky(sigma)
        ev = np.sort(np.abs(np.linalg.eigvalsh(1j * chol.T @ omega @ chol)))
    except np.linalg.LinAlgError:
        ev = np.sort(np.abs(np.linalg.eigvals(1j * omega @ sigma)))
    return ev[::2].copy()
