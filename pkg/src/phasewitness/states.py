"""Single-mode states: Gaussian parametrization and truncated Fock density matrices.

Phase-space conventions used throughout the package: ``alpha = q + i p`` with
vacuum quadrature variance 1/4, so the vacuum Wigner function is
``(2/pi) exp(-2|alpha|^2)``.  A Gaussian state with ``squeezing > 0`` and
``phase = 0`` is narrow along ``q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import gammaln

from ._validation import DomainError, check_real

__all__ = [
    "GaussianState",
    "FockDensityMatrix",
    "SqueezedFockState",
    "QuantumState",
    "make_squeezed_thermal",
    "vacuum",
    "coherent_state",
    "thermal_state",
    "fock_state",
    "fock_mixture",
    "coherent_fock",
    "thermal_fock",
    "apply_loss",
    "mean_photon_number",
    "mean_amplitude",
    "squeezed_two_photon_mixture",
]


@dataclass(frozen=True)
class GaussianState:
    """Displaced squeezed thermal state.

    Attributes
    ----------
    purity : float
        ``tr(rho^2)`` in (0, 1].
    squeezing : float
        Squeezing strength ``r >= 0``.
    phase : float
        Orientation of the squeezed axis, reduced to ``[0, 2*pi)``.
    displacement : complex
        Phase-space centre of the state.
    """

    purity: float
    squeezing: float = 0.0
    phase: float = 0.0
    displacement: complex = 0j

    def __post_init__(self):
        mu = check_real(self.purity, "purity", low=0.0, high=1.0, low_open=True)
        r = check_real(self.squeezing, "squeezing", low=0.0)
        phi = check_real(self.phase, "phase") % (2 * math.pi)
        d = complex(self.displacement)
        if not (math.isfinite(d.real) and math.isfinite(d.imag)):
            raise DomainError("displacement must be finite")
        object.__setattr__(self, "purity", mu)
        object.__setattr__(self, "squeezing", r)
        object.__setattr__(self, "phase", phi)
        object.__setattr__(self, "displacement", d)

    @property
    def critical_squeezing(self) -> float:
        """Squeezing below which the state is classical, ``-ln(purity)/2``."""
        return -0.5 * math.log(self.purity) + 0.0  # no negative zero

    @property
    def is_nonclassical(self) -> bool:
        return self.squeezing > self.critical_squeezing

    def covariance(self) -> np.ndarray:
        """Wigner covariance matrix in (q, p) coordinates."""
        r, mu = self.squeezing, self.purity
        diag = np.diag([math.exp(-2 * r), math.exp(2 * r)]) / (4 * mu)
        c, s = math.cos(self.phase), math.sin(self.phase)
        rot = np.array([[c, -s], [s, c]])
        return rot @ diag @ rot.T


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    """Density matrix on Fock levels ``0 .. dim-1``; ``entries[j, k] = <j|rho|k>``."""

    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
            raise DomainError(f"density matrix must be square and non-empty, got {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise DomainError("density matrix entries must be finite")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise DomainError("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > 1e-10:
            raise DomainError(f"density matrix trace is {tr!r}, expected 1")
        rho = 0.5 * (rho + rho.conj().T)
        if np.linalg.eigvalsh(rho)[0] < -1e-10:
            raise DomainError("density matrix is not positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def is_diagonal(self) -> bool:
        off = self.entries - np.diag(np.diag(self.entries))
        return not np.any(off)

    def __eq__(self, other):
        if not isinstance(other, FockDensityMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(np.all(self.entries == other.entries))

    def __hash__(self):
        return hash(self.entries.tobytes())


@dataclass(frozen=True)
class SqueezedFockState:
    """A Fock-basis state after an ideal squeezer.

    Quasiprobabilities are obtained by rescaling the arguments of the base
    state's Wigner function: in the frame rotated by ``phase``,
    ``W(q, p) = W_base(e^r q, e^-r p)``.  No Fock-basis squeeze operator is built.
    """

    base: FockDensityMatrix
    squeezing: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if not isinstance(self.base, FockDensityMatrix):
            raise DomainError("base must be a FockDensityMatrix")
        check_real(self.squeezing, "squeezing", low=0.0)
        object.__setattr__(self, "squeezing", float(self.squeezing))
        object.__setattr__(self, "phase", check_real(self.phase, "phase") % (2 * math.pi))


QuantumState = Union[GaussianState, FockDensityMatrix, SqueezedFockState]


def make_squeezed_thermal(purity, squeezing=0.0, phase=0.0, displacement=0j) -> GaussianState:
    return GaussianState(purity, squeezing, phase, displacement)


def vacuum() -> GaussianState:
    return GaussianState(1.0)


def coherent_state(amplitude) -> GaussianState:
    return GaussianState(1.0, 0.0, 0.0, complex(amplitude))


def thermal_state(mean_photons, displacement=0j) -> GaussianState:
    nbar = check_real(mean_photons, "mean_photons", low=0.0)
    return GaussianState(1.0 / (2 * nbar + 1), 0.0, 0.0, displacement)


def fock_state(n: int, dim: int | None = None) -> FockDensityMatrix:
    dim = n + 1 if dim is None else dim
    if not 0 <= n < dim:
        raise DomainError(f"Fock level {n} does not fit in dimension {dim}")
    rho = np.zeros((dim, dim), dtype=complex)
    rho[n, n] = 1.0
    return FockDensityMatrix(rho)


def fock_mixture(weights) -> FockDensityMatrix:
    """Diagonal state with populations ``weights`` (normalized here)."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or np.any(w < 0) or w.sum() <= 0:
        raise DomainError("weights must be a non-negative vector with positive sum")
    return FockDensityMatrix(np.diag(w / w.sum()).astype(complex))


def _coherent_amplitudes(gamma: complex, dim: int) -> np.ndarray:
    n = np.arange(dim)
    if gamma == 0:
        amps = np.zeros(dim, dtype=complex)
        amps[0] = 1.0
        return amps
    log_mag = n * math.log(abs(gamma)) - 0.5 * gammaln(n + 1) - 0.5 * abs(gamma) ** 2
    return np.exp(log_mag) * np.exp(1j * n * np.angle(gamma))


def coherent_fock(gamma, dim: int) -> FockDensityMatrix:
    """Coherent state truncated to ``dim`` levels and renormalized."""
    psi = _coherent_amplitudes(complex(gamma), dim)
    psi /= np.linalg.norm(psi)
    return FockDensityMatrix(np.outer(psi, psi.conj()))


def thermal_fock(mean_photons, dim: int) -> FockDensityMatrix:
    nbar = check_real(mean_photons, "mean_photons", low=0.0)
    n = np.arange(dim)
    if nbar == 0:
        return fock_state(0, dim)
    return fock_mixture((nbar / (nbar + 1)) ** n)


def apply_loss(state: FockDensityMatrix, transmittance) -> FockDensityMatrix:
    """Pure-loss channel with the given transmittance.

    Kraus operators ``A_k`` act as
    ``<m-k|A_k|m> = sqrt(C(m, k) eta^(m-k) (1-eta)^k)``.
    """
    eta = check_real(transmittance, "transmittance", low=0.0, high=1.0)
    rho = state.entries
    dim = state.dim
    if eta == 1.0:
        return state
    out = np.zeros_like(rho)
    for k in range(dim):
        loss = (1.0 - eta) ** k
        for m in range(k, dim):
            for n in range(k, dim):
                if rho[m, n] == 0:
                    continue
                amp = math.sqrt(math.comb(m, k) * math.comb(n, k))
                out[m - k, n - k] += amp * eta ** ((m + n) / 2 - k) * loss * rho[m, n]
    out = 0.5 * (out + out.conj().T)
    out /= np.trace(out).real
    return FockDensityMatrix(out)


def _fock_moments(rho: np.ndarray):
    """Return ``<n>``, ``<a>`` and ``<a^2>`` for a Fock density matrix."""
    dim = rho.shape[0]
    n = np.arange(dim)
    nbar = float(np.dot(n, np.diag(rho).real))
    # tr(rho a) = sum_j rho[j, j-1] sqrt(j)
    a1 = complex(np.sum(np.sqrt(n[1:]) * np.diagonal(rho, offset=-1)))
    a2 = complex(np.sum(np.sqrt(n[2:] * (n[2:] - 1)) * np.diagonal(rho, offset=-2)))
    return nbar, a1, a2


def mean_photon_number(state: QuantumState) -> float:
    """Expected photon number ``tr(rho n)``."""
    if isinstance(state, GaussianState):
        r, mu = state.squeezing, state.purity
        return math.cosh(2 * r) / (2 * mu) - 0.5 + abs(state.displacement) ** 2
    if isinstance(state, FockDensityMatrix):
        return _fock_moments(state.entries)[0]
    if isinstance(state, SqueezedFockState):
        nbar, _, a2 = _fock_moments(state.base.entries)
        r = state.squeezing
        rotated = (a2 * np.exp(-2j * state.phase)).real
        return (2 * nbar + 1) * math.cosh(2 * r) / 2 - rotated * math.sinh(2 * r) - 0.5
    raise TypeError(f"unsupported state type {type(state).__name__}")


def mean_amplitude(state: QuantumState) -> complex:
    """Expected value of the annihilation operator, the phase-space centroid."""
    if isinstance(state, GaussianState):
        return state.displacement
    if isinstance(state, FockDensityMatrix):
        return _fock_moments(state.entries)[1]
    if isinstance(state, SqueezedFockState):
        a = _fock_moments(state.base.entries)[1] * np.exp(-1j * state.phase)
        r = state.squeezing
        centre = complex(a.real * math.exp(-r), a.imag * math.exp(r))
        return centre * np.exp(1j * state.phase)
    raise TypeError(f"unsupported state type {type(state).__name__}")


def squeezed_two_photon_mixture(fraction, squeezing) -> SqueezedFockState:
    """``S(r) [f |2><2| + (1-f) |0><0|] S(r)^dagger``.

    Mean photon number is ``2 f cosh(2r) + sinh(r)^2``.
    """
    f = check_real(fraction, "fraction", low=0.0, high=1.0)
    base = fock_mixture([1.0 - f, 0.0, f])
    return SqueezedFockState(base, check_real(squeezing, "squeezing", low=0.0))
