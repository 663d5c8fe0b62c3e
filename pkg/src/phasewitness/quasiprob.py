"""s-parametrized quasiprobability distributions.

``s = 0`` is the Wigner function, ``s = -1`` the Husimi Q function.  All
evaluators accept scalar or array phase-space points and broadcast.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy.special import gammaln

from ._validation import DomainError, check_complex_array, check_ordering
from .states import FockDensityMatrix, GaussianState, SqueezedFockState

__all__ = [
    "genlaguerre",
    "wigner_gaussian",
    "sparam_gaussian",
    "fock_kernel",
    "quasiprob",
    "fock_envelope_free",
]


def _scaled_laguerre(kmax, m, y, z):
    """Rows ``y^k L_k^(m)(z / y)`` for ``k = 0 .. kmax``, stacked on axis 0.

    Three-term recurrence in the degree; well defined at ``y = 0``.
    """
    z = np.asarray(z, dtype=float)
    out = np.empty((kmax + 1,) + z.shape)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = y * (1 + m) - z
    for n in range(1, kmax):
        out[n + 1] = (((2 * n + 1 + m) * y - z) * out[n] - (n + m) * y * y * out[n - 1]) / (n + 1)
    return out


def genlaguerre(n: int, m: int, x):
    """Generalized Laguerre polynomial ``L_n^(m)(x)`` by upward recurrence."""
    if n < 0 or m < 0:
        raise DomainError("degree and order must be non-negative")
    return _scaled_laguerre(n, m, 1.0, x)[n]


def _frame(state, alpha):
    """Map ``alpha`` into the frame where the state is centred and q-squeezed."""
    rotated = (alpha - state.displacement) * np.exp(-1j * state.phase)
    return rotated.real, rotated.imag


def wigner_gaussian(state: GaussianState, point):
    """Wigner function of a displaced squeezed thermal state."""
    alpha = check_complex_array(point)
    q, p = _frame(state, alpha)
    mu, r = state.purity, state.squeezing
    rc = state.critical_squeezing
    val = (2 * mu / math.pi) * np.exp(-2 * math.exp(2 * (r - rc)) * q**2 - 2 * math.exp(-2 * (r + rc)) * p**2)
    return val if np.ndim(val) else float(val)


def _gaussian_widths(state: GaussianState, s: float):
    r, rc = state.squeezing, state.critical_squeezing
    den_q = math.exp(-2 * (r - rc)) - s
    den_p = math.exp(2 * (r + rc)) - s
    if den_q <= 0:
        raise DomainError(
            f"s={s} is not a Gaussian ordering for this state along the squeezed (q) axis: "
            f"exp(-2(r - r_c)) - s = {den_q:.6g} <= 0"
        )
    if den_p <= 0:
        raise DomainError(f"s={s} is not a Gaussian ordering along the anti-squeezed (p) axis")
    return 2.0 / den_q, 2.0 / den_p


def sparam_gaussian(state: GaussianState, point, s=0.0):
    """``(sqrt(ab)/pi) exp(-a q^2 - b p^2)`` in the state's own frame."""
    s = check_ordering(s)
    a, b = _gaussian_widths(state, s)
    alpha = check_complex_array(point)
    q, p = _frame(state, alpha)
    val = math.sqrt(a * b) / math.pi * np.exp(-a * q**2 - b * p**2)
    return val if np.ndim(val) else float(val)


def _kernel_log_parts(j, k, alpha, s):
    """Sign, log-magnitude and phase of ``W_{|j><k|}(alpha; s)`` for ``j >= k``.

    The envelope ``exp(-2|alpha|^2/(1-s))`` is folded into the log so points
    far from the origin do not underflow before meeting the polynomial.
    """
    m = j - k
    one_minus_s = 1.0 - s
    abs2 = np.abs(alpha) ** 2
    z = 4 * abs2 / one_minus_s
    poly = _scaled_laguerre(k, m, 1.0 + s, z)[k]
    with np.errstate(divide="ignore"):
        log_mag = (
            math.log(2 / (math.pi * one_minus_s))
            - z / 2
            - k * math.log(one_minus_s)
            + 0.5 * (gammaln(k + 1) - gammaln(j + 1))
            + m * np.log(2 * np.sqrt(abs2) / one_minus_s)
            + np.log(np.abs(poly))
        )
    sign = np.sign(poly) * (-1) ** k
    phase = np.exp(-1j * m * np.angle(alpha))
    return sign, log_mag, phase


def fock_kernel(j: int, k: int, point, s=0.0):
    """Quasiprobability of the operator ``|j><k|``.

    Uses ``W_{|j><k|} = tr(|j><k| Delta_s)``, so the kernel carries
    ``conj(alpha)^(j-k)`` for ``j >= k`` and the ``j < k`` kernel is the
    complex conjugate of the transposed one.
    """
    s = check_ordering(s)
    if j < 0 or k < 0:
        raise DomainError("Fock indices must be non-negative")
    alpha = check_complex_array(point)
    if j < k:
        return np.conj(fock_kernel(k, j, alpha, s))
    sign, log_mag, phase = _kernel_log_parts(j, k, alpha, s)
    val = sign * np.exp(log_mag) * phase
    return val if np.ndim(val) else complex(val)


@functools.lru_cache(maxsize=256)
def _term_plan(key):
    """Nonzero diagonals of a density matrix, grouped by offset ``m = j - k``."""
    dim, raw = key
    rho = np.frombuffer(raw, dtype=complex).reshape(dim, dim)
    plan = []
    for m in range(dim):
        lower = np.diagonal(rho, offset=-m)  # rho[k + m, k]
        upper = np.diagonal(rho, offset=m)  # rho[k, k + m]
        ks = np.nonzero((lower != 0) | (upper != 0))[0]
        if ks.size == 0:
            continue
        half_log_fact = 0.5 * (gammaln(ks + 1) - gammaln(ks + m + 1))
        sign = (-1.0) ** ks
        plan.append((m, ks, lower[ks].copy(), upper[ks].copy(), half_log_fact, sign))
    return plan


def _fock_sum(rho, alpha, s, envelope=True):
    """``sum_jk rho_jk W_{|j><k|}(alpha; s)`` with optional envelope removal.

    Every term is assembled in log-magnitude form so that the Gaussian
    envelope and the polynomial growth meet before exponentiation.
    """
    alpha = np.asarray(alpha, dtype=complex)
    one_minus_s = 1.0 - s
    abs2 = np.abs(alpha) ** 2
    z = 4 * abs2 / one_minus_s
    log_env = -z / 2 if envelope else np.zeros_like(z)
    log_pref = math.log(2 / (math.pi * one_minus_s))
    log_one_minus_s = math.log(one_minus_s)
    with np.errstate(divide="ignore"):
        log_r = np.log(2 * np.sqrt(abs2) / one_minus_s)
    conj_unit = np.exp(-1j * np.angle(alpha))
    total = np.zeros(alpha.shape, dtype=complex)
    rho = np.ascontiguousarray(rho, dtype=complex)
    for m, ks, lower, upper, half_log_fact, sign in _term_plan((rho.shape[0], rho.tobytes())):
        polys = _scaled_laguerre(int(ks[-1]), m, 1.0 + s, z)[ks]
        base = log_pref - ks * log_one_minus_s + half_log_fact
        extra = log_env + (m * log_r if m else 0.0)
        shape = (-1,) + (1,) * z.ndim
        with np.errstate(divide="ignore"):
            mags = np.exp(np.log(np.abs(polys)) + base.reshape(shape) + extra)
        terms = np.sign(polys) * mags * sign.reshape(shape)
        if m == 0:
            total += np.sum(lower.reshape(shape) * terms, axis=0)
        else:
            phase = conj_unit**m
            mix = lower.reshape(shape) * phase + upper.reshape(shape) * np.conj(phase)
            total += np.sum(mix * terms, axis=0)
    return total


def fock_envelope_free(state: FockDensityMatrix, point, s=0.0):
    """Quasiprobability divided by the Gaussian envelope ``exp(-2|alpha|^2/(1-s))``.

    For finite-dimensional states this is a polynomial in ``alpha``; ratios of
    it decide the sign of witness determinants without underflow.
    """
    s = check_ordering(s)
    alpha = check_complex_array(point)
    val = _fock_sum(state.entries, alpha, s, envelope=False).real
    return val if np.ndim(val) else float(val)


_IMAG_TOL = 1e-10


def quasiprob(state, point, s=0.0):
    """Real-valued s-parametrized quasiprobability of ``state`` at ``point``.

    Raises
    ------
    DomainError
        If ``s >= 1``, if ``s`` is not a Gaussian ordering for a Gaussian
        state, or if a squeezed Fock state is requested at ``s != 0``.
    """
    s = check_ordering(s)
    alpha = check_complex_array(point)
    if isinstance(state, GaussianState):
        if s == 0.0:
            return wigner_gaussian(state, alpha)
        return sparam_gaussian(state, alpha, s)
    if isinstance(state, FockDensityMatrix):
        val = _fock_sum(state.entries, alpha, s)
    elif isinstance(state, SqueezedFockState):
        if s != 0.0 and state.squeezing != 0.0:
            raise DomainError("squeezed Fock states support only the Wigner ordering s = 0")
        # W(alpha) = W_base(S^-1 alpha); S^-1 stretches q and shrinks p in the squeezer frame
        rotated = alpha * np.exp(-1j * state.phase)
        r = state.squeezing
        scaled = (rotated.real * math.exp(r) + 1j * rotated.imag * math.exp(-r)) * np.exp(1j * state.phase)
        val = _fock_sum(state.base.entries, scaled, s)
    else:
        raise TypeError(f"unsupported state type {type(state).__name__}")
    imag = np.max(np.abs(np.imag(val))) if np.size(val) else 0.0
    if imag > _IMAG_TOL:
        raise DomainError(f"quasiprobability has imaginary residue {imag:.3e}; input not Hermitian?")
    val = np.real(val)
    return val if np.ndim(val) else float(val)
