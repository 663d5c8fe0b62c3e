"""Arrays of N on-off detectors: click statistics and their inversion.

A displaced signal is split evenly over ``N`` binary detectors of efficiency
``eta``; the outcome is the number ``k`` of detectors that fire.  The click
distribution is a triangular linear image of the quasiprobabilities at the
orderings ``S_m = 1 - 2N / ((N - m) eta)``, so ``N`` distinct orderings can
be read off one measured distribution.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from ._validation import DomainError, TruncationError, check_positive_int, check_real
from .states import FockDensityMatrix, GaussianState
from .witness import PhasePointSet, WitnessReport, report_from_matrix

__all__ = [
    "ArraySpec",
    "ClickDistribution",
    "TriangularMap",
    "click_probabilities",
    "click_kernel",
    "wigner_like",
    "coherent_wigner_like",
    "wigner_like_matrix",
    "orderings",
    "build_triangular_map",
    "forward_substitution",
    "recover_quasiprobs",
    "simulate_shots",
    "witness_from_clicks",
]


@dataclass(frozen=True)
class ArraySpec:
    detectors: int
    efficiency: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "detectors", check_positive_int(self.detectors, "detectors"))
        eta = check_real(self.efficiency, "efficiency", low=0.0, high=1.0, low_open=True)
        object.__setattr__(self, "efficiency", eta)


@dataclass(frozen=True, eq=False)
class ClickDistribution:
    probs: np.ndarray
    spec: ArraySpec
    displacement: complex = 0j

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.shape != (self.spec.detectors + 1,):
            raise DomainError(f"expected {self.spec.detectors + 1} probabilities, got shape {p.shape}")
        if np.any(p < -1e-12) or np.any(p > 1 + 1e-12):
            raise DomainError("click probabilities must lie in [0, 1]")
        if abs(p.sum() - 1.0) > 1e-10:
            raise DomainError(f"click probabilities sum to {p.sum()!r}")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "displacement", complex(self.displacement))


@dataclass(frozen=True, eq=False)
class TriangularMap:
    entries: np.ndarray
    orderings: np.ndarray


def orderings(spec: ArraySpec) -> np.ndarray:
    """``S_m = 1 - 2N/((N - m) eta)`` for ``m = 0 .. N-1``.

    Strictly decreasing in ``m`` and never above ``1 - 2/eta <= -1``, so every
    ordering is a valid Gaussian ordering.
    """
    n = spec.detectors
    m = np.arange(n)
    return 1.0 - 2.0 * n / ((n - m) * spec.efficiency)


@functools.lru_cache(maxsize=128)
def click_kernel(detectors: int, efficiency: float, levels: int) -> np.ndarray:
    """``K[k, n]``: probability of ``k`` clicks given ``n`` photons.

    Built photon by photon: each photon is lost with probability ``1 - eta``,
    lands on one of ``c`` already firing detectors with probability
    ``eta c / N``, or fires a new one.  Only non-negative terms are summed,
    so there is no cancellation at large ``N``.
    """
    n_det, eta = detectors, efficiency
    out = np.zeros((n_det + 1, levels))
    dist = np.zeros(n_det + 1)
    dist[0] = 1.0
    c = np.arange(n_det + 1)
    stay = (1 - eta) + eta * c / n_det
    advance = eta * (n_det - c) / n_det
    for n in range(levels):
        out[:, n] = dist
        new = dist * stay
        new[1:] += dist[:-1] * advance[:-1]
        dist = new
    out.setflags(write=False)
    return out


def _displacement_rows(beta: complex, rows: int, cols: int) -> np.ndarray:
    """Exact matrix elements ``<n|D(beta)|j>`` for ``n < rows``, ``j < cols``."""
    if beta == 0:
        return np.eye(rows, cols, dtype=complex)
    x = abs(beta) ** 2
    n = np.arange(rows)[:, None]
    j = np.arange(cols)[None, :]
    lo = np.minimum(n, j)
    hi = np.maximum(n, j)
    diff = hi - lo
    lag = eval_genlaguerre(lo, diff, x)
    log_mag = 0.5 * (gammaln(lo + 1) - gammaln(hi + 1)) - 0.5 * x + diff * math.log(abs(beta))
    # beta^(n-j) above the diagonal, (-conj beta)^(j-n) below
    phase = np.where(n >= j, np.exp(1j * diff * np.angle(beta)), np.exp(1j * diff * np.angle(-np.conj(beta))))
    return np.exp(log_mag) * lag * phase


def _displaced_populations(rho: np.ndarray, alpha: complex, tail_tol: float, max_levels: int) -> np.ndarray:
    """Diagonal of ``D(alpha)^dag rho D(alpha)`` in the Fock basis."""
    dim = rho.shape[0]
    a = abs(alpha)
    levels = min(dim + int(math.ceil(a * a + 10 * a + 20)), max_levels)
    while True:
        d = _displacement_rows(-alpha, levels, dim)
        pops = np.einsum("nj,jk,nk->n", d, rho, d.conj()).real
        if 1.0 - pops.sum() < tail_tol:
            return pops
        if levels >= max_levels:
            raise TruncationError(
                f"displaced populations not converged within {max_levels} levels (tail {1 - pops.sum():.3e})"
            )
        levels = min(2 * levels, max_levels)


def _gaussian_normal_exp(state: GaussianState, alpha: complex, y: float) -> float:
    """``tr(D^dag(alpha) rho D(alpha) :exp(-y n):)`` from the formal P-function Gaussian.

    The P covariance is the Wigner covariance minus vacuum noise; the integral
    against ``exp(-y |beta - alpha|^2)`` stays finite for ``y <= 1``.
    """
    vp = state.covariance() - 0.25 * np.eye(2)
    mat = np.eye(2) + 2 * y * vp
    delta = np.array([state.displacement.real - alpha.real, state.displacement.imag - alpha.imag])
    quad = y * delta @ np.linalg.solve(mat, delta)
    return float(math.exp(-quad) / math.sqrt(np.linalg.det(mat)))


def click_probabilities(state, displacement, spec: ArraySpec, *, tail_tol=1e-13, max_levels=600) -> ClickDistribution:
    """Exact click-number distribution for the state displaced by ``-displacement``.

    Fock states use the photon-number kernel on the displaced populations;
    Gaussian states use the binomial expansion in normally ordered
    exponentials, each evaluated in closed form.

    Raises
    ------
    TruncationError
        If the Fock-basis displacement needs more than ``max_levels`` levels
        or the probabilities fail to sum to one within 1e-8.
    """
    alpha = complex(displacement)
    n_det, eta = spec.detectors, spec.efficiency
    if isinstance(state, FockDensityMatrix):
        pops = _displaced_populations(state.entries, alpha, tail_tol, max_levels)
        probs = click_kernel(n_det, eta, pops.size) @ pops
    elif isinstance(state, GaussianState):
        g = [_gaussian_normal_exp(state, alpha, (n_det - m) * eta / n_det) for m in range(n_det)] + [1.0]
        probs = np.empty(n_det + 1)
        for k in range(n_det + 1):
            terms = [math.comb(n_det, k) * math.comb(k, m) * (-1) ** (k - m) * g[m] for m in range(k + 1)]
            probs[k] = math.fsum(terms)
    else:
        raise DomainError(f"click statistics are not available for {type(state).__name__}")
    total = probs.sum()
    if abs(total - 1.0) > 1e-8:
        raise TruncationError(f"click probabilities sum to {total!r}")
    probs = np.clip(probs, 0.0, 1.0)
    probs = probs / probs.sum()
    return ClickDistribution(probs, spec, alpha)


def wigner_like(state, displacement, spec: ArraySpec) -> float:
    """Parity of the click number scaled by ``2/pi``."""
    p = click_probabilities(state, displacement, spec).probs
    signs = (-1.0) ** np.arange(p.size)
    return 2 / math.pi * math.fsum(signs * p)


def coherent_wigner_like(amplitude, displacement, spec: ArraySpec):
    """Closed form ``(2/pi) (2 exp(-eta |alpha - gamma|^2 / N) - 1)^N`` for a coherent state."""
    d2 = np.abs(np.asarray(displacement, dtype=complex) - complex(amplitude)) ** 2
    return 2 / math.pi * (2 * np.exp(-spec.efficiency * d2 / spec.detectors) - 1) ** spec.detectors


def wigner_like_matrix(state, points, spec: ArraySpec) -> np.ndarray:
    """Two-point style matrix with the parity signal substituted for the Wigner function.

    Not a valid classicality test: it can go negative for coherent states.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    n = pts.size
    out = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            val = wigner_like(state, 0.5 * (pts[i] + pts[j]), spec)
            out[i, j] = out[j, i] = math.pi / 2 * val * math.exp(-0.5 * abs(pts[i] - pts[j]) ** 2)
    return out


def build_triangular_map(spec: ArraySpec) -> TriangularMap:
    """Lower-triangular ``T`` with ``p = T [W(S_0), ..., W(S_{N-1}), 1]``.

    ``T_km = C(N,k) C(k,m) (-1)^(k-m) N pi / ((N-m) eta)`` for ``m <= k``,
    ``m < N`` (including the last row ``k = N``), and ``T_NN = 1``.
    """
    n, eta = spec.detectors, spec.efficiency
    t = np.zeros((n + 1, n + 1))
    for k in range(n + 1):
        for m in range(min(k, n - 1) + 1):
            t[k, m] = math.comb(n, k) * math.comb(k, m) * (-1) ** (k - m) * n * math.pi / ((n - m) * eta)
    t[n, n] = 1.0
    t.setflags(write=False)
    s = orderings(spec)
    s.setflags(write=False)
    return TriangularMap(t, s)


def forward_substitution(lower, rhs) -> np.ndarray:
    """Solve ``lower @ x = rhs`` for lower-triangular ``lower``."""
    t = np.asarray(lower, dtype=float)
    b = np.asarray(rhs, dtype=float)
    n = b.size
    x = np.empty(n)
    for i in range(n):
        if t[i, i] == 0:
            raise DomainError(f"zero pivot at row {i}")
        x[i] = (b[i] - math.fsum(t[i, :i] * x[:i])) / t[i, i]
    return x


def recover_quasiprobs(clicks: ClickDistribution):
    """Quasiprobabilities ``[(S_m, W(alpha; S_m)), ...]`` from a click distribution.

    The unknown vector is ``[W(S_0), ..., W(S_{N-1}), 1]``; only the first
    ``N`` rows are needed, the last is then a normalization identity.
    """
    tmap = build_triangular_map(clicks.spec)
    n = clicks.spec.detectors
    w = forward_substitution(tmap.entries[:n, :n], clicks.probs[:n])
    return [(float(s), float(v)) for s, v in zip(tmap.orderings, w)]


def simulate_shots(state, displacement, spec: ArraySpec, shots: int, seed: int = 0):
    """Multinomial click counts from the exact distribution.

    Returns the empirical :class:`ClickDistribution` and the per-bin standard
    errors ``sqrt(p(1-p)/shots)``.  Uses a counter-based Philox stream keyed
    by ``seed``, so results are reproducible across platforms.
    """
    shots = check_positive_int(shots, "shots")
    exact = click_probabilities(state, displacement, spec)
    rng = np.random.Generator(np.random.Philox(seed))
    counts = rng.multinomial(shots, exact.probs)
    freq = counts / shots
    stderr = np.sqrt(freq * (1 - freq) / shots)
    return ClickDistribution(freq, spec, exact.displacement), stderr


def witness_from_clicks(
    state,
    points,
    spec: ArraySpec,
    m: int,
    shots=None,
    seed: int = 0,
    tolerance: float = 1e-9,
) -> WitnessReport:
    """Witness at ordering ``S_m`` assembled from (simulated) detector data.

    Each midpoint ``(beta_i + beta_j)/2`` is a separate displacement setting.
    With ``shots=None`` the exact click distribution is used; otherwise each
    setting is sampled with its own stream derived from ``(seed, index)``.
    """
    n_det = spec.detectors
    if not 0 <= m < n_det:
        raise DomainError(f"m must lie in [0, {n_det - 1}], got {m}")
    pts = np.asarray(points, dtype=complex).ravel()
    s_m = float(orderings(spec)[m])
    n = pts.size
    vals = np.empty((n, n))
    setting = 0
    for i in range(n):
        for j in range(i, n):
            mid = 0.5 * (pts[i] + pts[j])
            if shots is None:
                clicks = click_probabilities(state, mid, spec)
            else:
                sub = int(np.random.SeedSequence([seed, setting]).generate_state(1)[0])
                clicks, _ = simulate_shots(state, mid, spec, shots, sub)
            vals[i, j] = vals[j, i] = recover_quasiprobs(clicks)[m][1]
            setting += 1
    sep2 = np.abs(pts[:, None] - pts[None, :]) ** 2
    entries = (math.pi * (1 - s_m) / 2) * vals * np.exp(-sep2 / (2 * (1 - s_m)))
    meta = {
        "ordering_index": m,
        "detectors": n_det,
        "efficiency": spec.efficiency,
        "shots": shots,
        "seed": seed,
    }
    return report_from_matrix(entries, PhasePointSet(tuple(pts), s_m), tolerance, meta)
