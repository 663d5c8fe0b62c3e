"""Closed-form witness optima, distance bounds and the non-Gaussianity bound."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._validation import DomainError, check_ordering, check_positive_int, check_real
from .states import GaussianState, mean_photon_number, squeezed_two_photon_mixture
from .witness import SearchConfig, optimize_points

__all__ = [
    "GaussianWitnessOptimum",
    "QNGReport",
    "two_point_gaussian_minimum",
    "gaussian_lambda_min",
    "squeezed_thermal_lambda_min",
    "distance_lower_bound",
    "qng_bound",
    "certify_qng",
    "qng_threshold",
]


@dataclass(frozen=True)
class GaussianWitnessOptimum:
    """Most negative two-point witness eigenvalue for a Gaussian kernel.

    ``optimal_points`` is empty when the state is classical.
    """

    lambda_min: float
    optimal_points: tuple
    kernel_params: tuple


def two_point_gaussian_minimum(a, b, c) -> GaussianWitnessOptimum:
    """Minimum over point pairs of the smallest eigenvalue of the 2x2 matrix

    ``A_ij = F((x_i + x_j)/2, (y_i + y_j)/2) exp(-c/4 |r_i - r_j|^2)``,
    ``F(x, y) = exp(-a x^2 - b y^2)``, which requires ``a > c > b > 0``.

    The minimum ``-(1 - c/a) (c/a)^(c/(a-c))`` is attained on the x axis at
    ``x = +-sqrt(ln(a/c) / (a - c))``.
    """
    a = check_real(a, "a")
    b = check_real(b, "b")
    c = check_real(c, "c")
    if not b > 0:
        raise DomainError(f"need b > 0, got b={b}")
    if not c > b:
        raise DomainError(f"need c > b, got c={c}, b={b}")
    if not a > c:
        raise DomainError(f"need a > c, got a={a}, c={c}")
    gap = (a - c) / c
    log_ratio = math.log1p(gap)  # ln(a/c), accurate as a -> c
    lam = -(gap / (1 + gap)) * math.exp(-log_ratio / gap)
    x = math.sqrt(log_ratio / (a - c))
    return GaussianWitnessOptimum(lam, (complex(-x), complex(x)), (a, b, c))


def squeezed_thermal_lambda_min(purity, squeezing) -> float:
    """``-2 mu exp(-d coth d) sinh d`` with ``d = r - r_c``; zero if ``d <= 0``."""
    mu = check_real(purity, "purity", low=0.0, high=1.0, low_open=True)
    d = check_real(squeezing, "squeezing", low=0.0) + 0.5 * math.log(mu)
    if d <= 0:
        return 0.0
    if d < 1e-6:
        return -2 * mu * math.exp(-1.0) * d
    return -2 * mu * math.exp(-d / math.tanh(d)) * math.sinh(d)


def gaussian_lambda_min(state: GaussianState, s=0.0) -> GaussianWitnessOptimum:
    """Optimal two-point witness eigenvalue for a Gaussian state at ordering ``s``.

    Optimal points are symmetric about the displacement and lie on the
    squeezed axis.
    """
    s = check_ordering(s)
    r, rc = state.squeezing, state.critical_squeezing
    den_q = math.exp(-2 * (r - rc)) - s
    if den_q <= 0:
        raise DomainError(f"s={s} is not a Gaussian ordering for this state along the squeezed (q) axis")
    a = 2.0 / den_q
    b = 2.0 / (math.exp(2 * (r + rc)) - s)
    c = 2.0 / (1.0 - s)
    if r <= rc:
        return GaussianWitnessOptimum(0.0, (), (a, b, c))
    core = two_point_gaussian_minimum(a, b, c)
    scale = (1 - s) * math.sqrt(a * b) / 2
    u = np.exp(1j * state.phase)
    pts = tuple(complex(state.displacement + p.real * u) for p in core.optimal_points)
    return GaussianWitnessOptimum(scale * core.lambda_min, pts, (a, b, c))


def distance_lower_bound(lambda_min, n) -> float:
    """Lower bound ``max(0, -lambda_min / (2n))`` on the nonclassical distance."""
    n = check_positive_int(n, "n")
    return max(0.0, -float(lambda_min) / (2 * n))


def qng_bound(mean_photon) -> float:
    """Smallest two-point witness eigenvalue reachable by Gaussian mixtures at energy ``E``.

    ``B(E) = -2 sqrt(E) / (sqrt(E+1) + sqrt(E))^sqrt(1 + 1/E)``.
    """
    e = check_real(mean_photon, "mean_photon", low=0.0)
    if e < 1e-12:
        return 0.0
    # ln(sqrt(E+1) + sqrt(E)) = asinh(sqrt(E))
    return -2 * math.sqrt(e) * math.exp(-math.sqrt(1 + 1 / e) * math.asinh(math.sqrt(e)))


@dataclass(frozen=True, eq=False)
class QNGReport:
    lambda_min: float
    mean_photon: float
    bound: float
    delta: float
    quantum_non_gaussian: bool
    points: tuple
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "lambda_min": self.lambda_min,
            "mean_photon": self.mean_photon,
            "bound": self.bound,
            "delta": self.delta,
            "verdict": "quantum-non-gaussian" if self.quantum_non_gaussian else "not-certified",
            "points": [[p.real, p.imag] for p in self.points],
            "metadata": self.metadata,
        }


def certify_qng(state, config=None, tolerance=1e-9, initial=None) -> QNGReport:
    """Compare the optimized two-point Wigner witness with ``B(E)``.

    ``delta = B(E) - lambda_min``; positive beyond ``tolerance`` certifies
    that the state is not a mixture of Gaussian states.
    """
    report = optimize_points(state, 2, 0.0, config, initial=initial)
    e = mean_photon_number(state)
    bound = qng_bound(e)
    delta = bound - report.min_eigenvalue
    return QNGReport(
        lambda_min=report.min_eigenvalue,
        mean_photon=e,
        bound=bound,
        delta=delta,
        quantum_non_gaussian=delta > tolerance,
        points=report.points.points,
        metadata=dict(report.metadata),
    )


def _max_delta_over_fractions(squeezing, fractions, fine_step, config, tolerance):
    def delta_at(f, initial):
        rep = certify_qng(squeezed_two_photon_mixture(f, squeezing), config, tolerance, initial)
        return rep.delta, rep.points

    best_f, best_delta, best_pts = None, -math.inf, None
    for f in sorted(fractions, reverse=True):
        d, pts = delta_at(f, best_pts)
        if d > best_delta:
            best_f, best_delta, best_pts = f, d, pts
        if best_delta > tolerance:
            return best_f, best_delta
    # refine around the coarse maximum
    ordered = sorted(fractions)
    idx = ordered.index(best_f)
    lo = ordered[max(idx - 1, 0)]
    hi = ordered[min(idx + 1, len(ordered) - 1)]
    for f in np.arange(lo, hi + 0.5 * fine_step, fine_step):
        d, _ = delta_at(float(f), best_pts)
        if d > best_delta:
            best_f, best_delta = float(f), d
        if best_delta > tolerance:
            break
    return best_f, best_delta


def qng_threshold(
    r_low=0.0,
    r_high=0.5,
    fractions=None,
    fine_step=1e-3,
    r_tol=1e-3,
    config: Optional[SearchConfig] = None,
    tolerance=1e-9,
):
    """Smallest squeezing at which some ``f < 1/2`` two-photon mixture is certified.

    Detection at a given ``r`` maximizes ``delta`` over ``fractions`` (a
    coarse grid, refined with spacing ``fine_step`` around its best point);
    ``r`` is then bisected between a non-detecting ``r_low`` and a detecting
    ``r_high``.  Returns ``(r, f)`` with the detecting fraction at ``r``.
    """
    if fractions is None:
        fractions = list(np.round(np.arange(0.01, 0.5, 0.01), 10)) + [0.499]
    fractions = sorted(float(f) for f in fractions)
    if fractions[-1] >= 0.5:
        raise DomainError("fractions must lie below 1/2")
    f_hi, d_hi = _max_delta_over_fractions(r_high, fractions, fine_step, config, tolerance)
    if d_hi <= tolerance:
        raise DomainError(f"no detection at r_high={r_high}")
    _, d_lo = _max_delta_over_fractions(r_low, fractions, fine_step, config, tolerance)
    if d_lo > tolerance:
        raise DomainError(f"already detected at r_low={r_low}")
    lo, hi, f_at_hi = r_low, r_high, f_hi
    while hi - lo > r_tol:
        mid = 0.5 * (lo + hi)
        f, d = _max_delta_over_fractions(mid, fractions, fine_step, config, tolerance)
        if d > tolerance:
            hi, f_at_hi = mid, f
        else:
            lo = mid
    return hi, f_at_hi

