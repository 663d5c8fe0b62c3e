"""Hierarchy witness matrices and the search over phase-space points.

For points ``beta_1 .. beta_n`` and ordering ``s`` the witness matrix is

    M_ij = pi (1 - s) / 2 * W((beta_i + beta_j) / 2; s) * exp(-|beta_i - beta_j|^2 / (2 (1 - s)))

and is positive semidefinite for every classical state.  A negative
eigenvalue certifies nonclassicality.
"""

from __future__ import annotations

import enum
import functools
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from ._validation import DomainError, check_complex_array, check_hermitian, check_ordering, check_positive_int
from .quasiprob import fock_envelope_free, quasiprob
from .states import FockDensityMatrix, GaussianState, mean_amplitude

__all__ = [
    "PhasePointSet",
    "WitnessMatrix",
    "WitnessReport",
    "Verdict",
    "SearchConfig",
    "build_witness",
    "min_eigenvalue",
    "optimize_points",
    "report_for_points",
    "report_from_matrix",
    "fds_detection_radius",
    "detection_determinant",
]


class Verdict(str, enum.Enum):
    CLASSICAL_CONSISTENT = "classical-consistent"
    NONCLASSICAL = "nonclassical"


@dataclass(frozen=True)
class PhasePointSet:
    points: tuple
    s: float = 0.0

    def __post_init__(self):
        pts = check_complex_array(self.points).ravel()
        if pts.size < 1:
            raise DomainError("a point set needs at least one point")
        object.__setattr__(self, "points", tuple(complex(p) for p in pts))
        object.__setattr__(self, "s", check_ordering(self.s))

    @property
    def n(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.array(self.points, dtype=complex)


@dataclass(frozen=True, eq=False)
class WitnessMatrix:
    entries: np.ndarray
    generator: PhasePointSet

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class WitnessReport:
    min_eigenvalue: float
    eigenvector: np.ndarray
    points: PhasePointSet
    verdict: Verdict
    distance_bound: float
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "min_eigenvalue": self.min_eigenvalue,
            "eigenvector": [[float(v.real), float(v.imag)] for v in np.asarray(self.eigenvector, dtype=complex)],
            "points": [[p.real, p.imag] for p in self.points.points],
            "s": self.points.s,
            "n": self.points.n,
            "verdict": self.verdict.value,
            "distance_bound": self.distance_bound,
            "metadata": self.metadata,
        }


@dataclass(frozen=True)
class SearchConfig:
    """Settings for :func:`optimize_points`.

    The coarse grid spans ``[-grid_radius, grid_radius]`` with ``grid_size``
    nodes per coordinate along ``orientations`` lines through the state's
    centroid; the best ``n_starts`` seeds are refined by Nelder-Mead until the
    simplex diameter drops below ``xatol``.  If the grid finds no negativity the
    radius is doubled up to ``max_radius``.
    """

    grid_radius: float = 4.0
    grid_size: int = 9
    orientations: int = 8
    n_starts: int = 16
    xatol: float = 1e-8
    max_evals: int = 20000
    max_radius: float = 16.0
    random_seeds: int = 256
    tolerance: float = 1e-9
    seed: int = 0


def _midpoint_grid(points):
    """Midpoints and squared separations for point arrays of shape ``(..., n)``."""
    b = np.asarray(points, dtype=complex)
    mid = 0.5 * (b[..., :, None] + b[..., None, :])
    sep2 = np.abs(b[..., :, None] - b[..., None, :]) ** 2
    return mid, sep2


@functools.lru_cache(maxsize=32)
def _triu(n):
    return np.triu_indices(n)


def _witness_entries(state, points, s):
    """Witness matrices for a batch of point sets ``(..., n) -> (..., n, n)``."""
    mid, sep2 = _midpoint_grid(points)
    n = mid.shape[-1]
    iu = _triu(n)
    w_upper = np.asarray(quasiprob(state, mid[..., iu[0], iu[1]], s))
    w = np.empty(mid.shape)
    w[..., iu[0], iu[1]] = w_upper
    w[..., iu[1], iu[0]] = w_upper
    return (math.pi * (1 - s) / 2) * w * np.exp(-sep2 / (2 * (1 - s)))


def build_witness(state, points: PhasePointSet) -> WitnessMatrix:
    """Witness matrix for ``state`` at ``points`` (ordering ``points.s``)."""
    entries = _witness_entries(state, points.as_array(), points.s)
    entries.setflags(write=False)
    return WitnessMatrix(entries, points)


def _min_eig_2x2(m11, m22, m12):
    """Smallest eigenvalue of a real symmetric 2x2 matrix, vectorized.

    ``h - sqrt(((m11 - m22)/2)^2 + m12^2)`` with ``h`` the half trace; when
    ``h > 0`` it is rewritten as ``det / lambda_max`` to avoid cancellation.
    """
    h = 0.5 * (m11 + m22)
    d = np.hypot(0.5 * (m11 - m22), m12)
    det = m11 * m22 - m12 * m12
    with np.errstate(divide="ignore", invalid="ignore"):
        stable = det / (h + d)
    return np.where(h > 0, stable, h - d)


def min_eigenvalue(matrix):
    """Smallest eigenvalue and a unit eigenvector of a Hermitian matrix.

    Accepts a :class:`WitnessMatrix` or a plain array.  Matrices up to 2x2
    use the closed form; larger ones go to LAPACK's Hermitian solver.
    """
    m = matrix.entries if isinstance(matrix, WitnessMatrix) else np.asarray(matrix)
    m = check_hermitian(m)
    n = m.shape[0]
    if n == 1:
        return float(m[0, 0].real), np.ones(1, dtype=m.dtype)
    if n == 2:
        a, d, b = m[0, 0].real, m[1, 1].real, m[0, 1]
        lam = float(_min_eig_2x2(a, d, abs(b)))
        # eigenvector of [[a, b], [conj(b), d]] for lam
        v1 = np.array([b, lam - a], dtype=complex)
        v2 = np.array([lam - d, np.conj(b)], dtype=complex)
        v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
        nv = np.linalg.norm(v)
        if nv == 0:
            v = np.array([1.0, 0.0], dtype=complex) if a <= d else np.array([0.0, 1.0], dtype=complex)
        else:
            v = v / nv
        if not np.iscomplexobj(m):
            v = v.real
        return lam, v
    vals, vecs = np.linalg.eigh(m)
    return float(vals[0]), vecs[:, 0]


def _negativity_threshold(entries, tolerance):
    return -tolerance * max(1.0, float(np.linalg.norm(entries, 2)))


def report_for_points(state, points: PhasePointSet, tolerance=1e-9, metadata=None) -> WitnessReport:
    """Evaluate the witness at fixed points and package the verdict."""
    wm = build_witness(state, points)
    return report_from_matrix(wm.entries, points, tolerance, metadata)


def report_from_matrix(entries, points: PhasePointSet, tolerance=1e-9, metadata=None) -> WitnessReport:
    """Verdict for an already assembled witness matrix (e.g. from measured data)."""
    from .analytic import distance_lower_bound

    lam, vec = min_eigenvalue(entries)
    threshold = _negativity_threshold(entries, tolerance)
    verdict = Verdict.NONCLASSICAL if lam < threshold else Verdict.CLASSICAL_CONSISTENT
    meta = {"tolerance": tolerance, "negativity_threshold": threshold}
    meta.update(metadata or {})
    return WitnessReport(
        min_eigenvalue=lam,
        eigenvector=vec,
        points=points,
        verdict=verdict,
        distance_bound=distance_lower_bound(lam, points.n),
        metadata=meta,
    )


def _coords_to_points(x):
    x = np.asarray(x, dtype=float)
    return x[..., 0::2] + 1j * x[..., 1::2]


def _points_to_coords(b):
    b = np.asarray(b, dtype=complex)
    out = np.empty(b.shape[:-1] + (2 * b.shape[-1],))
    out[..., 0::2] = b.real
    out[..., 1::2] = b.imag
    return out


def _batch_min_eig(state, point_sets, s):
    m = _witness_entries(state, point_sets, s)
    n = m.shape[-1]
    if n == 1:
        return m[..., 0, 0]
    if n == 2:
        return _min_eig_2x2(m[..., 0, 0], m[..., 1, 1], m[..., 0, 1])
    return np.linalg.eigvalsh(m)[..., 0]


def _seed_point_sets(state, n, config, radius, rng):
    centre = complex(mean_amplitude(state))
    t = np.linspace(-radius, radius, config.grid_size)
    angles = np.arange(config.orientations) * math.pi / config.orientations
    if isinstance(state, GaussianState):
        angles = np.concatenate([[state.phase % math.pi], angles])
    units = np.exp(1j * angles)
    if n == 1:
        g = t[:, None] + 1j * t[None, :]
        return centre + g.reshape(-1, 1)
    if n == 2:
        i, j = np.triu_indices(t.size)
        pairs = np.stack([t[i], t[j]], axis=-1)
        sets = centre + units[:, None, None] * pairs[None, :, :]
        return sets.reshape(-1, 2)
    # collinear sets plus random clouds
    k = config.random_seeds
    lines = rng.uniform(-radius, radius, size=(k, n))
    lines.sort(axis=1)
    line_units = units[rng.integers(0, units.size, size=k)]
    collinear = centre + line_units[:, None] * lines
    rad = radius * np.sqrt(rng.uniform(0, 1, size=(k, n)))
    ang = rng.uniform(0, 2 * math.pi, size=(k, n))
    cloud = centre + rad * np.exp(1j * ang)
    return np.concatenate([collinear, cloud])


def _canonical_key(points):
    return tuple(np.round(_points_to_coords(points), 12))


def optimize_points(state, n: int = 2, s=0.0, config: Optional[SearchConfig] = None, initial=None) -> WitnessReport:
    """Minimize the witness's smallest eigenvalue over ``n`` phase-space points.

    Multi-start search: a coarse grid of collinear point sets (random sets for
    ``n >= 3``) seeds Nelder-Mead refinements in all ``2n`` real coordinates.
    ``initial`` optionally adds caller-supplied point sets as extra seeds.
    The result is deterministic for a given ``config.seed``.
    """
    n = check_positive_int(n, "n")
    s = check_ordering(s)
    config = config or SearchConfig()
    rng = np.random.default_rng(config.seed)

    def objective(x):
        return float(_batch_min_eig(state, _coords_to_points(x)[None, :], s)[0])

    radius = config.grid_radius
    while True:
        seeds = _seed_point_sets(state, n, config, radius, rng)
        if initial is not None:
            extra = np.atleast_2d(np.asarray(initial, dtype=complex))
            seeds = np.concatenate([extra.reshape(-1, n), seeds])
        vals = _batch_min_eig(state, seeds, s)
        if np.nanmin(vals) < 0 or radius * 2 > config.max_radius:
            break
        radius *= 2
    order = np.argsort(vals, kind="stable")
    starts = []
    seen = set()
    for idx in order:
        key = tuple(np.round(_points_to_coords(np.sort_complex(seeds[idx])), 9))
        if key in seen:
            continue
        seen.add(key)
        starts.append(seeds[idx])
        if len(starts) >= config.n_starts:
            break
    step = max(radius / max(config.grid_size - 1, 1), 0.05)
    candidates = []
    for start in starts:
        x0 = _points_to_coords(start)
        simplex = np.vstack([x0, x0 + step * np.eye(x0.size)])
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": config.xatol,
                "fatol": np.inf,
                "maxfev": config.max_evals,
                "maxiter": config.max_evals,
            },
        )
        x, fx = res.x, res.fun
        # one restart from the converged vertex guards against simplex collapse
        simplex = np.vstack([x, x + 0.01 * step * np.eye(x.size)])
        res2 = minimize(
            objective,
            x,
            method="Nelder-Mead",
            options={"initial_simplex": simplex, "xatol": config.xatol, "fatol": np.inf,
                     "maxfev": config.max_evals, "maxiter": config.max_evals},
        )
        if res2.fun <= fx:
            x, fx = res2.x, res2.fun
        candidates.append((fx, _coords_to_points(x)))
    best = min(c[0] for c in candidates)
    tie = 1e-9 * abs(best)
    tied = [c for c in candidates if c[0] <= best + tie]
    lam, pts = min(tied, key=lambda c: _canonical_key(c[1]))
    meta = {
        "search": {
            "grid_radius": radius,
            "grid_size": config.grid_size,
            "orientations": config.orientations,
            "n_starts": len(starts),
            "xatol": config.xatol,
            "seed": config.seed,
        }
    }
    return report_for_points(state, PhasePointSet(tuple(pts), s), config.tolerance, meta)


def detection_determinant(state, radius, phase=0.0, s=0.0):
    """Sign-faithful determinant of the two-point witness at ``{2 r e^(i phase), 0}``.

    For Fock states the common envelope ``exp(-8 r^2/(1-s))`` is divided out,
    leaving ``P(2r) P(0) - P(r)^2`` with ``P`` the envelope-free polynomial.
    Other states return the plain determinant.  The second value is the scale
    of the two competing terms, for relative sign tests.
    """
    s = check_ordering(s)
    r = np.asarray(radius, dtype=float)
    u = np.exp(1j * phase)
    if isinstance(state, FockDensityMatrix):
        far = fock_envelope_free(state, 2 * r * u, s)
        origin = fock_envelope_free(state, 0.0, s)
        near = fock_envelope_free(state, r * u, s)
        first, second = far * origin, near**2
    else:
        far = quasiprob(state, 2 * r * u, s)
        origin = quasiprob(state, 0.0, s)
        near = quasiprob(state, r * u, s)
        first, second = far * origin, near**2 * np.exp(-4 * r**2 / (1 - s))
    pref = (math.pi * (1 - s) / 2) ** 2
    return pref * (first - second), pref * (np.abs(first) + np.abs(second))


def fds_detection_radius(state, phase=0.0, s=0.0, *, step=0.01, cap=10.0, rel_tol=1e-10):
    """Smallest ``r`` with a negative two-point determinant at ``{2 r e^(i phase), 0}``.

    Scans ``r`` on a grid of spacing ``step`` up to ``cap`` and bisects the
    first sign change.  Returns ``None`` when no negative determinant is
    found below ``cap``.  Warns if the quasiprobability at the origin is
    already non-positive, since the single-point test then suffices.
    """
    s = check_ordering(s)
    if quasiprob(state, 0.0, s) <= 0:
        warnings.warn("quasiprobability at the origin is non-positive; level-1 test already applies", stacklevel=2)
    grid = np.arange(1, int(round(cap / step)) + 1) * step

    def negative(r):
        det, scale = detection_determinant(state, r, phase, s)
        return det < -rel_tol * scale

    dets, scales = detection_determinant(state, grid, phase, s)
    hits = np.nonzero(dets < -rel_tol * scales)[0]
    if hits.size == 0:
        return None
    i = hits[0]
    hi = grid[i]
    lo = grid[i - 1] if i > 0 else 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if negative(mid):
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-12:
            break
    return float(hi)
