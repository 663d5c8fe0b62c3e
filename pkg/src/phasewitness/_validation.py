"""Input checks shared by the public functions."""

import math

import numpy as np


class DomainError(ValueError):
    """A parameter lies outside the region where a formula is defined."""


class TruncationError(DomainError):
    """A Fock-basis truncation is too small for the requested accuracy."""


def check_real(value, name, *, low=None, high=None, low_open=False, high_open=False):
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")
    if low is not None and (x < low or (low_open and x == low)):
        op = ">" if low_open else ">="
        raise DomainError(f"{name} must be {op} {low}, got {x}")
    if high is not None and (x > high or (high_open and x == high)):
        op = "<" if high_open else "<="
        raise DomainError(f"{name} must be {op} {high}, got {x}")
    return x


def check_ordering(s):
    """Ordering parameters must satisfy s < 1; the kernels diverge at s = 1."""
    return check_real(s, "s", high=1.0, high_open=True)


def check_complex_array(values, name="points"):
    arr = np.asarray(values, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or int(value) != value:
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_hermitian(matrix, tol=1e-12, name="matrix"):
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    dev = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if dev > tol * scale:
        raise ValueError(f"{name} is not Hermitian (deviation {dev:.3e})")
    return m
