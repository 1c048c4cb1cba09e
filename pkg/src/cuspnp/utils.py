"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import numbers

import numpy as np

from .frequency import ConfigurationError, FrequencyGrid, GridMismatchError, PUDensity
from .geometry import DomainKind, DomainSpec


def check_domain(domain=None, *, kind="crescent", R=1.0, r=0.5) -> DomainSpec:
    """Return ``domain`` or build one from ``kind``, ``R`` and ``r``."""
    if isinstance(domain, DomainSpec):
        return domain
    if domain is not None:
        kind = domain
    try:
        kind = DomainKind(kind)
    except ValueError:
        raise ConfigurationError(f"unknown domain kind {kind!r}") from None
    return DomainSpec(kind, check_positive(R, "R"), check_positive(r, "r"))


def check_positive(value, name: str) -> float:
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise ConfigurationError(f"{name} must be a real number")
    if not np.isfinite(value) or value <= 0:
        raise ConfigurationError(f"{name} must be positive and finite, got {value}")
    return float(value)


def check_points(points) -> np.ndarray:
    """Coerce to a finite ``(n, 2)`` float array."""
    p = np.asarray(points, dtype=float)
    if p.ndim == 1 and p.size == 2:
        p = p[None, :]
    if p.ndim != 2 or p.shape[1] != 2:
        raise ConfigurationError(f"points must have shape (n, 2), got {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ConfigurationError("points must be finite")
    return p


def check_delta_seq(deltas) -> np.ndarray:
    """Strictly decreasing positive dissipation values."""
    d = np.atleast_1d(np.asarray(deltas, dtype=float))
    if d.size == 0 or np.any(~np.isfinite(d)) or np.any(d <= 0):
        raise ConfigurationError("delta values must be positive and finite")
    if np.any(np.diff(d) >= 0):
        raise ConfigurationError("delta values must be strictly decreasing")
    return d


def check_density(f, grid: FrequencyGrid | None = None) -> PUDensity:
    if not isinstance(f, PUDensity):
        raise TypeError(f"expected PUDensity, got {type(f).__name__}")
    if grid is not None and not f.grid.same_as(grid):
        raise GridMismatchError("density lives on a different grid")
    return f
