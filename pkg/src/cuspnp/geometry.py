"""Two-disk domains, the inversion map and strip-coordinate conventions.

Every disk here is tangent to the origin.  Under ``w = 1/z`` its boundary
circle becomes a vertical line ``x = 1/(2a)``; the cusp (origin) is the
image of ``y = +-inf`` and is never sampled.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class DomainKind(str, enum.Enum):
    CRESCENT = "crescent"
    TOUCHING = "touching"


class Component(str, enum.Enum):
    OUTER = "outer"
    INNER = "inner"


class GeometryError(ValueError):
    """Raised for invalid geometry input (e.g. evaluating at the origin)."""


@dataclass(frozen=True)
class Disk:
    """Disk of radius ``|signed_center|`` centred at ``(signed_center, 0)``."""

    signed_center: float

    def __post_init__(self):
        if self.signed_center == 0:
            raise GeometryError("disk center must be nonzero")

    @property
    def radius(self) -> float:
        return abs(self.signed_center)

    @property
    def line_x(self) -> float:
        return 1.0 / (2.0 * self.signed_center)

    def contains(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return np.hypot(p[..., 0] - self.signed_center, p[..., 1]) < self.radius


@dataclass(frozen=True)
class DomainSpec:
    """Crescent ``B_R \\ closure(B_r)`` or touching disks ``B_R u B_{-r}``."""

    kind: DomainKind
    R: float
    r: float

    def __post_init__(self):
        object.__setattr__(self, "kind", DomainKind(self.kind))
        if not (self.R > 0 and self.r > 0):
            raise GeometryError("radii must be positive")
        if self.kind is DomainKind.CRESCENT and not self.R > self.r:
            raise GeometryError("crescent requires R > r")

    @classmethod
    def crescent(cls, R: float = 1.0, r: float = 0.5) -> "DomainSpec":
        return cls(DomainKind.CRESCENT, R, r)

    @classmethod
    def touching(cls, R: float = 1.0, r: float = 0.5) -> "DomainSpec":
        return cls(DomainKind.TOUCHING, R, r)

    @property
    def gap(self) -> float:
        """Distance between the two boundary lines in the strip picture."""
        if self.kind is DomainKind.CRESCENT:
            return 1.0 / (2 * self.r) - 1.0 / (2 * self.R)
        return 1.0 / (2 * self.r) + 1.0 / (2 * self.R)

    def disk(self, component) -> Disk:
        component = Component(component)
        if component is Component.OUTER:
            return Disk(self.R)
        if self.kind is DomainKind.CRESCENT:
            return Disk(self.r)
        return Disk(-self.r)

    def line_x(self, component) -> float:
        return self.disk(component).line_x

    def contains(self, p) -> np.ndarray:
        """Membership of plane points in the open domain."""
        outer = self.disk(Component.OUTER).contains(p)
        inner = self.disk(Component.INNER).contains(p)
        if self.kind is DomainKind.CRESCENT:
            inner_closed = np.hypot(np.asarray(p)[..., 0] - self.r,
                                    np.asarray(p)[..., 1]) <= self.r
            return outer & ~inner_closed
        return outer | inner

    def contains_closure(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        dR = np.hypot(p[..., 0] - self.R, p[..., 1])
        if self.kind is DomainKind.CRESCENT:
            return (dR <= self.R) & (np.hypot(p[..., 0] - self.r, p[..., 1]) >= self.r)
        return (dR <= self.R) | (np.hypot(p[..., 0] + self.r, p[..., 1]) <= self.r)


def mobius(p) -> np.ndarray:
    """Complex reciprocal of plane point(s) given as ``(..., 2)`` arrays."""
    p = np.asarray(p, dtype=float)
    z = p[..., 0] + 1j * p[..., 1]
    if np.any(z == 0):
        raise GeometryError("inversion is undefined at the origin")
    w = 1.0 / z
    return np.stack([w.real, w.imag], axis=-1)


def scale_factor(x, y) -> np.ndarray:
    """Conformal factor ``h = 1/(x^2+y^2)`` of the inversion."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    rr = x * x + y * y
    if np.any(rr == 0):
        raise GeometryError("scale factor is singular at the origin")
    return 1.0 / rr


def line_scale(line_x: float, y) -> np.ndarray:
    """``h`` restricted to the vertical line ``x = line_x``."""
    y = np.asarray(y, dtype=float)
    return 1.0 / (line_x * line_x + y * y)


def boundary_param(domain: DomainSpec, component, y) -> np.ndarray:
    """Plane point on the component's circle for strip ordinate ``y``."""
    y = np.asarray(y, dtype=float)
    x = np.full_like(y, domain.line_x(component))
    return mobius(np.stack([x, y], axis=-1))


def normal_sign(domain: DomainSpec, component) -> int:
    """Sign ``s`` with ``du/dnu = s * (1/h) * d(u o Psi)/dx`` on a component."""
    return -1 if Component(component) is Component.OUTER else 1


def outward_normal(domain: DomainSpec, component, p) -> np.ndarray:
    """Unit normal on a boundary circle, pointing out of the domain."""
    p = np.asarray(p, dtype=float)
    disk = domain.disk(component)
    n = np.stack([p[..., 0] - disk.signed_center, p[..., 1]], axis=-1) / disk.radius
    if domain.kind is DomainKind.CRESCENT and Component(component) is Component.INNER:
        n = -n
    return n
