"""Frequency grids, the h-weighted Fourier transform and the mixing matrix.

Conventions: ``F g(k) = (2 pi)^(-1/2) int g(y) exp(-i k y) dy``.  A boundary
trace ``phi`` has two pieces, one per circle; ``U`` sends it to the pair of
transforms of ``h * phi`` on each line, and ``P`` rotates that pair into the
two channels on which the NP operator acts diagonally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline

from .geometry import Component, DomainSpec, line_scale

SQRT2PI = np.sqrt(2.0 * np.pi)
_CHUNK = 2_000_000


class ConfigurationError(ValueError):
    """Invalid discretisation parameters."""


class GridMismatchError(ValueError):
    """Two densities live on different frequency grids."""


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Symmetric composite Gauss-Legendre grid on the real k-line.

    Panels are graded geometrically towards ``k = 0`` (never a node) and are
    uniform in the tail.  ``edges`` holds the positive panel boundaries; the
    negative half is the mirror image.
    """

    edges: np.ndarray
    order: int
    nodes: np.ndarray = field(init=False)
    weights: np.ndarray = field(init=False)

    def __post_init__(self):
        x, w = leggauss(self.order)
        a, b = self.edges[:-1, None], self.edges[1:, None]
        pos = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
        pw = (0.5 * (b - a) * w).ravel()
        object.__setattr__(self, "_pos", pos)
        object.__setattr__(self, "nodes", np.concatenate([-pos[::-1], pos]))
        object.__setattr__(self, "weights", np.concatenate([pw[::-1], pw]))
        object.__setattr__(self, "_ref", x)
        object.__setattr__(self, "_bary", _barycentric_weights(x))

    def __len__(self):
        return self.nodes.size

    @property
    def k_min(self) -> float:
        return float(self._pos[0])

    @property
    def k_max(self) -> float:
        return float(self.edges[-1])

    @property
    def n_half(self) -> int:
        return self._pos.size

    @property
    def positive(self) -> slice:
        return slice(self.n_half, None)

    def integrate(self, values) -> complex:
        return np.sum(self.weights * values)

    def interpolate(self, values, k) -> np.ndarray:
        """Evaluate grid data at arbitrary ``k`` by panelwise polynomial
        interpolation (spectrally accurate for data smooth on each panel).

        Points beyond ``k_max`` evaluate to zero.
        """
        values = np.asarray(values)
        k = np.asarray(k, dtype=float)
        shape = k.shape
        k = np.atleast_1d(k).ravel()
        n, half = self.order, self.n_half
        a = np.abs(k)
        p = np.clip(np.searchsorted(self.edges, a, side="right") - 1, 0, self.edges.size - 2)
        lo, hi = self.edges[p], self.edges[p + 1]
        j = np.arange(n)
        pos_idx = half + p[:, None] * n + j[None, :]
        neg_idx = half - 1 - p[:, None] * n - j[None, :]
        seg = values[np.where(k[:, None] >= 0, pos_idx, neg_idx)]
        s = (2 * a - lo - hi) / (hi - lo)
        d = s[:, None] - self._ref[None, :]
        hit = d == 0
        d = np.where(hit, 1.0, d)
        c = self._bary[None, :] / d
        out = np.sum(c * seg, axis=1) / np.sum(c, axis=1)
        rows = hit.any(axis=1)
        if rows.any():
            out[rows] = seg[rows][hit[rows]]
        out = np.where(a > self.edges[-1], 0.0, out)
        return out.reshape(shape) if shape else out

    def same_as(self, other: "FrequencyGrid") -> bool:
        return self is other or (
            self.order == other.order
            and self.edges.shape == other.edges.shape
            and np.array_equal(self.edges, other.edges)
        )


def _barycentric_weights(x):
    w = np.ones_like(x)
    for j in range(x.size):
        w[j] = 1.0 / np.prod(x[j] - np.delete(x, j))
    return w / np.abs(w).max()


def build_grid(
    k_max: float,
    n_per_decade: int = 4,
    k_min: float = 1e-6,
    *,
    order: int = 16,
    tail_width: float = 0.5,
    refine: Sequence[tuple[float, float]] = (),
) -> FrequencyGrid:
    """Build a symmetric frequency grid.

    Parameters
    ----------
    k_max : float
        Truncation of the k-line.
    n_per_decade : int
        Geometric panels per decade between ``k_min`` and 1.
    k_min : float
        Start of the geometric grading; ``[0, k_min]`` is one panel.
    order : int
        Gauss-Legendre nodes per panel.
    tail_width : float
        Panel width on ``[1, k_max]``.
    refine : sequence of (center, scale)
        Extra panel edges graded geometrically around ``center`` down to
        ``scale``; used to resolve narrow features such as Lorentzians.
    """
    if not (0 < k_min < k_max):
        raise ConfigurationError("need 0 < k_min < k_max")
    if n_per_decade < 4:
        raise ConfigurationError("n_per_decade must be >= 4")
    if tail_width <= 0 or order < 2:
        raise ConfigurationError("invalid tail_width/order")
    top = min(1.0, k_max)
    n_log = max(1, int(np.ceil(np.log10(top / k_min) * n_per_decade)))
    edges = [0.0, *np.geomspace(k_min, top, n_log + 1)]
    if k_max > 1.0:
        n_tail = int(np.ceil((k_max - 1.0) / tail_width))
        edges.extend(np.linspace(1.0, k_max, n_tail + 1)[1:])
    for center, scale in refine:
        center = abs(center)
        step = scale
        while step < 2 * tail_width:
            edges.extend([center - step, center + step])
            step *= 2
        edges.append(center)
    edges = np.unique(np.clip(np.asarray(edges, dtype=float), 0.0, k_max))
    edges = edges[np.concatenate([[True], np.diff(edges) > 1e-14 * k_max])]
    return FrequencyGrid(edges=edges, order=order)


def default_grid(domain: DomainSpec, **kw) -> FrequencyGrid:
    """Default grid with ``k_max = 200/q``."""
    kw.setdefault("k_max", 200.0 / domain.gap)
    return build_grid(**kw)


@dataclass(frozen=True, eq=False)
class BoundaryTrace:
    """Boundary density sampled against the strip ordinate on both lines.

    ``outer_fn``/``inner_fn``, when given, evaluate the density exactly at
    arbitrary ordinates; otherwise a cubic spline of ``h * phi`` is used
    (zero outside the sampled range).
    """

    domain: DomainSpec
    y_nodes: np.ndarray
    values_outer: np.ndarray
    values_inner: np.ndarray
    outer_fn: Optional[Callable] = None
    inner_fn: Optional[Callable] = None

    @classmethod
    def from_functions(cls, domain, y_nodes, outer_fn, inner_fn) -> "BoundaryTrace":
        y = np.asarray(y_nodes, dtype=float)
        return cls(domain, y, outer_fn(y), inner_fn(y), outer_fn, inner_fn)

    @classmethod
    def from_weighted(cls, domain, y_nodes, g_outer, g_inner) -> "BoundaryTrace":
        """Build from callables giving ``h * phi`` on each line."""
        xo, xi = domain.line_x(Component.OUTER), domain.line_x(Component.INNER)
        fo = lambda y: g_outer(y) / line_scale(xo, y)
        fi = lambda y: g_inner(y) / line_scale(xi, y)
        return cls.from_functions(domain, y_nodes, fo, fi)

    def values(self, component) -> np.ndarray:
        return self.values_outer if Component(component) is Component.OUTER else self.values_inner

    def __call__(self, component, y) -> np.ndarray:
        """Density on ``component`` at ordinates ``y``."""
        component = Component(component)
        fn = self.outer_fn if component is Component.OUTER else self.inner_fn
        y = np.asarray(y, dtype=float)
        if fn is not None:
            return fn(y)
        return self.weighted(component, y) / line_scale(self.domain.line_x(component), y)

    def weighted(self, component, y) -> np.ndarray:
        """``h * phi`` on ``component`` at ordinates ``y``."""
        component = Component(component)
        xc = self.domain.line_x(component)
        fn = self.outer_fn if component is Component.OUTER else self.inner_fn
        y = np.asarray(y, dtype=float)
        if fn is not None:
            return fn(y) * line_scale(xc, y)
        spline = _spline(self, component)
        out = spline(y)
        out = np.where((y < self.y_nodes[0]) | (y > self.y_nodes[-1]), 0.0, out)
        return out

    def total_charge(self) -> complex:
        """``int phi dsigma`` over both circles (trapezoid on the samples)."""
        w = trapezoid_weights(self.y_nodes)
        tot = 0.0
        for c in Component:
            tot = tot + np.sum(w * self.values(c) * line_scale(self.domain.line_x(c), self.y_nodes))
        return tot


def _spline(trace, component):
    xc = trace.domain.line_x(component)
    g = trace.values(component) * line_scale(xc, trace.y_nodes)
    return CubicSpline(trace.y_nodes, g)


@dataclass(frozen=True, eq=False)
class PUDensity:
    """Density in the diagonalising channel coordinates on a k-grid."""

    grid: FrequencyGrid
    ch1: np.ndarray
    ch2: np.ndarray

    def __post_init__(self):
        n = len(self.grid)
        c1 = np.asarray(self.ch1, dtype=complex)
        c2 = np.asarray(self.ch2, dtype=complex)
        if c1.shape != (n,) or c2.shape != (n,):
            raise ConfigurationError("channel arrays must match the grid")
        object.__setattr__(self, "ch1", c1)
        object.__setattr__(self, "ch2", c2)

    def channel(self, i: int) -> np.ndarray:
        return self.ch1 if i == 1 else self.ch2

    def _check(self, other):
        if not self.grid.same_as(other.grid):
            raise GridMismatchError("densities live on different grids")

    def __add__(self, other):
        self._check(other)
        return PUDensity(self.grid, self.ch1 + other.ch1, self.ch2 + other.ch2)

    def __sub__(self, other):
        self._check(other)
        return PUDensity(self.grid, self.ch1 - other.ch1, self.ch2 - other.ch2)

    def __mul__(self, c):
        return PUDensity(self.grid, c * self.ch1, c * self.ch2)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    @classmethod
    def zeros(cls, grid):
        z = np.zeros(len(grid), dtype=complex)
        return cls(grid, z, z.copy())


def trapezoid_weights(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    w = np.zeros_like(y)
    d = np.diff(y)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


def _fourier_sum(samples, x, weights, k, sign):
    """``sum_j weights_j samples_j exp(sign i k x_j)`` for every k, chunked."""
    out = np.empty(k.size, dtype=complex)
    ws = weights * samples
    step = max(1, _CHUNK // max(x.size, 1))
    for s in range(0, k.size, step):
        kk = k[s:s + step, None]
        out[s:s + step] = np.exp(sign * 1j * kk * x[None, :]) @ ws
    return out


def u_forward(trace: BoundaryTrace, grid: FrequencyGrid) -> tuple[np.ndarray, np.ndarray]:
    """Transforms of ``h * phi`` on each line, at the grid nodes.

    Samples cannot resolve frequencies above the Nyquist limit
    ``pi / max(dy)``; the transform is set to zero there instead of
    returning aliased copies of the low band.
    """
    w = trapezoid_weights(trace.y_nodes)
    band = np.abs(grid.nodes) <= np.pi / np.max(np.diff(trace.y_nodes))
    pair = []
    for c in (Component.OUTER, Component.INNER):
        g = trace.values(c) * line_scale(trace.domain.line_x(c), trace.y_nodes)
        hat = np.zeros(grid.nodes.size, dtype=complex)
        hat[band] = _fourier_sum(g, trace.y_nodes, w, grid.nodes[band], -1) / SQRT2PI
        pair.append(hat)
    return pair[0], pair[1]


_P = np.array([[-1.0, 1.0], [1.0, 1.0]]) / np.sqrt(2.0)


def apply_P(pair, grid: FrequencyGrid) -> PUDensity:
    """Rotate a raw (outer, inner) pair into channel coordinates."""
    a, b = (np.asarray(v, dtype=complex) for v in pair)
    return PUDensity(grid, _P[0, 0] * a + _P[0, 1] * b, _P[1, 0] * a + _P[1, 1] * b)


def apply_P_inverse(pu: PUDensity) -> tuple[np.ndarray, np.ndarray]:
    """Inverse rotation; ``P`` is its own inverse."""
    return (_P[0, 0] * pu.ch1 + _P[0, 1] * pu.ch2, _P[1, 0] * pu.ch1 + _P[1, 1] * pu.ch2)


def inverse_fourier(grid: FrequencyGrid, values, y) -> np.ndarray:
    """``F^{-1}`` of grid data evaluated at ordinates ``y``."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    return _fourier_sum(np.asarray(values, dtype=complex), grid.nodes, grid.weights, y, +1) / SQRT2PI


def u_inverse(pu: PUDensity, y_nodes, domain: DomainSpec, *, real: bool = True) -> BoundaryTrace:
    """Synthesize the boundary trace of a channel density."""
    y = np.asarray(y_nodes, dtype=float)
    raw = apply_P_inverse(pu)
    vals = []
    for c, hat in zip((Component.OUTER, Component.INNER), raw):
        v = inverse_fourier(pu.grid, hat, y) / line_scale(domain.line_x(c), y)
        vals.append(v.real if real else v)
    return BoundaryTrace(domain, y, vals[0], vals[1])


def to_pu(trace: BoundaryTrace, grid: FrequencyGrid) -> PUDensity:
    return apply_P(u_forward(trace, grid), grid)
