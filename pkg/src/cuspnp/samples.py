"""Smooth test densities with closed-form transforms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frequency import (SQRT2PI, BoundaryTrace, FrequencyGrid, PUDensity,
                        apply_P)
from .geometry import DomainSpec


@dataclass(frozen=True)
class GaussianMixtureTrace:
    """Trace whose weighted pieces ``h * phi`` are sums of Gaussians.

    Each component is an ``(n, 3)`` array of ``(amplitude, center, width)``.
    """

    domain: DomainSpec
    outer: np.ndarray
    inner: np.ndarray

    @staticmethod
    def _g(params, y):
        y = np.asarray(y, dtype=float)[..., None]
        a, m, s = params.T
        return np.sum(a * np.exp(-((y - m) ** 2) / (2 * s * s)), axis=-1)

    @staticmethod
    def _ghat(params, k):
        k = np.asarray(k, dtype=float)[..., None]
        a, m, s = params.T
        return np.sum(a * s * np.exp(-(s * s) * k * k / 2 - 1j * k * m), axis=-1)

    def g_outer(self, y):
        return self._g(self.outer, y)

    def g_inner(self, y):
        return self._g(self.inner, y)

    def charge(self) -> float:
        """``int phi dsigma``."""
        tot = 0.0
        for p in (self.outer, self.inner):
            tot += SQRT2PI * np.sum(p[:, 0] * p[:, 2])
        return float(tot)

    def trace(self, y_nodes=None) -> BoundaryTrace:
        if y_nodes is None:
            y_nodes = np.linspace(-30.0, 30.0, 1201)
        return BoundaryTrace.from_weighted(self.domain, y_nodes, self.g_outer, self.g_inner)

    def raw(self, k):
        return self._ghat(self.outer, k), self._ghat(self.inner, k)

    def pu(self, grid: FrequencyGrid) -> PUDensity:
        return apply_P(self.raw(grid.nodes), grid)

    @classmethod
    def random(cls, domain: DomainSpec, rng, n_terms: int = 3) -> "GaussianMixtureTrace":
        """Random mean-zero mixture; the last inner amplitude absorbs the charge."""
        def draw():
            a = rng.uniform(-1, 1, n_terms)
            m = rng.uniform(-2, 2, n_terms)
            s = rng.uniform(0.5, 1.2, n_terms)
            return np.column_stack([a, m, s])
        outer, inner = draw(), draw()
        rest = np.sum(outer[:, 0] * outer[:, 2]) + np.sum(inner[:-1, 0] * inner[:-1, 2])
        inner[-1, 0] = -rest / inner[-1, 2]
        return cls(domain, outer, inner)


def random_density(grid: FrequencyGrid, rng, n_terms: int = 3, mean_zero: bool = True) -> PUDensity:
    """Random smooth channel density; channel 2 vanishes linearly at k=0
    when ``mean_zero``."""
    k = grid.nodes

    def smooth():
        a = rng.normal(size=n_terms) + 1j * rng.normal(size=n_terms)
        m = rng.uniform(-2, 2, n_terms)
        s = rng.uniform(0.3, 2.0, n_terms)
        return np.sum(a * np.exp(-(s * s) * k[:, None] ** 2 / 2 - 1j * k[:, None] * m), axis=1)

    ch1 = smooth()
    ch2 = smooth() * (k if mean_zero else 1.0)
    return PUDensity(grid, ch1, ch2)
