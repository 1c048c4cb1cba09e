"""Diagonal calculus of the NP operator in channel coordinates."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .frequency import (SQRT2PI, FrequencyGrid, GridMismatchError, PUDensity,
                        apply_P_inverse)
from .geometry import Component, DomainKind, DomainSpec


class SpectrumError(ValueError):
    """Spectral parameter lies on the spectrum ``[-1/2, 1/2]``."""


class ConditioningWarning(RuntimeWarning):
    pass


class MeanZeroWarning(RuntimeWarning):
    """Channel-2 data does not vanish at ``k = 0``."""


@dataclass(frozen=True)
class SymbolValue:
    d1: np.ndarray
    d2: np.ndarray


def symbol_S(k, domain: DomainSpec) -> SymbolValue:
    """Diagonal of the single-layer form ``(1 -+ exp(-|k| q)) / (2|k|)``."""
    k = np.asarray(k, dtype=float)
    if np.any(k == 0):
        raise ValueError("symbol_S is singular at k = 0; use symbol_S_limit")
    a = np.abs(k)
    e = np.exp(-a * domain.gap)
    return SymbolValue(-np.expm1(-a * domain.gap) / (2 * a), (1 + e) / (2 * a))


def symbol_S_limit(domain: DomainSpec) -> SymbolValue:
    """``k -> 0`` limits: ``q/2`` for channel 1, ``+inf`` for channel 2."""
    return SymbolValue(np.float64(domain.gap / 2), np.float64(np.inf))


def _signs(domain: DomainSpec):
    return (-1.0, 1.0) if domain.kind is DomainKind.CRESCENT else (1.0, -1.0)


def symbol_K(k, domain: DomainSpec) -> SymbolValue:
    """Eigenvalues ``+-exp(-|k| q)/2`` of the NP operator per channel."""
    e = 0.5 * np.exp(-np.abs(np.asarray(k, dtype=float)) * domain.gap)
    s1, s2 = _signs(domain)
    return SymbolValue(s1 * e, s2 * e)


def _grid_symbols(grid: FrequencyGrid, domain: DomainSpec):
    return symbol_S(grid.nodes, domain), symbol_K(grid.nodes, domain)


def inner_product(f: PUDensity, g: PUDensity, domain: DomainSpec) -> complex:
    """``int [f]^T S conj([g]) dk``."""
    if not f.grid.same_as(g.grid):
        raise GridMismatchError("densities live on different grids")
    S = symbol_S(f.grid.nodes, domain)
    return f.grid.integrate(S.d1 * f.ch1 * np.conj(g.ch1) + S.d2 * f.ch2 * np.conj(g.ch2))


def norm(f: PUDensity, domain: DomainSpec) -> float:
    return float(np.sqrt(max(inner_product(f, f, domain).real, 0.0)))


def check_mean_zero(f: PUDensity, threshold: float = 1e3) -> float:
    """Slope ``|ch2(k_min)| / k_min``; warns when it exceeds ``threshold``."""
    i = f.grid.n_half
    slope = float(abs(f.ch2[i]) / f.grid.k_min)
    if slope > threshold:
        warnings.warn("channel 2 does not vanish at k=0; density is outside "
                      "the mean-zero class", MeanZeroWarning, stacklevel=2)
    return slope


def apply_np(f: PUDensity, domain: DomainSpec) -> PUDensity:
    K = symbol_K(f.grid.nodes, domain)
    return PUDensity(f.grid, K.d1 * f.ch1, K.d2 * f.ch2)


def resolvent_apply(lam: complex, g: PUDensity, domain: DomainSpec) -> PUDensity:
    """Solve ``(lam I - K*) phi = g`` channelwise."""
    lam = complex(lam)
    if lam.imag == 0 and -0.5 <= lam.real <= 0.5:
        raise SpectrumError(f"lambda={lam.real} lies in [-1/2, 1/2]")
    K = symbol_K(g.grid.nodes, domain)
    d1, d2 = lam - K.d1, lam - K.d2
    if min(np.abs(d1).min(), np.abs(d2).min()) < 1e-8:
        warnings.warn("resolvent is nearly singular on the grid", ConditioningWarning,
                      stacklevel=2)
    return PUDensity(g.grid, g.ch1 / d1, g.ch2 / d2)


def single_layer_eval(f: PUDensity, x, y, domain: DomainSpec) -> np.ndarray:
    """Single layer potential at the plane points ``Psi(x, y)``.

    Each line contributes ``-(2pi)^(-1/2) int (e^{-|k||x-x_c|} e^{iky}
    - e^{-|k||x_c|}) hat_c(k) / (2|k|) dk``; the two exponentials are kept
    together so the integrand stays bounded at ``k = 0``.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x.shape
    x, y = x.ravel(), y.ravel()
    grid = f.grid
    k = grid.nodes
    a = np.abs(k)
    raw = apply_P_inverse(f)
    out = np.zeros(x.size)
    step = max(1, 2_000_000 // k.size)
    for comp, hat in zip((Component.OUTER, Component.INNER), raw):
        xc = domain.line_x(comp)
        wh = grid.weights * hat / (2 * a)
        anchor = np.sum(wh * np.exp(-a * abs(xc)))
        for s in range(0, x.size, step):
            xs, ys = x[s:s + step, None], y[s:s + step, None]
            val = np.exp(-a * np.abs(xs - xc) + 1j * k * ys) @ wh - anchor
            out[s:s + step] -= val.real / SQRT2PI
    return out.reshape(shape)


def single_layer_grad(f: PUDensity, x, y, domain: DomainSpec) -> tuple[np.ndarray, np.ndarray]:
    """Strip-coordinate gradient of ``single_layer_eval`` (off the lines)."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x.shape
    x, y = x.ravel(), y.ravel()
    grid = f.grid
    k = grid.nodes
    a = np.abs(k)
    raw = apply_P_inverse(f)
    gx = np.zeros(x.size)
    gy = np.zeros(x.size)
    for comp, hat in zip((Component.OUTER, Component.INNER), raw):
        xc = domain.line_x(comp)
        wh = grid.weights * hat / 2
        E = np.exp(-a[None, :] * np.abs(x[:, None] - xc) + 1j * k[None, :] * y[:, None])
        gx += (np.sign(x - xc) * (E @ wh)).real / SQRT2PI
        gy -= (E @ (wh * 1j * k / a)).real / SQRT2PI
    return gx.reshape(shape), gy.reshape(shape)


def gradient_energy(f: PUDensity, domain: DomainSpec) -> float:
    """``<f, (I/2 - K*) f>``: Dirichlet energy of the single layer in the domain."""
    K = symbol_K(f.grid.nodes, domain)
    h = PUDensity(f.grid, (0.5 - K.d1) * f.ch1, (0.5 - K.d2) * f.ch2)
    return float(inner_product(f, h, domain).real)
