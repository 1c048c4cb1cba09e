"""Resolution of the identity and spectral measures of the NP operator."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .frequency import PUDensity
from .geometry import DomainKind, DomainSpec


class SpectralParameterError(ValueError):
    pass


def negative_channel(domain: DomainSpec) -> int:
    """Channel whose eigenvalues are negative (1 for crescents, 2 otherwise)."""
    return 1 if domain.kind is DomainKind.CRESCENT else 2


def channel_for(t: float, domain: DomainSpec) -> int:
    neg = negative_channel(domain)
    return neg if t < 0 else 3 - neg


def k_cut(t, domain: DomainSpec):
    """Frequency where the channel eigenvalue ``+-exp(-|k|q)/2`` equals ``t``."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        return -np.log(2 * np.abs(t)) / domain.gap


@dataclass(frozen=True)
class SpectralWindow:
    t: float
    channel: int
    k_cut: float

    @classmethod
    def at(cls, t: float, domain: DomainSpec) -> "SpectralWindow":
        _check_t(t)
        return cls(float(t), channel_for(t, domain), float(k_cut(t, domain)))


def _check_t(t):
    if not -0.5 <= t <= 0.5:
        raise SpectralParameterError(f"t={t} outside [-1/2, 1/2]")


def apply_E(t: float, f: PUDensity, domain: DomainSpec) -> PUDensity:
    """Project ``f`` onto the spectral subspace of eigenvalues ``<= t``.

    ``t = 0`` is the right limit: the negative channel in full.
    """
    _check_t(t)
    neg = negative_channel(domain)
    a = np.abs(f.grid.nodes)
    kc = k_cut(t, domain)
    chans = {1: f.ch1, 2: f.ch2}
    out = {}
    if t < 0:
        out[neg] = np.where(a <= kc, chans[neg], 0)
        out[3 - neg] = np.zeros_like(chans[3 - neg])
    else:
        out[neg] = chans[neg].copy()
        out[3 - neg] = np.where(a >= kc, chans[3 - neg], 0)
    return PUDensity(f.grid, out[1], out[2])


def _jacobian(t, channel):
    """Density factor ``(1 -+ 2|t|) / (2 |t ln 2|t||)``; minus for channel 1."""
    at = np.abs(t)
    num = 1 - 2 * at if channel == 1 else 1 + 2 * at
    return num / (2 * np.abs(at * np.log(2 * at)))


def measure_density(f: PUDensity, g: PUDensity, t, domain: DomainSpec) -> np.ndarray:
    """Radon-Nikodym density of ``t -> <f, E(t) g>``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t == 0) or np.any(np.abs(t) >= 0.5):
        raise SpectralParameterError("density defined on (-1/2,0) u (0,1/2); "
                                     "use measure_density_limit at the ends")
    out = np.zeros(t.shape, dtype=complex)
    for ch in (1, 2):
        sel = np.array([channel_for(tt, domain) == ch for tt in t])
        if not sel.any():
            continue
        kap = k_cut(t[sel], domain)
        fp, fm = f.grid.interpolate(f.channel(ch), kap), f.grid.interpolate(f.channel(ch), -kap)
        gp, gm = g.grid.interpolate(g.channel(ch), kap), g.grid.interpolate(g.channel(ch), -kap)
        out[sel] = _jacobian(t[sel], ch) * (fp * np.conj(gp) + fm * np.conj(gm))
    return out


def measure_density_limit(f: PUDensity, g: PUDensity, end: float, domain: DomainSpec) -> complex:
    """Limit of the density at ``t -> -1/2^+`` or ``t -> 1/2^-``."""
    if abs(end) != 0.5:
        raise SpectralParameterError("end must be -1/2 or 1/2")
    ch = channel_for(end, domain)
    f0 = f.grid.interpolate(f.channel(ch), 0.0)[0]
    g0 = g.grid.interpolate(g.channel(ch), 0.0)[0]
    if ch == 1:
        return complex(2 * f0 * np.conj(g0))
    if abs(f0) < 1e-10 and abs(g0) < 1e-10:
        return 0j
    return complex(np.inf)


def node_measure(f: PUDensity, g: PUDensity, domain: DomainSpec):
    """Spectral measure sampled at the images ``t = +-exp(-kq)/2`` of the
    positive grid nodes.

    Returns ``(t, density, dt)`` sorted by ``t``; ``sum(density * dt)``
    integrates the measure over ``(-1/2, 1/2)``.
    """
    grid = f.grid
    n = grid.n_half
    k = grid.nodes[n:]
    w = grid.weights[n:]
    q = domain.gap
    neg = negative_channel(domain)
    ts, ds, dts = [], [], []
    for ch in (1, 2):
        sign = -1.0 if ch == neg else 1.0
        t = sign * 0.5 * np.exp(-k * q)
        fc, gc = f.channel(ch), g.channel(ch)
        prod = fc[n:] * np.conj(gc[n:]) + fc[:n][::-1] * np.conj(gc[:n][::-1])
        with np.errstate(invalid="ignore", divide="ignore"):
            dens = _jacobian(t, ch) * prod
        dens = np.where(t == 0, 0, dens)
        ts.append(t)
        ds.append(dens)
        dts.append(q * np.abs(t) * w)
    t = np.concatenate(ts)
    order = np.argsort(t, kind="stable")
    return t[order], np.concatenate(ds)[order], np.concatenate(dts)[order]


@dataclass(frozen=True)
class SpectralMeasure:
    """Sampled spectral density with its quadrature weights in ``t``."""

    t_nodes: np.ndarray
    density: np.ndarray
    dt: np.ndarray

    def mass(self) -> complex:
        return complex(np.sum(self.density * self.dt))

    def integrate(self, weight: Callable) -> complex:
        return complex(np.sum(weight(self.t_nodes) * self.density * self.dt))


def spectral_measure(f: PUDensity, g: PUDensity, domain: DomainSpec) -> SpectralMeasure:
    return SpectralMeasure(*node_measure(f, g, domain))


def spectral_integral(f: PUDensity, g: PUDensity, weight: Callable, domain: DomainSpec) -> complex:
    """``int weight(t) d<f, E(t) g>`` over ``[-1/2, 1/2]``."""
    return spectral_measure(f, g, domain).integrate(weight)


def interval_mass(f: PUDensity, t0: float, t1: float, domain: DomainSpec, order: int = 24) -> float:
    """``<f, (E(t1) - E(t0)) f>`` by Gauss-Legendre quadrature.

    The integral is taken in frequency: on each sign of ``t`` the measure
    pulls back to ``S_ch(k) (|f(k)|^2 + |f(-k)|^2) dk`` over the matching
    ``k`` band, which stays smooth where the ``t`` density degenerates
    near ``t = 0``.
    """
    from .np_core import symbol_S

    t0, t1 = max(t0, -0.5), min(t1, 0.5)
    if t1 <= t0:
        return 0.0
    pieces = [(t0, 0.0), (0.0, t1)] if t0 < 0 < t1 else [(t0, t1)]
    x, w = leggauss(order)
    k_max = f.grid.k_max
    tot = 0.0
    for a, b in pieces:
        ch = channel_for(a if a < 0 else b, domain)
        lo = float(k_cut(max(abs(a), abs(b)), domain))
        small = min(abs(a), abs(b))
        hi = k_max if small == 0 else min(float(k_cut(small, domain)), k_max)
        if hi <= lo:
            continue
        edges = np.linspace(lo, hi, int(np.ceil((hi - lo) / 0.25)) + 1)
        ea, eb = edges[:-1, None], edges[1:, None]
        k = (0.5 * (eb - ea) * x + 0.5 * (ea + eb)).ravel()
        wk = (0.5 * (eb - ea) * w).ravel()
        k = np.maximum(k, 1e-300)
        vals = f.channel(ch)
        dens = np.abs(f.grid.interpolate(vals, k)) ** 2 + np.abs(f.grid.interpolate(vals, -k)) ** 2
        S = symbol_S(k, domain)
        tot += float(np.sum(wk * (S.d1 if ch == 1 else S.d2) * dens))
    return tot


def continuity_probe(f: PUDensity, t: float, h_seq, domain: DomainSpec) -> np.ndarray:
    """``||(E(t) - E(t-h)) f||`` for each ``h``; tends to zero when ``t``
    carries no point mass."""
    _check_t(t)
    out = [np.sqrt(max(interval_mass(f, t - h, t, domain), 0.0)) for h in h_seq]
    return np.asarray(out)


def spectral_mass(f: PUDensity, domain: DomainSpec) -> float:
    """Total mass, which equals ``<f, f>``."""
    return spectral_integral(f, f, np.ones_like, domain).real


__all__ = [
    "SpectralWindow", "apply_E", "measure_density", "measure_density_limit",
    "node_measure", "spectral_integral", "continuity_probe", "interval_mass",
    "k_cut", "negative_channel", "channel_for", "spectral_mass",
    "SpectralMeasure", "spectral_measure", "SpectralParameterError",
]
