"""Plasmonic resonance of a dipole-driven transmission problem.

The induced density solves ``(lambda I - K*) phi = d_nu F`` with the
complex spectral parameter of a lossy inclusion; its norm is a Poisson
integral of the spectral density ``Q`` of the boundary data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .frequency import SQRT2PI, BoundaryTrace, FrequencyGrid, PUDensity, apply_P, build_grid
from .geometry import Component, DomainSpec, mobius, normal_sign
from .np_core import norm, resolvent_apply, single_layer_eval
from .spectral import (SpectralMeasure, k_cut, measure_density,
                       measure_density_limit, spectral_measure)

DEFAULT_DELTAS = np.geomspace(1e-1, 1e-4, 7)


class SourceLocationError(ValueError):
    """Source lies in the closure of the inclusion."""


class SingularityError(ValueError):
    """Evaluation at the source point."""


@dataclass(frozen=True)
class DipoleSource:
    """Point dipole ``a . grad delta_z``."""

    location: tuple[float, float]
    moment: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "location", tuple(float(v) for v in self.location))
        object.__setattr__(self, "moment", tuple(float(v) for v in self.moment))

    @property
    def z(self) -> complex:
        return complex(*self.location)

    @property
    def A(self) -> complex:
        return complex(*self.moment)

    def check(self, domain: DomainSpec) -> None:
        if domain.contains_closure(np.asarray(self.location)):
            raise SourceLocationError(f"source {self.location} is not outside the inclusion")


@dataclass(frozen=True)
class DielectricParams:
    """Inclusion permittivity ``eps_c + i delta`` in a unit background."""

    eps_c: float
    delta: float

    def __post_init__(self):
        if self.eps_c == 1:
            raise ValueError("eps_c must differ from 1")
        if not self.delta > 0:
            raise ValueError("delta must be positive")

    @property
    def lam(self) -> complex:
        eps = complex(self.eps_c, self.delta)
        return (eps + 1) / (2 * (eps - 1))

    @property
    def lam0(self) -> float:
        return (self.eps_c + 1) / (2 * (self.eps_c - 1))

    @property
    def B(self) -> float:
        return abs(self.delta / (self.eps_c - 1))

    def poisson_center(self) -> float:
        B2 = self.B**2
        return (2 * self.lam0 + B2) / (2 * (1 + B2))

    def poisson_width(self) -> float:
        return self.B * (1 - 2 * self.lam0) / (2 * (1 + self.B**2))


def newtonian_potential(src: DipoleSource, p) -> np.ndarray:
    """``a . (p - z) / (2 pi |p - z|^2)`` at plane points ``p``."""
    p = np.asarray(p, dtype=float)
    d = p - np.asarray(src.location)
    r2 = np.sum(d * d, axis=-1)
    if np.any(r2 == 0):
        raise SingularityError("potential is singular at the source")
    return (d @ np.asarray(src.moment)) / (2 * np.pi * r2)


def _line_data(src: DipoleSource, domain: DomainSpec):
    zeta = 1 / src.z
    C = src.A / src.z**2
    for c in (Component.OUTER, Component.INNER):
        yield c, domain.line_x(c), normal_sign(domain, c), zeta, C


def boundary_trace(src: DipoleSource, domain: DomainSpec, y_nodes=None) -> BoundaryTrace:
    """Sampled ``d_nu F`` on both circles.

    In strip coordinates ``h d_nu F = sigma Re(C / (w - zeta)^2) / 2pi``
    with ``w = x_c + iy``, ``zeta = 1/z`` and ``C = A / z^2``.
    """
    src.check(domain)
    if y_nodes is None:
        y_nodes = np.linspace(-60.0, 60.0, 4801)
    fns = []
    for _, xc, sgn, zeta, C in _line_data(src, domain):
        fns.append(lambda y, xc=xc, sgn=sgn, zeta=zeta, C=C:
                   sgn * np.real(C / (xc + 1j * np.asarray(y) - zeta) ** 2) / (2 * np.pi))
    return BoundaryTrace.from_weighted(domain, y_nodes, *fns)


def boundary_data(src: DipoleSource, domain: DomainSpec, grid: FrequencyGrid) -> PUDensity:
    """Channel density of ``d_nu F`` from the closed-form line transforms.

    With ``alpha = x_c - Re zeta`` the transform of ``1/(w - zeta)^2`` is
    ``-sqrt(2 pi) |k| e^{-|alpha k|} e^{-ik Im zeta}`` on the half line
    ``sign(k) = -sign(alpha)`` and zero on the other.
    """
    src.check(domain)
    k = grid.nodes
    hats = []
    for _, xc, sgn, zeta, C in _line_data(src, domain):
        alpha, beta = xc - zeta.real, zeta.imag

        def J(kk):
            return 2 * np.pi * np.abs(kk) * np.exp(-abs(alpha) * np.abs(kk)) * (np.sign(alpha) * kk < 0)

        hats.append(sgn / (2 * np.pi * SQRT2PI) * 0.5 * np.exp(-1j * k * beta)
                    * (C * J(k) + np.conj(C) * J(-k)))
    return apply_P(hats, grid)


def resonance_grid(params: DielectricParams | None, domain: DomainSpec, **kw) -> FrequencyGrid:
    """Default grid, refined where the Lorentzian ``|lambda - t|^-2`` peaks."""
    q = domain.gap
    refine = list(kw.pop("refine", ()))
    k_max = kw.pop("k_max", 200.0 / q)
    if params is not None and 0 < abs(params.lam0) < 0.5:
        c = params.poisson_center()
        kap = float(k_cut(c, domain))
        if 0 < kap < k_max:
            refine.append((kap, params.poisson_width() / (q * abs(c)) / 4))
    return build_grid(k_max, refine=refine, **kw)


def solve_transmission(params: DielectricParams, src: DipoleSource, domain: DomainSpec,
                       grid: FrequencyGrid | None = None) -> PUDensity:
    """Induced density ``phi = (lambda I - K*)^{-1} d_nu F``."""
    grid = grid or resonance_grid(params, domain)
    return resolvent_apply(params.lam, boundary_data(src, domain, grid), domain)


def q_density(src: DipoleSource, domain: DomainSpec, t_grid=None,
              grid: FrequencyGrid | None = None):
    """Spectral density ``Q`` of ``d_nu F``.

    Without ``t_grid`` the measure is returned on the images of the grid
    nodes (a :class:`SpectralMeasure`); otherwise ``Q`` is interpolated at
    the requested ``t`` with endpoint values taken as one-sided limits.
    """
    grid = grid or resonance_grid(None, domain)
    g = boundary_data(src, domain, grid)
    if t_grid is None:
        return spectral_measure(g, g, domain)
    t = np.asarray(t_grid, dtype=float)
    out = np.empty(t.shape)
    for i, tt in np.ndenumerate(t):
        if abs(tt) == 0.5:
            out[i] = measure_density_limit(g, g, tt, domain).real
        else:
            out[i] = measure_density(g, g, tt, domain).real[0]
    return out


def resonance_norm(params: DielectricParams, src: DipoleSource, domain: DomainSpec,
                   grid: FrequencyGrid | None = None) -> float:
    """``||phi^delta||^2`` as the Poisson-type integral of ``Q``."""
    grid = grid or resonance_grid(params, domain)
    m: SpectralMeasure = q_density(src, domain, grid=grid)
    c, w = params.poisson_center(), params.poisson_width()
    return m.integrate(lambda t: 1.0 / ((t - c) ** 2 + w * w)).real


def richardson(deltas, values, order: int = 2) -> float:
    """Limit at ``delta = 0`` of the polynomial through the ``order + 1``
    smallest-``delta`` samples."""
    d = np.asarray(deltas, dtype=float)
    v = np.asarray(values, dtype=float)
    idx = np.argsort(d)[: order + 1]
    coef = np.polyfit(d[idx], v[idx], order)
    return float(coef[-1])


def predicted_limit(eps_c: float, src: DipoleSource, domain: DomainSpec,
                    grid: FrequencyGrid | None = None, *, poisson: bool = False) -> float:
    """Closed-form ``lim delta ||phi^delta||^2``.

    ``|eps_c - 1| Q(lambda_0) / (1/2 - lambda_0)``, with ``Q(-1/2^+)/2`` at
    the left end.  A Poisson kernel of half-width ``w`` has mass ``pi`` when
    normalised as ``w / ((t-c)^2 + w^2)``, so the exact limit carries an extra
    factor ``pi``; ``poisson=True`` includes it.
    """
    lam0 = (eps_c + 1) / (2 * (eps_c - 1))
    if lam0 == 0:
        raise ValueError("lambda_0 = 0 has no delta^-1 blow-up; use bounded_case_check")
    if not -0.5 <= lam0 < 0.5:
        raise ValueError("lambda_0 must lie in [-1/2, 1/2)")
    if lam0 == -0.5:
        Q = 0.5 * q_density(src, domain, [-0.5], grid)[0]
    else:
        Q = q_density(src, domain, [lam0], grid)[0]
    val = abs(eps_c - 1) * Q / (0.5 - lam0)
    return float(np.pi * val if poisson else val)


@dataclass(frozen=True)
class BlowupResult:
    """Blow-up sweep: ``estimate`` extrapolates ``delta ||phi||^2``;
    ``predicted`` is the closed form without, ``predicted_poisson`` with,
    the Poisson-kernel factor ``pi``."""

    estimate: float
    predicted: float
    predicted_poisson: float
    deltas: np.ndarray = field(repr=False)
    norms_sq: np.ndarray = field(repr=False)

    def __iter__(self):
        return iter((self.estimate, self.predicted))

    @property
    def relative_gap(self) -> float:
        return abs(self.estimate - self.predicted) / abs(self.predicted)

    @property
    def relative_gap_poisson(self) -> float:
        return abs(self.estimate - self.predicted_poisson) / abs(self.predicted_poisson)


def sweep_norms(eps_c: float, src: DipoleSource, domain: DomainSpec, delta_seq=DEFAULT_DELTAS) -> np.ndarray:
    """``||phi^delta||^2`` for each ``delta``, in the given order."""
    return np.array([resonance_norm(DielectricParams(eps_c, d), src, domain) for d in delta_seq])


def blowup_limit(eps_c: float, src: DipoleSource, domain: DomainSpec,
                 delta_seq=DEFAULT_DELTAS) -> BlowupResult:
    """Extrapolate ``lim delta ||phi^delta||^2`` and compare with the closed
    form; unpacks as ``(estimate, predicted)``."""
    lam0 = (eps_c + 1) / (2 * (eps_c - 1))
    if lam0 == 0:
        raise ValueError("lambda_0 = 0 has no delta^-1 blow-up; use bounded_case_check")
    deltas = np.asarray(delta_seq, dtype=float)
    norms = sweep_norms(eps_c, src, domain, deltas)
    est = richardson(deltas, deltas * norms)
    pred = predicted_limit(eps_c, src, domain)
    return BlowupResult(est, pred, np.pi * pred, deltas, norms)


@dataclass(frozen=True)
class BoundedCaseResult:
    deltas: np.ndarray
    scaled: np.ndarray
    majorants: np.ndarray

    @property
    def max_scaled(self) -> float:
        return float(self.scaled.max())

    @property
    def within_bound(self) -> bool:
        return bool(np.all(self.scaled <= self.majorants))


def bounded_case_check(src: DipoleSource, domain: DomainSpec, delta_seq=None) -> BoundedCaseResult:
    """``delta^2 ||phi^delta||^2`` at ``eps_c = -1`` against the majorant
    ``(4 + delta^2)^2 int |Q| dt``."""
    deltas = np.asarray(np.geomspace(1e-1, 1e-5, 5) if delta_seq is None else delta_seq, dtype=float)
    norms = sweep_norms(-1.0, src, domain, deltas)
    m = q_density(src, domain)
    absQ = float(np.sum(np.abs(m.density) * m.dt))
    return BoundedCaseResult(deltas, deltas**2 * norms, (4 + deltas**2) ** 2 * absQ)


def total_field(params: DielectricParams, src: DipoleSource, domain: DomainSpec, p,
                grid: FrequencyGrid | None = None, *, boundary_tol: float = 1e-9):
    """``u = F + S[phi^delta]`` at plane points ``p``.

    Returns ``(u, on_boundary)``; the single layer is continuous so the value
    on a flagged row is the common limit from both sides.
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    phi = solve_transmission(params, src, domain, grid)
    w = mobius(p)
    u = newtonian_potential(src, p) + single_layer_eval(phi, w[:, 0], w[:, 1], domain)
    on = np.zeros(len(p), dtype=bool)
    for c in Component:
        disk = domain.disk(c)
        dist = np.abs(np.hypot(p[:, 0] - disk.signed_center, p[:, 1]) - disk.radius)
        on |= dist < boundary_tol
    return u, on


def norm_sq(phi: PUDensity, domain: DomainSpec) -> float:
    return norm(phi, domain) ** 2
