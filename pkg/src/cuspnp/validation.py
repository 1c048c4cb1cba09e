"""Self-checking property suite behind ``cuspnp validate``.

Every check returns a :class:`CheckResult`; the suite is deterministic for
a fixed seed so reports can be compared byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .frequency import FrequencyGrid, PUDensity, apply_P, apply_P_inverse, build_grid, default_grid, u_inverse
from .geometry import Component, DomainKind, DomainSpec, boundary_param, mobius, outward_normal
from .np_core import apply_np, gradient_energy, inner_product, norm, single_layer_eval
from .oracle import (bilinear_real_space, gradient_energy_real, np_real_space,
                     single_disk_potential, sl_real_space)
from .resonance import DielectricParams, DipoleSource, resonance_grid, resonance_norm, solve_transmission
from .samples import GaussianMixtureTrace, random_density
from .spectral import apply_E, continuity_probe, interval_mass, measure_density, spectral_integral


@dataclass(frozen=True)
class CheckResult:
    name: str
    error: float
    tolerance: float
    passed: bool
    relaxed: bool = False

    @classmethod
    def of(cls, name, error, tol, relaxed=False):
        error = float(error)
        return cls(name, error, float(tol), bool(error <= tol), relaxed)


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def coupling_apply(f: PUDensity, domain: DomainSpec, *, corrupt: bool = False) -> PUDensity:
    """NP operator applied through its line-coupling matrix.

    In line coordinates the operator is ``exp(-|k|q)/2 [[0, s], [s, 0]]``;
    ``corrupt`` flips one off-diagonal sign, which breaks self-adjointness
    and serves as a negative control.
    """
    g_o, g_i = apply_P_inverse(f)
    s = 1.0 if domain.kind is DomainKind.CRESCENT else -1.0
    e = 0.5 * np.exp(-np.abs(f.grid.nodes) * domain.gap)
    lower = -s if corrupt else s
    return apply_P((s * e * g_i, lower * e * g_o), f.grid)


def check_self_adjoint(domain, grid, rng, n=100, corrupt=False):
    worst = 0.0
    for _ in range(n):
        f, g = random_density(grid, rng), random_density(grid, rng)
        lhs = inner_product(f, coupling_apply(g, domain, corrupt=corrupt), domain)
        rhs = inner_product(coupling_apply(f, domain, corrupt=corrupt), g, domain)
        worst = max(worst, abs(lhs - rhs) / (norm(f, domain) * norm(g, domain)))
    return worst


def check_norm_bound(domain, grid, rng, n=100):
    """Largest ``||K* f|| / ||f|| - 1/2`` over random densities."""
    worst = -np.inf
    for _ in range(n):
        f = random_density(grid, rng)
        worst = max(worst, norm(apply_np(f, domain), domain) / norm(f, domain) - 0.5)
    return worst


def check_projections(domain, grid, rng, n=5):
    worst = 0.0
    for _ in range(n):
        f, g = random_density(grid, rng), random_density(grid, rng)
        t, s = np.sort(rng.uniform(-0.5, 0.5, 2))
        Et = apply_E(t, f, domain)
        scale = norm(f, domain)
        worst = max(
            worst,
            norm(apply_E(t, Et, domain) - Et, domain) / scale,
            norm(apply_E(s, Et, domain) - Et, domain) / scale,
            norm(apply_E(t, apply_E(s, f, domain), domain) - Et, domain) / scale,
            abs(inner_product(f, apply_E(t, g, domain), domain)
                - inner_product(Et, g, domain)) / (scale * norm(g, domain)),
        )
    return worst


def check_resolution(domain, grid, rng, n=5):
    worst = 0.0
    for _ in range(n):
        f, g = random_density(grid, rng), random_density(grid, rng)
        Kg = apply_np(g, domain)
        pairs = [
            (spectral_integral(f, g, np.ones_like, domain), inner_product(f, g, domain)),
            (spectral_integral(f, g, lambda t: t, domain), inner_product(f, Kg, domain)),
            (spectral_integral(f, g, lambda t: t * t, domain),
             inner_product(f, apply_np(Kg, domain), domain)),
        ]
        scale = norm(f, domain) * norm(g, domain)
        worst = max(worst, *(abs(a - b) / max(abs(b), 1e-3 * scale) for a, b in pairs))
    return worst


def check_oracle(domain, grid, rng, n=3, y=np.linspace(-6, 6, 25)):
    """Returns worst relative errors of the NP, single-layer and bilinear
    routes against the real-space oracle."""
    e_np = e_sl = e_bil = 0.0
    xo, xi = domain.line_x(Component.OUTER), domain.line_x(Component.INNER)
    for _ in range(n):
        gm, gm2 = GaussianMixtureTrace.random(domain, rng), GaussianMixtureTrace.random(domain, rng)
        tr, f = gm.trace(), gm.pu(grid)
        ref = np_real_space(tr)
        got = u_inverse(apply_np(f, domain), y, domain)
        for c in Component:
            e_np = max(e_np, _rel(got.values(c), ref(c, y)))
        if domain.kind is DomainKind.CRESCENT:
            xs = rng.uniform(xo, xi, 10)
        else:
            side = rng.random(10) < 0.5
            xs = np.where(side, xo + rng.uniform(0.05, 3, 10), xi - rng.uniform(0.05, 3, 10))
        ys = rng.uniform(-5, 5, 10)
        e_sl = max(e_sl, _rel(single_layer_eval(f, xs, ys, domain), sl_real_space(tr, xs, ys)))
        e_bil = max(e_bil, _rel(inner_product(gm2.pu(grid), f, domain),
                                bilinear_real_space(gm2.trace(), tr)))
    return e_np, e_sl, e_bil


def check_single_disk(rng):
    worst = 0.0
    for a in (1.0, -0.5, 2.0):
        ang = rng.uniform(0, 2 * np.pi, 20)
        rad = abs(a) * rng.uniform(0.05, 3, 20)
        p = np.column_stack([a + rad * np.cos(ang), rad * np.sin(ang)])
        exact = np.where(rad < abs(a), np.log(abs(a)), np.log(rad))
        worst = max(worst, np.max(np.abs(single_disk_potential(a, p) - exact)))
    return worst


def check_jump(domain, grid, rng, n_points=20, eps=1e-3):
    """Second-order one-sided normal differences of the single layer against
    ``(+-1/2 + K*) phi``; returns the worst error relative to ``max|phi|``."""
    gm = GaussianMixtureTrace.random(domain, rng)
    f = gm.pu(grid)
    y = np.sort(rng.uniform(-4, 4, n_points))
    phi = u_inverse(f, y, domain)
    kphi = u_inverse(apply_np(f, domain), y, domain)
    worst, scale = 0.0, 0.0

    def S(p):
        w = mobius(p)
        return single_layer_eval(f, w[..., 0], w[..., 1], domain)

    for c in Component:
        p = boundary_param(domain, c, y)
        nu = outward_normal(domain, c, p)
        s0 = S(p)
        for side in (1.0, -1.0):
            d = side * eps * nu
            deriv = side * (-3 * s0 + 4 * S(p + d) - S(p + 2 * d)) / (2 * eps)
            want = side * 0.5 * phi.values(c) + kphi.values(c)
            worst = max(worst, np.max(np.abs(deriv - want)))
        scale = max(scale, np.max(np.abs(phi.values(c))))
    return worst / scale


def check_duality(rng, n=3):
    """Crescent density at ``t`` against touching disks at ``-t`` with the
    same gap."""
    c, t = DomainSpec.crescent(1.0, 0.5), DomainSpec.touching(2.0, 2.0)
    grid = default_grid(c)
    worst = 0.0
    ts = np.array([-0.4, -0.2, -0.05, 0.05, 0.2, 0.4])
    for _ in range(n):
        f = random_density(grid, rng)
        a = measure_density(f, f, ts, c)
        b = measure_density(f, f, -ts, t)
        worst = max(worst, _rel(a, b))
    return worst


def check_continuity(domain, grid, rng, hs=10.0 ** -np.arange(2, 7)):
    """Squared increments over ``h`` against the density at ``t - h/2``."""
    f = random_density(grid, rng)
    worst = 0.0
    for t in np.linspace(-0.45, 0.45, 10):
        p = continuity_probe(f, t, hs, domain)
        Q = measure_density(f, f, t - hs[-1] / 2, domain).real[0]
        worst = max(worst, abs(p[-1] ** 2 / hs[-1] - Q) / max(Q, 1e-300))
    return worst


def check_gradient_energy(rng):
    d = DomainSpec.crescent(1.0, 0.5)
    gm = GaussianMixtureTrace.random(d, rng)
    return abs(gradient_energy(gm.pu(default_grid(d)), d) - gradient_energy_real(gm.trace(), d)) \
        / gradient_energy(gm.pu(default_grid(d)), d)


def check_resonance_routes(domain, src):
    worst = 0.0
    for eps_c in (-1 / 3, -3.0, -1.0, 2.0, -0.2):
        for delta in (1e-1, 1e-2, 1e-3, 1e-4):
            p = DielectricParams(eps_c, delta)
            g = resonance_grid(p, domain)
            a = resonance_norm(p, src, domain, g)
            b = norm(solve_transmission(p, src, domain, g), domain) ** 2
            worst = max(worst, abs(a - b) / b)
    return worst


@dataclass
class SuiteSettings:
    seed: int = 0
    n_oracle: int = 3
    n_random: int = 100
    corrupt_symbol: bool = False
    grid: FrequencyGrid | None = None
    include_slow: bool = True


@dataclass
class Report:
    domain: str
    R: float
    r: float
    seed: int
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def run_suite(domain: DomainSpec, settings: SuiteSettings | None = None) -> Report:
    """Run the property suite on ``domain``; tolerances are relaxed a hundredfold
    (and flagged) on grids with fewer than 1000 nodes."""
    s = settings or SuiteSettings()
    grid = s.grid or default_grid(domain)
    relaxed = len(grid) < 1000
    mult = 100.0 if relaxed else 1.0
    rng = np.random.default_rng(s.seed)
    rep = Report(domain.kind.value, domain.R, domain.r, s.seed)
    add = lambda name, err, tol: rep.checks.append(CheckResult.of(name, err, tol * mult, relaxed))

    add("self_adjoint", check_self_adjoint(domain, grid, rng, s.n_random, s.corrupt_symbol), 1e-13)
    add("norm_bound", check_norm_bound(domain, grid, rng, s.n_random), 1e-12)
    add("projection_laws", check_projections(domain, grid, rng), 1e-13)
    add("resolution_of_identity", check_resolution(domain, grid, rng), 1e-6)
    add("continuity_density", check_continuity(domain, grid, rng), 1e-4)
    add("duality", check_duality(rng), 1e-10)
    add("jump_relation", check_jump(domain, grid, rng), 1e-4)
    src = DipoleSource((5.0, 0.0), (1.0, 0.0)) if domain.kind is DomainKind.CRESCENT \
        else DipoleSource((0.0, 3.0), (1.0, 0.0))
    add("resonance_routes", check_resonance_routes(domain, src), 1e-6)
    if s.include_slow:
        add("single_disk_fixture", check_single_disk(rng), 1e-8)
        e_np, e_sl, e_bil = check_oracle(domain, grid, rng, s.n_oracle)
        add("oracle_np", e_np, 1e-5)
        add("oracle_single_layer", e_sl, 1e-5)
        add("oracle_bilinear", e_bil, 1e-5)
        add("gradient_energy", check_gradient_energy(rng), 1e-2)
    return rep
