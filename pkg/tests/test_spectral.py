import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cuspnp.frequency import PUDensity
from cuspnp.geometry import DomainSpec
from cuspnp.np_core import apply_np, inner_product, norm
from cuspnp.samples import random_density
from cuspnp.spectral import (SpectralParameterError, SpectralWindow, apply_E, channel_for,
                             continuity_probe, interval_mass, k_cut, measure_density,
                             measure_density_limit, negative_channel, spectral_integral,
                             spectral_mass, spectral_measure)

from conftest import CRESCENT, TOUCHING, grid_for

seeds = st.integers(0, 2**32 - 1)
kinds = st.sampled_from([CRESCENT, TOUCHING])
ts = st.floats(-0.5, 0.5)
prop = settings(max_examples=20, deadline=None)


def test_endpoints(domain, grid, rng):
    f = random_density(grid, rng)
    assert norm(apply_E(-0.5, f, domain), domain) == 0
    assert norm(apply_E(0.5, f, domain) - f, domain) == 0


def test_window_at_quarter():
    dom = DomainSpec.crescent(1.0, 1 / 3)
    assert dom.gap == pytest.approx(1.0)
    w = SpectralWindow.at(-0.25, dom)
    assert w.channel == 1 and w.k_cut == pytest.approx(np.log(2))
    g = grid_for(dom)
    f = PUDensity(g, np.ones(len(g)), np.ones(len(g)))
    E = apply_E(-0.25, f, dom)
    assert np.array_equal(E.ch1, (np.abs(g.nodes) <= np.log(2)).astype(complex))
    assert not E.ch2.any()


def test_channel_roles(crescent, touching):
    assert negative_channel(crescent) == 1 and negative_channel(touching) == 2
    assert channel_for(-0.1, crescent) == 1 and channel_for(0.1, crescent) == 2
    assert channel_for(-0.1, touching) == 2 and channel_for(0.1, touching) == 1
    assert k_cut(0.5, crescent) == 0


def test_t_out_of_range(crescent, rng):
    f = random_density(grid_for(crescent), rng)
    with pytest.raises(SpectralParameterError):
        apply_E(0.6, f, crescent)
    with pytest.raises(SpectralParameterError):
        measure_density(f, f, 0.0, crescent)
    with pytest.raises(SpectralParameterError):
        measure_density_limit(f, f, 0.3, crescent)


@prop
@given(seed=seeds, dom=kinds, t=ts, s=ts)
def test_projection_laws(seed, dom, t, s):
    rng = np.random.default_rng(seed)
    g = grid_for(dom)
    f, h = random_density(g, rng), random_density(g, rng)
    Et = apply_E(t, f, dom)
    tol = 1e-13 * norm(f, dom)
    assert norm(apply_E(t, Et, dom) - Et, dom) <= tol
    assert norm(apply_E(s, Et, dom) - apply_E(min(s, t), f, dom), dom) <= tol
    assert abs(inner_product(f, apply_E(t, h, dom), dom) - inner_product(Et, h, dom)) \
        <= 1e-13 * norm(f, dom) * norm(h, dom)


@prop
@given(seed=seeds, dom=kinds)
def test_monotone_and_nonnegative(seed, dom):
    f = random_density(grid_for(dom), np.random.default_rng(seed))
    vals = [inner_product(f, apply_E(t, f, dom), dom).real for t in np.linspace(-0.5, 0.5, 21)]
    assert np.all(np.diff(vals) >= -1e-14 * vals[-1])
    m = spectral_measure(f, f, dom)
    assert np.all(m.density.real >= 0)


def test_measure_limits(crescent, touching, rng):
    g = grid_for(crescent)
    f = random_density(g, rng)
    f0 = g.interpolate(f.ch1, 0.0)[0]
    assert measure_density_limit(f, f, -0.5, crescent) == pytest.approx(2 * abs(f0) ** 2)
    assert measure_density(f, f, -0.5 + 1e-9, crescent).real[0] == pytest.approx(2 * abs(f0) ** 2, rel=1e-6)
    assert measure_density_limit(f, f, 0.5, crescent) == 0
    assert abs(measure_density(f, f, 0.5 - 1e-9, crescent)[0]) < 1e-6
    assert measure_density_limit(f, f, 0.5, touching) == pytest.approx(2 * abs(f0) ** 2)


def test_resolution_of_identity(domain, grid, rng):
    for _ in range(3):
        f, g = random_density(grid, rng), random_density(grid, rng)
        Kg = apply_np(g, domain)
        assert spectral_integral(f, g, np.ones_like, domain) == pytest.approx(inner_product(f, g, domain), rel=1e-6)
        assert spectral_integral(f, g, lambda t: t, domain) == pytest.approx(inner_product(f, Kg, domain), rel=1e-6)
        assert spectral_integral(f, g, lambda t: t * t, domain) == pytest.approx(
            inner_product(f, apply_np(Kg, domain), domain), rel=1e-6)
    assert spectral_mass(f, domain) == pytest.approx(norm(f, domain) ** 2, rel=1e-10)


@pytest.mark.parametrize("t0,t1", [(-0.4, -0.1), (-0.2, 0.3), (0.05, 0.45)])
def test_interval_mass_matches_projection(domain, t0, t1):
    # the indicator cut is only resolved when the grid has edges at the cut frequencies
    from cuspnp.frequency import build_grid
    cuts = [float(k_cut(t, domain)) for t in (t0, t1)]
    grid = build_grid(200 / domain.gap, refine=[(k, 1e-3) for k in cuts])
    f = random_density(grid, np.random.default_rng(7))
    proj = inner_product(f, apply_E(t1, f, domain) - apply_E(t0, f, domain), domain).real
    assert interval_mass(f, t0, t1, domain, order=64) == pytest.approx(proj, rel=1e-10)


def test_duality_under_matched_gap(rng):
    c, t = DomainSpec.crescent(1.0, 0.5), DomainSpec.touching(2.0, 2.0)
    assert c.gap == pytest.approx(t.gap)
    f = random_density(grid_for(c), rng)
    x = np.array([-0.4, -0.1, 0.2, 0.45])
    assert np.allclose(measure_density(f, f, x, c), measure_density(f, f, -x, t), rtol=1e-12)


def test_continuity_probe(domain, grid, rng):
    f = random_density(grid, rng)
    p = continuity_probe(f, 0.2, 10.0 ** -np.arange(2, 7), domain)
    # no atom at t: the increment norm shrinks like sqrt(h)
    assert np.all(np.diff(p) < 0)
    assert p[-1] / p[-2] == pytest.approx(10 ** -0.5, rel=1e-3)
    assert np.all(continuity_probe(f, -0.5, [1e-2, 1e-3], domain) == 0)


def test_band_limited_probe_is_exactly_zero(crescent):
    g = grid_for(crescent)
    f = PUDensity(g, np.where(np.abs(g.nodes) < 1, 1.0, 0), np.zeros(len(g)))
    # t = -0.02 maps to k_cut ~ 7.8, far from the support
    assert np.all(continuity_probe(f, -0.02, [1e-4, 1e-5], crescent) == 0)
