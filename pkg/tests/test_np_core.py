import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cuspnp.frequency import PUDensity, build_grid
from cuspnp.geometry import DomainKind, DomainSpec
from cuspnp.np_core import (ConditioningWarning, MeanZeroWarning, SpectrumError, apply_np,
                            check_mean_zero, gradient_energy, inner_product, norm,
                            resolvent_apply, single_layer_eval, single_layer_grad,
                            symbol_K, symbol_S, symbol_S_limit)
from cuspnp.samples import random_density

from conftest import CRESCENT, TOUCHING, grid_for

seeds = st.integers(0, 2**32 - 1)
kinds = st.sampled_from([CRESCENT, TOUCHING])
prop = settings(max_examples=20, deadline=None)


def test_symbol_S_values(crescent):
    s = symbol_S(np.array([1.0, -2.0]), crescent)
    q = crescent.gap
    assert s.d1 == pytest.approx([(1 - np.exp(-q)) / 2, (1 - np.exp(-2 * q)) / 4])
    assert s.d2 == pytest.approx([(1 + np.exp(-q)) / 2, (1 + np.exp(-2 * q)) / 4])


def test_symbol_S_small_k_limit(crescent):
    assert symbol_S(np.array([1e-12]), crescent).d1[0] == pytest.approx(symbol_S_limit(crescent).d1)
    assert np.isinf(symbol_S_limit(crescent).d2)
    with pytest.raises(ValueError):
        symbol_S(np.array([0.0]), crescent)


@pytest.mark.parametrize("dom,signs", [(CRESCENT, (-1, 1)), (TOUCHING, (1, -1))])
def test_symbol_K_signs(dom, signs):
    K = symbol_K(np.array([0.0, 2.0]), dom)
    assert K.d1[0] == signs[0] * 0.5 and K.d2[0] == signs[1] * 0.5
    assert abs(K.d1[1]) == pytest.approx(0.5 * np.exp(-2 * dom.gap))


@prop
@given(seed=seeds, dom=kinds)
def test_self_adjoint(seed, dom):
    rng = np.random.default_rng(seed)
    g = grid_for(dom)
    f, h = random_density(g, rng), random_density(g, rng)
    lhs = inner_product(f, apply_np(h, dom), dom)
    rhs = inner_product(apply_np(f, dom), h, dom)
    assert abs(lhs - rhs) <= 1e-13 * norm(f, dom) * norm(h, dom)


@prop
@given(seed=seeds, dom=kinds)
def test_norm_bound(seed, dom):
    g = grid_for(dom)
    f = random_density(g, np.random.default_rng(seed))
    assert norm(apply_np(f, dom), dom) <= (0.5 + 1e-12) * norm(f, dom)


@prop
@given(seed=seeds, dom=kinds)
def test_inner_product_is_hermitian_and_positive(seed, dom):
    rng = np.random.default_rng(seed)
    g = grid_for(dom)
    f, h = random_density(g, rng), random_density(g, rng)
    assert inner_product(f, h, dom) == pytest.approx(np.conj(inner_product(h, f, dom)), rel=1e-13)
    assert inner_product(f, f, dom).real > 0


def test_inner_product_grid_mismatch(crescent, rng):
    from cuspnp.frequency import GridMismatchError
    a = random_density(build_grid(10.0), rng)
    b = random_density(build_grid(11.0), rng)
    with pytest.raises(GridMismatchError):
        inner_product(a, b, crescent)


@prop
@given(seed=seeds, dom=kinds, re=st.floats(-3, 3), im=st.floats(-3, 3))
def test_resolvent_residual(seed, dom, re, im):
    lam = complex(re, im)
    if im == 0 and abs(re) <= 0.5 or abs(lam) < 1e-3 or (abs(im) < 1e-3 and abs(re) < 0.6):
        return
    g = random_density(grid_for(dom), np.random.default_rng(seed))
    phi = resolvent_apply(lam, g, dom)
    res = phi * lam - apply_np(phi, dom) - g
    assert norm(res, dom) <= 1e-12 * norm(g, dom)


@pytest.mark.parametrize("lam", [0.0, 0.5, -0.5, 0.3])
def test_resolvent_rejects_spectrum(crescent, rng, lam):
    with pytest.raises(SpectrumError):
        resolvent_apply(lam, random_density(grid_for(crescent), rng), crescent)


def test_resolvent_conditioning_warning(crescent, rng):
    g = random_density(grid_for(crescent), rng)
    with pytest.warns(ConditioningWarning):
        lam = symbol_K(g.grid.nodes[100:101], crescent).d1[0]
        resolvent_apply(complex(lam, 1e-12), g, crescent)


def test_mean_zero_check(crescent, rng):
    g = grid_for(crescent)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert check_mean_zero(random_density(g, rng)) < 1e3
    with pytest.warns(MeanZeroWarning):
        check_mean_zero(random_density(g, rng, mean_zero=False))


def test_single_layer_gradient_matches_differences(domain, grid, rng):
    f = random_density(grid, rng)
    xo, xi = domain.line_x("outer"), domain.line_x("inner")
    x = np.array([0.5 * (xo + xi), xo + 0.37 * (xi - xo), 5.0])
    y = np.array([0.3, -1.1, 2.0])
    gx, gy = single_layer_grad(f, x, y, domain)
    e = 1e-5
    fx = (single_layer_eval(f, x + e, y, domain) - single_layer_eval(f, x - e, y, domain)) / (2 * e)
    fy = (single_layer_eval(f, x, y + e, domain) - single_layer_eval(f, x, y - e, domain)) / (2 * e)
    assert np.allclose(gx, fx, atol=1e-7) and np.allclose(gy, fy, atol=1e-7)


@prop
@given(seed=seeds, dom=kinds)
def test_gradient_energy_is_controlled_by_norm(seed, dom):
    f = random_density(grid_for(dom), np.random.default_rng(seed))
    ratio = gradient_energy(f, dom) / norm(f, dom) ** 2
    assert 0 < ratio <= 1


def test_zero_density(crescent):
    g = grid_for(crescent)
    z = PUDensity.zeros(g)
    assert norm(apply_np(z, crescent), crescent) == 0
    assert single_layer_eval(z, 0.7, 0.0, crescent) == 0
