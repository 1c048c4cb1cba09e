import numpy as np
import pytest
from scipy.integrate import quad

from cuspnp.frequency import SQRT2PI, apply_P_inverse, build_grid, u_forward
from cuspnp.geometry import Component, DomainSpec, boundary_param, outward_normal
from cuspnp.np_core import apply_np, gradient_energy, norm
from cuspnp.resonance import (DielectricParams, DipoleSource, SingularityError, SourceLocationError,
                              blowup_limit, boundary_data, boundary_trace, bounded_case_check,
                              newtonian_potential, predicted_limit, q_density, resonance_grid,
                              resonance_norm, richardson, solve_transmission, sweep_norms,
                              total_field)

from conftest import CRESCENT, TOUCHING

SRC = {"crescent": DipoleSource((5.0, 0.0), (1.0, 0.0)),
       "touching": DipoleSource((0.3, 3.0), (1.0, -0.4))}


@pytest.fixture
def src(domain):
    return SRC[domain.kind.value]


def test_newtonian_potential_examples():
    s = DipoleSource((5, 0), (1, 0))
    assert newtonian_potential(s, [6.0, 0.0]) == pytest.approx(1 / (2 * np.pi))
    d = np.array([0.3, 0.0])
    assert newtonian_potential(s, s.location + d) == pytest.approx(-newtonian_potential(s, s.location - d))
    with pytest.raises(SingularityError):
        newtonian_potential(s, [5.0, 0.0])


def test_dipole_is_limit_of_charge_pair():
    s = DipoleSource((5, 1), (0.6, -0.8))
    z, a = np.array(s.location), np.array(s.moment)
    p = np.array([[6.5, 2.0], [3.0, -1.0], [5.2, 1.4]])
    G = lambda x: np.log(np.linalg.norm(x, axis=-1)) / (2 * np.pi)
    eps = 1e-4
    pair = (G(p - z + eps * a / 2) - G(p - z - eps * a / 2)) / eps
    assert np.allclose(pair, newtonian_potential(s, p), atol=1e-4)


def test_boundary_trace_is_normal_derivative(domain, src):
    tr = boundary_trace(src, domain)
    y = np.array([-3.0, -0.4, 0.2, 1.5, 7.0])
    for c in Component:
        p = boundary_param(domain, c, y)
        nu = outward_normal(domain, c, p)
        e = 1e-6
        fd = (newtonian_potential(src, p + e * nu) - newtonian_potential(src, p - e * nu)) / (2 * e)
        assert np.allclose(fd, tr(c, y), atol=1e-8)


def test_analytic_transform_against_fourier_quadrature(domain, src):
    tr = boundary_trace(src, domain)
    grid = build_grid(50.0)
    hats = apply_P_inverse(boundary_data(src, domain, grid))
    for c, hat in zip(Component, hats):
        g = lambda y: tr.weighted(c, np.array([y]))[0]
        for k in (0.37, -1.3, 4.2):
            re = quad(lambda y: g(y) + g(-y), 0, np.inf, weight="cos", wvar=abs(k))[0]
            im = -np.sign(k) * quad(lambda y: g(y) - g(-y), 0, np.inf, weight="sin", wvar=abs(k))[0]
            assert grid.interpolate(hat, np.array([k]))[0] == pytest.approx((re + 1j * im) / SQRT2PI, abs=1e-9)


def test_analytic_transform_against_samples(domain, src):
    grid = build_grid(20.0)
    y = np.linspace(-2000, 2000, 400001)
    tr = boundary_trace(src, domain, y)
    band = np.abs(grid.nodes) > 0.05
    for a, b in zip(apply_P_inverse(boundary_data(src, domain, grid)), u_forward(tr, grid)):
        assert np.max(np.abs(a - b)[band]) < 1e-5


def test_boundary_data_smooth_and_mean_zero(domain, src):
    grid = resonance_grid(None, domain)
    g = boundary_data(src, domain, grid)
    n = grid.n_half
    assert abs(g.ch2[n]) / grid.k_min < 1.0 and abs(g.ch1[n]) / grid.k_min < 1.0
    k = grid.nodes[n:]
    i1, i2 = np.searchsorted(k, [grid.k_max / 4, grid.k_max / 2])
    for ch in (g.ch1, g.ch2):
        a = np.abs(ch[n:])
        slope = -np.log(a[i2] / a[i1]) / np.log(k[i2] / k[i1])
        assert slope > 4
    flipped = boundary_data(DipoleSource(src.location, -np.array(src.moment)), domain, grid)
    assert np.array_equal(flipped.ch1, -g.ch1) and np.array_equal(flipped.ch2, -g.ch2)


def test_source_inside_is_rejected(crescent, touching):
    with pytest.raises(SourceLocationError):
        boundary_data(DipoleSource((1.5, 0), (1, 0)), crescent, build_grid(5.0))
    with pytest.raises(SourceLocationError):
        boundary_trace(DipoleSource((-0.5, 0), (1, 0)), touching)
    # inside the hole of the crescent is outside the domain
    boundary_trace(DipoleSource((0.5, 0.0), (1, 0)), crescent)


def test_dielectric_params():
    p = DielectricParams(-1 / 3, 0.1)
    assert p.lam0 == pytest.approx(-0.25)
    assert DielectricParams(-3, 1).lam0 == pytest.approx(0.25)
    assert p.B == pytest.approx(0.075)
    for t in (-0.3, 0.1, 0.4):
        assert abs(p.lam - t) ** -2 == pytest.approx(1 / ((t - p.poisson_center()) ** 2 + p.poisson_width() ** 2))
    with pytest.raises(ValueError):
        DielectricParams(1.0, 0.1)
    with pytest.raises(ValueError):
        DielectricParams(-2.0, 0.0)


def test_transmission_solution(domain, src):
    p = DielectricParams(-1 / 3, 1e-2)
    grid = resonance_grid(p, domain)
    g = boundary_data(src, domain, grid)
    phi = solve_transmission(p, src, domain, grid)
    assert norm(phi * p.lam - apply_np(phi, domain) - g, domain) <= 1e-12 * norm(g, domain)
    assert norm(phi, domain) ** 2 == pytest.approx(resonance_norm(p, src, domain, grid), rel=1e-6)
    # lambda -> 1/2 as delta -> inf: the density settles to a finite limit
    big = [norm(solve_transmission(DielectricParams(-1 / 3, d), src, domain), domain) for d in (1e3, 1e4)]
    assert big[1] == pytest.approx(big[0], rel=1e-2)
    # it vanishes as the contrast disappears (lambda -> inf)
    weak = solve_transmission(DielectricParams(1 + 1e-6, 1e-9), src, domain)
    assert norm(weak, domain) < 1e-5 * norm(g, domain)


def test_q_density(domain, src):
    m = q_density(src, domain)
    assert np.all(m.density.real >= 0)
    g = boundary_data(src, domain, resonance_grid(None, domain))
    assert m.mass().real == pytest.approx(norm(g, domain) ** 2, rel=1e-6)
    ends = q_density(src, domain, [-0.5, 0.5])
    assert np.all(np.abs(ends) < 1e-20)


def test_route_equivalence_grid(domain, src):
    for eps_c in (-1 / 3, -3.0, -1.0, 2.0, -0.2):
        for delta in (1e-1, 1e-2, 1e-3, 1e-4):
            p = DielectricParams(eps_c, delta)
            grid = resonance_grid(p, domain)
            direct = norm(solve_transmission(p, src, domain, grid), domain) ** 2
            assert resonance_norm(p, src, domain, grid) == pytest.approx(direct, rel=1e-6)


def test_resonant_norms_increase(domain, src):
    d = np.geomspace(1e-1, 1e-4, 7)
    for eps_c in (-1 / 3, -3.0):
        assert np.all(np.diff(sweep_norms(eps_c, src, domain, d)) > 0)
    n = sweep_norms(2.0, src, domain, d)
    assert n.max() < 1.02 * n.min()


def test_gradient_control(domain, src):
    for eps_c, delta in [(-1 / 3, 1e-2), (-3.0, 1e-3), (2.0, 1e-1)]:
        phi = solve_transmission(DielectricParams(eps_c, delta), src, domain)
        assert 0 < gradient_energy(phi, domain) / norm(phi, domain) ** 2 <= 1


def test_richardson_recovers_polynomial_limit():
    d = np.geomspace(1e-1, 1e-4, 7)
    assert richardson(d, 3 + 2 * d - 5 * d**2) == pytest.approx(3, rel=1e-12)


def test_blowup_poisson_form(crescent):
    res = blowup_limit(-1 / 3, SRC["crescent"], crescent)
    est, pred = res
    assert est == res.estimate and pred == res.predicted
    assert res.relative_gap_poisson < 2e-2
    assert res.predicted_poisson == pytest.approx(np.pi * res.predicted)


def test_blowup_positive_lambda(touching):
    res = blowup_limit(-3.0, SRC["touching"], touching)
    assert res.relative_gap_poisson < 2e-2


def test_lambda_zero_is_redirected(crescent):
    with pytest.raises(ValueError, match="bounded_case_check"):
        blowup_limit(-1.0, SRC["crescent"], crescent)
    with pytest.raises(ValueError):
        predicted_limit(2.0, SRC["crescent"], crescent)


def test_left_endpoint_branch(crescent):
    # eps_c = 0 gives lambda_0 = -1/2; the dipole has Q(-1/2^+) = 0
    assert predicted_limit(0.0, SRC["crescent"], crescent) == 0


def test_bounded_case(domain, src):
    res = bounded_case_check(src, domain)
    assert res.within_bound
    assert res.max_scaled == res.scaled[0]


def test_total_field(crescent):
    s = SRC["crescent"]
    p = DielectricParams(-1 / 3, 1e-2)
    far = np.array([[50.0, 0.0], [500.0, 0.0], [5000.0, 0.0]])
    u, on = total_field(p, s, crescent, far)
    assert not on.any()
    assert abs(u[1]) < abs(u[0]) and abs(u[2] * 5000) == pytest.approx(abs(u[1] * 500), rel=0.05)
    q = boundary_param(crescent, Component.OUTER, np.array([0.7]))[0]
    nu = outward_normal(crescent, Component.OUTER, q)
    pair = np.array([q + 5e-5 * nu, q - 5e-5 * nu, q])
    u, on = total_field(p, s, crescent, pair)
    assert abs(u[0] - u[1]) < 1e-3 and on.tolist() == [False, False, True]
    pts = np.array([[6.0, 0.5], [2.5, 1.0]])
    u, _ = total_field(DielectricParams(1 + 1e-7, 1e-9), s, crescent, pts)
    assert np.allclose(u, newtonian_potential(s, pts), atol=1e-6)
