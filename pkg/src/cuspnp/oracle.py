"""Real-space reference implementations by direct singular quadrature.

These integrate the defining log and double-layer-type kernels on the
boundary circles (parametrised by the strip ordinate) and never touch the
frequency calculus.  They are slow by design and are used for validation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .frequency import BoundaryTrace
from .geometry import (Component, DomainKind, DomainSpec, line_scale, mobius,
                       outward_normal)

_ORDER = 16
_CHUNK = 4_000_000


@dataclass(frozen=True)
class LineQuadrature:
    """Composite Gauss-Legendre rule on the real line.

    Uniform panels of width ``H`` cover ``[-L, L]``; the tails use
    ``t = +-L/u`` on geometrically graded panels in ``u``.
    """

    L: float
    H: float
    order: int = _ORDER

    def __post_init__(self):
        x, w = leggauss(self.order)
        n = int(np.ceil(2 * self.L / self.H))
        object.__setattr__(self, "H", 2 * self.L / n)
        e = np.linspace(-self.L, self.L, n + 1)
        a, b = e[:-1, None], e[1:, None]
        t = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
        wt = (0.5 * (b - a) * w).ravel()
        ue = np.array([0.0, 1 / 64, 1 / 32, 1 / 16, 1 / 8, 1 / 4, 1 / 2, 1.0])
        ua, ub = ue[:-1, None], ue[1:, None]
        u = (0.5 * (ub - ua) * x + 0.5 * (ua + ub)).ravel()
        wu = (0.5 * (ub - ua) * w).ravel()
        tt = self.L / u
        wtt = wu * self.L / u**2
        object.__setattr__(self, "n_panels", n)
        object.__setattr__(self, "nodes", np.concatenate([-tt[::-1], t, tt]))
        object.__setattr__(self, "weights", np.concatenate([wtt[::-1], wt, wtt]))
        object.__setattr__(self, "n_tail", tt.size)
        # graded template on [0, 1] accumulating at 0
        edges = np.concatenate([[0.0], 2.0 ** -np.arange(30, -1, -1)])
        ta, tb = edges[:-1, None], edges[1:, None]
        object.__setattr__(self, "tpl", (0.5 * (tb - ta) * x + 0.5 * (ta + tb)).ravel())
        object.__setattr__(self, "tpl_w", (0.5 * (tb - ta) * w).ravel())

    def window(self, y):
        """Panel-aligned window ``[a, b]`` around each ``y`` and a mask of the
        global nodes it replaces; targets too close to ``+-L`` get none."""
        y = np.asarray(y, dtype=float)
        ok = np.abs(y) < self.L - 2.5 * self.H
        i0 = np.floor((y + self.L) / self.H - 1.5).astype(int)
        i1 = np.floor((y + self.L) / self.H + 1.5).astype(int)
        i0 = np.clip(i0, 0, self.n_panels - 1)
        i1 = np.clip(i1, 0, self.n_panels - 1)
        a = -self.L + i0 * self.H
        b = -self.L + (i1 + 1) * self.H
        mid = self.n_tail + np.arange(self.n_panels * self.order)
        pan = (mid - self.n_tail) // self.order
        mask = np.ones((y.size, self.nodes.size), dtype=bool)
        inside = (pan[None, :] >= i0[:, None]) & (pan[None, :] <= i1[:, None]) & ok[:, None]
        mask[:, mid] = ~inside
        return ok, a, b, mask


def _panel_width(domain: DomainSpec) -> float:
    xs = [abs(domain.line_x(c)) for c in Component]
    return 0.5 * min(domain.gap, *xs, 1.0)


def default_quadrature(domain: DomainSpec, L: float = 30.0, H: float | None = None) -> LineQuadrature:
    return LineQuadrature(L=L, H=H or _panel_width(domain))


def _line_integrate(kernel, gfun, x, y, quad: LineQuadrature) -> np.ndarray:
    """``int kernel(x, y, t) g(t) dt`` for each target, windowed near ``t=y``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    T, W = quad.nodes, quad.weights
    gW = gfun(T) * W
    out = np.zeros(x.size, dtype=np.result_type(gW, float))
    step = max(1, _CHUNK // T.size)
    tpl, tplw = quad.tpl, quad.tpl_w
    for s in range(0, x.size, step):
        xs, ys = x[s:s + step], y[s:s + step]
        ok, a, b, mask = quad.window(ys)
        with np.errstate(divide="ignore", invalid="ignore"):
            K = kernel(xs[:, None], ys[:, None], T[None, :])
        # a target sitting on a tail node has no window; drop the coincident node
        K = np.where(mask & np.isfinite(K), K, 0.0)
        out[s:s + step] = np.sum(K * gW[None, :], axis=1)
        if ok.any():
            xo, yo = xs[ok, None], ys[ok, None]
            ll, rr = (yo - a[ok, None]), (b[ok, None] - yo)
            tl, tr = yo - ll * tpl[None, :], yo + rr * tpl[None, :]
            loc = (np.sum(kernel(xo, yo, tl) * gfun(tl) * (ll * tplw[None, :]), axis=1)
                   + np.sum(kernel(xo, yo, tr) * gfun(tr) * (rr * tplw[None, :]), axis=1))
            out[s:s + step][ok] += loc
    return out


def _components(trace: BoundaryTrace):
    for c in (Component.OUTER, Component.INNER):
        yield c, trace.domain.line_x(c), (lambda t, c=c: trace.weighted(c, t))


def total_charge(trace: BoundaryTrace, quad: LineQuadrature | None = None) -> complex:
    quad = quad or default_quadrature(trace.domain)
    return sum(np.sum(g(quad.nodes) * quad.weights) for _, _, g in _components(trace))


def sl_lines(lines, x, y, quad: LineQuadrature) -> np.ndarray:
    """Single layer of densities ``g(t) dt`` carried by vertical lines.

    ``lines`` is a sequence of ``(x_c, g)`` with ``g`` giving ``h * phi``.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x.shape
    x, y = x.ravel(), y.ravel()
    out, Q = 0.0, 0.0
    for xc, g in lines:
        ker = lambda xx, yy, t, xc=xc: (np.log((xx - xc) ** 2 + (yy - t) ** 2)
                                        - np.log(xc * xc + t * t)) / (4 * np.pi)
        out = out + _line_integrate(ker, g, x, y, quad)
        Q = Q + np.sum(g(quad.nodes) * quad.weights)
    out = out - np.log(x * x + y * y) * Q / (4 * np.pi)
    return np.real_if_close(out).reshape(shape)


def sl_real_space(trace: BoundaryTrace, x, y, domain: DomainSpec | None = None,
                  quad: LineQuadrature | None = None) -> np.ndarray:
    """Single layer potential at ``Psi(x, y)`` by log-kernel quadrature,
    including the total-charge term."""
    domain = domain or trace.domain
    quad = quad or default_quadrature(domain)
    return sl_lines([(xc, g) for _, xc, g in _components(trace)], x, y, quad)


def single_disk_potential(a: float, p, quad: LineQuadrature | None = None) -> np.ndarray:
    """Single layer of the constant density ``1/|a|`` on the circle through
    the origin centred at ``(a, 0)``, evaluated at plane points ``p``.

    The exact answer is ``ln|a|`` inside and ``ln|p - c|`` outside.
    """
    xc = 1.0 / (2 * a)
    quad = quad or LineQuadrature(L=30.0, H=min(0.25, abs(xc)))
    g = lambda t: line_scale(xc, t) / abs(a)
    w = mobius(p)
    return sl_lines([(xc, g)], w[..., 0], w[..., 1], quad)


def sl_gradient_real_space(trace: BoundaryTrace, x, y, domain: DomainSpec | None = None,
                           quad: LineQuadrature | None = None):
    """Strip-coordinate gradient of the single layer by quadrature of the
    differentiated log kernel."""
    domain = domain or trace.domain
    quad = quad or default_quadrature(domain)
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x.shape
    x, y = x.ravel(), y.ravel()
    gx = gy = 0.0
    for _, xc, g in _components(trace):
        kx = lambda xx, yy, t, xc=xc: (xx - xc) / ((xx - xc) ** 2 + (yy - t) ** 2) / (2 * np.pi)
        ky = lambda xx, yy, t, xc=xc: (yy - t) / ((xx - xc) ** 2 + (yy - t) ** 2) / (2 * np.pi)
        gx = gx + _line_integrate(kx, g, x, y, quad)
        gy = gy + _line_integrate(ky, g, x, y, quad)
    Q = total_charge(trace, quad)
    rr = x * x + y * y
    gx = gx - x / rr * Q / (2 * np.pi)
    gy = gy - y / rr * Q / (2 * np.pi)
    return np.real_if_close(gx).reshape(shape), np.real_if_close(gy).reshape(shape)


def _np_eval(trace: BoundaryTrace, component, y, quad: LineQuadrature) -> np.ndarray:
    domain = trace.domain
    y = np.atleast_1d(np.asarray(y, dtype=float))
    disk = domain.disk(component)
    xc = disk.line_x
    z = mobius(np.stack([np.full_like(y, xc), y], axis=-1))
    nu = outward_normal(domain, component, z)
    out = np.zeros(y.size, dtype=complex)
    for c, xs, g in _components(trace):
        gW = g(quad.nodes) * quad.weights
        if c is Component(component):
            # on its own circle the kernel is the constant 1/(2a), signed by the normal
            sgn = 1.0 if (domain.kind is DomainKind.TOUCHING or c is Component.OUTER) else -1.0
            out += sgn * np.sum(gW) / (4 * np.pi * disk.radius)
            continue
        u = mobius(np.stack([np.full_like(quad.nodes, xs), quad.nodes], axis=-1))
        step = max(1, _CHUNK // quad.nodes.size)
        for s in range(0, y.size, step):
            d = z[s:s + step, None, :] - u[None, :, :]
            num = np.sum(d * nu[s:s + step, None, :], axis=-1)
            out[s:s + step] += (num / np.sum(d * d, axis=-1)) @ gW / (2 * np.pi)
    return np.real_if_close(out, tol=1e6)


def np_real_space(trace: BoundaryTrace, domain: DomainSpec | None = None,
                  quad: LineQuadrature | None = None) -> BoundaryTrace:
    """NP operator applied by quadrature of ``<z-u, nu_z>/|z-u|^2`` on the
    circles.  The returned trace evaluates lazily at any ordinate."""
    domain = domain or trace.domain
    quad = quad or default_quadrature(domain)
    fo = lambda y: _np_eval(trace, Component.OUTER, y, quad)
    fi = lambda y: _np_eval(trace, Component.INNER, y, quad)
    return BoundaryTrace.from_functions(domain, trace.y_nodes, fo, fi)


def bilinear_real_space(psi: BoundaryTrace, phi: BoundaryTrace, domain: DomainSpec | None = None,
                        quad: LineQuadrature | None = None) -> complex:
    """``-int psi conj(S[phi]) dsigma`` by double quadrature.

    The inner single layer uses a rule twice as long as the outer one so
    that outer tail nodes still get a singularity window.
    """
    domain = domain or psi.domain
    quad = quad or default_quadrature(domain)
    inner = LineQuadrature(L=2 * quad.L, H=quad.H, order=quad.order)
    tot = 0.0
    for c, xc, g in _components(psi):
        T = quad.nodes
        s = sl_real_space(phi, np.full_like(T, xc), T, domain, inner)
        tot = tot - np.sum(g(T) * quad.weights * np.conj(s))
    return complex(tot)


@dataclass(frozen=True)
class TruncatedStrip:
    """``S_w``: the strip picture of the domain cut at ``|y| < w`` (and, for
    touching disks, at distance ``w`` from each line)."""

    domain: DomainSpec
    w: float

    def x_rules(self, n: int):
        x, wx = leggauss(n)
        d = self.domain
        xo, xi = d.line_x(Component.OUTER), d.line_x(Component.INNER)
        if d.kind is DomainKind.CRESCENT:
            return [(0.5 * (xi - xo) * x + 0.5 * (xi + xo), 0.5 * (xi - xo) * wx)]
        rules = []
        for start, sign in ((xo, 1.0), (xi, -1.0)):
            edges = np.concatenate([[0.0], np.geomspace(1e-3, self.w, 30)])
            a, b = edges[:-1, None], edges[1:, None]
            s = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
            rules.append((start + sign * s, (0.5 * (b - a) * wx).ravel()))
        return rules

    def y_rule(self, n: int):
        x, wy = leggauss(n)
        core = min(self.w, 20.0)
        e = np.linspace(-core, core, int(np.ceil(2 * core / 0.5)) + 1)
        if self.w > core:
            far = np.geomspace(core, self.w, 12)[1:]
            e = np.concatenate([-far[::-1], e, far])
        a, b = e[:-1, None], e[1:, None]
        return (0.5 * (b - a) * x + 0.5 * (a + b)).ravel(), (0.5 * (b - a) * wy).ravel()


def gradient_energy_real(trace: BoundaryTrace, domain: DomainSpec | None = None, w: float | None = None,
                         *, nx: int = 16, ny: int = 8, quad: LineQuadrature | None = None) -> float:
    """``int_{Omega_w} |grad S[phi]|^2`` by tensor quadrature in the strip
    picture (the Dirichlet integral is conformally invariant)."""
    domain = domain or trace.domain
    w = w if w is not None else 50.0 / domain.gap
    strip = TruncatedStrip(domain, w)
    yy, wy = strip.y_rule(ny)
    tot = 0.0
    for xx, wx in strip.x_rules(nx):
        X, Y = np.meshgrid(xx, yy, indexing="ij")
        gx, gy = sl_gradient_real_space(trace, X, Y, domain, quad)
        dens = np.abs(gx) ** 2 + np.abs(gy) ** 2
        tot += float(wx @ dens @ wy)
    return tot
