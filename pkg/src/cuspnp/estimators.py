"""scikit-learn style wrappers around the frequency calculus."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .frequency import BoundaryTrace, PUDensity, build_grid, to_pu, u_inverse
from .np_core import apply_np
from .resonance import (DielectricParams, DipoleSource, blowup_limit, q_density,
                        resonance_norm)
from .utils import check_delta_seq, check_domain


class PUTransformer(TransformerMixin, BaseEstimator):
    """Map sampled boundary traces to channel coordinates and back.

    Each row of ``X`` holds the density on the outer circle followed by the
    density on the inner circle, both sampled at ``y_nodes``.  Transformed
    rows are complex: channel 1 on the grid nodes followed by channel 2.

    Parameters
    ----------
    domain : {"crescent", "touching"}
    R, r : float
        Radii of the outer and inner (or second) disk.
    y_nodes : array-like, optional
        Strip ordinates of the samples; defaults to 1201 points on [-30, 30].
    k_max : float, optional
        Frequency cut-off; defaults to ``200 / q``.
    n_per_decade : int
        Geometric panels per decade near ``k = 0``.
    """

    def __init__(self, domain="crescent", R=1.0, r=0.5, y_nodes=None, k_max=None, n_per_decade=4):
        self.domain = domain
        self.R = R
        self.r = r
        self.y_nodes = y_nodes
        self.k_max = k_max
        self.n_per_decade = n_per_decade

    def fit(self, X=None, y=None):
        self.domain_ = check_domain(self.domain, R=self.R, r=self.r)
        self.y_nodes_ = (np.linspace(-30.0, 30.0, 1201) if self.y_nodes is None
                         else np.asarray(self.y_nodes, dtype=float))
        k_max = self.k_max if self.k_max is not None else 200.0 / self.domain_.gap
        self.grid_ = build_grid(k_max, self.n_per_decade)
        self.n_features_in_ = 2 * self.y_nodes_.size
        if X is not None:
            self._rows(X)
        return self

    def _rows(self, X):
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        return X

    def transform(self, X):
        check_is_fitted(self, "grid_")
        X = self._rows(X)
        n = self.y_nodes_.size
        out = []
        for row in X:
            tr = BoundaryTrace(self.domain_, self.y_nodes_, row[:n], row[n:])
            pu = to_pu(tr, self.grid_)
            out.append(np.concatenate([pu.ch1, pu.ch2]))
        return np.asarray(out)

    def density(self, row) -> PUDensity:
        """Wrap one transformed row as a :class:`PUDensity`."""
        check_is_fitted(self, "grid_")
        m = len(self.grid_)
        return PUDensity(self.grid_, row[:m], row[m:])

    def inverse_transform(self, Z):
        check_is_fitted(self, "grid_")
        Z = np.asarray(Z)
        out = []
        for row in np.atleast_2d(Z):
            tr = u_inverse(self.density(row), self.y_nodes_, self.domain_)
            out.append(np.concatenate([tr.values_outer, tr.values_inner]))
        return np.asarray(out)

    def apply_np(self, Z):
        """NP operator on transformed rows."""
        out = []
        for row in np.atleast_2d(np.asarray(Z)):
            g = apply_np(self.density(row), self.domain_)
            out.append(np.concatenate([g.ch1, g.ch2]))
        return np.asarray(out)


class PlasmonResonance(BaseEstimator):
    """Dipole-driven resonance of a lossy inclusion.

    ``fit`` computes the spectral density of the boundary data; ``predict``
    maps dissipation values to ``||phi^delta||^2``.
    """

    def __init__(self, eps_c=-1 / 3, domain="crescent", R=1.0, r=0.5,
                 location=(5.0, 0.0), moment=(1.0, 0.0)):
        self.eps_c = eps_c
        self.domain = domain
        self.R = R
        self.r = r
        self.location = location
        self.moment = moment

    def fit(self, X=None, y=None):
        self.domain_ = check_domain(self.domain, R=self.R, r=self.r)
        self.source_ = DipoleSource(self.location, self.moment)
        self.source_.check(self.domain_)
        self.lam0_ = (self.eps_c + 1) / (2 * (self.eps_c - 1))
        self.measure_ = q_density(self.source_, self.domain_)
        return self

    def predict(self, X):
        """``||phi^delta||^2`` for each dissipation value in ``X``."""
        check_is_fitted(self, "measure_")
        d = np.ravel(np.asarray(X, dtype=float))
        return np.array([resonance_norm(DielectricParams(self.eps_c, v), self.source_, self.domain_)
                         for v in d])

    def blowup(self, deltas=None):
        """Extrapolated ``lim delta ||phi^delta||^2`` with the closed forms."""
        check_is_fitted(self, "measure_")
        if deltas is None:
            return blowup_limit(self.eps_c, self.source_, self.domain_)
        return blowup_limit(self.eps_c, self.source_, self.domain_, check_delta_seq(deltas))
