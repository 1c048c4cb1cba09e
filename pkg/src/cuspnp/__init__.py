"""Spectral calculus of the Neumann-Poincare operator on domains with a
cusp: crescents and touching disks.

Inversion at the tangency point turns both boundary circles into parallel
lines, where the operator becomes a diagonal Fourier multiplier.
"""

__version__ = "0.1.0"

from .estimators import PlasmonResonance, PUTransformer
from .frequency import (BoundaryTrace, FrequencyGrid, PUDensity, build_grid,
                        default_grid, to_pu, u_forward, u_inverse)
from .geometry import Component, DomainKind, DomainSpec
from .np_core import apply_np, inner_product, norm, resolvent_apply, single_layer_eval
from .resonance import DielectricParams, DipoleSource, blowup_limit, resonance_norm
from .spectral import apply_E, measure_density, spectral_integral

__all__ = [
    "BoundaryTrace", "FrequencyGrid", "PUDensity", "build_grid", "default_grid", "to_pu",
    "u_forward", "u_inverse", "Component", "DomainKind", "DomainSpec", "apply_np",
    "inner_product", "norm", "resolvent_apply", "single_layer_eval", "DielectricParams",
    "DipoleSource", "blowup_limit", "resonance_norm", "apply_E", "measure_density",
    "spectral_integral", "PlasmonResonance", "PUTransformer",
]
