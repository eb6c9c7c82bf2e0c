"""Fractional spherical means and maximal functions on real hyperbolic space."""

__version__ = "0.1.0"

from .errors import (ConfigurationError, DomainError, HypmaxError, QuadratureError,
                     TailBoundError)
from ._quadrature import QuadratureConfig
from .geometry import (Dimension, HyperbolicPoint, IwasawaCoord, PolarCoord,
                       geodesic_distance, iwasawa_distance, lorentz_boost,
                       minkowski_form, rho)
from .special import ComplexOrder, hypergeometric_2f1, legendre_p, oscillatory_j
from .fourier import (RadialFunction, RadialProfile, SpectralFunction, c_alpha,
                      harish_chandra_c, plancherel_density, radial_fourier,
                      radial_inverse_fourier, spherical_function)
from .maximal import (MeanOperatorSpec, TGrid, dyadic_multiplier_sup, maximal_function,
                      multiplier_m_alpha_t, spherical_mean_direct,
                      spherical_mean_spectral)
from .counterexamples import CounterexampleSpec, Family, maximal_lower_bound, sweep
from .regions import RegionQuery, Status, classify, p_critical

__all__ = [
    "__version__",
    "HypmaxError", "DomainError", "QuadratureError", "TailBoundError", "ConfigurationError",
    "QuadratureConfig",
    "Dimension", "HyperbolicPoint", "IwasawaCoord", "PolarCoord",
    "geodesic_distance", "iwasawa_distance", "lorentz_boost", "minkowski_form", "rho",
    "ComplexOrder", "hypergeometric_2f1", "legendre_p", "oscillatory_j",
    "RadialFunction", "RadialProfile", "SpectralFunction", "c_alpha", "harish_chandra_c",
    "plancherel_density", "radial_fourier", "radial_inverse_fourier", "spherical_function",
    "MeanOperatorSpec", "TGrid", "dyadic_multiplier_sup", "maximal_function",
    "multiplier_m_alpha_t", "spherical_mean_direct", "spherical_mean_spectral",
    "CounterexampleSpec", "Family", "maximal_lower_bound", "sweep",
    "RegionQuery", "Status", "classify", "p_critical",
]
