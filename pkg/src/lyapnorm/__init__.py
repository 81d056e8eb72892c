"""Lie-series normal forms for Hamiltonians near an equilibrium with one distinguished mode."""
from .poly import (DimensionError, ExponentPair, GradedSeries, Polynomial, PolydiskGeometry,
                   lie_derivative, lie_series_apply, poisson_bracket, polydisk_norm)
from .resonance import (DivisorClass, EstimateError, Mode, ResonanceError, Spectrum, SubspaceTag,
                        classify_index, gamma_lower_bound, subspace_of)
from .normalform import (NormalFormError, NormalFormResult, NormalizationState, normalize,
                         oracle_normalize, solve_homological)
from .bounds import (BoundLedger, DeltaSequence, build_ledger, catalan, constant_C, fit_certificate,
                     norm_bounds, majorize_input, mu, t_bound, t_exact, verify_cauchy)
from .orbit import (DivergenceError, ManifoldDynamics, OrbitError, extract_gamma, frequency,
                    integrate, orbit_residual, synthesize_orbit)

__version__ = "0.1.0"
