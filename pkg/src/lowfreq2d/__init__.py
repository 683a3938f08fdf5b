"""Low-energy resolvent expansions, threshold classification, scattering phase
and wave decay for compactly supported radial perturbations of the plane
Laplacian, with everything continued on the Riemann surface of log(lambda)."""

__version__ = "0.1.0"

from .errors import (AtPoleError, BasinError, BoundStateRefusal, ConfigError,
                     ContinuationError, DegenerateScattererError, DomainError,
                     IllConditionedFitError, LowfreqError, NumericalError,
                     ShapeMismatchError, ValidationError)
from .expansion import (ExpansionGrid, FitReport, FitTerm, LogLaurentSeries,
                        expansion_grid, fit_log_laurent, general_terms,
                        nonresonant_terms, predict_leading_terms, resonant_terms,
                        sample_matrix_element)
from .quadrature import PanelGrid
from .radial import Exterior, RadialFunction, bump, bump_edges, constant_one, inner, norm_sq, plane_integral
from .resolvent import (FreeCoeffKernel, ResolventSample, apply_resolvent_mode,
                        boundary_pairing, free_kernel, free_scatterer, mode_green,
                        one_sided_identity_residual, pairing_identity_residual,
                        two_parameter_identity_residual)
from .scatterer import (CutoffProfile, DiskObstacle, PiecewisePotential,
                        Scatterer, ScattererConfig, commutator_apply, default_cutoff,
                        parse_config, serialize_config, standard_grid)
from .scattering import (PhaseShiftTable, ResonancePole, breit_wigner_metrics,
                         find_pole, find_pole_in_disk, imaginary_axis_poles,
                         outgoing_defect, perturbation_sweep, phase_shift_sweep,
                         phase_shifts, sigma_asymptotic)
from .specfun import EULER, GAMMA0, GammaConstants, SpectralPoint, bessel_jy, hankel0, hankel1
from .threshold import ThresholdMode, ThresholdReport, classify, eigen_projection, solve_zero_mode
from .wave import DecayReport, WaveQuery, WaveResult, decay_fit, evolve
