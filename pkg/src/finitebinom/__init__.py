"""Finite-investor binomial market model.

Exact moments of the log return, the infinite-investor and binomial limits,
Monte Carlo and brute-force checks, and a moment-fitting procedure that maps
target moments onto model parameters.
"""

__version__ = "0.1.0"

from .errors import (AnchorTooSmall, BudgetExceeded, ComplexRoots, DepletedGroup,
                     DistinctnessViolated, DomainError, FiniteBinomError, FitError,
                     InsufficientData, InvalidFit, InvalidParams, InvalidState,
                     NonPositivePrice, SingularHankel, TotalTooSmall, ZeroRoot)
from .fitter import (CumulantVector, FitResult, ValidityReport, cumulants_from_moments,
                     fit, hankel_pencil, map_parameters, pencil_roots, solve_weights,
                     validate_fit)
from .io import ingest
from .model import (INACTIVE, GroupSpec, MarketState, ModelParams, path_probability,
                    step, transition_probs)
from .moments import (LimitParams, MomentRequest, finite_difference_term,
                      moment_binomial, moment_limit, moment_multigroup,
                      moment_polynomial, moment_two_group)
from .numerics import (FLOAT, RATIONAL, ExactRational, Stirling2Table, binomial,
                       composition_power_sum, falling_factorial, multinomial, stirling2)
from .oracle import (binomial_direct, compound_poisson_moment, enumerate_moment,
                     enumerate_polynomial)
from .simulator import SampleMoments, SimConfig, estimate_moments, sample_path
