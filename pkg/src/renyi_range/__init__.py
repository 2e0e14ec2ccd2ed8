"""Rényi entropies of finite distributions and the exact joint ranges of two or three of them."""

from .entropy import (
    EntropyValue,
    Order,
    ProbVector,
    UniformMixture,
    as_order,
    mixture_entropy,
    realize_mixture,
    renyi_entropy,
    uniform,
)
from .errors import ConsistencyError, DomainError, EntropyRangeError
from .vandermonde import VandermondeInstance, gen_vandermonde_det
from .diagram2 import (
    BoundQuery2,
    BoundResult,
    DiagramCurve,
    boundary_curve,
    lower_bound,
    lower_bound_fixed_n,
    lower_bound_unbounded,
    upper_bound,
)
from .diagram3 import BoundQuery3, DiagramSurface, lower_bound3, surface_mesh, upper_bound3
from .oracle import SampleConfig, check_bounds2, check_bounds3, compare_envelope, empirical_envelope, sample_simplex

__version__ = "0.1.0"
