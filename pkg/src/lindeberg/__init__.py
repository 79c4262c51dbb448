"""Truncated-moment fractions, exact distances to the normal law and bounds on the associated constants."""
from .bounds import (ConstantBound, aex_two_sided, aex_upper_esseen, aex_upper_rozovskii, abe_lower_esseen,
                     abe_lower_rozovskii, asymptotic_lower_bounds, exact_constant_lower_bounds, gamma0)
from .constants import NamedConstants, constants, delta1
from .distributions import (DiscreteDistribution, DistributionError, convolve_iid, parse_distribution,
                            symmetric_three_point, two_point, uniform_distance_to_normal)
from .fractions import (G_0, G_1, G_CONST, G_STAR, FractionError, FractionKind, FractionParams, FractionValue,
                        WeightFunction, esseen_fraction, fraction, rozovskii_fraction,
                        two_point_fraction_closed_form)

__version__ = "0.1.0"

__all__ = [
    "ConstantBound", "aex_two_sided", "aex_upper_esseen", "aex_upper_rozovskii", "abe_lower_esseen",
    "abe_lower_rozovskii", "asymptotic_lower_bounds", "exact_constant_lower_bounds", "gamma0",
    "NamedConstants", "constants", "delta1",
    "DiscreteDistribution", "DistributionError", "convolve_iid", "parse_distribution",
    "symmetric_three_point", "two_point", "uniform_distance_to_normal",
    "G_0", "G_1", "G_CONST", "G_STAR", "FractionError", "FractionKind", "FractionParams", "FractionValue",
    "WeightFunction", "esseen_fraction", "fraction", "rozovskii_fraction", "two_point_fraction_closed_form",
]
