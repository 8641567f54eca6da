"""Cusps, special boundary divisors and eta-product identities for the even
lattice U(N) + U(N') with N' | N.

Modules:
    fqm         discriminant form (Z/N)^2 + (Z/N')^2 and its subgroups
    cusps       cusp labels, types, projected groups, cusp classes
    invariants  group algebra, Weil representation, span of types
    divisors    special boundary divisors Z(H) and their characterization
    qeta        eta quotients as exact Puiseux series
    cli         command-line front end
"""
from .errors import GuardExceeded, InvalidInput, InvariantViolation, SpbdivError
from .fqm import DiscriminantForm, FqmSubgroup, subgroup_from_generators
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DiscriminantForm",
    "FqmSubgroup",
    "GuardExceeded",
    "InvalidInput",
    "InvariantViolation",
    "SpbdivError",
    "subgroup_from_generators",
]
