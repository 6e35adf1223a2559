"""Exact computations with inverse limits of completely decomposable groups.

Level groups are built from prime-labelled trees; the package checks the
constructions at finite depth and produces certificates (homomorphisms to Z,
direct-summand retractions, type obstructions) that can be re-verified from
their JSON form.
"""
from .arith import Characteristic, FinitePrimes, compare_types, first_primes, nth_prime
from .engine import LimitElement, NicePair, make_GA, make_GP, np1, validate_nice_pair
from .errors import AlephError, TheoremViolation, ValidationError
from .levels import LevelElement, LevelGroup
from .pathologies import build_bezout_tree, pontryagin_make, verify_bezout
from .witnesses import separability_retraction, torsionless_witness

__version__ = "0.1.0"

__all__ = [
    "AlephError",
    "Characteristic",
    "FinitePrimes",
    "LevelElement",
    "LevelGroup",
    "LimitElement",
    "NicePair",
    "TheoremViolation",
    "ValidationError",
    "build_bezout_tree",
    "compare_types",
    "first_primes",
    "make_GA",
    "make_GP",
    "np1",
    "nth_prime",
    "pontryagin_make",
    "separability_retraction",
    "torsionless_witness",
    "validate_nice_pair",
    "verify_bezout",
]
