"""Naive reference implementations used to cross-check the library."""

import math
from fractions import Fraction
from itertools import combinations

from alephlab.arith import prime_factors


def member(c: Fraction, label) -> bool:
    """Is ``c`` in ``(1/D) Z`` for ``D`` the product of ``label``?"""
    return all(e == 1 and p in label for p, e in prime_factors(c.denominator).items())


def brute_divisible(e, p, labels, bound=60):
    """Search for e' with p e' = e among coefficients k/d with d | prod(label), |k| <= bound."""
    for v, c in e.support:
        lab = labels[v]
        dens = [1]
        for r in range(1, len(lab) + 1):
            for sub in combinations(lab, r):
                dens.append(math.prod(sub))
        if not any(Fraction(k, d) * p == c for d in dens for k in range(-bound * d, bound * d + 1)):
            return False
    return True


def brute_height(e, p, labels, cap=8):
    k = 0
    while k < cap and all(member(c / p ** (k + 1), labels[v]) for v, c in e.support):
        k += 1
    return k
