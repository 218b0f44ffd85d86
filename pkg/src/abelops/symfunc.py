"""Monomial and augmented monomial symmetric functions at roots of unity.

The augmented monomial symmetric function of a partition rho (length m,
zeros allowed) expands over power sums with set-partition Mobius
coefficients.  Evaluating power sums on X_k = zeta^(k-1), zeta a primitive
m-th root of unity, gives m when m divides the degree and 0 otherwise, with
the convention p_0 = m.  Dividing by the multiplicity factorials of rho
(multiplicities of every value occurring in rho, zero included) recovers the
ordinary monomial symmetric function.
"""

from __future__ import annotations

from math import factorial

from ._rat import QQ, Q0, is_integral
from .combinat import all_set_partitions, mobius, multiset_permutations, z_weight
from .cyclo import Cyclo

# A power-sum polynomial maps a descending tuple of power-sum subscripts
# (zeros retained, meaning p_0) to a rational coefficient.
PowerSumPoly = dict


def power_sum_at_roots(k: int, m: int) -> int:
    """p_k on (1, zeta, ..., zeta^(m-1)): m if m | k (including k = 0), else 0."""
    if m < 2:
        raise ValueError("m must be at least 2")
    return m if k % m == 0 else 0


def doubilet_expand(rho) -> PowerSumPoly:
    """Expand the augmented monomial symmetric function of rho in power sums.

    Sum over all set partitions pi of the m index positions of
    mobius(pi) * prod over blocks of p_(sum of rho over the block).
    Zero subscripts are kept so the p_0 = m convention can be applied at
    evaluation time.
    """
    rho = tuple(rho)
    m = len(rho)
    out: PowerSumPoly = {}
    for pi in all_set_partitions(range(m)):
        mu = mobius(pi, m)
        key = tuple(sorted((sum(rho[i] for i in block) for block in pi), reverse=True))
        coeff = out.get(key, Q0) + mu
        if coeff:
            out[key] = coeff
        else:
            out.pop(key, None)
    return out


def eval_power_sum_poly(poly: PowerSumPoly, m: int):
    total = Q0
    for key, coeff in poly.items():
        value = QQ(coeff)
        for k in key:
            value *= power_sum_at_roots(k, m)
        total += value
    return total


def multiplicity_factor(rho) -> int:
    """Product of eta_v! where eta_v counts occurrences of v in rho, 0 included."""
    rho = tuple(rho)
    total = 1
    for v in set(rho):
        total *= factorial(rho.count(v))
    return total


def monomial_sym_at_roots(rho, m: int):
    """M_rho on (1, zeta, ..., zeta^(m-1)) as an exact rational integer."""
    rho = tuple(rho)
    if len(rho) != m:
        raise ValueError(f"partition length {len(rho)} != m = {m}")
    value = eval_power_sum_poly(doubilet_expand(rho), m) / multiplicity_factor(rho)
    if not is_integral(value):
        raise ArithmeticError(f"monomial symmetric value {value} is not integral for {rho}")
    return value


def brute_force_monomial(rho, m: int):
    """Direct evaluation sum over permutations psi of prod X_k^(psi_k).

    Each summand is zeta^z(psi); the sum is reduced in Q(zeta_m) and must be
    rational.  Feasible for small m and n, used as an independent oracle.
    """
    rho = tuple(rho)
    if len(rho) != m:
        raise ValueError(f"partition length {len(rho)} != m = {m}")
    acc = Cyclo.zero(m)
    for psi in multiset_permutations(rho):
        acc = acc + Cyclo.zeta_pow(m, z_weight(psi))
    return acc.rational()


def power_sum_poly_degree_homogeneous(poly: PowerSumPoly, n: int) -> bool:
    return all(sum(key) == n for key in poly)
