"""Exact arithmetic in the cyclotomic field Q(zeta_m).

Elements are rational-coefficient polynomials in a primitive m-th root of
unity zeta, reduced modulo the m-th cyclotomic polynomial Phi_m.  This gives
canonical zero testing, so sums of roots of unity simplify exactly (for
example 1 + zeta + zeta^2 = 0 when m = 3).  For m = 2 the field degenerates
to Q with zeta = -1.
"""

from __future__ import annotations

from functools import lru_cache

from ._rat import QQ, Q0, Q1, q_str


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple:
    """Integer coefficients of Phi_m, low degree first, monic."""
    if m < 1:
        raise ValueError("m must be positive")
    # (x^m - 1) divided exactly by the product of Phi_d over proper divisors d.
    poly = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            poly = _exact_div(poly, list(cyclotomic_poly(d)))
    return tuple(poly)


def _exact_div(num: list, den: list) -> list:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        if c % den[-1] != 0:
            raise ArithmeticError("non-exact cyclotomic division")
        q = c // den[-1]
        out[i] = q
        for j, dj in enumerate(den):
            num[i + j] -= q * dj
    if any(num):
        raise ArithmeticError("non-exact cyclotomic division")
    return out


@lru_cache(maxsize=None)
def _phi_degree(m: int) -> int:
    return len(cyclotomic_poly(m)) - 1


def _reduce(coeffs: list, m: int) -> tuple:
    """Reduce a zeta-polynomial mod Phi_m; returns fixed-length tuple."""
    deg = _phi_degree(m)
    phi = cyclotomic_poly(m)
    work = list(coeffs)
    for i in range(len(work) - 1, deg - 1, -1):
        c = work[i]
        if c:
            work[i] = Q0
            for j in range(deg):
                work[i - deg + j] -= c * phi[j]
    work = work[:deg] + [Q0] * (deg - len(work))
    return tuple(work[:deg])


class Cyclo:
    """An element of Q(zeta_m), immutable and hashable."""

    __slots__ = ("m", "c")

    def __init__(self, m: int, coeffs):
        self.m = m
        if isinstance(coeffs, tuple) and len(coeffs) == _phi_degree(m):
            self.c = coeffs
        else:
            self.c = _reduce([QQ(x) for x in coeffs], m)

    @classmethod
    def zero(cls, m: int) -> "Cyclo":
        return cls(m, (Q0,) * _phi_degree(m))

    @classmethod
    def one(cls, m: int) -> "Cyclo":
        return cls.from_rational(m, Q1)

    @classmethod
    def from_rational(cls, m: int, r) -> "Cyclo":
        deg = _phi_degree(m)
        return cls(m, (QQ(r),) + (Q0,) * (deg - 1))

    @classmethod
    def zeta_pow(cls, m: int, k: int) -> "Cyclo":
        k %= m
        return cls(m, [Q0] * k + [Q1])

    def _chk(self, other: "Cyclo"):
        if self.m != other.m:
            raise ValueError(f"mixed cyclotomic orders {self.m} and {other.m}")

    def __add__(self, other: "Cyclo") -> "Cyclo":
        self._chk(other)
        return Cyclo(self.m, tuple(a + b for a, b in zip(self.c, other.c)))

    def __sub__(self, other: "Cyclo") -> "Cyclo":
        self._chk(other)
        return Cyclo(self.m, tuple(a - b for a, b in zip(self.c, other.c)))

    def __neg__(self) -> "Cyclo":
        return Cyclo(self.m, tuple(-a for a in self.c))

    def __mul__(self, other) -> "Cyclo":
        if not isinstance(other, Cyclo):
            r = QQ(other)
            return Cyclo(self.m, tuple(a * r for a in self.c))
        self._chk(other)
        prod = [Q0] * (2 * len(self.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    if b:
                        prod[i + j] += a * b
        return Cyclo(self.m, _reduce(prod, self.m))

    __rmul__ = __mul__

    def scale(self, r) -> "Cyclo":
        r = QQ(r)
        return Cyclo(self.m, tuple(a * r for a in self.c))

    def __bool__(self) -> bool:
        return any(self.c)

    def __eq__(self, other) -> bool:
        return isinstance(other, Cyclo) and self.m == other.m and self.c == other.c

    def __hash__(self):
        return hash((self.m, self.c))

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def rational(self):
        if not self.is_rational():
            raise ArithmeticError(f"not rational: {self}")
        return self.c[0]

    def __repr__(self) -> str:
        return f"Cyclo({self.m}, {self.render()})"

    def render(self) -> str:
        if not self:
            return "0"
        parts = []
        for k, a in enumerate(self.c):
            if not a:
                continue
            if k == 0:
                parts.append(q_str(a))
            else:
                z = "z" if k == 1 else f"z^{k}"
                if a == 1:
                    parts.append(z)
                elif a == -1:
                    parts.append(f"-{z}")
                else:
                    parts.append(f"{q_str(a)}*{z}")
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out
