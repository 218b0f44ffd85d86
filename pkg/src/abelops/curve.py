"""Plane curve models with a single place at infinity, and their local data.

A model is determined by coprime (n, s), n < s.  The cyclic form is
y^n = x^s + c_{s-1} x^(s-1) + ... + c_0 with weighted parameters
wt(c_j) = -n(s-j); the general form allows full q_j(x) y^(n-j) terms with
deg q_j <= floor(j s / n).  Variables carry wt(x) = -n, wt(y) = -s and the
defining polynomial is weight-homogeneous of weight -ns.

The local parameter at infinity is xi with x = xi^(-n) exactly, wt(xi) = +1.
y(xi) is solved as an exact binomial series, and the integrals of the
holomorphic differentials x^a y^b dx / f_y from infinity give the u-series;
their leading exponents are the gap numbers of the semigroup <n, s>, which
are also the variable weights.  Leading terms are -(xi^gap)/gap with no
further normalization (monic differential monomials, base point infinity).
"""

from __future__ import annotations

from typing import NamedTuple

from ._rat import QQ, Q0, Q1
from .combinat import GapData, gap_sequence
from .series import LambdaPoly, MultiSeries, ParamRing


class CurveModel:
    def __init__(self, n: int, s: int, cyclic: bool = True):
        self.gapdata: GapData = gap_sequence(n, s)
        self.n = n
        self.s = s
        self.cyclic = cyclic
        if cyclic:
            names = tuple(f"l{j}" for j in range(s))
            weights = tuple(-n * (s - j) for j in range(s))
        else:
            names = []
            weights = []
            for j in range(1, n + 1):
                bound = (j * s) // n
                for k in range(bound + 1):
                    w = n * k - s * j
                    if w == 0:
                        continue  # the monic leading coefficient is fixed to 1
                    names.append(f"q{j}_{k}")
                    weights.append(w)
            names = tuple(names)
            weights = tuple(weights)
        self.ring = ParamRing(names, weights)

    # -- structure -------------------------------------------------------

    @property
    def genus(self) -> int:
        return self.gapdata.genus

    @property
    def u_weights(self) -> tuple:
        return self.gapdata.u_weights

    def sigma_weight(self) -> int:
        num = (self.n ** 2 - 1) * (self.s ** 2 - 1)
        if num % 24 != 0:
            raise ArithmeticError("series weight is not integral")
        return num // 24

    def sigma_parity(self) -> int:
        return -1 if self.sigma_weight() % 2 else 1

    def differential_monomials(self) -> list[tuple[int, int]]:
        """(a, b) per u-variable: the numerator monomial x^a y^b of du_i.

        The exponent of the integrated series is ns - n - s - na - sb and
        must reproduce each gap exactly once with 0 <= b <= n - 2.
        """
        target_base = self.n * self.s - self.n - self.s
        out = []
        for w in self.u_weights:
            need = target_base - w
            hits = []
            for b in range(0, max(self.n - 1, 1)):
                rem = need - self.s * b
                if rem >= 0 and rem % self.n == 0:
                    hits.append((rem // self.n, b))
            if len(hits) != 1:
                raise ArithmeticError(f"no unique differential monomial for weight {w}")
            out.append(hits[0])
        return out

    def lambda_index(self, j: int) -> int:
        if not self.cyclic:
            raise ValueError("lambda parameters exist on the cyclic model only")
        if not (0 <= j < self.s):
            raise ValueError(f"lambda index {j} out of range 0..{self.s - 1}")
        return j

    # -- descriptors -------------------------------------------------------

    def descriptor(self) -> dict:
        return {"n": self.n, "s": self.s, "cyclic": self.cyclic}

    @classmethod
    def from_descriptor(cls, d: dict) -> "CurveModel":
        return cls(int(d["n"]), int(d["s"]), bool(d.get("cyclic", True)))

    def __repr__(self):
        kind = "cyclic" if self.cyclic else "general"
        return f"CurveModel({self.n},{self.s},{kind})"

    # -- local series ------------------------------------------------------

    def _need_cyclic(self):
        if not self.cyclic:
            raise ValueError("local expansions are implemented for cyclic models only")

    def x_series(self, cap: int) -> MultiSeries:
        return MultiSeries.monomial(self.ring, (1,), (-self.n,), Q1, cap)

    def y_unit(self, cap: int) -> MultiSeries:
        """Y with y = xi^(-s) Y, via the exact binomial expansion of
        (1 + sum_j c_j xi^(n(s-j)))^(1/n)."""
        self._need_cyclic()
        if cap <= 0:
            raise ValueError("cap must be positive")
        T = MultiSeries.zero(self.ring, (1,), cap, self.n)
        for j in range(self.s):
            k = self.n * (self.s - j)
            if k <= cap:
                T._add_term((k,), LambdaPoly.param(self.ring, j))
        one = MultiSeries.monomial(self.ring, (1,), (0,), Q1, cap)
        acc = one
        power = one
        alpha = QQ(1, self.n)
        coeff = Q1
        j = 1
        while j * self.n <= cap:
            power = power * T
            coeff = coeff * (alpha - (j - 1)) / j
            acc = acc + power.scale(coeff)
            j += 1
        return acc

    def y_series(self, cap: int) -> MultiSeries:
        """y(xi) with leading term xi^(-s); complete through exponent cap."""
        return self.y_unit(cap + self.s).shift_exponent(-self.s)

    def curve_residual(self, cap: int) -> MultiSeries:
        """f(x(xi), y(xi)) truncated at exponent cap; must vanish."""
        self._need_cyclic()
        y = self.y_series(cap + self.n * self.s)
        acc = y.pow(self.n)
        for j in range(self.s):
            t = MultiSeries.monomial(self.ring, (1,), (-self.n * j,),
                                     LambdaPoly.param(self.ring, j, -1), 10 ** 9)
            acc = acc + t
        xs = MultiSeries.monomial(self.ring, (1,), (-self.n * self.s,), QQ(-1), 10 ** 9)
        return (acc + xs).truncate(cap)

    def abel_series(self, cap: int) -> list[MultiSeries]:
        """u_i(xi) integrated from infinity, one series per variable,
        complete through exponent cap, leading term -(xi^w_i)/w_i."""
        self._need_cyclic()
        ucap = cap
        Y = self.y_unit(ucap + self.n)
        Yinv = Y.invert()
        out = []
        for (a, b), w in zip(self.differential_monomials(), self.u_weights):
            unit = Yinv.pow(self.n - 1 - b) if self.n - 1 - b else Yinv.pow(0)
            du = unit.shift_exponent(w - 1).scale(QQ(-1))
            u = du.truncate(ucap - 1).integrate()
            u.assert_homogeneous(w)
            if u.coeff((w,)) != LambdaPoly.const(QQ(-1, w)):
                raise ArithmeticError("leading series coefficient is off convention")
            out.append(u.truncate(ucap))
        return out
