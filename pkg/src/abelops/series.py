"""Weight-graded exact series arithmetic.

Two layers:

* LambdaPoly: sparse polynomials in a finite set of weighted parameters
  (curve coefficients) with rational coefficients.  A monomial is a sorted
  tuple of (parameter index, exponent) pairs and carries the weight
  sum(exponent * parameter weight), always <= 0.

* MultiSeries: sparse Laurent series in a finite set of weighted variables
  with LambdaPoly coefficients.  Each series records `cap`, the largest
  total variable weight through which its terms are complete, and `low`, a
  lower bound on the variable weight of any term it could contain.  Products
  propagate these exactly, so truncation is tracked rather than guessed.

Weight bookkeeping is the backbone of every construction in this package:
series of homogeneous objects carry a declared total weight and the
homogeneity check (variable weight plus coefficient weight equal to the
declared weight, term by term) is a hard assertion, not a tolerance.
"""

from __future__ import annotations

from functools import lru_cache

from ._rat import QQ, Q0, Q1, q_str

# Internally a parameter monomial (LMono) is either () for the constant or a
# dense exponent tuple over all ring parameters, so products are plain
# component sums.  The sparse pair form ((index, exponent), ...) is used at
# external boundaries (stored files, reported coefficients, tests).
LMono = tuple


class ParamRing:
    """A fixed list of named parameters with negative integer weights."""

    def __init__(self, names, weights):
        self.names = tuple(names)
        self.weights = tuple(int(w) for w in weights)
        if len(self.names) != len(self.weights):
            raise ValueError("names and weights differ in length")
        if any(w >= 0 for w in self.weights):
            raise ValueError("parameter weights must be negative")
        self._mono_cache: dict[int, tuple] = {}

    def __eq__(self, other):
        return (
            isinstance(other, ParamRing)
            and self.names == other.names
            and self.weights == other.weights
        )

    def __hash__(self):
        return hash((self.names, self.weights))

    def mono_weight(self, mono: LMono) -> int:
        """Weight of a monomial in either dense or sparse pair form."""
        if not mono:
            return 0
        if isinstance(mono[0], tuple):
            return sum(self.weights[j] * e for j, e in mono)
        return sum(w * e for w, e in zip(self.weights, mono))

    def sparse(self, mono: LMono) -> tuple:
        """Dense or empty monomial to sorted ((index, exponent), ...)."""
        if not mono:
            return ()
        if isinstance(mono[0], tuple):
            return mono
        return tuple((j, e) for j, e in enumerate(mono) if e)

    def dense(self, sparse: tuple) -> LMono:
        if not sparse:
            return ()
        out = [0] * len(self.names)
        for j, e in sparse:
            out[j] = e
        return tuple(out)

    def monomials_of_weight(self, w: int) -> tuple:
        """All dense monomials of exact (negative or zero) weight w, sorted."""
        if w > 0:
            return ()
        if w == 0:
            return ((),)
        if w in self._mono_cache:
            return self._mono_cache[w]
        n = len(self.weights)
        out = []

        def rec(j: int, remaining: int, acc: list):
            if remaining == 0:
                out.append(tuple(acc) + (0,) * (n - len(acc)))
                return
            if j == n:
                return
            step = -self.weights[j]
            for e in range(remaining // step, -1, -1):
                acc.append(e)
                rec(j + 1, remaining - e * step, acc)
                acc.pop()

        rec(0, -w, [])
        result = tuple(sorted(out))
        self._mono_cache[w] = result
        return result

    def render_mono(self, mono: LMono) -> str:
        pairs = self.sparse(mono) if mono else ()
        if not pairs:
            return "1"
        return "*".join(
            f"{self.names[j]}" + (f"^{e}" if e > 1 else "") for j, e in pairs
        )


from operator import add as _add


def lmono_mul(a: LMono, b: LMono) -> LMono:
    if not a:
        return b
    if not b:
        return a
    return tuple(map(_add, a, b))


class LambdaPoly:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict = terms if terms is not None else {}

    @classmethod
    def const(cls, c) -> "LambdaPoly":
        c = QQ(c)
        return cls({(): c} if c else {})

    @classmethod
    def param(cls, ring: ParamRing, j: int, coeff=1) -> "LambdaPoly":
        mono = tuple(1 if i == j else 0 for i in range(len(ring.names)))
        return cls({mono: QQ(coeff)})

    @classmethod
    def mono(cls, mono: LMono, coeff=1) -> "LambdaPoly":
        """Monomial constructor; `mono` must be dense or empty."""
        if mono and isinstance(mono[0], tuple):
            raise TypeError("dense monomial expected; convert with ring.dense()")
        c = QQ(coeff)
        return cls({tuple(mono): c} if c else {})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, LambdaPoly) and self.terms == other.terms

    def __hash__(self):
        raise TypeError("LambdaPoly is unhashable")

    def __add__(self, other: "LambdaPoly") -> "LambdaPoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            cur = out.get(k, Q0) + c
            if cur:
                out[k] = cur
            else:
                out.pop(k, None)
        return LambdaPoly(out)

    def __sub__(self, other: "LambdaPoly") -> "LambdaPoly":
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "LambdaPoly":
        c = QQ(c)
        if not c:
            return LambdaPoly()
        return LambdaPoly({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other: "LambdaPoly") -> "LambdaPoly":
        out: dict = {}
        get = out.get
        oitems = list(other.terms.items())
        for k1, c1 in self.terms.items():
            if k1:
                for k2, c2 in oitems:
                    k = tuple(map(_add, k1, k2)) if k2 else k1
                    cur = get(k, Q0) + c1 * c2
                    if cur:
                        out[k] = cur
                    else:
                        del out[k]
            else:
                for k2, c2 in oitems:
                    cur = get(k2, Q0) + c1 * c2
                    if cur:
                        out[k2] = cur
                    else:
                        del out[k2]
        return LambdaPoly(out)

    def constant_part(self):
        return self.terms.get((), Q0)

    def homogeneous_weight(self, ring: ParamRing):
        """The common weight of all monomials; raises if mixed."""
        weights = {ring.mono_weight(k) for k in self.terms}
        if not weights:
            return None
        if len(weights) > 1:
            raise ArithmeticError(f"inhomogeneous parameter polynomial: weights {weights}")
        return weights.pop()

    def specialize(self, values: dict):
        total = Q0
        for k, c in self.terms.items():
            v = c
            for j, e in enumerate(k):
                if e:
                    v = v * values[j] ** e
            total += v
        return total

    def map_params(self, images: dict) -> "LambdaPoly":
        """Substitute parameter j -> images[j] (a LambdaPoly in another ring)."""
        out = LambdaPoly()
        for k, c in self.terms.items():
            acc = LambdaPoly.const(c)
            for j, e in enumerate(k):
                img = images.get(j) if e else None
                for _ in range(e):
                    if img is None:
                        raise KeyError(f"no image for parameter {j}")
                    acc = acc * img
            out = out + acc
        return out

    def render(self, ring: ParamRing) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms):
            c = self.terms[k]
            body = ring.render_mono(k)
            if body == "1":
                parts.append(f"+{q_str(c)}" if c > 0 else f"-{q_str(-c)}")
            elif c == 1:
                parts.append(f"+{body}")
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append((f"+{q_str(c)}" if c > 0 else f"-{q_str(-c)}") + "*" + body)
        out = parts[0][1:] if parts[0].startswith("+") else parts[0]
        for p in parts[1:]:
            out += " " + p[0] + " " + p[1:]
        return out


LP_ONE = LambdaPoly.const(1)


class MultiSeries:
    """Sparse weighted Laurent series with LambdaPoly coefficients."""

    __slots__ = ("ring", "var_weights", "terms", "cap", "low")

    def __init__(self, ring: ParamRing, var_weights, terms=None, cap=None, low=None):
        self.ring = ring
        self.var_weights = tuple(var_weights)
        self.terms: dict = terms if terms is not None else {}
        if cap is None:
            raise ValueError("cap is required")
        self.cap = cap
        self.low = low if low is not None else min(
            (self.wdeg(e) for e in self.terms), default=0
        )

    # -- basics ---------------------------------------------------------

    def wdeg(self, exps: tuple) -> int:
        return sum(w * e for w, e in zip(self.var_weights, exps))

    @classmethod
    def zero(cls, ring, var_weights, cap, low=0):
        return cls(ring, var_weights, {}, cap, low)

    @classmethod
    def monomial(cls, ring, var_weights, exps, coeff, cap):
        exps = tuple(exps)
        if not isinstance(coeff, LambdaPoly):
            coeff = LambdaPoly.const(coeff)
        s = cls(ring, var_weights, {}, cap, None)
        s.low = s.wdeg(exps)
        if coeff and s.low <= cap:
            s.terms[exps] = coeff
        return s

    def _compat(self, other: "MultiSeries"):
        if self.var_weights != other.var_weights:
            raise ValueError("series over different variable sets")

    def _add_term(self, exps, coeff: LambdaPoly):
        if not coeff:
            return
        cur = self.terms.get(exps)
        new = coeff if cur is None else cur + coeff
        if new:
            self.terms[exps] = new
        else:
            self.terms.pop(exps, None)

    def __add__(self, other: "MultiSeries") -> "MultiSeries":
        self._compat(other)
        out = MultiSeries(self.ring, self.var_weights, dict(self.terms),
                          min(self.cap, other.cap), min(self.low, other.low))
        for e, c in other.terms.items():
            out._add_term(e, c)
        out._trim()
        return out

    def __sub__(self, other: "MultiSeries") -> "MultiSeries":
        return self + other.scale(-1)

    def scale(self, c) -> "MultiSeries":
        if isinstance(c, LambdaPoly):
            if not c:
                return MultiSeries.zero(self.ring, self.var_weights, self.cap, self.low)
            return MultiSeries(self.ring, self.var_weights,
                               {e: v * c for e, v in self.terms.items()}, self.cap, self.low)
        c = QQ(c)
        if not c:
            return MultiSeries.zero(self.ring, self.var_weights, self.cap, self.low)
        return MultiSeries(self.ring, self.var_weights,
                           {e: v.scale(c) for e, v in self.terms.items()}, self.cap, self.low)

    def __mul__(self, other: "MultiSeries") -> "MultiSeries":
        self._compat(other)
        cap = min(self.cap + other.low, other.cap + self.low)
        out = MultiSeries.zero(self.ring, self.var_weights, cap, self.low + other.low)
        if not self.terms or not other.terms:
            return out
        bweights = sorted(((other.wdeg(e), e, c) for e, c in other.terms.items()))
        terms = out.terms
        get = terms.get
        for e1, c1 in self.terms.items():
            budget = cap - self.wdeg(e1)
            for w2, e2, c2 in bweights:
                if w2 > budget:
                    break
                key = tuple(map(_add, e1, e2))
                cur = get(key)
                new = c1 * c2 if cur is None else cur + c1 * c2
                if new:
                    terms[key] = new
                else:
                    del terms[key]
        return out

    def pow(self, k: int) -> "MultiSeries":
        if k < 0:
            raise ValueError("negative power; invert first")
        if k == 0:
            return MultiSeries.monomial(self.ring, self.var_weights,
                                        (0,) * len(self.var_weights), Q1, 10 ** 9)
        result = self
        for _ in range(k - 1):
            result = result * self
        return result

    def truncate(self, cap: int) -> "MultiSeries":
        if cap >= self.cap:
            return self
        kept = {e: c for e, c in self.terms.items() if self.wdeg(e) <= cap}
        return MultiSeries(self.ring, self.var_weights, kept, cap, self.low)

    def _trim(self):
        drop = [e for e in self.terms if self.wdeg(e) > self.cap]
        for e in drop:
            del self.terms[e]

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, MultiSeries)
            and self.var_weights == other.var_weights
            and self.terms == other.terms
        )

    def coeff(self, exps: tuple) -> LambdaPoly:
        return self.terms.get(tuple(exps), LambdaPoly())

    def lam_zero_part(self) -> "MultiSeries":
        """Terms whose coefficient has no parameter dependence."""
        kept = {}
        for e, c in self.terms.items():
            const = c.constant_part()
            if const:
                kept[e] = LambdaPoly.const(const)
        return MultiSeries(self.ring, self.var_weights, kept, self.cap, self.low)

    def assert_homogeneous(self, weight: int):
        for e, c in self.terms.items():
            w = c.homogeneous_weight(self.ring)
            if w is None:
                continue
            if self.wdeg(e) + w != weight:
                raise ArithmeticError(
                    f"inhomogeneous term: var weight {self.wdeg(e)}, "
                    f"coeff weight {w}, expected total {weight}"
                )

    # -- univariate helpers ----------------------------------------------

    def _only_var(self) -> int:
        if len(self.var_weights) != 1:
            raise ValueError("univariate operation on multivariate series")
        return 0

    def integrate(self) -> "MultiSeries":
        """Antiderivative with zero constant; rejects exponent -1 terms."""
        self._only_var()
        out = MultiSeries.zero(self.ring, self.var_weights,
                               self.cap + self.var_weights[0], self.low + self.var_weights[0])
        for (k,), c in self.terms.items():
            if k == -1:
                raise ArithmeticError("logarithmic term in integration")
            out._add_term((k + 1,), c.scale(QQ(1, k + 1)))
        return out

    def invert(self) -> "MultiSeries":
        """Reciprocal of a series with an invertible leading term.

        The leading term must be a pure rational times the minimal-exponent
        monomial.  Precision: trusted through cap - 2*low of the input, the
        exact bound for a unit-led reciprocal.
        """
        v = self._only_var()
        if not self.terms:
            raise ZeroDivisionError("inverting the zero series")
        kmin = min(k for (k,) in self.terms)
        lead = self.terms[(kmin,)]
        c0 = lead.constant_part()
        if not c0 or len(lead.terms) != 1:
            raise ArithmeticError("leading coefficient is not a nonzero rational")
        w = self.var_weights[v]
        # S = c0 x^kmin (1 + R); 1/S = x^(-kmin)/c0 * sum (-R)^j
        rel_cap = self.cap - kmin * w
        one = MultiSeries.monomial(self.ring, self.var_weights, (0,), Q1, rel_cap)
        R = MultiSeries.zero(self.ring, self.var_weights, rel_cap, 0)
        for (k,), c in self.terms.items():
            if k == kmin:
                continue
            R._add_term((k - kmin,), c.scale(1 / c0))
        R.low = min((self.wdeg(e) for e in R.terms), default=rel_cap) if R.terms else rel_cap
        acc = one
        power = one
        if R.terms:
            step = min(self.wdeg(e) for e in R.terms)
            if step <= 0:
                raise ArithmeticError("reciprocal tail does not have positive order")
            j = 1
            while j * step <= rel_cap:
                power = power * R
                acc = acc + (power if j % 2 == 0 else power.scale(-1))
                j += 1
        out = MultiSeries.zero(self.ring, self.var_weights, rel_cap - kmin * w, -kmin * w)
        for (k,), c in acc.terms.items():
            out._add_term((k - kmin,), c.scale(1 / c0))
        return out

    def shift_exponent(self, delta: int) -> "MultiSeries":
        self._only_var()
        w = self.var_weights[0]
        out = MultiSeries.zero(self.ring, self.var_weights,
                               self.cap + delta * w, self.low + delta * w)
        for (k,), c in self.terms.items():
            out._add_term((k + delta,), c)
        return out

    def derive(self, v: int) -> "MultiSeries":
        """Partial derivative in variable v, weight drops by var_weights[v]."""
        out = MultiSeries.zero(self.ring, self.var_weights,
                               self.cap - self.var_weights[v],
                               self.low - self.var_weights[v])
        for e, c in self.terms.items():
            if e[v]:
                key = e[:v] + (e[v] - 1,) + e[v + 1:]
                out._add_term(key, c.scale(e[v]))
        return out

    def exp(self) -> "MultiSeries":
        """exp of a series with strictly positive order (univariate)."""
        self._only_var()
        if self.terms and min(self.wdeg(e) for e in self.terms) <= 0:
            raise ArithmeticError("exp needs a positive-order argument")
        one = MultiSeries.monomial(self.ring, self.var_weights, (0,), Q1, self.cap)
        acc = one
        power = one
        step = min((self.wdeg(e) for e in self.terms), default=self.cap + 1)
        j = 1
        fact = Q1
        while j * step <= self.cap:
            power = power * self
            fact = fact * j
            acc = acc + power.scale(1 / fact)
            j += 1
        return acc

    def log1p(self) -> "MultiSeries":
        """log(1 + S) for a positive-order S (univariate)."""
        self._only_var()
        if self.terms and min(self.wdeg(e) for e in self.terms) <= 0:
            raise ArithmeticError("log1p needs a positive-order argument")
        acc = MultiSeries.zero(self.ring, self.var_weights, self.cap, min(self.low, 1))
        power = MultiSeries.monomial(self.ring, self.var_weights, (0,), Q1, self.cap)
        step = min((self.wdeg(e) for e in self.terms), default=self.cap + 1)
        j = 1
        while j * step <= self.cap:
            power = power * self
            acc = acc + power.scale(QQ((-1) ** (j + 1), j))
            j += 1
        return acc

    def specialize(self, values: dict) -> "SpecSeries":
        terms = {}
        for e, c in self.terms.items():
            v = c.specialize(values)
            if v:
                terms[e] = v
        return SpecSeries(self.var_weights, terms, self.cap, self.low)

    def render(self, var_names=None) -> str:
        if not self.terms:
            return "0"
        var_names = var_names or [f"x{i+1}" for i in range(len(self.var_weights))]
        parts = []
        for e in sorted(self.terms, key=lambda e: (self.wdeg(e), e)):
            mono = "*".join(
                f"{var_names[i]}" + (f"^{k}" if k != 1 else "")
                for i, k in enumerate(e) if k
            ) or "1"
            parts.append(f"({self.terms[e].render(self.ring)})*{mono}")
        return " + ".join(parts)


class SpecSeries:
    """MultiSeries with parameters specialized to rationals."""

    __slots__ = ("var_weights", "terms", "cap", "low")

    def __init__(self, var_weights, terms, cap, low):
        self.var_weights = tuple(var_weights)
        self.terms = terms
        self.cap = cap
        self.low = low

    def wdeg(self, exps) -> int:
        return sum(w * e for w, e in zip(self.var_weights, exps))

    @classmethod
    def zero(cls, var_weights, cap, low=0):
        return cls(var_weights, {}, cap, low)

    def _add_term(self, exps, coeff):
        if not coeff:
            return
        cur = self.terms.get(exps)
        new = coeff if cur is None else cur + coeff
        if new:
            self.terms[exps] = new
        else:
            self.terms.pop(exps, None)

    def __add__(self, other: "SpecSeries") -> "SpecSeries":
        out = SpecSeries(self.var_weights, dict(self.terms),
                         min(self.cap, other.cap), min(self.low, other.low))
        for e, c in other.terms.items():
            out._add_term(e, c)
        out.terms = {e: c for e, c in out.terms.items() if self.wdeg(e) <= out.cap}
        return out

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "SpecSeries":
        c = QQ(c)
        if not c:
            return SpecSeries.zero(self.var_weights, self.cap, self.low)
        return SpecSeries(self.var_weights, {e: v * c for e, v in self.terms.items()},
                          self.cap, self.low)

    def __mul__(self, other: "SpecSeries") -> "SpecSeries":
        cap = min(self.cap + other.low, other.cap + self.low)
        out = SpecSeries.zero(self.var_weights, cap, self.low + other.low)
        bweights = [(e, other.wdeg(e), c) for e, c in other.terms.items()]
        for e1, c1 in self.terms.items():
            w1 = self.wdeg(e1)
            for e2, w2, c2 in bweights:
                if w1 + w2 > cap:
                    continue
                key = tuple(a + b for a, b in zip(e1, e2))
                out._add_term(key, c1 * c2)
        return out

    def derive(self, v: int) -> "SpecSeries":
        out = SpecSeries.zero(self.var_weights, self.cap - self.var_weights[v],
                              self.low - self.var_weights[v])
        for e, c in self.terms.items():
            if e[v]:
                key = e[:v] + (e[v] - 1,) + e[v + 1:]
                out._add_term(key, c * e[v])
        return out

    def truncate(self, cap: int) -> "SpecSeries":
        if cap >= self.cap:
            return self
        kept = {e: c for e, c in self.terms.items() if self.wdeg(e) <= cap}
        return SpecSeries(self.var_weights, kept, cap, self.low)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, SpecSeries)
            and self.var_weights == other.var_weights
            and self.terms == other.terms
        )
