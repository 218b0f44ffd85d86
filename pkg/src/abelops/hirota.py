"""Tensor differential algebra and the bilinear/multilinear shift operators.

A slot holds a commutative monomial in derivative symbols.  Supported atoms:

* ``("f", name, J)``   derivative of a generic function, J a sorted label
  multiset; differentiation inserts the new label.
* ``("h", name)``      a unit of the form (constant) * exp(linear form); its
  derivative multiplies the unit by an ``("L", name, i)`` gradient symbol.
* ``("L", name, i)``   gradient of the linear exponent, killed by further
  differentiation.
* ``("e", name)``      a unit exp(F) for an unconstrained exponent F; its
  derivative multiplies by ``("g", name, (i,))``.
* ``("g", name, J)``   derivative symbol of that exponent, differentiates by
  inserting labels.

A TensorPoly is a sum of coefficient-weighted ordered tensor products of
such monomials (slots are ordered, slot contents commute).  Coefficients
live in Q(zeta_m) where m is the number of slots, so the order-m operator
sum_j zeta^(j-1) d/du_i applied to slot j is exact, and m = 2 degenerates to
rationals with zeta = -1.  A DiffPoly is the commutative image after the
symmetrization map that multiplies the slots together.

Operators of different orders are never mixed: every operator checks the
slot count of its argument.
"""

from __future__ import annotations

from ._rat import QQ, Q0, Q1, q_str
from .combinat import (
    constrained_set_partitions,
    integer_partitions,
    multiset_permutations,
    z_weight,
)
from .cyclo import Cyclo
from .symfunc import monomial_sym_at_roots

_KIND_RANK = {"f": 0, "h": 1, "L": 2, "e": 3, "g": 4}


def label_key(x):
    """Total order on labels; ints before strings, each naturally ordered."""
    if isinstance(x, int):
        return (0, x, "")
    return (1, 0, str(x))


def atom_key(atom):
    kind = atom[0]
    name = atom[1]
    if kind in ("f", "g"):
        return (name, _KIND_RANK[kind], len(atom[2]), tuple(label_key(j) for j in atom[2]))
    if kind == "L":
        return (name, _KIND_RANK[kind], 1, (label_key(atom[2]),))
    return (name, _KIND_RANK[kind], 0, ())


def mono_key(mono):
    return (len(mono), tuple(atom_key(a) for a in mono))


def _mono(atoms) -> tuple:
    return tuple(sorted(atoms, key=atom_key))


def _ins(J: tuple, i) -> tuple:
    out = list(J)
    out.append(i)
    out.sort(key=label_key)
    return tuple(out)


def sym(name: str, J=()) -> tuple:
    """Generic derivative symbol atom."""
    return ("f", name, tuple(sorted(J, key=label_key)))


def _derive_monomial(mono: tuple, i) -> list[tuple]:
    """Leibniz derivative; returns one monomial per non-vanishing position."""
    out = []
    for pos, atom in enumerate(mono):
        kind = atom[0]
        if kind == "f":
            rep = ("f", atom[1], _ins(atom[2], i))
            out.append(_mono(mono[:pos] + (rep,) + mono[pos + 1:]))
        elif kind == "h":
            out.append(_mono(mono + (("L", atom[1], i),)))
        elif kind == "e":
            out.append(_mono(mono + (("g", atom[1], (i,)),)))
        elif kind == "g":
            rep = ("g", atom[1], _ins(atom[2], i))
            out.append(_mono(mono[:pos] + (rep,) + mono[pos + 1:]))
        # "L" differentiates to zero
    return out


class TensorPoly:
    """Formal sum of length-m tensor products of slot monomials."""

    __slots__ = ("m", "terms")

    def __init__(self, m: int, terms=None):
        self.m = m
        self.terms: dict[tuple, Cyclo] = terms if terms is not None else {}

    # -- construction -------------------------------------------------

    @classmethod
    def tensor_power(cls, name: str, m: int, kind: str = "generic") -> "TensorPoly":
        atom = {"generic": ("f", name, ()), "exp_linear": ("h", name), "exp_general": ("e", name)}[kind]
        key = ((atom,),) * m
        return cls(m, {key: Cyclo.one(m)})

    @classmethod
    def from_slots(cls, names, kinds=None) -> "TensorPoly":
        names = tuple(names)
        m = len(names)
        kinds = tuple(kinds) if kinds else ("generic",) * m
        slots = []
        for name, kind in zip(names, kinds):
            atom = {"generic": ("f", name, ()), "exp_linear": ("h", name), "exp_general": ("e", name)}[kind]
            slots.append((atom,))
        return cls(m, {tuple(slots): Cyclo.one(m)})

    @classmethod
    def one(cls, m: int) -> "TensorPoly":
        return cls(m, {((),) * m: Cyclo.one(m)})

    # -- ring-ish operations ------------------------------------------

    def _add_term(self, key: tuple, coeff: Cyclo):
        cur = self.terms.get(key)
        new = coeff if cur is None else cur + coeff
        if new:
            self.terms[key] = new
        elif cur is not None:
            del self.terms[key]

    def __add__(self, other: "TensorPoly") -> "TensorPoly":
        self._chk(other)
        out = TensorPoly(self.m, dict(self.terms))
        for key, c in other.terms.items():
            out._add_term(key, c)
        return out

    def __sub__(self, other: "TensorPoly") -> "TensorPoly":
        return self + other.scale(-1)

    def scale(self, c) -> "TensorPoly":
        if not isinstance(c, Cyclo):
            c = Cyclo.from_rational(self.m, QQ(c))
        if not c:
            return TensorPoly(self.m)
        return TensorPoly(self.m, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other: "TensorPoly") -> "TensorPoly":
        """Entrywise tensor multiplication (a (x) b)(c (x) d) = ac (x) bd."""
        self._chk(other)
        out = TensorPoly(self.m)
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key = tuple(_mono(s1 + s2) for s1, s2 in zip(k1, k2))
                out._add_term(key, c1 * c2)
        return out

    def _chk(self, other: "TensorPoly"):
        if self.m != other.m:
            raise ValueError(f"slot count mismatch: {self.m} vs {other.m}")

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, TensorPoly) and self.m == other.m and self.terms == other.terms

    def __hash__(self):
        raise TypeError("TensorPoly is unhashable")

    # -- operators -----------------------------------------------------

    def slot_derive(self, j: int, i) -> "TensorPoly":
        """Differentiate slot j (1-based) with respect to variable label i."""
        if not (1 <= j <= self.m):
            raise ValueError(f"slot {j} out of range 1..{self.m}")
        out = TensorPoly(self.m)
        for key, c in self.terms.items():
            for new_mono in _derive_monomial(key[j - 1], i):
                out._add_term(key[:j - 1] + (new_mono,) + key[j:], c)
        return out

    def hirota_D(self, i) -> "TensorPoly":
        if self.m != 2:
            raise ValueError("the bilinear operator needs exactly 2 slots")
        return self.slot_derive(1, i) - self.slot_derive(2, i)

    def hirota_H(self, i) -> "TensorPoly":
        if self.m < 2:
            raise ValueError("operator order must be at least 2")
        out = TensorPoly(self.m)
        for j in range(1, self.m + 1):
            out = out + self.slot_derive(j, i).scale(Cyclo.zeta_pow(self.m, j - 1))
        return out

    def apply_H(self, labels) -> "TensorPoly":
        t = self
        for i in labels:
            t = t.hirota_H(i)
        return t

    def apply_D(self, labels) -> "TensorPoly":
        t = self
        for i in labels:
            t = t.hirota_D(i)
        return t

    def symmetrize(self) -> "DiffPoly":
        out = DiffPoly(self.m)
        for key, c in self.terms.items():
            mono = _mono(tuple(a for slot in key for a in slot))
            out._add_term(mono, c)
        return out

    # -- output --------------------------------------------------------

    def sorted_terms(self):
        # Most differentiated leading slot first, matching the usual display
        # f[i](x)g - f(x)g[i].
        return sorted(self.terms.items(), key=lambda kv: tuple(mono_key(s) for s in kv[0]), reverse=True)

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key, c in self.sorted_terms():
            body = "⊗".join(mono_str(slot) for slot in key)
            parts.append(_signed(c, body))
        return _join_signed(parts)

    def dump(self) -> str:
        lines = []
        for key, c in self.sorted_terms():
            lines.append("\t".join([c.render()] + [mono_str(slot) for slot in key]))
        return "\n".join(lines)

    def __repr__(self):
        return f"TensorPoly({self.m}, {self.pretty()})"


class DiffPoly:
    """Commutative polynomial in derivative symbols with Q(zeta_m) coefficients."""

    __slots__ = ("m", "terms")

    def __init__(self, m: int, terms=None):
        self.m = m
        self.terms: dict[tuple, Cyclo] = terms if terms is not None else {}

    @classmethod
    def from_monomial(cls, m: int, atoms, coeff=1) -> "DiffPoly":
        c = coeff if isinstance(coeff, Cyclo) else Cyclo.from_rational(m, QQ(coeff))
        return cls(m, {_mono(atoms): c})

    def _add_term(self, mono: tuple, coeff: Cyclo):
        cur = self.terms.get(mono)
        new = coeff if cur is None else cur + coeff
        if new:
            self.terms[mono] = new
        elif cur is not None:
            del self.terms[mono]

    def __add__(self, other: "DiffPoly") -> "DiffPoly":
        self._chk(other)
        out = DiffPoly(self.m, dict(self.terms))
        for k, c in other.terms.items():
            out._add_term(k, c)
        return out

    def __sub__(self, other: "DiffPoly") -> "DiffPoly":
        return self + other.scale(-1)

    def scale(self, c) -> "DiffPoly":
        if not isinstance(c, Cyclo):
            c = Cyclo.from_rational(self.m, QQ(c))
        if not c:
            return DiffPoly(self.m)
        return DiffPoly(self.m, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other: "DiffPoly") -> "DiffPoly":
        self._chk(other)
        out = DiffPoly(self.m)
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                out._add_term(_mono(k1 + k2), c1 * c2)
        return out

    def mul_monomial(self, atoms, coeff=1) -> "DiffPoly":
        return self * DiffPoly.from_monomial(self.m, atoms, coeff)

    def _chk(self, other):
        if self.m != other.m:
            raise ValueError("coefficient rings of different cyclotomic order")

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, DiffPoly) and self.m == other.m and self.terms == other.terms

    def __hash__(self):
        raise TypeError("DiffPoly is unhashable")

    def is_rational(self) -> bool:
        return all(c.is_rational() for c in self.terms.values())

    def rational_terms(self) -> dict:
        """Terms with coefficients coerced to rationals; raises when not rational."""
        return {k: c.rational() for k, c in self.terms.items()}

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: mono_key(kv[0]))

    def content(self):
        """Positive rational content when every coefficient is rational, else None."""
        if not self.terms or not self.is_rational():
            return None
        from math import gcd, lcm
        nums = [abs(int(c.rational().numerator)) for c in self.terms.values()]
        dens = [int(c.rational().denominator) for c in self.terms.values()]
        g = 0
        for v in nums:
            g = gcd(g, v)
        l = 1
        for d in dens:
            l = lcm(l, d)
        return QQ(g, l) if g else None

    def pretty(self, factor_content: bool = True) -> str:
        if not self.terms:
            return "0"
        content = self.content() if factor_content else None
        if content is not None and content != 1:
            inner = self.scale(QQ(1) / content)
            return f"{q_str(content)}*({inner.pretty(factor_content=False)})"
        parts = [_signed(c, mono_str(k)) for k, c in self.sorted_terms()]
        return _join_signed(parts)

    def dump(self) -> str:
        return "\n".join(f"{c.render()}\t{mono_str(k)}" for k, c in self.sorted_terms())

    def __repr__(self):
        return f"DiffPoly({self.m}, {self.pretty()})"


# ---------------------------------------------------------------------------
# rendering helpers


def atom_str(atom) -> str:
    kind = atom[0]
    if kind == "f":
        return atom[1] + (f"[{','.join(str(j) for j in atom[2])}]" if atom[2] else "")
    if kind == "h":
        return atom[1]
    if kind == "L":
        return f"L[{atom[2]}]"
    if kind == "e":
        return f"e^{atom[1]}"
    if kind == "g":
        return f"{atom[1]}[{','.join(str(j) for j in atom[2])}]"
    raise ValueError(f"unknown atom {atom}")


def mono_str(mono: tuple) -> str:
    if not mono:
        return "1"
    parts = []
    pos = 0
    while pos < len(mono):
        run = 1
        while pos + run < len(mono) and mono[pos + run] == mono[pos]:
            run += 1
        base = atom_str(mono[pos])
        parts.append(base if run == 1 else f"{base}^{run}")
        pos += run
    return "*".join(parts)


def _signed(c: Cyclo, body: str) -> str:
    if c.is_rational():
        r = c.rational()
        if r == 1:
            return f"+{body}"
        if r == -1:
            return f"-{body}"
        if r < 0:
            return f"-{q_str(-r)}*{body}"
        return f"+{q_str(r)}*{body}"
    return f"+({c.render()})*{body}"


def _join_signed(parts: list[str]) -> str:
    out = parts[0][1:] if parts[0].startswith("+") else parts[0]
    for p in parts[1:]:
        out += " " + p[0] + " " + p[1:]
    return out


# ---------------------------------------------------------------------------
# module-level operator API


def slot_derive(j: int, i, t: TensorPoly) -> TensorPoly:
    return t.slot_derive(j, i)


def hirota_D(i, t: TensorPoly) -> TensorPoly:
    return t.hirota_D(i)


def hirota_H(i, m: int, t: TensorPoly) -> TensorPoly:
    if t.m != m:
        raise ValueError(f"operator order {m} does not match slot count {t.m}")
    return t.hirota_H(i)


def symmetrize(t: TensorPoly) -> DiffPoly:
    return t.symmetrize()


def closed_form_D(indices, lhs: str = "f", rhs: str = "g") -> TensorPoly:
    """Alternating-subset closed form for n bilinear operator applications."""
    indices = tuple(indices)
    n = len(indices)
    positions = tuple(range(n))
    out = TensorPoly(2)
    for size in range(n + 1):
        sign = Cyclo.from_rational(2, QQ(-1) ** size)
        for right in _subsets(positions, size):
            right_set = set(right)
            left = tuple(p for p in positions if p not in right_set)
            key = (
                (sym(lhs, tuple(indices[p] for p in left)),),
                (sym(rhs, tuple(indices[p] for p in right)),),
            )
            out._add_term(key, sign)
    return out


def _subsets(pool: tuple, size: int):
    from .combinat import _combinations
    return _combinations(pool, size)


def closed_form_H(indices, m: int, names=None) -> TensorPoly:
    """Closed form for n applications of the order-m operator.

    Sums over partitions rho of n padded to length m, their permutations psi
    weighted by zeta^z(psi), and all ordered splits of the index positions
    into blocks of sizes psi.
    """
    indices = tuple(indices)
    n = len(indices)
    if m < 2:
        raise ValueError("operator order must be at least 2")
    if names is None:
        names = tuple(f"f{k+1}" for k in range(m))
    names = tuple(names)
    if len(names) != m:
        raise ValueError("need one function id per slot")
    positions = tuple(range(n))
    out = TensorPoly(m)
    for rho in integer_partitions(n, m):
        for psi in multiset_permutations(rho):
            coeff = Cyclo.zeta_pow(m, z_weight(psi))
            for split in constrained_set_partitions(positions, psi):
                key = tuple(
                    (sym(names[k], tuple(indices[p] for p in split[k])),)
                    for k in range(m)
                )
                out._add_term(key, coeff)
    return out


def closed_form_SH(indices, m: int, name: str = "f") -> DiffPoly:
    """Symmetrized closed form on the m-fold tensor power of one function.

    Sum over partitions rho of the monomial symmetric function value at the
    root-of-unity point times all ordered splits of the index positions into
    blocks sized rho.  Coefficients are integers; zero unless m divides n.
    """
    indices = tuple(indices)
    n = len(indices)
    positions = tuple(range(n))
    out = DiffPoly(m)
    for rho in integer_partitions(n, m):
        value = monomial_sym_at_roots(rho, m)
        if not value:
            continue
        coeff = Cyclo.from_rational(m, value)
        for split in constrained_set_partitions(positions, rho):
            atoms = tuple(sym(name, tuple(indices[p] for p in block)) for block in split)
            out._add_term(_mono(atoms), coeff)
    for c in out.terms.values():
        r = c.rational()
        if r.denominator != 1:
            raise ArithmeticError("symmetrized closed form produced a non-integer")
    return out


def leibniz_D(indices, t1: TensorPoly, t2: TensorPoly) -> TensorPoly:
    """General Leibniz rule: sum over ordered complementary index splits."""
    if t1.m != 2 or t2.m != 2:
        raise ValueError("both factors must have 2 slots")
    return _leibniz(indices, t1, t2, lambda t, lab: t.apply_D(lab))


def leibniz_H(indices, m: int, t1: TensorPoly, t2: TensorPoly) -> TensorPoly:
    if t1.m != m or t2.m != m:
        raise ValueError("slot mismatch")
    return _leibniz(indices, t1, t2, lambda t, lab: t.apply_H(lab))


def _leibniz(indices, t1, t2, run) -> TensorPoly:
    indices = tuple(indices)
    n = len(indices)
    positions = tuple(range(n))
    out = TensorPoly(t1.m)
    for size in range(n + 1):
        for right in _subsets(positions, size):
            right_set = set(right)
            left_labels = tuple(indices[p] for p in positions if p not in right_set)
            right_labels = tuple(indices[p] for p in right)
            out = out + run(t1, left_labels) * run(t2, right_labels)
    return out


# ---------------------------------------------------------------------------
# lattice shift


def _shift_atom(atom) -> list[tuple[tuple, int]]:
    """Expansion of one derivative symbol under a lattice translation.

    A derivative symbol with index multiset J becomes the unit h times the
    sum over position subsets S of f_(J minus S) * prod of L over S, since
    second derivatives of the linear exponent vanish.
    """
    if atom[0] != "f":
        raise ValueError(f"unsupported symbol kind under lattice shift: {atom[0]}")
    name = atom[1]
    J = atom[2]
    npos = len(J)
    out = []
    for mask in range(1 << npos):
        keep = tuple(J[p] for p in range(npos) if not (mask >> p) & 1)
        taken = tuple(J[p] for p in range(npos) if (mask >> p) & 1)
        atoms = (("h", "h"), ("f", name, keep)) + tuple(("L", "h", i) for i in taken)
        out.append((_mono(atoms), 1))
    return out


def _shift_monomial(mono: tuple) -> dict[tuple, int]:
    acc = {(): 1}
    for atom in mono:
        expansion = _shift_atom(atom)
        nxt: dict[tuple, int] = {}
        for base, c0 in acc.items():
            for add, c1 in expansion:
                key = _mono(base + add)
                nxt[key] = nxt.get(key, 0) + c0 * c1
        acc = nxt
    return acc


def lattice_shift(x):
    """Apply the translation rule to every derivative symbol of an expression.

    Works on TensorPoly (slot by slot) and DiffPoly.  Only generic derivative
    symbols are supported; the unit h and its gradient symbols are emitted.
    """
    if isinstance(x, DiffPoly):
        out = DiffPoly(x.m)
        for mono, c in x.terms.items():
            for new_mono, k in _shift_monomial(mono).items():
                out._add_term(new_mono, c * QQ(k))
        return out
    if isinstance(x, TensorPoly):
        out = TensorPoly(x.m)
        for key, c in x.terms.items():
            slot_expansions = [_shift_monomial(slot) for slot in key]
            acc = [((), QQ(1))]
            for exp in slot_expansions:
                nxt = []
                for slots, coeff in acc:
                    for mono, k in exp.items():
                        nxt.append((slots + (mono,), coeff * k))
                acc = nxt
            for slots, coeff in acc:
                out._add_term(slots, c * coeff)
        return out
    raise TypeError("lattice_shift expects a TensorPoly or DiffPoly")


def h_power_monomial(m: int) -> tuple:
    """The monomial h^m used to compare shifted against unshifted numerators."""
    return _mono((("h", "h"),) * m)
