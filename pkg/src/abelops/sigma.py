"""Weight-graded series expansion of the entire function sigma for cyclic models.

Structure of the expansion.  With W the sigma weight, the terms at
"parameter level" k pair u-monomials of weight W + k with parameter
monomials of weight -k.  Level 0 is the pure-u part; for cyclic models the
levels are multiples of n automatically since every parameter weight is.

Constraints used by the solver, level by level (each level's system is
linear in that level's unknown coefficients because lower levels are fixed):

1. Vanishing: sigma evaluated on the sum of g-1 generic local expansions of
   the integrated differentials is identically zero; every mixed coefficient
   of the local parameters is an equation.  The negated point set adds
   nothing by parity.

2. Gradient-pair pinning.  Vanishing alone cannot determine the expansion:
   multiplying any admissible solution by exp(gamma) for an even
   weight-zero series gamma preserves vanishing, homogeneity and parity
   (test_sigma demonstrates this concretely).  The classical normalization
   that removes the freedom is the bilinear identity, at the g-point sum u,

       sum_ij pp_ij(u) m_i(P_a) m_j(P_b) = T(P_a, P_b) / (x_a - x_b)^2

   where pp_ij = (sigma_i sigma_j - sigma sigma_ij)/sigma^2, m_i are the
   numerator monomials of the differentials and T is the symmetric biform
   of the model.  For hyperelliptic models (n = 2, y^2 = f(x) monic) T is
   the classical near-diagonal biform

       F(x1, x2) - 2 y1 y2,
       F = sum_{r=0}^{g} x1^r x2^r (2 c_{2r} + c_{2r+1} (x1 + x2)),

   with c_s = 1, which satisfies F(x,x) = 2 f(x) and dF/dx1 on the diagonal
   = f'(x).  For other cyclic models T is not hard-coded: its level-0 part
   is reconstructed from the solved pure-u part (a strong structural check,
   since the reconstruction must be polynomial), and its higher levels are
   solved jointly with sigma.  The residual gauge there is exactly
   quadratic-exponential, is reported per level, and is fixed by zeroing
   the free coordinates; it shifts pp_ij by parameter constants only, which
   no rank certificate downstream can see.

3. Scale: the level-0 nullspace is one-dimensional and is normalized to the
   determinantal polynomial built from the gap sequence (complete-homogeneous
   determinant in weighted auxiliary variables t_w = -u with a global
   (-1)^genus), so the genus-one limit is sigma = u + higher order.

Genus one has no stratum to vanish on, so the expansion comes from exact
coefficient matching in the squared-gradient cubic for the inverse of the
integrated differential, and sigma = u * exp of its double antiderivative.
"""

from __future__ import annotations

import hashlib
import json
from math import factorial
from typing import NamedTuple

from ._rat import QQ, Q0, Q1, q_str, qq
from .curve import CurveModel
from .errors import FormatError, InconsistentError, UnderdeterminedError
from .linalg import nullspace, solve_affine, solve_multi
from .series import LambdaPoly, MultiSeries, ParamRing
from .combinat import binomial

FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# the expansion object


class SigmaExpansion:
    """Truncated expansion: terms map (u-exponents, parameter monomial) to a
    rational coefficient; complete for all parameter levels <= depth."""

    def __init__(self, curve: CurveModel, depth: int, terms: dict, meta=None):
        self.curve = curve
        self.depth = depth
        self.terms = terms
        self.meta = dict(meta or {})
        self.check_invariants()

    # -- invariants -----------------------------------------------------

    def check_invariants(self):
        W = self.curve.sigma_weight()
        uw = self.curve.u_weights
        ring = self.curve.ring
        for (ue, lm), c in self.terms.items():
            if not c:
                raise FormatError("stored zero coefficient")
            wvar = sum(w * e for w, e in zip(uw, ue))
            wl = ring.mono_weight(lm)
            if wvar + wl != W:
                raise FormatError(f"weight-inhomogeneous term {(ue, lm)}")
            if (sum(ue) - W) % 2:
                raise FormatError(f"parity-violating term {(ue, lm)}")
            if self.curve.cyclic and (-wl) % self.curve.n:
                raise FormatError(f"parameter level not a multiple of n in {(ue, lm)}")
            if -wl > self.depth:
                raise FormatError("term beyond declared depth")

    @property
    def weight(self) -> int:
        return self.curve.sigma_weight()

    def u_cap(self) -> int:
        return self.weight + self.depth

    # -- series views -----------------------------------------------------

    def as_series(self, cap=None) -> MultiSeries:
        cap = self.u_cap() if cap is None else min(cap, self.u_cap())
        out = MultiSeries.zero(self.curve.ring, self.curve.u_weights, cap, self.weight)
        ring = self.curve.ring
        for (ue, lm), c in self.terms.items():
            if out.wdeg(ue) <= cap:
                out._add_term(ue, LambdaPoly.mono(ring.dense(lm), c))
        return out

    def derivative_series(self, deriv, cap=None) -> MultiSeries:
        """Term-wise partial derivative by a multiset of 1-based variable
        indices; the trusted cap drops by the weight of the multiset."""
        uw = self.curve.u_weights
        counts = [0] * len(uw)
        for i in deriv:
            counts[i - 1] += 1
        drop = sum(w * c for w, c in zip(uw, counts))
        cap = (self.u_cap() - drop) if cap is None else min(cap, self.u_cap() - drop)
        low = max(0, self.weight - drop)
        out = MultiSeries.zero(self.curve.ring, uw, cap, low)
        for (ue, lm), c in self.terms.items():
            coeff = c
            new = list(ue)
            dead = False
            for v, k in enumerate(counts):
                for t in range(k):
                    if new[v] == 0:
                        dead = True
                        break
                    coeff = coeff * new[v]
                    new[v] -= 1
                if dead:
                    break
            if dead:
                continue
            key = tuple(new)
            if out.wdeg(key) <= cap:
                out._add_term(key, LambdaPoly.mono(self.curve.ring.dense(lm), coeff))
        return out

    def lam_zero_terms(self) -> dict:
        return {ue: c for (ue, lm), c in self.terms.items() if not lm}

    # -- persistence --------------------------------------------------------

    def payload(self) -> dict:
        terms = [
            {"u": list(ue), "lam": [list(p) for p in lm], "c": q_str(c)}
            for (ue, lm), c in sorted(self.terms.items())
        ]
        return {
            "format_version": FORMAT_VERSION,
            "kind": "sigma-expansion",
            "curve": self.curve.descriptor(),
            "weight": self.weight,
            "u_weights": list(self.curve.u_weights),
            "depth": self.depth,
            "solver": self.meta,
            "terms": terms,
        }

    def to_text(self) -> str:
        payload = self.payload()
        body = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        checksum = hashlib.sha256(body.encode()).hexdigest()
        payload["checksum"] = checksum
        return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SigmaExpansion":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"not a valid expansion file: {exc}") from exc
        if payload.get("format_version") != FORMAT_VERSION:
            raise FormatError(f"unsupported format version {payload.get('format_version')}")
        if payload.get("kind") != "sigma-expansion":
            raise FormatError("not a sigma-expansion file")
        checksum = payload.pop("checksum", None)
        body = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        if checksum != hashlib.sha256(body.encode()).hexdigest():
            raise FormatError("checksum mismatch")
        curve = CurveModel.from_descriptor(payload["curve"])
        terms = {}
        for t in payload["terms"]:
            key = (tuple(t["u"]), tuple(tuple(p) for p in t["lam"]))
            terms[key] = qq(t["c"])
        return cls(curve, payload["depth"], terms, payload.get("solver"))


def store_expansion(exp: SigmaExpansion, path: str):
    with open(path, "w") as fh:
        fh.write(exp.to_text())


def load_expansion(path: str) -> SigmaExpansion:
    with open(path) as fh:
        return SigmaExpansion.from_text(fh.read())


def eval_derivative_series(exp: SigmaExpansion, deriv, cap=None) -> MultiSeries:
    return exp.derivative_series(deriv, cap)


# ---------------------------------------------------------------------------
# determinantal leading part


def schur_weierstrass(curve: CurveModel) -> dict:
    """Leading pure-u part as a dict of u-exponent -> coefficient.

    Determinant of complete homogeneous polynomials in auxiliary weighted
    variables supported on the gap set, evaluated at t_w = -u_(variable of
    weight w), scaled by (-1)^genus.
    """
    gaps = curve.gapdata.gaps
    g = curve.genus
    W = curve.sigma_weight()
    gap_pos = {w: p for p, w in enumerate(gaps)}

    def poly_mul(a: dict, b: dict) -> dict:
        out: dict = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                k = tuple(x + y for x, y in zip(e1, e2))
                cur = out.get(k, Q0) + c1 * c2
                if cur:
                    out[k] = cur
                else:
                    out.pop(k, None)
        return out

    def poly_scale(a: dict, c) -> dict:
        return {k: v * c for k, v in a.items()} if c else {}

    def poly_add(a: dict, b: dict) -> dict:
        out = dict(a)
        for k, c in b.items():
            cur = out.get(k, Q0) + c
            if cur:
                out[k] = cur
            else:
                out.pop(k, None)
        return out

    zero_exp = (0,) * g
    h = [dict() for _ in range(W + g + 1)]
    h[0] = {zero_exp: Q1}
    for k in range(1, len(h)):
        acc: dict = {}
        for w in gaps:
            if w > k:
                break
            tvar = {tuple(1 if i == gap_pos[w] else 0 for i in range(g)): QQ(w)}
            acc = poly_add(acc, poly_mul(tvar, h[k - w]))
        h[k] = poly_scale(acc, QQ(1, k))

    mu = [curve.u_weights[i] - (g - 1 - i) for i in range(g)]

    from itertools import permutations

    det: dict = {}
    for perm in permutations(range(g)):
        sign = 1
        seen = list(perm)
        # count inversions for the permutation sign
        inv = sum(1 for a in range(g) for b in range(a + 1, g) if seen[a] > seen[b])
        sign = -1 if inv % 2 else 1
        prod = {zero_exp: QQ(sign)}
        ok = True
        for i in range(g):
            idx = mu[i] - i + perm[i]
            if idx < 0:
                ok = False
                break
            prod = poly_mul(prod, h[idx])
            if not prod:
                ok = False
                break
        if ok:
            det = poly_add(det, prod)

    # substitute t_w = -u_(index of weight w); gap position p maps to
    # u-index g-1-p since u-weights are the gaps reversed
    out: dict = {}
    sign_g = QQ((-1) ** g)
    for te, c in det.items():
        ue = [0] * g
        for p, e in enumerate(te):
            ue[g - 1 - p] = e
        coeff = c * sign_g * QQ((-1) ** sum(te))
        key = tuple(ue)
        cur = out.get(key, Q0) + coeff
        if cur:
            out[key] = cur
        else:
            out.pop(key, None)
    for ue in out:
        if sum(w * e for w, e in zip(curve.u_weights, ue)) != W:
            raise InconsistentError("leading part is not weight-homogeneous")
    return out


# ---------------------------------------------------------------------------
# genus-one coefficient matching


class Genus1Data(NamedTuple):
    ring: ParamRing
    p_series: MultiSeries      # the double log-derivative, leading u^-2
    sigma_series: MultiSeries  # leading u


def _cubic_engine(ring: ParamRing, c2: LambdaPoly, c1: LambdaPoly, c0: LambdaPoly,
                  ucap: int) -> MultiSeries:
    """Solve (x')^2 = 4(x^3 + c2 x^2 + c1 x + c0) for x = u^-2 + ..."""
    x = MultiSeries.monomial(ring, (1,), (-2,), Q1, ucap)

    def residual(xs: MultiSeries) -> MultiSeries:
        dx = xs.derive(0)
        f = xs * xs * xs
        f = f + (xs * xs).scale(c2) + xs.scale(c1)
        f = f + MultiSeries.monomial(ring, (1,), (0,), c0, xs.cap + 6)
        return dx * dx - f.scale(4)

    for k in range(0, ucap + 1, 2):
        res = residual(x)
        target = res.coeff((k - 4,))
        probe = x + MultiSeries.monomial(ring, (1,), (k,), Q1, ucap)
        sens = (residual(probe) - res).coeff((k - 4,)).constant_part()
        if not sens:
            raise InconsistentError(f"degenerate sensitivity at exponent {k}")
        if target:
            x = x + MultiSeries.monomial(ring, (1,), (k,), target.scale(-1 / sens), ucap)
    final = residual(x).truncate(ucap - 4)
    if not final.is_zero():
        raise InconsistentError("cubic matching left a residual")
    return x


def _sigma_from_p(ring: ParamRing, x: MultiSeries, ucap: int) -> MultiSeries:
    """sigma = u * exp(-double antiderivative of (x - u^-2))."""
    tail = x - MultiSeries.monomial(ring, (1,), (-2,), Q1, x.cap)
    G = tail.truncate(ucap - 2).integrate().integrate().scale(-1)
    return G.exp().shift_exponent(1)


def genus1_oracle(depth: int, g2_name: str = "g2", g3_name: str = "g3") -> Genus1Data:
    """Independent genus-one construction from the classical cubic
    (p')^2 = 4 p^3 - g2 p - g3; p = u^-2 + (g2/20) u^2 + ...; sigma = u + ..."""
    if depth < 5:
        raise ValueError("depth must be at least 5")
    ring = ParamRing((g2_name, g3_name), (-4, -6))
    x = _cubic_engine(ring, LambdaPoly(), LambdaPoly.param(ring, 0, QQ(-1, 4)),
                      LambdaPoly.param(ring, 1, QQ(-1, 4)), depth)
    sigma = _sigma_from_p(ring, x, depth)
    return Genus1Data(ring, x, sigma)


def _solve_genus1(curve: CurveModel, depth: int) -> SigmaExpansion:
    ring = curve.ring  # parameters l2, l1, l0 with weights -2, -4, -6
    ucap = curve.sigma_weight() + depth
    x = _cubic_engine(ring, LambdaPoly.param(ring, 2), LambdaPoly.param(ring, 1),
                      LambdaPoly.param(ring, 0), ucap + 2)
    sigma = _sigma_from_p(ring, x, ucap)
    terms = {}
    for (k,), lp in sigma.truncate(ucap).terms.items():
        for lm, c in lp.terms.items():
            terms[((k,), ring.sparse(lm))] = c
    return SigmaExpansion(curve, depth, terms,
                          {"pin": "genus1-cubic", "nullity_by_level": {}})


# ---------------------------------------------------------------------------
# composite engine (series of sigma data on sums of curve points)


class _Composites:
    """Series in one local parameter per point for signed sums of integrated
    differentials, with power caching and parameter-free shadows."""

    def __init__(self, curve: CurveModel, npoints: int, ucap: int, signs=None):
        self.curve = curve
        self.nv = npoints
        self.cap = ucap
        self.ring = curve.ring
        signs = tuple(signs) if signs is not None else (1,) * npoints
        us = curve.abel_series(ucap)
        g = curve.genus
        self.svars = []
        self.svars0 = []
        for i in range(g):
            acc = MultiSeries.zero(self.ring, (1,) * npoints, ucap, curve.u_weights[i])
            for p in range(npoints):
                for (k,), c in us[i].terms.items():
                    coeff = c if signs[p] > 0 else c.scale(-1)
                    acc._add_term(tuple(k if q == p else 0 for q in range(npoints)), coeff)
            self.svars.append(acc)
            self.svars0.append(acc.lam_zero_part())
        self._pows: dict = {}
        self._pows0: dict = {}
        self._memo: dict = {}
        self._memo0: dict = {}

    def _pow(self, table, base_list, i, e):
        if e == 0:
            return MultiSeries.monomial(self.ring, (1,) * self.nv, (0,) * self.nv, Q1, 10 ** 9)
        key = (i, e)
        if key not in table:
            if e == 1:
                table[key] = base_list[i]
            else:
                table[key] = self._pow(table, base_list, i, e - 1) * base_list[i]
        return table[key]

    def compose(self, ue: tuple) -> MultiSeries:
        key = tuple(ue)
        if key not in self._memo:
            acc = None
            for i, e in enumerate(ue):
                if not e:
                    continue
                p = self._pow(self._pows, self.svars, i, e)
                acc = p if acc is None else acc * p
            if acc is None:
                acc = MultiSeries.monomial(self.ring, (1,) * self.nv, (0,) * self.nv, Q1, 10 ** 9)
            self._memo[key] = acc
        return self._memo[key]

    def compose0(self, ue: tuple) -> MultiSeries:
        key = tuple(ue)
        if key not in self._memo0:
            acc = None
            for i, e in enumerate(ue):
                if not e:
                    continue
                p = self._pow(self._pows0, self.svars0, i, e)
                acc = p if acc is None else acc * p
            if acc is None:
                acc = MultiSeries.monomial(self.ring, (1,) * self.nv, (0,) * self.nv, Q1, 10 ** 9)
            self._memo0[key] = acc
        return self._memo0[key]


def _deriv_monomial(ue: tuple, deriv: tuple):
    """Differentiate the u-monomial by the multiset of 0-based variables.

    Returns (coefficient, exponents) or None when it dies."""
    coeff = Q1
    new = list(ue)
    for v in deriv:
        if new[v] == 0:
            return None
        coeff *= new[v]
        new[v] -= 1
    return coeff, tuple(new)


# ---------------------------------------------------------------------------
# the pinned vanishing solver


def _slice_rows(series: MultiSeries, degree: int, level: int, ring: ParamRing) -> dict:
    """Coefficients at total variable degree == degree, flattened to
    (exponents, parameter monomial) -> rational; checks the level."""
    out = {}
    for e, lp in series.terms.items():
        if series.wdeg(e) != degree:
            continue
        for lm, c in lp.terms.items():
            if -ring.mono_weight(lm) != level:
                raise InconsistentError(
                    f"slice at degree {degree} carries level {-ring.mono_weight(lm)}, expected {level}"
                )
            out[(e, lm)] = c
    return out


def _u_monomials_of_weight(u_weights, target, parity):
    g = len(u_weights)
    out = []

    def rec(i, remaining, acc):
        if i == g:
            if remaining == 0 and sum(acc) % 2 == parity:
                out.append(tuple(acc))
            return
        w = u_weights[i]
        for e in range(remaining // w, -1, -1):
            rec(i + 1, remaining - e * w, acc + [e])

    rec(0, target, [])
    return sorted(out)


class _PinContext:
    """Everything needed to evaluate the cleared bilinear pin identity.

    Hyperelliptic models use the plain g-point sum (the involution makes it
    equivalent to the classical difference form).  Other models use the
    difference form: one distinguished point minus g - 1 points, which is
    the degenerate Klein configuration with the last subtracted point at
    infinity; the identity pairs the distinguished point with the first
    subtracted one.
    """

    def __init__(self, curve: CurveModel, depth: int):
        g = curve.genus
        W = curve.sigma_weight()
        n, s = curve.n, curve.s
        self.curve = curve
        self.g = g
        self.resid_weight = 2 * W - 2 * (2 * g - 1) - 2 * n
        self.cap = self.resid_weight + depth
        ucap = W + depth
        signs = (1,) * g if n == 2 else (1,) + (-1,) * (g - 1)
        self.comp = _Composites(curve, g, ucap, signs)
        ring = curve.ring
        nv = g
        self.nv = nv

        def embed(one_var: MultiSeries, point: int) -> MultiSeries:
            out = MultiSeries.zero(ring, (1,) * nv, one_var.cap, one_var.low)
            for (k,), c in one_var.terms.items():
                out._add_term(tuple(k if q == point else 0 for q in range(nv)), c)
            return out

        self.embed = embed
        # the biform and the monomial embeds only feed products truncated at
        # self.cap, whose other factors have low >= 2W - 2s or so; a modest
        # positive exponent range suffices
        ycap = depth + 2 * s
        y1v = curve.y_series(ycap)
        self.y = [embed(y1v, 0), embed(y1v, 1)]
        self.y0 = [t.lam_zero_part() for t in self.y]

        def xpow(point, e):
            return MultiSeries.monomial(ring, (1,) * nv,
                                        tuple(-n * e if q == point else 0 for q in range(nv)),
                                        Q1, 10 ** 9)

        self.xpow = xpow
        # (x1 - x2)^2 exactly; every term has degree -2n
        xx = MultiSeries.zero(ring, (1,) * nv, 10 ** 9, -2 * n)
        xx._add_term(tuple(-2 * n if q == 0 else 0 for q in range(nv)), LambdaPoly.const(1))
        xx._add_term(tuple(-2 * n if q == 1 else 0 for q in range(nv)), LambdaPoly.const(1))
        e12 = [0] * nv
        e12[0] = -n
        e12[1] = -n
        xx._add_term(tuple(e12), LambdaPoly.const(-2))
        self.xx = xx
        # differential numerator monomials at points 0 and 1 (parameter-full
        # and parameter-free agree up to the y expansion)
        self.mono_ab = curve.differential_monomials()
        self.m = [[self._monomial_series(a, b, p) for (a, b) in self.mono_ab] for p in (0, 1)]
        self.m0 = [[t.lam_zero_part() for t in row] for row in self.m]

    def _monomial_series(self, a: int, b: int, point: int) -> MultiSeries:
        t = self.xpow(point, a)
        if b:
            t = t * self.y[point].pow(b)
        return t

    def pair_embed(self, pm, lam_zero=False) -> MultiSeries:
        """Embed a symmetric biform monomial ((a1,d1),(a2,d2)) at points 0, 1."""
        (a1, d1), (a2, d2) = pm

        def one(a, d, p):
            t = self.xpow(p, a)
            if d:
                y = self.y0[p] if lam_zero else self.y[p]
                t = t * y.pow(d)
            return t

        first = one(a1, d1, 0) * one(a2, d2, 1)
        if (a1, d1) == (a2, d2):
            return first
        return first + one(a2, d2, 0) * one(a1, d1, 1)


def _pin_residual(ctx: _PinContext, C: dict, T: MultiSeries) -> MultiSeries:
    """sum_ij (C_i C_j - C C_ij) m_i(P1) m_j(P2) (x1-x2)^2 - T C^2."""
    g = ctx.g
    acc = None
    for i in range(g):
        for j in range(g):
            key = tuple(sorted((i, j)))
            term = C[(i,)] * C[(j,)] - C[()] * C[key]
            term = term * ctx.m[0][i] * ctx.m[1][j]
            acc = term if acc is None else acc + term
    acc = acc * ctx.xx
    acc = acc - T * C[()] * C[()]
    if acc.cap < ctx.cap:
        raise InconsistentError(
            f"pin residual only trusted to {acc.cap}, need {ctx.cap}; inputs too shallow"
        )
    return acc.truncate(ctx.cap)


def _pin_column(ctx: _PinContext, C0: dict, T0: MultiSeries, ue: tuple):
    """Linearization of the pin residual in one added sigma term (parameter
    part stripped; everything else at parameter level zero)."""
    g = ctx.g

    def D0(key):
        r = _deriv_monomial(ue, key)
        if r is None:
            return None
        coeff, e = r
        return ctx.comp.compose0(e).scale(coeff)

    d_plain = D0(())
    acc = None
    for i in range(g):
        di = D0((i,))
        for j in range(g):
            dj = D0((j,))
            key = tuple(sorted((i, j)))
            dij = D0(key)
            term = None
            if di is not None:
                term = di * C0[(j,)]
            if dj is not None:
                t2 = C0[(i,)] * dj
                term = t2 if term is None else term + t2
            t3 = C0[()] * dij if dij is not None else None
            if t3 is not None:
                term = t3.scale(-1) if term is None else term - t3
            if d_plain is not None:
                t4 = d_plain * C0[key]
                term = t4.scale(-1) if term is None else term - t4
            if term is None:
                continue
            term = term * ctx.m0[0][i] * ctx.m0[1][j]
            acc = term if acc is None else acc + term
    if acc is not None:
        acc = acc * ctx.xx
    if d_plain is not None:
        t = (T0 * C0[()] * d_plain).scale(-2)
        acc = t if acc is None else acc + t
    if acc is None:
        return MultiSeries.zero(ctx.curve.ring, (1,) * ctx.nv, ctx.cap, 0)
    return acc.truncate(ctx.cap)


def _hyper_biform(ctx: _PinContext) -> MultiSeries:
    """F(x1,x2) - 2 y1 y2 for monic hyperelliptic models."""
    curve = ctx.curve
    if curve.n != 2:
        raise ValueError("classical biform applies to n = 2 models")
    g = curve.genus
    s = curve.s
    ring = curve.ring
    acc = MultiSeries.zero(ring, (1,) * ctx.nv, 10 ** 9, None)
    for r in range(g + 1):
        base = ctx.xpow(0, r) * ctx.xpow(1, r)
        if 2 * r < s:
            acc = acc + base.scale(LambdaPoly.param(ring, 2 * r, 2))
        if 2 * r + 1 < s:
            acc = acc + (base * (ctx.xpow(0, 1) + ctx.xpow(1, 1))).scale(LambdaPoly.param(ring, 2 * r + 1))
        elif 2 * r + 1 == s:
            acc = acc + (base * (ctx.xpow(0, 1) + ctx.xpow(1, 1)))
    acc = acc - (ctx.y[0] * ctx.y[1]).scale(2)
    acc.low = -2 * s
    return acc


def _biform_pair_monomials(curve: CurveModel, var_weight_total: int):
    """Symmetric biform monomials ((a1,d1),(a2,d2)) of the given total
    variable weight, y-degrees below n - 1 is not required but n - 1 bounds
    them since y^n reduces."""
    n, s = curve.n, curve.s
    singles = []
    for d in range(n):
        for a in range(0, var_weight_total // n + 1):
            w = n * a + s * d
            if w <= var_weight_total:
                singles.append((a, d, w))
    out = []
    for i, (a1, d1, w1) in enumerate(singles):
        for (a2, d2, w2) in singles[i:]:
            if w1 + w2 == var_weight_total:
                out.append(((a1, d1), (a2, d2)))
    return sorted(out)


def _solve_stratum(curve: CurveModel, depth: int) -> SigmaExpansion:
    g = curve.genus
    W = curve.sigma_weight()
    ring = curve.ring
    uw = curve.u_weights
    parity = W % 2
    hyper = curve.n == 2

    ucap = W + depth
    van = _Composites(curve, g - 1, ucap)
    ctx = _PinContext(curve, depth)

    # running composites: vanishing (plain) and pin (through second derivatives)
    Cvan = MultiSeries.zero(ring, (1,) * (g - 1), ucap, W)
    pin_keys = [()] + [(i,) for i in range(g)] + [tuple(sorted((i, j))) for i in range(g) for j in range(i, g)]
    pin_keys = sorted(set(pin_keys))
    Cpin = {}
    for key in pin_keys:
        drop = sum(uw[v] for v in key)
        Cpin[key] = MultiSeries.zero(ring, (1,) * g, ucap - drop, max(0, W - drop))

    solution: dict = {}
    nullity_by_level: dict = {}

    def add_sigma_terms(new_terms):
        nonlocal Cvan
        for (ue, lm, c) in new_terms:
            solution[(ue, lm)] = c
            Cvan = Cvan + van.compose(ue).scale(LambdaPoly.mono(lm, c))
            for key in pin_keys:
                r = _deriv_monomial(ue, key)
                if r is None:
                    continue
                coeff, e = r
                Cpin[key] = Cpin[key] + ctx.comp.compose(e).scale(LambdaPoly.mono(lm, coeff * c))

    # ---- level 0: nullspace + determinantal normalization ----
    cands0 = _u_monomials_of_weight(uw, W, parity)
    eqkeys: dict = {}
    cols = []
    for ue in cands0:
        comp = van.compose0(ue)
        col = {}
        for e, lp in comp.terms.items():
            c = lp.constant_part()
            if c:
                col[e] = c
                eqkeys.setdefault(e, len(eqkeys))
        cols.append(col)
    rows = [[Q0] * len(cands0) for _ in range(len(eqkeys))]
    for ci, col in enumerate(cols):
        for e, c in col.items():
            rows[eqkeys[e]][ci] = c
    null = nullspace(rows, len(cands0))
    if len(null) != 1:
        raise UnderdeterminedError(0, len(null), "pure-u vanishing nullspace is not a line")
    sw = schur_weierstrass(curve)
    vec = [sw.get(ue, Q0) for ue in cands0]
    # the determinantal polynomial must span the nullspace
    residual_check = [sum(r[c] * vec[c] for c in range(len(cands0))) for r in rows]
    if any(residual_check):
        raise InconsistentError("determinantal leading part fails the vanishing system")
    if not any(vec):
        raise InconsistentError("determinantal leading part vanished")
    add_sigma_terms([(ue, (), c) for ue, c in sw.items() if c])
    nullity_by_level["0"] = 0

    # ---- biform at level 0 ----
    if hyper:
        T = _hyper_biform(ctx)
        res0 = _pin_residual(ctx, Cpin, T)
        bad = _slice_rows(res0, ctx.resid_weight, 0, ring)
        if bad:
            raise InconsistentError("classical biform fails at parameter level 0")
        T_running = T
    else:
        # reconstruct the level-0 biform from the solved leading part
        pms = _biform_pair_monomials(curve, -(ctx.resid_weight - 2 * W))
        zeroT = MultiSeries.zero(ring, (1,) * g, ctx.cap, ctx.resid_weight - 2 * W)
        base = _pin_residual(ctx, Cpin, zeroT)
        rows_map: dict = {}
        cols = []
        for pm in pms:
            col_series = (ctx.pair_embed(pm, lam_zero=True) * Cpin[()].lam_zero_part()
                          * Cpin[()].lam_zero_part()).scale(-1).truncate(ctx.cap)
            col = {}
            for e, lp in col_series.terms.items():
                if col_series.wdeg(e) != ctx.resid_weight:
                    continue
                c = lp.constant_part()
                if c:
                    col[e] = c
                    rows_map.setdefault(e, len(rows_map))
            cols.append(col)
        rhs_map = _slice_rows(base, ctx.resid_weight, 0, ring)
        for (e, lm) in rhs_map:
            rows_map.setdefault(e, len(rows_map))
        A = [[Q0] * len(pms) for _ in range(len(rows_map))]
        b = [Q0] * len(rows_map)
        for ci, col in enumerate(cols):
            for e, c in col.items():
                A[rows_map[e]][ci] = c
        for (e, lm), c in rhs_map.items():
            b[rows_map[e]] = -c
        res = solve_affine(A, b)
        if res is None:
            raise InconsistentError("no polynomial biform matches the leading part")
        tsol, tnull = res
        if tnull:
            nullity_by_level["0"] = len(tnull)
        T_running = MultiSeries.zero(ring, (1,) * g, 10 ** 9, ctx.resid_weight - 2 * W)
        t_terms = [((), pm, c) for pm, c in zip(pms, tsol) if c]
        for (_lm, pm, c) in t_terms:
            T_running = T_running + ctx.pair_embed(pm).scale(c)
        check = _pin_residual(ctx, Cpin, T_running)
        if _slice_rows(check, ctx.resid_weight, 0, ring):
            raise InconsistentError("reconstructed biform fails at parameter level 0")

    # ---- positive levels ----
    levels = [k for k in range(1, depth + 1) if ring.monomials_of_weight(-k)]
    C0pin = {key: Cpin[key].lam_zero_part() for key in pin_keys}
    T0 = T_running.lam_zero_part()
    C0sq = C0pin[()] * C0pin[()]
    P_run = _pin_residual(ctx, Cpin, T_running)
    C2_run = Cpin[()] * Cpin[()]

    for k in levels:
        lmonos = list(ring.monomials_of_weight(-k))
        umonos = _u_monomials_of_weight(uw, W + k, parity)
        pms = [] if hyper else _biform_pair_monomials(curve, -(ctx.resid_weight - 2 * W) - k)

        # shared parameter-free column structure; right-hand sides vary only
        # with the parameter monomial, so one elimination serves them all
        eq_index: dict = {}

        def key_of(kind, e):
            kk = (kind, e)
            if kk not in eq_index:
                eq_index[kk] = len(eq_index)
            return eq_index[kk]

        columns = []
        for ue in umonos:
            col: dict = {}
            for e, lp in van.compose0(ue).terms.items():
                c = lp.constant_part()
                if c:
                    col[key_of("v", e)] = c
            pincol = _pin_column(ctx, C0pin, T0, ue)
            for e, lp in pincol.terms.items():
                if pincol.wdeg(e) != ctx.resid_weight + k:
                    raise InconsistentError("pin linearization is inhomogeneous")
                c = lp.constant_part()
                if c:
                    col[key_of("p", e)] = c
            columns.append(col)
        for pm in pms:
            col = {}
            series = (ctx.pair_embed(pm, lam_zero=True) * C0sq).scale(-1).truncate(ctx.cap)
            for e, lp in series.terms.items():
                if series.wdeg(e) != ctx.resid_weight + k:
                    raise InconsistentError("biform column is inhomogeneous")
                c = lp.constant_part()
                if c:
                    col[key_of("p", e)] = c
            columns.append(col)

        van_rhs = _slice_rows(Cvan, W + k, k, ring)
        pin_rhs = _slice_rows(P_run, ctx.resid_weight + k, k, ring)
        for (e, _lm) in van_rhs:
            key_of("v", e)
        for (e, _lm) in pin_rhs:
            key_of("p", e)

        nrows = len(eq_index)
        A = [[Q0] * len(columns) for _ in range(nrows)]
        for ci, col in enumerate(columns):
            for ri, c in col.items():
                A[ri][ci] = c
        lm_pos = {lm: i for i, lm in enumerate(lmonos)}
        B = [[Q0] * nrows for _ in lmonos]
        for (e, lm), c in van_rhs.items():
            B[lm_pos[lm]][eq_index[("v", e)]] = -c
        for (e, lm), c in pin_rhs.items():
            B[lm_pos[lm]][eq_index[("p", e)]] = -c

        sols, null = solve_multi(A, B)
        nullity_by_level[str(k)] = len(null) * len(lmonos)
        if hyper and null:
            raise UnderdeterminedError(k, len(null), "pinned hyperelliptic solve must be unique")

        sigma_new: dict = {}
        t_new: dict = {}
        for lm, sol in zip(lmonos, sols):
            if sol is None:
                raise InconsistentError(
                    f"no solution at parameter level {k} for {ring.render_mono(lm)}")
            for ue, c in zip(umonos, sol[: len(umonos)]):
                if c:
                    sigma_new[ue] = sigma_new.get(ue, LambdaPoly()) + LambdaPoly.mono(lm, c)
            for pm, c in zip(pms, sol[len(umonos):]):
                if c:
                    t_new[pm] = t_new.get(pm, LambdaPoly()) + LambdaPoly.mono(lm, c)

        if not sigma_new and not t_new:
            continue

        # incremental composite, square and residual updates
        D = {}
        for key in pin_keys:
            drop = sum(uw[v] for v in key)
            D[key] = MultiSeries.zero(ring, (1,) * g, Cpin[key].cap, max(0, W + k - drop))
        for ue, lp in sigma_new.items():
            Cvan = Cvan + van.compose(ue).scale(lp)
            for key in pin_keys:
                r = _deriv_monomial(ue, key)
                if r is None:
                    continue
                coeff, e = r
                D[key] = D[key] + ctx.comp.compose(e).scale(lp.scale(coeff))
            for lm, c in lp.terms.items():
                solution[(ue, lm)] = c

        acc = None
        for i in range(g):
            for j in range(g):
                skey = tuple(sorted((i, j)))
                term = D[(i,)] * Cpin[(j,)] + Cpin[(i,)] * D[(j,)] + D[(i,)] * D[(j,)]
                term = term - D[()] * Cpin[skey] - Cpin[()] * D[skey] - D[()] * D[skey]
                term = term * ctx.m[0][i] * ctx.m[1][j]
                acc = term if acc is None else acc + term
        if acc is not None:
            P_run = P_run + (acc * ctx.xx).truncate(ctx.cap)
        dC2 = (Cpin[()] * D[()]).scale(2) + D[()] * D[()]
        P_run = P_run - (T_running * dC2).truncate(ctx.cap)
        C2_run = C2_run + dC2
        if t_new:
            tau = None
            for pm, lp in t_new.items():
                emb = ctx.pair_embed(pm).scale(lp)
                tau = emb if tau is None else tau + emb
            P_run = P_run - (tau * C2_run).truncate(ctx.cap)
            T_running = T_running + tau
        for key in pin_keys:
            Cpin[key] = Cpin[key] + D[key]

    # final global checks: vanishing and the pin hold through the full caps
    if not Cvan.truncate(ucap).is_zero():
        raise InconsistentError("vanishing residual survives after the solve")
    if not P_run.truncate(ctx.resid_weight + depth).is_zero():
        raise InconsistentError("pin residual survives after the solve")

    meta = {
        "pin": "classical-biform" if hyper else "reconstructed-biform",
        "nullity_by_level": nullity_by_level,
    }
    stored = {(ue, ring.sparse(lm)): c for (ue, lm), c in solution.items()}
    return SigmaExpansion(curve, depth, stored, meta)


def solve_expansion(curve: CurveModel, depth: int) -> SigmaExpansion:
    """Solve the expansion of the weighted entire function for a cyclic model
    through parameter-weight `depth`."""
    if not curve.cyclic:
        raise ValueError("expansion solving is implemented for cyclic models")
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if curve.genus == 1:
        return _solve_genus1(curve, depth)
    return _solve_stratum(curve, depth)
