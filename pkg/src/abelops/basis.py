"""Vector spaces of pole-bounded functions: evaluation, rank certificates,
basis construction, and relation finding with parameter coefficients.

Functions are carried as numerators at a common denominator: a member with
pole order p is stored as its product with sigma^p, an entire series; a
working set at maximal order M multiplies every numerator by sigma^(M-p).
Derivative members use the quotient rule, raising the pole order by one per
derivative.  The constant function is certified through a quotient argument:
if the non-constant numerators are independent on columns of weight below
M * wt(sigma), where the sigma^M row vanishes identically, then adjoining
the constant keeps them independent, so no columns at or beyond that weight
are ever needed for it.

Independence is certified at deterministic rational parameter
specializations (independence at a specialization implies generic
independence); a second specialization guards the first, and apparent
dependence at the working truncation is never reported as dependence, only
as "not added" or, in relation solving, re-verified at a deeper truncation.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from ._rat import QQ, Q0, Q1, q_str
from .abelfun import PPoly, RFunctionId, r_define
from .curve import CurveModel
from .errors import BudgetError, DepthError, InconsistentError
from .linalg import nullspace, solve_affine
from .series import LambdaPoly, MultiSeries
from .sigma import SigmaExpansion

DEFAULT_SEEDS = (1729, 4104)


def specialization(curve: CurveModel, seed: int) -> dict:
    """Deterministic generic rational parameter values."""
    rng = random.Random(seed)
    values = {}
    for j in range(len(curve.ring.names)):
        values[j] = QQ(rng.randint(1, 40), rng.randint(1, 40))
    return values


# ---------------------------------------------------------------------------
# function specifications


@dataclass(frozen=True)
class FunctionSpec:
    kind: str                      # "one" | "rfun" | "deriv"
    rid: RFunctionId | None = None
    dmulti: tuple = ()             # 1-based variable indices, sorted

    @classmethod
    def one(cls) -> "FunctionSpec":
        return cls("one")

    @classmethod
    def rfun(cls, order: int, indices) -> "FunctionSpec":
        return cls("rfun", RFunctionId.make(order, indices))

    @classmethod
    def deriv(cls, base: "FunctionSpec", dmulti) -> "FunctionSpec":
        if base.kind == "one":
            raise ValueError("derivative of the constant is zero")
        return cls("deriv", base.rid, tuple(sorted(base.dmulti + tuple(dmulti))))

    def pole(self) -> int:
        if self.kind == "one":
            return 0
        return self.rid.order + len(self.dmulti)

    def weight(self, curve: CurveModel) -> int:
        if self.kind == "one":
            return 0
        uw = curve.u_weights
        w = -sum(uw[i - 1] for i in self.rid.indices)
        w -= sum(uw[i - 1] for i in self.dmulti)
        return w

    def parity(self) -> int:
        if self.kind == "one":
            return 1
        return -1 if (self.rid.n + len(self.dmulti)) % 2 else 1

    def render(self) -> str:
        if self.kind == "one":
            return "1"
        body = self.rid.render()
        for i in self.dmulti:
            body = f"d{i} " + body
        return body


# ---------------------------------------------------------------------------
# evaluation


class Evaluator:
    """Numerator series builder over one stored expansion.

    With `values` set, all series are parameter-specialized up front, which
    is what rank certificates use; symbolic evaluation is used for relation
    solving.
    """

    def __init__(self, exp: SigmaExpansion, values: dict | None = None):
        self.exp = exp
        self.curve = exp.curve
        self.values = values
        self._deriv_cache: dict = {}
        self._num_cache: dict = {}
        self._sigma_pows: dict = {}
        self._prod_cache: dict = {}

    def deriv_series(self, J: tuple):
        key = tuple(sorted(J))
        if key not in self._deriv_cache:
            s = self.exp.derivative_series(key)
            if self.values is not None:
                s = s.specialize(self.values)
            self._deriv_cache[key] = s
        return self._deriv_cache[key]

    def sigma_power(self, p: int):
        if p not in self._sigma_pows:
            if p == 0:
                base = self.deriv_series(())
                one = base.scale(0)
                unit = Q1 if self.values is not None else LambdaPoly.const(1)
                one._add_term((0,) * self.curve.genus, unit)
                one.cap = 10 ** 9
                one.low = 0
                self._sigma_pows[0] = one
            elif p == 1:
                self._sigma_pows[1] = self.deriv_series(())
            else:
                self._sigma_pows[p] = self.sigma_power(p - 1) * self.deriv_series(())
        return self._sigma_pows[p]

    def numerator(self, spec: FunctionSpec):
        """Series of (function) * sigma^pole and the pole order."""
        key = spec
        if key in self._num_cache:
            return self._num_cache[key]
        if spec.kind == "one":
            out = (self.sigma_power(0), 0)
        elif spec.kind == "rfun":
            out = (self._rfun_numerator(spec.rid), spec.rid.order)
        else:
            base, p = self.numerator(FunctionSpec("rfun", spec.rid))
            for i in spec.dmulti:
                sigma = self.deriv_series(())
                dsigma = self.deriv_series((i,))
                base = base.derive(i - 1) * sigma - base.scale(p) * dsigma
                p += 1
            out = (base, p)
        self._num_cache[key] = out
        return out

    def _derivative_product(self, Js: tuple):
        """Cached product of derivative series; Js is a canonical tuple of
        index tuples, so shared prefixes are reused across monomials."""
        if Js in self._prod_cache:
            return self._prod_cache[Js]
        if len(Js) == 1:
            out = self.deriv_series(Js[0])
        else:
            out = self._derivative_product(Js[:-1]) * self.deriv_series(Js[-1])
        self._prod_cache[Js] = out
        return out

    def _rfun_numerator(self, rid: RFunctionId):
        num = r_define(rid)
        acc = None
        for mono, c in num.numerator.terms.items():
            coeff = -c.rational() / rid.order
            term = self._derivative_product(tuple(atom[2] for atom in mono)).scale(coeff)
            acc = term if acc is None else acc + term
        if acc is None:
            acc = self.sigma_power(0).scale(0)
        return acc

    def ppoly_numerator(self, pp: PPoly):
        """Series of (p-polynomial) * sigma^M with M = max term pole order."""
        M = 0
        for (pf, _lm), _c in pp.terms.items():
            M = max(M, sum(len(f) for f in pf))
        acc = None
        for (pf, lm), c in pp.terms.items():
            term = None
            for f in pf:
                # an index block J contributes the order-|J| numerator of the
                # block function, which is the |J|-index multi-log-derivative
                n_f, _p = self.numerator(FunctionSpec.rfun(len(f), f))
                term = n_f if term is None else term * n_f
            pole = sum(len(f) for f in pf)
            if pole < M:
                term = term * self.sigma_power(M - pole)
            if lm:
                dense = self.curve.ring.dense(lm)
                if self.values is not None:
                    c = c * LambdaPoly.mono(dense, 1).specialize(self.values)
                    term = term.scale(c)
                else:
                    term = term.scale(LambdaPoly.mono(dense, c))
            else:
                term = term.scale(c)
            acc = term if acc is None else acc + term
        return acc, M

    def at_common_pole(self, spec: FunctionSpec, M: int):
        num, p = self.numerator(spec)
        if p > M:
            raise ValueError(f"{spec.render()} has pole {p} beyond the working order {M}")
        if p < M:
            num = num * self.sigma_power(M - p)
        return num


def evaluate_function(spec: FunctionSpec, exp: SigmaExpansion, M: int | None = None,
                      values: dict | None = None):
    """The spec's numerator at denominator sigma^M (default: its own pole)."""
    ev = Evaluator(exp, values)
    M = spec.pole() if M is None else M
    return ev.at_common_pole(spec, M)


# ---------------------------------------------------------------------------
# rank certificates


def _series_rows(series_list, col_cap: int):
    """Exact matrix over the union of exponent columns up to col_cap."""
    cols: dict = {}
    rows = []
    for s in series_list:
        row = {}
        for e, c in s.terms.items():
            if s.wdeg(e) <= col_cap and c:
                row[e] = c
                cols.setdefault(e, len(cols))
        rows.append(row)
    order = sorted(cols, key=lambda e: (sum(a * b for a, b in zip(series_list[0].var_weights, e)), e))
    index = {e: i for i, e in enumerate(order)}
    mat = [[Q0] * len(order) for _ in rows]
    for ri, row in enumerate(rows):
        for e, c in row.items():
            mat[ri][index[e]] = c
    return mat


class _RankTracker:
    """Incremental row-space tracker by elimination against stored pivots."""

    def __init__(self, weights):
        self.weights = weights
        self.pivots: list[tuple] = []   # (column, row-dict)

    def _reduce(self, row: dict) -> dict:
        row = dict(row)
        for col, prow in self.pivots:
            c = row.get(col)
            if c:
                for e, v in prow.items():
                    cur = row.get(e, Q0) - c * v
                    if cur:
                        row[e] = cur
                    else:
                        row.pop(e, None)
        return row

    def try_add(self, row: dict) -> bool:
        red = self._reduce(row)
        if not red:
            return False
        col = min(red, key=lambda e: (sum(a * b for a, b in zip(self.weights, e)), e))
        inv = Q1 / red[col]
        norm = {e: v * inv for e, v in red.items()}
        self.pivots.append((col, norm))
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)


def independence_check(specs, exp: SigmaExpansion, seeds=DEFAULT_SEEDS):
    """Exact rank of the spec set at a deterministic rational specialization.

    Returns (rank, details).  Full rank at the first specialization is a
    certificate of generic independence; a deficient rank is re-tested at the
    second specialization and the best rank is reported together with a
    dependency vector candidate at the final specialization.
    """
    specs = list(specs)
    M = max(s.pole() for s in specs)
    W = exp.weight
    have_one = any(s.kind == "one" for s in specs)
    others = [s for s in specs if s.kind != "one"]
    best = None
    for seed in seeds:
        values = specialization(exp.curve, seed)
        ev = Evaluator(exp, values)
        rows = [ev.at_common_pole(s, M) for s in others]
        col_cap = min(r.cap for r in rows) if rows else 0
        if have_one:
            col_cap = min(col_cap, M * W - 1)
        for s, r in zip(others, rows):
            nominal = M * W + s.weight(exp.curve)
            if col_cap < nominal:
                raise DepthError(exp.depth + nominal - col_cap, exp.depth,
                                 f"columns reach {col_cap} but {s.render()} starts at {nominal}")
        mat = _series_rows(rows, col_cap)
        from .linalg import rank as mrank
        r = mrank(mat)
        total = r + (1 if have_one else 0)
        detail = {
            "seed": seed,
            "col_cap": col_cap,
            "rank": total,
            "constant_by_quotient": have_one,
        }
        if total == len(specs):
            return total, detail
        null = nullspace(list(map(list, zip(*mat))), len(mat)) if mat else []
        detail["dependency_candidates"] = len(null)
        best = (total, detail) if best is None or total > best[0] else best
    return best


# ---------------------------------------------------------------------------
# basis construction


@dataclass
class BasisReport:
    curve: dict
    pole_order: int
    dim_target: int
    entries: list = field(default_factory=list)
    weights: list = field(default_factory=list)
    families: dict = field(default_factory=dict)
    parity_split: dict = field(default_factory=dict)
    alternatives: dict = field(default_factory=dict)
    col_cap: int = 0
    seed: int = 0
    status: str = "complete"
    deficit: int = 0
    runtime_seconds: float = 0.0

    def complete(self) -> bool:
        return self.status == "complete"

    def to_json(self) -> dict:
        return {
            "kind": "basis-report",
            "curve": self.curve,
            "pole_order": self.pole_order,
            "dim_target": self.dim_target,
            "entries": [e.render() for e in self.entries],
            "weights": self.weights,
            "families": self.families,
            "parity_split": self.parity_split,
            "alternatives": {k: [s.render() for s in v] for k, v in self.alternatives.items()},
            "col_cap": self.col_cap,
            "seed": self.seed,
            "status": self.status,
            "deficit": self.deficit,
        }

    def table(self) -> str:
        lines = [
            f"space: pole order <= {self.pole_order} on curve ({self.curve['n']},{self.curve['s']})",
            f"dimension target: {self.dim_target}   status: {self.status}"
            + (f"   deficit: {self.deficit}" if self.deficit else ""),
            f"{'#':>3}  {'weight':>7}  entry",
        ]
        for i, (e, w) in enumerate(zip(self.entries, self.weights), 1):
            lines.append(f"{i:>3}  {w:>7}  {e.render()}")
        fams = ", ".join(f"{k}: {v}" for k, v in sorted(self.families.items()))
        lines.append(f"families: {fams}")
        lines.append(f"parity split: even {self.parity_split.get('even', 0)}, "
                     f"odd {self.parity_split.get('odd', 0)}")
        return "\n".join(lines)


def _rfun_candidates(curve: CurveModel, order: int, n_indices: int, max_abs_weight: int):
    out = []
    for idx in combinations_with_replacement(range(1, curve.genus + 1), n_indices):
        spec = FunctionSpec.rfun(order, idx)
        w = spec.weight(curve)
        if -w <= max_abs_weight:
            out.append(spec)
    out.sort(key=lambda s: (-s.weight(curve), s.rid.indices))
    return out


def build_basis(curve: CurveModel, order: int, exp: SigmaExpansion,
                seeds=DEFAULT_SEEDS, budget_seconds: float | None = None,
                _start=None) -> BasisReport:
    """Greedy basis construction in the paper-of-record order: the previous
    space's basis, then order-m members with m, 2m, ... indices in ascending
    absolute weight (lexicographic tie-break), then first derivatives of the
    previous basis, then higher index families if a deficit remains."""
    start = _start if _start is not None else time.monotonic()
    W = exp.weight
    g = curve.genus
    dim = order ** g
    report = BasisReport(curve.descriptor(), order, dim, seed=seeds[0])

    def out_of_budget():
        return budget_seconds is not None and time.monotonic() - start > budget_seconds

    if order < 1:
        raise ValueError("pole order must be at least 1")
    if order == 1:
        report.entries = [FunctionSpec.one()]
        report.weights = [0]
        report.families = {"constant": 1}
        report.parity_split = {"even": 1, "odd": 0}
        return report

    prev = build_basis(curve, order - 1, exp, seeds, budget_seconds, start)
    if not prev.complete():
        return prev

    values = specialization(curve, seeds[0])
    ev = Evaluator(exp, values)
    tracker = _RankTracker(curve.u_weights)
    entries: list[FunctionSpec] = []
    families: dict = {}

    # One common column range for every row of the incremental certificate:
    # capped below order*W so the constant is covered by the quotient
    # argument, and at exp.depth, through which every candidate row is
    # complete (trusted caps are nominal weight + depth, nominal >= 0).
    col_cap_limit = min(order * W - 1, exp.depth)

    def row_of(spec: FunctionSpec):
        num = ev.at_common_pole(spec, order)
        nominal = order * W + spec.weight(curve)
        if col_cap_limit < nominal:
            raise DepthError(exp.depth + nominal - col_cap_limit, exp.depth,
                             f"{spec.render()} at pole order {order}")
        if num.cap < col_cap_limit:
            raise DepthError(exp.depth + col_cap_limit - num.cap, exp.depth,
                             f"{spec.render()} truncation at pole order {order}")
        return {e: c for e, c in num.terms.items() if num.wdeg(e) <= col_cap_limit}

    def consider(spec: FunctionSpec, family: str) -> bool:
        if len(entries) >= dim:
            return False
        if spec.kind == "one":
            entries.append(spec)
            families[family] = families.get(family, 0) + 1
            return True
        if tracker.try_add(row_of(spec)):
            entries.append(spec)
            families[family] = families.get(family, 0) + 1
            return True
        return False

    # seed with the previous basis (the constant is certified by quotient)
    for spec in prev.entries:
        if out_of_budget():
            return _partial(report, entries, families, curve, start)
        family = "constant" if spec.kind == "one" else (
            f"deriv" if spec.kind == "deriv" else f"{spec.rid.order}:{spec.rid.n}-index")
        if not consider(spec, family):
            raise InconsistentError(
                f"previous-space entry {spec.render()} became dependent at order {order}")

    # order-m families with m and 2m indices, then derivatives, then 3m, ...
    equal_weight_pool: dict = {}

    def scan_family(n_indices: int):
        fam = f"{order}:{n_indices}-index"
        for spec in _rfun_candidates(curve, order, n_indices, order * W):
            if len(entries) == dim or out_of_budget():
                return
            added = consider(spec, fam)
            key = (-spec.weight(curve), fam)
            equal_weight_pool.setdefault(key, []).append((spec, added))

    for n_indices in (order, 2 * order):
        scan_family(n_indices)
        if len(entries) == dim:
            break

    if len(entries) < dim and not out_of_budget():
        for base in prev.entries:
            if base.kind == "one":
                continue
            for i in range(1, g + 1):
                if len(entries) == dim or out_of_budget():
                    break
                spec = FunctionSpec.deriv(base, (i,))
                if -spec.weight(curve) <= order * W:
                    consider(spec, "deriv")

    extra = 3
    while len(entries) < dim and not out_of_budget():
        scan_family(extra * order)
        extra += 1
        if extra > 2 * g:  # candidate families exhausted
            break

    if out_of_budget() and len(entries) < dim:
        return _partial(report, entries, families, curve, start)

    report.entries = entries
    report.weights = [s.weight(curve) for s in entries]
    report.families = families
    report.parity_split = {
        "even": sum(1 for s in entries if s.parity() > 0),
        "odd": sum(1 for s in entries if s.parity() < 0),
    }
    report.col_cap = col_cap_limit
    report.runtime_seconds = time.monotonic() - start
    if len(entries) < dim:
        report.status = "exhausted"
        report.deficit = dim - len(entries)
        return report

    # confirm with the guard specialization
    rank, detail = independence_check(entries, exp, seeds=seeds)
    if rank != dim:
        raise InconsistentError(f"final certificate failed: rank {rank} of {dim}")

    # record equal-weight alternatives for accepted members
    for (absw, fam), pool in equal_weight_pool.items():
        accepted = [s for s, ok in pool if ok]
        if accepted and len(pool) > 1:
            report.alternatives[f"weight -{absw} ({fam})"] = [s for s, _ok in pool]
    return report


def _partial(report: BasisReport, entries, families, curve, start) -> BasisReport:
    report.entries = list(entries)
    report.weights = [s.weight(curve) for s in entries]
    report.families = dict(families)
    report.parity_split = {
        "even": sum(1 for s in entries if s.parity() > 0),
        "odd": sum(1 for s in entries if s.parity() < 0),
    }
    report.status = "budget-exhausted"
    report.deficit = report.dim_target - len(entries)
    report.runtime_seconds = time.monotonic() - start
    return report


# ---------------------------------------------------------------------------
# relation finding


@dataclass
class RelationResult:
    target: str
    coefficients: list            # (FunctionSpec, lambda-monomial, rational)
    verified_cap: int
    independent: bool = False
    residual_witness: str = ""

    def render(self, curve: CurveModel) -> str:
        if self.independent:
            return f"{self.target} is independent of the given set ({self.residual_witness})"
        parts = []
        for spec, lm, c in self.coefficients:
            if not c:
                continue
            lam = curve.ring.render_mono(lm)
            body = spec.render()
            piece = q_str(c) if c > 0 else q_str(-c)
            text = f"{piece}*{body}" if lam == "1" else f"{piece}*{lam}*{body}"
            text = text.replace(f"*1", "") if body == "1" and lam == "1" else text
            parts.append(("+ " if c > 0 else "- ") + text)
        joined = " ".join(parts)
        if joined.startswith("+ "):
            joined = joined[2:]
        return f"{self.target} = {joined}"


def find_relation(target, basis_specs, exp: SigmaExpansion):
    """Express a weight-homogeneous target in basis entries with
    weight-compatible parameter monomials, exactly.

    `target` is a p-symbol polynomial (PPoly) or a FunctionSpec.  Returns a
    RelationResult; when the matching system is inconsistent the verdict is
    independence, with the witness row recorded.
    """
    curve = exp.curve
    ring = curve.ring
    W = exp.weight
    ev = Evaluator(exp, values=None)

    if isinstance(target, FunctionSpec):
        t_series, t_pole = ev.numerator(target)
        t_weight = target.weight(curve)
        t_name = target.render()
    else:
        t_series, t_pole = ev.ppoly_numerator(target)
        t_weight = _ppoly_weight(target, curve)
        t_name = target.render()

    M = max([t_pole] + [s.pole() for s in basis_specs])
    if t_pole < M:
        t_series = t_series * ev.sigma_power(M - t_pole)

    # ansatz: entry x parameter monomial, weights matching the target
    unknowns = []
    columns = []
    for spec in basis_specs:
        base = ev.at_common_pole(spec, M)
        for lm in ring.monomials_of_weight(t_weight - spec.weight(curve)):
            unknowns.append((spec, lm))
            columns.append(base.scale(LambdaPoly.mono(lm, 1)))

    col_cap = min([t_series.cap] + [c.cap for c in columns])
    rows_map: dict = {}

    def add_keys(series):
        for e, lp in series.terms.items():
            if series.wdeg(e) > col_cap:
                continue
            for lm in lp.terms:
                rows_map.setdefault((e, lm), len(rows_map))

    add_keys(t_series)
    for c in columns:
        add_keys(c)
    A = [[Q0] * len(unknowns) for _ in range(len(rows_map))]
    b = [Q0] * len(rows_map)
    for ci, series in enumerate(columns):
        for e, lp in series.terms.items():
            if series.wdeg(e) > col_cap:
                continue
            for lm, c in lp.terms.items():
                A[rows_map[(e, lm)]][ci] = c
    for e, lp in t_series.terms.items():
        if t_series.wdeg(e) > col_cap:
            continue
        for lm, c in lp.terms.items():
            b[rows_map[(e, lm)]] = c

    res = solve_affine(A, b)
    if res is None:
        return RelationResult(t_name, [], col_cap, independent=True,
                              residual_witness="matching system inconsistent at "
                                               f"truncation weight {col_cap}")
    sol, null = res
    if null:
        raise InconsistentError(
            f"relation ansatz is degenerate (nullity {len(null)}): the basis set is dependent")

    # re-verification at the full available truncation
    residual = t_series
    for (spec, lm), c in zip(unknowns, sol):
        if c:
            residual = residual - ev.at_common_pole(spec, M).scale(LambdaPoly.mono(lm, c))
    if not residual.is_zero():
        raise InconsistentError("relation failed re-substitution at the full truncation")
    coeffs = [(spec, ring.sparse(lm), c) for (spec, lm), c in zip(unknowns, sol) if c]
    return RelationResult(t_name, coeffs, residual.cap)


def _ppoly_weight(pp: PPoly, curve: CurveModel) -> int:
    uw = curve.u_weights
    weights = set()
    for (pf, lm), _c in pp.terms.items():
        w = -sum(uw[i - 1] for f in pf for i in f)
        w += curve.ring.mono_weight(lm)
        weights.add(w)
    if len(weights) != 1:
        raise ValueError("target is not weight-homogeneous")
    return weights.pop()
