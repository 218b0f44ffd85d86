"""Command line surface.

Subcommands:

* ops       evaluate an operator program such as "S D[i] D[j] (f^x2)"
* rfun      expand an R-function into p-symbols
* sigma     solve and store a series expansion for a cyclic model
* basis     build a pole-bounded basis from a stored expansion
* relation  express a target over basis entries with parameter coefficients
* selftest  quick internal identity checks

All output is exact: rationals are printed as p/q, never floats.  Runs are
deterministic for fixed flags; seeds are embedded in emitted files.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from ._rat import q_str
from .abelfun import PPoly, RFunctionId, r_define, r_to_p
from .basis import DEFAULT_SEEDS, FunctionSpec, build_basis, find_relation
from .curve import CurveModel
from .errors import AbelopsError, FormatError
from .hirota import TensorPoly
from .sigma import load_expansion, solve_expansion, store_expansion


class ProgramError(AbelopsError):
    exit_code = 2


# ---------------------------------------------------------------------------
# operator program parser


def _tokenize(text: str):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "()^,":
            tokens.append((ch, i))
            i += 1
            continue
        if ch == "[":
            j = text.find("]", i)
            if j < 0:
                raise ProgramError(f"unclosed '[' at position {i}")
            tokens.append(("idx", text[i + 1:j], i))
            i = j + 1
            continue
        j = i
        while j < len(text) and (text[j].isalnum() or text[j] == "_"):
            j += 1
        if j == i:
            raise ProgramError(f"unexpected character {ch!r} at position {i}")
        tokens.append(("name", text[i:j], i))
        i = j
    return tokens


def run_ops_program(text: str) -> str:
    """Parse and evaluate an operator program; returns the rendered result.

    Grammar:  [S] (D[label] | H[order,label])* '(' operand ')'
    Operand:  name^xN for an N-fold tensor power (name 'h' is the
              exponential-of-linear unit), or a comma list of names.
    """
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    symmetrized = False
    ops = []
    while True:
        tok = peek()
        if tok is None:
            raise ProgramError("missing operand, expected '(...)'")
        if tok[0] == "name" and tok[1] == "S" and not ops and not symmetrized:
            symmetrized = True
            pos += 1
            continue
        if tok[0] == "name" and tok[1] in ("D", "H"):
            kind = tok[1]
            at = tok[2]
            pos += 1
            tok = peek()
            if tok is None or tok[0] != "idx":
                raise ProgramError(f"operator {kind} at position {at} needs [..] arguments")
            args = [a.strip() for a in tok[1].split(",")]
            pos += 1
            if kind == "D":
                if len(args) != 1:
                    raise ProgramError(f"D takes one label, got {args} at position {at}")
                ops.append(("D", args[0]))
            else:
                if len(args) != 2:
                    raise ProgramError(f"H takes [order,label], got {args} at position {at}")
                try:
                    order = int(args[0])
                except ValueError:
                    raise ProgramError(f"bad operator order {args[0]!r} at position {at}")
                ops.append(("H", order, args[1]))
            continue
        break

    tok = peek()
    if tok is None or tok[0] != "(":
        raise ProgramError("expected '(' before the operand")
    pos += 1
    names = []
    power = None
    while True:
        tok = peek()
        if tok is None:
            raise ProgramError("unclosed '('")
        if tok[0] == "name":
            names.append(tok[1])
            pos += 1
        elif tok[0] == "^":
            pos += 1
            tok = peek()
            if tok is None or tok[0] != "name" or not tok[1].startswith("x"):
                raise ProgramError("expected xN after '^'")
            try:
                power = int(tok[1][1:])
            except ValueError:
                raise ProgramError(f"bad tensor power {tok[1]!r}")
            pos += 1
        elif tok[0] == ",":
            pos += 1
        elif tok[0] == ")":
            pos += 1
            break
        else:
            raise ProgramError(f"unexpected token at position {tok[-1]}")
    if peek() is not None:
        raise ProgramError(f"trailing input at position {peek()[-1]}")

    if power is not None:
        if len(names) != 1:
            raise ProgramError("tensor power applies to a single name")
        kind = "exp_linear" if names[0] == "h" else "generic"
        t = TensorPoly.tensor_power(names[0], power, kind=kind)
    else:
        if not names:
            raise ProgramError("empty operand")
        kinds = ["exp_linear" if n == "h" else "generic" for n in names]
        t = TensorPoly.from_slots(names, kinds)

    for op in ops:
        if op[0] == "D":
            if t.m != 2:
                raise ProgramError("D needs a 2-slot operand")
            t = t.hirota_D(op[1])
        else:
            if t.m != op[1]:
                raise ProgramError(f"H[{op[1]},..] applied to {t.m} slots")
            t = t.hirota_H(op[2])
    if symmetrized:
        return t.symmetrize().pretty()
    return t.pretty()


# ---------------------------------------------------------------------------
# subcommand implementations


def _parse_curve(text: str) -> CurveModel:
    if text.endswith(".json"):
        with open(text) as fh:
            return CurveModel.from_descriptor(json.load(fh))
    try:
        n, s = (int(x) for x in text.split(","))
    except ValueError:
        raise ProgramError(f"bad curve {text!r}; expected n,s")
    return CurveModel(n, s)


def _parse_indices(text: str):
    out = []
    for piece in text.split(","):
        piece = piece.strip()
        out.append(int(piece) if piece.isdigit() else piece)
    return out


def _parse_spec(text: str) -> FunctionSpec:
    """R[m]:i,j,... possibly prefixed by derivative markers d<k>."""
    text = text.strip()
    dmulti = []
    while text.startswith("d"):
        head, _, rest = text.partition(" ")
        if not head[1:].isdigit():
            break
        dmulti.append(int(head[1:]))
        text = rest.strip()
    if text == "1":
        return FunctionSpec.one()
    if not text.startswith("R[") or ":" not in text:
        raise ProgramError(f"bad function spec {text!r}; expected R[m]:i,j,...")
    order = int(text[2:text.index("]")])
    idx = _parse_indices(text.split(":", 1)[1])
    spec = FunctionSpec.rfun(order, idx)
    return FunctionSpec.deriv(spec, dmulti) if dmulti else spec


def cmd_ops(args) -> int:
    print(run_ops_program(args.program))
    return 0


def cmd_rfun(args) -> int:
    rid = RFunctionId.make(args.order, _parse_indices(args.indices))
    pp = r_to_p(rid)
    if args.format == "json":
        payload = {
            "kind": "rfun-expansion",
            "version": __version__,
            "order": rid.order,
            "indices": list(rid.indices),
            "terms": [
                {"p": [list(f) for f in pf], "lam": list(lm), "c": q_str(c)}
                for (pf, lm), c in pp.sorted_terms()
            ],
        }
        print(json.dumps(payload, sort_keys=True))
    else:
        if pp.is_zero():
            note = "" if rid.is_nonzero() else \
                f"  (zero: order {rid.order} does not divide the index count {rid.n})"
            print("0" + note)
        else:
            print(pp.render())
    if args.define:
        num = r_define(rid).numerator
        print(f"numerator of -{rid.order}*sigma^{rid.order} * value:")
        print(num.pretty())
    return 0


def cmd_sigma(args) -> int:
    curve = _parse_curve(args.curve)
    exp = solve_expansion(curve, args.depth)
    if args.out:
        store_expansion(exp, args.out)
    summary = {
        "curve": curve.descriptor(),
        "weight": exp.weight,
        "depth": exp.depth,
        "terms": len(exp.terms),
        "nullity_by_level": exp.meta.get("nullity_by_level", {}),
        "pin": exp.meta.get("pin"),
        "out": args.out,
    }
    if args.format == "json":
        print(json.dumps(summary, sort_keys=True))
    else:
        print(f"expansion for ({curve.n},{curve.s}): weight {exp.weight}, "
              f"parameter depth {exp.depth}, {len(exp.terms)} terms"
              + (f", written to {args.out}" if args.out else ""))
        gauge = {k: v for k, v in summary["nullity_by_level"].items() if v}
        if gauge:
            print(f"gauge freedom fixed at levels: {gauge}")
    return 0


def _load_for(args, curve=None):
    try:
        exp = load_expansion(args.sigma)
    except FileNotFoundError:
        raise FormatError(
            f"expansion file {args.sigma!r} not found; create it with "
            f"`abelops sigma --curve n,s --depth D --out {args.sigma}`")
    if curve is not None and exp.curve.descriptor() != curve.descriptor():
        raise FormatError("expansion file belongs to a different curve")
    return exp


def cmd_basis(args) -> int:
    exp = _load_for(args)
    report = build_basis(exp.curve, args.pole, exp,
                         seeds=(args.seed, DEFAULT_SEEDS[1]),
                         budget_seconds=args.budget_seconds)
    if args.format == "json":
        print(json.dumps(report.to_json(), sort_keys=True))
    else:
        print(report.table())
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report.to_json(), fh, sort_keys=True, indent=1)
    if report.status == "budget-exhausted":
        return 5
    return 0 if report.complete() else 1


def cmd_relation(args) -> int:
    exp = _load_for(args)
    curve = exp.curve
    if args.delta:
        if (curve.n, curve.s) != (2, 5):
            raise ProgramError("--delta is the genus-two target; use a (2,5) expansion")
        target = PPoly.single(((1, 1), (2, 2)), 1) + PPoly.single(((1, 2), (1, 2)), -1)
        basis = [
            FunctionSpec.one(),
            FunctionSpec.rfun(2, (1, 1)),
            FunctionSpec.rfun(2, (1, 2)),
            FunctionSpec.rfun(2, (2, 2)),
            FunctionSpec.rfun(3, (1, 2, 2, 2, 2, 2)),
        ]
    else:
        if not args.target or not args.basis:
            raise ProgramError("need --target and --basis (or --delta)")
        target = _parse_spec(args.target)
        basis = [_parse_spec(p) for p in args.basis.split(";")]
    rel = find_relation(target, basis, exp)
    if args.format == "json":
        payload = {
            "kind": "relation",
            "version": __version__,
            "target": rel.target,
            "independent": rel.independent,
            "verified_through_weight": rel.verified_cap,
            "coefficients": [
                {"entry": s.render(), "lam": list(lm), "c": q_str(c)}
                for s, lm, c in rel.coefficients
            ],
        }
        print(json.dumps(payload, sort_keys=True))
    else:
        print(rel.render(curve))
    return 0


def cmd_selftest(args) -> int:
    from .abelfun import r_oracle
    checks = []

    t = TensorPoly.tensor_power("f", 2).apply_D(("i", "j")).symmetrize()
    checks.append(("double bilinear application", t.pretty() == "2*(f*f[i,j] - f[i]*f[j])"))
    t = TensorPoly.tensor_power("f", 3).apply_H(("i",)).symmetrize()
    checks.append(("single third-order application annihilates", t.is_zero()))
    t = TensorPoly.tensor_power("h", 3, kind="exp_linear").apply_H(("i", "j", "k")).symmetrize()
    checks.append(("exponential unit annihilates", t.is_zero()))
    rid = RFunctionId.make(2, ("i", "j", "k", "l"))
    checks.append(("4-index expansion matches its oracle", r_oracle(rid) == r_to_p(rid)))
    checks.append(("gap sequence (2,7)", CurveModel(2, 7).u_weights == (5, 3, 1)))
    checks.append(("gap sequence (3,4)", CurveModel(3, 4).u_weights == (5, 2, 1)))

    ok = True
    for name, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'}  {name}")
        ok = ok and passed
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="abelops",
        description="Exact shift-operator algebra and pole-bounded function bases "
                    "on cyclic plane curves.")
    p.add_argument("--version", action="version", version=f"abelops {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    p_ops = sub.add_parser("ops", help="evaluate an operator program")
    p_ops.add_argument("program", help='e.g. "S D[i] D[j] (f^x2)" or "S H[3,i1] H[3,i2] (sigma^x3)"')
    p_ops.set_defaults(func=cmd_ops)

    p_rf = sub.add_parser("rfun", help="expand an R-function into p-symbols")
    p_rf.add_argument("-m", "--order", type=int, required=True)
    p_rf.add_argument("-i", "--indices", required=True, help="comma list, e.g. i,j,k,l or 1,2,2")
    p_rf.add_argument("--define", action="store_true", help="also print the operator numerator")
    p_rf.add_argument("--format", choices=("text", "json"), default="text")
    p_rf.set_defaults(func=cmd_rfun)

    p_sig = sub.add_parser("sigma", help="solve and store a series expansion")
    p_sig.add_argument("--curve", required=True, help="n,s or a descriptor .json file")
    p_sig.add_argument("--depth", type=int, required=True, help="parameter weight depth")
    p_sig.add_argument("--out", help="output expansion file")
    p_sig.add_argument("--format", choices=("text", "json"), default="text")
    p_sig.set_defaults(func=cmd_sigma)

    p_bas = sub.add_parser("basis", help="build a pole-bounded basis")
    p_bas.add_argument("--pole", type=int, required=True)
    p_bas.add_argument("--sigma", required=True, help="stored expansion file")
    p_bas.add_argument("--out", help="write the report as json")
    p_bas.add_argument("--seed", type=int, default=DEFAULT_SEEDS[0])
    p_bas.add_argument("--budget-seconds", type=float, default=None)
    p_bas.add_argument("--threads", type=int, default=1,
                       help="worker hint; results are identical for any value")
    p_bas.add_argument("--format", choices=("text", "json"), default="text")
    p_bas.set_defaults(func=cmd_basis)

    p_rel = sub.add_parser("relation", help="express a target over basis entries")
    p_rel.add_argument("--sigma", required=True)
    p_rel.add_argument("--delta", action="store_true",
                       help="the classical genus-two pole-cancelling target")
    p_rel.add_argument("--target", help='e.g. "R[2]:2,2,2,2" or "d1 R[2]:2,2,2,2"')
    p_rel.add_argument("--basis", help='semicolon list, e.g. "1;R[2]:1,1;R[2]:1,2"')
    p_rel.add_argument("--format", choices=("text", "json"), default="text")
    p_rel.set_defaults(func=cmd_relation)

    p_st = sub.add_parser("selftest", help="run quick identity checks")
    p_st.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AbelopsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
