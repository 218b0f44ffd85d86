import pytest

from abelops._rat import QQ, Q0, Q1
from abelops.combinat import binomial
from abelops.curve import CurveModel
from abelops.errors import FormatError
from abelops.linalg import nullspace
from abelops.series import LambdaPoly, MultiSeries
from abelops.sigma import (
    SigmaExpansion,
    _Composites,
    _deriv_monomial,
    _u_monomials_of_weight,
    genus1_oracle,
    load_expansion,
    schur_weierstrass,
    solve_expansion,
    store_expansion,
)


# ---------------------------------------------------------------------------
# determinantal leading parts


def test_leading_part_genus1():
    assert schur_weierstrass(CurveModel(2, 3)) == {(1,): Q1}


def test_leading_part_genus2():
    got = schur_weierstrass(CurveModel(2, 5))
    assert got == {(1, 0): Q1, (0, 3): QQ(-1, 3)}


def test_leading_part_genus3_hyper():
    got = schur_weierstrass(CurveModel(2, 7))
    # weight 6, parity even, vanishing on two-point sums (checked in solver);
    # structural sanity here
    assert (0, 2, 0) in got and (1, 0, 1) in got and (0, 0, 6) in got
    w = CurveModel(2, 7).u_weights
    for ue, c in got.items():
        assert sum(a * b for a, b in zip(w, ue)) == 6
        assert sum(ue) % 2 == 0


def test_leading_part_genus3_trigonal():
    got = schur_weierstrass(CurveModel(3, 4))
    w = CurveModel(3, 4).u_weights
    for ue in got:
        assert sum(a * b for a, b in zip(w, ue)) == 5
        assert sum(ue) % 2 == 1
    assert (1, 0, 0) in got


# ---------------------------------------------------------------------------
# genus one


def test_oracle_flat_case():
    data = genus1_oracle(12)
    p0 = data.p_series.lam_zero_part()
    assert list(p0.terms) == [(-2,)]
    s0 = data.sigma_series.lam_zero_part()
    assert list(s0.terms) == [(1,)]


def test_oracle_classical_coefficients():
    data = genus1_oracle(12)
    # p = u^-2 + (g2/20) u^2 + (g3/28) u^4 + (g2^2/1200) u^6 + ...
    assert data.p_series.coeff((2,)) == LambdaPoly.mono((1, 0), QQ(1, 20))
    assert data.p_series.coeff((4,)) == LambdaPoly.mono((0, 1), QQ(1, 28))
    assert data.p_series.coeff((6,)) == LambdaPoly.mono((2, 0), QQ(1, 1200))
    # sigma = u - g2 u^5/240 - g3 u^7/840 - ...
    assert data.sigma_series.coeff((3,)) == LambdaPoly()
    assert data.sigma_series.coeff((5,)) == LambdaPoly.mono((1, 0), QQ(-1, 240))
    assert data.sigma_series.coeff((7,)) == LambdaPoly.mono((0, 1), QQ(-1, 840))


def test_oracle_log_derivative_identity():
    data = genus1_oracle(14)
    sigma = data.sigma_series
    u_inv_part = sigma.shift_exponent(-1)  # sigma / u, unit leading term
    one = MultiSeries.monomial(data.ring, (1,), (0,), Q1, u_inv_part.cap)
    log_tail = (u_inv_part - one).log1p()
    second = log_tail.derive(0).derive(0)
    # -(d^2/du^2) log sigma = u^-2 - (log(sigma/u))'' = p
    recon = MultiSeries.monomial(data.ring, (1,), (-2,), Q1, second.cap) - second
    assert recon.truncate(10) == data.p_series.truncate(10)


def test_oracle_cubic_identity():
    data = genus1_oracle(14)
    p = data.p_series
    dp = p.derive(0)
    lhs = dp * dp
    rhs = (p * p * p).scale(4) - p.scale(LambdaPoly.param(data.ring, 0)) \
        - MultiSeries.monomial(data.ring, (1,), (0,), LambdaPoly.param(data.ring, 1), p.cap)
    assert (lhs - rhs).truncate(6).is_zero()


def test_elliptic_model_matches_oracle():
    depth = 15
    exp = solve_expansion(CurveModel(2, 3), depth)
    data = genus1_oracle(depth + 1)
    # map oracle parameters into the model ring: the squared-gradient cubic
    # x^3 + l2 x^2 + l1 x + l0 matches x^3 - (g2/4) x - (g3/4) at l2 = 0
    curve_ring = CurveModel(2, 3).ring
    images = {0: LambdaPoly.param(curve_ring, 1, QQ(-4)),
              1: LambdaPoly.param(curve_ring, 0, QQ(-4))}
    mapped = {}
    for (k,), lp in data.sigma_series.truncate(1 + depth).terms.items():
        conv = lp.map_params(images)
        for lm, c in conv.terms.items():
            mapped[((k,), curve_ring.sparse(lm))] = c
    model_side = {
        key: c for key, c in exp.terms.items()
        if all(j != 2 for j, _e in key[1])  # drop l2-bearing terms
    }
    assert model_side == mapped


def test_genus1_expansion_invariants():
    exp = solve_expansion(CurveModel(2, 3), 10)
    assert exp.lam_zero_terms() == {(1,): Q1}
    exp.check_invariants()


# ---------------------------------------------------------------------------
# vanishing alone is underdetermined (design note for the pinned solver)


def test_vanishing_only_is_underdetermined_at_level_two():
    curve = CurveModel(2, 5)
    comp = _Composites(curve, 1, 12)
    cands = _u_monomials_of_weight(curve.u_weights, 5, 1)
    assert cands == [(0, 5), (1, 2)]
    # level-2 vanishing equations: coefficient of xi^5 paired with the single
    # weight -2 parameter monomial; plus the known level-0 contribution
    sw = schur_weierstrass(curve)
    rows = []
    # columns: parameter-free composites of the candidates at degree 5
    cols = [comp.compose0(ue) for ue in cands]
    row = [col.coeff((5,)).constant_part() for col in cols]
    rows.append(row)
    null = nullspace(rows, len(cands))
    assert len(null) == 1  # one equation, two unknowns: a free direction


# ---------------------------------------------------------------------------
# genus two, pinned


@pytest.fixture(scope="module")
def exp25():
    return solve_expansion(CurveModel(2, 5), 10)


def test_genus2_leading_and_uniqueness(exp25):
    assert exp25.lam_zero_terms() == {(1, 0): Q1, (0, 3): QQ(-1, 3)}
    assert all(v == 0 for v in exp25.meta["nullity_by_level"].values())


def test_genus2_levels_are_even(exp25):
    ring = exp25.curve.ring
    for (_ue, lm) in exp25.terms:
        assert (-ring.mono_weight(lm)) % 2 == 0


def test_genus2_revanishing(exp25):
    # substitute the one-point series back in, beyond the solve's own slices
    comp = _Composites(exp25.curve, 1, exp25.u_cap())
    acc = MultiSeries.zero(exp25.curve.ring, (1,), exp25.u_cap(), 3)
    for (ue, lm), c in exp25.terms.items():
        acc = acc + comp.compose(ue).scale(LambdaPoly.mono(exp25.curve.ring.dense(lm), c))
    assert acc.truncate(exp25.u_cap()).is_zero()


def test_genus2_known_level2_coefficients(exp25):
    # the level-2 correction is -l4 u2^5 / 15: the hand-derived one-point
    # vanishing relation C/3 + D = -1/15 on the two candidate coefficients
    # (C for u1 u2^2, D for u2^5) holds, and the biform pin selects C = 0;
    # the curve-point identities below verify the choice independently
    l4 = ((4, 1),)
    C = exp25.terms.get(((1, 2), l4), Q0)
    D = exp25.terms.get(((0, 5), l4), Q0)
    assert C / 3 + D == QQ(-1, 15)
    assert C == 0 and D == QQ(-1, 15)


def _composite_derivative(curve, exp, comp, deriv):
    acc = MultiSeries.zero(curve.ring, (1,) * comp.nv, exp.u_cap() - sum(
        curve.u_weights[v] for v in deriv), 0)
    for (ue, lm), c in exp.terms.items():
        r = _deriv_monomial(ue, deriv)
        if r is None:
            continue
        coeff, e = r
        acc = acc + comp.compose(e).scale(LambdaPoly.mono(curve.ring.dense(lm), coeff * c))
    return acc


def test_genus2_curve_point_identities(exp25):
    """Jacobi-style inversion checks at the two-point sum.

    x^2 - pp22 x - pp12 vanishes at both curve points, and
    pp222 x + pp122 - 2y vanishes too (cleared by sigma powers).
    """
    curve = exp25.curve
    comp = _Composites(curve, 2, exp25.u_cap())
    C = _composite_derivative(curve, exp25, comp, ())
    C1 = _composite_derivative(curve, exp25, comp, (0,))
    C2 = _composite_derivative(curve, exp25, comp, (1,))
    C11 = _composite_derivative(curve, exp25, comp, (0, 0))
    C12 = _composite_derivative(curve, exp25, comp, (0, 1))
    C22 = _composite_derivative(curve, exp25, comp, (1, 1))
    pp22 = C2 * C2 - C * C22   # pp_22 sigma^2
    pp12 = C1 * C2 - C * C12

    ring = curve.ring
    y1 = curve.y_series(exp25.u_cap() + 25)
    for point in (0, 1):
        def emb(one_var):
            out = MultiSeries.zero(ring, (1, 1), one_var.cap, one_var.low)
            for (k,), cc in one_var.terms.items():
                out._add_term((k, 0) if point == 0 else (0, k), cc)
            return out

        x = MultiSeries.monomial(ring, (1, 1), (-2, 0) if point == 0 else (0, -2), Q1, 10 ** 9)
        res = x * x * C * C - pp22 * x - pp12
        assert res.truncate(2).is_zero(), f"quadratic inversion fails at point {point}"

        C222 = _composite_derivative(curve, exp25, comp, (1, 1, 1))
        C112 = _composite_derivative(curve, exp25, comp, (0, 1, 1))
        # pp_ijk sigma^3 = -(s_ijk s^2 - (s_ij s_k + s_ik s_j + s_jk s_i) s + 2 s_i s_j s_k)
        pp222 = (C222 * C * C - (C22 * C2).scale(3) * C + (C2 * C2 * C2).scale(2)).scale(-1)
        pp122 = (C112 * C * C - (C22 * C1 + C12 * C2 + C12 * C2) * C
                 + (C1 * C2 * C2).scale(2)).scale(-1)
        y = emb(y1)
        res3 = pp222 * x + pp122 - (y * C * C * C).scale(2)
        assert res3.truncate(0).is_zero(), f"gradient inversion fails at point {point}"


def test_genus2_determinism(exp25):
    again = solve_expansion(CurveModel(2, 5), 10)
    assert again.terms == exp25.terms
    assert again.to_text() == exp25.to_text()


def test_persistence_roundtrip(tmp_path, exp25):
    path = tmp_path / "e25.sig"
    store_expansion(exp25, str(path))
    back = load_expansion(str(path))
    assert back.terms == exp25.terms
    assert back.depth == exp25.depth
    store_expansion(back, str(path) + ".2")
    assert open(str(path)).read() == open(str(path) + ".2").read()


def test_load_rejects_corruption(tmp_path, exp25):
    path = tmp_path / "e.sig"
    store_expansion(exp25, str(path))
    text = open(path).read()
    with pytest.raises(FormatError):
        SigmaExpansion.from_text(text.replace('"c":"1"', '"c":"2"', 1))
    with pytest.raises(FormatError):
        SigmaExpansion.from_text("{}")


def test_load_rejects_inhomogeneous_term(exp25):
    import json
    payload = exp25.payload()
    payload["terms"][0]["u"] = [9, 9]
    import hashlib
    body = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    payload["checksum"] = hashlib.sha256(body.encode()).hexdigest()
    with pytest.raises(FormatError):
        SigmaExpansion.from_text(json.dumps(payload, sort_keys=True, separators=(",", ":")))


def test_derivative_series_commutes(exp25):
    a = exp25.derivative_series((1, 2))
    b = exp25.derivative_series((2, 1))
    assert a == b
    assert exp25.derivative_series(()) == exp25.as_series()


def test_derivative_series_weight_audit(exp25):
    W = exp25.weight
    for deriv in [(1,), (2,), (1, 2), (2, 2)]:
        drop = sum(exp25.curve.u_weights[i - 1] for i in deriv)
        s = exp25.derivative_series(deriv)
        s.assert_homogeneous(W - drop)


# ---------------------------------------------------------------------------
# genus three


@pytest.fixture(scope="module")
def exp27():
    return solve_expansion(CurveModel(2, 7), 4)


@pytest.fixture(scope="module")
def exp34():
    return solve_expansion(CurveModel(3, 4), 6)


def test_genus3_hyper_solves_and_is_unique(exp27):
    assert all(v == 0 for v in exp27.meta["nullity_by_level"].values())
    assert exp27.meta["pin"] == "classical-biform"
    assert exp27.lam_zero_terms() == schur_weierstrass(exp27.curve)


def test_genus3_hyper_revanishing(exp27):
    comp = _Composites(exp27.curve, 2, exp27.u_cap())
    acc = MultiSeries.zero(exp27.curve.ring, (1, 1), exp27.u_cap(), exp27.weight)
    for (ue, lm), c in exp27.terms.items():
        acc = acc + comp.compose(ue).scale(LambdaPoly.mono(exp27.curve.ring.dense(lm), c))
    assert acc.truncate(exp27.u_cap()).is_zero()


def test_genus3_trigonal_solves(exp34):
    assert exp34.meta["pin"] == "reconstructed-biform"
    assert exp34.lam_zero_terms() == schur_weierstrass(exp34.curve)
    # gauge freedom appears exactly where quadratic-exponential directions
    # exist: parameter weight -3 (one) and -6 (two)
    nul = exp34.meta["nullity_by_level"]
    assert nul.get("3", 0) == 1
    assert nul.get("6", 0) == 2
    assert nul.get("0", 0) == 0


def test_genus3_trigonal_levels_multiples_of_three(exp34):
    ring = exp34.curve.ring
    for (_ue, lm) in exp34.terms:
        assert (-ring.mono_weight(lm)) % 3 == 0
