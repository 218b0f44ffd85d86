import itertools
import random

import pytest

from abelops._rat import QQ
from abelops.cyclo import Cyclo
from abelops.hirota import (
    DiffPoly,
    TensorPoly,
    closed_form_D,
    closed_form_H,
    closed_form_SH,
    h_power_monomial,
    hirota_D,
    hirota_H,
    lattice_shift,
    leibniz_D,
    leibniz_H,
    mono_str,
    sym,
    symmetrize,
)

LABELS = ["i1", "i2", "i3", "i4", "i5", "i6", "i7", "i8"]


def tensor_f(m):
    return TensorPoly.tensor_power("f", m)


def test_single_D_on_pair():
    t = TensorPoly.from_slots(("f", "g"))
    got = t.hirota_D("i")
    expected = TensorPoly(2)
    expected._add_term(((sym("f", ("i",)),), (sym("g"),)), Cyclo.one(2))
    expected._add_term(((sym("f"),), (sym("g", ("i",)),)), Cyclo.from_rational(2, -1))
    assert got == expected


def test_slot_derive_sorts_indices():
    t = TensorPoly.from_slots(("f", "g"))
    got = t.slot_derive(1, "j").slot_derive(1, "i")
    (key,) = got.terms
    assert key[0] == (("f", "f", ("i", "j")),)


def test_slot_derive_out_of_range():
    with pytest.raises(ValueError):
        tensor_f(3).slot_derive(4, "i")


def test_exp_linear_derivative_keeps_unit_inside():
    t = TensorPoly.tensor_power("h", 2, kind="exp_linear")
    got = t.slot_derive(1, "i")
    (key,) = got.terms
    assert key[0] == (("h", "h"), ("L", "h", "i"))
    assert key[1] == (("h", "h"),)


def test_double_D_symmetrizes_to_classic_form():
    got = tensor_f(2).apply_D(("i", "j")).symmetrize()
    expected = DiffPoly(2)
    expected._add_term((sym("f"), sym("f", ("i", "j"))), Cyclo.from_rational(2, 2))
    expected._add_term((sym("f", ("i",)), sym("f", ("j",))), Cyclo.from_rational(2, -2))
    assert got == expected
    assert got.pretty() == "2*(f*f[i,j] - f[i]*f[j])"


def test_D_operators_commute():
    t = TensorPoly.from_slots(("f", "g"))
    assert t.apply_D(("i", "j")) == t.apply_D(("j", "i"))


def test_H_operators_commute():
    for m in (3, 4):
        t = TensorPoly.tensor_power("f", m)
        a = t.apply_H(("i1", "i2"))
        b = t.apply_H(("i2", "i1"))
        assert a == b


def test_slot_derive_commutes():
    t = tensor_f(3)
    a = t.slot_derive(1, "i").slot_derive(2, "j")
    b = t.slot_derive(2, "j").slot_derive(1, "i")
    assert a == b


def test_H2_equals_D():
    t = TensorPoly.from_slots(("f", "g"))
    assert t.hirota_H("i") == t.hirota_D("i")


def test_single_H3_term_structure():
    got = tensor_f(3).hirota_H("i1")
    assert len(got.terms) == 3
    for key, coeff in got.terms.items():
        j = [k for k, slot in enumerate(key) if slot[0][2]][0]
        assert coeff == Cyclo.zeta_pow(3, j)


def test_worked_nine_term_example():
    """Two third-order applications: nine tensor terms with prescribed powers."""
    got = tensor_f(3).apply_H(("i1", "i2"))
    assert len(got.terms) == 9

    def slotkey(*slots):
        return tuple((sym("f", J),) for J in slots)

    z = lambda k: Cyclo.zeta_pow(3, k)
    expected = {
        slotkey(("i1", "i2"), (), ()): z(0),
        slotkey((), ("i1", "i2"), ()): z(2),
        slotkey((), (), ("i1", "i2")): z(4),
        slotkey(("i1",), ("i2",), ()): z(1),
        slotkey(("i2",), ("i1",), ()): z(1),
        slotkey(("i1",), (), ("i2",)): z(2),
        slotkey(("i2",), (), ("i1",)): z(2),
        slotkey((), ("i1",), ("i2",)): z(3),
        slotkey((), ("i2",), ("i1",)): z(3),
    }
    assert got.terms == expected
    assert got.symmetrize().is_zero()


def test_single_H_symmetrizes_to_zero():
    for m in (2, 3, 4, 5):
        assert TensorPoly.tensor_power("f", m).hirota_H("i").symmetrize().is_zero()


def test_closed_form_D_single():
    got = closed_form_D(("i1",))
    expected = TensorPoly(2)
    expected._add_term(((sym("f", ("i1",)),), (sym("g"),)), Cyclo.one(2))
    expected._add_term(((sym("f"),), (sym("g", ("i1",)),)), Cyclo.from_rational(2, -1))
    assert got == expected


def test_closed_form_D_matches_iterated():
    for n in range(1, 7):
        labels = LABELS[:n]
        direct = TensorPoly.from_slots(("f", "g")).apply_D(labels)
        assert closed_form_D(labels) == direct
    # same-function case
    for n in range(1, 7):
        labels = LABELS[:n]
        direct = tensor_f(2).apply_D(labels)
        assert closed_form_D(labels, "f", "f") == direct


def test_closed_form_H_matches_iterated():
    for m in (2, 3, 4):
        for n in range(1, 7 - m + 1):
            labels = LABELS[:n]
            names = tuple(f"f{k+1}" for k in range(m))
            direct = TensorPoly.from_slots(names).apply_H(labels)
            assert closed_form_H(labels, m) == direct


def test_closed_form_H_m2_matches_closed_form_D():
    for n in range(1, 7):
        labels = LABELS[:n]
        assert closed_form_H(labels, 2, ("f", "g")) == closed_form_D(labels)


def test_closed_form_H_repeated_labels():
    labels = ("i", "i", "j")
    direct = tensor_f(3).apply_H(labels)
    assert closed_form_H(labels, 3, ("f", "f", "f")) == direct


def test_odd_D_power_annihilates():
    for n in (1, 3, 5, 7):
        got = tensor_f(2).apply_D(LABELS[:n]).symmetrize()
        assert got.is_zero(), n


def test_even_D_power_survives():
    for n in (2, 4, 6):
        got = tensor_f(2).apply_D(LABELS[:n]).symmetrize()
        assert not got.is_zero(), n


def test_SH_zero_iff_m_divides_n():
    for m in (2, 3, 4):
        for n in range(1, 9):
            got = TensorPoly.tensor_power("f", m).apply_H(LABELS[:n]).symmetrize()
            if n % m == 0:
                assert not got.is_zero(), (m, n)
            else:
                assert got.is_zero(), (m, n)


def test_closed_form_SH_matches_iterated():
    for m in (2, 3, 4):
        for n in range(1, 7):
            labels = LABELS[:n]
            direct = TensorPoly.tensor_power("f", m).apply_H(labels).symmetrize()
            assert closed_form_SH(labels, m) == direct, (m, n)


def test_closed_form_SH_contains_full_index_block():
    for m, n in [(2, 2), (2, 4), (3, 3), (3, 6), (4, 4)]:
        labels = LABELS[:n]
        got = closed_form_SH(labels, m)
        full = tuple(sorted([sym("f", labels)] + [sym("f")] * (m - 1), key=lambda a: (a[1], len(a[2]))))
        # the monomial f_{i1..in} * f^(m-1) appears with coefficient m
        mono = tuple(sorted([sym("f", labels)] + [sym("f")] * (m - 1), key=lambda a: (len(a[2]),)))
        found = [c for k, c in got.terms.items() if sym("f", tuple(labels)) in k]
        assert found and all(c.rational() == m for c in found)


def test_SH_common_factor_m():
    from math import gcd
    for m in (2, 3, 4):
        for n in range(m, 9, m):
            got = closed_form_SH(LABELS[:n], m)
            values = [int(c.rational().numerator) for c in got.terms.values()]
            assert values
            g = 0
            for v in values:
                g = gcd(g, abs(v))
            assert g % m == 0, (m, n, g)


def test_h_annihilation_D():
    t = TensorPoly.tensor_power("h", 2, kind="exp_linear")
    for n in range(1, 7):
        assert t.apply_D(LABELS[:n]).symmetrize().is_zero(), n


def test_h_annihilation_H():
    for m in (2, 3, 4):
        t = TensorPoly.tensor_power("h", m, kind="exp_linear")
        for n in range(1, 7):
            assert t.apply_H(LABELS[:n]).symmetrize().is_zero(), (m, n)


def test_leibniz_single_step():
    t1 = TensorPoly.from_slots(("a", "b"))
    t2 = TensorPoly.from_slots(("c", "d"))
    lhs = (t1 * t2).hirota_D("i")
    rhs = t1 * t2.hirota_D("i") + t2 * t1.hirota_D("i")
    assert lhs == rhs
    got = leibniz_D(("i",), t1, t2)
    assert got == lhs


def test_leibniz_D_general():
    t1 = TensorPoly.from_slots(("a", "b"))
    t2 = TensorPoly.from_slots(("c", "d"))
    for n in range(1, 5):
        labels = LABELS[:n]
        assert leibniz_D(labels, t1, t2) == (t1 * t2).apply_D(labels)


def test_leibniz_H_general():
    for m in (2, 3):
        t1 = TensorPoly.tensor_power("f", m)
        t2 = TensorPoly.tensor_power("g", m)
        for n in range(1, 4):
            labels = LABELS[:n]
            assert leibniz_H(labels, m, t1, t2) == (t1 * t2).apply_H(labels)


def test_leibniz_with_unit_factor():
    m = 3
    t1 = TensorPoly.tensor_power("f", m)
    unit = TensorPoly.one(m)
    labels = ("i1", "i2")
    assert leibniz_H(labels, m, t1, unit) == t1.apply_H(labels)


def test_operator_slot_mismatch_rejected():
    with pytest.raises(ValueError):
        hirota_H("i", 3, tensor_f(2))
    with pytest.raises(ValueError):
        tensor_f(3).hirota_D("i")
    with pytest.raises(ValueError):
        leibniz_H(("i",), 3, tensor_f(3), tensor_f(2))


def test_lattice_shift_on_plain_symbols():
    sigma = DiffPoly.from_monomial(2, [sym("sigma")])
    got = lattice_shift(sigma)
    assert got == DiffPoly.from_monomial(2, [("h", "h"), sym("sigma")])

    sigma_i = DiffPoly.from_monomial(2, [sym("sigma", ("i",))])
    got = lattice_shift(sigma_i)
    expected = DiffPoly.from_monomial(2, [("h", "h"), sym("sigma", ("i",))]) + DiffPoly.from_monomial(
        2, [("h", "h"), sym("sigma"), ("L", "h", "i")]
    )
    assert got == expected


def test_lattice_shift_repeated_index_multiplicity():
    got = lattice_shift(DiffPoly.from_monomial(2, [sym("sigma", ("i", "i"))]))
    # subsets of the two positions: {}, {1}, {2}, {1,2} -> multiplicity 2 in the middle
    mid = ("L", "h", "i")
    expected = (
        DiffPoly.from_monomial(2, [("h", "h"), sym("sigma", ("i", "i"))])
        + DiffPoly.from_monomial(2, [("h", "h"), sym("sigma", ("i",)), mid], 2)
        + DiffPoly.from_monomial(2, [("h", "h"), sym("sigma"), mid, mid])
    )
    assert got == expected


def test_lattice_shift_commutes_with_symmetrize():
    rng = random.Random(7)
    for _ in range(5):
        t = TensorPoly.tensor_power("sigma", 3)
        labels = [rng.choice(["i", "j", "k"]) for _ in range(3)]
        t = t.apply_H(labels)
        assert lattice_shift(t.symmetrize()) == lattice_shift(t).symmetrize()


def test_lattice_shift_commutes_with_operators():
    t = TensorPoly.tensor_power("sigma", 3)
    for labels in [("i",), ("i", "j")]:
        a = lattice_shift(t.apply_H(labels))
        b = lattice_shift(t).apply_H(labels)
        assert a == b
    t2 = TensorPoly.tensor_power("sigma", 2)
    a = lattice_shift(t2.apply_D(("i", "j")))
    b = lattice_shift(t2).apply_D(("i", "j"))
    assert a == b


def test_lattice_shift_rejects_exp_symbols():
    bad = DiffPoly.from_monomial(2, [("e", "phi")])
    with pytest.raises(ValueError):
        lattice_shift(bad)


def test_shifted_D_numerator_factors_h_squared():
    num = tensor_f(2).apply_D(("i", "j")).symmetrize()
    num = DiffPoly(2, {tuple(("f", "sigma", a[2]) for a in k): c for k, c in num.terms.items()})
    shifted = lattice_shift(num)
    expected = num.mul_monomial(h_power_monomial(2))
    assert shifted == expected


def test_mono_str_powers():
    mono = (sym("f"), sym("f"), sym("f", ("i",)))
    assert mono_str(tuple(sorted(mono, key=lambda a: (len(a[2]),)))) == "f^2*f[i]"


def test_pretty_tensor():
    t = TensorPoly.from_slots(("f", "g")).hirota_D("i")
    assert t.pretty() == "f[i]⊗g - f⊗g[i]"
