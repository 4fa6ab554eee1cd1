"""Catalog entries, automorphism families, isomorphism rules, verification."""

from fractions import Fraction

import pytest

from liefix.catalog import (
    family_automorphism,
    get_algebra,
    iso_predicate,
    verification_samples,
    verify_catalog,
    verify_entry,
)
from liefix.cyclofield import scalar, zeta
from liefix.errors import BadParameters, UnknownName
from liefix.exactlinalg import FieldMatrix
from liefix.liealg import check_automorphism, unimodularity_report
from liefix.routing import decide_fpf_any

W = zeta(3)
W2 = W * W


def coords(vec):
    return [v.as_fraction() if v.is_rational() else v for v in vec]


# ---------------------------------------------------------------------------
# lookup and parameter validation


def test_unknown_name():
    with pytest.raises(UnknownName):
        get_algebra("borel7")


def test_parameter_validation():
    with pytest.raises(BadParameters):
        get_algebra("Qn", n=5)  # odd dimension has no such algebra
    with pytest.raises(BadParameters):
        get_algebra("Ln", n=2)
    with pytest.raises(BadParameters):
        get_algebra("C^n", n=0)
    with pytest.raises(BadParameters):
        get_algebra("r3lam", lam=0)
    with pytest.raises(BadParameters):
        get_algebra("ex210", alpha=0)
    with pytest.raises(BadParameters):
        get_algebra("g7")  # missing alpha
    with pytest.raises(BadParameters):
        get_algebra("n3", n=3)  # n3 takes no parameters
    with pytest.raises(BadParameters):
        get_algebra("g7", alpha="x")


def test_r3lam_brackets():
    g = get_algebra("r3lam", lam=-1).algebra
    assert coords(g.table[0][1]) == [0, 1, 0]
    assert coords(g.table[0][2]) == [0, 0, -1]
    assert all(v.is_zero() for v in g.table[1][2])


def test_g10_brackets():
    g = get_algebra("g10", alpha=-1).algebra
    assert coords(g.table[0][1]) == [0, 1, 0, 0]
    assert coords(g.table[0][2]) == [0, 1, -1, 0]
    assert all(v.is_zero() for v in g.table[0][3])  # alpha + 1 = 0
    assert coords(g.table[1][2]) == [0, 0, 0, 1]


def test_qn_bracket_signs():
    g = get_algebra("Qn", n=6).algebra
    assert coords(g.table[1][4]) == [0, 0, 0, 0, 0, 1]   # [e2,e5] = e6
    assert coords(g.table[2][3]) == [0, 0, 0, 0, 0, -1]  # [e3,e4] = -e6
    q4 = get_algebra("Qn", n=4).algebra
    assert coords(q4.table[1][2]) == [0, 0, 0, 1]        # [e2,e3] = e4


def test_aliases_resolve_to_same_structure():
    assert get_algebra("g0").algebra.dim == 4
    assert get_algebra("g0").algebra.is_abelian()
    assert get_algebra("n4").algebra.table == get_algebra("g2").algebra.table
    assert get_algebra("n3+C").algebra.table == get_algebra("g1").algebra.table


# ---------------------------------------------------------------------------
# the printed automorphism families


def test_n4_family_matches_diagonal():
    z = zeta(5)
    phi = family_automorphism("n4", s=z, t=z)
    assert phi == FieldMatrix.diagonal([z, z, z * z, z * z * z])
    assert family_automorphism("n4", n=5) == phi
    rep = check_automorphism(get_algebra("g2").algebra, phi)
    assert rep.is_morphism and rep.is_fpf and rep.order == 5


def test_g10_family_printed_entries():
    z = zeta(3)
    phi = family_automorphism("g10m1", m=3)
    zero = scalar(0, 3)
    expected = FieldMatrix([
        [scalar(-1, 3), zero, zero, zero],
        [zero, z, zero, zero],
        [zero, scalar(-2) * z, -z, zero],
        [zero, zero, zero, -(z * z)],
    ])
    assert phi == expected
    rep = check_automorphism(get_algebra("g10", alpha=-1).algebra, phi)
    assert rep.is_morphism and rep.is_fpf and rep.order == 6


def test_r3_family_printed_entries():
    phi = family_automorphism("r3m1", m=2)
    assert phi == FieldMatrix([[-1, 0, 0], [0, 0, -1], [0, 1, 0]])
    rep = check_automorphism(get_algebra("r3lam", lam=-1).algebra, phi)
    assert rep.is_morphism and rep.is_fpf and rep.order == 4


def test_heisenberg_family_orders():
    g = get_algebra("n3").algebra
    for n in (3, 4, 5):
        rep = check_automorphism(g, family_automorphism("n3", n=n))
        assert rep.is_morphism and rep.is_fpf and rep.order == n


def test_g9_family_order():
    g = get_algebra("g9", alpha=W, beta=W2).algebra
    rep = check_automorphism(g, family_automorphism("g9w", m=2))
    assert rep.is_morphism and rep.is_fpf and rep.order == 6


def test_g10_family_degenerates_at_four():
    g = get_algebra("g10", alpha=-1).algebra
    rep = check_automorphism(g, family_automorphism("g10m1", m=2))
    assert rep.is_morphism
    assert rep.det_phi_minus_id.is_zero()
    assert not rep.is_fpf


def test_family_errors():
    with pytest.raises(UnknownName):
        family_automorphism("weyl")
    with pytest.raises(BadParameters):
        family_automorphism("r3m1", m=0)
    with pytest.raises(BadParameters):
        family_automorphism("n3", n=4, extra=1)


# ---------------------------------------------------------------------------
# tables and one-off examples


def test_dim3_table_strong_unimodularity():
    rows = [
        ("C^n", dict(n=3), True),
        ("n3", {}, True),
        ("r2+C", {}, False),
        ("r3", {}, False),
        ("r3lam", dict(lam=2), False),
        ("sl2", {}, False),
    ]
    for name, params, expected in rows:
        g = get_algebra(name, **params).algebra
        assert unimodularity_report(g).strongly_unimodular == expected, name
    assert unimodularity_report(
        get_algebra("r3lam", lam=-1).algebra).strongly_unimodular


def test_g7_sweep():
    for a in (-2, -1, 1, 3):
        entry = get_algebra("g7", alpha=a)
        rep = unimodularity_report(entry.algebra)
        assert rep.strongly_unimodular == (a == -2)
        assert rep.unimodular == (a == -2)
    decision = decide_fpf_any(get_algebra("g7", alpha=-2).algebra)
    assert decision.verdict == "No"


def test_traceless_g9_family():
    # strongly unimodular across the whole slice, yet fixed-point-free
    # automorphisms exist only at the primitive cube roots
    for a in (W, W2, scalar(2), scalar(-3), scalar(Fraction(1, 2))):
        entry = get_algebra("g9", alpha=a, beta=-(a + scalar(1)))
        rep = unimodularity_report(entry.algebra)
        assert rep.strongly_unimodular
        decision = decide_fpf_any(entry.algebra)
        is_cube_root = (a * a + a + scalar(1)).is_zero()
        assert (decision.verdict == "Yes") == is_cube_root, a.format()


def test_ex210_flags_and_trace_table():
    entry = get_algebra("ex210", alpha=1)
    rep = unimodularity_report(entry.algebra)
    assert rep.unimodular and not rep.strongly_unimodular
    offending = [row for row in rep.table
                 if row["x"] == 5 and row["space"] == "n^1/n^2"]
    assert offending and offending[0]["trace"] != "0"
    assert offending[0]["trace"] == "2"


def test_g9_alias():
    assert get_algebra("g9", alpha=-1, beta=0).alias == "r3lam(-1)+C"
    assert get_algebra("g9", alpha=W, beta=W2).alias is None
    assert get_algebra("g9", alpha=-1, beta=0).expected.fpf_exists is True


# ---------------------------------------------------------------------------
# isomorphism rules


def test_iso_g10():
    assert iso_predicate("g10", 2, Fraction(1, 2)).witness_relation == \
        "product-one"
    assert iso_predicate("g10", 2, 2).witness_relation == "equal"
    assert not iso_predicate("g10", 2, 3).related


def test_iso_g9():
    res = iso_predicate("g9", (W, W2), (W2, W))
    assert res.related and res.witness_relation == "swap"
    assert iso_predicate("g9", (2, 3),
                         (Fraction(1, 2), Fraction(3, 2))).related
    assert not iso_predicate("g9", (2, 3), (2, 4)).related


def test_iso_r3lam():
    assert not iso_predicate("r3lam", 2, 3).related
    assert iso_predicate("r3lam", 2, Fraction(1, 2)).related
    with pytest.raises(BadParameters):
        iso_predicate("r3lam", 0, 2)
    with pytest.raises(UnknownName):
        iso_predicate("g7", 1, 1)


def test_iso_g9_zero_rejected():
    with pytest.raises(BadParameters):
        iso_predicate("g9", (0, 1), (1, 1))


def test_iso_symmetric_and_reflexive():
    g9_pairs = [(scalar(2), scalar(3)), (W, W2),
                (scalar(Fraction(1, 2)), scalar(-3)), (W, scalar(1))]
    for p in g9_pairs:
        assert iso_predicate("g9", p, p).related
        for q in g9_pairs:
            assert iso_predicate("g9", p, q).related == \
                iso_predicate("g9", q, p).related
    singles = [scalar(2), scalar(-1), W, scalar(Fraction(1, 2))]
    for name in ("g10", "r3lam"):
        for p in singles:
            assert iso_predicate(name, p, p).related
            for q in singles:
                assert iso_predicate(name, p, q).related == \
                    iso_predicate(name, q, p).related


# ---------------------------------------------------------------------------
# engine replay


def test_expected_table_is_internally_consistent():
    # any entry expected to admit a fixed-point-free automorphism must be
    # expected strongly unimodular as well
    for entry, _ in verification_samples():
        if entry.expected.fpf_exists is True:
            assert entry.expected.strongly_unimodular is True, entry.label
            assert entry.expected.solvable is True, entry.label


def test_verify_entry_respects_fpf_flag():
    entry = get_algebra("g9", alpha=1, beta=1)
    rep = verify_entry(entry, check_fpf=False)
    assert all(not c.check.startswith("fpf") for c in rep.checks)
    assert rep.passed


def test_verify_dim3_scope():
    report = verify_catalog(dim=3)
    assert report.passed
    assert len(report.entries) == 10
    assert all(e.dim == 3 for e in report.entries)


def test_verify_full_catalog():
    report = verify_catalog()
    assert report.passed, report.to_json()["failed"]
    assert len(report.entries) == 127
    doc = report.to_json()
    assert doc["passed"] is True and doc["failed"] == []
