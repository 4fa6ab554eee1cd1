"""Tests for the almost abelian decision engine."""

from fractions import Fraction

import pytest

from liefix.almostabelian import (
    build_witness,
    cyclic_companion_transform,
    cyclotomic_report,
    decide_fpf,
    detect_presentation,
    is_n_cyclotomic,
    _scaled_intertwiner,
)
from liefix.cyclofield import scalar, zeta
from liefix.errors import (
    NotAlmostAbelian,
    PreconditionViolated,
    SearchIncomplete,
    SingularMatrix,
)
from liefix.exactlinalg import FieldMatrix, are_similar
from liefix.liealg import LieAlgebra, check_automorphism


# ---------------------------------------------------------------------------
# builders

def abelian(n):
    return LieAlgebra(n, {})


def affine_line():
    # [e1, e2] = e1
    return LieAlgebra(2, {(0, 1): {0: 1}})


def heisenberg():
    # [e1, e2] = e3
    return LieAlgebra(3, {(0, 1): {2: 1}})


def heisenberg5():
    # [e1, e2] = e5, [e3, e4] = e5
    return LieAlgebra(5, {(0, 1): {4: 1}, (2, 3): {4: 1}})


def diag_solvable(lam):
    # [e1, e2] = e2, [e1, e3] = lam*e3
    return LieAlgebra(3, {(0, 1): {1: 1}, (0, 2): {2: lam}})


def weighted_heisenberg():
    # heisenberg on {e2,e3,e4} with a grading element e1
    return LieAlgebra(4, {(0, 1): {1: 1}, (0, 2): {2: 1}, (0, 3): {3: 2},
                          (1, 2): {3: 1}})


def sl2():
    return LieAlgebra(3, {(0, 1): {2: 1}, (0, 2): {0: -2}, (1, 2): {1: 2}})


def filiform4():
    # [e1, e2] = e3, [e1, e3] = e4
    return LieAlgebra(4, {(0, 1): {2: 1}, (0, 2): {3: 1}})


def spectrum_solvable(*lams):
    # [e1, e_{i+1}] = lam_i * e_{i+1}
    return LieAlgebra(1 + len(lams),
                      {(0, i + 1): {i + 1: lam} for i, lam in enumerate(lams)})


def s(x):
    return scalar(x)


# ---------------------------------------------------------------------------
# presentation detection

def test_detect_affine_line():
    p = detect_presentation(affine_line())
    assert p.abelian_ideal.dim == 1
    assert p.abelian_ideal.contains((s(1), s(0)))
    assert p.v == (s(0), s(1))
    # [e2, e1] = -e1
    assert p.action == FieldMatrix([[-1]])


def test_detect_diagonal_action():
    p = detect_presentation(diag_solvable(2))
    assert p.abelian_ideal.dim == 2
    assert p.v == (s(1), s(0), s(0))
    assert p.action == FieldMatrix.diagonal([1, 2])


def test_detect_heisenberg_hyperplane():
    g = heisenberg()
    p = detect_presentation(g)
    assert p.abelian_ideal.dim == 2
    assert p.abelian_ideal.contains(g.basis_vector(2))  # contains [g,g]
    assert g.subspace_bracket(p.abelian_ideal, p.abelian_ideal).is_zero()
    # the action of the complementary line is nilpotent
    assert p.action.char_poly().format() == "t^2"


def test_detect_filiform_is_almost_abelian():
    p = detect_presentation(filiform4())
    assert p.abelian_ideal.dim == 3
    assert p.action.char_poly().format() == "t^3"


def test_detect_rejects_abelian():
    with pytest.raises(NotAlmostAbelian):
        detect_presentation(abelian(3))


def test_detect_rejects_nonsolvable():
    with pytest.raises(NotAlmostAbelian):
        detect_presentation(sl2())


def test_detect_rejects_nonabelian_nilradical():
    with pytest.raises(NotAlmostAbelian):
        detect_presentation(weighted_heisenberg())


def test_detect_heisenberg5_search_incomplete():
    # every hyperplane containing the derived line meets a symplectic pair,
    # so the search must come back empty-handed rather than claim a negative
    with pytest.raises(SearchIncomplete):
        detect_presentation(heisenberg5())


# ---------------------------------------------------------------------------
# the n-cyclotomic test

def test_cyclotomic_diag_pair():
    ok, cert = is_n_cyclotomic(FieldMatrix.diagonal([1, -1]), 2)
    assert ok
    assert cert["n"] == 2
    assert cert["invariant_factors"] == cert["scaled_invariant_factors"]


def test_cyclotomic_cube_roots():
    w = zeta(3)
    a = FieldMatrix.diagonal([scalar(1, 3), w, w * w])
    ok, _ = is_n_cyclotomic(a, 3)
    assert ok


def test_cyclotomic_rejects_nonzero_trace():
    assert is_n_cyclotomic(FieldMatrix.diagonal([1, 1]), 2) == (False, None)


def test_cyclotomic_rejects_bad_size():
    assert is_n_cyclotomic(FieldMatrix.diagonal([1, -1, 2]), 2) == (False, None)


def test_cyclotomic_charpoly_support_filter():
    # zero trace but coefficient support off the allowed residue class
    a = FieldMatrix.diagonal([1, 2, -3])
    assert is_n_cyclotomic(a, 3) == (False, None)


def test_cyclotomic_singular_jordan_multiplicities():
    shift2 = FieldMatrix([[0, 0], [1, 0]])
    ok, _ = is_n_cyclotomic(shift2, 2)
    assert not ok  # a single length-2 block cannot split into two layers
    double = FieldMatrix.block_diagonal([shift2, shift2])
    ok, cert = is_n_cyclotomic(double, 2)
    assert ok
    assert cert["jordan_multiplicities"] == {"2": 2}


def test_cyclotomic_zero_matrix():
    ok, cert = is_n_cyclotomic(FieldMatrix.zeros(4, 4), 2)
    assert ok
    assert cert["jordan_multiplicities"] == {"1": 4}


def test_cyclotomic_mixed_singular():
    # nilpotent pair of 1-blocks plus an invertible (1,-1) part
    a = FieldMatrix.block_diagonal(
        [FieldMatrix.zeros(2, 2), FieldMatrix.diagonal([1, -1])])
    ok, cert = is_n_cyclotomic(a, 2)
    assert ok
    assert "invertible_part" in cert


def test_cyclotomic_conjugation_invariant():
    # similarity must not affect the verdict
    a = FieldMatrix.diagonal([2, -2, Fraction(1, 3), Fraction(-1, 3)])
    p = FieldMatrix([[1, 2, 0, -1], [0, 1, 3, 1], [1, 0, 1, 0], [2, 1, 0, 1]])
    conj = p * a * p.inverse()
    ok, _ = is_n_cyclotomic(conj, 2)
    assert ok
    assert not are_similar(a, FieldMatrix.diagonal([2, -2, 2, -2]))


def test_report_fourth_roots():
    i4 = zeta(4)
    a = FieldMatrix.diagonal([scalar(1, 4), scalar(-1, 4), i4, -i4])
    rep = cyclotomic_report(a)
    assert rep.admissible == [2, 4]
    assert rep.size == 4
    doc = rep.to_json()
    assert doc["admissible"] == [2, 4]
    assert "2" in doc["certificates"]


def test_report_trivial():
    rep = cyclotomic_report(FieldMatrix.diagonal([1, 2]))
    assert rep.admissible == []


# ---------------------------------------------------------------------------
# block companion similarity

def test_companion_scalar_case():
    t = cyclic_companion_transform(FieldMatrix([[2]]), 2)
    assert t.m_a == FieldMatrix([[0, 4], [1, 0]])
    assert t.p == FieldMatrix([[2, -2], [1, 1]])
    assert t.c_zeta == FieldMatrix.diagonal([2, -2])


def test_companion_block_case():
    c = FieldMatrix([[1, 1], [0, 1]])
    t = cyclic_companion_transform(c, 3)
    assert t.m_a * t.p == t.p * t.c_zeta
    assert not t.p.det().is_zero()
    assert t.m_a.rows == 6
    # the companion matrix is genuinely 3-cyclotomic
    ok, _ = is_n_cyclotomic(t.m_a, 3)
    assert ok


def test_companion_rejects_singular():
    with pytest.raises(SingularMatrix):
        cyclic_companion_transform(FieldMatrix([[0]]), 2)


# ---------------------------------------------------------------------------
# decisions and witnesses

def assert_good_witness(report, order=None):
    assert report.is_morphism
    assert report.is_fpf
    if order is not None:
        assert report.order == order


def test_decide_abelian():
    d = decide_fpf(abelian(3))
    assert d.verdict == "Yes"
    assert d.n == 2
    assert_good_witness(d.witness, order=2)


def test_decide_negating_action():
    d = decide_fpf(diag_solvable(-1))
    assert d.verdict == "Yes"
    assert d.reason_code == "cyclotomic"
    assert d.n == 2
    assert d.details["admissible"] == [2]
    assert_good_witness(d.witness, order=4)


def test_decide_affine_no():
    d = decide_fpf(affine_line())
    assert d.verdict == "No"
    assert d.reason_code == "not-cyclotomic"
    assert d.witness is None


def test_decide_positive_ratio_no():
    d = decide_fpf(diag_solvable(2))
    assert d.verdict == "No"


def test_decide_heisenberg():
    d = decide_fpf(heisenberg())
    assert d.verdict == "Yes"
    assert d.reason_code == "nilpotent-scaling"
    assert d.details["jordan_type"] == [2]
    assert_good_witness(d.witness, order=4)


def test_decide_filiform4():
    d = decide_fpf(filiform4())
    assert d.verdict == "Yes"
    assert d.reason_code == "nilpotent-scaling"
    assert_good_witness(d.witness, order=4)


def test_decide_cube_root_action():
    w = zeta(3)
    d = decide_fpf(spectrum_solvable(scalar(1, 3), w, w * w))
    assert d.verdict == "Yes"
    assert d.n == 3
    assert_good_witness(d.witness, order=6)


def test_decide_mixed_action():
    # action diag(1,-1) plus a nilpotent direction: [e1,e4] = 0 keeps e4 in
    # the null part of the action
    g = LieAlgebra(4, {(0, 1): {1: 1}, (0, 2): {2: -1}})
    d = decide_fpf(g)
    assert d.verdict == "Yes"
    assert d.n == 2
    assert_good_witness(d.witness, order=4)


def test_witness_rejects_small_k():
    p = detect_presentation(diag_solvable(-1))
    with pytest.raises(PreconditionViolated):
        build_witness(p, 2, k=1)


def test_witness_rejects_noncyclotomic_action():
    p = detect_presentation(diag_solvable(2))
    with pytest.raises(PreconditionViolated):
        build_witness(p, 2)


def test_witness_higher_k():
    p = detect_presentation(diag_solvable(-1))
    report = build_witness(p, 2, k=3)
    assert_good_witness(report, order=6)


def test_witness_fallback_route(monkeypatch):
    import liefix.almostabelian as mod
    monkeypatch.setattr(mod, "_layer_decomposition", lambda *a, **k: None)
    p = detect_presentation(diag_solvable(-1))
    report = build_witness(p, 2, k=2)
    assert report.is_morphism
    assert report.is_fpf


def test_scaled_intertwiner_relation():
    b = FieldMatrix.diagonal([1, -1])
    z2, z4 = zeta(2), zeta(4)
    phi = _scaled_intertwiner(b, z2, z4, seed=0, budget=64)
    assert phi * b == b.scale(z2) * phi
    ident = FieldMatrix.identity(2, phi.conductor)
    assert not (phi - ident).det().is_zero()


# ---------------------------------------------------------------------------
# randomized corpora

def test_random_cyclotomic_positives():
    import random
    rng = random.Random(7)
    values = [1, 2, 3, Fraction(1, 2)]
    for _ in range(12):
        a = rng.choice(values)
        base = FieldMatrix.diagonal([a, -a])
        p = _random_invertible(rng, 2)
        ok, _ = is_n_cyclotomic(p * base * p.inverse(), 2)
        assert ok


def test_random_cyclotomic_negatives():
    import random
    rng = random.Random(8)
    for _ in range(12):
        a = rng.randint(1, 5)
        b = rng.randint(1, 5)
        mat = FieldMatrix.diagonal([a, b])  # positive trace
        p = _random_invertible(rng, 2)
        ok, _ = is_n_cyclotomic(p * mat * p.inverse(), 2)
        assert not ok


def _random_invertible(rng, n):
    while True:
        cand = FieldMatrix([[rng.randint(-3, 3) for _ in range(n)]
                            for _ in range(n)])
        if not cand.det().is_zero():
            return cand


def test_random_decisions_all_verified():
    # every Yes must ship a certified witness on the original algebra
    cases = [abelian(2), affine_line(), heisenberg(), filiform4(),
             diag_solvable(-1), diag_solvable(3),
             spectrum_solvable(1, -1, 2, -2)]
    for g in cases:
        d = decide_fpf(g)
        if d.verdict == "Yes":
            rerun = check_automorphism(g, d.witness.map)
            assert rerun.is_morphism and rerun.is_fpf
        else:
            assert d.reason_code == "not-cyclotomic"
