"""Tests for the filiform decision machinery."""

from fractions import Fraction

import pytest

from liefix.cyclofield import scalar
from liefix.errors import (
    NoNonsingularDerivation,
    NotDiagonalizableHere,
    NotFiliform,
    PreconditionViolated,
)
from liefix.exactlinalg import FieldMatrix, express_in_rows
from liefix.filiform import (
    cnla_filiform7,
    decide_fpf_filiform,
    find_adapted_basis,
    graded_type,
    is_filiform,
    nonsingular_derivation,
    q_type_derivation,
    witness_from_derivation,
)
from liefix.liealg import LieAlgebra, derivation_algebra, is_cnla, is_derivation


# ---------------------------------------------------------------------------
# builders

def standard_filiform(n):
    return LieAlgebra(n, {(0, j): {j + 1: 1} for j in range(1, n - 1)})


def q_filiform(n):
    assert n % 2 == 0
    br = {(0, j): {j + 1: 1} for j in range(1, n - 1)}
    for i in range(2, n // 2 + 1):  # [e_i, e_{n+1-i}] = (-1)^i e_n
        br[(i - 1, n - i)] = {n - 1: (-1) ** i}
    return LieAlgebra(n, br)


def q6_perturbed():
    # Q6 with an extra [e2,e3] = e6 component
    g = q_filiform(6)
    br = {(0, j): {j + 1: 1} for j in range(1, 5)}
    br[(1, 4)] = {5: 1}
    br[(2, 3)] = {5: -1}
    br[(1, 2)] = {5: 1}
    return LieAlgebra(6, br)


def change_basis(g, rows):
    """The same algebra written in the basis given by integer rows."""
    mat = FieldMatrix(rows)
    assert not mat.det().is_zero()
    vecs = [tuple(x for x in row) for row in mat.entries]
    brackets = {}
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            coords = express_in_rows(vecs, g.bracket_vec(vecs[i], vecs[j]))
            brackets[(i, j)] = coords
    return LieAlgebra(g.dim, brackets, conductor=g.conductor)


# ---------------------------------------------------------------------------
# recognition and adaptation

def test_is_filiform_families():
    for n in range(3, 8):
        assert is_filiform(standard_filiform(n))
    assert is_filiform(q_filiform(4))
    assert is_filiform(q_filiform(6))
    assert is_filiform(cnla_filiform7())


def test_is_filiform_negatives():
    assert not is_filiform(LieAlgebra(4, {}))  # abelian
    assert not is_filiform(LieAlgebra(3, {(0, 1): {1: 1}}))  # not nilpotent
    # heisenberg5: nilpotent but the derived algebra is too small
    assert not is_filiform(LieAlgebra(5, {(0, 1): {4: 1}, (2, 3): {4: 1}}))


def test_adapted_identity_on_standard():
    p = find_adapted_basis(standard_filiform(4))
    assert p.adapted_basis == FieldMatrix.identity(4)
    assert p.alpha.is_zero()


def test_adapted_q4():
    p = find_adapted_basis(q_filiform(4))
    assert p.adapted_basis == FieldMatrix.identity(4)
    assert p.alpha == scalar(1)
    assert graded_type(p).tag == "Q"


def test_adapted_q6():
    p = find_adapted_basis(q_filiform(6))
    assert p.alpha == scalar(1)
    assert graded_type(p).tag == "Q"


def test_adapted_odd_dimension_alpha_zero():
    for g in (standard_filiform(3), standard_filiform(5), cnla_filiform7()):
        p = find_adapted_basis(g)
        assert p.alpha.is_zero()
        assert graded_type(p).tag == "L"


def test_adapted_recovers_from_scrambled_basis():
    g = standard_filiform(5)
    rows = [[1, 1, 0, 0, 1], [0, 1, 2, 0, 0], [1, 0, 1, 0, 0],
            [0, 1, 0, 1, 1], [0, 0, 1, 0, 1]]
    scrambled = change_basis(g, rows)
    p = find_adapted_basis(scrambled)
    a = p.adapted_algebra
    for i in range(1, 4):
        assert a.table[0][i] == a.basis_vector(i + 1)
    assert p.alpha.is_zero()
    # the adapted basis really consists of vectors of the scrambled algebra
    for i in range(5):
        for j in range(i + 1, 5):
            lhs = scrambled.bracket_vec(p.adapted_basis.row(i),
                                        p.adapted_basis.row(j))
            rhs_coords = a.table[i][j]
            rhs = tuple(
                sum((c * x for c, x in zip(rhs_coords, col)),
                    start=scalar(0, a.conductor))
                for col in zip(*p.adapted_basis.entries))
            assert lhs == rhs


def test_adapted_rejects_nonfiliform():
    with pytest.raises(NotFiliform):
        find_adapted_basis(LieAlgebra(4, {}))


# ---------------------------------------------------------------------------
# the Q-type derivation

def test_qtype_on_q6():
    p = find_adapted_basis(q_filiform(6))
    rep = q_type_derivation(p)
    assert rep.isomorphic_to_q
    assert rep.betas[4].is_zero()
    assert is_derivation(q_filiform(6), rep.derivation)


def test_qtype_on_q4():
    p = find_adapted_basis(q_filiform(4))
    rep = q_type_derivation(p)
    assert rep.betas == {}
    d = rep.derivation
    # D fixes e2, e3, doubles e4, sends e1 to e2
    assert d.column(0) == (scalar(0), scalar(1), scalar(0), scalar(0))
    assert d.column(3) == (scalar(0), scalar(0), scalar(0), scalar(2))


def test_qtype_perturbed_beta():
    p = find_adapted_basis(q6_perturbed())
    rep = q_type_derivation(p)
    assert rep.betas[4] == scalar(-1)
    assert is_derivation(q6_perturbed(), rep.derivation)


def test_qtype_rejects_l_type():
    p = find_adapted_basis(standard_filiform(6))
    with pytest.raises(PreconditionViolated):
        q_type_derivation(p)


def test_qtype_rejects_low_tail_bracket():
    # Q6 with [e2,e3] = e5 (and [e2,e4] = e6 for Jacobi): adapted, but the
    # tail ideal brackets leave the last coordinate
    br = {(0, j): {j + 1: 1} for j in range(1, 5)}
    br[(1, 4)] = {5: 1}
    br[(2, 3)] = {5: -1}
    br[(1, 2)] = {4: 1}
    br[(1, 3)] = {5: 1}
    g = LieAlgebra(6, br)
    p = find_adapted_basis(g)
    assert not p.alpha.is_zero()
    with pytest.raises(PreconditionViolated):
        q_type_derivation(p)


# ---------------------------------------------------------------------------
# nonsingular derivations

def test_grading_weights_are_derivations():
    # the classical weight derivations used as oracles
    l4 = standard_filiform(4)
    assert is_derivation(l4, FieldMatrix.diagonal([1, 1, 2, 3]))
    q6 = q_filiform(6)
    assert is_derivation(q6, FieldMatrix.diagonal([1, 1, 2, 3, 4, 5]))


def test_nonsingular_derivation_found():
    for g in (standard_filiform(4), q_filiform(6)):
        d = nonsingular_derivation(g)
        assert is_derivation(g, d)
        assert not d.det().is_zero()


def test_nonsingular_derivation_cnla():
    with pytest.raises(NoNonsingularDerivation):
        nonsingular_derivation(cnla_filiform7())


def test_nonsingular_derivation_nonfiliform():
    with pytest.raises(NotFiliform):
        nonsingular_derivation(LieAlgebra(2, {(0, 1): {0: 1}}))


# ---------------------------------------------------------------------------
# witnesses from derivations

def test_witness_l3_doubling():
    g = standard_filiform(3)
    d = FieldMatrix.diagonal([1, 1, 2])
    w = witness_from_derivation(g, d, "exact")
    assert w.certificate_kind == "exact"
    assert w.report.map == FieldMatrix.diagonal([2, 2, 4])
    assert w.report.is_fpf
    assert w.report.order == "exceeds-bound"


def test_witness_q4_weights():
    g = q_filiform(4)
    w = witness_from_derivation(g, FieldMatrix.diagonal([1, 1, 2, 3]), "exact")
    assert w.report.map == FieldMatrix.diagonal([2, 2, 4, 8])
    assert sorted(w.weights) == [1, 1, 2, 3]


def test_witness_fractional_weights():
    g = standard_filiform(3)
    d = FieldMatrix.diagonal([Fraction(1, 2), Fraction(1, 2), 1])
    w = witness_from_derivation(g, d, "exact")
    # denominators cleared: weights double, phi scales by 2, 2, 4 again
    assert w.report.map == FieldMatrix.diagonal([2, 2, 4])


def test_witness_rejects_non_derivation():
    g = standard_filiform(3)
    with pytest.raises(PreconditionViolated):
        witness_from_derivation(g, FieldMatrix.diagonal([1, 1, 3]), "exact")


def test_witness_rejects_singular():
    g = standard_filiform(3)
    with pytest.raises(PreconditionViolated):
        witness_from_derivation(g, FieldMatrix.diagonal([1, -1, 0]), "exact")


def golden_derivation():
    # derivation of L3 with irrational (golden ratio) spectrum
    return FieldMatrix([[1, 1, 0], [1, 0, 0], [0, 0, 1]])


def test_witness_irrational_spectrum_needs_numeric():
    g = standard_filiform(3)
    d = golden_derivation()
    assert is_derivation(g, d)
    with pytest.raises(NotDiagonalizableHere):
        witness_from_derivation(g, d, "exact")
    w = witness_from_derivation(g, d, "numeric")
    assert w.certificate_kind == "numeric"
    assert w.report is None
    assert w.numeric["fpf_numeric"]
    assert float(w.numeric["morphism_residual"]) < 1e-10


# ---------------------------------------------------------------------------
# the decision

def test_decide_standard_family():
    for n in range(3, 8):
        d = decide_fpf_filiform(standard_filiform(n))
        assert d.verdict == "Yes"
        assert d.details["cnla"] is False
        assert d.details["nonsingular_derivation"] is True
        assert d.details["is_derived_algebra"] is True
        assert d.details["graded_type"] == "L"


def test_decide_q_family():
    for n in (4, 6, 8):
        d = decide_fpf_filiform(q_filiform(n))
        assert d.verdict == "Yes"
        assert d.details["graded_type"] == "Q"


def test_decide_exact_witness_on_small_cases():
    for g in (standard_filiform(3), standard_filiform(4), q_filiform(4),
              q_filiform(6)):
        d = decide_fpf_filiform(g)
        assert d.details["certificate_kind"] == "exact"
        assert d.witness.is_morphism and d.witness.is_fpf


def test_decide_cnla_no():
    d = decide_fpf_filiform(cnla_filiform7())
    assert d.verdict == "No"
    assert d.reason_code == "cnla"
    assert d.details["cnla"] is True
    assert d.details["nonsingular_derivation"] is False
    assert d.details["is_derived_algebra"] is False
    assert d.witness is None


def test_decide_rejects_nonfiliform():
    with pytest.raises(NotFiliform):
        decide_fpf_filiform(LieAlgebra(3, {}))


def test_decision_matches_cnla_flag():
    corpus = [standard_filiform(n) for n in range(3, 7)]
    corpus += [q_filiform(4), q_filiform(6), q6_perturbed(), cnla_filiform7()]
    for g in corpus:
        d = decide_fpf_filiform(g)
        assert (d.verdict == "No") == is_cnla(g).is_cnla


def test_cross_engine_consistency_dim3():
    from liefix.almostabelian import decide_fpf
    g = standard_filiform(3)
    assert decide_fpf_filiform(g).verdict == decide_fpf(g).verdict == "Yes"


# ---------------------------------------------------------------------------
# independent certificate for the frozen CNLA instance
#
# A symbolic oracle: write a generic derivation D(x) = sum x_k B_k over the
# (individually re-verified) derivation basis and check that the power
# traces tr(D(x)^k) vanish identically as polynomials in x.  In
# characteristic zero that forces every specialization to be nilpotent.

def _poly_mul(p, q):
    out = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            key = tuple(a + b for a, b in zip(m1, m2))
            val = out.get(key, Fraction(0)) + c1 * c2
            if val:
                out[key] = val
            elif key in out:
                del out[key]
    return out


def _poly_add(p, q):
    out = dict(p)
    for m, c in q.items():
        val = out.get(m, Fraction(0)) + c
        if val:
            out[m] = val
        elif m in out:
            del out[m]
    return out


def test_cnla7_symbolic_power_traces():
    g = cnla_filiform7()
    basis = derivation_algebra(g).basis
    for b in basis:
        assert is_derivation(g, b)
    k = len(basis)
    n = g.dim
    zero = {}

    def var(i):
        key = tuple(1 if t == i else 0 for t in range(k))
        return {key: Fraction(1)}

    generic = [[zero for _ in range(n)] for _ in range(n)]
    for idx, b in enumerate(basis):
        x = var(idx)
        for i in range(n):
            for j in range(n):
                e = b.entries[i][j]
                if not e.is_zero():
                    generic[i][j] = _poly_add(
                        generic[i][j],
                        {m: c * e.as_fraction() for m, c in x.items()})

    power = generic
    for step in range(n):
        trace = zero
        for i in range(n):
            trace = _poly_add(trace, power[i][i])
        assert trace == {}, "a power trace does not vanish identically"
        if step == n - 1:
            break
        nxt = [[zero for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(n):
                acc = {}
                for t in range(n):
                    if power[i][t] and generic[t][j]:
                        acc = _poly_add(acc,
                                        _poly_mul(power[i][t], generic[t][j]))
                nxt[i][j] = acc
        power = nxt
