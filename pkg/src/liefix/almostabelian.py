"""Decision and witness engine for almost abelian Lie algebras.

An almost abelian algebra is a non-abelian semidirect product of an abelian
ideal of codimension one with a line.  Whether it admits a fixed-point-free
automorphism is controlled entirely by the action of the line on the ideal:
the invertible part of that action must be similar to its own ζ_n-multiple
for some n ≥ 2.  Everything here is exact; similarity runs through invariant
factors, never through eigenvalues.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .cyclofield import CycScalar, divisors, scalar, zeta
from .errors import (
    NotAlmostAbelian,
    PreconditionViolated,
    SamplingExhausted,
    SearchIncomplete,
    SingularMatrix,
)
from .exactlinalg import (
    FieldMatrix,
    are_similar,
    express_in_rows,
    find_intertwiner,
    fitting_split,
    jordan_type,
    nilpotent_jordan_chains,
    restrict_operator,
)
from .liealg import (
    AutomorphismReport,
    LieAlgebra,
    Subspace,
    check_automorphism,
    nilradical_lifted,
    vec_add,
    vec_is_zero,
    vec_scale,
)


@dataclass
class AlmostAbelianPresentation:
    algebra: LieAlgebra
    abelian_ideal: Subspace
    v: tuple
    action: FieldMatrix


@dataclass
class CyclotomicReport:
    size: int
    admissible: list[int]
    certificates: dict

    def to_json(self) -> dict:
        return {"size": self.size, "admissible": self.admissible,
                "certificates": {str(n): c for n, c in self.certificates.items()}}


@dataclass
class FpfDecision:
    verdict: str  # Yes | No | Unknown
    reason_code: str
    reason: str
    n: int | None = None
    witness: AutomorphismReport | None = None
    details: dict | None = None

    def to_json(self) -> dict:
        doc = {"verdict": self.verdict, "reason_code": self.reason_code,
               "reason": self.reason}
        if self.n is not None:
            doc["n"] = self.n
        if self.witness is not None:
            doc["witness"] = self.witness.to_json()
        if self.details:
            doc["details"] = self.details
        return doc


def _combine(rows, coeffs, length, conductor):
    out = tuple([scalar(0, conductor)] * length)
    for c, row in zip(coeffs, rows):
        if not c.is_zero():
            out = vec_add(out, vec_scale(row, c))
    return out


# ---------------------------------------------------------------------------
# presentation detection

def detect_presentation(g: LieAlgebra, seed: int = 0, budget: int = 64,
                        conductor_limit: int = 1000) -> AlmostAbelianPresentation:
    """Find an abelian codimension-1 ideal and a complementary line.

    Non-nilpotent case: the ideal is forced to be the nilradical.  Nilpotent
    case: hyperplanes containing the derived algebra are searched —
    coordinate-aligned ones first, then seeded random ones — and a miss is
    reported as SearchIncomplete rather than a definite negative.
    """
    if g.is_abelian():
        raise NotAlmostAbelian("the algebra is abelian")
    if not g.is_solvable():
        raise NotAlmostAbelian("almost abelian algebras are solvable")
    derived = g.derived_subalgebra()
    if derived.dim > g.dim - 1:
        raise NotAlmostAbelian("no codimension-1 ideal can exist")

    ideal = None
    if not g.is_nilpotent():
        nil, _ = nilradical_lifted(g, conductor_limit)
        if nil.dim != g.dim - 1 or not g.subspace_bracket(nil, nil).is_zero():
            raise NotAlmostAbelian(
                "the nilradical is not an abelian hyperplane, and any abelian "
                "codimension-1 ideal would have to equal it")
        ideal = nil
    else:
        ideal = _find_abelian_hyperplane(g, derived, seed, budget)

    coords = ideal.complement_coords()
    v = g.basis_vector(coords[0])
    action = restrict_operator(g.adjoint(v), list(ideal.rows))
    return AlmostAbelianPresentation(g, ideal, v, action)


def _find_abelian_hyperplane(g: LieAlgebra, derived: Subspace,
                             seed: int, budget: int) -> Subspace:
    if derived.dim == g.dim - 1:
        if g.subspace_bracket(derived, derived).is_zero():
            return derived
        raise NotAlmostAbelian(
            "the derived algebra is the only hyperplane ideal and is not abelian")
    coords = derived.complement_coords()
    qdim = len(coords)
    rng = random.Random(seed)

    def hyperplane_from_covector(f):
        # kernel of f within the complement directions, plus the derived part
        pivot = next((i for i, c in enumerate(f) if not c.is_zero()), None)
        if pivot is None:
            return None
        rows = list(derived.rows)
        inv = f[pivot].inverse()
        for i in range(qdim):
            if i == pivot:
                continue
            vec = list(g.basis_vector(coords[i]))
            corr = vec_scale(g.basis_vector(coords[pivot]), f[i] * inv)
            rows.append(tuple(a - b for a, b in zip(vec, corr)))
        return Subspace(g.dim, rows)

    candidates = []
    one, zero = scalar(1, g.conductor), scalar(0, g.conductor)
    for i in range(qdim):
        candidates.append(tuple(one if j == i else zero for j in range(qdim)))
    tried = 0
    while True:
        for f in candidates:
            tried += 1
            h = hyperplane_from_covector(f)
            if h is None or h.dim != g.dim - 1:
                continue
            if g.subspace_bracket(h, h).is_zero():
                return h
            if tried >= budget:
                raise SearchIncomplete(
                    f"no abelian hyperplane found in {budget} candidates")
        candidates = [tuple(scalar(rng.randint(-3, 3), g.conductor)
                            for _ in range(qdim))]
        if tried >= budget:
            raise SearchIncomplete(
                f"no abelian hyperplane found in {budget} candidates")


# ---------------------------------------------------------------------------
# the n-cyclotomic test

def is_n_cyclotomic(a: FieldMatrix, n: int):
    """Is the matrix similar to the n-layer block form diag(B, ζB, …)?

    Invertible matrices: equivalent to being similar to the ζ_n-multiple
    of itself, tested through invariant factors.  Singular matrices: the
    nilpotent Fitting part must have every Jordan-length multiplicity
    divisible by n, and the invertible part must pass the invertible test.
    Returns (bool, certificate-dict-or-None).
    """
    m = a.rows
    if n < 2:
        raise ValueError("n must be at least 2")
    if m % n != 0:
        return False, None
    if not a.trace().is_zero():
        return False, None
    if not a.det().is_zero():
        return _invertible_cyclotomic(a, n)
    null_rows, image_rows = fitting_split(a)
    nil = restrict_operator(a, list(null_rows.entries)) \
        if null_rows.rows else FieldMatrix.zeros(0, 0)
    lengths = jordan_type(nil) if nil.rows else []
    mult: dict[int, int] = {}
    for l in lengths:
        mult[l] = mult.get(l, 0) + 1
    if any(c % n for c in mult.values()):
        return False, None
    cert = {"jordan_multiplicities": {str(l): c for l, c in sorted(mult.items())}}
    if image_rows.rows:
        inv = restrict_operator(a, list(image_rows.entries))
        ok, inner = _invertible_cyclotomic(inv, n)
        if not ok:
            return False, None
        cert["invertible_part"] = inner
    return True, cert


def _invertible_cyclotomic(a: FieldMatrix, n: int):
    m = a.rows
    if m % n != 0:
        return False, None
    if not a.trace().is_zero():
        return False, None
    z = zeta(n)
    # cheap necessary filter: char-poly support must sit in one residue class
    cp = a.char_poly()
    for j, c in enumerate(cp.coeffs[:-1]):
        if not c.is_zero() and (m - j) % n != 0:
            return False, None
    scaled = a.scale(z)
    if not are_similar(a, scaled):
        return False, None
    cert = {
        "n": n,
        "invariant_factors": [f.format() for f in a.invariant_factors()],
        "scaled_invariant_factors": [f.format() for f in scaled.invariant_factors()],
    }
    return True, cert


def cyclotomic_report(a: FieldMatrix) -> CyclotomicReport:
    """Exhaustive n-cyclotomic scan over the divisors n ≥ 2 of the size."""
    admissible = []
    certificates = {}
    for n in divisors(a.rows):
        if n < 2:
            continue
        ok, cert = is_n_cyclotomic(a, n)
        if ok:
            admissible.append(n)
            certificates[n] = cert
    return CyclotomicReport(size=a.rows, admissible=admissible,
                            certificates=certificates)


# ---------------------------------------------------------------------------
# the cyclic block-companion similarity

@dataclass
class CompanionTransform:
    m_a: FieldMatrix
    p: FieldMatrix
    c_zeta: FieldMatrix


def cyclic_companion_transform(c: FieldMatrix, n: int) -> CompanionTransform:
    """Exhibit diag(C, ζC, …, ζ^{n−1}C) as a block companion matrix.

    Builds A = Cⁿ, the block companion M_A (subdiagonal identity blocks,
    A in the top-right corner), and the explicit block-Vandermonde P with
    blocks (ζʲC)^{n−1−r}; certifies M_A·P = P·C_ζ and det P ≠ 0 exactly.
    """
    if not c.is_square():
        raise SingularMatrix("C must be square")
    if c.det().is_zero():
        raise SingularMatrix("C must be invertible")
    k = c.rows
    m = math.lcm(c.conductor, n)
    cl = c.lift(m)
    z = zeta(n).lift(m)
    a = cl ** n
    zero_block = FieldMatrix.zeros(k, k, m)
    ident = FieldMatrix.identity(k, m)

    def hstack_blocks(blocks):
        rows = []
        for i in range(k):
            row = []
            for b in blocks:
                row.extend(b.entries[i])
            rows.append(row)
        return rows

    m_a_rows = []
    top = [zero_block] * n
    top[n - 1] = a
    m_a_rows.extend(hstack_blocks(top))
    for r in range(1, n):
        row_blocks = [zero_block] * n
        row_blocks[r - 1] = ident
        m_a_rows.extend(hstack_blocks(row_blocks))
    m_a = FieldMatrix(m_a_rows)

    p_rows = []
    for r in range(n):
        row_blocks = []
        for j in range(n):
            row_blocks.append((cl.scale(z ** j)) ** (n - 1 - r))
        p_rows.extend(hstack_blocks(row_blocks))
    p = FieldMatrix(p_rows)

    c_zeta = FieldMatrix.block_diagonal([cl.scale(z ** j) for j in range(n)])

    if m_a * p != p * c_zeta:
        raise AssertionError("companion similarity identity failed")
    if p.det().is_zero():
        raise AssertionError("block Vandermonde matrix is singular")
    return CompanionTransform(m_a=m_a, p=p, c_zeta=c_zeta)


# ---------------------------------------------------------------------------
# decision and witness

def decide_fpf(g: LieAlgebra, seed: int = 0, order_bound: int = 1000,
               conductor_limit: int = 1000) -> FpfDecision:
    """Fixed-point-free decision for abelian and almost abelian algebras."""
    if g.is_abelian():
        phi = FieldMatrix.diagonal([scalar(-1, g.conductor)] * g.dim)
        witness = check_automorphism(g, phi, order_bound)
        return FpfDecision("Yes", "abelian",
                           "abelian: negation is a fixed-point-free automorphism",
                           n=2, witness=witness)
    pres = detect_presentation(g, seed=seed, conductor_limit=conductor_limit)
    t = pres.action
    null_rows, image_rows = fitting_split(t)
    if image_rows.rows == 0:
        witness = build_witness(pres, 2, 2, seed=seed, order_bound=order_bound)
        return FpfDecision("Yes", "nilpotent-scaling",
                           "nilpotent almost abelian: scaled Jordan-chain witness",
                           n=2, witness=witness,
                           details={"jordan_type": jordan_type(t)})
    b = restrict_operator(t, list(image_rows.entries))
    report = cyclotomic_report(b)
    if not report.admissible:
        return FpfDecision(
            "No", "not-cyclotomic",
            "the invertible part of the action is not n-cyclotomic for any n ≥ 2",
            details={"admissible": [], "invertible_size": b.rows})
    n = report.admissible[0]
    witness = build_witness(pres, n, 2, seed=seed, order_bound=order_bound)
    return FpfDecision("Yes", "cyclotomic",
                       f"the invertible part of the action is {n}-cyclotomic",
                       n=n, witness=witness,
                       details={"admissible": report.admissible})


def _layer_decomposition(b: FieldMatrix, n: int, seed: int, budget: int = 64):
    """Rows U with B^n·U ⊆ U and the layers U, BU, …, B^{n−1}U filling the
    space; None when the seeded search misses."""
    size = b.rows
    d, rem = divmod(size, n)
    if rem:
        return None
    s = b ** n
    powers = [FieldMatrix.identity(size, b.conductor)]
    for _ in range(1, n):
        powers.append(powers[-1] * b)
    rng = random.Random(seed)
    u_rows: list[tuple] = []

    def layered_rank(rows):
        stacked = []
        for p in powers:
            for r in rows:
                stacked.append(p.matvec(r))
        return FieldMatrix.from_rows(stacked).rank(), stacked

    def krylov(vec):
        rows = [vec]
        while True:
            nxt = s.matvec(rows[-1])
            if express_in_rows(rows, nxt) is not None:
                return rows
            rows.append(nxt)

    candidates = [tuple(scalar(1 if i == j else 0, b.conductor)
                        for i in range(size)) for j in range(size)]
    attempts = 0
    while attempts < budget:
        for cand in candidates:
            attempts += 1
            if vec_is_zero(cand):
                continue
            if u_rows and express_in_rows(u_rows, cand) is not None:
                continue
            cyc = krylov(cand)
            trial = u_rows + cyc
            if len(trial) > d:
                continue
            rank, _ = layered_rank(trial)
            if rank == n * len(trial):
                u_rows = list(Subspace(size, trial).rows)
                if len(u_rows) == d:
                    return u_rows
            if attempts >= budget:
                break
        candidates = [tuple(scalar(rng.randint(-2, 2), b.conductor)
                            for _ in range(size))]
    return None


def build_witness(pres: AlmostAbelianPresentation, n: int, k: int = 2,
                  seed: int = 0, order_bound: int = 1000,
                  budget: int = 64) -> AutomorphismReport:
    """Construct and certify a fixed-point-free automorphism.

    The line generator scales by ζ_n.  On the ideal, nilpotent Jordan
    chains pick up successive powers ζ_n^i·μ with μ = ζ_{kn}; the invertible
    part gets a layered decomposition (preferred — gives exact order kn) or,
    failing that, a sampled intertwiner scaled by μ with an exact
    no-eigenvalue-one check.
    """
    if k < 2:
        raise PreconditionViolated("order factor k must be at least 2")
    g = pres.algebra
    kn = k * n
    m = math.lcm(g.conductor, kn)
    glift = g.lift(m)
    ideal_rows = [tuple(x.lift(m) for x in row) for row in pres.abelian_ideal.rows]
    t = pres.action.lift(m)
    z = zeta(n).lift(m)
    mu = zeta(kn).lift(m)
    dim_a = len(ideal_rows)

    null_rows, image_rows = fitting_split(t)

    def ideal_to_ambient(vec):
        return _combine(ideal_rows, vec, g.dim, m)

    new_basis: list[tuple] = []   # ambient vectors
    blocks: list[FieldMatrix] = []  # φ in the new basis, block by block

    if null_rows.rows:
        nil_op = restrict_operator(t, list(null_rows.entries))
        chains = nilpotent_jordan_chains(nil_op)
        for chain in chains:
            diag = []
            for i, cvec in enumerate(chain):
                ideal_vec = _combine(list(null_rows.entries), cvec, dim_a, m)
                new_basis.append(ideal_to_ambient(ideal_vec))
                diag.append((z ** i) * mu)
            blocks.append(FieldMatrix.diagonal(diag))

    if image_rows.rows:
        b = restrict_operator(t, list(image_rows.entries))
        ok, _ = is_n_cyclotomic(b, n)
        if not ok:
            raise PreconditionViolated(
                f"invertible part of the action is not {n}-cyclotomic")
        layers = _layer_decomposition(b, n, seed, budget)
        if layers is not None:
            powers = [FieldMatrix.identity(b.rows, b.conductor)]
            for _ in range(1, n):
                powers.append(powers[-1] * b)
            for u in layers:
                for i in range(n):
                    img_vec = powers[i].matvec(u)
                    ideal_vec = _combine(list(image_rows.entries), img_vec,
                                         dim_a, m)
                    new_basis.append(ideal_to_ambient(ideal_vec))
                    blocks.append(FieldMatrix.diagonal([(z ** i) * mu]))
        else:
            phi_b = _scaled_intertwiner(b, z, mu, seed, budget)
            for row in image_rows.entries:
                new_basis.append(ideal_to_ambient(row))
            blocks.append(phi_b)

    new_basis.append(tuple(x.lift(m) for x in pres.v))
    blocks.append(FieldMatrix.diagonal([z]))

    s_rows = FieldMatrix.from_rows(new_basis)
    if s_rows.rank() != g.dim:
        raise AssertionError("witness basis is not a basis")
    q = s_rows.transpose()
    phi = q * FieldMatrix.block_diagonal(blocks) * q.inverse()
    report = check_automorphism(glift, phi, order_bound)
    if not (report.is_morphism and report.is_fpf):
        raise AssertionError("constructed witness failed certification")
    return report


def _scaled_intertwiner(b: FieldMatrix, z: CycScalar, mu: CycScalar,
                        seed: int, budget: int) -> FieldMatrix:
    """Fallback: μ·Φ with Φ·B = (ζB)·Φ invertible and det(μΦ − I) ≠ 0."""
    ident = FieldMatrix.identity(b.rows, b.conductor)
    last_error = None
    for attempt in range(8):
        try:
            phi0, _ = find_intertwiner(b, b.scale(z), seed=seed + attempt,
                                       budget=budget)
        except SamplingExhausted as exc:
            last_error = exc
            continue
        cand = phi0.scale(mu)
        if not (cand - ident).det().is_zero():
            return cand
    raise SamplingExhausted(
        "no intertwiner with all eigenvalues away from 1 found"
    ) from last_error
