"""Lie algebra core: structure constants, series, nilradical, unimodularity,
derivations, the Engel-chain test, and automorphism certification.

Everything is exact.  Solvable-only constructions (nilradical) work through a
full flag of ideals obtained by repeated common-eigenvector extraction; when a
characteristic polynomial refuses to split over the working cyclotomic field,
the failure is reported with a suggested larger conductor instead of being
papered over numerically.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .cyclofield import (
    CycPolynomial,
    CycScalar,
    galois_conjugate,
    scalar,
    sqrt_conductor,
    rational_sqrt,
    try_lower_conductor,
    zeta,
)
from .errors import (
    JacobiViolation,
    NotSolvable,
    SamplingExhausted,
    ShapeError,
    SplitFailure,
)
from .exactlinalg import (
    ORDER_EXCEEDS_BOUND,
    FieldMatrix,
    SolutionSpace,
    express_in_rows,
    matrix_order,
    restrict_operator,
    solve_right,
)


def _zero_vec(n: int, conductor: int = 1) -> tuple:
    z = scalar(0, conductor)
    return tuple([z] * n)


def _unit_vec(n: int, i: int, conductor: int = 1) -> tuple:
    z, o = scalar(0, conductor), scalar(1, conductor)
    return tuple(o if j == i else z for j in range(n))


def vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(a, c):
    return tuple(x * c for x in a)


def vec_is_zero(a) -> bool:
    return all(x.is_zero() for x in a)


# ---------------------------------------------------------------------------
# subspaces (row-span form, canonical rref basis)

class Subspace:
    """Span of row vectors inside an n-dimensional coordinate space.

    The stored basis is the reduced row echelon form, so equal subspaces
    compare equal structurally.
    """

    __slots__ = ("ambient", "rows", "pivots", "conductor")

    def __init__(self, ambient: int, rows=()):
        mat = FieldMatrix.from_rows(list(rows)) if rows else None
        if mat is not None and mat.cols != ambient:
            raise ShapeError("row length does not match ambient dimension")
        if mat is None:
            red_rows, pivots = (), []
            conductor = 1
        else:
            red, pivots = mat.rref()
            red_rows = tuple(red.entries[i] for i in range(len(pivots)))
            conductor = red.conductor
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "rows", red_rows)
        object.__setattr__(self, "pivots", tuple(pivots))
        object.__setattr__(self, "conductor", conductor)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("Subspace is immutable")

    @property
    def dim(self) -> int:
        return len(self.rows)

    def is_zero(self) -> bool:
        return not self.rows

    def is_full(self) -> bool:
        return self.dim == self.ambient

    def contains(self, vec) -> bool:
        if not self.rows:
            return vec_is_zero(vec)
        return express_in_rows(list(self.rows), vec) is not None

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.rows)

    def add(self, other: "Subspace") -> "Subspace":
        return Subspace(self.ambient, list(self.rows) + list(other.rows))

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.is_zero() or other.is_zero():
            return Subspace(self.ambient)
        a = FieldMatrix.from_rows(list(self.rows))
        b = FieldMatrix.from_rows(list(other.rows))
        # x = c·A = d·B  ⟺  (c, d) in the kernel of [Aᵀ | −Bᵀ]
        m = math.lcm(a.conductor, b.conductor)
        at, bt = a.lift(m).transpose(), b.lift(m).transpose()
        stacked = FieldMatrix(
            [list(at.entries[i]) + [-v for v in bt.entries[i]]
             for i in range(self.ambient)])
        rows = []
        for sol in stacked.kernel().entries:
            coeffs = sol[:a.rows]
            vec = _zero_vec(self.ambient, m)
            for c, row in zip(coeffs, a.lift(m).entries):
                if not c.is_zero():
                    vec = vec_add(vec, vec_scale(row, c))
            rows.append(vec)
        return Subspace(self.ambient, rows)

    def complement_coords(self) -> list[int]:
        """Indices of standard coordinates completing the rref basis."""
        return [j for j in range(self.ambient) if j not in self.pivots]

    def reduce(self, vec):
        """vec minus its projection onto the span (kills pivot coords)."""
        v = list(vec)
        for row in self.rows:
            p = next(i for i, x in enumerate(row) if not x.is_zero())
            c = v[p]
            if not c.is_zero():
                for i in range(self.ambient):
                    v[i] = v[i] - c * row[i]
        return tuple(v)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        if self.ambient != other.ambient or self.dim != other.dim:
            return False
        return all(
            all(x == y for x, y in zip(r1, r2))
            for r1, r2 in zip(self.rows, other.rows))

    def __hash__(self):
        return hash((self.ambient, self.rows))

    def __repr__(self):
        return f"Subspace(dim {self.dim} of {self.ambient})"

    @staticmethod
    def full(n: int, conductor: int = 1) -> "Subspace":
        return Subspace(n, [_unit_vec(n, i, conductor) for i in range(n)])


# ---------------------------------------------------------------------------
# the algebra itself

class LieAlgebra:
    """Finite-dimensional Lie algebra given by structure constants.

    ``table[i][j]`` is the coordinate vector of the bracket of basis
    elements i and j (0-based).  The Jacobi identity is verified exactly
    on construction unless explicitly skipped.
    """

    __slots__ = ("dim", "conductor", "name", "table")

    def __init__(self, dim: int, brackets: dict, conductor: int = 1,
                 name: str = "", validate: bool = True):
        n = dim
        m = conductor
        rows = [[None] * n for _ in range(n)]
        norm: dict[tuple[int, int], tuple] = {}
        for (i, j), val in brackets.items():
            if not (0 <= i < j < n):
                raise ShapeError(f"bracket key ({i},{j}) out of range/order")
            if isinstance(val, dict):
                vec = [scalar(0, m)] * n
                for k, s in val.items():
                    vec[k] = s if isinstance(s, CycScalar) else scalar(s, m)
                val = tuple(vec)
            else:
                val = tuple(v if isinstance(v, CycScalar) else scalar(v, m)
                            for v in val)
            if len(val) != n:
                raise ShapeError("bracket value has wrong length")
            norm[(i, j)] = val
        for v in norm.values():
            for x in v:
                m = math.lcm(m, x.conductor)
        zero = _zero_vec(n, m)
        for i in range(n):
            for j in range(n):
                rows[i][j] = zero
        for (i, j), v in norm.items():
            v = tuple(x.lift(m) for x in v)
            rows[i][j] = v
            rows[j][i] = tuple(-x for x in v)
        object.__setattr__(self, "dim", n)
        object.__setattr__(self, "conductor", m)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "table", tuple(tuple(r) for r in rows))
        if validate:
            bad = self._jacobi_defect()
            if bad is not None:
                (i, j, k), residual = bad
                raise JacobiViolation(
                    f"Jacobi fails on basis triple ({i + 1},{j + 1},{k + 1}): "
                    f"residual {[x.format() for x in residual]}")

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("LieAlgebra is immutable")

    def _jacobi_defect(self):
        n = self.dim
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    s = vec_add(
                        vec_add(self.bracket_vec(_unit_vec(n, i, self.conductor),
                                                 self.table[j][k]),
                                self.bracket_vec(_unit_vec(n, j, self.conductor),
                                                 self.table[k][i])),
                        self.bracket_vec(_unit_vec(n, k, self.conductor),
                                         self.table[i][j]))
                    if not vec_is_zero(s):
                        return (i, j, k), s
        return None

    # -- bracket machinery ------------------------------------------------

    def basis_vector(self, i: int) -> tuple:
        return _unit_vec(self.dim, i, self.conductor)

    def bracket_vec(self, x, y) -> tuple:
        n = self.dim
        out = _zero_vec(n, self.conductor)
        for i in range(n):
            xi = x[i]
            if xi.is_zero():
                continue
            for j in range(n):
                yj = y[j]
                if yj.is_zero() or i == j:
                    continue
                cell = self.table[i][j]
                coeff = xi * yj
                out = vec_add(out, vec_scale(cell, coeff))
        return out

    def adjoint(self, x) -> FieldMatrix:
        """Matrix of y ↦ [x, y] in the standard basis (columns = images)."""
        cols = [self.bracket_vec(x, self.basis_vector(j)) for j in range(self.dim)]
        return FieldMatrix.from_columns(cols)

    def subspace_bracket(self, u: Subspace, v: Subspace) -> Subspace:
        rows = []
        for a in u.rows:
            for b in v.rows:
                w = self.bracket_vec(a, b)
                if not vec_is_zero(w):
                    rows.append(w)
        return Subspace(self.dim, rows)

    def full_space(self) -> Subspace:
        return Subspace.full(self.dim, self.conductor)

    def derived_subalgebra(self) -> Subspace:
        return self.subspace_bracket(self.full_space(), self.full_space())

    # -- series and basic flags -------------------------------------------

    def series(self, kind: str) -> list[Subspace]:
        if kind == "derived":
            links = [self.full_space()]
            while True:
                nxt = self.subspace_bracket(links[-1], links[-1])
                if nxt == links[-1]:
                    break
                links.append(nxt)
                if nxt.is_zero():
                    break
            return links
        if kind == "lower_central":
            links = [self.full_space()]
            while True:
                nxt = self.subspace_bracket(self.full_space(), links[-1])
                if nxt == links[-1]:
                    break
                links.append(nxt)
                if nxt.is_zero():
                    break
            return links
        if kind == "upper_central":
            links = [Subspace(self.dim)]
            while True:
                nxt = self._center_preimage(links[-1])
                if nxt == links[-1]:
                    break
                links.append(nxt)
                if nxt.is_full():
                    break
            return links
        raise ValueError(f"unknown series kind: {kind}")

    def center(self) -> Subspace:
        rows = []
        for j in range(self.dim):
            # x ↦ [x, e_j], as a matrix in x
            mat = FieldMatrix.from_columns(
                [self.table[i][j] for i in range(self.dim)])
            rows.extend(mat.entries)
        return Subspace(self.dim, list(FieldMatrix.from_rows(rows).kernel().entries))

    def _center_preimage(self, z: Subspace) -> Subspace:
        if z.is_full():
            return z
        if z.is_zero():
            return self.center()
        q, lift, project = quotient_algebra(self, z)
        zq = q.center()
        rows = list(z.rows) + [lift(v) for v in zq.rows]
        return Subspace(self.dim, rows)

    def upper_central_limit(self) -> Subspace:
        return self.series("upper_central")[-1]

    def is_abelian(self) -> bool:
        return self.derived_subalgebra().is_zero()

    def is_solvable(self) -> bool:
        return self.series("derived")[-1].is_zero()

    def is_nilpotent(self) -> bool:
        return self.series("lower_central")[-1].is_zero()

    def lift(self, conductor: int) -> "LieAlgebra":
        if conductor == self.conductor:
            return self
        brackets = {}
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                brackets[(i, j)] = tuple(v.lift(conductor)
                                         for v in self.table[i][j])
        return LieAlgebra(self.dim, brackets, conductor, self.name,
                          validate=False)

    def __repr__(self):
        label = self.name or "LieAlgebra"
        return f"{label}(dim {self.dim}, conductor {self.conductor})"


def direct_sum(a: LieAlgebra, b: LieAlgebra, name: str = "") -> LieAlgebra:
    n = a.dim + b.dim
    brackets = {}
    for i in range(a.dim):
        for j in range(i + 1, a.dim):
            v = a.table[i][j]
            if not vec_is_zero(v):
                brackets[(i, j)] = tuple(v) + _zero_vec(b.dim, a.conductor)
    for i in range(b.dim):
        for j in range(i + 1, b.dim):
            v = b.table[i][j]
            if not vec_is_zero(v):
                brackets[(a.dim + i, a.dim + j)] = \
                    _zero_vec(a.dim, b.conductor) + tuple(v)
    return LieAlgebra(n, brackets, math.lcm(a.conductor, b.conductor),
                      name or f"{a.name}+{b.name}", validate=False)


def quotient_algebra(g: LieAlgebra, ideal: Subspace):
    """Quotient by an ideal, with lift/project maps.

    The quotient basis is the set of standard coordinates missed by the
    ideal's rref pivots.  Returns (algebra, lift, project) where project
    maps ambient vectors to quotient coordinates and lift does the reverse.
    """
    coords = ideal.complement_coords()
    qdim = len(coords)

    def project(vec):
        reduced = ideal.reduce(vec)
        return tuple(reduced[c] for c in coords)

    def lift(qvec):
        out = list(_zero_vec(g.dim, g.conductor))
        for c, val in zip(coords, qvec):
            out[c] = val
        return tuple(out)

    brackets = {}
    for a in range(qdim):
        for b in range(a + 1, qdim):
            w = project(g.bracket_vec(lift(_unit_vec(qdim, a, g.conductor)),
                                      lift(_unit_vec(qdim, b, g.conductor))))
            if not vec_is_zero(w):
                brackets[(a, b)] = w
    q = LieAlgebra(qdim, brackets, g.conductor,
                   name=(g.name + "/ideal") if g.name else "quotient",
                   validate=False)
    return q, lift, project


# ---------------------------------------------------------------------------
# exact root extraction (used by the nilradical flag and friends)

def _galois_poly(p: CycPolynomial, k: int) -> CycPolynomial:
    return CycPolynomial([galois_conjugate(c, k) for c in p.coeffs],
                         p.conductor)


def _rational_poly_roots(coeffs: list[Fraction]) -> list[Fraction]:
    """All rational roots of a rational-coefficient polynomial."""
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) <= 1:
        return []
    roots = []
    if coeffs[0] == 0:
        roots.append(Fraction(0))
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
    den = math.lcm(*[c.denominator for c in coeffs])
    ints = [int(c * den) for c in coeffs]
    a0, an = abs(ints[0]), abs(ints[-1])
    if a0 == 0:
        return sorted(set(roots))

    def divisors_of(v):
        out = []
        d = 1
        while d * d <= v:
            if v % d == 0:
                out.append(d)
                out.append(v // d)
            d += 1
        return sorted(set(out))

    for p in divisors_of(a0):
        for q in divisors_of(an):
            if math.gcd(p, q) != 1:
                continue
            for cand in (Fraction(p, q), Fraction(-p, q)):
                acc = Fraction(0)
                for c in reversed(ints):
                    acc = acc * cand + c
                if acc == 0:
                    roots.append(cand)
    return sorted(set(roots))


def _norm_to_rationals(p: CycPolynomial) -> list[Fraction]:
    """Product of all Galois conjugates of p; rational coefficients."""
    m = p.conductor
    prod = CycPolynomial([scalar(1, m)])
    for k in range(1, m + 1):
        if math.gcd(k, m) == 1:
            prod = prod * _galois_poly(p, k)
    out = []
    for c in prod.coeffs:
        if not c.is_rational():
            raise AssertionError("Galois norm polynomial must be rational")
        out.append(c.as_fraction())
    return out


def _sqrt_in_field(delta: CycScalar):
    """Exact square root of delta in its own field, or None."""
    if delta.is_zero():
        return scalar(0, delta.conductor)
    if delta.is_rational():
        return rational_sqrt(delta.as_fraction(), delta.conductor)
    # non-rational delta: per-embedding numeric solve, then exact verification
    import mpmath
    from .cyclofield import numeric_eval
    m = delta.conductor
    units = [k for k in range(1, m + 1) if math.gcd(k, m) == 1]
    phi = len(units)
    with mpmath.workdps(60):
        targets = []
        for k in units:
            val = numeric_eval(galois_conjugate(delta, k), 50)
            targets.append(mpmath.sqrt(val))
        basis_vals = [[numeric_eval(zeta(m) ** (i * k % m), 50)
                       for i in range(phi)] for k in units]
        for pattern in range(1 << (phi - 1)):
            rhs = []
            for idx in range(phi):
                # global sign fixed on the first embedding
                sign = -1 if idx > 0 and (pattern >> (idx - 1)) & 1 else 1
                rhs.append(targets[idx] * sign)
            try:
                sol = mpmath.lu_solve(mpmath.matrix(basis_vals), mpmath.matrix(rhs))
            except Exception:
                continue
            coeffs = []
            ok = True
            for v in sol:
                if abs(mpmath.im(v)) > mpmath.mpf(10) ** (-20):
                    ok = False
                    break
                fr = Fraction(str(mpmath.nstr(mpmath.re(v), 30))).limit_denominator(10 ** 12)
                coeffs.append(fr)
            if not ok:
                continue
            cand = CycScalar(m, [Fraction(c) for c in coeffs])
            if cand * cand == delta:
                return cand
    return None


def roots_in_field(p: CycPolynomial) -> list[CycScalar]:
    """All roots of p lying in its own coefficient field.

    Found via rational-root extraction on the Galois norm (tier 1),
    monomial candidates c·ζ^j (tier 2), and the quadratic formula with
    in-field square roots (tier 3, on a remaining quadratic factor).
    Raises SplitFailure — with a suggested larger conductor when one is
    known — only when no root at all lies in the field.
    """
    m = p.conductor
    if p.is_zero():
        raise ValueError("zero polynomial")
    # squarefree reduction
    g = p.gcd(p.derivative())
    sf = (p // g) if g.degree > 0 else p
    roots: list[CycScalar] = []
    work = sf
    if work.degree >= 1 and work.coeffs[0].is_zero():
        roots.append(scalar(0, m))
        while work.coeffs[0].is_zero():
            work = work // CycPolynomial([scalar(0, m), scalar(1, m)])
    if work.degree == 0:
        return roots
    # tier 1: rational roots through the norm polynomial
    for r in _rational_poly_roots(_norm_to_rationals(work)):
        cand = scalar(r, m)
        if work.evaluate(cand).is_zero():
            roots.append(cand)
    # tier 2: c·ζ^j with c rational
    if m > 1:
        for j in range(1, m):
            zj = zeta(m) ** j
            shifted = work.scale_argument(zj)
            for r in _rational_poly_roots(_norm_to_rationals(shifted)):
                if r == 0:
                    continue
                cand = scalar(r, m) * zj
                if work.evaluate(cand).is_zero() and cand not in roots:
                    roots.append(cand)
    # divide out everything found so far
    rem = work
    for r in roots:
        if r.is_zero():
            continue
        q, s = divmod(rem, CycPolynomial([-r, scalar(1, m)]))
        if s.is_zero():
            rem = q
    # linear remainder: its root is free
    if rem.degree == 1:
        cand = -(rem.coeffs[0] / rem.coeffs[1])
        if cand not in roots:
            roots.append(cand)
    # tier 3: quadratic remainder
    if rem.degree == 2:
        a, b, c = rem.coeffs[2], rem.coeffs[1], rem.coeffs[0]
        delta = b * b - a * c * 4
        root = _sqrt_in_field(delta)
        if root is None and not roots:
            suggested = None
            if delta.is_rational():
                suggested = math.lcm(m, sqrt_conductor(delta.as_fraction()))
            raise SplitFailure(
                "quadratic factor does not split over the working field",
                suggested_conductor=suggested)
        if root is not None:
            inv = (a * 2).inverse()
            for s in (root, -root):
                cand = (-b + s) * inv
                if rem.evaluate(cand).is_zero() and cand not in roots:
                    roots.append(cand)
    if not roots:
        raise SplitFailure(
            f"no root of a degree-{sf.degree} factor lies in the working field",
            suggested_conductor=None)
    return roots


# ---------------------------------------------------------------------------
# nilradical via a constructive weight flag

def _ideal_chain_vectors(g: LieAlgebra) -> list[tuple]:
    """Vectors x_1..x_n such that each prefix span is an ideal of the next.

    Built by refining the derived series from the bottom: every subspace
    pinched between consecutive derived terms is an ideal in anything
    between itself and the larger term.
    """
    series = g.series("derived")
    if not series[-1].is_zero():
        raise NotSolvable("derived series does not terminate")
    chain: list[tuple] = []
    span_rows: list[tuple] = []
    def absorbed(vec):
        if not span_rows:
            return vec_is_zero(vec)
        return express_in_rows(span_rows, vec) is not None

    for member in reversed(series):
        # extend the current span to cover `member`
        for cand in member.rows:
            if not absorbed(cand):
                chain.append(cand)
                span_rows.append(cand)
    # finally extend to the whole algebra with standard vectors
    for i in range(g.dim):
        cand = g.basis_vector(i)
        if not absorbed(cand):
            chain.append(cand)
            span_rows.append(cand)
    if len(chain) != g.dim:
        raise AssertionError("ideal chain does not exhaust the algebra")
    return chain


def _common_eigenvector(g: LieAlgebra, mod_rows: list[tuple]):
    """A vector that is a simultaneous eigenvector of the adjoint action on
    the quotient of g by span(mod_rows); returns (ambient lift, weights on
    the ideal-chain vectors)."""
    ideal = Subspace(g.dim, mod_rows)
    coords = ideal.complement_coords()
    qdim = len(coords)

    def project(vec):
        reduced = ideal.reduce(vec)
        return tuple(reduced[c] for c in coords)

    def lift(qvec):
        out = list(_zero_vec(g.dim, g.conductor))
        for c, val in zip(coords, qvec):
            out[c] = val
        return tuple(out)

    def action(x):
        cols = [project(g.bracket_vec(x, lift(_unit_vec(qdim, j, g.conductor))))
                for j in range(qdim)]
        return FieldMatrix.from_columns(cols)

    chain = _ideal_chain_vectors(g)
    w_rows = [_unit_vec(qdim, i, g.conductor) for i in range(qdim)]
    lam: list[CycScalar] = []
    for x in chain:
        op = action(x)
        # invariance of the running joint eigenspace (holds by the weight
        # invariance argument for ideal chains in characteristic zero)
        r = restrict_operator(op, w_rows)
        ev = sorted(roots_in_field(r.char_poly()),
                    key=lambda s: (s.conductor, s.coeffs))[0]
        shifted = r - FieldMatrix.diagonal([ev] * len(w_rows))
        new_rows = []
        for combo in shifted.kernel().entries:
            vec = _zero_vec(qdim, g.conductor)
            for c, row in zip(combo, w_rows):
                if not c.is_zero():
                    vec = vec_add(vec, vec_scale(row, c))
            new_rows.append(vec)
        w_rows = list(Subspace(qdim, new_rows).rows)
        if not w_rows:
            raise AssertionError("joint eigenspace collapsed to zero")
        lam.append(ev)
    return lift(w_rows[0]), chain, lam


def nilradical(g: LieAlgebra) -> Subspace:
    """The largest nilpotent ideal of a solvable algebra.

    Computed by building a full flag of ideals through repeated
    common-eigenvector extraction; the flag's diagonal weights are linear
    functionals, and the nilradical is the intersection of their kernels.
    Raises SplitFailure when an adjoint eigenvalue lives outside the
    working field (callers may lift the conductor and retry).
    """
    if not g.is_solvable():
        raise NotSolvable("nilradical implemented for solvable algebras only")
    if g.is_nilpotent():
        return g.full_space()
    flag_rows: list[tuple] = []
    functional_rows: list[tuple] = []
    while len(flag_rows) < g.dim:
        w, chain, lam = _common_eigenvector(g, flag_rows)
        flag_rows.append(w)
        # express the weight as a functional on standard coordinates:
        # lam gives values on the chain vectors; solve chainᵀ · f = lam
        chain_mat = FieldMatrix.from_rows(chain)
        f = solve_right(chain_mat, lam)
        if f is None:
            raise AssertionError("weight functional reconstruction failed")
        functional_rows.append(f)
    kern = FieldMatrix.from_rows(functional_rows).kernel()
    nil = Subspace(g.dim, list(kern.entries))
    _certify_nilradical(g, nil)
    return nil


def _certify_nilradical(g: LieAlgebra, nil: Subspace) -> None:
    full = g.full_space()
    if not nil.contains_subspace(g.derived_subalgebra()):
        raise AssertionError("nilradical candidate misses the derived algebra")
    if not nil.contains_subspace(g.subspace_bracket(full, nil)):
        raise AssertionError("nilradical candidate is not an ideal")
    # nilpotency of the subalgebra: iterated brackets must die out
    current = nil
    for _ in range(g.dim + 1):
        if current.is_zero():
            break
        current = g.subspace_bracket(nil, current)
    else:
        raise AssertionError("nilradical candidate is not nilpotent")
    for c in nil.complement_coords():
        ad = g.adjoint(g.basis_vector(c))
        if (ad ** g.dim).is_zero():
            raise AssertionError(
                "complement vector has nilpotent adjoint; candidate too small")


_LIFT_MULTIPLIERS = (4, 3, 2, 6, 12, 8, 24)


def nilradical_lifted(g: LieAlgebra, conductor_limit: int = 1000):
    """nilradical with automatic conductor lifting on split failures.

    Returns (subspace over the ORIGINAL conductor, conductor used).  The
    nilradical is Galois-stable, so its canonical basis always descends
    back to the starting field.
    """
    tried = set()
    queue = []
    current = g
    while True:
        try:
            nil = nilradical(current)
        except SplitFailure as exc:
            tried.add(current.conductor)
            if not queue:
                schedule = []
                if exc.suggested_conductor:
                    schedule.append(exc.suggested_conductor)
                schedule.extend(math.lcm(g.conductor, g.conductor * k)
                                for k in _LIFT_MULTIPLIERS)
                queue = [m for m in schedule
                         if m not in tried and m <= conductor_limit]
            else:
                if exc.suggested_conductor and \
                        exc.suggested_conductor not in tried and \
                        exc.suggested_conductor <= conductor_limit:
                    queue.insert(0, exc.suggested_conductor)
            queue = [m for m in queue if m not in tried]
            if not queue:
                raise SplitFailure(
                    f"nilradical needs a conductor above the limit "
                    f"{conductor_limit}", suggested_conductor=None) from exc
            current = g.lift(queue.pop(0))
            continue
        if current.conductor == g.conductor:
            return nil, current.conductor
        lowered = []
        for row in nil.rows:
            low = tuple(try_lower_conductor(v, g.conductor) for v in row)
            if any(v is None for v in low):
                raise AssertionError(
                    "nilradical basis failed to descend to the base field")
            lowered.append(low)
        return Subspace(g.dim, lowered), current.conductor


# ---------------------------------------------------------------------------
# unimodularity

@dataclass
class UnimodularityReport:
    unimodular: bool
    strongly_unimodular: bool
    flag: str | None
    table: list[dict]

    def to_json(self) -> dict:
        return {
            "unimodular": self.unimodular,
            "strongly_unimodular": self.strongly_unimodular,
            **({"flag": self.flag} if self.flag else {}),
            "table": self.table,
        }


def unimodularity_report(g: LieAlgebra,
                         conductor_limit: int | None = None) -> UnimodularityReport:
    """Trace diagnostics: plain unimodularity, and the stronger condition
    that every basis adjoint has zero trace on each layer of the
    nilradical's central filtration."""
    table = []
    unimodular = True
    for i in range(g.dim):
        tr = g.adjoint(g.basis_vector(i)).trace()
        table.append({"x": i + 1, "space": "g", "trace": tr.format()})
        if not tr.is_zero():
            unimodular = False
    if not g.is_solvable():
        return UnimodularityReport(unimodular, False, "not solvable", table)
    if conductor_limit is None:
        nil = nilradical(g)
    else:
        nil, _ = nilradical_lifted(g, conductor_limit)
    layers = [nil]
    while not layers[-1].is_zero():
        layers.append(g.subspace_bracket(nil, layers[-1]))
    strongly = True
    for k in range(len(layers) - 1):
        upper, lower = layers[k], layers[k + 1]
        for i in range(g.dim):
            ad = g.adjoint(g.basis_vector(i))
            tr_up = restrict_operator(ad, list(upper.rows)).trace() \
                if not upper.is_zero() else scalar(0, g.conductor)
            tr_low = restrict_operator(ad, list(lower.rows)).trace() \
                if not lower.is_zero() else scalar(0, g.conductor)
            tr = tr_up - tr_low
            table.append({"x": i + 1, "space": f"n^{k + 1}/n^{k + 2}",
                          "trace": tr.format()})
            if not tr.is_zero():
                strongly = False
    return UnimodularityReport(unimodular, strongly, None, table)


# ---------------------------------------------------------------------------
# derivations and the Engel chain

def derivation_algebra(g: LieAlgebra) -> SolutionSpace:
    """Basis of all matrices satisfying the Leibniz identity on basis pairs."""
    n = g.dim
    zero = scalar(0, g.conductor)
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            c = g.table[i][j]
            for r in range(n):
                row = [zero] * (n * n)
                # D applied to [e_i, e_j]: coefficient c_q on D_{r,q}
                for q in range(n):
                    if not c[q].is_zero():
                        row[r * n + q] = row[r * n + q] + c[q]
                # minus [D e_i, e_j]: D_{p,i} picks up [e_p, e_j]_r
                for p in range(n):
                    v = g.table[p][j][r]
                    if not v.is_zero():
                        row[p * n + i] = row[p * n + i] - v
                # minus [e_i, D e_j]: D_{p,j} picks up [e_i, e_p]_r
                for p in range(n):
                    v = g.table[i][p][r]
                    if not v.is_zero():
                        row[p * n + j] = row[p * n + j] - v
                rows.append(row)
    if not rows:
        basis = [FieldMatrix([[scalar(1) if (i, j) == (a, b) else scalar(0)
                               for j in range(n)] for i in range(n)])
                 for a in range(n) for b in range(n)]
        return SolutionSpace(dimension=n * n, basis=basis)
    kern = FieldMatrix.from_rows(rows).kernel()
    basis = [FieldMatrix([[v[i * n + j] for j in range(n)] for i in range(n)])
             for v in kern.entries]
    return SolutionSpace(dimension=len(basis), basis=basis)


def is_derivation(g: LieAlgebra, d: FieldMatrix) -> bool:
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            lhs = d.matvec(g.table[i][j])
            rhs = vec_add(
                g.bracket_vec(d.matvec(g.basis_vector(i)), g.basis_vector(j)),
                g.bracket_vec(g.basis_vector(i), d.matvec(g.basis_vector(j))))
            if lhs != rhs:
                return False
    return True


@dataclass
class CnlaCertificate:
    is_cnla: bool
    chain_dims: list[int] | None
    non_nilpotent_derivation: FieldMatrix | None


def is_cnla(g: LieAlgebra, seed: int = 0, budget: int = 128) -> CnlaCertificate:
    """Every derivation nilpotent?  Decided by the derivation-image chain
    V_{k+1} = span of D(V_k) over the derivation basis: it reaches zero
    exactly when the derivation algebra acts nilpotently (Engel)."""
    ders = derivation_algebra(g)
    current = g.full_space()
    dims = [current.dim]
    while not current.is_zero():
        rows = []
        for d in ders.basis:
            for v in current.rows:
                w = d.matvec(v)
                if not vec_is_zero(w):
                    rows.append(w)
        nxt = Subspace(g.dim, rows)
        if nxt == current:
            break
        current = nxt
        dims.append(current.dim)
    if current.is_zero():
        return CnlaCertificate(True, dims, None)
    # find an explicitly non-nilpotent derivation
    tn = CycPolynomial([scalar(0, g.conductor)] * g.dim + [scalar(1, g.conductor)])
    for d in ders.basis:
        if d.char_poly() != tn:
            return CnlaCertificate(False, None, d)
    rng = random.Random(seed)
    for _ in range(budget):
        cand = FieldMatrix.zeros(g.dim, g.dim, g.conductor)
        for d in ders.basis:
            c = rng.randint(-3, 3)
            if c:
                cand = cand + d.scale(c)
        if cand.char_poly() != tn:
            return CnlaCertificate(False, None, cand)
    raise SamplingExhausted(
        "derivation chain is non-vanishing but no non-nilpotent witness found")


# ---------------------------------------------------------------------------
# automorphism certification

@dataclass
class AutomorphismReport:
    map: FieldMatrix
    is_morphism: bool
    det: CycScalar
    det_phi_minus_id: CycScalar
    order: object  # int | "exceeds-bound" | None
    is_fpf: bool

    def to_json(self) -> dict:
        return {
            "matrix": [[v.format() for v in row] for row in self.map.entries],
            "conductor": self.map.conductor,
            "is_morphism": self.is_morphism,
            "det": self.det.format(),
            "det_phi_minus_id": self.det_phi_minus_id.format(),
            "order": self.order,
            "is_fpf": self.is_fpf,
        }


def check_automorphism(g: LieAlgebra, phi: FieldMatrix,
                       order_bound: int = 1000) -> AutomorphismReport:
    if phi.rows != g.dim or phi.cols != g.dim:
        raise ShapeError("automorphism candidate has wrong shape")
    m = math.lcm(g.conductor, phi.conductor)
    glift = g.lift(m)
    phi = phi.lift(m)
    morphism = True
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            lhs = phi.matvec(glift.table[i][j])
            rhs = glift.bracket_vec(phi.column(i), phi.column(j))
            if lhs != rhs:
                morphism = False
                break
        if not morphism:
            break
    det = phi.det()
    diff = phi - FieldMatrix.identity(g.dim, m)
    det_diff = diff.det()
    order = None
    if not det.is_zero():
        order = matrix_order(phi, order_bound)
    return AutomorphismReport(
        map=phi,
        is_morphism=morphism,
        det=det,
        det_phi_minus_id=det_diff,
        order=order,
        is_fpf=(morphism and not det.is_zero() and not det_diff.is_zero()),
    )
