"""Exact linear algebra over cyclotomic fields.

Matrices are immutable, act on column vectors, and carry a single common
conductor for all entries.  Similarity is decided through invariant
factors (Smith normal form of t*I - A over the polynomial ring), so no
eigenvalue ever needs to exist in the working field.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .cyclofield import CycPolynomial, CycScalar, scalar, zeta
from .errors import (
    NotNilpotentMatrix,
    NotSimilar,
    SamplingExhausted,
    ShapeError,
    SingularMatrix,
)

ORDER_EXCEEDS_BOUND = "exceeds-bound"

Vector = tuple  # tuple[CycScalar, ...]


def _coerce(value, conductor: int = 1) -> CycScalar:
    if isinstance(value, CycScalar):
        return value
    if isinstance(value, str):
        from .cyclofield import parse_scalar
        return parse_scalar(value, conductor)
    return scalar(value, 1)


class FieldMatrix:
    """Dense matrix with CycScalar entries, all at one conductor."""

    __slots__ = ("rows", "cols", "conductor", "entries", "_memo")

    def __init__(self, rows_of_entries, conductor: int | None = None,
                 cols: int | None = None):
        data = [[_coerce(v, conductor or 1) for v in row] for row in rows_of_entries]
        r = len(data)
        c = len(data[0]) if r else (cols or 0)
        if any(len(row) != c for row in data):
            raise ShapeError("ragged rows")
        m = conductor or 1
        for row in data:
            for v in row:
                m = math.lcm(m, v.conductor)
        ents = tuple(tuple(v.lift(m) for v in row) for row in data)
        object.__setattr__(self, "rows", r)
        object.__setattr__(self, "cols", c)
        object.__setattr__(self, "conductor", m)
        object.__setattr__(self, "entries", ents)
        object.__setattr__(self, "_memo", {})

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("FieldMatrix is immutable")

    # -- constructors --------------------------------------------------

    @staticmethod
    def identity(n: int, conductor: int = 1) -> "FieldMatrix":
        one, zero = scalar(1, conductor), scalar(0, conductor)
        return FieldMatrix([[one if i == j else zero for j in range(n)] for i in range(n)])

    @staticmethod
    def zeros(r: int, c: int, conductor: int = 1) -> "FieldMatrix":
        zero = scalar(0, conductor)
        return FieldMatrix([[zero] * c for _ in range(r)], cols=c)

    @staticmethod
    def diagonal(values, conductor: int = 1) -> "FieldMatrix":
        vals = [_coerce(v, conductor) for v in values]
        n = len(vals)
        zero = scalar(0, conductor)
        return FieldMatrix(
            [[vals[i] if i == j else zero for j in range(n)] for i in range(n)])

    @staticmethod
    def block_diagonal(blocks) -> "FieldMatrix":
        blocks = list(blocks)
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        zero = scalar(0)
        out = [[zero] * m for _ in range(n)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[r0 + i][c0 + j] = b.entries[i][j]
            r0 += b.rows
            c0 += b.cols
        return FieldMatrix(out)

    @staticmethod
    def from_rows(vectors) -> "FieldMatrix":
        return FieldMatrix([list(v) for v in vectors])

    @staticmethod
    def from_columns(vectors) -> "FieldMatrix":
        return FieldMatrix([list(v) for v in vectors]).transpose()

    # -- basics ---------------------------------------------------------

    def lift(self, conductor: int) -> "FieldMatrix":
        if conductor == self.conductor:
            return self
        return FieldMatrix(
            [[v.lift(conductor) for v in row] for row in self.entries])

    def is_square(self) -> bool:
        return self.rows == self.cols

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def transpose(self) -> "FieldMatrix":
        return FieldMatrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def trace(self) -> CycScalar:
        if not self.is_square():
            raise ShapeError("trace requires a square matrix")
        acc = scalar(0, self.conductor)
        for i in range(self.rows):
            acc = acc + self.entries[i][i]
        return acc

    def is_zero(self) -> bool:
        return all(v.is_zero() for row in self.entries for v in row)

    def __eq__(self, other):
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        m = math.lcm(self.conductor, other.conductor)
        a, b = self.lift(m), other.lift(m)
        return a.entries == b.entries

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError("shape mismatch in +")
        m = math.lcm(self.conductor, other.conductor)
        a, b = self.lift(m), other.lift(m)
        return FieldMatrix([[x + y for x, y in zip(ra, rb)]
                            for ra, rb in zip(a.entries, b.entries)])

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return FieldMatrix([[-v for v in row] for row in self.entries])

    def scale(self, c) -> "FieldMatrix":
        c = _coerce(c)
        return FieldMatrix([[v * c for v in row] for row in self.entries])

    def __mul__(self, other):
        if isinstance(other, FieldMatrix):
            if self.cols != other.rows:
                raise ShapeError("shape mismatch in *")
            m = math.lcm(self.conductor, other.conductor)
            a, b = self.lift(m), other.lift(m)
            bt = b.transpose().entries
            zero = scalar(0, m)
            out = []
            for i in range(a.rows):
                arow = a.entries[i]
                orow = []
                for j in range(b.cols):
                    bcol = bt[j]
                    acc = zero
                    for k in range(a.cols):
                        x = arow[k]
                        if not x.is_zero():
                            y = bcol[k]
                            if not y.is_zero():
                                acc = acc + x * y
                    orow.append(acc)
                out.append(orow)
            return FieldMatrix(out)
        return self.scale(other)

    __rmul__ = scale

    def __pow__(self, n: int):
        if not self.is_square():
            raise ShapeError("powers need a square matrix")
        if n < 0:
            return self.inverse() ** (-n)
        result = FieldMatrix.identity(self.rows, self.conductor)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def matvec(self, v) -> Vector:
        if len(v) != self.cols:
            raise ShapeError("vector length mismatch")
        zero = scalar(0, self.conductor)
        out = []
        for i in range(self.rows):
            acc = zero
            for k, x in enumerate(self.entries[i]):
                if not x.is_zero():
                    y = v[k]
                    if isinstance(y, (int, Fraction)):
                        y = scalar(y)
                    if not y.is_zero():
                        acc = acc + x * y
            out.append(acc)
        return tuple(out)

    def submatrix(self, row_idx, col_idx) -> "FieldMatrix":
        return FieldMatrix([[self.entries[i][j] for j in col_idx] for i in row_idx])

    def to_strings(self) -> list[list[str]]:
        return [[v.format() for v in row] for row in self.entries]

    def __repr__(self):
        body = "; ".join(", ".join(v.format() for v in row) for row in self.entries)
        return f"FieldMatrix[{self.rows}x{self.cols}]({body})"

    # -- elimination ----------------------------------------------------

    def rref(self) -> tuple["FieldMatrix", list[int]]:
        got = self._memo.get("rref")
        if got is None:
            got = _rref(list(self.entries))
            self._memo["rref"] = got
        return got

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel(self) -> "FieldMatrix":
        """Basis of the right null space; returned as the ROWS of a matrix."""
        red, pivots = self.rref()
        free = [j for j in range(self.cols) if j not in pivots]
        zero = scalar(0, self.conductor)
        one = scalar(1, self.conductor)
        rows = []
        for f in free:
            v = [zero] * self.cols
            v[f] = one
            for r, p in enumerate(pivots):
                v[p] = -red.entries[r][f]
            rows.append(tuple(v))
        if not rows:
            return FieldMatrix.zeros(0, self.cols, self.conductor)
        return FieldMatrix.from_rows(rows)

    def column_space(self) -> "FieldMatrix":
        """Basis of the column space, as rows (row-reduced, canonical)."""
        red, pivots = self.transpose().rref()
        return FieldMatrix.from_rows([red.entries[i] for i in range(len(pivots))]) \
            if pivots else FieldMatrix.zeros(0, self.rows, self.conductor)

    def det(self) -> CycScalar:
        if not self.is_square():
            raise ShapeError("det requires a square matrix")
        n = self.rows
        m = [list(row) for row in self.entries]
        sign = 1
        acc = scalar(1, self.conductor)
        for col in range(n):
            piv = next((r for r in range(col, n) if not m[r][col].is_zero()), None)
            if piv is None:
                return scalar(0, self.conductor)
            if piv != col:
                m[col], m[piv] = m[piv], m[col]
                sign = -sign
            pivval = m[col][col]
            acc = acc * pivval
            inv = pivval.inverse()
            for r in range(col + 1, n):
                f = m[r][col]
                if not f.is_zero():
                    f = f * inv
                    for c in range(col, n):
                        m[r][c] = m[r][c] - f * m[col][c]
        return acc if sign > 0 else -acc

    def inverse(self) -> "FieldMatrix":
        if not self.is_square():
            raise ShapeError("inverse requires a square matrix")
        n = self.rows
        aug = [list(row) + list(FieldMatrix.identity(n, self.conductor).entries[i])
               for i, row in enumerate(self.entries)]
        red, pivots = _rref(aug)
        if pivots != list(range(n)):
            raise SingularMatrix("matrix is not invertible")
        return FieldMatrix([row[n:] for row in red.entries])

    # -- derived invariants ----------------------------------------------

    def char_poly(self) -> CycPolynomial:
        got = self._memo.get("charpoly")
        if got is None:
            got = _char_poly(self)
            self._memo["charpoly"] = got
        return got

    def invariant_factors(self) -> list[CycPolynomial]:
        got = self._memo.get("invfac")
        if got is None:
            got = _invariant_factors(self)
            self._memo["invfac"] = got
        return got

    def min_poly(self) -> CycPolynomial:
        """Minimal polynomial (largest invariant factor would also do;
        computed independently by a Krylov-style dependency search)."""
        got = self._memo.get("minpoly")
        if got is not None:
            return got
        n = self.rows
        powers = [FieldMatrix.identity(n, self.conductor)]
        while True:
            rows = [tuple(v for row in p.entries for v in row) for p in powers]
            stacked = FieldMatrix.from_rows(rows)
            if stacked.rank() < len(powers):
                coeffs = _dependency(rows)
                p = CycPolynomial(coeffs).monic()
                self._memo["minpoly"] = p
                return p
            powers.append(powers[-1] * self)


def _rref(rows) -> tuple[FieldMatrix, list[int]]:
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, nrows) if not m[i][col].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][col].inverse()
        m[r] = [v * inv for v in m[r]]
        for i in range(nrows):
            if i != r and not m[i][col].is_zero():
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return FieldMatrix(m) if nrows else FieldMatrix.zeros(0, 0), pivots


def _dependency(rows) -> list[CycScalar]:
    """Coefficients expressing the last row through the earlier ones.

    Returns c with sum c[i]*rows[i] = 0 and c[-1] = 1 (the last row is
    assumed dependent on the others).
    """
    *prev, last = rows
    if not prev:
        return [scalar(1)]
    mat = FieldMatrix.from_rows(prev).transpose()
    sol = solve_right(mat, last)
    if sol is None:
        raise AssertionError("dependency expected but not found")
    return [-c for c in sol] + [scalar(1)]


def solve_right(a: FieldMatrix, b) -> Vector | None:
    """One solution x of A x = b, or None when inconsistent."""
    m = math.lcm(a.conductor, max((v.conductor for v in b), default=1))
    al = a.lift(m)
    bl = [(_coerce(v)).lift(m) for v in b]
    aug = [list(al.entries[i]) + [bl[i]] for i in range(a.rows)]
    red, pivots = _rref(aug)
    for i in range(len(pivots)):
        if pivots[i] == a.cols:
            return None  # pivot in the RHS column: inconsistent
    zero = scalar(0, m)
    x = [zero] * a.cols
    for i, p in enumerate(pivots):
        x[p] = red.entries[i][a.cols]
    return tuple(x)


def express_in_rows(basis_rows, vec) -> Vector | None:
    """Coordinates of ``vec`` in the span of ``basis_rows`` (or None)."""
    if not basis_rows:
        return () if all(_coerce(v).is_zero() for v in vec) else None
    mat = FieldMatrix.from_rows(basis_rows).transpose()
    return solve_right(mat, vec)


def restrict_operator(a: FieldMatrix, basis_rows) -> FieldMatrix:
    """Matrix of A on an A-invariant subspace, in the given row basis."""
    cols = []
    for v in basis_rows:
        image = a.matvec(v)
        coords = express_in_rows(basis_rows, image)
        if coords is None:
            raise ShapeError("subspace is not invariant under the operator")
        cols.append(coords)
    return FieldMatrix.from_columns(cols)


def _char_poly(a: FieldMatrix) -> CycPolynomial:
    if not a.is_square():
        raise ShapeError("char_poly requires a square matrix")
    n = a.rows
    if n == 0:
        return CycPolynomial([scalar(1)])
    # Faddeev-LeVerrier: division-free except by integers (char 0 is fine)
    coeffs = [scalar(0, a.conductor)] * (n + 1)
    coeffs[n] = scalar(1, a.conductor)
    m = FieldMatrix.identity(n, a.conductor)
    for k in range(1, n + 1):
        am = a * m
        ck = -(am.trace() / k)
        coeffs[n - k] = ck
        if k < n:
            m = am + FieldMatrix.diagonal([ck] * n)
    return CycPolynomial(coeffs)


# ---------------------------------------------------------------------------
# Smith normal form over the polynomial ring F[t]

def _poly_matrix_of(a: FieldMatrix) -> list[list[CycPolynomial]]:
    """t*I - A as a mutable polynomial matrix."""
    n = a.rows
    one = scalar(1, a.conductor)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(CycPolynomial([-a.entries[i][j], one]))
            else:
                row.append(CycPolynomial([-a.entries[i][j]]))
        out.append(row)
    return out


def smith_normal_form(mat: list[list[CycPolynomial]]) -> list[CycPolynomial]:
    """Diagonal of the Smith normal form over F[t], monic, with the
    divisibility chain d1 | d2 | ... enforced."""
    m = [row[:] for row in mat]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    diag: list[CycPolynomial] = []
    top = 0
    while top < min(nr, nc):
        # locate the minimal-degree nonzero entry in the working block
        best = None
        for i in range(top, nr):
            for j in range(top, nc):
                if not m[i][j].is_zero():
                    if best is None or m[i][j].degree < m[best[0]][best[1]].degree:
                        best = (i, j)
        if best is None:
            break
        bi, bj = best
        m[top], m[bi] = m[bi], m[top]
        for row in m:
            row[top], row[bj] = row[bj], row[top]
        while True:
            # column clearing
            dirty = False
            for i in range(top + 1, nr):
                if m[i][top].is_zero():
                    continue
                q, r = divmod(m[i][top], m[top][top])
                for j in range(top, nc):
                    m[i][j] = m[i][j] - q * m[top][j]
                if not r.is_zero():
                    m[top], m[i] = m[i], m[top]
                    dirty = True
            if dirty:
                continue
            # row clearing
            for j in range(top + 1, nc):
                if m[top][j].is_zero():
                    continue
                q, r = divmod(m[top][j], m[top][top])
                for i in range(top, nr):
                    m[i][j] = m[i][j] - q * m[i][top]
                if not r.is_zero():
                    for row in m:
                        row[top], row[j] = row[j], row[top]
                    dirty = True
                    break
            if dirty:
                continue
            # pivot must divide every remaining entry
            offender = None
            for i in range(top + 1, nr):
                for j in range(top + 1, nc):
                    if not (m[i][j] % m[top][top]).is_zero():
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            for j in range(top, nc):
                m[top][j] = m[top][j] + m[offender][j]
        diag.append(m[top][top].monic())
        top += 1
    # pad with zeros if the matrix was singular as a polynomial matrix
    while len(diag) < min(nr, nc):
        diag.append(CycPolynomial.zero())
    return diag


def _invariant_factors(a: FieldMatrix) -> list[CycPolynomial]:
    if not a.is_square():
        raise ShapeError("invariant factors require a square matrix")
    if a.rows == 0:
        return []
    diag = smith_normal_form(_poly_matrix_of(a))
    # sanity: product of the factors is the characteristic polynomial
    prod = CycPolynomial([scalar(1, a.conductor)])
    for d in diag:
        prod = prod * d
    if prod.monic() != a.char_poly().monic():
        raise AssertionError("invariant factor product mismatch")
    return diag


def are_similar(a: FieldMatrix, b: FieldMatrix) -> bool:
    """Exact similarity over the working field, via invariant factors."""
    if a.rows != b.rows or not a.is_square() or not b.is_square():
        return False
    if a.char_poly() != b.char_poly():
        return False
    return a.invariant_factors() == b.invariant_factors()


# ---------------------------------------------------------------------------
# Fitting decomposition and nilpotent structure

def fitting_split(a: FieldMatrix) -> tuple[FieldMatrix, FieldMatrix]:
    """Bases (as rows) of ker(A^n) and im(A^n): the generalized null part
    and the part where A acts invertibly."""
    if not a.is_square():
        raise ShapeError("fitting_split requires a square matrix")
    p = a ** a.rows
    null_rows = p.kernel()
    image_rows = p.column_space()
    if null_rows.rows + image_rows.rows != a.rows:
        raise AssertionError("fitting parts do not fill the space")
    if null_rows.rows and image_rows.rows:
        stacked = FieldMatrix.from_rows(
            list(null_rows.entries) + list(image_rows.entries))
        if stacked.rank() != a.rows:
            raise AssertionError("fitting parts are not independent")
    return null_rows, image_rows


def nilpotent_jordan_chains(n_mat: FieldMatrix) -> list[list[Vector]]:
    """Jordan chains of a nilpotent matrix, longest first.

    Each chain is [v, Nv, N^2 v, ...]; in the concatenated basis the
    operator is a direct sum of shift blocks (ones below the diagonal).
    """
    if not n_mat.is_square():
        raise ShapeError("jordan chains require a square matrix")
    size = n_mat.rows
    if size == 0:
        return []
    if not (n_mat ** size).is_zero():
        raise NotNilpotentMatrix("matrix is not nilpotent")
    kernels = [FieldMatrix.zeros(0, size, n_mat.conductor)]
    power = FieldMatrix.identity(size, n_mat.conductor)
    index = 0
    while kernels[-1].rows < size:
        power = power * n_mat
        kernels.append(power.kernel())
        index += 1
    chains: list[list[Vector]] = []
    for k in range(index, 0, -1):
        span_rows = list(kernels[k - 1].entries)
        for chain in chains:
            if len(chain) > k:
                span_rows.append(chain[len(chain) - k])
        for cand in kernels[k].entries:
            trial = span_rows + [cand]
            if FieldMatrix.from_rows(trial).rank() == len(trial):
                chain = [cand]
                for _ in range(k - 1):
                    chain.append(n_mat.matvec(chain[-1]))
                chains.append(chain)
                span_rows.append(cand)
    total = [v for c in chains for v in c]
    if FieldMatrix.from_rows(total).rank() != size:
        raise AssertionError("jordan chains do not form a basis")
    chains.sort(key=len, reverse=True)
    return chains


def jordan_type(n_mat: FieldMatrix) -> list[int]:
    """Multiset of chain lengths of a nilpotent matrix, descending."""
    return sorted((len(c) for c in nilpotent_jordan_chains(n_mat)), reverse=True)


# ---------------------------------------------------------------------------
# intertwiners

@dataclass
class SolutionSpace:
    """The space of all X with X*A = B*X."""
    dimension: int
    basis: list[FieldMatrix]


def intertwiner_space(a: FieldMatrix, b: FieldMatrix) -> SolutionSpace:
    if a.rows != b.rows or not a.is_square() or not b.is_square():
        raise ShapeError("intertwiner space needs equal square shapes")
    n = a.rows
    m = math.lcm(a.conductor, b.conductor)
    al, bl = a.lift(m), b.lift(m)
    zero = scalar(0, m)
    coeff_rows = []
    for p in range(n):
        for q in range(n):
            row = [zero] * (n * n)
            for r in range(n):
                row[p * n + r] = row[p * n + r] + al.entries[r][q]
                row[r * n + q] = row[r * n + q] - bl.entries[p][r]
            coeff_rows.append(row)
    kern = FieldMatrix.from_rows(coeff_rows).kernel()
    basis = [FieldMatrix([[v[i * n + j] for j in range(n)] for i in range(n)])
             for v in kern.entries]
    return SolutionSpace(dimension=len(basis), basis=basis)


def find_intertwiner(a: FieldMatrix, b: FieldMatrix, seed: int = 0,
                     budget: int = 64) -> tuple[FieldMatrix, SolutionSpace]:
    """An invertible X with X*A = B*X, plus the full solution space.

    Raises NotSimilar when no invertible element can exist, and
    SamplingExhausted when the seeded search runs out of budget.
    """
    if not are_similar(a, b):
        raise NotSimilar("matrices have different invariant factors")
    space = intertwiner_space(a, b)
    rng = random.Random(seed)
    attempts = 0
    # deterministic first passes: single basis elements, then their sum
    candidates = list(space.basis)
    if len(space.basis) > 1:
        total = space.basis[0]
        for extra in space.basis[1:]:
            total = total + extra
        candidates.append(total)
    for x in candidates:
        attempts += 1
        if attempts > budget:
            break
        if not x.det().is_zero():
            return x, space
    while attempts < budget:
        attempts += 1
        x = FieldMatrix.zeros(a.rows, a.cols, a.conductor)
        for mat in space.basis:
            c = rng.randint(-3, 3)
            if c:
                x = x + mat.scale(c)
        if not x.det().is_zero():
            return x, space
    raise SamplingExhausted(
        f"no invertible intertwiner found in {budget} attempts")


def matrix_order(a: FieldMatrix, bound: int = 1000):
    """Smallest k >= 1 with A^k = I, or the exceeds-bound marker."""
    if not a.is_square():
        raise ShapeError("order requires a square matrix")
    if a.det().is_zero():
        raise SingularMatrix("singular matrices have no multiplicative order")
    ident = FieldMatrix.identity(a.rows, a.conductor)
    power = a
    for k in range(1, bound + 1):
        if power == ident:
            return k
        if k < bound:
            power = power * a
    return ORDER_EXCEEDS_BOUND
