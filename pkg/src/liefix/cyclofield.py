"""Exact arithmetic in cyclotomic fields Q(zeta_M).

Elements are represented as residues in Q[z]/Phi_M(z), stored as dense
coefficient tuples of length phi(M) with Fraction entries.  Conductor 1 is
the plain rationals.  Binary operations between elements of different
conductors lift both operands to the lcm conductor; nothing is ever
reduced back silently (see ``try_lower_conductor`` for the explicit pass).

The scalar text grammar is

    expr  := term (("+" | "-") term)*
    term  := rat | rat "*z^" nat | "z^" nat | "z"
    rat   := int | int "/" posint

with insignificant whitespace; ``z`` denotes zeta_M for the ambient
conductor M.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

import mpmath

from .errors import ConductorError, DivisionByZero, ParseError

Rational = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


# ---------------------------------------------------------------------------
# integer helpers

def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (fine for conductor-sized n)."""
    if n < 1:
        raise ValueError("factorize wants a positive integer")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def totient(n: int) -> int:
    phi = 1
    for p, e in factorize(n).items():
        phi *= (p - 1) * p ** (e - 1)
    return phi


def divisors(n: int) -> list[int]:
    out = [1]
    for p, e in factorize(n).items():
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


# ---------------------------------------------------------------------------
# dense rational polynomials (low degree first), used for Phi_M and inverses

def _poly_trim(c: list[Fraction]) -> list[Fraction]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [_ZERO] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] += ai * bj
    return _poly_trim(out)


def _poly_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    b = _poly_trim(list(b))
    if not b:
        raise DivisionByZero("polynomial division by zero")
    rem = _poly_trim(list(a))
    db = len(b)
    q = [_ZERO] * max(0, len(rem) - db + 1)
    lb = b[-1]
    while len(rem) >= db:
        if not rem[-1]:
            rem.pop()
            continue
        shift = len(rem) - db
        coeff = rem[-1] / lb
        q[shift] = coeff
        for i in range(db - 1):
            rem[shift + i] -= coeff * b[i]
        rem.pop()
    return _poly_trim(q), _poly_trim(rem)


_cyclo_cache: dict[int, tuple[Fraction, ...]] = {}


def cyclotomic_polynomial(m: int) -> tuple[Fraction, ...]:
    """Coefficients (low first) of the m-th cyclotomic polynomial.

    Computed by dividing z^m - 1 by the cyclotomic polynomials of all
    proper divisors; results are cached.
    """
    if m < 1:
        raise ConductorError(f"conductor must be >= 1, got {m}")
    got = _cyclo_cache.get(m)
    if got is not None:
        return got
    num = [-_ONE] + [_ZERO] * (m - 1) + [_ONE]  # z^m - 1
    den = [_ONE]
    for d in divisors(m):
        if d < m:
            den = _poly_mul(den, list(cyclotomic_polynomial(d)))
    q, r = _poly_divmod(num, den)
    if r:
        raise AssertionError("cyclotomic division left a remainder")
    out = tuple(q)
    _cyclo_cache[m] = out
    return out


def _poly_xgcd(a: list[Fraction], b: list[Fraction]):
    """Extended Euclid over Q[z]: returns (g, s, t) with s*a + t*b = g."""
    r0, r1 = list(a), list(b)
    s0, s1 = [_ONE], []
    t0, t1 = [], [_ONE]
    while _poly_trim(r1):
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_trim([x - y for x, y in _zip_pad(s0, _poly_mul(q, s1))])
        t0, t1 = t1, _poly_trim([x - y for x, y in _zip_pad(t0, _poly_mul(q, t1))])
    return r0, s0, t0


def _zip_pad(a: list[Fraction], b: list[Fraction]):
    n = max(len(a), len(b))
    a = a + [_ZERO] * (n - len(a))
    b = b + [_ZERO] * (n - len(b))
    return zip(a, b)


# ---------------------------------------------------------------------------
# scalars

class CycScalar:
    """An element of Q(zeta_M), reduced mod Phi_M.

    Immutable; supports +, -, *, /, ** (integer exponents, negatives via
    inverse), equality across conductors, and hashing.
    """

    __slots__ = ("conductor", "coeffs", "_hash")

    def __init__(self, conductor: int, coeffs) -> None:
        if conductor < 1:
            raise ConductorError(f"conductor must be >= 1, got {conductor}")
        phi = totient(conductor)
        vals = [Fraction(c) for c in coeffs]
        if len(vals) > phi:
            mod = list(cyclotomic_polynomial(conductor))
            _, vals = _poly_divmod(vals, mod)
        vals += [_ZERO] * (phi - len(vals))
        object.__setattr__(self, "conductor", conductor)
        object.__setattr__(self, "coeffs", tuple(vals))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *a):  # pragma: no cover - immutability guard
        raise AttributeError("CycScalar is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_rational(q, conductor: int = 1) -> "CycScalar":
        return CycScalar(conductor, [Fraction(q)])

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_fraction(self) -> Fraction:
        """The value as a Fraction; only valid when the z-part vanishes."""
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def lift(self, conductor: int) -> "CycScalar":
        """Re-express at a larger conductor (must be a multiple of ours)."""
        if conductor == self.conductor:
            return self
        if conductor % self.conductor:
            raise ConductorError(
                f"cannot lift conductor {self.conductor} into {conductor}")
        step = conductor // self.conductor
        raised = [_ZERO] * ((len(self.coeffs) - 1) * step + 1)
        for d, c in enumerate(self.coeffs):
            if c:
                raised[d * step] = c
        return CycScalar(conductor, raised)

    # -- arithmetic --------------------------------------------------------

    def _common(self, other) -> tuple["CycScalar", "CycScalar"] | None:
        if not isinstance(other, CycScalar):
            if not isinstance(other, (int, Fraction)):
                return None
            other = CycScalar.from_rational(other)
        if self.conductor == other.conductor:
            return self, other
        m = math.lcm(self.conductor, other.conductor)
        return self.lift(m), other.lift(m)

    def __add__(self, other):
        pair = self._common(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return CycScalar(a.conductor, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycScalar(self.conductor, [-c for c in self.coeffs])

    def __sub__(self, other):
        pair = self._common(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return CycScalar(a.conductor, [x - y for x, y in zip(a.coeffs, b.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._common(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if a.conductor == 1:
            return CycScalar(1, [a.coeffs[0] * b.coeffs[0]])
        return CycScalar(a.conductor, _poly_mul(list(a.coeffs), list(b.coeffs)))

    __rmul__ = __mul__

    def inverse(self) -> "CycScalar":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        if self.conductor == 1:
            return CycScalar(1, [1 / self.coeffs[0]])
        mod = list(cyclotomic_polynomial(self.conductor))
        g, s, _ = _poly_xgcd(list(self.coeffs), mod)
        if len(g) != 1:
            raise AssertionError("gcd with the cyclotomic modulus was not a unit")
        inv = [c / g[0] for c in s]
        return CycScalar(self.conductor, inv)

    def __truediv__(self, other):
        pair = self._common(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a * b.inverse()

    def __rtruediv__(self, other):
        return CycScalar.from_rational(other, 1) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("exponent must be an integer")
        if n < 0:
            return self.inverse() ** (-n)
        result = CycScalar.from_rational(1, self.conductor)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        pair = self._common(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a.coeffs == b.coeffs

    def __hash__(self):
        # hash must agree across conductors for equal values; normalize
        # rationals, otherwise hash the support pattern cheaply
        if self.is_rational():
            return hash(self.coeffs[0])
        h = self._hash
        if h is None:
            h = hash((self.conductor, self.coeffs))
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self):
        return not self.is_zero()

    # -- output ------------------------------------------------------------

    def format(self) -> str:
        """Render within the scalar grammar (highest power first)."""
        parts: list[str] = []
        for d in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[d]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = -c if c < 0 else c
            if d == 0:
                body = str(mag)
            elif mag == 1:
                body = "z" if d == 1 else f"z^{d}"
            else:
                body = f"{mag}*z^{d}"
            if not parts:
                parts.append(body if sign == "+" else f"-{body}")
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts) if parts else "0"

    __str__ = format

    def __repr__(self):
        return f"CycScalar({self.conductor}, {self.format()!r})"

    def numeric(self, precision: int = 30):
        """Complex embedding z -> exp(2*pi*i/M), good to ``precision`` digits."""
        return numeric_eval(self, precision)


def scalar(value, conductor: int = 1) -> CycScalar:
    """Coerce ints, Fractions, strings, or CycScalars into the field."""
    if isinstance(value, CycScalar):
        return value
    if isinstance(value, str):
        return parse_scalar(value, conductor)
    return CycScalar(conductor, [Fraction(value)])


def zeta(conductor: int, power: int = 1) -> CycScalar:
    """The root of unity zeta_M^power."""
    if conductor < 1:
        raise ConductorError(f"conductor must be >= 1, got {conductor}")
    power %= conductor
    return CycScalar(conductor, [_ZERO] * power + [_ONE])


def lift_conductor(a: CycScalar, conductor: int) -> CycScalar:
    return a.lift(conductor)


def numeric_eval(a: CycScalar, precision: int = 30):
    if precision < 1:
        raise ValueError("precision must be >= 1")
    with mpmath.workdps(precision + 10):
        total = mpmath.mpc(0)
        for d, c in enumerate(a.coeffs):
            if c:
                term = mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
                total += term * mpmath.expjpi(mpmath.mpf(2 * d) / a.conductor)
        return +total


def galois_conjugate(a: CycScalar, k: int) -> CycScalar:
    """Apply the automorphism zeta -> zeta^k; k must be a unit mod M."""
    m = a.conductor
    if math.gcd(k, m) != 1:
        raise ConductorError(f"{k} is not invertible mod {m}")
    if m == 1:
        return a
    raised = [_ZERO] * m
    for d, c in enumerate(a.coeffs):
        if c:
            raised[(d * k) % m] += c
    return CycScalar(m, raised)


def try_lower_conductor(a: CycScalar, conductor: int) -> CycScalar | None:
    """Re-express ``a`` at a smaller conductor dividing the current one.

    Returns None when the value genuinely needs the larger field.  This is
    an explicit normalization pass; arithmetic never calls it on its own.
    """
    if conductor == a.conductor:
        return a
    if a.conductor % conductor:
        return None
    basis = [zeta(conductor, j).lift(a.conductor).coeffs
             for j in range(totient(conductor))]
    # solve sum_j x_j * basis[j] = a.coeffs over Q
    rows = len(a.coeffs)
    cols = len(basis)
    aug = [[basis[j][i] for j in range(cols)] + [a.coeffs[i]] for i in range(rows)]
    piv_col = 0
    sol: list[Fraction | None] = [None] * cols
    pivots = []
    for col in range(cols):
        sel = next((r for r in range(piv_col, rows) if aug[r][col] != 0), None)
        if sel is None:
            continue
        aug[piv_col], aug[sel] = aug[sel], aug[piv_col]
        inv = 1 / aug[piv_col][col]
        aug[piv_col] = [v * inv for v in aug[piv_col]]
        for r in range(rows):
            if r != piv_col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[piv_col])]
        pivots.append(col)
        piv_col += 1
    for r in range(piv_col, rows):
        if aug[r][cols] != 0:
            return None  # inconsistent: value is not in the subfield
    for r, col in enumerate(pivots):
        sol[col] = aug[r][cols]
    vals = [s if s is not None else _ZERO for s in sol]
    return CycScalar(conductor, vals)


# ---------------------------------------------------------------------------
# parsing

_RAT = r"-?\d+(?:\s*/\s*\d+)?"
_TERM_RE = re.compile(
    rf"^(?:(?P<coef>{_RAT})\s*\*\s*z(?:\^(?P<p1>\d+))?"
    rf"|z(?:\^(?P<p2>\d+))?"
    rf"|(?P<rat>{_RAT}))$"
)


def parse_scalar(text: str, conductor: int) -> CycScalar:
    """Parse the scalar grammar at the given ambient conductor."""
    if conductor < 1:
        raise ConductorError(f"conductor must be >= 1, got {conductor}")
    s = text.strip()
    if not s:
        raise ParseError("empty scalar")
    # split into signed terms at top level
    terms: list[tuple[int, str]] = []
    buf = []
    sign = 1
    i = 0
    if s[0] in "+-":
        sign = -1 if s[0] == "-" else 1
        i = 1
    start = i
    while i <= len(s):
        if i == len(s) or (s[i] in "+-" and i > start):
            chunk = s[start:i].strip()
            if not chunk:
                raise ParseError(f"dangling operator in {text!r}")
            terms.append((sign, chunk))
            if i < len(s):
                sign = -1 if s[i] == "-" else 1
                start = i + 1
        i += 1
    phi = totient(conductor)
    acc = [_ZERO] * max(phi, 1)
    for sgn, chunk in terms:
        m = _TERM_RE.match(chunk)
        if not m:
            raise ParseError(f"bad term {chunk!r} in {text!r}")
        if m.group("rat") is not None:
            coef = Fraction(m.group("rat").replace(" ", ""))
            power = 0
        elif m.group("coef") is not None:
            coef = Fraction(m.group("coef").replace(" ", ""))
            power = int(m.group("p1")) if m.group("p1") is not None else 1
        else:
            coef = _ONE
            power = int(m.group("p2")) if m.group("p2") is not None else 1
        if power > 0 and conductor == 1:
            raise ConductorError("z has no meaning at conductor 1")
        if coef.denominator == 0:
            raise ParseError(f"zero denominator in {chunk!r}")
        while len(acc) <= power:
            acc.append(_ZERO)
        acc[power] += sgn * coef
    return CycScalar(conductor, acc)


def format_scalar(a: CycScalar) -> str:
    return a.format()


# ---------------------------------------------------------------------------
# polynomials over the field (variable written "t")

class CycPolynomial:
    """Dense univariate polynomial with CycScalar coefficients (low first)."""

    __slots__ = ("conductor", "coeffs")

    def __init__(self, coeffs, conductor: int | None = None):
        vals = [scalar(c) if not isinstance(c, CycScalar) else c for c in coeffs]
        m = conductor or 1
        for v in vals:
            m = math.lcm(m, v.conductor)
        vals = [v.lift(m) for v in vals]
        while vals and vals[-1].is_zero():
            vals.pop()
        object.__setattr__(self, "conductor", m)
        object.__setattr__(self, "coeffs", tuple(vals))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("CycPolynomial is immutable")

    @staticmethod
    def zero(conductor: int = 1) -> "CycPolynomial":
        return CycPolynomial([], conductor)

    @staticmethod
    def monomial(coeff: CycScalar, degree: int) -> "CycPolynomial":
        return CycPolynomial([scalar(0, coeff.conductor)] * degree + [coeff])

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def leading(self) -> CycScalar:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def is_monic(self) -> bool:
        return not self.is_zero() and self.leading() == 1

    def _common(self, other) -> tuple["CycPolynomial", "CycPolynomial"]:
        if not isinstance(other, CycPolynomial):
            other = CycPolynomial([other])
        return self, other

    def __add__(self, other):
        a, b = self._common(other)
        n = max(len(a.coeffs), len(b.coeffs))
        za = scalar(0, a.conductor)
        out = []
        for i in range(n):
            x = a.coeffs[i] if i < len(a.coeffs) else za
            y = b.coeffs[i] if i < len(b.coeffs) else za
            out.append(x + y)
        return CycPolynomial(out)

    def __neg__(self):
        return CycPolynomial([-c for c in self.coeffs], self.conductor)

    def __sub__(self, other):
        a, b = self._common(other)
        return a + (-b)

    def __mul__(self, other):
        if isinstance(other, CycScalar):
            return CycPolynomial([c * other for c in self.coeffs], self.conductor)
        a, b = self._common(other)
        if a.is_zero() or b.is_zero():
            return CycPolynomial.zero(max(a.conductor, b.conductor))
        m = math.lcm(a.conductor, b.conductor)
        za = scalar(0, m)
        out = [za] * (len(a.coeffs) + len(b.coeffs) - 1)
        for i, ai in enumerate(a.coeffs):
            if not ai.is_zero():
                for j, bj in enumerate(b.coeffs):
                    if not bj.is_zero():
                        out[i + j] = out[i + j] + ai * bj
        return CycPolynomial(out)

    __rmul__ = __mul__

    def __divmod__(self, other):
        a, b = self._common(other)
        if b.is_zero():
            raise DivisionByZero("polynomial division by zero")
        rem = list(a.coeffs)
        m = math.lcm(a.conductor, b.conductor)
        za = scalar(0, m)
        quo = [za] * max(0, len(rem) - len(b.coeffs) + 1)
        lead_inv = b.leading().inverse()
        while len(rem) >= len(b.coeffs):
            if rem[-1].is_zero():
                rem.pop()
                continue
            shift = len(rem) - len(b.coeffs)
            c = rem[-1] * lead_inv
            quo[shift] = c
            for i, bi in enumerate(b.coeffs):
                rem[shift + i] = rem[shift + i] - c * bi
            rem.pop()
        return CycPolynomial(quo), CycPolynomial(rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "CycPolynomial":
        if self.is_zero():
            return self
        inv = self.leading().inverse()
        return CycPolynomial([c * inv for c in self.coeffs], self.conductor)

    def gcd(self, other: "CycPolynomial") -> "CycPolynomial":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def derivative(self) -> "CycPolynomial":
        return CycPolynomial(
            [c * i for i, c in enumerate(self.coeffs)][1:], self.conductor)

    def evaluate(self, x: CycScalar) -> CycScalar:
        acc = scalar(0, self.conductor)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def scale_argument(self, c: CycScalar) -> "CycPolynomial":
        """p(t) -> p(c*t)."""
        out, power = [], scalar(1, c.conductor)
        for coef in self.coeffs:
            out.append(coef * power)
            power = power * c
        return CycPolynomial(out)

    def lift(self, conductor: int) -> "CycPolynomial":
        return CycPolynomial([c.lift(conductor) for c in self.coeffs], conductor)

    def __eq__(self, other):
        if not isinstance(other, CycPolynomial):
            return NotImplemented
        if len(self.coeffs) != len(other.coeffs):
            return False
        return all(x == y for x, y in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash(tuple(c.coeffs for c in self.coeffs))

    def format(self, var: str = "t") -> str:
        if self.is_zero():
            return "0"
        parts = []
        for d in range(self.degree, -1, -1):
            c = self.coeffs[d]
            if c.is_zero():
                continue
            if d == 0:
                body = f"({c.format()})"
            elif c == 1:
                body = var if d == 1 else f"{var}^{d}"
            else:
                body = f"({c.format()})*{var}" + (f"^{d}" if d > 1 else "")
            parts.append(body)
        return " + ".join(parts)

    def __repr__(self):
        return f"CycPolynomial({self.format()!r})"


# ---------------------------------------------------------------------------
# square roots of rationals inside cyclotomic fields

def _gauss_sum(p: int) -> CycScalar:
    """Quadratic Gauss sum for an odd prime: squares to (-1)^((p-1)/2) * p."""
    acc = [_ZERO] * p
    for a in range(1, p):
        acc[a] = _ONE if pow(a, (p - 1) // 2, p) == 1 else -_ONE
    return CycScalar(p, acc)


def sqrt_conductor(q) -> int:
    """Smallest cyclotomic conductor whose field contains sqrt(q), q rational."""
    q = Fraction(q)
    if q == 0:
        return 1
    # squarefree part of numerator*denominator, with the sign
    n = q.numerator * q.denominator
    sign = 1 if n > 0 else -1
    n = abs(n)
    sf = 1
    for p, e in factorize(n).items():
        if e % 2:
            sf *= p
    d = sign * sf
    if d == 1:
        return 1
    if d % 4 == 1:
        return abs(d)
    return 4 * abs(d)


def rational_sqrt(q, conductor: int | None = None) -> CycScalar | None:
    """An exact square root of the rational q as a cyclotomic element.

    Returns the root at its natural conductor (or lifted to ``conductor``
    when given); returns None when ``conductor`` is supplied and the root
    does not live there.
    """
    q = Fraction(q)
    if q == 0:
        return scalar(0, conductor or 1)
    need = sqrt_conductor(q)
    if conductor is not None and conductor % need:
        return None
    # split q = s^2 * d with d squarefree (signed)
    n = q.numerator * q.denominator
    sign = 1 if n > 0 else -1
    n = abs(n)
    s = Fraction(1, q.denominator)
    d = 1
    for p, e in factorize(n).items():
        s *= Fraction(p) ** (e // 2)
        if e % 2:
            d *= p
    root = scalar(s)
    if d % 2 == 0:
        root = root * (zeta(8) + zeta(8, 7))  # sqrt(2)
        d //= 2
    for p in factorize(d):
        g = _gauss_sum(p)
        root = root * g
        if p % 4 == 3:  # g^2 = -p, fix the sign with sqrt(-1)
            sign = -sign
    if sign < 0:
        root = root * zeta(4)
    target = conductor or root.conductor
    root = root.lift(math.lcm(root.conductor, target))
    if root * root != q:
        raise AssertionError("square-root construction failed self-check")
    if conductor is not None:
        lowered = try_lower_conductor(root, conductor)
        return lowered
    return root
