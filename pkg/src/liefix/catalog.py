"""Named example algebras with their known properties.

Every algebra the test suite leans on lives here: the small-dimension
classification tables, the two graded filiform families, and a handful of
one-off examples.  Each entry records what is known about it — solvability,
nilpotency, the two trace conditions, and whether a fixed-point-free
automorphism exists — plus the classical parameterized automorphism
families and the isomorphism rules for the parameterized entries.
``verify_catalog`` replays all of it through the engines.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .cyclofield import CycScalar, scalar, zeta
from .errors import BadParameters, UnknownName
from .exactlinalg import FieldMatrix
from .liealg import LieAlgebra, check_automorphism, unimodularity_report
from .routing import decide_fpf_any

_ZERO = scalar(0)
_ONE = scalar(1)


def _coerce(value) -> CycScalar:
    if isinstance(value, CycScalar):
        return value
    if isinstance(value, (int, Fraction)):
        return scalar(value)
    raise BadParameters(f"not a scalar parameter: {value!r}")


def _eq(a: CycScalar, b) -> bool:
    return (a - _coerce(b)).is_zero()


def _int_param(value, name: str, minimum: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise BadParameters(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise BadParameters(f"{name} must be at least {minimum}, got {value}")
    return value


# ---------------------------------------------------------------------------
# entry record


@dataclass(frozen=True)
class ExpectedFlags:
    """Known properties; None marks a property left unchecked."""

    solvable: bool | None = None
    nilpotent: bool | None = None
    unimodular: bool | None = None
    strongly_unimodular: bool | None = None
    fpf_exists: bool | None = None

    def to_json(self) -> dict:
        return {"solvable": self.solvable, "nilpotent": self.nilpotent,
                "unimodular": self.unimodular,
                "strongly_unimodular": self.strongly_unimodular,
                "fpf_exists": self.fpf_exists}


@dataclass(frozen=True)
class AutomorphismFamily:
    """A one-knob parameterized automorphism family with a claimed order.

    ``first``..``last`` is the grid ``verify_catalog`` replays; ``excluded``
    lists knob values where the member degenerates (fixed points appear).
    """

    family: str
    knob: str
    first: int
    last: int
    order_text: str
    order: Callable[[int], int]
    fixed: tuple[tuple[str, int], ...] = ()
    excluded: tuple[int, ...] = ()

    def matrix(self, value: int) -> FieldMatrix:
        return family_automorphism(self.family,
                                   **{self.knob: value, **dict(self.fixed)})

    def to_json(self) -> dict:
        return {"family": self.family, "knob": self.knob,
                "first": self.first, "last": self.last,
                "order": self.order_text,
                "excluded": list(self.excluded)}


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    label: str
    parameters: tuple[tuple[str, CycScalar], ...]
    algebra: LieAlgebra
    expected: ExpectedFlags
    automorphism_families: tuple[AutomorphismFamily, ...] = ()
    alias: str | None = None


@dataclass(frozen=True)
class IsoPredicateResult:
    related: bool
    witness_relation: str | None

    def to_json(self) -> dict:
        return {"related": self.related,
                "witness_relation": self.witness_relation}


# ---------------------------------------------------------------------------
# the classical automorphism families


def family_automorphism(name: str, **params) -> FieldMatrix:
    """The classical automorphism-family member, columns as images."""
    if name == "cn":
        dim = _int_param(params.pop("dim", None), "dim", 1)
        n = _int_param(params.pop("n", None), "n", 2)
        _no_extras(params)
        return FieldMatrix.diagonal([zeta(n)] * dim)
    if name == "n3":
        n = _int_param(params.pop("n", None), "n", 2)
        _no_extras(params)
        z = zeta(n)
        return FieldMatrix.diagonal([z, z, z * z])
    if name == "n4":
        if "n" in params and "s" not in params and "t" not in params:
            n = _int_param(params.pop("n"), "n", 2)
            s = t = zeta(n)
        else:
            s = _coerce(params.pop("s", None))
            t = _coerce(params.pop("t", None))
        _no_extras(params)
        return FieldMatrix.diagonal([s, t, s * t, s * s * t])
    if name == "r3m1":
        m = _int_param(params.pop("m", None), "m", 1)
        _no_extras(params)
        z = zeta(m)
        return FieldMatrix([[-1, 0, 0], [0, 0, z], [0, 1, 0]])
    if name == "g9w":
        m = _int_param(params.pop("m", None), "m", 1)
        _no_extras(params)
        w = zeta(3)
        w2 = w * w
        lam = zeta(3 * m)
        return FieldMatrix([
            [w, _ZERO, _ZERO, _ZERO],
            [_ZERO, lam, _ZERO, _ZERO],
            [_ZERO, (w2 - _ONE) * lam, w2 * lam, _ZERO],
            [_ZERO, scalar(3) * w * lam, (w - _ONE) * lam, lam * w],
        ])
    if name == "g10m1":
        m = _int_param(params.pop("m", None), "m", 1)
        _no_extras(params)
        # A root of odd order m already yields order 2m here (the leading
        # -1 contributes the factor two); for even m the factor two is
        # absorbed, so the root itself must have order 2m.
        z = zeta(m) if m % 2 else zeta(2 * m)
        return FieldMatrix([
            [-1, 0, 0, 0],
            [_ZERO, z, _ZERO, _ZERO],
            [_ZERO, scalar(-2) * z, -z, _ZERO],
            [_ZERO, _ZERO, _ZERO, -(z * z)],
        ])
    raise UnknownName(f"unknown automorphism family: {name!r}")


def _no_extras(params: dict) -> None:
    if params:
        raise BadParameters(f"unexpected parameters: {sorted(params)}")


# ---------------------------------------------------------------------------
# builders


def _flags(solvable, nilpotent, unimodular, strongly, fpf) -> ExpectedFlags:
    return ExpectedFlags(solvable, nilpotent, unimodular, strongly, fpf)


def _build_cn(n=None) -> CatalogEntry:
    n = _int_param(n, "n", 1)
    alg = LieAlgebra(n, {}, name=f"C^{n}")
    fams = (AutomorphismFamily("cn", "n", 2, 5, "n", lambda v: v,
                               fixed=(("dim", n),)),)
    return CatalogEntry("C^n", f"C^{n}", (("n", scalar(n)),), alg,
                        _flags(True, True, True, True, True), fams)


def _build_r2() -> CatalogEntry:
    alg = LieAlgebra(2, {(0, 1): {0: 1}}, name="r2")
    return CatalogEntry("r2", "r2", (), alg,
                        _flags(True, False, False, False, False))


def _build_r2_plus_c() -> CatalogEntry:
    alg = LieAlgebra(3, {(0, 1): {1: 1}}, name="r2+C")
    return CatalogEntry("r2+C", "r2+C", (), alg,
                        _flags(True, False, False, False, False))


def _build_n3() -> CatalogEntry:
    alg = LieAlgebra(3, {(0, 1): {2: 1}}, name="n3")
    fams = (AutomorphismFamily("n3", "n", 3, 8, "n", lambda v: v),)
    return CatalogEntry("n3", "n3", (), alg,
                        _flags(True, True, True, True, True), fams)


def _build_r3() -> CatalogEntry:
    alg = LieAlgebra(3, {(0, 1): {1: 1}, (0, 2): {1: 1, 2: 1}}, name="r3")
    return CatalogEntry("r3", "r3", (), alg,
                        _flags(True, False, False, False, False))


def _build_r3lam(lam=None) -> CatalogEntry:
    lam = _coerce(lam)
    if lam.is_zero():
        raise BadParameters("r3lam requires a nonzero parameter")
    alg = LieAlgebra(3, {(0, 1): {1: 1}, (0, 2): {2: lam}},
                     name="r3lam")
    minus_one = _eq(lam, -1)
    fams = ()
    if minus_one:
        fams = (AutomorphismFamily("r3m1", "m", 2, 6, "2m",
                                   lambda v: 2 * v),)
    return CatalogEntry("r3lam", f"r3lam({lam.format()})",
                        (("lam", lam),), alg,
                        _flags(True, False, minus_one, minus_one, minus_one),
                        fams)


def _build_sl2() -> CatalogEntry:
    alg = LieAlgebra(3, {(0, 1): {2: 1}, (0, 2): {0: -2}, (1, 2): {1: 2}},
                     name="sl2")
    return CatalogEntry("sl2", "sl2", (), alg,
                        _flags(False, False, True, False, False))


def _build_g1() -> CatalogEntry:
    alg = LieAlgebra(4, {(0, 1): {2: 1}}, name="g1")
    return CatalogEntry("g1", "g1", (), alg,
                        _flags(True, True, True, True, True))


def _build_g2() -> CatalogEntry:
    alg = LieAlgebra(4, {(0, 1): {2: 1}, (0, 2): {3: 1}}, name="g2")
    fams = (AutomorphismFamily("n4", "n", 4, 8, "n", lambda v: v),)
    return CatalogEntry("g2", "g2", (), alg,
                        _flags(True, True, True, True, True), fams)


def _build_g3() -> CatalogEntry:
    alg = LieAlgebra(4, {(0, 1): {1: 1}}, name="g3")
    return CatalogEntry("g3", "g3", (), alg,
                        _flags(True, False, False, False, False))


def _build_g4() -> CatalogEntry:
    alg = LieAlgebra(4, {(0, 1): {1: 1}, (2, 3): {3: 1}}, name="g4")
    return CatalogEntry("g4", "g4", (), alg,
                        _flags(True, False, False, False, False))


def _build_g5() -> CatalogEntry:
    alg = LieAlgebra(4, {(0, 1): {1: 1}, (0, 2): {2: -1}, (1, 2): {0: 1}},
                     name="g5")
    return CatalogEntry("g5", "g5", (), alg,
                        _flags(False, False, True, False, False))


def _build_g6() -> CatalogEntry:
    alg = LieAlgebra(4, {(0, 1): {1: 1}, (0, 2): {2: 1}, (0, 3): {3: 1}},
                     name="g6")
    return CatalogEntry("g6", "g6", (), alg,
                        _flags(True, False, False, False, False))


def _build_g7(alpha=None) -> CatalogEntry:
    alpha = _coerce(alpha)
    alg = LieAlgebra(4, {(0, 1): {1: 1}, (0, 2): {2: 1},
                         (0, 3): {2: 1, 3: alpha}}, name="g7")
    special = _eq(alpha, -2)
    return CatalogEntry("g7", f"g7({alpha.format()})",
                        (("alpha", alpha),), alg,
                        _flags(True, False, special, special, False))


def _build_g8() -> CatalogEntry:
    alg = LieAlgebra(4, {(0, 1): {1: 1}, (0, 2): {2: 1}, (0, 3): {3: 2},
                         (1, 2): {3: 1}}, name="g8")
    return CatalogEntry("g8", "g8", (), alg,
                        _flags(True, False, False, False, False))


def _build_g9(alpha=None, beta=None) -> CatalogEntry:
    alpha, beta = _coerce(alpha), _coerce(beta)
    alg = LieAlgebra(4, {(0, 1): {1: 1}, (0, 2): {1: 1, 2: alpha},
                         (0, 3): {2: 1, 3: beta}}, name="g9")
    traceless = (alpha + beta + _ONE).is_zero()
    fpf = _g9_expected_fpf(alpha, beta)
    alias = None
    if _eq(alpha, -1) and beta.is_zero():
        alias = "r3lam(-1)+C"
    fams = ()
    w = zeta(3)
    if _eq(alpha, w) and _eq(beta, w * w):
        fams = (AutomorphismFamily("g9w", "m", 2, 5, "3m",
                                   lambda v: 3 * v),)
    return CatalogEntry("g9", f"g9({alpha.format()},{beta.format()})",
                        (("alpha", alpha), ("beta", beta)), alg,
                        _flags(True, False, traceless, traceless, fpf),
                        fams, alias=alias)


def _build_g10(alpha=None) -> CatalogEntry:
    alpha = _coerce(alpha)
    alg = LieAlgebra(4, {(0, 1): {1: 1}, (0, 2): {1: 1, 2: alpha},
                         (0, 3): {3: alpha + _ONE}, (1, 2): {3: 1}},
                     name="g10")
    special = _eq(alpha, -1)
    fams = ()
    if special:
        fams = (AutomorphismFamily("g10m1", "m", 3, 6, "2m",
                                   lambda v: 2 * v, excluded=(2,)),)
    return CatalogEntry("g10", f"g10({alpha.format()})",
                        (("alpha", alpha),), alg,
                        _flags(True, False, special, special, special), fams)


def _build_ex210(alpha=None) -> CatalogEntry:
    alpha = _coerce(alpha)
    if alpha.is_zero():
        raise BadParameters("ex210 requires a nonzero parameter")
    two_a = scalar(2) * alpha
    alg = LieAlgebra(5, {(0, 4): {0: two_a},
                         (1, 4): {1: alpha, 2: 1},
                         (2, 4): {1: -1, 2: alpha},
                         (3, 4): {3: scalar(-4) * alpha},
                         (1, 2): {0: 1}}, name="ex210")
    return CatalogEntry("ex210", f"ex210({alpha.format()})",
                        (("alpha", alpha),), alg,
                        _flags(True, False, True, False, False))


def _build_ln(n=None) -> CatalogEntry:
    n = _int_param(n, "n", 3)
    alg = LieAlgebra(n, {(0, j): {j + 1: 1} for j in range(1, n - 1)},
                     name=f"L{n}")
    return CatalogEntry("Ln", f"L{n}", (("n", scalar(n)),), alg,
                        _flags(True, True, True, True, True))


def _build_qn(n=None) -> CatalogEntry:
    n = _int_param(n, "n", 4)
    if n % 2:
        raise BadParameters(f"Qn requires an even dimension, got {n}")
    brackets = {(0, j): {j + 1: 1} for j in range(1, n - 1)}
    for i in range(2, n // 2 + 1):
        brackets[(i - 1, n - i)] = {n - 1: (-1) ** i}
    alg = LieAlgebra(n, brackets, name=f"Q{n}")
    return CatalogEntry("Qn", f"Q{n}", (("n", scalar(n)),), alg,
                        _flags(True, True, True, True, True))


_BUILDERS = {
    "C^n": _build_cn,
    "r2": _build_r2,
    "r2+C": _build_r2_plus_c,
    "n3": _build_n3,
    "r3": _build_r3,
    "r3lam": _build_r3lam,
    "sl2": _build_sl2,
    "g0": lambda: _build_cn(4),
    "g1": _build_g1,
    "n3+C": _build_g1,
    "g2": _build_g2,
    "n4": _build_g2,
    "g3": _build_g3,
    "g4": _build_g4,
    "g5": _build_g5,
    "g6": _build_g6,
    "g7": _build_g7,
    "g8": _build_g8,
    "g9": _build_g9,
    "g10": _build_g10,
    "ex210": _build_ex210,
    "Ln": _build_ln,
    "Qn": _build_qn,
}


def get_algebra(name: str, **params) -> CatalogEntry:
    """Look up a named algebra; scalar parameters may be int, Fraction,
    or CycScalar, and dimensions must be int."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownName(f"unknown catalog name: {name!r}") from None
    try:
        return builder(**params)
    except TypeError as exc:
        raise BadParameters(f"{name}: {exc}") from None


def catalog_names() -> list[str]:
    return sorted(_BUILDERS)


# ---------------------------------------------------------------------------
# isomorphism rules for the parameterized families

_G9_CLAUSES = (
    ("identity", lambda a, b: (a, b)),
    ("swap", lambda a, b: (b, a)),
    ("scale-by-first", lambda a, b: (a.inverse(), b * a.inverse())),
    ("scale-by-first-swapped", lambda a, b: (b * a.inverse(), a.inverse())),
    ("scale-by-second", lambda a, b: (b.inverse(), a * b.inverse())),
    ("scale-by-second-swapped", lambda a, b: (a * b.inverse(), b.inverse())),
)


def _g9_match(pair1, pair2) -> str | None:
    a, b = pair1
    for label, clause in _G9_CLAUSES:
        x, y = clause(a, b)
        if (x - pair2[0]).is_zero() and (y - pair2[1]).is_zero():
            return label
    return None


def _g9_expected_fpf(alpha: CycScalar, beta: CycScalar) -> bool | None:
    if _eq(alpha, -1) and beta.is_zero():
        return True  # decomposes as r3lam(-1) plus a central line
    if alpha.is_zero() or beta.is_zero():
        return None
    w = zeta(3)
    return _g9_match((alpha, beta), (w, w * w)) is not None


def _pair(params, arity: int, name: str) -> tuple[CycScalar, ...]:
    if not isinstance(params, (tuple, list)):
        params = (params,)
    if len(params) != arity:
        raise BadParameters(
            f"{name} takes {arity} parameter(s), got {len(params)}")
    return tuple(_coerce(p) for p in params)


def iso_predicate(name: str, params1, params2) -> IsoPredicateResult:
    """Decide whether two members of a parameterized family are isomorphic,
    by evaluating the family's published relation exactly."""
    if name == "r3lam":
        (lam,), (mu,) = _pair(params1, 1, name), _pair(params2, 1, name)
        if lam.is_zero() or mu.is_zero():
            raise BadParameters("r3lam parameters must be nonzero")
        if (mu - lam).is_zero():
            return IsoPredicateResult(True, "equal")
        if (mu - lam.inverse()).is_zero():
            return IsoPredicateResult(True, "reciprocal")
        return IsoPredicateResult(False, None)
    if name == "g10":
        (a1,), (a2,) = _pair(params1, 1, name), _pair(params2, 1, name)
        if (a1 - a2).is_zero():
            return IsoPredicateResult(True, "equal")
        if (a1 * a2 - _ONE).is_zero():
            return IsoPredicateResult(True, "product-one")
        return IsoPredicateResult(False, None)
    if name == "g9":
        p1, p2 = _pair(params1, 2, name), _pair(params2, 2, name)
        if any(v.is_zero() for v in p1 + p2):
            raise BadParameters(
                "the g9 relation list applies to nonzero parameters only")
        label = _g9_match(p1, p2)
        return IsoPredicateResult(label is not None, label)
    raise UnknownName(f"no isomorphism rule for {name!r}")


# ---------------------------------------------------------------------------
# replaying the whole catalog through the engines


@dataclass
class CheckResult:
    check: str
    ok: bool
    expected: str
    got: str

    def to_json(self) -> dict:
        return {"check": self.check, "ok": self.ok,
                "expected": self.expected, "got": self.got}


@dataclass
class EntryReport:
    label: str
    dim: int
    passed: bool
    checks: list[CheckResult]

    def to_json(self) -> dict:
        return {"label": self.label, "dim": self.dim, "passed": self.passed,
                "checks": [c.to_json() for c in self.checks]}


@dataclass
class CatalogReport:
    scope: int | None
    entries: list[EntryReport]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def to_json(self) -> dict:
        return {"scope": self.scope, "passed": self.passed,
                "total": len(self.entries),
                "failed": [e.label for e in self.entries if not e.passed],
                "entries": [e.to_json() for e in self.entries]}


def verification_samples() -> list[tuple[CatalogEntry, bool]]:
    """The fixed grid of catalog instances the suite replays; the flag
    says whether the fixed-point-free router runs on that row."""
    w = zeta(3)
    w2 = w * w
    grid = [scalar(k) for k in range(-3, 4)] + [w, w2]
    rows: list[tuple[CatalogEntry, bool]] = []
    for n in (2, 3, 4):
        rows.append((get_algebra("C^n", n=n), True))
    for name in ("r2", "r2+C", "n3", "r3", "sl2"):
        rows.append((get_algebra(name), True))
    for lam in (-2, -1, 1, 2):
        rows.append((get_algebra("r3lam", lam=lam), True))
    for name in ("g1", "g2", "g3", "g4", "g5", "g6", "g8"):
        rows.append((get_algebra(name), True))
    for a in grid:
        rows.append((get_algebra("g7", alpha=a), True))
    for a in grid:
        for b in grid:
            entry = get_algebra("g9", alpha=a, beta=b)
            rows.append((entry, entry.expected.fpf_exists is not None))
    rows.append((get_algebra("g9", alpha=Fraction(1, 2),
                             beta=Fraction(-3, 2)), True))
    for a in grid:
        rows.append((get_algebra("g10", alpha=a), True))
    for a in (1, 2, w):
        rows.append((get_algebra("ex210", alpha=a), True))
    for n in (3, 4, 5):
        rows.append((get_algebra("Ln", n=n), True))
    for n in (4, 6):
        rows.append((get_algebra("Qn", n=n), True))
    return rows


def _bool_check(name: str, expected: bool, got: bool) -> CheckResult:
    return CheckResult(name, expected == got, str(expected), str(got))


def verify_entry(entry: CatalogEntry, check_fpf: bool = True, seed: int = 0,
                 order_bound: int = 1000,
                 conductor_limit: int = 1000) -> EntryReport:
    g = entry.algebra
    exp = entry.expected
    checks: list[CheckResult] = []
    if exp.solvable is not None:
        checks.append(_bool_check("solvable", exp.solvable, g.is_solvable()))
    if exp.nilpotent is not None:
        checks.append(_bool_check("nilpotent", exp.nilpotent,
                                  g.is_nilpotent()))
    if exp.unimodular is not None or exp.strongly_unimodular is not None:
        rep = unimodularity_report(g, conductor_limit=conductor_limit)
        if exp.unimodular is not None:
            checks.append(_bool_check("unimodular", exp.unimodular,
                                      rep.unimodular))
        if exp.strongly_unimodular is not None:
            checks.append(_bool_check("strongly_unimodular",
                                      exp.strongly_unimodular,
                                      rep.strongly_unimodular))
    if check_fpf and exp.fpf_exists is not None:
        decision = decide_fpf_any(g, seed=seed, order_bound=order_bound,
                                  conductor_limit=conductor_limit)
        want = "Yes" if exp.fpf_exists else "No"
        checks.append(CheckResult("fpf", decision.verdict == want, want,
                                  f"{decision.verdict} ({decision.reason_code})"))
        if decision.witness is not None:
            ok = (decision.witness.is_morphism and decision.witness.is_fpf)
            checks.append(CheckResult("fpf witness", ok,
                                      "morphism, no fixed points",
                                      "ok" if ok else "invalid"))
    for fam in entry.automorphism_families:
        for v in range(fam.first, fam.last + 1):
            rep = check_automorphism(g, fam.matrix(v),
                                     order_bound=order_bound)
            ok = rep.is_morphism and rep.is_fpf and rep.order == fam.order(v)
            checks.append(CheckResult(
                f"family {fam.family}[{fam.knob}={v}]", ok,
                f"fpf automorphism of order {fam.order(v)}",
                f"morphism={rep.is_morphism} fpf={rep.is_fpf} "
                f"order={rep.order}"))
        for v in fam.excluded:
            rep = check_automorphism(g, fam.matrix(v),
                                     order_bound=order_bound)
            ok = rep.is_morphism and rep.det_phi_minus_id.is_zero()
            checks.append(CheckResult(
                f"family {fam.family}[{fam.knob}={v}] degenerate", ok,
                "morphism with a fixed point", "ok" if ok else "unexpected"))
    return EntryReport(entry.label, g.dim, all(c.ok for c in checks), checks)


def verify_catalog(dim: int | None = None, seed: int = 0,
                   order_bound: int = 1000,
                   conductor_limit: int = 1000) -> CatalogReport:
    """Replay every sampled catalog entry through the engines and compare
    with the recorded expectations."""
    reports = []
    for entry, check_fpf in verification_samples():
        if dim is not None and entry.algebra.dim != dim:
            continue
        reports.append(verify_entry(entry, check_fpf=check_fpf, seed=seed,
                                    order_bound=order_bound,
                                    conductor_limit=conductor_limit))
    return CatalogReport(dim, reports)
