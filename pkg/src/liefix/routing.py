"""Dispatch an arbitrary algebra to whichever engine can decide it.

The fixed-point-free question is settled here for: anything failing the
solvability or strong-unimodularity gates (answer No), abelian and almost
abelian algebras, filiform algebras, and the one four-dimensional class
that slips past all of those.  Everything else comes back Unknown, which
is a verdict, not a failure.
"""

from __future__ import annotations

from . import almostabelian, filiform
from .almostabelian import FpfDecision
from .errors import NotAlmostAbelian, NotFiliform, SearchIncomplete, SplitFailure
from .liealg import LieAlgebra, check_automorphism, unimodularity_report


def decide_fpf_any(g: LieAlgebra, seed: int = 0, order_bound: int = 1000,
                   precision: int = 30,
                   conductor_limit: int = 1000) -> FpfDecision:
    """Decide whether ``g`` admits a fixed-point-free automorphism.

    Routes through cheap necessary conditions first, then the almost
    abelian engine (which also covers the abelian case), then the
    filiform engine, then a four-dimensional classification fallback.
    """
    if not g.is_solvable():
        return FpfDecision(
            "No", "not-solvable",
            "a fixed-point-free automorphism forces solvability")

    strongly = None
    unimodular = None
    try:
        report = unimodularity_report(g, conductor_limit=conductor_limit)
        strongly = report.strongly_unimodular
        unimodular = report.unimodular
    except SplitFailure:
        pass  # gate is optional; the engines may still decide
    if strongly is False:
        return FpfDecision(
            "No", "not-strongly-unimodular", "not strongly unimodular",
            details={"unimodular": unimodular})

    tried = []
    try:
        return almostabelian.decide_fpf(g, seed=seed, order_bound=order_bound,
                                        conductor_limit=conductor_limit)
    except NotAlmostAbelian:
        tried.append("almost-abelian")
    except SearchIncomplete:
        tried.append("almost-abelian (hyperplane search incomplete)")

    try:
        return filiform.decide_fpf_filiform(g, seed=seed,
                                            order_bound=order_bound,
                                            precision=precision)
    except NotFiliform:
        tried.append("filiform")

    if g.dim == 4 and strongly is True and not g.is_nilpotent():
        return _dim4_survivor(g, order_bound)

    return FpfDecision("Unknown", "unresolved",
                       "outside the classes the engines decide",
                       details={"tried": tried})


def _dim4_survivor(g: LieAlgebra, order_bound: int) -> FpfDecision:
    """A solvable, strongly unimodular, non-nilpotent four-dimensional
    algebra with no abelian hyperplane: the classification of complex
    four-dimensional Lie algebras leaves exactly one isomorphism class
    here, and that class admits fixed-point-free automorphisms of every
    even order from six upward."""
    from . import catalog

    ref = catalog.get_algebra("g10", alpha=-1)
    witness = None
    if _same_constants(g, ref.algebra):
        phi = catalog.family_automorphism("g10m1", m=3)
        report = check_automorphism(g, phi, order_bound=order_bound)
        if report.is_morphism and report.is_fpf:
            witness = report
    return FpfDecision(
        "Yes", "dim4-classification",
        "the only four-dimensional class with these invariants admits "
        "fixed-point-free automorphisms",
        witness=witness)


def _same_constants(a: LieAlgebra, b: LieAlgebra) -> bool:
    if a.dim != b.dim:
        return False
    for i in range(a.dim):
        for j in range(i + 1, a.dim):
            va, vb = a.table[i][j], b.table[i][j]
            if any(not (x - y).is_zero() for x, y in zip(va, vb)):
                return False
    return True
