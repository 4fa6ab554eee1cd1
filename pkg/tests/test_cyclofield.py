import math
import random
from fractions import Fraction

import mpmath
import pytest

from liefix.cyclofield import (
    CycPolynomial,
    CycScalar,
    cyclotomic_polynomial,
    divisors,
    galois_conjugate,
    numeric_eval,
    parse_scalar,
    rational_sqrt,
    scalar,
    sqrt_conductor,
    totient,
    try_lower_conductor,
    zeta,
)
from liefix.errors import ConductorError, DivisionByZero, ParseError

F = Fraction


def coeffs(*vals):
    return tuple(F(v) for v in vals)


def test_cyclotomic_polynomial_small():
    # frozen expected values, checked against the product formula below
    assert cyclotomic_polynomial(1) == coeffs(-1, 1)
    assert cyclotomic_polynomial(3) == coeffs(1, 1, 1)
    assert cyclotomic_polynomial(4) == coeffs(1, 0, 1)
    assert cyclotomic_polynomial(8) == coeffs(1, 0, 0, 0, 1)
    assert cyclotomic_polynomial(12) == coeffs(1, 0, -1, 0, 1)


def test_cyclotomic_product_recovers_x_m_minus_1():
    # independent oracle: prod over divisors of Phi_d = z^m - 1
    for m in (1, 2, 6, 9, 10, 12, 15, 16):
        prod = [F(1)]
        for d in divisors(m):
            phi_d = list(cyclotomic_polynomial(d))
            out = [F(0)] * (len(prod) + len(phi_d) - 1)
            for i, a in enumerate(prod):
                for j, b in enumerate(phi_d):
                    out[i + j] += a * b
            prod = out
        expect = [F(-1)] + [F(0)] * (m - 1) + [F(1)]
        assert prod == expect


def test_totient_matches_brute_force():
    for m in range(1, 40):
        assert totient(m) == sum(1 for k in range(1, m + 1) if math.gcd(k, m) == 1)


def test_parse_example_conductor8():
    a = parse_scalar("1/2*z^3 - 2", 8)
    assert a.coeffs == coeffs(-2, 0, 0, F(1, 2))


def test_parse_roundtrip_random():
    rng = random.Random(0)
    for _ in range(200):
        m = rng.choice([1, 2, 3, 4, 5, 6, 8, 12])
        n = totient(m)
        vals = [F(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(n)]
        a = CycScalar(m, vals)
        assert parse_scalar(a.format(), m) == a


def test_parse_rejects_garbage():
    with pytest.raises(ParseError):
        parse_scalar("z**2", 8)
    with pytest.raises(ParseError):
        parse_scalar("1 +", 8)
    with pytest.raises(ParseError):
        parse_scalar("", 8)
    with pytest.raises(ConductorError):
        parse_scalar("z", 1)


def test_zeta_high_powers_reduce():
    z = zeta(4)
    assert z * z == scalar(-1)
    assert z**4 == scalar(1)
    assert zeta(2) == scalar(-1)
    assert zeta(1) == scalar(1)


def test_inverse_of_one_plus_i():
    a = scalar(1) + zeta(4)
    inv = a.inverse()
    assert inv == CycScalar(4, [F(1, 2), F(-1, 2)])
    assert a * inv == 1


def test_inverse_random_property():
    rng = random.Random(1)
    for _ in range(120):
        m = rng.choice([1, 3, 4, 5, 8, 12])
        vals = [F(rng.randint(-4, 4)) for _ in range(totient(m))]
        a = CycScalar(m, vals)
        if a.is_zero():
            continue
        assert a * a.inverse() == 1
    with pytest.raises(DivisionByZero):
        scalar(0).inverse()


def test_phi_at_zeta_is_zero():
    for m in (2, 3, 4, 6, 8, 12):
        p = CycPolynomial([scalar(c) for c in cyclotomic_polynomial(m)])
        assert p.evaluate(zeta(m)).is_zero()


def test_lift_example():
    a = zeta(3)
    b = a.lift(6)
    assert b == zeta(6) ** 2
    # lifting never changes the value
    assert numeric_eval(a, 25) is not None
    diff = numeric_eval(a, 25) - numeric_eval(b, 25)
    assert abs(diff) < mpmath.mpf(10) ** -20


def test_cross_conductor_arithmetic():
    a = zeta(3) + zeta(4)  # lands at conductor 12
    assert a.conductor == 12
    b = a - zeta(4)
    assert b == zeta(3)


def test_numeric_eval_precision():
    val = numeric_eval(zeta(8), 40)
    with mpmath.workdps(60):
        exact = mpmath.mpc(mpmath.sqrt(mpmath.mpf(2)) / 2,
                           mpmath.sqrt(mpmath.mpf(2)) / 2)
        assert abs(val - exact) < mpmath.mpf(10) ** -38


def test_galois_conjugate_is_field_map():
    rng = random.Random(2)
    m = 12
    for _ in range(40):
        a = CycScalar(m, [F(rng.randint(-3, 3)) for _ in range(totient(m))])
        b = CycScalar(m, [F(rng.randint(-3, 3)) for _ in range(totient(m))])
        for k in (5, 7, 11):
            assert galois_conjugate(a * b, k) == galois_conjugate(a, k) * galois_conjugate(b, k)
            assert galois_conjugate(a + b, k) == galois_conjugate(a, k) + galois_conjugate(b, k)


def test_try_lower_conductor():
    a = zeta(3).lift(12)
    low = try_lower_conductor(a, 3)
    assert low is not None and low.conductor == 3 and low == zeta(3)
    assert try_lower_conductor(zeta(12), 3) is None
    r = scalar(F(7, 3)).lift(1)
    assert try_lower_conductor(zeta(4) * 0 + r.lift(4), 1) == r


def test_polynomial_divmod_and_gcd():
    t = CycPolynomial([0, 1])
    p = (t - scalar(1)) * (t - scalar(2)) * (t + scalar(5))
    q, r = divmod(p, t - scalar(2))
    assert r.is_zero()
    assert q == (t - scalar(1)) * (t + scalar(5))
    g = p.gcd((t - scalar(2)) * (t - scalar(7)))
    assert g == (t - scalar(2))


def test_polynomial_scale_argument():
    t = CycPolynomial([0, 1])
    p = t * t + scalar(3) * t + scalar(1)
    z = zeta(4)
    q = p.scale_argument(z)
    assert q.evaluate(scalar(2)) == p.evaluate(z * 2)


def test_rational_sqrt():
    for q in (2, 3, 5, -1, -2, -3, -4, 12, F(9, 4), F(-49, 2), 1, 0):
        r = rational_sqrt(q)
        assert r is not None
        assert r * r == F(q)
    assert sqrt_conductor(-1) == 4
    assert sqrt_conductor(-3) == 3
    assert sqrt_conductor(2) == 8
    assert sqrt_conductor(F(9, 4)) == 1
    # constrained to a conductor that lacks the root
    assert rational_sqrt(2, conductor=12) is None
    got = rational_sqrt(-3, conductor=12)
    assert got is not None and got.conductor == 12 and got * got == -3


def test_scalar_hash_and_eq_across_conductors():
    a = scalar(F(5, 2))
    b = scalar(F(5, 2)).lift(6)
    assert a == b and hash(a) == hash(b)
    assert zeta(3) != zeta(4)
