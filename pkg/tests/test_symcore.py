import random
from fractions import Fraction as Q

import mpmath
import pytest

from ladderops.symcore import (
    MultiPoly, RatFunc, ratfunc_eq, ZeroDenominatorError, InconclusiveError,
    ENum, ESym, ECot, ESin, EExp, emul, eadd, epow,
    expr_diff, eval_numeric, prob_identity, sample_rationals,
)

X = MultiPoly.sym("x")
U = MultiPoly.sym("u")
V = MultiPoly.sym("v")


def test_ratfunc_eq_factorization_identity():
    assert RatFunc(U * U - V * V, U - V) == RatFunc(U + V)


def test_ratfunc_eq_common_factor():
    assert RatFunc(X, 1 - X) == RatFunc(X * (1 + X), (1 - X) * (1 + X))


def test_ratfunc_eq_after_substitution():
    # c - 2a equals the symbol q1 once q1 is substituted by c - 2a
    a, c = MultiPoly.sym("a"), MultiPoly.sym("c")
    lhs = RatFunc(c - 2 * a)
    q1 = RatFunc.sym("q1")
    assert q1.subst("q1", c - MultiPoly.const(2) * a) == lhs


def test_zero_denominator_rejected():
    with pytest.raises(ZeroDenominatorError):
        RatFunc(X, MultiPoly.const(0))
    with pytest.raises(ZeroDenominatorError):
        RatFunc(X) / RatFunc.const(0)


def _random_poly(rng, symbols=("x", "y"), terms=4, deg=3):
    p = MultiPoly()
    for _ in range(terms):
        mono = MultiPoly.const(Q(rng.randint(-9, 9)))
        for s in symbols:
            mono = mono * MultiPoly.sym(s, rng.randint(0, deg))
        p = p + mono
    return p


def _random_ratfunc(rng):
    num = _random_poly(rng)
    den = _random_poly(rng)
    while den.is_zero():
        den = _random_poly(rng)
    return RatFunc(num, den)


def test_ring_axioms_randomized():
    rng = random.Random(42)
    for _ in range(30):
        f, g, h = (_random_ratfunc(rng) for _ in range(3))
        assert (f + g) + h == f + (g + h)
        assert f * (g + h) == f * g + f * h
        assert (f + g) - g == f
        assert f * g == g * f


def test_poly_ring_axioms_randomized():
    rng = random.Random(7)
    for _ in range(30):
        f, g, h = (_random_poly(rng) for _ in range(3))
        assert (f * g) * h == f * (g * h)
        assert f * (g + h) == f * g + f * h
        assert (f + g) - g == f


def test_ratfunc_eq_is_equivalence_relation():
    rng = random.Random(3)
    for _ in range(10):
        f = _random_ratfunc(rng)
        scale = _random_poly(rng)
        while scale.is_zero():
            scale = _random_poly(rng)
        g = RatFunc(f.num * scale, f.den * scale)  # same function
        h = RatFunc(g.num * 3, g.den * 3)
        assert ratfunc_eq(f, f)
        assert ratfunc_eq(f, g) == ratfunc_eq(g, f)
        if ratfunc_eq(f, g) and ratfunc_eq(g, h):
            assert ratfunc_eq(f, h)


def test_exact_div():
    p = (X + 1) * (X * X - X + 2)
    assert p.exact_div(X + MultiPoly.const(1)) == X * X - X + MultiPoly.const(2)
    assert (X * X + MultiPoly.const(1)).exact_div(X + MultiPoly.const(1)) is None


def test_poly_subst_and_eval():
    p = U * U - MultiPoly.const(1)
    shifted = p.subst("u", U + MultiPoly.const(Q(1, 2)))
    assert shifted.eval({"u": Q(1, 2)}) == 0
    assert p.eval({"u": Q(3)}) == 8


# -- expressions -------------------------------------------------------------

def test_diff_square():
    x = ESym("x")
    assert prob_identity(expr_diff(x * x, "x"), emul(ENum(2), x), seed=1)


def test_diff_cot_finite_difference_oracle():
    # d/dx cot(a x) at x = 0.7, a = 1.3, against a central difference with
    # step 2^-40 at 128-bit working precision
    x, a = ESym("x"), ESym("a")
    e = ECot(emul(a, x))
    d = expr_diff(e, "x")
    vals = {"a": Q(13, 10)}
    h = Q(1, 2 ** 40)
    x0 = Q(7, 10)
    p = 128
    with mpmath.workprec(p):
        fp = eval_numeric(e, {**vals, "x": x0 + h}, p)
        fm = eval_numeric(e, {**vals, "x": x0 - h}, p)
        cfd = (fp - fm) * (2 ** 40) / 2
        exact = eval_numeric(d, {**vals, "x": x0}, p)
        assert abs(cfd - exact) < mpmath.mpf(2) ** -70
    # closed form -a / sin(ax)^2
    closed = emul(ENum(-1), a, epow(ESin(emul(a, x)), -2))
    assert prob_identity(d, closed, seed=5)


def test_diff_imaginary_exponential():
    # d/dx (q e^{-iax}) = -i a q e^{-iax}, with i the declared constant
    x, a, q, i = ESym("x"), ESym("a"), ESym("q"), ESym("i")
    e = emul(q, EExp(emul(ENum(-1), i, a, x)))
    d = expr_diff(e, "x")
    expected = emul(ENum(-1), i, a, q, EExp(emul(ENum(-1), i, a, x)))
    assert prob_identity(d, expected, seed=11)


def test_imaginary_square_folds():
    i = ESym("i")
    assert isinstance(emul(i, i), ENum)
    assert emul(i, i).value == -1


def test_eval_simple():
    x = ESym("x")
    assert eval_numeric(x + 1, {"x": Q(1)}, 64) == 2


def test_eval_cot_quarter_pi():
    # cot(a x) at a = 2, x = pi/8 equals 1
    x, a = ESym("x"), ESym("a")
    e = ECot(emul(a, x))
    with mpmath.workprec(250):
        val = eval_numeric(e, {"a": Q(2), "x": mpmath.pi / 8}, 192)
        assert abs(val - 1) < mpmath.mpf(2) ** -100


def test_eval_sin_zero():
    x, a = ESym("x"), ESym("a")
    assert eval_numeric(ESin(emul(a, x)), {"a": Q(1), "x": Q(0)}, 64) == 0


def test_prob_identity_reflexive_and_deterministic():
    x, a = ESym("x"), ESym("a")
    e = eadd(ECot(emul(a, x)), epow(x, 3))
    assert prob_identity(e, e, seed=99)
    r1 = [sample_rationals(Q(1, 10), Q(9, 10), 4, random.Random(5))
          for _ in range(2)]
    assert r1[0] != r1[1] or r1[0] == r1[1]  # lists well-defined
    assert sample_rationals(Q(1, 10), Q(9, 10), 4, random.Random(5)) == \
        sample_rationals(Q(1, 10), Q(9, 10), 4, random.Random(5))


def test_prob_identity_separates():
    # a gap above the tolerance is detected at every point ...
    x = ESym("x")
    shifted = eadd(x, ENum(Q(1, 2 ** 50)))
    assert not prob_identity(x, shifted, tol=mpmath.mpf(2) ** -100, seed=2)
    # ... while a gap far below it is, by contract, not
    tiny = eadd(x, ENum(Q(1, 2 ** 200)))
    assert prob_identity(x, tiny, tol=mpmath.mpf(2) ** -100, seed=2)


def test_prob_identity_miller_trig():
    # k' + k^2 = -a^2 and j' + k j = -b/2 for the trigonometric solution
    x, a, b, q = ESym("x"), ESym("a"), ESym("b"), ESym("q")
    k = emul(a, ECot(emul(a, x)))
    j = eadd(emul(b, epow(emul(ENum(2), a), -1), ECot(emul(a, x))),
             emul(q, epow(ESin(emul(a, x)), -1)))
    assert prob_identity(expr_diff(k, "x") + k * k,
                         emul(ENum(-1), a, a), seed=21)
    assert prob_identity(expr_diff(j, "x") + k * j,
                         emul(ENum(Q(-1, 2)), b), seed=22)


def test_diff_product_and_chain_rule_randomized():
    rng = random.Random(17)
    x = ESym("x")
    p = 192
    h = Q(1, 2 ** (p // 3))
    with mpmath.workprec(p + 16):
        for _ in range(6):
            e = _random_expr(rng, depth=3)
            d = expr_diff(e, "x")
            for _ in range(3):
                x0 = Q(rng.randint(2 ** 19, 9 * 2 ** 19), 2 ** 20)
                try:
                    fp = eval_numeric(e, {"x": x0 + h}, p)
                    fm = eval_numeric(e, {"x": x0 - h}, p)
                    ex = eval_numeric(d, {"x": x0}, p)
                except Exception:
                    continue
                cfd = (fp - fm) * (2 ** (p // 3)) / 2
                scale = max(abs(ex), mpmath.mpf(1))
                assert abs(cfd - ex) / scale < mpmath.mpf(2) ** -(p // 2)
    _ = x


def _random_expr(rng, depth):
    if depth == 0:
        return rng.choice([ESym("x"), ENum(Q(rng.randint(1, 5), 3))])
    kind = rng.randrange(5)
    if kind == 0:
        return eadd(_random_expr(rng, depth - 1), _random_expr(rng, depth - 1))
    if kind == 1:
        return emul(_random_expr(rng, depth - 1), _random_expr(rng, depth - 1))
    if kind == 2:
        return ESin(_random_expr(rng, depth - 1))
    if kind == 3:
        return ECos(_random_expr(rng, depth - 1))
    return EExp(emul(ENum(Q(1, 4)), _random_expr(rng, depth - 1)))


from ladderops.symcore import ECos  # noqa: E402  (used by the generator)
