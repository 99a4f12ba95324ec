"""Arbitrary-precision evaluators for the special functions the shift pairs
act on, each with first and second x-derivatives, built from the defining
power series and normalizations.

All functions take an explicit binary precision p.  mpmath supplies the
floating-point type and the elementary functions (exp, sin, gamma, pi);
the hypergeometric-type series themselves are summed here, termwise, with a
uniform truncation rule: stop once three consecutive terms fall below
2^(-p-32) relative to the partial sum.  Every evaluator can also return a
crude error estimate (last-term bound times 8).

Cancellation-heavy combinations (the Tricomi function, the decaying Bessel
solution) raise the working precision by a size-dependent guard: the two
series they subtract grow like e^x resp. e^{2x} relative to the result, so
the guard is ceil(1.5 x) resp. ceil(3 x) bits plus a fixed margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import mpmath

HALF = Fraction(1, 2)


class PrecisionError(ArithmeticError):
    """Series failed to converge within the term budget."""


class ParameterError(ValueError):
    """Pole or unsupported (logarithmic) parameter value."""


class DomainError(ValueError):
    pass


def to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def _is_nonpos_int(v) -> bool:
    return isinstance(v, (int, Fraction)) and Fraction(v).denominator == 1 \
        and v <= 0


def _is_int(v) -> bool:
    return isinstance(v, (int, Fraction)) and Fraction(v).denominator == 1


def gamma(z, p: int):
    """Gamma function at precision p; poles at nonpositive integers are
    rejected exactly for rational arguments."""
    if _is_nonpos_int(z):
        raise ParameterError(f"gamma pole at {z}")
    with mpmath.workprec(p + 32):
        val = mpmath.gamma(to_mpf(z))
    with mpmath.workprec(p):
        return +val


def rgamma(z, p: int):
    """1/Gamma, zero (exactly) at nonpositive integers."""
    with mpmath.workprec(p + 32):
        if _is_nonpos_int(z):
            return mpmath.mpf(0)
        val = mpmath.rgamma(to_mpf(z))
    with mpmath.workprec(p):
        return +val


def _sum_series(t0, ratio: Callable[[int], object], x, p: int,
                nterms: int | None = None, derivs: int = 0):
    """Sum t0 * prod ratio(0..k-1) with termwise derivative accumulation.

    Terms are c_k x^{s0+k-ish}; derivative sums use the exponent supplied by
    `ratio` through the closure (see callers): here we only need the pattern
    where term k has x-exponent exp0 + k, handled by the callers passing
    exponent data via `derivs_exponent`.
    """
    raise NotImplementedError  # callers use _sum_power_series below


def _sum_power_series(t0, ratio, exp0, exp_step, x, p, nterms=None,
                      derivs=2):
    """Sum a power series whose k-th term t_k has x-exponent exp0+exp_step*k,
    with t_{k+1} = t_k * ratio(k).  Returns (F, F', F'', last_term_bound).

    The derivative sums reuse the same terms: d/dx of c x^s is s/x * (c x^s).
    Requires x != 0 whenever derivs > 0.
    """
    total = t0
    d1 = mpmath.mpf(0)
    d2 = mpmath.mpf(0)
    xm = to_mpf(x)
    if derivs and xm == 0:
        raise DomainError("derivatives need x != 0")
    s = to_mpf(exp0)
    if derivs:
        d1 = total * s / xm
        d2 = total * s * (s - 1) / (xm * xm)
    eps = mpmath.mpf(2) ** (-(p + 32))
    small_run = 0
    t = t0
    budget = nterms if nterms is not None else 64 * p + 4000
    k = 0
    while True:
        if nterms is not None and k + 1 >= nterms:
            break
        t = t * ratio(k)
        k += 1
        total += t
        if derivs:
            s = to_mpf(exp0) + exp_step * k
            d1 += t * s / xm
            d2 += t * s * (s - 1) / (xm * xm)
        if abs(t) < eps * (abs(total) + eps):
            small_run += 1
            if small_run >= 3:
                break
        else:
            small_run = 0
        if k > budget:
            raise PrecisionError(f"series did not converge in {budget} terms")
    return total, d1, d2, abs(t)


def _terminating_length(*params) -> int | None:
    """Number of terms if some upper parameter is a nonpositive integer."""
    best = None
    for a in params:
        if _is_nonpos_int(a):
            n = int(-Fraction(a)) + 1
            best = n if best is None else min(best, n)
    return best


def hyp2f1(a, b, c, x, p: int, derivs: int = 0, return_error: bool = False):
    """Gauss series sum_k (a)_k (b)_k / ((c)_k k!) x^k, |x| < 1.

    With derivs=2 returns (F, F', F''); with return_error also the crude
    error estimate."""
    if _is_nonpos_int(c):
        raise ParameterError(f"lower parameter {c} is a nonpositive integer")
    nterms = _terminating_length(a, b)
    if nterms is None and abs(to_mpf(x)) >= 1:
        raise DomainError("series domain is |x| < 1")
    with mpmath.workprec(p + 48):
        am, bm, cm, xm = map(to_mpf, (a, b, c, x))

        def ratio(k):
            return (am + k) * (bm + k) / ((cm + k) * (k + 1)) * xm

        f, d1, d2, last = _sum_power_series(
            mpmath.mpf(1), ratio, 0, 1, xm, p, nterms, derivs=derivs)
    return _pack(f, d1, d2, last, p, derivs, return_error)


def hyp1f1(a, c, x, p: int, derivs: int = 0, return_error: bool = False):
    """Confluent series sum_k (a)_k / ((c)_k k!) x^k (entire in x)."""
    if _is_nonpos_int(c):
        raise ParameterError(f"lower parameter {c} is a nonpositive integer")
    nterms = _terminating_length(a)
    guard = 48 + max(0, int(1.5 * abs(float(to_mpf(x)))))
    with mpmath.workprec(p + guard):
        am, cm, xm = map(to_mpf, (a, c, x))

        def ratio(k):
            return (am + k) / ((cm + k) * (k + 1)) * xm

        f, d1, d2, last = _sum_power_series(
            mpmath.mpf(1), ratio, 0, 1, xm, p, nterms, derivs=derivs)
    return _pack(f, d1, d2, last, p, derivs, return_error)


def _pack(f, d1, d2, last, p, derivs, return_error):
    with mpmath.workprec(p):
        f = +f
        d1 = +d1
        d2 = +d2
        err = last * 8
    if derivs == 0:
        return (f, err) if return_error else f
    if derivs == 1:
        return (f, d1, err) if return_error else (f, d1)
    return (f, d1, d2, err) if return_error else (f, d1, d2)


def tricomi_psi(a, c, x, p: int, derivs: int = 0):
    """Tricomi's function on x > 0 through its two-series representation,
    normalized as x^{-a}(1 + O(1/x)) at infinity.  Integer c (logarithmic
    case) is unsupported."""
    if _is_int(c):
        raise ParameterError("integer second parameter is unsupported")
    if to_mpf(x) <= 0:
        raise DomainError("positive argument required")
    guard = 96 + int(1.5 * float(to_mpf(x)))
    wp = p + guard
    with mpmath.workprec(wp):
        one_minus_c = _sub(1, c)
        a_shift = _sub(_add(a, 1), c)
        g1 = gamma(one_minus_c, wp) * rgamma(a_shift, wp)
        g2 = gamma(_sub(c, 1), wp) * rgamma(a, wp)
        m1 = hyp1f1(a, c, x, wp, derivs=2)
        m2 = hyp1f1(a_shift, _sub(2, c), x, wp, derivs=2)
        xm = to_mpf(x)
        e = to_mpf(one_minus_c)
        pw = xm ** e
        f = g1 * m1[0] + g2 * pw * m2[0]
        d1 = g1 * m1[1] + g2 * (e * pw / xm * m2[0] + pw * m2[1])
        d2 = g1 * m1[2] + g2 * (e * (e - 1) * pw / (xm * xm) * m2[0]
                                + 2 * e * pw / xm * m2[1] + pw * m2[2])
    with mpmath.workprec(p):
        out = (+f, +d1, +d2)
    return out[0] if derivs == 0 else out[:derivs + 1]


def _add(u, v):
    if isinstance(u, (int, Fraction)) and isinstance(v, (int, Fraction)):
        return Fraction(u) + Fraction(v)
    return to_mpf(u) + to_mpf(v)


def _sub(u, v):
    if isinstance(u, (int, Fraction)) and isinstance(v, (int, Fraction)):
        return Fraction(u) - Fraction(v)
    return to_mpf(u) - to_mpf(v)


def bessel_i(nu, x, p: int, derivs: int = 0):
    """Modified Bessel series sum_m (x/2)^{2m+nu} / (m! Gamma(m+nu+1))."""
    if to_mpf(x) <= 0:
        raise DomainError("positive argument required")
    with mpmath.workprec(p + 48):
        xm = to_mpf(x)
        num = to_mpf(nu)
        t0 = (xm / 2) ** num * rgamma(_add(nu, 1), p + 48)
        q = (xm / 2) ** 2

        def ratio(m):
            return q / ((m + 1) * (num + m + 1))

        f, d1, d2, last = _sum_power_series(t0, ratio, num, 2, xm, p,
                                            derivs=derivs)
    return _pack(f, d1, d2, last, p, derivs, False)


def bessel_j(nu, x, p: int, derivs: int = 0):
    """Bessel series of the first kind; negative integer orders are rejected
    (use the reflection identity at integer order instead)."""
    if _is_int(nu) and Fraction(nu) < 0:
        raise ParameterError("negative integer order: use the reflection rule")
    if to_mpf(x) <= 0:
        raise DomainError("positive argument required")
    with mpmath.workprec(p + 48):
        xm = to_mpf(x)
        num = to_mpf(nu)
        t0 = (xm / 2) ** num * rgamma(_add(nu, 1), p + 48)
        q = (xm / 2) ** 2

        def ratio(m):
            return -q / ((m + 1) * (num + m + 1))

        f, d1, d2, last = _sum_power_series(t0, ratio, num, 2, xm, p,
                                            derivs=derivs)
    return _pack(f, d1, d2, last, p, derivs, False)


def bessel_k(nu, x, p: int, derivs: int = 0):
    """Decaying solution via (pi/2)(I_{-nu} - I_nu)/sin(pi nu); integer order
    (logarithmic case) is unsupported.  The subtraction cancels e^{2x} worth
    of bits, hence the 3x-bit guard."""
    if _is_int(nu):
        raise ParameterError("integer order is unsupported")
    guard = 96 + int(3.0 * float(to_mpf(x)))
    wp = p + guard
    with mpmath.workprec(wp):
        i_m = bessel_i(_sub(0, nu), x, wp, derivs=2)
        i_p = bessel_i(nu, x, wp, derivs=2)
        if not isinstance(i_m, tuple):
            i_m, i_p = (i_m,), (i_p,)
        s = mpmath.sin(mpmath.pi * to_mpf(nu))
        pref = mpmath.pi / (2 * s)
        vals = tuple(pref * (i_m[k] - i_p[k]) for k in range(3))
    with mpmath.workprec(p):
        out = tuple(+v for v in vals)
    return out[0] if derivs == 0 else out[:derivs + 1]


def bessel(kind: str, nu, x, p: int, derivs: int = 0):
    """Dispatch for the two Bessel families used by the shift pairs."""
    if kind == "J":
        return bessel_j(nu, x, p, derivs)
    if kind == "K":
        return bessel_k(nu, x, p, derivs)
    raise ValueError(f"unknown Bessel kind {kind!r}")


def weighted_parcyl(nu, x, p: int, derivs: int = 0):
    """exp(x^2/4) D_nu(x) for x > 0, via the Tricomi representation
    D_nu(x) = 2^{(nu-1)/2} e^{-x^2/4} x Psi(1/2 - nu/2, 3/2; x^2/2)."""
    if to_mpf(x) <= 0:
        raise DomainError("positive argument required")
    wp = p + 48
    with mpmath.workprec(wp):
        xm = to_mpf(x)
        s = xm * xm / 2
        a = _sub(HALF, Fraction(1, 2) * Fraction(nu)) \
            if isinstance(nu, (int, Fraction)) else mpmath.mpf(0.5) - to_mpf(nu) / 2
        psi = tricomi_psi(a, Fraction(3, 2), s, wp, derivs=2)
        pref = mpmath.mpf(2) ** ((to_mpf(nu) - 1) / 2)
        g = pref * xm * psi[0]
        g1 = pref * (psi[0] + xm * xm * psi[1])
        g2 = pref * (3 * xm * psi[1] + xm ** 3 * psi[2])
    with mpmath.workprec(p):
        out = (+g, +g1, +g2)
    return out[0] if derivs == 0 else out[:derivs + 1]


def parcyl_d(nu, x, p: int, derivs: int = 0):
    """Parabolic cylinder function D_nu(x) on x > 0."""
    wp = p + 48
    with mpmath.workprec(wp):
        g = weighted_parcyl(nu, x, wp, derivs=2)
        xm = to_mpf(x)
        w = mpmath.exp(-xm * xm / 4)
        f = w * g[0]
        d1 = w * (g[1] - xm / 2 * g[0])
        d2 = w * (g[2] - xm * g[1] + (xm * xm / 4 - mpmath.mpf(1) / 2) * g[0])
    with mpmath.workprec(p):
        out = (+f, +d1, +d2)
    return out[0] if derivs == 0 else out[:derivs + 1]


def legendre_p(nu, mu, x, p: int, derivs: int = 0):
    """Legendre function of degree nu and order mu on x > 1.

    Positive integer orders are routed through the gamma-ratio reflection;
    otherwise the hypergeometric representation in (1-x)/2 is used."""
    if to_mpf(x) <= 1:
        raise DomainError("argument must exceed 1")
    if _is_int(mu) and Fraction(mu) >= 1:
        wp = p + 48
        with mpmath.workprec(wp):
            ratio = gamma(_add(nu, _add(mu, 1)), wp) \
                * rgamma(_add(_sub(nu, mu), 1), wp)
            base = legendre_p(nu, _sub(0, mu), x, wp, derivs=2)
            vals = tuple(ratio * b for b in base)
        with mpmath.workprec(p):
            out = tuple(+v for v in vals)
        return out[0] if derivs == 0 else out[:derivs + 1]
    if _is_int(mu):  # mu <= 0 integer: 1 - mu >= 1, gamma factor is fine
        pass
    wp = p + 48
    with mpmath.workprec(wp):
        xm = to_mpf(x)
        z = (1 - xm) / 2
        m = hyp2f1(_add(_sub(1, mu), nu), _sub(_sub(0, mu), nu),
                   _sub(1, mu), z, wp, derivs=2)
        mum = to_mpf(mu)
        w = mpmath.mpf(2) ** mum * (xm * xm - 1) ** (-mum / 2) \
            * rgamma(_sub(1, mu), wp)
        lw1 = -mum * xm / (xm * xm - 1)             # W'/W
        lw2 = (mum * mum * xm * xm + mum * (xm * xm + 1)) / (xm * xm - 1) ** 2
        f = w * m[0]
        d1 = w * (lw1 * m[0] - m[1] / 2)
        d2 = w * (lw2 * m[0] - lw1 * m[1] + m[2] / 4)
    with mpmath.workprec(p):
        out = (+f, +d1, +d2)
    return out[0] if derivs == 0 else out[:derivs + 1]


# ---------------------------------------------------------------------------
# classical polynomial families, exact coefficients
# ---------------------------------------------------------------------------

def pochhammer(a: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out *= Fraction(a) + i
    return out


def _poly_add(p1, p2):
    n = max(len(p1), len(p2))
    return [Fraction(p1[i] if i < len(p1) else 0)
            + Fraction(p2[i] if i < len(p2) else 0) for i in range(n)]


def _poly_scale(p1, c):
    return [Fraction(v) * c for v in p1]


def _poly_mul(p1, p2):
    out = [Fraction(0)] * (len(p1) + len(p2) - 1)
    for i, a in enumerate(p1):
        for j, b in enumerate(p2):
            out[i + j] += Fraction(a) * b
    return out


def poly_eval(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(list(coeffs)):
        acc = acc * Fraction(x) + c
    return acc


def poly_deriv(coeffs) -> list:
    return [Fraction(c) * k for k, c in enumerate(coeffs)][1:] or [Fraction(0)]


def jacobi_coeffs(n: int, alpha: Fraction, beta: Fraction) -> list:
    """Exact coefficients from the terminating hypergeometric sum in
    (1 - x)/2."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    z = [HALF, -HALF]  # (1-x)/2
    acc = [Fraction(0)]
    zk = [Fraction(1)]
    for k in range(n + 1):
        coef = pochhammer(Fraction(-n), k) * pochhammer(n + alpha + beta + 1, k) \
            / (pochhammer(alpha + 1, k) * math.factorial(k))
        acc = _poly_add(acc, _poly_scale(zk, coef))
        zk = _poly_mul(zk, z)
    pref = pochhammer(alpha + 1, n) / math.factorial(n)
    return _poly_scale(acc, pref)


def jacobi_coeffs_recurrence(n: int, alpha: Fraction, beta: Fraction) -> list:
    """Independent three-term recurrence construction (test oracle)."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    p0 = [Fraction(1)]
    if n == 0:
        return p0
    p1 = [(alpha - beta) / 2, (alpha + beta + 2) / 2]
    for m in range(2, n + 1):
        c1 = 2 * m * (m + alpha + beta) * (2 * m + alpha + beta - 2)
        c2 = (2 * m + alpha + beta - 1) * (alpha * alpha - beta * beta)
        c3 = (2 * m + alpha + beta - 1) * (2 * m + alpha + beta) \
            * (2 * m + alpha + beta - 2)
        c4 = 2 * (m + alpha - 1) * (m + beta - 1) * (2 * m + alpha + beta)
        px = _poly_add(_poly_scale(_poly_mul([Fraction(0), Fraction(1)], p1), c3),
                       _poly_scale(p1, c2))
        px = _poly_add(px, _poly_scale(p0, -c4))
        p0, p1 = p1, _poly_scale(px, Fraction(1, 1) / c1)
    return p1


def laguerre_coeffs(n: int, alpha: Fraction) -> list:
    alpha = Fraction(alpha)
    pref = pochhammer(alpha + 1, n) / math.factorial(n)
    return [pref * pochhammer(Fraction(-n), k)
            / (pochhammer(alpha + 1, k) * math.factorial(k))
            for k in range(n + 1)]


def laguerre_coeffs_recurrence(n: int, alpha: Fraction) -> list:
    alpha = Fraction(alpha)
    p0 = [Fraction(1)]
    if n == 0:
        return p0
    p1 = [alpha + 1, Fraction(-1)]
    for m in range(1, n):
        top = _poly_add(_poly_scale(p1, 2 * m + 1 + alpha),
                        _poly_mul([Fraction(0), Fraction(-1)], p1))
        top = _poly_add(top, _poly_scale(p0, -(m + alpha)))
        p0, p1 = p1, _poly_scale(top, Fraction(1, m + 1))
    return p1


def hermite_coeffs(n: int) -> list:
    p0 = [Fraction(1)]
    if n == 0:
        return p0
    p1 = [Fraction(0), Fraction(2)]
    for m in range(1, n):
        nxt = _poly_add(_poly_mul([Fraction(0), Fraction(2)], p1),
                        _poly_scale(p0, Fraction(-2 * m)))
        p0, p1 = p1, nxt
    return p1


def special_eval(which: str, params: Sequence, x, p: int, derivs: int = 0):
    """Uniform entry point for the named auxiliary families."""
    if which == "parcyl":
        return parcyl_d(params[0], x, p, derivs)
    if which == "legendreP":
        return legendre_p(params[0], params[1], x, p, derivs)
    if which in ("jacobi", "laguerre", "hermite"):
        if which == "jacobi":
            coeffs = jacobi_coeffs(int(params[0]), params[1], params[2])
        elif which == "laguerre":
            coeffs = laguerre_coeffs(int(params[0]), params[1])
        else:
            coeffs = hermite_coeffs(int(params[0]))
        if isinstance(x, (int, Fraction)):
            vals = [poly_eval(coeffs, Fraction(x))]
            d = coeffs
            for _ in range(derivs):
                d = poly_deriv(d)
                vals.append(poly_eval(d, Fraction(x)))
            with mpmath.workprec(p):
                out = tuple(to_mpf(v) for v in vals)
            return out[0] if derivs == 0 else out
        raise DomainError("polynomial families take exact rational arguments")
    raise ValueError(f"unknown family {which!r}")


# ---------------------------------------------------------------------------
# shift-pair family evaluators
# ---------------------------------------------------------------------------

@dataclass
class FamilyEvaluator:
    """One shift pair: the function family F(u), its derivatives, the two
    first-order operators with their closed-form shift factors, and the
    second-order annihilator when one exists."""
    fid: str
    params: Mapping[str, Fraction]
    domain: tuple
    value_derivs: Callable          # (u, x, p) -> (F, F', F'')
    down_coeffs: Callable           # (u, x, p) -> (c1, c0): operator c1 d + c0
    up_coeffs: Callable
    down_factor: Callable           # exact Fraction factor, shift u -> u-1
    up_factor: Callable             # exact Fraction factor, shift u -> u+1
    det_closed: Callable            # exact Fraction determinant at midpoint s
    annihilator: Callable | None = None  # (u, x, p) -> (c2, c1, c0)
    associated_l: tuple | None = None    # (kind, tag, params dict)
    exact_value: Callable | None = None  # exact (F, F') at rational x


def family_eval(fam: FamilyEvaluator, u, x, p: int):
    """F(u)(x) and its x-derivative, per the family's own definition."""
    f, d1, _ = fam.value_derivs(u, x, p)
    return f, d1


def make_family(fid: str, params: Mapping[str, Fraction] | None = None) -> FamilyEvaluator:
    params = {k: Fraction(v) for k, v in (params or {}).items()}
    try:
        builder = _FAMILY_BUILDERS[fid]
    except KeyError:
        raise ValueError(f"unknown family {fid!r}") from None
    return builder(params)


def _dom(lo, hi):
    return (Fraction(lo), Fraction(hi))


def _p1(params):
    a = params.setdefault("a", Fraction(1, 3))
    b = params.setdefault("b", Fraction(2, 3))
    c = params.setdefault("c", Fraction(5, 4))

    def value(u, x, p):
        return hyp2f1(a + u, b, c, x, p, derivs=2)

    return FamilyEvaluator(
        fid="P1", params=params, domain=_dom(Fraction(1, 20), Fraction(9, 10)),
        value_derivs=value,
        down_coeffs=lambda u, x, p: (to_mpf(x) * (1 - to_mpf(x)),
                                     -to_mpf(b) * to_mpf(x) + to_mpf(c - a - u)),
        up_coeffs=lambda u, x, p: (to_mpf(x), to_mpf(a + u)),
        down_factor=lambda u: c - a - u,
        up_factor=lambda u: a + u,
        det_closed=lambda s: (a + s - HALF) * (c - a - HALF - s),
        annihilator=lambda u, x, p: (to_mpf(x) * (1 - to_mpf(x)),
                                     to_mpf(c) - to_mpf(a + u + b + 1) * to_mpf(x),
                                     -to_mpf((a + u) * b)),
        associated_l=("QISM-I", "A", {"a": a, "b": b, "c": c}),
    )


def _p2(params):
    a = params.setdefault("a", Fraction(0))
    b = params.setdefault("b", Fraction(2, 3))
    c = params.setdefault("c", Fraction(5, 7))

    def value(u, x, p):
        with mpmath.workprec(p + 48):
            m = hyp2f1(a + u, b + u, c + u, x, p + 48, derivs=2)
            xm = to_mpf(x)
            w = (1 - xm) ** to_mpf(a + u)
            g = -to_mpf(a + u) / (1 - xm)
            gp = -to_mpf(a + u) / (1 - xm) ** 2
            f = w * m[0]
            d1 = w * (g * m[0] + m[1])
            d2 = w * ((g * g + gp) * m[0] + 2 * g * m[1] + m[2])
        with mpmath.workprec(p):
            return +f, +d1, +d2

    return FamilyEvaluator(
        fid="P2", params=params, domain=_dom(Fraction(1, 20), Fraction(9, 10)),
        value_derivs=value,
        down_coeffs=lambda u, x, p: (to_mpf(x),
                                     -to_mpf(b - c) / (1 - to_mpf(x))
                                     + to_mpf(b - 1 + u)),
        up_coeffs=lambda u, x, p: (1 - to_mpf(x), to_mpf(a + u)),
        down_factor=lambda u: c + u - 1,
        up_factor=lambda u: (a + u) * (b + u) / (c + u),
        det_closed=lambda s: (a + s - HALF) * (b + s - HALF),
    )


def _p3(params):
    a = params.setdefault("a", Fraction(1, 3))
    c = params.setdefault("c", Fraction(5, 4))
    delta = (a - c + HALF) * (a - HALF) * HALF

    def value(u, x, p):
        return hyp2f1(a + u, a - u, c, x, p, derivs=2)

    def down(u, x, p):
        xm = to_mpf(x)
        return (xm * (1 - xm),
                to_mpf(HALF - a) * xm + to_mpf(c) / 2 - mpmath.mpf(1) / 2
                + to_mpf(u - HALF) * (xm - mpmath.mpf(1) / 2)
                + to_mpf(delta / (u - HALF)))

    def up(u, x, p):
        xm = to_mpf(x)
        return (-xm * (1 - xm),
                -to_mpf(HALF - a) * xm - to_mpf(c) / 2 + mpmath.mpf(1) / 2
                + to_mpf(u + HALF) * (xm - mpmath.mpf(1) / 2)
                + to_mpf(delta / (u + HALF)))

    return FamilyEvaluator(
        fid="P3", params=params, domain=_dom(Fraction(1, 20), Fraction(9, 10)),
        value_derivs=value, down_coeffs=down, up_coeffs=up,
        down_factor=lambda u: (a - u) * (a - c + u) / (2 * (u - HALF)),
        up_factor=lambda u: (a + u) * (a - c - u) / (2 * (u + HALF)),
        det_closed=lambda s: ((a - HALF) ** 2 - s * s)
        * ((a - c + HALF) ** 2 - s * s) / (4 * s * s),
        annihilator=lambda u, x, p: (to_mpf(x) * (1 - to_mpf(x)),
                                     to_mpf(c) - to_mpf(2 * a + 1) * to_mpf(x),
                                     to_mpf(u * u - a * a)),
        associated_l=("QISM-II", "genA", {"a": a, "c": c}),
    )


def _p4(params):
    nu = params.setdefault("nu", Fraction(1, 4))

    def value(u, x, p):
        return legendre_p(nu, u, x, p, derivs=2)

    def down(u, x, p):
        xm = to_mpf(x)
        r = mpmath.sqrt(xm * xm - 1)
        return (r, to_mpf(u) * xm / r)

    def up(u, x, p):
        xm = to_mpf(x)
        r = mpmath.sqrt(xm * xm - 1)
        return (r, -to_mpf(u) * xm / r)

    return FamilyEvaluator(
        fid="P4", params=params, domain=_dom(Fraction(6, 5), Fraction(5, 2)),
        value_derivs=value, down_coeffs=down, up_coeffs=up,
        down_factor=lambda u: (nu + u) * (nu - u + 1),
        up_factor=lambda u: Fraction(1),
        det_closed=lambda s: (nu + HALF) ** 2 - s * s,
    )


def _p5_q_coeffs(n: int, k: int) -> list:
    """(1-x)^n F_k as exact polynomial coefficients, for k in -n..n."""
    if k >= 0:
        pref = Fraction(math.factorial(n + k), math.factorial(k))
        acc = [Fraction(0)]
        zk = [Fraction(1)]
        for j in range(n - k + 1):
            coef = pochhammer(Fraction(-(n - k)), j) \
                * pochhammer(Fraction(n + k + 1), j) \
                / (pochhammer(Fraction(k + 1), j) * math.factorial(j))
            acc = _poly_add(acc, _poly_scale(zk, coef))
            zk = _poly_mul(zk, [Fraction(0), Fraction(1)])
        one_minus_x_k = [Fraction(1)]
        for _ in range(k):
            one_minus_x_k = _poly_mul(one_minus_x_k, [Fraction(1), Fraction(-1)])
        return _poly_scale(_poly_mul(acc, one_minus_x_k), pref)
    m = -k
    q = _p5_q_coeffs(n, m)
    for _ in range(m):  # divide exactly by (1 - x)
        q = _poly_divide_one_minus_x(q)
    xk = [Fraction(0)] * m + [Fraction(1)]
    return _poly_scale(_poly_mul(q, xk), Fraction((-1) ** m))


def _poly_divide_one_minus_x(q: list) -> list:
    out = [Fraction(0)] * (len(q) - 1)
    rem = list(q)
    for i in range(len(q) - 1, 0, -1):
        coef = -rem[i]
        out[i - 1] = coef
        rem[i] = Fraction(0)
        rem[i - 1] -= coef
    if rem[0] != 0:
        raise ValueError("polynomial not divisible by (1 - x)")
    return out


def p5_exact(n: int, k: int, x: Fraction):
    """Exact (F_k(x), F_k'(x)) as Fractions."""
    q = _p5_q_coeffs(n, k)
    x = Fraction(x)
    qv = poly_eval(q, x)
    qd = poly_eval(poly_deriv(q), x)
    base = (1 - x) ** n
    f = qv / base
    d1 = (qd * (1 - x) + n * qv) / (1 - x) ** (n + 1)
    return f, d1


def _p5(params):
    n = int(params.setdefault("n", Fraction(2)))

    def value(u, x, p):
        k = int(u)
        q = _p5_q_coeffs(n, k)
        xf = Fraction(x)
        f, d1 = p5_exact(n, k, xf)
        qd2 = poly_eval(poly_deriv(poly_deriv(q)), xf)
        qd = poly_eval(poly_deriv(q), xf)
        qv = poly_eval(q, xf)
        d2 = (qd2 * (1 - xf) ** 2 + 2 * n * qd * (1 - xf)
              + n * (n + 1) * qv) / (1 - xf) ** (n + 2)
        with mpmath.workprec(p):
            return to_mpf(f), to_mpf(d1), to_mpf(d2)

    return FamilyEvaluator(
        fid="P5", params={"n": Fraction(n)},
        domain=_dom(Fraction(1, 20), Fraction(9, 10)),
        value_derivs=value,
        down_coeffs=lambda u, x, p: (to_mpf(x),
                                     -to_mpf(n) / (1 - to_mpf(x)) + to_mpf(n + u)),
        up_coeffs=lambda u, x, p: (1 - to_mpf(x), to_mpf(u - n)),
        down_factor=lambda u: Fraction(n) + u,
        up_factor=lambda u: -(Fraction(n) - u),
        det_closed=lambda s: s * s - (Fraction(n) + HALF) ** 2,
        exact_value=lambda u, x: p5_exact(n, int(u), x),
    )


def _p6(params):
    a = params.setdefault("a", Fraction(1, 3))
    c = params.setdefault("c", Fraction(5, 4))

    def value(u, x, p):
        return hyp1f1(a + u, c, x, p, derivs=2)

    return FamilyEvaluator(
        fid="P6", params=params, domain=_dom(Fraction(1, 2), Fraction(8)),
        value_derivs=value,
        down_coeffs=lambda u, x, p: (to_mpf(x), -to_mpf(x) + to_mpf(c - a - u)),
        up_coeffs=lambda u, x, p: (to_mpf(x), to_mpf(a + u)),
        down_factor=lambda u: c - a - u,
        up_factor=lambda u: a + u,
        det_closed=lambda s: (a + s - HALF) * (c - a - HALF - s),
        annihilator=lambda u, x, p: (to_mpf(x), to_mpf(c) - to_mpf(x),
                                     -to_mpf(a + u)),
        associated_l=("QISM-I", "B", {"a": a, "c": c}),
    )


def _p7(params):
    c = params.setdefault("c", Fraction(3, 7))

    def value(u, x, p):
        return tricomi_psi(u, c + u, x, p, derivs=2)

    return FamilyEvaluator(
        fid="P7", params=params, domain=_dom(Fraction(1, 2), Fraction(8)),
        value_derivs=value,
        down_coeffs=lambda u, x, p: (to_mpf(x), -to_mpf(x) + to_mpf(c + u - 1)),
        up_coeffs=lambda u, x, p: (mpmath.mpf(1), mpmath.mpf(0)),
        down_factor=lambda u: Fraction(-1),
        up_factor=lambda u: -u,
        det_closed=lambda s: s - HALF,
        annihilator=lambda u, x, p: (to_mpf(x), to_mpf(c + u) - to_mpf(x),
                                     -to_mpf(u)),
        associated_l=("QISM-I", "C'", {"c": c}),
    )


def _p8(params):
    delta = params.setdefault("delta", Fraction(1, 8))

    def value(u, x, p):
        wp = p + 48
        with mpmath.workprec(wp):
            psi = tricomi_psi(2 * delta + HALF + u, 2 * u + 1, x, wp, derivs=2)
            xm = to_mpf(x)
            w = xm ** to_mpf(u) * mpmath.exp(-xm / 2)
            g = to_mpf(u) / xm - mpmath.mpf(1) / 2
            gp = -to_mpf(u) / (xm * xm)
            f = w * psi[0]
            d1 = w * (g * psi[0] + psi[1])
            d2 = w * ((g * g + gp) * psi[0] + 2 * g * psi[1] + psi[2])
        with mpmath.workprec(p):
            return +f, +d1, +d2

    def anni(u, x, p):
        xm = to_mpf(x)
        return (-xm * xm, -xm,
                xm * xm / 4 + 2 * to_mpf(delta) * xm + to_mpf(u) ** 2)

    return FamilyEvaluator(
        fid="P8", params=params, domain=_dom(Fraction(1, 2), Fraction(8)),
        value_derivs=value,
        down_coeffs=lambda u, x, p: (mpmath.mpf(1),
                                     to_mpf(u) / to_mpf(x)
                                     + to_mpf(delta / (u - HALF))),
        up_coeffs=lambda u, x, p: (mpmath.mpf(-1),
                                   to_mpf(u) / to_mpf(x)
                                   + to_mpf(delta / (u + HALF))),
        down_factor=lambda u: (2 * delta + HALF - u) / (2 * u - 1),
        up_factor=lambda u: (2 * delta + HALF + u) / (2 * u + 1),
        det_closed=lambda s: delta * delta / (s * s) - Fraction(1, 4),
        annihilator=anni,
        associated_l=("QISM-II", "genC''", {"delta": delta}),
    )


def _p9(params):
    # as printed: F(u) = exp(x^2/4) D_{-u}(x)
    def value(u, x, p):
        return weighted_parcyl(-u, x, p, derivs=2)

    return FamilyEvaluator(
        fid="P9", params=params, domain=_dom(Fraction(1, 2), Fraction(4)),
        value_derivs=value,
        down_coeffs=lambda u, x, p: (mpmath.mpf(1), -to_mpf(x)),
        up_coeffs=lambda u, x, p: (mpmath.mpf(1), mpmath.mpf(0)),
        down_factor=lambda u: Fraction(-1),
        up_factor=lambda u: -u,
        det_closed=lambda s: s - HALF,
    )


def _p9r(params):
    # reindexed to match the L-operator: F(u) = exp(x^2/4) D_u(x); the
    # lowering operator is d with factor u, the raising one (d - x) with -1
    def value(u, x, p):
        return weighted_parcyl(u, x, p, derivs=2)

    return FamilyEvaluator(
        fid="P9R", params=params, domain=_dom(Fraction(1, 2), Fraction(4)),
        value_derivs=value,
        down_coeffs=lambda u, x, p: (mpmath.mpf(1), mpmath.mpf(0)),
        up_coeffs=lambda u, x, p: (mpmath.mpf(1), -to_mpf(x)),
        down_factor=lambda u: u,
        up_factor=lambda u: Fraction(-1),
        det_closed=lambda s: -s - HALF,
        annihilator=lambda u, x, p: (mpmath.mpf(1), -to_mpf(x), to_mpf(u)),
        associated_l=("QISM-I", "D'", {}),
    )


def _p10(params):
    def value(u, x, p):
        wp = p + 48
        with mpmath.workprec(wp):
            k = bessel_k(u, x, wp, derivs=2)
            xm = to_mpf(x)
            w = xm ** (-to_mpf(u))
            g = -to_mpf(u) / xm
            gp = to_mpf(u) / (xm * xm)
            f = w * k[0]
            d1 = w * (g * k[0] + k[1])
            d2 = w * ((g * g + gp) * k[0] + 2 * g * k[1] + k[2])
        with mpmath.workprec(p):
            return +f, +d1, +d2

    return FamilyEvaluator(
        fid="P10", params=params, domain=_dom(Fraction(1, 2), Fraction(8)),
        value_derivs=value,
        down_coeffs=lambda u, x, p: (to_mpf(x), 2 * to_mpf(u)),
        up_coeffs=lambda u, x, p: (1 / to_mpf(x), mpmath.mpf(0)),
        down_factor=lambda u: Fraction(-1),
        up_factor=lambda u: Fraction(-1),
        det_closed=lambda s: Fraction(1),
        annihilator=lambda u, x, p: (to_mpf(x), 2 * to_mpf(u) + 1, -to_mpf(x)),
        associated_l=("QISM-I", "C''", {}),
    )


def _p11(params):
    def value(u, x, p):
        return bessel_j(u, x, p, derivs=2)

    return FamilyEvaluator(
        fid="P11", params=params, domain=_dom(Fraction(1, 2), Fraction(8)),
        value_derivs=value,
        down_coeffs=lambda u, x, p: (mpmath.mpf(1), to_mpf(u) / to_mpf(x)),
        up_coeffs=lambda u, x, p: (mpmath.mpf(-1), to_mpf(u) / to_mpf(x)),
        down_factor=lambda u: Fraction(1),
        up_factor=lambda u: Fraction(1),
        det_closed=lambda s: Fraction(1),
        annihilator=lambda u, x, p: (to_mpf(x) ** 2, to_mpf(x),
                                     to_mpf(x) ** 2 - to_mpf(u) ** 2),
    )


_FAMILY_BUILDERS = {
    "P1": _p1, "P2": _p2, "P3": _p3, "P4": _p4, "P5": _p5, "P6": _p6,
    "P7": _p7, "P8": _p8, "P9": _p9, "P9R": _p9r, "P10": _p10, "P11": _p11,
}

ALL_FAMILIES = ("P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8", "P9", "P10",
                "P11")
