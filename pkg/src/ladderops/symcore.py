"""Exact scalar arithmetic: big rationals, multivariate polynomials, rational
functions, and a small elementary-expression layer with symbolic
differentiation and seeded numeric identity testing.

Polynomials are stored sparsely as {monomial: Fraction} with monomials encoded
as sorted tuples of (symbol, exponent) pairs.  Rational functions are reduced
only by integer content, common monomial factors, and opportunistic exact
division; no multivariate gcd is attempted.  Equality of rational functions is
decided by exact cross-multiplication.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Union

import mpmath

# All exact scalars in this package are stdlib Fractions.
BigRational = Fraction

Scalar = Union[int, Fraction]

_ONE_MONO: tuple = ()


class SymcoreError(Exception):
    pass


class ZeroDenominatorError(SymcoreError):
    pass


class EvaluationError(SymcoreError):
    """Numeric evaluation hit a pole or undefined point.

    Carries the offending subexpression in ``.subexpr``.
    """

    def __init__(self, msg, subexpr=None):
        super().__init__(msg)
        self.subexpr = subexpr


class InconclusiveError(SymcoreError):
    """Every sampled point hit a pole; sampling says nothing."""


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected int or Fraction, got {type(value).__name__}")


def _mono_mul(m1: tuple, m2: tuple) -> tuple:
    if not m1:
        return m2
    if not m2:
        return m1
    exps: dict = dict(m1)
    for sym, e in m2:
        ne = exps.get(sym, 0) + e
        if ne:
            exps[sym] = ne
        else:
            del exps[sym]
    return tuple(sorted(exps.items()))


def _mono_divides(m1: tuple, m2: tuple) -> bool:
    """True iff monomial m1 divides m2 (exponentwise)."""
    d2 = dict(m2)
    return all(d2.get(sym, 0) >= e for sym, e in m1)


def _mono_div(m1: tuple, m2: tuple) -> tuple:
    """m1 / m2, assuming divisibility."""
    exps = dict(m1)
    for sym, e in m2:
        ne = exps.get(sym, 0) - e
        if ne:
            exps[sym] = ne
        else:
            del exps[sym]
    return tuple(sorted(exps.items()))


class MultiPoly:
    """Sparse exact multivariate polynomial over Fractions.

    The symbol set is implicit: any symbol may appear in any polynomial, and
    arithmetic merges term maps directly.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, Fraction] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    # -- constructors ------------------------------------------------------

    @staticmethod
    def const(value) -> "MultiPoly":
        c = _as_fraction(value)
        return MultiPoly({_ONE_MONO: c} if c else {})

    @staticmethod
    def sym(name: str, exp: int = 1) -> "MultiPoly":
        if exp == 0:
            return MultiPoly.const(1)
        return MultiPoly({((name, exp),): Fraction(1)})

    # -- ring operations ---------------------------------------------------

    def __add__(self, other) -> "MultiPoly":
        other = _as_poly(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            nc = terms.get(m, Fraction(0)) + c
            if nc:
                terms[m] = nc
            else:
                terms.pop(m, None)
        return MultiPoly(terms)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "MultiPoly":
        return _as_poly(other) + (-self)

    def __mul__(self, other) -> "MultiPoly":
        other = _as_poly(other)
        terms: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                nc = terms.get(m, Fraction(0)) + c1 * c2
                if nc:
                    terms[m] = nc
                else:
                    terms.pop(m, None)
        return MultiPoly(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _ONE_MONO in self.terms)

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise ValueError(f"not a constant polynomial: {self}")
        return self.terms.get(_ONE_MONO, Fraction(0))

    def symbols(self) -> set:
        out = set()
        for m in self.terms:
            out.update(sym for sym, _ in m)
        return out

    def degree_in(self, name: str) -> int:
        deg = 0
        for m in self.terms:
            deg = max(deg, dict(m).get(name, 0))
        return deg

    def min_degree_in(self, name: str) -> int:
        if not self.terms:
            return 0
        return min(dict(m).get(name, 0) for m in self.terms)

    def leading_term(self, syms: tuple | None = None) -> tuple:
        """(monomial, coeff) maximal in graded lexicographic order over the
        given symbol tuple (defaults to this polynomial's own symbols)."""
        if not self.terms:
            raise ValueError("leading term of zero polynomial")
        if syms is None:
            syms = tuple(sorted(self.symbols()))
        key = max(self.terms, key=lambda m: _grlex_key(m, syms))
        return key, self.terms[key]

    # -- calculus / substitution -------------------------------------------

    def diff(self, name: str) -> "MultiPoly":
        terms: dict = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(name, 0)
            if not e:
                continue
            if e == 1:
                del d[name]
            else:
                d[name] = e - 1
            nm = tuple(sorted(d.items()))
            nc = terms.get(nm, Fraction(0)) + c * e
            if nc:
                terms[nm] = nc
            else:
                terms.pop(nm, None)
        return MultiPoly(terms)

    def subst(self, name: str, value: "MultiPoly | Fraction | int") -> "MultiPoly":
        """Substitute a polynomial (or constant) for a symbol, exactly."""
        value = _as_poly(value)
        out = MultiPoly()
        pow_cache = {0: MultiPoly.const(1)}

        def vpow(e: int) -> MultiPoly:
            if e not in pow_cache:
                pow_cache[e] = vpow(e - 1) * value
            return pow_cache[e]

        for m, c in self.terms.items():
            d = dict(m)
            e = d.pop(name, 0)
            rest = MultiPoly({tuple(sorted(d.items())): c})
            out = out + rest * vpow(e)
        return out

    def eval(self, assignment: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for sym, e in m:
                if sym not in assignment:
                    raise KeyError(f"unassigned symbol {sym!r}")
                v *= _as_fraction(assignment[sym]) ** e
            total += v
        return total

    def exact_div(self, divisor: "MultiPoly") -> "MultiPoly | None":
        """Return self / divisor if the division is exact, else None."""
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero():
            return MultiPoly()
        if divisor.is_const():
            c = divisor.const_value()
            return MultiPoly({m: v / c for m, v in self.terms.items()})
        # leading-term elimination in graded lex order over the combined
        # symbols; an admissible order makes this terminate with remainder
        # zero exactly when the division is exact
        syms = tuple(sorted(self.symbols() | divisor.symbols()))
        quot: dict = {}
        rem = self
        dm, dc = divisor.leading_term(syms)
        max_steps = 8
        for s in syms:
            max_steps *= self.degree_in(s) + 1
        for _ in range(max_steps):
            if rem.is_zero():
                return MultiPoly(quot)
            rm, rc = rem.leading_term(syms)
            if not _mono_divides(dm, rm):
                return None
            qm = _mono_div(rm, dm)
            qc = rc / dc
            quot[qm] = quot.get(qm, Fraction(0)) + qc
            rem = rem - MultiPoly({qm: qc}) * divisor
        return None

    def integer_content_and_sign(self) -> Fraction:
        """Positive leading-normalized content used for canonical forms."""
        if not self.terms:
            return Fraction(1)
        _, lead = self.leading_term()
        return lead

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=_lex_key, reverse=True):
            c = self.terms[m]
            factors = [sym if e == 1 else f"{sym}^{e}" for sym, e in m]
            if c != 1 or not factors:
                factors.insert(0, str(c))
            parts.append("*".join(factors))
        return " + ".join(parts)


def _lex_key(mono: tuple):
    # display/canonicalization order only (not used for division)
    d = dict(mono)
    syms = sorted(d)
    return (sum(d.values()), tuple((s, d[s]) for s in syms))


def _grlex_key(mono: tuple, syms: tuple):
    d = dict(mono)
    return (sum(d.values()), tuple(d.get(s, 0) for s in syms))


def _as_poly(value) -> MultiPoly:
    if isinstance(value, MultiPoly):
        return value
    if isinstance(value, (int, Fraction)):
        return MultiPoly.const(value)
    raise TypeError(f"cannot coerce {type(value).__name__} to MultiPoly")


class RatFunc:
    """Exact multivariate rational function num/den.

    Normalization divides out integer content, common monomial factors and, when
    it happens to be exact, the full denominator; beyond that no cancellation is
    attempted.  Equality is exact cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num = _as_poly(num)
        den = _as_poly(den)
        if den.is_zero():
            raise ZeroDenominatorError("zero denominator in RatFunc")
        self.num, self.den = _normalize(num, den)

    @staticmethod
    def const(value) -> "RatFunc":
        return RatFunc(MultiPoly.const(value))

    @staticmethod
    def sym(name: str) -> "RatFunc":
        return RatFunc(MultiPoly.sym(name))

    @staticmethod
    def of(value) -> "RatFunc":
        if isinstance(value, RatFunc):
            return value
        if isinstance(value, MultiPoly):
            return RatFunc(value)
        return RatFunc.const(value)

    def __add__(self, other) -> "RatFunc":
        other = RatFunc.of(other)
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den,
                       self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __sub__(self, other) -> "RatFunc":
        return self + (-RatFunc.of(other))

    def __rsub__(self, other) -> "RatFunc":
        return RatFunc.of(other) + (-self)

    def __mul__(self, other) -> "RatFunc":
        other = RatFunc.of(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFunc":
        other = RatFunc.of(other)
        if other.num.is_zero():
            raise ZeroDenominatorError("division by zero RatFunc")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RatFunc":
        return RatFunc.of(other) / self

    def __pow__(self, n: int) -> "RatFunc":
        if n >= 0:
            return RatFunc(self.num ** n, self.den ** n)
        if self.num.is_zero():
            raise ZeroDenominatorError("negative power of zero")
        return RatFunc(self.den ** (-n), self.num ** (-n))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, MultiPoly)):
            other = RatFunc.of(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return ratfunc_eq(self, other)

    def __hash__(self):
        # Canonical normal form makes structural hashing consistent with
        # cross-multiplied equality for the reduced representatives we build.
        return hash((frozenset(self.num.terms.items()),
                     frozenset(self.den.terms.items())))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.is_const()

    def as_poly(self) -> MultiPoly:
        if not self.is_poly():
            raise ValueError(f"not polynomial: {self}")
        return self.num.exact_div(self.den)

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def const_value(self) -> Fraction:
        return self.num.const_value() / self.den.const_value()

    def symbols(self) -> set:
        return self.num.symbols() | self.den.symbols()

    def diff(self, name: str) -> "RatFunc":
        # (n/d)' = (n'd - nd')/d^2
        return RatFunc(self.num.diff(name) * self.den - self.num * self.den.diff(name),
                       self.den * self.den)

    def subst(self, name: str, value) -> "RatFunc":
        if isinstance(value, RatFunc):
            num = MultiPoly()
            # substitute termwise: expand num and den as polynomials in `name`
            return _subst_ratfunc(self, name, value)
        return RatFunc(self.num.subst(name, value), self.den.subst(name, value))

    def eval(self, assignment: Mapping[str, Fraction]) -> Fraction:
        d = self.den.eval(assignment)
        if d == 0:
            raise EvaluationError(f"pole of {self!r}", self)
        return self.num.eval(assignment) / d

    def __repr__(self):
        if self.den.is_const() and self.den.const_value() == 1:
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"


def _normalize(num: MultiPoly, den: MultiPoly) -> tuple:
    if num.is_zero():
        return MultiPoly(), MultiPoly.const(1)
    # cancel common monomial factor
    common: dict = {}
    syms = num.symbols() & den.symbols()
    for s in syms:
        e = min(num.min_degree_in(s), den.min_degree_in(s))
        if e > 0:
            common[s] = e
    if common:
        mono = tuple(sorted(common.items()))
        num = num.exact_div(MultiPoly({mono: Fraction(1)}))
        den = den.exact_div(MultiPoly({mono: Fraction(1)}))
    # opportunistic full cancellation
    if not den.is_const():
        q = num.exact_div(den)
        if q is not None:
            num, den = q, MultiPoly.const(1)
    # canonical scaling: denominator lex-leading coefficient 1
    lead = den.integer_content_and_sign()
    if lead != 1:
        den = MultiPoly({m: c / lead for m, c in den.terms.items()})
        num = MultiPoly({m: c / lead for m, c in num.terms.items()})
    return num, den


def _subst_ratfunc(f: RatFunc, name: str, value: RatFunc) -> RatFunc:
    def subst_poly(p: MultiPoly) -> RatFunc:
        num = RatFunc.const(0)
        for m, c in p.terms.items():
            d = dict(m)
            e = d.pop(name, 0)
            rest = MultiPoly({tuple(sorted(d.items())): c})
            num = num + RatFunc(rest) * value ** e
        return num

    top = subst_poly(f.num)
    bot = subst_poly(f.den)
    if bot.is_zero():
        raise ZeroDenominatorError("substitution produced zero denominator")
    return top / bot


def ratfunc_eq(f: RatFunc, g: RatFunc) -> bool:
    """Exact equality of rational functions by cross-multiplication."""
    return (f.num * g.den - g.num * f.den).is_zero()


# ---------------------------------------------------------------------------
# elementary expressions
# ---------------------------------------------------------------------------

IMAG_SYMBOL = "i"  # declared constant with i*i -> -1 under constant folding


class Expr:
    """Immutable expression tree over +, *, integer and fractional powers,
    exp, sin, cos, cot, constants and symbols."""

    __slots__ = ()

    # builders -------------------------------------------------------------

    def __add__(self, other):
        return eadd(self, as_expr(other))

    __radd__ = __add__

    def __neg__(self):
        return emul(ENum(Fraction(-1)), self)

    def __sub__(self, other):
        return eadd(self, -as_expr(other))

    def __rsub__(self, other):
        return eadd(as_expr(other), -self)

    def __mul__(self, other):
        return emul(self, as_expr(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return emul(self, epow(as_expr(other), -1))

    def __rtruediv__(self, other):
        return emul(as_expr(other), epow(self, -1))

    def __pow__(self, n):
        if isinstance(n, Fraction) and n.denominator != 1:
            return EPowQ(self, n)
        return epow(self, int(n))


class ENum(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", _as_fraction(value))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __repr__(self):
        return str(self.value)


class ESym(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __repr__(self):
        return self.name


class EAdd(Expr):
    __slots__ = ("args",)

    def __init__(self, args):
        object.__setattr__(self, "args", tuple(args))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __repr__(self):
        return "(" + " + ".join(map(repr, self.args)) + ")"


class EMul(Expr):
    __slots__ = ("args",)

    def __init__(self, args):
        object.__setattr__(self, "args", tuple(args))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __repr__(self):
        return "(" + "*".join(map(repr, self.args)) + ")"


class EPow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base, exp: int):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exp", int(exp))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __repr__(self):
        return f"{self.base!r}^{self.exp}"


class EPowQ(Expr):
    """Non-integer power of a (required positive) subexpression."""

    __slots__ = ("base", "exp")

    def __init__(self, base, exp: Fraction):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exp", Fraction(exp))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __repr__(self):
        return f"{self.base!r}^({self.exp})"


class EFun(Expr):
    __slots__ = ("arg",)
    name = "?"

    def __init__(self, arg):
        object.__setattr__(self, "arg", arg)

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    def __repr__(self):
        return f"{self.name}({self.arg!r})"


class EExp(EFun):
    name = "exp"


class ESin(EFun):
    name = "sin"


class ECos(EFun):
    name = "cos"


class ECot(EFun):
    name = "cot"


def as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction)):
        return ENum(v)
    raise TypeError(f"cannot coerce {type(v).__name__} to Expr")


def eadd(*args) -> Expr:
    flat = []
    const = Fraction(0)
    for a in args:
        a = as_expr(a)
        if isinstance(a, EAdd):
            flat.extend(a.args)
        elif isinstance(a, ENum):
            const += a.value
        else:
            flat.append(a)
    # fold nested numeric terms produced by extension
    out = []
    for a in flat:
        if isinstance(a, ENum):
            const += a.value
        else:
            out.append(a)
    if const:
        out.append(ENum(const))
    if not out:
        return ENum(0)
    if len(out) == 1:
        return out[0]
    return EAdd(out)


def emul(*args) -> Expr:
    flat = []
    const = Fraction(1)
    ipow = 0
    for a in args:
        a = as_expr(a)
        if isinstance(a, EMul):
            flat.extend(a.args)
        else:
            flat.append(a)
    factors = []
    for a in flat:
        if isinstance(a, ENum):
            const *= a.value
        elif isinstance(a, ESym) and a.name == IMAG_SYMBOL:
            ipow += 1
        elif isinstance(a, EPow) and isinstance(a.base, ESym) \
                and a.base.name == IMAG_SYMBOL:
            ipow += a.exp
        else:
            factors.append(a)
    if const == 0:
        return ENum(0)
    # i^2 -> -1 rewriting for the declared imaginary constant
    ipow %= 4
    if ipow in (2, 3):
        const = -const
        ipow -= 2
    if ipow:
        factors.append(ESym(IMAG_SYMBOL))
    if const != 1 or not factors:
        factors.insert(0, ENum(const))
    if len(factors) == 1:
        return factors[0]
    return EMul(factors)


def epow(base: Expr, exp: int) -> Expr:
    base = as_expr(base)
    exp = int(exp)
    if exp == 1:
        return base
    if exp == 0:
        return ENum(1)
    if isinstance(base, ENum):
        if base.value == 0 and exp < 0:
            raise ZeroDivisionError("0 to a negative power")
        return ENum(base.value ** exp)
    if isinstance(base, ESym) and base.name == IMAG_SYMBOL:
        return emul(*([base] * exp)) if exp > 0 else emul(*([base] * ((-exp) * 3)))
    if isinstance(base, EPow):
        return epow(base.base, base.exp * exp)
    return EPow(base, exp)


def expr_diff(e: Expr, var: str) -> Expr:
    """Exact symbolic derivative; only constant folding is guaranteed."""
    if isinstance(e, ENum):
        return ENum(0)
    if isinstance(e, ESym):
        return ENum(1 if e.name == var else 0)
    if isinstance(e, EAdd):
        return eadd(*(expr_diff(a, var) for a in e.args))
    if isinstance(e, EMul):
        terms = []
        args = e.args
        for k in range(len(args)):
            d = expr_diff(args[k], var)
            if isinstance(d, ENum) and d.value == 0:
                continue
            terms.append(emul(*(args[:k] + (d,) + args[k + 1:])))
        return eadd(*terms) if terms else ENum(0)
    if isinstance(e, EPow):
        d = expr_diff(e.base, var)
        return emul(ENum(e.exp), epow(e.base, e.exp - 1), d)
    if isinstance(e, EPowQ):
        d = expr_diff(e.base, var)
        return emul(ENum(e.exp), EPowQ(e.base, e.exp - 1), d)
    if isinstance(e, EExp):
        return emul(e, expr_diff(e.arg, var))
    if isinstance(e, ESin):
        return emul(ECos(e.arg), expr_diff(e.arg, var))
    if isinstance(e, ECos):
        return emul(ENum(-1), ESin(e.arg), expr_diff(e.arg, var))
    if isinstance(e, ECot):
        # cot' = -1/sin^2
        return emul(ENum(-1), epow(ESin(e.arg), -2), expr_diff(e.arg, var))
    raise TypeError(f"cannot differentiate {type(e).__name__}")


def eval_numeric(e: Expr, assignment: Mapping[str, object], precision: int):
    """Evaluate to an mpmath number at the requested binary precision.

    Values in `assignment` may be Fractions, ints, mpf or mpc.  The declared
    imaginary constant is bound automatically unless overridden.
    """
    with mpmath.workprec(precision + 16):
        env = {IMAG_SYMBOL: mpmath.mpc(0, 1)}
        for k, v in assignment.items():
            env[k] = _to_mp(v)
        val = _eval(e, env)
    with mpmath.workprec(precision):
        return +val


def _to_mp(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    if isinstance(v, int):
        return mpmath.mpf(v)
    return v


def _eval(e: Expr, env):
    if isinstance(e, ENum):
        return mpmath.mpf(e.value.numerator) / e.value.denominator
    if isinstance(e, ESym):
        if e.name not in env:
            raise EvaluationError(f"unassigned symbol {e.name!r}", e)
        return env[e.name]
    if isinstance(e, EAdd):
        out = mpmath.mpf(0)
        for a in e.args:
            out = out + _eval(a, env)
        return out
    if isinstance(e, EMul):
        out = mpmath.mpf(1)
        for a in e.args:
            out = out * _eval(a, env)
        return out
    if isinstance(e, EPow):
        b = _eval(e.base, env)
        if e.exp < 0 and b == 0:
            raise EvaluationError("pole: zero base with negative power", e)
        return b ** e.exp
    if isinstance(e, EPowQ):
        b = _eval(e.base, env)
        if not isinstance(b, mpmath.mpc) and b <= 0:
            raise EvaluationError("fractional power of non-positive base", e)
        return mpmath.power(b, mpmath.mpf(e.exp.numerator) / e.exp.denominator)
    if isinstance(e, EExp):
        return mpmath.exp(_eval(e.arg, env))
    if isinstance(e, ESin):
        return mpmath.sin(_eval(e.arg, env))
    if isinstance(e, ECos):
        return mpmath.cos(_eval(e.arg, env))
    if isinstance(e, ECot):
        s = mpmath.sin(_eval(e.arg, env))
        if s == 0:
            raise EvaluationError("pole of cot", e)
        return mpmath.cos(_eval(e.arg, env)) / s
    raise TypeError(f"cannot evaluate {type(e).__name__}")


DEFAULT_DOMAIN = (Fraction(1, 10), Fraction(9, 10))
SAMPLE_BITS = 20


def sample_rationals(lo: Fraction, hi: Fraction, count: int,
                     rng: random.Random) -> list:
    """Uniform rationals with <=20-bit numerators over a power-of-two grid."""
    den = 1 << SAMPLE_BITS
    lo_n = int(lo * den) + 1
    hi_n = int(hi * den) - 1
    return [Fraction(rng.randint(lo_n, hi_n), den) for _ in range(count)]


def prob_identity(e1: Expr, e2: Expr, samples: int = 16, precision: int = 192,
                  tol=None, seed: int = 0,
                  domains: Mapping[str, tuple] | None = None,
                  constants: Mapping[str, object] | None = None) -> bool:
    """Seeded numeric identity test: |e1 - e2| < tol at every sampled point.

    Free symbols are sampled from per-symbol rational domains (default
    (1/10, 9/10)); real and imaginary parts are checked separately so that
    identities involving the declared imaginary constant are covered.
    """
    if samples < 8:
        raise ValueError("samples must be >= 8")
    if tol is None:
        tol = mpmath.mpf(2) ** (-(precision // 2))
    rng = random.Random(seed)
    syms = _free_symbols(e1) | _free_symbols(e2)
    syms.discard(IMAG_SYMBOL)
    constants = dict(constants or {})
    free = sorted(s for s in syms if s not in constants)
    domains = domains or {}
    evaluated = 0
    for _ in range(samples):
        assignment = dict(constants)
        for s in free:
            lo, hi = domains.get(s, DEFAULT_DOMAIN)
            assignment[s] = sample_rationals(lo, hi, 1, rng)[0]
        try:
            v1 = eval_numeric(e1, assignment, precision)
            v2 = eval_numeric(e2, assignment, precision)
        except EvaluationError:
            continue
        evaluated += 1
        d = v1 - v2
        re = abs(mpmath.re(d))
        im = abs(mpmath.im(d))
        if re >= tol or im >= tol:
            return False
    if not evaluated:
        raise InconclusiveError("all sampled points hit poles")
    return True


def _free_symbols(e: Expr) -> set:
    if isinstance(e, ENum):
        return set()
    if isinstance(e, ESym):
        return {e.name}
    if isinstance(e, (EAdd, EMul)):
        out = set()
        for a in e.args:
            out |= _free_symbols(a)
        return out
    if isinstance(e, (EPow, EPowQ)):
        return _free_symbols(e.base)
    if isinstance(e, EFun):
        return _free_symbols(e.arg)
    raise TypeError(type(e).__name__)
