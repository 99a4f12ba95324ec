"""Noncommutative operator algebras over exact rational-function coefficients.

Four layers share one coefficient field (symcore.RatFunc):

* DiffOp       one-variable differential operators, normal form
               sum_k c_k(x; params) d^k with coefficients left of powers of d.
* SpectralOp   finite Laurent series in a shifted spectral parameter whose
               coefficients are DiffOps; `at()` realizes it as a DiffOp with
               the spectral symbol adjoined to the coefficient field.
* BiOp         the two-variable (x, t) algebra with generators t^m, d_x, and
               E = t d_t, normal form r(x) t^m d_x^i E^j.
* BandedBasisOp  exact operators given by their action on a graded function
               basis; this is how integro-differential entries are realized.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial
from typing import Callable, Iterable, Mapping

from .symcore import MultiPoly, RatFunc, ZeroDenominatorError

X = "x"


class DiffOpError(Exception):
    pass


class NormalizationError(DiffOpError):
    """A denominator factor was not among the declared clearing factors."""


class BasisDomainError(DiffOpError):
    """A basis-action operator was applied outside its defined index range."""


def _rf(value) -> RatFunc:
    return RatFunc.of(value)


class DiffOp:
    """Exact differential operator sum_k c_k(x) d^k, c_k rational functions.

    Multiplication expands eagerly via the Leibniz rule d o c = c d + c'.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, RatFunc] | None = None):
        self.coeffs = {}
        for k, c in (coeffs or {}).items():
            c = _rf(c)
            if not c.is_zero():
                if k < 0:
                    raise ValueError("negative derivative order")
                self.coeffs[k] = c

    # -- constructors --------------------------------------------------

    @staticmethod
    def zero() -> "DiffOp":
        return DiffOp()

    @staticmethod
    def const(value) -> "DiffOp":
        return DiffOp({0: _rf(value)})

    @staticmethod
    def d(order: int = 1) -> "DiffOp":
        return DiffOp({order: RatFunc.const(1)})

    @staticmethod
    def mul_by(value) -> "DiffOp":
        """Multiplication operator by a rational function of x."""
        return DiffOp({0: _rf(value)})

    @staticmethod
    def x(exp: int = 1) -> "DiffOp":
        return DiffOp({0: RatFunc(MultiPoly.sym(X, exp)) if exp >= 0
                       else RatFunc(1, MultiPoly.sym(X, -exp))})

    # -- ring structure --------------------------------------------------

    def __add__(self, other) -> "DiffOp":
        other = _as_diffop(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            s = out.get(k, RatFunc.const(0)) + c
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return DiffOp(out)

    __radd__ = __add__

    def __neg__(self) -> "DiffOp":
        return DiffOp({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other) -> "DiffOp":
        return self + (-_as_diffop(other))

    def __rsub__(self, other) -> "DiffOp":
        return _as_diffop(other) + (-self)

    def __mul__(self, other) -> "DiffOp":
        other = _as_diffop(other)
        out: dict = {}
        for j, a in self.coeffs.items():
            for k, b in other.coeffs.items():
                # d^j o b = sum_s C(j, s) b^{(s)} d^{j-s}
                deriv = b
                for s in range(j + 1):
                    if not deriv.is_zero():
                        key = j - s + k
                        term = a * deriv * comb(j, s)
                        cur = out.get(key, RatFunc.const(0)) + term
                        if cur.is_zero():
                            out.pop(key, None)
                        else:
                            out[key] = cur
                    if s < j:
                        deriv = deriv.diff(X)
        return DiffOp(out)

    def __rmul__(self, other) -> "DiffOp":
        return _as_diffop(other) * self

    def scale(self, value) -> "DiffOp":
        value = _rf(value)
        return DiffOp({k: c * value for k, c in self.coeffs.items()})

    def __pow__(self, n: int) -> "DiffOp":
        if n < 0:
            raise ValueError("negative operator power")
        out = DiffOp.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        other = _as_diffop(other)
        keys = set(self.coeffs) | set(other.coeffs)
        z = RatFunc.const(0)
        return all(self.coeffs.get(k, z) == other.coeffs.get(k, z) for k in keys)

    def __hash__(self):
        raise TypeError("DiffOp is unhashable")

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def order(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    def coeff(self, k: int) -> RatFunc:
        return self.coeffs.get(k, RatFunc.const(0))

    def is_scalar(self) -> bool:
        """True iff the operator is multiplication by an x-free scalar."""
        if not self.coeffs:
            return True
        if set(self.coeffs) != {0}:
            return False
        return X not in self.coeffs[0].symbols()

    def scalar_value(self) -> RatFunc:
        if not self.is_scalar():
            raise ValueError(f"not a scalar operator: {self}")
        return self.coeff(0)

    # -- actions ----------------------------------------------------------

    def apply(self, f: RatFunc) -> RatFunc:
        """Exact image of a rational function of x."""
        f = _rf(f)
        out = RatFunc.const(0)
        for k, c in self.coeffs.items():
            g = f
            for _ in range(k):
                g = g.diff(X)
            out = out + c * g
        return out

    def subst_coeffs(self, name: str, value) -> "DiffOp":
        return DiffOp({k: c.subst(name, value) for k, c in self.coeffs.items()})

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in sorted(self.coeffs, reverse=True):
            c = self.coeffs[k]
            dd = "" if k == 0 else ("d" if k == 1 else f"d^{k}")
            parts.append(f"({c!r}){dd}" if dd else f"({c!r})")
        return " + ".join(parts)


def _as_diffop(v) -> DiffOp:
    if isinstance(v, DiffOp):
        return v
    if isinstance(v, (int, Fraction, MultiPoly, RatFunc)):
        return DiffOp.const(v)
    raise TypeError(f"cannot coerce {type(v).__name__} to DiffOp")


def op_mul(p: DiffOp, q: DiffOp) -> DiffOp:
    return p * q


def op_commutator(p, q):
    """[p, q] = pq - qp for any of the operator layers."""
    return p * q - q * p


def gauge_conjugate(p: DiffOp, g) -> DiffOp:
    """f^{-1} o p o f for a gauge function with logarithmic derivative g = f'/f.

    Computed exactly by the substitution d -> d + g.
    """
    g = _rf(g)
    shifted = DiffOp({1: RatFunc.const(1), 0: g})
    out = DiffOp.zero()
    for k, c in p.coeffs.items():
        out = out + DiffOp.const(c) * shifted ** k
    return out


# ---------------------------------------------------------------------------
# spectral-parameter operators
# ---------------------------------------------------------------------------

class SpectralOp:
    """Finite Laurent series in w = s - center with DiffOp coefficients.

    `center` is 0 for first-kind entries and 1/2 for second-kind entries, so
    the second kind's pole sits at s = 1/2 as a clean Laurent pole.
    """

    __slots__ = ("coeffs", "center")

    def __init__(self, coeffs: Mapping[int, DiffOp], center=Fraction(0)):
        self.center = Fraction(center)
        self.coeffs = {p: c for p, c in coeffs.items() if not c.is_zero()}

    def powers(self) -> set:
        return set(self.coeffs)

    def at(self, sym: str, shift=Fraction(0), sign: int = 1) -> DiffOp:
        """Realize at spectral value (sign*sym + shift), as a DiffOp whose
        coefficients are rational in `sym`."""
        w = RatFunc(MultiPoly.sym(sym) * sign
                    + MultiPoly.const(Fraction(shift) - self.center))
        out = DiffOp.zero()
        for p, c in self.coeffs.items():
            out = out + c.scale(w ** p)
        return out

    def at_value(self, value: Fraction) -> DiffOp:
        w = RatFunc.const(Fraction(value) - self.center)
        out = DiffOp.zero()
        for p, c in self.coeffs.items():
            if p < 0 and w.is_zero():
                raise ZeroDenominatorError("spectral pole hit")
            out = out + c.scale(w ** p)
        return out

    def __repr__(self):
        return " + ".join(f"w^{p}*({c!r})" for p, c in sorted(self.coeffs.items()))


def spectral_collect(op: DiffOp, sym: str) -> dict:
    """Collect a DiffOp with coefficients rational in `sym` into a Laurent
    polynomial {power: DiffOp}; denominators must be monomials in `sym`.

    Raises NormalizationError if some denominator involves `sym` in a
    non-monomial way (an undeclared pole shape).
    """
    out: dict = {}
    for k, c in op.coeffs.items():
        den = c.den
        dmin, dmax = den.min_degree_in(sym), den.degree_in(sym)
        if dmin != dmax:
            raise NormalizationError(
                f"denominator {den!r} is not a monomial in {sym}")
        shift = dmin
        den_rest = den.exact_div(MultiPoly.sym(sym, shift)) if shift else den
        for m, coeff in c.num.terms.items():
            d = dict(m)
            e = d.pop(sym, 0)
            rest = MultiPoly({tuple(sorted(d.items())): coeff})
            power = e - shift
            cur = out.setdefault(power, DiffOp.zero())
            out[power] = cur + DiffOp({k: RatFunc(rest, den_rest)})
    return {p: c for p, c in out.items() if not c.is_zero()}


def clear_denominators(op: DiffOp, factors: Iterable) -> DiffOp:
    """Multiply by the product of declared factors and verify every
    coefficient becomes polynomial apart from monomial content.

    Raises NormalizationError when a denominator factor was not declared.
    """
    prod = RatFunc.const(1)
    for f in factors:
        prod = prod * RatFunc.of(f)
    cleared = op.scale(prod)
    for k, c in cleared.coeffs.items():
        den = c.den
        # monomial denominators (pure x powers etc.) are acceptable content
        for s in den.symbols():
            if den.min_degree_in(s) != den.degree_in(s):
                raise NormalizationError(
                    f"coefficient of d^{k} keeps undeclared denominator {den!r}")
    return cleared


# ---------------------------------------------------------------------------
# (x, t) algebra for the two-index ladder construction
# ---------------------------------------------------------------------------

class BiOp:
    """Normal-ordered sums r(x) t^m d_x^i E^j with E = t d_t rightmost.

    The only nontrivial exchange is E o t^m = t^m (E + m).
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, RatFunc] | None = None):
        self.terms = {}
        for key, c in (terms or {}).items():
            c = _rf(c)
            if not c.is_zero():
                m, i, j = key
                if i < 0 or j < 0:
                    raise ValueError("negative operator powers")
                self.terms[(m, i, j)] = c

    @staticmethod
    def from_diffop(p: DiffOp, tpow: int = 0) -> "BiOp":
        return BiOp({(tpow, k, 0): c for k, c in p.coeffs.items()})

    @staticmethod
    def t(m: int = 1) -> "BiOp":
        return BiOp({(m, 0, 0): RatFunc.const(1)})

    @staticmethod
    def euler() -> "BiOp":
        """E = t d_t."""
        return BiOp({(0, 0, 1): RatFunc.const(1)})

    @staticmethod
    def const(v) -> "BiOp":
        return BiOp({(0, 0, 0): _rf(v)})

    def __add__(self, other) -> "BiOp":
        other = _as_biop(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            s = out.get(key, RatFunc.const(0)) + c
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
        return BiOp(out)

    __radd__ = __add__

    def __neg__(self) -> "BiOp":
        return BiOp({k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "BiOp":
        return self + (-_as_biop(other))

    def __rsub__(self, other) -> "BiOp":
        return _as_biop(other) + (-self)

    def __mul__(self, other) -> "BiOp":
        other = _as_biop(other)
        out: dict = {}
        for (m1, i1, j1), c1 in self.terms.items():
            for (m2, i2, j2), c2 in other.terms.items():
                # d^{i1} through c2 by Leibniz; E^{j1} through t^{m2}
                deriv = c2
                for s in range(i1 + 1):
                    if not deriv.is_zero():
                        base = c1 * deriv * comb(i1, s)
                        for p in range(j1 + 1):
                            coeff = base * (comb(j1, p) * m2 ** (j1 - p))
                            key = (m1 + m2, i1 - s + i2, p + j2)
                            cur = out.get(key, RatFunc.const(0)) + coeff
                            if cur.is_zero():
                                out.pop(key, None)
                            else:
                                out[key] = cur
                    if s < i1:
                        deriv = deriv.diff(X)
        return BiOp(out)

    def __rmul__(self, other) -> "BiOp":
        return _as_biop(other) * self

    def __eq__(self, other) -> bool:
        other = _as_biop(other)
        keys = set(self.terms) | set(other.terms)
        z = RatFunc.const(0)
        return all(self.terms.get(k, z) == other.terms.get(k, z) for k in keys)

    def __hash__(self):
        raise TypeError("BiOp is unhashable")

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (m, i, j), c in sorted(self.terms.items()):
            s = f"({c!r})"
            if m:
                s += f"t^{m}"
            if i:
                s += f"dx^{i}"
            if j:
                s += f"E^{j}"
            parts.append(s)
        return " + ".join(parts)


def _as_biop(v) -> BiOp:
    if isinstance(v, BiOp):
        return v
    if isinstance(v, DiffOp):
        return BiOp.from_diffop(v)
    if isinstance(v, (int, Fraction, MultiPoly, RatFunc)):
        return BiOp.const(v)
    raise TypeError(f"cannot coerce {type(v).__name__} to BiOp")


# ---------------------------------------------------------------------------
# basis-action operators
# ---------------------------------------------------------------------------

MONO = "mono"          # basis element k  ->  x^k
MONO_EXP = "mono_exp"  # basis element k  ->  x^k e^{-x}

Rule = Callable[[int], Mapping[int, RatFunc]]


class BandedBasisOp:
    """Operator defined by its exact action on a graded basis.

    `rule(k)` returns the image of basis element k as {index: RatFunc}.
    Images are finite and exact; `up` records the largest upward index shift
    the operator can produce (the certification bandwidth), and `min_index`
    the smallest index the rule accepts.
    """

    __slots__ = ("basis", "rule", "up", "min_index", "_cache")

    def __init__(self, basis: str, rule: Rule, up: int, min_index: int | None = 0):
        self.basis = basis
        self.rule = rule
        self.up = up
        self.min_index = min_index
        self._cache: dict = {}

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(basis: str) -> "BandedBasisOp":
        return BandedBasisOp(basis, lambda k: {}, 0, None)

    @staticmethod
    def identity(basis: str) -> "BandedBasisOp":
        return BandedBasisOp(basis, lambda k: {k: RatFunc.const(1)}, 0, None)

    @staticmethod
    def scalar(basis: str, value) -> "BandedBasisOp":
        value = _rf(value)
        return BandedBasisOp(basis, lambda k: {k: value}, 0, None)

    @staticmethod
    def from_diffop(p: DiffOp, basis: str) -> "BandedBasisOp":
        """Realize a DiffOp with Laurent-polynomial x-coefficients on a basis.

        On the weighted basis the action is conjugated through the weight
        e^{-x}, i.e. d is replaced by d - 1 before acting on the x^k part.
        """
        if basis == MONO_EXP:
            p = _shift_d(p, Fraction(-1))
        layers = []  # (xshift, dorder, scalar RatFunc free of x)
        up = 0
        for k, c in p.coeffs.items():
            for xshift, scal in _laurent_in_x(c):
                layers.append((xshift, k, scal))
                up = max(up, xshift - k)
        def rule(idx: int, layers=tuple(layers)):
            out: dict = {}
            for xshift, order, scal in layers:
                ff = 1
                for t in range(order):
                    ff *= (idx - t)
                if ff == 0:
                    continue
                tgt = idx - order + xshift
                cur = out.get(tgt, RatFunc.const(0)) + scal * ff
                if cur.is_zero():
                    out.pop(tgt, None)
                else:
                    out[tgt] = cur
            return out
        return BandedBasisOp(basis, rule, up, None)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other):
        if self.basis != other.basis:
            raise BasisDomainError(
                f"basis mismatch: {self.basis} vs {other.basis}")

    def __add__(self, other) -> "BandedBasisOp":
        other = self._coerce(other)
        self._check(other)
        def rule(k, a=self, b=other):
            out = dict(a.apply(k))
            for i, c in b.apply(k).items():
                s = out.get(i, RatFunc.const(0)) + c
                if s.is_zero():
                    out.pop(i, None)
                else:
                    out[i] = s
            return out
        return BandedBasisOp(self.basis, rule, max(self.up, other.up),
                             _max_min(self.min_index, other.min_index))

    __radd__ = __add__

    def __neg__(self) -> "BandedBasisOp":
        def rule(k, a=self):
            return {i: -c for i, c in a.apply(k).items()}
        return BandedBasisOp(self.basis, rule, self.up, self.min_index)

    def __sub__(self, other) -> "BandedBasisOp":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "BandedBasisOp":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "BandedBasisOp":
        other = self._coerce(other)
        self._check(other)
        def rule(k, first=other, second=self):
            out: dict = {}
            for j, c in first.apply(k).items():
                for i, c2 in second.apply(j).items():
                    s = out.get(i, RatFunc.const(0)) + c * c2
                    if s.is_zero():
                        out.pop(i, None)
                    else:
                        out[i] = s
            return out
        return BandedBasisOp(self.basis, rule, self.up + other.up,
                             other.min_index)

    def __rmul__(self, other) -> "BandedBasisOp":
        return self._coerce(other) * self

    def scale(self, value) -> "BandedBasisOp":
        value = _rf(value)
        def rule(k, a=self):
            return {i: c * value for i, c in a.apply(k).items()}
        return BandedBasisOp(self.basis, rule, self.up, self.min_index)

    def _coerce(self, v) -> "BandedBasisOp":
        if isinstance(v, BandedBasisOp):
            return v
        if isinstance(v, DiffOp):
            return BandedBasisOp.from_diffop(v, self.basis)
        if isinstance(v, (int, Fraction, MultiPoly, RatFunc)):
            return BandedBasisOp.scalar(self.basis, v)
        raise TypeError(f"cannot coerce {type(v).__name__} to BandedBasisOp")

    # -- action -------------------------------------------------------------

    def apply(self, k: int) -> Mapping[int, RatFunc]:
        if self.min_index is not None and k < self.min_index:
            raise BasisDomainError(
                f"basis index {k} below minimum {self.min_index}")
        if k not in self._cache:
            self._cache[k] = dict(self.rule(k))
        return self._cache[k]

    def is_zero_on(self, indices: Iterable[int]) -> bool:
        return all(not self.apply(k) for k in indices)

    def max_abs_on(self, indices: Iterable[int]):
        """Nonzero coefficients encountered, for residual reporting."""
        bad = []
        for k in indices:
            for i, c in self.apply(k).items():
                if not c.is_zero():
                    bad.append((k, i, c))
        return bad


def _max_min(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def _shift_d(p: DiffOp, g) -> DiffOp:
    return gauge_conjugate(p, RatFunc.const(g))


def _laurent_in_x(c: RatFunc):
    """Decompose a coefficient into [(x-exponent, x-free RatFunc)].

    The denominator must be a monomial in x times an x-free polynomial.
    """
    den = c.den
    dmin, dmax = den.min_degree_in(X), den.degree_in(X)
    if dmin != dmax:
        raise NormalizationError(
            f"coefficient denominator {den!r} is not monomial in x")
    den_rest = den.exact_div(MultiPoly.sym(X, dmin)) if dmin else den
    buckets: dict = {}
    for m, coeff in c.num.terms.items():
        d = dict(m)
        e = d.pop(X, 0)
        rest = MultiPoly({tuple(sorted(d.items())): coeff})
        buckets.setdefault(e - dmin, MultiPoly())
        buckets[e - dmin] = buckets[e - dmin] + rest
    return [(e, RatFunc(p, den_rest)) for e, p in buckets.items()
            if not p.is_zero()]


# -- the three realized operator inverses -----------------------------------

def inverse_euler_plus(shift) -> BandedBasisOp:
    """(x d + b)^{-1} acting termwise on monomials: x^k -> x^k/(b+k)."""
    b = _rf(shift)
    def rule(k):
        den = b + k
        if den.is_zero():
            raise BasisDomainError(f"(x d + b)^-1 undefined at index {k}")
        return {k: RatFunc.const(1) / den}
    return BandedBasisOp(MONO, rule, 0, None)


def inverse_d_minus_one() -> BandedBasisOp:
    """(d - 1)^{-1} f = -e^x int_x^inf e^{-y} f(y) dy on monomials.

    x^k maps to -sum_{j<=k} (k!/j!) x^j; defined for k >= 0 only.
    """
    def rule(k):
        if k < 0:
            raise BasisDomainError("(d-1)^-1 needs a nonnegative monomial")
        return {j: RatFunc.const(-Fraction(factorial(k), factorial(j)))
                for j in range(k + 1)}
    return BandedBasisOp(MONO, rule, 0, 0)


def inverse_d_weighted() -> BandedBasisOp:
    """d^{-1} f = -int_x^inf f(y) dy on the weighted basis x^k e^{-x}.

    Same triangular coefficients as (d-1)^{-1} after stripping the weight.
    """
    def rule(k):
        if k < 0:
            raise BasisDomainError("d^-1 needs a nonnegative weighted index")
        return {j: RatFunc.const(-Fraction(factorial(k), factorial(j)))
                for j in range(k + 1)}
    return BandedBasisOp(MONO_EXP, rule, 0, 0)
