"""Rank-1 L-operators for the two quadratic exchange algebras and the exact
checks on them: the 4x4 matrix exchange relations, the published extended
commutator lists, quantum determinants, the three-equality equivalent
conditions, factorization identities, the first-order ladder classification
conditions, the four-dimensional ladder Lie algebra, and the rank-1 Jacobi
identity.

Two verification backends share every check:

* symbolic      entries are honest differential operators; identities are
                decided exactly in the operator algebra with the spectral
                parameters adjoined as symbols.
* basis-action  used when the C-entry is realized through an operator
                inverse; identities are decided exactly on basis elements
                0..N of the type's function basis.

Report records cite the standard relation tags ("1.3", "2.5", ...) used
throughout the accompanying catalog so that runs are auditable.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .symcore import (MultiPoly, RatFunc, ESym, ECot, EExp, ESin, ENum, emul,
                      eadd, epow, prob_identity, IMAG_SYMBOL)
from .diffop import (DiffOp, SpectralOp, BiOp, BandedBasisOp,
                     inverse_euler_plus, inverse_d_minus_one,
                     inverse_d_weighted, op_commutator, MONO, MONO_EXP,
                     BasisDomainError)

KIND_I = "QISM-I"
KIND_II = "QISM-II"

TYPE_A = "A"
TYPE_B = "B"
TYPE_CP = "C'"
TYPE_DP = "D'"
TYPE_CPP = "C''"
TYPE_GEN_A = "genA"
TYPE_GEN_CPP = "genC''"

QISM1_TYPES = (TYPE_A, TYPE_B, TYPE_CP, TYPE_DP, TYPE_CPP)
QISM2_TYPES = (TYPE_GEN_A, TYPE_GEN_CPP)

HALF = Fraction(1, 2)

_X = RatFunc(MultiPoly.sym("x"))
_XINV = RatFunc(1, MultiPoly.sym("x"))


class BuildError(ValueError):
    """Parameters violate a type's exclusion set."""


@dataclass
class CheckRecord:
    """One verification outcome, as it appears in reports."""
    id: str
    eq: str
    backend: str
    passed: bool
    residual: str
    flagged: bool = False
    details: str = ""
    ms: float = 0.0


def _sym_or_const(params: Mapping, name: str) -> RatFunc:
    v = params.get(name)
    if v is None:
        return RatFunc.sym(name)
    return RatFunc.const(Fraction(v))


def _is_nonpositive_int(v) -> bool:
    return isinstance(v, (int, Fraction)) and Fraction(v).denominator == 1 \
        and Fraction(v) <= 0


class LOperator:
    """A 2x2 matrix of spectral-parameter operator entries realizing one of
    the two quadratic exchange algebras, in the beta = 0, gamma = 1
    normalization.

    For the first kind: A(u) = A0 + alpha*u, B = B0, C(u) = C0 + u,
    D(u) = D0 + delta*u.  For the second kind the entries are Laurent in
    w = u - 1/2 with scalar pole coefficient `delta`.
    """

    def __init__(self, kind, tag, params, *, a0, d0, b0, c0, b0c0,
                 alpha=Fraction(0), delta=Fraction(0), a1=None, delta2=None,
                 q1=None, q0=None, q2=None, basis=None, c_factory=None,
                 pseudovacuum=""):
        self.kind = kind
        self.tag = tag
        self.params = dict(params)
        self.a0, self.d0, self.b0, self.c0 = a0, d0, b0, c0
        self.b0c0 = b0c0
        self.alpha = RatFunc.of(alpha)
        self.delta = RatFunc.of(delta)
        self.gamma = RatFunc.const(1)
        self.a1 = a1
        self.delta2 = delta2
        self.q1, self.q0, self.q2 = q1, q0, q2
        self.basis = basis
        self._c_factory = c_factory
        self.pseudovacuum = pseudovacuum
        self._spectral = self._build_spectral()

    # -- spectral entries ---------------------------------------------------

    def _build_spectral(self) -> dict:
        if self.kind == KIND_I:
            ent = {
                "A": SpectralOp({0: self.a0, 1: DiffOp.const(self.alpha)}),
                "B": SpectralOp({0: self.b0}),
                "D": SpectralOp({0: self.d0, 1: DiffOp.const(self.delta)}),
            }
            if self.c0 is not None:
                ent["C"] = SpectralOp({0: self.c0, 1: DiffOp.const(1)})
            return ent
        w0 = DiffOp.const(Fraction(1))
        two_a1 = self.a1 + self.a1
        return {
            "A": SpectralOp({1: self.a1, 0: self.a0,
                             -1: DiffOp.const(self.delta2)}, center=HALF),
            "B": SpectralOp({0: self.b0}, center=HALF),
            "C": SpectralOp({2: w0, 1: w0,
                             0: self.c0 + DiffOp.const(Fraction(1, 4))},
                            center=HALF),
            "D": SpectralOp({1: self.a1, 0: two_a1 - self.a0,
                             -1: DiffOp.const(self.delta2)}, center=HALF),
        }

    @property
    def is_basis(self) -> bool:
        return self.basis is not None

    def entry(self, letter: str, sym: str, shift=Fraction(0), sign: int = 1) -> DiffOp:
        if letter not in self._spectral:
            raise BasisDomainError(
                f"entry {letter} of type {self.tag} is basis-realized only")
        return self._spectral[letter].at(sym, shift, sign)

    def entry_basis(self, letter: str, sym: str, shift=Fraction(0),
                    sign: int = 1) -> BandedBasisOp:
        if self.basis is None:
            raise BasisDomainError(f"type {self.tag} has no basis realization")
        if letter == "C" and self._c_factory is not None:
            return self._c_factory(sym, shift, sign)
        return BandedBasisOp.from_diffop(self.entry(letter, sym, shift, sign),
                                         self.basis)

    def matrix(self, sym: str):
        return [[("A", sym), ("B", sym)], [("C", sym), ("D", sym)]]

    def det_expected(self, sym: str) -> RatFunc:
        u = RatFunc.sym(sym)
        if self.kind == KIND_I:
            return self.alpha * self.delta * u * u + self.q1 * u + self.q0
        return self.q2 * u * u + self.q0 + self.delta2 * self.delta2 / (u * u)

    def perturbed(self, letter: str, eps: str = "eps") -> "LOperator":
        """Copy with one generator's zero-order coefficient bumped by eps*x
        for a fresh symbol eps; used for mutation-sensitivity checks.

        The bump is non-constant on purpose: a constant shift of the C entry
        is a genuine symmetry (it only moves Q0) whenever B0 is scalar."""
        bump = DiffOp.mul_by(RatFunc.sym(eps) * _X)
        kw = dict(a0=self.a0, d0=self.d0, b0=self.b0, c0=self.c0,
                  b0c0=self.b0c0, alpha=self.alpha, delta=self.delta,
                  a1=self.a1, delta2=self.delta2, q1=self.q1, q0=self.q0,
                  q2=self.q2, basis=self.basis, c_factory=self._c_factory,
                  pseudovacuum=self.pseudovacuum)
        key = {"A": "a0", "B": "b0", "C": "c0", "D": "d0", "A1": "a1"}[letter]
        if kw[key] is None:
            raise BasisDomainError(f"cannot perturb basis entry {letter}")
        kw[key] = kw[key] + bump
        if letter in ("B", "C") and self.b0c0 is not None:
            if letter == "B":
                kw["b0c0"] = kw["b0c0"] + bump * self.c0
            else:
                kw["b0c0"] = kw["b0c0"] + self.b0 * bump
        return LOperator(self.kind, self.tag, self.params, **kw)

    def __repr__(self):
        return f"LOperator({self.kind}, {self.tag})"


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def build_l(kind: str, tag: str, params: Mapping | None = None) -> LOperator:
    """Construct the rank-1 L-operator of the given kind and type.

    `params` maps parameter names ('a', 'b', 'c', 'delta') to rationals;
    omitted parameters stay symbolic.  Rational values violating a type's
    exclusions raise BuildError.
    """
    params = dict(params or {})
    if kind == KIND_I:
        builder = _QISM1_BUILDERS.get(tag)
    elif kind == KIND_II:
        builder = _QISM2_BUILDERS.get(tag)
    else:
        raise BuildError(f"unknown kind {kind!r}")
    if builder is None:
        raise BuildError(f"unknown type {tag!r} for {kind}")
    return builder(params)


def _check_not_nonpositive_int(params, names, tag):
    for n in names:
        v = params.get(n)
        if v is not None and _is_nonpositive_int(v):
            raise BuildError(
                f"type {tag}: parameter {n} = {v} is a nonpositive integer")


def _build_type_a(params) -> LOperator:
    _check_not_nonpositive_int(params, ("b", "c"), TYPE_A)
    a = _sym_or_const(params, "a")
    b = _sym_or_const(params, "b")
    c = _sym_or_const(params, "c")
    x = _X
    a0 = DiffOp({1: x * (1 - x), 0: -b * x + c - a})
    d0 = DiffOp({1: x, 0: a})
    b0 = DiffOp({1: -x * x, 0: -b * x})
    # B0 C0 closes to an honest operator: x times the second-order kernel
    kernel0 = DiffOp({2: x * (1 - x), 0: -a * b}) + DiffOp({1: c - (b + a + 1) * x})
    b0c0 = DiffOp.mul_by(x) * kernel0

    def c_factory(sym, shift=Fraction(0), sign=1):
        s = RatFunc(MultiPoly.sym(sym) * sign + MultiPoly.const(Fraction(shift)))
        interior = DiffOp({2: x * (1 - x),
                           1: c - (b + a + s + 1) * x,
                           0: -a * b - b * s})
        inv = inverse_euler_plus(b).scale(-1)
        return inv * BandedBasisOp.from_diffop(interior, MONO)

    q1 = c - 2 * a
    q0 = (a - HALF) * (c - a - HALF)
    return LOperator(KIND_I, TYPE_A, params, a0=a0, d0=d0, b0=b0, c0=None,
                     b0c0=b0c0, alpha=Fraction(-1), delta=Fraction(1),
                     q1=q1, q0=q0, basis=MONO, c_factory=c_factory,
                     pseudovacuum="2F1(a+u, b; c; x)")


def _build_type_b(params) -> LOperator:
    _check_not_nonpositive_int(params, ("c",), TYPE_B)
    a = _sym_or_const(params, "a")
    c = _sym_or_const(params, "c")
    x = _X
    a0 = DiffOp({1: x, 0: -x + c - a})
    d0 = DiffOp({1: x, 0: a})
    b0 = DiffOp({0: -x})
    c0 = -DiffOp({2: x, 1: c - x, 0: -a})
    return LOperator(KIND_I, TYPE_B, params, a0=a0, d0=d0, b0=b0, c0=c0,
                     b0c0=b0 * c0, alpha=Fraction(-1), delta=Fraction(1),
                     q1=c - 2 * a, q0=(a - HALF) * (c - a - HALF),
                     pseudovacuum="1F1(a+u; c; x)")


def _build_type_cp(params) -> LOperator:
    _check_not_nonpositive_int(params, ("c",), TYPE_CP)
    c = _sym_or_const(params, "c")
    x = _X
    a0 = DiffOp({1: x, 0: -x + c - 1})
    d0 = DiffOp.d()
    b0 = DiffOp({1: RatFunc.const(1), 0: RatFunc.const(-1)})
    b0c0 = DiffOp({2: x, 1: c - x})

    def c_factory(sym, shift=Fraction(0), sign=1):
        s = RatFunc(MultiPoly.sym(sym) * sign + MultiPoly.const(Fraction(shift)))
        interior = DiffOp({2: x, 1: c + s - x, 0: -s})
        return inverse_d_minus_one() * BandedBasisOp.from_diffop(interior, MONO)

    return LOperator(KIND_I, TYPE_CP, params, a0=a0, d0=d0, b0=b0, c0=None,
                     b0c0=b0c0, alpha=Fraction(1), delta=Fraction(0),
                     q1=RatFunc.const(1), q0=RatFunc.const(-HALF),
                     basis=MONO, c_factory=c_factory,
                     pseudovacuum="Psi(u, c+u; x)")


def _build_type_dp(params) -> LOperator:
    # The roles of the two diagonal entries are fixed so that the single
    # matrix satisfies the exchange relation with gamma = +1; the raising
    # operator is then d - x and the lowering one is d.
    x = _X
    a0 = DiffOp.d()
    d0 = DiffOp({1: RatFunc.const(1), 0: -x})
    b0 = DiffOp.const(1)
    c0 = DiffOp({2: RatFunc.const(1), 1: -x})
    return LOperator(KIND_I, TYPE_DP, params, a0=a0, d0=d0, b0=b0, c0=c0,
                     b0c0=b0 * c0, alpha=Fraction(0), delta=Fraction(0),
                     q1=RatFunc.const(-1), q0=RatFunc.const(-HALF),
                     pseudovacuum="exp(x^2/4) D_u(x)")


def _build_type_cpp(params) -> LOperator:
    x, xi = _X, _XINV
    a0 = DiffOp({1: x})
    d0 = DiffOp({1: xi})
    b0 = DiffOp({1: 2 * xi})
    b0c0 = DiffOp({2: RatFunc.const(1), 1: xi, 0: RatFunc.const(-1)})

    def c_factory(sym, shift=Fraction(0), sign=1):
        s = RatFunc(MultiPoly.sym(sym) * sign + MultiPoly.const(Fraction(shift)))
        interior = DiffOp({2: x, 1: 2 * s + 1, 0: -x})
        base = (inverse_d_weighted()
                * BandedBasisOp.from_diffop(interior, MONO_EXP)).scale(HALF)

        def rule(k):
            if k == -1:
                # the interior image of the k = -1 element is an exact
                # d-image, so the inverse stays inside the basis
                return {-1: s - HALF}
            return base.apply(k)
        return BandedBasisOp(MONO_EXP, rule, base.up, -1)

    return LOperator(KIND_I, TYPE_CPP, params, a0=a0, d0=d0, b0=b0, c0=None,
                     b0c0=b0c0, alpha=Fraction(2), delta=Fraction(0),
                     q1=RatFunc.const(0), q0=RatFunc.const(1),
                     basis=MONO_EXP, c_factory=c_factory,
                     pseudovacuum="x^-u K_u(x)")


def _build_gen_a(params) -> LOperator:
    _check_not_nonpositive_int(params, ("c",), TYPE_GEN_A)
    a = _sym_or_const(params, "a")
    c = _sym_or_const(params, "c")
    x = _X
    a1 = DiffOp.mul_by(x - HALF)
    a0 = DiffOp({1: x * (1 - x), 0: (HALF - a) * x + c * HALF - HALF})
    b0 = DiffOp.mul_by(-x * (1 - x))
    # the algebra closes only for this value of the pole coefficient
    delta2 = (a - c + HALF) * (a - HALF) * HALF
    c0 = DiffOp({2: x * (1 - x), 1: c - (2 * a + 1) * x, 0: -a * a})
    q2 = RatFunc.const(Fraction(1, 4))
    q0 = -delta2 - (c - 1) * (c - 1) * Fraction(1, 4)
    return LOperator(KIND_II, TYPE_GEN_A, params, a0=a0, d0=None, b0=b0,
                     c0=c0, b0c0=None, a1=a1, delta2=delta2,
                     q2=q2, q0=q0, pseudovacuum="2F1(a+u, a-u; c; x)")


def _build_gen_cpp(params) -> LOperator:
    delta2 = _sym_or_const(params, "delta")
    x, xi = _X, _XINV
    a1 = DiffOp.mul_by(xi)
    a0 = DiffOp({1: RatFunc.const(1), 0: xi * HALF})
    b0 = DiffOp.mul_by(xi * xi)
    # x^2 coefficient +1/4 (not -1): required for C(u) to annihilate the
    # weighted confluent family; see the second-kind annihilation checks
    c0 = DiffOp({2: -x * x, 1: -x,
                 0: x * x * Fraction(1, 4) + 2 * delta2 * x})
    return LOperator(KIND_II, TYPE_GEN_CPP, params, a0=a0, d0=None, b0=b0,
                     c0=c0, b0c0=None, a1=a1, delta2=delta2,
                     q2=RatFunc.const(0), q0=RatFunc.const(-Fraction(1, 4)),
                     pseudovacuum="x^u exp(-x/2) Psi(2*delta+1/2+u, 2u+1; x)")


def build_gen_cpp_printed_variant(params: Mapping | None = None) -> LOperator:
    """The variant of the second-kind C'' operator with x^2 coefficient -1.

    It satisfies the same exchange relation (with Q0 = 1) but annihilates the
    Bessel family at delta = 0 rather than the weighted confluent family.
    Kept for the operator-correspondence checks."""
    params = dict(params or {})
    L = _build_gen_cpp(params)
    x = _X
    delta2 = L.delta2
    c0 = DiffOp({2: -x * x, 1: -x, 0: -x * x + 2 * delta2 * x})
    return LOperator(KIND_II, TYPE_GEN_CPP, params, a0=L.a0, d0=None,
                     b0=L.b0, c0=c0, b0c0=None, a1=L.a1, delta2=delta2,
                     q2=RatFunc.const(0), q0=RatFunc.const(1),
                     pseudovacuum="J_u(x) at delta = 0")


_QISM1_BUILDERS = {
    TYPE_A: _build_type_a,
    TYPE_B: _build_type_b,
    TYPE_CP: _build_type_cp,
    TYPE_DP: _build_type_dp,
    TYPE_CPP: _build_type_cpp,
}

_QISM2_BUILDERS = {
    TYPE_GEN_A: _build_gen_a,
    TYPE_GEN_CPP: _build_gen_cpp,
}


# ---------------------------------------------------------------------------
# matrix machinery
# ---------------------------------------------------------------------------

_FLIP = [[1, 0, 0, 0],
         [0, 0, 1, 0],
         [0, 1, 0, 0],
         [0, 0, 0, 1]]


class _Ring:
    """Backend adapter: symbolic DiffOp ring or basis-action ring."""

    def __init__(self, L: LOperator, degree_n: int = 12, force_basis=False):
        self.L = L
        self.use_basis = L.is_basis or force_basis
        self.n = degree_n
        # total upward bandwidth of entry products; identities certified on
        # indices 0..n are exact per index regardless
        self.bandwidth = 4 if self.use_basis else 0

    def scalar(self, v):
        if self.use_basis:
            return BandedBasisOp.scalar(self.L.basis, v)
        return DiffOp.const(v)

    def zero(self):
        if self.use_basis:
            return BandedBasisOp.zero(self.L.basis)
        return DiffOp.zero()

    def entry(self, letter, sym, shift=Fraction(0), sign=1):
        if self.use_basis:
            return self.L.entry_basis(letter, sym, shift, sign)
        return self.L.entry(letter, sym, shift, sign)

    def is_zero(self, op) -> bool:
        if self.use_basis:
            return op.is_zero_on(range(0, self.n + 1))
        return op.is_zero()

    def residual_desc(self, op) -> str:
        if self.use_basis:
            bad = op.max_abs_on(range(0, self.n + 1))
            if not bad:
                return "0"
            k, i, c = bad[0]
            return f"{len(bad)} nonzero basis images; e.g. index {k}->{i}: {c!r}"
        if op.is_zero():
            return "0"
        k = max(op.coeffs)
        return f"nonzero; d^{k} coefficient {op.coeffs[k]!r}"


def _mat_mul(m1, m2, zero):
    n = len(m1)
    out = [[zero() for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = zero()
            for k in range(n):
                acc = acc + m1[i][k] * m2[k][j]
            out[i][j] = acc
    return out


def _mat_sub(m1, m2):
    return [[m1[i][j] - m2[i][j] for j in range(len(m1))] for i in range(len(m1))]


def _t_matrix(ring: _Ring, sym: str):
    return [[ring.entry("A", sym), ring.entry("B", sym)],
            [ring.entry("C", sym), ring.entry("D", sym)]]


def _kron_first(t, ring: _Ring):
    """T (x) I on the 4-dimensional doubled space."""
    z = ring.zero
    out = [[z() for _ in range(4)] for _ in range(4)]
    for i in range(2):
        for j in range(2):
            for al in range(2):
                out[2 * i + al][2 * j + al] = t[i][j]
    return out


def _kron_second(t, ring: _Ring):
    """I (x) T."""
    z = ring.zero
    out = [[z() for _ in range(4)] for _ in range(4)]
    for i in range(2):
        for al in range(2):
            for be in range(2):
                out[2 * i + al][2 * i + be] = t[al][be]
    return out


def _r_matrix(w: RatFunc, ring: _Ring):
    out = [[ring.zero() for _ in range(4)] for _ in range(4)]
    for i in range(4):
        for j in range(4):
            c = (w if i == j else RatFunc.const(0)) + _FLIP[i][j]
            if not c.is_zero():
                out[i][j] = ring.scalar(c)
    return out


def _uv():
    return RatFunc.sym("u"), RatFunc.sym("v")


def check_rmatrix(L: LOperator, degree_n: int = 12) -> CheckRecord:
    """Entrywise verification of the defining 4x4 exchange relation; for the
    second kind the four unitarity identities are verified as well."""
    t0 = time.perf_counter()
    ring = _Ring(L, degree_n)
    u, v = _uv()
    t1 = _kron_first(_t_matrix(ring, "u"), ring)
    t2 = _kron_second(_t_matrix(ring, "v"), ring)
    if L.kind == KIND_I:
        r = _r_matrix(u - v, ring)
        lhs = _mat_mul(_mat_mul(r, t1, ring.zero), t2, ring.zero)
        rhs = _mat_mul(_mat_mul(t2, t1, ring.zero), r, ring.zero)
        clearing = "(u-v)"
        eq = "1.3"
    else:
        r1 = _r_matrix(u - v, ring)
        r2 = _r_matrix(u + v - 1, ring)
        lhs = _mat_mul(_mat_mul(_mat_mul(r1, t1, ring.zero), r2, ring.zero),
                       t2, ring.zero)
        rhs = _mat_mul(_mat_mul(_mat_mul(t2, r2, ring.zero), t1, ring.zero),
                       r1, ring.zero)
        clearing = "(u-v)(u+v-1)(u-1/2)(v-1/2)"
        eq = "1.4"
    diff = _mat_sub(lhs, rhs)
    bad = []
    for i in range(4):
        for j in range(4):
            if not ring.is_zero(diff[i][j]):
                bad.append((i, j, ring.residual_desc(diff[i][j])))
    passed = not bad
    details = f"cleared by {clearing}"
    if ring.use_basis:
        details += f"; N={degree_n}, bandwidth d={ring.bandwidth}, " \
                   f"certified indices 0..{degree_n}"
    if L.kind == KIND_II and passed:
        un = check_unitarity(L)
        passed = un.passed
        if not un.passed:
            bad.append((-1, -1, un.residual))
        details += "; unitarity verified"
    residual = "0" if passed else f"{len(bad)} nonzero entries; " + bad[0][2]
    return CheckRecord(
        id=f"eq_{eq.replace('.', '_')}_{_slug(L.tag)}", eq=eq,
        backend="basis-action" if ring.use_basis else "symbolic",
        passed=passed, residual=residual, details=details,
        ms=(time.perf_counter() - t0) * 1000)


def check_unitarity(L: LOperator) -> CheckRecord:
    """The four sign-change identities of the second kind."""
    t0 = time.perf_counter()
    if L.kind != KIND_II:
        raise BuildError("unitarity applies to the second kind only")
    u = RatFunc.sym("u")
    scale = RatFunc.const(1) / (2 * u + 1)
    a_u = L.entry("A", "u")
    d_u = L.entry("D", "u")
    s = (a_u + d_u).scale(scale)
    res1 = L.entry("A", "u", sign=-1) + d_u - s
    res2 = L.entry("D", "u", sign=-1) + a_u - s
    res3 = L.entry("B", "u", sign=-1) - L.entry("B", "u")
    res4 = L.entry("C", "u", sign=-1) - L.entry("C", "u")
    bad = [i for i, r in enumerate((res1, res2, res3, res4)) if not r.is_zero()]
    return CheckRecord(
        id=f"eq_2_1_{_slug(L.tag)}", eq="2.1", backend="symbolic",
        passed=not bad,
        residual="0" if not bad else f"identities {bad} fail",
        ms=(time.perf_counter() - t0) * 1000)


def _slug(tag: str) -> str:
    return tag.replace("'", "p")


# ---------------------------------------------------------------------------
# extended commutator lists
# ---------------------------------------------------------------------------

class _RelCtx:
    """Helper for writing the extended relations exactly as printed.

    p(X, Y) is the (u, v)-ordered product X(u) Y(v); pt(X, Y) is the
    swapped pairing X(v) Y(u) (the tilde notation, applied uniformly).
    """

    def __init__(self, ring: _Ring):
        self.ring = ring
        self._cache: dict = {}
        u, v = _uv()
        self.umv = u - v
        self.upv = u + v
        self.upvm1 = u + v - 1
        self.upvp1 = u + v + 1
        self.u2v2 = u * u - v * v

    def e(self, letter, sym):
        key = (letter, sym)
        if key not in self._cache:
            self._cache[key] = self.ring.entry(letter, sym)
        return self._cache[key]

    def p(self, x, y):
        return self.e(x, "u") * self.e(y, "v")

    def pt(self, x, y):
        return self.e(x, "v") * self.e(y, "u")

    def com(self, x, y):
        return self.e(x, "u") * self.e(y, "v") - self.e(y, "v") * self.e(x, "u")


def _rel(tag, fn):
    return (tag, fn)


_QISM1_RELATIONS = [
    _rel("2.4", lambda c: [c.com("A", "A"), c.com("B", "B"),
                           c.com("C", "C"), c.com("D", "D")]),
    _rel("2.5", lambda c: c.com("A", "B")
         + (c.p("A", "B") - c.pt("A", "B")).scale(1 / c.umv)),
    _rel("2.6", lambda c: c.com("B", "A")
         + (c.p("B", "A") - c.pt("B", "A")).scale(1 / c.umv)),
    _rel("2.7", lambda c: c.com("A", "C")
         + (c.p("C", "A") - c.pt("C", "A")).scale(1 / c.umv)),
    _rel("2.8", lambda c: c.com("C", "A")
         + (c.p("A", "C") - c.pt("A", "C")).scale(1 / c.umv)),
    _rel("2.9", lambda c: c.com("B", "D")
         + (c.p("D", "B") - c.pt("D", "B")).scale(1 / c.umv)),
    _rel("2.10", lambda c: c.com("D", "B")
         + (c.p("B", "D") - c.pt("B", "D")).scale(1 / c.umv)),
    _rel("2.11", lambda c: c.com("D", "C")
         + (c.p("D", "C") - c.pt("D", "C")).scale(1 / c.umv)),
    _rel("2.12", lambda c: c.com("C", "D")
         + (c.p("C", "D") - c.pt("C", "D")).scale(1 / c.umv)),
    _rel("2.13", lambda c: c.com("A", "D")
         + (c.p("C", "B") - c.pt("C", "B")).scale(1 / c.umv)),
    _rel("2.14", lambda c: c.com("D", "A")
         + (c.p("B", "C") - c.pt("B", "C")).scale(1 / c.umv)),
    _rel("2.15", lambda c: c.com("B", "C")
         + (c.p("D", "A") - c.pt("D", "A")).scale(1 / c.umv)),
    _rel("2.16", lambda c: c.com("C", "B")
         + (c.p("A", "D") - c.pt("A", "D")).scale(1 / c.umv)),
]

_QISM2_RELATIONS = [
    _rel("2.17", lambda c: [c.com("B", "B"), c.com("C", "C")]),
    _rel("2.18", lambda c: c.com("A", "A")
         + (c.p("B", "C") - c.pt("B", "C")).scale(1 / c.upv)),
    _rel("2.19", lambda c: c.com("D", "D")
         + (c.p("C", "B") - c.pt("C", "B")).scale(1 / c.upv)),
    _rel("2.20", lambda c: c.com("A", "B")
         + (c.p("A", "B") - c.pt("A", "B")).scale(1 / c.umv)
         + (c.p("A", "B") + c.p("B", "D")).scale(1 / c.upvm1)
         + (c.p("A", "B") + c.p("B", "D") - c.pt("A", "B")
            - c.pt("B", "D")).scale(1 / (c.umv * c.upvm1))),
    _rel("2.21", lambda c: c.com("B", "A")
         + (c.p("B", "A") - c.pt("B", "A")).scale(1 / c.umv)
         - (c.pt("A", "B") + c.pt("B", "D")).scale(1 / c.upvm1)),
    _rel("2.22", lambda c: c.com("A", "C")
         + (c.p("C", "A") - c.pt("C", "A")).scale(1 / c.umv)
         - (c.pt("C", "A") + c.pt("D", "C")).scale(1 / c.upvm1)
         + (c.p("C", "A") + c.p("D", "C") - c.pt("C", "A")
            - c.pt("D", "C")).scale(1 / (c.umv * c.upvm1))),
    _rel("2.23", lambda c: c.com("C", "A")
         + (c.p("A", "C") - c.pt("A", "C")).scale(1 / c.umv)
         + (c.p("C", "A") + c.p("D", "C")).scale(1 / c.upvm1)),
    _rel("2.24", lambda c: c.com("D", "B")
         + (c.p("B", "D") - c.pt("B", "D")).scale(1 / c.umv)
         - (c.pt("A", "B") + c.pt("B", "D")).scale(1 / c.upvm1)
         + (c.p("A", "B") + c.p("B", "D") - c.pt("A", "B")
            - c.pt("B", "D")).scale(1 / (c.umv * c.upvm1))),
    _rel("2.25", lambda c: c.com("B", "D")
         + (c.p("D", "B") - c.pt("D", "B")).scale(1 / c.umv)
         + (c.p("A", "B") + c.p("B", "D")).scale(1 / c.upvm1)),
    _rel("2.26", lambda c: c.com("D", "C")
         + (c.p("D", "C") - c.pt("D", "C")).scale(1 / c.umv)
         + (c.p("C", "A") + c.p("D", "C")).scale(1 / c.upvm1)
         + (c.p("C", "A") + c.p("D", "C") - c.pt("C", "A")
            - c.pt("D", "C")).scale(1 / (c.umv * c.upvm1))),
    _rel("2.27", lambda c: c.com("C", "D")
         + (c.p("C", "D") - c.pt("C", "D")).scale(1 / c.umv)
         - (c.pt("C", "A") + c.pt("D", "C")).scale(1 / c.upvm1)),
    _rel("2.28", lambda c: c.com("A", "D")
         + (c.p("C", "B") - c.pt("C", "B")).scale(c.upvp1 / c.u2v2)),
    _rel("2.29", lambda c: c.com("D", "A")
         + (c.p("B", "C") - c.pt("B", "C")).scale(c.upvp1 / c.u2v2)),
    _rel("2.30", lambda c: c.com("B", "C")
         + (c.p("D", "A") - c.pt("D", "A")).scale(c.upvm1 / c.u2v2)
         + (c.p("A", "A") - c.pt("D", "D")).scale(1 / c.upv)),
    _rel("2.31", lambda c: c.com("C", "B")
         + (c.p("A", "D") - c.pt("A", "D")).scale(c.upvm1 / c.u2v2)
         + (c.p("D", "D") - c.pt("A", "A")).scale(1 / c.upv)),
]


def crosscheck_commutators(L: LOperator, degree_n: int = 12,
                           rmatrix_passed: bool | None = None) -> list:
    """Verify each relation of the published extended list independently.

    A relation that fails while the defining matrix relation passes is
    flagged as a suspected transcription discrepancy, never silently fixed.
    """
    ring = _Ring(L, degree_n)
    ctx = _RelCtx(ring)
    if rmatrix_passed is None:
        rmatrix_passed = check_rmatrix(L, degree_n).passed
    table = _QISM1_RELATIONS if L.kind == KIND_I else _QISM2_RELATIONS
    out = []
    for tag, fn in table:
        t0 = time.perf_counter()
        residuals = fn(ctx)
        if not isinstance(residuals, list):
            residuals = [residuals]
        bad = [r for r in residuals if not ring.is_zero(r)]
        ok = not bad
        out.append(CheckRecord(
            id=f"ext_{tag.replace('.', '_')}_{_slug(L.tag)}", eq=tag,
            backend="basis-action" if ring.use_basis else "symbolic",
            passed=ok,
            residual="0" if ok else ring.residual_desc(bad[0]),
            flagged=(not ok) and rmatrix_passed,
            details="" if ok else
            "suspected transcription discrepancy in the extended list"
            if rmatrix_passed else "",
            ms=(time.perf_counter() - t0) * 1000))
    return out


# ---------------------------------------------------------------------------
# quantum determinant
# ---------------------------------------------------------------------------

def _det_formula_terms(kind: str):
    """The four defining expressions, as (sign, [(letter, sign, shift)...])."""
    h = HALF
    if kind == KIND_I:
        return [
            (1, [("A", 1, -h), ("D", 1, h)], [("C", 1, -h), ("B", 1, h)]),
            (1, [("D", 1, -h), ("A", 1, h)], [("B", 1, -h), ("C", 1, h)]),
            (1, [("D", 1, h), ("A", 1, -h)], [("C", 1, h), ("B", 1, -h)]),
            (1, [("A", 1, h), ("D", 1, -h)], [("B", 1, h), ("C", 1, -h)]),
        ]
    return [
        (-1, [("D", -1, h), ("D", 1, h)], [("C", 1, -h), ("B", 1, h)]),
        (-1, [("A", -1, h), ("A", 1, h)], [("B", 1, -h), ("C", 1, h)]),
        (-1, [("D", 1, h), ("D", -1, h)], [("C", 1, h), ("B", 1, -h)]),
        (-1, [("A", 1, h), ("A", -1, h)], [("B", 1, h), ("C", 1, -h)]),
    ]


def quantum_det(L: LOperator, degree_n: int = 12):
    """Compute the quantum determinant by all four defining formulas, check
    they agree and are scalar, and match the quadratic coefficient formulas.

    Returns (CheckRecord, determinant as a RatFunc in 'u').
    """
    t0 = time.perf_counter()
    ring = _Ring(L, degree_n)
    failures = []
    det_value = None
    for idx, (sign, first, second) in enumerate(_det_formula_terms(L.kind), 1):
        ops = [ring.entry(let, "u", shift, sgn) for let, sgn, shift in first]
        prod1 = ops[0] * ops[1]
        ops2 = [ring.entry(let, "u", shift, sgn) for let, sgn, shift in second]
        prod2 = ops2[0] * ops2[1]
        total = prod1.scale(RatFunc.const(sign)) - prod2
        value = _extract_scalar(total, ring)
        if value is None:
            failures.append(f"formula {idx} is not scalar")
            continue
        if det_value is None:
            det_value = value
        elif not value == det_value:
            failures.append(f"formula {idx} disagrees: {value!r} vs {det_value!r}")
    expected = L.det_expected("u")
    if det_value is not None and not det_value == expected:
        failures.append(f"determinant {det_value!r} != expected {expected!r}")
    failures.extend(_check_q_formulas(L))
    passed = not failures
    rec = CheckRecord(
        id=f"eq_2_2_consistency_{_slug(L.tag)}" if L.kind == KIND_I
        else f"eq_2_3_consistency_{_slug(L.tag)}",
        eq="2.2" if L.kind == KIND_I else "2.3",
        backend="basis-action" if ring.use_basis else "symbolic",
        passed=passed, residual="0" if passed else "; ".join(failures),
        details=f"det = {det_value!r}" if det_value is not None else "",
        ms=(time.perf_counter() - t0) * 1000)
    return rec, det_value


def _extract_scalar(op, ring: _Ring):
    """Scalar value of an operator that should be a multiple of the identity;
    None if it is not scalar (x-free, derivative-free / diagonal-constant)."""
    if not ring.use_basis:
        if not op.is_scalar():
            return None
        return op.scalar_value()
    value = None
    for k in range(0, ring.n + 1):
        img = dict(op.apply(k))
        coeff = img.pop(k, RatFunc.const(0))
        if any(not c.is_zero() for c in img.values()):
            return None
        if value is None:
            value = coeff
        elif not coeff == value:
            return None
    return value


def _check_q_formulas(L: LOperator) -> list:
    """The closed coefficient formulas for the determinant, checked as
    operator identities (they only involve honest entries)."""
    failures = []
    if L.kind == KIND_I:
        q1_op = (L.d0.scale(L.alpha) - L.b0 * 1) + L.a0.scale(L.delta)
        if not q1_op.is_scalar():
            failures.append("u-coefficient formula is not scalar")
        elif not q1_op.scalar_value() == L.q1:
            failures.append(
                f"u-coefficient {q1_op.scalar_value()!r} != {L.q1!r}")
        q0_op = (L.a0 * L.d0) - L.b0c0 \
            + (L.d0.scale(L.alpha) + L.b0 - L.a0.scale(L.delta)).scale(HALF) \
            - DiffOp.const(L.alpha * L.delta * Fraction(1, 4))
        if not q0_op.is_scalar():
            failures.append("constant-coefficient formula is not scalar")
        elif not q0_op.scalar_value() == L.q0:
            failures.append(
                f"constant coefficient {q0_op.scalar_value()!r} != {L.q0!r}")
    else:
        q2_op = L.a1 * L.a1 - L.b0
        if not q2_op.is_scalar() or not q2_op.scalar_value() == L.q2:
            failures.append("u^2-coefficient formula fails")
        q0_op = -(L.a0 * L.a0) - (L.b0 * L.c0) + L.a1.scale(2 * L.delta2) \
            - L.b0.scale(Fraction(1, 4))
        if not q0_op.is_scalar() or not q0_op.scalar_value() == L.q0:
            failures.append("constant-coefficient formula fails")
    return failures


# ---------------------------------------------------------------------------
# the three-equality equivalent conditions
# ---------------------------------------------------------------------------

def check_lemma_c(L: LOperator) -> CheckRecord:
    """Verify the three equalities equivalent to the exchange relation, and
    derive (Q1, Q0) resp. (B0, C0, Q2, Q0) from them."""
    t0 = time.perf_counter()
    failures = []
    if L.kind == KIND_I:
        lhs = op_commutator(L.d0, L.a0)
        t_op = L.d0.scale(L.alpha) + L.a0.scale(L.delta) - lhs
        if not t_op.is_scalar():
            failures.append("first equality does not isolate a scalar")
        else:
            q1 = t_op.scalar_value()
            if not q1 == L.q1:
                failures.append(f"derived Q1 {q1!r} != {L.q1!r}")
            rhs13 = L.d0.scale(L.alpha) + L.a0.scale(L.delta) - DiffOp.const(q1)
            if not (L.b0.scale(L.gamma)) == rhs13:
                failures.append("second equality fails")
            s_op = (L.a0 + DiffOp.const(L.alpha)) * L.d0 - L.b0c0
            if not s_op.is_scalar():
                failures.append("third equality does not isolate a scalar")
            else:
                q0 = s_op.scalar_value() - L.alpha * L.delta * Fraction(1, 4) \
                    - q1 * HALF
                if not q0 == L.q0:
                    failures.append(f"derived Q0 {q0!r} != {L.q0!r}")
    else:
        comm = op_commutator(L.a1, L.a0)
        t_op = L.a1 * L.a1 - comm
        if not t_op.is_scalar():
            failures.append("first equality does not isolate a scalar")
        else:
            q2 = t_op.scalar_value()
            if not q2 == L.q2:
                failures.append(f"derived Q2 {q2!r} != {L.q2!r}")
            b0 = L.a1 * L.a1 - DiffOp.const(q2)
            if not b0 == L.b0:
                failures.append("derived B0 differs from the built entry")
            s_op = L.a1.scale(2 * L.delta2) - L.a0 * L.a0 \
                - b0.scale(Fraction(1, 4)) - b0 * L.c0
            if not s_op.is_scalar():
                failures.append("third equality does not isolate a scalar")
            else:
                q0 = s_op.scalar_value()
                if not q0 == L.q0:
                    failures.append(f"derived Q0 {q0!r} != {L.q0!r}")
                # C0 recovered by dividing out the (multiplication) B0
                b0_fn = L.b0.coeff(0)
                c0_derived = (L.a1.scale(2 * L.delta2) - L.a0 * L.a0
                              - L.b0.scale(Fraction(1, 4))
                              - DiffOp.const(q0)).scale(1 / b0_fn)
                if not c0_derived == L.c0:
                    failures.append("derived C0 differs from the built entry")
    passed = not failures
    eq = "5.12-5.14" if L.kind == KIND_I else "6.12-6.14"
    return CheckRecord(
        id=f"lemma_c_{_slug(L.tag)}", eq=eq, backend="symbolic",
        passed=passed, residual="0" if passed else "; ".join(failures),
        ms=(time.perf_counter() - t0) * 1000)


def lemma_c_scaled_qism1(L: LOperator) -> bool:
    """Covariance of the three equalities under the (lambda, mu, nu)
    rescaling, with fresh symbols."""
    lam, mu, nu = (RatFunc.sym(s) for s in ("lam", "mu", "nu"))
    a0 = L.a0.scale(lam * mu)
    b0 = L.b0.scale(lam * mu / nu)
    c0m = L.b0c0.scale(lam * lam * mu)  # scaled B0 C0 composite
    d0 = L.d0.scale(lam)
    alpha = lam * mu * L.alpha
    gamma = lam * nu * L.gamma
    delta = lam * L.delta
    q1 = lam * lam * mu * L.q1
    q0 = lam * lam * mu * L.q0
    ok = op_commutator(d0, a0) == d0.scale(alpha) + a0.scale(delta) - DiffOp.const(q1)
    ok = ok and b0.scale(gamma) == d0.scale(alpha) + a0.scale(delta) - DiffOp.const(q1)
    ok = ok and (a0 + DiffOp.const(alpha)) * d0 - c0m == \
        DiffOp.const(alpha * delta * Fraction(1, 4) + q1 * HALF + q0)
    return ok


def lemma_c_swapped_qism1(L: LOperator) -> bool:
    """Covariance under the diagonal swap {D0, B0, C0, A0} with the constants
    (-delta, -gamma, -alpha, Q0, -Q1); verified directly on the operators."""
    a0, d0 = L.d0, L.a0
    alpha, delta = -L.delta, -L.alpha
    gamma = -L.gamma
    q1 = -L.q1
    q0 = L.q0
    b0c0 = L.b0c0  # the product B0 C0 is unchanged by the swap
    rhs12 = d0.scale(alpha) + a0.scale(delta) - DiffOp.const(q1)
    ok = op_commutator(d0, a0) == rhs12
    ok = ok and L.b0.scale(gamma) == rhs12
    ok = ok and (a0 + DiffOp.const(alpha)) * d0 - b0c0 == \
        DiffOp.const(alpha * delta * Fraction(1, 4) + q1 * HALF + q0)
    return ok


def lemma_c_scaled_qism2(L: LOperator) -> bool:
    """Covariance under the one-parameter second-kind rescaling."""
    lam = RatFunc.sym("lam")
    a0 = L.a0.scale(lam)
    a1 = L.a1.scale(lam)
    b0 = L.b0.scale(lam * lam)
    c0 = L.c0
    delta2 = lam * L.delta2
    q0 = lam * lam * L.q0
    q2 = lam * lam * L.q2
    ok = op_commutator(a1, a0) == a1 * a1 - DiffOp.const(q2)
    ok = ok and b0 == a1 * a1 - DiffOp.const(q2)
    ok = ok and b0 * c0 == a1.scale(2 * delta2) - a0 * a0 \
        - b0.scale(Fraction(1, 4)) - DiffOp.const(q0)
    return ok


# ---------------------------------------------------------------------------
# factorization identities
# ---------------------------------------------------------------------------

def check_factorization(L: LOperator, degree_n: int = 12) -> CheckRecord:
    """The two second-order factorizations through the determinant."""
    t0 = time.perf_counter()
    ring = _Ring(L, degree_n)
    det = L.det_expected("u")
    u_minus = det.subst("u", MultiPoly.sym("u") - MultiPoly.const(HALF))
    u_plus = det.subst("u", MultiPoly.sym("u") + MultiPoly.const(HALF))
    if L.kind == KIND_I:
        r1 = ring.entry("D", "u", Fraction(-1)) * ring.entry("A", "u") \
            - ring.entry("B", "u", Fraction(-1)) * ring.entry("C", "u") \
            - ring.scalar(u_minus)
        r2 = ring.entry("A", "u", Fraction(1)) * ring.entry("D", "u") \
            - ring.entry("B", "u", Fraction(1)) * ring.entry("C", "u") \
            - ring.scalar(u_plus)
        eq = "4.1-4.2"
    else:
        r1 = ring.entry("A", "u", Fraction(1), -1) * ring.entry("A", "u")
        r1 = r1.scale(RatFunc.const(-1)) \
            - ring.entry("B", "u", Fraction(-1)) * ring.entry("C", "u") \
            - ring.scalar(u_minus)
        r2 = ring.entry("A", "u", Fraction(1)) * ring.entry("A", "u", Fraction(0), -1)
        r2 = r2.scale(RatFunc.const(-1)) \
            - ring.entry("B", "u", Fraction(1)) * ring.entry("C", "u") \
            - ring.scalar(u_plus)
        eq = "4.3-4.4"
    bad = [i for i, r in enumerate((r1, r2), 1) if not ring.is_zero(r)]
    return CheckRecord(
        id=f"fact_{eq.replace('.', '_').replace('-', '_')}_{_slug(L.tag)}",
        eq=eq, backend="basis-action" if ring.use_basis else "symbolic",
        passed=not bad,
        residual="0" if not bad else f"identities {bad} fail",
        ms=(time.perf_counter() - t0) * 1000)


# ---------------------------------------------------------------------------
# first-order ladder classification (Miller types)
# ---------------------------------------------------------------------------

def _rf_x() -> RatFunc:
    return RatFunc(MultiPoly.sym("x"))


def check_miller_ode(type_tag: str, samples: int = 16, precision: int = 192,
                     seed: int = 12345) -> CheckRecord:
    """The two first-order conditions on (k, j) for the six solution types.

    Rational types are verified exactly; the trigonometric and exponential
    types by seeded sampling (the exponential one with the declared
    imaginary constant, real and imaginary parts separately)."""
    t0 = time.perf_counter()
    x = _rf_x()
    failures = []
    if type_tag == TYPE_A:
        xs, as_, bs, qs = ESym("x"), ESym("a"), ESym("b"), ESym("q")
        k = emul(as_, ECot(emul(as_, xs)))
        j = eadd(emul(bs, epow(emul(ENum(2), as_), -1), ECot(emul(as_, xs))),
                 emul(qs, epow(ESin(emul(as_, xs)), -1)))
        ok1 = prob_identity(_dx(k) + k * k, emul(ENum(-1), as_, as_),
                            samples=samples, precision=precision, seed=seed)
        ok2 = prob_identity(_dx(j) + k * j,
                            emul(ENum(Fraction(-1, 2)), bs),
                            samples=samples, precision=precision, seed=seed + 1)
        if not ok1:
            failures.append("curvature condition fails")
        if not ok2:
            failures.append("inhomogeneous condition fails")
        backend = "sampled"
    elif type_tag == TYPE_B:
        xs, as_, bs, qs = ESym("x"), ESym("a"), ESym("b"), ESym("q")
        ii = ESym(IMAG_SYMBOL)
        k = emul(ii, as_)
        j = eadd(emul(ii, bs, epow(emul(ENum(2), as_), -1)),
                 emul(qs, EExp(emul(ENum(-1), ii, as_, xs))))
        ok1 = prob_identity(_dx(k) + k * k, emul(ENum(-1), as_, as_),
                            samples=samples, precision=precision, seed=seed)
        ok2 = prob_identity(_dx(j) + k * j,
                            emul(ENum(Fraction(-1, 2)), bs),
                            samples=samples, precision=precision, seed=seed + 1)
        if not ok1:
            failures.append("curvature condition fails")
        if not ok2:
            failures.append("inhomogeneous condition fails")
        backend = "sampled"
    else:
        b = RatFunc.sym("b")
        q = RatFunc.sym("q")
        table = {
            TYPE_CP: (1 / x, -b * x * Fraction(1, 4) + q / x, RatFunc.const(0), b),
            TYPE_DP: (RatFunc.const(0), -b * x * HALF, RatFunc.const(0), b),
            TYPE_CPP: (1 / x, q / x, RatFunc.const(0), RatFunc.const(0)),
            "D''": (RatFunc.const(0), q, RatFunc.const(0), RatFunc.const(0)),
        }
        if type_tag not in table:
            raise BuildError(f"no ladder classification data for {type_tag!r}")
        k, j, q2, q1 = table[type_tag]
        if not k.diff("x") + k * k == q2:
            failures.append("curvature condition fails")
        if not j.diff("x") + k * j == -q1 * HALF:
            failures.append("inhomogeneous condition fails")
        backend = "symbolic"
    passed = not failures
    return CheckRecord(
        id=f"miller_ode_{_slug(type_tag)}", eq="4.14-4.15", backend=backend,
        passed=passed, residual="0" if passed else "; ".join(failures),
        ms=(time.perf_counter() - t0) * 1000)


def _dx(e):
    from .symcore import expr_diff
    return expr_diff(e, "x")


_FIRST_ORDER_DATA = {
    # tag: (A01, A00, D01, D00, alpha, delta, Q1) as rational functions
    TYPE_A: lambda: (_rf_x() * (1 - _rf_x()),
                     -RatFunc.sym("b") * _rf_x() + RatFunc.sym("c") - RatFunc.sym("a"),
                     _rf_x(), RatFunc.sym("a"),
                     RatFunc.const(-1), RatFunc.const(1),
                     RatFunc.sym("c") - 2 * RatFunc.sym("a")),
    TYPE_B: lambda: (_rf_x(),
                     -_rf_x() + RatFunc.sym("c") - RatFunc.sym("a"),
                     _rf_x(), RatFunc.sym("a"),
                     RatFunc.const(-1), RatFunc.const(1),
                     RatFunc.sym("c") - 2 * RatFunc.sym("a")),
    TYPE_CP: lambda: (_rf_x(), -_rf_x() + RatFunc.sym("c") - 1,
                      RatFunc.const(1), RatFunc.const(0),
                      RatFunc.const(1), RatFunc.const(0), RatFunc.const(1)),
    TYPE_DP: lambda: (RatFunc.const(1), RatFunc.const(0),
                      RatFunc.const(1), -_rf_x(),
                      RatFunc.const(0), RatFunc.const(0), RatFunc.const(-1)),
    TYPE_CPP: lambda: (_rf_x(), RatFunc.const(0),
                       1 / _rf_x(), RatFunc.const(0),
                       RatFunc.const(2), RatFunc.const(0), RatFunc.const(0)),
}


def check_miller_conditions(type_tag: str) -> CheckRecord:
    """The exact coefficient conditions equivalent to the first-order
    commutator relation, for the five listed operator types."""
    t0 = time.perf_counter()
    a01, a00, d01, d00, alpha, delta, q1 = _FIRST_ORDER_DATA[type_tag]()
    failures = []
    if not d01 * a01.diff("x") - a01 * d01.diff("x") == delta * a01 + alpha * d01:
        failures.append("leading-coefficient condition fails")
    if not d01 * a00.diff("x") - a01 * d00.diff("x") == \
            delta * a00 + alpha * d00 - q1:
        failures.append("zero-order condition fails")
    # the commutator itself
    a0 = DiffOp({1: a01, 0: a00})
    d0 = DiffOp({1: d01, 0: d00})
    if not op_commutator(d0, a0) == d0.scale(alpha) + a0.scale(delta) \
            - DiffOp.const(q1):
        failures.append("first-order commutator relation fails")
    passed = not failures
    return CheckRecord(
        id=f"miller_cond_4_26_4_27_{_slug(type_tag)}", eq="4.26-4.27",
        backend="symbolic", passed=passed,
        residual="0" if passed else "; ".join(failures),
        ms=(time.perf_counter() - t0) * 1000)


_SYMMETRIC_FIRST_ORDER = {
    # tag: (A01, A00, A1, Q2)
    "A-sym": lambda: (_rf_x() * (1 - _rf_x()),
                      -RatFunc.sym("a") * (_rf_x() - HALF),
                      _rf_x() - HALF, RatFunc.const(Fraction(1, 4))),
    "C'''": lambda: (RatFunc.const(1), RatFunc.const(0),
                     1 / _rf_x(), RatFunc.const(0)),
}


def check_miller_symmetric(tag: str) -> CheckRecord:
    """The exact condition for the symmetric (second-kind precursor) form."""
    t0 = time.perf_counter()
    a01, a00, a1, q2 = _SYMMETRIC_FIRST_ORDER[tag]()
    failures = []
    if not a01 * a1.diff("x") + a1 * a1 == q2:
        failures.append("coefficient condition fails")
    a0 = DiffOp({1: a01, 0: a00})
    a1op = DiffOp.mul_by(a1)
    if not op_commutator(a0, a1op) + a1op * a1op == DiffOp.const(q2):
        failures.append("operator condition fails")
    passed = not failures
    return CheckRecord(
        id=f"miller_sym_4_36_{_slug(tag)}", eq="4.35-4.36",
        backend="symbolic", passed=passed,
        residual="0" if passed else "; ".join(failures),
        ms=(time.perf_counter() - t0) * 1000)


# ---------------------------------------------------------------------------
# the four-dimensional ladder Lie algebra in the (x, t) variables
# ---------------------------------------------------------------------------

def check_g_ab(type_tag: str) -> CheckRecord:
    """Build the two-index ladder generators and verify their commutators
    close on the Euler operator with the type's constants."""
    t0 = time.perf_counter()
    L = build_l(KIND_I, type_tag)
    e_op = BiOp.euler()
    j_plus = BiOp.t(1) * (BiOp.from_diffop(L.d0)
                          + e_op * BiOp.const(L.delta))
    j_minus = BiOp.t(-1) * (BiOp.from_diffop(L.a0)
                            + e_op * BiOp.const(L.alpha))
    q2 = L.alpha * L.delta
    failures = []
    comm = j_minus * j_plus - j_plus * j_minus
    if not comm == e_op * BiOp.const(2 * q2) + BiOp.const(L.q1):
        failures.append("ladder commutator fails")
    if not (e_op * j_plus - j_plus * e_op) == j_plus:
        failures.append("raising grading fails")
    if not (e_op * j_minus - j_minus * e_op) == (-j_minus):
        failures.append("lowering grading fails")
    passed = not failures
    return CheckRecord(
        id=f"gab_4_10_4_11_{_slug(type_tag)}", eq="4.10-4.11",
        backend="symbolic", passed=passed,
        residual="0" if passed else "; ".join(failures),
        ms=(time.perf_counter() - t0) * 1000)


# ---------------------------------------------------------------------------
# rank-1 Jacobi identity for general dimension
# ---------------------------------------------------------------------------

def _bracket(e1: dict, e2: dict, mu) -> dict:
    """[L_ir, L_js] = -mu_jr L_is + mu_is L_jr, extended bilinearly."""
    out: dict = {}
    for (i, r), c1 in e1.items():
        for (j, s), c2 in e2.items():
            c = c1 * c2
            for key, coeff in (((i, s), -mu[j][r] * c), ((j, r), mu[i][s] * c)):
                if coeff:
                    cur = out.get(key, Fraction(0)) + coeff
                    if cur:
                        out[key] = cur
                    else:
                        out.pop(key, None)
    return out


def _add_into(acc: dict, other: dict):
    for k, c in other.items():
        cur = acc.get(k, Fraction(0)) + c
        if cur:
            acc[k] = cur
        else:
            acc.pop(k, None)


def check_jacobi_rank1(n: int, mu, trials: int | None = None,
                       seed: int = 0) -> bool:
    """Exhaustively (or by sampling) verify the Jacobi identity for the
    antisymmetrized rank-1 bracket on n x n generators, in exact rationals."""
    if not 2 <= n <= 5:
        raise ValueError("dimension must be between 2 and 5")
    mu = [[Fraction(v) for v in row] for row in mu]
    basis = [(i, r) for i in range(n) for r in range(n)]
    triples = [(p, q, s) for p in basis for q in basis for s in basis]
    if trials is not None and trials < len(triples):
        rng = random.Random(seed)
        triples = rng.sample(triples, trials)
    for p, q, s in triples:
        e1, e2, e3 = {p: Fraction(1)}, {q: Fraction(1)}, {s: Fraction(1)}
        acc: dict = {}
        _add_into(acc, _bracket(_bracket(e1, e2, mu), e3, mu))
        _add_into(acc, _bracket(_bracket(e2, e3, mu), e1, mu))
        _add_into(acc, _bracket(_bracket(e3, e1, mu), e2, mu))
        if acc:
            return False
    return True
