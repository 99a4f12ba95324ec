"""Poincare-Birkhoff-Witt normal ordering in the universal enveloping algebra
of the six-dimensional Euclidean motion algebra e(3), and the checks built on
it: centrality of the two Casimirs, the homomorphism of the second-kind
quadratic algebra into U(e(3)), and the identification of the two parameter
raising/lowering elements with the L-operator diagonal entries.

Basis order: P+ < P- < P3 < J+ < J- < J3.  Monomials are exponent 6-tuples in
this order; every product is reduced to the ordered basis through the
commutation table, which strictly lowers a well-founded degree, so reduction
terminates.  Coefficients may be Fractions or rational functions of the
spectral symbol.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable, Mapping

from .symcore import RatFunc, MultiPoly

P_PLUS, P_MINUS, P3, J_PLUS, J_MINUS, J3 = range(6)
GEN_NAMES = ("P+", "P-", "P3", "J+", "J-", "J3")
NGEN = 6

# [g_i, g_j] for i > j as {(i, j): (coeff, generator)}; omitted pairs commute
_BRACKET = {
    (J3, J_PLUS): (1, J_PLUS),
    (J_MINUS, J_PLUS): (-2, J3),
    (J3, J_MINUS): (-1, J_MINUS),
    (J3, P_PLUS): (1, P_PLUS),
    (J3, P_MINUS): (-1, P_MINUS),
    (J_PLUS, P_PLUS): (0, None),
    (J_MINUS, P_MINUS): (0, None),
    (J_PLUS, P_MINUS): (2, P3),
    (J_MINUS, P_PLUS): (-2, P3),
    (J_PLUS, P3): (-1, P_PLUS),
    (J_MINUS, P3): (1, P_MINUS),
    (J3, P3): (0, None),
    (P3, P_PLUS): (0, None),
    (P3, P_MINUS): (0, None),
    (P_MINUS, P_PLUS): (0, None),
}


def bracket(i: int, j: int):
    """[g_i, g_j] as (integer coeff, generator index or None)."""
    if i == j:
        return (0, None)
    if i > j:
        return _BRACKET[(i, j)]
    c, g = _BRACKET[(j, i)]
    return (-c, g)


_WORD_CACHE: dict = {}


def _normal_order_word(word: tuple) -> dict:
    """Normal form of a product of generators: {exponent-tuple: int coeff}."""
    if word in _WORD_CACHE:
        return _WORD_CACHE[word]
    # find the leftmost out-of-order adjacent pair
    pos = -1
    for k in range(len(word) - 1):
        if word[k] > word[k + 1]:
            pos = k
            break
    if pos < 0:
        exps = [0] * NGEN
        for g in word:
            exps[g] += 1
        result = {tuple(exps): 1}
    else:
        a, b = word[pos], word[pos + 1]
        swapped = word[:pos] + (b, a) + word[pos + 2:]
        result = dict(_normal_order_word(swapped))
        c, g = bracket(a, b)
        if c:
            shorter = word[:pos] + (g,) + word[pos + 2:]
            for mono, coeff in _normal_order_word(shorter).items():
                result[mono] = result.get(mono, 0) + c * coeff
        result = {m: v for m, v in result.items() if v}
    _WORD_CACHE[word] = result
    return result


def _mono_word(mono: tuple) -> tuple:
    out = []
    for g, e in enumerate(mono):
        out.extend([g] * e)
    return tuple(out)


class PBWElement:
    """Element of U(e(3)) over ordered monomials with scalar coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, object] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if not _is_zero(c)}

    @staticmethod
    def gen(i: int) -> "PBWElement":
        mono = tuple(1 if k == i else 0 for k in range(NGEN))
        return PBWElement({mono: Fraction(1)})

    @staticmethod
    def const(c) -> "PBWElement":
        return PBWElement({(0,) * NGEN: c})

    @staticmethod
    def one() -> "PBWElement":
        return PBWElement.const(Fraction(1))

    def __add__(self, other) -> "PBWElement":
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if _is_zero(s):
                out.pop(m, None)
            else:
                out[m] = s
        return PBWElement(out)

    def __neg__(self) -> "PBWElement":
        return PBWElement({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "PBWElement":
        return self + (-other)

    def __mul__(self, other) -> "PBWElement":
        if not isinstance(other, PBWElement):
            return self.scale(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            w1 = _mono_word(m1)
            for m2, c2 in other.terms.items():
                c = c1 * c2
                for mono, k in _normal_order_word(w1 + _mono_word(m2)).items():
                    s = out.get(mono, 0) + c * k
                    if _is_zero(s):
                        out.pop(mono, None)
                    else:
                        out[mono] = s
        return PBWElement(out)

    def __rmul__(self, other) -> "PBWElement":
        return self.scale(other)

    def scale(self, c) -> "PBWElement":
        return PBWElement({m: v * c for m, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(_is_zero(self.terms.get(k, 0) - other.terms.get(k, 0))
                   for k in keys)

    def __hash__(self):
        raise TypeError("PBWElement is unhashable")

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, mono: tuple):
        return self.terms.get(mono, Fraction(0))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            factors = []
            for g, e in enumerate(m):
                if e:
                    factors.append(GEN_NAMES[g] if e == 1
                                   else f"{GEN_NAMES[g]}^{e}")
            body = " ".join(factors) if factors else "1"
            parts.append(f"({self.terms[m]!r})*{body}")
        return " + ".join(parts)


def _is_zero(c) -> bool:
    if isinstance(c, RatFunc):
        return c.is_zero()
    return c == 0


def normal_order(word: Iterable[int], coeff=Fraction(1)) -> PBWElement:
    """Normal-order a word of generator indices with a scalar prefactor."""
    out: dict = {}
    for mono, k in _normal_order_word(tuple(word)).items():
        out[mono] = coeff * k
    return PBWElement(out)


def pbw_commutator(a: PBWElement, b: PBWElement) -> PBWElement:
    return a * b - b * a


def anticommutator(a: PBWElement, b: PBWElement) -> PBWElement:
    return a * b + b * a


# -- distinguished elements ---------------------------------------------------

def generators() -> list:
    return [PBWElement.gen(i) for i in range(NGEN)]


def casimir_p() -> PBWElement:
    """(P3)^2 + P+ P-."""
    p_plus, p_minus, p3 = (PBWElement.gen(i) for i in (P_PLUS, P_MINUS, P3))
    return p3 * p3 + p_plus * p_minus


def casimir_pj() -> PBWElement:
    """(P+ J- + P- J+)/2 + P3 J3, kept in expanded PBW form."""
    p_plus, p_minus, p3, j_plus, j_minus, j3 = generators()
    return (p_plus * j_minus + p_minus * j_plus).scale(Fraction(1, 2)) \
        + p3 * j3


def hom_images() -> dict:
    """The four generator images of the second-kind quadratic algebra."""
    p_plus, p_minus, p3, j_plus, j_minus, j3 = generators()
    a0 = (p_plus * j_minus - p_minus * j_plus).scale(Fraction(1, 2))
    a1 = p3
    b0 = -(p_plus * p_minus)
    c0 = -(anticommutator(j_plus, j_minus).scale(Fraction(1, 2))
           + j3 * j3 + PBWElement.const(Fraction(1, 4)))
    return {"A0": a0, "A1": a1, "B0": b0, "C0": c0}


def delta_literal() -> PBWElement:
    """The candidate -Ctilde*J3 (an element, central on the image algebra)."""
    return -(casimir_pj() * PBWElement.gen(J3))


def delta_central_q() -> PBWElement:
    """The candidate -q*Ctilde with q a central scalar symbol."""
    return casimir_pj().scale(RatFunc.sym("q")).scale(Fraction(-1))


def check_hom(delta: PBWElement) -> dict:
    """Evaluate the six quadratic-algebra relations on the images with the
    given delta element; returns per-relation residuals (zero means pass)."""
    img = hom_images()
    a0, a1, b0, c0 = img["A0"], img["A1"], img["B0"], img["C0"]
    five_half = Fraction(5, 2)
    residuals = {
        "r1": pbw_commutator(a1, a0) - b0,
        "r2": pbw_commutator(a1, b0),
        "r3": pbw_commutator(a1, c0) + a0.scale(2) - a1.scale(2),
        "r4": pbw_commutator(a0, b0) + anticommutator(a1, b0),
        "r5": pbw_commutator(a0, c0) - anticommutator(a1, c0)
        + a0.scale(2) - a1.scale(five_half) + delta.scale(2),
        "r6": pbw_commutator(b0, c0) + anticommutator(a0, a1).scale(2)
        - (a1 * a1).scale(4),
    }
    return residuals


def x_operators(sym: str = "u") -> tuple:
    """The raising/lowering elements at argument (u - 1/2), with coefficients
    rational in the spectral symbol."""
    u = RatFunc.sym(sym)
    half = Fraction(1, 2)
    p_minus, p3, j_plus, j3 = (PBWElement.gen(i)
                               for i in (P_MINUS, P3, J_PLUS, J3))
    ct = casimir_pj()
    ctj3 = ct * j3
    x_plus = p_minus * j_plus + p3 * j3 + p3.scale(u + half) \
        - ctj3.scale(1 / (u + half)) - ct
    x_minus = -(p_minus * j_plus) - p3 * j3 + p3.scale(u - half) \
        - ctj3.scale(1 / (u - half)) + ct
    return x_plus, x_minus


def check_x_identification(delta: PBWElement, sym: str = "u") -> dict:
    """Compare the raising/lowering elements with -A(-u) and A(u) built from
    the images, after clearing the (u +- 1/2) poles."""
    u = RatFunc.sym(sym)
    half = Fraction(1, 2)
    img = hom_images()
    a0, a1 = img["A0"], img["A1"]
    x_plus, x_minus = x_operators(sym)
    minus_a_minus_u = a1.scale(u + half) - a0 + delta.scale(1 / (u + half))
    a_u = a1.scale(u - half) + a0 + delta.scale(1 / (u - half))
    return {
        "plus": (x_plus - minus_a_minus_u).scale(u + half),
        "minus": (x_minus - a_u).scale(u - half),
    }


# -- engine self-checks -------------------------------------------------------

def association_invariance(n_words: int = 1000, max_len: int = 8,
                           seed: int = 12345) -> bool:
    """Multiply random generator words under left, right, and random
    bracketings; all must agree (the brute-force correctness oracle)."""
    rng = random.Random(seed)
    gens = generators()
    for _ in range(n_words):
        length = rng.randint(2, max_len)
        word = [rng.randrange(NGEN) for _ in range(length)]
        left = gens[word[0]]
        for g in word[1:]:
            left = left * gens[g]
        right = gens[word[-1]]
        for g in reversed(word[:-1]):
            right = gens[g] * right
        if not left == right:
            return False
        rand = _random_bracket(word, rng, gens)
        if not left == rand:
            return False
    return True


def _random_bracket(word, rng, gens):
    if len(word) == 1:
        return gens[word[0]]
    cut = rng.randint(1, len(word) - 1)
    return _random_bracket(word[:cut], rng, gens) \
        * _random_bracket(word[cut:], rng, gens)


def jacobi_all_triples() -> bool:
    """Jacobi identity for all 20 unordered generator triples, exactly."""
    gens = generators()
    for i in range(NGEN):
        for j in range(i + 1, NGEN):
            for k in range(j + 1, NGEN):
                x, y, z = gens[i], gens[j], gens[k]
                total = pbw_commutator(pbw_commutator(x, y), z) \
                    + pbw_commutator(pbw_commutator(y, z), x) \
                    + pbw_commutator(pbw_commutator(z, x), y)
                if not total.is_zero():
                    return False
    return True


def casimirs_central() -> bool:
    for cas in (casimir_p(), casimir_pj()):
        for g in generators():
            if not pbw_commutator(cas, g).is_zero():
                return False
    return True
