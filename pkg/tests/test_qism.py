import random
from fractions import Fraction as Q

import pytest

from ladderops.symcore import MultiPoly, RatFunc
from ladderops.diffop import DiffOp
from ladderops.qism import (
    KIND_I, KIND_II, TYPE_A, TYPE_B, TYPE_CP, TYPE_DP, TYPE_CPP,
    TYPE_GEN_A, TYPE_GEN_CPP, QISM1_TYPES, QISM2_TYPES,
    build_l, build_gen_cpp_printed_variant, BuildError,
    check_rmatrix, check_unitarity, crosscheck_commutators, quantum_det,
    check_lemma_c, check_factorization, check_miller_ode,
    check_miller_conditions, check_miller_symmetric, check_g_ab,
    check_jacobi_rank1, lemma_c_scaled_qism1, lemma_c_swapped_qism1,
    lemma_c_scaled_qism2,
)

x = RatFunc(MultiPoly.sym("x"))
u = RatFunc.sym("u")


@pytest.fixture(scope="module")
def built():
    out = {}
    for tag in QISM1_TYPES:
        out[tag] = build_l(KIND_I, tag)
    for tag in QISM2_TYPES:
        out[tag] = build_l(KIND_II, tag)
    return out


# -- construction -------------------------------------------------------------

def test_build_type_b_entries(built):
    L = built[TYPE_B]
    a, c = RatFunc.sym("a"), RatFunc.sym("c")
    assert L.entry("A", "u") == DiffOp({1: x, 0: -x + c - a - u})
    assert L.entry("D", "u") == DiffOp({1: x, 0: a + u})
    assert L.entry("C", "u") == -DiffOp({2: x, 1: c - x, 0: -a - u})
    assert L.entry("B", "u") == DiffOp({0: -x})


def test_build_type_dp_entries(built):
    # diagonal roles fixed so the exchange relation holds with gamma = +1;
    # the u-coefficient of the determinant is then -1
    L = built[TYPE_DP]
    assert L.entry("A", "u") == DiffOp.d()
    assert L.entry("D", "u") == DiffOp({1: RatFunc.const(1), 0: -x})
    assert L.entry("C", "u") == DiffOp({2: RatFunc.const(1), 1: -x, 0: u})
    assert L.q1 == RatFunc.const(-1)


def test_build_gen_cpp_entries(built):
    L = built[TYPE_GEN_CPP]
    delta = RatFunc.sym("delta")
    xi = 1 / x
    expected_a = DiffOp({1: RatFunc.const(1),
                         0: (u - Q(1, 2)) * xi + xi * Q(1, 2)
                         + delta / (u - Q(1, 2))})
    assert L.entry("A", "u") == expected_a
    # C carries +x^2/4 so that it annihilates the weighted confluent family
    expected_c = DiffOp({2: -x * x, 1: -x,
                         0: x * x * Q(1, 4) + 2 * delta * x + u * u})
    assert L.entry("C", "u") == expected_c


def test_build_gen_a_delta_forced(built):
    a, c = RatFunc.sym("a"), RatFunc.sym("c")
    L = built[TYPE_GEN_A]
    assert L.delta2 == (a - c + Q(1, 2)) * (a - Q(1, 2)) * Q(1, 2)
    assert L.entry("B", "u") == DiffOp({0: -x * (1 - x)})


def test_exclusions_rejected():
    with pytest.raises(BuildError):
        build_l(KIND_I, TYPE_A, {"b": Q(-2)})
    with pytest.raises(BuildError):
        build_l(KIND_I, TYPE_B, {"c": 0})
    with pytest.raises(BuildError):
        build_l(KIND_I, "nope")
    build_l(KIND_I, TYPE_A, {"b": Q(1, 2)})  # non-integer rational is fine


# -- exchange relations -------------------------------------------------------

def test_rmatrix_symbolic_types(built):
    for tag in (TYPE_B, TYPE_DP):
        rec = check_rmatrix(built[tag])
        assert rec.passed and rec.backend == "symbolic"


def test_rmatrix_second_kind(built):
    for tag in QISM2_TYPES:
        rec = check_rmatrix(built[tag])
        assert rec.passed
        assert check_unitarity(built[tag]).passed


def test_rmatrix_basis_types(built):
    for tag in (TYPE_A, TYPE_CP, TYPE_CPP):
        rec = check_rmatrix(built[tag], degree_n=8)
        assert rec.passed and rec.backend == "basis-action"


def test_printed_ccc_variant_also_represents_the_algebra():
    # the variant with x^2 coefficient -1 satisfies the same exchange
    # relation, with constant term 1 instead of -1/4
    L = build_gen_cpp_printed_variant()
    assert check_rmatrix(L).passed
    _, det = quantum_det(L)
    delta = RatFunc.sym("delta")
    assert det == delta * delta / (u * u) + 1


# -- extended commutator lists ------------------------------------------------

@pytest.mark.parametrize("tag", QISM1_TYPES)
def test_extended_list_first_kind(built, tag):
    recs = crosscheck_commutators(built[tag], degree_n=8, rmatrix_passed=True)
    assert [r.eq for r in recs] == [f"2.{k}" for k in range(4, 17)]
    assert all(r.passed for r in recs)


@pytest.mark.parametrize("tag", QISM2_TYPES)
def test_extended_list_second_kind(built, tag):
    # under the uniform reading of the tilde shorthand every printed relation
    # verifies; in particular nothing is flagged
    recs = crosscheck_commutators(built[tag], rmatrix_passed=True)
    assert [r.eq for r in recs] == [f"2.{k}" for k in range(17, 32)]
    assert all(r.passed for r in recs)
    assert not any(r.flagged for r in recs)


def test_flagging_marks_failures_when_rmatrix_passes(built):
    # force a failure by lying about a relation through a perturbed operator
    L = built[TYPE_B].perturbed("A")
    recs = crosscheck_commutators(L, rmatrix_passed=False)
    assert any(not r.passed for r in recs)
    assert not any(r.flagged for r in recs)  # not flagged: rmatrix failed too


# -- quantum determinants -----------------------------------------------------

def test_qdet_spot_values(built):
    a, c = RatFunc.sym("a"), RatFunc.sym("c")
    expectations = {
        TYPE_A: (-u * u + (c - 2 * a) * u
                 + (a - Q(1, 2)) * (c - a - Q(1, 2))),
        TYPE_B: (-u * u + (c - 2 * a) * u
                 + (a - Q(1, 2)) * (c - a - Q(1, 2))),
        TYPE_CP: u - Q(1, 2),
        TYPE_DP: -u - Q(1, 2),
        TYPE_CPP: RatFunc.const(1),
    }
    for tag, expected in expectations.items():
        rec, det = quantum_det(built[tag], degree_n=8)
        assert rec.passed, (tag, rec.residual)
        assert det == expected, tag


def test_qdet_q1_values(built):
    a, c = RatFunc.sym("a"), RatFunc.sym("c")
    assert built[TYPE_A].q1 == c - 2 * a
    assert built[TYPE_B].q1 == c - 2 * a
    assert built[TYPE_CP].q1 == RatFunc.const(1)
    assert built[TYPE_DP].q1 == RatFunc.const(-1)
    assert built[TYPE_CPP].q1 == RatFunc.const(0)
    assert built[TYPE_CPP].q0 == RatFunc.const(1)


def test_qdet_second_kind(built):
    for tag in QISM2_TYPES:
        rec, det = quantum_det(built[tag])
        assert rec.passed, rec.residual
    delta = RatFunc.sym("delta")
    _, det = quantum_det(built[TYPE_GEN_CPP])
    assert det == delta * delta / (u * u) - Q(1, 4)
    assert built[TYPE_GEN_A].q2 == RatFunc.const(Q(1, 4))


# -- the three-equality conditions ---------------------------------------------

@pytest.mark.parametrize("tag", QISM1_TYPES + QISM2_TYPES)
def test_lemma_c(built, tag):
    assert check_lemma_c(built[tag]).passed


def test_lemma_c_gen_values(built):
    # B0 = [A1, A0] and the derived pieces for the second kind
    from ladderops.diffop import op_commutator
    L = built[TYPE_GEN_A]
    assert op_commutator(L.a1, L.a0) == DiffOp({0: -x * (1 - x)})
    L2 = built[TYPE_GEN_CPP]
    xi = 1 / x
    assert op_commutator(L2.a1, L2.a0) == DiffOp({0: xi * xi})
    assert L2.b0 == DiffOp({0: xi * xi})


def test_lemma_covariances(built):
    assert lemma_c_scaled_qism1(built[TYPE_B])
    assert lemma_c_swapped_qism1(built[TYPE_B])
    assert lemma_c_swapped_qism1(built[TYPE_DP])
    assert lemma_c_scaled_qism2(built[TYPE_GEN_A])
    assert lemma_c_scaled_qism2(built[TYPE_GEN_CPP])


@pytest.mark.parametrize("tag,letters", [
    (TYPE_B, ("A", "B", "C", "D")),
    (TYPE_DP, ("A", "B", "C", "D")),
    (TYPE_GEN_A, ("A", "A1", "B", "C")),
    (TYPE_GEN_CPP, ("A", "A1", "B", "C")),
])
def test_mutation_sensitivity(built, tag, letters):
    L = built[tag]
    for letter in letters:
        mutated = L.perturbed(letter)
        assert not check_lemma_c(mutated).passed, (tag, letter)
        assert not check_rmatrix(mutated).passed, (tag, letter)


# -- factorizations -------------------------------------------------------------

@pytest.mark.parametrize("tag", QISM1_TYPES + QISM2_TYPES)
def test_factorization(built, tag):
    assert check_factorization(built[tag], degree_n=8).passed


def test_factorization_degenerate_zero():
    # all operators zero with zero determinant satisfies both identities
    zero = DiffOp.zero()
    r1 = zero * zero - zero * zero - DiffOp.const(0)
    assert r1.is_zero()


# -- ladder classification -------------------------------------------------------

@pytest.mark.parametrize("tag", [TYPE_A, TYPE_B, TYPE_CP, TYPE_DP, TYPE_CPP,
                                 "D''"])
def test_miller_ode(tag):
    assert check_miller_ode(tag, samples=8).passed


@pytest.mark.parametrize("tag", QISM1_TYPES)
def test_miller_conditions(tag):
    assert check_miller_conditions(tag).passed


@pytest.mark.parametrize("tag", ["A-sym", "C'''"])
def test_miller_symmetric(tag):
    assert check_miller_symmetric(tag).passed


def test_symmetric_commutator_values():
    from ladderops.diffop import op_commutator
    # [A1, A0] for the two symmetric precursors
    a1 = DiffOp.mul_by(x - Q(1, 2))
    a0 = DiffOp({1: x * (1 - x), 0: -RatFunc.sym("a") * (x - Q(1, 2))})
    assert op_commutator(a1, a0) == DiffOp({0: -x * (1 - x)})
    xi = 1 / x
    assert op_commutator(DiffOp.mul_by(xi), DiffOp.d()) == DiffOp({0: xi * xi})


# -- the four-dimensional ladder algebra ------------------------------------------

@pytest.mark.parametrize("tag", QISM1_TYPES)
def test_g_ab(tag):
    assert check_g_ab(tag).passed


def test_g_ab_dp_constant():
    # for the parabolic type the ladder bracket is the scalar -1
    from ladderops.diffop import BiOp
    L = build_l(KIND_I, TYPE_DP)
    jp = BiOp.t(1) * BiOp.from_diffop(L.d0)
    jm = BiOp.t(-1) * BiOp.from_diffop(L.a0)
    assert jm * jp - jp * jm == BiOp.const(-1)


# -- rank-1 Jacobi ----------------------------------------------------------------

def test_jacobi_identity_examples():
    assert check_jacobi_rank1(2, [[1, 0], [0, 1]])
    rng = random.Random(7)
    mu = [[Q(rng.randint(-128, 128)) for _ in range(3)] for _ in range(3)]
    assert check_jacobi_rank1(3, mu)
    assert check_jacobi_rank1(2, [[0, 0], [0, 0]])


def test_jacobi_sampled_subset():
    rng = random.Random(9)
    mu = [[Q(rng.randint(-16, 16)) for _ in range(4)] for _ in range(4)]
    assert check_jacobi_rank1(4, mu, trials=500, seed=1)
