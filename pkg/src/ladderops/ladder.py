"""Numeric verification of the parameter-shift pairs and the ladder strings
they generate, plus the exact finite-dimensional checks: the dependent
finite family's rank and the span-restricted algebra representation.

Shift conventions: for each family the lowering identity sends F(u) to
factor(u) * F(u-1) and the raising identity to factor(u) * F(u+1); the two
one-step factors at the midpoint s (lowering measured at u = s + 1/2,
raising at u = s - 1/2) multiply to the family's determinant value at s.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .symcore import MultiPoly, RatFunc
from .diffop import BandedBasisOp, BasisDomainError
from .specfun import (FamilyEvaluator, make_family, to_mpf, p5_exact,
                      _p5_q_coeffs, poly_eval, poly_deriv, _poly_mul,
                      _poly_scale, _poly_add, pochhammer, ALL_FAMILIES)
from . import qism

HALF = Fraction(1, 2)


def tolerance(p: int):
    return mpmath.mpf(2) ** (-(p // 4))


def sample_points(fam: FamilyEvaluator, count: int = 5, seed: int = 12345):
    """Deterministic rational sample points inside the family domain."""
    rng = random.Random((seed, fam.fid).__repr__())
    lo, hi = fam.domain
    den = 1 << 16
    lo_n, hi_n = int(lo * den) + 1, int(hi * den) - 1
    return sorted(Fraction(rng.randint(lo_n, hi_n), den) for _ in range(count))


@dataclass
class PairCheck:
    fid: str
    u: Fraction
    points: list
    max_residual: float
    measured_down: object
    measured_up: object
    down_spread: float
    up_spread: float
    passed: bool
    notes: str = ""


@dataclass
class StringRun:
    fid: str
    u0: Fraction
    visited: list = field(default_factory=list)
    measured_down: dict = field(default_factory=dict)   # s -> ratio
    measured_up: dict = field(default_factory=dict)     # s -> ratio
    det_checks: list = field(default_factory=list)      # (s, rel err, ok)
    terminations: list = field(default_factory=list)    # (u, dir, predicted, observed)
    passed: bool = True
    notes: str = ""


def _apply_first_order(coeffs, f, d1):
    c1, c0 = coeffs
    return c1 * d1 + c0 * f


def _direction_check(fam, u: Fraction, shift: int, xs, p: int):
    """Verify one shift identity; returns (max rel residual, measured ratio,
    spread, image_norms, ref_norms)."""
    tol = tolerance(p)
    coeffs_fn = fam.down_coeffs if shift < 0 else fam.up_coeffs
    factor = (fam.down_factor if shift < 0 else fam.up_factor)(u)
    lhs_vals, tgt_vals, ref_vals = [], [], []
    with mpmath.workprec(p + 16):
        for x in xs:
            f, d1, _ = fam.value_derivs(u, x, p + 16)
            lhs = _apply_first_order(coeffs_fn(u, x, p + 16), f, d1)
            tgt, _, _ = fam.value_derivs(u + shift, x, p + 16)
            lhs_vals.append(lhs)
            tgt_vals.append(tgt)
            ref_vals.append(f)
        fac = to_mpf(factor)
        max_res = mpmath.mpf(0)
        for lhs, tgt in zip(lhs_vals, tgt_vals):
            rhs = fac * tgt
            scale = max(abs(lhs), abs(rhs))
            if scale == 0:
                continue
            max_res = max(max_res, abs(lhs - rhs) / scale)
        # measured ratio at the point with the largest target magnitude
        best = max(range(len(xs)), key=lambda i: abs(tgt_vals[i]))
        measured = lhs_vals[best] / tgt_vals[best] \
            if tgt_vals[best] != 0 else mpmath.mpf(0)
        spread = mpmath.mpf(0)
        for lhs, tgt in zip(lhs_vals, tgt_vals):
            if abs(tgt) > tol * abs(tgt_vals[best]):
                spread = max(spread, abs(lhs / tgt - measured))
        image_norm = max(abs(v) for v in lhs_vals)
        ref_norm = max(abs(v) for v in ref_vals)
    return max_res, measured, spread, image_norm, ref_norm


def verify_pair(fam: FamilyEvaluator, u: Fraction, xs=None, p: int = 192,
                seed: int = 12345) -> PairCheck:
    """Verify both directions of the family's shift pair pointwise and
    measure the proportionality factors against the closed forms."""
    if xs is None:
        xs = sample_points(fam, 5, seed)
    if len(xs) < 3:
        raise ValueError("need at least 3 sample points")
    u = Fraction(u)
    tol = tolerance(p)
    res_d, meas_d, spread_d, img_d, ref_d = _direction_check(fam, u, -1, xs, p)
    res_u, meas_u, spread_u, img_u, ref_u = _direction_check(fam, u, +1, xs, p)
    passed = res_d < tol and res_u < tol
    notes = []
    for name, meas, closed, spread in (("down", meas_d, fam.down_factor(u), spread_d),
                                       ("up", meas_u, fam.up_factor(u), spread_u)):
        cf = to_mpf(closed)
        scale = max(abs(cf), mpmath.mpf(1))
        if abs(meas - cf) > tol * scale:
            passed = False
            notes.append(f"{name} factor {mpmath.nstr(meas, 10)} != {closed}")
        if spread > tol * scale:
            passed = False
            notes.append(f"{name} factor not x-independent")
    return PairCheck(fid=fam.fid, u=u, points=list(xs),
                     max_residual=float(max(res_d, res_u)),
                     measured_down=meas_d, measured_up=meas_u,
                     down_spread=float(spread_d), up_spread=float(spread_u),
                     passed=passed, notes="; ".join(notes))


def measure_delta(fam: FamilyEvaluator, u: Fraction, xs=None, p: int = 192,
                  seed: int = 12345):
    """Measured one-step factors (lowering at midpoint u-1/2, raising at
    u+1/2) as pointwise ratios; raises if every target vanishes."""
    if xs is None:
        xs = sample_points(fam, 5, seed)
    res_d, meas_d, spread_d, _, _ = _direction_check(fam, Fraction(u), -1, xs, p)
    res_u, meas_u, spread_u, _, _ = _direction_check(fam, Fraction(u), +1, xs, p)
    return meas_d, meas_u


def check_annihilation(fam: FamilyEvaluator, u: Fraction, xs=None,
                       p: int = 192, seed: int = 12345):
    """|C(u) F(u)| at the sample points, relative to the largest term."""
    if fam.annihilator is None:
        raise ValueError(f"family {fam.fid} declares no annihilator")
    if xs is None:
        xs = sample_points(fam, 5, seed)
    tol = tolerance(p)
    worst = mpmath.mpf(0)
    with mpmath.workprec(p + 16):
        for x in xs:
            f, d1, d2 = fam.value_derivs(Fraction(u), x, p + 16)
            c2, c1, c0 = fam.annihilator(Fraction(u), x, p + 16)
            terms = (c2 * d2, c1 * d1, c0 * f)
            scale = max(abs(t) for t in terms)
            if scale == 0:
                continue
            worst = max(worst, abs(sum(terms)) / scale)
    return worst, worst < tol


def verify_string(fam: FamilyEvaluator, u0: Fraction, steps_down: int = 0,
                  steps_up: int = 0, p: int = 192,
                  seed: int = 12345) -> StringRun:
    """Walk the ladder from u0, verifying both shift identities at every
    visited point, measuring the one-step factors, checking the interior
    midpoint products against the determinant, and checking that terminations
    happen exactly where the closed-form factors vanish (where the
    determinant has its exact zero)."""
    xs = sample_points(fam, 5, seed)
    tol = tolerance(p)
    run = StringRun(fid=fam.fid, u0=Fraction(u0))
    notes = []

    visited = []
    u = Fraction(u0)
    for _ in range(steps_down + 1):
        visited.append(u)
        if fam.down_factor(u) == 0:
            break
        u -= 1
    u = Fraction(u0) + 1
    for _ in range(steps_up):
        if fam.up_factor(u - 1) == 0:
            break
        visited.append(u)
        u += 1
    run.visited = sorted(set(visited))

    for u in run.visited:
        for shift, which in ((-1, "down"), (+1, "up")):
            factor = (fam.down_factor if shift < 0 else fam.up_factor)(u)
            res, meas, spread, img, ref = _direction_check(fam, u, shift, xs, p)
            observed_kill = bool(img < tol * max(ref, mpmath.mpf(1)))
            if factor == 0 or observed_kill:
                run.terminations.append((u, which, factor == 0, observed_kill))
                if (factor == 0) != observed_kill:
                    run.passed = False
                    notes.append(f"termination mismatch at u={u} ({which})")
                else:
                    # the determinant vanishes exactly at the edge midpoint
                    s = u - HALF if shift < 0 else u + HALF
                    det_zero = fam.det_closed(s) == 0
                    run.det_checks.append((s, 0.0, det_zero))
                    if not det_zero:
                        run.passed = False
                        notes.append(f"edge determinant nonzero at s={s}")
                continue
            if res >= tol or spread >= tol * max(abs(to_mpf(factor)), 1):
                run.passed = False
                notes.append(f"step residual {float(res):.3g} at u={u} ({which})")
            if shift < 0:
                run.measured_down[u - HALF] = meas
            else:
                run.measured_up[u + HALF] = meas

    for s in sorted(set(run.measured_down) & set(run.measured_up)):
        expected = fam.det_closed(s)
        with mpmath.workprec(p + 16):
            prod = run.measured_down[s] * run.measured_up[s]
            err = abs(prod - to_mpf(expected)) / max(abs(to_mpf(expected)),
                                                     mpmath.mpf(1))
        ok = err < tol
        run.det_checks.append((s, float(err), ok))
        if not ok:
            run.passed = False
            notes.append(f"determinant product fails at s={s}")
    run.notes = "; ".join(notes)
    return run


def det_matches_symbolic(fam: FamilyEvaluator) -> bool:
    """The family's closed determinant equals the symbolic determinant of its
    associated L-operator, as rational functions of the midpoint."""
    if fam.associated_l is None:
        return True
    kind, tag, params = fam.associated_l
    L = qism.build_l(kind, tag, params)
    s = RatFunc.sym("u")
    return fam.det_closed(s) == L.det_expected("u")


# ---------------------------------------------------------------------------
# the dependent finite family (exact)
# ---------------------------------------------------------------------------

def exact_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = 1 / m[row][col]
        m[row] = [v * inv for v in m[row]]
        for r in range(len(m)):
            if r != row and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[row])]
        row += 1
        rank += 1
        if row == len(m):
            break
    return rank


@dataclass
class RankReport:
    n: int
    degrees: list
    rank: int
    expected_rank: int
    sign_convention_ok: bool
    shifts_ok: bool
    passed: bool


def finite_string_rank(n: int, p: int = 192) -> RankReport:
    """Exact check of the 2n+1 member family: each de-weighted member is a
    polynomial of exact degree n, the coefficient matrix has rank n+1, the
    negative-index members obey the sign convention, and both shift
    identities hold exactly at rational points."""
    if not 1 <= n <= 6:
        raise ValueError("n must be between 1 and 6")
    qs = {k: _p5_q_coeffs(n, k) for k in range(-n, n + 1)}
    degrees = []
    for k in range(-n, n + 1):
        q = qs[k]
        deg = max(i for i, c in enumerate(q) if c != 0)
        degrees.append(deg)
    rows = [[qs[k][i] if i < len(qs[k]) else Fraction(0) for i in range(n + 1)]
            for k in range(-n, n + 1)]
    rank = exact_rank(rows)
    # sign convention: (1-x)^k q_{-k}(x) == (-1)^k x^k q_k(x)
    sign_ok = True
    for k in range(1, n + 1):
        lhs = qs[-k]
        for _ in range(k):
            lhs = _poly_mul(lhs, [Fraction(1), Fraction(-1)])
        rhs = _poly_scale(_poly_mul(qs[k], [Fraction(0)] * k + [Fraction(1)]),
                          Fraction((-1) ** k))
        if any(c != 0 for c in _poly_add(lhs, _poly_scale(rhs, Fraction(-1)))):
            sign_ok = False
    # exact shift identities at rational points
    shifts_ok = True
    for x in (Fraction(1, 5), Fraction(1, 3), Fraction(2, 3)):
        for k in range(-n + 1, n):
            f, d1 = p5_exact(n, k, x)
            fm, _ = p5_exact(n, k - 1, x)
            fp, _ = p5_exact(n, k + 1, x)
            lhs_down = x * d1 - Fraction(n) / (1 - x) * f + (n + k) * f
            lhs_up = (1 - x) * d1 + (k - n) * f
            if lhs_down != (n + k) * fm or lhs_up != -(Fraction(n) - k) * fp:
                shifts_ok = False
    passed = (rank == n + 1 and rank < 2 * n + 1
              and all(d == n for d in degrees) and sign_ok and shifts_ok)
    return RankReport(n=n, degrees=degrees, rank=rank, expected_rank=n + 1,
                      sign_convention_ok=sign_ok, shifts_ok=shifts_ok,
                      passed=passed)


# ---------------------------------------------------------------------------
# the span-restricted representation (exact)
# ---------------------------------------------------------------------------

@dataclass
class SpanReport:
    window: int
    degrees_ok: bool
    independent: bool
    eigen_ok: bool
    commutators_ok: bool
    q1: Fraction | None
    q0: Fraction | None
    passed: bool


def _span_f_coeffs(k: int, b: Fraction, c: Fraction) -> list:
    """Coefficients in t = 1/(1-x) of the k-th member (a = 0 case):
    t^k * 2F1(-k, b-k; c-k; 1 - 1/t) expanded exactly."""
    acc = [Fraction(0)]
    for j in range(k + 1):
        r = pochhammer(Fraction(-k), j) * pochhammer(b - k, j) \
            / (pochhammer(c - k, j) * pochhammer(Fraction(1), j))
        # x^j = (1 - 1/t)^j contributes t^{k-j} (t-1)^j
        tpoly = [Fraction(0)] * (k - j) + [Fraction(1)]
        tm1 = [Fraction(-1), Fraction(1)]
        for _ in range(j):
            tpoly = _poly_mul(tpoly, tm1)
        acc = _poly_add(acc, _poly_scale(tpoly, r))
    return acc


def check_prop54(window: int = 4, b=Fraction(2, 3), c=Fraction(5, 7)) -> SpanReport:
    """Exact span-restricted representation on the polynomial family in
    1/(1-x): linear independence, the diagonal action defining the missing
    generator, and all six zero-order commutators plus the two scalars."""
    b, c = Fraction(b), Fraction(c)
    if c.denominator == 1:
        raise ValueError("the third parameter must not be an integer")
    m = window
    big = m + 2
    fs = {k: _span_f_coeffs(k, b, c) for k in range(big + 1)}
    degrees_ok = all(len(fs[k]) == k + 1 and fs[k][k] != 0
                     for k in range(big + 1))
    rows = [[fs[k][i] if i < len(fs[k]) else Fraction(0)
             for i in range(m + 1)] for k in range(m + 1)]
    independent = exact_rank(rows) == m + 1

    one = RatFunc.const(1)

    def a0_rule(j):
        return {j + 1: RatFunc.const(j - b + c),
                j: RatFunc.const(b - 1 - j)}

    def d0_rule(j):
        return {j: RatFunc.const(Fraction(j))} if j else {}

    def b0_rule(j):
        return {j + 1: RatFunc.const(c - b + j)}

    basis = "tmono"
    a0 = BandedBasisOp(basis, a0_rule, 1, None)
    d0 = BandedBasisOp(basis, d0_rule, 0, None)
    b0 = BandedBasisOp(basis, b0_rule, 1, None)

    # C0 through the eigenbasis: C0 F(-k) = k F(-k)
    mat = [[fs[k][i] if i < len(fs[k]) else Fraction(0)
            for k in range(big + 1)] for i in range(big + 1)]
    inv = _invert_fraction_matrix(mat)
    c0_mat = _mat_mul_frac(mat, [[(Fraction(k) if k == j else Fraction(0))
                                  for j in range(big + 1)]
                                 for k in range(big + 1)])
    c0_mat = _mat_mul_frac(c0_mat, inv)

    def c0_rule(j):
        if j > big:
            raise BasisDomainError("outside the represented window")
        return {i: RatFunc.const(c0_mat[i][j])
                for i in range(big + 1) if c0_mat[i][j] != 0}

    c0 = BandedBasisOp(basis, c0_rule, big, 0)

    idx = range(0, m + 1)

    def comm(pq, qp):
        return pq * qp - qp * pq

    checks = [
        comm(a0, b0) + b0,
        comm(a0, c0) - c0 + a0,
        comm(a0, d0) + b0,
        comm(b0, c0) - d0 + a0,
        comm(b0, d0) + b0,
        comm(c0, d0) - c0 + d0,
    ]
    commutators_ok = all(ch.is_zero_on(idx) for ch in checks)

    q1_op = a0 + d0 - b0
    q1 = _diag_value(q1_op, idx)
    q0_op = a0 * d0 - b0 * c0 \
        + (d0 + b0 - a0).scale(Fraction(1, 2)) \
        - BandedBasisOp.scalar(basis, Fraction(1, 4))
    q0 = _diag_value(q0_op, idx)

    # eigen action, including the zero eigenvalue member
    eigen_ok = True
    for k in range(m + 1):
        col = [fs[k][i] if i < len(fs[k]) else Fraction(0)
               for i in range(big + 1)]
        image = [Fraction(0)] * (big + 1)
        for j, v in enumerate(col):
            if v == 0:
                continue
            for i, cc in c0.apply(j).items():
                image[i] += cc.const_value() * v
        if image != [Fraction(k) * v for v in col]:
            eigen_ok = False

    expected_q1 = b - 1
    expected_q0 = -(b - HALF) * HALF
    passed = (degrees_ok and independent and eigen_ok and commutators_ok
              and q1 == expected_q1 and q0 == expected_q0)
    return SpanReport(window=m, degrees_ok=degrees_ok, independent=independent,
                      eigen_ok=eigen_ok, commutators_ok=commutators_ok,
                      q1=q1, q0=q0, passed=passed)


def _diag_value(op: BandedBasisOp, idx) -> Fraction | None:
    value = None
    for k in idx:
        img = dict(op.apply(k))
        coeff = img.pop(k, RatFunc.const(0))
        if any(not c.is_zero() for c in img.values()):
            return None
        v = coeff.const_value()
        if value is None:
            value = v
        elif v != value:
            return None
    return value


def _invert_fraction_matrix(mat):
    n = len(mat)
    aug = [list(map(Fraction, mat[i])) + [Fraction(int(i == j))
                                          for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _mat_mul_frac(m1, m2):
    n = len(m1)
    return [[sum((m1[i][k] * m2[k][j] for k in range(n)), Fraction(0))
             for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# composition of the two directions
# ---------------------------------------------------------------------------

def compose_updown(fam: FamilyEvaluator, u: Fraction, xs=None, p: int = 192,
                   seed: int = 12345):
    """Raising after lowering reproduces the determinant multiple of F(u):
    chains the measured lowering ratio through the analytic raising step."""
    if xs is None:
        xs = sample_points(fam, 5, seed)
    u = Fraction(u)
    tol = tolerance(p)
    _, meas_down, _, _, _ = _direction_check(fam, u, -1, xs, p)
    worst = mpmath.mpf(0)
    with mpmath.workprec(p + 16):
        expected = to_mpf(fam.det_closed(u - HALF))
        for x in xs:
            fm, d1m, _ = fam.value_derivs(u - 1, x, p + 16)
            up_img = _apply_first_order(fam.up_coeffs(u - 1, x, p + 16),
                                        fm, d1m)
            f, _, _ = fam.value_derivs(u, x, p + 16)
            lhs = meas_down * up_img
            rhs = expected * f
            scale = max(abs(lhs), abs(rhs), mpmath.mpf(1) * abs(f))
            if scale == 0:
                continue
            worst = max(worst, abs(lhs - rhs) / scale)
    return worst, worst < tol
