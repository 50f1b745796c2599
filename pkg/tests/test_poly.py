"""Polynomial core: arithmetic, calculus, shifting, functionals."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualdeflate import (
    GRLEX,
    Functional,
    MonomialOrder,
    Polynomial,
    PolySystem,
    apply_functional,
    compare_monomials,
    substitute_line,
)
from dualdeflate.errors import (
    DegenerateDirectionError,
    DimensionMismatchError,
)
from dualdeflate.poly import exponent_sub, factorial, total_degree

from oracles import apply_functional_oracle, brute_derivative


# -- strategies ------------------------------------------------------------

def exponents(nvars, max_deg=4):
    return st.tuples(*[st.integers(0, max_deg) for _ in range(nvars)])


def coefficients():
    ints = st.integers(-3, 3)
    return st.builds(complex, ints, ints).filter(lambda z: z != 0)


def polynomials(nvars, max_deg=4, max_terms=6):
    return st.dictionaries(
        exponents(nvars, max_deg), coefficients(), max_size=max_terms
    ).map(lambda d: Polynomial(nvars, d))


def points(nvars):
    reals = st.floats(-1.5, 1.5, allow_nan=False)
    return st.tuples(
        *[st.builds(complex, reals, reals) for _ in range(nvars)]
    ).map(np.array)


# -- construction and canonical form ---------------------------------------

def test_zero_coefficients_are_dropped():
    p = Polynomial(2, {(1, 0): 0, (0, 1): 2})
    assert p.support() == {(0, 1)}
    assert p.coefficient((1, 0)) == 0


def test_duplicate_terms_cancel():
    p = Polynomial(1, {(2,): 1}) - Polynomial(1, {(2,): 1})
    assert p.is_zero()
    assert p.degree == -1


def test_immutability():
    p = Polynomial.variable(2, 0)
    with pytest.raises(AttributeError):
        p.nvars = 3
    p.terms[(5, 5)] = 1.0  # mutating the copy must not affect p
    assert (5, 5) not in p.support()


def test_dimension_mismatch_rejected():
    with pytest.raises(DimensionMismatchError):
        Polynomial(2, {(1,): 1})
    with pytest.raises(DimensionMismatchError):
        Polynomial.variable(2, 0) + Polynomial.variable(3, 0)


def test_negative_exponent_rejected():
    with pytest.raises(ValueError):
        Polynomial(1, {(-1,): 1})


# -- arithmetic as evaluation homomorphism ---------------------------------

@settings(max_examples=60, deadline=None)
@given(polynomials(2), polynomials(2), points(2))
def test_add_mul_match_evaluation(p, q, x):
    scale = max(1.0, abs(p.evaluate(x)), abs(q.evaluate(x)))
    assert abs((p + q).evaluate(x) - (p.evaluate(x) + q.evaluate(x))) < 1e-9 * scale
    assert abs((p * q).evaluate(x) - p.evaluate(x) * q.evaluate(x)) < 1e-9 * scale**2
    assert abs((p - q).evaluate(x) - (p.evaluate(x) - q.evaluate(x))) < 1e-9 * scale


@settings(max_examples=30, deadline=None)
@given(polynomials(2, max_deg=2, max_terms=3), st.integers(0, 4), points(2))
def test_power_matches_repeated_product(p, k, x):
    expected = 1 + 0j
    for _ in range(k):
        expected *= p.evaluate(x)
    scale = max(1.0, abs(p.evaluate(x))) ** max(k, 1)
    assert abs((p**k).evaluate(x) - expected) < 1e-8 * scale


def test_scalar_operations():
    p = Polynomial.variable(1, 0)
    assert (2 * p + 1).evaluate([3]) == 7
    assert (1 - p).evaluate([3]) == -2


# -- derivatives against the term-by-term oracle ---------------------------

@settings(max_examples=80, deadline=None)
@given(polynomials(2), exponents(2, 3))
def test_diff_matches_brute_oracle(p, beta):
    assert p.diff(beta).terms == pytest.approx(brute_derivative(p.terms, beta))


@settings(max_examples=40, deadline=None)
@given(polynomials(3, max_deg=3), exponents(3, 2), exponents(3, 2))
def test_mixed_partials_commute(p, a, b):
    ab = p.diff(a).diff(b)
    ba = p.diff(b).diff(a)
    combined = p.diff(tuple(x + y for x, y in zip(a, b)))
    assert ab == ba == combined


@settings(max_examples=40, deadline=None)
@given(polynomials(2), polynomials(2))
def test_diff_is_linear(p, q):
    assert (p + q).diff((1, 0)) == p.diff((1, 0)) + q.diff((1, 0))
    assert (3 * p).diff((0, 1)) == 3 * p.diff((0, 1))


def test_diff_once_agrees_with_diff():
    p = Polynomial(2, {(3, 2): 5, (0, 4): -1})
    assert p.diff_once(0) == p.diff((1, 0))
    assert p.diff_once(1) == p.diff((0, 1))


@settings(max_examples=40, deadline=None)
@given(polynomials(2), exponents(2, 2), exponents(2, 2))
def test_monomial_multiply_then_diff_oracle(p, alpha, beta):
    lhs = p.monomial_multiply(alpha).diff(beta)
    rhs = brute_derivative(
        {tuple(a + s for a, s in zip(e, alpha)): c for e, c in p.items()}, beta
    )
    assert lhs.terms == pytest.approx(rhs)


# -- composition and shifting ----------------------------------------------

@settings(max_examples=40, deadline=None)
@given(polynomials(2, max_deg=3), points(2), points(2))
def test_shift_is_translation(p, b, y):
    direct = p.evaluate(y + b)
    shifted = p.shift(b).evaluate(y)
    scale = max(1.0, abs(direct))
    assert abs(direct - shifted) < 1e-8 * scale


@settings(max_examples=30, deadline=None)
@given(polynomials(2, max_deg=3), points(2))
def test_shift_roundtrip(p, b):
    back = p.shift(b).shift(-b)
    for alpha in p.support() | back.support():
        assert back.coefficient(alpha) == pytest.approx(
            p.coefficient(alpha), abs=1e-8
        )


def test_compose_linear_substitution():
    p = Polynomial(2, {(2, 0): 1, (0, 1): 1})  # x^2 + y
    u = Polynomial(1, {(1,): 2})  # 2t
    v = Polynomial(1, {(3,): 1})  # t^3
    q = p.compose([u, v])
    assert q == Polynomial(1, {(2,): 4, (3,): 1})


def test_embed_preserves_evaluation():
    p = Polynomial(2, {(1, 2): 3})
    q = p.embed(4, offset=1)
    assert q.evaluate([9, 2, 3, 9]) == p.evaluate([2, 3])
    with pytest.raises(DimensionMismatchError):
        p.embed(2, offset=1)


# -- line restriction ------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(polynomials(2, max_deg=3), points(2), points(2),
       st.floats(-1.0, 1.0, allow_nan=False))
def test_substitute_line_matches_evaluation(p, x0, gamma, t):
    if not np.any(gamma):
        gamma = np.array([1.0 + 0j, 0j])
    F = PolySystem(2, (p,))
    H = substitute_line(F, x0, gamma)
    direct = F.evaluate(x0 + gamma * t)
    scale = max(1.0, float(np.abs(direct).max()))
    assert np.allclose(H.evaluate(t), direct, atol=1e-8 * scale)


def test_substitute_line_zero_direction_raises():
    F = PolySystem(2, (Polynomial.variable(2, 0),))
    with pytest.raises(DegenerateDirectionError):
        substitute_line(F, [0, 0], [0, 0])


def test_support_scale_is_relative():
    # 1000*(t^3-part) dominating a t^2-part of size 1000*1e-6
    F = PolySystem(1, (Polynomial(1, {(3,): 1000, (2,): 1e-3}),))
    H = substitute_line(F, [0], [1])
    assert H.support(1e-4) == {3}
    assert H.support(1e-7) == {2, 3}


# -- functionals -----------------------------------------------------------

def test_delta_duality_on_monomials():
    # D_alpha picks the coefficient of (x-b)^alpha: delta on shifted monomials
    b = (0.5, -0.25)
    for alpha in [(0, 0), (1, 0), (0, 1), (2, 1), (0, 4), (3, 3)]:
        L = Functional.delta(2, alpha, b)
        for beta in [(0, 0), (1, 0), (0, 1), (2, 1), (0, 4), (3, 3)]:
            mono = Polynomial.constant(2, 1)
            for i, e in enumerate(beta):
                mono = mono * (
                    Polynomial.variable(2, i) - Polynomial.constant(2, b[i])
                ) ** e
            expected = 1.0 if alpha == beta else 0.0
            assert abs(L.apply(mono) - expected) < 1e-12


@settings(max_examples=50, deadline=None)
@given(
    polynomials(2, max_deg=3),
    st.dictionaries(exponents(2, 3), coefficients(), min_size=1, max_size=4),
    points(2),
)
def test_apply_functional_matches_oracle(p, terms, b):
    L = Functional(2, terms, tuple(b))
    expected = apply_functional_oracle(terms, b, p.terms)
    assert abs(apply_functional(L, p) - expected) < 1e-8 * max(1.0, abs(expected))


def test_functional_leading_exponent():
    L = Functional(2, {(1, 0): 2, (0, 2): 1}, (0, 0))
    assert L.leading_exponent() == (0, 2)
    assert L.leading_exponent(MonomialOrder.weighted((5, 1))) == (1, 0)


# -- orders and helpers ----------------------------------------------------

def test_grlex_orders_by_degree_then_lex():
    seq = [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    assert sorted(seq, key=GRLEX.key) == seq


def test_weighted_order():
    w = MonomialOrder.weighted((2, 1))
    assert compare_monomials((1, 0), (0, 1), w) == 1  # weight 2 vs 1
    # (1,0) and (0,2) tie on weight; lower total degree comes first
    assert compare_monomials((1, 0), (0, 2), w) == -1
    assert compare_monomials((2, 0), (0, 3), w) == 1  # weight 4 vs 3


def test_compare_monomials_antisymmetric():
    assert compare_monomials((1, 2), (2, 1)) == -compare_monomials((2, 1), (1, 2))
    assert compare_monomials((1, 2), (1, 2)) == 0


def test_helpers():
    assert total_degree((2, 0, 3)) == 5
    assert factorial((3, 2)) == 12
    assert exponent_sub((2, 2), (1, 0)) == (1, 2)
    assert exponent_sub((1, 0), (0, 1)) is None


def test_system_shape_checks():
    with pytest.raises(ValueError):
        PolySystem(1, ())
    with pytest.raises(DimensionMismatchError):
        PolySystem(2, (Polynomial.variable(1, 0),))


def test_jacobian_at():
    F = PolySystem(2, (Polynomial(2, {(2, 0): 1, (0, 1): 1}),))  # x^2 + y
    J = F.jacobian_at([3, 5])
    assert np.allclose(J, [[6, 1]])


def test_jacobian_rank_zero_system():
    # all first partials vanish at the origin
    F = PolySystem(
        2,
        (
            Polynomial(2, {(1, 1): 1}),
            Polynomial(2, {(2, 0): 1, (0, 2): -1}),
            Polynomial(2, {(0, 4): 1}),
        ),
    )
    assert np.allclose(F.jacobian_at([0, 0]), 0)


def test_residual_is_relative():
    F = PolySystem(1, (Polynomial(1, {(1,): 1e8}),))
    assert F.residual([1e-9]) == pytest.approx(1e-9 * 1e8 / 1e8)
