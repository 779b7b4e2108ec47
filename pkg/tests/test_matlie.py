from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from homstruct.errors import AlgebraMismatch, ClosureViolation, DimensionMismatch, NonConvergence
from homstruct.matlie import (
    AlgebraId,
    LieAlgebraElement,
    bracket,
    bracket_abstract,
    builtin_basis,
    matrix_exp,
    rank,
    solve_affine,
    solve_exact,
    unit,
)

SO3 = builtin_basis(AlgebraId.SO3_R)
SL2 = builtin_basis(AlgebraId.SL2R_R)
SOLV = builtin_basis(AlgebraId.SOLV)
u1, u2, u3, e4 = SO3.elements
v1, v2, v3, e3 = SL2.elements

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=8)


def test_basis_matrix_entries():
    assert u1.matrix[1, 2] == 1 and u1.matrix[2, 1] == -1
    assert v1.matrix[1, 0] == Fraction(1, 2) and v1.matrix[0, 1] == Fraction(-1, 2)
    assert v3.matrix[0, 0] == Fraction(-1, 2) and v3.matrix[1, 1] == Fraction(1, 2)
    assert e4.matrix[3, 3] == 1 and e3.matrix[2, 2] == 1


def test_so3_brackets():
    assert bracket(u1, u2) == u3
    assert bracket(u2, u3) == u1
    assert bracket(u3, u1) == u2
    for u in (u1, u2, u3):
        assert bracket(u, e4).is_zero()
    assert bracket(u1, u1).is_zero()


def test_sl2_brackets():
    assert bracket(v1, v2) == v3
    assert bracket(v2, v3) == -v1
    assert bracket(v3, v1) == v2
    for v in (v1, v2, v3):
        assert bracket(v, e3).is_zero()


@pytest.mark.parametrize("table", [SO3, SL2], ids=["so3", "sl2"])
def test_commutators_match_constants_exactly(table):
    n = table.dim
    for i in range(n):
        for j in range(n):
            got = table.coordinates(bracket(table.elements[i], table.elements[j]))
            assert got == tuple(table.constants[i, j, :])


@pytest.mark.parametrize("table", [SO3, SL2, SOLV], ids=["so3", "sl2", "solv"])
def test_constants_antisymmetric_and_jacobi(table):
    c = table.constants
    assert all(c[i, j, k] == -c[j, i, k] for i, j, k in np.ndindex(*c.shape))
    assert table.jacobi_residual() == 0
    assert all(isinstance(v, Fraction) for v in c.ravel())


def test_solv_table():
    assert bracket_abstract(SOLV, [1, 0, 0], [0, 1, 0]) == (-1, 0, 0)
    assert bracket_abstract(SOLV, [1, 0, 0], [0, 0, 1]) == (0, 0, 0)
    assert bracket_abstract(SOLV, [0, 1, 0], [0, 0, 1]) == (0, 0, 0)


@given(st.lists(rationals, min_size=3, max_size=3), st.lists(rationals, min_size=3, max_size=3),
       st.lists(rationals, min_size=3, max_size=3), rationals)
def test_bracket_abstract_bilinear_antisymmetric(x, y, z, a):
    assert bracket_abstract(SOLV, x, x) == (0, 0, 0)
    xy = bracket_abstract(SOLV, x, y)
    assert bracket_abstract(SOLV, y, x) == tuple(-c for c in xy)
    lhs = bracket_abstract(SOLV, [a * xi + zi for xi, zi in zip(x, z)], y)
    rhs = tuple(a * p + q for p, q in zip(xy, bracket_abstract(SOLV, z, y)))
    assert lhs == rhs


@given(st.lists(rationals, min_size=4, max_size=4), st.lists(rationals, min_size=4, max_size=4))
def test_abstract_bracket_agrees_with_commutator(x, y):
    for table in (SO3, SL2):
        via_matrix = table.coordinates(bracket(table.element(x), table.element(y)))
        assert via_matrix == bracket_abstract(table, x, y)


def test_bracket_errors():
    with pytest.raises(AlgebraMismatch):
        bracket(u1, v1)
    with pytest.raises(DimensionMismatch):
        bracket_abstract(SOLV, [1, 0], [0, 1, 0])
    with pytest.raises(ClosureViolation):
        LieAlgebraElement(AlgebraId.SO3_R, unit(4, 1, 2))
    with pytest.raises(ClosureViolation):
        LieAlgebraElement(AlgebraId.SL2R_R, unit(3, 1, 1))
    with pytest.raises(AlgebraMismatch):
        SOLV.element([1, 0, 0])


def test_solv_matrix_invariant():
    LieAlgebraElement(AlgebraId.SOLV, unit(3, 1, 2) + unit(3, 1, 1))
    with pytest.raises(ClosureViolation):
        LieAlgebraElement(AlgebraId.SOLV, unit(3, 2, 1))


# -- exp --------------------------------------------------------------------


def rotation_23(t):
    m = np.eye(4)
    m[1:3, 1:3] = [[np.cos(t), np.sin(t)], [-np.sin(t), np.cos(t)]]
    return m


def test_exp_zero():
    assert np.array_equal(matrix_exp(np.zeros((4, 4))), np.eye(4))


@pytest.mark.parametrize("t", [0.1, 1.0])
def test_exp_rotation_closed_form(t):
    np.testing.assert_allclose(matrix_exp(t * u1.as_float()), rotation_23(t), atol=1e-14)


def test_exp_diagonal_unit():
    np.testing.assert_allclose(matrix_exp(e4.as_float()), np.diag([1, 1, 1, np.e]), rtol=1e-14)


@settings(max_examples=60)
@given(st.integers(0, 7), st.floats(-2, 2))
def test_exp_inverse_pair(idx, t):
    b = (SO3.elements + SL2.elements)[idx].as_float()
    n = b.shape[0]
    np.testing.assert_allclose(matrix_exp(t * b) @ matrix_exp(-t * b), np.eye(n), atol=1e-12)


@settings(max_examples=40)
@given(st.lists(st.floats(-3, 3), min_size=16, max_size=16))
def test_exp_against_scipy(entries):
    a = np.array(entries).reshape(4, 4)
    ref = scipy.linalg.expm(a)
    np.testing.assert_allclose(matrix_exp(a), ref, rtol=1e-11, atol=1e-11)


def test_exp_errors():
    with pytest.raises(NonConvergence):
        matrix_exp(np.full((3, 3), 1e12))
    with pytest.raises(ValueError):
        matrix_exp(np.eye(3), tol=0)
    with pytest.raises(ValueError):
        matrix_exp(np.array([[np.nan]]))


# -- exact linear algebra ---------------------------------------------------


def test_solve_exact_and_affine():
    a = [[2, 1], [1, 3]]
    assert solve_exact(a, [3, 4]) == (1, 1)
    assert solve_exact([[1, 1], [1, 1]], [1, 2]) is None
    expr, piv, free = solve_affine([[1, 1, 0]], [2])
    assert piv == [0] and free == [1, 2]
    assert expr[0] == (2, {1: -1})
    assert rank([[1, 2], [2, 4]]) == 1
