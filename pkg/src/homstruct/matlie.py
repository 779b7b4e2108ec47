"""Small matrix Lie algebras with exact structure constants.

Three algebras are built in:

``SO3_R``   so(3) + R inside gl(4), basis u1, u2, u3, e
``SL2R_R``  sl(2,R) + R inside gl(3), basis v1, v2, v3, e
``SOLV``    the solvable algebra with [e1, e2] = -e1, given by its table only

Matrices of basis elements hold :class:`fractions.Fraction` entries so that
commutators and structure constants compare exactly.  Floats appear only in
:func:`matrix_exp` and downstream geometry.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    AlgebraMismatch,
    ClosureViolation,
    DegenerateSystem,
    DimensionMismatch,
    NonConvergence,
)

HALF = Fraction(1, 2)
CLOSURE_TOL = 1e-12
EXP_ORDER = 12
EXP_MAX_SQUARINGS = 30


class AlgebraId(str, enum.Enum):
    SO3_R = "SO3_R"
    SL2R_R = "SL2R_R"
    SOLV = "SOLV"


MATRIX_DIM = {AlgebraId.SO3_R: 4, AlgebraId.SL2R_R: 3, AlgebraId.SOLV: 3}


def unit(n: int, i: int, j: int) -> np.ndarray:
    """Exact matrix unit E_ij (1-based, as written in the literature)."""
    m = np.full((n, n), Fraction(0), dtype=object)
    m[i - 1, j - 1] = Fraction(1)
    return m


def _is_exact(m: np.ndarray) -> bool:
    return m.dtype == object


def _close_to_zero(values, exact: bool) -> bool:
    if exact:
        return all(v == 0 for v in np.ravel(values))
    return bool(np.all(np.abs(np.asarray(values, dtype=float)) <= CLOSURE_TOL))


def in_algebra(algebra_id: AlgebraId, m: np.ndarray) -> bool:
    """Membership test for the block-diagonal matrix realisations."""
    algebra_id = AlgebraId(algebra_id)
    n = MATRIX_DIM[algebra_id]
    if m.shape != (n, n):
        return False
    exact = _is_exact(m)
    if not exact and not np.all(np.isfinite(m.astype(float))):
        return False
    if algebra_id is AlgebraId.SO3_R:
        blk = m[:3, :3]
        return (
            _close_to_zero(blk + blk.T, exact)
            and _close_to_zero(m[:3, 3], exact)
            and _close_to_zero(m[3, :3], exact)
        )
    if algebra_id is AlgebraId.SL2R_R:
        return (
            _close_to_zero([m[0, 0] + m[1, 1]], exact)
            and _close_to_zero(m[:2, 2], exact)
            and _close_to_zero(m[2, :2], exact)
        )
    # SOLV: span{E12, E11, E33}, the tangent algebra of the upper-triangular model
    mask = np.ones((3, 3), dtype=bool)
    mask[0, 1] = mask[0, 0] = mask[2, 2] = False
    return _close_to_zero(m[mask], exact)


@dataclass(frozen=True, eq=False)
class LieAlgebraElement:
    algebra_id: AlgebraId
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "algebra_id", AlgebraId(self.algebra_id))
        if not in_algebra(self.algebra_id, self.matrix):
            raise ClosureViolation(f"matrix is not in {self.algebra_id.value}")

    def __eq__(self, other):
        if not isinstance(other, LieAlgebraElement):
            return NotImplemented
        if self.algebra_id != other.algebra_id:
            return False
        if _is_exact(self.matrix) and _is_exact(other.matrix):
            return bool(np.all(self.matrix == other.matrix))
        return bool(np.allclose(self.as_float(), other.as_float(), rtol=0, atol=CLOSURE_TOL))

    __hash__ = None

    def __add__(self, other: LieAlgebraElement) -> LieAlgebraElement:
        _same_algebra(self, other)
        return LieAlgebraElement(self.algebra_id, self.matrix + other.matrix)

    def __sub__(self, other: LieAlgebraElement) -> LieAlgebraElement:
        _same_algebra(self, other)
        return LieAlgebraElement(self.algebra_id, self.matrix - other.matrix)

    def __neg__(self) -> LieAlgebraElement:
        return LieAlgebraElement(self.algebra_id, -self.matrix)

    def __mul__(self, c) -> LieAlgebraElement:
        if isinstance(c, float) and _is_exact(self.matrix):
            c = Fraction(c)
        return LieAlgebraElement(self.algebra_id, self.matrix * c)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return _close_to_zero(self.matrix, _is_exact(self.matrix))

    def as_float(self) -> np.ndarray:
        return self.matrix.astype(float)


def _same_algebra(a: LieAlgebraElement, b: LieAlgebraElement) -> None:
    if a.algebra_id != b.algebra_id:
        raise AlgebraMismatch(f"{a.algebra_id.value} vs {b.algebra_id.value}")


def bracket(a: LieAlgebraElement, b: LieAlgebraElement) -> LieAlgebraElement:
    """Matrix commutator ``ab - ba``."""
    _same_algebra(a, b)
    if a.algebra_id is AlgebraId.SOLV:
        raise AlgebraMismatch("SOLV brackets go through bracket_abstract")
    c = a.matrix.dot(b.matrix) - b.matrix.dot(a.matrix)
    if not in_algebra(a.algebra_id, c):
        raise ClosureViolation(f"commutator left {a.algebra_id.value}")
    return LieAlgebraElement(a.algebra_id, c)


@dataclass(frozen=True, eq=False)
class BasisTable:
    """Ordered basis with structure constants ``c[i, j, k]`` of ``[b_i, b_j] = sum_k c[i,j,k] b_k``.

    ``elements`` is ``None`` for SOLV, which carries no matrix model here.
    The basis is declared orthonormal.
    """

    algebra_id: AlgebraId
    names: tuple[str, ...]
    elements: tuple[LieAlgebraElement, ...] | None
    constants: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.names)

    def element(self, coeffs: Sequence) -> LieAlgebraElement:
        if self.elements is None:
            raise AlgebraMismatch(f"{self.algebra_id.value} has no matrix model")
        coeffs = as_coeffs(coeffs, self.dim)
        m = sum((c * b.matrix for c, b in zip(coeffs, self.elements)), np.zeros_like(self.elements[0].matrix))
        return LieAlgebraElement(self.algebra_id, m)

    def coordinates(self, x: LieAlgebraElement) -> tuple[Fraction, ...]:
        """Exact coefficients of a matrix element in this basis."""
        if self.elements is None:
            raise AlgebraMismatch(f"{self.algebra_id.value} has no matrix model")
        cols = [list(b.matrix.ravel()) for b in self.elements]
        a = [[cols[j][r] for j in range(self.dim)] for r in range(len(cols[0]))]
        sol = solve_exact(a, list(x.matrix.ravel()))
        if sol is None:
            raise ClosureViolation("element is outside the span of the basis")
        return sol

    def inner(self) -> np.ndarray:
        return identity_exact(self.dim)

    def jacobi_residual(self) -> Fraction:
        """Largest |cyclic sum| of the Jacobi identity over all basis triples."""
        c = self.constants
        n = self.dim
        worst = Fraction(0)
        for i in range(n):
            for j in range(n):
                for l in range(n):
                    for m in range(n):
                        s = sum(
                            c[i, j, k] * c[k, l, m] + c[j, l, k] * c[k, i, m] + c[l, i, k] * c[k, j, m]
                            for k in range(n)
                        )
                        worst = max(worst, abs(s))
        return worst


def as_coeffs(x: Sequence, n: int) -> tuple[Fraction, ...]:
    x = tuple(x)
    if len(x) != n:
        raise DimensionMismatch(f"expected {n} coefficients, got {len(x)}")
    return tuple(_frac(v) for v in x)


def _frac(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, (float, np.floating)):
        if not math.isfinite(v):
            raise ValueError("coefficients must be finite")
        return Fraction(float(v))
    return Fraction(v)


def bracket_abstract(table: BasisTable, x: Sequence, y: Sequence) -> tuple[Fraction, ...]:
    """Bilinear extension of the structure constants to coefficient vectors."""
    n = table.dim
    x = as_coeffs(x, n)
    y = as_coeffs(y, n)
    c = table.constants
    return tuple(
        sum((x[i] * y[j] * c[i, j, k] for i in range(n) for j in range(n) if x[i] and y[j]), Fraction(0))
        for k in range(n)
    )


def identity_exact(n: int) -> np.ndarray:
    m = np.full((n, n), Fraction(0), dtype=object)
    for i in range(n):
        m[i, i] = Fraction(1)
    return m


def _table(n: int, brackets: dict[tuple[int, int], dict[int, Fraction]]) -> np.ndarray:
    c = np.full((n, n, n), Fraction(0), dtype=object)
    for (i, j), out in brackets.items():
        for k, v in out.items():
            c[i, j, k] = Fraction(v)
            c[j, i, k] = -Fraction(v)
    return c


def _so3_r() -> BasisTable:
    u1 = unit(4, 2, 3) - unit(4, 3, 2)
    u2 = unit(4, 1, 2) - unit(4, 2, 1)
    u3 = unit(4, 3, 1) - unit(4, 1, 3)
    e = unit(4, 4, 4)
    els = tuple(LieAlgebraElement(AlgebraId.SO3_R, m) for m in (u1, u2, u3, e))
    c = _table(4, {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}})
    return BasisTable(AlgebraId.SO3_R, ("u1", "u2", "u3", "e"), els, c)


def _sl2r_r() -> BasisTable:
    v1 = HALF * (unit(3, 2, 1) - unit(3, 1, 2))
    v2 = HALF * (unit(3, 1, 2) + unit(3, 2, 1))
    v3 = HALF * (unit(3, 2, 2) - unit(3, 1, 1))
    e = unit(3, 3, 3)
    els = tuple(LieAlgebraElement(AlgebraId.SL2R_R, m) for m in (v1, v2, v3, e))
    c = _table(4, {(0, 1): {2: 1}, (1, 2): {0: -1}, (2, 0): {1: 1}})
    return BasisTable(AlgebraId.SL2R_R, ("v1", "v2", "v3", "e"), els, c)


def _solv() -> BasisTable:
    c = _table(3, {(0, 1): {0: -1}})
    return BasisTable(AlgebraId.SOLV, ("e1", "e2", "e3"), None, c)


_BUILDERS = {AlgebraId.SO3_R: _so3_r, AlgebraId.SL2R_R: _sl2r_r, AlgebraId.SOLV: _solv}


def builtin_basis(algebra_id) -> BasisTable:
    return _BUILDERS[AlgebraId(algebra_id)]()


# ---------------------------------------------------------------------------
# exact linear algebra over Q


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals; returns (matrix, pivot columns)."""
    a = [[_frac(v) for v in row] for row in rows]
    if not a:
        return [], []
    ncols = len(a[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        pr = next((i for i in range(r, len(a)) if a[i][col] != 0), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        p = a[r][col]
        a[r] = [v / p for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == len(a):
            break
    return a, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def solve_affine(a: Sequence[Sequence], b: Sequence):
    """General solution of ``a x = b`` over Q.

    Returns ``(particular, pivots, free)`` where ``particular[p]`` maps a pivot
    variable to ``(constant, {free_var: coeff})``, or ``None`` when inconsistent.
    """
    ncols = len(a[0]) if a else 0
    aug = [list(row) + [bv] for row, bv in zip(a, b)]
    red, piv = rref(aug)
    if ncols in piv:
        return None
    free = [j for j in range(ncols) if j not in piv]
    expr = {}
    for row, p in zip(red, piv):
        expr[p] = (row[ncols], {f: -row[f] for f in free if row[f] != 0})
    return expr, piv, free


def solve_exact(a: Sequence[Sequence], b: Sequence) -> tuple[Fraction, ...] | None:
    """Unique solution of ``a x = b`` or ``None``; raises on an underdetermined system."""
    res = solve_affine(a, b)
    if res is None:
        return None
    expr, _, free = res
    if free:
        raise DegenerateSystem("system has free variables")
    n = len(a[0])
    return tuple(expr[j][0] for j in range(n))


# ---------------------------------------------------------------------------
# exponential


def matrix_exp(a, tol: float = 1e-15) -> np.ndarray:
    """Scaling-and-squaring Taylor exponential of a small square matrix.

    The number of squarings ``s`` is the least one for which the order-12
    remainder bound at ``a / 2**s`` drops below ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch("matrix_exp needs a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    norm = float(np.max(np.sum(np.abs(a), axis=0))) if a.size else 0.0
    s = 0
    while True:
        r = norm / 2**s
        if r < 1.0:
            bound = r ** (EXP_ORDER + 1) / math.factorial(EXP_ORDER + 1) / (1.0 - r / (EXP_ORDER + 2))
            if bound < tol:
                break
        s += 1
        if s > EXP_MAX_SQUARINGS:
            raise NonConvergence(f"norm {norm:g} needs more than {EXP_MAX_SQUARINGS} squarings")
    x = a / 2**s
    n = a.shape[0]
    out = np.eye(n)
    for k in range(EXP_ORDER, 0, -1):
        out = np.eye(n) + x @ out / k
    for _ in range(s):
        out = out @ out
    return out
