"""Lie subspaces and structure tensors at the origin.

A Lie subspace m of g (complementary to the isotropy algebra h) is searched
among graphs of linear maps ``L: m0 -> h`` over a fixed complement ``m0``.
For connected H the Ad(H)-invariance condition ``[h, m] ⊆ m`` is linear in
the entries of ``L`` and is solved exactly over Q.

The structure tensor at the origin is returned in the m-basis, covariant
convention ``S[a, b, c] = g(T_{X_a} X_b, X_c)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    ActionUndefined,
    AlgebraMismatch,
    DegenerateSystem,
    NoComplement,
    NotReductive,
    NotSubalgebra,
)
from .matlie import (
    AlgebraId,
    BasisTable,
    as_coeffs,
    bracket_abstract,
    builtin_basis,
    matrix_exp,
    rank,
    rref,
    solve_affine,
    solve_exact,
)

TAU_STEP = 1e-5
TAU_WARN = 1e-7

_SUBSCRIPTS = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")

Coeffs = tuple[Fraction, ...]


def _coords(basis: Sequence[Coeffs], y: Sequence) -> Coeffs:
    n = len(y)
    a = [[basis[j][r] for j in range(len(basis))] for r in range(n)]
    sol = solve_exact(a, list(y))
    if sol is None:
        raise NoComplement("vector outside span of basis")
    return sol


def _in_span(basis: Sequence[Coeffs], y: Sequence) -> bool:
    if not any(y):
        return True
    if not basis:
        return False
    return rank(list(basis) + [list(y)]) == rank(basis)


def format_combo(names: Sequence[str], coeffs: Sequence) -> str:
    """``(1/2, 0, 0, 1) -> 'e+1/2·u1'``; later basis vectors are written first."""
    terms = []
    for i in reversed(range(len(names))):
        c = coeffs[i]
        if c == 0:
            continue
        mag = abs(c)
        body = names[i] if mag == 1 else f"{mag}·{names[i]}"
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += sign + body
    return out


@dataclass
class ReductiveDecomposition:
    algebra_id: AlgebraId
    h_basis: tuple[Coeffs, ...]
    m_basis: tuple[Coeffs, ...]
    params: dict[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.algebra_id = AlgebraId(self.algebra_id)
        n = self.table.dim
        self.h_basis = tuple(as_coeffs(v, n) for v in self.h_basis)
        self.m_basis = tuple(as_coeffs(v, n) for v in self.m_basis)

    @property
    def table(self) -> BasisTable:
        return builtin_basis(self.algebra_id)

    def bracket(self, x, y) -> Coeffs:
        return bracket_abstract(self.table, x, y)

    def split(self, y) -> tuple[Coeffs, Coeffs]:
        """Coordinates of ``y`` along (m_basis, h_basis)."""
        c = _coords(self.m_basis + self.h_basis, y)
        k = len(self.m_basis)
        return c[:k], c[k:]

    def violations(self) -> list[str]:
        out = []
        n = self.table.dim
        if len(self.m_basis) + len(self.h_basis) != n or rank(self.m_basis + self.h_basis) != n:
            return ["m ⊕ h is not a basis of g"]
        for i, a in enumerate(self.h_basis):
            for b in self.h_basis[i + 1:]:
                if not _in_span(self.h_basis, self.bracket(a, b)):
                    out.append("h is not a subalgebra")
        for x in self.m_basis:
            for w in self.h_basis:
                _, hpart = self.split(self.bracket(x, w))
                if any(hpart):
                    out.append("[m, h] has a component along h")
        return out

    def labels(self) -> list[str]:
        return [format_combo(self.table.names, v) for v in self.m_basis]


@dataclass
class SubspaceFamily:
    """Affine family of Lie subspaces ``span{b_i + sum_r L[i, r] h_r}``."""

    algebra_id: AlgebraId
    h_basis: tuple[Coeffs, ...]
    complement: tuple[Coeffs, ...]
    unknowns: tuple[str, ...]
    solution: dict[int, tuple[Fraction, dict[int, Fraction]]]
    free_params: tuple[str, ...]

    @property
    def forced_zero(self) -> tuple[str, ...]:
        return tuple(
            self.unknowns[p] for p, (const, deps) in sorted(self.solution.items()) if const == 0 and not deps
        )

    def unknown_values(self, params: Mapping[str, object] | None = None) -> tuple[Fraction, ...]:
        params = dict(params or {})
        unknown = set(params) - set(self.free_params)
        if unknown:
            raise KeyError(f"not free parameters: {sorted(unknown)}")
        free_vals = {
            self.unknowns.index(name): as_coeffs([params.get(name, 0)], 1)[0] for name in self.free_params
        }
        vals = []
        for j in range(len(self.unknowns)):
            if j in free_vals:
                vals.append(free_vals[j])
            else:
                const, deps = self.solution[j]
                vals.append(const + sum((c * free_vals[f] for f, c in deps.items()), Fraction(0)))
        return tuple(vals)

    def instantiate(self, params: Mapping[str, object] | None = None) -> ReductiveDecomposition:
        vals = self.unknown_values(params)
        k = len(self.h_basis)
        m_basis = []
        for i, b in enumerate(self.complement):
            v = list(b)
            for r, h in enumerate(self.h_basis):
                lam = vals[i * k + r]
                v = [vi + lam * hi for vi, hi in zip(v, h)]
            m_basis.append(tuple(v))
        named = {name: vals[self.unknowns.index(name)] for name in self.free_params}
        return ReductiveDecomposition(self.algebra_id, self.h_basis, tuple(m_basis), named)


def _unknown_name(m_name: str, h_name: str, single_h: bool) -> str:
    if not single_h:
        return f"λ[{m_name},{h_name}]"
    digits = "".join(ch for ch in m_name if ch.isdigit())
    return "λ" + digits.translate(_SUBSCRIPTS)


def enumerate_lie_subspaces(algebra_id, h_basis: Sequence[Sequence]) -> SubspaceFamily:
    table = builtin_basis(algebra_id)
    n = table.dim
    h = tuple(as_coeffs(v, n) for v in h_basis)
    k = len(h)
    if k and rank(h) != k:
        raise NoComplement("h_basis is not linearly independent")
    for i, a in enumerate(h):
        for b in h[i + 1:]:
            if not _in_span(h, bracket_abstract(table, a, b)):
                raise NotSubalgebra("h_basis does not span a subalgebra")

    pivots = rref(h)[1] if k else []
    comp_idx = [j for j in range(n) if j not in pivots]
    complement = tuple(tuple(Fraction(int(i == j)) for i in range(n)) for j in comp_idx)
    full = complement + h
    nm = len(complement)

    def split(y):
        c = _coords(full, y)
        return c[:nm], c[nm:]

    h_names = [format_combo(table.names, v) for v in h]
    unknowns = tuple(
        _unknown_name(table.names[comp_idx[i]], h_names[r], k == 1) for i in range(nm) for r in range(k)
    )
    if len(set(unknowns)) != len(unknowns):
        unknowns = tuple(f"λ[{table.names[comp_idx[i]]},{h_names[r]}]" for i in range(nm) for r in range(k))

    # h-coordinates of [h_s, h_r]
    hh = [[split(bracket_abstract(table, hs, hr))[1] for hr in h] for hs in h]
    rows, rhs = [], []
    for s, hs in enumerate(h):
        for i, b in enumerate(complement):
            p, q = split(bracket_abstract(table, hs, b))
            for rp in range(k):
                row = [Fraction(0)] * (nm * k)
                for r in range(k):
                    row[i * k + r] += hh[s][r][rp]
                for j in range(nm):
                    row[j * k + rp] -= p[j]
                rows.append(row)
                rhs.append(-q[rp])

    if rows:
        res = solve_affine(rows, rhs)
        if res is None:
            raise DegenerateSystem("Ad(H)-invariance admits no complement")
        solution, _, free = res
    else:
        solution, free = {}, list(range(nm * k))
    return SubspaceFamily(
        algebra_id=AlgebraId(algebra_id),
        h_basis=h,
        complement=complement,
        unknowns=unknowns,
        solution=solution,
        free_params=tuple(unknowns[j] for j in free),
    )


@dataclass
class OriginTensor:
    """``components[a, b, c] = g(T_{X_a} X_b, X_c)`` at the origin in the m-basis."""

    components: np.ndarray
    labels: tuple[str, ...]
    decomposition: ReductiveDecomposition

    def as_float(self) -> np.ndarray:
        return self.components.astype(float)

    def skew_defect(self):
        s = self.components
        return max(abs(v) for v in np.ravel(s + s.transpose(0, 2, 1)))


def frame_bracket_sign(dec: ReductiveDecomposition) -> int:
    """Sign attached to the starred brackets in the origin formula.

    With trivial isotropy the frame is left-invariant and brackets enter as
    they are.  For a proper coset the frame is realised by fundamental fields;
    the sign is fixed so that the result has the standard orientation
    ``T_{∂y}∂x² = λ∂x³`` on S²×R.
    """
    return 1 if not dec.h_basis else -1


def structure_tensor_at_origin(dec: ReductiveDecomposition, metric_at_o=None) -> OriginTensor:
    bad = dec.violations()
    if bad:
        raise NotReductive("; ".join(sorted(set(bad))))
    dim = len(dec.m_basis)
    if metric_at_o is None:
        gm = np.full((dim, dim), Fraction(0), dtype=object)
        for i in range(dim):
            gm[i, i] = Fraction(1)
    else:
        gm = np.asarray(metric_at_o)
        if gm.shape != (dim, dim):
            raise ValueError("metric_at_o must be square on m")
        if gm.dtype != object:
            gf = gm.astype(float)
            if not np.allclose(gf, gf.T) or np.min(np.linalg.eigvalsh(gf)) <= 0:
                raise ValueError("metric_at_o must be symmetric positive definite")

    # brk[a, b, :] = m-coordinates of [X_a, X_b]
    brk = np.empty((dim, dim, dim), dtype=object)
    for a in range(dim):
        for b in range(dim):
            brk[a, b, :] = dec.split(dec.bracket(dec.m_basis[a], dec.m_basis[b]))[0]

    def ip(a, b, c):
        return sum(brk[a, b, d] * gm[d, c] for d in range(dim))

    sigma = frame_bracket_sign(dec)
    s = np.empty((dim, dim, dim), dtype=object)
    for a in range(dim):
        for b in range(dim):
            for c in range(dim):
                s[a, b, c] = Fraction(sigma, 2) * (ip(a, b, c) - ip(b, c, a) + ip(c, a, b))
    if gm.dtype != object:
        s = s.astype(float)
    return OriginTensor(s, tuple(dec.labels()), dec)


def tau_map(algebra_id, x: Sequence, model, step: float = TAU_STEP) -> np.ndarray:
    """Fundamental field of ``x`` at the model's origin, in chart coordinates.

    Central difference of ``t -> exp(t x)·o`` with Richardson extrapolation
    between steps ``step`` and ``step/2``.
    """
    if AlgebraId(algebra_id) != model.algebra_id:
        raise AlgebraMismatch(f"model {model.name} carries {model.algebra_id.value}")
    gen = model.generator(x)
    o = np.asarray(model.origin, dtype=float)

    def orbit(t):
        p = model.act(matrix_exp(t * gen), o, near=o)
        if not model.chart.contains(p):
            raise ActionUndefined(f"exp({t:g} X)·o leaves the chart")
        return p

    def central(h):
        return (orbit(h) - orbit(-h)) / (2 * h)

    d1 = central(step)
    d2 = central(step / 2)
    if np.max(np.abs(d2 - d1)) > TAU_WARN:
        warnings.warn("tau_map: step and half-step differences disagree", RuntimeWarning, stacklevel=2)
    return d2 + (d2 - d1) / 3
