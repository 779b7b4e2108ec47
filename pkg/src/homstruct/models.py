"""The model spaces S²×R and H²×R, their isometries and closed-form structures.

Charts:

- S²×R: spherical ``(θ, φ, y)``, ``x¹ = sinθ cosφ, x² = sinθ sinφ, x³ = cosθ``,
  origin ``(π/2, 0, 0) ↔ (1, 0, 0, 0)``.  There ``∂φ = ∂x²`` and ``∂θ = -∂x³``.
- H²×R: upper half plane ``(x, y, z)``, ``y > 0``, origin ``(0, 1, 0) ↔ (i, 0)``.

SO(3)×R acts on the hyperquadric through row vectors, ``(x, y) -> (x A, y + s)``
for ``diag(A, e^s)``; with this reading the fundamental fields at the origin
are ``τ(u2) = ∂x²``, ``τ(u3) = -∂x³``, ``τ(e) = ∂y``.  SL(2,R)×R acts by
Möbius maps times translation, and the solvable group by left multiplication
``(x, y, z)·(x', y', z') = (x + y x', y y', z + z')``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .diffgeo import (
    Chart,
    MetricField,
    TensorField,
    coordinate_form,
    tensor_product,
    wedge_area_form,
)
from .errors import LabelMismatch, OutsideDomain
from .matlie import AlgebraId, as_coeffs, builtin_basis, matrix_exp

JAC_STEP = 1e-5

COSET_S2 = "SO(3)×ℝ/SO(2)"
COSET_SL2 = "SL(2,ℝ)×ℝ/SO(2)"
COSET_SOLV = "H²×ℝ/{Id}"


@dataclass(frozen=True, eq=False)
class ModelSpace:
    name: str
    chart: Chart
    metric: MetricField
    algebra_id: AlgebraId
    h_basis: tuple
    coset: str
    act: Callable[..., np.ndarray]
    generator: Callable[[Sequence], np.ndarray]
    random_group_element: Callable[[np.random.Generator], np.ndarray]
    transitive_element: Callable[[np.ndarray], np.ndarray]
    display_labels: tuple[str, str, str]
    display_frame: np.ndarray
    frame: Optional[Callable[[np.ndarray], np.ndarray]] = None
    embedding: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @property
    def origin(self) -> np.ndarray:
        return np.asarray(self.chart.origin, dtype=float)


def _unwrap(phi: float, near: Optional[float]) -> float:
    if near is None:
        return phi
    return phi + 2 * np.pi * np.round((near - phi) / (2 * np.pi))


# ---------------------------------------------------------------------------
# S² × R


def _s2_embed(p):
    th, ph, y = p
    return np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th), y])


def _s2_chart_point(x, y, near=None):
    th = float(np.arccos(np.clip(x[2], -1.0, 1.0)))
    ph = float(np.arctan2(x[1], x[0]))
    ph = _unwrap(ph, None if near is None else near[1])
    return np.array([th, ph, y])


def _s2_metric(p):
    return np.diag([1.0, np.sin(p[0]) ** 2, 1.0])


def _s2_christoffel(p):
    th = p[0]
    g = np.zeros((3, 3, 3))
    g[0, 1, 1] = -np.sin(th) * np.cos(th)
    g[1, 0, 1] = g[1, 1, 0] = np.cos(th) / np.sin(th)
    return g


def _s2_dchristoffel(p):
    th = p[0]
    d = np.zeros((3, 3, 3, 3))
    d[0, 0, 1, 1] = -np.cos(2 * th)
    d[0, 1, 0, 1] = d[0, 1, 1, 0] = -1.0 / np.sin(th) ** 2
    return d


def make_s2xr() -> ModelSpace:
    chart = Chart(
        name="S2xR",
        coords=("θ", "φ", "y"),
        contains=lambda p: bool(np.all(np.isfinite(p)) and 0.0 < p[0] < np.pi),
        origin=(np.pi / 2, 0.0, 0.0),
        box=((0.3, np.pi - 0.3), (0.0, 2 * np.pi), (-2.0, 2.0)),
        periods=(None, 2 * np.pi, None),
    )
    metric = MetricField(chart, _s2_metric, _s2_christoffel, _s2_dchristoffel)
    table = builtin_basis(AlgebraId.SO3_R)

    def act(m, p, near=None):
        m = np.asarray(m, dtype=float)
        if m[3, 3] <= 0:
            raise ValueError("R-factor entry must be positive")
        x = _s2_embed(np.asarray(p, dtype=float))
        return _s2_chart_point(x[:3] @ m[:3, :3], x[3] + np.log(m[3, 3]), near)

    def generator(coeffs):
        return table.element(coeffs).as_float()

    def random_element(rng):
        c = np.concatenate([rng.uniform(-np.pi, np.pi, 3), rng.uniform(-2, 2, 1)])
        return matrix_exp(generator(c))

    def transitive_element(p):
        x = _s2_embed(p)[:3]
        ref = np.array([0.0, 0.0, 1.0]) if abs(x[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
        r2 = np.cross(ref, x)
        r2 /= np.linalg.norm(r2)
        a = np.vstack([x, r2, np.cross(x, r2)])
        m = np.eye(4)
        m[:3, :3] = a
        m[3, 3] = np.exp(p[2])
        return m

    return ModelSpace(
        name="S2xR",
        chart=chart,
        metric=metric,
        algebra_id=AlgebraId.SO3_R,
        h_basis=(as_coeffs((1, 0, 0, 0), 4),),
        coset=COSET_S2,
        act=act,
        generator=generator,
        random_group_element=random_element,
        transitive_element=transitive_element,
        display_labels=("∂x²", "∂x³", "∂y"),
        display_frame=np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]),
        embedding=_s2_embed,
    )


# ---------------------------------------------------------------------------
# H² × R


def _h2_metric(p):
    y = p[1]
    return np.diag([1.0 / y**2, 1.0 / y**2, 1.0])


def _h2_christoffel(p):
    y = p[1]
    g = np.zeros((3, 3, 3))
    g[1, 0, 0] = 1.0 / y
    g[0, 0, 1] = g[0, 1, 0] = -1.0 / y
    g[1, 1, 1] = -1.0 / y
    return g


def _h2_dchristoffel(p):
    y = p[1]
    d = np.zeros((3, 3, 3, 3))
    d[1, 1, 0, 0] = -1.0 / y**2
    d[1, 0, 0, 1] = d[1, 0, 1, 0] = 1.0 / y**2
    d[1, 1, 1, 1] = 1.0 / y**2
    return d


def _h2_chart() -> Chart:
    return Chart(
        name="H2xR",
        coords=("x", "y", "z"),
        contains=lambda p: bool(np.all(np.isfinite(p)) and p[1] > 0.0),
        origin=(0.0, 1.0, 0.0),
        box=((-2.0, 2.0), (0.2, 5.0), (-2.0, 2.0)),
    )


def _h2_metric_field(chart: Chart) -> MetricField:
    return MetricField(chart, _h2_metric, _h2_christoffel, _h2_dchristoffel)


def make_h2xr() -> ModelSpace:
    """H²×R as SL(2,R)×R/SO(2)."""
    chart = _h2_chart()
    table = builtin_basis(AlgebraId.SL2R_R)

    def act(m, p, near=None):
        m = np.asarray(m, dtype=float)
        if m[2, 2] <= 0:
            raise ValueError("R-factor entry must be positive")
        (a, b), (c, d) = m[:2, :2]
        w = complex(p[0], p[1])
        w2 = (a * w + b) / (c * w + d)
        return np.array([w2.real, w2.imag, p[2] + np.log(m[2, 2])])

    def generator(coeffs):
        return table.element(coeffs).as_float()

    def random_element(rng):
        return matrix_exp(generator(rng.uniform(-1, 1, 4)))

    def transitive_element(p):
        x, y, z = p
        s = np.sqrt(y)
        return np.array([[s, x / s, 0.0], [0.0, 1.0 / s, 0.0], [0.0, 0.0, np.exp(z)]])

    return ModelSpace(
        name="H2xR",
        chart=chart,
        metric=_h2_metric_field(chart),
        algebra_id=AlgebraId.SL2R_R,
        h_basis=(as_coeffs((1, 0, 0, 0), 4),),
        coset=COSET_SL2,
        act=act,
        generator=generator,
        random_group_element=random_element,
        transitive_element=transitive_element,
        display_labels=("∂x", "∂y", "∂z"),
        display_frame=np.eye(3),
    )


def solv_group_matrix(p) -> np.ndarray:
    x, y, z = p
    return np.array([[y, x, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, np.exp(z)]])


SOLV_GENERATORS = (
    np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),  # e1 = E12
    np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),  # e2 = E11
    np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]),  # e3 = E33
)


def solv_frame(p) -> np.ndarray:
    """Columns are the left-invariant fields ``e1 = y∂x, e2 = y∂y, e3 = ∂z``."""
    y = p[1]
    return np.diag([y, y, 1.0])


def make_h2xr_solv() -> ModelSpace:
    """H²×R as the solvable Riemannian group H²×R/{Id}."""
    chart = _h2_chart()

    def act(m, p, near=None):
        m = np.asarray(m, dtype=float)
        if abs(m[1, 0]) > 1e-12 or abs(m[1, 1] - 1.0) > 1e-12 or m[0, 0] <= 0:
            raise ValueError("not an element of the solvable group")
        q = m @ solv_group_matrix(p)
        return np.array([q[0, 1], q[0, 0], np.log(q[2, 2])])

    def generator(coeffs):
        c = [float(v) for v in as_coeffs(coeffs, 3)]
        return sum(ci * gi for ci, gi in zip(c, SOLV_GENERATORS))

    def random_element(rng):
        return solv_group_matrix(chart.sample(rng, 1)[0])

    return ModelSpace(
        name="H2xR",
        chart=chart,
        metric=_h2_metric_field(chart),
        algebra_id=AlgebraId.SOLV,
        h_basis=(),
        coset=COSET_SOLV,
        act=act,
        generator=generator,
        random_group_element=random_element,
        transitive_element=solv_group_matrix,
        display_labels=("e1", "e2", "e3"),
        display_frame=np.eye(3),
        frame=solv_frame,
    )


# ---------------------------------------------------------------------------
# isometries and pullbacks


@dataclass(frozen=True, eq=False)
class IsometryMap:
    name: str
    chart: Chart
    forward: Callable[[np.ndarray], np.ndarray]
    orientation: str
    closed_jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, p) -> np.ndarray:
        return self.forward(np.asarray(p, dtype=float))

    def jacobian(self, p, step: float = JAC_STEP) -> np.ndarray:
        """``J[i, a] = ∂φ^i / ∂p^a``."""
        p = np.asarray(p, dtype=float)
        if self.closed_jacobian is not None:
            return self.closed_jacobian(p)
        cols = []
        for a in range(3):
            e = np.zeros(3)
            e[a] = step
            d1 = self.chart.wrap(self(p + e) - self(p - e))
            d2 = self.chart.wrap(self(p + 2 * e) - self(p - 2 * e))
            cols.append((8.0 * d1 - d2) / (12.0 * step))
        return np.stack(cols, axis=1)


def group_isometry(model: ModelSpace, m: np.ndarray, name: str = "group element") -> IsometryMap:
    return IsometryMap(name, model.chart, lambda p: model.act(m, p), "preserving")


def _fixed(j: np.ndarray):
    return lambda p: j


def isometry_catalog(model: ModelSpace, seed: int = 2024) -> list[IsometryMap]:
    chart = model.chart
    proper = group_isometry(model, model.random_group_element(np.random.default_rng(seed)))
    motion = "rotation+translation" if model.name == "S2xR" else "motion+translation"
    cat = [
        IsometryMap("identity", chart, lambda p: p.copy(), "preserving", _fixed(np.eye(3))),
        IsometryMap(motion, chart, proper.forward, "preserving"),
    ]
    if model.name == "S2xR":
        cat += [
            IsometryMap("reflection", chart, lambda p: np.array([np.pi - p[0], p[1], p[2]]), "reversing",
                        _fixed(np.diag([-1.0, 1.0, 1.0]))),
            IsometryMap("flip", chart, lambda p: np.array([p[0], p[1], -p[2]]), "reversing",
                        _fixed(np.diag([1.0, 1.0, -1.0]))),
        ]
    else:
        cat += [
            IsometryMap("reflection", chart, lambda p: np.array([-p[0], p[1], p[2]]), "reversing",
                        _fixed(np.diag([-1.0, 1.0, 1.0]))),
            IsometryMap("flip", chart, lambda p: np.array([p[0], p[1], -p[2]]), "reversing",
                        _fixed(np.diag([1.0, 1.0, -1.0]))),
        ]
    return cat


def pullback_tensor(phi: IsometryMap, fld: TensorField, p) -> np.ndarray:
    """``(φ*S)(u, v, ...)|_p = S(dφ u, dφ v, ...)|_{φ(p)}`` for covariant ``S``."""
    if set(fld.index_pos) - {"d"}:
        raise ValueError("pullback_tensor expects a covariant field")
    p = np.asarray(p, dtype=float)
    q = phi(p)
    if not fld.chart.contains(q):
        raise OutsideDomain(f"φ({p}) = {q} leaves chart {fld.chart.name}")
    j = phi.jacobian(p)
    out = fld(q)
    for s in range(out.ndim):
        out = np.moveaxis(np.tensordot(j, out, axes=([0], [s])), 0, s)
    return out


def metric_pullback_residual(phi: IsometryMap, metric: MetricField, p) -> float:
    fld = TensorField(metric.chart, "dd", metric.components, "g")
    return float(np.max(np.abs(pullback_tensor(phi, fld, p) - metric(p))))


# ---------------------------------------------------------------------------
# named structures


@dataclass(frozen=True, eq=False)
class NamedStructure:
    model: ModelSpace
    label: str
    lam: float
    tensor: TensorField
    coset: str
    formula: str


_LABELS = {"T_lambda": "T_lambda", "lambda": "T_lambda", "T_solv": "T_solv", "solv": "T_solv"}


def normalize_label(label: str) -> str:
    try:
        return _LABELS[label]
    except KeyError:
        raise LabelMismatch(f"unknown structure label {label!r}") from None


def named_structure(model: ModelSpace, label: str = "T_lambda", lam: float = 1.0) -> NamedStructure:
    """Closed-form ``S = g(T_X Y, Z)`` of the classified structures.

    ``T_solv`` is attached to the solvable representation of H²×R whichever
    H²×R model is passed in.
    """
    label = normalize_label(label)
    chart, metric = model.chart, model.metric
    dv = wedge_area_form(metric, (0, 1), +1)
    if label == "T_solv":
        if model.name != "H2xR":
            raise LabelMismatch("T_solv exists only on H2xR")
        if model.algebra_id is not AlgebraId.SOLV:
            model = make_h2xr_solv()
            chart, metric = model.chart, model.metric
            dv = wedge_area_form(metric, (0, 1), +1)
        theta1 = coordinate_form(chart, 0, lambda p: 1.0 / p[1], "θ¹")
        tensor = tensor_product(theta1, dv, "θ¹⊗(θ¹∧θ²)")
        return NamedStructure(model, label, 0.0, tensor, COSET_SOLV, "θ¹⊗(θ¹∧θ²)")

    if model.algebra_id is AlgebraId.SOLV:
        model = make_h2xr()
        chart, metric = model.chart, model.metric
    lam = float(lam)
    line = "dy" if model.name == "S2xR" else "dz"
    surface = "S²" if model.name == "S2xR" else "H²"
    base = tensor_product(coordinate_form(chart, 2, None, line), dv)
    tensor = TensorField(chart, "ddd", lambda p: lam * base.fn(p), f"{lam}·{line}⊗dV")
    return NamedStructure(model, label, lam, tensor, model.coset, f"λ·{line}⊗dV_{{{surface}}}")
