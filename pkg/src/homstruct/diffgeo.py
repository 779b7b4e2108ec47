"""Chart-based metric geometry on three-dimensional coordinate patches.

Fields are closures ``point -> component array``.  Index layout follows the
``index_pos`` string of each field (``"ddd"`` for a covariant 3-tensor,
``"udd"`` for a (1,2) tensor, ...); indices are never reordered.

Conventions:

- ``Γ[k, i, j] = Γ^k_ij`` with ``∇_{∂i} ∂j = Γ^k_ij ∂k``
- ``R[l, k, i, j]`` with ``R(∂i, ∂j) ∂k = R^l_kij ∂l``,
  ``R(X, Y) = ∇_X ∇_Y - ∇_Y ∇_X - ∇_[X,Y]``
- lowered ``R[l, k, i, j] = g(R(∂i, ∂j) ∂k, ∂l)``
- ``covariant_derivative`` puts the differentiation index first
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import NotProductMetric, OutsideDomain, SingularMetric

FD_STEP = 1e-5
FD_STEP_CURVATURE = 1e-4
DET_TOL = 1e-12

Point = np.ndarray
ArrayFn = Callable[[Point], np.ndarray]


@dataclass(frozen=True)
class Chart:
    name: str
    coords: tuple[str, str, str]
    contains: Callable[[Point], bool]
    origin: tuple[float, float, float]
    box: tuple[tuple[float, float], ...]
    periods: tuple[Optional[float], ...] = (None, None, None)

    def __post_init__(self):
        if not self.contains(np.asarray(self.origin, dtype=float)):
            raise OutsideDomain(f"origin of chart {self.name} is outside its domain")

    def sample(self, rng: np.random.Generator, n: int = 1) -> np.ndarray:
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        return lo + (hi - lo) * rng.random((n, 3))

    def wrap(self, d: np.ndarray) -> np.ndarray:
        """Reduce coordinate differences of periodic coordinates to (-P/2, P/2]."""
        d = np.array(d, dtype=float)
        for i, per in enumerate(self.periods):
            if per:
                d[..., i] = d[..., i] - per * np.round(d[..., i] / per)
        return d


def fd_gradient(f: ArrayFn, p: Point, step: float, chart: Chart | None = None) -> np.ndarray:
    """Fourth-order central differences; result ``[m, ...] = ∂_m f``."""
    p = np.asarray(p, dtype=float)
    if chart is not None:
        for m in range(3):
            for k in (-2, 2):
                q = p.copy()
                q[m] += k * step
                if not chart.contains(q):
                    raise OutsideDomain(f"stencil around {p} leaves chart {chart.name}")
    out = []
    for m in range(3):
        e = np.zeros(3)
        e[m] = step
        fp1, fm1 = f(p + e), f(p - e)
        fp2, fm2 = f(p + 2 * e), f(p - 2 * e)
        out.append((8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * step))
    return np.stack(out)


@dataclass(frozen=True)
class MetricField:
    chart: Chart
    components: ArrayFn
    christoffel_fn: Optional[ArrayFn] = None
    dchristoffel_fn: Optional[ArrayFn] = None

    def __call__(self, p) -> np.ndarray:
        return self.components(np.asarray(p, dtype=float))

    def inverse(self, p) -> np.ndarray:
        g = self(p)
        if abs(np.linalg.det(g)) < DET_TOL:
            raise SingularMetric(f"metric degenerate at {p}")
        return np.linalg.inv(g)

    def is_positive_definite(self, p) -> bool:
        g = self(p)
        return bool(np.allclose(g, g.T) and np.min(np.linalg.eigvalsh(g)) > 0)


def _check_point(chart: Chart, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if not chart.contains(p):
        raise OutsideDomain(f"{p} is outside chart {chart.name}")
    return p


def christoffel(metric: MetricField, p, mode: str = "closed_form", step: float = FD_STEP) -> np.ndarray:
    p = _check_point(metric.chart, p)
    if mode == "closed_form":
        if metric.christoffel_fn is None:
            raise ValueError("metric has no closed-form Christoffel symbols")
        metric.inverse(p)
        return metric.christoffel_fn(p)
    if mode != "finite_diff":
        raise ValueError(f"unknown mode {mode!r}")
    ginv = metric.inverse(p)
    dg = fd_gradient(metric.components, p, step, metric.chart)
    comb = dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg
    return 0.5 * np.einsum("kl,lij->kij", ginv, comb)


def christoffel_derivative(metric: MetricField, p, mode: str = "closed_form",
                           step: float = FD_STEP_CURVATURE) -> np.ndarray:
    """``[m, k, i, j] = ∂_m Γ^k_ij``."""
    p = _check_point(metric.chart, p)
    if mode == "closed_form" and metric.dchristoffel_fn is not None:
        return metric.dchristoffel_fn(p)
    return fd_gradient(lambda q: christoffel(metric, q, mode), p, step, metric.chart)


def curvature(metric: MetricField, p, mode: str = "closed_form", lowered: bool = False,
              step: float = FD_STEP_CURVATURE) -> np.ndarray:
    gam = christoffel(metric, p, mode)
    dgam = christoffel_derivative(metric, p, mode, step)
    r = (
        np.einsum("iljk->lkij", dgam)
        - np.einsum("jlik->lkij", dgam)
        + np.einsum("lim,mjk->lkij", gam, gam)
        - np.einsum("ljm,mik->lkij", gam, gam)
    )
    if lowered:
        r = np.einsum("lm,mkij->lkij", metric(p), r)
    return r


def sectional_curvature(metric: MetricField, p, i: int, j: int, mode: str = "closed_form") -> float:
    r = curvature(metric, p, mode, lowered=True)
    g = metric(p)
    return float(r[i, j, i, j] / (g[i, i] * g[j, j] - g[i, j] ** 2))


@dataclass(frozen=True)
class TensorField:
    chart: Chart
    index_pos: str
    fn: ArrayFn
    name: str = ""

    def __call__(self, p) -> np.ndarray:
        return self.fn(np.asarray(p, dtype=float))

    @property
    def valence(self) -> tuple[int, int]:
        return self.index_pos.count("u"), self.index_pos.count("d")

    def __add__(self, other: TensorField) -> TensorField:
        if self.index_pos != other.index_pos:
            raise ValueError("cannot add fields of different index layout")
        return TensorField(self.chart, self.index_pos, lambda p: self.fn(p) + other.fn(p),
                           f"{self.name}+{other.name}")

    def __rmul__(self, c: float) -> TensorField:
        return TensorField(self.chart, self.index_pos, lambda p: c * self.fn(p), f"{c}·{self.name}")

    def __neg__(self) -> TensorField:
        return (-1.0) * self


def tensor_product(a: TensorField, b: TensorField, name: str = "") -> TensorField:
    return TensorField(a.chart, a.index_pos + b.index_pos,
                       lambda p: np.multiply.outer(a.fn(p), b.fn(p)), name or f"{a.name}⊗{b.name}")


def coordinate_form(chart: Chart, idx: int, scale: Callable[[Point], float] | None = None,
                    name: str = "") -> TensorField:
    """The one-form ``scale(p) · dx^idx``."""

    def fn(p):
        out = np.zeros(3)
        out[idx] = 1.0 if scale is None else scale(p)
        return out

    return TensorField(chart, "d", fn, name or f"d{chart.coords[idx]}")


def metric_tensor(metric: MetricField) -> TensorField:
    return TensorField(metric.chart, "dd", metric.components, "g")


def curvature_tensor(metric: MetricField, mode: str = "closed_form") -> TensorField:
    """Fully lowered curvature as a (0,4) field."""
    return TensorField(metric.chart, "dddd", lambda p: curvature(metric, p, mode, lowered=True), "R")


@dataclass(frozen=True)
class ConnectionField:
    chart: Chart
    coefficients: ArrayFn
    torsion_free: bool = True
    name: str = ""

    def __call__(self, p) -> np.ndarray:
        return self.coefficients(np.asarray(p, dtype=float))


def levi_civita(metric: MetricField, mode: str = "closed_form") -> ConnectionField:
    return ConnectionField(metric.chart, lambda p: christoffel(metric, p, mode), True, "∇")


def raise_lower(metric: MetricField, fld: TensorField, slot: int, direction: str, p) -> np.ndarray:
    if not 0 <= slot < len(fld.index_pos):
        raise IndexError(f"slot {slot} out of range for {fld.index_pos!r}")
    current = fld.index_pos[slot]
    if (direction, current) not in (("up", "d"), ("down", "u")):
        raise ValueError(f"slot {slot} is already {'upper' if current == 'u' else 'lower'}")
    mat = metric.inverse(p) if direction == "up" else metric(p)
    out = np.tensordot(mat, fld(p), axes=([1], [slot]))
    return np.moveaxis(out, 0, slot)


def moved_index(metric: MetricField, fld: TensorField, slot: int, direction: str) -> TensorField:
    """Field version of :func:`raise_lower`."""
    pos = list(fld.index_pos)
    pos[slot] = "u" if direction == "up" else "d"
    return TensorField(fld.chart, "".join(pos),
                       lambda p: raise_lower(metric, fld, slot, direction, p), fld.name)


def structure_connection(metric: MetricField, structure: TensorField,
                         mode: str = "closed_form") -> ConnectionField:
    """``∇̃ = ∇ - T`` with ``T^k_ij = g^{kl} S_ijl`` from the covariant ``S = g(T_X Y, Z)``."""
    if structure.index_pos != "ddd":
        raise ValueError("structure tensor must be given as a (0,3) field")

    def coeffs(p):
        t = raise_lower(metric, structure, 2, "up", p)  # [i, j, k] = T^k_ij
        return christoffel(metric, p, mode) - t.transpose(2, 0, 1)

    return ConnectionField(metric.chart, coeffs, False, "∇̃")


def covariant_derivative(conn: ConnectionField, fld: TensorField, p, step: float = FD_STEP) -> np.ndarray:
    p = _check_point(conn.chart, p)
    out = fd_gradient(fld.fn, p, step, conn.chart)
    gam = conn(p)
    comps = fld(p)
    for s, pos in enumerate(fld.index_pos):
        if pos == "u":
            t = np.tensordot(gam, comps, axes=([2], [s]))  # (a, m, rest)
            out = out + np.moveaxis(t, 0, 1 + s)
        else:
            t = np.tensordot(gam, comps, axes=([0], [s]))  # (m, b, rest)
            out = out - np.moveaxis(t, 1, 1 + s)
    return out


def wedge_area_form(metric: MetricField, surface_slots: Sequence[int] = (0, 1), orientation_sign: int = 1,
                    check_points: int = 8, seed: int = 0) -> TensorField:
    """``sign · sqrt(det g_surface) · dx^i ∧ dx^j`` for a metric split as surface × line."""
    i, j = surface_slots
    line = ({0, 1, 2} - {i, j}).pop()
    if orientation_sign not in (1, -1):
        raise ValueError("orientation_sign must be ±1")
    chart = metric.chart
    rng = np.random.default_rng(seed)
    pts = [np.asarray(chart.origin, dtype=float)] + list(chart.sample(rng, check_points))
    for q in pts:
        g = metric(q)
        if abs(g[i, line]) > 1e-12 or abs(g[j, line]) > 1e-12:
            raise NotProductMetric(f"metric mixes surface and line slots at {q}")

    def fn(p):
        g = metric(p)
        area = np.sqrt(g[i, i] * g[j, j] - g[i, j] ** 2)
        out = np.zeros((3, 3))
        out[i, j] = orientation_sign * area
        out[j, i] = -orientation_sign * area
        return out

    return TensorField(chart, "dd", fn, "dV")


def full_norm2(metric: MetricField, fld: TensorField, p) -> float:
    """Complete metric contraction ``|F|²_g`` of a covariant field."""
    if set(fld.index_pos) - {"d"}:
        raise ValueError("full_norm2 expects a covariant field")
    ginv = metric.inverse(p)
    comps = fld(p)
    up = comps
    for s in range(comps.ndim):
        up = np.moveaxis(np.tensordot(ginv, up, axes=([1], [s])), 0, s)
    return float(np.sum(up * comps))
