"""Ambrose-Singer certification, origin cross-checks and isomorphism search."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .diffgeo import (
    covariant_derivative,
    curvature_tensor,
    full_norm2,
    levi_civita,
    metric_tensor,
    structure_connection,
)
from .errors import AlgebraMismatch, FrameMismatch, OutsideDomain
from .models import (
    IsometryMap,
    ModelSpace,
    NamedStructure,
    group_isometry,
    isometry_catalog,
    named_structure,
    pullback_tensor,
)
from .reductive import ReductiveDecomposition, structure_tensor_at_origin, tau_map

RESAMPLE_CAP = 100


@dataclass(frozen=True)
class VerificationConfig:
    samples: int = 100
    tol: float = 1e-6
    fd_step: float = 1e-5
    seed: int = 42
    lambdas: tuple[float, ...] = (0.0, 0.5, 1.0, 2.0)

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not 0 < self.fd_step <= 1e-2:
            raise ValueError("fd_step must lie in (0, 1e-2]")


def sample_points(model: ModelSpace, n: int, seed: int, margin: float = 0.0) -> np.ndarray:
    """One independent RNG stream per sample index, so results do not depend on evaluation order."""
    chart = model.chart
    pts = []
    for child in np.random.SeedSequence(seed).spawn(n):
        rng = np.random.default_rng(child)
        for _ in range(RESAMPLE_CAP):
            p = chart.sample(rng, 1)[0]
            if _ball_inside(chart, p, margin):
                break
        else:
            raise OutsideDomain("could not sample a point with a usable neighbourhood")
        pts.append(p)
    return np.array(pts)


def _ball_inside(chart, p, r) -> bool:
    if not chart.contains(p):
        return False
    for m in range(3):
        for s in (-r, r):
            q = p.copy()
            q[m] += s
            if not chart.contains(q):
                return False
    return True


@dataclass
class ASResidualReport:
    model: str
    label: str
    lam: Optional[float]
    nabla_g: float
    nabla_R: float
    nabla_T: float
    tol: float
    seed: int
    samples: int
    nabla_R_levi_civita: float

    @property
    def passed(self) -> bool:
        return self.nabla_g < self.tol and self.nabla_R < self.tol and self.nabla_T < self.tol

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = self.passed
        return d


def verify_ambrose_singer(model: ModelSpace, structure: NamedStructure,
                          cfg: VerificationConfig = VerificationConfig()) -> ASResidualReport:
    if structure.model.name != model.name:
        raise ValueError(f"structure lives on {structure.model.name}, not {model.name}")
    metric = model.metric
    conn = structure_connection(metric, structure.tensor)
    lc = levi_civita(metric)
    g_field = metric_tensor(metric)
    r_field = curvature_tensor(metric)
    pts = sample_points(model, cfg.samples, cfg.seed, margin=2 * cfg.fd_step)
    res = np.zeros(4)
    for p in pts:
        res = np.maximum(res, [
            np.max(np.abs(covariant_derivative(conn, g_field, p, cfg.fd_step))),
            np.max(np.abs(covariant_derivative(conn, r_field, p, cfg.fd_step))),
            np.max(np.abs(covariant_derivative(conn, structure.tensor, p, cfg.fd_step))),
            np.max(np.abs(covariant_derivative(lc, r_field, p, cfg.fd_step))),
        ])
    return ASResidualReport(
        model=model.name,
        label=structure.label,
        lam=None if structure.label == "T_solv" else structure.lam,
        nabla_g=float(res[0]),
        nabla_R=float(res[1]),
        nabla_T=float(res[2]),
        tol=cfg.tol,
        seed=cfg.seed,
        samples=cfg.samples,
        nabla_R_levi_civita=float(res[3]),
    )


def skew_defect(structure: NamedStructure, p) -> float:
    s = structure.tensor(p)
    return float(np.max(np.abs(s + s.transpose(0, 2, 1))))


# ---------------------------------------------------------------------------
# origin cross-check


def origin_frame(model: ModelSpace, dec: ReductiveDecomposition) -> np.ndarray:
    """Columns are the tangent vectors at o of the m-basis elements."""
    if dec.algebra_id != model.algebra_id:
        raise AlgebraMismatch(f"{dec.algebra_id.value} decomposition on a {model.algebra_id.value} model")
    o = model.origin
    if model.frame is not None:
        coeffs = np.array([[float(c) for c in v] for v in dec.m_basis]).T
        f = model.frame(o) @ coeffs
    else:
        f = np.stack([tau_map(dec.algebra_id, v, model) for v in dec.m_basis], axis=1)
    if f.shape != (3, 3) or abs(np.linalg.det(f)) < 1e-8:
        raise FrameMismatch("τ images do not span the tangent space at o")
    return f


def _in_frame(s: np.ndarray, f: np.ndarray) -> np.ndarray:
    return np.einsum("ijk,ia,jb,kc->abc", s, f, f, f)


def crosscheck_origin(model: ModelSpace, dec: ReductiveDecomposition, structure: NamedStructure) -> float:
    """Max entry difference between the reductive origin tensor and the closed form at o."""
    ot = structure_tensor_at_origin(dec).as_float()
    f = origin_frame(model, dec)
    closed = _in_frame(structure.tensor(model.origin), f)
    return float(np.max(np.abs(ot - closed)))


def origin_table(model: ModelSpace, dec: ReductiveDecomposition) -> np.ndarray:
    """Reductive origin tensor rewritten in the model's display frame."""
    ot = structure_tensor_at_origin(dec).as_float()
    f = origin_frame(model, dec)
    change = np.linalg.solve(f, model.display_frame)
    return _in_frame(ot, change)


# ---------------------------------------------------------------------------
# isomorphisms and invariance


@dataclass
class IsomorphismVerdict:
    lam: float
    mu: float
    verdict: str
    witness: Optional[str]
    deviation: Optional[float]
    norm_lambda: float
    norm_mu: float
    certificate: Optional[str] = None


def format_root2(x: float, tol: float = 1e-6) -> str:
    """Write ``x`` as ``q√2`` with a small rational ``q`` when it is one."""
    q = Fraction(x / math.sqrt(2)).limit_denominator(16)
    if abs(float(q) * math.sqrt(2) - x) > tol:
        return f"{x:.9g}"
    if q == 0:
        return "0"
    num = "" if abs(q.numerator) == 1 else str(abs(q.numerator))
    sign = "-" if q < 0 else ""
    den = "" if q.denominator == 1 else f"/{q.denominator}"
    return f"{sign}{num}√2{den}"


def structure_norm(structure: NamedStructure, pts: Sequence[np.ndarray]) -> np.ndarray:
    metric = structure.model.metric
    return np.sqrt([full_norm2(metric, structure.tensor, p) for p in pts])


def isomorphism_test(model: ModelSpace, lam: float, mu: float,
                     catalog: Optional[Sequence[IsometryMap]] = None,
                     cfg: VerificationConfig = VerificationConfig()) -> IsomorphismVerdict:
    catalog = list(catalog) if catalog is not None else isometry_catalog(model)
    if not catalog:
        raise ValueError("isometry catalog is empty")
    t_lam = named_structure(model, "T_lambda", lam)
    t_mu = named_structure(model, "T_lambda", mu)
    pts = sample_points(model, cfg.samples, cfg.seed, margin=2 * cfg.fd_step)
    n_lam = float(np.mean(structure_norm(t_lam, pts)))
    n_mu = float(np.mean(structure_norm(t_mu, pts)))
    for phi in catalog:
        dev = max(float(np.max(np.abs(pullback_tensor(phi, t_lam.tensor, p) - t_mu.tensor(p)))) for p in pts)
        if dev < cfg.tol:
            return IsomorphismVerdict(lam, mu, "isomorphic", phi.name, dev, n_lam, n_mu)
    if abs(n_lam - n_mu) > cfg.tol:
        cert = f"‖T‖_g invariant differs ({format_root2(n_lam)} vs {format_root2(n_mu)})"
        return IsomorphismVerdict(lam, mu, "not_isomorphic", None, None, n_lam, n_mu, cert)
    return IsomorphismVerdict(lam, mu, "no_witness_found", None, None, n_lam, n_mu)


def invariance_residual(structure: NamedStructure, n: int = 20, seed: int = 0) -> float:
    """Max deviation of ``γ*T`` from ``T`` over ``n`` random group elements and points."""
    model = structure.model
    worst = 0.0
    for child in np.random.SeedSequence(seed).spawn(n):
        rng = np.random.default_rng(child)
        gamma = model.random_group_element(rng)
        p = model.chart.sample(rng, 1)[0]
        phi = group_isometry(model, gamma)
        worst = max(worst, float(np.max(np.abs(pullback_tensor(phi, structure.tensor, p) - structure.tensor(p)))))
    return worst
