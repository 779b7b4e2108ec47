import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homstruct.diffgeo import TensorField
from homstruct.errors import AlgebraMismatch, FrameMismatch
from homstruct.matlie import AlgebraId
from homstruct.models import isometry_catalog, named_structure
from homstruct.reductive import enumerate_lie_subspaces
from homstruct.verifier import (
    VerificationConfig,
    crosscheck_origin,
    format_root2,
    invariance_residual,
    isomorphism_test,
    origin_frame,
    origin_table,
    sample_points,
    skew_defect,
    structure_norm,
    verify_ambrose_singer,
)

FAST = VerificationConfig(samples=15)
U1 = (1, 0, 0, 0)


def sym_perturbation(structure, eps):
    """``T + eps · dy ⊗ sym(dx ⊗ dy)`` in chart coordinates (x, y, ·)."""
    bump = np.zeros((3, 3, 3))
    bump[1, 0, 1] = bump[1, 1, 0] = eps / 2
    fld = TensorField(structure.tensor.chart, "ddd", lambda p: structure.tensor.fn(p) + bump, "perturbed")
    return dataclasses.replace(structure, label="perturbed", tensor=fld)


# -- Ambrose-Singer ---------------------------------------------------------


@pytest.mark.parametrize("lam", [0.0, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("name", ["s2xr", "h2xr"])
def test_as_passes_for_family(name, lam, request):
    model = request.getfixturevalue(name)
    rep = verify_ambrose_singer(model, named_structure(model, "T_lambda", lam), FAST)
    assert rep.passed, rep
    assert rep.nabla_R_levi_civita < 1e-6


def test_as_passes_for_solv(h2xr):
    st_ = named_structure(h2xr, "T_solv")
    rep = verify_ambrose_singer(st_.model, st_, FAST)
    assert rep.passed and rep.lam is None
    assert rep.to_dict()["pass"] is True


def test_as_detects_non_metric_perturbation(h2xr):
    bad = sym_perturbation(named_structure(h2xr, "T_lambda", 1.0), 0.1)
    rep = verify_ambrose_singer(h2xr, bad, FAST)
    assert not rep.passed
    assert rep.nabla_g > 1e-3


def test_nabla_g_equals_skew_defect(h2xr):
    # (∇̃_X g)(Y, Z) = S(X, Y, Z) + S(X, Z, Y)
    bad = sym_perturbation(named_structure(h2xr, "T_lambda", 1.0), 0.1)
    rep = verify_ambrose_singer(h2xr, bad, FAST)
    pts = sample_points(h2xr, FAST.samples, FAST.seed, margin=2 * FAST.fd_step)
    assert rep.nabla_g == pytest.approx(max(skew_defect(bad, p) for p in pts), abs=1e-8)


def test_as_wrong_model(s2xr, h2xr):
    with pytest.raises(ValueError):
        verify_ambrose_singer(s2xr, named_structure(h2xr, "T_lambda", 1.0), FAST)


def test_determinism(s2xr):
    st_ = named_structure(s2xr, "T_lambda", 0.5)
    assert verify_ambrose_singer(s2xr, st_, FAST) == verify_ambrose_singer(s2xr, st_, FAST)


def test_sample_prefix_stability(h2xr):
    a = sample_points(h2xr, 5, seed=7)
    b = sample_points(h2xr, 12, seed=7)
    np.testing.assert_array_equal(a, b[:5])
    assert not np.array_equal(a, sample_points(h2xr, 5, seed=8))


def test_config_validation():
    for bad in ({"samples": 0}, {"tol": 0.0}, {"tol": -1.0}, {"fd_step": 0.0}, {"fd_step": 0.5}):
        with pytest.raises(ValueError):
            VerificationConfig(**bad)
    assert VerificationConfig().lambdas == (0.0, 0.5, 1.0, 2.0)


# -- origin cross-checks ----------------------------------------------------


@pytest.mark.parametrize("name", ["s2xr", "h2xr"])
def test_crosscheck_family(name, request):
    model = request.getfixturevalue(name)
    fam = enumerate_lie_subspaces(model.algebra_id, model.h_basis)
    for lam in (0.0, 0.5, 1.0, 2.0, -1.5):
        dev = crosscheck_origin(model, fam.instantiate({"λ": lam}), named_structure(model, "T_lambda", lam))
        assert dev < 1e-8


def test_crosscheck_solv_exact(h2xr_solv):
    dec = enumerate_lie_subspaces(AlgebraId.SOLV, []).instantiate()
    assert crosscheck_origin(h2xr_solv, dec, named_structure(h2xr_solv, "T_solv")) == 0


def test_s2_display_table(s2xr):
    lam = 2.0
    dec = enumerate_lie_subspaces(AlgebraId.SO3_R, [U1]).instantiate({"λ": lam})
    s = origin_table(s2xr, dec)
    expected = np.zeros((3, 3, 3))
    # frame (∂x², ∂x³, ∂y)
    expected[2, 0, 1], expected[2, 1, 0] = lam, -lam
    np.testing.assert_allclose(s, expected, atol=1e-8)


def test_origin_frame_errors(s2xr, h2xr):
    dec = enumerate_lie_subspaces(AlgebraId.SO3_R, [U1]).instantiate({"λ": 1})
    with pytest.raises(AlgebraMismatch):
        origin_frame(h2xr, dec)
    degenerate = dataclasses.replace(dec, m_basis=((0, 1, 0, 0), (0, 0, 1, 0), U1))
    with pytest.raises(FrameMismatch):
        origin_frame(s2xr, degenerate)


# -- norms, isomorphisms, invariance ----------------------------------------


@pytest.mark.parametrize("name", ["s2xr", "h2xr"])
def test_norm_is_constant(name, request):
    model = request.getfixturevalue(name)
    for lam in (0.5, 2.0):
        norms = structure_norm(named_structure(model, "T_lambda", lam), sample_points(model, 30, 3))
        assert np.var(norms) < 1e-10
        assert norms[0] == pytest.approx(math.sqrt(2) * lam)


@pytest.mark.parametrize("name", ["s2xr", "h2xr"])
def test_isomorphic_by_reflection(name, request):
    v = isomorphism_test(request.getfixturevalue(name), 1.0, -1.0, cfg=FAST)
    assert v.verdict == "isomorphic" and v.witness == "reflection" and v.deviation < 1e-6


def test_identity_witness(h2xr):
    v = isomorphism_test(h2xr, 0.5, 0.5, cfg=FAST)
    assert v.witness == "identity" and v.deviation == 0


@pytest.mark.parametrize("name", ["s2xr", "h2xr"])
def test_not_isomorphic_certificate(name, request):
    v = isomorphism_test(request.getfixturevalue(name), 1.0, 2.0, cfg=FAST)
    assert v.verdict == "not_isomorphic"
    assert v.norm_lambda == pytest.approx(math.sqrt(2), abs=1e-6)
    assert v.norm_mu == pytest.approx(2 * math.sqrt(2), abs=1e-6)
    assert v.certificate == "‖T‖_g invariant differs (√2 vs 2√2)"


def test_no_witness_with_thin_catalog(h2xr):
    with pytest.raises(ValueError):
        isomorphism_test(h2xr, 1.0, -1.0, catalog=[], cfg=FAST)
    identity_only = isometry_catalog(h2xr)[:1]
    v = isomorphism_test(h2xr, 1.0, -1.0, catalog=identity_only, cfg=FAST)
    assert v.verdict == "no_witness_found"


@settings(max_examples=30)
@given(q=st.fractions(min_value=-4, max_value=4, max_denominator=4))
def test_format_root2(q):
    text = format_root2(float(q) * math.sqrt(2))
    assert "√2" in text or q == 0


def test_format_root2_examples():
    assert format_root2(math.sqrt(2)) == "√2"
    assert format_root2(2 * math.sqrt(2)) == "2√2"
    assert format_root2(-math.sqrt(2) / 2) == "-√2/2"
    assert format_root2(0.0) == "0"
    assert format_root2(1.0) == "1"


@pytest.mark.parametrize("name,label", [("s2xr", "T_lambda"), ("h2xr", "T_lambda"), ("h2xr", "T_solv")])
def test_invariance(name, label, request):
    st_ = named_structure(request.getfixturevalue(name), label, 1.0)
    assert invariance_residual(st_, 20, seed=5) < 1e-6


def test_invariance_detects_broken_structure(h2xr):
    # a coordinate-constant tensor is not invariant under the Möbius action
    s = named_structure(h2xr, "T_lambda", 1.0)
    const = TensorField(h2xr.chart, "ddd", lambda p: s.tensor.fn(h2xr.origin), "frozen")
    assert invariance_residual(dataclasses.replace(s, tensor=const), 20, seed=5) > 1e-3
