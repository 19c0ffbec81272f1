import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from natlift import base, curvature, lift, oracle
from natlift.curvature import FAMILY_NAMES, SAME_KIND, SampleSpec
from natlift.errors import DecompositionError, DegenerateMetricError, PlaneError
from natlift.lift import TangentPoint
from natlift.scalarfn import CoeffFn

from conftest import LIFTS, MODELS, generic_lift, nonflat_theorem4, points

T = CoeffFn.t()
E2, E3 = base.Euclidean(2), base.Euclidean(3)

NOT_FLAT = ("the closed-form d2 family has nonzero curvature whenever alpha or beta "
            "varies with t; an exact symbolic check and the finite-difference oracle agree")


def K_at(params, model, pt):
    return curvature.curvature_components(params, model.geometry_at(pt.x), pt)


def blocks_at(params, model, pt):
    return lift.metric_blocks(params, model.geometry_at(pt.x), pt)


# -- the twelve families ---------------------------------------------------------

def test_sasaki_flat_all_zero():
    for pt in points(E3, 3):
        assert not np.any(K_at(lift.sasaki(), E3, pt).stacked)


def test_constant_lift_flat_base_all_zero():
    params = lift.explicit(c1=2, c2=1.5, c3=0.5)
    for pt in points(E2, 3):
        assert np.abs(K_at(params, E2, pt).stacked).max() < 1e-14


def test_family_access():
    K = K_at(generic_lift(), MODELS["poly2"](), TangentPoint([0.1, 0.2], [0.3, 0.4]))
    assert K.dim == 2
    for f, name in enumerate(FAMILY_NAMES):
        assert getattr(K, name) is not None
        np.testing.assert_array_equal(K[name], K.stacked[f])
    assert set(K.as_dict()) == set(FAMILY_NAMES)
    with pytest.raises(AttributeError):
        K.ZZZZ


@pytest.mark.parametrize("lift_name", sorted(LIFTS))
def test_zero_section_reduces_to_base_curvature(lift_name, any_model):
    params = LIFTS[lift_name]() if lift_name != "generic" else lift.explicit(c1=2, c2=1, c3=0.3, d1=1, d2=2)
    for pt in points(any_model, 2):
        pt = TangentPoint(pt.x, np.zeros(any_model.dim))
        geom = any_model.geometry_at(pt.x)
        K = curvature.curvature_components(params, geom, pt)
        assert np.abs(K.XXYY - geom.riemann).max() < 1e-10


def test_same_kind_antisymmetry(any_model):
    for pt in points(any_model, 2):
        s = K_at(generic_lift(), any_model, pt).stacked[:len(SAME_KIND)]
        assert np.abs(s + np.swapaxes(s, -1, -2)).max() < 1e-10


@pytest.mark.parametrize("lift_name", sorted(LIFTS))
def test_lowered_tensor_symmetries(lift_name, any_model):
    params = LIFTS[lift_name]()
    for pt in points(any_model, 2):
        K = K_at(params, any_model, pt)
        G = blocks_at(params, any_model, pt).full()
        L = np.einsum("ed,dcab->ecab", G, curvature.full_tensor(K))
        scale = 1.0 + np.abs(L).max()
        assert np.abs(L + np.swapaxes(L, 2, 3)).max() < 1e-10 * scale
        assert np.abs(L + np.swapaxes(L, 0, 1)).max() < 1e-10 * scale
        assert np.abs(L - np.transpose(L, (2, 3, 0, 1))).max() < 1e-10 * scale


@pytest.mark.parametrize("model", ["sphere", "poly2", "poly3"])
def test_families_against_oracle(model):
    m = MODELS[model]()
    params = generic_lift()
    for pt in points(m, 2):
        K = K_at(params, m, pt)
        err = oracle.compare_adapted(K, oracle.fd_riemann(params, m, pt), m.geometry_at(pt.x), pt)
        assert err < 1e-4


# -- constant curvature comparison -------------------------------------------------

def test_k0_zero():
    b = blocks_at(generic_lift(), E2, TangentPoint([0, 0], [1, 2]))
    assert not np.any(curvature.k0_components(0.0, b).stacked)


def test_k0_sasaki_horizontal_pattern():
    b = blocks_at(lift.sasaki(), E3, TangentPoint([0, 0, 0], [1, 2, 3]))
    K0 = curvature.k0_components(1.0, b)
    d = np.eye(3)
    np.testing.assert_array_equal(K0.XXXX, np.einsum("jk,ih->hkij", d, d) - np.einsum("ik,jh->hkij", d, d))
    for name in ("XXXY", "XXYY", "YYXX", "YYYX"):
        assert not np.any(K0[name])


def test_k0_yxxy_entry():
    b = blocks_at(generic_lift(), E2, TangentPoint([0, 0], [0.5, -1]))
    k = 0.7
    np.testing.assert_allclose(curvature.k0_components(k, b).YXXY,
                               k * np.einsum("jk,hi->hkij", b.G1, np.eye(2)))


def test_k0_is_the_constant_curvature_tensor():
    b = blocks_at(generic_lift(), E3, TangentPoint([0, 0, 0], [0.5, -1, 0.2]))
    k = -1.3
    F = curvature.full_tensor(curvature.k0_components(k, b))
    G = b.full()
    eye = np.eye(6)
    # K0(E_A, E_B) E_C = k [G_BC E_A - G_AC E_B], stored as F[D, C, A, B]
    expect = k * (np.einsum("bc,da->dcab", G, eye) - np.einsum("ac,db->dcab", G, eye))
    np.testing.assert_allclose(F, expect, atol=1e-14)
    rng = np.random.default_rng(0)
    for _ in range(5):
        X, Y = curvature.sample_plane(rng, G)
        assert curvature.sectional_from_full(F, G, X, Y) == pytest.approx(k, rel=1e-12)


def test_residual_of_k0_against_itself():
    b = blocks_at(generic_lift(), E2, TangentPoint([0, 0], [0.5, -1]))
    K0 = curvature.k0_components(2.0, b)
    worst, per = curvature.constant_curvature_residual(K0, 2.0, b)
    assert worst == 0.0 and per == [0.0] * 12


@pytest.mark.parametrize("k", [0.0, 0.5, 1.0, -1.0])
def test_sasaki_sphere_is_not_constant_curvature(k):
    m = base.Sphere()
    pt = TangentPoint([1.0, 0.3], [0.4, -0.7])
    worst, per = curvature.constant_curvature_residual(K_at(lift.sasaki(), m, pt), k, blocks_at(lift.sasaki(), m, pt))
    assert worst > 1e-2
    assert len(per) == 12


# -- sectional curvature --------------------------------------------------------------

def test_sasaki_sphere_horizontal_plane():
    m = base.Sphere()
    pt = TangentPoint([1.0, 0.3], [0.0, 0.0])
    K, b = K_at(lift.sasaki(), m, pt), blocks_at(lift.sasaki(), m, pt)
    X, Y = np.array([1.0, 0, 0, 0]), np.array([0, 1.0, 0, 0])
    assert curvature.sectional_curvature(K, b, X, Y) == pytest.approx(1.0, abs=1e-12)
    F, G = oracle.fd_sectional_tensor(lift.sasaki(), m, pt)
    assert curvature.sectional_from_full(F, G, X, Y) == pytest.approx(1.0, abs=1e-4)


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-3, 3).filter(lambda v: abs(v) > 0.1), b=st.floats(-3, 3), seed=st.integers(0, 10**6))
def test_sectional_plane_invariance(a, b, seed):
    m = base.Sphere()
    pt = TangentPoint([1.0, 0.3], [0.4, -0.7])
    params = lift.cheeger_gromoll()
    K, bl = K_at(params, m, pt), blocks_at(params, m, pt)
    X, Y = curvature.sample_plane(np.random.default_rng(seed), bl.full())
    k1 = curvature.sectional_curvature(K, bl, X, Y)
    k2 = curvature.sectional_curvature(K, bl, a * X, Y + b * X)
    assert k2 == pytest.approx(k1, rel=1e-10, abs=1e-12)


def test_degenerate_plane():
    pt = TangentPoint([0, 0], [1, 0])
    K, b = K_at(lift.sasaki(), E2, pt), blocks_at(lift.sasaki(), E2, pt)
    X = np.array([1.0, 0, 0, 0])
    with pytest.raises(PlaneError):
        curvature.sectional_curvature(K, b, X, 2 * X)


def test_sample_plane_is_well_conditioned():
    rng = np.random.default_rng(5)
    G = blocks_at(generic_lift(), E3, TangentPoint([0, 0, 0], [1, 0.2, 0])).full()
    for _ in range(50):
        X, Y = curvature.sample_plane(rng, G)
        assert X @ G @ X == pytest.approx(1.0) and Y @ G @ Y == pytest.approx(1.0)
        assert (X @ G @ X) * (Y @ G @ Y) - (X @ G @ Y) ** 2 >= 1e-4


# -- decompositions ---------------------------------------------------------------------

def test_lemma1_simple_cases():
    geom = E2.geometry_at([0, 0])
    assert curvature.lemma1_decompose(2 * np.eye(2), geom, [1.0, 0.5]).coeffs == pytest.approx((2.0, 0.0), abs=1e-14)
    assert curvature.lemma1_decompose(np.diag([1.0, 0.0]), geom, [1.0, 0.0]).coeffs == pytest.approx((0.0, 1.0), abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(u=st.floats(-5, 5), v=st.floats(-5, 5), y=st.lists(st.floats(-2, 2), min_size=3, max_size=3)
       .filter(lambda y: np.linalg.norm(y) > 0.1))
def test_lemma1_roundtrip(u, v, y):
    geom = MODELS["poly3"]().geometry_at([0.1, 0.2, 0.3])
    w = geom.g @ np.asarray(y)
    S = u * geom.g + v * np.outer(w, w)
    dec = curvature.lemma1_decompose(S, geom, y)
    assert dec.coeffs == pytest.approx((u, v), abs=1e-10 * (1 + abs(u) + abs(v)) / min(1.0, np.linalg.norm(w) ** 2))


def test_lemma1_errors():
    geom = E2.geometry_at([0, 0])
    with pytest.raises(DecompositionError):
        curvature.lemma1_decompose(np.eye(2), geom, [0.0, 0.0])
    with pytest.raises(DecompositionError):
        curvature.lemma1_decompose(np.array([[0.0, 1.0], [-1.0, 0.0]]), geom, [1.0, 0.0])
    with pytest.raises(DecompositionError):
        curvature.lemma1_decompose(np.eye(1), base.Euclidean(1).geometry_at([0.0]), [1.0])


def test_lemma2_single_pattern():
    geom = E3.geometry_at([0, 0, 0])
    T0 = np.einsum("hi,jk->hkij", np.eye(3), np.eye(3))
    dec = curvature.lemma2_decompose(T0, geom, [0.3, -0.2, 0.5])
    np.testing.assert_allclose(dec.coeffs, [1] + [0] * 9, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(alpha=st.lists(st.floats(-3, 3), min_size=10, max_size=10), scale=st.floats(0.05, 2.0))
def test_lemma2_roundtrip(alpha, scale):
    geom = MODELS["poly3"]().geometry_at([0.1, -0.2, 0.2])
    y = scale * np.array([0.4, -0.3, 0.8])
    T0 = np.einsum("a,ahkij->hkij", alpha, curvature.lemma2_basis(geom, y))
    dec = curvature.lemma2_decompose(T0, geom, y)
    tol = 1e-9 * max(1.0, max(abs(a) for a in alpha)) / scale**4
    np.testing.assert_allclose(dec.coeffs, alpha, atol=tol)


def test_lemma2_errors():
    with pytest.raises(DecompositionError):
        curvature.lemma2_decompose(np.zeros((2,) * 4), E2.geometry_at([0, 0]), [1.0, 0.0])
    with pytest.raises(DecompositionError):
        curvature.lemma2_decompose(np.zeros((3,) * 4), E3.geometry_at([0, 0, 0]), [0.0, 0.0, 0.0])


@pytest.mark.parametrize("size", [1e-1, 1e-2])
def test_d1_drives_isotropic_coefficient(size):
    y = size * np.array([0.3, -0.5, 0.2])
    geom = E3.geometry_at([0.1, 0.2, 0.3])
    coeff = {}
    for d1 in (1.0, 0.0):
        params = lift.explicit(c1=2, c2=2, c3=1, d1=d1)
        pt = TangentPoint(geom.x, y)
        K = curvature.curvature_components(params, geom, pt)
        T0 = K.YXXY - curvature.k0_components(0.0, lift.metric_blocks(params, geom, pt)).YXXY
        coeff[d1] = curvature.lemma2_decompose(T0, geom, y).coeffs[2]  # δ^h_k g_ij
    assert abs(coeff[1.0]) > 1e-3
    assert abs(coeff[0.0]) < 1e-8


# -- lift families ------------------------------------------------------------------------

def test_theorem4_structure_constant_case():
    p = curvature.theorem4_metric(CoeffFn.const(1.0), CoeffFn.const(1.0), 1.0, check=False)
    for name in ("d1", "d2", "d3"):
        assert p.coeffs()[name].jet(0.7).tolist() == [0.0] * 4
    # c3 = beta = 1 makes c1 c2 - c3^2 vanish
    with pytest.raises(DegenerateMetricError):
        curvature.theorem4_metric(CoeffFn.const(1.0), CoeffFn.const(1.0), 1.0)


@pytest.mark.xfail(strict=True, reason="alpha = beta = c = 1 gives c3 = 1, which is not the Sasaki lift "
                                       "and is degenerate (c1 c2 = c3^2)")
def test_theorem4_unit_case_is_sasaki():
    p = curvature.theorem4_metric(CoeffFn.const(1.0), CoeffFn.const(1.0), 1.0, check=False)
    s = lift.sasaki()
    for name in lift.COEFF_NAMES:
        assert p.coeffs()[name](0.3) == s.coeffs()[name](0.3)


def test_theorem4_linear_alpha():
    p = curvature.theorem4_metric(1 + 2 * T, CoeffFn.const(1.0), 1.0, check=False)
    for t in (0.0, 0.5, 2.0):
        assert p.d2.jet(t).tolist() == [2.0, 0.0, 0.0, 0.0]
        assert p.d3(t) == 0.0
    # c1 c2 - c3^2 = 2t vanishes at t = 0
    with pytest.raises(DegenerateMetricError):
        curvature.theorem4_metric(1 + 2 * T, CoeffFn.const(1.0), 1.0)


def test_theorem4_half_beta_coefficients():
    p = nonflat_theorem4()
    assert p.d2(0.8) == pytest.approx(1.0)
    assert p.d3(0.8) == 0.0 and p.d1(0.8) == 0.0 and p.c1(0.8) == 1.0


def test_theorem4_rational_beta():
    p = curvature.theorem4_metric(2 + T, 0.5 + 0.25 * T, 1.0)
    t = 0.6
    a, a1, b, b1 = 2 + t, 1.0, 0.5 + 0.25 * t, 0.25
    assert p.d2(t) == pytest.approx((a1 * b**2 + 2 * a1 * b * b1 * t - 2 * a * b1**2 * t) / b**2, rel=1e-14)
    assert p.d3(t) == 0.25


@pytest.mark.xfail(strict=True, reason=NOT_FLAT)
def test_theorem4_family_flat_on_euclidean():
    for pt in points(E2, 5):
        assert np.abs(K_at(nonflat_theorem4(), E2, pt).stacked).max() < 1e-8


def test_theorem4_family_curvature_is_real():
    params = nonflat_theorem4()
    pt = TangentPoint([0.1, 0.2], [0.3, -0.5])
    K = K_at(params, E2, pt)
    assert np.abs(K.stacked).max() > 0.1
    err = oracle.compare_adapted(K, oracle.fd_riemann(params, E2, pt), E2.geometry_at(pt.x), pt)
    assert err < 1e-6


def test_constant_theorem4_family_is_flat():
    params = curvature.theorem4_metric(CoeffFn.const(2.0), CoeffFn.const(0.5), 1.0)
    for pt in points(E3, 5):
        assert np.abs(K_at(params, E3, pt).stacked).max() < 1e-12


@pytest.mark.parametrize("alpha, beta, c", [
    (1 + T, CoeffFn.const(0.5), 1.0),
    (2 + T + T * T, 0.5 + 0.25 * T, 1.0),
    (3 + 2 * T + T * T, 1 + T, 2.0),
])
@pytest.mark.parametrize("model", [E2, E3], ids=["n2", "n3"])
def test_flat_lift_is_flat(alpha, beta, c, model):
    params = curvature.flat_lift(alpha, beta, c)
    rep = curvature.flatness_report(params, model, SampleSpec(points=10, planes=40, seed=2))
    assert rep.residual_at_zero < 1e-8
    assert max(abs(rep.k_min), abs(rep.k_max)) < 1e-8


def test_flat_lift_rejects_nonpositive_c():
    with pytest.raises(DegenerateMetricError):
        curvature.flat_lift(1 + T, CoeffFn.const(0.5), 0.0)


# -- flatness report ------------------------------------------------------------------------------

def test_flatness_report_sasaki_euclidean():
    rep = curvature.flatness_report(lift.sasaki(), E2, SampleSpec(points=5, planes=50))
    assert rep.spread < 1e-10 and rep.min_residual == 0.0 and rep.best_k == 0.0


@pytest.mark.xfail(strict=True, reason=NOT_FLAT)
def test_flatness_report_theorem4_euclidean():
    rep = curvature.flatness_report(nonflat_theorem4(), E2, SampleSpec(points=5, planes=50))
    assert rep.min_residual < 1e-8 and rep.spread < 1e-8


def test_flatness_report_sasaki_sphere_matches_oracle():
    m = base.Sphere()
    spec = SampleSpec(points=10, planes=200, seed=0)
    rep = curvature.flatness_report(lift.sasaki(), m, spec)
    assert rep.spread > 0.1
    assert rep.min_residual > 1e-2
    fd_vals = []
    tensors = {}
    for p in rep.planes:
        if p.point not in tensors:
            tensors[p.point] = oracle.fd_sectional_tensor(lift.sasaki(), m, TangentPoint(p.x, p.y))
        F, G = tensors[p.point]
        fd_vals.append(curvature.sectional_from_full(F, G, p.X, p.Y))
    assert abs((max(fd_vals) - min(fd_vals)) - rep.spread) < 1e-3
    d = rep.to_dict()
    assert d["n_planes"] == 200 and set(d["per_family_residual_at_k0"]) == set(FAMILY_NAMES)


def test_scan_is_deterministic():
    spec = SampleSpec(points=3, planes=20, seed=11)
    a = curvature.scan_planes(generic_lift(), MODELS["poly2"](), spec)[2]
    b = curvature.scan_planes(generic_lift(), MODELS["poly2"](), spec)[2]
    assert [p.k_value for p in a] == [p.k_value for p in b]
