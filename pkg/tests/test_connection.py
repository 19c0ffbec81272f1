import numpy as np
import pytest

from natlift import base, connection, kernels, lift, oracle
from natlift.lift import TangentPoint

from conftest import LIFTS, MODELS, generic_lift, points

FAMILIES = connection.FAMILIES


def coeffs_at(params, model, pt):
    return connection.connection_coeffs(params, model.geometry_at(pt.x), pt)


def test_sasaki_flat_vanishes():
    m = base.Euclidean(3)
    for pt in points(m, 3):
        c = coeffs_at(lift.sasaki(), m, pt)
        d = connection.connection_coeff_derivatives(lift.sasaki(), m.geometry_at(pt.x), pt)
        for f in FAMILIES:
            assert not np.any(getattr(c, f))
            assert not np.any(getattr(d, "d" + f))


def test_constant_lift_flat_base_derivatives_vanish():
    params = lift.explicit(c1=2, c2=3, c3=1)
    m = base.Euclidean(2)
    d = connection.connection_coeff_derivatives(params, m.geometry_at([0, 0]), TangentPoint([0, 0], [0.4, 1.1]))
    for name in ("dQ", "dQt", "dP", "dPt", "dS", "dSt", "hP", "hPt", "hS", "hSt"):
        assert not np.any(getattr(d, name))


def test_sasaki_sphere_zero_section():
    m = base.Sphere()
    geom = m.geometry_at([1.0, 0.3])
    pt = TangentPoint(geom.x, [0.0, 0.0])
    c = connection.connection_coeffs(lift.sasaki(), geom, pt)
    for f in ("P", "Pt", "S", "St"):
        assert not np.any(getattr(c, f))
    # ∂_i S^h_jk keeps only the curvature term -½ R^h_ijk
    d = connection.connection_coeff_derivatives(lift.sasaki(), geom, pt)
    np.testing.assert_allclose(d.dS, -0.5 * np.einsum("hijk->ihjk", geom.riemann), atol=1e-15)


def test_sasaki_sphere_curvature_terms():
    # ∇_{δ_i} δ_j has vertical part -½ R(∂_i, ∂_j) y; ∇_{V_i} δ_j has horizontal part ½ R(y, ∂_i) ∂_j
    m = base.Sphere()
    geom = m.geometry_at([1.2, 0.0])
    y = np.array([0.3, -0.8])
    c = connection.connection_coeffs(lift.sasaki(), geom, TangentPoint(geom.x, y))
    R0 = np.einsum("m,lmij->lij", y, geom.riemann)
    np.testing.assert_allclose(c.S, -0.5 * R0, atol=1e-15)
    np.testing.assert_allclose(c.P, 0.5 * np.einsum("m,hjmi->hij", y, geom.riemann), atol=1e-15)
    assert not np.any(c.St) and not np.any(c.Q) and not np.any(c.Qt)


def test_lower_index_symmetries(any_model):
    params = generic_lift()
    for pt in points(any_model, 2):
        c = coeffs_at(params, any_model, pt)
        for f in ("Q", "Qt"):
            a = getattr(c, f)
            np.testing.assert_allclose(a, np.swapaxes(a, 1, 2), atol=1e-12)
        if not any_model.geometry_at(pt.x).riemann.any():
            for f in ("S", "St"):
                a = getattr(c, f)
                np.testing.assert_allclose(a, np.swapaxes(a, 1, 2), atol=1e-12)


@pytest.mark.parametrize("lift_name", sorted(LIFTS))
@pytest.mark.parametrize("model", ["euclidean2", "sphere", "poly3"])
def test_torsion_free(lift_name, model):
    m = MODELS[model]()
    params = LIFTS[lift_name]()
    for pt in points(m, 3):
        geom = m.geometry_at(pt.x)
        c = connection.connection_coeffs(params, geom, pt)
        assert oracle.torsion_residual(c, geom, pt.y) < 1e-12


@pytest.mark.parametrize("lift_name", sorted(LIFTS))
@pytest.mark.parametrize("model", ["euclidean3", "sphere", "poly2"])
def test_metric_compatibility(lift_name, model):
    m = MODELS[model]()
    for pt in points(m, 3):
        assert oracle.metric_compatibility_residual(LIFTS[lift_name](), m, pt) < 1e-5


def test_mixed_table_entry():
    m = base.Sphere()
    pt = TangentPoint([1.0, 0.5], [0.2, 0.9])
    c = coeffs_at(lift.cheeger_gromoll(), m, pt)
    v = connection.nabla_frame(c, ("h", 0), ("v", 1))
    np.testing.assert_allclose(v[:2], c.P[:, 1, 0])
    np.testing.assert_allclose(v[2:], c.gamma[:, 0, 1] + c.Pt[:, 1, 0])
    # ∇_δ ∂ - ∇_∂ δ = [δ_i, ∂_j] = Γ^h_ij ∂_h
    diff = connection.nabla_frame(c, ("h", 0), ("v", 1)) - connection.nabla_frame(c, ("v", 1), ("h", 0))
    np.testing.assert_allclose(diff[:2], 0.0, atol=1e-15)
    np.testing.assert_allclose(diff[2:], c.gamma[:, 0, 1], atol=1e-15)


def test_bad_frame_index():
    c = coeffs_at(lift.sasaki(), base.Euclidean(2), TangentPoint([0, 0], [1, 0]))
    with pytest.raises(ValueError):
        connection.nabla_frame(c, ("x", 0), ("v", 0))


@pytest.mark.parametrize("model", ["euclidean2", "poly3", "sphere"])
def test_fiber_derivatives_against_differences(model):
    params = generic_lift()
    m = MODELS[model]()
    h = 1e-6
    for pt in points(m, 2):
        geom = m.geometry_at(pt.x)
        d = connection.connection_coeff_derivatives(params, geom, pt)
        for i in range(m.dim):
            e = np.zeros(m.dim)
            e[i] = h
            hi = connection.connection_coeffs(params, geom, TangentPoint(pt.x, pt.y + e))
            lo = connection.connection_coeffs(params, geom, TangentPoint(pt.x, pt.y - e))
            for f in FAMILIES:
                fd = (getattr(hi, f) - getattr(lo, f)) / (2 * h)
                exact = getattr(d, "d" + f)[i]
                assert np.abs(fd - exact).max() <= 1e-5 * max(1.0, np.abs(fd).max()), f


def _coordinate_christoffels(params, model, z, h=1e-5):
    n = model.dim
    metric = lambda w: oracle.coordinate_metric(params, model, TangentPoint(w[:n], w[n:]))
    dG = np.zeros((2 * n,) * 3)
    for c in range(2 * n):
        e = np.zeros(2 * n)
        e[c] = h
        dG[c] = (metric(z + e) - metric(z - e)) / (2 * h)
    return kernels.christoffel(np.linalg.inv(metric(z)), dG)


@pytest.mark.parametrize("model", ["sphere", "poly2"])
def test_adapted_table_against_coordinate_christoffels(model):
    """Frame change of coordinate Christoffels reproduces the whole table."""
    params = lift.cheeger_gromoll() if model == "sphere" else generic_lift()
    m = MODELS[model]()
    n = m.dim
    h = 1e-5
    for pt in points(m, 2):
        geom = m.geometry_at(pt.x)
        c = connection.connection_coeffs(params, geom, pt)
        z = np.concatenate([pt.x, pt.y])
        Gc = _coordinate_christoffels(params, m, z)
        E = oracle.frame_matrix(geom.gamma, pt.y)
        Einv = np.linalg.inv(E)

        def frame(w):
            return oracle.frame_matrix(m.geometry_at(w[:n]).gamma, w[n:])

        specs = [("h", i) for i in range(n)] + [("v", i) for i in range(n)]
        for A, dirA in enumerate(specs):
            v = E[:, A]
            dE = (frame(z + h * v) - frame(z - h * v)) / (2 * h)
            for B, argB in enumerate(specs):
                coord = dE[:, B] + np.einsum("cab,a,b->c", Gc, v, E[:, B])
                expect = Einv @ coord
                got = connection.nabla_frame(c, dirA, argB)
                assert np.abs(got - expect).max() < 1e-6
