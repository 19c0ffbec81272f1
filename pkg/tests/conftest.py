import numpy as np
import pytest

from natlift import base, curvature, lift
from natlift.lift import TangentPoint
from natlift.scalarfn import CoeffFn

T = CoeffFn.t()


def generic_lift():
    """All six coefficients non-constant, positive on the sampled range."""
    return lift.explicit(
        c1=1 + 0.3 * T,
        c2=CoeffFn.ratio([2.0, 0.5], [1.0, 1.0]),
        c3=0.2 + 0.1 * T,
        d1=0.1 + 0.05 * T * T,
        d2=0.3 * T,
        d3=CoeffFn.const(0.05) + 0.02 * T,
    )


def poly_base_2d():
    return base.CustomPolynomial(2, {
        (0, 0): [(1.0, (0, 0)), (0.3, (0, 2))],
        (1, 1): [(1.0, (0, 0)), (0.2, (2, 0))],
        (0, 1): [(0.1, (1, 1))],
    })


def poly_base_3d():
    return base.CustomPolynomial(3, {
        (0, 0): [(1.0, (0, 0, 0)), (0.3, (0, 2, 0))],
        (1, 1): [(1.0, (0, 0, 0)), (0.2, (2, 0, 1))],
        (2, 2): [(1.0, (0, 0, 0)), (0.1, (1, 1, 0))],
        (0, 1): [(0.1, (0, 0, 1))],
    })


def nonflat_theorem4():
    return curvature.theorem4_metric(1 + T, CoeffFn.const(0.5), 1.0)


LIFTS = {
    "sasaki": lift.sasaki,
    "cheeger-gromoll": lift.cheeger_gromoll,
    "generic": generic_lift,
}

MODELS = {
    "euclidean2": lambda: base.Euclidean(2),
    "euclidean3": lambda: base.Euclidean(3),
    "sphere": lambda: base.Sphere(1.0, 2),
    "poly2": poly_base_2d,
    "poly3": poly_base_3d,
}


def points(model, count=3, seed=0, y_scale=1.0):
    spec = curvature.SampleSpec(points=count, seed=seed, y_scale=y_scale)
    return curvature.sample_tangent_points(model, spec)


@pytest.fixture(params=sorted(LIFTS))
def any_lift(request):
    return LIFTS[request.param]()


@pytest.fixture(params=sorted(MODELS))
def any_model(request):
    return MODELS[request.param]()


@pytest.fixture
def sphere_point():
    return TangentPoint([1.1, 0.4], [0.3, -0.5])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
