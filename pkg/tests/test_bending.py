import math

import numpy as np
import pytest

from bendkit import (BendingField, Chart, Curve, MongeChart, RigidMotionSpec, bending_residuals,
                     check_bending, curve_length_variation, deform, trivial_bending)
from bendkit.bending import arc_length
from bendkit.curves import point, random_loop, segment

from conftest import (MONGE_CASES, cylinder, cylinder_bending, paraboloid, paraboloid_bending,
                      plane, plane_sine, torus_patch)


def test_plane_sine_residuals_vanish():
    m = plane()
    res = check_bending(m, plane_sine(m))
    assert res.passed and res.max_residual == 0.0


def test_stretch_is_not_a_bending():
    m = MongeChart("0", (0, 1), (0, 1))
    res = check_bending(m, BendingField("u", "0", "0"))
    assert not res.passed
    assert res.components == (1.0, 0.0, 0.0)


def test_cylinder_bending_residuals(cyl):
    c, z = cyl
    res = check_bending(c, z)
    assert res.max_residual < 1e-10


def test_monge_cases_are_bendings(monge_case):
    m, z = monge_case
    assert check_bending(m, z).max_residual < 1e-10


def test_residual_linearity(rng):
    c = cylinder()
    z1 = BendingField("u*v", "sin(u)", "v^2")
    z2 = BendingField("cos(v)", "u^3", "exp(u/4)")
    u, v = rng.uniform(0, 4, 100), rng.uniform(0, 1, 100)
    total = np.stack(bending_residuals(c, z1 + z2, u, v))
    parts = np.stack(bending_residuals(c, z1, u, v)) + np.stack(bending_residuals(c, z2, u, v))
    assert np.abs(total - parts).max() < 1e-12


def test_trivial_bending_examples(rng):
    c = cylinder()
    z = trivial_bending(RigidMotionSpec((1, 2, 3), (0, 0, 0)), c)
    np.testing.assert_array_equal(z.value(0.3, 0.4), [1, 2, 3])
    z = trivial_bending(RigidMotionSpec((0, 0, 0), (0, 0, 1)), c)
    u = rng.uniform(0, 4, 20)
    np.testing.assert_allclose(z.value(u, 0.5), np.column_stack([-np.sin(u), np.cos(u), 0 * u]), atol=1e-15)
    m = plane()
    z = trivial_bending(RigidMotionSpec((1, 0, 0), (0, 1, 0)), m)
    u, v = rng.uniform(0, 3, (2, 100))
    assert np.abs(np.stack(bending_residuals(m, z, u, v))).max() == 0.0


def test_trivial_bendings_always_residual_free(rng):
    for c in (cylinder(), torus_patch(), paraboloid()):
        for _ in range(5):
            a, b = rng.normal(size=3), rng.normal(size=3)
            z = trivial_bending(RigidMotionSpec(tuple(a), tuple(b)), c)
            assert check_bending(c, z, tol=1e-12).passed


def test_deform_identity_at_zero(cyl, rng):
    c, z = cyl
    d = deform(c, z, 0.0)
    u, v = rng.uniform(0, 4, 30), rng.uniform(0, 1, 30)
    np.testing.assert_array_equal(d.position(u, v), c.position(u, v))


def test_deform_plane_normal_stays_monge(rng):
    m = plane()
    d = deform(m, plane_sine(m), 0.1)
    assert isinstance(d, MongeChart)
    u, v = rng.uniform(0, 3, (2, 20))
    np.testing.assert_allclose(d.f(u, v), 0.1 * np.sin(u) * np.sin(v), atol=1e-16)


def test_deformed_length_second_order(cyl):
    c, z = cyl
    gamma = segment((0.0, 0.0), (math.pi, 0.0))
    assert abs(arc_length(deform(c, z, 1e-4), gamma) - math.pi) < 1e-7


def test_length_variation_of_stretch():
    m = MongeChart("0", (0, 1), (0, 1))
    z = BendingField("u", "0", "0")
    gamma = segment((0.0, 0.0), (1.0, 0.0))
    assert curve_length_variation(m, z, gamma) == pytest.approx(1.0, abs=1e-12)
    h = 1e-5
    fd = (arc_length(deform(m, z, h), gamma) - arc_length(deform(m, z, -h), gamma)) / (2 * h)
    assert fd == pytest.approx(1.0, abs=1e-8)


def test_length_variation_point_curve(cyl):
    c, z = cyl
    assert curve_length_variation(c, z, point((1.0, 0.5))) == 0.0


def _cases():
    c = cylinder()
    yield c, cylinder_bending(c)
    for mk, bk in MONGE_CASES.values():
        m = mk()
        yield m, bk(m)


def test_length_variation_vanishes_for_bendings(rng):
    for c, z in _cases():
        assert check_bending(c, z).passed
        for _ in range(10):
            gamma = random_loop(rng, c.u_range, c.v_range) if rng.random() < 0.5 else segment(
                (rng.uniform(*c.u_range), rng.uniform(*c.v_range)),
                (rng.uniform(*c.u_range), rng.uniform(*c.v_range)))
            assert abs(curve_length_variation(c, z, gamma)) < 1e-9


def test_curve_parameter_is_written_u():
    gamma = Curve.parse("cos(u)", "sin(u)", (0, math.pi))
    cu, cv, du, dv = gamma(np.array([0.0, math.pi / 2]))
    np.testing.assert_allclose(cu, [1, 0], atol=1e-15)
    np.testing.assert_allclose(dv, [1, 0], atol=1e-15)
    with pytest.raises(ValueError):
        Curve.parse("v", "u")
