import math
import warnings

import numpy as np
import pytest

from bendkit import (BendingField, Grid, MongeChart, QuadratureConfig, RigidMotionSpec,
                     line_integral, loop_audit, loop_closure_defect, potential_grid,
                     trivial_bending, variation_estimates, variation_fd, variation_line,
                     variation_monge_double)
from bendkit.curves import circle, point, random_loop, rectangle_boundary, segment
from bendkit.errors import PathIndependenceError, QuadratureError
from bendkit.integrals import (boundary_circulation, green_double_integral, phi_at,
                               rotation_evaluator)
from bendkit.quadrature import integrate, integrate2d

from conftest import cylinder, paraboloid, plane, plane_sine, saddle, saddle_bending, torus_patch


# quadrature

def test_integrate_polynomial_and_reversed():
    assert integrate(lambda t: t ** 5, 0, 2) == pytest.approx(64 / 6, abs=1e-12)
    assert integrate(lambda t: t ** 5, 2, 0) == pytest.approx(-64 / 6, abs=1e-12)
    assert integrate(np.cos, 1.0, 1.0) == 0.0


def test_integrate_peaked():
    got = integrate(lambda t: 1 / (1e-4 + t * t), -1, 1)
    assert got == pytest.approx(2 / 1e-2 * math.atan(1 / 1e-2), rel=1e-12)


def test_integrate2d():
    got = integrate2d(lambda u, v: np.sin(u) * np.exp(v), (0, math.pi), (0, 1))
    assert got == pytest.approx(2 * (math.e - 1), abs=1e-12)


def test_integrate_depth_exhaustion():
    with pytest.raises(QuadratureError):
        integrate(lambda t: np.sign(t - 0.3), 0, 1, QuadratureConfig(abs_tol=1e-14, max_depth=2))


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(abs_tol=0)
    with pytest.raises(ValueError):
        QuadratureConfig(max_depth=0)


# line integrals

def test_line_integral_trivial_fields(cyl):
    c, _ = cyl
    zero = lambda u, v: np.zeros(np.shape(u) + (3,))  # noqa: E731
    const = lambda u, v: np.broadcast_to([1.0, -2.0, 0.5], np.shape(u) + (3,))  # noqa: E731
    loop = circle((2.0, 0.5), 0.3)
    assert line_integral(zero, c, loop) == 0.0
    assert abs(line_integral(const, c, loop)) < 1e-10


def test_rotation_along_v_segment(cyl):
    c, z = cyl
    u0 = 1.1
    got = line_integral(rotation_evaluator(c, z), c, segment((u0, 0.2), (u0, 0.9)))
    assert got == pytest.approx(-math.sin(u0) * 0.7, abs=1e-13)


# three estimators

def test_plane_sine_estimators():
    m = plane()
    z = plane_sine(m)
    assert variation_line(m, z) == pytest.approx(-4, abs=1e-8)
    assert variation_monge_double(m, z) == pytest.approx(-4, abs=1e-8)
    assert variation_fd(m, z, 1e-4) == pytest.approx(-4, abs=1e-4)


def test_trivial_bending_has_no_variation(rng):
    for c in (cylinder(), torus_patch(), paraboloid()):
        z = trivial_bending(RigidMotionSpec(tuple(rng.normal(size=3)), tuple(rng.normal(size=3))), c)
        assert abs(variation_line(c, z)) < 1e-10
        assert abs(variation_fd(c, z, 1e-4)) < 1e-6


def test_zero_and_harmonic():
    m = plane()
    zero = BendingField("0", "0", "0", m)
    assert variation_line(m, zero) == 0.0
    assert variation_fd(m, zero) == 0.0
    harmonic = BendingField("0", "0", "u^2 - v^2", m)
    assert abs(variation_monge_double(m, harmonic)) < 1e-10
    assert abs(variation_line(m, harmonic)) < 1e-10
    assert variation_monge_double(m, BendingField("0", "0", "3", m)) == 0.0


def test_three_estimators_agree(monge_case):
    m, z = monge_case
    est = variation_estimates(m, z)
    d_double, d_fd, ok = est.agreement()
    assert d_double < 1e-8
    assert d_fd < 1e-4 * (1 + abs(est.line))
    assert ok


def test_known_saddle_and_paraboloid_values():
    m = saddle()
    assert variation_line(m, saddle_bending(m)) == pytest.approx(-0.3550629822, abs=1e-9)
    p = paraboloid()
    z = BendingField("-u^2*v - v^3/3", "-u*v^2 - u^3/3", "u*v", p)
    # (1 + f_v^2) * 0 - 2 f_u f_v * 1 + (1 + f_u^2) * 0 = -8uv, halved and integrated
    assert variation_line(p, z) == pytest.approx(-0.1584, abs=1e-12)


def test_green_identity(monge_case):
    m, z = monge_case
    assert abs(boundary_circulation(m, z) - green_double_integral(m, z)) < 1e-8


def test_boundary_is_counterclockwise():
    pieces = rectangle_boundary((0, 2), (0, 1))
    area = sum(integrate(lambda t, p=p: 0.5 * (p(t)[0] * p(t)[3] - p(t)[1] * p(t)[2]), *p.t_range)
               for p in pieces)
    assert area == pytest.approx(2.0, abs=1e-14)


# loop closure

def test_cylinder_circle_closure(cyl):
    c, z = cyl
    loop = circle((math.pi, 0.5), 0.3)
    assert abs(loop_closure_defect(c, z, loop)) < 1e-8
    assert abs(loop_closure_defect(c, z, loop, origin=(5, -2, 7))) < 1e-8
    assert loop_closure_defect(c, z, point((1.0, 0.5))) == 0.0


def test_random_loops_stay_inside(rng):
    for _ in range(50):
        lp = random_loop(rng, (0, 1), (2, 3))
        t = np.linspace(*lp.t_range, 400)
        u, v, _, _ = lp(t)
        assert u.min() > 0 and u.max() < 1 and v.min() > 2 and v.max() < 3
        assert lp.is_closed()


def test_loop_audit(monge_case):
    m, z = monge_case
    audit = loop_audit(m, z, n_loops=30, origins=((0, 0, 0), (1, -3, 2)), seed=7)
    assert audit.defects.shape == (2, 30)
    assert audit.passed


def test_rotation_field_circulation_is_not_closed(cyl):
    # y is not exact in general: this is what makes the variation nonzero
    c, z = cyl
    loop = [segment((0.5, 0.0), (2.5, 0.0)), segment((2.5, 0.0), (2.5, 1.0)),
            segment((2.5, 1.0), (0.5, 1.0)), segment((0.5, 1.0), (0.5, 0.0))]
    got = line_integral(rotation_evaluator(c, z), c, loop)
    assert got == pytest.approx(-math.sin(2.5) + math.sin(0.5), abs=1e-12)


# potential

def test_cylinder_potential_values(cyl):
    c, z = cyl
    pg = potential_grid(c, z, Grid(13, 5), base=(0.0, 0.0))
    assert pg.phi[0, 0] == 0.0
    i_half = int(np.argmin(np.abs(pg.us - math.pi / 2)))
    i_pi = int(np.argmin(np.abs(pg.us - math.pi)))
    assert pg.us[i_half] == pytest.approx(math.pi / 2, abs=1e-15)
    np.testing.assert_allclose(pg.phi[i_half], math.pi / 4, atol=1e-8)
    np.testing.assert_allclose(pg.phi[i_pi], 0.0, atol=1e-8)
    assert pg.spot_discrepancy < 1e-8


def test_phi_at_orders_agree(cyl):
    c, z = cyl
    a = phi_at(c, z, 2.2, 0.7, (0.3, 0.1), order="uv")
    b = phi_at(c, z, 2.2, 0.7, (0.3, 0.1), order="vu")
    assert abs(a - b) < 1e-10


def test_plane_normal_bending_potential_vanishes():
    m = plane()
    pg = potential_grid(m, plane_sine(m), Grid(9, 9))
    assert np.abs(pg.phi).max() < 1e-14


def test_interior_base(cyl):
    c, z = cyl
    pg = potential_grid(c, z, Grid(7, 7), base=(c.u_range[1] / 2, 0.5))
    full = potential_grid(c, z, Grid(7, 7))
    i = 3
    np.testing.assert_allclose(pg.phi, full.phi - full.phi[i, i], atol=1e-10)


def test_base_outside_domain(cyl):
    c, z = cyl
    with pytest.raises(ValueError):
        potential_grid(c, z, Grid(4, 4), base=(10.0, 0.0))


def test_corrupted_field_breaks_path_independence():
    c = cylinder()
    z = BendingField("sin(u)^2/2", "u/2 - sin(2*u)/4", "1e-7*u^2", c)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(PathIndependenceError) as ei:
            potential_grid(c, z, Grid(9, 5))
    assert ei.value.discrepancy > ei.value.tol
