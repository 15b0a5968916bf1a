import math
import warnings

import numpy as np
import pytest

from bendkit import (BendingField, Grid, MongeChart, RigidMotionSpec, classify, rotation_at,
                     rotation_field, rotation_monge, translation_at, translation_field,
                     translation_monge, trivial_bending)
from bendkit.darboux import RotationResidualWarning, check_residual, cross_matrix, monge_y3_forms
from bendkit.errors import ResidualTooLargeError

from conftest import cylinder, plane, plane_sine, torus_patch


def test_cylinder_rotation_and_translation(cyl):
    c, z = cyl
    np.testing.assert_allclose(rotation_at(c, z, math.pi / 2, 0.3).y, [0, 0, -1], atol=1e-15)
    np.testing.assert_allclose(translation_at(c, z, math.pi / 2, 0.3), [-0.5, math.pi / 4, 0], atol=1e-15)


def test_cylinder_fields_closed_form(cyl, rng):
    c, z = cyl
    u, v = rng.uniform(0, 4.7, 200), rng.uniform(0, 1, 200)
    y = rotation_field(c, z, u, v).y
    s = translation_field(c, z, u, v)
    zero = 0 * u
    np.testing.assert_allclose(y, np.column_stack([zero, zero, -np.sin(u)]), atol=1e-14)
    np.testing.assert_allclose(
        s, np.column_stack([-np.sin(u) ** 2 / 2, u / 2 + np.sin(2 * u) / 4, zero]), atol=1e-14)


def test_trivial_rotation_is_b(rng):
    for c in (cylinder(), torus_patch()):
        z = trivial_bending(RigidMotionSpec((1, 2, 3), (4, 5, 6)), c)
        u = rng.uniform(*c.u_range, 20)
        v = rng.uniform(*c.v_range, 20)
        np.testing.assert_allclose(rotation_field(c, z, u, v).y, np.tile([4, 5, 6], (20, 1)), atol=1e-12)
        np.testing.assert_allclose(translation_field(c, z, u, v), np.tile([1, 2, 3], (20, 1)), atol=1e-12)


def test_plane_sine_rotation():
    m = plane()
    z = plane_sine(m)
    np.testing.assert_allclose(rotation_at(m, z, math.pi / 2, 0.0).y, [1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(rotation_monge(m, z, math.pi / 2, 0.0), [1, 0, 0], atol=1e-15)


def test_constant_zeta_has_no_rotation():
    m = plane()
    np.testing.assert_array_equal(rotation_monge(m, BendingField("0", "0", "7"), 0.4, 1.1), [0, 0, 0])


def test_fredholm_structure(rng):
    for _ in range(100):
        w = rng.normal(size=3)
        assert np.linalg.norm(cross_matrix(w) @ w) < 1e-12
        y = rng.normal(size=3)
        np.testing.assert_allclose(cross_matrix(w) @ y, np.cross(y, w), atol=1e-14)


def _two_stage(r_u, r_v, z_u, z_v):
    """Particular solutions of each half plus their null directions, then intersect the two lines."""
    y1 = np.cross(r_u, z_u) / (r_u @ r_u)
    y2 = np.cross(r_v, z_v) / (r_v @ r_v)
    C, *_ = np.linalg.lstsq(np.column_stack([r_u, -r_v]), y2 - y1, rcond=None)
    return y1 + C[0] * r_u


def test_least_squares_matches_two_stage_construction(monge_case, rng):
    m, z = monge_case
    for u, v in zip(rng.uniform(*m.u_range, 50), rng.uniform(*m.v_range, 50)):
        _, r_u, r_v = m.frame(u, v)
        _, z_u, z_v = z.frame(u, v)
        np.testing.assert_allclose(rotation_at(m, z, u, v).y, _two_stage(r_u, r_v, z_u, z_v),
                                   atol=1e-12)


def test_monge_fast_path_matches_solver(monge_case):
    m, z = monge_case
    U, V = m.lattice(Grid(64, 64))
    sample = rotation_field(m, z, U, V)
    assert sample.residual.max() < 1e-9
    assert np.abs(rotation_monge(m, z, U, V) - sample.y).max() < 1e-10
    assert np.abs(translation_monge(m, z, U, V) - translation_field(m, z, U, V)).max() < 1e-12


def test_monge_y3_forms_agree(monge_case):
    m, z = monge_case
    U, V = m.lattice(Grid(40, 40))
    a, b = monge_y3_forms(m, z, U, V)
    assert np.abs(a - b).max() < 1e-12


def test_monge_y3_uses_f_v_in_second_form():
    # on the saddle with zeta = u^2 the form with f_u would differ from the solver
    m = MongeChart("u*v", (-1, 1.2), (-0.8, 1))
    z = BendingField("-u^2*v", "-u^3/3", "u^2", m)
    u, v = 0.7, -0.4
    y3 = rotation_at(m, z, u, v).y[2]
    xi_v, zeta_u = -u * u, 2 * u
    assert -xi_v - u * zeta_u == pytest.approx(y3, abs=1e-14)   # f_v = u
    assert abs(-xi_v - v * zeta_u - y3) > 0.1                     # f_u = v


def test_origin_covariance(cyl, rng):
    c, z = cyl
    u, v = rng.uniform(0, 4.7, 50), rng.uniform(0, 1, 50)
    shift = np.array([5.0, -2.0, 7.0])
    y = rotation_field(c, z, u, v).y
    s0 = translation_field(c, z, u, v)
    s1 = translation_field(c, z, u, v, origin=shift)
    assert np.abs(s1 - (s0 + np.cross(y, shift))).max() < 1e-12


def test_non_bending_is_rejected():
    m = MongeChart("0", (0, 1), (0, 1))
    z = BendingField("u", "0", "0", m)
    U, V = m.lattice(Grid(8, 8))
    assert rotation_field(m, z, U, V, strict=False).residual.max() > 1e-6
    with pytest.raises(ResidualTooLargeError) as ei:
        rotation_at(m, z, 0.5, 0.5)
    assert ei.value.residual > 1e-6


def test_residual_thresholds():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        check_residual(np.array([1e-10]), 0.0, 0.0)
    with pytest.warns(RotationResidualWarning):
        check_residual(np.array([1e-8]), 0.0, 0.0)
    with pytest.raises(ResidualTooLargeError):
        check_residual(np.array([1e-5]), 0.0, 0.0)


def test_classify_examples(cyl):
    c, z = cyl
    v = classify(c, z)
    assert not v.is_trivial and v.deviation > 0.5
    t = classify(c, trivial_bending(RigidMotionSpec((1, 2, 3), (0, 0, 1)), c))
    assert t.is_trivial
    np.testing.assert_allclose(t.a, [1, 2, 3], atol=1e-9)
    np.testing.assert_allclose(t.b, [0, 0, 1], atol=1e-9)
    zero = classify(c, BendingField("0", "0", "0", c))
    assert zero.is_trivial and not zero.a.any() and not zero.b.any()
