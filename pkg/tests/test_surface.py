import math

import numpy as np
import pytest

from bendkit import Chart, Grid, MongeChart, QuadratureConfig, chart_jet, total_mean_curvature
from bendkit.errors import DegenerateChartError
from bendkit.surface import unit_normal

from conftest import cylinder


def test_plane_jet():
    j = chart_jet(Chart("u", "v", "0", (0, 1), (0, 1)), np.array([0.2, 0.7]), np.array([0.1, 0.9]))
    np.testing.assert_array_equal(j.H, 0.0)
    np.testing.assert_array_equal(j.n, [[0, 0, 1], [0, 0, 1]])
    np.testing.assert_array_equal(j.dA, 1.0)


def _shape_operator_mean_curvature(c, u, v, h=1e-5):
    """Mean curvature from -dn expressed in the tangent basis, with dn by central differences."""
    def n(uu, vv):
        _, r_u, r_v = c.frame(uu, vv)
        return unit_normal(r_u, r_v)[0]
    n_u = (n(u + h, v) - n(u - h, v)) / (2 * h)
    n_v = (n(u, v + h) - n(u, v - h)) / (2 * h)
    _, r_u, r_v = c.frame(u, v)
    basis = np.column_stack([r_u, r_v])
    # dn = -S dr  ->  columns of -S in (r_u, r_v) coordinates
    S = -np.linalg.lstsq(basis, np.column_stack([n_u, n_v]), rcond=None)[0]
    # L = r_uu . n = -r_u . n_u etc. gives II = I S, so H = tr(I^-1 II)/2 = tr(S)/2
    return 0.5 * np.trace(S)


def test_cylinder_jet_against_shape_operator(rng):
    c = cylinder()
    for u, v in zip(rng.uniform(0, 4.7, 10), rng.uniform(0, 1, 10)):
        j = chart_jet(c, u, v)
        np.testing.assert_allclose(j.n, [math.cos(u), math.sin(u), 0.0], atol=1e-14)
        assert j.H == pytest.approx(-0.5, abs=1e-14)
        assert _shape_operator_mean_curvature(c, u, v) == pytest.approx(-0.5, abs=1e-8)


def test_monge_paraboloid_at_origin():
    m = MongeChart("u^2 + v^2", (-1, 1), (-1, 1))
    j = chart_jet(m, 0.0, 0.0)
    assert j.H == pytest.approx(2.0, abs=1e-14)
    np.testing.assert_array_equal(j.n, [0, 0, 1])
    assert _shape_operator_mean_curvature(m, 0.0, 0.0) == pytest.approx(2.0, abs=1e-7)


def test_monge_matches_generic(rng):
    m = MongeChart("sin(u)*v + u^2/3", (-1, 1), (-1, 1))
    g = Chart("u", "v", "sin(u)*v + u^2/3", (-1, 1), (-1, 1))
    u, v = rng.uniform(-1, 1, (2, 64))
    a, b = chart_jet(m, u, v), chart_jet(g, u, v)
    for name in ("r", "r_u", "r_v", "r_uu", "r_uv", "r_vv", "n", "H", "dA"):
        np.testing.assert_allclose(getattr(a, name), getattr(b, name), atol=1e-12, rtol=0)


def test_degenerate_chart_raises():
    c = Chart("u", "u", "0", (0, 1), (0, 1))
    with pytest.raises(DegenerateChartError):
        chart_jet(c, 0.5, 0.5)


def test_total_mean_curvature_examples():
    assert total_mean_curvature(cylinder((0.0, math.pi))) == pytest.approx(-math.pi / 2, abs=1e-6)
    assert abs(total_mean_curvature(Chart("u", "v", "0", (0, 2), (-1, 3)))) < 1e-12
    assert abs(total_mean_curvature(MongeChart("0", (-5, 1), (0, 0.5)))) < 1e-12


def test_total_mean_curvature_additive():
    mk = lambda ur: MongeChart("sin(u)*cos(v) + u*v/4", ur, (-1, 1))  # noqa: E731
    q = QuadratureConfig(abs_tol=1e-12)
    whole = total_mean_curvature(mk((-1.0, 1.5)), q)
    parts = total_mean_curvature(mk((-1.0, 0.3)), q) + total_mean_curvature(mk((0.3, 1.5)), q)
    assert abs(whole - parts) < 1e-9


def _random_chart(rng):
    a, b, c = rng.uniform(0.2, 1.0, 3)
    k = rng.integers(1, 4)
    return Chart(f"u + {a:.4f}*sin(v)", f"v + {b:.4f}*u*v/3", f"{c:.4f}*cos({k}*u)*exp(v/2)",
                 (-1, 1), (-1, 1))


def test_normal_orthogonal_on_random_charts(rng):
    for _ in range(20):
        c = _random_chart(rng)
        u, v = rng.uniform(-1, 1, (2, 100))
        j = chart_jet(c, u, v)
        assert np.abs(np.einsum("ij,ij->i", j.n, j.r_u)).max() < 1e-10
        assert np.abs(np.einsum("ij,ij->i", j.n, j.r_v)).max() < 1e-10
        np.testing.assert_allclose(np.linalg.norm(j.n, axis=1), 1.0, atol=1e-12)
        assert (j.E * j.G - j.F ** 2 > 0).all()


def test_grid_validation():
    assert Grid.parse("64x32") == Grid(64, 32)
    with pytest.raises(ValueError):
        Grid(1, 5)
    with pytest.raises(ValueError):
        Grid.parse("64by32")


def test_chart_rejects_degenerate_range():
    with pytest.raises(ValueError):
        Chart("u", "v", "0", (1, 1), (0, 1))
