import math

import numpy as np
import pytest

from bendkit import BendingField, Chart, MongeChart

HALF_PI = math.pi / 2


def cylinder(u_range=(0.0, 3 * math.pi / 2), v_range=(0.0, 1.0)):
    return Chart("cos(u)", "sin(u)", "v", u_range, v_range)


def cylinder_bending(c=None):
    return BendingField("sin(u)^2/2", "u/2 - sin(2*u)/4", "0", c)


def plane(u_range=(0.0, math.pi), v_range=(0.0, math.pi)):
    return MongeChart("0", u_range, v_range)


def plane_sine(m=None):
    return BendingField("0", "0", "sin(u)*sin(v)", m)


SADDLE_DOMAIN = ((-1.0, 1.2), (-0.8, 1.0))


def saddle():
    return MongeChart("u*v", *SADDLE_DOMAIN)


def saddle_bending(m=None):
    return BendingField("-v*sin(u)", "-u*sin(u) - 2*cos(u)", "sin(u)", m)


def saddle_bending_poly(m=None):
    return BendingField("-u^2*v", "-u^3/3", "u^2", m)


def paraboloid():
    return MongeChart("u^2 + v^2", *SADDLE_DOMAIN)


def paraboloid_bending(m=None):
    return BendingField("-u^2*v - v^3/3", "-u*v^2 - u^3/3", "u*v", m)


def torus_patch():
    return Chart("(2 + cos(v))*cos(u)", "(2 + cos(v))*sin(u)", "sin(v)", (0.1, 2.0), (-1.0, 1.2))


MONGE_CASES = {
    "plane_sine": (plane, plane_sine),
    "saddle": (saddle, saddle_bending),
    "saddle_poly": (saddle, saddle_bending_poly),
    "paraboloid": (paraboloid, paraboloid_bending),
}


_SAFE_UNARY = ["sin", "cos", "exp", "sinh", "cosh"]


def random_expr(rng, depth=0):
    """Smooth random expressions that stay finite on [-1, 1]^2."""
    k = rng.integers(0, 10 if depth < 4 else 3)
    if k == 0:
        return f"{rng.uniform(-2, 2):.6f}"
    if k in (1, 2):
        return "u" if k == 1 else "v"
    if k in (3, 4):
        return f"{rng.choice(_SAFE_UNARY)}({random_expr(rng, depth + 1)}/3)"
    if k == 5:
        return f"sqrt(2 + sin({random_expr(rng, depth + 1)}))"
    if k == 6:
        return f"log(3 + cos({random_expr(rng, depth + 1)}))"
    if k == 7:
        return f"({random_expr(rng, depth + 1)})^{int(rng.integers(1, 4))}"
    if k == 8:
        return f"({random_expr(rng, depth + 1)}) / (2 + u*u + v*v)"
    op = rng.choice(["+", "-", "*"])
    return f"({random_expr(rng, depth + 1)}) {op} ({random_expr(rng, depth + 1)})"


@pytest.fixture
def cyl():
    c = cylinder()
    return c, cylinder_bending(c)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=sorted(MONGE_CASES))
def monge_case(request):
    mk, bk = MONGE_CASES[request.param]
    m = mk()
    return m, bk(m)
