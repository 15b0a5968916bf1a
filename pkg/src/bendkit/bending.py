"""Candidate variation fields z and the infinitesimal-bending test.

z is an infinitesimal bending of r when the three quantities

    rho1 = r_u . z_u,   rho2 = r_u . z_v + r_v . z_u,   rho3 = r_v . z_v

vanish identically, i.e. every curve keeps its length to first order under
r + t z.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import quadrature
from .curves import Curve
from .expr import ZERO, Const, Expr, ExprLike, as_expr, derive
from .program import Program
from .surface import Chart, Grid, MongeChart

BENDING_TOL = 1e-10


def _vec(out, start):
    return np.moveaxis(out[start:start + 3], 0, -1)


class BendingField:
    """Vector field ``z = (xi, eta, zeta)`` defined on the parameter domain of ``chart``."""

    def __init__(self, xi: ExprLike, eta: ExprLike, zeta: ExprLike, chart: Chart | None = None):
        self.comps = (as_expr(xi), as_expr(eta), as_expr(zeta))
        self.chart = chart

    @property
    def xi(self) -> Expr:
        return self.comps[0]

    @property
    def eta(self) -> Expr:
        return self.comps[1]

    @property
    def zeta(self) -> Expr:
        return self.comps[2]

    def __repr__(self):
        return "BendingField({}, {}, {})".format(*(str(c) for c in self.comps))

    def __add__(self, other: "BendingField") -> "BendingField":
        return BendingField(*(a + b for a, b in zip(self.comps, other.comps)), chart=self.chart)

    def scaled(self, t: float) -> "BendingField":
        return BendingField(*(Const(float(t)) * c for c in self.comps), chart=self.chart)

    @cached_property
    def d_u(self):
        return tuple(derive(c, "u") for c in self.comps)

    @cached_property
    def d_v(self):
        return tuple(derive(c, "v") for c in self.comps)

    @cached_property
    def _first_order(self):
        return Program(self.comps + self.d_u + self.d_v)

    @cached_property
    def zeta_hessian(self):
        """Program for ``zeta_uu, zeta_uv, zeta_vv``."""
        zu, zv = self.d_u[2], self.d_v[2]
        return Program([derive(zu, "u"), derive(zu, "v"), derive(zv, "v")])

    def frame(self, u, v):
        """``(z, z_u, z_v)``, each of shape ``(..., 3)``."""
        out = self._first_order(u, v)
        return _vec(out, 0), _vec(out, 3), _vec(out, 6)

    def value(self, u, v):
        return self.frame(u, v)[0]


@dataclass(frozen=True)
class RigidMotionSpec:
    """Velocity field ``a + b x r`` of a rigid motion."""

    a: tuple = (0.0, 0.0, 0.0)
    b: tuple = (0.0, 0.0, 0.0)


def bending_residuals(c: Chart, z: BendingField, u, v):
    """``(rho1, rho2, rho3)`` at (arrays of) parameter points."""
    _, r_u, r_v = c.frame(u, v)
    _, z_u, z_v = z.frame(u, v)
    dot = lambda p, q: np.einsum("...i,...i", p, q)  # noqa: E731
    return dot(r_u, z_u), dot(r_u, z_v) + dot(r_v, z_u), dot(r_v, z_v)


@dataclass(frozen=True)
class BendingCheck:
    max_residual: float
    worst: tuple          # (u, v) of the largest residual
    components: tuple     # max |rho_i| separately
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol


def check_bending(c: Chart, z: BendingField, grid: Grid = Grid(), tol: float = BENDING_TOL) -> BendingCheck:
    """Residual sweep over the lattice; passes when every ``|rho_i| < tol``."""
    U, V = c.lattice(grid)
    rho = np.abs(np.stack(bending_residuals(c, z, U, V)))
    flat = rho.max(axis=0)
    k = np.unravel_index(np.argmax(flat), flat.shape)
    return BendingCheck(float(flat[k]), (float(U[k]), float(V[k])),
                        tuple(float(x) for x in rho.reshape(3, -1).max(axis=1)), tol)


def trivial_bending(m: RigidMotionSpec, c: Chart) -> BendingField:
    """Symbolic ``a + b x r`` on the chart's coordinate expressions."""
    a = [Const(float(x)) for x in m.a]
    b = [Const(float(x)) for x in m.b]
    x, y, z = c.coords
    return BendingField(a[0] + (b[1] * z - b[2] * y),
                        a[1] + (b[2] * x - b[0] * z),
                        a[2] + (b[0] * y - b[1] * x), chart=c)


def _is_zero(e: Expr) -> bool:
    return isinstance(e, Const) and e.value == 0.0


def deform(c: Chart, z: BendingField, t: float) -> Chart:
    """The chart ``r + t z``. Monge charts under vertical fields stay Monge."""
    tc = Const(float(t))
    if isinstance(c, MongeChart) and _is_zero(z.xi) and _is_zero(z.eta):
        return MongeChart(c.f + tc * z.zeta, c.u_range, c.v_range)
    if t == 0.0:
        return Chart(*c.coords, c.u_range, c.v_range)
    return Chart(*(rc + tc * zc for rc, zc in zip(c.coords, z.comps)), c.u_range, c.v_range)


def _curve_tangents(c: Chart, z: BendingField, gamma: Curve, t):
    cu, cv, du, dv = gamma(t)
    _, r_u, r_v = c.frame(cu, cv)
    dr = r_u * du[:, None] + r_v * dv[:, None]
    if z is None:
        return dr, None
    _, z_u, z_v = z.frame(cu, cv)
    return dr, z_u * du[:, None] + z_v * dv[:, None]


def arc_length(c: Chart, gamma: Curve, q=quadrature.DEFAULT) -> float:
    def integrand(t):
        dr, _ = _curve_tangents(c, None, gamma, t)
        return np.linalg.norm(dr, axis=-1)
    return quadrature.integrate(integrand, *gamma.t_range, q)


def curve_length_variation(c: Chart, z: BendingField, gamma: Curve, q=quadrature.DEFAULT) -> float:
    """``d/dt`` at 0 of the length of ``r(gamma) + t z(gamma)``.

    Integrates the exact derivative ``(dr . dz) / |dr|``; stationary points of
    the curve (``|dr| = 0``) contribute nothing.
    """
    def integrand(t):
        dr, dz = _curve_tangents(c, z, gamma, t)
        speed = np.linalg.norm(dr, axis=-1)
        num = np.einsum("...i,...i", dr, dz)
        return np.divide(num, speed, out=np.zeros_like(num), where=speed > 0)
    return quadrature.integrate(integrand, *gamma.t_range, q)


ZERO_FIELD = BendingField(ZERO, ZERO, ZERO)
