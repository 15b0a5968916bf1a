"""Line integrals of the rotation/translation fields and the quantities built on them.

Three independent estimators of the first variation of total mean curvature
are provided:

* ``variation_line``: -1/2 times the circulation of y around the domain boundary,
* ``variation_fd``: central difference of total mean curvature along r + t z,
* ``variation_monge_double``: on graph patches, the area integral
  1/2 * integral of (1 + f_v^2) zeta_uu - 2 f_u f_v zeta_uv + (1 + f_u^2) zeta_vv.

The domain boundary is traversed counterclockwise in the (u, v) plane.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import quadrature
from .bending import BendingField, deform
from .curves import Curve, random_loop, rectangle_boundary
from .darboux import check_residual, solve_rotation
from .errors import PathIndependenceError
from .expr import derive
from .program import Program
from .quadrature import QuadratureConfig
from .surface import Chart, Grid, MongeChart, total_mean_curvature, unit_normal

ORIGIN = (0.0, 0.0, 0.0)
FD_STEP = 1e-4


def _dot(p, q):
    return np.einsum("...i,...i", p, q)


def rotation_evaluator(c: Chart, z: BendingField, strict: bool = True):
    """Vectorised ``(u, v) -> y``."""
    def y(u, v):
        _, r_u, r_v = c.frame(u, v)
        unit_normal(r_u, r_v)
        _, z_u, z_v = z.frame(u, v)
        sample = solve_rotation(r_u, r_v, z_u, z_v)
        if strict:
            check_residual(sample.residual, u, v)
        return sample.y
    return y


def translation_evaluator(c: Chart, z: BendingField, origin=ORIGIN, strict: bool = True):
    """Vectorised ``(u, v) -> s = z - y x (r - origin)``."""
    o = np.asarray(origin, dtype=float)

    def s(u, v):
        r, r_u, r_v = c.frame(u, v)
        unit_normal(r_u, r_v)
        zz, z_u, z_v = z.frame(u, v)
        sample = solve_rotation(r_u, r_v, z_u, z_v)
        if strict:
            check_residual(sample.residual, u, v)
        return zz - np.cross(sample.y, r - o)
    return s


def line_integral(fld, c: Chart, curve, q: QuadratureConfig = quadrature.DEFAULT) -> float:
    """Integral of ``F(r(gamma(t))) . d r(gamma(t))``.

    ``fld`` maps parameter points ``(u, v)`` to 3-vectors. ``curve`` is a
    :class:`Curve` or a sequence of them (a piecewise smooth path).
    """
    if not isinstance(curve, Curve):
        return sum(line_integral(fld, c, piece, q) for piece in curve)

    def integrand(t):
        cu, cv, du, dv = curve(t)
        _, r_u, r_v = c.frame(cu, cv)
        dr = r_u * du[:, None] + r_v * dv[:, None]
        return _dot(fld(cu, cv), dr)
    return quadrature.integrate(integrand, *curve.t_range, q)


def boundary_circulation(c: Chart, z: BendingField, q: QuadratureConfig = quadrature.DEFAULT) -> float:
    """Counterclockwise circulation of the rotation field around the domain boundary."""
    return line_integral(rotation_evaluator(c, z), c, rectangle_boundary(c.u_range, c.v_range), q)


def variation_line(c: Chart, z: BendingField, q: QuadratureConfig = quadrature.DEFAULT) -> float:
    return -0.5 * boundary_circulation(c, z, q)


def variation_fd(c: Chart, z: BendingField, h: float = FD_STEP,
                 q: QuadratureConfig = quadrature.DEFAULT) -> float:
    """Central difference of total mean curvature along r + t z; truncation O(h^2)."""
    plus = total_mean_curvature(deform(c, z, h), q)
    minus = total_mean_curvature(deform(c, z, -h), q)
    return (plus - minus) / (2 * h)


def variation_monge_double(m: MongeChart, z: BendingField,
                           q: QuadratureConfig = quadrature.DEFAULT) -> float:
    def integrand(u, v):
        _, fu, fv, *_ = m.f_derivatives(u, v)
        zuu, zuv, zvv = z.zeta_hessian(u, v)
        return (1 + fv * fv) * zuu - 2 * fu * fv * zuv + (1 + fu * fu) * zvv
    return 0.5 * quadrature.integrate2d(integrand, m.u_range, m.v_range, q)


def green_integrand(m: MongeChart, z: BendingField):
    """Expression for ``Q_u - P_v`` with ``P = y1 + f_u y3``, ``Q = y2 + f_v y3``.

    ``y`` is the closed-form rotation field of the graph patch, so the area
    integral of this expression equals the boundary circulation of y.
    """
    f = m.f
    fu, fv = derive(f, "u"), derive(f, "v")
    y1 = derive(z.zeta, "v")
    y2 = -derive(z.zeta, "u")
    y3 = derive(z.eta, "u") + fu * derive(z.zeta, "v")
    P = y1 + fu * y3
    Q = y2 + fv * y3
    return derive(Q, "u") - derive(P, "v")


def green_double_integral(m: MongeChart, z: BendingField,
                          q: QuadratureConfig = quadrature.DEFAULT) -> float:
    prog = Program([green_integrand(m, z)])
    return quadrature.integrate2d(lambda u, v: prog.run(u, v)[0], m.u_range, m.v_range, q)


@dataclass
class VariationEstimates:
    line: float
    fd: float
    monge_double: float | None = None
    fd_step: float = FD_STEP

    def agreement(self):
        """``(line vs double, line vs fd)`` discrepancies and whether both are in tolerance."""
        d_fd = abs(self.line - self.fd)
        d_double = None if self.monge_double is None else abs(self.line - self.monge_double)
        ok = d_fd < 1e-4 * (1 + abs(self.line)) and (d_double is None or d_double < 1e-8)
        return d_double, d_fd, ok


def variation_estimates(c: Chart, z: BendingField, h: float = FD_STEP,
                        q: QuadratureConfig = quadrature.DEFAULT) -> VariationEstimates:
    line = variation_line(c, z, q)
    fd = variation_fd(c, z, h, q)
    double = variation_monge_double(c, z, q) if isinstance(c, MongeChart) else None
    return VariationEstimates(line, fd, double, h)


def closure_tolerance(q: QuadratureConfig) -> float:
    return max(1e-8, 10 * q.abs_tol)


def loop_closure_defect(c: Chart, z: BendingField, loop, origin=ORIGIN,
                        q: QuadratureConfig = quadrature.DEFAULT) -> float:
    """Circulation of the translation field around a closed loop (ideally 0)."""
    return line_integral(translation_evaluator(c, z, origin), c, loop, q)


@dataclass(frozen=True)
class LoopAudit:
    defects: np.ndarray   # (n_origins, n_loops)
    origins: tuple
    tol: float

    @property
    def max_defect(self) -> float:
        return float(np.abs(self.defects).max()) if self.defects.size else 0.0

    @property
    def passed(self) -> bool:
        return self.max_defect < self.tol


def loop_audit(c: Chart, z: BendingField, n_loops: int = 100, origins=(ORIGIN,),
               seed: int = 42, q: QuadratureConfig = quadrature.DEFAULT) -> LoopAudit:
    """Closure defects over ``n_loops`` seeded random smooth loops for each origin."""
    rng = np.random.default_rng(seed)
    loops = [random_loop(rng, c.u_range, c.v_range) for _ in range(n_loops)]
    defects = np.array([[loop_closure_defect(c, z, lp, o, q) for lp in loops] for o in origins])
    return LoopAudit(defects.reshape(len(origins), n_loops), tuple(tuple(o) for o in origins),
                     closure_tolerance(q))


# ---------------------------------------------------------------------------
# potential

def potential_gradient(c: Chart, z: BendingField, origin=ORIGIN, strict: bool = True):
    """Vectorised ``(u, v) -> (phi_u, phi_v) = (s . r_u, s . r_v)``."""
    s = translation_evaluator(c, z, origin, strict)

    def grad(u, v):
        _, r_u, r_v = c.frame(u, v)
        sv = s(u, v)
        return _dot(sv, r_u), _dot(sv, r_v)
    return grad


def _path_u(grad, v0, a, b, q):
    return quadrature.integrate(lambda t: grad(t, np.full_like(t, v0))[0], a, b, q)


def _path_v(grad, u0, a, b, q):
    return quadrature.integrate(lambda t: grad(np.full_like(t, u0), t)[1], a, b, q)


def _cumulative(edge, knots, start):
    """Values of the primitive of ``edge`` at sorted ``knots``, zero at ``start``."""
    pts = np.union1d(knots, [start])
    k0 = int(np.searchsorted(pts, start))
    vals = np.zeros(pts.size)
    for k in range(k0 + 1, pts.size):
        vals[k] = vals[k - 1] + edge(pts[k - 1], pts[k])
    for k in range(k0 - 1, -1, -1):
        vals[k] = vals[k + 1] - edge(pts[k], pts[k + 1])
    return vals[np.searchsorted(pts, knots)]


@dataclass(frozen=True)
class PotentialGrid:
    us: np.ndarray
    vs: np.ndarray
    phi: np.ndarray          # (nu, nv)
    base: tuple
    origin: tuple
    spot_discrepancy: float  # max |phi - phi along the transposed path| over spot checks
    spot_points: tuple = ()

    def rows(self):
        U, V = np.meshgrid(self.us, self.vs, indexing="ij")
        return np.column_stack([U.ravel(), V.ravel(), self.phi.ravel()])


def phi_at(c: Chart, z: BendingField, u: float, v: float, base, origin=ORIGIN,
           q: QuadratureConfig = quadrature.DEFAULT, order: str = "uv", strict: bool = True) -> float:
    """Potential at one point along an axis-parallel two-leg path from ``base``.

    ``order='uv'`` walks along u at the base v first; ``'vu'`` walks along v first.
    """
    grad = potential_gradient(c, z, origin, strict)
    bu, bv = base
    if order == "uv":
        return _path_u(grad, bv, bu, u, q) + _path_v(grad, u, bv, v, q)
    return _path_v(grad, bu, bv, v, q) + _path_u(grad, v, bu, u, q)


def potential_grid(c: Chart, z: BendingField, grid: Grid = Grid(), base=None, origin=ORIGIN,
                   q: QuadratureConfig = quadrature.DEFAULT, n_checks: int = 10, seed: int = 42,
                   check_tol: float | None = None, strict: bool = True) -> PotentialGrid:
    """Potential of the translation field on the lattice, zero at ``base``.

    Accumulated edge by edge: along u at the base v, then up each column.
    ``n_checks`` random lattice samples are recomputed along the transposed
    path (v first, then u); disagreement above ``check_tol`` (default
    ``10 * q.abs_tol``) raises :class:`PathIndependenceError`.
    """
    if base is None:
        base = (c.u_range[0], c.v_range[0])
    bu, bv = float(base[0]), float(base[1])
    if not c.contains(bu, bv):
        raise ValueError(f"base point {base} lies outside the chart domain")
    grad = potential_gradient(c, z, origin, strict)
    us = np.linspace(*c.u_range, grid.nu)
    vs = np.linspace(*c.v_range, grid.nv)
    row = _cumulative(lambda a, b: _path_u(grad, bv, a, b, q), us, bu)
    phi = np.empty((grid.nu, grid.nv))
    for i, u in enumerate(us):
        phi[i] = row[i] + _cumulative(lambda a, b: _path_v(grad, u, a, b, q), vs, bv)

    tol = 10 * q.abs_tol if check_tol is None else check_tol
    rng = np.random.default_rng(seed)
    worst, picked = 0.0, []
    for _ in range(n_checks):
        i, j = int(rng.integers(grid.nu)), int(rng.integers(grid.nv))
        alt = _path_v(grad, bu, bv, vs[j], q) + _path_u(grad, vs[j], bu, us[i], q)
        worst = max(worst, abs(alt - phi[i, j]))
        picked.append((i, j))
    if worst > tol:
        raise PathIndependenceError(worst, tol)
    return PotentialGrid(us, vs, phi, (bu, bv), tuple(float(x) for x in origin), worst, tuple(picked))

