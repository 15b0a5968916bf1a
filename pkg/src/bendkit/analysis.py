"""Critical points of the potential and points where z is normal to the surface.

Both searches look for common zeros of a pair of functions on the lattice:
``(phi_u, phi_v) = (s . r_u, s . r_v)`` for the potential, ``(z . r_u, z . r_v)``
for orthogonality. Candidate cells are those where both components change
sign (or vanish); each is refined by damped Newton with a finite-difference
Jacobian. When the Jacobian is singular because one component vanishes
identically, the zero set is a curve and the other component is bisected
along the lattice edges instead.

Critical sets depend on the ambient origin used for s; results are per origin.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import quadrature
from .bending import BendingField
from .integrals import PotentialGrid, potential_gradient, translation_evaluator
from .surface import Chart, Grid, unit_normal

FLAT_FRACTION = 0.05
MAX_NEWTON = 50


@dataclass(frozen=True)
class CriticalPoint:
    u: float
    v: float
    phi: float
    kind: str                     # "max" | "min" | "saddle" | "degenerate"
    grad_norm: float
    s_parallelism_defect: float   # |s x n|
    extent: str | None = None     # None (isolated), "v" (line u = const), "u", "region"


@dataclass(frozen=True)
class OrthogonalPoint:
    u: float
    v: float
    tangential_residuals: tuple   # (z . r_u, z . r_v)


@dataclass(frozen=True)
class _Refined:
    u: float
    v: float
    g: tuple


def _bisect(f, a, b, fa, fb, iters=200):
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    for _ in range(iters):
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm < 0) == (fa < 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def _crosses(x):
    """Per cell: does the component take both signs (or vanish) on the four corners?"""
    c = np.stack([x[:-1, :-1], x[1:, :-1], x[:-1, 1:], x[1:, 1:]])
    return (c.min(axis=0) <= 0) & (c.max(axis=0) >= 0)


def _all_small(x, tol):
    c = np.abs(np.stack([x[:-1, :-1], x[1:, :-1], x[:-1, 1:], x[1:, 1:]]))
    return c.max(axis=0) < tol


class _ZeroFinder:
    def __init__(self, g, chart: Chart, grid: Grid, tol: float):
        self.g = g
        self.chart = chart
        self.tol = tol
        self.U, self.V = chart.lattice(grid)
        self.G1, self.G2 = (np.asarray(x) for x in g(self.U, self.V))
        self.du = self.U[1, 0] - self.U[0, 0]
        self.dv = self.V[0, 1] - self.V[0, 0]
        self.failures = []

    def gpt(self, u, v):
        a, b = self.g(np.array([u]), np.array([v]))
        return np.array([a[0], b[0]])

    def jacobian(self, u, v):
        hu, hv = 1e-6 * self.du, 1e-6 * self.dv
        (u0, u1), (v0, v1) = self.chart.u_range, self.chart.v_range
        up, um = min(u + hu, u1), max(u - hu, u0)
        vp, vm = min(v + hv, v1), max(v - hv, v0)
        gu = (self.gpt(up, v) - self.gpt(um, v)) / (up - um)
        gv = (self.gpt(u, vp) - self.gpt(u, vm)) / (vp - vm)
        return np.column_stack([gu, gv])

    def newton(self, u, v):
        (u0, u1), (v0, v1) = self.chart.u_range, self.chart.v_range
        x = np.array([u, v])
        gx = self.gpt(*x)
        for _ in range(MAX_NEWTON):
            if np.abs(gx).max() < 1e-3 * self.tol:
                break
            J = self.jacobian(*x)
            det = np.linalg.det(J)
            if not np.isfinite(det) or abs(det) <= 1e-12 * max(np.sum(J * J), 1e-300):
                return None
            step = np.linalg.solve(J, gx)
            lam = 1.0
            while lam > 1e-4:
                xn = np.clip(x - lam * step, [u0, v0], [u1, v1])
                gn = self.gpt(*xn)
                if np.abs(gn).max() < np.abs(gx).max():
                    break
                lam *= 0.5
            else:
                break
            if np.abs(xn - x).max() < 1e-15:
                x, gx = xn, gn
                break
            x, gx = xn, gn
        return _Refined(float(x[0]), float(x[1]), (float(gx[0]), float(gx[1])))

    def bisect_edges(self, i, j):
        """1-D fallback inside cell (i, j): bisect the non-vanishing component along its edges."""
        out = []
        G1, G2, U, V, tol = self.G1, self.G2, self.U, self.V, self.tol
        corners = (slice(i, i + 2), slice(j, j + 2))
        if np.abs(G2[corners]).max() < tol:
            for jj in (j, j + 1):
                a, b = U[i, jj], U[i + 1, jj]
                fa, fb = G1[i, jj], G1[i + 1, jj]
                if fa * fb <= 0:
                    vv = V[i, jj]
                    r = _bisect(lambda t: self.gpt(t, vv)[0], a, b, fa, fb)
                    out.append(_Refined(float(r), float(vv), tuple(self.gpt(r, vv))))
        elif np.abs(G1[corners]).max() < tol:
            for ii in (i, i + 1):
                a, b = V[ii, j], V[ii, j + 1]
                fa, fb = G2[ii, j], G2[ii, j + 1]
                if fa * fb <= 0:
                    uu = U[ii, j]
                    r = _bisect(lambda t: self.gpt(uu, t)[1], a, b, fa, fb)
                    out.append(_Refined(float(uu), float(r), tuple(self.gpt(uu, r))))
        return out

    def candidates(self, skip=None):
        cells = _crosses(self.G1) & _crosses(self.G2)
        if skip is not None:
            cells &= ~skip
        return list(zip(*np.nonzero(cells)))

    def refine_all(self, skip=None):
        found = []
        for i, j in self.candidates(skip):
            uc = 0.5 * (self.U[i, j] + self.U[i + 1, j])
            vc = 0.5 * (self.V[i, j] + self.V[i, j + 1])
            r = self.newton(uc, vc)
            if r is None:
                pts = self.bisect_edges(i, j)
                if not pts:
                    self.failures.append((float(uc), float(vc)))
                found.extend(pts)
                continue
            inside = (abs(r.u - uc) <= self.du and abs(r.v - vc) <= self.dv)
            if max(abs(r.g[0]), abs(r.g[1])) < self.tol and inside:
                found.append(r)
            else:
                self.failures.append((float(uc), float(vc)))
        return _dedupe(found, 1e-7 * max(self.du, self.dv))


def _dedupe(points, eps):
    out = []
    for p in sorted(points, key=lambda p: (p.u, p.v)):
        if not any(abs(p.u - q.u) <= eps and abs(p.v - q.v) <= eps for q in out):
            out.append(p)
    return out


def _classify(grad, u, v, radius, tol, chart):
    """Sign pattern of phi(p + d) - phi(p) on a ring of 8 neighbours.

    The ring is turned by pi/8 so it misses the axis-aligned level lines of
    the common saddles; mixed signs mean a saddle even if some samples vanish.
    """
    (u0, u1), (v0, v1) = chart.u_range, chart.v_range
    signs = []
    for ang in (np.arange(8) + 0.5) * np.pi / 4:
        du, dv = radius * np.cos(ang), radius * np.sin(ang)
        if not (u0 <= u + du <= u1 and v0 <= v + dv <= v1):
            continue

        def f(t, du=du, dv=dv):
            gu, gv = grad(u + t * du, v + t * dv)
            return gu * du + gv * dv
        d = quadrature.integrate(f, 0.0, 1.0)
        signs.append(0 if abs(d) < tol * radius else int(np.sign(d)))
    if 1 in signs and -1 in signs:
        return "saddle"
    if not signs or 0 in signs:
        return "degenerate"
    return "min" if signs[0] > 0 else "max"


def _line_groups(points, nrows, ncols, eps):
    """Split refined points into critical lines (u = const or v = const) and the rest."""
    lines, rest, used = [], [], set()
    for axis, count, extent in ((0, nrows, "v"), (1, ncols, "u")):
        key = (lambda p: p.u) if axis == 0 else (lambda p: p.v)
        other = (lambda p: p.v) if axis == 0 else (lambda p: p.u)
        pts = sorted((p for p in points if id(p) not in used), key=key)
        k = 0
        while k < len(pts):
            m = k
            while m + 1 < len(pts) and abs(key(pts[m + 1]) - key(pts[k])) <= eps:
                m += 1
            cluster = pts[k:m + 1]
            if len({round(other(p), 12) for p in cluster}) >= count:
                lines.append((extent, cluster))
                used.update(id(p) for p in cluster)
            k = m + 1
    rest = [p for p in points if id(p) not in used]
    return lines, rest


def critical_points(pg: PotentialGrid, c: Chart, z: BendingField, tol: float = 1e-8,
                    strict: bool = True):
    """Critical points of the potential ``pg`` (built from ``c`` and ``z``).

    Returns ``(points, failures)``; ``failures`` lists candidate cell centres
    whose refinement did not converge.
    """
    grad = potential_gradient(c, z, pg.origin, strict)
    s_field = translation_evaluator(c, z, pg.origin, strict)
    grid = Grid(len(pg.us), len(pg.vs))
    finder = _ZeroFinder(grad, c, grid, tol)

    def defect(u, v):
        _, r_u, r_v = c.frame(np.array([u]), np.array([v]))
        n, _ = unit_normal(r_u, r_v)
        return float(np.linalg.norm(np.cross(s_field(np.array([u]), np.array([v])), n)))

    def phi_near(u, v):
        i = int(np.argmin(np.abs(pg.us - u)))
        j = int(np.argmin(np.abs(pg.vs - v)))
        du, dv = u - pg.us[i], v - pg.vs[j]

        def f(t):
            gu, gv = grad(pg.us[i] + t * du, pg.vs[j] + t * dv)
            return gu * du + gv * dv
        return float(pg.phi[i, j] + quadrature.integrate(f, 0.0, 1.0))

    flat_cells = _all_small(finder.G1, tol) & _all_small(finder.G2, tol)
    if flat_cells.mean() >= FLAT_FRACTION:
        mask = (np.abs(finder.G1) < tol) & (np.abs(finder.G2) < tol)
        U, V = finder.U[mask], finder.V[mask]
        k = int(np.argmin((U - U.mean()) ** 2 + (V - V.mean()) ** 2))
        gn = float(np.hypot(finder.G1[mask], finder.G2[mask]).max())
        worst = max(defect(float(a), float(b)) for a, b in zip(U, V))
        i, j = (int(x[k]) for x in np.nonzero(mask))
        return [CriticalPoint(float(U[k]), float(V[k]), float(pg.phi[i, j]), "degenerate",
                              gn, worst, "region")], finder.failures

    refined = finder.refine_all()
    eps = 1e-6 * max(finder.du, finder.dv)
    lines, rest = _line_groups(refined, grid.nv, grid.nu, eps)
    radius = 0.25 * min(finder.du, finder.dv)
    out = []
    for extent, cluster in lines:
        mid = cluster[len(cluster) // 2]
        gn = max(float(np.hypot(*p.g)) for p in cluster)
        worst = max(defect(p.u, p.v) for p in cluster)
        out.append(CriticalPoint(mid.u, mid.v, phi_near(mid.u, mid.v), "degenerate",
                                 gn, worst, extent))
    for p in rest:
        kind = _classify(grad, p.u, p.v, radius, tol, c)
        out.append(CriticalPoint(p.u, p.v, phi_near(p.u, p.v), kind,
                                 float(np.hypot(*p.g)), defect(p.u, p.v)))
    out.sort(key=lambda p: (p.u, p.v))
    return out, finder.failures


def orthogonality_scan(c: Chart, z: BendingField, grid: Grid = Grid(), tol: float = 1e-8):
    """Points where ``z . r_u`` and ``z . r_v`` both vanish. Works for any field."""
    def g(u, v):
        _, r_u, r_v = c.frame(u, v)
        zz = z.value(u, v)
        return np.einsum("...i,...i", zz, r_u), np.einsum("...i,...i", zz, r_v)

    finder = _ZeroFinder(g, c, grid, tol)
    on_grid = (np.abs(finder.G1) < tol) & (np.abs(finder.G2) < tol)
    points = [_Refined(float(a), float(b), (float(x), float(y)))
              for a, b, x, y in zip(finder.U[on_grid], finder.V[on_grid],
                                    finder.G1[on_grid], finder.G2[on_grid])]
    flat = _all_small(finder.G1, tol) & _all_small(finder.G2, tol)
    points += finder.refine_all(skip=flat)
    points = _dedupe(points, 1e-7 * max(finder.du, finder.dv))
    return [OrthogonalPoint(p.u, p.v, p.g) for p in points
            if abs(p.g[0]) < tol and abs(p.g[1]) < tol]
