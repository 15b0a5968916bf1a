"""Parametric surface patches and their first/second order geometry.

The unit normal is ``n = (r_u x r_v) / |r_u x r_v|``; every curvature sign in
the package follows from that choice. With it the unit cylinder
``(cos u, sin u, v)`` has the outward normal and mean curvature -1/2.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import quadrature
from .errors import DegenerateChartError
from .expr import U, V, ExprLike, as_expr, derive
from .program import Program

DEGENERACY_THRESHOLD = 1e-12


def _interval(r, name):
    lo, hi = (float(x) for x in r)
    if not hi > lo:
        raise ValueError(f"{name} must satisfy lo < hi, got [{lo}, {hi}]")
    return lo, hi


def _vec(out, start):
    return np.moveaxis(out[start:start + 3], 0, -1)


class Chart:
    """Surface patch ``r(u, v) = (x, y, z)`` over ``u_range x v_range``."""

    def __init__(self, x: ExprLike, y: ExprLike, z: ExprLike, u_range, v_range):
        self.coords = (as_expr(x), as_expr(y), as_expr(z))
        self.u_range = _interval(u_range, "u_range")
        self.v_range = _interval(v_range, "v_range")

    def __repr__(self):
        x, y, z = (str(c) for c in self.coords)
        return f"{type(self).__name__}({x}, {y}, {z}, u={self.u_range}, v={self.v_range})"

    @cached_property
    def d_u(self):
        return tuple(derive(c, "u") for c in self.coords)

    @cached_property
    def d_v(self):
        return tuple(derive(c, "v") for c in self.coords)

    @cached_property
    def d_uu(self):
        return tuple(derive(c, "u") for c in self.d_u)

    @cached_property
    def d_uv(self):
        return tuple(derive(c, "v") for c in self.d_u)

    @cached_property
    def d_vv(self):
        return tuple(derive(c, "v") for c in self.d_v)

    @cached_property
    def _first_order(self):
        return Program(self.coords + self.d_u + self.d_v)

    @cached_property
    def _second_order(self):
        return Program(self.coords + self.d_u + self.d_v + self.d_uu + self.d_uv + self.d_vv)

    def contains(self, u, v, slack=1e-12) -> bool:
        (u0, u1), (v0, v1) = self.u_range, self.v_range
        u, v = np.asarray(u), np.asarray(v)
        return bool(np.all((u >= u0 - slack) & (u <= u1 + slack)
                           & (v >= v0 - slack) & (v <= v1 + slack)))

    @cached_property
    def _position(self):
        return Program(self.coords)

    def position(self, u, v):
        return np.moveaxis(self._position(u, v), 0, -1)

    def lattice(self, grid: "Grid"):
        """Meshgrid (``indexing='ij'``) of ``grid.nu x grid.nv`` points spanning the domain."""
        us = np.linspace(*self.u_range, grid.nu)
        vs = np.linspace(*self.v_range, grid.nv)
        return np.meshgrid(us, vs, indexing="ij")

    def frame(self, u, v):
        """``(r, r_u, r_v)``, each of shape ``(..., 3)``."""
        out = self._first_order(u, v)
        return _vec(out, 0), _vec(out, 3), _vec(out, 6)

    def jet(self, u, v) -> "SurfaceJet":
        return chart_jet(self, u, v)


class MongeChart(Chart):
    """Graph patch ``r = (u, v, f(u, v))``; always regular."""

    def __init__(self, f: ExprLike, u_range, v_range):
        self.f = as_expr(f)
        super().__init__(U, V, self.f, u_range, v_range)

    def __repr__(self):
        return f"MongeChart({self.f}, u={self.u_range}, v={self.v_range})"

    @cached_property
    def f_derivatives(self):
        """Program for ``f, f_u, f_v, f_uu, f_uv, f_vv``."""
        fu, fv = derive(self.f, "u"), derive(self.f, "v")
        return Program([self.f, fu, fv, derive(fu, "u"), derive(fu, "v"), derive(fv, "v")])


@dataclass(frozen=True)
class Grid:
    """Regular lattice of ``nu x nv`` points including the domain corners."""

    nu: int = 64
    nv: int = 64

    def __post_init__(self):
        if self.nu < 2 or self.nv < 2:
            raise ValueError(f"grid must be at least 2x2, got {self.nu}x{self.nv}")

    @classmethod
    def parse(cls, text: str) -> "Grid":
        parts = text.lower().replace(",", "x").split("x")
        if len(parts) != 2:
            raise ValueError(f"grid must look like NxM, got {text!r}")
        return cls(int(parts[0]), int(parts[1]))


@dataclass(frozen=True)
class SurfaceJet:
    r: np.ndarray
    r_u: np.ndarray
    r_v: np.ndarray
    r_uu: np.ndarray
    r_uv: np.ndarray
    r_vv: np.ndarray
    n: np.ndarray
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    L: np.ndarray
    M: np.ndarray
    N: np.ndarray
    H: np.ndarray
    dA: np.ndarray


def unit_normal(r_u, r_v):
    """Normalised ``r_u x r_v``; raises on (near) collinear tangents."""
    cr = np.cross(r_u, r_v)
    norm = np.linalg.norm(cr, axis=-1)
    if np.any(norm < DEGENERACY_THRESHOLD):
        raise DegenerateChartError(
            f"|r_u x r_v| = {float(np.min(norm)):.3e} below {DEGENERACY_THRESHOLD:g}")
    return cr / norm[..., None], norm


def chart_jet(c: Chart, u, v) -> SurfaceJet:
    """All first and second order data of ``c`` at (arrays of) parameter points."""
    out = c._second_order(u, v)
    r, r_u, r_v, r_uu, r_uv, r_vv = (_vec(out, 3 * k) for k in range(6))
    n, _ = unit_normal(r_u, r_v)
    E = np.einsum("...i,...i", r_u, r_u)
    F = np.einsum("...i,...i", r_u, r_v)
    G = np.einsum("...i,...i", r_v, r_v)
    L = np.einsum("...i,...i", r_uu, n)
    M = np.einsum("...i,...i", r_uv, n)
    N = np.einsum("...i,...i", r_vv, n)
    det = E * G - F * F
    H = (E * N - 2 * F * M + G * L) / (2 * det)
    return SurfaceJet(r, r_u, r_v, r_uu, r_uv, r_vv, n, E, F, G, L, M, N, H, np.sqrt(det))


def total_mean_curvature(c: Chart, q: quadrature.QuadratureConfig = quadrature.DEFAULT) -> float:
    """Integral of the mean curvature against the area element over the whole patch."""
    def integrand(U_, V_):
        j = chart_jet(c, U_, V_)
        return j.H * j.dA
    return quadrature.integrate2d(integrand, c.u_range, c.v_range, q)
