"""Curves in the (u, v) parameter domain.

A curve is a pair of expressions in one running parameter. The expression
grammar only knows ``u`` and ``v``, so the running parameter is written as
``u`` inside curve expressions: ``Curve.parse("3 + 0.3*cos(u)", "0.5 + 0.3*sin(u)",
(0, 2*pi))`` is a circle of radius 0.3 about (3, 0.5).
"""
from __future__ import annotations

import math
from functools import cached_property

import numpy as np

from .expr import U, Const, ExprLike, as_expr, cos, derive, sin, variables
from .program import Program


class Curve:
    def __init__(self, cu: ExprLike, cv: ExprLike, t_range=(0.0, 1.0)):
        self.cu = as_expr(cu)
        self.cv = as_expr(cv)
        if "v" in variables(self.cu) | variables(self.cv):
            raise ValueError("curve expressions use 'u' as their only parameter")
        self.t_range = (float(t_range[0]), float(t_range[1]))

    @classmethod
    def parse(cls, u_text: str, v_text: str, t_range=(0.0, 1.0)) -> "Curve":
        return cls(u_text, v_text, t_range)

    def __repr__(self):
        return f"Curve({self.cu}, {self.cv}, t={self.t_range})"

    @cached_property
    def _program(self):
        return Program([self.cu, self.cv, derive(self.cu, "u"), derive(self.cv, "u")])

    def __call__(self, t):
        """Return ``(u, v, du/dt, dv/dt)`` at the parameter values ``t``."""
        out = self._program(t, 0.0)
        return out[0], out[1], out[2], out[3]

    def endpoints(self):
        t0, t1 = self.t_range
        a = self(np.array([t0, t1]))
        return (float(a[0][0]), float(a[1][0])), (float(a[0][1]), float(a[1][1]))

    def is_closed(self, tol=1e-12) -> bool:
        p, q = self.endpoints()
        return math.hypot(p[0] - q[0], p[1] - q[1]) <= tol


def segment(p, q) -> Curve:
    """Straight segment from ``p`` to ``q`` with parameter in [0, 1]."""
    (pu, pv), (qu, qv) = p, q
    return Curve(Const(float(pu)) + Const(float(qu - pu)) * U,
                 Const(float(pv)) + Const(float(qv - pv)) * U, (0.0, 1.0))


def point(p) -> Curve:
    """Degenerate curve sitting at ``p``."""
    return Curve(Const(float(p[0])), Const(float(p[1])), (0.0, 1.0))


def circle(center, radius: float) -> Curve:
    """Counterclockwise circle, parameter in [0, 2 pi]."""
    cu, cv = center
    return Curve(Const(float(cu)) + Const(float(radius)) * cos(U),
                 Const(float(cv)) + Const(float(radius)) * sin(U), (0.0, 2 * math.pi))


def rectangle_boundary(u_range, v_range) -> list[Curve]:
    """Counterclockwise boundary of a parameter rectangle as four segments."""
    (u0, u1), (v0, v1) = u_range, v_range
    return [segment((u0, v0), (u1, v0)), segment((u1, v0), (u1, v1)),
            segment((u1, v1), (u0, v1)), segment((u0, v1), (u0, v0))]


def random_loop(rng: np.random.Generator, u_range, v_range, margin: float = 0.02) -> Curve:
    """Smooth closed star-shaped loop lying strictly inside the rectangle.

    Radius ``rho(t) = r0 (1 + e1 cos(k t + p1) + e2 sin(m t + p2))`` around a
    random centre, with ``|e1| + |e2| < 0.6`` so the radius stays positive.
    """
    (u0, u1), (v0, v1) = u_range, v_range
    cu = rng.uniform(u0 + 0.3 * (u1 - u0), u1 - 0.3 * (u1 - u0))
    cv = rng.uniform(v0 + 0.3 * (v1 - v0), v1 - 0.3 * (v1 - v0))
    room = min(cu - u0, u1 - cu, cv - v0, v1 - cv) - margin
    e1, e2 = rng.uniform(-0.3, 0.3, size=2)
    k, m = (int(x) for x in rng.integers(1, 5, size=2))
    p1, p2 = rng.uniform(0, 2 * math.pi, size=2)
    r0 = rng.uniform(0.3, 1.0) * room / (1 + abs(e1) + abs(e2))
    rho = Const(r0) * (1.0 + Const(e1) * cos(Const(float(k)) * U + Const(p1))
                       + Const(e2) * sin(Const(float(m)) * U + Const(p2)))
    return Curve(Const(cu) + rho * cos(U), Const(cv) + rho * sin(U), (0.0, 2 * math.pi))
