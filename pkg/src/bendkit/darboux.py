"""Rotation field y (dz = y x dr) and translation field s = z - y x r.

For a bending z the six equations ``z_u = y x r_u``, ``z_v = y x r_v`` are
consistent and have exactly one solution because r_u and r_v are not
collinear. They are solved here in one pass as a stacked 6x3 least-squares
problem, vectorised over points; the size of the leftover residual tells a
genuine bending (round-off residual) from a field that is not one.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .bending import BendingField
from .errors import ResidualTooLargeError
from .surface import Chart, Grid, MongeChart, unit_normal

REJECT_TOL = 1e-6
ACCEPT_TOL = 1e-9
TRIVIAL_TOL = 1e-8


class RotationResidualWarning(UserWarning):
    """Residual between the acceptance and rejection thresholds."""


@dataclass(frozen=True)
class RotationSample:
    y: np.ndarray         # (..., 3)
    residual: np.ndarray  # (...) max-norm of z_u - y x r_u and z_v - y x r_v


@dataclass(frozen=True)
class TrivialityVerdict:
    is_trivial: bool
    a: np.ndarray
    b: np.ndarray
    deviation: float


def cross_matrix(w):
    """Matrix of ``y -> y x w``; for ``w = r_u`` this is the system matrix of z_u = y x r_u."""
    w1, w2, w3 = w
    return np.array([[0.0, w3, -w2], [-w3, 0.0, w1], [w2, -w1, 0.0]])


def solve_rotation(r_u, r_v, z_u, z_v) -> RotationSample:
    """Least-squares y for the stacked system at every point (no tolerance checks)."""
    # normal equations of A = [K_u; K_v] with K_w y = y x w:  A^T A = sum |w|^2 I - w w^T
    eye = np.eye(3)
    gram = ((np.einsum("...i,...i", r_u, r_u) + np.einsum("...i,...i", r_v, r_v))[..., None, None] * eye
            - r_u[..., :, None] * r_u[..., None, :] - r_v[..., :, None] * r_v[..., None, :])
    rhs = np.cross(r_u, z_u) + np.cross(r_v, z_v)
    y = np.linalg.solve(gram, rhs[..., None])[..., 0]
    res = np.maximum(np.abs(z_u - np.cross(y, r_u)).max(axis=-1),
                     np.abs(z_v - np.cross(y, r_v)).max(axis=-1))
    return RotationSample(y, res)


def rotation_field(c: Chart, z: BendingField, u, v, strict: bool = True) -> RotationSample:
    """Rotation field at (arrays of) parameter points.

    With ``strict`` a residual above ``REJECT_TOL`` raises
    :class:`ResidualTooLargeError` and one above ``ACCEPT_TOL`` warns.
    """
    _, r_u, r_v = c.frame(u, v)
    unit_normal(r_u, r_v)  # regularity check
    _, z_u, z_v = z.frame(u, v)
    sample = solve_rotation(r_u, r_v, z_u, z_v)
    if strict:
        check_residual(sample.residual, u, v)
    return sample


def check_residual(res, u, v):
    res = np.asarray(res)
    worst = float(res.max()) if res.size else 0.0
    if worst > REJECT_TOL:
        k = np.unravel_index(np.argmax(res), res.shape) if res.ndim else ()
        uu, vv, _ = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float), res)
        raise ResidualTooLargeError(worst, float(uu[k]), float(vv[k]))
    if worst > ACCEPT_TOL:
        warnings.warn(f"rotation residual {worst:.3e} above {ACCEPT_TOL:g}; "
                      "accepting as numerical noise", RotationResidualWarning, stacklevel=3)


def rotation_at(c: Chart, z: BendingField, u: float, v: float, strict: bool = True) -> RotationSample:
    s = rotation_field(c, z, float(u), float(v), strict=strict)
    return RotationSample(np.asarray(s.y), float(s.residual))


def rotation_monge(m: MongeChart, z: BendingField, u, v):
    """Closed form ``y = (zeta_v, -zeta_u, eta_u + f_u zeta_v)`` on a graph patch."""
    _, fu, *_ = m.f_derivatives(u, v)
    _, z_u, z_v = z.frame(u, v)
    return np.stack([z_v[..., 2], -z_u[..., 2], z_u[..., 1] + fu * z_v[..., 2]], axis=-1)


def monge_y3_forms(m: MongeChart, z: BendingField, u, v):
    """The two closed forms of the third rotation component on a graph patch.

    ``eta_u + f_u zeta_v`` and ``-xi_v - f_v zeta_u`` agree whenever the middle
    bending equation ``xi_v + eta_u = -f_v zeta_u - f_u zeta_v`` holds.
    """
    _, fu, fv, *_ = m.f_derivatives(u, v)
    _, z_u, z_v = z.frame(u, v)
    return z_u[..., 1] + fu * z_v[..., 2], -z_v[..., 0] - fv * z_u[..., 2]


def translation_field(c: Chart, z: BendingField, u, v, origin=(0.0, 0.0, 0.0), strict: bool = True):
    """``s = z - y x (r - origin)`` at (arrays of) points."""
    r, r_u, r_v = c.frame(u, v)
    unit_normal(r_u, r_v)
    zz, z_u, z_v = z.frame(u, v)
    sample = solve_rotation(r_u, r_v, z_u, z_v)
    if strict:
        check_residual(sample.residual, u, v)
    return zz - np.cross(sample.y, r - np.asarray(origin, dtype=float))


def translation_at(c: Chart, z: BendingField, u: float, v: float, origin=(0.0, 0.0, 0.0)):
    return np.asarray(translation_field(c, z, float(u), float(v), origin))


def translation_monge(m: MongeChart, z: BendingField, u, v):
    """Closed form of s (origin 0) on a graph patch, from y substituted into z - y x r.

    s1 = xi + f zeta_u + v eta_u + v f_u zeta_v
    s2 = eta + f zeta_v - u eta_u - u f_u zeta_v
    s3 = zeta - u zeta_u - v zeta_v
    """
    f, fu, *_ = m.f_derivatives(u, v)
    zz, z_u, z_v = z.frame(u, v)
    xi, eta, zeta = zz[..., 0], zz[..., 1], zz[..., 2]
    eta_u, zeta_u, zeta_v = z_u[..., 1], z_u[..., 2], z_v[..., 2]
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    return np.stack([xi + f * zeta_u + v * eta_u + v * fu * zeta_v,
                     eta + f * zeta_v - u * eta_u - u * fu * zeta_v,
                     zeta - u * zeta_u - v * zeta_v], axis=-1)


def classify(c: Chart, z: BendingField, grid: Grid = Grid(), origin=(0.0, 0.0, 0.0),
             tol: float = TRIVIAL_TOL) -> TrivialityVerdict:
    """Trivial iff y (and hence s) is constant over the lattice.

    ``b`` is the mean rotation and ``a`` the mean translation, so that a
    trivial field reconstructs as ``z = a + b x (r - origin)``.
    """
    U, V = c.lattice(grid)
    y = rotation_field(c, z, U, V).y
    s = translation_field(c, z, U, V, origin)
    b = y.reshape(-1, 3).mean(axis=0)
    a = s.reshape(-1, 3).mean(axis=0)
    dev = max(float(np.linalg.norm(y - b, axis=-1).max()),
              float(np.linalg.norm(s - a, axis=-1).max()))
    return TrivialityVerdict(dev < tol, a, b, dev)
