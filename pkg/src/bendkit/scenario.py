"""Scenario files: a surface, a candidate bending and run options.

Sectioned key/value text read with :mod:`configparser`::

    [surface]
    x = cos(u)          # or a single `f = ...` for a graph patch (u, v, f)
    y = sin(u)
    z = v
    u_range = 0, 3*pi/2
    v_range = 0, 1

    [bending]
    xi = sin(u)^2/2
    eta = u/2 - sin(2*u)/4
    zeta = 0

    [options]           # all optional
    origin = 0, 0, 0
    grid = 64x64
    tol = 1e-10
    quad_tol = 1e-10

Range, origin and base entries accept constant expressions such as ``3*pi/2``.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from .bending import BendingField
from .errors import ExprSyntaxError, ScenarioError
from .expr import Expr, is_constant, parse
from .quadrature import QuadratureConfig
from .surface import Chart, Grid, MongeChart

SURFACE_KEYS = {"x", "y", "z", "f", "u_range", "v_range"}
BENDING_KEYS = {"xi", "eta", "zeta"}
OPTION_KEYS = {"origin", "grid", "tol", "quad_tol", "base", "fd_step", "loops", "crit_tol",
               "name"}


@dataclass
class Scenario:
    chart: Chart
    bending: BendingField
    origin: tuple = (0.0, 0.0, 0.0)
    grid: Grid = field(default_factory=Grid)
    tol: float = 1e-10
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    base: tuple | None = None
    fd_step: float = 1e-4
    loops: int = 100
    crit_tol: float = 1e-8
    name: str = "scenario"
    expressions: dict = field(default_factory=dict)

    def with_overrides(self, grid=None, origin=None) -> "Scenario":
        out = self
        if grid is not None:
            out = replace(out, grid=grid)
        if origin is not None:
            out = replace(out, origin=tuple(float(x) for x in origin))
        return out


def _expr(text, section, key, offset=0) -> Expr:
    try:
        return parse(text)
    except ExprSyntaxError as exc:
        raise ScenarioError(str(exc), section, key, offset + exc.offset) from exc


def _constants(text, section, key, count):
    parts, values, pos = text.split(","), [], 0
    if len(parts) != count:
        raise ScenarioError(f"expected {count} comma-separated values, got {len(parts)}",
                            section, key)
    for part in parts:
        lead = len(part) - len(part.lstrip())
        e = _expr(part, section, key, pos)
        if not is_constant(e):
            raise ScenarioError("value must not depend on u or v", section, key, pos + lead)
        values.append(e(0.0, 0.0))
        pos += len(part.encode("utf-8")) + 1
    return tuple(values)


def _range(text, section, key):
    lo, hi = _constants(text, section, key, 2)
    if not hi > lo:
        raise ScenarioError(f"degenerate range [{lo}, {hi}]", section, key)
    return lo, hi


def _float(text, section, key, positive=True):
    try:
        x = float(text)
    except ValueError:
        raise ScenarioError(f"not a number: {text!r}", section, key) from None
    if positive and not x > 0:
        raise ScenarioError("must be positive", section, key)
    return x


def load_scenario(path) -> Scenario:
    """Read and fully validate a scenario file; all expressions are parsed eagerly."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return parse_scenario(text, name=path.stem)


def parse_scenario(text: str, name: str = "scenario") -> Scenario:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"malformed scenario file: {exc}") from exc

    for section in ("surface", "bending"):
        if not cp.has_section(section):
            raise ScenarioError(f"missing [{section}] section", section)
    allowed = {"surface": SURFACE_KEYS, "bending": BENDING_KEYS, "options": OPTION_KEYS}
    for section in cp.sections():
        if section not in allowed:
            raise ScenarioError("unknown section", section)
        for key in cp[section]:
            if key not in allowed[section]:
                raise ScenarioError("unknown key", section, key)

    sf = cp["surface"]
    exprs = {}
    for key in ("u_range", "v_range"):
        if key not in sf:
            raise ScenarioError("missing key", "surface", key)
    u_range = _range(sf["u_range"], "surface", "u_range")
    v_range = _range(sf["v_range"], "surface", "v_range")
    if "f" in sf:
        if any(k in sf for k in ("x", "y", "z")):
            raise ScenarioError("give either f or x, y, z, not both", "surface", "f")
        exprs["f"] = _expr(sf["f"], "surface", "f")
        chart = MongeChart(exprs["f"], u_range, v_range)
    else:
        for key in ("x", "y", "z"):
            if key not in sf:
                raise ScenarioError("missing key (need x, y, z or f)", "surface", key)
            exprs[key] = _expr(sf[key], "surface", key)
        chart = Chart(exprs["x"], exprs["y"], exprs["z"], u_range, v_range)

    bf = cp["bending"]
    for key in ("xi", "eta", "zeta"):
        if key not in bf:
            raise ScenarioError("missing key", "bending", key)
        exprs[key] = _expr(bf[key], "bending", key)
    bending = BendingField(exprs["xi"], exprs["eta"], exprs["zeta"], chart)

    sc = Scenario(chart, bending, name=name, expressions=exprs)
    if cp.has_section("options"):
        op = cp["options"]
        if "origin" in op:
            sc.origin = _constants(op["origin"], "options", "origin", 3)
        if "base" in op:
            sc.base = _constants(op["base"], "options", "base", 2)
            if not chart.contains(*sc.base):
                raise ScenarioError("base point outside the chart domain", "options", "base")
        if "grid" in op:
            try:
                sc.grid = Grid.parse(op["grid"])
            except ValueError as exc:
                raise ScenarioError(str(exc), "options", "grid") from None
        if "tol" in op:
            sc.tol = _float(op["tol"], "options", "tol")
        if "quad_tol" in op:
            sc.quad = QuadratureConfig(abs_tol=_float(op["quad_tol"], "options", "quad_tol"))
        if "fd_step" in op:
            sc.fd_step = _float(op["fd_step"], "options", "fd_step")
        if "crit_tol" in op:
            sc.crit_tol = _float(op["crit_tol"], "options", "crit_tol")
        if "loops" in op:
            sc.loops = int(_float(op["loops"], "options", "loops"))
        if "name" in op:
            sc.name = op["name"]
    return sc
