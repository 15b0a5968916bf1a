"""Command line entry point.

    bendkit <command> --config FILE [--grid NxM] [--origin x,y,z] [--seed N]
                      [--out FILE] [--format csv|json] [--report FILE]

Exit status: 0 when every check passes, 1 when a mathematical check fails or
errors, 2 for input/configuration problems.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import analysis, bending, darboux, integrals
from .errors import BendkitError, ScenarioError
from .scenario import Scenario, load_scenario
from .surface import Grid


COMMANDS = ("check", "rotation", "translation", "potential", "variation", "orthogonal", "report")
VECTOR_HEADER = ["u", "v", "c1", "c2", "c3"]
POTENTIAL_HEADER = ["u", "v", "phi"]


@dataclass
class CheckResult:
    name: str
    status: str            # "pass" | "fail" | "error"
    values: dict = field(default_factory=dict)
    tolerance: float | None = None
    elapsed: float = 0.0
    message: str = ""


@dataclass
class Report:
    scenario: str
    command: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self):
        return {"scenario": self.scenario, "command": self.command,
                "status": "pass" if self.passed else "fail",
                "checks": [asdict(c) for c in self.checks]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_jsonable)

    def render(self) -> str:
        lines = [f"{self.scenario}: {self.command}"]
        for c in self.checks:
            vals = ", ".join(f"{k}={_fmt(v)}" for k, v in c.values.items())
            tol = "" if c.tolerance is None else f" (tol {c.tolerance:g})"
            msg = f" -- {c.message}" if c.message else ""
            lines.append(f"  [{c.status.upper():5}] {c.name}{tol}: {vals}{msg}  [{c.elapsed:.2f}s]")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(f"not serialisable: {type(x).__name__}")


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    if isinstance(v, (list, tuple, np.ndarray)) and len(v) <= 4:
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    if isinstance(v, (list, tuple)):
        return f"[{len(v)} items]"
    return str(v)


# ---------------------------------------------------------------------------
# grid dumps

def vector_rows(U, V, vecs):
    return np.column_stack([U.ravel(), V.ravel(), vecs.reshape(-1, 3)])


def write_grid(path, header, rows, fmt="csv"):
    if fmt == "json":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"columns": header, "rows": np.asarray(rows).tolist()}, fh)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) for x in row])


def read_grid(path):
    """Return ``(header, rows)`` from a CSV or JSON dump."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        return data["columns"], np.asarray(data["rows"], dtype=float)
    reader = csv.reader(text.splitlines())
    header = next(reader)
    return header, np.array([[float(x) for x in row] for row in reader], dtype=float)


# ---------------------------------------------------------------------------
# checks

def _timed(name, fn, tolerance=None):
    t0 = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            status, values, msg = fn()
        except BendkitError as exc:
            status, values, msg = "error", {}, f"{type(exc).__name__}: {exc}"
    if caught and not msg:
        msg = "; ".join(str(w.message) for w in caught)
    return CheckResult(name, status, values, tolerance, time.perf_counter() - t0, msg)


def check_bending_cmd(s: Scenario):
    def run():
        res = bending.check_bending(s.chart, s.bending, s.grid, s.tol)
        return ("pass" if res.passed else "fail",
                {"max_residual": res.max_residual, "rho_max": res.components,
                 "worst_point": res.worst}, "")
    return _timed("bending_residuals", run, s.tol)


def rotation_cmd(s: Scenario, dump):
    def run():
        U, V = s.chart.lattice(s.grid)
        sample = darboux.rotation_field(s.chart, s.bending, U, V)
        dump["rotation"] = (VECTOR_HEADER, vector_rows(U, V, sample.y))
        return "pass", {"max_residual": float(sample.residual.max()),
                        "points": int(U.size)}, ""
    return _timed("rotation_field", run, darboux.REJECT_TOL)


def translation_cmd(s: Scenario, dump):
    def run():
        U, V = s.chart.lattice(s.grid)
        sv = darboux.translation_field(s.chart, s.bending, U, V, s.origin)
        dump["translation"] = (VECTOR_HEADER, vector_rows(U, V, sv))
        return "pass", {"origin": s.origin, "points": int(U.size)}, ""
    return _timed("translation_field", run, darboux.REJECT_TOL)


def potential_cmd(s: Scenario, dump, seed, keep=None):
    tol = 10 * s.quad.abs_tol

    def run():
        pg = integrals.potential_grid(s.chart, s.bending, s.grid, s.base, s.origin, s.quad,
                                      seed=seed)
        dump["potential"] = (POTENTIAL_HEADER, pg.rows())
        if keep is not None:
            keep["pg"] = pg
        return "pass", {"spot_discrepancy": pg.spot_discrepancy, "base": pg.base,
                        "phi_min": float(pg.phi.min()), "phi_max": float(pg.phi.max())}, ""
    return _timed("potential_path_independence", run, tol)


def variation_cmd(s: Scenario):
    def run():
        est = integrals.variation_estimates(s.chart, s.bending, s.fd_step, s.quad)
        d_double, d_fd, ok = est.agreement()
        values = {"H'_line": est.line, "H'_fd": est.fd}
        if est.monge_double is not None:
            values["H'_monge_double"] = est.monge_double
            values["line_vs_double"] = d_double
        values["line_vs_fd"] = d_fd
        return ("pass" if ok else "fail"), values, ""
    return _timed("total_mean_curvature_variation", run, 1e-8)


def triviality_cmd(s: Scenario):
    def run():
        v = darboux.classify(s.chart, s.bending, s.grid, s.origin)
        return "pass", {"is_trivial": bool(v.is_trivial), "a": v.a, "b": v.b,
                        "deviation": v.deviation}, ""
    return _timed("triviality", run, darboux.TRIVIAL_TOL)


def loops_cmd(s: Scenario, seed):
    def run():
        audit = integrals.loop_audit(s.chart, s.bending, s.loops, (s.origin,), seed, s.quad)
        return ("pass" if audit.passed else "fail"), {
            "loops": s.loops, "max_defect": audit.max_defect, "seed": seed}, ""
    return _timed("translation_loop_closure", run, integrals.closure_tolerance(s.quad))


def orthogonal_cmd(s: Scenario, seed, pg_cache):
    def run():
        pg = pg_cache.get("pg") or integrals.potential_grid(
            s.chart, s.bending, s.grid, s.base, s.origin, s.quad, seed=seed)
        crit, failures = analysis.critical_points(pg, s.chart, s.bending, s.crit_tol)
        orth = analysis.orthogonality_scan(s.chart, s.bending, s.grid, s.crit_tol)
        worst = max((p.s_parallelism_defect for p in crit), default=0.0)
        ok = worst < 10 * s.crit_tol
        values = {
            "critical_points": [asdict(p) for p in crit],
            "critical_summary": [f"{p.kind}{'/' + p.extent if p.extent else ''}"
                                 f"@({p.u:.6g},{p.v:.6g})" for p in crit],
            "max_s_cross_n": worst,
            "refinement_failures": len(failures),
            "orthogonal_points": len(orth),
            "orthogonal_u": sorted({round(p.u, 9) for p in orth})[:20],
        }
        return ("pass" if ok else "fail"), values, ""
    return _timed("critical_points_and_orthogonality", run, 10 * s.crit_tol)


def run(s: Scenario, command: str, seed: int = 42):
    """Run ``command`` on ``s``. Returns ``(report, dumps)``."""
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    report = Report(s.name, command)
    dump = {}
    cache = {}
    if command in ("check", "report"):
        report.checks.append(check_bending_cmd(s))
    if command in ("rotation", "report"):
        report.checks.append(rotation_cmd(s, dump))
    if command in ("translation", "report"):
        report.checks.append(translation_cmd(s, dump))
    if command == "report":
        report.checks.append(triviality_cmd(s))
    if command in ("potential", "report"):
        report.checks.append(potential_cmd(s, dump, seed, cache))
    if command in ("variation", "report"):
        report.checks.append(variation_cmd(s))
    if command == "report":
        report.checks.append(loops_cmd(s, seed))
    if command in ("orthogonal", "report"):
        report.checks.append(orthogonal_cmd(s, seed, cache))
    return report, dump


def _origin(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("origin must be x,y,z")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _grid(text):
    try:
        return Grid.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser():
    p = argparse.ArgumentParser(prog="bendkit", description=(
        "Rotation/translation fields, bending potential and total mean curvature "
        "variation for an infinitesimal bending of a parametric surface."))
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="scenario file")
    p.add_argument("--grid", type=_grid, help="lattice size NxM (overrides the scenario)")
    p.add_argument("--origin", type=_origin, help="ambient origin x,y,z for the translation field")
    p.add_argument("--seed", type=int, default=42, help="seed for randomised audits (default 42)")
    p.add_argument("--out", help="field dump (rotation/translation/potential) or JSON report")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="dump format")
    p.add_argument("--report", help="also write the JSON report here")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        s = load_scenario(args.config).with_overrides(args.grid, args.origin)
    except ScenarioError as exc:
        print(f"bendkit: {exc}", file=sys.stderr)
        return 2
    report, dump = run(s, args.command, args.seed)
    print(report.render())
    try:
        if args.report:
            with open(args.report, "w", encoding="utf-8") as fh:
                fh.write(report.to_json())
        if args.out:
            key = {"rotation": "rotation", "translation": "translation",
                   "potential": "potential"}.get(args.command)
            if key is not None and key in dump:
                write_grid(args.out, *dump[key], fmt=args.format)
            else:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(report.to_json())
    except OSError as exc:
        print(f"bendkit: cannot write output: {exc}", file=sys.stderr)
        return 2
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
