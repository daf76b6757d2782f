"""Command-line front end: runs verification suites and the standalone
constructions, writing machine-readable reports.

Exit codes: 0 when every non-skipped check passes, 1 when a check fails,
2 on configuration, input, or precondition errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .catalog import default_grid, diagonal_set, half_sq_norm_fn, space_r2_product
from .errors import MissingArtifacts, SsdkitError
from .fitzpatrick import fitz_triple
from .gridfn import GridFn, conjugate, default_slope_grid
from .grids import GridSpec
from .monotone import MonotoneSet, negative_alignment
from .positivity import PointSet, project_to_p
from .spaces import SsdSpace
from .suites import SUITES, SuiteOptions, run_suite


@dataclass
class RunConfig:
    command: str
    suite: str | None = None
    space_file: str | None = None
    fn_file: str | None = None
    set_file: str | None = None
    grid: GridSpec | None = None
    tol: float | None = None
    seed: int = 42
    out: Path = field(default_factory=lambda: Path("reports"))
    fmt: str = "json"
    lam: float | None = None
    epsilon: float = 0.5
    point: str | None = None
    dual_point: str | None = None
    alpha: float = 1.0
    beta: float = 1.0


def _parse_point(text):
    return np.array([float(tok) for tok in text.split(",")], dtype=float)


def _load_space(cfg: RunConfig) -> SsdSpace:
    if cfg.space_file:
        from .duality import load_space_document

        return load_space_document(cfg.space_file)[0]
    return space_r2_product("two", tau=1.0)


def _load_fn(cfg: RunConfig) -> GridFn:
    if cfg.fn_file:
        return GridFn.from_csv(cfg.fn_file)
    return half_sq_norm_fn(cfg.grid or default_grid(2, -3.0, 3.0, 121))


def _load_set(cfg: RunConfig):
    if cfg.set_file:
        return PointSet.from_csv(cfg.set_file)
    return diagonal_set(-3.0, 3.0, 121).underlying


def _write_suite_reports(cfg: RunConfig, name: str, reports) -> bool:
    cfg.out.mkdir(parents=True, exist_ok=True)
    doc = {
        "suite": name,
        "passed": all(r.passed for r in reports),
        "reports": [r.to_dict() for r in reports],
    }
    path = cfg.out / f"{name}.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if cfg.fmt == "csv":
        with open(cfg.out / f"{name}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["suite", "check_id", "anchor", "status", "worst_residual"])
            for rep in reports:
                writer.writerows(rep.rows())
    for rep in reports:
        print(rep.summary_line())
    return doc["passed"]


def cmd_verify(cfg: RunConfig) -> int:
    names = sorted(SUITES) if cfg.suite in (None, "all") else [cfg.suite]
    if any(n not in SUITES for n in names):
        raise SsdkitError(f"unknown suite {cfg.suite!r}; known: "
                          f"{', '.join(sorted(SUITES))} or 'all'")
    opts = SuiteOptions(grid=cfg.grid, tol=cfg.tol, seed=cfg.seed,
                        lam=cfg.lam, epsilon=cfg.epsilon)
    if cfg.set_file:
        ps = PointSet.from_csv(cfg.set_file, label=Path(cfg.set_file).stem)
        opts.point_set = ps
        if ps.dim % 2 == 0:
            opts.monotone_set = MonotoneSet(ps, ps.dim // 2)
    all_ok = True
    for name in names:
        reports = run_suite(name, opts)
        all_ok &= _write_suite_reports(cfg, name, reports)
    return 0 if all_ok else 1


def cmd_report(cfg: RunConfig) -> int:
    files = sorted(p for p in cfg.out.glob("*.json") if p.name != "summary.json")
    if not files:
        raise MissingArtifacts(f"no report artifacts under {cfg.out}")
    rows = []
    suites = {}
    for path in files:
        doc = json.loads(path.read_text(encoding="utf-8"))
        name = doc.get("suite", path.stem)
        n_fail = 0
        for rep in doc.get("reports", []):
            for check in rep.get("checks", []):
                rows.append({
                    "suite": name,
                    "check_id": check["id"],
                    "anchor": check["anchor"],
                    "status": check["status"],
                    "worst_residual": check["worst_residual"],
                })
                n_fail += check["status"] == "fail"
        suites[name] = {"passed": bool(doc.get("passed", n_fail == 0)),
                        "n_failed": n_fail}
    rows.sort(key=lambda r: (r["suite"], r["check_id"]))
    summary = {
        "suites": suites,
        "checks": rows,
        "n_checks": len(rows),
        "n_failed": sum(r["status"] == "fail" for r in rows),
        "n_skipped": sum(r["status"] == "skipped" for r in rows),
    }
    (cfg.out / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    with open(cfg.out / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["suite", "check_id", "anchor", "status", "worst_residual"])
        for r in rows:
            writer.writerow([r["suite"], r["check_id"], r["anchor"], r["status"],
                             "" if r["worst_residual"] is None else repr(r["worst_residual"])])
    print(f"{summary['n_checks']} checks aggregated from {len(files)} suites; "
          f"{summary['n_failed']} failed, {summary['n_skipped']} skipped")
    return 0


def cmd_conjugate(cfg: RunConfig) -> int:
    fn = _load_fn(cfg)
    dual_grid = cfg.grid or default_slope_grid(fn)
    star = conjugate(fn, dual_grid)
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out / "conjugate.csv"
    star.to_csv(path)
    print(f"wrote {path} ({dual_grid.size} dual points)")
    return 0


def cmd_fitzpatrick(cfg: RunConfig) -> int:
    space = _load_space(cfg)
    pts = _load_set(cfg)
    grid = cfg.grid or default_grid(space.dim, -3.0, 3.0, 61)
    triple = fitz_triple(space, pts, grid)
    cfg.out.mkdir(parents=True, exist_ok=True)
    triple.phi_fn.to_csv(cfg.out / "phi.csv")
    triple.theta_fn.to_csv(cfg.out / "theta.csv")
    triple.star_theta_fn.to_csv(cfg.out / "star_theta.csv")
    from .fitzpatrick import theta

    image = grid.points() @ space.pairing.T
    gap = float(np.max(np.abs(triple.phi_fn.values - theta(space, pts, image))))
    doc = {"set_size": len(pts), "grid": grid.to_dict(),
           "phi_equals_theta_through_map_gap": gap}
    (cfg.out / "fitz_checks.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote phi/theta/star_theta under {cfg.out} (composition gap {gap:.3e})")
    return 0


def cmd_project(cfg: RunConfig) -> int:
    space = _load_space(cfg)
    fn = _load_fn(cfg)
    if cfg.point is None:
        raise SsdkitError("project needs --point")
    c = _parse_point(cfg.point)
    trace = project_to_p(fn, space, c, cfg.epsilon)
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out / "projection_trace.json"
    path.write_text(json.dumps(trace.to_dict(), indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    print(f"{len(trace.iterates)} steps, limit {trace.limit.tolist()}, "
          f"distance {trace.achieved_distance:.6f} (bound {trace.bound():.6f}); wrote {path}")
    return 0


def cmd_align(cfg: RunConfig) -> int:
    ps = _load_set(cfg)
    if ps.dim % 2 != 0:
        raise SsdkitError("alignment needs a monotone set of pairs")
    mset = MonotoneSet(ps, ps.dim // 2)
    if cfg.point is None or cfg.dual_point is None:
        raise SsdkitError("align needs --point and --dual-point")
    res = negative_alignment(mset, _parse_point(cfg.point),
                             _parse_point(cfg.dual_point), cfg.alpha, cfg.beta)
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out / "alignment.json"
    path.write_text(json.dumps(res.to_dict(), indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    print(f"omega {res.omega:.9f}, radii ({res.rho:.6f}, {res.sigma:.6f}), "
          f"product {res.inner:.6f}; wrote {path}")
    return 0


COMMANDS = {
    "verify": cmd_verify,
    "report": cmd_report,
    "conjugate": cmd_conjugate,
    "fitzpatrick": cmd_fitzpatrick,
    "project": cmd_project,
    "align": cmd_align,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssdkit",
        description="verification batteries for symmetric-pairing spaces and "
                    "monotone-set representers")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--space", dest="space_file", help="space description (json)")
        p.add_argument("--fn", dest="fn_file", help="grid function (csv)")
        p.add_argument("--set", dest="set_file", help="point set (csv, one point per row)")
        p.add_argument("--grid", help="grid override: lo:hi:n[,lo:hi:n...]")
        p.add_argument("--tol", type=float, help="tolerance override")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--out", default="reports", help="output directory")
        p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")

    p = sub.add_parser("verify", help="run a named verification suite")
    common(p)
    p.add_argument("--suite", default="all",
                   help="suite name or 'all' (known: %s)" % ", ".join(sorted(SUITES)))
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="helix pitch checked verbatim (a flattened pitch fails)")
    p.add_argument("--epsilon", type=float, default=0.5,
                   help="projection parameter in (0, 1)")

    p = sub.add_parser("report", help="aggregate prior runs into one summary")
    common(p)

    p = sub.add_parser("conjugate", help="conjugate of a grid function")
    common(p)

    p = sub.add_parser("fitzpatrick", help="representer functions of a point set")
    common(p)

    p = sub.add_parser("project", help="certified projection toward the touching set")
    common(p)
    p.add_argument("--point", help="start point, comma separated")
    p.add_argument("--epsilon", type=float, default=0.5)

    p = sub.add_parser("align", help="balanced-approach extraction at a point")
    common(p)
    p.add_argument("--point", help="primal half, comma separated")
    p.add_argument("--dual-point", dest="dual_point", help="dual half, comma separated")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    return parser


def config_from_args(args) -> RunConfig:
    cfg = RunConfig(command=args.command)
    for name in ("suite", "space_file", "fn_file", "set_file", "tol", "seed",
                 "fmt", "lam", "epsilon", "point", "dual_point", "alpha", "beta"):
        if hasattr(args, name) and getattr(args, name) is not None:
            setattr(cfg, name, getattr(args, name))
    if cfg.tol is not None and cfg.tol <= 0:
        raise SsdkitError("tolerance override must be positive")
    if getattr(args, "out", None):
        cfg.out = Path(args.out)
    if getattr(args, "grid", None):
        cfg.grid = GridSpec.from_string(args.grid)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except SsdkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
