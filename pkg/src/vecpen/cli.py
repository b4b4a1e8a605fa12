"""Command-line entry point.

Exit codes: 0 success, 1 theorem violation, 2 invalid input, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .cones import Tolerances
from .efficiency import efficiency_report
from .errors import VecpenError
from .fixtures import EXAMPLE_NAMES
from .io import dumps, load_instance, read_report
from .problem import FamilySpec, Instance
from .theorems import (
    INSTANCE_THEOREMS,
    check_claimed_sets,
    reproduce_paper_example,
    run_corpus,
    verify_lifted_cone_lemma,
)

EXIT_OK, EXIT_VIOLATION, EXIT_INVALID, EXIT_IO = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    instance_path: str | None = None
    report_path: str | None = None
    tol_mem: float | None = None
    tol_strict: float | None = None
    eps_grid: tuple | None = None
    seed: int = 0
    fmt: str = "json"


class _IOFailure(Exception):
    pass


def _positive(text: str) -> float:
    val = float(text)
    if not val > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return val


def _grid(text: str) -> tuple:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers") from None
    if not vals or any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("grid values must be positive")
    return vals


def _load(path: str, cfg: RunConfig) -> Instance:
    try:
        inst = load_instance(path)
    except OSError as exc:
        raise _IOFailure(str(exc)) from None
    return _apply_overrides(inst, cfg)


def _apply_overrides(inst: Instance, cfg: RunConfig) -> Instance:
    changes = {}
    if cfg.tol_mem is not None or cfg.tol_strict is not None:
        changes["tol"] = Tolerances(cfg.tol_mem or inst.tol.mem, cfg.tol_strict or inst.tol.strict)
    if cfg.eps_grid is not None:
        fs = inst.family_spec
        changes["family_spec"] = FamilySpec(fs.kind, tuple(sorted(cfg.eps_grid)), fs.members,
                                            fs.lift_scales)
    return inst.replace(**changes) if changes else inst


def _header(cfg: RunConfig, inst: Instance | None = None) -> dict:
    out = {"tool": {"name": "vecpen", "version": __version__}, "seed": cfg.seed}
    if inst is not None:
        out["instance"] = inst.name
        out["tolerances"] = {"mem": inst.tol.mem, "strict": inst.tol.strict}
    return out


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise _IOFailure(str(exc)) from None


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def solve_problems(inst: Instance) -> dict:
    """Efficiency reports for ``f`` over ``S`` and ``D`` and for ``(f, nu)`` over ``D``."""
    return {
        "S": efficiency_report(inst, inst.feasible, inst.cone, inst.family, inst.tol).to_dict(),
        "D": efficiency_report(inst, None, inst.cone, inst.family, inst.tol).to_dict(),
        "D_ext": efficiency_report(inst, None, inst.extended_cone, inst.lifted_family, inst.tol,
                                   extended=True).to_dict(),
    }


def run_solve(cfg: RunConfig) -> int:
    inst = _load(cfg.instance_path, cfg)
    problems = solve_problems(inst)
    if cfg.fmt == "csv":
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "feasible"] + [f"{k}_{p}" for p in problems
                                            for k in ("eff", "weff", "peff")])
        sets = {(p, k): set(problems[p][k]) for p in problems for k in ("eff", "weff", "peff")}
        feas = set(inst.feasible)
        for i in range(inst.n_points):
            w.writerow([i, int(i in feas)] + [int(i in sets[(p, k)]) for p in problems
                                              for k in ("eff", "weff", "peff")])
        _emit(buf.getvalue(), cfg.report_path)
    else:
        _emit(dumps(dict(_header(cfg, inst), problems=problems)), cfg.report_path)
    return EXIT_OK


def _instance_paths(path: str) -> list:
    p = Path(path)
    if p.is_dir():
        files = sorted(p.glob("*.json"))
        if not files:
            raise _IOFailure(f"no instance files in {path}")
        return [str(f) for f in files]
    if not p.exists():
        raise _IOFailure(f"no such file: {path}")
    return [path]


def run_verify(cfg: RunConfig, theorems=None, against: str | None = None,
               lemma: bool = False) -> int:
    paths = _instance_paths(cfg.instance_path)
    insts = [_load(p, cfg) for p in paths]
    entries = []
    for p, (name, verdicts) in zip(paths, run_corpus(insts, theorems)):
        entries.append({"name": name or Path(p).stem,
                        "verdicts": [v.to_dict() for v in verdicts]})
    violated = any(v["conclusion"] == "violated" for e in entries for v in e["verdicts"])
    report = dict(_header(cfg), instances=entries)
    if against is not None:
        if len(insts) != 1:
            raise VecpenError("--against needs a single instance file")
        try:
            claimed_doc = read_report(against)
        except OSError as exc:
            raise _IOFailure(str(exc)) from None
        try:
            probs = claimed_doc["problems"]
            claimed = {"PS": probs["S"]["peff"], "PD": probs["D"]["peff"],
                       "PXD": probs["D_ext"]["peff"]}
        except (KeyError, TypeError):
            raise VecpenError("report lacks problems.S/D/D_ext peff sets") from None
        checks = check_claimed_sets(insts[0], claimed)
        report["against"] = [v.to_dict() for v in checks]
        violated = violated or any(v.violated for v in checks)
    if lemma:
        v = verify_lifted_cone_lemma(seed=cfg.seed)
        report["lifted_cone_lemma"] = v.to_dict()
        violated = violated or v.violated
    _emit(dumps(report), cfg.report_path)
    return EXIT_VIOLATION if violated else EXIT_OK


def run_repro(cfg: RunConfig, name: str) -> int:
    names = list(EXAMPLE_NAMES) if name == "all" else [name]
    if any(n not in EXAMPLE_NAMES for n in names):
        raise VecpenError(f"unknown example {name!r}; choose from {list(EXAMPLE_NAMES)} or all")
    verdicts = [reproduce_paper_example(n) for n in names]
    _emit(dumps(dict(_header(cfg), examples=[v.to_dict() for v in verdicts])), cfg.report_path)
    return EXIT_OK if all(v.verified for v in verdicts) else EXIT_VIOLATION


def plot_rows(inst: Instance) -> list:
    """``[index, f_1..f_m, label, tag]`` rows; labels refer to the problem over ``S``."""
    rep = efficiency_report(inst, inst.feasible, inst.cone, inst.family, inst.tol)
    peff, eff, weff = rep.peff.as_set(), rep.eff.as_set(), rep.weff.as_set()
    tags = inst.topo_tags or {}
    feas = set(inst.feasible)
    rows = []
    for i in range(inst.n_points):
        label = ("peff" if i in peff else "eff" if i in eff else "weff" if i in weff
                 else "none")
        tag = tags.get(i, "untagged") if i in feas else "exterior"
        rows.append([i] + [repr(float(v)) for v in inst.f_values[i]] + [label, tag])
    return rows


_COLOURS = {"peff": "#d62728", "eff": "#ff7f0e", "weff": "#1f77b4", "none": "#bbbbbb"}


def scatter_svg(inst: Instance, rows: list, size: int = 400) -> str:
    F = inst.f_values
    lo, hi = F.min(axis=0), F.max(axis=0)
    span = [h - l if h > l else 1.0 for l, h in zip(lo, hi)]
    pad = 20
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">',
           f'<rect width="{size}" height="{size}" fill="white"/>']
    order = sorted(range(len(rows)), key=lambda i: list(_COLOURS).index(rows[i][-2]), reverse=True)
    for i in order:
        x = pad + (F[i, 0] - lo[0]) / span[0] * (size - 2 * pad)
        y = size - pad - (F[i, 1] - lo[1]) / span[1] * (size - 2 * pad)
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="3" fill="{_COLOURS[rows[i][-2]]}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot_data(cfg: RunConfig, svg_path: str | None = None) -> int:
    inst = _load(cfg.instance_path, cfg)
    if inst.dim_y not in (1, 2, 3):
        raise VecpenError(f"plot data supports dim_y in 1..3, got {inst.dim_y}")
    rows = plot_rows(inst)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index"] + [f"f{k + 1}" for k in range(inst.dim_y)] + ["label", "tag"])
    w.writerows(rows)
    _emit(buf.getvalue(), cfg.report_path)
    if svg_path is not None:
        if inst.dim_y != 2:
            raise VecpenError("the SVG scatter needs dim_y = 2")
        _emit(scatter_svg(inst, rows), svg_path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-mem", type=_positive, help="membership tolerance")
    common.add_argument("--tol-strict", type=_positive, help="strict (interior) tolerance")
    common.add_argument("--eps-grid", type=_grid, help="comma-separated dilation parameters")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--report", help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="vecpen", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"vecpen {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="efficient sets of the three problems")
    p.add_argument("instance")

    p = sub.add_parser("verify", parents=[common], help="run the theorem checks")
    p.add_argument("instance", help="instance file or directory of instance files")
    p.add_argument("--theorems", help=f"comma-separated subset of {','.join(INSTANCE_THEOREMS)}")
    p.add_argument("--against", help="check the sets claimed by a solve report")
    p.add_argument("--lemma", action="store_true", help="also check the lifted-cone lemma")

    p = sub.add_parser("repro", parents=[common], help="reproduce a worked example")
    p.add_argument("name", help=f"one of {', '.join(EXAMPLE_NAMES)} or all")

    p = sub.add_parser("plot-data", parents=[common], help="CSV of objective values and labels")
    p.add_argument("instance")
    p.add_argument("--svg", help="also write an SVG scatter (dim_y = 2)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    cfg = RunConfig(args.command, getattr(args, "instance", None), args.report, args.tol_mem,
                    args.tol_strict, args.eps_grid, args.seed, args.format)
    try:
        if args.command == "solve":
            return run_solve(cfg)
        if args.command == "verify":
            theorems = args.theorems.split(",") if args.theorems else None
            return run_verify(cfg, theorems, args.against, args.lemma)
        if args.command == "repro":
            return run_repro(cfg, args.name)
        return emit_plot_data(cfg, args.svg)
    except _IOFailure as exc:
        print(f"vecpen: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except VecpenError as exc:
        print(f"vecpen: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
