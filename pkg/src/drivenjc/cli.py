"""Command-line harness: steady states, sweeps, and field dumps.

Subcommands (all take --config, --out, --threads, --truncation):

  steady         solve the configured model at its template parameters
  sweep          run the configured axes scan
  qfunc          like steady/sweep but forces the Q-function field output
  wigner         forces the numeric (and, when dispersive, analytic) Wigner
  semiclassical  mean-field branch sets only, no quantum solve
  entropy        forces entanglement-entropy plus field-free scalars

Exit codes: 0 success, 1 some points failed, 2 invalid configuration,
3 solver failure (no usable output).
"""

import argparse
import sys
from pathlib import Path

from . import __version__, semiclassical
from .exceptions import ConfigError, SweepError
from .sweep import (EQUATIONS, SweepConfig, _branch_sets_for, _indices,
                    parse_config, point_params, run_sweep, write_outputs)

_FORCED_OUTPUTS = {
    "steady": None,
    "sweep": None,
    "qfunc": ("qfield", "mean_a", "mean_n"),
    "wigner": ("wfield_numeric", "mean_a", "mean_n"),
    "entropy": ("entropy", "mean_a", "mean_n", "sigma_minus"),
}


def _load_config(args) -> SweepConfig:
    text = Path(args.config).read_text()
    cfg = parse_config(text)
    if args.truncation is not None:
        if args.truncation == "auto":
            trunc = "auto"
        else:
            try:
                trunc = int(args.truncation)
            except ValueError:
                raise ConfigError(
                    f"--truncation must be an integer or 'auto', got {args.truncation!r}")
            if trunc < 2:
                raise ConfigError(f"--truncation must be >= 2, got {trunc}")
        cfg = SweepConfig(model=cfg.model, axes=cfg.axes, outputs=cfg.outputs,
                          truncation=trunc, grid=cfg.grid,
                          equations=cfg.equations, unit=cfg.unit)
    return cfg


def _with_outputs(cfg: SweepConfig, outputs) -> SweepConfig:
    return SweepConfig(model=cfg.model, axes=cfg.axes, outputs=tuple(outputs),
                       truncation=cfg.truncation, grid=cfg.grid,
                       equations=cfg.equations, unit=cfg.unit)


def _run_quantum(cfg: SweepConfig, args, command: str) -> int:
    if command == "steady" and cfg.axes:
        cfg = SweepConfig(model=cfg.model, axes=(), outputs=cfg.outputs,
                          truncation=cfg.truncation, grid=cfg.grid,
                          equations=cfg.equations, unit=cfg.unit)
    if command == "sweep" and not cfg.axes:
        raise ConfigError("the sweep command needs at least one axis")
    forced = _FORCED_OUTPUTS[command]
    if forced is not None:
        outputs = list(forced)
        if command == "wigner":
            try:
                deltas = [point_params(cfg, i).delta for i in _indices(cfg)]
                if min(deltas) > 0:
                    outputs.insert(1, "wfield_analytic")
            except Exception:
                pass
        cfg = _with_outputs(cfg, outputs)
    rows = run_sweep(cfg, threads=args.threads)
    write_outputs(rows, cfg, args.out)
    failed = sum(1 for r in rows if r.error)
    print(f"{command}: {len(rows)} point(s), {failed} failed -> {args.out}")
    return 1 if failed else 0


def _run_semiclassical(cfg: SweepConfig, args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    failed = 0
    for index in _indices(cfg):
        p = point_params(cfg, index)
        try:
            for bs in _branch_sets_for(p, cfg.equations):
                for tag, idx, re_a, im_a, n, stab in semiclassical.branch_rows(bs):
                    axis_cells = [f"{v:.17g}" for v in
                                  (point_axis_values(cfg, index).values())]
                    rows.append(axis_cells + [tag, str(idx), f"{re_a:.17g}",
                                              f"{im_a:.17g}", f"{n:.17g}", stab])
        except Exception as exc:
            failed += 1
            rows.append([f"{v:.17g}" for v in point_axis_values(cfg, index).values()]
                        + ["error", "", "", "", "", str(exc)])
    header = [ax.name for ax in cfg.axes] + \
        ["equation", "branch", "re_alpha", "im_alpha", "n", "stability"]
    path = out / "branches.csv"
    path.write_text(",".join(header) + "\n"
                    + "\n".join(",".join(r) for r in rows) + "\n")
    print(f"semiclassical: wrote {path} ({len(rows)} branch rows, "
          f"{failed} failed points)")
    return 1 if failed else 0


def point_axis_values(cfg: SweepConfig, index):
    return {ax.name: float(ax.values()[i]) for ax, i in zip(cfg.axes, index)}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drivenjc",
        description="Driven dissipative qubit-cavity steady-state toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
            ("steady", "solve one steady state at the template parameters"),
            ("sweep", "run the configured parameter scan"),
            ("qfunc", "steady state(s) plus Q-function fields"),
            ("wigner", "steady state(s) plus Wigner fields"),
            ("semiclassical", "mean-field branch sets only"),
            ("entropy", "steady state(s) plus entanglement entropy")]:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="YAML config path")
        cmd.add_argument("--out", default=".", help="output directory")
        cmd.add_argument("--threads", type=int, default=1,
                         help="worker processes for sweep points")
        cmd.add_argument("--truncation", default=None, metavar="N|auto",
                         help="override the config truncation")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "semiclassical":
            return _run_semiclassical(cfg, args)
        return _run_quantum(cfg, args, args.command)
    except ConfigError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (SweepError, RuntimeError) as exc:
        print(f"error: solver failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
