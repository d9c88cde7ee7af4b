"""Parameter sweeps over the drive phase space with deterministic output.

A sweep is described by a small YAML document (grammar in the README):
a model-parameter template, one or two scan axes, the requested outputs,
the truncation policy, and an optional phase-space grid.  Points are solved
independently (optionally in a process pool) and rows are emitted in
lexicographic axis order, so repeated runs produce byte-identical CSVs.
"""

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
import yaml

from . import observables, quasiprob, semiclassical
from .exceptions import ConfigError, DomainError, SweepError
from .hilbert import HilbertDims, annihilation, cavity_operator, qubit_ops, qubit_operator
from .lindblad import (ModelParams, build_liouvillian, mean_photon_number,
                       steady_state, steady_state_auto)

AXIS_NAMES = ("eps_d", "delta_omega_c", "delta_omega_q", "delta_over_g")
SCALAR_OUTPUTS = ("mean_a", "mean_n", "sigma_minus", "sigma_z", "entropy", "g2")
FIELD_OUTPUTS = ("qfield", "wfield_numeric", "wfield_analytic")
OUTPUTS = SCALAR_OUTPUTS + FIELD_OUTPUTS + ("branches",)
EQUATIONS = ("full", "kerr", "duffing", "split_lorentzian", "phase")
STABILITY_RULE = ("s-curve order: of three coexisting branches the middle one "
                  "is labelled unstable; resonance solvers return 'unknown'")


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int
    spacing: str = "linear"

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.min])
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class ModelTemplate:
    g: float
    kappa: float
    gamma: float
    delta_omega_c: float
    eps_d: complex
    delta: float | None = None          # exactly one of delta /
    delta_omega_q: float | None = None  # delta_omega_q is set


@dataclass(frozen=True)
class SweepConfig:
    model: ModelTemplate
    axes: tuple[Axis, ...]
    outputs: tuple[str, ...]
    truncation: int | str = "auto"      # positive integer or "auto"
    grid: quasiprob.PhaseSpaceGrid | None = None
    equations: tuple[str, ...] = ("full",)
    unit: str = "gamma"

    def shape(self) -> tuple[int, ...]:
        return tuple(ax.count for ax in self.axes) if self.axes else (1,)

    def n_points(self) -> int:
        return int(np.prod(self.shape()))


def _require_keys(mapping, allowed, required, where):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{where} must be a mapping, got {type(mapping).__name__}")
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"unknown key '{key}' in {where}")
    for key in required:
        if key not in mapping:
            raise ConfigError(f"missing required key '{key}' in {where}")


def _as_float(val, key):
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"key '{key}' must be a number, got {val!r}")
    return float(val)


def _parse_eps(val):
    if isinstance(val, (int, float)) and not isinstance(val, bool):
        return complex(val)
    if isinstance(val, list) and len(val) == 2:
        return complex(_as_float(val[0], "eps_d[0]"), _as_float(val[1], "eps_d[1]"))
    raise ConfigError(f"key 'eps_d' must be a number or [re, im], got {val!r}")


def _parse_model(node) -> ModelTemplate:
    _require_keys(node, ("g", "kappa", "gamma", "delta", "delta_omega_q",
                         "delta_omega_c", "eps_d"),
                  ("g", "kappa", "gamma", "delta_omega_c", "eps_d"), "model")
    if ("delta" in node) == ("delta_omega_q" in node):
        raise ConfigError("model must set exactly one of 'delta' or 'delta_omega_q'")
    delta = _as_float(node["delta"], "delta") if "delta" in node else None
    if delta is not None and delta < 0:
        raise ConfigError(f"key 'delta' must be >= 0, got {delta}")
    return ModelTemplate(
        g=_as_float(node["g"], "g"),
        kappa=_as_float(node["kappa"], "kappa"),
        gamma=_as_float(node["gamma"], "gamma"),
        delta_omega_c=_as_float(node["delta_omega_c"], "delta_omega_c"),
        eps_d=_parse_eps(node["eps_d"]),
        delta=delta,
        delta_omega_q=(_as_float(node["delta_omega_q"], "delta_omega_q")
                       if "delta_omega_q" in node else None))


def _parse_axis(node, idx) -> Axis:
    where = f"axes[{idx}]"
    _require_keys(node, ("name", "min", "max", "count", "spacing"),
                  ("name", "min", "max", "count"), where)
    name = node["name"]
    if name not in AXIS_NAMES:
        raise ConfigError(f"{where}: unknown axis name '{name}' "
                          f"(valid: {', '.join(AXIS_NAMES)})")
    count = node["count"]
    if isinstance(count, bool) or not isinstance(count, int) or count < 1:
        raise ConfigError(f"{where}: key 'count' must be an integer >= 1, got {count!r}")
    spacing = node.get("spacing", "linear")
    if spacing not in ("linear", "log"):
        raise ConfigError(f"{where}: key 'spacing' must be linear or log")
    lo = _as_float(node["min"], "min")
    hi = _as_float(node["max"], "max")
    if hi < lo:
        raise ConfigError(f"{where}: max {hi} below min {lo}")
    if spacing == "log" and lo <= 0:
        raise ConfigError(f"{where}: log spacing needs min > 0")
    return Axis(name=name, min=lo, max=hi, count=count, spacing=spacing)


def _parse_grid(node) -> quasiprob.PhaseSpaceGrid:
    _require_keys(node, ("x_min", "x_max", "y_min", "y_max", "nx", "ny"),
                  ("x_min", "x_max", "y_min", "y_max"), "grid")
    return quasiprob.PhaseSpaceGrid(
        x_min=_as_float(node["x_min"], "x_min"),
        x_max=_as_float(node["x_max"], "x_max"),
        y_min=_as_float(node["y_min"], "y_min"),
        y_max=_as_float(node["y_max"], "y_max"),
        nx=int(node.get("nx", 201)), ny=int(node.get("ny", 201)))


def _template_delta(model: ModelTemplate) -> float:
    if model.delta is not None:
        return model.delta
    return abs(model.delta_omega_q - model.delta_omega_c)


def parse_config(text: str) -> SweepConfig:
    """Parse and validate a YAML sweep document.

    Rates are dimensionless ratios to gamma unless the 'unit' key relabels
    them (the solver itself is homogeneous in the rate unit).  Unknown keys
    are rejected; every error names the offending key.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"not valid YAML: {exc}") from exc
    _require_keys(doc, ("model", "axes", "outputs", "truncation", "grid",
                        "equations", "unit"), ("model",), "the document")
    model = _parse_model(doc["model"])

    axes_node = doc.get("axes", [])
    if not isinstance(axes_node, list) or len(axes_node) > 2:
        raise ConfigError("key 'axes' must be a list of at most 2 axes")
    axes = tuple(_parse_axis(node, i) for i, node in enumerate(axes_node))
    names = [ax.name for ax in axes]
    if len(set(names)) != len(names):
        raise ConfigError(f"duplicate axis name in 'axes': {names}")
    if "delta_over_g" in names and model.delta is None:
        raise ConfigError("a 'delta_over_g' axis requires the model to use "
                          "'delta' rather than 'delta_omega_q'")
    if "delta_omega_q" in names and model.delta is not None:
        raise ConfigError("a 'delta_omega_q' axis conflicts with a model "
                          "using 'delta'")

    outputs_node = doc.get("outputs", ["mean_n"])
    if not isinstance(outputs_node, list) or not outputs_node:
        raise ConfigError("key 'outputs' must be a non-empty list")
    for out in outputs_node:
        if out not in OUTPUTS:
            raise ConfigError(f"unknown output '{out}' "
                              f"(valid: {', '.join(OUTPUTS)})")
    outputs = tuple(dict.fromkeys(outputs_node))

    truncation = doc.get("truncation", "auto")
    if truncation != "auto":
        if isinstance(truncation, bool) or not isinstance(truncation, int) \
                or truncation < 2:
            raise ConfigError(
                f"key 'truncation' must be 'auto' or an integer >= 2, "
                f"got {truncation!r}")

    grid = _parse_grid(doc["grid"]) if "grid" in doc else None

    eq_node = doc.get("equations", ["full"])
    if not isinstance(eq_node, list) or not eq_node:
        raise ConfigError("key 'equations' must be a non-empty list")
    for eq in eq_node:
        if eq not in EQUATIONS:
            raise ConfigError(f"unknown equation '{eq}' "
                              f"(valid: {', '.join(EQUATIONS)})")

    unit = doc.get("unit", "gamma")
    if not isinstance(unit, str):
        raise ConfigError("key 'unit' must be a string label")

    if "wfield_analytic" in outputs:
        delta_ok = _template_delta(model) > 0 or any(
            ax.name == "delta_over_g" and ax.min > 0 for ax in axes)
        if any(ax.name == "delta_over_g" and ax.min <= 0 for ax in axes):
            delta_ok = False
        if not delta_ok:
            raise ConfigError(
                "output 'wfield_analytic' requires the dispersive regime "
                "(qubit-cavity detuning delta > 0 at every sweep point)")

    return SweepConfig(model=model, axes=axes, outputs=outputs,
                       truncation=truncation, grid=grid,
                       equations=tuple(eq_node), unit=unit)


def point_params(cfg: SweepConfig, index: tuple[int, ...]) -> ModelParams:
    """Model parameters at one lexicographic grid index."""
    vals = {}
    for ax, i in zip(cfg.axes, index):
        vals[ax.name] = float(ax.values()[i])
    m = cfg.model
    eps_d = complex(vals.get("eps_d", m.eps_d))
    dwc = vals.get("delta_omega_c", m.delta_omega_c)
    if m.delta is not None:
        delta = vals["delta_over_g"] * m.g if "delta_over_g" in vals else m.delta
        dwq = dwc + delta
    else:
        dwq = vals.get("delta_omega_q", m.delta_omega_q)
    return ModelParams(g=m.g, kappa=m.kappa, gamma=m.gamma, delta_omega_c=dwc,
                       delta_omega_q=dwq, eps_d=eps_d)


def _indices(cfg: SweepConfig):
    shape = cfg.shape()
    if not cfg.axes:
        return [()]
    return [tuple(idx) for idx in np.ndindex(*shape)]


@dataclass
class ResultRow:
    index: tuple[int, ...]
    axis_values: dict
    scalars: dict
    fields: dict = field(default_factory=dict)       # name -> QuasiDistField
    branch_sets: list = field(default_factory=list)  # list[BranchSet]
    n_fock: int | None = None
    error: str | None = None


def _branch_sets_for(p: ModelParams, equations):
    out = []
    for eq in equations:
        if eq == "full":
            out.append(semiclassical.solve_full(p))
        elif eq == "kerr":
            out.append(semiclassical.solve_kerr(p))
        elif eq == "duffing":
            out.append(semiclassical.solve_duffing(p))
        elif eq == "split_lorentzian":
            out.append(semiclassical.solve_split_lorentzian(p))
        elif eq == "phase":
            pb = semiclassical.solve_phase_bistability(p)
            out.append(semiclassical.BranchSet(equation="phase", branches=[
                semiclassical.Branch(alpha=b.alpha, n=b.n) for b in pb]))
    return out


def _max_semiclassical_alpha(cfg: SweepConfig) -> float:
    """Largest branch amplitude across the sweep, for auto grid sizing."""
    best = 1.0
    for index in _indices(cfg):
        p = point_params(cfg, index)
        try:
            if p.g > 0 and p.delta > 0:
                bs = semiclassical.solve_kerr(p)
                cand = max((abs(b.alpha) for b in bs.branches), default=1.0)
            elif p.g > 0:
                pb = semiclassical.solve_phase_bistability(p)
                cand = max((abs(b.alpha) for b in pb), default=1.0)
            else:
                cand = abs(p.eps_d) / abs(p.kappa - 1j * p.delta_omega_c)
        except (DomainError, RuntimeError):
            cand = abs(p.eps_d) / p.kappa
        best = max(best, cand)
    return best


def resolve_grid(cfg: SweepConfig) -> quasiprob.PhaseSpaceGrid | None:
    """The shared field grid (explicit, or auto-sized from mean-field scales)."""
    wants_fields = any(o in FIELD_OUTPUTS for o in cfg.outputs)
    if not wants_fields:
        return None
    if cfg.grid is not None:
        return cfg.grid
    return quasiprob.auto_grid(_max_semiclassical_alpha(cfg))


def _solve_point(cfg: SweepConfig, index: tuple[int, ...],
                 grid: quasiprob.PhaseSpaceGrid | None) -> ResultRow:
    p = point_params(cfg, index)
    row = ResultRow(index=index,
                    axis_values={ax.name: float(ax.values()[i])
                                 for ax, i in zip(cfg.axes, index)},
                    scalars={})
    errors = []
    rho = dims = None
    try:
        if cfg.truncation == "auto":
            rho, dims, _ = steady_state_auto(p)
        else:
            dims = HilbertDims(int(cfg.truncation))
            rho = steady_state(build_liouvillian(p, dims))
        row.n_fock = dims.n_fock
    except Exception as exc:  # record-and-continue per point
        row.error = f"steady_state: {exc}"
        return row

    a_c = annihilation(dims.n_fock)
    a = cavity_operator(a_c, dims)
    _, _, sz = qubit_ops()
    rho_c = observables.partial_trace(rho, "cavity")
    for name in cfg.outputs:
        try:
            if name == "mean_a":
                row.scalars[name] = observables.expectation(rho, a)
            elif name == "mean_n":
                row.scalars[name] = mean_photon_number(rho, dims)
            elif name == "sigma_minus":
                sm, _, _ = qubit_ops()
                row.scalars[name] = observables.expectation(
                    rho, qubit_operator(sm, dims))
            elif name == "sigma_z":
                row.scalars[name] = observables.expectation(
                    rho, qubit_operator(sz, dims)).real
            elif name == "entropy":
                row.scalars[name] = observables.entanglement_entropy(
                    observables.qubit_reduced(rho))
            elif name == "g2":
                row.scalars[name] = observables.g2_zero(rho_c)
            elif name == "qfield":
                row.fields[name] = quasiprob.q_function(rho_c, grid)
            elif name == "wfield_numeric":
                row.fields[name] = quasiprob.wigner_numeric(rho_c, grid)
            elif name == "wfield_analytic":
                from .dispersive import duffing_params, wigner_analytic_field
                row.fields[name] = wigner_analytic_field(duffing_params(p), grid)
            elif name == "branches":
                row.branch_sets = _branch_sets_for(p, cfg.equations)
        except Exception as exc:
            errors.append(f"{name}: {exc}")
    if errors:
        row.error = "; ".join(errors)
    return row


def run_sweep(cfg: SweepConfig, threads: int = 1) -> list[ResultRow]:
    """Solve every sweep point; rows come back in lexicographic axis order.

    Per-point failures land in the row's ``error`` field; only a sweep in
    which every point failed raises :class:`SweepError`.
    """
    grid = resolve_grid(cfg)
    indices = _indices(cfg)
    if threads > 1 and len(indices) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_solve_point, [cfg] * len(indices), indices,
                                 [grid] * len(indices), chunksize=1))
    else:
        rows = [_solve_point(cfg, index, grid) for index in indices]
    rows.sort(key=lambda r: r.index)
    if all(r.error is not None and not r.scalars and not r.fields
           for r in rows):
        raise SweepError(f"all {len(rows)} sweep points failed; first error: "
                         f"{rows[0].error}")
    return rows


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.17g}"
    if isinstance(x, int):
        return str(x)
    return str(x)


def _scalar_columns(outputs):
    cols = []
    for name in outputs:
        if name in ("mean_a", "sigma_minus"):
            cols += [f"re_{name}", f"im_{name}"]
        elif name in SCALAR_OUTPUTS:
            cols.append(name)
    return cols


def _scalar_cells(row: ResultRow, outputs):
    cells = []
    for name in outputs:
        if name in ("mean_a", "sigma_minus"):
            val = row.scalars.get(name)
            cells += ["", ""] if val is None else [_fmt(val.real), _fmt(val.imag)]
        elif name in SCALAR_OUTPUTS:
            val = row.scalars.get(name)
            cells.append("" if val is None else _fmt(float(val)))
    return cells


def write_outputs(rows: list[ResultRow], cfg: SweepConfig, out_dir) -> dict:
    """Write results.csv, field/branch files, and manifest.json.

    Floats are written with 17 significant digits so values round-trip
    exactly; the manifest echoes the configuration, the package version,
    and the truncation used at every point.
    """
    from pathlib import Path
    from . import __version__

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    field_cols = [o for o in cfg.outputs if o in FIELD_OUTPUTS]
    want_branches = "branches" in cfg.outputs
    axis_cols = [ax.name for ax in cfg.axes]
    header = (axis_cols + _scalar_columns(cfg.outputs)
              + [f"{name}_file" for name in field_cols]
              + (["branches_file"] if want_branches else []) + ["error"])

    files = {"results": "results.csv", "fields": [], "branches": []}
    lines = [",".join(header)]
    for k, row in enumerate(rows):
        cells = [_fmt(row.axis_values[name]) for name in axis_cols]
        cells += _scalar_cells(row, cfg.outputs)
        for name in field_cols:
            if name in row.fields:
                fname = f"field_{k:05d}_{name}.csv"
                quasiprob.save_field(row.fields[name], out / fname,
                                     params=row.axis_values)
                files["fields"].append(fname)
                cells.append(fname)
            else:
                cells.append("")
        if want_branches:
            if row.branch_sets:
                bname = f"branches_{k:05d}.csv"
                semiclassical.save_branches(row.branch_sets, out / bname)
                files["branches"].append(bname)
                cells.append(bname)
            else:
                cells.append("")
        cells.append(row.error or "")
        lines.append(",".join(cells))
    (out / "results.csv").write_text("\n".join(lines) + "\n")

    manifest = {
        "version": __version__,
        "unit": cfg.unit,
        "config": _config_echo(cfg),
        "stability_rule": STABILITY_RULE,
        "points": [{"index": list(r.index), "n_fock": r.n_fock,
                    "error": r.error} for r in rows],
        "files": files,
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return manifest


def _config_echo(cfg: SweepConfig) -> dict:
    doc = asdict(cfg)
    doc["model"]["eps_d"] = [cfg.model.eps_d.real, cfg.model.eps_d.imag]
    doc["axes"] = [asdict(ax) for ax in cfg.axes]
    if cfg.grid is not None:
        doc["grid"] = asdict(cfg.grid)
    return doc


def read_results_csv(path) -> list[dict]:
    """Read back results.csv; numeric cells become floats, empty cells None."""
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            parsed = {}
            for key, val in rec.items():
                if val == "":
                    parsed[key] = None
                elif key.endswith("_file") or key == "error":
                    parsed[key] = val
                else:
                    try:
                        parsed[key] = float(val)
                    except ValueError:
                        parsed[key] = val
            rows.append(parsed)
    return rows
