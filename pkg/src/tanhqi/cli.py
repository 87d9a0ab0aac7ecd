"""Batch command-line runner for the kernel and operator experiments.

Subcommands
-----------
converge      error sweep of the basic or Kantorovich operator vs n
voronovskaya  residual sweeps for moment-correction orders 0..m_max
frac          fractional operator vs the D^beta power-rule oracle
kernel-dump   psi samples and discrete moments on a grid
manifold      metric-weighted operator on a chart vs the sampled f

Each run writes ``<out>.csv`` (the sweep table, 17 significant digits,
LF line endings) and ``<out>.json`` (the full report); ``--format json``
skips the CSV.  Runs are fully deterministic: identical configs produce
byte-identical files.

Exit status: 0 success, 2 invalid configuration, 3 numerical diagnostic
failure, 4 I/O failure.  Errors are printed to stderr as a single JSON
line ``{"status": ..., "error": ...}``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from .activation import ActivationParams
from .analysis import (
    ConvergenceReport,
    Row,
    fractional_rate,
    grid_points,
    operator_convergence,
    rate_fit,
    residual_orders,
    sup_error,
    ERROR_FLOOR,
    NORM_NOTE,
)
from .fractional import FracConfig
from .kernel import DensityKernel, MultiIndex, moment, psi_eval
from .manifold import DiagnosticError, MetricKernel, chart_preset, operator_on_chart
from .operators import OPERATOR_KINDS
from .presets import function_preset, preset_names

__all__ = ["main", "ExperimentConfig", "ConfigError"]

COMMANDS = ("converge", "voronovskaya", "frac", "kernel-dump", "manifold")


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration (exit status 2)."""


@dataclass
class ExperimentConfig:
    """Fully resolved parameters of one run; serializes to/from JSON."""

    command: str
    q: float = 0.5
    alpha: float = 1.0
    trunc_eps: float = 1e-12
    operator: str = "basic"
    preset: str | None = None
    chart: str = "poincare-half-plane"
    beta: float = 0.5
    quad_nodes: int = 5
    frac_step: float = 1e-3
    m_max: int = 2
    n_sweep: list[int] | None = None
    grid_lo: list[float] | None = None
    grid_hi: list[float] | None = None
    grid_points: int | None = None
    out: str | None = None
    fmt: str = "csv"

    def to_dict(self) -> dict:
        return asdict(self)

    def box(self):
        return list(zip(self.grid_lo, self.grid_hi))


_DEFAULTS = {
    "converge": dict(n_sweep=[16, 32, 64, 128, 256, 512], grid_lo=[0.0], grid_hi=[1.0],
                     grid_points=101, preset=None),
    "voronovskaya": dict(n_sweep=[16, 32, 64, 128, 256, 512], grid_lo=[0.0], grid_hi=[1.0],
                         grid_points=101, preset="sin"),
    "frac": dict(n_sweep=[64, 128, 256, 512], grid_lo=[0.2], grid_hi=[1.0],
                 grid_points=9, preset=None),
    "kernel-dump": dict(n_sweep=[8], grid_lo=[0.0], grid_hi=[1.0], grid_points=11,
                        preset=None),
    "manifold": dict(n_sweep=[32, 64, 128, 256], grid_lo=[-1.0, 1.0], grid_hi=[1.0, 2.0],
                     grid_points=9, preset="sin-exp"),
}

_REQUIRED_PRESET = ("converge", "frac")


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ConfigError(f"expected a comma-separated integer list, got {text!r}") from None


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ConfigError(f"expected a comma-separated float list, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    # one machine-readable line on stderr instead of usage + prose
    def error(self, message):
        print(json.dumps({"status": 2, "error": message}), file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="tanhqi",
        description="Deterministic convergence experiments for tanh-kernel quasi-interpolation operators.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add_common(p, grid_help):
        p.add_argument("--config", metavar="FILE",
                       help="JSON file with the same keys as the flags; flags override it")
        p.add_argument("--print-config", action="store_true",
                       help="echo the merged effective config as JSON and exit without running")
        p.add_argument("--q", type=float, help="kernel shape parameter, open interval (0, 1)")
        p.add_argument("--alpha", type=float, help="kernel slope parameter, > 0")
        p.add_argument("--trunc-eps", type=float, dest="trunc_eps",
                       help="lattice truncation tolerance, open interval (0, 1); default 1e-12")
        p.add_argument("--n", dest="n_sweep", type=_parse_int_list, metavar="N1,N2,...",
                       help="comma-separated lattice densities, each >= 1")
        p.add_argument("--grid-lo", dest="grid_lo", type=_parse_float_list, metavar="LO[,LO2]",
                       help=f"lower evaluation-grid corner{grid_help}")
        p.add_argument("--grid-hi", dest="grid_hi", type=_parse_float_list, metavar="HI[,HI2]",
                       help=f"upper evaluation-grid corner{grid_help}")
        p.add_argument("--grid-points", dest="grid_points", type=int,
                       help="evaluation points per axis, >= 1")
        p.add_argument("--out", help="output base name; writes <out>.csv and <out>.json")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"),
                       help="csv writes the table plus the JSON report; json skips the table")

    p = sub.add_parser("converge", help="operator error sweep over n",
                       description="Sweep |operator(f) - f| over n and fit the log-log rate. "
                                   "CSV columns: n,sup_error,mean_error.")
    add_common(p, " (one axis)")
    p.add_argument("--operator", choices=("basic", "kantorovich"),
                   help="operator variant; default basic")
    p.add_argument("--preset", help=f"sampled function, one of: {', '.join(preset_names())}")
    p.add_argument("--quad-nodes", dest="quad_nodes", type=int,
                   help="Gauss-Legendre nodes per axis for Kantorovich cells, >= 2; default 5")

    p = sub.add_parser("voronovskaya", help="moment-correction residual sweeps",
                       description="Residuals after moment corrections of orders 0..m_max. "
                                   "CSV columns: m,n,sup_error,mean_error.")
    add_common(p, " (one axis)")
    p.add_argument("--preset", help="sampled function; default sin")
    p.add_argument("--m-max", dest="m_max", type=int,
                   help="highest correction order, 0..4 and at most the preset smoothness; default 2")

    p = sub.add_parser("frac", help="fractional operator vs the power-rule oracle",
                       description="Sweep |Q_n(f) - D^beta f| over n on a positive box; f must be "
                                   "a monomial preset. CSV columns: n,sup_error,mean_error.")
    add_common(p, " (one axis, strictly positive)")
    p.add_argument("--preset", help="monomial preset (pow0..pow3, constant, linear, quadratic, cubic)")
    p.add_argument("--beta", type=float, help="fractional order, open interval (0, 1); default 0.5")
    p.add_argument("--frac-step", dest="frac_step", type=float,
                   help="L1 scheme step bound, (0, 0.1]; default 1e-3")

    p = sub.add_parser("kernel-dump", help="psi samples and discrete moments",
                       description="Tabulate the kernel on the grid. CSV columns: x, psi (kernel value "
                                   "at x), moment0..moment3 (M_p(x, n) for p = 0..3), and "
                                   "n_times_moment1 (= n * M_1, constant across rows sharing frac(n x)). "
                                   "--n must hold exactly one value.")
    add_common(p, " (one axis)")

    p = sub.add_parser("manifold", help="metric-weighted operator on a chart",
                       description="Sweep |operator(f) - f| on a chart box. CSV columns: "
                                   "n,sup_error,mean_error.")
    add_common(p, " (one entry per chart axis)")
    p.add_argument("--chart", choices=("euclidean", "torus", "poincare-half-plane"),
                   help="chart preset; default poincare-half-plane")
    p.add_argument("--preset", help="sampled function matching the chart dimension; default sin-exp")

    return parser


def _load_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path!r} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path!r} must hold a JSON object")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"config file {path!r} has unknown keys: {', '.join(unknown)}")
    return data


def merge_config(args: argparse.Namespace) -> ExperimentConfig:
    """Resolve one run's config: flags override the file, file overrides defaults."""
    command = args.command
    file_values = _load_config_file(args.config) if getattr(args, "config", None) else {}
    if file_values.get("command", command) != command:
        raise ConfigError(
            f"config file is for command {file_values['command']!r}, invoked {command!r}"
        )
    cfg = ExperimentConfig(command=command)
    for key, value in _DEFAULTS[command].items():
        setattr(cfg, key, value)
    cfg.out = command
    for f in fields(ExperimentConfig):
        if f.name == "command":
            continue
        if f.name in file_values and file_values[f.name] is not None:
            setattr(cfg, f.name, file_values[f.name])
        flag_value = getattr(args, f.name, None)
        if flag_value is not None:
            setattr(cfg, f.name, flag_value)
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig):
    if cfg.command not in COMMANDS:
        raise ConfigError(f"unknown command {cfg.command!r}")
    try:
        ActivationParams(cfg.q, cfg.alpha)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if not (0.0 < cfg.trunc_eps < 1.0):
        raise ConfigError(f"--trunc-eps must lie in (0, 1), got {cfg.trunc_eps!r}")
    if cfg.operator not in ("basic", "kantorovich"):
        raise ConfigError(f"--operator must be basic or kantorovich, got {cfg.operator!r}")
    if cfg.fmt not in ("csv", "json"):
        raise ConfigError(f"--format must be csv or json, got {cfg.fmt!r}")
    if cfg.preset is None and cfg.command in _REQUIRED_PRESET:
        raise ConfigError(f"missing required flag --preset for command {cfg.command!r}")
    if cfg.preset is not None:
        try:
            function_preset(cfg.preset)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    try:
        FracConfig(cfg.beta, cfg.frac_step)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if not (isinstance(cfg.quad_nodes, int) and cfg.quad_nodes >= 2):
        raise ConfigError(f"--quad-nodes must be an integer >= 2, got {cfg.quad_nodes!r}")
    if not (isinstance(cfg.m_max, int) and 0 <= cfg.m_max <= 4):
        raise ConfigError(f"--m-max must lie in 0..4, got {cfg.m_max!r}")
    if not cfg.n_sweep or any((not isinstance(n, int)) or n < 1 for n in cfg.n_sweep):
        raise ConfigError(f"--n needs positive integers, got {cfg.n_sweep!r}")
    if cfg.command == "kernel-dump" and len(cfg.n_sweep) != 1:
        raise ConfigError("--n must hold exactly one value for kernel-dump")
    if not isinstance(cfg.grid_lo, list) or not isinstance(cfg.grid_hi, list):
        raise ConfigError("--grid-lo and --grid-hi must be float lists")
    if len(cfg.grid_lo) != len(cfg.grid_hi):
        raise ConfigError(
            f"--grid-lo has {len(cfg.grid_lo)} entries, --grid-hi has {len(cfg.grid_hi)}"
        )
    expected_axes = 2 if cfg.command == "manifold" else 1
    if cfg.command == "manifold":
        dim = function_preset(cfg.preset).dim if cfg.preset else 2
        expected_axes = dim
    if len(cfg.grid_lo) != expected_axes:
        raise ConfigError(
            f"{cfg.command} needs {expected_axes} grid axis/axes, got {len(cfg.grid_lo)}"
        )
    for lo, hi in zip(cfg.grid_lo, cfg.grid_hi):
        if not hi > lo:
            raise ConfigError(f"grid axis ({lo}, {hi}) is empty")
    if not (isinstance(cfg.grid_points, int) and cfg.grid_points >= 1):
        raise ConfigError(f"--grid-points must be an integer >= 1, got {cfg.grid_points!r}")
    if cfg.command == "frac":
        if any(lo <= 0.0 for lo in cfg.grid_lo):
            raise ConfigError("frac needs a strictly positive evaluation box")
        if function_preset(cfg.preset).power is None:
            raise ConfigError(
                f"preset {cfg.preset!r} is not a monomial; the oracle needs t^p presets"
            )
    if not cfg.out:
        raise ConfigError("--out must not be empty")


def _format_value(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_format_value(v) for v in row) + "\n")


def _write_json(path: str, payload: dict | list) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _kernel_for(cfg: ExperimentConfig) -> DensityKernel:
    return DensityKernel(ActivationParams(cfg.q, cfg.alpha), eps_trunc=cfg.trunc_eps)


def _emit(cfg: ExperimentConfig, header, rows, payload) -> None:
    if cfg.fmt == "csv":
        _write_csv(cfg.out + ".csv", header, rows)
    _write_json(cfg.out + ".json", payload)


def run_converge(cfg: ExperimentConfig) -> None:
    report = operator_convergence(
        cfg.operator, _kernel_for(cfg), function_preset(cfg.preset),
        cfg.n_sweep, cfg.box(), cfg.grid_points, quad_nodes=cfg.quad_nodes,
    )
    report.config["cli"] = cfg.to_dict()
    _emit(cfg, ["n", "sup_error", "mean_error"], list(report.rows), report.to_dict())


def run_voronovskaya(cfg: ExperimentConfig) -> None:
    preset = function_preset(cfg.preset)
    try:
        reports = residual_orders(
            _kernel_for(cfg), preset, cfg.box(), cfg.grid_points, cfg.n_sweep, cfg.m_max
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rows = []
    for m, report in enumerate(reports):
        report.config["cli"] = cfg.to_dict()
        rows.extend((m, r.n, r.sup_error, r.mean_error) for r in report.rows)
    _emit(cfg, ["m", "n", "sup_error", "mean_error"], rows, [r.to_dict() for r in reports])


def run_frac(cfg: ExperimentConfig) -> None:
    report = fractional_rate(
        _kernel_for(cfg), function_preset(cfg.preset), cfg.beta,
        cfg.box(), cfg.grid_points, cfg.n_sweep, frac_step=cfg.frac_step,
    )
    report.config["cli"] = cfg.to_dict()
    _emit(cfg, ["n", "sup_error", "mean_error"], list(report.rows), report.to_dict())


def run_kernel_dump(cfg: ExperimentConfig) -> None:
    kernel = _kernel_for(cfg)
    n = cfg.n_sweep[0]
    pts = grid_points(cfg.box(), cfg.grid_points)[:, 0]
    rows = []
    for x in pts:
        moments = [moment(kernel, MultiIndex((p,)), [x], n) for p in range(4)]
        rows.append((x, float(psi_eval(kernel, x)), *moments, n * moments[1]))
    payload = {
        "cli": cfg.to_dict(),
        "columns": ["x", "psi", "moment0", "moment1", "moment2", "moment3", "n_times_moment1"],
        "rows": [[float(v) for v in row] for row in rows],
        "kernel": {
            "q": cfg.q, "alpha": cfg.alpha, "eps_trunc": cfg.trunc_eps,
            "normalization": kernel.normalization, "radius": kernel.radius,
        },
    }
    _emit(cfg, payload["columns"], rows, payload)


def run_manifold(cfg: ExperimentConfig) -> None:
    preset = function_preset(cfg.preset)
    try:
        chart = chart_preset(cfg.chart, dim=preset.dim)
        mk = MetricKernel(_kernel_for(cfg), chart)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    pts = grid_points(cfg.box(), cfg.grid_points)
    rows = []
    for n in sorted(set(cfg.n_sweep)):
        sup, mean = sup_error(
            lambda p, n=n: operator_on_chart(mk, preset, n, p),
            lambda p: preset.value(*p),
            pts,
        )
        rows.append(Row(n, sup, mean))
    try:
        slope, intercept, r2 = rate_fit([(r.n, r.sup_error) for r in rows], floor=ERROR_FLOOR)
        note = NORM_NOTE
    except ValueError:
        slope = intercept = r2 = None
        note = NORM_NOTE + "; fit skipped: not enough rows above the rounding floor"
    report = ConvergenceReport(
        config={"cli": cfg.to_dict(), "chart": cfg.chart, "mode": mk.mode},
        rows=tuple(rows),
        fitted_slope=slope,
        intercept=intercept,
        r_squared=r2,
        target_description=f"{preset.name} on the {cfg.chart} chart (the sampled function itself)",
        excluded_rows=sum(1 for r in rows if r.sup_error <= ERROR_FLOOR),
        note=note,
    )
    _emit(cfg, ["n", "sup_error", "mean_error"], list(report.rows), report.to_dict())


_RUNNERS = {
    "converge": run_converge,
    "voronovskaya": run_voronovskaya,
    "frac": run_frac,
    "kernel-dump": run_kernel_dump,
    "manifold": run_manifold,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = merge_config(args)
        if args.print_config:
            print(json.dumps(cfg.to_dict(), sort_keys=True))
            return 0
        _RUNNERS[cfg.command](cfg)
        return 0
    except ConfigError as exc:
        print(json.dumps({"status": 2, "error": str(exc)}), file=sys.stderr)
        return 2
    except DiagnosticError as exc:
        print(json.dumps({"status": 3, "error": str(exc)}), file=sys.stderr)
        return 3
    except OSError as exc:
        print(json.dumps({"status": 4, "error": str(exc)}), file=sys.stderr)
        return 4
    except ValueError as exc:
        # domain violations surfacing from the numeric layers are config errors
        print(json.dumps({"status": 2, "error": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
