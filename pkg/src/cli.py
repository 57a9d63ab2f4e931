"""
Module: cli
Command-line front end: parses a RunSpec, dispatches to the numerical
modules and writes deterministic tables through the output backends.
"""

import argparse
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import AIRY_SERIES_RADIUS, DEFAULT_N_MAX, DEFAULT_N_MIN, NEWTON_TOL, OUTPUT_DIR, str_to_bool
import logger
from core.airy_kernel import airy_eval, airy_maclaurin
from core.errors import ConfigError, NoBoundStateError, NumericalError, ResonanceLabError
from core.field_model import (
    ModelConfig,
    RunningCoupling,
    flow_coupling,
    g3_quadrature,
    g_denominator,
)
from core.pole_finder import PoleSet, asymptotic_pole, enumerate_poles, solve_index
from core.survival_dynamics import (
    SurvivalRecord,
    propagate_oracle,
    stationary_amplitude,
    survival_series,
)
from output import get_writer
from output.svg_writer import SvgWriter

COMMANDS = ("poles", "bound-state", "flow", "survival", "gdenom", "fig1", "fig2", "selftest")
FORMATS = ("csv", "json", "svg")

# config-file keys that differ from the argparse dest
CONFIG_KEY_ALIASES = {"lambda": "lam", "format": "output_format"}

FIG1_EPS_B = (-10.0, -1.0, -0.1, -0.01)
FIG2_EPS_B = (-10.0, -1.0, -0.1)

POLE_COLUMNS = [
    "n",
    "eps_re[dimensionless]",
    "eps_im[dimensionless]",
    "gamma[dimensionless]",
    "Gamma[a.u.]",
    "residual",
    "seed_source",
]
SURVIVAL_COLUMNS = ["t[a.u.]", "A_re", "A_im", "A_abs2", "nonescape", "source"]


@dataclass(frozen=True)
class RunSpec:
    command: str
    cfg: Optional[ModelConfig]
    index_range: Tuple[int, int] = (DEFAULT_N_MIN, DEFAULT_N_MAX)
    time_grid: Tuple[float, ...] = ()
    output_format: str = "csv"
    output_path: Optional[str] = None
    oracle: bool = False
    tol: float = NEWTON_TOL
    mu_new: Optional[float] = None
    rectangle: Tuple[float, float, float, float] = (-12.0, 12.0, -2.0, 0.5)
    points: int = 41
    extra: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"unknown format {self.output_format!r}")
        n_min, n_max = self.index_range
        if not n_min <= 0 <= n_max:
            raise ConfigError(f"index range must contain 0, got [{n_min}, {n_max}]")
        if self.tol <= 0:
            raise ConfigError("--tol must be positive")
        if self.command in ("poles", "bound-state", "flow", "survival", "gdenom") and self.cfg is None:
            raise ConfigError(f"{self.command} needs a model: --dim, --F and one binding description")


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def read_config_file(path: str) -> Dict[str, str]:
    """Flat `key = value` file; '#' starts a comment. Keys are flag names without dashes."""
    values: Dict[str, str] = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{number}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description="Resonances and decay of a point-like well in a uniform field.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=str, default=None, help="Flat key = value file with flag defaults.")
    p.add_argument("--dim", type=int, choices=(1, 2, 3), default=None, help="Dimension D.")
    p.add_argument("--F", type=float, default=None, dest="F", help="Field strength (a.u.).")
    p.add_argument("--lambda", type=float, default=None, dest="lam", help="D = 1 coupling.")
    p.add_argument("--eb", type=float, default=None, help="Zero-field bound-state energy E_B < 0.")
    p.add_argument("--lambda-r", type=float, default=None, dest="lambda_r", help="Renormalized coupling.")
    p.add_argument("--mu", type=float, default=None, help="Renormalization scale.")
    p.add_argument("--mu-new", type=float, default=None, dest="mu_new", help="Target scale for `flow`.")
    p.add_argument("--n-min", type=int, default=DEFAULT_N_MIN, dest="n_min")
    p.add_argument("--n-max", type=int, default=DEFAULT_N_MAX, dest="n_max")
    p.add_argument("--t-max", type=float, default=5.0, dest="t_max")
    p.add_argument("--t-steps", type=int, default=101, dest="t_steps")
    p.add_argument("--format", choices=FORMATS, default="csv", dest="output_format")
    p.add_argument("--out", type=str, default=None, help="Output file (directory for fig1/fig2).")
    p.add_argument("--oracle", action="store_true", help="survival: add the Crank-Nicolson amplitude.")
    p.add_argument("--tol", type=float, default=NEWTON_TOL, help="Newton step tolerance.")
    p.add_argument("--re-min", type=float, default=-12.0, dest="re_min")
    p.add_argument("--re-max", type=float, default=12.0, dest="re_max")
    p.add_argument("--im-min", type=float, default=-2.0, dest="im_min")
    p.add_argument("--im-max", type=float, default=0.5, dest="im_max")
    p.add_argument("--points", type=int, default=41, help="gdenom grid points per axis.")
    return p


def build_model(dim: Optional[int], F: Optional[float], lam: Optional[float], eb: Optional[float],
                lambda_r: Optional[float], mu: Optional[float]) -> Optional[ModelConfig]:
    if dim is None and F is None and lam is None and eb is None and lambda_r is None and mu is None:
        return None
    if dim is None or F is None:
        raise ConfigError("--dim and --F are both required")
    given = sum([lam is not None, eb is not None, lambda_r is not None or mu is not None])
    if given != 1:
        raise ConfigError("give exactly one of --lambda, --eb or --lambda-r/--mu")
    if lam is not None:
        if dim != 1:
            raise ConfigError("--lambda is for --dim 1")
        return ModelConfig.from_coupling(F, lam)
    if eb is not None:
        return ModelConfig.from_bound_energy(dim, F, eb)
    if lambda_r is None or mu is None:
        raise ConfigError("--lambda-r and --mu must be given together")
    return ModelConfig.from_running(dim, F, lambda_r, mu)


def parse_args(argv: Optional[Sequence[str]] = None) -> RunSpec:
    parser = build_parser()
    pre, _ = parser.parse_known_args(argv)
    if pre.config:
        file_values = read_config_file(pre.config)
        known = {a.dest for a in parser._actions}
        unknown = sorted(set(file_values) - known - set(CONFIG_KEY_ALIASES))
        if unknown:
            raise ConfigError(f"unknown keys in {pre.config}: {unknown}")
        for key, dest in CONFIG_KEY_ALIASES.items():
            if key in file_values:
                file_values[dest] = file_values.pop(key)
        if "oracle" in file_values:
            file_values["oracle"] = str_to_bool(file_values["oracle"])
        parser.set_defaults(**file_values)
    args = parser.parse_args(argv)

    cfg = build_model(args.dim, args.F, args.lam, args.eb, args.lambda_r, args.mu)
    if args.t_steps < 2 or args.t_max <= 0:
        raise ConfigError("--t-max must be positive and --t-steps at least 2")
    times = tuple(float(t) for t in np.linspace(0.0, args.t_max, args.t_steps))
    return RunSpec(
        command=args.command,
        cfg=cfg,
        index_range=(args.n_min, args.n_max),
        time_grid=times,
        output_format=args.output_format,
        output_path=args.out,
        oracle=bool(args.oracle),
        tol=args.tol,
        mu_new=args.mu_new,
        rectangle=(args.re_min, args.re_max, args.im_min, args.im_max),
        points=args.points,
    )


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

def model_meta(cfg: ModelConfig) -> Dict[str, Any]:
    meta = {"dimension": cfg.dimension, "F": cfg.field_strength, "binding": cfg.binding_kind}
    for key in ("coupling", "bound_energy", "lambda_r", "mu"):
        value = getattr(cfg, key)
        if value is not None:
            meta[key] = value
    return meta


def pole_rows(poles: PoleSet) -> List[List[Any]]:
    return [
        [r.index, float(r.eps.real), float(r.eps.imag), float(r.gamma_dimless), float(r.width_gamma),
         float(r.residual), r.seed_source]
        for r in poles
    ]


def survival_rows(record: SurvivalRecord) -> List[List[Any]]:
    rows = []
    for k, t in enumerate(record.times):
        a = complex(record.amplitude[k])
        nonescape = float(record.nonescape[k]) if record.nonescape is not None else None
        rows.append([float(t), a.real, a.imag, abs(a) ** 2, nonescape, record.source])
    return rows


def _output_path(spec: RunSpec, stem: str) -> Path:
    if spec.output_path:
        return Path(spec.output_path)
    return Path(OUTPUT_DIR) / stem


def _write(spec: RunSpec, stem: str, columns: List[str], rows: List[List[Any]], meta: Dict[str, Any]) -> Path:
    writer = get_writer(spec.output_format)
    path = writer.write_table(_output_path(spec, stem), columns, rows, meta)
    logger.info(f"Wrote {path}")
    return path


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_poles(spec: RunSpec) -> List[Path]:
    n_min, n_max = spec.index_range
    poles = enumerate_poles(spec.cfg, n_min, n_max, tol=spec.tol)
    meta = dict(model_meta(spec.cfg), index_range=[n_min, n_max], contour_count=poles.contour_count,
                plot={"x": POLE_COLUMNS[1], "y": POLE_COLUMNS[2], "kind": "scatter", "guide": True})
    return [_write(spec, "poles", POLE_COLUMNS, pole_rows(poles), meta)]


def cmd_bound_state(spec: RunSpec) -> List[Path]:
    cfg = spec.cfg
    e_b = cfg.energy_b
    eps_b = e_b * cfg.field_strength ** (-2.0 / 3.0) if cfg.field_strength > 0 else None
    columns = ["dimension", "F[a.u.]", "E_B[a.u.]", "eps_B[dimensionless]", "lambda"]
    lam = cfg.lam if cfg.dimension == 1 else None
    rows = [[cfg.dimension, float(cfg.field_strength), float(e_b), eps_b, lam]]
    return [_write(spec, "bound_state", columns, rows, model_meta(cfg))]


def cmd_flow(spec: RunSpec) -> List[Path]:
    cfg = spec.cfg
    if cfg.binding_kind != "running":
        raise ConfigError("flow needs --lambda-r and --mu")
    if spec.mu_new is None:
        raise ConfigError("flow needs --mu-new")
    rc = RunningCoupling(lambda_r=cfg.lambda_r, mu=cfg.mu, dimension=cfg.dimension)
    flowed = flow_coupling(rc, spec.mu_new)
    columns = ["dimension", "mu0", "lambda_r0", "mu", "lambda_r", "E_B[a.u.]"]
    try:
        e_b = float(flowed.bound_state_energy())
    except NoBoundStateError:
        e_b = None
    rows = [[cfg.dimension, float(rc.mu), float(rc.lambda_r), float(flowed.mu), float(flowed.lambda_r), e_b]]
    return [_write(spec, "flow", columns, rows, model_meta(cfg))]


def cmd_survival(spec: RunSpec) -> List[Path]:
    cfg = spec.cfg
    if cfg.dimension != 1:
        raise ConfigError("survival is implemented for --dim 1")
    times = spec.time_grid
    if cfg.field_strength == 0:
        records = [stationary_amplitude(cfg, times)]
    else:
        n_min, n_max = spec.index_range
        poles = enumerate_poles(cfg, n_min, n_max, tol=spec.tol)
        records = [survival_series(cfg, poles, times)]
    if spec.oracle:
        records.append(propagate_oracle(cfg, times))

    rows = [row for record in records for row in survival_rows(record)]
    meta = dict(model_meta(cfg), truncation_warning=any(r.truncation_warning for r in records),
                plot={"x": SURVIVAL_COLUMNS[0], "y": "A_abs2", "kind": "line", "group": "source"})
    return [_write(spec, "survival", SURVIVAL_COLUMNS, rows, meta)]


def cmd_gdenom(spec: RunSpec) -> List[Path]:
    re_min, re_max, im_min, im_max = spec.rectangle
    if not (re_min < re_max and im_min < im_max) or spec.points < 2:
        raise ConfigError("gdenom needs re-min < re-max, im-min < im-max and at least 2 points")
    columns = ["eps_re[dimensionless]", "eps_im[dimensionless]", "g_re", "g_im"]
    rows = []
    for im in np.linspace(im_min, im_max, spec.points):
        for re in np.linspace(re_min, re_max, spec.points):
            g = g_denominator(complex(re, im), spec.cfg)
            rows.append([float(re), float(im), float(g.real), float(g.imag)])
    meta = dict(model_meta(spec.cfg), rectangle=list(spec.rectangle), points=spec.points)
    return [_write(spec, "gdenom", columns, rows, meta)]


def eps_b_label(eps_b: float) -> str:
    """File-name form of eps_B without dots, e.g. -0.1 -> -0p1."""
    return f"{eps_b:g}".replace(".", "p")


def _figure(spec: RunSpec, name: str, dimension: int, eps_values: Sequence[float],
            index_range: Tuple[int, int]) -> List[Path]:
    directory = Path(spec.output_path) if spec.output_path else Path(OUTPUT_DIR)
    table_format = "csv" if spec.output_format == "svg" else spec.output_format
    writer = get_writer(table_format)
    paths = []
    series: Dict[str, List[Tuple[float, float]]] = {}
    for eps_b in eps_values:
        cfg = ModelConfig.from_eps_b(dimension, 1.0, eps_b)
        poles = enumerate_poles(cfg, *index_range, tol=spec.tol)
        meta = dict(model_meta(cfg), eps_b=eps_b, index_range=list(index_range))
        path = writer.write_table(directory / f"{name}_eb{eps_b_label(eps_b)}", POLE_COLUMNS, pole_rows(poles), meta)
        paths.append(path)
        series[f"eps_B={eps_b:g}"] = [(r.eps.real, r.eps.imag) for r in poles]
        logger.info(f"Wrote {path}")

    if spec.output_format == "svg":
        plotter = SvgWriter()
        svg = plotter.render_series(series, "Re eps", "Im eps", "scatter", guide=dimension == 1,
                                    title=f"{name}: D = {dimension} poles")
        paths.append(plotter.write_text(directory / f"{name}.svg", svg))
        logger.info(f"Wrote {paths[-1]}")
    return paths


def cmd_fig1(spec: RunSpec) -> List[Path]:
    return _figure(spec, "fig1", 1, FIG1_EPS_B, (-3, 9))


def cmd_fig2(spec: RunSpec) -> List[Path]:
    return _figure(spec, "fig2", 3, FIG2_EPS_B, (0, 10))


def selftest_checks() -> List[Tuple[str, Callable[[], Tuple[bool, str]]]]:
    def wronskian() -> Tuple[bool, str]:
        worst = 0.0
        for z in (0.0, 1.5 + 0.5j, -4.0 + 1.0j, 3.0 - 2.0j, -8.0):
            vals = airy_eval(z)
            worst = max(worst, abs(vals.wronskian - 1.0 / math.pi) / max(1.0, abs(vals.ai * vals.bip)))
        return worst < 1e-12, f"max relative deviation {worst:.2e}"

    def series_agreement() -> Tuple[bool, str]:
        z = 0.5 * AIRY_SERIES_RADIUS * (0.6 + 0.8j)
        vals = airy_eval(z)
        ref = airy_maclaurin(z)
        worst = max(abs(a - b) / max(1.0, abs(b)) for a, b in zip((vals.ai, vals.aip, vals.bi, vals.bip), ref))
        return worst < 1e-10, f"max relative deviation {worst:.2e} at z={z}"

    def flow() -> Tuple[bool, str]:
        flowed = flow_coupling(RunningCoupling(4.0 * math.pi, 1.0, 3), 2.0)
        return abs(flowed.lambda_r - 2.0 * math.pi) < 1e-12, f"lambda_R = {flowed.lambda_r!r}"

    def seed() -> Tuple[bool, str]:
        value = asymptotic_pole("tunnel-1d", eps_b=-3.0)
        expected = complex(-3.0, -3.0 * math.exp(-4.0 * math.sqrt(27.0) / 3.0))
        return abs(value - expected) < 1e-15, f"tunnel-1d(-3) = {value!r}"

    def weak_pole() -> Tuple[bool, str]:
        res = solve_index(ModelConfig.from_eps_b(1, 1.0, -10.0), 0)
        ok = abs(res.eps.real + 10.0) < 0.3 and res.eps.imag < 0 and res.residual <= 1e-10 * res.scale
        return ok, f"eps_0 = {res.eps!r}, residual {res.residual:.2e}"

    def g3_identity() -> Tuple[bool, str]:
        cfg = ModelConfig.from_eps_b(3, 1.0, -1.0)
        eps = complex(1.0, 0.5)
        closed, quad = g_denominator(eps, cfg), g3_quadrature(eps, cfg)
        deviation = abs(closed - quad) / abs(closed)
        return deviation < 1e-8, f"relative deviation {deviation:.2e}"

    return [
        ("airy_wronskian", wronskian),
        ("airy_series", series_agreement),
        ("flow_3d", flow),
        ("seed_b2", seed),
        ("pole_weak_field", weak_pole),
        ("g3_quadrature", g3_identity),
    ]


def cmd_selftest(spec: RunSpec) -> List[Path]:
    rows = []
    failed = []
    for name, check in selftest_checks():
        try:
            passed, detail = check()
        except ResonanceLabError as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        logger.info(f"selftest {name}: {'ok' if passed else 'FAILED'} ({detail})")
        rows.append([name, passed, detail])
        if not passed:
            failed.append(name)
    path = _write(spec, "selftest", ["check", "passed", "detail"], rows, {"failed": failed})
    if failed:
        raise NumericalError(f"selftest failed: {', '.join(failed)}")
    return [path]


HANDLERS: Dict[str, Callable[[RunSpec], List[Path]]] = {
    "poles": cmd_poles,
    "bound-state": cmd_bound_state,
    "flow": cmd_flow,
    "survival": cmd_survival,
    "gdenom": cmd_gdenom,
    "fig1": cmd_fig1,
    "fig2": cmd_fig2,
    "selftest": cmd_selftest,
}


def run(spec: RunSpec) -> int:
    """Dispatch one command; returns the process exit code."""
    logger.info(f"Running {spec.command}")
    try:
        paths = HANDLERS[spec.command](spec)
    except ResonanceLabError as e:
        logger.error(f"{spec.command} failed: {e}")
        return e.exit_code
    logger.info(f"{spec.command} finished, {len(paths)} file(s) written")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        spec = parse_args(argv)
    except ResonanceLabError as e:
        logger.error(str(e))
        return e.exit_code
    return run(spec)
