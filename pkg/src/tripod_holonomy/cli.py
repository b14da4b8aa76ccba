"""Command-line front end: sweeps, optimal-point tables, fits, robustness,
and holonomy output, all driven by a single JSON config that CLI flags
override. Every run echoes its resolved config for provenance, so outputs
can be reproduced from themselves.

Exit codes: 0 success, 2 configuration error, 3 numerical-validation
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    calibrate_gamma0,
    f_of_tau_relation,
    fit_noise_response,
    optimal_point_table,
    robustness,
    sweep,
    sweep_curve_to_csv,
)
from .errors import (
    ConfigError,
    ModelMismatch,
    NoPeakInWindow,
    StepCountTooSmall,
    TripodError,
    UnderdeterminedFit,
)
from .lindblad import DEFAULT_GAMMA0, NoiseModel, high_temperature_noise, noise_from_json
from .loops import LoopSpec, loop_from_json, optimal_time, wedge_loop, wedge_order
from .propagators import adiabatic_holonomy

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

DEFAULT_LAMBDA_LIST = (0.0, 0.005, 0.01, 0.02, 0.03, 0.04, 0.05)

_CONFIG_KEYS = {
    "loop",
    "loop_file",
    "omega",
    "grid",
    "omega_tau",
    "lambda_sq",
    "gamma0",
    "noise_file",
    "states",
    "steps",
    "out",
    "calibrate_f2",
    "free_intercept",
    "table",
}


@dataclass(frozen=True)
class RunConfig:
    """Resolved run configuration (file keys overridden by CLI flags)."""

    loop: str = "standard"
    loop_file: str | None = None
    omega: float = 1.0
    grid: tuple[float, float, int] | None = None
    omega_tau: float | None = None
    lambda_sq: tuple[float, ...] | None = None
    gamma0: float = DEFAULT_GAMMA0
    noise_file: str | None = None
    states: int = 100
    steps: int | None = None
    out: str = "out"
    calibrate_f2: float | None = None
    free_intercept: bool = False
    table: str | None = None

    def validate(self) -> None:
        if not self.omega > 0:
            raise ConfigError(f"omega must be positive, got {self.omega}")
        if self.states < 6:
            raise ConfigError(f"states must be >= 6, got {self.states}")
        if self.steps is not None and self.steps < 3:
            raise ConfigError(f"steps must be >= 3, got {self.steps}")
        if self.grid is not None:
            start, stop, points = self.grid
            if points < 1 or start <= 0 or stop < start:
                raise ConfigError(f"invalid grid {self.grid}")
        if self.lambda_sq is not None:
            if any(lam < 0 for lam in self.lambda_sq):
                raise ConfigError("lambda_sq entries must be >= 0")
        if self.loop_file is None:
            parse_loop_kind(self.loop)

    def grid_values(self) -> np.ndarray:
        if self.omega_tau is not None:
            return np.array([self.omega_tau], dtype=float)
        if self.grid is None:
            raise ConfigError("no Omega*tau grid configured (use --grid or omega_tau)")
        start, stop, points = self.grid
        return np.linspace(start, stop, points)


def parse_loop_kind(text: str) -> int:
    """'standard' or 'wedge:N' -> wedge order N."""
    if text == "standard":
        return 1
    if text.startswith("wedge:"):
        try:
            n = int(text.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad wedge order in loop spec {text!r}") from None
        if n < 1:
            raise ConfigError(f"wedge order must be >= 1, got {n}")
        return n
    raise ConfigError(f"unknown loop kind {text!r} (expected standard or wedge:N)")


def parse_grid_flag(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--grid expects START:STOP:POINTS, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"unparsable --grid value {text!r}") from None


def parse_lambda_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError:
        raise ConfigError(f"unparsable --lambda-sq list {text!r}") from None


def load_config_file(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {p} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {p} must hold a JSON object")
    doc.pop("provenance", None)  # echoed configs carry a provenance block
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return doc


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        doc = load_config_file(args.config)
        if "grid" in doc and doc["grid"] is not None:
            doc["grid"] = tuple(doc["grid"])
        if "lambda_sq" in doc and doc["lambda_sq"] is not None:
            doc["lambda_sq"] = tuple(doc["lambda_sq"])
        cfg = replace(cfg, **doc)
    overrides = {}
    if args.loop is not None:
        overrides["loop"] = args.loop
    if getattr(args, "loop_file", None) is not None:
        overrides["loop_file"] = args.loop_file
    if args.omega is not None:
        overrides["omega"] = args.omega
    if args.grid is not None:
        overrides["grid"] = parse_grid_flag(args.grid)
    if getattr(args, "omega_tau", None) is not None:
        overrides["omega_tau"] = args.omega_tau
    if args.lambda_sq is not None:
        overrides["lambda_sq"] = parse_lambda_list(args.lambda_sq)
    if args.gamma0 is not None:
        overrides["gamma0"] = args.gamma0
    if args.noise_file is not None:
        overrides["noise_file"] = args.noise_file
    if args.states is not None:
        overrides["states"] = args.states
    if args.steps is not None:
        overrides["steps"] = args.steps
    if args.out is not None:
        overrides["out"] = args.out
    if getattr(args, "calibrate_f2", None) is not None:
        overrides["calibrate_f2"] = args.calibrate_f2
    if getattr(args, "free_intercept", False):
        overrides["free_intercept"] = True
    if getattr(args, "table", None) is not None:
        overrides["table"] = args.table
    cfg = replace(cfg, **overrides)
    cfg.validate()
    return cfg


def build_loop(cfg: RunConfig) -> LoopSpec:
    """Loop template with unit total time; commands rescale per tau."""
    if cfg.loop_file is not None:
        p = Path(cfg.loop_file)
        if not p.exists():
            raise ConfigError(f"loop file not found: {p}")
        return loop_from_json(p.read_text())
    n = parse_loop_kind(cfg.loop)
    return wedge_loop(n, cfg.omega, 1.0)


def build_noise(cfg: RunConfig, gamma0: float | None = None) -> NoiseModel:
    if cfg.noise_file is not None:
        p = Path(cfg.noise_file)
        if not p.exists():
            raise ConfigError(f"noise file not found: {p}")
        return noise_from_json(p.read_text())
    return high_temperature_noise(0.0, gamma0=cfg.gamma0 if gamma0 is None else gamma0)


def resolved_config_doc(cfg: RunConfig, extra: dict | None = None) -> dict:
    doc = asdict(cfg)
    doc["provenance"] = {"version": __version__, **(extra or {})}
    return doc


def _json_dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(f"wrote {path}")


def _write_run_config(out_dir: Path, cfg: RunConfig, extra: dict | None = None) -> dict:
    doc = resolved_config_doc(cfg, extra)
    _write(out_dir / "run_config.json", _json_dump(doc))
    return doc


def format_lambda(lam: float) -> str:
    return f"{lam:.12g}"


def matrix_entries(m: np.ndarray) -> list[float]:
    """Row-major, re/im interleaved flat list (2 * dim^2 reals)."""
    flat = np.asarray(m, dtype=complex).reshape(-1)
    out: list[float] = []
    for z in flat:
        out.extend((float(z.real), float(z.imag)))
    return out


def _maybe_calibrate(cfg: RunConfig, loop: LoopSpec) -> tuple[NoiseModel, dict]:
    """Apply calibration mode if requested; returns (noise, config extras)."""
    if cfg.calibrate_f2 is None:
        return build_noise(cfg), {}
    gamma0, fit = calibrate_gamma0(
        loop,
        target_f2=cfg.calibrate_f2,
        gamma0_init=cfg.gamma0,
        n_states=cfg.states,
        steps=cfg.steps,
    )
    extras = {
        "gamma0_calibrated": gamma0,
        "calibrated_f2": fit.coefficient("F2"),
    }
    return build_noise(cfg, gamma0=gamma0), extras


def cmd_ideal_sweep(cfg: RunConfig) -> int:
    lambdas = cfg.lambda_sq if cfg.lambda_sq is not None else (0.0,)
    if tuple(lambdas) != (0.0,):
        raise ConfigError("ideal-sweep runs at lambda_sq = 0 only")
    return _run_sweep(cfg, (0.0,))


def cmd_noisy_sweep(cfg: RunConfig) -> int:
    lambdas = cfg.lambda_sq if cfg.lambda_sq is not None else DEFAULT_LAMBDA_LIST
    return _run_sweep(cfg, tuple(lambdas))


def _run_sweep(cfg: RunConfig, lambdas: tuple[float, ...]) -> int:
    loop = build_loop(cfg)
    noise, extras = _maybe_calibrate(cfg, loop)
    grid = cfg.grid_values()
    out_dir = Path(cfg.out)
    curves = sweep(loop, grid, list(lambdas), cfg.states, cfg.steps, noise)
    _write_run_config(out_dir, cfg, extras)
    for curve in curves:
        name = f"sweep_lambda2_{format_lambda(curve.lambda_sq)}.csv"
        _write(out_dir / name, sweep_curve_to_csv(curve))
    return EXIT_OK


def cmd_optimal(cfg: RunConfig) -> int:
    loop = build_loop(cfg)
    noise, extras = _maybe_calibrate(cfg, loop)
    lambdas = cfg.lambda_sq if cfg.lambda_sq is not None else DEFAULT_LAMBDA_LIST
    points = optimal_point_table(loop, noise, list(lambdas), cfg.states, cfg.steps)
    out_dir = Path(cfg.out)
    doc = {
        "config": _write_run_config(out_dir, cfg, extras),
        "rows": [
            {**p.to_dict(), "omega_tau_star": cfg.omega * p.tau_star} for p in points
        ],
    }
    _write(out_dir / "optimal_points.json", _json_dump(doc))
    return EXIT_OK


def cmd_fit(cfg: RunConfig) -> int:
    if cfg.table is None:
        raise ConfigError("fit needs --table pointing at an optimal-points JSON file")
    p = Path(cfg.table)
    if not p.exists():
        raise ConfigError(f"table file not found: {p}")
    doc = json.loads(p.read_text())
    rows = doc.get("rows", doc if isinstance(doc, list) else None)
    if not rows:
        raise ConfigError(f"no rows found in table {p}")
    f_pts = [(float(r["lambda_sq"]), float(r["f_star"])) for r in rows]
    t_pts = [(float(r["lambda_sq"]), float(r["omega_tau_star"])) for r in rows]
    loop = build_loop(cfg)
    tau1 = cfg.omega * optimal_time(1, wedge_order(loop), cfg.omega)

    fits = {
        "f_linear": fit_noise_response(f_pts, "f_linear"),
        "tau_linear": fit_noise_response(t_pts, "tau_linear", intercept=tau1),
    }
    if len(f_pts) >= 4:
        fits["f_quartic"] = fit_noise_response(f_pts, "f_quartic")
    if len(t_pts) >= 5:
        fits["tau_cubic"] = fit_noise_response(t_pts, "tau_cubic", intercept=tau1)
    if cfg.free_intercept:
        fits["f_linear_free"] = fit_noise_response(f_pts, "f_linear", free_intercept=True)
        fits["tau_linear_free"] = fit_noise_response(
            t_pts, "tau_linear", intercept=tau1, free_intercept=True
        )
    slope = f_of_tau_relation(fits["f_linear"], fits["tau_linear"])
    out_dir = Path(cfg.out)
    out_doc = {
        "config": _write_run_config(out_dir, cfg),
        "fits": {name: fit.to_dict() for name, fit in fits.items()},
        "f_of_tau_slope": slope,
    }
    _write(out_dir / "fit_results.json", _json_dump(out_doc))
    return EXIT_OK


def cmd_robustness(cfg: RunConfig) -> int:
    loop = build_loop(cfg)
    noise, extras = _maybe_calibrate(cfg, loop)
    lambdas = cfg.lambda_sq if cfg.lambda_sq is not None else DEFAULT_LAMBDA_LIST
    rows = []
    for lam in lambdas:
        r = robustness(loop, noise.with_lambda_sq(lam), cfg.states, cfg.steps)
        rows.append({"lambda_sq": lam, "robustness": r})
    out_dir = Path(cfg.out)
    doc = {"config": _write_run_config(out_dir, cfg, extras), "rows": rows}
    _write(out_dir / "robustness.json", _json_dump(doc))
    return EXIT_OK


def cmd_holonomy(cfg: RunConfig) -> int:
    loop = build_loop(cfg)
    hol = adiabatic_holonomy(loop)
    doc = {
        "config": resolved_config_doc(cfg),
        "dim": 2,
        "entries": matrix_entries(hol),
    }
    print(_json_dump(doc), end="")
    if cfg.out != RunConfig.out:
        _write(Path(cfg.out) / "holonomy.json", _json_dump(doc))
    return EXIT_OK


_COMMANDS = {
    "ideal-sweep": cmd_ideal_sweep,
    "noisy-sweep": cmd_noisy_sweep,
    "optimal": cmd_optimal,
    "fit": cmd_fit,
    "robustness": cmd_robustness,
    "holonomy": cmd_holonomy,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tripod-holonomy",
        description="Holonomic tripod gate simulator and analysis toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file; flags override its keys")
        p.add_argument("--out", help="output directory")
        p.add_argument("--loop", help="standard or wedge:N")
        p.add_argument("--loop-file", dest="loop_file", help="LoopSpec JSON file")
        p.add_argument("--omega", type=float, help="energy scale Omega")
        p.add_argument("--grid", help="Omega*tau grid as START:STOP:POINTS")
        p.add_argument("--omega-tau", dest="omega_tau", type=float,
                       help="single Omega*tau instead of a grid")
        p.add_argument("--lambda-sq", dest="lambda_sq",
                       help="comma-separated coupling strengths")
        p.add_argument("--gamma0", type=float, help="flat high-T decay rate")
        p.add_argument("--noise-file", dest="noise_file", help="NoiseModel JSON file")
        p.add_argument("--states", type=int, help="Bloch-sphere sample count")
        p.add_argument("--steps", type=int, help="integrator steps per loop")
        p.add_argument("--calibrate-f2", dest="calibrate_f2", type=float,
                       help="calibrate gamma0 so the fitted F2 matches this value")
        p.add_argument("--free-intercept", dest="free_intercept", action="store_true",
                       help="also report free-intercept diagnostic fits")
        p.add_argument("--table", help="optimal-points JSON file (fit command)")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = resolve_config(args)
        return _COMMANDS[args.command](cfg)
    except (ConfigError, UnderdeterminedFit, ModelMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (StepCountTooSmall, NoPeakInWindow) as exc:
        print(f"numerical validation failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except TripodError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
